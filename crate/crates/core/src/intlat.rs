//! Integer linear algebra: Smith and Hermite normal forms, saturated integer
//! kernels, and additive / multiplicative relation lattices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactnum::{rational_coordinates, NfElem, Rational};

/// Dense integer matrix, row-major.
pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect()
}

pub fn int_matmul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for k in 0..inner {
                        s += &row[k] * &b[k][j];
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Determinant by Bareiss fraction-free elimination.
pub fn int_det(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Smith normal form `M = P B Q` with `P`, `Q` unimodular and `B` diagonal,
/// nonnegative, with `b_1 | b_2 | ...`.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut b = m.clone();
    let mut p = identity(rows);
    let mut q = identity(cols);

    // Row op "row i += k row j" on B is undone by "col j -= k col i" on P;
    // column op "col i += k col j" on B is undone by "row j -= k row i" on Q.
    let add_row = |b: &mut IntMatrix, p: &mut IntMatrix, i: usize, j: usize, k: &BigInt| {
        for c in 0..cols {
            let v = &b[j][c] * k;
            b[i][c] += v;
        }
        for r in 0..rows {
            let v = &p[r][i] * k;
            p[r][j] -= v;
        }
    };
    let add_col = |b: &mut IntMatrix, q: &mut IntMatrix, i: usize, j: usize, k: &BigInt| {
        for r in 0..rows {
            let v = &b[r][j] * k;
            b[r][i] += v;
        }
        for c in 0..cols {
            let v = &q[i][c] * k;
            q[j][c] -= v;
        }
    };
    let swap_rows = |b: &mut IntMatrix, p: &mut IntMatrix, i: usize, j: usize| {
        b.swap(i, j);
        for r in p.iter_mut() {
            r.swap(i, j);
        }
    };
    let swap_cols = |b: &mut IntMatrix, q: &mut IntMatrix, i: usize, j: usize| {
        for r in b.iter_mut() {
            r.swap(i, j);
        }
        q.swap(i, j);
    };

    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !b[i][j].is_zero() && best.map_or(true, |(bi, bj)| b[i][j].abs() < b[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return (p, b, q);
            };
            swap_rows(&mut b, &mut p, t, pi);
            swap_cols(&mut b, &mut q, t, pj);
            let mut clean = true;
            for i in t + 1..rows {
                if !b[i][t].is_zero() {
                    let k = -b[i][t].div_floor(&b[t][t]);
                    add_row(&mut b, &mut p, i, t, &k);
                    clean &= b[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !b[t][j].is_zero() {
                    let k = -b[t][j].div_floor(&b[t][t]);
                    add_col(&mut b, &mut q, j, t, &k);
                    clean &= b[t][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !b[i][j].is_multiple_of(&b[t][t]));
            match bad {
                Some((i, _)) => add_row(&mut b, &mut p, t, i, &BigInt::one()),
                None => break,
            }
        }
        if b[t][t].is_negative() {
            for c in 0..cols {
                b[t][c] = -b[t][c].clone();
            }
            for r in 0..rows {
                p[r][t] = -p[r][t].clone();
            }
        }
    }
    (p, b, q)
}

/// Inverse of a unimodular matrix by exact elimination.
fn unimodular_inverse(m: &IntMatrix) -> IntMatrix {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    let mut inv: Vec<Vec<Rational>> = identity(n)
        .into_iter()
        .map(|r| r.into_iter().map(Rational::from_integer).collect())
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r][c].is_zero()).expect("unimodular matrix");
        a.swap(c, piv);
        inv.swap(c, piv);
        let f = a[c][c].recip();
        for j in 0..n {
            a[c][j] = &a[c][j] * &f;
            inv[c][j] = &inv[c][j] * &f;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let k = a[r][c].clone();
                for j in 0..n {
                    let (x, y) = (&a[c][j] * &k, &inv[c][j] * &k);
                    a[r][j] -= x;
                    inv[r][j] -= y;
                }
            }
        }
    }
    inv.into_iter()
        .map(|r| r.into_iter().map(|x| x.to_integer()).collect())
        .collect()
}

/// Row-style Hermite normal form of the lattice spanned by `rows`: echelon
/// form with positive pivots, entries above each pivot reduced modulo it,
/// zero rows dropped.
pub fn hermite_normal_form(rows: &[Vec<BigInt>]) -> IntMatrix {
    let Some(first) = rows.first() else {
        return Vec::new();
    };
    let cols = first.len();
    let mut a: IntMatrix = rows.to_vec();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        // Euclid down column c among rows r..
        loop {
            let piv = (r..a.len())
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()));
            let Some(piv) = piv else { break };
            a.swap(r, piv);
            let mut done = true;
            for i in r + 1..a.len() {
                if !a[i][c].is_zero() {
                    let k = a[i][c].div_floor(&a[r][c]);
                    for j in c..cols {
                        let v = &a[r][j] * &k;
                        a[i][j] -= v;
                    }
                    done &= a[i][c].is_zero();
                }
            }
            if done {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for j in c..cols {
                a[r][j] = -a[r][j].clone();
            }
        }
        for i in 0..r {
            let k = a[i][c].div_floor(&a[r][c]);
            if !k.is_zero() {
                for j in c..cols {
                    let v = &a[r][j] * &k;
                    a[i][j] -= v;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// A sublattice of `Z^d` given by a basis in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationLattice {
    pub ambient_dim: usize,
    pub basis: Vec<Vec<BigInt>>,
}

impl RelationLattice {
    pub fn new(ambient_dim: usize, rows: &[Vec<BigInt>]) -> Self {
        RelationLattice {
            ambient_dim,
            basis: hermite_normal_form(rows),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        hermite_normal_form(&rows) == self.basis
    }

    /// `Z^d / L` is torsion-free.
    pub fn is_saturated(&self) -> bool {
        let (_, b, _) = smith_normal_form(&self.basis);
        (0..self.basis.len()).all(|i| b[i][i].is_one())
    }
}

/// Clear the denominators of each row.
pub(crate) fn integer_rows(m: &[Vec<Rational>]) -> IntMatrix {
    m.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .map(|x| (x * Rational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect()
}

/// `{n in Z^d : M n = 0}` for a rational matrix with `d` columns.
pub fn integer_kernel_saturated(m: &[Vec<Rational>], d: usize) -> RelationLattice {
    let rows = integer_rows(m);
    if rows.is_empty() {
        return RelationLattice::new(d, &identity(d));
    }
    let (_, b, q) = smith_normal_form(&rows);
    let rank = (0..rows.len().min(d)).filter(|&i| !b[i][i].is_zero()).count();
    // M n = 0  <=>  (Q n)_j = 0 for j < rank; the kernel is spanned by the
    // trailing columns of Q^{-1}.
    let qi = unimodular_inverse(&q);
    let basis: IntMatrix = (rank..d).map(|j| (0..d).map(|i| qi[i][j].clone()).collect()).collect();
    RelationLattice::new(d, &basis)
}

/// Integer additive relations `sum n_i a_i = 0`.
pub fn relation_lattice_additive(a: &[NfElem]) -> RelationLattice {
    integer_kernel_saturated(&rational_coordinates(a), a.len())
}

fn prime_factors(n: &BigInt, out: &mut Vec<BigInt>) {
    let mut n = n.abs();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if n.is_multiple_of(&p) {
            if !out.contains(&p) {
                out.push(p.clone());
            }
            while n.is_multiple_of(&p) {
                n /= &p;
            }
        }
        p += 1;
    }
    if n > BigInt::one() && !out.contains(&n) {
        out.push(n);
    }
}

fn valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut v = 0;
    while !n.is_zero() && n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Integer multiplicative relations `prod q_i^{n_i} = 1` of nonzero
/// rationals. A sign row with a doubled auxiliary column handles `-1`, so
/// the result need not be saturated when negative entries occur.
pub fn relation_lattice_multiplicative(q: &[Rational]) -> RelationLattice {
    let d = q.len();
    let mut primes = Vec::new();
    for x in q {
        prime_factors(x.numer(), &mut primes);
        prime_factors(x.denom(), &mut primes);
    }
    primes.sort();
    let mut m: Vec<Vec<Rational>> = primes
        .iter()
        .map(|p| {
            let mut row: Vec<Rational> = q
                .iter()
                .map(|x| Rational::from_integer(BigInt::from(valuation(x.numer(), p) - valuation(x.denom(), p))))
                .collect();
            row.push(Rational::zero());
            row
        })
        .collect();
    let negative = q.iter().any(|x| x.is_negative());
    if negative {
        let mut row: Vec<Rational> = q
            .iter()
            .map(|x| Rational::from_integer(BigInt::from(x.is_negative() as i64)))
            .collect();
        row.push(Rational::from_integer(BigInt::from(-2)));
        m.push(row);
    }
    let ext = integer_kernel_saturated(&m, d + 1);
    let basis: IntMatrix = ext.basis.iter().map(|r| r[..d].to_vec()).collect();
    RelationLattice::new(d, &basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat, Field, NumberField, UPoly};

    fn im(rows: &[&[i64]]) -> IntMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn check_snf(m: &IntMatrix) -> IntMatrix {
        let (p, b, q) = smith_normal_form(m);
        assert_eq!(&int_matmul(&int_matmul(&p, &b), &q), m);
        assert_eq!(int_det(&p).abs(), BigInt::one());
        assert_eq!(int_det(&q).abs(), BigInt::one());
        let diag: Vec<BigInt> = (0..b.len().min(b[0].len())).map(|i| b[i][i].clone()).collect();
        for w in diag.windows(2) {
            assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
        b
    }

    #[test]
    fn smith_examples() {
        assert_eq!(check_snf(&im(&[&[2, 0], &[0, 3]])), im(&[&[1, 0], &[0, 6]]));
        assert_eq!(check_snf(&im(&[&[1, 2]])), im(&[&[1, 0]]));
        let z = im(&[&[0, 0], &[0, 0]]);
        let (p, b, q) = smith_normal_form(&z);
        assert_eq!((p, b, q), (identity(2), z, identity(2)));
        check_snf(&im(&[&[4, 6, 2], &[6, 9, 3], &[2, 8, 10]]));
    }

    #[test]
    fn kernels() {
        let k = integer_kernel_saturated(&[vec![int(1), int(1)]], 2);
        assert_eq!(k.basis, im(&[&[1, -1]]));
        assert_eq!(
            integer_kernel_saturated(&[vec![int(1), int(0)], vec![int(0), int(1)]], 2).rank(),
            0
        );
        let k = integer_kernel_saturated(&[vec![int(2), int(-1)]], 2);
        assert_eq!(k.basis, im(&[&[1, 2]]));
        // kernel of x - y - z
        let k = integer_kernel_saturated(&[vec![int(1), int(-1), rat(-1, 1)]], 3);
        assert!(k.is_saturated());
        assert!(k.contains(&[BigInt::from(1), BigInt::from(1), BigInt::from(0)]));
    }

    #[test]
    fn additive_lattices() {
        let q = NumberField::rationals();
        let e = |n: i64| NfElem::from_i64(&q, n);
        assert_eq!(relation_lattice_additive(&[e(1), e(-1)]).basis, im(&[&[1, 1]]));
        assert_eq!(relation_lattice_additive(&[e(1), e(2)]).basis, im(&[&[2, -1]]));
        let k = NumberField::new(&UPoly::from_i64(&[-2, 0, 1]), 0).unwrap();
        let r2 = NfElem::theta(&k);
        assert_eq!(relation_lattice_additive(&[NfElem::one(&k), r2]).rank(), 0);
    }

    #[test]
    fn multiplicative_lattices() {
        assert_eq!(
            relation_lattice_multiplicative(&[int(2), int(4)]).basis,
            im(&[&[2, -1]])
        );
        assert_eq!(relation_lattice_multiplicative(&[int(2), int(3)]).rank(), 0);
        assert_eq!(relation_lattice_multiplicative(&[int(1)]).basis, im(&[&[1]]));
        assert_eq!(relation_lattice_multiplicative(&[int(-1)]).basis, im(&[&[2]]));
        let l = relation_lattice_multiplicative(&[int(-2), rat(1, 2)]);
        assert_eq!(l.basis, im(&[&[2, 2]]));
    }
}
