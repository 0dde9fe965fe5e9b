//! Exact matrices over a [`Field`]: characteristic polynomials, Jordan
//! decomposition and exponentials of nilpotent matrices.

use std::fmt;

use crate::exactnum::{int, Field, Rational, UPoly};
use crate::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
    ctx: F::Ctx,
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_strings()).finish()
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(ctx: &F::Ctx, rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(ctx); rows * cols],
            ctx: ctx.clone(),
        }
    }

    pub fn identity(ctx: &F::Ctx, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m[(i, i)] = F::one(ctx);
        }
        m
    }

    pub fn from_rows(ctx: &F::Ctx, rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
            ctx: ctx.clone(),
        })
    }

    pub fn from_rationals(ctx: &F::Ctx, rows: &[Vec<Rational>]) -> Result<Self> {
        Self::from_rows(
            ctx,
            rows.iter()
                .map(|r| r.iter().map(|q| F::from_rational(ctx, q)).collect())
                .collect(),
        )
    }

    pub fn diag(ctx: &F::Ctx, d: &[F]) -> Self {
        let mut m = Self::zeros(ctx, d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ctx(&self) -> &F::Ctx {
        &self.ctx
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn map<G: Field>(&self, ctx: &G::Ctx, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
            ctx: ctx.clone(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        Matrix {
            data: self.data.iter().map(|a| a.mul(c)).collect(),
            ..self.clone()
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product shape");
        let mut out = Self::zeros(&self.ctx, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)].add_assign(&a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        (0..self.rows)
            .map(|i| {
                let mut s = F::zero(&self.ctx);
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s.add_assign(&a.mul(b));
                    }
                }
                s
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(&self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn pow(&self, mut e: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(&self.ctx, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].mul(&inv);
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = m[(r, j)].mul(&f);
                        m[(i, j)].sub_assign(&v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one vector per free column in column
    /// order.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let (m, pivots) = self.rref();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![F::zero(&self.ctx); self.cols];
            v[free] = F::one(&self.ctx);
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = m[(r, free)].neg();
            }
            out.push(v);
        }
        out
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(&self.ctx, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = F::one(&self.ctx);
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = Self::zeros(&self.ctx, n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(out)
    }

    pub fn from_columns(ctx: &F::Ctx, cols: &[Vec<F>]) -> Self {
        let n = cols.first().map_or(0, |c| c.len());
        let mut m = Self::zeros(ctx, n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    /// Characteristic polynomial `det(x I - A)` by Berkowitz's
    /// division-free algorithm.
    pub fn charpoly(&self) -> UPoly<F> {
        assert!(self.is_square());
        let n = self.rows;
        let ctx = &self.ctx;
        // coefficient vectors, highest degree first
        let mut c: Vec<F> = vec![F::one(ctx)];
        for k in 0..n {
            // leading k x k block is A_k; new row/column index k
            let akk = self[(k, k)].clone();
            let r: Vec<F> = (0..k).map(|j| self[(k, j)].clone()).collect();
            let s: Vec<F> = (0..k).map(|i| self[(i, k)].clone()).collect();
            // Toeplitz column: 1, -a_kk, -r s, -r A s, -r A^2 s, ...
            let mut t = vec![F::one(ctx), akk.neg()];
            let mut v = s.clone();
            for _ in 0..k {
                let mut dot = F::zero(ctx);
                for (a, b) in r.iter().zip(&v) {
                    dot.add_assign(&a.mul(b));
                }
                t.push(dot.neg());
                v = (0..k)
                    .map(|i| {
                        let mut acc = F::zero(ctx);
                        for (j, b) in v.iter().enumerate() {
                            acc.add_assign(&self[(i, j)].mul(b));
                        }
                        acc
                    })
                    .collect();
            }
            let mut next = vec![F::zero(ctx); k + 2];
            for (i, ti) in t.iter().enumerate().take(k + 2) {
                for (j, cj) in c.iter().enumerate() {
                    if i + j < k + 2 {
                        next[i + j].add_assign(&ti.mul(cj));
                    }
                }
            }
            c = next;
        }
        c.reverse();
        UPoly::new(ctx, c)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.coeff_string()).collect())
            .collect()
    }
}

impl<F: Field> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F: Field> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

/// `A = P (D + N) P^{-1}` with `D` diagonal, `N` nilpotent in Jordan form
/// (ones on the superdiagonal inside each chain) and `D N = N D`.
#[derive(Clone, Debug)]
pub struct Jordan<F: Field> {
    pub p: Matrix<F>,
    pub p_inv: Matrix<F>,
    pub d: Matrix<F>,
    pub n: Matrix<F>,
    /// Diagonal of `D`.
    pub eigenvalues: Vec<F>,
    /// `(start, length)` of each Jordan chain along the diagonal.
    pub blocks: Vec<(usize, usize)>,
}

/// Jordan decomposition over the entry field; the characteristic
/// polynomial must split there.
pub fn jordan_decomposition<F: Field>(a: &Matrix<F>) -> Result<Jordan<F>> {
    if !a.is_square() {
        return Err(Error::Shape("jordan decomposition needs a square matrix".into()));
    }
    let n = a.rows();
    let ctx = a.ctx().clone();
    let roots = F::poly_roots(&a.charpoly())?;
    if roots.len() != n {
        return Err(Error::UnsupportedEigenvalueField(
            "characteristic polynomial does not split in the entry field".into(),
        ));
    }
    let mut distinct: Vec<(F, usize)> = Vec::new();
    for r in roots {
        match distinct.iter_mut().find(|(x, _)| *x == r) {
            Some(e) => e.1 += 1,
            None => distinct.push((r, 1)),
        }
    }
    let mut columns: Vec<Vec<F>> = Vec::new();
    let mut eigenvalues = Vec::new();
    let mut blocks = Vec::new();
    for (lambda, mult) in distinct {
        let m = a.sub(&Matrix::identity(&ctx, n).scale(&lambda));
        // kernels of M^j until the generalised eigenspace is reached
        let mut kernels: Vec<Vec<Vec<F>>> = vec![Vec::new()];
        let mut mj = Matrix::identity(&ctx, n);
        while kernels.last().unwrap().len() < mult {
            mj = mj.mul(&m);
            kernels.push(mj.kernel());
            if kernels.len() > n + 1 {
                return Err(Error::Internal("generalised eigenspace did not stabilise".into()));
            }
        }
        let top = kernels.len() - 1;
        // images at level j of chains started above level j
        let mut carried: Vec<Vec<F>> = Vec::new();
        let mut chains: Vec<Vec<Vec<F>>> = Vec::new();
        for level in (1..=top).rev() {
            let mut span: Vec<Vec<F>> = kernels[level - 1].clone();
            span.extend(carried.iter().cloned());
            let mut rank = independent_rank(&ctx, &span);
            for v in &kernels[level] {
                let mut trial = span.clone();
                trial.push(v.clone());
                let r = independent_rank(&ctx, &trial);
                if r > rank {
                    rank = r;
                    span = trial;
                    let mut chain = vec![v.clone()];
                    for _ in 1..level {
                        let next = m.mul_vec(chain.last().unwrap());
                        chain.push(next);
                    }
                    chain.reverse();
                    chains.push(chain);
                }
            }
            // chain[k] sits at level k + 1
            carried = chains
                .iter()
                .filter(|c| level > 1 && c.len() >= level)
                .map(|c| c[level - 2].clone())
                .collect();
        }
        for chain in chains {
            blocks.push((columns.len(), chain.len()));
            for v in chain {
                columns.push(v);
                eigenvalues.push(lambda.clone());
            }
        }
    }
    let p = Matrix::from_columns(&ctx, &columns);
    let p_inv = p
        .inverse()
        .ok_or_else(|| Error::Internal("Jordan basis is singular".into()))?;
    let d = Matrix::diag(&ctx, &eigenvalues);
    let mut nil = Matrix::zeros(&ctx, n, n);
    for &(s, len) in &blocks {
        for k in s..s + len - 1 {
            nil[(k, k + 1)] = F::one(&ctx);
        }
    }
    Ok(Jordan {
        p,
        p_inv,
        d,
        n: nil,
        eigenvalues,
        blocks,
    })
}

fn independent_rank<F: Field>(ctx: &F::Ctx, vecs: &[Vec<F>]) -> usize {
    if vecs.is_empty() {
        return 0;
    }
    Matrix::from_rows(ctx, vecs.to_vec()).unwrap().rank()
}

/// `e^{N t} = sum_{k<d} N^k t^k / k!` as a matrix of polynomials in `t`.
pub fn nilpotent_exp<F: Field>(n: &Matrix<F>) -> Result<Vec<Vec<UPoly<F>>>> {
    let d = n.rows();
    let ctx = n.ctx().clone();
    if !n.pow(d).is_zero() {
        return Err(Error::NotNilpotent);
    }
    let mut out = vec![vec![UPoly::zero(&ctx); d]; d];
    let mut pk = Matrix::identity(&ctx, d);
    let mut fact = int(1);
    for k in 0..d.max(1) {
        if k > 0 {
            pk = pk.mul(n);
            fact *= int(k as i64);
        }
        if pk.is_zero() {
            break;
        }
        let c = F::from_rational(&ctx, &fact.recip());
        for i in 0..d {
            for j in 0..d {
                if !pk[(i, j)].is_zero() {
                    let mut coeffs = vec![F::zero(&ctx); k + 1];
                    coeffs[k] = pk[(i, j)].mul(&c);
                    out[i][j] = out[i][j].add(&UPoly::new(&ctx, coeffs));
                }
            }
        }
    }
    Ok(out)
}

/// `e^N`, exact.
pub fn nilpotent_exp_at_one<F: Field>(n: &Matrix<F>) -> Result<Matrix<F>> {
    let ctx = n.ctx().clone();
    let e = nilpotent_exp(n)?;
    let one = F::one(&ctx);
    Matrix::from_rows(
        &ctx,
        e.iter().map(|r| r.iter().map(|p| p.eval(&one)).collect()).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{splitting_field, NfElem};

    fn q(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rationals(
            &(),
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    fn check<F: Field>(a: &Matrix<F>, j: &Jordan<F>) {
        let back = j.p.mul(&j.d.add(&j.n)).mul(&j.p_inv);
        assert_eq!(&back, a);
        assert_eq!(j.d.mul(&j.n), j.n.mul(&j.d));
        assert!(j.n.pow(a.rows()).is_zero());
    }

    #[test]
    fn charpoly_small() {
        let a = q(&[&[0, 1], &[-1, 0]]);
        assert_eq!(a.charpoly(), UPoly::from_i64(&[1, 0, 1]));
        let b = q(&[&[2, 1, 0], &[0, 2, 0], &[1, 0, 3]]);
        // (x-2)^2 (x-3)
        assert_eq!(b.charpoly(), UPoly::from_i64(&[-12, 16, -7, 1]));
    }

    #[test]
    fn jordan_nilpotent_and_unipotent() {
        let a = q(&[&[0, 1], &[0, 0]]);
        let j = jordan_decomposition(&a).unwrap();
        check(&a, &j);
        assert!(j.d.is_zero());
        assert_eq!(j.n, a);
        assert!(j.p.is_identity());
        let b = q(&[&[1, 1], &[0, 1]]);
        let j = jordan_decomposition(&b).unwrap();
        check(&b, &j);
        assert!(j.d.is_identity());
        assert_eq!(j.n, q(&[&[0, 1], &[0, 0]]));
    }

    #[test]
    fn jordan_rotation_over_gaussian_field() {
        let k = splitting_field(&UPoly::from_i64(&[1, 0, 1])).unwrap().field;
        let a = q(&[&[0, 1], &[-1, 0]]).map(&k, |x| NfElem::from_rat(&k, x));
        let j = jordan_decomposition(&a).unwrap();
        check(&a, &j);
        assert!(j.n.is_zero());
        assert!(j.eigenvalues[0].approx().im > 0.0);
        assert_eq!(j.eigenvalues[1], j.eigenvalues[0].neg());
    }

    #[test]
    fn jordan_mixed_blocks() {
        let a = q(&[&[2, 1, 0, 0], &[0, 2, 1, 0], &[0, 0, 2, 0], &[1, 0, 0, 2]]);
        let j = jordan_decomposition(&a).unwrap();
        check(&a, &j);
        let b = q(&[&[3, 1, 0], &[0, 3, 0], &[0, 0, 3]]);
        let j = jordan_decomposition(&b).unwrap();
        check(&b, &j);
        assert_eq!(j.blocks, vec![(0, 2), (2, 1)]);
    }

    #[test]
    fn nilpotent_exponentials() {
        let n = q(&[&[0, 1], &[0, 0]]);
        let e = nilpotent_exp(&n).unwrap();
        assert_eq!(e[0][1], UPoly::from_i64(&[0, 1]));
        assert_eq!(e[0][0], UPoly::from_i64(&[1]));
        assert!(nilpotent_exp(&q(&[&[0, 0], &[0, 0]])).unwrap()[0][1].is_zero());
        let s = q(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let e = nilpotent_exp(&s).unwrap();
        // d/dt e^{Nt} = N e^{Nt}
        for i in 0..3 {
            for j in 0..3 {
                let mut rhs = UPoly::zero(&());
                for k in 0..3 {
                    rhs = rhs.add(&e[k][j].scale(&s[(i, k)]));
                }
                assert_eq!(e[i][j].derivative(), rhs);
            }
        }
        assert_eq!(
            e[0][2],
            UPoly::from_rationals(vec![int(0), int(0), crate::exactnum::rat(1, 2)])
        );
        assert!(matches!(
            nilpotent_exp(&q(&[&[1, 0], &[0, 0]])),
            Err(Error::NotNilpotent)
        ));
    }
}
