//! Zariski closures of one-parameter matrix groups `{e^{At}}`.
//!
//! Two independent routes are provided. The ideal route follows the Jordan
//! decomposition: a lattice ideal for the semisimple part, the image of the
//! affine line for the unipotent part, their product closure, and a
//! conjugation. The parametric route writes the same group as the image of
//! a torus times a line and is what the fixpoint engine uses to act on
//! varieties.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::exactnum::{Field, NfElem, NumberField, Rational};
use crate::intlat::{integer_kernel_saturated, relation_lattice_additive, RelationLattice};
use crate::matalg::{jordan_decomposition, nilpotent_exp, Jordan, Matrix};
use crate::polyideal::{lattice_ideal, matrix_ring, MPoly, Mono, MonoOrder, PolyIdeal, Ring};
use crate::{Error, Result};

/// `cl{e^{At} : t >= 0}` as an ideal in the `d²` coordinates `x_i_j`.
#[derive(Clone, Debug)]
pub struct FlowClosure {
    pub dim: usize,
    pub ideal: PolyIdeal<NfElem>,
    pub source: Matrix<NfElem>,
}

/// `d×d` matrix of polynomials, row-major.
pub type PolyMatrix = Vec<MPoly<NfElem>>;

pub fn const_poly_matrix(ring: &Arc<Ring<NfElem>>, m: &Matrix<NfElem>) -> PolyMatrix {
    m.entries().iter().map(|c| MPoly::constant(ring, c.clone())).collect()
}

pub fn poly_matmul(a: &[MPoly<NfElem>], b: &[MPoly<NfElem>], d: usize) -> PolyMatrix {
    let ring = a[0].ring().clone();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut s = MPoly::zero(&ring);
            for k in 0..d {
                if !a[i * d + k].is_zero() && !b[k * d + j].is_zero() {
                    s = s.add(&a[i * d + k].mul(&b[k * d + j]));
                }
            }
            out.push(s);
        }
    }
    out
}

/// Matrix-vector product with polynomial entries.
pub fn poly_matvec(a: &[MPoly<NfElem>], v: &[MPoly<NfElem>]) -> Vec<MPoly<NfElem>> {
    let d = v.len();
    (0..d)
        .map(|i| {
            (0..d).fold(MPoly::zero(v[0].ring()), |acc, k| {
                if a[i * d + k].is_zero() {
                    acc
                } else {
                    acc.add(&a[i * d + k].mul(&v[k]))
                }
            })
        })
        .collect()
}

/// Closure of `{diag(e^{λ_1 t}, ..., e^{λ_d t})}`: the lattice ideal of the
/// additive relations on the diagonal, off-diagonal entries zero.
pub fn diag_flow_closure(k: &Arc<NumberField>, lambda: &[NfElem]) -> Result<FlowClosure> {
    let d = lambda.len();
    let ring = matrix_ring::<NfElem>(k, d);
    let zring = Ring::with_vars(
        k,
        (0..d).map(|i| ring.vars[i * d + i].clone()).collect(),
        MonoOrder::Grevlex,
    );
    let lat = relation_lattice_additive(lambda);
    let tor = lattice_ideal(&zring, &lat)?;
    let diag_map: Vec<usize> = (0..d).map(|i| i * d + i).collect();
    let mut gens: Vec<MPoly<NfElem>> = tor
        .groebner_basis()?
        .iter()
        .map(|g| g.rename(&ring, &diag_map))
        .collect();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                gens.push(MPoly::var(&ring, i * d + j));
            }
        }
    }
    let source = Matrix::diag(k, lambda);
    Ok(FlowClosure {
        dim: d,
        ideal: PolyIdeal::new(&ring, gens),
        source,
    })
}

/// `e^{Ns}` with `s` the single variable of `ring`.
fn nilpotent_exp_poly(n: &Matrix<NfElem>, ring: &Arc<Ring<NfElem>>, s: usize) -> Result<PolyMatrix> {
    let e = nilpotent_exp(n)?;
    let nv = ring.nvars();
    Ok(e.iter()
        .flat_map(|row| row.iter())
        .map(|p| {
            MPoly::from_terms(
                ring,
                p.coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, c)| (Mono::var(nv, s, k as u16), c.clone()))
                    .collect(),
            )
        })
        .collect())
}

/// Closure of `{e^{Ns}}` for nilpotent `N`: the image of the affine line.
pub fn nilpotent_flow_closure(n: &Matrix<NfElem>) -> Result<FlowClosure> {
    let d = n.rows();
    let k = n.ctx().clone();
    let line = Ring::new(&k, &["s"], MonoOrder::Grevlex);
    let entries = nilpotent_exp_poly(n, &line, 0)?;
    let ring = matrix_ring::<NfElem>(&k, d);
    let ideal = PolyIdeal::zero(&line).image_closure(&ring, &entries)?;
    Ok(FlowClosure {
        dim: d,
        ideal,
        source: n.clone(),
    })
}

/// `{P M P^{-1} : M ∈ V(I)}` for an ideal in matrix coordinates.
pub fn conjugate_ideal(ideal: &PolyIdeal<NfElem>, p: &Matrix<NfElem>, p_inv: &Matrix<NfElem>) -> PolyIdeal<NfElem> {
    let ring = ideal.ring();
    let d = p.rows();
    let z: PolyMatrix = (0..d * d).map(|i| MPoly::var(ring, i)).collect();
    let h = poly_matmul(
        &poly_matmul(&const_poly_matrix(ring, p_inv), &z, d),
        &const_poly_matrix(ring, p),
        d,
    );
    ideal.preimage(ring, &h)
}

/// Closure of the one-parameter group generated by `A` (entries in a field
/// where its characteristic polynomial splits).
pub fn one_param_closure(a: &Matrix<NfElem>) -> Result<FlowClosure> {
    let d = a.rows();
    let k = a.ctx().clone();
    if a.is_zero() {
        let ring = matrix_ring::<NfElem>(&k, d);
        return Ok(FlowClosure {
            dim: d,
            ideal: crate::polyideal::identity_ideal(&ring, d),
            source: a.clone(),
        });
    }
    let j = jordan_decomposition(a)?;
    let diag = diag_flow_closure(&k, &j.eigenvalues)?;
    let nil = nilpotent_flow_closure(&j.n)?;
    let prod = diag.ideal.product_closure(&nil.ideal)?;
    let conj = conjugate_ideal(&prod, &j.p, &j.p_inv);
    let ring = conj.ring().clone();
    let basis = conj.groebner_basis()?.to_vec();
    Ok(FlowClosure {
        dim: d,
        ideal: PolyIdeal::new(&ring, basis),
        source: a.clone(),
    })
}

/// Rational basis of `{m : m·n = 0 for n in L}`.
pub fn orthogonal_lattice(l: &RelationLattice) -> RelationLattice {
    let rows: Vec<Vec<Rational>> = l
        .basis
        .iter()
        .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    integer_kernel_saturated(&rows, l.ambient_dim)
}

/// A connected matrix group as the image of a polynomial map
/// `(u, v, s) ↦ P·diag(z(u, v))·U(s)·P^{-1}` restricted to `u_k v_k = 1`.
#[derive(Clone, Debug)]
pub struct GroupParam {
    pub dim: usize,
    pub ring: Arc<Ring<NfElem>>,
    /// `d²` entries over `ring`.
    pub entries: PolyMatrix,
    /// `u_k v_k - 1`.
    pub relations: Vec<MPoly<NfElem>>,
}

fn torus_monomial(m: &[Vec<BigInt>], i: usize, r: usize, nv: usize) -> Result<Mono> {
    let mut e = vec![0u16; nv];
    for (k, row) in m.iter().enumerate() {
        let x = &row[i];
        let a = x
            .abs()
            .to_u16()
            .ok_or_else(|| Error::Internal("torus exponent out of range".into()))?;
        if x.is_negative() {
            e[r + k] += a;
        } else {
            e[k] += a;
        }
    }
    Ok(Mono::new(e))
}

/// Parametrisation of `cl{e^{At}}` from its Jordan decomposition.
pub fn flow_group_param(a: &Matrix<NfElem>) -> Result<GroupParam> {
    let j = jordan_decomposition(a)?;
    group_param_from_parts(a.ctx(), &j, &relation_lattice_additive(&j.eigenvalues), true)
}

/// Shared construction for flows and cyclic groups: `lat` is the relation
/// lattice of the semisimple part; `line` adds the unipotent parameter.
pub fn group_param_from_parts(
    k: &Arc<NumberField>,
    j: &Jordan<NfElem>,
    lat: &RelationLattice,
    line: bool,
) -> Result<GroupParam> {
    group_param_with_unipotent(k, j, lat, if line { Some(&j.n) } else { None })
}

/// As [`group_param_from_parts`] with the unipotent factor `e^{Ms}` for an
/// explicit nilpotent `M` commuting with the torus.
pub fn group_param_with_unipotent(
    k: &Arc<NumberField>,
    j: &Jordan<NfElem>,
    lat: &RelationLattice,
    nil: Option<&Matrix<NfElem>>,
) -> Result<GroupParam> {
    let d = j.p.rows();
    let m = orthogonal_lattice(lat).basis;
    let r = m.len();
    let has_line = nil.is_some_and(|n| !n.is_zero());
    let mut names: Vec<String> = (1..=r).map(|i| format!("_u{i}")).collect();
    names.extend((1..=r).map(|i| format!("_v{i}")));
    if has_line {
        names.push("_s".into());
    }
    let ring = Ring::with_vars(k, names, MonoOrder::Grevlex);
    let nv = ring.nvars();
    let one = NfElem::one(k);
    let mut diag = vec![MPoly::zero(&ring); d * d];
    for i in 0..d {
        diag[i * d + i] = MPoly::term(&ring, torus_monomial(&m, i, r, nv)?, one.clone());
    }
    let mut core = diag;
    if has_line {
        let u = nilpotent_exp_poly(nil.unwrap(), &ring, 2 * r)?;
        core = poly_matmul(&core, &u, d);
    }
    let entries = poly_matmul(
        &poly_matmul(&const_poly_matrix(&ring, &j.p), &core, d),
        &const_poly_matrix(&ring, &j.p_inv),
        d,
    );
    let relations = (0..r)
        .map(|k2| {
            MPoly::var(&ring, k2)
                .mul(&MPoly::var(&ring, r + k2))
                .sub(&MPoly::one(&ring))
        })
        .collect();
    Ok(GroupParam {
        dim: d,
        ring,
        entries,
        relations,
    })
}

impl GroupParam {
    /// Closure of the parametrised group in matrix coordinates.
    pub fn closure_ideal(&self) -> Result<PolyIdeal<NfElem>> {
        let target = matrix_ring::<NfElem>(&self.ring.ctx, self.dim);
        PolyIdeal::new(&self.ring, self.relations.clone()).image_closure(&target, &self.entries)
    }

    pub fn nparams(&self) -> usize {
        self.ring.nvars()
    }

    pub fn is_trivial(&self) -> bool {
        self.nparams() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, splitting_field};
    use crate::polyideal::{identity_ideal, parse_poly};

    fn field_for(rows: &[Vec<Rational>]) -> Arc<NumberField> {
        let a = Matrix::<Rational>::from_rationals(&(), rows).unwrap();
        let cp = a.charpoly();
        splitting_field(&cp).unwrap().field
    }

    fn mat(rows: &[&[i64]]) -> (Arc<NumberField>, Matrix<NfElem>) {
        let r: Vec<Vec<Rational>> = rows.iter().map(|x| x.iter().map(|&v| int(v)).collect()).collect();
        let k = field_for(&r);
        (k.clone(), Matrix::from_rationals(&k, &r).unwrap())
    }

    fn basis(i: &PolyIdeal<NfElem>) -> Vec<String> {
        i.groebner_basis().unwrap().iter().map(|g| g.to_string()).collect()
    }

    fn expect(ring: &Arc<Ring<NfElem>>, gens: &[&str]) -> PolyIdeal<NfElem> {
        PolyIdeal::new(ring, gens.iter().map(|g| parse_poly(ring, g).unwrap()).collect())
    }

    #[test]
    fn diagonal_examples() {
        let k = NumberField::rationals();
        let e = |v: i64| NfElem::from_i64(&k, v);
        let f = diag_flow_closure(&k, &[e(1), e(-1)]).unwrap();
        let r = f.ideal.ring().clone();
        assert!(f
            .ideal
            .same_ideal(&expect(&r, &["x_1_1*x_2_2 - 1", "x_1_2", "x_2_1"]))
            .unwrap());
        let f = diag_flow_closure(&k, &[e(1), e(2)]).unwrap();
        assert!(f
            .ideal
            .same_ideal(&expect(&r, &["x_1_1^2 - x_2_2", "x_1_2", "x_2_1"]))
            .unwrap());
        let f = diag_flow_closure(&k, &[e(0), e(0)]).unwrap();
        assert!(f.ideal.same_ideal(&identity_ideal(&r, 2)).unwrap());
    }

    #[test]
    fn nilpotent_examples() {
        let (_, n) = mat(&[&[0, 1], &[0, 0]]);
        let f = nilpotent_flow_closure(&n).unwrap();
        assert_eq!(basis(&f.ideal), ["x_2_2 - 1", "x_2_1", "x_1_1 - 1"]);
        let (_, z) = mat(&[&[0, 0], &[0, 0]]);
        let f = nilpotent_flow_closure(&z).unwrap();
        assert!(f.ideal.same_ideal(&identity_ideal(f.ideal.ring(), 2)).unwrap());
        let (_, s3) = mat(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let f = nilpotent_flow_closure(&s3).unwrap();
        let r = f.ideal.ring().clone();
        assert!(f.ideal.contains(&parse_poly(&r, "2*x_1_3 - x_1_2^2").unwrap()).unwrap());
        assert_eq!(f.ideal.dimension().unwrap(), 1);
    }

    #[test]
    fn one_param_examples() {
        let (_, a) = mat(&[&[1, 0], &[0, -1]]);
        let f = one_param_closure(&a).unwrap();
        let r = f.ideal.ring().clone();
        assert!(f
            .ideal
            .same_ideal(&expect(&r, &["x_1_2", "x_2_1", "x_1_1*x_2_2 - 1"]))
            .unwrap());

        let (_, rot) = mat(&[&[0, 1], &[-1, 0]]);
        let f = one_param_closure(&rot).unwrap();
        let r = f.ideal.ring().clone();
        let real = f.ideal.real_restrict().unwrap();
        let want = expect(&r, &["x_1_1 - x_2_2", "x_1_2 + x_2_1", "x_1_1^2 + x_1_2^2 - 1"]);
        assert!(real.same_ideal(&want).unwrap());

        let (_, z) = mat(&[&[0, 0], &[0, 0]]);
        let f = one_param_closure(&z).unwrap();
        assert!(f.ideal.same_ideal(&identity_ideal(f.ideal.ring(), 2)).unwrap());
    }

    fn numeric_exp(a: &[&[i64]], t: f64) -> Vec<num_complex::Complex64> {
        let d = a.len();
        let m = nalgebra::DMatrix::from_fn(d, d, |i, j| a[i][j] as f64 * t);
        let e = m.exp();
        (0..d * d)
            .map(|k| num_complex::Complex64::new(e[(k / d, k % d)], 0.0))
            .collect()
    }

    const CASES: &[&[&[i64]]] = &[
        &[&[1, 0], &[0, -1]],
        &[&[0, 1], &[-1, 0]],
        &[&[1, 1], &[0, 1]],
        &[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]],
        &[&[2, 0, 0], &[0, 1, 1], &[0, 0, 1]],
        &[&[0, 0], &[0, 0]],
    ];

    #[test]
    fn flow_closure_properties() {
        for &rows in CASES {
            let (_, a) = mat(rows);
            let f = one_param_closure(&a).unwrap();
            let d = a.rows();
            let r = f.ideal.ring().clone();
            // identity membership and group property
            assert!(identity_ideal(&r, d).contains_ideal(&f.ideal).unwrap(), "{rows:?}");
            assert!(f.ideal.product_closure(&f.ideal).unwrap().same_ideal(&f.ideal).unwrap());
            // numeric soundness
            for step in 0..50 {
                let t = step as f64 * 0.2;
                let x = numeric_exp(rows, t);
                let scale = x.iter().map(|v| v.norm()).fold(1.0, f64::max);
                for g in f.ideal.groebner_basis().unwrap() {
                    let tol = 1e-6 * g.coeff_norm1() * scale.powi(g.total_degree() as i32);
                    assert!(g.eval_c64(&x).norm() <= tol, "{rows:?} at t={t}: {g}");
                }
            }
            let dim = f.ideal.dimension().unwrap();
            assert!(a.is_zero() || dim >= 1);
        }
    }

    #[test]
    fn parametric_route_agrees() {
        for &rows in CASES {
            let (_, a) = mat(rows);
            let by_ideal = one_param_closure(&a).unwrap().ideal;
            let by_param = flow_group_param(&a).unwrap().closure_ideal().unwrap();
            assert!(by_ideal.same_ideal(&by_param).unwrap(), "{rows:?}");
        }
    }
}
