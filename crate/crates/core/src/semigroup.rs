//! Closure of the matrix semigroup generated by several one-parameter
//! groups, and invariants of switching systems built from it.

use rayon::prelude::*;

use crate::exactnum::NfElem;
use crate::flowclosure::{one_param_closure, FlowClosure};
use crate::hybrid::{HybridAutomaton, InvariantFamily, Mode};
use crate::matalg::Matrix;
use crate::polyideal::{identity_ideal, matrix_ring, MPoly, MonoOrder, PolyIdeal, Ring};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct SemigroupClosure {
    pub dim: usize,
    pub ideal: PolyIdeal<NfElem>,
    pub generators: Vec<Matrix<NfElem>>,
    pub iterations_used: usize,
}

/// `cl` of the semigroup generated by `{e^{A_i t} : t >= 0}`.
pub fn semigroup_closure(a: &[Matrix<NfElem>]) -> Result<SemigroupClosure> {
    let first = a
        .first()
        .ok_or_else(|| Error::Semantic("semigroup closure needs at least one matrix".into()))?;
    let d = first.rows();
    if a.iter().any(|m| m.rows() != d || m.cols() != d) {
        return Err(Error::Shape("all generators must be square of the same size".into()));
    }
    let groups: Vec<FlowClosure> = a.par_iter().map(one_param_closure).collect::<Result<_>>()?;
    semigroup_of_closures(a, &groups)
}

/// The fixpoint loop over precomputed generator closures.
pub fn semigroup_of_closures(a: &[Matrix<NfElem>], groups: &[FlowClosure]) -> Result<SemigroupClosure> {
    let d = groups[0].dim;
    let ring = groups[0].ideal.ring().clone();
    let cap = d * d + 1;
    let mut h = identity_ideal(&ring, d);
    h.groebner_basis()?;
    let mut iterations = 0;
    loop {
        if iterations >= cap {
            return Err(Error::Internal(format!(
                "semigroup closure did not stabilise within {cap} iterations"
            )));
        }
        iterations += 1;
        let before = h.clone();
        for g in groups {
            let next = h.product_closure(&g.ideal)?;
            // varieties only grow
            if !h.contains_ideal(&next)? {
                return Err(Error::Internal("semigroup chain is not monotone".into()));
            }
            h = PolyIdeal::new(&ring, next.groebner_basis()?.to_vec());
        }
        if h.same_ideal(&before)? {
            break;
        }
    }
    for g in groups {
        if !h.product_closure(&g.ideal)?.same_ideal(&h)? {
            return Err(Error::Internal("semigroup fixpoint certificate failed".into()));
        }
    }
    Ok(SemigroupClosure {
        dim: d,
        ideal: h,
        generators: a.to_vec(),
        iterations_used: iterations,
    })
}

/// `cl(G·X)` for a matrix variety `G` (ideal in `x_i_j`) and a point
/// variety `X`, through the action map `(M, y) ↦ M y`.
pub fn orbit_closure(g: &PolyIdeal<NfElem>, x: &PolyIdeal<NfElem>) -> Result<PolyIdeal<NfElem>> {
    let pts = x.ring().clone();
    let d = pts.nvars();
    let k = pts.ctx.clone();
    let mut vars = matrix_ring::<NfElem>(&k, d).vars.clone();
    vars.extend(pts.vars.iter().cloned());
    let src = Ring::with_vars(&k, vars, MonoOrder::Grevlex);
    let shift: Vec<usize> = (0..d * d).collect();
    let mut gens: Vec<MPoly<NfElem>> = g.generators().iter().map(|p| p.rename(&src, &shift)).collect();
    let ymap: Vec<usize> = (0..d).map(|i| d * d + i).collect();
    gens.extend(x.generators().iter().map(|p| p.rename(&src, &ymap)));
    let f: Vec<MPoly<NfElem>> = (0..d)
        .map(|i| {
            (0..d).fold(MPoly::zero(&src), |acc, j| {
                acc.add(&MPoly::var(&src, i * d + j).mul(&MPoly::var(&src, d * d + j)))
            })
        })
        .collect();
    PolyIdeal::new(&src, gens).image_closure(&pts, &f)
}

/// Invariants of a switching system: the semigroup closure of all flows
/// applied to the union of the initial sets, identical at every location.
pub fn switching_invariants(h: &HybridAutomaton) -> Result<InvariantFamily> {
    if h.mode != Mode::Switching {
        return Err(Error::Semantic(
            "switching_invariants needs a switching-mode model".into(),
        ));
    }
    let flows: Vec<Matrix<NfElem>> = h.locations.iter().map(|l| l.flow.clone()).collect();
    let sg = semigroup_closure(&flows)?;
    let ring = h.ring.clone();
    let mut x = PolyIdeal::unit(&ring);
    for l in &h.locations {
        x = x.union_closure(&l.initial)?;
    }
    let v = orbit_closure(&sg.ideal, &x)?;
    let v = PolyIdeal::new(&ring, v.groebner_basis()?.iter().map(|g| g.reorder(&ring)).collect());
    let dim = v.dimension()?;
    Ok(InvariantFamily {
        ring: ring.clone(),
        names: h.locations.iter().map(|l| l.name.clone()).collect(),
        ideals: vec![v; h.locations.len()],
        rounds: sg.iterations_used,
        converged: true,
        real: false,
        dimension_trace: vec![vec![dim; h.locations.len()]],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::exactnum::{int, splitting_field, NumberField, Rational, UPoly};
    use crate::polyideal::parse_poly;

    fn qi() -> Arc<NumberField> {
        splitting_field(&UPoly::from_rationals(vec![int(1), int(0), int(1)]))
            .unwrap()
            .field
    }

    fn mat(k: &Arc<NumberField>, rows: &[&[i64]]) -> Matrix<NfElem> {
        let r: Vec<Vec<Rational>> = rows.iter().map(|x| x.iter().map(|&v| int(v)).collect()).collect();
        Matrix::from_rationals(k, &r).unwrap()
    }

    #[test]
    fn single_generator_matches_flow_closure() {
        let k = qi();
        let a = mat(&k, &[&[1, 0], &[0, -1]]);
        let s = semigroup_closure(std::slice::from_ref(&a)).unwrap();
        assert!(s.ideal.same_ideal(&one_param_closure(&a).unwrap().ideal).unwrap());
        let n = mat(&k, &[&[0, 1], &[0, 0]]);
        let s = semigroup_closure(std::slice::from_ref(&n)).unwrap();
        assert!(s.ideal.same_ideal(&one_param_closure(&n).unwrap().ideal).unwrap());
        assert!(s.iterations_used <= 4);
    }

    #[test]
    fn hyperbolic_and_rotation_give_sl2() {
        let k = qi();
        let a = [mat(&k, &[&[1, 0], &[0, -1]]), mat(&k, &[&[0, 1], &[-1, 0]])];
        let s = semigroup_closure(&a).unwrap();
        let r = s.ideal.ring().clone();
        let sl2 = PolyIdeal::new(&r, vec![parse_poly(&r, "x_1_1*x_2_2 - x_1_2*x_2_1 - 1").unwrap()]);
        assert!(s.ideal.same_ideal(&sl2).unwrap());
        assert_eq!(s.ideal.dimension().unwrap(), 3);
        assert!(s.iterations_used <= 4);
    }

    #[test]
    fn orbit_of_a_point_under_rotations() {
        let k = qi();
        let rot = one_param_closure(&mat(&k, &[&[0, 1], &[-1, 0]])).unwrap();
        let pts = Ring::new(&k, &["x", "y"], MonoOrder::Grevlex);
        let p = PolyIdeal::new(
            &pts,
            vec![parse_poly(&pts, "x - 1").unwrap(), parse_poly(&pts, "y").unwrap()],
        );
        let o = orbit_closure(&rot.ideal, &p).unwrap().real_restrict().unwrap();
        let circle = PolyIdeal::new(&pts, vec![parse_poly(&pts, "x^2 + y^2 - 1").unwrap()]);
        assert!(o.same_ideal(&circle).unwrap());
    }
}
