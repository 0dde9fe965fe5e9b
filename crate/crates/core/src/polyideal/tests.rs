use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;
use crate::exactnum::{int, splitting_field, NfElem, Rational, UPoly};
use crate::intlat::RelationLattice;

fn qring(vars: &[&str]) -> Arc<Ring<Rational>> {
    Ring::new(&(), vars, MonoOrder::Grevlex)
}

fn ideal<F: crate::exactnum::Field>(ring: &Arc<Ring<F>>, gens: &[&str]) -> PolyIdeal<F> {
    PolyIdeal::new(ring, gens.iter().map(|g| parse_poly(ring, g).unwrap()).collect())
}

fn basis<F: crate::exactnum::Field>(i: &PolyIdeal<F>) -> Vec<String> {
    i.groebner_basis().unwrap().iter().map(|g| g.to_string()).collect()
}

#[test]
fn groebner_examples() {
    let r = qring(&["x"]);
    assert_eq!(basis(&ideal(&r, &["x^2-1", "x-1"])), ["x - 1"]);
    let r = qring(&["x", "y"]);
    assert_eq!(basis(&ideal(&r, &["x", "y"])), ["y", "x"]);
    let lex = Ring::<Rational>::new(&(), &["y", "x"], MonoOrder::Lex);
    assert_eq!(basis(&ideal(&lex, &["y-x^2", "x-1"])), ["x - 1", "y - 1"]);
}

#[test]
fn printer_round_trip() {
    let r = qring(&["x", "y"]);
    let p = parse_poly(&r, "-3/2*x^2*y + y - 7 + x*(2*x - 1)/4").unwrap();
    assert_eq!(p.to_string(), "-3/2*x^2*y + 1/2*x^2 - 1/4*x + y - 7");
    assert_eq!(parse_poly(&r, &p.to_string()).unwrap(), p);
    assert!(parse_poly(&r, "x + 1.5").is_err());
    assert!(parse_poly(&r, "x + z").is_err());
    assert!(parse_poly(&r, "x / y").is_err());
}

#[test]
fn radical_membership_examples() {
    let r = qring(&["x", "y"]);
    let x = parse_poly(&r, "x").unwrap();
    assert!(ideal(&r, &["x^2"]).radical_contains(&x).unwrap());
    assert!(!ideal(&r, &["y"]).radical_contains(&x).unwrap());
    let s = parse_poly(&r, "x+y").unwrap();
    assert!(ideal(&r, &["x^2", "y^2"]).radical_contains(&s).unwrap());
}

#[test]
fn elimination_examples() {
    let r = qring(&["x", "y"]);
    assert!(ideal(&r, &["y - x^2"])
        .eliminate(&[0])
        .unwrap()
        .is_zero_ideal()
        .unwrap());
    assert_eq!(
        basis(&ideal(&r, &["x - 1", "y - x"]).eliminate(&[0]).unwrap()),
        ["y - 1"]
    );
    assert!(ideal(&r, &["x*y - 1"])
        .eliminate(&[1])
        .unwrap()
        .is_zero_ideal()
        .unwrap());
}

#[test]
fn saturation_examples() {
    let r = qring(&["x", "y"]);
    let x = parse_poly(&r, "x").unwrap();
    assert_eq!(basis(&ideal(&r, &["x*y"]).saturate(&x).unwrap()), ["y"]);
    assert_eq!(basis(&ideal(&r, &["x^2 - x"]).saturate(&x).unwrap()), ["x - 1"]);
    assert_eq!(basis(&ideal(&r, &["y - x^2"]).saturate(&x).unwrap()), ["x^2 - y"]);
}

#[test]
fn image_closure_examples() {
    let src = qring(&["t"]);
    let tgt = qring(&["x", "y"]);
    let f = vec![parse_poly(&src, "t").unwrap(), parse_poly(&src, "t^2").unwrap()];
    let img = PolyIdeal::zero(&src).image_closure(&tgt, &f).unwrap();
    assert_eq!(basis(&img), ["x^2 - y"]);

    let id: Vec<_> = (0..2).map(|i| MPoly::var(&tgt, i)).collect();
    let c = ideal(&tgt, &["x^2 + y^2 - 1"]);
    assert!(c.image_closure(&tgt, &id).unwrap().same_ideal(&c).unwrap());

    let line = qring(&["u"]);
    let proj = c.image_closure(&line, &[MPoly::var(&tgt, 0)]).unwrap();
    assert!(proj.is_zero_ideal().unwrap());
}

#[test]
fn product_closure_examples() {
    let r = matrix_ring::<Rational>(&(), 2);
    let rot = ideal(&r, &["x_1_1 - x_2_2", "x_1_2 + x_2_1", "x_1_1^2 + x_1_2^2 - 1"]);
    let id = identity_ideal(&r, 2);
    assert!(id.product_closure(&rot).unwrap().same_ideal(&rot).unwrap());
    assert!(rot.product_closure(&rot).unwrap().same_ideal(&rot).unwrap());
    let torus = ideal(&r, &["x_1_2", "x_2_1", "x_1_1*x_2_2 - 1"]);
    let sq = torus.product_closure(&torus).unwrap();
    assert!(sq.same_ideal(&torus).unwrap());
    assert!(sq.dimension().unwrap() <= 2 * torus.dimension().unwrap());
}

#[test]
fn union_closure_examples() {
    let r = qring(&["x", "y"]);
    let u = ideal(&r, &["x"]).union_closure(&ideal(&r, &["y"])).unwrap();
    assert_eq!(basis(&u), ["x*y"]);
    let c = ideal(&r, &["x^2 + y^2 - 1"]);
    assert!(c.union_closure(&c).unwrap().same_ideal(&c).unwrap());
    let p = ideal(&r, &["x", "y"])
        .union_closure(&ideal(&r, &["x - 1", "y - 1"]))
        .unwrap();
    assert_eq!(basis(&p), ["x - y", "y^2 - y"]);
    assert_eq!(p.dimension().unwrap(), 0);
}

#[test]
fn dimension_examples() {
    let r = qring(&["x", "y"]);
    assert_eq!(ideal(&r, &["y - x^2"]).dimension().unwrap(), 1);
    assert_eq!(ideal(&r, &["1"]).dimension().unwrap(), -1);
    let m = matrix_ring::<Rational>(&(), 2);
    assert_eq!(ideal(&m, &["x_1_1*x_2_2 - x_1_2*x_2_1 - 1"]).dimension().unwrap(), 3);
}

#[test]
fn real_restrict_examples() {
    let x2p1 = UPoly::from_rationals(vec![int(1), int(0), int(1)]);
    let k = splitting_field(&x2p1).unwrap().field;
    let r = Ring::<NfElem>::new(&k, &["x", "y"], MonoOrder::Grevlex);
    let i = NfElem::theta(&k);
    let p = MPoly::var(&r, 0).sub(&MPoly::var(&r, 1).scale(&i));
    let re = PolyIdeal::new(&r, vec![p]).real_restrict().unwrap();
    assert_eq!(basis(&re), ["y", "x"]);

    let real = ideal(&r, &["x^2 + y^2 - 1"]);
    assert!(real.real_restrict().unwrap().same_ideal(&real).unwrap());

    let r1 = Ring::<NfElem>::new(&k, &["x"], MonoOrder::Grevlex);
    let q = ideal(&r1, &["x^2 + 1"]).real_restrict().unwrap();
    assert_eq!(basis(&q), ["x^2 + 1"]);
}

#[test]
fn nf_printing_and_theta() {
    let x2p1 = UPoly::from_rationals(vec![int(1), int(0), int(1)]);
    let k = splitting_field(&x2p1).unwrap().field;
    let r = Ring::<NfElem>::new(&k, &["x"], MonoOrder::Grevlex);
    let p = parse_poly(&r, "x^2 + (2*theta + 1)*x - theta").unwrap();
    let s = p.to_string();
    assert_eq!(parse_poly(&r, &s).unwrap(), p);
    assert!(s.contains("theta"));
}

#[test]
fn lattice_ideal_examples() {
    let r = qring(&["z1", "z2"]);
    let l = RelationLattice::new(2, &[vec![BigInt::from(1), BigInt::from(1)]]);
    assert_eq!(basis(&lattice_ideal(&r, &l).unwrap()), ["z1*z2 - 1"]);
    let empty = RelationLattice::new(2, &[]);
    assert!(lattice_ideal(&r, &empty).unwrap().is_zero_ideal().unwrap());
    let l = RelationLattice::new(2, &[vec![BigInt::from(2), BigInt::from(-1)]]);
    assert_eq!(basis(&lattice_ideal(&r, &l).unwrap()), ["z1^2 - z2"]);
}

#[test]
fn step_budget_is_enforced() {
    let r = qring(&["x", "y", "z"]);
    let i = ideal(&r, &["x^3 - y*z + 1", "y^3 - x*z", "z^3 - x*y - 2"]);
    let tiny = i.groebner_basis_with_budget(5);
    assert!(matches!(tiny, Err(crate::Error::StepBudget(5))));
}

fn arb_poly() -> impl Strategy<Value = String> {
    prop::collection::vec((-3i64..=3, 0u16..=2, 0u16..=2, 0u16..=1), 1..4).prop_map(|ts| {
        ts.iter()
            .map(|(c, a, b, e)| format!("({c})*x^{a}*y^{b}*z^{e}"))
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn groebner_is_canonical(gens in prop::collection::vec(arb_poly(), 1..4), seed in 0usize..24) {
        let r = qring(&["x", "y", "z"]);
        let refs: Vec<&str> = gens.iter().map(|s| s.as_str()).collect();
        let a = ideal(&r, &refs);
        let mut shuffled = refs.clone();
        shuffled.rotate_left(seed % refs.len());
        shuffled.reverse();
        let b = ideal(&r, &shuffled);
        let ga = a.groebner_basis().unwrap().to_vec();
        prop_assert_eq!(&ga, &b.groebner_basis().unwrap().to_vec());
        let again = PolyIdeal::new(&r, ga.clone());
        prop_assert_eq!(&ga, &again.groebner_basis().unwrap().to_vec());
        for g in &gens {
            prop_assert!(a.contains(&parse_poly(&r, g).unwrap()).unwrap());
        }
    }

    #[test]
    fn lattice_ideal_contains_lattice_binomials(
        rows in prop::collection::vec(prop::collection::vec(-2i64..=2, 3), 1..3),
        coeffs in prop::collection::vec(prop::collection::vec(-2i64..=2, 2), 20),
    ) {
        let r = qring(&["z1", "z2", "z3"]);
        let rows: Vec<Vec<BigInt>> = rows.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let l = RelationLattice::new(3, &rows);
        let i = lattice_ideal(&r, &l).unwrap();
        for c in &coeffs {
            let mut v = vec![BigInt::from(0); 3];
            for (k, b) in l.basis.iter().enumerate() {
                for j in 0..3 {
                    v[j] += &b[j] * BigInt::from(c[k.min(1)] * (k as i64 + 1));
                }
            }
            prop_assert!(i.contains(&binomial(&r, &v)).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn closures_contain_sampled_points(
        pts in prop::collection::vec((-4i64..=4, -4i64..=4), 2..4),
        c in prop::collection::vec(-3i64..=3, 4),
        ts in prop::collection::vec(-2.0f64..2.0, 5),
    ) {
        use num_complex::Complex64;
        let r = qring(&["x", "y"]);
        let mut u = PolyIdeal::unit(&r);
        for &(a, b) in &pts {
            u = u.union_closure(&point_ideal(&r, &[int(a), int(b)])).unwrap();
        }
        for &(a, b) in &pts {
            let x = [Complex64::new(a as f64, 0.0), Complex64::new(b as f64, 0.0)];
            for g in u.groebner_basis().unwrap() {
                prop_assert!(g.eval_c64(&x).norm() < 1e-6 * g.coeff_norm1().max(1.0));
            }
        }

        let src = qring(&["t"]);
        let f = vec![
            parse_poly(&src, &format!("({})*t^2 + ({})*t", c[0], c[1])).unwrap(),
            parse_poly(&src, &format!("({})*t^3 + ({})", c[2], c[3])).unwrap(),
        ];
        let img = PolyIdeal::zero(&src).image_closure(&r, &f).unwrap();
        for &t in &ts {
            let tc = [Complex64::new(t, 0.0)];
            let x = [f[0].eval_c64(&tc), f[1].eval_c64(&tc)];
            let scale = x.iter().map(|v| v.norm()).fold(1.0, f64::max);
            for g in img.groebner_basis().unwrap() {
                let tol = 1e-6 * g.coeff_norm1() * scale.powi(g.total_degree() as i32);
                prop_assert!(g.eval_c64(&x).norm() <= tol);
            }
        }
    }
}
