//! Acceptance criteria, one verdict line each.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyinv_core::discretise::{synth_multiplicative, time_discretisation_check};
use hyinv_core::exactnum::{int, splitting_field, Field, NfElem, NumberField, Rational, UPoly};
use hyinv_core::flowclosure::one_param_closure;
use hyinv_core::hybrid::{
    check_inductive, collecting_closure, parse_automaton, EngineOptions, HybridAutomaton, InvariantFamily,
    ViolationKind,
};
use hyinv_core::intlat::{relation_lattice_additive, relation_lattice_multiplicative};
use hyinv_core::matalg::Matrix;
use hyinv_core::oracle::{numeric_falsify, random_trajectories, ScheduleOptions};
use hyinv_core::polyideal::{parse_poly, PolyIdeal, Ring};
use hyinv_core::semigroup::semigroup_closure;

type Ideal = PolyIdeal<NfElem>;

const CORPUS: [&str; 3] = ["bouncing_ball.model", "rc.model", "switching_rotations.model"];

fn model(name: &str) -> HybridAutomaton {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name);
    parse_automaton(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn ideal_in(ring: &Arc<Ring<NfElem>>, gens: &[&str]) -> Ideal {
    PolyIdeal::new(ring, gens.iter().map(|g| parse_poly(ring, g).unwrap()).collect())
}

fn mutual_radical(a: &Ideal, b: &Ideal) -> bool {
    a.generators().iter().all(|g| b.radical_contains(g).unwrap())
        && b.generators().iter().all(|g| a.radical_contains(g).unwrap())
}

fn mat(k: &Arc<NumberField>, rows: &[&[i64]]) -> Matrix<NfElem> {
    let r: Vec<Vec<Rational>> = rows.iter().map(|x| x.iter().map(|&v| int(v)).collect()).collect();
    Matrix::from_rationals(k, &r).unwrap()
}

fn gaussian() -> Arc<NumberField> {
    splitting_field(&UPoly::from_rationals(vec![int(1), int(0), int(1)]))
        .unwrap()
        .field
}

type Verdict = (bool, String);

fn c1_bouncing_ball() -> Verdict {
    let h = model("bouncing_ball.model");
    let t0 = Instant::now();
    let fam = collecting_closure(&h, EngineOptions::default()).unwrap();
    let el = t0.elapsed();
    let want = ideal_in(&h.ring, &["w - 1", "vx - c", "x - t*c", "vy^2 + 2*g*(y - h)"]);
    let eq = mutual_radical(&fam.ideals[0], &want);
    let dim = fam.ideals[0].dimension().unwrap();
    let ok = h.dim == 9 && fam.converged && fam.rounds <= 10 && el < Duration::from_secs(120) && eq && dim == 5;
    (
        ok,
        format!("rounds {}, {el:.2?}, ideal equal: {eq}, dimension {dim}", fam.rounds),
    )
}

fn c2_rc_circuit() -> Verdict {
    let h = model("rc.model");
    let t0 = Instant::now();
    let fam = collecting_closure(&h, EngineOptions::default()).unwrap();
    let el = t0.elapsed();
    let open = ideal_in(&h.ring, &["Q - 3*V_C", "V_R - 2*I_R", "I", "V_R + V_C", "w - 1"]);
    let closed = ideal_in(
        &h.ring,
        &["Q - 3*V_C", "V_R - 2*I_R", "I - I_R", "V_R - (5 - V_C)", "w - 1"],
    );
    let eo = mutual_radical(fam.ideal_of("OPEN").unwrap(), &open);
    let ec = mutual_radical(fam.ideal_of("CLOSED").unwrap(), &closed);
    let ok = fam.converged && eo && ec && el < Duration::from_secs(60);
    (ok, format!("OPEN equal: {eo}, CLOSED equal: {ec}, {el:.2?}"))
}

fn c3_one_parameter() -> Verdict {
    let k = gaussian();
    let cases = [
        (mat(&k, &[&[1, 0], &[0, -1]]), vec!["x_1_2", "x_2_1", "x_1_1*x_2_2 - 1"]),
        (
            mat(&k, &[&[0, 1], &[-1, 0]]),
            vec!["x_1_1 - x_2_2", "x_1_2 + x_2_1", "x_1_1^2 + x_1_2^2 - 1"],
        ),
        (mat(&k, &[&[0, 1], &[0, 0]]), vec!["x_1_1 - 1", "x_2_1", "x_2_2 - 1"]),
    ];
    let mut ok = true;
    let mut worst = Duration::ZERO;
    for (a, gens) in &cases {
        let t0 = Instant::now();
        let c = one_param_closure(a).unwrap().ideal;
        let el = t0.elapsed();
        worst = worst.max(el);
        let want = ideal_in(c.ring(), gens);
        ok &= c.same_ideal(&want).unwrap() && el < Duration::from_secs(10);
    }
    (ok, format!("3 closures exact, slowest {worst:.2?}"))
}

fn c4_discretisation() -> Verdict {
    let k = gaussian();
    let q = NumberField::rationals();
    let ball = model("bouncing_ball.model").locations[0].flow.clone();
    let suite = [
        ("diag(1,-1)", mat(&q, &[&[1, 0], &[0, -1]])),
        ("diag(1,2)", mat(&q, &[&[1, 0], &[0, 2]])),
        ("rotation", mat(&k, &[&[0, 1], &[-1, 0]])),
        ("nilpotent 2x2", mat(&q, &[&[0, 1], &[0, 0]])),
        ("nilpotent 3x3", mat(&q, &[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]])),
        ("bouncing-ball flow", ball),
    ];
    let mut failed = Vec::new();
    for (name, a) in &suite {
        if !time_discretisation_check(a).unwrap() {
            failed.push(*name);
        }
    }
    (
        failed.is_empty(),
        format!("{} matrices, failures: {failed:?}", suite.len()),
    )
}

fn c5_synth() -> Verdict {
    let sf = splitting_field(&UPoly::from_rationals(vec![int(-2), int(0), int(-1), int(0), int(1)])).unwrap();
    let k = sf.field.clone();
    let sqrt2 = sf
        .roots
        .iter()
        .find(|r| (r.approx().re - 2f64.sqrt()).abs() < 1e-9 && r.approx().im.abs() < 1e-9)
        .unwrap()
        .clone();
    let i = sf
        .roots
        .iter()
        .find(|r| (r.approx().im - 1.0).abs() < 1e-9)
        .unwrap()
        .clone();
    let e = |v: i64| NfElem::from_i64(&k, v);
    let pool = vec![
        e(0),
        e(1),
        e(-1),
        e(2),
        e(-2),
        e(3),
        e(-3),
        sqrt2.clone(),
        e(1).add(&sqrt2),
        i.clone(),
        i.neg(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut pass = 0;
    for _ in 0..25 {
        let n = rng.gen_range(1..=5);
        let a: Vec<NfElem> = (0..n).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
        let lam = synth_multiplicative(&a);
        if lam.iter().all(|x| *x > int(0)) && relation_lattice_additive(&a) == relation_lattice_multiplicative(&lam) {
            pass += 1;
        }
    }
    (pass == 25, format!("{pass}/25 tuples with equal Hermite bases"))
}

fn c6_semigroup() -> Verdict {
    let k = gaussian();
    let gens = [mat(&k, &[&[1, 0], &[0, -1]]), mat(&k, &[&[0, 1], &[-1, 0]])];
    let s = semigroup_closure(&gens).unwrap();
    let want = ideal_in(s.ideal.ring(), &["x_1_1*x_2_2 - x_1_2*x_2_1 - 1"]);
    let eq = s.ideal.same_ideal(&want).unwrap();
    let dim = s.ideal.dimension().unwrap();
    let cert = gens.iter().all(|a| {
        let g = one_param_closure(a).unwrap().ideal;
        s.ideal.product_closure(&g).unwrap().same_ideal(&s.ideal).unwrap()
    });
    let ok = eq && dim == 3 && s.iterations_used <= 4 && cert;
    (
        ok,
        format!(
            "det - 1: {eq}, dimension {dim}, iterations {}, certificate {cert}",
            s.iterations_used
        ),
    )
}

fn c7_inductive() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for name in CORPUS {
        let h = model(name);
        let fam = collecting_closure(&h, EngineOptions::default()).unwrap();
        let r = check_inductive(&h, &fam).unwrap();
        ok &= fam.converged && r.passed();
        notes.push(format!("{name}: {}", if r.passed() { "pass" } else { "FAIL" }));
    }
    let h = model("bouncing_ball.model");
    let bad = InvariantFamily {
        ring: h.ring.clone(),
        names: vec!["fall".into()],
        ideals: vec![ideal_in(&h.ring, &["vy"])],
        rounds: 0,
        converged: true,
        real: true,
        dimension_trace: Vec::new(),
    };
    let r = check_inductive(&h, &bad).unwrap();
    let localized = r
        .violations
        .iter()
        .any(|v| v.kind == ViolationKind::Flow && v.location == "fall" && v.generator == "vy");
    ok &= !r.passed() && localized;
    notes.push(format!("planted vy = 0 rejected at flow: {localized}"));
    (ok, notes.join("; "))
}

fn c8_numeric() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for (i, name) in CORPUS.iter().enumerate() {
        let h = model(name);
        let fam = collecting_closure(&h, EngineOptions::default()).unwrap();
        let trs = random_trajectories(&h, 100, 1000 + i as u64, ScheduleOptions::default()).unwrap();
        let r = numeric_falsify(&fam, &trs, 1e-6).unwrap();
        ok &= trs.len() == 100 && r.passed();
        notes.push(format!("{name}: max residual {:.1e}", r.max_residual()));
    }
    (ok, notes.join("; "))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("bouncing ball invariant", c1_bouncing_ball),
        ("RC circuit invariants", c2_rc_circuit),
        ("one-parameter closures", c3_one_parameter),
        ("discretisation certificate", c4_discretisation),
        ("multiplicative relation synthesis", c5_synth),
        ("semigroup closure", c6_semigroup),
        ("inductiveness", c7_inductive),
        ("numeric cross-validation", c8_numeric),
    ];
    let mut all = true;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f();
        all &= ok;
        println!(
            "criterion {}: {} | {name} | {detail}",
            n + 1,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    assert!(all, "some acceptance criteria failed");
}
