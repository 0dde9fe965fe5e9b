use std::path::PathBuf;
use std::time::Instant;

use hyinv_core::hybrid::{
    check_inductive, collecting_closure, kleene_closure, parse_automaton, EngineOptions, HybridAutomaton,
    InvariantFamily, ViolationKind,
};
use hyinv_core::polyideal::{parse_poly, PolyIdeal};
use hyinv_core::semigroup::switching_invariants;

fn model(name: &str) -> HybridAutomaton {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name);
    parse_automaton(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn ideal(h: &HybridAutomaton, gens: &[&str]) -> PolyIdeal<hyinv_core::exactnum::NfElem> {
    PolyIdeal::new(&h.ring, gens.iter().map(|g| parse_poly(&h.ring, g).unwrap()).collect())
}

fn mutual_radical(a: &PolyIdeal<hyinv_core::exactnum::NfElem>, b: &PolyIdeal<hyinv_core::exactnum::NfElem>) -> bool {
    a.generators().iter().all(|g| b.radical_contains(g).unwrap())
        && b.generators().iter().all(|g| a.radical_contains(g).unwrap())
}

#[test]
fn bouncing_ball() {
    let h = model("bouncing_ball.model");
    assert_eq!(h.dim, 9);
    assert_eq!(h.locations.len(), 1);
    assert_eq!(h.edges.len(), 1);
    let t0 = Instant::now();
    let fam = collecting_closure(&h, EngineOptions::default()).unwrap();
    eprintln!(
        "ball: {:?} rounds={} trace={:?}",
        t0.elapsed(),
        fam.rounds,
        fam.dimension_trace
    );
    eprintln!("{}", fam.to_human().unwrap());
    assert!(fam.converged);
    let want = ideal(&h, &["w - 1", "vx - c", "x - t*c", "vy^2 + 2*g*(y - h)"]);
    assert!(mutual_radical(&fam.ideals[0], &want));
    assert_eq!(fam.ideals[0].dimension().unwrap(), 5);
}

#[test]
fn rc_circuit() {
    let h = model("rc.model");
    assert_eq!(h.locations.len(), 2);
    assert_eq!(h.edges.len(), 2);
    assert_eq!(h.locations[0].name, "OPEN");
    let t0 = Instant::now();
    let fam = collecting_closure(&h, EngineOptions::default()).unwrap();
    eprintln!(
        "rc: {:?} rounds={} trace={:?}",
        t0.elapsed(),
        fam.rounds,
        fam.dimension_trace
    );
    eprintln!("{}", fam.to_human().unwrap());
    assert!(fam.converged);
    let open = ideal(&h, &["Q - 3*V_C", "V_R - 2*I_R", "I", "V_R + V_C", "w - 1"]);
    let closed = ideal(&h, &["Q - 3*V_C", "V_R - 2*I_R", "I - I_R", "V_R - (5 - V_C)", "w - 1"]);
    assert!(mutual_radical(fam.ideal_of("OPEN").unwrap(), &open));
    assert!(mutual_radical(fam.ideal_of("CLOSED").unwrap(), &closed));
}

#[test]
fn switching_dispatch_agrees_with_explicit_edges() {
    let h = model("switching_rotations.model");
    let opts = EngineOptions {
        max_rounds: 16,
        real: false,
    };
    let a = collecting_closure(&h, opts).unwrap();
    let b = switching_invariants(&h).unwrap();
    let c = kleene_closure(&h, opts).unwrap();
    assert!(c.converged);
    for q in 0..2 {
        assert!(a.ideals[q].same_ideal(&b.ideals[q]).unwrap());
        assert!(a.ideals[q].same_ideal(&c.ideals[q]).unwrap());
    }
    let circle = ideal(&h, &["x^2 + y^2 - 1"]);
    let real = a.real_restricted().unwrap();
    assert!(real.ideals[0].same_ideal(&circle).unwrap());
}

fn family(h: &HybridAutomaton, gens: &[&[&str]]) -> InvariantFamily {
    InvariantFamily {
        ring: h.ring.clone(),
        names: h.locations.iter().map(|l| l.name.clone()).collect(),
        ideals: gens.iter().map(|g| ideal(h, g)).collect(),
        rounds: 0,
        converged: true,
        real: true,
        dimension_trace: Vec::new(),
    }
}

#[test]
fn computed_invariants_are_inductive() {
    for name in ["bouncing_ball.model", "rc.model", "switching_rotations.model"] {
        let h = model(name);
        let fam = collecting_closure(&h, EngineOptions::default()).unwrap();
        let r = check_inductive(&h, &fam).unwrap();
        assert!(r.passed(), "{name}: {r}");
        assert!(r.checked > 0);
    }
}

#[test]
fn planted_bad_candidate_fails_on_the_flow() {
    let h = model("bouncing_ball.model");
    let bad = family(&h, &[&["w - 1", "vx - c", "x - t*c", "vy"]]);
    let r = check_inductive(&h, &bad).unwrap();
    assert!(!r.passed());
    let v: Vec<_> = r.violations.iter().filter(|v| v.generator == "vy").collect();
    assert!(
        v.iter().any(|v| v.kind == ViolationKind::Flow && v.location == "fall"),
        "{r}"
    );
    assert!(v.iter().all(|v| v.kind != ViolationKind::Initial));
    let whole = family(&h, &[&[]]);
    assert!(check_inductive(&h, &whole).unwrap().passed());
}

#[test]
fn dimension_is_monotone_across_rounds() {
    for name in ["bouncing_ball.model", "rc.model"] {
        let fam = collecting_closure(&model(name), EngineOptions::default()).unwrap();
        for w in fam.dimension_trace.windows(2) {
            assert!(
                w[0].iter().zip(&w[1]).all(|(a, b)| a <= b),
                "{name}: {:?}",
                fam.dimension_trace
            );
        }
    }
}

#[test]
fn machine_output_round_trips() {
    for name in ["bouncing_ball.model", "rc.model", "switching_rotations.model"] {
        let h = model(name);
        for real in [false, true] {
            let fam = collecting_closure(&h, EngineOptions { max_rounds: 64, real }).unwrap();
            let text = fam.to_machine().unwrap();
            let back = InvariantFamily::from_machine(&h, &text).unwrap();
            for (a, b) in fam.ideals.iter().zip(&back.ideals) {
                assert!(a.same_ideal(b).unwrap());
            }
            assert_eq!(back.to_machine().unwrap(), text);
        }
    }
}

#[test]
fn discretised_automaton_has_the_same_invariants() {
    for name in ["bouncing_ball.model", "rc.model", "switching_rotations.model"] {
        let h = model(name);
        let (d, certs) = hyinv_core::discretise::discretise_automaton(&h).unwrap();
        assert!(d.locations.iter().all(|l| l.flow.is_zero()));
        assert_eq!(certs.iter().filter(|c| c.is_some()).count(), h.locations.len());
        let a = collecting_closure(&h, EngineOptions::default()).unwrap();
        let b = collecting_closure(&d, EngineOptions::default()).unwrap();
        assert!(b.converged);
        for (x, y) in a.ideals.iter().zip(&b.ideals) {
            assert!(x.same_ideal(&y.with_ring(&x.ring().clone())).unwrap(), "{name}");
        }
    }
}
