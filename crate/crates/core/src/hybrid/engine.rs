use std::sync::Arc;

use rayon::prelude::*;

use crate::discretise::cyclic_group_param;
use crate::exactnum::NfElem;
use crate::flowclosure::{flow_group_param, GroupParam};
use crate::matalg::Matrix;
use crate::polyideal::{MPoly, MonoOrder, PolyIdeal, Ring};
use crate::semigroup::switching_invariants;
use crate::{Error, Result};

use super::{Edge, HybridAutomaton, InvariantFamily, Mode};

#[derive(Clone, Copy, Debug)]
pub struct EngineOptions {
    pub max_rounds: usize,
    /// Apply real restriction to the final ideals.
    pub real: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            max_rounds: 64,
            real: true,
        }
    }
}

/// Move an ideal whose ring has the same variables as `ring` into `ring`.
fn rebase(ideal: PolyIdeal<NfElem>, ring: &Arc<Ring<NfElem>>) -> Result<PolyIdeal<NfElem>> {
    if Arc::ptr_eq(ideal.ring(), ring) {
        return Ok(ideal);
    }
    debug_assert_eq!(ideal.ring().vars, ring.vars);
    let gb: Vec<MPoly<NfElem>> = ideal.groebner_basis()?.iter().map(|g| g.reorder(ring)).collect();
    if ring.order == MonoOrder::Grevlex && ideal.ring().order == MonoOrder::Grevlex {
        Ok(PolyIdeal::from_basis(ring, gb))
    } else {
        Ok(PolyIdeal::new(ring, gb))
    }
}

/// `cl(G·X)` for a parametrised group `G`: the set of `y` with `M(p)·y ∈ X`
/// for some admissible `p`, which is `G^{-1}·X = G·X`.
pub fn group_action_closure(g: &GroupParam, x: &PolyIdeal<NfElem>) -> Result<PolyIdeal<NfElem>> {
    if g.is_trivial() || x.is_unit()? {
        return Ok(x.clone());
    }
    let pts = x.ring();
    let d = pts.nvars();
    if g.dim != d {
        return Err(Error::Shape(format!(
            "group acts on {} coordinates, ideal has {d}",
            g.dim
        )));
    }
    let np = g.nparams();
    let mut vars = g.ring.vars.clone();
    vars.extend(pts.vars.iter().cloned());
    let big = Ring::with_vars(&pts.ctx, vars, MonoOrder::Grevlex);
    let pmap: Vec<usize> = (0..np).collect();
    let m: Vec<MPoly<NfElem>> = g.entries.iter().map(|e| e.rename(&big, &pmap)).collect();
    let h: Vec<MPoly<NfElem>> = (0..d)
        .map(|i| {
            (0..d).fold(MPoly::zero(&big), |acc, j| {
                acc.add(&m[i * d + j].mul(&MPoly::var(&big, np + j)))
            })
        })
        .collect();
    let mut gens: Vec<MPoly<NfElem>> = g.relations.iter().map(|r| r.rename(&big, &pmap)).collect();
    gens.extend(x.groebner_basis()?.iter().map(|p| p.compose(&big, &h)));
    let out = PolyIdeal::new(&big, gens).eliminate(&pmap)?;
    rebase(out, pts)
}

/// `cl(B·X)`.
pub fn reset_image(b: &Matrix<NfElem>, x: &PolyIdeal<NfElem>) -> Result<PolyIdeal<NfElem>> {
    if x.is_unit()? {
        return Ok(x.clone());
    }
    let ring = x.ring();
    let d = ring.nvars();
    let lin = |m: &Matrix<NfElem>| -> Vec<MPoly<NfElem>> {
        (0..d)
            .map(|i| {
                MPoly::from_terms(
                    ring,
                    (0..d)
                        .map(|j| (crate::polyideal::Mono::var(d, j, 1), m[(i, j)].clone()))
                        .collect(),
                )
            })
            .collect()
    };
    match b.inverse() {
        Some(inv) => {
            let out = x.preimage(ring, &lin(&inv));
            Ok(PolyIdeal::new(ring, out.groebner_basis()?.to_vec()))
        }
        None => x.image_closure(ring, &lin(b)),
    }
}

struct Plan {
    flows: Vec<Option<GroupParam>>,
    loops: Vec<Vec<GroupParam>>,
    edges: Vec<Edge>,
}

fn plan(h: &HybridAutomaton, edges: Vec<Edge>) -> Result<Plan> {
    let flows: Vec<Option<GroupParam>> = h
        .locations
        .par_iter()
        .map(|l| {
            if l.flow.is_zero() {
                Ok(None)
            } else {
                flow_group_param(&l.flow).map(Some)
            }
        })
        .collect::<Result<_>>()?;
    // self-loops whose cyclic group is connected are applied as a group
    let accel: Vec<Option<GroupParam>> = edges
        .par_iter()
        .map(|e| {
            if e.from == e.to && e.reset.inverse().is_some() {
                cyclic_group_param(&e.reset)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;
    let mut loops: Vec<Vec<GroupParam>> = vec![Vec::new(); h.locations.len()];
    let mut rest = Vec::new();
    for (e, a) in edges.into_iter().zip(accel) {
        match a {
            Some(g) => {
                if !g.is_trivial() {
                    loops[e.from].push(g);
                }
            }
            None => rest.push(e),
        }
    }
    Ok(Plan {
        flows,
        loops,
        edges: rest,
    })
}

fn saturate_location(p: &Plan, q: usize, x: PolyIdeal<NfElem>) -> Result<PolyIdeal<NfElem>> {
    let mut x = match &p.flows[q] {
        Some(g) => group_action_closure(g, &x)?,
        None => x,
    };
    for g in &p.loops[q] {
        x = group_action_closure(g, &x)?;
    }
    Ok(x)
}

/// Kleene iteration of `X ↦ cl(Φ(X))` over the explicit edge set, for any
/// mode.
pub fn kleene_closure(h: &HybridAutomaton, opts: EngineOptions) -> Result<InvariantFamily> {
    if h.locations.is_empty() {
        return Err(Error::Semantic("locations: automaton has no locations".into()));
    }
    let p = plan(h, h.effective_edges())?;
    let ring = h.ring.clone();
    let mut x: Vec<PolyIdeal<NfElem>> = h
        .locations
        .par_iter()
        .enumerate()
        .map(|(q, l)| {
            let t = rebase(l.initial.clone(), &ring)?;
            saturate_location(&p, q, t)
        })
        .collect::<Result<_>>()?;
    let dims = |x: &[PolyIdeal<NfElem>]| x.iter().map(|i| i.dimension()).collect::<Result<Vec<i64>>>();
    let mut trace = vec![dims(&x)?];
    let mut rounds = 0;
    let mut converged = false;
    while rounds < opts.max_rounds {
        rounds += 1;
        let next: Vec<PolyIdeal<NfElem>> = (0..x.len())
            .into_par_iter()
            .map(|q| {
                let mut y = x[q].clone();
                for e in p.edges.iter().filter(|e| e.to == q) {
                    let img = reset_image(&e.reset, &x[e.from])?;
                    y = y.union_closure(&img)?;
                }
                saturate_location(&p, q, y)
            })
            .collect::<Result<_>>()?;
        let mut same = true;
        for (a, b) in x.iter().zip(&next) {
            if !a.same_ideal(b)? {
                same = false;
                break;
            }
        }
        x = next
            .into_iter()
            .map(|i| Ok(PolyIdeal::new(&ring, i.groebner_basis()?.to_vec())))
            .collect::<Result<_>>()?;
        trace.push(dims(&x)?);
        if same {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("no fixpoint after {rounds} rounds; the result is a sound under-approximation of the closure, not an invariant");
    }
    let fam = InvariantFamily {
        ring,
        names: h.locations.iter().map(|l| l.name.clone()).collect(),
        ideals: x,
        rounds,
        converged,
        real: false,
        dimension_trace: trace,
    };
    if opts.real {
        fam.real_restricted()
    } else {
        Ok(fam)
    }
}

/// Least closed fixpoint: the strongest algebraic invariant when the
/// iteration stabilises. Switching-mode models go through the semigroup
/// construction instead.
pub fn collecting_closure(h: &HybridAutomaton, opts: EngineOptions) -> Result<InvariantFamily> {
    if h.locations.is_empty() {
        return Err(Error::Semantic("locations: automaton has no locations".into()));
    }
    if h.mode == Mode::Switching {
        let fam = switching_invariants(h)?;
        return if opts.real { fam.real_restricted() } else { Ok(fam) };
    }
    kleene_closure(h, opts)
}
