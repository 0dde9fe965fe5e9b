use std::fmt;

use rayon::prelude::*;

use crate::exactnum::NfElem;
use crate::flowclosure::flow_group_param;
use crate::polyideal::{MPoly, Mono, MonoOrder, PolyIdeal, Ring};
use crate::{Error, Result};

use super::{HybridAutomaton, InvariantFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// `T_q ⊄ V_q`.
    Initial,
    /// `B·V_p ⊄ V_q` for the edge with this index in the effective edge list.
    Edge(usize),
    /// `e^{A_q t}·V_q ⊄ V_q`.
    Flow,
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub location: String,
    pub generator: String,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, Default)]
pub struct InductiveReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl InductiveReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for InductiveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return writeln!(f, "PASS: {} obligations hold", self.checked);
        }
        writeln!(
            f,
            "FAIL: {} of {} obligations violated",
            self.violations.len(),
            self.checked
        )?;
        for v in &self.violations {
            let kind = match v.kind {
                ViolationKind::Initial => "initial".to_string(),
                ViolationKind::Edge(i) => format!("edge #{i}"),
                ViolationKind::Flow => "flow".to_string(),
            };
            writeln!(f, "  {} [{kind}]: {}", v.location, v.generator)?;
        }
        Ok(())
    }
}

fn linear_map(ring: &std::sync::Arc<Ring<NfElem>>, m: &crate::matalg::Matrix<NfElem>) -> Vec<MPoly<NfElem>> {
    let d = ring.nvars();
    (0..d)
        .map(|i| MPoly::from_terms(ring, (0..d).map(|j| (Mono::var(d, j, 1), m[(i, j)].clone())).collect()))
        .collect()
}

/// Exact pre-fixpoint check of a candidate family: initial sets, every edge
/// and every flow, generator by generator.
pub fn check_inductive(h: &HybridAutomaton, cand: &InvariantFamily) -> Result<InductiveReport> {
    if cand.ideals.len() != h.locations.len() {
        return Err(Error::Shape(format!(
            "candidate has {} ideals for {} locations",
            cand.ideals.len(),
            h.locations.len()
        )));
    }
    if cand.ring.vars != h.ring.vars {
        return Err(Error::Semantic("candidate variables differ from the model's".into()));
    }
    let ring = h.ring.clone();
    let v: Vec<PolyIdeal<NfElem>> = cand
        .ideals
        .iter()
        .map(|i| PolyIdeal::new(&ring, i.generators().iter().map(|g| g.reorder(&ring)).collect()))
        .collect();
    let gens: Vec<Vec<MPoly<NfElem>>> = v.iter().map(|i| i.generators().to_vec()).collect();
    let edges = h.effective_edges();

    let mut jobs: Vec<(usize, ViolationKind)> = Vec::new();
    for q in 0..h.locations.len() {
        jobs.push((q, ViolationKind::Initial));
        if !h.locations[q].flow.is_zero() {
            jobs.push((q, ViolationKind::Flow));
        }
    }
    for (i, e) in edges.iter().enumerate() {
        jobs.push((e.to, ViolationKind::Edge(i)));
    }

    let results: Vec<Vec<(usize, bool)>> = jobs
        .par_iter()
        .map(|&(q, kind)| -> Result<Vec<(usize, bool)>> {
            match kind {
                ViolationKind::Initial => {
                    let t = PolyIdeal::new(
                        &ring,
                        h.locations[q]
                            .initial
                            .generators()
                            .iter()
                            .map(|g| g.reorder(&ring))
                            .collect(),
                    );
                    gens[q]
                        .iter()
                        .enumerate()
                        .map(|(j, g)| Ok((j, t.radical_contains(g)?)))
                        .collect()
                }
                ViolationKind::Edge(i) => {
                    let e = &edges[i];
                    let img = linear_map(&ring, &e.reset);
                    gens[q]
                        .iter()
                        .enumerate()
                        .map(|(j, g)| Ok((j, v[e.from].radical_contains(&g.compose(&ring, &img))?)))
                        .collect()
                }
                ViolationKind::Flow => {
                    let gp = flow_group_param(&h.locations[q].flow)?;
                    let np = gp.nparams();
                    let d = ring.nvars();
                    let mut vars = gp.ring.vars.clone();
                    vars.extend(ring.vars.iter().cloned());
                    let big = Ring::with_vars(&ring.ctx, vars, MonoOrder::Grevlex);
                    let pmap: Vec<usize> = (0..np).collect();
                    let ymap: Vec<usize> = (np..np + d).collect();
                    let m: Vec<MPoly<NfElem>> = gp.entries.iter().map(|e| e.rename(&big, &pmap)).collect();
                    let act: Vec<MPoly<NfElem>> = (0..d)
                        .map(|i| {
                            (0..d).fold(MPoly::zero(&big), |acc, j| {
                                acc.add(&m[i * d + j].mul(&MPoly::var(&big, np + j)))
                            })
                        })
                        .collect();
                    let mut base: Vec<MPoly<NfElem>> = gp.relations.iter().map(|r| r.rename(&big, &pmap)).collect();
                    base.extend(gens[q].iter().map(|g| g.rename(&big, &ymap)));
                    let j_ideal = PolyIdeal::new(&big, base);
                    gens[q]
                        .iter()
                        .enumerate()
                        .map(|(j, g)| Ok((j, j_ideal.radical_contains(&g.compose(&big, &act))?)))
                        .collect()
                }
            }
        })
        .collect::<Result<_>>()?;

    let mut report = InductiveReport::default();
    for (&(q, kind), res) in jobs.iter().zip(results) {
        for (j, ok) in res {
            report.checked += 1;
            if !ok {
                report.violations.push(Violation {
                    location: h.locations[q].name.clone(),
                    generator: gens[q][j].to_string(),
                    kind,
                });
            }
        }
    }
    Ok(report)
}
