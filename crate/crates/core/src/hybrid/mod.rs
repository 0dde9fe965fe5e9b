//! Linear hybrid automata: the model, the closed-fixpoint invariant engine
//! and the exact inductiveness checker.

mod check;
mod engine;
mod model;

use std::fmt::Write as _;
use std::sync::Arc;

pub use check::{check_inductive, InductiveReport, Violation, ViolationKind};
pub use engine::{collecting_closure, group_action_closure, kleene_closure, reset_image, EngineOptions};
pub use model::{
    ambient_over, entry_of, field_from_spec, field_spec, parse_automaton, parse_matrices, parse_matrix, Edge,
    HybridAutomaton, Location, MinPoly, Mode, RawEdge, RawElement, RawEntry, RawFamily, RawFamilyLocation, RawField,
    RawLocation, RawModel,
};

use crate::exactnum::{NfElem, NumberField};
use crate::polyideal::{PolyIdeal, Ring};
use crate::Result;

/// One ideal per location.
#[derive(Clone, Debug)]
pub struct InvariantFamily {
    pub ring: Arc<Ring<NfElem>>,
    pub names: Vec<String>,
    pub ideals: Vec<PolyIdeal<NfElem>>,
    pub rounds: usize,
    pub converged: bool,
    /// Whether the ideals cut out the real points only.
    pub real: bool,
    /// Variety dimension per location after each round.
    pub dimension_trace: Vec<Vec<i64>>,
}

impl InvariantFamily {
    pub fn field(&self) -> &Arc<NumberField> {
        &self.ring.ctx
    }

    pub fn ideal_of(&self, name: &str) -> Option<&PolyIdeal<NfElem>> {
        self.names.iter().position(|n| n == name).map(|i| &self.ideals[i])
    }

    /// The family with every ideal replaced by generators of its real points.
    pub fn real_restricted(&self) -> Result<InvariantFamily> {
        let ideals = self
            .ideals
            .iter()
            .map(|i| {
                let r = i.real_restrict()?;
                Ok(PolyIdeal::new(&self.ring, r.groebner_basis()?.to_vec()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(InvariantFamily {
            ideals,
            real: true,
            ..self.clone()
        })
    }

    /// Reduced Gröbner bases, one block per location.
    pub fn to_human(&self) -> Result<String> {
        let mut out = String::new();
        for (name, ideal) in self.names.iter().zip(&self.ideals) {
            let _ = writeln!(out, "location {name} (dimension {}):", ideal.dimension()?);
            for g in ideal.groebner_basis()? {
                let _ = writeln!(out, "  {g}");
            }
        }
        let status = if self.converged {
            "converged"
        } else {
            "NOT converged (partial result)"
        };
        let _ = writeln!(
            out,
            "{status} after {} round(s); {} output",
            self.rounds,
            if self.real { "real" } else { "complex" }
        );
        Ok(out)
    }

    pub fn to_raw(&self) -> Result<RawFamily> {
        let k = self.field();
        let field = if k.is_rationals() {
            None
        } else {
            let (minpoly, root) = field_spec(k);
            Some(RawField { minpoly, root })
        };
        let mut locations = Vec::new();
        for (name, ideal) in self.names.iter().zip(&self.ideals) {
            locations.push(RawFamilyLocation {
                name: name.clone(),
                ideal: ideal.groebner_basis()?.iter().map(|g| g.to_string()).collect(),
                dimension: Some(ideal.dimension()?),
            });
        }
        Ok(RawFamily {
            variables: self.ring.vars.clone(),
            field,
            locations,
            converged: Some(self.converged),
            rounds: Some(self.rounds),
            real: Some(self.real),
        })
    }

    /// Machine format: generator lists as JSON.
    pub fn to_machine(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_raw()?).expect("family serialises"))
    }

    /// Read a machine-format family against the automaton it describes.
    pub fn from_machine(h: &HybridAutomaton, text: &str) -> Result<InvariantFamily> {
        let raw = RawFamily::from_json(text)?;
        let ideals = raw.ideals_in(h)?;
        Ok(InvariantFamily {
            ring: h.ring.clone(),
            names: h.locations.iter().map(|l| l.name.clone()).collect(),
            ideals,
            rounds: raw.rounds.unwrap_or(0),
            converged: raw.converged.unwrap_or(true),
            real: raw.real.unwrap_or(false),
            dimension_trace: Vec::new(),
        })
    }
}
