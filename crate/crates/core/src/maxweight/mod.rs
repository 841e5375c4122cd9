//! Maximum-weight popular matchings in bipartite instances.
//!
//! The popular subgraph splits the vertices into components. For each
//! choice of witness parity on the components with at least four vertices,
//! an LP over an integral extended formulation is maximized and its optimum
//! decomposed into popular matchings by a table sweep. Size-2 components get
//! a continuous parity variable instead of a bit.

pub mod polytope;
pub mod sweep;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::instance::{Matching, PreferenceInstance};
use crate::rational::Rational;
use crate::subgraph::PopularSubgraph;
use crate::witness::{verify_bipartite_witness, BipartiteWitness};

pub use polytope::{build_polytope, solve_for_r, FractionalPoint, Parity, ParityVector, PolytopeSpec};
pub use sweep::{decompose_table, Cell, Color, Decomposition, Member, SweepTable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RStatus {
    Infeasible,
    Optimal { objective: Rational, members: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ROutcome {
    pub r: ParityVector,
    pub status: RStatus,
    pub best: Option<Member>,
    pub decomposition: Option<Decomposition>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxWeightResult {
    pub matching: Matching,
    pub witness: BipartiteWitness,
    pub weight: Rational,
    pub r: ParityVector,
    pub per_r: Vec<ROutcome>,
}

impl MaxWeightResult {
    pub fn report_json(&self, g: &PreferenceInstance) -> Value {
        json!({
            "matching": self.matching.to_json(g),
            "weight": self.weight.to_fraction_string(),
            "witness": self.witness.to_json(g),
            "r": self.r.to_string_bits(),
            "per_r": self.per_r.iter().map(|o| {
                let (status, objective) = match &o.status {
                    RStatus::Infeasible => ("infeasible", Value::Null),
                    RStatus::Optimal { objective, .. } => ("optimal", json!(objective.to_fraction_string())),
                };
                json!({
                    "r": o.r.to_string_bits(),
                    "status": status,
                    "objective": objective,
                    "decomposition": o.decomposition.as_ref().map(|d| d.to_json(g)),
                })
            }).collect::<Vec<_>>(),
        })
    }
}

/// Solves one parity vector and decomposes the optimum. Every member of the
/// decomposition must attain the optimum; a shortfall is reported as an error.
pub fn solve_and_decompose(g: &PreferenceInstance, f: &PopularSubgraph, r: &ParityVector, refined: bool) -> Result<ROutcome> {
    let Some((spec, pt)) = solve_for_r(g, f, r, refined)? else {
        return Ok(ROutcome { r: r.clone(), status: RStatus::Infeasible, best: None, decomposition: None });
    };
    let (_, dec) = decompose_table(g, f, &pt, &spec.unmatched)?;
    for m in &dec.members {
        let w = m.matching.weight(g);
        if w != pt.objective {
            return Err(Error::DecompositionMismatch {
                t: m.t.to_fraction_string(),
                weight: w.to_fraction_string(),
                optimum: pt.objective.to_fraction_string(),
            });
        }
    }
    let best = dec.members.first().cloned();
    Ok(ROutcome {
        r: r.clone(),
        status: RStatus::Optimal { objective: pt.objective.clone(), members: dec.members.len() },
        best,
        decomposition: Some(dec),
    })
}

/// Exact max-weight popular matching given the popular subgraph. Ties are
/// broken by the first parity vector (in index order) attaining the maximum.
pub fn max_weight_popular(g: &PreferenceInstance, f: &PopularSubgraph, refined: bool) -> Result<MaxWeightResult> {
    g.require_bipartite()?;
    let bits = if refined { f.k } else { f.ell };
    if bits >= usize::BITS as usize - 1 {
        return Err(Error::GuardExceeded(format!("2^{bits} parity vectors")));
    }
    let outcomes: Vec<Result<ROutcome>> = (0..1usize << bits)
        .into_par_iter()
        .map(|i| solve_and_decompose(g, f, &ParityVector::from_index(i, bits), refined))
        .collect();
    let per_r: Vec<ROutcome> = outcomes.into_iter().collect::<Result<_>>()?;
    let mut best: Option<(Rational, usize)> = None;
    for (i, o) in per_r.iter().enumerate() {
        if let RStatus::Optimal { objective, .. } = &o.status {
            if best.as_ref().is_none_or(|(w, _)| objective > w) {
                best = Some((objective.clone(), i));
            }
        }
    }
    let (weight, i) = best.ok_or_else(|| Error::Solver("no parity vector is feasible".into()))?;
    let member = per_r[i].best.clone().expect("optimal outcome has a member");
    let witness = member.witness();
    let report = verify_bipartite_witness(g, &member.matching, &witness)?;
    if !report.ok() {
        return Err(Error::InvalidWitness(report.violations[0].to_string()));
    }
    Ok(MaxWeightResult { matching: member.matching, witness, weight, r: per_r[i].r.clone(), per_r })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approx2Result {
    pub matching: Matching,
    pub weight: Rational,
    pub stable: ROutcome,
    pub dominant: ROutcome,
    /// True when the stable side was chosen.
    pub from_stable: bool,
}

/// Better of a max-weight stable and a max-weight dominant matching.
/// Requires nonnegative weights; with them the result has at least half the optimum weight.
pub fn approx2(g: &PreferenceInstance, f: &PopularSubgraph) -> Result<Approx2Result> {
    g.require_bipartite()?;
    for &(u, v) in g.edges() {
        let w = g.weight(u, v);
        if w.is_negative() {
            return Err(Error::NegativeWeight(format!("({}, {}) has weight {w}", g.name(u), g.name(v))));
        }
    }
    let stable = solve_and_decompose(g, f, &ParityVector::all(0, f.ell), false)?;
    let dominant = solve_and_decompose(g, f, &ParityVector::all(1, f.ell), false)?;
    let pick = |o: &ROutcome| o.best.as_ref().map(|m| (m.matching.weight(g), m.matching.clone()));
    let (s, d) = (pick(&stable), pick(&dominant));
    let (from_stable, (weight, matching)) = match (s, d) {
        (Some(s), Some(d)) => {
            if s.0 >= d.0 {
                (true, s)
            } else {
                (false, d)
            }
        }
        (Some(s), None) => (true, s),
        (None, Some(d)) => (false, d),
        (None, None) => return Err(Error::Solver("stable and dominant formulations are both empty".into())),
    };
    Ok(Approx2Result { matching, weight, stable, dominant, from_stable })
}
