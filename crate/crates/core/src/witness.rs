//! Dual certificates of popularity.
//!
//! For a matching `M`, every edge gets `cost_M(u, v)` (the sum of the two
//! endpoint votes) and every self-loop gets `0` if `u` is unmatched and `-1`
//! otherwise. A witness is a dual solution covering all of these costs whose
//! objective is zero. In the bipartite case the dual has one value per
//! vertex; on general graphs odd vertex sets carry extra nonnegative values.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::instance::{Matching, PreferenceInstance, Vertex};
use crate::lp::{self, LpStatus, RationalLinearProgram, Sense};
use crate::popularity::CostM;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteWitness {
    pub alpha: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoommatesWitness {
    pub alpha: Vec<Rational>,
    /// Odd sets of size at least three, each sorted, with nonnegative values.
    pub z: Vec<(Vec<Vertex>, Rational)>,
}

/// `alpha` in `{-1, 0, 1}`; the partition is `R = {alpha = 1}`, `L` the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StronglyDominantWitness {
    pub alpha: Vec<i8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Edge { u: String, v: String, lhs: Rational, cost: i8 },
    Loop { u: String, alpha: Rational, cost: i8 },
    OddSet { set: Vec<String>, reason: String },
    Objective(Rational),
    Value { u: String, reason: String },
    Partition(String),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Edge { u, v, lhs, cost } => write!(f, "edge ({u}, {v}): {lhs} < cost {cost}"),
            Violation::Loop { u, alpha, cost } => write!(f, "loop ({u}, {u}): {alpha} < cost {cost}"),
            Violation::OddSet { set, reason } => write!(f, "odd set {{{}}}: {reason}", set.join(", ")),
            Violation::Objective(v) => write!(f, "objective is {v}, not 0"),
            Violation::Value { u, reason } => write!(f, "vertex {u}: {reason}"),
            Violation::Partition(s) => write!(f, "partition: {s}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "valid": self.ok(),
            "violations": self.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })
    }
}

impl From<BipartiteWitness> for RoommatesWitness {
    fn from(w: BipartiteWitness) -> Self {
        Self { alpha: w.alpha, z: Vec::new() }
    }
}

impl From<&StronglyDominantWitness> for RoommatesWitness {
    fn from(w: &StronglyDominantWitness) -> Self {
        Self { alpha: w.alpha.iter().map(|&a| Rational::from(a as i64)).collect(), z: Vec::new() }
    }
}

impl BipartiteWitness {
    pub fn zero(n: usize) -> Self {
        Self { alpha: vec![Rational::zero(); n] }
    }

    pub fn to_json(&self, g: &PreferenceInstance) -> Value {
        RoommatesWitness::from(self.clone()).to_json(g)
    }
}

impl StronglyDominantWitness {
    /// `+1` on `R`, `-1` on matched vertices of `L`, `0` on unmatched ones.
    pub fn from_partition(m: &Matching, r: &BTreeSet<Vertex>) -> Self {
        Self {
            alpha: (0..m.n())
                .map(|u| {
                    if r.contains(&u) {
                        1
                    } else if m.is_matched(u) {
                        -1
                    } else {
                        0
                    }
                })
                .collect(),
        }
    }

    pub fn right(&self) -> BTreeSet<Vertex> {
        (0..self.alpha.len()).filter(|&u| self.alpha[u] == 1).collect()
    }

    pub fn left(&self) -> BTreeSet<Vertex> {
        (0..self.alpha.len()).filter(|&u| self.alpha[u] != 1).collect()
    }

    pub fn to_json(&self, g: &PreferenceInstance) -> Value {
        RoommatesWitness::from(self).to_json(g)
    }
}

impl RoommatesWitness {
    pub fn zero(n: usize) -> Self {
        Self { alpha: vec![Rational::zero(); n], z: Vec::new() }
    }

    pub fn objective(&self) -> Rational {
        let a: Rational = self.alpha.iter().sum();
        let z: Rational = self.z.iter().map(|(s, v)| Rational::from(s.len() / 2) * v).sum();
        a + z
    }

    pub fn to_json(&self, g: &PreferenceInstance) -> Value {
        let alpha: BTreeMap<&str, String> =
            (0..g.n()).map(|u| (g.name(u), self.alpha[u].to_fraction_string())).collect();
        let z: Vec<Value> = self
            .z
            .iter()
            .map(|(s, v)| json!({"set": s.iter().map(|&u| g.name(u)).collect::<Vec<_>>(), "value": v.to_fraction_string()}))
            .collect();
        json!({"alpha": alpha, "z": z})
    }

    /// Parses `{"alpha": {v: "p/q"}, "z": [{"set": [..], "value": "p/q"}]}`.
    /// Vertices absent from `alpha` get 0.
    pub fn from_json(g: &PreferenceInstance, value: &Value) -> Result<Self> {
        let bad = |s: &str| Error::InvalidWitness(s.to_string());
        let obj = value.as_object().ok_or_else(|| bad("witness must be an object"))?;
        let mut alpha = vec![Rational::zero(); g.n()];
        if let Some(a) = obj.get("alpha") {
            let a = a.as_object().ok_or_else(|| bad("`alpha` must be an object"))?;
            for (name, v) in a {
                let u = g.vertex_or_err(name)?;
                alpha[u] = parse_value(v)?;
            }
        }
        let mut z = Vec::new();
        if let Some(list) = obj.get("z") {
            let list = list.as_array().ok_or_else(|| bad("`z` must be an array"))?;
            for entry in list {
                let set = entry.get("set").and_then(Value::as_array).ok_or_else(|| bad("z entry needs `set`"))?;
                let mut ids = Vec::with_capacity(set.len());
                for s in set {
                    let name = s.as_str().ok_or_else(|| bad("set members must be names"))?;
                    ids.push(g.vertex_or_err(name)?);
                }
                ids.sort_unstable();
                let value = parse_value(entry.get("value").ok_or_else(|| bad("z entry needs `value`"))?)?;
                z.push((ids, value));
            }
        }
        Ok(Self { alpha, z })
    }
}

fn parse_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => s.parse().map_err(|e: crate::rational::ParseRationalError| Error::InvalidWitness(e.to_string())),
        Value::Number(n) => n
            .as_i64()
            .map(Rational::from_integer)
            .ok_or_else(|| Error::InvalidWitness(format!("non-integer number {n}; use \"p/q\""))),
        _ => Err(Error::InvalidWitness("values must be \"p/q\" strings".into())),
    }
}

fn check_len(g: &PreferenceInstance, m: &Matching, len: usize) -> Result<()> {
    if m.n() != g.n() {
        return Err(Error::InvalidMatching("matching belongs to another instance".into()));
    }
    if len != g.n() {
        return Err(Error::InvalidWitness(format!("{len} values for {} vertices", g.n())));
    }
    Ok(())
}

/// Checks every edge and loop constraint and the zero objective.
pub fn verify_roommates_witness(g: &PreferenceInstance, m: &Matching, w: &RoommatesWitness) -> Result<VerifyReport> {
    check_len(g, m, w.alpha.len())?;
    let mut report = VerifyReport::default();
    let mut sets: Vec<&(Vec<Vertex>, Rational)> = Vec::new();
    for entry in &w.z {
        let (s, v) = entry;
        let dedup: BTreeSet<_> = s.iter().collect();
        if dedup.len() != s.len() || s.len() < 3 || s.len() % 2 == 0 {
            return Err(Error::InvalidWitness(format!(
                "z set {{{}}} is not an odd set of size at least 3",
                s.iter().map(|&u| g.name(u)).collect::<Vec<_>>().join(", ")
            )));
        }
        if v.is_negative() {
            report.violations.push(Violation::OddSet {
                set: s.iter().map(|&u| g.name(u).to_string()).collect(),
                reason: format!("negative value {v}"),
            });
        }
        sets.push(entry);
    }
    let cost = CostM::new(g, m);
    for (id, &(u, v)) in g.edges().iter().enumerate() {
        let mut lhs = &w.alpha[u] + &w.alpha[v];
        for (s, val) in &sets {
            if s.binary_search(&u).is_ok() && s.binary_search(&v).is_ok() {
                lhs += val;
            }
        }
        let c = cost.edge_cost[id];
        if lhs < Rational::from(c as i64) {
            report.violations.push(Violation::Edge { u: g.name(u).into(), v: g.name(v).into(), lhs, cost: c });
        }
    }
    for u in 0..g.n() {
        let c = cost.loop_cost[u];
        if w.alpha[u] < Rational::from(c as i64) {
            report.violations.push(Violation::Loop { u: g.name(u).into(), alpha: w.alpha[u].clone(), cost: c });
        }
    }
    let obj = w.objective();
    if !obj.is_zero() {
        report.violations.push(Violation::Objective(obj));
    }
    Ok(report)
}

pub fn verify_bipartite_witness(g: &PreferenceInstance, m: &Matching, w: &BipartiteWitness) -> Result<VerifyReport> {
    g.require_bipartite()?;
    verify_roommates_witness(g, m, &RoommatesWitness::from(w.clone()))
}

/// Result of checking a strongly dominant witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominantCheck {
    /// Violations of the dual characterisation (`±1` values, zero sum, LP constraints).
    pub dual: VerifyReport,
    /// Violations of the partition definition on `R = {alpha = 1}`.
    pub partition: VerifyReport,
}

impl DominantCheck {
    pub fn ok(&self) -> bool {
        self.dual.ok() && self.partition.ok()
    }
}

pub fn verify_strongly_dominant(g: &PreferenceInstance, m: &Matching, w: &StronglyDominantWitness) -> Result<DominantCheck> {
    check_len(g, m, w.alpha.len())?;
    let mut dual = verify_roommates_witness(g, m, &RoommatesWitness::from(w))?;
    for u in 0..g.n() {
        let a = w.alpha[u];
        let ok = if m.is_matched(u) { a == 1 || a == -1 } else { a == 0 };
        if !ok {
            dual.violations.push(Violation::Value {
                u: g.name(u).into(),
                reason: format!("value {a} but {}", if m.is_matched(u) { "matched" } else { "unmatched" }),
            });
        }
    }
    let r = w.right();
    Ok(DominantCheck { dual, partition: check_partition(g, m, &r) })
}

/// Direct check of the partition definition with `L = V \ R`.
pub fn check_partition(g: &PreferenceInstance, m: &Matching, r: &BTreeSet<Vertex>) -> VerifyReport {
    let mut rep = VerifyReport::default();
    let in_r = |u: Vertex| r.contains(&u);
    for (u, v) in m.pairs() {
        if in_r(u) == in_r(v) {
            rep.violations.push(Violation::Partition(format!("({}, {}) does not cross L and R", g.name(u), g.name(v))));
        }
    }
    for &u in r {
        if !m.is_matched(u) {
            rep.violations.push(Violation::Partition(format!("{} in R is unmatched", g.name(u))));
        }
    }
    for &(u, v) in g.edges() {
        if g.is_blocking_edge(m, u, v) && !(in_r(u) && in_r(v)) {
            rep.violations.push(Violation::Partition(format!("blocking edge ({}, {}) is not inside R", g.name(u), g.name(v))));
        }
        if !in_r(u) && !in_r(v) && !g.is_negative_edge(m, u, v) {
            rep.violations.push(Violation::Partition(format!("edge ({}, {}) inside L is not negative", g.name(u), g.name(v))));
        }
    }
    rep
}

/// Outcome of the exact LP popularity test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpPopularity {
    pub popular: bool,
    /// `max_N cost_M(Ñ)`.
    pub optimum: Rational,
    pub witness: Option<BipartiteWitness>,
    /// An optimal `N`; beats `M` when `popular` is false.
    pub best: Matching,
}

/// The max-cost perfect matching LP over the graph with self-loops.
pub fn popularity_lp(g: &PreferenceInstance, m: &Matching) -> (RationalLinearProgram, Vec<usize>, Vec<usize>) {
    let cost = CostM::new(g, m);
    let mut lp = RationalLinearProgram::new(true);
    let zero = Some(Rational::zero());
    let edge_vars: Vec<usize> = g
        .edges()
        .iter()
        .map(|&(u, v)| lp.add_var(format!("x_{}_{}", g.name(u), g.name(v)), zero.clone(), None))
        .collect();
    let loop_vars: Vec<usize> = (0..g.n()).map(|u| lp.add_var(format!("x_{}", g.name(u)), zero.clone(), None)).collect();
    let mut rows: Vec<Vec<(usize, Rational)>> = (0..g.n()).map(|u| vec![(loop_vars[u], Rational::one())]).collect();
    for (id, &(u, v)) in g.edges().iter().enumerate() {
        rows[u].push((edge_vars[id], Rational::one()));
        rows[v].push((edge_vars[id], Rational::one()));
    }
    for (u, row) in rows.into_iter().enumerate() {
        lp.add_constraint(format!("deg_{}", g.name(u)), row, Sense::Eq, Rational::one());
    }
    let mut obj = Vec::new();
    for (id, &c) in cost.edge_cost.iter().enumerate() {
        if c != 0 {
            obj.push((edge_vars[id], Rational::from(c as i64)));
        }
    }
    for (u, &c) in cost.loop_cost.iter().enumerate() {
        if c != 0 {
            obj.push((loop_vars[u], Rational::from(c as i64)));
        }
    }
    lp.set_objective(obj);
    (lp, edge_vars, loop_vars)
}

/// Exact popularity test for bipartite instances via the LP and its dual.
pub fn is_popular_lp(g: &PreferenceInstance, m: &Matching) -> Result<LpPopularity> {
    g.require_bipartite()?;
    let (lp, edge_vars, _) = popularity_lp(g, m);
    let sol = lp::solve(&lp);
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(format!("popularity LP returned {:?}", sol.status)));
    }
    lp::check_certificate(&lp, &sol).map_err(Error::Solver)?;
    let mut pairs = Vec::new();
    for (id, &(u, v)) in g.edges().iter().enumerate() {
        let x = &sol.primal[edge_vars[id]];
        if *x == Rational::one() {
            pairs.push((u, v));
        } else if !x.is_zero() {
            return Err(Error::Solver("fractional vertex on a bipartite popularity LP".into()));
        }
    }
    let best = Matching::from_pairs(g, &pairs)?;
    let popular = sol.objective.is_zero();
    let witness = if popular {
        let w = BipartiteWitness { alpha: sol.dual.clone() };
        debug_assert!(verify_bipartite_witness(g, m, &w).map(|r| r.ok()).unwrap_or(false));
        Some(w)
    } else {
        None
    };
    Ok(LpPopularity { popular, optimum: sol.objective, witness, best })
}

/// Searches for a witness with values in `{0, ±1}`.
///
/// Any optimal dual is tight on the edges and loops of `M`, so unmatched
/// vertices get 0 and each matched edge takes one of `(0,0)`, `(1,-1)`,
/// `(-1,1)`; the search backtracks over those choices.
pub fn integral_witness_search(g: &PreferenceInstance, m: &Matching, max_edges: usize) -> Result<Option<BipartiteWitness>> {
    check_len(g, m, g.n())?;
    let pairs = m.pairs();
    if pairs.len() > max_edges {
        return Err(Error::GuardExceeded(format!("{} matched edges exceeds the limit of {max_edges}", pairs.len())));
    }
    let cost = CostM::new(g, m);
    let n = g.n();
    // position in the assignment order, by matched edge
    let mut edge_of = vec![usize::MAX; n];
    for (k, &(u, v)) in pairs.iter().enumerate() {
        edge_of[u] = k;
        edge_of[v] = k;
    }
    // constraints become checkable once both endpoint edges are assigned
    let mut checks: Vec<Vec<(Vertex, Vertex, i8)>> = vec![Vec::new(); pairs.len()];
    let mut static_fail = false;
    for (id, &(u, v)) in g.edges().iter().enumerate() {
        if m.contains(u, v) {
            continue;
        }
        let c = cost.edge_cost[id];
        let ku = edge_of[u];
        let kv = edge_of[v];
        match (ku == usize::MAX, kv == usize::MAX) {
            (true, true) => {
                if c > 0 {
                    static_fail = true;
                }
            }
            _ => {
                let last = match (ku == usize::MAX, kv == usize::MAX) {
                    (true, _) => kv,
                    (_, true) => ku,
                    _ => ku.max(kv),
                };
                checks[last].push((u, v, c));
            }
        }
    }
    if static_fail {
        return Ok(None);
    }
    let mut alpha = vec![0i8; n];
    fn rec(
        k: usize,
        pairs: &[(Vertex, Vertex)],
        checks: &[Vec<(Vertex, Vertex, i8)>],
        alpha: &mut Vec<i8>,
    ) -> bool {
        if k == pairs.len() {
            return true;
        }
        let (u, v) = pairs[k];
        for (a, b) in [(0, 0), (1, -1), (-1, 1)] {
            alpha[u] = a;
            alpha[v] = b;
            if checks[k].iter().all(|&(x, y, c)| alpha[x] + alpha[y] >= c) && rec(k + 1, pairs, checks, alpha) {
                return true;
            }
        }
        alpha[u] = 0;
        alpha[v] = 0;
        false
    }
    if !rec(0, &pairs, &checks, &mut alpha) {
        return Ok(None);
    }
    let w = BipartiteWitness { alpha: alpha.iter().map(|&a| Rational::from(a as i64)).collect() };
    debug_assert!(verify_roommates_witness(g, m, &RoommatesWitness::from(w.clone())).unwrap().ok());
    Ok(Some(w))
}

/// Whether some point of the fractional matching polytope satisfies every
/// stability inequality `x_uv + Σ_{v' ≻_u v} x_uv' + Σ_{u' ≻_v u} x_u'v ≥ 1`.
///
/// Odd-set inequalities are separated exhaustively and added as cuts; the
/// vertex limit bounds that enumeration.
pub fn stable_mixed_feasibility(g: &PreferenceInstance, max_vertices: usize) -> Result<bool> {
    let max_vertices = max_vertices.min(24);
    if g.n() > max_vertices {
        return Err(Error::GuardExceeded(format!("{} vertices exceeds the limit of {max_vertices}", g.n())));
    }
    let mut lp = RationalLinearProgram::new(true);
    let vars: Vec<usize> = g
        .edges()
        .iter()
        .map(|&(u, v)| lp.add_var(format!("x_{}_{}", g.name(u), g.name(v)), Some(Rational::zero()), None))
        .collect();
    let var = |u: Vertex, v: Vertex| vars[g.edge_id(u, v).unwrap()];
    for u in 0..g.n() {
        if g.degree(u) == 0 {
            continue;
        }
        let row = g.prefs(u).iter().map(|&v| (var(u, v), Rational::one())).collect();
        lp.add_constraint(format!("deg_{}", g.name(u)), row, Sense::Le, Rational::one());
    }
    for &(u, v) in g.edges() {
        let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
        row.insert(var(u, v), Rational::one());
        for &w in g.prefs(u).iter().take(g.rank(u, v).unwrap()) {
            row.insert(var(u, w), Rational::one());
        }
        for &w in g.prefs(v).iter().take(g.rank(v, u).unwrap()) {
            row.insert(var(v, w), Rational::one());
        }
        lp.add_constraint(format!("stab_{}_{}", g.name(u), g.name(v)), row.into_iter().collect(), Sense::Ge, Rational::one());
    }
    if g.is_bipartite() {
        return Ok(lp::solve(&lp).status == LpStatus::Optimal);
    }
    let mut odd_sets: Vec<u64> = Vec::new();
    let n = g.n();
    for mask in 1u64..(1u64 << n) {
        let c = mask.count_ones();
        if c >= 3 && c % 2 == 1 {
            let inside = g.edges().iter().filter(|&&(u, v)| mask >> u & 1 == 1 && mask >> v & 1 == 1).count();
            if inside > (c / 2) as usize {
                odd_sets.push(mask);
            }
        }
    }
    loop {
        let sol = lp::solve(&lp);
        if sol.status != LpStatus::Optimal {
            return Ok(false);
        }
        let x = &sol.primal;
        let mut added = false;
        for &mask in &odd_sets {
            let cap = Rational::from((mask.count_ones() / 2) as i64);
            let inside: Vec<usize> = g
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, &(u, v))| mask >> u & 1 == 1 && mask >> v & 1 == 1)
                .map(|(id, _)| vars[id])
                .collect();
            let total: Rational = inside.iter().map(|&j| &x[j]).sum();
            if total > cap {
                lp.add_constraint(
                    format!("odd_{mask:x}"),
                    inside.into_iter().map(|j| (j, Rational::one())).collect(),
                    Sense::Le,
                    cap,
                );
                added = true;
            }
        }
        if !added {
            return Ok(true);
        }
    }
}
