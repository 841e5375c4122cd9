//! Head-to-head comparisons between matchings and exhaustive oracles.
//!
//! `Δ(N, M)` is the number of vertices preferring `N` minus the number
//! preferring `M`. It equals `cost_M(Ñ)`, the cost of `N` (with self-loops
//! on its unmatched vertices) under the edge costs induced by `M`. The
//! exhaustive popularity test maximises `cost_M` over all matchings with a
//! memoised subset DP instead of enumerating every `N`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{Matching, PreferenceInstance, Vertex};

/// Limits on exhaustive operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationGuard {
    pub max_vertices: usize,
    pub max_matchings: usize,
}

impl Default for EnumerationGuard {
    fn default() -> Self {
        Self { max_vertices: 16, max_matchings: 200_000 }
    }
}

impl EnumerationGuard {
    pub fn new(max_vertices: usize, max_matchings: usize) -> Self {
        Self { max_vertices, max_matchings }
    }

    /// Defaults overridden by `POPMATCH_GUARD_VERTICES` / `POPMATCH_GUARD_MATCHINGS`.
    pub fn from_env() -> Self {
        let mut g = Self::default();
        if let Some(v) = std::env::var("POPMATCH_GUARD_VERTICES").ok().and_then(|s| s.parse().ok()) {
            g.max_vertices = v;
        }
        if let Some(v) = std::env::var("POPMATCH_GUARD_MATCHINGS").ok().and_then(|s| s.parse().ok()) {
            g.max_matchings = v;
        }
        g
    }

    pub fn check_vertices(&self, g: &PreferenceInstance) -> Result<()> {
        if g.n() > self.max_vertices {
            return Err(Error::GuardExceeded(format!(
                "{} vertices exceeds the limit of {}",
                g.n(),
                self.max_vertices
            )));
        }
        Ok(())
    }
}

/// Edge and loop costs induced by a matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostM {
    pub matching: Matching,
    /// Indexed like `PreferenceInstance::edges`.
    pub edge_cost: Vec<i8>,
    pub loop_cost: Vec<i8>,
}

impl CostM {
    pub fn new(g: &PreferenceInstance, m: &Matching) -> Self {
        let edge_cost = g.edges().iter().map(|&(u, v)| g.edge_vote(m, u, v)).collect();
        let loop_cost = (0..g.n()).map(|u| if m.is_matched(u) { -1 } else { 0 }).collect();
        Self { matching: m.clone(), edge_cost, loop_cost }
    }

    pub fn edge(&self, g: &PreferenceInstance, u: Vertex, v: Vertex) -> i8 {
        if u == v {
            return self.loop_cost[u];
        }
        self.edge_cost[g.edge_id(u, v).expect("not an edge")]
    }

    /// `cost_M(Ñ)`.
    pub fn cost_of(&self, g: &PreferenceInstance, n: &Matching) -> i64 {
        let mut total = 0i64;
        for u in 0..g.n() {
            match n.mate(u) {
                Some(v) if u < v => total += self.edge(g, u, v) as i64,
                Some(_) => {}
                None => total += self.loop_cost[u] as i64,
            }
        }
        total
    }
}

/// `φ(N, M) - φ(M, N)` from per-vertex votes.
pub fn delta_by_votes(g: &PreferenceInstance, n: &Matching, m: &Matching) -> i64 {
    (0..g.n())
        .map(|u| g.vote(u, n.partner_or_self(u), m.partner_or_self(u)).expect("matching edges") as i64)
        .sum()
}

/// `cost_M(Ñ)`.
pub fn delta_by_cost(g: &PreferenceInstance, n: &Matching, m: &Matching) -> i64 {
    CostM::new(g, m).cost_of(g, n)
}

/// `Δ(N, M)`, computed both ways; panics if they disagree.
pub fn delta(g: &PreferenceInstance, n: &Matching, m: &Matching) -> i64 {
    let a = delta_by_votes(g, n, m);
    let b = delta_by_cost(g, n, m);
    assert_eq!(a, b, "vote count and cost disagree");
    a
}

/// All matchings, including the empty one, sorted by edge list.
pub fn enumerate_matchings(g: &PreferenceInstance, guard: &EnumerationGuard) -> Result<Vec<Matching>> {
    guard.check_vertices(g)?;
    fn rec(
        g: &PreferenceInstance,
        u: usize,
        mate: &mut Vec<Option<Vertex>>,
        out: &mut Vec<Matching>,
        guard: &EnumerationGuard,
    ) -> Result<()> {
        let mut u = u;
        while u < g.n() && mate[u].is_some() {
            u += 1;
        }
        if u == g.n() {
            if out.len() >= guard.max_matchings {
                return Err(Error::GuardExceeded(format!("more than {} matchings", guard.max_matchings)));
            }
            out.push(Matching::from_mates(mate.clone()));
            return Ok(());
        }
        rec(g, u + 1, mate, out, guard)?;
        for &v in g.prefs(u) {
            if v > u && mate[v].is_none() {
                mate[u] = Some(v);
                mate[v] = Some(u);
                rec(g, u + 1, mate, out, guard)?;
                mate[v] = None;
                mate[u] = None;
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    rec(g, 0, &mut vec![None; g.n()], &mut out, guard)?;
    out.sort();
    Ok(out)
}

/// All inclusion-maximal matchings. Non-maximal matchings are never popular:
/// adding an edge between two unmatched vertices wins by two votes.
pub fn enumerate_maximal_matchings(g: &PreferenceInstance, guard: &EnumerationGuard) -> Result<Vec<Matching>> {
    guard.check_vertices(g)?;
    let n = g.n();
    let mut out = Vec::new();
    let mut mate: Vec<Option<Vertex>> = vec![None; n];
    let mut skipped = vec![false; n];
    fn rec(
        g: &PreferenceInstance,
        u: usize,
        mate: &mut Vec<Option<Vertex>>,
        skipped: &mut Vec<bool>,
        out: &mut Vec<Matching>,
        guard: &EnumerationGuard,
    ) -> Result<()> {
        let n = g.n();
        let mut u = u;
        while u < n && mate[u].is_some() {
            u += 1;
        }
        if u == n {
            // a skipped vertex must have all neighbours matched
            for w in 0..n {
                if skipped[w] && g.prefs(w).iter().any(|&x| mate[x].is_none()) {
                    return Ok(());
                }
            }
            if out.len() >= guard.max_matchings {
                return Err(Error::GuardExceeded(format!("more than {} matchings", guard.max_matchings)));
            }
            out.push(Matching::from_mates(mate.clone()));
            return Ok(());
        }
        // prune: an earlier skipped neighbour of u forces u to be matched
        let forced = g.prefs(u).iter().any(|&x| x < u && skipped[x]);
        for &v in g.prefs(u) {
            if v > u && mate[v].is_none() {
                mate[u] = Some(v);
                mate[v] = Some(u);
                rec(g, u + 1, mate, skipped, out, guard)?;
                mate[v] = None;
                mate[u] = None;
            }
        }
        if !forced {
            skipped[u] = true;
            rec(g, u + 1, mate, skipped, out, guard)?;
            skipped[u] = false;
        }
        Ok(())
    }
    rec(g, 0, &mut mate, &mut skipped, &mut out, guard)?;
    out.sort();
    Ok(out)
}

/// Maximises `cost_M(Ñ)` over all matchings `N`.
///
/// Returns the maximum and a maximiser. `M` is popular iff the maximum is 0.
pub fn best_response(g: &PreferenceInstance, m: &Matching) -> Result<(i64, Matching)> {
    let n = g.n();
    if n > 128 {
        return Err(Error::GuardExceeded(format!("{n} vertices exceeds the 128-vertex DP limit")));
    }
    let cost = CostM::new(g, m);
    let base: i64 = cost.loop_cost.iter().map(|&c| c as i64).sum();
    // only edges whose gain over two loops is positive can help
    let mut adj: Vec<Vec<(Vertex, i64)>> = vec![Vec::new(); n];
    for (id, &(u, v)) in g.edges().iter().enumerate() {
        let gain = cost.edge_cost[id] as i64 - cost.loop_cost[u] as i64 - cost.loop_cost[v] as i64;
        if gain > 0 {
            adj[u].push((v, gain));
            adj[v].push((u, gain));
        }
    }
    let order = bandwidth_order(&adj);
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // neighbours in position space, only forward ones
    let fwd: Vec<Vec<(usize, i64)>> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| adj[v].iter().map(|&(w, c)| (pos[w], c)).filter(|&(p, _)| p > i).collect())
        .collect();

    struct Dp<'a> {
        fwd: &'a [Vec<(usize, i64)>],
        memo: HashMap<(usize, u128), i64>,
    }
    impl Dp<'_> {
        fn f(&mut self, i: usize, mask: u128) -> i64 {
            let n = self.fwd.len();
            let (mut i, mut mask) = (i, mask);
            while i < n && mask & (1u128 << i) != 0 {
                mask &= !(1u128 << i);
                i += 1;
            }
            if i >= n {
                return 0;
            }
            if let Some(&v) = self.memo.get(&(i, mask)) {
                return v;
            }
            let mut best = self.f(i + 1, mask);
            for k in 0..self.fwd[i].len() {
                let (p, c) = self.fwd[i][k];
                if mask & (1u128 << p) == 0 {
                    best = best.max(c + self.f(i + 1, mask | (1u128 << p)));
                }
            }
            self.memo.insert((i, mask), best);
            best
        }
    }
    let mut dp = Dp { fwd: &fwd, memo: HashMap::new() };
    let best = dp.f(0, 0);

    // walk the decisions back
    let mut mate = vec![None; n];
    let (mut i, mut mask) = (0usize, 0u128);
    loop {
        while i < n && mask & (1u128 << i) != 0 {
            mask &= !(1u128 << i);
            i += 1;
        }
        if i >= n {
            break;
        }
        let target = dp.f(i, mask);
        let mut chosen = None;
        for &(p, c) in &fwd[i] {
            if mask & (1u128 << p) == 0 && c + dp.f(i + 1, mask | (1u128 << p)) == target {
                chosen = Some(p);
                break;
            }
        }
        if let Some(p) = chosen {
            let (u, v) = (order[i], order[p]);
            mate[u] = Some(v);
            mate[v] = Some(u);
            mask |= 1u128 << p;
        }
        i += 1;
    }
    let resp = Matching::from_mates(mate);
    let value = base + best;
    debug_assert_eq!(value, cost.cost_of(g, &resp));
    Ok((value, resp))
}

/// Cuthill-McKee style order: BFS from a minimum-degree vertex per component.
fn bandwidth_order(adj: &[Vec<(Vertex, i64)>]) -> Vec<Vertex> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<Vertex> = (0..n).collect();
    by_degree.sort_by_key(|&v| (adj[v].len(), v));
    for &s in &by_degree {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let start = order.len();
        order.push(s);
        let mut head = start;
        while head < order.len() {
            let u = order[head];
            head += 1;
            let mut next: Vec<Vertex> = adj[u].iter().map(|&(w, _)| w).filter(|&w| !seen[w]).collect();
            next.sort_by_key(|&w| (adj[w].len(), w));
            next.dedup();
            for w in next {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
        }
    }
    order
}

pub fn is_popular_brute(g: &PreferenceInstance, m: &Matching, guard: &EnumerationGuard) -> Result<bool> {
    Ok(counterexample(g, m, guard)?.is_none())
}

/// Some `N` with `Δ(N, M) > 0`, if one exists.
pub fn counterexample(g: &PreferenceInstance, m: &Matching, guard: &EnumerationGuard) -> Result<Option<Matching>> {
    guard.check_vertices(g)?;
    let (best, resp) = best_response(g, m)?;
    Ok(if best > 0 { Some(resp) } else { None })
}

/// Literal definition: compares `M` against every enumerated matching.
pub fn is_popular_pairwise(g: &PreferenceInstance, m: &Matching, guard: &EnumerationGuard) -> Result<bool> {
    let all = enumerate_matchings(g, guard)?;
    Ok(all.iter().all(|n| delta(g, n, m) <= 0))
}

/// All popular matchings, sorted by edge list.
pub fn enumerate_popular(g: &PreferenceInstance, guard: &EnumerationGuard) -> Result<Vec<Matching>> {
    let cands = enumerate_maximal_matchings(g, guard)?;
    filter_popular(g, cands)
}

fn filter_popular(g: &PreferenceInstance, cands: Vec<Matching>) -> Result<Vec<Matching>> {
    let flags: Vec<Result<bool>> = cands.par_iter().map(|m| Ok(best_response(g, m)?.0 == 0)).collect();
    let mut out = Vec::new();
    for (m, f) in cands.into_iter().zip(flags) {
        if f? {
            out.push(m);
        }
    }
    Ok(out)
}

/// A largest popular matching (lexicographically smallest among ties).
pub fn max_size_popular_brute(g: &PreferenceInstance, guard: &EnumerationGuard) -> Result<Option<Matching>> {
    Ok(max_size_popular_all(g, guard)?.into_iter().next())
}

/// Every popular matching of maximum size, sorted.
pub fn max_size_popular_all(g: &PreferenceInstance, guard: &EnumerationGuard) -> Result<Vec<Matching>> {
    let cands = enumerate_maximal_matchings(g, guard)?;
    let mut by_size: Vec<Vec<Matching>> = vec![Vec::new(); g.n() / 2 + 1];
    for m in cands {
        by_size[m.len()].push(m);
    }
    for bucket in by_size.into_iter().rev() {
        let pop = filter_popular(g, bucket)?;
        if !pop.is_empty() {
            return Ok(pop);
        }
    }
    Ok(Vec::new())
}

/// A popular matching of maximum weight (lexicographically smallest among ties).
pub fn max_weight_popular_brute(g: &PreferenceInstance, guard: &EnumerationGuard) -> Result<Option<Matching>> {
    let pop = enumerate_popular(g, guard)?;
    Ok(argmax_weight(g, pop))
}

pub(crate) fn argmax_weight(g: &PreferenceInstance, ms: Vec<Matching>) -> Option<Matching> {
    let mut best: Option<(crate::rational::Rational, Matching)> = None;
    for m in ms {
        let w = m.weight(g);
        match &best {
            Some((bw, bm)) if w < *bw || (w == *bw && m >= *bm) => {}
            _ => best = Some((w, m)),
        }
    }
    best.map(|(_, m)| m)
}
