//! Strongly dominant matchings through the bidirected instance.
//!
//! Each edge `(u, v)` becomes two parallel edges `(u+, v-)` and `(u-, v+)`.
//! Every vertex ranks all `-` entries above all `+` entries, each block in
//! its original order. A stable matching of that instance projects to a
//! strongly dominant matching of the original, and one exists only if the
//! original has one.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::instance::{Matching, PreferenceInstance, Vertex};
use crate::popularity::{enumerate_maximal_matchings, EnumerationGuard};
use crate::stable::{irving_lists, EdgeMatching, IrvingTrace, ListInstance, RankedEdge, Sign};
use crate::witness::{check_partition, verify_strongly_dominant, StronglyDominantWitness};

/// Edge `2k` is `(u+, v-)` and edge `2k + 1` is `(u-, v+)` for the `k`-th
/// edge `(u, v)`, `u < v`, of the original instance.
pub fn build_bidirected(g: &PreferenceInstance) -> ListInstance {
    let mut edges = Vec::with_capacity(2 * g.edges().len());
    for &(u, v) in g.edges() {
        for (tu, tv) in [(Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Plus)] {
            edges.push(RankedEdge { u, v, tag_u: Some(tu), tag_v: Some(tv), rank_at_u: 0, rank_at_v: 0 });
        }
    }
    let mut lists = Vec::with_capacity(g.n());
    for x in 0..g.n() {
        let mut list = Vec::with_capacity(2 * g.degree(x));
        for want in [Sign::Minus, Sign::Plus] {
            for &y in g.prefs(x) {
                let k = g.edge_id(x, y).unwrap();
                let e = if edges[2 * k].tag_at(y) == Some(want) { 2 * k } else { 2 * k + 1 };
                list.push(e);
            }
        }
        for (pos, &e) in list.iter().enumerate() {
            if edges[e].u == x {
                edges[e].rank_at_u = pos;
            } else {
                edges[e].rank_at_v = pos;
            }
        }
        lists.push(list);
    }
    ListInstance { names: g.names().to_vec(), edges, lists }
}

pub fn project(g: &PreferenceInstance, bi: &ListInstance, m: &EdgeMatching) -> Matching {
    let pairs: Vec<(Vertex, Vertex)> = m.edges().into_iter().map(|e| (bi.edges[e].u, bi.edges[e].v)).collect();
    Matching::from_pairs(g, &pairs).expect("projection of a bidirected matching")
}

/// `+1` where a vertex uses its `+` copy, `-1` for the `-` copy, 0 if unmatched.
pub fn witness_from_prime(bi: &ListInstance, m: &EdgeMatching) -> StronglyDominantWitness {
    StronglyDominantWitness {
        alpha: (0..bi.n())
            .map(|x| match m.edge_at[x] {
                Some(e) if bi.edges[e].tag_at(x) == Some(Sign::Plus) => 1,
                Some(_) => -1,
                None => 0,
            })
            .collect(),
    }
}

#[derive(Clone, Debug)]
pub struct DominantResult {
    pub matching: Matching,
    pub witness: StronglyDominantWitness,
    pub prime: EdgeMatching,
}

/// A strongly dominant matching with its witness, or `None` if none exists.
pub fn strongly_dominant(g: &PreferenceInstance) -> (Option<DominantResult>, ListInstance, IrvingTrace) {
    let bi = build_bidirected(g);
    let (prime, trace) = irving_lists(&bi);
    let res = prime.map(|prime| {
        let matching = project(g, &bi, &prime);
        let witness = witness_from_prime(&bi, &prime);
        DominantResult { matching, witness, prime }
    });
    (res, bi, trace)
}

/// Maps a verified witness back to a stable matching of the bidirected instance.
pub fn stable_prime_from_dominant(
    g: &PreferenceInstance,
    bi: &ListInstance,
    m: &Matching,
    w: &StronglyDominantWitness,
) -> Result<EdgeMatching> {
    let check = verify_strongly_dominant(g, m, w)?;
    if !check.ok() {
        let first = check.dual.violations.iter().chain(&check.partition.violations).next().unwrap();
        return Err(Error::InvalidWitness(first.to_string()));
    }
    let mut ids = Vec::new();
    for (u, v) in m.pairs() {
        let k = g.edge_id(u, v).unwrap();
        // u < v, so edge 2k has u on the `+` side
        ids.push(if w.alpha[u] == 1 { 2 * k } else { 2 * k + 1 });
    }
    EdgeMatching::from_edges(bi, &ids)
}

/// Every pair `(M, R)` satisfying the partition definition, by exhaustive
/// search. `R` must contain exactly one endpoint of each edge of `M` and no
/// unmatched vertex, so only those partitions are tried.
pub fn strongly_dominant_brute(g: &PreferenceInstance, max_vertices: usize) -> Result<Vec<(Matching, BTreeSet<Vertex>)>> {
    let max_vertices = max_vertices.min(12);
    let guard = EnumerationGuard::new(max_vertices, usize::MAX);
    let mut out = Vec::new();
    for m in enumerate_maximal_matchings(g, &guard)? {
        let pairs = m.pairs();
        for bits in 0u32..(1u32 << pairs.len()) {
            let r: BTreeSet<Vertex> =
                pairs.iter().enumerate().map(|(i, &(u, v))| if bits >> i & 1 == 1 { u } else { v }).collect();
            if check_partition(g, &m, &r).ok() {
                out.push((m.clone(), r));
            }
        }
    }
    Ok(out)
}
