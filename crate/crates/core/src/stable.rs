//! Stable matchings: deferred acceptance for bipartite instances and
//! Irving's two-phase algorithm for roommates instances.
//!
//! Irving runs over [`ListInstance`], whose list entries are edges rather
//! than neighbours. This lets two parallel edges between the same pair of
//! vertices sit at different positions of the same list.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::instance::{Matching, PreferenceInstance, Side, Vertex};
use crate::popularity::{enumerate_maximal_matchings, EnumerationGuard};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedEdge {
    pub u: Vertex,
    pub v: Vertex,
    pub tag_u: Option<Sign>,
    pub tag_v: Option<Sign>,
    pub rank_at_u: usize,
    pub rank_at_v: usize,
}

impl RankedEdge {
    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn rank_at(&self, x: Vertex) -> usize {
        if x == self.u {
            self.rank_at_u
        } else {
            self.rank_at_v
        }
    }

    pub fn tag_at(&self, x: Vertex) -> Option<Sign> {
        if x == self.u {
            self.tag_u
        } else {
            self.tag_v
        }
    }
}

/// Preference lists over (possibly parallel, possibly tagged) edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListInstance {
    pub names: Vec<String>,
    pub edges: Vec<RankedEdge>,
    /// Edge ids per vertex, most preferred first.
    pub lists: Vec<Vec<usize>>,
}

impl ListInstance {
    /// One untagged edge per edge of `g`, ids matching `g.edges()`.
    pub fn from_instance(g: &PreferenceInstance) -> Self {
        let edges = g
            .edges()
            .iter()
            .map(|&(u, v)| RankedEdge {
                u,
                v,
                tag_u: None,
                tag_v: None,
                rank_at_u: g.rank(u, v).unwrap(),
                rank_at_v: g.rank(v, u).unwrap(),
            })
            .collect();
        let lists = (0..g.n()).map(|u| g.prefs(u).iter().map(|&v| g.edge_id(u, v).unwrap()).collect()).collect();
        Self { names: g.names().to_vec(), edges, lists }
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    /// `x`'s view of edge `e`: the other endpoint with its tag, e.g. `c-`.
    pub fn entry_label(&self, x: Vertex, e: usize) -> String {
        let edge = &self.edges[e];
        let y = edge.other(x);
        match edge.tag_at(y) {
            Some(s) => format!("{}{}", self.names[y], s.symbol()),
            None => self.names[y].clone(),
        }
    }

    /// Edge `e` written as a pair with `x` first, e.g. `(a+, c-)`.
    pub fn pair_label(&self, x: Vertex, e: usize) -> String {
        let edge = &self.edges[e];
        let own = match edge.tag_at(x) {
            Some(s) => format!("{}{}", self.names[x], s.symbol()),
            None => self.names[x].clone(),
        };
        format!("({}, {})", own, self.entry_label(x, e))
    }

    pub fn lists_json(&self, lists: &[Vec<usize>]) -> Value {
        let map: serde_json::Map<String, Value> = (0..self.n())
            .map(|x| (self.names[x].clone(), json!(lists[x].iter().map(|&e| self.entry_label(x, e)).collect::<Vec<_>>())))
            .collect();
        Value::Object(map)
    }
}

/// A matching in a [`ListInstance`]: the edge used at each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMatching {
    pub edge_at: Vec<Option<usize>>,
}

impl EdgeMatching {
    pub fn empty(n: usize) -> Self {
        Self { edge_at: vec![None; n] }
    }

    pub fn from_edges(li: &ListInstance, ids: &[usize]) -> Result<Self> {
        let mut m = Self::empty(li.n());
        for &e in ids {
            let edge = li.edges.get(e).ok_or_else(|| Error::InvalidMatching(format!("no edge {e}")))?;
            if m.edge_at[edge.u].is_some() || m.edge_at[edge.v].is_some() {
                return Err(Error::InvalidMatching("vertex covered twice".into()));
            }
            m.edge_at[edge.u] = Some(e);
            m.edge_at[edge.v] = Some(e);
        }
        Ok(m)
    }

    /// Edge ids, sorted.
    pub fn edges(&self) -> Vec<usize> {
        let s: BTreeSet<usize> = self.edge_at.iter().flatten().copied().collect();
        s.into_iter().collect()
    }

    pub fn blocking_edges(&self, li: &ListInstance) -> Vec<usize> {
        let better = |x: Vertex, e: usize| match self.edge_at[x] {
            None => true,
            Some(m) => li.edges[e].rank_at(x) < li.edges[m].rank_at(x),
        };
        (0..li.edges.len())
            .filter(|&e| {
                let edge = &li.edges[e];
                self.edge_at[edge.u] != Some(e) && better(edge.u, e) && better(edge.v, e)
            })
            .collect()
    }

    pub fn is_stable(&self, li: &ListInstance) -> bool {
        self.blocking_edges(li).is_empty()
    }

    /// Pairs labelled from the lower endpoint, e.g. `["(a+, d-)", ...]`.
    pub fn labels(&self, li: &ListInstance) -> Vec<String> {
        self.edges().into_iter().map(|e| li.pair_label(li.edges[e].u, e)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rotation {
    /// `(x_i, e_i)` with `e_i` the first entry of `x_i` when exposed.
    pub pairs: Vec<(Vertex, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IrvingTrace {
    pub phase1: Vec<Vec<usize>>,
    pub rotations: Vec<Rotation>,
    /// Lists after all eliminations (or at the point of failure).
    pub final_lists: Vec<Vec<usize>>,
}

impl IrvingTrace {
    pub fn to_json(&self, li: &ListInstance) -> Value {
        json!({
            "phase1": li.lists_json(&self.phase1),
            "rotations": self.rotations.iter().map(|r| {
                r.pairs.iter().map(|&(x, e)| li.pair_label(x, e)).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
            "final": li.lists_json(&self.final_lists),
        })
    }

    pub fn phase1_labels(&self, li: &ListInstance) -> Vec<Vec<String>> {
        (0..li.n()).map(|x| self.phase1[x].iter().map(|&e| li.entry_label(x, e)).collect()).collect()
    }
}

struct Lists<'a> {
    li: &'a ListInstance,
    alive: Vec<bool>,
}

impl Lists<'_> {
    fn current(&self, x: Vertex) -> impl Iterator<Item = usize> + '_ {
        self.li.lists[x].iter().copied().filter(|&e| self.alive[e])
    }

    fn snapshot(&self) -> Vec<Vec<usize>> {
        (0..self.li.n()).map(|x| self.current(x).collect()).collect()
    }

    fn len(&self, x: Vertex) -> usize {
        self.current(x).count()
    }

    fn first(&self, x: Vertex) -> Option<usize> {
        self.current(x).next()
    }

    fn second(&self, x: Vertex) -> Option<usize> {
        self.current(x).nth(1)
    }

    fn last(&self, x: Vertex) -> Option<usize> {
        self.current(x).last()
    }

    /// Entries of `x` strictly after `e`.
    fn after(&self, x: Vertex, e: usize) -> Vec<usize> {
        let r = self.li.edges[e].rank_at(x);
        self.current(x).filter(|&f| self.li.edges[f].rank_at(x) > r).collect()
    }
}

/// Irving's algorithm on a list instance. Returns a stable matching if one
/// exists, with the phase-1 lists and eliminated rotations.
pub fn irving_lists(li: &ListInstance) -> (Option<EdgeMatching>, IrvingTrace) {
    let n = li.n();
    let mut st = Lists { li, alive: vec![true; li.edges.len()] };
    let mut trace = IrvingTrace::default();

    // phase 1: proposals, smallest free vertex first
    let mut proposed: Vec<Option<usize>> = vec![None; n];
    let mut held: Vec<Option<usize>> = vec![None; n];
    let mut free: BTreeSet<Vertex> = (0..n).collect();
    while let Some(x) = free.pop_first() {
        let Some(e) = st.first(x) else { continue };
        let y = li.edges[e].other(x);
        proposed[x] = Some(e);
        for f in st.after(y, e) {
            st.alive[f] = false;
            for p in [li.edges[f].u, li.edges[f].v] {
                if proposed[p] == Some(f) {
                    proposed[p] = None;
                    free.insert(p);
                }
                if held[p] == Some(f) {
                    held[p] = None;
                }
            }
        }
        held[y] = Some(e);
    }
    trace.phase1 = st.snapshot();
    let had_list: Vec<bool> = (0..n).map(|x| st.len(x) > 0).collect();

    // phase 2: eliminate exposed rotations, lowest starting vertex first
    loop {
        let Some(p0) = (0..n).find(|&x| st.len(x) >= 2) else { break };
        let mut seq: Vec<Vertex> = vec![p0];
        let start = loop {
            let p = *seq.last().unwrap();
            let f = st.second(p).expect("list of length two");
            let q = li.edges[f].other(p);
            let g = st.last(q).expect("nonempty list");
            let next = li.edges[g].other(q);
            if let Some(i) = seq.iter().position(|&x| x == next) {
                break i;
            }
            seq.push(next);
        };
        let xs = &seq[start..];
        let rotation = Rotation { pairs: xs.iter().map(|&x| (x, st.first(x).unwrap())).collect() };
        let seconds: Vec<usize> = xs.iter().map(|&x| st.second(x).unwrap()).collect();
        for (i, &f) in seconds.iter().enumerate() {
            let z = li.edges[f].other(xs[i]);
            for g in st.after(z, f) {
                st.alive[g] = false;
            }
        }
        trace.rotations.push(rotation);
        if (0..n).any(|x| had_list[x] && st.len(x) == 0) {
            trace.final_lists = st.snapshot();
            return (None, trace);
        }
    }
    trace.final_lists = st.snapshot();
    let mut m = EdgeMatching::empty(n);
    for x in 0..n {
        if let Some(e) = st.first(x) {
            let y = li.edges[e].other(x);
            if st.first(y) != Some(e) {
                return (None, trace);
            }
            m.edge_at[x] = Some(e);
        }
    }
    debug_assert!(m.is_stable(li));
    (Some(m), trace)
}

/// Irving's algorithm on an ordinary instance.
pub fn irving(g: &PreferenceInstance) -> (Option<Matching>, IrvingTrace) {
    let li = ListInstance::from_instance(g);
    let (m, trace) = irving_lists(&li);
    let m = m.map(|em| {
        let pairs: Vec<(Vertex, Vertex)> = em.edges().into_iter().map(|e| g.edges()[e]).collect();
        Matching::from_pairs(g, &pairs).expect("edge matching")
    });
    (m, trace)
}

/// Deferred acceptance with `proposers` proposing; proposer-optimal.
pub fn gale_shapley(g: &PreferenceInstance, proposers: Side) -> Result<Matching> {
    let sides = g.require_bipartite()?;
    let n = g.n();
    let mut next = vec![0usize; n];
    let mut mate: Vec<Option<Vertex>> = vec![None; n];
    let mut queue: VecDeque<Vertex> = (0..n).filter(|&u| sides[u] == proposers).collect();
    while let Some(x) = queue.pop_front() {
        let list = g.prefs(x);
        while next[x] < list.len() {
            let y = list[next[x]];
            next[x] += 1;
            match mate[y] {
                None => {
                    mate[y] = Some(x);
                    mate[x] = Some(y);
                    break;
                }
                Some(z) if g.prefers(y, x, z) => {
                    mate[y] = Some(x);
                    mate[x] = Some(y);
                    mate[z] = None;
                    queue.push_back(z);
                    break;
                }
                _ => {}
            }
        }
    }
    let pairs: Vec<(Vertex, Vertex)> =
        (0..n).filter_map(|u| mate[u].filter(|&v| u < v).map(|v| (u, v))).collect();
    Matching::from_pairs(g, &pairs)
}

/// A stable matching of `g`, if any: deferred acceptance for bipartite
/// instances, Irving otherwise.
pub fn stable_matching(g: &PreferenceInstance) -> Option<Matching> {
    if g.is_bipartite() {
        Some(gale_shapley(g, Side::A).expect("bipartite"))
    } else {
        irving(g).0
    }
}

pub fn blocking_edges(g: &PreferenceInstance, m: &Matching) -> Vec<(Vertex, Vertex)> {
    g.edges().iter().copied().filter(|&(u, v)| g.is_blocking_edge(m, u, v)).collect()
}

pub fn stable_check(g: &PreferenceInstance, m: &Matching) -> bool {
    blocking_edges(g, m).is_empty()
}

/// Every stable matching, by filtering maximal matchings.
pub fn all_stable_matchings(g: &PreferenceInstance, guard: &EnumerationGuard) -> Result<Vec<Matching>> {
    Ok(enumerate_maximal_matchings(g, guard)?.into_iter().filter(|m| stable_check(g, m)).collect())
}

/// Vertices left unmatched by every stable matching.
pub fn unstable_vertices(g: &PreferenceInstance) -> Result<BTreeSet<Vertex>> {
    let m = stable_matching(g).ok_or(Error::NoStableMatching)?;
    Ok((0..g.n()).filter(|&u| !m.is_matched(u)).collect())
}
