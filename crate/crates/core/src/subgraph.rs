//! The popular subgraph: edges that occur in at least one popular matching,
//! its connected components, and their size classes.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::instance::{PreferenceInstance, Vertex};
use crate::popularity::{enumerate_popular, EnumerationGuard};
use crate::stable::{all_stable_matchings, unstable_vertices};

/// Components are ordered: size at least 4, then size 2, then singletons,
/// each class by smallest vertex. Indices `0..k` are the large ones,
/// `k..ell` the pairs and `ell..h` the singletons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PopularSubgraph {
    pub edges: BTreeSet<(Vertex, Vertex)>,
    pub components: Vec<Vec<Vertex>>,
    pub component_of: Vec<usize>,
    pub k: usize,
    pub ell: usize,
    pub unstable_per_component: Vec<BTreeSet<Vertex>>,
}

impl PopularSubgraph {
    pub fn h(&self) -> usize {
        self.components.len()
    }

    pub fn size2(&self) -> std::ops::Range<usize> {
        self.k..self.ell
    }

    pub fn singletons(&self) -> std::ops::Range<usize> {
        self.ell..self.h()
    }

    pub fn contains(&self, u: Vertex, v: Vertex) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn to_json(&self, g: &PreferenceInstance) -> Value {
        let names = |vs: &mut dyn Iterator<Item = Vertex>| -> Vec<String> { vs.map(|u| g.name(u).to_string()).collect() };
        json!({
            "edges": self.edges.iter().map(|&(u, v)| [g.name(u), g.name(v)]).collect::<Vec<_>>(),
            "components": self.components.iter().enumerate().map(|(i, c)| json!({
                "vertices": names(&mut c.iter().copied()),
                "unstable": names(&mut self.unstable_per_component[i].iter().copied()),
            })).collect::<Vec<_>>(),
            "k": self.k,
            "ell": self.ell,
            "h": self.h(),
        })
    }
}

fn union_edges(ms: &[crate::Matching]) -> BTreeSet<(Vertex, Vertex)> {
    ms.iter().flat_map(|m| m.pairs()).collect()
}

/// Union of all popular matchings, found by enumeration.
pub fn popular_edges_brute(g: &PreferenceInstance, guard: &EnumerationGuard) -> Result<BTreeSet<(Vertex, Vertex)>> {
    g.require_bipartite()?;
    Ok(union_edges(&enumerate_popular(g, guard)?))
}

/// Union of all stable matchings. A subset of the popular edges, so using it
/// in place of the popular subgraph can make the exact algorithm miss optima.
pub fn stable_edges_brute(g: &PreferenceInstance, guard: &EnumerationGuard) -> Result<BTreeSet<(Vertex, Vertex)>> {
    g.require_bipartite()?;
    Ok(union_edges(&all_stable_matchings(g, guard)?))
}

pub fn decompose(g: &PreferenceInstance, edges: &BTreeSet<(Vertex, Vertex)>) -> Result<PopularSubgraph> {
    let n = g.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    let mut norm = BTreeSet::new();
    for &(u, v) in edges {
        if u >= n || v >= n || !g.is_edge(u, v) {
            return Err(Error::InvalidMatching(format!("({u}, {v}) is not an edge")));
        }
        norm.insert((u.min(v), u.max(v)));
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a.max(b)] = a.min(b);
    }
    let mut groups: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for u in 0..n {
        let r = find(&mut parent, u);
        groups[r].push(u);
    }
    let mut comps: Vec<Vec<Vertex>> = groups.into_iter().filter(|c| !c.is_empty()).collect();
    for c in &comps {
        if c.len() > 1 && c.len() % 2 == 1 {
            return Err(Error::OddComponent(c.len()));
        }
    }
    let class = |c: &Vec<Vertex>| match c.len() {
        1 => 2,
        2 => 1,
        _ => 0,
    };
    comps.sort_by_key(|c| (class(c), c[0]));
    let k = comps.iter().filter(|c| c.len() >= 4).count();
    let ell = k + comps.iter().filter(|c| c.len() == 2).count();
    assert!(4 * k <= n);
    let mut component_of = vec![0; n];
    for (i, c) in comps.iter().enumerate() {
        for &u in c {
            component_of[u] = i;
        }
    }
    let unstable = unstable_vertices(g)?;
    let unstable_per_component =
        comps.iter().map(|c| c.iter().copied().filter(|u| unstable.contains(u)).collect()).collect();
    Ok(PopularSubgraph { edges: norm, components: comps, component_of, k, ell, unstable_per_component })
}

/// Popular subgraph from enumeration; with `stable_only` the stable edges are used instead.
pub fn popular_subgraph(g: &PreferenceInstance, guard: &EnumerationGuard, stable_only: bool) -> Result<PopularSubgraph> {
    let edges = if stable_only { stable_edges_brute(g, guard)? } else { popular_edges_brute(g, guard)? };
    decompose(g, &edges)
}

/// Checks that every popular matching matches either all or none of the
/// unstable vertices of each component. Returns the offending matchings.
pub fn unstable_all_or_none(g: &PreferenceInstance, f: &PopularSubgraph, guard: &EnumerationGuard) -> Result<Vec<crate::Matching>> {
    let pop = enumerate_popular(g, guard)?;
    Ok(pop
        .into_par_iter()
        .filter(|m| {
            f.unstable_per_component.iter().any(|us| {
                let matched = us.iter().filter(|&&u| m.is_matched(u)).count();
                matched != 0 && matched != us.len()
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::integral_witness_search;

    fn guard() -> EnumerationGuard {
        EnumerationGuard::default()
    }

    #[test]
    fn unique_popular_matching() {
        // Both sides agree on the pairing, so it is the only popular matching.
        let g = PreferenceInstance::parse("kind: bipartite\na1: b1 b2\na2: b2 b1\nb1: a1 a2\nb2: a2 a1\n").unwrap();
        let f = popular_subgraph(&g, &guard(), false).unwrap();
        assert_eq!(f.edges, BTreeSet::from([(0, 2), (1, 3)]));
        assert_eq!((f.k, f.ell, f.h()), (0, 2, 2));
        assert!(f.components.iter().all(|c| c.len() == 2));
    }

    #[test]
    fn cycle_component_and_singleton() {
        let g = PreferenceInstance::parse(
            "kind: bipartite\na1: b1 b2\na2: b1 b2\na3: b1\nb1: a1 a2 a3\nb2: a2 a1\n",
        )
        .unwrap();
        let f = popular_subgraph(&g, &guard(), false).unwrap();
        let pop = enumerate_popular(&g, &guard()).unwrap();
        let union: BTreeSet<_> = pop.iter().flat_map(|m| m.pairs()).collect();
        assert_eq!(f.edges, union);
        let a3 = g.vertex("a3").unwrap();
        assert_eq!(f.components[f.component_of[a3]], vec![a3]);
        assert!(f.singletons().contains(&f.component_of[a3]));
    }

    #[test]
    fn odd_component_rejected() {
        let g = PreferenceInstance::parse("kind: bipartite\na: b c\nb: a\nc: a\n").unwrap();
        let bad = BTreeSet::from([(0, 1), (0, 2)]);
        assert_eq!(decompose(&g, &bad), Err(Error::OddComponent(3)));
    }

    #[test]
    fn stable_edges_are_popular() {
        let g = PreferenceInstance::parse(
            "kind: bipartite\na1: b1 b2 b3\na2: b2 b3 b1\na3: b3 b1 b2\nb1: a2 a3 a1\nb2: a3 a1 a2\nb3: a1 a2 a3\n",
        )
        .unwrap();
        let s = stable_edges_brute(&g, &guard()).unwrap();
        let p = popular_edges_brute(&g, &guard()).unwrap();
        assert!(s.is_subset(&p));
        let f = decompose(&g, &p).unwrap();
        assert!(f.k >= 1);
        assert!(unstable_all_or_none(&g, &f, &guard()).unwrap().is_empty());
    }

    #[test]
    fn popular_edges_have_equal_witness_parity() {
        let g = PreferenceInstance::parse(
            "kind: bipartite\na1: b1 b2\na2: b1 b2 b3\na3: b2\nb1: a2 a1\nb2: a1 a3 a2\nb3: a2\n",
        )
        .unwrap();
        let f = popular_subgraph(&g, &guard(), false).unwrap();
        for m in enumerate_popular(&g, &guard()).unwrap() {
            let w = integral_witness_search(&g, &m, 64).unwrap().unwrap();
            for &(a, b) in &f.edges {
                assert_eq!(w.alpha[a].is_zero(), w.alpha[b].is_zero());
            }
        }
    }
}
