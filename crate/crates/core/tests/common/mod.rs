#![allow(dead_code)]

use popmatch::{Kind, PreferenceInstance, Rational, Side};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

fn shuffle_lists<R: Rng>(rng: &mut R, adj: &mut [Vec<usize>]) {
    for l in adj.iter_mut() {
        l.shuffle(rng);
    }
}

/// Random roommates instance; `density = 1.0` gives complete lists.
pub fn roommates<R: Rng>(rng: &mut R, n: usize, density: f64) -> PreferenceInstance {
    let mut adj = vec![Vec::new(); n];
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(density) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
    }
    shuffle_lists(rng, &mut adj);
    PreferenceInstance::new(names(n), Kind::Roommates, adj).unwrap()
}

/// Random bipartite instance with `na` vertices on side A followed by `nb` on side B.
pub fn bipartite<R: Rng>(rng: &mut R, na: usize, nb: usize, density: f64) -> PreferenceInstance {
    let n = na + nb;
    let mut adj = vec![Vec::new(); n];
    for a in 0..na {
        for b in na..n {
            if rng.gen_bool(density) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    shuffle_lists(rng, &mut adj);
    let sides = (0..n).map(|u| if u < na { Side::A } else { Side::B }).collect();
    PreferenceInstance::new(names(n), Kind::Bipartite(sides), adj).unwrap()
}

/// Random bipartite instance on at most `max_n` vertices.
pub fn small_bipartite<R: Rng>(rng: &mut R, max_n: usize) -> PreferenceInstance {
    let n = rng.gen_range(2..=max_n);
    let na = rng.gen_range(1..n);
    let density = rng.gen_range(0.3..0.9);
    bipartite(rng, na, n - na, density)
}

/// Weights `p/q` with `q` in 1..=3 and `|p/q| <= bound`.
pub fn rational_weights<R: Rng>(rng: &mut R, g: PreferenceInstance, bound: i64, nonnegative: bool) -> PreferenceInstance {
    let w = (0..g.edges().len())
        .map(|_| {
            let q = rng.gen_range(1..=3);
            let lo = if nonnegative { 0 } else { -bound * q };
            Rational::new(rng.gen_range(lo..=bound * q), q)
        })
        .collect();
    g.with_edge_weights(w).unwrap()
}
