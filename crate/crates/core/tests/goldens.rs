use std::collections::BTreeSet;

use popmatch::dominant::{build_bidirected, strongly_dominant};
use popmatch::gadgets::{vc_to_roommates, vc_to_weighted_bipartite, PlainGraph};
use popmatch::maxweight::max_weight_popular;
use popmatch::popularity::{enumerate_popular, max_weight_popular_brute, EnumerationGuard};
use popmatch::stable::{irving, irving_lists};
use popmatch::subgraph::popular_subgraph;
use popmatch::witness::{stable_mixed_feasibility, verify_strongly_dominant};
use popmatch::{Matching, PreferenceInstance, Rational};

const FOUR: &str = "kind: roommates\na: b c d\nb: c a d\nc: a b d\nd: a b c\n";
const TRIANGLE: &str = "kind: roommates\na: b c\nb: c a\nc: a b\n";

#[test]
fn four_vertex_instance() {
    let g = PreferenceInstance::parse(FOUR).unwrap();
    assert!(irving(&g).0.is_none());
    let (res, bi, trace) = strongly_dominant(&g);
    let res = res.unwrap();
    assert_eq!(trace.phase1_labels(&bi)[0], ["c-", "d-"]);
    assert_eq!(res.matching, Matching::from_names(&g, &[("a", "d"), ("b", "c")]).unwrap());
    assert!(verify_strongly_dominant(&g, &res.matching, &res.witness).unwrap().ok());
    // The bidirected instance itself is solvable.
    assert!(irving_lists(&build_bidirected(&g)).0.is_some());
    // No fractional stable point either, with odd-set cuts in place.
    assert!(!stable_mixed_feasibility(&g, 10).unwrap());
}

#[test]
fn triangle_has_nothing() {
    let g = PreferenceInstance::parse(TRIANGLE).unwrap();
    assert!(irving(&g).0.is_none());
    assert!(!stable_mixed_feasibility(&g, 10).unwrap());
    // Every matching of the triangle is beaten by some other one.
    assert!(enumerate_popular(&g, &EnumerationGuard::default()).unwrap().is_empty());
}

fn names(g: &PreferenceInstance, vs: &[usize]) -> Vec<String> {
    vs.iter().map(|&u| g.name(u).to_string()).collect()
}

#[test]
fn bipartite_single_edge_gadget_subgraph() {
    let gad = vc_to_weighted_bipartite(&PlainGraph::complete(2));
    let g = &gad.instance;
    assert_eq!(g.n(), 16);
    let f = popular_subgraph(g, &EnumerationGuard::default(), false).unwrap();
    assert_eq!((f.k, f.ell, f.h()), (3, 3, 5));
    let comps: Vec<Vec<String>> = f.components.iter().map(|c| names(g, c)).collect();
    assert_eq!(
        comps,
        [
            vec!["a1", "b1", "a1'", "b1'"],
            vec!["a2", "b2", "a2'", "b2'"],
            vec!["s1-2", "t1-2", "s1-2'", "t1-2'", "s1-2''", "t1-2''"],
            vec!["a0"],
            vec!["b0"],
        ]
    );
    let unstable: Vec<Vec<String>> =
        f.unstable_per_component.iter().map(|u| names(g, &u.iter().copied().collect::<Vec<_>>())).collect();
    assert_eq!(unstable[2], ["s1-2", "t1-2"]);
    assert_eq!(unstable[3], ["a0"]);
    assert_eq!(f.edges.len(), 14);
    let res = max_weight_popular(g, &f, true).unwrap();
    assert_eq!(res.weight, Rational::from(11));
    assert_eq!(Some(res.weight.clone()), max_weight_popular_brute(g, &EnumerationGuard::default()).unwrap().map(|m| m.weight(g)));
}

#[test]
fn roommates_single_edge_gadget() {
    let gad = vc_to_roommates(&PlainGraph::complete(2));
    let g = &gad.instance;
    assert_eq!(g.n(), 10);
    assert_eq!(gad.threshold.at(1), 4);
    let s = irving(g).0.unwrap();
    let expected: BTreeSet<(String, String)> =
        [("a1", "b1"), ("a2", "b2"), ("u1_2", "u2_1")].iter().map(|&(a, b)| (a.into(), b.into())).collect();
    let got: BTreeSet<(String, String)> = s.pairs().iter().map(|&(u, v)| (g.name(u).into(), g.name(v).into())).collect();
    assert_eq!(got, expected);
}
