//! Instances built from a vertex-cover instance `H`, in which the size (or
//! weight) of the best popular matching encodes the minimum cover of `H`.
//!
//! Vertices of `H` are `0..n` internally and labelled `1..=n` in names,
//! edge lists and error messages.

use std::collections::{BTreeSet, HashMap};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::instance::{Kind, Matching, PreferenceInstance, Side, Vertex};
use crate::popularity::{max_size_popular_all, max_weight_popular_brute, EnumerationGuard};
use crate::rational::Rational;
use crate::witness::{is_popular_lp, verify_bipartite_witness, verify_roommates_witness, BipartiteWitness, RoommatesWitness};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainGraph {
    pub n: usize,
    /// Sorted, `u < v`, no duplicates.
    pub edges: Vec<(usize, usize)>,
}

impl PlainGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut es = BTreeSet::new();
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidMatching(format!("bad edge ({}, {})", u + 1, v + 1)));
            }
            es.insert((u.min(v), u.max(v)));
        }
        Ok(Self { n, edges: es.into_iter().collect() })
    }

    /// One `u v` pair per line with labels starting at 1. A line with a
    /// single label declares a vertex. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = 0;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |m: &str| Error::Syntax { line: i + 1, message: m.to_string() };
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().ok().filter(|&x| x >= 1).ok_or_else(|| syntax("expected a positive vertex label")))
                .collect::<Result<_>>()?;
            match nums.as_slice() {
                [u] => n = n.max(*u),
                [u, v] if u != v => {
                    n = n.max(*u).max(*v);
                    edges.push((u - 1, v - 1));
                }
                [_, _] => return Err(syntax("self-loop")),
                _ => return Err(syntax("expected `u v` or `u`")),
            }
        }
        Self::new(n, &edges)
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
        Self::new(n, &edges).unwrap()
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::new(n, &edges).unwrap()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == u && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Every connected graph on vertex set `0..n` (labelled, not up to isomorphism).
    pub fn all_connected(n: usize) -> Vec<Self> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
        (0u32..(1 << pairs.len()))
            .map(|mask| {
                let es: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
                Self::new(n, &es).unwrap()
            })
            .filter(|g| g.is_connected())
            .collect()
    }

    pub fn is_cover(&self, u: &BTreeSet<usize>) -> Result<()> {
        for &(a, b) in &self.edges {
            if !u.contains(&a) && !u.contains(&b) {
                return Err(Error::NotACover(a + 1, b + 1));
            }
        }
        Ok(())
    }

    /// All vertex covers, smallest first.
    pub fn vertex_covers(&self) -> Vec<BTreeSet<usize>> {
        let mut out: Vec<BTreeSet<usize>> = (0u64..(1 << self.n))
            .map(|mask| (0..self.n).filter(|i| mask >> i & 1 == 1).collect::<BTreeSet<_>>())
            .filter(|u| self.is_cover(u).is_ok())
            .collect();
        out.sort_by_key(|u| (u.len(), u.iter().copied().collect::<Vec<_>>()));
        out
    }

    pub fn min_vertex_cover(&self) -> BTreeSet<usize> {
        self.vertex_covers().into_iter().next().expect("the full vertex set is a cover")
    }
}

/// `threshold(k) = base - per_k * k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Threshold {
    pub base: i64,
    pub per_k: i64,
}

impl Threshold {
    pub fn at(&self, k: usize) -> i64 {
        self.base - self.per_k * k as i64
    }
}

#[derive(Clone, Debug)]
pub struct GadgetOutput {
    pub instance: PreferenceInstance,
    pub threshold: Threshold,
    /// Gadget vertices owned by each vertex of `H`.
    pub vertex_map: Vec<Vec<Vertex>>,
    /// Gadget vertices owned by each edge of `H`.
    pub edge_map: Vec<Vec<Vertex>>,
    /// Extra vertices owned by neither (`a0`, `b0`).
    pub extra: Vec<Vertex>,
}

impl GadgetOutput {
    pub fn v(&self, name: &str) -> Vertex {
        self.instance.vertex(name).unwrap_or_else(|| panic!("no gadget vertex `{name}`"))
    }

    pub fn to_json(&self) -> Value {
        let g = &self.instance;
        let names = |vs: &Vec<Vertex>| vs.iter().map(|&u| g.name(u).to_string()).collect::<Vec<_>>();
        json!({
            "instance": g.to_text(),
            "threshold": {"base": self.threshold.base, "per_k": self.threshold.per_k},
            "vertex_map": self.vertex_map.iter().map(names).collect::<Vec<_>>(),
            "edge_map": self.edge_map.iter().map(names).collect::<Vec<_>>(),
        })
    }
}

struct Builder {
    names: Vec<String>,
    index: HashMap<String, usize>,
    sides: Vec<Side>,
    lists: Vec<Vec<String>>,
}

impl Builder {
    fn new() -> Self {
        Self { names: Vec::new(), index: HashMap::new(), sides: Vec::new(), lists: Vec::new() }
    }

    fn add(&mut self, name: String, side: Side) -> usize {
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        self.sides.push(side);
        self.lists.push(Vec::new());
        id
    }

    fn list(&mut self, name: &str, prefs: Vec<String>) {
        let id = self.index[name];
        self.lists[id] = prefs;
    }

    fn build(self, bipartite: bool) -> Result<PreferenceInstance> {
        let prefs = self.lists.iter().map(|l| l.iter().map(|x| self.index[x]).collect()).collect();
        let kind = if bipartite { Kind::Bipartite(self.sides) } else { Kind::Roommates };
        PreferenceInstance::new(self.names, kind, prefs)
    }
}

fn ue(i: usize, j: usize) -> String {
    // u^e_i for e = {i, j}
    format!("u{}_{}", i + 1, j + 1)
}

/// Roommates gadget: `a_i, b_i, c_i, d_i` per vertex and `u^e_i, u^e_j`
/// per edge. Threshold `m + 2n - k` on the popular matching size.
pub fn vc_to_roommates(h: &PlainGraph) -> GadgetOutput {
    let mut bld = Builder::new();
    let mut vertex_map = Vec::new();
    for i in 1..=h.n {
        vertex_map.push(["a", "b", "c", "d"].iter().map(|p| bld.add(format!("{p}{i}"), Side::A)).collect());
    }
    let mut edge_map = Vec::new();
    for &(i, j) in &h.edges {
        edge_map.push(vec![bld.add(ue(i, j), Side::A), bld.add(ue(j, i), Side::A)]);
    }
    for i in 0..h.n {
        let l = i + 1;
        let (a, b, c, d) = (format!("a{l}"), format!("b{l}"), format!("c{l}"), format!("d{l}"));
        let mut bl = vec![a.clone()];
        for &(x, y) in &h.edges {
            if x == i {
                bl.push(ue(i, y));
            } else if y == i {
                bl.push(ue(i, x));
            }
        }
        bl.push(c.clone());
        bld.list(&a, vec![b.clone(), c.clone(), d.clone()]);
        bld.list(&b, bl);
        bld.list(&c, vec![a.clone(), b.clone()]);
        bld.list(&d, vec![a]);
    }
    for &(i, j) in &h.edges {
        bld.list(&ue(i, j), vec![ue(j, i), format!("b{}", i + 1)]);
        bld.list(&ue(j, i), vec![ue(i, j), format!("b{}", j + 1)]);
    }
    let instance = bld.build(false).expect("roommates gadget is well formed");
    GadgetOutput {
        instance,
        threshold: Threshold { base: (h.m() + 2 * h.n) as i64, per_k: 1 },
        vertex_map,
        edge_map,
        extra: Vec::new(),
    }
}

fn d_names(i: usize, j: usize) -> [String; 6] {
    let e = format!("{}-{}", i + 1, j + 1);
    [format!("s{e}"), format!("t{e}"), format!("s{e}'"), format!("t{e}'"), format!("s{e}''"), format!("t{e}''")]
}

/// Weighted bipartite gadget: `C_i` on `a_i, b_i, a_i', b_i'`, `D_e` on six
/// vertices per edge, plus `a0` and `b0`. Threshold `5m + 4n - 2k` on the
/// popular matching weight.
pub fn vc_to_weighted_bipartite(h: &PlainGraph) -> GadgetOutput {
    let mut bld = Builder::new();
    let extra = vec![bld.add("a0".into(), Side::A), bld.add("b0".into(), Side::B)];
    let mut vertex_map = Vec::new();
    for i in 1..=h.n {
        vertex_map.push(vec![
            bld.add(format!("a{i}"), Side::A),
            bld.add(format!("b{i}"), Side::B),
            bld.add(format!("a{i}'"), Side::A),
            bld.add(format!("b{i}'"), Side::B),
        ]);
    }
    let mut edge_map = Vec::new();
    for &(i, j) in &h.edges {
        let ns = d_names(i, j);
        let sides = [Side::A, Side::B, Side::A, Side::B, Side::A, Side::B];
        edge_map.push(ns.iter().zip(sides).map(|(n, s)| bld.add(n.clone(), s)).collect());
    }
    bld.list("a0", (1..=h.n).map(|i| format!("b{i}")).collect());
    bld.list("b0", (1..=h.n).map(|i| format!("a{i}")).collect());
    for i in 0..h.n {
        let l = i + 1;
        let (a, b, ap, bp) = (format!("a{l}"), format!("b{l}"), format!("a{l}'"), format!("b{l}'"));
        let mut al = vec![b.clone(), bp.clone(), "b0".to_string()];
        let mut bl = vec![a.clone(), ap.clone(), "a0".to_string()];
        for &(x, y) in &h.edges {
            let ns = d_names(x, y);
            if x == i {
                al.push(ns[1].clone());
            }
            if y == i {
                bl.push(ns[0].clone());
            }
        }
        bld.list(&a, al);
        bld.list(&b, bl);
        bld.list(&ap, vec![b.clone(), bp.clone()]);
        bld.list(&bp, vec![a, ap]);
    }
    for &(i, j) in &h.edges {
        let [s, t, s1, t1, s2, t2] = d_names(i, j);
        bld.list(&s1, vec![t1.clone(), t.clone()]);
        bld.list(&s2, vec![t2.clone(), t.clone()]);
        bld.list(&s, vec![t1.clone(), format!("b{}", j + 1), t2.clone()]);
        bld.list(&t1, vec![s1.clone(), s.clone()]);
        bld.list(&t2, vec![s2.clone(), s.clone()]);
        bld.list(&t, vec![s2, format!("a{}", i + 1), s1]);
    }
    let g = bld.build(true).expect("bipartite gadget is well formed");
    let mut heavy = Vec::new();
    for i in 1..=h.n {
        heavy.push((format!("a{i}"), format!("b{i}")));
        heavy.push((format!("a{i}'"), format!("b{i}'")));
    }
    for &(i, j) in &h.edges {
        let [s, t, s1, t1, s2, t2] = d_names(i, j);
        heavy.extend([(s.clone(), t1), (s, t2), (s1, t.clone()), (s2, t)]);
    }
    let heavy: BTreeSet<(Vertex, Vertex)> = heavy
        .iter()
        .map(|(x, y)| {
            let (u, v) = (g.vertex(x).unwrap(), g.vertex(y).unwrap());
            (u.min(v), u.max(v))
        })
        .collect();
    let w = g.edges().iter().map(|e| Rational::from(if heavy.contains(e) { 2 } else { 1 })).collect();
    let instance = g.with_edge_weights(w).expect("one weight per edge");
    GadgetOutput {
        instance,
        threshold: Threshold { base: (5 * h.m() + 4 * h.n) as i64, per_k: 2 },
        vertex_map,
        edge_map,
        extra,
    }
}

fn pairs_by_name(gad: &GadgetOutput, pairs: &[(String, String)]) -> Result<Matching> {
    let ids: Vec<_> = pairs.iter().map(|(a, b)| (gad.v(a), gad.v(b))).collect();
    Matching::from_pairs(&gad.instance, &ids)
}

/// The popular matching of size `m + 2n - |U|` built from a vertex cover `U`, with its witness.
pub fn popular_from_cover_roommates(h: &PlainGraph, u: &BTreeSet<usize>) -> Result<(Matching, RoommatesWitness)> {
    h.is_cover(u)?;
    let gad = vc_to_roommates(h);
    let mut pairs = Vec::new();
    let mut alpha = vec![Rational::zero(); gad.instance.n()];
    let mut z = Vec::new();
    let set = |name: &str, a: i64, alpha: &mut Vec<Rational>| alpha[gad.v(name)] = Rational::from(a);
    for i in 0..h.n {
        let l = i + 1;
        let (a, b, c, d) = (format!("a{l}"), format!("b{l}"), format!("c{l}"), format!("d{l}"));
        if u.contains(&i) {
            pairs.push((a, b));
        } else {
            set(&a, 1, &mut alpha);
            for x in [&b, &c, &d] {
                set(x, -1, &mut alpha);
            }
            let mut s = vec![gad.v(&a), gad.v(&b), gad.v(&c)];
            s.sort();
            z.push((s, Rational::from(2)));
            pairs.push((a, d));
            pairs.push((b, c));
        }
    }
    for &(i, j) in &h.edges {
        pairs.push((ue(i, j), ue(j, i)));
        let s = if u.contains(&i) { 1 } else { -1 };
        set(&ue(i, j), -s, &mut alpha);
        set(&ue(j, i), s, &mut alpha);
    }
    z.sort();
    Ok((pairs_by_name(&gad, &pairs)?, RoommatesWitness { alpha, z }))
}

/// The popular matching of weight `5m + 4n - 2|U|` built from a cover `U`, with its witness.
pub fn popular_from_cover_bipartite(h: &PlainGraph, u: &BTreeSet<usize>) -> Result<(Matching, BipartiteWitness)> {
    h.is_cover(u)?;
    let gad = vc_to_weighted_bipartite(h);
    let mut pairs = Vec::new();
    let mut alpha = vec![Rational::zero(); gad.instance.n()];
    let set = |name: &str, a: i64, alpha: &mut Vec<Rational>| alpha[gad.v(name)] = Rational::from(a);
    for i in 0..h.n {
        let l = i + 1;
        let (a, b, ap, bp) = (format!("a{l}"), format!("b{l}"), format!("a{l}'"), format!("b{l}'"));
        if u.contains(&i) {
            set(&a, 1, &mut alpha);
            set(&b, 1, &mut alpha);
            set(&ap, -1, &mut alpha);
            set(&bp, -1, &mut alpha);
            pairs.push((a, bp));
            pairs.push((ap, b));
        } else {
            pairs.push((a, b));
            pairs.push((ap, bp));
        }
    }
    for &(i, j) in &h.edges {
        let [s, t, s1, t1, s2, t2] = d_names(i, j);
        let signs = if u.contains(&i) {
            pairs.extend([(s.clone(), t1.clone()), (s1.clone(), t.clone()), (s2.clone(), t2.clone())]);
            [-1, -1, 1, 1, 1, -1]
        } else {
            pairs.extend([(s.clone(), t2.clone()), (s1.clone(), t1.clone()), (s2.clone(), t.clone())]);
            [-1, -1, -1, 1, 1, 1]
        };
        for (name, a) in [s, t, s1, t1, s2, t2].iter().zip(signs) {
            set(name, a, &mut alpha);
        }
    }
    Ok((pairs_by_name(&gad, &pairs)?, BipartiteWitness { alpha }))
}

/// Each vertex gadget uses either `(a_i, b_i)` or both `(a_i, d_i)` and
/// `(b_i, c_i)`; the indices of the first kind form a vertex cover.
pub fn check_roommates_structure(h: &PlainGraph, gad: &GadgetOutput, m: &Matching) -> std::result::Result<(), String> {
    let mut cover = BTreeSet::new();
    for i in 0..h.n {
        let [a, b, c, d] = [0, 1, 2, 3].map(|k| gad.vertex_map[i][k]);
        if m.contains(a, b) {
            cover.insert(i);
        } else if !(m.contains(a, d) && m.contains(b, c)) {
            return Err(format!("vertex gadget {} is neither (a,b) nor (a,d),(b,c)", i + 1));
        }
    }
    h.is_cover(&cover).map_err(|e| e.to_string())
}

/// `a0` and `b0` unmatched, and each `C_i` matched either straight or crossed.
pub fn check_bipartite_structure(h: &PlainGraph, gad: &GadgetOutput, m: &Matching) -> std::result::Result<(), String> {
    for &x in &gad.extra {
        if m.is_matched(x) {
            return Err(format!("{} is matched", gad.instance.name(x)));
        }
    }
    for i in 0..h.n {
        let [a, b, ap, bp] = [0, 1, 2, 3].map(|k| gad.vertex_map[i][k]);
        let straight = m.contains(a, b) && m.contains(ap, bp);
        let crossed = m.contains(a, bp) && m.contains(ap, b);
        if !straight && !crossed {
            return Err(format!("C_{} is neither straight nor crossed", i + 1));
        }
    }
    Ok(())
}

/// `s_e` and `t_e` are matched for every edge.
pub fn check_edge_gadgets_matched(gad: &GadgetOutput, m: &Matching) -> std::result::Result<(), String> {
    for vs in &gad.edge_map {
        for &x in &vs[..2] {
            if !m.is_matched(x) {
                return Err(format!("{} is unmatched", gad.instance.name(x)));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    Roommates,
    Bipartite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub min_cover: usize,
    /// Max size (roommates) or max weight (bipartite) of a popular matching.
    pub optimum: Rational,
    /// `(k, has cover of size k, has popular matching reaching threshold(k))`.
    pub per_k: Vec<(usize, bool, bool)>,
    pub covers_checked: usize,
    pub failures: Vec<String>,
}

impl ReductionReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "min_cover": self.min_cover,
            "optimum": self.optimum.to_fraction_string(),
            "per_k": self.per_k.iter().map(|&(k, c, p)| json!({"k": k, "cover": c, "popular": p})).collect::<Vec<_>>(),
            "covers_checked": self.covers_checked,
            "failures": self.failures,
        })
    }
}

/// Brute-force check of the cover/popular-matching equivalence at every `k`,
/// plus verification of the witness built from every vertex cover.
pub fn verify_reduction(h: &PlainGraph, which: Reduction, guard: &EnumerationGuard) -> Result<ReductionReport> {
    match which {
        Reduction::Roommates if h.n > 4 => return Err(Error::GuardExceeded(format!("n_H = {} > 4", h.n))),
        Reduction::Bipartite if h.m() > 2 => return Err(Error::GuardExceeded(format!("m_H = {} > 2", h.m()))),
        _ => {}
    }
    let covers = h.vertex_covers();
    let min_cover = covers[0].len();
    let mut failures = Vec::new();
    let (gad, optimum) = match which {
        Reduction::Roommates => {
            let gad = vc_to_roommates(h);
            let best = max_size_popular_all(&gad.instance, guard)?;
            let size = best.first().map_or(0, |m| m.len());
            for m in &best {
                if let Err(e) = check_roommates_structure(h, &gad, m) {
                    failures.push(format!("{}: {e}", m.describe(&gad.instance)));
                }
            }
            (gad, Rational::from(size))
        }
        Reduction::Bipartite => {
            let gad = vc_to_weighted_bipartite(h);
            let best = max_weight_popular_brute(&gad.instance, guard)?.expect("bipartite instances have popular matchings");
            if !is_popular_lp(&gad.instance, &best)?.popular {
                failures.push("brute optimum fails the LP popularity test".into());
            }
            let w = best.weight(&gad.instance);
            (gad, w)
        }
    };
    let mut per_k = Vec::new();
    for k in 1..=h.n {
        let has_cover = min_cover <= k;
        let reaches = optimum >= Rational::from(gad.threshold.at(k));
        if has_cover != reaches {
            failures.push(format!("k = {k}: cover {has_cover}, popular {reaches}"));
        }
        per_k.push((k, has_cover, reaches));
    }
    if optimum != Rational::from(gad.threshold.at(min_cover)) {
        failures.push(format!("optimum {optimum} differs from threshold {}", gad.threshold.at(min_cover)));
    }
    for u in &covers {
        let label = format!("{:?}", u.iter().map(|i| i + 1).collect::<Vec<_>>());
        let (ok, value) = match which {
            Reduction::Roommates => {
                let (m, w) = popular_from_cover_roommates(h, u)?;
                (verify_roommates_witness(&gad.instance, &m, &w)?.ok(), m.len() as i64)
            }
            Reduction::Bipartite => {
                let (m, w) = popular_from_cover_bipartite(h, u)?;
                let v = m.weight(&gad.instance);
                (verify_bipartite_witness(&gad.instance, &m, &w)?.ok(), v.to_i64().unwrap_or(-1))
            }
        };
        if !ok {
            failures.push(format!("cover {label}: witness rejected"));
        }
        if value != gad.threshold.at(u.len()) {
            failures.push(format!("cover {label}: value {value}"));
        }
    }
    Ok(ReductionReport { min_cover, optimum, per_k, covers_checked: covers.len(), failures })
}
