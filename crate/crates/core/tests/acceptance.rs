//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use popmatch::dominant::{strongly_dominant, strongly_dominant_brute};
use popmatch::gadgets::{
    check_bipartite_structure, check_edge_gadgets_matched, verify_reduction, vc_to_roommates, vc_to_weighted_bipartite,
    PlainGraph, Reduction,
};
use popmatch::maxweight::{self, approx2, build_polytope, max_weight_popular, ParityVector};
use popmatch::popularity::{
    delta_by_cost, delta_by_votes, enumerate_matchings, enumerate_maximal_matchings, enumerate_popular, is_popular_brute,
    max_size_popular_all, max_weight_popular_brute, CostM, EnumerationGuard,
};
use popmatch::stable::{gale_shapley, irving};
use popmatch::subgraph::popular_subgraph;
use popmatch::witness::{is_popular_lp, stable_mixed_feasibility, verify_bipartite_witness, verify_strongly_dominant};
use popmatch::{Matching, PreferenceInstance, Rational, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const FOUR: &str = "kind: roommates\na: b c d\nb: c a d\nc: a b d\nd: a b c\n";
const TRIANGLE: &str = "kind: roommates\na: b c\nb: c a\nc: a b\n";

fn ac1() -> Check {
    let g = PreferenceInstance::parse(FOUR).unwrap();
    let (res, bi, trace) = strongly_dominant(&g);
    let phase1 = trace.phase1_labels(&bi);
    let expected: Vec<Vec<String>> = [["c-", "d-"], ["d-", "c+"], ["b-", "a+"], ["a+", "b+"]]
        .iter()
        .map(|r| r.iter().map(|s| s.to_string()).collect())
        .collect();
    ensure(phase1 == expected, || format!("phase-1 lists {phase1:?}"))?;
    let res = res.ok_or("no strongly dominant matching")?;
    let m1 = Matching::from_names(&g, &[("a", "d"), ("b", "c")]).unwrap();
    let m2 = Matching::from_names(&g, &[("a", "c"), ("b", "d")]).unwrap();
    ensure(res.matching == m1 || res.matching == m2, || format!("unexpected {}", res.matching.describe(&g)))?;
    ensure(verify_strongly_dominant(&g, &res.matching, &res.witness).unwrap().ok(), || "witness rejected".into())?;
    ensure(irving(&g).0.is_none(), || "Irving found a stable matching on the original instance".into())?;
    Ok(format!("phase-1 lists match; result {}; no stable matching on G", res.matching.describe(&g)))
}

fn ac2() -> Check {
    let mut r = rng(2);
    let insts: Vec<PreferenceInstance> = (0..1000).map(|_| {
        let n = r.gen_range(1..=6);
        common::roommates(&mut r, n, 1.0)
    }).collect();
    let outcomes: Vec<std::result::Result<bool, String>> = insts
        .par_iter()
        .map(|g| {
            let fast = strongly_dominant(g).0;
            let brute = strongly_dominant_brute(g, 12).map_err(|e| e.to_string())?;
            if fast.is_some() != !brute.is_empty() {
                return Err(format!("existence differs on\n{}", g.to_text()));
            }
            if let Some(res) = &fast {
                if !verify_strongly_dominant(g, &res.matching, &res.witness).unwrap().ok() {
                    return Err(format!("witness rejected on\n{}", g.to_text()));
                }
            }
            Ok(fast.is_some())
        })
        .collect();
    let mut exists = 0;
    for o in outcomes {
        if o? {
            exists += 1;
        }
    }
    Ok(format!("1000 complete-list instances, n <= 6; {exists} have a strongly dominant matching, all agree"))
}

fn big_guard() -> EnumerationGuard {
    EnumerationGuard::new(40, usize::MAX)
}

fn ac3() -> Check {
    let graphs: Vec<PlainGraph> = (1..=4).flat_map(PlainGraph::all_connected).collect();
    let reports: Vec<_> = graphs.par_iter().map(|h| (h, verify_reduction(h, Reduction::Roommates, &big_guard()))).collect();
    for (h, rep) in &reports {
        let rep = rep.as_ref().map_err(|e| e.to_string())?;
        ensure(rep.ok(), || format!("H = {:?} on {} vertices: {:?}", h.edges, h.n, rep.failures))?;
    }
    Ok(format!("{} labelled connected graphs with n_H <= 4; size m + 2n - k and every cover's witness verified", graphs.len()))
}

fn ac4() -> Check {
    let mut lines = Vec::new();
    for h in [PlainGraph::complete(2), PlainGraph::path(3)] {
        let gad = vc_to_weighted_bipartite(&h);
        let g = &gad.instance;
        let guard = big_guard();
        let maximal = enumerate_maximal_matchings(g, &guard).unwrap();
        let flags: Vec<bool> = maximal.par_iter().map(|m| is_popular_lp(g, m).unwrap().popular).collect();
        let popular: Vec<Matching> = maximal.iter().zip(&flags).filter(|(_, &f)| f).map(|(m, _)| m.clone()).collect();
        ensure(popular == enumerate_popular(g, &guard).unwrap(), || "LP and exhaustive popularity disagree".into())?;
        let best = popular.iter().map(|m| m.weight(g)).max().unwrap();
        let k = h.min_vertex_cover().len();
        let target = Rational::from(gad.threshold.at(k));
        ensure(best == target, || format!("max weight {best}, expected {target}"))?;
        for m in &popular {
            check_bipartite_structure(&h, &gad, m).map_err(|e| format!("{}: {e}", m.describe(g)))?;
            if m.weight(g) == best {
                check_edge_gadgets_matched(&gad, m).map_err(|e| format!("{}: {e}", m.describe(g)))?;
            }
        }
        lines.push(format!("n_H={} m_H={}: {} popular of {} maximal, max weight {best}", h.n, h.m(), popular.len(), maximal.len()));
    }
    Ok(lines.join("; "))
}

/// Random bipartite instances on at most `max_n` vertices, with `quota[c]`
/// instances whose popular subgraph has `min(k, 2) = c` large components.
fn stratified(r: &mut ChaCha8Rng, max_n: usize, quota: [usize; 3], nonnegative: bool) -> Vec<PreferenceInstance> {
    let guard = EnumerationGuard::default();
    let mut left = quota;
    let mut out = Vec::new();
    while left.iter().any(|&q| q > 0) {
        let n = r.gen_range(2..=max_n);
        let na = r.gen_range(1..n);
        let d = r.gen_range(0.4..1.0);
        let g = common::bipartite(r, na, n - na, d);
        let c = popular_subgraph(&g, &guard, false).unwrap().k.min(2);
        if left[c] > 0 {
            left[c] -= 1;
            out.push(common::rational_weights(r, g, 5, nonnegative));
        }
    }
    out
}

fn ac5() -> Check {
    let mut r = rng(5);
    let insts = stratified(&mut r, 10, [40, 40, 20], false);
    let guard = EnumerationGuard::default();
    let ks: Vec<std::result::Result<usize, String>> = insts
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let f = popular_subgraph(g, &guard, false).map_err(|e| e.to_string())?;
            let res = max_weight_popular(g, &f, true).map_err(|e| format!("#{i}: {e}"))?;
            let brute = max_weight_popular_brute(g, &guard).unwrap().unwrap();
            if res.weight != brute.weight(g) || res.matching.weight(g) != res.weight {
                return Err(format!("#{i}: exact {} vs brute {}\n{}", res.weight, brute.weight(g), g.to_text()));
            }
            if !is_popular_lp(g, &res.matching).unwrap().popular {
                return Err(format!("#{i}: result not popular"));
            }
            if i < 40 {
                let plain = max_weight_popular(g, &f, false).map_err(|e| format!("#{i} plain: {e}"))?;
                if plain.weight != res.weight {
                    return Err(format!("#{i}: plain {} vs refined {}", plain.weight, res.weight));
                }
            }
            Ok(f.k)
        })
        .collect();
    let mut max_k = 0;
    for k in ks {
        max_k = max_k.max(k?);
    }
    Ok(format!("100 instances (40/40/20 with k = 0/1/2), n <= 10, weights in [-5, 5]; exact equality; largest k = {max_k}"))
}

fn check_point(g: &PreferenceInstance, f: &popmatch::subgraph::PopularSubgraph, spec: &maxweight::PolytopeSpec, pt: &maxweight::FractionalPoint) -> std::result::Result<usize, String> {
    let (_, dec) = maxweight::decompose_table(g, f, pt, &spec.unmatched).map_err(|e| format!("{e} on\n{}", g.to_text()))?;
    let total: Rational = dec.members.iter().map(|m| m.len.clone()).sum();
    ensure(total == Rational::one() && dec.members.iter().all(|m| m.len.is_positive()), || "interval lengths".into())?;
    ensure(dec.reconstruct(g) == pt.x, || format!("reconstruction differs on\n{}", g.to_text()))?;
    for m in &dec.members {
        ensure(is_popular_lp(g, &m.matching).unwrap().popular, || format!("{} not popular", m.matching.describe(g)))?;
        ensure(verify_bipartite_witness(g, &m.matching, &m.witness()).unwrap().ok(), || "witness rejected".into())?;
        let cost = CostM::new(g, &m.matching);
        for &(a, b) in g.edges() {
            let lhs = (m.alpha[a] + m.alpha[b]) as i64;
            ensure(lhs >= cost.edge(g, a, b) as i64, || format!("covering fails on ({a}, {b})"))?;
        }
    }
    Ok(dec.members.len())
}

fn combine(points: &[maxweight::FractionalPoint], lambda: &[Rational]) -> maxweight::FractionalPoint {
    let mix = |get: &dyn Fn(&maxweight::FractionalPoint) -> &Vec<Rational>| -> Vec<Rational> {
        (0..get(&points[0]).len()).map(|i| points.iter().zip(lambda).map(|(p, l)| &get(p)[i] * l).sum()).collect()
    };
    maxweight::FractionalPoint { x: mix(&|p| &p.x), alpha: mix(&|p| &p.alpha), p: mix(&|p| &p.p), objective: Rational::zero() }
}

fn ac6() -> Check {
    let mut r = rng(6);
    let insts = stratified(&mut r, 9, [5, 25, 10], false);
    let (mut vertices, mut mixes, mut fractional, mut fractional_p, mut members) = (0usize, 0usize, 0usize, 0usize, 0usize);
    for g in &insts {
        let f = popular_subgraph(g, &EnumerationGuard::default(), false).unwrap();
        for bits in 0..(1usize << f.k) {
            let mut found = Vec::new();
            let mut spec_keep = None;
            for _ in 0..3 {
                let mut spec = build_polytope(g, &f, &ParityVector::from_index(bits, f.k), true).unwrap();
                let obj = (0..spec.lp.num_vars()).map(|j| (j, Rational::new(r.gen_range(-6..=6), r.gen_range(1..=3)))).collect();
                spec.lp.set_objective(obj);
                let Some((spec, pt)) = maxweight::polytope::solve_spec(spec).unwrap() else { break };
                vertices += 1;
                members += check_point(g, &f, &spec, &pt)?;
                found.push(pt);
                spec_keep = Some(spec);
            }
            let Some(spec) = spec_keep else { continue };
            for _ in 0..2 {
                let raw: Vec<i64> = (0..found.len()).map(|_| r.gen_range(1..=5)).collect();
                let sum: i64 = raw.iter().sum();
                let lambda: Vec<Rational> = raw.iter().map(|&w| Rational::new(w, sum)).collect();
                let pt = combine(&found, &lambda);
                ensure(spec.lp.is_feasible(&spec.values_of(g, &pt)), || "convex combination left the polytope".into())?;
                mixes += 1;
                if pt.x.iter().any(|x| !x.is_integer()) {
                    fractional += 1;
                }
                if f.size2().any(|i| !pt.p[i].is_integer()) {
                    fractional_p += 1;
                }
                members += check_point(g, &f, &spec, &pt)?;
            }
        }
    }
    ensure(vertices >= 50, || format!("only {vertices} LP vertices"))?;
    ensure(fractional > 0 && fractional_p > 0, || "no fractional points were exercised".into())?;
    Ok(format!("{vertices} LP vertices and {mixes} convex combinations ({fractional} fractional in x, {fractional_p} in p); {members} sweep members verified"))
}

fn ac7() -> Check {
    let mut r = rng(7);
    let insts = stratified(&mut r, 10, [80, 80, 40], true);
    let guard = EnumerationGuard::default();
    let out: Vec<std::result::Result<bool, String>> = insts
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let f = popular_subgraph(g, &guard, false).unwrap();
            let a = approx2(g, &f).map_err(|e| format!("#{i}: {e}"))?;
            let opt = max_weight_popular_brute(g, &guard).unwrap().unwrap().weight(g);
            if &a.weight * &Rational::from(2) < opt {
                return Err(format!("#{i}: approx {} vs opt {opt}", a.weight));
            }
            if !is_popular_lp(g, &a.matching).unwrap().popular {
                return Err(format!("#{i}: output not popular"));
            }
            Ok(a.weight == opt)
        })
        .collect();
    let mut exact = 0;
    for o in out {
        if o? {
            exact += 1;
        }
    }
    Ok(format!("200 instances, n <= 10; bound holds everywhere, optimal on {exact}"))
}

fn ac8() -> Check {
    let mut r = rng(8);
    let insts: Vec<PreferenceInstance> = (0..100)
        .map(|i| {
            let n = r.gen_range(2..=8);
            if i % 2 == 0 {
                let na = r.gen_range(1..n);
                { let d = r.gen_range(0.3..1.0); common::bipartite(&mut r, na, n - na, d) }
            } else {
                { let d = r.gen_range(0.3..1.0); common::roommates(&mut r, n, d) }
            }
        })
        .collect();
    let guard = EnumerationGuard::default();
    let res: Vec<std::result::Result<usize, String>> = insts
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let all = enumerate_matchings(g, &guard).map_err(|e| e.to_string())?;
            let mut pairs = 0;
            for n in &all {
                for m in &all {
                    if delta_by_votes(g, n, m) != delta_by_cost(g, n, m) {
                        return Err(format!("#{i}: identity fails for {} vs {}", n.describe(g), m.describe(g)));
                    }
                    pairs += 1;
                }
            }
            let mut stable = Vec::new();
            if g.is_bipartite() {
                stable.push(gale_shapley(g, Side::A).unwrap());
                stable.push(gale_shapley(g, Side::B).unwrap());
            }
            stable.extend(irving(g).0);
            for s in &stable {
                if !is_popular_brute(g, s, &guard).unwrap() {
                    return Err(format!("#{i}: stable {} fails brute popularity", s.describe(g)));
                }
                if g.is_bipartite() && !is_popular_lp(g, s).unwrap().popular {
                    return Err(format!("#{i}: stable {} fails LP popularity", s.describe(g)));
                }
            }
            if g.is_bipartite() {
                let max_card = all.iter().map(|m| m.len()).max().unwrap_or(0);
                let best = max_size_popular_all(g, &guard).unwrap()[0].len();
                if 3 * best < 2 * max_card {
                    return Err(format!("#{i}: max popular {best} vs max matching {max_card}"));
                }
            }
            Ok(pairs)
        })
        .collect();
    let mut pairs = 0;
    for p in res {
        pairs += p?;
    }
    Ok(format!("100 instances, n <= 8; identity on {pairs} pairs; stable outputs popular; 2/3 bound holds"))
}

fn ac9() -> Check {
    let gad = vc_to_roommates(&PlainGraph::complete(2));
    let g = &gad.instance;
    ensure(g.n() == 10, || format!("{} vertices", g.n()))?;
    let best = max_size_popular_all(g, &EnumerationGuard::default()).unwrap();
    ensure(best.len() == 2, || format!("{} max-size popular matchings", best.len()))?;
    ensure(best.iter().all(|m| m.len() == 4), || "sizes differ from 4".into())?;
    let (v0, v1) = (best[0].matched_vertices(), best[1].matched_vertices());
    ensure(v0 != v1, || "same matched vertex set".into())?;
    let diff: BTreeSet<_> = v0.symmetric_difference(&v1).map(|&u| g.name(u).to_string()).collect();
    Ok(format!("{} and {}; matched sets differ on {diff:?}", best[0].describe(g), best[1].describe(g)))
}

fn ac10() -> Check {
    let tri = PreferenceInstance::parse(TRIANGLE).unwrap();
    ensure(!stable_mixed_feasibility(&tri, 24).unwrap(), || "triangle reported feasible".into())?;
    let mut r = rng(10);
    let mut corpus = Vec::new();
    for i in 0..300 {
        let n = r.gen_range(1..=8);
        corpus.push(if i % 3 == 0 {
            let na = r.gen_range(0..=n);
            { let d = r.gen_range(0.3..1.0); common::bipartite(&mut r, na, n - na, d) }
        } else {
            { let d = r.gen_range(0.3..1.0); common::roommates(&mut r, n, d) }
        });
    }
    let (mut with_stable, mut without) = (0, 0);
    for g in &corpus {
        if irving(g).0.is_some() {
            with_stable += 1;
            ensure(stable_mixed_feasibility(g, 24).unwrap(), || format!("infeasible despite a stable matching:\n{}", g.to_text()))?;
        } else {
            without += 1;
        }
    }
    Ok(format!("triangle infeasible; {with_stable} corpus instances with a stable matching all feasible ({without} without one skipped)"))
}

fn main() {
    let criteria: [(&str, fn() -> Check, u64); 10] = [
        ("AC1 four-vertex golden", ac1, 1),
        ("AC2 strongly dominant vs exhaustive", ac2, 600),
        ("AC3 roommates reduction", ac3, 600),
        ("AC4 bipartite reduction", ac4, 1800),
        ("AC5 exact max-weight vs brute", ac5, 1800),
        ("AC6 table-sweep decomposition", ac6, 900),
        ("AC7 2-approximation", ac7, 900),
        ("AC8 popularity infrastructure", ac8, 900),
        ("AC9 two max-size popular matchings", ac9, 60),
        ("AC10 mixed stable feasibility", ac10, 60),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        let out = match out {
            Ok(_) if took > Duration::from_secs(limit) => Err(format!("took {took:.2?}, limit {limit}s")),
            o => o,
        };
        match out {
            Ok(d) => println!("PASS {name} [{took:.2?}]: {d}"),
            Err(e) => {
                failed += 1;
                println!("FAIL {name} [{took:.2?}]: {e}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
