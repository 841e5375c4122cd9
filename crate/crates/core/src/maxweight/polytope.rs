//! Extended formulation of the convex hull of popular matchings whose
//! witnesses have prescribed parity on each component of the popular
//! subgraph.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::instance::{PreferenceInstance, Vertex};
use crate::lp::{self, RationalLinearProgram, Sense};
use crate::rational::Rational;
use crate::subgraph::PopularSubgraph;

/// Parity of one component inside a formulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Fixed(u8),
    /// Size-2 component in the refined formulation; holds the index of its `p` variable.
    Free(usize),
}

/// Bits for the first `k` components (refined) or the first `ell` (plain).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParityVector(pub Vec<u8>);

impl ParityVector {
    pub fn from_index(bits: usize, len: usize) -> Self {
        Self((0..len).map(|i| (bits >> i & 1) as u8).collect())
    }

    pub fn all(value: u8, len: usize) -> Self {
        Self(vec![value; len])
    }

    pub fn to_string_bits(&self) -> String {
        self.0.iter().map(|b| char::from(b'0' + b)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct PolytopeSpec {
    pub lp: RationalLinearProgram,
    pub refined: bool,
    pub r: ParityVector,
    /// One entry per component.
    pub parity: Vec<Parity>,
    /// Variable index of `x_e`, indexed like `g.edges()`.
    pub x_edge: Vec<usize>,
    pub x_loop: Vec<usize>,
    pub alpha: Vec<usize>,
    /// Unstable vertices of parity-0 components; left unmatched.
    pub unmatched: BTreeSet<Vertex>,
}

/// A point of the formulation, restricted to the named coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalPoint {
    /// Indexed like `g.edges()`.
    pub x: Vec<Rational>,
    pub alpha: Vec<Rational>,
    /// Parity value per component: `r_i`, or the value of `p_i`.
    pub p: Vec<Rational>,
    pub objective: Rational,
}

impl PolytopeSpec {
    pub fn point(&self, values: &[Rational], objective: Rational) -> FractionalPoint {
        FractionalPoint {
            x: self.x_edge.iter().map(|&j| values[j].clone()).collect(),
            alpha: self.alpha.iter().map(|&j| values[j].clone()).collect(),
            p: self
                .parity
                .iter()
                .map(|p| match *p {
                    Parity::Fixed(b) => Rational::from(b as i64),
                    Parity::Free(j) => values[j].clone(),
                })
                .collect(),
            objective,
        }
    }

    /// Inverse of [`PolytopeSpec::point`]; loops are recovered from the degree rows.
    pub fn values_of(&self, g: &PreferenceInstance, pt: &FractionalPoint) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.lp.num_vars()];
        for (k, &j) in self.x_edge.iter().enumerate() {
            v[j] = pt.x[k].clone();
        }
        for u in 0..g.n() {
            v[self.alpha[u]] = pt.alpha[u].clone();
            v[self.x_loop[u]] = if self.unmatched.contains(&u) { Rational::one() } else { Rational::zero() };
        }
        for (i, p) in self.parity.iter().enumerate() {
            if let Parity::Free(j) = *p {
                v[j] = pt.p[i].clone();
            }
        }
        v
    }
}

type Linear = Vec<(usize, Rational)>;

fn push(row: &mut Linear, j: usize, c: i64) {
    row.push((j, Rational::from(c)));
}

/// `cost_x(a, b)` as a linear form: at each endpoint, partners it prefers
/// to the other endpoint count `-1`, worse ones `+1`, and the self-loop is
/// the worst entry of every list.
fn cost_terms(g: &PreferenceInstance, x_edge: &[usize], x_loop: &[usize], a: Vertex, b: Vertex) -> Linear {
    let mut row = Vec::new();
    for (u, v) in [(a, b), (b, a)] {
        for &w in g.prefs(u) {
            if w == v {
                continue;
            }
            let j = x_edge[g.edge_id(u, w).unwrap()];
            push(&mut row, j, if g.prefers(u, w, v) { -1 } else { 1 });
        }
        push(&mut row, x_loop[u], 1);
    }
    row
}

pub fn build_polytope(g: &PreferenceInstance, f: &PopularSubgraph, r: &ParityVector, refined: bool) -> Result<PolytopeSpec> {
    g.require_bipartite()?;
    let expected = if refined { f.k } else { f.ell };
    if r.0.len() != expected {
        return Err(Error::ParityLength { expected, got: r.0.len() });
    }
    let n = g.n();
    let zero = Rational::zero;
    let one = Rational::one;
    let mut lp = RationalLinearProgram::new(true);

    let mut parity = Vec::with_capacity(f.h());
    for i in 0..f.h() {
        parity.push(if i < r.0.len() {
            Parity::Fixed(r.0[i])
        } else if refined && i < f.ell {
            Parity::Free(lp.add_var(format!("p[{i}]"), Some(zero()), Some(one())))
        } else {
            Parity::Fixed(0)
        });
    }
    let mut unmatched = BTreeSet::new();
    for (i, us) in f.unstable_per_component.iter().enumerate() {
        if parity[i] == Parity::Fixed(0) {
            unmatched.extend(us.iter().copied());
        }
    }

    let x_edge: Vec<usize> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let name = format!("x[{},{}]", g.name(u), g.name(v));
            if f.contains(u, v) {
                lp.add_var(name, Some(zero()), None)
            } else {
                lp.add_var(name, Some(zero()), Some(zero()))
            }
        })
        .collect();
    let x_loop: Vec<usize> = (0..n)
        .map(|u| {
            let c = if unmatched.contains(&u) { one() } else { zero() };
            lp.add_var(format!("x[{0},{0}]", g.name(u)), Some(c.clone()), Some(c))
        })
        .collect();
    let alpha: Vec<usize> = (0..n)
        .map(|u| match parity[f.component_of[u]] {
            Parity::Fixed(b) => {
                let b = Rational::from(b as i64);
                lp.add_var(format!("alpha[{}]", g.name(u)), Some(-b.clone()), Some(b))
            }
            Parity::Free(_) => lp.add_var(format!("alpha[{}]", g.name(u)), Some(-one()), Some(one())),
        })
        .collect();

    for &(a, b) in g.edges() {
        let mut base = vec![(alpha[a], one()), (alpha[b], one())];
        for (j, c) in cost_terms(g, &x_edge, &x_loop, a, b) {
            base.push((j, -c));
        }
        let label = format!("{},{}", g.name(a), g.name(b));
        let (ci, cj) = (f.component_of[a], f.component_of[b]);
        match (parity[ci], parity[cj]) {
            (Parity::Fixed(ri), Parity::Fixed(rj)) => {
                lp.add_constraint(format!("cover[{label}]"), base.clone(), Sense::Ge, Rational::from(ri.abs_diff(rj) as i64));
            }
            (Parity::Free(p), Parity::Fixed(rj)) | (Parity::Fixed(rj), Parity::Free(p)) => {
                let mut row = base.clone();
                if rj == 1 {
                    // |r_i - r_j| = 1 - p
                    push(&mut row, p, 1);
                    lp.add_constraint(format!("cover[{label}]"), row, Sense::Ge, one());
                } else {
                    push(&mut row, p, -1);
                    lp.add_constraint(format!("cover[{label}]"), row, Sense::Ge, zero());
                }
            }
            (Parity::Free(p), Parity::Free(q)) if p == q => {
                lp.add_constraint(format!("cover[{label}]"), base.clone(), Sense::Ge, zero());
            }
            (Parity::Free(p), Parity::Free(q)) => {
                for (s, name) in [(1, "cover+"), (-1, "cover-")] {
                    let mut row = base.clone();
                    push(&mut row, p, -s);
                    push(&mut row, q, s);
                    lp.add_constraint(format!("{name}[{label}]"), row, Sense::Ge, zero());
                }
            }
        }
        if f.contains(a, b) {
            lp.add_constraint(format!("tight[{label}]"), base, Sense::Eq, zero());
        }
    }

    lp.add_constraint("sum-alpha", alpha.iter().map(|&j| (j, one())).collect(), Sense::Eq, zero());
    for u in 0..n {
        if let Parity::Free(p) = parity[f.component_of[u]] {
            lp.add_constraint(format!("alpha<=p[{}]", g.name(u)), vec![(alpha[u], one()), (p, -one())], Sense::Le, zero());
            lp.add_constraint(format!("alpha>=-p[{}]", g.name(u)), vec![(alpha[u], one()), (p, one())], Sense::Ge, zero());
        }
    }
    for u in 0..n {
        let mut row: Linear = g.prefs(u).iter().map(|&v| (x_edge[g.edge_id(u, v).unwrap()], one())).collect();
        row.push((x_loop[u], one()));
        lp.add_constraint(format!("degree[{}]", g.name(u)), row, Sense::Eq, one());
    }

    Ok(PolytopeSpec { lp, refined, r: r.clone(), parity, x_edge, x_loop, alpha, unmatched })
}

/// Sets the objective to `sum_e w_e x_e`.
pub fn set_weights(spec: &mut PolytopeSpec, w: &[Rational]) {
    let obj = spec.x_edge.iter().zip(w).filter(|(_, c)| !c.is_zero()).map(|(&j, c)| (j, c.clone())).collect();
    spec.lp.set_objective(obj);
}

pub fn edge_weights(g: &PreferenceInstance) -> Vec<Rational> {
    g.edges().iter().map(|&(u, v)| g.weight(u, v)).collect()
}

/// Maximizes the instance weights over the formulation; `None` when it is empty.
pub fn solve_for_r(g: &PreferenceInstance, f: &PopularSubgraph, r: &ParityVector, refined: bool) -> Result<Option<(PolytopeSpec, FractionalPoint)>> {
    let mut spec = build_polytope(g, f, r, refined)?;
    set_weights(&mut spec, &edge_weights(g));
    solve_spec(spec)
}

pub fn solve_spec(spec: PolytopeSpec) -> Result<Option<(PolytopeSpec, FractionalPoint)>> {
    let sol = lp::solve(&spec.lp);
    match sol.status {
        lp::LpStatus::Optimal => {
            let pt = spec.point(&sol.primal, sol.objective);
            Ok(Some((spec, pt)))
        }
        lp::LpStatus::Infeasible => Ok(None),
        lp::LpStatus::Unbounded => Err(Error::Solver("matching polytope reported unbounded".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::popularity::{enumerate_popular, EnumerationGuard};
    use crate::stable::{all_stable_matchings, stable_check};
    use crate::subgraph::popular_subgraph;
    use crate::witness::integral_witness_search;
    use crate::Matching;

    fn three() -> PreferenceInstance {
        PreferenceInstance::parse(
            "kind: bipartite\na1: b1 b2 b3\na2: b2 b3 b1\na3: b3 b1 b2\nb1: a2 a3 a1\nb2: a3 a1 a2\nb3: a1 a2 a3\n",
        )
        .unwrap()
    }

    fn indicator(g: &PreferenceInstance, m: &Matching) -> Vec<Rational> {
        g.edges().iter().map(|&(u, v)| if m.contains(u, v) { Rational::one() } else { Rational::zero() }).collect()
    }

    #[test]
    fn length_mismatch() {
        let g = three();
        let f = popular_subgraph(&g, &EnumerationGuard::default(), false).unwrap();
        let err = build_polytope(&g, &f, &ParityVector(vec![0; f.k + 1]), true).unwrap_err();
        assert!(matches!(err, Error::ParityLength { .. }));
    }

    #[test]
    fn popular_matchings_are_members() {
        let guard = EnumerationGuard::default();
        for g in [three(), PreferenceInstance::parse("kind: bipartite\na1: b1 b2\na2: b1\nb1: a1 a2\nb2: a1\n").unwrap()] {
            let f = popular_subgraph(&g, &guard, false).unwrap();
            for m in enumerate_popular(&g, &guard).unwrap() {
                let w = integral_witness_search(&g, &m, 64).unwrap().unwrap();
                for refined in [false, true] {
                    let len = if refined { f.k } else { f.ell };
                    let r = ParityVector((0..len).map(|i| if w.alpha[f.components[i][0]].is_zero() { 0 } else { 1 }).collect());
                    let spec = build_polytope(&g, &f, &r, refined).unwrap();
                    let p = (0..f.h()).map(|i| if w.alpha[f.components[i][0]].is_zero() { Rational::zero() } else { Rational::one() }).collect();
                    let pt = FractionalPoint { x: indicator(&g, &m), alpha: w.alpha.clone(), p, objective: Rational::zero() };
                    let vals = spec.values_of(&g, &pt);
                    assert_eq!(spec.lp.first_violation(&vals), None, "{} r={:?}", m.describe(&g), r);
                }
            }
        }
    }

    #[test]
    fn zero_parity_optimizes_over_stable_matchings() {
        let g = three();
        let guard = EnumerationGuard::default();
        let f = popular_subgraph(&g, &guard, false).unwrap();
        let stable = all_stable_matchings(&g, &guard).unwrap();
        assert_eq!(stable.len(), 3);
        for (k, &(u, v)) in g.edges().iter().enumerate() {
            let mut spec = build_polytope(&g, &f, &ParityVector::all(0, f.ell), false).unwrap();
            let mut w = vec![Rational::zero(); g.edges().len()];
            w[k] = Rational::one();
            set_weights(&mut spec, &w);
            let (_, pt) = solve_spec(spec).unwrap().unwrap();
            let best = stable.iter().any(|m| m.contains(u, v));
            assert_eq!(pt.objective, if best { Rational::one() } else { Rational::zero() });
            assert!(stable.iter().all(|m| stable_check(&g, m)));
        }
    }
}
