//! Splitting a fractional point of the formulation into integral popular
//! matchings by sweeping a vertical line across a table of width one.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::instance::{Matching, PreferenceInstance, Side, Vertex};
use crate::rational::Rational;
use crate::subgraph::PopularSubgraph;
use crate::witness::BipartiteWitness;

use super::polytope::FractionalPoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Color {
    Blue,
    Green,
    Red,
    Plain,
}

impl Color {
    pub fn alpha(self) -> i8 {
        match self {
            Color::Blue => 1,
            Color::Red => -1,
            Color::Green | Color::Plain => 0,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Color::Blue => "blue",
            Color::Green => "green",
            Color::Red => "red",
            Color::Plain => "plain",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub partner: Vertex,
    pub start: Rational,
    pub len: Rational,
    pub color: Color,
}

impl Cell {
    fn end(&self) -> Rational {
        &self.start + &self.len
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepTable {
    /// `None` for vertices left unmatched by every member.
    pub rows: Vec<Option<Vec<Cell>>>,
    pub breakpoints: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Member {
    pub t: Rational,
    pub len: Rational,
    pub matching: Matching,
    pub alpha: Vec<i8>,
}

impl Member {
    pub fn witness(&self) -> BipartiteWitness {
        BipartiteWitness { alpha: self.alpha.iter().map(|&a| Rational::from(a as i64)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub members: Vec<Member>,
}

impl Decomposition {
    /// `sum_t len_t * [e in M_t]` per edge of `g`.
    pub fn reconstruct(&self, g: &PreferenceInstance) -> Vec<Rational> {
        g.edges()
            .iter()
            .map(|&(u, v)| self.members.iter().filter(|m| m.matching.contains(u, v)).map(|m| m.len.clone()).sum())
            .collect()
    }

    pub fn to_json(&self, g: &PreferenceInstance) -> Value {
        Value::Array(
            self.members
                .iter()
                .map(|m| {
                    json!({
                        "t": m.t.to_fraction_string(),
                        "length": m.len.to_fraction_string(),
                        "matching": m.matching.to_json(g),
                        "alpha": m.witness().to_json(g),
                    })
                })
                .collect(),
        )
    }
}

impl SweepTable {
    pub fn to_json(&self, g: &PreferenceInstance) -> Value {
        let rows: serde_json::Map<String, Value> = self
            .rows
            .iter()
            .enumerate()
            .filter_map(|(u, r)| r.as_ref().map(|r| (u, r)))
            .map(|(u, r)| {
                let cells = r
                    .iter()
                    .map(|c| {
                        json!({"partner": g.name(c.partner), "start": c.start.to_fraction_string(),
                               "length": c.len.to_fraction_string(), "color": c.color.name()})
                    })
                    .collect();
                (g.name(u).to_string(), Value::Array(cells))
            })
            .collect();
        json!({
            "rows": rows,
            "breakpoints": self.breakpoints.iter().map(|t| t.to_fraction_string()).collect::<Vec<_>>(),
        })
    }
}

fn invalid(msg: String) -> Error {
    Error::SweepInvalid(msg)
}

type Colored = Vec<(Vertex, Rational, Color)>;

/// Cuts `entries` at offset `q` into a prefix and a suffix, both colored.
fn split(entries: &[(Vertex, Rational)], q: &Rational, first: Color, second: Color) -> (Colored, Colored) {
    let (mut pre, mut post) = (Vec::new(), Vec::new());
    let mut pos = Rational::zero();
    for (v, len) in entries {
        let end = &pos + len;
        if end <= *q {
            pre.push((*v, len.clone(), first));
        } else if pos >= *q {
            post.push((*v, len.clone(), second));
        } else {
            pre.push((*v, q - &pos, first));
            post.push((*v, &end - q, second));
        }
        pos = end;
    }
    (pre, post)
}

pub fn build_table(g: &PreferenceInstance, f: &PopularSubgraph, pt: &FractionalPoint, unmatched: &std::collections::BTreeSet<Vertex>) -> Result<SweepTable> {
    let sides = g.require_bipartite()?;
    let one = Rational::one();
    let two = Rational::from(2);
    let mut rows = Vec::with_capacity(g.n());
    for u in 0..g.n() {
        if unmatched.contains(&u) {
            rows.push(None);
            continue;
        }
        let mut entries: Vec<(Vertex, Rational)> = g
            .prefs(u)
            .iter()
            .map(|&v| (v, pt.x[g.edge_id(u, v).unwrap()].clone()))
            .filter(|(_, x)| x.is_positive())
            .collect();
        let total: Rational = entries.iter().map(|(_, x)| x.clone()).sum();
        if total != one {
            return Err(invalid(format!("vertex {} has fractional degree {total}", g.name(u))));
        }
        // prefs is best first; A rows want worst first.
        if sides[u] == Side::A {
            entries.reverse();
        }
        let ci = f.component_of[u];
        let a = &pt.alpha[u];
        let pieces: Vec<(Vertex, Rational, Color)> = if ci < f.ell && pt.p[ci] == one {
            // parity one everywhere on the component
            let (q, first, second) = match sides[u] {
                Side::A => ((&one + a) / &two, Color::Blue, Color::Red),
                Side::B => ((&one - a) / &two, Color::Red, Color::Blue),
            };
            let (pre, post) = split(&entries, &q, first, second);
            post.into_iter().chain(pre).collect()
        } else if pt.p[ci].is_zero() {
            entries.into_iter().map(|(v, len)| (v, len, Color::Plain)).collect()
        } else {
            if entries.len() != 1 {
                return Err(invalid(format!("pair vertex {} split over {} partners", g.name(u), entries.len())));
            }
            let v = entries[0].0;
            let s = (&one - &pt.p[ci]) / &two;
            let (q, outer, inner) = match sides[u] {
                Side::A => ((&one + a) / &two, Color::Red, Color::Blue),
                Side::B => ((&one - a) / &two, Color::Blue, Color::Red),
            };
            let lens = [&(&one - &q) - &s, &s + &s, &q - &s];
            if lens.iter().any(|l| l.is_negative()) {
                return Err(invalid(format!("negative cell length at {}", g.name(u))));
            }
            lens.into_iter().zip([outer, Color::Green, inner]).map(|(l, c)| (v, l, c)).collect()
        };
        let mut start = Rational::zero();
        let mut cells = Vec::new();
        for (v, len, color) in pieces {
            if len.is_zero() {
                continue;
            }
            let next = &start + &len;
            cells.push(Cell { partner: v, start, len, color });
            start = next;
        }
        rows.push(Some(cells));
    }
    let mut breakpoints: Vec<Rational> = rows.iter().flatten().flatten().map(|c| c.start.clone()).collect();
    breakpoints.push(Rational::zero());
    breakpoints.sort();
    breakpoints.dedup();
    Ok(SweepTable { rows, breakpoints })
}

/// Reads off `M_t` and its parity witness at every left wall.
pub fn sweep(g: &PreferenceInstance, table: &SweepTable) -> Result<Decomposition> {
    let n = g.n();
    let mut members = Vec::with_capacity(table.breakpoints.len());
    for (idx, t) in table.breakpoints.iter().enumerate() {
        let next = table.breakpoints.get(idx + 1).cloned().unwrap_or_else(Rational::one);
        let mut mate = vec![None; n];
        let mut alpha = vec![0i8; n];
        for (u, row) in table.rows.iter().enumerate() {
            let Some(row) = row else { continue };
            let cell = row
                .iter()
                .find(|c| c.start <= *t && *t < c.end())
                .ok_or_else(|| invalid(format!("{t}: row {} has no cell", g.name(u))))?;
            mate[u] = Some(cell.partner);
            alpha[u] = cell.color.alpha();
        }
        let mut pairs = Vec::new();
        for u in 0..n {
            if let Some(v) = mate[u] {
                if mate[v] != Some(u) {
                    return Err(invalid(format!("{}: {} points to {} but not back", t.to_fraction_string(), g.name(u), g.name(v))));
                }
                if u < v {
                    pairs.push((u, v));
                }
            }
        }
        let matching = Matching::from_pairs(g, &pairs).map_err(|e| invalid(format!("{}: {e}", t.to_fraction_string())))?;
        members.push(Member { t: t.clone(), len: &next - t, matching, alpha });
    }
    Ok(Decomposition { members })
}

pub fn decompose_table(
    g: &PreferenceInstance,
    f: &PopularSubgraph,
    pt: &FractionalPoint,
    unmatched: &std::collections::BTreeSet<Vertex>,
) -> Result<(SweepTable, Decomposition)> {
    let table = build_table(g, f, pt, unmatched)?;
    let dec = sweep(g, &table)?;
    Ok((table, dec))
}
