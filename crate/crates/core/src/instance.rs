//! Preference instances and matchings.
//!
//! Vertices are dense indices `0..n`; display names are only used at the
//! text and JSON boundaries. Every vertex implicitly ranks itself below all
//! of its neighbours, which is how "unmatched" compares against "matched".

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type Vertex = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Bipartite(Vec<Side>),
    Roommates,
}

/// A vertex set with strict, symmetric preference lists and optional
/// rational edge weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceInstance {
    names: Vec<String>,
    index: HashMap<String, Vertex>,
    kind: Kind,
    prefs: Vec<Vec<Vertex>>,
    rank: Vec<HashMap<Vertex, usize>>,
    edges: Vec<(Vertex, Vertex)>,
    edge_index: HashMap<(Vertex, Vertex), usize>,
    weights: Option<Vec<Rational>>,
}

fn key(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl PreferenceInstance {
    /// Validates and builds an instance. `prefs[u]` is most-preferred first.
    pub fn new(names: Vec<String>, kind: Kind, prefs: Vec<Vec<Vertex>>) -> Result<Self> {
        let n = names.len();
        if prefs.len() != n {
            return Err(Error::Syntax {
                line: 0,
                message: format!("{} preference lists for {} vertices", prefs.len(), n),
            });
        }
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == ':') {
                return Err(Error::Syntax { line: 0, message: format!("invalid vertex name `{name}`") });
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Syntax { line: 0, message: format!("duplicate vertex name `{name}`") });
            }
        }
        if let Kind::Bipartite(sides) = &kind {
            if sides.len() != n {
                return Err(Error::Syntax { line: 0, message: "side vector length mismatch".into() });
            }
        }
        let mut rank: Vec<HashMap<Vertex, usize>> = Vec::with_capacity(n);
        for (u, list) in prefs.iter().enumerate() {
            let mut r = HashMap::with_capacity(list.len());
            for (pos, &v) in list.iter().enumerate() {
                if v >= n {
                    return Err(Error::UnknownVertex(v.to_string()));
                }
                if v == u {
                    return Err(Error::Syntax {
                        line: 0,
                        message: format!("`{}` lists itself", names[u]),
                    });
                }
                if r.insert(v, pos).is_some() {
                    return Err(Error::DuplicateEntry(names[u].clone(), names[v].clone()));
                }
            }
            rank.push(r);
        }
        let mut edges = Vec::new();
        for (u, list) in prefs.iter().enumerate() {
            for &v in list {
                if !rank[v].contains_key(&u) {
                    return Err(Error::AsymmetricAdjacency(names[u].clone(), names[v].clone()));
                }
                if let Kind::Bipartite(sides) = &kind {
                    if sides[u] == sides[v] {
                        return Err(Error::SameSide(names[u].clone(), names[v].clone()));
                    }
                }
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        edges.sort_unstable();
        let edge_index = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Ok(Self { names, index, kind, prefs, rank, edges, edge_index, weights: None })
    }

    /// Convenience constructor from `(name, [neighbour names])` rows.
    pub fn from_lists(bipartite: bool, rows: &[(&str, &[&str])]) -> Result<Self> {
        let names: Vec<String> = rows.iter().map(|(n, _)| n.to_string()).collect();
        let lookup: HashMap<&str, Vertex> = rows.iter().enumerate().map(|(i, (n, _))| (*n, i)).collect();
        let mut prefs = Vec::with_capacity(rows.len());
        for (u, list) in rows {
            let mut row = Vec::with_capacity(list.len());
            for v in list.iter() {
                match lookup.get(v) {
                    Some(&id) => row.push(id),
                    None => return Err(Error::AsymmetricAdjacency(u.to_string(), v.to_string())),
                }
            }
            prefs.push(row);
        }
        let kind = if bipartite {
            Kind::Bipartite(two_colour(&names, &prefs)?)
        } else {
            Kind::Roommates
        };
        Self::new(names, kind, prefs)
    }

    /// Attaches weights, which must cover exactly the edge set.
    pub fn with_weights(mut self, weights: HashMap<(Vertex, Vertex), Rational>) -> Result<Self> {
        let mut w = vec![None; self.edges.len()];
        for ((u, v), value) in weights {
            match self.edge_index.get(&key(u, v)) {
                Some(&id) => w[id] = Some(value),
                None => {
                    return Err(Error::InvalidWeights(format!(
                        "({}, {}) is not an edge",
                        self.name(u),
                        self.name(v)
                    )))
                }
            }
        }
        let mut out = Vec::with_capacity(w.len());
        for (id, value) in w.into_iter().enumerate() {
            match value {
                Some(v) => out.push(v),
                None => {
                    let (u, v) = self.edges[id];
                    return Err(Error::InvalidWeights(format!(
                        "edge ({}, {}) has no weight",
                        self.name(u),
                        self.name(v)
                    )));
                }
            }
        }
        self.weights = Some(out);
        Ok(self)
    }

    /// Attaches weights indexed like [`Self::edges`].
    pub fn with_edge_weights(mut self, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {} edges",
                weights.len(),
                self.edges.len()
            )));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn without_weights(mut self) -> Self {
        self.weights = None;
        self
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, u: Vertex) -> &str {
        &self.names[u]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<Vertex> {
        self.index.get(name).copied()
    }

    pub fn vertex_or_err(&self, name: &str) -> Result<Vertex> {
        self.vertex(name).ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn is_bipartite(&self) -> bool {
        matches!(self.kind, Kind::Bipartite(_))
    }

    pub fn side(&self, u: Vertex) -> Option<Side> {
        match &self.kind {
            Kind::Bipartite(s) => Some(s[u]),
            Kind::Roommates => None,
        }
    }

    pub fn require_bipartite(&self) -> Result<&[Side]> {
        match &self.kind {
            Kind::Bipartite(s) => Ok(s),
            Kind::Roommates => Err(Error::NotBipartite),
        }
    }

    /// Strict preference list of `u`, most preferred first.
    pub fn prefs(&self, u: Vertex) -> &[Vertex] {
        &self.prefs[u]
    }

    pub fn degree(&self, u: Vertex) -> usize {
        self.prefs[u].len()
    }

    /// Position of `v` in `u`'s list (0 = top choice).
    pub fn rank(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.rank[u].get(&v).copied()
    }

    /// Position of `v` in `u`'s list, with `u` itself ranked last.
    pub fn position(&self, u: Vertex, v: Vertex) -> Option<usize> {
        if u == v {
            Some(self.prefs[u].len())
        } else {
            self.rank(u, v)
        }
    }

    /// `true` if `u` strictly prefers `v` to `w` (either may be `u` itself).
    pub fn prefers(&self, u: Vertex, v: Vertex, w: Vertex) -> bool {
        match (self.position(u, v), self.position(u, w)) {
            (Some(a), Some(b)) => a < b,
            _ => false,
        }
    }

    pub fn is_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edge_index.contains_key(&key(u, v))
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge_id(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.edge_index.get(&key(u, v)).copied()
    }

    pub fn weights(&self) -> Option<&[Rational]> {
        self.weights.as_deref()
    }

    /// Weight of edge `(u, v)`; unweighted instances weigh every edge 1.
    pub fn weight(&self, u: Vertex, v: Vertex) -> Rational {
        match (&self.weights, self.edge_id(u, v)) {
            (Some(w), Some(id)) => w[id].clone(),
            _ => Rational::one(),
        }
    }

    /// `vote_u(v, w)`: +1 if `u` prefers `v` to `w`, -1 if `w` to `v`, 0 if equal.
    pub fn vote(&self, u: Vertex, v: Vertex, w: Vertex) -> Result<i8> {
        let err = || Error::NotComparable {
            u: self.name(u).to_string(),
            v: self.names.get(v).cloned().unwrap_or_else(|| v.to_string()),
            w: self.names.get(w).cloned().unwrap_or_else(|| w.to_string()),
        };
        let a = self.position(u, v).ok_or_else(err)?;
        let b = self.position(u, w).ok_or_else(err)?;
        Ok(match a.cmp(&b) {
            std::cmp::Ordering::Less => 1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => -1,
        })
    }

    /// Sum of `u`'s and `v`'s votes for each other over their assignments in `m`.
    pub fn edge_vote(&self, m: &Matching, u: Vertex, v: Vertex) -> i8 {
        let pu = m.partner_or_self(u);
        let pv = m.partner_or_self(v);
        self.vote(u, v, pu).expect("edge endpoint") + self.vote(v, u, pv).expect("edge endpoint")
    }

    pub fn is_blocking_edge(&self, m: &Matching, u: Vertex, v: Vertex) -> bool {
        self.prefers(u, v, m.partner_or_self(u)) && self.prefers(v, u, m.partner_or_self(v))
    }

    pub fn is_negative_edge(&self, m: &Matching, u: Vertex, v: Vertex) -> bool {
        self.prefers(u, m.partner_or_self(u), v) && self.prefers(v, m.partner_or_self(v), u)
    }

    /// Parses the line-oriented instance format.
    pub fn parse(text: &str) -> Result<Self> {
        parse_instance(text)
    }

    /// Writes the instance back in the line-oriented format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match &self.kind {
            Kind::Bipartite(sides) => {
                out.push_str("kind: bipartite\n");
                let a: Vec<&str> =
                    (0..self.n()).filter(|&u| sides[u] == Side::A).map(|u| self.name(u)).collect();
                let b: Vec<&str> =
                    (0..self.n()).filter(|&u| sides[u] == Side::B).map(|u| self.name(u)).collect();
                let _ = writeln!(out, "sides: {} | {}", a.join(" "), b.join(" "));
            }
            Kind::Roommates => out.push_str("kind: roommates\n"),
        }
        for u in 0..self.n() {
            let list: Vec<&str> = self.prefs[u].iter().map(|&v| self.name(v)).collect();
            if list.is_empty() {
                let _ = writeln!(out, "{}:", self.name(u));
            } else {
                let _ = writeln!(out, "{}: {}", self.name(u), list.join(" "));
            }
        }
        if let Some(w) = &self.weights {
            for (id, &(u, v)) in self.edges.iter().enumerate() {
                let _ = writeln!(out, "w {} {} {}", self.name(u), self.name(v), w[id].to_fraction_string());
            }
        }
        out
    }

    /// Parses weight lines `w u v p/q` (the leading `w` is optional) and
    /// attaches them.
    pub fn with_weights_text(self, text: &str) -> Result<Self> {
        let mut map = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let mut toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() == 4 && toks[0] == "w" {
                toks.remove(0);
            }
            if toks.len() != 3 {
                return Err(Error::Syntax { line: lineno + 1, message: "expected `w u v p/q`".into() });
            }
            let u = self.vertex_or_err(toks[0])?;
            let v = self.vertex_or_err(toks[1])?;
            let value: Rational = toks[2]
                .parse()
                .map_err(|e: crate::rational::ParseRationalError| Error::Syntax { line: lineno + 1, message: e.to_string() })?;
            if map.insert(key(u, v), value).is_some() {
                return Err(Error::InvalidWeights(format!("edge ({}, {}) weighted twice", toks[0], toks[1])));
            }
        }
        self.with_weights(map)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

/// Two-colours the graph, putting the lowest vertex of each component on side A.
fn two_colour(names: &[String], prefs: &[Vec<Vertex>]) -> Result<Vec<Side>> {
    let n = names.len();
    let mut side: Vec<Option<Side>> = vec![None; n];
    for s in 0..n {
        if side[s].is_some() {
            continue;
        }
        side[s] = Some(Side::A);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let su = side[u].unwrap();
            for &v in &prefs[u] {
                if v >= n {
                    continue;
                }
                let want = if su == Side::A { Side::B } else { Side::A };
                match side[v] {
                    None => {
                        side[v] = Some(want);
                        queue.push_back(v);
                    }
                    Some(x) if x != want => {
                        return Err(Error::SameSide(names[u].clone(), names[v].clone()))
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(side.into_iter().map(Option::unwrap).collect())
}

/// Parses the line-oriented text format:
///
/// ```text
/// kind: bipartite
/// sides: a1 a2 | b1 b2
/// a1: b1 b2
/// a2: b1
/// b1: a2 a1
/// b2: a1
/// w a1 b1 3/2
/// ```
pub fn parse_instance(text: &str) -> Result<PreferenceInstance> {
    let mut kind: Option<bool> = None;
    let mut sides_line: Option<(usize, Vec<String>, Vec<String>)> = None;
    let mut rows: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut weight_lines: Vec<(usize, String, String, String)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let syntax = |message: &str| Error::Syntax { line: lineno, message: message.to_string() };
        if let Some((head, rest)) = line.split_once(':') {
            let head = head.trim();
            if head.is_empty() || head.contains(char::is_whitespace) {
                return Err(syntax("malformed line head"));
            }
            match head {
                "kind" => {
                    if kind.is_some() || !rows.is_empty() {
                        return Err(syntax("`kind` must appear once, before vertex lines"));
                    }
                    kind = Some(match rest.trim() {
                        "bipartite" => true,
                        "roommates" => false,
                        other => return Err(syntax(&format!("unknown kind `{other}`"))),
                    });
                }
                "sides" => {
                    if sides_line.is_some() {
                        return Err(syntax("duplicate `sides` line"));
                    }
                    let (a, b) = rest.split_once('|').ok_or_else(|| syntax("`sides` needs `|`"))?;
                    sides_line = Some((
                        lineno,
                        a.split_whitespace().map(String::from).collect(),
                        b.split_whitespace().map(String::from).collect(),
                    ));
                }
                _ => {
                    if rest.contains(':') {
                        return Err(syntax("unexpected `:` in preference list"));
                    }
                    rows.push((lineno, head.to_string(), rest.split_whitespace().map(String::from).collect()));
                }
            }
        } else {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() == 4 && toks[0] == "w" {
                weight_lines.push((lineno, toks[1].into(), toks[2].into(), toks[3].into()));
            } else {
                return Err(syntax("expected `name: list`, a header, or `w u v p/q`"));
            }
        }
    }

    let bipartite = kind.ok_or(Error::Syntax { line: 0, message: "missing `kind:` header".into() })?;
    if let (Some((line, _, _)), false) = (&sides_line, bipartite) {
        return Err(Error::Syntax { line: *line, message: "`sides` on a roommates instance".into() });
    }

    let mut declared_side: HashMap<String, Side> = HashMap::new();
    if let Some((lineno, a, b)) = &sides_line {
        for (list, s) in [(a, Side::A), (b, Side::B)] {
            for name in list {
                if declared_side.insert(name.clone(), s).is_some() {
                    return Err(Error::Syntax { line: *lineno, message: format!("`{name}` listed twice in sides") });
                }
            }
        }
    }
    // ids follow vertex-line order; names only present in `sides` come last
    let mut names: Vec<String> = Vec::new();
    let mut idx: HashMap<String, Vertex> = HashMap::new();
    let mut lists: Vec<Vec<String>> = Vec::new();
    for (lineno, head, list) in rows {
        if idx.contains_key(&head) {
            return Err(Error::Syntax { line: lineno, message: format!("second line for `{head}`") });
        }
        if sides_line.is_some() && !declared_side.contains_key(&head) {
            return Err(Error::Syntax { line: lineno, message: format!("`{head}` is not in `sides`") });
        }
        idx.insert(head.clone(), names.len());
        names.push(head);
        lists.push(list);
    }
    if let Some((_, a, b)) = &sides_line {
        for name in a.iter().chain(b) {
            if !idx.contains_key(name) {
                idx.insert(name.clone(), names.len());
                names.push(name.clone());
                lists.push(Vec::new());
            }
        }
    }

    let mut prefs = Vec::with_capacity(names.len());
    for (u, list) in lists.iter().enumerate() {
        let mut row = Vec::with_capacity(list.len());
        for v in list {
            match idx.get(v) {
                Some(&id) => row.push(id),
                None => return Err(Error::AsymmetricAdjacency(names[u].clone(), v.clone())),
            }
        }
        prefs.push(row);
    }
    let kind = if bipartite {
        if sides_line.is_some() {
            Kind::Bipartite(names.iter().map(|n| declared_side[n]).collect())
        } else {
            Kind::Bipartite(two_colour(&names, &prefs)?)
        }
    } else {
        Kind::Roommates
    };
    let inst = PreferenceInstance::new(names, kind, prefs)?;
    if weight_lines.is_empty() {
        return Ok(inst);
    }
    let mut map = HashMap::new();
    for (lineno, u, v, value) in weight_lines {
        let a = inst.vertex_or_err(&u)?;
        let b = inst.vertex_or_err(&v)?;
        let value: Rational = value
            .parse()
            .map_err(|e: crate::rational::ParseRationalError| Error::Syntax { line: lineno, message: e.to_string() })?;
        if map.insert(key(a, b), value).is_some() {
            return Err(Error::InvalidWeights(format!("edge ({u}, {v}) weighted twice")));
        }
    }
    inst.with_weights(map)
}

/// A set of vertex-disjoint edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matching {
    mate: Vec<Option<Vertex>>,
}

impl Matching {
    pub fn empty(n: usize) -> Self {
        Self { mate: vec![None; n] }
    }

    /// Builds a matching from pairs, checking they are disjoint edges of `g`.
    pub fn from_pairs(g: &PreferenceInstance, pairs: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut m = Self::empty(g.n());
        for &(u, v) in pairs {
            if u >= g.n() || v >= g.n() {
                return Err(Error::InvalidMatching(format!("vertex out of range in ({u}, {v})")));
            }
            if !g.is_edge(u, v) {
                return Err(Error::InvalidMatching(format!("({}, {}) is not an edge", g.name(u), g.name(v))));
            }
            if m.mate[u].is_some() || m.mate[v].is_some() {
                return Err(Error::InvalidMatching(format!(
                    "vertex shared by two pairs at ({}, {})",
                    g.name(u),
                    g.name(v)
                )));
            }
            m.mate[u] = Some(v);
            m.mate[v] = Some(u);
        }
        Ok(m)
    }

    pub fn from_names(g: &PreferenceInstance, pairs: &[(&str, &str)]) -> Result<Self> {
        let ids: Result<Vec<_>> =
            pairs.iter().map(|(u, v)| Ok((g.vertex_or_err(u)?, g.vertex_or_err(v)?))).collect();
        Self::from_pairs(g, &ids?)
    }

    pub(crate) fn from_mates(mate: Vec<Option<Vertex>>) -> Self {
        Self { mate }
    }

    pub fn n(&self) -> usize {
        self.mate.len()
    }

    pub fn mate(&self, u: Vertex) -> Option<Vertex> {
        self.mate[u]
    }

    pub fn mates(&self) -> &[Option<Vertex>] {
        &self.mate
    }

    /// Partner in the self-loop augmented graph.
    pub fn partner_or_self(&self, u: Vertex) -> Vertex {
        self.mate[u].unwrap_or(u)
    }

    pub fn is_matched(&self, u: Vertex) -> bool {
        self.mate[u].is_some()
    }

    pub fn contains(&self, u: Vertex, v: Vertex) -> bool {
        self.mate[u] == Some(v)
    }

    pub fn len(&self) -> usize {
        self.mate.iter().filter(|m| m.is_some()).count() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pairs `(u, v)` with `u < v`, sorted.
    pub fn pairs(&self) -> Vec<(Vertex, Vertex)> {
        self.mate
            .iter()
            .enumerate()
            .filter_map(|(u, m)| m.filter(|&v| u < v).map(|v| (u, v)))
            .collect()
    }

    pub fn matched_vertices(&self) -> BTreeSet<Vertex> {
        (0..self.n()).filter(|&u| self.is_matched(u)).collect()
    }

    pub fn weight(&self, g: &PreferenceInstance) -> Rational {
        self.pairs().iter().map(|&(u, v)| g.weight(u, v)).sum()
    }

    pub fn augmented(&self) -> AugmentedMatching {
        AugmentedMatching {
            base: self.clone(),
            loops: (0..self.n()).filter(|&u| !self.is_matched(u)).collect(),
        }
    }

    /// JSON form: an array of name pairs.
    pub fn to_json(&self, g: &PreferenceInstance) -> serde_json::Value {
        serde_json::Value::Array(
            self.pairs()
                .into_iter()
                .map(|(u, v)| serde_json::json!([g.name(u), g.name(v)]))
                .collect(),
        )
    }

    pub fn from_json(g: &PreferenceInstance, value: &serde_json::Value) -> Result<Self> {
        let pairs: Vec<(String, String)> =
            serde_json::from_value(value.clone()).map_err(|e| Error::Json(e.to_string()))?;
        let refs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        Self::from_names(g, &refs)
    }

    pub fn describe(&self, g: &PreferenceInstance) -> String {
        let parts: Vec<String> =
            self.pairs().iter().map(|&(u, v)| format!("({}, {})", g.name(u), g.name(v))).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl PartialOrd for Matching {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order on the sorted edge lists.
impl Ord for Matching {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.pairs().cmp(&other.pairs())
    }
}

/// A matching viewed as a perfect matching of the graph with self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedMatching {
    pub base: Matching,
    pub loops: BTreeSet<Vertex>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn four() -> PreferenceInstance {
        PreferenceInstance::parse(
            "kind: roommates\na: b c d\nb: c a d\nc: a b d\nd: a b c\n",
        )
        .unwrap()
    }

    #[test]
    fn smallest_instance() {
        let g = PreferenceInstance::parse("kind: roommates\na: b\nb: a\n").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn four_vertex_complete_graph() {
        let g = four();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edges().len(), 6);
    }

    #[test]
    fn asymmetric_is_rejected() {
        let err = PreferenceInstance::parse("kind: roommates\na: b\nb:\n").unwrap_err();
        assert!(matches!(err, Error::AsymmetricAdjacency(..)));
    }

    #[test]
    fn duplicate_and_side_errors() {
        let dup = PreferenceInstance::parse("kind: roommates\na: b b\nb: a\n").unwrap_err();
        assert!(matches!(dup, Error::DuplicateEntry(..)));
        let side =
            PreferenceInstance::parse("kind: bipartite\nsides: a c | b\na: b c\nb: a\nc: a\n").unwrap_err();
        assert!(matches!(side, Error::SameSide(..)));
        let odd = PreferenceInstance::parse("kind: bipartite\na: b c\nb: c a\nc: a b\n").unwrap_err();
        assert!(matches!(odd, Error::SameSide(..)));
        let syntax = PreferenceInstance::parse("kind: roommates\nthis is not a line\n").unwrap_err();
        assert!(matches!(syntax, Error::Syntax { line: 2, .. }));
        assert!(PreferenceInstance::parse("a: b\nb: a\n").is_err());
    }

    #[test]
    fn weights_must_cover_edges() {
        let ok = PreferenceInstance::parse("kind: bipartite\na: b\nb: a\nw a b 3/2\n").unwrap();
        assert_eq!(ok.weight(0, 1), Rational::new(3, 2));
        let missing = PreferenceInstance::parse("kind: bipartite\na: b c\nb: a\nc: a\nw a b 1\n");
        assert!(matches!(missing, Err(Error::InvalidWeights(_))));
        let stray = PreferenceInstance::parse("kind: bipartite\na: b\nb: a\nc:\nw a c 1\nw a b 1\n");
        assert!(matches!(stray, Err(Error::InvalidWeights(_))));
    }

    #[test]
    fn votes_on_the_four_vertex_instance() {
        let g = four();
        let (a, b, c, d) = (0, 1, 2, 3);
        assert_eq!(g.vote(a, b, c).unwrap(), 1);
        assert_eq!(g.vote(a, c, c).unwrap(), 0);
        assert_eq!(g.vote(a, a, d).unwrap(), -1);
        let tri = PreferenceInstance::parse("kind: roommates\na: b\nb: a c\nc: b\n").unwrap();
        assert!(tri.vote(0, 2, 1).is_err());
    }

    #[test]
    fn blocking_and_negative() {
        let g = four();
        let m1 = Matching::from_names(&g, &[("a", "d"), ("b", "c")]).unwrap();
        assert!(!g.is_blocking_edge(&m1, 0, 1));
        let empty = Matching::empty(4);
        for &(u, v) in g.edges() {
            assert!(g.is_blocking_edge(&empty, u, v));
            assert!(!g.is_negative_edge(&empty, u, v));
        }
        for (u, v) in m1.pairs() {
            assert!(!g.is_blocking_edge(&m1, u, v));
            assert!(!g.is_negative_edge(&m1, u, v));
        }
    }

    #[test]
    fn matching_validation() {
        let g = four();
        assert!(Matching::from_names(&g, &[("a", "b"), ("b", "c")]).is_err());
        let path = PreferenceInstance::parse("kind: roommates\na: b\nb: a c\nc: b\n").unwrap();
        assert!(Matching::from_names(&path, &[("a", "c")]).is_err());
        let m = Matching::from_names(&g, &[("c", "a")]).unwrap();
        assert_eq!(m.pairs(), vec![(0, 2)]);
        let json = m.to_json(&g);
        assert_eq!(json.to_string(), r#"[["a","c"]]"#);
        assert_eq!(Matching::from_json(&g, &json).unwrap(), m);
        assert_eq!(m.augmented().loops, BTreeSet::from([1, 3]));
    }

    fn arb_instance() -> impl Strategy<Value = PreferenceInstance> {
        (2usize..8, any::<bool>(), proptest::collection::vec(any::<u32>(), 64), any::<bool>()).prop_map(
            |(n, bip, seeds, weighted)| {
                let mut adj = vec![Vec::new(); n];
                let mut k = 0;
                for u in 0..n {
                    for v in (u + 1)..n {
                        if bip && (u % 2 == v % 2) {
                            continue;
                        }
                        if seeds[k % seeds.len()] % 2 == 0 {
                            adj[u].push(v);
                            adj[v].push(u);
                        }
                        k += 1;
                    }
                }
                for (u, list) in adj.iter_mut().enumerate() {
                    list.sort_by_key(|&v| seeds[(u * 7 + v * 13) % seeds.len()]);
                }
                let names = (0..n).map(|i| format!("v{i}")).collect();
                let kind = if bip {
                    Kind::Bipartite((0..n).map(|u| if u % 2 == 0 { Side::A } else { Side::B }).collect())
                } else {
                    Kind::Roommates
                };
                let g = PreferenceInstance::new(names, kind, adj).unwrap();
                if weighted && !g.edges().is_empty() {
                    let w = (0..g.edges().len())
                        .map(|i| Rational::new(seeds[i % seeds.len()] as i64 % 11 - 5, 1 + i as i64 % 3))
                        .collect();
                    g.with_edge_weights(w).unwrap()
                } else {
                    g
                }
            },
        )
    }

    proptest! {
        #[test]
        fn text_round_trip(g in arb_instance()) {
            let back = PreferenceInstance::parse(&g.to_text()).unwrap();
            prop_assert_eq!(back, g);
        }

        #[test]
        fn vote_is_antisymmetric_and_edges_classify_once(g in arb_instance(), pick in any::<u64>()) {
            for u in 0..g.n() {
                let mut cands: Vec<Vertex> = g.prefs(u).to_vec();
                cands.push(u);
                for &v in &cands {
                    for &w in &cands {
                        prop_assert_eq!(g.vote(u, v, w).unwrap(), -g.vote(u, w, v).unwrap());
                    }
                }
            }
            // greedy matching driven by `pick`
            let mut mate = vec![None; g.n()];
            for (i, &(u, v)) in g.edges().iter().enumerate() {
                if (pick >> (i % 64)) & 1 == 1 && mate[u].is_none() && mate[v].is_none() {
                    mate[u] = Some(v);
                    mate[v] = Some(u);
                }
            }
            let m = Matching::from_mates(mate);
            for &(u, v) in g.edges() {
                prop_assert!(!(g.is_blocking_edge(&m, u, v) && g.is_negative_edge(&m, u, v)));
            }
        }
    }
}
