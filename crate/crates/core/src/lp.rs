//! Exact rational linear programming.
//!
//! A dense two-phase primal simplex over [`Rational`]. Pivoting uses the
//! most negative reduced cost for a bounded number of steps and then falls
//! back to Bland's rule, which cannot cycle.

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RationalLinearProgram {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(usize, Rational)>,
    pub maximize: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve.
///
/// When optimal, `dual[i]` is the multiplier of constraint `i` and
/// `bound_dual[j] = c_j - sum_i dual[i] * a_ij` is the reduced cost of
/// variable `j`, which is what its bound constraints absorb.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<Rational>,
    pub dual: Vec<Rational>,
    pub bound_dual: Vec<Rational>,
    pub objective: Rational,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    fn empty(status: LpStatus) -> Self {
        Self { status, primal: Vec::new(), dual: Vec::new(), bound_dual: Vec::new(), objective: Rational::zero() }
    }
}

impl RationalLinearProgram {
    pub fn new(maximize: bool) -> Self {
        Self { maximize, ..Default::default() }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: Option<Rational>, upper: Option<Rational>) -> usize {
        self.variables.push(Variable { name: name.into(), lower, upper });
        self.variables.len() - 1
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, Rational)>,
        sense: Sense,
        rhs: Rational,
    ) -> usize {
        self.constraints.push(Constraint { name: name.into(), coeffs, sense, rhs });
        self.constraints.len() - 1
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, Rational)>) {
        self.objective = coeffs;
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    /// Dense objective vector.
    pub fn objective_vector(&self) -> Vec<Rational> {
        let mut c = vec![Rational::zero(); self.num_vars()];
        for (j, v) in &self.objective {
            c[*j] += v;
        }
        c
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        self.objective.iter().map(|(j, v)| v * &x[*j]).sum()
    }

    pub fn row_value(&self, i: usize, x: &[Rational]) -> Rational {
        self.constraints[i].coeffs.iter().map(|(j, v)| v * &x[*j]).sum()
    }

    /// Checks that every coefficient references a declared variable.
    pub fn is_well_formed(&self) -> bool {
        let n = self.num_vars();
        self.objective.iter().all(|(j, _)| *j < n)
            && self.constraints.iter().all(|c| c.coeffs.iter().all(|(j, _)| *j < n))
            && self.variables.iter().all(|v| match (&v.lower, &v.upper) {
                (Some(l), Some(u)) => l <= u,
                _ => true,
            })
    }

    /// Exact primal feasibility.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        self.first_violation(x).is_none()
    }

    pub fn first_violation(&self, x: &[Rational]) -> Option<String> {
        for (j, v) in self.variables.iter().enumerate() {
            if let Some(l) = &v.lower {
                if &x[j] < l {
                    return Some(format!("{} = {} below lower bound {}", v.name, x[j], l));
                }
            }
            if let Some(u) = &v.upper {
                if &x[j] > u {
                    return Some(format!("{} = {} above upper bound {}", v.name, x[j], u));
                }
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let lhs = self.row_value(i, x);
            let ok = match c.sense {
                Sense::Le => lhs <= c.rhs,
                Sense::Eq => lhs == c.rhs,
                Sense::Ge => lhs >= c.rhs,
            };
            if !ok {
                return Some(format!("constraint {} has lhs {} vs rhs {}", c.name, lhs, c.rhs));
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    /// Print each tableau to stderr.
    pub trace: bool,
    /// Number of largest-coefficient pivots per phase before switching to Bland.
    pub dantzig_limit: Option<usize>,
}

pub fn solve(lp: &RationalLinearProgram) -> LpSolution {
    solve_with(lp, &SolveOptions::default())
}

/// How an original variable is expressed through standard-form columns.
#[derive(Clone, Debug)]
enum VarMap {
    Fixed(Rational),
    /// x = offset + col
    Shift(Rational, usize),
    /// x = offset - col
    Flip(Rational, usize),
    /// x = pos - neg
    Split(usize, usize),
}

pub fn solve_with(lp: &RationalLinearProgram, opts: &SolveOptions) -> LpSolution {
    assert!(lp.is_well_formed(), "malformed linear program");
    let nvars = lp.num_vars();

    // column layout of structural variables
    let mut maps = Vec::with_capacity(nvars);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
    for v in &lp.variables {
        let m = match (&v.lower, &v.upper) {
            (Some(l), Some(u)) if l == u => VarMap::Fixed(l.clone()),
            (Some(l), u) => {
                let col = ncols;
                ncols += 1;
                if let Some(u) = u {
                    bound_rows.push((col, u - l));
                }
                VarMap::Shift(l.clone(), col)
            }
            (None, Some(u)) => {
                let col = ncols;
                ncols += 1;
                VarMap::Flip(u.clone(), col)
            }
            (None, None) => {
                ncols += 2;
                VarMap::Split(ncols - 2, ncols - 1)
            }
        };
        maps.push(m);
    }
    let nstruct = ncols;

    // rows: (dense coefficients over structural columns, sense, rhs)
    let mut rows: Vec<(Vec<Rational>, Sense, Rational)> = Vec::with_capacity(lp.constraints.len() + bound_rows.len());
    for c in &lp.constraints {
        let mut a = vec![Rational::zero(); nstruct];
        let mut rhs = c.rhs.clone();
        for (j, v) in &c.coeffs {
            match &maps[*j] {
                VarMap::Fixed(x) => rhs -= v * x,
                VarMap::Shift(off, col) => {
                    rhs -= v * off;
                    a[*col] += v;
                }
                VarMap::Flip(off, col) => {
                    rhs -= v * off;
                    a[*col] -= v;
                }
                VarMap::Split(p, q) => {
                    a[*p] += v;
                    a[*q] -= v;
                }
            }
        }
        rows.push((a, c.sense, rhs));
    }
    for (col, ub) in &bound_rows {
        let mut a = vec![Rational::zero(); nstruct];
        a[*col] = Rational::one();
        rows.push((a, Sense::Le, ub.clone()));
    }

    // objective over structural columns, always maximised internally
    let sign = if lp.maximize { Rational::one() } else { -Rational::one() };
    let mut cvec = vec![Rational::zero(); nstruct];
    let mut cconst = Rational::zero();
    for (j, v) in &lp.objective {
        let v = v * &sign;
        match &maps[*j] {
            VarMap::Fixed(x) => cconst += &v * x,
            VarMap::Shift(off, col) => {
                cconst += &v * off;
                cvec[*col] += &v;
            }
            VarMap::Flip(off, col) => {
                cconst += &v * off;
                cvec[*col] -= &v;
            }
            VarMap::Split(p, q) => {
                cvec[*p] += &v;
                cvec[*q] -= &v;
            }
        }
    }

    let m = rows.len();
    // normalise rhs >= 0
    let mut negated = vec![false; m];
    for (i, (a, sense, rhs)) in rows.iter_mut().enumerate() {
        if rhs.is_negative() {
            negated[i] = true;
            for x in a.iter_mut() {
                *x = -&*x;
            }
            *rhs = -&*rhs;
            *sense = match *sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }

    // slack/surplus columns then artificial columns
    let mut slack_col = vec![None; m];
    for (i, (_, sense, _)) in rows.iter().enumerate() {
        if *sense != Sense::Eq {
            slack_col[i] = Some(ncols);
            ncols += 1;
        }
    }
    let first_art = ncols;
    let mut art_col = vec![None; m];
    for (i, (_, sense, _)) in rows.iter().enumerate() {
        if *sense != Sense::Le {
            art_col[i] = Some(ncols);
            ncols += 1;
        }
    }

    let mut t = Tableau::new(m, ncols);
    for (i, (a, sense, rhs)) in rows.into_iter().enumerate() {
        let row = &mut t.a[i];
        for (j, v) in a.into_iter().enumerate() {
            row[j] = v;
        }
        if let Some(s) = slack_col[i] {
            row[s] = if sense == Sense::Le { Rational::one() } else { -Rational::one() };
        }
        if let Some(a) = art_col[i] {
            row[a] = Rational::one();
        }
        t.rhs[i] = rhs;
        t.basis[i] = if sense == Sense::Le { slack_col[i].unwrap() } else { art_col[i].unwrap() };
    }
    // unit column of each row in the starting basis, used to read duals
    let unit_col: Vec<usize> = t.basis.clone();

    let limit = opts.dantzig_limit.unwrap_or(20 * (m + ncols) + 200);

    // phase 1: maximise -sum(artificials)
    if first_art < ncols {
        let mut c1 = vec![Rational::zero(); ncols];
        for c in c1.iter_mut().skip(first_art) {
            *c = -Rational::one();
        }
        t.set_objective(&c1);
        t.run(ncols, limit, opts.trace);
        if t.obj_value.is_negative() {
            return LpSolution::empty(LpStatus::Infeasible);
        }
        // drive zero-level artificials out of the basis where possible
        for i in 0..m {
            if t.basis[i] >= first_art {
                if let Some(j) = (0..first_art).find(|&j| !t.a[i][j].is_zero()) {
                    t.pivot(i, j);
                }
            }
        }
    }

    // phase 2
    let mut c2 = vec![Rational::zero(); ncols];
    c2[..nstruct].clone_from_slice(&cvec);
    t.set_objective(&c2);
    if !t.run(first_art, limit, opts.trace) {
        return LpSolution::empty(LpStatus::Unbounded);
    }

    let mut val = vec![Rational::zero(); ncols];
    for i in 0..m {
        val[t.basis[i]] = t.rhs[i].clone();
    }
    let primal: Vec<Rational> = maps
        .iter()
        .map(|mp| match mp {
            VarMap::Fixed(x) => x.clone(),
            VarMap::Shift(off, col) => off + &val[*col],
            VarMap::Flip(off, col) => off - &val[*col],
            VarMap::Split(p, q) => &val[*p] - &val[*q],
        })
        .collect();

    // y_i is the reduced cost on the row's starting unit column
    let ncons = lp.constraints.len();
    let mut dual = Vec::with_capacity(ncons);
    for i in 0..ncons {
        let mut y = t.obj[unit_col[i]].clone();
        if negated[i] {
            y = -y;
        }
        dual.push(y * &sign);
    }
    let c = lp.objective_vector();
    let mut bound_dual = c;
    for (i, con) in lp.constraints.iter().enumerate() {
        for (j, v) in &con.coeffs {
            bound_dual[*j] -= &dual[i] * v;
        }
    }
    let objective = lp.evaluate(&primal);
    debug_assert_eq!(&objective * &sign, &t.obj_value + &cconst);
    LpSolution { status: LpStatus::Optimal, primal, dual, bound_dual, objective }
}

struct Tableau {
    a: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// reduced costs `c_B B^-1 A - c`
    obj: Vec<Rational>,
    obj_value: Rational,
}

impl Tableau {
    fn new(m: usize, n: usize) -> Self {
        Self {
            a: vec![vec![Rational::zero(); n]; m],
            rhs: vec![Rational::zero(); m],
            basis: vec![0; m],
            obj: vec![Rational::zero(); n],
            obj_value: Rational::zero(),
        }
    }

    fn set_objective(&mut self, c: &[Rational]) {
        let n = c.len();
        let mut obj: Vec<Rational> = c.iter().map(|x| -x).collect();
        let mut value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &c[b];
            if cb.is_zero() {
                continue;
            }
            for (j, o) in obj.iter_mut().enumerate().take(n) {
                let aij = &self.a[i][j];
                if !aij.is_zero() {
                    *o += cb * aij;
                }
            }
            value += cb * &self.rhs[i];
        }
        self.obj = obj;
        self.obj_value = value;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        if p != Rational::one() {
            let inv = Rational::one() / &p;
            for x in self.a[r].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let nz: Vec<usize> = (0..self.a[r].len()).filter(|&j| !self.a[r][j].is_zero()).collect();
        let prow: Vec<Rational> = nz.iter().map(|&j| self.a[r][j].clone()).collect();
        let prhs = self.rhs[r].clone();
        for i in 0..self.a.len() {
            if i == r {
                continue;
            }
            let f = self.a[i][c].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.a[i];
            for (k, &j) in nz.iter().enumerate() {
                row[j] -= &f * &prow[k];
            }
            self.rhs[i] -= &f * &prhs;
        }
        let f = self.obj[c].clone();
        if !f.is_zero() {
            for (k, &j) in nz.iter().enumerate() {
                self.obj[j] -= &f * &prow[k];
            }
            self.obj_value -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations over entering columns `< allowed`.
    /// Returns `false` if the objective is unbounded.
    fn run(&mut self, allowed: usize, dantzig_limit: usize, trace: bool) -> bool {
        let mut steps = 0usize;
        loop {
            if trace {
                self.dump();
            }
            let bland = steps >= dantzig_limit;
            let mut enter = None;
            if bland {
                enter = (0..allowed).find(|&j| self.obj[j].is_negative());
            } else {
                let mut best: Option<&Rational> = None;
                for j in 0..allowed {
                    let v = &self.obj[j];
                    if v.is_negative() && best.is_none_or(|b| v < b) {
                        best = Some(v);
                        enter = Some(j);
                    }
                }
            }
            let Some(c) = enter else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.a.len() {
                let aic = &self.a[i][c];
                if !aic.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / aic;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, c);
            steps += 1;
        }
    }

    fn dump(&self) {
        eprintln!("basis {:?} value {}", self.basis, self.obj_value);
        for (i, row) in self.a.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            eprintln!("  [{}] | {}", cells.join(" "), self.rhs[i]);
        }
        let cells: Vec<String> = self.obj.iter().map(|x| x.to_string()).collect();
        eprintln!("  obj [{}]", cells.join(" "));
    }
}

/// Verifies an optimal solution exactly: primal feasibility, dual sign
/// conditions, complementary slackness and equal objectives.
pub fn check_certificate(lp: &RationalLinearProgram, sol: &LpSolution) -> Result<(), String> {
    if sol.status != LpStatus::Optimal {
        return Err(format!("status is {:?}", sol.status));
    }
    let x = &sol.primal;
    if let Some(v) = lp.first_violation(x) {
        return Err(v);
    }
    if lp.evaluate(x) != sol.objective {
        return Err("objective does not match primal".into());
    }
    // orient everything as a maximisation
    let s = if lp.maximize { Rational::one() } else { -Rational::one() };
    let mut dual_obj = Rational::zero();
    for (i, c) in lp.constraints.iter().enumerate() {
        let y = &sol.dual[i] * &s;
        let ok = match c.sense {
            Sense::Le => !y.is_negative(),
            Sense::Ge => !y.is_positive(),
            Sense::Eq => true,
        };
        if !ok {
            return Err(format!("dual of {} has the wrong sign", c.name));
        }
        if !y.is_zero() && lp.row_value(i, x) != c.rhs {
            return Err(format!("complementary slackness fails on {}", c.name));
        }
        dual_obj += &sol.dual[i] * &c.rhs;
    }
    let cvec = lp.objective_vector();
    for (j, v) in lp.variables.iter().enumerate() {
        let mut d = cvec[j].clone();
        for (i, c) in lp.constraints.iter().enumerate() {
            for (k, a) in &c.coeffs {
                if *k == j {
                    d -= &sol.dual[i] * a;
                }
            }
        }
        if d != sol.bound_dual[j] {
            return Err(format!("reduced cost of {} is inconsistent", v.name));
        }
        let ds = &d * &s;
        if ds.is_positive() {
            match &v.upper {
                Some(u) if &x[j] == u => dual_obj += &d * u,
                _ => return Err(format!("{} should sit at its upper bound", v.name)),
            }
        } else if ds.is_negative() {
            match &v.lower {
                Some(l) if &x[j] == l => dual_obj += &d * l,
                _ => return Err(format!("{} should sit at its lower bound", v.name)),
            }
        }
    }
    if dual_obj != sol.objective {
        return Err(format!("dual objective {} differs from primal {}", dual_obj, sol.objective));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn single_variable() {
        let mut lp = RationalLinearProgram::new(true);
        let x = lp.add_var("x", Some(r(0)), None);
        lp.add_constraint("cap", vec![(x, r(1))], Sense::Le, r(3));
        lp.set_objective(vec![(x, r(1))]);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.primal[x], r(3));
        assert_eq!(sol.dual[0], r(1));
        check_certificate(&lp, &sol).unwrap();
    }

    #[test]
    fn infeasible_pair() {
        let mut lp = RationalLinearProgram::new(true);
        let x = lp.add_var("x", None, None);
        lp.add_constraint("a", vec![(x, r(1))], Sense::Le, r(0));
        lp.add_constraint("b", vec![(x, r(1))], Sense::Ge, r(1));
        assert_eq!(solve(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded() {
        let mut lp = RationalLinearProgram::new(true);
        let x = lp.add_var("x", Some(r(0)), None);
        let y = lp.add_var("y", Some(r(0)), None);
        lp.add_constraint("a", vec![(x, r(1)), (y, r(-1))], Sense::Le, r(1));
        lp.set_objective(vec![(x, r(1))]);
        assert_eq!(solve(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn min_with_bounds_and_free_vars() {
        // min x + 2y, x + y >= 3/2, x <= 1, y free, y >= -5
        let mut lp = RationalLinearProgram::new(false);
        let x = lp.add_var("x", None, Some(r(1)));
        let y = lp.add_var("y", Some(r(-5)), None);
        let z = lp.add_var("z", Some(r(2)), Some(r(2)));
        lp.add_constraint("c", vec![(x, r(1)), (y, r(1)), (z, r(0))], Sense::Ge, Rational::new(3, 2));
        lp.set_objective(vec![(x, r(1)), (y, r(2)), (z, r(1))]);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.primal, vec![r(1), Rational::new(1, 2), r(2)]);
        assert_eq!(sol.objective, r(4));
        check_certificate(&lp, &sol).unwrap();
    }

    #[test]
    fn equality_rows_with_redundancy() {
        let mut lp = RationalLinearProgram::new(true);
        let x = lp.add_var("x", Some(r(0)), None);
        let y = lp.add_var("y", Some(r(0)), None);
        lp.add_constraint("e1", vec![(x, r(1)), (y, r(1))], Sense::Eq, r(2));
        lp.add_constraint("e2", vec![(x, r(2)), (y, r(2))], Sense::Eq, r(4));
        lp.add_constraint("e3", vec![(x, r(-1))], Sense::Le, r(-1));
        lp.set_objective(vec![(y, r(1))]);
        let sol = solve(&lp);
        assert_eq!(sol.primal, vec![r(1), r(1)]);
        check_certificate(&lp, &sol).unwrap();
    }

    /// Assignment polytope with many tied objective coefficients.
    fn assignment(n: usize, costs: &[i64]) -> RationalLinearProgram {
        let mut lp = RationalLinearProgram::new(true);
        let mut vars = vec![vec![0; n]; n];
        for (i, row) in vars.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = lp.add_var(format!("x{i}{j}"), Some(r(0)), None);
            }
        }
        for i in 0..n {
            lp.add_constraint(format!("r{i}"), (0..n).map(|j| (vars[i][j], r(1))).collect(), Sense::Eq, r(1));
            lp.add_constraint(format!("c{i}"), (0..n).map(|j| (vars[j][i], r(1))).collect(), Sense::Eq, r(1));
        }
        let obj = (0..n * n).map(|k| (vars[k / n][k % n], r(costs[k % costs.len()]))).collect();
        lp.set_objective(obj);
        lp
    }

    fn brute_assignment(n: usize, costs: &[i64]) -> i64 {
        fn go(i: usize, n: usize, used: &mut Vec<bool>, costs: &[i64]) -> i64 {
            if i == n {
                return 0;
            }
            let mut best = i64::MIN;
            for j in 0..n {
                if !used[j] {
                    used[j] = true;
                    best = best.max(costs[(i * n + j) % costs.len()] + go(i + 1, n, used, costs));
                    used[j] = false;
                }
            }
            best
        }
        go(0, n, &mut vec![false; n], costs)
    }

    #[test]
    fn degenerate_assignment_terminates() {
        for n in 2..6 {
            let costs = vec![1; n * n];
            for limit in [0, 3, 1000] {
                let lp = assignment(n, &costs);
                let sol = solve_with(&lp, &SolveOptions { trace: false, dantzig_limit: Some(limit) });
                assert_eq!(sol.objective, r(n as i64));
                check_certificate(&lp, &sol).unwrap();
            }
        }
    }

    proptest! {
        #[test]
        fn assignment_matches_brute_force(n in 2usize..5, costs in proptest::collection::vec(-3i64..4, 16)) {
            let lp = assignment(n, &costs);
            let sol = solve(&lp);
            prop_assert_eq!(sol.objective.clone(), r(brute_assignment(n, &costs)));
            prop_assert!(check_certificate(&lp, &sol).is_ok());
        }

        #[test]
        fn random_box_lps_certify(
            coeffs in proptest::collection::vec(-4i64..5, 12),
            rhs in proptest::collection::vec(-6i64..7, 4),
            obj in proptest::collection::vec(-3i64..4, 3),
            maximize in any::<bool>(),
        ) {
            let mut lp = RationalLinearProgram::new(maximize);
            let vars: Vec<usize> = (0..3).map(|j| lp.add_var(format!("x{j}"), Some(r(-4)), Some(r(4)))).collect();
            for i in 0..4 {
                let sense = [Sense::Le, Sense::Ge, Sense::Eq, Sense::Le][i];
                lp.add_constraint(format!("c{i}"), (0..3).map(|j| (vars[j], r(coeffs[i * 3 + j]))).collect(), sense, r(rhs[i]));
            }
            lp.set_objective((0..3).map(|j| (vars[j], r(obj[j]))).collect());
            let sol = solve(&lp);
            match sol.status {
                LpStatus::Optimal => prop_assert!(check_certificate(&lp, &sol).is_ok(), "{:?}", check_certificate(&lp, &sol)),
                LpStatus::Infeasible => {
                    // no integer point in the box may be feasible
                    for a in -4..=4 { for b in -4..=4 { for c in -4..=4 {
                        prop_assert!(!lp.is_feasible(&[r(a), r(b), r(c)]));
                    }}}
                }
                LpStatus::Unbounded => prop_assert!(false, "box LP cannot be unbounded"),
            }
        }
    }
}
