//! Dense two-phase simplex solver.
//!
//! Pipeline: validate, eliminate free variables through equality rows,
//! map the remaining variables to `y >= 0` (shift, mirror or split),
//! run phase 1 on the artificial sum, then phase 2 on the objective.
//! Pricing is Dantzig's rule until a run of degenerate pivots is seen,
//! after which Bland's rule is used for the rest of the solve, so the
//! method always terminates.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Entering / ratio-test pivot tolerance.
pub const PIVOT_TOL: f64 = 1e-9;
/// Residual feasibility tolerance promised for optimal points.
pub const FEAS_TOL: f64 = 1e-7;
/// Phase-1 objective above this value means the LP is infeasible.
const PHASE1_TOL: f64 = 1e-9;
const DEGENERATE_STREAK: usize = 50;
const ZERO: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }

    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `min c·x` subject to linear constraints and per-variable bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    bounds: Vec<(f64, f64)>,
    names: Vec<String>,
}

impl LinearProgram {
    /// All variables start in `[0, +∞)` with zero objective.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); num_vars],
            names: (0..num_vars).map(|j| format!("x{j}")).collect(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn set_objective(&mut self, objective: Vec<f64>) {
        assert_eq!(objective.len(), self.num_vars, "objective length");
        self.objective = objective;
    }

    pub fn set_objective_coeff(&mut self, var: usize, value: f64) {
        self.objective[var] = value;
    }

    pub fn add_objective_coeff(&mut self, var: usize, value: f64) {
        self.objective[var] += value;
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) {
        self.bounds[var] = (lo, hi);
    }

    pub fn set_name(&mut self, var: usize, name: impl Into<String>) {
        self.names[var] = name.into();
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> usize {
        assert_eq!(coeffs.len(), self.num_vars, "constraint length");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    /// Add a constraint from `(var, coeff)` terms; repeated vars accumulate.
    pub fn add_sparse(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) -> usize {
        let mut coeffs = vec![0.0; self.num_vars];
        for &(j, a) in terms {
            coeffs[j] += a;
        }
        self.add_constraint(coeffs, relation, rhs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars || self.bounds.len() != self.num_vars {
            return Err(Error::LpInput("objective/bounds length mismatch".into()));
        }
        if let Some(j) = self.objective.iter().position(|c| !c.is_finite()) {
            return Err(Error::LpInput(format!("objective coefficient {j} is not finite")));
        }
        for (k, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.num_vars {
                return Err(Error::LpInput(format!("constraint {k} has wrong length")));
            }
            if c.coeffs.iter().any(|a| !a.is_finite()) || !c.rhs.is_finite() {
                return Err(Error::LpInput(format!("constraint {k} has a non-finite entry")));
            }
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY || lo > hi
            {
                return Err(Error::LpInput(format!("variable {j} has bounds [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (&(lo, hi), &v) in self.bounds.iter().zip(x) {
            worst = worst.max(lo - v).max(v - hi);
        }
        worst
    }

    pub fn is_feasible_point(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.num_vars && self.max_violation(x) <= tol
    }

    /// Plain-text dump in CPLEX LP format, for diffing against external solvers.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::new();
        let term = |out: &mut String, first: &mut bool, a: f64, name: &str| {
            if a == 0.0 {
                return;
            }
            if *first {
                let _ = write!(out, " {a} {name}");
            } else if a < 0.0 {
                let _ = write!(out, " - {} {name}", -a);
            } else {
                let _ = write!(out, " + {a} {name}");
            }
            *first = false;
        };
        out.push_str("\\ strict-install linear program\nMinimize\n obj:");
        let mut first = true;
        for (j, &c) in self.objective.iter().enumerate() {
            term(&mut out, &mut first, c, &self.names[j]);
        }
        if first {
            out.push_str(" 0 x0");
        }
        out.push_str("\nSubject To\n");
        for (k, c) in self.constraints.iter().enumerate() {
            let _ = write!(out, " c{k}:");
            let mut first = true;
            for (j, &a) in c.coeffs.iter().enumerate() {
                term(&mut out, &mut first, a, &self.names[j]);
            }
            if first {
                out.push_str(" 0 x0");
            }
            let _ = writeln!(out, " {} {}", c.relation.symbol(), c.rhs);
        }
        out.push_str("Bounds\n");
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            let name = &self.names[j];
            let _ = match (lo.is_finite(), hi.is_finite()) {
                (false, false) => writeln!(out, " {name} free"),
                (true, false) => writeln!(out, " {name} >= {lo}"),
                (false, true) => writeln!(out, " -inf <= {name} <= {hi}"),
                (true, true) => writeln!(out, " {lo} <= {name} <= {hi}"),
            };
        }
        out.push_str("End\n");
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Variable assignment, present when `status == Optimal`.
    pub point: Option<Vec<f64>>,
    pub objective_value: Option<f64>,
}

impl LpSolution {
    fn with_status(status: LpStatus) -> Self {
        LpSolution {
            status,
            point: None,
            objective_value: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let mut pre = Presolved::new(lp);
    if !pre.eliminate_free_equalities() {
        return Ok(LpSolution::with_status(LpStatus::Infeasible));
    }
    let std = StandardForm::build(&pre);
    let y = match std.solve()? {
        Outcome::Optimal(y) => y,
        Outcome::Infeasible => return Ok(LpSolution::with_status(LpStatus::Infeasible)),
        Outcome::Unbounded => return Ok(LpSolution::with_status(LpStatus::Unbounded)),
    };
    let x = pre.postsolve(&std.recover(&y));
    let violation = lp.max_violation(&x);
    if violation > 10.0 * FEAS_TOL {
        return Err(Error::Internal(format!(
            "simplex returned a point violating constraints by {violation:e}"
        )));
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: Some(lp.objective_value(&x)),
        point: Some(x),
    })
}

/// Working copy of the LP with free variables eliminated through equality rows.
struct Presolved {
    num_vars: usize,
    objective: Vec<f64>,
    rows: Vec<Constraint>,
    bounds: Vec<(f64, f64)>,
    eliminated: Vec<bool>,
    /// `(var, row at elimination time)` in elimination order.
    substitutions: Vec<(usize, Constraint)>,
}

impl Presolved {
    fn new(lp: &LinearProgram) -> Self {
        Presolved {
            num_vars: lp.num_vars,
            objective: lp.objective.clone(),
            rows: lp.constraints.clone(),
            bounds: lp.bounds.clone(),
            eliminated: vec![false; lp.num_vars],
            substitutions: Vec::new(),
        }
    }

    fn is_free(&self, j: usize) -> bool {
        let (lo, hi) = self.bounds[j];
        lo == f64::NEG_INFINITY && hi == f64::INFINITY
    }

    /// Returns `false` if an equality reduces to `0 = b` with `b != 0`.
    fn eliminate_free_equalities(&mut self) -> bool {
        let mut live: Vec<bool> = vec![true; self.rows.len()];
        loop {
            let mut changed = false;
            for r in 0..self.rows.len() {
                if !live[r] || self.rows[r].relation != Relation::Eq {
                    continue;
                }
                let row = &self.rows[r];
                let mut pick: Option<(usize, f64)> = None;
                for (j, &a) in row.coeffs.iter().enumerate() {
                    if self.eliminated[j] || !self.is_free(j) || a.abs() <= PIVOT_TOL {
                        continue;
                    }
                    if pick.is_none_or(|(_, best)| a.abs() > best.abs()) {
                        pick = Some((j, a));
                    }
                }
                let Some((p, ap)) = pick else { continue };
                let pivot_row = self.rows[r].clone();
                for (q, other) in self.rows.iter_mut().enumerate() {
                    if q == r || !live[q] {
                        continue;
                    }
                    let f = other.coeffs[p] / ap;
                    if f == 0.0 {
                        continue;
                    }
                    for (o, &a) in other.coeffs.iter_mut().zip(&pivot_row.coeffs) {
                        *o -= f * a;
                    }
                    other.coeffs[p] = 0.0;
                    other.rhs -= f * pivot_row.rhs;
                }
                let f = self.objective[p] / ap;
                if f != 0.0 {
                    for (o, &a) in self.objective.iter_mut().zip(&pivot_row.coeffs) {
                        *o -= f * a;
                    }
                    self.objective[p] = 0.0;
                }
                self.eliminated[p] = true;
                live[r] = false;
                self.substitutions.push((p, pivot_row));
                changed = true;
            }
            if !changed {
                break;
            }
        }
        let mut kept = Vec::new();
        for (r, row) in std::mem::take(&mut self.rows).into_iter().enumerate() {
            if !live[r] {
                continue;
            }
            let scale = row.coeffs.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
            if scale <= ZERO {
                let ok = match row.relation {
                    Relation::Le => row.rhs >= -FEAS_TOL,
                    Relation::Ge => row.rhs <= FEAS_TOL,
                    Relation::Eq => row.rhs.abs() <= FEAS_TOL,
                };
                if !ok {
                    return false;
                }
                continue;
            }
            kept.push(row);
        }
        self.rows = kept;
        true
    }

    fn postsolve(&self, reduced: &[f64]) -> Vec<f64> {
        let mut x = reduced.to_vec();
        for (p, row) in self.substitutions.iter().rev() {
            let rest: f64 = row
                .coeffs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != *p)
                .map(|(j, a)| a * x[j])
                .sum();
            x[*p] = (row.rhs - rest) / row.coeffs[*p];
        }
        x
    }
}

#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// `x = lo + y`.
    Shift(f64),
    /// `x = hi - y`.
    Mirror(f64),
    /// `x = y[pos] - y[neg]`.
    Split(usize, usize),
    /// Eliminated in presolve; restored by back-substitution.
    Eliminated,
}

enum Outcome {
    Optimal(Vec<f64>),
    Infeasible,
    Unbounded,
}

struct StandardForm {
    num_vars: usize,
    maps: Vec<(VarMap, usize)>,
    num_y: usize,
    cost: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

impl StandardForm {
    fn build(pre: &Presolved) -> Self {
        let mut maps = Vec::with_capacity(pre.num_vars);
        let mut num_y = 0;
        for j in 0..pre.num_vars {
            if pre.eliminated[j] {
                maps.push((VarMap::Eliminated, usize::MAX));
                continue;
            }
            let (lo, hi) = pre.bounds[j];
            let k = num_y;
            let m = if lo.is_finite() {
                num_y += 1;
                VarMap::Shift(lo)
            } else if hi.is_finite() {
                num_y += 1;
                VarMap::Mirror(hi)
            } else {
                num_y += 2;
                VarMap::Split(k, k + 1)
            };
            maps.push((m, k));
        }
        let mut cost = vec![0.0; num_y];
        for (j, &(m, y)) in maps.iter().enumerate() {
            let c = pre.objective[j];
            match m {
                VarMap::Shift(_) => cost[y] += c,
                VarMap::Mirror(_) => cost[y] -= c,
                VarMap::Split(p, n) => {
                    cost[p] += c;
                    cost[n] -= c;
                }
                VarMap::Eliminated => {}
            }
        }
        let mut rows = Vec::with_capacity(pre.rows.len());
        for row in &pre.rows {
            let mut a = vec![0.0; num_y];
            let mut rhs = row.rhs;
            for (j, &coef) in row.coeffs.iter().enumerate() {
                if coef == 0.0 {
                    continue;
                }
                match maps[j].0 {
                    VarMap::Shift(lo) => {
                        a[maps[j].1] += coef;
                        rhs -= coef * lo;
                    }
                    VarMap::Mirror(hi) => {
                        a[maps[j].1] -= coef;
                        rhs -= coef * hi;
                    }
                    VarMap::Split(p, n) => {
                        a[p] += coef;
                        a[n] -= coef;
                    }
                    VarMap::Eliminated => {}
                }
            }
            rows.push((a, row.relation, rhs));
        }
        for (j, &(m, y)) in maps.iter().enumerate() {
            if let VarMap::Shift(lo) = m {
                let hi = pre.bounds[j].1;
                if hi.is_finite() {
                    let mut a = vec![0.0; num_y];
                    a[y] = 1.0;
                    rows.push((a, Relation::Le, hi - lo));
                }
            }
        }
        StandardForm {
            num_vars: pre.num_vars,
            maps,
            num_y,
            cost,
            rows,
        }
    }

    fn recover(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.num_vars];
        for (j, &(m, k)) in self.maps.iter().enumerate() {
            x[j] = match m {
                VarMap::Shift(lo) => lo + y[k],
                VarMap::Mirror(hi) => hi - y[k],
                VarMap::Split(p, n) => y[p] - y[n],
                VarMap::Eliminated => 0.0,
            };
        }
        x
    }

    fn solve(&self) -> Result<Outcome> {
        let m = self.rows.len();
        if m == 0 {
            // Only sign constraints: optimal at y = 0 unless some cost is negative.
            if self.cost.iter().any(|&c| c < -PIVOT_TOL) {
                return Ok(Outcome::Unbounded);
            }
            return Ok(Outcome::Optimal(vec![0.0; self.num_y]));
        }
        let mut num_slack = 0;
        let mut num_art = 0;
        let mut normalized = Vec::with_capacity(m);
        for (a, rel, rhs) in &self.rows {
            let (a, rel, rhs) = if *rhs < 0.0 {
                (a.iter().map(|v| -v).collect::<Vec<_>>(), rel.flipped(), -rhs)
            } else {
                (a.clone(), *rel, *rhs)
            };
            match rel {
                Relation::Le => num_slack += 1,
                Relation::Ge => {
                    num_slack += 1;
                    num_art += 1;
                }
                Relation::Eq => num_art += 1,
            }
            normalized.push((a, rel, rhs));
        }
        let ncols = self.num_y + num_slack + num_art;
        let art_start = self.num_y + num_slack;
        let mut tab = Tableau::new(m, ncols);
        let mut slack = self.num_y;
        let mut art = art_start;
        for (i, (a, rel, rhs)) in normalized.into_iter().enumerate() {
            tab.row_mut(i)[..self.num_y].copy_from_slice(&a);
            *tab.rhs_mut(i) = rhs;
            match rel {
                Relation::Le => {
                    tab.row_mut(i)[slack] = 1.0;
                    tab.basis[i] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    tab.row_mut(i)[slack] = -1.0;
                    tab.row_mut(i)[art] = 1.0;
                    tab.basis[i] = art;
                    slack += 1;
                    art += 1;
                }
                Relation::Eq => {
                    tab.row_mut(i)[art] = 1.0;
                    tab.basis[i] = art;
                    art += 1;
                }
            }
        }

        if num_art > 0 {
            let mut phase1 = vec![0.0; ncols];
            phase1[art_start..].iter_mut().for_each(|c| *c = 1.0);
            tab.set_costs(&phase1);
            if tab.optimize(ncols)? == Step::Unbounded {
                return Err(Error::Internal("phase 1 reported unbounded".into()));
            }
            if tab.objective() > PHASE1_TOL {
                return Ok(Outcome::Infeasible);
            }
            tab.drive_out_artificials(art_start);
        }

        let mut phase2 = vec![0.0; ncols];
        phase2[..self.num_y].copy_from_slice(&self.cost);
        tab.set_costs(&phase2);
        if tab.optimize(art_start)? == Step::Unbounded {
            return Ok(Outcome::Unbounded);
        }
        let mut y = vec![0.0; self.num_y];
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < self.num_y {
                y[b] = tab.rhs(i).max(0.0);
            }
        }
        Ok(Outcome::Optimal(y))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Optimal,
    Unbounded,
}

/// Canonical-form tableau. The last row holds reduced costs with `-z` in
/// its rhs slot.
struct Tableau {
    m: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    removed: Vec<bool>,
}

impl Tableau {
    fn new(m: usize, ncols: usize) -> Self {
        let width = ncols + 1;
        Tableau {
            m,
            width,
            data: vec![0.0; (m + 1) * width],
            basis: vec![usize::MAX; m],
            removed: vec![false; m],
        }
    }

    fn ncols(&self) -> usize {
        self.width - 1
    }

    fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let w = self.width;
        &mut self.data[i * w..(i + 1) * w]
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    fn rhs_mut(&mut self, i: usize) -> &mut f64 {
        let k = i * self.width + self.width - 1;
        &mut self.data[k]
    }

    fn objective(&self) -> f64 {
        -self.rhs(self.m)
    }

    fn set_costs(&mut self, cost: &[f64]) {
        let m = self.m;
        let w = self.width;
        let mut d = vec![0.0; w];
        d[..cost.len()].copy_from_slice(cost);
        for i in 0..m {
            if self.removed[i] {
                continue;
            }
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (dj, &a) in d.iter_mut().zip(self.row(i)) {
                    *dj -= cb * a;
                }
            }
        }
        self.row_mut(m).copy_from_slice(&d);
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width;
        let p = self.at(r, e);
        {
            let row = self.row_mut(r);
            for v in row.iter_mut() {
                *v /= p;
            }
            row[e] = 1.0;
        }
        let pivot_row: Vec<f64> = self.row(r).to_vec();
        for i in 0..=self.m {
            if i == r || (i < self.m && self.removed[i]) {
                continue;
            }
            let f = self.data[i * w + e];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.data[i * w..(i + 1) * w];
            for (v, &a) in row.iter_mut().zip(&pivot_row) {
                *v -= f * a;
                if v.abs() < ZERO {
                    *v = 0.0;
                }
            }
            row[e] = 0.0;
            if i < self.m && row[w - 1] < 0.0 && row[w - 1] > -1e-11 {
                row[w - 1] = 0.0;
            }
        }
        self.basis[r] = e;
    }

    /// Simplex iterations over columns `0..allowed`.
    fn optimize(&mut self, allowed: usize) -> Result<Step> {
        let m = self.m;
        let mut bland = false;
        let mut streak = 0;
        let limit = 50_000 + 20 * (m + self.ncols());
        for _ in 0..limit {
            let d = self.row(m);
            let entering = if bland {
                (0..allowed).find(|&j| d[j] < -PIVOT_TOL)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for (j, &dj) in d[..allowed].iter().enumerate() {
                    if dj < -PIVOT_TOL && best.is_none_or(|(_, b)| dj < b) {
                        best = Some((j, dj));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(e) = entering else {
                return Ok(Step::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                if self.removed[i] {
                    continue;
                }
                let a = self.at(i, e);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        let tie = (ratio - lr).abs() <= 1e-12 * (1.0 + lr.abs());
                        let better = if tie {
                            if bland {
                                self.basis[i] < self.basis[li]
                            } else {
                                a > self.at(li, e)
                            }
                        } else {
                            ratio < lr
                        };
                        if better {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
            let Some((r, ratio)) = leave else {
                return Ok(Step::Unbounded);
            };
            if ratio <= 1e-12 {
                streak += 1;
                if streak > DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
            }
            self.pivot(r, e);
        }
        Err(Error::Internal("simplex iteration limit reached".into()))
    }

    /// Pivot zero-level artificials out of the basis; drop redundant rows.
    fn drive_out_artificials(&mut self, art_start: usize) {
        for i in 0..self.m {
            if self.removed[i] || self.basis[i] < art_start {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..art_start {
                let a = self.at(i, j).abs();
                if a > PIVOT_TOL && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            match best {
                Some((j, _)) => self.pivot(i, j),
                None => self.removed[i] = true,
            }
        }
    }
}
