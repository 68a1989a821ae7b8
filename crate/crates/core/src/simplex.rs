//! Dense two-phase primal simplex.
//!
//! The model is `minimize c·x + offset` subject to sparse rows
//! `a·x {<=, =, >=} b` and bounds `lo <= x <= hi` with finite `lo`.
//! Lower bounds are shifted away, finite upper bounds become extra rows,
//! rows are sign-normalized to `b >= 0`, and slack, surplus and artificial
//! columns are appended. Phase one minimizes the artificial sum, phase two
//! the real objective. Pricing is Dantzig's rule until 50 consecutive
//! degenerate pivots, then Bland's rule until the objective moves again.
//!
//! The returned point is recomputed from the final basis against the
//! original data and checked row by row before it is reported optimal.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

/// One sparse row `sum terms {rel} rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    objective_offset: f64,
    constraints: Vec<Constraint>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    names: Option<Vec<String>>,
}

impl LinearProgram {
    /// `num_vars` variables with bounds `[0, +inf)` and a zero objective.
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![0.0; num_vars],
            objective_offset: 0.0,
            constraints: Vec::new(),
            lower: vec![0.0; num_vars],
            upper: vec![f64::INFINITY; num_vars],
            names: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn objective_offset(&self) -> f64 {
        self.objective_offset
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    pub fn set_objective(&mut self, var: usize, coefficient: f64) {
        self.objective[var] = coefficient;
    }

    pub fn add_objective(&mut self, var: usize, coefficient: f64) {
        self.objective[var] += coefficient;
    }

    pub fn set_objective_offset(&mut self, offset: f64) {
        self.objective_offset = offset;
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    /// Adds a row; zero coefficients are dropped and repeated indices summed.
    pub fn add_constraint(&mut self, terms: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        let mut terms = terms;
        terms.sort_by_key(|&(j, _)| j);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (j, a) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        self.constraints.push(Constraint {
            terms: merged,
            relation,
            rhs,
        });
    }

    /// Attaches variable names used by the text dump.
    pub fn set_names(&mut self, names: Vec<String>) {
        if names.len() == self.num_vars() {
            self.names = Some(names);
        }
    }

    fn name(&self, var: usize) -> String {
        match &self.names {
            Some(names) => names[var].clone(),
            None => format!("x{}", var + 1),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        for (r, row) in self.constraints.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(Error::Validation(format!(
                    "row {} has a non-finite rhs",
                    r + 1
                )));
            }
            for &(j, a) in &row.terms {
                if j >= n {
                    return Err(Error::Validation(format!(
                        "row {} references variable {} of {n}",
                        r + 1,
                        j + 1
                    )));
                }
                if !a.is_finite() {
                    return Err(Error::Validation(format!(
                        "row {} has a non-finite coefficient",
                        r + 1
                    )));
                }
            }
        }
        for j in 0..n {
            if !self.lower[j].is_finite() {
                return Err(Error::Validation(format!(
                    "variable {} needs a finite lower bound",
                    j + 1
                )));
            }
            if self.upper[j].is_nan() || self.upper[j] < self.lower[j] {
                return Err(Error::Validation(format!(
                    "variable {} has empty bounds",
                    j + 1
                )));
            }
            if !self.objective[j].is_finite() {
                return Err(Error::Validation(format!(
                    "variable {} has a non-finite objective coefficient",
                    j + 1
                )));
            }
        }
        Ok(())
    }

    /// Objective value at `x`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective_offset
            + self
                .objective
                .iter()
                .zip(x)
                .map(|(c, v)| c * v)
                .sum::<f64>()
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.constraints {
            let activity: f64 = row.terms.iter().map(|&(j, a)| a * x[j]).sum();
            let v = match row.relation {
                Relation::Le => activity - row.rhs,
                Relation::Ge => row.rhs - activity,
                Relation::Eq => (activity - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        worst
    }
}

/// Plain-text dump: `minimize` / `subject to` / `bounds` / `end`.
impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn term(f: &mut fmt::Formatter<'_>, first: bool, a: f64, name: &str) -> fmt::Result {
            if first {
                write!(f, "{a} {name}")
            } else if a < 0.0 {
                write!(f, " - {} {name}", -a)
            } else {
                write!(f, " + {a} {name}")
            }
        }
        writeln!(f, "minimize")?;
        write!(f, " obj:")?;
        let mut first = true;
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                if first {
                    write!(f, " ")?;
                }
                term(f, first, c, &self.name(j))?;
                first = false;
            }
        }
        if self.objective_offset != 0.0 || first {
            write!(
                f,
                " {}{}",
                if first { "" } else { "+ " },
                self.objective_offset
            )?;
        }
        writeln!(f)?;
        writeln!(f, "subject to")?;
        for (r, row) in self.constraints.iter().enumerate() {
            write!(f, " c{}: ", r + 1)?;
            if row.terms.is_empty() {
                write!(f, "0")?;
            }
            for (pos, &(j, a)) in row.terms.iter().enumerate() {
                term(f, pos == 0, a, &self.name(j))?;
            }
            writeln!(f, " {} {}", row.relation.symbol(), row.rhs)?;
        }
        writeln!(f, "bounds")?;
        for j in 0..self.num_vars() {
            if self.upper[j].is_finite() {
                writeln!(
                    f,
                    " {} <= {} <= {}",
                    self.lower[j],
                    self.name(j),
                    self.upper[j]
                )?;
            } else {
                writeln!(f, " {} >= {}", self.name(j), self.lower[j])?;
            }
        }
        writeln!(f, "end")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
            LpStatus::IterationLimit => "iteration_limit",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value (including the offset); `NaN` unless optimal.
    pub objective: f64,
    /// Variable values; empty unless optimal.
    pub x: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    /// Pivot cap; `None` means `50 · (rows + columns)`.
    pub max_iterations: Option<usize>,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub stall_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-9,
            opt_tol: 1e-9,
            max_iterations: None,
            stall_limit: 50,
        }
    }
}

/// Residual of the phase-one objective above which the program is infeasible.
const PHASE_ONE_RESIDUAL: f64 = 1e-7;
/// Smallest admissible pivot magnitude.
const PIVOT_TOL: f64 = 1e-9;
/// Tolerance of the final row-by-row feasibility check (scaled per row).
const VERIFY_TOL: f64 = 1e-7;

/// Solves with default tolerances.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    solve_with(lp, &SolveOptions::default())
}

pub fn solve_with(lp: &LinearProgram, options: &SolveOptions) -> Result<LpSolution> {
    lp.validate()?;
    let mut tableau = Tableau::build(lp);
    let cap = options
        .max_iterations
        .unwrap_or(50 * (tableau.rows + tableau.cols));
    let mut run = Run {
        options: *options,
        cap,
        iterations: 0,
    };

    let failed = |status, iterations| LpSolution {
        status,
        objective: f64::NAN,
        x: Vec::new(),
        iterations,
    };

    if tableau.first_artificial < tableau.cols {
        let mut cost = vec![0.0; tableau.cols];
        for c in cost.iter_mut().skip(tableau.first_artificial) {
            *c = 1.0;
        }
        match tableau.optimize(&cost, true, &mut run) {
            Phase::Optimal => {}
            Phase::IterationLimit => return Ok(failed(LpStatus::IterationLimit, run.iterations)),
            // Phase one is bounded below by zero.
            Phase::Unbounded => unreachable!("phase one cannot be unbounded"),
        }
        let residual: f64 = (0..tableau.rows)
            .filter(|&r| tableau.basis[r] >= tableau.first_artificial)
            .map(|r| tableau.rhs(r))
            .sum();
        if residual > PHASE_ONE_RESIDUAL {
            return Ok(failed(LpStatus::Infeasible, run.iterations));
        }
        tableau.drive_out_artificials();
    }

    let mut cost = vec![0.0; tableau.cols];
    cost[..tableau.structural].copy_from_slice(&lp.objective);
    match tableau.optimize(&cost, false, &mut run) {
        Phase::Optimal => {}
        Phase::Unbounded => return Ok(failed(LpStatus::Unbounded, run.iterations)),
        Phase::IterationLimit => return Ok(failed(LpStatus::IterationLimit, run.iterations)),
    }

    let x = tableau.recover(lp);
    let scale = x.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    for (r, row) in lp.constraints.iter().enumerate() {
        let activity: f64 = row.terms.iter().map(|&(j, a)| a * x[j]).sum();
        let magnitude = row
            .terms
            .iter()
            .fold(row.rhs.abs(), |acc, &(_, a)| acc.max(a.abs()));
        let tol = VERIFY_TOL.max(options.feas_tol) * (1.0 + magnitude * scale);
        let violation = match row.relation {
            Relation::Le => activity - row.rhs,
            Relation::Ge => row.rhs - activity,
            Relation::Eq => (activity - row.rhs).abs(),
        };
        if violation > tol {
            return Err(Error::Verification(format!(
                "simplex solution violates row {} by {violation:e}",
                r + 1
            )));
        }
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: lp.evaluate(&x),
        x,
        iterations: run.iterations,
    })
}

struct Run {
    options: SolveOptions,
    cap: usize,
    iterations: usize,
}

enum Phase {
    Optimal,
    Unbounded,
    IterationLimit,
}

/// Row-major tableau `[A | b]` in the standard-form columns.
struct Tableau {
    rows: usize,
    /// Total columns excluding the rhs.
    cols: usize,
    structural: usize,
    first_artificial: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    /// Standard-form rows (sign-normalized), kept for the final re-solve.
    original: Vec<Vec<(usize, f64)>>,
    original_rhs: Vec<f64>,
    /// Shift applied to each structural variable (its lower bound).
    shift: Vec<f64>,
}

/// Sparse terms, relation and right-hand side.
type Row = (Vec<(usize, f64)>, Relation, f64);

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        // Rows after shifting lower bounds and adding finite upper bounds.
        let mut rows: Vec<Row> = Vec::new();
        for row in &lp.constraints {
            let shifted: f64 = row.terms.iter().map(|&(j, a)| a * lp.lower[j]).sum();
            rows.push((row.terms.clone(), row.relation, row.rhs - shifted));
        }
        for j in 0..n {
            if lp.upper[j].is_finite() {
                rows.push((vec![(j, 1.0)], Relation::Le, lp.upper[j] - lp.lower[j]));
            }
        }
        for row in rows.iter_mut() {
            if row.2 < 0.0 {
                for t in row.0.iter_mut() {
                    t.1 = -t.1;
                }
                row.1 = row.1.flipped();
                row.2 = -row.2;
            }
        }
        let m = rows.len();
        let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let artificials = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let cols = n + slacks + artificials;
        let width = cols + 1;
        let mut data = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let mut original = Vec::with_capacity(m);
        let mut original_rhs = Vec::with_capacity(m);
        let mut next_slack = n;
        let mut next_art = n + slacks;
        for (r, (terms, rel, rhs)) in rows.into_iter().enumerate() {
            let base = r * width;
            let mut full = terms.clone();
            for &(j, a) in &terms {
                data[base + j] += a;
            }
            match rel {
                Relation::Le => {
                    data[base + next_slack] = 1.0;
                    full.push((next_slack, 1.0));
                    basis[r] = next_slack;
                    next_slack += 1;
                }
                Relation::Ge => {
                    data[base + next_slack] = -1.0;
                    full.push((next_slack, -1.0));
                    next_slack += 1;
                    data[base + next_art] = 1.0;
                    full.push((next_art, 1.0));
                    basis[r] = next_art;
                    next_art += 1;
                }
                Relation::Eq => {
                    data[base + next_art] = 1.0;
                    full.push((next_art, 1.0));
                    basis[r] = next_art;
                    next_art += 1;
                }
            }
            data[base + cols] = rhs;
            original.push(full);
            original_rhs.push(rhs);
        }
        Self {
            rows: m,
            cols,
            structural: n,
            first_artificial: n + slacks,
            width,
            data,
            basis,
            original,
            original_rhs,
            shift: lp.lower.clone(),
        }
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.data[r * self.width + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize, reduced: &mut [f64]) {
        let width = self.width;
        let p = self.at(pr, pc);
        let row_start = pr * width;
        for v in &mut self.data[row_start..row_start + width] {
            *v /= p;
        }
        self.data[row_start + pc] = 1.0;
        let nz: Vec<usize> = (0..width)
            .filter(|&c| self.data[row_start + c] != 0.0)
            .collect();
        let pivot_row: Vec<f64> = nz.iter().map(|&c| self.data[row_start + c]).collect();
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let factor = self.data[r * width + pc];
            if factor == 0.0 {
                continue;
            }
            let base = r * width;
            for (&c, &v) in nz.iter().zip(&pivot_row) {
                self.data[base + c] -= factor * v;
            }
            self.data[base + pc] = 0.0;
            let rhs = &mut self.data[base + self.cols];
            if *rhs < 0.0 && *rhs > -1e-12 {
                *rhs = 0.0;
            }
        }
        let factor = reduced[pc];
        if factor != 0.0 {
            for (&c, &v) in nz.iter().zip(&pivot_row) {
                reduced[c] -= factor * v;
            }
            reduced[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Minimizes `cost` from the current basis. `reduced` holds reduced
    /// costs, with the negated objective value in the rhs slot.
    fn optimize(&mut self, cost: &[f64], phase_one: bool, run: &mut Run) -> Phase {
        let width = self.width;
        let mut reduced = vec![0.0; width];
        reduced[..self.cols].copy_from_slice(cost);
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                let base = r * width;
                for c in 0..width {
                    reduced[c] -= cb * self.data[base + c];
                }
            }
        }
        let allowed = if phase_one {
            self.cols
        } else {
            self.first_artificial
        };
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            let entering = if bland {
                (0..allowed).find(|&c| reduced[c] < -run.options.opt_tol)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for (c, &d) in reduced.iter().enumerate().take(allowed) {
                    if d < -run.options.opt_tol && best.is_none_or(|(_, bd)| d < bd) {
                        best = Some((c, d));
                    }
                }
                best.map(|(c, _)| c)
            };
            let Some(pc) = entering else {
                return Phase::Optimal;
            };
            if run.iterations >= run.cap {
                return Phase::IterationLimit;
            }

            // Ratio test; ties go to the larger pivot (Dantzig) or the
            // smaller basic index (Bland).
            let mut leave: Option<(usize, f64, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(r).max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio, a)),
                    Some((br, bratio, ba)) => {
                        let tie = (ratio - bratio).abs() <= 1e-12 * (1.0 + bratio.abs());
                        let better = if tie {
                            if bland {
                                self.basis[r] < self.basis[br]
                            } else {
                                a > ba
                            }
                        } else {
                            ratio < bratio
                        };
                        if better {
                            Some((r, ratio, a))
                        } else {
                            Some((br, bratio, ba))
                        }
                    }
                };
            }
            let Some((pr, ratio, _)) = leave else {
                return Phase::Unbounded;
            };
            let degenerate = ratio * -reduced[pc] <= run.options.feas_tol;
            self.pivot(pr, pc, &mut reduced);
            run.iterations += 1;
            if degenerate {
                degenerate_run += 1;
                if degenerate_run >= run.options.stall_limit {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
    }

    /// Pivots zero-level artificials out of the basis where a structural or
    /// slack column can replace them; rows where none can are redundant.
    fn drive_out_artificials(&mut self) {
        let mut scratch = vec![0.0; self.width];
        for r in 0..self.rows {
            if self.basis[r] < self.first_artificial {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for c in 0..self.first_artificial {
                let a = self.at(r, c).abs();
                if a > PIVOT_TOL && best.is_none_or(|(_, ba)| a > ba) {
                    best = Some((c, a));
                }
            }
            if let Some((c, _)) = best {
                self.pivot(r, c, &mut scratch);
            }
        }
    }

    /// Recomputes the basic solution from the standard-form rows by solving
    /// `B x_B = b` afresh, then maps back to the original variables.
    fn recover(&self, lp: &LinearProgram) -> Vec<f64> {
        let m = self.rows;
        let mut column_of = vec![usize::MAX; self.cols];
        for (pos, &c) in self.basis.iter().enumerate() {
            column_of[c] = pos;
        }
        let mut mat = vec![0.0; m * (m + 1)];
        for (r, row) in self.original.iter().enumerate() {
            for &(c, a) in row {
                let pos = column_of[c];
                if pos != usize::MAX {
                    mat[r * (m + 1) + pos] += a;
                }
            }
            mat[r * (m + 1) + m] = self.original_rhs[r];
        }
        let solved = gauss_solve(&mut mat, m);
        let mut xb: Vec<f64> = match solved {
            Some(v) => v,
            // Singular basis: fall back to the tableau's own values.
            None => (0..m).map(|r| self.rhs(r)).collect(),
        };
        for v in xb.iter_mut() {
            if *v < 0.0 && *v > -1e-9 {
                *v = 0.0;
            }
        }
        let mut x = vec![0.0; self.structural];
        for (pos, &c) in self.basis.iter().enumerate() {
            if c < self.structural {
                x[c] = xb[pos];
            }
        }
        for j in 0..self.structural {
            x[j] = (x[j] + self.shift[j]).max(lp.lower[j]).min(lp.upper[j]);
        }
        x
    }
}

/// Gaussian elimination with partial pivoting on an `m × (m+1)` augmented
/// matrix; `None` if singular.
fn gauss_solve(mat: &mut [f64], m: usize) -> Option<Vec<f64>> {
    let w = m + 1;
    for col in 0..m {
        let (piv, mag) =
            (col..m)
                .map(|r| (r, mat[r * w + col].abs()))
                .fold(
                    (col, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if mag < 1e-12 {
            return None;
        }
        if piv != col {
            for c in 0..w {
                mat.swap(piv * w + c, col * w + c);
            }
        }
        let p = mat[col * w + col];
        for r in 0..m {
            if r == col {
                continue;
            }
            let f = mat[r * w + col] / p;
            if f != 0.0 {
                for c in col..w {
                    mat[r * w + c] -= f * mat[col * w + c];
                }
            }
        }
    }
    Some((0..m).map(|r| mat[r * w + m] / mat[r * w + r]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn two_variable_maximization() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, -1.0);
        lp.set_objective(1, -2.0);
        lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Le, 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 2.0).abs() < 1e-12);
        assert!(sol.x[0].abs() < 1e-12 && (sol.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.set_objective(0, 1.0);
        lp.add_constraint(vec![(0, 1.0)], Relation::Le, -1.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new(1);
        lp.set_objective(0, -1.0);
        lp.add_constraint(vec![(0, 1.0)], Relation::Ge, 0.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn bounds_and_equalities() {
        // min x0 + x1, x0 + x1 = 3, 1 <= x0 <= 2, x1 <= 1.5
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 1.0);
        lp.set_objective(1, 2.0);
        lp.set_bounds(0, 1.0, 2.0);
        lp.set_bounds(1, 0.0, 1.5);
        lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 3.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] - 2.0).abs() < 1e-12 && (sol.x[1] - 1.0).abs() < 1e-12);
        assert!((sol.objective - 4.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 1.0);
        lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 1.0);
        lp.add_constraint(vec![(0, 2.0), (1, 2.0)], Relation::Eq, 2.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.objective.abs() < 1e-12);
    }

    #[test]
    fn iteration_cap_is_a_status() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, -1.0);
        lp.set_objective(1, -1.0);
        lp.add_constraint(vec![(0, 1.0)], Relation::Le, 1.0);
        lp.add_constraint(vec![(1, 1.0)], Relation::Le, 1.0);
        let options = SolveOptions {
            max_iterations: Some(1),
            ..SolveOptions::default()
        };
        assert_eq!(
            solve_with(&lp, &options).unwrap().status,
            LpStatus::IterationLimit
        );
    }

    #[test]
    fn malformed_programs_are_rejected() {
        let mut lp = LinearProgram::new(1);
        lp.set_bounds(0, f64::NEG_INFINITY, 1.0);
        assert!(solve(&lp).is_err());
        let mut lp = LinearProgram::new(1);
        lp.add_constraint(vec![(3, 1.0)], Relation::Le, 1.0);
        assert!(solve(&lp).is_err());
    }

    #[test]
    fn text_dump() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 1.0);
        lp.set_objective(1, -2.0);
        lp.set_bounds(1, 0.0, 1.0);
        lp.add_constraint(vec![(0, 1.0), (1, -1.0)], Relation::Ge, 0.5);
        let text = lp.to_string();
        assert_eq!(
            text,
            "minimize\n obj: 1 x1 - 2 x2\nsubject to\n c1: 1 x1 - 1 x2 >= 0.5\nbounds\n x1 >= 0\n 0 <= x2 <= 1\nend\n"
        );
    }

    #[test]
    fn determinism() {
        let mut lp = LinearProgram::new(3);
        for j in 0..3 {
            lp.set_objective(j, -1.0);
        }
        lp.add_constraint(vec![(0, 1.0), (1, 1.0), (2, 1.0)], Relation::Le, 1.0);
        lp.add_constraint(vec![(0, 1.0), (1, -1.0)], Relation::Eq, 0.0);
        let a = solve(&lp).unwrap();
        let b = solve(&lp).unwrap();
        assert_eq!(a, b);
    }
}
