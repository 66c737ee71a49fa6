//! Dense two-phase primal simplex for the small linear programs built by the
//! finite-player module. Self-contained: no external solver.

use serde::{Deserialize, Serialize};

use crate::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
    pub name: String,
}

/// Maximization problem over structural variables that are nonnegative unless
/// marked free.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub maximize: Vec<f64>,
    pub rows: Vec<LpRow>,
    pub free: Vec<bool>,
    pub names: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
    pub row_activity: Vec<f64>,
    pub iterations: usize,
    /// Worst constraint violation of the returned point, checked against the
    /// original rows (not the tableau).
    pub max_violation: f64,
    /// Reduced costs at termination were ≥ −1e-7.
    pub dual_ok: bool,
}

const PIVOT_TOL: f64 = 1e-9;
const CERT_TOL: f64 = 1e-7;

impl LpProblem {
    pub fn new(n: usize) -> LpProblem {
        LpProblem {
            maximize: vec![0.0; n],
            rows: Vec::new(),
            free: vec![false; n],
            names: (0..n).map(|j| format!("x{j}")).collect(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.maximize.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64, name: impl Into<String>) {
        self.rows.push(LpRow { coeffs, sense, rhs, name: name.into() });
    }

    fn check(&self) -> Result<()> {
        let n = self.n_vars();
        if self.free.len() != n || self.names.len() != n {
            return Err(invalid("lp: free/name vectors must match variable count"));
        }
        if !self.maximize.iter().all(|c| c.is_finite()) {
            return Err(invalid("lp: objective coefficients must be finite"));
        }
        for row in &self.rows {
            if row.coeffs.len() != n {
                return Err(invalid(format!(
                    "lp: row {:?} has {} coefficients, want {n}",
                    row.name,
                    row.coeffs.len()
                )));
            }
            if !row.coeffs.iter().all(|c| c.is_finite()) || !row.rhs.is_finite() {
                return Err(invalid(format!("lp: row {:?} has non-finite data", row.name)));
            }
        }
        Ok(())
    }

    /// Two-phase dense simplex with Dantzig pricing and a Bland fallback on
    /// degenerate stalls.
    pub fn solve(&self, pivot_cap: usize) -> Result<LpSolution> {
        self.check()?;
        let n = self.n_vars();
        let m = self.rows.len();

        // Column layout: one column per nonnegative variable, two (plus/minus)
        // per free variable, then one slack/surplus per inequality row, then
        // one artificial per row.
        let mut col_of_var = Vec::with_capacity(n); // (plus column, optional minus column)
        let mut ncols = 0usize;
        for j in 0..n {
            if self.free[j] {
                col_of_var.push((ncols, Some(ncols + 1)));
                ncols += 2;
            } else {
                col_of_var.push((ncols, None));
                ncols += 1;
            }
        }
        let slack_base = ncols;
        let n_slack = self.rows.iter().filter(|r| r.sense != Sense::Eq).count();
        ncols += n_slack;
        let art_base = ncols;
        let total = ncols + m;

        // Tableau rows in canonical form, artificial basis.
        let mut tab = vec![vec![0.0; total + 1]; m];
        let mut slack_idx = slack_base;
        for (i, row) in self.rows.iter().enumerate() {
            for (j, &c) in row.coeffs.iter().enumerate() {
                let (plus, minus) = col_of_var[j];
                tab[i][plus] = c;
                if let Some(mcol) = minus {
                    tab[i][mcol] = -c;
                }
            }
            match row.sense {
                Sense::Le => {
                    tab[i][slack_idx] = 1.0;
                    slack_idx += 1;
                }
                Sense::Ge => {
                    tab[i][slack_idx] = -1.0;
                    slack_idx += 1;
                }
                Sense::Eq => {}
            }
            tab[i][total] = row.rhs;
            if tab[i][total] < 0.0 {
                for v in tab[i].iter_mut() {
                    *v = -*v;
                }
            }
            tab[i][art_base + i] = 1.0;
        }
        let mut basis: Vec<usize> = (0..m).map(|i| art_base + i).collect();

        let rhs_scale = self.rows.iter().map(|r| r.rhs.abs()).fold(1.0, f64::max);

        // Phase 1: minimize the sum of artificials.
        let phase1_cost: Vec<f64> =
            (0..total).map(|j| if j >= art_base { 1.0 } else { 0.0 }).collect();
        let mut iterations = 0usize;
        let outcome = run_simplex(&mut tab, &mut basis, &phase1_cost, art_base, pivot_cap, &mut iterations);
        if outcome == RunOutcome::IterationLimit {
            return Ok(self.failed(LpStatus::IterationLimit, iterations));
        }
        let infeas: f64 = basis
            .iter()
            .enumerate()
            .filter(|&(_, &b)| b >= art_base)
            .map(|(i, _)| tab[i][total])
            .sum();
        if infeas > CERT_TOL * rhs_scale.max(1.0) {
            return Ok(self.failed(LpStatus::Infeasible, iterations));
        }
        // Pivot leftover artificials out where possible; rows where no real
        // column remains are redundant and keep a zero artificial.
        for i in 0..m {
            if basis[i] >= art_base {
                if let Some(j) = (0..art_base).find(|&j| tab[i][j].abs() > CERT_TOL) {
                    pivot(&mut tab, &mut basis, i, j);
                }
            }
        }

        // Phase 2: maximize the real objective (minimize its negation).
        let mut phase2_cost = vec![0.0; total];
        for (j, &(plus, minus)) in col_of_var.iter().enumerate() {
            phase2_cost[plus] = -self.maximize[j];
            if let Some(mcol) = minus {
                phase2_cost[mcol] = self.maximize[j];
            }
        }
        let outcome = run_simplex(&mut tab, &mut basis, &phase2_cost, art_base, pivot_cap, &mut iterations);
        match outcome {
            RunOutcome::IterationLimit => return Ok(self.failed(LpStatus::IterationLimit, iterations)),
            RunOutcome::Unbounded => return Ok(self.failed(LpStatus::Unbounded, iterations)),
            RunOutcome::Converged => {}
        }

        // Extract the point and certify against the original data.
        let mut col_val = vec![0.0; total];
        for (i, &b) in basis.iter().enumerate() {
            col_val[b] = tab[i][total];
        }
        let x: Vec<f64> = col_of_var
            .iter()
            .map(|&(plus, minus)| col_val[plus] - minus.map_or(0.0, |mcol| col_val[mcol]))
            .collect();
        let objective: f64 = self.maximize.iter().zip(&x).map(|(c, v)| c * v).sum();
        let row_activity: Vec<f64> = self
            .rows
            .iter()
            .map(|r| r.coeffs.iter().zip(&x).map(|(c, v)| c * v).sum())
            .collect();
        let mut max_violation = 0.0f64;
        for (r, &act) in self.rows.iter().zip(&row_activity) {
            let scale = r.rhs.abs().max(1.0);
            let v = match r.sense {
                Sense::Le => (act - r.rhs) / scale,
                Sense::Ge => (r.rhs - act) / scale,
                Sense::Eq => (act - r.rhs).abs() / scale,
            };
            max_violation = max_violation.max(v.max(0.0));
        }
        let dual_ok = reduced_costs(&tab, &basis, &phase2_cost)
            .iter()
            .take(art_base)
            .all(|&rc| rc >= -CERT_TOL);

        Ok(LpSolution {
            status: LpStatus::Optimal,
            objective,
            x,
            row_activity,
            iterations,
            max_violation,
            dual_ok,
        })
    }

    fn failed(&self, status: LpStatus, iterations: usize) -> LpSolution {
        LpSolution {
            status,
            objective: f64::NAN,
            x: Vec::new(),
            row_activity: Vec::new(),
            iterations,
            max_violation: f64::NAN,
            dual_ok: false,
        }
    }

    /// Human-readable listing of the program.
    pub fn dump(&self) -> String {
        let term = |c: f64, name: &str, first: bool| -> Option<String> {
            if c == 0.0 {
                return None;
            }
            let mag = c.abs();
            let sign = if first {
                if c < 0.0 { "-".to_string() } else { String::new() }
            } else if c < 0.0 {
                "- ".to_string()
            } else {
                "+ ".to_string()
            };
            Some(format!("{sign}{mag} {name}"))
        };
        let linear = |coeffs: &[f64]| -> String {
            let mut parts = Vec::new();
            for (j, &c) in coeffs.iter().enumerate() {
                if let Some(t) = term(c, &self.names[j], parts.is_empty()) {
                    parts.push(t);
                }
            }
            if parts.is_empty() {
                "0".to_string()
            } else {
                parts.join(" ")
            }
        };
        let mut out = String::new();
        out.push_str(&format!("max: {}\n", linear(&self.maximize)));
        out.push_str("subject to\n");
        for row in &self.rows {
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            out.push_str(&format!("{}: {} {} {}\n", row.name, linear(&row.coeffs), op, row.rhs));
        }
        for (j, name) in self.names.iter().enumerate() {
            if self.free[j] {
                out.push_str(&format!("{name} free\n"));
            } else {
                out.push_str(&format!("{name} >= 0\n"));
            }
        }
        out
    }
}

#[derive(PartialEq, Eq)]
enum RunOutcome {
    Converged,
    Unbounded,
    IterationLimit,
}

fn reduced_costs(tab: &[Vec<f64>], basis: &[usize], cost: &[f64]) -> Vec<f64> {
    let total = cost.len();
    let mut rc = cost.to_vec();
    for (i, &b) in basis.iter().enumerate() {
        let cb = cost[b];
        if cb != 0.0 {
            for j in 0..total {
                rc[j] -= cb * tab[i][j];
            }
        }
    }
    rc
}

fn pivot(tab: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let p = tab[row][col];
    for v in tab[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = tab[row].clone();
    for (i, r) in tab.iter_mut().enumerate() {
        if i != row && r[col] != 0.0 {
            let factor = r[col];
            for (v, &pv) in r.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            r[col] = 0.0;
        }
    }
    basis[row] = col;
}

/// Minimizes `cost` over the current basis. Artificial columns (at and beyond
/// `art_base`) never enter.
fn run_simplex(
    tab: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    art_base: usize,
    pivot_cap: usize,
    iterations: &mut usize,
) -> RunOutcome {
    let m = tab.len();
    let total = cost.len();
    let mut rc = reduced_costs(tab, basis, cost);
    let objective = |tab: &[Vec<f64>], basis: &[usize]| -> f64 {
        basis.iter().enumerate().map(|(i, &b)| cost[b] * tab[i][total]).sum()
    };
    let mut last_obj = objective(tab, basis);
    let mut stalled = 0u32;
    let mut bland = false;

    loop {
        // Entering column.
        let mut enter = None;
        if bland {
            for (j, &r) in rc.iter().enumerate().take(art_base) {
                if r < -PIVOT_TOL {
                    enter = Some(j);
                    break;
                }
            }
        } else {
            let mut best = -PIVOT_TOL;
            for (j, &r) in rc.iter().enumerate().take(art_base) {
                if r < best {
                    best = r;
                    enter = Some(j);
                }
            }
        }
        let Some(col) = enter else {
            return RunOutcome::Converged;
        };

        // Ratio test; ties resolved toward the smallest basis column index.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = tab[i][col];
            if a > PIVOT_TOL {
                let ratio = tab[i][total] / a;
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - 1e-12
                            || (ratio < lr + 1e-12 && basis[i] < basis[li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            return RunOutcome::Unbounded;
        };

        pivot(tab, basis, row, col);
        *iterations += 1;
        if *iterations > pivot_cap {
            return RunOutcome::IterationLimit;
        }

        // Degeneracy watch: no progress for a while switches to Bland's rule,
        // which cannot cycle.
        let obj = objective(tab, basis);
        if obj > last_obj - 1e-12 {
            stalled += 1;
            if stalled >= 50 {
                bland = true;
            }
        } else {
            stalled = 0;
        }
        last_obj = obj;
        rc = reduced_costs(tab, basis, cost);
    }
}
