//! Small dense two-phase simplex solver.
//!
//! Problems are stated as `maximize c·x` over `x >= 0` subject to rows of the
//! form `a·x {<=, >=, =} b`. Instances in this crate have at most a few dozen
//! rows and columns, so a dense tableau with Bland's anti-cycling rule is
//! plenty and keeps every run deterministic.

use crate::error::{Error, Result};

/// Reduced-cost threshold for optimality.
pub const OPT_TOL: f64 = 1e-10;
/// Entries smaller than this are never used as pivots.
const PIVOT_TOL: f64 = 1e-12;
/// Phase-one residual accepted as feasible.
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<f64>,
    rel: Relation,
    rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    n_vars: usize,
    objective: Vec<f64>,
    rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus {
    Optimal {
        value: f64,
        x: Vec<f64>,
    },
    /// Phase one stopped with a positive residual (sum of artificial values).
    Infeasible {
        residual: f64,
    },
    Unbounded,
}

impl LinearProgram {
    /// A program over `n_vars` nonnegative variables maximizing `objective`.
    pub fn maximize(objective: Vec<f64>) -> Self {
        Self {
            n_vars: objective.len(),
            objective,
            rows: Vec::new(),
        }
    }

    pub fn constraint(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.n_vars, "constraint width");
        self.rows.push(Row { coeffs, rel, rhs });
        self
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn solve(&self) -> Result<LpStatus> {
        Tableau::build(self).run(self)
    }

    /// Solve and insist on a finite optimum.
    pub fn solve_optimal(&self) -> Result<(f64, Vec<f64>)> {
        match self.solve()? {
            LpStatus::Optimal { value, x } => Ok((value, x)),
            LpStatus::Unbounded => Err(Error::Unbounded),
            LpStatus::Infeasible { residual } => Err(Error::Numeric(format!(
                "linear program infeasible (residual {residual:e})"
            ))),
        }
    }
}

struct Tableau {
    /// Row-major `(m + 1) x (cols + 1)`; the last row is the objective and
    /// the last column the right-hand side.
    data: Vec<f64>,
    m: usize,
    cols: usize,
    basis: Vec<usize>,
    /// Columns at or beyond this index are artificial.
    first_artificial: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.n_vars;
        let m = lp.rows.len();
        // Normalize to nonnegative right-hand sides.
        let rows: Vec<Row> = lp
            .rows
            .iter()
            .map(|r| {
                if r.rhs < 0.0 {
                    Row {
                        coeffs: r.coeffs.iter().map(|v| -v).collect(),
                        rel: match r.rel {
                            Relation::Le => Relation::Ge,
                            Relation::Ge => Relation::Le,
                            Relation::Eq => Relation::Eq,
                        },
                        rhs: -r.rhs,
                    }
                } else {
                    r.clone()
                }
            })
            .collect();
        let n_slack = rows.iter().filter(|r| r.rel != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.rel != Relation::Le).count();
        let first_artificial = n + n_slack;
        let cols = first_artificial + n_art;
        let width = cols + 1;
        let mut data = vec![0.0; (m + 1) * width];
        let mut basis = vec![0; m];
        let mut slack = n;
        let mut art = first_artificial;
        for (i, r) in rows.iter().enumerate() {
            let row = &mut data[i * width..(i + 1) * width];
            row[..n].copy_from_slice(&r.coeffs);
            row[cols] = r.rhs;
            match r.rel {
                Relation::Le => {
                    row[slack] = 1.0;
                    basis[i] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -1.0;
                    slack += 1;
                    row[art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        Self {
            data,
            m,
            cols,
            basis,
            first_artificial,
        }
    }

    #[inline]
    fn width(&self) -> usize {
        self.cols + 1
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width() + j]
    }

    /// Load `maximize cost·x` into the objective row as reduced costs
    /// `cost_j - c_B B^{-1} a_j` (entering candidates are positive).
    fn load_objective(&mut self, cost: &[f64]) {
        let w = self.width();
        let obj = self.m * w;
        for j in 0..w {
            self.data[obj + j] = if j < cost.len() { cost[j] } else { 0.0 };
        }
        for i in 0..self.m {
            let cb = cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..w {
                    self.data[obj + j] -= cb * self.data[i * w + j];
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width();
        let p = self.data[r * w + c];
        for j in 0..w {
            self.data[r * w + j] /= p;
        }
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.data[i * w + c];
            if f != 0.0 {
                for j in 0..w {
                    self.data[i * w + j] -= f * self.data[r * w + j];
                }
                self.data[i * w + c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Iterate Bland's rule over columns `< allowed`. Returns false on
    /// unboundedness.
    fn iterate(&mut self, allowed: usize) -> Result<bool> {
        let max_iter = 50 * (self.m + self.cols + 10);
        for _ in 0..max_iter {
            let obj = self.m;
            let Some(enter) = (0..allowed).find(|&j| self.at(obj, j) > OPT_TOL) else {
                return Ok(true);
            };
            let rhs = self.cols;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, enter);
                if a > PIVOT_TOL {
                    let ratio = self.at(i, rhs) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-15
                                || (ratio <= lr + 1e-15 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
        Err(Error::Numeric("simplex iteration limit reached".into()))
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpStatus> {
        let rhs = self.cols;
        if self.first_artificial < self.cols {
            // Phase one: maximize the negated sum of artificials.
            let mut cost = vec![0.0; self.cols];
            for c in cost.iter_mut().skip(self.first_artificial) {
                *c = -1.0;
            }
            self.load_objective(&cost);
            if !self.iterate(self.cols)? {
                return Err(Error::Numeric("phase one unbounded".into()));
            }
            // The objective row's rhs holds minus the phase-one value.
            let residual = self.at(self.m, rhs).abs();
            if residual > FEAS_TOL {
                return Ok(LpStatus::Infeasible { residual });
            }
            self.evict_artificials();
        }
        let mut cost = vec![0.0; self.cols];
        cost[..lp.n_vars].copy_from_slice(&lp.objective);
        self.load_objective(&cost);
        if !self.iterate(self.first_artificial)? {
            return Ok(LpStatus::Unbounded);
        }
        let mut x = vec![0.0; lp.n_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < lp.n_vars {
                x[b] = self.at(i, rhs).max(0.0);
            }
        }
        let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpStatus::Optimal { value, x })
    }

    /// Pivot zero-level artificials out of the basis; rows where that is
    /// impossible are redundant and get dropped.
    fn evict_artificials(&mut self) {
        let mut i = 0;
        while i < self.m {
            if self.basis[i] >= self.first_artificial {
                let col = (0..self.first_artificial).find(|&j| self.at(i, j).abs() > 1e-9);
                match col {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => self.drop_row(i),
                }
            } else {
                i += 1;
            }
        }
    }

    fn drop_row(&mut self, r: usize) {
        let w = self.width();
        self.data.drain(r * w..(r + 1) * w);
        self.basis.remove(r);
        self.m -= 1;
    }
}
