//! Weighted relative extremal functions of toric compacts and their
//! plurisubharmonic geodesics, evaluated in logarithmic coordinates.
//!
//! For `u = c·ω_K` with `Q = Log K` the Legendre image of the convex function
//! `s ↦ u(e^s)` is `a ↦ max{h_Q(a) + c, 0}` on the positive orthant. The
//! geodesic between `u0` and `u1` is the Legendre transform of the affine
//! combination of the endpoint images, so at a fixed point `s` it is the
//! value of the linear program
//!
//! ```text
//! maximize  <a, s> - (1-t) w0 - t w1
//! s.t.      a >= 0, w_j >= 0, w_j >= <a, g> + c_j  for every generator g of Q_j.
//! ```

use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::orthant::GeneratorSet;

/// Points closer than this to the orthant boundary are rejected.
pub const BOUNDARY_GUARD: f64 = 1e-9;
/// Default band for [`GeodesicSpec::contact_set_test`].
pub const CONTACT_TOL: f64 = 1e-6;

/// `u = c·ω_K` where `Q = Log K`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedExtremal {
    q: GeneratorSet,
    c: f64,
}

impl WeightedExtremal {
    pub fn new(q: GeneratorSet, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "weight must be positive, got {c}"
            )));
        }
        Ok(Self { q, c })
    }

    pub fn set(&self) -> &GeneratorSet {
        &self.q
    }

    pub fn weight(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    /// `max{h_Q(a) + c, 0}`.
    pub fn legendre_image(&self, a: &[f64]) -> Result<f64> {
        Ok((self.q.support_function(a)? + self.c).max(0.0))
    }

    /// `c·ω_K(e^s)` at a strictly negative point.
    pub fn eval(&self, s: &[f64]) -> Result<f64> {
        eval_terms(&[(self, 1.0)], s)
    }
}

/// Shorthand for [`WeightedExtremal::eval`].
pub fn eval_extremal(q: &GeneratorSet, c: f64, s: &[f64]) -> Result<f64> {
    WeightedExtremal::new(q.clone(), c)?.eval(s)
}

/// The geodesic between two weighted extremal functions.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSpec {
    u0: WeightedExtremal,
    u1: WeightedExtremal,
}

impl GeodesicSpec {
    pub fn new(u0: WeightedExtremal, u1: WeightedExtremal) -> Result<Self> {
        check_dim(u0.dim(), u1.dim())?;
        Ok(Self { u0, u1 })
    }

    pub fn from_sets(q0: GeneratorSet, c0: f64, q1: GeneratorSet, c1: f64) -> Result<Self> {
        Self::new(
            WeightedExtremal::new(q0, c0)?,
            WeightedExtremal::new(q1, c1)?,
        )
    }

    pub fn start(&self) -> &WeightedExtremal {
        &self.u0
    }

    pub fn end(&self) -> &WeightedExtremal {
        &self.u1
    }

    pub fn dim(&self) -> usize {
        self.u0.dim()
    }

    /// `c_t = (1 - t) c0 + t c1`.
    pub fn c_t(&self, t: f64) -> f64 {
        (1.0 - t) * self.u0.c + t * self.u1.c
    }

    /// Value of the geodesic at time `t` and log-point `s`.
    pub fn eval(&self, t: f64, s: &[f64]) -> Result<f64> {
        check_t(t)?;
        eval_terms(&[(&self.u0, 1.0 - t), (&self.u1, t)], s)
    }

    /// Minimum of the geodesic over the polydisk. Complete sets in the
    /// negative orthant always intersect, so the minimum is `-c_t`.
    pub fn min_value(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        Ok(-self.c_t(t))
    }

    /// True when the geodesic attains its minimum at `s` up to `tol`.
    pub fn contact_set_test(&self, t: f64, s: &[f64], tol: f64) -> Result<bool> {
        Ok(self.eval(t, s)? <= -self.c_t(t) + tol)
    }

    /// Whether the endpoints satisfy `c0·Q1 = c1·Q0`, the case in which the
    /// geodesic stays a multiple of an extremal function.
    pub fn equality_case_detect(&self, tol: f64) -> Result<bool> {
        let a = self.u1.q.scale(self.u0.c)?;
        let b = self.u0.q.scale(self.u1.c)?;
        a.same_set(&b, tol)
    }

    /// `max{h_{Q0}+c0,0}(1-t) + max{h_{Q1}+c1,0} t` minus `<a, s>`, without
    /// validation; used by the grid oracle.
    fn dual_objective(&self, t: f64, a: &[f64], s: &[f64]) -> f64 {
        let lin: f64 = a.iter().zip(s).map(|(x, y)| x * y).sum();
        let w0 = (self.u0.q.support_unchecked(a) + self.u0.c).max(0.0);
        let w1 = (self.u1.q.support_unchecked(a) + self.u1.c).max(0.0);
        lin - (1.0 - t) * w0 - t * w1
    }

    /// Brute-force lower bound for [`GeodesicSpec::eval`] on the grid
    /// `[-l, -eps]^n` with `points` nodes per axis.
    ///
    /// The supremum over `a` is restricted to a grid on `[0, A]^n` with
    /// `points` nodes per axis and `A = 2 max(1, c0, c1) / eps`. Any maximizer
    /// satisfies `eps |a|_1 <= c_t`, so it lies in the box. The dual objective
    /// is Lipschitz in the sup-norm with constant
    /// `|s|_1 + max_g |g|_1` (the support functions are), and every point of
    /// the box is within `h/2` of a node, so the restricted supremum is below
    /// the true value by at most `(|s|_1 + max_g |g|_1) h / 2`.
    pub fn grid_llt_oracle(&self, t: f64, l: f64, eps: f64, points: usize) -> Result<OracleGrid> {
        check_t(t)?;
        if !(l > eps && eps > 0.0) || points < 16 {
            return Err(Error::InvalidParameter(format!(
                "degenerate oracle grid: l = {l}, eps = {eps}, points = {points}"
            )));
        }
        let n = self.dim();
        let a_max = 2.0 * 1f64.max(self.u0.c).max(self.u1.c) / eps;
        let a_step = a_max / (points - 1) as f64;
        let s_step = (l - eps) / (points - 1) as f64;
        let a_nodes: Vec<Vec<f64>> = lattice(n, points, |i| i as f64 * a_step);
        let s_nodes: Vec<Vec<f64>> = lattice(n, points, |i| -l + i as f64 * s_step);
        let gen_l1 = self
            .u0
            .q
            .generators()
            .iter()
            .chain(self.u1.q.generators())
            .map(|g| g.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let rows: Vec<(f64, f64)> = s_nodes
            .par_iter()
            .map(|s| {
                let best = a_nodes
                    .iter()
                    .map(|a| self.dual_objective(t, a, s))
                    .fold(f64::NEG_INFINITY, f64::max);
                let s_l1: f64 = s.iter().map(|v| v.abs()).sum();
                (best, (s_l1 + gen_l1) * a_step / 2.0)
            })
            .collect();
        let (values, gap_bounds) = rows.into_iter().unzip();
        Ok(OracleGrid {
            points: s_nodes,
            values,
            gap_bounds,
            a_step,
        })
    }
}

/// Output of [`GeodesicSpec::grid_llt_oracle`].
#[derive(Debug, Clone)]
pub struct OracleGrid {
    pub points: Vec<Vec<f64>>,
    /// Lower bounds of the geodesic at each point.
    pub values: Vec<f64>,
    /// Documented maximal shortfall of each value.
    pub gap_bounds: Vec<f64>,
    pub a_step: f64,
}

fn lattice(n: usize, points: usize, coord: impl Fn(usize) -> f64) -> Vec<Vec<f64>> {
    let total = points.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let i = idx % points;
                    idx /= points;
                    coord(i)
                })
                .collect()
        })
        .collect()
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t = {t} outside [0, 1]")));
    }
    Ok(())
}

/// `sup_{a >= 0} <a, s> - Σ_j λ_j max{h_{Q_j}(a) + c_j, 0}` for weights
/// `λ_j >= 0` summing to one. Terms with zero weight are dropped.
fn eval_terms(terms: &[(&WeightedExtremal, f64)], s: &[f64]) -> Result<f64> {
    let n = terms[0].0.dim();
    check_dim(n, s.len())?;
    if let Some(v) = s.iter().find(|v| !(**v < -BOUNDARY_GUARD)) {
        return Err(Error::InvalidParameter(format!(
            "evaluation point must be strictly negative, got coordinate {v}"
        )));
    }
    let active: Vec<_> = terms.iter().filter(|(_, w)| *w > 0.0).collect();
    let k = active.len();
    let mut obj = s.to_vec();
    obj.extend(active.iter().map(|(_, w)| -w));
    let mut lp = LinearProgram::maximize(obj);
    for (j, (u, _)) in active.iter().enumerate() {
        for g in u.q.generators() {
            let mut row = g.clone();
            row.extend((0..k).map(|i| if i == j { -1.0 } else { 0.0 }));
            lp.constraint(row, Relation::Le, -u.c);
        }
    }
    match lp.solve()? {
        LpStatus::Optimal { value, .. } => Ok(value),
        LpStatus::Unbounded => Err(Error::Unbounded),
        LpStatus::Infeasible { residual } => Err(Error::Numeric(format!(
            "geodesic program infeasible (residual {residual:e})"
        ))),
    }
}
