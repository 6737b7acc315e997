//! Capacity curves along the geometric-mean interpolation.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, Weights};
use crate::covolume::{capacity, covolume, Method};
use crate::error::{Error, Result};
use crate::extremal::GeodesicSpec;
use crate::orthant::{GeneratorSet, HalfSpaceSet};

pub const CSV_HEADER: &str = "t,c_t,cap,covol,V,rho,bm_slack,logconv_slack,std_err";

/// Weights with `c0^{n+1} Cap0 = c1^{n+1} Cap1`, normalized to `c0 = 1`.
pub fn equilibrate_weights(
    q0: &GeneratorSet,
    q1: &GeneratorSet,
    method: Method,
) -> Result<(f64, f64)> {
    let cap0 = capacity(q0, method)?.value;
    let cap1 = capacity(q1, method)?.value;
    equilibrate_from_capacities(cap0, cap1, q0.dim())
}

pub fn equilibrate_from_capacities(cap0: f64, cap1: f64, n: usize) -> Result<(f64, f64)> {
    if !(cap0 > 0.0 && cap1 > 0.0 && cap0.is_finite() && cap1.is_finite()) {
        return Err(Error::Numeric(format!(
            "cannot equilibrate capacities {cap0} and {cap1}"
        )));
    }
    Ok((1.0, (cap0 / cap1).powf(1.0 / (n as f64 + 1.0))))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityRow {
    pub t: f64,
    pub c_t: f64,
    /// `Cap(K_t)` with `Log K_t = (1-t) Q0 + t Q1`.
    pub cap: f64,
    /// `Covol(P_t)` for the copolar combination of `Q0°` and `Q1°`.
    pub covol: f64,
    pub v: f64,
    pub rho: f64,
    /// `(1-t) c0^{n+1} Cap0 + t c1^{n+1} Cap1 - c_t^{n+1} Cap_t`.
    pub bm_slack: f64,
    /// `Cap0^{1-t} Cap1^t - Cap_t`.
    pub logconv_slack: f64,
    pub std_err: f64,
    /// Three standard errors of `bm_slack` (zero on the exact path).
    pub bm_slack_err: f64,
    /// Three standard errors of `logconv_slack`.
    pub logconv_slack_err: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityReport {
    pub dim: usize,
    pub c0: f64,
    pub c1: f64,
    pub equilibrated: bool,
    pub cap0: f64,
    pub cap1: f64,
    pub rows: Vec<CapacityRow>,
    /// Smallest concavity margin `-Δ²V` over interior grid points;
    /// `None` when fewer than three rows are usable.
    pub concavity_min_second_difference: Option<f64>,
    pub equality_case: bool,
    pub max_abs_bm_slack: f64,
}

impl CapacityReport {
    pub fn failed_rows(&self) -> impl Iterator<Item = &CapacityRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }

    /// CSV with 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let vals = [
                r.t,
                r.c_t,
                r.cap,
                r.covol,
                r.v,
                r.rho,
                r.bm_slack,
                r.logconv_slack,
                r.std_err,
            ];
            let line: Vec<String> = vals.iter().map(|v| fmt17(*v)).collect();
            writeln!(out, "{}", line.join(",")).unwrap();
        }
        out
    }
}

pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Signed second differences of `values` on the (possibly nonuniform) grid
/// `ts`, normalized so that a uniform grid gives `v[i-1] - 2 v[i] + v[i+1]`.
pub fn second_differences(ts: &[f64], values: &[f64]) -> Vec<f64> {
    (1..ts.len().saturating_sub(1))
        .map(|i| {
            let lam = (ts[i + 1] - ts[i]) / (ts[i + 1] - ts[i - 1]);
            2.0 * (lam * values[i - 1] + (1.0 - lam) * values[i + 1] - values[i])
        })
        .collect()
}

pub fn run_capacity_curve(config: &ExperimentConfig) -> Result<CapacityReport> {
    config.validate()?;
    let method = config.method();
    let n = config.dim();
    let q0 = config.set0.log_image()?.reduce();
    let q1 = config.set1.log_image()?.reduce();
    let cap0r = capacity(&q0, method)?;
    let cap1r = capacity(&q1, method)?;
    let (cap0, cap1) = (cap0r.value, cap1r.value);
    let (c0, c1, equilibrated) = match config.weights {
        Weights::Explicit(c0, c1) => (c0, c1, false),
        Weights::Equilibrated => {
            let (c0, c1) = equilibrate_from_capacities(cap0, cap1, n)?;
            (c0, c1, true)
        }
    };
    let spec = GeodesicSpec::from_sets(q0.clone(), c0, q1.clone(), c1)?;
    let p0 = q0.copolar();
    let p1 = q1.copolar();
    let pow = n as i32 + 1;
    let w0 = c0.powi(pow) * cap0;
    let w1 = c1.powi(pow) * cap1;

    let rows: Vec<CapacityRow> = config
        .t_grid
        .par_iter()
        .map(|&t| {
            let c_t = spec.c_t(t);
            let computed = (|| -> Result<(f64, f64, f64)> {
                let qt = GeneratorSet::interpolate(&q0, &q1, t)?;
                let cap = capacity(&qt, method)?;
                let pt = HalfSpaceSet::copolar_add(&p0, &p1, t)?;
                let covol = covolume(&pt, method)?;
                if !(cap.value > 0.0) || !cap.value.is_finite() {
                    return Err(Error::Numeric(format!("capacity {} at t = {t}", cap.value)));
                }
                Ok((cap.value, covol.value, cap.std_err))
            })();
            match computed {
                Ok((cap, covol, std_err)) => {
                    let lhs = c_t.powi(pow) * cap;
                    let rhs = (1.0 - t) * w0 + t * w1;
                    let geo = cap0.powf(1.0 - t) * cap1.powf(t);
                    let bm_err = 3.0
                        * ((1.0 - t) * c0.powi(pow) * cap0r.std_err)
                            .hypot(t * c1.powi(pow) * cap1r.std_err)
                            .hypot(c_t.powi(pow) * std_err);
                    let geo_err =
                        geo * ((1.0 - t) * cap0r.std_err / cap0).hypot(t * cap1r.std_err / cap1);
                    let v = cap.powf(-1.0 / pow as f64);
                    CapacityRow {
                        t,
                        c_t,
                        cap,
                        covol,
                        v,
                        rho: 1.0 / v,
                        bm_slack: rhs - lhs,
                        logconv_slack: geo - cap,
                        std_err,
                        bm_slack_err: bm_err,
                        logconv_slack_err: 3.0 * geo_err.hypot(std_err),
                        error: None,
                    }
                }
                Err(e) => CapacityRow {
                    t,
                    c_t,
                    cap: f64::NAN,
                    covol: f64::NAN,
                    v: f64::NAN,
                    rho: f64::NAN,
                    bm_slack: f64::NAN,
                    logconv_slack: f64::NAN,
                    std_err: f64::NAN,
                    bm_slack_err: 0.0,
                    logconv_slack_err: 0.0,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let usable = rows.iter().all(|r| r.error.is_none()) && rows.len() >= 3;
    let concavity_min_second_difference = usable.then(|| {
        let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
        let vs: Vec<f64> = rows.iter().map(|r| r.v).collect();
        second_differences(&ts, &vs)
            .into_iter()
            .map(|d| -d)
            .fold(f64::INFINITY, f64::min)
    });
    let max_abs_bm_slack = rows
        .iter()
        .filter(|r| r.error.is_none())
        .map(|r| r.bm_slack.abs())
        .fold(0.0, f64::max);
    Ok(CapacityReport {
        dim: n,
        c0,
        c1,
        equilibrated,
        cap0,
        cap1,
        rows,
        concavity_min_second_difference,
        equality_case: spec.equality_case_detect(config.tolerances.exact_eq)?,
        max_abs_bm_slack,
    })
}

/// Concavity of `V(t) = Cap_t^{-1/(n+1)}`: every second difference must be
/// at most `tol`. Returns the verdict and the smallest margin `-Δ²V`.
pub fn check_concavity(report: &CapacityReport, tol: f64) -> Result<(bool, f64)> {
    if !report.equilibrated {
        return Err(Error::InvalidInput(
            "concavity check needs equilibrated weights".into(),
        ));
    }
    if report.rows.len() < 3 {
        return Err(Error::InvalidInput(
            "concavity check needs at least 3 grid points".into(),
        ));
    }
    let margin = report
        .concavity_min_second_difference
        .ok_or_else(|| Error::Numeric("capacity curve has failed rows".into()))?;
    Ok((margin >= -tol, margin))
}

/// `Cap_t <= Cap0^{1-t} Cap1^t + tol` (plus three standard errors on the
/// Monte Carlo path) at every grid point.
pub fn check_logconvexity(report: &CapacityReport, tol: f64) -> bool {
    report
        .rows
        .iter()
        .all(|r| r.error.is_none() && r.logconv_slack >= -(tol + r.logconv_slack_err))
}

/// The weighted Brunn-Minkowski inequality at every grid point.
pub fn check_weighted_bm(report: &CapacityReport, tol: f64) -> bool {
    report
        .rows
        .iter()
        .all(|r| r.error.is_none() && r.bm_slack >= -(tol + r.bm_slack_err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::ReinhardtSpec;

    fn gens(g: &[&[f64]]) -> ReinhardtSpec {
        ReinhardtSpec::LogGenerators(
            GeneratorSet::new(g.iter().map(|v| v.to_vec()).collect()).unwrap(),
        )
    }

    #[test]
    fn equilibrate_examples() {
        assert_eq!(
            equilibrate_from_capacities(2.0, 2.0, 3).unwrap(),
            (1.0, 1.0)
        );
        let (c0, c1) = equilibrate_from_capacities(4.0, 1.0, 1).unwrap();
        assert_eq!(c0, 1.0);
        assert!((c1 - 2.0).abs() < 1e-15);
        let (_, c1) = equilibrate_from_capacities(8.0, 1.0, 2).unwrap();
        assert!((c1 - 2.0).abs() < 1e-15);
        assert!(equilibrate_from_capacities(0.0, 1.0, 2).is_err());

        let q0 = GeneratorSet::new(vec![vec![-1.0, -2.0], vec![-2.0, -1.0]]).unwrap();
        let q1 = GeneratorSet::new(vec![vec![-0.4, -3.0]]).unwrap();
        let (c0, c1) = equilibrate_weights(&q0, &q1, Method::Exact).unwrap();
        let a = c0.powi(3) * capacity(&q0, Method::Exact).unwrap().value;
        let b = c1.powi(3) * capacity(&q1, Method::Exact).unwrap().value;
        assert!((a - b).abs() <= 1e-9 * a);
    }

    #[test]
    fn second_differences_on_grids() {
        let ts = [0.0, 0.5, 1.0];
        assert_eq!(second_differences(&ts, &[0.0, 0.25, 1.0]), vec![0.5]);
        // Nonuniform grid, quadratic t^2 has second derivative 2.
        let ts = [0.0, 0.2, 1.0];
        let v: Vec<f64> = ts.iter().map(|t| t * t).collect();
        let d = second_differences(&ts, &v);
        assert!((d[0] - 0.32).abs() < 1e-15);
    }

    #[test]
    fn equal_sets_give_flat_curve() {
        let k = gens(&[&[-1.0, -2.0], &[-2.0, -1.0]]);
        let cfg = ExperimentConfig::new(k.clone(), k, Weights::Explicit(1.7, 1.7)).unwrap();
        let report = run_capacity_curve(&cfg).unwrap();
        for r in &report.rows {
            assert!((r.cap - 2.0 / 3.0).abs() < 1e-14);
            assert!(r.bm_slack.abs() < 1e-13);
            assert!(r.logconv_slack.abs() < 1e-14);
            assert!((r.v * r.rho - 1.0).abs() < 1e-12);
        }
        assert!(report.equality_case);
        assert!(check_weighted_bm(&report, 1e-9));
        assert!(check_logconvexity(&report, 1e-9));
        assert!(check_concavity(&report, 1e-9).is_err());
    }

    #[test]
    fn dilated_pair_midpoint() {
        let cfg = ExperimentConfig::new(
            gens(&[&[-1.0, -1.0]]),
            gens(&[&[-2.0, -2.0]]),
            Weights::Explicit(1.0, 1.0),
        )
        .unwrap()
        .with_grid(vec![0.0, 0.5, 1.0])
        .unwrap();
        let report = run_capacity_curve(&cfg).unwrap();
        assert!((report.cap0 - 1.0).abs() < 1e-15);
        let mid = &report.rows[1];
        assert!((mid.cap - 1.5f64.powi(-2)).abs() < 1e-14);
        assert!(mid.bm_slack >= 0.0);
    }

    #[test]
    fn csv_layout() {
        let k = gens(&[&[-1.0]]);
        let cfg = ExperimentConfig::new(k.clone(), gens(&[&[-2.0]]), Weights::Equilibrated)
            .unwrap()
            .with_grid(vec![0.0, 0.5, 1.0])
            .unwrap();
        let report = run_capacity_curve(&cfg).unwrap();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1].split(',').count(), 9);
        assert!(
            lines[1].starts_with("0.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0,")
        );
        assert_eq!(csv, run_capacity_curve(&cfg).unwrap().to_csv());
        let (ok, margin) = check_concavity(&report, 1e-9).unwrap();
        assert!(ok, "{margin}");
    }
}
