//! The inequality and equality checks run by `check` and `selftest`.

use serde::Serialize;

use super::config::{ExperimentConfig, Weights};
use super::curve::{
    check_concavity, check_logconvexity, check_weighted_bm, run_capacity_curve, CapacityReport,
};
use crate::covolume::{covolume, factorial, CovolumeResult, Method};
use crate::error::{Error, Result};
use crate::orthant::HalfSpaceSet;
use crate::toric::ReinhardtSpec;

/// Largest allowed gap between `n! Covol(P_t)` and `Cap(Q_t)` on the exact path.
pub const DICTIONARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Most adverse signed quantity seen (a slack, margin or discrepancy).
    pub worst: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, worst: f64, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed,
            worst,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeRow {
    pub t: f64,
    pub volume: f64,
    pub geometric: f64,
    /// Three propagated standard errors.
    pub allowance: f64,
}

fn volume_with_fallback(
    spec: &ReinhardtSpec,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<CovolumeResult> {
    match config.method() {
        Method::Exact => match spec.volume(Method::Exact) {
            Err(Error::ExactUnavailable(_)) => spec.volume(config.mc_method(seed)),
            other => other,
        },
        Method::MonteCarlo { .. } => spec.volume(config.mc_method(seed)),
    }
}

/// `Vol(K_t) >= Vol(K0)^{1-t} Vol(K1)^t` up to three propagated standard
/// errors (and a relative `exact_eq` for rounding). Sets without a closed-form
/// volume fall back to Monte Carlo with the configured sample count.
pub fn check_volume_reverse_bm(
    config: &ExperimentConfig,
) -> Result<(CheckOutcome, Vec<VolumeRow>)> {
    config.validate()?;
    let v0 = volume_with_fallback(&config.set0, config, config.seed)?;
    let v1 = volume_with_fallback(&config.set1, config, config.seed.wrapping_add(1))?;
    let mut rows = Vec::with_capacity(config.t_grid.len());
    let mut worst = f64::INFINITY;
    let mut passed = true;
    for (i, &t) in config.t_grid.iter().enumerate() {
        let kt = ReinhardtSpec::geometric_mean(&config.set0, &config.set1, t)?;
        let vt = volume_with_fallback(&kt, config, config.seed.wrapping_add(2 + i as u64))?;
        let geometric = v0.value.powf(1.0 - t) * v1.value.powf(t);
        let rel = ((1.0 - t) * v0.std_err / v0.value).hypot(t * v1.std_err / v1.value);
        let allowance = 3.0 * vt.std_err.hypot(geometric * rel);
        let slack = vt.value - geometric;
        let ok = slack >= -(allowance + config.tolerances.exact_eq * geometric);
        passed &= ok;
        worst = worst.min(slack + allowance);
        rows.push(VolumeRow {
            t,
            volume: vt.value,
            geometric,
            allowance,
        });
    }
    let outcome = CheckOutcome::new(
        "volume_reverse_bm",
        passed,
        worst,
        format!("Vol0 = {:.6e}, Vol1 = {:.6e}", v0.value, v1.value),
    );
    Ok((outcome, rows))
}

/// The covolume form of the weighted inequality for the copolar combination
/// `P_t = ((1-t) P0° + t P1°)°`, together with the identity
/// `n! Covol(P_t) = Cap(Q_t)` against the capacity curve in `report`.
pub fn check_copolar_add(
    config: &ExperimentConfig,
    report: &CapacityReport,
) -> Result<CheckOutcome> {
    config.validate()?;
    let method = config.method();
    let n = config.dim();
    let p0 = config.set0.log_image()?.reduce().copolar();
    let p1 = config.set1.log_image()?.reduce().copolar();
    let cov0 = covolume(&p0, method)?;
    let cov1 = covolume(&p1, method)?;
    let pow = n as i32 + 1;
    let (c0, c1) = (report.c0, report.c1);
    let nfact = factorial(n);
    let tol = config.tolerances.ineq_slack;
    let mut passed = true;
    let mut worst_slack = f64::INFINITY;
    let mut worst_dict: f64 = 0.0;
    for row in &report.rows {
        let t = row.t;
        let pt = HalfSpaceSet::copolar_add(&p0, &p1, t)?;
        let cov = covolume(&pt, method)?;
        let c_t = (1.0 - t) * c0 + t * c1;
        let slack = (1.0 - t) * c0.powi(pow) * cov0.value + t * c1.powi(pow) * cov1.value
            - c_t.powi(pow) * cov.value;
        let err = 3.0
            * ((1.0 - t) * c0.powi(pow) * cov0.std_err)
                .hypot(t * c1.powi(pow) * cov1.std_err)
                .hypot(c_t.powi(pow) * cov.std_err);
        passed &= slack >= -(tol + err);
        worst_slack = worst_slack.min(slack);
        let dict = (nfact * cov.value - row.cap).abs();
        worst_dict = worst_dict.max(dict);
        if matches!(method, Method::Exact) {
            passed &= dict <= DICTIONARY_TOL;
        }
    }
    Ok(CheckOutcome::new(
        "copolar_add",
        passed,
        worst_slack,
        format!("max |n! Covol(P_t) - Cap_t| = {worst_dict:.3e}"),
    ))
}

/// Runs the weighted Brunn-Minkowski, concavity, log-convexity, reverse
/// volume and copolar-addition checks. Concavity is always evaluated with
/// equilibrated weights.
pub fn run_checks(config: &ExperimentConfig) -> Result<(CapacityReport, Vec<CheckOutcome>)> {
    let report = run_capacity_curve(config)?;
    let tol = config.tolerances.ineq_slack;
    let mut out = Vec::with_capacity(5);

    let worst_bm = report
        .rows
        .iter()
        .map(|r| r.bm_slack)
        .fold(f64::INFINITY, f64::min);
    out.push(CheckOutcome::new(
        "weighted_bm",
        check_weighted_bm(&report, tol),
        worst_bm,
        format!(
            "weights ({:.6}, {:.6}), equality case {}",
            report.c0, report.c1, report.equality_case
        ),
    ));

    let equilibrated = if report.equilibrated {
        report.clone()
    } else {
        let mut cfg = config.clone();
        cfg.weights = Weights::Equilibrated;
        run_capacity_curve(&cfg)?
    };
    out.push(if equilibrated.rows.len() >= 3 {
        let (ok, margin) = check_concavity(&equilibrated, tol)?;
        CheckOutcome::new("concavity", ok, margin, "min of -second difference of V")
    } else {
        CheckOutcome::new(
            "concavity",
            true,
            f64::INFINITY,
            "skipped: fewer than 3 grid points",
        )
    });

    let worst_lc = report
        .rows
        .iter()
        .map(|r| r.logconv_slack)
        .fold(f64::INFINITY, f64::min);
    out.push(CheckOutcome::new(
        "logconvexity",
        check_logconvexity(&report, tol),
        worst_lc,
        "min of Cap0^(1-t) Cap1^t - Cap_t",
    ));

    out.push(check_volume_reverse_bm(config)?.0);
    out.push(check_copolar_add(config, &report)?);
    Ok((report, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthant::GeneratorSet;

    fn gens(g: &[&[f64]]) -> ReinhardtSpec {
        ReinhardtSpec::LogGenerators(
            GeneratorSet::new(g.iter().map(|v| v.to_vec()).collect()).unwrap(),
        )
    }

    #[test]
    fn polydisk_pair_is_volume_equality() {
        let cfg = ExperimentConfig::new(
            ReinhardtSpec::polydisk(vec![0.3, 0.7]).unwrap(),
            ReinhardtSpec::polydisk(vec![0.6, 0.2]).unwrap(),
            Weights::Explicit(1.0, 1.0),
        )
        .unwrap();
        let (outcome, rows) = check_volume_reverse_bm(&cfg).unwrap();
        assert!(outcome.passed);
        for r in rows {
            assert_eq!(r.allowance, 0.0);
            assert!((r.volume - r.geometric).abs() <= 1e-12 * r.geometric);
        }
    }

    #[test]
    fn cosimplex_pair_copolar_add() {
        let cfg = ExperimentConfig::new(
            gens(&[&[-1.0, -3.0]]),
            gens(&[&[-2.0, -0.5]]),
            Weights::Explicit(1.0, 2.0),
        )
        .unwrap();
        let report = run_capacity_curve(&cfg).unwrap();
        let outcome = check_copolar_add(&cfg, &report).unwrap();
        assert!(outcome.passed, "{outcome:?}");
        for r in &report.rows {
            // Complement of a cosimplex is a simplex: Covol = 1 / (n! Π|g|).
            let g0 = [-(1.0 - r.t) - 2.0 * r.t, (1.0 - r.t) * -3.0 + r.t * -0.5];
            let expected = 1.0 / (2.0 * g0[0] * g0[1]);
            assert!(
                (r.covol - expected).abs() < 1e-14,
                "t={} {} {}",
                r.t,
                r.covol,
                expected
            );
        }
    }

    #[test]
    fn all_checks_pass_on_a_generic_pair() {
        let cfg = ExperimentConfig::new(
            gens(&[&[-1.0, -2.0], &[-2.0, -0.6]]),
            gens(&[&[-0.4, -2.5], &[-1.5, -1.2], &[-2.8, -0.3]]),
            Weights::Explicit(0.7, 2.2),
        )
        .unwrap();
        let (_, checks) = run_checks(&cfg).unwrap();
        assert_eq!(checks.len(), 5);
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }
}
