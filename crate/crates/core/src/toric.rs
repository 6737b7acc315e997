//! Complete logarithmically convex Reinhardt compacts in the unit polydisk.

use std::f64::consts::PI;

use crate::covolume::{CovolumeResult, Method, MethodKind, MIN_MC_SAMPLES};
use crate::error::{check_dim, Error, Result};
use crate::orthant::GeneratorSet;
use crate::sampling;

#[derive(Debug, Clone, PartialEq)]
pub enum ReinhardtSpec {
    /// `{|z_k| <= ρ_k}` with every radius in `(0, 1)`.
    Polydisk(Vec<f64>),
    /// The compact whose logarithmic image is the given set.
    LogGenerators(GeneratorSet),
}

impl ReinhardtSpec {
    pub fn polydisk(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidParameter(
                "polydisk needs at least one radius".into(),
            ));
        }
        if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return Err(Error::InvalidParameter(format!(
                "radius {r} outside (0, 1)"
            )));
        }
        // The log image must satisfy the generator margin.
        GeneratorSet::new(vec![radii.iter().map(|r| r.ln()).collect()])?;
        Ok(Self::Polydisk(radii))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Polydisk(r) => r.len(),
            Self::LogGenerators(q) => q.dim(),
        }
    }

    /// `Log K = {s : (e^{s_1}, ..., e^{s_n}) in K}`.
    pub fn log_image(&self) -> Result<GeneratorSet> {
        match self {
            Self::Polydisk(radii) => {
                if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
                    return Err(Error::InvalidParameter(format!(
                        "radius {r} outside (0, 1)"
                    )));
                }
                GeneratorSet::new(vec![radii.iter().map(|r| r.ln()).collect()])
            }
            Self::LogGenerators(q) => Ok(q.clone()),
        }
    }

    /// The geometric mean `K0^{1-t} K1^t`, whose log image is `(1-t) Q0 + t Q1`.
    pub fn geometric_mean(k0: &ReinhardtSpec, k1: &ReinhardtSpec, t: f64) -> Result<ReinhardtSpec> {
        check_dim(k0.dim(), k1.dim())?;
        let q = GeneratorSet::interpolate(&k0.log_image()?, &k1.log_image()?, t)?;
        Ok(Self::LogGenerators(q))
    }

    /// Euclidean `2n`-volume of the compact.
    ///
    /// With `u_k = |z_k|^2` the volume element becomes `π^n du`, so
    /// `Vol(K) = π^n Vol_n({u in (0,1]^n : log u in 2Q})`. A single reduced
    /// generator (a polydisk) gives `π^n exp(2 Σ g_k)` exactly; otherwise the
    /// `u`-integral is sampled on the box `u_k <= exp(2 max_g g_k)`.
    pub fn volume(&self, method: Method) -> Result<CovolumeResult> {
        let q = self.log_image()?.reduce();
        let n = q.dim();
        let pi_n = PI.powi(n as i32);
        match method {
            Method::Exact => {
                if q.generators().len() != 1 {
                    return Err(Error::ExactUnavailable(
                        "closed-form volume needs a polydisk (one generator)".into(),
                    ));
                }
                let sum: f64 = q.generators()[0].iter().sum();
                Ok(CovolumeResult::exact(pi_n * (2.0 * sum).exp()))
            }
            Method::MonteCarlo { samples, seed } => {
                if samples < MIN_MC_SAMPLES {
                    return Err(Error::TooFewSamples {
                        min: MIN_MC_SAMPLES,
                        got: samples,
                    });
                }
                let upper: Vec<f64> = q.upper_corner().iter().map(|c| (2.0 * c).exp()).collect();
                let box_vol: f64 = upper.iter().product();
                let hits = sampling::count_hits(&upper, samples, seed, |u| {
                    let s: Vec<f64> = u.iter().map(|v| 0.5 * v.ln()).collect();
                    q.contains(&s).unwrap_or(false)
                });
                let p = hits as f64 / samples as f64;
                let scale = pi_n * box_vol;
                Ok(CovolumeResult {
                    value: scale * p,
                    method: MethodKind::MonteCarlo,
                    std_err: scale * (p * (1.0 - p) / samples as f64).sqrt(),
                    samples,
                })
            }
        }
    }
}
