//! Seeded random instances for the self-test suite.

use rand::Rng;
use rayon::prelude::*;

use super::checks::{run_checks, CheckOutcome};
use super::config::{ExperimentConfig, Weights};
use crate::covolume::MethodKind;
use crate::error::Result;
use crate::orthant::GeneratorSet;
use crate::sampling::block_rng;
use crate::toric::ReinhardtSpec;

pub const COORD_RANGE: (f64, f64) = (-3.0, -0.2);
pub const WEIGHT_RANGE: (f64, f64) = (0.2, 5.0);

/// A reduced set with 1 to 4 generators drawn uniformly from the coordinate range.
pub fn random_set<R: Rng>(rng: &mut R, n: usize) -> GeneratorSet {
    let count = rng.gen_range(1..=4);
    let gens = (0..count)
        .map(|_| {
            (0..n)
                .map(|_| rng.gen_range(COORD_RANGE.0..COORD_RANGE.1))
                .collect()
        })
        .collect();
    GeneratorSet::new(gens)
        .expect("coordinates are strictly negative")
        .reduce()
}

/// Instance `index` of the suite seeded by `seed`: dimension in {1, 2, 3},
/// random weights, default grid, exact capacities.
pub fn random_config(seed: u64, index: u64, samples: usize) -> ExperimentConfig {
    let mut rng = block_rng(seed, index);
    let n = rng.gen_range(1..=3);
    let q0 = random_set(&mut rng, n);
    let q1 = random_set(&mut rng, n);
    let c0 = rng.gen_range(WEIGHT_RANGE.0..WEIGHT_RANGE.1);
    let c1 = rng.gen_range(WEIGHT_RANGE.0..WEIGHT_RANGE.1);
    let mut cfg = ExperimentConfig::new(
        ReinhardtSpec::LogGenerators(q0),
        ReinhardtSpec::LogGenerators(q1),
        Weights::Explicit(c0, c1),
    )
    .expect("random config is valid");
    cfg.method = MethodKind::Exact;
    cfg.samples = samples;
    cfg.seed = seed ^ index.rotate_left(32);
    cfg
}

#[derive(Debug, Clone)]
pub struct SuiteInstance {
    pub index: u64,
    pub config: ExperimentConfig,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteInstance {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs every check on `count` random instances, in index order.
pub fn run_suite(count: u64, seed: u64, samples: usize) -> Result<Vec<SuiteInstance>> {
    (0..count)
        .into_par_iter()
        .map(|index| {
            let config = random_config(seed, index, samples);
            let (_, checks) = run_checks(&config)?;
            Ok(SuiteInstance {
                index,
                config,
                checks,
            })
        })
        .collect()
}
