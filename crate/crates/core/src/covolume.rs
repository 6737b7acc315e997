//! Covolumes of complete sets in the positive orthant and capacities of
//! toric compacts.
//!
//! `Covol(P)` is the plain Euclidean volume of `R^n_+ \ P`. The capacity of a
//! toric compact with log-image `Q` in the unit polydisk is `n! Covol(Q°)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orthant::{GeneratorSet, HalfSpaceSet};
use crate::sampling;

/// Largest dimension handled by the exact path.
pub const MAX_EXACT_DIM: usize = 4;
pub const MIN_MC_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Exact,
    MonteCarlo,
}

/// How a covolume (or volume) is to be computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovolumeResult {
    pub value: f64,
    pub method: MethodKind,
    pub std_err: f64,
    pub samples: usize,
}

impl CovolumeResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            method: MethodKind::Exact,
            std_err: 0.0,
            samples: 0,
        }
    }

    /// Multiplies value and standard error by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            std_err: self.std_err * factor.abs(),
            ..self
        }
    }
}

pub fn covolume(p: &HalfSpaceSet, method: Method) -> Result<CovolumeResult> {
    match method {
        Method::Exact => covolume_exact(p),
        Method::MonteCarlo { samples, seed } => covolume_mc(p, samples, seed),
    }
}

/// Exact covolume: `M^n - Vol(P ∩ [0, M]^n)` with the bounded polytope volume
/// from Lasserre's facet recursion.
pub fn covolume_exact(p: &HalfSpaceSet) -> Result<CovolumeResult> {
    let n = p.dim();
    if n > MAX_EXACT_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            max: MAX_EXACT_DIM,
        });
    }
    let m = p.bounding_box();
    let mut rows = Vec::with_capacity(p.normals().len() + 2 * n);
    for g in p.normals() {
        rows.push(HalfSpace {
            a: g.clone(),
            b: -1.0,
        });
    }
    for k in 0..n {
        let mut lo = vec![0.0; n];
        lo[k] = -1.0;
        rows.push(HalfSpace { a: lo, b: 0.0 });
        let mut hi = vec![0.0; n];
        hi[k] = 1.0;
        rows.push(HalfSpace { a: hi, b: m });
    }
    let inside = polytope_volume(rows, n);
    let value = (m.powi(n as i32) - inside).max(0.0);
    if !value.is_finite() {
        return Err(Error::Numeric("non-finite covolume".into()));
    }
    Ok(CovolumeResult::exact(value))
}

/// Monte Carlo covolume over the bounding cube.
pub fn covolume_mc(p: &HalfSpaceSet, samples: usize, seed: u64) -> Result<CovolumeResult> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::TooFewSamples {
            min: MIN_MC_SAMPLES,
            got: samples,
        });
    }
    let n = p.dim();
    let m = p.bounding_box();
    let upper = vec![m; n];
    let outside = sampling::count_hits(&upper, samples, seed, |x| !p.contains_unchecked(x));
    let frac = outside as f64 / samples as f64;
    let cube = m.powi(n as i32);
    Ok(CovolumeResult {
        value: cube * frac,
        method: MethodKind::MonteCarlo,
        std_err: cube * (frac * (1.0 - frac) / samples as f64).sqrt(),
        samples,
    })
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Monge-Ampère capacity (relative to the unit polydisk) of the toric compact
/// whose log-image is `q`.
pub fn capacity(q: &GeneratorSet, method: Method) -> Result<CovolumeResult> {
    Ok(covolume(&q.copolar(), method)?.scaled(factorial(q.dim())))
}

/// Energy of the weighted extremal function `c·ω_K`, i.e. `-c^{n+1} Cap(K)`.
pub fn weighted_energy(q: &GeneratorSet, c: f64, method: Method) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "weight must be positive, got {c}"
        )));
    }
    let cap = capacity(q, method)?;
    Ok(-c.powi(q.dim() as i32 + 1) * cap.value)
}

#[derive(Debug, Clone)]
struct HalfSpace {
    a: Vec<f64>,
    b: f64,
}

const ZERO_ROW: f64 = 1e-12;
const SAME_DIR: f64 = 1e-12;

/// Drops vanishing rows (returning `None` if one of them is violated) and
/// merges parallel rows pointing the same way, keeping the tighter one.
fn normalize_rows(rows: Vec<HalfSpace>) -> Option<Vec<HalfSpace>> {
    let mut out: Vec<HalfSpace> = Vec::with_capacity(rows.len());
    for r in rows {
        let norm = r.a.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= ZERO_ROW {
            if r.b < -ZERO_ROW {
                return None;
            }
            continue;
        }
        let a: Vec<f64> = r.a.iter().map(|v| v / norm).collect();
        let b = r.b / norm;
        match out
            .iter_mut()
            .find(|o| o.a.iter().zip(&a).all(|(x, y)| (x - y).abs() <= SAME_DIR))
        {
            Some(o) => o.b = o.b.min(b),
            None => out.push(HalfSpace { a, b }),
        }
    }
    Some(out)
}

/// Volume of the bounded polytope `{x in R^dim : a_i·x <= b_i}` by Lasserre's
/// recursion `Vol_n = (1/n) Σ_i (b_i/|a_i|) Vol_{n-1}(F_i)`. Each facet is
/// parametrized by eliminating its largest-coefficient variable, which turns
/// `(b_i/|a_i|) Vol_{n-1}(F_i)` into `(b_i/|a_ij|) Vol_{n-1}(proj F_i)`.
fn polytope_volume(rows: Vec<HalfSpace>, dim: usize) -> f64 {
    let Some(rows) = normalize_rows(rows) else {
        return 0.0;
    };
    if dim == 1 {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for r in &rows {
            if r.a[0] > 0.0 {
                hi = hi.min(r.b / r.a[0]);
            } else {
                lo = lo.max(r.b / r.a[0]);
            }
        }
        return (hi - lo).max(0.0);
    }
    let mut total = 0.0;
    for (i, facet) in rows.iter().enumerate() {
        if facet.b == 0.0 {
            continue;
        }
        let (j, pivot) = facet
            .a
            .iter()
            .copied()
            .enumerate()
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .unwrap();
        // x_j = (b_i - Σ_{l≠j} a_il x_l) / a_ij
        let projected: Vec<HalfSpace> = rows
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, r)| {
                let f = r.a[j] / pivot;
                let a = (0..dim)
                    .filter(|&l| l != j)
                    .map(|l| r.a[l] - f * facet.a[l])
                    .collect();
                HalfSpace {
                    a,
                    b: r.b - f * facet.b,
                }
            })
            .collect();
        let sub = polytope_volume(projected, dim - 1);
        if sub > 0.0 {
            total += facet.b / pivot.abs() * sub;
        }
    }
    (total / dim as f64).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(normals: &[&[f64]]) -> HalfSpaceSet {
        HalfSpaceSet::new(normals.iter().map(|g| g.to_vec()).collect()).unwrap()
    }

    fn q(gens: &[&[f64]]) -> GeneratorSet {
        GeneratorSet::new(gens.iter().map(|g| g.to_vec()).collect()).unwrap()
    }

    fn cube(n: usize, side: f64) -> Vec<HalfSpace> {
        let mut rows = Vec::new();
        for k in 0..n {
            let mut lo = vec![0.0; n];
            lo[k] = -1.0;
            rows.push(HalfSpace { a: lo, b: 0.0 });
            let mut hi = vec![0.0; n];
            hi[k] = 1.0;
            rows.push(HalfSpace { a: hi, b: side });
        }
        rows
    }

    #[test]
    fn lasserre_on_known_polytopes() {
        for n in 1..=4 {
            let v = polytope_volume(cube(n, 2.0), n);
            assert!((v - 2f64.powi(n as i32)).abs() < 1e-12, "cube n={n}: {v}");
        }
        // Standard simplex x >= 0, Σx <= 1 has volume 1/n!.
        for n in 2..=4 {
            let mut rows = cube(n, 5.0);
            rows.push(HalfSpace {
                a: vec![1.0; n],
                b: 1.0,
            });
            let v = polytope_volume(rows, n);
            assert!((v - 1.0 / factorial(n)).abs() < 1e-14, "simplex n={n}: {v}");
        }
        // Translated square not containing the origin.
        let rows = vec![
            HalfSpace {
                a: vec![1.0, 0.0],
                b: 3.0,
            },
            HalfSpace {
                a: vec![-1.0, 0.0],
                b: -2.0,
            },
            HalfSpace {
                a: vec![0.0, 1.0],
                b: 5.0,
            },
            HalfSpace {
                a: vec![0.0, -1.0],
                b: -4.5,
            },
        ];
        assert!((polytope_volume(rows, 2) - 0.5).abs() < 1e-14);
        // Empty.
        let rows = vec![
            HalfSpace {
                a: vec![1.0],
                b: 1.0,
            },
            HalfSpace {
                a: vec![-1.0],
                b: -2.0,
            },
        ];
        assert_eq!(polytope_volume(rows, 1), 0.0);
    }

    #[test]
    fn lasserre_with_duplicate_and_redundant_rows() {
        let mut rows = cube(3, 1.0);
        rows.push(HalfSpace {
            a: vec![2.0, 0.0, 0.0],
            b: 2.0,
        });
        rows.push(HalfSpace {
            a: vec![1.0, 0.0, 0.0],
            b: 7.0,
        });
        rows.push(HalfSpace {
            a: vec![1.0, 1.0, 1.0],
            b: 3.0,
        });
        assert!((polytope_volume(rows, 3) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn covolume_exact_examples() {
        let r = covolume_exact(&q(&[&[-1.0, -1.0]]).copolar()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        assert_eq!(r.std_err, 0.0);
        assert_eq!(r.method, MethodKind::Exact);

        let r = covolume_exact(&hs(&[&[-1.0, -2.0], &[-2.0, -1.0]])).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-15);

        let r = covolume_exact(&hs(&[&[-4.0]])).unwrap();
        assert!((r.value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn exact_refuses_high_dimension() {
        let p = hs(&[&[-1.0; 5]]);
        assert!(matches!(
            covolume_exact(&p),
            Err(Error::DimensionTooLarge { dim: 5, .. })
        ));
        assert!(covolume_mc(&p, 10_000, 1).is_ok());
    }

    #[test]
    fn mc_examples() {
        let p = q(&[&[-1.0, -1.0]]).copolar();
        let r = covolume_mc(&p, 1_000_000, 42).unwrap();
        assert!((r.value - 0.5).abs() <= 3.0 * r.std_err, "{r:?}");
        assert!(r.std_err > 0.0);
        let again = covolume_mc(&p, 1_000_000, 42).unwrap();
        assert_eq!(r.value.to_bits(), again.value.to_bits());

        let p = hs(&[&[-1.0, -2.0], &[-2.0, -1.0]]);
        let r = covolume_mc(&p, 1_000_000, 3).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() <= 3.0 * r.std_err, "{r:?}");

        assert!(matches!(
            covolume_mc(&p, 999, 3),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn capacity_examples() {
        let r = capacity(&q(&[&[-1.0]]), Method::Exact).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);

        let radii: [f64; 3] = [0.5, 0.2, 0.7];
        let gen: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        let r = capacity(&GeneratorSet::new(vec![gen]).unwrap(), Method::Exact).unwrap();
        let expected: f64 = radii.iter().map(|r| 1.0 / (1.0 / r).ln()).product();
        assert!((r.value - expected).abs() < 1e-12 * expected);

        let r = capacity(&q(&[&[-1.0, -2.0], &[-2.0, -1.0]]), Method::Exact).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn capacity_in_one_dimension_is_reciprocal_radius() {
        for r in [0.1, 0.5, 1.0, 2.5, 17.0] {
            let cap = capacity(&q(&[&[-r], &[-2.0 * r]]), Method::Exact).unwrap();
            assert_eq!(cap.value, 1.0 / r);
        }
    }

    #[test]
    fn weighted_energy_examples() {
        let two = q(&[&[-1.0, -2.0], &[-2.0, -1.0]]);
        let cap = capacity(&two, Method::Exact).unwrap().value;
        assert_eq!(weighted_energy(&two, 1.0, Method::Exact).unwrap(), -cap);
        assert_eq!(
            weighted_energy(&q(&[&[-1.0]]), 2.0, Method::Exact).unwrap(),
            -4.0
        );
        let e = weighted_energy(&q(&[&[-1.0, -1.0]]), 3.0, Method::Exact).unwrap();
        assert!((e + 27.0).abs() < 1e-12);
        assert!(weighted_energy(&two, 0.0, Method::Exact).is_err());
    }
}
