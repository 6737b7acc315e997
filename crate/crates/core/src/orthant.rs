//! Complete convex sets in the negative and positive orthants.
//!
//! A [`GeneratorSet`] stores `Q = conv(generators) + R^n_-` with every
//! generator strictly inside the negative orthant. Its copolar
//! `Q° = {x >= 0 : <x, y> <= -1 for all y in Q}` is a [`HalfSpaceSet`] whose
//! normals are exactly the generators of `Q`: recession directions of `Q`
//! only decrease `<x, y>` for `x >= 0`, so the generator constraints suffice.

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::lp::{LinearProgram, Relation};

/// Smallest admissible distance of a generator from the orthant boundary.
pub const DEFAULT_MARGIN: f64 = 1e-9;
/// Membership tolerance on the depth program used by [`GeneratorSet::contains`]
/// and by reduction.
pub const CONTAIN_TOL: f64 = 1e-10;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn validate_points(points: &[Vec<f64>], margin: f64, what: &str) -> Result<usize> {
    if !(margin > 0.0) || !margin.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "margin must be positive, got {margin}"
        )));
    }
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidGenerators(format!("no {what} given")))?;
    let dim = first.len();
    if dim == 0 {
        return Err(Error::InvalidGenerators(
            "dimension must be at least 1".into(),
        ));
    }
    for p in points {
        check_dim(dim, p.len())?;
        for &v in p {
            if !v.is_finite() || v > -margin {
                return Err(Error::InvalidGenerators(format!(
                    "{what} coordinate {v} is not <= -{margin}"
                )));
            }
        }
    }
    Ok(dim)
}

fn dedup_exact(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// V-representation of a complete convex set in the negative orthant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorSet {
    dim: usize,
    generators: Vec<Vec<f64>>,
    margin: f64,
}

impl GeneratorSet {
    /// Builds a set with the default margin. Exact duplicates are merged.
    pub fn new(generators: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_margin(generators, DEFAULT_MARGIN)
    }

    pub fn with_margin(generators: Vec<Vec<f64>>, margin: f64) -> Result<Self> {
        let dim = validate_points(&generators, margin, "generator")?;
        Ok(Self {
            dim,
            generators: dedup_exact(generators),
            margin,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// `h_Q(a) = sup_{s in Q} <a, s>` for `a` in the closed positive orthant.
    pub fn support_function(&self, a: &[f64]) -> Result<f64> {
        check_dim(self.dim, a.len())?;
        if let Some((index, &value)) = a.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NegativeDirection { index, value });
        }
        Ok(self.support_unchecked(a))
    }

    pub(crate) fn support_unchecked(&self, a: &[f64]) -> f64 {
        self.generators
            .iter()
            .map(|g| dot(a, g))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Signed depth of `s` in the sup-norm: the largest `tau` such that
    /// `s + tau·1` lies in `Q`. Positive inside, and for points outside its
    /// magnitude is the sup-norm distance to `Q`.
    pub fn depth(&self, s: &[f64]) -> Result<f64> {
        check_dim(self.dim, s.len())?;
        Ok(depth_among(&self.generators, s))
    }

    /// Membership in `conv(generators) + R^n_-`.
    pub fn contains(&self, s: &[f64]) -> Result<bool> {
        self.contains_within(s, CONTAIN_TOL)
    }

    /// Membership up to a sup-norm tolerance.
    pub fn contains_within(&self, s: &[f64], tol: f64) -> Result<bool> {
        check_dim(self.dim, s.len())?;
        Ok(contains_among(&self.generators, s, tol))
    }

    /// Drops every generator that lies in the set spanned by the others.
    /// Generators are examined in input order.
    pub fn reduce(&self) -> GeneratorSet {
        let mut kept = self.generators.clone();
        let mut i = 0;
        while i < kept.len() {
            if kept.len() > 1 {
                let others: Vec<Vec<f64>> = kept
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, g)| g.clone())
                    .collect();
                if contains_among(&others, &kept[i], CONTAIN_TOL) {
                    kept.remove(i);
                    continue;
                }
            }
            i += 1;
        }
        GeneratorSet {
            dim: self.dim,
            generators: kept,
            margin: self.margin,
        }
    }

    /// Minkowski combination `(1 - t) Q0 + t Q1`, reduced.
    pub fn interpolate(q0: &GeneratorSet, q1: &GeneratorSet, t: f64) -> Result<GeneratorSet> {
        check_dim(q0.dim, q1.dim)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("t = {t} outside [0, 1]")));
        }
        if t == 0.0 {
            return Ok(q0.reduce());
        }
        if t == 1.0 {
            return Ok(q1.reduce());
        }
        let mut combos = Vec::with_capacity(q0.generators.len() * q1.generators.len());
        for g in &q0.generators {
            for h in &q1.generators {
                combos.push(
                    g.iter()
                        .zip(h)
                        .map(|(a, b)| (1.0 - t) * a + t * b)
                        .collect::<Vec<_>>(),
                );
            }
        }
        let set = GeneratorSet {
            dim: q0.dim,
            generators: dedup_exact(combos),
            margin: q0.margin.min(q1.margin),
        };
        Ok(set.reduce())
    }

    /// Dilation `λQ`.
    pub fn scale(&self, lambda: f64) -> Result<GeneratorSet> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {lambda}"
            )));
        }
        Ok(GeneratorSet {
            dim: self.dim,
            generators: self
                .generators
                .iter()
                .map(|g| g.iter().map(|v| v * lambda).collect())
                .collect(),
            margin: self.margin * lambda,
        })
    }

    /// Translation by a vector in the closed negative orthant.
    pub fn shift(&self, offset: &[f64]) -> Result<GeneratorSet> {
        check_dim(self.dim, offset.len())?;
        if offset.iter().any(|v| !(*v <= 0.0)) {
            return Err(Error::InvalidParameter("shift must be nonpositive".into()));
        }
        Ok(GeneratorSet {
            dim: self.dim,
            generators: self
                .generators
                .iter()
                .map(|g| g.iter().zip(offset).map(|(a, b)| a + b).collect())
                .collect(),
            margin: self.margin,
        })
    }

    /// The copolar set `Q°` in the positive orthant.
    pub fn copolar(&self) -> HalfSpaceSet {
        HalfSpaceSet {
            dim: self.dim,
            normals: self.generators.clone(),
            margin: self.margin,
        }
    }

    /// True when both sets contain each other's generators within `tol`.
    pub fn same_set(&self, other: &GeneratorSet, tol: f64) -> Result<bool> {
        check_dim(self.dim, other.dim)?;
        Ok(other
            .generators
            .iter()
            .all(|g| contains_among(&self.generators, g, tol))
            && self
                .generators
                .iter()
                .all(|g| contains_among(&other.generators, g, tol)))
    }

    /// Coordinatewise maximum over generators (the corner of the smallest
    /// negative-orthant translate containing `Q`).
    pub fn upper_corner(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|k| {
                self.generators
                    .iter()
                    .map(|g| g[k])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }
}

fn contains_among(gens: &[Vec<f64>], s: &[f64], tol: f64) -> bool {
    // Fast accept: dominated by a single generator.
    if gens
        .iter()
        .any(|g| g.iter().zip(s).all(|(a, b)| *b <= a + tol))
    {
        return true;
    }
    // Fast reject: beyond the upper corner in some coordinate.
    for k in 0..s.len() {
        let top = gens.iter().map(|g| g[k]).fold(f64::NEG_INFINITY, f64::max);
        if s[k] > top + tol {
            return false;
        }
    }
    depth_among(gens, s) >= -tol
}

/// maximize tau  s.t.  sum_i lambda_i g_i - tau·1 >= s,  sum lambda = 1.
/// Variables: lambda (m), tau+ , tau-.
fn depth_among(gens: &[Vec<f64>], s: &[f64]) -> f64 {
    let m = gens.len();
    let n = s.len();
    let mut obj = vec![0.0; m + 2];
    obj[m] = 1.0;
    obj[m + 1] = -1.0;
    let mut lp = LinearProgram::maximize(obj);
    for k in 0..n {
        let mut row: Vec<f64> = gens.iter().map(|g| g[k]).collect();
        row.push(-1.0);
        row.push(1.0);
        lp.constraint(row, Relation::Ge, s[k]);
    }
    let mut simplex = vec![1.0; m];
    simplex.extend([0.0, 0.0]);
    lp.constraint(simplex, Relation::Eq, 1.0);
    // Always feasible and bounded: tau is capped by max_g g - s.
    match lp.solve_optimal() {
        Ok((v, _)) => v,
        Err(_) => f64::NEG_INFINITY,
    }
}

/// H-representation `{x >= 0 : <x, g> <= -1 for every normal g}` of a complete
/// convex set in the positive orthant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfSpaceSet {
    dim: usize,
    normals: Vec<Vec<f64>>,
    margin: f64,
}

impl HalfSpaceSet {
    pub fn new(normals: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_margin(normals, DEFAULT_MARGIN)
    }

    pub fn with_margin(normals: Vec<Vec<f64>>, margin: f64) -> Result<Self> {
        let dim = validate_points(&normals, margin, "normal")?;
        Ok(Self {
            dim,
            normals: dedup_exact(normals),
            margin,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        Ok(self.contains_unchecked(x))
    }

    #[inline]
    pub(crate) fn contains_unchecked(&self, x: &[f64]) -> bool {
        x.iter().all(|v| *v >= 0.0) && self.normals.iter().all(|g| dot(x, g) <= -1.0)
    }

    /// Back to the negative orthant: `P°` as a reduced generator set.
    pub fn copolar_inverse(&self) -> GeneratorSet {
        GeneratorSet {
            dim: self.dim,
            generators: self.normals.clone(),
            margin: self.margin,
        }
        .reduce()
    }

    /// Copolar combination `((1 - t) P0° + t P1°)°`.
    pub fn copolar_add(p0: &HalfSpaceSet, p1: &HalfSpaceSet, t: f64) -> Result<HalfSpaceSet> {
        check_dim(p0.dim, p1.dim)?;
        let q = GeneratorSet::interpolate(&p0.copolar_inverse(), &p1.copolar_inverse(), t)?;
        Ok(q.copolar())
    }

    /// Side of a cube `[0, M]^n` containing the complement `R^n_+ \ P`.
    pub fn bounding_box(&self) -> f64 {
        self.normals
            .iter()
            .flat_map(|g| g.iter().map(|v| 1.0 / v.abs()))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(gens: &[&[f64]]) -> GeneratorSet {
        GeneratorSet::new(gens.iter().map(|g| g.to_vec()).collect()).unwrap()
    }

    fn same_list(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
        a.len() == b.len()
            && a.iter().all(|g| {
                b.iter()
                    .any(|h| g.iter().zip(h).all(|(x, y)| (x - y).abs() <= tol))
            })
    }

    #[test]
    fn support_function_examples() {
        assert_eq!(
            q(&[&[-1.0, -1.0]]).support_function(&[2.0, 3.0]).unwrap(),
            -5.0
        );
        let two = q(&[&[-1.0, -2.0], &[-2.0, -1.0]]);
        assert_eq!(two.support_function(&[1.0, 1.0]).unwrap(), -3.0);
        assert_eq!(two.support_function(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn support_function_errors() {
        let one = q(&[&[-1.0, -1.0]]);
        assert!(matches!(
            one.support_function(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            one.support_function(&[1.0, -0.5]),
            Err(Error::NegativeDirection { index: 1, .. })
        ));
    }

    #[test]
    fn construction_rejects_bad_generators() {
        assert!(GeneratorSet::new(vec![]).is_err());
        assert!(GeneratorSet::new(vec![vec![-1.0, 0.0]]).is_err());
        assert!(GeneratorSet::new(vec![vec![-1.0, -1.0], vec![-1.0]]).is_err());
        assert!(GeneratorSet::new(vec![vec![-1.0, f64::NAN]]).is_err());
        assert!(GeneratorSet::with_margin(vec![vec![-0.5]], 1.0).is_err());
        // Duplicates merged.
        assert_eq!(q(&[&[-1.0], &[-1.0]]).generators().len(), 1);
    }

    #[test]
    fn membership_examples() {
        let one = q(&[&[-1.0, -1.0]]);
        assert!(one.contains(&[-2.0, -1.0]).unwrap());
        assert!(!one.contains(&[-0.5, -3.0]).unwrap());
        let two = q(&[&[-1.0, -2.0], &[-2.0, -1.0]]);
        assert!(two.contains(&[-1.5, -1.5]).unwrap());
        assert!(!two.contains(&[-1.4, -1.4]).unwrap());
        assert!(one.contains(&[-1.0]).is_err());
    }

    #[test]
    fn depth_is_signed_sup_distance() {
        let two = q(&[&[-1.0, -2.0], &[-2.0, -1.0]]);
        assert!((two.depth(&[-1.5, -1.5]).unwrap()).abs() < 1e-12);
        assert!((two.depth(&[-2.0, -2.0]).unwrap() - 0.5).abs() < 1e-12);
        assert!((two.depth(&[-1.0, -1.0]).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(
            q(&[&[-1.0, -1.0], &[-2.0, -2.0]]).reduce().generators(),
            &[vec![-1.0, -1.0]]
        );
        let r = q(&[&[-1.0, -2.0], &[-2.0, -1.0], &[-1.5, -1.5]]).reduce();
        assert_eq!(r.generators(), &[vec![-1.0, -2.0], vec![-2.0, -1.0]]);
        let already = q(&[&[-1.0, -2.0], &[-2.0, -1.0]]);
        assert_eq!(already.reduce(), already);
    }

    #[test]
    fn interpolate_examples() {
        let a = q(&[&[-1.0, -1.0]]);
        let b = q(&[&[-3.0, -3.0]]);
        let mid = GeneratorSet::interpolate(&a, &b, 0.5).unwrap();
        assert_eq!(mid.generators(), &[vec![-2.0, -2.0]]);
        assert_eq!(GeneratorSet::interpolate(&a, &b, 0.0).unwrap(), a);
        assert_eq!(GeneratorSet::interpolate(&a, &b, 1.0).unwrap(), b);

        let two = q(&[&[-1.0, -2.0], &[-2.0, -1.0]]);
        let mid = GeneratorSet::interpolate(&two, &a, 0.5).unwrap();
        assert!(same_list(
            mid.generators(),
            &[vec![-1.0, -1.5], vec![-1.5, -1.0]],
            0.0
        ));
        assert!(GeneratorSet::interpolate(&two, &a, 1.5).is_err());
        assert!(GeneratorSet::interpolate(&two, &q(&[&[-1.0]]), 0.5).is_err());
    }

    #[test]
    fn scale_examples() {
        let a = q(&[&[-1.0, -1.0]]);
        assert_eq!(a.scale(2.0).unwrap().generators(), &[vec![-2.0, -2.0]]);
        assert_eq!(a.scale(1.0).unwrap(), a);
        assert!(a.scale(0.0).is_err());
        assert!(a.scale(-1.0).is_err());
    }

    #[test]
    fn copolar_of_scaled_set_scales_inversely() {
        // (λQ)° = λ^{-1} Q°: x ∈ Q° iff x / λ ∈ (λQ)°.
        let two = q(&[&[-1.0, -2.0], &[-2.0, -1.0]]);
        let lambda = 2.5;
        let p = two.copolar();
        let ps = two.scale(lambda).unwrap().copolar();
        for x in [
            [0.3, 0.9],
            [0.5, 0.5],
            [1.0, 0.2],
            [0.34, 0.34],
            [0.33, 0.33],
        ] {
            let xs = [x[0] / lambda, x[1] / lambda];
            assert_eq!(p.contains(&x).unwrap(), ps.contains(&xs).unwrap());
        }
        for (g, h) in p.normals().iter().zip(ps.normals()) {
            for (a, b) in g.iter().zip(h) {
                assert!((b - lambda * a).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn copolar_examples() {
        let p = q(&[&[-4.0]]).copolar();
        assert!(p.contains(&[0.25]).unwrap());
        assert!(!p.contains(&[0.2499]).unwrap());

        let p = q(&[&[-1.0, -1.0]]).copolar();
        assert!(p.contains(&[0.5, 0.5]).unwrap());
        assert!(!p.contains(&[0.4, 0.5]).unwrap());

        let p = q(&[&[-1.0, -2.0], &[-2.0, -1.0]]).copolar();
        assert!(p.contains(&[1.0 / 3.0 + 1e-12, 1.0 / 3.0 + 1e-12]).unwrap());
        assert!(!p.contains(&[0.6, 0.1]).unwrap());
        assert!(!p.contains(&[-0.1, 2.0]).unwrap());
    }

    #[test]
    fn copolar_inverse_examples() {
        let two = q(&[&[-1.0, -2.0], &[-2.0, -1.0]]);
        assert_eq!(two.copolar().copolar_inverse(), two.reduce());
        let p = HalfSpaceSet::new(vec![vec![-1.0, -1.0]]).unwrap();
        assert_eq!(p.copolar_inverse().generators(), &[vec![-1.0, -1.0]]);
        let p = HalfSpaceSet::new(vec![vec![-1.0, -1.0], vec![-1.0, -1.0]]).unwrap();
        assert_eq!(p.copolar_inverse().generators().len(), 1);
        let p = HalfSpaceSet::new(vec![vec![-1.0, -1.0], vec![-2.0, -2.0]]).unwrap();
        assert_eq!(p.copolar_inverse().generators(), &[vec![-1.0, -1.0]]);
    }

    #[test]
    fn copolar_add_examples() {
        let p0 = q(&[&[-1.0, -2.0], &[-2.0, -1.0]]).copolar();
        for t in [0.0, 0.3, 1.0] {
            let s = HalfSpaceSet::copolar_add(&p0, &p0, t).unwrap();
            assert!(same_list(s.normals(), p0.normals(), 1e-15));
        }
        // Cosimplices combine to a cosimplex.
        let c0 = HalfSpaceSet::new(vec![vec![-1.0, -3.0]]).unwrap();
        let c1 = HalfSpaceSet::new(vec![vec![-2.0, -0.5]]).unwrap();
        let s = HalfSpaceSet::copolar_add(&c0, &c1, 0.25).unwrap();
        assert_eq!(s.normals().len(), 1);
        assert!((s.normals()[0][0] + 1.25).abs() < 1e-15);
        assert!((s.normals()[0][1] + 2.375).abs() < 1e-15);
        // t = 0 normalizes the left operand.
        let redundant = HalfSpaceSet::new(vec![vec![-1.0, -1.0], vec![-2.0, -2.0]]).unwrap();
        let s = HalfSpaceSet::copolar_add(&redundant, &c1, 0.0).unwrap();
        assert_eq!(s.normals(), &[vec![-1.0, -1.0]]);
    }

    #[test]
    fn bounding_box_examples() {
        assert_eq!(q(&[&[-1.0, -1.0]]).copolar().bounding_box(), 1.0);
        assert_eq!(
            q(&[&[-1.0, -2.0], &[-2.0, -1.0]]).copolar().bounding_box(),
            1.0
        );
        assert_eq!(q(&[&[-0.5, -4.0]]).copolar().bounding_box(), 2.0);
    }

    #[test]
    fn equality_of_represented_sets() {
        let a = q(&[&[-1.0, -1.0]]).scale(1.0).unwrap();
        let b = q(&[&[-0.5, -0.5]]).scale(2.0).unwrap();
        assert!(a.same_set(&b, 1e-12).unwrap());
        let c = q(&[&[-1.0, -2.0]]);
        assert!(!a.same_set(&c, 1e-12).unwrap());
    }
}
