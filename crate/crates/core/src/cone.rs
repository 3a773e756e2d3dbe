//! Reversal cone for a single added covariate.
//!
//! Take `x` and `y` residualized on `[e W]`, scaled to unit length and
//! aligned so that their correlation `r` is positive. In orthonormal
//! coordinates of the residual space chosen so that
//!
//! ```text
//! x = (-sqrt((1-r)/2), sqrt((1+r)/2), 0, ..., 0)
//! y = ( sqrt((1-r)/2), sqrt((1+r)/2), 0, ..., 0)
//! ```
//!
//! a covariate direction `u` leaves the adjusted coefficient at zero exactly on
//! the quadric `(1+r) u2^2 - (1-r) u1^2 = 2r |u|^2`. On the slice `u2 = 1` this
//! is the ellipsoid `a1 u1^2 + a_rest (u3^2 + ... + um^2) = 1` with
//! `a1 = (1+r)/(1-r)` and `a_rest = 2r/(1-r)`. Directions strictly inside
//! either nappe reverse the sign.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{DataColumn, DataMatrix, RANK_TOL};
use crate::stats;
use crate::vector::{self, Orthonormal};

/// Relative distance from the zero set below which a direction is reported as [`ConeMembership::Boundary`].
pub const BOUNDARY_TOL: f64 = 1e-9;

/// `(a1, a_rest)` for the cross-section at `u2 = 1`.
pub fn cone_coefficients(r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain { what: "cone correlation", value: r });
    }
    Ok(((1.0 + r) / (1.0 - r), 2.0 * r / (1.0 - r)))
}

/// The cone in canonical coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeSpec {
    r: f64,
    m: usize,
    /// Direction of `v`; in canonical coordinates this is the second unit vector.
    axis: Vec<f64>,
}

impl ConeSpec {
    pub fn new(r: f64, m: usize) -> Result<Self> {
        cone_coefficients(r)?;
        if m < 3 {
            return Err(Error::Domain { what: "cone dimension", value: m as f64 });
        }
        let mut axis = vec![0.0; m];
        axis[1] = 1.0;
        Ok(Self { r, m, axis })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn coefficients(&self) -> (f64, f64) {
        ((1.0 + self.r) / (1.0 - self.r), 2.0 * self.r / (1.0 - self.r))
    }

    /// Canonical coordinates of the unit-length, aligned `x` and `y`.
    pub fn canonical_xy(&self) -> (Vec<f64>, Vec<f64>) {
        let a = libm::sqrt((1.0 - self.r) / 2.0);
        let b = libm::sqrt((1.0 + self.r) / 2.0);
        let mut x = vec![0.0; self.m];
        let mut y = vec![0.0; self.m];
        x[0] = -a;
        x[1] = b;
        y[0] = a;
        y[1] = b;
        (x, y)
    }

    /// `a1 (u1/u2)^2 + a_rest sum_{i>=3} (ui/u2)^2 - 1`; zero on the boundary.
    pub fn boundary_residual(&self, u: &[f64]) -> f64 {
        let (a1, a_rest) = self.coefficients();
        let s = u[1];
        let rest: f64 = u[2..].iter().map(|v| (v / s) * (v / s)).sum();
        a1 * (u[0] / s) * (u[0] / s) + a_rest * rest - 1.0
    }

    /// Classifies a direction given in canonical coordinates.
    pub fn classify(&self, u: &[f64]) -> Result<ConeMembership> {
        if u.len() != self.m {
            return Err(Error::DimensionMismatch { label: "u".into(), expected: self.m, found: u.len() });
        }
        let n2 = vector::dot(u, u);
        if n2 == 0.0 {
            return Err(Error::ZeroVariance { column: "u".into() });
        }
        Ok(membership(self.r, u[0], u[1], n2))
    }

    /// The two boundary directions with the smallest `R^2` against `v`
    /// (equal to `r*`): `(0, 1, ±1/sqrt(a_rest), 0, ...)`, unit length.
    pub fn extreme_directions(&self) -> [Vec<f64>; 2] {
        let (_, a_rest) = self.coefficients();
        let t = 1.0 / libm::sqrt(a_rest);
        [t, -t].map(|s| {
            let mut u = vec![0.0; self.m];
            u[1] = 1.0;
            u[2] = s;
            normalized(u)
        })
    }
}

fn normalized(mut u: Vec<f64>) -> Vec<f64> {
    let n = vector::norm(&u);
    for v in u.iter_mut() {
        *v /= n;
    }
    u
}

/// Where a covariate direction lies relative to the reversal cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConeMembership {
    /// Adding the covariate reverses the sign of the coefficient of `x`.
    Inside,
    /// The adjusted coefficient is zero.
    Boundary,
    Outside,
}

// c1, c2: coordinates along (y - x) and (x + y); n2 = |u|^2.
fn membership(r: f64, c1: f64, c2: f64, n2: f64) -> ConeMembership {
    // ratio - 1 where ratio = <x^(u), y^(u)> / r for unit x, y
    let excess = ((1.0 + r) * c2 * c2 - (1.0 - r) * c1 * c1) / (2.0 * r * n2) - 1.0;
    if libm::fabs(excess) <= BOUNDARY_TOL {
        ConeMembership::Boundary
    } else if excess > 0.0 {
        ConeMembership::Inside
    } else {
        ConeMembership::Outside
    }
}

/// Orthonormal coordinates for the residual space of `x` and `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalFrame {
    r: f64,
    x_negated: bool,
    basis: Vec<Vec<f64>>,
}

impl CanonicalFrame {
    /// `|r(x, y)|`.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// True when `x` was negated to make the correlation positive.
    pub fn x_negated(&self) -> bool {
        self.x_negated
    }

    /// Basis vectors in data coordinates. The first spans `y - x`, the second
    /// is the `v` direction.
    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coordinates(&self, data: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| vector::dot(b, data)).collect()
    }

    pub fn to_data(&self, coords: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.basis[0].len()];
        for (b, c) in self.basis.iter().zip(coords) {
            vector::axpy(&mut out, *c, b);
        }
        out
    }

    pub fn cone_spec(&self) -> Result<ConeSpec> {
        ConeSpec::new(self.r, self.dim())
    }
}

struct Aligned {
    r: f64,
    negated: bool,
    b1: Vec<f64>,
    b2: Vec<f64>,
}

fn align(x_res: &DataColumn, y_res: &DataColumn) -> Result<Aligned> {
    let r = stats::corr(x_res, y_res)?;
    if libm::fabs(r) < 1e-10 {
        return Err(Error::DegenerateBaseline);
    }
    let negated = r < 0.0;
    let r = libm::fabs(r);
    if r >= 1.0 - 1e-12 {
        return Err(Error::Domain { what: "cone correlation", value: r });
    }
    let mut x = vector::centered(x_res.values());
    let mut y = vector::centered(y_res.values());
    let (nx, ny) = (vector::norm(&x), vector::norm(&y));
    let sx = if negated { -1.0 / nx } else { 1.0 / nx };
    x.iter_mut().for_each(|v| *v *= sx);
    y.iter_mut().for_each(|v| *v /= ny);
    let b1 = normalized(vector::sub(&y, &x));
    let mut b2 = x;
    vector::axpy(&mut b2, 1.0, &y);
    Ok(Aligned { r, negated, b1, b2: normalized(b2) })
}

/// Canonical frame of the space orthogonal to the ones column (`m = n - 1`).
pub fn canonical_frame(x_res: &DataColumn, y_res: &DataColumn) -> Result<CanonicalFrame> {
    canonical_frame_with_controls(x_res, y_res, &DataMatrix::empty())
}

/// Canonical frame of the space orthogonal to `[e controls]` (`m = n - p - 1`).
/// `x_res` and `y_res` must already be residualized on the controls.
pub fn canonical_frame_with_controls(
    x_res: &DataColumn,
    y_res: &DataColumn,
    controls: &DataMatrix,
) -> Result<CanonicalFrame> {
    let a = align(x_res, y_res)?;
    let n = x_res.len();
    let mut span = Orthonormal::new();
    span.push(&vec![1.0; n], RANK_TOL);
    for c in controls {
        span.push(c.values(), RANK_TOL)
            .ok_or_else(|| Error::RankDeficient { column: c.label().into() })?;
    }
    let skip = span.len();
    span.push(&a.b1, RANK_TOL).ok_or(Error::DegenerateBaseline)?;
    span.push(&a.b2, RANK_TOL).ok_or(Error::DegenerateBaseline)?;
    let mut i = 0;
    while span.len() < n && i < n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        // A loose threshold keeps the completion well conditioned.
        span.push(&e, 1e-3);
        i += 1;
    }
    let basis = span.basis.split_off(skip);
    Ok(CanonicalFrame { r: a.r, x_negated: a.negated, basis })
}

/// Whether adding `u_res` to the regression of `y_res` on `x_res` lands inside
/// the reversal cone. Scale-invariant in `u_res`, including sign.
pub fn in_reversal_cone(u_res: &DataColumn, x_res: &DataColumn, y_res: &DataColumn) -> Result<ConeMembership> {
    let a = align(x_res, y_res)?;
    let u = vector::centered(u_res.values());
    let n2 = vector::dot(&u, &u);
    if n2 == 0.0 || u_res.is_constant() {
        return Err(Error::ZeroVariance { column: u_res.label().into() });
    }
    Ok(membership(a.r, vector::dot(&u, &a.b1), vector::dot(&u, &a.b2), n2))
}

/// `count` unit vectors on the cone boundary, in canonical coordinates,
/// reproducible from `seed`. Each sample picks a uniform direction on the
/// ellipsoidal cross-section at `u2 = 1` and normalizes the result.
pub fn sample_boundary(spec: &ConeSpec, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let (a1, a_rest) = spec.coefficients();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z: Vec<f64> = (0..spec.m - 1).map(|_| StandardNormal.sample(&mut rng)).collect();
        let nz = vector::norm(&z);
        if nz == 0.0 {
            continue;
        }
        let mut u = vec![0.0; spec.m];
        u[0] = z[0] / nz / libm::sqrt(a1);
        u[1] = 1.0;
        for i in 2..spec.m {
            u[i] = z[i - 1] / nz / libm::sqrt(a_rest);
        }
        out.push(normalized(u));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coefficients_examples() {
        let (a1, ar) = cone_coefficients(1.0 / 3.0).unwrap();
        assert_abs_diff_eq!(a1, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ar, 1.0, epsilon = 1e-14);
        assert_eq!(cone_coefficients(0.5).unwrap(), (3.0, 2.0));
        assert!(cone_coefficients(0.0).is_err());
        assert!(cone_coefficients(1.0).is_err());
        // cross-sections become circular as r -> 1
        let ratios: Vec<f64> = [0.5, 0.9, 0.99, 0.999]
            .iter()
            .map(|&r| {
                let (a1, ar) = cone_coefficients(r).unwrap();
                assert!(a1 > 0.0 && ar > 0.0);
                a1 / ar
            })
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));
        assert_abs_diff_eq!(*ratios.last().unwrap(), 1.0, epsilon = 1e-3);
    }

    #[test]
    fn u1_extreme_point_on_quadric() {
        let spec = ConeSpec::new(0.4, 4).unwrap();
        let (a1, _) = spec.coefficients();
        let u = normalized(vec![1.0 / a1.sqrt(), 1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(spec.boundary_residual(&u), 0.0, epsilon = 1e-12);
        assert_eq!(spec.classify(&u).unwrap(), ConeMembership::Boundary);
    }

    #[test]
    fn samples_deterministic_and_on_boundary() {
        let spec = ConeSpec::new(0.3, 5).unwrap();
        let a = sample_boundary(&spec, 20, 7);
        assert_eq!(a, sample_boundary(&spec, 20, 7));
        assert_ne!(a, sample_boundary(&spec, 20, 8));
        for u in &a {
            assert_abs_diff_eq!(vector::norm(u), 1.0, epsilon = 1e-14);
            assert!(spec.boundary_residual(u).abs() < 1e-10);
        }
    }

    #[test]
    fn canonical_xy_for_one_third() {
        let spec = ConeSpec::new(1.0 / 3.0, 3).unwrap();
        let (x, y) = spec.canonical_xy();
        let (s1, s2) = ((1.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt());
        for (got, want) in x.iter().zip([-s1, s2, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        for (got, want) in y.iter().zip([s1, s2, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        // <x, y> = r
        assert_abs_diff_eq!(vector::dot(&x, &y), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn classify_axis_and_orthogonal() {
        let spec = ConeSpec::new(0.5, 3).unwrap();
        assert_eq!(spec.classify(&[0.0, 1.0, 0.0]).unwrap(), ConeMembership::Inside);
        assert_eq!(spec.classify(&[0.0, 0.0, 1.0]).unwrap(), ConeMembership::Outside);
        assert_eq!(spec.classify(&[0.0, -3.0, 0.0]).unwrap(), ConeMembership::Inside);
        assert!(spec.classify(&[0.0; 3]).is_err());
    }
}
