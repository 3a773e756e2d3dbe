//! Small dense-vector helpers shared by the numerical modules.

use alloc::vec::Vec;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub(crate) fn mean(a: &[f64]) -> f64 {
    a.iter().sum::<f64>() / a.len() as f64
}

pub(crate) fn centered(a: &[f64]) -> Vec<f64> {
    let m = mean(a);
    a.iter().map(|v| v - m).collect()
}

/// `a += c * b`
pub(crate) fn axpy(a: &mut [f64], c: f64, b: &[f64]) {
    for (ai, bi) in a.iter_mut().zip(b) {
        *ai += c * bi;
    }
}

pub(crate) fn scaled(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|v| v * c).collect()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Incrementally built orthonormal basis (modified Gram-Schmidt with one
/// full re-orthogonalization pass).
#[derive(Clone, Debug, Default)]
pub(crate) struct Orthonormal {
    pub(crate) basis: Vec<Vec<f64>>,
}

/// Result of appending a vector to an [`Orthonormal`] basis.
pub(crate) struct Appended {
    /// Coordinates of the vector along the existing basis vectors.
    pub(crate) coords: Vec<f64>,
    /// Norm of the component orthogonal to the existing basis.
    pub(crate) residual_norm: f64,
}

impl Orthonormal {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    /// Orthogonalizes `v` against the basis. The new direction is added when its
    /// residual norm is at least `rel_tol` times the norm of `v`; otherwise `None`.
    pub(crate) fn push(&mut self, v: &[f64], rel_tol: f64) -> Option<Appended> {
        let original = norm(v);
        let mut w = v.to_vec();
        let mut coords = alloc::vec![0.0; self.basis.len()];
        for _pass in 0..2 {
            for (q, c) in self.basis.iter().zip(coords.iter_mut()) {
                let proj = dot(q, &w);
                *c += proj;
                axpy(&mut w, -proj, q);
            }
        }
        let residual_norm = norm(&w);
        if original.is_nan() || original <= 0.0 || residual_norm < rel_tol * original {
            return None;
        }
        for wi in w.iter_mut() {
            *wi /= residual_norm;
        }
        self.basis.push(w);
        Some(Appended { coords, residual_norm })
    }

    /// Orthogonal projection of `v` onto the span of the basis.
    pub(crate) fn project(&self, v: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; v.len()];
        for q in &self.basis {
            axpy(&mut out, dot(q, v), q);
        }
        out
    }

    pub(crate) fn len(&self) -> usize {
        self.basis.len()
    }
}
