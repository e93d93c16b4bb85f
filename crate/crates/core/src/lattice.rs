//! Truncated lattice sums: ellipsoid enumeration and Gaussian tail bounds.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack on the ellipsoid boundary so that points related by an
/// exact isometry of the quadratic form are kept or dropped together.
const BOUNDARY_SLACK: f64 = 1e-9;

/// Truncation of a Gaussian lattice sum to the ball `q(k) <= radius^2`.
///
/// With `radius: None` the smallest radius meeting `tail_tolerance` is used.
/// An explicit radius that cannot meet the tolerance is an error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationParams {
    pub radius: Option<f64>,
    pub tail_tolerance: f64,
}

impl Default for TruncationParams {
    fn default() -> Self {
        Self { radius: None, tail_tolerance: 1e-14 }
    }
}

impl TruncationParams {
    pub fn fixed(radius: f64, tail_tolerance: f64) -> Self {
        Self { radius: Some(radius), tail_tolerance }
    }

    pub fn auto(tail_tolerance: f64) -> Self {
        Self { radius: None, tail_tolerance }
    }

    pub fn doubled(&self, tail: &TailModel) -> Self {
        let r = self.radius.unwrap_or_else(|| tail.fit_radius(self.tail_tolerance));
        Self { radius: Some(2.0 * r), ..*self }
    }

    /// Chooses the radius for a sum with the given tail model and returns it
    /// together with the tail bound it achieves.
    pub fn resolve(&self, tail: &TailModel) -> Result<(f64, f64)> {
        if self.tail_tolerance.is_nan() || self.tail_tolerance <= 0.0 {
            return Err(Error::Parse("tail tolerance must be positive".into()));
        }
        let radius = match self.radius {
            Some(r) if r.is_nan() || r <= 0.0 => return Err(Error::Parse("radius must be positive".into())),
            Some(r) => r,
            None => tail.fit_radius(self.tail_tolerance),
        };
        let bound = tail.bound(radius);
        if bound > self.tail_tolerance {
            return Err(Error::Truncation { radius, bound, tolerance: self.tail_tolerance });
        }
        Ok((radius, bound))
    }
}

/// Terms satisfy `|term(k)| <= exp(-decay q(k) + drift sqrt(q(k)))` where
/// `q(k) >= min_eigenvalue |k|^2`.
#[derive(Clone, Copy, Debug)]
pub struct TailModel {
    pub dim: usize,
    pub min_eigenvalue: f64,
    pub decay: f64,
    pub drift: f64,
}

impl TailModel {
    /// Upper bound for the sum of `|term(k)|` over `q(k) > radius^2`.
    ///
    /// The shell `s <= sqrt(q) < s + 1` holds at most
    /// `(2 (s + 1) / sqrt(min_eigenvalue) + 1)^dim` points, and on it the
    /// term bound is largest at `s` once `s` exceeds the peak `drift / (2 decay)`.
    pub fn bound(&self, radius: f64) -> f64 {
        let peak = self.drift / (2.0 * self.decay);
        if radius < peak {
            return f64::INFINITY;
        }
        let inv_sqrt = 1.0 / self.min_eigenvalue.sqrt();
        let mut total = 0.0;
        for j in 0..100_000 {
            let s = radius + j as f64;
            let count = (2.0 * (s + 1.0) * inv_sqrt + 1.0).powi(self.dim as i32);
            let term = count * (-self.decay * s * s + self.drift * s).exp();
            total += term;
            if term < total * 1e-17 || term == 0.0 {
                break;
            }
        }
        total
    }

    /// Smallest radius on a 1/8 grid whose tail bound meets `tol`.
    pub fn fit_radius(&self, tol: f64) -> f64 {
        let peak = self.drift / (2.0 * self.decay);
        let mut r = (peak + 0.5).max(1.0);
        while self.bound(r) > tol {
            r += 0.125;
        }
        r
    }
}

/// Smallest eigenvalue of a real symmetric matrix.
pub fn min_eigenvalue(q: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(q.clone()).eigenvalues.min()
}

/// All integer vectors `k` with `k^t q k <= radius^2`, in a fixed order
/// (Fincke-Pohst enumeration on the Cholesky factor of `q`).
pub fn ellipsoid_points(q: &DMatrix<f64>, radius: f64) -> Result<Vec<Vec<i64>>> {
    let d = q.nrows();
    let chol =
        Cholesky::new(q.clone()).ok_or_else(|| Error::NotSiegel("quadratic form is not positive definite".into()))?;
    // q = U^t U with U upper triangular
    let u = chol.l().transpose();
    let budget = radius * radius * (1.0 + BOUNDARY_SLACK);
    let mut out = Vec::new();
    let mut k = vec![0i64; d];
    if d == 0 {
        return Ok(vec![vec![]]);
    }
    enumerate(&u, d - 1, budget, &mut k, &mut out);
    Ok(out)
}

fn enumerate(u: &DMatrix<f64>, i: usize, remaining: f64, k: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    let d = u.nrows();
    let uii = u[(i, i)];
    let center = -(i + 1..d).map(|j| u[(i, j)] * k[j] as f64).sum::<f64>() / uii;
    let half = remaining.max(0.0).sqrt() / uii;
    let lo = (center - half).ceil() as i64;
    let hi = (center + half).floor() as i64;
    for v in lo..=hi {
        let delta = uii * (v as f64 - center);
        let rest = remaining - delta * delta;
        if rest < 0.0 {
            continue;
        }
        k[i] = v;
        if i == 0 {
            out.push(k.clone());
        } else {
            enumerate(u, i - 1, rest, k, out);
        }
    }
    k[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_ellipsoid_counts() {
        let q = DMatrix::<f64>::identity(2, 2);
        // integer points with a^2 + b^2 <= 4: 13
        assert_eq!(ellipsoid_points(&q, 2.0).unwrap().len(), 13);
        let q = DMatrix::<f64>::identity(1, 1) * 4.0;
        assert_eq!(ellipsoid_points(&q, 3.0).unwrap(), vec![vec![-1], vec![0], vec![1]]);
    }

    #[test]
    fn enumeration_matches_brute_force_on_skewed_form() {
        let q = DMatrix::from_row_slice(3, 3, &[2.0, 0.9, 0.3, 0.9, 1.0, -0.2, 0.3, -0.2, 0.7]);
        let r = 3.1;
        let mut fast = ellipsoid_points(&q, r).unwrap();
        fast.sort();
        let mut brute = Vec::new();
        for a in -12i64..=12 {
            for b in -12i64..=12 {
                for c in -12i64..=12 {
                    let v = nalgebra::DVector::from_vec(vec![a as f64, b as f64, c as f64]);
                    if (v.transpose() * &q * &v)[0] <= r * r * (1.0 + BOUNDARY_SLACK) {
                        brute.push(vec![a, b, c]);
                    }
                }
            }
        }
        assert_eq!(fast, brute);
    }

    #[test]
    fn tail_bound_decreases_and_fits() {
        let tail = TailModel { dim: 1, min_eigenvalue: 1.0, decay: std::f64::consts::PI, drift: 0.0 };
        assert!(tail.bound(2.0) < tail.bound(1.0));
        let r = tail.fit_radius(1e-14);
        assert!(tail.bound(r) <= 1e-14);
        assert!(tail.bound(r - 0.125) > 1e-14);
        // the bound dominates the true tail sum 2 sum_{k > r} e^{-pi k^2}
        let true_tail: f64 = (3..50).map(|k| 2.0 * (-std::f64::consts::PI * (k * k) as f64).exp()).sum();
        assert!(tail.bound(2.5) >= true_tail);
    }

    #[test]
    fn explicit_radius_too_small_is_an_error() {
        let tail = TailModel { dim: 1, min_eigenvalue: 1.0, decay: std::f64::consts::PI, drift: 0.0 };
        let err = TruncationParams::fixed(0.5, 1e-12).resolve(&tail).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
        assert!(TruncationParams::fixed(12.0, 1e-12).resolve(&tail).is_ok());
    }
}
