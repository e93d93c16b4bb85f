//! The classical theta function, its quasi-periodicity and modular law, the
//! group-averaged variant and the full-lattice invariant theta function.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{ellipsoid_points, min_eigenvalue, TailModel, TruncationParams};
use crate::par;
use crate::siegel::{CVector, RealCoordinate, SiegelPoint};
use crate::symplectic::{is_closed, SymplecticMatrix};

/// `|theta(z, T)|` below which a modular sample point is rejected.
pub const NEAR_ZERO: f64 = 1e-6;

/// A truncated lattice sum together with its truncation data.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LatticeSum {
    pub value: Complex64,
    pub radius: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

fn i_pi() -> Complex64 {
    Complex64::new(0.0, PI)
}

/// Evaluates `sum_k exp(pi i (k^t T k + 2 k^t z))` over the ellipsoid
/// `k^t (Im T) k <= radius^2`.
pub fn theta_sum(z: &CVector, t: &SiegelPoint, trunc: &TruncationParams) -> Result<LatticeSum> {
    let n = t.dim();
    if z.len() != n {
        return Err(Error::Dimension(format!("z has length {}, T is {n}x{n}", z.len())));
    }
    let lambda = t.im_min_eigenvalue();
    let im_norm = z.iter().map(|c| c.im * c.im).sum::<f64>().sqrt();
    let tail = TailModel { dim: n, min_eigenvalue: lambda, decay: PI, drift: 2.0 * PI * im_norm / lambda.sqrt() };
    let (radius, tail_bound) = trunc.resolve(&tail)?;
    let points = ellipsoid_points(t.im(), radius)?;
    let tm = t.matrix();
    let value = par::sum_indexed(points.len(), |idx| {
        let k = &points[idx];
        let mut quad = Complex64::new(0.0, 0.0);
        let mut lin = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let ki = k[i] as f64;
            lin += z[i] * ki;
            for j in 0..n {
                quad += tm[(i, j)] * (ki * k[j] as f64);
            }
        }
        (i_pi() * (quad + lin * 2.0)).exp()
    });
    Ok(LatticeSum { value, radius, tail_bound, terms: points.len() })
}

pub fn theta(z: &CVector, t: &SiegelPoint, trunc: &TruncationParams) -> Result<Complex64> {
    Ok(theta_sum(z, t, trunc)?.value)
}

/// A period `lambda = T m` of the second lattice.
#[derive(Clone, Debug)]
pub struct QuasiPeriod {
    pub m: Vec<i64>,
    pub lambda: CVector,
}

impl QuasiPeriod {
    pub fn new(m: Vec<i64>, t: &SiegelPoint) -> Result<Self> {
        if m.len() != t.dim() {
            return Err(Error::Dimension("period length".into()));
        }
        let mv = CVector::from_iterator(m.len(), m.iter().map(|&v| Complex64::new(v as f64, 0.0)));
        Ok(Self { lambda: t.matrix() * mv, m })
    }

    /// The multiplier `exp(-pi i m^t T m) exp(-2 pi i m^t z)`.
    pub fn factor(&self, z: &CVector) -> Complex64 {
        let mz: Complex64 = self.m.iter().zip(z.iter()).map(|(&a, b)| b * a as f64).sum();
        let mtm: Complex64 = self.m.iter().zip(self.lambda.iter()).map(|(&a, b)| b * a as f64).sum();
        (-i_pi() * mtm - i_pi() * 2.0 * mz).exp()
    }
}

#[derive(Clone, Debug)]
pub enum Shift {
    /// `lambda'` in `Z^n`: theta is periodic.
    Integer(Vec<i64>),
    /// `lambda = T m`: theta picks up the quasi-periodicity factor.
    Period(QuasiPeriod),
}

/// `|theta(z + shift) - factor * theta(z)| / max(1, |theta(z + shift)|)`.
pub fn quasi_period_check(z: &CVector, t: &SiegelPoint, shift: &Shift, trunc: &TruncationParams) -> Result<f64> {
    let base = theta(z, t, trunc)?;
    let (shifted, expected) = match shift {
        Shift::Integer(l) => {
            if l.len() != t.dim() {
                return Err(Error::Dimension("shift length".into()));
            }
            let zs = z + CVector::from_iterator(l.len(), l.iter().map(|&v| Complex64::new(v as f64, 0.0)));
            (theta(&zs, t, trunc)?, base)
        }
        Shift::Period(p) => (theta(&(z + &p.lambda), t, trunc)?, p.factor(z) * base),
    };
    Ok((shifted - expected).norm() / shifted.norm().max(1.0))
}

/// `theta(g.z, g.T) / [det(CT+D)^{1/2} exp(pi i z^t (CT+D)^{-1} C z) theta(z, T)]`
/// with the principal square root. On the theta group this is an eighth root
/// of unity independent of `z`.
pub fn modular_ratio(
    g: &SymplecticMatrix,
    z: &CVector,
    t: &SiegelPoint,
    trunc: &TruncationParams,
) -> Result<Complex64> {
    let base = theta_sum(z, t, trunc)?;
    if base.value.norm() < NEAR_ZERO {
        return Err(Error::NearZero(base.value.norm()));
    }
    let gt = g.act_siegel(t)?;
    let gz = g.act_coord(z, t)?;
    let image = theta(&gz, &gt, trunc)?;
    let c = g.c().to_complex();
    let m = &c * t.matrix() + g.d().to_complex();
    let det_sqrt = m.clone().lu().determinant().sqrt();
    let w = m.lu().solve(&(&c * z)).ok_or(Error::Singular("CT + D"))?;
    let quad: Complex64 = z.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
    Ok(image / (det_sqrt * (i_pi() * quad).exp() * base.value))
}

/// The terms `theta(g.z, g.T)` of the group average, in group order.
pub fn averaged_theta_terms(
    z: &CVector,
    t: &SiegelPoint,
    group: &[SymplecticMatrix],
    trunc: &TruncationParams,
) -> Result<Vec<Complex64>> {
    if group.is_empty() || !is_closed(group) {
        return Err(Error::NotClosed);
    }
    par::map_slice(group, |g| theta(&g.act_coord(z, t)?, &g.act_siegel(t)?, trunc)).into_iter().collect()
}

/// `sum_{g in G} theta(g.z, g.T)` over a finite group `G`.
pub fn averaged_theta(
    z: &CVector,
    t: &SiegelPoint,
    group: &[SymplecticMatrix],
    trunc: &TruncationParams,
) -> Result<Complex64> {
    Ok(par::pairwise_sum(&averaged_theta_terms(z, t, group, trunc)?))
}

/// `sum_{k in Z^{2n}} exp(-pi H_T(k, k) + 2 pi i (k1.x2 - k2.x1))`.
pub fn invariant_theta_sum(x: &RealCoordinate, t: &SiegelPoint, trunc: &TruncationParams) -> Result<LatticeSum> {
    let n = t.dim();
    if x.dim() != n {
        return Err(Error::Dimension("coordinate length".into()));
    }
    let gram = t.real_gram();
    let tail = TailModel { dim: 2 * n, min_eigenvalue: min_eigenvalue(gram), decay: PI, drift: 0.0 };
    let (radius, tail_bound) = trunc.resolve(&tail)?;
    let points = ellipsoid_points(gram, radius)?;
    let value = par::sum_indexed(points.len(), |idx| {
        let k = DVector::from_iterator(2 * n, points[idx].iter().map(|&v| v as f64));
        let h = (k.transpose() * gram * &k)[0];
        let pairing: f64 = (0..n).map(|i| k[i] * x.x2[i] - k[n + i] * x.x1[i]).sum();
        Complex64::from_polar((-PI * h).exp(), 2.0 * PI * pairing)
    });
    Ok(LatticeSum { value, radius, tail_bound, terms: points.len() })
}

pub fn invariant_theta(x: &RealCoordinate, t: &SiegelPoint, trunc: &TruncationParams) -> Result<Complex64> {
    Ok(invariant_theta_sum(x, t, trunc)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::stabilizer_search;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_z(z: Complex64) -> CVector {
        CVector::from_element(1, z)
    }

    /// Plain double loop over a square box, independent of the ellipsoid code.
    fn brute_theta_1d(z: Complex64, tau: Complex64, cutoff: i64) -> Complex64 {
        (-cutoff..=cutoff).map(|k| (c(0.0, PI) * (tau * (k * k) as f64 + z * (2 * k) as f64)).exp()).sum()
    }

    #[test]
    fn theta_at_i_matches_brute_force() {
        let t = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let v = theta(&scalar_z(c(0.0, 0.0)), &t, &TruncationParams::fixed(12.0, 1e-14)).unwrap();
        let oracle = brute_theta_1d(c(0.0, 0.0), c(0.0, 1.0), 30);
        assert!((v - oracle).norm() < 1e-12);
        assert!((v.re - 1.086_434_811_213_308).abs() < 1e-12);
    }

    #[test]
    fn theta_vanishes_at_half_period() {
        let t = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let v = theta(&scalar_z(c(0.5, 0.5)), &t, &TruncationParams::default()).unwrap();
        assert!(v.norm() < 1e-10);
    }

    #[test]
    fn theta_at_ten_i_is_two_term_dominated() {
        let t = SiegelPoint::scalar(c(0.0, 10.0)).unwrap();
        let v = theta(&scalar_z(c(0.0, 0.0)), &t, &TruncationParams::default()).unwrap();
        let approx = 1.0 + 2.0 * (-10.0 * PI).exp();
        assert!((v.re - approx).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn quasi_periodicity_at_i() {
        let t = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let z = scalar_z(c(0.3, 0.0));
        let trunc = TruncationParams::default();
        assert!(quasi_period_check(&z, &t, &Shift::Integer(vec![1]), &trunc).unwrap() < 1e-10);
        let p = QuasiPeriod::new(vec![1], &t).unwrap();
        let expected = (c(PI, -2.0 * PI * 0.3)).exp();
        assert!((p.factor(&z) - expected).norm() < 1e-12);
        assert!(quasi_period_check(&z, &t, &Shift::Period(p), &trunc).unwrap() < 1e-10);
        let zero = QuasiPeriod::new(vec![0], &t).unwrap();
        assert_eq!(zero.factor(&z), c(1.0, 0.0));
        assert!(quasi_period_check(&z, &t, &Shift::Period(zero), &trunc).unwrap() < 1e-15);
    }

    #[test]
    fn modular_ratio_examples() {
        let trunc = TruncationParams::default();
        let t = SiegelPoint::scalar(c(0.2, 0.9)).unwrap();
        let z = scalar_z(c(0.3, 0.1));
        let xi = modular_ratio(&SymplecticMatrix::identity(1), &z, &t, &trunc).unwrap();
        assert!((xi - 1.0).norm() < 1e-12);
        let shear2 = SymplecticMatrix::from_rows(&[vec![1, 2], vec![0, 1]]).unwrap();
        let xi = modular_ratio(&shear2, &z, &t, &trunc).unwrap();
        assert!((xi - 1.0).norm() < 1e-12);

        let i = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let j = SymplecticMatrix::flip(1);
        let xis: Vec<_> =
            [0.3, 0.1, 0.7].iter().map(|&x| modular_ratio(&j, &scalar_z(c(x, 0.0)), &i, &trunc).unwrap()).collect();
        for xi in &xis {
            assert!((xi.powi(8) - 1.0).norm() < 1e-8);
            assert!((xi - xis[0]).norm() < 1e-10);
        }
        // (-i tau)^{1/2} = e^{-i pi/4} tau^{1/2}
        assert!((xis[0] - Complex64::from_polar(1.0, -PI / 4.0)).norm() < 1e-10);
    }

    #[test]
    fn odd_shear_is_outside_the_modular_law() {
        // theta(z, tau + 1) = theta(z + 1/2, tau), so the ratio depends on z.
        let trunc = TruncationParams::default();
        let t = SiegelPoint::scalar(c(0.2, 0.9)).unwrap();
        let shear1 = SymplecticMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        let a = modular_ratio(&shear1, &scalar_z(c(0.1, 0.0)), &t, &trunc).unwrap();
        let b = modular_ratio(&shear1, &scalar_z(c(0.35, 0.05)), &t, &trunc).unwrap();
        assert!((a - b).norm() > 1e-2);
    }

    #[test]
    fn near_zero_theta_is_rejected() {
        let t = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let err = modular_ratio(&SymplecticMatrix::flip(1), &scalar_z(c(0.5, 0.5)), &t, &TruncationParams::default());
        assert!(matches!(err, Err(Error::NearZero(_))));
    }

    #[test]
    fn averaged_theta_examples() {
        let trunc = TruncationParams::default();
        let t = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let z = scalar_z(c(0.23, 0.11));
        let single = averaged_theta(&z, &t, &[SymplecticMatrix::identity(1)], &trunc).unwrap();
        assert_eq!(single, theta(&z, &t, &trunc).unwrap());

        let group = stabilizer_search(&t, 4, 1e-10).unwrap();
        let j = SymplecticMatrix::flip(1);
        let jz = j.act_coord(&z, &t).unwrap();
        let lhs = averaged_theta(&jz, &t, &group, &trunc).unwrap();
        let rhs = averaged_theta(&z, &t, &group, &trunc).unwrap();
        assert!((lhs - rhs).norm() < 1e-8);

        let shifted = averaged_theta(&(z.clone() + scalar_z(c(1.0, 0.0))), &t, &group, &trunc).unwrap();
        assert!((shifted - rhs).norm() > 0.01);
    }

    #[test]
    fn non_closed_group_is_rejected() {
        let t = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let err = averaged_theta(
            &scalar_z(c(0.1, 0.0)),
            &t,
            &[SymplecticMatrix::identity(1), SymplecticMatrix::flip(1)],
            &TruncationParams::default(),
        );
        assert_eq!(err, Err(Error::NotClosed));
    }

    #[test]
    fn invariant_theta_examples() {
        let trunc = TruncationParams::default();
        let t = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let v = invariant_theta(&RealCoordinate::zero(1), &t, &trunc).unwrap();
        let one_d = brute_theta_1d(c(0.0, 0.0), c(0.0, 1.0), 30).re;
        assert!((v.re - one_d * one_d).abs() < 1e-12);

        let x = RealCoordinate::new(vec![0.2], vec![0.5]).unwrap();
        let base = invariant_theta(&x, &t, &trunc).unwrap();
        let shifted = invariant_theta(&RealCoordinate::new(vec![0.2], vec![1.5]).unwrap(), &t, &trunc).unwrap();
        assert!((base - shifted).norm() < 1e-10);
        let j = SymplecticMatrix::flip(1);
        let moved = invariant_theta(&j.act_real(&x).unwrap(), &j.act_siegel(&t).unwrap(), &trunc).unwrap();
        assert!((base - moved).norm() < 1e-8);
    }

    #[test]
    fn doubling_radius_is_within_tail_tolerance() {
        let t = SiegelPoint::scalar(c(0.4, 0.7)).unwrap();
        let z = scalar_z(c(0.3, 0.2));
        let trunc = TruncationParams::auto(1e-12);
        let tail = TailModel { dim: 1, min_eigenvalue: 0.7, decay: PI, drift: 2.0 * PI * 0.2 / 0.7f64.sqrt() };
        let a = theta(&z, &t, &trunc).unwrap();
        let b = theta(&z, &t, &trunc.doubled(&tail)).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
}
