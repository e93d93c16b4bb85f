//! Points of the Siegel upper half space and the Hermitian form `H_T`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::LatticePoint;
use crate::error::{Error, Result};
use crate::symplectic::SymplecticMatrix;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const SYMMETRY_TOL: f64 = 1e-12;

/// A symmetric complex `n x n` matrix with positive definite imaginary part.
///
/// Construction caches the Cholesky factor of `Im T` and the real Gram matrix
/// of `H_T(x, x)` in the real coordinates `(x1, x2)`.
#[derive(Clone, Debug)]
pub struct SiegelPoint {
    t: CMatrix,
    im: DMatrix<f64>,
    im_chol: Cholesky<f64, Dyn>,
    gram: DMatrix<f64>,
}

impl SiegelPoint {
    pub fn new(t: CMatrix) -> Result<Self> {
        if !t.is_square() || t.nrows() == 0 {
            return Err(Error::Dimension(format!("T is {}x{}", t.nrows(), t.ncols())));
        }
        if t.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NotSiegel("non-finite entry".into()));
        }
        let scale = t.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let asym = (&t - t.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSiegel(format!("T is not symmetric (|T - T^t| = {asym:e})")));
        }
        let t = (&t + t.transpose()).map(|z| z * 0.5);
        let im = t.map(|z| z.im);
        let im_chol =
            Cholesky::new(im.clone()).ok_or_else(|| Error::NotSiegel("Im T is not positive definite".into()))?;
        let gram = real_gram(&t.map(|z| z.re), &im_chol.inverse());
        Ok(Self { t, im, im_chol, gram })
    }

    pub fn from_parts(re: DMatrix<f64>, im: DMatrix<f64>) -> Result<Self> {
        if re.shape() != im.shape() {
            return Err(Error::Dimension("real and imaginary parts differ in shape".into()));
        }
        Self::new(re.zip_map(&im, Complex64::new))
    }

    /// The scalar point `tau` in the upper half plane (n = 1).
    pub fn scalar(tau: Complex64) -> Result<Self> {
        Self::new(CMatrix::from_element(1, 1, tau))
    }

    /// `i` times the identity.
    pub fn i_identity(n: usize) -> Self {
        Self::new(CMatrix::identity(n, n) * Complex64::i()).expect("iI lies in the Siegel space")
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.t
    }

    pub fn im(&self) -> &DMatrix<f64> {
        &self.im
    }

    /// Real symmetric `2n x 2n` matrix `G` with `H_T(x, x) = x^t G x` for `x = (x1, x2)`.
    pub fn real_gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Smallest eigenvalue of `Im T`.
    pub fn im_min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.im.clone()).eigenvalues.min()
    }

    /// `(Im T)^{-1} v` for a complex vector.
    pub fn im_solve(&self, v: &CVector) -> CVector {
        let re = self.im_chol.solve(&v.map(|z| z.re));
        let im = self.im_chol.solve(&v.map(|z| z.im));
        re.zip_map(&im, Complex64::new)
    }

    /// Largest entrywise distance to another point.
    pub fn distance(&self, other: &SiegelPoint) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.t - &other.t).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Fibers are identified when their matrices agree to `1e-12`.
    pub fn same_fiber(&self, other: &SiegelPoint) -> bool {
        self.distance(other) <= 1e-12 * self.t.iter().map(|z| z.norm()).fold(1.0, f64::max)
    }
}

fn real_gram(re: &DMatrix<f64>, im_inv: &DMatrix<f64>) -> DMatrix<f64> {
    // H_T(x, x) = (X x1 + x2)^t Y^{-1} (X x1 + x2) + x1^t Y x1
    let n = re.nrows();
    let y = im_inv.clone().try_inverse().expect("inverse of an SPD inverse");
    let xyi = re * im_inv;
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    g.view_mut((0, 0), (n, n)).copy_from(&(&y + &xyi * re));
    g.view_mut((0, n), (n, n)).copy_from(&xyi);
    g.view_mut((n, 0), (n, n)).copy_from(&xyi.transpose());
    g.view_mut((n, n), (n, n)).copy_from(im_inv);
    (&g + g.transpose()) * 0.5
}

/// Free real coordinates `(x1, x2)`, embedded as `T x1 + x2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealCoordinate {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
}

impl RealCoordinate {
    pub fn new(x1: Vec<f64>, x2: Vec<f64>) -> Result<Self> {
        if x1.len() != x2.len() {
            return Err(Error::Dimension("x1 and x2 differ in length".into()));
        }
        Ok(Self { x1, x2 })
    }

    pub fn zero(n: usize) -> Self {
        Self { x1: vec![0.0; n], x2: vec![0.0; n] }
    }

    pub fn dim(&self) -> usize {
        self.x1.len()
    }

    /// `(x1; x2)` stacked into one vector of length `2n`.
    pub fn stacked(&self) -> Vec<f64> {
        self.x1.iter().chain(&self.x2).copied().collect()
    }

    pub fn from_stacked(v: &[f64]) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::Dimension("odd stacked length".into()));
        }
        let (a, b) = v.split_at(v.len() / 2);
        Ok(Self { x1: a.to_vec(), x2: b.to_vec() })
    }

    pub fn add(&self, other: &RealCoordinate) -> RealCoordinate {
        RealCoordinate {
            x1: self.x1.iter().zip(&other.x1).map(|(a, b)| a + b).collect(),
            x2: self.x2.iter().zip(&other.x2).map(|(a, b)| a + b).collect(),
        }
    }
}

impl From<&LatticePoint> for RealCoordinate {
    fn from(w: &LatticePoint) -> Self {
        Self { x1: w.w1.iter().map(|&v| v as f64).collect(), x2: w.w2.iter().map(|&v| v as f64).collect() }
    }
}

pub fn embed(x: &RealCoordinate, t: &SiegelPoint) -> Result<CVector> {
    let n = t.dim();
    if x.x1.len() != n || x.x2.len() != n {
        return Err(Error::Dimension(format!("coordinate of dimension {} on a fiber of dimension {n}", x.dim())));
    }
    let x1 = CVector::from_iterator(n, x.x1.iter().map(|&v| Complex64::new(v, 0.0)));
    let x2 = CVector::from_iterator(n, x.x2.iter().map(|&v| Complex64::new(v, 0.0)));
    Ok(t.matrix() * x1 + x2)
}

/// `H_T(s, z) = s^t (Im T)^{-1} conj(z)`.
pub fn hermitian_form(t: &SiegelPoint, s: &CVector, z: &CVector) -> Complex64 {
    let w = t.im_solve(&z.map(|c| c.conj()));
    s.iter().zip(w.iter()).map(|(a, b)| a * b).sum()
}

/// `H_T` on two real coordinates, both embedded at `t`.
pub fn hermitian_form_real(t: &SiegelPoint, x: &RealCoordinate, y: &RealCoordinate) -> Result<Complex64> {
    Ok(hermitian_form(t, &embed(x, t)?, &embed(y, t)?))
}

/// `Im H_T(k, x)`, which equals `k1.x2 - k2.x1` for every `T`.
pub fn symplectic_pairing(t: &SiegelPoint, k: &LatticePoint, x: &RealCoordinate) -> Result<f64> {
    let value = hermitian_form_real(t, &RealCoordinate::from(k), x)?.im;
    let exact: f64 = k.w1.iter().zip(&x.x2).map(|(&a, b)| a as f64 * b).sum::<f64>()
        - k.w2.iter().zip(&x.x1).map(|(&a, b)| a as f64 * b).sum::<f64>();
    debug_assert!((value - exact).abs() <= 1e-8 * (1.0 + exact.abs()), "Im H_T = {value} but k1.x2 - k2.x1 = {exact}");
    Ok(value)
}

/// `| Im(g.T) - (C conj(T) + D)^{-t} Im(T) (C T + D)^{-1} |` (max entry).
pub fn im_transform_identity(g: &SymplecticMatrix, t: &SiegelPoint) -> Result<f64> {
    let gt = g.act_siegel(t)?;
    let c = g.c().to_complex();
    let d = g.d().to_complex();
    let m = &c * t.matrix() + &d;
    let m_bar = &c * t.matrix().map(|z| z.conj()) + &d;
    let y = t.im().map(|v| Complex64::new(v, 0.0));
    // W = Y M^{-1}  <=>  M^t W^t = Y
    let wt = m.transpose().lu().solve(&y).ok_or(Error::Singular("CT + D"))?;
    let rhs = m_bar.transpose().lu().solve(&wt.transpose()).ok_or(Error::Singular("C conj(T) + D"))?;
    let lhs = gt.im().map(|v| Complex64::new(v, 0.0));
    Ok((lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// The `g = J` specialisation: `| Im(-T^{-1}) - conj(T)^{-1} Im(T) T^{-1} |`,
/// computed directly from LU solves with `T`, without the group action.
pub fn inversion_im_residual(t: &SiegelPoint) -> Result<f64> {
    let n = t.dim();
    let lu = t.matrix().clone().lu();
    let t_inv = lu.solve(&CMatrix::identity(n, n)).ok_or(Error::Singular("T"))?;
    let lhs = t_inv.map(|z| -z.im);
    let y = t.im().map(|v| Complex64::new(v, 0.0));
    let right = &y * &t_inv;
    let rhs = t.matrix().map(|z| z.conj()).lu().solve(&right).ok_or(Error::Singular("conj(T)"))?;
    Ok(lhs.iter().zip(rhs.iter()).map(|(a, b)| (Complex64::new(*a, 0.0) - b).norm()).fold(0.0, f64::max))
}

/// `| H_T(x, y) - H_{g.T}(g.x, g.y) |`.
pub fn lemma1_residual(g: &SymplecticMatrix, t: &SiegelPoint, x: &RealCoordinate, y: &RealCoordinate) -> Result<f64> {
    let before = hermitian_form_real(t, x, y)?;
    let gt = g.act_siegel(t)?;
    let after = hermitian_form_real(&gt, &g.act_real(x)?, &g.act_real(y)?)?;
    Ok((before - after).norm())
}

// JSON: nested arrays of [re, im] pairs.
impl Serialize for SiegelPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| [self.t[(i, j)].re, self.t[(i, j)].im]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SiegelPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        siegel_from_pairs(&rows).map_err(serde::de::Error::custom)
    }
}

pub fn siegel_from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<SiegelPoint> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("T must be square".into()));
    }
    SiegelPoint::new(CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}
