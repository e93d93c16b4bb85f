//! The noncommutative torus over a fiber `T`: lattice generators `e(w)`, the
//! cocycle, twisted convolution, the action `eps(g)`, the quantum theta element
//! and the fixed-fiber crossed product with the stabilizer of `T`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{ellipsoid_points, min_eigenvalue, TailModel, TruncationParams};
use crate::siegel::SiegelPoint;
use crate::symplectic::{SymplecticMatrix, DEFAULT_STABILIZER_TOL};

/// Coefficients smaller than this are dropped after arithmetic.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// A point `(w1, w2)` of `D = Z^n x Z^n`, embedded as `T w1 + w2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub w1: Vec<i64>,
    pub w2: Vec<i64>,
}

impl LatticePoint {
    pub fn new(w1: Vec<i64>, w2: Vec<i64>) -> Self {
        assert_eq!(w1.len(), w2.len(), "w1 and w2 must have equal length");
        Self { w1, w2 }
    }

    pub fn zero(n: usize) -> Self {
        Self { w1: vec![0; n], w2: vec![0; n] }
    }

    pub fn dim(&self) -> usize {
        self.w1.len()
    }

    pub fn stacked(&self) -> Vec<i64> {
        self.w1.iter().chain(&self.w2).copied().collect()
    }

    pub fn from_stacked(v: &[i64]) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::Dimension("odd stacked length".into()));
        }
        let (a, b) = v.split_at(v.len() / 2);
        Ok(Self { w1: a.to_vec(), w2: b.to_vec() })
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            w1: self.w1.iter().zip(&other.w1).map(|(a, b)| a + b).collect(),
            w2: self.w2.iter().zip(&other.w2).map(|(a, b)| a + b).collect(),
        }
    }

    /// `w1.v2 - w2.v1`, the imaginary part of `H_T(w, v)` for every `T`.
    pub fn pairing(&self, other: &Self) -> i64 {
        let a: i64 = self.w1.iter().zip(&other.w2).map(|(x, y)| x * y).sum();
        let b: i64 = self.w2.iter().zip(&other.w1).map(|(x, y)| x * y).sum();
        a - b
    }

    /// Euclidean norm of `(w1, w2)`.
    pub fn norm(&self) -> f64 {
        (self.stacked().iter().map(|v| (v * v) as f64).sum::<f64>()).sqrt()
    }
}

/// `alpha(w, v) = exp(-pi i Im H_T(w, v))`. The exponent is an integer
/// multiple of `pi i`, so the value is exactly `+1` or `-1`.
pub fn cocycle(t: &SiegelPoint, w: &LatticePoint, v: &LatticePoint) -> Result<Complex64> {
    if w.dim() != t.dim() || v.dim() != t.dim() {
        return Err(Error::Dimension("lattice point does not match the fiber".into()));
    }
    Ok(cocycle_sign(w, v))
}

fn cocycle_sign(w: &LatticePoint, v: &LatticePoint) -> Complex64 {
    if w.pairing(v).rem_euclid(2) == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(-1.0, 0.0)
    }
}

/// A finitely supported element `sum_w a_w e(w)` over the fiber `T`.
#[derive(Clone)]
pub struct AlgebraElement {
    fiber: SiegelPoint,
    coeffs: BTreeMap<LatticePoint, Complex64>,
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.coeffs.iter()).finish()
    }
}

/// JSON form of one term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraTerm {
    pub w1: Vec<i64>,
    pub w2: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

impl AlgebraElement {
    pub fn zero(fiber: SiegelPoint) -> Self {
        Self { fiber, coeffs: BTreeMap::new() }
    }

    /// The generator `e(w)`.
    pub fn basis(fiber: SiegelPoint, w: LatticePoint) -> Self {
        Self::from_terms(fiber, [(w, Complex64::new(1.0, 0.0))])
    }

    /// The unit `e(0)`.
    pub fn unit(fiber: SiegelPoint) -> Self {
        let n = fiber.dim();
        Self::basis(fiber, LatticePoint::zero(n))
    }

    pub fn from_terms(fiber: SiegelPoint, terms: impl IntoIterator<Item = (LatticePoint, Complex64)>) -> Self {
        let mut a = Self::zero(fiber);
        for (w, c) in terms {
            assert_eq!(w.dim(), a.fiber.dim(), "lattice point does not match the fiber");
            *a.coeffs.entry(w).or_default() += c;
        }
        a.prune();
        a
    }

    pub fn fiber(&self) -> &SiegelPoint {
        &self.fiber
    }

    pub fn coeff(&self, w: &LatticePoint) -> Complex64 {
        self.coeffs.get(w).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LatticePoint, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.norm() >= PRUNE_THRESHOLD);
    }

    fn check_fiber(&self, other: &Self) -> Result<()> {
        if self.fiber.same_fiber(&other.fiber) {
            Ok(())
        } else {
            Err(Error::FiberMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_fiber(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            *out.coeffs.entry(w.clone()).or_default() += c;
        }
        out.prune();
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs.values_mut().for_each(|c| *c *= s);
        out.prune();
        out
    }

    /// Largest coefficient difference over the union of supports.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .map(|w| (self.coeff(w) - other.coeff(w)).norm())
            .fold(0.0, f64::max)
    }

    /// Twisted convolution: the coefficient at `u` is
    /// `sum_{w + v = u} a_w b_v alpha(w, v)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_fiber(other)?;
        let mut out = Self::zero(self.fiber.clone());
        for (w, a) in &self.coeffs {
            for (v, b) in &other.coeffs {
                *out.coeffs.entry(w.add(v)).or_default() += a * b * cocycle_sign(w, v);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Moves every label `w` to `g^{-1}.w` and places the result over `fiber`.
    fn relabel_onto(&self, g: &SymplecticMatrix, fiber: SiegelPoint) -> Result<Self> {
        let g_inv = g.inverse();
        let mut out = Self::zero(fiber);
        for (w, c) in &self.coeffs {
            *out.coeffs.entry(g_inv.act_lattice(w)?).or_default() += c;
        }
        Ok(out)
    }

    /// The fixed-fiber action `eps_T(g)(a) = sum_w a_w e(g^{-1}.w)` for `g`
    /// in the stabilizer of `T`.
    pub fn eps_action(&self, g: &SymplecticMatrix) -> Result<Self> {
        let moved = g.act_siegel(&self.fiber)?;
        let dist = moved.distance(&self.fiber);
        if dist >= DEFAULT_STABILIZER_TOL {
            return Err(Error::NotInStabilizer(dist));
        }
        self.relabel_onto(g, self.fiber.clone())
    }

    pub fn to_json_terms(&self) -> Vec<AlgebraTerm> {
        self.coeffs
            .iter()
            .map(|(w, c)| AlgebraTerm { w1: w.w1.clone(), w2: w.w2.clone(), re: c.re, im: c.im })
            .collect()
    }

    pub fn from_json_terms(fiber: SiegelPoint, terms: &[AlgebraTerm]) -> Result<Self> {
        let n = fiber.dim();
        if terms.iter().any(|t| t.w1.len() != n || t.w2.len() != n) {
            return Err(Error::Dimension("term does not match the fiber".into()));
        }
        Ok(Self::from_terms(
            fiber,
            terms.iter().map(|t| (LatticePoint::new(t.w1.clone(), t.w2.clone()), Complex64::new(t.re, t.im))),
        ))
    }
}

/// The truncation ball `H_T(w, w) <= radius^2` with its tail bound for the
/// Gaussian weight `exp(-(pi/2) H_T(w, w))`.
pub fn quantum_theta_support(t: &SiegelPoint, trunc: &TruncationParams) -> Result<(Vec<LatticePoint>, f64, f64)> {
    let gram = t.real_gram();
    let tail = TailModel { dim: 2 * t.dim(), min_eigenvalue: min_eigenvalue(gram), decay: PI / 2.0, drift: 0.0 };
    let (radius, bound) = trunc.resolve(&tail)?;
    let points =
        ellipsoid_points(gram, radius)?.iter().map(|v| LatticePoint::from_stacked(v)).collect::<Result<Vec<_>>>()?;
    Ok((points, radius, bound))
}

/// `H_T(w, w)` from the real Gram matrix.
pub fn lattice_norm_sq(t: &SiegelPoint, w: &LatticePoint) -> f64 {
    let k = DVector::from_iterator(2 * t.dim(), w.stacked().into_iter().map(|v| v as f64));
    (k.transpose() * t.real_gram() * &k)[0]
}

/// The model II quantum theta element `sum_w exp(-(pi/2) H_T(w, w)) e(w)`.
pub fn quantum_theta(t: &SiegelPoint, trunc: &TruncationParams) -> Result<AlgebraElement> {
    let (points, _, _) = quantum_theta_support(t, trunc)?;
    let mut a = AlgebraElement::zero(t.clone());
    for w in points {
        let c = (-PI / 2.0 * lattice_norm_sq(t, &w)).exp();
        a.coeffs.insert(w, Complex64::new(c, 0.0));
    }
    Ok(a)
}

type SectionFn = dyn Fn(&SiegelPoint) -> Result<AlgebraElement> + Send + Sync;

/// A section `T -> a(T)` of the algebra bundle over the Siegel space.
#[derive(Clone)]
pub struct AlgebraSection {
    eval: Arc<SectionFn>,
}

impl AlgebraSection {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(&SiegelPoint) -> Result<AlgebraElement> + Send + Sync + 'static,
    {
        Self { eval: Arc::new(f) }
    }

    /// The same coefficients over every fiber.
    pub fn constant(terms: Vec<(LatticePoint, Complex64)>) -> Self {
        Self::new(move |t| Ok(AlgebraElement::from_terms(t.clone(), terms.iter().cloned())))
    }

    pub fn quantum_theta(trunc: TruncationParams) -> Self {
        Self::new(move |t| quantum_theta(t, &trunc))
    }

    pub fn at(&self, t: &SiegelPoint) -> Result<AlgebraElement> {
        (self.eval)(t)
    }

    /// `(eps(g) a)(T) = sum_w a_{g.T, w} e(g^{-1}.w)`, for any `g`.
    pub fn eps(&self, g: &SymplecticMatrix) -> Self {
        let inner = self.clone();
        let g = g.clone();
        Self::new(move |t| inner.at(&g.act_siegel(t)?)?.relabel_onto(&g, t.clone()))
    }
}

/// A finite sum `sum_g b_g g` with `g` in the stabilizer of the shared fiber.
#[derive(Clone, Debug)]
pub struct CrossedElement {
    fiber: SiegelPoint,
    terms: BTreeMap<SymplecticMatrix, AlgebraElement>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossedTerm {
    pub g: SymplecticMatrix,
    pub element: Vec<AlgebraTerm>,
}

impl CrossedElement {
    pub fn zero(fiber: SiegelPoint) -> Self {
        Self { fiber, terms: BTreeMap::new() }
    }

    /// `e(0) I`.
    pub fn unit(fiber: SiegelPoint) -> Self {
        let n = fiber.dim();
        let e0 = AlgebraElement::unit(fiber.clone());
        Self { fiber, terms: BTreeMap::from([(SymplecticMatrix::identity(n), e0)]) }
    }

    /// `a g` as a single term.
    pub fn term(g: SymplecticMatrix, a: AlgebraElement) -> Result<Self> {
        let mut out = Self::zero(a.fiber().clone());
        out.add_term(g, a)?;
        Ok(out)
    }

    pub fn fiber(&self) -> &SiegelPoint {
        &self.fiber
    }

    pub fn add_term(&mut self, g: SymplecticMatrix, a: AlgebraElement) -> Result<()> {
        if !a.fiber().same_fiber(&self.fiber) {
            return Err(Error::FiberMismatch);
        }
        let dist = g.act_siegel(&self.fiber)?.distance(&self.fiber);
        if dist >= DEFAULT_STABILIZER_TOL {
            return Err(Error::NotInStabilizer(dist));
        }
        let slot = match self.terms.remove(&g) {
            Some(prev) => prev.add(&a)?,
            None => a,
        };
        if !slot.is_empty() {
            self.terms.insert(g, slot);
        }
        Ok(())
    }

    pub fn coeff(&self, g: &SymplecticMatrix) -> Option<&AlgebraElement> {
        self.terms.get(g)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SymplecticMatrix, &AlgebraElement)> {
        self.terms.iter()
    }

    /// `(b * c)_h = sum_g b_g eps(g)(c_{g^{-1} h})`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if !self.fiber.same_fiber(&other.fiber) {
            return Err(Error::FiberMismatch);
        }
        let mut out = Self::zero(self.fiber.clone());
        for (g, bg) in &self.terms {
            for (g2, c2) in &other.terms {
                let product = bg.mul(&c2.eps_action(g)?)?;
                out.add_term(g.mul(g2)?, product)?;
            }
        }
        Ok(out)
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        let zero = AlgebraElement::zero(self.fiber.clone());
        self.terms
            .keys()
            .chain(other.terms.keys())
            .map(|g| {
                let a = self.terms.get(g).unwrap_or(&zero);
                let b = other.terms.get(g).unwrap_or(&zero);
                a.max_diff(b)
            })
            .fold(0.0, f64::max)
    }

    pub fn to_json_terms(&self) -> Vec<CrossedTerm> {
        self.terms.iter().map(|(g, a)| CrossedTerm { g: g.clone(), element: a.to_json_terms() }).collect()
    }
}
