//! The model II Hilbert module: holomorphic test functions on the fibers,
//! the Gaussian-weighted scalar product, the operators `pi_w` and `u(g)`, the
//! algebra-valued inner product and the covariance checks tying them together.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{cocycle, quantum_theta_support, AlgebraElement, AlgebraSection, LatticePoint};
use crate::error::{Error, Result};
use crate::lattice::TruncationParams;
use crate::par;
use crate::siegel::{embed, CVector, RealCoordinate, SiegelPoint};
use crate::symplectic::SymplecticMatrix;

/// Default Gauss-Hermite points per axis.
pub fn default_order(n: usize) -> usize {
    if n <= 1 {
        40
    } else {
        20
    }
}

/// Coefficients of the algebra-valued inner product below this are flagged.
pub const RESOLUTION_FLOOR: f64 = 1e-12;

/// A closed-form function of `(x, T)`.
#[derive(Clone)]
pub enum TestFunction {
    One,
    /// `x^alpha` in the embedded coordinate `T x1 + x2`.
    Monomial(Vec<u32>),
    /// `exp(pi H_T(x, c))`.
    Coherent(CVector),
    /// `(pi_w f)(x, T) = exp(-pi H_T(x, w) - (pi/2) H_T(w, w)) f(x + w, T)`.
    Pi {
        w: LatticePoint,
        inner: Arc<TestFunction>,
    },
    /// `(u(g) f)(x, T) = f(g.x, g.T)`.
    U {
        g: SymplecticMatrix,
        inner: Arc<TestFunction>,
    },
    /// `(pi(a) f)(x, T) = sum_w a(T)_w (pi_w f)(x, T)`.
    Represent {
        a: AlgebraSection,
        inner: Arc<TestFunction>,
    },
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::One => write!(f, "1"),
            Self::Monomial(a) => write!(f, "x^{a:?}"),
            Self::Coherent(c) => write!(f, "coherent({:?})", c.as_slice()),
            Self::Pi { w, inner } => write!(f, "pi[{:?},{:?}]({inner:?})", w.w1, w.w2),
            Self::U { g, inner } => write!(f, "u[{g:?}]({inner:?})"),
            Self::Represent { inner, .. } => write!(f, "pi(a)({inner:?})"),
        }
    }
}

impl TestFunction {
    pub fn coherent(c: Vec<Complex64>) -> Self {
        Self::Coherent(CVector::from_vec(c))
    }

    pub fn eval(&self, x: &RealCoordinate, t: &SiegelPoint) -> Result<Complex64> {
        Ok(self.eval_batch(std::slice::from_ref(x), t)?[0])
    }

    /// Values at several points of one fiber; fiber-level work such as `g.T`
    /// or `a(T)` is done once per call.
    pub fn eval_batch(&self, xs: &[RealCoordinate], t: &SiegelPoint) -> Result<Vec<Complex64>> {
        match self {
            Self::One => Ok(vec![Complex64::new(1.0, 0.0); xs.len()]),
            Self::Monomial(alpha) => {
                if alpha.len() != t.dim() {
                    return Err(Error::Dimension("multi-index length".into()));
                }
                xs.iter()
                    .map(|x| Ok(alpha.iter().zip(embed(x, t)?.iter()).map(|(&a, zi)| zi.powu(a)).product()))
                    .collect()
            }
            Self::Coherent(c) => {
                if c.len() != t.dim() {
                    return Err(Error::Dimension("coherent centre length".into()));
                }
                let v = conj_solve(t, c);
                xs.iter().map(|x| Ok((dot(&embed(x, t)?, &v) * PI).exp())).collect()
            }
            Self::Pi { w, inner } => shifted(xs, t, w, inner, Complex64::new(1.0, 0.0)),
            Self::U { g, inner } => {
                let m = g.inverse_transpose();
                let moved = xs
                    .iter()
                    .map(|x| RealCoordinate::from_stacked(&m.mul_vec_f64(&x.stacked())))
                    .collect::<Result<Vec<_>>>()?;
                inner.eval_batch(&moved, &g.act_siegel(t)?)
            }
            Self::Represent { a, inner } => {
                let mut total = vec![Complex64::new(0.0, 0.0); xs.len()];
                for (w, c) in a.at(t)?.terms() {
                    for (acc, v) in total.iter_mut().zip(shifted(xs, t, w, inner, *c)?) {
                        *acc += v;
                    }
                }
                Ok(total)
            }
        }
    }
}

/// `c * (pi_w f)` at each point.
fn shifted(
    xs: &[RealCoordinate],
    t: &SiegelPoint,
    w: &LatticePoint,
    f: &TestFunction,
    c: Complex64,
) -> Result<Vec<Complex64>> {
    let wr = RealCoordinate::from(w);
    let we = embed(&wr, t)?;
    let v = conj_solve(t, &we);
    let offset = -PI / 2.0 * dot(&we, &v);
    let moved: Vec<RealCoordinate> = xs.iter().map(|x| x.add(&wr)).collect();
    let inner = f.eval_batch(&moved, t)?;
    xs.iter().zip(inner).map(|(x, value)| Ok(c * (offset - PI * dot(&embed(x, t)?, &v)).exp() * value)).collect()
}

/// `(Im T)^{-1} conj(z)`, so that `H_T(s, z) = s . conj_solve(T, z)`.
fn conj_solve(t: &SiegelPoint, z: &CVector) -> CVector {
    t.im_solve(&z.map(|c| c.conj()))
}

fn dot(a: &CVector, b: &CVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn op_pi(w: LatticePoint, f: &TestFunction) -> TestFunction {
    TestFunction::Pi { w, inner: Arc::new(f.clone()) }
}

pub fn op_u(g: SymplecticMatrix, f: &TestFunction) -> TestFunction {
    TestFunction::U { g, inner: Arc::new(f.clone()) }
}

pub fn op_represent(a: AlgebraSection, f: &TestFunction) -> TestFunction {
    TestFunction::Represent { a, inner: Arc::new(f.clone()) }
}

/// Gauss-Hermite nodes and weights for the weight `exp(-u^2)` (Golub-Welsch).
pub fn gauss_hermite(order: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi =
        DMatrix::from_fn(
            order,
            order,
            |i, j| {
                if i + 1 == j || j + 1 == i {
                    (i.max(j) as f64 / 2.0).sqrt()
                } else {
                    0.0
                }
            },
        );
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> =
        (0..order).map(|k| (eig.eigenvalues[k], PI.sqrt() * eig.eigenvectors[(0, k)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Tensor Gauss-Hermite grid for `int F(x) exp(-pi H_T(x, x)) dx` over
/// `R^{2n}`, mapped through the Cholesky factor of the real Gram matrix.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    fiber: SiegelPoint,
    order: usize,
    nodes: Vec<RealCoordinate>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(t: &SiegelPoint, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Dimension("quadrature order must be positive".into()));
        }
        let dim = 2 * t.dim();
        let gram = t.real_gram();
        let chol = gram.clone().cholesky().ok_or_else(|| Error::NotSiegel("Gram matrix".into()))?;
        let upper = chol.l().transpose();
        let det_l: f64 = (0..dim).map(|i| upper[(i, i)]).product();
        let (u1, w1) = gauss_hermite(order);
        let w1: Vec<f64> = w1.iter().map(|w| w / PI.sqrt()).collect();
        let total = order.checked_pow(dim as u32).ok_or(Error::Overflow)?;
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            let u = DVector::from_iterator(dim, idx.iter().map(|&i| u1[i] / PI.sqrt()));
            let x = upper.solve_upper_triangular(&u).ok_or(Error::Singular("Gram factor"))?;
            nodes.push(RealCoordinate::from_stacked(x.as_slice())?);
            weights.push(idx.iter().map(|&i| w1[i]).product::<f64>() / det_l);
            for d in idx.iter_mut() {
                *d += 1;
                if *d < order {
                    break;
                }
                *d = 0;
            }
        }
        let mass = par::pairwise_sum(&weights.iter().map(|&w| Complex64::new(w, 0.0)).collect::<Vec<_>>()).re;
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::NotSiegel(format!("quadrature mass {mass} is not 1")));
        }
        Ok(Self { fiber: t.clone(), order, nodes, weights })
    }

    pub fn fiber(&self) -> &SiegelPoint {
        &self.fiber
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_i w_i F(x_i)`.
    pub fn integrate<F>(&self, f: F) -> Result<Complex64>
    where
        F: Fn(&RealCoordinate) -> Result<Complex64> + Sync + Send,
    {
        self.integrate_batch(|xs| xs.iter().map(&f).collect())
    }

    /// `sum_i w_i F(x_i)` with `F` evaluated on consecutive runs of nodes.
    pub fn integrate_batch<F>(&self, f: F) -> Result<Complex64>
    where
        F: Fn(&[RealCoordinate]) -> Result<Vec<Complex64>> + Sync + Send,
    {
        let value = par::try_sum_chunked(self.nodes.len(), |start, end| {
            let values = f(&self.nodes[start..end])?;
            Ok(values.iter().zip(&self.weights[start..end]).map(|(v, w)| v * w).collect())
        })?;
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Singular("quadrature integrand"));
        }
        Ok(value)
    }
}

/// `<f, h>_T = int f conj(h) exp(-pi H_T(x, x)) dnu`.
pub fn scalar_product(f: &TestFunction, h: &TestFunction, t: &SiegelPoint, grid: &QuadratureGrid) -> Result<Complex64> {
    if !grid.fiber.same_fiber(t) {
        return Err(Error::FiberMismatch);
    }
    grid.integrate_batch(|xs| {
        let hv = h.eval_batch(xs, t)?;
        Ok(f.eval_batch(xs, t)?.into_iter().zip(hv).map(|(a, b)| a * b.conj()).collect())
    })
}

/// The algebra-valued inner product with coefficients flagged when they fall
/// below quadrature resolution.
#[derive(Clone, Debug)]
pub struct AlgebraInner {
    pub element: AlgebraElement,
    pub below_resolution: Vec<LatticePoint>,
    pub radius: f64,
    pub tail_bound: f64,
}

/// `<<f, h>>(T) = sum_w <f, pi_w h>_T e(w)` over the truncation ball.
pub fn algebra_inner(
    f: &TestFunction,
    h: &TestFunction,
    t: &SiegelPoint,
    trunc: &TruncationParams,
    grid: &QuadratureGrid,
) -> Result<AlgebraInner> {
    let (points, radius, tail_bound) = quantum_theta_support(t, trunc)?;
    let (element, below_resolution) = algebra_inner_on(f, h, t, &points, grid)?;
    Ok(AlgebraInner { element, below_resolution, radius, tail_bound })
}

/// The coefficients `<f, pi_w h>_T` for the given `w` only, with the points
/// whose coefficient falls below [`RESOLUTION_FLOOR`].
pub fn algebra_inner_on(
    f: &TestFunction,
    h: &TestFunction,
    t: &SiegelPoint,
    points: &[LatticePoint],
    grid: &QuadratureGrid,
) -> Result<(AlgebraElement, Vec<LatticePoint>)> {
    let coeffs = points.iter().map(|w| scalar_product(f, &op_pi(w.clone(), h), t, grid)).collect::<Result<Vec<_>>>()?;
    let below_resolution =
        points.iter().zip(&coeffs).filter(|(_, c)| c.norm() < RESOLUTION_FLOOR).map(|(w, _)| w.clone()).collect();
    Ok((AlgebraElement::from_terms(t.clone(), points.iter().cloned().zip(coeffs)), below_resolution))
}

/// `alpha(w, v)` recovered from operators: `(pi_w pi_v 1)(x) / (pi_{w+v} 1)(x)`.
pub fn cocycle_from_composition(
    t: &SiegelPoint,
    w: &LatticePoint,
    v: &LatticePoint,
    x: &RealCoordinate,
) -> Result<Complex64> {
    let one = TestFunction::One;
    let composed = op_pi(w.clone(), &op_pi(v.clone(), &one)).eval(x, t)?;
    let direct = op_pi(w.add(v), &one).eval(x, t)?;
    Ok(composed / direct)
}

/// `|pi_w pi_v f - alpha(w, v) pi_{w+v} f|` at `x`, relative to `max(1, |rhs|)`.
pub fn heisenberg_residual(
    t: &SiegelPoint,
    w: &LatticePoint,
    v: &LatticePoint,
    f: &TestFunction,
    x: &RealCoordinate,
) -> Result<f64> {
    let lhs = op_pi(w.clone(), &op_pi(v.clone(), f)).eval(x, t)?;
    let rhs = cocycle(t, w, v)? * op_pi(w.add(v), f).eval(x, t)?;
    Ok((lhs - rhs).norm() / rhs.norm().max(1.0))
}

/// `max |(u(g) pi(a) u(g^{-1}) f)(x, T) - (pi(eps(g) a) f)(x, T)|` over samples.
pub fn check_covariance(
    g: &SymplecticMatrix,
    a: &AlgebraSection,
    f: &TestFunction,
    samples: &[(RealCoordinate, SiegelPoint)],
) -> Result<f64> {
    let lhs = op_u(g.clone(), &op_represent(a.clone(), &op_u(g.inverse(), f)));
    let rhs = op_represent(a.eps(g), f);
    max_pointwise(&lhs, &rhs, samples)
}

/// `max |(u(g) pi_w u(g^{-1}) f)(x, T) - (pi_{g^{-1}.w} f)(x, T)|` over samples.
pub fn conjugation_residual(
    g: &SymplecticMatrix,
    w: &LatticePoint,
    f: &TestFunction,
    samples: &[(RealCoordinate, SiegelPoint)],
) -> Result<f64> {
    let lhs = op_u(g.clone(), &op_pi(w.clone(), &op_u(g.inverse(), f)));
    let rhs = op_pi(g.inverse().act_lattice(w)?, f);
    max_pointwise(&lhs, &rhs, samples)
}

/// `max |(u(g) u(h) f)(x, T) - (u(hg) f)(x, T)|` over samples.
pub fn composition_residual(
    g: &SymplecticMatrix,
    h: &SymplecticMatrix,
    f: &TestFunction,
    samples: &[(RealCoordinate, SiegelPoint)],
) -> Result<f64> {
    let lhs = op_u(g.clone(), &op_u(h.clone(), f));
    let rhs = op_u(h.mul(g)?, f);
    max_pointwise(&lhs, &rhs, samples)
}

fn max_pointwise(lhs: &TestFunction, rhs: &TestFunction, samples: &[(RealCoordinate, SiegelPoint)]) -> Result<f64> {
    samples.iter().try_fold(0.0f64, |acc, (x, t)| Ok(acc.max((lhs.eval(x, t)? - rhs.eval(x, t)?).norm())))
}

/// `|<f, h>_{g.T} - <u(g) f, u(g) h>_T|`.
pub fn lemma2_check(
    g: &SymplecticMatrix,
    f: &TestFunction,
    h: &TestFunction,
    t: &SiegelPoint,
    grid_t: &QuadratureGrid,
    grid_gt: &QuadratureGrid,
) -> Result<f64> {
    let gt = g.act_siegel(t)?;
    let lhs = scalar_product(f, h, &gt, grid_gt)?;
    let rhs = scalar_product(&op_u(g.clone(), f), &op_u(g.clone(), h), t, grid_t)?;
    Ok((lhs - rhs).norm())
}

/// Fixed-fiber consistency `eps_T(g) <<f, h>> = <<u(g) f, u(g) h>>` for `g`
/// in the stabilizer of `T`; returns the largest coefficient difference.
pub fn inner_product_consistency(
    g: &SymplecticMatrix,
    f: &TestFunction,
    h: &TestFunction,
    t: &SiegelPoint,
    trunc: &TruncationParams,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let (points, _, _) = quantum_theta_support(t, trunc)?;
    inner_product_consistency_on(g, f, h, t, &points, grid)
}

/// As [`inner_product_consistency`], restricted to the coefficients at
/// `points`, which must be mapped onto themselves by `g`.
pub fn inner_product_consistency_on(
    g: &SymplecticMatrix,
    f: &TestFunction,
    h: &TestFunction,
    t: &SiegelPoint,
    points: &[LatticePoint],
    grid: &QuadratureGrid,
) -> Result<f64> {
    let lhs = algebra_inner_on(f, h, t, points, grid)?.0.eps_action(g)?;
    let rhs = algebra_inner_on(&op_u(g.clone(), f), &op_u(g.clone(), h), t, points, grid)?.0;
    Ok(lhs.max_diff(&rhs))
}

/// One line of a verification report.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub check: String,
    pub parameters: serde_json::Value,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualReport {
    /// Passes when `residual < tolerance`.
    pub fn below(check: impl Into<String>, parameters: serde_json::Value, residual: f64, tolerance: f64) -> Self {
        Self { check: check.into(), parameters, residual, tolerance, pass: residual < tolerance }
    }

    /// Passes when `residual > tolerance`: a property that must fail.
    pub fn above(check: impl Into<String>, parameters: serde_json::Value, residual: f64, tolerance: f64) -> Self {
        Self { check: check.into(), parameters, residual, tolerance, pass: residual > tolerance }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::siegel::hermitian_form;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lp(a: i64, b: i64) -> LatticePoint {
        LatticePoint::new(vec![a], vec![b])
    }

    fn x(a: f64, b: f64) -> RealCoordinate {
        RealCoordinate::new(vec![a], vec![b]).unwrap()
    }

    #[test]
    fn hermite_rule_integrates_moments() {
        let (u, w) = gauss_hermite(20);
        let m0: f64 = w.iter().sum();
        let m2: f64 = u.iter().zip(&w).map(|(u, w)| u * u * w).sum();
        let m4: f64 = u.iter().zip(&w).map(|(u, w)| u.powi(4) * w).sum();
        assert!((m0 - PI.sqrt()).abs() < 1e-13);
        assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-13);
        assert!((m4 - 3.0 * PI.sqrt() / 4.0).abs() < 1e-13);
    }

    #[test]
    fn unit_norm_on_several_fibers() {
        for tau in [c(0.0, 1.0), c(0.0, 2.0), c(1.0, 1.0)] {
            let t = SiegelPoint::scalar(tau).unwrap();
            let grid = QuadratureGrid::new(&t, 40).unwrap();
            let v = scalar_product(&TestFunction::One, &TestFunction::One, &t, &grid).unwrap();
            assert!((v - 1.0).norm() < 1e-8);
        }
    }

    #[test]
    fn odd_monomial_is_orthogonal_to_one() {
        let t = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let grid = QuadratureGrid::new(&t, 40).unwrap();
        let v = scalar_product(&TestFunction::Monomial(vec![1]), &TestFunction::One, &t, &grid).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn coherent_norm_matches_closed_form() {
        let t = SiegelPoint::scalar(c(0.3, 1.4)).unwrap();
        let grid = QuadratureGrid::new(&t, 40).unwrap();
        let cc = CVector::from_element(1, c(0.4, -0.3));
        let f = TestFunction::Coherent(cc.clone());
        let v = scalar_product(&f, &f, &t, &grid).unwrap();
        let exact = (PI * hermitian_form(&t, &cc, &cc)).exp();
        assert!((v - exact).norm() < 1e-8);
    }

    #[test]
    fn reproducing_kernel_property() {
        // <f, coherent(c)> = f(c) for holomorphic f
        let t = SiegelPoint::scalar(c(-0.2, 0.9)).unwrap();
        let grid = QuadratureGrid::new(&t, 40).unwrap();
        let cc = c(0.5, 0.2);
        let v = scalar_product(&TestFunction::Monomial(vec![2]), &TestFunction::coherent(vec![cc]), &t, &grid).unwrap();
        assert!((v - cc * cc).norm() < 1e-9);
    }

    #[test]
    fn grid_fiber_mismatch() {
        let t = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let grid = QuadratureGrid::new(&t, 10).unwrap();
        let other = SiegelPoint::scalar(c(0.0, 2.0)).unwrap();
        assert_eq!(scalar_product(&TestFunction::One, &TestFunction::One, &other, &grid), Err(Error::FiberMismatch));
    }

    #[test]
    fn pi_zero_is_identity_and_composition_gives_cocycle() {
        let t = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let f = TestFunction::Monomial(vec![3]);
        let p = x(0.3, -0.4);
        assert_eq!(op_pi(lp(0, 0), &f).eval(&p, &t).unwrap(), f.eval(&p, &t).unwrap());
        let alpha = cocycle_from_composition(&t, &lp(1, 0), &lp(0, 1), &p).unwrap();
        assert!((alpha - c(-1.0, 0.0)).norm() < 1e-12);
        assert!(heisenberg_residual(&t, &lp(2, -1), &lp(1, 1), &f, &p).unwrap() < 1e-10);
    }

    #[test]
    fn quantum_theta_coefficient_by_quadrature() {
        let t = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let grid = QuadratureGrid::new(&t, 40).unwrap();
        let v = scalar_product(&TestFunction::One, &op_pi(lp(1, 0), &TestFunction::One), &t, &grid).unwrap();
        assert!((v - (-PI / 2.0).exp()).norm() < 1e-10);
    }

    #[test]
    fn u_composes_in_reverse_order() {
        let t = SiegelPoint::scalar(c(0.1, 1.3)).unwrap();
        let g = SymplecticMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        let h = SymplecticMatrix::flip(1);
        let f = TestFunction::coherent(vec![c(0.2, 0.7)]);
        let samples = vec![(x(0.3, 0.1), t.clone()), (x(-0.5, 0.8), t.clone())];
        assert!(composition_residual(&g, &h, &f, &samples).unwrap() < 1e-12);
        let forward = op_u(g.clone(), &op_u(h.clone(), &f));
        let wrong = op_u(g.mul(&h).unwrap(), &f);
        assert!((forward.eval(&samples[0].0, &t).unwrap() - wrong.eval(&samples[0].0, &t).unwrap()).norm() > 1e-3);
        let inverse_pair = op_u(g.clone(), &op_u(g.inverse(), &f));
        assert!((inverse_pair.eval(&samples[1].0, &t).unwrap() - f.eval(&samples[1].0, &t).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn covariance_at_i_for_flip() {
        let t = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let samples: Vec<_> = [(0.1, 0.2), (-0.3, 0.5), (0.7, -0.1), (0.0, 0.0), (0.4, 0.4)]
            .iter()
            .map(|&(a, b)| (x(a, b), t.clone()))
            .collect();
        let a = AlgebraSection::constant(vec![(lp(1, 0), c(1.0, 0.0))]);
        let j = SymplecticMatrix::flip(1);
        assert!(check_covariance(&j, &a, &TestFunction::One, &samples).unwrap() < 1e-10);
        assert_eq!(check_covariance(&SymplecticMatrix::identity(1), &a, &TestFunction::One, &samples).unwrap(), 0.0);
    }

    #[test]
    fn scalar_product_transport_for_flip_at_two_i() {
        let t = SiegelPoint::scalar(c(0.0, 2.0)).unwrap();
        let j = SymplecticMatrix::flip(1);
        let gt = j.act_siegel(&t).unwrap();
        let grid_t = QuadratureGrid::new(&t, 40).unwrap();
        let grid_gt = QuadratureGrid::new(&gt, 40).unwrap();
        let f = TestFunction::Monomial(vec![1]);
        let h = TestFunction::coherent(vec![c(0.5, 0.0)]);
        assert!(lemma2_check(&j, &f, &h, &t, &grid_t, &grid_gt).unwrap() < 1e-7);
        let one = TestFunction::One;
        assert!(lemma2_check(&j, &one, &one, &t, &grid_t, &grid_gt).unwrap() < 1e-7);
    }

    #[test]
    fn algebra_inner_of_ones_is_quantum_theta() {
        let t = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let grid = QuadratureGrid::new(&t, 40).unwrap();
        let trunc = TruncationParams::auto(1e-9);
        let inner = algebra_inner(&TestFunction::One, &TestFunction::One, &t, &trunc, &grid).unwrap();
        let q = crate::algebra::quantum_theta(&t, &trunc).unwrap();
        assert!(inner.element.max_diff(&q) < 1e-7);
        let origin = inner.element.coeff(&lp(0, 0));
        assert!(origin.re > 0.0 && origin.im.abs() < 1e-12);
    }
}
