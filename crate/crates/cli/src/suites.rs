//! Invariant suites run by `verify`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use symtorus::algebra::{cocycle, lattice_norm_sq, quantum_theta};
use symtorus::fock::{
    check_covariance, cocycle_from_composition, composition_residual, conjugation_residual, heisenberg_residual,
    inner_product_consistency, inner_product_consistency_on, lemma2_check, op_pi, scalar_product, ResidualReport,
};
use symtorus::lattice::ellipsoid_points;
use symtorus::siegel::{im_transform_identity, lemma1_residual, CVector};
use symtorus::symplectic::{generator, is_abelian, is_closed, stabilizer_search};
use symtorus::theta::{averaged_theta, invariant_theta, modular_ratio, quasi_period_check, theta, QuasiPeriod, Shift};
use symtorus::{
    AlgebraElement, AlgebraSection, Alphabet, CrossedElement, Error, Generator, IntMatrix, LatticePoint,
    QuadratureGrid, RealCoordinate, Result, SiegelPoint, SymplecticMatrix, TestFunction, TruncationParams,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Classical,
    Quantum,
    Crossed,
    All,
}

pub struct Context {
    pub n: usize,
    pub fiber: SiegelPoint,
    pub trunc: TruncationParams,
    pub order: usize,
    pub tol: Option<f64>,
    pub max_len: usize,
    pub stab_tol: f64,
    pub rng: ChaCha8Rng,
}

impl Context {
    fn below(&self, check: &str, parameters: serde_json::Value, residual: f64, default_tol: f64) -> ResidualReport {
        ResidualReport::below(check, parameters, residual, self.tol.unwrap_or(default_tol))
    }

    fn siegel(&mut self) -> SiegelPoint {
        let n = self.n;
        let x = nalgebra::DMatrix::from_fn(n, n, |_, _| self.rng.gen_range(-0.5..0.5));
        let x = (&x + x.transpose()) * 0.5;
        let m = nalgebra::DMatrix::from_fn(n, n, |_, _| self.rng.gen_range(-0.5..0.5));
        let y = &m * m.transpose() + nalgebra::DMatrix::identity(n, n) * self.rng.gen_range(0.6..1.5);
        SiegelPoint::from_parts(x, y).expect("positive definite by construction")
    }

    fn coordinate(&mut self) -> RealCoordinate {
        let n = self.n;
        let mut draw = || (0..n).map(|_| self.rng.gen_range(-1.0..1.0)).collect::<Vec<_>>();
        let x1 = draw();
        RealCoordinate { x1, x2: draw() }
    }

    fn z(&mut self, scale: f64) -> CVector {
        CVector::from_iterator(
            self.n,
            (0..self.n).map(|_| Complex64::new(self.rng.gen_range(-0.5..0.5), self.rng.gen_range(-scale..scale))),
        )
    }

    fn lattice(&mut self, bound: i64) -> LatticePoint {
        let n = self.n;
        let mut draw = || (0..n).map(|_| self.rng.gen_range(-bound..=bound)).collect::<Vec<_>>();
        let w1 = draw();
        LatticePoint::new(w1, draw())
    }

    fn word(&mut self, alphabet: &Alphabet, max_len: usize) -> Result<SymplecticMatrix> {
        alphabet.random_word(&mut self.rng, max_len).evaluate()
    }

    fn samples(&mut self, t: &SiegelPoint, k: usize) -> Vec<(RealCoordinate, SiegelPoint)> {
        (0..k).map(|_| (self.coordinate(), t.clone())).collect()
    }

    fn grid(&self, t: &SiegelPoint) -> Result<QuadratureGrid> {
        QuadratureGrid::new(t, self.order)
    }
}

pub fn run(suite: Suite, ctx: &mut Context) -> Result<Vec<ResidualReport>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Classical | Suite::All) {
        out.extend(classical(ctx)?);
    }
    if matches!(suite, Suite::Quantum | Suite::All) {
        out.extend(quantum(ctx)?);
    }
    if matches!(suite, Suite::Crossed | Suite::All) {
        out.extend(crossed(ctx)?);
    }
    Ok(out)
}

fn unit_vector(n: usize, k: usize) -> Vec<i64> {
    (0..n).map(|j| i64::from(j == k)).collect()
}

fn generators(n: usize, theta_group: bool) -> Result<Vec<SymplecticMatrix>> {
    let mut a = IntMatrix::identity(n);
    if n > 1 && !theta_group {
        a.set(0, 1, 1);
    } else {
        a.set(0, 0, -1);
    }
    let mut b = IntMatrix::zeros(n, n);
    b.set(0, 0, if theta_group { 2 } else { 1 });
    Ok(vec![generator(n, &Generator::Linear(a))?, generator(n, &Generator::Shear(b))?, SymplecticMatrix::flip(n)])
}

/// The cyclic group generated by `J`.
fn flip_group(n: usize) -> Result<Vec<SymplecticMatrix>> {
    let j = SymplecticMatrix::flip(n);
    let mut out = vec![SymplecticMatrix::identity(n)];
    for _ in 0..3 {
        out.push(out.last().expect("nonempty").mul(&j)?);
    }
    Ok(out)
}

fn brute_theta_at_i(cutoff: i64) -> f64 {
    (-cutoff..=cutoff).map(|k| (-PI * (k * k) as f64).exp()).sum()
}

fn classical(ctx: &mut Context) -> Result<Vec<ResidualReport>> {
    let n = ctx.n;
    let trunc = ctx.trunc;
    let standard = Alphabet::standard(n);
    let mut out = Vec::new();

    let (mut transport, mut im_identity) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let g = ctx.word(&standard, 4)?;
        let t = ctx.siegel();
        let (x, y) = (ctx.coordinate(), ctx.coordinate());
        transport = transport.max(lemma1_residual(&g, &t, &x, &y)?);
        im_identity = im_identity.max(im_transform_identity(&g, &t)?);
    }
    let sweep = json!({"n": n, "samples": 100, "max_word_length": 4});
    out.push(ctx.below("hermitian_form_transport", sweep.clone(), transport, 1e-10));
    out.push(ctx.below("im_transform_identity", sweep, im_identity, 1e-10));

    let fiber = ctx.fiber.clone();
    let (mut integer, mut period) = (0.0f64, 0.0f64);
    for _ in 0..5 {
        let z = ctx.z(0.3);
        for k in 0..n {
            integer = integer.max(quasi_period_check(&z, &fiber, &Shift::Integer(unit_vector(n, k)), &trunc)?);
            let p = QuasiPeriod::new(unit_vector(n, k), &fiber)?;
            period = period.max(quasi_period_check(&z, &fiber, &Shift::Period(p), &trunc)?);
        }
    }
    out.push(ctx.below("quasi_period_integer", json!({"n": n, "samples": 5}), integer, 1e-9));
    out.push(ctx.below("quasi_period_lattice", json!({"n": n, "samples": 5}), period, 1e-9));

    let i_n = SiegelPoint::i_identity(n);
    let mut half = CVector::zeros(n);
    half[0] = Complex64::new(0.5, 0.5);
    out.push(ctx.below("theta_half_period_zero", json!({"n": n}), theta(&half, &i_n, &trunc)?.norm(), 1e-10));
    let at_zero = theta(&CVector::zeros(n), &i_n, &trunc)?;
    let direct = brute_theta_at_i(30).powi(n as i32);
    out.push(ctx.below("theta_at_i_direct_sum", json!({"n": n, "cutoff": 30}), (at_zero - direct).norm(), 1e-12));

    let theta_alphabet = Alphabet::theta_group(n);
    let mut cases = generators(n, true)?;
    for _ in 0..5 {
        cases.push(ctx.word(&theta_alphabet, 4)?);
    }
    let (mut modulus, mut eighth, mut spread) = (0.0f64, 0.0f64, 0.0f64);
    for g in &cases {
        let mut xis = Vec::new();
        let mut attempts = 0;
        while xis.len() < 5 {
            attempts += 1;
            match modular_ratio(g, &ctx.z(0.2), &fiber, &trunc) {
                Ok(xi) => xis.push(xi),
                Err(Error::NearZero(_)) if attempts < 50 => continue,
                Err(e) => return Err(e),
            }
        }
        for xi in &xis {
            modulus = modulus.max((xi.norm() - 1.0).abs());
            eighth = eighth.max((xi.powi(8) - 1.0).norm());
            spread = spread.max((xi - xis[0]).norm());
        }
    }
    let params = json!({"n": n, "elements": cases.len(), "z_samples": 5});
    out.push(ctx.below("modular_ratio_modulus", params.clone(), modulus, 1e-7));
    out.push(ctx.below("modular_ratio_eighth_root", params.clone(), eighth, 1e-7));
    out.push(ctx.below("modular_ratio_z_independence", params, spread, 1e-7));

    let (mut by_generator, mut by_shift) = (0.0f64, 0.0f64);
    for _ in 0..3 {
        let x = ctx.coordinate();
        let base = invariant_theta(&x, &fiber, &trunc)?;
        for g in generators(n, false)? {
            let moved = invariant_theta(&g.act_real(&x)?, &g.act_siegel(&fiber)?, &trunc)?;
            by_generator = by_generator.max((moved - base).norm());
        }
        for k in 0..n {
            let e: Vec<f64> = unit_vector(n, k).into_iter().map(|v| v as f64).collect();
            let zero = vec![0.0; n];
            for s in [RealCoordinate::new(e.clone(), zero.clone())?, RealCoordinate::new(zero, e)?] {
                by_shift = by_shift.max((invariant_theta(&x.add(&s), &fiber, &trunc)? - base).norm());
            }
        }
    }
    out.push(ctx.below("invariant_theta_generators", json!({"n": n, "samples": 3}), by_generator, 1e-8));
    out.push(ctx.below("invariant_theta_shifts", json!({"n": n, "samples": 3}), by_shift, 1e-8));

    let group = flip_group(n)?;
    let z = ctx.z(0.1);
    let base = averaged_theta(&z, &i_n, &group, &trunc)?;
    let moved = averaged_theta(&SymplecticMatrix::flip(n).act_coord(&z, &i_n)?, &i_n, &group, &trunc)?;
    let mut shift = CVector::zeros(n);
    shift[0] = Complex64::new(1.0, 0.0);
    let shifted = averaged_theta(&(&z + shift), &i_n, &group, &trunc)?;
    let params = json!({"n": n, "group": "<J>", "z": z.iter().flat_map(|c| [c.re, c.im]).collect::<Vec<_>>()});
    out.push(ctx.below("group_average_invariance", params.clone(), (moved - base).norm(), 1e-12));
    out.push(ResidualReport::above(
        "group_average_periodicity_violation",
        params,
        (shifted - base).norm() / shifted.norm().max(1.0),
        0.01,
    ));
    Ok(out)
}

/// Lattice points of norm at most `radius` in the Euclidean metric of `Z^{2n}`.
fn ball(n: usize, radius: f64) -> Result<Vec<LatticePoint>> {
    let id = nalgebra::DMatrix::identity(2 * n, 2 * n);
    ellipsoid_points(&id, radius)?.iter().map(|v| LatticePoint::from_stacked(v)).collect()
}

fn quantum(ctx: &mut Context) -> Result<Vec<ResidualReport>> {
    let n = ctx.n;
    let fiber = ctx.fiber.clone();
    let mut out = Vec::new();

    let pts = ball(n, if n == 1 { 2.0 } else { 1.0 })?;
    let xs: Vec<_> = (0..5).map(|_| ctx.coordinate()).collect();
    let coherent = TestFunction::Coherent(ctx.z(0.3));
    let (mut composition, mut heisenberg) = (0.0f64, 0.0f64);
    for w in &pts {
        for v in &pts {
            let alpha = cocycle(&fiber, w, v)?;
            for x in &xs {
                composition = composition.max((cocycle_from_composition(&fiber, w, v, x)? - alpha).norm());
                heisenberg = heisenberg.max(heisenberg_residual(&fiber, w, v, &coherent, x)?);
            }
        }
    }
    let params = json!({"n": n, "pairs": pts.len() * pts.len(), "x_samples": xs.len()});
    out.push(ctx.below("cocycle_from_composition", params.clone(), composition, 1e-10));
    out.push(ctx.below("heisenberg_relation", params, heisenberg, 1e-10));

    let mut assoc = 0.0f64;
    for _ in 0..20 {
        let element = |ctx: &mut Context| {
            let terms: Vec<_> = (0..5)
                .map(|_| {
                    let w = ctx.lattice(2);
                    (w, Complex64::new(ctx.rng.gen_range(-1.0..1.0), ctx.rng.gen_range(-1.0..1.0)))
                })
                .collect();
            AlgebraElement::from_terms(fiber.clone(), terms)
        };
        let (a, b, d) = (element(ctx), element(ctx), element(ctx));
        assoc = assoc.max(a.mul(&b)?.mul(&d)?.max_diff(&a.mul(&b.mul(&d)?)?));
    }
    out.push(ctx.below("algebra_associativity", json!({"n": n, "triples": 20}), assoc, 1e-12));

    let grid = ctx.grid(&fiber)?;
    let one = TestFunction::One;
    let radius = if n == 1 { 3.0 } else { 1.0 };
    let qtheta = quantum_theta(&fiber, &TruncationParams::auto(1e-12))?;
    let (mut by_quadrature, mut closed_form) = (0.0f64, 0.0f64);
    for w in ball(n, radius)? {
        let quad = scalar_product(&one, &op_pi(w.clone(), &one), &fiber, &grid)?;
        by_quadrature = by_quadrature.max((quad - qtheta.coeff(&w)).norm());
        closed_form = closed_form.max((quad - (-PI / 2.0 * lattice_norm_sq(&fiber, &w)).exp()).norm());
    }
    let params = json!({"n": n, "ball_radius": radius, "order": ctx.order});
    out.push(ctx.below("quantum_theta_vs_quadrature", params.clone(), by_quadrature, 1e-7));
    out.push(ctx.below("quantum_theta_closed_form", params, closed_form, 1e-7));

    let unit = scalar_product(&one, &one, &fiber, &grid)?;
    out.push(ctx.below("unit_normalization", json!({"n": n, "order": ctx.order}), (unit - 1.0).norm(), 1e-8));

    let fine = QuadratureGrid::new(&fiber, 2 * ctx.order)?;
    let mut pairs = vec![(one.clone(), one.clone()), (coherent.clone(), coherent.clone())];
    if n == 1 {
        pairs.push((TestFunction::Monomial(vec![2]), op_pi(LatticePoint::new(vec![1], vec![-1]), &one)));
    }
    let mut doubling = 0.0f64;
    for (f, h) in &pairs {
        let a = scalar_product(f, h, &fiber, &grid)?;
        let b = scalar_product(f, h, &fiber, &fine)?;
        doubling = doubling.max((a - b).norm() / b.norm().max(1.0));
    }
    out.push(ctx.below("quadrature_order_doubling", json!({"n": n, "order": ctx.order}), doubling, 1e-8));
    Ok(out)
}

fn crossed(ctx: &mut Context) -> Result<Vec<ResidualReport>> {
    let n = ctx.n;
    let fiber = ctx.fiber.clone();
    let standard = Alphabet::standard(n);
    let mut out = Vec::new();

    let mut w1 = vec![0; n];
    w1[0] = 1;
    let section = AlgebraSection::constant(vec![
        (LatticePoint::new(w1.clone(), vec![0; n]), Complex64::new(1.0, 0.0)),
        (LatticePoint::new(vec![0; n], w1), Complex64::new(0.3, -0.2)),
    ]);
    let qsection = AlgebraSection::quantum_theta(TruncationParams::auto(1e-12));
    let f = TestFunction::Monomial(vec![1; n]);
    let (mut covariance, mut conj, mut comp) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10 {
        let g = ctx.word(&standard, 3)?;
        let h = ctx.word(&standard, 3)?;
        let t = ctx.siegel();
        let s = ctx.samples(&t, 3);
        covariance = covariance.max(check_covariance(&g, &section, &TestFunction::One, &s)?);
        covariance = covariance.max(check_covariance(&g, &qsection, &f, &s)?);
        let w = ctx.lattice(2);
        conj = conj.max(conjugation_residual(&g, &w, &f, &s)?);
        comp = comp.max(composition_residual(&g, &h, &f, &s)?);
    }
    out.push(ctx.below("covariance", json!({"n": n, "samples": 10}), covariance, 1e-10));
    out.push(ctx.below("conjugation_identity", json!({"n": n, "samples": 10}), conj, 1e-10));
    out.push(ctx.below("u_composition_order", json!({"n": n, "samples": 10}), comp, 1e-10));

    let grid = ctx.grid(&fiber)?;
    let mut family = vec![TestFunction::One, TestFunction::Coherent(ctx.z(0.3))];
    if n == 1 {
        family.push(TestFunction::Monomial(vec![1]));
    }
    let mut transport = 0.0f64;
    for g in generators(n, false)? {
        let grid_gt = ctx.grid(&g.act_siegel(&fiber)?)?;
        for a in &family {
            for b in &family {
                transport = transport.max(lemma2_check(&g, a, b, &fiber, &grid, &grid_gt)?);
            }
        }
    }
    out.push(ctx.below("scalar_product_transport", json!({"n": n, "order": ctx.order}), transport, 1e-7));

    let group = stabilizer_search(&fiber, ctx.max_len, ctx.stab_tol)?;
    let closed = is_closed(&group);
    out.push(ResidualReport::below(
        "stabilizer_closed",
        json!({"n": n, "max_word_length": ctx.max_len, "size": group.len()}),
        if closed { 0.0 } else { 1.0 },
        0.5,
    ));

    let qtheta = quantum_theta(&fiber, &ctx.trunc)?;
    let mut invariance = 0.0f64;
    for g in &group {
        invariance = invariance.max(qtheta.eps_action(g)?.max_diff(&qtheta));
    }
    out.push(ctx.below("quantum_theta_stabilizer_invariance", json!({"n": n, "size": group.len()}), invariance, 1e-12));

    let one = TestFunction::One;
    let (consistency, params) = if n == 1 {
        let inner_trunc = TruncationParams::auto(1e-10);
        let mut worst = 0.0f64;
        for g in &group {
            worst = worst.max(inner_product_consistency(g, &one, &one, &fiber, &inner_trunc, &grid)?);
        }
        (worst, json!({"n": n, "elements": group.len(), "tail_tolerance": inner_trunc.tail_tolerance}))
    } else {
        let points = ellipsoid_points(fiber.real_gram(), 1.0)?
            .iter()
            .map(|v| LatticePoint::from_stacked(v))
            .collect::<Result<Vec<_>>>()?;
        let flip = SymplecticMatrix::flip(n);
        let probes: Vec<&SymplecticMatrix> = group.iter().filter(|g| **g == flip).collect();
        let mut worst = 0.0f64;
        for g in &probes {
            worst = worst.max(inner_product_consistency_on(g, &one, &one, &fiber, &points, &grid)?);
        }
        (worst, json!({"n": n, "elements": probes.len(), "coefficients": points.len()}))
    };
    out.push(ctx.below("inner_product_consistency", params, consistency, 1e-7));

    if closed {
        let random_crossed = |ctx: &mut Context| -> Result<CrossedElement> {
            let mut x = CrossedElement::zero(fiber.clone());
            for g in &group {
                let terms: Vec<_> = (0..3)
                    .map(|_| {
                        let w = ctx.lattice(2);
                        (w, Complex64::new(ctx.rng.gen_range(-1.0..1.0), ctx.rng.gen_range(-1.0..1.0)))
                    })
                    .collect();
                x.add_term(g.clone(), AlgebraElement::from_terms(fiber.clone(), terms))?;
            }
            Ok(x)
        };
        let (a, b, d) = (random_crossed(ctx)?, random_crossed(ctx)?, random_crossed(ctx)?);
        let defect = a.mul(&b)?.mul(&d)?.max_diff(&a.mul(&b.mul(&d)?)?);
        let params = json!({"n": n, "size": group.len()});
        if is_abelian(&group) {
            out.push(ctx.below("crossed_associativity", params, defect, 1e-12));
        } else {
            out.push(ResidualReport::above("crossed_associativity_defect_nonabelian", params, defect, 1e-6));
        }
    }
    Ok(out)
}
