mod common;

use common::*;
use proptest::prelude::*;
use symtorus::algebra::{cocycle, quantum_theta};
use symtorus::symplectic::{is_abelian, stabilizer_search, DEFAULT_STABILIZER_TOL};
use symtorus::{AlgebraElement, CrossedElement, LatticePoint, SiegelPoint, SymplecticMatrix, TruncationParams};

fn random_element<R: rand::Rng>(r: &mut R, t: &SiegelPoint, terms: usize) -> AlgebraElement {
    let n = t.dim();
    AlgebraElement::from_terms(
        t.clone(),
        (0..terms).map(|_| (random_lattice(r, n, 2), c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))),
    )
}

#[test]
fn multiplication_is_associative_with_unit() {
    let mut r = rng(41);
    for i in 0..30 {
        let n = 1 + i % 2;
        let t = random_siegel(&mut r, n);
        let a = random_element(&mut r, &t, 4);
        let b = random_element(&mut r, &t, 4);
        let d = random_element(&mut r, &t, 4);
        let left = a.mul(&b).unwrap().mul(&d).unwrap();
        let right = a.mul(&b.mul(&d).unwrap()).unwrap();
        assert!(left.max_diff(&right) < 1e-12);
        let one = AlgebraElement::unit(t.clone());
        assert!(a.mul(&one).unwrap().max_diff(&a) < 1e-15);
        assert!(one.mul(&a).unwrap().max_diff(&a) < 1e-15);
    }
}

#[test]
fn products_of_generators_follow_the_cocycle() {
    let t = SiegelPoint::scalar(c(0.3, 1.2)).unwrap();
    for w in small_points_1d(2.0) {
        for v in small_points_1d(2.0) {
            let prod =
                AlgebraElement::basis(t.clone(), w.clone()).mul(&AlgebraElement::basis(t.clone(), v.clone())).unwrap();
            assert_eq!(prod.len(), 1);
            assert_eq!(prod.coeff(&w.add(&v)), cocycle(&t, &w, &v).unwrap());
        }
    }
}

#[test]
fn eps_composes_in_reverse_order() {
    let t = SiegelPoint::i_identity(2);
    let group = stabilizer_search(&t, 3, DEFAULT_STABILIZER_TOL).unwrap();
    let mut r = rng(42);
    let a = random_element(&mut r, &t, 6);
    for g in group.iter().step_by(3) {
        for h in group.iter().step_by(5) {
            let two_step = a.eps_action(h).unwrap().eps_action(g).unwrap();
            let one_step = a.eps_action(&h.mul(g).unwrap()).unwrap();
            assert_eq!(two_step.max_diff(&one_step), 0.0);
        }
    }
}

#[test]
fn eps_is_rejected_off_the_stabilizer() {
    let t = SiegelPoint::scalar(c(0.3, 1.2)).unwrap();
    let a = AlgebraElement::unit(t);
    assert!(a.eps_action(&SymplecticMatrix::flip(1)).is_err());
}

#[test]
fn quantum_theta_is_stabilizer_invariant() {
    for t in [SiegelPoint::i_identity(1), SiegelPoint::i_identity(2)] {
        let q = quantum_theta(&t, &TruncationParams::default()).unwrap();
        for g in stabilizer_search(&t, 4, DEFAULT_STABILIZER_TOL).unwrap() {
            assert!(q.eps_action(&g).unwrap().max_diff(&q) < 1e-12, "{g:?}");
        }
    }
}

#[test]
fn crossed_product_over_cyclic_stabilizer_is_associative() {
    let t = SiegelPoint::i_identity(1);
    let group = stabilizer_search(&t, 4, DEFAULT_STABILIZER_TOL).unwrap();
    let mut r = rng(43);
    let mut random_crossed = || {
        let mut x = CrossedElement::zero(t.clone());
        for g in &group {
            x.add_term(g.clone(), random_element(&mut r, &t, 3)).unwrap();
        }
        x
    };
    let (a, b, d) = (random_crossed(), random_crossed(), random_crossed());
    let left = a.mul(&b).unwrap().mul(&d).unwrap();
    let right = a.mul(&b.mul(&d).unwrap()).unwrap();
    assert!(left.max_diff(&right) < 1e-12);
    let one = CrossedElement::unit(t.clone());
    assert!(a.mul(&one).unwrap().max_diff(&a) < 1e-15);
}

#[test]
fn crossed_product_over_nonabelian_stabilizer_is_not_associative() {
    let t = SiegelPoint::i_identity(2);
    let group = stabilizer_search(&t, 3, DEFAULT_STABILIZER_TOL).unwrap();
    assert!(!is_abelian(&group));
    let (g, h) = group
        .iter()
        .flat_map(|g| group.iter().map(move |h| (g, h)))
        .find(|(g, h)| g.mul(h).unwrap() != h.mul(g).unwrap())
        .unwrap();
    let one = AlgebraElement::unit(t.clone());
    let w = LatticePoint::new(vec![1, 0], vec![0, 0]);
    let probe = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| {
            let mut w1 = vec![0, 0];
            let mut w2 = vec![0, 0];
            w1[i] = 1;
            w2[j] = 1;
            LatticePoint::new(w1, w2)
        })
        .chain(std::iter::once(w))
        .find(|w| {
            let d = AlgebraElement::basis(t.clone(), w.clone());
            d.eps_action(&g.mul(h).unwrap()).unwrap().max_diff(&d.eps_action(&h.mul(g).unwrap()).unwrap()) > 0.5
        })
        .unwrap();
    let b = CrossedElement::term(g.clone(), one.clone()).unwrap();
    let cc = CrossedElement::term(h.clone(), one.clone()).unwrap();
    let d = CrossedElement::term(SymplecticMatrix::identity(2), AlgebraElement::basis(t.clone(), probe)).unwrap();
    let left = b.mul(&cc).unwrap().mul(&d).unwrap();
    let right = b.mul(&cc.mul(&d).unwrap()).unwrap();
    assert!(left.max_diff(&right) > 0.5);
}

proptest! {
    #[test]
    fn cocycle_is_a_symmetric_sign(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let t = random_siegel(&mut r, n);
        let w = random_lattice(&mut r, n, 4);
        let v = random_lattice(&mut r, n, 4);
        let u = random_lattice(&mut r, n, 4);
        let a = cocycle(&t, &w, &v).unwrap();
        prop_assert!(a == c(1.0, 0.0) || a == c(-1.0, 0.0));
        prop_assert_eq!(a, cocycle(&t, &v, &w).unwrap());
        prop_assert_eq!(cocycle(&t, &w, &LatticePoint::zero(n)).unwrap(), c(1.0, 0.0));
        let lhs = a * cocycle(&t, &w.add(&v), &u).unwrap();
        let rhs = cocycle(&t, &w, &v.add(&u)).unwrap() * cocycle(&t, &v, &u).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cocycle_does_not_depend_on_the_fiber(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = random_lattice(&mut r, 2, 4);
        let v = random_lattice(&mut r, 2, 4);
        let a = cocycle(&random_siegel(&mut r, 2), &w, &v).unwrap();
        let b = cocycle(&random_siegel(&mut r, 2), &w, &v).unwrap();
        prop_assert_eq!(a, b);
    }
}
