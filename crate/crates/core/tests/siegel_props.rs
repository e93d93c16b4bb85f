mod common;

use common::*;
use symtorus::siegel::{
    embed, hermitian_form, im_transform_identity, inversion_im_residual, lemma1_residual, symplectic_pairing,
};
use symtorus::{Alphabet, RealCoordinate, SymplecticMatrix};

#[test]
fn hermitian_form_transport_sweep() {
    let mut r = rng(21);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 1 + i % 2;
        let g = Alphabet::standard(n).random_word(&mut r, 4).evaluate().unwrap();
        let t = random_siegel(&mut r, n);
        let x = random_coordinate(&mut r, n);
        let y = random_coordinate(&mut r, n);
        worst = worst.max(lemma1_residual(&g, &t, &x, &y).unwrap());
    }
    assert!(worst < 1e-10, "worst residual {worst:e}");
}

#[test]
fn hermitian_form_transport_examples() {
    let t = symtorus::SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
    let x = RealCoordinate::new(vec![1.0], vec![0.0]).unwrap();
    let y = RealCoordinate::new(vec![0.0], vec![1.0]).unwrap();
    assert_eq!(lemma1_residual(&SymplecticMatrix::identity(1), &t, &x, &y).unwrap(), 0.0);
    assert!(lemma1_residual(&SymplecticMatrix::flip(1), &t, &x, &y).unwrap() < 1e-15);
}

#[test]
fn im_transform_sweep() {
    let mut r = rng(22);
    for i in 0..100 {
        let n = 1 + i % 2;
        let g = Alphabet::standard(n).random_word(&mut r, 4).evaluate().unwrap();
        let t = random_siegel(&mut r, n);
        assert!(im_transform_identity(&g, &t).unwrap() < 1e-10);
        assert!(inversion_im_residual(&t).unwrap() < 1e-10);
    }
    let i = symtorus::SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
    assert_eq!(im_transform_identity(&SymplecticMatrix::identity(1), &i).unwrap(), 0.0);
    assert!(im_transform_identity(&SymplecticMatrix::flip(1), &i).unwrap() < 1e-15);
}

#[test]
fn hermitian_form_is_positive_and_hermitian() {
    let mut r = rng(23);
    for i in 0..100 {
        let n = 1 + i % 2;
        let t = random_siegel(&mut r, n);
        let s = embed(&random_coordinate(&mut r, n), &t).unwrap();
        let z = embed(&random_coordinate(&mut r, n), &t).unwrap();
        let hzz = hermitian_form(&t, &z, &z);
        assert!(hzz.re > 0.0 && hzz.im.abs() < 1e-12);
        assert!((hermitian_form(&t, &s, &z) - hermitian_form(&t, &z, &s).conj()).norm() < 1e-12);
        // sesquilinearity
        let k = c(0.3, -1.2);
        let lhs = hermitian_form(&t, &(&s * k), &z);
        assert!((lhs - k * hermitian_form(&t, &s, &z)).norm() < 1e-12);
        let rhs = hermitian_form(&t, &s, &(&z * k));
        assert!((rhs - k.conj() * hermitian_form(&t, &s, &z)).norm() < 1e-12);
    }
}

#[test]
fn pairing_does_not_depend_on_the_fiber() {
    let mut r = rng(24);
    for i in 0..40 {
        let n = 1 + i % 2;
        let k = random_lattice(&mut r, n, 3);
        let x = random_coordinate(&mut r, n);
        let values: Vec<f64> = (0..5).map(|_| symplectic_pairing(&random_siegel(&mut r, n), &k, &x).unwrap()).collect();
        for v in &values {
            assert!((v - values[0]).abs() < 1e-10);
        }
    }
}
