#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symtorus::siegel::CVector;
use symtorus::{Complex64, LatticePoint, RealCoordinate, SiegelPoint};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_siegel<R: Rng>(rng: &mut R, n: usize) -> SiegelPoint {
    let x = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.5..0.5));
    let x = (&x + x.transpose()) * 0.5;
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.5..0.5));
    let y = &m * m.transpose() + DMatrix::identity(n, n) * rng.gen_range(0.6..1.5);
    SiegelPoint::from_parts(x, y).unwrap()
}

pub fn random_coordinate<R: Rng>(rng: &mut R, n: usize) -> RealCoordinate {
    RealCoordinate::new(
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    )
    .unwrap()
}

pub fn random_z<R: Rng>(rng: &mut R, n: usize, im_scale: f64) -> CVector {
    CVector::from_iterator(n, (0..n).map(|_| c(rng.gen_range(-0.5..0.5), rng.gen_range(-im_scale..im_scale))))
}

pub fn random_lattice<R: Rng>(rng: &mut R, n: usize, bound: i64) -> LatticePoint {
    LatticePoint::new(
        (0..n).map(|_| rng.gen_range(-bound..=bound)).collect(),
        (0..n).map(|_| rng.gen_range(-bound..=bound)).collect(),
    )
}

/// Lattice points of `Z^2` with Euclidean norm at most `r`.
pub fn small_points_1d(r: f64) -> Vec<LatticePoint> {
    let b = r.floor() as i64;
    let mut out = Vec::new();
    for a in -b..=b {
        for d in -b..=b {
            if ((a * a + d * d) as f64) <= r * r {
                out.push(LatticePoint::new(vec![a], vec![d]));
            }
        }
    }
    out
}
