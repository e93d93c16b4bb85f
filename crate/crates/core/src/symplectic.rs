//! Exact arithmetic in `Sp(2n, Z)` and its three actions: on the Siegel space,
//! on complex coordinates and on real coordinates.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::LatticePoint;
use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::par;
use crate::siegel::{CMatrix, CVector, RealCoordinate, SiegelPoint};

/// Condition number of `CT + D` above which the action logs a warning.
pub const CONDITION_WARNING: f64 = 1e12;

/// Default tolerance for `|g.T - T|` in the stabilizer search.
pub const DEFAULT_STABILIZER_TOL: f64 = 1e-10;

fn standard_form(n: usize) -> IntMatrix {
    let z = IntMatrix::zeros(n, n);
    let i = IntMatrix::identity(n);
    let minus_i = i.checked_neg().expect("negating the identity");
    IntMatrix::from_blocks(&z, &minus_i, &i, &z).expect("square blocks")
}

/// True iff `m^t J m = J` exactly. Errors on non-square or odd-sided input.
pub fn is_symplectic(m: &IntMatrix) -> Result<bool> {
    if !m.is_square() || !m.rows().is_multiple_of(2) || m.rows() == 0 {
        return Err(Error::Dimension(format!("expected a square matrix of even side, got {}x{}", m.rows(), m.cols())));
    }
    let j = standard_form(m.rows() / 2);
    Ok(m.transpose().checked_mul(&j)?.checked_mul(m)? == j)
}

/// An element of `Sp(2n, Z)` with block form `(A, B; C, D)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymplecticMatrix {
    n: usize,
    m: IntMatrix,
}

impl std::fmt::Debug for SymplecticMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.m.fmt(f)
    }
}

impl SymplecticMatrix {
    pub fn new(m: IntMatrix) -> Result<Self> {
        if !is_symplectic(&m)? {
            return Err(Error::NotSymplectic);
        }
        Ok(Self { n: m.rows() / 2, m })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self { n, m: IntMatrix::identity(2 * n) }
    }

    pub fn minus_identity(n: usize) -> Self {
        Self { n, m: IntMatrix::identity(2 * n).checked_neg().expect("small entries") }
    }

    /// `J = (0, -I; I, 0)`.
    pub fn flip(n: usize) -> Self {
        Self { n, m: standard_form(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.m
    }

    pub fn a(&self) -> IntMatrix {
        self.m.block(0, 0, self.n)
    }

    pub fn b(&self) -> IntMatrix {
        self.m.block(0, self.n, self.n)
    }

    pub fn c(&self) -> IntMatrix {
        self.m.block(self.n, 0, self.n)
    }

    pub fn d(&self) -> IntMatrix {
        self.m.block(self.n, self.n, self.n)
    }

    pub fn is_identity(&self) -> bool {
        self.m == IntMatrix::identity(2 * self.n)
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::Dimension("group elements of different size".into()));
        }
        Ok(Self { n: self.n, m: self.m.checked_mul(&rhs.m)? })
    }

    /// `g^{-1} = -J g^t J`.
    pub fn inverse(&self) -> Self {
        let j = standard_form(self.n);
        let m = j
            .checked_mul(&self.m.transpose())
            .and_then(|p| p.checked_mul(&j))
            .and_then(|p| p.checked_neg())
            .expect("inverse entries are entries of g");
        Self { n: self.n, m }
    }

    /// `g^{-t}`, the matrix of the action on real coordinates.
    pub fn inverse_transpose(&self) -> IntMatrix {
        self.inverse().m.transpose()
    }

    /// Order of the element, if it is at most `max`.
    pub fn order(&self, max: usize) -> Option<usize> {
        let mut p = self.clone();
        for k in 1..=max {
            if p.is_identity() {
                return Some(k);
            }
            p = p.mul(self).ok()?;
        }
        None
    }

    /// Membership in the theta group: `A B^t` and `C D^t` have even diagonals.
    /// The classical theta function obeys the modular law exactly on this subgroup.
    pub fn is_theta_group(&self) -> bool {
        let even_diag = |m: &IntMatrix| (0..self.n).all(|i| m.get(i, i) % 2 == 0);
        let ab = self.a().checked_mul(&self.b().transpose());
        let cd = self.c().checked_mul(&self.d().transpose());
        matches!((&ab, &cd), (Ok(ab), Ok(cd)) if even_diag(ab) && even_diag(cd))
    }

    fn cocycle_matrix(&self, t: &SiegelPoint) -> Result<CMatrix> {
        if t.dim() != self.n {
            return Err(Error::Dimension(format!(
                "group element of size {} acting on a point of dimension {}",
                self.n,
                t.dim()
            )));
        }
        Ok(self.c().to_complex() * t.matrix() + self.d().to_complex())
    }

    /// `g.T = (AT + B)(CT + D)^{-1}`.
    pub fn act_siegel(&self, t: &SiegelPoint) -> Result<SiegelPoint> {
        let m = self.cocycle_matrix(t)?;
        let svd = m.clone().svd(false, false);
        let smin = svd.singular_values.min();
        if smin == 0.0 {
            return Err(Error::Singular("CT + D"));
        }
        let cond = svd.singular_values.max() / smin;
        if cond > CONDITION_WARNING {
            log::warn!("CT + D is ill-conditioned (condition number {cond:e})");
        }
        let num = self.a().to_complex() * t.matrix() + self.b().to_complex();
        // X M = N  <=>  M^t X^t = N^t
        let xt = m.transpose().lu().solve(&num.transpose()).ok_or(Error::Singular("CT + D"))?;
        SiegelPoint::new(xt.transpose())
    }

    /// `g.z = (CT + D)^{-t} z`.
    pub fn act_coord(&self, z: &CVector, t: &SiegelPoint) -> Result<CVector> {
        let m = self.cocycle_matrix(t)?;
        if z.len() != self.n {
            return Err(Error::Dimension("coordinate length".into()));
        }
        m.transpose().lu().solve(z).ok_or(Error::Singular("CT + D"))
    }

    /// `g.x = g^{-t} (x1; x2)`.
    pub fn act_real(&self, x: &RealCoordinate) -> Result<RealCoordinate> {
        if x.dim() != self.n {
            return Err(Error::Dimension("coordinate length".into()));
        }
        RealCoordinate::from_stacked(&self.inverse_transpose().mul_vec_f64(&x.stacked()))
    }

    /// The real action restricted to the integer lattice; exact.
    pub fn act_lattice(&self, w: &LatticePoint) -> Result<LatticePoint> {
        if w.dim() != self.n {
            return Err(Error::Dimension("lattice point length".into()));
        }
        LatticePoint::from_stacked(&self.inverse_transpose().mul_vec_i64(&w.stacked())?)
    }
}

impl IntMatrix {
    pub(crate) fn to_complex(&self) -> CMatrix {
        CMatrix::from_fn(self.rows(), self.cols(), |i, j| num_complex::Complex64::new(self.get(i, j) as f64, 0.0))
    }
}

impl Serialize for SymplecticMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.m.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymplecticMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Self::new(IntMatrix::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// The three generator families of `Sp(2n, Z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `(A, 0; 0, A^{-t})` with `A` in `GL(n, Z)`.
    Linear(IntMatrix),
    /// `(I, B; 0, I)` with `B` symmetric.
    Shear(IntMatrix),
    /// `J = (0, -I; I, 0)`.
    Flip,
    /// `J^{-1} = -J`.
    FlipInverse,
}

pub fn generator(n: usize, kind: &Generator) -> Result<SymplecticMatrix> {
    let check = |p: &IntMatrix| {
        if p.rows() != n || p.cols() != n {
            Err(Error::Dimension(format!("parameter must be {n}x{n}")))
        } else {
            Ok(())
        }
    };
    let z = IntMatrix::zeros(n, n);
    let i = IntMatrix::identity(n);
    let m = match kind {
        Generator::Linear(a) => {
            check(a)?;
            let a_inv_t = a.unimodular_inverse()?.transpose();
            IntMatrix::from_blocks(a, &z, &z, &a_inv_t)?
        }
        Generator::Shear(b) => {
            check(b)?;
            if !b.is_symmetric() {
                return Err(Error::NotSymmetric);
            }
            IntMatrix::from_blocks(&i, b, &z, &i)?
        }
        Generator::Flip => return Ok(SymplecticMatrix::flip(n)),
        Generator::FlipInverse => return Ok(SymplecticMatrix::flip(n).inverse()),
    };
    SymplecticMatrix::new(m)
}

/// A product of generators, evaluated left to right.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupWord {
    pub n: usize,
    pub letters: Vec<Generator>,
}

impl GroupWord {
    pub fn evaluate(&self) -> Result<SymplecticMatrix> {
        self.letters
            .iter()
            .try_fold(SymplecticMatrix::identity(self.n), |acc, letter| acc.mul(&generator(self.n, letter)?))
    }
}

/// A finite generating alphabet.
#[derive(Clone, Debug)]
pub struct Alphabet {
    n: usize,
    letters: Vec<Generator>,
    matrices: Vec<SymplecticMatrix>,
}

fn unit_matrix(n: usize, entries: &[(usize, usize, i64)]) -> IntMatrix {
    let mut m = IntMatrix::zeros(n, n);
    for &(i, j, v) in entries {
        m.set(i, j, v);
    }
    m
}

impl Alphabet {
    pub fn new(n: usize, letters: Vec<Generator>) -> Result<Self> {
        let matrices = letters.iter().map(|l| generator(n, l)).collect::<Result<Vec<_>>>()?;
        Ok(Self { n, letters, matrices })
    }

    /// Small generators of every family, closed under inverses, including `-I`.
    pub fn standard(n: usize) -> Self {
        Self::with_shear_diagonal(n, 1)
    }

    /// Generators of the theta group: like [`Alphabet::standard`] but shears
    /// have even diagonal.
    pub fn theta_group(n: usize) -> Self {
        Self::with_shear_diagonal(n, 2)
    }

    fn with_shear_diagonal(n: usize, diag: i64) -> Self {
        let mut letters = Vec::new();
        let minus_i = IntMatrix::identity(n).checked_neg().expect("small");
        letters.push(Generator::Linear(minus_i));
        for i in 0..n {
            if n > 1 {
                let mut flip_sign = IntMatrix::identity(n);
                flip_sign.set(i, i, -1);
                letters.push(Generator::Linear(flip_sign));
            }
            for j in 0..n {
                if i != j {
                    for v in [1, -1] {
                        let mut e = IntMatrix::identity(n);
                        e.set(i, j, v);
                        letters.push(Generator::Linear(e));
                    }
                }
            }
        }
        if n > 1 {
            // adjacent transpositions
            for i in 0..n - 1 {
                let mut p = IntMatrix::identity(n);
                p.set(i, i, 0);
                p.set(i + 1, i + 1, 0);
                p.set(i, i + 1, 1);
                p.set(i + 1, i, 1);
                letters.push(Generator::Linear(p));
            }
        }
        for i in 0..n {
            for v in [diag, -diag] {
                letters.push(Generator::Shear(unit_matrix(n, &[(i, i, v)])));
            }
            for j in i + 1..n {
                for v in [1, -1] {
                    letters.push(Generator::Shear(unit_matrix(n, &[(i, j, v), (j, i, v)])));
                }
            }
        }
        letters.push(Generator::Flip);
        letters.push(Generator::FlipInverse);
        Self::new(n, letters).expect("standard generators are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    pub fn matrices(&self) -> &[SymplecticMatrix] {
        &self.matrices
    }

    /// A uniformly random word with length in `1..=max_len`.
    pub fn random_word<R: Rng + ?Sized>(&self, rng: &mut R, max_len: usize) -> GroupWord {
        let len = rng.gen_range(1..=max_len.max(1));
        let letters = (0..len).map(|_| self.letters[rng.gen_range(0..self.letters.len())].clone()).collect();
        GroupWord { n: self.n, letters }
    }

    /// All distinct elements expressible as words of length at most `max_len`,
    /// sorted. The identity is the empty word.
    pub fn elements_up_to(&self, max_len: usize) -> Result<Vec<SymplecticMatrix>> {
        let mut seen: HashSet<SymplecticMatrix> = HashSet::new();
        let identity = SymplecticMatrix::identity(self.n);
        seen.insert(identity.clone());
        let mut frontier = vec![identity];
        for _ in 0..max_len {
            let products =
                par::map_slice(&frontier, |g| self.matrices.iter().map(|s| g.mul(s)).collect::<Result<Vec<_>>>());
            let mut next = Vec::new();
            for batch in products {
                for h in batch? {
                    if seen.insert(h.clone()) {
                        next.push(h);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        let mut all: Vec<_> = seen.into_iter().collect();
        all.sort();
        Ok(all)
    }
}

/// Distinct elements among generator words of length `<= max_word_length`
/// whose action fixes `t` to within `tol`. Always contains `I` and `-I`.
pub fn stabilizer_search(t: &SiegelPoint, max_word_length: usize, tol: f64) -> Result<Vec<SymplecticMatrix>> {
    let alphabet = Alphabet::standard(t.dim());
    let candidates = alphabet.elements_up_to(max_word_length.max(1))?;
    let fixed = par::map_slice(&candidates, |g| match g.act_siegel(t) {
        Ok(gt) => gt.distance(t) < tol,
        Err(_) => false,
    });
    Ok(candidates.into_iter().zip(fixed).filter_map(|(g, keep)| keep.then_some(g)).collect())
}

/// Whether a finite list is closed under multiplication (hence a group).
pub fn is_closed(elements: &[SymplecticMatrix]) -> bool {
    let set: HashSet<&SymplecticMatrix> = elements.iter().collect();
    elements.iter().all(|g| elements.iter().all(|h| g.mul(h).map(|p| set.contains(&p)).unwrap_or(false)))
}

pub fn is_abelian(elements: &[SymplecticMatrix]) -> bool {
    elements.iter().all(|g| elements.iter().all(|h| g.mul(h).ok() == h.mul(g).ok()))
}
