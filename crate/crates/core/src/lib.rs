//! Symplectic symmetry of classical and quantum tori.
//!
//! * [`symplectic`]: exact `Sp(2n, Z)` arithmetic, its actions and stabilizers.
//! * [`siegel`]: the Siegel upper half space and the Hermitian form `H_T`.
//! * [`theta`]: classical theta functions, the modular law and the invariant theta.
//! * [`algebra`]: the noncommutative torus, quantum theta and the crossed product.
//! * [`fock`]: the model II module, its operators and consistency checks.
//!
//! Lattice sums and quadratures run on rayon when the `parallel` feature is
//! enabled (the default); reductions use a fixed tree order either way.

pub mod algebra;
pub mod error;
pub mod fock;
pub mod intmat;
pub mod lattice;
pub mod par;
pub mod siegel;
pub mod symplectic;
pub mod theta;

pub use algebra::{AlgebraElement, AlgebraSection, CrossedElement, LatticePoint};
pub use error::{Error, Result};
pub use fock::{QuadratureGrid, ResidualReport, TestFunction};
pub use intmat::IntMatrix;
pub use lattice::TruncationParams;
pub use num_complex::Complex64;
pub use siegel::{RealCoordinate, SiegelPoint};
pub use symplectic::{Alphabet, Generator, GroupWord, SymplecticMatrix};
