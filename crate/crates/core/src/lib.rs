//! Band structure of a two-dimensional charged particle in a homogeneous
//! magnetic field perturbed by a potential obstacle `V(x, y) = v(x)`.
//!
//! In the Landau gauge the Hamiltonian decomposes into one-dimensional
//! fiber operators `-∂²ₓ + B²x² + v(x - p/B)` labelled by the momentum `p`
//! along the obstacle. Each fiber has a simple discrete spectrum
//! `ε_0(p) < ε_1(p) < …`; the curves `p ↦ ε_n(p)` are the dispersion curves
//! and their ranges are the spectral bands.
//!
//! * [`potentials`]: obstacle profiles and their analytic metadata.
//! * [`eigensolver`]: Sturm bisection and inverse iteration for tridiagonal matrices.
//! * [`fiber`]: discretized fiber operator with adaptive refinement.
//! * [`dispersion`]: momentum and coupling sweeps, band widths, gaps,
//!   Feynman–Hellmann derivatives and the property checks built on them.
//! * [`oracles`]: closed-form and dense reference solutions.
//! * [`cli`]: configuration format, output files and named checks.

pub mod cli;
pub mod dispersion;
pub mod eigensolver;
mod error;
pub mod fiber;
pub mod oracles;
pub mod potentials;

pub use dispersion::{BandStructure, Gap, SweepConfig};
pub use eigensolver::TridiagonalMatrix;
pub use error::{Error, Result};
pub use fiber::{FiberEigenpairs, FieldConfig, Grid};
pub use potentials::{Outside, PotentialSpec, SignClass};
