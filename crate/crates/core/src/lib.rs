//! Numerical toolkit for *generalized intelligent states* (GIS): the states that
//! saturate the Robertson–Schrödinger uncertainty relation
//!
//! ```text
//!     σ_A² σ_B² ≥ ¼ (⟨C⟩² + 4 σ_AB²),        C = −i[A, B],
//! ```
//!
//! for the observable pairs of three algebras — SU(2) spin operators, the SU(1,1)
//! discrete series D⁺(k), and the canonical pair (Q, P). A GIS is exactly an
//! eigenstate of the non-Hermitian combination `L(λ) = λA + iB`; everything in this
//! crate either constructs such eigenstates, computes their moments, or
//! cross-checks a closed-form claim about them against independent matrix numerics.
//!
//! Module map:
//! - [`repkit`] — finite / truncated matrix representations and `L(λ)` assembly.
//! - [`special`] — confluent hypergeometric series `₁F₁`, `₀F₁` with error bounds.
//! - [`states`] — GIS solvers (recurrence and closed-form routes) plus the
//!   Perelomov, Bloch, and Barut–Girardello coherent-state families.
//! - [`moments`] — moment reports, uncertainty-relation sides, squeezing
//!   parameters, and the closed-form moment predictions.
//! - [`verify`] — executable probes: non-normalizability at Re λ ≤ 0, eigenvalue
//!   multiplicity, the coherent-state embedding constraint, quadrature squeezing
//!   scans in the k = 1/4 oscillator realization.
//! - [`sweep`] — deterministic grid sweeps and CSV/JSON serialization.

pub mod moments;
pub mod repkit;
pub mod special;
pub mod states;
pub mod sweep;
pub mod verify;

pub(crate) mod linalg;

pub use num_complex::Complex64 as C64;
