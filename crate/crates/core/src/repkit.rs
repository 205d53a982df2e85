//! Matrix representations of the three algebras and the `L(λ)` operator.
//!
//! Conventions, fixed once here and relied on everywhere else:
//!
//! - SU(2), spin j: basis |m⟩, m = −j..j ascending. A = J₁, B = −J₂, C = −J₃,
//!   so that C = −i[A,B] holds and ⟨C⟩ > 0 on the low-weight states.
//! - SU(1,1), Bargmann index k > 0: basis |m⟩, m = 0,1,2,… with
//!   K₊|m⟩ = √((m+1)(2k+m)) |m+1⟩ and K₃ = diag(k+m). A = K₁, B = −K₂, C = K₃.
//!   With this choice L = A + iB = K₋.
//! - Canonical pair: Q = (a+a†)/√2, P = (a−a†)/(i√2), [Q,P] = i. A = Q, B = P,
//!   C = 1. The quadratic combinations K₁ = ¼(Q²−P²), K₂ = −¼(QP+PQ),
//!   K₃ = ¼(Q²+P²) close into the SU(1,1) algebra and act on the even Fock
//!   sector as the k = 1/4 discrete series.
//!
//! Truncated representations (SU(1,1), canonical) violate the commutation
//! relations on their last row(s); those rows are recorded in
//! [`Representation::boundary_rows`] so downstream code can require state support
//! away from them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Largest dimension for which dense operator matrices are materialized.
pub const MAX_DENSE_DIM: usize = 4096;

/// Threshold below which an amplitude is treated as zero when fixing the
/// global phase of a [`StateVector`].
pub const PHASE_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum RepError {
    #[error("invalid spin: 2j must be a positive integer (got j = {0})")]
    InvalidSpin(f64),
    #[error("invalid Bargmann index: k must be > 0 (got k = {0})")]
    InvalidBargmannIndex(f64),
    #[error("truncation {got} out of range [{min}, {max}]")]
    TruncationOutOfRange { got: usize, min: usize, max: usize },
    #[error("canonical representation requires an even truncation (got {0})")]
    OddTruncation(usize),
    #[error("state vector has zero or non-finite norm")]
    DegenerateState,
    #[error("non-finite parameter: {0}")]
    NonFinite(&'static str),
}

/// Role tag for an operator matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpLabel {
    A,
    B,
    C,
    L,
    Lplus,
    Lminus,
    Ladder,
    Custom,
}

/// A dense square complex matrix with a role tag.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub label: OpLabel,
    pub entries: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn new(label: OpLabel, entries: DMatrix<C64>) -> Self {
        assert_eq!(entries.nrows(), entries.ncols(), "operator must be square");
        Self { label, entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Largest entrywise deviation from Hermiticity, max |M_ij − conj(M_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d = (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Which algebra a representation realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraKind {
    Su2,
    Su11,
    CanonicalQp,
}

/// Extra operators only some algebras carry.
#[derive(Debug, Clone, Default)]
pub struct RepExtras {
    /// Canonical algebra: the quadratures and oscillator ladder matrix.
    pub q: Option<OperatorMatrix>,
    pub p: Option<OperatorMatrix>,
    pub ladder_a: Option<OperatorMatrix>,
    /// Canonical algebra: the quadratic generators K₁, K₂, K₃.
    pub k1: Option<OperatorMatrix>,
    pub k2: Option<OperatorMatrix>,
    pub k3: Option<OperatorMatrix>,
}

/// The operator triple (A, B, C = −i[A,B]) plus ladder operators and metadata.
#[derive(Debug, Clone)]
pub struct Representation {
    pub kind: AlgebraKind,
    /// Spin (SU(2) only).
    pub j: Option<f64>,
    /// Bargmann index (SU(1,1) only; 1/4 implicitly for the even canonical sector).
    pub k: Option<f64>,
    /// Basis truncation (SU(1,1) / canonical only; SU(2) is exactly finite).
    pub truncation: Option<usize>,
    pub op_a: OperatorMatrix,
    pub op_b: OperatorMatrix,
    pub op_c: OperatorMatrix,
    /// L = A + iB (the lowering combination: J₋, K₋, or √2·a).
    pub lower: OperatorMatrix,
    /// L† = A − iB.
    pub raise: OperatorMatrix,
    pub extras: RepExtras,
    /// Rows on which the commutation relations fail due to truncation.
    pub boundary_rows: Vec<usize>,
}

impl Representation {
    pub fn dim(&self) -> usize {
        self.op_a.dim()
    }

    /// Entrywise max of |[A,B] − iC| restricted to non-boundary rows.
    pub fn commutator_defect_interior(&self) -> f64 {
        let a = &self.op_a.entries;
        let b = &self.op_b.entries;
        let c = &self.op_c.entries;
        let comm = a * b - b * a;
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            if self.boundary_rows.contains(&i) {
                continue;
            }
            for jj in 0..n {
                let d = (comm[(i, jj)] - C64::i() * c[(i, jj)]).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Indices of the even Fock sector (canonical algebra: the k = 1/4 subspace).
    pub fn even_indices(&self) -> Vec<usize> {
        (0..self.dim()).step_by(2).collect()
    }
}

/// A normalized state with a fixed global phase.
///
/// Invariants established by the constructor: Euclidean norm 1 within 1e−12,
/// and the first amplitude with modulus > [`PHASE_EPS`] rotated to the positive
/// real axis, which makes cross-route comparisons and serialized output
/// deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<C64>,
}

impl StateVector {
    pub fn new(mut amps: DVector<C64>) -> Result<Self, RepError> {
        let norm = amps.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(RepError::DegenerateState);
        }
        amps /= C64::new(norm, 0.0);
        if let Some(lead) = amps.iter().find(|a| a.norm() > PHASE_EPS) {
            let phase = lead / lead.norm();
            let rot = phase.conj();
            for a in amps.iter_mut() {
                *a *= rot;
            }
        }
        Ok(Self { amps })
    }

    /// Basis vector e_idx in the given dimension.
    pub fn basis(dim: usize, idx: usize) -> Self {
        let mut amps = DVector::from_element(dim, C64::new(0.0, 0.0));
        amps[idx] = C64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    /// |⟨self|other⟩|² — the standard fidelity between pure states.
    ///
    /// Shorter vectors are compared against the leading block of longer ones,
    /// so states that differ only by trailing (near-zero) truncation padding
    /// still compare as equal.
    pub fn fidelity(&self, other: &Self) -> f64 {
        let n = self.dim().min(other.dim());
        let mut ip = C64::new(0.0, 0.0);
        for i in 0..n {
            ip += self.amps[i].conj() * other.amps[i];
        }
        ip.norm_sqr()
    }

    /// Probability mass carried by the last 10 % of basis indices.
    pub fn tail_mass(&self) -> f64 {
        let start = self.dim() * 9 / 10;
        self.amps.iter().skip(start).map(|a| a.norm_sqr()).sum()
    }
}

fn ensure_finite(x: f64, name: &'static str) -> Result<(), RepError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(RepError::NonFinite(name))
    }
}

/// True if 2j is a positive integer (within floating-point exactness).
fn is_valid_spin(j: f64) -> bool {
    if !j.is_finite() || j < 0.5 {
        return false;
    }
    let twoj = 2.0 * j;
    (twoj - twoj.round()).abs() < 1e-9
}

/// Spin-j representation: J₁, J₂, J₃ in the ascending J₃ eigenbasis, with
/// A = J₁, B = −J₂, C = −J₃.
pub fn build_su2_rep(j: f64) -> Result<Representation, RepError> {
    ensure_finite(j, "j")?;
    if !is_valid_spin(j) {
        return Err(RepError::InvalidSpin(j));
    }
    let dim = (2.0 * j).round() as usize + 1;
    if dim > 10_000 {
        return Err(RepError::TruncationOutOfRange {
            got: dim,
            min: 2,
            max: 10_000,
        });
    }

    let zero = C64::new(0.0, 0.0);
    let mut jp = DMatrix::from_element(dim, dim, zero);
    for n in 0..dim - 1 {
        let m = n as f64 - j;
        // J₊|j,m⟩ = √(j(j+1) − m(m+1)) |j,m+1⟩
        jp[(n + 1, n)] = C64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let jm = jp.adjoint();
    let j1 = (&jp + &jm).scale(0.5);
    let j2 = (&jp - &jm) * C64::new(0.0, -0.5);
    let j3 = DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            C64::new(r as f64 - j, 0.0)
        } else {
            zero
        }
    });

    let op_a = OperatorMatrix::new(OpLabel::A, j1);
    let op_b = OperatorMatrix::new(OpLabel::B, -&j2);
    let op_c = OperatorMatrix::new(OpLabel::C, -&j3);
    // L = A + iB = J₁ − iJ₂ = J₋ here.
    let lower = OperatorMatrix::new(OpLabel::Lminus, &op_a.entries + &op_b.entries * C64::i());
    let raise = OperatorMatrix::new(OpLabel::Lplus, &op_a.entries - &op_b.entries * C64::i());

    Ok(Representation {
        kind: AlgebraKind::Su2,
        j: Some(j),
        k: None,
        truncation: None,
        op_a,
        op_b,
        op_c,
        lower,
        raise,
        extras: RepExtras::default(),
        boundary_rows: Vec::new(),
    })
}

/// Truncated discrete-series representation D⁺(k): K₊|m⟩ = √((m+1)(2k+m))|m+1⟩,
/// K₃ = diag(k+m), with A = K₁, B = −K₂, C = K₃.
pub fn build_su11_rep(k: f64, truncation: usize) -> Result<Representation, RepError> {
    ensure_finite(k, "k")?;
    if k <= 0.0 {
        return Err(RepError::InvalidBargmannIndex(k));
    }
    if !(4..=MAX_DENSE_DIM).contains(&truncation) {
        return Err(RepError::TruncationOutOfRange {
            got: truncation,
            min: 4,
            max: MAX_DENSE_DIM,
        });
    }
    let dim = truncation;
    let zero = C64::new(0.0, 0.0);
    let mut kp = DMatrix::from_element(dim, dim, zero);
    for m in 0..dim - 1 {
        let mf = m as f64;
        kp[(m + 1, m)] = C64::new(((mf + 1.0) * (2.0 * k + mf)).sqrt(), 0.0);
    }
    let km = kp.adjoint();
    let k1 = (&kp + &km).scale(0.5);
    let k2 = (&kp - &km) * C64::new(0.0, -0.5);
    let k3 = DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            C64::new(k + r as f64, 0.0)
        } else {
            zero
        }
    });

    let op_a = OperatorMatrix::new(OpLabel::A, k1);
    let op_b = OperatorMatrix::new(OpLabel::B, -&k2);
    let op_c = OperatorMatrix::new(OpLabel::C, k3);
    // L = A + iB = K₁ − iK₂ = K₋.
    let lower = OperatorMatrix::new(OpLabel::Lminus, &op_a.entries + &op_b.entries * C64::i());
    let raise = OperatorMatrix::new(OpLabel::Lplus, &op_a.entries - &op_b.entries * C64::i());

    Ok(Representation {
        kind: AlgebraKind::Su11,
        j: None,
        k: Some(k),
        truncation: Some(truncation),
        op_a,
        op_b,
        op_c,
        lower,
        raise,
        extras: RepExtras::default(),
        boundary_rows: vec![dim - 1],
    })
}

/// Truncated oscillator realization: quadratures Q, P (A = Q, B = P, C = 1) and
/// the quadratic generators K₁ = ¼(Q²−P²), K₂ = −¼(QP+PQ), K₃ = ¼(Q²+P²),
/// which restrict to the k = 1/4 discrete series on the even Fock sector.
pub fn build_qp_realization(truncation: usize) -> Result<Representation, RepError> {
    if !truncation.is_multiple_of(2) {
        return Err(RepError::OddTruncation(truncation));
    }
    if !(8..=MAX_DENSE_DIM).contains(&truncation) {
        return Err(RepError::TruncationOutOfRange {
            got: truncation,
            min: 8,
            max: MAX_DENSE_DIM,
        });
    }
    let dim = truncation;
    let zero = C64::new(0.0, 0.0);
    let mut a = DMatrix::from_element(dim, dim, zero);
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    let sqrt2_inv = C64::new(1.0 / 2.0f64.sqrt(), 0.0);
    let q = (&a + &adag) * sqrt2_inv;
    let p = (&a - &adag) * sqrt2_inv * C64::new(0.0, -1.0);

    let q2 = &q * &q;
    let p2 = &p * &p;
    let k1 = (&q2 - &p2).scale(0.25);
    let k2 = (&q * &p + &p * &q).scale(-0.25);
    let k3 = (&q2 + &p2).scale(0.25);

    let eye = DMatrix::from_fn(
        dim,
        dim,
        |r, c| if r == c { C64::new(1.0, 0.0) } else { zero },
    );
    let op_a = OperatorMatrix::new(OpLabel::A, q.clone());
    let op_b = OperatorMatrix::new(OpLabel::B, p.clone());
    let op_c = OperatorMatrix::new(OpLabel::C, eye);
    // L = A + iB = Q + iP = √2·a.
    let lower = OperatorMatrix::new(OpLabel::Lminus, &op_a.entries + &op_b.entries * C64::i());
    let raise = OperatorMatrix::new(OpLabel::Lplus, &op_a.entries - &op_b.entries * C64::i());

    Ok(Representation {
        kind: AlgebraKind::CanonicalQp,
        j: None,
        k: Some(0.25),
        truncation: Some(truncation),
        op_a,
        op_b,
        op_c,
        lower,
        raise,
        extras: RepExtras {
            q: Some(OperatorMatrix::new(OpLabel::Custom, q)),
            p: Some(OperatorMatrix::new(OpLabel::Custom, p)),
            ladder_a: Some(OperatorMatrix::new(OpLabel::Ladder, a)),
            k1: Some(OperatorMatrix::new(OpLabel::Custom, k1)),
            k2: Some(OperatorMatrix::new(OpLabel::Custom, k2)),
            k3: Some(OperatorMatrix::new(OpLabel::Custom, k3)),
        },
        boundary_rows: vec![dim - 2, dim - 1],
    })
}

/// The operator L(λ) = λA + iB, equal to uL + vL† with u = (λ+1)/2, v = (λ−1)/2.
pub fn lambda_operator(rep: &Representation, lambda: C64) -> OperatorMatrix {
    let m = &rep.op_a.entries * lambda + &rep.op_b.entries * C64::i();
    OperatorMatrix::new(OpLabel::L, m)
}

/// The coefficients (u, v) of L(λ) = uL + vL†.
pub fn uv_coefficients(lambda: C64) -> (C64, C64) {
    let one = C64::new(1.0, 0.0);
    ((lambda + one) * 0.5, (lambda - one) * 0.5)
}
