//! State constructors: GIS solvers for the three algebras plus the classical
//! coherent-state families (Perelomov, Bloch, Barut–Girardello) and the
//! Hermitian-limit eigenstates.
//!
//! The SU(1,1) GIS |z,λ⟩ solves (uK₋ + vK₊)ψ = zψ with u = (λ+1)/2,
//! v = (λ−1)/2. Two independent numerical routes are provided:
//!
//! 1. [`solve_su11_gis`] — the forward three-term recurrence on Fock amplitudes
//!    c_{m+1} = [z·c_m − v·√(m(2k+m−1))·c_{m−1}] / [u·√((m+1)(2k+m))],
//!    with adaptive truncation. Both characteristic roots of this recurrence
//!    have modulus √|v/u| < 1 whenever Re λ > 0, so forward evaluation is
//!    stable and the amplitude tail decays geometrically.
//! 2. [`su11_gis_analytic`] — the closed-form route. In the Bargmann picture
//!    the eigenfunction is exp(cz)·₁F₁(a, 2k; −2cz) with c² = −v/u and
//!    a = k − z/(2uc); its m-th monomial coefficient φ_m maps to the Fock
//!    amplitude φ_m·√(m!(2k)_m). Summing that coefficient family term by term
//!    in f64 loses ≈ 1.585·m bits to cancellation, so the amplitudes are
//!    evaluated through the algebraically identical generating function
//!    (1+cη)^(w−k)·(1−cη)^(−w−k), w = z/(2uc) — the classical identity
//!    Σ_m (b)_m/m!·₂F₁(−m,a;b;2)·tᵐ = (1−t)^(a−b)(1+t)^(−a) — whose two
//!    binomial factors have algebraically decaying coefficients and convolve
//!    without cancellation. The two branches of c = ±√(−v/u) produce the same
//!    function (swap the factors and w → −w), so the apparent sign choice does
//!    not split the eigenspace.
//!
//! All constructed states are normalized with the global phase fixed by
//! [`StateVector::new`], making cross-route fidelities and serialized output
//! deterministic.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg;
use crate::repkit::{
    lambda_operator, uv_coefficients, AlgebraKind, RepError, Representation, StateVector,
};
use crate::special::{ln_pochhammer, SpecialError};

/// Starting dimension for adaptive truncation.
pub const ADAPTIVE_START: usize = 128;
/// Hard cap for adaptive truncation.
pub const ADAPTIVE_CAP: usize = 8192;
/// Acceptance gate on the eigen-equation residual ‖L(λ)ψ − zψ‖.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Acceptance gate on the probability mass in the last 10 % of the basis.
pub const TAIL_TOL: f64 = 1e-10;
/// Tail gate for coherent-state constructors (tighter: closed forms are cheap).
pub const CS_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum StatesError {
    #[error("representation is {got:?}, operation requires {expected:?}")]
    WrongAlgebra {
        expected: AlgebraKind,
        got: AlgebraKind,
    },
    #[error("Re λ must be positive for normalizable eigenstates (λ = {0})")]
    PreconditionReLambda(C64),
    #[error("no normalizable eigenstate: tail mass {tail:.3e} at truncation {truncation}")]
    NonNormalizable { truncation: usize, tail: f64 },
    #[error("coherent-state parameter must satisfy |ζ| < 1 (got {0})")]
    OutsideDisk(C64),
    #[error("adaptive truncation cap {cap} exceeded (tail {tail:.3e}, residual {residual:.3e})")]
    TruncationCap {
        cap: usize,
        tail: f64,
        residual: f64,
    },
    #[error("closed-form amplitudes do not solve the eigen-equation (residual {residual:.3e})")]
    BranchMismatch { residual: f64 },
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// The (λ, z) pair selecting a GIS within a representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GisSpec {
    pub lambda: C64,
    pub z: C64,
}

/// A solved GIS with its numerical certificate.
#[derive(Debug, Clone)]
pub struct GisSolution {
    pub spec: GisSpec,
    pub state: StateVector,
    /// ‖L(λ)ψ − zψ‖ at the final truncation.
    pub residual: f64,
    /// Probability mass in the last 10 % of basis indices.
    pub tail_mass: f64,
}

/// Full eigensystem of L(λ) on a spin-j representation.
#[derive(Debug, Clone)]
pub struct Su2GisSpectrum {
    /// (z_N, eigenvector), sorted so z_N = (j−N)·√(λ²−1) for N = 0..2j.
    pub pairs: Vec<(C64, StateVector)>,
    /// True at λ = ±1 where L(λ) is a Jordan block with the single true
    /// eigenvector returned (geometric multiplicity 1 instead of 2j+1).
    pub defective: bool,
}

/// Ladder weight of the discrete series: (K₊ψ)_m = s(m)·ψ_{m−1} with
/// s(m) = √(m(2k+m−1)), and (K₋ψ)_m = s(m+1)·ψ_{m+1}.
#[inline]
pub(crate) fn su11_ladder(k: f64) -> impl Fn(usize) -> f64 + Copy {
    move |m: usize| {
        let mf = m as f64;
        (mf * (2.0 * k + mf - 1.0)).sqrt()
    }
}

/// Ladder weight of L = Q + iP = √2·a: s(m) = √(2m).
#[inline]
pub(crate) fn canonical_ladder() -> impl Fn(usize) -> f64 + Copy {
    |m: usize| (2.0 * m as f64).sqrt()
}

/// Forward three-term recurrence for (uL + vL†)ψ = zψ on a ladder with weights
/// s; returns the unnormalized amplitude chain from c₀ = 1.
pub(crate) fn gis_recurrence<S: Fn(usize) -> f64>(
    s: S,
    u: C64,
    v: C64,
    z: C64,
    dim: usize,
) -> Vec<C64> {
    let mut c = vec![C64::new(0.0, 0.0); dim];
    c[0] = C64::new(1.0, 0.0);
    if dim > 1 {
        c[1] = z / (u * s(1));
    }
    for m in 1..dim - 1 {
        c[m + 1] = (z * c[m] - v * s(m) * c[m - 1]) / (u * s(m + 1));
    }
    c
}

/// ‖(uL + vL†)ψ − zψ‖ for a normalized amplitude vector, with the basis cut at
/// ψ_dim = 0 — exactly the action of the truncated matrix, in O(dim).
pub(crate) fn band_residual<S: Fn(usize) -> f64>(
    s: S,
    u: C64,
    v: C64,
    z: C64,
    amps: &[C64],
) -> f64 {
    let dim = amps.len();
    let mut acc = 0.0f64;
    for m in 0..dim {
        let up = if m + 1 < dim {
            u * s(m + 1) * amps[m + 1]
        } else {
            C64::new(0.0, 0.0)
        };
        let down = if m > 0 {
            v * s(m) * amps[m - 1]
        } else {
            C64::new(0.0, 0.0)
        };
        acc += (up + down - z * amps[m]).norm_sqr();
    }
    acc.sqrt()
}

fn normalized(mut amps: Vec<C64>) -> Result<Vec<C64>, StatesError> {
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(StatesError::Rep(RepError::DegenerateState));
    }
    for a in amps.iter_mut() {
        *a /= norm;
    }
    Ok(amps)
}

fn tail_of(amps: &[C64]) -> f64 {
    let start = amps.len() * 9 / 10;
    amps[start..].iter().map(|a| a.norm_sqr()).sum()
}

/// All eigenpairs of L(λ) = λJ₁ − iJ₂ on a spin-j representation.
///
/// For λ ≠ ±1 the spectrum is {(j−N)·√(λ²−1)}, N = 0..2j, and the pairs are
/// returned in that N-order. At the defective points λ = ±1 the operator is a
/// Jordan block; the single true eigenvector (eigenvalue 0) is extracted from
/// the numerical nullspace and flagged.
pub fn solve_su2_gis(rep: &Representation, lambda: C64) -> Result<Su2GisSpectrum, StatesError> {
    if rep.kind != AlgebraKind::Su2 {
        return Err(StatesError::WrongAlgebra {
            expected: AlgebraKind::Su2,
            got: rep.kind,
        });
    }
    let l = lambda_operator(rep, lambda);
    let one = C64::new(1.0, 0.0);
    let defective = (lambda - one).norm() < 1e-12 || (lambda + one).norm() < 1e-12;
    if defective {
        let vec = linalg::nullspace_vector(&l.entries);
        let state = StateVector::new(vec)?;
        return Ok(Su2GisSpectrum {
            pairs: vec![(C64::new(0.0, 0.0), state)],
            defective: true,
        });
    }
    let tau = (lambda * lambda - one).sqrt();
    let (vals, vecs) = linalg::eigen(&l.entries);
    let mut pairs: Vec<(C64, StateVector)> = vals
        .iter()
        .enumerate()
        .map(|(i, &z)| Ok((z, StateVector::new(vecs.column(i).into_owned())?)))
        .collect::<Result<_, StatesError>>()?;
    // z_N/τ = j − N is real; descending order in Re(z/τ) is ascending in N.
    pairs.sort_by(|a, b| {
        let ka = (a.0 / tau).re;
        let kb = (b.0 / tau).re;
        kb.partial_cmp(&ka).unwrap()
    });
    Ok(Su2GisSpectrum {
        pairs,
        defective: false,
    })
}

/// SU(1,1) GIS via the forward amplitude recurrence with adaptive truncation.
///
/// Starts at max(rep.truncation, [`ADAPTIVE_START`]) and doubles until both
/// the tail mass and the eigen-equation residual pass their gates, failing
/// with [`StatesError::NonNormalizable`] at the cap — which is the expected
/// outcome whenever the state does not exist in the Hilbert space.
pub fn solve_su11_gis(
    rep: &Representation,
    lambda: C64,
    z: C64,
) -> Result<GisSolution, StatesError> {
    if rep.kind != AlgebraKind::Su11 {
        return Err(StatesError::WrongAlgebra {
            expected: AlgebraKind::Su11,
            got: rep.kind,
        });
    }
    let k = rep.k.expect("SU(1,1) representation carries k");
    solve_ladder_gis(
        su11_ladder(k),
        rep.truncation.unwrap_or(ADAPTIVE_START),
        lambda,
        z,
    )
}

/// Canonical-pair GIS (eigenstates of λQ + iP): same recurrence machinery on
/// the oscillator ladder. These are the displaced squeezed states.
pub fn solve_canonical_gis(
    rep: &Representation,
    lambda: C64,
    z: C64,
) -> Result<GisSolution, StatesError> {
    if rep.kind != AlgebraKind::CanonicalQp {
        return Err(StatesError::WrongAlgebra {
            expected: AlgebraKind::CanonicalQp,
            got: rep.kind,
        });
    }
    solve_ladder_gis(
        canonical_ladder(),
        rep.truncation.unwrap_or(ADAPTIVE_START),
        lambda,
        z,
    )
}

fn solve_ladder_gis<S: Fn(usize) -> f64 + Copy>(
    s: S,
    start_truncation: usize,
    lambda: C64,
    z: C64,
) -> Result<GisSolution, StatesError> {
    if lambda.re <= 0.0 {
        return Err(StatesError::PreconditionReLambda(lambda));
    }
    let (u, v) = uv_coefficients(lambda);
    let mut dim = start_truncation.max(ADAPTIVE_START);
    loop {
        let amps = normalized(gis_recurrence(s, u, v, z, dim))?;
        let tail = tail_of(&amps);
        let residual = band_residual(s, u, v, z, &amps);
        if tail < TAIL_TOL && residual < RESIDUAL_TOL {
            let state = StateVector::new(DVector::from_vec(amps))?;
            return Ok(GisSolution {
                spec: GisSpec { lambda, z },
                state,
                residual,
                tail_mass: tail,
            });
        }
        if dim >= ADAPTIVE_CAP {
            return Err(StatesError::NonNormalizable {
                truncation: dim,
                tail,
            });
        }
        dim = (dim * 2).min(ADAPTIVE_CAP);
    }
}

/// Barut–Girardello amplitude chain zᵐ/√(m!(2k)_m), unnormalized.
pub(crate) fn bg_raw_amps(k: f64, z: C64, dim: usize) -> Vec<C64> {
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    amps[0] = C64::new(1.0, 0.0);
    for m in 1..dim {
        let mf = m as f64;
        amps[m] = amps[m - 1] * z / (mf * (2.0 * k + mf - 1.0)).sqrt();
    }
    amps
}

/// Perelomov amplitude chain (1−|ζ|²)^k·ζᵐ·√((2k)_m/m!), including the
/// normalizing prefactor.
pub(crate) fn perelomov_raw_amps(k: f64, zeta: C64, dim: usize) -> Vec<C64> {
    let pref = (1.0 - zeta.norm_sqr()).powf(k);
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    amps[0] = C64::new(pref, 0.0);
    for m in 1..dim {
        let mf = m as f64;
        amps[m] = amps[m - 1] * zeta * ((2.0 * k + mf - 1.0) / mf).sqrt();
    }
    amps
}

/// SU(1,1) GIS through the closed-form coefficient map (see the module docs
/// for the exact evaluation strategy). At λ = 1 the parameter c vanishes and
/// the construction degenerates to the Barut–Girardello amplitudes.
pub fn su11_gis_analytic(
    k: f64,
    lambda: C64,
    z: C64,
    truncation: usize,
) -> Result<StateVector, StatesError> {
    if k <= 0.0 || !k.is_finite() {
        return Err(StatesError::Rep(RepError::InvalidBargmannIndex(k)));
    }
    if lambda.re <= 0.0 {
        return Err(StatesError::PreconditionReLambda(lambda));
    }
    analytic_with_branch(k, lambda, z, truncation, false)
}

/// Branch-explicit version of the analytic route: `flip` selects −c instead of
/// the principal square root c = √(−v/u). Both branches are mathematically the
/// same state; this knob exists so tests can demonstrate it.
pub(crate) fn analytic_with_branch(
    k: f64,
    lambda: C64,
    z: C64,
    truncation: usize,
    flip: bool,
) -> Result<StateVector, StatesError> {
    let (u, v) = uv_coefficients(lambda);
    let mut c = (-v / u).sqrt();
    if flip {
        c = -c;
    }
    let dim = truncation.max(4);
    if c.norm() < 1e-12 {
        // λ → 1 limit: eigenstates of K₋ alone, amplitudes ∝ zᵐ/√(m!(2k)_m).
        let amps = normalized(bg_raw_amps(k, z, dim))?;
        return Ok(StateVector::new(DVector::from_vec(amps))?);
    }
    let w = z / (2.0 * u * c);

    // Coefficients of (1+cη)^(w−k): p_{n+1} = p_n·(w−k−n)/(n+1)·c,
    // and of (1−cη)^(−w−k):        q_{n+1} = q_n·(−w−k−n)/(n+1)·(−c).
    let mut p = vec![C64::new(0.0, 0.0); dim];
    let mut q = vec![C64::new(0.0, 0.0); dim];
    p[0] = C64::new(1.0, 0.0);
    q[0] = C64::new(1.0, 0.0);
    for n in 0..dim - 1 {
        let nf = n as f64;
        p[n + 1] = p[n] * (w - k - nf) / (nf + 1.0) * c;
        q[n + 1] = q[n] * (-w - k - nf) / (nf + 1.0) * (-c);
    }
    // φ_m = Σ p_n q_{m−n}, then the Fock scaling √(m!/(2k)_m) — the product of
    // the monomial-coefficient map with the basis normalization.
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    let mut ln_scale = 0.0f64;
    for m in 0..dim {
        if m > 0 {
            let mf = m as f64;
            ln_scale += 0.5 * (mf.ln() - (2.0 * k + mf - 1.0).ln());
        }
        let mut phi = C64::new(0.0, 0.0);
        for n in 0..=m {
            phi += p[n] * q[m - n];
        }
        amps[m] = phi * ln_scale.exp();
    }
    let amps = normalized(amps)?;

    // Consistency guard: once the window holds the state, the amplitudes must
    // solve the eigen-equation; a large residual means the coefficient map (or
    // a branch convention) is broken, not that truncation is short.
    let tail = tail_of(&amps);
    if tail < 1e-8 {
        let residual = band_residual(su11_ladder(k), u, v, z, &amps);
        if residual > 1e-6 * (1.0 + z.norm()) {
            return Err(StatesError::BranchMismatch { residual });
        }
    }
    Ok(StateVector::new(DVector::from_vec(amps))?)
}

/// Perelomov coherent state |ζ;k⟩ = (1−|ζ|²)^k exp(ζK₊)|k;k⟩ on the unit disk,
/// with adaptive truncation to tail mass < 1e−12.
pub fn perelomov_cs(k: f64, zeta: C64, truncation: usize) -> Result<StateVector, StatesError> {
    if k <= 0.0 || !k.is_finite() {
        return Err(StatesError::Rep(RepError::InvalidBargmannIndex(k)));
    }
    if zeta.norm() >= 1.0 || !zeta.norm().is_finite() {
        return Err(StatesError::OutsideDisk(zeta));
    }
    let mut dim = truncation.max(4);
    loop {
        let amps = normalized(perelomov_raw_amps(k, zeta, dim))?;
        let tail = tail_of(&amps);
        if tail < CS_TAIL_TOL {
            return Ok(StateVector::new(DVector::from_vec(amps))?);
        }
        if dim >= ADAPTIVE_CAP {
            return Err(StatesError::TruncationCap {
                cap: ADAPTIVE_CAP,
                tail,
                residual: 0.0,
            });
        }
        dim = (dim * 2).min(ADAPTIVE_CAP);
    }
}

/// Bloch (spin) coherent state |τ;−j⟩ = (1+|τ|²)^{−j} exp(τJ₊)|−j⟩ in the
/// ascending J₃ basis. Exact in dimension 2j+1 for any finite τ.
pub fn bloch_cs(j: f64, tau: C64) -> Result<StateVector, StatesError> {
    if !tau.re.is_finite() || !tau.im.is_finite() {
        return Err(StatesError::Rep(RepError::NonFinite("tau")));
    }
    let twoj = 2.0 * j;
    if !(j.is_finite() && j >= 0.5 && (twoj - twoj.round()).abs() < 1e-9) {
        return Err(StatesError::Rep(RepError::InvalidSpin(j)));
    }
    let dim = twoj.round() as usize + 1;
    let ln_pref = -j * tau.norm_sqr().ln_1p();
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for (n, amp) in amps.iter_mut().enumerate() {
        // c_N = pref · τᴺ · √binom(2j, N), carried in log scale for large j
        let ln_binom = ln_pochhammer(twoj - n as f64 + 1.0, n) - ln_pochhammer(1.0, n);
        let ln_mag = ln_pref + 0.5 * ln_binom + (n as f64) * tau.norm().max(f64::MIN_POSITIVE).ln();
        let phase = if n == 0 || tau.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            (tau / tau.norm()).powu(n as u32)
        };
        *amp = phase * ln_mag.exp();
    }
    Ok(StateVector::new(DVector::from_vec(amps))?)
}

/// Barut–Girardello coherent state: the K₋ eigenstate with eigenvalue z,
/// amplitudes ∝ zᵐ/√(m!(2k)_m), adaptively truncated until the eigen-equation
/// residual passes.
pub fn bg_cs(k: f64, z: C64, truncation: usize) -> Result<StateVector, StatesError> {
    if k <= 0.0 || !k.is_finite() {
        return Err(StatesError::Rep(RepError::InvalidBargmannIndex(k)));
    }
    let s = su11_ladder(k);
    let (u, v) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0)); // K₋ alone
    let mut dim = truncation.max(4);
    loop {
        let amps = normalized(bg_raw_amps(k, z, dim))?;
        let tail = tail_of(&amps);
        let residual = band_residual(s, u, v, z, &amps);
        if tail < TAIL_TOL && residual < RESIDUAL_TOL {
            return Ok(StateVector::new(DVector::from_vec(amps))?);
        }
        if dim >= ADAPTIVE_CAP {
            return Err(StatesError::TruncationCap {
                cap: ADAPTIVE_CAP,
                tail,
                residual,
            });
        }
        dim = (dim * 2).min(ADAPTIVE_CAP);
    }
}

/// Eigenpairs of the Hermitian combination rJ₁ − J₂ (equivalently rA + B) on a
/// spin representation, sorted by eigenvalue. These are the equality states of
/// the uncertainty product with ⟨C⟩ = 0.
pub fn hermitian_limit_states(
    rep: &Representation,
    r: f64,
) -> Result<Vec<(f64, StateVector)>, StatesError> {
    if rep.kind != AlgebraKind::Su2 {
        return Err(StatesError::WrongAlgebra {
            expected: AlgebraKind::Su2,
            got: rep.kind,
        });
    }
    let h = &rep.op_a.entries * C64::new(r, 0.0) + &rep.op_b.entries;
    linalg::hermitian_eigen(&h)
        .into_iter()
        .map(|(val, vec)| Ok((val, StateVector::new(vec)?)))
        .collect()
}
