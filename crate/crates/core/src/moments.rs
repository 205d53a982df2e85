//! Second-moment extraction and the uncertainty-product bookkeeping.
//!
//! For a normalized state ψ and the representation's observables A, B, C
//! (with C = −i[A,B] on interior rows) this module reports
//!
//! * means ⟨A⟩, ⟨B⟩, ⟨C⟩,
//! * variances σ_A², σ_B² and the symmetrized covariance
//!   σ_AB = ½⟨AB+BA⟩ − ⟨A⟩⟨B⟩,
//! * the uncertainty product σ_A²σ_B² against its lower bound
//!   ¼⟨C⟩² + σ_AB², whose difference is ≥ 0 for every state and = 0 exactly
//!   on the generalized intelligent states,
//! * the relative squeezing coefficients q_A = (⟨C⟩/2 − σ_A²)/(⟨C⟩/2).
//!
//! Closed-form moment predictions are provided for the GIS family
//! (σ_A² = ⟨C⟩/(2Re λ), σ_B² = |λ|²⟨C⟩/(2Re λ), σ_AB = −⟨C⟩Im λ/(2Re λ))
//! and for the Perelomov and Bloch coherent-state families, so matrix numerics
//! and closed forms can be compared as independent routes.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::repkit::{Representation, StateVector};

/// Expectation values must be real to this tolerance for Hermitian observables.
pub const HERMITICITY_IMAG_TOL: f64 = 1e-10;
/// States must carry less than this much probability in the basis tail.
pub const MOMENT_TAIL_TOL: f64 = 1e-8;
/// ⟨C⟩ smaller than this makes the relative squeezing coefficients undefined.
pub const Q_DENOMINATOR_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum MomentsError {
    #[error("state dimension {state} does not match representation dimension {rep}")]
    DimensionMismatch { state: usize, rep: usize },
    #[error("tail mass {0:.3e} too large for trustworthy truncated moments")]
    TailMassTooLarge(f64),
    #[error("expectation of a Hermitian observable has imaginary part {imag:.3e}")]
    NonHermitianExpectation { imag: f64 },
    #[error("Re λ = 0 has no normalizable eigenstate and no finite predicted moments (λ = {0})")]
    ZeroRealPart(C64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

/// First and second moments of (A, B, C) in a single state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean_a: f64,
    pub mean_b: f64,
    pub mean_c: f64,
    pub var_a: f64,
    pub var_b: f64,
    pub cov_ab: f64,
}

impl Moments {
    /// Left side of the uncertainty relation: σ_A²σ_B².
    pub fn ur_lhs(&self) -> f64 {
        self.var_a * self.var_b
    }

    /// Right side of the uncertainty relation: ¼⟨C⟩² + σ_AB².
    pub fn ur_rhs(&self) -> f64 {
        0.25 * self.mean_c * self.mean_c + self.cov_ab * self.cov_ab
    }

    /// σ_A²σ_B² − (¼⟨C⟩² + σ_AB²); nonnegative for all states, zero on GIS.
    pub fn ur_residual(&self) -> f64 {
        self.ur_lhs() - self.ur_rhs()
    }
}

/// Closed-form GIS moments from λ and the realized ⟨C⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedGisMoments {
    pub var_a: f64,
    pub var_b: f64,
    pub cov_ab: f64,
}

/// Analytic Perelomov coherent-state moments of (K₁, K₂, K₃).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerelomovMoments {
    pub var_k1: f64,
    pub var_k2: f64,
    pub cov_k1k2: f64,
    pub mean_k3: f64,
}

/// Analytic Bloch coherent-state moments of (J₁, J₂).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochMoments {
    pub var_j1: f64,
    pub cov_j1j2: f64,
}

fn real_expectation(value: C64) -> Result<f64, MomentsError> {
    if value.im.abs() > HERMITICITY_IMAG_TOL {
        return Err(MomentsError::NonHermitianExpectation { imag: value.im });
    }
    Ok(value.re)
}

/// Moments of (A, B, C) by dense matrix action on a normalized state.
///
/// Preconditions: matching dimensions, and for truncated (infinite-ladder)
/// representations a tail mass below [`MOMENT_TAIL_TOL`] — a heavy tail means
/// the truncated matrices no longer represent the operators on this state.
/// Exact finite representations (spin matrices) carry no truncation and skip
/// the tail gate.
pub fn compute_moments(rep: &Representation, state: &StateVector) -> Result<Moments, MomentsError> {
    if state.dim() != rep.dim() {
        return Err(MomentsError::DimensionMismatch {
            state: state.dim(),
            rep: rep.dim(),
        });
    }
    if rep.truncation.is_some() {
        let tail = state.tail_mass();
        if tail >= MOMENT_TAIL_TOL {
            return Err(MomentsError::TailMassTooLarge(tail));
        }
    }
    let psi = state.amps();
    let apsi = &rep.op_a.entries * psi;
    let bpsi = &rep.op_b.entries * psi;
    let cpsi = &rep.op_c.entries * psi;
    let mean_a = real_expectation(psi.dotc(&apsi))?;
    let mean_b = real_expectation(psi.dotc(&bpsi))?;
    let mean_c = real_expectation(psi.dotc(&cpsi))?;
    // centered fluctuation vectors: σ² = ‖(A−⟨A⟩)ψ‖² stays accurate at the
    // fluctuation scale instead of cancelling two ⟨A²⟩-sized numbers
    let da = &apsi - psi * C64::new(mean_a, 0.0);
    let db = &bpsi - psi * C64::new(mean_b, 0.0);
    let var_a = da.norm_squared();
    let var_b = db.norm_squared();
    let cov_ab = da.dotc(&db).re;
    Ok(Moments {
        mean_a,
        mean_b,
        mean_c,
        var_a,
        var_b,
        cov_ab,
    })
}

/// Moments on a pure ladder realization in O(dim), without materializing
/// matrices: A = (L+L†)/2, B = (L−L†)/(2i), C diagonal. `s` is the ladder
/// weight ((L†ψ)_m = s(m)ψ_{m−1}) and `diag_c` the diagonal of C.
pub(crate) fn ladder_moments<S, D>(s: S, diag_c: D, amps: &[C64]) -> Moments
where
    S: Fn(usize) -> f64,
    D: Fn(usize) -> f64,
{
    let dim = amps.len();
    let mut lpsi = vec![C64::new(0.0, 0.0); dim];
    let mut ldpsi = vec![C64::new(0.0, 0.0); dim];
    for m in 0..dim {
        if m + 1 < dim {
            lpsi[m] = s(m + 1) * amps[m + 1];
        }
        if m > 0 {
            ldpsi[m] = s(m) * amps[m - 1];
        }
    }
    let half = C64::new(0.5, 0.0);
    let half_over_i = C64::new(0.0, -0.5);
    let apsi: Vec<C64> = (0..dim).map(|m| half * (lpsi[m] + ldpsi[m])).collect();
    let bpsi: Vec<C64> = (0..dim)
        .map(|m| half_over_i * (lpsi[m] - ldpsi[m]))
        .collect();
    let dot = |x: &[C64], y: &[C64]| -> C64 { x.iter().zip(y).map(|(a, b)| a.conj() * b).sum() };
    let mean_a = dot(amps, &apsi).re;
    let mean_b = dot(amps, &bpsi).re;
    let mean_c: f64 = amps
        .iter()
        .enumerate()
        .map(|(m, a)| diag_c(m) * a.norm_sqr())
        .sum();
    // centered fluctuation vectors, matching the dense route's arithmetic
    let da: Vec<C64> = (0..dim).map(|m| apsi[m] - mean_a * amps[m]).collect();
    let db: Vec<C64> = (0..dim).map(|m| bpsi[m] - mean_b * amps[m]).collect();
    let var_a = dot(&da, &da).re;
    let var_b = dot(&db, &db).re;
    let cov_ab = dot(&da, &db).re;
    Moments {
        mean_a,
        mean_b,
        mean_c,
        var_a,
        var_b,
        cov_ab,
    }
}

/// Closed-form GIS second moments given λ and the realized ⟨C⟩.
pub fn predicted_gis_moments(
    lambda: C64,
    mean_c: f64,
) -> Result<PredictedGisMoments, MomentsError> {
    if lambda.re == 0.0 {
        return Err(MomentsError::ZeroRealPart(lambda));
    }
    let two_re = 2.0 * lambda.re;
    Ok(PredictedGisMoments {
        var_a: mean_c / two_re,
        var_b: lambda.norm_sqr() * mean_c / two_re,
        cov_ab: -mean_c * lambda.im / two_re,
    })
}

/// Relative squeezing coefficients (q_A, q_B) with q_X = (⟨C⟩/2 − σ_X²)/(⟨C⟩/2);
/// positive means squeezed below the symmetric level ⟨C⟩/2. `None` when
/// |⟨C⟩| < [`Q_DENOMINATOR_TOL`] leaves the reference level undefined.
pub fn squeezing_q(m: &Moments) -> (Option<f64>, Option<f64>) {
    if m.mean_c.abs() < Q_DENOMINATOR_TOL {
        return (None, None);
    }
    let half_c = 0.5 * m.mean_c;
    (
        Some((half_c - m.var_a) / half_c),
        Some((half_c - m.var_b) / half_c),
    )
}

/// The GIS closed forms of the squeezing coefficients:
/// q_A = 1 − 1/Re λ and q_B = 1 − |λ|²/Re λ, independent of ⟨C⟩.
pub fn predicted_gis_q(lambda: C64) -> Result<(f64, f64), MomentsError> {
    if lambda.re == 0.0 {
        return Err(MomentsError::ZeroRealPart(lambda));
    }
    Ok((1.0 - 1.0 / lambda.re, 1.0 - lambda.norm_sqr() / lambda.re))
}

/// Analytic moments of the Perelomov coherent state |ζ;k⟩:
/// σ_{K₁}² = (k/2)|1+ζ²|²/(1−|ζ|²)², σ_{K₂}² = (k/2)|1−ζ²|²/(1−|ζ|²)²,
/// σ_{K₁K₂} = −2k·Reζ·Imζ/(1−|ζ|²)², ⟨K₃⟩ = k(1+|ζ|²)/(1−|ζ|²).
///
/// In the (A, B) = (K₁, −K₂) convention the covariance flips sign:
/// σ_AB = −σ_{K₁K₂}.
pub fn perelomov_moments_analytic(k: f64, zeta: C64) -> Result<PerelomovMoments, MomentsError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(MomentsError::InvalidParameter("k must be positive"));
    }
    if zeta.norm() >= 1.0 {
        return Err(MomentsError::InvalidParameter("|zeta| must be < 1"));
    }
    let denom = (1.0 - zeta.norm_sqr()).powi(2);
    let one = C64::new(1.0, 0.0);
    let z2 = zeta * zeta;
    Ok(PerelomovMoments {
        var_k1: 0.5 * k * (one + z2).norm_sqr() / denom,
        var_k2: 0.5 * k * (one - z2).norm_sqr() / denom,
        cov_k1k2: -2.0 * k * zeta.re * zeta.im / denom,
        mean_k3: k * (1.0 + zeta.norm_sqr()) / (1.0 - zeta.norm_sqr()),
    })
}

/// Analytic moments of the Bloch coherent state |τ;−j⟩:
/// σ_{J₁}² = (j/2)|1−τ²|²/(1+|τ|²)², σ_{J₁J₂} = 2j·Reτ·Imτ/(1+|τ|²)².
///
/// In the (A, B) = (J₁, −J₂) convention the covariance flips sign:
/// σ_AB = −σ_{J₁J₂}.
pub fn bloch_moments_analytic(j: f64, tau: C64) -> Result<BlochMoments, MomentsError> {
    if !(j >= 0.5 && j.is_finite()) {
        return Err(MomentsError::InvalidParameter("j must be a positive spin"));
    }
    let denom = (1.0 + tau.norm_sqr()).powi(2);
    let one = C64::new(1.0, 0.0);
    let t2 = tau * tau;
    Ok(BlochMoments {
        var_j1: 0.5 * j * (one - t2).norm_sqr() / denom,
        cov_j1j2: 2.0 * j * tau.re * tau.im / denom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repkit::{build_qp_realization, build_su11_rep, build_su2_rep, StateVector};
    use crate::states::{bloch_cs, perelomov_cs, solve_canonical_gis, solve_su11_gis, su11_ladder};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn lowest_spin_state_moments() {
        // |−j⟩: σ_{J₁}² = σ_{J₂}² = j/2, σ_AB = 0, ⟨C⟩ = ⟨−J₃⟩ = j
        let rep = build_su2_rep(1.0).unwrap();
        let m = compute_moments(&rep, &StateVector::basis(3, 0)).unwrap();
        assert!((m.var_a - 0.5).abs() < 1e-14);
        assert!((m.var_b - 0.5).abs() < 1e-14);
        assert!(m.cov_ab.abs() < 1e-14);
        assert!((m.mean_c - 1.0).abs() < 1e-14);
        assert!(
            m.ur_residual().abs() < 1e-14,
            "coherent state saturates the bound"
        );
    }

    #[test]
    fn oscillator_vacuum_moments() {
        let rep = build_qp_realization(64).unwrap();
        let m = compute_moments(&rep, &StateVector::basis(64, 0)).unwrap();
        assert!((m.var_a - 0.5).abs() < 1e-12, "σ_Q² = 1/2, got {}", m.var_a);
        assert!((m.var_b - 0.5).abs() < 1e-12, "σ_P² = 1/2, got {}", m.var_b);
        assert!((m.mean_c - 1.0).abs() < 1e-12);
        assert!(m.ur_residual().abs() < 1e-12);
    }

    #[test]
    fn squeezed_vacuum_matches_predictions() {
        // λ = 2, z = 0 on the oscillator: σ_Q² = 1/4, σ_P² = 1, q_A = 1/2, q_B = −1
        let rep = build_qp_realization(128).unwrap();
        let sol = solve_canonical_gis(&rep, c(2.0, 0.0), c(0.0, 0.0)).unwrap();
        let m = compute_moments(&rep, &sol.state).unwrap();
        let pred = predicted_gis_moments(c(2.0, 0.0), m.mean_c).unwrap();
        assert!((m.var_a - 0.25).abs() < 1e-10, "σ_Q² {}", m.var_a);
        assert!((m.var_b - 1.0).abs() < 1e-10, "σ_P² {}", m.var_b);
        assert!((m.var_a - pred.var_a).abs() < 1e-10);
        assert!((m.var_b - pred.var_b).abs() < 1e-10);
        assert!(m.cov_ab.abs() < 1e-10);
        let (qa, qb) = squeezing_q(&m);
        assert!((qa.unwrap() - 0.5).abs() < 1e-10);
        assert!((qb.unwrap() + 1.0).abs() < 1e-10);
        let (pa, pb) = predicted_gis_q(c(2.0, 0.0)).unwrap();
        assert!((pa - 0.5).abs() < 1e-14 && (pb + 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_lambda_gis_saturates_with_covariance() {
        let rep = build_su11_rep(0.5, 256).unwrap();
        let lambda = c(1.5, 0.9);
        let sol = solve_su11_gis(&rep, lambda, c(0.7, 0.0)).unwrap();
        // state may have grown past the rep; rebuild the rep at matching size
        let rep = build_su11_rep(0.5, sol.state.dim()).unwrap();
        let m = compute_moments(&rep, &sol.state).unwrap();
        let pred = predicted_gis_moments(lambda, m.mean_c).unwrap();
        assert!(
            (m.var_a - pred.var_a).abs() < 1e-9,
            "{} vs {}",
            m.var_a,
            pred.var_a
        );
        assert!((m.var_b - pred.var_b).abs() < 1e-9);
        assert!((m.cov_ab - pred.cov_ab).abs() < 1e-9);
        assert!(m.cov_ab.abs() > 0.01, "Im λ ≠ 0 forces nonzero correlation");
        assert!(
            m.ur_residual().abs() < 1e-9 * m.ur_rhs().max(1.0),
            "uncertainty product saturates: residual {}",
            m.ur_residual()
        );
    }

    #[test]
    fn ladder_route_agrees_with_dense_route() {
        let k = 0.75;
        let rep = build_su11_rep(k, 256).unwrap();
        let sol = solve_su11_gis(&rep, c(1.2, -0.5), c(0.25, 0.8)).unwrap();
        let rep = build_su11_rep(k, sol.state.dim()).unwrap();
        let dense = compute_moments(&rep, &sol.state).unwrap();
        let amps: Vec<C64> = sol.state.amps().iter().copied().collect();
        let banded = ladder_moments(su11_ladder(k), |m| k + m as f64, &amps);
        assert!((dense.mean_a - banded.mean_a).abs() < 1e-12);
        assert!((dense.mean_b - banded.mean_b).abs() < 1e-12);
        assert!((dense.mean_c - banded.mean_c).abs() < 1e-12);
        assert!((dense.var_a - banded.var_a).abs() < 1e-12);
        assert!((dense.var_b - banded.var_b).abs() < 1e-12);
        assert!((dense.cov_ab - banded.cov_ab).abs() < 1e-12);
    }

    #[test]
    fn perelomov_analytic_reference_values() {
        // k = 1, ζ = 1/2: (1/2)·(5/4)²/(3/4)² = 25/18
        let m = perelomov_moments_analytic(1.0, c(0.5, 0.0)).unwrap();
        assert!(
            (m.var_k1 - 25.0 / 18.0).abs() < 1e-14,
            "var_k1 {}",
            m.var_k1
        );
        assert!((m.var_k1 - 1.3888888888888888).abs() < 1e-12);
        let m = perelomov_moments_analytic(0.5, c(0.3, 0.4)).unwrap();
        assert!(
            (m.cov_k1k2 + 0.21333333333333332).abs() < 1e-14,
            "cov {}",
            m.cov_k1k2
        );
    }

    #[test]
    fn perelomov_analytic_matches_dense_numerics() {
        let (k, zeta) = (0.5, c(0.3, 0.4));
        let cs = perelomov_cs(k, zeta, 256).unwrap();
        let rep = build_su11_rep(k, cs.dim()).unwrap();
        let dense = compute_moments(&rep, &cs).unwrap();
        let ana = perelomov_moments_analytic(k, zeta).unwrap();
        assert!(
            (dense.var_a - ana.var_k1).abs() < 1e-10,
            "{} vs {}",
            dense.var_a,
            ana.var_k1
        );
        assert!((dense.var_b - ana.var_k2).abs() < 1e-10);
        // B = −K₂ flips the covariance sign
        assert!((dense.cov_ab + ana.cov_k1k2).abs() < 1e-10);
        assert!((dense.mean_c - ana.mean_k3).abs() < 1e-10);
    }

    #[test]
    fn bloch_analytic_reference_and_dense() {
        let m = bloch_moments_analytic(1.0, c(0.0, 1.0)).unwrap();
        assert!((m.var_j1 - 0.5).abs() < 1e-14);
        assert!(m.cov_j1j2.abs() < 1e-14);

        let (j, tau) = (1.5, c(0.4, -0.7));
        let cs = bloch_cs(j, tau).unwrap();
        let rep = build_su2_rep(j).unwrap();
        let dense = compute_moments(&rep, &cs).unwrap();
        let ana = bloch_moments_analytic(j, tau).unwrap();
        assert!((dense.var_a - ana.var_j1).abs() < 1e-12);
        assert!(
            (dense.cov_ab + ana.cov_j1j2).abs() < 1e-12,
            "B = −J₂ flips the sign"
        );
    }

    #[test]
    fn tau_squared_one_kills_j1_variance() {
        // τ = ±1 are J₁ eigenstates: σ_{J₁} < 1e−12
        for tau in [c(1.0, 0.0), c(-1.0, 0.0)] {
            let cs = bloch_cs(2.0, tau).unwrap();
            let rep = build_su2_rep(2.0).unwrap();
            let m = compute_moments(&rep, &cs).unwrap();
            assert!(
                m.var_a.abs() < 1e-12,
                "σ_{{J₁}}² = {} at τ = {tau}",
                m.var_a
            );
        }
    }

    #[test]
    fn error_paths() {
        let rep = build_su2_rep(1.0).unwrap();
        let err = compute_moments(&rep, &StateVector::basis(5, 0)).unwrap_err();
        assert!(matches!(
            err,
            MomentsError::DimensionMismatch { state: 5, rep: 3 }
        ));

        // all mass on the last basis state of a big ladder → tail too large
        let rep = build_su11_rep(1.0, 64).unwrap();
        let err = compute_moments(&rep, &StateVector::basis(64, 63)).unwrap_err();
        assert!(matches!(err, MomentsError::TailMassTooLarge(_)));

        assert!(matches!(
            predicted_gis_moments(c(0.0, 2.0), 1.0).unwrap_err(),
            MomentsError::ZeroRealPart(_)
        ));
        assert!(matches!(
            perelomov_moments_analytic(1.0, c(2.0, 0.0)).unwrap_err(),
            MomentsError::InvalidParameter(_)
        ));
    }

    #[test]
    fn q_undefined_when_mean_c_vanishes() {
        let m = Moments {
            mean_a: 0.0,
            mean_b: 0.0,
            mean_c: 0.0,
            var_a: 0.3,
            var_b: 0.4,
            cov_ab: 0.0,
        };
        assert_eq!(squeezing_q(&m), (None, None));
    }
}
