//! Numerical verification probes for the structural claims about generalized
//! intelligent states:
//!
//! * [`saturation_probe`] — eigenstates of L(λ) saturate the uncertainty
//!   product while random perturbations of them strictly exceed the bound.
//! * [`divergence_probe`] — at Re λ = 0 the amplitude recurrence produces no
//!   normalizable state: the tail mass refuses to decay as the truncation
//!   doubles (while Re λ > 0 controls converge).
//! * [`multiplicity_probe`] — each eigenvalue of L(λ) carries geometric
//!   multiplicity 1. On a finite spin representation that is read off the
//!   exact spectrum (and the Jordan collapse at λ = ±1 shows algebraic
//!   multiplicity 2j+1 against a single true eigenvector). On truncated
//!   infinite ladders the eigenvalues of the cut matrix do not approximate the
//!   operator's point spectrum at all (the cut matrix is close to nilpotent),
//!   so the probe instead counts the near-kernel dimension of L(λ) − z by a
//!   rank-revealing SVD and demands stability across three truncations.
//! * [`perelomov_embedding_check`] — for ζ² = −v/u the Perelomov coherent
//!   state is itself a GIS, the eigenstate with z = 2kuζ; both square-root
//!   branches are compared by fidelity.
//! * [`qp_squeezing_scan`] — embeds the k = 1/4 (even Fock sector) or k = 3/4
//!   (odd sector) discrete series into the oscillator and scans a coherent
//!   family for quadrature squeezing, reported as
//!   100·(½ − min(σ_Q², σ_P²))/(½) percent.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::moments::{compute_moments, ladder_moments, Moments, MomentsError};
use crate::repkit::{
    build_su11_rep, lambda_operator, uv_coefficients, AlgebraKind, RepError, Representation,
};
use crate::states::{
    bg_raw_amps, canonical_ladder, gis_recurrence, perelomov_cs, perelomov_raw_amps,
    solve_canonical_gis, solve_su11_gis, solve_su2_gis, su11_ladder, StatesError,
};

/// Relative SVD threshold under which a singular value counts as kernel.
pub const KERNEL_SVD_RTOL: f64 = 1e-8;
/// Default eigenvalue-matching tolerance for exact finite spectra.
pub const EIGENVALUE_MATCH_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("truncation schedule must be strictly increasing with at least 3 entries")]
    BadSchedule,
    #[error("scan truncation must be even and at least 256 (got {0})")]
    BadTruncation(usize),
    #[error("kernel counts {0:?} did not stabilize across truncations")]
    InconclusiveTruncation(Vec<usize>),
    #[error("probe is not defined at the defective points λ = ±1")]
    DefectivePoint(C64),
    #[error("scan state leaks {tail:.3e} probability into the truncation tail")]
    ScanTail { tail: f64 },
    #[error(transparent)]
    States(#[from] StatesError),
    #[error(transparent)]
    Moments(#[from] MomentsError),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// Outcome of the tail-decay test across a truncation schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DivergenceVerdict {
    /// Final tail mass below 1e−10: a normalizable state exists.
    Converges,
    /// Tail mass never decays (each entry ≥ 0.9 × the previous one).
    Diverges,
    /// Neither pattern: report the numbers and decide nothing.
    Inconclusive,
}

/// Tail masses of the normalized recurrence solution per truncation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub truncations: Vec<usize>,
    pub tail_masses: Vec<f64>,
    pub verdict: DivergenceVerdict,
}

/// Runs the amplitude recurrence for (λ, z) on the k-ladder at each listed
/// truncation and classifies the tail behaviour. The schedule must be strictly
/// increasing with at least three entries.
pub fn divergence_probe(
    k: f64,
    lambda: C64,
    z: C64,
    truncations: &[usize],
) -> Result<DivergenceReport, VerifyError> {
    if truncations.len() < 3 || truncations.windows(2).any(|w| w[1] <= w[0]) {
        return Err(VerifyError::BadSchedule);
    }
    if k <= 0.0 || !k.is_finite() {
        return Err(VerifyError::Rep(RepError::InvalidBargmannIndex(k)));
    }
    let (u, v) = uv_coefficients(lambda);
    let s = su11_ladder(k);
    let mut tail_masses = Vec::with_capacity(truncations.len());
    for &dim in truncations {
        let mut amps = gis_recurrence(s, u, v, z, dim);
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in amps.iter_mut() {
            *a /= norm;
        }
        let start = dim * 9 / 10;
        tail_masses.push(amps[start..].iter().map(|a| a.norm_sqr()).sum());
    }
    let verdict = if *tail_masses.last().unwrap() < 1e-10 {
        DivergenceVerdict::Converges
    } else if tail_masses.windows(2).all(|w| w[1] >= 0.9 * w[0]) {
        DivergenceVerdict::Diverges
    } else {
        DivergenceVerdict::Inconclusive
    };
    Ok(DivergenceReport {
        truncations: truncations.to_vec(),
        tail_masses,
        verdict,
    })
}

/// The headline non-existence probe: λ = i·r sits on the imaginary axis where
/// no normalizable eigenstate exists for any r, so the verdict must come out
/// `Diverges` (the eigenvalue is fixed at z = 1; the verdict is z-independent).
pub fn axis_divergence_probe(
    k: f64,
    r: f64,
    truncations: &[usize],
) -> Result<DivergenceReport, VerifyError> {
    divergence_probe(k, C64::new(0.0, r), C64::new(1.0, 0.0), truncations)
}

/// Kernel and spectral counts backing a multiplicity claim.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiplicityReport {
    pub lambda: C64,
    pub z: C64,
    pub tol: f64,
    pub truncations: Vec<usize>,
    /// Near-kernel dimension of L(λ) − z per truncation (SVD count).
    pub kernel_counts: Vec<usize>,
    /// The stabilized kernel count: the number of independent eigenvectors.
    pub geometric_count: usize,
    /// Number of exact matrix eigenvalues within `tol` of z — meaningful only
    /// on finite spin representations, where the matrix is the operator.
    /// On truncated ladders the cut matrix's eigenvalues say nothing about
    /// the operator's point spectrum, so no count is reported.
    pub algebraic_count: Option<usize>,
}

fn kernel_count(m: &nalgebra::DMatrix<C64>) -> usize {
    m.ncols() - linalg::rank_with_threshold(m, KERNEL_SVD_RTOL)
}

/// Counts how many independent eigenvectors L(λ) has at eigenvalue z.
///
/// Spin representations are exact: eigenvalues within `tol` of z give the
/// algebraic count and the SVD kernel of L − z the geometric one. Infinite
/// ladders are probed at the representation's truncation and two doublings;
/// the kernel count must agree across all three or the probe refuses to
/// conclude.
pub fn multiplicity_probe(
    rep: &Representation,
    lambda: C64,
    z: C64,
    tol: f64,
) -> Result<MultiplicityReport, VerifyError> {
    match rep.kind {
        AlgebraKind::Su2 => {
            let l = lambda_operator(rep, lambda);
            let dim = rep.dim();
            let shifted = &l.entries - nalgebra::DMatrix::identity(dim, dim) * z;
            let kernel = kernel_count(&shifted);
            let (vals, _) = linalg::eigen(&l.entries);
            let eig = vals.iter().filter(|v| (*v - z).norm() < tol).count();
            Ok(MultiplicityReport {
                lambda,
                z,
                tol,
                truncations: vec![dim],
                kernel_counts: vec![kernel],
                geometric_count: kernel,
                algebraic_count: Some(eig),
            })
        }
        AlgebraKind::Su11 | AlgebraKind::CanonicalQp => {
            if lambda.re <= 0.0 {
                return Err(VerifyError::States(StatesError::PreconditionReLambda(
                    lambda,
                )));
            }
            let base = rep.truncation.unwrap_or(128).max(32);
            let truncations = vec![base, base * 2, base * 4];
            let mut counts = Vec::with_capacity(3);
            for &dim in &truncations {
                let big = match rep.kind {
                    AlgebraKind::Su11 => build_su11_rep(rep.k.expect("ladder carries k"), dim)?,
                    _ => crate::repkit::build_qp_realization(dim)?,
                };
                let l = lambda_operator(&big, lambda);
                let shifted = &l.entries - nalgebra::DMatrix::identity(dim, dim) * z;
                counts.push(kernel_count(&shifted));
            }
            if !(counts[0] == counts[1] && counts[1] == counts[2]) {
                return Err(VerifyError::InconclusiveTruncation(counts));
            }
            Ok(MultiplicityReport {
                lambda,
                z,
                tol,
                truncations,
                kernel_counts: counts.clone(),
                geometric_count: counts[0],
                algebraic_count: None,
            })
        }
    }
}

/// Fidelities between the two Perelomov branches and the matching GIS.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingReport {
    /// Principal branch ζ = √(−v/u).
    pub zeta: C64,
    /// GIS eigenvalue of the principal branch, z = 2kuζ.
    pub z_plus: C64,
    pub fidelity_plus: f64,
    pub fidelity_minus: f64,
}

/// Confirms that the Perelomov states at ζ = ±√(−v/u) coincide with the GIS
/// at z = ±2kuζ, the special parameter line where the coherent family
/// saturates the uncertainty product.
pub fn perelomov_embedding_check(
    k: f64,
    lambda: C64,
    truncation: usize,
) -> Result<EmbeddingReport, VerifyError> {
    let (u, v) = uv_coefficients(lambda);
    let zeta = (-v / u).sqrt();
    let z_plus = 2.0 * k * u * zeta;
    let rep = build_su11_rep(k, truncation)?;
    let gis_plus = solve_su11_gis(&rep, lambda, z_plus)?;
    let gis_minus = solve_su11_gis(&rep, lambda, -z_plus)?;
    let cs_plus = perelomov_cs(k, zeta, truncation)?;
    let cs_minus = perelomov_cs(k, -zeta, truncation)?;
    Ok(EmbeddingReport {
        zeta,
        z_plus,
        fidelity_plus: gis_plus.state.fidelity(&cs_plus),
        fidelity_minus: gis_minus.state.fidelity(&cs_minus),
    })
}

/// Uncertainty-product residuals of a GIS against perturbed copies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SaturationReport {
    /// Relative saturation defect of the GIS itself (≈ 0).
    pub gis_residual: f64,
    /// Smallest relative defect among the perturbed states (> 0).
    pub perturbed_min: f64,
    /// Largest relative defect among the perturbed states.
    pub perturbed_max: f64,
    pub perturbations: usize,
}

fn relative_ur_residual(m: &Moments) -> f64 {
    m.ur_residual() / m.ur_rhs().max(1e-300)
}

/// Checks both directions of the saturation claim at one (λ, z): the solved
/// eigenstate sits on the uncertainty bound, and `n` seeded random
/// perturbations of relative size `eps` all lie strictly above it.
pub fn saturation_probe(
    rep: &Representation,
    lambda: C64,
    z: C64,
    n: usize,
    eps: f64,
    seed: u64,
) -> Result<SaturationReport, VerifyError> {
    let one = C64::new(1.0, 0.0);
    let (amps, moments): (Vec<C64>, Moments) = match rep.kind {
        AlgebraKind::Su2 => {
            if (lambda - one).norm() < 1e-12 || (lambda + one).norm() < 1e-12 {
                return Err(VerifyError::DefectivePoint(lambda));
            }
            let spectrum = solve_su2_gis(rep, lambda)?;
            let (_, state) = spectrum
                .pairs
                .iter()
                .min_by(|a, b| (a.0 - z).norm().partial_cmp(&(b.0 - z).norm()).unwrap())
                .expect("spin spectrum is nonempty")
                .clone();
            let m = compute_moments(rep, &state)?;
            (state.amps().iter().copied().collect(), m)
        }
        AlgebraKind::Su11 => {
            let k = rep.k.expect("ladder carries k");
            let sol = solve_su11_gis(rep, lambda, z)?;
            let amps: Vec<C64> = sol.state.amps().iter().copied().collect();
            let m = ladder_moments(su11_ladder(k), |i| k + i as f64, &amps);
            (amps, m)
        }
        AlgebraKind::CanonicalQp => {
            let sol = solve_canonical_gis(rep, lambda, z)?;
            let amps: Vec<C64> = sol.state.amps().iter().copied().collect();
            let m = ladder_moments(canonical_ladder(), |_| 1.0, &amps);
            (amps, m)
        }
    };
    let gis_residual = relative_ur_residual(&moments).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = amps.len();
    let mut perturbed_min = f64::INFINITY;
    let mut perturbed_max = f64::NEG_INFINITY;
    for _ in 0..n {
        let mut noise: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let nn = noise.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for x in noise.iter_mut() {
            *x *= eps / nn;
        }
        let mut pert: Vec<C64> = amps.iter().zip(&noise).map(|(a, e)| a + e).collect();
        let pn = pert.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for x in pert.iter_mut() {
            *x /= pn;
        }
        let m = match rep.kind {
            AlgebraKind::Su2 => {
                let state = crate::repkit::StateVector::new(nalgebra::DVector::from_vec(pert))?;
                compute_moments(rep, &state)?
            }
            AlgebraKind::Su11 => {
                let k = rep.k.expect("ladder carries k");
                ladder_moments(su11_ladder(k), |i| k + i as f64, &pert)
            }
            AlgebraKind::CanonicalQp => ladder_moments(canonical_ladder(), |_| 1.0, &pert),
        };
        let r = relative_ur_residual(&m);
        perturbed_min = perturbed_min.min(r);
        perturbed_max = perturbed_max.max(r);
    }
    Ok(SaturationReport {
        gis_residual,
        perturbed_min,
        perturbed_max,
        perturbations: n,
    })
}

/// Which coherent family the quadrature scan walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanFamily {
    /// Lowering-operator eigenstates, parameter z ∈ ℂ.
    BarutGirardello,
    /// Disk coherent states, parameter ζ with |ζ| < 1.
    Perelomov,
}

/// Which oscillator parity sector carries the ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sector {
    /// Even Fock states, k = 1/4.
    Even,
    /// Odd Fock states, k = 3/4.
    Odd,
}

impl Sector {
    /// Bargmann index of the sector.
    pub fn k(self) -> f64 {
        match self {
            Sector::Even => 0.25,
            Sector::Odd => 0.75,
        }
    }

    fn offset(self) -> usize {
        match self {
            Sector::Even => 0,
            Sector::Odd => 1,
        }
    }
}

/// Quadrature variances of one scanned state.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScanPoint {
    pub param: C64,
    pub var_q: f64,
    pub var_p: f64,
    /// 100·(½ − min(σ_Q², σ_P²))/(½); positive means quadrature squeezing.
    pub percent: f64,
}

/// Scan outcome with the best squeezing point marked.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub family: ScanFamily,
    pub sector: Sector,
    pub points: Vec<ScanPoint>,
    pub best_index: usize,
}

/// Embeds the sector's discrete series into the oscillator Fock space
/// (|m⟩ ↦ |2m + offset⟩) and measures quadrature squeezing across the grid.
/// `truncation` is the Fock dimension: even and at least 256.
pub fn qp_squeezing_scan(
    family: ScanFamily,
    sector: Sector,
    grid: &[C64],
    truncation: usize,
) -> Result<ScanReport, VerifyError> {
    if !truncation.is_multiple_of(2) || truncation < 256 {
        return Err(VerifyError::BadTruncation(truncation));
    }
    let k = sector.k();
    let offset = sector.offset();
    let level_dim = truncation / 2;
    let mut points = Vec::with_capacity(grid.len());
    for &param in grid {
        let mut level = match family {
            ScanFamily::BarutGirardello => bg_raw_amps(k, param, level_dim),
            ScanFamily::Perelomov => {
                if param.norm() >= 1.0 {
                    return Err(VerifyError::States(StatesError::OutsideDisk(param)));
                }
                perelomov_raw_amps(k, param, level_dim)
            }
        };
        let norm = level.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in level.iter_mut() {
            *a /= norm;
        }
        let tail: f64 = level[level_dim * 9 / 10..]
            .iter()
            .map(|a| a.norm_sqr())
            .sum();
        if tail > 1e-8 {
            return Err(VerifyError::ScanTail { tail });
        }
        let mut fock = vec![C64::new(0.0, 0.0); truncation];
        for (m, amp) in level.iter().enumerate() {
            fock[2 * m + offset] = *amp;
        }
        let m = ladder_moments(canonical_ladder(), |_| 1.0, &fock);
        let percent = 100.0 * (0.5 - m.var_a.min(m.var_b)) / 0.5;
        points.push(ScanPoint {
            param,
            var_q: m.var_a,
            var_p: m.var_b,
            percent,
        });
    }
    let best_index = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.percent.partial_cmp(&b.1.percent).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(ScanReport {
        family,
        sector,
        points,
        best_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repkit::{build_qp_realization, build_su2_rep};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn divergence_probe_flags_imaginary_lambda() {
        let r = axis_divergence_probe(0.5, 1.0, &[256, 512, 1024]).unwrap();
        assert_eq!(
            r.verdict,
            DivergenceVerdict::Diverges,
            "tails {:?}",
            r.tail_masses
        );
        assert!(
            r.tail_masses.iter().all(|&t| t > 1e-3),
            "tail never decays: {:?}",
            r.tail_masses
        );
    }

    #[test]
    fn divergence_probe_control_converges() {
        let r = divergence_probe(0.5, c(1.5, 0.0), c(1.0, 0.0), &[256, 512, 1024]).unwrap();
        assert_eq!(r.verdict, DivergenceVerdict::Converges);
        assert!(*r.tail_masses.last().unwrap() < 1e-30);
    }

    #[test]
    fn divergence_probe_rejects_bad_schedules() {
        assert!(matches!(
            divergence_probe(0.5, c(0.0, 1.0), c(1.0, 0.0), &[256, 512]).unwrap_err(),
            VerifyError::BadSchedule
        ));
        assert!(matches!(
            divergence_probe(0.5, c(0.0, 1.0), c(1.0, 0.0), &[256, 128, 512]).unwrap_err(),
            VerifyError::BadSchedule
        ));
    }

    #[test]
    fn multiplicity_spin_regular_point() {
        let rep = build_su2_rep(1.0).unwrap();
        let r = multiplicity_probe(&rep, c(2.0, 0.0), c(3f64.sqrt(), 0.0), 1e-7).unwrap();
        assert_eq!(r.geometric_count, 1);
        assert_eq!(r.algebraic_count, Some(1));

        let off = multiplicity_probe(&rep, c(2.0, 0.0), c(17.0, 0.0), 1e-7).unwrap();
        assert_eq!(off.geometric_count, 0);
        assert_eq!(off.algebraic_count, Some(0));
    }

    #[test]
    fn multiplicity_spin_jordan_collapse() {
        // λ = 1 on spin 1: all three eigenvalues are 0 but only one eigenvector
        let rep = build_su2_rep(1.0).unwrap();
        let r = multiplicity_probe(&rep, c(1.0, 0.0), c(0.0, 0.0), 1e-7).unwrap();
        assert_eq!(
            r.algebraic_count,
            Some(3),
            "algebraic multiplicity is the full dimension"
        );
        assert_eq!(r.geometric_count, 1, "but the kernel is one-dimensional");
    }

    #[test]
    fn multiplicity_ladder_is_one_and_stable() {
        let rep = crate::repkit::build_su11_rep(0.5, 128).unwrap();
        let r = multiplicity_probe(&rep, c(2.0, 0.0), c(0.7, 0.0), 1e-7).unwrap();
        assert_eq!(r.truncations, vec![128, 256, 512]);
        assert_eq!(r.kernel_counts, vec![1, 1, 1]);
        assert_eq!(r.geometric_count, 1);
        assert_eq!(r.algebraic_count, None);

        // lowering-operator eigenstates are non-degenerate too (λ = 1)
        let rep = crate::repkit::build_su11_rep(1.0, 128).unwrap();
        let r = multiplicity_probe(&rep, c(1.0, 0.0), c(0.5, 0.0), 1e-7).unwrap();
        assert_eq!(r.geometric_count, 1);
    }

    #[test]
    fn multiplicity_ladder_requires_positive_re_lambda() {
        let rep = crate::repkit::build_su11_rep(0.5, 64).unwrap();
        let err = multiplicity_probe(&rep, c(0.0, 1.0), c(0.5, 0.0), 1e-7).unwrap_err();
        assert!(matches!(
            err,
            VerifyError::States(StatesError::PreconditionReLambda(_))
        ));
    }

    #[test]
    fn embedding_check_both_branches() {
        let r = perelomov_embedding_check(0.5, c(2.0, 0.0), 256).unwrap();
        assert!(
            r.fidelity_plus > 1.0 - 1e-10,
            "plus branch fidelity {}",
            r.fidelity_plus
        );
        assert!(
            r.fidelity_minus > 1.0 - 1e-10,
            "minus branch fidelity {}",
            r.fidelity_minus
        );
        // the eigenvalue matches k√(1−λ²) for the principal branch
        let want = (C64::new(1.0, 0.0) - c(2.0, 0.0) * c(2.0, 0.0)).sqrt() * 0.5;
        assert!((r.z_plus - want).norm() < 1e-12);
    }

    #[test]
    fn saturation_probe_separates_gis_from_perturbations() {
        let rep = crate::repkit::build_su11_rep(1.0, 128).unwrap();
        let r = saturation_probe(&rep, c(1.5, 0.9), c(0.7, 0.0), 20, 1e-2, 7).unwrap();
        assert!(r.gis_residual < 1e-9, "GIS defect {}", r.gis_residual);
        assert!(
            r.perturbed_min > 0.0,
            "perturbed states sit strictly above the bound"
        );
        assert!(
            r.perturbed_min > 10.0 * r.gis_residual.max(1e-12),
            "separation: {} vs {}",
            r.perturbed_min,
            r.gis_residual
        );
    }

    #[test]
    fn saturation_probe_spin_and_oscillator() {
        let rep = build_su2_rep(1.5).unwrap();
        let r = saturation_probe(&rep, c(1.3, 0.7), c(0.0, 0.0), 10, 1e-2, 11).unwrap();
        assert!(r.gis_residual < 1e-9);
        assert!(r.perturbed_min > 0.0);

        let rep = build_qp_realization(128).unwrap();
        let r = saturation_probe(&rep, c(2.0, 0.0), c(0.5, 0.5), 10, 1e-2, 13).unwrap();
        assert!(r.gis_residual < 1e-9);
        assert!(r.perturbed_min > 0.0);
    }

    #[test]
    fn saturation_probe_is_deterministic() {
        let rep = crate::repkit::build_su11_rep(0.5, 128).unwrap();
        let a = saturation_probe(&rep, c(1.2, 0.4), c(0.3, 0.0), 8, 1e-2, 42).unwrap();
        let b = saturation_probe(&rep, c(1.2, 0.4), c(0.3, 0.0), 8, 1e-2, 42).unwrap();
        assert_eq!(a.perturbed_min, b.perturbed_min);
        assert_eq!(a.perturbed_max, b.perturbed_max);
    }

    #[test]
    fn scan_rejects_bad_truncation() {
        assert!(matches!(
            qp_squeezing_scan(
                ScanFamily::BarutGirardello,
                Sector::Even,
                &[c(0.3, 0.0)],
                255
            )
            .unwrap_err(),
            VerifyError::BadTruncation(255)
        ));
        assert!(matches!(
            qp_squeezing_scan(
                ScanFamily::BarutGirardello,
                Sector::Even,
                &[c(0.3, 0.0)],
                128
            )
            .unwrap_err(),
            VerifyError::BadTruncation(128)
        ));
    }

    #[test]
    fn scan_even_sector_squeezes_near_known_optimum() {
        let grid: Vec<C64> = [0.2, 0.25, 0.311, 0.4, 1.0]
            .iter()
            .map(|&x| c(x, 0.0))
            .collect();
        let r = qp_squeezing_scan(ScanFamily::BarutGirardello, Sector::Even, &grid, 512).unwrap();
        let best = r.points[r.best_index];
        assert!(
            (best.param.re - 0.311).abs() < 1e-12,
            "optimum near z = 0.311"
        );
        assert!(
            best.percent > 55.0 && best.percent < 56.0,
            "percent {}",
            best.percent
        );
        // vacuum control: z = 0 is the vacuum itself (σ_Q² = σ_P² = 1/2);
        // the percent is first order in Re z, so probe exactly zero
        let small = qp_squeezing_scan(
            ScanFamily::BarutGirardello,
            Sector::Even,
            &[c(0.0, 0.0)],
            512,
        )
        .unwrap();
        assert!(
            small.points[0].percent.abs() < 1e-12,
            "got {}",
            small.points[0].percent
        );
    }

    #[test]
    fn scan_perelomov_squeezes_hard_near_disk_edge() {
        let r =
            qp_squeezing_scan(ScanFamily::Perelomov, Sector::Even, &[c(0.95, 0.0)], 2048).unwrap();
        let p = r.points[0];
        assert!(
            p.percent > 97.0 && p.percent < 98.0,
            "percent {}",
            p.percent
        );
    }
}
