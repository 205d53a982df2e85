//! Randomized and structural invariants of the whole library, exercised
//! through the public API with fixed seeds so every run is reproducible.
//!
//! Covered here:
//! * algebra closure and operator assembly across the representation builders,
//! * the Kummer transformation and a three-term contiguous relation of ₁F₁,
//! * nonnegativity of the uncertainty-product residual on random states,
//! * the eigen-equation residual certificate of every accepted GIS,
//! * sign symmetry of the Perelomov family under ζ → −ζ,
//! * bit-exact determinism of the state constructors,
//! * stability of divergence verdicts under a rescaled truncation schedule,
//! * (with the `parallel` feature) serial/parallel sweep agreement.

use giskit::moments::compute_moments;
use giskit::repkit::{
    build_qp_realization, build_su11_rep, build_su2_rep, lambda_operator, uv_coefficients,
    Representation, StateVector,
};
use giskit::special::hyp1f1;
use giskit::states::{
    bg_cs, bloch_cs, perelomov_cs, solve_canonical_gis, solve_su11_gis, solve_su2_gis,
};
use giskit::verify::{axis_divergence_probe, divergence_probe, DivergenceVerdict};
use giskit::C64;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest |entry| of a complex matrix, the natural roundoff scale.
fn max_entry(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|e| e.norm()).fold(0.0, f64::max)
}

#[test]
fn spin_representations_close_the_algebra_up_to_twenty() {
    // [A,B] = iC entrywise on every row, and all three observables Hermitian
    let mut two_j = 1;
    while two_j <= 40 {
        let j = two_j as f64 / 2.0;
        let rep = build_su2_rep(j).unwrap();
        for op in [&rep.op_a, &rep.op_b, &rep.op_c] {
            assert!(op.hermiticity_defect() < 1e-13, "hermiticity at j = {j}");
        }
        assert!(
            rep.commutator_defect_interior() < 1e-13,
            "closure defect {} at j = {j}",
            rep.commutator_defect_interior()
        );
        assert!(
            rep.boundary_rows.is_empty(),
            "spin matrices are exact everywhere"
        );
        two_j += 1;
    }
}

#[test]
fn ladder_representations_close_the_algebra_for_random_k() {
    // Random Bargmann indices; closure holds on interior rows with a tolerance
    // proportional to the largest matrix element (the entries grow like the
    // truncation, so an absolute 1e−13 only makes sense at unit scale).
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let k: f64 = rng.random_range(0.15..3.5);
        let rep = build_su11_rep(k, 48).unwrap();
        for op in [&rep.op_a, &rep.op_b, &rep.op_c] {
            assert!(op.hermiticity_defect() < 1e-13, "hermiticity at k = {k}");
        }
        let scale = max_entry(&(&rep.op_a.entries * &rep.op_b.entries));
        let tol = 1e-13 * scale.max(1.0);
        assert!(
            rep.commutator_defect_interior() < tol,
            "interior closure defect {} exceeds {} at k = {k}",
            rep.commutator_defect_interior(),
            tol
        );
        assert_eq!(rep.boundary_rows, vec![47], "one flagged boundary row");
    }
    let rep = build_qp_realization(48).unwrap();
    let scale = max_entry(&(&rep.op_a.entries * &rep.op_b.entries));
    assert!(rep.commutator_defect_interior() < 1e-13 * scale.max(1.0));
    assert_eq!(rep.boundary_rows, vec![46, 47]);
}

#[test]
fn lambda_operator_equals_u_lower_plus_v_raise() {
    // L(λ) = λA + iB must equal u(A+iB) + v(A−iB) entrywise, u,v = (λ±1)/2
    let reps: Vec<Representation> = vec![
        build_su2_rep(1.5).unwrap(),
        build_su11_rep(0.5, 16).unwrap(),
        build_qp_realization(16).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..100 {
        let lambda = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let (u, v) = uv_coefficients(lambda);
        for rep in &reps {
            let l = lambda_operator(rep, lambda);
            let i = c(0.0, 1.0);
            let lower = &rep.op_a.entries + &rep.op_b.entries * i;
            let raise = &rep.op_a.entries - &rep.op_b.entries * i;
            let rebuilt = lower * u + raise * v;
            let defect = max_entry(&(&l.entries - rebuilt));
            assert!(
                defect < 1e-14,
                "defect {defect} at λ = {lambda} on {:?}",
                rep.kind
            );
        }
    }
}

#[test]
fn kummer_transformation_holds_on_random_draws() {
    // ₁F₁(a,b;z) = eᶻ·₁F₁(b−a,b;−z) to 1e−10 relative, 200 draws with |z| ≤ 20
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let mut checked = 0;
    while checked < 200 {
        let a = c(rng.random_range(-4.0..4.0), rng.random_range(-2.0..2.0));
        let b = c(rng.random_range(0.3..5.0), rng.random_range(-2.0..2.0));
        let z = c(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
        if z.norm() > 20.0 {
            continue;
        }
        let lhs = hyp1f1(a, b, z).unwrap().value;
        let rhs = z.exp() * hyp1f1(b - a, b, -z).unwrap().value;
        let rel = (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
        assert!(rel < 1e-10, "Kummer defect {rel} at a={a} b={b} z={z}");
        checked += 1;
    }
}

#[test]
fn contiguous_relation_residual_is_small() {
    // Three-term contiguous relation in the first parameter:
    //   (b−a)·F(a−1,b;z) + (2a−b+z)·F(a,b;z) − a·F(a+1,b;z) = 0,
    // normalized by the largest of the three terms.
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..100 {
        let a = c(rng.random_range(-2.5..2.5), rng.random_range(-1.5..1.5));
        let b = c(rng.random_range(0.4..4.0), rng.random_range(-1.5..1.5));
        let z = c(rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0));
        let fm = hyp1f1(a - 1.0, b, z).unwrap().value;
        let f0 = hyp1f1(a, b, z).unwrap().value;
        let fp = hyp1f1(a + 1.0, b, z).unwrap().value;
        let t1 = (b - a) * fm;
        let t2 = (a * 2.0 - b + z) * f0;
        let t3 = -a * fp;
        let scale = t1.norm().max(t2.norm()).max(t3.norm()).max(1.0);
        let residual = (t1 + t2 + t3).norm() / scale;
        assert!(residual < 1e-9, "residual {residual} at a={a} b={b} z={z}");
    }
}

/// A reproducible random normalized state; the tail stays exactly zero so
/// truncated representations accept it.
fn random_state(rng: &mut ChaCha8Rng, dim: usize, support: usize) -> StateVector {
    let amps = DVector::from_fn(dim, |m, _| {
        if m < support {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        } else {
            c(0.0, 0.0)
        }
    });
    StateVector::new(amps).expect("random draws are not the zero vector")
}

#[test]
fn uncertainty_product_never_negative_on_random_states() {
    // σ_A²σ_B² − (¼⟨C⟩² + σ_AB²) ≥ −1e−9 for 1000 random states per algebra
    let reps = [
        build_su2_rep(2.0).unwrap(),
        build_su11_rep(0.75, 128).unwrap(),
        build_qp_realization(128).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for rep in &reps {
        let support = if rep.truncation.is_some() {
            rep.dim() / 2
        } else {
            rep.dim()
        };
        for trial in 0..1000 {
            let psi = random_state(&mut rng, rep.dim(), support);
            let m = compute_moments(rep, &psi).unwrap();
            assert!(
                m.ur_residual() >= -1e-9,
                "negative residual {} on {:?} trial {trial}",
                m.ur_residual(),
                rep.kind
            );
        }
    }
}

#[test]
fn accepted_gis_solutions_carry_valid_certificates() {
    // Every accepted solution satisfies ‖L(λ)ψ − zψ‖ < 1e−9, re-verified here
    // against the dense operator rather than the solver's own band arithmetic.
    let mut rng = ChaCha8Rng::seed_from_u64(67);
    for trial in 0..25 {
        let lambda = c(rng.random_range(0.4..2.5), rng.random_range(-1.0..1.0));
        let z = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let k = rng.random_range(0.2..2.5);
        let seed_rep = build_su11_rep(k, 128).unwrap();
        let sol = solve_su11_gis(&seed_rep, lambda, z).unwrap();
        assert!(
            sol.residual < 1e-9,
            "certificate {} on trial {trial}",
            sol.residual
        );
        assert!(sol.state.dim() <= 4096, "draws stay at desk scale");
        let dense = build_su11_rep(k, sol.state.dim()).unwrap();
        let l = lambda_operator(&dense, lambda);
        let defect = (&l.entries * sol.state.amps() - sol.state.amps() * z).norm();
        assert!(defect < 1e-9, "dense re-check {defect} on trial {trial}");

        let qp_rep = build_qp_realization(128).unwrap();
        let sol = solve_canonical_gis(&qp_rep, lambda, z).unwrap();
        assert!(sol.residual < 1e-9);
        let dense = build_qp_realization(sol.state.dim()).unwrap();
        let l = lambda_operator(&dense, lambda);
        let defect = (&l.entries * sol.state.amps() - sol.state.amps() * z).norm();
        assert!(
            defect < 1e-9,
            "oscillator dense re-check {defect} on trial {trial}"
        );
    }
}

#[test]
fn perelomov_negation_flips_the_eigenvalue() {
    // |−ζ⟩ is the eigenstate of the same L(λ) at −z: λ = (1−ζ²)/(1+ζ²),
    // z = 2kζ/(1+ζ²)
    let k = 0.75;
    for zeta in [c(0.35, 0.2), c(0.1, -0.55), c(-0.4, 0.0)] {
        let one = c(1.0, 0.0);
        let lambda = (one - zeta * zeta) / (one + zeta * zeta);
        let z = zeta * 2.0 * k / (one + zeta * zeta);
        for sign in [1.0, -1.0] {
            let cs = perelomov_cs(k, zeta * sign, 256).unwrap();
            let rep = build_su11_rep(k, cs.dim()).unwrap();
            let l = lambda_operator(&rep, lambda);
            let defect = (&l.entries * cs.amps() - cs.amps() * (z * sign)).norm();
            assert!(defect < 1e-9, "defect {defect} at ζ = {}", zeta * sign);
        }
    }
}

#[test]
fn state_constructors_are_bit_exact_deterministic() {
    let rep = build_su11_rep(0.6, 128).unwrap();
    let a = solve_su11_gis(&rep, c(1.3, 0.4), c(0.8, 0.0)).unwrap();
    let b = solve_su11_gis(&rep, c(1.3, 0.4), c(0.8, 0.0)).unwrap();
    assert_eq!(a.state, b.state, "solver output is bit-identical");
    assert_eq!(a.residual.to_bits(), b.residual.to_bits());

    assert_eq!(
        perelomov_cs(0.5, c(0.3, 0.4), 128).unwrap(),
        perelomov_cs(0.5, c(0.3, 0.4), 128).unwrap()
    );
    assert_eq!(
        bloch_cs(2.5, c(0.7, -0.2)).unwrap(),
        bloch_cs(2.5, c(0.7, -0.2)).unwrap()
    );
    assert_eq!(
        bg_cs(0.25, c(1.1, 0.6), 256).unwrap(),
        bg_cs(0.25, c(1.1, 0.6), 256).unwrap()
    );

    let rep2 = build_su2_rep(2.0).unwrap();
    let s1 = solve_su2_gis(&rep2, c(1.7, 0.3)).unwrap();
    let s2 = solve_su2_gis(&rep2, c(1.7, 0.3)).unwrap();
    assert_eq!(s1.pairs.len(), s2.pairs.len());
    for ((z1, v1), (z2, v2)) in s1.pairs.iter().zip(&s2.pairs) {
        assert_eq!(z1, z2, "eigenvalues replay bit-exactly");
        assert_eq!(v1, v2, "eigenvectors replay bit-exactly");
    }
}

#[test]
fn divergence_verdicts_survive_schedule_rescaling() {
    let base = [256usize, 384, 512, 768, 1024];
    let scaled: Vec<usize> = base.iter().map(|&t| t * 3 / 2).collect();
    // imaginary-axis λ: no normalizable state, both schedules say so
    for (k, r) in [(0.25, 0.3), (0.5, 1.0), (1.0, 3.0)] {
        let v1 = axis_divergence_probe(k, r, &base).unwrap().verdict;
        let v2 = axis_divergence_probe(k, r, &scaled).unwrap().verdict;
        assert_eq!(v1, DivergenceVerdict::Diverges, "k = {k}, r = {r}");
        assert_eq!(
            v1, v2,
            "verdict must not depend on the schedule (k = {k}, r = {r})"
        );
    }
    // right-half-plane controls converge under both schedules
    for lambda in [c(1.0, 0.0), c(2.0, 0.0), c(1.0, 1.0)] {
        let v1 = divergence_probe(0.5, lambda, c(1.0, 0.0), &base)
            .unwrap()
            .verdict;
        let v2 = divergence_probe(0.5, lambda, c(1.0, 0.0), &scaled)
            .unwrap()
            .verdict;
        assert_eq!(v1, DivergenceVerdict::Converges, "λ = {lambda}");
        assert_eq!(v1, v2);
    }
}

#[cfg(feature = "parallel")]
#[test]
fn parallel_sweep_matches_serial_row_for_row() {
    use giskit::sweep::{
        run_sweep, run_sweep_parallel, AlgebraTag, LambdaGrid, SweepConfig, ZSelector,
    };
    let cfg = SweepConfig {
        algebra: AlgebraTag::Su11,
        j: None,
        k: Some(0.5),
        truncation: Some(128),
        lambda_grid: LambdaGrid::Linspace {
            re_start: 0.5,
            re_stop: 2.5,
            re_steps: 10,
            im_start: -0.8,
            im_stop: 0.8,
            im_steps: 5,
        },
        z_selector: ZSelector::Explicit(vec!["0.4".into(), "-0.3+0.2i".into()]),
        outputs: giskit::sweep::default_outputs(),
        seed: 3,
    };
    let serial = run_sweep(&cfg).unwrap();
    let parallel = run_sweep_parallel(&cfg).unwrap();
    assert_eq!(serial.rows.len(), 100, "10×5 grid × 2 eigenvalues");
    assert_eq!(serial.rows.len(), parallel.rows.len());
    for (s, p) in serial.rows.iter().zip(&parallel.rows) {
        assert_eq!(s, p, "row-for-row identical output");
    }
}
