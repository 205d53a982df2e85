//! Browser-facing wrappers around the giskit library.
//!
//! Every export takes plain strings/numbers and returns a JSON string, so the
//! demo page needs no generated TypeScript glue beyond the loader. Failures
//! come back as `{"error": "..."}` instead of thrown exceptions — the page
//! checks one key and the wasm boundary stays panic-free for all inputs.
//!
//! The three operations mirror the CLI:
//! * [`state_moments`] — one generalized intelligent state (an eigenstate of
//!   λA + iB) with its moments, uncertainty product, and squeezing
//!   coefficients q = 1 − 2σ²/⟨C⟩.
//! * [`lambda_scan`] — variances and q along a real-λ segment at fixed z,
//!   returned as columnar arrays ready for plotting.
//! * [`squeezing_scan`] — the oscillator-quadrature squeezing profile of a
//!   coherent family embedded on one Fock parity sector.

use wasm_bindgen::prelude::wasm_bindgen;

use giskit::moments::{compute_moments, predicted_gis_q, squeezing_q};
use giskit::repkit::{build_qp_realization, build_su11_rep, build_su2_rep, Representation};
use giskit::states::{solve_canonical_gis, solve_su11_gis, solve_su2_gis};
use giskit::sweep::parse_complex;
use giskit::verify::{qp_squeezing_scan, ScanFamily, Sector};
use giskit::C64;

use serde_json::json;

/// Dimension cap for the browser: large enough for every sensible demo input,
/// small enough that a hostile parameter cannot stall the tab.
const WASM_DIM_CAP: usize = 2048;

fn err_json(message: impl std::fmt::Display) -> String {
    json!({ "error": message.to_string() }).to_string()
}

fn cjson(z: C64) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

/// Builds the requested representation; `scale` is j for "su2", k for "su11",
/// and ignored for "qp".
fn build_rep(algebra: &str, scale: f64, truncation: usize) -> Result<Representation, String> {
    if truncation > WASM_DIM_CAP {
        return Err(format!(
            "truncation {truncation} exceeds the browser cap {WASM_DIM_CAP}"
        ));
    }
    match algebra {
        "su2" => build_su2_rep(scale).map_err(|e| e.to_string()),
        "su11" => build_su11_rep(scale, truncation).map_err(|e| e.to_string()),
        "qp" => build_qp_realization(truncation).map_err(|e| e.to_string()),
        other => Err(format!("unknown algebra {other:?}; use su2, su11, or qp")),
    }
}

fn state_moments_impl(
    algebra: &str,
    scale: f64,
    truncation: usize,
    lambda: &str,
    z: &str,
) -> Result<String, String> {
    let lambda = parse_complex(lambda).map_err(|e| format!("lambda: {e}"))?;
    let z_requested = parse_complex(z).map_err(|e| format!("z: {e}"))?;
    let rep = build_rep(algebra, scale, truncation)?;

    let (rep, z, state, residual, defective) = match algebra {
        "su2" => {
            let spectrum = solve_su2_gis(&rep, lambda).map_err(|e| e.to_string())?;
            let (z, state) = spectrum
                .pairs
                .iter()
                .min_by(|a, b| {
                    let da = (a.0 - z_requested).norm();
                    let db = (b.0 - z_requested).norm();
                    da.partial_cmp(&db).expect("finite distances")
                })
                .cloned()
                .ok_or("empty spectrum")?;
            (rep, z, state, 0.0, spectrum.defective)
        }
        _ => {
            let sol = match algebra {
                "su11" => solve_su11_gis(&rep, lambda, z_requested),
                _ => solve_canonical_gis(&rep, lambda, z_requested),
            }
            .map_err(|e| e.to_string())?;
            let rep = if sol.state.dim() == rep.dim() {
                rep
            } else if sol.state.dim() > WASM_DIM_CAP {
                return Err(format!(
                    "state needed dimension {}, past the browser cap {WASM_DIM_CAP}",
                    sol.state.dim()
                ));
            } else {
                build_rep(algebra, scale, sol.state.dim())?
            };
            (rep, sol.spec.z, sol.state, sol.residual, false)
        }
    };

    let m = compute_moments(&rep, &state).map_err(|e| e.to_string())?;
    let (q_a, q_b) = squeezing_q(&m);
    let predicted_q = predicted_gis_q(lambda).ok();
    Ok(json!({
        "algebra": algebra,
        "lambda": cjson(lambda),
        "z": cjson(z),
        "dimension": state.dim(),
        "residual": residual,
        "defective_spectrum": defective,
        "mean_a": m.mean_a,
        "mean_b": m.mean_b,
        "mean_c": m.mean_c,
        "var_a": m.var_a,
        "var_b": m.var_b,
        "cov_ab": m.cov_ab,
        "ur_lhs": m.ur_lhs(),
        "ur_rhs": m.ur_rhs(),
        "ur_residual": m.ur_residual(),
        "q_a": q_a,
        "q_b": q_b,
        "closed_form_q_a": predicted_q.map(|p| p.0),
        "closed_form_q_b": predicted_q.map(|p| p.1),
    })
    .to_string())
}

/// One state end to end: construction, moments, uncertainty product, q.
#[wasm_bindgen]
pub fn state_moments(
    algebra: &str,
    scale: f64,
    truncation: usize,
    lambda: &str,
    z: &str,
) -> String {
    state_moments_impl(algebra, scale, truncation, lambda, z).unwrap_or_else(err_json)
}

fn lambda_scan_impl(
    algebra: &str,
    scale: f64,
    truncation: usize,
    re_start: f64,
    re_stop: f64,
    steps: usize,
    z: &str,
) -> Result<String, String> {
    if !(2..=512).contains(&steps) {
        return Err("steps must be between 2 and 512".to_string());
    }
    if !(re_start.is_finite() && re_stop.is_finite() && re_stop > re_start) {
        return Err("need finite re_stop > re_start".to_string());
    }
    let z = parse_complex(z).map_err(|e| format!("z: {e}"))?;
    let mut lambdas = Vec::with_capacity(steps);
    let mut var_a = Vec::with_capacity(steps);
    let mut var_b = Vec::with_capacity(steps);
    let mut q_a: Vec<Option<f64>> = Vec::with_capacity(steps);
    let mut q_b: Vec<Option<f64>> = Vec::with_capacity(steps);
    let mut flags: Vec<Option<String>> = Vec::with_capacity(steps);
    let step = (re_stop - re_start) / (steps - 1) as f64;
    for i in 0..steps {
        let re = re_start + step * i as f64;
        lambdas.push(re);
        let result =
            state_moments_impl(algebra, scale, truncation, &format!("{re}"), &z.to_string());
        match result {
            Ok(body) => {
                let v: serde_json::Value = serde_json::from_str(&body).expect("own output parses");
                var_a.push(v["var_a"].as_f64());
                var_b.push(v["var_b"].as_f64());
                q_a.push(v["q_a"].as_f64());
                q_b.push(v["q_b"].as_f64());
                flags.push(None);
            }
            Err(message) => {
                var_a.push(None);
                var_b.push(None);
                q_a.push(None);
                q_b.push(None);
                flags.push(Some(message));
            }
        }
    }
    Ok(json!({
        "algebra": algebra,
        "z": cjson(z),
        "re_lambda": lambdas,
        "var_a": var_a,
        "var_b": var_b,
        "q_a": q_a,
        "q_b": q_b,
        "flags": flags,
    })
    .to_string())
}

/// Variances and squeezing coefficients along real λ ∈ [re_start, re_stop]
/// at fixed z; points where no normalizable state exists carry a flag and
/// null values instead of failing the whole scan.
#[wasm_bindgen]
pub fn lambda_scan(
    algebra: &str,
    scale: f64,
    truncation: usize,
    re_start: f64,
    re_stop: f64,
    steps: usize,
    z: &str,
) -> String {
    lambda_scan_impl(algebra, scale, truncation, re_start, re_stop, steps, z)
        .unwrap_or_else(err_json)
}

fn squeezing_scan_impl(
    family: &str,
    sector: &str,
    start: f64,
    stop: f64,
    points: usize,
    truncation: usize,
) -> Result<String, String> {
    if !(2..=2048).contains(&points) {
        return Err("points must be between 2 and 2048".to_string());
    }
    if !(start.is_finite() && stop.is_finite() && stop > start) {
        return Err("need finite stop > start".to_string());
    }
    if truncation > WASM_DIM_CAP {
        return Err(format!(
            "truncation {truncation} exceeds the browser cap {WASM_DIM_CAP}"
        ));
    }
    let family = match family {
        "bg" => ScanFamily::BarutGirardello,
        "perelomov" => ScanFamily::Perelomov,
        other => return Err(format!("unknown family {other:?}; use bg or perelomov")),
    };
    let sector = match sector {
        "even" => Sector::Even,
        "odd" => Sector::Odd,
        other => return Err(format!("unknown sector {other:?}; use even or odd")),
    };
    let step = (stop - start) / (points - 1) as f64;
    let grid: Vec<C64> = (0..points)
        .map(|i| C64::new(start + step * i as f64, 0.0))
        .collect();
    let report = qp_squeezing_scan(family, sector, &grid, truncation).map_err(|e| e.to_string())?;
    let best = report.points[report.best_index];
    Ok(json!({
        "family": format!("{family:?}"),
        "sector": format!("{sector:?}"),
        "param": report.points.iter().map(|p| p.param.re).collect::<Vec<f64>>(),
        "var_q": report.points.iter().map(|p| p.var_q).collect::<Vec<f64>>(),
        "var_p": report.points.iter().map(|p| p.var_p).collect::<Vec<f64>>(),
        "percent": report.points.iter().map(|p| p.percent).collect::<Vec<f64>>(),
        "best_param": best.param.re,
        "best_percent": best.percent,
    })
    .to_string())
}

/// Quadrature-squeezing profile of a coherent family (family: "bg" or
/// "perelomov") on one parity sector ("even" → k = 1/4, "odd" → k = 3/4)
/// over a real parameter grid. Positive percent means squeezing below the
/// vacuum variance ½.
#[wasm_bindgen]
pub fn squeezing_scan(
    family: &str,
    sector: &str,
    start: f64,
    stop: f64,
    points: usize,
    truncation: usize,
) -> String {
    squeezing_scan_impl(family, sector, start, stop, points, truncation).unwrap_or_else(err_json)
}
