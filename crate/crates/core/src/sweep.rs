//! Grid-sweep engine and report serialization.
//!
//! A [`SweepConfig`] (usually parsed from JSON) names a representation, a λ
//! grid, a rule for choosing the eigenvalue z at each λ, and which output
//! groups to populate. [`run_sweep`] evaluates every grid point — building the
//! GIS, extracting moments and squeezing coefficients — and captures per-row
//! failures (non-normalizable region, defective spectrum, undefined q) as
//! sorted flag strings instead of aborting, so divergent regions appear in the
//! output as data. [`emit_report`] serializes to CSV with the fixed column set
//! and 17-significant-digit floats, or to JSON with the config echoed back and
//! provenance attached.
//!
//! Determinism contract: identical configs produce byte-identical CSV, and the
//! parallel engine produces exactly the serial engine's bytes — rows are pure
//! functions of (config, λ, z) and are buffered back into grid order.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moments::{compute_moments, ladder_moments, squeezing_q, Moments, Q_DENOMINATOR_TOL};
use crate::repkit::{
    build_qp_realization, build_su11_rep, build_su2_rep, lambda_operator, uv_coefficients,
    AlgebraKind, RepError, Representation,
};
use crate::states::{
    canonical_ladder, solve_canonical_gis, solve_su11_gis, solve_su2_gis, su11_ladder, StatesError,
};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("config field `{field}`: {message}")]
    Config {
        field: &'static str,
        message: String,
    },
    #[error("failed to write report: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to serialize report: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Rep(#[from] RepError),
}

fn config_err(field: &'static str, message: impl Into<String>) -> SweepError {
    SweepError::Config {
        field,
        message: message.into(),
    }
}

/// Which representation family a sweep runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraTag {
    Su2,
    Su11,
    Qp,
}

/// λ grid: explicit complex values or a separable re/im lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaGrid {
    /// Complex values in "a+bi" string form, swept in the given order.
    Explicit(Vec<String>),
    /// Cartesian product of two inclusive linear ranges; the imaginary axis
    /// varies fastest.
    Linspace {
        re_start: f64,
        re_stop: f64,
        re_steps: usize,
        im_start: f64,
        im_stop: f64,
        im_steps: usize,
    },
}

/// How the eigenvalue z is chosen at each λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZSelector {
    /// Every eigenvalue of L(λ) in descending-ladder order (spin algebra only).
    AllSpectrum,
    /// Explicit list of z values in "a+bi" string form.
    Explicit(Vec<String>),
    /// The pair z = ±2kuζ with ζ = √(−v/u): the two eigenvalues at which the
    /// GIS coincides with a Perelomov coherent state (SU(1,1) only).
    PerelomovPair,
}

/// Output groups; omitted groups leave their columns empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Moments,
    Q,
    Residual,
    Diagnostics,
}

/// The full output selection (moments, q, residual, diagnostics); also the
/// serde default when a config omits `outputs`.
pub fn default_outputs() -> Vec<OutputKind> {
    vec![
        OutputKind::Moments,
        OutputKind::Q,
        OutputKind::Residual,
        OutputKind::Diagnostics,
    ]
}

/// Declarative sweep description; deserializable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub algebra: AlgebraTag,
    /// Spin, required for `su2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    /// Bargmann index, required for `su11`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Basis truncation, required for `su11` and `qp`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    pub lambda_grid: LambdaGrid,
    pub z_selector: ZSelector,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    /// Echoed into reports; reserved for randomized diagnostics.
    #[serde(default)]
    pub seed: u64,
}

/// Per-row diagnostics (JSON only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowDiagnostics {
    /// ‖L(λ)ψ − zψ‖ of the constructed state.
    pub eigen_residual: f64,
    /// Probability mass in the last 10 % of the basis.
    pub tail_mass: f64,
    /// Basis dimension actually used (after adaptive growth).
    pub dimension: usize,
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub re_lambda: f64,
    pub im_lambda: f64,
    pub re_z: Option<f64>,
    pub im_z: Option<f64>,
    pub mean_a: Option<f64>,
    pub mean_b: Option<f64>,
    pub mean_c: Option<f64>,
    pub var_a: Option<f64>,
    pub var_b: Option<f64>,
    pub cov_ab: Option<f64>,
    pub ur_lhs: Option<f64>,
    pub ur_rhs: Option<f64>,
    pub residual: Option<f64>,
    pub q_a: Option<f64>,
    pub q_b: Option<f64>,
    /// Sorted condition flags; empty means a clean row.
    pub flags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<RowDiagnostics>,
}

/// Report metadata: tool identity, creation time, and the closed-form
/// conventions used for the squeezing columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub created_unix_seconds: u64,
    /// The λ-dependence used for GIS squeezing, plus the rejected factor-two
    /// variant, kept side by side for transparency: the variant fails the
    /// equal-variance case, where q must vanish at λ = 1.
    pub q_closed_forms: QClosedForms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QClosedForms {
    pub used_q_a: String,
    pub used_q_b: String,
    pub factor_two_variant_q_a: String,
    pub factor_two_variant_q_b: String,
    pub note: String,
}

impl Default for QClosedForms {
    fn default() -> Self {
        QClosedForms {
            used_q_a: "1 - 1/Re(lambda)".to_string(),
            used_q_b: "1 - |lambda|^2/Re(lambda)".to_string(),
            factor_two_variant_q_a: "1 - 1/(2 Re(lambda))".to_string(),
            factor_two_variant_q_b: "1 - |lambda|^2/(2 Re(lambda))".to_string(),
            note: "the factor-two variant gives q_a = 1/2 instead of 0 in the equal-variance \
                   case lambda = 1 and is therefore not used for the q columns"
                .to_string(),
        }
    }
}

/// Evaluated sweep: config echo, rows in grid order, provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub provenance: Provenance,
    pub rows: Vec<SweepRow>,
}

/// Report serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Parses the locale-independent complex literal form "a+bi" / "a-bi":
/// both parts optional ("2", "3i", "-i", "1.5e-3+2e1i" all parse).
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t = s.trim().replace(' ', "");
    if t.is_empty() {
        return Err("empty complex literal".to_string());
    }
    if let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('I')) {
        // find the +/- separating real and imaginary parts: last sign that is
        // neither the leading sign nor part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let ch = bytes[idx] as char;
            if (ch == '+' || ch == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
                split = Some(idx);
                break;
            }
        }
        let (re_str, im_str) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("0", body),
        };
        let im = match im_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other
                .parse::<f64>()
                .map_err(|e| format!("bad imaginary part: {e}"))?,
        };
        let re = if re_str.is_empty() {
            0.0
        } else {
            re_str
                .parse::<f64>()
                .map_err(|e| format!("bad real part: {e}"))?
        };
        Ok(C64::new(re, im))
    } else {
        let re = t
            .parse::<f64>()
            .map_err(|e| format!("bad real literal: {e}"))?;
        Ok(C64::new(re, 0.0))
    }
}

fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![start];
    }
    let h = (stop - start) / (steps - 1) as f64;
    (0..steps).map(|i| start + h * i as f64).collect()
}

struct Resolved {
    kind: AlgebraKind,
    k: f64,
    su_rep: Option<Representation>,
    lambdas: Vec<C64>,
    z_explicit: Vec<C64>,
    selector: Selector,
    want_moments: bool,
    want_q: bool,
    want_residual: bool,
    want_diagnostics: bool,
}

#[derive(PartialEq, Eq, Clone, Copy)]
enum Selector {
    Spectrum,
    Explicit,
    Pair,
}

fn resolve(config: &SweepConfig) -> Result<Resolved, SweepError> {
    let kind = match config.algebra {
        AlgebraTag::Su2 => AlgebraKind::Su2,
        AlgebraTag::Su11 => AlgebraKind::Su11,
        AlgebraTag::Qp => AlgebraKind::CanonicalQp,
    };
    let (k, su_rep) = match kind {
        AlgebraKind::Su2 => {
            let j = config
                .j
                .ok_or_else(|| config_err("j", "required for algebra su2"))?;
            let rep = build_su2_rep(j).map_err(|e| config_err("j", e.to_string()))?;
            (0.0, Some(rep))
        }
        AlgebraKind::Su11 => {
            let k = config
                .k
                .ok_or_else(|| config_err("k", "required for algebra su11"))?;
            let truncation = config
                .truncation
                .ok_or_else(|| config_err("truncation", "required for algebra su11"))?;
            let rep = build_su11_rep(k, truncation).map_err(|e| match e {
                RepError::InvalidBargmannIndex(_) => config_err("k", e.to_string()),
                other => config_err("truncation", other.to_string()),
            })?;
            (k, Some(rep))
        }
        AlgebraKind::CanonicalQp => {
            let truncation = config
                .truncation
                .ok_or_else(|| config_err("truncation", "required for algebra qp"))?;
            let rep = build_qp_realization(truncation)
                .map_err(|e| config_err("truncation", e.to_string()))?;
            (0.25, Some(rep))
        }
    };

    let lambdas: Vec<C64> = match &config.lambda_grid {
        LambdaGrid::Explicit(list) => {
            if list.is_empty() {
                return Err(config_err("lambda_grid", "explicit grid must be non-empty"));
            }
            list.iter()
                .map(|s| parse_complex(s).map_err(|e| config_err("lambda_grid", e)))
                .collect::<Result<_, _>>()?
        }
        LambdaGrid::Linspace {
            re_start,
            re_stop,
            re_steps,
            im_start,
            im_stop,
            im_steps,
        } => {
            if *re_steps == 0 || *im_steps == 0 {
                return Err(config_err(
                    "lambda_grid",
                    "linspace steps must be at least 1",
                ));
            }
            let mut grid = Vec::with_capacity(re_steps * im_steps);
            for re in linspace(*re_start, *re_stop, *re_steps) {
                for im in linspace(*im_start, *im_stop, *im_steps) {
                    grid.push(C64::new(re, im));
                }
            }
            grid
        }
    };
    if lambdas
        .iter()
        .any(|l| !(l.re.is_finite() && l.im.is_finite()))
    {
        return Err(config_err(
            "lambda_grid",
            "grid contains a non-finite value",
        ));
    }

    let (selector, z_explicit) = match &config.z_selector {
        ZSelector::AllSpectrum => {
            if kind != AlgebraKind::Su2 {
                return Err(config_err(
                    "z_selector",
                    "all_spectrum requires a finite spectrum (algebra su2)",
                ));
            }
            (Selector::Spectrum, Vec::new())
        }
        ZSelector::Explicit(list) => {
            if list.is_empty() {
                return Err(config_err(
                    "z_selector",
                    "explicit z list must be non-empty",
                ));
            }
            let zs = list
                .iter()
                .map(|s| parse_complex(s).map_err(|e| config_err("z_selector", e)))
                .collect::<Result<Vec<_>, _>>()?;
            (Selector::Explicit, zs)
        }
        ZSelector::PerelomovPair => {
            if kind != AlgebraKind::Su11 {
                return Err(config_err(
                    "z_selector",
                    "perelomov_pair is defined on the discrete series (algebra su11)",
                ));
            }
            (Selector::Pair, Vec::new())
        }
    };

    Ok(Resolved {
        kind,
        k,
        su_rep,
        lambdas,
        z_explicit,
        selector,
        want_moments: config.outputs.contains(&OutputKind::Moments),
        want_q: config.outputs.contains(&OutputKind::Q),
        want_residual: config.outputs.contains(&OutputKind::Residual),
        want_diagnostics: config.outputs.contains(&OutputKind::Diagnostics),
    })
}

fn blank_row(lambda: C64) -> SweepRow {
    SweepRow {
        re_lambda: lambda.re,
        im_lambda: lambda.im,
        re_z: None,
        im_z: None,
        mean_a: None,
        mean_b: None,
        mean_c: None,
        var_a: None,
        var_b: None,
        cov_ab: None,
        ur_lhs: None,
        ur_rhs: None,
        residual: None,
        q_a: None,
        q_b: None,
        flags: Vec::new(),
        diagnostics: None,
    }
}

fn fill_row(row: &mut SweepRow, m: &Moments, r: &Resolved) {
    if r.want_moments {
        row.mean_a = Some(m.mean_a);
        row.mean_b = Some(m.mean_b);
        row.mean_c = Some(m.mean_c);
        row.var_a = Some(m.var_a);
        row.var_b = Some(m.var_b);
        row.cov_ab = Some(m.cov_ab);
        row.ur_lhs = Some(m.ur_lhs());
        row.ur_rhs = Some(m.ur_rhs());
    }
    if r.want_residual {
        row.residual = Some(m.ur_residual());
    }
    if m.mean_c.abs() < Q_DENOMINATOR_TOL {
        row.flags.push("UndefinedQ".to_string());
    } else if r.want_q {
        let (qa, qb) = squeezing_q(m);
        row.q_a = qa;
        row.q_b = qb;
    }
}

fn push_flag_for_error(row: &mut SweepRow, err: &StatesError) {
    let flag = match err {
        StatesError::PreconditionReLambda(_) | StatesError::NonNormalizable { .. } => {
            "NonNormalizable"
        }
        StatesError::TruncationCap { .. } => "TruncationCap",
        _ => "ConstructionError",
    };
    row.flags.push(flag.to_string());
}

fn rows_for_lambda(r: &Resolved, lambda: C64) -> Vec<SweepRow> {
    match r.kind {
        AlgebraKind::Su2 => {
            let rep = r.su_rep.as_ref().expect("spin representation prebuilt");
            let spectrum = match solve_su2_gis(rep, lambda) {
                Ok(s) => s,
                Err(e) => {
                    let mut row = blank_row(lambda);
                    push_flag_for_error(&mut row, &e);
                    row.flags.sort();
                    return vec![row];
                }
            };
            let l = lambda_operator(rep, lambda);
            let picked: Vec<(C64, &crate::repkit::StateVector)> = match r.selector {
                Selector::Spectrum => spectrum.pairs.iter().map(|(z, s)| (*z, s)).collect(),
                Selector::Explicit => r
                    .z_explicit
                    .iter()
                    .map(|z| {
                        let (zn, s) = spectrum
                            .pairs
                            .iter()
                            .min_by(|a, b| (a.0 - z).norm().partial_cmp(&(b.0 - z).norm()).unwrap())
                            .expect("spin spectrum is nonempty");
                        (*zn, s)
                    })
                    .collect(),
                Selector::Pair => unreachable!("rejected during config validation"),
            };
            picked
                .into_iter()
                .map(|(z, state)| {
                    let mut row = blank_row(lambda);
                    row.re_z = Some(z.re);
                    row.im_z = Some(z.im);
                    if spectrum.defective {
                        row.flags.push("DefectiveSpectrum".to_string());
                    }
                    match compute_moments(rep, state) {
                        Ok(m) => fill_row(&mut row, &m, r),
                        Err(_) => row.flags.push("ConstructionError".to_string()),
                    }
                    if r.want_diagnostics {
                        let eigen_residual = (&l.entries * state.amps() - state.amps() * z).norm();
                        row.diagnostics = Some(RowDiagnostics {
                            eigen_residual,
                            tail_mass: state.tail_mass(),
                            dimension: state.dim(),
                        });
                    }
                    row.flags.sort();
                    row
                })
                .collect()
        }
        AlgebraKind::Su11 | AlgebraKind::CanonicalQp => {
            let zs: Vec<C64> = match r.selector {
                Selector::Explicit => r.z_explicit.clone(),
                Selector::Pair => {
                    let (u, v) = uv_coefficients(lambda);
                    let zeta = (-v / u).sqrt();
                    let z_plus = 2.0 * r.k * u * zeta;
                    vec![z_plus, -z_plus]
                }
                Selector::Spectrum => unreachable!("rejected during config validation"),
            };
            let rep = r.su_rep.as_ref().expect("ladder representation prebuilt");
            zs.into_iter()
                .map(|z| {
                    let mut row = blank_row(lambda);
                    row.re_z = Some(z.re);
                    row.im_z = Some(z.im);
                    let solved = match r.kind {
                        AlgebraKind::Su11 => solve_su11_gis(rep, lambda, z),
                        _ => solve_canonical_gis(rep, lambda, z),
                    };
                    match solved {
                        Ok(sol) => {
                            let amps: Vec<C64> = sol.state.amps().iter().copied().collect();
                            let m = match r.kind {
                                AlgebraKind::Su11 => {
                                    ladder_moments(su11_ladder(r.k), |i| r.k + i as f64, &amps)
                                }
                                _ => ladder_moments(canonical_ladder(), |_| 1.0, &amps),
                            };
                            fill_row(&mut row, &m, r);
                            if r.want_diagnostics {
                                row.diagnostics = Some(RowDiagnostics {
                                    eigen_residual: sol.residual,
                                    tail_mass: sol.tail_mass,
                                    dimension: sol.state.dim(),
                                });
                            }
                        }
                        Err(e) => push_flag_for_error(&mut row, &e),
                    }
                    row.flags.sort();
                    row
                })
                .collect()
        }
    }
}

fn make_provenance() -> Provenance {
    let created_unix_seconds = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Provenance {
        tool: format!("giskit {}", env!("CARGO_PKG_VERSION")),
        created_unix_seconds,
        q_closed_forms: QClosedForms::default(),
    }
}

/// Evaluates the sweep serially in grid order.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult, SweepError> {
    let resolved = resolve(config)?;
    let rows: Vec<SweepRow> = resolved
        .lambdas
        .iter()
        .flat_map(|&l| rows_for_lambda(&resolved, l))
        .collect();
    Ok(SweepResult {
        config: config.clone(),
        provenance: make_provenance(),
        rows,
    })
}

/// Evaluates the sweep across threads; rows are buffered back into grid order
/// and are bit-identical to [`run_sweep`]'s output.
#[cfg(feature = "parallel")]
pub fn run_sweep_parallel(config: &SweepConfig) -> Result<SweepResult, SweepError> {
    use rayon::prelude::*;
    let resolved = resolve(config)?;
    let per_lambda: Vec<Vec<SweepRow>> = resolved
        .lambdas
        .par_iter()
        .map(|&l| rows_for_lambda(&resolved, l))
        .collect();
    let rows: Vec<SweepRow> = per_lambda.into_iter().flatten().collect();
    Ok(SweepResult {
        config: config.clone(),
        provenance: make_provenance(),
        rows,
    })
}

/// 17-significant-digit float cell (1 leading + 16 fractional digits).
fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}

fn opt_cell(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

/// CSV header, fixed column order.
pub const CSV_HEADER: &str = "re_lambda,im_lambda,re_z,im_z,mean_a,mean_b,mean_c,var_a,var_b,\
                              cov_ab,ur_lhs,ur_rhs,residual,q_a,q_b,flags";

/// Renders the result as CSV: fixed columns, empty cells for undefined values,
/// flags semicolon-joined (already sorted).
pub fn to_csv_string(result: &SweepResult) -> String {
    let mut out = String::with_capacity(64 + result.rows.len() * 256);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        let cells = [
            fmt17(row.re_lambda),
            fmt17(row.im_lambda),
            opt_cell(row.re_z),
            opt_cell(row.im_z),
            opt_cell(row.mean_a),
            opt_cell(row.mean_b),
            opt_cell(row.mean_c),
            opt_cell(row.var_a),
            opt_cell(row.var_b),
            opt_cell(row.cov_ab),
            opt_cell(row.ur_lhs),
            opt_cell(row.ur_rhs),
            opt_cell(row.residual),
            opt_cell(row.q_a),
            opt_cell(row.q_b),
            row.flags.join(";"),
        ];
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Renders the result as pretty JSON (schema mirrors the CSV columns, plus the
/// config echo, provenance, and optional per-row diagnostics).
pub fn to_json_string(result: &SweepResult) -> Result<String, SweepError> {
    Ok(serde_json::to_string_pretty(result)?)
}

/// Writes the report to `path` in the chosen format.
pub fn emit_report(
    result: &SweepResult,
    format: ReportFormat,
    path: &std::path::Path,
) -> Result<(), SweepError> {
    let body = match format {
        ReportFormat::Csv => to_csv_string(result),
        ReportFormat::Json => to_json_string(result)?,
    };
    std::fs::write(path, body)?;
    Ok(())
}
