//! Runs the analyses of a config and assembles the JSON report and CSV
//! curves.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::{Analysis, AnalysisConfig, System};
use crate::error::{FrameError, Result};
use crate::family::{analysis_window, ess_range, global_density, translate_frame_bounds, FrameBounds, GeneratorFamily};
use crate::operator::{
    biorthogonality_check, dual_commutation_check, dual_frame_bounds, independence_test, section_inverse_norm_sweep,
    shift_operator_check, SweepReport, SweepRequest,
};
use crate::oracle::{discretized_frame_bounds, random_band_limited, Grid, OracleBounds};
use crate::spectrum::Spectral;
use crate::systems::{
    gabor_frame_bounds, reciprocal_step_bounds, reciprocal_step_family, wavelet_diagnostics, WaveletDiagnostics,
};

pub const SCHEMA_VERSION: &str = "1.0.0";

/// Pieces of each random test function.
const TEST_FUNCTION_PIECES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Analytic,
    Oracle,
}

/// What a CLI subcommand runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Analyze,
    Gabor,
    Wavelet,
    Dual,
    FiniteSection,
    Independence,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Gabor => "gabor",
            Command::Wavelet => "wavelet",
            Command::Dual => "dual",
            Command::FiniteSection => "finite-section",
            Command::Independence => "independence",
        }
    }

    fn accepts(self, sys: &System) -> bool {
        match self {
            Command::Analyze => matches!(sys, System::Translates(_)),
            Command::Gabor => matches!(sys, System::Gabor(_)),
            Command::Wavelet => matches!(sys, System::Wavelet(_)),
            _ => !matches!(sys, System::Wavelet(_)),
        }
    }

    /// Analyses to run: the command's own for single-purpose commands,
    /// otherwise the config list or the default.
    fn analyses(self, cfg: &AnalysisConfig) -> Vec<Analysis> {
        match self {
            Command::Dual => vec![Analysis::Dual],
            Command::FiniteSection => vec![Analysis::FiniteSection],
            Command::Independence => vec![Analysis::Independence],
            Command::Wavelet => cfg.analysis_list(&[Analysis::Wavelet]),
            Command::Analyze | Command::Gabor => cfg.analysis_list(&[Analysis::Bounds]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SystemSummary {
    pub kind: String,
    pub support_length: f64,
    pub slots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DensitySummary {
    pub period: Option<f64>,
    pub window: [f64; 2],
    pub ess_range: [f64; 2],
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundsBlock {
    pub alpha: f64,
    pub beta: f64,
    pub tight: bool,
    pub parseval: bool,
    pub provenance: Provenance,
}

impl BoundsBlock {
    fn new(b: FrameBounds, tol: f64, provenance: Provenance) -> Self {
        let b = FrameBounds::with_tolerance(b.lower, b.upper, tol);
        BoundsBlock { alpha: b.lower, beta: b.upper, tight: b.is_tight, parseval: b.is_parseval, provenance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Discrepancy {
    pub claim: String,
    pub claimed: serde_json::Value,
    pub computed_alpha: f64,
    pub computed_beta: f64,
    pub note: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DualBlock {
    pub alpha: f64,
    pub beta: f64,
    pub predicted_alpha: f64,
    pub predicted_beta: f64,
    pub max_deviation: f64,
    pub commutation_residual: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleBlock {
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
    pub min_eig: f64,
    pub max_eig: f64,
    pub max_block: usize,
    /// Relative errors against the analytic bounds, when available.
    pub rel_err_alpha: Option<f64>,
    pub rel_err_beta: Option<f64>,
    pub provenance: Provenance,
}

impl OracleBlock {
    fn new(o: &OracleBounds, analytic: Option<FrameBounds>) -> Self {
        let rel = |x: f64, r: f64| (x - r).abs() / r.abs();
        OracleBlock {
            n: o.grid.n,
            lo: o.grid.lo,
            hi: o.grid.hi,
            min_eig: o.min_eig,
            max_eig: o.max_eig,
            max_block: o.max_block,
            rel_err_alpha: analytic.map(|b| rel(o.min_eig, b.lower)),
            rel_err_beta: analytic.map(|b| rel(o.max_eig, b.upper)),
            provenance: Provenance::Oracle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RescalingBlock {
    pub alpha: f64,
    pub beta: f64,
    pub provenance: Provenance,
    pub oracle: Option<OracleBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepRowOut {
    pub s: usize,
    pub t: usize,
    pub j: String,
    pub norm_inv: f64,
    pub max_coeff_err: Option<f64>,
    pub cond: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepSummaryOut {
    pub j: String,
    pub observed_sup: f64,
    pub final_value: f64,
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FiniteSectionBlock {
    pub test_functions: usize,
    pub seed: u64,
    pub rows: Vec<SweepRowOut>,
    pub summary: Vec<SweepSummaryOut>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ErrorInfo {
    pub code: String,
    pub message: String,
}

impl From<&FrameError> for ErrorInfo {
    fn from(e: &FrameError) -> Self {
        ErrorInfo { code: e.code().to_string(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IndependenceBlock {
    pub s: usize,
    pub t: usize,
    pub rank: usize,
    pub dim: usize,
    pub deficiency: usize,
    pub is_independent: bool,
    pub biorthogonality_deviation: f64,
    pub shift_residual: Option<f64>,
    pub shift_error: Option<ErrorInfo>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WaveletBlock {
    pub window: [f64; 2],
    pub inf: f64,
    pub sup: f64,
    pub zero_set_measure: f64,
    pub tail_bound: Option<f64>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FrameReport {
    pub schema_version: String,
    pub command: String,
    pub name: Option<String>,
    pub system: SystemSummary,
    pub analyses: Vec<Analysis>,
    pub density: Option<DensitySummary>,
    pub bounds: Option<BoundsBlock>,
    pub dual: Option<DualBlock>,
    pub oracle: Option<OracleBlock>,
    pub rescaling: Option<RescalingBlock>,
    pub finite_section: Option<FiniteSectionBlock>,
    pub independence: Option<IndependenceBlock>,
    pub wavelet: Option<WaveletBlock>,
    pub discrepancies: Vec<Discrepancy>,
    pub warnings: Vec<String>,
    pub timing: Timing,
}

impl FrameReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the timing zeroed, for determinism comparisons.
    pub fn to_json_without_timing(&self) -> String {
        let mut r = self.clone();
        r.timing.elapsed_ms = 0.0;
        r.to_json()
    }
}

/// Report plus the CSV files it produced, as `(file name, contents)`.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: FrameReport,
    pub csv: Vec<(String, String)>,
}

impl RunOutput {
    pub fn write_to(&self, dir: &Path, with_csv: bool) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.report.to_json() + "\n")?;
        if with_csv {
            for (name, body) in &self.csv {
                std::fs::write(dir.join(name), body)?;
            }
        }
        Ok(())
    }
}

pub const DENSITY_CSV_HEADER: &str = "gamma,G";
pub const WAVELET_CSV_HEADER: &str = "gamma,W";

fn curve_csv(header: &str, pts: &[(f64, f64)]) -> String {
    let mut out = format!("{header}\n");
    for (x, y) in pts {
        out.push_str(&format!("{x:.15e},{y:.15e}\n"));
    }
    out
}

/// Runs `cmd` on the config.
pub fn run(cfg: &AnalysisConfig, cmd: Command) -> Result<RunOutput> {
    let start = Instant::now();
    let system = cfg.system.build()?;
    if !cmd.accepts(&system) {
        return Err(FrameError::Config(format!("`{}` does not accept a {} system", cmd.name(), system.kind())));
    }
    let analyses = cmd.analyses(cfg);
    let fam = system.family()?;
    let mut warnings = Vec::new();
    let mut csv = Vec::new();
    let slots = match fam.steps() {
        crate::family::StepRule::PerSlot(v) => v.len(),
        crate::family::StepRule::Shared(_) => 1,
    };
    let mut report = FrameReport {
        schema_version: SCHEMA_VERSION.into(),
        command: cmd.name().into(),
        name: cfg.name.clone(),
        system: SystemSummary { kind: system.kind().into(), support_length: fam.support_length(), slots },
        analyses: analyses.clone(),
        density: None,
        bounds: None,
        dual: None,
        oracle: None,
        rescaling: None,
        finite_section: None,
        independence: None,
        wavelet: None,
        discrepancies: Vec::new(),
        warnings: Vec::new(),
        timing: Timing { elapsed_ms: 0.0 },
    };

    if let System::Wavelet(p) = &system {
        let (lo, hi, trunc) = match &cfg.wavelet {
            Some(w) => (w.lo.0, w.hi.0, w.truncation),
            None => {
                let (a, b) = p.windows[0]
                    .spectrum
                    .support()
                    .ok_or_else(|| FrameError::InvalidParams("wavelet window is zero".into()))?;
                (a, b, None)
            }
        };
        let d: WaveletDiagnostics = wavelet_diagnostics(p, lo, hi, trunc)?;
        warnings.extend(d.warnings.iter().cloned());
        csv.push(("wavelet.csv".into(), curve_csv(WAVELET_CSV_HEADER, &d.curve(cfg.output.resolution))));
        report.wavelet = Some(WaveletBlock {
            window: [lo, hi],
            inf: d.inf,
            sup: d.sup,
            zero_set_measure: d.zero_set_measure,
            tail_bound: d.tail_bound,
            provenance: Provenance::Analytic,
        });
        report.warnings = warnings;
        report.timing.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        return Ok(RunOutput { report, csv });
    }

    let density = global_density(&fam)?;
    let (inf, sup) = ess_range(&density);
    report.density = Some(DensitySummary {
        period: density.period,
        window: [density.window.0, density.window.1],
        ess_range: [inf, sup],
        provenance: Provenance::Analytic,
    });
    csv.push(("density.csv".into(), curve_csv(DENSITY_CSV_HEADER, &density.curve(cfg.output.resolution))));

    let analytic = || -> Result<FrameBounds> {
        match &system {
            System::Gabor(p) => gabor_frame_bounds(p),
            _ => translate_frame_bounds(&fam),
        }
    };

    for a in &analyses {
        match a {
            Analysis::Bounds => {
                let b = analytic()?;
                let block = BoundsBlock::new(b, cfg.tolerances.bound, Provenance::Analytic);
                report.discrepancies = check_claims(cfg, &block, (inf, sup));
                report.bounds = Some(block);
            }
            Analysis::Dual => report.dual = Some(dual_block(&fam)?),
            Analysis::Oracle => {
                let grid = oracle_grid(cfg, &fam)?;
                let o = discretized_frame_bounds(&fam, &grid)?;
                report.oracle = Some(OracleBlock::new(&o, analytic().ok()));
            }
            Analysis::Rescaling => {
                let r = reciprocal_step_bounds(&fam)?;
                warnings.extend(r.warnings.iter().cloned());
                let rfam = reciprocal_step_family(&fam)?;
                let oracle = match oracle_grid(cfg, &rfam).and_then(|g| discretized_frame_bounds(&rfam, &g)) {
                    Ok(o) => Some(OracleBlock::new(&o, Some(r.bounds))),
                    Err(e) => {
                        warnings.push(format!("rescaling oracle skipped: {e}"));
                        None
                    }
                };
                report.rescaling = Some(RescalingBlock {
                    alpha: r.bounds.lower,
                    beta: r.bounds.upper,
                    provenance: Provenance::Analytic,
                    oracle,
                });
            }
            Analysis::FiniteSection => {
                let (block, sweep) = finite_section_block(cfg, &fam)?;
                csv.push(("sweep.csv".into(), sweep.to_csv()));
                report.finite_section = Some(block);
            }
            Analysis::Independence => report.independence = Some(independence_block(cfg, &fam)?),
            Analysis::Wavelet => {
                return Err(FrameError::Config("wavelet diagnostics need an extended-affine system".into()))
            }
        }
    }
    report.warnings = warnings;
    report.timing.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(RunOutput { report, csv })
}

fn check_claims(cfg: &AnalysisConfig, b: &BoundsBlock, range: (f64, f64)) -> Vec<Discrepancy> {
    let tol = cfg.tolerances.claim;
    let c = &cfg.claims;
    let mut out = Vec::new();
    let mut push = |claim: &str, claimed: serde_json::Value, note: String| {
        out.push(Discrepancy {
            claim: claim.into(),
            claimed,
            computed_alpha: b.alpha,
            computed_beta: b.beta,
            note,
            provenance: Provenance::Analytic,
        })
    };
    let density = if range.0 == range.1 {
        format!("the density is constant {}", range.0)
    } else {
        format!("the density ranges over [{}, {}]", range.0, range.1)
    };
    if let Some(claim) = c.parseval {
        if claim != b.parseval {
            let note = if claim && b.tight {
                format!(
                    "claimed Parseval, but {density} and the frame is tight with bound {}; scaling every generator by \
                     1/sqrt({}) gives a Parseval frame",
                    b.alpha, b.alpha
                )
            } else if claim {
                format!("claimed Parseval, but {density} and the bounds are ({}, {})", b.alpha, b.beta)
            } else {
                "claimed not Parseval, but the computed bounds are (1, 1)".to_string()
            };
            push("parseval", claim.into(), note);
        }
    }
    if let Some(claim) = c.tight {
        if claim != b.tight {
            push("tight", claim.into(), format!("claimed tight = {claim}, but {density}"));
        }
    }
    for (name, claimed, computed) in [("alpha", c.alpha, b.alpha), ("beta", c.beta, b.beta)] {
        if let Some(v) = claimed {
            if (v.0 - computed).abs() > tol * computed.abs().max(1.0) {
                push(name, v.0.into(), format!("claimed {name} = {}, computed {computed}", v.0));
            }
        }
    }
    out
}

fn oracle_grid(cfg: &AnalysisConfig, fam: &GeneratorFamily) -> Result<Grid> {
    let (lo, hi) = match (cfg.oracle.lo, cfg.oracle.hi) {
        (Some(a), Some(b)) => (a.0, b.0),
        _ => analysis_window(fam)?,
    };
    Grid::new(lo, hi, cfg.oracle.n)
}

fn dual_block(fam: &GeneratorFamily) -> Result<DualBlock> {
    let d = dual_frame_bounds(fam)?;
    let mut residual: f64 = 0.0;
    for (idx, _) in fam.section_generators(1) {
        for n in [-1, 1, 2] {
            residual = residual.max(dual_commutation_check(fam, n, idx)?);
        }
    }
    Ok(DualBlock {
        alpha: d.extremized.lower,
        beta: d.extremized.upper,
        predicted_alpha: d.predicted.lower,
        predicted_beta: d.predicted.upper,
        max_deviation: d.max_deviation,
        commutation_residual: residual,
        provenance: Provenance::Oracle,
    })
}

fn finite_section_block(cfg: &AnalysisConfig, fam: &GeneratorFamily) -> Result<(FiniteSectionBlock, SweepReport)> {
    let spec = &cfg.finite_section;
    let generators = spec.generators()?;
    let test_functions = if spec.test_functions == 0 {
        Vec::new()
    } else {
        let (lo, hi) = match spec.band {
            Some([a, b]) => (a.0, b.0),
            None => generators
                .first()
                .and_then(|j| fam.generator(*j))
                .and_then(|g| g.support())
                .ok_or_else(|| FrameError::Config("no band for the test functions".into()))?,
        };
        random_band_limited(spec.seed, spec.test_functions, lo, hi, TEST_FUNCTION_PIECES)?
    };
    let req =
        SweepRequest { sections: spec.section_list(), generators, test_functions, core: (spec.core[0], spec.core[1]) };
    let sweep = section_inverse_norm_sweep(fam, &req)?;
    let block = FiniteSectionBlock {
        test_functions: spec.test_functions,
        seed: spec.seed,
        rows: sweep
            .rows
            .iter()
            .map(|r| SweepRowOut {
                s: r.s,
                t: r.t,
                j: r.j.to_string(),
                norm_inv: r.norm_inv,
                max_coeff_err: r.max_coeff_err,
                cond: r.cond,
            })
            .collect(),
        summary: sweep
            .summary
            .iter()
            .map(|s| SweepSummaryOut {
                j: s.j.to_string(),
                observed_sup: s.observed_sup,
                final_value: s.final_value,
                bounded: s.bounded,
            })
            .collect(),
        provenance: Provenance::Oracle,
    };
    Ok((block, sweep))
}

fn independence_block(cfg: &AnalysisConfig, fam: &GeneratorFamily) -> Result<IndependenceBlock> {
    let (s, t) = (cfg.independence.s, cfg.independence.t);
    let ind = independence_test(fam, s, t)?;
    let biorthogonality_deviation = biorthogonality_check(fam, s, t)?;
    let (shift_residual, shift_error) = match shift_operator_check(fam, s, t) {
        Ok(r) => (Some(r), None),
        Err(e @ FrameError::IllPosedOperator(_)) => (None, Some(ErrorInfo::from(&e))),
        Err(e) => return Err(e),
    };
    Ok(IndependenceBlock {
        s,
        t,
        rank: ind.rank,
        dim: ind.dim,
        deficiency: ind.deficiency,
        is_independent: ind.is_independent,
        biorthogonality_deviation,
        shift_residual,
        shift_error,
        provenance: Provenance::Oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TILING: &str = r#"
        analyses = ["bounds"]
        [system]
        kind = "translate-family"
        rule = "periodic-tiling"
        period = "1/2"
        steps = [2]
        support-length = "1/2"
        bases = [{ segments = [{ lo = 0, hi = "1/2", intercept = 2 }] }]
        [claims]
        parseval = true
    "#;

    #[test]
    fn tiling_report_flags_the_parseval_claim() {
        let cfg = AnalysisConfig::from_toml(TILING).unwrap();
        let out = run(&cfg, Command::Analyze).unwrap();
        let b = out.report.bounds.unwrap();
        assert_eq!((b.alpha, b.beta, b.tight, b.parseval), (2.0, 2.0, true, false));
        assert_eq!(out.report.discrepancies.len(), 1);
        assert!(out.report.discrepancies[0].note.contains("tight with bound 2"));
    }

    #[test]
    fn empty_analyses_give_density_only() {
        let cfg = AnalysisConfig::from_toml(&TILING.replace(r#"["bounds"]"#, "[]")).unwrap();
        let r = run(&cfg, Command::Analyze).unwrap().report;
        assert!(r.bounds.is_none() && r.discrepancies.is_empty());
        assert_eq!(r.density.unwrap().ess_range, [4.0, 4.0]);
    }

    #[test]
    fn command_must_match_system() {
        let cfg = AnalysisConfig::from_toml(TILING).unwrap();
        assert!(matches!(run(&cfg, Command::Gabor), Err(FrameError::Config(_))));
    }

    #[test]
    fn density_csv_has_fixed_header() {
        let cfg = AnalysisConfig::from_toml(TILING).unwrap();
        let out = run(&cfg, Command::Analyze).unwrap();
        let (name, body) = &out.csv[0];
        assert_eq!(name, "density.csv");
        assert!(body.starts_with("gamma,G\n"));
        assert_eq!(body.lines().count(), 1 + cfg.output.resolution);
    }
}
