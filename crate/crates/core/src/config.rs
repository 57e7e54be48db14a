//! TOML analysis configs. Numbers may be written as decimals or as exact
//! fractions `"p/q"`; complex values as a number or a `[re, im]` pair.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::family::{FamilyRule, GenIndex, GeneratorFamily, StepRule, BOUND_TOL};
use crate::spectrum::{PiecewiseSpectrum, Segment, C64};
use crate::systems::{AffineWindow, ExtendedAffineParams, GaborWindow, WeylHeisenbergParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Int(i64),
    Float(f64),
    #[serde(skip_serializing)]
    Text(#[serde(deserialize_with = "parse_text")] f64),
}

fn parse_text<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    let s = String::deserialize(d)?;
    parse_number(&s).map_err(serde::de::Error::custom)
}

/// Parses `"3"`, `"-0.25"` or `"13/2"`.
pub fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    if s.contains('/') {
        let r = Ratio::<i64>::from_str(s).map_err(|e| format!("bad fraction {s:?}: {e}"))?;
        return Ok(*r.numer() as f64 / *r.denom() as f64);
    }
    f64::from_str(s).map_err(|e| format!("bad number {s:?}: {e}"))
}

/// A real number written as decimal, integer or fraction string.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawNumber", into = "f64")]
pub struct Number(pub f64);

impl From<RawNumber> for Number {
    fn from(r: RawNumber) -> Self {
        match r {
            RawNumber::Int(i) => Number(i as f64),
            RawNumber::Float(x) | RawNumber::Text(x) => Number(x),
        }
    }
}

impl From<Number> for f64 {
    fn from(n: Number) -> f64 {
        n.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(Number),
    Pair([Number; 2]),
}

impl ComplexValue {
    pub fn value(self) -> C64 {
        match self {
            ComplexValue::Real(x) => C64::new(x.0, 0.0),
            ComplexValue::Pair([re, im]) => C64::new(re.0, im.0),
        }
    }
}

impl Default for ComplexValue {
    fn default() -> Self {
        ComplexValue::Real(Number(0.0))
    }
}

/// Linear piece `intercept + slope·γ` on `(lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub lo: Number,
    pub hi: Number,
    #[serde(default)]
    pub intercept: ComplexValue,
    #[serde(default)]
    pub slope: ComplexValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SpectrumSpec {
    pub segments: Vec<SegmentSpec>,
    #[serde(default)]
    pub time_shift: Option<Number>,
}

impl SpectrumSpec {
    pub fn build(&self) -> Result<PiecewiseSpectrum> {
        let segs = self
            .segments
            .iter()
            .map(|s| Segment::new(s.lo.0, s.hi.0, s.intercept.value(), s.slope.value()))
            .collect::<Result<Vec<_>>>()?;
        PiecewiseSpectrum::new(segs, self.time_shift.map_or(0.0, |t| t.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtraGenerator {
    pub l: i64,
    pub slot: usize,
    #[serde(flatten)]
    pub spectrum: SpectrumSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexedSpectrum {
    pub l: i64,
    #[serde(default)]
    pub slot: usize,
    #[serde(flatten)]
    pub spectrum: SpectrumSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum TranslateRule {
    PeriodicTiling { period: Number, bases: Vec<SpectrumSpec> },
    Explicit { generators: Vec<IndexedSpectrum> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TranslateFamilySpec {
    #[serde(flatten)]
    pub rule: TranslateRule,
    /// One shared step, or one per slot.
    pub steps: Vec<Number>,
    pub support_length: Number,
    #[serde(default)]
    pub extra: Vec<ExtraGenerator>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaborWindowSpec {
    pub p0: Number,
    pub q0: Number,
    #[serde(flatten)]
    pub spectrum: SpectrumSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylHeisenbergSpec {
    #[serde(rename = "A")]
    pub a: Number,
    #[serde(rename = "B", default = "zero")]
    pub b: Number,
    pub lambda: Number,
    pub windows: Vec<GaborWindowSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineWindowSpec {
    pub q0: Number,
    #[serde(flatten)]
    pub spectrum: SpectrumSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendedAffineSpec {
    pub c: Number,
    pub d: Number,
    #[serde(default)]
    pub lambda: Option<Number>,
    pub windows: Vec<AffineWindowSpec>,
}

fn zero() -> Number {
    Number(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemSpec {
    TranslateFamily(TranslateFamilySpec),
    WeylHeisenberg(WeylHeisenbergSpec),
    ExtendedAffine(ExtendedAffineSpec),
}

/// A validated system ready for analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum System {
    Translates(GeneratorFamily),
    Gabor(WeylHeisenbergParams),
    Wavelet(ExtendedAffineParams),
}

impl System {
    pub fn kind(&self) -> &'static str {
        match self {
            System::Translates(_) => "translate-family",
            System::Gabor(_) => "weyl-heisenberg",
            System::Wavelet(_) => "extended-affine",
        }
    }

    /// Family of translates behind the system.
    pub fn family(&self) -> Result<GeneratorFamily> {
        match self {
            System::Translates(f) => Ok(f.clone()),
            System::Gabor(p) => crate::systems::build_gabor_family(p),
            System::Wavelet(p) => crate::systems::build_wavelet_family(p),
        }
    }
}

impl SystemSpec {
    pub fn build(&self) -> Result<System> {
        match self {
            SystemSpec::TranslateFamily(t) => {
                let (rule, slots) = match &t.rule {
                    TranslateRule::PeriodicTiling { period, bases } => (
                        FamilyRule::PeriodicTiling {
                            bases: bases.iter().map(SpectrumSpec::build).collect::<Result<_>>()?,
                            period: period.0,
                        },
                        1,
                    ),
                    TranslateRule::Explicit { generators } => {
                        let gens = generators
                            .iter()
                            .map(|g| Ok((GenIndex::new(g.l, g.slot), g.spectrum.build()?)))
                            .collect::<Result<Vec<_>>>()?;
                        let slots = gens.iter().map(|g| g.0.slot + 1).max().unwrap_or(1);
                        (FamilyRule::Explicit(gens), slots)
                    }
                };
                let steps = match t.steps.as_slice() {
                    [] => return Err(FrameError::Config("steps must not be empty".into())),
                    [q] => StepRule::Shared(q.0),
                    qs => {
                        let extra_slots = t.extra.iter().map(|e| e.slot + 1).max().unwrap_or(0);
                        if qs.len() < slots.max(extra_slots) {
                            return Err(FrameError::Config(format!("{} steps for {} slots", qs.len(), slots)));
                        }
                        StepRule::PerSlot(qs.iter().map(|q| q.0).collect())
                    }
                };
                let extra = t
                    .extra
                    .iter()
                    .map(|e| Ok((GenIndex::new(e.l, e.slot), e.spectrum.build()?)))
                    .collect::<Result<Vec<_>>>()?;
                let fam = GeneratorFamily::new(rule, steps, t.support_length.0)?;
                Ok(System::Translates(if extra.is_empty() { fam } else { fam.with_extra(extra)? }))
            }
            SystemSpec::WeylHeisenberg(w) => {
                let windows = w
                    .windows
                    .iter()
                    .map(|x| Ok(GaborWindow { p0: x.p0.0, q0: x.q0.0, spectrum: x.spectrum.build()? }))
                    .collect::<Result<Vec<_>>>()?;
                let p = WeylHeisenbergParams { a: w.a.0, b: w.b.0, lambda: w.lambda.0, windows };
                p.validate()?;
                Ok(System::Gabor(p))
            }
            SystemSpec::ExtendedAffine(e) => {
                let windows = e
                    .windows
                    .iter()
                    .map(|x| Ok(AffineWindow { q0: x.q0.0, spectrum: x.spectrum.build()? }))
                    .collect::<Result<Vec<_>>>()?;
                let p = ExtendedAffineParams { c: e.c.0, d: e.d.0, lambda: e.lambda.map(|l| l.0), windows };
                p.validate()?;
                Ok(System::Wavelet(p))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    Bounds,
    Dual,
    FiniteSection,
    Independence,
    Oracle,
    Rescaling,
    Wavelet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FiniteSectionSpec {
    #[serde(default = "default_max_section")]
    pub max_s: usize,
    #[serde(default = "default_max_section")]
    pub max_t: usize,
    /// Tracked generators as `"l:slot"`.
    #[serde(default = "default_j_list")]
    pub j: Vec<String>,
    /// Explicit sections; doubling up to `(max-s, max-t)` when absent.
    #[serde(default)]
    pub sections: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    pub test_functions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_core")]
    pub core: [usize; 2],
    /// Frequency band of the random test functions; the support of the
    /// first tracked generator when absent.
    #[serde(default)]
    pub band: Option<[Number; 2]>,
}

fn default_max_section() -> usize {
    8
}

fn default_j_list() -> Vec<String> {
    vec!["0:0".into()]
}

fn default_core() -> [usize; 2] {
    [2, 2]
}

impl Default for FiniteSectionSpec {
    fn default() -> Self {
        FiniteSectionSpec {
            max_s: default_max_section(),
            max_t: default_max_section(),
            j: default_j_list(),
            sections: None,
            test_functions: 0,
            seed: 0,
            core: default_core(),
            band: None,
        }
    }
}

impl FiniteSectionSpec {
    pub fn generators(&self) -> Result<Vec<GenIndex>> {
        self.j.iter().map(|s| parse_gen_index(s)).collect()
    }

    pub fn section_list(&self) -> Vec<(usize, usize)> {
        match &self.sections {
            Some(v) => v.iter().map(|p| (p[0], p[1])).collect(),
            None => crate::operator::doubling_sections(self.max_s, self.max_t),
        }
    }
}

/// Parses `"l:slot"` or a bare `"l"`.
pub fn parse_gen_index(s: &str) -> Result<GenIndex> {
    let bad = || FrameError::Config(format!("bad generator index {s:?}"));
    let mut parts = s.split(':');
    let l = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let slot = match parts.next() {
        Some(p) => p.trim().parse().map_err(|_| bad())?,
        None => 0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(GenIndex::new(l, slot))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndependenceSpec {
    #[serde(default = "default_small")]
    pub s: usize,
    #[serde(default = "default_small")]
    pub t: usize,
}

fn default_small() -> usize {
    2
}

impl Default for IndependenceSpec {
    fn default() -> Self {
        IndependenceSpec { s: 2, t: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default = "default_grid")]
    pub n: usize,
    #[serde(default)]
    pub lo: Option<Number>,
    #[serde(default)]
    pub hi: Option<Number>,
}

fn default_grid() -> usize {
    1024
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec { n: default_grid(), lo: None, hi: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveletSpec {
    pub lo: Number,
    pub hi: Number,
    #[serde(default)]
    pub truncation: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// Samples in the CSV curves.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_resolution() -> usize {
    512
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: None, resolution: default_resolution() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Tight and Parseval flags.
    #[serde(default = "default_bound_tol")]
    pub bound: f64,
    /// Disagreement that turns a claim into a discrepancy note.
    #[serde(default = "default_claim_tol")]
    pub claim: f64,
}

fn default_bound_tol() -> f64 {
    BOUND_TOL
}

fn default_claim_tol() -> f64 {
    1e-9
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { bound: default_bound_tol(), claim: default_claim_tol() }
    }
}

/// Properties asserted for the system, checked against the computation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Claims {
    #[serde(default)]
    pub parseval: Option<bool>,
    #[serde(default)]
    pub tight: Option<bool>,
    #[serde(default)]
    pub alpha: Option<Number>,
    #[serde(default)]
    pub beta: Option<Number>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub system: SystemSpec,
    /// `None` runs the default analyses of the command.
    #[serde(default)]
    pub analyses: Option<Vec<Analysis>>,
    #[serde(default)]
    pub finite_section: FiniteSectionSpec,
    #[serde(default)]
    pub independence: IndependenceSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default)]
    pub wavelet: Option<WaveletSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub claims: Claims,
}

impl AnalysisConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: AnalysisConfig = toml::from_str(text).map_err(|e| FrameError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FrameError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [("bound", t.bound), ("claim", t.claim)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FrameError::Config(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if self.oracle.n < 2 {
            return Err(FrameError::Config("oracle grid needs at least 2 points".into()));
        }
        if self.output.resolution == 0 {
            return Err(FrameError::Config("output resolution must be positive".into()));
        }
        self.finite_section.generators()?;
        Ok(())
    }

    /// Requested analyses in canonical order, without repeats.
    pub fn analysis_list(&self, default: &[Analysis]) -> Vec<Analysis> {
        let mut v = self.analyses.clone().unwrap_or_else(|| default.to_vec());
        v.sort();
        v.dedup();
        v
    }
}
