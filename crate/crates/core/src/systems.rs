//! Gabor systems from Weyl–Heisenberg parameters, wavelet systems from
//! extended-affine parameters, reciprocal-step bounds and span synthesis.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::family::{translate_frame_bounds, FamilyRule, FrameBounds, GenIndex, GeneratorFamily, StepRule, BOUND_TOL};
use crate::operator::EvaluableSpectrum;
use crate::spectrum::{same_point, PiecewiseQuad, PiecewiseSpectrum, Spectral, C64};

pub const WAVELET_CAVEAT: &str = "wavelet bounds are evaluated on the requested window only: dilated generators \
     have support length λ·e^{l·q0}, so the length-λ hypothesis fails for l ≠ 0, and W(γ) → 0 as |γ| → ∞ for any \
     finite window set, so no global lower frame bound is certified";

pub const RESCALING_CAVEAT: &str = "λ > 1: the reciprocal-step bounds α/λ², β/λ² rest on a Parseval identity over \
     an interval of length 1/λ shorter than the supports; cross-check with the discretized oracle";

/// One Gabor window with its lattice parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaborWindow {
    pub p0: f64,
    pub q0: f64,
    pub spectrum: PiecewiseSpectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylHeisenbergParams {
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
    pub windows: Vec<GaborWindow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GaborAtomIndex {
    pub n: i64,
    pub l: i64,
    pub j: usize,
}

impl WeylHeisenbergParams {
    pub fn validate(&self) -> Result<()> {
        if self.a == 0.0 || !self.a.is_finite() || !self.b.is_finite() {
            return Err(FrameError::InvalidParams("A must be non-zero and B finite".into()));
        }
        if !(self.lambda > 0.0) || self.windows.is_empty() {
            return Err(FrameError::InvalidParams("need λ > 0 and at least one window".into()));
        }
        for (j, w) in self.windows.iter().enumerate() {
            if (w.p0 * w.q0).abs() >= 1.0 {
                return Err(FrameError::HypothesisViolation(format!(
                    "window {j}: |p0·q0| = {} must be < 1",
                    (w.p0 * w.q0).abs()
                )));
            }
            if (w.q0 - 1.0 / self.lambda).abs() > BOUND_TOL * (1.0 / self.lambda).max(1.0) {
                return Err(FrameError::HypothesisViolation(format!(
                    "window {j}: q0 = {} must equal 1/λ = {}",
                    w.q0,
                    1.0 / self.lambda
                )));
            }
            if w.spectrum.support_length() > self.lambda * (1.0 + BOUND_TOL) {
                return Err(FrameError::HypothesisViolation(format!(
                    "window {j}: spectrum support exceeds λ = {}",
                    self.lambda
                )));
            }
        }
        Ok(())
    }

    /// Unimodular factor `e^{2πi[(1/2)A·n·l·p0·q0 + B·l·p0]}` of atom `(n, l, j)`.
    pub fn phase(&self, idx: GaborAtomIndex) -> C64 {
        let w = &self.windows[idx.j];
        let (n, l) = (idx.n as f64, idx.l as f64);
        C64::from_polar(1.0, 2.0 * PI * (0.5 * self.a * n * l * w.p0 * w.q0 + self.b * l * w.p0))
    }
}

/// Modulated family `E_{A·l·p0_j} Φ_j` translated on steps `q0_j`; the atom
/// phases are unimodular and do not enter the density.
pub fn build_gabor_family(p: &WeylHeisenbergParams) -> Result<GeneratorFamily> {
    p.validate()?;
    GeneratorFamily::new(
        FamilyRule::Modulated {
            windows: p.windows.iter().map(|w| w.spectrum.clone()).collect(),
            steps: p.windows.iter().map(|w| p.a * w.p0).collect(),
        },
        StepRule::PerSlot(p.windows.iter().map(|w| w.q0).collect()),
        p.lambda,
    )
}

/// Spectrum of atom `(n, l, j)`: phase times `E_{A·l·p0} T_{−n·q0} Φ_j`.
pub fn gabor_atom(p: &WeylHeisenbergParams, idx: GaborAtomIndex) -> Result<PiecewiseSpectrum> {
    let w = p.windows.get(idx.j).ok_or_else(|| FrameError::InvalidParams(format!("no window {}", idx.j)))?;
    Ok(w.spectrum.translated(-(idx.n as f64) * w.q0).shift_frequency(p.a * idx.l as f64 * w.p0).scaled(p.phase(idx)))
}

pub fn gabor_frame_bounds(p: &WeylHeisenbergParams) -> Result<FrameBounds> {
    translate_frame_bounds(&build_gabor_family(p)?)
}

/// Bounds of the system with every step `q` replaced by `1/q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledBounds {
    pub bounds: FrameBounds,
    pub original: FrameBounds,
    pub warnings: Vec<String>,
}

pub fn reciprocal_step_bounds(fam: &GeneratorFamily) -> Result<RescaledBounds> {
    let original = translate_frame_bounds(fam)?;
    let l2 = fam.support_length().powi(2);
    let mut warnings = Vec::new();
    if fam.support_length() > 1.0 {
        warnings.push(RESCALING_CAVEAT.to_string());
    }
    Ok(RescaledBounds { bounds: FrameBounds::new(original.lower / l2, original.upper / l2), original, warnings })
}

/// The family with reciprocal steps `1/q`, for oracle cross-checks.
pub fn reciprocal_step_family(fam: &GeneratorFamily) -> Result<GeneratorFamily> {
    let steps = match fam.steps() {
        StepRule::Shared(q) => StepRule::Shared(1.0 / q),
        StepRule::PerSlot(qs) => StepRule::PerSlot(qs.iter().map(|q| 1.0 / q).collect()),
    };
    fam.with_steps(steps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineWindow {
    pub q0: f64,
    pub spectrum: PiecewiseSpectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedAffineParams {
    pub c: f64,
    pub d: f64,
    /// Defaults to `1/q0` when every window shares the same `q0`.
    pub lambda: Option<f64>,
    pub windows: Vec<AffineWindow>,
}

/// Lattice point `(α_l, β_{nl}, γ_{nl})` of window `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeRow {
    pub j: usize,
    pub n: i64,
    pub l: i64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl ExtendedAffineParams {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0.0 || !self.d.is_finite() || !self.c.is_finite() {
            return Err(FrameError::InvalidParams("d must be non-zero and c finite".into()));
        }
        if self.windows.is_empty() {
            return Err(FrameError::InvalidParams("need at least one window".into()));
        }
        if let Some((j, w)) = self.windows.iter().enumerate().find(|(_, w)| !(w.q0 > 0.0)) {
            return Err(FrameError::InvalidParams(format!("window {j}: q0 = {} must be positive", w.q0)));
        }
        self.lambda().map(|_| ())
    }

    pub fn lambda(&self) -> Result<f64> {
        if let Some(l) = self.lambda {
            return if l > 0.0 { Ok(l) } else { Err(FrameError::InvalidParams("λ must be positive".into())) };
        }
        let q = self.windows[0].q0;
        if self.windows.iter().all(|w| same_point(w.q0, q)) {
            Ok(1.0 / q)
        } else {
            Err(FrameError::InvalidParams("windows have different q0; λ must be given".into()))
        }
    }

    pub fn lattice(&self, j: usize, n: i64, l: i64) -> LatticeRow {
        let q0 = self.windows[j].q0;
        let alpha = (-(l as f64) * q0).exp();
        let beta = n as f64 * q0 / self.d;
        // ln(α)/(α − 1) → 1 as α → 1
        let ratio = if l == 0 { 1.0 } else { alpha.ln() / (alpha - 1.0) };
        LatticeRow { j, n, l, alpha, beta, gamma: beta * ratio }
    }

    /// Lattice values for `|n|, |l| ≤ k` on every window.
    pub fn lattice_table(&self, k: i64) -> Vec<LatticeRow> {
        let mut out = Vec::new();
        for j in 0..self.windows.len() {
            for l in -k..=k {
                for n in -k..=k {
                    out.push(self.lattice(j, n, l));
                }
            }
        }
        out
    }

    /// Warnings that hold for every wavelet analysis.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = vec![WAVELET_CAVEAT.to_string()];
        if let Ok(lam) = self.lambda() {
            for (j, win) in self.windows.iter().enumerate() {
                if !same_point(win.q0, 1.0 / lam) {
                    w.push(format!("window {j}: q0 = {} differs from 1/λ = {}", win.q0, 1.0 / lam));
                }
            }
        }
        w
    }
}

/// Dilated family `dilate(Φ_j, e^{−l·q0_j})` translated on steps `q0_j`.
pub fn build_wavelet_family(p: &ExtendedAffineParams) -> Result<GeneratorFamily> {
    p.validate()?;
    GeneratorFamily::new(
        FamilyRule::Dilated {
            windows: p.windows.iter().map(|w| w.spectrum.clone()).collect(),
            rates: p.windows.iter().map(|w| w.q0).collect(),
        },
        StepRule::PerSlot(p.windows.iter().map(|w| w.q0).collect()),
        p.lambda()?,
    )
}

/// Spectrum of atom `(n, l, j)`: `e^{i·c·γ_{nl}} T_{−n·q0} D_{α_l} Φ_j`.
pub fn wavelet_atom(p: &ExtendedAffineParams, n: i64, l: i64, j: usize) -> Result<PiecewiseSpectrum> {
    let w = p.windows.get(j).ok_or_else(|| FrameError::InvalidParams(format!("no window {j}")))?;
    let row = p.lattice(j, n, l);
    Ok(w.spectrum.dilate(row.alpha)?.translated(-(n as f64) * w.q0).scaled(C64::from_polar(1.0, p.c * row.gamma)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletDiagnostics {
    pub window: (f64, f64),
    pub inf: f64,
    pub sup: f64,
    pub zero_set_measure: f64,
    /// `W` on the window, `λ·Σ |dilated generator|²`.
    pub values: PiecewiseQuad,
    /// Bound on the dropped terms when a truncation was used.
    pub tail_bound: Option<f64>,
    pub warnings: Vec<String>,
}

impl WaveletDiagnostics {
    pub fn eval(&self, gamma: f64) -> f64 {
        self.values.eval(gamma)
    }

    pub fn curve(&self, resolution: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = self.window;
        let n = resolution.max(1);
        let h = (hi - lo) / n as f64;
        (0..n).map(|k| lo + (k as f64 + 0.5) * h).map(|g| (g, self.values.eval(g))).collect()
    }
}

/// Range and zero set of `W(γ) = λ·Σ_j Σ_l e^{−l·q0_j} |Φ̂_j(γ·e^{−l·q0_j})|²` on
/// `(lo, hi]`. With `truncation = Some(L)` only `|l| ≤ L` is summed and a
/// tail bound is reported.
pub fn wavelet_diagnostics(
    p: &ExtendedAffineParams,
    lo: f64,
    hi: f64,
    truncation: Option<i64>,
) -> Result<WaveletDiagnostics> {
    let fam = build_wavelet_family(p)?;
    let lambda = fam.support_length();
    let (gens, tail_bound) = match truncation {
        None => (fam.materialize(lo, hi)?, None),
        Some(cap) => truncated_generators(p, lo, hi, cap)?,
    };
    let mut acc = PiecewiseQuad::zero();
    for (_, g) in &gens {
        acc = acc.add(&g.mod_squared().restrict(lo, hi));
    }
    let values = acc.scaled(lambda);
    let (inf, sup) = values.range_over(lo, hi);
    let zero_set_measure = values.zero_measure_over(lo, hi, 0.0);
    Ok(WaveletDiagnostics { window: (lo, hi), inf, sup, zero_set_measure, values, tail_bound, warnings: p.warnings() })
}

type Generators = Vec<(GenIndex, PiecewiseSpectrum)>;

fn truncated_generators(p: &ExtendedAffineParams, lo: f64, hi: f64, cap: i64) -> Result<(Generators, Option<f64>)> {
    let lambda = p.lambda()?;
    let mut out = Vec::new();
    let mut tail = 0.0;
    for (j, w) in p.windows.iter().enumerate() {
        for l in -cap..=cap {
            let g = w.spectrum.dilate((-(l as f64) * w.q0).exp())?;
            if let Some((a, b)) = g.support() {
                if a < hi && b > lo {
                    out.push((GenIndex::new(l, j), g));
                }
            }
        }
        let peak = w
            .spectrum
            .segments()
            .iter()
            .map(|s| s.value(s.lo).norm_sqr().max(s.value(s.hi).norm_sqr()))
            .fold(0.0, f64::max);
        // terms with l > cap are at most e^{−l·q0}·peak
        tail += lambda * peak * (-((cap + 1) as f64) * w.q0).exp() / (1.0 - (-w.q0).exp());
        // terms with l < −cap grow without bound near 0
        let below = w.spectrum.dilate((((cap + 1) as f64) * w.q0).exp())?;
        if below.support().is_some_and(|(a, b)| a < hi && b > lo) {
            tail = f64::INFINITY;
        }
    }
    out.sort_by_key(|g| g.0);
    Ok((out, Some(tail)))
}

/// Symbol `F(γ) = Σ_k c_k e^{2πi·k·q0_j·γ}` attached to modulation `l` of
/// window `j`. The basis exponentials are those of the translates `T_{−k·q0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSymbol {
    pub j: usize,
    pub l: i64,
    pub coeffs: Vec<(i64, C64)>,
}

/// `f̂(γ) = Σ F_{l,j}(γ)·Φ̂_j(γ − A·l·p0_j)`.
pub fn synthesize_from_symbols(symbols: &[PeriodicSymbol], p: &WeylHeisenbergParams) -> Result<EvaluableSpectrum> {
    let mut terms = Vec::new();
    let mut bp = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut osc: f64 = 0.0;
    for sym in symbols {
        let w = p.windows.get(sym.j).ok_or_else(|| FrameError::InvalidParams(format!("no window {}", sym.j)))?;
        let shifted = w.spectrum.shift_frequency(p.a * sym.l as f64 * w.p0);
        if let Some((a, b)) = shifted.support() {
            lo = lo.min(a);
            hi = hi.max(b);
        }
        bp.extend(shifted.breakpoints());
        osc = osc.max(shifted.oscillation() + sym.coeffs.iter().map(|c| (c.0 as f64 * w.q0).abs()).fold(0.0, f64::max));
        terms.push((shifted, w.q0, sym.coeffs.clone()));
    }
    let support = if lo < hi { Some((lo, hi)) } else { None };
    Ok(EvaluableSpectrum::new(
        move |g| {
            terms
                .iter()
                .map(|(s, q0, cs)| {
                    let f: C64 = cs.iter().map(|(k, c)| c * C64::from_polar(1.0, 2.0 * PI * *k as f64 * q0 * g)).sum();
                    f * s.eval(g)
                })
                .sum()
        },
        bp,
        support,
        osc,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{ess_range, spectral_density};
    use crate::spectrum::Segment;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn window(slope: f64) -> PiecewiseSpectrum {
        PiecewiseSpectrum::new(
            vec![Segment::new(0.0, 1.0, c(1.0), c(1.0)).unwrap(), Segment::new(1.0, 2.0, c(0.0), c(slope)).unwrap()],
            0.0,
        )
        .unwrap()
    }

    pub(crate) fn two_window_params() -> WeylHeisenbergParams {
        WeylHeisenbergParams {
            a: 1.0,
            b: 0.0,
            lambda: 2.0,
            windows: vec![
                GaborWindow { p0: 1.0, q0: 0.5, spectrum: window(1.0) },
                GaborWindow { p0: 1.0, q0: 0.5, spectrum: window(0.5) },
            ],
        }
    }

    fn dyadic() -> ExtendedAffineParams {
        ExtendedAffineParams {
            c: 1.0,
            d: 1.0,
            lambda: None,
            windows: vec![AffineWindow { q0: 1.0, spectrum: PiecewiseSpectrum::indicator(1.0, 2.0, 1.0).unwrap() }],
        }
    }

    #[test]
    fn two_window_gabor_bounds() {
        let b = gabor_frame_bounds(&two_window_params()).unwrap();
        assert!((b.lower - 6.5).abs() < 1e-9 && (b.upper - 26.0).abs() < 1e-9);
    }

    #[test]
    fn gabor_bounds_use_the_family_density() {
        let p = two_window_params();
        let fam = build_gabor_family(&p).unwrap();
        let (lo, hi) = ess_range(&spectral_density(&fam, 0.0, 1.0).unwrap());
        let b = gabor_frame_bounds(&p).unwrap();
        assert_eq!((b.lower, b.upper), (p.lambda * lo, p.lambda * hi));
    }

    #[test]
    fn shannon_window_with_half_step_is_tight() {
        let p = WeylHeisenbergParams {
            a: 1.0,
            b: 0.0,
            lambda: 1.0,
            windows: vec![GaborWindow {
                p0: 0.5,
                q0: 1.0,
                spectrum: PiecewiseSpectrum::indicator(0.0, 1.0, 1.0).unwrap(),
            }],
        };
        let b = gabor_frame_bounds(&p).unwrap();
        assert!(b.is_tight && (b.lower - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coarse_lattice_is_rejected() {
        let mut p = two_window_params();
        p.lambda = 1.0;
        p.windows =
            vec![GaborWindow { p0: 2.0, q0: 1.0, spectrum: PiecewiseSpectrum::indicator(0.0, 1.0, 1.0).unwrap() }];
        assert!(matches!(gabor_frame_bounds(&p), Err(FrameError::HypothesisViolation(_))));
    }

    #[test]
    fn gabor_atom_examples() {
        let p = two_window_params();
        let a = gabor_atom(&p, GaborAtomIndex { n: 0, l: 0, j: 1 }).unwrap();
        assert!(a.approx_eq(&p.windows[1].spectrum, 0.0));
        let a = gabor_atom(&p, GaborAtomIndex { n: 1, l: 0, j: 0 }).unwrap();
        assert_eq!(a.time_shift(), -0.5);
        for n in -3..3 {
            for l in -3..3 {
                assert!((p.phase(GaborAtomIndex { n, l, j: 0 }).norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn lattice_examples() {
        let p = ExtendedAffineParams {
            c: 0.0,
            d: 2.0,
            lambda: Some(1.0),
            windows: vec![AffineWindow {
                q0: 2f64.ln(),
                spectrum: PiecewiseSpectrum::indicator(1.0, 2.0, 1.0).unwrap(),
            }],
        };
        assert!((p.lattice(0, 0, 1).alpha - 0.5).abs() < 1e-15);
        let mut q = p.clone();
        q.windows[0].q0 = 0.5;
        assert!((q.lattice(0, 3, 4).beta - 0.75).abs() < 1e-15);
        assert_eq!(q.lattice(0, 3, 0).gamma, q.lattice(0, 3, 0).beta);
        let atom = wavelet_atom(&dyadic(), 0, 0, 0).unwrap();
        assert!(atom.approx_eq(&dyadic().windows[0].spectrum, 1e-15));
    }

    #[test]
    fn zero_d_is_invalid() {
        let mut p = dyadic();
        p.d = 0.0;
        assert!(matches!(build_wavelet_family(&p), Err(FrameError::InvalidParams(_))));
    }

    #[test]
    fn dyadic_diagnostics() {
        let d = wavelet_diagnostics(&dyadic(), 1.0, 2.0, None).unwrap();
        assert_eq!((d.inf, d.sup), (1.0, 1.0));
        assert_eq!(d.zero_set_measure, 0.0);
        let e = std::f64::consts::E;
        let z = wavelet_diagnostics(&dyadic(), 2.0, e, None).unwrap();
        assert_eq!((z.inf, z.sup), (0.0, 0.0));
        assert!((z.zero_set_measure - (e - 2.0)).abs() < 1e-12);
        assert!(z.warnings.iter().any(|w| w.contains("no global lower frame bound")));
    }

    #[test]
    fn support_touching_zero_needs_truncation() {
        let mut p = dyadic();
        p.windows[0].spectrum = PiecewiseSpectrum::indicator(0.0, 1.0, 1.0).unwrap();
        assert!(matches!(wavelet_diagnostics(&p, 0.5, 1.0, None), Err(FrameError::UnboundedFamily(_))));
        let d = wavelet_diagnostics(&p, 0.5, 1.0, Some(10)).unwrap();
        let tail = d.tail_bound.unwrap();
        assert!(tail > 0.0 && tail < 1e-4);
    }

    #[test]
    fn symbols_synthesize_window_and_atoms() {
        let p = two_window_params();
        let one = PeriodicSymbol { j: 0, l: 0, coeffs: vec![(0, c(1.0))] };
        let f = synthesize_from_symbols(&[one], &p).unwrap();
        assert_eq!(f.eval(0.5), c(1.5));
        let zero = synthesize_from_symbols(&[PeriodicSymbol { j: 1, l: 2, coeffs: vec![] }], &p).unwrap();
        assert_eq!(zero.eval(2.5), c(0.0));
        let shifted = synthesize_from_symbols(&[PeriodicSymbol { j: 0, l: 0, coeffs: vec![(1, c(1.0))] }], &p).unwrap();
        let atom = gabor_atom(&p, GaborAtomIndex { n: 1, l: 0, j: 0 }).unwrap();
        let ratio = shifted.eval(0.3) / atom.eval(0.3);
        assert!((ratio.norm() - 1.0).abs() < 1e-12);
        for x in [0.1, 0.7, 1.4, 1.9] {
            assert!((shifted.eval(x) / atom.eval(x) - ratio).norm() < 1e-12);
        }
    }

    #[test]
    fn rescaling_of_small_and_large_lambda() {
        let base = PiecewiseSpectrum::indicator(0.0, 0.5, 2.0).unwrap();
        let fam = GeneratorFamily::translates(FamilyRule::PeriodicTiling { bases: vec![base], period: 0.5 }, 2.0, 0.5)
            .unwrap();
        let r = reciprocal_step_bounds(&fam).unwrap();
        assert_eq!((r.bounds.lower, r.bounds.upper), (8.0, 8.0));
        assert!(r.warnings.is_empty());
        let fam = build_gabor_family(&two_window_params()).unwrap();
        let r = reciprocal_step_bounds(&fam).unwrap();
        assert!((r.bounds.upper / r.original.upper - 0.25).abs() < 1e-15);
        assert_eq!(r.warnings.len(), 1);
    }
}
