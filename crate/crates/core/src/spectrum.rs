//! Compactly supported piecewise-linear spectra.
//!
//! A [`PiecewiseSpectrum`] is the Fourier transform of a band-limited
//! generator: a complex piecewise-linear function on half-open intervals
//! `(lo, hi]`, multiplied by the symbolic phase `exp(-2πiτγ)` of a time
//! shift `τ`. All operations are exact up to floating-point rounding; inner
//! products against complex exponentials are evaluated in closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};

pub type C64 = Complex64;

/// Relative tolerance under which two breakpoints are considered equal.
pub const MERGE_TOL: f64 = 1e-12;

/// Whether two breakpoints coincide up to [`MERGE_TOL`].
pub fn same_point(a: f64, b: f64) -> bool {
    (a - b).abs() <= MERGE_TOL * 1f64.max(a.abs()).max(b.abs())
}

/// Anything that can be evaluated pointwise in the frequency domain.
pub trait Spectral {
    /// Value at frequency `gamma`.
    fn value_at(&self, gamma: f64) -> C64;
    /// Points where the value may fail to be smooth.
    fn breakpoints(&self) -> Vec<f64>;
    /// Smallest interval containing the support, `None` for the zero function.
    fn support(&self) -> Option<(f64, f64)>;
    /// Bound on the time-shift frequency of the phase, for quadrature panels.
    fn oscillation(&self) -> f64 {
        0.0
    }
}

/// One linear piece `a0 + a1·γ` on `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub a0: C64,
    pub a1: C64,
}

impl Segment {
    pub fn new(lo: f64, hi: f64, a0: C64, a1: C64) -> Result<Self> {
        let seg = Segment { lo, hi, a0, a1 };
        seg.validate()?;
        Ok(seg)
    }

    /// Constant piece.
    pub fn constant(lo: f64, hi: f64, value: C64) -> Result<Self> {
        Self::new(lo, hi, value, C64::new(0.0, 0.0))
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.lo, self.hi, self.a0.re, self.a0.im, self.a1.re, self.a1.im].iter().all(|x| x.is_finite());
        if !finite {
            return Err(FrameError::InvalidSegment { lo: self.lo, hi: self.hi, reason: "non-finite value".into() });
        }
        if self.lo >= self.hi {
            return Err(FrameError::InvalidSegment {
                lo: self.lo,
                hi: self.hi,
                reason: "lo must be smaller than hi".into(),
            });
        }
        Ok(())
    }

    #[inline]
    pub fn value(&self, gamma: f64) -> C64 {
        self.a0 + self.a1 * gamma
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Compactly supported piecewise-linear complex spectrum with a symbolic
/// time-shift phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseSpectrum {
    segments: Vec<Segment>,
    time_shift: f64,
}

impl PiecewiseSpectrum {
    /// Builds a spectrum from segments in any order. Segments must be
    /// pairwise disjoint; touching endpoints are allowed.
    pub fn new(mut segments: Vec<Segment>, time_shift: f64) -> Result<Self> {
        if !time_shift.is_finite() {
            return Err(FrameError::InvalidParams("time shift must be finite".into()));
        }
        for s in &segments {
            s.validate()?;
        }
        segments.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in segments.windows(2) {
            if w[1].lo < w[0].hi && !same_point(w[1].lo, w[0].hi) {
                return Err(FrameError::InvalidSegment {
                    lo: w[1].lo,
                    hi: w[1].hi,
                    reason: format!("overlaps ({}, {}]", w[0].lo, w[0].hi),
                });
            }
        }
        Ok(PiecewiseSpectrum { segments, time_shift })
    }

    pub fn zero() -> Self {
        PiecewiseSpectrum { segments: Vec::new(), time_shift: 0.0 }
    }

    /// `value · 1_(lo, hi]`.
    pub fn indicator(lo: f64, hi: f64, value: f64) -> Result<Self> {
        Self::new(vec![Segment::constant(lo, hi, C64::new(value, 0.0))?], 0.0)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn time_shift(&self) -> f64 {
        self.time_shift
    }

    pub fn is_zero(&self) -> bool {
        self.segments.iter().all(|s| s.a0 == C64::new(0.0, 0.0) && s.a1 == C64::new(0.0, 0.0))
    }

    /// Same pieces, time shift replaced by `tau`.
    pub fn with_time_shift(&self, tau: f64) -> Self {
        PiecewiseSpectrum { segments: self.segments.clone(), time_shift: tau }
    }

    /// Spectrum of the time-domain function translated by `tau`.
    pub fn translated(&self, tau: f64) -> Self {
        self.with_time_shift(self.time_shift + tau)
    }

    /// Multiplies every value by `factor`.
    pub fn scaled(&self, factor: C64) -> Self {
        let segments = self.segments.iter().map(|s| Segment { a0: s.a0 * factor, a1: s.a1 * factor, ..*s }).collect();
        PiecewiseSpectrum { segments, time_shift: self.time_shift }
    }

    pub fn support_length(&self) -> f64 {
        self.support().map_or(0.0, |(lo, hi)| hi - lo)
    }

    /// Piecewise value without the time-shift phase.
    pub fn piece_value(&self, gamma: f64) -> C64 {
        match locate(&self.segments, gamma, |s| (s.lo, s.hi)) {
            Some(i) => self.segments[i].value(gamma),
            None => C64::new(0.0, 0.0),
        }
    }

    /// Value at `gamma`, phase included. Zero outside the support; at a
    /// breakpoint `b` the piece ending at `b` is used.
    pub fn eval(&self, gamma: f64) -> C64 {
        let v = self.piece_value(gamma);
        if self.time_shift == 0.0 || v == C64::new(0.0, 0.0) {
            v
        } else {
            v * C64::from_polar(1.0, -2.0 * PI * self.time_shift * gamma)
        }
    }

    /// Frequency translation by `b`: `out(γ) = in(γ − b)`, the image of
    /// modulation by `b` in the time domain.
    pub fn shift_frequency(&self, b: f64) -> Self {
        // keep the symbolic phase centred at the origin
        let carry = if self.time_shift == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            C64::from_polar(1.0, 2.0 * PI * self.time_shift * b)
        };
        let segments = self
            .segments
            .iter()
            .map(|s| Segment { lo: s.lo + b, hi: s.hi + b, a0: (s.a0 - s.a1 * b) * carry, a1: s.a1 * carry })
            .collect();
        PiecewiseSpectrum { segments, time_shift: self.time_shift }
    }

    /// Unitary dilation in frequency: `out(γ) = √c · in(c·γ)`.
    pub fn dilate(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(FrameError::InvalidDilation(c));
        }
        let root = c.sqrt();
        let segments = self
            .segments
            .iter()
            .map(|s| Segment { lo: s.lo / c, hi: s.hi / c, a0: s.a0 * root, a1: s.a1 * (root * c) })
            .collect();
        Ok(PiecewiseSpectrum { segments, time_shift: self.time_shift * c })
    }

    /// `|value|²` as a piecewise quadratic; the phase drops out.
    pub fn mod_squared(&self) -> PiecewiseQuad {
        let segments = self
            .segments
            .iter()
            .map(|s| QuadSegment {
                lo: s.lo,
                hi: s.hi,
                c: [s.a0.norm_sqr(), 2.0 * (s.a0 * s.a1.conj()).re, s.a1.norm_sqr()],
            })
            .collect();
        PiecewiseQuad { segments, period: None }
    }

    /// Squared L² norm.
    pub fn norm_sqr(&self) -> f64 {
        inner_product(self, self, 0.0).re
    }

    /// Segment-wise comparison with breakpoints matched up to [`MERGE_TOL`]
    /// and coefficients up to `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.segments.len() == other.segments.len()
            && same_point(self.time_shift, other.time_shift)
            && self.segments.iter().zip(&other.segments).all(|(a, b)| {
                same_point(a.lo, b.lo)
                    && same_point(a.hi, b.hi)
                    && (a.a0 - b.a0).norm() <= tol
                    && (a.a1 - b.a1).norm() <= tol
            })
    }
}

impl Spectral for PiecewiseSpectrum {
    fn value_at(&self, gamma: f64) -> C64 {
        self.eval(gamma)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.segments.iter().flat_map(|s| [s.lo, s.hi]).collect();
        dedup_points(&mut pts);
        pts
    }

    fn support(&self) -> Option<(f64, f64)> {
        Some((self.segments.first()?.lo, self.segments.last()?.hi))
    }

    fn oscillation(&self) -> f64 {
        self.time_shift.abs()
    }
}

/// Index of the piece whose half-open interval `(lo, hi]` contains `x`.
pub(crate) fn locate<T>(items: &[T], x: f64, bounds: impl Fn(&T) -> (f64, f64)) -> Option<usize> {
    let i = items.partition_point(|s| bounds(s).1 < x);
    match items.get(i) {
        Some(s) if bounds(s).0 < x => Some(i),
        _ => None,
    }
}

/// Sorts and removes breakpoints that coincide up to [`MERGE_TOL`].
pub fn dedup_points(pts: &mut Vec<f64>) {
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|b, a| same_point(*a, *b));
}

/// Elementary intervals of the common refinement of two lists of
/// half-open intervals, with the covering index in each list.
fn common_refinement(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64, Option<usize>, Option<usize>)> {
    let mut pts: Vec<f64> = a.iter().chain(b).flat_map(|&(lo, hi)| [lo, hi]).collect();
    dedup_points(&mut pts);
    let mut out = Vec::with_capacity(pts.len());
    for w in pts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let ia = locate(a, mid, |s| *s);
        let ib = locate(b, mid, |s| *s);
        if ia.is_some() || ib.is_some() {
            out.push((w[0], w[1], ia, ib));
        }
    }
    out
}

/// `∫₀¹ tᵏ e^{iθt} dt` for k = 0, 1, 2.
fn unit_exp_moments(theta: f64) -> [C64; 3] {
    let i = C64::new(0.0, 1.0);
    if theta.abs() < 1.0 {
        // power series: Σ (iθ)^m / (m! (m + k + 1))
        let mut out = [C64::new(0.0, 0.0); 3];
        let mut term = C64::new(1.0, 0.0);
        for m in 0..30 {
            for (k, o) in out.iter_mut().enumerate() {
                *o += term / (m + k + 1) as f64;
            }
            term *= i * theta / (m + 1) as f64;
        }
        out
    } else {
        let e = C64::from_polar(1.0, theta);
        let it = i * theta;
        let m0 = (e - 1.0) / it;
        let m1 = (e - m0) / it;
        let m2 = (e - 2.0 * m1) / it;
        [m0, m1, m2]
    }
}

/// `∫_lo^hi (p0 + p1 γ + p2 γ²) e^{iκγ} dγ` in closed form.
pub(crate) fn quad_exp_integral(p: [C64; 3], lo: f64, hi: f64, kappa: f64) -> C64 {
    let w = hi - lo;
    // expand around lo: p(lo + w t) = q0 + q1 t + q2 t²
    let q0 = p[0] + p[1] * lo + p[2] * lo * lo;
    let q1 = (p[1] + p[2] * (2.0 * lo)) * w;
    let q2 = p[2] * (w * w);
    let m = unit_exp_moments(kappa * w);
    let phase = if kappa == 0.0 { C64::new(1.0, 0.0) } else { C64::from_polar(1.0, kappa * lo) };
    phase * w * (q0 * m[0] + q1 * m[1] + q2 * m[2])
}

/// `∫ f(γ) · conj(g(γ)) · e^{2πiδγ} dγ`, time-shift phases of `f` and `g`
/// folded into the exponent. With `δ = b − a` this is `⟨T_a u, T_b v⟩`.
pub fn inner_product(f: &PiecewiseSpectrum, g: &PiecewiseSpectrum, delta: f64) -> C64 {
    let omega = delta + g.time_shift - f.time_shift;
    let kappa = 2.0 * PI * omega;
    let fb: Vec<(f64, f64)> = f.segments.iter().map(|s| (s.lo, s.hi)).collect();
    let gb: Vec<(f64, f64)> = g.segments.iter().map(|s| (s.lo, s.hi)).collect();
    let mut acc = C64::new(0.0, 0.0);
    for (lo, hi, ia, ib) in common_refinement(&fb, &gb) {
        let (Some(ia), Some(ib)) = (ia, ib) else { continue };
        let (fs, gs) = (&f.segments[ia], &g.segments[ib]);
        let (g0, g1) = (gs.a0.conj(), gs.a1.conj());
        let p = [fs.a0 * g0, fs.a0 * g1 + fs.a1 * g0, fs.a1 * g1];
        acc += quad_exp_integral(p, lo, hi, kappa);
    }
    acc
}

/// One quadratic piece `c0 + c1 γ + c2 γ²` on `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSegment {
    pub lo: f64,
    pub hi: f64,
    pub c: [f64; 3],
}

impl QuadSegment {
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.c[0] + x * (self.c[1] + x * self.c[2])
    }

    /// Infimum and supremum over the open interval `(lo, hi)`: endpoint
    /// limits and the interior vertex, if any.
    pub fn range(&self) -> (f64, f64) {
        let a = self.value(self.lo);
        let b = self.value(self.hi);
        let (mut lo, mut hi) = (a.min(b), a.max(b));
        if self.c[2] != 0.0 {
            let v = -self.c[1] / (2.0 * self.c[2]);
            if v > self.lo && v < self.hi {
                let y = self.value(v);
                lo = lo.min(y);
                hi = hi.max(y);
            }
        }
        (lo, hi)
    }

    fn is_zero(&self, tol: f64) -> bool {
        let (lo, hi) = self.range();
        lo.abs() <= tol && hi.abs() <= tol
    }
}

/// Real piecewise quadratic on sorted disjoint half-open intervals;
/// zero off the listed pieces.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PiecewiseQuad {
    pub segments: Vec<QuadSegment>,
    pub period: Option<f64>,
}

impl PiecewiseQuad {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn eval(&self, x: f64) -> f64 {
        match locate(&self.segments, x, |s| (s.lo, s.hi)) {
            Some(i) => self.segments[i].value(x),
            None => 0.0,
        }
    }

    /// Pointwise sum over the common refinement.
    pub fn add(&self, other: &PiecewiseQuad) -> PiecewiseQuad {
        let a: Vec<(f64, f64)> = self.segments.iter().map(|s| (s.lo, s.hi)).collect();
        let b: Vec<(f64, f64)> = other.segments.iter().map(|s| (s.lo, s.hi)).collect();
        let segments = common_refinement(&a, &b)
            .into_iter()
            .map(|(lo, hi, ia, ib)| {
                let mut c = [0.0; 3];
                for s in ia.map(|i| &self.segments[i]).into_iter().chain(ib.map(|i| &other.segments[i])) {
                    for (ck, sk) in c.iter_mut().zip(s.c) {
                        *ck += sk;
                    }
                }
                QuadSegment { lo, hi, c }
            })
            .collect();
        PiecewiseQuad { segments, period: None }
    }

    pub fn scaled(&self, t: f64) -> PiecewiseQuad {
        let segments =
            self.segments.iter().map(|s| QuadSegment { c: [s.c[0] * t, s.c[1] * t, s.c[2] * t], ..*s }).collect();
        PiecewiseQuad { segments, period: self.period }
    }

    /// Restriction to `(lo, hi]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> PiecewiseQuad {
        let segments = self
            .segments
            .iter()
            .filter(|s| s.hi > lo && s.lo < hi)
            .map(|s| QuadSegment { lo: s.lo.max(lo), hi: s.hi.min(hi), c: s.c })
            .filter(|s| s.hi > s.lo && !same_point(s.lo, s.hi))
            .collect();
        PiecewiseQuad { segments, period: self.period }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.segments.iter().flat_map(|s| [s.lo, s.hi]).collect();
        dedup_points(&mut pts);
        pts
    }

    /// Exact infimum and supremum over `(lo, hi]`, ignoring breakpoint
    /// values. Parts of the window not covered by a piece count as zero.
    pub fn range_over(&self, lo: f64, hi: f64) -> (f64, f64) {
        let part = self.restrict(lo, hi);
        let mut inf = f64::INFINITY;
        let mut sup = f64::NEG_INFINITY;
        let mut cursor = lo;
        for s in &part.segments {
            if s.lo > cursor && !same_point(s.lo, cursor) {
                inf = inf.min(0.0);
                sup = sup.max(0.0);
            }
            let (a, b) = s.range();
            inf = inf.min(a);
            sup = sup.max(b);
            cursor = s.hi;
        }
        if cursor < hi && !same_point(cursor, hi) {
            inf = inf.min(0.0);
            sup = sup.max(0.0);
        }
        (inf, sup)
    }

    /// Total length of `(lo, hi]` on which the function vanishes
    /// identically (up to `tol`).
    pub fn zero_measure_over(&self, lo: f64, hi: f64, tol: f64) -> f64 {
        let part = self.restrict(lo, hi);
        let covered: f64 = part.segments.iter().map(|s| s.hi - s.lo).sum();
        let zero_pieces: f64 = part.segments.iter().filter(|s| s.is_zero(tol)).map(|s| s.hi - s.lo).sum();
        (hi - lo - covered) + zero_pieces
    }

    /// Integral over the whole line.
    pub fn integral(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| {
                let f = |x: f64| x * (s.c[0] + x * (s.c[1] / 2.0 + x * s.c[2] / 3.0));
                f(s.hi) - f(s.lo)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// The first window of the two-window Gabor example: 1+γ on (0,1], γ on (1,2].
    pub(crate) fn window_one() -> PiecewiseSpectrum {
        PiecewiseSpectrum::new(
            vec![Segment::new(0.0, 1.0, c(1.0), c(1.0)).unwrap(), Segment::new(1.0, 2.0, c(0.0), c(1.0)).unwrap()],
            0.0,
        )
        .unwrap()
    }

    fn window_two() -> PiecewiseSpectrum {
        PiecewiseSpectrum::new(
            vec![Segment::new(0.0, 1.0, c(1.0), c(1.0)).unwrap(), Segment::new(1.0, 2.0, c(0.0), c(0.5)).unwrap()],
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let w = window_one();
        assert_eq!(w.eval(0.5), c(1.5));
        assert_eq!(w.eval(3.0), c(0.0));
        assert_eq!(w.eval(1.5), c(1.5));
    }

    #[test]
    fn eval_half_open_at_breakpoints() {
        let w = window_one();
        // (0,1] piece used at 1
        assert_eq!(w.eval(1.0), c(2.0));
        assert!((w.eval(1.0 + 1e-12) - c(1.0)).norm() < 1e-11);
        assert_eq!(w.eval(0.0), c(0.0));
        assert_eq!(w.eval(2.0), c(2.0));
        assert_eq!(w.eval(2.0 + 1e-15), c(0.0));
    }

    #[test]
    fn eval_applies_time_shift_phase() {
        let w = window_one().with_time_shift(0.25);
        let v = w.eval(0.5);
        let expected = c(1.5) * C64::from_polar(1.0, -2.0 * PI * 0.25 * 0.5);
        assert!((v - expected).norm() < 1e-15);
    }

    #[test]
    fn overlapping_segments_rejected() {
        let r = PiecewiseSpectrum::new(
            vec![Segment::constant(0.0, 1.0, c(1.0)).unwrap(), Segment::constant(0.5, 2.0, c(1.0)).unwrap()],
            0.0,
        );
        assert!(matches!(r, Err(FrameError::InvalidSegment { .. })));
        assert!(Segment::constant(1.0, 1.0, c(1.0)).is_err());
        assert!(Segment::constant(0.0, f64::NAN, c(1.0)).is_err());
    }

    #[test]
    fn shift_examples() {
        let ind = PiecewiseSpectrum::indicator(0.0, 1.0, 1.0).unwrap();
        let shifted = ind.shift_frequency(1.0);
        assert!(shifted.approx_eq(&PiecewiseSpectrum::indicator(1.0, 2.0, 1.0).unwrap(), 0.0));
        let w = window_one();
        assert_eq!(w.shift_frequency(-1.0).eval(-0.5), c(1.5));
        assert_eq!(w.shift_frequency(0.0), w);
    }

    #[test]
    fn shift_of_phased_spectrum_matches_translation_in_frequency() {
        let w = window_one().with_time_shift(-0.7);
        let s = w.shift_frequency(0.3);
        for &g in &[0.4, 0.9, 1.6, 2.2] {
            assert!((s.eval(g) - w.eval(g - 0.3)).norm() < 1e-14);
        }
    }

    #[test]
    fn dilate_examples() {
        let ind = PiecewiseSpectrum::indicator(1.0, 2.0, 1.0).unwrap();
        let d = ind.dilate(2.0).unwrap();
        assert_eq!(d.segments().len(), 1);
        assert_eq!((d.segments()[0].lo, d.segments()[0].hi), (0.5, 1.0));
        assert!((d.segments()[0].a0 - c(2f64.sqrt())).norm() < 1e-15);
        let w = window_one();
        assert_eq!(w.dilate(1.0).unwrap(), w);
        assert!(matches!(w.dilate(0.0), Err(FrameError::InvalidDilation(_))));
        assert!(matches!(w.dilate(-1.0), Err(FrameError::InvalidDilation(_))));
    }

    #[test]
    fn dilation_preserves_norm() {
        // ∫₀¹(1+γ)² + ∫₁²γ² = 7/3 + 7/3
        let w = window_one();
        assert!((w.norm_sqr() - 14.0 / 3.0).abs() < 1e-13);
        assert!((w.dilate(3.0).unwrap().norm_sqr() - 14.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn mod_squared_examples() {
        let q = window_one().mod_squared();
        assert_eq!(q.segments[0].c, [1.0, 2.0, 1.0]);
        assert_eq!(q.segments[1].c, [0.0, 0.0, 1.0]);
        let ind = PiecewiseSpectrum::indicator(0.0, 1.0, 1.0).unwrap().mod_squared();
        assert_eq!(ind.segments[0].c, [1.0, 0.0, 0.0]);
        let iw =
            PiecewiseSpectrum::new(vec![Segment::new(0.0, 1.0, C64::new(0.0, 0.0), C64::new(0.0, 1.0)).unwrap()], 3.0)
                .unwrap()
                .mod_squared();
        assert_eq!(iw.segments[0].c, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn inner_product_examples() {
        let ind = PiecewiseSpectrum::indicator(0.0, 1.0, 1.0).unwrap();
        for k in -5i32..=5 {
            let v = inner_product(&ind, &ind, k as f64);
            let expected = if k == 0 { 1.0 } else { 0.0 };
            assert!((v - c(expected)).norm() < 1e-14, "k={k}: {v}");
        }
        // ∫₀¹(1+γ)² + ∫₁²γ·γ/2 = 7/3 + 7/6 = 7/2
        assert!((inner_product(&window_one(), &window_one(), 0.0) - c(14.0 / 3.0)).norm() < 1e-13);
        assert!((inner_product(&window_one(), &window_two(), 0.0) - c(3.5)).norm() < 1e-13);
    }

    #[test]
    fn inner_product_small_frequency_is_continuous() {
        let w = window_one();
        let a = inner_product(&w, &w, 0.0);
        let b = inner_product(&w, &w, 1e-9);
        assert!((a - b).norm() < 1e-7);
    }

    #[test]
    fn quad_range_and_zero_measure() {
        let q = PiecewiseQuad {
            segments: vec![
                QuadSegment { lo: 0.0, hi: 1.0, c: [1.0, -2.0, 1.0] },
                QuadSegment { lo: 2.0, hi: 3.0, c: [4.0, 0.0, 0.0] },
            ],
            period: None,
        };
        assert_eq!(q.range_over(0.0, 1.0), (0.0, 1.0));
        assert_eq!(q.range_over(2.0, 3.0), (4.0, 4.0));
        assert_eq!(q.range_over(0.0, 3.0), (0.0, 4.0));
        assert!((q.zero_measure_over(0.0, 3.0, 1e-14) - 1.0).abs() < 1e-15);
        assert!((q.integral() - (1.0 / 3.0 + 4.0)).abs() < 1e-14);
    }
}
