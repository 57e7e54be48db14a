//! Indexed generator families, their spectral density `G(γ) = Σ_l |φ̂_l(γ)|²`
//! and the frame bounds of the associated system of translates.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::spectrum::{dedup_points, same_point, PiecewiseQuad, PiecewiseSpectrum, Spectral};

/// Upper limit on the number of generators enumerated for one window.
const MAX_ENUMERATION: i64 = 1_000_000;

/// Relative tolerance used for tight/Parseval flags and step checks.
pub const BOUND_TOL: f64 = 1e-12;

/// Index of one generator: branch index `l` and window slot `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GenIndex {
    pub l: i64,
    pub slot: usize,
}

impl GenIndex {
    pub fn new(l: i64, slot: usize) -> Self {
        GenIndex { l, slot }
    }
}

impl fmt::Display for GenIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.l, self.slot)
    }
}

/// Rule producing the generator spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FamilyRule {
    /// Finitely many generators given one by one.
    Explicit(Vec<(GenIndex, PiecewiseSpectrum)>),
    /// `φ_l = bases[l mod m]` shifted in frequency by `l·period`.
    PeriodicTiling { bases: Vec<PiecewiseSpectrum>, period: f64 },
    /// `φ_(l,j) = windows[j]` shifted in frequency by `l·steps[j]`.
    Modulated { windows: Vec<PiecewiseSpectrum>, steps: Vec<f64> },
    /// `φ_(l,j) = dilate(windows[j], exp(-l·rates[j]))`.
    Dilated { windows: Vec<PiecewiseSpectrum>, rates: Vec<f64> },
}

/// Translation steps `q` of the generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StepRule {
    Shared(f64),
    PerSlot(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorFamily {
    rule: FamilyRule,
    extra: Vec<(GenIndex, PiecewiseSpectrum)>,
    steps: StepRule,
    support_length: f64,
}

impl GeneratorFamily {
    pub fn new(rule: FamilyRule, steps: StepRule, support_length: f64) -> Result<Self> {
        if !(support_length > 0.0) || !support_length.is_finite() {
            return Err(FrameError::InvalidParams(format!("support length must be positive, got {support_length}")));
        }
        let positive = |q: &f64| *q > 0.0 && q.is_finite();
        let ok = match &steps {
            StepRule::Shared(q) => positive(q),
            StepRule::PerSlot(qs) => !qs.is_empty() && qs.iter().all(positive),
        };
        if !ok {
            return Err(FrameError::InvalidParams("translation steps must be positive".into()));
        }
        match &rule {
            FamilyRule::PeriodicTiling { bases, .. } if bases.is_empty() => {
                return Err(FrameError::InvalidParams("tiling needs at least one base".into()))
            }
            FamilyRule::Modulated { windows, steps } if windows.len() != steps.len() => {
                return Err(FrameError::InvalidParams("one modulation step per window".into()))
            }
            FamilyRule::Dilated { windows, rates } if windows.len() != rates.len() => {
                return Err(FrameError::InvalidParams("one dilation rate per window".into()))
            }
            FamilyRule::Explicit(gens) => {
                let mut keys: Vec<_> = gens.iter().map(|g| g.0).collect();
                keys.sort();
                if keys.windows(2).any(|w| w[0] == w[1]) {
                    return Err(FrameError::InvalidParams("duplicate generator index".into()));
                }
            }
            _ => {}
        }
        let fam = GeneratorFamily { rule, extra: Vec::new(), steps, support_length };
        if let StepRule::PerSlot(qs) = &fam.steps {
            if qs.len() < fam.rule_slots() {
                return Err(FrameError::InvalidParams("missing translation step for a slot".into()));
            }
        }
        Ok(fam)
    }

    /// Translate family with one shared step.
    pub fn translates(rule: FamilyRule, step: f64, support_length: f64) -> Result<Self> {
        Self::new(rule, StepRule::Shared(step), support_length)
    }

    /// Appends generators that are not produced by the rule.
    pub fn with_extra(mut self, extra: Vec<(GenIndex, PiecewiseSpectrum)>) -> Result<Self> {
        for (idx, _) in &extra {
            if self.rule_generator(*idx).is_some() || self.extra.iter().any(|(k, _)| k == idx) {
                return Err(FrameError::InvalidParams(format!("generator {idx} already defined")));
            }
            self.step(*idx)?;
        }
        self.extra.extend(extra);
        self.extra.sort_by_key(|g| g.0);
        Ok(self)
    }

    pub fn rule(&self) -> &FamilyRule {
        &self.rule
    }

    pub fn extra(&self) -> &[(GenIndex, PiecewiseSpectrum)] {
        &self.extra
    }

    pub fn steps(&self) -> &StepRule {
        &self.steps
    }

    pub fn support_length(&self) -> f64 {
        self.support_length
    }

    /// Same family with every generator multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        let s = |p: &PiecewiseSpectrum| p.scaled(crate::spectrum::C64::new(t, 0.0));
        let rule = match &self.rule {
            FamilyRule::Explicit(g) => FamilyRule::Explicit(g.iter().map(|(i, p)| (*i, s(p))).collect()),
            FamilyRule::PeriodicTiling { bases, period } => {
                FamilyRule::PeriodicTiling { bases: bases.iter().map(s).collect(), period: *period }
            }
            FamilyRule::Modulated { windows, steps } => {
                FamilyRule::Modulated { windows: windows.iter().map(s).collect(), steps: steps.clone() }
            }
            FamilyRule::Dilated { windows, rates } => {
                FamilyRule::Dilated { windows: windows.iter().map(s).collect(), rates: rates.clone() }
            }
        };
        GeneratorFamily {
            rule,
            extra: self.extra.iter().map(|(i, p)| (*i, s(p))).collect(),
            steps: self.steps.clone(),
            support_length: self.support_length,
        }
    }

    /// The rule alone, extras dropped.
    pub fn without_extra(&self) -> Self {
        GeneratorFamily { extra: Vec::new(), ..self.clone() }
    }

    /// Same generators with new translation steps.
    pub fn with_steps(&self, steps: StepRule) -> Result<Self> {
        let fam = Self::new(self.rule.clone(), steps, self.support_length)?;
        fam.with_extra(self.extra.clone())
    }

    fn rule_slots(&self) -> usize {
        match &self.rule {
            FamilyRule::Explicit(g) => g.iter().map(|(i, _)| i.slot + 1).max().unwrap_or(0),
            FamilyRule::PeriodicTiling { .. } => 1,
            FamilyRule::Modulated { windows, .. } | FamilyRule::Dilated { windows, .. } => windows.len(),
        }
    }

    /// Translation step `q` of generator `idx`.
    pub fn step(&self, idx: GenIndex) -> Result<f64> {
        match &self.steps {
            StepRule::Shared(q) => Ok(*q),
            StepRule::PerSlot(qs) => qs
                .get(idx.slot)
                .copied()
                .ok_or_else(|| FrameError::InvalidParams(format!("no translation step for slot {}", idx.slot))),
        }
    }

    fn rule_generator(&self, idx: GenIndex) -> Option<PiecewiseSpectrum> {
        match &self.rule {
            FamilyRule::Explicit(gens) => gens.iter().find(|(k, _)| *k == idx).map(|(_, p)| p.clone()),
            FamilyRule::PeriodicTiling { bases, period } => {
                if idx.slot != 0 {
                    return None;
                }
                let m = bases.len() as i64;
                Some(bases[idx.l.rem_euclid(m) as usize].shift_frequency(idx.l as f64 * period))
            }
            FamilyRule::Modulated { windows, steps } => {
                let w = windows.get(idx.slot)?;
                Some(w.shift_frequency(idx.l as f64 * steps[idx.slot]))
            }
            FamilyRule::Dilated { windows, rates } => {
                let w = windows.get(idx.slot)?;
                w.dilate((-(idx.l as f64) * rates[idx.slot]).exp()).ok()
            }
        }
    }

    /// Spectrum of generator `idx`, if the family has one.
    pub fn generator(&self, idx: GenIndex) -> Option<PiecewiseSpectrum> {
        self.extra.iter().find(|(k, _)| *k == idx).map(|(_, p)| p.clone()).or_else(|| self.rule_generator(idx))
    }

    /// Generators with `|l| ≤ t`, ordered by index.
    pub fn section_generators(&self, t: usize) -> Vec<(GenIndex, PiecewiseSpectrum)> {
        let t = t as i64;
        let mut out: Vec<(GenIndex, PiecewiseSpectrum)> = match &self.rule {
            FamilyRule::Explicit(gens) => gens.iter().filter(|(i, _)| i.l.abs() <= t).cloned().collect(),
            _ => (-t..=t)
                .flat_map(|l| (0..self.rule_slots()).map(move |slot| GenIndex::new(l, slot)))
                .filter_map(|i| self.rule_generator(i).map(|p| (i, p)))
                .collect(),
        };
        out.extend(self.extra.iter().filter(|(i, _)| i.l.abs() <= t).cloned());
        out.sort_by_key(|g| g.0);
        out
    }

    /// Exactly the generators whose support meets `(lo, hi]` in a set of
    /// positive measure, ordered by index.
    pub fn materialize(&self, lo: f64, hi: f64) -> Result<Vec<(GenIndex, PiecewiseSpectrum)>> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(FrameError::InvalidParams(format!("window ({lo}, {hi}] must be finite")));
        }
        let meets = |p: &PiecewiseSpectrum| match p.support() {
            Some((a, b)) => a < hi && b > lo && !same_point(a, hi) && !same_point(b, lo),
            None => false,
        };
        let mut out = Vec::new();
        match &self.rule {
            FamilyRule::Explicit(gens) => out.extend(gens.iter().filter(|(_, p)| meets(p)).cloned()),
            FamilyRule::PeriodicTiling { bases, period } => {
                if !(*period != 0.0 && period.is_finite()) {
                    if bases.iter().any(meets) {
                        return Err(FrameError::UnboundedFamily("tiling period must be non-zero".into()));
                    }
                } else {
                    let m = bases.len() as i64;
                    for (r, base) in bases.iter().enumerate() {
                        let Some((a, b)) = base.support() else { continue };
                        let (l0, l1) = linear_index_range(a, b, *period, lo, hi)?;
                        let mut l = l0 + (r as i64 - l0).rem_euclid(m);
                        while l <= l1 {
                            let g = base.shift_frequency(l as f64 * period);
                            if meets(&g) {
                                out.push((GenIndex::new(l, 0), g));
                            }
                            l += m;
                        }
                    }
                }
            }
            FamilyRule::Modulated { windows, steps } => {
                for (j, (w, s)) in windows.iter().zip(steps).enumerate() {
                    let Some((a, b)) = w.support() else { continue };
                    if *s == 0.0 {
                        if meets(w) {
                            return Err(FrameError::UnboundedFamily(format!("window {j} has zero modulation step")));
                        }
                        continue;
                    }
                    let (l0, l1) = linear_index_range(a, b, *s, lo, hi)?;
                    for l in l0..=l1 {
                        let g = w.shift_frequency(l as f64 * s);
                        if meets(&g) {
                            out.push((GenIndex::new(l, j), g));
                        }
                    }
                }
            }
            FamilyRule::Dilated { windows, rates } => {
                for (j, (w, r)) in windows.iter().zip(rates).enumerate() {
                    let Some((a, b)) = w.support() else { continue };
                    let Some((l0, l1)) = dilation_index_range(a, b, *r, lo, hi, j)? else { continue };
                    for l in l0..=l1 {
                        let g = w.dilate((-(l as f64) * r).exp())?;
                        if meets(&g) {
                            out.push((GenIndex::new(l, j), g));
                        }
                    }
                }
            }
        }
        out.extend(self.extra.iter().filter(|(_, p)| meets(p)).cloned());
        out.sort_by_key(|g| g.0);
        Ok(out)
    }

    /// Period of the density implied by the rule, before verification.
    fn candidate_period(&self) -> Option<f64> {
        if !self.extra.is_empty() {
            return None;
        }
        match &self.rule {
            FamilyRule::PeriodicTiling { bases, period } => Some(period.abs() * bases.len() as f64),
            FamilyRule::Modulated { steps, .. } => common_period(steps),
            _ => None,
        }
    }

    /// Period of the underlying rule's density when the extras are ignored.
    pub(crate) fn rule_period(&self) -> Option<f64> {
        match &self.rule {
            FamilyRule::PeriodicTiling { bases, period } => Some(period.abs() * bases.len() as f64),
            FamilyRule::Modulated { steps, .. } => common_period(steps),
            _ => None,
        }
    }

    /// Largest support length among the generators the rule can produce,
    /// or an error if some generator exceeds `λ`.
    fn check_support_lengths(&self) -> Result<()> {
        let lam = self.support_length * (1.0 + BOUND_TOL);
        let too_long = |p: &PiecewiseSpectrum| p.support_length() > lam;
        let bad = match &self.rule {
            FamilyRule::Explicit(g) => g.iter().any(|(_, p)| too_long(p)),
            FamilyRule::PeriodicTiling { bases, .. } => bases.iter().any(too_long),
            FamilyRule::Modulated { windows, .. } => windows.iter().any(too_long),
            FamilyRule::Dilated { windows, rates } => {
                windows.iter().zip(rates).any(|(w, r)| !w.is_zero() && (*r != 0.0 || too_long(w)))
            }
        } || self.extra.iter().any(|(_, p)| too_long(p));
        if bad {
            return Err(FrameError::HypothesisViolation(format!(
                "a generator spectrum is not contained in an interval of length λ = {}",
                self.support_length
            )));
        }
        Ok(())
    }

    /// Checks `q = 1/λ` for every generator.
    fn check_steps(&self) -> Result<()> {
        let target = 1.0 / self.support_length;
        let ok = |q: f64| (q - target).abs() <= BOUND_TOL * target.max(1.0);
        let all = match &self.steps {
            StepRule::Shared(q) => ok(*q),
            StepRule::PerSlot(qs) => qs.iter().all(|q| ok(*q)),
        };
        if !all {
            return Err(FrameError::HypothesisViolation(format!("translation steps must equal 1/λ = {target}")));
        }
        Ok(())
    }
}

/// Integer range of `l` for which `(a + l·s, b + l·s]` may meet `(lo, hi]`.
fn linear_index_range(a: f64, b: f64, s: f64, lo: f64, hi: f64) -> Result<(i64, i64)> {
    let (x, y) = ((lo - b) / s, (hi - a) / s);
    let (x, y) = if x <= y { (x, y) } else { (y, x) };
    let (l0, l1) = (x.floor() as i64, y.ceil() as i64);
    if l1.saturating_sub(l0) > MAX_ENUMERATION {
        return Err(FrameError::UnboundedFamily(format!("window needs more than {MAX_ENUMERATION} generators")));
    }
    Ok((l0, l1))
}

/// Integer range of `l` for which `(a·e^{l r}, b·e^{l r}]` may meet `(lo, hi]`.
fn dilation_index_range(a: f64, b: f64, r: f64, lo: f64, hi: f64, slot: usize) -> Result<Option<(i64, i64)>> {
    if r == 0.0 || !r.is_finite() {
        return Err(FrameError::UnboundedFamily(format!("window {slot} has dilation rate {r}")));
    }
    // Conditions on E = e^{l r} > 0: a·E < hi and b·E > lo.
    let mut e_min = 0.0f64;
    let mut e_max = f64::INFINITY;
    let mut constrain = |coef: f64, bound: f64, less: bool| -> bool {
        // less: coef·E < bound, otherwise coef·E > bound
        if coef == 0.0 {
            return if less { 0.0 < bound } else { 0.0 > bound };
        }
        let v = bound / coef;
        if (coef > 0.0) == less {
            e_max = e_max.min(v);
        } else {
            e_min = e_min.max(v);
        }
        true
    };
    if !constrain(a, hi, true) || !constrain(b, lo, false) {
        return Ok(None);
    }
    if e_max <= 0.0 || e_min >= e_max {
        return Ok(None);
    }
    if e_min <= 0.0 || e_max.is_infinite() {
        return Err(FrameError::UnboundedFamily(format!(
            "dilates of window {slot} meet ({lo}, {hi}] for infinitely many scales"
        )));
    }
    let (x, y) = (e_min.ln() / r, e_max.ln() / r);
    let (x, y) = if x <= y { (x, y) } else { (y, x) };
    Ok(Some((x.floor() as i64, y.ceil() as i64)))
}

/// Smallest common period of the given steps when they are commensurate.
fn common_period(steps: &[f64]) -> Option<f64> {
    let s0 = steps.iter().copied().find(|s| *s != 0.0)?.abs();
    let mut num_lcm: i64 = 1;
    let mut den_gcd: i64 = 0;
    for s in steps {
        if *s == 0.0 {
            continue;
        }
        let r = Ratio::<i64>::approximate_float(s.abs() / s0)?;
        if (*r.numer() as f64 / *r.denom() as f64 - s.abs() / s0).abs() > 1e-12 || *r.denom() > 1000 {
            return None;
        }
        num_lcm = num_integer_lcm(num_lcm, *r.numer());
        den_gcd = num_integer_gcd(den_gcd, *r.denom());
    }
    Some(s0 * num_lcm as f64 / den_gcd as f64)
}

fn num_integer_gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        num_integer_gcd(b, a % b)
    }
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    a / num_integer_gcd(a, b) * b
}

/// `G(γ) = Σ_l |φ̂_l(γ)|²` assembled on a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub values: PiecewiseQuad,
    pub period: Option<f64>,
    pub window: (f64, f64),
}

impl SpectralDensity {
    /// Value at `gamma`; outside the window the period is used when known.
    pub fn eval(&self, gamma: f64) -> f64 {
        let (lo, hi) = self.window;
        let x = match self.period {
            Some(p) if gamma <= lo || gamma > hi => lo + (gamma - lo).rem_euclid(p),
            _ => gamma,
        };
        // rem_euclid can land on lo itself, which belongs to the previous period
        let x = if self.period.is_some() && x <= lo { x + self.period.unwrap_or(0.0) } else { x };
        self.values.eval(x)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.values.breakpoints()
    }

    /// Samples `(γ, G(γ))` at `resolution` midpoints of the window.
    pub fn curve(&self, resolution: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = self.window;
        let h = (hi - lo) / resolution.max(1) as f64;
        (0..resolution.max(1))
            .map(|k| {
                let g = lo + (k as f64 + 0.5) * h;
                (g, self.values.eval(g))
            })
            .collect()
    }
}

/// Assembles the density of `fam` on `(lo, hi]`, recording a period when
/// the rule implies one and the assembled values confirm it.
pub fn spectral_density(fam: &GeneratorFamily, lo: f64, hi: f64) -> Result<SpectralDensity> {
    let values = assemble(fam, lo, hi)?;
    let period = match fam.candidate_period() {
        Some(p) => detect_period(fam, p, lo)?,
        None => None,
    };
    Ok(SpectralDensity { values: PiecewiseQuad { period, ..values }, period, window: (lo, hi) })
}

fn assemble(fam: &GeneratorFamily, lo: f64, hi: f64) -> Result<PiecewiseQuad> {
    let gens = fam.materialize(lo, hi)?;
    let mut acc = PiecewiseQuad::zero();
    for (_, g) in &gens {
        acc = acc.add(&g.mod_squared().restrict(lo, hi));
    }
    Ok(acc)
}

/// Smallest divisor `p/k` of the candidate period under which the density
/// repeats on its assembled breakpoints.
fn detect_period(fam: &GeneratorFamily, candidate: f64, origin: f64) -> Result<Option<f64>> {
    let max_div = match fam.rule() {
        FamilyRule::PeriodicTiling { bases, .. } => bases.len(),
        _ => 1,
    };
    let two = assemble(fam, origin, origin + 2.0 * candidate)?;
    let scale = two.range_over(origin, origin + 2.0 * candidate).1.abs().max(1.0);
    for k in (1..=max_div).rev() {
        if max_div % k != 0 {
            continue;
        }
        let p = candidate / k as f64;
        let mut pts: Vec<f64> = two.breakpoints();
        pts.extend(two.breakpoints().iter().map(|x| x - p));
        pts.retain(|x| *x >= origin && *x <= origin + p);
        pts.extend([origin, origin + p]);
        dedup_points(&mut pts);
        let repeats = pts.windows(2).all(|w| {
            let probes = [0.25, 0.5, 0.75].map(|t| w[0] + t * (w[1] - w[0]));
            probes.iter().all(|x| (two.eval(*x) - two.eval(x + p)).abs() <= 1e-12 * scale)
        });
        if repeats {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Essential infimum and supremum of the density over one period, or over
/// its window when it is aperiodic.
pub fn ess_range(g: &SpectralDensity) -> (f64, f64) {
    let (lo, hi) = g.window;
    match g.period {
        Some(p) if hi - lo >= p * (1.0 - 1e-12) => g.values.range_over(lo, lo + p),
        Some(p) => {
            let d = SpectralDensity { period: None, ..g.clone() };
            let _ = p;
            ess_range(&d)
        }
        None => g.values.range_over(lo, hi),
    }
}

/// Frame bounds `α ≤ β` with tight and Parseval flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub is_tight: bool,
    pub is_parseval: bool,
}

impl FrameBounds {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self::with_tolerance(lower, upper, BOUND_TOL)
    }

    pub fn with_tolerance(lower: f64, upper: f64, tol: f64) -> Self {
        let scale = upper.abs().max(1.0);
        let is_tight = (upper - lower).abs() <= tol * scale;
        let is_parseval = is_tight && (lower - 1.0).abs() <= tol && (upper - 1.0).abs() <= tol;
        FrameBounds { lower, upper, is_tight, is_parseval }
    }
}

/// Window over which the density determines the global essential range:
/// one period for periodic rules, widened around any extra generators.
pub fn analysis_window(fam: &GeneratorFamily) -> Result<(f64, f64)> {
    let Some(p) = fam.rule_period() else {
        let hull = fam.support_hull().ok_or(FrameError::NotAFrame { witness_lo: 0.0, witness_hi: 1.0 })?;
        // compact aperiodic family: G vanishes beyond the last support
        return Err(FrameError::NotAFrame { witness_lo: hull.1, witness_hi: hull.1 + 1.0 });
    };
    let supports: Vec<(f64, f64)> = fam.extra.iter().filter_map(|(_, g)| g.support()).collect();
    if supports.is_empty() {
        return Ok((0.0, p));
    }
    let a = supports.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let b = supports.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    Ok((a - p, b + p))
}

impl GeneratorFamily {
    /// Hull of all supports for families without an infinite rule.
    pub fn support_hull(&self) -> Option<(f64, f64)> {
        let mut sup: Vec<(f64, f64)> = self.extra.iter().filter_map(|(_, g)| g.support()).collect();
        match &self.rule {
            FamilyRule::Explicit(g) => sup.extend(g.iter().filter_map(|(_, p)| p.support())),
            _ => return None,
        }
        let a = sup.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        let b = sup.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        if a.is_finite() {
            Some((a, b))
        } else {
            Some((0.0, 0.0))
        }
    }
}

/// Density over the analysis window used for frame bounds.
pub fn global_density(fam: &GeneratorFamily) -> Result<SpectralDensity> {
    let (lo, hi) = analysis_window(fam)?;
    let mut d = spectral_density(fam, lo, hi)?;
    if !fam.extra.is_empty() {
        d.period = None;
    }
    Ok(d)
}

/// Frame bounds `(λ·ess inf G, λ·ess sup G)` of the system of translates,
/// valid when every step equals `1/λ` and every generator spectrum fits in
/// an interval of length `λ`.
pub fn translate_frame_bounds(fam: &GeneratorFamily) -> Result<FrameBounds> {
    fam.check_steps()?;
    fam.check_support_lengths()?;
    let g = global_density(fam)?;
    bounds_from_density(&g, fam.support_length())
}

pub(crate) fn bounds_from_density(g: &SpectralDensity, lambda: f64) -> Result<FrameBounds> {
    let (inf, sup) = ess_range(g);
    if inf <= 1e-13 * sup.max(1e-300) || sup <= 0.0 {
        let (lo, hi) = zero_witness(g);
        return Err(FrameError::NotAFrame { witness_lo: lo, witness_hi: hi });
    }
    Ok(FrameBounds::new(lambda * inf, lambda * sup))
}

/// A piece of the window on which the density attains its infimum.
fn zero_witness(g: &SpectralDensity) -> (f64, f64) {
    let (lo, hi) = g.window;
    let end = g.period.map_or(hi, |p| lo + p);
    let mut cursor = lo;
    let mut best = (lo, end, f64::INFINITY);
    for s in g.values.restrict(lo, end).segments {
        if s.lo > cursor && !same_point(s.lo, cursor) {
            return (cursor, s.lo);
        }
        let m = s.range().0;
        if m < best.2 {
            best = (s.lo, s.hi, m);
        }
        cursor = s.hi;
    }
    if cursor < end && !same_point(cursor, end) {
        return (cursor, end);
    }
    (best.0, best.1)
}
