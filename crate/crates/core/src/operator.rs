//! The frame operator as a Fourier multiplier, canonical duals, finite
//! sections of the Gram matrix and the tests built on them.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::family::{
    ess_range, global_density, spectral_density, translate_frame_bounds, FrameBounds, GenIndex, GeneratorFamily,
    SpectralDensity,
};
use crate::linalg::{Eigen, HermitianMatrix};
use crate::oracle::{integrate, quadrature_inner_product, QUAD_TOL};
use crate::spectrum::{dedup_points, inner_product, PiecewiseSpectrum, Spectral, C64};

type EvalFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// A spectrum known only through a pointwise evaluator, with the
/// breakpoints needed for panel quadrature.
#[derive(Clone)]
pub struct EvaluableSpectrum {
    f: EvalFn,
    breakpoints: Vec<f64>,
    support: Option<(f64, f64)>,
    oscillation: f64,
}

impl EvaluableSpectrum {
    pub fn new(
        f: impl Fn(f64) -> C64 + Send + Sync + 'static,
        mut breakpoints: Vec<f64>,
        support: Option<(f64, f64)>,
        oscillation: f64,
    ) -> Self {
        dedup_points(&mut breakpoints);
        EvaluableSpectrum { f: Arc::new(f), breakpoints, support, oscillation }
    }

    pub fn from_piecewise(p: &PiecewiseSpectrum) -> Self {
        let q = p.clone();
        Self::new(move |g| q.eval(g), p.breakpoints(), p.support(), p.oscillation())
    }

    pub fn zero() -> Self {
        Self::new(|_| C64::new(0.0, 0.0), Vec::new(), None, 0.0)
    }

    pub fn eval(&self, gamma: f64) -> C64 {
        match self.support {
            Some((lo, hi)) if gamma > lo && gamma <= hi => (self.f)(gamma),
            _ => C64::new(0.0, 0.0),
        }
    }

    /// Spectrum of the time-domain translate by `tau`.
    pub fn translated(&self, tau: f64) -> Self {
        let f = self.f.clone();
        Self::new(
            move |g| f(g) * C64::from_polar(1.0, -2.0 * PI * tau * g),
            self.breakpoints.clone(),
            self.support,
            self.oscillation + tau.abs(),
        )
    }

    /// Pointwise difference `self − other`.
    pub fn minus(&self, other: &EvaluableSpectrum) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let support = match (self.support, other.support) {
            (Some(x), Some(y)) => Some((x.0.min(y.0), x.1.max(y.1))),
            (x, None) => x,
            (None, y) => y,
        };
        let mut bp = self.breakpoints.clone();
        bp.extend(&other.breakpoints);
        Self::new(move |g| a.eval(g) - b.eval(g), bp, support, self.oscillation + other.oscillation)
    }

    /// `‖·‖` by quadrature.
    pub fn norm(&self) -> Result<f64> {
        Ok(quadrature_inner_product(self, self, 0.0)?.re.max(0.0).sqrt())
    }
}

impl fmt::Debug for EvaluableSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EvaluableSpectrum")
            .field("support", &self.support)
            .field("breakpoints", &self.breakpoints.len())
            .finish()
    }
}

impl Spectral for EvaluableSpectrum {
    fn value_at(&self, gamma: f64) -> C64 {
        self.eval(gamma)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }

    fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    fn oscillation(&self) -> f64 {
        self.oscillation
    }
}

/// `S: f̂ ↦ λ·G·f̂`. For families with extra generators the density is
/// exact on `density.window` and equal to the periodic `background`
/// elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierOperator {
    pub density: SpectralDensity,
    pub background: Option<SpectralDensity>,
    pub lambda: f64,
}

impl MultiplierOperator {
    pub fn new(fam: &GeneratorFamily) -> Result<Self> {
        let lambda = fam.support_length();
        match fam.rule_period() {
            Some(p) if fam.extra().is_empty() => {
                Ok(MultiplierOperator { density: spectral_density(fam, 0.0, p)?, background: None, lambda })
            }
            Some(p) => Ok(MultiplierOperator {
                density: global_density(fam)?,
                background: Some(spectral_density(&fam.without_extra(), 0.0, p)?),
                lambda,
            }),
            None => {
                let (a, b) = fam.support_hull().ok_or_else(|| {
                    FrameError::UnboundedFamily("multiplier form needs a periodic or finite family".into())
                })?;
                let (a, b) = if b > a { (a, b) } else { (0.0, 1.0) };
                Ok(MultiplierOperator { density: spectral_density(fam, a, b)?, background: None, lambda })
            }
        }
    }

    pub fn density_at(&self, gamma: f64) -> f64 {
        let (lo, hi) = self.density.window;
        if self.density.period.is_some() || (gamma > lo && gamma <= hi) {
            return self.density.eval(gamma);
        }
        self.background.as_ref().map_or(0.0, |b| b.eval(gamma))
    }

    pub fn multiplier(&self, gamma: f64) -> f64 {
        self.lambda * self.density_at(gamma)
    }

    /// Breakpoints of the density inside `(lo, hi)`.
    pub fn breakpoints_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut add = |d: &SpectralDensity| match d.period {
            Some(p) => {
                let base = d.breakpoints();
                let k0 = ((lo - d.window.0) / p).floor() as i64 - 1;
                let k1 = ((hi - d.window.0) / p).ceil() as i64 + 1;
                for k in k0..=k1 {
                    out.extend(base.iter().map(|x| x + k as f64 * p));
                }
            }
            None => out.extend(d.breakpoints()),
        };
        add(&self.density);
        if let Some(b) = &self.background {
            add(b);
        }
        out.retain(|x| *x > lo && *x < hi);
        dedup_points(&mut out);
        out
    }

    /// Essential range of `G` over the whole line.
    pub fn ess_range(&self) -> (f64, f64) {
        let (lo, hi) = ess_range(&self.density);
        match &self.background {
            Some(b) => {
                let (blo, bhi) = ess_range(b);
                (lo.min(blo), hi.max(bhi))
            }
            None => (lo, hi),
        }
    }

    pub fn is_invertible(&self) -> bool {
        let (lo, hi) = self.ess_range();
        lo > 1e-13 * hi
    }
}

/// `S f` as an evaluable spectrum.
pub fn apply_multiplier_s(op: &Arc<MultiplierOperator>, f: &PiecewiseSpectrum) -> EvaluableSpectrum {
    let (o, g) = (op.clone(), f.clone());
    let mut bp = f.breakpoints();
    if let Some((a, b)) = f.support() {
        bp.extend(op.breakpoints_in(a, b));
    }
    EvaluableSpectrum::new(move |x| g.eval(x) * o.multiplier(x), bp, f.support(), f.oscillation())
}

/// `S⁻¹ f = f̂ / (λG)`.
pub fn apply_multiplier_inverse(op: &Arc<MultiplierOperator>, f: &PiecewiseSpectrum) -> EvaluableSpectrum {
    let (o, g) = (op.clone(), f.clone());
    let mut bp = f.breakpoints();
    if let Some((a, b)) = f.support() {
        bp.extend(op.breakpoints_in(a, b));
    }
    EvaluableSpectrum::new(
        move |x| {
            let v = g.eval(x);
            if v == C64::new(0.0, 0.0) {
                v
            } else {
                v / o.multiplier(x)
            }
        },
        bp,
        f.support(),
        f.oscillation(),
    )
}

/// Canonical dual `{T_{nq} S⁻¹φ_l}` of a frame of translates.
#[derive(Debug, Clone)]
pub struct CanonicalDual {
    fam: GeneratorFamily,
    op: Arc<MultiplierOperator>,
    bounds: FrameBounds,
}

impl CanonicalDual {
    pub fn new(fam: &GeneratorFamily) -> Result<Self> {
        let bounds = translate_frame_bounds(fam)?;
        let op = Arc::new(MultiplierOperator::new(fam)?);
        Ok(CanonicalDual { fam: fam.clone(), op, bounds })
    }

    pub fn operator(&self) -> &Arc<MultiplierOperator> {
        &self.op
    }

    pub fn bounds(&self) -> FrameBounds {
        self.bounds
    }

    pub fn generator(&self, idx: GenIndex) -> Option<EvaluableSpectrum> {
        Some(apply_multiplier_inverse(&self.op, &self.fam.generator(idx)?))
    }

    pub fn generators_in(&self, lo: f64, hi: f64) -> Result<Vec<(GenIndex, EvaluableSpectrum)>> {
        Ok(self.fam.materialize(lo, hi)?.iter().map(|(i, g)| (*i, apply_multiplier_inverse(&self.op, g))).collect())
    }

    /// `S⁻¹ T_{nq} φ_l`.
    pub fn atom(&self, idx: GenIndex, n: i64) -> Result<EvaluableSpectrum> {
        let g = self.fam.generator(idx).ok_or_else(|| FrameError::InvalidParams(format!("no generator {idx}")))?;
        let q = self.fam.step(idx)?;
        Ok(apply_multiplier_inverse(&self.op, &g.translated(n as f64 * q)))
    }

    /// `Σ_l |S⁻¹φ_l(γ)|²`, summed over the dual generators whose support
    /// contains `γ`.
    pub fn dual_density_at(&self, gamma: f64) -> Result<f64> {
        let eps = 1e-9 * gamma.abs().max(1.0);
        Ok(self
            .fam
            .materialize(gamma - eps, gamma)?
            .iter()
            .map(|(_, g)| (g.eval(gamma) / self.op.multiplier(gamma)).norm_sqr())
            .sum())
    }

    /// Canonical dual of the dual family, generator `idx`: the dual
    /// generator divided by `λ` times the dual density.
    pub fn dual_of_dual(&self, idx: GenIndex) -> Option<EvaluableSpectrum> {
        let d = self.generator(idx)?;
        let me = self.clone();
        let lambda = self.fam.support_length();
        let inner = d.clone();
        Some(EvaluableSpectrum::new(
            move |x| {
                let v = inner.eval(x);
                if v == C64::new(0.0, 0.0) {
                    return v;
                }
                match me.dual_density_at(x) {
                    Ok(gd) => v / (lambda * gd),
                    Err(_) => C64::new(f64::NAN, f64::NAN),
                }
            },
            d.breakpoints.clone(),
            d.support,
            d.oscillation,
        ))
    }
}

/// Dual frame bounds found by extremizing `λ·Σ|S⁻¹φ_l|²` numerically, next
/// to the predicted `(1/β, 1/α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualBounds {
    pub extremized: FrameBounds,
    pub predicted: FrameBounds,
    pub max_deviation: f64,
}

pub fn dual_frame_bounds(fam: &GeneratorFamily) -> Result<DualBounds> {
    let dual = CanonicalDual::new(fam)?;
    let (lo, hi) = crate::family::analysis_window(fam)?;
    let (lo, hi) = match (fam.rule_period(), fam.extra().is_empty()) {
        (Some(p), true) => (0.0, p),
        _ => (lo, hi),
    };
    let duals = dual.generators_in(lo, hi)?;
    let lambda = fam.support_length();
    let dens = |x: f64| lambda * duals.iter().map(|(_, d)| d.eval(x).norm_sqr()).sum::<f64>();
    let mut pts = dual.op.breakpoints_in(lo, hi);
    for (_, d) in &duals {
        pts.extend(d.breakpoints.iter().filter(|x| **x > lo && **x < hi));
    }
    pts.extend([lo, hi]);
    dedup_points(&mut pts);
    let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (pmin, pmax) = extremize(&dens, a, b);
        mn = mn.min(pmin);
        mx = mx.max(pmax);
    }
    let b = dual.bounds();
    let predicted = FrameBounds::new(1.0 / b.upper, 1.0 / b.lower);
    let max_deviation = (mn - predicted.lower).abs().max((mx - predicted.upper).abs());
    Ok(DualBounds { extremized: FrameBounds::new(mn, mx), predicted, max_deviation })
}

/// Minimum and maximum of `f` on `(a, b]`: a uniform scan followed by
/// golden-section refinement around the best samples.
fn extremize(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    const SCAN: usize = 64;
    let width = b - a;
    let xs: Vec<f64> = (0..=SCAN)
        .map(|k| if k == 0 { a + 1e-12 * width.max(1e-300) } else { a + width * k as f64 / SCAN as f64 })
        .collect();
    let ys: Vec<f64> = xs.iter().map(|x| f(*x)).collect();
    let refine = |sign: f64| -> f64 {
        let k = (0..ys.len()).max_by(|&i, &j| (sign * ys[i]).total_cmp(&(sign * ys[j]))).unwrap_or(0);
        let (mut l, mut r) = (xs[k.saturating_sub(1)], xs[(k + 1).min(SCAN)]);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..80 {
            let (c, d) = (r - g * (r - l), l + g * (r - l));
            if sign * f(c) > sign * f(d) {
                r = d;
            } else {
                l = c;
            }
        }
        let best = sign * ys[k];
        (sign * f(0.5 * (l + r))).max(best) * sign
    };
    (refine(-1.0), refine(1.0))
}

/// Index of one atom `T_{nq} φ_gen` of a finite section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AtomIndex {
    pub gen: GenIndex,
    pub n: i64,
}

/// Atoms with `|n| ≤ s` and generator index `|l| ≤ t`, ordered by
/// generator and then by `n`.
pub fn section_atoms(fam: &GeneratorFamily, s: usize, t: usize) -> Result<Vec<(AtomIndex, PiecewiseSpectrum)>> {
    let s = s as i64;
    let mut out = Vec::new();
    for (gen, g) in fam.section_generators(t) {
        let q = fam.step(gen)?;
        for n in -s..=s {
            out.push((AtomIndex { gen, n }, g.translated(n as f64 * q)));
        }
    }
    Ok(out)
}

/// Gram matrix `G[r][c] = ⟨atom_r, atom_c⟩` of a finite section.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub s: usize,
    pub t: usize,
    pub index: Vec<AtomIndex>,
    pub matrix: HermitianMatrix,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn row_of(&self, a: AtomIndex) -> Option<usize> {
        self.index.binary_search(&a).ok()
    }
}

pub fn gram_matrix(fam: &GeneratorFamily, s: usize, t: usize) -> Result<GramMatrix> {
    let atoms = section_atoms(fam, s, t)?;
    let dim = atoms.len();
    let rows: Vec<Vec<C64>> = (0..dim)
        .into_par_iter()
        .map(|r| (r..dim).map(|c| inner_product(&atoms[r].1, &atoms[c].1, 0.0)).collect())
        .collect();
    let mut m = HermitianMatrix::zeros(dim);
    for (r, row) in rows.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            let c = r + k;
            m.set(r, c, *v);
            m.set(c, r, v.conj());
        }
    }
    Ok(GramMatrix { s, t, index: atoms.into_iter().map(|a| a.0).collect(), matrix: m })
}

/// Gram matrix of a section with its eigendecomposition, reused across
/// right-hand sides.
#[derive(Debug, Clone)]
pub struct SectionSolver {
    pub gram: GramMatrix,
    atoms: Vec<PiecewiseSpectrum>,
    eigen: Eigen,
}

impl SectionSolver {
    pub fn new(fam: &GeneratorFamily, s: usize, t: usize) -> Result<Self> {
        let gram = gram_matrix(fam, s, t)?;
        let eigen = gram.matrix.eigen()?;
        let atoms = section_atoms(fam, s, t)?.into_iter().map(|a| a.1).collect();
        Ok(SectionSolver { gram, atoms, eigen })
    }

    pub fn rank(&self) -> usize {
        self.eigen.rank()
    }

    pub fn condition(&self) -> f64 {
        self.eigen.condition()
    }

    pub fn eigen(&self) -> &Eigen {
        &self.eigen
    }

    /// Minimal-norm coefficients `c` with `Σ c_k atom_k` the orthogonal
    /// projection of `f` onto the section span.
    pub fn coefficients(&self, f: &PiecewiseSpectrum) -> Vec<C64> {
        let b: Vec<C64> = self.atoms.iter().map(|a| inner_product(f, a, 0.0).conj()).collect();
        self.eigen.pinv_apply(&b).into_iter().map(|c| c.conj()).collect()
    }

    /// `‖S_{s,t}⁺ atom‖`.
    pub fn inverse_norm(&self, a: AtomIndex) -> Option<f64> {
        Some(self.eigen.pinv_diag(self.gram.row_of(a)?).sqrt())
    }

    /// `Σ c_k atom_k` evaluated at `gamma`.
    pub fn synthesize_at(&self, c: &[C64], gamma: f64) -> C64 {
        self.atoms.iter().zip(c).map(|(a, ck)| a.eval(gamma) * ck).sum()
    }
}

/// Expansion coefficients of a function in a finite section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionCoefficients {
    pub index: Vec<AtomIndex>,
    pub values: Vec<C64>,
    pub rank: usize,
    pub dim: usize,
}

impl SectionCoefficients {
    pub fn get(&self, a: AtomIndex) -> Option<C64> {
        self.index.binary_search(&a).ok().map(|k| self.values[k])
    }
}

pub fn finite_section_coefficients(
    f: &PiecewiseSpectrum,
    fam: &GeneratorFamily,
    s: usize,
    t: usize,
) -> Result<SectionCoefficients> {
    let solver = SectionSolver::new(fam, s, t)?;
    let values = solver.coefficients(f);
    Ok(SectionCoefficients { index: solver.gram.index.clone(), values, rank: solver.rank(), dim: solver.gram.dim() })
}

/// `⟨f, S⁻¹ atom⟩` from the multiplier form of the full frame operator.
pub fn multiplier_coefficient(dual: &CanonicalDual, f: &PiecewiseSpectrum, a: AtomIndex) -> Result<C64> {
    quadrature_inner_product(f, &dual.atom(a.gen, a.n)?, 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub s: usize,
    pub t: usize,
    pub j: GenIndex,
    pub norm_inv: f64,
    pub max_coeff_err: Option<f64>,
    pub cond: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub j: GenIndex,
    pub observed_sup: f64,
    pub final_value: f64,
    /// The sweep maximum stays within 5% of the value at the largest section.
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SweepSummary>,
}

impl SweepReport {
    pub const CSV_HEADER: &'static str = "s,t,j,normInv,maxCoeffErr,cond";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let err = r.max_coeff_err.map_or(String::new(), |e| format!("{e:e}"));
            out.push_str(&format!("{},{},{},{:.15e},{},{:e}\n", r.s, r.t, r.j, r.norm_inv, err, r.cond));
        }
        out
    }

    /// Largest coefficient error recorded for section `(s, t)`.
    pub fn coeff_error(&self, s: usize, t: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.s == s && r.t == t).and_then(|r| r.max_coeff_err)
    }
}

/// What to sweep: sections in increasing order, generators whose inverse
/// norms are tracked, and optional test functions whose coefficients on
/// the core atoms `|n| ≤ core.0, |l| ≤ core.1` are compared with the
/// multiplier oracle.
#[derive(Debug, Clone, Default)]
pub struct SweepRequest {
    pub sections: Vec<(usize, usize)>,
    pub generators: Vec<GenIndex>,
    pub test_functions: Vec<PiecewiseSpectrum>,
    pub core: (usize, usize),
}

/// Sections `(1,1), (2,2), (4,4), …` capped at `(max_s, max_t)`, ending
/// exactly there.
pub fn doubling_sections(max_s: usize, max_t: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut k = 1;
    while k < max_s.max(max_t) {
        let p = (k.min(max_s), k.min(max_t));
        if out.last() != Some(&p) {
            out.push(p);
        }
        k *= 2;
    }
    let last = (max_s, max_t);
    if out.last() != Some(&last) {
        out.push(last);
    }
    out
}

fn check_monotone(sections: &[(usize, usize)]) -> Result<()> {
    for w in sections.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b.0 < a.0 || b.1 < a.1 || b == a {
            return Err(FrameError::NonMonotoneSweep(format!("{a:?} followed by {b:?}")));
        }
    }
    if sections.is_empty() {
        return Err(FrameError::NonMonotoneSweep("empty sweep".into()));
    }
    Ok(())
}

pub fn section_inverse_norm_sweep(fam: &GeneratorFamily, req: &SweepRequest) -> Result<SweepReport> {
    check_monotone(&req.sections)?;
    let oracle: Vec<Vec<(AtomIndex, C64)>> = if req.test_functions.is_empty() {
        Vec::new()
    } else {
        let dual = CanonicalDual::new(fam)?;
        let core = section_atoms(fam, req.core.0, req.core.1)?;
        req.test_functions
            .iter()
            .map(|f| {
                core.par_iter()
                    .map(|(a, _)| Ok((*a, multiplier_coefficient(&dual, f, *a)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?
    };
    let mut rows = Vec::new();
    for &(s, t) in &req.sections {
        let solver = SectionSolver::new(fam, s, t)?;
        let mut err: Option<f64> = None;
        for (f, expected) in req.test_functions.iter().zip(&oracle) {
            let c = solver.coefficients(f);
            for (a, v) in expected {
                if let Some(r) = solver.gram.row_of(*a) {
                    let e = (c[r] - v).norm();
                    err = Some(err.map_or(e, |x: f64| x.max(e)));
                }
            }
        }
        let cond = solver.condition();
        for &j in &req.generators {
            if let Some(norm_inv) = solver.inverse_norm(AtomIndex { gen: j, n: 0 }) {
                rows.push(SweepRow { s, t, j, norm_inv, max_coeff_err: err, cond });
            }
        }
    }
    let summary = req
        .generators
        .iter()
        .filter_map(|&j| {
            let vals: Vec<f64> = rows.iter().filter(|r| r.j == j).map(|r| r.norm_inv).collect();
            let final_value = *vals.last()?;
            let observed_sup = vals.iter().copied().fold(0.0, f64::max);
            Some(SweepSummary { j, observed_sup, final_value, bounded: observed_sup <= 1.05 * final_value })
        })
        .collect();
    Ok(SweepReport { rows, summary })
}

/// Largest `|⟨atom_k, S⁻¹ atom_i⟩ − δ_{ki}|` over a section, with the
/// duals in multiplier form and the inner products by quadrature.
pub fn biorthogonality_check(fam: &GeneratorFamily, s: usize, t: usize) -> Result<f64> {
    let dual = CanonicalDual::new(fam)?;
    let atoms = section_atoms(fam, s, t)?;
    let duals: Vec<EvaluableSpectrum> = atoms.iter().map(|(a, _)| dual.atom(a.gen, a.n)).collect::<Result<_>>()?;
    let worst = (0..atoms.len())
        .into_par_iter()
        .map(|k| {
            let mut w = 0.0f64;
            for (i, d) in duals.iter().enumerate() {
                let v = quadrature_inner_product(&atoms[k].1, d, 0.0)?;
                let target = if i == k { 1.0 } else { 0.0 };
                w = w.max((v - C64::new(target, 0.0)).norm());
            }
            Ok(w)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Independence {
    pub rank: usize,
    pub dim: usize,
    pub deficiency: usize,
    pub is_independent: bool,
}

pub fn independence_test(fam: &GeneratorFamily, s: usize, t: usize) -> Result<Independence> {
    let g = gram_matrix(fam, s, t)?;
    let rank = g.matrix.eigen()?.rank();
    let dim = g.dim();
    Ok(Independence { rank, dim, deficiency: dim - rank, is_independent: rank == dim })
}

/// Builds the shift operators `L^{1,0}: T_{nq}φ_l ↦ T_{(n+1)q}φ_l` and
/// `L^{0,1}: T_{nq^{(l)}}φ_l ↦ T_{nq^{(l+1)}}φ_{l+1}` on the section span by
/// least squares in orthonormal coordinates, then returns the largest
/// `‖(L^{1,0})^m (L^{0,1})^k a_0 − a_{m,k}‖` over the section, where `a_0`
/// is the first atom.
pub fn shift_operator_check(fam: &GeneratorFamily, s: usize, t: usize) -> Result<f64> {
    let solver = SectionSolver::new(fam, s, t)?;
    let dim = solver.gram.dim();
    if solver.rank() < dim {
        return Err(FrameError::IllPosedOperator(format!(
            "section ({s}, {t}) is linearly dependent (rank {} of {dim}), so no shift operator exists",
            solver.rank()
        )));
    }
    let e = solver.eigen();
    // coordinates x_k[i] = √λ_i · U[k][i] reproduce the Gram inner products
    let coords: Vec<Vec<C64>> =
        (0..dim).map(|k| (0..dim).map(|i| e.vector(i)[k] * e.values[i].max(0.0).sqrt()).collect()).collect();
    let gens: Vec<GenIndex> = fam.section_generators(t).into_iter().map(|g| g.0).collect();
    let s = s as i64;
    let row = |gen: GenIndex, n: i64| solver.gram.row_of(AtomIndex { gen, n });
    let mut pairs_n = Vec::new();
    let mut pairs_l = Vec::new();
    for (p, &g) in gens.iter().enumerate() {
        for n in -s..=s {
            let src = row(g, n).expect("atom in section");
            if n < s {
                pairs_n.push((src, row(g, n + 1).expect("atom in section")));
            }
            if let Some(&next) = gens.get(p + 1) {
                pairs_l.push((src, row(next, n).expect("atom in section")));
            }
        }
    }
    let shift_n = LeastSquaresMap::new(&coords, &pairs_n)?;
    let shift_l = LeastSquaresMap::new(&coords, &pairs_l)?;
    let base = row(gens[0], -s).expect("atom in section");
    let mut worst = 0.0f64;
    let mut v_l = coords[base].clone();
    for (k, &g) in gens.iter().enumerate() {
        if k > 0 {
            v_l = shift_l.apply(&v_l);
        }
        let mut v = v_l.clone();
        for m in 0..=(2 * s) {
            if m > 0 {
                v = shift_n.apply(&v);
            }
            let target = &coords[row(g, -s + m).expect("atom in section")];
            let r: f64 = v.iter().zip(target).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

/// Linear map sending each source coordinate vector to its target, applied
/// to the least-squares coefficients of the input in the source vectors.
struct LeastSquaresMap {
    src: Vec<Vec<C64>>,
    dst: Vec<Vec<C64>>,
    eigen: Eigen,
}

impl LeastSquaresMap {
    fn new(coords: &[Vec<C64>], pairs: &[(usize, usize)]) -> Result<Self> {
        let src: Vec<Vec<C64>> = pairs.iter().map(|p| coords[p.0].clone()).collect();
        let dst: Vec<Vec<C64>> = pairs.iter().map(|p| coords[p.1].clone()).collect();
        let g = HermitianMatrix::from_fn(src.len(), |a, b| dot(&src[b], &src[a]));
        Ok(LeastSquaresMap { eigen: g.eigen()?, src, dst })
    }

    fn apply(&self, v: &[C64]) -> Vec<C64> {
        let rhs: Vec<C64> = self.src.iter().map(|x| dot(v, x)).collect();
        let c = self.eigen.pinv_apply(&rhs);
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (ck, d) in c.iter().zip(&self.dst) {
            for (o, di) in out.iter_mut().zip(d) {
                *o += ck * di;
            }
        }
        out
    }
}

/// `Σ a_i conj(b_i)`.
fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// `‖S⁻¹T_{nq}φ_l − T_{nq}S⁻¹φ_l‖ / ‖φ_l‖`.
pub fn dual_commutation_check(fam: &GeneratorFamily, n: i64, idx: GenIndex) -> Result<f64> {
    let dual = CanonicalDual::new(fam)?;
    let g = fam.generator(idx).ok_or_else(|| FrameError::InvalidParams(format!("no generator {idx}")))?;
    let tau = n as f64 * fam.step(idx)?;
    let left = apply_multiplier_inverse(dual.operator(), &g.translated(tau));
    let right = dual.generator(idx).expect("generator exists").translated(tau);
    let diff = left.minus(&right);
    let num = diff.norm()?;
    Ok(num / g.norm_sqr().sqrt())
}

/// `⟨S f, f⟩` by quadrature.
pub fn multiplier_quadratic_form(op: &Arc<MultiplierOperator>, f: &PiecewiseSpectrum) -> Result<f64> {
    let sf = apply_multiplier_s(op, f);
    Ok(quadrature_inner_product(&sf, f, 0.0)?.re)
}

/// `Σ |⟨f, atom⟩|²` over a finite section.
pub fn section_energy(fam: &GeneratorFamily, f: &PiecewiseSpectrum, s: usize, t: usize) -> Result<f64> {
    Ok(section_atoms(fam, s, t)?.iter().map(|(_, a)| inner_product(f, a, 0.0).norm_sqr()).sum())
}

/// `‖f − g‖` for evaluable spectra by quadrature over the union of supports.
pub fn distance(f: &dyn Spectral, g: &dyn Spectral) -> Result<f64> {
    let support = match (f.support(), g.support()) {
        (Some(a), Some(b)) => (a.0.min(b.0), a.1.max(b.1)),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return Ok(0.0),
    };
    let mut bp = f.breakpoints();
    bp.extend(g.breakpoints());
    let integrand = |x: f64| C64::new((f.value_at(x) - g.value_at(x)).norm_sqr(), 0.0);
    let omega = f.oscillation() + g.oscillation();
    Ok(integrate(&integrand, support.0, support.1, &bp, omega, QUAD_TOL)?.re.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{FamilyRule, StepRule};
    use crate::spectrum::Segment;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn shannon() -> GeneratorFamily {
        let base = PiecewiseSpectrum::indicator(0.0, 1.0, 1.0).unwrap();
        GeneratorFamily::translates(FamilyRule::PeriodicTiling { bases: vec![base], period: 1.0 }, 1.0, 1.0).unwrap()
    }

    fn tiling() -> GeneratorFamily {
        let base = PiecewiseSpectrum::indicator(0.0, 0.5, 2.0).unwrap();
        GeneratorFamily::translates(FamilyRule::PeriodicTiling { bases: vec![base], period: 0.5 }, 2.0, 0.5).unwrap()
    }

    fn duplicated() -> GeneratorFamily {
        let dup = tiling().generator(GenIndex::new(0, 0)).unwrap();
        tiling().with_extra(vec![(GenIndex::new(0, 1), dup)]).unwrap()
    }

    fn gabor() -> GeneratorFamily {
        let w = |slope: f64| {
            PiecewiseSpectrum::new(
                vec![
                    Segment::new(0.0, 1.0, c(1.0), c(1.0)).unwrap(),
                    Segment::new(1.0, 2.0, c(0.0), c(slope)).unwrap(),
                ],
                0.0,
            )
            .unwrap()
        };
        GeneratorFamily::new(
            FamilyRule::Modulated { windows: vec![w(1.0), w(0.5)], steps: vec![1.0, 1.0] },
            StepRule::PerSlot(vec![0.5, 0.5]),
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn multiplier_examples() {
        let op = Arc::new(MultiplierOperator::new(&shannon()).unwrap());
        let f = PiecewiseSpectrum::indicator(0.2, 0.9, 1.0).unwrap();
        assert_eq!(apply_multiplier_s(&op, &f).eval(0.5), c(1.0));
        let op = Arc::new(MultiplierOperator::new(&tiling()).unwrap());
        assert_eq!(apply_multiplier_s(&op, &f).eval(0.5), c(2.0));
        let op = MultiplierOperator::new(&gabor()).unwrap();
        assert!((op.multiplier(0.5) - 14.625).abs() < 1e-12);
    }

    #[test]
    fn duals_of_tight_fixtures() {
        let d = CanonicalDual::new(&shannon()).unwrap();
        let g = d.generator(GenIndex::new(3, 0)).unwrap();
        assert_eq!(g.eval(3.5), c(1.0));
        let d = CanonicalDual::new(&tiling()).unwrap();
        let g = d.generator(GenIndex::new(-1, 0)).unwrap();
        assert_eq!(g.eval(-0.25), c(1.0));
    }

    #[test]
    fn gabor_dual_bounds_are_reciprocal() {
        let b = dual_frame_bounds(&gabor()).unwrap();
        assert!((b.predicted.lower - 1.0 / 26.0).abs() < 1e-12);
        assert!((b.predicted.upper - 2.0 / 13.0).abs() < 1e-12);
        assert!(b.max_deviation < 1e-6, "{b:?}");
    }

    #[test]
    fn gram_examples() {
        let g = gram_matrix(&shannon(), 2, 2).unwrap();
        for r in 0..g.dim() {
            for k in 0..g.dim() {
                let expected = if r == k { 1.0 } else { 0.0 };
                assert!((g.matrix.get(r, k) - c(expected)).norm() < 1e-12);
            }
        }
        let g = gram_matrix(&gabor(), 1, 1).unwrap();
        let r = g.row_of(AtomIndex { gen: GenIndex::new(0, 0), n: 0 }).unwrap();
        assert!((g.matrix.get(r, r) - c(14.0 / 3.0)).norm() < 1e-12);
        assert!(g.matrix.hermitian_defect() < 1e-12);
    }

    #[test]
    fn gram_rows_follow_generator_then_translation() {
        let g = gram_matrix(&gabor(), 1, 1).unwrap();
        let keys: Vec<(i64, usize, i64)> = g.index.iter().map(|a| (a.gen.l, a.gen.slot, a.n)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(keys[0], (-1, 0, -1));
    }

    #[test]
    fn shannon_coefficients_pick_out_the_atom() {
        let f = shannon().generator(GenIndex::new(0, 0)).unwrap();
        let c0 = finite_section_coefficients(&f, &shannon(), 2, 2).unwrap();
        for (a, v) in c0.index.iter().zip(&c0.values) {
            let expected = if a.n == 0 && a.gen.l == 0 { 1.0 } else { 0.0 };
            assert!((v - c(expected)).norm() < 1e-12, "{a:?}");
        }
        let far = PiecewiseSpectrum::indicator(10.0, 11.0, 1.0).unwrap();
        let c1 = finite_section_coefficients(&far, &shannon(), 2, 2).unwrap();
        assert!(c1.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn tiling_inverse_norm_is_constant() {
        let req = SweepRequest {
            sections: doubling_sections(4, 4),
            generators: vec![GenIndex::new(0, 0), GenIndex::new(1, 0)],
            ..Default::default()
        };
        let rep = section_inverse_norm_sweep(&tiling(), &req).unwrap();
        for r in &rep.rows {
            assert!((r.norm_inv - 0.5f64.sqrt()).abs() < 1e-12);
        }
        assert!(rep.summary.iter().all(|s| s.bounded));
    }

    #[test]
    fn non_monotone_sweep_is_rejected() {
        let req = SweepRequest { sections: vec![(2, 2), (1, 1)], generators: vec![], ..Default::default() };
        assert!(matches!(section_inverse_norm_sweep(&shannon(), &req), Err(FrameError::NonMonotoneSweep(_))));
    }

    #[test]
    fn doubling_sweep_shape() {
        assert_eq!(doubling_sections(16, 16), vec![(1, 1), (2, 2), (4, 4), (8, 8), (16, 16)]);
        assert_eq!(doubling_sections(3, 1), vec![(1, 1), (2, 1), (3, 1)]);
    }

    #[test]
    fn duplicated_fixture_is_redundant() {
        let dev = biorthogonality_check(&duplicated(), 1, 1).unwrap();
        assert!((dev - 0.5).abs() < 1e-9, "{dev}");
        let ind = independence_test(&duplicated(), 2, 1).unwrap();
        assert_eq!(ind.deficiency, 5);
        assert!(matches!(shift_operator_check(&duplicated(), 2, 1), Err(FrameError::IllPosedOperator(_))));
    }

    #[test]
    fn orthogonal_fixtures_are_riesz() {
        for fam in [shannon(), tiling()] {
            assert!(biorthogonality_check(&fam, 2, 2).unwrap() < 1e-9);
            assert!(independence_test(&fam, 2, 2).unwrap().is_independent);
            assert!(shift_operator_check(&fam, 2, 2).unwrap() < 1e-8);
        }
    }

    #[test]
    fn commutation_residuals() {
        assert_eq!(dual_commutation_check(&shannon(), 4, GenIndex::new(1, 0)).unwrap(), 0.0);
        assert!(dual_commutation_check(&tiling(), 3, GenIndex::new(-2, 0)).unwrap() < 1e-8);
        assert!(dual_commutation_check(&gabor(), 1, GenIndex::new(0, 0)).unwrap() < 1e-8);
    }

    #[test]
    fn dual_of_dual_recovers_generator() {
        let d = CanonicalDual::new(&gabor()).unwrap();
        let idx = GenIndex::new(1, 1);
        let dd = d.dual_of_dual(idx).unwrap();
        let g = gabor().generator(idx).unwrap();
        for k in 0..50 {
            let x = 0.9 + 2.2 * k as f64 / 50.0;
            assert!((dd.eval(x) - g.eval(x)).norm() < 1e-10, "{x}");
        }
    }
}
