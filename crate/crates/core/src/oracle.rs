//! Brute-force cross-checks: midpoint sampling, adaptive Gauss–Legendre
//! inner products, and extreme eigenvalues of a discretized frame operator.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::family::{analysis_window, GeneratorFamily};
use crate::linalg::HermitianMatrix;
use crate::spectrum::{dedup_points, PiecewiseSpectrum, Segment, Spectral, C64};

/// Absolute tolerance of [`quadrature_inner_product`].
pub const QUAD_TOL: f64 = 1e-10;
const GL_ORDER: usize = 16;
const MAX_DEPTH: u32 = 40;

/// Uniform grid on `(lo, hi]` with `n` cells; samples sit at cell midpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(FrameError::InvalidParams(format!("bad grid ({lo}, {hi}] with {n} cells")));
        }
        Ok(Grid { lo, hi, n })
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }
}

pub fn sample_spectrum(spec: &dyn Spectral, grid: &Grid) -> Vec<C64> {
    (0..grid.n).map(|i| spec.value_at(grid.point(i))).collect()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn gl_panel(f: &dyn Fn(f64) -> C64, a: f64, b: f64) -> C64 {
    let (nodes, weights) = gauss_legendre();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = C64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

fn adaptive(f: &dyn Fn(f64) -> C64, a: f64, b: f64, whole: C64, tol: f64, depth: u32) -> Result<C64> {
    let m = 0.5 * (a + b);
    let (left, right) = (gl_panel(f, a, m), gl_panel(f, m, b));
    let refined = left + right;
    if (refined - whole).norm() <= tol {
        return Ok(refined);
    }
    if depth >= MAX_DEPTH {
        return Err(FrameError::QuadratureFailure { lo: a, hi: b });
    }
    Ok(adaptive(f, a, m, left, 0.5 * tol, depth + 1)? + adaptive(f, m, b, right, 0.5 * tol, depth + 1)?)
}

/// Adaptive quadrature of `f` over `(lo, hi]` with panels split at the
/// given breakpoints. Panels are kept shorter than one period of `e^{2πiωγ}`.
pub fn integrate(f: &dyn Fn(f64) -> C64, lo: f64, hi: f64, breaks: &[f64], omega: f64, tol: f64) -> Result<C64> {
    if !(hi > lo) {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|x| *x > lo && *x < hi).collect();
    pts.extend([lo, hi]);
    dedup_points(&mut pts);
    let total = hi - lo;
    let mut acc = C64::new(0.0, 0.0);
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pieces = ((b - a) * omega.abs()).ceil().max(1.0) as usize;
        let step = (b - a) / pieces as f64;
        for k in 0..pieces {
            let (x, y) = (a + k as f64 * step, if k + 1 == pieces { b } else { a + (k + 1) as f64 * step });
            let panel_tol = tol * (y - x) / total;
            acc += adaptive(f, x, y, gl_panel(f, x, y), panel_tol, 0)?;
        }
    }
    Ok(acc)
}

/// `∫ f(γ)·conj(g(γ))·e^{2πiδγ} dγ` by adaptive panel quadrature.
pub fn quadrature_inner_product(f: &dyn Spectral, g: &dyn Spectral, delta: f64) -> Result<C64> {
    let (Some((fa, fb)), Some((ga, gb))) = (f.support(), g.support()) else {
        return Ok(C64::new(0.0, 0.0));
    };
    let (lo, hi) = (fa.max(ga), fb.min(gb));
    let mut breaks = f.breakpoints();
    breaks.extend(g.breakpoints());
    let integrand = |x: f64| {
        let v = f.value_at(x) * g.value_at(x).conj();
        if delta == 0.0 {
            v
        } else {
            v * C64::from_polar(1.0, 2.0 * PI * delta * x)
        }
    };
    let omega = delta.abs() + f.oscillation() + g.oscillation();
    integrate(&integrand, lo, hi, &breaks, omega, QUAD_TOL)
}

/// Result of the discretized frame-operator computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleBounds {
    pub min_eig: f64,
    pub max_eig: f64,
    pub grid: Grid,
    /// Size of the largest coupled block of grid samples.
    pub max_block: usize,
}

/// Extreme eigenvalues of the frame operator restricted to the samples of
/// `grid`. Translations of each generator are summed over one full period
/// of the grid exponentials, which makes the `n`-sum exact on the grid;
/// `(1/q)/h` must therefore be an integer for every step `q`.
pub fn discretized_frame_bounds(fam: &GeneratorFamily, grid: &Grid) -> Result<OracleBounds> {
    check_coverage(fam, grid)?;
    let h = grid.spacing();
    let gens = fam.materialize(grid.lo, grid.hi)?;
    let mut entries: BTreeMap<(usize, usize), C64> = BTreeMap::new();
    let mut parent: Vec<usize> = (0..grid.n).collect();
    for (idx, g) in &gens {
        let q = fam.step(*idx)?;
        let ratio = 1.0 / (q * h);
        let period = ratio.round();
        if period < 1.0 || (ratio - period).abs() > 1e-9 * ratio.max(1.0) {
            return Err(FrameError::GridIncompatible(format!(
                "period 1/q = {} is not a multiple of the grid spacing {h}",
                1.0 / q
            )));
        }
        let period = period as usize;
        let weight = 1.0 / q;
        let mut by_residue: BTreeMap<usize, Vec<(usize, C64)>> = BTreeMap::new();
        for i in 0..grid.n {
            let v = g.eval(grid.point(i));
            if v.norm_sqr() > 0.0 {
                by_residue.entry(i % period).or_default().push((i, v));
            }
        }
        for members in by_residue.values() {
            for &(i, vi) in members {
                for &(k, vk) in members {
                    *entries.entry((i, k)).or_insert(C64::new(0.0, 0.0)) += vi * vk.conj() * weight;
                    union(&mut parent, i, k);
                }
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..grid.n {
        let root = find(&mut parent, i);
        blocks.entry(root).or_default().push(i);
    }
    let (mut lo, mut hi, mut max_block) = (f64::INFINITY, f64::NEG_INFINITY, 0);
    for members in blocks.values() {
        max_block = max_block.max(members.len());
        let m = HermitianMatrix::from_fn(members.len(), |r, c| {
            entries.get(&(members[r], members[c])).copied().unwrap_or(C64::new(0.0, 0.0))
        });
        for v in m.eigenvalues()? {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Ok(OracleBounds { min_eig: lo, max_eig: hi, grid: *grid, max_block })
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// The grid must contain a full period of the density, or the hull of all
/// supports for aperiodic families.
fn check_coverage(fam: &GeneratorFamily, grid: &Grid) -> Result<()> {
    let (lo, hi) = match analysis_window(fam) {
        Ok((a, b)) if fam.extra().is_empty() => (grid.lo, grid.lo + (b - a)),
        Ok(w) => w,
        Err(FrameError::NotAFrame { witness_lo, .. }) => {
            let sup: Vec<(f64, f64)> =
                fam.materialize(grid.lo - 1e6, grid.hi + 1e6)?.iter().filter_map(|(_, g)| g.support()).collect();
            let a = sup.iter().map(|s| s.0).fold(witness_lo, f64::min);
            (a, witness_lo)
        }
        Err(e) => return Err(e),
    };
    let tol = 1e-12 * (hi - lo).abs().max(1.0);
    if lo < grid.lo - tol {
        return Err(FrameError::Coverage { lo, hi: grid.lo });
    }
    if hi > grid.hi + tol {
        return Err(FrameError::Coverage { lo: grid.hi, hi });
    }
    Ok(())
}

/// `count` continuous piecewise-linear spectra on `(lo, hi]` vanishing at
/// both ends, with `pieces` segments and complex knot values in the unit
/// square. Deterministic in `seed`.
pub fn random_band_limited(seed: u64, count: usize, lo: f64, hi: f64, pieces: usize) -> Result<Vec<PiecewiseSpectrum>> {
    if !(hi > lo) || pieces == 0 {
        return Err(FrameError::InvalidParams(format!("bad band ({lo}, {hi}] with {pieces} pieces")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = (hi - lo) / pieces as f64;
    (0..count)
        .map(|_| {
            let mut knots = vec![C64::new(0.0, 0.0)];
            for _ in 1..pieces {
                knots.push(C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
            knots.push(C64::new(0.0, 0.0));
            let segs = (0..pieces)
                .map(|k| {
                    let x0 = lo + k as f64 * h;
                    let x1 = if k + 1 == pieces { hi } else { x0 + h };
                    let slope = (knots[k + 1] - knots[k]) / (x1 - x0);
                    Segment::new(x0, x1, knots[k] - slope * x0, slope)
                })
                .collect::<Result<Vec<_>>>()?;
            PiecewiseSpectrum::new(segs, 0.0)
        })
        .collect()
}
