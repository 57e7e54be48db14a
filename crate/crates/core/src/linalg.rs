//! Thin wrapper over faer for the Hermitian eigenproblems used by the
//! finite-section and oracle routines.

use faer::{c64, Mat, Side};

use crate::error::{FrameError, Result};
use crate::spectrum::C64;

/// Relative eigenvalue cutoff for pseudo-inverses and rank decisions.
pub const PINV_CUTOFF: f64 = 1e-12;

/// Dense Hermitian matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    pub dim: usize,
    pub data: Vec<C64>,
}

impl HermitianMatrix {
    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        HermitianMatrix { dim, data }
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
    }

    /// Largest `|A − A*|` entry.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    fn to_faer(&self) -> Mat<c64> {
        Mat::from_fn(self.dim, self.dim, |r, c| {
            let v = self.get(r, c);
            c64::new(v.re, v.im)
        })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if self.dim == 0 {
            return Ok(Vec::new());
        }
        let vals =
            self.to_faer().self_adjoint_eigenvalues(Side::Lower).map_err(|e| FrameError::Linalg(format!("{e:?}")))?;
        Ok(vals)
    }

    pub fn eigen(&self) -> Result<Eigen> {
        if self.dim == 0 {
            return Ok(Eigen { values: Vec::new(), vectors: Vec::new(), dim: 0 });
        }
        let e = self.to_faer().self_adjoint_eigen(Side::Lower).map_err(|e| FrameError::Linalg(format!("{e:?}")))?;
        let s = e.S().column_vector();
        let u = e.U();
        let values = (0..self.dim).map(|k| s[k].re).collect();
        let mut vectors = Vec::with_capacity(self.dim * self.dim);
        for k in 0..self.dim {
            for r in 0..self.dim {
                let v = u[(r, k)];
                vectors.push(C64::new(v.re, v.im));
            }
        }
        Ok(Eigen { values, vectors, dim: self.dim })
    }
}

/// Eigendecomposition `A = U diag(values) U*`; eigenvalues ascending,
/// eigenvectors stored column by column.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    vectors: Vec<C64>,
    dim: usize,
}

impl Eigen {
    /// Entry `r` of eigenvector `k`.
    pub fn vector(&self, k: usize) -> &[C64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Absolute cutoff below which eigenvalues are treated as zero.
    pub fn cutoff(&self) -> f64 {
        PINV_CUTOFF * self.max_value()
    }

    /// Indices of eigenvalues above the cutoff.
    pub fn kept(&self) -> Vec<usize> {
        let cut = self.cutoff();
        (0..self.values.len()).filter(|&k| self.values[k] > cut).collect()
    }

    pub fn rank(&self) -> usize {
        self.kept().len()
    }

    /// Ratio of the largest to the smallest retained eigenvalue.
    pub fn condition(&self) -> f64 {
        let kept = self.kept();
        match kept.first() {
            Some(&k) => self.max_value() / self.values[k],
            None => f64::INFINITY,
        }
    }

    /// `A⁺ b` with the relative cutoff.
    pub fn pinv_apply(&self, b: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for k in self.kept() {
            let u = self.vector(k);
            let proj: C64 = u.iter().zip(b).map(|(ui, bi)| ui.conj() * bi).sum();
            let w = proj / self.values[k];
            for (o, ui) in out.iter_mut().zip(u) {
                *o += ui * w;
            }
        }
        out
    }

    /// Diagonal entry `(A⁺)_{jj}`.
    pub fn pinv_diag(&self, j: usize) -> f64 {
        self.kept().into_iter().map(|k| self.vector(k)[j].norm_sqr() / self.values[k]).sum()
    }
}
