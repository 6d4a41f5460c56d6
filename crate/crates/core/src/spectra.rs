//! Symmetric eigenvalues and the spectral lower bound for bridged graphs.
//!
//! For `C = bridge(G_A, G_B, pairs)` with `R = 0`, the least positive
//! eigenvalue satisfies `λ₁⁺(C) ≥ 1/λ*`, where `λ*` maximizes
//! `α‖x − Dy‖² + β‖y‖²` on the unit sphere with `D = H B⁻¹`,
//! `α = 1/λ₁⁺(G_A)` and `β = 1/λ₁⁺(G_B)`.

use serde::Serialize;
use thiserror::Error;

use crate::bridge::{self, BridgeError, BridgeSpec};
use crate::exact::{self, ExactError, RatMatrix};
use crate::graphs::Graph;

/// Eigenvalues at or below this are not counted as positive.
pub const POSITIVITY_THRESHOLD: f64 = 1e-9;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("Jacobi iteration did not converge in {0} sweeps")]
    NoConvergence(usize),
    #[error("no eigenvalue exceeds the positivity threshold")]
    NoPositiveEigenvalue,
    #[error("alpha and beta must be positive (got {alpha}, {beta})")]
    NonPositiveCoefficients { alpha: f64, beta: f64 },
    #[error("right graph is not arbitrarily bridgeable over the chosen vertices (R != 0)")]
    NotArbitrarilyBridgeable,
    #[error("adjacency matrix is singular")]
    Singular,
    #[error(transparent)]
    Bridge(#[from] BridgeError),
    #[error(transparent)]
    Exact(ExactError),
}

impl From<ExactError> for SpectraError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::Singular => SpectraError::Singular,
            other => SpectraError::Exact(other),
        }
    }
}

pub type Result<T, E = SpectraError> = std::result::Result<T, E>;

/// Dense row-major real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(SpectraError::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(RealMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(SpectraError::DimensionMismatch("ragged rows".into()));
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn from_rational(m: &RatMatrix) -> Self {
        RealMatrix {
            rows: m.rows(),
            cols: m.cols(),
            data: m.to_f64(),
        }
    }

    pub fn adjacency(g: &Graph) -> Self {
        RealMatrix {
            rows: g.n(),
            cols: g.n(),
            data: g.adjacency_f64(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn multiply(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(SpectraError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub tol: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }

    pub fn min_positive(&self) -> Option<f64> {
        self.eigenvalues.iter().copied().find(|&x| x > POSITIVITY_THRESHOLD)
    }

    /// Eigenvalues rounded to `decimals` places, with `-0.0` folded to `0.0`.
    pub fn rounded(&self, decimals: u32) -> Vec<f64> {
        self.eigenvalues.iter().map(|&x| round_to(x, decimals)).collect()
    }
}

pub fn round_to(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    let r = (x * scale).round() / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Eigenvalues with eigenvectors as columns of `vectors`, unsorted.
pub(crate) struct Eigen {
    pub values: Vec<f64>,
    // read by the residual tests only
    #[cfg_attr(not(test), allow(dead_code))]
    pub vectors: RealMatrix,
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is below
/// `tol · ‖M‖_F`.
pub(crate) fn jacobi(m: &RealMatrix, tol: f64) -> Result<Eigen> {
    let n = m.rows;
    if m.cols != n {
        return Err(SpectraError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let norm = m.frobenius_norm();
    for i in 0..n {
        for j in i + 1..n {
            if (m.get(i, j) - m.get(j, i)).abs() > tol.max(f64::EPSILON) * norm.max(1.0) {
                return Err(SpectraError::NotSymmetric);
            }
        }
    }
    let mut a = m.clone();
    let mut v = RealMatrix::identity(n);
    let target = tol * norm;
    let off = |a: &RealMatrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a.get(i, j) * a.get(i, j);
                }
            }
        }
        s.sqrt()
    };
    let mut converged = off(&a) <= target;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(SpectraError::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
        converged = off(&a) <= target;
    }
    Ok(Eigen {
        values: (0..n).map(|i| a.get(i, i)).collect(),
        vectors: v,
    })
}

pub fn eigenvalues_symmetric(m: &RealMatrix, tol: f64) -> Result<Spectrum> {
    let mut eigenvalues = jacobi(m, tol)?.values;
    eigenvalues.sort_by(f64::total_cmp);
    Ok(Spectrum { eigenvalues, tol })
}

/// Adjacency spectrum of a graph.
pub fn spectrum(g: &Graph) -> Result<Spectrum> {
    eigenvalues_symmetric(&RealMatrix::adjacency(g), DEFAULT_TOL)
}

/// Least positive adjacency eigenvalue `λ₁⁺`.
pub fn lambda_min_pos(g: &Graph) -> Result<f64> {
    spectrum(g)?.min_positive().ok_or(SpectraError::NoPositiveEigenvalue)
}

/// `λ*` from `μ* = max σ(DᵀD)`.
pub fn lambda_star_closed_form(mu_star: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(SpectraError::NonPositiveCoefficients { alpha, beta });
    }
    let s = alpha * mu_star + alpha + beta;
    // s² - 4αβ ≥ (α - β)² for μ* ≥ 0; clamp float noise
    Ok((s + (s * s - 4.0 * alpha * beta).max(0.0).sqrt()) / 2.0)
}

/// Largest eigenvalue of `DᵀD`, clamped at zero.
pub fn mu_star(d: &RealMatrix) -> Result<f64> {
    if d.cols == 0 {
        return Ok(0.0);
    }
    let gram = d.transpose().multiply(d)?;
    let s = eigenvalues_symmetric(&gram, DEFAULT_TOL)?;
    Ok(s.max().unwrap_or(0.0).max(0.0))
}

/// Maximum of `α‖x − Dy‖² + β‖y‖²` over `‖x‖² + ‖y‖² = 1`.
pub fn lambda_star(d: &RealMatrix, alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(SpectraError::NonPositiveCoefficients { alpha, beta });
    }
    lambda_star_closed_form(mu_star(d)?, alpha, beta)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundInputs {
    pub alpha: f64,
    pub beta: f64,
    pub mu_star: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub inputs: BoundInputs,
    pub lambda_star: f64,
    pub lambda_lb: f64,
}

/// `α`, `β` and `μ*` for a bridging whose right block `R` vanishes.
/// Integrality of the inverses is not required.
pub fn bound_inputs(ga: &Graph, gb: &Graph, spec: &BridgeSpec) -> Result<BoundInputs> {
    spec.validate(ga.n(), gb.n())?;
    exact::inverse_exact(&ga.adjacency())?;
    let binv = exact::inverse_exact(&gb.adjacency())?.matrix;
    if !bridge::zero_block_subsets(&binv, spec.k()).contains(&sorted(spec.right())) {
        return Err(SpectraError::NotArbitrarilyBridgeable);
    }
    let h = spec.coupling(ga.n(), gb.n()).to_rational();
    let d = RealMatrix::from_rational(&h.multiply(&binv)?);
    Ok(BoundInputs {
        alpha: 1.0 / lambda_min_pos(ga)?,
        beta: 1.0 / lambda_min_pos(gb)?,
        mu_star: mu_star(&d)?,
    })
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

pub fn bound_report(ga: &Graph, gb: &Graph, spec: &BridgeSpec) -> Result<BoundReport> {
    let inputs = bound_inputs(ga, gb, spec)?;
    let lambda_star = lambda_star_closed_form(inputs.mu_star, inputs.alpha, inputs.beta)?;
    Ok(BoundReport {
        inputs,
        lambda_star,
        lambda_lb: 1.0 / lambda_star,
    })
}

/// Lower bound on `λ₁⁺` of the bridged graph.
pub fn lower_bound_bridged(ga: &Graph, gb: &Graph, spec: &BridgeSpec) -> Result<f64> {
    Ok(bound_report(ga, gb, spec)?.lambda_lb)
}
