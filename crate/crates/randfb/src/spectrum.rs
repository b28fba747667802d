//! Quadratic-form view of circular convolution energy.
//!
//! The energy of `x * w` is `w' G w` where `G` is the Gram matrix of the
//! first T circular shifts of `x`. This module builds that matrix and the
//! spectral statistics (top eigenvalue, sum of squared eigenvalues, trace)
//! that the deviation certificates consume.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::signals::Signal;

/// Gram matrix of the first T circular shifts of a signal.
///
/// Symmetric positive semidefinite Toeplitz, with entry (i, j) equal to
/// the circular autocorrelation at lag |i - j| and every diagonal entry
/// equal to the signal energy.
#[derive(Debug, Clone)]
pub struct ShiftGram {
    dim: usize,
    entries: Vec<f64>, // row-major dim x dim
    source_energy: f64,
}

impl ShiftGram {
    pub fn new(x: &Signal, filter_len: usize) -> Result<Self> {
        let n = x.len();
        if filter_len == 0 {
            return Err(Error::EmptyFilter);
        }
        if filter_len > n {
            return Err(Error::FilterTooLong {
                filter_len,
                ambient: n,
            });
        }
        // (j - i) mod N for |j - i| < T <= N reduces to R(|j - i|) because
        // circular autocorrelation of a real signal satisfies R(N-t) = R(t).
        let r = x.autocorrelation(filter_len)?;
        let rv = r.values();
        let mut entries = vec![0.0; filter_len * filter_len];
        for i in 0..filter_len {
            for j in 0..filter_len {
                entries[i * filter_len + j] = rv[i.abs_diff(j)];
            }
        }
        Ok(Self {
            dim: filter_len,
            entries,
            source_energy: rv[0],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Energy of the source signal (the constant diagonal value).
    pub fn source_energy(&self) -> f64 {
        self.source_energy
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    /// Squared Frobenius norm; equals the sum of squared eigenvalues for
    /// a symmetric matrix.
    pub fn frobenius_sq(&self) -> f64 {
        self.entries.iter().map(|e| e * e).sum()
    }

    pub fn matvec(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }
}

/// Energy of `x * w` as the quadratic form of the shift Gram, evaluated
/// directly from the autocorrelation in O(T^2) without materializing the
/// matrix. Must agree with the convolution energy.
pub fn quadratic_energy(x: &Signal, w: &[f64]) -> Result<f64> {
    let t = w.len();
    if t == 0 {
        return Err(Error::EmptyFilter);
    }
    if t > x.len() {
        return Err(Error::FilterTooLong {
            filter_len: t,
            ambient: x.len(),
        });
    }
    let r = x.autocorrelation(t)?;
    let rv = r.values();
    let mut total = rv[0] * w.iter().map(|wi| wi * wi).sum::<f64>();
    for d in 1..t {
        let cross: f64 = (0..t - d).map(|i| w[i] * w[i + d]).sum();
        total += 2.0 * rv[d] * cross;
    }
    Ok(total)
}

/// Spectral summary of a shift Gram: largest eigenvalue, sum of squared
/// eigenvalues, and trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralStats {
    pub lambda_inf: f64,
    pub lambda_2_sq: f64,
    pub trace: f64,
}

/// Default relative tolerance for the power-iteration stop rule.
pub const POWER_ITER_TOL: f64 = 1e-10;

/// Default iteration cap for a matrix of the given dimension.
pub fn default_max_iter(dim: usize) -> usize {
    10 * dim + 1000
}

/// Spectral statistics with default power-iteration settings.
pub fn spectral_stats_default(gram: &ShiftGram) -> Result<SpectralStats> {
    spectral_stats(gram, POWER_ITER_TOL, default_max_iter(gram.dim()))
}

/// Trace and Frobenius norm are read off the matrix; the top eigenvalue
/// comes from power iteration (valid because the Gram is positive
/// semidefinite).
///
/// Two deterministic starts are used: the normalized all-ones vector, and
/// the same vector perturbed by the first basis vector. For circulant
/// grams the all-ones vector is itself an eigenvector (possibly a
/// non-maximal one, possibly in the kernel), so the perturbed run is
/// always taken and the larger Rayleigh quotient wins.
///
/// Non-convergence is reported, not silently accepted: the error carries
/// the last iterate, which is a lower bound on the true top eigenvalue.
pub fn spectral_stats(gram: &ShiftGram, tol: f64, max_iter: usize) -> Result<SpectralStats> {
    if gram.source_energy() <= 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    if max_iter == 0 {
        return Err(Error::InvalidParameter(
            "power iteration needs max_iter >= 1".into(),
        ));
    }
    let dim = gram.dim();
    let ones = vec![1.0; dim];
    let mut perturbed = vec![1.0; dim];
    perturbed[0] += (dim as f64).sqrt();

    let (rho_a, ok_a) = power_iteration(gram, ones, tol, max_iter);
    let (rho_b, ok_b) = power_iteration(gram, perturbed, tol, max_iter);

    let lambda_inf = rho_a.max(rho_b);
    let margin = lambda_inf * (1.0 - 16.0 * tol);
    let converged_at_top = (ok_a && rho_a >= margin) || (ok_b && rho_b >= margin);
    if !converged_at_top {
        return Err(Error::NoConvergence {
            estimate: lambda_inf,
            iterations: max_iter,
        });
    }
    Ok(SpectralStats {
        lambda_inf,
        lambda_2_sq: gram.frobenius_sq(),
        trace: gram.trace(),
    })
}

/// Returns (Rayleigh quotient, converged flag).
fn power_iteration(gram: &ShiftGram, mut v: Vec<f64>, tol: f64, max_iter: usize) -> (f64, bool) {
    let dim = gram.dim();
    let norm = |u: &[f64]| u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = 1.0 / norm(&v);
    for x in &mut v {
        *x *= scale;
    }
    let mut w = vec![0.0; dim];
    // below this, the iterate is numerically in the kernel and 0 is its limit
    let kernel_floor = gram.trace() * f64::EPSILON * dim as f64 * 16.0;

    let mut rho_prev = f64::NAN;
    let mut hits = 0;
    for _ in 0..max_iter {
        gram.matvec(&v, &mut w);
        let rho: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let wn = norm(&w);
        if wn <= kernel_floor {
            return (0.0, true);
        }
        if !rho_prev.is_nan() && (rho - rho_prev).abs() <= tol * rho.abs().max(f64::MIN_POSITIVE) {
            hits += 1;
            if hits >= 2 {
                return (rho, true);
            }
        } else {
            hits = 0;
        }
        rho_prev = rho;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
    }
    (rho_prev, false)
}
