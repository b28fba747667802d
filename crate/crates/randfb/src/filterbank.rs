//! Random Gaussian filterbanks: sampling, circular convolution, response
//! energy, and exact optimal frame bounds.
//!
//! A filterbank applies J length-T filters to a length-N signal by
//! circular convolution. Because each subband operator is circulant, the
//! Gram of the whole bank is circulant too and its eigenvalues are the
//! power response `s[k] = sum_j |w_j_hat[k]|^2` over DFT bins; the minimum
//! and maximum of `s` are the optimal frame bounds.

use std::sync::Arc;

use rand::Rng as _;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{domain, substream};
use crate::signals::Signal;

/// A bank of J real filters of common length T with the weight variance
/// they were drawn at.
#[derive(Debug, Clone, PartialEq)]
pub struct Filterbank {
    filters: Vec<Vec<f64>>,
    sigma_sq: f64,
    seed: Option<u64>,
}

impl Filterbank {
    /// Draws J * T i.i.d. N(0, sigma_sq) weights. Filter j reads its own
    /// substream of (seed, j), so its weights do not depend on J.
    pub fn sample(num_filters: usize, filter_len: usize, sigma_sq: f64, seed: u64) -> Result<Self> {
        if num_filters == 0 {
            return Err(Error::InvalidParameter(
                "filter count must be at least 1".into(),
            ));
        }
        if filter_len == 0 {
            return Err(Error::EmptyFilter);
        }
        if !(sigma_sq > 0.0) || !sigma_sq.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "weight variance must be positive and finite, got {sigma_sq}"
            )));
        }
        let sigma = sigma_sq.sqrt();
        let filters = (0..num_filters)
            .map(|j| {
                let mut rng = substream(seed, &[domain::FILTER, j as u64]);
                (0..filter_len)
                    .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect();
        Ok(Self {
            filters,
            sigma_sq,
            seed: Some(seed),
        })
    }

    /// Builds a bank from explicit filters (deterministic injection for
    /// tests and worked examples).
    pub fn from_filters(filters: Vec<Vec<f64>>, sigma_sq: f64) -> Result<Self> {
        if filters.is_empty() {
            return Err(Error::InvalidParameter(
                "filter count must be at least 1".into(),
            ));
        }
        let len = filters[0].len();
        if len == 0 {
            return Err(Error::EmptyFilter);
        }
        if filters.iter().any(|f| f.len() != len) {
            return Err(Error::InvalidParameter(
                "all filters must share one length".into(),
            ));
        }
        if filters.iter().flatten().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter(
                "filter weights must be finite".into(),
            ));
        }
        if !(sigma_sq > 0.0) || !sigma_sq.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "weight variance must be positive and finite, got {sigma_sq}"
            )));
        }
        Ok(Self {
            filters,
            sigma_sq,
            seed: None,
        })
    }

    pub fn num_filters(&self) -> usize {
        self.filters.len()
    }

    pub fn filter_len(&self) -> usize {
        self.filters[0].len()
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    /// Seed the bank was sampled from; `None` for injected filters.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn filters(&self) -> &[Vec<f64>] {
        &self.filters
    }
}

/// The weight variance (J T)^-1 under which the bank preserves the energy
/// of any input on average.
pub fn normalized_sigma_sq(num_filters: usize, filter_len: usize) -> f64 {
    1.0 / (num_filters as f64 * filter_len as f64)
}

/// Circular convolution `y[n] = sum_k w[k] x[(n - k) mod N]`, length N.
pub fn circular_convolve(x: &Signal, w: &[f64]) -> Result<Signal> {
    let n = x.len();
    let t = w.len();
    if t == 0 {
        return Err(Error::EmptyFilter);
    }
    if t > n {
        return Err(Error::FilterTooLong {
            filter_len: t,
            ambient: n,
        });
    }
    let xs = x.samples();
    let y = (0..n)
        .map(|i| (0..t).map(|k| w[k] * xs[(i + n - k) % n]).sum())
        .collect();
    Signal::new(y)
}

/// Total response energy `sum_j ||x * w_j||^2` by direct convolution.
pub fn response_energy(fb: &Filterbank, x: &Signal) -> Result<f64> {
    let mut total = 0.0;
    for w in fb.filters() {
        total += circular_convolve(x, w)?.energy();
    }
    Ok(total)
}

/// Optimal frame bounds of one filterbank realization on R^n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameBounds {
    /// Optimal lower bound A.
    pub lower: f64,
    /// Optimal upper bound B.
    pub upper: f64,
    /// Dimension n the bounds refer to.
    pub ambient_dim: usize,
    /// Whether the lower bound vanished (no positive frame bound exists).
    pub singular: bool,
}

impl FrameBounds {
    /// Condition number B/A; infinite for singular frames.
    pub fn condition_number(&self) -> f64 {
        if self.singular {
            f64::INFINITY
        } else {
            self.upper / self.lower
        }
    }
}

/// Relative threshold below which the lower bound counts as zero.
pub const SINGULAR_REL_TOL: f64 = 1e-14;

/// Frame-bound evaluator with a cached FFT plan for one ambient dimension.
pub struct FrameAnalyzer {
    ambient_dim: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl FrameAnalyzer {
    pub fn new(ambient_dim: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(ambient_dim);
        Self { ambient_dim, fft }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Power response `s[k] = sum_j |w_j_hat[k]|^2` at the n DFT bins
    /// (filters zero-padded to n, forward DFT unnormalized).
    pub fn symbol(&self, fb: &Filterbank) -> Result<Vec<f64>> {
        let n = self.ambient_dim;
        if n == 0 {
            return Err(Error::InvalidParameter(
                "ambient dimension must be at least 1".into(),
            ));
        }
        if fb.filter_len() > n {
            return Err(Error::FilterTooLong {
                filter_len: fb.filter_len(),
                ambient: n,
            });
        }
        let mut sym = vec![0.0; n];
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        for w in fb.filters() {
            buf.iter_mut().for_each(|c| *c = Complex::new(0.0, 0.0));
            for (slot, &wk) in buf.iter_mut().zip(w) {
                slot.re = wk;
            }
            self.fft.process(&mut buf);
            for (s, c) in sym.iter_mut().zip(&buf) {
                *s += c.norm_sqr();
            }
        }
        Ok(sym)
    }

    /// Extremes of the power response: the optimal frame bounds.
    pub fn bounds(&self, fb: &Filterbank) -> Result<FrameBounds> {
        let sym = self.symbol(fb)?;
        let lower = sym.iter().copied().fold(f64::INFINITY, f64::min);
        let upper = sym.iter().copied().fold(0.0, f64::max);
        Ok(FrameBounds {
            lower,
            upper,
            ambient_dim: self.ambient_dim,
            singular: lower <= SINGULAR_REL_TOL * upper,
        })
    }
}

/// One-shot frame bounds; use [`FrameAnalyzer`] in loops to reuse the plan.
pub fn frame_bounds(fb: &Filterbank, ambient_dim: usize) -> Result<FrameBounds> {
    FrameAnalyzer::new(ambient_dim).bounds(fb)
}

/// Repeated response-energy evaluation against one fixed signal.
///
/// Precomputes the signal's power spectrum; each call then costs J FFTs
/// instead of J full convolutions (Parseval route). Agrees with
/// [`response_energy`] to floating-point accuracy.
pub struct EnergyEstimator {
    power: Vec<f64>, // |x_hat[k]|^2 / n
    fft: Arc<dyn Fft<f64>>,
    signal_energy: f64,
}

impl EnergyEstimator {
    pub fn new(x: &Signal) -> Self {
        let n = x.len();
        let fft = FftPlanner::new().plan_fft_forward(n);
        let mut buf: Vec<Complex<f64>> =
            x.samples().iter().map(|&s| Complex::new(s, 0.0)).collect();
        fft.process(&mut buf);
        let power = buf.iter().map(|c| c.norm_sqr() / n as f64).collect();
        Self {
            power,
            fft,
            signal_energy: x.energy(),
        }
    }

    pub fn signal_len(&self) -> usize {
        self.power.len()
    }

    pub fn signal_energy(&self) -> f64 {
        self.signal_energy
    }

    /// `sum_j ||x * w_j||^2` via the DFT product.
    pub fn response_energy(&self, fb: &Filterbank) -> Result<f64> {
        let n = self.power.len();
        if fb.filter_len() > n {
            return Err(Error::FilterTooLong {
                filter_len: fb.filter_len(),
                ambient: n,
            });
        }
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        let mut total = 0.0;
        for w in fb.filters() {
            buf.iter_mut().for_each(|c| *c = Complex::new(0.0, 0.0));
            for (slot, &wk) in buf.iter_mut().zip(w) {
                slot.re = wk;
            }
            self.fft.process(&mut buf);
            total += buf
                .iter()
                .zip(&self.power)
                .map(|(c, p)| c.norm_sqr() * p)
                .sum::<f64>();
        }
        Ok(total)
    }
}
