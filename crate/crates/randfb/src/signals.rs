//! Test-signal generation, WAV ingestion, and circular autocorrelation.
//!
//! All generators produce unit-energy signals and are bit-reproducible
//! given their arguments (and seed, where one applies).

use std::path::Path;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{domain, substream};
use crate::wav;

pub use crate::wav::ChannelPolicy;

/// A finite real waveform of length N with circular indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
}

impl Signal {
    /// Wraps raw samples, rejecting empty or non-finite input.
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySignal);
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFiniteSignal);
        }
        Ok(Self { samples })
    }

    /// Unit impulse: 1 at index zero, 0 elsewhere. Lowest possible
    /// autocorrelation at every nonzero lag.
    pub fn impulse(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySignal);
        }
        let mut samples = vec![0.0; n];
        samples[0] = 1.0;
        Ok(Self { samples })
    }

    /// Unit-energy sine with a whole number of cycles per signal length.
    ///
    /// Frequency is given in cycles per N samples rather than radians so
    /// that the tone is exactly periodic on the circle. `cycles = n/2`
    /// samples the zero crossings only and is rejected as degenerate.
    pub fn sine(n: usize, cycles: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySignal);
        }
        if cycles < 1 || 2 * cycles > n {
            return Err(Error::InvalidFrequency { cycles, n });
        }
        if 2 * cycles == n {
            // sin(pi * k) vanishes at every integer sample
            return Err(Error::DegenerateSignal);
        }
        let w = 2.0 * std::f64::consts::PI * cycles as f64 / n as f64;
        let samples = (0..n).map(|i| (w * i as f64).sin()).collect();
        Self::unit_energy(samples)
    }

    /// Unit-energy Brownian noise: cumulative sum of i.i.d. standard
    /// Gaussians. The mean is removed before normalization so the DC
    /// offset does not dominate the autocorrelation profile.
    pub fn brownian(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySignal);
        }
        let mut rng = substream(seed, &[domain::BROWNIAN]);
        let mut acc = 0.0;
        let mut samples: Vec<f64> = (0..n)
            .map(|_| {
                acc += rng.sample::<f64, _>(StandardNormal);
                acc
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        for s in &mut samples {
            *s -= mean;
        }
        Self::unit_energy(samples)
    }

    /// Constant signal at unit energy: every sample 1/sqrt(N). Its
    /// autocorrelation equals 1 at every lag.
    pub fn constant(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySignal);
        }
        let v = 1.0 / (n as f64).sqrt();
        Ok(Self {
            samples: vec![v; n],
        })
    }

    /// First `n` samples of a PCM WAV file (16-bit int or 32-bit float),
    /// channel-reduced per `policy`, normalized to unit energy.
    ///
    /// The excerpt is truncated, never resampled.
    pub fn from_wav(path: &Path, n: usize, policy: ChannelPolicy) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySignal);
        }
        let samples = wav::read_excerpt(path, n, policy)?;
        Self::unit_energy(samples)
    }

    fn unit_energy(mut samples: Vec<f64>) -> Result<Self> {
        let energy: f64 = samples.iter().map(|s| s * s).sum();
        if !energy.is_finite() {
            return Err(Error::NonFiniteSignal);
        }
        if energy == 0.0 {
            return Err(Error::DegenerateSignal);
        }
        let scale = 1.0 / energy.sqrt();
        for s in &mut samples {
            *s *= scale;
        }
        Ok(Self { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Sample at circular index `i mod N`.
    pub fn at(&self, i: isize) -> f64 {
        let n = self.samples.len() as isize;
        self.samples[(i.rem_euclid(n)) as usize]
    }

    /// Squared Euclidean norm.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s * s).sum()
    }

    /// Circular autocorrelation R(t) for lags 0..`lags`, by the direct
    /// O(N * lags) sum.
    pub fn autocorrelation(&self, lags: usize) -> Result<AutocorrProfile> {
        let n = self.samples.len();
        if lags == 0 || lags > n {
            return Err(Error::LagOutOfRange { lags, n });
        }
        let x = &self.samples;
        let values = (0..lags)
            .map(|t| (0..n).map(|k| x[k] * x[(k + n - t) % n]).sum())
            .collect();
        Ok(AutocorrProfile {
            values,
            source_len: n,
        })
    }
}

/// Circular autocorrelation values R(0..L) of a signal of length N.
///
/// R(0) is the signal energy and dominates every other lag in magnitude.
/// A profile covering the full period (L = N) resolves arbitrary lags by
/// wrapping.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocorrProfile {
    values: Vec<f64>,
    source_len: usize,
}

impl AutocorrProfile {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of stored lags L.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Length N of the source signal.
    pub fn source_len(&self) -> usize {
        self.source_len
    }

    /// R(0), the energy of the source signal.
    pub fn energy(&self) -> f64 {
        self.values[0]
    }

    /// R at an arbitrary non-negative lag. Wraps circularly when the
    /// profile covers the full period, otherwise resolves stored lags
    /// only.
    pub fn lag(&self, tau: usize) -> Option<f64> {
        if self.values.len() == self.source_len {
            Some(self.values[tau % self.source_len])
        } else {
            self.values.get(tau).copied()
        }
    }
}
