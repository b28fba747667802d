//! Chi-square order statistics by Monte Carlo.
//!
//! The expected extremes of T i.i.d. chi-square(J) variables have no
//! closed form for finite T, but divided by J they sandwich the expected
//! optimal frame bounds of a random filterbank. This module estimates
//! them with seeded, trial-indexed substreams.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{domain, substream};
use crate::stats;

/// Minimum trials below which standard errors are too unreliable to report.
pub const MIN_TRIALS: usize = 100;

/// One chi-square draw with `dof` degrees of freedom, as the sum of `dof`
/// squared standard Gaussians.
pub fn sample_chi2(dof: usize, rng: &mut impl Rng) -> f64 {
    (0..dof)
        .map(|_| {
            let g: f64 = rng.sample(StandardNormal);
            g * g
        })
        .sum()
}

/// Monte Carlo estimates of the expected extremes of `count` i.i.d.
/// chi-square(`dof`) variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremeEstimate {
    pub dof: usize,
    pub count: usize,
    pub trials: usize,
    pub mean_min: f64,
    pub mean_max: f64,
    pub se_min: f64,
    pub se_max: f64,
}

/// Per trial, draws `count` chi-square(`dof`) values and records their
/// minimum and maximum; reports means and standard errors over trials.
/// Each trial owns the substream (seed, trial index), so results are
/// independent of execution order and thread count.
pub fn estimate_extremes(
    dof: usize,
    count: usize,
    trials: usize,
    seed: u64,
) -> Result<ExtremeEstimate> {
    if dof == 0 {
        return Err(Error::InvalidParameter(
            "degrees of freedom must be at least 1".into(),
        ));
    }
    if count == 0 {
        return Err(Error::InvalidParameter(
            "variable count must be at least 1".into(),
        ));
    }
    if trials < MIN_TRIALS {
        return Err(Error::InsufficientTrials {
            trials,
            min: MIN_TRIALS,
        });
    }
    let extremes: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = substream(seed, &[domain::CHI2_TRIAL, trial as u64]);
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for _ in 0..count {
                let y = sample_chi2(dof, &mut rng);
                lo = lo.min(y);
                hi = hi.max(y);
            }
            (lo, hi)
        })
        .collect();

    let mins: Vec<f64> = extremes.iter().map(|e| e.0).collect();
    let maxs: Vec<f64> = extremes.iter().map(|e| e.1).collect();
    Ok(ExtremeEstimate {
        dof,
        count,
        trials,
        mean_min: stats::mean(&mins),
        mean_max: stats::mean(&maxs),
        se_min: stats::std_err(&mins),
        se_max: stats::std_err(&maxs),
    })
}

/// Order-statistic sandwich on the expected optimal frame bounds:
/// `lower <= E[A] <= 1 <= E[B] <= upper`, obtained by dividing the
/// chi-square extreme estimates by the degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichBounds {
    pub dof: usize,
    pub count: usize,
    pub trials: usize,
    pub lower_mean_a: f64,
    pub upper_mean_b: f64,
    pub se_lower: f64,
    pub se_upper: f64,
}

pub fn theorem_sandwich(
    dof: usize,
    count: usize,
    trials: usize,
    seed: u64,
) -> Result<SandwichBounds> {
    let est = estimate_extremes(dof, count, trials, seed)?;
    let j = dof as f64;
    Ok(SandwichBounds {
        dof,
        count,
        trials,
        lower_mean_a: est.mean_min / j,
        upper_mean_b: est.mean_max / j,
        se_lower: est.se_min / j,
        se_upper: est.se_max / j,
    })
}
