//! Seeded experiment runners behind the reference figures: energy
//! histograms, deviation sweeps, frame-bound sweeps, and condition-number
//! grids.
//!
//! Reproducibility contract: every result is a pure function of
//! (configuration, master seed). Per-trial substreams derive from
//! (master seed, domain, grid index, trial index) and all reductions run
//! in trial order, so output bits do not depend on thread count.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::filterbank::{normalized_sigma_sq, EnergyEstimator, Filterbank, FrameAnalyzer};
use crate::orderstats::{self, SandwichBounds};
use crate::rng::{derive_seed, domain};
use crate::signals::{ChannelPolicy, Signal};
use crate::spectrum::{spectral_stats_default, ShiftGram};
use crate::stats;

/// Recipe for a test signal; `build` realizes it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SignalSpec {
    Impulse { n: usize },
    Sine { n: usize, cycles: usize },
    Brownian { n: usize, seed: u64 },
    Constant { n: usize },
    Wav {
        path: PathBuf,
        n: usize,
        channel_policy: ChannelPolicy,
    },
}

impl SignalSpec {
    pub fn build(&self) -> Result<Signal> {
        match self {
            Self::Impulse { n } => Signal::impulse(*n),
            Self::Sine { n, cycles } => Signal::sine(*n, *cycles),
            Self::Brownian { n, seed } => Signal::brownian(*n, *seed),
            Self::Constant { n } => Signal::constant(*n),
            Self::Wav {
                path,
                n,
                channel_policy,
            } => Signal::from_wav(path, *n, *channel_policy),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Impulse { n }
            | Self::Sine { n, .. }
            | Self::Brownian { n, .. }
            | Self::Constant { n }
            | Self::Wav { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn label(&self) -> String {
        match self {
            Self::Impulse { .. } => "synth:impulse".into(),
            Self::Sine { cycles, .. } => format!("synth:sine?cycles={cycles}"),
            Self::Brownian { seed, .. } => format!("synth:brownian?seed={seed}"),
            Self::Constant { .. } => "synth:constant".into(),
            Self::Wav { path, .. } => format!("wav:{}", path.display()),
        }
    }
}

/// How the weight variance is chosen per grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", content = "value")]
pub enum SigmaPolicy {
    /// sigma^2 = (J T)^-1: energy preservation on average.
    Normalized,
    /// A fixed sigma^2 at every grid point.
    Fixed(f64),
}

impl SigmaPolicy {
    pub fn resolve(&self, num_filters: usize, filter_len: usize) -> f64 {
        match self {
            Self::Normalized => normalized_sigma_sq(num_filters, filter_len),
            Self::Fixed(v) => *v,
        }
    }
}

/// Ambient dimension used for frame-bound analysis at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", content = "value")]
pub enum AmbientPolicy {
    /// n = T: the square case tied to the filter support.
    FilterLength,
    /// A fixed ambient dimension (e.g. a signal length N).
    Fixed(usize),
}

impl AmbientPolicy {
    fn resolve(&self, filter_len: usize) -> usize {
        match self {
            Self::FilterLength => filter_len,
            Self::Fixed(n) => *n,
        }
    }
}

/// Shared experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Input signal; optional because frame-bound and condition sweeps
    /// characterize the operator itself.
    pub signal: Option<SignalSpec>,
    pub j_list: Vec<usize>,
    pub t_list: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub sigma_policy: SigmaPolicy,
    /// Percentile retention for deviation bands, in (0, 1).
    pub level: f64,
    pub ambient: AmbientPolicy,
}

pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_LEVEL: f64 = 0.95;

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.j_list.is_empty() || self.t_list.is_empty() {
            return Err(Error::InvalidParameter(
                "parameter grids must be non-empty".into(),
            ));
        }
        if self.j_list.iter().any(|&j| j == 0) || self.t_list.iter().any(|&t| t == 0) {
            return Err(Error::InvalidParameter(
                "grid entries must be at least 1".into(),
            ));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "retention level must lie in (0, 1), got {}",
                self.level
            )));
        }
        Ok(())
    }

    fn signal(&self) -> Result<Signal> {
        self.signal
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("this experiment needs a signal".into()))?
            .build()
    }

    fn single_point(&self) -> Result<(usize, usize)> {
        if self.j_list.len() != 1 || self.t_list.len() != 1 {
            return Err(Error::InvalidParameter(
                "this experiment runs at a single (J, T) grid point".into(),
            ));
        }
        Ok((self.j_list[0], self.t_list[0]))
    }

    fn fixed_j(&self) -> Result<usize> {
        if self.j_list.len() != 1 {
            return Err(Error::InvalidParameter(
                "this experiment uses a single filter count J".into(),
            ));
        }
        Ok(self.j_list[0])
    }

    fn require_normalized(&self) -> Result<()> {
        match self.sigma_policy {
            SigmaPolicy::Normalized => Ok(()),
            SigmaPolicy::Fixed(_) => Err(Error::InvalidParameter(
                "this experiment is defined under the normalized variance (J T)^-1".into(),
            )),
        }
    }
}

fn simulate_energies(
    estimator: &EnergyEstimator,
    num_filters: usize,
    filter_len: usize,
    sigma_sq: f64,
    master_seed: u64,
    domain_tag: u64,
    grid_index: u64,
    trials: usize,
) -> Result<Vec<f64>> {
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = derive_seed(master_seed, &[domain_tag, grid_index, trial as u64]);
            let fb = Filterbank::sample(num_filters, filter_len, sigma_sq, seed)?;
            estimator.response_energy(&fb)
        })
        .collect()
}

/// Retained band of the `level` fraction of deviations closest to zero:
/// sorts by |deviation| (ties by trial index), keeps ceil(level * trials),
/// and returns the min and max retained deviation.
fn retained_band(deviations: &[f64], level: f64) -> (f64, f64) {
    let mut order: Vec<usize> = (0..deviations.len()).collect();
    order.sort_by(|&a, &b| {
        deviations[a]
            .abs()
            .total_cmp(&deviations[b].abs())
            .then(a.cmp(&b))
    });
    let keep = (level * deviations.len() as f64).ceil() as usize;
    let keep = keep.clamp(1, deviations.len());
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &idx in &order[..keep] {
        lo = lo.min(deviations[idx]);
        hi = hi.max(deviations[idx]);
    }
    (lo, hi)
}

/// Energy histogram at one (J, T): raw response energies with empirical
/// and analytic moments attached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyHistogram {
    pub num_filters: usize,
    pub filter_len: usize,
    pub sigma_sq: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub signal_energy: f64,
    /// One response energy per trial, in trial order.
    pub samples: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    pub retained_lo: f64,
    pub retained_hi: f64,
    pub analytic_mean: f64,
    pub analytic_variance: f64,
}

pub fn run_energy_histogram(cfg: &ExperimentConfig) -> Result<EnergyHistogram> {
    cfg.validate()?;
    let (j, t) = cfg.single_point()?;
    let x = cfg.signal()?;
    if t > x.len() {
        return Err(Error::FilterTooLong {
            filter_len: t,
            ambient: x.len(),
        });
    }
    let sigma_sq = cfg.sigma_policy.resolve(j, t);
    let estimator = EnergyEstimator::new(&x);
    let samples = simulate_energies(
        &estimator,
        j,
        t,
        sigma_sq,
        cfg.master_seed,
        domain::ENERGY_TRIAL,
        0,
        cfg.trials,
    )?;

    let deviations: Vec<f64> = samples.iter().map(|s| s - x.energy()).collect();
    let (retained_lo, retained_hi) = retained_band(&deviations, cfg.level);
    // t + 1 lags when they fit, else the full period (which wraps)
    let profile = x.autocorrelation((t + 1).min(x.len()))?;

    Ok(EnergyHistogram {
        num_filters: j,
        filter_len: t,
        sigma_sq,
        trials: cfg.trials,
        master_seed: cfg.master_seed,
        signal_energy: x.energy(),
        mean: stats::mean(&samples),
        variance: stats::variance(&samples),
        se_mean: stats::std_err(&samples),
        retained_lo,
        retained_hi,
        analytic_mean: bounds::expected_energy(j, t, sigma_sq, x.energy()),
        analytic_variance: bounds::energy_variance(j, sigma_sq, t, &profile)?,
        samples,
    })
}

/// One filter length of a deviation sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationRow {
    pub filter_len: usize,
    pub mean_dev: f64,
    pub se_dev: f64,
    pub band_lo: f64,
    pub band_hi: f64,
    pub cantelli_alpha: f64,
    pub chernoff_alpha: f64,
    pub analytic_variance: f64,
    /// Empirical frequency of exceeding (1 + alpha)||x||^2 at each alpha.
    pub exceed_cantelli: f64,
    pub exceed_chernoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationSweep {
    pub num_filters: usize,
    pub trials: usize,
    pub level: f64,
    pub master_seed: u64,
    pub signal_energy: f64,
    pub rows: Vec<DeviationRow>,
    /// Filter lengths skipped because they exceed the signal length.
    pub skipped: Vec<usize>,
}

/// Deviation band sweep across filter lengths at fixed J, with the two
/// analytic deviations solved at tail probability 1 - level.
pub fn run_deviation_sweep(cfg: &ExperimentConfig) -> Result<DeviationSweep> {
    cfg.validate()?;
    cfg.require_normalized()?;
    let j = cfg.fixed_j()?;
    let x = cfg.signal()?;
    let n = x.len();
    let estimator = EnergyEstimator::new(&x);
    let energy = x.energy();
    let p_tail = 1.0 - cfg.level;

    let max_t = cfg.t_list.iter().copied().filter(|&t| t <= n).max();
    let profile = match max_t {
        Some(t) if t < n => x.autocorrelation(t + 1)?,
        _ => x.autocorrelation(n)?,
    };

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (gi, &t) in cfg.t_list.iter().enumerate() {
        if t > n {
            skipped.push(t);
            continue;
        }
        let sigma_sq = normalized_sigma_sq(j, t);
        let samples = simulate_energies(
            &estimator,
            j,
            t,
            sigma_sq,
            cfg.master_seed,
            domain::DEVIATION_TRIAL,
            gi as u64,
            cfg.trials,
        )?;
        let deviations: Vec<f64> = samples.iter().map(|s| s - energy).collect();
        let (band_lo, band_hi) = retained_band(&deviations, cfg.level);

        let analytic_variance = bounds::energy_variance(j, sigma_sq, t, &profile)?;
        let ca = bounds::cantelli_alpha(p_tail, analytic_variance, energy)?;
        let stats_t = spectral_stats_default(&ShiftGram::new(&x, t)?)?;
        let cha = bounds::chernoff_alpha(p_tail, j, t, &stats_t, energy)?;

        let exceed = |alpha: f64| {
            samples
                .iter()
                .filter(|&&s| s >= (1.0 + alpha) * energy)
                .count() as f64
                / samples.len() as f64
        };

        rows.push(DeviationRow {
            filter_len: t,
            mean_dev: stats::mean(&deviations),
            se_dev: stats::std_err(&deviations),
            band_lo,
            band_hi,
            cantelli_alpha: ca,
            chernoff_alpha: cha,
            analytic_variance,
            exceed_cantelli: exceed(ca),
            exceed_chernoff: exceed(cha),
        });
    }

    Ok(DeviationSweep {
        num_filters: j,
        trials: cfg.trials,
        level: cfg.level,
        master_seed: cfg.master_seed,
        signal_energy: energy,
        rows,
        skipped,
    })
}

/// One filter length of a frame-bound sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameBoundRow {
    pub filter_len: usize,
    pub ambient_dim: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub se_a: f64,
    pub se_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    /// Lower-tail percentile of A at (1 - level)/2.
    pub percentile_lo_a: f64,
    /// Upper-tail percentile of B at 1 - (1 - level)/2.
    pub percentile_hi_b: f64,
    pub sandwich: SandwichBounds,
    /// Gaussian extreme-value estimates of E[A] and E[B].
    pub asym_lo: f64,
    pub asym_hi: f64,
    pub singular_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameBoundSweep {
    pub num_filters: usize,
    pub trials: usize,
    pub level: f64,
    pub master_seed: u64,
    pub rows: Vec<FrameBoundRow>,
}

/// Frame-bound sweep at fixed J under the normalized variance: empirical
/// means and percentiles of the optimal bounds, with the order-statistic
/// sandwich and its Gaussian asymptotics attached.
pub fn run_framebound_sweep(cfg: &ExperimentConfig) -> Result<FrameBoundSweep> {
    cfg.validate()?;
    cfg.require_normalized()?;
    let j = cfg.fixed_j()?;

    let mut rows = Vec::new();
    for (gi, &t) in cfg.t_list.iter().enumerate() {
        let n = cfg.ambient.resolve(t);
        if t > n {
            return Err(Error::FilterTooLong {
                filter_len: t,
                ambient: n,
            });
        }
        let sigma_sq = normalized_sigma_sq(j, t);
        let analyzer = FrameAnalyzer::new(n);
        let realizations: Vec<(f64, f64, bool)> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let seed = derive_seed(
                    cfg.master_seed,
                    &[domain::FRAME_TRIAL, gi as u64, trial as u64],
                );
                let fb = Filterbank::sample(j, t, sigma_sq, seed)?;
                let b = analyzer.bounds(&fb)?;
                Ok((b.lower, b.upper, b.singular))
            })
            .collect::<Result<_>>()?;

        let a_vals: Vec<f64> = realizations.iter().map(|r| r.0).collect();
        let b_vals: Vec<f64> = realizations.iter().map(|r| r.1).collect();
        let singular_count = realizations.iter().filter(|r| r.2).count();

        let sandwich = orderstats::theorem_sandwich(
            j,
            t,
            cfg.trials,
            derive_seed(cfg.master_seed, &[domain::FRAME_SANDWICH, gi as u64]),
        )?;
        let (asym_min, asym_max) = bounds::gaussian_extreme_asymptotics(j, t);
        let q = (1.0 - cfg.level) / 2.0;

        rows.push(FrameBoundRow {
            filter_len: t,
            ambient_dim: n,
            mean_a: stats::mean(&a_vals),
            mean_b: stats::mean(&b_vals),
            se_a: stats::std_err(&a_vals),
            se_b: stats::std_err(&b_vals),
            var_a: stats::variance(&a_vals),
            var_b: stats::variance(&b_vals),
            percentile_lo_a: stats::quantile(&a_vals, q),
            percentile_hi_b: stats::quantile(&b_vals, 1.0 - q),
            sandwich,
            asym_lo: asym_min / j as f64,
            asym_hi: asym_max / j as f64,
            singular_count,
        });
    }

    Ok(FrameBoundSweep {
        num_filters: j,
        trials: cfg.trials,
        level: cfg.level,
        master_seed: cfg.master_seed,
        rows,
    })
}

/// One (J, T) cell of a condition-number grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCell {
    pub num_filters: usize,
    pub filter_len: usize,
    pub ambient_dim: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub se_a: f64,
    pub se_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    /// Mean condition number over non-singular realizations.
    pub mean_kappa: f64,
    pub se_kappa: f64,
    pub percentile_lo_kappa: f64,
    pub percentile_hi_kappa: f64,
    /// mean_b / mean_a, the ratio of means (versus the mean of ratios).
    pub ratio_of_means: f64,
    /// Sample covariance of (kappa, A) over non-singular realizations.
    pub cov_kappa_a: f64,
    pub se_cov_kappa_a: f64,
    /// Asymptotic estimate where defined (J > 4 ln T).
    pub kappa_tilde: Option<f64>,
    /// Singular realizations excluded from kappa statistics.
    pub excluded: usize,
    pub exclusion_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionGrid {
    pub trials: usize,
    pub level: f64,
    pub master_seed: u64,
    pub cells: Vec<ConditionCell>,
}

impl ConditionGrid {
    /// Cells on the J = log2(T) diagonal, in cell order.
    pub fn log2_diagonal(&self) -> Vec<&ConditionCell> {
        self.cells
            .iter()
            .filter(|c| {
                c.filter_len.is_power_of_two()
                    && c.filter_len.trailing_zeros() as usize == c.num_filters
            })
            .collect()
    }
}

/// Condition-number statistics over a (J, T) grid under the normalized
/// variance. Singular realizations (A = 0) are excluded from the kappa
/// aggregates and counted, so the induced bias stays visible.
pub fn run_condition_sweep(cfg: &ExperimentConfig) -> Result<ConditionGrid> {
    cfg.validate()?;
    cfg.require_normalized()?;

    let mut cells = Vec::new();
    for (ji, &j) in cfg.j_list.iter().enumerate() {
        for (ti, &t) in cfg.t_list.iter().enumerate() {
            let gi = (ji * cfg.t_list.len() + ti) as u64;
            let n = cfg.ambient.resolve(t);
            if t > n {
                return Err(Error::FilterTooLong {
                    filter_len: t,
                    ambient: n,
                });
            }
            let sigma_sq = normalized_sigma_sq(j, t);
            let analyzer = FrameAnalyzer::new(n);
            let realizations: Vec<(f64, f64, Option<f64>)> = (0..cfg.trials)
                .into_par_iter()
                .map(|trial| {
                    let seed = derive_seed(
                        cfg.master_seed,
                        &[domain::CONDITION_TRIAL, gi, trial as u64],
                    );
                    let fb = Filterbank::sample(j, t, sigma_sq, seed)?;
                    let b = analyzer.bounds(&fb)?;
                    let kappa = if b.singular {
                        None
                    } else {
                        Some(b.condition_number())
                    };
                    Ok((b.lower, b.upper, kappa))
                })
                .collect::<Result<_>>()?;

            let a_vals: Vec<f64> = realizations.iter().map(|r| r.0).collect();
            let b_vals: Vec<f64> = realizations.iter().map(|r| r.1).collect();
            let mut kappas = Vec::new();
            let mut a_included = Vec::new();
            for (a, _, k) in &realizations {
                if let Some(k) = k {
                    kappas.push(*k);
                    a_included.push(*a);
                }
            }
            let excluded = cfg.trials - kappas.len();
            if kappas.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "every realization at J={j}, T={t} was singular"
                )));
            }

            let mean_a = stats::mean(&a_vals);
            let mean_b = stats::mean(&b_vals);
            let mean_kappa = stats::mean(&kappas);
            let cov_kappa_a = stats::covariance(&kappas, &a_included);
            // first-order standard error of the covariance estimate
            let se_cov = {
                let mk = mean_kappa;
                let ma = stats::mean(&a_included);
                let prods: Vec<f64> = kappas
                    .iter()
                    .zip(&a_included)
                    .map(|(k, a)| (k - mk) * (a - ma))
                    .collect();
                stats::std_err(&prods)
            };
            let q = (1.0 - cfg.level) / 2.0;

            cells.push(ConditionCell {
                num_filters: j,
                filter_len: t,
                ambient_dim: n,
                mean_a,
                mean_b,
                se_a: stats::std_err(&a_vals),
                se_b: stats::std_err(&b_vals),
                var_a: stats::variance(&a_vals),
                var_b: stats::variance(&b_vals),
                mean_kappa,
                se_kappa: stats::std_err(&kappas),
                percentile_lo_kappa: stats::quantile(&kappas, q),
                percentile_hi_kappa: stats::quantile(&kappas, 1.0 - q),
                ratio_of_means: mean_b / mean_a,
                cov_kappa_a,
                se_cov_kappa_a: se_cov,
                kappa_tilde: bounds::kappa_tilde(j, t).ok(),
                excluded,
                exclusion_rate: excluded as f64 / cfg.trials as f64,
            });
        }
    }

    Ok(ConditionGrid {
        trials: cfg.trials,
        level: cfg.level,
        master_seed: cfg.master_seed,
        cells,
    })
}
