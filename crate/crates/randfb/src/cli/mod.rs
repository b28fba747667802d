//! Command-line front-end.
//!
//! Five subcommands regenerate the library's reference figures and
//! analytic reports as CSV/JSON (and optional SVG), each accompanied by a
//! run manifest; `replay` re-runs any manifest byte-exactly. Exit codes:
//! 0 success, 2 configuration error, 3 I/O error, 4 numerical
//! non-convergence.

mod csvw;
mod manifest;
mod svg;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bounds::{self, DeviationCertificate};
use crate::error::{Error, Result};
use crate::filterbank::normalized_sigma_sq;
use crate::montecarlo::{
    run_condition_sweep, run_deviation_sweep, run_energy_histogram, run_framebound_sweep,
    AmbientPolicy, ExperimentConfig, SigmaPolicy, SignalSpec, DEFAULT_LEVEL, DEFAULT_TRIALS,
};
use crate::signals::ChannelPolicy;
use crate::spectrum::{spectral_stats_default, ShiftGram, SpectralStats};
use csvw::{int, num, opt, Csv};
pub use manifest::{ResolvedCommand, RunManifest};

#[derive(Parser)]
#[command(
    name = "randfb",
    version,
    about = "Stability analysis of random Gaussian 1-D convolutional filterbanks",
    after_help = "Signal specs: synth:impulse | synth:sine[?cycles=C] (default C = N/4) | \
                  synth:brownian[?seed=S] | synth:constant | wav:PATH[?channel=first|mean]\n\
                  RANDFB_SEED is used when --seed is absent (default 0)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Histogram of response energies over random filterbank realizations
    EnergyHist(EnergyHistArgs),
    /// Deviation bands across filter lengths with Cantelli/Chernoff certificates
    Deviation(DeviationArgs),
    /// Frame-bound sweep: empirical means/percentiles with the order-statistic sandwich
    Framebounds(FrameboundsArgs),
    /// Condition-number grid over (J, T) with the J = log2 T diagonal
    Condition(ConditionArgs),
    /// Analytic report for one signal and (J, T); no Monte Carlo
    Bounds(BoundsArgs),
    /// Re-run a command from its manifest, reproducing CSV outputs byte-exactly
    Replay(ReplayArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Master seed; falls back to $RANDFB_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (created if missing)
    #[arg(long)]
    out: PathBuf,
    /// Worker-thread cap; 0 uses the default pool. Outputs are identical
    /// for any value.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Also write an SVG plot
    #[arg(long)]
    svg: bool,
}

#[derive(Args, Clone)]
struct SignalArgs {
    /// Signal spec (see --help footer)
    #[arg(long)]
    signal: String,
    /// Signal length N in samples
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct EnergyHistArgs {
    #[command(flatten)]
    signal: SignalArgs,
    /// Number of filters J
    #[arg(long = "filters", default_value_t = 10)]
    num_filters: usize,
    /// Filter length T
    #[arg(long = "len")]
    filter_len: usize,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    /// Weight variance; defaults to the normalized (J T)^-1
    #[arg(long = "sigma-sq")]
    sigma_sq: Option<f64>,
    /// Retained fraction for the deviation band
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    level: f64,
    /// Histogram bin count
    #[arg(long, default_value_t = 50)]
    bins: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct DeviationArgs {
    #[command(flatten)]
    signal: SignalArgs,
    #[arg(long = "filters", default_value_t = 10)]
    num_filters: usize,
    /// Comma-separated filter lengths
    #[arg(long = "t-grid", default_value = "8,16,32,64,128,256,512,1024")]
    t_grid: String,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    level: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct FrameboundsArgs {
    #[arg(long = "filters", default_value_t = 40)]
    num_filters: usize,
    #[arg(long = "t-grid", default_value = "8,16,32,64,128,256,512,1024")]
    t_grid: String,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    level: f64,
    /// Fixed ambient dimension; defaults to n = T per grid point
    #[arg(long)]
    ambient: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ConditionArgs {
    /// Comma-separated filter counts
    #[arg(long = "j-grid", default_value = "4,5,6,7,8,9,10,20,40,80")]
    j_grid: String,
    #[arg(long = "t-grid", default_value = "16,32,64,128,256,512,1024")]
    t_grid: String,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    level: f64,
    /// Fixed ambient dimension; defaults to n = T per grid point
    #[arg(long)]
    ambient: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    signal: SignalArgs,
    #[arg(long = "filters", default_value_t = 10)]
    num_filters: usize,
    #[arg(long = "len")]
    filter_len: usize,
    /// Weight variance; defaults to the normalized (J T)^-1. The Chernoff
    /// certificate is only defined under the normalized variance.
    #[arg(long = "sigma-sq")]
    sigma_sq: Option<f64>,
    /// Certificates are solved at tail probability 1 - level
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    level: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ReplayArgs {
    /// Manifest written by a previous run
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory for the replayed run
    #[arg(long)]
    out: PathBuf,
    /// Worker-thread cap; defaults to the manifest's value
    #[arg(long)]
    threads: Option<usize>,
}

/// Parses argv, runs the selected command, and maps errors to exit codes.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Wav(_) | Error::Io { .. } => 3,
        Error::NoConvergence { .. } => 4,
        _ => 2,
    }
}

struct RunOpts {
    out: PathBuf,
    threads: usize,
    svg: bool,
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::EnergyHist(args) => {
            let spec = parse_signal_spec(&args.signal.signal, args.signal.n)?;
            let config = ExperimentConfig {
                signal: Some(spec),
                j_list: vec![args.num_filters],
                t_list: vec![args.filter_len],
                trials: args.trials,
                master_seed: resolve_seed(args.common.seed)?,
                sigma_policy: sigma_policy(args.sigma_sq),
                level: args.level,
                ambient: AmbientPolicy::FilterLength,
            };
            run_resolved(
                ResolvedCommand::EnergyHist {
                    config,
                    bins: args.bins,
                },
                opts(&args.common),
            )
        }
        Command::Deviation(args) => {
            let spec = parse_signal_spec(&args.signal.signal, args.signal.n)?;
            let config = ExperimentConfig {
                signal: Some(spec),
                j_list: vec![args.num_filters],
                t_list: parse_grid(&args.t_grid)?,
                trials: args.trials,
                master_seed: resolve_seed(args.common.seed)?,
                sigma_policy: SigmaPolicy::Normalized,
                level: args.level,
                ambient: AmbientPolicy::FilterLength,
            };
            run_resolved(ResolvedCommand::Deviation { config }, opts(&args.common))
        }
        Command::Framebounds(args) => {
            let config = ExperimentConfig {
                signal: None,
                j_list: vec![args.num_filters],
                t_list: parse_grid(&args.t_grid)?,
                trials: args.trials,
                master_seed: resolve_seed(args.common.seed)?,
                sigma_policy: SigmaPolicy::Normalized,
                level: args.level,
                ambient: ambient_policy(args.ambient),
            };
            run_resolved(ResolvedCommand::Framebounds { config }, opts(&args.common))
        }
        Command::Condition(args) => {
            let config = ExperimentConfig {
                signal: None,
                j_list: parse_grid(&args.j_grid)?,
                t_list: parse_grid(&args.t_grid)?,
                trials: args.trials,
                master_seed: resolve_seed(args.common.seed)?,
                sigma_policy: SigmaPolicy::Normalized,
                level: args.level,
                ambient: ambient_policy(args.ambient),
            };
            run_resolved(ResolvedCommand::Condition { config }, opts(&args.common))
        }
        Command::Bounds(args) => {
            let spec = parse_signal_spec(&args.signal.signal, args.signal.n)?;
            if !(args.level > 0.0 && args.level < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "level must lie in (0, 1), got {}",
                    args.level
                )));
            }
            run_resolved(
                ResolvedCommand::Bounds {
                    signal: spec,
                    num_filters: args.num_filters,
                    filter_len: args.filter_len,
                    sigma_sq: args.sigma_sq,
                    tail_probability: 1.0 - args.level,
                },
                opts(&args.common),
            )
        }
        Command::Replay(args) => {
            let manifest = RunManifest::load(&args.manifest)?;
            run_resolved(
                manifest.run.clone(),
                RunOpts {
                    out: args.out,
                    threads: args.threads.unwrap_or(manifest.threads),
                    svg: manifest.svg,
                },
            )
        }
    }
}

fn opts(common: &CommonArgs) -> RunOpts {
    RunOpts {
        out: common.out.clone(),
        threads: common.threads,
        svg: common.svg,
    }
}

fn sigma_policy(sigma_sq: Option<f64>) -> SigmaPolicy {
    match sigma_sq {
        Some(v) => SigmaPolicy::Fixed(v),
        None => SigmaPolicy::Normalized,
    }
}

fn ambient_policy(ambient: Option<usize>) -> AmbientPolicy {
    match ambient {
        Some(n) => AmbientPolicy::Fixed(n),
        None => AmbientPolicy::FilterLength,
    }
}

fn resolve_seed(explicit: Option<u64>) -> Result<u64> {
    if let Some(seed) = explicit {
        return Ok(seed);
    }
    match std::env::var("RANDFB_SEED") {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!(
                "RANDFB_SEED must be an unsigned integer, got {raw:?}"
            ))
        }),
        Err(_) => Ok(0),
    }
}

fn parse_grid(raw: &str) -> Result<Vec<usize>> {
    raw.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad grid entry {tok:?}")))
        })
        .collect()
}

/// Parses the `synth:...` / `wav:...` signal mini-syntax.
pub fn parse_signal_spec(raw: &str, n: usize) -> Result<SignalSpec> {
    let bad = |msg: String| Error::InvalidParameter(msg);
    let (scheme, rest) = raw
        .split_once(':')
        .ok_or_else(|| bad(format!("signal spec {raw:?} needs a synth: or wav: scheme")))?;
    let (name, query) = match rest.split_once('?') {
        Some((n, q)) => (n, Some(q)),
        None => (rest, None),
    };
    let mut params = Vec::new();
    if let Some(q) = query {
        for pair in q.split('&') {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| bad(format!("bad signal parameter {pair:?}")))?;
            params.push((k, v));
        }
    }
    let reject_unknown = |allowed: &[&str], params: &[(&str, &str)]| -> Result<()> {
        for (k, _) in params {
            if !allowed.contains(k) {
                return Err(bad(format!("unknown signal parameter {k:?}")));
            }
        }
        Ok(())
    };
    let lookup = |key: &str| params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);

    match scheme {
        "synth" => match name {
            "impulse" => {
                reject_unknown(&[], &params)?;
                Ok(SignalSpec::Impulse { n })
            }
            "constant" => {
                reject_unknown(&[], &params)?;
                Ok(SignalSpec::Constant { n })
            }
            "sine" => {
                reject_unknown(&["cycles"], &params)?;
                let cycles = match lookup("cycles") {
                    Some(v) => v
                        .parse()
                        .map_err(|_| bad(format!("bad cycles value {v:?}")))?,
                    None => n / 4, // quarter-Nyquist reproduction default
                };
                Ok(SignalSpec::Sine { n, cycles })
            }
            "brownian" => {
                reject_unknown(&["seed"], &params)?;
                let seed = match lookup("seed") {
                    Some(v) => v.parse().map_err(|_| bad(format!("bad seed value {v:?}")))?,
                    None => 0,
                };
                Ok(SignalSpec::Brownian { n, seed })
            }
            other => Err(bad(format!("unknown synthetic signal {other:?}"))),
        },
        "wav" => {
            reject_unknown(&["channel"], &params)?;
            let channel_policy = match lookup("channel") {
                Some("first") | None => ChannelPolicy::First,
                Some("mean") => ChannelPolicy::Mean,
                Some(other) => return Err(bad(format!("unknown channel policy {other:?}"))),
            };
            Ok(SignalSpec::Wav {
                path: PathBuf::from(name),
                n,
                channel_policy,
            })
        }
        other => Err(bad(format!("unknown signal scheme {other:?}"))),
    }
}

fn run_resolved(run: ResolvedCommand, opts: RunOpts) -> Result<()> {
    std::fs::create_dir_all(&opts.out).map_err(|source| Error::Io {
        path: opts.out.clone(),
        source,
    })?;
    let started = Instant::now();
    let mut manifest = RunManifest::new(run.clone(), opts.threads, opts.svg);
    let (outputs, warnings) = with_pool(opts.threads, || exec(&run, &opts))??;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    manifest.outputs = outputs;
    manifest.warnings = warnings;
    manifest.duration_seconds = started.elapsed().as_secs_f64();
    let manifest_name = format!("{}_manifest.json", run.name().replace('-', "_"));
    manifest.save(&opts.out.join(&manifest_name))?;
    println!(
        "{}: wrote {} file(s) to {}",
        run.name(),
        manifest.outputs.len() + 1,
        opts.out.display()
    );
    Ok(())
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

type Written = (Vec<String>, Vec<String>);

fn exec(run: &ResolvedCommand, opts: &RunOpts) -> Result<Written> {
    match run {
        ResolvedCommand::EnergyHist { config, bins } => exec_energy_hist(config, *bins, opts),
        ResolvedCommand::Deviation { config } => exec_deviation(config, opts),
        ResolvedCommand::Framebounds { config } => exec_framebounds(config, opts),
        ResolvedCommand::Condition { config } => exec_condition(config, opts),
        ResolvedCommand::Bounds {
            signal,
            num_filters,
            filter_len,
            sigma_sq,
            tail_probability,
        } => exec_bounds(
            signal,
            *num_filters,
            *filter_len,
            *sigma_sq,
            *tail_probability,
            opts,
        ),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| Error::Io { path, source })
}

fn histogram_bins(samples: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    let bins = bins.max(1);
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &s in samples {
        let idx = (((s - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (lo + i as f64 * width, lo + (i + 1) as f64 * width, c))
        .collect()
}

fn exec_energy_hist(config: &ExperimentConfig, bins: usize, opts: &RunOpts) -> Result<Written> {
    let hist = run_energy_histogram(config)?;
    let mut outputs = Vec::new();

    let mut samples = Csv::new(&["trial", "energy", "deviation"]);
    for (i, &e) in hist.samples.iter().enumerate() {
        samples.row(&[int(i), num(e), num(e - hist.signal_energy)]);
    }
    write_file(&opts.out, "energy_hist_samples.csv", &samples.into_string())?;
    outputs.push("energy_hist_samples.csv".into());

    let bin_data = histogram_bins(&hist.samples, bins);
    let mut bins_csv = Csv::new(&["bin_lo", "bin_hi", "count"]);
    for &(lo, hi, c) in &bin_data {
        bins_csv.row(&[num(lo), num(hi), int(c)]);
    }
    write_file(&opts.out, "energy_hist_bins.csv", &bins_csv.into_string())?;
    outputs.push("energy_hist_bins.csv".into());

    let mut summary = Csv::new(&[
        "J",
        "T",
        "sigma_sq",
        "trials",
        "mean",
        "variance",
        "retained_lo",
        "retained_hi",
        "analytic_mean",
        "analytic_variance",
    ]);
    summary.row(&[
        int(hist.num_filters),
        int(hist.filter_len),
        num(hist.sigma_sq),
        int(hist.trials),
        num(hist.mean),
        num(hist.variance),
        num(hist.retained_lo),
        num(hist.retained_hi),
        num(hist.analytic_mean),
        num(hist.analytic_variance),
    ]);
    write_file(&opts.out, "energy_hist_summary.csv", &summary.into_string())?;
    outputs.push("energy_hist_summary.csv".into());

    if opts.svg {
        let mut plot = svg::Plot::new(
            &format!(
                "Response energy, J={}, T={}, {} trials",
                hist.num_filters, hist.filter_len, hist.trials
            ),
            "energy",
            "count",
        );
        let xs: Vec<f64> = bin_data.iter().flat_map(|b| [b.0, b.1]).collect();
        let ys: Vec<f64> = bin_data.iter().map(|b| b.2 as f64).chain([0.0]).collect();
        plot.set_ranges(&xs, &ys);
        plot.bars(&bin_data, "#1f77b4");
        write_file(&opts.out, "energy_hist.svg", &plot.render())?;
        outputs.push("energy_hist.svg".into());
    }

    Ok((outputs, Vec::new()))
}

fn exec_deviation(config: &ExperimentConfig, opts: &RunOpts) -> Result<Written> {
    let sweep = run_deviation_sweep(config)?;
    let mut outputs = Vec::new();

    let mut csv = Csv::new(&[
        "T",
        "mean_dev",
        "band_lo",
        "band_hi",
        "cantelli_alpha",
        "chernoff_alpha",
    ]);
    for row in &sweep.rows {
        csv.row(&[
            int(row.filter_len),
            num(row.mean_dev),
            num(row.band_lo),
            num(row.band_hi),
            num(row.cantelli_alpha),
            num(row.chernoff_alpha),
        ]);
    }
    write_file(&opts.out, "deviation.csv", &csv.into_string())?;
    outputs.push("deviation.csv".into());

    if opts.svg {
        let mut plot = svg::Plot::new(
            &format!(
                "Energy deviation bands, J={}, {} trials",
                sweep.num_filters, sweep.trials
            ),
            "filter length T",
            "deviation of ||Phi x||^2 from ||x||^2",
        )
        .log2_x();
        let e = sweep.signal_energy;
        let ts: Vec<f64> = sweep.rows.iter().map(|r| r.filter_len as f64).collect();
        let hi: Vec<(f64, f64)> = sweep
            .rows
            .iter()
            .map(|r| (r.filter_len as f64, r.band_hi))
            .collect();
        let lo: Vec<(f64, f64)> = sweep
            .rows
            .iter()
            .map(|r| (r.filter_len as f64, r.band_lo))
            .collect();
        let cant: Vec<(f64, f64)> = sweep
            .rows
            .iter()
            .map(|r| (r.filter_len as f64, r.cantelli_alpha * e))
            .collect();
        let cher: Vec<(f64, f64)> = sweep
            .rows
            .iter()
            .map(|r| (r.filter_len as f64, r.chernoff_alpha * e))
            .collect();
        let ys: Vec<f64> = hi
            .iter()
            .chain(&lo)
            .chain(&cant)
            .chain(&cher)
            .map(|p| p.1)
            .collect();
        plot.set_ranges(&ts, &ys);
        plot.band(&hi, &lo, "#1f77b4");
        plot.line(&hi, "#1f77b4", "retained band");
        plot.line(&lo, "#1f77b4", "");
        plot.line(&cant, "#ff7f0e", "cantelli");
        plot.line(&cher, "#2ca02c", "chernoff");
        write_file(&opts.out, "deviation.svg", &plot.render())?;
        outputs.push("deviation.svg".into());
    }

    let warnings = sweep
        .skipped
        .iter()
        .map(|t| format!("skipped T={t}: exceeds signal length"))
        .collect();
    Ok((outputs, warnings))
}

fn exec_framebounds(config: &ExperimentConfig, opts: &RunOpts) -> Result<Written> {
    let sweep = run_framebound_sweep(config)?;
    let mut outputs = Vec::new();

    let mut csv = Csv::new(&[
        "T",
        "mean_A",
        "mean_B",
        "p2.5_A",
        "p97.5_B",
        "thm1_lo",
        "thm1_hi",
        "asym_lo",
        "asym_hi",
    ]);
    for row in &sweep.rows {
        csv.row(&[
            int(row.filter_len),
            num(row.mean_a),
            num(row.mean_b),
            num(row.percentile_lo_a),
            num(row.percentile_hi_b),
            num(row.sandwich.lower_mean_a),
            num(row.sandwich.upper_mean_b),
            num(row.asym_lo),
            num(row.asym_hi),
        ]);
    }
    write_file(&opts.out, "framebounds.csv", &csv.into_string())?;
    outputs.push("framebounds.csv".into());

    if opts.svg {
        let mut plot = svg::Plot::new(
            &format!(
                "Optimal frame bounds, J={}, {} trials",
                sweep.num_filters, sweep.trials
            ),
            "filter length T",
            "frame bound",
        )
        .log2_x();
        let pt = |f: fn(&crate::montecarlo::FrameBoundRow) -> f64| -> Vec<(f64, f64)> {
            sweep
                .rows
                .iter()
                .map(|r| (r.filter_len as f64, f(r)))
                .collect()
        };
        let mean_a = pt(|r| r.mean_a);
        let mean_b = pt(|r| r.mean_b);
        let p_lo = pt(|r| r.percentile_lo_a);
        let p_hi = pt(|r| r.percentile_hi_b);
        let thm_lo = pt(|r| r.sandwich.lower_mean_a);
        let thm_hi = pt(|r| r.sandwich.upper_mean_b);
        let asym_lo = pt(|r| r.asym_lo);
        let asym_hi = pt(|r| r.asym_hi);
        let ts: Vec<f64> = sweep.rows.iter().map(|r| r.filter_len as f64).collect();
        let ys: Vec<f64> = [&p_lo, &p_hi, &thm_lo, &thm_hi, &asym_lo, &asym_hi]
            .iter()
            .flat_map(|s| s.iter().map(|p| p.1))
            .collect();
        plot.set_ranges(&ts, &ys);
        plot.band(&p_hi, &p_lo, "#1f77b4");
        plot.line(&mean_a, "#1f77b4", "mean A");
        plot.line(&mean_b, "#17becf", "mean B");
        plot.dashed_line(&thm_lo, "#d62728", "order-statistic sandwich");
        plot.dashed_line(&thm_hi, "#d62728", "");
        plot.dashed_line(&asym_lo, "#7f7f7f", "gaussian asymptotics");
        plot.dashed_line(&asym_hi, "#7f7f7f", "");
        write_file(&opts.out, "framebounds.svg", &plot.render())?;
        outputs.push("framebounds.svg".into());
    }

    Ok((outputs, Vec::new()))
}

fn condition_csv(cells: &[&crate::montecarlo::ConditionCell]) -> String {
    let mut csv = Csv::new(&[
        "J",
        "T",
        "mean_kappa",
        "ratio_of_means",
        "cov_kA",
        "kappa_tilde",
        "exclusion_rate",
    ]);
    for cell in cells {
        csv.row(&[
            int(cell.num_filters),
            int(cell.filter_len),
            num(cell.mean_kappa),
            num(cell.ratio_of_means),
            num(cell.cov_kappa_a),
            opt(cell.kappa_tilde),
            num(cell.exclusion_rate),
        ]);
    }
    csv.into_string()
}

fn exec_condition(config: &ExperimentConfig, opts: &RunOpts) -> Result<Written> {
    let grid = run_condition_sweep(config)?;
    let mut outputs = Vec::new();

    let all: Vec<&crate::montecarlo::ConditionCell> = grid.cells.iter().collect();
    write_file(&opts.out, "condition.csv", &condition_csv(&all))?;
    outputs.push("condition.csv".into());

    let diagonal = grid.log2_diagonal();
    write_file(&opts.out, "condition_diagonal.csv", &condition_csv(&diagonal))?;
    outputs.push("condition_diagonal.csv".into());

    if opts.svg {
        let mut plot = svg::Plot::new(
            &format!("Mean condition number, {} trials", grid.trials),
            "filter length T",
            "mean kappa",
        )
        .log2_x();
        let mut j_values: Vec<usize> = grid.cells.iter().map(|c| c.num_filters).collect();
        j_values.sort_unstable();
        j_values.dedup();
        let palette = [
            "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
            "#7f7f7f", "#bcbd22", "#17becf",
        ];
        let ts: Vec<f64> = grid.cells.iter().map(|c| c.filter_len as f64).collect();
        let ys: Vec<f64> = grid.cells.iter().map(|c| c.mean_kappa).collect();
        plot.set_ranges(&ts, &ys);
        for (i, &j) in j_values.iter().enumerate() {
            let series: Vec<(f64, f64)> = grid
                .cells
                .iter()
                .filter(|c| c.num_filters == j)
                .map(|c| (c.filter_len as f64, c.mean_kappa))
                .collect();
            plot.line(&series, palette[i % palette.len()], &format!("J={j}"));
        }
        let diag_series: Vec<(f64, f64)> = diagonal
            .iter()
            .map(|c| (c.filter_len as f64, c.mean_kappa))
            .collect();
        plot.dashed_line(&diag_series, "#000000", "J = log2 T");
        write_file(&opts.out, "condition.svg", &plot.render())?;
        outputs.push("condition.svg".into());
    }

    Ok((outputs, Vec::new()))
}

#[derive(Serialize)]
struct FrameVarianceBounds {
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct GaussianExtremes {
    min_expect: f64,
    max_expect: f64,
}

#[derive(Serialize)]
struct DenseBaseline {
    rows: usize,
    sigma_sq: f64,
    mean: f64,
    variance: f64,
}

/// Analytic report: every closed-form quantity the library knows about
/// one signal and one (J, T) design.
#[derive(Serialize)]
struct BoundsReport {
    signal: String,
    n: usize,
    num_filters: usize,
    filter_len: usize,
    sigma_sq: f64,
    normalized_sigma: bool,
    signal_energy: f64,
    expected_energy: f64,
    energy_variance: f64,
    tail_probability: f64,
    cantelli: DeviationCertificate,
    /// Defined only under the normalized weight variance.
    chernoff: Option<DeviationCertificate>,
    spectral: Option<SpectralStats>,
    frame_variance_bounds: FrameVarianceBounds,
    kappa_tilde: Option<f64>,
    gaussian_extremes: GaussianExtremes,
    /// Dense Gaussian layer with the same output dimension J * N; its
    /// variance ignores the signal's content.
    dense_baseline: DenseBaseline,
}

fn exec_bounds(
    spec: &SignalSpec,
    num_filters: usize,
    filter_len: usize,
    sigma_sq: Option<f64>,
    tail_probability: f64,
    opts: &RunOpts,
) -> Result<Written> {
    let x = spec.build()?;
    let n = x.len();
    if filter_len > n {
        return Err(Error::FilterTooLong {
            filter_len,
            ambient: n,
        });
    }
    if num_filters == 0 || filter_len == 0 {
        return Err(Error::InvalidParameter(
            "filter count and length must be at least 1".into(),
        ));
    }
    let normalized = sigma_sq.is_none();
    let sigma_sq = sigma_sq.unwrap_or_else(|| normalized_sigma_sq(num_filters, filter_len));
    if !(sigma_sq > 0.0) || !sigma_sq.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "weight variance must be positive and finite, got {sigma_sq}"
        )));
    }
    let energy = x.energy();
    let profile = x.autocorrelation((filter_len + 1).min(n))?;
    let variance = bounds::energy_variance(num_filters, sigma_sq, filter_len, &profile)?;
    let cantelli_alpha = bounds::cantelli_alpha(tail_probability, variance, energy)?;
    let cantelli = DeviationCertificate::cantelli(
        cantelli_alpha,
        variance,
        energy,
        num_filters,
        filter_len,
        sigma_sq,
    );

    let mut warnings = Vec::new();
    let (chernoff, spectral) = if normalized {
        let stats = spectral_stats_default(&ShiftGram::new(&x, filter_len)?)?;
        let alpha = bounds::chernoff_alpha(
            tail_probability,
            num_filters,
            filter_len,
            &stats,
            energy,
        )?;
        (
            Some(DeviationCertificate::chernoff(
                alpha,
                num_filters,
                filter_len,
                &stats,
                energy,
            )),
            Some(stats),
        )
    } else {
        warnings.push(
            "chernoff certificate omitted: defined only under the normalized variance (J T)^-1"
                .to_string(),
        );
        (None, None)
    };

    let (vb_lo, vb_hi) = bounds::variance_bounds_ab(num_filters, filter_len);
    let (g_lo, g_hi) = bounds::gaussian_extreme_asymptotics(num_filters, filter_len);
    let dense_rows = num_filters * n;
    let dense_sigma = 1.0 / dense_rows as f64;
    let (dense_mean, dense_var) = bounds::dense_layer_moments(dense_rows, dense_sigma, energy);

    let report = BoundsReport {
        signal: spec.label(),
        n,
        num_filters,
        filter_len,
        sigma_sq,
        normalized_sigma: normalized,
        signal_energy: energy,
        expected_energy: bounds::expected_energy(num_filters, filter_len, sigma_sq, energy),
        energy_variance: variance,
        tail_probability,
        cantelli,
        chernoff,
        spectral,
        frame_variance_bounds: FrameVarianceBounds {
            lower: vb_lo,
            upper: vb_hi,
        },
        kappa_tilde: bounds::kappa_tilde(num_filters, filter_len).ok(),
        gaussian_extremes: GaussianExtremes {
            min_expect: g_lo,
            max_expect: g_hi,
        },
        dense_baseline: DenseBaseline {
            rows: dense_rows,
            sigma_sq: dense_sigma,
            mean: dense_mean,
            variance: dense_var,
        },
    };

    let mut json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::InvalidParameter(format!("cannot serialize report: {e}")))?;
    json.push('\n');
    write_file(&opts.out, "bounds.json", &json)?;
    Ok((vec!["bounds.json".into()], warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_specs_parse() {
        assert_eq!(
            parse_signal_spec("synth:impulse", 64).unwrap(),
            SignalSpec::Impulse { n: 64 }
        );
        assert_eq!(
            parse_signal_spec("synth:sine", 64).unwrap(),
            SignalSpec::Sine { n: 64, cycles: 16 }
        );
        assert_eq!(
            parse_signal_spec("synth:sine?cycles=5", 64).unwrap(),
            SignalSpec::Sine { n: 64, cycles: 5 }
        );
        assert_eq!(
            parse_signal_spec("synth:brownian?seed=7", 64).unwrap(),
            SignalSpec::Brownian { n: 64, seed: 7 }
        );
        assert_eq!(
            parse_signal_spec("wav:a/b.wav?channel=mean", 64).unwrap(),
            SignalSpec::Wav {
                path: PathBuf::from("a/b.wav"),
                n: 64,
                channel_policy: ChannelPolicy::Mean,
            }
        );
    }

    #[test]
    fn bad_signal_specs_are_rejected() {
        assert!(parse_signal_spec("impulse", 64).is_err());
        assert!(parse_signal_spec("synth:noise", 64).is_err());
        assert!(parse_signal_spec("synth:sine?cycles=abc", 64).is_err());
        assert!(parse_signal_spec("synth:impulse?foo=1", 64).is_err());
        assert!(parse_signal_spec("wav:x.wav?channel=left", 64).is_err());
    }

    #[test]
    fn grids_parse() {
        assert_eq!(parse_grid("8,16, 32").unwrap(), vec![8, 16, 32]);
        assert!(parse_grid("8,,16").is_err());
        assert!(parse_grid("8,x").is_err());
    }

    #[test]
    fn histogram_bins_cover_all_samples() {
        let samples = [0.0, 0.1, 0.25, 0.5, 0.99, 1.0];
        let bins = histogram_bins(&samples, 4);
        assert_eq!(bins.len(), 4);
        let total: usize = bins.iter().map(|b| b.2).sum();
        assert_eq!(total, samples.len());
        assert_eq!(bins[0].0, 0.0);
        assert_eq!(bins[3].1, 1.0);
        // equal samples collapse to one occupied bin
        let degenerate = histogram_bins(&[2.0, 2.0], 3);
        let total: usize = degenerate.iter().map(|b| b.2).sum();
        assert_eq!(total, 2);
    }

    #[test]
    fn exit_codes_follow_error_classes() {
        assert_eq!(exit_code(&Error::InvalidParameter("x".into())), 2);
        assert_eq!(
            exit_code(&Error::Wav(crate::wav::WavError::NotWave)),
            3
        );
        assert_eq!(
            exit_code(&Error::Io {
                path: PathBuf::from("x"),
                source: std::io::Error::other("denied"),
            }),
            3
        );
        assert_eq!(
            exit_code(&Error::NoConvergence {
                estimate: 1.0,
                iterations: 10
            }),
            4
        );
    }
}
