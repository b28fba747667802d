//! Stability analysis of randomly initialized 1-D convolutional
//! filterbanks.
//!
//! A bank of J Gaussian random filters of length T, applied by circular
//! convolution, preserves the energy of any input on average once the
//! weight variance is set to (JT)^-1 — but individual realizations
//! deviate, and the deviations grow with the autocorrelation of the
//! input. This crate quantifies that behavior four ways:
//!
//! - [`bounds`] — exact closed-form moments of the response energy,
//!   Cantelli/Chernoff tail certificates and their inversions, frame-bound
//!   variance ranges, and the logarithmic condition-number scaling law.
//! - [`spectrum`] — the shift-Gram quadratic form behind those formulas
//!   and its spectral statistics (power iteration, no full eigensolve).
//! - [`filterbank`] — sampling, circular convolution, response energy,
//!   and exact optimal frame bounds via the DFT power response.
//! - [`orderstats`] / [`montecarlo`] — seeded Monte Carlo: chi-square
//!   extreme-value sandwiches on the expected frame bounds, and the
//!   experiment runners behind the CLI's reference figures.
//!
//! Every randomized path is bit-reproducible from its seed; see [`rng`].
//!
//! Start with the runnable examples (`cargo run -p randfb --example
//! energy_moments`, `... --example exact_frame_bounds`, and friends), or
//! the `randfb` binary for CSV/JSON/SVG output.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod filterbank;
pub mod montecarlo;
pub mod orderstats;
pub mod rng;
pub mod signals;
pub mod spectrum;
pub mod wav;

mod stats;

pub use error::{Error, Result};
pub use filterbank::{circular_convolve, frame_bounds, response_energy, Filterbank, FrameBounds};
pub use signals::{AutocorrProfile, ChannelPolicy, Signal};
pub use spectrum::{quadratic_energy, ShiftGram, SpectralStats};
