//! How input autocorrelation drives the spread of the response energy.
//!
//! Prints the circular autocorrelation profile of three test signals and
//! the closed-form variance of ||Phi x||^2 they induce at a few filter
//! lengths. The impulse sits at the variance floor 2/(JT), the constant
//! at the ceiling 2/J; everything else lands in between according to its
//! weighted squared-autocorrelation mass.
//!
//! Run: cargo run --release -p randfb --example autocorr_profiles

use randfb::bounds::{energy_variance, variance_bounds_ab};
use randfb::filterbank::normalized_sigma_sq;
use randfb::signals::Signal;

fn main() -> randfb::Result<()> {
    let n = 1024;
    let num_filters = 10;

    let signals = [
        ("impulse", Signal::impulse(n)?),
        ("brownian (seed 7)", Signal::brownian(n, 7)?),
        ("sine, 1 cycle", Signal::sine(n, 1)?),
        ("sine, 256 cycles", Signal::sine(n, 256)?),
        ("constant", Signal::constant(n)?),
    ];

    println!("autocorrelation R(t)/R(0) at a few lags (N = {n}):");
    println!("{:>18} {:>8} {:>8} {:>8} {:>8} {:>8}", "signal", "t=1", "t=4", "t=16", "t=64", "t=256");
    for (name, x) in &signals {
        let r = x.autocorrelation(n)?;
        let r0 = r.energy();
        print!("{name:>18}");
        for t in [1usize, 4, 16, 64, 256] {
            print!(" {:>8.4}", r.values()[t] / r0);
        }
        println!();
    }

    println!();
    println!("variance of ||Phi x||^2 at sigma^2 = (J T)^-1, J = {num_filters}:");
    print!("{:>18}", "signal");
    let filter_lens = [8usize, 64, 512];
    for t in filter_lens {
        print!(" {:>12}", format!("T={t}"));
    }
    println!();
    for (name, x) in &signals {
        let r = x.autocorrelation(n)?;
        print!("{name:>18}");
        for t in filter_lens {
            let v = energy_variance(num_filters, normalized_sigma_sq(num_filters, t), t, &r)?;
            print!(" {:>12.6}", v);
        }
        println!();
    }

    println!();
    println!("floor / ceiling per filter length:");
    for t in filter_lens {
        let (lo, hi) = variance_bounds_ab(num_filters, t);
        println!("  T={t:<4} floor 2/(JT) = {lo:.6}   ceiling 2/J = {hi:.6}");
    }
    Ok(())
}
