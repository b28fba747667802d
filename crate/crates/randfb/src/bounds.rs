//! Closed-form moments, tail certificates, and asymptotic condition
//! estimates for random Gaussian filterbanks.
//!
//! Everything here is analytic; the Monte Carlo counterparts live in
//! [`crate::montecarlo`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::signals::AutocorrProfile;
use crate::spectrum::SpectralStats;

/// Expected response energy: `J T sigma^2 ||x||^2`.
///
/// Under the normalized variance `sigma^2 = (J T)^-1` this is exactly the
/// signal energy, i.e. the bank preserves energy on average.
pub fn expected_energy(num_filters: usize, filter_len: usize, sigma_sq: f64, energy: f64) -> f64 {
    num_filters as f64 * filter_len as f64 * sigma_sq * energy
}

/// Response-energy variance
/// `2 J sigma^4 * sum_{tau=-T..T} (T - |tau|) R(tau)^2`,
/// evaluated from non-negative lags by symmetry (R(-tau) = R(tau) for the
/// circular autocorrelation of a real signal), doubling every tau != 0
/// term.
///
/// The profile must resolve lags 0..=T: either at least T+1 stored lags or
/// a full-period profile, which wraps.
pub fn energy_variance(
    num_filters: usize,
    sigma_sq: f64,
    filter_len: usize,
    r: &AutocorrProfile,
) -> Result<f64> {
    let t = filter_len;
    let need = |tau: usize| {
        r.lag(tau).ok_or(Error::InsufficientLags {
            have: r.len(),
            need: t + 1,
        })
    };
    let r0 = need(0)?;
    let mut sum = t as f64 * r0 * r0;
    for tau in 1..=t {
        let v = need(tau)?;
        sum += 2.0 * (t - tau) as f64 * v * v;
    }
    Ok(2.0 * num_filters as f64 * sigma_sq * sigma_sq * sum)
}

/// Cantelli certificate: the probability of the response energy exceeding
/// `(1 + alpha) ||x||^2` is at most `V / (V + alpha^2 ||x||^4)`.
pub fn cantelli_prob(alpha: f64, variance: f64, energy: f64) -> f64 {
    assert!(alpha >= 0.0, "deviation must be non-negative");
    assert!(variance >= 0.0, "variance must be non-negative");
    assert!(energy > 0.0, "signal energy must be positive");
    if variance == 0.0 {
        return if alpha == 0.0 { 1.0 } else { 0.0 };
    }
    let dev_sq = alpha * alpha * energy * energy;
    (variance / (variance + dev_sq)).clamp(0.0, 1.0)
}

/// Exact inversion of [`cantelli_prob`]: `alpha = sqrt(V (1-p)/p) / ||x||^2`.
pub fn cantelli_alpha(p: f64, variance: f64, energy: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    Ok((variance * (1.0 - p) / p).sqrt() / energy)
}

/// Chernoff certificate under the normalized variance `sigma^2 = (J T)^-1`:
///
/// `P <= exp(-alpha^2 J T^2 E^2 / (2 alpha T lambda_inf E + 2 lambda_2_sq))`
///
/// where E is the signal energy and the lambda statistics come from the
/// shift Gram of the signal at filter length T.
pub fn chernoff_prob(
    alpha: f64,
    num_filters: usize,
    filter_len: usize,
    stats: &SpectralStats,
    energy: f64,
) -> f64 {
    assert!(alpha >= 0.0, "deviation must be non-negative");
    assert!(energy > 0.0, "signal energy must be positive");
    let j = num_filters as f64;
    let t = filter_len as f64;
    let numer = alpha * alpha * j * t * t * energy * energy;
    let denom = 2.0 * alpha * t * stats.lambda_inf * energy + 2.0 * stats.lambda_2_sq;
    if denom <= 0.0 {
        // zero spectrum: the response is deterministic, so any positive
        // deviation has probability zero
        return if alpha == 0.0 { 1.0 } else { 0.0 };
    }
    (-numer / denom).exp().clamp(0.0, 1.0)
}

/// Absolute bisection tolerance for [`chernoff_alpha`].
pub const ALPHA_BISECTION_TOL: f64 = 1e-10;

/// The unique deviation at which [`chernoff_prob`] equals `p`, by
/// bisection (the exponent is strictly decreasing in alpha for alpha > 0).
/// `p >= 1` returns zero, matching the trivial bound at alpha = 0.
pub fn chernoff_alpha(
    p: f64,
    num_filters: usize,
    filter_len: usize,
    stats: &SpectralStats,
    energy: f64,
) -> Result<f64> {
    if p >= 1.0 {
        return Ok(0.0);
    }
    if !(p > 0.0) {
        return Err(Error::InvalidProbability(p));
    }
    if stats.lambda_inf <= 0.0 || stats.lambda_2_sq <= 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    let mut hi = 1.0;
    while chernoff_prob(hi, num_filters, filter_len, stats, energy) > p {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::DegenerateSpectrum);
        }
    }
    let mut lo = 0.0;
    while hi - lo > ALPHA_BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if chernoff_prob(mid, num_filters, filter_len, stats, energy) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Range `[2/(T J), 2/J]` containing the variance of either optimal frame
/// bound under the normalized weight variance. The extremes are attained
/// by an impulse and a constant input respectively.
pub fn variance_bounds_ab(num_filters: usize, filter_len: usize) -> (f64, f64) {
    let j = num_filters as f64;
    let t = filter_len as f64;
    (2.0 / (t * j), 2.0 / j)
}

/// Asymptotic condition-number estimate
/// `(1 + 2 sqrt(ln T / J)) / (1 - 2 sqrt(ln T / J))`.
///
/// Natural log, consistent with Gaussian extreme-value theory. Defined for
/// `J > 4 ln T`; at and below that boundary the denominator vanishes. Its
/// level sets satisfy `J proportional to ln T`, so banks that scale filter
/// count logarithmically in filter length keep the same estimate.
pub fn kappa_tilde(num_filters: usize, filter_len: usize) -> Result<f64> {
    let ratio = 2.0 * ((filter_len as f64).ln() / num_filters as f64).sqrt();
    if ratio >= 1.0 {
        return Err(Error::KappaTildeDomain {
            num_filters,
            filter_len,
        });
    }
    Ok((1.0 + ratio) / (1.0 - ratio))
}

/// Gaussian extreme-value approximation of the expected minimum and
/// maximum of T i.i.d. chi-square(J) variables: `J -/+ 2 sqrt(J ln T)`.
pub fn gaussian_extreme_asymptotics(num_filters: usize, count: usize) -> (f64, f64) {
    let j = num_filters as f64;
    let spread = 2.0 * (j * (count as f64).ln()).sqrt();
    (j - spread, j + spread)
}

/// Energy moments of a dense Gaussian layer with M rows:
/// mean `M sigma^2 E`, variance `2 M sigma^4 E^2`.
///
/// Unlike the filterbank variance, this does not depend on the signal's
/// content, only on its energy.
pub fn dense_layer_moments(rows: usize, sigma_sq: f64, energy: f64) -> (f64, f64) {
    let m = rows as f64;
    (
        m * sigma_sq * energy,
        2.0 * m * sigma_sq * sigma_sq * energy * energy,
    )
}

/// Which tail inequality a certificate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Cantelli,
    Chernoff,
}

/// A large-deviation certificate: at relative deviation `alpha`, the
/// probability of exceeding `(1 + alpha) ||x||^2` is at most `prob_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationCertificate {
    pub kind: BoundKind,
    pub alpha: f64,
    pub prob_bound: f64,
    pub num_filters: usize,
    pub filter_len: usize,
    pub sigma_sq: f64,
    pub signal_energy: f64,
}

impl DeviationCertificate {
    pub fn cantelli(
        alpha: f64,
        variance: f64,
        energy: f64,
        num_filters: usize,
        filter_len: usize,
        sigma_sq: f64,
    ) -> Self {
        Self {
            kind: BoundKind::Cantelli,
            alpha,
            prob_bound: cantelli_prob(alpha, variance, energy),
            num_filters,
            filter_len,
            sigma_sq,
            signal_energy: energy,
        }
    }

    pub fn chernoff(
        alpha: f64,
        num_filters: usize,
        filter_len: usize,
        stats: &SpectralStats,
        energy: f64,
    ) -> Self {
        Self {
            kind: BoundKind::Chernoff,
            alpha,
            prob_bound: chernoff_prob(alpha, num_filters, filter_len, stats, energy),
            num_filters,
            filter_len,
            sigma_sq: crate::filterbank::normalized_sigma_sq(num_filters, filter_len),
            signal_energy: energy,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::normalized_sigma_sq;
    use crate::signals::Signal;
    use crate::spectrum::{spectral_stats_default, ShiftGram};

    #[test]
    fn expected_energy_values() {
        assert_eq!(expected_energy(10, 8, normalized_sigma_sq(10, 8), 1.0), 1.0);
        assert_eq!(expected_energy(1, 1, 1.0, 1.0), 1.0);
        assert_eq!(expected_energy(10, 8, 1.0, 2.0), 160.0);
    }

    #[test]
    fn impulse_variance_is_two_over_jt() {
        let (j, t) = (10, 8);
        let x = Signal::impulse(64).unwrap();
        let r = x.autocorrelation(64).unwrap();
        let v = energy_variance(j, normalized_sigma_sq(j, t), t, &r).unwrap();
        assert!((v - 2.0 / 80.0).abs() < 1e-15);
    }

    #[test]
    fn constant_variance_is_two_over_j() {
        let (j, t) = (10, 8);
        let x = Signal::constant(64).unwrap();
        let r = x.autocorrelation(64).unwrap();
        let v = energy_variance(j, normalized_sigma_sq(j, t), t, &r).unwrap();
        assert!((v - 0.2).abs() < 1e-12);
    }

    #[test]
    fn constant_attains_variance_upper_bound_at_desk_scale() {
        let (j, t) = (40, 64);
        let x = Signal::constant(1024).unwrap();
        let r = x.autocorrelation(t + 1).unwrap();
        let v = energy_variance(j, normalized_sigma_sq(j, t), t, &r).unwrap();
        let (_, upper) = variance_bounds_ab(j, t);
        assert!((v - upper).abs() < 1e-12 * upper);
    }

    #[test]
    fn variance_needs_t_plus_one_lags() {
        let x = Signal::brownian(64, 1).unwrap();
        let r = x.autocorrelation(8).unwrap(); // lags 0..7
        match energy_variance(4, 0.1, 8, &r) {
            Err(Error::InsufficientLags { have: 8, need: 9 }) => {}
            other => panic!("expected InsufficientLags, got {other:?}"),
        }
        assert!(energy_variance(4, 0.1, 7, &r).is_ok());
        // a full-period profile supports T = N by wrapping
        let full = x.autocorrelation(64).unwrap();
        assert!(energy_variance(4, 0.1, 64, &full).is_ok());
    }

    #[test]
    fn full_length_variance_wraps_the_profile() {
        // T = N: the tau = N term has weight zero, so the wrapped value is
        // irrelevant, but the call must succeed.
        let x = Signal::sine(32, 8).unwrap();
        let r = x.autocorrelation(32).unwrap();
        let v = energy_variance(10, normalized_sigma_sq(10, 32), 32, &r).unwrap();
        assert!(v > 0.0);
    }

    #[test]
    fn cantelli_prob_limits() {
        assert_eq!(cantelli_prob(0.0, 0.5, 1.0), 1.0);
        assert_eq!(cantelli_prob(0.7, 0.0, 1.0), 0.0);
        assert_eq!(cantelli_prob(0.0, 0.0, 1.0), 1.0);
        let p = cantelli_prob(0.5, 0.1, 1.0);
        assert!((p - 0.1 / (0.1 + 0.25)).abs() < 1e-15);
    }

    #[test]
    fn cantelli_alpha_closed_form_and_roundtrip() {
        // p = 1/2 collapses to sqrt(V)/E
        let a = cantelli_alpha(0.5, 0.09, 2.0).unwrap();
        assert!((a - 0.15).abs() < 1e-15);

        // impulse at J=10, T=8: V = 2/(JT) = 0.025, alpha = sqrt(0.475)
        let a = cantelli_alpha(0.05, 0.025, 1.0).unwrap();
        assert!((a - 0.475f64.sqrt()).abs() < 1e-15);
        assert!((cantelli_prob(a, 0.025, 1.0) - 0.05).abs() < 1e-12);

        // p -> 1 drives alpha -> 0
        assert!(cantelli_alpha(0.999_999, 0.025, 1.0).unwrap() < 1e-3);
        assert!(cantelli_alpha(0.0, 1.0, 1.0).is_err());
        assert!(cantelli_alpha(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn chernoff_prob_identity_gram_formula() {
        // impulse at T=3 gives the identity gram: lambda_inf=1, lambda_2_sq=3
        let stats = SpectralStats {
            lambda_inf: 1.0,
            lambda_2_sq: 3.0,
            trace: 3.0,
        };
        let j = 10;
        for alpha in [0.0, 0.1, 0.5, 2.0] {
            let want = (-(alpha * alpha * j as f64 * 9.0) / (6.0 * alpha + 6.0)).exp();
            let got = chernoff_prob(alpha, j, 3, &stats, 1.0);
            assert!((got - want.min(1.0)).abs() < 1e-15);
        }
        assert_eq!(chernoff_prob(0.0, j, 3, &stats, 1.0), 1.0);
    }

    #[test]
    fn chernoff_alpha_roundtrips() {
        let x = Signal::brownian(64, 7).unwrap();
        let stats = spectral_stats_default(&ShiftGram::new(&x, 8).unwrap()).unwrap();
        for alpha0 in [0.05, 0.3, 1.5] {
            let p = chernoff_prob(alpha0, 10, 8, &stats, x.energy());
            let alpha = chernoff_alpha(p, 10, 8, &stats, x.energy()).unwrap();
            assert!(
                (alpha - alpha0).abs() < 1e-9,
                "roundtrip {alpha0} -> {alpha}"
            );
        }
    }

    #[test]
    fn chernoff_alpha_edge_cases() {
        let stats = SpectralStats {
            lambda_inf: 1.0,
            lambda_2_sq: 3.0,
            trace: 3.0,
        };
        assert_eq!(chernoff_alpha(1.0, 10, 3, &stats, 1.0).unwrap(), 0.0);
        assert_eq!(chernoff_alpha(1.5, 10, 3, &stats, 1.0).unwrap(), 0.0);
        assert!(chernoff_alpha(0.0, 10, 3, &stats, 1.0).is_err());
        let zero = SpectralStats {
            lambda_inf: 0.0,
            lambda_2_sq: 0.0,
            trace: 0.0,
        };
        assert!(matches!(
            chernoff_alpha(0.05, 10, 3, &zero, 1.0),
            Err(Error::DegenerateSpectrum)
        ));
    }

    #[test]
    fn chernoff_tightens_with_more_filters() {
        let x = Signal::impulse(64).unwrap();
        let stats = spectral_stats_default(&ShiftGram::new(&x, 8).unwrap()).unwrap();
        let a10 = chernoff_alpha(0.05, 10, 8, &stats, 1.0).unwrap();
        let a40 = chernoff_alpha(0.05, 40, 8, &stats, 1.0).unwrap();
        let a160 = chernoff_alpha(0.05, 160, 8, &stats, 1.0).unwrap();
        assert!(a10 > a40 && a40 > a160);
    }

    #[test]
    fn bound_probabilities_decrease_in_alpha() {
        let x = Signal::sine(64, 16).unwrap();
        let stats = spectral_stats_default(&ShiftGram::new(&x, 8).unwrap()).unwrap();
        let r = x.autocorrelation(9).unwrap();
        let v = energy_variance(10, normalized_sigma_sq(10, 8), 8, &r).unwrap();
        let mut prev_c = f64::INFINITY;
        let mut prev_h = f64::INFINITY;
        for i in 0..50 {
            let alpha = i as f64 * 0.1;
            let c = cantelli_prob(alpha, v, 1.0);
            let h = chernoff_prob(alpha, 10, 8, &stats, 1.0);
            assert!((0.0..=1.0).contains(&c));
            assert!((0.0..=1.0).contains(&h));
            assert!(c <= prev_c + 1e-15);
            assert!(h <= prev_h + 1e-15);
            prev_c = c;
            prev_h = h;
        }
    }

    #[test]
    fn variance_bound_values() {
        let (lo, hi) = variance_bounds_ab(40, 1024);
        assert!((lo - 4.8828125e-5).abs() < 1e-18);
        assert!((hi - 0.05).abs() < 1e-15);
        let (lo1, hi1) = variance_bounds_ab(10, 1);
        assert_eq!(lo1, hi1);
    }

    #[test]
    fn kappa_tilde_level_sets_scale_logarithmically() {
        // kappa(J, T) == kappa(cJ, T^c): ln(T^c)/(cJ) = ln(T)/J
        let a = kappa_tilde(16, 4).unwrap();
        let b = kappa_tilde(32, 16).unwrap();
        assert!((a - b).abs() < 1e-12);
        let c = kappa_tilde(48, 64).unwrap();
        assert!((a - c).abs() < 1e-12);
    }

    #[test]
    fn kappa_tilde_limits_and_domain() {
        // huge J drives the estimate to 1
        assert!((kappa_tilde(1_000_000_000, 1024).unwrap() - 1.0) < 1e-3);
        // 4 ln 1024 = 27.7, so J = 27 is out of domain and J = 28 is in
        assert!(matches!(
            kappa_tilde(27, 1024),
            Err(Error::KappaTildeDomain { .. })
        ));
        assert!(kappa_tilde(28, 1024).unwrap() > 1.0);
    }

    #[test]
    fn gaussian_extremes_collapse_at_single_variable() {
        let (lo, hi) = gaussian_extreme_asymptotics(40, 1);
        assert_eq!(lo, 40.0);
        assert_eq!(hi, 40.0);
        let spread = 2.0 * (40.0 * 1024f64.ln()).sqrt();
        let (lo, hi) = gaussian_extreme_asymptotics(40, 1024);
        assert!((lo - (40.0 - spread)).abs() < 1e-12);
        assert!((hi - (40.0 + spread)).abs() < 1e-12);
    }

    #[test]
    fn dense_layer_moment_values() {
        assert_eq!(dense_layer_moments(1, 1.0, 1.0), (1.0, 2.0));
        let (m, v) = dense_layer_moments(16, 1.0 / 16.0, 3.0);
        assert!((m - 3.0).abs() < 1e-15);
        assert!((v - 2.0 * 9.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn variance_ordering_over_corpus() {
        // impulse <= anything <= constant among unit-norm signals
        let (j, t, n) = (10, 16, 128);
        let sig_sq = normalized_sigma_sq(j, t);
        let var_of = |x: &Signal| {
            let r = x.autocorrelation(t + 1).unwrap();
            energy_variance(j, sig_sq, t, &r).unwrap()
        };
        let v_imp = var_of(&Signal::impulse(n).unwrap());
        let v_con = var_of(&Signal::constant(n).unwrap());
        for x in [
            Signal::sine(n, 32).unwrap(),
            Signal::brownian(n, 7).unwrap(),
            Signal::brownian(n, 13).unwrap(),
        ] {
            let v = var_of(&x);
            assert!(v_imp <= v + 1e-12 && v <= v_con + 1e-12);
        }
        // strict separation for T >= 2
        assert!(v_imp < v_con);
    }

    #[test]
    fn dense_variance_ignores_signal_content_filterbank_does_not() {
        let (j, t, n) = (10, 16, 128);
        let energy = 1.0;
        let (_, dense_a) = dense_layer_moments(j * n, 1.0 / (j * n) as f64, energy);
        let (_, dense_b) = dense_layer_moments(j * n, 1.0 / (j * n) as f64, energy);
        assert_eq!(dense_a, dense_b);

        let sig_sq = normalized_sigma_sq(j, t);
        let imp = Signal::impulse(n).unwrap();
        let con = Signal::constant(n).unwrap();
        let v_imp =
            energy_variance(j, sig_sq, t, &imp.autocorrelation(t + 1).unwrap()).unwrap();
        let v_con =
            energy_variance(j, sig_sq, t, &con.autocorrelation(t + 1).unwrap()).unwrap();
        assert!(v_imp < v_con);
    }
}
