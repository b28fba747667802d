//! Shared test oracles, deliberately independent of the library's
//! computation paths: slow dense linear algebra and an O(n^2) DFT.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::Rng as _;
use rand_distr::StandardNormal;
use randfb::filterbank::Filterbank;
use randfb::rng::substream;
use randfb::signals::{ChannelPolicy, Signal};

/// O(n^2) complex DFT, forward, unnormalized. Returns (re, im) pairs.
pub fn naive_dft(x: &[f64]) -> Vec<(f64, f64)> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (i, &xi) in x.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (k as f64) * (i as f64) / n as f64;
                re += xi * ang.cos();
                im += xi * ang.sin();
            }
            (re, im)
        })
        .collect()
}

/// Inverse of [`naive_dft`], real part only.
pub fn naive_idft_real(spec: &[(f64, f64)]) -> Vec<f64> {
    let n = spec.len();
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for (k, &(re, im)) in spec.iter().enumerate() {
                let ang = 2.0 * std::f64::consts::PI * (k as f64) * (i as f64) / n as f64;
                acc += re * ang.cos() - im * ang.sin();
            }
            acc / n as f64
        })
        .collect()
}

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    if n == 1 {
        return vec![a[0][0]];
    }
    let frob: f64 = a
        .iter()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    let stop = 1e-14 * frob;
    for _sweep in 0..300 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += 2.0 * a[p][q] * a[p][q];
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq.abs() <= stop / (n * n) as f64 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// The N x T matrix whose columns are the first T circular shifts of x
/// (column t holds x[(row - t) mod N]).
pub fn dense_shift_matrix(x: &Signal, t: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    (0..n)
        .map(|row| {
            (0..t)
                .map(|col| x.at(row as isize - col as isize))
                .collect()
        })
        .collect()
}

/// A' * A for a dense rectangular matrix stored by rows.
pub fn gram_of(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cols = a[0].len();
    let mut g = vec![vec![0.0; cols]; cols];
    for row in a {
        for i in 0..cols {
            for j in 0..cols {
                g[i][j] += row[i] * row[j];
            }
        }
    }
    g
}

/// The stacked (J n) x n matrix of all subband circular-convolution
/// operators of a filterbank on R^n, built entry by entry.
pub fn dense_analysis_matrix(fb: &Filterbank, n: usize) -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(fb.num_filters() * n);
    for w in fb.filters() {
        let mut padded = vec![0.0; n];
        padded[..w.len()].copy_from_slice(w);
        for r in 0..n {
            // y[r] = sum_c w_pad[(r - c) mod n] x[c]
            rows.push((0..n).map(|c| padded[(r + n - c) % n]).collect());
        }
    }
    rows
}

/// Gaussian vector from a named substream, normalized to unit length.
pub fn random_unit_vector(seed: u64, path: &[u64], len: usize) -> Vec<f64> {
    let mut rng = substream(seed, path);
    let mut v: Vec<f64> = (0..len)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}

fn pcm16_wav_bytes(channels: u16, rate: u32, samples: &[i16]) -> Vec<u8> {
    let data_len = samples.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&channels.to_le_bytes());
    out.extend_from_slice(&rate.to_le_bytes());
    out.extend_from_slice(&(rate * u32::from(channels) * 2).to_le_bytes());
    out.extend_from_slice(&(channels * 2).to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for s in samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

/// Writes a deterministic one-second harmonic tone (decaying partials at
/// 440 Hz) as 16-bit mono WAV; a stand-in for a sustained natural note.
pub fn write_tone_wav(path: &Path) {
    let rate = 22050u32;
    let len = 22050usize;
    let fundamental = 440.0;
    let partials = [(1.0, 1.0), (2.0, 0.5), (3.0, 0.25), (4.0, 0.125)];
    let samples: Vec<i16> = (0..len)
        .map(|i| {
            let t = i as f64 / rate as f64;
            let env = (-t / 0.7).exp();
            let v: f64 = partials
                .iter()
                .map(|&(h, a)| a * (2.0 * std::f64::consts::PI * fundamental * h * t).sin())
                .sum();
            let v = 0.45 * env * v / 1.875;
            (v * 32767.0).round() as i16
        })
        .collect();
    std::fs::write(path, pcm16_wav_bytes(1, rate, &samples)).unwrap();
}

/// Writes the tone into `dir` (once) and returns its path.
pub fn tone_wav_in(dir: &Path) -> PathBuf {
    let path = dir.join("tone.wav");
    if !path.exists() {
        write_tone_wav(&path);
    }
    path
}

/// The five-signal reference corpus at length n. The WAV excerpt is read
/// from a tone generated under `wav_dir`.
pub fn corpus(n: usize, wav_dir: &Path) -> Vec<(String, Signal)> {
    corpus_specs(n, wav_dir)
        .into_iter()
        .map(|(name, spec)| (name, spec.build().unwrap()))
        .collect()
}

/// The same corpus as buildable specs for the experiment runners.
pub fn corpus_specs(n: usize, wav_dir: &Path) -> Vec<(String, randfb::montecarlo::SignalSpec)> {
    use randfb::montecarlo::SignalSpec;
    let wav = tone_wav_in(wav_dir);
    vec![
        ("impulse".into(), SignalSpec::Impulse { n }),
        ("constant".into(), SignalSpec::Constant { n }),
        (
            format!("sine({} cycles)", n / 4),
            SignalSpec::Sine { n, cycles: n / 4 },
        ),
        ("brownian(seed 7)".into(), SignalSpec::Brownian { n, seed: 7 }),
        (
            "wav excerpt".into(),
            SignalSpec::Wav {
                path: wav,
                n,
                channel_policy: ChannelPolicy::First,
            },
        ),
    ]
}
