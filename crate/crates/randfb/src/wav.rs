//! Minimal RIFF/WAVE reader: 16-bit integer PCM and 32-bit IEEE float.
//!
//! This is deliberately a reader, not a codec: it walks the chunk list,
//! validates the `fmt ` chunk, and decodes the leading samples of the
//! `data` chunk into `f64` amplitudes in [-1, 1].

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WavError {
    #[error("cannot read file: {0}")]
    Unreadable(#[from] std::io::Error),

    #[error("not a RIFF/WAVE file")]
    NotWave,

    #[error("malformed wav: {0}")]
    Malformed(&'static str),

    #[error("unsupported wav encoding: format tag {format}, {bits} bits (need 16-bit PCM or 32-bit float)")]
    Unsupported { format: u16, bits: u16 },

    #[error("file holds {have} samples per channel but {need} were requested")]
    TooShort { have: usize, need: usize },

    #[error("requested excerpt is all zeros")]
    AllZeroExcerpt,
}

/// How multi-channel files are reduced to one channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelPolicy {
    /// Keep the first channel.
    First,
    /// Average all channels per frame.
    Mean,
}

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;

struct Format {
    tag: u16,
    channels: usize,
    bits: u16,
}

/// Reads the first `n` frames of a WAV file, channel-reduced per `policy`.
pub fn read_excerpt(path: &Path, n: usize, policy: ChannelPolicy) -> Result<Vec<f64>, WavError> {
    let bytes = fs::read(path)?;
    parse_excerpt(&bytes, n, policy)
}

pub(crate) fn parse_excerpt(
    bytes: &[u8],
    n: usize,
    policy: ChannelPolicy,
) -> Result<Vec<f64>, WavError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(WavError::NotWave);
    }

    let mut format: Option<Format> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .ok_or(WavError::Malformed("chunk size overflow"))?;
        if body_end > bytes.len() {
            return Err(WavError::Malformed("chunk extends past end of file"));
        }
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => format = Some(parse_format(body)?),
            b"data" => {
                let fmt = format
                    .as_ref()
                    .ok_or(WavError::Malformed("data chunk precedes fmt chunk"))?;
                return decode(body, fmt, n, policy);
            }
            _ => {}
        }
        // chunks are word-aligned
        pos = body_end + (size & 1);
    }
    Err(WavError::Malformed("no data chunk"))
}

fn parse_format(body: &[u8]) -> Result<Format, WavError> {
    if body.len() < 16 {
        return Err(WavError::Malformed("fmt chunk too small"));
    }
    let tag = u16::from_le_bytes(body[0..2].try_into().unwrap());
    let channels = u16::from_le_bytes(body[2..4].try_into().unwrap()) as usize;
    let bits = u16::from_le_bytes(body[14..16].try_into().unwrap());
    if channels == 0 {
        return Err(WavError::Malformed("zero channels"));
    }
    match (tag, bits) {
        (FORMAT_PCM, 16) | (FORMAT_IEEE_FLOAT, 32) => Ok(Format {
            tag,
            channels,
            bits,
        }),
        _ => Err(WavError::Unsupported { format: tag, bits }),
    }
}

fn decode(
    body: &[u8],
    fmt: &Format,
    n: usize,
    policy: ChannelPolicy,
) -> Result<Vec<f64>, WavError> {
    let bytes_per_sample = (fmt.bits / 8) as usize;
    let frame_size = bytes_per_sample * fmt.channels;
    let have = body.len() / frame_size;
    if have < n {
        return Err(WavError::TooShort { have, need: n });
    }

    let read_sample = |frame: usize, channel: usize| -> f64 {
        let off = frame * frame_size + channel * bytes_per_sample;
        match fmt.tag {
            FORMAT_PCM => {
                let v = i16::from_le_bytes(body[off..off + 2].try_into().unwrap());
                f64::from(v) / 32768.0
            }
            _ => {
                let v = f32::from_le_bytes(body[off..off + 4].try_into().unwrap());
                f64::from(v)
            }
        }
    };

    let samples: Vec<f64> = (0..n)
        .map(|frame| match policy {
            ChannelPolicy::First => read_sample(frame, 0),
            ChannelPolicy::Mean => {
                (0..fmt.channels).map(|c| read_sample(frame, c)).sum::<f64>()
                    / fmt.channels as f64
            }
        })
        .collect();

    if samples.iter().all(|&s| s == 0.0) {
        return Err(WavError::AllZeroExcerpt);
    }
    Ok(samples)
}
