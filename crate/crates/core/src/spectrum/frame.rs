//! Binary sensor frame.
//!
//! ```text
//! offset size field
//!      0    2 magic 0x57 0x58 ("WX")
//!      2    1 version (1)
//!      3    2 sensor_id
//!      5    8 timestamp_ms
//!     13    4 start_khz
//!     17    2 bin_khz
//!     19    2 n_bins
//!     21    n bins, one signed byte each
//!   21+n    4 CRC-32 (IEEE, reflected) of bytes [0, 21+n)
//! ```
//!
//! Multi-byte fields are little-endian.

use thiserror::Error;

use super::{SensorSweep, SpectrumError};

pub const MAGIC: [u8; 2] = [0x57, 0x58];
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 21;
pub const CRC_LEN: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("bad magic {0:02x} {1:02x}")]
    BadMagic(u8, u8),
    #[error("unsupported frame version {0}")]
    UnsupportedVersion(u8),
    #[error("frame length {actual} does not match expected {expected}")]
    Truncated { expected: usize, actual: usize },
    #[error("CRC mismatch: frame carries {stored:08x}, computed {computed:08x}")]
    Integrity { stored: u32, computed: u32 },
    #[error("frame declares zero bins")]
    EmptyPayload,
    #[error("frame declares zero bin width")]
    ZeroBinWidth,
}

pub fn encode_frame(sweep: &SensorSweep) -> Result<Vec<u8>, SpectrumError> {
    sweep.validate()?;
    let n = sweep.bins.len();
    let mut out = Vec::with_capacity(HEADER_LEN + n + CRC_LEN);
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&sweep.sensor_id.to_le_bytes());
    out.extend_from_slice(&sweep.timestamp_ms.to_le_bytes());
    out.extend_from_slice(&sweep.start_khz.to_le_bytes());
    out.extend_from_slice(&sweep.bin_khz.to_le_bytes());
    out.extend_from_slice(&(n as u16).to_le_bytes());
    out.extend(sweep.bins.iter().map(|&b| b as u8));
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

fn le<const N: usize>(bytes: &[u8], at: usize) -> [u8; N] {
    bytes[at..at + N].try_into().expect("bounds checked")
}

pub fn parse_frame(bytes: &[u8]) -> Result<SensorSweep, FrameError> {
    let min = HEADER_LEN + CRC_LEN;
    if bytes.len() < min {
        return Err(FrameError::Truncated {
            expected: min,
            actual: bytes.len(),
        });
    }
    if bytes[..2] != MAGIC {
        return Err(FrameError::BadMagic(bytes[0], bytes[1]));
    }
    if bytes[2] != VERSION {
        return Err(FrameError::UnsupportedVersion(bytes[2]));
    }
    let n = usize::from(u16::from_le_bytes(le(bytes, 19)));
    let expected = HEADER_LEN + n + CRC_LEN;
    if bytes.len() != expected {
        return Err(FrameError::Truncated {
            expected,
            actual: bytes.len(),
        });
    }
    let body = &bytes[..HEADER_LEN + n];
    let stored = u32::from_le_bytes(le(bytes, HEADER_LEN + n));
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(FrameError::Integrity { stored, computed });
    }
    if n == 0 {
        return Err(FrameError::EmptyPayload);
    }
    let bin_khz = u16::from_le_bytes(le(bytes, 17));
    if bin_khz == 0 {
        return Err(FrameError::ZeroBinWidth);
    }
    Ok(SensorSweep {
        sensor_id: u16::from_le_bytes(le(bytes, 3)),
        timestamp_ms: u64::from_le_bytes(le(bytes, 5)),
        start_khz: u32::from_le_bytes(le(bytes, 13)),
        bin_khz,
        bins: bytes[HEADER_LEN..HEADER_LEN + n]
            .iter()
            .map(|&b| b as i8)
            .collect(),
    })
}

/// Splits a byte stream of back-to-back frames.
pub fn parse_frames(mut bytes: &[u8]) -> Result<Vec<SensorSweep>, FrameError> {
    let mut out = Vec::new();
    while !bytes.is_empty() {
        if bytes.len() < HEADER_LEN {
            return Err(FrameError::Truncated {
                expected: HEADER_LEN + CRC_LEN,
                actual: bytes.len(),
            });
        }
        let n = usize::from(u16::from_le_bytes(le(bytes, 19)));
        let len = (HEADER_LEN + n + CRC_LEN).min(bytes.len());
        out.push(parse_frame(&bytes[..len])?);
        bytes = &bytes[len..];
    }
    Ok(out)
}
