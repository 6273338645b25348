//! Multi-sensor spectrum monitoring and client-aware channel selection.
//!
//! Sensors placed at the access point and at client locations report
//! per-bin power sweeps. Sweeps travel as CRC-protected binary frames
//! ([`frame`]) or as JSON lines ([`SensorSweep::to_json_line`]), are merged
//! per position ([`aggregate`]), scored per 2.4 GHz channel and reduced to a
//! channel decision ([`plan`]). [`sim`] synthesises sweeps for a scenario.

pub mod aggregate;
pub mod frame;
pub mod plan;
pub mod sim;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aggregate::{aggregate, AggregateMode, AggregatedSpectrum, Aggregator};
pub use frame::{encode_frame, parse_frame, FrameError};
pub use plan::{
    channel_center_mhz, channel_power_mw, overlap_weight, select_channel, ChannelPlan,
    ChannelScore, Objective, PlanMode,
};
pub use sim::{simulate_levels, simulate_sweeps, Client, Emitter, Scenario, SensorPosition};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("sweep has no bins")]
    EmptySweep,
    #[error("sweep has {0} bins; at most 65535 fit in a frame")]
    TooManyBins(usize),
    #[error("bin width must be positive")]
    ZeroBinWidth,
    #[error("grid mismatch: expected start {expected_start} kHz / width {expected_width} kHz / {expected_bins} bins, got {start} / {width} / {bins}")]
    GridMismatch {
        expected_start: u32,
        expected_width: u16,
        expected_bins: usize,
        start: u32,
        width: u16,
        bins: usize,
    },
    #[error("no sweeps to aggregate")]
    NoSweeps,
    #[error("EWMA factor must lie in (0, 1], got {0}")]
    BadAlpha(f64),
    #[error("sensor {sensor_id}: timestamp {timestamp_ms} precedes last update {last_ms}")]
    OutOfOrder {
        sensor_id: u16,
        timestamp_ms: u64,
        last_ms: u64,
    },
    #[error("channel {0} outside 1..=14")]
    BadChannel(u8),
    #[error("spectrum grid does not cover channel {channel} mask {lo_khz}–{hi_khz} kHz")]
    GridDoesNotCover {
        channel: u8,
        lo_khz: f64,
        hi_khz: f64,
    },
    #[error("no candidate channels")]
    NoCandidates,
    #[error("client-aware planning needs at least one client spectrum")]
    NoClients,
    #[error("invalid scenario: {0}")]
    BadScenario(String),
    #[error("malformed sweep record: {0}")]
    BadRecord(String),
}

/// One sensor's power reading per frequency bin, in whole dBm.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SensorSweep {
    pub sensor_id: u16,
    pub timestamp_ms: u64,
    pub start_khz: u32,
    pub bin_khz: u16,
    pub bins: Vec<i8>,
}

impl SensorSweep {
    pub fn validate(&self) -> Result<(), SpectrumError> {
        if self.bins.is_empty() {
            return Err(SpectrumError::EmptySweep);
        }
        if self.bins.len() > usize::from(u16::MAX) {
            return Err(SpectrumError::TooManyBins(self.bins.len()));
        }
        if self.bin_khz == 0 {
            return Err(SpectrumError::ZeroBinWidth);
        }
        Ok(())
    }

    /// Centre frequency of bin `i`, kHz.
    pub fn bin_center_khz(&self, i: usize) -> f64 {
        bin_center_khz(self.start_khz, self.bin_khz, i)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("sweep serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self, SpectrumError> {
        let sweep: Self =
            serde_json::from_str(line).map_err(|e| SpectrumError::BadRecord(e.to_string()))?;
        sweep.validate()?;
        Ok(sweep)
    }
}

pub(crate) fn bin_center_khz(start_khz: u32, bin_khz: u16, i: usize) -> f64 {
    f64::from(start_khz) + (i as f64 + 0.5) * f64::from(bin_khz)
}

/// Parses line-delimited sweep records, skipping blank lines.
pub fn read_sweep_lines(text: &str) -> Result<Vec<SensorSweep>, SpectrumError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(SensorSweep::from_json_line)
        .collect()
}

pub fn write_sweep_lines(sweeps: &[SensorSweep]) -> String {
    let mut out = String::new();
    for s in sweeps {
        out.push_str(&s.to_json_line());
        out.push('\n');
    }
    out
}

/// Rounds a dBm level to the nearest integer within the signed-byte range.
pub fn quantize_dbm(dbm: f64) -> i8 {
    dbm.round().clamp(-128.0, 127.0) as i8
}
