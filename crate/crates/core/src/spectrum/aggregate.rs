//! Per-position merge of sweeps from one or more sensors.
//!
//! Max-hold keeps the bin-wise maximum of everything seen. EWMA smooths each
//! sensor's stream in milliwatts, `s ← α·x + (1−α)·s`, starting from the
//! first sweep, and reports the bin-wise maximum across sensors. Streams from
//! different sensors may be interleaved arbitrarily; each sensor's own sweeps
//! must arrive in timestamp order under EWMA.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{SensorSweep, SpectrumError};
use crate::rf::{dbm_to_mw, mw_to_dbm};

pub const DEFAULT_EWMA_ALPHA: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AggregateMode {
    MaxHold,
    Ewma { alpha: f64 },
}

impl AggregateMode {
    pub fn ewma_default() -> Self {
        Self::Ewma {
            alpha: DEFAULT_EWMA_ALPHA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct Grid {
    start_khz: u32,
    bin_khz: u16,
    n_bins: usize,
}

impl Grid {
    fn of(s: &SensorSweep) -> Self {
        Self {
            start_khz: s.start_khz,
            bin_khz: s.bin_khz,
            n_bins: s.bins.len(),
        }
    }

    fn check(&self, s: &SensorSweep) -> Result<(), SpectrumError> {
        let other = Self::of(s);
        if *self == other {
            Ok(())
        } else {
            Err(mismatch(self, &other))
        }
    }
}

fn mismatch(expected: &Grid, got: &Grid) -> SpectrumError {
    SpectrumError::GridMismatch {
        expected_start: expected.start_khz,
        expected_width: expected.bin_khz,
        expected_bins: expected.n_bins,
        start: got.start_khz,
        width: got.bin_khz,
        bins: got.n_bins,
    }
}

/// Merged spectrum for one position on a common bin grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatedSpectrum {
    pub position_id: String,
    pub mode: AggregateMode,
    pub start_khz: u32,
    pub bin_khz: u16,
    /// dBm per bin.
    pub bins: Vec<f64>,
    pub last_update_ms: BTreeMap<u16, u64>,
}

impl AggregatedSpectrum {
    /// A spectrum with every bin at `level_dbm`; handy for fixtures.
    pub fn flat(position_id: &str, start_khz: u32, bin_khz: u16, n: usize, level_dbm: f64) -> Self {
        Self {
            position_id: position_id.to_string(),
            mode: AggregateMode::MaxHold,
            start_khz,
            bin_khz,
            bins: vec![level_dbm; n],
            last_update_ms: BTreeMap::new(),
        }
    }

    pub fn bin_center_khz(&self, i: usize) -> f64 {
        super::bin_center_khz(self.start_khz, self.bin_khz, i)
    }

    /// Bin-wise maximum of two max-hold spectra on the same grid.
    pub fn merge_max(&self, other: &Self) -> Result<Self, SpectrumError> {
        let (a, b) = (self.grid(), other.grid());
        if a != b {
            return Err(mismatch(&a, &b));
        }
        let mut last_update_ms = self.last_update_ms.clone();
        for (&id, &t) in &other.last_update_ms {
            let e = last_update_ms.entry(id).or_insert(t);
            *e = (*e).max(t);
        }
        Ok(Self {
            position_id: self.position_id.clone(),
            mode: AggregateMode::MaxHold,
            start_khz: self.start_khz,
            bin_khz: self.bin_khz,
            bins: self
                .bins
                .iter()
                .zip(&other.bins)
                .map(|(x, y)| x.max(*y))
                .collect(),
            last_update_ms,
        })
    }

    fn grid(&self) -> Grid {
        Grid {
            start_khz: self.start_khz,
            bin_khz: self.bin_khz,
            n_bins: self.bins.len(),
        }
    }
}

/// Incremental aggregation state for one position.
#[derive(Debug, Clone)]
pub struct Aggregator {
    position_id: String,
    mode: AggregateMode,
    grid: Option<Grid>,
    max_hold: Vec<f64>,
    smoothed_mw: BTreeMap<u16, Vec<f64>>,
    last_update_ms: BTreeMap<u16, u64>,
}

impl Aggregator {
    pub fn new(position_id: impl Into<String>, mode: AggregateMode) -> Result<Self, SpectrumError> {
        if let AggregateMode::Ewma { alpha } = mode {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(SpectrumError::BadAlpha(alpha));
            }
        }
        Ok(Self {
            position_id: position_id.into(),
            mode,
            grid: None,
            max_hold: Vec::new(),
            smoothed_mw: BTreeMap::new(),
            last_update_ms: BTreeMap::new(),
        })
    }

    pub fn push(&mut self, sweep: &SensorSweep) -> Result<(), SpectrumError> {
        sweep.validate()?;
        match self.grid {
            Some(g) => g.check(sweep)?,
            None => {
                self.grid = Some(Grid::of(sweep));
                self.max_hold = vec![f64::NEG_INFINITY; sweep.bins.len()];
            }
        }
        let last = self.last_update_ms.get(&sweep.sensor_id).copied();
        match self.mode {
            AggregateMode::MaxHold => {
                for (acc, &b) in self.max_hold.iter_mut().zip(&sweep.bins) {
                    *acc = acc.max(f64::from(b));
                }
            }
            AggregateMode::Ewma { alpha } => {
                if let Some(last_ms) = last.filter(|&l| sweep.timestamp_ms < l) {
                    return Err(SpectrumError::OutOfOrder {
                        sensor_id: sweep.sensor_id,
                        timestamp_ms: sweep.timestamp_ms,
                        last_ms,
                    });
                }
                let fresh = sweep.bins.iter().map(|&b| dbm_to_mw(f64::from(b)));
                match self.smoothed_mw.get_mut(&sweep.sensor_id) {
                    Some(state) => {
                        for (s, x) in state.iter_mut().zip(fresh) {
                            *s = alpha * x + (1.0 - alpha) * *s;
                        }
                    }
                    None => {
                        self.smoothed_mw.insert(sweep.sensor_id, fresh.collect());
                    }
                }
            }
        }
        let t = last.map_or(sweep.timestamp_ms, |l| l.max(sweep.timestamp_ms));
        self.last_update_ms.insert(sweep.sensor_id, t);
        Ok(())
    }

    pub fn snapshot(&self) -> Result<AggregatedSpectrum, SpectrumError> {
        let grid = self.grid.ok_or(SpectrumError::NoSweeps)?;
        let bins = match self.mode {
            AggregateMode::MaxHold => self.max_hold.clone(),
            AggregateMode::Ewma { .. } => (0..grid.n_bins)
                .map(|i| {
                    let peak = self
                        .smoothed_mw
                        .values()
                        .map(|s| s[i])
                        .fold(0.0f64, f64::max);
                    mw_to_dbm(peak)
                })
                .collect(),
        };
        Ok(AggregatedSpectrum {
            position_id: self.position_id.clone(),
            mode: self.mode,
            start_khz: grid.start_khz,
            bin_khz: grid.bin_khz,
            bins,
            last_update_ms: self.last_update_ms.clone(),
        })
    }
}

/// Aggregates `sweeps` in the given order.
pub fn aggregate(
    position_id: &str,
    sweeps: &[SensorSweep],
    mode: AggregateMode,
) -> Result<AggregatedSpectrum, SpectrumError> {
    let mut agg = Aggregator::new(position_id, mode)?;
    for s in sweeps {
        agg.push(s)?;
    }
    agg.snapshot()
}
