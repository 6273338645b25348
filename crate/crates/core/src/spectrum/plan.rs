//! Channel scoring and selection for the 2.4 GHz band.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{AggregatedSpectrum, SpectrumError};
use crate::rf::dbm_to_mw;

/// Half-width of the flat channel mask, MHz.
pub const MASK_HALF_WIDTH_MHZ: f64 = 11.0;
/// Non-overlapping channels preferred on ties.
pub const PREFERRED_CHANNELS: [u8; 3] = [1, 6, 11];

pub fn channel_center_mhz(channel: u8) -> Result<f64, SpectrumError> {
    match channel {
        1..=13 => Ok(2407.0 + 5.0 * f64::from(channel)),
        14 => Ok(2484.0),
        other => Err(SpectrumError::BadChannel(other)),
    }
}

/// Total power, mW, of the bins whose centres lie within ±11 MHz of the
/// channel centre.
pub fn channel_power_mw(spec: &AggregatedSpectrum, channel: u8) -> Result<f64, SpectrumError> {
    let center_khz = channel_center_mhz(channel)? * 1000.0;
    let half_khz = MASK_HALF_WIDTH_MHZ * 1000.0;
    let (lo_khz, hi_khz) = (center_khz - half_khz, center_khz + half_khz);
    let grid_lo = f64::from(spec.start_khz);
    let grid_hi = grid_lo + spec.bins.len() as f64 * f64::from(spec.bin_khz);
    if spec.bin_khz == 0 || grid_lo > lo_khz || grid_hi < hi_khz {
        return Err(SpectrumError::GridDoesNotCover {
            channel,
            lo_khz,
            hi_khz,
        });
    }
    Ok(spec
        .bins
        .iter()
        .enumerate()
        .filter(|(i, _)| (spec.bin_center_khz(*i) - center_khz).abs() <= half_khz)
        .map(|(_, &dbm)| dbm_to_mw(dbm))
        .sum())
}

/// Coupling between channels `channel_distance` apart under a triangular
/// 22 MHz mask on the 5 MHz raster.
pub fn overlap_weight(channel_distance: u32) -> f64 {
    let d = f64::from(channel_distance);
    ((22.0 - 5.0 * d) / 22.0).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanMode {
    /// Only the access point's own spectrum is consulted.
    ApOnly,
    /// The access point and every client position are consulted.
    ClientAware,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Worst position's in-channel power.
    #[default]
    Minimax,
    /// Weighted sum of in-channel power; positions absent from the map
    /// weigh 1.
    WeightedSum(BTreeMap<String, f64>),
}

impl Objective {
    fn evaluate(&self, per_position_mw: &BTreeMap<String, f64>) -> f64 {
        match self {
            Objective::Minimax => per_position_mw.values().copied().fold(0.0, f64::max),
            Objective::WeightedSum(weights) => per_position_mw
                .iter()
                .map(|(id, mw)| weights.get(id).copied().unwrap_or(1.0) * mw)
                .sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelScore {
    pub per_position_mw: BTreeMap<String, f64>,
    pub objective: f64,
    pub ap_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelPlan {
    pub chosen_channel: u8,
    pub per_channel_scores: BTreeMap<u8, ChannelScore>,
    pub mode: PlanMode,
}

/// Candidate ordering: objective, then the AP's own reading, then the
/// non-overlapping set, then channel number.
fn rank(a: (u8, &ChannelScore), b: (u8, &ChannelScore)) -> Ordering {
    let preferred = |c: u8| !PREFERRED_CHANNELS.contains(&c);
    a.1.objective
        .total_cmp(&b.1.objective)
        .then(a.1.ap_mw.total_cmp(&b.1.ap_mw))
        .then(preferred(a.0).cmp(&preferred(b.0)))
        .then(a.0.cmp(&b.0))
}

/// Scores every candidate and picks the best.
pub fn select_channel(
    ap: &AggregatedSpectrum,
    clients: &BTreeMap<String, AggregatedSpectrum>,
    mode: PlanMode,
    candidates: &BTreeSet<u8>,
    objective: &Objective,
) -> Result<ChannelPlan, SpectrumError> {
    if candidates.is_empty() {
        return Err(SpectrumError::NoCandidates);
    }
    if mode == PlanMode::ClientAware && clients.is_empty() {
        return Err(SpectrumError::NoClients);
    }
    let mut per_channel_scores = BTreeMap::new();
    for &ch in candidates {
        let ap_mw = channel_power_mw(ap, ch)?;
        let mut per_position_mw = BTreeMap::from([(ap.position_id.clone(), ap_mw)]);
        if mode == PlanMode::ClientAware {
            for (id, spectrum) in clients {
                per_position_mw.insert(id.clone(), channel_power_mw(spectrum, ch)?);
            }
        }
        let objective = objective.evaluate(&per_position_mw);
        per_channel_scores.insert(
            ch,
            ChannelScore {
                per_position_mw,
                objective,
                ap_mw,
            },
        );
    }
    let chosen_channel = per_channel_scores
        .iter()
        .min_by(|a, b| rank((*a.0, a.1), (*b.0, b.1)))
        .map(|(&ch, _)| ch)
        .ok_or(SpectrumError::NoCandidates)?;
    Ok(ChannelPlan {
        chosen_channel,
        per_channel_scores,
        mode,
    })
}

/// Every channel 1–14.
pub fn all_channels() -> BTreeSet<u8> {
    (1..=14).collect()
}
