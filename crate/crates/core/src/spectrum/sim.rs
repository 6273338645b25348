//! Deterministic sensor-sweep synthesis for a planned deployment.
//!
//! Each emitter's power is spread flat over the 22 one-MHz bins of its
//! channel mask and attenuated by free-space loss at the channel centre plus
//! one log-normal shadowing draw per (sensor, emitter) link. Contributions
//! add in milliwatts and are floored at the noise level.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::plan::{channel_center_mhz, MASK_HALF_WIDTH_MHZ};
use super::{bin_center_khz, quantize_dbm, SensorSweep, SpectrumError};
use crate::rf::{dbm_to_mw, fspl_db, mw_to_dbm, Frequency, LinkGeometry};

pub const SIM_START_KHZ: u32 = 2_400_000;
pub const SIM_BIN_KHZ: u16 = 1000;
pub const SIM_BINS: usize = 100;
pub const AP_SENSOR_ID: u16 = 0;

fn default_noise_floor() -> f64 {
    -95.0
}

fn default_sigma() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Client {
    pub id: u16,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Emitter {
    pub channel: u8,
    pub tx_power_dbm: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub ap_position: (f64, f64),
    #[serde(default)]
    pub clients: Vec<Client>,
    #[serde(default)]
    pub emitters: Vec<Emitter>,
    #[serde(default = "default_noise_floor")]
    pub noise_floor_dbm: f64,
    #[serde(default = "default_sigma")]
    pub shadowing_sigma_db: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorPosition {
    pub sensor_id: u16,
    pub position_id: String,
    pub x: f64,
    pub y: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), SpectrumError> {
        let bad = |m: String| Err(SpectrumError::BadScenario(m));
        let finite = |v: f64| v.is_finite();
        if !finite(self.ap_position.0) || !finite(self.ap_position.1) {
            return bad("AP position is not finite".into());
        }
        let mut ids = BTreeSet::new();
        for c in &self.clients {
            if !finite(c.x) || !finite(c.y) {
                return bad(format!("client {} position is not finite", c.id));
            }
            if c.id == AP_SENSOR_ID || !ids.insert(c.id) {
                return bad(format!("client id {} is reserved or duplicated", c.id));
            }
        }
        for e in &self.emitters {
            if !(1..=14).contains(&e.channel) {
                return bad(format!("emitter channel {} outside 1..=14", e.channel));
            }
            if !finite(e.x) || !finite(e.y) || !finite(e.tx_power_dbm) {
                return bad("emitter fields must be finite".into());
            }
        }
        if !finite(self.noise_floor_dbm) {
            return bad("noise floor is not finite".into());
        }
        if !(self.shadowing_sigma_db >= 0.0 && finite(self.shadowing_sigma_db)) {
            return bad(format!(
                "shadowing sigma {} is negative",
                self.shadowing_sigma_db
            ));
        }
        Ok(())
    }

    /// Sensor at the AP (id 0, position "ap") followed by one per client
    /// (position "client-<id>").
    pub fn sensor_positions(&self) -> Vec<SensorPosition> {
        let ap = SensorPosition {
            sensor_id: AP_SENSOR_ID,
            position_id: "ap".to_string(),
            x: self.ap_position.0,
            y: self.ap_position.1,
        };
        std::iter::once(ap)
            .chain(self.clients.iter().map(|c| SensorPosition {
                sensor_id: c.id,
                position_id: format!("client-{}", c.id),
                x: c.x,
                y: c.y,
            }))
            .collect()
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Shadowing in dB for one link; depends only on its arguments.
pub fn shadowing_db(seed: u64, sensor_id: u16, emitter_index: usize, sigma_db: f64) -> f64 {
    if sigma_db == 0.0 {
        return 0.0;
    }
    let key = splitmix(splitmix(splitmix(seed) ^ u64::from(sensor_id)) ^ emitter_index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    Normal::new(0.0, sigma_db)
        .expect("sigma validated")
        .sample(&mut rng)
}

/// Unquantised per-bin levels, dBm, for each position.
pub fn simulate_levels(
    scenario: &Scenario,
    positions: &[SensorPosition],
) -> Result<Vec<Vec<f64>>, SpectrumError> {
    scenario.validate()?;
    let mask_bins = |ch: u8| -> Vec<usize> {
        let center = channel_center_mhz(ch).expect("validated") * 1000.0;
        (0..SIM_BINS)
            .filter(|&i| {
                (bin_center_khz(SIM_START_KHZ, SIM_BIN_KHZ, i) - center).abs()
                    <= MASK_HALF_WIDTH_MHZ * 1000.0
            })
            .collect()
    };
    let masks: Vec<Vec<usize>> = scenario
        .emitters
        .iter()
        .map(|e| mask_bins(e.channel))
        .collect();
    positions
        .iter()
        .map(|p| {
            let mut mw = vec![0.0; SIM_BINS];
            for (k, (e, bins)) in scenario.emitters.iter().zip(&masks).enumerate() {
                let freq = Frequency::from_mhz(channel_center_mhz(e.channel)?)
                    .expect("channel centre positive");
                let distance = (e.x - p.x).hypot(e.y - p.y).max(freq.wavelength_m());
                let geom = LinkGeometry::new(distance, freq)
                    .map_err(|err| SpectrumError::BadScenario(err.to_string()))?;
                let loss =
                    fspl_db(&geom).map_err(|err| SpectrumError::BadScenario(err.to_string()))?;
                let shadow =
                    shadowing_db(scenario.seed, p.sensor_id, k, scenario.shadowing_sigma_db);
                let total_dbm = e.tx_power_dbm - loss + shadow;
                let per_bin = dbm_to_mw(total_dbm) / bins.len() as f64;
                for &i in bins {
                    mw[i] += per_bin;
                }
            }
            Ok(mw
                .into_iter()
                .map(|m| {
                    if m > 0.0 {
                        mw_to_dbm(m).max(scenario.noise_floor_dbm)
                    } else {
                        scenario.noise_floor_dbm
                    }
                })
                .collect())
        })
        .collect()
}

/// One sweep per position, stamped `t_ms`, on the 2400–2500 MHz 1 MHz grid.
pub fn simulate_sweeps(
    scenario: &Scenario,
    positions: &[SensorPosition],
    t_ms: u64,
) -> Result<Vec<SensorSweep>, SpectrumError> {
    let levels = simulate_levels(scenario, positions)?;
    Ok(positions
        .iter()
        .zip(levels)
        .map(|(p, lv)| SensorSweep {
            sensor_id: p.sensor_id,
            timestamp_ms: t_ms,
            start_khz: SIM_START_KHZ,
            bin_khz: SIM_BIN_KHZ,
            bins: lv.into_iter().map(quantize_dbm).collect(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty() -> Scenario {
        Scenario {
            ap_position: (0.0, 0.0),
            clients: vec![Client {
                id: 1,
                x: 10.0,
                y: 0.0,
            }],
            emitters: vec![],
            noise_floor_dbm: -95.0,
            shadowing_sigma_db: 4.0,
            seed: 1,
        }
    }

    #[test]
    fn no_emitters_gives_floor() {
        let s = empty();
        let sweeps = simulate_sweeps(&s, &s.sensor_positions(), 0).unwrap();
        assert_eq!(sweeps.len(), 2);
        for sw in sweeps {
            assert_eq!(sw.bins, vec![-95i8; SIM_BINS]);
        }
    }

    #[test]
    fn single_emitter_level() {
        let mut s = empty();
        s.shadowing_sigma_db = 0.0;
        s.emitters.push(Emitter {
            channel: 6,
            tx_power_dbm: 20.0,
            x: 10.0,
            y: 0.0,
        });
        let levels = simulate_levels(&s, &s.sensor_positions()).unwrap();
        let ap = &levels[0];
        // channel 6 mask covers bins 26..=47
        for (i, &v) in ap.iter().enumerate() {
            if (26..=47).contains(&i) {
                assert!((v + 53.60).abs() < 0.01, "bin {i}: {v}");
            } else {
                assert_eq!(v, -95.0);
            }
        }
        let sweeps = simulate_sweeps(&s, &s.sensor_positions(), 0).unwrap();
        assert_eq!(sweeps[0].bins[30], -54);
        // client co-located with the emitter: distance clamps to one wavelength,
        // 20 − 20·log10(4π) − 10·log10(22)
        assert!((levels[1][30] + 15.40).abs() < 0.01, "{}", levels[1][30]);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let mut s = empty();
        s.emitters.push(Emitter {
            channel: 11,
            tx_power_dbm: 15.0,
            x: 30.0,
            y: 5.0,
        });
        let pos = s.sensor_positions();
        let a = simulate_sweeps(&s, &pos, 7).unwrap();
        assert_eq!(a, simulate_sweeps(&s, &pos, 7).unwrap());
        s.seed = 2;
        assert_ne!(a, simulate_sweeps(&s, &pos, 7).unwrap());
    }

    #[test]
    fn shadowing_constant_per_link() {
        let a = shadowing_db(5, 1, 0, 4.0);
        assert_eq!(a, shadowing_db(5, 1, 0, 4.0));
        assert_ne!(a, shadowing_db(5, 2, 0, 4.0));
        assert_ne!(a, shadowing_db(5, 1, 1, 4.0));
        assert_eq!(shadowing_db(5, 1, 0, 0.0), 0.0);
    }

    #[test]
    fn shadowing_statistics() {
        let draws: Vec<f64> = (0..4000).map(|k| shadowing_db(99, 3, k, 4.0)).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
        assert!(mean.abs() < 0.3, "{mean}");
        assert!((var.sqrt() - 4.0).abs() < 0.3, "{}", var.sqrt());
    }

    #[test]
    fn invalid_scenarios() {
        let mut s = empty();
        s.emitters.push(Emitter {
            channel: 15,
            tx_power_dbm: 0.0,
            x: 0.0,
            y: 0.0,
        });
        assert!(simulate_sweeps(&s, &s.sensor_positions(), 0).is_err());
        let mut s = empty();
        s.clients.push(Client {
            id: 1,
            x: 0.0,
            y: 0.0,
        });
        assert!(s.validate().is_err());
        let mut s = empty();
        s.shadowing_sigma_db = -1.0;
        assert!(s.validate().is_err());
    }
}
