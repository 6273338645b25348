//! Free-space propagation and link budget arithmetic.
//!
//! All stored powers are in dBm and all stored gains are linear. Power ratios
//! convert with `10·log10`, field and distance ratios with `20·log10`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Speed of light in vacuum, m/s (exact SI value).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RfError {
    #[error("frequency must be positive and finite, got {0} Hz")]
    NonPositiveFrequency(f64),
    #[error("antenna gain must be positive and finite, got {0}")]
    NonPositiveGain(f64),
    #[error("distance must be positive and finite, got {0} m")]
    NonPositiveDistance(f64),
    #[error("near field: distance {distance_m} m is below one wavelength ({wavelength_m} m)")]
    NearField { distance_m: f64, wavelength_m: f64 },
}

/// Carrier frequency in hertz.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Frequency(f64);

impl Frequency {
    pub fn from_hz(hertz: f64) -> Result<Self, RfError> {
        if hertz > 0.0 && hertz.is_finite() {
            Ok(Self(hertz))
        } else {
            Err(RfError::NonPositiveFrequency(hertz))
        }
    }

    pub fn from_mhz(mhz: f64) -> Result<Self, RfError> {
        Self::from_hz(mhz * 1e6)
    }

    pub fn hertz(self) -> f64 {
        self.0
    }

    pub fn wavelength_m(self) -> f64 {
        SPEED_OF_LIGHT / self.0
    }
}

/// Wavelength of `hertz` in metres.
pub fn wavelength(hertz: f64) -> Result<f64, RfError> {
    Frequency::from_hz(hertz).map(Frequency::wavelength_m)
}

/// Boresight antenna gain, stored linear.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct AntennaGain(f64);

impl AntennaGain {
    pub const ISOTROPIC: AntennaGain = AntennaGain(1.0);

    pub fn from_linear(linear: f64) -> Result<Self, RfError> {
        if linear > 0.0 && linear.is_finite() {
            Ok(Self(linear))
        } else {
            Err(RfError::NonPositiveGain(linear))
        }
    }

    pub fn from_dbi(dbi: f64) -> Result<Self, RfError> {
        Self::from_linear(db_to_linear(dbi))
    }

    pub fn linear(self) -> f64 {
        self.0
    }

    pub fn dbi(self) -> f64 {
        linear_to_db(self.0)
    }

    /// Effective aperture `G·λ²/(4π)` in square metres.
    pub fn effective_aperture_m2(self, frequency: Frequency) -> f64 {
        let lambda = frequency.wavelength_m();
        self.0 * lambda * lambda / (4.0 * PI)
    }
}

/// Far-field guard applied by the propagation formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FarFieldGuard {
    /// Reject distances below one wavelength.
    #[default]
    Enforced,
    /// Evaluate the formula at any positive distance.
    Disabled,
}

/// One radio path: separation and carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    distance_m: f64,
    frequency: Frequency,
    #[serde(default)]
    guard: FarFieldGuard,
}

impl LinkGeometry {
    pub fn new(distance_m: f64, frequency: Frequency) -> Result<Self, RfError> {
        if !(distance_m > 0.0 && distance_m.is_finite()) {
            return Err(RfError::NonPositiveDistance(distance_m));
        }
        Ok(Self {
            distance_m,
            frequency,
            guard: FarFieldGuard::Enforced,
        })
    }

    /// Same geometry with the near-field check switched off, for identity
    /// checks at `R = λ/(4π)`.
    pub fn without_far_field_guard(mut self) -> Self {
        self.guard = FarFieldGuard::Disabled;
        self
    }

    pub fn distance_m(&self) -> f64 {
        self.distance_m
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn wavelength_m(&self) -> f64 {
        self.frequency.wavelength_m()
    }

    fn checked_distance(&self) -> Result<f64, RfError> {
        let wavelength_m = self.wavelength_m();
        if self.guard == FarFieldGuard::Enforced && self.distance_m < wavelength_m {
            return Err(RfError::NearField {
                distance_m: self.distance_m,
                wavelength_m,
            });
        }
        Ok(self.distance_m)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_linear(dbm)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    linear_to_db(mw)
}

/// Free-space path loss `20·log10(4πR/λ)` in dB.
pub fn fspl_db(geom: &LinkGeometry) -> Result<f64, RfError> {
    let r = geom.checked_distance()?;
    Ok(20.0 * (4.0 * PI * r / geom.wavelength_m()).log10())
}

/// Input and output of a single Friis link computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub tx_gain: AntennaGain,
    pub rx_gain: AntennaGain,
    pub geometry: LinkGeometry,
    rx_power_dbm: f64,
}

impl LinkBudget {
    pub fn new(
        tx_power_dbm: f64,
        tx_gain: AntennaGain,
        rx_gain: AntennaGain,
        geometry: LinkGeometry,
    ) -> Result<Self, RfError> {
        let mut budget = Self {
            tx_power_dbm,
            tx_gain,
            rx_gain,
            geometry,
            rx_power_dbm: f64::NAN,
        };
        budget.rx_power_dbm = friis_received_dbm(&budget)?;
        Ok(budget)
    }

    pub fn rx_power_dbm(&self) -> f64 {
        self.rx_power_dbm
    }

    pub fn fspl_db(&self) -> Result<f64, RfError> {
        fspl_db(&self.geometry)
    }

    /// Rebuilds the budget with a different receive gain.
    pub fn with_rx_gain(&self, rx_gain: AntennaGain) -> Result<Self, RfError> {
        Self::new(self.tx_power_dbm, self.tx_gain, rx_gain, self.geometry)
    }
}

/// `Pt + Gt + Gr − FSPL`, in dBm. Ignores any stored output on `budget`.
pub fn friis_received_dbm(budget: &LinkBudget) -> Result<f64, RfError> {
    let loss = fspl_db(&budget.geometry)?;
    Ok(budget.tx_power_dbm + budget.tx_gain.dbi() + budget.rx_gain.dbi() - loss)
}

/// Fraction of radiated power captured by the receiving antenna:
/// `Gt·A_eff/(4πR²)` with `A_eff = Gr·λ²/(4π)`, i.e. `Gt·Gr·(λ/(4πR))²`.
pub fn power_utilization(
    gt: AntennaGain,
    gr: AntennaGain,
    geom: &LinkGeometry,
) -> Result<f64, RfError> {
    let r = geom.checked_distance()?;
    // product of gains first so swapping ends is bit-identical
    let scale = geom.wavelength_m() / (4.0 * PI * r);
    Ok(gt.linear() * gr.linear() * scale * scale)
}

/// Distance multiplier that keeps received power constant in free space
/// after a gain change of `delta_db`.
pub fn range_ratio_from_gain_delta(delta_db: f64) -> f64 {
    10f64.powf(delta_db / 20.0)
}
