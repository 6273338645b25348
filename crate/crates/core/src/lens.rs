//! Accelerating metal-plate lens.
//!
//! Between parallel plates spaced `a` apart the TE₁ mode travels faster than
//! light, so the stack behaves as a medium with index `n = sqrt(1 − (λ/2a)²) < 1`.
//! A lens of such material is thicker at the rim than at the centre; its
//! illuminated face follows the ellipse `r(θ) = f·(1−n)/(1 − n·cosθ)` in polar
//! coordinates about the feed (at a focus), which equalises the electrical
//! path from the feed to a plane behind the lens. The face closes in on the
//! feed as θ grows.
//!
//! The link-level effect of mounting a lens on an access point is modelled as
//! a receive-gain uplift, a throughput multiplier and a hard shadow sector.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rf::{range_ratio_from_gain_delta, AntennaGain, Frequency, LinkBudget, RfError};

/// Default gain uplift, dB: middle of the measured 5–7 dB band.
pub const DEFAULT_GAIN_UPLIFT_DB: f64 = 6.0;
/// Default fractional throughput gain.
pub const DEFAULT_THROUGHPUT_UPLIFT: f64 = 0.04;
/// Default shadow attenuation, dB.
pub const DEFAULT_SHADING_ATTENUATION_DB: f64 = 10.0;
/// Bisection tolerance on the transverse coordinate, metres.
pub const PROFILE_TOLERANCE_M: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LensError {
    #[error("plate spacing {spacing_m} m is at or below cutoff (λ/2 = {half_wavelength_m} m)")]
    BelowCutoff {
        spacing_m: f64,
        half_wavelength_m: f64,
    },
    #[error("effective index must lie in (0, 1), got {0}")]
    IndexOutOfRange(f64),
    #[error("angle {0}° outside [-90°, 90°]")]
    AngleOutOfRange(f64),
    #[error("aperture half-angle must lie in (0°, 90°), got {0}°")]
    BadAperture(f64),
    #[error("aperture half-angle {half_angle_deg}° exceeds the profile fold at {fold_deg}°")]
    ApertureBeyondFold { half_angle_deg: f64, fold_deg: f64 },
    #[error("focal length must be positive, got {0} m")]
    BadFocalLength(f64),
    #[error("transverse offset {y_m} m exceeds aperture half-height {limit_m} m")]
    OutsideAperture { y_m: f64, limit_m: f64 },
    #[error("invalid lens effect: {0}")]
    BadEffect(String),
    #[error(transparent)]
    Rf(#[from] RfError),
}

/// Effective refraction index of a parallel-plate medium with spacing
/// `spacing_m` at `frequency`.
pub fn effective_index(spacing_m: f64, frequency: Frequency) -> Result<f64, LensError> {
    let half_wavelength_m = frequency.wavelength_m() / 2.0;
    if !(spacing_m > half_wavelength_m) || !spacing_m.is_finite() {
        return Err(LensError::BelowCutoff {
            spacing_m,
            half_wavelength_m,
        });
    }
    let ratio = half_wavelength_m / spacing_m;
    Ok((1.0 - ratio * ratio).sqrt())
}

/// Polar radius of the lens face at angle `theta_deg` off axis.
pub fn profile_radius(focal_m: f64, index: f64, theta_deg: f64) -> Result<f64, LensError> {
    if !(index > 0.0 && index < 1.0) {
        return Err(LensError::IndexOutOfRange(index));
    }
    if !(theta_deg.abs() <= 90.0) {
        return Err(LensError::AngleOutOfRange(theta_deg));
    }
    Ok(radius_unchecked(focal_m, index, theta_deg.to_radians()))
}

fn radius_unchecked(focal_m: f64, index: f64, theta_rad: f64) -> f64 {
    focal_m * (1.0 - index) / (1.0 - index * theta_rad.cos())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensSpec {
    pub plate_spacing_m: f64,
    pub design_frequency: Frequency,
    pub focal_length_m: f64,
    pub aperture_half_angle_deg: f64,
}

impl LensSpec {
    pub fn new(
        plate_spacing_m: f64,
        design_frequency: Frequency,
        focal_length_m: f64,
        aperture_half_angle_deg: f64,
    ) -> Result<Self, LensError> {
        effective_index(plate_spacing_m, design_frequency)?;
        if !(focal_length_m > 0.0 && focal_length_m.is_finite()) {
            return Err(LensError::BadFocalLength(focal_length_m));
        }
        if !(aperture_half_angle_deg > 0.0 && aperture_half_angle_deg < 90.0) {
            return Err(LensError::BadAperture(aperture_half_angle_deg));
        }
        // the face's transverse height r·sinθ peaks at cosθ = n; past that
        // the curve folds back and offsets no longer map to a single angle
        let index = effective_index(plate_spacing_m, design_frequency)?;
        let fold_deg = index.acos().to_degrees();
        if aperture_half_angle_deg > fold_deg {
            return Err(LensError::ApertureBeyondFold {
                half_angle_deg: aperture_half_angle_deg,
                fold_deg,
            });
        }
        Ok(Self {
            plate_spacing_m,
            design_frequency,
            focal_length_m,
            aperture_half_angle_deg,
        })
    }

    pub fn index(&self) -> f64 {
        // validated in `new`
        effective_index(self.plate_spacing_m, self.design_frequency).unwrap_or(f64::NAN)
    }

    fn radius_at(&self, theta_rad: f64) -> f64 {
        radius_unchecked(self.focal_length_m, self.index(), theta_rad)
    }

    /// Largest transverse offset reached by the lens face.
    pub fn aperture_half_height_m(&self) -> f64 {
        let t = self.aperture_half_angle_deg.to_radians();
        self.radius_at(t) * t.sin()
    }

    /// Samples the face from the axis to the aperture edge every `step_deg`.
    /// The edge itself is always included.
    pub fn profile(&self, step_deg: f64) -> Result<LensProfile, LensError> {
        if !(step_deg > 0.0 && step_deg.is_finite()) {
            return Err(LensError::AngleOutOfRange(step_deg));
        }
        let mut angles = Vec::new();
        let mut k = 0u32;
        loop {
            let theta = f64::from(k) * step_deg;
            if theta >= self.aperture_half_angle_deg - 1e-12 {
                break;
            }
            angles.push(theta);
            k += 1;
        }
        angles.push(self.aperture_half_angle_deg);
        let samples = angles
            .into_iter()
            .map(|theta_deg| {
                let t = theta_deg.to_radians();
                let r_m = self.radius_at(t);
                ProfileSample {
                    theta_deg,
                    r_m,
                    y_m: r_m * t.sin(),
                    depth_m: self.focal_length_m - r_m * t.cos(),
                }
            })
            .collect();
        Ok(LensProfile {
            index: self.index(),
            focal_length_m: self.focal_length_m,
            samples,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub theta_deg: f64,
    pub r_m: f64,
    pub y_m: f64,
    pub depth_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LensProfile {
    pub index: f64,
    pub focal_length_m: f64,
    pub samples: Vec<ProfileSample>,
}

impl LensProfile {
    pub const CSV_HEADER: &'static str = "theta_deg,r_m,y_m,depth_m";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{},{}", s.theta_deg, s.r_m, s.y_m, s.depth_m);
        }
        out
    }
}

/// Axial depth of the lens face at transverse offset `y_m`, measured from the
/// plane through the vertex.
pub fn plate_edge_offset(spec: &LensSpec, y_m: f64) -> Result<f64, LensError> {
    let limit_m = spec.aperture_half_height_m();
    let target = y_m.abs();
    if !(target <= limit_m) {
        return Err(LensError::OutsideAperture { y_m, limit_m });
    }
    let height = |t: f64| spec.radius_at(t) * t.sin();
    let (mut lo, mut hi) = (0.0, spec.aperture_half_angle_deg.to_radians());
    let mut theta = 0.0;
    for _ in 0..200 {
        theta = 0.5 * (lo + hi);
        let h = height(theta);
        if (h - target).abs() <= PROFILE_TOLERANCE_M {
            break;
        }
        if h < target {
            lo = theta;
        } else {
            hi = theta;
        }
    }
    if target == 0.0 {
        theta = 0.0;
    }
    Ok(spec.focal_length_m - spec.radius_at(theta) * theta.cos())
}

/// Angular sector shadowed by the lens body, as seen from the access point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadingSector {
    pub bearing_deg: f64,
    pub width_deg: f64,
    pub attenuation_db: f64,
}

impl ShadingSector {
    /// Sector spanning a lens of transverse size `aperture_width_m` placed
    /// `distance_m` in front of the access point.
    pub fn from_aperture(
        bearing_deg: f64,
        aperture_width_m: f64,
        distance_m: f64,
        attenuation_db: f64,
    ) -> Self {
        let width_deg = 2.0 * (0.5 * aperture_width_m / distance_m).atan().to_degrees();
        Self {
            bearing_deg,
            width_deg,
            attenuation_db,
        }
    }

    pub fn contains(&self, bearing_deg: f64) -> bool {
        if self.width_deg <= 0.0 {
            return false;
        }
        let offset = (bearing_deg - self.bearing_deg).rem_euclid(360.0);
        let distance = offset.min(360.0 - offset);
        distance <= self.width_deg / 2.0
    }
}

impl Default for ShadingSector {
    fn default() -> Self {
        // 60° = full aperture of the default 30° half-angle lens
        Self {
            bearing_deg: 0.0,
            width_deg: 60.0,
            attenuation_db: DEFAULT_SHADING_ATTENUATION_DB,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensEffect {
    pub gain_uplift_db: f64,
    pub throughput_uplift_fraction: f64,
    pub shading: ShadingSector,
}

impl Default for LensEffect {
    fn default() -> Self {
        Self {
            gain_uplift_db: DEFAULT_GAIN_UPLIFT_DB,
            throughput_uplift_fraction: DEFAULT_THROUGHPUT_UPLIFT,
            shading: ShadingSector::default(),
        }
    }
}

impl LensEffect {
    pub fn validate(&self) -> Result<(), LensError> {
        if !(0.0..=30.0).contains(&self.gain_uplift_db) {
            return Err(LensError::BadEffect(format!(
                "gain uplift {} dB outside [0, 30]",
                self.gain_uplift_db
            )));
        }
        if !(self.throughput_uplift_fraction >= 0.0) {
            return Err(LensError::BadEffect(format!(
                "throughput uplift {} is negative",
                self.throughput_uplift_fraction
            )));
        }
        if !(0.0..360.0).contains(&self.shading.width_deg) {
            return Err(LensError::BadEffect(format!(
                "shading width {}° outside [0, 360)",
                self.shading.width_deg
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensReport {
    pub baseline_rx_dbm: f64,
    pub lensed_rx_dbm: f64,
    /// Distance multiplier at equal received power.
    pub range_ratio: f64,
    /// Throughput multiplier at equal distance.
    pub throughput_multiplier: f64,
}

/// Applies the lens gain to the receive side of `budget`.
pub fn apply_lens(
    budget: &LinkBudget,
    effect: &LensEffect,
) -> Result<(LinkBudget, LensReport), LensError> {
    effect.validate()?;
    let rx_gain = AntennaGain::from_linear(
        budget.rx_gain.linear() * crate::rf::db_to_linear(effect.gain_uplift_db),
    )?;
    let lensed = budget.with_rx_gain(rx_gain)?;
    let report = LensReport {
        baseline_rx_dbm: budget.rx_power_dbm(),
        lensed_rx_dbm: lensed.rx_power_dbm(),
        range_ratio: range_ratio_from_gain_delta(effect.gain_uplift_db),
        throughput_multiplier: 1.0 + effect.throughput_uplift_fraction,
    };
    Ok((lensed, report))
}

/// Attenuation in dB for each client bearing: the sector attenuation inside
/// the shadow (boundary inclusive), zero elsewhere.
pub fn shading_assessment(
    lens_bearing_deg: f64,
    effect: &LensEffect,
    client_bearings_deg: &[f64],
) -> Vec<f64> {
    let sector = ShadingSector {
        bearing_deg: lens_bearing_deg,
        ..effect.shading
    };
    client_bearings_deg
        .iter()
        .map(|&b| {
            if sector.contains(b) {
                sector.attenuation_db
            } else {
                0.0
            }
        })
        .collect()
}
