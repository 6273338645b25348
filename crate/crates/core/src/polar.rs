//! Polarization mismatch, antenna tilt and 2×2 MIMO capacity.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Forward tilt that produces the reference +2 dB gain.
pub const REFERENCE_TILT_DEG: f64 = 15.0;
pub const REFERENCE_TILT_GAIN_DB: f64 = 2.0;
/// Isolation measured between crossed antennas in a room with few reflectors.
pub const SPARSE_ROOM_ISOLATION_DB: f64 = 15.0;
/// Isolation measured between crossed antennas among metal structures.
pub const METAL_RICH_ISOLATION_DB: f64 = 4.0;
/// Standard deviation of the per-entry complex perturbation.
pub const PERTURBATION_SIGMA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolarError {
    #[error("diffuse fraction must lie in [0, 1], got {0}")]
    BadDiffuseFraction(f64),
    #[error("isolation must be non-negative, got {0} dB")]
    NegativeIsolation(f64),
    #[error("tilt {0} rad exceeds ±π/2")]
    TiltOutOfRange(f64),
    #[error("SNR must be positive and finite, got {0}")]
    BadSnr(f64),
    #[error("channel matrix has a non-finite entry")]
    NonFiniteChannel,
    #[error("cross-polar leakage must lie in [0, 1], got {0}")]
    BadXpd(f64),
    #[error("unknown environment preset {0:?} (expected sparse-room or metal-rich)")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentModel {
    /// Fraction of received power arriving depolarized.
    pub diffuse_fraction: f64,
    pub tilt_gain_db_per_rad: f64,
}

impl EnvironmentModel {
    pub fn new(diffuse_fraction: f64) -> Result<Self, PolarError> {
        if !(0.0..=1.0).contains(&diffuse_fraction) {
            return Err(PolarError::BadDiffuseFraction(diffuse_fraction));
        }
        Ok(Self {
            diffuse_fraction,
            tilt_gain_db_per_rad: default_tilt_gain_db_per_rad(),
        })
    }

    pub fn from_isolation_db(isolation_db: f64) -> Result<Self, PolarError> {
        Self::new(calibrate_diffuse_from_isolation(isolation_db)?)
    }

    pub fn sparse_room() -> Self {
        Self::from_isolation_db(SPARSE_ROOM_ISOLATION_DB).expect("valid preset")
    }

    pub fn metal_rich() -> Self {
        Self::from_isolation_db(METAL_RICH_ISOLATION_DB).expect("valid preset")
    }

    pub fn preset(name: &str) -> Result<Self, PolarError> {
        match name {
            "sparse-room" => Ok(Self::sparse_room()),
            "metal-rich" => Ok(Self::metal_rich()),
            other => Err(PolarError::UnknownPreset(other.to_string())),
        }
    }
}

pub fn default_tilt_gain_db_per_rad() -> f64 {
    REFERENCE_TILT_GAIN_DB / REFERENCE_TILT_DEG.to_radians()
}

/// Received-power change for linear antennas rotated `delta_psi_deg` apart,
/// `10·log10((1−ε)·cos²Δψ + ε)`.
pub fn mismatch_loss_db(delta_psi_deg: f64, env: &EnvironmentModel) -> Result<f64, PolarError> {
    let eps = env.diffuse_fraction;
    if !(0.0..=1.0).contains(&eps) {
        return Err(PolarError::BadDiffuseFraction(eps));
    }
    let c = delta_psi_deg.to_radians().cos();
    let coupling = (1.0 - eps) * c * c + eps;
    Ok((10.0 * coupling.log10()).min(0.0))
}

/// Diffuse fraction that caps crossed-antenna isolation at `isolation_db`.
pub fn calibrate_diffuse_from_isolation(isolation_db: f64) -> Result<f64, PolarError> {
    if !(isolation_db >= 0.0) {
        return Err(PolarError::NegativeIsolation(isolation_db));
    }
    Ok(10f64.powf(-isolation_db / 10.0))
}

/// Linear tilt model; positive `tilt_rad` leans the receiving element
/// forward along the propagation direction.
pub fn tilt_effect_db(tilt_rad: f64, env: &EnvironmentModel) -> Result<f64, PolarError> {
    if !(tilt_rad.abs() <= FRAC_PI_2) {
        return Err(PolarError::TiltOutOfRange(tilt_rad));
    }
    Ok(env.tilt_gain_db_per_rad * tilt_rad)
}

pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MimoChannel {
    pub h: Matrix2,
    pub snr_linear: f64,
}

impl MimoChannel {
    pub fn new(h: Matrix2, snr_linear: f64) -> Result<Self, PolarError> {
        if !(snr_linear > 0.0 && snr_linear.is_finite()) {
            return Err(PolarError::BadSnr(snr_linear));
        }
        if h.iter()
            .flatten()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(PolarError::NonFiniteChannel);
        }
        Ok(Self { h, snr_linear })
    }

    pub fn from_snr_db(h: Matrix2, snr_db: f64) -> Result<Self, PolarError> {
        Self::new(h, 10f64.powf(snr_db / 10.0))
    }
}

/// `H·Hᴴ`.
pub fn gram(h: &Matrix2) -> Matrix2 {
    let mut g = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = h[i][0] * h[j][0].conj() + h[i][1] * h[j][1].conj();
        }
    }
    g
}

/// Eigenvalues of the Hermitian positive semidefinite `H·Hᴴ`, largest first.
pub fn gram_eigenvalues(h: &Matrix2) -> [f64; 2] {
    let g = gram(h);
    let (a, d) = (g[0][0].re, g[1][1].re);
    let b2 = g[0][1].norm_sqr();
    let half_trace = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + b2).sqrt();
    let hi = half_trace + disc;
    // product form for the small root avoids cancellation
    let det = (a * d - b2).max(0.0);
    let lo = if hi > 0.0 { det / hi } else { 0.0 };
    [hi, lo]
}

/// Equal-power open-loop capacity `log2 det(I + (ρ/2)·H·Hᴴ)` in bit/s/Hz.
pub fn mimo_capacity_bps_hz(ch: &MimoChannel) -> Result<f64, PolarError> {
    let ch = MimoChannel::new(ch.h, ch.snr_linear)?;
    let per_stream = ch.snr_linear / 2.0;
    Ok(gram_eigenvalues(&ch.h)
        .iter()
        .map(|&l| (per_stream * l).ln_1p())
        .sum::<f64>()
        / std::f64::consts::LN_2)
}

/// Dual-polarized channel `[[1, √xpd], [√xpd, 1]]`, optionally perturbed by
/// a complex Gaussian of σ = 0.1 per entry drawn from `perturb_seed`.
pub fn dual_polarized_channel(xpd: f64, perturb_seed: Option<u64>) -> Result<Matrix2, PolarError> {
    if !(0.0..=1.0).contains(&xpd) {
        return Err(PolarError::BadXpd(xpd));
    }
    let s = xpd.sqrt();
    let one = Complex64::new(1.0, 0.0);
    let leak = Complex64::new(s, 0.0);
    let mut h = [[one, leak], [leak, one]];
    if let Some(seed) = perturb_seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // circular: each quadrature carries half the variance
        let normal = Normal::new(0.0, PERTURBATION_SIGMA / 2f64.sqrt()).expect("finite sigma");
        for z in h.iter_mut().flatten() {
            *z += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn identity() -> Matrix2 {
        [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
    }

    /// Direct determinant of I + k·H·Hᴴ, independent of the eigen route.
    fn capacity_by_det(h: &Matrix2, snr: f64) -> f64 {
        let g = gram(h);
        let k = snr / 2.0;
        let m00 = c(1.0, 0.0) + g[0][0] * k;
        let m11 = c(1.0, 0.0) + g[1][1] * k;
        let det = m00 * m11 - g[0][1] * g[1][0] * (k * k);
        det.re.log2()
    }

    #[test]
    fn mismatch_examples() {
        let m = EnvironmentModel::new(0.3).unwrap();
        assert_eq!(mismatch_loss_db(0.0, &m).unwrap(), 0.0);
        let sparse = EnvironmentModel::new(0.031_62).unwrap();
        assert!((mismatch_loss_db(90.0, &sparse).unwrap() + 15.0).abs() < 1e-3);
        let metal = EnvironmentModel::new(0.398_11).unwrap();
        assert!((mismatch_loss_db(90.0, &metal).unwrap() + 4.0).abs() < 1e-4);
        let clean = EnvironmentModel::new(0.0).unwrap();
        assert!((mismatch_loss_db(60.0, &clean).unwrap() + 6.02).abs() < 1e-3);
    }

    #[test]
    fn calibrate_examples() {
        assert_eq!(calibrate_diffuse_from_isolation(0.0).unwrap(), 1.0);
        assert!((calibrate_diffuse_from_isolation(15.0).unwrap() - 0.031_62).abs() < 1e-5);
        assert!((calibrate_diffuse_from_isolation(4.0).unwrap() - 0.398_11).abs() < 1e-5);
        assert!(matches!(
            calibrate_diffuse_from_isolation(-1.0),
            Err(PolarError::NegativeIsolation(_))
        ));
    }

    #[test]
    fn presets() {
        let eps = |name| EnvironmentModel::preset(name).unwrap().diffuse_fraction;
        assert!((eps("sparse-room") - 0.031_62).abs() < 1e-5);
        assert!((eps("metal-rich") - 0.398_11).abs() < 1e-5);
        assert!(EnvironmentModel::preset("outdoor").is_err());
        assert!(EnvironmentModel::new(1.5).is_err());
    }

    #[test]
    fn tilt_examples() {
        let env = EnvironmentModel::sparse_room();
        assert_eq!(tilt_effect_db(0.0, &env).unwrap(), 0.0);
        let t = 15f64.to_radians();
        assert!((tilt_effect_db(t, &env).unwrap() - 2.0).abs() < 1e-12);
        assert!((tilt_effect_db(-t, &env).unwrap() + 2.0).abs() < 1e-12);
        assert!(tilt_effect_db(2.0, &env).is_err());
    }

    #[test]
    fn capacity_examples() {
        let ch = MimoChannel::new(identity(), 100.0).unwrap();
        assert!((mimo_capacity_bps_hz(&ch).unwrap() - 11.3449).abs() < 1e-4);
        let ones = [[c(1.0, 0.0); 2]; 2];
        let ch = MimoChannel::new(ones, 100.0).unwrap();
        assert!((mimo_capacity_bps_hz(&ch).unwrap() - 7.6511).abs() < 1e-4);
        let ch = MimoChannel::new(identity(), 1e-12).unwrap();
        assert!(mimo_capacity_bps_hz(&ch).unwrap() < 1e-11);
    }

    #[test]
    fn capacity_rejects_bad_input() {
        assert!(MimoChannel::new(identity(), 0.0).is_err());
        let mut h = identity();
        h[0][1] = c(f64::NAN, 0.0);
        assert_eq!(MimoChannel::new(h, 10.0), Err(PolarError::NonFiniteChannel));
        let raw = MimoChannel {
            h,
            snr_linear: 10.0,
        };
        assert!(mimo_capacity_bps_hz(&raw).is_err());
    }

    #[test]
    fn builder_examples() {
        assert_eq!(dual_polarized_channel(0.0, None).unwrap(), identity());
        assert_eq!(
            dual_polarized_channel(1.0, None).unwrap(),
            [[c(1.0, 0.0); 2]; 2]
        );
        let h = dual_polarized_channel(0.25, None).unwrap();
        assert_eq!(h[0][1], c(0.5, 0.0));
        let [hi, lo] = gram_eigenvalues(&h);
        assert!((hi - 2.25).abs() < 1e-12 && (lo - 0.25).abs() < 1e-12);
        assert!(dual_polarized_channel(1.1, None).is_err());
    }

    #[test]
    fn builder_perturbation_is_seeded() {
        let a = dual_polarized_channel(0.2, Some(7)).unwrap();
        assert_eq!(a, dual_polarized_channel(0.2, Some(7)).unwrap());
        assert_ne!(a, dual_polarized_channel(0.2, Some(8)).unwrap());
        assert_ne!(a, dual_polarized_channel(0.2, None).unwrap());
    }

    #[test]
    fn capacity_monotone_in_xpd_grid() {
        for snr_db in [20.0, 30.0, 40.0] {
            let cap = |x: f64| {
                let h = dual_polarized_channel(x, None).unwrap();
                mimo_capacity_bps_hz(&MimoChannel::from_snr_db(h, snr_db).unwrap()).unwrap()
            };
            for i in 0..=10 {
                for j in (i + 1)..=10 {
                    let (a, b) = (f64::from(i) / 10.0, f64::from(j) / 10.0);
                    assert!(cap(a) >= cap(b), "snr {snr_db} dB: xpd {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn leakage_helps_at_low_snr() {
        // below ~17 dB the rank-one channel's array gain wins near xpd = 1
        let cap = |x: f64| {
            let h = dual_polarized_channel(x, None).unwrap();
            mimo_capacity_bps_hz(&MimoChannel::from_snr_db(h, 10.0).unwrap()).unwrap()
        };
        assert!(cap(1.0) > cap(0.7));
        assert!(cap(0.0) > cap(0.5));
    }

    proptest! {
        #[test]
        fn mismatch_never_positive(psi in -360.0f64..360.0, eps in 0.0f64..=1.0) {
            let env = EnvironmentModel::new(eps).unwrap();
            prop_assert!(mismatch_loss_db(psi, &env).unwrap() <= 0.0);
        }

        #[test]
        fn mismatch_decreasing(p in 0.0f64..89.0, dp in 0.01f64..1.0, eps in 0.0f64..0.999) {
            let env = EnvironmentModel::new(eps).unwrap();
            prop_assert!(mismatch_loss_db(p + dp, &env).unwrap() < mismatch_loss_db(p, &env).unwrap());
        }

        #[test]
        fn fully_diffuse_is_flat(psi in 0.0f64..90.0) {
            let env = EnvironmentModel::new(1.0).unwrap();
            prop_assert_eq!(mismatch_loss_db(psi, &env).unwrap(), 0.0);
        }

        #[test]
        fn calibration_round_trip(x in 0.0f64..40.0) {
            let env = EnvironmentModel::from_isolation_db(x).unwrap();
            prop_assert!((mismatch_loss_db(90.0, &env).unwrap() + x).abs() < 1e-9);
        }

        #[test]
        fn eigen_route_matches_determinant(
            v in proptest::array::uniform8(-2.0f64..2.0), snr in 0.01f64..1000.0,
        ) {
            let h = [[c(v[0], v[1]), c(v[2], v[3])], [c(v[4], v[5]), c(v[6], v[7])]];
            let ch = MimoChannel::new(h, snr).unwrap();
            let eig = mimo_capacity_bps_hz(&ch).unwrap();
            prop_assert!(eig >= 0.0);
            prop_assert!((eig - capacity_by_det(&h, snr)).abs() < 1e-9);
        }

        #[test]
        fn identity_closed_form(snr in 1e-6f64..1e6) {
            let ch = MimoChannel::new(identity(), snr).unwrap();
            let expected = 2.0 * (1.0 + snr / 2.0).log2();
            prop_assert!((mimo_capacity_bps_hz(&ch).unwrap() - expected).abs() <= 1e-12 * expected.max(1.0));
        }

        #[test]
        fn capacity_nondecreasing_in_snr(seed in 0u64..1000, snr in 0.01f64..1000.0, k in 1.0f64..10.0) {
            let h = dual_polarized_channel(0.3, Some(seed)).unwrap();
            let lo = mimo_capacity_bps_hz(&MimoChannel::new(h, snr).unwrap()).unwrap();
            let hi = mimo_capacity_bps_hz(&MimoChannel::new(h, snr * k).unwrap()).unwrap();
            prop_assert!(hi >= lo);
        }
    }
}
