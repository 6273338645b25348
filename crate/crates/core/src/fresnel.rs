//! Fresnel-zone geometry and on-axis scalar diffraction for annular screens.
//!
//! Positions on the transverse plane are measured by the continuous zone
//! coordinate `u = r²(d1+d2)/(λ·d1·d2)`; zone `n` is the ring `u ∈ [n−1, n]`.
//! Relative to the unobstructed field, the field at the receiver with the
//! set `B` of rings blocked is
//!
//! ```text
//! E/E0 = 1 + iπ ∫_B K(u) e^{iπu} du
//! ```
//!
//! With the obliquity factor `K ≡ 1` this collapses to
//! `1 + Σ (e^{iπb} − e^{iπa})`. Blocking an even zone removes a contribution
//! that opposes the direct field, so the field grows; blocking an odd zone
//! shrinks or flips it.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest zone coordinate accepted by [`field_ratio`].
pub const MAX_ZONE_INDEX: f64 = 200.0;
/// Relative tolerance of the adaptive quadrature.
pub const QUADRATURE_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FresnelError {
    #[error("path geometry requires positive finite d1, d2, λ (got d1={d1}, d2={d2}, λ={lambda})")]
    BadGeometry { d1: f64, d2: f64, lambda: f64 },
    #[error("zone number must be at least 1")]
    ZeroZone,
    #[error("distance must be positive, got {0} m")]
    BadDistance(f64),
    #[error("radius must be non-negative, got {0} m")]
    NegativeRadius(f64),
    #[error("interval [{0}, {1}] is not an ordered sub-range of [0, {MAX_ZONE_INDEX}]")]
    BadInterval(f64, f64),
    #[error("intervals [{0}, {1}] and [{2}, {3}] overlap")]
    Overlap(f64, f64, f64, f64),
}

/// Transmitter → screen plane → receiver distances and wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathGeometry {
    pub d1_m: f64,
    pub d2_m: f64,
    pub lambda_m: f64,
}

impl PathGeometry {
    pub fn new(d1_m: f64, d2_m: f64, lambda_m: f64) -> Result<Self, FresnelError> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if ok(d1_m) && ok(d2_m) && ok(lambda_m) {
            Ok(Self {
                d1_m,
                d2_m,
                lambda_m,
            })
        } else {
            Err(FresnelError::BadGeometry {
                d1: d1_m,
                d2: d2_m,
                lambda: lambda_m,
            })
        }
    }

    pub fn total_m(&self) -> f64 {
        self.d1_m + self.d2_m
    }

    /// `λ·d1·d2/(d1+d2)`, the squared radius of the first zone.
    fn first_zone_area_scale(&self) -> f64 {
        self.lambda_m * self.d1_m * self.d2_m / (self.d1_m + self.d2_m)
    }

    fn radius_at(&self, u: f64) -> f64 {
        (u * self.first_zone_area_scale()).sqrt()
    }

    /// Angle between the incident and diffracted rays at zone coordinate `u`.
    pub fn diffraction_angle_rad(&self, u: f64) -> f64 {
        let r = self.radius_at(u);
        (r / self.d1_m).atan() + (r / self.d2_m).atan()
    }

    /// Obliquity factor `(1 + cos χ)/2`.
    pub fn obliquity(&self, u: f64) -> f64 {
        0.5 * (1.0 + self.diffraction_angle_rad(u).cos())
    }
}

/// Outer radius of Fresnel zone `n` on the screen plane.
pub fn zone_radius(n: u32, geom: &PathGeometry) -> Result<f64, FresnelError> {
    if n == 0 {
        return Err(FresnelError::ZeroZone);
    }
    Ok(geom.radius_at(f64::from(n)))
}

/// Continuous zone coordinate of radius `r_m`.
pub fn zone_index(r_m: f64, geom: &PathGeometry) -> Result<f64, FresnelError> {
    if !(r_m >= 0.0) {
        return Err(FresnelError::NegativeRadius(r_m));
    }
    Ok(r_m * r_m / geom.first_zone_area_scale())
}

/// Full angle of the cone shadowed by a disc of radius `r_outer_m` seen from
/// `distance_m` away, in degrees.
pub fn shading_cone_deg(r_outer_m: f64, distance_m: f64) -> Result<f64, FresnelError> {
    if !(distance_m > 0.0) {
        return Err(FresnelError::BadDistance(distance_m));
    }
    Ok(2.0 * (r_outer_m / distance_m).atan().to_degrees())
}

/// Annulus covering exactly one Fresnel zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnularScreenSpec {
    pub geometry: PathGeometry,
    pub r_inner_m: f64,
    pub r_outer_m: f64,
    pub blocked_zone: u32,
}

impl AnnularScreenSpec {
    pub fn outer_diameter_m(&self) -> f64 {
        2.0 * self.r_outer_m
    }

    /// The blocked ring in zone coordinates.
    pub fn interval(&self) -> ZoneInterval {
        let n = f64::from(self.blocked_zone);
        ZoneInterval {
            start: n - 1.0,
            end: n,
        }
    }
}

pub fn screen_for_zone(n: u32, geom: &PathGeometry) -> Result<AnnularScreenSpec, FresnelError> {
    let r_outer_m = zone_radius(n, geom)?;
    let r_inner_m = if n == 1 {
        0.0
    } else {
        zone_radius(n - 1, geom)?
    };
    Ok(AnnularScreenSpec {
        geometry: *geom,
        r_inner_m,
        r_outer_m,
        blocked_zone: n,
    })
}

/// Closed range `[start, end]` of zone coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneInterval {
    pub start: f64,
    pub end: f64,
}

impl ZoneInterval {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Obliquity {
    /// Every zone contributes with unit weight; evaluated in closed form.
    Off,
    /// Zones weighted by `(1 + cos χ)/2` for the given path; evaluated by
    /// adaptive quadrature.
    On(PathGeometry),
}

/// Receiver field relative to the unobstructed path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldRatio {
    pub complex_ratio: Complex64,
}

impl FieldRatio {
    pub fn magnitude(&self) -> f64 {
        self.complex_ratio.norm()
    }

    pub fn power_gain_db(&self) -> f64 {
        20.0 * self.magnitude().log10()
    }
}

fn validated(blocked: &[ZoneInterval]) -> Result<Vec<ZoneInterval>, FresnelError> {
    let mut sorted = blocked.to_vec();
    for iv in &sorted {
        if !(iv.start >= 0.0 && iv.start <= iv.end && iv.end <= MAX_ZONE_INDEX) {
            return Err(FresnelError::BadInterval(iv.start, iv.end));
        }
    }
    sorted.sort_by(|a, b| a.start.total_cmp(&b.start));
    for pair in sorted.windows(2) {
        // shared endpoints are allowed
        if pair[1].start < pair[0].end {
            return Err(FresnelError::Overlap(
                pair[0].start,
                pair[0].end,
                pair[1].start,
                pair[1].end,
            ));
        }
    }
    Ok(sorted)
}

/// Field ratio at the receiver with the `blocked` zone intervals opaque.
pub fn field_ratio(
    blocked: &[ZoneInterval],
    obliquity: Obliquity,
) -> Result<FieldRatio, FresnelError> {
    match obliquity {
        Obliquity::Off => {
            let intervals = validated(blocked)?;
            let mut ratio = Complex64::new(1.0, 0.0);
            for iv in intervals {
                ratio += Complex64::cis(PI * iv.end) - Complex64::cis(PI * iv.start);
            }
            Ok(FieldRatio {
                complex_ratio: ratio,
            })
        }
        Obliquity::On(geom) => field_ratio_quadrature(blocked, Some(&geom)),
    }
}

/// Same integral as [`field_ratio`] but always evaluated numerically;
/// `weight = None` integrates with `K ≡ 1`.
pub fn field_ratio_quadrature(
    blocked: &[ZoneInterval],
    weight: Option<&PathGeometry>,
) -> Result<FieldRatio, FresnelError> {
    let intervals = validated(blocked)?;
    let integrand = |u: f64| {
        let k = weight.map_or(1.0, |g| g.obliquity(u));
        Complex64::new(0.0, PI) * Complex64::cis(PI * u) * k
    };
    let mut ratio = Complex64::new(1.0, 0.0);
    for iv in intervals {
        ratio += integrate_by_zone(&integrand, iv.start, iv.end);
    }
    Ok(FieldRatio {
        complex_ratio: ratio,
    })
}

/// Integrates over `[a, b]` with one adaptive panel per whole zone.
fn integrate_by_zone<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let mut lo = a;
    while lo < b {
        let hi = (lo.floor() + 1.0).min(b);
        total += adaptive_simpson(f, lo, hi, QUADRATURE_REL_TOL);
        lo = hi;
    }
    total
}

fn adaptive_simpson<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Complex64 {
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    // absolute target scaled by the panel's own magnitude, floored so
    // near-cancelling panels terminate
    let tol = rel_tol * whole.norm().max(1e-3 * (b - a));
    refine(f, a, b, fa, fm, fb, whole, tol, 48)
}

fn simpson(a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64) -> Complex64 {
    (fa + fm * 4.0 + fb) * ((b - a) / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let (flm, frm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Magnitude of the field delivered by zones `[0, u]` alone, sampled every
/// `step` up to `u_max`. With `weight = None` this is `|1 − e^{iπu}|`.
pub fn partial_field_curve(
    weight: Option<&PathGeometry>,
    u_max: f64,
    step: f64,
) -> Result<Vec<(f64, f64)>, FresnelError> {
    if !(u_max > 0.0 && u_max <= MAX_ZONE_INDEX) || !(step > 0.0) {
        return Err(FresnelError::BadInterval(0.0, u_max));
    }
    let integrand = |u: f64| {
        let k = weight.map_or(1.0, |g| g.obliquity(u));
        Complex64::new(0.0, -PI) * Complex64::cis(PI * u) * k
    };
    let mut out = vec![(0.0, 0.0)];
    let mut acc = Complex64::new(0.0, 0.0);
    let mut k = 0u32;
    loop {
        let lo = f64::from(k) * step;
        if lo >= u_max - 1e-12 {
            break;
        }
        let hi = (f64::from(k + 1) * step).min(u_max);
        acc += integrate_by_zone(&integrand, lo, hi);
        out.push((hi, acc.norm()));
        k += 1;
    }
    Ok(out)
}

pub fn partial_field_csv(curve: &[(f64, f64)]) -> String {
    let mut out = String::from("u,partial_field\n");
    for (u, m) in curve {
        let _ = writeln!(out, "{u},{m}");
    }
    out
}

/// Rows `(n, r_n, u)` for zones `1..=count`.
pub fn zone_table(geom: &PathGeometry, count: u32) -> Result<Vec<(u32, f64, f64)>, FresnelError> {
    (1..=count)
        .map(|n| {
            let r = zone_radius(n, geom)?;
            Ok((n, r, zone_index(r, geom)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wifi() -> PathGeometry {
        PathGeometry::new(25.0, 25.0, 0.125).unwrap()
    }

    /// Fixed-grid midpoint sum, independent of the adaptive path.
    fn brute_force(blocked: &[(f64, f64)], weight: Option<&PathGeometry>) -> Complex64 {
        let mut ratio = Complex64::new(1.0, 0.0);
        for &(a, b) in blocked {
            let n = 200_000;
            let h = (b - a) / n as f64;
            for i in 0..n {
                let u = a + (i as f64 + 0.5) * h;
                let k = weight.map_or(1.0, |g| g.obliquity(u));
                ratio += Complex64::new(0.0, PI) * Complex64::cis(PI * u) * (k * h);
            }
        }
        ratio
    }

    #[test]
    fn zone_radius_examples() {
        let g = wifi();
        assert!((zone_radius(1, &g).unwrap() - 1.25).abs() < 1e-12);
        assert!((zone_radius(2, &g).unwrap() - 1.767_77).abs() < 1e-5);
        assert_eq!(zone_radius(0, &g), Err(FresnelError::ZeroZone));
        let near = PathGeometry::new(1e-12, 25.0, 0.125).unwrap();
        assert!(zone_radius(1, &near).unwrap() < 1e-5);
    }

    #[test]
    fn screen_examples() {
        let s = screen_for_zone(2, &wifi()).unwrap();
        assert!((s.r_inner_m - 1.25).abs() < 1e-12);
        assert!((s.r_outer_m - 1.767_77).abs() < 1e-5);
        assert!((s.outer_diameter_m() - 3.536).abs() < 1e-3);

        let near_end = PathGeometry::new(5.0, 45.0, 0.125).unwrap();
        let s = screen_for_zone(2, &near_end).unwrap();
        assert!((s.r_outer_m - 1.125f64.sqrt()).abs() < 1e-12);
        assert!((s.outer_diameter_m() - 2.121).abs() < 1e-3);
        assert!(s.outer_diameter_m() <= 2.5);

        assert_eq!(screen_for_zone(1, &near_end).unwrap().r_inner_m, 0.0);
        assert!(screen_for_zone(0, &near_end).is_err());
    }

    #[test]
    fn cone_examples() {
        assert_eq!(shading_cone_deg(0.0, 10.0).unwrap(), 0.0);
        assert!((shading_cone_deg(1.767_77, 50.0).unwrap() - 4.05).abs() < 0.005);
        assert!((shading_cone_deg(1.060_66, 45.0).unwrap() - 2.70).abs() < 0.005);
        assert!(shading_cone_deg(1.0, 0.0).is_err());
    }

    #[test]
    fn zone_index_examples() {
        let g = wifi();
        assert!((zone_index(1.25, &g).unwrap() - 1.0).abs() < 1e-12);
        assert!((zone_index(1.767_77, &g).unwrap() - 2.0).abs() < 1e-5);
        assert_eq!(zone_index(0.0, &g).unwrap(), 0.0);
        assert!(zone_index(-1.0, &g).is_err());
    }

    #[test]
    fn field_ratio_examples() {
        let open = field_ratio(&[], Obliquity::Off).unwrap();
        assert_eq!(open.complex_ratio, Complex64::new(1.0, 0.0));

        let z2 = field_ratio(&[ZoneInterval::new(1.0, 2.0)], Obliquity::Off).unwrap();
        assert!((z2.complex_ratio - Complex64::new(3.0, 0.0)).norm() < 1e-12);
        assert!((z2.power_gain_db() - 9.54).abs() < 0.005);
        let oracle = brute_force(&[(1.0, 2.0)], None);
        assert!((oracle - z2.complex_ratio).norm() < 1e-4);

        let z1 = field_ratio(&[ZoneInterval::new(0.0, 1.0)], Obliquity::Off).unwrap();
        assert!((z1.complex_ratio - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((z1.magnitude() - 1.0).abs() < 1e-12);

        let z12 = field_ratio(&[ZoneInterval::new(0.0, 2.0)], Obliquity::Off).unwrap();
        assert!((z12.complex_ratio - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn field_ratio_rejects_bad_intervals() {
        let overlap = [ZoneInterval::new(0.0, 1.5), ZoneInterval::new(1.0, 2.0)];
        assert!(matches!(
            field_ratio(&overlap, Obliquity::Off),
            Err(FresnelError::Overlap(..))
        ));
        let touching = [ZoneInterval::new(0.0, 1.0), ZoneInterval::new(1.0, 2.0)];
        assert!(field_ratio(&touching, Obliquity::Off).is_ok());
        assert!(field_ratio(&[ZoneInterval::new(2.0, 1.0)], Obliquity::Off).is_err());
        assert!(field_ratio(&[ZoneInterval::new(0.0, 201.0)], Obliquity::Off).is_err());
        assert!(field_ratio(&[ZoneInterval::new(f64::NAN, 1.0)], Obliquity::Off).is_err());
    }

    #[test]
    fn quadrature_matches_oracles() {
        let iv = [ZoneInterval::new(1.0, 2.0)];
        let forced = field_ratio_quadrature(&iv, None).unwrap();
        assert!((forced.magnitude() - 3.0).abs() < 1e-4);

        let g = wifi();
        let on = field_ratio(&iv, Obliquity::On(g)).unwrap();
        let oracle = brute_force(&[(1.0, 2.0)], Some(&g));
        assert!((on.complex_ratio - oracle).norm() < 1e-5);
        assert!(on.magnitude() > 2.5 && on.magnitude() < 3.0);

        let ragged = [ZoneInterval::new(0.3, 2.7), ZoneInterval::new(5.25, 5.5)];
        let closed = field_ratio(&ragged, Obliquity::Off).unwrap();
        let numeric = field_ratio_quadrature(&ragged, None).unwrap();
        assert!((closed.complex_ratio - numeric.complex_ratio).norm() < 1e-4);
    }

    #[test]
    fn obliquity_degrades_with_tighter_geometry() {
        let iv = [ZoneInterval::new(1.0, 2.0)];
        let mut last = 3.0;
        for d in [1000.0, 100.0, 25.0, 12.5] {
            let g = PathGeometry::new(d, d, 0.125).unwrap();
            let m = field_ratio(&iv, Obliquity::On(g)).unwrap().magnitude();
            assert!(m < last, "d={d}: {m} !< {last}");
            last = m;
        }
    }

    #[test]
    fn partial_curve_unweighted() {
        let curve = partial_field_curve(None, 2.0, 0.5).unwrap();
        assert_eq!(curve.len(), 5);
        for (u, m) in &curve {
            let expected = (Complex64::new(1.0, 0.0) - Complex64::cis(PI * u)).norm();
            assert!((m - expected).abs() < 1e-6, "u={u}");
        }
        assert!((curve[2].1 - 2.0).abs() < 1e-6);
        assert!(partial_field_csv(&curve).starts_with("u,partial_field\n0,0\n"));
    }

    #[test]
    fn zone_table_rows() {
        let rows = zone_table(&wifi(), 3).unwrap();
        assert_eq!(rows.len(), 3);
        assert!((rows[2].2 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_zone_parity() {
        for n in 1..=40u32 {
            let iv = [ZoneInterval::new(f64::from(n - 1), f64::from(n))];
            let m = field_ratio(&iv, Obliquity::Off).unwrap().magnitude();
            if n % 2 == 0 {
                assert!(m > 1.0, "zone {n}");
            } else {
                assert!(m <= 1.0 + 1e-12, "zone {n}");
            }
        }
    }

    proptest! {
        #[test]
        fn radius_scales_as_sqrt_n(d1 in 0.1f64..1e3, d2 in 0.1f64..1e3, lambda in 0.01f64..1.0, n in 1u32..500) {
            let g = PathGeometry::new(d1, d2, lambda).unwrap();
            let swapped = PathGeometry::new(d2, d1, lambda).unwrap();
            let r1 = zone_radius(1, &g).unwrap();
            let rn = zone_radius(n, &g).unwrap();
            prop_assert!((rn / r1 - f64::from(n).sqrt()).abs() < 1e-12 * f64::from(n).sqrt().max(1.0));
            prop_assert!((rn - zone_radius(n, &swapped).unwrap()).abs() <= 1e-12 * rn);
        }

        #[test]
        fn zone_index_inverts_radius(d1 in 0.1f64..1e3, d2 in 0.1f64..1e3, lambda in 0.01f64..1.0) {
            let g = PathGeometry::new(d1, d2, lambda).unwrap();
            for n in 1..=20u32 {
                let u = zone_index(zone_radius(n, &g).unwrap(), &g).unwrap();
                prop_assert!((u - f64::from(n)).abs() < 1e-9);
            }
        }

        #[test]
        fn closed_form_matches_quadrature(a in 0.0f64..50.0, w in 0.0f64..5.0) {
            let iv = [ZoneInterval::new(a, a + w)];
            let closed = field_ratio(&iv, Obliquity::Off).unwrap().complex_ratio;
            let explicit = Complex64::new(1.0, 0.0) + Complex64::cis(PI * (a + w)) - Complex64::cis(PI * a);
            prop_assert!((closed - explicit).norm() < 1e-9);
            let numeric = field_ratio_quadrature(&iv, None).unwrap().complex_ratio;
            prop_assert!((closed - numeric).norm() < 1e-4);
        }

        #[test]
        fn obliquity_zone_two_in_band(d1 in 12.5f64..500.0, d2 in 12.5f64..500.0) {
            // d1, d2 ≥ 100λ at λ = 0.125 m
            let g = PathGeometry::new(d1, d2, 0.125).unwrap();
            let m = field_ratio(&[ZoneInterval::new(1.0, 2.0)], Obliquity::On(g)).unwrap().magnitude();
            prop_assert!(m > 2.5 && m < 3.0);
        }
    }
}
