//! Doubling period of an exponentially growing count.
//!
//! Fits `log2(count) = intercept + slope·t` by ordinary least squares; the
//! doubling period is `1/slope`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrowthError {
    #[error("need at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("time must be finite and strictly increasing (point {0})")]
    NotIncreasing(usize),
    #[error("count must be positive and finite (point {0})")]
    NonPositiveCount(usize),
    #[error("series shows no growth (slope is zero)")]
    NoGrowth,
    #[error("doubling period must be positive, got {0} days")]
    NonPositivePeriod(f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountSeries {
    points: Vec<(f64, f64)>,
}

impl CountSeries {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, GrowthError> {
        if points.len() < 2 {
            return Err(GrowthError::TooFewPoints(points.len()));
        }
        for (i, &(t, c)) in points.iter().enumerate() {
            if !t.is_finite() || (i > 0 && t <= points[i - 1].0) {
                return Err(GrowthError::NotIncreasing(i));
            }
            if !(c > 0.0 && c.is_finite()) {
                return Err(GrowthError::NonPositiveCount(i));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Reads two-column text `t_days, count`. Columns may be separated by
    /// commas, semicolons, tabs or spaces; blank lines, `#` comments and a
    /// non-numeric header line are skipped.
    pub fn parse(text: &str) -> Result<Self, GrowthError> {
        let mut points = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(v) if v.len() == 2 => points.push((v[0], v[1])),
                Ok(v) => {
                    return Err(GrowthError::Parse {
                        line: idx + 1,
                        message: format!("expected 2 columns, found {}", v.len()),
                    })
                }
                Err(_) if points.is_empty() => continue,
                Err(e) => {
                    return Err(GrowthError::Parse {
                        line: idx + 1,
                        message: e.to_string(),
                    })
                }
            }
        }
        Self::new(points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub doubling_days: f64,
    pub intercept_log2: f64,
    pub r_squared: f64,
}

pub fn fit_doubling(series: &CountSeries) -> Result<GrowthFit, GrowthError> {
    let pts = series.points();
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ys: Vec<f64> = pts.iter().map(|p| p.1.log2()).collect();
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&(t, _), &y) in pts.iter().zip(&ys) {
        let (dt, dy) = (t - mean_t, y - mean_y);
        sxy += dt * dy;
        sxx += dt * dt;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    // relative to the spread of log-counts, anything this small is flat
    if slope == 0.0 || syy <= 1e-24 * (1.0 + mean_y * mean_y) {
        return Err(GrowthError::NoGrowth);
    }
    let r_squared = ((sxy * sxy) / (sxx * syy)).clamp(0.0, 1.0);
    Ok(GrowthFit {
        doubling_days: 1.0 / slope,
        intercept_log2: mean_y - slope * mean_t,
        r_squared,
    })
}

/// Time at which the fitted count doubles again after `from_t_days`.
pub fn predict_doubling_date(fit: &GrowthFit, from_t_days: f64) -> Result<f64, GrowthError> {
    if !(fit.doubling_days > 0.0) {
        return Err(GrowthError::NonPositivePeriod(fit.doubling_days));
    }
    Ok(from_t_days + fit.doubling_days)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(points: &[(f64, f64)]) -> CountSeries {
        CountSeries::new(points.to_vec()).unwrap()
    }

    #[test]
    fn fit_examples() {
        let fit = fit_doubling(&series(&[(0.0, 100.0), (730.0, 200.0)])).unwrap();
        assert!((fit.doubling_days - 730.0).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);

        let fit = fit_doubling(&series(&[(0.0, 100.0), (365.0, 141.42), (730.0, 200.0)])).unwrap();
        assert!((fit.doubling_days - 730.0).abs() < 0.05);
        let exact = 100.0 * 2f64.sqrt();
        let fit = fit_doubling(&series(&[(0.0, 100.0), (365.0, exact), (730.0, 200.0)])).unwrap();
        assert!((fit.doubling_days - 730.0).abs() < 1e-6);

        assert_eq!(
            fit_doubling(&series(&[(0.0, 100.0), (1.0, 100.0), (2.0, 100.0)])),
            Err(GrowthError::NoGrowth)
        );
    }

    #[test]
    fn series_validation() {
        assert_eq!(
            CountSeries::new(vec![(0.0, 1.0)]),
            Err(GrowthError::TooFewPoints(1))
        );
        assert_eq!(
            CountSeries::new(vec![(0.0, 1.0), (0.0, 2.0)]),
            Err(GrowthError::NotIncreasing(1))
        );
        assert_eq!(
            CountSeries::new(vec![(0.0, 1.0), (1.0, 0.0)]),
            Err(GrowthError::NonPositiveCount(1))
        );
    }

    #[test]
    fn predict_examples() {
        let fit = |d| GrowthFit {
            doubling_days: d,
            intercept_log2: 0.0,
            r_squared: 1.0,
        };
        assert_eq!(predict_doubling_date(&fit(730.0), 0.0).unwrap(), 730.0);
        assert_eq!(predict_doubling_date(&fit(600.0), 100.0).unwrap(), 700.0);
        assert!(predict_doubling_date(&fit(-300.0), 0.0).is_err());
        let shrinking = fit_doubling(&series(&[(0.0, 200.0), (100.0, 100.0)])).unwrap();
        assert!(shrinking.doubling_days < 0.0);
        assert!(predict_doubling_date(&shrinking, 0.0).is_err());
    }

    #[test]
    fn parse_text() {
        let text = "t_days,count\n# comment\n0, 100\n\n730\t200\n";
        let s = CountSeries::parse(text).unwrap();
        assert_eq!(s.points(), &[(0.0, 100.0), (730.0, 200.0)]);
        assert!(CountSeries::parse("0 1 2\n3 4").is_err());
        assert!(matches!(
            CountSeries::parse("0,1\nx,2\n"),
            Err(GrowthError::Parse { line: 2, .. })
        ));
    }

    fn synthetic(period: f64, n: usize, c0: f64) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let t = i as f64 * 91.0;
                (t, c0 * (t / period).exp2())
            })
            .collect()
    }

    proptest! {
        #[test]
        fn exact_exponential_recovered(period in 50.0f64..5000.0, n in 2usize..40, c0 in 1.0f64..1e6) {
            let fit = fit_doubling(&series(&synthetic(period, n, c0))).unwrap();
            prop_assert!(((fit.doubling_days - period) / period).abs() < 1e-9);
            prop_assert!((fit.r_squared - 1.0).abs() < 1e-12);
        }

        #[test]
        fn scale_and_shift_invariance(period in 100.0f64..3000.0, k in 0.01f64..100.0, dt in -1e4f64..1e4) {
            let base: Vec<(f64, f64)> = synthetic(period, 12, 50.0)
                .into_iter()
                .enumerate()
                .map(|(i, (t, c))| (t, c * (1.0 + 0.05 * ((i * 7 % 5) as f64 - 2.0))))
                .collect();
            let f0 = fit_doubling(&series(&base)).unwrap();
            let scaled: Vec<_> = base.iter().map(|&(t, c)| (t, c * k)).collect();
            let shifted: Vec<_> = base.iter().map(|&(t, c)| (t + dt, c)).collect();
            let fs = fit_doubling(&series(&scaled)).unwrap();
            let ft = fit_doubling(&series(&shifted)).unwrap();
            prop_assert!(((fs.doubling_days - f0.doubling_days) / f0.doubling_days).abs() < 1e-9);
            prop_assert!(((ft.doubling_days - f0.doubling_days) / f0.doubling_days).abs() < 1e-9);
            prop_assert!((fs.intercept_log2 - f0.intercept_log2 - k.log2()).abs() < 1e-9);
        }
    }
}
