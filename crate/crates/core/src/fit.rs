//! Power-law fits for decay/growth grids: least squares on (log X, log |D|)
//! with zero magnitudes dropped (and counted) rather than poisoning the logs.

use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    /// the fitted (log X, log |D|) pairs
    pub points: Vec<(f64, f64)>,
    /// points discarded because |D| was zero or not finite
    pub dropped: usize,
}

/// Least-squares exponent of |D| ≈ c·X^slope from raw (X, |D|) samples.
/// Needs at least 3 usable points after dropping zeros.
pub fn fit_exponent(raw: &[(f64, f64)]) -> Result<ExponentFit> {
    let mut points = Vec::with_capacity(raw.len());
    let mut dropped = 0usize;
    for &(x, d) in raw {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::Domain(format!("scale must be positive and finite, got {x}")));
        }
        if d > 0.0 && d.is_finite() {
            points.push((x.ln(), d.ln()));
        } else {
            dropped += 1;
        }
    }
    if points.len() < 3 {
        return Err(Error::FitInsufficient {
            need: 3,
            got: points.len(),
            dropped,
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all scales coincide, exponent undetermined".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = points
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    Ok(ExponentFit {
        slope,
        intercept,
        residual_rms: (ss / n).sqrt(),
        points,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let pts: Vec<(f64, f64)> = [50.0f64, 100.0, 200.0, 400.0, 800.0]
            .iter()
            .map(|&x| (x, 3.7 * x.powf(0.9)))
            .collect();
        let fit = fit_exponent(&pts).unwrap();
        assert!((fit.slope - 0.9).abs() <= 1e-12, "slope {}", fit.slope);
        assert!((fit.intercept - 3.7f64.ln()).abs() <= 1e-11);
        assert!(fit.residual_rms <= 1e-12);
        assert_eq!(fit.dropped, 0);
        assert_eq!(fit.points.len(), 5);
    }

    #[test]
    fn constant_data_has_zero_slope() {
        let pts = [(10.0, 2.5), (100.0, 2.5), (1000.0, 2.5)];
        let fit = fit_exponent(&pts).unwrap();
        assert!(fit.slope.abs() <= 1e-14);
        assert!((fit.intercept - 2.5f64.ln()).abs() <= 1e-13);
    }

    #[test]
    fn zero_magnitudes_are_dropped_and_flagged() {
        let pts = [(10.0, 1.0), (20.0, 0.0), (40.0, 1.0), (80.0, 1.0)];
        let fit = fit_exponent(&pts).unwrap();
        assert_eq!(fit.dropped, 1);
        assert_eq!(fit.points.len(), 3);
        assert!(fit.slope.abs() <= 1e-13);
    }

    #[test]
    fn too_few_usable_points_is_an_error() {
        let pts = [(10.0, 1.0), (20.0, 0.0), (40.0, 2.0)];
        match fit_exponent(&pts) {
            Err(Error::FitInsufficient { need, got, dropped }) => {
                assert_eq!((need, got, dropped), (3, 2, 1));
            }
            other => panic!("expected fit error, got {other:?}"),
        }
        assert!(fit_exponent(&[(10.0, 1.0)]).is_err());
        assert!(fit_exponent(&[(-1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).is_err());
    }
}
