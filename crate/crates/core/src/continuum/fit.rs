//! Log-log least-squares estimate of a convergence order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Slope of `ln(error)` against `ln(l)`.
    pub order: f64,
    pub intercept: f64,
    /// RMS residual of the linear fit in log space.
    pub residual: f64,
    pub used: usize,
    /// Points dropped because their error was not positive and finite.
    pub dropped: usize,
}

/// Fits `ln(err) = order·ln(l) + c` over `(l, err)` pairs.
pub fn fit_order(points: &[(f64, f64)]) -> Result<FitResult> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(l, e)| *l > 0.0 && l.is_finite() && *e > 0.0 && e.is_finite())
        .map(|(l, e)| (l.ln(), e.ln()))
        .collect();
    let dropped = points.len() - usable.len();
    if usable.len() < 3 {
        return Err(Error::TooFewPoints(usable.len()));
    }
    let m = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / m;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Singular);
    }
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let order = sxy / sxx;
    let intercept = my - order * mx;
    let residual = (usable.iter().map(|p| (p.1 - intercept - order * p.0).powi(2)).sum::<f64>() / m).sqrt();
    Ok(FitResult { order, intercept, residual, used: usable.len(), dropped })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let ls = [0.5, 0.25, 0.125, 0.0625];
        let quad: Vec<_> = ls.iter().map(|l| (*l, 3.0 * l * l)).collect();
        let f = fit_order(&quad).unwrap();
        assert!((f.order - 2.0).abs() < 1e-6);
        assert!(f.residual < 1e-12);
        let lin: Vec<_> = ls.iter().map(|l| (*l, 0.7 * l)).collect();
        assert!((fit_order(&lin).unwrap().order - 1.0).abs() < 1e-6);
    }

    #[test]
    fn mixed_powers_over_a_decade() {
        // C₁l² + C₂l⁴ with l from 0.1 to 1: the slope stays close to 2.
        let pts: Vec<_> = (0..10)
            .map(|i| {
                let l = 0.1 * 10f64.powf(i as f64 / 9.0);
                (l, 1.0 * l * l + 0.1 * l.powi(4))
            })
            .collect();
        let f = fit_order(&pts).unwrap();
        assert!((1.9..=2.1).contains(&f.order), "{}", f.order);
    }

    #[test]
    fn drops_converged_points() {
        let pts = [(0.5, 0.25), (0.25, 0.0625), (0.125, 0.015625), (0.0625, 0.0)];
        let f = fit_order(&pts).unwrap();
        assert_eq!(f.dropped, 1);
        assert_eq!(f.used, 3);
        assert!(matches!(fit_order(&pts[1..]), Err(Error::TooFewPoints(2))));
    }
}
