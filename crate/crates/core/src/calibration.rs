//! Least-squares calibration of the decomposition coefficients against the
//! dense-trace spectral action.
//!
//! For several random configurations the dense `S` is regressed on
//! `(W, T4, T2edge, 1, Ω)`. The fitted weights are compared with the closed
//! forms in [`Coefficients`]; the weight on `Ω` must come out as 1. On
//! lattices without winding walks the `Ω` column is identically zero and is
//! left out of the fit.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::action::{higgs_terms, wilson_action, winding_term, Coefficients};
use crate::clifford::build_gammas;
use crate::config::random_unconstrained;
use crate::dirac::spectral_action_dense;
use crate::error::{Error, Result};
use crate::lattice::TorusLattice;
use crate::rng::SeedStream;

/// Largest operator the dense oracle is run on.
pub const CALIBRATION_DIM_CAP: usize = 4096;
const MAX_ATTEMPTS: u64 = 5;
/// Reciprocal condition number below which the system counts as singular.
const RCOND_MIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredCoefficients {
    pub alpha_w: f64,
    pub alpha_4: f64,
    pub alpha_2: f64,
    pub alpha_0: f64,
    /// Weight of the winding term; `None` when the lattice has no winding walks.
    pub alpha_winding: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub lattice: TorusLattice,
    #[serde(rename = "N")]
    pub n_mat: usize,
    pub c: f64,
    pub seed: u64,
    pub samples: usize,
    pub attempts: u64,
    pub measured: MeasuredCoefficients,
    pub formula: Coefficients,
    /// Relative differences `|measured − formula| / |formula|` for
    /// `(α_W, α_4, α_2, α_0)`, and `|α_Ω − 1|` last when present.
    pub rel_diff: Vec<f64>,
    pub max_rel_diff: f64,
    /// Measured `α_2/α_W`, which the closed forms put at `1/c²`.
    pub ratio_alpha2_alpha_w: f64,
    /// Largest fit residual relative to `1 + |S|`.
    pub fit_residual: f64,
}

/// Fits the coefficients from `samples ≥ 6` random configurations.
pub fn calibrate(lattice: TorusLattice, n_mat: usize, c: f64, seed: u64, samples: usize) -> Result<CalibrationReport> {
    if samples < 6 {
        return Err(Error::Invalid(format!("calibration needs at least 6 configurations, got {samples}")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Invalid(format!("hopping normalisation must be positive, got {c}")));
    }
    let dim = build_gammas(lattice.dim())?.spinor_dim() * n_mat * lattice.num_vertices();
    if dim > CALIBRATION_DIM_CAP {
        return Err(Error::DimensionCap { dim, cap: CALIBRATION_DIM_CAP });
    }
    let formula = Coefficients::new(&lattice, n_mat, c);
    let root = SeedStream::new(seed);
    for attempt in 0..MAX_ATTEMPTS {
        let seeds = root.child(attempt);
        match fit_once(lattice, n_mat, c, &seeds, samples)? {
            Some((measured, fit_residual)) => {
                let mut rel_diff = vec![
                    rel(measured.alpha_w, formula.alpha_w),
                    rel(measured.alpha_4, formula.alpha_4),
                    rel(measured.alpha_2, formula.alpha_2),
                    rel(measured.alpha_0, formula.alpha_0),
                ];
                if let Some(a) = measured.alpha_winding {
                    rel_diff.push((a - 1.0).abs());
                }
                let max_rel_diff = rel_diff.iter().cloned().fold(0.0, f64::max);
                return Ok(CalibrationReport {
                    lattice,
                    n_mat,
                    c,
                    seed,
                    samples,
                    attempts: attempt + 1,
                    ratio_alpha2_alpha_w: measured.alpha_2 / measured.alpha_w,
                    measured,
                    formula,
                    rel_diff,
                    max_rel_diff,
                    fit_residual,
                });
            }
            None => continue,
        }
    }
    Err(Error::Singular)
}

fn rel(measured: f64, formula: f64) -> f64 {
    (measured - formula).abs() / formula.abs()
}

type Row = ([f64; 5], f64);

fn fit_once(
    lattice: TorusLattice,
    n_mat: usize,
    c: f64,
    seeds: &SeedStream,
    samples: usize,
) -> Result<Option<(MeasuredCoefficients, f64)>> {
    let mut rows: Vec<Row> = Vec::with_capacity(samples);
    for i in 0..samples {
        // Vary the Higgs scale so T4 and T2edge are not collinear with the constant.
        let scale = 0.4 + 0.3 * i as f64;
        let cfg = random_unconstrained(lattice, n_mat, scale, &seeds.child(i as u64))?;
        let s = spectral_action_dense(&cfg, c, CALIBRATION_DIM_CAP)?;
        let h = higgs_terms(&cfg);
        let omega = winding_term(&cfg, c)?;
        rows.push(([wilson_action(&cfg), h.t4, h.t2edge, 1.0, omega], s));
    }
    let with_winding = rows.iter().any(|(x, _)| x[4] != 0.0);
    let k = if with_winding { 5 } else { 4 };
    let a = DMatrix::from_fn(rows.len(), k, |r, j| rows[r].0[j]);
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));

    // Column scaling keeps the SVD well conditioned.
    let norms: Vec<f64> = (0..k).map(|j| a.column(j).norm()).collect();
    if norms.contains(&0.0) {
        return Ok(None);
    }
    let scaled = DMatrix::from_fn(a.nrows(), k, |r, j| a[(r, j)] / norms[j]);
    let svd = scaled.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax == 0.0 || smin / smax < RCOND_MIN {
        return Ok(None);
    }
    let y = svd.solve(&b, 0.0).map_err(|e| Error::Invalid(e.to_string()))?;
    let x: Vec<f64> = (0..k).map(|j| y[j] / norms[j]).collect();
    let fitted = &a * DVector::from_column_slice(&x);
    let fit_residual = rows
        .iter()
        .enumerate()
        .map(|(r, row)| (fitted[r] - row.1).abs() / (1.0 + row.1.abs()))
        .fold(0.0, f64::max);
    Ok(Some((
        MeasuredCoefficients {
            alpha_w: x[0],
            alpha_4: x[1],
            alpha_2: x[2],
            alpha_0: x[3],
            alpha_winding: with_winding.then(|| x[4]),
        },
        fit_residual,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_large_and_underdetermined_requests() {
        let lat = TorusLattice::new(4, 5, 1.0).unwrap();
        assert!(matches!(calibrate(lat, 2, 0.5, 0, 6), Err(Error::DimensionCap { .. })));
        let lat = TorusLattice::new(2, 2, 1.0).unwrap();
        assert!(calibrate(lat, 1, 0.5, 0, 5).is_err());
    }

    #[test]
    fn ratio_is_inverse_c_squared() {
        let lat = TorusLattice::new(2, 3, 0.8).unwrap();
        for c in [0.4, 1.3] {
            let r = calibrate(lat, 1, c, 3, 8).unwrap();
            assert!(r.measured.alpha_winding.is_none());
            assert!((r.ratio_alpha2_alpha_w * c * c - 1.0).abs() < 1e-8, "{}", r.ratio_alpha2_alpha_w);
        }
    }
}
