//! Continuum-limit sweeps of the Wilson and Higgs observables.
//!
//! Each sweep point samples the smooth fields on a lattice with `l = T/n` and
//! compares a scaled lattice sum with its continuum integral:
//!
//! | observable | lattice value                                  | target                              |
//! |------------|------------------------------------------------|-------------------------------------|
//! | `wilson`   | `l^{d−4}·(W + 2N·P)`                           | `I_YM = ∫Σ_{μ<ν} tr F_{μν}²`        |
//! | `quartic`  | `l^d·Σ_v tr D_v⁴`                              | `∫ tr Φ⁴`                           |
//! | `kinetic`  | `l^{d−2}·Σ_e tr((L_e†D_tL_e − D_s)²)`          | `∫ Σ_μ tr((∂_μΦ − i[A_μ,Φ])²)`      |
//! | `mass`     | `l^d·Σ_e ½ tr(D_s² + D_t²)`                    | `d·∫ tr Φ²`                         |

use serde::{Deserialize, Serialize};

use crate::action::wilson_action;
use crate::config::{from_continuum, GaugeNetworkConfig};
use crate::continuum::fields::{quadrature, ym_integral, SmoothFieldSpec};
use crate::continuum::fit::{fit_order, FitResult};
use crate::error::{Error, Result};
use crate::lattice::TorusLattice;
use crate::matrix::{exp_i_hermitian, UnitaryMatrix};
use crate::reduce::{map_range, map_slice, sum_range};

/// Targets with magnitude at or below this switch a report to absolute errors.
pub const ZERO_TARGET: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMode {
    Relative,
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub n: usize,
    pub l: f64,
    pub value: f64,
    pub target: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub observable: String,
    pub mode: ErrorMode,
    pub points: Vec<ConvergencePoint>,
    /// `None` when fewer than three errors are positive (e.g. exact agreement).
    pub fit: Option<FitResult>,
    /// Ratio `value/target` at the finest spacing.
    pub kappa_measured: Option<f64>,
}

impl ConvergenceReport {
    fn build(observable: &str, points: Vec<ConvergencePoint>) -> Self {
        let mode = if points.iter().all(|p| p.target.abs() > ZERO_TARGET) { ErrorMode::Relative } else { ErrorMode::Absolute };
        let errs: Vec<(f64, f64)> = points
            .iter()
            .map(|p| (p.l, if mode == ErrorMode::Relative { p.rel_err } else { p.abs_err }))
            .collect();
        let fit = fit_order(&errs).ok();
        let kappa_measured = points.last().filter(|p| p.target.abs() > ZERO_TARGET).map(|p| p.value / p.target);
        Self { observable: observable.to_string(), mode, points, fit, kappa_measured }
    }

    pub fn order(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| f.order)
    }

    pub fn max_abs_err(&self) -> f64 {
        self.points.iter().map(|p| p.abs_err).fold(0.0, f64::max)
    }

    /// CSV table with columns `n,l,observable,target,abs_err,rel_err`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,l,observable,target,abs_err,rel_err\n");
        for p in &self.points {
            out.push_str(&format!("{},{:e},{:e},{:e},{:e},{:e}\n", p.n, p.l, p.value, p.target, p.abs_err, p.rel_err));
        }
        out
    }
}

fn point(n: usize, l: f64, value: f64, target: f64) -> ConvergencePoint {
    let abs_err = (value - target).abs();
    let rel_err = if target.abs() > ZERO_TARGET { abs_err / target.abs() } else { f64::NAN };
    ConvergencePoint { n, l, value, target, abs_err, rel_err }
}

fn check_sizes(n_list: &[usize]) -> Result<()> {
    if n_list.len() < 3 {
        return Err(Error::TooFewPoints(n_list.len()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] < 2 {
        return Err(Error::UnsortedSweep);
    }
    Ok(())
}

fn sample(fields: &SmoothFieldSpec, n: usize) -> Result<GaugeNetworkConfig> {
    let lattice = TorusLattice::new(fields.dim(), n, fields.period() / n as f64)?;
    from_continuum(lattice, fields)
}

/// `l^{d−4}·(W + 2N·P)`, the Wilson action with its vacuum value removed.
pub fn subtracted_wilson(config: &GaugeNetworkConfig) -> f64 {
    let lat = config.lattice();
    let w_hat = wilson_action(config) + 2.0 * (config.matrix_size() * lat.num_plaquettes()) as f64;
    w_hat * lat.spacing().powi(lat.dim() as i32 - 4)
}

/// Quadrature grid used for continuum targets: the exactness threshold, at least 8.
fn target_grid(fields: &SmoothFieldSpec) -> usize {
    fields.exact_grid().max(8)
}

/// Sweeps `l^{d−4}·Ŵ` against `I_YM` over `n_list`.
pub fn wilson_limit_sweep(fields: &SmoothFieldSpec, n_list: &[usize]) -> Result<ConvergenceReport> {
    fields.validate()?;
    check_sizes(n_list)?;
    let target = ym_integral(fields, target_grid(fields), true)?.value;
    let values = map_slice(n_list, |&n| sample(fields, n).map(|c| subtracted_wilson(&c)));
    let mut points = Vec::with_capacity(n_list.len());
    for (&n, v) in n_list.iter().zip(values) {
        points.push(point(n, fields.period() / n as f64, v?, target));
    }
    Ok(ConvergenceReport::build("wilson", points))
}

/// Higgs-sector lattice observables of one configuration: (quartic, kinetic, mass).
pub fn higgs_observables(config: &GaugeNetworkConfig) -> (f64, f64, f64) {
    let lat = config.lattice();
    let d = lat.dim() as i32;
    let l = lat.spacing();
    let quartic = sum_range(lat.num_vertices(), |v| config.higgs(v).trace_pow(4)) * l.powi(d);
    let kinetic = sum_range(lat.num_edges(), |e| {
        let ds = config.higgs(lat.edge_source(e)).matrix();
        let dt = config.higgs(lat.edge_target(e)).matrix();
        let u = config.link(e).matrix();
        let diff = &(&(&u.adjoint() * dt) * u) - ds;
        diff.trace_product(&diff).re
    }) * l.powi(d - 2);
    let mass = sum_range(lat.num_edges(), |e| {
        0.5 * (config.higgs(lat.edge_source(e)).trace_pow(2) + config.higgs(lat.edge_target(e)).trace_pow(2))
    }) * l.powi(d);
    (quartic, kinetic, mass)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiggsSweepReport {
    pub quartic: ConvergenceReport,
    pub kinetic: ConvergenceReport,
    pub mass: ConvergenceReport,
}

/// Continuum targets `(∫trΦ⁴, ∫Σ_μ tr(D_μΦ)², d∫trΦ²)` by exact quadrature.
pub fn higgs_targets(fields: &SmoothFieldSpec) -> Result<(f64, f64, f64)> {
    fields.validate()?;
    let q = target_grid(fields);
    let d = fields.dim();
    let quartic = quadrature(fields, q, |x| fields.phi(x).trace_pow(4));
    let kinetic = quadrature(fields, q, |x| (0..d).map(|mu| fields.covariant_phi_derivative(mu, x).trace_pow(2)).sum());
    let mass = d as f64 * quadrature(fields, q, |x| fields.phi(x).trace_pow(2));
    Ok((quartic, kinetic, mass))
}

pub fn higgs_limit_sweep(fields: &SmoothFieldSpec, n_list: &[usize]) -> Result<HiggsSweepReport> {
    fields.validate()?;
    check_sizes(n_list)?;
    let (tq, tk, tm) = higgs_targets(fields)?;
    let values = map_slice(n_list, |&n| sample(fields, n).map(|c| higgs_observables(&c)));
    let (mut q, mut k, mut m) = (Vec::new(), Vec::new(), Vec::new());
    for (&n, v) in n_list.iter().zip(values) {
        let (vq, vk, vm) = v?;
        let l = fields.period() / n as f64;
        q.push(point(n, l, vq, tq));
        k.push(point(n, l, vk, tk));
        m.push(point(n, l, vm, tm));
    }
    Ok(HiggsSweepReport {
        quartic: ConvergenceReport::build("quartic", q),
        kinetic: ConvergenceReport::build("kinetic", k),
        mass: ConvergenceReport::build("mass", m),
    })
}

/// Lattice gauge transformation `U_v = exp(i χ(x_v))`, with `χ` given by the
/// Higgs modes of `chi`.
pub fn smooth_gauge(lattice: &TorusLattice, chi: &SmoothFieldSpec) -> Result<Vec<UnitaryMatrix>> {
    chi.validate()?;
    let out = map_range(lattice.num_vertices(), |v| exp_i_hermitian(&chi.phi(&lattice.position(v)), 1.0));
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum::fields::FourierMode;
    use crate::matrix::HermitianMatrix;
    use std::f64::consts::PI;

    fn higgs_wave(b: f64, t: f64) -> SmoothFieldSpec {
        let mut f = SmoothFieldSpec::zero(2, 1, t);
        f.higgs.push(FourierMode { k: vec![1, 0], coeff: HermitianMatrix::scalar(1, b), phase: 0.0 });
        f
    }

    #[test]
    fn flat_field_uses_absolute_errors() {
        let f = SmoothFieldSpec::zero(2, 2, 1.0);
        let r = wilson_limit_sweep(&f, &[4, 6, 8]).unwrap();
        assert_eq!(r.mode, ErrorMode::Absolute);
        assert!(r.points.iter().all(|p| p.value == 0.0));
        assert!(r.fit.is_none());
    }

    #[test]
    fn sweep_size_preconditions() {
        let f = SmoothFieldSpec::zero(2, 1, 1.0);
        assert!(matches!(wilson_limit_sweep(&f, &[4, 8]), Err(Error::TooFewPoints(2))));
        assert!(matches!(wilson_limit_sweep(&f, &[8, 4, 16]), Err(Error::UnsortedSweep)));
    }

    #[test]
    fn constant_higgs_has_no_kinetic_term() {
        let mut f = SmoothFieldSpec::zero(2, 2, 1.0);
        let c = HermitianMatrix::from_real_diagonal(&[0.3, -1.2]);
        f.higgs.push(FourierMode { k: vec![0, 0], coeff: c, phase: 0.0 });
        let r = higgs_limit_sweep(&f, &[3, 5, 7]).unwrap();
        assert!(r.kinetic.points.iter().all(|p| p.value == 0.0 && p.target == 0.0));
    }

    #[test]
    fn higgs_wave_kinetic_closed_form() {
        let (b, t) = (0.6, 1.5);
        let f = higgs_wave(b, t);
        let (_, kinetic, _) = higgs_targets(&f).unwrap();
        let want = (2.0 * PI * b / t).powi(2) * t * t / 2.0;
        assert!((kinetic - want).abs() < 1e-12 * want);
    }

    #[test]
    fn quartic_and_mass_exact_past_bandwidth() {
        let f = higgs_wave(0.6, 1.5);
        let r = higgs_limit_sweep(&f, &[5, 7, 9]).unwrap();
        for p in r.quartic.points.iter().chain(&r.mass.points) {
            assert!(p.rel_err <= 1e-10, "{p:?}");
        }
    }

    #[test]
    fn csv_layout() {
        let f = higgs_wave(0.6, 1.5);
        let r = higgs_limit_sweep(&f, &[5, 7, 9]).unwrap();
        let csv = r.kinetic.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,l,observable,target,abs_err,rel_err");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("5,"));
    }
}
