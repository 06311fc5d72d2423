//! Trigonometric-polynomial fields with Hermitian matrix coefficients.
//!
//! Each component is `Σ_modes C·cos(2π k·x / T + φ)`, so every field value is
//! Hermitian and every integral over a period is computed exactly by a
//! Riemann sum on a fine enough grid.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix, C64};
use crate::reduce::sum_range;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierMode {
    pub k: Vec<i64>,
    pub coeff: HermitianMatrix,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothFieldSpec {
    /// Period `T` per side.
    pub period: f64,
    pub d: usize,
    #[serde(rename = "N")]
    pub n_mat: usize,
    /// Modes of `A_μ`, one list per direction.
    pub gauge: Vec<Vec<FourierMode>>,
    /// Modes of `Φ`.
    #[serde(default)]
    pub higgs: Vec<FourierMode>,
}

fn eval(modes: &[FourierMode], n_mat: usize, period: f64, x: &[f64]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n_mat, n_mat);
    for m in modes {
        let arg = 2.0 * PI * dot(&m.k, x) / period + m.phase;
        out.add_assign(&m.coeff.matrix().scale(arg.cos()));
    }
    out
}

fn eval_derivative(modes: &[FourierMode], n_mat: usize, period: f64, x: &[f64], nu: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n_mat, n_mat);
    for m in modes {
        if m.k[nu] == 0 {
            continue;
        }
        let w = 2.0 * PI * m.k[nu] as f64 / period;
        let arg = 2.0 * PI * dot(&m.k, x) / period + m.phase;
        out.add_assign(&m.coeff.matrix().scale(-w * arg.sin()));
    }
    out
}

fn dot(k: &[i64], x: &[f64]) -> f64 {
    k.iter().zip(x).map(|(a, b)| *a as f64 * b).sum()
}

fn herm(m: ComplexMatrix) -> HermitianMatrix {
    HermitianMatrix::symmetrize(m).expect("field values are square and finite")
}

impl SmoothFieldSpec {
    /// Field with `A ≡ 0` and `Φ ≡ 0`.
    pub fn zero(d: usize, n_mat: usize, period: f64) -> Self {
        Self { period, d, n_mat, gauge: vec![Vec::new(); d], higgs: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix_size(&self) -> usize {
        self.n_mat
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn validate(&self) -> Result<()> {
        if self.d != 2 && self.d != 4 {
            return Err(Error::UnsupportedDimension(self.d));
        }
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::Invalid(format!("field period must be positive, got {}", self.period)));
        }
        if self.n_mat == 0 {
            return Err(Error::Invalid("matrix size N must be at least 1".into()));
        }
        if self.gauge.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: self.gauge.len() });
        }
        for m in self.gauge.iter().flatten().chain(&self.higgs) {
            if m.k.len() != self.d {
                return Err(Error::DimensionMismatch { expected: self.d, found: m.k.len() });
            }
            if m.coeff.dim() != self.n_mat {
                return Err(Error::DimensionMismatch { expected: self.n_mat, found: m.coeff.dim() });
            }
            if !m.phase.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(())
    }

    /// Largest `|k_i|` over all modes and components.
    pub fn k_max(&self) -> usize {
        self.gauge
            .iter()
            .flatten()
            .chain(&self.higgs)
            .flat_map(|m| m.k.iter().map(|k| k.unsigned_abs() as usize))
            .max()
            .unwrap_or(0)
    }

    /// Smallest grid that integrates quartic expressions in the fields exactly.
    pub fn exact_grid(&self) -> usize {
        4 * self.k_max() + 2
    }

    pub fn gauge_potential(&self, mu: usize, x: &[f64]) -> HermitianMatrix {
        herm(eval(&self.gauge[mu], self.n_mat, self.period, x))
    }

    /// `∂_ν A_μ`.
    pub fn gauge_derivative(&self, mu: usize, nu: usize, x: &[f64]) -> HermitianMatrix {
        herm(eval_derivative(&self.gauge[mu], self.n_mat, self.period, x, nu))
    }

    pub fn phi(&self, x: &[f64]) -> HermitianMatrix {
        herm(eval(&self.higgs, self.n_mat, self.period, x))
    }

    pub fn phi_derivative(&self, nu: usize, x: &[f64]) -> HermitianMatrix {
        herm(eval_derivative(&self.higgs, self.n_mat, self.period, x, nu))
    }

    /// `∂_μΦ − i[A_μ, Φ]`.
    pub fn covariant_phi_derivative(&self, mu: usize, x: &[f64]) -> HermitianMatrix {
        let a = self.gauge_potential(mu, x);
        let phi = self.phi(x);
        let comm = a.matrix().commutator(phi.matrix()).scale_complex(C64::new(0.0, 1.0));
        herm(self.phi_derivative(mu, x).matrix() - &comm)
    }
}

/// `F_{μν} = ∂_μA_ν − ∂_νA_μ + i[A_μ, A_ν]`.
pub fn curvature(fields: &SmoothFieldSpec, x: &[f64], mu: usize, nu: usize) -> Result<HermitianMatrix> {
    if mu == nu {
        return Err(Error::SameDirection(mu));
    }
    if mu >= fields.d || nu >= fields.d {
        return Err(Error::Invalid(format!("direction out of range for d={}", fields.d)));
    }
    let a_mu = fields.gauge_potential(mu, x);
    let a_nu = fields.gauge_potential(nu, x);
    let d_mu_a_nu = fields.gauge_derivative(nu, mu, x);
    let d_nu_a_mu = fields.gauge_derivative(mu, nu, x);
    let comm = a_mu.matrix().commutator(a_nu.matrix()).scale_complex(C64::new(0.0, 1.0));
    Ok(herm(&(d_mu_a_nu.matrix() - d_nu_a_mu.matrix()) + &comm))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    pub grid: usize,
    /// Whether the grid is fine enough for the rule to be exact.
    pub exact: bool,
}

/// Riemann sum of `f` over the torus on a `quad_n^d` grid.
pub fn quadrature<F>(fields: &SmoothFieldSpec, quad_n: usize, f: F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    let d = fields.d;
    let h = fields.period / quad_n as f64;
    let total = quad_n.pow(d as u32);
    let sum = sum_range(total, |idx| {
        let mut rest = idx;
        let mut x = vec![0.0; d];
        for slot in x.iter_mut().rev() {
            *slot = h * (rest % quad_n) as f64;
            rest /= quad_n;
        }
        f(&x)
    });
    sum * h.powi(d as i32)
}

/// `I_YM = ∫ Σ_{μ<ν} tr(F_{μν}²)` over one period cell.
///
/// With `strict` the call is refused when `quad_n < 4·k_max + 2`; otherwise
/// the value is returned with `exact = false`.
pub fn ym_integral(fields: &SmoothFieldSpec, quad_n: usize, strict: bool) -> Result<Quadrature> {
    fields.validate()?;
    let required = fields.exact_grid();
    let exact = quad_n >= required;
    if !exact && strict {
        return Err(Error::QuadratureTooCoarse { quad_n, required });
    }
    let d = fields.d;
    let value = quadrature(fields, quad_n, |x| {
        let mut acc = 0.0;
        for mu in 0..d {
            for nu in (mu + 1)..d {
                let f = curvature(fields, x, mu, nu).expect("mu != nu");
                acc += f.trace_pow(2);
            }
        }
        acc
    });
    Ok(Quadrature { value, grid: quad_n, exact })
}
