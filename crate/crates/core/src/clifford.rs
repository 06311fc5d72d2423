//! Euclidean gamma matrices and chirality for d = 2 and d = 4.
//!
//! Convention: in d = 2, `γ¹ = σx`, `γ² = σy`, `γ = σz`. In d = 4 the basis
//! is doubled with a tensor product:
//! `γ^{1,2,3} = σx ⊗ (σx, σy, σz)`, `γ⁴ = σy ⊗ 1`, `γ = σz ⊗ 1`.

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

#[derive(Debug, Clone)]
pub struct CliffordBasis {
    d: usize,
    gammas: Vec<ComplexMatrix>,
    chirality: ComplexMatrix,
}

fn pauli() -> [ComplexMatrix; 3] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        ComplexMatrix::from_row_major(2, 2, &[z, one, one, z]).unwrap(),
        ComplexMatrix::from_row_major(2, 2, &[z, -i, i, z]).unwrap(),
        ComplexMatrix::from_row_major(2, 2, &[one, z, z, -one]).unwrap(),
    ]
}

impl CliffordBasis {
    pub fn new(d: usize) -> Result<Self> {
        build_gammas(d)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Spinor dimension `2^{d/2}`.
    pub fn spinor_dim(&self) -> usize {
        self.chirality.rows()
    }

    /// `γ^{mu+1}` (directions are 0-based).
    pub fn gamma(&self, mu: usize) -> &ComplexMatrix {
        &self.gammas[mu]
    }

    pub fn gammas(&self) -> &[ComplexMatrix] {
        &self.gammas
    }

    pub fn chirality(&self) -> &ComplexMatrix {
        &self.chirality
    }

    /// Largest deviation from `{γ^μ, γ^ν} = 2δ^{μν}`, `{γ, γ^μ} = 0`, `γ² = 1`,
    /// Hermiticity, and tracelessness.
    pub fn invariant_defect(&self) -> f64 {
        let n = self.spinor_dim();
        let id = ComplexMatrix::identity(n);
        let zero = ComplexMatrix::zeros(n, n);
        let mut worst: f64 = 0.0;
        for (mu, a) in self.gammas.iter().enumerate() {
            for (nu, b) in self.gammas.iter().enumerate() {
                let ac = &(a * b) + &(b * a);
                let want = if mu == nu { id.scale(2.0) } else { zero.clone() };
                worst = worst.max(ac.max_abs_diff(&want));
            }
            let ac = &(a * &self.chirality) + &(&self.chirality * a);
            worst = worst.max(ac.max_abs());
            worst = worst.max(a.hermiticity_defect());
            worst = worst.max(a.trace().unwrap().norm());
        }
        let g = &self.chirality;
        worst = worst.max((g * g).max_abs_diff(&id));
        worst = worst.max(g.hermiticity_defect());
        worst.max(g.trace().unwrap().norm())
    }
}

/// Builds the fixed gamma-matrix basis for `d ∈ {2, 4}`.
pub fn build_gammas(d: usize) -> Result<CliffordBasis> {
    let [sx, sy, sz] = pauli();
    match d {
        2 => Ok(CliffordBasis { d, gammas: vec![sx, sy], chirality: sz }),
        4 => {
            let id = ComplexMatrix::identity(2);
            let gammas = vec![sx.kron(&sx), sx.kron(&sy), sx.kron(&sz), sy.kron(&id)];
            Ok(CliffordBasis { d, gammas, chirality: sz.kron(&id) })
        }
        other => Err(Error::UnsupportedDimension(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr(m: &ComplexMatrix) -> C64 {
        m.trace().unwrap()
    }

    #[test]
    fn invariants_hold() {
        for d in [2, 4] {
            let c = build_gammas(d).unwrap();
            assert_eq!(c.spinor_dim(), 1 << (d / 2));
            assert!(c.invariant_defect() <= 1e-12);
        }
        assert!(build_gammas(3).is_err());
    }

    #[test]
    fn two_point_traces() {
        let c2 = build_gammas(2).unwrap();
        assert!(tr(&(c2.gamma(0) * c2.gamma(1))).norm() < 1e-15);
        let c4 = build_gammas(4).unwrap();
        for mu in 0..4 {
            for nu in 0..4 {
                let want = if mu == nu { 4.0 } else { 0.0 };
                assert!((tr(&(c4.gamma(mu) * c4.gamma(nu))) - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn four_point_traces() {
        for d in [2, 4] {
            let c = build_gammas(d).unwrap();
            let s = c.spinor_dim() as f64;
            let g = c.chirality();
            for mu in 0..d {
                for nu in 0..d {
                    let (a, b) = (c.gamma(mu), c.gamma(nu));
                    let abab = tr(&(&(&(a * b) * a) * b));
                    let want = if mu == nu { s } else { -s };
                    assert!((abab - want).norm() < 1e-12);
                    let agbg = tr(&(&(&(a * g) * b) * g));
                    let want = if mu == nu { -s } else { 0.0 };
                    assert!((agbg - want).norm() < 1e-12);
                }
            }
        }
        // d = 4: tr(γ^μ γ γ^μ γ) = −4.
        let c = build_gammas(4).unwrap();
        for mu in 0..4 {
            let a = c.gamma(mu);
            let g = c.chirality();
            assert!((tr(&(&(&(a * g) * a) * g)) + 4.0).norm() < 1e-12);
        }
    }
}
