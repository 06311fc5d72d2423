//! Block-sparse lattice Dirac operator
//! `D_{Γ,L} = D^YM(L) + ⊕_v γ ⊗ D_v` on `𝒮 ⊗ (ℂ^N)^V`.
//!
//! The hopping part puts `c·γ^μ ⊗ L_e` at block `(t(e), s(e))` and its adjoint
//! `c·γ^μ ⊗ L_e†` at `(s(e), t(e))`. Contributions of different edges to the
//! same block are summed, which matters on `n = 2` where `v ± ε_μ` coincide.
//! Full index of (vertex `v`, spinor `a`, colour `i`) is `(v·dim_s + a)·N + i`.

use std::collections::BTreeMap;

use crate::clifford::{build_gammas, CliffordBasis};
use crate::config::GaugeNetworkConfig;
use crate::error::{Error, Result};
use crate::lattice::TorusLattice;
use crate::matrix::{ComplexMatrix, HermitianMatrix};
use crate::reduce::{map_range, max_range, sum_range};

/// Default cap on the total operator dimension `dim_s·N·V`.
pub const DEFAULT_DIM_CAP: usize = 1 << 22;

/// Hopping normalisation `c = 1/(2l)`, which gives the Wilson term unit weight in d = 4.
pub fn half_inverse_spacing(lattice: &TorusLattice) -> f64 {
    0.5 / lattice.spacing()
}

#[derive(Debug, Clone)]
pub struct DiracOperator {
    lattice: TorusLattice,
    clifford: CliffordBasis,
    n_mat: usize,
    hopping: f64,
    /// `rows[u]` holds the non-zero blocks `D_{u,w}` sorted by `w`.
    rows: Vec<Vec<(usize, ComplexMatrix)>>,
}

impl DiracOperator {
    pub fn lattice(&self) -> &TorusLattice {
        &self.lattice
    }

    pub fn clifford(&self) -> &CliffordBasis {
        &self.clifford
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    pub fn block_dim(&self) -> usize {
        self.clifford.spinor_dim() * self.n_mat
    }

    pub fn dim(&self) -> usize {
        self.block_dim() * self.lattice.num_vertices()
    }

    pub fn block(&self, row: usize, col: usize) -> Option<&ComplexMatrix> {
        self.rows[row].iter().find(|(w, _)| *w == col).map(|(_, b)| b)
    }

    pub fn row_blocks(&self, row: usize) -> &[(usize, ComplexMatrix)] {
        &self.rows[row]
    }

    /// `max_{v,w} ‖D_{v,w} − D_{w,v}†‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        max_range(self.rows.len(), |u| {
            self.rows[u]
                .iter()
                .map(|(w, b)| match self.block(*w, u) {
                    Some(t) => b.max_abs_diff(&t.adjoint()),
                    None => b.max_abs(),
                })
                .fold(0.0, f64::max)
        })
    }

    /// `Tr(D⁴) = ‖D²‖_F²`, row by row without materialising `D`.
    pub fn trace_fourth(&self) -> f64 {
        sum_range(self.rows.len(), |u| {
            let mut square: BTreeMap<usize, ComplexMatrix> = BTreeMap::new();
            for (v, a) in &self.rows[u] {
                for (w, b) in &self.rows[*v] {
                    let p = a * b;
                    match square.get_mut(w) {
                        Some(acc) => acc.add_assign(&p),
                        None => {
                            square.insert(*w, p);
                        }
                    }
                }
            }
            square.values().map(|m| m.frobenius_sq()).sum()
        })
    }

    /// Dense matrix; only sensible for small lattices.
    pub fn to_dense(&self) -> ComplexMatrix {
        let b = self.block_dim();
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for (u, row) in self.rows.iter().enumerate() {
            for (w, blk) in row {
                for i in 0..b {
                    for j in 0..b {
                        out.set(u * b + i, w * b + j, blk.get(i, j));
                    }
                }
            }
        }
        out
    }

    /// Eigenvalues of the dense operator, ascending.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let h = HermitianMatrix::new(self.to_dense())?;
        Ok(h.eigh()?.0)
    }
}

/// Builds `D_{Γ,L}` with hopping normalisation `c`, refusing operators larger than `cap`.
pub fn assemble_dirac_capped(config: &GaugeNetworkConfig, c: f64, cap: usize) -> Result<DiracOperator> {
    if !c.is_finite() {
        return Err(Error::NonFinite);
    }
    let lattice = *config.lattice();
    let clifford = build_gammas(lattice.dim())?;
    let n_mat = config.matrix_size();
    let dim = clifford.spinor_dim() * n_mat * lattice.num_vertices();
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    let hop: Vec<ComplexMatrix> = clifford.gammas().iter().map(|g| g.scale(c)).collect();
    let rows = map_range(lattice.num_vertices(), |u| {
        let mut row: BTreeMap<usize, ComplexMatrix> = BTreeMap::new();
        let mut add = |w: usize, m: ComplexMatrix| match row.get_mut(&w) {
            Some(acc) => acc.add_assign(&m),
            None => {
                row.insert(w, m);
            }
        };
        add(u, clifford.chirality().kron(config.higgs(u).matrix()));
        for (mu, gamma) in hop.iter().enumerate() {
            // u is the source of (u, μ): block (u, t) = c γ^μ ⊗ L_e†.
            let out_edge = lattice.edge_index(u, mu);
            add(lattice.edge_target(out_edge), gamma.kron(&config.link(out_edge).adjoint().into_matrix()));
            // u is the target of (u − ε_μ, μ): block (u, s) = c γ^μ ⊗ L_e.
            let src = lattice.shift(u, mu, false);
            let in_edge = lattice.edge_index(src, mu);
            add(src, gamma.kron(config.link(in_edge).matrix()));
        }
        row.into_iter().collect()
    });
    Ok(DiracOperator { lattice, clifford, n_mat, hopping: c, rows })
}

pub fn assemble_dirac(config: &GaugeNetworkConfig, c: f64) -> Result<DiracOperator> {
    assemble_dirac_capped(config, c, DEFAULT_DIM_CAP)
}

/// `S = l^d · Tr(D⁴)` via the block-sparse square.
pub fn spectral_action(config: &GaugeNetworkConfig, c: f64) -> Result<f64> {
    let op = assemble_dirac(config, c)?;
    Ok(config.lattice().spacing().powi(config.lattice().dim() as i32) * op.trace_fourth())
}

/// Dense oracle for [`spectral_action`]: materialises `D`, squares it and
/// takes the Frobenius norm. Refuses operators above `cap`.
pub fn spectral_action_dense(config: &GaugeNetworkConfig, c: f64, cap: usize) -> Result<f64> {
    let op = assemble_dirac_capped(config, c, cap)?;
    let dense = op.to_dense();
    let sq = &dense * &dense;
    Ok(config.lattice().spacing().powi(config.lattice().dim() as i32) * sq.frobenius_sq())
}
