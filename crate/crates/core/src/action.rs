//! Wilson action, Higgs terms and the exact decomposition of the spectral
//! action on the torus.
//!
//! Expanding `Tr((H + Δ)⁴)` with `H` the hopping part and `Δ = ⊕ γ ⊗ D_v`
//! gives, on any torus,
//!
//! ```text
//! S = α_W·W + α_4·T4 + α_2·T2edge + α_0 + Ω
//! α_W = 4c⁴l^d·s   α_4 = l^d·s   α_2 = 4c²l^d·s   α_0 = c⁴l^d·V·N·s·2d(4d−1)
//! ```
//!
//! with `s = dim_s`. Terms odd in `Δ` vanish because they carry an odd number
//! of gamma matrices. `Ω` collects closed walks of length ≤ 4 that wind around
//! the torus; it is identically zero for `n = 3` and `n ≥ 5` and is computed
//! here by explicit walk enumeration.

use serde::{Deserialize, Serialize};

use crate::clifford::build_gammas;
use crate::config::GaugeNetworkConfig;
use crate::dirac::spectral_action;
use crate::error::{Error, Result};
use crate::lattice::{Plaquette, TorusLattice};
use crate::matrix::{ComplexMatrix, UnitaryMatrix, C64};
use crate::reduce::{map_range, max_range, pairwise_sum, sum_range};

/// Precondition tolerance of [`eqb_collapse`].
pub const EQB_PRECONDITION_TOL: f64 = 1e-8;

/// `L_{e₄}† L_{e₃}† L_{e₂} L_{e₁}` for the plaquette at `base` in the `(mu, nu)` plane.
pub fn plaquette_holonomy_at(config: &GaugeNetworkConfig, base: usize, mu: usize, nu: usize) -> UnitaryMatrix {
    let [e1, e2, e3, e4] = config.lattice().plaquette_edge_indices(base, mu, nu);
    let l = |e| config.link(e);
    l(e4).adjoint().then_after(&l(e3).adjoint()).then_after(l(e2)).then_after(l(e1))
}

pub fn plaquette_holonomy(config: &GaugeNetworkConfig, p: &Plaquette) -> Result<UnitaryMatrix> {
    if p.mu >= p.nu || p.nu >= config.lattice().dim() {
        return Err(Error::Invalid(format!("bad plaquette directions ({}, {})", p.mu, p.nu)));
    }
    let base = config.lattice().vertex_index(&p.base)?;
    Ok(plaquette_holonomy_at(config, base, p.mu, p.nu))
}

/// `W(L) = −Σ_p tr(U_p + U_p†)`, each geometric square counted once.
pub fn wilson_action(config: &GaugeNetworkConfig) -> f64 {
    let lat = config.lattice();
    let pairs = lat.direction_pairs();
    let per = pairs.len();
    -sum_range(lat.num_plaquettes(), |p| {
        let (mu, nu) = pairs[p % per];
        2.0 * plaquette_holonomy_at(config, p / per, mu, nu).matrix().trace().expect("square").re
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiggsTerms {
    /// `Σ_v tr D_v⁴`.
    pub t4: f64,
    /// `Σ_e tr(D_s² + D_t² − L†D_t L D_s)`.
    pub t2edge: f64,
    pub per_edge: Vec<f64>,
}

/// `tr(D_s² + D_t² − L†D_tLD_s)` for one edge.
fn edge_term(config: &GaugeNetworkConfig, e: usize) -> C64 {
    let lat = config.lattice();
    let ds = config.higgs(lat.edge_source(e)).matrix();
    let dt = config.higgs(lat.edge_target(e)).matrix();
    let l = config.link(e).matrix();
    let pulled = &(&l.adjoint() * dt) * l;
    ds.trace_product(ds) + dt.trace_product(dt) - pulled.trace_product(ds)
}

pub fn higgs_terms(config: &GaugeNetworkConfig) -> HiggsTerms {
    let lat = config.lattice();
    let quartic = map_range(lat.num_vertices(), |v| config.higgs(v).trace_pow(4));
    let per_edge = map_range(lat.num_edges(), |e| edge_term(config, e).re);
    HiggsTerms { t4: pairwise_sum(&quartic), t2edge: pairwise_sum(&per_edge), per_edge }
}

/// Largest imaginary part among the per-edge terms (they are real in exact arithmetic).
pub fn edge_terms_max_imaginary(config: &GaugeNetworkConfig) -> f64 {
    max_range(config.lattice().num_edges(), |e| edge_term(config, e).im.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub alpha_w: f64,
    pub alpha_4: f64,
    pub alpha_2: f64,
    pub alpha_0: f64,
}

impl Coefficients {
    pub fn new(lattice: &TorusLattice, n_mat: usize, c: f64) -> Self {
        let d = lattice.dim();
        let s = (1usize << (d / 2)) as f64;
        let vol = lattice.spacing().powi(d as i32);
        let c2 = c * c;
        let c4 = c2 * c2;
        let walks = (2 * d * (4 * d - 1)) as f64;
        Self {
            alpha_w: 4.0 * c4 * vol * s,
            alpha_4: vol * s,
            alpha_2: 4.0 * c2 * vol * s,
            alpha_0: vol * c4 * lattice.num_vertices() as f64 * n_mat as f64 * s * walks,
        }
    }
}

/// Contributions of closed 4-step words in the Dirac operator, split by
/// whether the lifted walk on `ℤ^d` closes (contractible) or winds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkSum {
    pub contractible: f64,
    pub winding: f64,
}

#[derive(Clone, Copy)]
enum Move {
    Stay,
    Forward(usize),
    Backward(usize),
}

/// Enumerates every closed word of length 4 in `{γ⊗D_v, c γ^μ⊗L_e, c γ^μ⊗L_e†}`.
///
/// With `winding_only` the walk is pruned as soon as it cannot return to its
/// start, and contractible walks are not accumulated; lattices with `n ≥ 5`
/// return zero immediately since no walk of length 4 can wrap.
pub fn walk_sum(config: &GaugeNetworkConfig, c: f64, winding_only: bool) -> Result<WalkSum> {
    let lat = *config.lattice();
    if winding_only && lat.sites() >= 5 {
        return Ok(WalkSum { contractible: 0.0, winding: 0.0 });
    }
    let cl = build_gammas(lat.dim())?;
    let d = lat.dim();
    let mut moves = vec![Move::Stay];
    moves.extend((0..d).map(Move::Forward));
    moves.extend((0..d).map(Move::Backward));
    let vol = lat.spacing().powi(d as i32);

    struct Walker<'a> {
        lat: TorusLattice,
        config: &'a GaugeNetworkConfig,
        chir: &'a ComplexMatrix,
        gammas: &'a [ComplexMatrix],
        moves: &'a [Move],
        c: f64,
        start: usize,
        winding_only: bool,
        contractible: f64,
        winding: f64,
    }

    impl Walker<'_> {
        fn torus_distance(&self, a: usize, b: usize) -> usize {
            let (va, vb) = (self.lat.vertex(a), self.lat.vertex(b));
            let n = self.lat.sites();
            va.0.iter().zip(&vb.0).map(|(x, y)| {
                let delta = (x + n - y) % n;
                delta.min(n - delta)
            }).sum()
        }

        fn go(&mut self, depth: usize, at: usize, disp: &mut [i64], spin: &ComplexMatrix, colour: &ComplexMatrix) {
            if depth == 4 {
                if at != self.start {
                    return;
                }
                let value = (spin.trace().expect("square") * colour.trace().expect("square")).re;
                if disp.iter().all(|&x| x == 0) {
                    self.contractible += value;
                } else {
                    self.winding += value;
                }
                return;
            }
            if self.winding_only && self.torus_distance(at, self.start) > 4 - depth {
                return;
            }
            for &mv in self.moves {
                let (next, sx, cx, dmu, step) = match mv {
                    Move::Stay => (at, self.chir.clone(), self.config.higgs(at).matrix().clone(), 0, 0),
                    Move::Forward(mu) => {
                        let e = self.lat.edge_index(at, mu);
                        (self.lat.edge_target(e), self.gammas[mu].clone(), self.config.link(e).matrix().scale(self.c), mu, 1)
                    }
                    Move::Backward(mu) => {
                        let src = self.lat.shift(at, mu, false);
                        let e = self.lat.edge_index(src, mu);
                        (src, self.gammas[mu].clone(), self.config.link(e).adjoint().into_matrix().scale(self.c), mu, -1)
                    }
                };
                disp[dmu] += step;
                self.go(depth + 1, next, disp, &(&sx * spin), &(&cx * colour));
                disp[dmu] -= step;
            }
        }
    }

    let s = cl.spinor_dim();
    let nm = config.matrix_size();
    let per_vertex = map_range(lat.num_vertices(), |v| {
        let mut w = Walker {
            lat,
            config,
            chir: cl.chirality(),
            gammas: cl.gammas(),
            moves: &moves,
            c,
            start: v,
            winding_only,
            contractible: 0.0,
            winding: 0.0,
        };
        let mut disp = vec![0i64; d];
        w.go(0, v, &mut disp, &ComplexMatrix::identity(s), &ComplexMatrix::identity(nm));
        (w.contractible, w.winding)
    });
    let contractible: Vec<f64> = per_vertex.iter().map(|p| p.0).collect();
    let winding: Vec<f64> = per_vertex.iter().map(|p| p.1).collect();
    Ok(WalkSum { contractible: vol * pairwise_sum(&contractible), winding: vol * pairwise_sum(&winding) })
}

/// Finite-size term `Ω` of the decomposition (zero for `n = 3` and `n ≥ 5`).
pub fn winding_term(config: &GaugeNetworkConfig, c: f64) -> Result<f64> {
    Ok(walk_sum(config, c, true)?.winding)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub lattice: TorusLattice,
    #[serde(rename = "N")]
    pub n_mat: usize,
    pub c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(rename = "T4")]
    pub t4: f64,
    #[serde(rename = "T2edge")]
    pub t2edge: f64,
    /// Winding-walk term `Ω`.
    pub winding: f64,
    pub coefficients: Coefficients,
    /// `S − (α_W W + α_4 T4 + α_2 T2edge + α_0 + Ω)`.
    pub residual: f64,
}

impl DecompositionReport {
    /// `|residual| / (1 + |S|)`.
    pub fn relative_residual(&self) -> f64 {
        self.residual.abs() / (1.0 + self.s.abs())
    }

    /// `S − α_W·W − Ω`: the configuration-dependent part beyond Yang-Mills.
    pub fn non_wilson_part(&self) -> f64 {
        self.s - self.coefficients.alpha_w * self.w - self.winding
    }
}

pub fn decompose(config: &GaugeNetworkConfig, c: f64) -> Result<DecompositionReport> {
    let s = spectral_action(config, c)?;
    let w = wilson_action(config);
    let h = higgs_terms(config);
    let winding = winding_term(config, c)?;
    let coefficients = Coefficients::new(config.lattice(), config.matrix_size(), c);
    let model = coefficients.alpha_w * w + coefficients.alpha_4 * h.t4 + coefficients.alpha_2 * h.t2edge + coefficients.alpha_0 + winding;
    Ok(DecompositionReport {
        lattice: *config.lattice(),
        n_mat: config.matrix_size(),
        c,
        seed: None,
        s,
        w,
        t4: h.t4,
        t2edge: h.t2edge,
        winding,
        coefficients,
        residual: s - model,
    })
}

/// `max_e |tr(D_t² − L†D_tLD_s)|`.
pub fn edge_cancellation(config: &GaugeNetworkConfig) -> f64 {
    let lat = config.lattice();
    max_range(lat.num_edges(), |e| {
        let ds = config.higgs(lat.edge_source(e)).matrix();
        let dt = config.higgs(lat.edge_target(e)).matrix();
        let l = config.link(e).matrix();
        let pulled = &(&l.adjoint() * dt) * l;
        (dt.trace_product(dt) - pulled.trace_product(ds)).norm()
    })
}

/// `tr(D_v^m)` in vertex order.
pub fn vertex_trace_profile(config: &GaugeNetworkConfig, m: u32) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::Invalid("trace power m must be at least 1".into()));
    }
    Ok(map_range(config.lattice().num_vertices(), |v| config.higgs(v).trace_pow(m)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqbCollapse {
    pub lhs: f64,
    pub rhs: f64,
}

/// Under the edge constraint the Higgs block collapses to a vertex sum:
/// `α_4·T4 + α_2·T2edge = Σ_v (α_4 tr D_v⁴ + α_2·d·tr D_v²)`.
pub fn eqb_collapse(config: &GaugeNetworkConfig, c: f64) -> Result<EqbCollapse> {
    let residual = config.check_representation();
    if residual.is_nan() || residual > EQB_PRECONDITION_TOL {
        return Err(Error::ConstraintViolated { residual, tolerance: EQB_PRECONDITION_TOL });
    }
    let lat = config.lattice();
    let k = Coefficients::new(lat, config.matrix_size(), c);
    let h = higgs_terms(config);
    let d = lat.dim() as f64;
    let rhs = sum_range(lat.num_vertices(), |v| {
        let dv = config.higgs(v);
        k.alpha_4 * dv.trace_pow(4) + k.alpha_2 * d * dv.trace_pow(2)
    });
    Ok(EqbCollapse { lhs: k.alpha_4 * h.t4 + k.alpha_2 * h.t2edge, rhs })
}
