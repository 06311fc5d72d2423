//! Gauge-network configurations: a Hermitian `D_v` per vertex and a unitary
//! `L_e` per edge, generators for them, the edge constraint
//! `D_{t(e)} = L_e D_{s(e)} L_e†`, path transport and gauge transformations.

use serde::{Deserialize, Serialize};

use crate::continuum::fields::SmoothFieldSpec;
use crate::error::{Error, Result};
use crate::lattice::{DirectedPath, Orientation, TorusLattice};
use crate::matrix::{exp_i_hermitian, gue_hermitian, haar_unitary, ComplexMatrix, HermitianMatrix, UnitaryMatrix};
use crate::reduce::{map_range, max_range};
use crate::rng::{Domain, SeedStream};

/// Default constraint tolerance (absolute, max-norm) for `N ≤ 8`, O(1) entries.
pub const CONSTRAINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeNetworkConfig {
    lattice: TorusLattice,
    n_mat: usize,
    higgs: Vec<HermitianMatrix>,
    links: Vec<UnitaryMatrix>,
}

/// One eigenvalue of the base operator `D₀` and its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumLevel {
    pub value: f64,
    pub multiplicity: usize,
}

/// Input of the commutant construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstrainedSpec {
    pub base_spectrum: Vec<SpectrumLevel>,
    pub seed: u64,
}

impl ConstrainedSpec {
    pub fn new(base_spectrum: Vec<SpectrumLevel>, seed: u64) -> Self {
        Self { base_spectrum, seed }
    }

    /// Groups a flat eigenvalue list into levels (equal adjacent values merge).
    pub fn from_eigenvalues(values: &[f64], seed: u64) -> Self {
        let mut levels: Vec<SpectrumLevel> = Vec::new();
        for &v in values {
            match levels.iter_mut().find(|l| l.value == v) {
                Some(l) => l.multiplicity += 1,
                None => levels.push(SpectrumLevel { value: v, multiplicity: 1 }),
            }
        }
        Self { base_spectrum: levels, seed }
    }

    pub fn matrix_size(&self) -> usize {
        self.base_spectrum.iter().map(|l| l.multiplicity).sum()
    }

    pub fn validate(&self, n_mat: Option<usize>) -> Result<()> {
        let total = self.matrix_size();
        if self.base_spectrum.iter().any(|l| l.multiplicity == 0 || !l.value.is_finite()) || total == 0 {
            return Err(Error::Invalid("spectrum levels need finite values and positive multiplicities".into()));
        }
        if let Some(n) = n_mat {
            if n != total {
                return Err(Error::SpectrumMismatch { expected: n, found: total });
            }
        }
        Ok(())
    }

    /// `D₀ = diag(base_spectrum)` with multiplicities expanded.
    pub fn base_operator(&self) -> HermitianMatrix {
        let diag: Vec<f64> = self
            .base_spectrum
            .iter()
            .flat_map(|l| std::iter::repeat_n(l.value, l.multiplicity))
            .collect();
        HermitianMatrix::from_real_diagonal(&diag)
    }

    /// `max_v ‖D_v‖²` for the generated configs (spectral norm of `D₀`, squared).
    pub fn max_norm_sq(&self) -> f64 {
        self.base_spectrum.iter().map(|l| l.value * l.value).fold(0.0, f64::max)
    }
}

impl GaugeNetworkConfig {
    pub fn new(lattice: TorusLattice, n_mat: usize, higgs: Vec<HermitianMatrix>, links: Vec<UnitaryMatrix>) -> Result<Self> {
        if n_mat == 0 {
            return Err(Error::Invalid("matrix size N must be at least 1".into()));
        }
        if higgs.len() != lattice.num_vertices() {
            return Err(Error::DimensionMismatch { expected: lattice.num_vertices(), found: higgs.len() });
        }
        if links.len() != lattice.num_edges() {
            return Err(Error::DimensionMismatch { expected: lattice.num_edges(), found: links.len() });
        }
        for m in higgs.iter().map(|h| h.dim()).chain(links.iter().map(|u| u.dim())) {
            if m != n_mat {
                return Err(Error::DimensionMismatch { expected: n_mat, found: m });
            }
        }
        Ok(Self { lattice, n_mat, higgs, links })
    }

    /// `D_v = 0`, `L_e = 1`.
    pub fn trivial(lattice: TorusLattice, n_mat: usize) -> Self {
        Self {
            lattice,
            n_mat,
            higgs: vec![HermitianMatrix::zeros(n_mat); lattice.num_vertices()],
            links: vec![UnitaryMatrix::identity(n_mat); lattice.num_edges()],
        }
    }

    pub fn lattice(&self) -> &TorusLattice {
        &self.lattice
    }

    pub fn matrix_size(&self) -> usize {
        self.n_mat
    }

    pub fn higgs(&self, vertex: usize) -> &HermitianMatrix {
        &self.higgs[vertex]
    }

    pub fn link(&self, edge: usize) -> &UnitaryMatrix {
        &self.links[edge]
    }

    pub fn higgs_all(&self) -> &[HermitianMatrix] {
        &self.higgs
    }

    pub fn links_all(&self) -> &[UnitaryMatrix] {
        &self.links
    }

    pub fn with_higgs(mut self, higgs: Vec<HermitianMatrix>) -> Result<Self> {
        self.higgs = higgs;
        Self::new(self.lattice, self.n_mat, self.higgs, self.links)
    }

    pub fn with_links(mut self, links: Vec<UnitaryMatrix>) -> Result<Self> {
        self.links = links;
        Self::new(self.lattice, self.n_mat, self.higgs, self.links)
    }

    /// Edge-wise constraint residual `max_e ‖D_t − L D_s L†‖_max`.
    pub fn check_representation(&self) -> f64 {
        let lat = self.lattice;
        max_range(lat.num_edges(), |e| {
            let ds = self.higgs[lat.edge_source(e)].matrix();
            let dt = self.higgs[lat.edge_target(e)].matrix();
            dt.max_abs_diff(&self.links[e].conjugate(ds))
        })
    }

    /// Ordered product along `path`, rightmost factor first:
    /// `L_β = X_n ··· X_1` with `X = L_e` forward and `L_e†` reverse.
    pub fn path_holonomy(&self, path: &DirectedPath) -> Result<UnitaryMatrix> {
        let mut hol = UnitaryMatrix::identity(self.n_mat);
        let Some(first) = path.steps.first() else {
            return Ok(hol);
        };
        let e0 = self.lattice.edge_index_of(&first.edge)?;
        let start = match first.orientation {
            Orientation::Forward => self.lattice.edge_source(e0),
            Orientation::Reverse => self.lattice.edge_target(e0),
        };
        self.lattice.walk(start, path)?;
        for step in &path.steps {
            let e = self.lattice.edge_index_of(&step.edge)?;
            let x = match step.orientation {
                Orientation::Forward => self.links[e].clone(),
                Orientation::Reverse => self.links[e].adjoint(),
            };
            hol = x.then_after(&hol);
        }
        Ok(hol)
    }

    /// `D_v → U_v D_v U_v†`, `L_e → U_{t(e)} L_e U_{s(e)}†`.
    pub fn gauge_transform(&self, gauge: &[UnitaryMatrix]) -> Result<Self> {
        let lat = self.lattice;
        if gauge.len() != lat.num_vertices() {
            return Err(Error::DimensionMismatch { expected: lat.num_vertices(), found: gauge.len() });
        }
        if let Some(u) = gauge.iter().find(|u| u.dim() != self.n_mat) {
            return Err(Error::DimensionMismatch { expected: self.n_mat, found: u.dim() });
        }
        let higgs = map_range(lat.num_vertices(), |v| self.higgs[v].conjugate_by(&gauge[v]));
        let links = map_range(lat.num_edges(), |e| {
            let ut = &gauge[lat.edge_target(e)];
            let us = &gauge[lat.edge_source(e)];
            ut.then_after(&self.links[e]).then_after(&us.adjoint())
        });
        Ok(Self { lattice: lat, n_mat: self.n_mat, higgs, links })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ConfigRecord::from_config(self, None))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ConfigRecord>(text)?.into_config()
    }
}

/// Independent Gaussian `D_v` (entry scale `higgs_scale`) and Haar `L_e`.
/// Streams are split by vertex and edge index.
pub fn random_unconstrained(lattice: TorusLattice, n_mat: usize, higgs_scale: f64, seeds: &SeedStream) -> Result<GaugeNetworkConfig> {
    if n_mat == 0 {
        return Err(Error::Invalid("matrix size N must be at least 1".into()));
    }
    if !(higgs_scale.is_finite() && higgs_scale >= 0.0) {
        return Err(Error::Invalid(format!("higgs scale must be finite and non-negative, got {higgs_scale}")));
    }
    let higgs = map_range(lattice.num_vertices(), |v| {
        gue_hermitian(n_mat, higgs_scale, &mut seeds.stream(Domain::VertexHiggs, v as u64))
    });
    let links = map_range(lattice.num_edges(), |e| haar_unitary(n_mat, &mut seeds.stream(Domain::EdgeLink, e as u64)));
    GaugeNetworkConfig::new(lattice, n_mat, higgs, links)
}

/// Commutant construction: `D_v = U_v D₀ U_v†` with Haar `U_v`, and
/// `L_e = U_{t(e)} W_e U_{s(e)}†` with `W_e` Haar inside each eigenspace of `D₀`.
pub fn random_constrained(lattice: TorusLattice, spec: &ConstrainedSpec) -> Result<GaugeNetworkConfig> {
    spec.validate(None)?;
    let n_mat = spec.matrix_size();
    let seeds = SeedStream::new(spec.seed);
    let d0 = spec.base_operator();
    let frames = map_range(lattice.num_vertices(), |v| haar_unitary(n_mat, &mut seeds.stream(Domain::VertexFrame, v as u64)));
    let higgs = map_range(lattice.num_vertices(), |v| d0.conjugate_by(&frames[v]));
    let links = map_range(lattice.num_edges(), |e| {
        let mut rng = seeds.stream(Domain::EdgeCommutant, e as u64);
        let blocks: Vec<UnitaryMatrix> = spec.base_spectrum.iter().map(|l| haar_unitary(l.multiplicity, &mut rng)).collect();
        let w = UnitaryMatrix::direct_sum(&blocks);
        let ut = &frames[lattice.edge_target(e)];
        let us = &frames[lattice.edge_source(e)];
        ut.then_after(&w).then_after(&us.adjoint())
    });
    GaugeNetworkConfig::new(lattice, n_mat, higgs, links)
}

/// Haar gauge transformation, one unitary per vertex.
pub fn random_gauge(lattice: &TorusLattice, n_mat: usize, seeds: &SeedStream) -> Vec<UnitaryMatrix> {
    map_range(lattice.num_vertices(), |v| haar_unitary(n_mat, &mut seeds.stream(Domain::GaugeTransform, v as u64)))
}

/// Samples smooth fields: `L_e = exp(i l A_μ(x_v))` for `e = (v, v+ε_μ)` and
/// `D_v = Φ(x_v)`, with `x_v = l·coords(v)`.
pub fn from_continuum(lattice: TorusLattice, fields: &SmoothFieldSpec) -> Result<GaugeNetworkConfig> {
    fields.validate()?;
    if fields.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch { expected: lattice.dim(), found: fields.dim() });
    }
    let size = lattice.extent();
    if ((size - fields.period()) / fields.period()).abs() > 1e-12 {
        return Err(Error::PeriodMismatch { period: fields.period(), size });
    }
    let l = lattice.spacing();
    let d = lattice.dim();
    let higgs = map_range(lattice.num_vertices(), |v| fields.phi(&lattice.position(v)));
    let links: Vec<Result<UnitaryMatrix>> = map_range(lattice.num_edges(), |e| {
        let x = lattice.position(lattice.edge_source(e));
        exp_i_hermitian(&fields.gauge_potential(e % d, &x), l)
    });
    let links = links.into_iter().collect::<Result<Vec<_>>>()?;
    GaugeNetworkConfig::new(lattice, fields.matrix_size(), higgs, links)
}

/// On-disk schema: `{ "lattice": {d, n, l}, "N", "D": [...], "L": [...] }`,
/// with an optional `provenance` object.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
    pub lattice: TorusLattice,
    #[serde(rename = "N")]
    pub n_mat: usize,
    #[serde(rename = "D")]
    pub higgs: Vec<HermitianMatrix>,
    #[serde(rename = "L")]
    pub links: Vec<UnitaryMatrix>,
}

impl ConfigRecord {
    pub fn from_config(config: &GaugeNetworkConfig, provenance: Option<serde_json::Value>) -> Self {
        Self {
            provenance,
            lattice: config.lattice,
            n_mat: config.n_mat,
            higgs: config.higgs.clone(),
            links: config.links.clone(),
        }
    }

    pub fn into_config(self) -> Result<GaugeNetworkConfig> {
        GaugeNetworkConfig::new(self.lattice.validated()?, self.n_mat, self.higgs, self.links)
    }
}

/// `‖[A, B]‖_max`.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.commutator(b).max_abs()
}
