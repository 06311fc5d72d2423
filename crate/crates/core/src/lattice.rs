//! Periodic hypercubic lattice `(ℤ/nℤ)^d` with spacing `l`.
//!
//! Vertices are indexed lexicographically (first coordinate most significant),
//! so index order and coordinate order agree. Edge `(v, μ)` has index
//! `d·index(v) + μ`; plaquette `(v, μ<ν)` has index
//! `d(d−1)/2·index(v) + pair(μ, ν)`. Directions are 0-based.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusLattice {
    d: usize,
    n: usize,
    l: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex(pub Vec<usize>);

impl Vertex {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }
}

/// The edge `source → source + ε_direction`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: Vertex,
    pub direction: usize,
}

/// Elementary square spanned by `mu < nu` at `base`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Plaquette {
    pub base: Vertex,
    pub mu: usize,
    pub nu: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Forward,
    Reverse,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub edge: Edge,
    pub orientation: Orientation,
}

/// Sequence of edge traversals; `steps[0]` is walked first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DirectedPath {
    pub steps: Vec<Step>,
}

impl DirectedPath {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Walks `self` then `other`.
    pub fn concat(mut self, other: DirectedPath) -> DirectedPath {
        self.steps.extend(other.steps);
        self
    }

    /// The same path walked backwards.
    pub fn reversed(&self) -> DirectedPath {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| Step {
                edge: s.edge.clone(),
                orientation: match s.orientation {
                    Orientation::Forward => Orientation::Reverse,
                    Orientation::Reverse => Orientation::Forward,
                },
            })
            .collect();
        DirectedPath { steps }
    }
}

impl TorusLattice {
    pub fn new(d: usize, n: usize, l: f64) -> Result<Self> {
        if d != 2 && d != 4 {
            return Err(Error::UnsupportedDimension(d));
        }
        if n < 2 {
            return Err(Error::TooFewSites(n));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidSpacing(l));
        }
        Ok(Self { d, n, l })
    }

    /// Re-validates after deserialization.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.d, self.n, self.l)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.l
    }

    /// Physical side length `n·l`.
    pub fn extent(&self) -> f64 {
        self.n as f64 * self.l
    }

    pub fn num_vertices(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn num_edges(&self) -> usize {
        self.d * self.num_vertices()
    }

    pub fn plaquettes_per_vertex(&self) -> usize {
        self.d * (self.d - 1) / 2
    }

    pub fn num_plaquettes(&self) -> usize {
        self.plaquettes_per_vertex() * self.num_vertices()
    }

    pub fn vertex(&self, index: usize) -> Vertex {
        let mut coords = vec![0; self.d];
        let mut rest = index;
        for slot in coords.iter_mut().rev() {
            *slot = rest % self.n;
            rest /= self.n;
        }
        Vertex(coords)
    }

    pub fn vertex_index(&self, v: &Vertex) -> Result<usize> {
        if v.0.len() != self.d || v.0.iter().any(|&c| c >= self.n) {
            return Err(Error::InvalidVertex(v.0.clone()));
        }
        Ok(v.0.iter().fold(0, |acc, &c| acc * self.n + c))
    }

    fn stride(&self, mu: usize) -> usize {
        self.n.pow((self.d - 1 - mu) as u32)
    }

    fn coord(&self, index: usize, mu: usize) -> usize {
        (index / self.stride(mu)) % self.n
    }

    /// Index of `v ± ε_mu` (periodic).
    pub fn shift(&self, index: usize, mu: usize, forward: bool) -> usize {
        let c = self.coord(index, mu);
        let s = self.stride(mu);
        let base = index - c * s;
        let nc = if forward { (c + 1) % self.n } else { (c + self.n - 1) % self.n };
        base + nc * s
    }

    /// Physical position `l·coords(v)` of a vertex.
    pub fn position(&self, index: usize) -> Vec<f64> {
        (0..self.d).map(|mu| self.l * self.coord(index, mu) as f64).collect()
    }

    pub fn edge_index(&self, vertex: usize, mu: usize) -> usize {
        vertex * self.d + mu
    }

    pub fn edge_index_of(&self, e: &Edge) -> Result<usize> {
        if e.direction >= self.d {
            return Err(Error::Invalid(format!("direction {} out of range", e.direction)));
        }
        Ok(self.edge_index(self.vertex_index(&e.source)?, e.direction))
    }

    pub fn edge_source(&self, edge: usize) -> usize {
        edge / self.d
    }

    pub fn edge_direction(&self, edge: usize) -> usize {
        edge % self.d
    }

    pub fn edge_target(&self, edge: usize) -> usize {
        self.shift(self.edge_source(edge), self.edge_direction(edge), true)
    }

    pub fn edge(&self, index: usize) -> Edge {
        Edge { source: self.vertex(self.edge_source(index)), direction: self.edge_direction(index) }
    }

    /// Direction pairs `(mu, nu)` with `mu < nu` in lexicographic order.
    pub fn direction_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.plaquettes_per_vertex());
        for mu in 0..self.d {
            for nu in (mu + 1)..self.d {
                out.push((mu, nu));
            }
        }
        out
    }

    pub fn plaquette(&self, index: usize) -> Plaquette {
        let per = self.plaquettes_per_vertex();
        let (mu, nu) = self.direction_pairs()[index % per];
        Plaquette { base: self.vertex(index / per), mu, nu }
    }

    /// Edge indices `(e₁, e₂, e₃, e₄)` of plaquette `(base, mu, nu)`:
    /// `e₁: v→v+μ`, `e₂: v+μ→v+μ+ν`, `e₃: v+ν→v+μ+ν`, `e₄: v→v+ν`.
    pub fn plaquette_edge_indices(&self, base: usize, mu: usize, nu: usize) -> [usize; 4] {
        let v_mu = self.shift(base, mu, true);
        let v_nu = self.shift(base, nu, true);
        [
            self.edge_index(base, mu),
            self.edge_index(v_mu, nu),
            self.edge_index(v_nu, mu),
            self.edge_index(base, nu),
        ]
    }

    /// Complete, duplicate-free vertex, edge and plaquette lists in index order.
    pub fn enumerate(&self) -> (Vec<Vertex>, Vec<Edge>, Vec<Plaquette>) {
        let vertices = (0..self.num_vertices()).map(|i| self.vertex(i)).collect();
        let edges = (0..self.num_edges()).map(|i| self.edge(i)).collect();
        let plaquettes = (0..self.num_plaquettes()).map(|i| self.plaquette(i)).collect();
        (vertices, edges, plaquettes)
    }

    /// Forward-only path from `from` to `to`, walking direction 0 first,
    /// then 1, and so on, wrapping around the torus where needed.
    pub fn directed_path(&self, from: &Vertex, to: &Vertex) -> Result<DirectedPath> {
        let mut cur = self.vertex_index(from)?;
        self.vertex_index(to)?;
        let mut steps = Vec::new();
        for mu in 0..self.d {
            let hops = (to.0[mu] + self.n - from.0[mu]) % self.n;
            for _ in 0..hops {
                steps.push(Step { edge: self.edge(self.edge_index(cur, mu)), orientation: Orientation::Forward });
                cur = self.shift(cur, mu, true);
            }
        }
        Ok(DirectedPath { steps })
    }

    /// Checks composability starting at `start` and returns the end vertex index.
    pub fn walk(&self, start: usize, path: &DirectedPath) -> Result<usize> {
        let mut cur = start;
        for (i, step) in path.steps.iter().enumerate() {
            let e = self.edge_index_of(&step.edge)?;
            let (s, t) = (self.edge_source(e), self.edge_target(e));
            cur = match step.orientation {
                Orientation::Forward if s == cur => t,
                Orientation::Reverse if t == cur => s,
                _ => return Err(Error::NonComposablePath(i)),
            };
        }
        Ok(cur)
    }

    /// Closed loop `v → v+μ → v+μ+ν → v+ν → v`, i.e. `ē₄ ē₃ e₂ e₁` read
    /// right to left, whose holonomy is `L₄† L₃† L₂ L₁`.
    pub fn plaquette_loop(&self, p: &Plaquette) -> Result<DirectedPath> {
        let [e1, e2, e3, e4] = plaquette_edges(self, p)?;
        let fwd = |e| Step { edge: e, orientation: Orientation::Forward };
        let rev = |e| Step { edge: e, orientation: Orientation::Reverse };
        Ok(DirectedPath { steps: vec![fwd(e1), fwd(e2), rev(e3), rev(e4)] })
    }
}

/// The four boundary edges of a plaquette in `(e₁, e₂, e₃, e₄)` labelling.
pub fn plaquette_edges(lattice: &TorusLattice, p: &Plaquette) -> Result<[Edge; 4]> {
    if p.mu >= p.nu || p.nu >= lattice.dim() {
        return Err(Error::Invalid(format!("bad plaquette directions ({}, {})", p.mu, p.nu)));
    }
    let base = lattice.vertex_index(&p.base)?;
    Ok(lattice.plaquette_edge_indices(base, p.mu, p.nu).map(|e| lattice.edge(e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts_match_formulas() {
        for (d, n, v, e, p) in [(2, 2, 4, 8, 4), (4, 2, 16, 64, 96), (4, 3, 81, 324, 486)] {
            let lat = TorusLattice::new(d, n, 1.0).unwrap();
            let (vs, es, ps) = lat.enumerate();
            assert_eq!((vs.len(), es.len(), ps.len()), (v, e, p));
            assert_eq!(vs.iter().collect::<HashSet<_>>().len(), v);
            assert_eq!(es.iter().collect::<HashSet<_>>().len(), e);
            assert_eq!(ps.iter().collect::<HashSet<_>>().len(), p);
            assert!(vs.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(TorusLattice::new(3, 4, 1.0), Err(Error::UnsupportedDimension(3))));
        assert!(matches!(TorusLattice::new(6, 2, 1.0), Err(Error::UnsupportedDimension(6))));
        assert!(matches!(TorusLattice::new(2, 1, 1.0), Err(Error::TooFewSites(1))));
        assert!(TorusLattice::new(2, 4, 0.0).is_err());
        assert!(TorusLattice::new(2, 4, f64::NAN).is_err());
    }

    #[test]
    fn degrees_are_d() {
        let lat = TorusLattice::new(4, 3, 1.0).unwrap();
        let mut out = vec![0; lat.num_vertices()];
        let mut inc = vec![0; lat.num_vertices()];
        for e in 0..lat.num_edges() {
            out[lat.edge_source(e)] += 1;
            inc[lat.edge_target(e)] += 1;
        }
        assert!(out.iter().all(|&c| c == 4));
        assert!(inc.iter().all(|&c| c == 4));
        assert_eq!(out.iter().sum::<usize>(), lat.num_edges());
    }

    #[test]
    fn directed_paths_examples() {
        let lat = TorusLattice::new(2, 4, 1.0).unwrap();
        let o = Vertex(vec![0, 0]);
        assert!(lat.directed_path(&o, &o).unwrap().is_empty());
        let p = lat.directed_path(&o, &Vertex(vec![2, 0])).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.steps.iter().all(|s| s.edge.direction == 0 && s.orientation == Orientation::Forward));

        let lat3 = TorusLattice::new(2, 3, 1.0).unwrap();
        let p = lat3.directed_path(&Vertex(vec![2, 0]), &o).unwrap();
        assert_eq!(p.steps, vec![Step { edge: Edge { source: Vertex(vec![2, 0]), direction: 0 }, orientation: Orientation::Forward }]);
        assert!(lat3.directed_path(&o, &Vertex(vec![3, 0])).is_err());
    }

    #[test]
    fn plaquette_edges_examples() {
        let lat = TorusLattice::new(2, 2, 1.0).unwrap();
        let p = Plaquette { base: Vertex(vec![0, 0]), mu: 0, nu: 1 };
        let e = plaquette_edges(&lat, &p).unwrap();
        let edge = |c: [usize; 2], mu| Edge { source: Vertex(c.to_vec()), direction: mu };
        assert_eq!(e, [edge([0, 0], 0), edge([1, 0], 1), edge([0, 1], 0), edge([0, 0], 1)]);

        let lat4 = TorusLattice::new(4, 2, 1.0).unwrap();
        let p = Plaquette { base: Vertex(vec![1, 1, 0, 0]), mu: 1, nu: 3 };
        let e = plaquette_edges(&lat4, &p).unwrap();
        let srcs: Vec<Vec<usize>> = e.iter().map(|e| e.source.0.clone()).collect();
        assert_eq!(srcs, vec![vec![1, 1, 0, 0], vec![1, 0, 0, 0], vec![1, 1, 0, 1], vec![1, 1, 0, 0]]);
        let (_, all, _) = lat4.enumerate();
        assert!(e.iter().all(|x| all.contains(x)));
    }

    #[test]
    fn plaquette_boundary_edges_distinct_and_loop_closes() {
        for (d, n) in [(2, 2), (4, 2), (2, 5)] {
            let lat = TorusLattice::new(d, n, 0.5).unwrap();
            for i in 0..lat.num_plaquettes() {
                let p = lat.plaquette(i);
                let e = plaquette_edges(&lat, &p).unwrap();
                assert_eq!(e.iter().collect::<HashSet<_>>().len(), 4);
                let start = lat.vertex_index(&p.base).unwrap();
                assert_eq!(lat.walk(start, &lat.plaquette_loop(&p).unwrap()).unwrap(), start);
            }
        }
    }

    #[test]
    fn walk_detects_non_composable() {
        let lat = TorusLattice::new(2, 4, 1.0).unwrap();
        let path = lat.directed_path(&Vertex(vec![0, 0]), &Vertex(vec![1, 1])).unwrap();
        assert_eq!(lat.walk(0, &path).unwrap(), lat.vertex_index(&Vertex(vec![1, 1])).unwrap());
        assert!(matches!(lat.walk(1, &path), Err(Error::NonComposablePath(0))));
    }
}
