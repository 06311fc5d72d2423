//! Small dense complex matrices.
//!
//! A thin layer over `nalgebra::DMatrix<Complex64>` with newtypes for the two
//! matrix classes the lattice data lives in: Hermitian (vertex operators,
//! gauge potentials) and unitary (edge transports).

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hermiticity tolerance relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Absolute tolerance on `‖U†U − 1‖_max`.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// Builds from row-major entries, rejecting NaN/Inf.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: entries.len() });
        }
        Self::from_inner(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_inner(m: DMatrix<C64>) -> Result<Self> {
        let out = Self(m);
        if !out.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(out)
    }


    pub fn from_diagonal(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        Self(m)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.0[(i, j)] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * C64::new(s, 0.0))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// Σ_i M_ii.
    pub fn trace(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows(), cols: self.cols() });
        }
        Ok(self.0.trace())
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.cols(), other.rows());
        debug_assert_eq!(self.rows(), other.cols());
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows() {
            for k in 0..self.cols() {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc: f64, z| acc.max(z.norm()))
    }

    /// `‖self − other‖_max`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.0.shape(), other.0.shape());
        self.0.iter().zip(other.0.iter()).fold(0.0, |acc: f64, (a, b)| acc.max((a - b).norm()))
    }

    /// Squared Frobenius norm Σ|M_ij|².
    pub fn frobenius_sq(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// `‖M − M†‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `‖M†M − 1‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.0.adjoint() * &self.0;
        let id = DMatrix::<C64>::identity(self.cols(), self.cols());
        p.iter().zip(id.iter()).fold(0.0, |acc: f64, (a, b)| acc.max((a - b).norm()))
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.0 += &other.0;
    }

    /// Row-major nested representation `[[[re, im], ...], ...]`.
    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| [self.0[(i, j)].re, self.0[(i, j)].im]).collect())
            .collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Invalid("empty matrix".into()));
        }
        let c = rows[0].len();
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Invalid("ragged matrix rows".into()));
            }
            entries.extend(row.iter().map(|[re, im]| C64::new(*re, *im)));
        }
        Self::from_row_major(r, c, &entries)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        ComplexMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// A square matrix equal to its adjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Projects onto the Hermitian part `(M + M†)/2`.
    ///
    /// The projection is exact in floating point, so an already Hermitian
    /// input comes back bit-identical.
    pub fn symmetrize(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let adj = m.0.adjoint();
        let sym = (&m.0 + adj) * C64::new(0.5, 0.0);
        Ok(Self(ComplexMatrix(sym)))
    }

    /// Accepts `m` only if it is Hermitian to [`HERMITIAN_TOL`] relative.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOL * m.max_abs().max(f64::MIN_POSITIVE) && defect > 0.0 {
            return Err(Error::Invalid(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        Self::symmetrize(m)
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n, n))
    }

    pub fn scalar(n: usize, value: f64) -> Self {
        Self(ComplexMatrix::identity(n).scale(value))
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        let diag: Vec<C64> = values.iter().map(|v| C64::new(*v, 0.0)).collect();
        Self(ComplexMatrix::from_diagonal(&diag))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Real trace.
    pub fn trace(&self) -> f64 {
        self.0 .0.trace().re
    }

    /// `tr(H^m)`; real because `H^m` is Hermitian.
    pub fn trace_pow(&self, m: u32) -> f64 {
        self.pow(m).trace().expect("square").re
    }

    pub fn pow(&self, m: u32) -> ComplexMatrix {
        let mut out = ComplexMatrix::identity(self.dim());
        for _ in 0..m {
            out = &out * &self.0;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    /// `U H U†`, Hermitian again up to rounding (re-symmetrized).
    pub fn conjugate_by(&self, u: &UnitaryMatrix) -> Self {
        let m = &(&u.0 * &self.0) * &u.0.adjoint();
        Self::symmetrize(m).expect("conjugation preserves shape and finiteness")
    }

    /// Real eigenvalues in ascending order with the matching eigenvectors as columns.
    pub fn eigh(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        let eig = nalgebra::linalg::SymmetricEigen::try_new(self.0 .0.clone(), f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigen("symmetric eigensolver did not converge".into()))?;
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(self.dim(), self.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Eigen("non-finite eigenvalue".into()));
        }
        Ok((values, ComplexMatrix(vectors)))
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        HermitianMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// A square matrix with `U†U = 1` to [`UNITARY_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = m.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self(m))
    }

    /// For products and adjoints of unitaries; checked in debug builds.
    pub(crate) fn new_trusted(m: ComplexMatrix) -> Self {
        debug_assert!(m.unitarity_defect() <= UNITARY_TOL, "unitarity lost: {}", m.unitarity_defect());
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `self · rhs`.
    pub fn then_after(&self, rhs: &Self) -> Self {
        Self::new_trusted(&self.0 * &rhs.0)
    }

    /// Conjugates an arbitrary matrix: `U M U†`.
    pub fn conjugate(&self, m: &ComplexMatrix) -> ComplexMatrix {
        &(&self.0 * m) * &self.0.adjoint()
    }

    /// Block-diagonal direct sum, used for commutant unitaries.
    pub fn direct_sum(blocks: &[UnitaryMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.dim()).sum();
        let mut m = DMatrix::<C64>::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            let k = b.dim();
            m.view_mut((off, off), (k, k)).copy_from(&b.0 .0);
            off += k;
        }
        Self(ComplexMatrix(m))
    }
}

impl Serialize for UnitaryMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitaryMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        UnitaryMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// Σ_i M_ii of a square matrix.
pub fn trace(m: &ComplexMatrix) -> Result<C64> {
    m.trace()
}

/// `exp(i·scale·H)` through the eigendecomposition `H = V Λ V†`.
pub fn exp_i_hermitian(h: &HermitianMatrix, scale: f64) -> Result<UnitaryMatrix> {
    if !scale.is_finite() {
        return Err(Error::NonFinite);
    }
    let (values, vectors) = h.eigh()?;
    let phases: Vec<C64> = values.iter().map(|&l| C64::from_polar(1.0, scale * l)).collect();
    let v = vectors.inner();
    let mut scaled = v.clone();
    for (j, p) in phases.iter().enumerate() {
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= p;
        }
    }
    let out = ComplexMatrix::from_inner(scaled * v.adjoint())?;
    UnitaryMatrix::new(out)
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryMatrix {
    assert!(n >= 1, "haar_unitary needs n >= 1");
    let g = ginibre(n, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::new_trusted(ComplexMatrix(q))
}

/// Hermitian matrix with independent Gaussian entries: off-diagonal entries
/// have `E|z|² = scale²`, diagonal entries are real `N(0, scale²)`.
pub fn gue_hermitian<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> HermitianMatrix {
    assert!(n >= 1, "gue_hermitian needs n >= 1");
    let mut m = DMatrix::<C64>::zeros(n, n);
    let off = scale / std::f64::consts::SQRT_2;
    for i in 0..n {
        let x: f64 = StandardNormal.sample(rng);
        m[(i, i)] = C64::new(scale * x, 0.0);
        for j in (i + 1)..n {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            let z = C64::new(off * re, off * im);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianMatrix(ComplexMatrix(m))
}

fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Domain, SeedStream};

    fn rng(i: u64) -> rand_chacha::ChaCha20Rng {
        SeedStream::new(7).stream(Domain::Misc, i)
    }

    fn random_complex(n: usize, r: &mut rand_chacha::ChaCha20Rng) -> ComplexMatrix {
        ComplexMatrix(ginibre(n, r))
    }

    #[test]
    fn trace_identity_and_cyclicity() {
        assert_eq!(trace(&ComplexMatrix::identity(3)).unwrap(), C64::new(3.0, 0.0));
        let mut r = rng(0);
        let a = random_complex(4, &mut r);
        let b = random_complex(4, &mut r);
        let ab = trace(&(&a * &b)).unwrap();
        let ba = trace(&(&b * &a)).unwrap();
        assert!((ab - ba).norm() < 1e-12);
        assert!((a.trace_product(&b) - ab).norm() < 1e-12);
    }

    #[test]
    fn trace_rejects_non_square() {
        assert!(matches!(trace(&ComplexMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn hermitian_trace_is_real() {
        let h = gue_hermitian(5, 1.3, &mut rng(1));
        assert!(h.matrix().trace().unwrap().im.abs() < 1e-12);
        assert!(h.matrix().hermiticity_defect() <= HERMITIAN_TOL * h.matrix().max_abs());
    }

    #[test]
    fn constructors_reject_non_finite() {
        let bad = [C64::new(f64::NAN, 0.0)];
        assert!(matches!(ComplexMatrix::from_row_major(1, 1, &bad), Err(Error::NonFinite)));
        let inf = [C64::new(0.0, f64::INFINITY)];
        assert!(ComplexMatrix::from_row_major(1, 1, &inf).is_err());
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let u = exp_i_hermitian(&HermitianMatrix::zeros(3), 1.0).unwrap();
        assert!(u.matrix().max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn exp_scalar_pi_is_minus_one() {
        let h = HermitianMatrix::from_real_diagonal(&[std::f64::consts::PI]);
        let u = exp_i_hermitian(&h, 1.0).unwrap();
        assert!((u.matrix().get(0, 0) - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn exp_one_parameter_group() {
        let h = gue_hermitian(4, 1.0, &mut rng(2));
        let a = exp_i_hermitian(&h, 0.3).unwrap();
        let b = exp_i_hermitian(&h, -1.1).unwrap();
        let ab = exp_i_hermitian(&h, 0.3 - 1.1).unwrap();
        assert!(a.then_after(&b).matrix().max_abs_diff(ab.matrix()) < 1e-10);
    }

    #[test]
    fn exp_commutes_with_conjugation() {
        let mut r = rng(3);
        let h = gue_hermitian(4, 1.0, &mut r);
        let u = haar_unitary(4, &mut r);
        let lhs = exp_i_hermitian(&h.conjugate_by(&u), 0.7).unwrap();
        let rhs = u.conjugate(exp_i_hermitian(&h, 0.7).unwrap().matrix());
        assert!(lhs.matrix().max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn haar_is_unitary_and_deterministic() {
        for n in 1..=6 {
            let u = haar_unitary(n, &mut rng(10 + n as u64));
            assert!(u.matrix().unitarity_defect() <= UNITARY_TOL);
            let v = haar_unitary(n, &mut rng(10 + n as u64));
            assert_eq!(u, v);
        }
    }

    #[test]
    fn gue_zero_scale_is_zero() {
        let h = gue_hermitian(3, 0.0, &mut rng(4));
        assert_eq!(h.matrix().max_abs(), 0.0);
    }

    #[test]
    fn unitary_rejects_non_unitary() {
        let m = ComplexMatrix::identity(2).scale(1.1);
        assert!(matches!(UnitaryMatrix::new(m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn hermitian_new_rejects_far_from_hermitian() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 1, C64::new(1.0, 0.0));
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn eigh_reconstructs() {
        let h = gue_hermitian(5, 2.0, &mut rng(5));
        let (vals, vecs) = h.eigh().unwrap();
        let diag: Vec<C64> = vals.iter().map(|v| C64::new(*v, 0.0)).collect();
        let rec = &(&vecs * &ComplexMatrix::from_diagonal(&diag)) * &vecs.adjoint();
        assert!(rec.max_abs_diff(h.matrix()) < 1e-12);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn serde_rows_are_re_im_pairs() {
        let m = ComplexMatrix::from_row_major(1, 2, &[C64::new(1.0, -2.0), C64::new(0.5, 0.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[1.0,-2.0],[0.5,0.0]]]");
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
