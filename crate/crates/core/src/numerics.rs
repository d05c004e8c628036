//! Dense complex vectors and matrices for spaces of dimension at most 16.
//!
//! Everything is plain row-major storage over `Complex64`. The solvers are
//! sized for tiny problems: a cyclic Jacobi eigensolver for Hermitian
//! matrices and an SVD built on it via the smaller Gram matrix. All values
//! are immutable once constructed.

use num_complex::Complex64;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::error::{Error, Result};

/// Hard cap on every vector dimension and matrix side.
pub const MAX_DIM: usize = 16;

/// Off-diagonal convergence threshold for the Jacobi sweeps, relative to the
/// Frobenius norm of the input.
const JACOBI_THRESHOLD: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Singular values at or below this cutoff are treated as exact zeros.
const SV_CUTOFF: f64 = 1e-13;

fn check_finite<'a, I: IntoIterator<Item = &'a Complex64>>(entries: I) -> Result<()> {
    for z in entries {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite);
        }
    }
    Ok(())
}

/// Column vector of complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() || entries.len() > MAX_DIM {
            return Err(Error::DimensionTooLarge(entries.len()));
        }
        check_finite(&entries)?;
        Ok(Self { entries })
    }

    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); dim])
    }

    /// Standard basis vector e_index.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        let mut v = Self::zeros(dim)?;
        if index >= dim {
            return Err(Error::ShapeMismatch(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        v.entries[index] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ⟨self|other⟩ with the conjugate on `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.dim() * other.dim();
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge(dim));
        }
        let mut entries = Vec::with_capacity(dim);
        for a in &self.entries {
            for b in &other.entries {
                entries.push(a * b);
            }
        }
        Self::new(entries)
    }

    /// |self⟩⟨other|
    pub fn outer(&self, other: &Self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim(), other.dim());
        for i in 0..self.dim() {
            for j in 0..other.dim() {
                m[(i, j)] = self.entries[i] * other.entries[j].conj();
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows > MAX_DIM || cols > MAX_DIM {
            return Err(Error::DimensionTooLarge(rows.max(cols)));
        }
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        check_finite(&entries)?;
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1 && rows <= MAX_DIM && cols <= MAX_DIM);
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector {
            entries: (0..self.rows).map(|i| self[(i, j)]).collect(),
        }
    }

    pub fn set_column(&mut self, j: usize, v: &ComplexVector) {
        assert_eq!(v.dim(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matvec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "matvec dimension mismatch");
        let entries = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect();
        ComplexVector { entries }
    }

    /// Kronecker product, `self` on the slow (leftmost) index.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(Error::DimensionTooLarge(rows.max(cols)));
        }
        let mut m = Self::zeros(rows, cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        m[(i1 * other.rows + i2, j1 * other.cols + j2)] =
                            self[(i1, j1)] * other[(i2, j2)];
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|self[i,j] − conj(self[j,i])|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// ‖self†·self − I‖_max.
    pub fn unitarity_deviation(&self) -> f64 {
        let gram = &self.adjoint() * self;
        gram.max_abs_diff(&Self::identity(self.cols))
    }

    /// Eigenvalues and eigenvectors of a Hermitian matrix, eigenvalues in
    /// descending order, eigenvectors as the corresponding columns.
    ///
    /// Uses cyclic Jacobi rotations with a fixed sweep order, so the output
    /// is identical across runs and platforms.
    pub fn hermitian_eigensystem(&self) -> Result<Eigensystem> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "eigensystem needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let dev = self.hermiticity_deviation();
        if dev > 1e-10 {
            return Err(Error::NotHermitian(dev));
        }
        let n = self.rows;

        // Work on an exactly Hermitian copy so the rotations stay consistent.
        let mut a = self.clone();
        for i in 0..n {
            a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
            for j in 0..i {
                let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
                a[(i, j)] = avg;
                a[(j, i)] = avg.conj();
            }
        }

        let mut v = Self::identity(n);
        let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
        let threshold = JACOBI_THRESHOLD * scale;

        for _ in 0..JACOBI_MAX_SWEEPS {
            let off = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= threshold {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let mag = apq.norm();
                    if mag == 0.0 {
                        continue;
                    }
                    let phase = apq / mag;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let tau = (aqq - app) / (2.0 * mag);
                    let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
                    let t = sign / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // Plane rotation U with U[p,p]=c, U[p,q]=s·phase,
                    // U[q,p]=−s·conj(phase), U[q,q]=c; A ← U†AU, V ← VU.
                    let spq = phase * s;
                    for i in 0..n {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = aip * c - aiq * spq.conj();
                        a[(i, q)] = aip * spq + aiq * c;
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = vip * c - viq * spq.conj();
                        v[(i, q)] = vip * spq + viq * c;
                    }
                    for j in 0..n {
                        let apj = a[(p, j)];
                        let aqj = a[(q, j)];
                        a[(p, j)] = apj * c - aqj * spq;
                        a[(q, j)] = apj * spq.conj() + aqj * c;
                    }
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
        let mut vectors = Self::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &v.column(src));
        }
        Ok(Eigensystem { values, vectors })
    }

    /// Thin singular value decomposition `self = left · diag(singulars) · right†`
    /// with singular values in descending order.
    ///
    /// The eigensystem of the smaller Gram matrix supplies one side; the other
    /// side is recovered by direct application, which keeps the reconstruction
    /// exact to machine precision even for rank-deficient inputs. The first
    /// entry of each left column whose magnitude exceeds 1e-9 is rotated to
    /// the real positive axis (the paired right column absorbs the phase).
    pub fn svd(&self) -> Svd {
        let (r, c) = (self.rows, self.cols);
        let k = r.min(c);

        // Eigen side: columns of the Gram eigenbasis on the smaller space.
        let (gram, eig_is_left) = if r <= c {
            (self * &self.adjoint(), true)
        } else {
            (&self.adjoint() * self, false)
        };
        let eig = gram
            .hermitian_eigensystem()
            .expect("Gram matrix is Hermitian by construction");

        let adj = self.adjoint();
        let mut singulars = Vec::with_capacity(k);
        let mut eig_cols = Vec::with_capacity(k);
        let mut derived_cols: Vec<Option<ComplexVector>> = Vec::with_capacity(k);
        for i in 0..k {
            let e = eig.vectors.column(i);
            let w = if eig_is_left {
                adj.matvec(&e)
            } else {
                self.matvec(&e)
            };
            let sigma = w.norm();
            if sigma > SV_CUTOFF {
                singulars.push(sigma);
                derived_cols.push(Some(w.scaled(Complex64::new(1.0 / sigma, 0.0))));
            } else {
                singulars.push(0.0);
                derived_cols.push(None);
            }
            eig_cols.push(e);
        }

        let derived_dim = if eig_is_left { c } else { r };
        let derived = orthonormalize(derived_cols, derived_dim);

        let mut triples: Vec<(f64, ComplexVector, ComplexVector)> = singulars
            .into_iter()
            .zip(eig_cols)
            .zip(derived)
            .map(|((s, e), d)| if eig_is_left { (s, e, d) } else { (s, d, e) })
            .collect();
        triples.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

        let mut left = Self::zeros(r, k);
        let mut right = Self::zeros(c, k);
        let mut values = Vec::with_capacity(k);
        for (idx, (sigma, u, v)) in triples.into_iter().enumerate() {
            let anchor = u.entries().iter().find(|z| z.norm() > 1e-9);
            let phase = match anchor {
                Some(z) => (z / z.norm()).conj(),
                None => Complex64::new(1.0, 0.0),
            };
            left.set_column(idx, &u.scaled(phase));
            right.set_column(idx, &v.scaled(phase));
            values.push(sigma);
        }
        Svd {
            left,
            singulars: values,
            right,
        }
    }

    /// Nested-list JSON form: rows of `[re, im]` pairs.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            (0..self.rows)
                .map(|i| {
                    serde_json::Value::Array(
                        (0..self.cols)
                            .map(|j| complex_to_json(self[(i, j)]))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let rows = value
            .as_array()
            .ok_or_else(|| Error::Deserialize("matrix must be an array of rows".into()))?;
        if rows.is_empty() {
            return Err(Error::Deserialize("matrix has no rows".into()));
        }
        let mut entries = Vec::new();
        let mut cols = None;
        for row in rows {
            let cells = row
                .as_array()
                .ok_or_else(|| Error::Deserialize("matrix row must be an array".into()))?;
            match cols {
                None => cols = Some(cells.len()),
                Some(c) if c != cells.len() => {
                    return Err(Error::Deserialize("ragged matrix rows".into()))
                }
                _ => {}
            }
            for cell in cells {
                entries.push(complex_from_json(cell)?);
            }
        }
        Self::new(rows.len(), cols.unwrap_or(0), entries)
    }
}

pub fn complex_to_json(z: Complex64) -> serde_json::Value {
    serde_json::json!([z.re, z.im])
}

pub fn complex_from_json(value: &serde_json::Value) -> Result<Complex64> {
    let pair = value
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Deserialize("complex entry must be a [re, im] pair".into()))?;
    let re = pair[0]
        .as_f64()
        .ok_or_else(|| Error::Deserialize("non-numeric real part".into()))?;
    let im = pair[1]
        .as_f64()
        .ok_or_else(|| Error::Deserialize("non-numeric imaginary part".into()))?;
    Ok(Complex64::new(re, im))
}

/// Deterministic completion + modified Gram-Schmidt cleanup for the derived
/// SVD side. `None` slots (zero singular values) are filled from the standard
/// basis in index order.
fn orthonormalize(columns: Vec<Option<ComplexVector>>, dim: usize) -> Vec<ComplexVector> {
    let mut done: Vec<ComplexVector> = Vec::with_capacity(columns.len());
    for col in columns {
        let candidate = match col {
            // Derived columns are unit vectors already; reject only if the
            // projection removal collapses them.
            Some(v) => mgs_step(&done, v, 1e-8),
            None => None,
        };
        let v = candidate.unwrap_or_else(|| {
            (0..dim)
                .map(|j| ComplexVector::basis(dim, j).unwrap())
                .find_map(|e| mgs_step(&done, e, 0.5))
                .expect("standard basis always completes an orthonormal set")
        });
        done.push(v);
    }
    done
}

fn mgs_step(done: &[ComplexVector], mut v: ComplexVector, min_norm: f64) -> Option<ComplexVector> {
    for u in done {
        let coeff = u.inner(&v);
        for (x, y) in v.entries.iter_mut().zip(u.entries()) {
            *x -= coeff * y;
        }
    }
    let norm = v.norm();
    (norm > min_norm).then(|| v.scaled(Complex64::new(1.0 / norm, 0.0)))
}

/// Result of [`ComplexMatrix::hermitian_eigensystem`].
#[derive(Clone, Debug)]
pub struct Eigensystem {
    /// Real eigenvalues, descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `values`.
    pub vectors: ComplexMatrix,
}

/// Result of [`ComplexMatrix::svd`].
#[derive(Clone, Debug)]
pub struct Svd {
    pub left: ComplexMatrix,
    /// Nonnegative singular values, descending.
    pub singulars: Vec<f64>,
    pub right: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singulars.len();
        let mut m = ComplexMatrix::zeros(self.left.rows(), self.right.rows());
        for idx in 0..k {
            let u = self.left.column(idx);
            let v = self.right.column(idx);
            let outer = u.outer(&v);
            m = &m + &outer.scaled(Complex64::new(self.singulars[idx], 0.0));
        }
        m
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut m = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                m[(i, j)] = (0..self.cols).map(|l| self[(i, l)] * rhs[(l, j)]).sum();
            }
        }
        m
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
        Complex64::new(uniform(rng) * 2.0 - 1.0, uniform(rng) * 2.0 - 1.0)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::new(
            rows,
            cols,
            (0..rows * cols).map(|_| random_complex(rng)).collect(),
        )
        .unwrap()
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let m = random_matrix(rng, n, n);
        (&m + &m.adjoint()).scaled(Complex64::new(0.5, 0.0))
    }

    fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> ComplexVector {
        ComplexVector::new((0..dim).map(|_| random_complex(rng)).collect()).unwrap()
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        let i4 = i2.tensor(&i2).unwrap();
        assert_eq!(i4.max_abs_diff(&ComplexMatrix::identity(4)), 0.0);
    }

    #[test]
    fn tensor_of_basis_vectors_places_single_one() {
        let e0 = ComplexVector::basis(2, 0).unwrap();
        let e1 = ComplexVector::basis(2, 1).unwrap();
        let t = e0.tensor(&e1).unwrap();
        assert_eq!(t.dim(), 4);
        for i in 0..4 {
            let expected = if i == 1 { 1.0 } else { 0.0 };
            assert_eq!(t[i], Complex64::new(expected, 0.0));
        }
    }

    #[test]
    fn tensor_mixes_products_correctly() {
        // (A⊗B)(u⊗v) = (Au)⊗(Bv), checked by direct multiplication.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 2, 2);
            let b = random_matrix(&mut rng, 2, 2);
            let u = random_vector(&mut rng, 2);
            let v = random_vector(&mut rng, 2);
            let lhs = a.tensor(&b).unwrap().matvec(&u.tensor(&v).unwrap());
            let rhs = a.matvec(&u).tensor(&b.matvec(&v)).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn tensor_is_associative_after_flattening() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = random_matrix(&mut rng, 2, 2);
        let b = random_matrix(&mut rng, 2, 2);
        let c = random_matrix(&mut rng, 2, 2);
        let left = a.tensor(&b).unwrap().tensor(&c).unwrap();
        let right = a.tensor(&b.tensor(&c).unwrap()).unwrap();
        // Index structure is identical; entries reassociate the products.
        assert!(left.max_abs_diff(&right) < 1e-14);
    }

    #[test]
    fn tensor_rejects_oversized_results() {
        let m = ComplexMatrix::identity(8);
        assert!(matches!(
            m.tensor(&ComplexMatrix::identity(4)),
            Err(Error::DimensionTooLarge(_))
        ));
    }

    #[test]
    fn adjoint_examples() {
        let i = ComplexMatrix::identity(3);
        assert_eq!(i.adjoint().max_abs_diff(&i), 0.0);

        let raising = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let lowered = raising.adjoint();
        assert_eq!(lowered[(1, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(lowered[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn adjoint_is_involutive_and_reverses_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 3, 3);
            let b = random_matrix(&mut rng, 3, 3);
            assert_eq!(a.adjoint().adjoint().max_abs_diff(&a), 0.0);
            let lhs = (&a * &b).adjoint();
            let rhs = &b.adjoint() * &a.adjoint();
            assert!(lhs.max_abs_diff(&rhs) < 1e-14);
        }
    }

    #[test]
    fn eigensystem_of_diagonal_matrices() {
        let half = ComplexMatrix::diagonal(&[0.5, 0.5]);
        let eig = half.hermitian_eigensystem().unwrap();
        assert!((eig.values[0] - 0.5).abs() < 1e-14);
        assert!((eig.values[1] - 0.5).abs() < 1e-14);

        let proj = ComplexMatrix::diagonal(&[1.0, 0.0]);
        let eig = proj.hermitian_eigensystem().unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!(eig.values[1].abs() < 1e-14);
    }

    #[test]
    fn eigensystem_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let h = random_hermitian(&mut rng, 4);
            let eig = h.hermitian_eigensystem().unwrap();
            let mut recon = ComplexMatrix::zeros(4, 4);
            for k in 0..4 {
                let v = eig.vectors.column(k);
                recon = &recon + &v.outer(&v).scaled(Complex64::new(eig.values[k], 0.0));
            }
            assert!(recon.max_abs_diff(&h) < 1e-9, "reconstruction failed");
            assert!(eig.vectors.unitarity_deviation() < 1e-9);
            for k in 1..4 {
                assert!(eig.values[k - 1] >= eig.values[k]);
            }
            // Direct residual H·v = λ·v.
            for k in 0..4 {
                let v = eig.vectors.column(k);
                let hv = h.matvec(&v);
                let lv = v.scaled(Complex64::new(eig.values[k], 0.0));
                assert!(hv.max_abs_diff(&lv) < 1e-9);
            }
        }
    }

    #[test]
    fn eigensystem_rejects_non_hermitian_input() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        assert!(matches!(
            m.hermitian_eigensystem(),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn svd_of_balanced_diagonal() {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let m = ComplexMatrix::diagonal(&[inv_sqrt2, inv_sqrt2]);
        let svd = m.svd();
        assert!((svd.singulars[0] - inv_sqrt2).abs() < 1e-14);
        assert!((svd.singulars[1] - inv_sqrt2).abs() < 1e-14);
    }

    #[test]
    fn svd_of_rank_one_outer_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let u = random_vector(&mut rng, 2);
        let u = u.scaled(Complex64::new(1.0 / u.norm(), 0.0));
        let v = random_vector(&mut rng, 2);
        let v = v.scaled(Complex64::new(1.0 / v.norm(), 0.0));
        let svd = u.outer(&v).svd();
        assert!((svd.singulars[0] - 1.0).abs() < 1e-12);
        assert!(svd.singulars[1].abs() < 1e-12);
        assert!(svd.reconstruct().max_abs_diff(&u.outer(&v)) < 1e-12);
    }

    #[test]
    fn svd_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for shape in [(2, 2), (3, 3), (4, 4), (2, 3), (3, 2), (2, 4)] {
            for _ in 0..10 {
                let m = random_matrix(&mut rng, shape.0, shape.1);
                let svd = m.svd();
                assert!(svd.reconstruct().max_abs_diff(&m) < 1e-10);
                assert!(svd.left.unitarity_deviation() < 1e-9);
                assert!(svd.right.unitarity_deviation() < 1e-9);
                for k in 1..svd.singulars.len() {
                    assert!(svd.singulars[k - 1] >= svd.singulars[k]);
                }
            }
        }
    }

    #[test]
    fn svd_left_columns_have_real_positive_anchor() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let m = random_matrix(&mut rng, 3, 3);
        let svd = m.svd();
        for k in 0..3 {
            let col = svd.left.column(k);
            let anchor = col.entries().iter().find(|z| z.norm() > 1e-9).unwrap();
            assert!(anchor.im.abs() < 1e-12 && anchor.re > 0.0);
        }
    }

    #[test]
    fn svd_handles_degenerate_spectra() {
        // All singular values equal: any unitary.
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let h = random_hermitian(&mut rng, 4);
        let u = h.hermitian_eigensystem().unwrap().vectors;
        let svd = u.svd();
        for s in &svd.singulars {
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert!(svd.reconstruct().max_abs_diff(&u) < 1e-10);
        assert!(svd.left.unitarity_deviation() < 1e-9);
        assert!(svd.right.unitarity_deviation() < 1e-9);

        // Two degenerate pairs, rotated away from the standard basis.
        let d = ComplexMatrix::diagonal(&[0.7, 0.7, 0.1, 0.1]);
        let m = &(&u * &d) * &u.adjoint();
        let svd = m.svd();
        for (s, expected) in svd.singulars.iter().zip([0.7, 0.7, 0.1, 0.1]) {
            assert!((s - expected).abs() < 1e-10);
        }
        assert!(svd.reconstruct().max_abs_diff(&m) < 1e-10);
    }

    #[test]
    fn eigensystem_handles_the_largest_supported_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let h = random_hermitian(&mut rng, 16);
        let eig = h.hermitian_eigensystem().unwrap();
        assert!(eig.vectors.unitarity_deviation() < 1e-9);
        let mut recon = ComplexMatrix::zeros(16, 16);
        for k in 0..16 {
            let v = eig.vectors.column(k);
            recon = &recon + &v.outer(&v).scaled(Complex64::new(eig.values[k], 0.0));
        }
        assert!(recon.max_abs_diff(&h) < 1e-9);
    }

    #[test]
    fn matrix_json_round_trip_is_bit_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let m = random_matrix(&mut rng, 3, 2);
        let text = serde_json::to_string(&m.to_json()).unwrap();
        let back = ComplexMatrix::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(m[(i, j)].re.to_bits(), back[(i, j)].re.to_bits());
                assert_eq!(m[(i, j)].im.to_bits(), back[(i, j)].im.to_bits());
            }
        }
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(matches!(
            ComplexVector::new(vec![Complex64::new(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        ));
    }
}
