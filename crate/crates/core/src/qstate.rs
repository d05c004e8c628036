//! Pure states, density operators and the machinery that links the two:
//! partial trace, Schmidt decomposition, von Neumann entropy, purity and
//! basis rotation.
//!
//! States live on a [`SubsystemLayout`] — an ordered list of labeled tensor
//! factors with total dimension at most 16. Basis indices run row-major over
//! the factors (the first label is the slowest index).
//!
//! Tolerances are fixed: states must be normalized within 1e-12, density
//! operators Hermitian and unit-trace within 1e-10 with eigenvalues above
//! −1e-10. Non-normalized amplitudes are rejected at construction, never
//! renormalized silently.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{complex_from_json, complex_to_json, ComplexMatrix, ComplexVector, MAX_DIM};

/// Ordered, labeled tensor factors of a composite space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl SubsystemLayout {
    pub fn new(parts: &[(&str, usize)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidLayout("no subsystems".into()));
        }
        let mut total = 1usize;
        for &(label, dim) in parts {
            if dim == 0 {
                return Err(Error::InvalidLayout(format!(
                    "subsystem {label:?} has dimension 0"
                )));
            }
            total = total.saturating_mul(dim);
        }
        if total > MAX_DIM {
            return Err(Error::InvalidLayout(format!(
                "total dimension {total} exceeds {MAX_DIM}"
            )));
        }
        let labels: Vec<String> = parts.iter().map(|&(l, _)| l.to_string()).collect();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidLayout(format!("duplicate label {l:?}")));
            }
        }
        Ok(Self {
            dims: parts.iter().map(|&(_, d)| d).collect(),
            labels,
        })
    }

    pub fn single(label: &str, dim: usize) -> Result<Self> {
        Self::new(&[(label, dim)])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> Vec<&str> {
        self.labels.iter().map(String::as_str).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn subsystem_count(&self) -> usize {
        self.dims.len()
    }

    pub fn position_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownSubsystem(label.to_string()))
    }

    /// Splits a flat basis index into (digit at `position`, flat index of the
    /// remaining factors in order).
    fn split_index(&self, flat: usize, position: usize) -> (usize, usize) {
        let mut digits = Vec::with_capacity(self.dims.len());
        let mut rest = flat;
        for &d in self.dims.iter().rev() {
            digits.push(rest % d);
            rest /= d;
        }
        digits.reverse();
        let own = digits[position];
        let mut other = 0usize;
        for (k, &digit) in digits.iter().enumerate() {
            if k != position {
                other = other * self.dims[k] + digit;
            }
        }
        (own, other)
    }
}

/// Normalized amplitude vector over the tensor basis of a layout.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
    layout: SubsystemLayout,
}

impl PureState {
    pub fn new(layout: SubsystemLayout, amplitudes: ComplexVector) -> Result<Self> {
        if amplitudes.dim() != layout.total_dim() {
            return Err(Error::ShapeMismatch(format!(
                "layout dimension {} vs amplitude count {}",
                layout.total_dim(),
                amplitudes.dim()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes, layout })
    }

    pub fn from_amplitudes(layout: SubsystemLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::new(layout, ComplexVector::new(amplitudes)?)
    }

    /// Basis state |index⟩ on the given layout.
    pub fn basis_state(layout: SubsystemLayout, index: usize) -> Result<Self> {
        let v = ComplexVector::basis(layout.total_dim(), index)?;
        Self::new(layout, v)
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.dim()
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.amplitudes.inner(&other.amplitudes).norm_sqr()
    }

    /// ρ = |ψ⟩⟨ψ|.
    pub fn densify(&self) -> DensityOperator {
        let matrix = self.amplitudes.outer(&self.amplitudes);
        DensityOperator::new(self.layout.clone(), matrix)
            .expect("outer product of a normalized state is a density operator")
    }

    /// Schmidt decomposition of a bipartite state: ψ = Σ c_k |s_k⟩|a_k⟩ with
    /// nonnegative coefficients in descending order.
    ///
    /// When coefficients coincide the bases are not unique; the result keeps
    /// the deterministic choice made by the SVD and sets `degenerate` so
    /// callers compare reconstructions rather than individual vectors.
    pub fn schmidt(&self) -> Result<SchmidtForm> {
        if self.layout.subsystem_count() != 2 {
            return Err(Error::NotBipartite(self.layout.subsystem_count()));
        }
        let (d0, d1) = (self.layout.dims[0], self.layout.dims[1]);
        let m = ComplexMatrix::from_fn(d0, d1, |i, j| self.amplitudes[i * d1 + j]);
        let svd = m.svd();
        let k = svd.singulars.len();
        let s_basis: Vec<ComplexVector> = (0..k).map(|c| svd.left.column(c)).collect();
        let a_basis: Vec<ComplexVector> = (0..k)
            .map(|c| {
                let col = svd.right.column(c);
                ComplexVector::new(col.entries().iter().map(|z| z.conj()).collect())
                    .expect("conjugation preserves validity")
            })
            .collect();
        let degenerate = svd
            .singulars
            .windows(2)
            .any(|w| (w[0] - w[1]).abs() <= 1e-9);
        Ok(SchmidtForm {
            coefficients: svd.singulars,
            s_basis,
            a_basis,
            degenerate,
        })
    }

    /// Nested-list JSON form with `[re, im]` pairs.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "layout": { "labels": self.layout.labels, "dims": self.layout.dims },
            "amplitudes": self.amplitudes.entries().iter().map(|&z| complex_to_json(z)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let layout = layout_from_json(value.get("layout"))?;
        let amps = value
            .get("amplitudes")
            .and_then(|a| a.as_array())
            .ok_or_else(|| Error::Deserialize("missing amplitudes".into()))?;
        let entries = amps
            .iter()
            .map(complex_from_json)
            .collect::<Result<Vec<_>>>()?;
        Self::from_amplitudes(layout, entries)
    }
}

/// Hermitian, positive semidefinite, unit-trace operator on a layout.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    layout: SubsystemLayout,
}

impl DensityOperator {
    pub fn new(layout: SubsystemLayout, matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != layout.total_dim() {
            return Err(Error::ShapeMismatch(format!(
                "density operator must be {0}x{0} for this layout, got {1}x{2}",
                layout.total_dim(),
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_deviation();
        if herm > 1e-10 {
            return Err(Error::NotHermitian(herm));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::NotDensity(format!("trace {trace} differs from 1")));
        }
        let eig = matrix.hermitian_eigensystem()?;
        if let Some(&lambda) = eig.values.iter().find(|&&l| l < -1e-10) {
            return Err(Error::NotDensity(format!(
                "negative eigenvalue {lambda:.3e}"
            )));
        }
        Ok(Self { matrix, layout })
    }

    /// Diagonal density operator from classical weights.
    pub fn from_diagonal(layout: SubsystemLayout, weights: &[f64]) -> Result<Self> {
        Self::new(layout, ComplexMatrix::diagonal(weights))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Reduced operator on the subsystem named `keep`; all other factors are
    /// traced out.
    pub fn partial_trace(&self, keep: &str) -> Result<DensityOperator> {
        if self.layout.subsystem_count() < 2 {
            return Err(Error::InvalidLayout(
                "partial trace needs at least two subsystems".into(),
            ));
        }
        let position = self.layout.position_of(keep)?;
        let dk = self.layout.dims[position];
        let dim = self.dim();
        let mut reduced = ComplexMatrix::zeros(dk, dk);
        for row in 0..dim {
            let (i, rest_row) = self.layout.split_index(row, position);
            for col in 0..dim {
                let (j, rest_col) = self.layout.split_index(col, position);
                if rest_row == rest_col {
                    reduced[(i, j)] += self.matrix[(row, col)];
                }
            }
        }
        let layout = SubsystemLayout::single(keep, dk)?;
        DensityOperator::new(layout, reduced)
    }

    /// −Σ λ log₂ λ over the eigenvalues, with 0·log 0 = 0. Returned in bits.
    pub fn von_neumann_entropy(&self) -> f64 {
        let eig = self
            .matrix
            .hermitian_eigensystem()
            .expect("density operators are Hermitian");
        eig.values
            .iter()
            .map(|&l| l.clamp(0.0, 1.0))
            .filter(|&l| l > 0.0)
            .map(|l| -l * l.log2())
            .sum::<f64>()
            .max(0.0)
    }

    /// trace(ρ²); 1 for pure states, 1/dim for the maximally mixed state.
    pub fn purity(&self) -> f64 {
        // Hermitian, so trace(ρ²) is the squared Frobenius norm.
        let f = self.matrix.frobenius_norm();
        f * f
    }

    /// Matrix elements ⟨r_i|ρ|r_j⟩ in the given orthonormal basis.
    pub fn rebase(&self, basis: &[ComplexVector]) -> Result<ComplexMatrix> {
        let dim = self.dim();
        if basis.len() != dim || basis.iter().any(|v| v.dim() != dim) {
            return Err(Error::ShapeMismatch(format!(
                "rebase needs {dim} basis vectors of dimension {dim}"
            )));
        }
        let mut gram_dev: f64 = 0.0;
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                gram_dev = gram_dev.max((u.inner(v) - expected).norm());
            }
        }
        if gram_dev > 1e-10 {
            return Err(Error::NotOrthonormal(gram_dev));
        }
        Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
            basis[i].inner(&self.matrix.matvec(&basis[j]))
        }))
    }

    /// ⟨O⟩ = trace(ρ·O).
    pub fn expectation(&self, observable: &ComplexMatrix) -> Complex64 {
        (&self.matrix * observable).trace()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "layout": { "labels": self.layout.labels, "dims": self.layout.dims },
            "matrix": self.matrix.to_json(),
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let layout = layout_from_json(value.get("layout"))?;
        let matrix = ComplexMatrix::from_json(
            value
                .get("matrix")
                .ok_or_else(|| Error::Deserialize("missing matrix".into()))?,
        )?;
        Self::new(layout, matrix)
    }
}

fn layout_from_json(value: Option<&serde_json::Value>) -> Result<SubsystemLayout> {
    let value = value.ok_or_else(|| Error::Deserialize("missing layout".into()))?;
    let labels = value
        .get("labels")
        .and_then(|l| l.as_array())
        .ok_or_else(|| Error::Deserialize("missing layout labels".into()))?;
    let dims = value
        .get("dims")
        .and_then(|d| d.as_array())
        .ok_or_else(|| Error::Deserialize("missing layout dims".into()))?;
    if labels.len() != dims.len() {
        return Err(Error::Deserialize(
            "layout labels and dims differ in length".into(),
        ));
    }
    let parts: Vec<(String, usize)> = labels
        .iter()
        .zip(dims)
        .map(|(l, d)| {
            Ok((
                l.as_str()
                    .ok_or_else(|| Error::Deserialize("layout label must be a string".into()))?
                    .to_string(),
                d.as_u64()
                    .ok_or_else(|| Error::Deserialize("layout dim must be an integer".into()))?
                    as usize,
            ))
        })
        .collect::<Result<_>>()?;
    let borrowed: Vec<(&str, usize)> = parts.iter().map(|(l, d)| (l.as_str(), *d)).collect();
    SubsystemLayout::new(&borrowed)
}

/// Bi-orthogonal form of a bipartite pure state.
#[derive(Clone, Debug)]
pub struct SchmidtForm {
    /// Nonnegative coefficients, descending; their squares sum to 1.
    pub coefficients: Vec<f64>,
    pub s_basis: Vec<ComplexVector>,
    pub a_basis: Vec<ComplexVector>,
    /// Set when coefficients coincide within 1e-9 and the bases are therefore
    /// not unique.
    pub degenerate: bool,
}

impl SchmidtForm {
    /// Σ c_k |s_k⟩⊗|a_k⟩ as a flat amplitude vector.
    pub fn reconstruct(&self) -> Result<ComplexVector> {
        let d0 = self.s_basis[0].dim();
        let d1 = self.a_basis[0].dim();
        let mut entries = vec![Complex64::new(0.0, 0.0); d0 * d1];
        for ((c, s), a) in self
            .coefficients
            .iter()
            .zip(&self.s_basis)
            .zip(&self.a_basis)
        {
            for i in 0..d0 {
                for j in 0..d1 {
                    entries[i * d1 + j] += s[i] * a[j] * c;
                }
            }
        }
        ComplexVector::new(entries)
    }
}
