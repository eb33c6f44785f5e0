//! Dense complex linear algebra and the quantum-state primitives built on it.
//!
//! Multipartite index convention: the order of labels in a [`SubsystemDims`]
//! is the tensor-factor order, leftmost factor = slowest-varying index. Every
//! operation in this crate (tensor products, partial traces, embeddings of
//! local operators) indexes against that order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Validation tolerance used when none is given explicitly.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Eigenvalues with magnitude at or below this contribute exactly zero entropy.
pub const EIGEN_CLAMP: f64 = 1e-12;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Computational basis vector `|index⟩` in dimension `dim`.
pub fn ket(dim: usize, index: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[index] = c64(1.0, 0.0);
    v
}

/// `|v⟩⟨v|`
pub fn projector(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

/// Kronecker product; the left factor indexes the slow digit.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff: shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Entrywise comparison with an explicit absolute tolerance.
pub fn approx_eq(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    a.shape() == b.shape() && max_abs_diff(a, b) <= tol
}

/// `‖M − M†‖_max`
pub fn hermiticity_error(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `‖U†U − I‖_max`
pub fn unitarity_error(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are returned in descending order with matching eigenvector
/// columns. Fails if `m` deviates from Hermitian by more than `tol`.
pub fn hermitian_eigen(m: &ComplexMatrix, tol: f64) -> Result<(Vec<f64>, ComplexMatrix)> {
    let dev = hermiticity_error(m);
    if dev > tol {
        return Err(Error::NotHermitian(dev));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = m.nrows();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Eigenvalues (descending) of a matrix assumed Hermitian; only the
/// Hermitian part is used. Closed form for 1×1 and 2×2.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    match m.nrows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
            let mean = 0.5 * (a + d);
            let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            vec![mean + half_gap, mean - half_gap]
        }
        _ => {
            let mut values: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
            values.sort_by(|a, b| b.total_cmp(a));
            values
        }
    }
}

/// Shannon entropy in bits of a spectrum; entries at or below
/// [`EIGEN_CLAMP`] contribute zero.
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&x| x > EIGEN_CLAMP)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Ordered local dimensions with unique labels: the tensor-factor layout of a
/// state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemDims {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl SubsystemDims {
    pub fn new<S: Into<String>>(dims: Vec<usize>, labels: Vec<S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if dims.is_empty() {
            return Err(Error::InvalidSelection("at least one subsystem is required".into()));
        }
        if dims.len() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} dimensions but {} labels",
                dims.len(),
                labels.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidSelection(format!("subsystem dimension {d} is not positive")));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() {
                return Err(Error::InvalidSelection("empty subsystem label".into()));
            }
            if labels[..i].contains(l) {
                return Err(Error::InvalidSelection(format!("duplicate label `{l}`")));
            }
        }
        Ok(Self { dims, labels })
    }

    /// Single-subsystem signature.
    pub fn single(label: &str, dim: usize) -> Result<Self> {
        Self::new(vec![dim], vec![label])
    }

    pub fn from_pairs(pairs: &[(&str, usize)]) -> Result<Self> {
        Self::new(
            pairs.iter().map(|p| p.1).collect(),
            pairs.iter().map(|p| p.0).collect(),
        )
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.dims[self.index_of(label)?])
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    /// Row-major strides: stride of factor k is the product of the dims after k.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    /// Concatenation `self ⊗ other`; labels must stay unique.
    pub fn concat(&self, other: &SubsystemDims) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Self::new(dims, labels)
    }

    /// Sub-signature over the given factor indices (kept in the given order).
    pub(crate) fn select(&self, indices: &[usize]) -> Self {
        Self {
            dims: indices.iter().map(|&i| self.dims[i]).collect(),
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }

    /// Resolves labels to factor indices, sorted into signature order.
    pub(crate) fn resolve(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let i = self.index_of(l)?;
            if out.contains(&i) {
                return Err(Error::InvalidSelection(format!("label `{l}` selected twice")));
            }
            out.push(i);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Flat-index offsets of every multi-index over the selected factors,
    /// lexicographic in the order given.
    pub(crate) fn offsets(&self, select: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0usize];
        for &k in select {
            let mut next = Vec::with_capacity(offsets.len() * self.dims[k]);
            for &base in &offsets {
                for digit in 0..self.dims[k] {
                    next.push(base + digit * strides[k]);
                }
            }
            offsets = next;
        }
        offsets
    }

    pub(crate) fn complement(&self, select: &[usize]) -> Vec<usize> {
        (0..self.dims.len()).filter(|i| !select.contains(i)).collect()
    }
}

/// Embeds `op`, acting on the listed factors (in the listed order), into the
/// full space with identity on every other factor.
pub fn embed_operator(op: &ComplexMatrix, dims: &SubsystemDims, targets: &[&str]) -> Result<ComplexMatrix> {
    let mut idx = Vec::with_capacity(targets.len());
    for t in targets {
        let i = dims.index_of(t)?;
        if idx.contains(&i) {
            return Err(Error::InvalidSelection(format!("target `{t}` listed twice")));
        }
        idx.push(i);
    }
    let target_dim: usize = idx.iter().map(|&i| dims.dims()[i]).product();
    if op.nrows() != target_dim || op.ncols() != target_dim {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, targets span dimension {target_dim}",
            op.nrows(),
            op.ncols()
        )));
    }
    let target_off = dims.offsets(&idx);
    let rest_off = dims.offsets(&dims.complement(&idx));
    let n = dims.total();
    let mut out = ComplexMatrix::zeros(n, n);
    for &r in &rest_off {
        for (i, &ti) in target_off.iter().enumerate() {
            for (j, &tj) in target_off.iter().enumerate() {
                out[(r + ti, r + tj)] = op[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Positive semidefinite, unit-trace Hermitian matrix tagged with its
/// subsystem layout.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    dims: SubsystemDims,
    tol: f64,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix, dims: SubsystemDims) -> Result<Self> {
        Self::with_tol(matrix, dims, DEFAULT_TOL)
    }

    pub fn with_tol(matrix: ComplexMatrix, dims: SubsystemDims, tol: f64) -> Result<Self> {
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::InvalidParameter(format!("tolerance {tol} must be non-negative")));
        }
        let state = Self { matrix, dims, tol };
        state.validate()?;
        Ok(state)
    }

    /// Single-subsystem state.
    pub fn single(matrix: ComplexMatrix, label: &str) -> Result<Self> {
        let dims = SubsystemDims::single(label, matrix.nrows())?;
        Self::new(matrix, dims)
    }

    pub fn from_pure(psi: &PureStateVector) -> Result<Self> {
        Self::new(projector(psi.amplitudes()), psi.dims().clone())
    }

    pub fn maximally_mixed(dims: SubsystemDims) -> Result<Self> {
        let n = dims.total();
        Self::new(identity(n).unscale(n as f64), dims)
    }

    /// Re-checks every invariant: shape, Hermiticity, unit trace, PSD.
    pub fn validate(&self) -> Result<()> {
        let n = self.dims.total();
        if self.matrix.nrows() != n || self.matrix.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, subsystem dims {:?} require {n}x{n}",
                self.matrix.nrows(),
                self.matrix.ncols(),
                self.dims.dims()
            )));
        }
        if self.matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite matrix entry".into()));
        }
        let herm = hermiticity_error(&self.matrix);
        if herm > self.tol {
            return Err(Error::NotHermitian(herm));
        }
        let tr = trace(&self.matrix);
        if (tr - c64(1.0, 0.0)).norm() > self.tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&self.matrix).last().copied().unwrap_or(0.0);
        if min < -self.tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(self)
    }

    /// `Tr(ρ²)`
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Expectation value `Tr(ρ O)`.
    pub fn expectation(&self, observable: &ComplexMatrix) -> Result<Complex64> {
        if observable.shape() != self.matrix.shape() {
            return Err(Error::DimensionMismatch(format!(
                "observable {:?} vs state {:?}",
                observable.shape(),
                self.matrix.shape()
            )));
        }
        Ok((&self.matrix * observable).trace())
    }

    /// `self ⊗ other`
    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        let dims = self.dims.concat(&other.dims)?;
        Self::with_tol(tensor_product(&self.matrix, &other.matrix), dims, self.tol.max(other.tol))
    }

    /// Same matrix under a new layout with identical total dimension.
    pub fn relabel(&self, dims: SubsystemDims) -> Result<DensityOperator> {
        Self::with_tol(self.matrix.clone(), dims, self.tol)
    }

    pub fn reduce(&self, keep: &[&str]) -> Result<DensityOperator> {
        partial_trace(self, keep)
    }

    /// `U ρ U†` for a unitary on the full space.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<DensityOperator> {
        if u.shape() != self.matrix.shape() {
            return Err(Error::DimensionMismatch(format!(
                "unitary {:?} vs state {:?}",
                u.shape(),
                self.matrix.shape()
            )));
        }
        let m = hermitian_part(&(u * &self.matrix * u.adjoint()));
        Self::with_tol(m, self.dims.clone(), self.tol)
    }
}

/// Unit-norm state vector with a subsystem layout.
#[derive(Debug, Clone)]
pub struct PureStateVector {
    amplitudes: ComplexVector,
    dims: SubsystemDims,
}

impl PureStateVector {
    pub fn new(amplitudes: ComplexVector, dims: SubsystemDims) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for total dimension {}",
                amplitudes.len(),
                dims.total()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidState(format!("state vector norm {norm} differs from 1")));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Normalizes `amplitudes` before wrapping.
    pub fn normalized(amplitudes: ComplexVector, dims: SubsystemDims) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(amplitudes.unscale(norm), dims)
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn density(&self) -> Result<DensityOperator> {
        DensityOperator::from_pure(self)
    }
}

/// Reduced state over `keep`; the result lists the kept labels in the
/// original signature order.
pub fn partial_trace(state: &DensityOperator, keep: &[&str]) -> Result<DensityOperator> {
    let dims = state.dims();
    if keep.is_empty() {
        return Err(Error::InvalidSelection("keep set is empty".into()));
    }
    let kept = dims.resolve(keep)?;
    if kept.len() == dims.len() {
        return Err(Error::InvalidSelection(
            "keep set covers every subsystem; partial trace would be a no-op".into(),
        ));
    }
    let traced = dims.complement(&kept);
    let kept_off = dims.offsets(&kept);
    let traced_off = dims.offsets(&traced);
    let rho = state.matrix();
    let n = kept_off.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (r, &kr) in kept_off.iter().enumerate() {
        for (c, &kc) in kept_off.iter().enumerate() {
            out[(r, c)] = traced_off.iter().map(|&t| rho[(kr + t, kc + t)]).sum();
        }
    }
    DensityOperator::with_tol(hermitian_part(&out), dims.select(&kept), state.tol())
}

/// `S(ρ) = −Σ λ log₂ λ` in bits.
pub fn von_neumann_entropy(state: &DensityOperator) -> f64 {
    entropy_of_spectrum(&state.eigenvalues())
}

/// Purification `|Ψ⟩ = Σ_j √λ_j |b_j⟩ ⊗ |j⟩_anc` of `state`.
///
/// The ancilla is appended as the last tensor factor and has the full input
/// dimension; Schmidt directions beyond the rank carry zero weight.
pub fn purify(state: &DensityOperator, ancilla_label: &str) -> Result<PureStateVector> {
    let (values, vectors) = hermitian_eigen(state.matrix(), state.tol())?;
    let n = state.dim();
    let dims = state.dims().concat(&SubsystemDims::single(ancilla_label, n)?)?;
    let mut psi = ComplexVector::zeros(n * n);
    for (j, &lambda) in values.iter().enumerate() {
        let weight = lambda.max(0.0).sqrt();
        if weight == 0.0 {
            continue;
        }
        for i in 0..n {
            psi[i * n + j] += vectors[(i, j)] * weight;
        }
    }
    // Clamped negative eigenvalues can shift the norm by ~tol.
    PureStateVector::normalized(psi, dims)
}

/// `½ Σ |eig(a − b)|`
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    if a.dims().dims() != b.dims().dims() {
        return Err(Error::DimensionMismatch(format!(
            "dims {:?} vs {:?}",
            a.dims().dims(),
            b.dims().dims()
        )));
    }
    let diff = a.matrix() - b.matrix();
    Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|x| x.abs()).sum::<f64>())
}
