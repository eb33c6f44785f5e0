//! CPTP maps as Kraus families, their unitary dilations with an explicit
//! environment state, and the named processes built from them: projective
//! dephasing, bleaching (hiding), thermalization, and swap-with-bath.

use crate::error::{Error, Result};
use crate::qmath::{
    c64, embed_operator, hermitian_eigen, hermitian_part, identity, ket, max_abs_diff, partial_trace, projector,
    purify, tensor_product, unitarity_error, von_neumann_entropy, ComplexMatrix, ComplexVector, DensityOperator,
    SubsystemDims,
};

/// Tolerance on `Σ K†K = I` and on `U†U = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Label given to synthesized environments.
pub const ENV_LABEL: &str = "E";

/// Completely positive trace-preserving map `ρ ↦ Σ K ρ K†`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus_ops: Vec<ComplexMatrix>,
    dim_in: usize,
    dim_out: usize,
}

impl KrausChannel {
    pub fn new(kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus_ops
            .first()
            .ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        let (dim_out, dim_in) = first.shape();
        if let Some(k) = kraus_ops.iter().find(|k| k.shape() != (dim_out, dim_in)) {
            return Err(Error::InvalidChannel(format!(
                "Kraus operator of shape {:?} in a family of shape {:?}",
                k.shape(),
                (dim_out, dim_in)
            )));
        }
        let ch = Self { kraus_ops, dim_in, dim_out };
        let err = ch.completeness_error();
        if err.is_nan() || err > COMPLETENESS_TOL {
            return Err(Error::InvalidChannel(format!("Σ K†K deviates from I by {err:e}")));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self { kraus_ops: vec![identity(dim)], dim_in: dim, dim_out: dim }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn is_square(&self) -> bool {
        self.dim_in == self.dim_out
    }

    pub fn completeness_error(&self) -> f64 {
        let sum = self
            .kraus_ops
            .iter()
            .fold(ComplexMatrix::zeros(self.dim_in, self.dim_in), |acc, k| acc + k.adjoint() * k);
        max_abs_diff(&sum, &identity(self.dim_in))
    }

    /// The linear map on an arbitrary operator (not necessarily a state).
    pub fn apply_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.kraus_ops
            .iter()
            .fold(ComplexMatrix::zeros(self.dim_out, self.dim_out), |acc, k| acc + k * x * k.adjoint())
    }
}

/// `Σ K ρ K†` on the whole state. A channel with `dim_in ≠ dim_out` can only
/// act on a single-subsystem state.
pub fn apply_channel(ch: &KrausChannel, state: &DensityOperator) -> Result<DensityOperator> {
    if state.dim() != ch.dim_in {
        return Err(Error::DimensionMismatch(format!(
            "channel input dimension {} vs state dimension {}",
            ch.dim_in,
            state.dim()
        )));
    }
    let dims = if ch.is_square() {
        state.dims().clone()
    } else if state.dims().len() == 1 {
        SubsystemDims::single(&state.dims().labels()[0], ch.dim_out)?
    } else {
        return Err(Error::DimensionMismatch(
            "non-square channel applied to a multipartite state".into(),
        ));
    };
    DensityOperator::with_tol(hermitian_part(&ch.apply_operator(state.matrix())), dims, state.tol())
}

/// `(I ⊗ E_side ⊗ I)(ρ)`
pub fn apply_local_channel(ch: &KrausChannel, state: &DensityOperator, side: &str) -> Result<DensityOperator> {
    let d = state.dims().dim_of(side)?;
    if !ch.is_square() || ch.dim_in != d {
        return Err(Error::DimensionMismatch(format!(
            "channel {}→{} on subsystem `{side}` of dimension {d}",
            ch.dim_in, ch.dim_out
        )));
    }
    let n = state.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in &ch.kraus_ops {
        let full = embed_operator(k, state.dims(), &[side])?;
        out += &full * state.matrix() * full.adjoint();
    }
    DensityOperator::with_tol(hermitian_part(&out), state.dims().clone(), state.tol())
}

/// Unitary `U` on `system ⊗ environment` with the environment's initial
/// state; the system factor is the one labelled `acts_on` in any state the
/// dilation is run on.
#[derive(Debug, Clone)]
pub struct UnitaryDilation {
    unitary: ComplexMatrix,
    system_dim: usize,
    env_state: DensityOperator,
    acts_on: String,
}

impl UnitaryDilation {
    /// `env_state` must be a single-subsystem state; its label names the
    /// environment register.
    pub fn new(unitary: ComplexMatrix, env_state: DensityOperator, acts_on: &str) -> Result<Self> {
        if env_state.dims().len() != 1 {
            return Err(Error::InvalidChannel("environment state must be a single register".into()));
        }
        let env_dim = env_state.dim();
        if !unitary.is_square() || !unitary.nrows().is_multiple_of(env_dim) {
            return Err(Error::DimensionMismatch(format!(
                "unitary of shape {:?} with environment dimension {env_dim}",
                unitary.shape()
            )));
        }
        let err = unitarity_error(&unitary);
        if err.is_nan() || err > COMPLETENESS_TOL {
            return Err(Error::InvalidChannel(format!("U†U deviates from I by {err:e}")));
        }
        if env_state.dims().labels()[0] == acts_on {
            return Err(Error::InvalidSelection(format!(
                "environment and system share the label `{acts_on}`"
            )));
        }
        Ok(Self { system_dim: unitary.nrows() / env_dim, unitary, env_state, acts_on: acts_on.to_string() })
    }

    /// Same dilation targeting a differently labelled subsystem.
    pub fn acting_on(mut self, label: &str) -> Result<Self> {
        if label == self.env_label() {
            return Err(Error::InvalidSelection(format!(
                "environment and system share the label `{label}`"
            )));
        }
        self.acts_on = label.to_string();
        Ok(self)
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn env_dim(&self) -> usize {
        self.env_state.dim()
    }

    pub fn env_state(&self) -> &DensityOperator {
        &self.env_state
    }

    pub fn env_label(&self) -> &str {
        &self.env_state.dims().labels()[0]
    }

    pub fn acts_on(&self) -> &str {
        &self.acts_on
    }

    /// `Tr_E[U (x ⊗ ρ_E) U†]` for an arbitrary system operator `x`.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let joint = &self.unitary * tensor_product(x, self.env_state.matrix()) * self.unitary.adjoint();
        trace_out_last(&joint, self.system_dim, self.env_dim())
    }

    /// Kraus family of the induced channel, from the spectral decomposition
    /// of the environment state: `K_{e,j} = √λ_j (I ⊗ ⟨e|) U (I ⊗ |φ_j⟩)`.
    pub fn induced_channel(&self) -> Result<KrausChannel> {
        let (values, vectors) = hermitian_eigen(self.env_state.matrix(), self.env_state.tol())?;
        let (d, m) = (self.system_dim, self.env_dim());
        let mut ops = Vec::new();
        for (j, &lambda) in values.iter().enumerate() {
            if lambda <= crate::qmath::EIGEN_CLAMP {
                continue;
            }
            let phi = vectors.column(j);
            for e in 0..m {
                let k = ComplexMatrix::from_fn(d, d, |out, inp| {
                    (0..m).map(|f| self.unitary[(out * m + e, inp * m + f)] * phi[f]).sum::<num_complex::Complex64>()
                        * lambda.sqrt()
                });
                if k.iter().any(|z| z.norm() > 1e-15) {
                    ops.push(k);
                }
            }
        }
        KrausChannel::new(ops)
    }

    /// Equivalent dilation with a pure environment: the environment state is
    /// purified into a reference register appended to the environment, and
    /// `U` is extended by the identity on that register.
    pub fn with_purified_environment(&self) -> Result<Self> {
        let label = self.env_label().to_string();
        let psi = purify(&self.env_state, "R")?;
        let env = DensityOperator::single(projector(psi.amplitudes()), &label)?;
        let u = tensor_product(&self.unitary, &identity(self.env_dim()));
        Self::new(u, env, &self.acts_on)
    }
}

/// Partial trace over the trailing factor of a `(d·m) × (d·m)` operator.
fn trace_out_last(x: &ComplexMatrix, d: usize, m: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| (0..m).map(|e| x[(i * m + e, j * m + e)]).sum())
}

/// Largest entrywise discrepancy between `ch` and the dilation's induced
/// channel over the operator basis `{|i⟩⟨j|}`.
pub fn channel_deviation(ch: &KrausChannel, dilation: &UnitaryDilation) -> Result<f64> {
    let d = ch.dim_in();
    if !ch.is_square() || dilation.system_dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "channel dimension {d} vs dilation system dimension {}",
            dilation.system_dim()
        )));
    }
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let mut e = ComplexMatrix::zeros(d, d);
            e[(i, j)] = c64(1.0, 0.0);
            worst = worst.max(max_abs_diff(&ch.apply_operator(&e), &dilation.apply_operator(&e)));
        }
    }
    Ok(worst)
}

/// Extends fixed orthonormal columns to a unitary. The free columns are
/// filled, in index order, with Gram–Schmidt-orthogonalized computational
/// basis vectors taken in index order.
fn complete_isometry(n: usize, fixed: &[(usize, ComplexVector)]) -> Result<ComplexMatrix> {
    let mut u = ComplexMatrix::zeros(n, n);
    let mut filled = vec![false; n];
    let mut columns: Vec<ComplexVector> = Vec::with_capacity(n);
    for (idx, col) in fixed {
        if filled[*idx] {
            return Err(Error::InvalidChannel(format!("column {idx} fixed twice")));
        }
        u.set_column(*idx, col);
        filled[*idx] = true;
        columns.push(col.clone());
    }
    let mut candidates = 0..n;
    for slot in (0..n).filter(|&i| !filled[i]).collect::<Vec<_>>() {
        loop {
            let c = candidates
                .next()
                .ok_or_else(|| Error::InvalidChannel("isometry columns are not independent".into()))?;
            let mut v = ket(n, c);
            // two passes of modified Gram–Schmidt
            for _ in 0..2 {
                for q in &columns {
                    let overlap = q.dotc(&v);
                    v -= q * overlap;
                }
            }
            let norm = v.norm();
            if norm > 1e-6 {
                let v = v.unscale(norm);
                u.set_column(slot, &v);
                columns.push(v);
                break;
            }
        }
    }
    Ok(u)
}

/// Stinespring dilation with environment dimension equal to the Kraus count
/// and environment initialized in `|0⟩`.
pub fn stinespring_dilation(ch: &KrausChannel) -> Result<UnitaryDilation> {
    stinespring_dilation_with_env(ch, ch.kraus_ops().len())
}

/// Stinespring dilation into an environment of dimension `env_dim ≥` Kraus
/// count: `U (|ψ⟩ ⊗ |0⟩) = Σ_k K_k|ψ⟩ ⊗ |k⟩`.
pub fn stinespring_dilation_with_env(ch: &KrausChannel, env_dim: usize) -> Result<UnitaryDilation> {
    if !ch.is_square() {
        return Err(Error::InvalidChannel(format!(
            "dilation requires a square channel, got {}→{}",
            ch.dim_in, ch.dim_out
        )));
    }
    let r = ch.kraus_ops().len();
    if env_dim < r {
        return Err(Error::InvalidParameter(format!(
            "environment dimension {env_dim} below Kraus count {r}"
        )));
    }
    let d = ch.dim_in;
    let n = d * env_dim;
    let fixed: Vec<(usize, ComplexVector)> = (0..d)
        .map(|j| {
            let mut col = ComplexVector::zeros(n);
            for (k, op) in ch.kraus_ops().iter().enumerate() {
                for i in 0..d {
                    col[i * env_dim + k] = op[(i, j)];
                }
            }
            (j * env_dim, col)
        })
        .collect();
    let u = complete_isometry(n, &fixed)?;
    let env = DensityOperator::single(projector(&ket(env_dim, 0)), ENV_LABEL)?;
    UnitaryDilation::new(u, env, "B")
}

/// States before and after running a dilation on a labelled subsystem.
#[derive(Debug, Clone)]
pub struct ProcessOutcome {
    /// `ρ_sys ⊗ ρ_E`
    pub state_before: DensityOperator,
    /// `(I ⊗ U)(ρ_sys ⊗ ρ_E)(I ⊗ U)†`
    pub state_after: DensityOperator,
    pub system_before: DensityOperator,
    pub system_after: DensityOperator,
    pub env_before: DensityOperator,
    pub env_after: DensityOperator,
    pub acts_on: String,
    pub env_label: String,
}

impl ProcessOutcome {
    pub fn system_labels(&self) -> Vec<&str> {
        self.system_before.dims().labels().iter().map(String::as_str).collect()
    }

    /// `|S(after) − S(before)|` of the global state.
    pub fn global_entropy_drift(&self) -> f64 {
        (von_neumann_entropy(&self.state_after) - von_neumann_entropy(&self.state_before)).abs()
    }

    /// `|S(ρ_BE') − S(ρ_BE)|` for the acted-on subsystem and environment.
    pub fn local_entropy_drift(&self) -> Result<f64> {
        let keep = [self.acts_on.as_str(), self.env_label.as_str()];
        let s = |st: &DensityOperator| -> Result<f64> {
            if st.dims().len() == 2 {
                Ok(von_neumann_entropy(st))
            } else {
                Ok(von_neumann_entropy(&partial_trace(st, &keep)?))
            }
        };
        Ok((s(&self.state_after)? - s(&self.state_before)?).abs())
    }
}

/// Runs `ρ ⊗ ρ_E ↦ (I ⊗ U)(ρ ⊗ ρ_E)(I ⊗ U)†` with `U` on the dilation's
/// target subsystem and the appended environment.
pub fn run_process(state: &DensityOperator, dilation: &UnitaryDilation) -> Result<ProcessOutcome> {
    let dims = state.dims();
    let target_dim = dims.dim_of(dilation.acts_on())?;
    if target_dim != dilation.system_dim() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem `{}` has dimension {target_dim}, dilation acts on dimension {}",
            dilation.acts_on(),
            dilation.system_dim()
        )));
    }
    let before = state.tensor(dilation.env_state())?;
    let u = embed_operator(dilation.unitary(), before.dims(), &[dilation.acts_on(), dilation.env_label()])?;
    let after = before.conjugate(&u)?;
    let system_labels: Vec<&str> = dims.labels().iter().map(String::as_str).collect();
    let system_after = partial_trace(&after, &system_labels)?;
    let env_after = partial_trace(&after, &[dilation.env_label()])?;
    Ok(ProcessOutcome {
        state_before: before,
        state_after: after,
        system_before: state.clone(),
        system_after,
        env_before: dilation.env_state().clone(),
        env_after,
        acts_on: dilation.acts_on().to_string(),
        env_label: dilation.env_label().to_string(),
    })
}

fn check_hamiltonian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() || h.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!("Hamiltonian of shape {:?}", h.shape())));
    }
    Ok(())
}

/// Gibbs weights `e^{−β E_l} / Z` (descending-energy-order eigenbasis of
/// `h`) with the eigenvectors as columns. Energies are shifted by the ground
/// energy before exponentiating.
fn gibbs_spectrum(h: &ComplexMatrix, beta: f64) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_hamiltonian(h)?;
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidParameter(format!("inverse temperature {beta} must be finite and ≥ 0")));
    }
    let (energies, vectors) = hermitian_eigen(h, crate::qmath::DEFAULT_TOL)?;
    let ground = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = energies.iter().map(|e| (-beta * (e - ground)).exp()).collect();
    let z: f64 = weights.iter().sum();
    Ok((weights.into_iter().map(|w| w / z).collect(), vectors))
}

/// `e^{−βH} / Tr e^{−βH}` as a single-subsystem state labelled `label`.
pub fn thermal_state(h: &ComplexMatrix, beta: f64, label: &str) -> Result<DensityOperator> {
    let (weights, vectors) = gibbs_spectrum(h, beta)?;
    let n = h.nrows();
    let mut rho = ComplexMatrix::zeros(n, n);
    for (l, w) in weights.iter().enumerate() {
        let v = vectors.column(l).into_owned();
        rho += projector(&v).scale(*w);
    }
    DensityOperator::single(hermitian_part(&rho), label)
}

fn check_orthonormal_columns(basis: &ComplexMatrix, dim: usize) -> Result<()> {
    if basis.shape() != (dim, dim) {
        return Err(Error::DimensionMismatch(format!(
            "basis matrix of shape {:?}, expected {dim}x{dim}",
            basis.shape()
        )));
    }
    let err = unitarity_error(basis);
    if err.is_nan() || err > COMPLETENESS_TOL {
        return Err(Error::InvalidParameter(format!("basis is not orthonormal (deviation {err:e})")));
    }
    Ok(())
}

/// Kraus family `F_{ln} = √(e^{−βE_l}/Z) |l⟩⟨ψ_n|`, ordered `l`-major, where
/// `|l⟩` are eigenvectors of `h` and `|ψ_n⟩` the columns of `input_basis`.
/// Every input is mapped to the Gibbs state of `h`.
pub fn thermalizing_channel(h: &ComplexMatrix, beta: f64, input_basis: &ComplexMatrix) -> Result<KrausChannel> {
    check_hamiltonian(h)?;
    let d = h.nrows();
    check_orthonormal_columns(input_basis, d)?;
    let (weights, vectors) = gibbs_spectrum(h, beta)?;
    let mut ops = Vec::with_capacity(d * d);
    for (l, w) in weights.iter().enumerate() {
        let out = vectors.column(l).into_owned().scale(w.sqrt());
        for n in 0..d {
            ops.push(&out * input_basis.column(n).adjoint());
        }
    }
    KrausChannel::new(ops)
}

/// Dilation of [`thermalizing_channel`] with a `d²`-dimensional environment
/// whose basis is indexed by the Kraus pair `(l, n)`.
pub fn thermalizing_dilation(h: &ComplexMatrix, beta: f64, input_basis: &ComplexMatrix) -> Result<UnitaryDilation> {
    stinespring_dilation(&thermalizing_channel(h, beta, input_basis)?)
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidParameter("empty distribution".into()));
    }
    if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(Error::InvalidParameter(format!("distribution {p:?} has negative or non-finite entries")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!("distribution sums to {total}, not 1")));
    }
    Ok(())
}

/// The fixed output `Σ_k p_k |k⟩⟨k|` of the bleaching map.
pub fn bleached_state(p: &[f64], label: &str) -> Result<DensityOperator> {
    check_distribution(p)?;
    let m = ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(p.len(), p.iter().map(|&x| c64(x, 0.0))));
    DensityOperator::single(m, label)
}

/// Hiding-map dilation `|b⟩_B |0⟩_E ↦ Σ_k √p_k |k⟩_B ⊗ (|b⟩ |q_k⟩)_E`.
///
/// The environment is a `d_B × m` register laid out as (copy of the input) ⊗
/// (span of the `q_k`), where `d_B = p.len()` and `m` is the length of the
/// `env_basis` vectors. Every input is mapped to the same output
/// `Σ_k p_k |k⟩⟨k|` while the input itself lands in the environment.
pub fn bleaching_dilation(p: &[f64], env_basis: &[ComplexVector]) -> Result<UnitaryDilation> {
    check_distribution(p)?;
    let d = p.len();
    if env_basis.len() != d {
        return Err(Error::InvalidParameter(format!(
            "{} environment vectors for {d} hiding outcomes",
            env_basis.len()
        )));
    }
    let m = env_basis[0].len();
    if m < d || env_basis.iter().any(|q| q.len() != m) {
        return Err(Error::InvalidParameter(format!(
            "environment vectors must share a length of at least {d}"
        )));
    }
    let gram = ComplexMatrix::from_fn(d, d, |i, j| env_basis[i].dotc(&env_basis[j]));
    if max_abs_diff(&gram, &identity(d)) > COMPLETENESS_TOL {
        return Err(Error::InvalidParameter("environment vectors are not orthonormal".into()));
    }
    let env_dim = d * m;
    let n = d * env_dim;
    let fixed: Vec<(usize, ComplexVector)> = (0..d)
        .map(|b| {
            let mut col = ComplexVector::zeros(n);
            for (k, (&pk, q)) in p.iter().zip(env_basis).enumerate() {
                for (qi, &amp) in q.iter().enumerate() {
                    col[k * env_dim + b * m + qi] += amp * pk.sqrt();
                }
            }
            (b * env_dim, col)
        })
        .collect();
    let u = complete_isometry(n, &fixed)?;
    let env = DensityOperator::single(projector(&ket(env_dim, 0)), ENV_LABEL)?;
    UnitaryDilation::new(u, env, "B")
}

/// Measurement (complete dephasing) in the basis given by the columns of
/// `basis`: Kraus `{|i⟩⟨i|}`.
pub fn dephasing_measurement_channel(basis: &ComplexMatrix) -> Result<KrausChannel> {
    let d = basis.nrows();
    check_orthonormal_columns(basis, d)?;
    KrausChannel::new(basis.column_iter().map(|c| projector(&c.into_owned())).collect())
}

/// SWAP of the system with an environment of equal dimension prepared in
/// `env_state`: the system leaves in `env_state`.
pub fn swap_dilation(env_state: DensityOperator, acts_on: &str) -> Result<UnitaryDilation> {
    let d = env_state.dim();
    let mut u = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            u[(j * d + i, i * d + j)] = c64(1.0, 0.0);
        }
    }
    UnitaryDilation::new(u, env_state, acts_on)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{approx_eq, trace_distance};

    fn diag(v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(v.len(), v.iter().map(|&x| c64(x, 0.0))))
    }

    fn bell() -> DensityOperator {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = ComplexVector::from_vec(vec![c64(s, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(s, 0.0)]);
        DensityOperator::new(projector(&psi), SubsystemDims::from_pairs(&[("A", 2), ("B", 2)]).unwrap()).unwrap()
    }

    fn plus_state() -> DensityOperator {
        DensityOperator::single(ComplexMatrix::from_element(2, 2, c64(0.5, 0.0)), "B").unwrap()
    }

    fn depolarizing() -> KrausChannel {
        let x = ComplexMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]);
        let y = ComplexMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)]);
        let z = diag(&[1.0, -1.0]);
        KrausChannel::new(vec![identity(2).scale(0.5), x.scale(0.5), y.scale(0.5), z.scale(0.5)]).unwrap()
    }

    #[test]
    fn kraus_completeness_is_enforced() {
        assert!(KrausChannel::new(vec![diag(&[1.0, 0.5])]).is_err());
        assert!(KrausChannel::new(vec![]).is_err());
        assert!(KrausChannel::new(vec![identity(2), identity(3)]).is_err());
    }

    #[test]
    fn identity_and_depolarizing_channels() {
        let s = plus_state();
        let out = apply_channel(&KrausChannel::identity(2), &s).unwrap();
        assert!(approx_eq(out.matrix(), s.matrix(), 0.0));
        let out = apply_channel(&depolarizing(), &s).unwrap();
        assert!(approx_eq(out.matrix(), &diag(&[0.5, 0.5]), 1e-15));
    }

    #[test]
    fn apply_channel_dimension_mismatch() {
        assert!(matches!(apply_channel(&KrausChannel::identity(3), &plus_state()), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn local_dephasing_of_bell_state() {
        let ch = dephasing_measurement_channel(&identity(2)).unwrap();
        let out = apply_local_channel(&ch, &bell(), "B").unwrap();
        assert!(approx_eq(out.matrix(), &diag(&[0.5, 0.0, 0.0, 0.5]), 1e-15));
        let a_before = partial_trace(&bell(), &["A"]).unwrap();
        let a_after = partial_trace(&out, &["A"]).unwrap();
        assert!(approx_eq(a_before.matrix(), a_after.matrix(), 1e-15));
    }

    #[test]
    fn identity_dilation_leaves_state_untouched() {
        let dil = stinespring_dilation(&KrausChannel::identity(2)).unwrap();
        assert_eq!(dil.env_dim(), 1);
        assert!(approx_eq(dil.unitary(), &identity(2), 0.0));
        let out = run_process(&bell(), &dil).unwrap();
        assert!(approx_eq(out.system_after.matrix(), bell().matrix(), 1e-15));
    }

    #[test]
    fn dephasing_dilation_matches_on_operator_basis() {
        let ch = dephasing_measurement_channel(&identity(2)).unwrap();
        let dil = stinespring_dilation(&ch).unwrap();
        assert!(channel_deviation(&ch, &dil).unwrap() <= 1e-12);
        let induced = dil.induced_channel().unwrap();
        let s = plus_state();
        let a = apply_channel(&induced, &s).unwrap();
        assert!(approx_eq(a.matrix(), &diag(&[0.5, 0.5]), 1e-12));
    }

    #[test]
    fn dilation_rejects_non_square_channel() {
        let k = ComplexMatrix::from_row_slice(1, 2, &[c64(1.0, 0.0), c64(0.0, 0.0)]);
        let k2 = ComplexMatrix::from_row_slice(1, 2, &[c64(0.0, 0.0), c64(1.0, 0.0)]);
        let ch = KrausChannel::new(vec![k, k2]).unwrap();
        assert!(stinespring_dilation(&ch).is_err());
    }

    #[test]
    fn thermal_state_examples() {
        let h = diag(&[0.0, 1.0]);
        let inf = thermal_state(&h, 0.0, "E").unwrap();
        assert!(approx_eq(inf.matrix(), &diag(&[0.5, 0.5]), 1e-15));
        let t = thermal_state(&h, std::f64::consts::LN_2, "E").unwrap();
        assert!(approx_eq(t.matrix(), &diag(&[2.0 / 3.0, 1.0 / 3.0]), 1e-15));
        let cold = thermal_state(&h, 1e4, "E").unwrap();
        assert!(approx_eq(cold.matrix(), &diag(&[1.0, 0.0]), 1e-9));
        assert!(thermal_state(&h, -1.0, "E").is_err());
    }

    #[test]
    fn thermalizing_channel_structure() {
        let h = diag(&[0.0, 1.0]);
        let ch = thermalizing_channel(&h, std::f64::consts::LN_2, &identity(2)).unwrap();
        assert_eq!(ch.kraus_ops().len(), 4);
        assert!(ch.completeness_error() <= 1e-12);
        let out = apply_channel(&ch, &plus_state()).unwrap();
        assert!(approx_eq(out.matrix(), &diag(&[2.0 / 3.0, 1.0 / 3.0]), 1e-12));
        let zero = thermalizing_channel(&h, 0.0, &identity(2)).unwrap();
        assert!(approx_eq(apply_channel(&zero, &plus_state()).unwrap().matrix(), &diag(&[0.5, 0.5]), 1e-12));
        assert!(thermalizing_channel(&h, 1.0, &diag(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn thermalizing_dilation_has_d_squared_environment() {
        let h = diag(&[0.0, 1.0, 2.5]);
        let dil = thermalizing_dilation(&h, 0.7, &identity(3)).unwrap();
        assert_eq!(dil.env_dim(), 9);
        let ch = thermalizing_channel(&h, 0.7, &identity(3)).unwrap();
        assert!(channel_deviation(&ch, &dil).unwrap() <= 1e-9);
    }

    #[test]
    fn bleaching_uniform_qubit_outputs_maximally_mixed() {
        let q = vec![ket(2, 0), ket(2, 1)];
        let dil = bleaching_dilation(&[0.5, 0.5], &q).unwrap();
        assert_eq!(dil.env_dim(), 4);
        let out = dil.apply_operator(plus_state().matrix());
        assert!(approx_eq(&out, &diag(&[0.5, 0.5]), 1e-12));
    }

    #[test]
    fn bleaching_rejects_bad_distribution() {
        let q = vec![ket(2, 0), ket(2, 1)];
        assert!(bleaching_dilation(&[0.6, 0.6], &q).is_err());
        assert!(bleaching_dilation(&[1.2, -0.2], &q).is_err());
        assert!(bleaching_dilation(&[1.0], &q).is_err());
        assert!(bleaching_dilation(&[0.5, 0.5], &[ket(2, 0), ket(2, 0)]).is_err());
    }

    #[test]
    fn bleaching_moves_input_into_environment() {
        let q = vec![ket(2, 0), ket(2, 1)];
        let dil = bleaching_dilation(&[0.25, 0.75], &q).unwrap();
        let one = DensityOperator::single(diag(&[0.0, 1.0]), "B").unwrap();
        let out = run_process(&one, &dil).unwrap();
        let fixed = bleached_state(&[0.25, 0.75], "B").unwrap();
        assert!(trace_distance(&out.system_after, &fixed).unwrap() < 1e-12);
        // environment = |1⟩⟨1| ⊗ Σ p_k |q_k⟩⟨q_k|
        let expected = tensor_product(&diag(&[0.0, 1.0]), &diag(&[0.25, 0.75]));
        assert!(approx_eq(out.env_after.matrix(), &expected, 1e-12));
    }

    #[test]
    fn swap_dilation_exchanges_states() {
        let env = thermal_state(&diag(&[0.0, 1.0]), 1.0, "E").unwrap();
        let dil = swap_dilation(env.clone(), "B").unwrap();
        let out = run_process(&plus_state(), &dil).unwrap();
        assert!(approx_eq(out.system_after.matrix(), env.matrix(), 1e-12));
        assert!(approx_eq(out.env_after.matrix(), plus_state().matrix(), 1e-12));
    }

    #[test]
    fn purified_environment_induces_same_channel() {
        let env = thermal_state(&diag(&[0.0, 1.0]), 0.8, "E").unwrap();
        let dil = swap_dilation(env, "B").unwrap();
        let pure = dil.with_purified_environment().unwrap();
        assert_eq!(pure.env_dim(), 4);
        assert!(pure.env_state().purity() > 1.0 - 1e-12);
        let ch = dil.induced_channel().unwrap();
        assert!(channel_deviation(&ch, &pure).unwrap() <= 1e-12);
    }

    #[test]
    fn run_process_rejects_wrong_target() {
        let dil = stinespring_dilation(&KrausChannel::identity(3)).unwrap();
        assert!(matches!(run_process(&bell(), &dil), Err(Error::DimensionMismatch(_))));
        let dil = stinespring_dilation(&KrausChannel::identity(2)).unwrap().acting_on("Z").unwrap();
        assert!(matches!(run_process(&bell(), &dil), Err(Error::UnknownLabel(_))));
    }
}
