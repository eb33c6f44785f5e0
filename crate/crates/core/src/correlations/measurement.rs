//! Rank-1 projective measurements on one subsystem and the branch states
//! they induce on the rest.

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::qmath::{
    c64, entropy_of_spectrum, hermitian_eigenvalues, hermitian_part, identity, max_abs_diff, projector,
    ComplexMatrix, ComplexVector, DensityOperator, SubsystemDims,
};

/// Outcomes below this probability are dropped from branch averages.
pub const DEGENERATE_BRANCH_PROBABILITY: f64 = 1e-12;

const BASIS_TOL: f64 = 1e-10;

/// Orthonormal rank-1 projective measurement `{|u_i⟩⟨u_i|}` on subsystem `side`.
#[derive(Debug, Clone)]
pub struct ProjectiveMeasurement {
    side: String,
    basis: Vec<ComplexVector>,
    projectors: Vec<ComplexMatrix>,
}

impl ProjectiveMeasurement {
    /// Builds the measurement from an orthonormal basis of the measured subsystem.
    pub fn from_basis(side: &str, basis: Vec<ComplexVector>) -> Result<Self> {
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("measurement basis is empty".into()));
        }
        if let Some(v) = basis.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "basis vector of length {} in a {dim}-element basis",
                v.len()
            )));
        }
        let gram = ComplexMatrix::from_fn(dim, dim, |i, j| basis[i].dotc(&basis[j]));
        let dev = max_abs_diff(&gram, &identity(dim));
        if dev > BASIS_TOL {
            return Err(Error::InvalidParameter(format!(
                "measurement basis not orthonormal (Gram deviation {dev:e})"
            )));
        }
        let projectors = basis.iter().map(projector).collect();
        Ok(Self { side: side.to_string(), basis, projectors })
    }

    /// Basis given as the columns of a unitary.
    pub fn from_columns(side: &str, u: &ComplexMatrix) -> Result<Self> {
        Self::from_basis(side, u.column_iter().map(|c| c.into_owned()).collect())
    }

    pub fn computational(side: &str, dim: usize) -> Result<Self> {
        Self::from_columns(side, &identity(dim))
    }

    /// Qubit measurement along the Bloch direction `(θ, φ)`.
    pub fn bloch(side: &str, theta: f64, phi: f64) -> Self {
        let [up, down] = bloch_basis(theta, phi);
        let projectors = vec![projector(&up), projector(&down)];
        Self { side: side.to_string(), basis: vec![up, down], projectors }
    }

    /// Basis from the Givens-rotation parametrization (`dim·(dim−1)` angles).
    pub fn givens(side: &str, dim: usize, params: &[f64]) -> Result<Self> {
        if params.len() != dim * (dim - 1) {
            return Err(Error::InvalidParameter(format!(
                "{} Givens parameters for dimension {dim} (need {})",
                params.len(),
                dim * (dim - 1)
            )));
        }
        Self::from_columns(side, &givens_unitary(dim, params))
    }

    pub fn side(&self) -> &str {
        &self.side
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexVector] {
        &self.basis
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// Worst deviation from `Σ Π_i = I` and `Π_i Π_j = δ_ij Π_i`.
    pub fn invariant_error(&self) -> f64 {
        let d = self.dim();
        let sum = self.projectors.iter().fold(ComplexMatrix::zeros(d, d), |acc, p| acc + p);
        let mut worst = max_abs_diff(&sum, &identity(d));
        for (i, pi) in self.projectors.iter().enumerate() {
            for (j, pj) in self.projectors.iter().enumerate() {
                let prod = pi * pj;
                let target = if i == j { pi.clone() } else { ComplexMatrix::zeros(d, d) };
                worst = worst.max(max_abs_diff(&prod, &target));
            }
        }
        worst
    }
}

impl Serialize for ProjectiveMeasurement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let basis: Vec<Vec<[f64; 2]>> = self
            .basis
            .iter()
            .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        let mut s = serializer.serialize_struct("ProjectiveMeasurement", 4)?;
        s.serialize_field("side", &self.side)?;
        s.serialize_field("dim", &self.dim())?;
        s.serialize_field("class", super::MEASUREMENT_CLASS)?;
        s.serialize_field("basis", &basis)?;
        s.end()
    }
}

pub(crate) fn bloch_basis(theta: f64, phi: f64) -> [ComplexVector; 2] {
    let (s, c) = (0.5 * theta).sin_cos();
    let phase = c64(phi.cos(), phi.sin());
    let up = ComplexVector::from_vec(vec![c64(c, 0.0), phase * s]);
    let down = ComplexVector::from_vec(vec![-phase.conj() * s, c64(c, 0.0)]);
    [up, down]
}

/// Product of phased Givens rotations over index pairs `(i, j)`, `i < j`, in
/// lexicographic order. Angles come in `(θ, φ)` pairs per rotation.
pub(crate) fn givens_unitary(dim: usize, params: &[f64]) -> ComplexMatrix {
    let mut u = identity(dim);
    let mut p = params.chunks_exact(2);
    for i in 0..dim {
        for j in (i + 1)..dim {
            let pair = p.next().expect("parameter count checked by caller");
            let (s, c) = pair[0].sin_cos();
            let phase = c64(pair[1].cos(), pair[1].sin());
            // right-multiply by the rotation acting on columns i and j
            for r in 0..dim {
                let ui = u[(r, i)];
                let uj = u[(r, j)];
                u[(r, i)] = ui * c + uj * phase * s;
                u[(r, j)] = -ui * phase.conj() * s + uj * c;
            }
        }
    }
    u
}

/// Outcome of one projector: its probability and the normalized state of
/// the unmeasured subsystems. `conditional_state` is `None` for outcomes
/// below [`DEGENERATE_BRANCH_PROBABILITY`].
#[derive(Debug, Clone)]
pub struct MeasurementBranch {
    pub probability: f64,
    pub conditional_state: Option<DensityOperator>,
}

impl MeasurementBranch {
    pub fn is_degenerate(&self) -> bool {
        self.conditional_state.is_none()
    }
}

/// Precomputed index layout for contracting one measured factor against a
/// basis vector: `M_u = (I ⊗ ⟨u|) ρ (I ⊗ |u⟩)` on the remaining factors.
pub(crate) struct BranchKernel<'a> {
    rho: &'a ComplexMatrix,
    side_stride: usize,
    side_dim: usize,
    rest_offsets: Vec<usize>,
    rest_dims: SubsystemDims,
}

impl<'a> BranchKernel<'a> {
    pub(crate) fn new(state: &'a DensityOperator, side: &str) -> Result<Self> {
        let dims = state.dims();
        let k = dims.index_of(side)?;
        if dims.len() < 2 {
            return Err(Error::InvalidSelection(format!(
                "measuring `{side}` leaves no unmeasured subsystem"
            )));
        }
        let rest = dims.complement(&[k]);
        Ok(Self {
            rho: state.matrix(),
            side_stride: dims.strides()[k],
            side_dim: dims.dims()[k],
            rest_offsets: dims.offsets(&rest),
            rest_dims: dims.select(&rest),
        })
    }

    pub(crate) fn side_dim(&self) -> usize {
        self.side_dim
    }

    pub(crate) fn unnormalized(&self, u: &ComplexVector) -> ComplexMatrix {
        let n = self.rest_offsets.len();
        let s = self.side_stride;
        let mut m = ComplexMatrix::zeros(n, n);
        for (r, &ro) in self.rest_offsets.iter().enumerate() {
            for (c, &co) in self.rest_offsets.iter().enumerate() {
                let mut acc = c64(0.0, 0.0);
                for b in 0..self.side_dim {
                    let ub = u[b].conj();
                    if ub == c64(0.0, 0.0) {
                        continue;
                    }
                    for bp in 0..self.side_dim {
                        acc += ub * self.rho[(ro + b * s, co + bp * s)] * u[bp];
                    }
                }
                m[(r, c)] = acc;
            }
        }
        m
    }

    /// `Σ_i p_i S(ρ_{rest|i})` for the basis `{u_i}`.
    pub(crate) fn average_entropy(&self, basis: &[ComplexVector]) -> f64 {
        basis
            .iter()
            .map(|u| {
                let m = self.unnormalized(u);
                let p = m.trace().re;
                if p < DEGENERATE_BRANCH_PROBABILITY {
                    return 0.0;
                }
                let spectrum: Vec<f64> = hermitian_eigenvalues(&m).into_iter().map(|x| x / p).collect();
                p * entropy_of_spectrum(&spectrum)
            })
            .sum()
    }

    pub(crate) fn branches(&self, m: &ProjectiveMeasurement, tol: f64) -> Result<Vec<MeasurementBranch>> {
        m.basis()
            .iter()
            .map(|u| {
                let unnorm = self.unnormalized(u);
                let p = unnorm.trace().re;
                if p < DEGENERATE_BRANCH_PROBABILITY {
                    return Ok(MeasurementBranch { probability: p.max(0.0), conditional_state: None });
                }
                let cond = hermitian_part(&unnorm).unscale(p);
                let state = DensityOperator::with_tol(cond, self.rest_dims.clone(), tol)?;
                Ok(MeasurementBranch { probability: p, conditional_state: Some(state) })
            })
            .collect()
    }
}
