//! Bipartite correlation measures: quantum mutual information, classical
//! correlation, and discord with respect to a measured side.
//!
//! All quantities are in bits. Classical correlation and discord minimize
//! over rank-1 projective measurements on the measured side (supported
//! dimensions 2, 3, 4); the returned minimum is an upper bound on the true
//! infimum, so discord values are upper bounds within
//! [`OptimizerConfig::slack`].

mod measurement;
mod optimizer;

pub use measurement::{MeasurementBranch, ProjectiveMeasurement, DEGENERATE_BRANCH_PROBABILITY};
pub use optimizer::OptimizerConfig;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmath::{partial_trace, von_neumann_entropy, DensityOperator};
use measurement::BranchKernel;

/// Tag recorded in every report: the measurement family minimized over.
pub const MEASUREMENT_CLASS: &str = "rank1-projective";

/// Correlation quantities of one bipartite state for one measured side.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub measured_side: String,
    pub unmeasured_side: String,
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub discord: f64,
    /// `S(unmeasured | measured)`, may be negative.
    pub conditional_entropy: f64,
    pub measured_conditional_entropy: f64,
    pub optimal_measurement: ProjectiveMeasurement,
    pub optimizer_slack: f64,
    pub measurement_class: &'static str,
}

/// Returns `(measured, unmeasured)` labels of a bipartite state.
fn bipartition<'a>(state: &'a DensityOperator, side: &str) -> Result<(&'a str, &'a str)> {
    let labels = state.dims().labels();
    if labels.len() != 2 {
        return Err(Error::InvalidSelection(format!(
            "bipartite state required, got subsystems {labels:?}"
        )));
    }
    let k = state.dims().index_of(side)?;
    Ok((&labels[k], &labels[1 - k]))
}

fn entropy_of(state: &DensityOperator, labels: &[&str]) -> Result<f64> {
    if labels.len() == state.dims().len() {
        Ok(von_neumann_entropy(state))
    } else {
        Ok(von_neumann_entropy(&partial_trace(state, labels)?))
    }
}

/// `I(X:Y) = S(X) + S(Y) − S(XY)` for a cut that partitions the state's labels.
pub fn quantum_mutual_information(state: &DensityOperator, cut: (&[&str], &[&str])) -> Result<f64> {
    let (x, y) = cut;
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidSelection("both sides of the cut must be non-empty".into()));
    }
    let dims = state.dims();
    let mut all: Vec<&str> = x.iter().chain(y.iter()).copied().collect();
    for l in &all {
        dims.index_of(l)?;
    }
    all.sort_unstable();
    all.dedup();
    if all.len() != x.len() + y.len() {
        return Err(Error::InvalidSelection("cut sides overlap".into()));
    }
    if all.len() != dims.len() {
        return Err(Error::InvalidSelection(format!(
            "cut {x:?} | {y:?} does not cover subsystems {:?}",
            dims.labels()
        )));
    }
    Ok(entropy_of(state, x)? + entropy_of(state, y)? - von_neumann_entropy(state))
}

/// `S(other | given) = S(ρ) − S(ρ_given)` for a bipartite state.
pub fn conditional_entropy(state: &DensityOperator, given: &str) -> Result<f64> {
    let (given, _) = bipartition(state, given)?;
    Ok(von_neumann_entropy(state) - entropy_of(state, &[given])?)
}

/// Outcome probabilities and conditional states of the unmeasured
/// subsystems for measurement `m`.
pub fn measure_branches(state: &DensityOperator, m: &ProjectiveMeasurement) -> Result<Vec<MeasurementBranch>> {
    let kernel = BranchKernel::new(state, m.side())?;
    if kernel.side_dim() != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "measurement of dimension {} on subsystem `{}` of dimension {}",
            m.dim(),
            m.side(),
            kernel.side_dim()
        )));
    }
    kernel.branches(m, state.tol())
}

/// `Σ_i p_i S(ρ_{rest|i})` for a fixed measurement.
pub fn average_conditional_entropy(state: &DensityOperator, m: &ProjectiveMeasurement) -> Result<f64> {
    let kernel = BranchKernel::new(state, m.side())?;
    if kernel.side_dim() != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "measurement of dimension {} on subsystem of dimension {}",
            m.dim(),
            kernel.side_dim()
        )));
    }
    Ok(kernel.average_entropy(m.basis()))
}

/// Minimum over rank-1 projective measurements on `side` of the average
/// post-measurement entropy of the other subsystem, with its argmin.
pub fn measured_conditional_entropy(
    state: &DensityOperator,
    side: &str,
    cfg: &OptimizerConfig,
) -> Result<(f64, ProjectiveMeasurement)> {
    let (side, _) = bipartition(state, side)?;
    let kernel = BranchKernel::new(state, side)?;
    let min = optimizer::minimize_average_entropy(&kernel, side, cfg)?;
    Ok((min.value, min.measurement))
}

/// `J_side = S(ρ_other) − min Σ p_i S(ρ_{other|i})`
pub fn classical_correlation(state: &DensityOperator, side: &str, cfg: &OptimizerConfig) -> Result<f64> {
    let (side, other) = bipartition(state, side)?;
    let (mce, _) = measured_conditional_entropy(state, side, cfg)?;
    Ok(entropy_of(state, &[other])? - mce)
}

/// Full correlation report with discord `D = I − J` for measurements on `side`.
pub fn discord(state: &DensityOperator, side: &str, cfg: &OptimizerConfig) -> Result<CorrelationReport> {
    let (measured, unmeasured) = bipartition(state, side)?;
    let s_joint = von_neumann_entropy(state);
    let s_measured = entropy_of(state, &[measured])?;
    let s_unmeasured = entropy_of(state, &[unmeasured])?;
    let (mce, argmin) = measured_conditional_entropy(state, measured, cfg)?;
    let mutual_information = s_measured + s_unmeasured - s_joint;
    let classical_correlation = s_unmeasured - mce;
    Ok(CorrelationReport {
        measured_side: measured.to_string(),
        unmeasured_side: unmeasured.to_string(),
        mutual_information,
        classical_correlation,
        discord: mutual_information - classical_correlation,
        conditional_entropy: s_joint - s_measured,
        measured_conditional_entropy: mce,
        optimal_measurement: argmin,
        optimizer_slack: cfg.slack(),
        measurement_class: MEASUREMENT_CLASS,
    })
}

/// Discord for both measured sides of a bipartite state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymmetricDiscord {
    /// Measuring the second subsystem.
    pub d_b: f64,
    /// Measuring the first subsystem.
    pub d_a: f64,
}

/// `(D_B, D_A)`: discord measuring the second, then the first subsystem,
/// with the same optimizer settings.
pub fn discord_asymmetric_check(state: &DensityOperator, cfg: &OptimizerConfig) -> Result<AsymmetricDiscord> {
    let labels = state.dims().labels().to_vec();
    if labels.len() != 2 {
        return Err(Error::InvalidSelection(format!("bipartite state required, got {labels:?}")));
    }
    let d_b = discord(state, &labels[1], cfg)?.discord;
    let d_a = discord(state, &labels[0], cfg)?.discord;
    Ok(AsymmetricDiscord { d_b, d_a })
}
