//! Entropy accounting for a local process and the inequalities it must obey.
//!
//! Entropies are in bits. Energies derived from them carry a factor
//! `k·T·ln 2`. Inequality checks that involve discord budget
//! `2·optimizer_slack + 1e-9`, since a change in discord subtracts two
//! numerically minimized quantities; pure entropy identities use `1e-9`.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::channels::{run_process, ProcessOutcome, UnitaryDilation};
use crate::correlations::{discord, OptimizerConfig};
use crate::error::{Error, Result};
use crate::qmath::{max_abs_diff, partial_trace, von_neumann_entropy, ComplexMatrix, DensityOperator};

/// Tolerance for identities between exactly computed entropies.
pub const ENTROPY_TOL: f64 = 1e-9;

/// Before/after entropies and correlations of one local process.
///
/// `B` below is the subsystem the process acts on and `A` the other
/// (memory) subsystem; discord is measured on `measured_side`.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyLedger {
    pub acted_on: String,
    pub memory: String,
    pub measured_side: String,
    pub s_ab_before: f64,
    pub s_ab_after: f64,
    pub s_e_before: f64,
    pub s_e_after: f64,
    pub delta_s_t: f64,
    pub d_before: f64,
    pub d_after: f64,
    pub delta_d: f64,
    pub j_before: f64,
    pub j_after: f64,
    pub delta_j: f64,
    pub i_before: f64,
    pub i_after: f64,
    pub delta_i: f64,
    pub s_a: f64,
    pub s_b_before: f64,
    pub s_b_after: f64,
    /// `S(B|A) = S(ρ_AB) − S(ρ_A)` before the process; negative for
    /// entangled memories.
    pub conditional_s_b_given_a: f64,
    /// Mutual information across the system|environment cut after the process.
    pub i_se_after: f64,
    pub optimizer_slack: f64,
}

impl EntropyLedger {
    /// `2·slack + 1e-9`
    pub fn tolerance(&self) -> f64 {
        2.0 * self.optimizer_slack + ENTROPY_TOL
    }

    pub fn delta_s_b(&self) -> f64 {
        self.s_b_after - self.s_b_before
    }

    pub fn delta_s_e(&self) -> f64 {
        self.s_e_after - self.s_e_before
    }
}

/// One inequality `lhs ≤ rhs` evaluated with an explicit tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheckResult {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub satisfied: bool,
    /// `rhs − lhs`
    pub margin: f64,
}

impl BoundCheckResult {
    pub fn new(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            tolerance,
            satisfied: lhs <= rhs + tolerance,
            margin: rhs - lhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// J/K
    pub boltzmann_k: f64,
    /// K
    pub temperature: f64,
}

impl PhysicalConstants {
    /// CODATA value of the Boltzmann constant, exact in SI.
    pub const BOLTZMANN: f64 = 1.380_649e-23;

    pub fn new(boltzmann_k: f64, temperature: f64) -> Result<Self> {
        if !(boltzmann_k > 0.0 && boltzmann_k.is_finite()) || !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "physical constants must be positive (k = {boltzmann_k}, T = {temperature})"
            )));
        }
        Ok(Self { boltzmann_k, temperature })
    }

    pub fn at_temperature(temperature: f64) -> Result<Self> {
        Self::new(Self::BOLTZMANN, temperature)
    }

    /// Energy per bit of entropy: `k·T·ln 2`.
    pub fn kt_ln2(&self) -> f64 {
        self.boltzmann_k * self.temperature * LN_2
    }
}

/// Assembles the ledger of `outcome`, measuring discord on `side` with the
/// same optimizer settings before and after.
pub fn build_ledger(outcome: &ProcessOutcome, side: &str, cfg: &OptimizerConfig) -> Result<EntropyLedger> {
    let labels = outcome.system_labels();
    if labels.len() != 2 {
        return Err(Error::InvalidSelection(format!("bipartite system required, got {labels:?}")));
    }
    let acted_on = outcome.acts_on.as_str();
    let memory = *labels.iter().find(|&&l| l != acted_on).expect("acted-on label is one of two");

    let before = discord(&outcome.system_before, side, cfg)?;
    let after = discord(&outcome.system_after, side, cfg)?;

    let s_ab_before = von_neumann_entropy(&outcome.system_before);
    let s_ab_after = von_neumann_entropy(&outcome.system_after);
    let s_e_before = von_neumann_entropy(&outcome.env_before);
    let s_e_after = von_neumann_entropy(&outcome.env_after);
    let s_a = von_neumann_entropy(&partial_trace(&outcome.system_before, &[memory])?);
    let s_b_before = von_neumann_entropy(&partial_trace(&outcome.system_before, &[acted_on])?);
    let s_b_after = von_neumann_entropy(&partial_trace(&outcome.system_after, &[acted_on])?);
    let s_global_after = von_neumann_entropy(&outcome.state_after);

    let delta_s_t = (s_ab_after + s_e_after) - (s_ab_before + s_e_before);
    Ok(EntropyLedger {
        acted_on: acted_on.to_string(),
        memory: memory.to_string(),
        measured_side: before.measured_side.clone(),
        s_ab_before,
        s_ab_after,
        s_e_before,
        s_e_after,
        delta_s_t,
        d_before: before.discord,
        d_after: after.discord,
        delta_d: before.discord - after.discord,
        j_before: before.classical_correlation,
        j_after: after.classical_correlation,
        delta_j: before.classical_correlation - after.classical_correlation,
        i_before: before.mutual_information,
        i_after: after.mutual_information,
        delta_i: before.mutual_information - after.mutual_information,
        s_a,
        s_b_before,
        s_b_after,
        conditional_s_b_given_a: s_ab_before - s_a,
        i_se_after: s_ab_after + s_e_after - s_global_after,
        optimizer_slack: cfg.slack(),
    })
}

/// `ΔD ≤ ΔS_T`
pub fn check_erasure_bound(ledger: &EntropyLedger) -> BoundCheckResult {
    BoundCheckResult::new("erasure_bound", ledger.delta_d, ledger.delta_s_t, ledger.tolerance())
}

/// `ΔS_T ≥ 0`
pub fn check_total_entropy_production(ledger: &EntropyLedger) -> BoundCheckResult {
    BoundCheckResult::new("total_entropy_production", 0.0, ledger.delta_s_t, ENTROPY_TOL)
}

/// `D_after ≥ −ΔS_T`, stated for inputs without discord; errors when
/// `D_before` exceeds the optimizer slack.
pub fn check_creation_bound(ledger: &EntropyLedger) -> Result<BoundCheckResult> {
    if ledger.d_before > ledger.optimizer_slack {
        return Err(Error::InvalidParameter(format!(
            "creation bound requires a zero-discord input, D_before = {:e} exceeds slack {:e}",
            ledger.d_before, ledger.optimizer_slack
        )));
    }
    Ok(BoundCheckResult::new("creation_bound", -ledger.delta_s_t, ledger.d_after, ledger.tolerance()))
}

/// `ΔD + S(B|A) − S(ρ_B) ≤ ΔS_B + ΔS_E`
pub fn check_generalized_landauer(ledger: &EntropyLedger) -> BoundCheckResult {
    BoundCheckResult::new(
        "generalized_landauer",
        ledger.delta_d + ledger.conditional_s_b_given_a - ledger.s_b_before,
        ledger.delta_s_b() + ledger.delta_s_e(),
        ledger.tolerance(),
    )
}

/// `ΔJ ≥ 0`. Over rank-1 projective measurements this is not a theorem;
/// failures are reported as measurement-class artifacts, never as bound
/// violations.
pub fn check_classical_monotonicity(ledger: &EntropyLedger) -> BoundCheckResult {
    BoundCheckResult::new("classical_correlation_monotonicity", 0.0, ledger.delta_j, ledger.tolerance())
}

/// Mutual-information bookkeeping across the `A|B` and `AB|E` cuts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompensationCheck {
    /// `ΔI_{A|B} ≤ I(ρ_SE')`
    pub compensation: BoundCheckResult,
    /// `ΔI_{A|B} ≥ 0`
    pub non_increase: BoundCheckResult,
    /// `|I(ρ_SE') − ΔS_T| ≤ 1e-9`
    pub identity: BoundCheckResult,
}

impl CompensationCheck {
    pub fn satisfied(&self) -> bool {
        self.compensation.satisfied && self.non_increase.satisfied && self.identity.satisfied
    }

    pub fn min_margin(&self) -> f64 {
        self.compensation.margin.min(self.non_increase.margin).min(self.identity.margin)
    }

    pub fn as_list(&self) -> [&BoundCheckResult; 3] {
        [&self.compensation, &self.non_increase, &self.identity]
    }
}

pub(crate) fn compensation_from_parts(delta_i_ab: f64, i_se_after: f64, delta_s_t: f64) -> CompensationCheck {
    CompensationCheck {
        compensation: BoundCheckResult::new("mutual_info_compensation", delta_i_ab, i_se_after, ENTROPY_TOL),
        non_increase: BoundCheckResult::new("mutual_info_non_increase", 0.0, delta_i_ab, ENTROPY_TOL),
        identity: BoundCheckResult::new("mutual_info_equals_entropy_production", (i_se_after - delta_s_t).abs(), 0.0, ENTROPY_TOL),
    }
}

/// Same checks from the ledger's stored fields.
pub fn check_mutual_info_compensation_ledger(ledger: &EntropyLedger) -> CompensationCheck {
    compensation_from_parts(ledger.delta_i, ledger.i_se_after, ledger.delta_s_t)
}

/// `ΔI_{A|B} ≤ ΔI_{AB|E} = I(ρ_SE')`, evaluated directly from the states of
/// a process (no optimization involved).
pub fn check_mutual_info_compensation(outcome: &ProcessOutcome) -> Result<CompensationCheck> {
    let labels = outcome.system_labels();
    if labels.len() != 2 {
        return Err(Error::InvalidSelection(format!("bipartite system required, got {labels:?}")));
    }
    let mi = |st: &DensityOperator| -> Result<f64> {
        crate::correlations::quantum_mutual_information(st, (&[labels[0]], &[labels[1]]))
    };
    let delta_i = mi(&outcome.system_before)? - mi(&outcome.system_after)?;
    let s_ab_after = von_neumann_entropy(&outcome.system_after);
    let s_e_after = von_neumann_entropy(&outcome.env_after);
    let i_se_after = s_ab_after + s_e_after - von_neumann_entropy(&outcome.state_after);
    let delta_s_t = s_ab_after + s_e_after
        - von_neumann_entropy(&outcome.system_before)
        - von_neumann_entropy(&outcome.env_before);
    Ok(compensation_from_parts(delta_i, i_se_after, delta_s_t))
}

/// Entropic work cost `W = kT ln2 ΔS_T` and its floor `W_min = kT ln2 ΔD`, in joules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErasureWork {
    pub work: f64,
    pub work_min: f64,
}

pub fn erasure_work(ledger: &EntropyLedger, consts: &PhysicalConstants) -> Result<ErasureWork> {
    let c = PhysicalConstants::new(consts.boltzmann_k, consts.temperature)?.kt_ln2();
    Ok(ErasureWork { work: c * ledger.delta_s_t, work_min: c * ledger.delta_d })
}

/// Landauer erasure of an uncorrelated system against a thermal bath.
///
/// `landauer` compares the entropy removed from the system, `S(ρ_B) −
/// S(ρ_B')`, with the heat dumped into the bath in bits, `β ΔE / ln 2`.
/// When the final system state is pure this is `ΔE ≥ kT ln2 S(ρ_B)`.
#[derive(Debug, Clone, Serialize)]
pub struct LandauerCheck {
    /// Bath energy change in the Hamiltonian's units.
    pub delta_e_bath: f64,
    /// `β ΔE / ln 2`
    pub heat_bits: f64,
    pub s_b_before: f64,
    pub s_b_after: f64,
    pub delta_s_e: f64,
    /// `kT ln2 S(ρ_B)` in the Hamiltonian's units; absent at β = 0.
    pub landauer_energy: Option<f64>,
    /// Final system state is pure within `1e-9` (ideal reset).
    pub ideal_erasure: bool,
    pub landauer: BoundCheckResult,
    /// `ΔS_B + ΔS_E ≥ 0`
    pub entropy_balance: BoundCheckResult,
    /// `|ΔE_B + ΔE_E| ≤ 1e-9`; `None` when no system Hamiltonian is given.
    pub energy_conservation: Option<BoundCheckResult>,
}

impl LandauerCheck {
    pub fn checks(&self) -> Vec<&BoundCheckResult> {
        let mut out = vec![&self.landauer, &self.entropy_balance];
        out.extend(self.energy_conservation.as_ref());
        out
    }
}

pub fn check_landauer_uncorrelated(
    state_b: &DensityOperator,
    bath_h: &ComplexMatrix,
    beta: f64,
    dilation: &UnitaryDilation,
    system_h: Option<&ComplexMatrix>,
) -> Result<LandauerCheck> {
    let thermal = crate::channels::thermal_state(bath_h, beta, dilation.env_label())?;
    let dev = max_abs_diff(thermal.matrix(), dilation.env_state().matrix());
    if thermal.dim() != dilation.env_dim() || dev > ENTROPY_TOL {
        return Err(Error::InvalidParameter(format!(
            "bath state is not thermal for the given Hamiltonian and β (deviation {dev:e})"
        )));
    }
    let outcome = run_process(state_b, dilation)?;
    let (b_before, b_after) = if state_b.dims().len() == 1 {
        (outcome.system_before.clone(), outcome.system_after.clone())
    } else {
        (
            partial_trace(&outcome.system_before, &[dilation.acts_on()])?,
            partial_trace(&outcome.system_after, &[dilation.acts_on()])?,
        )
    };
    let energy = |st: &DensityOperator, h: &ComplexMatrix| -> Result<f64> { Ok(st.expectation(h)?.re) };
    let delta_e_bath = energy(&outcome.env_after, bath_h)? - energy(&outcome.env_before, bath_h)?;
    let s_b_before = von_neumann_entropy(&b_before);
    let s_b_after = von_neumann_entropy(&b_after);
    let delta_s_e = von_neumann_entropy(&outcome.env_after) - von_neumann_entropy(&outcome.env_before);
    let heat_bits = beta * delta_e_bath / LN_2;
    let energy_conservation = match system_h {
        Some(h) => {
            let delta_e_b = energy(&b_after, h)? - energy(&b_before, h)?;
            Some(BoundCheckResult::new("energy_conservation", (delta_e_b + delta_e_bath).abs(), 0.0, ENTROPY_TOL))
        }
        None => None,
    };
    Ok(LandauerCheck {
        delta_e_bath,
        heat_bits,
        s_b_before,
        s_b_after,
        delta_s_e,
        landauer_energy: (beta > 0.0).then(|| s_b_before * LN_2 / beta),
        ideal_erasure: s_b_after <= ENTROPY_TOL,
        landauer: BoundCheckResult::new("landauer", s_b_before - s_b_after, heat_bits, ENTROPY_TOL),
        entropy_balance: BoundCheckResult::new("entropy_balance", 0.0, (s_b_after - s_b_before) + delta_s_e, ENTROPY_TOL),
        energy_conservation,
    })
}
