//! Seeded random states, unitaries and channels, and the Monte Carlo sweep
//! that runs every bound check over them.
//!
//! Every trial draws from its own ChaCha20 stream (`seed`, stream = trial
//! index), so results do not depend on how trials are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{run_process, stinespring_dilation_with_env, KrausChannel};
use crate::correlations::OptimizerConfig;
use crate::error::{Error, Result};
use crate::ledger::{
    build_ledger, check_classical_monotonicity, check_creation_bound, check_erasure_bound, check_generalized_landauer,
    check_mutual_info_compensation_ledger, check_total_entropy_production, BoundCheckResult, EntropyLedger,
};
use crate::qmath::{c64, ComplexMatrix, DensityOperator, SubsystemDims};

/// Which channel each trial applies to the acted-on subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelEnsemble {
    /// Haar-random Stinespring isometry with a Kraus count drawn uniformly
    /// from `1..=kraus_count`.
    Random,
    Identity,
}

/// Which initial state each trial starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateEnsemble {
    /// Hilbert–Schmidt-induced state with rank uniform in `1..=dim_A·dim_B`.
    Random,
    /// `Σ_i p_i ρ_i ⊗ |i⟩⟨i|` with random `ρ_i`.
    QuantumClassical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleConfig {
    pub seed: u64,
    pub dim_a: usize,
    pub dim_b: usize,
    pub env_dim: usize,
    pub kraus_count: usize,
    pub trials: usize,
    pub channel: ChannelEnsemble,
    pub state: StateEnsemble,
}

impl EnsembleConfig {
    pub fn new(seed: u64, dim_a: usize, dim_b: usize, trials: usize) -> Self {
        Self {
            seed,
            dim_a,
            dim_b,
            env_dim: 4,
            kraus_count: 4,
            trials,
            channel: ChannelEnsemble::Random,
            state: StateEnsemble::Random,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim_a < 2 || self.dim_b < 2 || self.env_dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "dimensions must be at least 2 (A {}, B {}, E {})",
                self.dim_a, self.dim_b, self.env_dim
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("at least one trial is required".into()));
        }
        if self.kraus_count == 0 || self.kraus_count > self.env_dim {
            return Err(Error::InvalidParameter(format!(
                "kraus_count {} must lie in 1..={}",
                self.kraus_count, self.env_dim
            )));
        }
        Ok(())
    }
}

/// Independent generator for trial `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    // fill row-major so the draw order does not depend on storage layout
    let entries: Vec<_> = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    ComplexMatrix::from_row_slice(rows, cols, &entries)
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn haar_random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `GG† / Tr(GG†)` for a `dim × rank` Ginibre `G`.
pub fn random_density_matrix<R: Rng + ?Sized>(dims: &SubsystemDims, rank: usize, rng: &mut R) -> Result<DensityOperator> {
    let dim = dims.total();
    if rank == 0 || rank > dim {
        return Err(Error::InvalidParameter(format!("rank {rank} outside 1..={dim}")));
    }
    let g = ginibre(dim, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(crate::qmath::hermitian_part(&m.unscale(tr)), dims.clone())
}

/// Random channel from a Haar isometry `C^dim → C^dim ⊗ C^kraus_count`, cut
/// into `kraus_count` blocks of rows.
pub fn random_kraus_channel<R: Rng + ?Sized>(dim: usize, kraus_count: usize, rng: &mut R) -> Result<KrausChannel> {
    if kraus_count == 0 || dim == 0 {
        return Err(Error::InvalidParameter("dimension and Kraus count must be positive".into()));
    }
    let u = haar_random_unitary(dim * kraus_count, rng);
    let ops = (0..kraus_count)
        .map(|k| u.view((k * dim, 0), (dim, dim)).into_owned())
        .collect();
    KrausChannel::new(ops)
}

/// `Σ_i p_i ρ_i ⊗ |i⟩⟨i|` with Dirichlet(1) weights and random full-rank or
/// pure `ρ_i` on `A`; the classical register `B` uses the computational basis.
pub fn random_quantum_classical_state<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> Result<DensityOperator> {
    let dims = SubsystemDims::from_pairs(&[("A", dim_a), ("B", dim_b)])?;
    let a_dims = SubsystemDims::single("A", dim_a)?;
    let weights: Vec<f64> = (0..dim_b).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = weights.iter().sum();
    let mut m = ComplexMatrix::zeros(dim_a * dim_b, dim_a * dim_b);
    for (i, w) in weights.iter().enumerate() {
        let rank = rng.random_range(1..=dim_a);
        let rho = random_density_matrix(&a_dims, rank, rng)?;
        let mut flag = ComplexMatrix::zeros(dim_b, dim_b);
        flag[(i, i)] = c64(w / total, 0.0);
        m += crate::qmath::tensor_product(rho.matrix(), &flag);
    }
    DensityOperator::new(m, dims)
}

/// Per-trial row of a Monte Carlo sweep.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub rank: usize,
    pub kraus_count: usize,
    pub ledger: Option<EntropyLedger>,
    pub checks: Option<TrialChecks>,
    pub error: Option<String>,
}

/// Every check evaluated on one ledger.
#[derive(Debug, Clone, Serialize)]
pub struct TrialChecks {
    pub erasure: BoundCheckResult,
    pub total_entropy: BoundCheckResult,
    pub generalized_landauer: BoundCheckResult,
    pub mutual_information: Vec<BoundCheckResult>,
    /// Only for zero-discord inputs.
    pub creation: Option<BoundCheckResult>,
    /// Logged, never counted as a violation.
    pub classical_monotonicity: BoundCheckResult,
}

impl TrialChecks {
    pub fn evaluate(ledger: &EntropyLedger) -> Self {
        Self {
            erasure: check_erasure_bound(ledger),
            total_entropy: check_total_entropy_production(ledger),
            generalized_landauer: check_generalized_landauer(ledger),
            mutual_information: check_mutual_info_compensation_ledger(ledger).as_list().into_iter().cloned().collect(),
            creation: check_creation_bound(ledger).ok(),
            classical_monotonicity: check_classical_monotonicity(ledger),
        }
    }

    pub fn violated(&self) -> bool {
        !(self.erasure.satisfied
            && self.total_entropy.satisfied
            && self.generalized_landauer.satisfied
            && self.mutual_information.iter().all(|c| c.satisfied)
            && self.creation.as_ref().is_none_or(|c| c.satisfied))
    }
}

/// Aggregate over one check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckStats {
    pub evaluated: usize,
    pub violations: usize,
    pub min_margin: f64,
}

impl Default for CheckStats {
    fn default() -> Self {
        Self { evaluated: 0, violations: 0, min_margin: f64::INFINITY }
    }
}

impl CheckStats {
    fn record(&mut self, checks: &[&BoundCheckResult]) {
        self.evaluated += 1;
        if checks.iter().any(|c| !c.satisfied) {
            self.violations += 1;
        }
        for c in checks {
            self.min_margin = self.min_margin.min(c.margin);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub seed: u64,
    pub trials: usize,
    pub failed_trials: usize,
    pub optimizer_slack: f64,
    pub erasure: CheckStats,
    pub total_entropy: CheckStats,
    pub generalized_landauer: CheckStats,
    pub mutual_information: CheckStats,
    pub creation: CheckStats,
    /// Trials where the projective-measurement classical correlation grew;
    /// not a bound violation.
    pub measurement_class_artifacts: usize,
    /// Trials whose memory had negative conditional entropy `S(B|A)`.
    pub entangled_memory_trials: usize,
}

impl MonteCarloSummary {
    pub fn total_violations(&self) -> usize {
        self.erasure.violations
            + self.total_entropy.violations
            + self.generalized_landauer.violations
            + self.mutual_information.violations
            + self.creation.violations
    }
}

#[derive(Debug, Clone)]
pub struct MonteCarloRun {
    pub config: EnsembleConfig,
    pub records: Vec<TrialRecord>,
    pub summary: MonteCarloSummary,
}

impl MonteCarloRun {
    /// Corrupts trial `trial`'s ledger so that the erasure bound fails, then
    /// re-evaluates. Used to exercise violation reporting end to end.
    pub fn inject_violation(&mut self, trial: usize) -> Result<()> {
        let record = self
            .records
            .get_mut(trial)
            .ok_or_else(|| Error::InvalidParameter(format!("no trial {trial}")))?;
        let ledger = record
            .ledger
            .as_mut()
            .ok_or_else(|| Error::InvalidParameter(format!("trial {trial} has no ledger")))?;
        let bump = ledger.delta_s_t.abs() + 1.0;
        ledger.d_before += bump;
        ledger.delta_d += bump;
        record.checks = Some(TrialChecks::evaluate(ledger));
        self.summary = summarize(&self.config, &self.records, self.summary.optimizer_slack);
        Ok(())
    }
}

fn run_trial(cfg: &EnsembleConfig, opt: &OptimizerConfig, trial: usize) -> TrialRecord {
    let mut rng = trial_rng(cfg.seed, trial as u64);
    let mut record = TrialRecord { trial, rank: 0, kraus_count: 0, ledger: None, checks: None, error: None };
    let result = (|| -> Result<(EntropyLedger, TrialChecks)> {
        let dims = SubsystemDims::from_pairs(&[("A", cfg.dim_a), ("B", cfg.dim_b)])?;
        let state = match cfg.state {
            StateEnsemble::Random => {
                record.rank = rng.random_range(1..=dims.total());
                random_density_matrix(&dims, record.rank, &mut rng)?
            }
            StateEnsemble::QuantumClassical => {
                let s = random_quantum_classical_state(cfg.dim_a, cfg.dim_b, &mut rng)?;
                record.rank = s.eigenvalues().iter().filter(|&&x| x > 1e-12).count();
                s
            }
        };
        let channel = match cfg.channel {
            ChannelEnsemble::Random => {
                record.kraus_count = rng.random_range(1..=cfg.kraus_count);
                random_kraus_channel(cfg.dim_b, record.kraus_count, &mut rng)?
            }
            ChannelEnsemble::Identity => {
                record.kraus_count = 1;
                KrausChannel::identity(cfg.dim_b)
            }
        };
        let dilation = stinespring_dilation_with_env(&channel, cfg.env_dim)?;
        let outcome = run_process(&state, &dilation)?;
        let ledger = build_ledger(&outcome, "B", opt)?;
        let checks = TrialChecks::evaluate(&ledger);
        Ok((ledger, checks))
    })();
    match result {
        Ok((ledger, checks)) => {
            record.ledger = Some(ledger);
            record.checks = Some(checks);
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

fn summarize(cfg: &EnsembleConfig, records: &[TrialRecord], slack: f64) -> MonteCarloSummary {
    let mut s = MonteCarloSummary {
        seed: cfg.seed,
        trials: records.len(),
        failed_trials: 0,
        optimizer_slack: slack,
        erasure: CheckStats::default(),
        total_entropy: CheckStats::default(),
        generalized_landauer: CheckStats::default(),
        mutual_information: CheckStats::default(),
        creation: CheckStats::default(),
        measurement_class_artifacts: 0,
        entangled_memory_trials: 0,
    };
    for r in records {
        let (Some(ledger), Some(c)) = (&r.ledger, &r.checks) else {
            s.failed_trials += 1;
            continue;
        };
        s.erasure.record(&[&c.erasure]);
        s.total_entropy.record(&[&c.total_entropy]);
        s.generalized_landauer.record(&[&c.generalized_landauer]);
        s.mutual_information.record(&c.mutual_information.iter().collect::<Vec<_>>());
        if let Some(cr) = &c.creation {
            s.creation.record(&[cr]);
        }
        if !c.classical_monotonicity.satisfied {
            s.measurement_class_artifacts += 1;
        }
        if ledger.conditional_s_b_given_a < -1e-9 {
            s.entangled_memory_trials += 1;
        }
    }
    s
}

/// Runs `cfg.trials` independent trials: sample a state and a channel on
/// `B`, dilate, run, build the ledger with `opt`, evaluate every check.
/// Failures inside a trial are recorded on its row.
pub fn monte_carlo_verify(cfg: &EnsembleConfig, opt: &OptimizerConfig) -> Result<MonteCarloRun> {
    cfg.validate()?;
    opt.validate()?;
    if !(2..=4).contains(&cfg.dim_b) {
        return Err(Error::UnsupportedDimension(cfg.dim_b));
    }
    let records: Vec<TrialRecord> = (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, opt, t)).collect();
    let summary = summarize(cfg, &records, opt.slack());
    Ok(MonteCarloRun { config: *cfg, records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{identity, max_abs_diff, unitarity_error};

    #[test]
    fn haar_unitary_dim_one_is_a_phase() {
        let mut rng = trial_rng(1, 0);
        let u = haar_random_unitary(1, &mut rng);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn haar_unitary_is_unitary_and_reproducible() {
        for d in [2, 3, 5, 8] {
            let u = haar_random_unitary(d, &mut trial_rng(42, d as u64));
            assert!(unitarity_error(&u) < 1e-10);
            let v = haar_random_unitary(d, &mut trial_rng(42, d as u64));
            assert_eq!(u, v);
        }
    }

    #[test]
    fn streams_are_independent() {
        let a = haar_random_unitary(2, &mut trial_rng(3, 0));
        let b = haar_random_unitary(2, &mut trial_rng(3, 1));
        assert!(max_abs_diff(&a, &b) > 1e-3);
    }

    #[test]
    fn rank_one_density_is_pure() {
        let dims = SubsystemDims::from_pairs(&[("A", 2), ("B", 2)]).unwrap();
        let rho = random_density_matrix(&dims, 1, &mut trial_rng(5, 0)).unwrap();
        assert!(rho.entropy() <= 1e-9);
        assert!(random_density_matrix(&dims, 0, &mut trial_rng(5, 0)).is_err());
        assert!(random_density_matrix(&dims, 5, &mut trial_rng(5, 0)).is_err());
    }

    #[test]
    fn single_kraus_channel_is_unitary() {
        let ch = random_kraus_channel(3, 1, &mut trial_rng(9, 0)).unwrap();
        assert!(unitarity_error(&ch.kraus_ops()[0]) < 1e-10);
        let ch = random_kraus_channel(2, 4, &mut trial_rng(9, 1)).unwrap();
        assert!(ch.completeness_error() < 1e-10);
        let out = ch.apply_operator(&identity(2).unscale(2.0));
        DensityOperator::single(out, "B").unwrap();
    }

    #[test]
    fn quantum_classical_sampler_is_block_diagonal_in_b() {
        let s = random_quantum_classical_state(2, 2, &mut trial_rng(11, 0)).unwrap();
        let m = s.matrix();
        // off-diagonal blocks in the B index vanish
        for a in 0..2 {
            for ap in 0..2 {
                assert_eq!(m[(a * 2, ap * 2 + 1)], c64(0.0, 0.0));
            }
        }
    }

    #[test]
    fn config_validation() {
        let mut c = EnsembleConfig::new(0, 2, 2, 1);
        assert!(c.validate().is_ok());
        c.kraus_count = 5;
        assert!(c.validate().is_err());
        c = EnsembleConfig::new(0, 1, 2, 1);
        assert!(c.validate().is_err());
        c = EnsembleConfig::new(0, 2, 2, 0);
        assert!(c.validate().is_err());
    }
}
