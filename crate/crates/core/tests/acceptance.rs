//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qerase::channels::{
    bleaching_dilation, channel_deviation, dephasing_measurement_channel, run_process, stinespring_dilation,
    stinespring_dilation_with_env, thermalizing_channel, thermalizing_dilation, ProcessOutcome,
};
use qerase::correlations::{discord, OptimizerConfig};
use qerase::ensembles::{
    haar_random_unitary, monte_carlo_verify, random_density_matrix, random_kraus_channel, trial_rng, EnsembleConfig,
    MonteCarloSummary, StateEnsemble,
};
use qerase::io::read_state;
use qerase::ledger::{
    build_ledger, check_creation_bound, check_erasure_bound, check_generalized_landauer, EntropyLedger,
};
use qerase::qmath::{
    c64, hermiticity_error, identity, ket, partial_trace, trace, trace_distance, ComplexMatrix, DensityOperator,
    PureStateVector, SubsystemDims,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fixture(name: &str) -> DensityOperator {
    read_state(&common::fixture(name)).expect("fixture loads")
}

fn ab() -> SubsystemDims {
    SubsystemDims::from_pairs(&[("A", 2), ("B", 2)]).unwrap()
}

fn ledger_of(outcome: &ProcessOutcome) -> EntropyLedger {
    build_ledger(outcome, "B", &OptimizerConfig::default()).expect("ledger builds")
}

fn qubit_diag(p: [f64; 2]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 0)] = c64(p[0], 0.0);
    m[(1, 1)] = c64(p[1], 0.0);
    m
}

fn random_qubit(seed: u64, t: u64) -> DensityOperator {
    let dims = SubsystemDims::single("B", 2).unwrap();
    random_density_matrix(&dims, 1 + (t % 2) as usize, &mut trial_rng(seed, t)).unwrap()
}

fn criterion_1() -> Outcome {
    let cfg = OptimizerConfig::default();
    let mut parts = Vec::new();
    let mut ok = cfg.grid_resolution >= 64 && cfg.random_restarts >= 8;
    for (name, check) in [
        ("bell.json", Box::new(|d: f64| (d - 1.0).abs() <= 1e-5) as Box<dyn Fn(f64) -> bool>),
        ("product.json", Box::new(|d: f64| d <= 1e-6)),
        ("quantum_classical.json", Box::new(|d: f64| d <= 1e-6)),
    ] {
        let state = fixture(name);
        let start = Instant::now();
        let d = discord(&state, "B", &cfg).map(|r| r.discord).unwrap_or(f64::NAN);
        let took = start.elapsed();
        ok &= check(d) && took < Duration::from_secs(1);
        parts.push(format!("{name} D_B={d:.9} in {took:.2?}"));
    }
    ensure(ok, parts.join(", "))
}

fn criterion_2() -> Outcome {
    let cfg = OptimizerConfig::default();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for t in 0..50 {
        let u = haar_random_unitary(4, &mut trial_rng(0xacc2, t));
        let psi = PureStateVector::new(u.column(0).into_owned(), ab()).unwrap();
        let rho = psi.density().unwrap();
        let s_a = common::entropy(partial_trace(&rho, &["A"]).unwrap().matrix());
        let d = discord(&rho, "B", &cfg).unwrap().discord;
        worst = worst.max((d - s_a).abs());
    }
    let took = start.elapsed();
    ensure(worst <= 2e-5 && took < Duration::from_secs(30), format!("max |D_B - S_A| = {worst:.2e} over 50 states in {took:.2?}"))
}

struct Campaign {
    summary: MonteCarloSummary,
    took: Duration,
}

fn campaign() -> Campaign {
    let cfg = EnsembleConfig::new(20_240_601, 2, 2, 1000);
    let start = Instant::now();
    let run = monte_carlo_verify(&cfg, &OptimizerConfig::default()).expect("campaign runs");
    Campaign { summary: run.summary, took: start.elapsed() }
}

fn criterion_3(c: &Campaign) -> Outcome {
    let s = &c.summary;
    ensure(
        s.trials == 1000
            && s.failed_trials == 0
            && s.erasure.evaluated == 1000
            && s.erasure.violations == 0
            && s.total_entropy.violations == 0
            && c.took < Duration::from_secs(300),
        format!(
            "{} trials, erasure violations {} (min margin {:.2e}), total entropy violations {} (min margin {:.2e}), {:.2?}",
            s.trials, s.erasure.violations, s.erasure.min_margin, s.total_entropy.violations, s.total_entropy.min_margin, c.took
        ),
    )
}

fn criterion_4() -> Outcome {
    let p = [1.0, 0.0];
    let dil = bleaching_dilation(&p, &[ket(2, 0), ket(2, 1)]).unwrap();
    let bell = fixture("bell.json");
    let outcome = run_process(&bell, &dil).unwrap();
    let l = ledger_of(&outcome);
    let erasure = check_erasure_bound(&l);
    let outputs: Vec<DensityOperator> = (0..5)
        .map(|t| DensityOperator::single(dil.apply_operator(random_qubit(0xb1ea, t).matrix()), "B").unwrap())
        .collect();
    let mut spread = 0.0f64;
    for a in &outputs {
        for b in &outputs {
            spread = spread.max(trace_distance(a, b).unwrap());
        }
    }
    ensure(
        (l.delta_d - l.s_b_before).abs() <= 2e-5 && (l.s_b_before - 1.0).abs() <= 2e-5 && erasure.margin >= 0.0 && spread <= 1e-10,
        format!(
            "ΔD={:.9} S(B)={:.9} erasure margin {:.3e}, max output trace distance {spread:.1e}",
            l.delta_d, l.s_b_before, erasure.margin
        ),
    )
}

fn criterion_5() -> Outcome {
    let h = qubit_diag([0.0, 1.0]);
    let beta = std::f64::consts::LN_2;
    let gibbs = DensityOperator::single(qubit_diag([2.0 / 3.0, 1.0 / 3.0]), "B").unwrap();
    let ch = thermalizing_channel(&h, beta, &identity(2)).unwrap();
    let mut worst = 0.0f64;
    for t in 0..10 {
        let out = DensityOperator::single(ch.apply_operator(random_qubit(0x7e, t).matrix()), "B").unwrap();
        worst = worst.max(trace_distance(&out, &gibbs).unwrap());
    }
    let dil = thermalizing_dilation(&h, beta, &identity(2)).unwrap();
    let dev = channel_deviation(&ch, &dil).unwrap();
    let bell = fixture("bell.json");
    let l = ledger_of(&run_process(&bell, &dil).unwrap());
    let cost_ok = l.s_b_before <= l.delta_s_t + l.tolerance();
    ensure(
        worst <= 1e-10 && dev <= 1e-9 && cost_ok,
        format!(
            "output distance to diag(2/3,1/3) {worst:.1e}, dilation deviation {dev:.1e}, S(B)={:.6} ≤ ΔS_T={:.6}",
            l.s_b_before, l.delta_s_t
        ),
    )
}

fn criterion_6(c: &Campaign) -> Outcome {
    let s = &c.summary;
    let bell = fixture("bell.json");
    let deph = stinespring_dilation(&dephasing_measurement_channel(&identity(2)).unwrap()).unwrap();
    let l = ledger_of(&run_process(&bell, &deph).unwrap());
    let fixture_check = check_generalized_landauer(&l);
    ensure(
        s.generalized_landauer.violations == 0
            && s.generalized_landauer.evaluated == 1000
            && s.entangled_memory_trials > 0
            && l.conditional_s_b_given_a < 0.0
            && fixture_check.satisfied,
        format!(
            "campaign violations {} (min margin {:.3e}, {} trials with S(B|A)<0); Bell under dephasing S(B|A)={:.3} margin {:.3e}",
            s.generalized_landauer.violations,
            s.generalized_landauer.min_margin,
            s.entangled_memory_trials,
            l.conditional_s_b_given_a,
            fixture_check.margin
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut cfg = EnsembleConfig::new(0xc7ea, 2, 2, 200);
    cfg.state = StateEnsemble::QuantumClassical;
    let run = monte_carlo_verify(&cfg, &OptimizerConfig::default()).expect("runs");
    let s = &run.summary;
    let qc = fixture("quantum_classical.json");
    let mut fixture_violations = 0;
    let mut fixture_min = f64::INFINITY;
    let mut not_applicable = 0;
    for t in 0..200u64 {
        let mut rng = trial_rng(0xf1c7, t);
        let ch = random_kraus_channel(2, 1 + (t % 4) as usize, &mut rng).unwrap();
        let outcome = run_process(&qc, &stinespring_dilation_with_env(&ch, 4).unwrap()).unwrap();
        match check_creation_bound(&ledger_of(&outcome)) {
            Ok(r) => {
                fixture_min = fixture_min.min(r.margin);
                if !r.satisfied {
                    fixture_violations += 1;
                }
            }
            Err(_) => not_applicable += 1,
        }
    }
    ensure(
        s.creation.evaluated == 200 && s.creation.violations == 0 && fixture_violations == 0 && not_applicable == 0,
        format!(
            "sampled quantum-classical inputs: {} evaluated, {} violations (min margin {:.3e}); shipped fixture: 200 channels, {fixture_violations} violations (min margin {fixture_min:.3e})",
            s.creation.evaluated, s.creation.violations, s.creation.min_margin
        ),
    )
}

fn criterion_8(c: &Campaign) -> Outcome {
    let s = &c.summary;
    ensure(
        s.mutual_information.evaluated == 1000 && s.mutual_information.violations == 0,
        format!(
            "{} trials, {} violations of 0 ≤ ΔI ≤ ΔS_T and I(SE')=ΔS_T (min margin {:.2e})",
            s.mutual_information.evaluated, s.mutual_information.violations, s.mutual_information.min_margin
        ),
    )
}

fn criterion_9() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_qerase"))
            .args(["montecarlo", "--trials", "100", "--seed", "7"])
            .env_remove("QERASE_SEED")
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let rows = a.stdout.iter().filter(|&&c| c == b'\n').count();
    ensure(
        a.status.success() && b.status.success() && a.stdout == b.stdout && rows > 100,
        format!("two runs, {} bytes each, identical: {}", a.stdout.len(), a.stdout == b.stdout),
    )
}

fn state_ok(s: &DensityOperator) -> bool {
    let m = s.matrix();
    let min_eig = common::spectrum(m).last().copied().unwrap_or(0.0);
    hermiticity_error(m) <= 1e-10 && (trace(m).re - 1.0).abs() <= 1e-10 && trace(m).im.abs() <= 1e-10 && min_eig >= -1e-10
}

fn criterion_10() -> Outcome {
    let mut checked = 0;
    let mut bad = 0;
    let mut worst_pure = 0.0f64;
    let mut record = |o: &ProcessOutcome, pure: bool| {
        for s in [&o.state_after, &o.system_after, &o.env_after] {
            checked += 1;
            if !state_ok(s) {
                bad += 1;
            }
        }
        for label in o.system_labels() {
            checked += 1;
            if !state_ok(&partial_trace(&o.system_after, &[label]).unwrap()) {
                bad += 1;
            }
        }
        if pure {
            worst_pure = worst_pure.max(o.state_after.entropy());
        }
    };
    for t in 0..200u64 {
        let mut rng = trial_rng(0x4a11, t);
        let rank = 1 + (t % 4) as usize;
        let rho = random_density_matrix(&ab(), rank, &mut rng).unwrap();
        let ch = random_kraus_channel(2, 1 + (t % 4) as usize, &mut rng).unwrap();
        let o = run_process(&rho, &stinespring_dilation_with_env(&ch, 4).unwrap()).unwrap();
        record(&o, rank == 1);
    }
    let bell = fixture("bell.json");
    let h = qubit_diag([0.0, 1.0]);
    for dil in [
        bleaching_dilation(&[0.5, 0.5], &[ket(2, 0), ket(2, 1)]).unwrap(),
        thermalizing_dilation(&h, 0.7, &identity(2)).unwrap(),
        stinespring_dilation(&dephasing_measurement_channel(&identity(2)).unwrap()).unwrap(),
    ] {
        record(&run_process(&bell, &dil).unwrap(), true);
    }
    ensure(
        bad == 0 && worst_pure <= 1e-9,
        format!("{checked} emitted states checked, {bad} invalid; max entropy of evolved pure global states {worst_pure:.1e}"),
    )
}

fn main() -> ExitCode {
    let titles = [
        "discord fixtures",
        "pure-state discord equals entanglement entropy",
        "erasure bound over 1000 random processes",
        "bleaching",
        "thermalizing channel",
        "generalized Landauer bound",
        "creation bound from quantum-classical inputs",
        "mutual-information compensation",
        "CLI determinism",
        "numerical hygiene",
    ];
    let c = campaign();
    let results = [
        criterion_1(),
        criterion_2(),
        criterion_3(&c),
        criterion_4(),
        criterion_5(),
        criterion_6(&c),
        criterion_7(),
        criterion_8(&c),
        criterion_9(),
        criterion_10(),
    ];
    let mut failed = 0;
    for (i, (title, r)) in titles.iter().zip(&results).enumerate() {
        match r {
            Ok(d) => println!("PASS {:>2} {title}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {title}: {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
