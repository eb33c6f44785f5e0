//! File formats: JSON states, channels and reports; CSV Monte Carlo rows.
//!
//! Complex entries are two-element `[re, im]` arrays, matrices are row-major
//! nested arrays. Floats are written in shortest round-trip form, so a state
//! written and read back is bit-identical.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channels::KrausChannel;
use crate::ensembles::{MonteCarloRun, TrialRecord};
use crate::error::{Error, Result};
use crate::ledger::{BoundCheckResult, EntropyLedger};
use crate::qmath::{c64, ComplexMatrix, DensityOperator, SubsystemDims};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &JsonMatrix, field: &str) -> Result<ComplexMatrix> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse(format!("`{field}`: empty matrix")));
    }
    let cols = rows[0].len();
    let mut m = ComplexMatrix::zeros(n, cols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Parse(format!(
                "`{field}`: row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (j, [re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Parse(format!("`{field}`: entry ({i}, {j}) is not finite")));
            }
            m[(i, j)] = c64(*re, *im);
        }
    }
    Ok(m)
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("{what}: {e}")))
}

/// On-disk density operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub labels: Vec<String>,
    pub matrix: JsonMatrix,
}

impl StateFile {
    pub fn from_state(state: &DensityOperator) -> Self {
        Self {
            dims: state.dims().dims().to_vec(),
            labels: state.dims().labels().to_vec(),
            matrix: matrix_to_json(state.matrix()),
        }
    }

    pub fn to_state(&self) -> Result<DensityOperator> {
        let dims = SubsystemDims::new(self.dims.clone(), self.labels.clone())
            .map_err(|e| Error::Parse(format!("`dims`/`labels`: {e}")))?;
        let m = matrix_from_json(&self.matrix, "matrix")?;
        if m.nrows() != dims.total() || m.ncols() != dims.total() {
            return Err(Error::Parse(format!(
                "`matrix`: shape {}x{} does not match dims {:?}",
                m.nrows(),
                m.ncols(),
                self.dims
            )));
        }
        DensityOperator::new(m, dims)
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text, "state file")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state file serializes")
    }
}

pub fn read_state(path: &Path) -> Result<DensityOperator> {
    let text = std::fs::read_to_string(path)?;
    StateFile::parse(&text)?.to_state()
}

pub fn write_state(path: &Path, state: &DensityOperator) -> Result<()> {
    std::fs::write(path, StateFile::from_state(state).to_json())?;
    Ok(())
}

/// On-disk Kraus channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub kraus: Vec<JsonMatrix>,
}

impl ChannelFile {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        Self { kraus: ch.kraus_ops().iter().map(matrix_to_json).collect() }
    }

    pub fn to_channel(&self) -> Result<KrausChannel> {
        let ops = self
            .kraus
            .iter()
            .enumerate()
            .map(|(k, m)| matrix_from_json(m, &format!("kraus[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        KrausChannel::new(ops)
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text, "channel file")
    }
}

/// Hex SHA-256 over the concatenated inputs.
pub fn digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Units {
    pub entropy: &'static str,
    pub energy: &'static str,
}

pub const UNITS: Units = Units { entropy: "bits", energy: "kT·ln2" };

/// Output of a scenario run.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRecord {
    pub scenario: String,
    pub inputs_digest: String,
    pub units: Units,
    pub tool_version: &'static str,
    pub seed: u64,
    pub ledger: Option<EntropyLedger>,
    pub checks: Vec<BoundCheckResult>,
    /// Checks that were skipped, with the reason.
    pub not_evaluated: Vec<NotEvaluated>,
    /// Scenario-specific quantities.
    pub details: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NotEvaluated {
    pub name: String,
    pub reason: String,
}

impl ReportRecord {
    pub fn violated(&self) -> bool {
        self.checks.iter().any(|c| !c.satisfied)
    }

    /// Rejects reports with NaN or infinite numbers in the ledger or checks.
    pub fn validate(&self) -> Result<()> {
        for c in &self.checks {
            if ![c.lhs, c.rhs, c.tolerance, c.margin].iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidParameter(format!("check `{}` has a non-finite value", c.name)));
            }
        }
        if let Some(l) = &self.ledger {
            // the ledger has no optional fields, so a null can only be a NaN or infinity
            let value = serde_json::to_value(l).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            if let Some((k, _)) = value.as_object().into_iter().flatten().find(|(_, v)| v.is_null()) {
                return Err(Error::InvalidParameter(format!("ledger field `{k}` is not finite")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Serialize)]
struct CsvRow {
    trial: usize,
    rank: usize,
    kraus_count: usize,
    d_before: Option<f64>,
    d_after: Option<f64>,
    delta_d: Option<f64>,
    delta_s_t: Option<f64>,
    conditional_s_b_given_a: Option<f64>,
    delta_i: Option<f64>,
    i_se_after: Option<f64>,
    erasure_margin: Option<f64>,
    total_entropy_margin: Option<f64>,
    landauer_margin: Option<f64>,
    mutual_info_margin: Option<f64>,
    creation_margin: Option<f64>,
    classical_margin: Option<f64>,
    tolerance: Option<f64>,
    slack: f64,
    violated: bool,
    error: String,
}

fn csv_row(r: &TrialRecord, slack: f64) -> CsvRow {
    let l = r.ledger.as_ref();
    let c = r.checks.as_ref();
    CsvRow {
        trial: r.trial,
        rank: r.rank,
        kraus_count: r.kraus_count,
        d_before: l.map(|l| l.d_before),
        d_after: l.map(|l| l.d_after),
        delta_d: l.map(|l| l.delta_d),
        delta_s_t: l.map(|l| l.delta_s_t),
        conditional_s_b_given_a: l.map(|l| l.conditional_s_b_given_a),
        delta_i: l.map(|l| l.delta_i),
        i_se_after: l.map(|l| l.i_se_after),
        erasure_margin: c.map(|c| c.erasure.margin),
        total_entropy_margin: c.map(|c| c.total_entropy.margin),
        landauer_margin: c.map(|c| c.generalized_landauer.margin),
        mutual_info_margin: c.map(|c| c.mutual_information.iter().map(|m| m.margin).fold(f64::INFINITY, f64::min)),
        creation_margin: c.and_then(|c| c.creation.as_ref().map(|m| m.margin)),
        classical_margin: c.map(|c| c.classical_monotonicity.margin),
        tolerance: l.map(EntropyLedger::tolerance),
        slack,
        violated: c.is_some_and(|c| c.violated()),
        error: r.error.clone().unwrap_or_default(),
    }
}

/// One row per trial followed by `#`-prefixed summary lines.
pub fn write_monte_carlo_csv<W: Write>(run: &MonteCarloRun, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let slack = run.summary.optimizer_slack;
    for r in &run.records {
        w.serialize(csv_row(r, slack)).map_err(csv_err)?;
    }
    let mut out = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let s = &run.summary;
    let c = &run.config;
    writeln!(out, "# seed={} trials={} dims={},{} env_dim={} kraus_count={}", s.seed, s.trials, c.dim_a, c.dim_b, c.env_dim, c.kraus_count)?;
    writeln!(out, "# units=bits optimizer_slack={} failed_trials={}", s.optimizer_slack, s.failed_trials)?;
    for (name, st) in [
        ("erasure", &s.erasure),
        ("total_entropy", &s.total_entropy),
        ("generalized_landauer", &s.generalized_landauer),
        ("mutual_information", &s.mutual_information),
        ("creation", &s.creation),
    ] {
        writeln!(out, "# {name}: evaluated={} violations={} min_margin={}", st.evaluated, st.violations, st.min_margin)?;
    }
    writeln!(
        out,
        "# measurement_class_artifacts={} entangled_memory_trials={} total_violations={}",
        s.measurement_class_artifacts,
        s.entangled_memory_trials,
        s.total_violations()
    )?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("csv: {other:?}")),
    }
}
