//! Repeated runs of several weight-generation methods on one instance.
//!
//! Output directory layout:
//!
//! * `runs.jsonl`: one raw [`RunRecord`] per finished (method, run) cell,
//!   appended as cells finish. An interrupted experiment resumes by skipping
//!   the cells already present.
//! * `reference.json`: the shared reference point and where it came from.
//! * `reports.jsonl`: one [`RunReport`] per cell, in method then run order,
//!   rewritten at the end of every experiment.
//! * `fronts/<method>_<run>.csv`: final front of each cell.

use std::collections::HashMap;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use mubqp_core::seed::{combine, tag};
use mubqp_core::{
    hypervolume, scalarise, Annealer, Distance, Method, MubqpInstance, ReferencePoint,
    ScalariseConfig, SolverParams,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, IoContext, Result};
use crate::format::load_instance;

/// Safety margin added to every component of a derived reference point.
pub const REFERENCE_MARGIN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MethodId {
    #[serde(rename = "uniform")]
    Uniform,
    #[serde(rename = "dichotomic")]
    Dichotomic,
    #[serde(rename = "avg-manhattan")]
    AvgManhattan,
    #[serde(rename = "avg-euclidean")]
    AvgEuclidean,
}

impl MethodId {
    pub const ALL: [MethodId; 4] = [
        MethodId::Uniform,
        MethodId::Dichotomic,
        MethodId::AvgManhattan,
        MethodId::AvgEuclidean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodId::Uniform => "uniform",
            MethodId::Dichotomic => "dichotomic",
            MethodId::AvgManhattan => "avg-manhattan",
            MethodId::AvgEuclidean => "avg-euclidean",
        }
    }

    pub fn config(self, n_weights: usize) -> ScalariseConfig {
        let (method, distance) = match self {
            MethodId::Uniform => (Method::Uniform, Distance::Euclidean),
            MethodId::Dichotomic => (Method::Dichotomic, Distance::Euclidean),
            MethodId::AvgManhattan => (Method::Averages, Distance::Manhattan),
            MethodId::AvgEuclidean => (Method::Averages, Distance::Euclidean),
        };
        ScalariseConfig {
            method,
            distance,
            n_weights,
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodId {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        MethodId::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                BenchError::Config(format!(
                    "unknown method `{s}` (expected uniform, dichotomic, avg-manhattan or avg-euclidean)"
                ))
            })
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub instance_path: PathBuf,
    pub methods: Vec<MethodId>,
    pub n_weights: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub solver: SolverParams,
    /// Used as given instead of deriving one from the uniform runs.
    pub reference: Option<Vec<f64>>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn instance_name(&self) -> String {
        self.instance_path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }

    /// Checks everything that can be checked before solving.
    pub fn validate(&self, m: usize) -> Result<()> {
        if self.runs == 0 {
            return Err(BenchError::Config("runs must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(BenchError::Config("no methods selected".into()));
        }
        self.solver
            .validate()
            .map_err(|e| BenchError::Config(format!("solver parameters: {e}")))?;
        for method in &self.methods {
            method
                .config(self.n_weights)
                .validate(m)
                .map_err(|e| BenchError::Config(format!("method {method}: {e}")))?;
        }
        if let Some(r) = &self.reference {
            if r.len() != m {
                return Err(BenchError::Config(format!(
                    "reference point has {} components, instance has {m} objectives",
                    r.len()
                )));
            }
            ReferencePoint::new(r.clone()).map_err(|e| BenchError::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// Identifies everything that influences a cell besides method and run,
    /// so stale records in `runs.jsonl` are not reused after a change.
    fn fingerprint(&self) -> u64 {
        let p = &self.solver;
        let mut h = tag(self.instance_name().as_bytes());
        for v in [
            p.t0.to_bits(),
            p.beta.to_bits(),
            p.interval,
            p.offset_rate.to_bits(),
            p.iterations,
            p.replicas as u64,
            p.top_k as u64,
            self.n_weights as u64,
            self.base_seed,
        ] {
            h = combine(h, v);
        }
        h
    }
}

/// Seed of one (method, run) cell.
pub fn cell_seed(base_seed: u64, method: MethodId, run: usize) -> u64 {
    combine(
        combine(base_seed, tag(method.name().as_bytes())),
        run as u64,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontPoint {
    pub costs: Vec<f64>,
    /// Bit string, variable 0 first.
    pub bits: String,
}

/// Raw outcome of one (method, run) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub method: MethodId,
    pub run: usize,
    pub seed: u64,
    pub config: u64,
    pub weights: Vec<Vec<f64>>,
    pub front: Vec<FrontPoint>,
    pub nd_count: usize,
    /// Componentwise maximum over every solution the solver returned, before
    /// filtering.
    pub upper: Vec<f64>,
    pub fallbacks: usize,
    pub wall_ms: u64,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    #[serde(flatten)]
    pub record: RunRecord,
    pub hv: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceSource {
    Explicit,
    Uniform,
    /// No uniform method was run; every successful run contributed.
    AllMethods,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFile {
    pub instance: String,
    pub reference: Vec<f64>,
    pub source: ReferenceSource,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub reports: Vec<RunReport>,
    pub reference: ReferenceFile,
    /// Cells that ended with an error.
    pub failures: usize,
    /// Cells taken over from an earlier, interrupted experiment.
    pub resumed: usize,
}

/// Componentwise maximum of the pre-filter upper bounds plus
/// [`REFERENCE_MARGIN`].
pub fn derive_reference_point<'a>(
    records: impl IntoIterator<Item = &'a RunRecord>,
) -> Result<ReferencePoint> {
    let mut upper: Option<Vec<f64>> = None;
    for r in records {
        if !r.succeeded() || r.upper.is_empty() {
            continue;
        }
        match &mut upper {
            None => upper = Some(r.upper.clone()),
            Some(u) => {
                if u.len() != r.upper.len() {
                    return Err(BenchError::Config(
                        "runs disagree on the objective count".into(),
                    ));
                }
                for (a, b) in u.iter_mut().zip(&r.upper) {
                    *a = a.max(*b);
                }
            }
        }
    }
    let upper = upper.ok_or(BenchError::NoReports)?;
    Ok(ReferencePoint::new(
        upper.into_iter().map(|u| u + REFERENCE_MARGIN).collect(),
    )?)
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Solves one cell. Method errors become a record with `error` set.
pub fn run_cell(
    instance: &MubqpInstance,
    instance_name: &str,
    config: &ExperimentConfig,
    method: MethodId,
    run: usize,
) -> RunRecord {
    let seed = cell_seed(config.base_seed, method, run);
    let start = Instant::now();
    let outcome = Annealer::new(config.solver.clone()).and_then(|solver| {
        scalarise::run(instance, &method.config(config.n_weights), &solver, seed)
    });
    let wall_ms = start.elapsed().as_millis() as u64;
    let mut record = RunRecord {
        instance: instance_name.to_owned(),
        method,
        run,
        seed,
        config: config.fingerprint(),
        weights: Vec::new(),
        front: Vec::new(),
        nd_count: 0,
        upper: Vec::new(),
        fallbacks: 0,
        wall_ms,
        error: None,
    };
    match outcome {
        Ok(out) => {
            record.weights = out.weights.iter().map(|w| w.as_slice().to_vec()).collect();
            record.front = out
                .archive
                .entries()
                .iter()
                .map(|e| FrontPoint {
                    costs: e.solution.costs.clone(),
                    bits: bit_string(&e.solution.bits),
                })
                .collect();
            record.nd_count = record.front.len();
            record.upper = out
                .archive
                .upper_bound()
                .map(<[f64]>::to_vec)
                .unwrap_or_default();
            record.fallbacks = out.fallbacks;
        }
        Err(e) => {
            log::error!("{method} run {run}: {e}");
            record.error = Some(e.to_string());
        }
    }
    record
}

/// Successful records of earlier attempts with the same configuration.
fn load_completed(path: &Path, fingerprint: u64) -> Result<HashMap<(MethodId, usize), RunRecord>> {
    let mut done = HashMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(e).at(path),
    };
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.at(path)?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<RunRecord>(&line) {
            Ok(r) if r.config == fingerprint && r.succeeded() => {
                done.insert((r.method, r.run), r);
            }
            Ok(_) => {}
            // the last line of a crashed experiment may be cut short
            Err(e) => log::warn!("{}: skipping line {}: {e}", path.display(), idx + 1),
        }
    }
    Ok(done)
}

fn write_lines<T: Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).at(path)?);
    for item in items {
        let line = serde_json::to_string(&item).expect("reports serialise");
        writeln!(out, "{line}").at(path)?;
    }
    out.flush().at(path)
}

pub fn write_front_csv(path: &Path, m: usize, front: &[FrontPoint]) -> Result<()> {
    let file = File::create(path).at(path)?;
    let mut w = csv::Writer::from_writer(file);
    let csv_err = |e: csv::Error| BenchError::Io {
        path: path.to_owned(),
        source: e.into(),
    };
    let mut header: Vec<String> = (1..=m).map(|k| format!("c{k}")).collect();
    header.push("bits".into());
    w.write_record(&header).map_err(csv_err)?;
    for p in front {
        let mut row: Vec<String> = p.costs.iter().map(f64::to_string).collect();
        row.push(p.bits.clone());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().at(path)
}

/// Runs every missing (method, run) cell, then scores all cells against one
/// reference point and writes the reports.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let instance = load_instance(&config.instance_path).map_err(|source| BenchError::Instance {
        path: config.instance_path.clone(),
        source,
    })?;
    run_experiment_on(&instance, config)
}

/// [`run_experiment`] with the instance already in memory; `instance_path`
/// only names it.
pub fn run_experiment_on(
    instance: &MubqpInstance,
    config: &ExperimentConfig,
) -> Result<ExperimentOutcome> {
    let m = instance.m();
    config.validate(m)?;
    let name = config.instance_name();
    let dir = &config.output_dir;
    let fronts_dir = dir.join("fronts");
    fs::create_dir_all(&fronts_dir).at(&fronts_dir)?;

    let runs_path = dir.join("runs.jsonl");
    let fingerprint = config.fingerprint();
    let mut done = load_completed(&runs_path, fingerprint)?;
    let resumed = done.len();
    let pending: Vec<(MethodId, usize)> = config
        .methods
        .iter()
        .flat_map(|&method| (0..config.runs).map(move |run| (method, run)))
        .filter(|key| !done.contains_key(key))
        .collect();
    if resumed > 0 {
        log::info!(
            "resuming: {resumed} cell(s) already complete, {} to go",
            pending.len()
        );
    }

    let mut log_file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&runs_path)
        .at(&runs_path)?;
    let ends_cleanly = fs::read(&runs_path)
        .at(&runs_path)?
        .last()
        .is_none_or(|&b| b == b'\n');
    if !ends_cleanly {
        // close off a line cut short by a crash
        writeln!(log_file).at(&runs_path)?;
    }
    let chunk = rayon::current_num_threads().max(1);
    for cells in pending.chunks(chunk) {
        let records: Vec<RunRecord> = cells
            .par_iter()
            .map(|&(method, run)| run_cell(instance, &name, config, method, run))
            .collect();
        // one writer, in cell order
        for r in records {
            let line = serde_json::to_string(&r).expect("records serialise");
            writeln!(log_file, "{line}").at(&runs_path)?;
            log_file.flush().at(&runs_path)?;
            done.insert((r.method, r.run), r);
        }
    }

    let ordered: Vec<RunRecord> = config
        .methods
        .iter()
        .flat_map(|&method| (0..config.runs).map(move |run| (method, run)))
        .filter_map(|key| done.remove(&key))
        .collect();

    let (reference, source) = match &config.reference {
        Some(r) => (ReferencePoint::new(r.clone())?, ReferenceSource::Explicit),
        None if config.methods.contains(&MethodId::Uniform) => (
            derive_reference_point(ordered.iter().filter(|r| r.method == MethodId::Uniform))?,
            ReferenceSource::Uniform,
        ),
        None => (
            derive_reference_point(&ordered)?,
            ReferenceSource::AllMethods,
        ),
    };
    log::info!(
        "{name}: reference point {:?} ({source:?})",
        reference.bounds()
    );
    let reference_file = ReferenceFile {
        instance: name.clone(),
        reference: reference.bounds().to_vec(),
        source,
    };
    let ref_path = dir.join("reference.json");
    fs::write(
        &ref_path,
        serde_json::to_string_pretty(&reference_file).expect("reference serialises") + "\n",
    )
    .at(&ref_path)?;

    let mut reports = Vec::with_capacity(ordered.len());
    let mut failures = 0;
    for record in ordered {
        let hv = if record.succeeded() {
            let points: Vec<&[f64]> = record.front.iter().map(|p| p.costs.as_slice()).collect();
            hypervolume(&points, &reference)?
        } else {
            failures += 1;
            0.0
        };
        let front_path = fronts_dir.join(format!("{}_{}.csv", record.method, record.run));
        write_front_csv(&front_path, m, &record.front)?;
        reports.push(RunReport { record, hv });
    }
    write_lines(&dir.join("reports.jsonl"), &reports)?;

    Ok(ExperimentOutcome {
        reports,
        reference: reference_file,
        failures,
        resumed,
    })
}

/// Reads a `reports.jsonl` file.
pub fn read_reports(path: &Path) -> Result<Vec<RunReport>> {
    let file = File::open(path).at(path)?;
    let mut reports = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.at(path)?;
        if line.trim().is_empty() {
            continue;
        }
        reports.push(
            serde_json::from_str(&line).map_err(|source| BenchError::Json {
                path: path.to_owned(),
                line: idx + 1,
                source,
            })?,
        );
    }
    Ok(reports)
}
