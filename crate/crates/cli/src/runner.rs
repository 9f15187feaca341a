//! Expands a config into independent jobs and runs them on the rayon pool.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use ratchet_core::classical::{asymptotic_current, bifurcation_scan, evolve, sample_initial, BifurcationProtocol};
use ratchet_core::observables::{husimi, mean, poincare_histogram, CurrentSeries, PhaseGrid};
use ratchet_core::output::{
    read_current_csv, write_bifurcation_csv, write_current_csv, write_grid_csv, write_grid_sidecar, write_scan_csv,
    MetaValue, ScanPoint, ScanVariable,
};
use ratchet_core::quantum::{
    params_hash, quantum_current, read_checkpoint, write_checkpoint, Checkpoint, QuantumEngine,
};
use ratchet_core::{QuantumParams, SimulationParams};

use crate::config::{Experiment, ExperimentConfig};
use crate::manifest::{JobRecord, Manifest};
use crate::CliError;

/// Compact decimal used in file names: `0.055`, `0`, `0.85`.
fn num(v: f64) -> String {
    format!("{v}")
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Root under which `config.output` is created.
    pub out_root: PathBuf,
    /// Stop every quantum job after this many new periods, leaving a
    /// checkpoint to resume from.
    pub period_budget: Option<u64>,
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    Incomplete,
    /// Resume found nothing left to do.
    AlreadyComplete,
}

#[derive(Debug, Clone)]
pub struct QuantumJob {
    pub label: String,
    pub params: QuantumParams,
    pub periods: u64,
    /// File receiving `J(t)`.
    pub series_file: String,
    /// Husimi snapshot at the last period.
    pub snapshot: bool,
}

#[derive(Debug, Clone)]
enum Kind {
    Bifurcation { temperature: f64 },
    Inset { temperature: f64 },
    ClassicalCurrent { temperature: f64 },
    ClassicalScan,
    ClassicalPortrait { temperature: f64 },
    Quantum(QuantumJob),
}

#[derive(Debug, Clone)]
struct Job {
    label: String,
    /// The file whose presence marks the job as done.
    artifact: String,
    kind: Kind,
}

/// `J_inf` per `hbar_eff`, assembled from the per-point quantum series.
#[derive(Debug, Clone)]
struct QuantumScan {
    file: String,
    hbar: f64,
    /// `(scan value, series file)`.
    points: Vec<(f64, String)>,
}

struct Plan {
    jobs: Vec<Job>,
    scans: Vec<QuantumScan>,
}

fn scan_variable(config: &ExperimentConfig) -> ScanVariable {
    if config.protocol.gammas.is_some() {
        ScanVariable::Gamma
    } else {
        ScanVariable::Temperature
    }
}

fn plan(config: &ExperimentConfig) -> Plan {
    let p = &config.protocol;
    let mut jobs = Vec::new();
    let mut scans = Vec::new();
    if config.engine.classical() {
        for t in config.classical_temperatures() {
            let tag = format!("T{}", num(t));
            match config.experiment {
                Experiment::Bifurcation => {
                    jobs.push(Job {
                        label: format!("bifurcation_{tag}"),
                        artifact: format!("bifurcation_{tag}.csv"),
                        kind: Kind::Bifurcation { temperature: t },
                    });
                    if p.inset.is_some() {
                        jobs.push(Job {
                            label: format!("inset_{tag}"),
                            artifact: format!("jinf_gamma_{tag}.csv"),
                            kind: Kind::Inset { temperature: t },
                        });
                    }
                }
                Experiment::Current => jobs.push(Job {
                    label: format!("classical_{tag}"),
                    artifact: format!("current_classical_{tag}.csv"),
                    kind: Kind::ClassicalCurrent { temperature: t },
                }),
                Experiment::Portrait => jobs.push(Job {
                    label: format!("portrait_classical_{tag}"),
                    artifact: format!("portrait_classical_{tag}.csv"),
                    kind: Kind::ClassicalPortrait { temperature: t },
                }),
                Experiment::AsymptoticScan | Experiment::Husimi => {}
            }
        }
        if config.experiment == Experiment::AsymptoticScan {
            jobs.push(Job {
                label: "scan_classical".into(),
                artifact: "scan_classical.csv".into(),
                kind: Kind::ClassicalScan,
            });
        }
    }
    if config.engine.quantum() {
        let q = config.quantum.as_ref().expect("validated");
        for (i, &hbar) in q.hbar_eff.iter().enumerate() {
            let h = format!("h{}", num(hbar));
            let mut points = Vec::new();
            let cases: Vec<(f64, f64, String)> = match (config.experiment, &p.gammas) {
                (Experiment::AsymptoticScan, Some(grid)) => {
                    let t = config.quantum_temperatures()[0];
                    grid.values().into_iter().map(|g| (g, t, format!("g{}", num(g)))).collect()
                }
                _ => config
                    .quantum_temperatures()
                    .into_iter()
                    .map(|t| (config.params.gamma, t, format!("T{}", num(t))))
                    .collect(),
            };
            for (gamma, t, tag) in cases {
                let label = format!("quantum_{h}_{tag}");
                let params = config.quantum_params(hbar, i, t, gamma);
                let (periods, series_file, artifact, snapshot) = match config.experiment {
                    Experiment::Current => {
                        let f = format!("current_quantum_{h}_{tag}.csv");
                        (p.steps as u64, f.clone(), f, false)
                    }
                    Experiment::AsymptoticScan => {
                        let f = format!("series_quantum_{h}_{tag}.csv");
                        points.push((if p.gammas.is_some() { gamma } else { t }, f.clone()));
                        ((p.transient + p.window) as u64, f.clone(), f, false)
                    }
                    _ => (
                        p.steps as u64,
                        format!("series_quantum_{h}_{tag}.csv"),
                        format!("husimi_{h}_{tag}.csv"),
                        true,
                    ),
                };
                jobs.push(Job {
                    label: label.clone(),
                    artifact,
                    kind: Kind::Quantum(QuantumJob { label, params, periods, series_file, snapshot }),
                });
            }
            if config.experiment == Experiment::AsymptoticScan {
                scans.push(QuantumScan { file: format!("scan_quantum_{h}.csv"), hbar, points });
            }
        }
    }
    Plan { jobs, scans }
}

/// Quantum jobs a config expands to, in run order.
pub fn quantum_jobs(config: &ExperimentConfig) -> Vec<QuantumJob> {
    plan(config)
        .jobs
        .into_iter()
        .filter_map(|j| match j.kind {
            Kind::Quantum(q) => Some(q),
            _ => None,
        })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    Ok(BufWriter::new(fs::File::create(path)?))
}

/// Writes through a temporary file so a crash never leaves half an artifact
/// that would later count as done.
fn write_atomic(path: &Path, body: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> Result<(), CliError> {
    let tmp = path.with_extension("part");
    let mut w = create(&tmp)?;
    body(&mut w)?;
    w.flush()?;
    drop(w);
    fs::rename(&tmp, path)?;
    Ok(())
}

fn base_meta(params: &SimulationParams) -> Vec<(&'static str, String)> {
    vec![
        ("kick_strength", num(params.kick_strength)),
        ("asymmetry", num(params.asymmetry)),
        ("phase", num(params.phase)),
        ("gamma", num(params.gamma)),
        ("temperature", num(params.temperature)),
    ]
}

struct JobResult {
    record: JobRecord,
    complete: bool,
}

fn log(opts: &RunOptions, msg: impl AsRef<str>) {
    if !opts.quiet {
        eprintln!("ratchet: {}", msg.as_ref());
    }
}

fn run_classical(config: &ExperimentConfig, job: &Job, dir: &Path) -> Result<(), CliError> {
    let p = &config.protocol;
    let path = dir.join(&job.artifact);
    let with_t = |t: f64| SimulationParams { temperature: t, ..config.params };
    match &job.kind {
        Kind::Bifurcation { temperature } => {
            let params = with_t(*temperature);
            let protocol = BifurcationProtocol {
                transient: p.transient,
                retained: p.retained,
                count: p.count,
                sample_cap: p.sample_cap,
            };
            let grid = p.gammas.as_ref().expect("validated").values();
            let scan = bifurcation_scan(&grid, &params, &protocol, &p.region)?;
            let mut meta = base_meta(&params);
            meta.retain(|(k, _)| *k != "gamma");
            meta.extend([
                ("engine", "classical".to_string()),
                ("transient", protocol.transient.to_string()),
                ("retained", protocol.retained.to_string()),
                ("count", protocol.count.to_string()),
                ("stride", protocol.stride().to_string()),
            ]);
            write_atomic(&path, |w| write_bifurcation_csv(w, &scan.gamma_grid, &scan.samples, &meta))
        }
        Kind::Inset { temperature } => {
            let inset = p.inset.as_ref().expect("planned only with an inset");
            let params = with_t(*temperature);
            let points = inset
                .gammas
                .values()
                .par_iter()
                .map(|&gamma| {
                    let a = asymptotic_current(
                        &SimulationParams { gamma, ..params },
                        &p.region,
                        inset.transient,
                        inset.window,
                        inset.count,
                    )?;
                    Ok(ScanPoint { value: gamma, j_inf: a.j_inf, stderr: Some(a.stderr) })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let mut meta = base_meta(&params);
            meta.retain(|(k, _)| *k != "gamma");
            meta.extend([
                ("engine", "classical".to_string()),
                ("transient", inset.transient.to_string()),
                ("window", inset.window.to_string()),
                ("count", inset.count.to_string()),
            ]);
            write_atomic(&path, |w| write_scan_csv(w, ScanVariable::Gamma, &points, &meta))
        }
        Kind::ClassicalCurrent { temperature } => {
            let params = with_t(*temperature).validate()?;
            let mut ensemble = sample_initial(p.count, &p.region, params.seed)?;
            let series = evolve(&mut ensemble, &params, p.steps);
            let mut meta = base_meta(&params);
            meta.extend([("engine", "classical".to_string()), ("count", p.count.to_string())]);
            write_atomic(&path, |w| write_current_csv(w, &series, &meta))
        }
        Kind::ClassicalScan => {
            let variable = scan_variable(config);
            let cases: Vec<SimulationParams> = match &p.gammas {
                Some(grid) => {
                    let t = config.classical_temperatures()[0];
                    grid.values().into_iter().map(|g| SimulationParams { gamma: g, ..with_t(t) }).collect()
                }
                None => config.classical_temperatures().into_iter().map(with_t).collect(),
            };
            let points = cases
                .par_iter()
                .map(|params| {
                    let a = asymptotic_current(params, &p.region, p.transient, p.window, p.count)?;
                    let value = match variable {
                        ScanVariable::Gamma => params.gamma,
                        ScanVariable::Temperature => params.temperature,
                    };
                    Ok(ScanPoint { value, j_inf: a.j_inf, stderr: Some(a.stderr) })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let mut meta = base_meta(&config.params);
            meta.retain(|(k, _)| *k != variable.column());
            meta.extend([
                ("engine", "classical".to_string()),
                ("transient", p.transient.to_string()),
                ("window", p.window.to_string()),
                ("count", p.count.to_string()),
            ]);
            write_atomic(&path, |w| write_scan_csv(w, variable, &points, &meta))
        }
        Kind::ClassicalPortrait { temperature } => {
            let params = with_t(*temperature).validate()?;
            let mut ensemble = sample_initial(p.count, &p.region, params.seed)?;
            ensemble.advance(&params, p.steps);
            let grid = poincare_histogram(ensemble.points(), p.raster);
            write_grid_pair(dir, &job.artifact, &grid, &[
                ("engine", MetaValue::Text("classical".into())),
                ("t", MetaValue::Int(p.steps as u64)),
                ("gamma", MetaValue::Float(params.gamma)),
                ("temperature", MetaValue::Float(params.temperature)),
                ("count", MetaValue::Int(p.count as u64)),
                ("captured", MetaValue::Float(grid.integral())),
            ])
        }
        Kind::Quantum(_) => unreachable!("quantum jobs run through run_quantum"),
    }
}

fn write_grid_pair(dir: &Path, artifact: &str, grid: &PhaseGrid, extra: &[(&str, MetaValue)]) -> Result<(), CliError> {
    let sidecar = dir.join(Path::new(artifact).with_extension("toml"));
    write_atomic(&sidecar, |w| write_grid_sidecar(w, grid, extra))?;
    write_atomic(&dir.join(artifact), |w| write_grid_csv(w, grid))
}

pub fn checkpoint_path(dir: &Path, label: &str) -> PathBuf {
    dir.join("checkpoints").join(format!("{label}.ckpt"))
}

/// Evolves a quantum job from `start` (or its initial state), checkpointing
/// along the way, and writes its artifacts once all periods are done.
fn run_quantum(
    config: &ExperimentConfig,
    job: &QuantumJob,
    dir: &Path,
    start: Option<Checkpoint>,
    budget: Option<u64>,
) -> Result<(JobRecord, bool), CliError> {
    let q = config.quantum.as_ref().expect("validated");
    let mut engine = QuantumEngine::new(&job.params)?;
    let hash = params_hash(&job.params);
    let (mut rho, step, mut series) = match start {
        Some(c) => (c.rho, c.step, c.series),
        None => {
            let rho = engine.initial_state()?;
            let mut series = CurrentSeries::new();
            series.push(0, quantum_current(&rho)?, None);
            (rho, 0, series)
        }
    };
    let target = budget.map_or(job.periods, |b| (step + b).min(job.periods)).max(step);
    let ckpt = checkpoint_path(dir, &job.label);
    fs::create_dir_all(ckpt.parent().expect("checkpoint path has a parent"))?;
    for t in step + 1..=target {
        engine.evolve_one_period(&mut rho)?;
        series.push(t, quantum_current(&rho)?, None);
        if t % q.checkpoint_every == 0 || t == target {
            let snapshot = Checkpoint { rho: rho.clone(), step: t, params_hash: hash, series: series.clone() };
            write_checkpoint(&ckpt, &snapshot)?;
        }
    }
    let record = JobRecord {
        label: job.label.clone(),
        complete: target >= job.periods,
        step: Some(target),
        renormalizations: Some(engine.renormalizations()),
        substeps: Some(engine.substeps()),
    };
    if target < job.periods {
        return Ok((record, false));
    }
    let mut meta = base_meta(&job.params.base);
    meta.extend([
        ("engine", "quantum".to_string()),
        ("hbar_eff", num(job.params.hbar_eff)),
        ("n_max", job.params.n_max.to_string()),
        ("substeps", engine.substeps().to_string()),
    ]);
    write_atomic(&dir.join(&job.series_file), |w| write_current_csv(w, &series, &meta))?;
    if job.snapshot {
        let h = husimi(&rho, config.protocol.raster, &config.protocol.husimi);
        let artifact = format!("husimi_{}", job.label.trim_start_matches("quantum_"));
        write_grid_pair(dir, &format!("{artifact}.csv"), &h.grid, &[
            ("engine", MetaValue::Text("quantum".into())),
            ("t", MetaValue::Int(job.periods)),
            ("gamma", MetaValue::Float(job.params.base.gamma)),
            ("temperature", MetaValue::Float(job.params.base.temperature)),
            ("hbar_eff", MetaValue::Float(job.params.hbar_eff)),
            ("width_ratio", MetaValue::Float(h.options.width_ratio)),
        ])?;
    }
    Ok((record, true))
}

/// `J_inf` of a quantum series: the mean over `(transient, transient + window]`,
/// or `J(transient)` when the window is empty.
fn quantum_j_inf(series: &CurrentSeries, transient: usize, window: usize) -> f64 {
    let j = series.currents();
    if window == 0 {
        j[transient]
    } else {
        mean(&j[transient + 1..=transient + window])
    }
}

/// Writes every quantum scan whose points are all on disk. Returns whether
/// all scans exist.
fn assemble_scans(config: &ExperimentConfig, scans: &[QuantumScan], dir: &Path) -> Result<bool, CliError> {
    let p = &config.protocol;
    let variable = scan_variable(config);
    let mut all = true;
    for scan in scans {
        if !scan.points.iter().all(|(_, f)| dir.join(f).exists()) {
            all = false;
            continue;
        }
        let mut points = Vec::new();
        for (value, f) in &scan.points {
            let series = read_current_csv(BufReader::new(fs::File::open(dir.join(f))?))?;
            points.push(ScanPoint { value: *value, j_inf: quantum_j_inf(&series, p.transient, p.window), stderr: None });
        }
        let mut meta = base_meta(&config.params);
        meta.retain(|(k, _)| *k != variable.column() && *k != "temperature");
        meta.extend([
            ("engine", "quantum".to_string()),
            ("hbar_eff", num(scan.hbar)),
            ("transient", p.transient.to_string()),
            ("window", p.window.to_string()),
        ]);
        write_atomic(&dir.join(&scan.file), |w| write_scan_csv(w, variable, &points, &meta))?;
    }
    Ok(all)
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn artifacts_in(dir: &Path) -> Result<Vec<String>, CliError> {
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| (n.ends_with(".csv") || n.ends_with(".toml")) && n != "manifest.json")
        .collect();
    names.sort();
    Ok(names)
}

pub fn output_dir(config: &ExperimentConfig, opts: &RunOptions) -> PathBuf {
    opts.out_root.join(&config.output)
}

/// Runs every job of `config`. The manifest is written before any work
/// starts and rewritten at the end, so an interrupted run leaves one marked
/// incomplete.
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let dir = output_dir(config, opts);
    fs::create_dir_all(&dir)?;
    let clock = Instant::now();
    let Plan { jobs, scans } = plan(config);
    let mut manifest = Manifest::new(config, unix_now(), rayon::current_num_threads());
    manifest.jobs = jobs.iter().map(|j| JobRecord::pending(&j.label)).collect();
    manifest.write(&dir)?;

    let results: Vec<Result<JobResult, CliError>> = jobs
        .par_iter()
        .map(|job| {
            let started = Instant::now();
            let result = match &job.kind {
                Kind::Quantum(q) => run_quantum(config, q, &dir, None, opts.period_budget)
                    .map(|(record, complete)| JobResult { record, complete }),
                _ => run_classical(config, job, &dir).map(|()| JobResult {
                    record: JobRecord { complete: true, ..JobRecord::pending(&job.label) },
                    complete: true,
                }),
            };
            match &result {
                Ok(r) if r.complete => log(opts, format!("{} done in {:.1}s", job.label, started.elapsed().as_secs_f64())),
                Ok(r) => log(opts, format!("{} paused at period {}", job.label, r.record.step.unwrap_or(0))),
                Err(e) => log(opts, format!("{} failed: {e}", job.label)),
            }
            result
        })
        .collect();

    let mut first_error = None;
    let mut complete = true;
    for (slot, result) in manifest.jobs.iter_mut().zip(results) {
        match result {
            Ok(r) => {
                complete &= r.complete;
                *slot = r.record;
            }
            Err(e) => {
                complete = false;
                first_error.get_or_insert(e);
            }
        }
    }
    complete &= assemble_scans(config, &scans, &dir)?;
    manifest.complete = complete && first_error.is_none();
    manifest.wall_time_s = clock.elapsed().as_secs_f64();
    manifest.artifacts = artifacts_in(&dir)?;
    manifest.write(&dir)?;
    match first_error {
        Some(e) => Err(e),
        None if complete => Ok(Outcome::Complete),
        None => Ok(Outcome::Incomplete),
    }
}

/// Continues the quantum job a checkpoint belongs to.
pub fn resume(ckpt_path: &Path, config: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let ckpt = read_checkpoint(ckpt_path)?;
    let Plan { jobs, scans } = plan(config);
    let quantum: Vec<&QuantumJob> = jobs
        .iter()
        .filter_map(|j| match &j.kind {
            Kind::Quantum(q) => Some(q),
            _ => None,
        })
        .collect();
    if quantum.is_empty() {
        return Err(CliError::Config("config has no quantum jobs to resume".into()));
    }
    let job = match quantum.iter().find(|q| params_hash(&q.params) == ckpt.params_hash) {
        Some(q) => *q,
        None => {
            // Diagnose against the job the file name points at, if any.
            let stem = ckpt_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let probe = quantum.iter().find(|q| q.label == stem).unwrap_or(&quantum[0]);
            ckpt.verify(&probe.params)?;
            return Err(CliError::Config(format!("checkpoint matches no job of {}", config.output)));
        }
    };
    ckpt.verify(&job.params)?;

    let dir = output_dir(config, opts);
    let artifact = jobs.iter().find(|j| j.label == job.label).map(|j| j.artifact.clone()).expect("job is planned");
    if ckpt.step >= job.periods && dir.join(&artifact).exists() {
        log(opts, format!("{} already finished all {} periods; nothing to do", job.label, job.periods));
        return Ok(Outcome::AlreadyComplete);
    }

    let clock = Instant::now();
    let mut manifest = Manifest::read(&dir).unwrap_or_else(|_| {
        let mut m = Manifest::new(config, unix_now(), rayon::current_num_threads());
        m.jobs = jobs
            .iter()
            .map(|j| JobRecord { complete: dir.join(&j.artifact).exists(), ..JobRecord::pending(&j.label) })
            .collect();
        m
    });
    log(opts, format!("{} resuming at period {} of {}", job.label, ckpt.step, job.periods));
    let (record, done) = run_quantum(config, job, &dir, Some(ckpt), opts.period_budget)?;
    match manifest.jobs.iter_mut().find(|r| r.label == job.label) {
        Some(slot) => *slot = record,
        None => manifest.jobs.push(record),
    }
    let scans_done = assemble_scans(config, &scans, &dir)?;
    manifest.complete = scans_done && jobs.iter().all(|j| dir.join(&j.artifact).exists());
    manifest.wall_time_s += clock.elapsed().as_secs_f64();
    manifest.artifacts = artifacts_in(&dir)?;
    manifest.write(&dir)?;
    Ok(if done { Outcome::Complete } else { Outcome::Incomplete })
}
