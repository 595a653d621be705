//! Experiment harness: seeded repeated runs, oracle checks and reports.
//!
//! An experiment directory holds `manifest.json`, `runs.csv` and one
//! `front_<run_id>.csv` / `trace_<run_id>.csv` pair per repeat. Floats are
//! written as `{:.16e}`, which round-trips exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolve::{Algorithm, AlgorithmConfig, EvolveError, OperatorParams, RunResult, REDUNDANCY_TOLERANCE};
use crate::geometry::{dominated_closure_vertices, quickhull, Halfspace, ObjectiveVector, Sense, HULL_TOLERANCE};
use crate::metrics::{summarize, Summary, HV_REFERENCE};
use crate::par::{map_indexed, Execution};
use crate::problems::{sample_true_front, Problem, ProblemError};
use crate::rocch::{vus, RocSpace, SpaceLabel};

/// Generator used for every run; recorded in `manifest.json`.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

/// Membership samples drawn by [`oracle_vus`].
pub const ORACLE_MC_SAMPLES: usize = 1_000_000;

pub const RUNS_HEADER: [&str; 8] = ["run_id", "problem", "algo", "seed", "vus", "gini", "hypervolume", "wall_ms"];
pub const FRONT_HEADER: [&str; 5] = ["f1", "f2", "f3", "level", "dvus"];
pub const TRACE_HEADER: [&str; 2] = ["iteration", "vus"];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("objective vector {objectives:?} is not finite")]
    NonFinite { objectives: [f64; 3] },
    #[error("{}: {message}", path.display())]
    Schema { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl HarnessError {
    /// Process exit code: 3 for a non-finite objective, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::NonFinite { .. } => 3,
            _ => 2,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn csv(path: &Path, source: csv::Error) -> Self {
        HarnessError::Csv {
            path: path.to_path_buf(),
            source,
        }
    }

    fn schema(path: &Path, message: impl Into<String>) -> Self {
        HarnessError::Schema {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }
}

impl From<EvolveError> for HarnessError {
    fn from(e: EvolveError) -> Self {
        match e {
            EvolveError::Config(m) => HarnessError::Config(m),
            EvolveError::Problem(p) => HarnessError::Problem(p),
            EvolveError::NonFinite { objectives } => HarnessError::NonFinite { objectives },
        }
    }
}

/// One experiment: `repeats` runs with seeds `seed, seed + 1, ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: String,
    pub algorithm: Algorithm,
    pub population: usize,
    pub evaluations: usize,
    pub seed: u64,
    pub repeats: usize,
    /// `None` selects the defaults for the problem's genotype.
    pub operators: Option<OperatorParams>,
    pub out_dir: PathBuf,
    /// With `false`, `wall_ms` is written as 0 so that artifacts are
    /// byte-identical across executions.
    pub record_timing: bool,
    /// How repeats and ΔVUS loops are executed; never affects results.
    #[serde(skip)]
    pub execution: Execution,
}

impl RunConfig {
    pub fn new(
        problem: impl Into<String>,
        algorithm: Algorithm,
        population: usize,
        evaluations: usize,
        seed: u64,
        repeats: usize,
        out_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            problem: problem.into(),
            algorithm,
            population,
            evaluations,
            seed,
            repeats,
            operators: None,
            out_dir: out_dir.into(),
            record_timing: true,
            execution: Execution::default(),
        }
    }

    /// Parses the problem and checks every invariant of the configuration.
    pub fn resolve(&self) -> Result<(Problem, AlgorithmConfig), HarnessError> {
        let problem: Problem = self.problem.parse()?;
        if self.repeats == 0 {
            return Err(HarnessError::Config("repeat count must be at least 1".into()));
        }
        if self.seed.checked_add(self.repeats as u64 - 1).is_none() {
            return Err(HarnessError::Config(format!(
                "seed {} overflows over {} repeats",
                self.seed, self.repeats
            )));
        }
        let mut algo = AlgorithmConfig::new(&problem, self.population, self.evaluations);
        if let Some(ops) = self.operators {
            algo.operators = ops;
        }
        algo.execution = self.execution;
        algo.validate()?;
        Ok((problem, algo))
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.repeats as u64).map(|k| self.seed + k).collect()
    }
}

/// One finished repeat.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: usize,
    pub seed: u64,
    pub result: RunResult,
}

/// Runs every repeat of `config` without touching the filesystem.
pub fn execute(config: &RunConfig) -> Result<Vec<RunRecord>, HarnessError> {
    let (problem, algo) = config.resolve()?;
    let seeds = config.seeds();
    let outcomes = map_indexed(seeds.len(), config.execution, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seeds[k]);
        let start = Instant::now();
        let mut result = config.algorithm.run(&problem, &algo, &mut rng)?;
        if config.record_timing {
            result.metrics.wall_time_ms = start.elapsed().as_millis() as u64;
        }
        Ok(RunRecord {
            run_id: k,
            seed: seeds[k],
            result,
        })
    });
    outcomes.into_iter().collect::<Result<_, EvolveError>>().map_err(Into::into)
}

/// Numerical tolerances in effect, for the manifest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub hull_coplanarity: f64,
    pub redundancy: f64,
}

/// Everything needed to reproduce an experiment directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub problem: String,
    pub algorithm: Algorithm,
    pub population: usize,
    pub evaluations: usize,
    pub seed: u64,
    pub repeats: usize,
    pub seeds: Vec<u64>,
    pub operators: OperatorParams,
    pub rng: String,
    pub space: SpaceLabel,
    pub sense: Sense,
    pub references: Vec<ObjectiveVector>,
    pub feasible: Halfspace,
    pub tolerances: Tolerances,
    pub hv_reference: [f64; 3],
    pub record_timing: bool,
    pub float_format: String,
}

impl Manifest {
    pub fn new(config: &RunConfig) -> Result<Self, HarnessError> {
        let (problem, algo) = config.resolve()?;
        let space = problem.roc_space();
        Ok(Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            problem: problem.to_string(),
            algorithm: config.algorithm,
            population: config.population,
            evaluations: config.evaluations,
            seed: config.seed,
            repeats: config.repeats,
            seeds: config.seeds(),
            operators: algo.operators,
            rng: RNG_NAME.to_string(),
            space: space.label(),
            sense: space.sense(),
            references: space.references().to_vec(),
            feasible: *space.feasible(),
            tolerances: Tolerances {
                hull_coplanarity: HULL_TOLERANCE,
                redundancy: REDUNDANCY_TOLERANCE,
            },
            hv_reference: [HV_REFERENCE; 3],
            record_timing: config.record_timing,
            float_format: "{:.16e}".to_string(),
        })
    }
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    w.write_record(header).map_err(|e| HarnessError::csv(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| HarnessError::csv(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn front_path(dir: &Path, run_id: usize) -> PathBuf {
    dir.join(format!("front_{run_id}.csv"))
}

pub fn trace_path(dir: &Path, run_id: usize) -> PathBuf {
    dir.join(format!("trace_{run_id}.csv"))
}

/// Runs the experiment and writes its artifacts to `config.out_dir`.
pub fn run_experiment(config: &RunConfig) -> Result<Vec<RunRecord>, HarnessError> {
    let manifest = Manifest::new(config)?;
    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let records = execute(config)?;

    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).map_err(|source| HarnessError::Json {
        path: path.clone(),
        source,
    })?;
    fs::write(&path, json + "\n").map_err(|e| HarnessError::io(&path, e))?;

    let rows = records.iter().map(|r| {
        let m = &r.result.metrics;
        vec![
            r.run_id.to_string(),
            manifest.problem.clone(),
            config.algorithm.to_string(),
            r.seed.to_string(),
            float(m.vus),
            float(m.gini),
            float(m.hypervolume),
            m.wall_time_ms.to_string(),
        ]
    });
    write_csv(&dir.join("runs.csv"), &RUNS_HEADER, rows)?;

    for r in &records {
        let res = &r.result;
        let front = res.population.iter().enumerate().map(|(i, ind)| {
            let o = ind.objectives;
            vec![float(o[0]), float(o[1]), float(o[2]), res.levels[i].to_string(), float(res.dvus[i])]
        });
        write_csv(&front_path(dir, r.run_id), &FRONT_HEADER, front)?;
        let trace = res.trace.iter().enumerate().map(|(i, v)| vec![i.to_string(), float(*v)]);
        write_csv(&trace_path(dir, r.run_id), &TRACE_HEADER, trace)?;
    }
    Ok(records)
}

/// One row of `runs.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub run_id: usize,
    pub problem: String,
    pub algo: String,
    pub seed: u64,
    pub vus: f64,
    pub gini: f64,
    pub hypervolume: f64,
    pub wall_ms: u64,
}

/// One row of a `front_<run_id>.csv` file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontRow {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub level: usize,
    pub dvus: f64,
}

impl FrontRow {
    pub fn objectives(&self) -> ObjectiveVector {
        ObjectiveVector::new(self.f1, self.f2, self.f3)
    }
}

/// Reads a CSV file whose header must equal `header` exactly.
fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path, header: &[&str]) -> Result<Vec<T>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => HarnessError::schema(path, format!("cannot open: {e}")),
        _ => HarnessError::csv(path, e),
    })?;
    let found = r.headers().map_err(|e| HarnessError::csv(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(HarnessError::schema(
            path,
            format!("expected columns {}, found {}", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| HarnessError::schema(path, e.to_string())))
        .collect()
}

pub fn read_runs(path: &Path) -> Result<Vec<RunRow>, HarnessError> {
    read_csv(path, &RUNS_HEADER)
}

pub fn read_front(path: &Path) -> Result<Vec<FrontRow>, HarnessError> {
    read_csv(path, &FRONT_HEADER)
}

/// Mean and standard deviation of every metric for one problem and algorithm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub problem: String,
    pub algo: String,
    pub runs: usize,
    pub vus: Summary,
    pub gini: Summary,
    pub hypervolume: Summary,
    pub wall_ms: Summary,
}

/// Problem × algorithm comparison table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("problem,algo,runs,vus_mean,vus_std,gini_mean,gini_std,hypervolume_mean,hypervolume_std,wall_ms_mean,wall_ms_std\n");
        for r in &self.rows {
            let _ = write!(out, "\"{}\",{},{}", r.problem, r.algo, r.runs);
            for s in [r.vus, r.gini, r.hypervolume, r.wall_ms] {
                let _ = write!(out, ",{},{}", float(s.mean), float(s.std));
            }
            out.push('\n');
        }
        out
    }

    /// Fixed-width table, one line per row, `mean (std)` per metric.
    pub fn to_text(&self) -> String {
        let cells: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| {
                let cell = |s: Summary| format!("{:.4e} ({:.1e})", s.mean, s.std);
                [
                    r.problem.clone(),
                    r.algo.clone(),
                    r.runs.to_string(),
                    cell(r.vus),
                    cell(r.gini),
                    cell(r.hypervolume),
                    format!("{:.0} ({:.0})", r.wall_ms.mean, r.wall_ms.std),
                ]
            })
            .collect();
        let header = ["problem", "algo", "runs", "vus", "gini", "hypervolume", "wall_ms"];
        let widths: Vec<usize> = (0..7)
            .map(|c| cells.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
            .collect();
        let line = |row: &[&str]| {
            let mut s = row
                .iter()
                .zip(&widths)
                .map(|(v, w)| format!("{v:<w$}"))
                .collect::<Vec<_>>()
                .join("  ");
            s.truncate(s.trim_end().len());
            s + "\n"
        };
        let mut out = line(&header);
        for r in &cells {
            out += &line(&r.iter().map(String::as_str).collect::<Vec<_>>());
        }
        out
    }
}

/// Aggregates the `runs.csv` of every directory, grouped by problem and
/// algorithm in order of first appearance.
pub fn emit_report<P: AsRef<Path>>(dirs: &[P]) -> Result<Report, HarnessError> {
    if dirs.is_empty() {
        return Err(HarnessError::Config("no experiment directories given".into()));
    }
    let mut groups: Vec<((String, String), Vec<RunRow>)> = Vec::new();
    for dir in dirs {
        let path = dir.as_ref().join("runs.csv");
        let rows = read_runs(&path)?;
        if rows.is_empty() {
            return Err(HarnessError::schema(&path, "no runs recorded"));
        }
        for row in rows {
            let key = (row.problem.clone(), row.algo.clone());
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, g)) => g.push(row),
                None => groups.push((key, vec![row])),
            }
        }
    }
    let rows = groups
        .into_iter()
        .map(|((problem, algo), g)| {
            let stat = |f: fn(&RunRow) -> f64| summarize(&g.iter().map(f).collect::<Vec<_>>()).expect("group is non-empty");
            ReportRow {
                problem,
                algo,
                runs: g.len(),
                vus: stat(|r| r.vus),
                gini: stat(|r| r.gini),
                hypervolume: stat(|r| r.hypervolume),
                wall_ms: stat(|r| r.wall_ms as f64),
            }
        })
        .collect();
    Ok(Report { rows })
}

/// VUS of a point set next to an independent Monte-Carlo estimate of the
/// same region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub problem: String,
    pub samples: usize,
    pub front_vus: f64,
    pub mc_volume: f64,
    pub mc_std_error: f64,
    pub mc_samples: usize,
    /// `front_vus - mc_volume`.
    pub gap: f64,
}

/// Samples `samples` points of the true front of a benchmark problem and
/// checks their VUS against [`ORACLE_MC_SAMPLES`] membership samples.
pub fn oracle_vus(problem: &Problem, samples: usize, seed: u64) -> Result<OracleReport, HarnessError> {
    if samples == 0 {
        return Err(HarnessError::Config("oracle needs at least one sample".into()));
    }
    let front = sample_true_front(problem, samples, seed)?;
    let mut report = oracle_for_points(&front, problem.roc_space(), ORACLE_MC_SAMPLES, seed, Execution::default());
    report.problem = problem.to_string();
    Ok(report)
}

/// [`oracle_vus`] for an explicit point set.
pub fn oracle_for_points(
    points: &[ObjectiveVector],
    space: &RocSpace,
    mc_samples: usize,
    seed: u64,
    exec: Execution,
) -> OracleReport {
    let front_vus = vus(points, space);
    let (mc_volume, mc_std_error) = mc_membership_volume(points, space, mc_samples, seed, exec);
    OracleReport {
        problem: String::new(),
        samples: points.len(),
        front_vus,
        mc_volume,
        mc_std_error,
        mc_samples,
        gap: front_vus - mc_volume,
    }
}

/// Lower surface of an upward-closed convex body in the unit cube, bucketed
/// on a grid over its `(x, y)` projection.
struct LowerSurface {
    planes: Vec<(ObjectiveVector, f64)>,
    corners: Vec<[[f64; 2]; 3]>,
    grid: usize,
    buckets: Vec<Vec<u32>>,
}

impl LowerSurface {
    fn new(points: &[ObjectiveVector], grid: usize) -> Self {
        let hull = quickhull(points);
        let mut surface = Self {
            planes: Vec::new(),
            corners: Vec::new(),
            grid,
            buckets: vec![Vec::new(); grid * grid],
        };
        if hull.is_degenerate() {
            return surface;
        }
        let cell = |x: f64| ((x * grid as f64).floor().max(0.0) as usize).min(grid - 1);
        for f in hull.facets().iter().filter(|f| f.normal[2] < -1e-12) {
            let tri = f.vertices.map(|v| {
                let p = hull.vertices()[v];
                [p[0], p[1]]
            });
            let id = surface.planes.len() as u32;
            surface.planes.push((f.normal, f.offset));
            surface.corners.push(tri);
            let (x0, x1) = (tri.iter().map(|t| t[0]).fold(f64::INFINITY, f64::min), tri.iter().map(|t| t[0]).fold(f64::NEG_INFINITY, f64::max));
            let (y0, y1) = (tri.iter().map(|t| t[1]).fold(f64::INFINITY, f64::min), tri.iter().map(|t| t[1]).fold(f64::NEG_INFINITY, f64::max));
            for gx in cell(x0)..=cell(x1) {
                for gy in cell(y0)..=cell(y1) {
                    surface.buckets[gx * grid + gy].push(id);
                }
            }
        }
        surface
    }

    /// Height of the lower surface above `(x, y)`, if the projection covers it.
    fn height(&self, x: f64, y: f64) -> Option<f64> {
        let cell = |v: f64| ((v * self.grid as f64).floor().max(0.0) as usize).min(self.grid - 1);
        self.buckets[cell(x) * self.grid + cell(y)].iter().find_map(|&id| {
            let [a, b, c] = self.corners[id as usize];
            let cross = |p: [f64; 2], q: [f64; 2]| (q[0] - p[0]) * (y - p[1]) - (q[1] - p[1]) * (x - p[0]);
            let (d1, d2, d3) = (cross(a, b), cross(b, c), cross(c, a));
            let inside = (d1 >= -1e-15 && d2 >= -1e-15 && d3 >= -1e-15) || (d1 <= 1e-15 && d2 <= 1e-15 && d3 <= 1e-15);
            inside.then(|| {
                let (n, off) = self.planes[id as usize];
                (off - n[0] * x - n[1] * y) / n[2]
            })
        })
    }
}

/// Monte-Carlo volume of the feasible part of the dominated closure of
/// `points` and the reference points, with its standard error.
///
/// Works on objectives mapped to min sense, where the closure is the convex
/// hull of every pushed copy of every point and is upward closed: a uniform
/// sample belongs to it exactly when it lies on or above the hull's lower
/// surface. The hull is built from the full push set, not the reduced
/// generating set used by the VUS itself. Samples are split into fixed
/// chunks, each with its own ChaCha stream, so the estimate does not depend
/// on the execution mode.
pub fn mc_membership_volume(
    points: &[ObjectiveVector],
    space: &RocSpace,
    mc_samples: usize,
    seed: u64,
    exec: Execution,
) -> (f64, f64) {
    const CHUNKS: usize = 64;
    if mc_samples == 0 {
        return (0.0, 0.0);
    }
    let sense = space.sense();
    let mapped: Vec<ObjectiveVector> = points
        .iter()
        .chain(space.references())
        .map(|p| sense.to_min(&p.clamp_unit()))
        .collect();
    let surface = LowerSurface::new(&dominated_closure_vertices(&mapped, Sense::Min), 256);
    let feasible = space.feasible();

    let hits: Vec<usize> = map_indexed(CHUNKS, exec, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1 + c as u64);
        let n = mc_samples / CHUNKS + usize::from(c < mc_samples % CHUNKS);
        (0..n)
            .filter(|_| {
                let q = ObjectiveVector::new(rng.gen(), rng.gen(), rng.gen());
                feasible.contains(&sense.to_min(&q)) && surface.height(q[0], q[1]).is_some_and(|h| q[2] >= h)
            })
            .count()
    });
    let p = hits.iter().sum::<usize>() as f64 / mc_samples as f64;
    (p, (p * (1.0 - p) / mc_samples as f64).sqrt())
}
