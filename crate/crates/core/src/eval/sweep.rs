//! Sweep experiment drivers.
//!
//! Three canned experiments: repair quality over a noise grid, query-count
//! scaling over instance sizes, and the majority-vote error grid. Cells are
//! independent and dispatch through the execution backend; all randomness is
//! derived from the sweep's base seed, so results are reproducible regardless
//! of scheduling.

use super::{metrics, pairwise_baseline, EvalError};
use crate::datagen::{generate_batch, GenConfig, Instance, PatternKind};
use crate::oracle::{
    binomial_majority_error, hoeffding_majority_bound, mc_majority_error, MajorityOracle,
    NoiseParams, NoisyOracle, Oracle, OracleError, PerfectOracle, VoteParams,
};
use crate::repair::{qxr, query_budget, RepairPolicy};
use crate::seeding::{derive, derive2};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::str::FromStr;

const INSTANCE_STREAM: u64 = 0x51EE;
const ORACLE_STREAM: u64 = 0x0A1C;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    Qxr,
    Pairwise,
}

impl AlgorithmKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Qxr => "qxr",
            AlgorithmKind::Pairwise => "pairwise",
        }
    }
}

impl FromStr for AlgorithmKind {
    type Err = String;

    fn from_str(s: &str) -> Result<AlgorithmKind, String> {
        match s {
            "qxr" => Ok(AlgorithmKind::Qxr),
            "pairwise" => Ok(AlgorithmKind::Pairwise),
            other => Err(format!("unknown algorithm {other:?}; expected qxr or pairwise")),
        }
    }
}

/// One oracle configuration in a sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub alpha: f64,
    pub beta: f64,
    pub repetitions: u32,
}

impl NoiseSpec {
    pub fn perfect() -> NoiseSpec {
        NoiseSpec { alpha: 0.0, beta: 0.0, repetitions: 1 }
    }

    pub fn is_perfect(&self) -> bool {
        self.alpha == 0.0 && self.beta == 0.0
    }

    /// Stack the configured wrappers over the perfect oracle.
    pub fn build(&self, seed: u64) -> Result<Box<dyn Oracle>, OracleError> {
        if self.is_perfect() && self.repetitions == 1 {
            return Ok(Box::new(PerfectOracle::new()));
        }
        let noisy =
            NoisyOracle::new(PerfectOracle::new(), NoiseParams::new(self.alpha, self.beta, seed)?);
        if self.repetitions == 1 {
            Ok(Box::new(noisy))
        } else {
            Ok(Box::new(MajorityOracle::new(noisy, VoteParams::new(self.repetitions)?)))
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepairSweepSpec {
    pub base_seed: u64,
    pub instances_per_cell: usize,
    pub gen: GenConfig,
    pub noise_grid: Vec<NoiseSpec>,
    pub algorithms: Vec<AlgorithmKind>,
    pub policy: RepairPolicy,
}

/// One row per (oracle configuration, algorithm, instance). Column order is
/// the field order here.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub cell: usize,
    pub algorithm: String,
    pub instance: u64,
    pub n_facts: usize,
    pub m_scopes: usize,
    pub alpha: f64,
    pub beta: f64,
    pub repetitions: u32,
    pub pattern_mix: String,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub rounds: Option<usize>,
    pub queries: Option<u64>,
    pub converged: Option<bool>,
    pub max_mus_size: Option<usize>,
    pub within_query_budget: Option<bool>,
    pub error: Option<String>,
}

/// Per-cell aggregate with standard errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryRow {
    pub cell: usize,
    pub algorithm: String,
    pub alpha: f64,
    pub beta: f64,
    pub repetitions: u32,
    pub instances: usize,
    pub failures: usize,
    pub mean_precision: f64,
    pub se_precision: f64,
    pub mean_recall: f64,
    pub se_recall: f64,
    pub mean_f1: f64,
    pub se_f1: f64,
    pub mean_queries: f64,
    pub se_queries: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepairSweepOutput {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SummaryRow>,
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn run_one(
    algorithm: AlgorithmKind,
    instance: &Instance,
    noise: &NoiseSpec,
    policy: &RepairPolicy,
    oracle_seed: u64,
) -> Result<SweepRowOutcome, EvalError> {
    let oracle = noise.build(oracle_seed)?;
    match algorithm {
        AlgorithmKind::Qxr => {
            let result = qxr(oracle.as_ref(), &instance.facts, &instance.scopes, policy, None)?;
            let m = metrics(&result.surviving, &instance.gold_consistent)?;
            let budget = query_budget(
                result.scope_evaluations,
                instance.scopes.len(),
                result.max_mus_size(),
                instance.n_facts(),
            );
            Ok(SweepRowOutcome {
                precision: m.precision,
                recall: m.recall,
                f1: m.f1,
                rounds: result.rounds,
                queries: result.stats.total_calls,
                converged: result.converged,
                max_mus_size: result.max_mus_size(),
                within_query_budget: Some(result.stats.total_calls <= budget),
            })
        }
        AlgorithmKind::Pairwise => {
            let outcome = pairwise_baseline(oracle.as_ref(), &instance.facts)?;
            let m = metrics(&outcome.surviving, &instance.gold_consistent)?;
            Ok(SweepRowOutcome {
                precision: m.precision,
                recall: m.recall,
                f1: m.f1,
                rounds: 0,
                queries: outcome.queries,
                converged: true,
                max_mus_size: 0,
                within_query_budget: None,
            })
        }
    }
}

struct SweepRowOutcome {
    precision: f64,
    recall: f64,
    f1: f64,
    rounds: usize,
    queries: u64,
    converged: bool,
    max_mus_size: usize,
    within_query_budget: Option<bool>,
}

/// Run every (noise, algorithm) cell over a shared instance suite.
/// Per-instance failures land in their row's `error` column; the sweep
/// continues.
pub fn run_repair_sweep(spec: &RepairSweepSpec) -> Result<RepairSweepOutput, EvalError> {
    if spec.noise_grid.is_empty() || spec.algorithms.is_empty() {
        return Err(EvalError::Config("noise grid and algorithm list must be nonempty".into()));
    }
    if spec.instances_per_cell == 0 {
        return Err(EvalError::Config("instances_per_cell must be positive".into()));
    }
    let instances = generate_batch(
        &spec.gen,
        spec.instances_per_cell,
        derive(spec.base_seed, INSTANCE_STREAM),
    )?;

    let cells: Vec<(usize, NoiseSpec, AlgorithmKind)> = spec
        .noise_grid
        .iter()
        .enumerate()
        .flat_map(|(cell, noise)| {
            spec.algorithms.iter().map(move |algo| (cell, *noise, *algo))
        })
        .collect();

    let tasks = cells.len() * instances.len();
    let rows: Vec<SweepRow> = crate::exec::run_indexed(tasks, |task| {
        let (cell, noise, algorithm) = cells[task / instances.len()];
        let instance = &instances[task % instances.len()];
        let oracle_seed = derive2(
            derive2(spec.base_seed, ORACLE_STREAM, cell as u64),
            instance.id,
            algorithm as u64,
        );
        let outcome = run_one(algorithm, instance, &noise, &spec.policy, oracle_seed);
        let mut row = SweepRow {
            cell,
            algorithm: algorithm.name().to_string(),
            instance: instance.id,
            n_facts: instance.n_facts(),
            m_scopes: instance.scopes.len(),
            alpha: noise.alpha,
            beta: noise.beta,
            repetitions: noise.repetitions,
            pattern_mix: spec.gen.pattern_mix(),
            precision: None,
            recall: None,
            f1: None,
            rounds: None,
            queries: None,
            converged: None,
            max_mus_size: None,
            within_query_budget: None,
            error: None,
        };
        match outcome {
            Ok(o) => {
                row.precision = Some(o.precision);
                row.recall = Some(o.recall);
                row.f1 = Some(o.f1);
                row.rounds = Some(o.rounds);
                row.queries = Some(o.queries);
                row.converged = Some(o.converged);
                row.max_mus_size = Some(o.max_mus_size);
                row.within_query_budget = o.within_query_budget;
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        row
    });

    let mut summary = Vec::new();
    for (cell, noise, algorithm) in spec
        .noise_grid
        .iter()
        .enumerate()
        .flat_map(|(cell, noise)| {
            spec.algorithms.iter().map(move |algo| (cell, *noise, *algo))
        })
    {
        let cell_rows: Vec<&SweepRow> = rows
            .iter()
            .filter(|r| r.cell == cell && r.algorithm == algorithm.name())
            .collect();
        let ok_rows: Vec<&&SweepRow> = cell_rows.iter().filter(|r| r.error.is_none()).collect();
        let collect = |f: fn(&SweepRow) -> Option<f64>| -> Vec<f64> {
            ok_rows.iter().filter_map(|r| f(r)).collect()
        };
        let (mean_precision, se_precision) = mean_se(&collect(|r| r.precision));
        let (mean_recall, se_recall) = mean_se(&collect(|r| r.recall));
        let (mean_f1, se_f1) = mean_se(&collect(|r| r.f1));
        let (mean_queries, se_queries) = mean_se(&collect(|r| r.queries.map(|q| q as f64)));
        summary.push(SummaryRow {
            cell,
            algorithm: algorithm.name().to_string(),
            alpha: noise.alpha,
            beta: noise.beta,
            repetitions: noise.repetitions,
            instances: cell_rows.len(),
            failures: cell_rows.len() - ok_rows.len(),
            mean_precision,
            se_precision,
            mean_recall,
            se_recall,
            mean_f1,
            se_f1,
            mean_queries,
            se_queries,
        });
    }

    Ok(RepairSweepOutput { rows, summary })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingSweepSpec {
    pub base_seed: u64,
    pub sizes: Vec<usize>,
    pub instances_per_size: usize,
    pub planted: Vec<(PatternKind, usize)>,
    pub policy: RepairPolicy,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n_facts: usize,
    pub instance: u64,
    pub algorithm: String,
    pub queries: u64,
    pub within_query_budget: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n_facts: usize,
    pub algorithm: String,
    pub instances: usize,
    pub mean_queries: f64,
    pub se_queries: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingOutput {
    pub rows: Vec<ScalingRow>,
    pub points: Vec<ScalingPoint>,
}

/// Query-count scaling under the perfect oracle: adaptive repair against the
/// all-pairs baseline over growing instance sizes.
pub fn run_scaling_sweep(spec: &ScalingSweepSpec) -> Result<ScalingOutput, EvalError> {
    if spec.sizes.is_empty() {
        return Err(EvalError::Config("size grid must be nonempty".into()));
    }
    if spec.instances_per_size == 0 {
        return Err(EvalError::Config("instances_per_size must be positive".into()));
    }

    let mut suites: Vec<(usize, Vec<Instance>)> = Vec::new();
    for (index, &n_facts) in spec.sizes.iter().enumerate() {
        let gen = GenConfig {
            n_facts,
            planted: spec.planted.clone(),
            ..GenConfig::default()
        };
        let suite = generate_batch(
            &gen,
            spec.instances_per_size,
            derive2(spec.base_seed, INSTANCE_STREAM, index as u64),
        )?;
        suites.push((n_facts, suite));
    }

    let flat: Vec<(usize, &Instance)> = suites
        .iter()
        .flat_map(|(n, suite)| suite.iter().map(move |i| (*n, i)))
        .collect();
    let results: Vec<Result<Vec<ScalingRow>, EvalError>> =
        crate::exec::run_indexed(flat.len(), |task| {
            let (n_facts, instance) = flat[task];
            let perfect = PerfectOracle::new();
            let repair =
                qxr(&perfect, &instance.facts, &instance.scopes, &spec.policy, None)?;
            let budget = query_budget(
                repair.scope_evaluations,
                instance.scopes.len(),
                repair.max_mus_size(),
                instance.n_facts(),
            );
            let pairwise = pairwise_baseline(&PerfectOracle::new(), &instance.facts)?;
            Ok(vec![
                ScalingRow {
                    n_facts,
                    instance: instance.id,
                    algorithm: AlgorithmKind::Qxr.name().to_string(),
                    queries: repair.stats.total_calls,
                    within_query_budget: Some(repair.stats.total_calls <= budget),
                },
                ScalingRow {
                    n_facts,
                    instance: instance.id,
                    algorithm: AlgorithmKind::Pairwise.name().to_string(),
                    queries: pairwise.queries,
                    within_query_budget: None,
                },
            ])
        });
    let mut rows = Vec::new();
    for result in results {
        rows.extend(result?);
    }

    let mut points = Vec::new();
    for &n_facts in &spec.sizes {
        for algorithm in [AlgorithmKind::Qxr, AlgorithmKind::Pairwise] {
            let queries: Vec<f64> = rows
                .iter()
                .filter(|r| r.n_facts == n_facts && r.algorithm == algorithm.name())
                .map(|r| r.queries as f64)
                .collect();
            let (mean_queries, se_queries) = mean_se(&queries);
            points.push(ScalingPoint {
                n_facts,
                algorithm: algorithm.name().to_string(),
                instances: queries.len(),
                mean_queries,
                se_queries,
            });
        }
    }
    Ok(ScalingOutput { rows, points })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseGridSpec {
    pub base_seed: u64,
    pub eps_grid: Vec<f64>,
    pub repetitions_grid: Vec<u32>,
    pub trials: usize,
}

/// One (eps, repetitions) cell of the majority-vote error grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseGridRow {
    pub eps: f64,
    pub repetitions: u32,
    pub trials: usize,
    pub empirical_error: f64,
    pub exact_error: f64,
    pub hoeffding_bound: f64,
    pub standard_error: f64,
    pub within_three_se: bool,
    pub under_bound: bool,
}

/// Monte Carlo majority error against the exact binomial tail and the
/// Hoeffding bound, per grid cell.
pub fn run_noise_grid(spec: &NoiseGridSpec) -> Result<Vec<NoiseGridRow>, EvalError> {
    if spec.eps_grid.is_empty() || spec.repetitions_grid.is_empty() {
        return Err(EvalError::Config("noise grid must be nonempty".into()));
    }
    if spec.trials == 0 {
        return Err(EvalError::Config("trials must be positive".into()));
    }
    for &eps in &spec.eps_grid {
        if !(0.0..0.5).contains(&eps) {
            return Err(EvalError::Config(format!("eps {eps} outside [0, 1/2)")));
        }
    }
    for &r in &spec.repetitions_grid {
        if r == 0 || r % 2 == 0 {
            return Err(EvalError::Config(format!("repetitions {r} must be odd")));
        }
    }

    let mut rows = Vec::new();
    for (ei, &eps) in spec.eps_grid.iter().enumerate() {
        for (ri, &repetitions) in spec.repetitions_grid.iter().enumerate() {
            let seed = derive2(spec.base_seed, ei as u64, ri as u64);
            let empirical = mc_majority_error(eps, repetitions, spec.trials, seed);
            let exact = binomial_majority_error(repetitions, eps);
            let bound = hoeffding_majority_bound(repetitions, eps);
            let standard_error = (exact * (1.0 - exact) / spec.trials as f64).sqrt();
            rows.push(NoiseGridRow {
                eps,
                repetitions,
                trials: spec.trials,
                empirical_error: empirical,
                exact_error: exact,
                hoeffding_bound: bound,
                standard_error,
                within_three_se: (empirical - exact).abs() <= 3.0 * standard_error + 1e-12,
                under_bound: empirical <= bound + 3.0 * standard_error + 1e-12,
            });
        }
    }
    Ok(rows)
}

/// Serialize rows to CSV with headers, atomically.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), EvalError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let buffer = writer.into_inner().map_err(|e| EvalError::Config(e.to_string()))?;
    let io_err = |source: std::io::Error| EvalError::Io {
        path: path.display().to_string(),
        source,
    };
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, buffer).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)
}

/// Plot-data file for the scaling figure: one line per instance size with
/// the mean query count of each algorithm.
pub fn write_scaling_plot(path: &Path, points: &[ScalingPoint]) -> Result<(), EvalError> {
    let mut sizes: Vec<usize> = points.iter().map(|p| p.n_facts).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut out = String::from("n_facts,qxr_mean_queries,pairwise_mean_queries\n");
    for n in sizes {
        let pick = |algo: &str| {
            points
                .iter()
                .find(|p| p.n_facts == n && p.algorithm == algo)
                .map(|p| p.mean_queries)
                .unwrap_or(f64::NAN)
        };
        out.push_str(&format!("{n},{},{}\n", pick("qxr"), pick("pairwise")));
    }
    let io_err = |source: std::io::Error| EvalError::Io {
        path: path.display().to_string(),
        source,
    };
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, out).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)
}
