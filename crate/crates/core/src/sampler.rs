//! Binomial shot sampling and the two witness estimators.
//!
//! An experiment is a list of jobs. Each job runs the 20 circuits
//! `(k, j)` for a number of repetitions, each repetition with a fixed number
//! of shots, and reports per circuit how many shots gave the measured
//! outcome. Which of the two readout outcomes is counted does not matter
//! for `|W|`: replacing a measurement row by one minus itself only flips the
//! sign of the determinant.
//!
//! Two estimators are offered: per job (witness of each job's matrix, then
//! the mean) and pooled (counts summed over all jobs, then one witness).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::distr::Distribution;
use rand_distr::Binomial;

use crate::math::sqrt;
use crate::seed;
use crate::witness::{witness_variance_cells, ProbMatrix, MEAS_ROWS};
use crate::{Error, Result};

/// Number of circuits per repetition, `4 × 5`.
pub const CIRCUITS: usize = 20;

/// Position of circuit `(k, j)` in a repetition, row-major.
pub fn cell_index(k: usize, j: usize) -> usize {
    k * 5 + j
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExperimentPlan {
    pub n_jobs: usize,
    pub shots: u64,
    pub repetitions: usize,
    pub seed: u64,
}

impl ExperimentPlan {
    pub fn new(n_jobs: usize, shots: u64, repetitions: usize, seed: u64) -> Result<Self> {
        if n_jobs == 0 || shots == 0 || repetitions == 0 {
            return Err(Error::domain("jobs, shots and repetitions must all be positive"));
        }
        Ok(ExperimentPlan {
            n_jobs,
            shots,
            repetitions,
            seed,
        })
    }

    /// `T = jobs · shots · repetitions`.
    pub fn total_per_cell(&self) -> u64 {
        self.n_jobs as u64 * self.shots * self.repetitions as u64
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        ExperimentPlan { seed, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CellCount {
    pub ones: u64,
    pub shots: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobRecord {
    pub job_id: String,
    pub shots: u64,
    pub repetitions: usize,
    /// One entry per repetition, 20 circuits each in row-major `(k, j)`.
    pub counts: Vec<[CellCount; CIRCUITS]>,
}

impl JobRecord {
    /// Counts summed over repetitions, as `(ones, shots)` per cell.
    pub fn totals(&self) -> (CellTotals, CellTotals) {
        let mut ones = [[0u64; 5]; 4];
        let mut shots = [[0u64; 5]; 4];
        for rep in &self.counts {
            for k in 0..MEAS_ROWS {
                for j in 0..5 {
                    let c = rep[cell_index(k, j)];
                    ones[k][j] += c.ones;
                    shots[k][j] += c.shots;
                }
            }
        }
        (ones, shots)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentRecord {
    pub config_id: String,
    pub device: String,
    pub timestamp: Option<String>,
    pub jobs: Vec<JobRecord>,
}

impl ExperimentRecord {
    /// Checks count ranges and repetition lengths; the error names the
    /// first offending field.
    pub fn validate(&self) -> Result<()> {
        if self.jobs.is_empty() {
            return Err(Error::domain("jobs: at least one job is required"));
        }
        for (n, job) in self.jobs.iter().enumerate() {
            if job.counts.len() != job.repetitions {
                return Err(Error::domain(format!(
                    "jobs[{n}].counts: {} repetitions listed, {} declared",
                    job.counts.len(),
                    job.repetitions
                )));
            }
            for (r, rep) in job.counts.iter().enumerate() {
                for (i, c) in rep.iter().enumerate() {
                    if c.ones > c.shots {
                        return Err(Error::domain(format!(
                            "jobs[{n}].counts[{r}][{i}]: {} ones out of {} shots",
                            c.ones, c.shots
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn clamp_prob(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

fn sample_job(job: usize, truth: &ProbMatrix, plan: &ExperimentPlan) -> Result<JobRecord> {
    let mut rng = seed::task_rng(plan.seed, seed::stream::JOB, job as u64);
    let mut dists = Vec::with_capacity(CIRCUITS);
    for k in 0..MEAS_ROWS {
        for j in 0..5 {
            let d = Binomial::new(plan.shots, clamp_prob(truth.get(k, j)))
                .map_err(|e| Error::domain(format!("binomial: {e}")))?;
            dists.push(d);
        }
    }
    let counts = (0..plan.repetitions)
        .map(|_| {
            core::array::from_fn(|i| CellCount {
                ones: dists[i].sample(&mut rng),
                shots: plan.shots,
            })
        })
        .collect();
    Ok(JobRecord {
        job_id: format!("job-{job:04}"),
        shots: plan.shots,
        repetitions: plan.repetitions,
        counts,
    })
}

/// Simulates a record. Job `n` samples from `per_job[n]` when given, else
/// from `true_p`. Each job draws from its own generator seeded by
/// `(plan.seed, n)`.
pub fn simulate_record(
    config_id: &str,
    true_p: &ProbMatrix,
    plan: &ExperimentPlan,
    per_job: Option<&[ProbMatrix]>,
) -> Result<ExperimentRecord> {
    if let Some(list) = per_job {
        if list.len() != plan.n_jobs {
            return Err(Error::domain(format!(
                "{} per-job matrices for {} jobs",
                list.len(),
                plan.n_jobs
            )));
        }
    }
    let jobs = (0..plan.n_jobs)
        .map(|n| sample_job(n, per_job.map_or(true_p, |l| &l[n]), plan))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentRecord {
        config_id: config_id.into(),
        device: "simulator".into(),
        timestamp: None,
        jobs,
    })
}

/// Simulates a single job of a plan, for drivers that run jobs in parallel.
pub fn simulate_job(job: usize, truth: &ProbMatrix, plan: &ExperimentPlan) -> Result<JobRecord> {
    sample_job(job, truth, plan)
}

/// Empirical matrix from summed counts. `None` if a cell has no shots.
pub fn empirical_matrix(ones: &CellTotals, shots: &CellTotals) -> Option<ProbMatrix> {
    if shots.iter().flatten().any(|&s| s == 0) {
        return None;
    }
    let rows: [[f64; 5]; 4] =
        core::array::from_fn(|k| core::array::from_fn(|j| ones[k][j] as f64 / shots[k][j] as f64));
    ProbMatrix::from_measurement_rows(rows).ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    PerJob,
    Pooled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorOutput {
    pub method: Method,
    pub w_mean: f64,
    /// Standard error of `w_mean`; `None` when it cannot be formed (a single
    /// job for the per-job method, a deterministic matrix for pooling).
    pub w_stderr: Option<f64>,
    /// Witness of each included job (per-job method) or the single pooled
    /// value.
    pub per_job_w: Vec<f64>,
    /// Record indices of the jobs that entered the estimate.
    pub included_jobs: Vec<usize>,
    pub warnings: Vec<String>,
}

impl EstimatorOutput {
    pub fn z(&self) -> Option<f64> {
        self.w_stderr.filter(|&s| s > 0.0).map(|s| self.w_mean / s)
    }
}

/// Per-cell shot or ones totals over the measurement rows.
pub type CellTotals = [[u64; 5]; 4];

/// Record index, empirical matrix and shot totals of one usable job.
pub type JobMatrix = (usize, ProbMatrix, CellTotals);

/// Usable jobs with their empirical matrices and per-cell totals.
pub fn job_matrices(record: &ExperimentRecord) -> (Vec<JobMatrix>, Vec<String>) {
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for (n, job) in record.jobs.iter().enumerate() {
        let (ones, shots) = job.totals();
        match empirical_matrix(&ones, &shots) {
            Some(p) => out.push((n, p, shots)),
            None => warnings.push(format!(
                "job {n} ({}) has a circuit with no shots; excluded",
                job.job_id
            )),
        }
    }
    (out, warnings)
}

/// Witness of each job's matrix, then the mean.
pub fn estimate_per_job(record: &ExperimentRecord) -> Result<EstimatorOutput> {
    let (jobs, warnings) = job_matrices(record);
    if jobs.is_empty() {
        return Err(Error::domain("no job has shots in every circuit"));
    }
    let per_job_w: Vec<f64> = jobs.iter().map(|(_, p, _)| p.witness()).collect();
    let n = per_job_w.len() as f64;
    // shifted by the first value, so identical jobs give that value back exactly
    let shift = per_job_w[0];
    let mean = shift + per_job_w.iter().map(|w| w - shift).sum::<f64>() / n;
    let stderr = (per_job_w.len() > 1).then(|| {
        let var = per_job_w.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>() / (n - 1.0);
        sqrt(var / n)
    });
    Ok(EstimatorOutput {
        method: Method::PerJob,
        w_mean: mean,
        w_stderr: stderr,
        per_job_w,
        included_jobs: jobs.iter().map(|(i, _, _)| *i).collect(),
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PooledCounts {
    pub matrix: ProbMatrix,
    pub shots: CellTotals,
    /// Record indices of the jobs that were summed.
    pub included: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Counts of all usable jobs summed per cell.
pub fn pooled_counts(record: &ExperimentRecord) -> Result<PooledCounts> {
    let mut ones = [[0u64; 5]; 4];
    let mut shots = [[0u64; 5]; 4];
    let mut included = Vec::new();
    let mut warnings = Vec::new();
    for (n, job) in record.jobs.iter().enumerate() {
        let (o, s) = job.totals();
        if s.iter().flatten().any(|&x| x == 0) {
            warnings.push(format!(
                "job {n} ({}) has a circuit with no shots; excluded",
                job.job_id
            ));
            continue;
        }
        for k in 0..MEAS_ROWS {
            for j in 0..5 {
                ones[k][j] += o[k][j];
                shots[k][j] += s[k][j];
            }
        }
        included.push(n);
    }
    let p = empirical_matrix(&ones, &shots).ok_or_else(|| Error::domain("no job has shots in every circuit"))?;
    Ok(PooledCounts {
        matrix: p,
        shots,
        included,
        warnings,
    })
}

/// Witness of the matrix pooled over all jobs, with the leading-order
/// standard deviation for the pooled counts.
pub fn estimate_pooled(record: &ExperimentRecord) -> Result<EstimatorOutput> {
    let PooledCounts {
        matrix: p,
        shots,
        included,
        warnings,
    } = pooled_counts(record)?;
    let w = p.witness();
    let var = witness_variance_cells(&p, &shots)?;
    Ok(EstimatorOutput {
        method: Method::Pooled,
        w_mean: w,
        w_stderr: (var > 0.0).then(|| sqrt(var)),
        per_job_w: alloc::vec![w],
        included_jobs: included,
        warnings,
    })
}

/// Mean per-job and pooled witness for one replication of a plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replication {
    pub per_job_mean: f64,
    pub pooled: f64,
}

/// Runs replication `index` of a study; the plan's own seed is replaced by
/// one derived from `(master_seed, index)`.
pub fn replicate(true_p: &ProbMatrix, plan: &ExperimentPlan, master_seed: u64, index: u64) -> Result<Replication> {
    let plan = plan.with_seed(seed::derive(master_seed, seed::stream::REPLICATION, index));
    let record = simulate_record("", true_p, &plan, None)?;
    Ok(Replication {
        per_job_mean: estimate_per_job(&record)?.w_mean,
        pooled: estimate_pooled(&record)?.w_mean,
    })
}

/// Mean and standard error of a sample.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, sqrt(var / n))
}

/// One row of the estimator bias study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasRow {
    pub plan: ExperimentPlan,
    pub replications: usize,
    pub per_job_bias: f64,
    pub per_job_stderr: f64,
    pub pooled_bias: f64,
    pub pooled_stderr: f64,
}

impl BiasRow {
    pub fn from_replications(plan: ExperimentPlan, reps: &[Replication]) -> Self {
        let per_job: Vec<f64> = reps.iter().map(|r| r.per_job_mean).collect();
        let pooled: Vec<f64> = reps.iter().map(|r| r.pooled).collect();
        let (pj, pj_se) = mean_and_stderr(&per_job);
        let (po, po_se) = mean_and_stderr(&pooled);
        BiasRow {
            plan,
            replications: reps.len(),
            per_job_bias: pj,
            per_job_stderr: pj_se,
            pooled_bias: po,
            pooled_stderr: po_se,
        }
    }
}

/// Bias of both estimators on a qubit truth for each plan in a grid. The
/// true witness must vanish, so the mean estimate is the bias.
pub fn estimator_bias_study(
    true_p: &ProbMatrix,
    plan_grid: &[ExperimentPlan],
    replications: usize,
    seed: u64,
) -> Result<Vec<BiasRow>> {
    if true_p.witness().abs() > 1e-10 {
        return Err(Error::domain("bias study needs a truth with zero witness"));
    }
    if replications == 0 {
        return Err(Error::domain("at least one replication is required"));
    }
    plan_grid
        .iter()
        .enumerate()
        .map(|(g, plan)| {
            let study_seed = seed::derive(seed, g as u64, plan.seed);
            let reps = (0..replications as u64)
                .map(|r| replicate(true_p, plan, study_seed, r))
                .collect::<Result<Vec<_>>>()?;
            Ok(BiasRow::from_replications(*plan, &reps))
        })
        .collect()
}
