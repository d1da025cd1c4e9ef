//! Parallel versions of the core loops. Every task seeds its own generator
//! from the master seed and its index, so results do not depend on the
//! thread count or scheduling.

use dimwit_core::extremal::{run_restart, select_best, SearchOptions};
use dimwit_core::noise::{drift_bound, generate_drift_ensemble_with, pooled_witness, DriftModel};
use dimwit_core::sampler::{replicate, simulate_job, BiasRow, Replication};
use dimwit_core::seed;
use dimwit_core::{ConfigSet, ExperimentPlan, ExperimentRecord, ExtremalProblem, ProbMatrix, SearchResult};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub fn maximize_witness(problem: &ExtremalProblem, restarts: usize, seed: u64) -> Result<SearchResult> {
    if restarts == 0 {
        return Err(Error::Usage("at least one restart is required".into()));
    }
    let opts = SearchOptions::default();
    let outcomes = (0..restarts)
        .into_par_iter()
        .map(|i| run_restart(problem, seed, i, &opts))
        .collect();
    Ok(select_best(outcomes)?)
}

/// Simulates a record with job `n` drawn from `truths[n]`, or from
/// `truths[0]` for every job when a single matrix is given.
pub fn simulate_record(config_id: &str, truths: &[ProbMatrix], plan: &ExperimentPlan) -> Result<ExperimentRecord> {
    if truths.len() != 1 && truths.len() != plan.n_jobs {
        return Err(Error::Usage(format!(
            "{} job matrices for {} jobs",
            truths.len(),
            plan.n_jobs
        )));
    }
    let jobs = (0..plan.n_jobs)
        .into_par_iter()
        .map(|n| simulate_job(n, &truths[if truths.len() == 1 { 0 } else { n }], plan))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExperimentRecord {
        config_id: config_id.into(),
        device: "simulator".into(),
        timestamp: None,
        jobs,
    })
}

pub fn replications(true_p: &ProbMatrix, plan: &ExperimentPlan, seed: u64, count: usize) -> Result<Vec<Replication>> {
    Ok((0..count as u64)
        .into_par_iter()
        .map(|i| replicate(true_p, plan, seed, i))
        .collect::<Result<Vec<_>, _>>()?)
}

/// Bias of both estimators for each plan; replications of plan `g` use the
/// master seed derived for index `g`.
pub fn bias_study(true_p: &ProbMatrix, plans: &[ExperimentPlan], count: usize, seed: u64) -> Result<Vec<BiasRow>> {
    if true_p.witness().abs() > 1e-10 {
        return Err(Error::Usage("bias study needs a truth with zero witness".into()));
    }
    plans
        .iter()
        .enumerate()
        .map(|(g, plan)| {
            let reps = replications(
                true_p,
                plan,
                seed::derive(seed, seed::stream::REPLICATION, g as u64),
                count,
            )?;
            Ok(BiasRow::from_replications(*plan, &reps))
        })
        .collect()
}

const ROUNDING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftAudit {
    pub epsilon: f64,
    pub trials: usize,
    pub max_abs_w: f64,
    pub bound: f64,
}

impl DriftAudit {
    /// Allows for rounding in the determinant when the bound is zero.
    pub fn passed(&self) -> bool {
        self.max_abs_w <= self.bound + ROUNDING_TOL
    }

    /// Share of the bound reached by the worst trial.
    pub fn fraction(&self) -> f64 {
        if self.bound > 0.0 {
            self.max_abs_w / self.bound
        } else {
            0.0
        }
    }
}

/// Largest pooled `|W|` over `trials` independent drift ensembles.
pub fn audit_drift(
    config: &ConfigSet,
    model: &DriftModel,
    trials: usize,
    seed: u64,
    truth: &(dyn Fn(&ConfigSet) -> ProbMatrix + Sync),
) -> Result<DriftAudit> {
    let max_abs_w = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let ens = generate_drift_ensemble_with(config, model, seed::derive(seed, seed::stream::DRIFT, t), truth);
            pooled_witness(&ens).map(f64::abs)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(DriftAudit {
        epsilon: model.epsilon(),
        trials,
        max_abs_w,
        bound: drift_bound(model.epsilon())?,
    })
}
