//! Witness maximization over states and effects in dimension `d`.
//!
//! `W` is affine in every single effect and in every single preparation
//! projector. Expanding along row `k`,
//! `W = tr(M_k G_k) + c` with `G_k = Σ_j (Adj p)_jk |ψ_j⟩⟨ψ_j|`, and along
//! column `j`, `W = ⟨ψ_j| H_j |ψ_j⟩` with
//! `H_j = Σ_k (Adj p)_jk M_k + (Adj p)_j5 𝟙`. Each block therefore has a
//! closed-form maximizer: the projector on the positive part of `G_k`, or
//! the top eigenvector of `H_j`. A restart draws a random strategy and
//! sweeps over all nine blocks until `W` stops increasing.
//!
//! Swapping two preparations flips the sign of `W`, so maximizing `W`
//! maximizes `|W|`.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::normalize;
pub use crate::linalg::Hermitian;
use crate::seed::{self, TaskRng};
use crate::witness::{adjugate, bareiss_det, ProbMatrix};
use crate::{Error, Result};

/// Slack on state norms and effect spectra.
pub const POINT_TOL: f64 = 1e-10;

/// Ceiling on `|W|` for any strategy.
pub const CLASSICAL_MAX: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EffectClass {
    /// Effects are projectors (any rank); each effect block jumps to its
    /// exact maximizer.
    Projective,
    /// Effects range over `0 ≤ M ≤ 1`, start in the interior and move by
    /// half steps towards the block maximizer.
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtremalProblem {
    pub d: usize,
    pub field: Field,
    pub effect_class: EffectClass,
}

impl ExtremalProblem {
    pub fn new(d: usize, field: Field, effect_class: EffectClass) -> Result<Self> {
        if !(2..=4).contains(&d) {
            return Err(Error::domain("dimension must be 2, 3 or 4"));
        }
        Ok(ExtremalProblem { d, field, effect_class })
    }

    pub fn projective(d: usize, field: Field) -> Result<Self> {
        ExtremalProblem::new(d, field, EffectClass::Projective)
    }

    /// Default number of random restarts.
    pub fn default_restarts(&self) -> usize {
        match self.d {
            2 => 50,
            3 => 200,
            _ => 500,
        }
    }

    /// Published maximum of `|W|`, where one exists in closed form.
    pub fn known_maximum(&self) -> Option<f64> {
        match (self.d, self.field) {
            (2, _) => Some(0.0),
            (3, Field::Real) => Some(D3_REAL_MAX),
            (3, Field::Complex) => Some(D3_COMPLEX_APPROX),
            (4, _) => Some(D4_MAX),
            _ => None,
        }
    }
}

/// `27√2/64`.
pub const D3_REAL_MAX: f64 = 27.0 * core::f64::consts::SQRT_2 / 64.0;
/// Only quoted to three digits.
pub const D3_COMPLEX_APPROX: f64 = 0.632;
/// `2¹²/3⁷`.
pub const D4_MAX: f64 = 4096.0 / 2187.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub max_sweeps: usize,
    /// A restart has converged once a full sweep gains less than this.
    pub step_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_sweeps: 10_000,
            step_tol: 1e-12,
        }
    }
}

/// Five pure preparations and four effects in dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyPoint {
    pub preparations: Vec<Vec<Complex64>>,
    pub effects: Vec<Hermitian>,
}

impl StrategyPoint {
    pub fn dim(&self) -> usize {
        self.preparations.first().map_or(0, |v| v.len())
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if self.preparations.len() != 5 || self.effects.len() != 4 || d == 0 {
            return Err(Error::domain("strategy needs 5 preparations and 4 effects"));
        }
        for psi in &self.preparations {
            let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            if psi.len() != d || (norm2 - 1.0).abs() > POINT_TOL {
                return Err(Error::domain("preparation is not a unit vector"));
            }
        }
        for m in &self.effects {
            if m.dim() != d || m.hermiticity_error() > POINT_TOL {
                return Err(Error::domain("effect is not Hermitian"));
            }
            let vals = m.eigenvalues();
            if vals.iter().any(|x| !(-POINT_TOL..=1.0 + POINT_TOL).contains(x)) {
                return Err(Error::domain("effect spectrum leaves [0, 1]"));
            }
        }
        Ok(())
    }

    /// Lifts a qubit strategy given by Bloch vectors.
    pub fn from_qubit(preparations: &[crate::BlochVector; 5], effects: &[crate::Effect; 4]) -> Result<Self> {
        let preps = preparations
            .iter()
            .map(|n| qubit_amplitudes(n.as_array()))
            .collect::<Result<Vec<_>>>()?;
        let effects = effects
            .iter()
            .map(|e| {
                let (m0, m) = (e.m0(), e.direction());
                Hermitian::from_entries(
                    2,
                    alloc::vec![
                        Complex64::new(0.5 * (m0 + m[2]), 0.0),
                        Complex64::new(0.5 * m[0], -0.5 * m[1]),
                        Complex64::new(0.5 * m[0], 0.5 * m[1]),
                        Complex64::new(0.5 * (m0 - m[2]), 0.0),
                    ],
                )
                .expect("2×2")
            })
            .collect();
        Ok(StrategyPoint {
            preparations: preps,
            effects,
        })
    }
}

/// Amplitudes of the pure qubit state with Bloch vector `n`.
fn qubit_amplitudes(n: &[f64; 3]) -> Result<Vec<Complex64>> {
    let len = crate::math::norm3(n);
    if (len - 1.0).abs() > POINT_TOL {
        return Err(Error::domain("qubit preparation must be pure"));
    }
    let theta = libm::acos(n[2].clamp(-1.0, 1.0));
    let phi = libm::atan2(n[1], n[0]);
    let (c, s) = (libm::cos(theta / 2.0), libm::sin(theta / 2.0));
    Ok(alloc::vec![
        Complex64::new(c, 0.0),
        Complex64::new(s * libm::cos(phi), s * libm::sin(phi)),
    ])
}

/// `p_kj = ⟨ψ_j|M_k|ψ_j⟩` with the constant last row.
pub fn strategy_prob_matrix(point: &StrategyPoint) -> Result<ProbMatrix> {
    point.validate()?;
    Ok(prob_matrix_unchecked(point))
}

fn prob_matrix_unchecked(point: &StrategyPoint) -> ProbMatrix {
    let rows: [[f64; 5]; 4] = core::array::from_fn(|k| {
        core::array::from_fn(|j| point.effects[k].quad_form(&point.preparations[j]).clamp(0.0, 1.0))
    });
    ProbMatrix::from_measurement_rows(rows).expect("clamped entries")
}

/// Outcome of one restart.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub index: usize,
    pub w: f64,
    pub point: StrategyPoint,
    pub sweeps: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_w: f64,
    pub best_point: StrategyPoint,
    pub best_restart: usize,
    pub restarts: usize,
    /// The best restart converged before the sweep cap.
    pub converged: bool,
    pub converged_restarts: usize,
    /// Final `W` of every restart, by index.
    pub restart_values: Vec<f64>,
}

fn random_vector(rng: &mut TaskRng, d: usize, field: Field) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..d)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = match field {
                Field::Real => 0.0,
                Field::Complex => rng.sample(StandardNormal),
            };
            Complex64::new(re, im)
        })
        .collect();
    normalize(&mut v);
    v
}

fn random_basis(rng: &mut TaskRng, d: usize, field: Field) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while basis.len() < d {
        let mut v = random_vector(rng, d, field);
        for b in &basis {
            let overlap: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= overlap * bi;
            }
        }
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 > 1e-6 {
            normalize(&mut v);
            basis.push(v);
        }
    }
    basis
}

fn random_effect(rng: &mut TaskRng, problem: &ExtremalProblem) -> Hermitian {
    match problem.effect_class {
        EffectClass::Projective => Hermitian::outer(&random_vector(rng, problem.d, problem.field)),
        EffectClass::General => {
            let mut m = Hermitian::zeros(problem.d);
            for v in random_basis(rng, problem.d, problem.field) {
                let weight: f64 = rng.random();
                m.add_scaled(weight, &Hermitian::outer(&v));
            }
            m
        }
    }
}

fn random_point(rng: &mut TaskRng, problem: &ExtremalProblem) -> StrategyPoint {
    let preparations = (0..5).map(|_| random_vector(rng, problem.d, problem.field)).collect();
    let effects = (0..4).map(|_| random_effect(rng, problem)).collect();
    StrategyPoint { preparations, effects }
}

fn current_w(point: &StrategyPoint) -> f64 {
    prob_matrix_unchecked(point).witness()
}

/// One sweep over the four effects and five preparations.
fn sweep(point: &mut StrategyPoint, problem: &ExtremalProblem) {
    let d = problem.d;
    for k in 0..4 {
        let adj = adjugate(&prob_matrix_unchecked(point));
        let mut g = Hermitian::zeros(d);
        for (j, psi) in point.preparations.iter().enumerate() {
            g.add_scaled(adj[j][k], &Hermitian::outer(psi));
        }
        let target = g.positive_projector();
        point.effects[k] = match problem.effect_class {
            EffectClass::Projective => target,
            EffectClass::General => {
                let mut m = point.effects[k].clone();
                m.scale(0.5);
                m.add_scaled(0.5, &target);
                m
            }
        };
    }
    for j in 0..5 {
        let adj = adjugate(&prob_matrix_unchecked(point));
        let mut h = Hermitian::identity(d);
        h.scale(adj[j][4]);
        for (k, m) in point.effects.iter().enumerate() {
            h.add_scaled(adj[j][k], m);
        }
        let (_, v) = h.top_eigenvector();
        // stay on the real slice when the field is real
        point.preparations[j] = match problem.field {
            Field::Real => {
                // a real H has real eigenvectors up to a global phase
                let lead = v.iter().copied().fold(Complex64::new(0.0, 0.0), |a, z| {
                    if z.norm_sqr() > a.norm_sqr() {
                        z
                    } else {
                        a
                    }
                });
                let phase = lead.conj() / lead.norm();
                let mut r: Vec<Complex64> = v.iter().map(|z| Complex64::new((z * phase).re, 0.0)).collect();
                normalize(&mut r);
                r
            }
            Field::Complex => v,
        };
    }
}

/// Runs restart `index` of a search seeded by `master_seed`.
pub fn run_restart(problem: &ExtremalProblem, master_seed: u64, index: usize, opts: &SearchOptions) -> RestartOutcome {
    let mut rng = seed::task_rng(master_seed, seed::stream::RESTART, index as u64);
    let mut point = random_point(&mut rng, problem);
    if current_w(&point) < 0.0 {
        point.preparations.swap(0, 1);
    }
    let mut w = current_w(&point);
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < opts.max_sweeps {
        let before = point.clone();
        sweep(&mut point, problem);
        sweeps += 1;
        let next = current_w(&point);
        if next < w {
            // rounding in a flat direction; keep the better point
            point = before;
            converged = true;
            break;
        }
        let gain = next - w;
        w = next;
        if gain < opts.step_tol {
            converged = true;
            break;
        }
    }
    RestartOutcome {
        index,
        w,
        point,
        sweeps,
        converged,
    }
}

/// Picks the best restart; ties go to the lowest index.
pub fn select_best(mut outcomes: Vec<RestartOutcome>) -> Result<SearchResult> {
    if outcomes.is_empty() {
        return Err(Error::domain("at least one restart is required"));
    }
    outcomes.sort_by_key(|o| o.index);
    let restart_values: Vec<f64> = outcomes.iter().map(|o| o.w).collect();
    let converged_restarts = outcomes.iter().filter(|o| o.converged).count();
    let restarts = outcomes.len();
    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.w > outcomes[best].w {
            best = i;
        }
    }
    let winner = outcomes.swap_remove(best);
    Ok(SearchResult {
        best_w: winner.w,
        best_point: winner.point,
        best_restart: winner.index,
        restarts,
        converged: winner.converged,
        converged_restarts,
        restart_values,
    })
}

pub fn maximize_witness_with(
    problem: &ExtremalProblem,
    restarts: usize,
    seed: u64,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    if restarts < 1 {
        return Err(Error::domain("at least one restart is required"));
    }
    let outcomes = (0..restarts).map(|i| run_restart(problem, seed, i, opts)).collect();
    select_best(outcomes)
}

/// Best `|W|` over `restarts` random starts.
pub fn maximize_witness(problem: &ExtremalProblem, restarts: usize, seed: u64) -> Result<SearchResult> {
    maximize_witness_with(problem, restarts, seed, &SearchOptions::default())
}

/// Seed used by [`certify_value`].
pub const CERTIFY_SEED: u64 = 0x5eed;

/// Checks that the best witness found with the default budget lies within
/// `tolerance` of `claimed`. A value above `claimed + tolerance` is an error.
pub fn certify_value(problem: &ExtremalProblem, claimed: f64, tolerance: f64) -> Result<bool> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::domain("tolerance must be positive"));
    }
    let result = maximize_witness(problem, problem.default_restarts(), CERTIFY_SEED)?;
    check_claim(result.best_w, claimed, tolerance)
}

/// The comparison behind [`certify_value`], for externally run searches.
pub fn check_claim(found: f64, claimed: f64, tolerance: f64) -> Result<bool> {
    if found > claimed + tolerance {
        return Err(Error::Inconsistent {
            claimed,
            found,
            tolerance,
        });
    }
    Ok((found - claimed).abs() <= tolerance)
}

/// Maximum `|det|` over all 0/1 matrices with a constant last row, and how
/// many of the 2²⁰ assignments reach it.
pub fn classical_max_with_count() -> (i64, u64) {
    let mut best = 0i64;
    let mut count = 0u64;
    let mut m = [[1i64; 5]; 5];
    for code in 0u32..(1 << 20) {
        for (k, row) in m.iter_mut().take(4).enumerate() {
            let bits = (code >> (5 * k)) & 0x1f;
            for (j, x) in row.iter_mut().enumerate() {
                *x = i64::from((bits >> j) & 1);
            }
        }
        let d = bareiss_det(&m).abs();
        if d > best {
            best = d;
            count = 1;
        } else if d == best {
            count += 1;
        }
    }
    (best, count)
}

/// Exhaustive classical bound, exactly 3.
pub fn classical_max() -> i64 {
    classical_max_with_count().0
}
