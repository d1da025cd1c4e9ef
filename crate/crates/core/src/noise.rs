//! Noise channels acting on the probability matrix.
//!
//! Incoherent leakage and uniform readout error act on rows `0..4` as the
//! same affine map `p → c₁p + c₀`, so they rescale the witness by `c₁⁴` and
//! leave a zero witness at zero. Calibration drift replaces each job's matrix
//! by another exact qubit matrix within `ε` of a reference; the job-averaged
//! matrix then has `|W| ≤ 80√2 ε²`. Coherent leakage couples `|1⟩` to a third
//! level with a strength that rides on each gate's phase, and does show up in
//! the witness.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::bloch::GateAngle;
use crate::configs::{predicted_prob_matrix, ConfigSet};
use crate::math::{cos, sin};
use crate::seed::{self, TaskRng};
use crate::witness::{ProbMatrix, MEAS_ROWS};
use crate::{Error, Result};

/// Common incoherent leakage: each preparation moves weight `lambda_prep`
/// into an external state, which every measurement answers with
/// probability `mu_meas`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageParams {
    lambda_prep: f64,
    mu_meas: f64,
}

impl LeakageParams {
    pub fn new(lambda_prep: f64, mu_meas: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda_prep) {
            return Err(Error::domain("leakage weight must lie in [0, 1)"));
        }
        if !(0.0..=1.0).contains(&mu_meas) {
            return Err(Error::domain("external-state response must lie in [0, 1]"));
        }
        Ok(LeakageParams { lambda_prep, mu_meas })
    }

    pub fn lambda_prep(&self) -> f64 {
        self.lambda_prep
    }

    pub fn mu_meas(&self) -> f64 {
        self.mu_meas
    }
}

fn affine_rows(p: &ProbMatrix, scale: f64, offset: f64) -> Result<ProbMatrix> {
    let mut q = *p.as_array();
    for row in q.iter_mut().take(MEAS_ROWS) {
        for x in row.iter_mut() {
            *x = scale * *x + offset;
        }
    }
    ProbMatrix::new(q)
}

/// `p' = (1 - λ)p + λμ` on the measurement rows.
pub fn apply_common_leakage(p: &ProbMatrix, params: &LeakageParams) -> Result<ProbMatrix> {
    let l = params.lambda_prep;
    affine_rows(p, 1.0 - l, l * params.mu_meas)
}

/// `p' = (1 - e1)p + e0(1 - p)` on the measurement rows.
pub fn apply_readout_error(p: &ProbMatrix, e0: f64, e1: f64) -> Result<ProbMatrix> {
    if !(0.0..1.0).contains(&e0) || !(0.0..1.0).contains(&e1) || e0 + e1 >= 1.0 {
        return Err(Error::domain("readout errors need e0, e1 in [0, 1) and e0 + e1 < 1"));
    }
    affine_rows(p, 1.0 - e0 - e1, e0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DriftMode {
    /// Every gate angle of the job is shifted by a small random amount.
    AngleJitter,
    /// Half of the jobs stay at the reference. In the others every
    /// measurement row is pulled towards another row or the constant-½ row
    /// of the effect `𝟙/2`, then every preparation column towards another
    /// column. Rows and columns move together, which is what pooling turns
    /// into a nonzero witness.
    ColumnMix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftModel {
    epsilon: f64,
    n_jobs: usize,
    mode: DriftMode,
}

impl DriftModel {
    pub fn new(epsilon: f64, n_jobs: usize, mode: DriftMode) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::domain("drift bound must be finite and non-negative"));
        }
        if n_jobs == 0 {
            return Err(Error::domain("drift ensemble needs at least one job"));
        }
        Ok(DriftModel { epsilon, n_jobs, mode })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n_jobs(&self) -> usize {
        self.n_jobs
    }

    pub fn mode(&self) -> DriftMode {
        self.mode
    }
}

/// `80√2 ε²`.
pub fn drift_bound(epsilon: f64) -> Result<f64> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::domain("epsilon must be non-negative"));
    }
    Ok(80.0 * core::f64::consts::SQRT_2 * epsilon * epsilon)
}

/// Halvings of the drift amplitude tried before giving up on a job.
const JITTER_RETRIES: usize = 8;

fn jitter(config: &ConfigSet, amplitude: f64, rng: &mut TaskRng) -> Result<ConfigSet> {
    let mut shift = |g: GateAngle| GateAngle::new(g.radians() + amplitude * (2.0 * rng.random::<f64>() - 1.0));
    let mut preps = *config.preparations();
    for p in preps.iter_mut() {
        *p = (shift(p.0)?, shift(p.1)?);
    }
    let mut meas = *config.measurements();
    for m in meas.iter_mut() {
        *m = (shift(m.0)?, shift(m.1)?);
    }
    ConfigSet::new(config.id(), preps, meas)
}

fn jittered_matrix(
    config: &ConfigSet,
    reference: &ProbMatrix,
    epsilon: f64,
    rng: &mut TaskRng,
    truth: &dyn Fn(&ConfigSet) -> ProbMatrix,
) -> ProbMatrix {
    // every entry depends on four angles with slope at most 1
    let mut amplitude = epsilon / 4.0;
    for _ in 0..JITTER_RETRIES {
        if let Ok(c) = jitter(config, amplitude, rng) {
            let p = truth(&c);
            if p.max_abs_diff(reference) <= epsilon {
                return p;
            }
        }
        amplitude *= 0.5;
    }
    *reference
}

/// `p' = R·p` on the measurement rows, then `p'' = p'·C` on the columns,
/// with convex weights of strength `amplitude·U[0.5, 1]`.
fn mix_rows_and_columns(reference: &ProbMatrix, amplitude: f64, rng: &mut TaskRng) -> Option<ProbMatrix> {
    let p = reference.as_array();
    let mut rows = *p;
    for k in 0..MEAS_ROWS {
        // one of the other three rows, or the effect 𝟙/2
        let pick = rng.random_range(0..MEAS_ROWS);
        let t = amplitude * (0.5 + 0.5 * rng.random::<f64>());
        for j in 0..5 {
            let target = if pick == k { 0.5 } else { p[pick][j] };
            rows[k][j] = (1.0 - t) * p[k][j] + t * target;
        }
    }
    let mut q = rows;
    for j in 0..5 {
        let pick = (j + rng.random_range(1..5usize)) % 5;
        let s = amplitude * (0.5 + 0.5 * rng.random::<f64>());
        for k in 0..MEAS_ROWS {
            q[k][j] = ((1.0 - s) * rows[k][j] + s * rows[k][pick]).clamp(0.0, 1.0);
        }
    }
    ProbMatrix::new(q).ok()
}

fn column_mixed_matrix(reference: &ProbMatrix, epsilon: f64, rng: &mut TaskRng) -> ProbMatrix {
    if rng.random::<bool>() {
        return *reference;
    }
    let mut amplitude = epsilon;
    for _ in 0..JITTER_RETRIES {
        if let Some(q) = mix_rows_and_columns(reference, amplitude.min(1.0), rng) {
            if q.max_abs_diff(reference) <= epsilon {
                return q;
            }
        }
        amplitude *= 0.5;
    }
    *reference
}

/// Per-job matrices for a drift model, each an exact qubit matrix within
/// `epsilon` of the reference entrywise.
pub fn generate_drift_ensemble(config: &ConfigSet, model: &DriftModel, seed: u64) -> Vec<ProbMatrix> {
    generate_drift_ensemble_with(config, model, seed, &predicted_prob_matrix)
}

/// Same as [`generate_drift_ensemble`] with another map from angles to the
/// job's matrix (for example a coherent leakage model).
pub fn generate_drift_ensemble_with(
    config: &ConfigSet,
    model: &DriftModel,
    seed: u64,
    truth: &dyn Fn(&ConfigSet) -> ProbMatrix,
) -> Vec<ProbMatrix> {
    let reference = truth(config);
    (0..model.n_jobs)
        .map(|job| {
            if model.epsilon <= 0.0 {
                return reference;
            }
            let mut rng = seed::task_rng(seed, seed::stream::DRIFT, job as u64);
            match model.mode {
                DriftMode::AngleJitter => jittered_matrix(config, &reference, model.epsilon, &mut rng, truth),
                DriftMode::ColumnMix => column_mixed_matrix(&reference, model.epsilon, &mut rng),
            }
        })
        .collect()
}

/// Witness of the job-averaged matrix.
pub fn pooled_witness(ensemble: &[ProbMatrix]) -> Result<f64> {
    Ok(ProbMatrix::mean(ensemble)?.witness())
}

/// Coherent coupling of `|1⟩` to a third level `|2⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentLeakParams {
    pub leak_angle: f64,
}

impl CoherentLeakParams {
    pub const DIMENSION: usize = 3;

    pub fn new(leak_angle: f64) -> Result<Self> {
        if !leak_angle.is_finite() {
            return Err(Error::domain("leak angle must be finite"));
        }
        Ok(CoherentLeakParams { leak_angle })
    }
}

pub type Mat3c = [[Complex64; 3]; 3];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mat3c_mul(a: &Mat3c, b: &Mat3c) -> Mat3c {
    core::array::from_fn(|i| core::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

/// Qutrit version of `S_γ`: `S_γ ⊕ 1` followed by a rotation by the leak
/// angle in the `|1⟩–|2⟩` plane carrying the same drive phase `γ`.
pub fn coherent_leak_unitary(gamma: GateAngle, params: &CoherentLeakParams) -> Mat3c {
    let g = gamma.radians();
    let h = FRAC_1_SQRT_2;
    let up = c(cos(g), sin(g));
    let down = up.conj();
    let minus_i = c(0.0, -1.0);
    let zero = c(0.0, 0.0);
    let s: Mat3c = [
        [c(h, 0.0), minus_i * up * h, zero],
        [minus_i * down * h, c(h, 0.0), zero],
        [zero, zero, c(1.0, 0.0)],
    ];
    let a = params.leak_angle;
    let r: Mat3c = [
        [c(1.0, 0.0), zero, zero],
        [zero, c(cos(a), 0.0), minus_i * up * sin(a)],
        [zero, minus_i * down * sin(a), c(cos(a), 0.0)],
    ];
    mat3c_mul(&r, &s)
}

/// Probability matrix of a configuration run on the leaky qutrit gates.
pub fn coherent_leak_prob_matrix(config: &ConfigSet, params: &CoherentLeakParams) -> ProbMatrix {
    let u = |g: GateAngle| coherent_leak_unitary(g, params);
    let preps: Vec<[Complex64; 3]> = config
        .preparations()
        .iter()
        .map(|&(alpha, beta)| {
            let m = mat3c_mul(&u(beta), &u(alpha));
            [m[0][0], m[1][0], m[2][0]]
        })
        .collect();
    // ⟨0| U_θ U_φ, the row that the readout projects on
    let meas: Vec<[Complex64; 3]> = config
        .measurements()
        .iter()
        .map(|&(theta, phi)| mat3c_mul(&u(theta), &u(phi))[0])
        .collect();
    let rows: [[f64; 5]; 4] = core::array::from_fn(|k| {
        core::array::from_fn(|j| {
            let amp: Complex64 = (0..3).map(|i| meas[k][i] * preps[j][i]).sum();
            amp.norm_sqr().clamp(0.0, 1.0)
        })
    });
    ProbMatrix::from_measurement_rows(rows).expect("clamped entries")
}

/// Fraction of the weight of preparation `j` found in `|2⟩`.
pub fn leaked_population(config: &ConfigSet, params: &CoherentLeakParams, j: usize) -> f64 {
    let (alpha, beta) = config.preparations()[j];
    let m = mat3c_mul(
        &coherent_leak_unitary(beta, params),
        &coherent_leak_unitary(alpha, params),
    );
    m[2][0].norm_sqr()
}
