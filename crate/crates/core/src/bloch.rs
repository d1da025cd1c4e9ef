//! Qubit states, effects and the `S_γ` gate family.
//!
//! A state is `N = (1 + n·σ)/2` and an effect is `M = (m0 + m·σ)/2`, so the
//! outcome probability is `tr MN = (m0 + m·n)/2`. The ground state `|0⟩`
//! sits at `(0, 0, 1)`.
//!
//! `S_γ = Z_γ† S Z_γ` with `S = RX(π/2)` and `Z_γ = diag(e^{-iγ/2}, e^{iγ/2})`.
//! On Bloch vectors `S_γ` acts as the rotation `Z_γᵀ S Z_γ`. A preparation
//! applies `S_α` then `S_β` to `|0⟩`; a measurement applies `S_φ` then `S_θ`
//! and projects on `|0⟩`, which is the effect `S_φ† S_θ† |0⟩⟨0| S_θ S_φ`.

use num_complex::Complex64;

use crate::math::{cos, dot3, norm3, reduce_angle, sin};
use crate::{Error, Result};

/// Slack allowed on the norm and operator inequalities.
pub const STATE_TOL: f64 = 1e-12;

pub type Mat3 = [[f64; 3]; 3];
pub type Mat2c = [[Complex64; 2]; 2];

/// A gate angle reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GateAngle(f64);

impl GateAngle {
    pub fn new(radians: f64) -> Result<Self> {
        if !radians.is_finite() {
            return Err(Error::domain("gate angle must be finite"));
        }
        Ok(GateAngle(reduce_angle(radians)))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

/// Real 3-vector of a qubit state, `|n| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub const GROUND: BlochVector = BlochVector([0.0, 0.0, 1.0]);
    pub const MIXED: BlochVector = BlochVector([0.0, 0.0, 0.0]);

    pub fn new(n: [f64; 3]) -> Result<Self> {
        if n.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("Bloch vector must be finite"));
        }
        if norm3(&n) > 1.0 + STATE_TOL {
            return Err(Error::domain("Bloch vector longer than 1"));
        }
        Ok(BlochVector(n))
    }

    pub fn as_array(&self) -> &[f64; 3] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm3(&self.0)
    }

    pub fn is_pure(&self) -> bool {
        (self.norm() - 1.0).abs() <= STATE_TOL
    }

    /// Convex mixture `(1 - t)·self + t·other`.
    pub fn mix(&self, other: &BlochVector, t: f64) -> BlochVector {
        let a = &self.0;
        let b = &other.0;
        BlochVector([
            (1.0 - t) * a[0] + t * b[0],
            (1.0 - t) * a[1] + t * b[1],
            (1.0 - t) * a[2] + t * b[2],
        ])
    }
}

/// Measurement effect `(m0 + m·σ)/2` with `|m| ≤ m0 ≤ 2 - |m|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effect {
    m0: f64,
    m: [f64; 3],
}

impl Effect {
    pub fn new(m0: f64, m: [f64; 3]) -> Result<Self> {
        if !m0.is_finite() || m.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("effect must be finite"));
        }
        let len = norm3(&m);
        if m0 + STATE_TOL < len || m0 > 2.0 - len + STATE_TOL {
            return Err(Error::domain("effect violates 0 ≤ M ≤ 1"));
        }
        Ok(Effect { m0, m })
    }

    /// Rank-one projector along the unit vector `m`.
    pub fn projective(m: [f64; 3]) -> Result<Self> {
        let e = Effect::new(1.0, m)?;
        if !e.is_projective() {
            return Err(Error::domain("projective effect needs |m| = 1"));
        }
        Ok(e)
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn direction(&self) -> &[f64; 3] {
        &self.m
    }

    pub fn is_projective(&self) -> bool {
        (self.m0 - 1.0).abs() <= STATE_TOL && (norm3(&self.m) - 1.0).abs() <= STATE_TOL
    }
}

fn z_rotation(gamma: f64) -> Mat3 {
    let (s, c) = (sin(gamma), cos(gamma));
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// `RX(π/2)` on Bloch vectors.
pub const S_BLOCH: Mat3 = [[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]];

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat3_transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn mat3_apply(a: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [dot3(&a[0], v), dot3(&a[1], v), dot3(&a[2], v)]
}

pub fn mat3_det(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Bloch rotation of `S_γ`: `Z_γᵀ · S · Z_γ`.
pub fn s_gate_bloch(gamma: GateAngle) -> Mat3 {
    let z = z_rotation(gamma.radians());
    mat3_mul(&mat3_transpose(&z), &mat3_mul(&S_BLOCH, &z))
}

/// Bloch vector of `S_β S_α |0⟩`, closed form.
pub fn prep_bloch(alpha: GateAngle, beta: GateAngle) -> BlochVector {
    let (a, b) = (alpha.radians(), beta.radians());
    BlochVector([sin(b - a) * cos(b), sin(a - b) * sin(b), -cos(b - a)])
}

/// Projective effect `S_φ† S_θ† |0⟩⟨0| S_θ S_φ`, closed form.
pub fn meas_bloch(theta: GateAngle, phi: GateAngle) -> Effect {
    let (t, f) = (theta.radians(), phi.radians());
    Effect {
        m0: 1.0,
        m: [sin(t - f) * cos(f), sin(f - t) * sin(f), -cos(t - f)],
    }
}

/// Preparation by composing the two gate rotations on `(0, 0, 1)`.
pub fn prep_by_gates(alpha: GateAngle, beta: GateAngle) -> [f64; 3] {
    let r = mat3_mul(&s_gate_bloch(beta), &s_gate_bloch(alpha));
    mat3_apply(&r, BlochVector::GROUND.as_array())
}

/// Measurement direction by composing the transposed gate rotations.
pub fn meas_by_gates(theta: GateAngle, phi: GateAngle) -> [f64; 3] {
    let r = mat3_mul(
        &mat3_transpose(&s_gate_bloch(phi)),
        &mat3_transpose(&s_gate_bloch(theta)),
    );
    mat3_apply(&r, BlochVector::GROUND.as_array())
}

/// Outcome probability `(m0 + m·n)/2`, clamped onto `[0, 1]` when rounding
/// pushes it just outside.
pub fn prob(effect: &Effect, state: &BlochVector) -> f64 {
    let p = 0.5 * (effect.m0 + dot3(&effect.m, &state.0));
    p.clamp(0.0, 1.0)
}

/// `S_γ` as a 2×2 unitary in the `|0⟩, |1⟩` basis.
pub fn s_gate_unitary(gamma: GateAngle) -> Mat2c {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let g = gamma.radians();
    // Z_γ† S Z_γ: the off-diagonals of S pick up e^{±iγ}
    let up = Complex64::new(0.0, -h) * Complex64::new(cos(g), sin(g));
    let down = Complex64::new(0.0, -h) * Complex64::new(cos(g), -sin(g));
    [[Complex64::new(h, 0.0), up], [down, Complex64::new(h, 0.0)]]
}

/// Bloch vector `(⟨σ₁⟩, ⟨σ₂⟩, ⟨σ₃⟩)` of a normalized qubit amplitude pair.
pub fn bloch_of_amplitudes(psi: &[Complex64; 2]) -> [f64; 3] {
    let cross = psi[0].conj() * psi[1];
    [2.0 * cross.re, 2.0 * cross.im, psi[0].norm_sqr() - psi[1].norm_sqr()]
}

pub fn apply2(u: &Mat2c, psi: &[Complex64; 2]) -> [Complex64; 2] {
    [u[0][0] * psi[0] + u[0][1] * psi[1], u[1][0] * psi[0] + u[1][1] * psi[1]]
}
