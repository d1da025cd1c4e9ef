//! Built-in witness configurations and their predicted matrices.
//!
//! A configuration is five preparation angle pairs `(α, β)` and four
//! measurement angle pairs `(θ, φ)`. The Bloch vectors always come from the
//! gate closed forms in [`crate::bloch`]; published vector lists are only
//! used as cross-checks. Known differences with those lists:
//!
//! * `I-second`, third preparation: the published `(2√2, 0, 1/3)` is not
//!   unit length; the angles give `(2√2/3, 0, 1/3)`. The same applies to the
//!   second preparation of the `II-i` family.
//! * `II-i`, first preparation: `(α, β) = (0, 0)` gives `(0, 0, -1)`, while
//!   the published list has `(0, 0, 1)`.
//! * `I-prime` measurements coincide with preparations shifted by one:
//!   measurement `k` equals preparation `k + 1` (see [`matching_preparations`]).

use alloc::format;
use alloc::string::String;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};

use crate::bloch::{meas_bloch, prep_bloch, prob, BlochVector, Effect, GateAngle};
use crate::math::{acos, TAU};
use crate::witness::ProbMatrix;
use crate::{Error, Result};

pub const BUILTIN_IDS: &[&str] = &["I-prime", "I-second", "II-0", "II-1", "II-2", "II-3", "II-4"];

/// Minimum distance between two preparation Bloch vectors.
pub const DISTINCT_TOL: f64 = 1e-9;

/// `arccos(1/3)`, the polar offset of the tetrahedral preparations.
pub fn eta() -> f64 {
    acos(1.0 / 3.0)
}

pub type AnglePair = (GateAngle, GateAngle);

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigSet {
    id: String,
    preparations: [AnglePair; 5],
    measurements: [AnglePair; 4],
}

fn pair(x: [f64; 2]) -> Result<AnglePair> {
    Ok((GateAngle::new(x[0])?, GateAngle::new(x[1])?))
}

impl ConfigSet {
    pub fn new(id: impl Into<String>, preparations: [AnglePair; 5], measurements: [AnglePair; 4]) -> Result<Self> {
        let config = ConfigSet {
            id: id.into(),
            preparations,
            measurements,
        };
        let preps = config.preparation_vectors();
        for a in 0..5 {
            for b in a + 1..5 {
                let (x, y) = (preps[a].as_array(), preps[b].as_array());
                let dist = crate::math::norm3(&[x[0] - y[0], x[1] - y[1], x[2] - y[2]]);
                if dist < DISTINCT_TOL {
                    return Err(Error::domain(format!(
                        "preparations {} and {} have the same Bloch vector",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        Ok(config)
    }

    /// Builds a configuration from raw radians, `[α, β]` and `[θ, φ]` pairs.
    pub fn from_radians(
        id: impl Into<String>,
        preparations: [[f64; 2]; 5],
        measurements: [[f64; 2]; 4],
    ) -> Result<Self> {
        let mut preps = [(GateAngle::new(0.0)?, GateAngle::new(0.0)?); 5];
        for (slot, p) in preps.iter_mut().zip(preparations) {
            *slot = pair(p)?;
        }
        let mut meas = [(GateAngle::new(0.0)?, GateAngle::new(0.0)?); 4];
        for (slot, m) in meas.iter_mut().zip(measurements) {
            *slot = pair(m)?;
        }
        ConfigSet::new(id, preps, meas)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn preparations(&self) -> &[AnglePair; 5] {
        &self.preparations
    }

    pub fn measurements(&self) -> &[AnglePair; 4] {
        &self.measurements
    }

    pub fn preparation_vectors(&self) -> [BlochVector; 5] {
        self.preparations.map(|(a, b)| prep_bloch(a, b))
    }

    pub fn measurement_effects(&self) -> [Effect; 4] {
        self.measurements.map(|(t, f)| meas_bloch(t, f))
    }

    /// Angles in radians as `[α, β]` / `[θ, φ]` pairs.
    pub fn radians(&self) -> ([[f64; 2]; 5], [[f64; 2]; 4]) {
        (
            self.preparations.map(|(a, b)| [a.radians(), b.radians()]),
            self.measurements.map(|(t, f)| [t.radians(), f.radians()]),
        )
    }
}

const I_SECOND_MEASUREMENTS: [[f64; 2]; 4] = [
    [PI, 0.0],
    [FRAC_PI_2, PI],
    [7.0 * FRAC_PI_6, 5.0 * FRAC_PI_3],
    [-FRAC_PI_6, FRAC_PI_3],
];

fn tetrahedral_preparations() -> [[f64; 2]; 3] {
    let eta = eta();
    [
        [eta - PI, 0.0],
        [eta + 5.0 * FRAC_PI_3, 2.0 * FRAC_PI_3],
        [eta + FRAC_PI_3, -2.0 * FRAC_PI_3],
    ]
}

/// Returns one of the built-in configurations.
pub fn builtin_config(id: &str) -> Result<ConfigSet> {
    match id {
        "I-prime" => ConfigSet::from_radians(
            id,
            [
                [0.0, 0.0],
                [2.0 * FRAC_PI_3, FRAC_PI_6],
                [2.0 * FRAC_PI_3, -FRAC_PI_6],
                [4.0 * FRAC_PI_3, FRAC_PI_6],
                [4.0 * FRAC_PI_3, -FRAC_PI_6],
            ],
            [
                [5.0 * FRAC_PI_3, 7.0 * FRAC_PI_6],
                [5.0 * FRAC_PI_3, 5.0 * FRAC_PI_6],
                [FRAC_PI_3, 7.0 * FRAC_PI_6],
                [FRAC_PI_3, 5.0 * FRAC_PI_6],
            ],
        ),
        "I-second" => {
            let t = tetrahedral_preparations();
            ConfigSet::from_radians(id, [[0.0, 0.0], [0.0, PI], t[0], t[1], t[2]], I_SECOND_MEASUREMENTS)
        }
        _ => match id.strip_prefix("II-").and_then(|s| s.parse::<u8>().ok()) {
            Some(i) if i < 5 && id.len() == 4 => parametric_config(f64::from(i)),
            _ => Err(Error::UnknownConfig {
                id: id.into(),
                valid: BUILTIN_IDS,
            }),
        },
    }
}

/// Member of the parametric family: four fixed preparations and the fifth at
/// `α₅ = 2πi/5`, `β₅ = α₅ + π/2`. Any real `i` is accepted; the built-ins
/// use `i = 0..4`.
pub fn parametric_config(i: f64) -> Result<ConfigSet> {
    let alpha5 = TAU * i / 5.0;
    let t = tetrahedral_preparations();
    ConfigSet::from_radians(
        format!("II-{i}"),
        [[0.0, 0.0], t[0], t[1], t[2], [alpha5, alpha5 + FRAC_PI_2]],
        I_SECOND_MEASUREMENTS,
    )
}

/// `p_kj = prob(M_k, N_j)` with the constant last row.
pub fn predicted_prob_matrix(config: &ConfigSet) -> ProbMatrix {
    let preps = config.preparation_vectors();
    let effects = config.measurement_effects();
    let rows: [[f64; 5]; 4] = core::array::from_fn(|k| core::array::from_fn(|j| prob(&effects[k], &preps[j])));
    ProbMatrix::from_measurement_rows(rows).expect("qubit probabilities are in [0, 1]")
}

pub fn config_bloch_vectors(config: &ConfigSet) -> ([BlochVector; 5], [Effect; 4]) {
    (config.preparation_vectors(), config.measurement_effects())
}

/// For each measurement, the preparation with the same Bloch direction, if
/// any (within `tol`).
pub fn matching_preparations(config: &ConfigSet, tol: f64) -> [Option<usize>; 4] {
    let preps = config.preparation_vectors();
    config.measurement_effects().map(|m| {
        preps.iter().position(|n| {
            let (a, b) = (m.direction(), n.as_array());
            (0..3).all(|i| (a[i] - b[i]).abs() <= tol)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }

    fn assert_vec(got: &[f64; 3], want: [f64; 3]) {
        for i in 0..3 {
            assert!((got[i] - want[i]).abs() < 1e-12, "{got:?} != {want:?}");
        }
    }

    #[test]
    fn eta_cosine() {
        assert!((libm::cos(eta()) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn i_prime_angles() {
        let c = builtin_config("I-prime").unwrap();
        let (p, m) = c.radians();
        assert!((p[1][0] - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((p[1][1] - PI / 6.0).abs() < 1e-15);
        assert!((m[0][0] - 5.0 * PI / 3.0).abs() < 1e-15);
        assert!((m[0][1] - 7.0 * PI / 6.0).abs() < 1e-15);
    }

    #[test]
    fn parametric_fifth_preparation() {
        let c = builtin_config("II-0").unwrap();
        let (p, _) = c.radians();
        assert_eq!(p[4][0], 0.0);
        assert!((p[4][1] - FRAC_PI_2).abs() < 1e-15);
        let c = builtin_config("II-3").unwrap();
        let x = 6.0 * PI / 5.0;
        assert_vec(
            c.preparation_vectors()[4].as_array(),
            [-libm::sin(x), -libm::cos(x), 0.0],
        );
    }

    #[test]
    fn unknown_id_lists_valid_ones() {
        let err = builtin_config("II-5").unwrap_err();
        assert!(matches!(err, Error::UnknownConfig { .. }));
        let text = alloc::string::ToString::to_string(&err);
        assert!(text.contains("I-prime") && text.contains("II-4"));
        assert!(builtin_config("II-00").is_err());
        assert!(builtin_config("").is_err());
    }

    #[test]
    fn i_prime_vectors() {
        let c = builtin_config("I-prime").unwrap();
        let (preps, meas) = config_bloch_vectors(&c);
        let s3 = sqrt(3.0);
        let want = [
            [0.0, 0.0, -1.0],
            [-s3 / 2.0, 0.5, 0.0],
            [-s3 / 4.0, -0.25, s3 / 2.0],
            [s3 / 4.0, -0.25, s3 / 2.0],
            [s3 / 2.0, 0.5, 0.0],
        ];
        for (n, w) in preps.iter().zip(want) {
            assert_vec(n.as_array(), w);
        }
        // measurement k sits on preparation k + 1
        for (k, m) in meas.iter().enumerate() {
            assert_vec(m.direction(), want[k + 1]);
        }
        assert_eq!(matching_preparations(&c, 1e-12), [Some(1), Some(2), Some(3), Some(4)]);
    }

    #[test]
    fn i_second_vectors() {
        let c = builtin_config("I-second").unwrap();
        let (preps, meas) = config_bloch_vectors(&c);
        let (s2, s3) = (sqrt(2.0), sqrt(3.0));
        let want = [
            [0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0],
            [2.0 * s2 / 3.0, 0.0, 1.0 / 3.0],
            [-s2 / 3.0, -sqrt(2.0 / 3.0), 1.0 / 3.0],
            [-s2 / 3.0, sqrt(2.0 / 3.0), 1.0 / 3.0],
        ];
        for (n, w) in preps.iter().zip(want) {
            assert_vec(n.as_array(), w);
        }
        let want = [
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
            [-0.5, -s3 / 2.0, 0.0],
            [-0.5, s3 / 2.0, 0.0],
        ];
        for (m, w) in meas.iter().zip(want) {
            assert_vec(m.direction(), w);
        }
    }

    #[test]
    fn parametric_fixed_vectors() {
        let c = builtin_config("II-2").unwrap();
        let preps = c.preparation_vectors();
        // angles give the south pole where the published list has the north pole
        assert_vec(preps[0].as_array(), [0.0, 0.0, -1.0]);
        assert_vec(preps[1].as_array(), [2.0 * sqrt(2.0) / 3.0, 0.0, 1.0 / 3.0]);
    }

    #[test]
    fn builtins_have_zero_witness() {
        for id in BUILTIN_IDS {
            let c = builtin_config(id).unwrap();
            let p = predicted_prob_matrix(&c);
            assert!(p.witness().abs() < 1e-10, "{id}: {}", p.witness());
            for n in c.preparation_vectors() {
                assert!(n.is_pure());
            }
        }
    }

    #[test]
    fn ii_cell_two_thirds() {
        let p = predicted_prob_matrix(&builtin_config("II-0").unwrap());
        // measurement (0,0,1) against preparation (2√2/3, 0, 1/3)
        assert!((p.get(0, 1) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn i_prime_ideal_pattern() {
        let p = predicted_prob_matrix(&builtin_config("I-prime").unwrap());
        // measurement k is preparation k + 1: ones on the shifted diagonal
        for k in 0..4 {
            assert!((p.get(k, k + 1) - 1.0).abs() < 1e-12);
        }
        // the south pole against the equatorial directions
        assert!((p.get(0, 0) - 0.5).abs() < 1e-12);
        assert!((p.get(3, 0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn family_differs_only_in_last_column() {
        let mats: Vec<ProbMatrix> = (0..5)
            .map(|i| predicted_prob_matrix(&builtin_config(BUILTIN_IDS[2 + i]).unwrap()))
            .collect();
        for m in &mats[1..] {
            for k in 0..5 {
                for j in 0..4 {
                    assert_eq!(m.get(k, j), mats[0].get(k, j));
                }
            }
        }
        assert!((mats[0].get(1, 4) - mats[1].get(1, 4)).abs() > 1e-3);
    }

    #[test]
    fn degenerate_preparations_rejected() {
        let err = ConfigSet::from_radians(
            "dup",
            [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 1.0]],
            [[0.0, 1.0]; 4],
        );
        assert!(err.is_err());
        // (α, β) and (α + 2π, β) are the same preparation
        let err = ConfigSet::from_radians(
            "wrap",
            [[1.0, 0.5], [1.0 + TAU, 0.5], [1.0, 0.0], [2.0, 0.0], [3.0, 1.0]],
            [[0.0, 1.0]; 4],
        );
        assert!(err.is_err());
    }
}
