//! Checks against oracles that do not share code paths with the library.

use dimwit_core::configs::{builtin_config, predicted_prob_matrix, ConfigSet, BUILTIN_IDS};
use dimwit_core::extremal::classical_max_with_count;
use dimwit_core::noise::{coherent_leak_prob_matrix, CoherentLeakParams};
use dimwit_core::witness::{adjugate, det5, laplace_det, Mat5};
use dimwit_core::ProbMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::Signed;
use rand::{Rng, SeedableRng};

type Q = Ratio<i64>;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn parity(p: &[usize]) -> i64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Leibniz formula over exact rationals.
fn leibniz(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    permutations(n)
        .iter()
        .map(|p| {
            let prod = (0..n).fold(Q::from_integer(1), |acc, i| acc * m[i][p[i]]);
            prod * Q::from_integer(parity(p))
        })
        .fold(Q::from_integer(0), |a, b| a + b)
}

fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn random_rational_matrix(rng: &mut impl Rng) -> Vec<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = (0..4)
        .map(|_| (0..5).map(|_| Q::new(rng.random_range(0..=12), 12)).collect())
        .collect();
    m.push(vec![Q::from_integer(1); 5]);
    m
}

#[test]
fn pivoted_determinant_matches_exact_rationals() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for _ in 0..300 {
        let exact = random_rational_matrix(&mut rng);
        let want = leibniz(&exact);
        assert_eq!(laplace_det(&exact), want);
        let float: Mat5 = std::array::from_fn(|i| std::array::from_fn(|j| to_f64(exact[i][j])));
        let got = det5(&float);
        assert!((got - to_f64(want)).abs() <= 1e-12 * to_f64(want).abs().max(1.0));
    }
}

#[test]
fn classical_enumeration() {
    let (max, count) = classical_max_with_count();
    assert_eq!(max, 3);
    // frozen from an independent exact enumeration (Leibniz, all 2^20 cases)
    assert_eq!(count, 1920);
}

#[test]
fn deterministic_optimum_reproduces_classical_bound() {
    let mut best = None;
    'outer: for code in 0u32..(1 << 20) {
        let mut m = vec![vec![Q::from_integer(1); 5]; 5];
        for k in 0..4 {
            for j in 0..5 {
                m[k][j] = Q::from_integer(i64::from((code >> (5 * k + j)) & 1));
            }
        }
        if laplace_det(&m).abs() == Q::from_integer(3) {
            best = Some(m);
            break 'outer;
        }
    }
    let m = best.unwrap();
    let float: Mat5 = std::array::from_fn(|i| std::array::from_fn(|j| to_f64(m[i][j])));
    let p = ProbMatrix::new(float).unwrap();
    assert_eq!(p.witness().abs().round(), 3.0);
    assert!((p.witness().abs() - 3.0).abs() < 1e-12);
}

fn leibniz_f64(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    permutations(n)
        .iter()
        .map(|p| (0..n).map(|i| m[i][p[i]]).product::<f64>() * parity(p) as f64)
        .sum()
}

#[test]
fn adjugate_of_i_second_minor_by_minor() {
    let p = predicted_prob_matrix(&builtin_config("I-second").unwrap());
    let m = p.as_array();
    let adj = adjugate(&p);
    for j in 0..5 {
        for k in 0..5 {
            let sub: Vec<Vec<f64>> = (0..5)
                .filter(|&r| r != k)
                .map(|r| (0..5).filter(|&c| c != j).map(|c| m[r][c]).collect())
                .collect();
            let sign = if (j + k) % 2 == 0 { 1.0 } else { -1.0 };
            assert!((adj[j][k] - sign * leibniz_f64(&sub)).abs() < 1e-12);
        }
    }
    // frozen table (exact rationals for this configuration)
    let sixth = 1.0 / 6.0;
    let want = [
        [0.0, -sixth, -sixth, -sixth, 0.25],
        [0.0, -2.0 * sixth, -2.0 * sixth, -2.0 * sixth, 0.5],
        [0.0, sixth, sixth, sixth, -0.25],
        [0.0, sixth, sixth, sixth, -0.25],
        [0.0, sixth, sixth, sixth, -0.25],
    ];
    for j in 0..5 {
        for k in 0..5 {
            assert!((adj[j][k] - want[j][k]).abs() < 1e-12, "({j},{k}) {}", adj[j][k]);
        }
    }
    // T·Var(W) = 5/36 for this configuration
    let t_var = dimwit_core::witness::witness_variance(&p, 1).unwrap();
    assert!((t_var - 5.0 / 36.0).abs() < 1e-12);
}

#[test]
fn single_entry_perturbation_follows_adjugate() {
    for id in BUILTIN_IDS {
        let p = predicted_prob_matrix(&builtin_config(id).unwrap());
        let adj = adjugate(&p);
        for (k, j) in [(0, 0), (1, 3), (3, 4), (2, 2)] {
            let delta = 1e-3;
            let mut q: Vec<Vec<f64>> = p.as_array().iter().map(|r| r.to_vec()).collect();
            q[k][j] += delta;
            let brute = leibniz_f64(&q);
            assert!((brute - delta * adj[j][k]).abs() < 1e-10, "{id} ({k},{j})");
        }
    }
}

fn random_config(rng: &mut impl Rng, id: usize) -> ConfigSet {
    let mut draw = || rng.random_range(0.0..std::f64::consts::TAU);
    let preps: [[f64; 2]; 5] = std::array::from_fn(|_| [draw(), draw()]);
    let meas: [[f64; 2]; 4] = std::array::from_fn(|_| [draw(), draw()]);
    ConfigSet::from_radians(format!("random-{id}"), preps, meas).unwrap()
}

#[test]
fn random_qubit_configurations_have_zero_witness() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for i in 0..1000 {
        let c = random_config(&mut rng, i);
        assert!(predicted_prob_matrix(&c).witness().abs() < 1e-10);
    }
}

type M3 = [[Complex64; 3]; 3];

fn mul(a: &M3, b: &M3) -> M3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

/// exp(-i·H) by Taylor series.
fn expm_minus_i(h: &M3) -> M3 {
    let zero = Complex64::new(0.0, 0.0);
    let mut term: M3 =
        std::array::from_fn(|i| std::array::from_fn(|j| if i == j { Complex64::new(1.0, 0.0) } else { zero }));
    let mut sum = term;
    let g: M3 = std::array::from_fn(|i| std::array::from_fn(|j| h[i][j] * Complex64::new(0.0, -1.0)));
    for n in 1..60 {
        term = mul(&term, &g);
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x /= n as f64;
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                sum[i][j] += term[i][j];
            }
        }
    }
    sum
}

/// Drive with phase γ coupling 0–1 for a quarter turn and 1–2 by `leak`.
fn oracle_gate(gamma: f64, leak: f64) -> M3 {
    let zero = Complex64::new(0.0, 0.0);
    let ph = Complex64::from_polar(1.0, gamma);
    let mut x01 = [[zero; 3]; 3];
    x01[0][1] = ph * std::f64::consts::FRAC_PI_4;
    x01[1][0] = ph.conj() * std::f64::consts::FRAC_PI_4;
    let mut x12 = [[zero; 3]; 3];
    x12[1][2] = ph * leak;
    x12[2][1] = ph.conj() * leak;
    mul(&expm_minus_i(&x12), &expm_minus_i(&x01))
}

fn oracle_leak_matrix(config: &ConfigSet, leak: f64) -> Mat5 {
    let (preps, meas) = config.radians();
    let mut p = [[1.0; 5]; 5];
    for k in 0..4 {
        for j in 0..5 {
            let u = mul(
                &mul(&oracle_gate(meas[k][0], leak), &oracle_gate(meas[k][1], leak)),
                &mul(&oracle_gate(preps[j][1], leak), &oracle_gate(preps[j][0], leak)),
            );
            p[k][j] = u[0][0].norm_sqr();
        }
    }
    p
}

#[test]
fn coherent_leak_matches_matrix_exponential() {
    for id in BUILTIN_IDS {
        let c = builtin_config(id).unwrap();
        for leak in [0.0, 0.01, 0.1, 0.3] {
            let got = coherent_leak_prob_matrix(&c, &CoherentLeakParams::new(leak).unwrap());
            let want = oracle_leak_matrix(&c, leak);
            for k in 0..5 {
                for j in 0..5 {
                    assert!((got.get(k, j) - want[k][j]).abs() < 1e-12, "{id} {leak}");
                }
            }
        }
    }
}

#[test]
fn coherent_leak_regression_values() {
    // frozen from the matrix-exponential oracle above
    let c = builtin_config("II-0").unwrap();
    let w = |a: f64| coherent_leak_prob_matrix(&c, &CoherentLeakParams::new(a).unwrap()).witness();
    assert!((w(0.1) - 2.349_860_003_339_241e-3).abs() < 1e-12);
    assert!((w(0.01) - 2.356_976_792_283_578e-5).abs() < 1e-14);
    assert!((det5(&oracle_leak_matrix(&c, 0.1)) - w(0.1)).abs() < 1e-12);
}
