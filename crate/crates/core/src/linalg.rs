//! Small dense Hermitian matrices and a Jacobi eigensolver.
//!
//! Complex Hermitian `H = A + iB` is diagonalized through its real
//! embedding `[[A, -B], [B, A]]`, whose spectrum is that of `H` with every
//! eigenvalue doubled.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::sqrt;

const JACOBI_SWEEPS: usize = 100;

/// Eigen-decomposition of a real symmetric `n×n` matrix (row-major).
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// columns of a row-major `n×n` matrix.
pub(crate) fn symmetric_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _ in 0..JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i * n + i] * a[i * n + i]).sum::<f64>() + off;
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].total_cmp(&a[y * n + y]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + col] = v[row * n + src];
        }
    }
    (values, vectors)
}

/// Dense Hermitian `d×d` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian {
    d: usize,
    data: Vec<Complex64>,
}

impl Hermitian {
    pub fn zeros(d: usize) -> Self {
        Hermitian {
            d,
            data: vec![Complex64::new(0.0, 0.0); d * d],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Hermitian::zeros(d);
        for i in 0..d {
            m.data[i * d + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        let d = v.len();
        let mut m = Hermitian::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.data[i * d + j] = v[i] * v[j].conj();
            }
        }
        m
    }

    /// Builds from row-major entries; the caller guarantees hermiticity.
    pub fn from_entries(d: usize, data: Vec<Complex64>) -> Option<Self> {
        (data.len() == d * d).then_some(Hermitian { d, data })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.d + j]
    }

    /// `self += c·other`.
    pub fn add_scaled(&mut self, c: f64, other: &Hermitian) {
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += y * c;
        }
    }

    pub fn scale(&mut self, c: f64) {
        for x in &mut self.data {
            *x *= c;
        }
    }

    /// Largest deviation from hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.d;
        let mut e: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                e = e.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        e
    }

    /// `⟨v|self|v⟩`, real part.
    pub fn quad_form(&self, v: &[Complex64]) -> f64 {
        let d = self.d;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..d {
                row += self.data[i * d + j] * v[j];
            }
            acc += v[i].conj() * row;
        }
        acc.re
    }

    fn embedding(&self) -> Vec<f64> {
        let d = self.d;
        let n = 2 * d;
        let mut r = vec![0.0; n * n];
        for i in 0..d {
            for j in 0..d {
                let z = self.get(i, j);
                r[i * n + j] = z.re;
                r[(i + d) * n + (j + d)] = z.re;
                r[i * n + (j + d)] = -z.im;
                r[(i + d) * n + j] = z.im;
            }
        }
        r
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let (values, _) = symmetric_eigen(&self.embedding(), 2 * self.d);
        // each eigenvalue shows up twice in the embedding
        values.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
    }

    /// Unit eigenvector of the largest eigenvalue.
    pub fn top_eigenvector(&self) -> (f64, Vec<Complex64>) {
        let d = self.d;
        let n = 2 * d;
        let (values, vectors) = symmetric_eigen(&self.embedding(), n);
        let col = n - 1;
        let mut v: Vec<Complex64> = (0..d)
            .map(|i| Complex64::new(vectors[i * n + col], vectors[(i + d) * n + col]))
            .collect();
        normalize(&mut v);
        (values[col], v)
    }

    /// Projector onto the span of eigenvectors with eigenvalue above zero.
    pub fn positive_projector(&self) -> Hermitian {
        let d = self.d;
        let n = 2 * d;
        let (values, vectors) = symmetric_eigen(&self.embedding(), n);
        let scale = values.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
        let mut q = vec![0.0; n * n];
        for (col, &lambda) in values.iter().enumerate() {
            if lambda <= 1e-14 * scale {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    q[i * n + j] += vectors[i * n + col] * vectors[j * n + col];
                }
            }
        }
        // the real embedding of P is [[Re P, -Im P], [Im P, Re P]]
        let mut p = Hermitian::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let re = 0.5 * (q[i * n + j] + q[(i + d) * n + (j + d)]);
                let im = 0.5 * (q[(i + d) * n + j] - q[i * n + (j + d)]);
                p.data[i * d + j] = Complex64::new(re, im);
            }
        }
        p
    }
}

pub(crate) fn normalize(v: &mut [Complex64]) {
    let n = sqrt(v.iter().map(|z| z.norm_sqr()).sum());
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}
