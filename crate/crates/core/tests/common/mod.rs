#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slnr_core::channel::complex_gaussian;
use slnr_core::numerics::{inner, mat_vec, norm, ComplexMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn unit_vector(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
    let s = norm(&v);
    v.into_iter().map(|z| z / s).collect()
}

/// `X Xᴴ` for an `n × rank` Gaussian `X`.
pub fn random_psd(rng: &mut impl Rng, n: usize, rank: usize) -> ComplexMatrix {
    gaussian(rng, rank, n).gram()
}

/// `Y Yᴴ + shift·I`.
pub fn random_pd(rng: &mut impl Rng, n: usize, shift: f64) -> ComplexMatrix {
    random_psd(rng, n, n).add(&ComplexMatrix::scaled_identity(n, shift))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let x = gaussian(rng, n, n);
    x.add(&x.adjoint()).scale_real(0.5)
}

pub fn quotient(a: &ComplexMatrix, b: &ComplexMatrix, v: &[Complex64]) -> f64 {
    inner(v, &mat_vec(a, v)).re / inner(v, &mat_vec(b, v)).re
}

pub fn residual(a: &ComplexMatrix, b: &ComplexMatrix, lambda: f64, v: &[Complex64]) -> f64 {
    let av = mat_vec(a, v);
    let bv = mat_vec(b, v);
    av.iter()
        .zip(&bv)
        .map(|(x, y)| (x - y * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Split real/imaginary storage of a Hermitian matrix for fast quadratic forms.
pub struct RealForm {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl RealForm {
    pub fn new(m: &ComplexMatrix) -> Self {
        let n = m.rows();
        Self {
            n,
            re: m.as_slice().iter().map(|z| z.re).collect(),
            im: m.as_slice().iter().map(|z| z.im).collect(),
        }
    }

    /// `Re(vᴴ M v)` with `v = x + i y`.
    pub fn quadratic(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for r in 0..n {
            let (mut pr, mut pi) = (0.0, 0.0);
            let row = r * n;
            for c in 0..n {
                let (a, b) = (self.re[row + c], self.im[row + c]);
                pr += a * x[c] - b * y[c];
                pi += a * y[c] + b * x[c];
            }
            acc += x[r] * pr + y[r] * pi;
        }
        acc
    }
}

/// Largest quotient `vᴴAv / vᴴBv` over `count` random unit vectors.
pub fn random_search_max(rng: &mut impl Rng, a: &ComplexMatrix, b: &ComplexMatrix, count: usize) -> f64 {
    let n = a.rows();
    let (fa, fb) = (RealForm::new(a), RealForm::new(b));
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut best = f64::NEG_INFINITY;
    for _ in 0..count {
        for i in 0..n {
            let z = complex_gaussian(rng);
            x[i] = z.re;
            y[i] = z.im;
        }
        best = best.max(fa.quadratic(&x, &y) / fb.quadratic(&x, &y));
    }
    best
}

/// Real roots of `x³ + b x² + c x + d` with three real roots, descending.
pub fn cubic_real_roots(b: f64, c: f64, d: f64) -> [f64; 3] {
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    if p.abs() < 1e-300 {
        let t = (-q).cbrt();
        return [t + shift; 3];
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut roots = [0, 1, 2].map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift);
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}
