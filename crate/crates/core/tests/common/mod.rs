//! Independent reference computations for the integration tests. Everything
//! here is written directly from the matrix definitions, without going
//! through the library's fast paths.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rrfilt::C64;

pub type Mat = Vec<Vec<C64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| rand_c(rng)).collect()
}

pub fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// `M x M` lower-triangular Toeplitz matrix with `V[m][c] = v[m - c]`.
pub fn toeplitz_matrix(v: &[C64], m: usize) -> Mat {
    (0..m)
        .map(|row| {
            (0..m)
                .map(|col| {
                    if row >= col && row - col < v.len() {
                        v[row - col]
                    } else {
                        zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// `D x M` selection matrix of a pattern.
pub fn selection_matrix(indices: &[usize], m: usize) -> Mat {
    indices
        .iter()
        .map(|&idx| {
            (0..m)
                .map(|c| if c == idx { C64::new(1.0, 0.0) } else { zero() })
                .collect()
        })
        .collect()
}

pub fn hermitian(a: &Mat) -> Mat {
    let (rows, cols) = (a.len(), a[0].len());
    (0..cols)
        .map(|c| (0..rows).map(|r| a[r][c].conj()).collect())
        .collect()
}

pub fn mat_vec(a: &Mat, x: &[C64]) -> Vec<C64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn conj(x: &[C64]) -> Vec<C64> {
    x.iter().map(|z| z.conj()).collect()
}

/// JIDF output `w_bar^H D V^H r` from explicit matrices.
pub fn jidf_output_reference(v: &[C64], w_bar: &[C64], pattern: &[usize], r: &[C64]) -> C64 {
    let m = r.len();
    let interpolated = mat_vec(&hermitian(&toeplitz_matrix(v, m)), r);
    let reduced = mat_vec(&selection_matrix(pattern, m), &interpolated);
    inner(w_bar, &reduced)
}

/// Zeroth-order Bessel function of the first kind by power series.
pub fn bessel_j0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= -q / (k as f64 * k as f64);
        sum += term;
        if term.abs() < 1e-17 {
            break;
        }
    }
    sum
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
