//! Shared helpers for the integration tests: a dense matrix-exponential
//! propagator (scaling and squaring on the Taylor series) as an oracle that
//! never touches the eigendecomposition code paths, plus random-state
//! utilities.

// each test target compiles its own copy and uses a different subset
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use walker_core::{hamiltonian, GraphSpec};

/// exp(M) for a dense complex matrix by scaling and squaring: the Taylor
/// series converges quickly once ‖M/2^s‖₁ ≤ 1/2.
pub fn expm(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let norm: f64 = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm <= 0.5 { 0 } else { (norm / 0.5).log2().ceil() as u32 };
    let scaled = m.map(|z| z / Complex64::new(2f64.powi(s as i32), 0.0));

    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=24 {
        term = (&term * &scaled).map(|z| z / Complex64::new(k as f64, 0.0));
        result += &term;
        if term.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// exp(−iHt)ψ₀ straight from the Hamiltonian matrix, independent of any
/// spectral decomposition.
pub fn expm_evolve(
    spec: &GraphSpec,
    gamma: f64,
    psi0: &DVector<Complex64>,
    t: f64,
) -> DVector<Complex64> {
    let h = hamiltonian(spec, gamma).expect("valid spec");
    let m = h.matrix.map(|x| Complex64::new(0.0, -t * x));
    expm(&m) * psi0
}

/// Haar-ish random normalized complex vector.
pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
        .collect();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
