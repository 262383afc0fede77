//! Maximizations: QFI over initial preparations (closed-form recipes and a
//! numerical sphere search), efficiency over interrogation time, QFI over
//! bipartition size, and the star-graph optimal node count.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::check_gamma;
use crate::dynamics::{evolve, Basis, Preparation};
use crate::error::{Error, Result};
use crate::graph::{hamiltonian, GraphSpec};
use crate::metrology::{bipartite_phi_opt, qfi_bipartite_max, qfi_pure};
use crate::spectral::closed_form_with_derivatives;

/// A preparation achieving the family's maximum QFI, with the recipe it
/// realizes: a balanced superposition of two eigenbasis columns with a
/// relative phase (φ_opt for bipartite families, 0 otherwise).
#[derive(Debug, Clone)]
pub struct OptimalPreparation {
    pub preparation: Preparation,
    /// spectrum column indices of the superposed pair, ascending order
    pub pair: (usize, usize),
    pub phase: f64,
    pub description: String,
}

/// Closed-form maximum QFI over initial preparations, together with a
/// preparation achieving it.
///
/// Complete: n²t² (ground + any excited state); cycle: 16t² for even n and
/// 4t²[1+cos(π/n)]² for odd n (ground + top pair member); hypercube: 4d²t²;
/// bipartite/star: 4f_{p,q}/Δ² via the balanced |ξ_±⟩ pair at phase t√Δ.
pub fn max_qfi(spec: &GraphSpec, gamma: f64, t: f64) -> Result<(OptimalPreparation, f64)> {
    check_gamma(gamma)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")));
    }
    spec.validate()?;
    let n = spec.node_count();
    let (value, phase, description) = match spec {
        GraphSpec::Complete { n } => {
            let nf = *n as f64;
            (nf * nf * t * t, 0.0, "balanced ground/excited superposition".to_string())
        }
        GraphSpec::Cycle { n } => {
            let nf = *n as f64;
            let value = if n % 2 == 0 {
                16.0 * t * t
            } else {
                4.0 * t * t * (1.0 + (std::f64::consts::PI / nf).cos()).powi(2)
            };
            (value, 0.0, "balanced ground/top superposition".to_string())
        }
        GraphSpec::Hypercube { d } => {
            let df = *d as f64;
            (4.0 * df * df * t * t, 0.0, "balanced ground/top superposition".to_string())
        }
        GraphSpec::CompleteBipartite { .. } | GraphSpec::Star { .. } => {
            let (p, q) = spec.bipartition().unwrap();
            (
                qfi_bipartite_max(p, q, gamma, t)?,
                bipartite_phi_opt(p, q, gamma, t),
                "balanced moving-pair superposition at the optimal phase".to_string(),
            )
        }
        GraphSpec::Circulant { .. } => {
            return Err(Error::UnsupportedOperation {
                family: "circulant",
                supported: "spectrum computation",
                requested: "QFI maximization",
            });
        }
    };
    // Complete graphs pair the ground state with the first excited column
    // (the k=1 Fourier mode): any excited column gives the same QFI, but the
    // node-subset FI formulas assume this one. Everywhere else the extreme
    // eigenvalues are required, and the top sits at sorted index n−1.
    let pair = match spec {
        GraphSpec::Complete { .. } => (0, 1),
        _ => (0, n - 1),
    };
    let preparation = Preparation::energy_pair(n, pair.0, pair.1, phase)?;
    Ok((OptimalPreparation { preparation, pair, phase, description }, value))
}

/// Result of the numerical preparation search.
#[derive(Debug, Clone)]
pub struct PrepSearch {
    pub preparation: Preparation,
    pub qfi: f64,
    /// false when the iteration budget ran out while still improving;
    /// the best value found is returned regardless
    pub converged: bool,
}

/// Maximizes qfi_pure over normalized energy-basis amplitude vectors by
/// projected gradient ascent with seeded random restarts.
///
/// With ψ_t = VEα and ∂ψ = Gα (G collecting eigenvalue and eigenvector
/// derivatives), Q(α) = 4[α†Aα + Re((α†Bα)²)] for A = G†G, B = G†VE, and the
/// conjugate-coordinate gradient is 4[Aα + wBα + w̄B†α] with w = α†Bα.
/// Restart batches run in parallel; the result is deterministic for a seed.
pub fn numeric_prep_search(
    spec: &GraphSpec,
    gamma: f64,
    t: f64,
    restarts: usize,
    seed: u64,
) -> Result<PrepSearch> {
    check_gamma(gamma)?;
    if restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    if matches!(spec, GraphSpec::Circulant { .. }) {
        return Err(Error::UnsupportedOperation {
            family: "circulant",
            supported: "spectrum computation",
            requested: "preparation search",
        });
    }
    let n = spec.node_count();
    if n > 64 {
        return Err(Error::DimensionTooLarge { dim: n, max: 64 });
    }
    let h = hamiltonian(spec, gamma)?;
    let (s, ds) = closed_form_with_derivatives(&h)?;

    // G = V·(−it·diag(dξ))·E + dV·E, column k scaled by e^{−iξ_k t}
    let mut g = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut ve = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for k in 0..n {
        let phase = Complex64::from_polar(1.0, -s.eigenvalues[k] * t);
        let dphase = phase * Complex64::new(0.0, -t * ds.dxi[k]);
        for r in 0..n {
            ve[(r, k)] = s.eigenvectors[(r, k)] * phase;
            g[(r, k)] = s.eigenvectors[(r, k)] * dphase;
        }
    }
    for (k, dv) in &ds.dvec {
        let phase = Complex64::from_polar(1.0, -s.eigenvalues[*k] * t);
        for r in 0..n {
            g[(r, *k)] += dv[r] * phase;
        }
    }
    let a = g.adjoint() * &g;
    let b = g.adjoint() * &ve;
    let b_adj = b.adjoint();

    let q_of = |alpha: &DVector<Complex64>| -> f64 {
        let a_alpha = &a * alpha;
        let b_alpha = &b * alpha;
        let quad_a: Complex64 = alpha.iter().zip(a_alpha.iter()).map(|(x, y)| x.conj() * y).sum();
        let w: Complex64 = alpha.iter().zip(b_alpha.iter()).map(|(x, y)| x.conj() * y).sum();
        4.0 * (quad_a.re + (w * w).re)
    };

    let runs: Vec<(f64, DVector<Complex64>, bool)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (r as u64).wrapping_mul(0x9E3779B97F4A7C15));
            let mut alpha = DVector::from_fn(n, |_, _| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            alpha /= Complex64::new(alpha.norm(), 0.0);
            let mut value = q_of(&alpha);
            let mut step = 0.05;
            let mut converged = false;
            for _ in 0..500 {
                let a_alpha = &a * &alpha;
                let b_alpha = &b * &alpha;
                let badj_alpha = &b_adj * &alpha;
                let w: Complex64 =
                    alpha.iter().zip(b_alpha.iter()).map(|(x, y)| x.conj() * y).sum();
                let grad = (a_alpha + &b_alpha * w + &badj_alpha * w.conj())
                    * Complex64::new(4.0, 0.0);
                // backtracking ascent on the unit sphere
                let mut advanced = false;
                while step > 1e-12 {
                    let mut cand = &alpha + &grad * Complex64::new(step, 0.0);
                    cand /= Complex64::new(cand.norm(), 0.0);
                    let cand_value = q_of(&cand);
                    if cand_value > value {
                        let gain = cand_value - value;
                        alpha = cand;
                        value = cand_value;
                        advanced = true;
                        step *= 1.2;
                        if gain < 1e-13 * (1.0 + value.abs()) {
                            converged = true;
                        }
                        break;
                    }
                    step *= 0.5;
                }
                if !advanced {
                    converged = true;
                    break;
                }
                if converged {
                    break;
                }
            }
            (value, alpha, converged)
        })
        .collect();

    let (best_value, best_alpha, converged) = runs
        .into_iter()
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .expect("at least one restart");
    let preparation =
        Preparation::normalized(Basis::Energy, best_alpha.iter().copied().collect())?;
    // report the QFI through the standard evaluation path, not the
    // optimizer's internal quadratic form
    let ev = evolve(spec, gamma, &preparation, t)?;
    let qfi = qfi_pure(&ev)?;
    debug_assert!((qfi - best_value).abs() <= 1e-8 * (1.0 + qfi.abs()));
    Ok(PrepSearch { preparation, qfi, converged })
}

/// Time-maximized efficiency targets with closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeOptimalTarget {
    /// Size-m subset measurement on K_n: max_t η = m/n + sin(πm/n)/(n sin(π/n)).
    CompleteSubset { n: usize, m: usize },
    /// Parity-split measurement on an even cycle: max_t η = max(β_O, β_E).
    CycleParity { beta_odd: f64, beta_even: f64 },
}

pub fn max_efficiency_over_t(target: TimeOptimalTarget) -> Result<f64> {
    match target {
        TimeOptimalTarget::CompleteSubset { n, m } => {
            crate::metrology::max_efficiency_complete(n, m)
        }
        TimeOptimalTarget::CycleParity { beta_odd, beta_even } => {
            crate::metrology::max_efficiency_cycle(beta_odd, beta_even)
        }
    }
}

/// The bipartition of n nodes maximizing the bipartite QFI: p = ⌊n/2⌋.
pub fn optimal_bipartition(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidGraph(format!(
            "bipartite graph needs n >= 2 nodes, got {n}"
        )));
    }
    Ok(n / 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeRegime {
    /// γt ≪ 1
    SmallTime,
    /// γt ≫ 1
    LargeTime,
}

/// Asymptotically optimal star-graph size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StarNOpt {
    Finite(f64),
    /// max Q is nondecreasing in n; no finite optimum
    Unbounded,
}

/// Asymptotic optimal node count for the star graph.
///
/// Small times: n_opt ≈ 2[1 + γ² + γ√(1+γ)]. Large times: unbounded when
/// 1/γ² ≤ 2, else n_opt ≈ 2(1/γ² − 1)/(1/γ² − 2); γ within 1e−9 of the
/// regime boundary 1/γ² = 2 is rejected.
pub fn star_n_opt(gamma: f64, regime: TimeRegime) -> Result<StarNOpt> {
    check_gamma(gamma)?;
    match regime {
        TimeRegime::SmallTime => {
            Ok(StarNOpt::Finite(2.0 * (1.0 + gamma * gamma + gamma * (1.0 + gamma).sqrt())))
        }
        TimeRegime::LargeTime => {
            let r = 1.0 / (gamma * gamma);
            if (r - 2.0).abs() < 1e-9 {
                return Err(Error::RegimeBoundary(gamma));
            }
            if r < 2.0 {
                Ok(StarNOpt::Unbounded)
            } else {
                Ok(StarNOpt::Finite(2.0 * (r - 1.0) / (r - 2.0)))
            }
        }
    }
}

/// Exact preparation-optimized star QFI, max Q_{S_n} = 4f_{1,n−1}/Δ².
pub fn star_exact_max_qfi(n: usize, gamma: f64, t: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidGraph(format!("star graph needs n >= 2, got {n}")));
    }
    qfi_bipartite_max(1, n - 1, gamma, t)
}

/// Integer grid search for the n maximizing the exact star QFI on
/// n ∈ [n_min, n_max]; ties resolve to the smallest n.
pub fn star_argmax_n(gamma: f64, t: f64, n_min: usize, n_max: usize) -> Result<usize> {
    if n_min < 2 || n_max < n_min {
        return Err(Error::InvalidArgument(format!(
            "need 2 <= n_min <= n_max, got [{n_min}, {n_max}]"
        )));
    }
    let mut best = (n_min, f64::NEG_INFINITY);
    for n in n_min..=n_max {
        let q = star_exact_max_qfi(n, gamma, t)?;
        if q > best.1 {
            best = (n, q);
        }
    }
    Ok(best.0)
}
