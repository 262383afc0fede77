//! Quantum and classical Fisher information for the tunnelling amplitude,
//! position-measurement POVMs, closed-form family expressions, efficiencies,
//! and Cramér–Rao bounds.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::config::check_gamma;
use crate::dynamics::{evolve, state_at, EvolvedState, Preparation};
use crate::error::{Error, Result};
use crate::graph::{hamiltonian, GraphSpec};
use crate::spectral::closed_form_spectrum;

/// Default step for the fidelity-susceptibility QFI oracle.
pub const DEFAULT_FIDELITY_STEP: f64 = 1e-4;

/// Outcome probabilities below this floor are treated as vanishing.
pub const PROBABILITY_FLOOR: f64 = 1e-14;

/// Probability-derivative floor distinguishing removable 0/0 limits from
/// genuine divergences.
pub const DERIVATIVE_FLOOR: f64 = 1e-10;

/// Quantum Fisher information of a pure state from the analytic derivative:
/// Q = 4[⟨∂ψ|∂ψ⟩ + (⟨∂ψ|ψ⟩)²]. The second term is the square of a purely
/// imaginary number, so the total is real up to rounding; the imaginary
/// residue is checked before being discarded.
pub fn qfi_pure(ev: &EvolvedState) -> Result<f64> {
    let norm2: f64 = ev.state.iter().map(|a| a.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm2));
    }
    let n = ev.dim();
    let mut dd = Complex64::new(0.0, 0.0);
    let mut ds = Complex64::new(0.0, 0.0);
    for r in 0..n {
        dd += ev.dstate[r].conj() * ev.dstate[r];
        ds += ev.dstate[r].conj() * ev.state[r];
    }
    let q = (dd + ds * ds) * 4.0;
    if q.im.abs() > 1e-10 * q.re.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "QFI imaginary residue {} exceeds tolerance for value {}",
            q.im, q.re
        )));
    }
    Ok(q.re)
}

/// Gauge-free QFI oracle from the fidelity susceptibility:
/// Q ≈ 4[(1 − f₊) + (1 − f₋)]/h² with f± = |⟨ψ_t(γ)|ψ_t(γ±h)⟩|.
///
/// The fidelity deficits are evaluated in a cancellation-free form via the
/// difference vector w = ψ(γ) − ψ(γ±h):
/// 1 − |⟨u|v⟩|² = 2Re⟨u|w⟩ − |⟨u|w⟩|², then 1 − f = s/(1 + √(1−s)).
pub fn qfi_fidelity_oracle(
    spec: &GraphSpec,
    gamma: f64,
    prep: &Preparation,
    t: f64,
    h: Option<f64>,
) -> Result<f64> {
    let h = h.unwrap_or(DEFAULT_FIDELITY_STEP);
    check_gamma(gamma)?;
    if !(h > 0.0) || gamma - h <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "fidelity step must satisfy 0 < h < gamma, got h = {h}, gamma = {gamma}"
        )));
    }
    let u = evolve(spec, gamma, prep, t)?.state;
    let mid = closed_form_spectrum(&hamiltonian(spec, gamma)?)?;
    let mut deficit_sum = 0.0;
    for sign in [1.0, -1.0] {
        let v = state_at(spec, gamma + sign * h, prep, t, &mid)?;
        let n = u.len();
        let mut uw = Complex64::new(0.0, 0.0);
        for r in 0..n {
            uw += u[r].conj() * (u[r] - v[r]);
        }
        let s = (2.0 * uw.re - uw.norm_sqr()).max(0.0);
        deficit_sum += s / (1.0 + (1.0 - s).max(0.0).sqrt());
    }
    Ok(4.0 * deficit_sum / (h * h))
}

/// A position measurement: rank-1 projectors on a monitored node subset,
/// plus the projector on the orthogonal complement when the subset is proper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionPovm {
    dim: usize,
    monitored: Vec<usize>,
    description: String,
}

impl PositionPovm {
    /// Monitored nodes given as 0-based indices; sorted and validated.
    pub fn new(dim: usize, mut monitored: Vec<usize>) -> Result<Self> {
        if monitored.is_empty() {
            return Err(Error::InvalidPovm("monitored set must be non-empty".into()));
        }
        monitored.sort_unstable();
        for w in monitored.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidPovm(format!("node {} listed twice", w[0] + 1)));
            }
        }
        if *monitored.last().unwrap() >= dim {
            return Err(Error::InvalidPovm(format!(
                "node {} out of range for {} nodes",
                monitored.last().unwrap() + 1,
                dim
            )));
        }
        let description = if monitored.len() == dim {
            "complete position measurement".to_string()
        } else if monitored.len() == 1 {
            format!("node {} + complement", monitored[0] + 1)
        } else {
            format!("{} monitored nodes + complement", monitored.len())
        };
        Ok(PositionPovm { dim, monitored, description })
    }

    /// Every node monitored individually.
    pub fn complete(dim: usize) -> Result<Self> {
        Self::new(dim, (0..dim).collect())
    }

    /// Incomplete measurement of size m: nodes 1..m monitored individually.
    pub fn first_m(dim: usize, m: usize) -> Result<Self> {
        if m == 0 || m > dim {
            return Err(Error::InvalidPovm(format!("subset size {m} not in 1..={dim}")));
        }
        Self::new(dim, (0..m).collect())
    }

    /// Nodes of a δ-dimensional sub-face of the d-dimensional hypercube
    /// (the 2^δ vertices whose coordinates outside the face are zero).
    /// δ ≥ 1: a single-node face leaves the face-total probability without
    /// both parity classes and the face FI formula does not apply.
    pub fn hypercube_face(d: usize, delta: usize) -> Result<Self> {
        if delta == 0 || delta > d {
            return Err(Error::InvalidPovm(format!(
                "face dimension must satisfy 1 <= delta <= d, got delta = {delta}, d = {d}"
            )));
        }
        Self::new(1usize << d, (0..(1usize << delta)).collect())
    }

    /// Binary measurement distinguishing the hub of a star graph from the
    /// leaves: {|1⟩⟨1|, I − |1⟩⟨1|}.
    pub fn central_node(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidPovm("central-node POVM needs at least 2 nodes".into()));
        }
        Self::new(dim, vec![0])
    }

    /// Parity-split subset on an even cycle: the first `n_odd` odd-labelled
    /// and first `n_even` even-labelled nodes (1-based labels), monitored
    /// individually. β_O = 2·n_odd/n, β_E = 2·n_even/n.
    pub fn cycle_parity(dim: usize, n_odd: usize, n_even: usize) -> Result<Self> {
        if dim % 2 != 0 {
            return Err(Error::InvalidPovm(format!(
                "parity subsets need an even cycle, got n = {dim}"
            )));
        }
        if n_odd > dim / 2 || n_even > dim / 2 {
            return Err(Error::InvalidPovm(format!(
                "parity counts ({n_odd}, {n_even}) exceed {}", dim / 2
            )));
        }
        // odd 1-based labels sit at even 0-based indices
        let mut monitored: Vec<usize> = (0..n_odd).map(|k| 2 * k).collect();
        monitored.extend((0..n_even).map(|k| 2 * k + 1));
        Self::new(dim, monitored)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn monitored(&self) -> &[usize] {
        &self.monitored
    }

    pub fn is_complete(&self) -> bool {
        self.monitored.len() == self.dim
    }

    /// Monitored singletons plus the complement element when incomplete.
    pub fn outcome_count(&self) -> usize {
        self.monitored.len() + usize::from(!self.is_complete())
    }

    pub fn outcome_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> =
            self.monitored.iter().map(|&x| format!("node {}", x + 1)).collect();
        if !self.is_complete() {
            labels.push("complement".to_string());
        }
        labels
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Outcome probabilities for a position-basis state, complement last.
    pub fn outcome_probabilities(&self, state: &DVector<Complex64>) -> Result<Vec<f64>> {
        if state.len() != self.dim {
            return Err(Error::DimensionMismatch { got: state.len(), expected: self.dim });
        }
        let mut probs: Vec<f64> =
            self.monitored.iter().map(|&x| state[x].norm_sqr()).collect();
        if !self.is_complete() {
            let mut inside = vec![false; self.dim];
            for &x in &self.monitored {
                inside[x] = true;
            }
            let rest: f64 =
                (0..self.dim).filter(|&x| !inside[x]).map(|x| state[x].norm_sqr()).sum();
            probs.push(rest);
        }
        Ok(probs)
    }
}

fn fi_term(p: f64, dp: f64, label: impl FnOnce() -> String) -> Result<f64> {
    if p < PROBABILITY_FLOOR {
        if dp.abs() < DERIVATIVE_FLOOR {
            Ok(0.0)
        } else {
            Err(Error::SingularFi { outcome: label(), prob: p, deriv: dp })
        }
    } else {
        Ok(dp * dp / p)
    }
}

/// Classical Fisher information Σ (∂_γ p)²/p of a position POVM, with
/// probabilities and derivatives taken from the analytic evolved state.
///
/// Outcomes with probability below [`PROBABILITY_FLOOR`] contribute zero when
/// the derivative also vanishes (removable limit at measure-zero parameter
/// points); otherwise the singular-FI error is raised.
pub fn fi_povm(ev: &EvolvedState, povm: &PositionPovm) -> Result<f64> {
    if povm.dim() != ev.dim() {
        return Err(Error::DimensionMismatch { got: povm.dim(), expected: ev.dim() });
    }
    let n = ev.dim();
    let mut inside = vec![false; n];
    let mut total = 0.0;
    for &x in povm.monitored() {
        inside[x] = true;
        let p = ev.state[x].norm_sqr();
        let dp = 2.0 * (ev.state[x].conj() * ev.dstate[x]).re;
        total += fi_term(p, dp, || format!("node {}", x + 1))?;
    }
    if !povm.is_complete() {
        let mut p = 0.0;
        let mut dp = 0.0;
        for x in (0..n).filter(|&x| !inside[x]) {
            p += ev.state[x].norm_sqr();
            dp += 2.0 * (ev.state[x].conj() * ev.dstate[x]).re;
        }
        total += fi_term(p, dp, || "complement".to_string())?;
    }
    Ok(total)
}

/// FI of the size-m incomplete measurement on the complete graph K_n, for the
/// balanced ground/first-excited preparation:
/// F = nt²(m − cosΦ·s + sin²Φ·s²/((n−m) − cosΦ·s)), Φ = γnt − (m−1)π/n,
/// s = sin(πm/n)/sin(π/n). For m = n the complement term is absent and
/// F = n²t² exactly.
pub fn fi_complete_graph_closed(n: usize, m: usize, gamma: f64, t: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidGraph(format!("complete graph needs n >= 2, got {n}")));
    }
    if m < 1 || m > n {
        return Err(Error::InvalidArgument(format!("subset size {m} not in 1..={n}")));
    }
    check_gamma(gamma)?;
    check_time(t)?;
    let nf = n as f64;
    if m == n {
        return Ok(nf * nf * t * t);
    }
    let mf = m as f64;
    let s = (PI * mf / nf).sin() / (PI / nf).sin();
    let phi = gamma * nf * t - (mf - 1.0) * PI / nf;
    let den = (nf - mf) - phi.cos() * s;
    if den.abs() < 1e-12 {
        // reachable only at m = n−1 with cosΦ = 1 (vanishing complement)
        return Err(Error::SingularFi {
            outcome: "complement".to_string(),
            prob: den / nf,
            deriv: t * s * phi.sin(),
        });
    }
    Ok(nf * t * t * (mf - phi.cos() * s + phi.sin().powi(2) * s * s / den))
}

/// Time-maximized efficiency of the size-m measurement on K_n:
/// max_t η^(m) = m/n + sin(πm/n)/(n·sin(π/n)); equals 2/n at m = 1 and 1 at
/// m = n.
pub fn max_efficiency_complete(n: usize, m: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidGraph(format!("complete graph needs n >= 2, got {n}")));
    }
    if m < 1 || m > n {
        return Err(Error::InvalidArgument(format!("subset size {m} not in 1..={n}")));
    }
    if m == n {
        return Ok(1.0);
    }
    let (nf, mf) = (n as f64, m as f64);
    Ok(mf / nf + (PI * mf / nf).sin() / (nf * (PI / nf).sin()))
}

/// FI of a parity-split subset measurement on an even cycle, for the balanced
/// ground/top preparation:
/// F = 16t²·(β_O + β_E − 2β_Oβ_E + (β_E−β_O)c)/(2 − (β_O+β_E) + (β_E−β_O)c)
/// with c = cos(4γt). When either fraction equals 1 the ratio is identically
/// 1 (the apparent 0/0 at c = ∓1 is removable), so F = 16t².
pub fn fi_cycle_closed(n: usize, beta_odd: f64, beta_even: f64, gamma: f64, t: f64) -> Result<f64> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidGraph(format!("parity FI needs an even cycle n >= 4, got {n}")));
    }
    check_gamma(gamma)?;
    check_time(t)?;
    for (name, beta) in [("beta_odd", beta_odd), ("beta_even", beta_even)] {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidArgument(format!("{name} = {beta} outside [0, 1]")));
        }
        let count = beta * n as f64 / 2.0;
        if (count - count.round()).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "{name} = {beta} does not correspond to a whole number of nodes for n = {n}"
            )));
        }
    }
    if beta_odd == 1.0 || beta_even == 1.0 {
        return Ok(16.0 * t * t);
    }
    let c = (4.0 * gamma * t).cos();
    let num = beta_odd + beta_even - 2.0 * beta_odd * beta_even + (beta_even - beta_odd) * c;
    let den = 2.0 - (beta_odd + beta_even) + (beta_even - beta_odd) * c;
    if den < 1e-12 {
        // den = (1−β_O)(1+c) + (1−β_E)(1−c) > 0 whenever both β < 1,
        // so this branch is defensive only
        return Err(Error::SingularFi {
            outcome: "complement".to_string(),
            prob: den / 2.0,
            deriv: -2.0 * t * (beta_even - beta_odd) * (4.0 * gamma * t).sin(),
        });
    }
    Ok(16.0 * t * t * num / den)
}

/// Time-maximized efficiency of the parity-split cycle measurement:
/// max_t η = max(β_O, β_E).
pub fn max_efficiency_cycle(beta_odd: f64, beta_even: f64) -> Result<f64> {
    for (name, beta) in [("beta_odd", beta_odd), ("beta_even", beta_even)] {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidArgument(format!("{name} = {beta} outside [0, 1]")));
        }
    }
    Ok(beta_odd.max(beta_even))
}

/// FI of a δ-face measurement on the d-hypercube for the balanced ground/top
/// preparation: F = 2^{δ−d+2}·d²t², independent of γ. Requires δ ≥ 1: a
/// 0-face contains a single parity class and the formula does not apply.
pub fn fi_hypercube_face_closed(d: usize, delta: usize, t: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidGraph("hypercube dimension must be >= 1".into()));
    }
    if delta == 0 || delta > d {
        return Err(Error::InvalidArgument(format!(
            "face dimension must satisfy 1 <= delta <= d, got delta = {delta}, d = {d}"
        )));
    }
    check_time(t)?;
    let df = d as f64;
    Ok(2f64.powi(delta as i32 - d as i32 + 2) * df * df * t * t)
}

/// Δ_{p,q} = (p−q)² + 4pqγ².
pub fn bipartite_delta(p: usize, q: usize, gamma: f64) -> f64 {
    let (pf, qf) = (p as f64, q as f64);
    (pf - qf).powi(2) + 4.0 * pf * qf * gamma * gamma
}

/// f_{p,q} = pq[16p²q²γ⁴t² + (p−q)²(1 + 4pqγ²t²)].
pub fn bipartite_f(p: usize, q: usize, gamma: f64, t: f64) -> f64 {
    let (pf, qf) = (p as f64, q as f64);
    let g2 = gamma * gamma;
    pf * qf
        * (16.0 * pf * pf * qf * qf * g2 * g2 * t * t
            + (pf - qf).powi(2) * (1.0 + 4.0 * pf * qf * g2 * t * t))
}

/// Optimal relative phase between |ξ_−⟩ and |ξ_+⟩: φ_opt = t√Δ_{p,q}.
pub fn bipartite_phi_opt(p: usize, q: usize, gamma: f64, t: f64) -> f64 {
    t * bipartite_delta(p, q, gamma).sqrt()
}

/// Preparation-optimized QFI on K_{p,q}: max Q = 4f_{p,q}/Δ_{p,q}².
pub fn qfi_bipartite_max(p: usize, q: usize, gamma: f64, t: f64) -> Result<f64> {
    check_bipartition(p, q)?;
    check_gamma(gamma)?;
    check_time(t)?;
    Ok(4.0 * bipartite_f(p, q, gamma, t) / bipartite_delta(p, q, gamma).powi(2))
}

/// QFI on K_{p,q} for the preparation α_−|ξ_−⟩ + α_+|ξ_+⟩:
/// Q = 4(f − 4g²)/Δ² with
/// g = (|α_−|² − |α_+|²)pqγt√Δ + Im(e^{it√Δ}·conj(α_+)·α_−)(p−q)√(pq).
pub fn qfi_bipartite_closed(
    p: usize,
    q: usize,
    alpha_minus: Complex64,
    alpha_plus: Complex64,
    gamma: f64,
    t: f64,
) -> Result<f64> {
    check_bipartition(p, q)?;
    check_gamma(gamma)?;
    check_time(t)?;
    let norm2 = alpha_minus.norm_sqr() + alpha_plus.norm_sqr();
    if (norm2 - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(norm2));
    }
    let (pf, qf) = (p as f64, q as f64);
    let delta = bipartite_delta(p, q, gamma);
    let f = bipartite_f(p, q, gamma, t);
    let g = (alpha_minus.norm_sqr() - alpha_plus.norm_sqr()) * pf * qf * gamma * t * delta.sqrt()
        + (Complex64::from_polar(1.0, t * delta.sqrt()) * alpha_plus.conj() * alpha_minus).im
            * (pf - qf)
            * (pf * qf).sqrt();
    Ok(4.0 * (f - 4.0 * g * g) / (delta * delta))
}

/// Efficiency η^(φ) of a position measurement on the star graph S_n for the
/// preparation (|ξ_−⟩ + e^{iφ}|ξ_+⟩)/√2, relative to the phase-optimized QFI:
/// η = (n−1)[(n−2)²cosθ − 4(n−1)√Δγ²t·sinθ]² / (f·[4(n−1)γ²sin²θ + (n−2)²])
/// with θ = φ_opt − φ, Δ = Δ_{1,n−1}, f = f_{1,n−1}. For n = 2 a position
/// measurement is optimal and η = 1.
pub fn efficiency_star(n: usize, phi: f64, gamma: f64, t: f64) -> Result<f64> {
    check_star(n)?;
    check_gamma(gamma)?;
    check_time(t)?;
    if n == 2 {
        return Ok(1.0);
    }
    let nf = n as f64;
    let delta = bipartite_delta(1, n - 1, gamma);
    let f = bipartite_f(1, n - 1, gamma, t);
    let theta = bipartite_phi_opt(1, n - 1, gamma, t) - phi;
    let a = (nf - 2.0).powi(2) * theta.cos()
        - 4.0 * (nf - 1.0) * delta.sqrt() * gamma * gamma * t * theta.sin();
    let den = f * (4.0 * (nf - 1.0) * gamma * gamma * theta.sin().powi(2) + (nf - 2.0).powi(2));
    Ok((nf - 1.0) * a * a / den)
}

/// FI of a position measurement on S_n (complete, or any subset containing
/// the hub — both give the same value): F = η^(φ)·max Q_{S_n}.
pub fn fi_star_closed(n: usize, phi: f64, gamma: f64, t: f64) -> Result<f64> {
    Ok(efficiency_star(n, phi, gamma, t)? * qfi_bipartite_max(1, n - 1, gamma, t)?)
}

/// Leading small-time behaviour of η^(φ_opt) on S_n:
/// η ≈ 1 − 4(n−1)Δ_{1,n−1}·γ²t²/(n−2)², valid for γt ≪ 1 and n ≥ 3.
pub fn star_efficiency_small_time(n: usize, gamma: f64, t: f64) -> Result<f64> {
    check_star(n)?;
    if n < 3 {
        return Err(Error::InvalidArgument(
            "small-time expansion needs n >= 3 (eta = 1 identically at n = 2)".into(),
        ));
    }
    check_gamma(gamma)?;
    check_time(t)?;
    let nf = n as f64;
    let delta = bipartite_delta(1, n - 1, gamma);
    Ok(1.0 - 4.0 * (nf - 1.0) * delta * gamma * gamma * t * t / (nf - 2.0).powi(2))
}

/// Large-n asymptote of η^(φ_opt) on S_n: η ≈ 1/(4γ²t²n).
pub fn star_efficiency_large_n(n: usize, gamma: f64, t: f64) -> Result<f64> {
    check_star(n)?;
    check_gamma(gamma)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "large-n asymptote needs t > 0, got {t}"
        )));
    }
    Ok(1.0 / (4.0 * gamma * gamma * t * t * n as f64))
}

/// Popoviciu's inequality: Var ≤ (max − min)²/4 for a bounded random
/// variable. `probs` documents the distribution the bound applies to and is
/// validated; the bound itself depends only on the value range.
pub fn popoviciu_bound(values: &[f64], probs: &[f64]) -> Result<f64> {
    if values.is_empty() || values.len() != probs.len() {
        return Err(Error::InvalidArgument(format!(
            "need matching non-empty values/probs, got {} and {}",
            values.len(),
            probs.len()
        )));
    }
    let total: f64 = probs.iter().sum();
    if probs.iter().any(|&p| !(-1e-12..=1.0 + 1e-12).contains(&p)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "probabilities must lie in [0,1] and sum to 1, got sum {total}"
        )));
    }
    let max = values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let min = values.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    Ok((max - min).powi(2) / 4.0)
}

/// A Cramér–Rao variance bound; `Unbounded` when the Fisher information
/// vanishes and γ is unidentifiable from this measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceBound {
    Bounded(f64),
    Unbounded,
}

impl VarianceBound {
    pub fn value(self) -> Option<f64> {
        match self {
            VarianceBound::Bounded(v) => Some(v),
            VarianceBound::Unbounded => None,
        }
    }
}

/// Var(γ̂) ≥ 1/(N·F) for N independent shots.
pub fn cramer_rao(fisher: f64, shots: u64) -> Result<VarianceBound> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be >= 1".into()));
    }
    if !fisher.is_finite() || fisher < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "Fisher information must be finite and >= 0, got {fisher}"
        )));
    }
    if fisher == 0.0 {
        return Ok(VarianceBound::Unbounded);
    }
    Ok(VarianceBound::Bounded(1.0 / (shots as f64 * fisher)))
}

/// Joint QFI/FI report for one (graph, γ, t, preparation, POVM, N) context.
#[derive(Debug, Clone, Serialize)]
pub struct EstimationReport {
    pub family: String,
    pub n: usize,
    pub gamma: f64,
    pub t: f64,
    pub prep: String,
    pub povm: String,
    pub shots: u64,
    pub qfi: f64,
    /// None when the FI is singular (zero-probability outcome with nonzero
    /// derivative); `fi_diagnostic` then explains the offending outcome.
    pub fi: Option<f64>,
    pub fi_diagnostic: Option<String>,
    /// fi/qfi for this same preparation; None when undefined.
    pub efficiency: Option<f64>,
    /// 1/(N·fi); None when fi is zero or singular.
    pub crb_variance: Option<f64>,
    /// 1/(N·qfi); None when qfi is zero.
    pub qcrb_variance: Option<f64>,
}

/// Evolves, computes QFI and FI, and assembles the report. A singular FI is
/// reported as a diagnostic rather than an error so sweeps can keep going.
pub fn estimation_report(
    spec: &GraphSpec,
    gamma: f64,
    prep: &Preparation,
    t: f64,
    povm: &PositionPovm,
    shots: u64,
    prep_desc: &str,
) -> Result<EstimationReport> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be >= 1".into()));
    }
    let ev = evolve(spec, gamma, prep, t)?;
    let qfi = qfi_pure(&ev)?;
    let (fi, fi_diagnostic) = match fi_povm(&ev, povm) {
        Ok(v) => (Some(v), None),
        Err(e @ Error::SingularFi { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let efficiency = match fi {
        Some(f) if qfi > 0.0 => Some(f / qfi),
        _ => None,
    };
    let crb_variance = fi.and_then(|f| cramer_rao(f, shots).ok()).and_then(VarianceBound::value);
    let qcrb_variance = cramer_rao(qfi, shots)?.value();
    Ok(EstimationReport {
        family: spec.family_name().to_string(),
        n: spec.node_count(),
        gamma,
        t,
        prep: prep_desc.to_string(),
        povm: povm.description().to_string(),
        shots,
        qfi,
        fi,
        fi_diagnostic,
        efficiency,
        crb_variance,
        qcrb_variance,
    })
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

fn check_bipartition(p: usize, q: usize) -> Result<()> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidGraph(format!(
            "bipartition sizes must be >= 1, got ({p}, {q})"
        )));
    }
    Ok(())
}

fn check_star(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidGraph(format!("star graph needs n >= 2, got {n}")));
    }
    Ok(())
}
