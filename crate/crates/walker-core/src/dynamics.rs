//! State preparation, time evolution, and the γ-derivative of the evolved
//! state that feeds the quantum Fisher information.
//!
//! The statistical model: a preparation is a fixed recipe (amplitudes either
//! in the energy eigenbasis or the position basis); the evolved state
//! ψ_t(γ) = Σ α_j e^{−iξ_j(γ)t}|ξ_j(γ)⟩ inherits all γ-dependence from the
//! spectrum. For complete, cycle, and hypercube graphs the eigenvectors are
//! γ-independent; for bipartite families |ξ_±⟩ move with γ and contribute
//! eigenvector-derivative terms (nonzero even at t = 0).

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::check_gamma;
use crate::error::{Error, Result};
use crate::graph::{hamiltonian, GraphSpec};
use crate::spectral::{closed_form_with_derivatives, numerical_spectrum, Spectrum};

pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Default step for the central-difference derivative oracle.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Amplitudes index the ascending-eigenvalue column order of the
    /// closed-form [`Spectrum`].
    Energy,
    /// Amplitudes are position-basis components ψ_0 directly.
    Position,
}

/// A normalized initial state, expressed in either basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Preparation {
    pub basis: Basis,
    pub amplitudes: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct PrepWire {
    basis: Basis,
    /// complex amplitudes as [re, im] pairs
    amplitudes: Vec<[f64; 2]>,
}

impl Preparation {
    pub fn new(basis: Basis, amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Preparation { basis, amplitudes })
    }

    pub fn energy(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::new(Basis::Energy, amplitudes)
    }

    pub fn position(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::new(Basis::Position, amplitudes)
    }

    /// Rescales to unit norm, then constructs.
    pub fn normalized(basis: Basis, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm2.is_finite() || norm2 <= 0.0 {
            return Err(Error::NotNormalized(norm2));
        }
        let inv = 1.0 / norm2.sqrt();
        for a in &mut amplitudes {
            *a *= inv;
        }
        Ok(Preparation { basis, amplitudes })
    }

    /// Balanced superposition (|i⟩ + e^{iφ}|j⟩)/√2 of two energy eigenstates,
    /// indexed by spectrum column.
    pub fn energy_pair(dim: usize, i: usize, j: usize, phase: f64) -> Result<Self> {
        if i >= dim || j >= dim || i == j {
            return Err(Error::InvalidArgument(format!(
                "energy pair ({i}, {j}) out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        let r = std::f64::consts::FRAC_1_SQRT_2;
        amplitudes[i] = Complex64::new(r, 0.0);
        amplitudes[j] = Complex64::from_polar(r, phase);
        Ok(Preparation { basis: Basis::Energy, amplitudes })
    }

    /// Energy ground state |ξ_0⟩.
    pub fn ground(dim: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Preparation { basis: Basis::Energy, amplitudes }
    }

    /// Uniform superposition over positions.
    pub fn uniform_position(dim: usize) -> Self {
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Preparation { basis: Basis::Position, amplitudes: vec![a; dim] }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(json);
        let wire: PrepWire = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::InvalidArgument(format!("preparation at /{}: {}", e.path(), e.inner())))?;
        Self::new(
            wire.basis,
            wire.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        )
    }

    pub fn to_json(&self) -> String {
        let wire = PrepWire {
            basis: self.basis,
            amplitudes: self.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        };
        serde_json::to_string(&wire).expect("preparation serializes infallibly")
    }
}

/// ψ_t and its analytic γ-derivative, both in the position basis.
#[derive(Debug, Clone)]
pub struct EvolvedState {
    pub state: DVector<Complex64>,
    pub dstate: DVector<Complex64>,
    pub gamma: f64,
    pub t: f64,
}

impl EvolvedState {
    pub fn dim(&self) -> usize {
        self.state.len()
    }

    /// |⟨x|ψ_t⟩|² for every node x.
    pub fn position_probabilities(&self) -> Vec<f64> {
        self.state.iter().map(|a| a.norm_sqr()).collect()
    }
}

fn reject_circulant(spec: &GraphSpec, requested: &'static str) -> Result<()> {
    if matches!(spec, GraphSpec::Circulant { .. }) {
        return Err(Error::UnsupportedOperation {
            family: "circulant",
            supported: "spectrum computation",
            requested,
        });
    }
    Ok(())
}

fn check_prep_dim(prep: &Preparation, n: usize) -> Result<()> {
    if prep.dim() != n {
        return Err(Error::DimensionMismatch { got: prep.dim(), expected: n });
    }
    let norm2: f64 = prep.amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(norm2));
    }
    Ok(())
}

/// Evolves `prep` for time `t` under H(γ) and differentiates the evolved
/// state with respect to γ analytically.
pub fn evolve(spec: &GraphSpec, gamma: f64, prep: &Preparation, t: f64) -> Result<EvolvedState> {
    check_gamma(gamma)?;
    reject_circulant(spec, "time evolution")?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")));
    }
    let n = spec.node_count();
    check_prep_dim(prep, n)?;
    let h = hamiltonian(spec, gamma)?;
    let (s, ds) = closed_form_with_derivatives(&h)?;

    // energy coefficients of the initial state
    let coeff: Vec<Complex64> = match prep.basis {
        Basis::Energy => prep.amplitudes.clone(),
        Basis::Position => (0..n)
            .map(|k| {
                let col = s.eigenvectors.column(k);
                (0..n).map(|r| col[r].conj() * prep.amplitudes[r]).sum()
            })
            .collect(),
    };

    let mut state = DVector::from_element(n, Complex64::new(0.0, 0.0));
    let mut dstate = DVector::from_element(n, Complex64::new(0.0, 0.0));
    for k in 0..n {
        let ck = coeff[k];
        if ck == Complex64::new(0.0, 0.0) {
            continue;
        }
        let phase = Complex64::from_polar(1.0, -s.eigenvalues[k] * t);
        let col = s.eigenvectors.column(k);
        let w = ck * phase;
        let dw = w * Complex64::new(0.0, -t * ds.dxi[k]);
        for r in 0..n {
            state[r] += w * col[r];
            dstate[r] += dw * col[r];
        }
    }
    // eigenvector-derivative terms (bipartite ξ_± only)
    for (k, dv) in &ds.dvec {
        let phase = Complex64::from_polar(1.0, -s.eigenvalues[*k] * t);
        match prep.basis {
            Basis::Energy => {
                let ck = prep.amplitudes[*k];
                if ck == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let w = ck * phase;
                for r in 0..n {
                    dstate[r] += w * dv[r];
                }
            }
            Basis::Position => {
                // ∂(|v⟩⟨v|)ψ_0 = |∂v⟩⟨v|ψ_0⟩ + |v⟩⟨∂v|ψ_0⟩
                let col = s.eigenvectors.column(*k);
                let v_psi: Complex64 = (0..n).map(|r| col[r].conj() * prep.amplitudes[r]).sum();
                let dv_psi: Complex64 = (0..n).map(|r| dv[r].conj() * prep.amplitudes[r]).sum();
                for r in 0..n {
                    dstate[r] += phase * (dv[r] * v_psi + col[r] * dv_psi);
                }
            }
        }
    }
    Ok(EvolvedState { state, dstate, gamma, t })
}

/// ψ_t(γ′) built from the numerical spectrum, with energy-basis preparations
/// aligned to the midpoint closed-form eigenbasis.
pub(crate) fn state_at(
    spec: &GraphSpec,
    gamma_prime: f64,
    prep: &Preparation,
    t: f64,
    midpoint: &Spectrum,
) -> Result<DVector<Complex64>> {
    let n = spec.node_count();
    let h = hamiltonian(spec, gamma_prime)?;
    let num = numerical_spectrum(&h)?;
    match prep.basis {
        Basis::Position => {
            // gauge-free propagator route: V' e^{−iξ't} V'† ψ0
            let mut out = DVector::from_element(n, Complex64::new(0.0, 0.0));
            for k in 0..n {
                let col = num.eigenvectors.column(k);
                let c: Complex64 = (0..n).map(|r| col[r].conj() * prep.amplitudes[r]).sum();
                let w = c * Complex64::from_polar(1.0, -num.eigenvalues[k] * t);
                for r in 0..n {
                    out[r] += w * col[r];
                }
            }
            Ok(out)
        }
        Basis::Energy => {
            let mut out = DVector::from_element(n, Complex64::new(0.0, 0.0));
            for group in &midpoint.groups {
                if group.indices.iter().all(|&k| prep.amplitudes[k] == Complex64::new(0.0, 0.0)) {
                    continue;
                }
                let xi_g = midpoint.eigenvalues[group.indices[0]];
                // half the spectral gap to the nearest other midpoint group
                let half_gap = midpoint
                    .groups
                    .iter()
                    .filter(|g| g.indices[0] != group.indices[0])
                    .map(|g| (midpoint.eigenvalues[g.indices[0]] - xi_g).abs())
                    .fold(f64::INFINITY, f64::min)
                    / 2.0;
                let matched: Vec<usize> = (0..n)
                    .filter(|&i| (num.eigenvalues[i] - xi_g).abs() < half_gap)
                    .collect();
                if matched.len() != group.indices.len() {
                    return Err(Error::PhaseAlignment { overlap: 0.0 });
                }
                let xi_prime: f64 =
                    matched.iter().map(|&i| num.eigenvalues[i]).sum::<f64>() / matched.len() as f64;
                for &k in &group.indices {
                    let alpha = prep.amplitudes[k];
                    if alpha == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    // project the midpoint vector onto the matched eigenspace
                    let v = midpoint.eigenvectors.column(k);
                    let mut proj = DVector::from_element(n, Complex64::new(0.0, 0.0));
                    for &i in &matched {
                        let u = num.eigenvectors.column(i);
                        let ov: Complex64 = (0..n).map(|r| u[r].conj() * v[r]).sum();
                        for r in 0..n {
                            proj[r] += ov * u[r];
                        }
                    }
                    let overlap = proj.norm();
                    if overlap < 0.99 {
                        return Err(Error::PhaseAlignment { overlap });
                    }
                    let w = alpha * Complex64::from_polar(1.0, -xi_prime * t) / overlap;
                    for r in 0..n {
                        out[r] += w * proj[r];
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Central-difference oracle for ∂_γψ_t: (ψ_t(γ+h) − ψ_t(γ−h))/2h via the
/// numerical spectrum at both points.
///
/// Fails with [`Error::PhaseAlignment`] when a degenerate-subspace rotation
/// prevents matching eigenvectors across the step; callers should then fall
/// back to the fidelity-based QFI oracle, which is gauge-free.
pub fn finite_difference_dstate(
    spec: &GraphSpec,
    gamma: f64,
    prep: &Preparation,
    t: f64,
    h: Option<f64>,
) -> Result<DVector<Complex64>> {
    let h = h.unwrap_or(DEFAULT_FD_STEP);
    check_gamma(gamma)?;
    reject_circulant(spec, "derivative oracles")?;
    if !(h > 0.0) || gamma - h <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must satisfy 0 < h < gamma, got h = {h}, gamma = {gamma}"
        )));
    }
    check_prep_dim(prep, spec.node_count())?;
    let mid = closed_form_with_derivatives(&hamiltonian(spec, gamma)?)?.0;
    let plus = state_at(spec, gamma + h, prep, t, &mid)?;
    let minus = state_at(spec, gamma - h, prep, t, &mid)?;
    Ok((plus - minus) / Complex64::new(2.0 * h, 0.0))
}

/// Richardson-extrapolated central difference: evaluates at `h` and `h/2` and
/// returns `(4·D(h/2) − D(h))/3` together with the max-norm discrepancy
/// |D(h/2) − D(h)| as a step-size sanity indicator.
pub fn finite_difference_dstate_richardson(
    spec: &GraphSpec,
    gamma: f64,
    prep: &Preparation,
    t: f64,
    h: Option<f64>,
) -> Result<(DVector<Complex64>, f64)> {
    let h = h.unwrap_or(DEFAULT_FD_STEP);
    let coarse = finite_difference_dstate(spec, gamma, prep, t, Some(h))?;
    let fine = finite_difference_dstate(spec, gamma, prep, t, Some(h / 2.0))?;
    let discrepancy = (&fine - &coarse).iter().map(|c| c.norm()).fold(0.0, f64::max);
    let extrapolated = fine.map(|c| c * Complex64::new(4.0 / 3.0, 0.0))
        - coarse.map(|c| c * Complex64::new(1.0 / 3.0, 0.0));
    Ok((extrapolated, discrepancy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn t_zero_reproduces_preparation() {
        let spec = GraphSpec::Complete { n: 4 };
        let prep = Preparation::uniform_position(4);
        let ev = evolve(&spec, 0.7, &prep, 0.0).unwrap();
        for r in 0..4 {
            assert_abs_diff_eq!(ev.state[r].re, 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(ev.state[r].im, 0.0, epsilon = 1e-12);
        }
        // γ-independent eigenvectors: dstate vanishes at t = 0
        assert!(ev.dstate.norm() < 1e-12);
    }

    #[test]
    fn cycle_4_optimal_prep_goes_uniform_at_quarter_period() {
        // (|ξ_0⟩+|ξ_top⟩)/√2 with e^{−4iγt} = e^{−iπ/2}: all nodes equal 1/4
        let spec = GraphSpec::Cycle { n: 4 };
        let prep = Preparation::energy_pair(4, 0, 3, 0.0).unwrap();
        let ev = evolve(&spec, 0.5, &prep, std::f64::consts::FRAC_PI_4).unwrap();
        for p in ev.position_probabilities() {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn hypercube_3_node_probability_follows_cosine_law() {
        // |⟨node 1|ψ_t⟩|² = cos²(dγt)/2^{d−1}
        let spec = GraphSpec::Hypercube { d: 3 };
        let prep = Preparation::energy_pair(8, 0, 7, 0.0).unwrap();
        let ev = evolve(&spec, 0.4, &prep, 1.0).unwrap();
        let expected = (1.2f64).cos().powi(2) / 4.0;
        assert_abs_diff_eq!(ev.position_probabilities()[0], expected, epsilon = 1e-12);
    }

    #[test]
    fn norm_and_orthogonality_of_derivative() {
        for (spec, dim) in [
            (GraphSpec::Complete { n: 5 }, 5usize),
            (GraphSpec::Cycle { n: 6 }, 6),
            (GraphSpec::Hypercube { d: 3 }, 8),
            (GraphSpec::CompleteBipartite { p: 2, q: 3 }, 5),
        ] {
            let amps: Vec<Complex64> =
                (0..dim).map(|k| c(1.0 + k as f64, 0.3 * k as f64)).collect();
            let prep = Preparation::normalized(Basis::Energy, amps).unwrap();
            let ev = evolve(&spec, 0.9, &prep, 1.7).unwrap();
            assert_abs_diff_eq!(ev.state.norm(), 1.0, epsilon = 1e-10);
            let re_overlap: f64 = (0..dim).map(|r| (ev.dstate[r].conj() * ev.state[r]).re).sum();
            assert!(re_overlap.abs() < 1e-8, "Re⟨∂ψ|ψ⟩ = {re_overlap}");
        }
    }

    #[test]
    fn fd_oracle_matches_analytic_dstate_complete() {
        let spec = GraphSpec::Complete { n: 4 };
        let prep = Preparation::energy_pair(4, 0, 1, 0.0).unwrap();
        let ev = evolve(&spec, 0.5, &prep, 1.0).unwrap();
        let fd = finite_difference_dstate(&spec, 0.5, &prep, 1.0, Some(1e-5)).unwrap();
        for r in 0..4 {
            assert!((ev.dstate[r] - fd[r]).norm() < 1e-6);
        }
    }

    #[test]
    fn fd_oracle_zero_at_t_zero_for_fixed_eigenvectors() {
        let spec = GraphSpec::Hypercube { d: 2 };
        let prep = Preparation::energy_pair(4, 0, 3, 0.5).unwrap();
        let fd = finite_difference_dstate(&spec, 0.8, &prep, 0.0, None).unwrap();
        assert!(fd.norm() < 1e-8, "O(h²) expected, got {}", fd.norm());
    }

    #[test]
    fn fd_oracle_nonzero_at_t_zero_for_star() {
        // Star(5) balanced ξ_± prep: eigenvectors depend on γ
        let spec = GraphSpec::Star { n: 5 };
        let prep = Preparation::energy_pair(5, 0, 4, 0.0).unwrap();
        let fd = finite_difference_dstate(&spec, 0.8, &prep, 0.0, None).unwrap();
        assert!(fd.norm() > 1e-3, "expected eigenvector-derivative contribution");
        let ev = evolve(&spec, 0.8, &prep, 0.0).unwrap();
        for r in 0..5 {
            assert!((ev.dstate[r] - fd[r]).norm() < 1e-6);
        }
    }

    #[test]
    fn fd_oracle_matches_analytic_for_position_preps_on_bipartite() {
        let spec = GraphSpec::CompleteBipartite { p: 2, q: 3 };
        let amps: Vec<Complex64> = (0..5).map(|k| c(0.2 * k as f64 + 0.1, -0.15 * k as f64)).collect();
        let prep = Preparation::normalized(Basis::Position, amps).unwrap();
        let ev = evolve(&spec, 1.1, &prep, 0.9).unwrap();
        let (fd, disc) = finite_difference_dstate_richardson(&spec, 1.1, &prep, 0.9, None).unwrap();
        assert!(disc < 1e-6);
        for r in 0..5 {
            assert!((ev.dstate[r] - fd[r]).norm() < 1e-7);
        }
    }

    #[test]
    fn circulant_evolution_is_rejected() {
        let spec = GraphSpec::Circulant { n: 6, couplings: vec![1.0, 0.0, 0.5] };
        let prep = Preparation::uniform_position(6);
        assert!(matches!(
            evolve(&spec, 1.0, &prep, 1.0),
            Err(Error::UnsupportedOperation { .. })
        ));
    }

    #[test]
    fn preparation_validation_and_json() {
        assert!(Preparation::energy(vec![c(1.0, 0.0), c(0.1, 0.0)]).is_err());
        let p = Preparation::energy_pair(3, 0, 2, 1.2).unwrap();
        let json = p.to_json();
        let back = Preparation::from_json(&json).unwrap();
        assert_eq!(p, back);
        let err = Preparation::from_json(r#"{"basis":"energy","amplitudes":[[1.0]]}"#).unwrap_err();
        assert!(err.to_string().contains("amplitudes"), "{err}");
    }

    #[test]
    fn mismatched_prep_dimension_rejected() {
        let spec = GraphSpec::Complete { n: 4 };
        let prep = Preparation::ground(5);
        assert!(matches!(
            evolve(&spec, 1.0, &prep, 0.5),
            Err(Error::DimensionMismatch { got: 5, expected: 4 })
        ));
    }
}
