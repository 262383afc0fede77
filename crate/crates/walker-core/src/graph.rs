//! Graph families and the quantum-walk Hamiltonian H = D − γA.
//!
//! Node labels are 1-based in all user-facing I/O (POVM subsets, CSV dumps)
//! and 0-based internally; the map is `label = index + 1`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::config::{check_dim, check_gamma};
use crate::error::{Error, Result};

/// A named graph family with its size parameters.
///
/// Serializes to JSON as `{"family":"cycle","n":8}`,
/// `{"family":"circulant","n":6,"couplings":[1.0,0.5,0.2]}`, etc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphSpec {
    Complete { n: usize },
    Cycle { n: usize },
    /// Circulant graph with coupling profile `couplings[k-1]` at offset `k`
    /// for `k = 1..=n/2`; the symmetry w_k = w_{n−k} a circulant requires
    /// holds by construction since only ⌊n/2⌋ independent values are stored.
    Circulant { n: usize, couplings: Vec<f64> },
    /// Hypercube of dimension `d` with `2^d` nodes.
    Hypercube { d: usize },
    CompleteBipartite { p: usize, q: usize },
    /// Star with `n` nodes: the hub (label 1) plus `n−1` leaves;
    /// identical to `CompleteBipartite { p: 1, q: n−1 }`.
    Star { n: usize },
}

impl GraphSpec {
    /// Checks the family-specific size constraints and the dimension cap.
    pub fn validate(&self) -> Result<()> {
        match self {
            GraphSpec::Complete { n } | GraphSpec::Star { n } => {
                if *n < 2 {
                    return Err(Error::InvalidGraph(format!(
                        "{} requires n >= 2, got n = {n}",
                        self.family_name()
                    )));
                }
            }
            GraphSpec::Cycle { n } => {
                if *n < 3 {
                    return Err(Error::InvalidGraph(format!("cycle requires n >= 3, got n = {n}")));
                }
            }
            GraphSpec::Circulant { n, couplings } => {
                if *n < 2 {
                    return Err(Error::InvalidGraph(format!("circulant requires n >= 2, got n = {n}")));
                }
                if couplings.len() != n / 2 {
                    return Err(Error::InvalidGraph(format!(
                        "circulant with n = {n} needs exactly {} couplings, got {}",
                        n / 2,
                        couplings.len()
                    )));
                }
                if couplings.iter().any(|c| !c.is_finite() || *c < 0.0) {
                    return Err(Error::InvalidGraph(
                        "circulant couplings must be finite and non-negative".into(),
                    ));
                }
                if couplings.iter().all(|&c| c == 0.0) {
                    return Err(Error::InvalidGraph(
                        "circulant couplings must not all vanish".into(),
                    ));
                }
            }
            GraphSpec::Hypercube { d } => {
                if *d < 1 {
                    return Err(Error::InvalidGraph("hypercube requires d >= 1".into()));
                }
                if *d > 32 {
                    return Err(Error::InvalidGraph(format!("hypercube d = {d} is out of range")));
                }
            }
            GraphSpec::CompleteBipartite { p, q } => {
                if *p < 1 || *q < 1 {
                    return Err(Error::InvalidGraph(format!(
                        "complete bipartite requires p >= 1 and q >= 1, got ({p}, {q})"
                    )));
                }
            }
        }
        check_dim(self.node_count())
    }

    pub fn node_count(&self) -> usize {
        match self {
            GraphSpec::Complete { n } | GraphSpec::Cycle { n } | GraphSpec::Star { n } => *n,
            GraphSpec::Circulant { n, .. } => *n,
            GraphSpec::Hypercube { d } => 1usize << d.min(&63),
            GraphSpec::CompleteBipartite { p, q } => p + q,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            GraphSpec::Complete { .. } => "complete",
            GraphSpec::Cycle { .. } => "cycle",
            GraphSpec::Circulant { .. } => "circulant",
            GraphSpec::Hypercube { .. } => "hypercube",
            GraphSpec::CompleteBipartite { .. } => "complete_bipartite",
            GraphSpec::Star { .. } => "star",
        }
    }

    /// Parses a spec from JSON, reporting the JSON-pointer path on failure,
    /// then validates size constraints.
    pub fn from_json(json: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(json);
        let spec: GraphSpec = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::InvalidGraph(format!("at /{}: {}", e.path(), e.inner())))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("GraphSpec serializes infallibly")
    }

    /// The bipartition sizes (p, q) if this is a bipartite-shaped family.
    pub fn bipartition(&self) -> Option<(usize, usize)> {
        match self {
            GraphSpec::CompleteBipartite { p, q } => Some((*p, *q)),
            GraphSpec::Star { n } => Some((1, n - 1)),
            _ => None,
        }
    }
}

/// Adjacency matrix in the position basis.
///
/// 0/1 entries for every family except `Circulant`, whose entries carry the
/// coupling profile (offset-k entries equal `couplings[k-1]`).
pub fn adjacency(spec: &GraphSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let n = spec.node_count();
    let mut a = DMatrix::<f64>::zeros(n, n);
    match spec {
        GraphSpec::Complete { .. } => {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        a[(i, j)] = 1.0;
                    }
                }
            }
        }
        GraphSpec::Cycle { .. } => {
            for i in 0..n {
                a[(i, (i + 1) % n)] = 1.0;
                a[((i + 1) % n, i)] = 1.0;
            }
        }
        GraphSpec::Circulant { couplings, .. } => {
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let diff = i.abs_diff(j);
                    let offset = diff.min(n - diff);
                    a[(i, j)] = couplings[offset - 1];
                }
            }
        }
        GraphSpec::Hypercube { .. } => {
            for i in 0..n {
                for j in 0..i {
                    if (i ^ j).count_ones() == 1 {
                        a[(i, j)] = 1.0;
                        a[(j, i)] = 1.0;
                    }
                }
            }
        }
        GraphSpec::CompleteBipartite { .. } | GraphSpec::Star { .. } => {
            let (p, _) = spec.bipartition().unwrap();
            for i in 0..p {
                for j in p..n {
                    a[(i, j)] = 1.0;
                    a[(j, i)] = 1.0;
                }
            }
        }
    }
    Ok(a)
}

/// Vertex degrees (neighbour counts).
///
/// For circulant graphs a neighbour is counted where the coupling profile is
/// nonzero; this is the diagonal of the circulant Hamiltonian.
pub fn degrees(spec: &GraphSpec) -> Result<Vec<usize>> {
    spec.validate()?;
    let n = spec.node_count();
    Ok(match spec {
        GraphSpec::Complete { .. } => vec![n - 1; n],
        GraphSpec::Cycle { .. } => vec![2; n],
        GraphSpec::Circulant { couplings, .. } => {
            let mut d = 0usize;
            for (idx, &c) in couplings.iter().enumerate() {
                let k = idx + 1;
                if c != 0.0 {
                    d += if 2 * k == n { 1 } else { 2 };
                }
            }
            vec![d; n]
        }
        GraphSpec::Hypercube { d } => vec![*d; n],
        GraphSpec::CompleteBipartite { .. } | GraphSpec::Star { .. } => {
            let (p, q) = spec.bipartition().unwrap();
            let mut deg = vec![q; p];
            deg.extend(std::iter::repeat(p).take(q));
            deg
        }
    })
}

/// The walk Hamiltonian H = D − γA at a fixed tunnelling amplitude γ > 0.
#[derive(Debug, Clone)]
pub struct WalkHamiltonian {
    pub spec: GraphSpec,
    pub gamma: f64,
    pub matrix: DMatrix<f64>,
}

impl WalkHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Builds H = D − γA.
///
/// The on-site energy scale ε is fixed to 1, so the diagonal holds the raw
/// vertex degrees; γ = 0 is rejected because the estimation problem (and the
/// bipartite eigenvector formulas) degenerate there.
pub fn hamiltonian(spec: &GraphSpec, gamma: f64) -> Result<WalkHamiltonian> {
    check_gamma(gamma)?;
    let a = adjacency(spec)?;
    let deg = degrees(spec)?;
    let n = spec.node_count();
    let mut m = a * (-gamma);
    for i in 0..n {
        m[(i, i)] = deg[i] as f64;
    }
    Ok(WalkHamiltonian {
        spec: spec.clone(),
        gamma,
        matrix: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_3_adjacency() {
        let a = adjacency(&GraphSpec::Complete { n: 3 }).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[0., 1., 1., 1., 0., 1., 1., 1., 0.]);
        assert_eq!(a, expected);
    }

    #[test]
    fn hypercube_1_adjacency_is_single_edge() {
        let a = adjacency(&GraphSpec::Hypercube { d: 1 }).unwrap();
        assert_eq!(a, DMatrix::from_row_slice(2, 2, &[0., 1., 1., 0.]));
    }

    #[test]
    fn cycle_4_has_exactly_the_ring_edges() {
        let a = adjacency(&GraphSpec::Cycle { n: 4 }).unwrap();
        // edges {12,23,34,41} in 1-based labels
        let mut expected = DMatrix::<f64>::zeros(4, 4);
        for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            expected[(i, j)] = 1.0;
            expected[(j, i)] = 1.0;
        }
        assert_eq!(a, expected);
    }

    #[test]
    fn complete_4_hamiltonian_entries() {
        let h = hamiltonian(&GraphSpec::Complete { n: 4 }, 0.5).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 3.0 } else { -0.5 };
                assert_eq!(h.matrix[(i, j)], want);
            }
        }
    }

    #[test]
    fn cycle_3_hamiltonian_entries() {
        let h = hamiltonian(&GraphSpec::Cycle { n: 3 }, 1.0).unwrap();
        for i in 0..3 {
            assert_eq!(h.matrix[(i, i)], 2.0);
            for j in 0..3 {
                if i != j {
                    assert_eq!(h.matrix[(i, j)], -1.0);
                }
            }
        }
    }

    #[test]
    fn star_4_hamiltonian_matches_hand_assembly() {
        let h = hamiltonian(&GraphSpec::Star { n: 4 }, 1.0).unwrap();
        assert_eq!(h.matrix[(0, 0)], 3.0);
        for j in 1..4 {
            assert_eq!(h.matrix[(j, j)], 1.0);
            assert_eq!(h.matrix[(0, j)], -1.0);
            assert_eq!(h.matrix[(j, 0)], -1.0);
        }
        for i in 1..4 {
            for j in 1..4 {
                if i != j {
                    assert_eq!(h.matrix[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn gamma_zero_rejected() {
        assert!(matches!(
            hamiltonian(&GraphSpec::Complete { n: 3 }, 0.0),
            Err(Error::NonPositiveGamma(_))
        ));
    }

    #[test]
    fn invalid_sizes_rejected() {
        assert!(GraphSpec::Complete { n: 1 }.validate().is_err());
        assert!(GraphSpec::Cycle { n: 2 }.validate().is_err());
        assert!(GraphSpec::Star { n: 1 }.validate().is_err());
        assert!(GraphSpec::Hypercube { d: 0 }.validate().is_err());
        assert!(GraphSpec::CompleteBipartite { p: 0, q: 3 }.validate().is_err());
        assert!(GraphSpec::Circulant { n: 6, couplings: vec![1.0, 0.5] }.validate().is_err());
        assert!(GraphSpec::Circulant { n: 6, couplings: vec![0.0, 0.0, 0.0] }.validate().is_err());
    }

    #[test]
    fn json_round_trip_and_pointer_errors() {
        let spec = GraphSpec::Circulant { n: 6, couplings: vec![1.0, 0.5, 0.2] };
        let json = spec.to_json();
        assert_eq!(json, r#"{"family":"circulant","n":6,"couplings":[1.0,0.5,0.2]}"#);
        assert_eq!(GraphSpec::from_json(&json).unwrap(), spec);

        let err = GraphSpec::from_json(r#"{"family":"cycle","n":"eight"}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("n"), "error should name the failing field: {msg}");
    }

    #[test]
    fn circulant_special_cases_reproduce_named_families() {
        // all couplings equal -> complete graph
        let circ = GraphSpec::Circulant { n: 6, couplings: vec![1.0, 1.0, 1.0] };
        let h_circ = hamiltonian(&circ, 0.7).unwrap();
        let h_comp = hamiltonian(&GraphSpec::Complete { n: 6 }, 0.7).unwrap();
        assert_eq!(h_circ.matrix, h_comp.matrix);

        // only the first coupling nonzero -> cycle
        let ring = GraphSpec::Circulant { n: 6, couplings: vec![1.0, 0.0, 0.0] };
        let h_ring = hamiltonian(&ring, 1.3).unwrap();
        let h_cyc = hamiltonian(&GraphSpec::Cycle { n: 6 }, 1.3).unwrap();
        assert_eq!(h_ring.matrix, h_cyc.matrix);
    }

    #[test]
    fn dimension_cap_respected() {
        // Hypercube(13) = 8192 nodes exceeds the default 4096 cap.
        assert!(matches!(
            GraphSpec::Hypercube { d: 13 }.validate(),
            Err(Error::DimensionTooLarge { .. })
        ));
    }
}
