//! Eigen-decompositions of the walk Hamiltonian: closed forms per family and
//! a generic numerical diagonalizer used as the cross-check oracle.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::config::check_dim;
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, WalkHamiltonian};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSource {
    ClosedForm,
    Numerical,
}

impl SpectrumSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpectrumSource::ClosedForm => "closed_form",
            SpectrumSource::Numerical => "numerical",
        }
    }
}

/// A maximal set of equal eigenvalues, with a human-readable label.
///
/// Closed-form groups reflect the construction (values inside a group are
/// bit-identical); numerical groups are detected with an absolute gap
/// tolerance of 1e-9.
#[derive(Debug, Clone)]
pub struct MultiplicityGroup {
    pub label: String,
    /// Contiguous indices into the ascending eigenvalue order.
    pub indices: Vec<usize>,
}

/// Full eigensystem of a [`WalkHamiltonian`], eigenvalues ascending.
///
/// Column `k` of `eigenvectors` belongs to `eigenvalues[k]`. Energy-basis
/// preparations index amplitudes by this column order, so the per-family
/// ordering (documented on [`closed_form_spectrum`]) is part of the API.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
    pub groups: Vec<MultiplicityGroup>,
    pub source: SpectrumSource,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.indices.len()).collect()
    }

    /// Index of the highest-eigenvalue column.
    pub fn top_index(&self) -> usize {
        self.eigenvalues.len() - 1
    }
}

/// γ-derivatives of the closed-form eigensystem.
///
/// `dvec` lists the columns whose eigenVECTORS move with γ; it is empty for
/// every family except complete bipartite (where only |ξ_±⟩ depend on γ).
#[derive(Debug, Clone)]
pub(crate) struct SpectralDerivatives {
    pub dxi: Vec<f64>,
    pub dvec: Vec<(usize, DVector<Complex64>)>,
}

fn fourier_column(n: usize, j: usize) -> DVector<Complex64> {
    let norm = 1.0 / (n as f64).sqrt();
    DVector::from_fn(n, |k, _| {
        let theta = 2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / (n as f64);
        Complex64::new(theta.cos() * norm, theta.sin() * norm)
    })
}

/// Orthonormal Hadamard matrix B_d from the tensor-power recursion;
/// entry (r, c) = ±2^{−d/2} with sign (−1)^{popcount(r AND c)}.
pub fn hadamard_matrix(d: usize) -> Result<DMatrix<f64>> {
    if d < 1 {
        return Err(Error::InvalidArgument("hadamard_matrix requires d >= 1".into()));
    }
    if d > 32 {
        return Err(Error::InvalidArgument(format!("hadamard dimension d = {d} out of range")));
    }
    let n = 1usize << d;
    check_dim(n)?;
    let scale = 2f64.powi(-(d as i32) / 2) * if d % 2 == 1 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
    Ok(DMatrix::from_fn(n, n, |r, c| {
        if (r & c).count_ones() % 2 == 0 {
            scale
        } else {
            -scale
        }
    }))
}

/// Helmert vector κ (1-based) on a window of size `len` starting at `offset`:
/// (1,...,1,−κ,0,...,0)/√(κ(κ+1)). These are exactly the Gram–Schmidt
/// orthonormalization of the difference vectors (e_1−e_{κ+1})/√2 and span the
/// complement of the all-ones direction on the window.
fn helmert_column(n: usize, offset: usize, kappa: usize) -> DVector<Complex64> {
    let norm = 1.0 / ((kappa * (kappa + 1)) as f64).sqrt();
    let mut v = DVector::from_element(n, Complex64::new(0.0, 0.0));
    for i in 0..kappa {
        v[offset + i] = Complex64::new(norm, 0.0);
    }
    v[offset + kappa] = Complex64::new(-(kappa as f64) * norm, 0.0);
    v
}

struct GroupBuild {
    value: f64,
    dvalue: f64,
    label: String,
    columns: Vec<DVector<Complex64>>,
    dcolumns: Option<Vec<DVector<Complex64>>>,
}

fn assemble(n: usize, mut groups: Vec<GroupBuild>, presorted: bool) -> (Spectrum, SpectralDerivatives) {
    if !presorted {
        groups.sort_by(|a, b| a.value.total_cmp(&b.value));
    }
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut out_groups = Vec::with_capacity(groups.len());
    let mut dxi = Vec::with_capacity(n);
    let mut dvec = Vec::new();
    let mut col = 0usize;
    for g in groups {
        let start = col;
        for (i, v) in g.columns.iter().enumerate() {
            eigenvalues.push(g.value);
            dxi.push(g.dvalue);
            eigenvectors.set_column(col, v);
            if let Some(dcols) = &g.dcolumns {
                dvec.push((col, dcols[i].clone()));
            }
            col += 1;
        }
        out_groups.push(MultiplicityGroup {
            label: g.label,
            indices: (start..col).collect(),
        });
    }
    debug_assert_eq!(col, n);
    (
        Spectrum {
            eigenvalues,
            eigenvectors,
            groups: out_groups,
            source: SpectrumSource::ClosedForm,
        },
        SpectralDerivatives { dxi, dvec },
    )
}

pub(crate) fn closed_form_with_derivatives(
    h: &WalkHamiltonian,
) -> Result<(Spectrum, SpectralDerivatives)> {
    let gamma = h.gamma;
    let n = h.dim();
    match &h.spec {
        GraphSpec::Complete { .. } => {
            let nf = n as f64;
            let ground = GroupBuild {
                value: (nf - 1.0) * (1.0 - gamma),
                dvalue: -(nf - 1.0),
                label: "j=0 (ground)".into(),
                columns: vec![fourier_column(n, 0)],
                dcolumns: None,
            };
            let excited = GroupBuild {
                value: (nf - 1.0) + gamma,
                dvalue: 1.0,
                label: format!("j=1..{} (excited)", n - 1),
                columns: (1..n).map(|j| fourier_column(n, j)).collect(),
                dcolumns: None,
            };
            Ok(assemble(n, vec![ground, excited], true))
        }
        GraphSpec::Cycle { .. } => {
            let mut groups = Vec::new();
            for j in 0..=(n / 2) {
                let c = (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos();
                let value = 2.0 - 2.0 * gamma * c;
                let dvalue = -2.0 * c;
                let (label, columns) = if j == 0 {
                    ("j=0 (ground)".to_string(), vec![fourier_column(n, 0)])
                } else if 2 * j == n {
                    (format!("j={j} (top, n even)"), vec![fourier_column(n, j)])
                } else {
                    (
                        format!("j={{{j},{}}}", n - j),
                        vec![fourier_column(n, j), fourier_column(n, n - j)],
                    )
                };
                groups.push(GroupBuild { value, dvalue, label, columns, dcolumns: None });
            }
            // cos(2πj/n) decreases over j = 0..n/2, so the values ascend already
            Ok(assemble(n, groups, true))
        }
        GraphSpec::Circulant { couplings, .. } => {
            let deg = crate::graph::degrees(&h.spec)?[0] as f64;
            let mut groups = Vec::new();
            for j in 0..=(n / 2) {
                // Fourier symbol of the coupling profile at frequency j
                let mut s = 0.0;
                for (idx, &w) in couplings.iter().enumerate() {
                    let k = idx + 1;
                    if 2 * k == n {
                        s += w * if j % 2 == 0 { 1.0 } else { -1.0 };
                    } else {
                        s += 2.0 * w * (2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64).cos();
                    }
                }
                let value = deg - gamma * s;
                let dvalue = -s;
                let (label, columns) = if j == 0 {
                    ("j=0".to_string(), vec![fourier_column(n, 0)])
                } else if 2 * j == n {
                    (format!("j={j} (n even)"), vec![fourier_column(n, j)])
                } else {
                    (
                        format!("j={{{j},{}}}", n - j),
                        vec![fourier_column(n, j), fourier_column(n, n - j)],
                    )
                };
                groups.push(GroupBuild { value, dvalue, label, columns, dcolumns: None });
            }
            Ok(assemble(n, groups, false))
        }
        GraphSpec::Hypercube { d } => {
            let d = *d;
            let b = hadamard_matrix(d)?;
            let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); d + 1];
            for c in 0..n {
                by_level[c.count_ones() as usize].push(c);
            }
            let mut groups = Vec::new();
            for (j, cols) in by_level.into_iter().enumerate() {
                let value = d as f64 - gamma * (d as f64 - 2.0 * j as f64);
                let dvalue = -(d as f64 - 2.0 * j as f64);
                let columns = cols
                    .iter()
                    .map(|&c| {
                        DVector::from_fn(n, |r, _| Complex64::new(b[(r, c)], 0.0))
                    })
                    .collect::<Vec<_>>();
                groups.push(GroupBuild {
                    value,
                    dvalue,
                    label: format!("level j={j}, multiplicity {}", columns.len()),
                    columns,
                    dcolumns: None,
                });
            }
            // ξ_j = d(1−γ) + 2γj ascends with the level
            Ok(assemble(n, groups, true))
        }
        GraphSpec::CompleteBipartite { .. } | GraphSpec::Star { .. } => {
            let (p, q) = h.spec.bipartition().unwrap();
            let (pf, qf) = (p as f64, q as f64);
            let delta = (pf - qf).powi(2) + 4.0 * pf * qf * gamma * gamma;
            let sq = delta.sqrt();
            let mut groups = Vec::new();

            // non-degenerate ξ_± pair, eigenvectors depending on γ
            for (sign, name) in [(-1.0, "xi_minus"), (1.0, "xi_plus")] {
                let xi = ((pf + qf) + sign * sq) / 2.0;
                let dxi = sign * 2.0 * pf * qf * gamma / sq;
                let c = (pf - xi) / (gamma * pf);
                let dc = -dxi / (gamma * pf) - c / gamma;
                let eta = 1.0 / (pf * c * c + qf).sqrt();
                let deta = -eta.powi(3) * pf * c * dc;
                let mut v = DVector::from_element(n, Complex64::new(eta, 0.0));
                let mut dv = DVector::from_element(n, Complex64::new(deta, 0.0));
                for i in 0..p {
                    v[i] = Complex64::new(eta * c, 0.0);
                    dv[i] = Complex64::new(deta * c + eta * dc, 0.0);
                }
                groups.push(GroupBuild {
                    value: xi,
                    dvalue: dxi,
                    label: name.into(),
                    columns: vec![v],
                    dcolumns: Some(vec![dv]),
                });
            }

            // degenerate kernels: ξ_1 = q on the p-partition, ξ_2 = p on the q-partition
            let mut kernel = |value: f64, label: String, offset: usize, size: usize| {
                if size >= 2 {
                    groups.push(GroupBuild {
                        value,
                        dvalue: 0.0,
                        label,
                        columns: (1..size).map(|k| helmert_column(n, offset, k)).collect(),
                        dcolumns: None,
                    });
                }
            };
            if p == q {
                // ξ_1 = ξ_2 exactly; one merged group spanning both partitions
                let cols: Vec<_> = (1..p)
                    .map(|k| helmert_column(n, 0, k))
                    .chain((1..q).map(|k| helmert_column(n, p, k)))
                    .collect();
                if !cols.is_empty() {
                    groups.push(GroupBuild {
                        value: pf,
                        dvalue: 0.0,
                        label: "xi_1=xi_2 (p=q, both difference bases)".into(),
                        columns: cols,
                        dcolumns: None,
                    });
                }
            } else {
                kernel(qf, "xi_1=q (difference basis on the p-partition)".into(), 0, p);
                kernel(pf, "xi_2=p (difference basis on the q-partition)".into(), p, q);
            }
            // ξ_− < min(p,q) ≤ max(p,q) < ξ_+ for γ > 0, so sorting is safe
            Ok(assemble(n, groups, false))
        }
    }
}

/// Closed-form eigensystem, eigenvalues ascending, degenerate groups exact.
///
/// Column order inside groups is deterministic: Fourier index order for
/// complete/cycle/circulant (pairs {j, n−j} adjacent, j first), Hadamard
/// column index order within each hypercube level, and Helmert vectors
/// κ = 1, 2, ... on each bipartite partition.
pub fn closed_form_spectrum(h: &WalkHamiltonian) -> Result<Spectrum> {
    closed_form_with_derivatives(h).map(|(s, _)| s)
}

/// Numerical symmetric eigendecomposition (oracle for the closed forms).
///
/// Degenerate groups are detected with an absolute gap tolerance of 1e-9.
pub fn numerical_spectrum(h: &WalkHamiltonian) -> Result<Spectrum> {
    let n = h.dim();
    check_dim(n)?;
    let eig = nalgebra::linalg::SymmetricEigen::try_new(h.matrix.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| {
            let norm = h.matrix.norm();
            Error::Numerical(format!(
                "symmetric QR did not converge for {} (dim {n}, Frobenius norm {norm:.3e})",
                h.spec.family_name()
            ))
        })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (col, &i) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[(r, col)] = Complex64::new(eig.eigenvectors[(r, i)], 0.0);
        }
    }

    const GAP_TOL: f64 = 1e-9;
    let mut groups = Vec::new();
    let mut start = 0usize;
    for k in 1..=n {
        if k == n || eigenvalues[k] - eigenvalues[k - 1] > GAP_TOL {
            groups.push(MultiplicityGroup {
                label: format!("cluster at {:.12} (multiplicity {})", eigenvalues[start], k - start),
                indices: (start..k).collect(),
            });
            start = k;
        }
    }

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        groups,
        source: SpectrumSource::Numerical,
    })
}

/// max_k ‖H v_k − ξ_k v_k‖₂ over all eigenpairs.
pub fn eigen_residual(h: &WalkHamiltonian, s: &Spectrum) -> f64 {
    let n = h.dim();
    let mut worst = 0.0f64;
    for k in 0..n {
        let v = s.eigenvectors.column(k);
        let mut norm2 = 0.0;
        for r in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..n {
                acc += h.matrix[(r, c)] * v[c];
            }
            acc -= s.eigenvalues[k] * v[r];
            norm2 += acc.norm_sqr();
        }
        worst = worst.max(norm2.sqrt());
    }
    worst
}

/// max |V†V − I| entrywise.
pub fn orthonormality_defect(s: &Spectrum) -> f64 {
    let n = s.dim();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in a..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..n {
                acc += s.eigenvectors[(r, a)].conj() * s.eigenvectors[(r, b)];
            }
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((acc - target).norm());
        }
    }
    worst
}
