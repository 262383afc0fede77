//! Continuous-time quantum walks on structured graphs as probes for the
//! tunnelling amplitude γ: Hamiltonians H = D − γA, closed-form spectra,
//! evolution, quantum/classical Fisher information, optimal preparations,
//! and maximum-likelihood estimation from position measurements.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod inference;
pub mod metrology;
pub mod optimize;
pub mod spectral;
pub mod sweep;

pub use config::{max_dim, DEFAULT_MAX_DIM, MAX_DIM_ENV};
pub use dynamics::{
    evolve, finite_difference_dstate, finite_difference_dstate_richardson, Basis, EvolvedState,
    Preparation, DEFAULT_FD_STEP,
};
pub use error::{Error, Result};
pub use graph::{hamiltonian, GraphSpec, WalkHamiltonian};
pub use inference::{
    log_likelihood, mle, monte_carlo, sample_outcomes, ExperimentRun, MonteCarloRun,
};
pub use metrology::{
    bipartite_delta, bipartite_f, bipartite_phi_opt, cramer_rao, efficiency_star,
    estimation_report, fi_complete_graph_closed, fi_cycle_closed, fi_hypercube_face_closed,
    fi_povm, fi_star_closed, max_efficiency_complete, max_efficiency_cycle, popoviciu_bound,
    qfi_bipartite_closed, qfi_bipartite_max, qfi_fidelity_oracle, qfi_pure,
    star_efficiency_large_n, star_efficiency_small_time, EstimationReport, PositionPovm,
    VarianceBound, DEFAULT_FIDELITY_STEP, DERIVATIVE_FLOOR, PROBABILITY_FLOOR,
};
pub use optimize::{
    max_efficiency_over_t, max_qfi, numeric_prep_search, optimal_bipartition, star_argmax_n,
    star_exact_max_qfi, star_n_opt, OptimalPreparation, PrepSearch, StarNOpt, TimeOptimalTarget,
    TimeRegime,
};
pub use spectral::{
    closed_form_spectrum, eigen_residual, numerical_spectrum, orthonormality_defect,
    MultiplicityGroup, Spectrum, SpectrumSource,
};
pub use sweep::{
    run_sweep, Axis, AxisVar, OutputFormat, PovmRecipe, PrepRecipe, Quantity, SweepConfig,
    SweepRow, SweepTable,
};
