//! Command-line front end for the quantum-walk estimation library: spectra,
//! evolution, Fisher-information reports, preparation and size optimization,
//! maximum-likelihood simulation, and parameter sweeps.
//!
//! All results go to stdout (JSON unless a CSV format is selected); status
//! and error messages go to stderr. Exit codes: 0 success, 1 runtime error,
//! 2 usage error.

use std::error::Error;
use std::fs;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use walker_core::{
    bipartite_phi_opt, closed_form_spectrum, estimation_report, evolve, hamiltonian, max_qfi,
    monte_carlo, numeric_prep_search, numerical_spectrum, qfi_fidelity_oracle, qfi_pure,
    run_sweep, star_argmax_n, star_exact_max_qfi, star_n_opt, GraphSpec, OutputFormat,
    PositionPovm, Preparation, Spectrum, StarNOpt, SweepConfig, TimeOptimalTarget, TimeRegime,
};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[derive(Parser)]
#[command(
    name = "walker",
    version,
    about = "Continuous-time quantum walks as probes for the tunnelling amplitude γ",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues and multiplicities of the walk Hamiltonian H = D − γA
    Spectrum(SpectrumArgs),
    /// Evolve a preparation and print amplitudes and position probabilities
    Evolve(EvolveArgs),
    /// Quantum Fisher information of γ for a given preparation
    Qfi(QfiArgs),
    /// Classical Fisher information of a position measurement
    Fi(FiArgs),
    /// Measurement efficiency F/Q, with the time-optimized value where known
    Efficiency(EfficiencyArgs),
    /// Closed-form optimal preparation plus a gradient-search cross-check
    OptimizePrep(OptimizePrepArgs),
    /// Optimal star-graph size, asymptotic and by exact integer search
    OptimizeN(OptimizeNArgs),
    /// Repeated maximum-likelihood estimation from sampled measurements
    Estimate(EstimateArgs),
    /// Evaluate a parameter sweep described by a JSON config file
    Sweep(SweepArgs),
}

type CliResult = Result<(), Box<dyn Error>>;

fn run(command: Command) -> CliResult {
    match command {
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Evolve(args) => cmd_evolve(args),
        Command::Qfi(args) => cmd_qfi(args),
        Command::Fi(args) => cmd_fi(args),
        Command::Efficiency(args) => cmd_efficiency(args),
        Command::OptimizePrep(args) => cmd_optimize_prep(args),
        Command::OptimizeN(args) => cmd_optimize_n(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

// ---------------------------------------------------------------------------
// shared flag groups

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Complete,
    Cycle,
    Circulant,
    Hypercube,
    CompleteBipartite,
    Star,
}

#[derive(Args)]
struct GraphArgs {
    /// Graph family
    #[arg(long, value_enum)]
    family: Family,
    /// Node count (complete, cycle, circulant, star)
    #[arg(long)]
    n: Option<usize>,
    /// Hypercube dimension (nodes = 2^d)
    #[arg(long)]
    d: Option<usize>,
    /// First partition size (complete-bipartite)
    #[arg(long)]
    p: Option<usize>,
    /// Second partition size (complete-bipartite)
    #[arg(long)]
    q: Option<usize>,
    /// Circulant coupling weights w_1,...,w_⌊n/2⌋, comma separated
    #[arg(long, value_delimiter = ',')]
    couplings: Option<Vec<f64>>,
}

impl GraphArgs {
    fn to_spec(&self) -> Result<GraphSpec, Box<dyn Error>> {
        let family = match self.family {
            Family::Complete => "complete",
            Family::Cycle => "cycle",
            Family::Circulant => "circulant",
            Family::Hypercube => "hypercube",
            Family::CompleteBipartite => "complete-bipartite",
            Family::Star => "star",
        };
        let need = |value: Option<usize>, flag: &str| -> Result<usize, Box<dyn Error>> {
            value.ok_or_else(|| format!("--family {family} requires --{flag}").into())
        };
        let forbid = |absent: bool, flag: &str| -> Result<(), Box<dyn Error>> {
            if absent {
                Ok(())
            } else {
                Err(format!("--{flag} does not apply to --family {family}").into())
            }
        };
        if self.family != Family::Circulant {
            forbid(self.couplings.is_none(), "couplings")?;
        }
        if self.family != Family::Hypercube {
            forbid(self.d.is_none(), "d")?;
        }
        if self.family != Family::CompleteBipartite {
            forbid(self.p.is_none(), "p")?;
            forbid(self.q.is_none(), "q")?;
        }
        let spec = match self.family {
            Family::Complete => GraphSpec::Complete { n: need(self.n, "n")? },
            Family::Cycle => GraphSpec::Cycle { n: need(self.n, "n")? },
            Family::Circulant => GraphSpec::Circulant {
                n: need(self.n, "n")?,
                couplings: self
                    .couplings
                    .clone()
                    .ok_or("--family circulant requires --couplings")?,
            },
            Family::Hypercube => {
                forbid(self.n.is_none(), "n")?;
                GraphSpec::Hypercube { d: need(self.d, "d")? }
            }
            Family::CompleteBipartite => {
                forbid(self.n.is_none(), "n")?;
                GraphSpec::CompleteBipartite { p: need(self.p, "p")?, q: need(self.q, "q")? }
            }
            Family::Star => GraphSpec::Star { n: need(self.n, "n")? },
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args)]
struct PrepArgs {
    /// Preparation: "optimal", "ground", "uniform-position", or a JSON file
    #[arg(long, default_value = "optimal")]
    prep: String,
    /// Relative phase of the optimal pair: "opt" or a value in radians
    #[arg(long)]
    phi: Option<String>,
}

impl PrepArgs {
    fn resolve(
        &self,
        spec: &GraphSpec,
        gamma: f64,
        t: f64,
    ) -> Result<(Preparation, String), Box<dyn Error>> {
        let phi = match self.phi.as_deref() {
            None => None,
            Some("opt") => Some(match spec {
                GraphSpec::CompleteBipartite { p, q } => bipartite_phi_opt(*p, *q, gamma, t),
                GraphSpec::Star { n } => bipartite_phi_opt(1, n - 1, gamma, t),
                _ => {
                    return Err(
                        "--phi opt applies to complete-bipartite and star graphs".into()
                    )
                }
            }),
            Some(text) => Some(
                text.parse::<f64>()
                    .map_err(|_| format!("--phi expects a number or \"opt\", got {text:?}"))?,
            ),
        };
        match self.prep.as_str() {
            "optimal" => {
                let (opt, _) = max_qfi(spec, gamma, t)?;
                match phi {
                    None => Ok((opt.preparation, opt.description)),
                    Some(phi) => {
                        let prep = Preparation::energy_pair(
                            spec.node_count(),
                            opt.pair.0,
                            opt.pair.1,
                            phi,
                        )?;
                        let desc = format!(
                            "energy pair ({}, {}) with phase {phi}",
                            opt.pair.0, opt.pair.1
                        );
                        Ok((prep, desc))
                    }
                }
            }
            "ground" => Ok((Preparation::ground(spec.node_count()), "ground".to_string())),
            "uniform-position" => Ok((
                Preparation::uniform_position(spec.node_count()),
                "uniform-position".to_string(),
            )),
            path => {
                if self.phi.is_some() {
                    return Err("--phi applies to the \"optimal\" preset only".into());
                }
                let text = fs::read_to_string(path)
                    .map_err(|e| format!("cannot read preparation file {path}: {e}"))?;
                let prep = Preparation::from_json(&text)?;
                Ok((prep, format!("file:{path}")))
            }
        }
    }
}

#[derive(Args)]
#[command(group(ArgGroup::new("measurement").multiple(false)))]
struct PovmArgs {
    /// Monitor every node individually (the default)
    #[arg(long, group = "measurement")]
    complete: bool,
    /// Monitor nodes 1..m individually, pooling the rest into one outcome
    #[arg(long, group = "measurement", value_name = "M")]
    first_m: Option<usize>,
    /// Comma-separated 1-based node labels to monitor individually
    #[arg(long, group = "measurement", value_delimiter = ',', value_name = "NODES")]
    subset: Option<Vec<usize>>,
    /// Monitor a δ-dimensional face of the hypercube
    #[arg(long, group = "measurement", value_name = "DELTA")]
    face: Option<usize>,
    /// Monitor the central node of a star graph
    #[arg(long, group = "measurement")]
    central: bool,
    /// Monitored node counts "odd,even" for the parity split of an even cycle
    #[arg(long, group = "measurement", value_name = "ODD,EVEN")]
    parity: Option<String>,
}

impl PovmArgs {
    fn resolve(&self, spec: &GraphSpec) -> Result<PositionPovm, Box<dyn Error>> {
        let n = spec.node_count();
        if let Some(m) = self.first_m {
            return Ok(PositionPovm::first_m(n, m)?);
        }
        if let Some(labels) = &self.subset {
            let mut nodes = Vec::with_capacity(labels.len());
            for &label in labels {
                if label == 0 || label > n {
                    return Err(format!("--subset labels are 1-based, got {label}").into());
                }
                nodes.push(label - 1);
            }
            return Ok(PositionPovm::new(n, nodes)?);
        }
        if let Some(delta) = self.face {
            return match spec {
                GraphSpec::Hypercube { d } => Ok(PositionPovm::hypercube_face(*d, delta)?),
                _ => Err("--face applies to hypercube graphs".into()),
            };
        }
        if self.central {
            return Ok(PositionPovm::central_node(n)?);
        }
        if let Some(text) = &self.parity {
            let (odd, even) = text
                .split_once(',')
                .ok_or("--parity expects two counts \"odd,even\"")?;
            let odd: usize = odd.trim().parse().map_err(|_| "--parity counts must be integers")?;
            let even: usize =
                even.trim().parse().map_err(|_| "--parity counts must be integers")?;
            return Ok(PositionPovm::cycle_parity(n, odd, even)?);
        }
        Ok(PositionPovm::complete(n)?)
    }
}

// ---------------------------------------------------------------------------
// formatting helpers

fn family_tag(spec: &GraphSpec) -> serde_json::Value {
    serde_json::to_value(spec).expect("graph specs serialize infallibly")
}

fn complex_pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

/// Formats a complex entry as `re+imj` / `re-imj` with shortest-round-trip
/// floats, e.g. `0.5-0.25j`.
fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}j", z.re, -z.im)
    } else {
        format!("{}+{}j", z.re, z.im)
    }
}

/// Writes to stdout, treating a closed pipe (e.g. `walker ... | head`) as a
/// clean exit instead of a panic.
fn emit(content: &str) -> CliResult {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(content.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        return Err(e.into());
    }
    Ok(())
}

fn print_json(value: &serde_json::Value) -> CliResult {
    emit(&format!(
        "{}\n",
        serde_json::to_string_pretty(value).expect("JSON output serializes")
    ))
}

fn write_or_print(path: Option<&str>, content: &str, what: &str) -> CliResult {
    match path {
        Some(path) => {
            fs::write(path, content).map_err(|e| format!("cannot write {path}: {e}"))?;
            eprintln!("wrote {what} to {path}");
            Ok(())
        }
        None => emit(content),
    }
}

// ---------------------------------------------------------------------------
// spectrum

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpectrumFormat {
    /// Eigenvalues, multiplicities, and group labels
    Json,
    /// Full eigenvector dump, row = position, column = eigenindex
    Csv,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Tunnelling amplitude γ > 0
    #[arg(long)]
    gamma: f64,
    /// Diagonalize numerically instead of using the closed form
    #[arg(long)]
    numerical: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: SpectrumFormat,
    /// Write the output here instead of stdout
    #[arg(long)]
    out: Option<String>,
}

fn cmd_spectrum(args: SpectrumArgs) -> CliResult {
    let spec = args.graph.to_spec()?;
    let h = hamiltonian(&spec, args.gamma)?;
    let spectrum: Spectrum =
        if args.numerical { numerical_spectrum(&h)? } else { closed_form_spectrum(&h)? };
    match args.format {
        SpectrumFormat::Json => {
            let groups: Vec<serde_json::Value> = spectrum
                .groups
                .iter()
                .map(|g| {
                    json!({
                        "label": g.label,
                        "indices": g.indices,
                        "eigenvalue": spectrum.eigenvalues[g.indices[0]],
                    })
                })
                .collect();
            let out = json!({
                "graph": family_tag(&spec),
                "n": spec.node_count(),
                "gamma": args.gamma,
                "source": spectrum.source.as_str(),
                "eigenvalues": spectrum.eigenvalues,
                "multiplicities": spectrum.group_sizes(),
                "groups": groups,
            });
            match &args.out {
                Some(path) => write_or_print(
                    Some(path),
                    &format!("{}\n", serde_json::to_string_pretty(&out)?),
                    "spectrum JSON",
                ),
                None => print_json(&out),
            }
        }
        SpectrumFormat::Csv => {
            let n = spec.node_count();
            let mut csv = String::from("position");
            for k in 0..n {
                csv.push_str(&format!(",e{k}"));
            }
            csv.push('\n');
            for row in 0..n {
                csv.push_str(&format!("{}", row + 1));
                for col in 0..n {
                    csv.push(',');
                    csv.push_str(&format_complex(spectrum.eigenvectors[(row, col)]));
                }
                csv.push('\n');
            }
            write_or_print(args.out.as_deref(), &csv, "eigenvector CSV")
        }
    }
}

// ---------------------------------------------------------------------------
// evolve

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Tunnelling amplitude γ > 0
    #[arg(long)]
    gamma: f64,
    /// Evolution time t ≥ 0
    #[arg(long)]
    t: f64,
    #[command(flatten)]
    prep: PrepArgs,
}

fn cmd_evolve(args: EvolveArgs) -> CliResult {
    let spec = args.graph.to_spec()?;
    let (prep, prep_desc) = args.prep.resolve(&spec, args.gamma, args.t)?;
    let ev = evolve(&spec, args.gamma, &prep, args.t)?;
    let state: Vec<Complex64> = ev.state.iter().copied().collect();
    let dstate: Vec<Complex64> = ev.dstate.iter().copied().collect();
    let out = json!({
        "graph": family_tag(&spec),
        "n": spec.node_count(),
        "gamma": args.gamma,
        "t": args.t,
        "prep": prep_desc,
        "state": complex_pairs(&state),
        "dstate": complex_pairs(&dstate),
        "position_probabilities": ev.position_probabilities(),
        "norm": ev.state.norm(),
    });
    print_json(&out)
}

// ---------------------------------------------------------------------------
// qfi

#[derive(Args)]
struct QfiArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    t: f64,
    #[command(flatten)]
    prep: PrepArgs,
    /// Also run the finite-difference fidelity oracle as a cross-check
    #[arg(long)]
    oracle: bool,
}

fn cmd_qfi(args: QfiArgs) -> CliResult {
    let spec = args.graph.to_spec()?;
    let (prep, prep_desc) = args.prep.resolve(&spec, args.gamma, args.t)?;
    let ev = evolve(&spec, args.gamma, &prep, args.t)?;
    let qfi = qfi_pure(&ev)?;
    let mut out = json!({
        "graph": family_tag(&spec),
        "n": spec.node_count(),
        "gamma": args.gamma,
        "t": args.t,
        "prep": prep_desc,
        "qfi": qfi,
    });
    if args.oracle {
        let oracle = qfi_fidelity_oracle(&spec, args.gamma, &prep, args.t, None)?;
        out["qfi_oracle"] = json!(oracle);
        out["oracle_relative_gap"] =
            json!((qfi - oracle).abs() / if qfi.abs() > 1.0 { qfi.abs() } else { 1.0 });
    }
    print_json(&out)
}

// ---------------------------------------------------------------------------
// fi

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct FiArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    t: f64,
    #[command(flatten)]
    prep: PrepArgs,
    #[command(flatten)]
    povm: PovmArgs,
    /// Shot count for the Cramér–Rao variances
    #[arg(long, default_value_t = 1)]
    shots: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
}

fn cmd_fi(args: FiArgs) -> CliResult {
    let spec = args.graph.to_spec()?;
    let (prep, prep_desc) = args.prep.resolve(&spec, args.gamma, args.t)?;
    let povm = args.povm.resolve(&spec)?;
    let report = estimation_report(
        &spec,
        args.gamma,
        &prep,
        args.t,
        &povm,
        args.shots,
        &prep_desc,
    )?;
    match args.format {
        ReportFormat::Json => print_json(&serde_json::to_value(&report)?),
        ReportFormat::Csv => {
            let fi = report.fi.map(|v| format!("{v}")).unwrap_or_default();
            let eta = report.efficiency.map(|v| format!("{v}")).unwrap_or_default();
            emit(&format!(
                "family,n,gamma,t,m,fi,qfi,eta\n{},{},{},{},{},{},{},{}\n",
                spec.family_name(),
                report.n,
                report.gamma,
                report.t,
                povm.monitored().len(),
                fi,
                report.qfi,
                eta,
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// efficiency

#[derive(Args)]
struct EfficiencyArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    t: f64,
    #[command(flatten)]
    prep: PrepArgs,
    #[command(flatten)]
    povm: PovmArgs,
}

fn cmd_efficiency(args: EfficiencyArgs) -> CliResult {
    let spec = args.graph.to_spec()?;
    let (prep, prep_desc) = args.prep.resolve(&spec, args.gamma, args.t)?;
    let povm = args.povm.resolve(&spec)?;
    let report = estimation_report(&spec, args.gamma, &prep, args.t, &povm, 1, &prep_desc)?;
    // closed-form optimum over t where one is known for this measurement
    let max_over_t = match (&spec, args.povm.first_m, args.povm.parity.as_ref()) {
        (GraphSpec::Complete { n }, Some(m), _) => Some(
            walker_core::max_efficiency_over_t(TimeOptimalTarget::CompleteSubset { n: *n, m })?,
        ),
        (GraphSpec::Cycle { n }, _, Some(_)) if n % 2 == 0 => {
            let half = (*n / 2) as f64;
            let odd = povm.monitored().iter().filter(|&&i| i % 2 == 0).count() as f64;
            let even = povm.monitored().iter().filter(|&&i| i % 2 == 1).count() as f64;
            Some(walker_core::max_efficiency_over_t(TimeOptimalTarget::CycleParity {
                beta_odd: odd / half,
                beta_even: even / half,
            })?)
        }
        _ => None,
    };
    let out = json!({
        "graph": family_tag(&spec),
        "n": report.n,
        "gamma": report.gamma,
        "t": report.t,
        "prep": report.prep,
        "povm": report.povm,
        "fi": report.fi,
        "fi_diagnostic": report.fi_diagnostic,
        "qfi": report.qfi,
        "eta": report.efficiency,
        "max_eta_over_t": max_over_t,
    });
    print_json(&out)
}

// ---------------------------------------------------------------------------
// optimize-prep

#[derive(Args)]
struct OptimizePrepArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    t: f64,
    /// Random restarts for the gradient search; 0 skips the search
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Seed for the search restarts
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn cmd_optimize_prep(args: OptimizePrepArgs) -> CliResult {
    let spec = args.graph.to_spec()?;
    let (opt, value) = max_qfi(&spec, args.gamma, args.t)?;
    let mut out = json!({
        "graph": family_tag(&spec),
        "n": spec.node_count(),
        "gamma": args.gamma,
        "t": args.t,
        "closed_form": {
            "qfi": value,
            "pair": [opt.pair.0, opt.pair.1],
            "phase": opt.phase,
            "description": opt.description,
            "basis": "energy",
            "amplitudes": complex_pairs(&opt.preparation.amplitudes),
        },
    });
    if args.restarts > 0 {
        let search = numeric_prep_search(&spec, args.gamma, args.t, args.restarts, args.seed)?;
        out["search"] = json!({
            "qfi": search.qfi,
            "converged": search.converged,
            "restarts": args.restarts,
            "seed": args.seed,
            "amplitudes": complex_pairs(&search.preparation.amplitudes),
        });
        out["search_ratio"] = json!(if value > 0.0 { search.qfi / value } else { 1.0 });
    }
    print_json(&out)
}

// ---------------------------------------------------------------------------
// optimize-n

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegimeArg {
    SmallTime,
    LargeTime,
}

#[derive(Args)]
#[command(group(ArgGroup::new("mode").required(true).multiple(true).args(["regime", "t"])))]
struct OptimizeNArgs {
    #[arg(long)]
    gamma: f64,
    /// Asymptotic regime for the closed-form optimum
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    /// Time for the exact integer search over n
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, default_value_t = 3)]
    n_min: usize,
    #[arg(long, default_value_t = 64)]
    n_max: usize,
}

fn cmd_optimize_n(args: OptimizeNArgs) -> CliResult {
    let mut out = json!({ "gamma": args.gamma });
    if let Some(regime) = args.regime {
        let regime_core = match regime {
            RegimeArg::SmallTime => TimeRegime::SmallTime,
            RegimeArg::LargeTime => TimeRegime::LargeTime,
        };
        let n_opt = star_n_opt(args.gamma, regime_core)?;
        out["regime"] = json!(match regime {
            RegimeArg::SmallTime => "small_time",
            RegimeArg::LargeTime => "large_time",
        });
        out["n_opt_asymptotic"] = match n_opt {
            StarNOpt::Finite(v) => json!(v),
            StarNOpt::Unbounded => json!("unbounded"),
        };
    }
    if let Some(t) = args.t {
        let n = star_argmax_n(args.gamma, t, args.n_min, args.n_max)?;
        out["argmax"] = json!({
            "t": t,
            "n_min": args.n_min,
            "n_max": args.n_max,
            "n": n,
            "max_qfi": star_exact_max_qfi(n, args.gamma, t)?,
        });
    }
    print_json(&out)
}

// ---------------------------------------------------------------------------
// estimate

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// True tunnelling amplitude generating the data
    #[arg(long)]
    gamma_true: f64,
    #[arg(long)]
    t: f64,
    #[command(flatten)]
    prep: PrepArgs,
    #[command(flatten)]
    povm: PovmArgs,
    /// Measurement shots per repetition
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    /// Independent repetitions
    #[arg(long, default_value_t = 200)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Search bracket "lo,hi" for the likelihood maximization
    #[arg(long, value_name = "LO,HI")]
    bracket: String,
    /// Write per-repetition estimates here as CSV (rep,gamma_hat)
    #[arg(long)]
    out: Option<String>,
}

fn cmd_estimate(args: EstimateArgs) -> CliResult {
    let spec = args.graph.to_spec()?;
    let (lo, hi) = args
        .bracket
        .split_once(',')
        .ok_or("--bracket expects \"lo,hi\"")?;
    let bracket: (f64, f64) = (
        lo.trim().parse().map_err(|_| "--bracket bounds must be numbers")?,
        hi.trim().parse().map_err(|_| "--bracket bounds must be numbers")?,
    );
    let (prep, prep_desc) = args.prep.resolve(&spec, args.gamma_true, args.t)?;
    let povm = args.povm.resolve(&spec)?;
    let mc = monte_carlo(
        &spec,
        args.gamma_true,
        &prep,
        &povm,
        args.t,
        args.shots,
        args.reps,
        args.seed,
        bracket,
    )?;
    if let Some(path) = &args.out {
        let mut csv = String::from("rep,gamma_hat\n");
        for (rep, run) in mc.runs.iter().enumerate() {
            csv.push_str(&format!("{},{}\n", rep, run.gamma_hat));
        }
        fs::write(path, &csv).map_err(|e| format!("cannot write {path}: {e}"))?;
        eprintln!("wrote per-repetition estimates to {path}");
    }
    let out = json!({
        "graph": family_tag(&spec),
        "n": spec.node_count(),
        "gamma_true": mc.gamma_true,
        "t": args.t,
        "prep": prep_desc,
        "povm": povm.description(),
        "shots": mc.shots,
        "reps": mc.runs.len(),
        "seed": args.seed,
        "bracket": [bracket.0, bracket.1],
        "mean": mc.mean,
        "variance": mc.variance,
        "std_error": mc.standard_error(),
        "fisher": mc.fisher,
        "qfi": mc.qfi,
        "crb": mc.crb,
        "qcrb": mc.qcrb,
        "efficiency_empirical": mc.efficiency_empirical(),
    });
    print_json(&out)
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Args)]
struct SweepArgs {
    /// Sweep description (JSON; see docs/schemas/sweep_config.schema.json)
    #[arg(long)]
    config: String,
    /// Override the output path from the config
    #[arg(long)]
    out: Option<String>,
}

fn cmd_sweep(args: SweepArgs) -> CliResult {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| format!("cannot read config {}: {e}", args.config))?;
    let config = SweepConfig::from_json(&text)?;
    let table = run_sweep(&config)?;
    let rendered = match config.format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => format!("{}\n", table.to_json()),
    };
    let target = args.out.as_deref().or(config.output.as_deref());
    write_or_print(target, &rendered, &format!("{} sweep rows", table.rows.len()))
}
