//! Parameter sweeps over (γ, t, sizes, measurement fractions, phase): a JSON
//! config describes up to two axes plus a fixed context; evaluation yields a
//! deterministic row-major table with per-point errors recorded in an error
//! column instead of aborting the run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, Preparation};
use crate::error::{Error, Result};
use crate::graph::GraphSpec;
use crate::metrology::{fi_povm, qfi_pure, PositionPovm};
use crate::optimize::max_qfi;

/// A swept variable: either an inclusive linear range or an explicit list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Range { var: AxisVar, min: f64, max: f64, steps: usize },
    Values { var: AxisVar, values: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisVar {
    Gamma,
    T,
    N,
    D,
    M,
    BetaO,
    BetaE,
    Phi,
}

impl AxisVar {
    pub fn name(self) -> &'static str {
        match self {
            AxisVar::Gamma => "gamma",
            AxisVar::T => "t",
            AxisVar::N => "n",
            AxisVar::D => "d",
            AxisVar::M => "m",
            AxisVar::BetaO => "beta_o",
            AxisVar::BetaE => "beta_e",
            AxisVar::Phi => "phi",
        }
    }
}

impl Axis {
    pub fn var(&self) -> AxisVar {
        match self {
            Axis::Range { var, .. } | Axis::Values { var, .. } => *var,
        }
    }

    fn values(&self) -> Result<Vec<f64>> {
        match self {
            Axis::Values { values, .. } => {
                if values.is_empty() {
                    return Err(Error::InvalidSweep(format!(
                        "axis {} has an empty value list",
                        self.var().name()
                    )));
                }
                Ok(values.clone())
            }
            Axis::Range { min, max, steps, .. } => {
                if *steps == 0 {
                    return Err(Error::InvalidSweep(format!(
                        "axis {} needs steps >= 1",
                        self.var().name()
                    )));
                }
                if *steps == 1 {
                    if (max - min).abs() > 0.0 {
                        return Err(Error::InvalidSweep(format!(
                            "axis {}: steps = 1 requires min == max",
                            self.var().name()
                        )));
                    }
                    return Ok(vec![*min]);
                }
                if !(max > min) {
                    return Err(Error::InvalidSweep(format!(
                        "axis {}: need max > min, got [{min}, {max}]",
                        self.var().name()
                    )));
                }
                let h = (max - min) / (*steps as f64 - 1.0);
                Ok((0..*steps).map(|i| min + h * i as f64).collect())
            }
        }
    }
}

/// Preparation recipe resolved per grid point.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrepRecipe {
    /// the family's QFI-maximizing two-eigenstate superposition
    Optimal,
    /// energy ground state
    Ground,
    /// uniform superposition over positions
    UniformPosition,
    /// explicit amplitudes
    Explicit { basis: crate::dynamics::Basis, amplitudes: Vec<[f64; 2]> },
}

/// Measurement recipe resolved per grid point.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PovmRecipe {
    Complete,
    /// nodes 1..m monitored individually
    FirstM { m: usize },
    /// explicit 1-based node labels
    Subset { nodes: Vec<usize> },
    /// δ-dimensional hypercube face
    Face { delta: usize },
    /// hub of a star graph
    Central,
    /// parity-split subset of an even cycle (node counts, not fractions)
    Parity { odd: usize, even: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Qfi,
    Fi,
    Eta,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Qfi => "qfi",
            Quantity::Fi => "fi",
            Quantity::Eta => "eta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub graph: GraphSpec,
    pub gamma: f64,
    pub t: f64,
    #[serde(default)]
    pub phi: Option<f64>,
    pub prep: PrepRecipe,
    #[serde(default)]
    pub povm: Option<PovmRecipe>,
    pub axes: Vec<Axis>,
    pub quantities: Vec<Quantity>,
    pub format: OutputFormat,
    #[serde(default)]
    pub output: Option<String>,
}

impl SweepConfig {
    pub fn from_json(json: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(json);
        let config: SweepConfig = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::InvalidSweep(format!("at /{}: {}", e.path(), e.inner())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep config serializes infallibly")
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidSweep(format!(
                "need 1 or 2 sweep axes, got {}",
                self.axes.len()
            )));
        }
        if self.axes.len() == 2 && self.axes[0].var() == self.axes[1].var() {
            return Err(Error::InvalidSweep(format!(
                "both axes sweep {}",
                self.axes[0].var().name()
            )));
        }
        if self.quantities.is_empty() {
            return Err(Error::InvalidSweep("no quantities requested".into()));
        }
        let needs_povm =
            self.quantities.iter().any(|q| matches!(q, Quantity::Fi | Quantity::Eta));
        let povm_swept = self
            .axes
            .iter()
            .any(|a| matches!(a.var(), AxisVar::M | AxisVar::BetaO | AxisVar::BetaE));
        if needs_povm && self.povm.is_none() && !povm_swept {
            return Err(Error::InvalidSweep(
                "fi/eta quantities need a povm recipe or a measurement axis".into(),
            ));
        }
        for axis in &self.axes {
            axis.values()?;
            match axis.var() {
                AxisVar::N => {
                    if !matches!(
                        self.graph,
                        GraphSpec::Complete { .. } | GraphSpec::Cycle { .. } | GraphSpec::Star { .. }
                    ) {
                        return Err(Error::InvalidSweep(
                            "axis n applies to complete, cycle, and star graphs".into(),
                        ));
                    }
                }
                AxisVar::D => {
                    if !matches!(self.graph, GraphSpec::Hypercube { .. }) {
                        return Err(Error::InvalidSweep(
                            "axis d applies to hypercube graphs".into(),
                        ));
                    }
                }
                AxisVar::M => {
                    if !matches!(self.povm, None | Some(PovmRecipe::FirstM { .. })) {
                        return Err(Error::InvalidSweep(
                            "axis m conflicts with the configured povm".into(),
                        ));
                    }
                }
                AxisVar::BetaO | AxisVar::BetaE => {
                    if !matches!(self.povm, None | Some(PovmRecipe::Parity { .. })) {
                        return Err(Error::InvalidSweep(
                            "parity axes conflict with the configured povm".into(),
                        ));
                    }
                    if !matches!(self.graph, GraphSpec::Cycle { .. }) {
                        return Err(Error::InvalidSweep(
                            "parity axes apply to cycle graphs".into(),
                        ));
                    }
                }
                AxisVar::Gamma | AxisVar::T | AxisVar::Phi => {}
            }
        }
        Ok(())
    }
}

/// One evaluated grid point: axis values in axis order, then one value per
/// requested quantity (None where the point failed), then the error text.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub axis_values: Vec<f64>,
    pub values: Vec<Option<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    /// axis names, then quantity names, then "error"
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

fn integral(value: f64, what: &str) -> Result<usize> {
    if value < 0.0 || (value - value.round()).abs() > 1e-9 || value.round() > u32::MAX as f64 {
        return Err(Error::InvalidSweep(format!("{what} = {value} is not a small whole number")));
    }
    Ok(value.round() as usize)
}

struct PointContext {
    spec: GraphSpec,
    gamma: f64,
    t: f64,
    phi: Option<f64>,
    m: Option<usize>,
    beta_odd: Option<f64>,
    beta_even: Option<f64>,
}

fn resize_graph(base: &GraphSpec, var: AxisVar, value: f64) -> Result<GraphSpec> {
    match var {
        AxisVar::N => {
            let n = integral(value, "n")?;
            Ok(match base {
                GraphSpec::Complete { .. } => GraphSpec::Complete { n },
                GraphSpec::Cycle { .. } => GraphSpec::Cycle { n },
                GraphSpec::Star { .. } => GraphSpec::Star { n },
                _ => unreachable!("validated in SweepConfig::validate"),
            })
        }
        AxisVar::D => Ok(GraphSpec::Hypercube { d: integral(value, "d")? }),
        _ => unreachable!("not a size axis"),
    }
}

fn build_point(config: &SweepConfig, coords: &[(AxisVar, f64)]) -> Result<PointContext> {
    let mut ctx = PointContext {
        spec: config.graph.clone(),
        gamma: config.gamma,
        t: config.t,
        phi: config.phi,
        m: None,
        beta_odd: None,
        beta_even: None,
    };
    for &(var, value) in coords {
        match var {
            AxisVar::Gamma => ctx.gamma = value,
            AxisVar::T => ctx.t = value,
            AxisVar::Phi => ctx.phi = Some(value),
            AxisVar::N | AxisVar::D => ctx.spec = resize_graph(&config.graph, var, value)?,
            AxisVar::M => ctx.m = Some(integral(value, "m")?),
            AxisVar::BetaO => ctx.beta_odd = Some(value),
            AxisVar::BetaE => ctx.beta_even = Some(value),
        }
    }
    ctx.spec.validate()?;
    Ok(ctx)
}

fn build_prep(config: &SweepConfig, ctx: &PointContext) -> Result<Preparation> {
    match &config.prep {
        PrepRecipe::Optimal => {
            let (opt, _) = max_qfi(&ctx.spec, ctx.gamma, ctx.t)?;
            match ctx.phi {
                Some(phi) => Preparation::energy_pair(ctx.spec.node_count(), 0, opt.pair.1, phi),
                None => Ok(opt.preparation),
            }
        }
        PrepRecipe::Ground => Ok(Preparation::ground(ctx.spec.node_count())),
        PrepRecipe::UniformPosition => Ok(Preparation::uniform_position(ctx.spec.node_count())),
        PrepRecipe::Explicit { basis, amplitudes } => Preparation::new(
            *basis,
            amplitudes.iter().map(|&[re, im]| num_complex::Complex64::new(re, im)).collect(),
        ),
    }
}

fn build_povm(config: &SweepConfig, ctx: &PointContext) -> Result<Option<PositionPovm>> {
    let n = ctx.spec.node_count();
    // measurement axes take precedence over (and are validated against) the
    // configured recipe
    if let Some(m) = ctx.m {
        return PositionPovm::first_m(n, m).map(Some);
    }
    if ctx.beta_odd.is_some() || ctx.beta_even.is_some() {
        let half = n as f64 / 2.0;
        let count = |beta: Option<f64>, fallback: usize, name: &str| -> Result<usize> {
            match beta {
                None => Ok(fallback),
                Some(b) => {
                    if !(0.0..=1.0).contains(&b) {
                        return Err(Error::InvalidSweep(format!("{name} = {b} outside [0, 1]")));
                    }
                    integral(b * half, name)
                }
            }
        };
        let (base_odd, base_even) = match config.povm {
            Some(PovmRecipe::Parity { odd, even }) => (odd, even),
            _ => (0, 0),
        };
        let odd = count(ctx.beta_odd, base_odd, "beta_o·n/2")?;
        let even = count(ctx.beta_even, base_even, "beta_e·n/2")?;
        return PositionPovm::cycle_parity(n, odd, even).map(Some);
    }
    match &config.povm {
        None => Ok(None),
        Some(PovmRecipe::Complete) => PositionPovm::complete(n).map(Some),
        Some(PovmRecipe::FirstM { m }) => PositionPovm::first_m(n, *m).map(Some),
        Some(PovmRecipe::Subset { nodes }) => {
            let zero_based: Result<Vec<usize>> = nodes
                .iter()
                .map(|&label| {
                    if label == 0 {
                        Err(Error::InvalidPovm("node labels are 1-based".into()))
                    } else {
                        Ok(label - 1)
                    }
                })
                .collect();
            PositionPovm::new(n, zero_based?).map(Some)
        }
        Some(PovmRecipe::Face { delta }) => match ctx.spec {
            GraphSpec::Hypercube { d } => PositionPovm::hypercube_face(d, *delta).map(Some),
            _ => Err(Error::InvalidPovm("face POVMs apply to hypercube graphs".into())),
        },
        Some(PovmRecipe::Central) => PositionPovm::central_node(n).map(Some),
        Some(PovmRecipe::Parity { odd, even }) => {
            PositionPovm::cycle_parity(n, *odd, *even).map(Some)
        }
    }
}

fn evaluate_point(config: &SweepConfig, coords: &[(AxisVar, f64)]) -> Result<Vec<f64>> {
    let ctx = build_point(config, coords)?;
    let prep = build_prep(config, &ctx)?;
    let ev = evolve(&ctx.spec, ctx.gamma, &prep, ctx.t)?;
    let qfi = qfi_pure(&ev)?;
    let povm = build_povm(config, &ctx)?;
    let fi = match &povm {
        Some(p) => Some(fi_povm(&ev, p)?),
        None => None,
    };
    config
        .quantities
        .iter()
        .map(|q| match q {
            Quantity::Qfi => Ok(qfi),
            Quantity::Fi => {
                fi.ok_or_else(|| Error::InvalidSweep("fi requested without a povm".into()))
            }
            Quantity::Eta => {
                let f = fi
                    .ok_or_else(|| Error::InvalidSweep("eta requested without a povm".into()))?;
                if qfi <= 0.0 {
                    Err(Error::InvalidArgument(
                        "efficiency undefined where the QFI vanishes".into(),
                    ))
                } else {
                    Ok(f / qfi)
                }
            }
        })
        .collect()
}

/// Evaluates the grid row-major (first axis outer) in parallel; per-point
/// failures land in the row's error column.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepTable> {
    config.validate()?;
    let axis_vars: Vec<AxisVar> = config.axes.iter().map(|a| a.var()).collect();
    let axis_values: Vec<Vec<f64>> =
        config.axes.iter().map(|a| a.values()).collect::<Result<_>>()?;

    let mut grid: Vec<Vec<(AxisVar, f64)>> = Vec::new();
    match axis_values.len() {
        1 => {
            for &v in &axis_values[0] {
                grid.push(vec![(axis_vars[0], v)]);
            }
        }
        2 => {
            for &outer in &axis_values[0] {
                for &inner in &axis_values[1] {
                    grid.push(vec![(axis_vars[0], outer), (axis_vars[1], inner)]);
                }
            }
        }
        _ => unreachable!("validated"),
    }

    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|coords| {
            let axis_values = coords.iter().map(|&(_, v)| v).collect();
            match evaluate_point(config, coords) {
                Ok(values) => SweepRow {
                    axis_values,
                    values: values.into_iter().map(Some).collect(),
                    error: None,
                },
                Err(e) => SweepRow {
                    axis_values,
                    values: vec![None; config.quantities.len()],
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let mut columns: Vec<String> = axis_vars.iter().map(|v| v.name().to_string()).collect();
    columns.extend(config.quantities.iter().map(|q| q.name().to_string()));
    columns.push("error".to_string());
    Ok(SweepTable { columns, rows })
}

impl SweepTable {
    /// CSV with full-precision floats (shortest representation that parses
    /// back to the identical double).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut fields: Vec<String> =
                row.axis_values.iter().map(|v| format!("{v}")).collect();
            for value in &row.values {
                fields.push(value.map(|v| format!("{v}")).unwrap_or_default());
            }
            fields.push(match &row.error {
                Some(e) => format!("\"{}\"", e.replace('"', "\"\"")),
                None => String::new(),
            });
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON array of objects keyed by column name; failed cells are null.
    pub fn to_json(&self) -> String {
        let objects: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut map = serde_json::Map::new();
                for (name, value) in self.columns.iter().zip(
                    row.axis_values
                        .iter()
                        .map(|&v| Some(v))
                        .chain(row.values.iter().copied()),
                ) {
                    map.insert(
                        name.clone(),
                        value.map_or(serde_json::Value::Null, |v| {
                            serde_json::json!(v)
                        }),
                    );
                }
                map.insert(
                    "error".to_string(),
                    row.error.clone().map_or(serde_json::Value::Null, serde_json::Value::String),
                );
                serde_json::Value::Object(map)
            })
            .collect();
        serde_json::to_string_pretty(&objects).expect("table serializes infallibly")
    }
}
