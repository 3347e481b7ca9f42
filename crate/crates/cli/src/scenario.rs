//! JSON scenario files.
//!
//! Complex numbers are `[re, im]` pairs (a bare number is read as a real),
//! matrices are row-major nested arrays. Every section is optional; each
//! subcommand checks that the sections it needs are present.

use std::collections::BTreeMap;
use std::fmt;

use qprospect_core::channels::{MeasurerSpec, PipelineStage};
use qprospect_core::composite::{CompositeState, Normalization};
use qprospect_core::dynamics::{HamiltonianSpec, WaveState};
use qprospect_core::entangle::{bell_state, LogBase};
use qprospect_core::events::{DensityOperator, MultimodeState, Observable};
use qprospect_core::game::{BrokenMode, Choice, GameSpec, InterferenceDistribution, Payoffs};
use qprospect_core::{ComplexMatrix, ComplexVector, C64};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A complex number on the wire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cx(pub C64);

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&self.0.re)?;
        t.serialize_element(&self.0.im)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Cx {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct CxVisitor;

        impl<'de> Visitor<'de> for CxVisitor {
            type Value = Cx;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or an [re, im] pair")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Cx, E> {
                Ok(Cx(C64::new(v, 0.0)))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cx, E> {
                Ok(Cx(C64::new(v as f64, 0.0)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cx, E> {
                Ok(Cx(C64::new(v as f64, 0.0)))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Cx, A::Error> {
                let re: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<f64>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(Cx(C64::new(re, im)))
            }
        }

        d.deserialize_any(CxVisitor)
    }
}

pub type Matrix = Vec<Vec<Cx>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// State vector in the computational basis.
    Pure(Vec<Cx>),
    Density(Matrix),
    /// Bipartite density matrix with factor dimensions.
    Composite { dims: [usize; 2], matrix: Matrix },
    /// Amplitudes `c_{nα}`, rows `n` (first factor), columns `α`.
    Amplitudes(Matrix),
    /// Generalized Bell state of the given dimension.
    Bell(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedBasis {
    Computational,
    Fourier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisSpec {
    Named(NamedBasis),
    /// Eigenvectors as columns.
    Columns(Matrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    /// Defaults to `0, 1, …, d−1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<f64>>,
    pub basis: BasisSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultimodeSpec {
    pub observable: String,
    pub coefficients: Vec<Cx>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case", deny_unknown_fields)]
pub enum StageSpec {
    Compose,
    Evolve {
        duration: f64,
    },
    Readout,
    /// Either an explicit unitary, or `[to, from]` observable names giving
    /// `E_to† E_from`.
    Transform {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        basis: Option<Matrix>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        observables: Option<[String; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineSpec {
    pub measurer: StateSpec,
    pub coupling: Matrix,
    pub stages: Vec<StageSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChoiceSpec {
    Cooperate,
    Defect,
}

impl From<ChoiceSpec> for Choice {
    fn from(c: ChoiceSpec) -> Choice {
        match c {
            ChoiceSpec::Cooperate => Choice::Cooperate,
            ChoiceSpec::Defect => Choice::Defect,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SymmetrySpec {
    Intact,
    #[default]
    Broken,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BrokenModeSpec {
    Fixed,
    Conditional,
    #[default]
    MassWeighted,
}

impl From<BrokenModeSpec> for BrokenMode {
    fn from(m: BrokenModeSpec) -> BrokenMode {
        match m {
            BrokenModeSpec::Fixed => BrokenMode::Fixed,
            BrokenModeSpec::Conditional => BrokenMode::Conditional,
            BrokenModeSpec::MassWeighted => BrokenMode::MassWeighted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSpec {
    pub n_pairs: u64,
    #[serde(default)]
    pub symmetry: SymmetrySpec,
    #[serde(default)]
    pub mode: BrokenModeSpec,
    #[serde(default = "default_workers")]
    pub workers: u32,
}

fn default_workers() -> u32 {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameScenario {
    /// `[x1, x2, x3, x4]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoffs: Option<[f64; 4]>,
    /// `[[p(C1⊗C2), p(C1⊗D2)], [p(D1⊗C2), p(D1⊗D2)]]`.
    pub joint: [[f64; 2]; 2],
    /// Interference magnitude; defaults to `q_+` of the interference
    /// distribution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default = "default_favored")]
    pub favored: ChoiceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloSpec>,
}

fn default_favored() -> ChoiceSpec {
    ChoiceSpec::Cooperate
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Uniform,
    /// Symmetric triangle of the given half width.
    Triangular(f64),
    /// `[q, μ(q)]` knots of a piecewise-linear density.
    Tabulated(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub start: f64,
    pub v: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSpec {
    pub h0: Matrix,
    #[serde(default)]
    pub pieces: Vec<PieceSpec>,
    pub psi0: Vec<Cx>,
    #[serde(default)]
    pub start: f64,
    pub t0: f64,
    pub t: f64,
    /// Extra times at which populations are reported.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<f64>,
    /// Multimode vector for two-time prospects.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multimode: Option<Vec<Cx>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationSpec {
    Raw,
    Conditioned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBaseSpec {
    Natural,
    Two,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDirectives {
    /// Primary observable (`A`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<String>,
    /// Second observable (`B`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second: Option<String>,
    /// Outcome index for Lüders reduction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    /// Outcome set for a disjoint-union probability.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub union: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multimode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<NormalizationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_base: Option<LogBaseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Dimension for named bases without explicit eigenvalues.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub observables: BTreeMap<String, ObservableSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub multimodes: BTreeMap<String, MultimodeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<PipelineSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameScenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interference: Option<DistributionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSpec>,
    #[serde(default)]
    pub run: RunDirectives,
}

/// Parses and validates. Syntax errors carry line and column; semantic
/// errors name the field and the violated constraint.
pub fn parse_scenario(text: &[u8]) -> Result<Scenario, CliError> {
    // serde_json messages already end with "at line L column C".
    let scenario: Scenario = serde_json::from_slice(text).map_err(|e| CliError::Validation(e.to_string()))?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn to_json(scenario: &Scenario) -> String {
    serde_json::to_string_pretty(scenario).expect("scenario serializes")
}

fn at<T>(field: &str, r: qprospect_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::from_core(field, e))
}

fn invalid(field: &str, message: impl fmt::Display) -> CliError {
    CliError::Validation(format!("{field}: {message}"))
}

pub fn matrix(field: &str, m: &Matrix) -> Result<ComplexMatrix, CliError> {
    let rows: Vec<Vec<C64>> = m.iter().map(|r| r.iter().map(|z| z.0).collect()).collect();
    at(field, ComplexMatrix::from_rows(&rows))
}

pub fn vector(field: &str, v: &[Cx]) -> Result<ComplexVector, CliError> {
    at(field, ComplexVector::new(v.iter().map(|z| z.0).collect()))
}

fn coefficients(v: &[Cx]) -> Vec<C64> {
    v.iter().map(|z| z.0).collect()
}

fn finite(field: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(field, "must be finite"))
    }
}

/// The state section as a single-system density operator.
pub fn density(field: &str, spec: &StateSpec) -> Result<DensityOperator, CliError> {
    match spec {
        StateSpec::Pure(v) => at(field, DensityOperator::from_pure(&vector(field, v)?)),
        StateSpec::Density(m) => at(field, DensityOperator::new(matrix(field, m)?)),
        StateSpec::Composite { .. } | StateSpec::Amplitudes(_) | StateSpec::Bell(_) => {
            Ok(composite(field, spec)?.as_density())
        }
    }
}

/// The state section as a bipartite state.
pub fn composite(field: &str, spec: &StateSpec) -> Result<CompositeState, CliError> {
    match spec {
        StateSpec::Composite { dims, matrix: m } => at(field, CompositeState::new(matrix(field, m)?, (dims[0], dims[1]))),
        StateSpec::Amplitudes(m) => at(field, CompositeState::from_amplitudes(&matrix(field, m)?)),
        StateSpec::Bell(m) => at(field, bell_state(*m)),
        StateSpec::Pure(_) | StateSpec::Density(_) => {
            Err(invalid(field, "a bipartite state (composite, amplitudes or bell) is required"))
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(tol) = self.run.tolerance {
            if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
                return Err(invalid("run.tolerance", "must lie in (0, 1)"));
            }
        }
        if let Some(state) = &self.state {
            density("state", state)?;
        }
        for name in self.observables.keys() {
            self.observable(name)?;
        }
        for name in self.multimodes.keys() {
            self.multimode(name)?;
        }
        for (field, name) in [("run.observable", &self.run.observable), ("run.second", &self.run.second)] {
            if let Some(name) = name {
                if !self.observables.contains_key(name) {
                    return Err(invalid(field, format!("unknown observable '{name}'")));
                }
            }
        }
        if let Some(name) = &self.run.multimode {
            if !self.multimodes.contains_key(name) {
                return Err(invalid("run.multimode", format!("unknown multimode '{name}'")));
            }
        }
        if self.pipeline.is_some() {
            self.measurer()?;
            self.stages()?;
        }
        if self.game.is_some() {
            self.game_spec()?;
        }
        if self.interference.is_some() {
            self.distribution()?;
        }
        if let Some(d) = &self.dynamics {
            self.hamiltonian()?;
            self.initial_wave()?;
            finite("dynamics.t0", d.t0)?;
            finite("dynamics.t", d.t)?;
            for &s in &d.samples {
                finite("dynamics.samples", s)?;
            }
        }
        Ok(())
    }

    pub fn state_spec(&self) -> Result<&StateSpec, CliError> {
        self.state.as_ref().ok_or_else(|| invalid("state", "missing"))
    }

    pub fn observable(&self, name: &str) -> Result<Observable, CliError> {
        let field = format!("observables.{name}");
        let spec = self
            .observables
            .get(name)
            .ok_or_else(|| invalid("observables", format!("unknown observable '{name}'")))?;
        let dim = match (&spec.basis, &spec.eigenvalues) {
            (BasisSpec::Columns(m), _) => m.len(),
            (BasisSpec::Named(_), Some(e)) => e.len(),
            (BasisSpec::Named(_), None) => self
                .dimension
                .ok_or_else(|| invalid(&field, "named basis needs eigenvalues or a scenario dimension"))?,
        };
        let eigenvalues = spec.eigenvalues.clone().unwrap_or_else(|| (0..dim).map(|k| k as f64).collect());
        let basis = match &spec.basis {
            BasisSpec::Columns(m) => matrix(&field, m)?,
            BasisSpec::Named(NamedBasis::Computational) => ComplexMatrix::identity(dim),
            BasisSpec::Named(NamedBasis::Fourier) => at(&field, Observable::fourier(name, dim))?.basis().clone(),
        };
        at(&field, Observable::new(name, eigenvalues, basis))
    }

    pub fn multimode(&self, name: &str) -> Result<MultimodeState, CliError> {
        let field = format!("multimodes.{name}");
        let spec = self
            .multimodes
            .get(name)
            .ok_or_else(|| invalid("multimodes", format!("unknown multimode '{name}'")))?;
        let basis = self.observable(&spec.observable).map_err(|e| e.context(&field))?;
        at(&field, MultimodeState::new(basis, coefficients(&spec.coefficients)))
    }

    pub fn named_observable(&self, field: &str, name: &Option<String>) -> Result<Observable, CliError> {
        let name = name.as_ref().ok_or_else(|| invalid(field, "missing"))?;
        self.observable(name)
    }

    pub fn run_multimode(&self) -> Result<MultimodeState, CliError> {
        let name = self.run.multimode.as_ref().ok_or_else(|| invalid("run.multimode", "missing"))?;
        self.multimode(name)
    }

    pub fn normalization(&self) -> Normalization {
        match self.run.normalization {
            Some(NormalizationSpec::Raw) => Normalization::Raw,
            _ => Normalization::Conditioned,
        }
    }

    pub fn log_base(&self) -> LogBase {
        match self.run.log_base {
            Some(LogBaseSpec::Two) => LogBase::Two,
            _ => LogBase::Natural,
        }
    }

    fn pipeline_spec(&self) -> Result<&PipelineSpec, CliError> {
        self.pipeline.as_ref().ok_or_else(|| invalid("pipeline", "missing"))
    }

    pub fn measurer(&self) -> Result<MeasurerSpec, CliError> {
        let p = self.pipeline_spec()?;
        let state = density("pipeline.measurer", &p.measurer)?;
        at("pipeline.coupling", MeasurerSpec::new(state, matrix("pipeline.coupling", &p.coupling)?))
    }

    pub fn stages(&self) -> Result<Vec<PipelineStage>, CliError> {
        let p = self.pipeline_spec()?;
        p.stages
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let field = format!("pipeline.stages[{k}]");
                Ok(match s {
                    StageSpec::Compose => PipelineStage::Compose,
                    StageSpec::Readout => PipelineStage::Readout,
                    StageSpec::Evolve { duration } => PipelineStage::Evolve {
                        duration: finite(&field, *duration)?,
                    },
                    StageSpec::Transform { basis, observables } => match (basis, observables) {
                        (Some(m), None) => {
                            let t = matrix(&field, m)?;
                            at(&field, t.require_unitary("basis transformation"))?;
                            PipelineStage::Transform { basis: t }
                        }
                        (None, Some([to, from])) => {
                            let a = self.observable(to).map_err(|e| e.context(&field))?;
                            let b = self.observable(from).map_err(|e| e.context(&field))?;
                            at(&field, PipelineStage::basis_change(&a, &b))?
                        }
                        _ => return Err(invalid(&field, "transform needs exactly one of 'basis' or 'observables'")),
                    },
                })
            })
            .collect()
    }

    fn game_section(&self) -> Result<&GameScenario, CliError> {
        self.game.as_ref().ok_or_else(|| invalid("game", "missing"))
    }

    pub fn game_spec(&self) -> Result<GameSpec, CliError> {
        let g = self.game_section()?;
        let payoffs = g.payoffs.map(|[x1, x2, x3, x4]| Payoffs { x1, x2, x3, x4 });
        if let Some(q) = g.q {
            if !(0.0..=1.0).contains(&q) {
                return Err(invalid("game.q", "must lie in [0, 1]"));
            }
        }
        if let Some(mc) = &g.monte_carlo {
            if mc.n_pairs == 0 {
                return Err(invalid("game.monte_carlo.n_pairs", "must be at least 1"));
            }
            if mc.workers == 0 {
                return Err(invalid("game.monte_carlo.workers", "must be at least 1"));
            }
        }
        at("game", GameSpec::new(payoffs, g.joint))
    }

    pub fn game(&self) -> Result<&GameScenario, CliError> {
        self.game_section()
    }

    pub fn distribution(&self) -> Result<InterferenceDistribution, CliError> {
        let field = "interference";
        match self.interference.as_ref().unwrap_or(&DistributionSpec::Uniform) {
            DistributionSpec::Uniform => Ok(InterferenceDistribution::Uniform),
            DistributionSpec::Triangular(w) => at(field, InterferenceDistribution::triangular(*w)),
            DistributionSpec::Tabulated(knots) => at(
                field,
                InterferenceDistribution::tabulated(knots.iter().map(|k| (k[0], k[1])).collect()),
            ),
        }
    }

    fn dynamics_spec(&self) -> Result<&DynamicsSpec, CliError> {
        self.dynamics.as_ref().ok_or_else(|| invalid("dynamics", "missing"))
    }

    pub fn hamiltonian(&self) -> Result<HamiltonianSpec, CliError> {
        let d = self.dynamics_spec()?;
        let h0 = matrix("dynamics.h0", &d.h0)?;
        let pieces = d
            .pieces
            .iter()
            .enumerate()
            .map(|(k, p)| Ok((p.start, matrix(&format!("dynamics.pieces[{k}].v"), &p.v)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        at("dynamics.pieces", HamiltonianSpec::new(h0, pieces))
    }

    pub fn initial_wave(&self) -> Result<WaveState, CliError> {
        let d = self.dynamics_spec()?;
        at("dynamics.psi0", WaveState::new(vector("dynamics.psi0", &d.psi0)?, d.start))
    }

    pub fn dynamics(&self) -> Result<&DynamicsSpec, CliError> {
        self.dynamics_spec()
    }

    pub fn dynamics_multimode(&self) -> Option<Vec<C64>> {
        self.dynamics.as_ref()?.multimode.as_deref().map(coefficients)
    }
}
