//! Run configuration: a single TOML document with nesting, strict about
//! unknown keys, with defaults filled on parse so a config round-trips
//! through `parse` and `to_document` into a canonical form.

use num_complex::Complex64;
use qsl_core::linalg::ComplexMatrix;
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

/// The checks a run can execute. Each scenario sweeps an ensemble of random
/// instances and emits one record per inequality or identity checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Speed,
    Bounds,
    KdVerify,
    QubitComplementarity,
    CorrelationWitness,
    Athermality,
    QslTime,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Speed,
        Scenario::Bounds,
        Scenario::KdVerify,
        Scenario::QubitComplementarity,
        Scenario::CorrelationWitness,
        Scenario::Athermality,
        Scenario::QslTime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Speed => "speed",
            Scenario::Bounds => "bounds",
            Scenario::KdVerify => "kd-verify",
            Scenario::QubitComplementarity => "qubit-complementarity",
            Scenario::CorrelationWitness => "correlation-witness",
            Scenario::Athermality => "athermality",
            Scenario::QslTime => "qsl-time",
        }
    }

    pub fn from_name(name: &str) -> Option<Scenario> {
        Scenario::ALL.iter().copied().find(|s| s.name() == name)
    }

    /// One-line description for `qsl scenarios`.
    pub fn describe(self) -> &'static str {
        match self {
            Scenario::Speed => {
                "finite-difference outcome speed against the commutator formula, \
                 the surprisal-weighted route, and the Fisher information bound"
            }
            Scenario::Bounds => {
                "energy-uncertainty trade-off bounds at the three exponent pairs, \
                 the distribution-functional cap, and the purification bound"
            }
            Scenario::KdVerify => {
                "quasiprobability nonreality identities, closed form against \
                 direct table sums and a basis search"
            }
            Scenario::QubitComplementarity => {
                "qubit closed forms: optimal-generator speed equals basis \
                 coherence, and squared speeds of the three unbiased readouts \
                 sum to twice the squared Bloch length"
            }
            Scenario::CorrelationWitness => {
                "minimized local uncertainty as a correlation witness: zero on \
                 product and classically correlated states, spectral closed \
                 form on pure states, invariant under local rotations"
            }
            Scenario::Athermality => {
                "driven thermal purification: populations start at the Gibbs \
                 weights and the distance they travel obeys a minimum-time bound"
            }
            Scenario::QslTime => {
                "minimum driving time from endpoint distributions against the \
                 actual horizon, with the two-outcome spectral measurement as \
                 the extremal case"
            }
        }
    }

    /// Dimensions swept when the config names none. For bipartite scenarios
    /// the entries are subsystem dimensions.
    pub fn default_dims(self) -> Vec<usize> {
        match self {
            Scenario::Speed | Scenario::Bounds => vec![2, 3, 4, 5, 6],
            Scenario::KdVerify => vec![2, 3, 4, 5],
            Scenario::QubitComplementarity => vec![2],
            Scenario::CorrelationWitness => vec![2, 2],
            Scenario::Athermality => vec![2],
            Scenario::QslTime => vec![2, 3, 4],
        }
    }
}

/// Pass margins for every check a scenario can emit, all overridable from
/// the `[tolerances]` table. A physical inequality passes when its slack is
/// no further below zero than the matching margin; an identity or
/// route-agreement check passes when the discrepancy stays under it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative agreement between the finite-difference and commutator speeds.
    pub fd_relative: f64,
    /// Absolute agreement used instead when the speed is below 1e-3.
    pub fd_absolute: f64,
    /// Agreement between the plain and surprisal-weighted difference routes.
    pub surprisal: f64,
    /// Slack floor for the Fisher information bound.
    pub fisher: f64,
    /// Slack floor for the energy-uncertainty trade-off bounds.
    pub holder: f64,
    /// Margin for the exactly saturated trade-off anchor case.
    pub saturation: f64,
    /// Slack floor for the distribution-functional cap, and its pure-state
    /// equality margin.
    pub entropy: f64,
    /// Slack floor for the purification bound.
    pub stddev: f64,
    /// Margin for the deviation-sum identity on projective readouts.
    pub stddev_identity: f64,
    /// Agreement between the nonreality closed form and direct table sums.
    pub kd_exact: f64,
    /// How far below the closed form the basis search may land.
    pub kd_search: f64,
    /// How far above the closed form the basis search may land.
    pub search_overshoot: f64,
    /// Margin for the optimal-generator speed against the basis coherence.
    pub qubit_generator: f64,
    /// Margin for the three-readout complementarity identity.
    pub mub: f64,
    /// Slack floor for minimum-time bounds on driven runs.
    pub time: f64,
    /// Agreement between the two-outcome spectral measurement's endpoint
    /// distance and the trace distance of the endpoint states.
    pub helstrom: f64,
    /// Margin for the closed-form minimum time of the anchor rotation.
    pub analytic_time: f64,
    /// Ceiling for the witness on product and classically correlated states.
    pub witness_zero: f64,
    /// Agreement between the witness search and the pure-state closed form.
    pub witness_match: f64,
    /// Drift allowed between witness values of locally rotated states.
    pub witness_invariance: f64,
    /// Slack floor for the thermalization-distance time bound.
    pub athermality: f64,
    /// Distance allowed between initial populations and the Gibbs weights.
    pub gibbs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            fd_relative: 1e-6,
            fd_absolute: 1e-9,
            surprisal: 1e-7,
            fisher: 1e-8,
            holder: 1e-8,
            saturation: 1e-9,
            entropy: 1e-9,
            stddev: 1e-8,
            stddev_identity: 1e-10,
            kd_exact: 1e-10,
            kd_search: 1e-3,
            search_overshoot: 1e-9,
            qubit_generator: 1e-9,
            mub: 1e-10,
            time: 1e-6,
            helstrom: 1e-9,
            analytic_time: 1e-3,
            witness_zero: 1e-6,
            witness_match: 1e-3,
            witness_invariance: 2e-3,
            athermality: 1e-6,
            gibbs: 1e-9,
        }
    }
}

/// A complex matrix in a config document: rows of `[re, im]` pairs,
/// row-major, one inner list per column; the row count fixes the dimension.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

/// Builds and shape-checks a matrix from its document form.
pub fn matrix_from_spec(label: &str, spec: &MatrixSpec) -> CliResult<ComplexMatrix> {
    let n = spec.len();
    if n == 0 {
        return Err(CliError::Config(format!("{label}: empty matrix")));
    }
    let mut data = Vec::with_capacity(n * n);
    for (r, row) in spec.iter().enumerate() {
        if row.len() != n {
            return Err(CliError::Config(format!(
                "{label}: row {r} has {} entries, expected {n} (square, row-major)",
                row.len()
            )));
        }
        for &[re, im] in row {
            if !re.is_finite() || !im.is_finite() {
                return Err(CliError::Config(format!("{label}: non-finite entry")));
            }
            data.push(Complex64::new(re, im));
        }
    }
    ComplexMatrix::new(n, n, data).map_err(CliError::Numerical)
}

/// Explicit driving profile overriding the scenario's random generator.
/// Matrices must match the single configured dimension (the squared system
/// dimension for the athermality scenario, which drives the joint copy).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// One of `constant`, `linear-ramp`, `piecewise`.
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian_end: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<MatrixSpec>>,
}

impl ProtocolConfig {
    fn validate(&self) -> CliResult<()> {
        let need = |cond: bool, msg: &str| {
            if cond {
                Ok(())
            } else {
                Err(CliError::Config(format!("protocol: {msg}")))
            }
        };
        match self.family.as_str() {
            "constant" => {
                need(
                    self.hamiltonian.is_some(),
                    "constant requires `hamiltonian`",
                )?;
                need(
                    self.hamiltonian_end.is_none() && self.segments.is_none(),
                    "constant takes only `hamiltonian`",
                )
            }
            "linear-ramp" => {
                need(
                    self.hamiltonian.is_some() && self.hamiltonian_end.is_some(),
                    "linear-ramp requires `hamiltonian` and `hamiltonian_end`",
                )?;
                need(self.segments.is_none(), "linear-ramp takes no `segments`")
            }
            "piecewise" => {
                need(
                    self.segments.as_ref().is_some_and(|s| !s.is_empty()),
                    "piecewise requires a nonempty `segments` list",
                )?;
                need(
                    self.hamiltonian.is_none() && self.hamiltonian_end.is_none(),
                    "piecewise takes only `segments`",
                )
            }
            other => Err(CliError::Config(format!(
                "protocol: unknown family {other:?} (constant, linear-ramp, piecewise)"
            ))),
        }
    }

    /// Matrices in document order, shape-checked against a required dimension.
    pub fn matrices(&self, required_dim: usize) -> CliResult<Vec<ComplexMatrix>> {
        let mut out = Vec::new();
        if let Some(h) = &self.hamiltonian {
            out.push(matrix_from_spec("protocol.hamiltonian", h)?);
        }
        if let Some(h) = &self.hamiltonian_end {
            out.push(matrix_from_spec("protocol.hamiltonian_end", h)?);
        }
        if let Some(segments) = &self.segments {
            for (i, s) in segments.iter().enumerate() {
                out.push(matrix_from_spec(&format!("protocol.segments[{i}]"), s)?);
            }
        }
        for m in &out {
            if m.rows() != required_dim {
                return Err(CliError::Config(format!(
                    "protocol: matrix is {}x{}, the scenario needs {required_dim}x{required_dim}",
                    m.rows(),
                    m.rows()
                )));
            }
        }
        Ok(out)
    }
}

/// Where and how reports are written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Output directory; `--out` overrides, `qsl-out` if neither is given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// `csv` or `json`; `--format` overrides.
    pub format: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: None,
            format: "csv".to_owned(),
        }
    }
}

fn default_ensemble() -> usize {
    100
}
fn default_steps() -> usize {
    1000
}
fn default_beta() -> f64 {
    1.0
}
fn default_tau() -> f64 {
    1.0
}
fn default_restarts() -> usize {
    8
}
fn default_iterations() -> usize {
    300
}
fn default_epsilon() -> f64 {
    1e-5
}

/// A validated run: scenario, dimensions, seed, sweep sizes, numeric knobs,
/// tolerance overrides, optional explicit protocol, output settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    /// Single dimension, folded into `dims` on canonicalization.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Dimensions to sweep; subsystem pair for correlation-witness, system
    /// dimension for athermality (the joint copy is its square).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    /// Master seed. Required before a run starts; `--seed` can supply it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Trials per dimension entry.
    #[serde(default = "default_ensemble")]
    pub ensemble: usize,
    /// Time-grid steps for scenarios that integrate a trajectory.
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Inverse temperature of the athermality scenario's thermal state.
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Driving horizon for trajectory scenarios.
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Random restarts for the basis searches.
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    /// Hill-climb iterations per restart.
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    /// Central-difference probe offset.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    /// Parses and validates a TOML document, filling defaults and folding
    /// `dim` into `dims`. The seed may still be absent at this point; the
    /// runner insists on one before any trial executes.
    pub fn parse(text: &str) -> CliResult<RunConfig> {
        let raw: RunConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        raw.canonical()
    }

    /// Canonical form: scenario validated, `dims` explicit and checked,
    /// numeric knobs sane. Idempotent.
    pub fn canonical(mut self) -> CliResult<RunConfig> {
        let scenario = self.kind()?;
        let dims = match (self.dim.take(), self.dims.take()) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "set either `dim` or `dims`, not both".to_owned(),
                ))
            }
            (Some(d), None) => vec![d],
            (None, Some(ds)) => ds,
            (None, None) => scenario.default_dims(),
        };
        validate_dims(scenario, &dims)?;
        self.dims = Some(dims);

        if self.ensemble > 100_000 {
            return Err(CliError::Config(format!(
                "ensemble {} is unreasonably large",
                self.ensemble
            )));
        }
        if self.steps == 0 {
            return Err(CliError::Config("steps must be positive".to_owned()));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(CliError::Config(format!(
                "beta must be finite and nonnegative, got {}",
                self.beta
            )));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(CliError::Config(format!(
                "tau must be finite and positive, got {}",
                self.tau
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0 && self.epsilon < self.tau / 4.0) {
            return Err(CliError::Config(format!(
                "epsilon must lie in (0, tau/4), got {}",
                self.epsilon
            )));
        }
        if self.iterations == 0 {
            return Err(CliError::Config("iterations must be positive".to_owned()));
        }
        match self.output.format.as_str() {
            "csv" | "json" => {}
            other => {
                return Err(CliError::Config(format!(
                    "output.format must be csv or json, got {other:?}"
                )))
            }
        }
        if let Some(protocol) = &self.protocol {
            protocol.validate()?;
            if !matches!(
                scenario,
                Scenario::Speed | Scenario::QslTime | Scenario::Athermality
            ) {
                return Err(CliError::Config(format!(
                    "protocol: the {} scenario draws its instances randomly and \
                     takes no explicit protocol",
                    scenario.name()
                )));
            }
            let dims = self.dims.as_ref().expect("dims set above");
            if dims.len() != 1 {
                return Err(CliError::Config(
                    "protocol: an explicit protocol needs a single configured dimension".to_owned(),
                ));
            }
            let required = match scenario {
                Scenario::Athermality => dims[0] * dims[0],
                _ => dims[0],
            };
            // Shape check now; numerical validation happens when the
            // schedule is built.
            protocol.matrices(required)?;
        }
        Ok(self)
    }

    /// The validated scenario.
    pub fn kind(&self) -> CliResult<Scenario> {
        Scenario::from_name(&self.scenario)
            .ok_or_else(|| CliError::UnknownScenario(self.scenario.clone()))
    }

    /// Canonical dimensions list. Valid only after `canonical`.
    pub fn dims(&self) -> &[usize] {
        self.dims.as_deref().expect("canonical config has dims")
    }

    /// The master seed, or the error that stops an unseeded run.
    pub fn seed_or_err(&self) -> CliResult<u64> {
        self.seed.ok_or(CliError::MissingSeed)
    }

    /// Canonical TOML form, the normalization target of the round-trip rule
    /// `to_document(parse(x)) = to_document(parse(to_document(parse(x))))`.
    pub fn to_document(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn validate_dims(scenario: Scenario, dims: &[usize]) -> CliResult<()> {
    if dims.is_empty() {
        return Err(CliError::Config("dims must be nonempty".to_owned()));
    }
    for &d in dims {
        if !(2..=16).contains(&d) {
            return Err(CliError::Config(format!(
                "dimension {d} outside the supported range 2..=16"
            )));
        }
    }
    match scenario {
        Scenario::QubitComplementarity => {
            if dims != [2] {
                return Err(CliError::Config(
                    "qubit-complementarity runs at dimension 2 only".to_owned(),
                ));
            }
        }
        Scenario::CorrelationWitness => {
            if dims.len() != 2 {
                return Err(CliError::Config(
                    "correlation-witness needs exactly two subsystem dimensions".to_owned(),
                ));
            }
            if dims[0] * dims[1] > 16 {
                return Err(CliError::Config(format!(
                    "joint dimension {} exceeds the supported total 16",
                    dims[0] * dims[1]
                )));
            }
        }
        Scenario::Athermality => {
            if dims.len() != 1 {
                return Err(CliError::Config(
                    "athermality needs a single system dimension".to_owned(),
                ));
            }
            if dims[0] * dims[0] > 16 {
                return Err(CliError::Config(format!(
                    "joint dimension {} of the two-copy drive exceeds the supported total 16",
                    dims[0] * dims[0]
                )));
            }
        }
        _ => {}
    }
    Ok(())
}
