//! Problem configuration, the run/sweep/verify pipelines and their output.
//!
//! Configuration files are INI-style:
//!
//! ```text
//! [system]
//! example = compression      # compression | cohesive | bending | custom
//! [body1]
//! C1 = 1
//! a1 = 0.81
//! [body2]
//! C2 = 1
//! a2 = 0.81
//! ```
//!
//! Keys per section: `system`: example, family (custom only), A;
//! `body1`/`body2`: C, a, b, p with the body index appended; `contact`:
//! d_allow, g; `load`: tau, u_D; `numerics`: quad_order, grid_n,
//! probe_count, seed.

use std::fmt::{self, Write as _};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{
    self, closed_form_interval, criteria_check, CriteriaResult, Example, ExampleParams, LoadInterval, SearchConfig,
};
use crate::contact::{
    self, AdmissibilityReport, BodySpec, Condition, ContactEvaluation, DirichletData, Regime, SystemSpec,
};
use crate::energy::{self, EnergyEnclosure, LoadData, SelfStress, StaticTrial};
use crate::error::Error;
use crate::kinematics::{self, DeformationMap};
use crate::material::PressureField;
use crate::quadrature::QuadratureRule;
use crate::tensor3::Vec3;

/// Tolerance between numeric and closed-form endpoints.
pub const NUMERIC_AGREEMENT: f64 = 1e-6;
/// Oracle endpoints must fall within this many grid steps of the closed form.
pub const ORACLE_STEPS: f64 = 2.0;
/// `|E_p - E_c|` allowed at a designated exact state.
pub const ENERGY_EQUALITY: f64 = 1e-8;
/// Divergence identity residual allowed for equilibrated fields.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;
/// Change allowed when the quadrature order is doubled.
pub const QUADRATURE_CONVERGENCE: f64 = 1e-9;
/// `|integral of J - image volume|` allowed for isochoric maps.
pub const INJECTIVITY_EQUALITY: f64 = 1e-9;
/// Random trial pairs drawn by `verify` for the enclosure.
pub const VERIFY_TRIALS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Parse { line: usize, message: String },
    Validation(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { line, message } => write!(f, "parse error on line {line}: {message}"),
            ConfigError::Validation(message) => write!(f, "invalid configuration: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleKind {
    Compression,
    Cohesive,
    Bending,
    Custom,
}

impl ExampleKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "compression" => ExampleKind::Compression,
            "cohesive" => ExampleKind::Cohesive,
            "bending" => ExampleKind::Bending,
            "custom" => ExampleKind::Custom,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            ExampleKind::Compression => "compression",
            ExampleKind::Cohesive => "cohesive",
            ExampleKind::Bending => "bending",
            ExampleKind::Custom => "custom",
        }
    }
}

/// Deformation family of a custom problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CustomFamily {
    Triaxial,
    Bending,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyConfig {
    pub c: f64,
    pub a: f64,
    /// Offset `b`; body 2 defaults to the value that closes the interface.
    pub b: Option<f64>,
    /// Constant pressure; defaults to the designated equilibrium state.
    pub pressure: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub example: ExampleKind,
    pub family: Option<CustomFamily>,
    pub bend: f64,
    pub body1: BodyConfig,
    pub body2: BodyConfig,
    pub d_allow: f64,
    pub g: f64,
    pub tau: Option<f64>,
    pub u_d: Option<Vec3>,
    pub quad_order: usize,
    pub grid_n: usize,
    pub probe_count: usize,
    pub seed: u64,
}

impl ProblemConfig {
    /// The bounds-module example this configuration instantiates.
    pub fn example_tag(&self) -> Example {
        match (self.example, self.family) {
            (ExampleKind::Compression, _) => Example::Compression,
            (ExampleKind::Cohesive, _) => Example::Cohesive,
            (ExampleKind::Bending, _) | (ExampleKind::Custom, Some(CustomFamily::Bending)) => Example::Bending,
            (ExampleKind::Custom, _) if self.g > 0.0 => Example::Cohesive,
            (ExampleKind::Custom, _) => Example::Compression,
        }
    }

    /// Kinematic and material parameters with defaults filled in.
    pub fn params(&self) -> ExampleParams {
        let example = self.example_tag();
        let (a1, a2) = (self.body1.a, self.body2.a);
        let b1 = self.body1.b.unwrap_or(0.0);
        let b2 = self.body2.b.unwrap_or(match example {
            Example::Bending => a1 + b1 - a2 - self.d_allow,
            _ => 0.5 * (a1 - a2) + b1 - self.d_allow,
        });
        ExampleParams {
            c1: self.body1.c,
            c2: self.body2.c,
            a1,
            a2,
            b1,
            b2,
            bend: self.bend,
            cohesion: self.g,
            gap_allowance: self.d_allow,
        }
    }

    pub fn search_config(&self) -> SearchConfig {
        SearchConfig {
            probe_count: self.probe_count,
            seed: self.seed,
            ..SearchConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Validation(m));
        for (name, v) in [
            ("C1", self.body1.c),
            ("C2", self.body2.c),
            ("a1", self.body1.a),
            ("a2", self.body2.a),
            ("A", self.bend),
        ] {
            if !(v > 0.0) {
                return invalid(format!("{name} must be positive"));
            }
        }
        if self.d_allow < 0.0 {
            return invalid("d_allow must be non-negative".into());
        }
        if self.g < 0.0 {
            return invalid("g must be non-negative".into());
        }
        if self.example == ExampleKind::Cohesive && !(self.g > 0.0) {
            return invalid("g must be positive for the cohesive example".into());
        }
        if self.example == ExampleKind::Custom && self.family.is_none() {
            return invalid("custom problems need family = triaxial | bending".into());
        }
        if self.example != ExampleKind::Custom && self.family.is_some() {
            return invalid("family is only used by custom problems".into());
        }
        if self.example_tag() == Example::Bending {
            match self.body1.b {
                Some(b) if b > kinematics::MIN_RADIUS * kinematics::MIN_RADIUS => {}
                _ => return invalid("b1 must be given and positive for bending (inner radius sqrt(b1))".into()),
            }
        }
        if self.quad_order < 1 {
            return invalid("quad_order must be at least 1".into());
        }
        if self.grid_n < 100 {
            return invalid("grid_n must be at least 100".into());
        }
        if self.probe_count < bounds::MIN_PROBES {
            return invalid(format!("probe_count must be at least {}", bounds::MIN_PROBES));
        }
        let params = self.params();
        params
            .system(self.example_tag(), 0.0, 0.0)
            .map_err(|e| ConfigError::Validation(e.to_string()))?;
        params
            .regime(self.example_tag())
            .map_err(|e| ConfigError::Validation(e.to_string()))?;
        Ok(())
    }
}

const SECTIONS: [&str; 6] = ["system", "body1", "body2", "contact", "load", "numerics"];

fn allowed_keys(section: &str) -> &'static [&'static str] {
    match section {
        "system" => &["example", "family", "A"],
        "body1" => &["C1", "a1", "b1", "p1"],
        "body2" => &["C2", "a2", "b2", "p2"],
        "contact" => &["d_allow", "g"],
        "load" => &["tau", "u_D"],
        "numerics" => &["quad_order", "grid_n", "probe_count", "seed"],
        _ => &[],
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ProblemConfig, ConfigError> {
    let mut section: Option<&str> = None;
    let mut entries: Vec<(&str, &str, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ConfigError::Parse { line: line_no, message };
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err("unterminated section header".into()))?
                .trim();
            section = Some(
                SECTIONS
                    .iter()
                    .find(|s| **s == name)
                    .ok_or_else(|| err(format!("unknown section [{name}]")))?,
            );
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section.ok_or_else(|| err(format!("key {key} outside any section")))?;
        if !allowed_keys(sec).contains(&key) {
            return Err(err(format!("unknown key {key} in [{sec}]")));
        }
        if entries.iter().any(|(k, _, _)| *k == key) {
            return Err(err(format!("duplicate key {key}")));
        }
        entries.push((key, value, line_no));
    }

    let get = |key: &str| entries.iter().find(|(k, _, _)| *k == key).map(|(_, v, l)| (*v, *l));
    let real = |key: &str| -> Result<Option<f64>, ConfigError> {
        match get(key) {
            None => Ok(None),
            Some((v, line)) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(Some(x)),
                _ => Err(ConfigError::Parse {
                    line,
                    message: format!("{key} = {v} is not a finite real"),
                }),
            },
        }
    };
    let required = |key: &str| -> Result<f64, ConfigError> {
        real(key)?.ok_or_else(|| ConfigError::Validation(format!("missing required key {key}")))
    };
    let integer = |key: &str, default: u64| -> Result<u64, ConfigError> {
        match get(key) {
            None => Ok(default),
            Some((v, line)) => v.parse::<u64>().map_err(|_| ConfigError::Parse {
                line,
                message: format!("{key} = {v} is not a non-negative integer"),
            }),
        }
    };

    let (example_text, example_line) =
        get("example").ok_or_else(|| ConfigError::Validation("missing required key example".into()))?;
    let example = ExampleKind::parse(example_text).ok_or_else(|| ConfigError::Parse {
        line: example_line,
        message: format!("unknown example {example_text}"),
    })?;
    let family = match get("family") {
        None => None,
        Some(("triaxial", _)) => Some(CustomFamily::Triaxial),
        Some(("bending", _)) => Some(CustomFamily::Bending),
        Some((v, line)) => {
            return Err(ConfigError::Parse {
                line,
                message: format!("unknown family {v}"),
            })
        }
    };
    let u_d = match get("u_D") {
        None => None,
        Some((v, line)) => {
            let parts: Vec<Option<f64>> = v
                .split(',')
                .map(|s| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
                .collect();
            match parts.as_slice() {
                [Some(x), Some(y), Some(z)] => Some(Vec3::new(*x, *y, *z)),
                _ => {
                    return Err(ConfigError::Parse {
                        line,
                        message: format!("u_D = {v} must be three comma-separated reals"),
                    })
                }
            }
        }
    };
    let config = ProblemConfig {
        example,
        family,
        bend: real("A")?.unwrap_or(1.0),
        body1: BodyConfig {
            c: required("C1")?,
            a: required("a1")?,
            b: real("b1")?,
            pressure: real("p1")?,
        },
        body2: BodyConfig {
            c: required("C2")?,
            a: required("a2")?,
            b: real("b2")?,
            pressure: real("p2")?,
        },
        d_allow: real("d_allow")?.unwrap_or(0.0),
        g: real("g")?.unwrap_or(0.0),
        tau: real("tau")?,
        u_d,
        quad_order: integer("quad_order", 8)? as usize,
        grid_n: integer("grid_n", 1000)? as usize,
        probe_count: integer("probe_count", 200)? as usize,
        seed: integer("seed", 42)?,
    };
    config.validate()?;
    Ok(config)
}

/// Writes a configuration that [`parse_config`] reads back unchanged.
pub fn serialize_config(config: &ProblemConfig) -> String {
    let mut out = String::new();
    let mut put = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    put("[system]".into());
    put(format!("example = {}", config.example.name()));
    match config.family {
        Some(CustomFamily::Triaxial) => put("family = triaxial".into()),
        Some(CustomFamily::Bending) => put("family = bending".into()),
        None => {}
    }
    put(format!("A = {:?}", config.bend));
    for (i, body) in [(1, &config.body1), (2, &config.body2)] {
        put(format!("\n[body{i}]"));
        put(format!("C{i} = {:?}", body.c));
        put(format!("a{i} = {:?}", body.a));
        if let Some(b) = body.b {
            put(format!("b{i} = {b:?}"));
        }
        if let Some(p) = body.pressure {
            put(format!("p{i} = {p:?}"));
        }
    }
    put("\n[contact]".into());
    put(format!("d_allow = {:?}", config.d_allow));
    put(format!("g = {:?}", config.g));
    if config.tau.is_some() || config.u_d.is_some() {
        put("\n[load]".into());
        if let Some(t) = config.tau {
            put(format!("tau = {t:?}"));
        }
        if let Some(u) = config.u_d {
            put(format!("u_D = {:?}, {:?}, {:?}", u.x(), u.y(), u.z()));
        }
    }
    put("\n[numerics]".into());
    put(format!("quad_order = {}", config.quad_order));
    put(format!("grid_n = {}", config.grid_n));
    put(format!("probe_count = {}", config.probe_count));
    put(format!("seed = {}", config.seed));
    out
}

/// Documented ambiguities and degeneracies a run can trigger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Warning {
    IdentityStretch,
    EmptyInterval,
    StrictPositivity,
    ExtensionalModes,
    ThinBodyArea,
    ProfileWindow,
    LoadedFaceTraction,
    NominalTraction,
    ContactPairing,
    CohesiveLowerEndpoint,
    IntervalDisagreement,
}

impl Warning {
    pub fn text(self) -> &'static str {
        match self {
            Warning::IdentityStretch => "degenerate: identity stretch",
            Warning::EmptyInterval => "degenerate: empty closed-contact interval",
            Warning::StrictPositivity => {
                "criteria: the unconstrained complementary condition is applied as strict positivity, not equality"
            }
            Warning::ExtensionalModes => "criteria: extensional modes are non-positive while shear modes pass",
            Warning::ThinBodyArea => "thin body: interface area change is neglected (reference area 1)",
            Warning::ProfileWindow => "bending: the equilibrium pressure profile leaves the constant-pressure window",
            Warning::LoadedFaceTraction => "bending: the loaded-face traction differs from the interface traction",
            Warning::NominalTraction => {
                "thin body: nominal and Cauchy interface tractions differ for unequal stretches"
            }
            Warning::ContactPairing => "energy: contact-face terms are integrated per body with each body's normal",
            Warning::CohesiveLowerEndpoint => "cohesive: the lower endpoint reuses the cohesionless expression",
            Warning::IntervalDisagreement => "bounds: closed-form, numeric and oracle intervals disagree",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectivityReport {
    pub injective: bool,
    pub jacobian_integral: f64,
    pub image_volume: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub example: Example,
    /// Interface traction of the designated state.
    pub reference_load: f64,
    /// Normal traction of the designated state on the loaded face.
    pub loaded_face_traction: f64,
    pub tau_given: bool,
    pub injectivity: [InjectivityReport; 2],
    pub admissibility: AdmissibilityReport,
    pub contact: ContactEvaluation,
    pub enclosure: Option<EnergyEnclosure>,
    pub identity_residual: Option<f64>,
    pub criteria: [CriteriaResult; 2],
    pub closed_windows: [(f64, f64); 2],
    pub closed_form: LoadInterval,
    pub numeric: Result<LoadInterval, String>,
    pub oracle: LoadInterval,
    pub oracle_resolution: f64,
    pub warnings: Vec<Warning>,
}

/// Failure of a pipeline, with the exit status it maps to.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Config(ConfigError),
    Model { stage: &'static str, error: Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Model { error, .. } => match error {
                Error::Numerical(_) | Error::NonFiniteIntegrand | Error::SingularMatrix { .. } => 3,
                _ => 2,
            },
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => e.fmt(f),
            RunError::Model { stage, error } => write!(f, "{stage}: {error}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

fn stage<T>(name: &'static str, r: crate::Result<T>) -> Result<T, RunError> {
    r.map_err(|error| RunError::Model { stage: name, error })
}

/// Interface traction the designated state carries.
fn reference_load(config: &ProblemConfig, closed_form: &LoadInterval) -> f64 {
    if let Some(t) = config.tau {
        return t;
    }
    match closed_form.regime {
        Regime::Open => closed_form.tau_lo,
        Regime::Closed if !closed_form.empty => 0.5 * (closed_form.tau_lo + closed_form.tau_hi),
        Regime::Closed => 0.0,
    }
}

/// The equilibrium state carrying interface traction `tau`.
///
/// Stretched bodies get constant pressures from the interface traction; bent
/// bodies get radial-equilibrium profiles anchored at the interface. Explicit
/// pressures in the configuration override both.
pub fn designated_state(config: &ProblemConfig, tau: f64) -> crate::Result<SystemSpec> {
    let example = config.example_tag();
    let params = config.params();
    let mut bodies = Vec::with_capacity(2);
    for (index, body_config) in [config.body1, config.body2].into_iter().enumerate() {
        let free = params.body(example, index, 0.0)?;
        let body = match body_config.pressure {
            Some(p) => free.with_pressure(PressureField::Constant(p))?,
            None if example == Example::Bending => {
                free.with_pressure(contact::solve_radial_pressure(&free, 0.5, tau)?)?
            }
            None => free.with_pressure(PressureField::Constant(contact::contact_traction(&free, 0.5)? - tau))?,
        };
        bodies.push(body);
    }
    let body2 = bodies.pop().expect("two bodies");
    let body1 = bodies.pop().expect("two bodies");
    SystemSpec::new(body1, body2, params.gap_allowance, params.traction_cap(example))
}

fn dirichlet_data(config: &ProblemConfig, state: &SystemSpec) -> DirichletData {
    match config.u_d {
        Some(u) => DirichletData::Displacement(u),
        None => DirichletData::Placement(state.body2.map),
    }
}

fn intervals_agree(
    closed: &LoadInterval,
    numeric: &Result<LoadInterval, String>,
    oracle: &LoadInterval,
    resolution: f64,
) -> bool {
    let tol = NUMERIC_AGREEMENT;
    let numeric_ok = match numeric {
        Ok(n) => {
            !closed.empty
                && n.regime == closed.regime
                && (n.tau_lo - closed.tau_lo).abs() <= tol
                && (n.tau_hi - closed.tau_hi).abs() <= tol
        }
        Err(_) => closed.empty,
    };
    let oracle_ok = if closed.empty {
        oracle.empty
    } else {
        !oracle.empty
            && oracle.regime == closed.regime
            && (oracle.tau_lo - closed.tau_lo).abs() <= ORACLE_STEPS * resolution
            && (oracle.tau_hi - closed.tau_hi).abs() <= ORACLE_STEPS * resolution
    };
    numeric_ok && oracle_ok
}

/// Runs the full pipeline for one configuration.
pub fn run(config: &ProblemConfig) -> Result<RunReport, RunError> {
    run_with(config, 0.0)
}

fn run_with(config: &ProblemConfig, closed_form_offset: f64) -> Result<RunReport, RunError> {
    config.validate()?;
    let example = config.example_tag();
    let params = config.params();
    let search = config.search_config();
    let rule = stage("energy", QuadratureRule::new(config.quad_order))?;
    let mut warnings = vec![Warning::StrictPositivity];

    let mut closed_form = stage("bounds", closed_form_interval(example, &params))?;
    if closed_form.regime == Regime::Closed && !closed_form.empty {
        closed_form.tau_lo += closed_form_offset;
    }
    let tau = reference_load(config, &closed_form);
    let state = stage("contact", designated_state(config, tau))?;

    let mut injectivity = [InjectivityReport {
        injective: false,
        jacobian_integral: 0.0,
        image_volume: 0.0,
    }; 2];
    for (slot, body) in injectivity.iter_mut().zip(state.bodies()) {
        *slot = InjectivityReport {
            injective: stage(
                "kinematics",
                kinematics::injectivity_check(&body.map, &body.domain, config.quad_order.max(2)),
            )?,
            jacobian_integral: stage(
                "kinematics",
                kinematics::jacobian_integral(&body.map, &body.domain, config.quad_order),
            )?,
            image_volume: stage("kinematics", kinematics::image_volume(&body.map, &body.domain))?,
        };
    }

    let dirichlet = dirichlet_data(config, &state);
    let loaded = stage(
        "contact",
        contact::contact_traction(&state.body1, state.body1.domain.x_lo),
    )?;
    let admissibility = stage("contact", contact::check_admissible(&state, &dirichlet, loaded))?;
    let contact_eval = stage("contact", contact::evaluate_contact(&state))?;
    if (loaded - tau).abs() > contact::TRACTION_TOLERANCE {
        warnings.push(Warning::LoadedFaceTraction);
    }

    let (enclosure, identity_residual) = if config.tau.is_some() {
        let load = LoadData::Designated(state.clone());
        let enc = stage(
            "energy",
            energy::enclosure(&state, &StaticTrial::exact(&state), &load, &rule),
        )?;
        let identity = stage("energy", energy::divergence_identity_residual(&state, &rule))?;
        warnings.push(Warning::ContactPairing);
        (Some(enc), Some(identity))
    } else {
        (None, None)
    };

    let mut criteria = Vec::with_capacity(2);
    let mut closed_windows = [(0.0, 0.0); 2];
    for (index, body) in state.bodies().into_iter().enumerate() {
        let result = stage("bounds", criteria_check(body, config.probe_count, config.seed))?;
        if result.primal_ok && result.extensional_min <= 0.0 {
            warnings.push(Warning::ExtensionalModes);
        }
        closed_windows[index] = stage("bounds", bounds::pressure_window(body))?;
        if example == Example::Bending && !body.pressure.is_constant() {
            let at_contact = stage("contact", body.pressure_at(Vec3::new(0.5, 0.5, 0.5)))?;
            let constant = stage("bounds", body.with_pressure(PressureField::Constant(at_contact)))?;
            let reference = stage("bounds", criteria_check(&constant, config.probe_count, config.seed))?;
            if reference.primal_ok && !result.primal_ok {
                warnings.push(Warning::ProfileWindow);
            }
        }
        criteria.push(result);
    }
    let criteria = [criteria[0], criteria[1]];

    let numeric = bounds::numeric_load_bounds(example, &params, &search).map_err(|e| e.to_string());
    let oracle = stage(
        "bounds",
        bounds::brute_force_oracle(example, &params, config.grid_n, &search),
    )?;
    let oracle_resolution = stage("bounds", bounds::oracle_resolution(example, &params, config.grid_n))?;

    if closed_form.regime == Regime::Closed {
        warnings.push(Warning::ThinBodyArea);
        if closed_form.empty {
            let identity = example != Example::Bending && (params.a1 == 1.0 || params.a2 == 1.0);
            warnings.push(if identity {
                Warning::IdentityStretch
            } else {
                Warning::EmptyInterval
            });
        }
    }
    if example != Example::Bending && params.a1 != params.a2 {
        warnings.push(Warning::NominalTraction);
    }
    if example == Example::Cohesive {
        warnings.push(Warning::CohesiveLowerEndpoint);
    }
    if closed_form.regime == Regime::Closed && !intervals_agree(&closed_form, &numeric, &oracle, oracle_resolution) {
        warnings.push(Warning::IntervalDisagreement);
    }
    warnings.sort();
    warnings.dedup();

    Ok(RunReport {
        example,
        reference_load: tau,
        loaded_face_traction: loaded,
        tau_given: config.tau.is_some(),
        injectivity,
        admissibility,
        contact: contact_eval,
        enclosure,
        identity_residual,
        criteria,
        closed_windows,
        closed_form,
        numeric,
        oracle,
        oracle_resolution,
        warnings,
    })
}

/// Formats `x` with 12 significant digits, trimming trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{exp}")
    }
}

fn fmt_interval(i: &LoadInterval) -> String {
    match (i.regime, i.empty) {
        (Regime::Open, _) => format!("{{{}}} (open contact)", fmt_sig(i.tau_lo)),
        (Regime::Closed, true) if i.tau_lo.is_nan() => "empty (closed contact)".into(),
        (Regime::Closed, true) => format!("({}, {}) empty (closed contact)", fmt_sig(i.tau_lo), fmt_sig(i.tau_hi)),
        (Regime::Closed, false) => format!("({}, {}) (closed contact)", fmt_sig(i.tau_lo), fmt_sig(i.tau_hi)),
    }
}

fn ok_text(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

/// Plain-text rendering of a run report.
pub fn render_report(r: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "example: {}", r.example.name());
    let _ = writeln!(
        s,
        "reference load: {} ({})",
        fmt_sig(r.reference_load),
        if r.tau_given { "given" } else { "designated" }
    );
    let _ = writeln!(s, "loaded-face traction: {}", fmt_sig(r.loaded_face_traction));

    let _ = writeln!(
        s,
        "\n[kinematics]  injectivity tolerance {}",
        fmt_sig(INJECTIVITY_EQUALITY)
    );
    for (i, inj) in r.injectivity.iter().enumerate() {
        let _ = writeln!(
            s,
            "body{}: injective {}  integral J = {}  image volume = {}",
            i + 1,
            inj.injective,
            fmt_sig(inj.jacobian_integral),
            fmt_sig(inj.image_volume)
        );
    }

    let _ = writeln!(s, "\n[admissibility]");
    let _ = writeln!(
        s,
        "kinematic: {}  static: {}",
        ok_text(r.admissibility.kinematic_ok.unwrap_or(false)),
        ok_text(r.admissibility.static_ok.unwrap_or(false))
    );
    for (c, v) in &r.admissibility.residuals {
        let _ = writeln!(
            s,
            "{}: {}  (tolerance {})",
            c,
            fmt_sig(*v),
            fmt_sig(r.admissibility.tolerances[c])
        );
    }

    let c = &r.contact;
    let _ = writeln!(s, "\n[contact]  gap tolerance {}", fmt_sig(contact::GAP_TOLERANCE));
    let _ = writeln!(s, "regime: {}", c.regime);
    let _ = writeln!(s, "gap: {}", fmt_sig(c.gap));
    let _ = writeln!(
        s,
        "traction body1: {}  body2: {}",
        fmt_sig(c.traction_normal),
        fmt_sig(c.traction_opposite)
    );
    let _ = writeln!(s, "complementarity residual: {}", fmt_sig(c.complementarity_residual));
    let _ = writeln!(s, "action-reaction residual: {}", fmt_sig(c.action_reaction_residual));

    if let Some(e) = &r.enclosure {
        let _ = writeln!(s, "\n[energy]  equality tolerance {}", fmt_sig(ENERGY_EQUALITY));
        let _ = writeln!(s, "potential: {}", fmt_sig(e.e_potential));
        let _ = writeln!(s, "complementary: {}", fmt_sig(e.e_complementary));
        let _ = writeln!(s, "gap: {}", fmt_sig(e.gap));
        if let Some(id) = r.identity_residual {
            let _ = writeln!(
                s,
                "divergence identity residual: {}  (tolerance {})",
                fmt_sig(id),
                fmt_sig(IDENTITY_TOLERANCE)
            );
        }
    }

    let _ = writeln!(
        s,
        "\n[criteria]  positivity tolerance {} C",
        fmt_sig(bounds::POSITIVITY_TOLERANCE)
    );
    for (i, cr) in r.criteria.iter().enumerate() {
        let (lo, hi) = r.closed_windows[i];
        let _ = writeln!(
            s,
            "body{}: primal {}  complementary {}  min form {}  extensional min {}  window ({}, {})",
            i + 1,
            ok_text(cr.primal_ok),
            ok_text(cr.complementary_ok),
            fmt_sig(cr.min_quadratic_value),
            fmt_sig(cr.extensional_min),
            fmt_sig(lo),
            fmt_sig(hi)
        );
    }

    let _ = writeln!(s, "\n[bounds]");
    let _ = writeln!(s, "closed form: {}", fmt_interval(&r.closed_form));
    let tol = NUMERIC_AGREEMENT;
    match &r.numeric {
        Ok(n) => {
            let _ = writeln!(s, "numeric: {}  (tolerance {})", fmt_interval(n), fmt_sig(tol));
        }
        Err(e) => {
            let _ = writeln!(s, "numeric: {e}");
        }
    }
    let _ = writeln!(
        s,
        "oracle: {}  (tolerance {})",
        fmt_interval(&r.oracle),
        fmt_sig(ORACLE_STEPS * r.oracle_resolution)
    );

    let _ = writeln!(s, "\n[warnings]");
    if r.warnings.is_empty() {
        let _ = writeln!(s, "none");
    }
    for w in &r.warnings {
        let _ = writeln!(s, "- {}", w.text());
    }
    s
}

fn json_num(x: f64) -> String {
    if x.is_finite() {
        fmt_sig(x)
    } else {
        "null".into()
    }
}

fn json_interval(i: &LoadInterval) -> String {
    format!(
        "{{\"tau_lo\": {}, \"tau_hi\": {}, \"empty\": {}, \"regime\": \"{}\"}}",
        json_num(i.tau_lo),
        json_num(i.tau_hi),
        i.empty,
        i.regime
    )
}

/// Structured (JSON) rendering of a run report.
pub fn render_structured(r: &RunReport) -> String {
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"example\": \"{}\",", r.example.name());
    let _ = writeln!(s, "  \"reference_load\": {},", json_num(r.reference_load));
    let _ = writeln!(s, "  \"loaded_face_traction\": {},", json_num(r.loaded_face_traction));
    let inj: Vec<String> = r
        .injectivity
        .iter()
        .map(|i| {
            format!(
                "{{\"injective\": {}, \"jacobian_integral\": {}, \"image_volume\": {}}}",
                i.injective,
                json_num(i.jacobian_integral),
                json_num(i.image_volume)
            )
        })
        .collect();
    let _ = writeln!(s, "  \"injectivity\": [{}],", inj.join(", "));
    let residuals: Vec<String> = r
        .admissibility
        .residuals
        .iter()
        .map(|(c, v)| format!("\"{}\": {}", c, json_num(*v)))
        .collect();
    let _ = writeln!(
        s,
        "  \"admissibility\": {{\"kinematic_ok\": {}, \"static_ok\": {}, \"residuals\": {{{}}}}},",
        r.admissibility.kinematic_ok.unwrap_or(false),
        r.admissibility.static_ok.unwrap_or(false),
        residuals.join(", ")
    );
    let c = &r.contact;
    let _ = writeln!(
        s,
        "  \"contact\": {{\"regime\": \"{}\", \"gap\": {}, \"traction_normal\": {}, \"traction_opposite\": {}, \"complementarity_residual\": {}, \"action_reaction_residual\": {}}},",
        c.regime,
        json_num(c.gap),
        json_num(c.traction_normal),
        json_num(c.traction_opposite),
        json_num(c.complementarity_residual),
        json_num(c.action_reaction_residual)
    );
    match &r.enclosure {
        Some(e) => {
            let _ = writeln!(
                s,
                "  \"enclosure\": {{\"e_complementary\": {}, \"e_potential\": {}, \"gap\": {}, \"identity_residual\": {}}},",
                json_num(e.e_complementary),
                json_num(e.e_potential),
                json_num(e.gap),
                json_num(r.identity_residual.unwrap_or(f64::NAN))
            );
        }
        None => {
            let _ = writeln!(s, "  \"enclosure\": null,");
        }
    }
    let crit: Vec<String> = r
        .criteria
        .iter()
        .zip(&r.closed_windows)
        .map(|(c, w)| {
            format!(
                "{{\"primal_ok\": {}, \"complementary_ok\": {}, \"min_quadratic_value\": {}, \"extensional_min\": {}, \"pressure_window\": [{}, {}]}}",
                c.primal_ok,
                c.complementary_ok,
                json_num(c.min_quadratic_value),
                json_num(c.extensional_min),
                json_num(w.0),
                json_num(w.1)
            )
        })
        .collect();
    let _ = writeln!(s, "  \"criteria\": [{}],", crit.join(", "));
    let _ = writeln!(s, "  \"closed_form\": {},", json_interval(&r.closed_form));
    match &r.numeric {
        Ok(n) => {
            let _ = writeln!(s, "  \"numeric\": {},", json_interval(n));
        }
        Err(e) => {
            let _ = writeln!(s, "  \"numeric\": {{\"error\": \"{}\"}},", e.replace('"', "'"));
        }
    }
    let _ = writeln!(s, "  \"oracle\": {},", json_interval(&r.oracle));
    let _ = writeln!(s, "  \"oracle_resolution\": {},", json_num(r.oracle_resolution));
    let warnings: Vec<String> = r.warnings.iter().map(|w| format!("\"{}\"", w.text())).collect();
    let _ = writeln!(s, "  \"warnings\": [{}]", warnings.join(", "));
    s.push_str("}\n");
    s
}

pub const CSV_HEADER: &str = "param,tau_lo,tau_hi,empty,regime,error";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub interval: Result<LoadInterval, String>,
}

impl SweepRow {
    pub fn csv(&self) -> String {
        match &self.interval {
            Ok(i) => format!(
                "{},{},{},{},{},",
                fmt_sig(self.param),
                fmt_sig(i.tau_lo),
                fmt_sig(i.tau_hi),
                i.empty,
                i.regime
            ),
            Err(e) => format!("{},,,,,{}", fmt_sig(self.param), e.replace([',', '\n'], ";")),
        }
    }
}

pub const SWEEP_PARAMS: [&str; 10] = ["a1", "a2", "a", "g", "A", "b1", "b2", "C1", "C2", "C"];

/// Closed-form intervals over `steps` evenly spaced values of `param`.
///
/// `a` and `C` set both bodies at once. Unless `b2` is swept or fixed in the
/// configuration, it follows the value that closes the interface.
pub fn sweep(
    config: &ProblemConfig,
    param: &str,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<Vec<SweepRow>, ConfigError> {
    if !SWEEP_PARAMS.contains(&param) {
        return Err(ConfigError::Validation(format!(
            "cannot sweep {param}; expected one of {}",
            SWEEP_PARAMS.join(", ")
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(ConfigError::Validation("sweep range needs lo < hi".into()));
    }
    if steps < 2 {
        return Err(ConfigError::Validation("sweep needs at least 2 steps".into()));
    }
    let mut rows = Vec::with_capacity(steps);
    for k in 0..steps {
        let value = lo + (hi - lo) * k as f64 / (steps - 1) as f64;
        let mut c = config.clone();
        match param {
            "a1" => c.body1.a = value,
            "a2" => c.body2.a = value,
            "a" => {
                c.body1.a = value;
                c.body2.a = value;
            }
            "g" => c.g = value,
            "A" => c.bend = value,
            "b1" => c.body1.b = Some(value),
            "b2" => c.body2.b = Some(value),
            "C1" => c.body1.c = value,
            "C2" => c.body2.c = value,
            _ => {
                c.body1.c = value;
                c.body2.c = value;
            }
        }
        let interval = c
            .validate()
            .map_err(|e| e.to_string())
            .and_then(|_| closed_form_interval(c.example_tag(), &c.params()).map_err(|e| e.to_string()));
        rows.push(SweepRow { param: value, interval });
    }
    Ok(rows)
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for row in rows {
        s.push_str(&row.csv());
        s.push('\n');
    }
    s
}

/// CSV rows for the three intervals of a run, labelled by source.
pub fn render_run_csv(r: &RunReport) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    let mut line = |label: &str, i: &Result<LoadInterval, String>| {
        let body = match i {
            Ok(i) => format!("{},{},{},{},", fmt_sig(i.tau_lo), fmt_sig(i.tau_hi), i.empty, i.regime),
            Err(e) => format!(",,,,{}", e.replace([',', '\n'], ";")),
        };
        s.push_str(&format!("{label},{body}\n"));
    };
    line("closed_form", &Ok(r.closed_form));
    line("numeric", &r.numeric);
    line("oracle", &Ok(r.oracle));
    s
}

/// One invariant checked by [`verify`].
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub observed: String,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} {}: observed {}, expected {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.observed,
                c.expected
            );
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(s, "{} checks, {} failed", self.checks.len(), failed);
        s
    }
}

/// Faults injected into [`verify_with`] to exercise the checks themselves.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FaultInjection {
    /// Added to the closed-form lower endpoint before comparison.
    pub closed_form_offset: f64,
}

/// Runs every invariant relevant to the configuration.
pub fn verify(config: &ProblemConfig) -> Result<VerifyReport, RunError> {
    verify_with(config, FaultInjection::default())
}

struct Checks(Vec<CheckResult>);

impl Checks {
    fn le(&mut self, name: &str, observed: f64, bound: f64) {
        self.0.push(CheckResult {
            name: name.into(),
            passed: observed <= bound,
            observed: fmt_sig(observed),
            expected: format!("<= {}", fmt_sig(bound)),
        });
    }

    fn flag(&mut self, name: &str, observed: bool, expected: bool) {
        self.0.push(CheckResult {
            name: name.into(),
            passed: observed == expected,
            observed: observed.to_string(),
            expected: expected.to_string(),
        });
    }

    fn interval(&mut self, name: &str, observed: &LoadInterval, expected: &LoadInterval, tol: f64) {
        let passed = if expected.empty || observed.empty {
            expected.empty == observed.empty
        } else {
            observed.regime == expected.regime
                && (observed.tau_lo - expected.tau_lo).abs() <= tol
                && (observed.tau_hi - expected.tau_hi).abs() <= tol
        };
        self.0.push(CheckResult {
            name: name.into(),
            passed,
            observed: fmt_interval(observed),
            expected: format!("{} within {}", fmt_interval(expected), fmt_sig(tol)),
        });
    }
}

pub fn verify_with(config: &ProblemConfig, faults: FaultInjection) -> Result<VerifyReport, RunError> {
    let report = run_with(config, faults.closed_form_offset)?;
    let example = config.example_tag();
    let params = config.params();
    let rule = stage("energy", QuadratureRule::new(config.quad_order))?;
    let mut checks = Checks(Vec::new());

    for (i, inj) in report.injectivity.iter().enumerate() {
        checks.flag(&format!("kinematics.injective.body{}", i + 1), inj.injective, true);
        checks.le(
            &format!("kinematics.jacobian_integral_equals_image.body{}", i + 1),
            (inj.jacobian_integral - inj.image_volume).abs(),
            INJECTIVITY_EQUALITY,
        );
    }

    checks.flag(
        "contact.kinematic_admissible",
        report.admissibility.kinematic_ok == Some(true),
        true,
    );
    checks.flag(
        "contact.static_admissible",
        report.admissibility.static_ok == Some(true),
        true,
    );
    checks.le(
        "contact.complementarity",
        report.contact.complementarity_residual.abs(),
        contact::GAP_TOLERANCE,
    );
    checks.le(
        "contact.action_reaction",
        report.contact.action_reaction_residual,
        1e-12 * params.c1.max(params.c2).max(1.0),
    );

    let tau = report.reference_load;
    let state = stage("contact", designated_state(config, tau))?;
    let load = LoadData::Designated(state.clone());
    let exact = stage(
        "energy",
        energy::enclosure(&state, &StaticTrial::exact(&state), &load, &rule),
    )?;
    checks.le("energy.exact_state_equality", exact.gap.abs(), ENERGY_EQUALITY);
    checks.le(
        "energy.divergence_identity",
        stage("energy", energy::divergence_identity_residual(&state, &rule))?,
        IDENTITY_TOLERANCE,
    );
    let doubled = stage("energy", QuadratureRule::new(2 * config.quad_order))?;
    let e_fine = stage("energy", energy::potential_energy(&state, &load, &doubled))?;
    checks.le(
        "energy.quadrature_convergence",
        (e_fine - exact.e_potential).abs(),
        QUADRATURE_CONVERGENCE,
    );
    let worst = stage(
        "energy",
        random_enclosure_gap(&state, &load, &rule, config.seed, VERIFY_TRIALS),
    )?;
    checks.le("energy.enclosure_ordering", -worst, energy::ENCLOSURE_TOLERANCE);

    for (i, body) in state.bodies().into_iter().enumerate() {
        let (lo, hi) = report.closed_windows[i];
        if body.pressure.is_constant() {
            let flips = stage("bounds", window_flips(body, lo, hi, config))?;
            checks.flag(&format!("bounds.criteria_window.body{}", i + 1), flips, true);
        }
    }

    let closed = report.closed_form;
    if closed.regime == Regime::Closed {
        let tol = NUMERIC_AGREEMENT;
        match &report.numeric {
            Ok(n) => checks.interval("bounds.numeric_matches_closed_form", n, &closed, tol),
            Err(e) => checks.0.push(CheckResult {
                name: "bounds.numeric_matches_closed_form".into(),
                passed: closed.empty,
                observed: e.clone(),
                expected: fmt_interval(&closed),
            }),
        }
        checks.interval(
            "bounds.oracle_matches_closed_form",
            &report.oracle,
            &closed,
            ORACLE_STEPS * report.oracle_resolution,
        );
    } else {
        let cap = params.traction_cap(example);
        checks.flag(
            "bounds.open_singleton",
            closed.tau_lo == cap && closed.tau_hi == cap,
            true,
        );
    }

    let base = stage("bounds", closed_form_interval(example, &params))?;
    let mut worst_scale: f64 = 0.0;
    for k in [0.5, 2.0, 10.0] {
        let scaled = stage("bounds", closed_form_interval(example, &params.scaled(k)))?;
        if !base.empty {
            worst_scale = worst_scale
                .max((scaled.tau_lo - k * base.tau_lo).abs() / (k * base.tau_lo.abs()).max(1e-300))
                .max((scaled.tau_hi - k * base.tau_hi).abs() / (k * base.tau_hi.abs()).max(1e-300));
        }
        if scaled.empty != base.empty {
            worst_scale = f64::INFINITY;
        }
    }
    checks.le("metamorphic.scaling_covariance", worst_scale, 1e-14);
    if example != Example::Bending {
        let swapped = stage("bounds", closed_form_interval(example, &params.swapped(example)))?;
        let same = swapped.empty == base.empty
            && (base.empty || (swapped.tau_lo == base.tau_lo && swapped.tau_hi == base.tau_hi));
        checks.flag("metamorphic.swap_symmetry", same, true);
        let shift = 0.125;
        let mut moved = config.clone();
        moved.body1.b = Some(params.b1 + shift);
        moved.body2.b = Some(params.b2 + shift);
        let moved_state = stage("contact", designated_state(&moved, tau))?;
        let moved_report = stage(
            "contact",
            contact::check_admissible(
                &moved_state,
                &DirichletData::Placement(moved_state.body2.map),
                stage("contact", contact::contact_traction(&moved_state.body1, 0.0))?,
            ),
        )?;
        let original = stage(
            "contact",
            contact::check_admissible(
                &state,
                &DirichletData::Placement(state.body2.map),
                report.loaded_face_traction,
            ),
        )?;
        let drift = Condition::ALL
            .iter()
            .map(|c| (moved_report.residual(*c).unwrap_or(0.0) - original.residual(*c).unwrap_or(0.0)).abs())
            .fold(0.0, f64::max);
        checks.le("metamorphic.translation_invariance", drift, 1e-12);
    }

    Ok(VerifyReport { checks: checks.0 })
}

/// Criteria flip exactly across the closed-form window: admissible just
/// inside each endpoint and inadmissible just outside.
fn window_flips(body: &BodySpec, lo: f64, hi: f64, config: &ProblemConfig) -> crate::Result<bool> {
    let mut all = true;
    let delta = bounds::ENDPOINT_PROBE * body.material.shear_constant().max(1.0);
    for (p, expected) in [
        (lo + delta, true),
        (lo - delta, false),
        (hi - delta, true),
        (hi + delta, false),
    ] {
        let r = criteria_check(
            &body.with_pressure(PressureField::Constant(p))?,
            config.probe_count,
            config.seed,
        )?;
        all &= r.primal_ok == expected;
    }
    Ok(all)
}

/// Smallest `E_p - E_c` over `count` seeded admissible trial pairs around `state`.
///
/// Kinematic trials move body 1 with the held body fixed; static trials add
/// self-stresses to the designated stress. Candidates whose stress has no
/// constitutive preimage are not admissible and are redrawn.
pub fn random_enclosure_gap(
    state: &SystemSpec,
    load: &LoadData,
    rule: &QuadratureRule,
    seed: u64,
    count: usize,
) -> crate::Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    let mut accepted = 0;
    for _ in 0..10 * count {
        if accepted == count {
            break;
        }
        let kinematic = kinematic_trial(state, &mut rng)?;
        let trial = static_trial(state, &mut rng);
        match energy::enclosure(&kinematic, &trial, load, rule) {
            Ok(e) => {
                worst = worst.min(e.gap);
                accepted += 1;
            }
            Err(Error::InadmissibleTrial { condition, .. }) if condition.starts_with("constitutive") => {}
            Err(e) => return Err(e),
        }
    }
    if accepted < count {
        return Err(Error::Numerical(format!(
            "only {accepted} of {count} static trials were attainable"
        )));
    }
    Ok(worst)
}

/// The stress of `state` plus random self-stresses of amplitude up to half the
/// smaller shear constant.
pub fn static_trial(state: &SystemSpec, rng: &mut ChaCha8Rng) -> StaticTrial {
    let c = state
        .body1
        .material
        .shear_constant()
        .min(state.body2.material.shear_constant());
    let amp = 0.5 * c;
    let mut draw = || SelfStress {
        xy: rng.gen_range(-amp..amp),
        xz: rng.gen_range(-amp..amp),
    };
    StaticTrial {
        base: state.clone(),
        self_stress: [draw(), draw()],
    }
}

/// A kinematically admissible neighbour of `state`: body 1 restretched and
/// shifted so the interface stays closed or opens slightly.
pub fn kinematic_trial(state: &SystemSpec, rng: &mut ChaCha8Rng) -> crate::Result<SystemSpec> {
    let mut trial = state.clone();
    let x = state.contact_x();
    let opening = rng.gen_range(0.0..0.02);
    trial.body1.map = match state.body1.map {
        DeformationMap::TriaxialStretch { a, b } => {
            let a_new = a * rng.gen_range(0.9..1.1);
            // Keep the contact-face position, minus the opening.
            DeformationMap::TriaxialStretch {
                a: a_new,
                b: a * x + b - a_new * x - opening,
            }
        }
        DeformationMap::StretchBend { bend, a, b } => {
            let a_new = a * rng.gen_range(0.9..1.1);
            let r = kinematics::radius_at(a, b, x)? - opening;
            let b_new = r * r - 2.0 * a_new * x;
            DeformationMap::StretchBend {
                bend,
                a: a_new,
                b: b_new,
            }
        }
        DeformationMap::Homogeneous { .. } => {
            return Err(Error::InvalidParameters(
                "kinematic trials need a parametric family".into(),
            ))
        }
    };
    // Potential energy ignores the pressure; a profile would not cover the new radii.
    trial.body1.pressure = PressureField::Constant(0.0);
    trial.body1.validate()?;
    Ok(trial)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[system]\nexample = compression\n[body1]\nC1 = 1\na1 = 0.81\n[body2]\nC2 = 1\na2 = 0.81\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(
            (c.d_allow, c.g, c.quad_order, c.grid_n, c.probe_count, c.seed),
            (0.0, 0.0, 8, 1000, 200, 42)
        );
        assert_eq!(c.tau, None);
    }

    #[test]
    fn negative_stretch_is_a_validation_error() {
        let text = MINIMAL.replace("a1 = 0.81", "a1 = -1");
        assert_eq!(
            parse_config(&text),
            Err(ConfigError::Validation("a1 must be positive".into()))
        );
    }

    #[test]
    fn unknown_key_is_a_parse_error() {
        let text = format!("{MINIMAL}[contact]\nfriction = 0.3\n");
        assert!(matches!(parse_config(&text), Err(ConfigError::Parse { line: 10, .. })));
    }

    #[test]
    fn malformed_lines_report_their_number() {
        assert!(matches!(
            parse_config("[system]\nexample compression\n"),
            Err(ConfigError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("[bodies]\n"),
            Err(ConfigError::Parse { line: 1, .. })
        ));
        let text = MINIMAL.replace("C2 = 1", "C2 = inf");
        assert!(matches!(parse_config(&text), Err(ConfigError::Parse { line: 7, .. })));
    }

    #[test]
    fn serialization_round_trips() {
        let text = "[system]\nexample = bending\nA = 1.3\n[body1]\nC1 = 2\na1 = 0.9\nb1 = 1.1\np1 = 0.25\n[body2]\nC2 = 1.5\na2 = 0.95\n[contact]\ng = 0\n[load]\ntau = -0.01\nu_D = 0.1, 0, 0\n[numerics]\nseed = 7\ngrid_n = 300\n";
        let c = parse_config(text).unwrap();
        assert_eq!(parse_config(&serialize_config(&c)).unwrap(), c);
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(parse_config(&serialize_config(&c)).unwrap(), c);
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.2439), "-0.2439");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(1.5561), "1.5561");
        assert_eq!(fmt_sig(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_sig(-1.0 / 3.0 * 1e-7), "-3.33333333333e-8");
        assert_eq!(fmt_sig(f64::NAN), "nan");
    }

    #[test]
    fn compression_run_reproduces_worked_interval() {
        let mut c = parse_config(MINIMAL).unwrap();
        c.grid_n = 400;
        let r = run(&c).unwrap();
        assert!((r.closed_form.tau_lo + 0.2439).abs() < 1e-12 && r.closed_form.tau_hi == 0.0);
        assert!(!r.warnings.contains(&Warning::IntervalDisagreement), "{:?}", r.warnings);
        assert_eq!(r.admissibility.kinematic_ok, Some(true));
        assert_eq!(r.admissibility.static_ok, Some(true));
    }

    #[test]
    fn identity_stretch_run_warns() {
        let mut c = parse_config(&MINIMAL.replace("0.81", "1")).unwrap();
        c.grid_n = 200;
        let r = run(&c).unwrap();
        assert!(r.closed_form.empty);
        assert!(r.warnings.contains(&Warning::IdentityStretch));
        assert!(r.numeric.is_err() && r.oracle.empty);
        assert!(!r.warnings.contains(&Warning::IntervalDisagreement));
        assert!(render_report(&r).contains("degenerate: identity stretch"));
    }

    #[test]
    fn sweep_examples() {
        let c = parse_config(MINIMAL).unwrap();
        let rows = sweep(&c, "a", 0.5, 0.99, 50).unwrap();
        assert_eq!(rows.len(), 50);
        assert!(rows.iter().all(|r| r.interval.as_ref().unwrap().tau_hi == 0.0));

        let mut c = parse_config(&format!(
            "{}[contact]\ng = 0.5\n",
            MINIMAL.replace("compression", "cohesive")
        ))
        .unwrap();
        c.body1.a = 1.0;
        c.body2.a = 1.0;
        let rows = sweep(&c, "g", 0.0, 2.0, 21).unwrap();
        assert!(rows[0].interval.is_err());
        for row in &rows[1..] {
            let hi = row.interval.as_ref().unwrap().tau_hi;
            assert!((hi - row.param.min(2.0)).abs() < 1e-15);
        }
        assert!(render_csv(&rows).lines().nth(1).unwrap().starts_with("0,,,,,"));
        assert!(sweep(&c, "g", 0.0, 2.0, 1).is_err());
        assert!(sweep(&c, "friction", 0.0, 2.0, 3).is_err());
    }

    #[test]
    fn fault_injection_is_caught() {
        let mut c = parse_config(MINIMAL).unwrap();
        c.grid_n = 300;
        let v = verify_with(
            &c,
            FaultInjection {
                closed_form_offset: 0.05,
            },
        )
        .unwrap();
        assert_eq!(v.exit_code(), 1);
        assert!(v
            .checks
            .iter()
            .any(|k| k.name == "bounds.oracle_matches_closed_form" && !k.passed));
    }
}
