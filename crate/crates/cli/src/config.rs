//! Run configuration: a TOML key tree with a closed schema. Unknown keys are
//! rejected; range checks report every violation with its line.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use spinfw::classical::integrator::IntegratorSpec;
use spinfw::opalg::Case;
use spinfw::qfw::{LatticeSpec, DEFAULT_CUTOFF};
use spinfw::{FieldModel, ParticleParams, PhaseState, ThreeVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Simulate,
    Boost,
    VerifyAlgebra,
    VerifyFw,
    Report,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Boost => "boost",
            Mode::VerifyAlgebra => "verify-algebra",
            Mode::VerifyFw => "verify-fw",
            Mode::Report => "report",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleConfig {
    pub mass: f64,
    pub charge: f64,
    /// Anomalous moment `μ'`; exclusive with `gamma_m`.
    pub mu_prime: Option<f64>,
    pub gamma_m: Option<f64>,
    pub hbar: f64,
    pub c: f64,
}

impl Default for ParticleConfig {
    fn default() -> Self {
        ParticleConfig { mass: 1.0, charge: 1.0, mu_prime: Some(0.1), gamma_m: None, hbar: 1.0, c: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldConfig {
    Uniform {
        #[serde(default)]
        e0: [f64; 3],
        #[serde(default = "unit_z")]
        b0: [f64; 3],
    },
    SternGerlach {
        b0: f64,
        b: f64,
    },
    SinusoidalElectrostatic {
        lambda: f64,
        period: f64,
    },
    SinusoidalMagnetostatic {
        lambda: f64,
        period: f64,
    },
}

fn unit_z() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig::Uniform { e0: [0.0; 3], b0: unit_z() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub method: String,
    pub step: f64,
    pub tolerance: f64,
    pub max_steps: usize,
    pub renormalize_spin: bool,
    pub record_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        let d = IntegratorSpec::default();
        IntegratorConfig {
            method: d.method,
            step: d.step,
            tolerance: d.tolerance,
            max_steps: d.max_steps,
            renormalize_spin: false,
            record_every: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub x: [f64; 3],
    pub p: [f64; 3],
    pub s: [f64; 3],
    pub duration: f64,
    /// Also write `trajectory.csv`.
    pub csv: bool,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig { x: [0.0; 3], p: [0.0; 3], s: [0.5, 0.0, 0.0], duration: 10.0, csv: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoostConfig {
    pub beta: [f64; 3],
    pub pi: [f64; 3],
    pub e: [f64; 3],
    pub b: [f64; 3],
    pub s: [f64; 3],
    pub lambdas: Vec<f64>,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig {
            beta: [0.3, -0.2, 0.1],
            pi: [0.4, 0.2, -0.3],
            e: [0.2, -0.5, 0.3],
            b: [-0.4, 0.1, 0.6],
            s: [0.0, 0.0, 0.5],
            lambdas: vec![1e-1, 1e-2, 1e-3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlgebraConfig {
    pub order: u32,
    pub matchup_order: u32,
}

impl Default for AlgebraConfig {
    fn default() -> Self {
        AlgebraConfig { order: 8, matchup_order: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseSelection {
    I,
    II,
    #[serde(rename = "both")]
    Both,
}

impl CaseSelection {
    pub fn cases(self) -> Vec<Case> {
        match self {
            CaseSelection::I => vec![Case::I],
            CaseSelection::II => vec![Case::II],
            CaseSelection::Both => vec![Case::I, Case::II],
        }
    }
}

/// Lattice overrides; unset keys take the per-case defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeConfig {
    pub dimension: Option<usize>,
    pub sites: Option<usize>,
    pub period: Option<f64>,
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FwConfig {
    pub case: CaseSelection,
    pub darwin: bool,
    /// Per-case default amplitudes when empty.
    pub lambdas: Vec<f64>,
    pub crosscheck_order: u32,
}

impl Default for FwConfig {
    fn default() -> Self {
        FwConfig { case: CaseSelection::Both, darwin: true, lambdas: Vec::new(), crosscheck_order: 6 }
    }
}

/// The complete run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub seed: u64,
    /// Particle for simulate and boost runs; verify-fw uses the per-case
    /// defaults unless this section is present.
    pub particle: Option<ParticleConfig>,
    pub field: FieldConfig,
    pub integrator: IntegratorConfig,
    pub simulate: SimulateConfig,
    pub boost: BoostConfig,
    pub algebra: AlgebraConfig,
    pub lattice: LatticeConfig,
    pub fw: FwConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: None,
            seed: 20_240_601,
            particle: None,
            field: FieldConfig::default(),
            integrator: IntegratorConfig::default(),
            simulate: SimulateConfig::default(),
            boost: BoostConfig::default(),
            algebra: AlgebraConfig::default(),
            lattice: LatticeConfig::default(),
            fw: FwConfig::default(),
        }
    }
}

/// One validation problem, anchored to a source line when known.
#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Missing(String),
    Io(String),
    Parse(String),
    Invalid(Vec<Issue>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Missing(p) => write!(f, "config file not found: {p}"),
            ConfigError::Io(e) => write!(f, "cannot read config: {e}"),
            ConfigError::Parse(e) => write!(f, "config parse error: {e}"),
            ConfigError::Invalid(issues) => {
                writeln!(f, "{} configuration error(s):", issues.len())?;
                for i in issues {
                    writeln!(f, "  {i}")?;
                }
                Ok(())
            }
        }
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    if !path.exists() {
        return Err(ConfigError::Missing(path.display().to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(e.to_string()))?;
    parse_str(&text)
}

pub fn parse_str(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let issues = cfg.validate(Some(text));
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Invalid(issues))
    }
}

/// Line of `key` inside `[section]` (top level when `section` is empty).
fn locate(text: &str, dotted: &str) -> Option<usize> {
    let (section, key) = match dotted.rsplit_once('.') {
        Some((s, k)) => (s, k),
        None => ("", dotted),
    };
    let mut current = String::new();
    let mut header_line = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(h) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = h.trim().to_string();
            if current == section {
                header_line = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    header_line
}

fn vec3(a: [f64; 3]) -> ThreeVector {
    ThreeVector::new(a[0], a[1], a[2])
}

impl RunConfig {
    /// All range and consistency problems.
    pub fn validate(&self, text: Option<&str>) -> Vec<Issue> {
        let mut issues = Vec::new();
        let mut bad = |key: &str, message: String| {
            issues.push(Issue { key: key.into(), line: text.and_then(|t| locate(t, key)), message });
        };
        let finite3 = |a: &[f64; 3]| a.iter().all(|v| v.is_finite());

        if let Some(p) = &self.particle {
            if !(p.mass.is_finite() && p.mass > 0.0) {
                bad("particle.mass", format!("must be positive, got {}", p.mass));
            }
            if !(p.c.is_finite() && p.c > 0.0) {
                bad("particle.c", format!("must be positive, got {}", p.c));
            }
            if !(p.hbar.is_finite() && p.hbar > 0.0) {
                bad("particle.hbar", format!("must be positive, got {}", p.hbar));
            }
            if !p.charge.is_finite() {
                bad("particle.charge", "must be finite".into());
            }
            match (p.mu_prime, p.gamma_m) {
                (Some(_), Some(_)) => bad("particle.gamma_m", "give either mu_prime or gamma_m, not both".into()),
                (Some(v), None) | (None, Some(v)) if !v.is_finite() => {
                    bad("particle.mu_prime", "must be finite".into())
                }
                _ => {}
            }
        }

        match &self.field {
            FieldConfig::Uniform { e0, b0 } => {
                if !finite3(e0) || !finite3(b0) {
                    bad("field.b0", "field components must be finite".into());
                }
            }
            FieldConfig::SternGerlach { b0, b } => {
                if !(b0.is_finite() && b.is_finite()) {
                    bad("field.b", "field parameters must be finite".into());
                }
            }
            FieldConfig::SinusoidalElectrostatic { lambda, period }
            | FieldConfig::SinusoidalMagnetostatic { lambda, period } => {
                if !lambda.is_finite() {
                    bad("field.lambda", "must be finite".into());
                }
                if !(period.is_finite() && *period > 0.0) {
                    bad("field.period", format!("must be positive, got {period}"));
                }
            }
        }

        let ig = &self.integrator;
        if !(ig.step.is_finite() && ig.step > 0.0) {
            bad("integrator.step", format!("must be positive, got {}", ig.step));
        }
        if !(ig.tolerance.is_finite() && ig.tolerance > 0.0) {
            bad("integrator.tolerance", format!("must be positive, got {}", ig.tolerance));
        }
        if ig.record_every == 0 {
            bad("integrator.record_every", "must be at least 1".into());
        }
        if ig.max_steps == 0 {
            bad("integrator.max_steps", "must be at least 1".into());
        }
        let names = spinfw::classical::integrator::registered_names();
        if !names.contains(&ig.method.as_str()) {
            bad("integrator.method", format!("unknown integrator '{}', expected one of {names:?}", ig.method));
        }

        let sim = &self.simulate;
        if !(sim.duration.is_finite() && sim.duration > 0.0) {
            bad("simulate.duration", format!("must be positive, got {}", sim.duration));
        }
        for (k, v) in [("simulate.x", &sim.x), ("simulate.p", &sim.p), ("simulate.s", &sim.s)] {
            if !finite3(v) {
                bad(k, "components must be finite".into());
            }
        }

        let bo = &self.boost;
        let beta = vec3(bo.beta).norm();
        if !(beta < 1.0) {
            bad("boost.beta", format!("|β| must be below 1, got {beta}"));
        }
        for (k, v) in [("boost.pi", &bo.pi), ("boost.e", &bo.e), ("boost.b", &bo.b), ("boost.s", &bo.s)] {
            if !finite3(v) {
                bad(k, "components must be finite".into());
            }
        }
        check_lambdas(&bo.lambdas, "boost.lambdas", 2, &mut bad);

        if self.algebra.order == 0 || self.algebra.order > 12 {
            bad("algebra.order", format!("must lie in 1..=12, got {}", self.algebra.order));
        }
        if self.algebra.matchup_order > 6 {
            bad("algebra.matchup_order", format!("must lie in 0..=6, got {}", self.algebra.matchup_order));
        }

        let lat = &self.lattice;
        if let Some(d) = lat.dimension {
            if d != 1 && d != 2 {
                bad("lattice.dimension", format!("must be 1 or 2, got {d}"));
            }
        }
        if let Some(n) = lat.sites {
            if n % 2 != 0 || n < 8 {
                bad("lattice.sites", format!("sites per axis N must be even and at least 8, got {n}"));
            }
        }
        if let Some(l) = lat.period {
            if !(l.is_finite() && l > 0.0) {
                bad("lattice.period", format!("must be positive, got {l}"));
            }
        }
        if let Some(r) = lat.cutoff {
            if !(r > 0.0 && r <= spinfw::qfw::lattice::HARD_CUTOFF) {
                bad(
                    "lattice.cutoff",
                    format!("cutoff ratio must lie in (0, {}], got {r}", spinfw::qfw::lattice::HARD_CUTOFF),
                );
            }
        }
        if !self.fw.lambdas.is_empty() {
            check_lambdas(&self.fw.lambdas, "fw.lambdas", 3, &mut bad);
        }
        if self.fw.crosscheck_order > 8 {
            bad("fw.crosscheck_order", format!("must lie in 0..=8, got {}", self.fw.crosscheck_order));
        }
        issues
    }

    pub fn particle_params(&self) -> spinfw::Result<ParticleParams> {
        let p = self.particle.clone().unwrap_or_default();
        match p.gamma_m {
            Some(g) => ParticleParams::with_gyromagnetic_ratio(p.mass, p.charge, g, p.hbar, p.c),
            None => ParticleParams::with_anomalous_moment(p.mass, p.charge, p.mu_prime.unwrap_or(0.0), p.hbar, p.c),
        }
    }

    pub fn field_model(&self) -> FieldModel {
        match &self.field {
            FieldConfig::Uniform { e0, b0 } => FieldModel::Uniform { e0: vec3(*e0), b0: vec3(*b0) },
            FieldConfig::SternGerlach { b0, b } => FieldModel::SternGerlach { b0: *b0, b: *b },
            FieldConfig::SinusoidalElectrostatic { lambda, period } => {
                FieldModel::SinusoidalElectrostatic { lambda: *lambda, period: *period }
            }
            FieldConfig::SinusoidalMagnetostatic { lambda, period } => {
                FieldModel::SinusoidalMagnetostatic { lambda: *lambda, period: *period }
            }
        }
    }

    pub fn integrator_spec(&self) -> IntegratorSpec {
        let i = &self.integrator;
        IntegratorSpec {
            method: i.method.clone(),
            step: i.step,
            tolerance: i.tolerance,
            max_steps: i.max_steps,
            renormalize_spin: i.renormalize_spin,
            record_every: i.record_every,
        }
    }

    pub fn initial_state(&self) -> spinfw::Result<PhaseState> {
        let s = &self.simulate;
        PhaseState::new(vec3(s.x), vec3(s.p), vec3(s.s), 0.0)
    }

    /// Particle for one special case: the configured one if given,
    /// otherwise the case default.
    pub fn case_params(&self, case: Case) -> spinfw::Result<ParticleParams> {
        match self.particle {
            Some(_) => self.particle_params(),
            None => Ok(spinfw::qfw::default_params(case)),
        }
    }

    pub fn case_lattice(&self, case: Case, params: &ParticleParams) -> spinfw::Result<LatticeSpec> {
        let def = spinfw::qfw::default_lattice(case, params)?;
        let l = &self.lattice;
        let dimension = l.dimension.unwrap_or(def.dimension);
        let sites = l.sites.unwrap_or(def.sites);
        let cutoff = l.cutoff.unwrap_or(DEFAULT_CUTOFF);
        let spec = match l.period {
            Some(p) => LatticeSpec::new(dimension, sites, p, cutoff)?,
            None => LatticeSpec::at_cutoff(dimension, sites, cutoff, params)?,
        };
        spec.check_cutoff(params)?;
        Ok(spec)
    }

    pub fn case_lambdas(&self, case: Case) -> Vec<f64> {
        if self.fw.lambdas.is_empty() {
            spinfw::qfw::default_lambdas(case).to_vec()
        } else {
            self.fw.lambdas.clone()
        }
    }
}

fn check_lambdas(l: &[f64], key: &str, min: usize, bad: &mut impl FnMut(&str, String)) {
    if l.len() < min {
        bad(key, format!("need at least {min} amplitudes, got {}", l.len()));
    }
    if l.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        bad(key, "amplitudes must be positive and finite".into());
    }
}

/// Parses `--lambda-list 1e-2,1e-3,1e-4`.
pub fn parse_lambda_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad amplitude '{t}': {e}"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_simulate_config_fills_defaults() {
        let cfg = parse_str("mode = \"simulate\"\n[field]\nkind = \"uniform\"\n").unwrap();
        assert_eq!(cfg.mode, Some(Mode::Simulate));
        assert_eq!(cfg.field, FieldConfig::Uniform { e0: [0.0; 3], b0: [0.0, 0.0, 1.0] });
        assert_eq!(cfg.integrator.method, "rk4");
        assert_eq!(cfg.simulate.duration, 10.0);
        let p = cfg.particle_params().unwrap();
        assert_eq!(p, ParticleParams::natural(1.0, 0.1));
    }

    #[test]
    fn superluminal_boost_names_the_key() {
        let text = "[boost]\nbeta = [0.6, 0.8, 0.0]\n";
        let Err(ConfigError::Invalid(issues)) = parse_str(text) else { panic!("expected validation error") };
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].key, "boost.beta");
        assert_eq!(issues[0].line, Some(2));
    }

    #[test]
    fn odd_lattice_cites_the_invariant_and_all_errors_are_listed() {
        let text = "seed = 3\n[lattice]\nsites = 9\ncutoff = 2.0\n[integrator]\nstep = -1.0\n";
        let Err(ConfigError::Invalid(issues)) = parse_str(text) else { panic!("expected validation error") };
        let keys: Vec<_> = issues.iter().map(|i| i.key.as_str()).collect();
        assert_eq!(keys, ["integrator.step", "lattice.sites", "lattice.cutoff"]);
        assert!(issues[1].message.contains("even"));
        assert_eq!(issues[1].line, Some(3));
        assert_eq!(issues[0].line, Some(6));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = parse_str("[particle]\nmass = 1.0\ncharge = 1.0\nhbar = 1.0\nc = 1.0\nspin = 2\n").unwrap_err();
        assert!(matches!(&e, ConfigError::Parse(m) if m.contains("spin")), "{e}");
        let e = parse_str("[field]\nkind = \"stern-gerlach\"\nb0 = 1.0\nb = 0.1\nlambda = 2.0\n").unwrap_err();
        assert!(matches!(e, ConfigError::Parse(_)));
        assert!(matches!(parse_str("bogus = 1\n"), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn lambda_list_parsing() {
        assert_eq!(parse_lambda_list("1e-2, 1e-3,1e-4").unwrap(), vec![1e-2, 1e-3, 1e-4]);
        assert!(parse_lambda_list("1e-2,x").is_err());
    }
}
