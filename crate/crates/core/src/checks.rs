//! The acceptance criteria as a registry of named checks. Each check
//! carries explicit tolerances; a check passes when all its metrics do.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classical::bmt::{bmt_consistency_residual_with, ForceTerm};
use crate::classical::covariance::boost_covariance_scaling;
use crate::classical::hamiltonian::{eom_rhs, h_total};
use crate::classical::integrator::{integrate, IntegratorSpec, Trajectory};
use crate::error::Result;
use crate::field::FieldModel;
use crate::fit::loglog_slope;
use crate::kinematics::{gamma_pi, kinematic_momentum};
use crate::opalg::{self, Case};
use crate::params::ParticleParams;
use crate::qfw::{self, correspondence};
use crate::state::PhaseState;
use crate::vector::ThreeVector;

/// Acceptance condition on a measured value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    Below {
        limit: f64,
    },
    AtLeast {
        limit: f64,
    },
    Within {
        target: f64,
        tolerance: f64,
    },
    Outside {
        target: f64,
        tolerance: f64,
    },
    /// Exact symbolic equality; the value is the number of nonzero terms.
    Exact,
}

impl Bound {
    pub fn admits(&self, v: f64) -> bool {
        match *self {
            Bound::Below { limit } => v < limit,
            Bound::AtLeast { limit } => v >= limit,
            Bound::Within { target, tolerance } => (v - target).abs() <= tolerance,
            Bound::Outside { target, tolerance } => (v - target).abs() > tolerance,
            Bound::Exact => v == 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl Metric {
    pub fn new(name: impl Into<String>, value: f64, bound: Bound) -> Self {
        Metric { name: name.into(), value, pass: bound.admits(value), bound }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub metrics: Vec<Metric>,
    pub pass: bool,
    /// Set when the check is known to fail for an analyzed reason.
    pub expected_failure: bool,
}

impl CheckResult {
    pub fn new(name: &str, metrics: Vec<Metric>) -> Self {
        let pass = !metrics.is_empty() && metrics.iter().all(|m| m.pass);
        CheckResult { name: name.into(), metrics, pass, expected_failure: false }
    }

    pub fn summary(&self) -> String {
        self.metrics
            .iter()
            .map(|m| format!("{}={:.3e}{}", m.name, m.value, if m.pass { "" } else { "(!)" }))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckContext {
    pub seed: u64,
}

impl Default for CheckContext {
    fn default() -> Self {
        CheckContext { seed: 20_240_601 }
    }
}

/// One acceptance criterion.
pub trait Criterion: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, ctx: &CheckContext) -> Result<CheckResult>;
    /// Known to fail; see the project notes for the analysis.
    fn expected_failure(&self) -> bool {
        false
    }
}

struct Check {
    name: &'static str,
    description: &'static str,
    run: fn(&CheckContext) -> Result<Vec<Metric>>,
    expected_failure: bool,
}

impl Criterion for Check {
    fn name(&self) -> &'static str {
        self.name
    }

    fn description(&self) -> &'static str {
        self.description
    }

    fn run(&self, ctx: &CheckContext) -> Result<CheckResult> {
        let mut r = CheckResult::new(self.name, (self.run)(ctx)?);
        r.expected_failure = self.expected_failure;
        Ok(r)
    }

    fn expected_failure(&self) -> bool {
        self.expected_failure
    }
}

const fn check(name: &'static str, description: &'static str, run: fn(&CheckContext) -> Result<Vec<Metric>>) -> Check {
    Check { name, description, run, expected_failure: false }
}

static REGISTRY: &[Check] = &[
    check("C01_larmor_limit", "spin at rest in uniform B rotates at γ_m B over one period (RK4, T/1000)", larmor_limit),
    check(
        "C02_conservation",
        "|s| drift over 1e5 steps and H drift over 1e4 steps in a Stern-Gerlach field",
        conservation,
    ),
    check("C03_pitch_lock", "g = 2 in uniform B with |π| = mc: s·π̂ constant over 10 cyclotron periods", pitch_lock),
    check(
        "C04_modified_bmt",
        "integrated spin obeys the covariant precession law with the extra force; order-4 convergence",
        modified_bmt,
    ),
    check(
        "C05_gradient_oracle",
        "equations of motion equal finite differences of H at 1000 random states",
        gradient_oracle,
    ),
    check(
        "C06_symbolic_case_equality",
        "exact series of the two special cases equals the Weyl-ordered closed form through N = 8",
        symbolic_case_equality,
    ),
    check(
        "C07_ordering_identity",
        "classical match-up holds modulo π² reordering, strictly for homogeneous fields",
        ordering_identity,
    ),
    check(
        "C08_darwin_coefficients",
        "Darwin prefactor is ħ²e/8m²c² for g = 2 and −μ'ħ/2mc for a neutral particle",
        darwin_coefficients,
    ),
    check(
        "C09_spectrum_preservation",
        "exact transform keeps the spectrum (1e-10) and is block diagonal (1e-11)",
        spectrum_preservation,
    ),
    check(
        "C10_correspondence_scaling",
        "exact transform minus Weyl-ordered form scales as λ², or λ without the Darwin term",
        correspondence_scaling,
    ),
    check(
        "C11_darwin_negative_result",
        "plain ∇·E Darwin candidate loses to the (1/γ_π)_Weyl form off the slow modes",
        darwin_negative_result,
    ),
    check("C12_parity", "site inversion with β̃ commutes with H and H'", parity),
    Check {
        name: "C13_boost_covariance",
        description: "γF_π versus F_π of boosted arguments should scale as λ²",
        run: boost_covariance,
        expected_failure: true,
    },
];

pub fn criteria() -> Vec<&'static dyn Criterion> {
    REGISTRY.iter().map(|c| c as &dyn Criterion).collect()
}

pub fn criterion(name: &str) -> Option<&'static dyn Criterion> {
    REGISTRY.iter().find(|c| c.name == name).map(|c| c as &dyn Criterion)
}

/// Runs one criterion; an error inside it becomes a failed metric.
pub fn run_criterion(c: &dyn Criterion, ctx: &CheckContext) -> CheckResult {
    c.run(ctx).unwrap_or_else(|e| CheckResult {
        name: c.name().into(),
        metrics: vec![Metric { name: format!("error: {e}"), value: f64::NAN, bound: Bound::Exact, pass: false }],
        pass: false,
        expected_failure: c.expected_failure(),
    })
}

pub fn run_all(ctx: &CheckContext) -> Vec<CheckResult> {
    criteria().into_iter().map(|c| run_criterion(c, ctx)).collect()
}

fn raw_rk4(step: f64) -> IntegratorSpec {
    IntegratorSpec { renormalize_spin: false, ..IntegratorSpec::rk4(step) }
}

fn state(x: ThreeVector, p: ThreeVector, s: ThreeVector) -> Result<PhaseState> {
    PhaseState::new(x, p, s, 0.0)
}

fn larmor_period(params: &ParticleParams, b0: f64) -> f64 {
    2.0 * PI / (params.gamma_m() * b0).abs()
}

/// Accumulated rotation angle of `s` about `z`.
fn unwrapped_angle(traj: &Trajectory) -> f64 {
    let mut total = 0.0;
    let mut prev = traj.samples[0].state.s;
    for smp in &traj.samples[1..] {
        let s = smp.state.s;
        let cross = prev.x * s.y - prev.y * s.x;
        let dot = prev.x * s.x + prev.y * s.y;
        total += cross.atan2(dot);
        prev = s;
    }
    total
}

fn larmor_limit(_: &CheckContext) -> Result<Vec<Metric>> {
    let p = ParticleParams::natural(1.0, 0.1);
    let b0 = 1.0;
    let model = FieldModel::uniform_b(ThreeVector::new(0.0, 0.0, b0));
    let t = larmor_period(&p, b0);
    let st = state(ThreeVector::ZERO, ThreeVector::ZERO, ThreeVector::new(0.5, 0.0, 0.0))?;
    let traj = integrate(&st, &model, &p, &raw_rk4(t / 1000.0), t)?;
    // ds/dt = s×F turns s clockwise about F
    let angle = -unwrapped_angle(&traj);
    let expect = p.gamma_m() * b0 * t;
    Ok(vec![Metric::new("relative_angle_error", (angle - expect).abs() / expect, Bound::Below { limit: 1e-6 })])
}

fn stern_gerlach_run(steps: usize) -> Result<Trajectory> {
    let p = ParticleParams::natural(1.0, 0.1);
    let model = FieldModel::SternGerlach { b0: 1.0, b: 0.01 };
    let dt = larmor_period(&p, 1.0) / 1000.0;
    // weak gradient, transverse spin and momentum keep the orbit bounded
    let st =
        state(ThreeVector::new(0.1, -0.2, 0.0), ThreeVector::new(0.3, 0.1, 0.0), ThreeVector::new(0.3, -0.4, 0.0))?;
    let spec = IntegratorSpec { record_every: steps / 100, ..raw_rk4(dt) };
    Ok(integrate(&st, &model, &p, &spec, dt * steps as f64)?)
}

fn conservation(_: &CheckContext) -> Result<Vec<Metric>> {
    let long = stern_gerlach_run(100_000)?;
    let short = stern_gerlach_run(10_000)?;
    Ok(vec![
        Metric::new("spin_norm_drift_1e5_steps", long.max_spin_drift(), Bound::Below { limit: 1e-9 }),
        Metric::new("energy_drift_1e4_steps", short.max_energy_drift(), Bound::Below { limit: 1e-8 }),
    ])
}

fn pitch_lock(_: &CheckContext) -> Result<Vec<Metric>> {
    let p = ParticleParams::natural(1.0, 0.0);
    let b0 = 1.0;
    let model = FieldModel::uniform_b(ThreeVector::new(0.0, 0.0, b0));
    let pi0 = ThreeVector::new(0.6, 0.0, 0.8) * (p.m() * p.c());
    let g = gamma_pi(pi0, &p);
    let period = 2.0 * PI * g * p.m() * p.c() / (p.e() * b0);
    // s ⟂ B keeps s·B = 0, so H_spin does not shift the orbital frequency
    let st = state(ThreeVector::ZERO, pi0, ThreeVector::new(0.3, -0.4, 0.0))?;
    let traj = integrate(&st, &model, &p, &raw_rk4(period / 2000.0), 10.0 * period)?;
    let pitch = |s: &PhaseState| {
        let pi = kinematic_momentum(s.p, model.sample(s.x).a, &p);
        s.s.dot(pi) / pi.norm()
    };
    let p0 = pitch(&traj.samples[0].state);
    let dev = traj.samples.iter().map(|s| (pitch(&s.state) - p0).abs()).fold(0.0, f64::max);
    Ok(vec![Metric::new("pitch_deviation", dev, Bound::Below { limit: 1e-8 })])
}

fn modified_bmt(_: &CheckContext) -> Result<Vec<Metric>> {
    let p = ParticleParams::natural(1.0, 0.1);
    let model = FieldModel::SternGerlach { b0: 1.0, b: 0.5 };
    let t_l = larmor_period(&p, 1.0);
    let st = state(ThreeVector::ZERO, ThreeVector::new(0.0, 0.0, 0.6), ThreeVector::new(0.0, 0.0, 0.5))?;
    let dts = [8e-3 * t_l, 4e-3 * t_l, 2e-3 * t_l];
    let mut with = Vec::new();
    let mut without = Vec::new();
    for dt in dts {
        let traj = integrate(&st, &model, &p, &raw_rk4(dt), 0.5 * t_l)?;
        with.push(bmt_consistency_residual_with(&traj, &model, &p, ForceTerm::Include)?);
        without.push(bmt_consistency_residual_with(&traj, &model, &p, ForceTerm::Omit)?);
    }
    let order = loglog_slope(&dts, &with)?;
    let finest = dts.len() - 1;
    Ok(vec![
        Metric::new("convergence_order", order, Bound::Within { target: 4.0, tolerance: 0.3 }),
        Metric::new("omit_over_include", without[finest] / with[finest], Bound::AtLeast { limit: 10.0 }),
    ])
}

fn gradient_oracle(ctx: &CheckContext) -> Result<Vec<Metric>> {
    let p = ParticleParams::natural(1.0, 0.1);
    let model = FieldModel::Superposition(vec![
        FieldModel::SternGerlach { b0: 0.8, b: 0.3 },
        FieldModel::SinusoidalElectrostatic { lambda: 0.4, period: 1.3 },
        FieldModel::SinusoidalMagnetostatic { lambda: 0.2, period: 2.1 },
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut v3 = |scale: f64| {
        ThreeVector::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
    };
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let st = state(v3(1.0), v3(2.0), v3(0.5))?;
        let d = eom_rhs(&st, &model, &p);
        let fd = |f: &dyn Fn(&mut PhaseState, f64)| {
            let (mut a, mut b) = (st, st);
            f(&mut a, h);
            f(&mut b, -h);
            (h_total(&a, &model, &p) - h_total(&b, &model, &p)) / (2.0 * h)
        };
        let mut hx = ThreeVector::ZERO;
        let mut hp = ThreeVector::ZERO;
        let mut hs = ThreeVector::ZERO;
        for k in 0..3 {
            hx[k] = fd(&|s, e| s.x[k] += e);
            hp[k] = fd(&|s, e| s.p[k] += e);
            hs[k] = fd(&|s, e| s.s[k] += e);
        }
        // ẋ = ∂H/∂p, ṗ = −∂H/∂x, ṡ = ∂H/∂s × s
        worst = worst.max((d.dx - hp).max_abs()).max((d.dp + hx).max_abs()).max((d.ds - hs.cross(st.s)).max_abs());
    }
    Ok(vec![Metric::new("max_gradient_mismatch", worst, Bound::Below { limit: 1e-7 })])
}

fn symbolic_case_equality(_: &CheckContext) -> Result<Vec<Metric>> {
    Ok([Case::I, Case::II]
        .into_iter()
        .map(|c| {
            let v = opalg::verify_case(c, 8);
            Metric::new(format!("case_{}_discrepancy_terms", c.label()), v.discrepancy.len() as f64, Bound::Exact)
        })
        .collect())
}

fn ordering_identity(_: &CheckContext) -> Result<Vec<Metric>> {
    let r = opalg::verify_matchup(3);
    let fails = |v: &[bool]| v.iter().filter(|b| !**b).count() as f64;
    Ok(vec![
        Metric::new("commuting_limit_failures", if r.commuting_limit { 0.0 } else { 1.0 }, Bound::Exact),
        Metric::new("similar_failures", fails(&r.similar_by_order), Bound::Exact),
        Metric::new("homogeneous_strict_failures", if r.homogeneous_strict { 0.0 } else { 1.0 }, Bound::Exact),
        Metric::new("epsilon_contraction_failures", if r.epsilon_contraction { 0.0 } else { 1.0 }, Bound::Exact),
    ])
}

fn darwin_coefficients(_: &CheckContext) -> Result<Vec<Metric>> {
    use opalg::coeff::{frac, powers, C, E, HBAR, M, MU};
    let dirac = correspondence::darwin_coefficient_exact(false)
        .sub(&opalg::OpExpr::scalar(frac(1, 8), powers(&[(HBAR, 2), (E, 1), (M, -2), (C, -2)])));
    let neutral = correspondence::darwin_coefficient_exact(true)
        .sub(&opalg::OpExpr::scalar(frac(-1, 2), powers(&[(MU, 1), (HBAR, 1), (M, -1), (C, -1)])));
    // the lattice operator carries the same prefactor
    let p = qfw::default_params(Case::II);
    let spec = qfw::LatticeSpec::at_cutoff(1, 16, qfw::DEFAULT_CUTOFF, &p)?;
    let with = qfw::build_correspondence(Case::II, &spec, 1e-3, &p, true)?;
    let without = qfw::build_correspondence(Case::II, &spec, 1e-3, &p, false)?;
    let ops = qfw::LatticeOps::new(Case::II, &spec, 1e-3, &p)?;
    let w = qfw::weyl::WeylContext::new(&ops.pi_squared(), &p)?;
    let shape = w.apply(&ops.scalar(&ops.fields.div_e()), qfw::weyl::GammaFn::InvGamma);
    let diff = (&with.matrix - &without.matrix).view((0, 0), (spec.modes(), spec.modes())).into_owned();
    let (i, j) = shape.icamax_full();
    let extracted = (diff[(i, j)] / shape[(i, j)]).re;
    let want = -p.mu_prime() * p.hbar() / (2.0 * p.m() * p.c());
    Ok(vec![
        Metric::new("dirac_symbolic_terms", dirac.len() as f64, Bound::Exact),
        Metric::new("neutral_symbolic_terms", neutral.len() as f64, Bound::Exact),
        Metric::new("lattice_relative_error", ((extracted - want) / want).abs(), Bound::Below { limit: 1e-12 }),
    ])
}

fn spectrum_preservation(_: &CheckContext) -> Result<Vec<Metric>> {
    let mut spec_defect: f64 = 0.0;
    let mut block: f64 = 0.0;
    for case in [Case::I, Case::II] {
        let p = qfw::default_params(case);
        let lat = qfw::default_lattice(case, &p)?;
        for lambda in [1e-2, 1e-3] {
            let h = qfw::build_hamiltonian(case, &lat, lambda, &p)?;
            let hp = qfw::eriksen_fw(&h, &p)?;
            spec_defect = spec_defect.max(qfw::spectrum_defect(&h, &hp));
            block = block.max(hp.block_defect());
        }
    }
    Ok(vec![
        Metric::new("spectrum_defect", spec_defect, Bound::Below { limit: 1e-10 }),
        Metric::new("block_defect", block, Bound::Below { limit: 1e-11 }),
    ])
}

fn correspondence_scaling(_: &CheckContext) -> Result<Vec<Metric>> {
    let run = |case: Case, darwin: bool| -> Result<f64> {
        let p = qfw::default_params(case);
        let lat = qfw::default_lattice(case, &p)?;
        Ok(qfw::residual_scaling(case, &lat, &p, &qfw::default_lambdas(case), darwin)?.slope)
    };
    Ok(vec![
        Metric::new("case_I_slope", run(Case::I, true)?, Bound::Within { target: 2.0, tolerance: 0.1 }),
        Metric::new("case_II_darwin_slope", run(Case::II, true)?, Bound::Within { target: 2.0, tolerance: 0.1 }),
        Metric::new("case_II_no_darwin_slope", run(Case::II, false)?, Bound::Within { target: 1.0, tolerance: 0.1 }),
    ])
}

fn darwin_negative_result(_: &CheckContext) -> Result<Vec<Metric>> {
    let p = qfw::default_params(Case::II);
    let lat = qfw::default_lattice(Case::II, &p)?;
    let c = qfw::darwin_vs_classical_hd(&lat, &p, &qfw::default_lambdas(Case::II))?;
    let i = c.fit_index();
    let margin = (c.residual_plain[i] - c.residual_weyl[i]) / c.darwin_magnitude[i];
    Ok(vec![
        Metric::new("nr_relative_difference", c.nr_relative_difference, Bound::Below { limit: 1e-3 }),
        Metric::new("relativistic_margin", margin, Bound::AtLeast { limit: 0.5 * (c.gamma_max - 1.0) }),
        Metric::new("plain_form_slope", c.slope_plain, Bound::Outside { target: 2.0, tolerance: 0.1 }),
        Metric::new("weyl_form_slope", c.slope_weyl, Bound::Within { target: 2.0, tolerance: 0.1 }),
    ])
}

fn parity(_: &CheckContext) -> Result<Vec<Metric>> {
    let mut out = Vec::new();
    for case in [Case::I, Case::II] {
        let p = qfw::default_params(case);
        let lat = qfw::default_lattice(case, &p)?;
        let r = qfw::parity_check(case, &lat, 1e-2, &p)?;
        out.push(Metric::new(format!("case_{}_H", case.label()), r.hamiltonian, Bound::Below { limit: 1e-12 }));
        out.push(Metric::new(format!("case_{}_H_prime", case.label()), r.transformed, Bound::Below { limit: 1e-12 }));
    }
    Ok(out)
}

fn boost_covariance(ctx: &CheckContext) -> Result<Vec<Metric>> {
    let p = ParticleParams::natural(1.0, 0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x13);
    let mut unit = || {
        let v = ThreeVector::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        v * (1.0 / v.norm())
    };
    let (e, b, dir, pi_dir) = (unit(), unit(), unit(), unit());
    let beta = dir * (0.5 * rng.gen_range(0.2..1.0));
    let pi = pi_dir * (0.7 * p.m() * p.c());
    let (_, slope) = boost_covariance_scaling(pi, e, b, beta, &[1e-1, 1e-2, 1e-3], &p)?;
    Ok(vec![Metric::new("residual_slope", slope, Bound::Within { target: 2.0, tolerance: 0.1 })])
}
