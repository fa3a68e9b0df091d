//! Explicit Runge-Kutta integrators behind a common trait, selected by
//! name, and the trajectory driver built on them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classical::hamiltonian::{eom_rhs, h_total};
use crate::error::{Error, Result};
use crate::field::FieldModel;
use crate::kinematics::{gamma_pi, kinematic_momentum};
use crate::params::ParticleParams;
use crate::state::PhaseState;

pub type Vector9 = [f64; 9];

/// Right-hand side `dy/dt = f(t, y)`.
pub type Rhs<'a> = dyn Fn(f64, &Vector9) -> Vector9 + 'a;

/// Outcome of one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct Step {
    pub y: Vector9,
    pub h_used: f64,
    pub h_next: f64,
}

pub trait Integrator: Send + Sync {
    fn name(&self) -> &'static str;

    /// Advance from `(t, y)` by at most `h`. Adaptive methods may shrink
    /// the step and propose a different next step.
    fn step(&self, f: &Rhs, t: f64, y: &Vector9, h: f64) -> Result<Step>;

    fn is_adaptive(&self) -> bool {
        false
    }
}

fn axpy(y: &Vector9, a: f64, k: &Vector9) -> Vector9 {
    let mut r = *y;
    for i in 0..9 {
        r[i] += a * k[i];
    }
    r
}

fn combine(y: &Vector9, h: f64, ks: &[(&Vector9, f64)]) -> Vector9 {
    let mut r = *y;
    for i in 0..9 {
        let s: f64 = ks.iter().map(|(k, w)| w * k[i]).sum();
        r[i] += h * s;
    }
    r
}

/// Classical fourth-order Runge-Kutta with a fixed step.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rk4;

impl Integrator for Rk4 {
    fn name(&self) -> &'static str {
        "rk4"
    }

    fn step(&self, f: &Rhs, t: f64, y: &Vector9, h: f64) -> Result<Step> {
        let k1 = f(t, y);
        let k2 = f(t + h / 2.0, &axpy(y, h / 2.0, &k1));
        let k3 = f(t + h / 2.0, &axpy(y, h / 2.0, &k2));
        let k4 = f(t + h, &axpy(y, h, &k3));
        let y = combine(y, h, &[(&k1, 1.0 / 6.0), (&k2, 1.0 / 3.0), (&k3, 1.0 / 3.0), (&k4, 1.0 / 6.0)]);
        Ok(Step { y, h_used: h, h_next: h })
    }
}

/// Runge-Kutta-Fehlberg 4(5) with local error control on the max norm.
#[derive(Debug, Clone, Copy)]
pub struct Rkf45 {
    pub tolerance: f64,
    pub min_step: f64,
}

impl Integrator for Rkf45 {
    fn name(&self) -> &'static str {
        "rkf45"
    }

    fn is_adaptive(&self) -> bool {
        true
    }

    fn step(&self, f: &Rhs, t: f64, y: &Vector9, h0: f64) -> Result<Step> {
        let mut h = h0;
        loop {
            if h.abs() < self.min_step {
                return Err(Error::Integration { t, reason: format!("step size {h:e} underflowed") });
            }
            let k1 = f(t, y);
            let k2 = f(t + h / 4.0, &combine(y, h, &[(&k1, 0.25)]));
            let k3 = f(t + 3.0 * h / 8.0, &combine(y, h, &[(&k1, 3.0 / 32.0), (&k2, 9.0 / 32.0)]));
            let k4 = f(
                t + 12.0 * h / 13.0,
                &combine(y, h, &[(&k1, 1932.0 / 2197.0), (&k2, -7200.0 / 2197.0), (&k3, 7296.0 / 2197.0)]),
            );
            let k5 = f(
                t + h,
                &combine(y, h, &[(&k1, 439.0 / 216.0), (&k2, -8.0), (&k3, 3680.0 / 513.0), (&k4, -845.0 / 4104.0)]),
            );
            let k6 = f(
                t + h / 2.0,
                &combine(
                    y,
                    h,
                    &[
                        (&k1, -8.0 / 27.0),
                        (&k2, 2.0),
                        (&k3, -3544.0 / 2565.0),
                        (&k4, 1859.0 / 4104.0),
                        (&k5, -11.0 / 40.0),
                    ],
                ),
            );
            let y4 = combine(y, h, &[(&k1, 25.0 / 216.0), (&k3, 1408.0 / 2565.0), (&k4, 2197.0 / 4104.0), (&k5, -0.2)]);
            let y5 = combine(
                y,
                h,
                &[
                    (&k1, 16.0 / 135.0),
                    (&k3, 6656.0 / 12825.0),
                    (&k4, 28561.0 / 56430.0),
                    (&k5, -9.0 / 50.0),
                    (&k6, 2.0 / 55.0),
                ],
            );
            let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let err = (0..9).map(|i| (y5[i] - y4[i]).abs()).fold(0.0, f64::max) / scale;
            if !err.is_finite() {
                return Err(Error::Integration { t, reason: "non-finite error estimate".into() });
            }
            let factor = if err == 0.0 { 4.0 } else { (0.84 * (self.tolerance / err).powf(0.25)).clamp(0.1, 4.0) };
            if err <= self.tolerance {
                return Ok(Step { y: y5, h_used: h, h_next: h * factor });
            }
            h *= factor;
        }
    }
}

/// Integrator configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSpec {
    /// Registered integrator name, `"rk4"` or `"rkf45"`.
    pub method: String,
    /// Fixed step, or the initial step for adaptive methods.
    pub step: f64,
    /// Local error tolerance for adaptive methods.
    pub tolerance: f64,
    pub max_steps: usize,
    /// Rescale `s` to its initial length whenever the drift exceeds 1e-12.
    pub renormalize_spin: bool,
    /// Keep every n-th step in the trajectory (the final state is always kept).
    pub record_every: usize,
}

/// Spin-length drift beyond which renormalization kicks in.
pub const RENORMALIZE_THRESHOLD: f64 = 1e-12;

impl Default for IntegratorSpec {
    fn default() -> Self {
        Self {
            method: "rk4".into(),
            step: 1e-3,
            tolerance: 1e-10,
            max_steps: 10_000_000,
            renormalize_spin: true,
            record_every: 1,
        }
    }
}

impl IntegratorSpec {
    pub fn rk4(step: f64) -> Self {
        Self { step, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::Config(format!("integrator step must be positive, got {}", self.step)));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::Config(format!("integrator tolerance must be positive, got {}", self.tolerance)));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        if lookup(self).is_none() {
            return Err(Error::Config(format!(
                "unknown integrator '{}', expected one of {:?}",
                self.method,
                registered_names()
            )));
        }
        Ok(())
    }
}

type Factory = fn(&IntegratorSpec) -> Box<dyn Integrator>;

const REGISTRY: &[(&str, Factory)] = &[
    ("rk4", |_| Box::new(Rk4)),
    ("rkf45", |spec| Box::new(Rkf45 { tolerance: spec.tolerance, min_step: spec.step * 1e-12 })),
];

pub fn registered_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|(n, _)| *n).collect()
}

/// Instantiate the integrator named in `spec`.
pub fn lookup(spec: &IntegratorSpec) -> Option<Box<dyn Integrator>> {
    REGISTRY.iter().find(|(n, _)| *n == spec.method).map(|(_, f)| f(spec))
}

/// One recorded point along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: PhaseState,
    pub h_total: f64,
    pub s_norm: f64,
    /// `|s|/|s₀| − 1` measured before any renormalization of this step.
    pub s_drift: f64,
    /// `H/H₀ − 1`.
    pub energy_drift: f64,
    pub gamma_pi: f64,
    /// Lorentz factor of the actual velocity `dx/dt`; differs from `γ_π`
    /// through the momentum dependence of the spin Hamiltonian.
    pub gamma_velocity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub integrator: String,
    pub samples: Vec<Sample>,
    pub steps: usize,
    pub renormalizations: usize,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least the initial sample")
    }

    pub fn max_spin_drift(&self) -> f64 {
        self.samples.iter().map(|s| s.s_drift.abs()).fold(0.0, f64::max)
    }

    pub fn max_energy_drift(&self) -> f64 {
        self.samples.iter().map(|s| s.energy_drift.abs()).fold(0.0, f64::max)
    }
}

/// Integration failure carrying everything computed before it.
#[derive(Debug, Clone)]
pub struct IntegrationFailure {
    pub error: Error,
    pub partial: Trajectory,
}

impl fmt::Display for IntegrationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} after {} samples", self.error, self.partial.samples.len())
    }
}

impl std::error::Error for IntegrationFailure {}

impl From<IntegrationFailure> for Error {
    fn from(f: IntegrationFailure) -> Error {
        f.error
    }
}

fn make_sample(st: PhaseState, model: &FieldModel, params: &ParticleParams, h0: f64, s_drift: f64) -> Sample {
    let h = h_total(&st, model, params);
    let f = model.sample(st.x);
    let pi = kinematic_momentum(st.p, f.a, params);
    let v = eom_rhs(&st, model, params).dx;
    let b2 = (v.norm() / params.c()).powi(2);
    let gamma_velocity = if b2 < 1.0 { 1.0 / (1.0 - b2).sqrt() } else { f64::INFINITY };
    Sample {
        t: st.t,
        state: st,
        h_total: h,
        s_norm: st.s.norm(),
        s_drift,
        energy_drift: if h0 != 0.0 { h / h0 - 1.0 } else { h - h0 },
        gamma_pi: gamma_pi(pi, params),
        gamma_velocity,
    }
}

/// Integrate Hamilton's flow from `state0` for a duration `duration`.
pub fn integrate(
    state0: &PhaseState,
    model: &FieldModel,
    params: &ParticleParams,
    spec: &IntegratorSpec,
    duration: f64,
) -> std::result::Result<Trajectory, IntegrationFailure> {
    let fail = |error: Error, partial: Trajectory| IntegrationFailure { error, partial };
    let empty = Trajectory { integrator: spec.method.clone(), samples: vec![], steps: 0, renormalizations: 0 };
    if let Err(e) = spec.validate().and_then(|_| state0.validate()) {
        return Err(fail(e, empty));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(fail(Error::Config(format!("duration must be positive, got {duration}")), empty));
    }
    let integrator = lookup(spec).expect("validated");
    let rhs = |t: f64, y: &Vector9| -> Vector9 {
        let st = PhaseState::from_array(y, t);
        let d = eom_rhs(&st, model, params);
        [d.dx.x, d.dx.y, d.dx.z, d.dp.x, d.dp.y, d.dp.z, d.ds.x, d.ds.y, d.ds.z]
    };

    let s0 = state0.s.norm();
    let h0 = h_total(state0, model, params);
    let mut traj = Trajectory {
        integrator: integrator.name().to_string(),
        samples: vec![make_sample(*state0, model, params, h0, 0.0)],
        steps: 0,
        renormalizations: 0,
    };
    let t0 = state0.t;
    let t_end = t0 + duration;
    let mut y = state0.to_array();
    let mut t = t0;
    let mut h = spec.step;
    // fixed-step runs use t0 + n·h so sample times stay exactly uniform
    let n_fixed = if integrator.is_adaptive() { 0 } else { (duration / spec.step).round().max(1.0) as usize };

    while t < t_end {
        if traj.steps >= spec.max_steps {
            return Err(fail(
                Error::Integration { t, reason: format!("max_steps = {} exhausted", spec.max_steps) },
                traj,
            ));
        }
        let (step, t_next) = if integrator.is_adaptive() {
            let h_try = h.min(t_end - t);
            match integrator.step(&rhs, t, &y, h_try) {
                Ok(s) => {
                    let tn = if t_end - (t + s.h_used) < 1e-14 * duration.max(1.0) { t_end } else { t + s.h_used };
                    (s, tn)
                }
                Err(e) => return Err(fail(e, traj)),
            }
        } else {
            let k = traj.steps + 1;
            let h_fix = duration / n_fixed as f64;
            match integrator.step(&rhs, t, &y, h_fix) {
                Ok(s) => (s, if k == n_fixed { t_end } else { t0 + k as f64 * h_fix }),
                Err(e) => return Err(fail(e, traj)),
            }
        };
        y = step.y;
        h = step.h_next;
        t = t_next;
        traj.steps += 1;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(fail(Error::Integration { t, reason: "state became non-finite".into() }, traj));
        }

        let sn = (y[6] * y[6] + y[7] * y[7] + y[8] * y[8]).sqrt();
        let drift = sn / s0 - 1.0;
        if spec.renormalize_spin && drift.abs() > RENORMALIZE_THRESHOLD {
            let k = s0 / sn;
            for v in &mut y[6..9] {
                *v *= k;
            }
            traj.renormalizations += 1;
        }
        let done = t >= t_end || (!integrator.is_adaptive() && traj.steps == n_fixed);
        if traj.steps % spec.record_every == 0 || done {
            let st = PhaseState::from_array(&y, t);
            traj.samples.push(make_sample(st, model, params, h0, drift));
        }
        if done {
            break;
        }
    }
    Ok(traj)
}
