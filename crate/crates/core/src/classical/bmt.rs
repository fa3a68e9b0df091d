//! Consistency of an integrated trajectory with the covariant precession
//! equation.

use crate::classical::hamiltonian::{precession_jacobian, precession_x_derivative};
use crate::classical::integrator::Trajectory;
use crate::error::{Error, Result};
use crate::field::FieldModel;
use crate::kinematics::{gamma_pi, kinematic_momentum, v_pi};
use crate::lorentz::{bmt_rhs, spin_four_vector_lab, u_pi, FieldTensor};
use crate::params::ParticleParams;
use crate::state::PhaseState;
use crate::vector::{FourVector, ThreeVector};

/// Whether the extra force `f^α` enters the covariant right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceTerm {
    Include,
    Omit,
}

/// Non-Lorentz force `f^α` acting on `U_π`. The spatial part is
/// `γ_π [∇(s·F_π)|_π + (e/c)(v − v_π)×B]`; the time part `f·v_π/c` keeps
/// `f` orthogonal to `U_π`.
pub fn extra_force(state: &PhaseState, model: &FieldModel, params: &ParticleParams) -> FourVector {
    let f = model.sample(state.x);
    let pi = kinematic_momentum(state.p, f.a, params);
    let g = gamma_pi(pi, params);
    let mut grad = ThreeVector::ZERO;
    for k in 0..3 {
        grad[k] = state.s.dot(precession_x_derivative(pi, &f, k, params));
    }
    let dv = -precession_jacobian(pi, f.e, f.b, params).vec_mul(state.s);
    let space = g * (grad + dv.cross(f.b) * (params.e() / params.c()));
    FourVector::new(space.dot(v_pi(pi, params)) / params.c(), space)
}

/// Maximum over interior samples of `|dS/dτ_π − BMT(S, U_π, F, f)|`, with
/// `dS/dτ_π = γ_π dS/dt` from a fourth-order central difference.
pub fn bmt_consistency_residual(traj: &Trajectory, model: &FieldModel, params: &ParticleParams) -> Result<f64> {
    bmt_consistency_residual_with(traj, model, params, ForceTerm::Include)
}

pub fn bmt_consistency_residual_with(
    traj: &Trajectory,
    model: &FieldModel,
    params: &ParticleParams,
    force: ForceTerm,
) -> Result<f64> {
    let n = traj.samples.len();
    if n < 5 {
        return Err(Error::Diagnostic(format!("need at least 5 samples for the stencil, got {n}")));
    }
    let dt = traj.samples[1].t - traj.samples[0].t;
    for w in traj.samples.windows(2) {
        if ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt.abs().max(1e-300) {
            return Err(Error::Diagnostic("trajectory is not uniformly sampled".into()));
        }
    }
    let spins: Vec<FourVector> = traj
        .samples
        .iter()
        .map(|s| {
            let a = model.sample(s.state.x).a;
            spin_four_vector_lab(s.state.s, kinematic_momentum(s.state.p, a, params), params)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for i in 2..n - 2 {
        let st = &traj.samples[i].state;
        let f = model.sample(st.x);
        let pi = kinematic_momentum(st.p, f.a, params);
        let ds_dt = (spins[i - 2] - spins[i + 2] + (spins[i + 1] - spins[i - 1]) * 8.0) * (1.0 / (12.0 * dt));
        let lhs = ds_dt * gamma_pi(pi, params);
        let extra = match force {
            ForceTerm::Include => extra_force(st, model, params),
            ForceTerm::Omit => FourVector::ZERO,
        };
        let rhs = bmt_rhs(spins[i], u_pi(pi, params), &FieldTensor::from_fields(f.e, f.b), extra, params)?;
        worst = worst.max((lhs - rhs).max_abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::integrator::{integrate, IntegratorSpec};

    fn spec(dt: f64) -> IntegratorSpec {
        IntegratorSpec { renormalize_spin: false, ..IntegratorSpec::rk4(dt) }
    }

    #[test]
    fn field_free_residual_vanishes() {
        let p = ParticleParams::natural(1.0, 0.1);
        let model = FieldModel::Superposition(vec![]);
        let st =
            PhaseState::new(ThreeVector::ZERO, ThreeVector::new(0.4, 0.2, 0.0), ThreeVector::new(0.1, 0.3, 0.2), 0.0)
                .unwrap();
        let tr = integrate(&st, &model, &p, &spec(1e-2), 0.2).unwrap();
        assert!(bmt_consistency_residual(&tr, &model, &p).unwrap() < 1e-13);
    }

    #[test]
    fn uniform_field_residual_is_stencil_sized() {
        let p = ParticleParams::natural(1.0, 0.1);
        let b0 = 1.0;
        let model = FieldModel::uniform_b(ThreeVector::new(0.0, 0.0, b0));
        let period = 2.0 * std::f64::consts::PI / (p.gamma_m() * b0);
        // the spin term shifts dx/dt away from v_π, which feeds an O(s²)
        // Thomas-type discrepancy; a small spin keeps it below the stencil error
        let small = ThreeVector::new(3e-5, 0.0, 4e-5);
        let st = PhaseState::new(ThreeVector::ZERO, ThreeVector::new(0.5, 0.0, 0.2), small, 0.0).unwrap();
        let tr = integrate(&st, &model, &p, &spec(1e-3 * period), 0.05 * period).unwrap();
        assert!(bmt_consistency_residual(&tr, &model, &p).unwrap() < 1e-8);
        let big = PhaseState { s: small * 1e4, ..st };
        let tr = integrate(&big, &model, &p, &spec(1e-3 * period), 0.05 * period).unwrap();
        let r = bmt_consistency_residual(&tr, &model, &p).unwrap();
        assert!(r > 1e-4, "O(s²) term should dominate at |s| = 0.5, got {r:e}");
    }

    #[test]
    fn short_or_uneven_trajectories_are_rejected() {
        let p = ParticleParams::default();
        let model = FieldModel::Superposition(vec![]);
        let st = PhaseState::new(ThreeVector::ZERO, ThreeVector::ZERO, ThreeVector::new(0.0, 0.0, 0.5), 0.0).unwrap();
        let tr = integrate(&st, &model, &p, &spec(0.1), 0.3).unwrap();
        assert!(matches!(bmt_consistency_residual(&tr, &model, &p), Err(Error::Diagnostic(_))));
        let mut tr = integrate(&st, &model, &p, &spec(0.1), 1.0).unwrap();
        tr.samples[3].t += 0.01;
        assert!(matches!(bmt_consistency_residual(&tr, &model, &p), Err(Error::Diagnostic(_))));
    }

    #[test]
    fn extra_force_is_orthogonal_to_u_pi() {
        let p = ParticleParams::with_anomalous_moment(1.0, 0.8, 0.3, 1.0, 1.0).unwrap();
        let model = FieldModel::SternGerlach { b0: 1.0, b: 0.4 };
        let st = PhaseState::new(
            ThreeVector::new(0.2, -0.1, 0.3),
            ThreeVector::new(0.3, 0.5, -0.2),
            ThreeVector::new(0.1, 0.2, 0.4),
            0.0,
        )
        .unwrap();
        let f = extra_force(&st, &model, &p);
        let a = model.sample(st.x).a;
        let u = u_pi(kinematic_momentum(st.p, a, &p), &p);
        assert!(u.dot(f).abs() < 1e-14);
        assert!(f.space.norm() > 0.0);
    }
}
