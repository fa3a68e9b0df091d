//! Orbital and spin Hamiltonians, the precession vector `F_π` and the
//! analytic gradients that drive Hamilton's equations.

use crate::field::{FieldModel, FieldSample};
use crate::kinematics::{gamma_pi, kinematic_momentum, v_pi};
use crate::params::ParticleParams;
use crate::state::PhaseState;
use crate::vector::{levi_civita3, Mat3, ThreeVector};

/// Scalar coefficients of `F_π = a B − b h (π·B)π/(mc)² − w (π×E)/(mc)`
/// and their derivatives with respect to `γ_π`.
#[derive(Debug, Clone, Copy)]
struct Coefficients {
    g: f64,
    a: f64,
    da: f64,
    b: f64,
    h: f64,
    dh: f64,
    w: f64,
    dw: f64,
}

impl Coefficients {
    fn new(pi: ThreeVector, params: &ParticleParams) -> Self {
        let g = gamma_pi(pi, params);
        let k = params.dirac_ratio();
        let gm = params.gamma_m();
        let gg = g * g + g;
        Coefficients {
            g,
            a: gm - k + k / g,
            da: -k / (g * g),
            b: gm - k,
            h: 1.0 / gg,
            dh: -(2.0 * g + 1.0) / (gg * gg),
            w: gm / g - k / (g + 1.0),
            dw: -gm / (g * g) + k / ((g + 1.0) * (g + 1.0)),
        }
    }
}

/// `√(c²π² + m²c⁴) + eφ`.
pub fn h_orbit(state: &PhaseState, model: &FieldModel, params: &ParticleParams) -> f64 {
    let f = model.sample(state.x);
    let pi = kinematic_momentum(state.p, f.a, params);
    gamma_pi(pi, params) * params.rest_energy() + params.e() * f.phi
}

/// Lab-frame precession vector `F_π(π, E, B)`.
pub fn precession_vector(pi: ThreeVector, e: ThreeVector, b: ThreeVector, params: &ParticleParams) -> ThreeVector {
    let co = Coefficients::new(pi, params);
    let mc = params.m() * params.c();
    co.a * b - (co.b * co.h * pi.dot(b) / (mc * mc)) * pi - (co.w / mc) * pi.cross(e)
}

/// Jacobian `∂F_π,i / ∂π_j` at fixed fields.
pub fn precession_jacobian(pi: ThreeVector, e: ThreeVector, b: ThreeVector, params: &ParticleParams) -> Mat3 {
    let co = Coefficients::new(pi, params);
    let mc = params.m() * params.c();
    let mc2 = mc * mc;
    let dg = pi * (1.0 / (co.g * mc2));
    let pb = pi.dot(b);
    let pxe = pi.cross(e);
    let mut j = Mat3::ZERO;
    for i in 0..3 {
        for k in 0..3 {
            let delta = if i == k { 1.0 } else { 0.0 };
            let t1 = co.da * dg[k] * b[i];
            let t2 = -co.b / mc2 * (co.dh * dg[k] * pb * pi[i] + co.h * (b[k] * pi[i] + pb * delta));
            let eps_e: f64 = (0..3).map(|l| levi_civita3(i, k, l) * e[l]).sum();
            let t3 = -(co.dw * dg[k] * pxe[i] + co.w * eps_e) / mc;
            j.0[i][k] = t1 + t2 + t3;
        }
    }
    j
}

/// `∂F_π/∂x_k` at fixed `π`, from the analytic field gradients.
pub(crate) fn precession_x_derivative(
    pi: ThreeVector,
    f: &FieldSample,
    k: usize,
    params: &ParticleParams,
) -> ThreeVector {
    let co = Coefficients::new(pi, params);
    let mc = params.m() * params.c();
    let db = f.grad_b.column(k);
    let de = f.grad_e.column(k);
    co.a * db - (co.b * co.h * pi.dot(db) / (mc * mc)) * pi - (co.w / mc) * pi.cross(de)
}

/// `−s·F_π`.
pub fn h_spin(state: &PhaseState, model: &FieldModel, params: &ParticleParams) -> f64 {
    let f = model.sample(state.x);
    let pi = kinematic_momentum(state.p, f.a, params);
    -state.s.dot(precession_vector(pi, f.e, f.b, params))
}

/// Orbital plus spin Hamiltonian; the `O(F², ħ²)` remainder is not modelled.
pub fn h_total(state: &PhaseState, model: &FieldModel, params: &ParticleParams) -> f64 {
    h_orbit(state, model, params) + h_spin(state, model, params)
}

/// Gradients `(∂H/∂x, ∂H/∂p)` of [`h_total`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonGradient {
    pub dx: ThreeVector,
    pub dp: ThreeVector,
}

pub fn grad_h(state: &PhaseState, model: &FieldModel, params: &ParticleParams) -> HamiltonGradient {
    grad_h_sampled(state, &model.sample(state.x), params)
}

pub(crate) fn grad_h_sampled(state: &PhaseState, f: &FieldSample, params: &ParticleParams) -> HamiltonGradient {
    let pi = kinematic_momentum(state.p, f.a, params);
    let jac = precession_jacobian(pi, f.e, f.b, params);
    // ∂H/∂π = v_π − Jᵀ s, and ∂π/∂p is the identity
    let dp = v_pi(pi, params) - jac.vec_mul(state.s);
    let ec = params.e() / params.c();
    let mut dx = ThreeVector::ZERO;
    for k in 0..3 {
        let da = f.jac_a.column(k);
        let dfx = precession_x_derivative(pi, f, k, params);
        dx[k] = params.e() * f.grad_phi[k] - ec * dp.dot(da) - state.s.dot(dfx);
    }
    HamiltonGradient { dx, dp }
}

/// Time derivatives of the phase-space point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub dx: ThreeVector,
    pub dp: ThreeVector,
    pub ds: ThreeVector,
}

/// Hamilton's equations with the spin bracket `{s_i, s_j} = ε_ijk s_k`.
pub fn eom_rhs(state: &PhaseState, model: &FieldModel, params: &ParticleParams) -> Derivatives {
    let f = model.sample(state.x);
    let g = grad_h_sampled(state, &f, params);
    let pi = kinematic_momentum(state.p, f.a, params);
    let fp = precession_vector(pi, f.e, f.b, params);
    Derivatives { dx: g.dp, dp: -g.dx, ds: state.s.cross(fp) }
}

/// `dπ/dt` along the flow: `dp/dt − (e/c)(v·∇)A`.
pub fn kinematic_force(state: &PhaseState, model: &FieldModel, params: &ParticleParams) -> ThreeVector {
    let f = model.sample(state.x);
    let d = eom_rhs(state, model, params);
    d.dp - f.jac_a.mul_vec(d.dx) * (params.e() / params.c())
}

/// Candidate classical Darwin Hamiltonian `c A_D (∇·E − v·(∇×B)/c)` for
/// static fields, with `v = v_π`.
pub fn darwin_classical_hd(state: &PhaseState, model: &FieldModel, params: &ParticleParams, a_d: f64) -> f64 {
    let f = model.sample(state.x);
    let pi = kinematic_momentum(state.p, f.a, params);
    let v = v_pi(pi, params);
    params.c() * a_d * (f.div_e - v.dot(f.curl_b()) / params.c())
}

/// Low-speed precession vector with `γ → 1` inside the coefficients.
pub fn precession_vector_low_speed(
    pi: ThreeVector,
    e: ThreeVector,
    b: ThreeVector,
    params: &ParticleParams,
) -> ThreeVector {
    let k = params.dirac_ratio();
    let gm = params.gamma_m();
    let beta = pi * (1.0 / (params.m() * params.c()));
    gm * b - (gm - k / 2.0) * beta.cross(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> ParticleParams {
        ParticleParams::with_anomalous_moment(1.3, 0.7, 0.15, 0.9, 2.0).unwrap()
    }

    fn v3(r: f64) -> impl Strategy<Value = ThreeVector> {
        (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| ThreeVector::new(x, y, z))
    }

    fn state(x: ThreeVector, p: ThreeVector, s: ThreeVector) -> PhaseState {
        PhaseState { x, p, s, t: 0.0 }
    }

    #[test]
    fn orbit_energy_anchors() {
        let p = params();
        let z = ThreeVector::ZERO;
        let free = FieldModel::Superposition(vec![]);
        let s = ThreeVector::new(0.0, 0.0, 0.45);
        assert_eq!(h_orbit(&state(z, z, s), &free, &p), p.rest_energy());
        let mc = p.m() * p.c();
        let fast = state(z, ThreeVector::new(0.0, 3f64.sqrt() * mc, 0.0), s);
        assert!((h_orbit(&fast, &free, &p) - 2.0 * p.rest_energy()).abs() < 1e-14);
        assert_eq!(h_total(&state(z, z, s), &free, &p), p.rest_energy());
    }

    #[test]
    fn larmor_limit_and_dirac_value() {
        let p = params();
        let b = ThreeVector::new(0.3, -0.2, 0.9);
        let f = precession_vector(ThreeVector::ZERO, ThreeVector::ZERO, b, &p);
        assert!((f - p.gamma_m() * b).max_abs() < 1e-15);

        let d = ParticleParams::dirac(1.3, 0.7, 0.9, 2.0).unwrap();
        let pi = ThreeVector::new(1.0, 2.0, -0.5);
        let f = precession_vector(pi, ThreeVector::ZERO, b, &d);
        let expect = b * (d.dirac_ratio() / gamma_pi(pi, &d));
        assert!((f - expect).max_abs() < 1e-15);
    }

    #[test]
    fn low_speed_form_differs_at_second_order() {
        let p = params();
        let mc = p.m() * p.c();
        let e = ThreeVector::new(0.4, -0.3, 0.2);
        let b = ThreeVector::new(0.1, 0.6, -0.2);
        let dir = ThreeVector::new(0.0, 0.0, 1.0);
        let res: Vec<f64> = [1e-2, 1e-3]
            .iter()
            .map(|&beta| {
                let pi = dir * (beta * mc / (1.0 - beta * beta).sqrt());
                let exact = precession_vector(pi, e, b, &p);
                (exact - precession_vector_low_speed(pi, e, b, &p)).norm() / exact.norm()
            })
            .collect();
        let slope = (res[0] / res[1]).log10();
        assert!((slope - 2.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn spin_energy_anchors() {
        let p = params();
        let z = ThreeVector::ZERO;
        let b0 = 1.7;
        let model = FieldModel::uniform_b(ThreeVector::new(0.0, 0.0, b0));
        let up = state(z, z, ThreeVector::new(0.0, 0.0, p.hbar() / 2.0));
        assert!((h_spin(&up, &model, &p) + p.mu() * b0).abs() < 1e-15);
        let side = state(z, z, ThreeVector::new(0.3, 0.0, 0.0));
        assert_eq!(h_spin(&side, &model, &p), 0.0);
    }

    #[test]
    fn uniform_fields_give_no_gradient_force_from_spin() {
        let p = params();
        let model = FieldModel::Uniform { e0: ThreeVector::new(0.2, 0.1, -0.3), b0: ThreeVector::new(0.5, -0.4, 1.0) };
        let st =
            state(ThreeVector::new(0.3, 0.2, 0.1), ThreeVector::new(0.5, 0.1, 0.2), ThreeVector::new(0.1, 0.2, 0.3));
        let with = grad_h(&st, &model, &p);
        let mut bare = st;
        bare.s = ThreeVector::new(0.0, 0.0, 1e-300);
        let f = model.sample(st.x);
        let pi = kinematic_momentum(st.p, f.a, &p);
        // only the gauge term through dH/dπ survives
        let ec = p.e() / p.c();
        for k in 0..3 {
            let expect = p.e() * f.grad_phi[k] - ec * with.dp.dot(f.jac_a.column(k));
            assert!((with.dx[k] - expect).abs() < 1e-15);
        }
        let orbit_only = grad_h(&bare, &model, &p);
        assert!((orbit_only.dp - v_pi(pi, &p)).max_abs() < 1e-15);
    }

    #[test]
    fn lorentz_force_in_uniform_magnetic_field() {
        let p = params();
        let b0 = 1.1;
        let model = FieldModel::uniform_b(ThreeVector::new(0.0, 0.0, b0));
        let mom = 0.8;
        // spin transverse to both π and B leaves dx/dt = v_π
        let st = state(ThreeVector::ZERO, ThreeVector::new(mom, 0.0, 0.0), ThreeVector::new(0.0, 0.45, 0.0));
        let v = mom / (p.m() * gamma_pi(st.p, &p));
        let force = kinematic_force(&st, &model, &p);
        let expect = ThreeVector::new(0.0, -p.e() * v * b0 / p.c(), 0.0);
        assert!((force - expect).max_abs() < 1e-15);
        // the canonical momentum sees half of it in the symmetric gauge
        let d = eom_rhs(&st, &model, &p);
        assert!((d.dp - expect * 0.5).max_abs() < 1e-15);
    }

    #[test]
    fn larmor_spin_rate_at_rest() {
        let p = params();
        let b = ThreeVector::new(0.0, 0.0, 1.3);
        let model = FieldModel::uniform_b(b);
        let s = ThreeVector::new(0.2, -0.1, 0.3);
        let d = eom_rhs(&state(ThreeVector::ZERO, ThreeVector::ZERO, s), &model, &p);
        assert!((d.ds - s.cross(p.gamma_m() * b)).max_abs() < 1e-15);
        assert_eq!(d.dx, ThreeVector::ZERO);
    }

    #[test]
    fn stern_gerlach_force_at_rest() {
        let p = params();
        let b = 0.1;
        let model = FieldModel::SternGerlach { b0: 1.0, b };
        let st = state(ThreeVector::ZERO, ThreeVector::ZERO, ThreeVector::new(0.0, 0.0, p.hbar() / 2.0));
        let d = eom_rhs(&st, &model, &p);
        let expect = ThreeVector::new(0.0, 0.0, p.hbar() * p.gamma_m() * b / 2.0);
        assert!((d.dp - expect).max_abs() < 1e-15);
        let fd = {
            let h = 1e-6;
            let mut up = st;
            let mut dn = st;
            up.x.z += h;
            dn.x.z -= h;
            -(h_total(&up, &model, &p) - h_total(&dn, &model, &p)) / (2.0 * h)
        };
        assert!((fd - expect.z).abs() < 1e-9);
    }

    #[test]
    fn darwin_candidate_anchors() {
        let p = params();
        let (lambda, l, a_d) = (0.3, 1.7, 0.25);
        let model = FieldModel::SinusoidalElectrostatic { lambda, period: l };
        let s = ThreeVector::new(0.0, 0.0, 0.45);
        let at_origin = state(ThreeVector::ZERO, ThreeVector::new(0.4, 0.1, 0.0), s);
        let expect = p.c() * a_d * lambda * 2.0 * std::f64::consts::PI / l;
        assert!((darwin_classical_hd(&at_origin, &model, &p, a_d) - expect).abs() < 1e-14);
        let h = 1e-6;
        let e = |x: f64| model.sample(ThreeVector::new(x, 0.0, 0.0)).e.x;
        let div_fd = (e(h) - e(-h)) / (2.0 * h);
        assert!((p.c() * a_d * div_fd - expect).abs() < 1e-8);
        let uniform = FieldModel::uniform_b(ThreeVector::new(0.0, 0.0, 1.0));
        assert_eq!(darwin_classical_hd(&at_origin, &uniform, &p, a_d), 0.0);
    }

    fn fd_grad(st: &PhaseState, model: &FieldModel, p: &ParticleParams) -> HamiltonGradient {
        let h = 1e-6;
        let mut dx = ThreeVector::ZERO;
        let mut dp = ThreeVector::ZERO;
        for k in 0..3 {
            let (mut a, mut b) = (*st, *st);
            a.x[k] += h;
            b.x[k] -= h;
            dx[k] = (h_total(&a, model, p) - h_total(&b, model, p)) / (2.0 * h);
            let (mut a, mut b) = (*st, *st);
            a.p[k] += h;
            b.p[k] -= h;
            dp[k] = (h_total(&a, model, p) - h_total(&b, model, p)) / (2.0 * h);
        }
        HamiltonGradient { dx, dp }
    }

    proptest! {
        #[test]
        fn jacobian_matches_finite_differences(pi in v3(3.0), e in v3(1.0), b in v3(1.0)) {
            let p = params();
            let j = precession_jacobian(pi, e, b, &p);
            let h = 1e-6;
            for k in 0..3 {
                let (mut a, mut c) = (pi, pi);
                a[k] += h;
                c[k] -= h;
                let col = (precession_vector(a, e, b, &p) - precession_vector(c, e, b, &p)) * (0.5 / h);
                prop_assert!((col - j.column(k)).max_abs() < 1e-8);
            }
        }

        #[test]
        fn gradients_match_finite_differences(x in v3(1.0), mom in v3(2.0), s in v3(0.5)) {
            let p = params();
            let model = FieldModel::Superposition(vec![
                FieldModel::SternGerlach { b0: 0.8, b: 0.3 },
                FieldModel::SinusoidalElectrostatic { lambda: 0.4, period: 1.3 },
                FieldModel::SinusoidalMagnetostatic { lambda: 0.2, period: 2.1 },
            ]);
            let st = state(x, mom, s);
            let a = grad_h(&st, &model, &p);
            let n = fd_grad(&st, &model, &p);
            prop_assert!((a.dx - n.dx).max_abs() < 1e-7);
            prop_assert!((a.dp - n.dp).max_abs() < 1e-7);
        }

        #[test]
        fn energy_decomposes(x in v3(1.0), mom in v3(2.0), s in v3(0.5)) {
            let p = params();
            let model = FieldModel::SinusoidalElectrostatic { lambda: 0.4, period: 1.3 };
            let st = state(x, mom, s);
            let f = model.sample(x);
            let pi = kinematic_momentum(mom, f.a, &p);
            let orbit = gamma_pi(pi, &p) * p.rest_energy() + p.e() * f.phi;
            prop_assert!((h_orbit(&st, &model, &p) - orbit).abs() < 1e-14 * orbit.abs().max(1.0));
            let spin = -s.dot(precession_vector(pi, f.e, f.b, &p));
            prop_assert!((h_spin(&st, &model, &p) - spin).abs() < 1e-14);
            prop_assert_eq!(h_total(&st, &model, &p), h_orbit(&st, &model, &p) + h_spin(&st, &model, &p));
        }

        #[test]
        fn dirac_value_removes_longitudinal_term(pi in v3(3.0), b in v3(1.0)) {
            let d = ParticleParams::dirac(1.3, 0.7, 0.9, 2.0).unwrap();
            let f = precession_vector(pi, ThreeVector::ZERO, b, &d);
            let expect = b * (d.dirac_ratio() / gamma_pi(pi, &d));
            prop_assert!((f - expect).max_abs() < 1e-14);
        }
    }
}
