//! Kinematic momentum and the Lorentz factor and velocity built from it.

use crate::params::ParticleParams;
use crate::vector::ThreeVector;

/// `π = p − (e/c) A`.
pub fn kinematic_momentum(p: ThreeVector, a: ThreeVector, params: &ParticleParams) -> ThreeVector {
    p - a * (params.e() / params.c())
}

/// `γ_π = √(1 + (π/mc)²)`.
pub fn gamma_pi(pi: ThreeVector, params: &ParticleParams) -> f64 {
    let mc = params.m() * params.c();
    (1.0 + pi.norm_squared() / (mc * mc)).sqrt()
}

/// `v_π = π / (γ_π m)`, always slower than light.
pub fn v_pi(pi: ThreeVector, params: &ParticleParams) -> ThreeVector {
    pi * (1.0 / (gamma_pi(pi, params) * params.m()))
}

/// `β_π = v_π / c`.
pub fn beta_pi(pi: ThreeVector, params: &ParticleParams) -> ThreeVector {
    v_pi(pi, params) * (1.0 / params.c())
}
