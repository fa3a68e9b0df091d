//! Classical relativistic spinor: Hamiltonians, equations of motion,
//! integration and covariance diagnostics.

pub mod bmt;
pub mod covariance;
pub mod hamiltonian;
pub mod integrator;

pub use bmt::{bmt_consistency_residual, bmt_consistency_residual_with, extra_force, ForceTerm};
pub use covariance::{boost_covariance_residual, boost_covariance_scaling, boost_kinematic_momentum};
pub use hamiltonian::{
    darwin_classical_hd, eom_rhs, grad_h, h_orbit, h_spin, h_total, kinematic_force, precession_jacobian,
    precession_vector, precession_vector_low_speed, Derivatives, HamiltonGradient,
};
pub use integrator::{
    integrate, lookup, registered_names, IntegrationFailure, Integrator, IntegratorSpec, Rk4, Rkf45, Sample, Trajectory,
};
