//! Boost behaviour of the precession vector at linear order in the fields.

use crate::classical::hamiltonian::precession_vector;
use crate::error::Result;
use crate::fit::loglog_slope;
use crate::kinematics::gamma_pi;
use crate::lorentz::{boost_fields, lorentz_factor};
use crate::params::ParticleParams;
use crate::vector::ThreeVector;

/// Kinematic momentum seen from the frame moving with `βc`, with the spin
/// energy dropped from `H − eφ`.
pub fn boost_kinematic_momentum(pi: ThreeVector, beta: ThreeVector, params: &ParticleParams) -> Result<ThreeVector> {
    let gamma = lorentz_factor(beta)?;
    let w = gamma_pi(pi, params) * params.rest_energy();
    let k = gamma * gamma / (gamma + 1.0);
    Ok(pi + k * beta.dot(pi) * beta - beta * (gamma * w / params.c()))
}

/// `|γ F_π(π, E, B) − F_π(π', E', B')|`.
pub fn boost_covariance_residual(
    pi: ThreeVector,
    e: ThreeVector,
    b: ThreeVector,
    beta: ThreeVector,
    params: &ParticleParams,
) -> Result<f64> {
    let (e2, b2) = boost_fields(e, b, beta)?;
    let pi2 = boost_kinematic_momentum(pi, beta, params)?;
    let gamma = lorentz_factor(beta)?;
    let lhs = precession_vector(pi, e, b, params) * gamma;
    Ok((lhs - precession_vector(pi2, e2, b2, params)).norm())
}

/// Residuals at field amplitudes `λ·(E, B)` and their log-log slope.
pub fn boost_covariance_scaling(
    pi: ThreeVector,
    e_unit: ThreeVector,
    b_unit: ThreeVector,
    beta: ThreeVector,
    lambdas: &[f64],
    params: &ParticleParams,
) -> Result<(Vec<f64>, f64)> {
    let res = lambdas
        .iter()
        .map(|&l| boost_covariance_residual(pi, e_unit * l, b_unit * l, beta, params))
        .collect::<Result<Vec<_>>>()?;
    let slope = loglog_slope(lambdas, &res)?;
    Ok((res, slope))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::boost_four_vector;
    use crate::vector::FourVector;

    #[test]
    fn momentum_boost_matches_four_vector_boost() {
        let p = ParticleParams::with_anomalous_moment(1.3, 0.7, 0.1, 1.0, 2.0).unwrap();
        let pi = ThreeVector::new(0.4, -1.2, 0.7);
        let beta = ThreeVector::new(0.2, 0.1, -0.3);
        let w = gamma_pi(pi, &p) * p.rest_energy();
        let four = boost_four_vector(FourVector::new(w / p.c(), pi), beta).unwrap();
        let three = boost_kinematic_momentum(pi, beta, &p).unwrap();
        assert!((four.space - three).max_abs() < 1e-13);
    }

    #[test]
    fn identity_boost_has_zero_residual() {
        let p = ParticleParams::natural(1.0, 0.2);
        let r = boost_covariance_residual(
            ThreeVector::new(0.3, 0.1, 0.0),
            ThreeVector::new(0.1, 0.0, 0.2),
            ThreeVector::new(0.0, 0.3, 0.1),
            ThreeVector::ZERO,
            &p,
        )
        .unwrap();
        assert!(r < 1e-15);
    }

    #[test]
    fn superluminal_boost_is_rejected() {
        let p = ParticleParams::default();
        let z = ThreeVector::ZERO;
        assert!(boost_covariance_residual(z, z, z, ThreeVector::new(1.2, 0.0, 0.0), &p).is_err());
    }
}
