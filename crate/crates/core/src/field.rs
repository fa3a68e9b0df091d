//! Static analytic electromagnetic field models.
//!
//! Every model provides its potentials together with exact first
//! derivatives, so the field-gradient force never goes through numerical
//! differentiation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::vector::{Mat3, ThreeVector};

/// Potentials, fields and their first derivatives at one point.
///
/// Jacobians use `m[i][j] = ∂_j (component i)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldSample {
    pub phi: f64,
    pub a: ThreeVector,
    pub e: ThreeVector,
    pub b: ThreeVector,
    pub div_e: f64,
    pub grad_b: Mat3,
    pub grad_e: Mat3,
    pub grad_phi: ThreeVector,
    pub jac_a: Mat3,
}

impl FieldSample {
    fn add(self, o: FieldSample) -> FieldSample {
        FieldSample {
            phi: self.phi + o.phi,
            a: self.a + o.a,
            e: self.e + o.e,
            b: self.b + o.b,
            div_e: self.div_e + o.div_e,
            grad_b: self.grad_b + o.grad_b,
            grad_e: self.grad_e + o.grad_e,
            grad_phi: self.grad_phi + o.grad_phi,
            jac_a: self.jac_a + o.jac_a,
        }
    }

    pub fn div_b(&self) -> f64 {
        self.grad_b.trace()
    }

    pub fn curl_b(&self) -> ThreeVector {
        self.grad_b.curl()
    }
}

/// Static field configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldModel {
    /// Homogeneous fields; potentials in the symmetric gauge
    /// `φ = −E0·x`, `A = B0×x / 2`.
    Uniform {
        e0: ThreeVector,
        b0: ThreeVector,
    },
    /// Axial Stern-Gerlach field `B = (−bx/2, −by/2, B0 + bz)`, which is
    /// divergence- and curl-free.
    SternGerlach {
        b0: f64,
        b: f64,
    },
    /// `E = (λ sin(2πx/L), 0, 0)` from `φ = (λL/2π) cos(2πx/L)`.
    SinusoidalElectrostatic {
        lambda: f64,
        period: f64,
    },
    /// `B = (0, 0, λ cos(2πx/L))` from `A = (0, (λL/2π) sin(2πx/L), 0)`.
    SinusoidalMagnetostatic {
        lambda: f64,
        period: f64,
    },
    Superposition(Vec<FieldModel>),
}

impl FieldModel {
    pub fn uniform_b(b0: ThreeVector) -> Self {
        FieldModel::Uniform { e0: ThreeVector::ZERO, b0 }
    }

    /// Evaluate potentials, fields and their derivatives at `x`.
    pub fn sample(&self, x: ThreeVector) -> FieldSample {
        match self {
            FieldModel::Uniform { e0, b0 } => {
                let mut jac_a = Mat3::ZERO;
                for i in 0..3 {
                    for k in 0..3 {
                        let mut s = 0.0;
                        for j in 0..3 {
                            s += crate::vector::levi_civita3(i, j, k) * b0[j];
                        }
                        jac_a.0[i][k] = 0.5 * s;
                    }
                }
                FieldSample {
                    phi: -e0.dot(x),
                    a: 0.5 * b0.cross(x),
                    e: *e0,
                    b: *b0,
                    div_e: 0.0,
                    grad_b: Mat3::ZERO,
                    grad_e: Mat3::ZERO,
                    grad_phi: -*e0,
                    jac_a,
                }
            }
            FieldModel::SternGerlach { b0, b } => {
                let bz = b0 + b * x.z;
                FieldSample {
                    phi: 0.0,
                    a: ThreeVector::new(-0.5 * x.y * bz, 0.5 * x.x * bz, 0.0),
                    e: ThreeVector::ZERO,
                    b: ThreeVector::new(-0.5 * b * x.x, -0.5 * b * x.y, bz),
                    div_e: 0.0,
                    grad_b: Mat3([[-0.5 * b, 0.0, 0.0], [0.0, -0.5 * b, 0.0], [0.0, 0.0, *b]]),
                    grad_e: Mat3::ZERO,
                    grad_phi: ThreeVector::ZERO,
                    jac_a: Mat3([[0.0, -0.5 * bz, -0.5 * b * x.y], [0.5 * bz, 0.0, 0.5 * b * x.x], [0.0, 0.0, 0.0]]),
                }
            }
            FieldModel::SinusoidalElectrostatic { lambda, period } => {
                let k = 2.0 * PI / period;
                let (s, c) = (k * x.x).sin_cos();
                let mut grad_e = Mat3::ZERO;
                grad_e.0[0][0] = lambda * k * c;
                FieldSample {
                    phi: lambda / k * c,
                    e: ThreeVector::new(lambda * s, 0.0, 0.0),
                    div_e: lambda * k * c,
                    grad_e,
                    grad_phi: ThreeVector::new(-lambda * s, 0.0, 0.0),
                    ..FieldSample::default()
                }
            }
            FieldModel::SinusoidalMagnetostatic { lambda, period } => {
                let k = 2.0 * PI / period;
                let (s, c) = (k * x.x).sin_cos();
                let mut grad_b = Mat3::ZERO;
                grad_b.0[2][0] = -lambda * k * s;
                let mut jac_a = Mat3::ZERO;
                jac_a.0[1][0] = lambda * c;
                FieldSample {
                    a: ThreeVector::new(0.0, lambda / k * s, 0.0),
                    b: ThreeVector::new(0.0, 0.0, lambda * c),
                    grad_b,
                    jac_a,
                    ..FieldSample::default()
                }
            }
            FieldModel::Superposition(parts) => {
                parts.iter().fold(FieldSample::default(), |acc, m| acc.add(m.sample(x)))
            }
        }
    }

    /// Whether every field in the model is spatially constant.
    pub fn is_homogeneous(&self) -> bool {
        match self {
            FieldModel::Uniform { .. } => true,
            FieldModel::SternGerlach { b, .. } => *b == 0.0,
            FieldModel::SinusoidalElectrostatic { lambda, .. } | FieldModel::SinusoidalMagnetostatic { lambda, .. } => {
                *lambda == 0.0
            }
            FieldModel::Superposition(parts) => parts.iter().all(|p| p.is_homogeneous()),
        }
    }
}

/// Free-function form of [`FieldModel::sample`].
pub fn sample_field(model: &FieldModel, x: ThreeVector) -> FieldSample {
    model.sample(x)
}
