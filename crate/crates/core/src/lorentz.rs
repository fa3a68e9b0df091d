//! Pure boosts, the electromagnetic field tensor, the spin tensor and the
//! covariant precession equation.

use crate::error::{Error, Result};
use crate::kinematics::{beta_pi, gamma_pi};
use crate::params::ParticleParams;
use crate::vector::{levi_civita3, levi_civita4, FourVector, ThreeVector};

/// Tolerance on input constraints (`U·U = c²`, `U·S = 0`), relative.
pub const CONSTRAINT_PRE_TOL: f64 = 1e-10;
/// Tolerance promised on constructed outputs, relative.
pub const CONSTRAINT_POST_TOL: f64 = 1e-12;
/// Looser constraint tolerance accepted by [`bmt_rhs`].
pub const BMT_PRE_TOL: f64 = 1e-8;

const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

type M4 = [[f64; 4]; 4];

fn mat_mul(a: &M4, b: &M4) -> M4 {
    let mut r = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            r[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    r
}

fn transpose(a: &M4) -> M4 {
    let mut r = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            r[i][j] = a[j][i];
        }
    }
    r
}

/// `γ = (1 − β²)^{-1/2}`, rejecting `|β| ≥ 1`.
pub fn lorentz_factor(beta: ThreeVector) -> Result<f64> {
    let b2 = beta.norm_squared();
    if !beta.is_finite() || b2 >= 1.0 {
        return Err(Error::Domain(format!("boost speed |β| = {} must be below 1", b2.sqrt())));
    }
    Ok(1.0 / (1.0 - b2).sqrt())
}

/// Pure boost `Λ^μ_ν` to a frame moving with velocity `βc`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostMatrix {
    pub m: M4,
    pub beta: ThreeVector,
    pub gamma: f64,
}

/// Build the pure boost for velocity `βc`.
pub fn boost_matrix(beta: ThreeVector) -> Result<BoostMatrix> {
    let gamma = lorentz_factor(beta)?;
    let b = beta.to_array();
    let mut m = [[0.0; 4]; 4];
    m[0][0] = gamma;
    for i in 0..3 {
        m[0][i + 1] = -gamma * b[i];
        m[i + 1][0] = -gamma * b[i];
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            // (γ−1)/β² = γ²/(γ+1) avoids 0/0 at β = 0
            m[i + 1][j + 1] = delta + gamma * gamma / (gamma + 1.0) * b[i] * b[j];
        }
    }
    Ok(BoostMatrix { m, beta, gamma })
}

impl BoostMatrix {
    pub fn apply(&self, v: FourVector) -> FourVector {
        let a = v.to_array();
        let mut r = [0.0; 4];
        for (i, ri) in r.iter_mut().enumerate() {
            *ri = (0..4).map(|k| self.m[i][k] * a[k]).sum();
        }
        FourVector::from_array(r)
    }

    /// `Λ T Λᵀ` for a rank-2 contravariant tensor.
    pub fn transform_tensor(&self, t: &M4) -> M4 {
        mat_mul(&mat_mul(&self.m, t), &transpose(&self.m))
    }

    /// Largest entry of `Λᵀ g Λ − g`.
    pub fn metric_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let s: f64 = (0..4).map(|k| self.m[k][i] * METRIC[k] * self.m[k][j]).sum();
                let g = if i == j { METRIC[i] } else { 0.0 };
                worst = worst.max((s - g).abs());
            }
        }
        worst
    }
}

/// `Λ(β)·v`.
pub fn boost_four_vector(v: FourVector, beta: ThreeVector) -> Result<FourVector> {
    Ok(boost_matrix(beta)?.apply(v))
}

/// Transform `(E, B)` into the frame moving with `βc`.
pub fn boost_fields(e: ThreeVector, b: ThreeVector, beta: ThreeVector) -> Result<(ThreeVector, ThreeVector)> {
    let gamma = lorentz_factor(beta)?;
    let k = gamma * gamma / (gamma + 1.0);
    let e2 = gamma * (e + beta.cross(b)) - k * beta.dot(e) * beta;
    let b2 = gamma * (b - beta.cross(e)) - k * beta.dot(b) * beta;
    Ok((e2, b2))
}

/// Contravariant field tensor with `F^{0i} = −E^i`, `F^{ij} = −ε_ijk B^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldTensor(pub M4);

impl FieldTensor {
    pub fn from_fields(e: ThreeVector, b: ThreeVector) -> Self {
        let mut f = [[0.0; 4]; 4];
        for i in 0..3 {
            f[0][i + 1] = -e[i];
            f[i + 1][0] = e[i];
            for j in 0..3 {
                f[i + 1][j + 1] = -(0..3).map(|k| levi_civita3(i, j, k) * b[k]).sum::<f64>();
            }
        }
        FieldTensor(f)
    }

    pub fn to_fields(&self) -> (ThreeVector, ThreeVector) {
        let f = &self.0;
        let e = ThreeVector::new(-f[0][1], -f[0][2], -f[0][3]);
        let b = ThreeVector::new(-f[2][3], -f[3][1], -f[1][2]);
        (e, b)
    }

    /// `F^{αβ} v_β` for a contravariant `v`.
    pub fn contract_lower(&self, v: FourVector) -> FourVector {
        let vl = v.lower();
        let mut r = [0.0; 4];
        for (a, ra) in r.iter_mut().enumerate() {
            *ra = (0..4).map(|b| self.0[a][b] * vl[b]).sum();
        }
        FourVector::from_array(r)
    }
}

/// Antisymmetric spin tensor `S^{μν}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinTensor(pub M4);

impl SpinTensor {
    fn lowered(&self) -> M4 {
        let mut r = self.0;
        for (i, row) in r.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x *= METRIC[i] * METRIC[j];
            }
        }
        r
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| self.0[i][j] == -self.0[j][i]))
    }
}

fn scale(v: FourVector) -> f64 {
    v.max_abs().max(f64::MIN_POSITIVE)
}

/// `S^{μν} = (1/c) ε^{μναβ} U_α S_β`.
pub fn spin_tensor_from_vector(s: FourVector, u: FourVector, c: f64) -> Result<SpinTensor> {
    let uu = u.dot(u);
    if (uu - c * c).abs() > CONSTRAINT_PRE_TOL * c * c {
        return Err(Error::Precondition(format!("U·U = {uu}, expected c² = {}", c * c)));
    }
    let us = u.dot(s);
    if us.abs() > CONSTRAINT_PRE_TOL * scale(u) * scale(s) {
        return Err(Error::Precondition(format!("U·S = {us} is not zero")));
    }
    let ul = u.lower();
    let sl = s.lower();
    let mut t = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in (mu + 1)..4 {
            let mut acc = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    let eps = levi_civita4([mu, nu, a, b]);
                    if eps != 0.0 {
                        acc += eps * ul[a] * sl[b];
                    }
                }
            }
            t[mu][nu] = acc / c;
            t[nu][mu] = -acc / c;
        }
    }
    Ok(SpinTensor(t))
}

/// Inverse duality `S^α = (1/2c) ε^{αβγδ} U_β S_{γδ}`.
pub fn spin_vector_from_tensor(t: &SpinTensor, u: FourVector, c: f64) -> FourVector {
    let ul = u.lower();
    let tl = t.lowered();
    let mut r = [0.0; 4];
    for (a, ra) in r.iter_mut().enumerate() {
        let mut acc = 0.0;
        for b in 0..4 {
            for g in 0..4 {
                for d in 0..4 {
                    let eps = levi_civita4([a, b, g, d]);
                    if eps != 0.0 {
                        acc += eps * ul[b] * tl[g][d];
                    }
                }
            }
        }
        *ra = acc / (2.0 * c);
    }
    FourVector::from_array(r)
}

/// `U_π = (γ_π c, π/m)`.
pub fn u_pi(pi: ThreeVector, params: &ParticleParams) -> FourVector {
    FourVector::new(gamma_pi(pi, params) * params.c(), pi * (1.0 / params.m()))
}

/// Lab-frame spin four-vector of a particle whose rest-frame spin is `s`,
/// taking the rest frame to comove with `v_π`.
pub fn spin_four_vector_lab(s: ThreeVector, pi: ThreeVector, params: &ParticleParams) -> FourVector {
    let beta = beta_pi(pi, params);
    let g = gamma_pi(pi, params);
    // (γ−1)/β² written as γ²/(γ+1) to stay finite at rest
    let k = g * g / (g + 1.0);
    FourVector::new(g * beta.dot(s), s + k * beta.dot(s) * beta)
}

/// Right-hand side of the covariant precession equation with an extra
/// force `f^α`.
pub fn bmt_rhs(
    s: FourVector,
    u: FourVector,
    f_tensor: &FieldTensor,
    f: FourVector,
    params: &ParticleParams,
) -> Result<FourVector> {
    let c = params.c();
    let us = u.dot(s);
    if us.abs() > BMT_PRE_TOL * scale(u) * scale(s) {
        return Err(Error::Precondition(format!("U·S = {us} is not zero")));
    }
    let fs = f_tensor.contract_lower(s);
    let fu = f_tensor.contract_lower(u);
    // S_λ F^{λμ} U_μ
    let sfu = s.dot(fu);
    let sf = s.dot(f);
    let coeff = (params.gamma_m() - params.dirac_ratio()) * sfu / (c * c) - sf / (params.m() * c * c);
    Ok(fs * params.gamma_m() + u * coeff)
}

/// `dU/dτ` from `m dU/dτ = (e/c) F^{αβ} U_β + f^α`.
pub fn lorentz_force_rhs(u: FourVector, f_tensor: &FieldTensor, f: FourVector, params: &ParticleParams) -> FourVector {
    (f_tensor.contract_lower(u) * (params.e() / params.c()) + f) * (1.0 / params.m())
}
