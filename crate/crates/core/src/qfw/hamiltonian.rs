//! Dirac-Pauli Hamiltonian on the lattice for the two special cases.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num::complex::Complex64;
use serde::Serialize;

use super::lattice::{CMatrix, LatticeSpec, TrigSeries};
use crate::error::{Error, Result};
use crate::opalg::expr::phase_coef;
use crate::opalg::{Case, FieldKind, Slot};
use crate::params::ParticleParams;

pub(crate) fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Field profiles as functions of `x` for one configuration.
#[derive(Debug, Clone)]
pub struct FieldSeries {
    pub phi: TrigSeries,
    pub a: [TrigSeries; 3],
    pub e: [TrigSeries; 3],
    pub b: [TrigSeries; 3],
}

impl FieldSeries {
    /// Case I: `A_y ∝ sin(2πx/L)` with `e·max|A| = λmc²`. Case II:
    /// `E_x ∝ sin(2πx/L)` with `μ'·max|E| = λmc²`.
    pub fn for_case(case: Case, spec: &LatticeSpec, lambda: f64, params: &ParticleParams) -> Result<Self> {
        let l = spec.period;
        let z = || TrigSeries::zero(l);
        let mc2 = params.rest_energy();
        match case {
            Case::I => {
                let a_max = if lambda == 0.0 { 0.0 } else { lambda * mc2 / params.e() };
                let b0 = a_max * 2.0 * std::f64::consts::PI / l;
                Ok(FieldSeries {
                    phi: z(),
                    a: [z(), TrigSeries::sin(a_max, l), z()],
                    e: [z(), z(), z()],
                    b: [z(), z(), TrigSeries::cos(b0, l)],
                })
            }
            Case::II => {
                let e0 = if lambda == 0.0 { 0.0 } else { lambda * mc2 / params.mu_prime() };
                let k = 2.0 * std::f64::consts::PI / l;
                Ok(FieldSeries {
                    phi: TrigSeries::cos(e0 / k, l),
                    a: [z(), z(), z()],
                    e: [TrigSeries::sin(e0, l), z(), z()],
                    b: [z(), z(), z()],
                })
            }
        }
    }

    pub fn component(&self, kind: FieldKind, comp: usize) -> &TrigSeries {
        match kind {
            FieldKind::E | FieldKind::UniformE => &self.e[comp],
            FieldKind::B | FieldKind::UniformB => &self.b[comp],
        }
    }

    pub fn div_e(&self) -> TrigSeries {
        self.e[0].derivative()
    }
}

pub fn check_case_params(case: Case, params: &ParticleParams) -> Result<()> {
    match case {
        Case::I if params.e() == 0.0 => Err(Error::Precondition("case I needs a nonzero charge".into())),
        Case::I if params.mu_prime() != 0.0 => {
            Err(Error::Precondition(format!("case I is a Dirac particle, got μ' = {}", params.mu_prime())))
        }
        Case::II if params.e() != 0.0 => {
            Err(Error::Precondition(format!("case II is neutral, got e = {}", params.e())))
        }
        Case::II if params.mu_prime() == 0.0 => Err(Error::Precondition("case II needs a nonzero μ'".into())),
        _ => Ok(()),
    }
}

/// Scalar (spin-independent) operators of one lattice configuration.
#[derive(Debug, Clone)]
pub struct LatticeOps {
    pub case: Case,
    pub lambda: f64,
    pub spec: LatticeSpec,
    pub params: ParticleParams,
    pub fields: FieldSeries,
    /// Kinematic momenta `p − (e/c)A`.
    pub pi: [CMatrix; 3],
}

impl LatticeOps {
    pub fn new(case: Case, spec: &LatticeSpec, lambda: f64, params: &ParticleParams) -> Result<Self> {
        check_case_params(case, params)?;
        spec.check_cutoff(params)?;
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::Domain(format!("field amplitude must be finite and non-negative, got {lambda}")));
        }
        let fields = FieldSeries::for_case(case, spec, lambda, params)?;
        let pi = std::array::from_fn(|i| {
            let p = DVector::from_vec(spec.momentum(i, params).into_iter().map(cx).collect());
            CMatrix::from_diagonal(&p) - spec.toeplitz(&fields.a[i]) * cx(params.e() / params.c())
        });
        Ok(LatticeOps { case, lambda, spec: *spec, params: *params, fields, pi })
    }

    pub fn scalar(&self, f: &TrigSeries) -> CMatrix {
        self.spec.toeplitz(f)
    }

    /// `∂_{d1}…F_comp`; the profiles depend on `x` only.
    pub fn field(&self, kind: FieldKind, comp: usize, derivs: &[u8]) -> CMatrix {
        let m = self.spec.modes();
        if kind.is_uniform() || derivs.iter().any(|&d| d != 0) {
            return CMatrix::zeros(m, m);
        }
        let mut f = self.fields.component(kind, comp).clone();
        for _ in derivs {
            f = f.derivative();
        }
        self.scalar(&f)
    }

    pub fn pi_squared(&self) -> CMatrix {
        self.pi.iter().fold(CMatrix::zeros(self.spec.modes(), self.spec.modes()), |acc, p| acc + p * p)
    }

    pub fn has_field(&self, kind: FieldKind) -> bool {
        (0..3).any(|i| !self.fields.component(kind, i).is_zero())
    }
}

/// `slot ⊗ op` in the spinor-major basis `s·M + k`.
pub fn kron(slot: Slot, coef: Complex64, op: &CMatrix) -> CMatrix {
    let m = op.nrows();
    let mut out = CMatrix::zeros(4 * m, 4 * m);
    add_kron(&mut out, slot, coef, op);
    out
}

pub fn add_kron(target: &mut CMatrix, slot: Slot, coef: Complex64, op: &CMatrix) {
    let m = op.nrows();
    let s = slot.matrix();
    for (r, row) in s.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v.norm() == 0.0 {
                continue;
            }
            let mut view = target.view_mut((r * m, c * m), (m, m));
            view += op * (v * coef);
        }
    }
}

/// `(phase, slot)` of the product `a·b` as a complex factor.
pub(crate) fn slot_product(a: Slot, b: Slot) -> (Complex64, Slot) {
    let (ph, s) = a.mul(b);
    let c = phase_coef(ph);
    (Complex64::new(crate::opalg::coeff::to_f64(&c.re), crate::opalg::coeff::to_f64(&c.im)), s)
}

#[derive(Debug, Clone)]
pub struct LatticeHamiltonian {
    pub matrix: CMatrix,
    pub case: Case,
    pub lambda: f64,
    pub spec: LatticeSpec,
}

impl LatticeHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Max `|H − H†|` entry.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).camax()
    }

    /// Particle block (`β̃ = +1`).
    pub fn upper_block(&self) -> CMatrix {
        let h = self.dim() / 2;
        self.matrix.view((0, 0), (h, h)).into_owned()
    }

    /// Max `|[β̃, H]|` entry.
    pub fn block_defect(&self) -> f64 {
        let h = self.dim() / 2;
        let a = self.matrix.view((0, h), (h, h)).camax();
        let b = self.matrix.view((h, 0), (h, h)).camax();
        2.0 * a.max(b)
    }

    /// Sorted eigenvalues.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(hermitian_part(&self.matrix)).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * cx(0.5)
}

pub fn beta_conjugate(m: &CMatrix) -> CMatrix {
    let h = m.nrows() / 2;
    let mut out = m.clone();
    out.view_mut((0, h), (h, h)).neg_mut();
    out.view_mut((h, 0), (h, h)).neg_mut();
    out
}

/// `H = β̃mc² + cα̃·π + eφ + μ'(−β̃σ̃·B + iβ̃α̃·E)`.
pub fn build_hamiltonian(
    case: Case,
    spec: &LatticeSpec,
    lambda: f64,
    params: &ParticleParams,
) -> Result<LatticeHamiltonian> {
    let ops = LatticeOps::new(case, spec, lambda, params)?;
    Ok(hamiltonian_from_ops(&ops))
}

pub fn hamiltonian_from_ops(ops: &LatticeOps) -> LatticeHamiltonian {
    let p = &ops.params;
    let m = ops.spec.modes();
    let id = CMatrix::identity(m, m);
    let mut h = kron(Slot::BETA, cx(p.rest_energy()), &id);
    for i in 0..3 {
        add_kron(&mut h, Slot::alpha(i), cx(p.c()), &ops.pi[i]);
    }
    if p.e() != 0.0 && !ops.fields.phi.is_zero() {
        add_kron(&mut h, Slot::ONE, cx(p.e()), &ops.scalar(&ops.fields.phi));
    }
    if p.mu_prime() != 0.0 {
        for i in 0..3 {
            let b = &ops.fields.b[i];
            if !b.is_zero() {
                let (ph, s) = slot_product(Slot::BETA, Slot::sigma(i));
                add_kron(&mut h, s, ph * cx(-p.mu_prime()), &ops.scalar(b));
            }
            let e = &ops.fields.e[i];
            if !e.is_zero() {
                let (ph, s) = slot_product(Slot::BETA, Slot::alpha(i));
                add_kron(&mut h, s, ph * Complex64::new(0.0, p.mu_prime()), &ops.scalar(e));
            }
        }
    }
    LatticeHamiltonian { matrix: h, case: ops.case, lambda: ops.lambda, spec: ops.spec }
}

/// Max entry of `β̃𝒪β̃ + 𝒪` with `𝒪 = H − β̃mc²`; zero for a purely odd
/// interaction.
pub fn odd_defect(h: &LatticeHamiltonian, params: &ParticleParams) -> f64 {
    let o = odd_part(h, params);
    (beta_conjugate(&o) + &o).camax()
}

pub(crate) fn odd_part(h: &LatticeHamiltonian, params: &ParticleParams) -> CMatrix {
    let mut o = h.matrix.clone();
    let half = h.dim() / 2;
    for i in 0..h.dim() {
        o[(i, i)] -= cx(if i < half { 1.0 } else { -1.0 } * params.rest_energy());
    }
    o
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FreeSpectrumCheck {
    pub max_deviation: f64,
}

/// Exact free dispersion `±√(m²c⁴ + c²k²)` per mode, each twice.
pub fn free_spectrum(spec: &LatticeSpec, params: &ParticleParams) -> Vec<f64> {
    let px = spec.momentum(0, params);
    let py = spec.momentum(1, params);
    let mut v = Vec::new();
    for (x, y) in px.iter().zip(&py) {
        let e = (params.rest_energy().powi(2) + params.c().powi(2) * (x * x + y * y)).sqrt();
        v.extend([e, e, -e, -e]);
    }
    v.sort_by(f64::total_cmp);
    v
}

pub fn identity_like(m: &CMatrix) -> CMatrix {
    DMatrix::identity(m.nrows(), m.ncols())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case_i() -> (LatticeSpec, ParticleParams) {
        let p = ParticleParams::natural(1.0, 0.0);
        (LatticeSpec::at_cutoff(2, 8, 0.5, &p).unwrap(), p)
    }

    fn case_ii() -> (LatticeSpec, ParticleParams) {
        let p = ParticleParams::natural(0.0, 0.1);
        (LatticeSpec::at_cutoff(1, 16, 0.5, &p).unwrap(), p)
    }

    #[test]
    fn free_hamiltonian_has_the_continuum_dispersion() {
        for (case, (s, p)) in [(Case::I, case_i()), (Case::II, case_ii())] {
            let h = build_hamiltonian(case, &s, 0.0, &p).unwrap();
            let got = h.spectrum();
            let want = free_spectrum(&s, &p);
            let dev = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(dev < 1e-12, "{dev}");
        }
    }

    #[test]
    fn hamiltonians_are_hermitian_and_odd() {
        for (case, (s, p)) in [(Case::I, case_i()), (Case::II, case_ii())] {
            for lambda in [0.0, 1e-3, 0.05] {
                let h = build_hamiltonian(case, &s, lambda, &p).unwrap();
                assert!(h.hermiticity_defect() < 1e-12);
                assert!(odd_defect(&h, &p) < 1e-12);
            }
        }
    }

    #[test]
    fn momentum_commutator_reproduces_b() {
        let (s, p) = case_i();
        let ops = LatticeOps::new(Case::I, &s, 0.01, &p).unwrap();
        let c = &ops.pi[0] * &ops.pi[1] - &ops.pi[1] * &ops.pi[0];
        let b = ops.field(FieldKind::B, 2, &[]) * Complex64::new(0.0, p.hbar() * p.e() / p.c());
        assert!((c - &b).camax() < 1e-15);
        assert!(b.camax() > 1e-4);
    }

    #[test]
    fn parameter_and_cutoff_preconditions() {
        let (s, _) = case_i();
        let anomalous = ParticleParams::natural(1.0, 0.1);
        assert!(matches!(build_hamiltonian(Case::I, &s, 0.0, &anomalous), Err(Error::Precondition(_))));
        let charged = ParticleParams::natural(1.0, 0.1);
        let (s2, _) = case_ii();
        assert!(matches!(build_hamiltonian(Case::II, &s2, 0.0, &charged), Err(Error::Precondition(_))));
        let p = ParticleParams::natural(1.0, 0.0);
        let tight = LatticeSpec::new(2, 8, 5.0, 0.5).unwrap();
        assert!(matches!(build_hamiltonian(Case::I, &tight, 0.0, &p), Err(Error::Config(_))));
    }

    #[test]
    fn field_amplitudes_follow_the_lambda_convention() {
        let (s, p) = case_i();
        let f = FieldSeries::for_case(Case::I, &s, 0.02, &p).unwrap();
        assert!((p.e() * f.a[1].amplitude() - 0.02 * p.rest_energy()).abs() < 1e-15);
        let (s, p) = case_ii();
        let f = FieldSeries::for_case(Case::II, &s, 0.02, &p).unwrap();
        assert!((p.mu_prime() * f.e[0].amplitude() - 0.02 * p.rest_energy()).abs() < 1e-15);
        // E = −∇φ
        for x in [0.3, 11.0] {
            assert!((f.e[0].eval(x) + f.phi.derivative().eval(x)).norm() < 1e-13);
        }
    }
}
