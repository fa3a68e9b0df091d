//! Exact Foldy-Wouthuysen transform of a purely odd interaction.

use nalgebra::SymmetricEigen;

use super::hamiltonian::{beta_conjugate, cx, hermitian_part, odd_defect, odd_part, LatticeHamiltonian};
use super::lattice::CMatrix;
use crate::error::{Error, Result};
use crate::params::ParticleParams;

/// Entry tolerance on `β̃𝒪β̃ + 𝒪`.
pub const ODD_TOLERANCE: f64 = 1e-12;

/// `H' = β̃√(m²c⁴ + 𝒪²)`.
pub fn eriksen_fw(h: &LatticeHamiltonian, params: &ParticleParams) -> Result<LatticeHamiltonian> {
    let defect = odd_defect(h, params);
    let scale = h.matrix.camax().max(1.0);
    if defect > ODD_TOLERANCE * scale {
        return Err(Error::Precondition(format!("interaction is not odd: max |β̃𝒪β̃ + 𝒪| = {defect:.3e}")));
    }
    let o = odd_part(h, params);
    let mut k = &o * &o;
    let mc4 = params.rest_energy().powi(2);
    for i in 0..k.nrows() {
        k[(i, i)] += cx(mc4);
    }
    let s = sqrt_psd(&hermitian_part(&k))?;
    let mut matrix = s;
    let half = h.dim() / 2;
    matrix.rows_mut(half, half).neg_mut();
    Ok(LatticeHamiltonian { matrix, ..h.clone() })
}

/// Square root of a Hermitian positive-definite matrix.
pub(crate) fn sqrt_psd(k: &CMatrix) -> Result<CMatrix> {
    let eig = SymmetricEigen::new(k.clone());
    let floor = -1e-12 * eig.eigenvalues.amax().max(1.0);
    if let Some(bad) = eig.eigenvalues.iter().find(|&&l| l < floor) {
        return Err(Error::Internal(format!("m²c⁴ + 𝒪² has a negative eigenvalue {bad:.3e}")));
    }
    let v = &eig.eigenvectors;
    let roots = eig.eigenvalues.map(|l| cx(l.max(0.0).sqrt()));
    Ok(v * CMatrix::from_diagonal(&roots) * v.adjoint())
}

/// Max difference between the sorted spectra.
pub fn spectrum_defect(a: &LatticeHamiltonian, b: &LatticeHamiltonian) -> f64 {
    a.spectrum().iter().zip(b.spectrum()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Max `|[β̃, H]|` entry.
pub fn commutator_with_beta(h: &LatticeHamiltonian) -> f64 {
    (&h.matrix - beta_conjugate(&h.matrix)).camax()
}
