//! Lattice Foldy-Wouthuysen checks: the exact (Eriksen) transform of a
//! discretized Dirac-Pauli Hamiltonian compared against the Weyl-ordered
//! closed form.

pub mod correspondence;
pub mod crosscheck;
pub mod eriksen;
pub mod hamiltonian;
pub mod lattice;
pub mod weyl;

pub use correspondence::{
    build_correspondence, darwin_vs_classical_hd, parity_check, residual_scaling, DarwinComparison, FwRecord,
    ParityResult, ScalingResult,
};
pub use crosscheck::{opalg_crosscheck, CrossCheck};
pub use eriksen::{eriksen_fw, spectrum_defect};
pub use hamiltonian::{build_hamiltonian, FieldSeries, LatticeHamiltonian, LatticeOps};
pub use lattice::{CMatrix, LatticeSpec, TrigSeries, DEFAULT_CUTOFF};

use crate::error::Result;
use crate::opalg::Case;
use crate::params::ParticleParams;

/// 2D, 12 sites per axis for case I; 1D, 64 sites for case II. The period
/// puts the largest momentum at the default cutoff.
pub fn default_lattice(case: Case, params: &ParticleParams) -> Result<LatticeSpec> {
    match case {
        Case::I => LatticeSpec::at_cutoff(2, 12, DEFAULT_CUTOFF, params),
        Case::II => LatticeSpec::at_cutoff(1, 64, DEFAULT_CUTOFF, params),
    }
}

/// Amplitudes for the scaling fits. Case II starts lower so that the
/// Darwin term dominates the second-order residual at every amplitude.
pub fn default_lambdas(case: Case) -> [f64; 3] {
    match case {
        Case::I => [1e-2, 1e-3, 1e-4],
        Case::II => [1e-3, 1e-4, 1e-5],
    }
}

/// Unit-charge Dirac particle for case I, neutral particle with `μ' = 0.1`
/// for case II, in natural units.
pub fn default_params(case: Case) -> ParticleParams {
    match case {
        Case::I => ParticleParams::natural(1.0, 0.0),
        Case::II => ParticleParams::natural(0.0, 0.1),
    }
}
