//! Classical relativistic spin dynamics and its quantum counterpart for a
//! Dirac-Pauli particle: field models, boosts, Hamiltonian integration, an
//! exact operator-algebra engine and lattice Foldy-Wouthuysen transforms.

pub mod checks;
pub mod classical;
pub mod error;
pub mod field;
pub mod fit;
pub mod kinematics;
pub mod lorentz;
pub mod opalg;
pub mod params;
pub mod qfw;
pub mod state;
pub mod vector;

pub use error::{Error, Result};
pub use field::{sample_field, FieldModel, FieldSample};
pub use kinematics::{gamma_pi, kinematic_momentum, v_pi};
pub use params::ParticleParams;
pub use state::PhaseState;
pub use vector::{FourVector, Mat3, ThreeVector};
