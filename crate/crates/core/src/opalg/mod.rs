//! Exact noncommutative operator algebra for the Foldy-Wouthuysen
//! expansions, truncated at linear order in the fields.

pub mod coeff;
pub mod expr;
pub mod letter;
pub mod matchup;
pub mod ops;
pub mod render;
pub mod shadow;
pub mod slot;

pub use coeff::{Coef, Powers, Q};
pub use expr::{canonicalize, cross, dot, field_vector, pi_squared, pi_vector, CanonicalForm, Key, OpExpr};
pub use letter::{Field, FieldKind, Letter, Word};
pub use matchup::{is_reordering, pauli_identity_check, similar, verify_matchup, MatchupReport, PauliReport};
pub use ops::{omega_power, series_sqrt_expand, sym_cross, sym_dot_pipi, verify_case, weyl_order, Case};
pub use render::{to_json, to_text};
pub use slot::Slot;
