use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::ThreeVector;

/// Canonical phase-space point of the classical spinor. `s` carries units
/// of ħ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: ThreeVector,
    pub p: ThreeVector,
    pub s: ThreeVector,
    pub t: f64,
}

impl PhaseState {
    pub fn new(x: ThreeVector, p: ThreeVector, s: ThreeVector, t: f64) -> Result<Self> {
        let st = Self { x, p, s, t };
        st.validate()?;
        Ok(st)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x.is_finite() && self.p.is_finite() && self.s.is_finite() && self.t.is_finite()) {
            return Err(Error::Domain("phase state has non-finite components".into()));
        }
        if self.s.norm() == 0.0 {
            return Err(Error::Domain("spin must be nonzero".into()));
        }
        Ok(())
    }

    pub fn to_array(&self) -> [f64; 9] {
        let (x, p, s) = (self.x, self.p, self.s);
        [x.x, x.y, x.z, p.x, p.y, p.z, s.x, s.y, s.z]
    }

    pub fn from_array(y: &[f64; 9], t: f64) -> Self {
        Self {
            x: ThreeVector::new(y[0], y[1], y[2]),
            p: ThreeVector::new(y[3], y[4], y[5]),
            s: ThreeVector::new(y[6], y[7], y[8]),
            t,
        }
    }
}
