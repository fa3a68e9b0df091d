//! The 4×4 Dirac matrix slot, written as `ρ_a ⊗ σ_b` with Pauli matrices
//! on the block index (`ρ`) and the spin index (`σ`).

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

/// `ρ_a ⊗ σ_b` with `a, b ∈ {0, 1, 2, 3}` and index 0 the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub rho: u8,
    pub sigma: u8,
}

/// Powers of `i` in `{0, 1, 2, 3}`.
pub type Phase = u8;

/// `σ_a σ_b = i^phase σ_c`.
pub fn pauli_product(a: u8, b: u8) -> (Phase, u8) {
    match (a, b) {
        (0, x) | (x, 0) => (0, x),
        (x, y) if x == y => (0, 0),
        _ => {
            let c = 6 - a - b;
            // cyclic (1,2,3) gives +i, anticyclic −i
            let cyclic = matches!((a, b), (1, 2) | (2, 3) | (3, 1));
            (if cyclic { 1 } else { 3 }, c)
        }
    }
}

impl Slot {
    pub const ONE: Slot = Slot { rho: 0, sigma: 0 };
    pub const BETA: Slot = Slot { rho: 3, sigma: 0 };

    pub fn alpha(i: usize) -> Slot {
        Slot { rho: 1, sigma: i as u8 + 1 }
    }

    pub fn sigma(i: usize) -> Slot {
        Slot { rho: 0, sigma: i as u8 + 1 }
    }

    pub fn mul(self, o: Slot) -> (Phase, Slot) {
        let (p1, r) = pauli_product(self.rho, o.rho);
        let (p2, s) = pauli_product(self.sigma, o.sigma);
        ((p1 + p2) % 4, Slot { rho: r, sigma: s })
    }

    /// Even under `β̃` conjugation.
    pub fn is_even(self) -> bool {
        self.rho == 0 || self.rho == 3
    }

    pub fn label(self) -> String {
        let r = ["", "ρ₁", "ρ₂", "β̃"][self.rho as usize];
        let s = ["", "σ̃₁", "σ̃₂", "σ̃₃"][self.sigma as usize];
        match (r.is_empty(), s.is_empty()) {
            (true, true) => "1".into(),
            (true, false) => s.into(),
            (false, true) => r.into(),
            (false, false) => format!("{r}{s}"),
        }
    }

    /// Explicit 4×4 matrix in the Dirac representation.
    pub fn matrix(self) -> [[Complex64; 4]; 4] {
        let a = pauli(self.rho);
        let b = pauli(self.sigma);
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        m
    }
}

pub fn pauli(i: u8) -> [[Complex64; 2]; 2] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let im = Complex64::new(0.0, 1.0);
    match i {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, -im], [im, z]],
        3 => [[o, z], [z, -o]],
        _ => panic!("Pauli index {i} out of range"),
    }
}

pub fn phase_value(p: Phase) -> Complex64 {
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)]
        [p as usize % 4]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matmul(a: &[[Complex64; 4]; 4], b: &[[Complex64; 4]; 4]) -> [[Complex64; 4]; 4] {
        let mut r = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    r[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        r
    }

    #[test]
    fn slot_products_match_explicit_matrices() {
        for a in 0..16u8 {
            for b in 0..16u8 {
                let x = Slot { rho: a / 4, sigma: a % 4 };
                let y = Slot { rho: b / 4, sigma: b % 4 };
                let (ph, z) = x.mul(y);
                let lhs = matmul(&x.matrix(), &y.matrix());
                let rhs = z.matrix();
                for i in 0..4 {
                    for j in 0..4 {
                        assert!((lhs[i][j] - phase_value(ph) * rhs[i][j]).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn dirac_matrices_have_the_standard_blocks() {
        let o = Complex64::new(1.0, 0.0);
        let beta = Slot::BETA.matrix();
        assert_eq!(beta[0][0], o);
        assert_eq!(beta[3][3], -o);
        // α̃_1 has σ_x in the off-diagonal blocks
        let a1 = Slot::alpha(0).matrix();
        assert_eq!(a1[0][3], o);
        assert_eq!(a1[1][2], o);
        assert_eq!(a1[0][1], Complex64::new(0.0, 0.0));
        // β̃ α̃_i β̃ = −α̃_i, and σ̃ commutes with β̃
        assert!(!Slot::alpha(1).is_even());
        assert!(Slot::sigma(2).is_even());
    }

    #[test]
    fn alpha_products_give_sigma() {
        // α̃_1 α̃_2 = i σ̃_3
        assert_eq!(Slot::alpha(0).mul(Slot::alpha(1)), (1, Slot::sigma(2)));
        assert_eq!(Slot::alpha(1).mul(Slot::alpha(0)), (3, Slot::sigma(2)));
        assert_eq!(Slot::alpha(2).mul(Slot::alpha(2)), (0, Slot::ONE));
    }
}
