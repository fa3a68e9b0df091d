//! Three- and four-vectors with the (+,-,-,-) metric.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ThreeVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ThreeVector {
    pub const ZERO: ThreeVector = ThreeVector { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Unit vector, or zero when the input is zero.
    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            Self::ZERO
        } else {
            self * (1.0 / n)
        }
    }
}

impl Index<usize> for ThreeVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("ThreeVector index {i} out of range"),
        }
    }
}

impl IndexMut<usize> for ThreeVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        match i {
            0 => &mut self.x,
            1 => &mut self.y,
            2 => &mut self.z,
            _ => panic!("ThreeVector index {i} out of range"),
        }
    }
}

impl Add for ThreeVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for ThreeVector {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for ThreeVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for ThreeVector {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for ThreeVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for ThreeVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<ThreeVector> for f64 {
    type Output = ThreeVector;
    fn mul(self, v: ThreeVector) -> ThreeVector {
        v * self
    }
}

/// Row-major 3x3 real matrix. Used for field Jacobians, where
/// `m[i][j]` is the derivative of component `i` along axis `j`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Column `j`: the derivative of the whole vector along axis `j`.
    pub fn column(&self, j: usize) -> ThreeVector {
        ThreeVector::new(self.0[0][j], self.0[1][j], self.0[2][j])
    }

    pub fn mul_vec(&self, v: ThreeVector) -> ThreeVector {
        let m = &self.0;
        ThreeVector::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    /// `vᵀ M`, i.e. `Σ_i v_i M[i][j]`.
    pub fn vec_mul(&self, v: ThreeVector) -> ThreeVector {
        let m = &self.0;
        ThreeVector::new(
            v.x * m[0][0] + v.y * m[1][0] + v.z * m[2][0],
            v.x * m[0][1] + v.y * m[1][1] + v.z * m[2][1],
            v.x * m[0][2] + v.y * m[1][2] + v.z * m[2][2],
        )
    }

    /// Curl of the vector field whose Jacobian this is.
    pub fn curl(&self) -> ThreeVector {
        let m = &self.0;
        ThreeVector::new(m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1])
    }
}

impl Add for Mat3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut r = self;
        for i in 0..3 {
            for j in 0..3 {
                r.0[i][j] += o.0[i][j];
            }
        }
        r
    }
}

/// Contravariant four-vector `(t, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVector {
    pub t: f64,
    pub space: ThreeVector,
}

impl FourVector {
    pub const ZERO: FourVector = FourVector { t: 0.0, space: ThreeVector::ZERO };

    pub const fn new(t: f64, space: ThreeVector) -> Self {
        Self { t, space }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], ThreeVector::new(a[1], a[2], a[3]))
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.space.x, self.space.y, self.space.z]
    }

    /// Covariant components `(t, -x, -y, -z)`.
    pub fn lower(self) -> [f64; 4] {
        [self.t, -self.space.x, -self.space.y, -self.space.z]
    }

    /// Minkowski product with signature (+,-,-,-).
    pub fn dot(self, o: Self) -> f64 {
        self.t * o.t - self.space.dot(o.space)
    }

    pub fn max_abs(self) -> f64 {
        self.t.abs().max(self.space.max_abs())
    }

    pub fn is_finite(self) -> bool {
        self.t.is_finite() && self.space.is_finite()
    }
}

impl Add for FourVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.t + o.t, self.space + o.space)
    }
}

impl Sub for FourVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.t - o.t, self.space - o.space)
    }
}

impl Mul<f64> for FourVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.t * s, self.space * s)
    }
}

/// Levi-Civita symbol in three dimensions.
pub fn levi_civita3(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Levi-Civita symbol in four dimensions with `ε^{0123} = +1`.
pub fn levi_civita4(idx: [usize; 4]) -> f64 {
    let mut v = idx;
    for i in 0..4 {
        if v[i] > 3 {
            return 0.0;
        }
        for j in (i + 1)..4 {
            if v[i] == v[j] {
                return 0.0;
            }
        }
    }
    let mut sign = 1.0;
    for i in 0..4 {
        for j in 0..3 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    sign
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_is_right_handed() {
        let x = ThreeVector::new(1.0, 0.0, 0.0);
        let y = ThreeVector::new(0.0, 1.0, 0.0);
        assert_eq!(x.cross(y), ThreeVector::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn levi_civita4_parity() {
        assert_eq!(levi_civita4([0, 1, 2, 3]), 1.0);
        assert_eq!(levi_civita4([1, 0, 2, 3]), -1.0);
        assert_eq!(levi_civita4([1, 2, 0, 3]), 1.0);
        assert_eq!(levi_civita4([3, 0, 1, 2]), -1.0);
        assert_eq!(levi_civita4([0, 0, 2, 3]), 0.0);
    }

    #[test]
    fn minkowski_signature() {
        let u = FourVector::new(2.0, ThreeVector::new(1.0, 0.0, 1.0));
        assert_eq!(u.dot(u), 2.0);
        assert_eq!(u.lower(), [2.0, -1.0, 0.0, -1.0]);
    }

    #[test]
    fn curl_of_symmetric_gauge() {
        // A = (-y, x, 0)/2 has curl (0, 0, 1).
        let jac = Mat3([[0.0, -0.5, 0.0], [0.5, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        assert_eq!(jac.curl(), ThreeVector::new(0.0, 0.0, 1.0));
    }
}
