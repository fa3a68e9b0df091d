//! Exact complex-rational coefficients and scalar monomials in ħ, c, m, e, μ'.

use num::bigint::BigInt;
use num::complex::Complex;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Q = BigRational;
pub type Coef = Complex<Q>;

pub const HBAR: usize = 0;
pub const C: usize = 1;
pub const M: usize = 2;
pub const E: usize = 3;
pub const MU: usize = 4;

pub const SCALAR_NAMES: [&str; 5] = ["ħ", "c", "m", "e", "μ'"];
pub const SCALAR_ASCII: [&str; 5] = ["hbar", "c", "m", "e", "mu_prime"];

/// Integer exponents of `(ħ, c, m, e, μ')`.
pub type Powers = [i8; 5];

pub const NO_POWERS: Powers = [0; 5];

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn re(x: Q) -> Coef {
    Complex::new(x, Q::zero())
}

pub fn int(n: i64) -> Coef {
    re(q(n, 1))
}

pub fn frac(n: i64, d: i64) -> Coef {
    re(q(n, d))
}

pub fn imag_unit() -> Coef {
    Complex::new(Q::zero(), Q::one())
}

pub fn one() -> Coef {
    Complex::new(Q::one(), Q::zero())
}

pub fn powers(p: &[(usize, i8)]) -> Powers {
    let mut r = NO_POWERS;
    for &(i, k) in p {
        r[i] += k;
    }
    r
}

pub fn add_powers(a: &Powers, b: &Powers) -> Powers {
    let mut r = *a;
    for i in 0..5 {
        r[i] += b[i];
    }
    r
}

/// Generalized binomial coefficient `C(a, n)` for rational `a`.
pub fn binomial(a: &Q, n: u32) -> Q {
    let mut r = Q::one();
    for k in 0..n {
        r = r * (a - Q::from_integer(BigInt::from(k))) / Q::from_integer(BigInt::from(k + 1));
    }
    r
}

pub fn to_f64(x: &Q) -> f64 {
    use num::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn coef_to_f64(c: &Coef) -> (f64, f64) {
    (to_f64(&c.re), to_f64(&c.im))
}

fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Compact rendering such as `3/2`, `-i/4` or `(1/2 + 3i)`.
pub fn fmt_coef(c: &Coef) -> String {
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => fmt_q(&c.re),
        (true, false) => {
            if c.im.is_one() {
                "i".into()
            } else if (-c.im.clone()).is_one() {
                "-i".into()
            } else if c.im.is_integer() {
                format!("{}i", fmt_q(&c.im))
            } else {
                let s = if c.im.is_negative() { "-" } else { "" };
                let a = c.im.abs();
                if a.numer().is_one() {
                    format!("{s}i/{}", a.denom())
                } else {
                    format!("{s}{}i/{}", a.numer(), a.denom())
                }
            }
        }
        (false, false) => format!("({} + {}i)", fmt_q(&c.re), fmt_q(&c.im)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_binomials() {
        let h = q(1, 2);
        let expect = [q(1, 1), q(1, 2), q(-1, 8), q(1, 16), q(-5, 128)];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(&binomial(&h, n as u32), e);
        }
        assert_eq!(binomial(&q(-1, 2), 2), q(3, 8));
    }

    #[test]
    fn formatting() {
        assert_eq!(fmt_coef(&frac(3, 2)), "3/2");
        assert_eq!(fmt_coef(&imag_unit()), "i");
        assert_eq!(fmt_coef(&Complex::new(Q::zero(), q(-1, 4))), "-i/4");
    }
}
