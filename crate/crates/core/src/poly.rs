//! Dense univariate polynomials over arbitrary-precision rationals.
//!
//! Normal form: no trailing zero coefficients, so the zero polynomial has an
//! empty coefficient vector. All division is exact field division.

use num::{BigRational, One, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct QPoly {
    /// coeffs[i] is the coefficient of x^i.
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        QPoly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        QPoly::from_coeffs(vec![c])
    }

    pub fn x() -> Self {
        QPoly::from_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    /// c * x^k
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        QPoly::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        QPoly::from_coeffs(out)
    }

    pub fn neg(&self) -> QPoly {
        QPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &BigRational) -> QPoly {
        QPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division: self = q * div + r with deg r < deg div.
    /// Panics on division by zero (callers guard).
    pub fn divmod(&self, div: &QPoly) -> (QPoly, QPoly) {
        assert!(!div.is_zero(), "polynomial division by zero");
        let dd = div.degree().unwrap();
        let lead_inv = BigRational::one() / div.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() * &lead_inv;
            if !factor.is_zero() {
                for (i, c) in div.coeffs.iter().enumerate() {
                    let v = &factor * c;
                    rem[k + i] -= v;
                }
                quot[k] = factor;
            }
            // The leading term is now exactly zero.
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
            if rem.len() <= dd {
                break;
            }
        }
        (QPoly::from_coeffs(quot), QPoly::from_coeffs(rem))
    }

    pub fn rem(&self, div: &QPoly) -> QPoly {
        self.divmod(div).1
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn div_exact(&self, div: &QPoly) -> QPoly {
        let (q, r) = self.divmod(div);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let inv = BigRational::one() / self.leading();
        self.scale(&inv)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            QPoly::zero()
        } else {
            a.monic()
        }
    }

    /// Extended Euclid: returns (g, s, t) monic g with s*self + t*other = g.
    pub fn egcd(&self, other: &QPoly) -> (QPoly, QPoly, QPoly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (QPoly::one(), QPoly::zero());
        let (mut t0, mut t1) = (QPoly::zero(), QPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (QPoly::zero(), s0, t0);
        }
        let inv = BigRational::one() / r0.leading();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Substitute x -> x^k.
    pub fn compose_power(&self, k: usize) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * k] += c;
        }
        QPoly::from_coeffs(out)
    }

    /// Render with the given variable symbol, highest degree first,
    /// e.g. "t^2 - 2*t + 1/2".
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else if neg {
                s.push_str(" - ");
            } else {
                s.push_str(" + ");
            }
            let coeff_part = if abs.is_one() && i > 0 {
                String::new()
            } else {
                abs.to_string()
            };
            let var_part = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            match (coeff_part.is_empty(), var_part.is_empty()) {
                (true, _) => s.push_str(&var_part),
                (false, true) => s.push_str(&coeff_part),
                (false, false) => {
                    s.push_str(&coeff_part);
                    s.push('*');
                    s.push_str(&var_part);
                }
            }
        }
        s
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;

    fn q(n: i64) -> BigRational {
        BigRational::from_i64(n).unwrap()
    }

    fn poly(cs: &[i64]) -> QPoly {
        QPoly::from_coeffs(cs.iter().map(|&c| q(c)).collect())
    }

    #[test]
    fn divmod_exact_and_remainder() {
        // x^2 - 1 = (x - 1)(x + 1)
        let p = poly(&[-1, 0, 1]);
        let d = poly(&[-1, 1]);
        let (quot, rem) = p.divmod(&d);
        assert_eq!(quot, poly(&[1, 1]));
        assert!(rem.is_zero());

        // x^2 + 1 = (x - 1)(x + 1) + 2
        let p = poly(&[1, 0, 1]);
        let (quot, rem) = p.divmod(&d);
        assert_eq!(quot, poly(&[1, 1]));
        assert_eq!(rem, poly(&[2]));
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        // gcd(x^2-1, x^2-2x+1) = x - 1
        let a = poly(&[-1, 0, 1]);
        let b = poly(&[1, -2, 1]);
        assert_eq!(a.gcd(&b), poly(&[-1, 1]));
    }

    #[test]
    fn egcd_bezout() {
        let a = poly(&[-1, 0, 1]);
        let b = poly(&[2, 1]);
        let (g, s, t) = a.egcd(&b);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
        assert_eq!(g.degree(), Some(0));
    }

    #[test]
    fn render_descending() {
        assert_eq!(poly(&[1, -2, 1]).render("t"), "t^2 - 2*t + 1");
        assert_eq!(poly(&[0, 1]).render("t"), "t");
        assert_eq!(poly(&[-1, 0, 0, 0, 1]).render("x"), "x^4 - 1");
        assert_eq!(QPoly::zero().render("x"), "0");
    }

    #[test]
    fn compose_power_substitutes() {
        // (x+1) with x -> x^3 gives x^3 + 1
        assert_eq!(poly(&[1, 1]).compose_power(3), poly(&[1, 0, 0, 1]));
    }
}
