//! Exact scalar arithmetic over QQ, cyclotomic fields QQ(zeta_n), and the
//! rational function field QQ(t).
//!
//! Every value is kept in a unique normal form so equality is plain
//! coefficient comparison: cyclotomic elements are reduced mod Phi_n and
//! stored on the power basis zeta^0..zeta^{phi(n)-1}; rational functions are
//! gcd-reduced with a monic denominator. Operations never combine values from
//! different fields (and never mix cyclotomic orders); embedding into a
//! larger cyclotomic order is an explicit step.

use crate::error::{CoreError, Result};
use crate::nt::{divisors, euler_phi, gcd};
use crate::poly::QPoly;
use num::bigint::BigInt;
use num::{BigRational, One, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;
use std::sync::OnceLock;

/// The single variable symbol used by QQ(t) everywhere (grammar, display,
/// structure files).
pub const FUNCTION_VARIABLE: &str = "t";

static CYCLO_CACHE: OnceLock<Mutex<HashMap<usize, QPoly>>> = OnceLock::new();

/// Phi_n(x), computed as (x^n - 1) divided by the product of Phi_d over the
/// proper divisors d of n. Results are cached process-wide.
pub fn cyclotomic_polynomial(n: usize) -> QPoly {
    assert!(n >= 1, "cyclotomic order must be positive");
    let cache = CYCLO_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let xn1 = QPoly::monomial(BigRational::one(), n).sub(&QPoly::one());
    let mut phi = xn1;
    for d in divisors(n) {
        if d < n {
            phi = phi.div_exact(&cyclotomic_polynomial(d));
        }
    }
    cache.lock().unwrap().insert(n, phi.clone());
    phi
}

/// Element of QQ(zeta_n) as a reduced residue mod Phi_n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycloElem {
    order: usize,
    /// Exactly phi(order) coefficients of zeta^0..zeta^{phi(order)-1}.
    coeffs: Vec<BigRational>,
}

impl CycloElem {
    pub fn from_poly(order: usize, p: &QPoly) -> CycloElem {
        let phi = cyclotomic_polynomial(order);
        let r = p.rem(&phi);
        let deg = euler_phi(order) as usize;
        let mut coeffs = vec![BigRational::zero(); deg];
        for (i, c) in r.coeffs().iter().enumerate() {
            coeffs[i] = c.clone();
        }
        CycloElem { order, coeffs }
    }

    pub fn zero(order: usize) -> CycloElem {
        CycloElem {
            order,
            coeffs: vec![BigRational::zero(); euler_phi(order) as usize],
        }
    }

    pub fn from_rational(order: usize, c: BigRational) -> CycloElem {
        CycloElem::from_poly(order, &QPoly::constant(c))
    }

    /// zeta^k, any integer k (negative powers wrap around).
    pub fn zeta_pow(order: usize, k: i64) -> CycloElem {
        let e = k.rem_euclid(order as i64) as usize;
        CycloElem::from_poly(order, &QPoly::monomial(BigRational::one(), e))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn as_poly(&self) -> QPoly {
        QPoly::from_coeffs(self.coeffs.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Some(r) iff the element lies in QQ.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, other: &CycloElem) -> CycloElem {
        debug_assert_eq!(self.order, other.order);
        CycloElem {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn neg(&self) -> CycloElem {
        CycloElem {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &CycloElem) -> CycloElem {
        debug_assert_eq!(self.order, other.order);
        CycloElem::from_poly(self.order, &self.as_poly().mul(&other.as_poly()))
    }

    /// Inverse via extended Euclid against Phi_n (irreducible, so any nonzero
    /// residue is a unit).
    pub fn inv(&self) -> Result<CycloElem> {
        if self.is_zero() {
            return Err(CoreError::ZeroInversion);
        }
        let phi = cyclotomic_polynomial(self.order);
        let (g, s, _) = self.as_poly().egcd(&phi);
        debug_assert!(g.is_one());
        Ok(CycloElem::from_poly(self.order, &s))
    }

    /// sigma_k: zeta -> zeta^k. Caller guarantees gcd(k, order) = 1.
    pub fn galois(&self, k: usize) -> CycloElem {
        CycloElem::from_poly(self.order, &self.as_poly().compose_power(k))
    }

    /// Embed into QQ(zeta_target) along zeta_n = zeta_target^{target/n}.
    pub fn embed(&self, target: usize) -> CycloElem {
        assert!(
            target % self.order == 0,
            "embedding requires order {} to divide {}",
            self.order,
            target
        );
        CycloElem::from_poly(target, &self.as_poly().compose_power(target / self.order))
    }
}

/// Element of QQ(t): num/den, gcd-reduced, den monic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFunc {
    num: QPoly,
    den: QPoly,
}

impl RatFunc {
    pub fn new(num: QPoly, den: QPoly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(CoreError::ZeroInversion);
        }
        if num.is_zero() {
            return Ok(RatFunc {
                num: QPoly::zero(),
                den: QPoly::one(),
            });
        }
        let g = num.gcd(&den);
        let num = num.div_exact(&g);
        let den = den.div_exact(&g);
        let lead_inv = BigRational::one() / den.leading();
        Ok(RatFunc {
            num: num.scale(&lead_inv),
            den: den.scale(&lead_inv),
        })
    }

    pub fn from_poly(p: QPoly) -> RatFunc {
        RatFunc {
            num: p,
            den: QPoly::one(),
        }
    }

    pub fn from_rational(c: BigRational) -> RatFunc {
        RatFunc::from_poly(QPoly::constant(c))
    }

    pub fn variable() -> RatFunc {
        RatFunc::from_poly(QPoly::x())
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.den.is_one() && self.num.degree().map_or(true, |d| d == 0) {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatFunc::new(num, den).expect("nonzero denominator product")
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominator product")
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(CoreError::ZeroInversion);
        }
        RatFunc::new(self.den.clone(), self.num.clone())
    }
}

/// Which coefficient field a computation runs in.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum ScalarField {
    Rational,
    Cyclotomic { order: usize },
    RationalFunction,
}

impl ScalarField {
    /// Dimension over QQ, None for QQ(t) (infinite).
    pub fn q_dim(&self) -> Option<usize> {
        match self {
            ScalarField::Rational => Some(1),
            ScalarField::Cyclotomic { order } => Some(euler_phi(*order) as usize),
            ScalarField::RationalFunction => None,
        }
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Rational => write!(f, "QQ"),
            ScalarField::Cyclotomic { order } => write!(f, "QQ(zeta_{order})"),
            ScalarField::RationalFunction => write!(f, "QQ({FUNCTION_VARIABLE})"),
        }
    }
}

/// Exact scalar, tagged by variant with the field it lives in.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Scalar {
    Rational(BigRational),
    Cyclotomic(CycloElem),
    RatFunc(RatFunc),
}

impl Scalar {
    pub fn field(&self) -> ScalarField {
        match self {
            Scalar::Rational(_) => ScalarField::Rational,
            Scalar::Cyclotomic(e) => ScalarField::Cyclotomic { order: e.order() },
            Scalar::RatFunc(_) => ScalarField::RationalFunction,
        }
    }

    pub fn zero(field: &ScalarField) -> Scalar {
        Scalar::from_rational(BigRational::zero(), field)
    }

    pub fn one(field: &ScalarField) -> Scalar {
        Scalar::from_rational(BigRational::one(), field)
    }

    /// QQ embeds in every supported field.
    pub fn from_rational(c: BigRational, field: &ScalarField) -> Scalar {
        match field {
            ScalarField::Rational => Scalar::Rational(c),
            ScalarField::Cyclotomic { order } => {
                Scalar::Cyclotomic(CycloElem::from_rational(*order, c))
            }
            ScalarField::RationalFunction => Scalar::RatFunc(RatFunc::from_rational(c)),
        }
    }

    pub fn from_integer(n: i64, field: &ScalarField) -> Scalar {
        Scalar::from_rational(BigRational::from_integer(BigInt::from(n)), field)
    }

    pub fn zeta(order: usize) -> Scalar {
        Scalar::Cyclotomic(CycloElem::zeta_pow(order, 1))
    }

    pub fn t() -> Scalar {
        Scalar::RatFunc(RatFunc::variable())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(c) => c.is_zero(),
            Scalar::Cyclotomic(e) => e.is_zero(),
            Scalar::RatFunc(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(c) => c.is_one(),
            Scalar::Cyclotomic(e) => e.as_rational().is_some_and(|c| c.is_one()),
            Scalar::RatFunc(r) => r.as_rational().is_some_and(|c| c.is_one()),
        }
    }

    /// Some(r) iff the value lies in the prime field QQ.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Rational(c) => Some(c.clone()),
            Scalar::Cyclotomic(e) => e.as_rational(),
            Scalar::RatFunc(r) => r.as_rational(),
        }
    }

    fn mismatch(&self, other: &Scalar) -> CoreError {
        CoreError::FieldMismatch(self.field().to_string(), other.field().to_string())
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a + b)),
            (Scalar::Cyclotomic(a), Scalar::Cyclotomic(b)) if a.order() == b.order() => {
                Ok(Scalar::Cyclotomic(a.add(b)))
            }
            (Scalar::RatFunc(a), Scalar::RatFunc(b)) => Ok(Scalar::RatFunc(a.add(b))),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(c) => Scalar::Rational(-c),
            Scalar::Cyclotomic(e) => Scalar::Cyclotomic(e.neg()),
            Scalar::RatFunc(r) => Scalar::RatFunc(r.neg()),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a * b)),
            (Scalar::Cyclotomic(a), Scalar::Cyclotomic(b)) if a.order() == b.order() => {
                Ok(Scalar::Cyclotomic(a.mul(b)))
            }
            (Scalar::RatFunc(a), Scalar::RatFunc(b)) => Ok(Scalar::RatFunc(a.mul(b))),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        self.mul(&invert_scalar(other)?)
    }

    pub fn pow(&self, e: i64) -> Result<Scalar> {
        if e < 0 {
            return invert_scalar(self)?.pow(e.checked_neg().ok_or_else(|| {
                CoreError::ParseError("exponent out of range".to_string())
            })?);
        }
        let mut acc = Scalar::one(&self.field());
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Coordinates over QQ on the field's power basis (1 for QQ, phi(n) for
    /// QQ(zeta_n)). QQ(t) has no finite basis; callers reject it first.
    pub fn q_coords(&self) -> Vec<BigRational> {
        match self {
            Scalar::Rational(c) => vec![c.clone()],
            Scalar::Cyclotomic(e) => e.coeffs().to_vec(),
            Scalar::RatFunc(_) => panic!("QQ(t) scalars have no finite QQ-coordinates"),
        }
    }

    pub fn from_q_coords(field: &ScalarField, coords: &[BigRational]) -> Scalar {
        match field {
            ScalarField::Rational => {
                debug_assert_eq!(coords.len(), 1);
                Scalar::Rational(coords[0].clone())
            }
            ScalarField::Cyclotomic { order } => {
                debug_assert_eq!(coords.len(), euler_phi(*order) as usize);
                Scalar::Cyclotomic(CycloElem::from_poly(
                    *order,
                    &QPoly::from_coeffs(coords.to_vec()),
                ))
            }
            ScalarField::RationalFunction => {
                panic!("QQ(t) scalars have no finite QQ-coordinates")
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(c) => write!(f, "{c}"),
            Scalar::Cyclotomic(e) => {
                if e.is_zero() {
                    write!(f, "0")
                } else {
                    write!(f, "{}", e.as_poly().render("z"))
                }
            }
            Scalar::RatFunc(r) => {
                if r.den().is_one() {
                    write!(f, "{}", r.num().render(FUNCTION_VARIABLE))
                } else {
                    let wrap = |s: String| {
                        if s.contains(' ') {
                            format!("({s})")
                        } else {
                            s
                        }
                    };
                    write!(
                        f,
                        "{}/{}",
                        wrap(r.num().render(FUNCTION_VARIABLE)),
                        wrap(r.den().render(FUNCTION_VARIABLE))
                    )
                }
            }
        }
    }
}

pub fn invert_scalar(s: &Scalar) -> Result<Scalar> {
    match s {
        Scalar::Rational(c) => {
            if c.is_zero() {
                Err(CoreError::ZeroInversion)
            } else {
                Ok(Scalar::Rational(c.recip()))
            }
        }
        Scalar::Cyclotomic(e) => Ok(Scalar::Cyclotomic(e.inv()?)),
        Scalar::RatFunc(r) => Ok(Scalar::RatFunc(r.inv()?)),
    }
}

/// sigma_k on cyclotomic scalars (zeta -> zeta^k); rationals are fixed.
/// k is taken mod the cyclotomic order and must be invertible there.
pub fn galois_apply(k: i64, s: &Scalar) -> Result<Scalar> {
    match s {
        Scalar::Rational(_) => Ok(s.clone()),
        Scalar::RatFunc(_) => Err(CoreError::NotCyclotomic),
        Scalar::Cyclotomic(e) => {
            let n = e.order();
            let r = k.rem_euclid(n as i64) as usize;
            if gcd(r, n) != 1 {
                return Err(CoreError::BadGaloisIndex {
                    k: r as u64,
                    n: n as u64,
                });
            }
            Ok(Scalar::Cyclotomic(e.galois(r)))
        }
    }
}

// ---------------------------------------------------------------------------
// Literal parser. Grammar (shared with the CLI):
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' '-'? integer)?
//   atom   := integer | 'z' | 't' | '(' expr ')'
// 'z' is the primitive root of the ambient cyclotomic field, 't' the
// rational-function variable; each is only legal in its own field kind.
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Debug)]
enum Tok {
    Int(BigInt),
    Z,
    T,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(input: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            '/' => {
                toks.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                toks.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                toks.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(Tok::RParen);
                i += 1;
            }
            'z' => {
                toks.push(Tok::Z);
                i += 1;
            }
            't' => {
                toks.push(Tok::T);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &input[start..i];
                let n: BigInt = digits.parse().expect("digit run parses as integer");
                toks.push(Tok::Int(n));
            }
            _ => {
                return Err(CoreError::ParseError(format!(
                    "unexpected character '{c}' in scalar literal"
                )))
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    field: &'a ScalarField,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Scalar> {
        let mut acc = self.term()?;
        while let Some(op) = self.peek().cloned() {
            match op {
                Tok::Plus => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?)?;
                }
                Tok::Minus => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Scalar> {
        let mut acc = self.unary()?;
        while let Some(op) = self.peek().cloned() {
            match op {
                Tok::Star => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?)?;
                }
                Tok::Slash => {
                    self.pos += 1;
                    acc = acc.div(&self.unary()?)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Scalar> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Scalar> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let negate = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let e = match self.next() {
            Some(Tok::Int(n)) => n,
            _ => {
                return Err(CoreError::ParseError(
                    "expected an integer exponent after '^'".to_string(),
                ))
            }
        };
        let e: i64 = e
            .try_into()
            .map_err(|_| CoreError::ParseError("exponent out of range".to_string()))?;
        if e > 65536 {
            return Err(CoreError::ParseError("exponent out of range".to_string()));
        }
        base.pow(if negate { -e } else { e })
    }

    fn atom(&mut self) -> Result<Scalar> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(Scalar::from_rational(
                BigRational::from_integer(n),
                self.field,
            )),
            Some(Tok::Z) => match self.field {
                ScalarField::Cyclotomic { order } => Ok(Scalar::zeta(*order)),
                _ => Err(CoreError::ParseError(format!(
                    "symbol 'z' is only available in cyclotomic fields, not {}",
                    self.field
                ))),
            },
            Some(Tok::T) => match self.field {
                ScalarField::RationalFunction => Ok(Scalar::t()),
                _ => Err(CoreError::ParseError(format!(
                    "symbol 't' is only available in QQ(t), not {}",
                    self.field
                ))),
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                if self.next() != Some(Tok::RParen) {
                    return Err(CoreError::ParseError("unbalanced parentheses".to_string()));
                }
                Ok(inner)
            }
            other => Err(CoreError::ParseError(format!(
                "expected a value, found {other:?}"
            ))),
        }
    }
}

/// Parse a scalar literal in the given field. Arithmetic failures inside the
/// literal (like division by zero) propagate as their own errors.
pub fn parse_scalar(input: &str, field: &ScalarField) -> Result<Scalar> {
    let toks = tokenize(input)?;
    if toks.is_empty() {
        return Err(CoreError::ParseError("empty scalar literal".to_string()));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        field,
    };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(CoreError::ParseError(format!(
            "trailing input at token {}",
            p.pos
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn poly(cs: &[i64]) -> QPoly {
        QPoly::from_coeffs(cs.iter().map(|&c| BigRational::from_i64(c).unwrap()).collect())
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), poly(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), poly(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(4), poly(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), poly(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(8), poly(&[1, 0, 0, 0, 1]));
        assert_eq!(cyclotomic_polynomial(12), poly(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn primitive_root_relations_hold_mod_phi_n() {
        // x^n = 1 but x^d != 1 for every proper divisor d, working mod Phi_n.
        for n in 1..=24usize {
            let phi = cyclotomic_polynomial(n);
            let xn = QPoly::monomial(BigRational::one(), n).sub(&QPoly::one());
            assert!(xn.rem(&phi).is_zero(), "zeta_{n}^{n} != 1");
            for d in divisors(n) {
                if d == n {
                    continue;
                }
                let xd = QPoly::monomial(BigRational::one(), d).sub(&QPoly::one());
                assert!(!xd.rem(&phi).is_zero(), "zeta_{n}^{d} == 1");
            }
        }
    }

    #[test]
    fn invert_rational() {
        let s = Scalar::Rational(q(3, 4));
        assert_eq!(invert_scalar(&s).unwrap(), Scalar::Rational(q(4, 3)));
        assert!(matches!(
            invert_scalar(&Scalar::zero(&ScalarField::Rational)),
            Err(CoreError::ZeroInversion)
        ));
    }

    #[test]
    fn invert_zeta8_is_minus_zeta8_cubed() {
        let z = Scalar::zeta(8);
        let inv = invert_scalar(&z).unwrap();
        let expected = Scalar::Cyclotomic(CycloElem::zeta_pow(8, 3)).neg();
        assert_eq!(inv, expected);
        assert!(z.mul(&inv).unwrap().is_one());
    }

    #[test]
    fn invert_rational_function() {
        let f = ScalarField::RationalFunction;
        let s = parse_scalar("(t-1)/(t+1)", &f).unwrap();
        let inv = invert_scalar(&s).unwrap();
        assert_eq!(inv, parse_scalar("(t+1)/(t-1)", &f).unwrap());
        assert!(s.mul(&inv).unwrap().is_one());
    }

    #[test]
    fn galois_identity_and_rational_fixed() {
        let f = ScalarField::Cyclotomic { order: 8 };
        let s = parse_scalar("z^2 - 1", &f).unwrap();
        assert_eq!(galois_apply(1, &s).unwrap(), s);
        let r = Scalar::Rational(q(5, 7));
        assert_eq!(galois_apply(3, &r).unwrap(), r);
    }

    #[test]
    fn galois_three_negates_zeta8_plus_inverse() {
        // s = zeta + zeta^-1 (= z - z^3 in the power basis of QQ(zeta_8))
        let f = ScalarField::Cyclotomic { order: 8 };
        let s = parse_scalar("z + z^-1", &f).unwrap();
        assert_eq!(s, parse_scalar("z - z^3", &f).unwrap());
        assert_eq!(galois_apply(3, &s).unwrap(), s.neg());
    }

    #[test]
    fn galois_rejects_bad_index_and_qt() {
        let z = Scalar::zeta(8);
        assert!(matches!(
            galois_apply(2, &z),
            Err(CoreError::BadGaloisIndex { k: 2, n: 8 })
        ));
        assert!(matches!(
            galois_apply(3, &Scalar::t()),
            Err(CoreError::NotCyclotomic)
        ));
    }

    fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
        q(rng.gen_range(-9..=9), rng.gen_range(1..=9))
    }

    fn random_scalar(rng: &mut ChaCha8Rng, field: &ScalarField) -> Scalar {
        match field {
            ScalarField::Rational => Scalar::Rational(random_rational(rng)),
            ScalarField::Cyclotomic { order } => {
                let deg = euler_phi(*order) as usize;
                let coeffs: Vec<BigRational> =
                    (0..deg).map(|_| random_rational(rng)).collect();
                Scalar::from_q_coords(field, &coeffs)
            }
            ScalarField::RationalFunction => {
                let num = QPoly::from_coeffs((0..3).map(|_| random_rational(rng)).collect());
                let den = loop {
                    let d = QPoly::from_coeffs((0..3).map(|_| random_rational(rng)).collect());
                    if !d.is_zero() {
                        break d;
                    }
                };
                Scalar::RatFunc(RatFunc::new(num, den).unwrap())
            }
        }
    }

    #[test]
    fn field_axioms_hold_on_random_samples() {
        let fields = [
            ScalarField::Rational,
            ScalarField::Cyclotomic { order: 8 },
            ScalarField::RationalFunction,
        ];
        for field in &fields {
            let mut rng = ChaCha8Rng::seed_from_u64(0xF1E1D);
            for _ in 0..10_000 {
                let a = random_scalar(&mut rng, field);
                let b = random_scalar(&mut rng, field);
                let c = random_scalar(&mut rng, field);
                let assoc_l = a.add(&b).unwrap().add(&c).unwrap();
                let assoc_r = a.add(&b.add(&c).unwrap()).unwrap();
                assert_eq!(assoc_l, assoc_r);
                let dist_l = a.mul(&b.add(&c).unwrap()).unwrap();
                let dist_r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
                assert_eq!(dist_l, dist_r);
                if !a.is_zero() {
                    assert!(invert_scalar(&a).unwrap().mul(&a).unwrap().is_one());
                }
            }
        }
    }

    #[test]
    fn galois_composition_matches_index_product() {
        for n in [4usize, 8, 12] {
            let field = ScalarField::Cyclotomic { order: n };
            let units: Vec<usize> = crate::nt::units_mod(n);
            let mut rng = ChaCha8Rng::seed_from_u64(0x5E0 + n as u64);
            for _ in 0..100 {
                let s = random_scalar(&mut rng, &field);
                for &k in &units {
                    for &l in &units {
                        let lhs =
                            galois_apply(k as i64, &galois_apply(l as i64, &s).unwrap()).unwrap();
                        let rhs = galois_apply((k * l % n) as i64, &s).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        let frat = ScalarField::Rational;
        let fcyc = ScalarField::Cyclotomic { order: 8 };
        let ffun = ScalarField::RationalFunction;
        assert_eq!(parse_scalar("1/2", &frat).unwrap(), Scalar::Rational(q(1, 2)));
        assert_eq!(
            parse_scalar("z^2 - 1", &fcyc).unwrap().to_string(),
            "z^2 - 1"
        );
        assert_eq!(
            parse_scalar("(t+1)/(t-1)", &ffun).unwrap().to_string(),
            "(t + 1)/(t - 1)"
        );
        assert_eq!(parse_scalar("(t+1)*(t-1)/(t-1)", &ffun).unwrap().to_string(), "t + 1");
        assert_eq!(parse_scalar("-3", &frat).unwrap().to_string(), "-3");
        assert_eq!(parse_scalar("2^10/8", &frat).unwrap().to_string(), "128");

        for lit in ["z^3 - z + 1/2", "(z^2+1)/(z-3)", "-z^2 + 7"] {
            let s = parse_scalar(lit, &fcyc).unwrap();
            assert_eq!(parse_scalar(&s.to_string(), &fcyc).unwrap(), s);
        }
        for lit in ["(t^2 + 2*t + 1)/(t^3 - 5)", "t^2/(t+1)", "1 - t"] {
            let s = parse_scalar(lit, &ffun).unwrap();
            assert_eq!(parse_scalar(&s.to_string(), &ffun).unwrap(), s);
        }
    }

    #[test]
    fn parse_rejects_bad_input() {
        let frat = ScalarField::Rational;
        assert!(matches!(
            parse_scalar("1/0", &frat),
            Err(CoreError::ZeroInversion)
        ));
        assert!(matches!(
            parse_scalar("z", &frat),
            Err(CoreError::ParseError(_))
        ));
        assert!(matches!(
            parse_scalar("t", &ScalarField::Cyclotomic { order: 4 }),
            Err(CoreError::ParseError(_))
        ));
        assert!(matches!(
            parse_scalar("2 +", &frat),
            Err(CoreError::ParseError(_))
        ));
        assert!(matches!(
            parse_scalar("(1", &frat),
            Err(CoreError::ParseError(_))
        ));
        assert!(matches!(
            parse_scalar("1 ? 2", &frat),
            Err(CoreError::ParseError(_))
        ));
        assert!(matches!(
            parse_scalar("", &frat),
            Err(CoreError::ParseError(_))
        ));
    }

    #[test]
    fn embedding_respects_root_towers() {
        // zeta_4 inside QQ(zeta_8) is zeta_8^2.
        let z4 = CycloElem::zeta_pow(4, 1);
        assert_eq!(z4.embed(8), CycloElem::zeta_pow(8, 2));
        // Embedding commutes with multiplication.
        let a = CycloElem::zeta_pow(4, 1).add(&CycloElem::from_rational(4, q(1, 2)));
        let b = CycloElem::zeta_pow(4, 3);
        assert_eq!(a.mul(&b).embed(8), a.embed(8).mul(&b.embed(8)));
    }

    #[test]
    fn q_coords_round_trip() {
        let f = ScalarField::Cyclotomic { order: 12 };
        let s = parse_scalar("z^3 - 2*z + 5", &f).unwrap();
        assert_eq!(Scalar::from_q_coords(&f, &s.q_coords()), s);
        assert_eq!(s.q_coords().len(), 4);
    }
}
