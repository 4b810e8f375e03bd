//! Exact coefficient fields: the rationals and prime fields `F_p`.
//!
//! A [`Scalar`] carries enough information to do arithmetic on its own, so
//! elements can be added and multiplied with the usual operators. Mixing
//! scalars from different fields is a programming error and panics.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;

/// Largest modulus accepted for prime fields.
pub const MAX_PRIME: u64 = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rational(BigRational),
    Mod { value: u64, p: u64 },
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn prime(p: u64) -> Result<Field, Error> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(Error::Schema(format!("{p} is not a supported prime modulus")));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match *self {
            Field::Rationals => Scalar::Rational(BigRational::from_integer(n.clone())),
            Field::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(p));
                Scalar::Mod { value: r.to_u64().unwrap(), p }
            }
        }
    }

    /// Parses `"-2/3"`, `"−2/3"`, `"5"`, or `"5 mod 7"`.
    pub fn parse(&self, s: &str) -> Result<Scalar, Error> {
        let s = s.trim().replace('−', "-");
        let err = || Error::Schema(format!("cannot parse field element {s:?} in {self}"));
        if let Some((lhs, rhs)) = s.split_once("mod") {
            let p: u64 = rhs.trim().parse().map_err(|_| err())?;
            if *self != Field::Prime(p) {
                return Err(Error::Schema(format!("element {s:?} does not belong to {self}")));
            }
            let v: BigInt = lhs.trim().parse().map_err(|_| err())?;
            return Ok(self.from_bigint(&v));
        }
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.as_str(), "1"),
        };
        let num: BigInt = num.parse().map_err(|_| err())?;
        let den: BigInt = den.parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        match *self {
            Field::Rationals => Ok(Scalar::Rational(BigRational::new(num, den))),
            Field::Prime(_) => {
                let d = self.from_bigint(&den);
                let d = d.inv().ok_or_else(err)?;
                Ok(self.from_bigint(&num) * d)
            }
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn order(&self) -> Option<u64> {
        match *self {
            Field::Rationals => None,
            Field::Prime(p) => Some(p),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    /// Accepts `Q`, `F7`, `Fp7`, `F_7` and `GF(7)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") {
            return Ok(Field::Rationals);
        }
        let digits = t
            .trim_start_matches("GF(")
            .trim_end_matches(')')
            .trim_start_matches(['F', 'f'])
            .trim_start_matches(['p', '_']);
        let p: u64 = digits.parse().map_err(|_| Error::Schema(format!("unknown field {s:?}")))?;
        Field::prime(p)
    }
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rationals,
            Scalar::Mod { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Mod { value, .. } => *value == 1,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Mod { value, p } => Scalar::Mod { value: mod_pow(*value, p - 2, *p), p: *p },
        })
    }

    /// Integer power; negative exponents invert. Panics on `0^n` with `n < 0`.
    pub fn pow(&self, n: i64) -> Scalar {
        let base = if n < 0 { self.inv().expect("negative power of zero") } else { self.clone() };
        let e = n.unsigned_abs();
        match base {
            Scalar::Rational(r) => {
                let num = num_traits::pow::pow(r.numer().clone(), e as usize);
                let den = num_traits::pow::pow(r.denom().clone(), e as usize);
                Scalar::Rational(BigRational::new(num, den))
            }
            Scalar::Mod { value, p } => Scalar::Mod { value: mod_pow(value, e, p), p },
        }
    }

    /// The value as a rational number, if it is one.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Mod { .. } => None,
        }
    }

    fn check(&self, other: &Scalar) -> u64 {
        match (self, other) {
            (Scalar::Rational(_), Scalar::Rational(_)) => 0,
            (Scalar::Mod { p, .. }, Scalar::Mod { p: q, .. }) if p == q => *p,
            _ => panic!("mixed fields: {} and {}", self.field(), other.field()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Mod { value, p } => write!(f, "{value} mod {p}"),
        }
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let p = self.check(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Mod { value: a, .. }, Scalar::Mod { value: b, .. }) => {
                Scalar::Mod { value: ((*a as u128 + *b as u128) % p as u128) as u64, p }
            }
            _ => unreachable!(),
        }
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let p = self.check(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Mod { value: a, .. }, Scalar::Mod { value: b, .. }) => {
                Scalar::Mod { value: ((*a as u128 * *b as u128) % p as u128) as u64, p }
            }
            _ => unreachable!(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Mod { value, p } => Scalar::Mod { value: (p - value) % p, p: *p },
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}
