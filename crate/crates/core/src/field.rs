//! Exact scalars over ℚ and prime fields.
//!
//! A [`Field`] is a small copyable tag; a [`Scalar`] carries its own field so
//! that arithmetic can be written with ordinary operators. Mixing scalars of
//! different fields is a programming error and panics.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Largest modulus accepted for prime fields; products of two residues fit in `u64`.
pub const MAX_PRIME: u32 = (1 << 31) - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Rationals,
    Prime(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Modular { value: u32, modulus: u32 },
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

impl Field {
    pub fn characteristic(self) -> u32 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => p,
        }
    }

    /// Number of elements, `None` for ℚ.
    pub fn size(self) -> Option<u64> {
        match self {
            Field::Rationals => None,
            Field::Prime(p) => Some(p as u64),
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Modular {
                value: n.rem_euclid(p as i64) as u32,
                modulus: p,
            },
        }
    }

    pub fn from_bigint(self, n: &BigInt) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::from_integer(n.clone())),
            Field::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(p));
                Scalar::Modular {
                    value: r.to_u32().expect("residue fits"),
                    modulus: p,
                }
            }
        }
    }

    /// `num / den`; `None` when the denominator vanishes in this field.
    pub fn from_ratio(self, num: &BigInt, den: &BigInt) -> Option<Scalar> {
        let d = self.from_bigint(den);
        if d.is_zero() {
            return None;
        }
        Some(&self.from_bigint(num) / &d)
    }

    /// Parses an integer literal or a `p/q` fraction.
    pub fn parse_scalar(self, text: &str) -> Option<Scalar> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (text, "1"),
        };
        let num: BigInt = num.parse().ok()?;
        let den: BigInt = den.parse().ok()?;
        self.from_ratio(&num, &den)
    }

    /// A deterministic element of large multiplicative order: 2 over ℚ, the least
    /// primitive root over 𝔽_p.
    pub fn generic_unit(self) -> Scalar {
        match self {
            Field::Rationals => self.from_i64(2),
            Field::Prime(p) => {
                if p == 2 {
                    return self.one();
                }
                let order = (p - 1) as u64;
                let mut factors = Vec::new();
                let mut m = order;
                let mut d = 2;
                while d * d <= m {
                    if m.is_multiple_of(d) {
                        factors.push(d);
                        while m.is_multiple_of(d) {
                            m /= d;
                        }
                    }
                    d += 1;
                }
                if m > 1 {
                    factors.push(m);
                }
                (2..p as u64)
                    .find(|&g| factors.iter().all(|&f| mod_pow(g, order / f, p as u64) != 1))
                    .map(|g| self.from_i64(g as i64))
                    .unwrap_or_else(|| self.one())
            }
        }
    }

    /// Enumerates all field elements (prime fields only).
    pub fn elements(self) -> Option<Vec<Scalar>> {
        match self {
            Field::Rationals => None,
            Field::Prime(p) => Some((0..p as i64).map(|v| self.from_i64(v)).collect()),
        }
    }

    /// Rescales a vector so its entries are coprime integers with a positive first
    /// nonzero entry (ℚ), or leaves it untouched (𝔽_p). Keeps elimination over ℚ
    /// fraction-free.
    pub fn make_primitive(self, entries: &mut [Scalar]) {
        if self != Field::Rationals {
            return;
        }
        let mut lcm = BigInt::one();
        for e in entries.iter() {
            if let Scalar::Rational(r) = e {
                lcm = lcm.lcm(r.denom());
            }
        }
        let mut gcd = BigInt::zero();
        for e in entries.iter() {
            if let Scalar::Rational(r) = e {
                let n = r.numer() * (&lcm / r.denom());
                gcd = gcd.gcd(&n);
            }
        }
        if gcd.is_zero() {
            return;
        }
        let negative = entries
            .iter()
            .find(|e| !e.is_zero())
            .map(|e| matches!(e, Scalar::Rational(r) if r.is_negative()))
            .unwrap_or(false);
        let factor = if negative { -(&lcm) } else { lcm };
        let scale = BigRational::new(factor, gcd);
        for e in entries.iter_mut() {
            if let Scalar::Rational(r) = e {
                *r = &*r * &scale;
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rationals,
            Scalar::Modular { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Modular { value, .. } => *value == 1,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: mod_pow(*value as u64, *modulus as u64 - 2, *modulus as u64) as u32,
                modulus: *modulus,
            },
        })
    }

    pub fn pow(&self, exp: i64) -> Scalar {
        let base = if exp < 0 {
            self.inv().expect("negative power of zero")
        } else {
            self.clone()
        };
        let mut acc = self.field().one();
        for _ in 0..exp.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    fn check(&self, other: &Scalar) {
        assert_eq!(self.field(), other.field(), "scalars from different fields");
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Modular { value: a, modulus }, Scalar::Modular { value: b, .. }) => {
                Scalar::Modular {
                    value: ((*a as u64 + *b as u64) % *modulus as u64) as u32,
                    modulus: *modulus,
                }
            }
            _ => unreachable!(),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Modular { value: a, modulus }, Scalar::Modular { value: b, .. }) => {
                Scalar::Modular {
                    value: (*a as u64 * *b as u64 % *modulus as u64) as u32,
                    modulus: *modulus,
                }
            }
            _ => unreachable!(),
        }
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv().expect("division by zero")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: (*modulus - *value) % *modulus,
                modulus: *modulus,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
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
forward_owned!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modular_arithmetic() {
        let f = Field::Prime(5);
        let two = f.from_i64(2);
        assert_eq!(&two * &f.from_i64(3), f.one());
        assert_eq!(two.inv().unwrap(), f.from_i64(3));
        assert_eq!(-&two, f.from_i64(3));
        assert_eq!(f.from_i64(-7), f.from_i64(3));
    }

    #[test]
    fn rational_parse_and_display() {
        let q = Field::Rationals;
        let x = q.parse_scalar("-6/4").unwrap();
        assert_eq!(x.to_string(), "-3/2");
        assert!(q.parse_scalar("1/0").is_none());
        assert_eq!(Field::Prime(5).parse_scalar("1/2").unwrap(), Field::Prime(5).from_i64(3));
        assert!(Field::Prime(5).parse_scalar("1/5").is_none());
    }

    #[test]
    fn primitive_rescaling() {
        let q = Field::Rationals;
        let mut v = vec![q.parse_scalar("-1/2").unwrap(), q.zero(), q.parse_scalar("3/4").unwrap()];
        q.make_primitive(&mut v);
        assert_eq!(v, vec![q.from_i64(2), q.zero(), q.from_i64(-3)]);
    }

    #[test]
    fn generic_unit_has_full_order() {
        assert_eq!(Field::Prime(5).generic_unit(), Field::Prime(5).from_i64(2));
        assert_eq!(Field::Prime(7).generic_unit(), Field::Prime(7).from_i64(3));
        assert_eq!(Field::Rationals.generic_unit(), Field::Rationals.from_i64(2));
    }

    #[test]
    fn primality() {
        assert!(is_prime(2) && is_prime(5) && is_prime(101));
        assert!(!is_prime(1) && !is_prime(9) && !is_prime(0));
    }
}
