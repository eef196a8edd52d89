//! Exact coefficient fields: ℚ and 𝔽_p.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Field element. Over 𝔽_p the value is kept as an integer in `0..p`.
pub type Scalar = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(u64),
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if is_prime(p) && p < (1 << 31) {
            Ok(Field::Prime(p))
        } else {
            Err(Error::Parse(format!("{p} is not a supported prime")))
        }
    }

    /// Accepts `Q`, `QQ`, `Rationals`, `F101`, `F_101`, `GF(101)`.
    pub fn parse(s: &str) -> Result<Field> {
        let t = s.trim();
        match t {
            "Q" | "QQ" | "Rationals" | "rationals" => return Ok(Field::Rationals),
            _ => {}
        }
        let digits = t
            .strip_prefix("GF(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix("F_"))
            .or_else(|| t.strip_prefix('F'));
        match digits.and_then(|d| d.parse::<u64>().ok()) {
            Some(p) => Field::prime(p),
            None => Err(Error::Parse(format!("unknown field `{s}`"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Field::Rationals => "Q".to_string(),
            Field::Prime(p) => format!("F{p}"),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => *p,
        }
    }

    /// Canonical representative, `None` when a denominator vanishes mod p.
    pub fn try_reduce(&self, q: Scalar) -> Option<Scalar> {
        match self {
            Field::Rationals => Some(q),
            Field::Prime(p) => {
                if q.is_integer() && !q.is_negative() && q.numer() < &BigInt::from(*p) {
                    return Some(q);
                }
                let p = *p as i64;
                let n = (q.numer() % p).to_i64()?.rem_euclid(p);
                let d = (q.denom() % p).to_i64()?.rem_euclid(p);
                if d == 0 {
                    return None;
                }
                let v = (n as i128 * mod_inv(d, p) as i128).rem_euclid(p as i128) as i64;
                Some(BigRational::from_integer(BigInt::from(v)))
            }
        }
    }

    pub fn reduce(&self, q: Scalar) -> Scalar {
        self.try_reduce(q).expect("denominator divisible by the characteristic")
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        self.reduce(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn one(&self) -> Scalar {
        Scalar::one()
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero()
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(a + b)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(a - b)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(a * b)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.reduce(-a)
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return None;
        }
        match self {
            Field::Rationals => Some(a.recip()),
            Field::Prime(_) => self.try_reduce(a.recip()),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }
}

fn mod_inv(a: i64, p: i64) -> i64 {
    let e = (a as i128).extended_gcd(&(p as i128));
    (e.x.rem_euclid(p as i128)) as i64
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "ℚ"),
            Field::Prime(p) => write!(f, "𝔽_{p}"),
        }
    }
}

pub fn scalar_to_string(c: &Scalar) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverse() {
        let f = Field::prime(101).unwrap();
        let a = f.from_i64(7);
        let b = f.inv(&a).unwrap();
        assert_eq!(f.mul(&a, &b), f.one());
        assert_eq!(f.from_i64(-1), f.from_i64(100));
    }

    #[test]
    fn parse_names() {
        assert_eq!(Field::parse("QQ").unwrap(), Field::Rationals);
        assert_eq!(Field::parse("GF(7)").unwrap(), Field::Prime(7));
        assert_eq!(Field::parse("F_101").unwrap(), Field::Prime(101));
        assert!(Field::parse("F4").is_err());
    }

    #[test]
    fn rational_half_mod_p() {
        let f = Field::Prime(5);
        let h = f.reduce(BigRational::new(1.into(), 2.into()));
        assert_eq!(f.mul(&h, &f.from_i64(2)), f.one());
        assert!(f.try_reduce(BigRational::new(1.into(), 5.into())).is_none());
    }
}
