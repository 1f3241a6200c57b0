//! Exact scalars: rationals with arbitrary-precision numerator/denominator, or
//! residues modulo a prime.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Rationals used for structure constants of categories.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime {0} is too large (at most 2^32 supported)")]
    PrimeTooLarge(u64),
    #[error("denominator of {value} vanishes modulo {prime}")]
    DenominatorVanishes { value: String, prime: u64 },
    #[error("cannot parse coefficient {0:?}")]
    Parse(String),
    #[error("division by zero in coefficient {0:?}")]
    ZeroDenominator(String),
}

/// The ground field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "p")]
pub enum Field {
    /// The rationals.
    Q,
    /// The prime field with the given characteristic.
    Fp(u64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Field, ScalarError> {
        if p > u32::MAX as u64 {
            return Err(ScalarError::PrimeTooLarge(p));
        }
        if !is_prime(p) {
            return Err(ScalarError::NotPrime(p));
        }
        Ok(Field::Fp(p))
    }

    pub fn zero(self) -> Scalar {
        match self {
            Field::Q => Scalar::Q(BigRational::zero()),
            Field::Fp(p) => Scalar::Fp {
                residue: 0,
                prime: p,
            },
        }
    }

    pub fn one(self) -> Scalar {
        match self {
            Field::Q => Scalar::Q(BigRational::one()),
            Field::Fp(p) => Scalar::Fp {
                residue: 1 % p,
                prime: p,
            },
        }
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            Field::Q => Scalar::Q(BigRational::from_integer(BigInt::from(v))),
            Field::Fp(p) => Scalar::Fp {
                residue: v.rem_euclid(p as i64) as u64,
                prime: p,
            },
        }
    }

    /// Image of a rational number in this field.
    pub fn from_rational(self, q: &Rational) -> Result<Scalar, ScalarError> {
        match self {
            Field::Q => Ok(Scalar::Q(q.clone())),
            Field::Fp(p) => {
                let pb = BigInt::from(p);
                let num = q.numer().mod_floor(&pb).to_u64().unwrap_or(0);
                let den = q.denom().mod_floor(&pb).to_u64().unwrap_or(0);
                if den == 0 {
                    return Err(ScalarError::DenominatorVanishes {
                        value: format_rational(q),
                        prime: p,
                    });
                }
                let inv = mod_pow(den, p - 2, p);
                Ok(Scalar::Fp {
                    residue: mul_mod(num, inv, p),
                    prime: p,
                })
            }
        }
    }

    pub fn name(self) -> String {
        match self {
            Field::Q => "Q".to_string(),
            Field::Fp(p) => format!("F_{p}"),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// An exact element of ℚ or of F_p.
///
/// Rationals are kept in lowest terms with positive denominator (guaranteed by
/// `BigRational`); residues lie in `[0, p)`. Mixing scalars from different
/// fields is a programming error and panics.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp { residue: u64, prime: u64 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Q,
            Scalar::Fp { prime, .. } => Field::Fp(*prime),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp { residue, .. } => *residue == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Fp { residue, .. } => *residue == 1,
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Q(q) => Scalar::Q(q.recip()),
            Scalar::Fp { residue, prime } => Scalar::Fp {
                residue: mod_pow(*residue, prime - 2, *prime),
                prime: *prime,
            },
        })
    }

    /// Numerator and denominator of the canonical representative. Residues are
    /// reported with denominator 1.
    pub fn to_fraction(&self) -> (BigInt, BigInt) {
        match self {
            Scalar::Q(q) => (q.numer().clone(), q.denom().clone()),
            Scalar::Fp { residue, .. } => (BigInt::from(*residue), BigInt::one()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => f.write_str(&format_rational(q)),
            Scalar::Fp { residue, .. } => write!(f, "{residue}"),
        }
    }
}

fn same_field(a: &Scalar, b: &Scalar) -> u64 {
    match (a, b) {
        (Scalar::Fp { prime: p, .. }, Scalar::Fp { prime: q, .. }) if p == q => *p,
        _ => panic!("scalar field mismatch: {} vs {}", a.field(), b.field()),
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            _ => {
                let p = same_field(self, rhs);
                let (Scalar::Fp { residue: a, .. }, Scalar::Fp { residue: b, .. }) = (self, rhs)
                else {
                    unreachable!()
                };
                Scalar::Fp {
                    residue: (a + b) % p,
                    prime: p,
                }
            }
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            _ => {
                let p = same_field(self, rhs);
                let (Scalar::Fp { residue: a, .. }, Scalar::Fp { residue: b, .. }) = (self, rhs)
                else {
                    unreachable!()
                };
                Scalar::Fp {
                    residue: mul_mod(*a, *b, p),
                    prime: p,
                }
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp { residue, prime } => Scalar::Fp {
                residue: (prime - residue) % prime,
                prime: *prime,
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

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

pub fn is_prime(p: u64) -> bool {
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

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// `"p/q"`, or `"p"` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p/q"` or an integer.
pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let s = s.trim();
    let bad = || ScalarError::Parse(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(ScalarError::ZeroDenominator(s.to_string()));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

pub fn rational(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// `(-1)^e` as a rational.
pub fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

pub fn is_negative(q: &Rational) -> bool {
    q.is_negative()
}
