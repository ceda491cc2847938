//! Exact scalars: arbitrary-precision rationals or residues modulo a prime.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Coeff {
    Rational,
    Prime(u64),
}

impl Coeff {
    /// Prime field `F_p`. Rejects composite or tiny moduli.
    pub fn prime(p: u64) -> Result<Coeff> {
        if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        Ok(Coeff::Prime(p))
    }

    pub fn two_invertible(self) -> bool {
        self != Coeff::Prime(2)
    }

    /// Fails with [`Error::TwoNotInvertible`] in characteristic 2.
    pub fn require_two_invertible(self) -> Result<()> {
        if self.two_invertible() {
            Ok(())
        } else {
            Err(Error::TwoNotInvertible(self.to_string()))
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Rational => write!(f, "Q"),
            Coeff::Prime(p) => write!(f, "F{p}"),
        }
    }
}

/// An element of `Q` or of `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp { v: u64, p: u64 },
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

fn residue(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

impl Scalar {
    pub fn zero(c: Coeff) -> Scalar {
        Scalar::from_i64(c, 0)
    }

    pub fn one(c: Coeff) -> Scalar {
        Scalar::from_i64(c, 1)
    }

    pub fn from_i64(c: Coeff, x: i64) -> Scalar {
        match c {
            Coeff::Rational => Scalar::Q(BigRational::from_integer(BigInt::from(x))),
            Coeff::Prime(p) => Scalar::Fp { v: residue(x, p), p },
        }
    }

    /// `num/den`; fails when `den` vanishes in the field.
    pub fn from_ratio(c: Coeff, num: i64, den: i64) -> Result<Scalar> {
        let d = Scalar::from_i64(c, den);
        if d.is_zero() {
            return Err(match c {
                Coeff::Prime(2) if den % 2 == 0 => Error::TwoNotInvertible(c.to_string()),
                _ => Error::InvalidParameter(format!("division by {den} in {c}")),
            });
        }
        Ok(Scalar::from_i64(c, num).mul_ref(&d.inv()))
    }

    pub fn from_big(c: Coeff, q: &BigRational) -> Result<Scalar> {
        match c {
            Coeff::Rational => Ok(Scalar::Q(q.clone())),
            Coeff::Prime(p) => {
                let pb = BigInt::from(p);
                let reduce = |x: &BigInt| -> u64 {
                    let r = ((x % &pb) + &pb) % &pb;
                    r.to_u64().expect("residue fits")
                };
                let den = reduce(q.denom());
                if den == 0 {
                    return Err(Error::InvalidParameter(format!(
                        "denominator {} vanishes in {c}",
                        q.denom()
                    )));
                }
                let v = reduce(q.numer());
                Ok(Scalar::Fp { v: ((v as u128 * mod_pow(den, p - 2, p) as u128) % p as u128) as u64, p })
            }
        }
    }

    pub fn coeff(&self) -> Coeff {
        match self {
            Scalar::Q(_) => Coeff::Rational,
            Scalar::Fp { p, .. } => Coeff::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    fn check(&self, other: &Scalar) {
        assert_eq!(self.coeff(), other.coeff(), "scalar coefficient modes differ");
    }

    pub fn add_ref(&self, o: &Scalar) -> Scalar {
        self.check(o);
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, .. }) => Scalar::Fp { v: (a + b) % p, p: *p },
            _ => unreachable!(),
        }
    }

    pub fn sub_ref(&self, o: &Scalar) -> Scalar {
        self.add_ref(&o.neg_ref())
    }

    pub fn mul_ref(&self, o: &Scalar) -> Scalar {
        self.check(o);
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, .. }) => Scalar::Fp {
                v: ((*a as u128 * *b as u128) % *p as u128) as u64,
                p: *p,
            },
            _ => unreachable!(),
        }
    }

    pub fn neg_ref(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp { v, p } => Scalar::Fp { v: (p - v) % p, p: *p },
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Scalar::Q(a) => Scalar::Q(a.recip()),
            Scalar::Fp { v, p } => Scalar::Fp { v: mod_pow(*v, p - 2, *p), p: *p },
        }
    }

    pub fn scale_i64(&self, k: i64) -> Scalar {
        self.mul_ref(&Scalar::from_i64(self.coeff(), k))
    }

    /// Signed integer representative: the rational itself if integral, or
    /// the residue in `(-p/2, p/2]`.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Q(a) if a.is_integer() => a.to_integer().to_i64(),
            Scalar::Q(_) => None,
            Scalar::Fp { v, p } => Some(if *v > p / 2 { *v as i64 - *p as i64 } else { *v as i64 }),
        }
    }

    /// Sign used for printing: negative rationals, and residues above `p/2`.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Q(a) => a.is_negative(),
            Scalar::Fp { v, p } => *v > p / 2,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(a) => write!(f, "{a}"),
            Scalar::Fp { .. } => write!(f, "{}", self.to_i64().unwrap()),
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        self.add_ref(&o)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        *self = self.add_ref(o);
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        self.sub_ref(&o)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        self.mul_ref(&o)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}
