//! Coefficient groups for cocycles and the characters that map them into the
//! circle.
//!
//! Circle elements are kept exact in one of two incompatible coordinates:
//! `CircleTurns(t)` is the point `e^{2 pi i t}` with `t` a rational number of
//! full turns, reduced mod 1, and `CircleRadians(r)` is `e^{i r}` with `r`
//! rational.  A nonzero rational number of radians is never a rational number
//! of turns (pi is irrational), so the two coordinates only meet at the
//! identity and there is no canonical form that merges them; mixing them in
//! one sum is reported as a mismatch.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ValueError {
    #[error("value group mismatch: expected {expected}, got {got}")]
    Mismatch { expected: String, got: String },
    #[error("cannot parse {text:?} as an element of {group}")]
    Parse { group: String, text: String },
    #[error("character does not apply to {0}")]
    CharacterDomain(String),
}

/// The abelian group a cocycle takes values in.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueGroup {
    /// One-element group; the untwisted case.
    Trivial,
    /// Free abelian group of the given rank, written additively.
    FreeAbelian(usize),
    Int,
    Rat,
    /// Circle group parametrised by rational turns in `[0,1)`.
    CircleTurns,
    /// Circle group parametrised by rational radians.
    CircleRadians,
}

impl fmt::Display for ValueGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueGroup::Trivial => write!(f, "0"),
            ValueGroup::FreeAbelian(m) => write!(f, "Z^{m}"),
            ValueGroup::Int => write!(f, "Z"),
            ValueGroup::Rat => write!(f, "Q"),
            ValueGroup::CircleTurns => write!(f, "T(turns)"),
            ValueGroup::CircleRadians => write!(f, "T(radians)"),
        }
    }
}

impl ValueGroup {
    pub fn parse_name(name: &str) -> Option<ValueGroup> {
        match name {
            "0" | "trivial" => Some(ValueGroup::Trivial),
            "Z" | "int" => Some(ValueGroup::Int),
            "Q" | "rat" => Some(ValueGroup::Rat),
            "turns" | "T(turns)" => Some(ValueGroup::CircleTurns),
            "radians" | "T(radians)" => Some(ValueGroup::CircleRadians),
            _ => {
                let rank = name.strip_prefix("Z^")?.parse().ok()?;
                Some(ValueGroup::FreeAbelian(rank))
            }
        }
    }

    pub fn zero(&self) -> AbelianValue {
        match self {
            ValueGroup::Trivial => AbelianValue::Trivial,
            ValueGroup::FreeAbelian(m) => AbelianValue::FreeAbelian(vec![BigInt::zero(); *m]),
            ValueGroup::Int => AbelianValue::Int(BigInt::zero()),
            ValueGroup::Rat => AbelianValue::Rat(BigRational::zero()),
            ValueGroup::CircleTurns => AbelianValue::CircleTurns(BigRational::zero()),
            ValueGroup::CircleRadians => AbelianValue::CircleRadians(BigRational::zero()),
        }
    }

    /// Parse one element.  Integers and rationals use the usual `p/q` form,
    /// free abelian vectors a comma list with optional parentheses.
    pub fn parse(&self, text: &str) -> Result<AbelianValue, ValueError> {
        let err = || ValueError::Parse {
            group: self.to_string(),
            text: text.to_string(),
        };
        let t = text.trim();
        match self {
            ValueGroup::Trivial => {
                if t == "0" || t.is_empty() {
                    Ok(AbelianValue::Trivial)
                } else {
                    Err(err())
                }
            }
            ValueGroup::FreeAbelian(m) => {
                let inner = t
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .unwrap_or(t);
                let parts: Vec<&str> = if inner.trim().is_empty() {
                    Vec::new()
                } else {
                    inner.split(',').collect()
                };
                if parts.len() != *m {
                    return Err(err());
                }
                let mut out = Vec::with_capacity(*m);
                for p in parts {
                    out.push(BigInt::from_str(p.trim()).map_err(|_| err())?);
                }
                Ok(AbelianValue::FreeAbelian(out))
            }
            ValueGroup::Int => Ok(AbelianValue::Int(BigInt::from_str(t).map_err(|_| err())?)),
            ValueGroup::Rat => Ok(AbelianValue::Rat(parse_rational(t).ok_or_else(err)?)),
            ValueGroup::CircleTurns => Ok(AbelianValue::turns(parse_rational(t).ok_or_else(err)?)),
            ValueGroup::CircleRadians => {
                Ok(AbelianValue::CircleRadians(parse_rational(t).ok_or_else(err)?))
            }
        }
    }
}

pub fn parse_rational(t: &str) -> Option<BigRational> {
    let t = t.trim();
    if let Some((num, den)) = t.split_once('/') {
        let n = BigInt::from_str(num.trim()).ok()?;
        let d = BigInt::from_str(den.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        Some(BigRational::from_integer(BigInt::from_str(t).ok()?))
    }
}

/// Reduce a rational mod 1 into `[0, 1)`.
pub fn reduce_mod_one(t: &BigRational) -> BigRational {
    t - t.floor()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AbelianValue {
    Trivial,
    FreeAbelian(Vec<BigInt>),
    Int(BigInt),
    Rat(BigRational),
    CircleTurns(BigRational),
    CircleRadians(BigRational),
}

impl AbelianValue {
    pub fn group(&self) -> ValueGroup {
        match self {
            AbelianValue::Trivial => ValueGroup::Trivial,
            AbelianValue::FreeAbelian(v) => ValueGroup::FreeAbelian(v.len()),
            AbelianValue::Int(_) => ValueGroup::Int,
            AbelianValue::Rat(_) => ValueGroup::Rat,
            AbelianValue::CircleTurns(_) => ValueGroup::CircleTurns,
            AbelianValue::CircleRadians(_) => ValueGroup::CircleRadians,
        }
    }

    pub fn turns(t: BigRational) -> AbelianValue {
        AbelianValue::CircleTurns(reduce_mod_one(&t))
    }

    pub fn int(n: i64) -> AbelianValue {
        AbelianValue::Int(BigInt::from(n))
    }

    pub fn vector(entries: &[i64]) -> AbelianValue {
        AbelianValue::FreeAbelian(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn rational(num: i64, den: i64) -> AbelianValue {
        AbelianValue::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            AbelianValue::Trivial => true,
            AbelianValue::FreeAbelian(v) => v.iter().all(BigInt::is_zero),
            AbelianValue::Int(n) => n.is_zero(),
            AbelianValue::Rat(q) => q.is_zero(),
            AbelianValue::CircleTurns(t) => t.is_zero(),
            // e^{ir} = 1 for rational r only at r = 0
            AbelianValue::CircleRadians(r) => r.is_zero(),
        }
    }

    pub fn add(&self, other: &AbelianValue) -> Result<AbelianValue, ValueError> {
        let mismatch = || ValueError::Mismatch {
            expected: self.group().to_string(),
            got: other.group().to_string(),
        };
        match (self, other) {
            (AbelianValue::Trivial, AbelianValue::Trivial) => Ok(AbelianValue::Trivial),
            (AbelianValue::FreeAbelian(a), AbelianValue::FreeAbelian(b)) => {
                if a.len() != b.len() {
                    return Err(mismatch());
                }
                Ok(AbelianValue::FreeAbelian(
                    a.iter().zip(b).map(|(x, y)| x + y).collect(),
                ))
            }
            (AbelianValue::Int(a), AbelianValue::Int(b)) => Ok(AbelianValue::Int(a + b)),
            (AbelianValue::Rat(a), AbelianValue::Rat(b)) => Ok(AbelianValue::Rat(a + b)),
            (AbelianValue::CircleTurns(a), AbelianValue::CircleTurns(b)) => {
                Ok(AbelianValue::turns(a + b))
            }
            (AbelianValue::CircleRadians(a), AbelianValue::CircleRadians(b)) => {
                Ok(AbelianValue::CircleRadians(a + b))
            }
            _ => Err(mismatch()),
        }
    }

    pub fn neg(&self) -> AbelianValue {
        match self {
            AbelianValue::Trivial => AbelianValue::Trivial,
            AbelianValue::FreeAbelian(v) => {
                AbelianValue::FreeAbelian(v.iter().map(|x| -x).collect())
            }
            AbelianValue::Int(n) => AbelianValue::Int(-n),
            AbelianValue::Rat(q) => AbelianValue::Rat(-q),
            AbelianValue::CircleTurns(t) => AbelianValue::turns(-t),
            AbelianValue::CircleRadians(r) => AbelianValue::CircleRadians(-r),
        }
    }

    pub fn sub(&self, other: &AbelianValue) -> Result<AbelianValue, ValueError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, n: &BigInt) -> AbelianValue {
        match self {
            AbelianValue::Trivial => AbelianValue::Trivial,
            AbelianValue::FreeAbelian(v) => {
                AbelianValue::FreeAbelian(v.iter().map(|x| x * n).collect())
            }
            AbelianValue::Int(m) => AbelianValue::Int(m * n),
            AbelianValue::Rat(q) => AbelianValue::Rat(q * BigRational::from_integer(n.clone())),
            AbelianValue::CircleTurns(t) => {
                AbelianValue::turns(t * BigRational::from_integer(n.clone()))
            }
            AbelianValue::CircleRadians(r) => {
                AbelianValue::CircleRadians(r * BigRational::from_integer(n.clone()))
            }
        }
    }
}

fn fmt_rational(q: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for AbelianValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbelianValue::Trivial => write!(f, "0"),
            AbelianValue::FreeAbelian(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            AbelianValue::Int(n) => write!(f, "{n}"),
            AbelianValue::Rat(q) | AbelianValue::CircleTurns(q) | AbelianValue::CircleRadians(q) => {
                fmt_rational(q, f)
            }
        }
    }
}

/// A character of the value group with circle values, kept exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Character {
    /// On `Z^m`: `a -> e^{2 pi i <theta, a>}`.
    Torus(Vec<BigRational>),
    /// On `Z`: `n -> e^{2 pi i theta n}`.
    IntTurns(BigRational),
    /// On `Q` or `Z`: `x -> e^{i t x}`, i.e. the exponential at `t` radians.
    Real(BigRational),
}

impl Character {
    pub fn torus(entries: &[(i64, i64)]) -> Character {
        Character::Torus(
            entries
                .iter()
                .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
                .collect(),
        )
    }

    /// Map a value into the circle.  Circle-valued inputs pass through
    /// unchanged and the trivial value goes to the identity.
    pub fn apply(&self, v: &AbelianValue) -> Result<AbelianValue, ValueError> {
        match (self, v) {
            (_, AbelianValue::Trivial) => Ok(AbelianValue::CircleTurns(BigRational::zero())),
            (_, AbelianValue::CircleTurns(_)) | (_, AbelianValue::CircleRadians(_)) => {
                Ok(v.clone())
            }
            (Character::Torus(theta), AbelianValue::FreeAbelian(a)) if theta.len() == a.len() => {
                let mut sum = BigRational::zero();
                for (t, x) in theta.iter().zip(a) {
                    sum += t * BigRational::from_integer(x.clone());
                }
                Ok(AbelianValue::turns(sum))
            }
            (Character::Torus(theta), AbelianValue::Int(n)) if theta.len() == 1 => {
                Ok(AbelianValue::turns(
                    &theta[0] * BigRational::from_integer(n.clone()),
                ))
            }
            (Character::IntTurns(theta), AbelianValue::Int(n)) => Ok(AbelianValue::turns(
                theta * BigRational::from_integer(n.clone()),
            )),
            (Character::IntTurns(theta), AbelianValue::FreeAbelian(a)) if a.len() == 1 => Ok(
                AbelianValue::turns(theta * BigRational::from_integer(a[0].clone())),
            ),
            (Character::Real(t), AbelianValue::Rat(x)) => {
                Ok(AbelianValue::CircleRadians(t * x))
            }
            (Character::Real(t), AbelianValue::Int(n)) => Ok(AbelianValue::CircleRadians(
                t * BigRational::from_integer(n.clone()),
            )),
            _ => Err(ValueError::CharacterDomain(format!(
                "{self:?} on {}",
                v.group()
            ))),
        }
    }
}
