//! Exact complex scalars for twisted products.
//!
//! A scalar is a formal sum of terms `(a + b i) * e^{2 pi i t} * e^{i r}`
//! with `a, b, t, r` rational.  Quarter turns are absorbed into the Gaussian
//! coefficient, so each phase is stored with `t` in `[0, 1/4)`; zero
//! coefficients are pruned.  On single terms this canonical form is faithful:
//! two distinct canonical terms are distinct complex numbers (a Gaussian
//! rational on the unit circle that is a root of unity must be a power of
//! `i`, and `e^{i r}` with `r` rational nonzero is transcendental, hence
//! never a rational turn).  Sums are compared formally, term by term.  That
//! is exactly what twisted-product identities need, because both sides of
//! such an identity combine the same phases additively; it deliberately does
//! not recognise accidental vanishing sums such as `1 + e(1/3) + e(2/3)`,
//! which never arise from the rewriting rules.  Numeric probes convert
//! through [`Scalar::to_complex`] with ordinary floating point.

use crate::value::{AbelianValue, ValueError};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Phase {
    /// Rational turns in `[0, 1/4)`.
    turns: BigRational,
    /// Rational radians, unreduced (no rational multiple of `2 pi` is
    /// rational except zero).
    radians: BigRational,
}

type Gaussian = (BigRational, BigRational);

fn gaussian_mul(a: &Gaussian, b: &Gaussian) -> Gaussian {
    (
        &a.0 * &b.0 - &a.1 * &b.1,
        &a.0 * &b.1 + &a.1 * &b.0,
    )
}

/// Multiply by `i^q` for `q` in `0..4`.
fn gaussian_quarter(g: Gaussian, q: u32) -> Gaussian {
    match q % 4 {
        0 => g,
        1 => (-g.1, g.0),
        2 => (-g.0, -g.1),
        _ => (g.1, -g.0),
    }
}

/// Split a rational number of turns into a canonical phase in `[0, 1/4)` and
/// the number of quarter turns to absorb.
fn canonical_turns(t: &BigRational) -> (BigRational, u32) {
    let reduced = t - t.floor();
    let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
    let q = (&reduced / &quarter).floor();
    let q_u32 = q.to_integer().to_u32().expect("0..=3");
    (reduced - q * quarter, q_u32)
}

#[derive(Clone, PartialEq, Eq)]
pub struct Scalar(BTreeMap<Phase, Gaussian>);

impl Scalar {
    fn normalized(mut map: BTreeMap<Phase, Gaussian>) -> Scalar {
        map.retain(|_, g| !(g.0.is_zero() && g.1.is_zero()));
        Scalar(map)
    }

    fn term(phase: Phase, g: Gaussian) -> Scalar {
        Scalar::normalized(BTreeMap::from([(phase, g)]))
    }

    pub fn zero() -> Scalar {
        Scalar(BTreeMap::new())
    }

    pub fn one() -> Scalar {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(q: BigRational) -> Scalar {
        Scalar::term(
            Phase {
                turns: BigRational::zero(),
                radians: BigRational::zero(),
            },
            (q, BigRational::zero()),
        )
    }

    pub fn gaussian(re: BigRational, im: BigRational) -> Scalar {
        Scalar::term(
            Phase {
                turns: BigRational::zero(),
                radians: BigRational::zero(),
            },
            (re, im),
        )
    }

    /// `e^{2 pi i t}`.
    pub fn turn(t: BigRational) -> Scalar {
        let (turns, q) = canonical_turns(&t);
        Scalar::term(
            Phase {
                turns,
                radians: BigRational::zero(),
            },
            gaussian_quarter((BigRational::one(), BigRational::zero()), q),
        )
    }

    /// `e^{i r}`.
    pub fn radian(r: BigRational) -> Scalar {
        Scalar::term(
            Phase {
                turns: BigRational::zero(),
                radians: r,
            },
            (BigRational::one(), BigRational::zero()),
        )
    }

    /// Interpret a circle-group element (or the trivial value) as a scalar.
    pub fn from_circle(v: &AbelianValue) -> Result<Scalar, ValueError> {
        match v {
            AbelianValue::Trivial => Ok(Scalar::one()),
            AbelianValue::CircleTurns(t) => Ok(Scalar::turn(t.clone())),
            AbelianValue::CircleRadians(r) => Ok(Scalar::radian(r.clone())),
            other => Err(ValueError::Mismatch {
                expected: "a circle group".into(),
                got: other.group().to_string(),
            }),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        let mut map = self.0.clone();
        for (p, g) in &other.0 {
            let entry = map
                .entry(p.clone())
                .or_insert_with(|| (BigRational::zero(), BigRational::zero()));
            entry.0 += &g.0;
            entry.1 += &g.1;
        }
        Scalar::normalized(map)
    }

    pub fn neg(&self) -> Scalar {
        Scalar(
            self.0
                .iter()
                .map(|(p, g)| (p.clone(), (-&g.0, -&g.1)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        let mut map: BTreeMap<Phase, Gaussian> = BTreeMap::new();
        for (p1, g1) in &self.0 {
            for (p2, g2) in &other.0 {
                let (turns, q) = canonical_turns(&(&p1.turns + &p2.turns));
                let phase = Phase {
                    turns,
                    radians: &p1.radians + &p2.radians,
                };
                let g = gaussian_quarter(gaussian_mul(g1, g2), q);
                let entry = map
                    .entry(phase)
                    .or_insert_with(|| (BigRational::zero(), BigRational::zero()));
                entry.0 += g.0;
                entry.1 += g.1;
            }
        }
        Scalar::normalized(map)
    }

    pub fn conj(&self) -> Scalar {
        let mut map: BTreeMap<Phase, Gaussian> = BTreeMap::new();
        for (p, g) in &self.0 {
            let conj_g = (g.0.clone(), -&g.1);
            let (turns, extra) = if p.turns.is_zero() {
                (BigRational::zero(), 0)
            } else {
                // conj e^{2 pi i t} = e^{2 pi i (1/4 - t)} * i^3
                (
                    BigRational::new(BigInt::from(1), BigInt::from(4)) - &p.turns,
                    3,
                )
            };
            let phase = Phase {
                turns,
                radians: -&p.radians,
            };
            let g = gaussian_quarter(conj_g, extra);
            let entry = map
                .entry(phase)
                .or_insert_with(|| (BigRational::zero(), BigRational::zero()));
            entry.0 += g.0;
            entry.1 += g.1;
        }
        Scalar::normalized(map)
    }

    pub fn scale(&self, q: &BigRational) -> Scalar {
        if q.is_zero() {
            return Scalar::zero();
        }
        Scalar(
            self.0
                .iter()
                .map(|(p, g)| (p.clone(), (&g.0 * q, &g.1 * q)))
                .collect(),
        )
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (p, g) in &self.0 {
            let angle = 2.0 * std::f64::consts::PI * p.turns.to_f64().unwrap()
                + p.radians.to_f64().unwrap();
            let (c, s) = (angle.cos(), angle.sin());
            let (a, b) = (g.0.to_f64().unwrap(), g.1.to_f64().unwrap());
            re += a * c - b * s;
            im += a * s + b * c;
        }
        (re, im)
    }

    pub fn abs(&self) -> f64 {
        let (re, im) = self.to_complex();
        re.hypot(im)
    }

    /// Number of formal terms (0 for the zero scalar).
    pub fn term_count(&self) -> usize {
        self.0.len()
    }

    /// The Gaussian-rational value when no transcendental phase is present:
    /// `Some((re, im))` iff the scalar equals `re + i*im` exactly.
    pub fn as_gaussian(&self) -> Option<(BigRational, BigRational)> {
        match self.0.len() {
            0 => Some((BigRational::zero(), BigRational::zero())),
            1 => {
                let (p, g) = self.0.iter().next().unwrap();
                if p.turns.is_zero() && p.radians.is_zero() {
                    Some(g.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// The formal terms as `(turns, radians, re, im)`: the scalar is
    /// `sum (re + i*im) * e^{2 pi i turns} * e^{i radians}`.
    pub fn phase_terms(&self) -> Vec<(BigRational, BigRational, BigRational, BigRational)> {
        self.0
            .iter()
            .map(|(p, g)| {
                (
                    p.turns.clone(),
                    p.radians.clone(),
                    g.0.clone(),
                    g.1.clone(),
                )
            })
            .collect()
    }
}

fn fmt_gaussian(g: &Gaussian, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let fmt_rat = |q: &BigRational| {
        if q.denom().is_one() {
            format!("{}", q.numer())
        } else {
            format!("{}/{}", q.numer(), q.denom())
        }
    };
    if g.1.is_zero() {
        write!(f, "{}", fmt_rat(&g.0))
    } else if g.0.is_zero() {
        if g.1.is_one() {
            write!(f, "i")
        } else if (-&g.1).is_one() {
            write!(f, "-i")
        } else {
            write!(f, "{}i", fmt_rat(&g.1))
        }
    } else {
        let sign = if g.1.is_negative() { "-" } else { "+" };
        write!(f, "({}{}{}i)", fmt_rat(&g.0), sign, fmt_rat(&g.1.abs()))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, g)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            fmt_gaussian(g, f)?;
            if !p.turns.is_zero() {
                write!(f, "*e({}/{})", p.turns.numer(), p.turns.denom())?;
            }
            if !p.radians.is_zero() {
                if p.radians.denom().is_one() {
                    write!(f, "*exp(i*{})", p.radians.numer())?;
                } else {
                    write!(f, "*exp(i*{}/{})", p.radians.numer(), p.radians.denom())?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
