//! Multidegrees in `N^k` and lags in `Z^k`.
//!
//! A `DegreeVector` records how many edges of each colour a path uses.  The
//! componentwise partial order, join and meet drive factorisation, minimal
//! common extensions and truncation bounds throughout the crate, so they are
//! spelled out as named methods; the derived `Ord` is only a canonical total
//! order used for deterministic map keys and must never be confused with the
//! componentwise order.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DegreeVector(pub Vec<u32>);

impl DegreeVector {
    pub fn zero(k: usize) -> Self {
        DegreeVector(vec![0; k])
    }

    /// The all-ones degree, one step in every colour.
    pub fn ones(k: usize) -> Self {
        DegreeVector(vec![1; k])
    }

    /// Standard basis vector for `color` (1-based).
    pub fn unit(k: usize, color: usize) -> Self {
        let mut v = vec![0; k];
        v[color - 1] = 1;
        DegreeVector(v)
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    pub fn get(&self, color: usize) -> u32 {
        self.0[color - 1]
    }

    /// Componentwise order: `self <= other` in every colour.
    pub fn leq(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &Self) -> Self {
        DegreeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference, defined only when `other.leq(self)`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if !other.leq(self) {
            return None;
        }
        Some(DegreeVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// Componentwise maximum.
    pub fn join(&self, other: &Self) -> Self {
        DegreeVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// Componentwise minimum.
    pub fn meet(&self, other: &Self) -> Self {
        DegreeVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.min(b))
                .collect(),
        )
    }

    pub fn scale(&self, n: u32) -> Self {
        DegreeVector(self.0.iter().map(|&x| x * n).collect())
    }

    /// Every degree `m` with `m.leq(bound)`, in canonical (lexicographic) order.
    pub fn box_below(bound: &Self) -> Vec<DegreeVector> {
        let mut out = vec![DegreeVector::zero(bound.k())];
        for i in 0..bound.k() {
            let mut next = Vec::new();
            for d in &out {
                for c in 0..=bound.0[i] {
                    let mut v = d.0.clone();
                    v[i] = c;
                    next.push(DegreeVector(v));
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    pub fn to_lag(&self) -> IntVector {
        IntVector(self.0.iter().map(|&x| x as i64).collect())
    }
}

impl fmt::Debug for DegreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for DegreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// An element of `Z^k`: degree lags of groupoid words and window offsets.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntVector(pub Vec<i64>);

impl IntVector {
    pub fn zero(k: usize) -> Self {
        IntVector(vec![0; k])
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        IntVector(self.0.iter().map(|x| -x).collect())
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Debug for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
