//! Exact computational models for finite higher-rank graphs: path calculus,
//! abelian-valued 2-cocycles, twisted Cuntz–Krieger relations in symbolic
//! form, truncated groupoid convolution, skew products, structural criteria
//! for simplicity and pure infiniteness, and Smith-form K-theory.
//!
//! Everything that can be exact is exact: path combinatorics over explicit
//! finite presentations, cocycle values in finitely generated abelian groups,
//! circle values as rational turns or rational radians, and scalars in polar
//! form over the rationals.  Floating point only enters the numeric groupoid
//! probes, and those carry explicit tolerances.

pub mod algebra;
pub mod catalog;
pub mod cocycle;
pub mod degree;
pub mod graph;
pub mod groupoid;
pub mod skew;
pub mod structure;
pub mod ktheory;
pub mod scalar;
pub mod skeleton;
pub mod snf;
pub mod value;
