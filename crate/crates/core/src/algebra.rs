//! Symbolic model of the dense *-algebra spanned by `s_lam u_a s_mu*`.
//!
//! An element is a finite sum of terms `q * s_lam u_a s_mu*` with
//! `s(lam) = s(mu)`, where `a` lives in the cocycle's value group and `q` is
//! an exact scalar.  Products expand over minimal common extensions: with
//! `mu alpha = eta beta` ranging over `MCE(mu, eta)`,
//!
//! ```text
//! (s_lam u_a s_mu*)(s_eta u_b s_zeta*)
//!     = sum u_{a + b + c(eta,beta) - c(mu,alpha) + c(lam,alpha) - c(zeta,beta)}
//!           s_{lam alpha} s_{zeta beta}*
//! ```
//!
//! where the last two twist summands are the composition bookkeeping of
//! `s_lam s_alpha = u_{c(lam,alpha)} s_{lam alpha}`.
//!
//! Twists are handled in one of two modes, decided by the element's value
//! group:
//!
//! * **group mode** (value group matches the cocycle's): twists accumulate
//!   in the symbolic slot `a` and scalars stay Gaussian rational;
//! * **scalar mode** (trivial value group, circle-valued or trivial
//!   cocycle): twists fold into the exact scalar as circle phases, modelling
//!   the circle-twisted algebra directly.
//!
//! Equality of elements is decided by grading and common-level expansion:
//! terms of fixed bidegree are linearly independent (their groupoid supports
//! are disjoint), so expanding both sides to a common left degree yields
//! canonical coordinates.  There is no completion and no norm here; every
//! identity checked is algebraic.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::BigInt;
use serde_json::{json, Value as Json};

use crate::cocycle::{
    character_matches, eval_cocycle, group_from_json, group_to_json, path_from_json, path_to_json,
    Cochain1, Cocycle2, CocycleError,
};
use crate::degree::{DegreeVector, IntVector};
use crate::graph::{GraphError, KGraph, Path};
use crate::scalar::Scalar;
use crate::skeleton::VertexId;
use crate::value::{AbelianValue, Character, ValueError, ValueGroup};

#[derive(Debug, thiserror::Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error("elements belong to different graphs")]
    GraphMismatch,
    #[error("value group mismatch: expected {expected}, got {got}")]
    GroupMismatch { expected: String, got: String },
    #[error("term with left degree {term} cannot be expanded to level {level}")]
    LevelTooLow { term: String, level: String },
    #[error("term violates the source condition: s({0}) != s({1})")]
    SourceCondition(String, String),
    #[error("malformed element data: {0}")]
    Malformed(String),
}

/// The symbolic part of a term: left path, group element, right path.
pub type TermKey = (Path, AbelianValue, Path);

/// A finite sum of terms `q * s_lam u_a s_mu*` in canonical form: identical
/// keys merged, zero coefficients dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    graph_id: u64,
    group: ValueGroup,
    terms: BTreeMap<TermKey, Scalar>,
}

fn insert_term(map: &mut BTreeMap<TermKey, Scalar>, key: TermKey, q: Scalar) {
    let entry = map.entry(key).or_insert_with(Scalar::zero);
    *entry = entry.add(&q);
    if entry.is_zero() {
        // Re-borrow to remove; BTreeMap has no retain-on-entry.
        let key = map
            .iter()
            .find(|(_, v)| v.is_zero())
            .map(|(k, _)| k.clone());
        if let Some(k) = key {
            map.remove(&k);
        }
    }
}

impl AlgebraElement {
    pub fn zero(g: &KGraph, group: ValueGroup) -> AlgebraElement {
        AlgebraElement {
            graph_id: g.id(),
            group,
            terms: BTreeMap::new(),
        }
    }

    /// The single term `q * s_lam u_a s_mu*`.
    pub fn term(
        g: &KGraph,
        lam: Path,
        a: AbelianValue,
        mu: Path,
        q: Scalar,
    ) -> Result<AlgebraElement, AlgebraError> {
        if lam.source() != mu.source() {
            return Err(AlgebraError::SourceCondition(
                lam.display(g),
                mu.display(g),
            ));
        }
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert((lam, a.clone(), mu), q);
        }
        Ok(AlgebraElement {
            graph_id: g.id(),
            group: a.group(),
            terms,
        })
    }

    /// The vertex projection `s_v`.
    pub fn vertex(g: &KGraph, group: ValueGroup, v: VertexId) -> AlgebraElement {
        let id = g.identity(v);
        AlgebraElement::term(g, id.clone(), group.zero(), id, Scalar::one())
            .expect("identities share their source")
    }

    /// The generator `s_lam = s_lam u_0 s_{s(lam)}*`.
    pub fn generator(g: &KGraph, group: ValueGroup, lam: &Path) -> AlgebraElement {
        let id = g.identity(lam.source());
        AlgebraElement::term(g, lam.clone(), group.zero(), id, Scalar::one())
            .expect("s(lam) = s(id)")
    }

    /// The group unitary localised at a vertex: `u_a s_v`.
    pub fn twist_at(g: &KGraph, v: VertexId, a: AbelianValue) -> AlgebraElement {
        let id = g.identity(v);
        AlgebraElement::term(g, id.clone(), a, id, Scalar::one())
            .expect("identities share their source")
    }

    /// The sum of all vertex projections; a unit when the graph is finite.
    pub fn unit(g: &KGraph, group: ValueGroup) -> AlgebraElement {
        let mut out = AlgebraElement::zero(g, group.clone());
        for v in g.vertices() {
            out = out
                .add(&AlgebraElement::vertex(g, group.clone(), v))
                .expect("same group throughout");
        }
        out
    }

    pub fn group(&self) -> ValueGroup {
        self.group.clone()
    }

    pub fn graph_id(&self) -> u64 {
        self.graph_id
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Scalar)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// No terms left after canonicalisation.  (For elements produced by the
    /// algebra operations this coincides with being zero; see `equals` for
    /// the representation-independent test.)
    pub fn is_formally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        if self.graph_id != other.graph_id {
            return Err(AlgebraError::GraphMismatch);
        }
        if self.group != other.group {
            return Err(AlgebraError::GroupMismatch {
                expected: self.group.to_string(),
                got: other.group.to_string(),
            });
        }
        let mut terms = self.terms.clone();
        for (k, q) in &other.terms {
            insert_term(&mut terms, k.clone(), q.clone());
        }
        Ok(AlgebraElement {
            graph_id: self.graph_id,
            group: self.group.clone(),
            terms,
        })
    }

    pub fn neg(&self) -> AlgebraElement {
        AlgebraElement {
            graph_id: self.graph_id,
            group: self.group.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, q)| (k.clone(), q.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &Scalar) -> AlgebraElement {
        let mut terms = BTreeMap::new();
        for (k, p) in &self.terms {
            let scaled = p.mul(q);
            if !scaled.is_zero() {
                terms.insert(k.clone(), scaled);
            }
        }
        AlgebraElement {
            graph_id: self.graph_id,
            group: self.group.clone(),
            terms,
        }
    }
}

/// Whether twists of `c` fold into the scalar coefficient (scalar mode) for
/// elements over `group`, or accumulate symbolically (group mode).
fn twist_mode(group: &ValueGroup, c: &Cocycle2) -> Result<bool, AlgebraError> {
    let cg = c.group();
    if *group == ValueGroup::Trivial
        && matches!(
            cg,
            ValueGroup::Trivial | ValueGroup::CircleTurns | ValueGroup::CircleRadians
        )
    {
        return Ok(true);
    }
    if cg == *group {
        return Ok(false);
    }
    Err(AlgebraError::GroupMismatch {
        expected: group.to_string(),
        got: cg.to_string(),
    })
}

/// The bilinear extension of the MCE term product.
pub fn star_product(
    g: &KGraph,
    c: &Cocycle2,
    x: &AlgebraElement,
    y: &AlgebraElement,
) -> Result<AlgebraElement, AlgebraError> {
    if x.graph_id != g.id() || y.graph_id != g.id() {
        return Err(AlgebraError::GraphMismatch);
    }
    if x.group != y.group {
        return Err(AlgebraError::GroupMismatch {
            expected: x.group.to_string(),
            got: y.group.to_string(),
        });
    }
    let fold = twist_mode(&x.group, c)?;

    let mut terms = BTreeMap::new();
    for ((lam, a, mu), q) in &x.terms {
        for ((eta, b, zeta), p) in &y.terms {
            for xi in g.mce(mu, eta) {
                let (alpha, beta) = g.mce_extensions(mu, eta, &xi)?;
                let twist = eval_cocycle(g, c, eta, &beta)?
                    .sub(&eval_cocycle(g, c, mu, &alpha)?)?
                    .add(&eval_cocycle(g, c, lam, &alpha)?)?
                    .sub(&eval_cocycle(g, c, zeta, &beta)?)?;
                let left = g.compose(lam, &alpha)?;
                let right = g.compose(zeta, &beta)?;
                let coeff = q.mul(p);
                if fold {
                    let phase = Scalar::from_circle(&twist)?;
                    insert_term(
                        &mut terms,
                        (left, AbelianValue::Trivial, right),
                        coeff.mul(&phase),
                    );
                } else {
                    let a_new = a.add(b)?.add(&twist)?;
                    insert_term(&mut terms, (left, a_new, right), coeff);
                }
            }
        }
    }
    Ok(AlgebraElement {
        graph_id: g.id(),
        group: x.group.clone(),
        terms,
    })
}

/// The adjoint: `(q * s_lam u_a s_mu*)* = conj(q) * s_mu u_{-a} s_lam*`.
/// This is independent of the cocycle.
pub fn involution(x: &AlgebraElement) -> AlgebraElement {
    let mut terms = BTreeMap::new();
    for ((lam, a, mu), q) in &x.terms {
        insert_term(&mut terms, (mu.clone(), a.neg(), lam.clone()), q.conj());
    }
    AlgebraElement {
        graph_id: x.graph_id,
        group: x.group.clone(),
        terms,
    }
}

/// Rewrite every term at left degree exactly `level` using the summing
/// relation: `s_lam u_a s_mu* = sum_nu u_{a + c(lam,nu) - c(mu,nu)}
/// s_{lam nu} s_{mu nu}*` over `nu` in `s(lam) Lambda^{level - d(lam)}`.
pub fn expand_to_level(
    g: &KGraph,
    c: &Cocycle2,
    x: &AlgebraElement,
    level: &DegreeVector,
) -> Result<AlgebraElement, AlgebraError> {
    if x.graph_id != g.id() {
        return Err(AlgebraError::GraphMismatch);
    }
    let fold = twist_mode(&x.group, c)?;
    let mut terms = BTreeMap::new();
    for ((lam, a, mu), q) in &x.terms {
        let rest = level.checked_sub(lam.degree()).ok_or_else(|| {
            AlgebraError::LevelTooLow {
                term: lam.degree().to_string(),
                level: level.to_string(),
            }
        })?;
        for nu in g.paths_between(Some(lam.source()), None, &rest) {
            let twist = eval_cocycle(g, c, lam, &nu)?.sub(&eval_cocycle(g, c, mu, &nu)?)?;
            let left = g.compose(lam, &nu)?;
            let right = g.compose(mu, &nu)?;
            if fold {
                let phase = Scalar::from_circle(&twist)?;
                insert_term(
                    &mut terms,
                    (left, AbelianValue::Trivial, right),
                    q.mul(&phase),
                );
            } else {
                insert_term(&mut terms, (left, a.add(&twist)?, right), q.clone());
            }
        }
    }
    Ok(AlgebraElement {
        graph_id: x.graph_id,
        group: x.group.clone(),
        terms,
    })
}

/// Split into graded components by `d(lam) - d(mu)`.
pub fn grading_components(x: &AlgebraElement) -> BTreeMap<IntVector, AlgebraElement> {
    let mut out: BTreeMap<IntVector, AlgebraElement> = BTreeMap::new();
    for ((lam, a, mu), q) in &x.terms {
        let deg = lam.degree().to_lag().sub(&mu.degree().to_lag());
        let piece = out.entry(deg).or_insert_with(|| AlgebraElement {
            graph_id: x.graph_id,
            group: x.group.clone(),
            terms: BTreeMap::new(),
        });
        insert_term(
            &mut piece.terms,
            (lam.clone(), a.clone(), mu.clone()),
            q.clone(),
        );
    }
    out
}

/// Exact equality of algebra elements: the difference is split into graded
/// pieces and each piece is expanded to the join of its left degrees, where
/// fixed-bidegree terms are linearly independent.
pub fn equals(
    g: &KGraph,
    c: &Cocycle2,
    x: &AlgebraElement,
    y: &AlgebraElement,
) -> Result<bool, AlgebraError> {
    let diff = x.sub(y)?;
    for (_, piece) in grading_components(&diff) {
        let mut level = DegreeVector::zero(g.k);
        for ((lam, _, _), _) in &piece.terms {
            level = level.join(lam.degree());
        }
        let expanded = expand_to_level(g, c, &piece, &level)?;
        if !expanded.is_formally_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Apply a character of the value group, folding every group element into
/// the scalar coefficient.  The result lives over the trivial group.
pub fn specialize(
    g: &KGraph,
    x: &AlgebraElement,
    chi: &Character,
) -> Result<AlgebraElement, AlgebraError> {
    if x.graph_id != g.id() {
        return Err(AlgebraError::GraphMismatch);
    }
    if !character_matches(chi, &x.group) {
        return Err(AlgebraError::GroupMismatch {
            expected: x.group.to_string(),
            got: format!("{chi:?}"),
        });
    }
    let mut terms = BTreeMap::new();
    for ((lam, a, mu), q) in &x.terms {
        let phase = Scalar::from_circle(&chi.apply(a)?)?;
        insert_term(
            &mut terms,
            (lam.clone(), AbelianValue::Trivial, mu.clone()),
            q.mul(&phase),
        );
    }
    Ok(AlgebraElement {
        graph_id: x.graph_id,
        group: ValueGroup::Trivial,
        terms,
    })
}

/// The isomorphism between algebras of cohomologous cocycles:
/// `s_lam u_a s_mu* -> s_lam u_{a + b(lam) - b(mu)} s_mu*`, intertwining
/// the product for `c` with the product for `c - delta1(b)`.
pub fn cohomologous_map(
    g: &KGraph,
    x: &AlgebraElement,
    b: &Cochain1,
) -> Result<AlgebraElement, AlgebraError> {
    if b.group() != x.group {
        return Err(AlgebraError::GroupMismatch {
            expected: x.group.to_string(),
            got: b.group().to_string(),
        });
    }
    let mut terms = BTreeMap::new();
    for ((lam, a, mu), q) in &x.terms {
        let shifted = a.add(&b.eval(g, lam)?)?.sub(&b.eval(g, mu)?)?;
        insert_term(&mut terms, (lam.clone(), shifted, mu.clone()), q.clone());
    }
    Ok(AlgebraElement {
        graph_id: x.graph_id,
        group: x.group.clone(),
        terms,
    })
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

fn rational_to_json(q: &BigRational) -> Json {
    Json::String(q.to_string())
}

fn rational_from_json(j: &Json) -> Result<BigRational, AlgebraError> {
    let text = match j {
        Json::String(s) => s.clone(),
        Json::Number(n) => n.to_string(),
        _ => return Err(AlgebraError::Malformed("expected a rational".into())),
    };
    crate::value::parse_rational(&text)
        .ok_or_else(|| AlgebraError::Malformed(format!("bad rational {text:?}")))
}

fn value_to_tagged_json(v: &AbelianValue) -> Json {
    match v {
        AbelianValue::Trivial => json!({ "trivial": true }),
        AbelianValue::FreeAbelian(xs) => json!({
            "vector": xs.iter().map(|x| Json::String(x.to_string())).collect::<Vec<_>>(),
        }),
        AbelianValue::Int(n) => json!({ "int": n.to_string() }),
        AbelianValue::Rat(q) => json!({ "rat": q.to_string() }),
        AbelianValue::CircleTurns(t) => json!({ "turns": t.to_string() }),
        AbelianValue::CircleRadians(r) => json!({ "radians": r.to_string() }),
    }
}

fn value_from_tagged_json(j: &Json) -> Result<AbelianValue, AlgebraError> {
    let obj = j
        .as_object()
        .ok_or_else(|| AlgebraError::Malformed("group value must be an object".into()))?;
    let int_from = |j: &Json| -> Result<BigInt, AlgebraError> {
        let text = match j {
            Json::String(s) => s.clone(),
            Json::Number(n) => n.to_string(),
            _ => return Err(AlgebraError::Malformed("expected an integer".into())),
        };
        text.parse()
            .map_err(|_| AlgebraError::Malformed(format!("bad integer {text:?}")))
    };
    if obj.contains_key("trivial") {
        Ok(AbelianValue::Trivial)
    } else if let Some(xs) = obj.get("vector") {
        let arr = xs
            .as_array()
            .ok_or_else(|| AlgebraError::Malformed("vector must be a list".into()))?;
        Ok(AbelianValue::FreeAbelian(
            arr.iter().map(int_from).collect::<Result<Vec<_>, _>>()?,
        ))
    } else if let Some(n) = obj.get("int") {
        Ok(AbelianValue::Int(int_from(n)?))
    } else if let Some(q) = obj.get("rat") {
        Ok(AbelianValue::Rat(rational_from_json(q)?))
    } else if let Some(t) = obj.get("turns") {
        Ok(AbelianValue::turns(rational_from_json(t)?))
    } else if let Some(r) = obj.get("radians") {
        Ok(AbelianValue::CircleRadians(rational_from_json(r)?))
    } else {
        Err(AlgebraError::Malformed(
            "unknown group value tag".to_string(),
        ))
    }
}

fn scalar_to_json(q: &Scalar) -> serde_json::Map<String, Json> {
    let mut out = serde_json::Map::new();
    if let Some((re, im)) = q.as_gaussian() {
        out.insert("re".into(), rational_to_json(&re));
        out.insert("im".into(), rational_to_json(&im));
    } else {
        let phases: Vec<Json> = q
            .phase_terms()
            .into_iter()
            .map(|(turns, radians, re, im)| {
                json!({
                    "turns": rational_to_json(&turns),
                    "radians": rational_to_json(&radians),
                    "re": rational_to_json(&re),
                    "im": rational_to_json(&im),
                })
            })
            .collect();
        out.insert("phases".into(), Json::Array(phases));
    }
    out
}

fn scalar_from_json(j: &Json) -> Result<Scalar, AlgebraError> {
    if let Some(phases) = j.get("phases") {
        let arr = phases
            .as_array()
            .ok_or_else(|| AlgebraError::Malformed("phases must be a list".into()))?;
        let mut acc = Scalar::zero();
        for p in arr {
            let turns = rational_from_json(
                p.get("turns")
                    .ok_or_else(|| AlgebraError::Malformed("phase needs turns".into()))?,
            )?;
            let radians = rational_from_json(
                p.get("radians")
                    .ok_or_else(|| AlgebraError::Malformed("phase needs radians".into()))?,
            )?;
            let re = rational_from_json(
                p.get("re")
                    .ok_or_else(|| AlgebraError::Malformed("phase needs re".into()))?,
            )?;
            let im = rational_from_json(
                p.get("im")
                    .ok_or_else(|| AlgebraError::Malformed("phase needs im".into()))?,
            )?;
            acc = acc.add(
                &Scalar::gaussian(re, im)
                    .mul(&Scalar::turn(turns))
                    .mul(&Scalar::radian(radians)),
            );
        }
        return Ok(acc);
    }
    let re = rational_from_json(
        j.get("re")
            .ok_or_else(|| AlgebraError::Malformed("term needs re".into()))?,
    )?;
    let im = rational_from_json(
        j.get("im")
            .ok_or_else(|| AlgebraError::Malformed("term needs im".into()))?,
    )?;
    Ok(Scalar::gaussian(re, im))
}

pub fn element_to_json(g: &KGraph, x: &AlgebraElement) -> Json {
    let terms: Vec<Json> = x
        .terms
        .iter()
        .map(|((lam, a, mu), q)| {
            let mut obj = serde_json::Map::new();
            obj.insert("left".into(), path_to_json(g, lam));
            obj.insert("group".into(), value_to_tagged_json(a));
            obj.insert("right".into(), path_to_json(g, mu));
            obj.extend(scalar_to_json(q));
            Json::Object(obj)
        })
        .collect();
    json!({
        "value_group": group_to_json(&x.group),
        "terms": terms,
    })
}

pub fn element_from_json(g: &KGraph, j: &Json) -> Result<AlgebraElement, AlgebraError> {
    let group = match j.get("value_group") {
        Some(gj) => group_from_json(gj)?,
        None => ValueGroup::Trivial,
    };
    let mut out = AlgebraElement::zero(g, group.clone());
    let terms = j
        .get("terms")
        .and_then(Json::as_array)
        .ok_or_else(|| AlgebraError::Malformed("element needs a terms list".into()))?;
    for t in terms {
        let lam = path_from_json(
            g,
            t.get("left")
                .ok_or_else(|| AlgebraError::Malformed("term needs left".into()))?,
        )?;
        let mu = path_from_json(
            g,
            t.get("right")
                .ok_or_else(|| AlgebraError::Malformed("term needs right".into()))?,
        )?;
        let a = match t.get("group") {
            Some(v) => value_from_tagged_json(v)?,
            None => group.zero(),
        };
        if a.group() != group {
            return Err(AlgebraError::GroupMismatch {
                expected: group.to_string(),
                got: a.group().to_string(),
            });
        }
        let q = scalar_from_json(t)?;
        out = out.add(&AlgebraElement::term(g, lam, a, mu, q)?)?;
    }
    Ok(out)
}
