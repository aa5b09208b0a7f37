//! K-theory of the symbolic algebras by exact integer linear algebra.
//!
//! Rank-1 graphs use the vertex matrix directly; rank-2 graphs use the
//! two-term complex built from the commuting colour matrices.  Twists enter
//! only through certificates: an exponential family of a verified
//! real-valued cocycle has the K-theory of the untwisted algebra, carrying
//! vertex classes and the unit across unchanged, and a degree-coboundary
//! graph routes through the AF ladder with `K₁ = 0`.  The reduction output
//! is literally the untwisted presentation, not a recomputation.

use num::{BigInt, BigRational, One, Zero};

use crate::cocycle::{
    degree_coboundary_solve, exponentiate, verify_cocycle, Cocycle2, CocycleError, VerifyOutcome,
};
use crate::degree::{DegreeVector, IntVector};
use crate::graph::KGraph;
use crate::skew::{
    af_stages, build_window, corner_certificate, pullback_cocycle, SkewError, WindowBox,
};
use crate::snf::{cokernel, smith_normal_form, CokernelPresentation, IntMatrix};
use crate::value::{ValueError, ValueGroup};

#[derive(Debug, thiserror::Error)]
pub enum KTheoryError {
    #[error("degree-coboundary certificate missing: {0}")]
    MissingCertificate(String),
    #[error("unsupported twist: {0}")]
    Unsupported(String),
    #[error("cocycle failed verification: {0}")]
    CocycleRejected(String),
    #[error(transparent)]
    Skew(#[from] SkewError),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
    #[error(transparent)]
    Value(#[from] ValueError),
}

/// An element written in the coordinates of an `FgAbelianGroup`
/// presentation: one coordinate per torsion factor (reduced mod that
/// factor), then the free coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub torsion: Vec<BigInt>,
    pub free: Vec<BigInt>,
}

/// A finitely generated abelian group `Z^rank ⊕ Z/d₁ ⊕ …` with `d₁ | d₂ | …`
/// and each `dᵢ ≥ 2`, carrying the distinguished vertex classes and — when
/// the vertex set is finite — the unit class, their sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FgAbelianGroup {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
    pub vertex_classes: Vec<(String, GroupElement)>,
    pub unit_class: Option<GroupElement>,
}

impl FgAbelianGroup {
    pub fn zero() -> FgAbelianGroup {
        FgAbelianGroup {
            rank: 0,
            torsion: Vec::new(),
            vertex_classes: Vec::new(),
            unit_class: None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    /// Add two elements in this presentation, reducing torsion coordinates.
    pub fn add_classes(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        assert_eq!(a.torsion.len(), self.torsion.len());
        assert_eq!(b.torsion.len(), self.torsion.len());
        assert_eq!(a.free.len(), self.rank);
        assert_eq!(b.free.len(), self.rank);
        GroupElement {
            torsion: self
                .torsion
                .iter()
                .zip(a.torsion.iter().zip(&b.torsion))
                .map(|(d, (x, y))| num::Integer::mod_floor(&(x + y), d))
                .collect(),
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
        }
    }
}

/// `1 - Aᵗ` for the colour's vertex matrix `A(v, w) = |vΛ^{e_i}w|`.
fn one_minus_at(g: &KGraph, color: usize) -> IntMatrix {
    let n = g.vertex_count();
    let a = g.adjacency(color);
    IntMatrix::from_fn(n, n, |r, c| {
        let id = if r == c { BigInt::one() } else { BigInt::zero() };
        id - BigInt::from(a[c][r])
    })
}

fn group_from_cokernel(
    g: &KGraph,
    coker: &CokernelPresentation,
    extra_free_rank: usize,
) -> FgAbelianGroup {
    let n = g.vertex_count();
    let class = |x: &[BigInt]| {
        let (torsion, mut free) = coker.class_of(x);
        free.extend(std::iter::repeat(BigInt::zero()).take(extra_free_rank));
        GroupElement { torsion, free }
    };
    let vertex_classes = g
        .vertices()
        .map(|v| {
            let mut e = vec![BigInt::zero(); n];
            e[v.0 as usize] = BigInt::one();
            (g.vertex_name(v).to_string(), class(&e))
        })
        .collect();
    let unit_class = Some(class(&vec![BigInt::one(); n]));
    FgAbelianGroup {
        rank: coker.free_rank + extra_free_rank,
        torsion: coker.torsion.clone(),
        vertex_classes,
        unit_class,
    }
}

/// `K₀ = coker(1 - Aᵗ)`, `K₁ = ker(1 - Aᵗ)` for a rank-1 graph.
pub fn ktheory_rank1(g: &KGraph) -> (FgAbelianGroup, FgAbelianGroup) {
    assert_eq!(g.k, 1, "rank-1 K-theory needs a 1-graph");
    let m = one_minus_at(g, 1);
    let k0 = group_from_cokernel(g, &cokernel(&m), 0);
    let k1 = FgAbelianGroup {
        rank: g.vertex_count() - smith_normal_form(&m).rank,
        ..FgAbelianGroup::zero()
    };
    (k0, k1)
}

/// K-theory of a rank-2 graph from the complex
/// `Z^n --(A₂ᵗ-1, 1-A₁ᵗ)--> Z^2n --(1-A₁ᵗ | 1-A₂ᵗ)--> Z^n`:
/// `K₀ = coker ∂₁ ⊕ ker ∂₂` and `K₁ = ker ∂₁ / im ∂₂`.
pub fn ktheory_rank2(g: &KGraph) -> (FgAbelianGroup, FgAbelianGroup) {
    assert_eq!(g.k, 2, "rank-2 K-theory needs a 2-graph");
    let n = g.vertex_count();
    let m1 = one_minus_at(g, 1);
    let m2 = one_minus_at(g, 2);
    let d1 = m1.hstack(&m2);
    let d2 = m2.scale(-1).vstack(&m1);

    let ker_d2_rank = n - smith_normal_form(&d2).rank;
    let k0 = group_from_cokernel(g, &cokernel(&d1), ker_d2_rank);

    // K₁: write each column of ∂₂ in a lattice basis of ker ∂₁ and take the
    // cokernel of the coordinate matrix.  The kernel basis is a direct
    // summand of the ambient lattice, so the coordinates are integral.
    let s1 = smith_normal_form(&d1);
    let basis = s1.kernel_basis();
    let dim = basis.len();
    let kmat = IntMatrix::from_fn(2 * n, dim, |r, c| basis[c][r].clone());
    let sk = smith_normal_form(&kmat);
    let coords = {
        let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for j in 0..n {
            cols.push(
                sk.solve_z(&d2.column(j))
                    .expect("the image of the second boundary map lies in the kernel"),
            );
        }
        IntMatrix::from_fn(dim, n, |r, c| cols[c][r].clone())
    };
    let coker1 = cokernel(&coords);
    let k1 = FgAbelianGroup {
        rank: coker1.free_rank,
        torsion: coker1.torsion.clone(),
        ..FgAbelianGroup::zero()
    };
    (k0, k1)
}

/// The `K₀` inductive system of an AF ladder, reported in system form; the
/// colimit group is not classified beyond detecting stationarity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AfLimitDescriptor {
    pub stage_blocks: Vec<usize>,
    pub connecting: Vec<Vec<Vec<u64>>>,
    /// The repeated matrix when every connecting map is the same.
    pub stationary: Option<Vec<Vec<u64>>>,
    pub descriptor: String,
    pub kappa_consistent: bool,
    /// AF algebras have trivial odd K-theory.
    pub k1: FgAbelianGroup,
}

fn module_name(n: usize) -> String {
    if n == 1 {
        "Z".to_string()
    } else {
        format!("Z^{n}")
    }
}

fn matrix_name(m: &[Vec<u64>]) -> String {
    if m.len() == 1 && m[0].len() == 1 {
        return m[0][0].to_string();
    }
    let rows: Vec<String> = m
        .iter()
        .map(|row| {
            format!(
                "[{}]",
                row.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
            )
        })
        .collect();
    format!("[{}]", rows.join(","))
}

/// Describe the direct-limit `K₀` data of a degree-coboundary graph.
pub fn af_limit_descriptor(
    g: &KGraph,
    c: &Cocycle2,
    stages: &[DegreeVector],
) -> Result<AfLimitDescriptor, KTheoryError> {
    let report = af_stages(g, c, stages).map_err(|e| match e {
        SkewError::NotDegreeCoboundary(msg) => KTheoryError::MissingCertificate(msg),
        other => KTheoryError::Skew(other),
    })?;
    let stage_blocks: Vec<usize> = report.stages.iter().map(|s| s.blocks.len()).collect();
    let stationary = if !report.connecting.is_empty()
        && report.connecting.iter().all(|m| m == &report.connecting[0])
        && stage_blocks.iter().all(|&b| b == stage_blocks[0])
    {
        Some(report.connecting[0].clone())
    } else {
        None
    };
    let descriptor = match &stationary {
        Some(b) => {
            let z = module_name(stage_blocks[0]);
            format!("colim({z} —{}→ {z})", matrix_name(b))
        }
        None => {
            let mut out = format!("colim({}", module_name(stage_blocks[0]));
            for (t, m) in report.connecting.iter().enumerate() {
                out.push_str(&format!(
                    " —{}→ {}",
                    matrix_name(m),
                    module_name(stage_blocks[t + 1])
                ));
            }
            out.push(')');
            out
        }
    };
    Ok(AfLimitDescriptor {
        stage_blocks,
        connecting: report.connecting,
        stationary,
        descriptor,
        kappa_consistent: report.kappa_consistent,
        k1: FgAbelianGroup::zero(),
    })
}

/// How a twist is presented to the K-theory reduction.
#[derive(Clone, Debug)]
pub enum TwistSpec {
    Untwisted,
    /// The circle family `exp(2πi·t·c)` of an integer- or rational-valued
    /// cocycle, evaluated at rational `t`.
    Exponential { cocycle: Cocycle2, t: BigRational },
    /// The AF route for graphs whose degree map is a vertex coboundary.
    DegreeCoboundary {
        cocycle: Cocycle2,
        stages: Vec<DegreeVector>,
    },
}

/// One named reduction step together with the hypothesis that was actually
/// machine-checked for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateStep {
    pub name: String,
    pub checked: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KTheoryCertificate {
    pub steps: Vec<CertificateStep>,
}

impl KTheoryCertificate {
    fn push(&mut self, name: &str, checked: String) {
        self.steps.push(CertificateStep {
            name: name.to_string(),
            checked,
        });
    }

    pub fn step(&self, name: &str) -> Option<&CertificateStep> {
        self.steps.iter().find(|s| s.name == name)
    }
}

#[derive(Clone, Debug)]
pub struct TwistedKTheory {
    pub k0: Option<FgAbelianGroup>,
    pub k1: Option<FgAbelianGroup>,
    pub af: Option<AfLimitDescriptor>,
    pub unital: bool,
    pub note: Option<String>,
    pub certificate: KTheoryCertificate,
}

fn untwisted_groups(g: &KGraph) -> Option<(FgAbelianGroup, FgAbelianGroup)> {
    match g.k {
        1 => Some(ktheory_rank1(g)),
        2 => Some(ktheory_rank2(g)),
        _ => None,
    }
}

fn require_verified(
    g: &KGraph,
    c: &Cocycle2,
    bound: &DegreeVector,
) -> Result<String, KTheoryError> {
    match verify_cocycle(g, c, bound)? {
        VerifyOutcome::Ok {
            triples_checked,
            certificate,
        } => Ok(certificate
            .unwrap_or_else(|| format!("{triples_checked} composable triples enumerated"))),
        VerifyOutcome::Counterexample {
            lambda, mu, nu, ..
        } => Err(KTheoryError::CocycleRejected(format!(
            "cocycle identity fails on the triple ({}, {}, {})",
            lambda.display(g),
            mu.display(g),
            nu.display(g)
        ))),
    }
}

/// Reduce the K-theory of a twisted algebra to the untwisted computation,
/// emitting the certificate chain with each step's checked hypothesis.
pub fn twisted_ktheory_reduce(
    g: &std::sync::Arc<KGraph>,
    spec: &TwistSpec,
) -> Result<TwistedKTheory, KTheoryError> {
    let bound = DegreeVector::ones(g.k).scale(2);
    let unital = true; // skeleton vertex sets are finite by construction
    let unitality = format!(
        "the algebra is unital exactly when the vertex set is finite: {} vertices",
        g.vertex_count()
    );
    let mut cert = KTheoryCertificate::default();

    match spec {
        TwistSpec::Untwisted => {
            let groups = untwisted_groups(g);
            cert.push(
                "EXP-REDUCTION",
                "trivial twist: the identity reduction".to_string(),
            );
            cert.push("UNITALITY", unitality);
            let note = groups.is_none().then(|| {
                format!("untwisted K-theory not computed for rank {} graphs", g.k)
            });
            let (k0, k1) = groups.map_or((None, None), |(a, b)| (Some(a), Some(b)));
            Ok(TwistedKTheory {
                k0,
                k1,
                af: None,
                unital,
                note,
                certificate: cert,
            })
        }
        TwistSpec::Exponential { cocycle, t } => {
            match cocycle.group() {
                ValueGroup::Int | ValueGroup::Rat => {}
                ValueGroup::FreeAbelian(_) => {
                    return Err(KTheoryError::Unsupported(
                        "free-abelian-valued cocycles need a real lift: compose with a \
                         rational functional before exponentiating"
                            .to_string(),
                    ))
                }
                other => {
                    return Err(KTheoryError::Unsupported(format!(
                        "{other}-valued twist has no supplied real lift: provide the \
                         real-valued cocycle whose exponential it is"
                    )))
                }
            }
            cert.push("VERIFY-COCYCLE", require_verified(g, cocycle, &bound)?);

            // The degree window: the pulled-back twist must be the
            // coboundary of the κ table there, checked split by split.
            let win = build_window(
                g,
                &WindowBox::new(IntVector::zero(g.k), IntVector(vec![2; g.k])),
            )?;
            let pulled = pullback_cocycle(&win, cocycle, &bound)?;
            let stages = [
                DegreeVector::zero(g.k),
                DegreeVector::ones(g.k),
                DegreeVector::ones(g.k).scale(2),
            ];
            let report = af_stages(win.window(), &pulled, &stages)?;
            if !report.kappa_consistent {
                return Err(KTheoryError::CocycleRejected(format!(
                    "the κ recursion disagrees on {} splits over the degree window",
                    report.kappa_failures.len()
                )));
            }
            cert.push(
                "SKEW-COBOUNDARY",
                format!(
                    "on the degree window the pulled-back twist is the coboundary of κ: \
                     recursion checked on all one-block splits of {} paths",
                    report.kappa.len()
                ),
            );

            let corner = corner_certificate(&win);
            cert.push(
                "CORNER-EMBEDDING",
                format!("{}; {}", corner.statement, corner.hypotheses.join("; ")),
            );

            // The parameter family stays a verified circle cocycle along the
            // sampled parameters.
            let half = t / BigRational::from_integer(BigInt::from(2));
            for tt in [t.clone(), half] {
                let e = exponentiate(cocycle, &tt)?;
                require_verified(g, &e, &bound)?;
            }
            cert.push(
                "PV-INDUCTION",
                format!(
                    "crossed-product induction over Z^{}: the exponentials at t and t/2 \
                     re-verify as circle cocycles, so the family is defined for all \
                     parameters",
                    g.k
                ),
            );

            let groups = untwisted_groups(g);
            cert.push(
                "EXP-REDUCTION",
                match &groups {
                    Some((k0, k1)) => format!(
                        "K-theory of the exponential family equals the untwisted groups \
                         K0 = {}, K1 = {}, carrying each vertex class to itself and the \
                         unit class to the unit class",
                        k0.describe(),
                        k1.describe()
                    ),
                    None => format!(
                        "reduction certified for rank {}; untwisted K-theory not \
                         computed at this rank",
                        g.k
                    ),
                },
            );
            cert.push("UNITALITY", unitality);
            let note = groups
                .is_none()
                .then(|| format!("untwisted K-theory not computed for rank {} graphs", g.k));
            let (k0, k1) = groups.map_or((None, None), |(a, b)| (Some(a), Some(b)));
            Ok(TwistedKTheory {
                k0,
                k1,
                af: None,
                unital,
                note,
                certificate: cert,
            })
        }
        TwistSpec::DegreeCoboundary { cocycle, stages } => {
            let grading = degree_coboundary_solve(g).ok_or_else(|| {
                KTheoryError::MissingCertificate(
                    "degree map is not a vertex coboundary on this graph".to_string(),
                )
            })?;
            cert.push(
                "SKEW-COBOUNDARY",
                format!(
                    "vertex grading with b(s(e)) - b(r(e)) = d(e) recovered and checked \
                     on every edge ({} vertices)",
                    grading.len()
                ),
            );
            cert.push("VERIFY-COCYCLE", require_verified(g, cocycle, &bound)?);
            let af = af_limit_descriptor(g, cocycle, stages)?;
            if !af.kappa_consistent {
                return Err(KTheoryError::CocycleRejected(
                    "the κ recursion disagrees with itself along the grading".to_string(),
                ));
            }
            cert.push(
                "AF-ROUTE",
                format!(
                    "the algebra is the direct limit of the finite-dimensional stage \
                     blocks along the grading; K0 system {}, K1 = 0",
                    af.descriptor
                ),
            );
            cert.push("UNITALITY", unitality);
            Ok(TwistedKTheory {
                k0: None,
                k1: Some(FgAbelianGroup::zero()),
                af: Some(af),
                unital,
                note: Some("K0 left in inductive-system form".to_string()),
                certificate: cert,
            })
        }
    }
}
