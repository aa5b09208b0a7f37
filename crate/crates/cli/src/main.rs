//! `kgl` — command-line front end for the exact higher-rank graph toolkit.
//!
//! Every subcommand reads a skeleton (from a JSON file or the built-in
//! catalog), runs one of the library's exact procedures, and prints a single
//! JSON document (or CSV, for `field-probe`) on stdout.  Output is
//! deterministic: object keys are sorted and all arithmetic is exact until
//! the final formatting step.
//!
//! Exit codes: `0` success, `1` domain error (with a machine-readable
//! `{"error": ...}` document on stdout), `2` usage error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num::rational::BigRational;
use num::{BigInt, One, Zero};
use serde_json::{json, Value as Json};

use kgl_core::algebra::{element_from_json, element_to_json, expand_to_level, star_product};
use kgl_core::catalog;
use kgl_core::cocycle::{
    character_from_json, cocycle_from_json, exponentiate, pair_with_functional, Cocycle2,
};
use kgl_core::degree::{DegreeVector, IntVector};
use kgl_core::graph::KGraph;
use kgl_core::groupoid::{continuity_probe, BasicSet, IndicatorCombination};
use kgl_core::ktheory::{
    af_limit_descriptor, twisted_ktheory_reduce, AfLimitDescriptor, FgAbelianGroup, GroupElement,
    TwistSpec, TwistedKTheory,
};
use kgl_core::skeleton::Skeleton;
use kgl_core::skew::{af_stages, build_window, WindowBox};
use kgl_core::structure::{kirchberg_report, StructureVerdict};
use kgl_core::value::{AbelianValue, Character, ValueGroup};

#[derive(Parser)]
#[command(
    name = "kgl",
    version,
    about = "Exact computations on finite higher-rank graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where the skeleton comes from: a JSON file or a catalog name.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct GraphInput {
    /// Skeleton JSON file
    #[arg(value_name = "GRAPH")]
    file: Option<PathBuf>,
    /// Built-in graph name (see `kgl examples`)
    #[arg(long, value_name = "NAME")]
    example: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a skeleton: square bijectivity, cube consistency, sources
    Validate {
        #[command(flatten)]
        input: GraphInput,
    },
    /// Aperiodicity, cofinality, and cycle/entrance eligibility report
    Analyze {
        #[command(flatten)]
        input: GraphInput,
        /// Per-colour search bound, e.g. "2,2"; one value broadcasts
        #[arg(long, value_name = "DEGREE")]
        bound: Option<String>,
    },
    /// K-groups, with a certified reduction for exponential twists
    Ktheory {
        #[command(flatten)]
        input: GraphInput,
        /// Cocycle JSON file describing the twisting family
        #[arg(long, value_name = "COCYCLE")]
        twist: Option<PathBuf>,
        /// Rational parameter p/q for the exponential family
        #[arg(long, value_name = "RATIONAL", requires = "twist", conflicts_with = "character")]
        t: Option<String>,
        /// Character JSON file composed with the twist values
        #[arg(long, value_name = "CHARACTER", requires = "twist")]
        character: Option<PathBuf>,
    },
    /// Multiply two term-list elements in the twisted algebra
    AlgebraEval {
        /// Left factor: term-list JSON file
        #[arg(value_name = "X")]
        x: PathBuf,
        /// Right factor: term-list JSON file
        #[arg(value_name = "Y")]
        y: PathBuf,
        #[command(flatten)]
        input: GraphInput,
        /// Cocycle JSON file (default: untwisted)
        #[arg(long, value_name = "COCYCLE")]
        cocycle: Option<PathBuf>,
        /// Expand the product to this degree, e.g. "2,2"
        #[arg(long, value_name = "DEGREE")]
        level: Option<String>,
    },
    /// CSV decay probe for a shrinking exponential twist sequence
    FieldProbe {
        #[command(flatten)]
        input: GraphInput,
        /// Number of sequence entries (parameter 1/2^n for n = 1..=steps)
        #[arg(long, default_value_t = 20)]
        steps: u32,
        /// Truncation depth of the probe space
        #[arg(long, default_value_t = 2)]
        depth: u32,
    },
    /// Windowed skew product with its stage-by-stage block report
    Skew {
        #[command(flatten)]
        input: GraphInput,
        /// Window box lo:hi per colour, e.g. "0:2,0:2"; one range broadcasts
        #[arg(long, value_name = "BOX")]
        window: String,
        /// Base cocycle JSON to pull back along the window (default: trivial)
        #[arg(long, value_name = "COCYCLE")]
        cocycle: Option<PathBuf>,
    },
    /// List the built-in example graphs
    Examples,
}

/// A failure in the requested computation (as opposed to a usage error).
#[derive(Debug)]
struct DomainError {
    kind: String,
    message: String,
}

impl DomainError {
    fn new(kind: &str, message: impl Into<String>) -> DomainError {
        DomainError {
            kind: kind.to_string(),
            message: message.into(),
        }
    }
}

/// Extract a stable machine-readable kind from an error's debug form,
/// unwrapping transparent wrapper variants.
fn error_kind(debug: &str) -> String {
    let ident: String = debug
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect();
    if let Some(inner) = debug[ident.len()..].strip_prefix('(') {
        let head: String = inner
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric())
            .collect();
        if head
            .chars()
            .next()
            .map_or(false, |c| c.is_ascii_uppercase())
            && inner[head.len()..].starts_with(|c| c == '(' || c == ' ' || c == '{')
        {
            return error_kind(inner);
        }
    }
    ident
}

fn fail<E: std::fmt::Debug + std::fmt::Display>(e: E) -> DomainError {
    DomainError {
        kind: error_kind(&format!("{e:?}")),
        message: e.to_string(),
    }
}

enum Output {
    Json(Json),
    Csv(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(Output::Json(doc)) => {
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            ExitCode::SUCCESS
        }
        Ok(Output::Csv(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            let doc = json!({ "error": { "kind": e.kind, "message": e.message } });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            ExitCode::from(1)
        }
    }
}

fn run(command: &Command) -> Result<Output, DomainError> {
    match command {
        Command::Validate { input } => cmd_validate(input),
        Command::Analyze { input, bound } => cmd_analyze(input, bound.as_deref()),
        Command::Ktheory {
            input,
            twist,
            t,
            character,
        } => cmd_ktheory(input, twist.as_deref(), t.as_deref(), character.as_deref()),
        Command::AlgebraEval {
            x,
            y,
            input,
            cocycle,
            level,
        } => cmd_algebra_eval(input, x, y, cocycle.as_deref(), level.as_deref()),
        Command::FieldProbe {
            input,
            steps,
            depth,
        } => cmd_field_probe(input, *steps, *depth),
        Command::Skew {
            input,
            window,
            cocycle,
        } => cmd_skew(input, window, cocycle.as_deref()),
        Command::Examples => cmd_examples(),
    }
}

// ---------------------------------------------------------------------------
// input loading

const EXAMPLE_NAMES: [&str; 7] = ["T_1", "T_2", "T_3", "O_2", "O_3", "line", "double-cycle"];

fn example_graph(name: &str) -> Result<Arc<KGraph>, DomainError> {
    if let Some(rest) = name.strip_prefix("T_") {
        let k: usize = rest
            .parse()
            .map_err(|_| DomainError::new("UnknownExample", format!("bad torus rank {rest:?}")))?;
        if !(1..=4).contains(&k) {
            return Err(DomainError::new(
                "UnknownExample",
                "torus examples cover ranks 1..=4",
            ));
        }
        return Ok(catalog::torus(k));
    }
    if let Some(rest) = name.strip_prefix("O_") {
        let n: usize = rest
            .parse()
            .map_err(|_| DomainError::new("UnknownExample", format!("bad loop count {rest:?}")))?;
        if !(1..=9).contains(&n) {
            return Err(DomainError::new(
                "UnknownExample",
                "single-vertex examples cover 1..=9 loops",
            ));
        }
        return Ok(catalog::cuntz(n));
    }
    match name {
        "line" => Ok(catalog::line()),
        "double-cycle" => Ok(catalog::double_cycle()),
        _ => Err(DomainError::new(
            "UnknownExample",
            format!("unknown example {name:?}; known: {}", EXAMPLE_NAMES.join(", ")),
        )),
    }
}

fn load_graph(input: &GraphInput) -> Result<Arc<KGraph>, DomainError> {
    match (&input.file, &input.example) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                DomainError::new("Io", format!("{}: {e}", path.display()))
            })?;
            let skeleton = Skeleton::from_json(&text).map_err(fail)?;
            KGraph::validate_allowing_sources(skeleton).map_err(fail)
        }
        (None, Some(name)) => example_graph(name),
        _ => unreachable!("clap enforces exactly one graph source"),
    }
}

/// Most computations assume every vertex receives every colour.
fn require_source_free(g: &KGraph) -> Result<(), DomainError> {
    if g.no_sources() {
        Ok(())
    } else {
        Err(DomainError::new(
            "SourceVertex",
            "this computation needs a source-free graph (every vertex must \
             receive an edge of every colour)",
        ))
    }
}

fn read_json_file(path: &std::path::Path) -> Result<Json, DomainError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DomainError::new("Io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| DomainError::new("Malformed", format!("{}: {e}", path.display())))
}

fn parse_degree(k: usize, text: &str) -> Result<DegreeVector, DomainError> {
    let parts: Vec<u32> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u32>()
                .map_err(|_| DomainError::new("BadDegree", format!("bad component {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    match parts.len() {
        0 => Err(DomainError::new("BadDegree", "empty degree")),
        1 => Ok(DegreeVector(vec![parts[0]; k])),
        n if n == k => Ok(DegreeVector(parts)),
        n => Err(DomainError::new(
            "BadDegree",
            format!("expected {k} components, got {n}"),
        )),
    }
}

fn parse_window(k: usize, text: &str) -> Result<WindowBox, DomainError> {
    let parts: Vec<&str> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let ranges: Vec<&str> = if parts.len() == 1 && k > 1 {
        vec![parts[0]; k]
    } else {
        parts
    };
    if ranges.len() != k {
        return Err(DomainError::new(
            "BadWindow",
            format!("expected {k} lo:hi ranges, got {}", ranges.len()),
        ));
    }
    let mut lo = Vec::with_capacity(k);
    let mut hi = Vec::with_capacity(k);
    for r in ranges {
        let (a, b) = r.split_once(':').ok_or_else(|| {
            DomainError::new("BadWindow", format!("range {r:?} is not of the form lo:hi"))
        })?;
        lo.push(a.trim().parse::<i64>().map_err(|_| {
            DomainError::new("BadWindow", format!("bad lower bound {a:?}"))
        })?);
        hi.push(b.trim().parse::<i64>().map_err(|_| {
            DomainError::new("BadWindow", format!("bad upper bound {b:?}"))
        })?);
    }
    Ok(WindowBox::new(IntVector(lo), IntVector(hi)))
}

fn parse_rational(text: &str) -> Result<BigRational, DomainError> {
    text.trim()
        .parse::<BigRational>()
        .map_err(|_| DomainError::new("BadRational", format!("bad rational {text:?}")))
}

// ---------------------------------------------------------------------------
// rendering

fn degree_json(d: &DegreeVector) -> Json {
    Json::Array(d.0.iter().map(|&n| Json::from(n)).collect())
}

fn element_coords_json(e: &GroupElement) -> Json {
    Json::Array(
        e.torsion
            .iter()
            .chain(e.free.iter())
            .map(|n| Json::String(n.to_string()))
            .collect(),
    )
}

fn group_json(k: &FgAbelianGroup) -> Json {
    let mut classes = serde_json::Map::new();
    for (name, class) in &k.vertex_classes {
        classes.insert(name.clone(), element_coords_json(class));
    }
    json!({
        "pretty": k.describe(),
        "rank": k.rank,
        "torsion": k.torsion.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "unit_class": k.unit_class.as_ref().map(element_coords_json),
        "vertex_classes": Json::Object(classes),
    })
}

fn matrix_json(m: &[Vec<u64>]) -> Json {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let entries: Vec<Json> = m
        .iter()
        .flat_map(|row| row.iter().map(|&x| Json::from(x)))
        .collect();
    json!({ "rows": rows, "cols": cols, "entries": entries })
}

fn af_json(af: &AfLimitDescriptor) -> Json {
    json!({
        "descriptor": af.descriptor,
        "stage_blocks": af.stage_blocks,
        "stationary": af.stationary.as_ref().map(|m| matrix_json(m)),
        "kappa_consistent": af.kappa_consistent,
        "K1": group_json(&af.k1),
    })
}

fn verdict_json(g: &KGraph, v: &StructureVerdict) -> Json {
    match v {
        StructureVerdict::Verified { bound } => json!({
            "status": "verified",
            "bound": bound,
        }),
        StructureVerdict::Counterexample { witness, note } => json!({
            "status": "counterexample",
            "witness": witness.iter().map(|p| p.display(g)).collect::<Vec<_>>(),
            "note": note,
        }),
        StructureVerdict::Inconclusive { bound, note } => json!({
            "status": "inconclusive",
            "bound": bound,
            "note": note,
        }),
    }
}

fn ktheory_json(out: &TwistedKTheory) -> Json {
    let mut doc = serde_json::Map::new();
    doc.insert(
        "K0".into(),
        out.k0.as_ref().map_or(Json::Null, group_json),
    );
    doc.insert(
        "K1".into(),
        out.k1.as_ref().map_or(Json::Null, group_json),
    );
    if let Some(af) = &out.af {
        doc.insert("K0_system".into(), af_json(af));
    }
    doc.insert("unital".into(), Json::Bool(out.unital));
    if let Some(note) = &out.note {
        doc.insert("note".into(), Json::String(note.clone()));
    }
    doc.insert(
        "certificate".into(),
        Json::Array(
            out.certificate
                .steps
                .iter()
                .map(|s| json!({ "step": s.name, "checked": s.checked }))
                .collect(),
        ),
    );
    Json::Object(doc)
}

// ---------------------------------------------------------------------------
// subcommands

fn cmd_validate(input: &GraphInput) -> Result<Output, DomainError> {
    let g = load_graph(input)?;
    Ok(Output::Json(json!({
        "valid": true,
        "k": g.k,
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "squares": g.skeleton().squares.len(),
        "source_free": g.no_sources(),
    })))
}

fn cmd_analyze(input: &GraphInput, bound: Option<&str>) -> Result<Output, DomainError> {
    let g = load_graph(input)?;
    require_source_free(&g)?;
    let bound = match bound {
        Some(text) => parse_degree(g.k, text)?,
        None => DegreeVector::ones(g.k).scale(2),
    };
    let report = kirchberg_report(&g, &bound);
    let cycles: Vec<Json> = report
        .cycles
        .iter()
        .map(|c| {
            json!({
                "mu": c.mu.display(&g),
                "nu": c.nu.display(&g),
                "entrance": c.entrance.display(&g),
                "condition1_bound": degree_json(&c.condition1_bound),
            })
        })
        .collect();
    let reached: Vec<&str> = report
        .reached
        .iter()
        .map(|&v| g.vertex_name(v))
        .collect();
    Ok(Output::Json(json!({
        "bound": degree_json(&bound),
        "aperiodicity": verdict_json(&g, &report.aperiodicity),
        "cofinality": verdict_json(&g, &report.cofinality),
        "cycles": cycles,
        "reached": reached,
        "all_vertices_reached": report.all_vertices_reached,
        "eligible": report.eligible,
        "certificates": report.certificates,
        "failures": report.failures,
    })))
}

fn cmd_ktheory(
    input: &GraphInput,
    twist: Option<&std::path::Path>,
    t: Option<&str>,
    character: Option<&std::path::Path>,
) -> Result<Output, DomainError> {
    let g = load_graph(input)?;
    let spec = match twist {
        None => TwistSpec::Untwisted,
        Some(cocycle_path) => {
            let c = cocycle_from_json(&g, &read_json_file(cocycle_path)?).map_err(fail)?;
            let circle_valued = matches!(
                c.group(),
                ValueGroup::CircleTurns | ValueGroup::CircleRadians
            );
            match character {
                // A circle-valued twist with no explicit parameter has no
                // real lift to exponentiate, so it goes down the
                // coboundary/approximately-finite route instead.
                None if circle_valued && t.is_none() => {
                    let stages: Vec<DegreeVector> = (0..=2u32)
                        .map(|s| DegreeVector::ones(g.k).scale(s))
                        .collect();
                    TwistSpec::DegreeCoboundary { cocycle: c, stages }
                }
                None => {
                    let t = match t {
                        Some(text) => parse_rational(text)?,
                        None => BigRational::one(),
                    };
                    TwistSpec::Exponential { cocycle: c, t }
                }
                Some(chi_path) => {
                    let chi = character_from_json(&read_json_file(chi_path)?).map_err(fail)?;
                    twist_from_character(c, &chi)?
                }
            }
        }
    };
    // The adjacency-complex routes assume a source-free graph; the
    // stage-by-stage route tolerates boundary sources.
    if !matches!(spec, TwistSpec::DegreeCoboundary { .. }) {
        require_source_free(&g)?;
    }
    let out = twisted_ktheory_reduce(&g, &spec).map_err(fail)?;
    Ok(Output::Json(ktheory_json(&out)))
}

/// Turn "cocycle composed with a character" into an exponential family the
/// reduction understands.  A torus character pairs the free-abelian values
/// with its rational functional; a real or turns character is already a
/// rational multiple of an integer-valued cocycle.
fn twist_from_character(c: Cocycle2, chi: &Character) -> Result<TwistSpec, DomainError> {
    match chi {
        Character::Torus(theta) => {
            if matches!(c.group(), ValueGroup::Int) && theta.len() == 1 {
                return Ok(TwistSpec::Exponential {
                    cocycle: c,
                    t: theta[0].clone(),
                });
            }
            let paired = pair_with_functional(&c, theta).map_err(fail)?;
            Ok(TwistSpec::Exponential {
                cocycle: paired,
                t: BigRational::one(),
            })
        }
        Character::IntTurns(theta) | Character::Real(theta) => Ok(TwistSpec::Exponential {
            cocycle: c,
            t: theta.clone(),
        }),
    }
}

fn cmd_algebra_eval(
    input: &GraphInput,
    x_path: &std::path::Path,
    y_path: &std::path::Path,
    cocycle: Option<&std::path::Path>,
    level: Option<&str>,
) -> Result<Output, DomainError> {
    let g = load_graph(input)?;
    let x = element_from_json(&g, &read_json_file(x_path)?).map_err(fail)?;
    let y = element_from_json(&g, &read_json_file(y_path)?).map_err(fail)?;
    let c = match cocycle {
        Some(path) => cocycle_from_json(&g, &read_json_file(path)?).map_err(fail)?,
        None => Cocycle2::zero(x.group(), g.k),
    };
    let mut product = star_product(&g, &c, &x, &y).map_err(fail)?;
    if let Some(text) = level {
        let level = parse_degree(g.k, text)?;
        product = expand_to_level(&g, &c, &product, &level).map_err(fail)?;
    }
    Ok(Output::Json(element_to_json(&g, &product)))
}

/// Find a probe pair `Z(mu, nu)` where `nu` is a proper head of `mu` with the
/// same source and a colour-2 degree gap, so a shrinking twist acts on it
/// with a visible phase.
fn probe_pair(g: &KGraph) -> Result<(kgl_core::graph::Path, kgl_core::graph::Path), DomainError> {
    let ones = DegreeVector::ones(g.k);
    for mu in g.paths_up_to(&ones) {
        for m in DegreeVector::box_below(mu.degree()) {
            if &m == mu.degree() {
                continue;
            }
            let (head, _tail) = match g.factorize(&mu, &m) {
                Ok(pair) => pair,
                Err(_) => continue,
            };
            if head.source() != mu.source() {
                continue;
            }
            if mu.degree().get(2) == head.degree().get(2) {
                continue;
            }
            return Ok((mu, head));
        }
    }
    Err(DomainError::new(
        "NoProbePair",
        "no pair Z(mu, nu) with matching sources and a colour-2 degree gap; \
         the probe needs a vertex supporting commuting loops",
    ))
}

fn cmd_field_probe(input: &GraphInput, steps: u32, depth: u32) -> Result<Output, DomainError> {
    let g = load_graph(input)?;
    require_source_free(&g)?;
    if g.k != 2 {
        return Err(DomainError::new(
            "WrongRank",
            format!("the probe is defined for rank-2 graphs; this one has rank {}", g.k),
        ));
    }
    if steps == 0 {
        return Err(DomainError::new("BadParameter", "steps must be positive"));
    }

    let mut matrix = vec![vec![AbelianValue::int(0); 2]; 2];
    matrix[1][0] = AbelianValue::int(1);
    let base = Cocycle2::DegreeBilinear {
        group: ValueGroup::Int,
        matrix,
    };

    let (mu, nu) = probe_pair(&g)?;
    let a = IndicatorCombination::of(
        &g,
        depth,
        &BasicSet::new(&g, mu, nu.clone()).map_err(fail)?,
    );
    let full_degree = DegreeVector::ones(2).scale(depth);
    let tail_degree = full_degree
        .checked_sub(nu.degree())
        .ok_or_else(|| DomainError::new("BadParameter", "depth must exceed the probe degree"))?;
    let z = g
        .paths_between(Some(nu.source()), None, &tail_degree)
        .first()
        .map(|tail| g.compose(&nu, tail))
        .transpose()
        .map_err(fail)?
        .or_else(|| g.paths_between(None, None, &full_degree).last().cloned())
        .ok_or_else(|| DomainError::new("NoProbePair", "no full-depth probe vector"))?;
    let xi = IndicatorCombination::of(&g, depth, &BasicSet::cylinder(z));

    let mut parameters = Vec::with_capacity(steps as usize);
    let mut seq = Vec::with_capacity(steps as usize);
    for n in 1..=steps {
        let theta = BigRational::new(BigInt::one(), BigInt::from(2u64) << (n - 1));
        seq.push(exponentiate(&base, &theta).map_err(fail)?);
        parameters.push(theta);
    }
    let lim = exponentiate(&base, &BigRational::zero()).map_err(fail)?;

    let report = continuity_probe(&g, &a, &seq, &lim, &xi, depth).map_err(fail)?;
    let mut csv = String::from("n,parameter,diff_norm,lsc_ok\n");
    for (i, theta) in parameters.iter().enumerate() {
        let diff = report.diffs[i] + 0.0; // collapse negative zero
        csv.push_str(&format!(
            "{},{},{:.12e},{}\n",
            i + 1,
            theta,
            diff,
            report.lsc_ok,
        ));
    }
    Ok(Output::Csv(csv))
}

fn cmd_skew(
    input: &GraphInput,
    window: &str,
    cocycle: Option<&std::path::Path>,
) -> Result<Output, DomainError> {
    let base = load_graph(input)?;
    let win = parse_window(base.k, window)?;
    let skew = build_window(&base, &win).map_err(fail)?;
    let g = skew.window();

    let diagonal_steps = (0..base.k)
        .map(|i| (win.hi.0[i] - win.lo.0[i]).max(0) as u32)
        .min()
        .unwrap_or(0);
    let stages: Vec<DegreeVector> = (0..=diagonal_steps)
        .map(|t| DegreeVector::ones(base.k).scale(t))
        .collect();

    let pulled = match cocycle {
        Some(path) => {
            let c = cocycle_from_json(&base, &read_json_file(path)?).map_err(fail)?;
            let bound = DegreeVector::ones(base.k).scale(diagonal_steps.max(1));
            kgl_core::skew::pullback_cocycle(&skew, &c, &bound).map_err(fail)?
        }
        None => Cocycle2::zero(ValueGroup::Int, base.k),
    };

    let report = af_stages(g, &pulled, &stages).map_err(fail)?;
    let descriptor = af_limit_descriptor(g, &pulled, &stages).map_err(fail)?;

    let mut grading = serde_json::Map::new();
    for (name, d) in &report.grading {
        grading.insert(name.clone(), degree_json(d));
    }
    let stage_docs: Vec<Json> = report
        .stages
        .iter()
        .map(|s| {
            json!({
                "index": degree_json(&s.index),
                "blocks": s.blocks,
                "dims": s.dims,
            })
        })
        .collect();
    let connecting: Vec<Json> = report.connecting.iter().map(|m| matrix_json(m)).collect();
    let interior: Vec<String> = skew
        .interior()
        .iter()
        .map(|&v| g.vertex_name(v).to_string())
        .collect();

    let skeleton: Json = serde_json::from_str(&g.skeleton().to_json())
        .expect("skeleton serialization is valid JSON");

    Ok(Output::Json(json!({
        "window": { "lo": win.lo.0, "hi": win.hi.0 },
        "k": g.k,
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "squares": g.skeleton().squares.len(),
        "interior": interior,
        "interior_source_free": skew.interior_source_free(),
        "grading": Json::Object(grading),
        "stages": stage_docs,
        "connecting": connecting,
        "kappa_consistent": report.kappa_consistent,
        "descriptor": descriptor.descriptor,
        "skeleton": skeleton,
    })))
}

fn cmd_examples() -> Result<Output, DomainError> {
    let entries: Vec<Json> = EXAMPLE_NAMES
        .iter()
        .map(|name| {
            let g = example_graph(name).expect("catalog names resolve");
            json!({
                "name": name,
                "k": g.k,
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "squares": g.skeleton().squares.len(),
                "source_free": g.no_sources(),
            })
        })
        .collect();
    Ok(Output::Json(json!({ "examples": entries })))
}
