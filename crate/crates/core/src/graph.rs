//! Finite higher-rank graphs and their path calculus.
//!
//! Morphisms are kept in colour-normal form: within an edge word, all
//! colour-1 edges come first (nearest the range), then colour-2, and so on.
//! The declared squares provide the rewriting moves between adjacent edges of
//! different colours; validation checks that these moves are total bijections
//! on composable pairs and, for rank three and above, that rewriting a
//! three-colour word along either route yields the same word.  With those
//! checks in place every path has a unique normal form and a unique
//! factorisation at each degree split, which is what the rest of the crate
//! leans on.

use crate::degree::DegreeVector;
use crate::skeleton::{EdgeData, EdgeId, Skeleton, SkeletonError, VertexId};
use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error("square relation for colours ({i},{j}) is not a bijection: {detail}")]
    SquareNotBijective { i: usize, j: usize, detail: String },
    #[error("cube inconsistency on edge triple ({0}, {1}, {2})", triple.0, triple.1, triple.2)]
    CubeInconsistent { triple: (String, String, String) },
    #[error("vertex {vertex:?} receives no edge of colour {color}")]
    SourceVertex { vertex: String, color: usize },
    #[error("paths are not composable")]
    NotComposable,
    #[error("degree out of range: {0}")]
    DegreeOutOfRange(String),
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
}

/// A morphism in colour-normal form.  Identity morphisms carry no edges and
/// remember their vertex through `range == source`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Path {
    degree: DegreeVector,
    range: VertexId,
    source: VertexId,
    edges: Vec<EdgeId>,
}

impl Path {
    pub fn degree(&self) -> &DegreeVector {
        &self.degree
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn is_identity(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn display(&self, g: &KGraph) -> String {
        if self.is_identity() {
            format!("id[{}]", g.vertex_name(self.range))
        } else {
            self.edges
                .iter()
                .map(|e| g.edge(*e).name.as_str())
                .collect::<Vec<_>>()
                .join(".")
        }
    }
}

static NEXT_GRAPH_ID: AtomicU64 = AtomicU64::new(1);

pub struct KGraph {
    id: u64,
    pub k: usize,
    skeleton: Skeleton,
    /// (lower-colour edge, higher-colour edge) -> rewritten pair, higher colour first.
    fw: HashMap<(EdgeId, EdgeId), (EdgeId, EdgeId)>,
    bw: HashMap<(EdgeId, EdgeId), (EdgeId, EdgeId)>,
    /// `edges_in[v][c-1]`: edges of colour `c` whose range is `v`.
    edges_in: Vec<Vec<Vec<EdgeId>>>,
    adjacency: Vec<Vec<Vec<u64>>>,
    no_sources: bool,
    memo: Mutex<HashMap<DegreeVector, Arc<Vec<Path>>>>,
}

impl std::fmt::Debug for KGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KGraph")
            .field("k", &self.k)
            .field("vertices", &self.skeleton.vertex_names.len())
            .field("edges", &self.skeleton.edges.len())
            .field("no_sources", &self.no_sources)
            .finish()
    }
}

impl KGraph {
    /// Accept the skeleton only if every vertex receives at least one edge of
    /// each colour (no sources) in addition to the square and cube checks.
    pub fn validate(skeleton: Skeleton) -> Result<Arc<KGraph>, GraphError> {
        Self::validate_inner(skeleton, true)
    }

    /// Same square and cube checks but tolerate vertices with missing
    /// incoming colours; the result records `no_sources() == false` when any
    /// exist.  Needed for windowed skew products, whose boundary vertices
    /// inevitably lack continuations.
    pub fn validate_allowing_sources(skeleton: Skeleton) -> Result<Arc<KGraph>, GraphError> {
        Self::validate_inner(skeleton, false)
    }

    fn validate_inner(skeleton: Skeleton, require_no_sources: bool) -> Result<Arc<KGraph>, GraphError> {
        let k = skeleton.k;
        let nv = skeleton.vertex_names.len();

        let mut fw = HashMap::new();
        let mut bw = HashMap::new();
        for sq in &skeleton.squares {
            let (f, g) = sq.ij;
            let (g2, f2) = sq.ji;
            let (cf, cg) = (skeleton.edge(f).color, skeleton.edge(g).color);
            let (cg2, cf2) = (skeleton.edge(g2).color, skeleton.edge(f2).color);
            if !(cf < cg && cg2 == cg && cf2 == cf) {
                return Err(GraphError::SquareNotBijective {
                    i: cf.min(cg),
                    j: cf.max(cg),
                    detail: format!(
                        "square ({}, {}) ~ ({}, {}) has colours ({cf},{cg}) vs ({cg2},{cf2}); \
                         expected (i,j) with i<j paired against (j,i)",
                        skeleton.edge(f).name,
                        skeleton.edge(g).name,
                        skeleton.edge(g2).name,
                        skeleton.edge(f2).name
                    ),
                });
            }
            let ok_endpoints = skeleton.edge(f).source == skeleton.edge(g).range
                && skeleton.edge(g2).source == skeleton.edge(f2).range
                && skeleton.edge(f).range == skeleton.edge(g2).range
                && skeleton.edge(g).source == skeleton.edge(f2).source;
            if !ok_endpoints {
                return Err(GraphError::SquareNotBijective {
                    i: cf,
                    j: cg,
                    detail: format!(
                        "square ({}, {}) ~ ({}, {}) does not connect the same vertices",
                        skeleton.edge(f).name,
                        skeleton.edge(g).name,
                        skeleton.edge(g2).name,
                        skeleton.edge(f2).name
                    ),
                });
            }
            if fw.insert((f, g), (g2, f2)).is_some() {
                return Err(GraphError::SquareNotBijective {
                    i: cf,
                    j: cg,
                    detail: format!(
                        "pair ({}, {}) appears in more than one square",
                        skeleton.edge(f).name,
                        skeleton.edge(g).name
                    ),
                });
            }
            if bw.insert((g2, f2), (f, g)).is_some() {
                return Err(GraphError::SquareNotBijective {
                    i: cf,
                    j: cg,
                    detail: format!(
                        "pair ({}, {}) appears in more than one square",
                        skeleton.edge(g2).name,
                        skeleton.edge(f2).name
                    ),
                });
            }
        }

        // Totality and bijectivity per colour pair: the declared squares must
        // hit every composable (i,j) pair exactly once and every composable
        // (j,i) pair exactly once.
        for i in 1..=k {
            for j in (i + 1)..=k {
                let mut missing_ij = None;
                let mut count_ij = 0usize;
                for (fe, f) in skeleton.edges.iter().enumerate() {
                    if f.color != i {
                        continue;
                    }
                    for (ge, g) in skeleton.edges.iter().enumerate() {
                        if g.color != j || f.source != g.range {
                            continue;
                        }
                        count_ij += 1;
                        if !fw.contains_key(&(EdgeId(fe as u32), EdgeId(ge as u32))) {
                            missing_ij.get_or_insert((f.name.clone(), g.name.clone()));
                        }
                    }
                }
                if let Some((a, b)) = missing_ij {
                    return Err(GraphError::SquareNotBijective {
                        i,
                        j,
                        detail: format!("no square declared for the composable pair ({a}, {b})"),
                    });
                }
                let mut missing_ji = None;
                let mut count_ji = 0usize;
                for (ge, g) in skeleton.edges.iter().enumerate() {
                    if g.color != j {
                        continue;
                    }
                    for (fe, f) in skeleton.edges.iter().enumerate() {
                        if f.color != i || g.source != f.range {
                            continue;
                        }
                        count_ji += 1;
                        if !bw.contains_key(&(EdgeId(ge as u32), EdgeId(fe as u32))) {
                            missing_ji.get_or_insert((g.name.clone(), f.name.clone()));
                        }
                    }
                }
                if let Some((a, b)) = missing_ji {
                    return Err(GraphError::SquareNotBijective {
                        i,
                        j,
                        detail: format!(
                            "no square has the composable pair ({a}, {b}) on its rewritten side"
                        ),
                    });
                }
                if count_ij != count_ji {
                    return Err(GraphError::SquareNotBijective {
                        i,
                        j,
                        detail: format!(
                            "{count_ij} composable (i,j) pairs but {count_ji} (j,i) pairs"
                        ),
                    });
                }
            }
        }

        // Cube consistency: for three edges of strictly increasing colour,
        // rewriting the word to the fully reversed colour order must give the
        // same edges along both swap routes.
        if k >= 3 {
            let apply_fw = |a: EdgeId, b: EdgeId| fw.get(&(a, b)).copied();
            for (fe, f) in skeleton.edges.iter().enumerate() {
                for (ge, g) in skeleton.edges.iter().enumerate() {
                    if !(f.color < g.color) || f.source != g.range {
                        continue;
                    }
                    for (he, h) in skeleton.edges.iter().enumerate() {
                        if !(g.color < h.color) || g.source != h.range {
                            continue;
                        }
                        let (fe, ge, he) = (EdgeId(fe as u32), EdgeId(ge as u32), EdgeId(he as u32));
                        let route_a = (|| {
                            let (h1, g1) = apply_fw(ge, he)?;
                            let (h2, f1) = apply_fw(fe, h1)?;
                            let (g2, f2) = apply_fw(f1, g1)?;
                            Some((h2, g2, f2))
                        })();
                        let route_b = (|| {
                            let (g1, f1) = apply_fw(fe, ge)?;
                            let (h1, f2) = apply_fw(f1, he)?;
                            let (h2, g2) = apply_fw(g1, h1)?;
                            Some((h2, g2, f2))
                        })();
                        if route_a.is_none() || route_b.is_none() || route_a != route_b {
                            return Err(GraphError::CubeInconsistent {
                                triple: (f.name.clone(), g.name.clone(), h.name.clone()),
                            });
                        }
                    }
                }
            }
        }

        let mut edges_in = vec![vec![Vec::new(); k]; nv];
        for (i, e) in skeleton.edges.iter().enumerate() {
            edges_in[e.range.0 as usize][e.color - 1].push(EdgeId(i as u32));
        }

        let mut no_sources = true;
        'outer: for v in 0..nv {
            for c in 0..k {
                if edges_in[v][c].is_empty() {
                    if require_no_sources {
                        return Err(GraphError::SourceVertex {
                            vertex: skeleton.vertex_names[v].clone(),
                            color: c + 1,
                        });
                    }
                    no_sources = false;
                    continue 'outer;
                }
            }
        }

        let mut adjacency = vec![vec![vec![0u64; nv]; nv]; k];
        for e in &skeleton.edges {
            adjacency[e.color - 1][e.range.0 as usize][e.source.0 as usize] += 1;
        }
        for i in 0..k {
            for j in (i + 1)..k {
                let prod = |x: &Vec<Vec<u64>>, y: &Vec<Vec<u64>>| -> Vec<Vec<u64>> {
                    let mut out = vec![vec![0u64; nv]; nv];
                    for a in 0..nv {
                        for b in 0..nv {
                            for c in 0..nv {
                                out[a][c] += x[a][b] * y[b][c];
                            }
                        }
                    }
                    out
                };
                if prod(&adjacency[i], &adjacency[j]) != prod(&adjacency[j], &adjacency[i]) {
                    return Err(GraphError::InternalInvariant(format!(
                        "adjacency matrices for colours {} and {} do not commute \
                         despite bijective squares",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }

        Ok(Arc::new(KGraph {
            id: NEXT_GRAPH_ID.fetch_add(1, Ordering::Relaxed),
            k,
            skeleton,
            fw,
            bw,
            edges_in,
            adjacency,
            no_sources,
            memo: Mutex::new(HashMap::new()),
        }))
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn no_sources(&self) -> bool {
        self.no_sources
    }

    pub fn vertex_count(&self) -> usize {
        self.skeleton.vertex_names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count() as u32).map(VertexId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        self.skeleton.vertex_name(v)
    }

    pub fn edge_count(&self) -> usize {
        self.skeleton.edges.len()
    }

    pub fn edge(&self, e: EdgeId) -> &EdgeData {
        self.skeleton.edge(e)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edge_count() as u32).map(EdgeId)
    }

    /// Count of colour-`c` edges with range `v` and source `w`.
    pub fn adjacency(&self, color: usize) -> &Vec<Vec<u64>> {
        &self.adjacency[color - 1]
    }

    pub fn identity(&self, v: VertexId) -> Path {
        Path {
            degree: DegreeVector::zero(self.k),
            range: v,
            source: v,
            edges: Vec::new(),
        }
    }

    pub fn edge_path(&self, e: EdgeId) -> Path {
        let data = self.edge(e);
        Path {
            degree: DegreeVector::unit(self.k, data.color),
            range: data.range,
            source: data.source,
            edges: vec![e],
        }
    }

    /// Build a path from an edge word given in composition order (the first
    /// edge carries the range), normalising the colour order.
    pub fn path_from_edges(&self, edges: &[EdgeId]) -> Result<Path, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::DegreeOutOfRange(
                "an identity path needs an explicit vertex".into(),
            ));
        }
        let mut word = Vec::with_capacity(edges.len());
        let mut degree = DegreeVector::zero(self.k);
        for (i, e) in edges.iter().enumerate() {
            let data = self.edge(*e);
            if i > 0 && self.edge(edges[i - 1]).source != data.range {
                return Err(GraphError::NotComposable);
            }
            degree.0[data.color - 1] += 1;
            word.push(*e);
        }
        let range = self.edge(edges[0]).range;
        let source = self.edge(*edges.last().unwrap()).source;
        self.normalize(&mut word)?;
        Ok(Path {
            degree,
            range,
            source,
            edges: word,
        })
    }

    fn swap_adjacent(&self, word: &mut [EdgeId], pos: usize) -> Result<(), GraphError> {
        let (a, b) = (word[pos], word[pos + 1]);
        let (ca, cb) = (self.edge(a).color, self.edge(b).color);
        let mapped = if ca < cb {
            self.fw.get(&(a, b))
        } else if ca > cb {
            self.bw.get(&(a, b))
        } else {
            return Err(GraphError::InternalInvariant(
                "attempted to swap two edges of the same colour".into(),
            ));
        };
        let (x, y) = mapped.ok_or_else(|| GraphError::InternalInvariant(format!(
            "no square for the composable pair ({}, {})",
            self.edge(a).name,
            self.edge(b).name
        )))?;
        word[pos] = *x;
        word[pos + 1] = *y;
        Ok(())
    }

    /// Insertion sort by colour; same-colour edges are never reordered.
    fn normalize(&self, word: &mut [EdgeId]) -> Result<(), GraphError> {
        for i in 1..word.len() {
            let mut j = i;
            while j > 0 && self.edge(word[j - 1]).color > self.edge(word[j]).color {
                self.swap_adjacent(word, j - 1)?;
                j -= 1;
            }
        }
        Ok(())
    }

    pub fn compose(&self, left: &Path, right: &Path) -> Result<Path, GraphError> {
        if left.source != right.range {
            return Err(GraphError::NotComposable);
        }
        if left.is_identity() {
            return Ok(right.clone());
        }
        if right.is_identity() {
            return Ok(left.clone());
        }
        let mut edges = Vec::with_capacity(left.edges.len() + right.edges.len());
        edges.extend_from_slice(&left.edges);
        edges.extend_from_slice(&right.edges);
        self.normalize(&mut edges)?;
        Ok(Path {
            degree: left.degree.add(&right.degree),
            range: left.range,
            source: right.source,
            edges,
        })
    }

    /// The unique split `path = head * tail` with `head` of degree `m`.
    pub fn factorize(&self, path: &Path, m: &DegreeVector) -> Result<(Path, Path), GraphError> {
        if !m.leq(&path.degree) {
            return Err(GraphError::DegreeOutOfRange(format!(
                "cannot split a path of degree {} at {}",
                path.degree, m
            )));
        }
        let tail_degree = path.degree.checked_sub(m).expect("checked above");
        let mut target = Vec::with_capacity(path.edges.len());
        for c in 1..=self.k {
            for _ in 0..m.get(c) {
                target.push(c);
            }
        }
        for c in 1..=self.k {
            for _ in 0..tail_degree.get(c) {
                target.push(c);
            }
        }
        let mut word = path.edges.clone();
        for pos in 0..word.len() {
            if self.edge(word[pos]).color == target[pos] {
                continue;
            }
            let q = (pos + 1..word.len())
                .find(|&q| self.edge(word[q]).color == target[pos])
                .ok_or_else(|| {
                    GraphError::InternalInvariant("colour word does not match degree".into())
                })?;
            for t in (pos..q).rev() {
                self.swap_adjacent(&mut word, t)?;
            }
        }
        let split = m.total() as usize;
        let head_edges: Vec<EdgeId> = word[..split].to_vec();
        let tail_edges: Vec<EdgeId> = word[split..].to_vec();
        let mid = if head_edges.is_empty() {
            path.range
        } else {
            self.edge(*head_edges.last().unwrap()).source
        };
        let head = Path {
            degree: m.clone(),
            range: path.range,
            source: mid,
            edges: head_edges,
        };
        let tail = Path {
            degree: tail_degree,
            range: mid,
            source: path.source,
            edges: tail_edges,
        };
        Ok((head, tail))
    }

    /// The degree-`m` head of the path.
    pub fn prefix(&self, path: &Path, m: &DegreeVector) -> Result<Path, GraphError> {
        Ok(self.factorize(path, m)?.0)
    }

    /// All paths of the given degree, in a deterministic order, memoised.
    pub fn paths(&self, degree: &DegreeVector) -> Arc<Vec<Path>> {
        if let Some(hit) = self.memo.lock().unwrap().get(degree) {
            return hit.clone();
        }
        let computed = Arc::new(self.enumerate_paths(degree));
        self.memo
            .lock()
            .unwrap()
            .entry(degree.clone())
            .or_insert(computed)
            .clone()
    }

    fn enumerate_paths(&self, degree: &DegreeVector) -> Vec<Path> {
        if degree.is_zero() {
            return self.vertices().map(|v| self.identity(v)).collect();
        }
        let color = (1..=self.k).find(|&c| degree.get(c) > 0).unwrap();
        let rest_degree = degree
            .checked_sub(&DegreeVector::unit(self.k, color))
            .unwrap();
        let rest = self.paths(&rest_degree);
        let mut by_range: BTreeMap<VertexId, Vec<&Path>> = BTreeMap::new();
        for p in rest.iter() {
            by_range.entry(p.range).or_default().push(p);
        }
        let mut out = Vec::new();
        for v in self.vertices() {
            for c_edges in [&self.edges_in[v.0 as usize][color - 1]] {
                for &e in c_edges {
                    let data = self.edge(e);
                    if let Some(tails) = by_range.get(&data.source) {
                        for tail in tails {
                            let mut edges = Vec::with_capacity(1 + tail.edges.len());
                            edges.push(e);
                            edges.extend_from_slice(&tail.edges);
                            out.push(Path {
                                degree: degree.clone(),
                                range: data.range,
                                source: tail.source,
                                edges,
                            });
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Paths of the given degree filtered by range and/or source.
    pub fn paths_between(
        &self,
        range: Option<VertexId>,
        source: Option<VertexId>,
        degree: &DegreeVector,
    ) -> Vec<Path> {
        self.paths(degree)
            .iter()
            .filter(|p| range.map_or(true, |v| p.range == v))
            .filter(|p| source.map_or(true, |w| p.source == w))
            .cloned()
            .collect()
    }

    /// All paths of degree at most `bound` (componentwise).
    pub fn paths_up_to(&self, bound: &DegreeVector) -> Vec<Path> {
        let mut out = Vec::new();
        for d in DegreeVector::box_below(bound) {
            out.extend(self.paths(&d).iter().cloned());
        }
        out
    }

    /// Minimal common extensions: all paths of degree `d(mu) v d(nu)` that
    /// extend both arguments.
    pub fn mce(&self, mu: &Path, nu: &Path) -> Vec<Path> {
        if mu.range != nu.range {
            return Vec::new();
        }
        let t = mu.degree.join(&nu.degree);
        let ext_degree = t.checked_sub(&mu.degree).expect("join dominates");
        let mut out = Vec::new();
        for ext in self.paths_between(Some(mu.source), None, &ext_degree) {
            let lambda = self.compose(mu, &ext).expect("range matches by filter");
            let (head, _) = self
                .factorize(&lambda, &nu.degree)
                .expect("degree below join");
            if &head == nu {
                out.push(lambda);
            }
        }
        out.sort();
        out
    }

    /// The extension pair `(alpha, beta)` with `mu*alpha == nu*beta == xi`.
    pub fn mce_extensions(
        &self,
        mu: &Path,
        nu: &Path,
        xi: &Path,
    ) -> Result<(Path, Path), GraphError> {
        let alpha = self.factorize(xi, &mu.degree)?.1;
        let beta = self.factorize(xi, &nu.degree)?.1;
        Ok((alpha, beta))
    }
}
