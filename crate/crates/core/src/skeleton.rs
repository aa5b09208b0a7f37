//! Coloured-graph presentations.
//!
//! A rank-`k` graph is presented by its skeleton: a vertex set, edges coloured
//! `1..=k`, and for every colour pair `i < j` a pairing of two-edge paths that
//! records which colour-`i`-then-colour-`j` path equals which
//! colour-`j`-then-colour-`i` path.  The JSON layout is
//!
//! ```json
//! {
//!   "k": 2,
//!   "vertices": ["u", "v"],
//!   "edges": [{"id": "a1", "color": 1, "range": "u", "source": "v"}],
//!   "squares": [{"ij_pair": ["f", "g"], "ji_pair": ["g2", "f2"]}]
//! }
//! ```
//!
//! where `ij_pair: [f, g]` means the path that traverses `f` (lower colour)
//! and then `g`, and the square asserts it equals the `ji_pair` path.

use crate::degree::DegreeVector;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Debug for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Debug)]
pub struct EdgeData {
    pub name: String,
    /// 1-based colour.
    pub color: usize,
    pub range: VertexId,
    pub source: VertexId,
}

/// A declared square: the `ij` pair lists the lower-colour edge first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareData {
    pub ij: (EdgeId, EdgeId),
    pub ji: (EdgeId, EdgeId),
}

#[derive(Clone, Debug)]
pub struct Skeleton {
    pub k: usize,
    pub vertex_names: Vec<String>,
    pub edges: Vec<EdgeData>,
    pub squares: Vec<SquareData>,
    vertex_index: BTreeMap<String, VertexId>,
    edge_index: BTreeMap<String, EdgeId>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SkeletonError {
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("malformed skeleton: {0}")]
    Malformed(String),
}

impl Skeleton {
    pub fn new(k: usize) -> SkeletonBuilder {
        SkeletonBuilder {
            k,
            vertices: Vec::new(),
            edges: Vec::new(),
            squares: Vec::new(),
        }
    }

    pub fn degree_of_color(&self, color: usize) -> DegreeVector {
        DegreeVector::unit(self.k, color)
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.edge_index.get(name).copied()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0 as usize]
    }

    pub fn edge(&self, e: EdgeId) -> &EdgeData {
        &self.edges[e.0 as usize]
    }

    pub fn from_json(text: &str) -> Result<Skeleton, SkeletonError> {
        let wire: SkeletonJson = serde_json::from_str(text)
            .map_err(|e| SkeletonError::Malformed(format!("json: {e}")))?;
        Skeleton::from_wire(wire)
    }

    pub fn to_json(&self) -> String {
        let wire = SkeletonJson {
            k: self.k,
            vertices: self.vertex_names.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    id: e.name.clone(),
                    color: e.color,
                    range: self.vertex_name(e.range).to_string(),
                    source: self.vertex_name(e.source).to_string(),
                })
                .collect(),
            squares: self
                .squares
                .iter()
                .map(|s| SquareJson {
                    ij_pair: [
                        self.edge(s.ij.0).name.clone(),
                        self.edge(s.ij.1).name.clone(),
                    ],
                    ji_pair: [
                        self.edge(s.ji.0).name.clone(),
                        self.edge(s.ji.1).name.clone(),
                    ],
                })
                .collect(),
        };
        serde_json::to_string_pretty(&wire).expect("skeleton serialization cannot fail")
    }

    fn from_wire(wire: SkeletonJson) -> Result<Skeleton, SkeletonError> {
        if wire.k == 0 {
            return Err(SkeletonError::Malformed("k must be at least 1".into()));
        }
        let mut vertex_index = BTreeMap::new();
        for (i, name) in wire.vertices.iter().enumerate() {
            if vertex_index.insert(name.clone(), VertexId(i as u32)).is_some() {
                return Err(SkeletonError::Malformed(format!(
                    "duplicate vertex id {name:?}"
                )));
            }
        }
        let mut edge_index = BTreeMap::new();
        let mut edges = Vec::new();
        for (i, e) in wire.edges.iter().enumerate() {
            if e.color == 0 || e.color > wire.k {
                return Err(SkeletonError::Malformed(format!(
                    "edge {:?} has color {} outside 1..={}",
                    e.id, e.color, wire.k
                )));
            }
            let range = *vertex_index.get(&e.range).ok_or_else(|| {
                SkeletonError::DanglingReference(format!(
                    "edge {:?} range vertex {:?} not declared",
                    e.id, e.range
                ))
            })?;
            let source = *vertex_index.get(&e.source).ok_or_else(|| {
                SkeletonError::DanglingReference(format!(
                    "edge {:?} source vertex {:?} not declared",
                    e.id, e.source
                ))
            })?;
            if edge_index.insert(e.id.clone(), EdgeId(i as u32)).is_some() {
                return Err(SkeletonError::Malformed(format!(
                    "duplicate edge id {:?}",
                    e.id
                )));
            }
            edges.push(EdgeData {
                name: e.id.clone(),
                color: e.color,
                range,
                source,
            });
        }
        let mut squares = Vec::new();
        for s in &wire.squares {
            let look = |name: &String| {
                edge_index.get(name).copied().ok_or_else(|| {
                    SkeletonError::DanglingReference(format!(
                        "square references undeclared edge {name:?}"
                    ))
                })
            };
            squares.push(SquareData {
                ij: (look(&s.ij_pair[0])?, look(&s.ij_pair[1])?),
                ji: (look(&s.ji_pair[0])?, look(&s.ji_pair[1])?),
            });
        }
        Ok(Skeleton {
            k: wire.k,
            vertex_names: wire.vertices,
            edges,
            squares,
            vertex_index,
            edge_index,
        })
    }
}

pub struct SkeletonBuilder {
    k: usize,
    vertices: Vec<String>,
    edges: Vec<(String, usize, String, String)>,
    squares: Vec<([String; 2], [String; 2])>,
}

impl SkeletonBuilder {
    pub fn vertex(mut self, name: &str) -> Self {
        self.vertices.push(name.to_string());
        self
    }

    pub fn edge(mut self, name: &str, color: usize, range: &str, source: &str) -> Self {
        self.edges
            .push((name.to_string(), color, range.to_string(), source.to_string()));
        self
    }

    /// Declare that the path `ij.0` then `ij.1` equals the path `ji.0` then `ji.1`.
    pub fn square(mut self, ij: [&str; 2], ji: [&str; 2]) -> Self {
        self.squares.push((
            [ij[0].to_string(), ij[1].to_string()],
            [ji[0].to_string(), ji[1].to_string()],
        ));
        self
    }

    pub fn build(self) -> Result<Skeleton, SkeletonError> {
        Skeleton::from_wire(SkeletonJson {
            k: self.k,
            vertices: self.vertices,
            edges: self
                .edges
                .into_iter()
                .map(|(id, color, range, source)| EdgeJson {
                    id,
                    color,
                    range,
                    source,
                })
                .collect(),
            squares: self
                .squares
                .into_iter()
                .map(|(ij_pair, ji_pair)| SquareJson { ij_pair, ji_pair })
                .collect(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SkeletonJson {
    k: usize,
    vertices: Vec<String>,
    edges: Vec<EdgeJson>,
    #[serde(default)]
    squares: Vec<SquareJson>,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    id: String,
    color: usize,
    range: String,
    source: String,
}

#[derive(Serialize, Deserialize)]
struct SquareJson {
    ij_pair: [String; 2],
    ji_pair: [String; 2],
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let text = r#"{
            "k": 2,
            "vertices": ["v"],
            "edges": [
                {"id": "t1", "color": 1, "range": "v", "source": "v"},
                {"id": "t2", "color": 2, "range": "v", "source": "v"}
            ],
            "squares": [{"ij_pair": ["t1", "t2"], "ji_pair": ["t2", "t1"]}]
        }"#;
        let s = Skeleton::from_json(text).unwrap();
        assert_eq!(s.k, 2);
        assert_eq!(s.edges.len(), 2);
        let again = Skeleton::from_json(&s.to_json()).unwrap();
        assert_eq!(again.edges[1].name, "t2");
        assert_eq!(again.squares, s.squares);
    }

    #[test]
    fn dangling_edge_reference_is_reported() {
        let text = r#"{
            "k": 1,
            "vertices": ["v"],
            "edges": [{"id": "a", "color": 1, "range": "v", "source": "w"}],
            "squares": []
        }"#;
        match Skeleton::from_json(text) {
            Err(SkeletonError::DanglingReference(msg)) => {
                assert!(msg.contains("source vertex"), "{msg}")
            }
            other => panic!("expected dangling reference, got {other:?}"),
        }
    }

    #[test]
    fn color_out_of_range_is_reported() {
        let text = r#"{
            "k": 1,
            "vertices": ["v"],
            "edges": [{"id": "a", "color": 2, "range": "v", "source": "v"}],
            "squares": []
        }"#;
        assert!(matches!(
            Skeleton::from_json(text),
            Err(SkeletonError::Malformed(_))
        ));
    }
}
