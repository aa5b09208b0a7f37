//! Small stock graphs used across tests, benchmarks and the command line.

use crate::graph::KGraph;
use crate::skeleton::Skeleton;
use std::sync::Arc;

/// Rank-`k` graph with one vertex and one loop per colour; every degree has
/// exactly one path.  Rank two is the rotation-algebra example.
pub fn torus(k: usize) -> Arc<KGraph> {
    let mut b = Skeleton::new(k).vertex("v");
    for c in 1..=k {
        b = b.edge(&format!("t{c}"), c, "v", "v");
    }
    for i in 1..=k {
        for j in (i + 1)..=k {
            let (ti, tj) = (format!("t{i}"), format!("t{j}"));
            b = b.square([ti.as_str(), tj.as_str()], [tj.as_str(), ti.as_str()]);
        }
    }
    KGraph::validate(b.build().expect("torus skeleton is well formed")).expect("torus validates")
}

fn letter(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("g{i}")
    }
}

/// One vertex, `n` loops, rank one.  `cuntz(1)` is the single loop.
pub fn cuntz(n: usize) -> Arc<KGraph> {
    assert!(n >= 1);
    let mut b = Skeleton::new(1).vertex("v");
    for i in 0..n {
        b = b.edge(&letter(i), 1, "v", "v");
    }
    KGraph::validate(b.build().expect("cuntz skeleton is well formed")).expect("cuntz validates")
}

/// A finite segment of the integer line as a rank-1 graph: five vertices
/// `x0..x4` and an edge `f{i}` from `x{i}` into `x{i-1}`.  The last vertex
/// receives nothing, so this only passes the source-tolerant validation.
pub fn line() -> Arc<KGraph> {
    let mut b = Skeleton::new(1);
    for i in 0..5 {
        b = b.vertex(&format!("x{i}"));
    }
    for i in 1..5 {
        b = b.edge(&format!("f{i}"), 1, &format!("x{}", i - 1), &format!("x{i}"));
    }
    KGraph::validate_allowing_sources(b.build().expect("line skeleton is well formed"))
        .expect("line validates when sources are allowed")
}

/// Rank-2 graph on two vertices whose colour-1 and colour-2 subgraphs are
/// both 2-cycles; the unique square structure links the cycles crosswise.
pub fn double_cycle() -> Arc<KGraph> {
    let skel = Skeleton::new(2)
        .vertex("u")
        .vertex("v")
        .edge("a1", 1, "u", "v")
        .edge("b1", 1, "v", "u")
        .edge("a2", 2, "u", "v")
        .edge("b2", 2, "v", "u")
        .square(["a1", "b2"], ["a2", "b1"])
        .square(["b1", "a2"], ["b2", "a1"])
        .build()
        .expect("double cycle skeleton is well formed");
    KGraph::validate(skel).expect("double cycle validates")
}

/// Cartesian product of two rank-1 graphs as a rank-2 graph.  Vertices are
/// pairs `v|w`; colour 1 moves in the first factor, colour 2 in the second,
/// and the squares say the two moves commute.
pub fn product(g1: &KGraph, g2: &KGraph) -> Arc<KGraph> {
    assert_eq!(g1.k, 1, "first factor must have rank 1");
    assert_eq!(g2.k, 1, "second factor must have rank 1");
    let pair = |a: &str, b: &str| format!("{a}|{b}");
    let mut builder = Skeleton::new(2);
    for v in g1.vertices() {
        for w in g2.vertices() {
            builder = builder.vertex(&pair(g1.vertex_name(v), g2.vertex_name(w)));
        }
    }
    for e in g1.edge_ids() {
        let d = g1.edge(e);
        for w in g2.vertices() {
            let wn = g2.vertex_name(w);
            builder = builder.edge(
                &pair(&d.name, wn),
                1,
                &pair(g1.vertex_name(d.range), wn),
                &pair(g1.vertex_name(d.source), wn),
            );
        }
    }
    for f in g2.edge_ids() {
        let d = g2.edge(f);
        for v in g1.vertices() {
            let vn = g1.vertex_name(v);
            builder = builder.edge(
                &pair(vn, &d.name),
                2,
                &pair(vn, g2.vertex_name(d.range)),
                &pair(vn, g2.vertex_name(d.source)),
            );
        }
    }
    for e in g1.edge_ids() {
        let de = g1.edge(e);
        for f in g2.edge_ids() {
            let df = g2.edge(f);
            let (re, se) = (g1.vertex_name(de.range), g1.vertex_name(de.source));
            let (rf, sf) = (g2.vertex_name(df.range), g2.vertex_name(df.source));
            builder = builder.square(
                [pair(&de.name, rf).as_str(), pair(se, &df.name).as_str()],
                [pair(re, &df.name).as_str(), pair(&de.name, sf).as_str()],
            );
        }
    }
    let skel = builder.build().expect("product skeleton is well formed");
    if g1.no_sources() && g2.no_sources() {
        KGraph::validate(skel).expect("product of source-free graphs validates")
    } else {
        KGraph::validate_allowing_sources(skel).expect("product validates")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::DegreeVector;

    #[test]
    fn double_cycle_counts() {
        let g = double_cycle();
        assert_eq!(g.vertex_count(), 2);
        // one path of each degree out of each vertex
        for d in DegreeVector::box_below(&DegreeVector(vec![2, 2])) {
            assert_eq!(g.paths(&d).len(), 2, "degree {d}");
        }
    }

    #[test]
    fn product_of_loops_is_torus_like() {
        let g = product(&cuntz(1), &cuntz(2));
        assert_eq!(g.k, 2);
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.paths(&DegreeVector(vec![1, 1])).len(), 2);
        assert_eq!(g.paths(&DegreeVector(vec![2, 2])).len(), 4);
    }

    #[test]
    fn product_of_lines_has_sources() {
        let g = product(&line(), &line());
        assert!(!g.no_sources());
        assert_eq!(g.vertex_count(), 25);
        assert_eq!(g.paths(&DegreeVector(vec![1, 1])).len(), 16);
    }
}
