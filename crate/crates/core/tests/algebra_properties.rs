//! Randomized law checking for the twisted symbolic algebra: associativity,
//! the adjoint anti-homomorphism, additivity of the integer grading, and
//! compatibility of character specialization with the product.  Everything
//! is exact — equality goes through the graded expansion, never through
//! floating point.

use std::sync::Arc;

use num::rational::BigRational;
use num::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use kgl_core::algebra::{
    equals, grading_components, involution, specialize, star_product, AlgebraElement,
};
use kgl_core::catalog;
use kgl_core::cocycle::{character_apply, Cocycle2};
use kgl_core::degree::DegreeVector;
use kgl_core::graph::{KGraph, Path};
use kgl_core::scalar::Scalar;
use kgl_core::value::{AbelianValue, Character, ValueGroup};

/// Triples checked per (graph, cocycle) configuration; six configurations
/// push the grand total past one thousand.
const TRIPLES_PER_CONFIG: usize = 170;

fn int_bilinear(k: usize) -> Cocycle2 {
    let mut matrix = vec![vec![AbelianValue::int(0); k]; k];
    if k == 1 {
        matrix[0][0] = AbelianValue::int(1);
    } else {
        matrix[1][0] = AbelianValue::int(1);
    }
    Cocycle2::DegreeBilinear {
        group: ValueGroup::Int,
        matrix,
    }
}

fn configurations() -> Vec<(&'static str, Arc<KGraph>, Cocycle2)> {
    let mut out = Vec::new();
    for (name, g) in [
        ("torus", catalog::torus(2)),
        ("one-vertex", catalog::cuntz(2)),
        ("double-cycle", catalog::double_cycle()),
    ] {
        out.push((name, g.clone(), Cocycle2::zero(ValueGroup::Int, g.k)));
        out.push((name, g.clone(), int_bilinear(g.k)));
    }
    out
}

fn random_degree(rng: &mut StdRng, k: usize, max: u32) -> DegreeVector {
    DegreeVector((0..k).map(|_| rng.gen_range(0..=max)).collect())
}

fn random_path(rng: &mut StdRng, g: &KGraph, max: u32) -> Path {
    loop {
        let d = random_degree(rng, g.k, max);
        let paths = g.paths(&d);
        if !paths.is_empty() {
            return paths[rng.gen_range(0..paths.len())].clone();
        }
    }
}

/// A random term `q * s_lam u_a s_mu*`: the legs share a source, the group
/// value is a small integer, the coefficient a small Gaussian rational.
fn random_term(rng: &mut StdRng, g: &KGraph) -> AlgebraElement {
    let lam = random_path(rng, g, 1);
    let mu = loop {
        let candidate = random_path(rng, g, 1);
        if candidate.source() == lam.source() {
            break candidate;
        }
    };
    let a = AbelianValue::Int(BigInt::from(rng.gen_range(-3i64..=3)));
    let q = Scalar::gaussian(
        BigRational::from(BigInt::from(rng.gen_range(-2i64..=2))),
        BigRational::from(BigInt::from(rng.gen_range(-2i64..=2))),
    );
    AlgebraElement::term(g, lam, a, mu, q).expect("legs share a source")
}

fn random_element(rng: &mut StdRng, g: &KGraph) -> AlgebraElement {
    let mut out = random_term(rng, g);
    if rng.gen_bool(0.5) {
        out = out.add(&random_term(rng, g)).expect("same graph and group");
    }
    out
}

#[test]
fn product_laws_hold_on_random_triples() {
    let mut rng = StdRng::seed_from_u64(0x6b67_6c01);
    let chi = Character::IntTurns(BigRational::new(BigInt::from(1), BigInt::from(8)));
    let mut total = 0usize;

    for (name, g, c) in configurations() {
        let folded = character_apply(&c, &chi).expect("integer cocycles specialize");
        for round in 0..TRIPLES_PER_CONFIG {
            let x = random_element(&mut rng, &g);
            let y = random_element(&mut rng, &g);
            let z = random_element(&mut rng, &g);

            // Associativity.
            let xy = star_product(&g, &c, &x, &y).expect("product");
            let yz = star_product(&g, &c, &y, &z).expect("product");
            let left = star_product(&g, &c, &xy, &z).expect("product");
            let right = star_product(&g, &c, &x, &yz).expect("product");
            assert!(
                equals(&g, &c, &left, &right).expect("comparable"),
                "associativity failed on {name} round {round}"
            );

            // The adjoint reverses products.
            let lhs = involution(&xy);
            let rhs = star_product(&g, &c, &involution(&y), &involution(&x)).expect("product");
            assert!(
                equals(&g, &c, &lhs, &rhs).expect("comparable"),
                "adjoint anti-homomorphism failed on {name} round {round}"
            );

            // The integer grading adds under multiplication: every graded
            // component of x*y sits at a key reachable as deg_x + deg_y.
            let x_keys: Vec<_> = grading_components(&x).into_keys().collect();
            let y_keys: Vec<_> = grading_components(&y).into_keys().collect();
            for key in grading_components(&xy).into_keys() {
                let reachable = x_keys
                    .iter()
                    .any(|a| y_keys.iter().any(|b| a.add(b) == key));
                assert!(
                    reachable,
                    "grading key {key:?} not a sum of factor gradings on {name}"
                );
            }

            // Character specialization is a homomorphism onto the
            // phase-folded product.
            let spec_xy = specialize(&g, &xy, &chi).expect("specialize");
            let spec_x = specialize(&g, &x, &chi).expect("specialize");
            let spec_y = specialize(&g, &y, &chi).expect("specialize");
            let folded_product =
                star_product(&g, &folded, &spec_x, &spec_y).expect("folded product");
            assert!(
                equals(&g, &folded, &spec_xy, &folded_product).expect("comparable"),
                "specialization is not multiplicative on {name} round {round}"
            );

            total += 1;
        }
    }
    assert!(total >= 1000, "only {total} triples checked");
}

#[test]
fn unit_and_vertices_behave() {
    let mut rng = StdRng::seed_from_u64(0x6b67_6c02);
    for (name, g, c) in configurations() {
        let unit = AlgebraElement::unit(&g, ValueGroup::Int);
        for _ in 0..20 {
            let x = random_element(&mut rng, &g);
            let left = star_product(&g, &c, &unit, &x).expect("product");
            let right = star_product(&g, &c, &x, &unit).expect("product");
            assert!(
                equals(&g, &c, &left, &x).expect("comparable"),
                "left unit failed on {name}"
            );
            assert!(
                equals(&g, &c, &right, &x).expect("comparable"),
                "right unit failed on {name}"
            );
        }

        // Vertex projections are orthogonal idempotents summing to the unit.
        let mut sum = AlgebraElement::zero(&g, ValueGroup::Int);
        for v in g.vertices() {
            let p = AlgebraElement::vertex(&g, ValueGroup::Int, v);
            let pp = star_product(&g, &c, &p, &p).expect("product");
            assert!(equals(&g, &c, &pp, &p).expect("comparable"));
            sum = sum.add(&p).expect("same group");
        }
        assert!(equals(&g, &c, &sum, &unit).expect("comparable"));
    }
}
