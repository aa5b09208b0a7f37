//! Randomized verification of the Smith normal form against independent
//! oracles: the transformation identity, unimodularity of the change of
//! basis, the divisibility chain, and the determinantal-divisor formula
//! (products of the diagonal equal gcds of minors computed by a separate
//! fraction-free determinant).

use num::{BigInt, Integer, One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use kgl_core::snf::{cokernel, smith_normal_form, IntMatrix};

const MATRICES: usize = 500;

/// Fraction-free (Bareiss) determinant over selected rows and columns,
/// written here so the oracle shares no code with the routine under test.
fn minor_det(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> BigInt {
    let n = rows.len();
    assert_eq!(n, cols.len());
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| m.get(r, c).clone()).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(swap) => {
                    a.swap(k, swap);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if k > n {
        return vec![];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// gcd of all `k x k` minors; `None` when every one of them vanishes.
fn determinantal_divisor(m: &IntMatrix, k: usize) -> Option<BigInt> {
    let mut g = BigInt::zero();
    for rows in combinations(m.rows, k) {
        for cols in combinations(m.cols, k) {
            g = g.gcd(&minor_det(m, &rows, &cols));
        }
    }
    if g.is_zero() {
        None
    } else {
        Some(g)
    }
}

fn random_matrix(rng: &mut StdRng) -> IntMatrix {
    let rows = rng.gen_range(1..=8);
    let cols = rng.gen_range(1..=8);
    IntMatrix::from_fn(rows, cols, |_, _| BigInt::from(rng.gen_range(-9i64..=9)))
}

#[test]
fn smith_form_agrees_with_independent_oracles() {
    let mut rng = StdRng::seed_from_u64(0x6b67_6c04);
    let started = std::time::Instant::now();

    for round in 0..MATRICES {
        let m = random_matrix(&mut rng);
        let s = smith_normal_form(&m);

        // The defining identity u m v = d.
        assert_eq!(
            s.u.mul(&m).mul(&s.v),
            s.d,
            "transformation identity failed on round {round}"
        );

        // Unimodular changes of basis.
        assert_eq!(s.u.determinant().abs(), BigInt::one(), "u not unimodular");
        assert_eq!(s.v.determinant().abs(), BigInt::one(), "v not unimodular");

        // Nonnegative divisibility chain, zeroes trailing.
        for w in s.diag.windows(2) {
            assert!(!w[0].is_negative() && !w[1].is_negative());
            if w[1].is_zero() {
                continue;
            }
            assert!(!w[0].is_zero(), "zero before a nonzero diagonal entry");
            assert!(
                (&w[1] % &w[0]).is_zero(),
                "diagonal not a divisibility chain: {:?}",
                s.diag
            );
        }

        // Determinantal divisors: d1 ... dk = gcd of k x k minors.  Once the
        // gcd vanishes every larger one does too, so the scan stops there.
        let mut product = BigInt::one();
        for k in 1..=s.diag.len() {
            product *= &s.diag[k - 1];
            match determinantal_divisor(&m, k) {
                Some(g) => assert_eq!(
                    product, g,
                    "determinantal divisor mismatch at size {k} on round {round}"
                ),
                None => {
                    assert!(product.is_zero(), "minors vanish but diagonal does not");
                    break;
                }
            }
        }

        // Kernel basis vectors are genuine kernel elements and count
        // cols - rank of them.
        let kernel = s.kernel_basis();
        assert_eq!(kernel.len(), m.cols - s.rank);
        for vec in &kernel {
            let image = m.mul_vec(vec);
            assert!(image.iter().all(BigInt::is_zero), "kernel vector escapes");
        }

        // Cokernel presentation mirrors the diagonal.
        let coker = cokernel(&m);
        let expected_torsion: Vec<BigInt> = s
            .diag
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .cloned()
            .collect();
        assert_eq!(coker.torsion, expected_torsion);
        assert_eq!(coker.free_rank, m.rows - s.rank);
    }

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "suite took {elapsed:?}, budget is 10s"
    );
}

#[test]
fn solver_round_trips_on_random_systems() {
    let mut rng = StdRng::seed_from_u64(0x6b67_6c05);
    for _ in 0..200 {
        let m = random_matrix(&mut rng);
        let s = smith_normal_form(&m);
        // Build a guaranteed-solvable right-hand side and recover a preimage.
        let x: Vec<BigInt> = (0..m.cols)
            .map(|_| BigInt::from(rng.gen_range(-4i64..=4)))
            .collect();
        let b = m.mul_vec(&x);
        let solved = s.solve_z(&b).expect("constructed to be solvable");
        assert_eq!(m.mul_vec(&solved), b, "solution does not reproduce b");
    }
}
