//! Integer matrices, Smith normal form and the solvers built on it.
//!
//! The Smith form is computed with full transform tracking: `u * m * v = d`
//! with `u`, `v` unimodular and `d` diagonal with nonnegative entries in a
//! divisibility chain.  Everything downstream (cokernel presentations,
//! integer and rational linear solves, solves mod 1, kernel bases that span
//! a direct summand) reads off that data.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{} ", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> IntMatrix {
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        IntMatrix {
            rows: rows.len(),
            cols: ncols,
            data: rows
                .iter()
                .flat_map(|r| r.iter().map(|&x| BigInt::from(x)))
                .collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> IntMatrix {
        let mut m = IntMatrix::zero(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        IntMatrix::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = BigInt::zero();
            for j in 0..self.cols {
                acc += self.get(r, j) * other.get(j, c);
            }
            acc
        })
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = BigInt::zero();
                for c in 0..self.cols {
                    acc += self.get(r, c) * &x[c];
                }
                acc
            })
            .collect()
    }

    pub fn mul_vec_rational(&self, x: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = BigRational::zero();
                for c in 0..self.cols {
                    acc += BigRational::from_integer(self.get(r, c).clone()) * &x[c];
                }
                acc
            })
            .collect()
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn scale(&self, n: i64) -> IntMatrix {
        IntMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) * BigInt::from(n))
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) + other.get(r, c))
    }

    /// Stack `self` on top of `other`.
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        IntMatrix::from_fn(self.rows + other.rows, self.cols, |r, c| {
            if r < self.rows {
                self.get(r, c).clone()
            } else {
                other.get(r - self.rows, c).clone()
            }
        })
    }

    /// Place `self` left of `other`.
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        IntMatrix::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.get(r, c).clone()
            } else {
                other.get(r, c - self.cols).clone()
            }
        })
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|r| (0..n).map(|c| self.get(r, c).clone()).collect()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for t in 0..n - 1 {
            if a[t][t].is_zero() {
                match (t + 1..n).find(|&r| !a[r][t].is_zero()) {
                    Some(r) => {
                        a.swap(t, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for r in t + 1..n {
                for c in t + 1..n {
                    let num = &a[t][t] * &a[r][c] - &a[r][t] * &a[t][c];
                    a[r][c] = num.div_floor(&prev);
                }
                a[r][t] = BigInt::zero();
            }
            prev = a[t][t].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }
}

/// `u * m * v = d` with `d` diagonal, nonnegative, `d1 | d2 | ...`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
    /// The diagonal of `d`, length `min(rows, cols)`.
    pub diag: Vec<BigInt>,
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    fn row_swap(m: &mut IntMatrix, a: usize, b: usize) {
        for c in 0..m.cols {
            let (x, y) = (m.get(a, c).clone(), m.get(b, c).clone());
            m.set(a, c, y);
            m.set(b, c, x);
        }
    }
    fn col_swap(m: &mut IntMatrix, a: usize, b: usize) {
        for r in 0..m.rows {
            let (x, y) = (m.get(r, a).clone(), m.get(r, b).clone());
            m.set(r, a, y);
            m.set(r, b, x);
        }
    }
    // row a -= q * row b
    fn row_submul(m: &mut IntMatrix, a: usize, b: usize, q: &BigInt) {
        for c in 0..m.cols {
            let val = m.get(a, c) - q * m.get(b, c);
            m.set(a, c, val);
        }
    }
    fn col_submul(m: &mut IntMatrix, a: usize, b: usize, q: &BigInt) {
        for r in 0..m.rows {
            let val = m.get(r, a) - q * m.get(r, b);
            m.set(r, a, val);
        }
    }
    fn col_add(m: &mut IntMatrix, a: usize, b: usize) {
        for r in 0..m.rows {
            let val = m.get(r, a) + m.get(r, b);
            m.set(r, a, val);
        }
    }

    let n = rows.min(cols);
    for t in 0..n {
        'position: loop {
            // smallest nonzero entry of the trailing block into (t, t)
            let mut pivot: Option<(usize, usize)> = None;
            for r in t..rows {
                for c in t..cols {
                    if !d.get(r, c).is_zero()
                        && pivot.map_or(true, |(pr, pc)| d.get(r, c).abs() < d.get(pr, pc).abs())
                    {
                        pivot = Some((r, c));
                    }
                }
            }
            let Some((pr, pc)) = pivot else { break 'position };
            if pr != t {
                row_swap(&mut d, pr, t);
                row_swap(&mut u, pr, t);
            }
            if pc != t {
                col_swap(&mut d, pc, t);
                col_swap(&mut v, pc, t);
            }
            let mut dirty = false;
            for r in t + 1..rows {
                if !d.get(r, t).is_zero() {
                    let q = d.get(r, t) / d.get(t, t);
                    if !q.is_zero() {
                        row_submul(&mut d, r, t, &q);
                        row_submul(&mut u, r, t, &q);
                    }
                    if !d.get(r, t).is_zero() {
                        dirty = true;
                    }
                }
            }
            for c in t + 1..cols {
                if !d.get(t, c).is_zero() {
                    let q = d.get(t, c) / d.get(t, t);
                    if !q.is_zero() {
                        col_submul(&mut d, c, t, &q);
                        col_submul(&mut v, c, t, &q);
                    }
                    if !d.get(t, c).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'position;
            }
            // divisibility: d[t][t] must divide the trailing block
            let mut fix = None;
            'scan: for r in t + 1..rows {
                for c in t + 1..cols {
                    if !d.get(r, c).mod_floor(d.get(t, t)).is_zero() {
                        fix = Some(c);
                        break 'scan;
                    }
                }
            }
            match fix {
                Some(c) => {
                    col_add(&mut d, t, c);
                    col_add(&mut v, t, c);
                }
                None => break 'position,
            }
        }
        if d.get(t, t).is_negative() {
            for c in 0..cols {
                let neg = -d.get(t, c);
                d.set(t, c, neg);
            }
            for c in 0..rows {
                let neg = -u.get(t, c);
                u.set(t, c, neg);
            }
        }
    }

    let diag: Vec<BigInt> = (0..n).map(|i| d.get(i, i).clone()).collect();
    let rank = diag.iter().filter(|x| !x.is_zero()).count();
    SmithForm { d, u, v, rank, diag }
}

impl SmithForm {
    /// Columns of `v` spanning the integer kernel; they extend to a basis of
    /// the ambient lattice, so the kernel is a direct summand on this basis.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        (self.rank..self.v.cols).map(|c| self.v.column(c)).collect()
    }

    /// Solve `m x = b` over the integers.
    pub fn solve_z(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(b.len(), self.u.cols);
        let ub = self.u.mul_vec(b);
        let mut y = vec![BigInt::zero(); self.v.rows];
        for (i, ubi) in ub.iter().enumerate() {
            if i < self.rank {
                let (q, r) = ubi.div_rem(&self.diag[i]);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            } else if !ubi.is_zero() {
                return None;
            }
        }
        Some(self.v.mul_vec(&y))
    }

    /// Solve `m x = b` over the rationals.
    pub fn solve_q(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(b.len(), self.u.cols);
        let ub = self.u.mul_vec_rational(b);
        let mut y = vec![BigRational::zero(); self.v.rows];
        for (i, ubi) in ub.iter().enumerate() {
            if i < self.rank {
                y[i] = ubi / BigRational::from_integer(self.diag[i].clone());
            } else if !ubi.is_zero() {
                return None;
            }
        }
        Some(self.v.mul_vec_rational(&y))
    }

    /// Solve `m x = b (mod 1)` for rational `x`, i.e. in `Q/Z` coordinates.
    pub fn solve_mod_one(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(b.len(), self.u.cols);
        let ub = self.u.mul_vec_rational(b);
        let mut y = vec![BigRational::zero(); self.v.rows];
        for (i, ubi) in ub.iter().enumerate() {
            if i < self.rank {
                y[i] = ubi / BigRational::from_integer(self.diag[i].clone());
            } else if !ubi.denom().is_one() {
                return None;
            }
        }
        Some(self.v.mul_vec_rational(&y))
    }
}

/// `Z^n / im(m)` as torsion factors (each at least 2, in a divisibility
/// chain) plus a free rank, with the map sending a vector to its coordinates.
#[derive(Clone, Debug)]
pub struct CokernelPresentation {
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
    u: IntMatrix,
    /// positions in the Smith diagonal with a torsion factor
    torsion_rows: Vec<usize>,
    rank: usize,
}

pub fn cokernel(m: &IntMatrix) -> CokernelPresentation {
    let s = smith_normal_form(m);
    let torsion_rows: Vec<usize> = (0..s.rank)
        .filter(|&i| s.diag[i] > BigInt::one())
        .collect();
    CokernelPresentation {
        torsion: torsion_rows.iter().map(|&i| s.diag[i].clone()).collect(),
        free_rank: m.rows - s.rank,
        u: s.u.clone(),
        torsion_rows,
        rank: s.rank,
    }
}

impl CokernelPresentation {
    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    /// Coordinates of the class of `x`: torsion coordinates reduced mod the
    /// corresponding invariant factor, then free coordinates.
    pub fn class_of(&self, x: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
        let ux = self.u.mul_vec(x);
        let torsion = self
            .torsion_rows
            .iter()
            .enumerate()
            .map(|(j, &i)| ux[i].mod_floor(&self.torsion[j]))
            .collect();
        let free = (self.rank..self.u.rows).map(|i| ux[i].clone()).collect();
        (torsion, free)
    }

    pub fn class_is_zero(&self, x: &[BigInt]) -> bool {
        let (t, f) = self.class_of(x);
        t.iter().all(BigInt::is_zero) && f.iter().all(BigInt::is_zero)
    }
}
