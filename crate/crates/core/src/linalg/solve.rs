use num_traits::{One, Zero};

use super::matrix::Matrix;
use super::rational::{dot, Rational, Vector};

#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

/// Gauss-Jordan elimination pivoting only in columns `< limit`. Returns pivot columns;
/// row `i` of the result has its leading one at `pivots[i]`.
fn eliminate(m: &mut Matrix, limit: usize) -> Vec<usize> {
    let rows = m.rows();
    let cols = m.cols();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..limit.min(cols) {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        m.swap_rows(r, p);
        let inv = Rational::one() / &m[(r, c)];
        if !inv.is_one() {
            for x in m.row_mut(r).iter_mut().skip(c) {
                *x *= &inv;
            }
        }
        let pivot_row: Vector = m.row(r).to_vec();
        for i in 0..rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let factor = m[(i, c)].clone();
            let row = m.row_mut(i);
            for j in c..cols {
                if !pivot_row[j].is_zero() {
                    row[j] -= &factor * &pivot_row[j];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rref(m: &Matrix) -> Rref {
    let mut reduced = m.clone();
    let pivots = eliminate(&mut reduced, m.cols());
    let rank = pivots.len();
    Rref {
        reduced,
        pivots,
        rank,
    }
}

/// Basis of `{x | A x = 0}`, one vector per free column, normalised to 1 there.
pub fn kernel(a: &Matrix) -> Vec<Vector> {
    let r = rref(a);
    kernel_from_rref(&r, a.cols())
}

fn kernel_from_rref(r: &Rref, n: usize) -> Vec<Vector> {
    let mut is_pivot = vec![false; n];
    for &p in &r.pivots {
        is_pivot[p] = true;
    }
    let mut out = Vec::new();
    for f in (0..n).filter(|&j| !is_pivot[j]) {
        let mut v = vec![Rational::zero(); n];
        v[f] = Rational::one();
        for (i, &p) in r.pivots.iter().enumerate() {
            v[p] = -&r.reduced[(i, f)];
        }
        out.push(v);
    }
    out
}

/// Factorisation `T A = R` of a fixed matrix, reusable for many right-hand sides.
#[derive(Clone, Debug)]
pub struct Solver {
    rows: usize,
    cols: usize,
    reduced: Matrix,
    transform: Matrix,
    pivots: Vec<usize>,
}

impl Solver {
    pub fn new(a: &Matrix) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let mut aug = a.hstack(&Matrix::identity(m));
        let pivots = eliminate(&mut aug, n);
        Solver {
            rows: m,
            cols: n,
            reduced: aug.block(0, 0, m, n),
            transform: aug.block(0, n, m, m),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Particular solution with all free variables zero, or `None` if inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vector> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let c = self.transform.mul_vec(b);
        if c[self.rank()..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &p) in self.pivots.iter().enumerate() {
            x[p] = c[i].clone();
        }
        Some(x)
    }

    /// Covectors `y` with `yᵀ A = 0`; `A x = b` is solvable iff `y·b = 0` for all of them.
    pub fn left_kernel(&self) -> Vec<Vector> {
        (self.rank()..self.rows)
            .map(|i| self.transform.row(i).to_vec())
            .collect()
    }

    pub fn is_consistent(&self, b: &[Rational]) -> bool {
        self.left_kernel().iter().all(|y| dot(y, b).is_zero())
    }

    /// Matrix `P` with `A (P b) = b` whenever `b` is consistent.
    pub fn particular_map(&self) -> Matrix {
        let mut p = Matrix::zeros(self.cols, self.rows);
        for (i, &piv) in self.pivots.iter().enumerate() {
            for k in 0..self.rows {
                p[(piv, k)] = self.transform[(i, k)].clone();
            }
        }
        p
    }

    pub fn kernel(&self) -> Vec<Vector> {
        let r = Rref {
            reduced: self.reduced.clone(),
            pivots: self.pivots.clone(),
            rank: self.pivots.len(),
        };
        kernel_from_rref(&r, self.cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::{int, ints, ratio};

    #[test]
    fn rref_of_small_matrix() {
        let a = Matrix::from_i64(&[&[2, 4, 6], &[1, 2, 4], &[3, 6, 10]]);
        let r = rref(&a);
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivots, vec![0, 2]);
        assert_eq!(r.reduced.row(0), &ints(&[1, 2, 0])[..]);
        assert_eq!(r.reduced.row(1), &ints(&[0, 0, 1])[..]);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let a = Matrix::from_i64(&[&[1, 1, 1, 0], &[0, 1, -1, 2]]);
        let k = kernel(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn solver_detects_inconsistency() {
        let a = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        let s = Solver::new(&a);
        assert!(s.solve(&ints(&[1, 3])).is_none());
        let x = s.solve(&ints(&[1, 2])).unwrap();
        assert_eq!(a.mul_vec(&x), ints(&[1, 2]));
        assert_eq!(s.left_kernel().len(), 1);
    }

    #[test]
    fn particular_map_reproduces_rhs() {
        let a = Matrix::from_i64(&[&[1, 0, 2], &[0, 3, 1], &[1, 3, 3]]);
        let s = Solver::new(&a);
        let b = vec![int(1), ratio(1, 2), ratio(3, 2)];
        assert!(s.is_consistent(&b));
        let x = s.particular_map().mul_vec(&b);
        assert_eq!(a.mul_vec(&x), b);
    }

    #[test]
    fn inverse_round_trip() {
        let a = Matrix::from_i64(&[&[2, 1], &[7, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        assert!(Matrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }
}
