use num_traits::{One, Zero};

use super::matrix::Matrix;
use super::rational::{axpy, is_zero_vec, unit, Rational, Vector};
use super::solve::{kernel, rref};

/// Linear subspace of `Qⁿ` held in reduced column-echelon form.
///
/// Basis vector `j` has a one at coordinate `pivots[j]` and zeros at every other pivot
/// coordinate, so two subspaces are equal exactly when their representations are.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: (0..ambient).map(|i| unit(ambient, i)).collect(),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn span(ambient: usize, vectors: &[Vector]) -> Self {
        for v in vectors {
            assert_eq!(v.len(), ambient, "spanning vector length");
        }
        if vectors.is_empty() {
            return Subspace::zero(ambient);
        }
        let r = rref(&Matrix::from_rows(ambient, vectors));
        let basis = (0..r.rank).map(|i| r.reduced.row(i).to_vec()).collect();
        Subspace {
            ambient,
            basis,
            pivots: r.pivots,
        }
    }

    pub fn column_span(m: &Matrix) -> Self {
        Subspace::span(m.rows(), &m.column_vectors())
    }

    /// `{x | A x = 0}`
    pub fn kernel_of(a: &Matrix) -> Self {
        Subspace::span(a.cols(), &kernel(a))
    }

    /// `{x | a·x = 0 for every row a}`
    pub fn solutions_of(ambient: usize, rows: &[Vector]) -> Self {
        Subspace::kernel_of(&Matrix::from_rows(ambient, rows))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Basis vectors as the columns of an `ambient × dim` matrix.
    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_columns(self.ambient, &self.basis)
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    /// Coordinates with respect to the canonical basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vector> {
        assert_eq!(v.len(), self.ambient, "vector length");
        let coords: Vector = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut r = v.to_vec();
        for (c, b) in coords.iter().zip(&self.basis) {
            axpy(&mut r, &-c, b);
        }
        is_zero_vec(&r).then_some(coords)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn combine(&self, coords: &[Rational]) -> Vector {
        assert_eq!(coords.len(), self.dim(), "coordinate length");
        let mut v = vec![Rational::zero(); self.ambient];
        for (c, b) in coords.iter().zip(&self.basis) {
            axpy(&mut v, c, b);
        }
        v
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        assert_eq!(self.ambient, other.ambient, "ambient dimensions");
        self.basis.iter().all(|b| other.contains(b))
    }

    /// Covectors cutting out the subspace, one per non-pivot coordinate.
    pub fn equations(&self) -> Vec<Vector> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut a = vec![Rational::zero(); self.ambient];
                a[f] = Rational::one();
                for (b, &p) in self.basis.iter().zip(&self.pivots) {
                    a[p] = -&b[f];
                }
                a
            })
            .collect()
    }

    /// `U° ⊆ (Qⁿ)*`, represented in the same coordinate dimension.
    pub fn annihilator(&self) -> Subspace {
        Subspace::span(self.ambient, &self.equations())
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient dimensions");
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &vs)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient dimensions");
        if self.is_full() {
            return other.clone();
        }
        if other.is_full() {
            return self.clone();
        }
        let mut eqs = self.equations();
        eqs.extend(other.equations());
        Subspace::solutions_of(self.ambient, &eqs)
    }

    /// `{x | L x ∈ W}`
    pub fn preimage(l: &Matrix, w: &Subspace) -> Subspace {
        assert_eq!(l.rows(), w.ambient, "map codomain");
        let eqs: Vec<Vector> = w.equations().iter().map(|a| l.left_mul_vec(a)).collect();
        Subspace::solutions_of(l.cols(), &eqs)
    }

    /// `L(U)`
    pub fn image(&self, l: &Matrix) -> Subspace {
        assert_eq!(l.cols(), self.ambient, "map domain");
        let vs: Vec<Vector> = self.basis.iter().map(|b| l.mul_vec(b)).collect();
        Subspace::span(l.rows(), &vs)
    }

    /// `U × W ⊆ Qⁿ × Qᵐ`
    pub fn product(&self, other: &Subspace) -> Subspace {
        let n = self.ambient + other.ambient;
        let mut vs = Vec::with_capacity(self.dim() + other.dim());
        for b in &self.basis {
            let mut v = b.clone();
            v.resize(n, Rational::zero());
            vs.push(v);
        }
        for b in &other.basis {
            let mut v = vec![Rational::zero(); self.ambient];
            v.extend(b.iter().cloned());
            vs.push(v);
        }
        Subspace::span(n, &vs)
    }

    /// Extends a basis of `self` to a basis of `outer` by scanning the canonical basis of `outer`.
    pub fn complement_in(&self, outer: &Subspace) -> Vec<Vector> {
        let mut acc = self.clone();
        let mut extra = Vec::new();
        for b in outer.basis() {
            if !acc.contains(b) {
                extra.push(b.clone());
                let mut vs = acc.basis.clone();
                vs.push(b.clone());
                acc = Subspace::span(self.ambient, &vs);
            }
        }
        extra
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::ints;
    use proptest::prelude::*;

    fn small_vectors(n: usize, k: usize) -> impl Strategy<Value = Vec<Vector>> {
        prop::collection::vec(prop::collection::vec(-2i64..=2, n), 0..=k)
            .prop_map(|rows| rows.iter().map(|r| ints(r)).collect())
    }

    /// Rank by fraction-free Bareiss elimination over the integers.
    fn bareiss_rank(rows: &[Vector]) -> usize {
        use num_bigint::BigInt;
        if rows.is_empty() {
            return 0;
        }
        let mut m: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer()).collect())
            .collect();
        let (nr, nc) = (m.len(), m[0].len());
        let mut prev = BigInt::from(1);
        let mut rank = 0;
        for c in 0..nc {
            let Some(p) = (rank..nr).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            for i in rank + 1..nr {
                for j in c + 1..nc {
                    let v = (&m[rank][c] * &m[i][j] - &m[i][c] * &m[rank][j]) / &prev;
                    m[i][j] = v;
                }
                m[i][c] = BigInt::from(0);
            }
            prev = m[rank][c].clone();
            rank += 1;
        }
        rank
    }

    /// Intersection by solving `B_U a = B_W b` directly.
    fn intersect_by_coefficients(u: &Subspace, w: &Subspace) -> Subspace {
        let n = u.ambient_dim();
        let (ku, kw) = (u.dim(), w.dim());
        let mut big = Matrix::zeros(n, ku + kw);
        for i in 0..n {
            for j in 0..ku {
                big[(i, j)] = u.basis()[j][i].clone();
            }
            for j in 0..kw {
                big[(i, ku + j)] = -&w.basis()[j][i];
            }
        }
        let vs: Vec<Vector> = kernel(&big)
            .iter()
            .map(|c| u.combine(&c[..ku]))
            .collect();
        Subspace::span(n, &vs)
    }

    #[test]
    fn spans_are_canonical() {
        let a = Subspace::span(3, &[ints(&[1, 1, 0]), ints(&[0, 1, 1])]);
        let b = Subspace::span(3, &[ints(&[1, 2, 1]), ints(&[1, 0, -1])]);
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
        assert!(a.contains(&ints(&[2, 3, 1])));
        assert!(!a.contains(&ints(&[1, 0, 0])));
    }

    #[test]
    fn annihilator_of_line() {
        let l = Subspace::span(3, &[ints(&[1, 2, 3])]);
        let ann = l.annihilator();
        assert_eq!(ann.dim(), 2);
        for a in ann.basis() {
            assert!(crate::linalg::rational::dot(a, &ints(&[1, 2, 3])).is_zero());
        }
    }

    #[test]
    fn preimage_and_image() {
        let l = Matrix::from_i64(&[&[1, 1, 0], &[0, 0, 1]]);
        let w = Subspace::span(2, &[ints(&[1, 0])]);
        let pre = Subspace::preimage(&l, &w);
        assert_eq!(pre, Subspace::span(3, &[ints(&[1, 0, 0]), ints(&[0, 1, 0])]));
        assert_eq!(pre.image(&l), w);
    }

    #[test]
    fn complement_extends_basis() {
        let outer = Subspace::full(3);
        let inner = Subspace::span(3, &[ints(&[1, 1, 1])]);
        let extra = inner.complement_in(&outer);
        assert_eq!(extra.len(), 2);
        let mut all = inner.basis().to_vec();
        all.extend(extra);
        assert_eq!(Subspace::span(3, &all), outer);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn dimension_matches_bareiss_rank(vs in small_vectors(5, 6)) {
            prop_assert_eq!(Subspace::span(5, &vs).dim(), bareiss_rank(&vs));
        }

        #[test]
        fn sum_and_intersection_dimensions(a in small_vectors(5, 4), b in small_vectors(5, 4)) {
            let u = Subspace::span(5, &a);
            let w = Subspace::span(5, &b);
            let s = u.sum(&w);
            let i = u.intersect(&w);
            prop_assert_eq!(s.dim() + i.dim(), u.dim() + w.dim());
            prop_assert_eq!(&i, &intersect_by_coefficients(&u, &w));
            prop_assert!(i.is_subspace_of(&u) && i.is_subspace_of(&w));
            prop_assert!(u.is_subspace_of(&s) && w.is_subspace_of(&s));
        }

        #[test]
        fn annihilator_laws(a in small_vectors(5, 4), b in small_vectors(5, 4)) {
            let u = Subspace::span(5, &a);
            let w = Subspace::span(5, &b);
            prop_assert_eq!(u.annihilator().annihilator(), u.clone());
            prop_assert_eq!(u.annihilator().dim(), 5 - u.dim());
            prop_assert_eq!(u.sum(&w).annihilator(), u.annihilator().intersect(&w.annihilator()));
            prop_assert_eq!(u.intersect(&w).annihilator(), u.annihilator().sum(&w.annihilator()));
        }

        #[test]
        fn preimage_membership(entries in prop::collection::vec(-2i64..=2, 12), b in small_vectors(3, 2)) {
            let rows: Vec<Vector> = entries.chunks(4).map(ints).collect();
            let l = Matrix::from_rows(4, &rows);
            let w = Subspace::span(3, &b);
            let pre = Subspace::preimage(&l, &w);
            for v in pre.basis() {
                prop_assert!(w.contains(&l.mul_vec(v)));
            }
            let k = Subspace::kernel_of(&l);
            prop_assert!(k.is_subspace_of(&pre));
            prop_assert_eq!(pre.image(&l), w.intersect(&Subspace::full(4).image(&l)));
        }
    }
}
