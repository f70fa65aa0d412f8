use num_traits::Zero;

use super::matrix::Matrix;
use super::rational::{axpy, dot, sub, Rational, Vector};
use super::solve::Solver;
use super::subspace::Subspace;

/// `base + direction`, with the base reduced to vanish on the direction's pivot
/// coordinates so that equal sets compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineSubspace {
    base: Vector,
    direction: Subspace,
}

impl AffineSubspace {
    pub fn new(base: Vector, direction: Subspace) -> Self {
        assert_eq!(base.len(), direction.ambient_dim(), "base point length");
        let mut base = base;
        for (b, &p) in direction.basis().iter().zip(direction.pivots()) {
            let c = base[p].clone();
            axpy(&mut base, &-c, b);
        }
        AffineSubspace { base, direction }
    }

    pub fn linear(direction: Subspace) -> Self {
        let n = direction.ambient_dim();
        AffineSubspace::new(vec![Rational::zero(); n], direction)
    }

    pub fn full(n: usize) -> Self {
        AffineSubspace::linear(Subspace::full(n))
    }

    pub fn point(p: Vector) -> Self {
        let n = p.len();
        AffineSubspace::new(p, Subspace::zero(n))
    }

    /// Solution set of `rows · x = rhs`, or `None` when inconsistent.
    pub fn from_equations(ambient: usize, rows: &[Vector], rhs: &[Rational]) -> Option<Self> {
        assert_eq!(rows.len(), rhs.len(), "one right-hand side per equation");
        if rows.is_empty() {
            return Some(AffineSubspace::full(ambient));
        }
        let a = Matrix::from_rows(ambient, rows);
        let solver = Solver::new(&a);
        let x = solver.solve(rhs)?;
        Some(AffineSubspace::new(
            x,
            Subspace::span(ambient, &solver.kernel()),
        ))
    }

    pub fn base(&self) -> &[Rational] {
        &self.base
    }

    pub fn direction(&self) -> &Subspace {
        &self.direction
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.direction.contains(&sub(x, &self.base))
    }

    pub fn is_subset_of(&self, other: &AffineSubspace) -> bool {
        other.contains(&self.base) && self.direction.is_subspace_of(&other.direction)
    }

    /// `base + B z` for coordinates `z` in the canonical direction basis.
    pub fn at(&self, z: &[Rational]) -> Vector {
        let mut x = self.base.clone();
        for (c, b) in z.iter().zip(self.direction.basis()) {
            axpy(&mut x, c, b);
        }
        x
    }

    /// Equations `a · x = c` describing the set, one per direction annihilator row.
    pub fn equations(&self) -> Vec<(Vector, Rational)> {
        self.direction
            .equations()
            .into_iter()
            .map(|a| {
                let c = dot(&a, &self.base);
                (a, c)
            })
            .collect()
    }

    /// Intersects with `{x | a_i · x = c_i}`. `None` if the result is empty.
    pub fn intersect_equations(&self, rows: &[Vector], rhs: &[Rational]) -> Option<Self> {
        assert_eq!(rows.len(), rhs.len(), "one right-hand side per equation");
        if rows.is_empty() {
            return Some(self.clone());
        }
        // Substitute x = base + B z and solve for z.
        let b = self.direction.basis_matrix();
        let reduced: Vec<Vector> = rows.iter().map(|a| b.left_mul_vec(a)).collect();
        let shifted: Vector = rows
            .iter()
            .zip(rhs)
            .map(|(a, c)| c - dot(a, &self.base))
            .collect();
        let k = self.dim();
        let zs = AffineSubspace::from_equations(k, &reduced, &shifted)?;
        let base = self.at(zs.base());
        let dirs: Vec<Vector> = zs
            .direction()
            .basis()
            .iter()
            .map(|z| b.mul_vec(z))
            .collect();
        Some(AffineSubspace::new(
            base,
            Subspace::span(self.ambient_dim(), &dirs),
        ))
    }

    pub fn intersect(&self, other: &AffineSubspace) -> Option<Self> {
        let (rows, rhs): (Vec<_>, Vec<_>) = other.equations().into_iter().unzip();
        self.intersect_equations(&rows, &rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::{int, ints};

    #[test]
    fn base_point_is_canonical() {
        let dir = Subspace::span(2, &[ints(&[1, 1])]);
        let a = AffineSubspace::new(ints(&[3, 5]), dir.clone());
        let b = AffineSubspace::new(ints(&[0, 2]), dir);
        assert_eq!(a, b);
    }

    #[test]
    fn equations_round_trip() {
        let a = AffineSubspace::new(ints(&[1, 2, 3]), Subspace::span(3, &[ints(&[1, 0, 1])]));
        let (rows, rhs): (Vec<_>, Vec<_>) = a.equations().into_iter().unzip();
        assert_eq!(AffineSubspace::from_equations(3, &rows, &rhs), Some(a));
    }

    #[test]
    fn inconsistent_intersection_is_empty() {
        let line = AffineSubspace::from_equations(2, &[ints(&[1, 0])], &[int(1)]).unwrap();
        assert!(line.intersect_equations(&[ints(&[1, 0])], &[int(2)]).is_none());
        let pt = line.intersect_equations(&[ints(&[0, 1])], &[int(4)]).unwrap();
        assert_eq!(pt, AffineSubspace::point(ints(&[1, 4])));
    }
}
