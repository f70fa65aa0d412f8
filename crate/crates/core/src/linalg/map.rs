use super::matrix::Matrix;
use super::rational::{add, Rational, Vector};

/// `x ↦ A x + b`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    pub matrix: Matrix,
    pub offset: Vector,
}

impl AffineMap {
    pub fn new(matrix: Matrix, offset: Vector) -> Self {
        assert_eq!(matrix.rows(), offset.len(), "offset length");
        AffineMap { matrix, offset }
    }

    pub fn linear(matrix: Matrix) -> Self {
        let n = matrix.rows();
        AffineMap::new(matrix, vec![Rational::from_integer(0.into()); n])
    }

    pub fn apply(&self, x: &[Rational]) -> Vector {
        add(&self.matrix.mul_vec(x), &self.offset)
    }

    pub fn domain_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn codomain_dim(&self) -> usize {
        self.matrix.rows()
    }
}
