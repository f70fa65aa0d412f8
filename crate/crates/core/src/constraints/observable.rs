use num_traits::Zero;

use crate::error::{dim_check, Error, Result};
use crate::linalg::rational::{add, dot, int, one, scale, sub, zeros, Rational, Vector};
use crate::linalg::Matrix;
use crate::symplectic::SymplecticSpace;

/// Polynomial observable of degree at most two, `f(x) = ½ xᵀ Q x + lᵀ x + c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Observable {
    quadratic: Matrix,
    linear: Vector,
    constant: Rational,
}

impl Observable {
    pub fn new(quadratic: Matrix, linear: Vector, constant: Rational) -> Result<Self> {
        if !quadratic.is_symmetric() {
            return Err(Error::Invalid("quadratic part is not symmetric".into()));
        }
        dim_check(quadratic.rows() == linear.len(), || {
            format!(
                "quadratic part of size {} with linear part of length {}",
                quadratic.rows(),
                linear.len()
            )
        })?;
        Ok(Observable {
            quadratic,
            linear,
            constant,
        })
    }

    pub fn affine(linear: Vector, constant: Rational) -> Self {
        let n = linear.len();
        Observable {
            quadratic: Matrix::zeros(n, n),
            linear,
            constant,
        }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Observable::affine(zeros(n), c)
    }

    pub fn zero(n: usize) -> Self {
        Observable::constant(n, Rational::zero())
    }

    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut l = zeros(n);
        l[i] = one();
        Observable::affine(l, Rational::zero())
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn quadratic_part(&self) -> &Matrix {
        &self.quadratic
    }

    pub fn linear_part(&self) -> &[Rational] {
        &self.linear
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn is_affine(&self) -> bool {
        self.quadratic.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.is_affine() && self.linear.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        let half = one() / int(2);
        half * dot(x, &self.quadratic.mul_vec(x)) + dot(&self.linear, x) + &self.constant
    }

    pub fn gradient(&self, x: &[Rational]) -> Vector {
        add(&self.quadratic.mul_vec(x), &self.linear)
    }

    pub fn add(&self, other: &Observable) -> Observable {
        Observable {
            quadratic: self.quadratic.add(&other.quadratic),
            linear: add(&self.linear, &other.linear),
            constant: &self.constant + &other.constant,
        }
    }

    pub fn sub(&self, other: &Observable) -> Observable {
        Observable {
            quadratic: self.quadratic.sub(&other.quadratic),
            linear: sub(&self.linear, &other.linear),
            constant: &self.constant - &other.constant,
        }
    }

    pub fn scale(&self, c: &Rational) -> Observable {
        Observable {
            quadratic: self.quadratic.scale(c),
            linear: scale(c, &self.linear),
            constant: &self.constant * c,
        }
    }

    pub fn shift(&self, c: &Rational) -> Observable {
        let mut out = self.clone();
        out.constant += c;
        out
    }

    /// `z ↦ f(x₀ + B z)`
    pub fn pullback(&self, base: &[Rational], basis: &Matrix) -> Result<Observable> {
        dim_check(base.len() == self.dim() && basis.rows() == self.dim(), || {
            format!(
                "pullback through {}x{} from dimension {}",
                basis.rows(),
                basis.cols(),
                self.dim()
            )
        })?;
        let bt = basis.transpose();
        Ok(Observable {
            quadratic: bt.mul(&self.quadratic).mul(basis),
            linear: bt.mul_vec(&self.gradient(base)),
            constant: self.eval(base),
        })
    }

    /// Product of two affine observables.
    pub fn mul(&self, other: &Observable) -> Result<Observable> {
        if !self.is_affine() || !other.is_affine() {
            return Err(Error::Invalid(
                "products are only closed for affine factors".into(),
            ));
        }
        let n = self.dim();
        // (a·x + c)(b·x + d) = xᵀ (a bᵀ) x + (d a + c b)·x + c d
        let mut q = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                q[(i, j)] = &self.linear[i] * &other.linear[j] + &self.linear[j] * &other.linear[i];
            }
        }
        let linear = add(
            &scale(&other.constant, &self.linear),
            &scale(&self.constant, &other.linear),
        );
        Ok(Observable {
            quadratic: q,
            linear,
            constant: &self.constant * &other.constant,
        })
    }
}

/// `{F, G} = dFᵀ Π dG` for a constant bivector `Π`.
pub fn bracket_with_tensor(pi: &Matrix, f: &Observable, g: &Observable) -> Observable {
    let qf_pi = f.quadratic.mul(pi);
    let m = qf_pi.mul(&g.quadratic);
    let quadratic = m.add(&m.transpose());
    let lf_pi = pi.left_mul_vec(&f.linear);
    let linear = add(
        &qf_pi.mul_vec(&g.linear),
        &g.quadratic.left_mul_vec(&lf_pi),
    );
    let constant = dot(&lf_pi, &g.linear);
    Observable {
        quadratic,
        linear,
        constant,
    }
}

pub fn poisson_bracket(space: &SymplecticSpace, f: &Observable, g: &Observable) -> Observable {
    bracket_with_tensor(space.poisson_tensor(), f, g)
}

/// Hamiltonian field `x ↦ Π dF(x)`.
pub fn hamiltonian_field(pi: &Matrix, f: &Observable) -> crate::linalg::AffineMap {
    crate::linalg::AffineMap::new(pi.mul(&f.quadratic), pi.mul_vec(&f.linear))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::ints;

    #[test]
    fn canonical_brackets() {
        let s = SymplecticSpace::canonical(1);
        let q = Observable::coordinate(2, 0);
        let p = Observable::coordinate(2, 1);
        assert_eq!(poisson_bracket(&s, &q, &p), Observable::constant(2, one()));
        assert_eq!(poisson_bracket(&s, &p, &q), Observable::constant(2, -one()));
    }

    #[test]
    fn bracket_with_energy_gives_equations_of_motion() {
        let s = SymplecticSpace::canonical(1);
        // H = ½ (q² + p²)
        let h = Observable::new(Matrix::identity(2), zeros(2), Rational::zero()).unwrap();
        let q = Observable::coordinate(2, 0);
        let p = Observable::coordinate(2, 1);
        // q̇ = {q, H} = p, ṗ = {p, H} = -q
        assert_eq!(poisson_bracket(&s, &q, &h), p);
        assert_eq!(poisson_bracket(&s, &p, &h), q.scale(&-one()));
    }

    #[test]
    fn products_evaluate_pointwise() {
        let a = Observable::affine(ints(&[1, 2]), int(3));
        let b = Observable::affine(ints(&[-1, 1]), int(1));
        let ab = a.mul(&b).unwrap();
        let x = ints(&[2, -5]);
        assert_eq!(ab.eval(&x), a.eval(&x) * b.eval(&x));
        assert!(ab.mul(&a).is_err());
    }
}
