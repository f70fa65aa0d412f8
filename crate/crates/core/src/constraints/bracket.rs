use crate::error::{Error, Result};
use crate::linalg::rational::Rational;
use crate::linalg::{Matrix, Subspace};
use crate::symplectic::SymplecticSpace;

use super::observable::{poisson_bracket, Observable};

/// Second class constraints `χ` with `c_ij = {χ_i, χ_j}` invertible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiracBracketContext {
    space: SymplecticSpace,
    chi: Vec<Observable>,
    c_matrix: Matrix,
    c_inverse: Matrix,
    tensor: Matrix,
}

impl DiracBracketContext {
    pub fn new(space: SymplecticSpace, chi: Vec<Observable>) -> Result<Self> {
        let n = space.dim();
        if chi.is_empty() {
            return Err(Error::Invalid(
                "no second class constraints: the Dirac bracket is the Poisson bracket".into(),
            ));
        }
        for x in &chi {
            if !x.is_affine() || x.dim() != n {
                return Err(Error::Invalid(
                    "second class constraints must be affine on the phase space".into(),
                ));
            }
        }
        let pi = space.poisson_tensor();
        let k = chi.len();
        let grads = Matrix::from_columns(n, &chi.iter().map(|x| x.linear_part().to_vec()).collect::<Vec<_>>());
        let pi_a = pi.mul(&grads);
        let a_pi = grads.transpose().mul(pi);
        let c_matrix = a_pi.mul(&grads);
        let Some(c_inverse) = c_matrix.inverse() else {
            let dirs: Vec<String> = Subspace::kernel_of(&c_matrix)
                .basis()
                .iter()
                .map(|v| format_combination(v))
                .collect();
            return Err(Error::Singular(format!(
                "constraint bracket matrix of size {k} has rank {}; first class combinations: {}",
                c_matrix.rank(),
                dirs.join("; ")
            )));
        };
        let tensor = pi.sub(&pi_a.mul(&c_inverse).mul(&a_pi));
        Ok(DiracBracketContext {
            space,
            chi,
            c_matrix,
            c_inverse,
            tensor,
        })
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn chi(&self) -> &[Observable] {
        &self.chi
    }

    pub fn c_matrix(&self) -> &Matrix {
        &self.c_matrix
    }

    pub fn c_inverse(&self) -> &Matrix {
        &self.c_inverse
    }

    /// `Π_χ = Π - Π A c⁻¹ Aᵀ Π` with `A` the constraint differentials, so that
    /// `{F, G}_χ = dFᵀ Π_χ dG`.
    pub fn tensor(&self) -> &Matrix {
        &self.tensor
    }

    /// `{y_i, y_j}_χ` for the coordinate functions.
    pub fn coordinate_brackets(&self) -> &Matrix {
        &self.tensor
    }
}

fn format_combination(v: &[Rational]) -> String {
    let terms: Vec<String> = v
        .iter()
        .enumerate()
        .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
        .map(|(i, c)| format!("{c}*chi[{i}]"))
        .collect();
    terms.join(" + ")
}

/// `{F, G}_χ = {F, G} - {F, χ_i} c^{ij} {χ_j, G}`
pub fn dirac_bracket(ctx: &DiracBracketContext, f: &Observable, g: &Observable) -> Result<Observable> {
    let s = &ctx.space;
    let mut out = poisson_bracket(s, f, g);
    let f_chi: Vec<Observable> = ctx.chi.iter().map(|x| poisson_bracket(s, f, x)).collect();
    let chi_g: Vec<Observable> = ctx.chi.iter().map(|x| poisson_bracket(s, x, g)).collect();
    for (i, fi) in f_chi.iter().enumerate() {
        for (j, gj) in chi_g.iter().enumerate() {
            let c = &ctx.c_inverse[(i, j)];
            if num_traits::Zero::is_zero(c) {
                continue;
            }
            out = out.sub(&fi.mul(gj)?.scale(c));
        }
    }
    Ok(out)
}

/// `F_χ = F - χ_i c^{ij} {χ_j, F}`, equal to `F` on the constraint surface.
pub fn f_chi(ctx: &DiracBracketContext, f: &Observable) -> Result<Observable> {
    let s = &ctx.space;
    let brackets: Vec<Observable> = ctx.chi.iter().map(|x| poisson_bracket(s, x, f)).collect();
    let mut out = f.clone();
    for (i, xi) in ctx.chi.iter().enumerate() {
        for (j, bj) in brackets.iter().enumerate() {
            let c = &ctx.c_inverse[(i, j)];
            if num_traits::Zero::is_zero(c) {
                continue;
            }
            out = out.sub(&xi.mul(bj)?.scale(c));
        }
    }
    Ok(out)
}

/// Context for the shifted constraints `χ - C`.
pub fn leaf_family(ctx: &DiracBracketContext, values: &[Rational]) -> Result<DiracBracketContext> {
    if values.len() != ctx.chi.len() {
        return Err(Error::Dimension(format!(
            "{} shifts for {} constraints",
            values.len(),
            ctx.chi.len()
        )));
    }
    let shifted = ctx
        .chi
        .iter()
        .zip(values)
        .map(|(x, c)| x.shift(&-c))
        .collect();
    DiracBracketContext::new(ctx.space.clone(), shifted)
}
