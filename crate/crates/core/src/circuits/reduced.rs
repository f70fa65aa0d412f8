use num_traits::{One, Zero};

use crate::cad::{final_flow, pontryagin_form, CadResult};
use crate::constraints::{hamiltonian_field, Observable};
use crate::error::{dim_check, Error, Result};
use crate::linalg::rational::{add, dot, sub, unit, zeros, Rational, Vector};
use crate::linalg::{AffineMap, Matrix};
use crate::symplectic::{symplectic_gram_schmidt, SymplecticSpace};

use super::spaces::{circuit_system, CircuitSpaces};

/// `E = pv - ½ vᵀφv + ½ qᵀ C⁻¹ q` on `(q, v, p)`.
pub fn circuit_energy_on_pontryagin(cs: &CircuitSpaces) -> Result<Observable> {
    let e = circuit_system(cs)?.energy().clone();
    Observable::new(e.hessian().clone(), e.linear().to_vec(), e.constant().clone())
}

/// Hamiltonian system on a leaf `x₀ + W_c` in Darboux coordinates `z = (Q, P)`, with
/// `x = x₀ + B z` and the pulled-back form `dQ ∧ dP`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedSystem {
    pub base: Vector,
    /// Columns `e₁ … e_m, f₁ … f_m` in `(q, v, p)`.
    pub basis: Matrix,
    /// `H(z) = E(x₀ + B z)`
    pub hamiltonian: Observable,
    /// `ż = J ∇H`
    pub field: AffineMap,
    pub labels: Vec<String>,
}

impl ReducedSystem {
    pub fn half_dim(&self) -> usize {
        self.basis.cols() / 2
    }

    pub fn state(&self, z: &[Rational]) -> Vector {
        add(&self.base, &self.basis.mul_vec(z))
    }
}

/// Names a Darboux coordinate after the `(q, v, p)` coordinate it reproduces, if any.
fn coordinate_label(cs: &CircuitSpaces, basis: &Matrix, j: usize) -> String {
    let n = cs.n();
    let half = basis.cols() / 2;
    let momentum = j >= half;
    let range = if momentum { 2 * n..3 * n } else { 0..n };
    for i in range {
        let row = basis.row(i);
        if row[j].is_one() && row.iter().enumerate().all(|(k, x)| k == j || x.is_zero()) {
            return cs.pontryagin_labels()[i].clone();
        }
    }
    format!("{}{}", if momentum { "P" } else { "Q" }, j % half + 1)
}

/// Darboux parametrisation of the leaf through `base` and the reduced Hamiltonian.
pub fn reduced_system(cs: &CircuitSpaces, res: &CadResult, base: &[Rational]) -> Result<ReducedSystem> {
    let n = cs.n();
    dim_check(base.len() == 3 * n, || format!("base point of length {} for {} branches", base.len(), n))?;
    let m = res
        .final_set()
        .ok_or_else(|| Error::Inconsistent("the final constraint set is empty".into()))?;
    if !m.contains(base) {
        return Err(Error::Invalid("base point is not on the final constraint set".into()));
    }
    let omega = pontryagin_form(n);
    let pair = |a: &[Rational], b: &[Rational]| dot(a, &omega.mul_vec(b));
    let (es, fs, rest) = symplectic_gram_schmidt(res.final_tangent.basis().to_vec(), pair);
    if !rest.is_empty() {
        return Err(Error::Degenerate(format!(
            "the leaf form has a {}-dimensional kernel (empty loops); no reduced system",
            rest.len()
        )));
    }
    let mut cols = es;
    cols.extend(fs);
    let basis = Matrix::from_columns(3 * n, &cols);
    let hamiltonian = circuit_energy_on_pontryagin(cs)?.pullback(base, &basis)?;
    let space = SymplecticSpace::canonical(basis.cols() / 2);
    let field = hamiltonian_field(space.poisson_tensor(), &hamiltonian);
    let labels = (0..basis.cols())
        .map(|j| coordinate_label(cs, &basis, j))
        .collect();
    Ok(ReducedSystem {
        base: base.to_vec(),
        basis,
        hamiltonian,
        field,
        labels,
    })
}

/// Checks `B ż = F(x₀ + B z)` against the generic final-stage flow on every basis direction.
pub fn reduced_matches_flow(cs: &CircuitSpaces, res: &CadResult, red: &ReducedSystem) -> Result<bool> {
    let sys = circuit_system(cs)?;
    let flow = final_flow(&sys, res)?;
    let m = res.final_set().expect("checked by reduced_system");
    let k = red.basis.cols();
    let mut probes = vec![zeros(k)];
    probes.extend((0..k).map(|j| unit(k, j)));
    for z in probes {
        let x = red.state(&z);
        let w = m
            .direction()
            .coordinates(&sub(&x, m.base()))
            .ok_or_else(|| Error::CrossCheck("reduced state leaves the final set".into()))?;
        let expected = m.direction().combine(&flow.apply(&w));
        let got = red.basis.mul_vec(&red.field.apply(&z));
        if expected != got {
            return Ok(false);
        }
    }
    Ok(true)
}
