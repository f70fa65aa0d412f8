//! Linear Dirac structures on `V ⊕ V*` with `V = Qⁿ`.
//!
//! Elements are stored as `(v, α)` in `Q²ⁿ`. Every Dirac structure is determined by its
//! projection `E_D` onto `V` and the skew form `ω_D(v, w) = α(w)` for `(v, α) ∈ D`, and
//! conversely `D = {(v, α) | v ∈ E_D, α|_{E_D} = ω_D(v, ·)}`.

use num_traits::Zero;

use crate::error::{dim_check, Error, Result};
use crate::linalg::rational::{dot, one, Rational, Vector};
use crate::linalg::{Matrix, Solver, Subspace};
use crate::symplectic::PresymplecticForm;

/// `⟨⟨(v₁, α₁), (v₂, α₂)⟩⟩ = α₁(v₂) + α₂(v₁)` on elements of `Q²ⁿ`.
pub fn symmetric_pairing(n: usize, x: &[Rational], y: &[Rational]) -> Rational {
    dot(&x[n..], &y[..n]) + dot(&y[n..], &x[..n])
}

/// Checks `dim D = n` and isotropy under the symmetric pairing.
pub fn check_dirac(n: usize, candidate: &Subspace) -> Result<()> {
    dim_check(candidate.ambient_dim() == 2 * n, || {
        format!(
            "candidate lives in dimension {}, expected {}",
            candidate.ambient_dim(),
            2 * n
        )
    })?;
    if candidate.dim() != n {
        return Err(Error::NotDirac(format!(
            "dimension {} instead of {n}",
            candidate.dim()
        )));
    }
    let b = candidate.basis();
    for i in 0..b.len() {
        for j in i..b.len() {
            let p = symmetric_pairing(n, &b[i], &b[j]);
            if !p.is_zero() {
                return Err(Error::NotDirac(format!(
                    "basis elements {i} and {j} pair to {p}"
                )));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearDiracStructure {
    n: usize,
    space: Subspace,
    omega_d: PresymplecticForm,
}

impl LinearDiracStructure {
    pub fn new(n: usize, space: Subspace) -> Result<Self> {
        check_dirac(n, &space)?;
        let omega_d = project(n, &space)?;
        Ok(LinearDiracStructure { n, space, omega_d })
    }

    pub fn from_generators(n: usize, generators: &[Vector]) -> Result<Self> {
        for g in generators {
            dim_check(g.len() == 2 * n, || {
                format!("generator of length {}, expected {}", g.len(), 2 * n)
            })?;
        }
        LinearDiracStructure::new(n, Subspace::span(2 * n, generators))
    }

    /// `D_{E,ω} = {(v, α) | v ∈ E, α|_E = ω(v, ·)}`
    pub fn from_distribution_and_form(form: &PresymplecticForm) -> Self {
        let n = form.ambient_dim();
        let lifted = form.lift();
        let mut gens = Vec::with_capacity(n);
        for e in form.carrier().basis() {
            let mut g = e.clone();
            g.extend(lifted.left_mul_vec(e));
            gens.push(g);
        }
        for gamma in form.carrier().annihilator().basis() {
            let mut g = vec![Rational::zero(); n];
            g.extend(gamma.iter().cloned());
            gens.push(g);
        }
        let space = Subspace::span(2 * n, &gens);
        debug_assert!(check_dirac(n, &space).is_ok());
        LinearDiracStructure {
            n,
            space,
            omega_d: form.clone(),
        }
    }

    /// Graph of a presymplectic form on all of `V`.
    pub fn graph_of(form: &Matrix) -> Result<Self> {
        Ok(LinearDiracStructure::from_distribution_and_form(
            &PresymplecticForm::on_full_space(form.clone())?,
        ))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn e_d(&self) -> &Subspace {
        self.omega_d.carrier()
    }

    pub fn omega_d(&self) -> &PresymplecticForm {
        &self.omega_d
    }

    pub fn contains(&self, v: &[Rational], alpha: &[Rational]) -> bool {
        let mut x = v.to_vec();
        x.extend(alpha.iter().cloned());
        self.space.contains(&x)
    }

    fn require_in_e_d(&self, w: &Subspace) -> Result<()> {
        dim_check(w.ambient_dim() == self.n, || {
            format!("subspace of dimension {} in V = Q^{}", w.ambient_dim(), self.n)
        })?;
        if !w.is_subspace_of(self.e_d()) {
            return Err(Error::Invalid("subspace is not contained in E_D".into()));
        }
        Ok(())
    }

    /// `D♭(W) = {α | (w, α) ∈ D for some w ∈ W}`
    pub fn d_flat(&self, w: &Subspace) -> Result<Subspace> {
        self.require_in_e_d(w)?;
        let fiber = self.space.intersect(&w.product(&Subspace::full(self.n)));
        let alphas: Vec<Vector> = fiber
            .basis()
            .iter()
            .map(|x| x[self.n..].to_vec())
            .collect();
        Ok(Subspace::span(self.n, &alphas))
    }

    /// `W^D`, computed as the `ω_D`-orthogonal of `W` inside `E_D`.
    pub fn d_orthogonal(&self, w: &Subspace) -> Result<Subspace> {
        self.require_in_e_d(w)?;
        self.omega_d.orthogonal(w)
    }
}

/// Recovers `(E_D, ω_D)` from a Dirac structure.
fn project(n: usize, space: &Subspace) -> Result<PresymplecticForm> {
    let g = space.basis_matrix();
    let top = g.block(0, 0, n, g.cols());
    let bottom = g.block(n, 0, n, g.cols());
    let e_d = Subspace::column_span(&top);
    let solver = Solver::new(&top);
    let mut alphas = Vec::with_capacity(e_d.dim());
    for e in e_d.basis() {
        let c = solver
            .solve(e)
            .ok_or_else(|| Error::CrossCheck("projection basis vector not reachable".into()))?;
        alphas.push(bottom.mul_vec(&c));
    }
    let k = e_d.dim();
    let mut form = Matrix::zeros(k, k);
    for (j, a) in alphas.iter().enumerate() {
        for (l, e) in e_d.basis().iter().enumerate() {
            form[(j, l)] = dot(a, e);
        }
    }
    PresymplecticForm::new(e_d, form)
}

/// Pontryagin-space Dirac structure on `M = Q³ⁿ` with coordinates `(q, v, p)` induced by a
/// constraint distribution `Δ ⊆ Qⁿ` and `ω = dq ∧ dp`:
/// `{(q̇, v̇, ṗ, α, γ, β) | q̇ ∈ Δ, α + ṗ ∈ Δ°, β = q̇, γ = 0}`.
pub fn nonholonomic_dirac(delta: &Subspace) -> LinearDiracStructure {
    let n = delta.ambient_dim();
    let m = 3 * n;
    let mut gens: Vec<Vector> = Vec::with_capacity(m);
    let blank = || vec![Rational::zero(); 2 * m];
    for d in delta.basis() {
        let mut g = blank();
        for i in 0..n {
            g[i] = d[i].clone();
            g[m + 2 * n + i] = d[i].clone();
        }
        gens.push(g);
    }
    for i in 0..n {
        let mut g = blank();
        g[n + i] = one();
        gens.push(g);
        let mut g = blank();
        g[2 * n + i] = one();
        g[m + i] = -one();
        gens.push(g);
    }
    for kappa in delta.annihilator().basis() {
        let mut g = blank();
        g[m..m + n].clone_from_slice(&kappa[..n]);
        gens.push(g);
    }
    let space = Subspace::span(2 * m, &gens);
    let omega_d = project(m, &space).expect("nonholonomic structure projects");
    debug_assert!(check_dirac(m, &space).is_ok());
    LinearDiracStructure {
        n: m,
        space,
        omega_d,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::ints;

    #[test]
    fn graph_of_symplectic_form() {
        let j = Matrix::from_i64(&[&[0, 1], &[-1, 0]]);
        let d = LinearDiracStructure::graph_of(&j).unwrap();
        assert!(d.e_d().is_full());
        // (∂q, dp) ∈ D
        assert!(d.contains(&ints(&[1, 0]), &ints(&[0, 1])));
        assert!(!d.contains(&ints(&[1, 0]), &ints(&[0, -1])));
    }

    #[test]
    fn d_orthogonal_of_zero_is_e_d() {
        let e = Subspace::span(3, &[ints(&[1, 0, 0]), ints(&[0, 1, 0])]);
        let form = PresymplecticForm::new(e.clone(), Matrix::from_i64(&[&[0, 1], &[-1, 0]])).unwrap();
        let d = LinearDiracStructure::from_distribution_and_form(&form);
        assert_eq!(d.d_orthogonal(&Subspace::zero(3)).unwrap(), e);
        assert_eq!(d.d_flat(&Subspace::zero(3)).unwrap(), e.annihilator());
        let full = Subspace::full(3);
        assert!(d.d_orthogonal(&full).is_err());
    }

    #[test]
    fn rejects_non_isotropic_subspace() {
        let s = Subspace::span(2, &[ints(&[1, 1])]);
        assert!(matches!(check_dirac(1, &s), Err(Error::NotDirac(_))));
        let s = Subspace::span(2, &[ints(&[1, 0])]);
        assert!(check_dirac(1, &s).is_ok());
    }

    #[test]
    fn nonholonomic_structure_matches_description() {
        let delta = Subspace::span(2, &[ints(&[1, -1])]);
        let d = nonholonomic_dirac(&delta);
        let n = 2;
        let ed = d.e_d();
        assert_eq!(ed.dim(), 3 * n - 1);
        // E_D = {q̇ ∈ Δ}
        for b in ed.basis() {
            assert!(delta.contains(&b[..n]));
        }
        // Agrees with the structure built from (Δ̄, ω̄).
        let mut j = Matrix::zeros(6, 6);
        for i in 0..n {
            j[(i, 2 * n + i)] = one();
            j[(2 * n + i, i)] = -one();
        }
        let full = PresymplecticForm::on_full_space(j).unwrap();
        let restricted = full.restrict(ed).unwrap();
        let other = LinearDiracStructure::from_distribution_and_form(&restricted);
        assert_eq!(other.space(), d.space());
    }
}
