//! The constraint algorithm for linear Dirac dynamical systems `(ẋ, dE(x)) ∈ D` with a
//! quadratic energy, together with the Gotay-Nester algorithm it generalises.
//!
//! Starting from `M₀ = V`, each step keeps the points where `dE(x)` annihilates
//! `(E_D ∩ T M_k)^D`. Every `M_k` is affine, so a step is one exact intersection.

use num_traits::Zero;

use crate::dirac::LinearDiracStructure;
use crate::error::{dim_check, Error, Result};
use crate::linalg::rational::{add, dot, one, sub, Rational, Vector};
use crate::linalg::{AffineMap, AffineSubspace, Matrix, Subspace};
use crate::symplectic::{PresymplecticForm, SymplecticSpace};

/// `E(x) = ½ xᵀ A x + bᵀ x + c`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticEnergy {
    hessian: Matrix,
    linear: Vector,
    constant: Rational,
}

impl QuadraticEnergy {
    pub fn new(hessian: Matrix, linear: Vector, constant: Rational) -> Result<Self> {
        if !hessian.is_symmetric() {
            return Err(Error::Invalid("energy Hessian is not symmetric".into()));
        }
        dim_check(linear.len() == hessian.rows(), || {
            format!(
                "linear term of length {} for a {}-dimensional Hessian",
                linear.len(),
                hessian.rows()
            )
        })?;
        Ok(QuadraticEnergy {
            hessian,
            linear,
            constant,
        })
    }

    pub fn homogeneous(hessian: Matrix) -> Result<Self> {
        let n = hessian.rows();
        QuadraticEnergy::new(hessian, vec![Rational::zero(); n], Rational::zero())
    }

    pub fn dim(&self) -> usize {
        self.hessian.rows()
    }

    pub fn hessian(&self) -> &Matrix {
        &self.hessian
    }

    pub fn linear(&self) -> &[Rational] {
        &self.linear
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn gradient(&self, x: &[Rational]) -> Vector {
        add(&self.hessian.mul_vec(x), &self.linear)
    }

    pub fn value(&self, x: &[Rational]) -> Rational {
        let half = one() / Rational::from_integer(2.into());
        half * dot(x, &self.hessian.mul_vec(x)) + dot(&self.linear, x) + &self.constant
    }
}

/// `E = pᵀv - ½ vᵀ M v + ½ qᵀ K q` on `(q, v, p)`.
pub fn pontryagin_energy(mass: &Matrix, stiffness: &Matrix) -> Result<QuadraticEnergy> {
    let n = mass.rows();
    dim_check(
        mass.is_square() && stiffness.is_square() && stiffness.rows() == n,
        || "mass and stiffness must be square of equal size".into(),
    )?;
    let mut a = Matrix::zeros(3 * n, 3 * n);
    a.set_block(0, 0, stiffness);
    a.set_block(n, n, &mass.neg());
    a.set_block(n, 2 * n, &Matrix::identity(n));
    a.set_block(2 * n, n, &Matrix::identity(n));
    QuadraticEnergy::homogeneous(a)
}

/// `dq ∧ dp` on `(q, v, p)`.
pub fn pontryagin_form(n: usize) -> Matrix {
    let mut w = Matrix::zeros(3 * n, 3 * n);
    for i in 0..n {
        w[(i, 2 * n + i)] = one();
        w[(2 * n + i, i)] = -one();
    }
    w
}

/// Injective linear map into a symplectic space pulling `Ω` back to `ω_D` on `E_D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticEmbedding {
    pub space: SymplecticSpace,
    pub map: Matrix,
}

impl SymplecticEmbedding {
    /// `(q, v, p) ↦ (q, v, p, 0)` into `T*TQ` with `Ω = dq ∧ dp + dv ∧ dν`.
    pub fn pontryagin(n: usize) -> Self {
        let mut map = Matrix::zeros(4 * n, 3 * n);
        for i in 0..3 * n {
            map[(i, i)] = one();
        }
        SymplecticEmbedding {
            space: SymplecticSpace::canonical(2 * n),
            map,
        }
    }

    /// `x ↦ (x, ½ ω̃ x)` into `V ⊕ V*`, where `ω̃` is a skew extension of `ω_D`.
    pub fn cotangent(form: &PresymplecticForm) -> Self {
        let n = form.ambient_dim();
        let half = one() / Rational::from_integer(2.into());
        let lifted = form.lift().scale(&half);
        let mut map = Matrix::zeros(2 * n, n);
        map.set_block(0, 0, &Matrix::identity(n));
        map.set_block(n, 0, &lifted);
        SymplecticEmbedding {
            space: SymplecticSpace::canonical(n),
            map,
        }
    }

    pub fn pulls_back_to(&self, form: &PresymplecticForm) -> bool {
        let b = form.carrier().basis_matrix();
        let ib = self.map.mul(&b);
        let pulled = ib.transpose().mul(self.space.omega()).mul(&ib);
        &pulled == form.matrix() && self.map.rank() == self.map.cols()
    }

    pub fn push(&self, w: &Subspace) -> Subspace {
        w.image(&self.map)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantDiracSystem {
    dirac: LinearDiracStructure,
    energy: QuadraticEnergy,
    embedding: Option<SymplecticEmbedding>,
}

impl ConstantDiracSystem {
    pub fn new(dirac: LinearDiracStructure, energy: QuadraticEnergy) -> Result<Self> {
        dim_check(dirac.n() == energy.dim(), || {
            format!(
                "Dirac structure on dimension {} but energy on dimension {}",
                dirac.n(),
                energy.dim()
            )
        })?;
        Ok(ConstantDiracSystem {
            dirac,
            energy,
            embedding: None,
        })
    }

    pub fn with_embedding(mut self, embedding: SymplecticEmbedding) -> Result<Self> {
        if !embedding.pulls_back_to(self.dirac.omega_d()) {
            return Err(Error::Invalid(
                "embedding does not pull the symplectic form back to omega_D".into(),
            ));
        }
        self.embedding = Some(embedding);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dirac.n()
    }

    pub fn dirac(&self) -> &LinearDiracStructure {
        &self.dirac
    }

    pub fn energy(&self) -> &QuadraticEnergy {
        &self.energy
    }

    pub fn embedding(&self) -> SymplecticEmbedding {
        self.embedding
            .clone()
            .unwrap_or_else(|| SymplecticEmbedding::cotangent(self.dirac.omega_d()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CadResult {
    /// `M₀ ⊋ M₁ ⊋ … ⊋ M_c`; the step after `M_c` reproduces it.
    pub chain: Vec<AffineSubspace>,
    pub stop_index: usize,
    /// `W_c = E_D ∩ T M_c`
    pub final_tangent: Subspace,
    /// `dim(ker ω_D ∩ T M_c)`, the dimension of every solution fiber.
    pub fiber_dim: usize,
    /// The last step produced the empty set; `chain` then ends at the last nonempty member.
    pub empty: bool,
}

impl CadResult {
    pub fn dims(&self) -> Vec<usize> {
        self.chain.iter().map(AffineSubspace::dim).collect()
    }

    pub fn final_set(&self) -> Option<&AffineSubspace> {
        if self.empty {
            None
        } else {
            self.chain.last()
        }
    }
}

/// Equations `⟨dE(x), w⟩ = 0` for each basis vector `w` of `dirs`.
fn energy_equations(energy: &QuadraticEnergy, dirs: &Subspace) -> (Vec<Vector>, Vec<Rational>) {
    dirs.basis()
        .iter()
        .map(|w| (energy.hessian.mul_vec(w), -dot(&energy.linear, w)))
        .unzip()
}

fn run_chain<F>(
    n: usize,
    energy: &QuadraticEnergy,
    max_steps: Option<usize>,
    mut annihilated: F,
) -> Result<(Vec<AffineSubspace>, bool)>
where
    F: FnMut(&AffineSubspace) -> Result<Subspace>,
{
    let max = max_steps.unwrap_or(n + 1);
    let mut chain = vec![AffineSubspace::full(n)];
    for _ in 0..max {
        let current = chain.last().expect("chain is never empty");
        let dirs = annihilated(current)?;
        let (rows, rhs) = energy_equations(energy, &dirs);
        match current.intersect_equations(&rows, &rhs) {
            None => return Ok((chain, true)),
            Some(next) if &next == current => return Ok((chain, false)),
            Some(next) => chain.push(next),
        }
    }
    Err(Error::Invalid(format!(
        "constraint chain did not stabilise within {max} steps"
    )))
}

pub fn cad_run(sys: &ConstantDiracSystem, max_steps: Option<usize>) -> Result<CadResult> {
    let d = &sys.dirac;
    let (chain, empty) = run_chain(sys.dim(), &sys.energy, max_steps, |m| {
        let w = d.e_d().intersect(m.direction());
        d.d_orthogonal(&w)
    })?;
    let n = sys.dim();
    let (final_tangent, fiber_dim) = if empty {
        (Subspace::zero(n), 0)
    } else {
        let dir = chain.last().expect("nonempty").direction();
        let wc = d.e_d().intersect(dir);
        let kc = d.omega_d().kernel().intersect(dir);
        (wc, kc.dim())
    };
    let stop_index = if empty { chain.len() } else { chain.len() - 1 };
    Ok(CadResult {
        chain,
        stop_index,
        final_tangent,
        fiber_dim,
        empty,
    })
}

/// The presymplectic algorithm `M_{k+1} = {x ∈ M_k | ⟨dE(x), (T M_k)^ω⟩ = 0}`.
///
/// The result is compared against [`cad_run`] on the graph of `ω`; a mismatch is an error.
pub fn gotay_nester(
    form: &PresymplecticForm,
    energy: &QuadraticEnergy,
    max_steps: Option<usize>,
) -> Result<CadResult> {
    let n = form.ambient_dim();
    if !form.carrier().is_full() {
        return Err(Error::Invalid(
            "Gotay-Nester needs a form defined on the whole space".into(),
        ));
    }
    dim_check(energy.dim() == n, || "energy dimension".into())?;
    let (chain, empty) = run_chain(n, energy, max_steps, |m| form.orthogonal(m.direction()))?;
    let (final_tangent, fiber_dim) = if empty {
        (Subspace::zero(n), 0)
    } else {
        let dir = chain.last().expect("nonempty").direction();
        (dir.clone(), form.kernel().intersect(dir).dim())
    };
    let stop_index = if empty { chain.len() } else { chain.len() - 1 };
    let res = CadResult {
        chain,
        stop_index,
        final_tangent,
        fiber_dim,
        empty,
    };
    let sys = ConstantDiracSystem::new(
        LinearDiracStructure::from_distribution_and_form(form),
        energy.clone(),
    )?;
    if cad_run(&sys, max_steps)? != res {
        return Err(Error::CrossCheck(
            "Gotay-Nester chain differs from the Dirac constraint algorithm".into(),
        ));
    }
    Ok(res)
}

/// Pontryagin-space system for the Lagrangian `½ vᵀ M v - ½ qᵀ K q` with no constraints.
pub fn euler_lagrange_system(mass: &Matrix, stiffness: &Matrix) -> Result<ConstantDiracSystem> {
    if !mass.is_symmetric() || !stiffness.is_symmetric() {
        return Err(Error::Invalid("mass and stiffness must be symmetric".into()));
    }
    let n = mass.rows();
    let energy = pontryagin_energy(mass, stiffness)?;
    let dirac = LinearDiracStructure::graph_of(&pontryagin_form(n))?;
    ConstantDiracSystem::new(dirac, energy)?.with_embedding(SymplecticEmbedding::pontryagin(n))
}

/// `{ẋ ∈ W_c | (ẋ, dE(x)) ∈ D}` for a point `x` of the final constraint set.
pub fn solution_field(
    sys: &ConstantDiracSystem,
    res: &CadResult,
    x: &[Rational],
) -> Result<AffineSubspace> {
    let m = res
        .final_set()
        .ok_or_else(|| Error::Inconsistent("the final constraint set is empty".into()))?;
    if !m.contains(x) {
        return Err(Error::Invalid("point is not on the final constraint set".into()));
    }
    let n = sys.dim();
    let de = sys.energy.gradient(x);
    let b = res.final_tangent.basis_matrix();
    let eqs = sys.dirac.space().equations();
    let rows: Vec<Vector> = eqs.iter().map(|a| b.left_mul_vec(&a[..n])).collect();
    let rhs: Vec<Rational> = eqs.iter().map(|a| -dot(&a[n..], &de)).collect();
    let ts = AffineSubspace::from_equations(b.cols(), &rows, &rhs).ok_or_else(|| {
        Error::Inconsistent("no admissible velocity at a point of the final set".into())
    })?;
    let base = b.mul_vec(ts.base());
    let dirs: Vec<Vector> = ts
        .direction()
        .basis()
        .iter()
        .map(|t| b.mul_vec(t))
        .collect();
    Ok(AffineSubspace::new(base, Subspace::span(n, &dirs)))
}

/// Dynamics on `M_c = x₀ + span(B)` in the coordinates `z` of `x = x₀ + B z`,
/// defined when solutions are unique.
pub fn final_flow(sys: &ConstantDiracSystem, res: &CadResult) -> Result<AffineMap> {
    let m = res
        .final_set()
        .ok_or_else(|| Error::Inconsistent("the final constraint set is empty".into()))?;
    if res.fiber_dim != 0 {
        return Err(Error::Invalid(format!(
            "solutions are not unique: fiber dimension {}",
            res.fiber_dim
        )));
    }
    let k = m.dim();
    let coords = |v: &[Rational]| -> Result<Vector> {
        m.direction()
            .coordinates(v)
            .ok_or_else(|| Error::CrossCheck("velocity leaves the final set".into()))
    };
    let at = |z: &[Rational]| -> Result<Vector> {
        let sol = solution_field(sys, res, &m.at(z))?;
        coords(sol.base())
    };
    let zero_z = vec![Rational::zero(); k];
    let offset = at(&zero_z)?;
    let mut cols = Vec::with_capacity(k);
    for j in 0..k {
        let mut z = zero_z.clone();
        z[j] = one();
        cols.push(sub(&at(&z)?, &offset));
    }
    Ok(AffineMap::new(Matrix::from_columns(k, &cols), offset))
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct UniquenessReport {
    /// `ker ω_D ∩ W_c = 0`
    pub a_kernel: bool,
    /// `W_c ∩ E_D^{ω_D} = 0`
    pub a_orthogonal: bool,
    /// `W_c ∩ E_D^Ω = 0` in the ambient symplectic space
    pub a_ambient: bool,
    /// `W_c ∩ W_c^{ω_D} = 0`
    pub b_orthogonal: bool,
    /// `W_c ∩ W_c^Ω = 0` in the ambient symplectic space
    pub b_ambient: bool,
}

impl UniquenessReport {
    pub fn unique(&self) -> bool {
        self.a_kernel
    }

    pub fn leaf_symplectic(&self) -> bool {
        self.b_orthogonal
    }

    /// The equivalent formulations agree and `(B)` implies `(A)`.
    pub fn consistent(&self) -> bool {
        self.a_kernel == self.a_orthogonal
            && self.a_kernel == self.a_ambient
            && self.b_orthogonal == self.b_ambient
            && (!self.b_orthogonal || self.a_kernel)
    }
}

pub fn uniqueness_report(sys: &ConstantDiracSystem, res: &CadResult) -> Result<UniquenessReport> {
    let w = &res.final_tangent;
    let wd = sys.dirac.omega_d();
    let e_d = sys.dirac.e_d();
    let emb = sys.embedding();
    let iw = emb.push(w);
    let a_kernel = wd.kernel().intersect(w).is_zero();
    let a_orthogonal = w.intersect(&wd.orthogonal(e_d)?).is_zero();
    let a_ambient = iw
        .intersect(&emb.space.omega_orthogonal(&emb.push(e_d)))
        .is_zero();
    let b_orthogonal = w.intersect(&wd.orthogonal(w)?).is_zero();
    let b_ambient = iw.intersect(&emb.space.omega_orthogonal(&iw)).is_zero();
    Ok(UniquenessReport {
        a_kernel,
        a_orthogonal,
        a_ambient,
        b_orthogonal,
        b_ambient,
    })
}

/// Evaluates two equivalent tangency tests at `x` for `W ⊆ E_D`: `dE(x)|_{E_D}` annihilating
/// `W^{ω_D}`, and `dE(x)` annihilating `(D♭(W))°`.
pub fn tangency_tests(
    sys: &ConstantDiracSystem,
    w: &Subspace,
    x: &[Rational],
) -> Result<(bool, bool)> {
    let de = sys.energy.gradient(x);
    let d = &sys.dirac;
    let by_form = d
        .omega_d()
        .orthogonal(w)?
        .basis()
        .iter()
        .all(|u| dot(&de, u).is_zero());
    let by_flat = d
        .d_flat(w)?
        .annihilator()
        .basis()
        .iter()
        .all(|u| dot(&de, u).is_zero());
    Ok((by_form, by_flat))
}

/// `(ẋ, dE(x)) ∈ D`
pub fn is_solution_velocity(sys: &ConstantDiracSystem, x: &[Rational], xdot: &[Rational]) -> bool {
    sys.dirac.contains(xdot, &sys.energy.gradient(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::{int, ints};

    fn diag(v: &[i64]) -> Matrix {
        Matrix::diagonal(&ints(v))
    }

    #[test]
    fn symplectic_case_stops_immediately() {
        let j = Matrix::from_i64(&[&[0, 1], &[-1, 0]]);
        let form = PresymplecticForm::on_full_space(j).unwrap();
        let e = QuadraticEnergy::homogeneous(diag(&[1, 1])).unwrap();
        let res = gotay_nester(&form, &e, None).unwrap();
        assert_eq!(res.stop_index, 0);
        assert_eq!(res.dims(), vec![2]);
        assert_eq!(res.fiber_dim, 0);
    }

    #[test]
    fn harmonic_oscillator_on_pontryagin_space() {
        let sys = euler_lagrange_system(&diag(&[1]), &diag(&[1])).unwrap();
        let res = cad_run(&sys, None).unwrap();
        assert_eq!(res.dims(), vec![3, 2]);
        assert_eq!(res.stop_index, 1);
        assert_eq!(res.fiber_dim, 0);
        // On M₁: q̇ = v, ṗ = -q.
        let x = ints(&[2, 3, 3]);
        let sol = solution_field(&sys, &res, &x).unwrap();
        assert_eq!(sol.dim(), 0);
        assert_eq!(sol.base()[0], int(3));
        assert_eq!(sol.base()[2], int(-2));
        assert!(is_solution_velocity(&sys, &x, sol.base()));
        let rep = uniqueness_report(&sys, &res).unwrap();
        assert!(rep.unique() && rep.leaf_symplectic() && rep.consistent());
    }

    #[test]
    fn degenerate_lagrangian_chain() {
        // L = ½ v₁² - ½ q₁² - ½ q₂²: v₂ is absent from the kinetic term.
        let sys = euler_lagrange_system(&diag(&[1, 0]), &diag(&[1, 1])).unwrap();
        let res = cad_run(&sys, None).unwrap();
        // p = M v with p₂ = 0, then q₂ = 0, then v₂ = 0.
        assert_eq!(res.dims(), vec![6, 4, 3, 2]);
        let m3 = res.chain.last().unwrap();
        assert!(m3.contains(&ints(&[1, 0, 2, 0, 2, 0])));
        assert!(!m3.contains(&ints(&[1, 0, 2, 1, 2, 0])));
        assert_eq!(res.fiber_dim, 0);
    }

    #[test]
    fn empty_final_set_is_reported() {
        // ω = 0 on Q¹ with E = x: no point satisfies dE ∈ D♭(0).
        let form = PresymplecticForm::on_full_space(Matrix::zeros(1, 1)).unwrap();
        let e = QuadraticEnergy::new(Matrix::zeros(1, 1), ints(&[1]), int(0)).unwrap();
        let res = gotay_nester(&form, &e, None).unwrap();
        assert!(res.empty);
        assert_eq!(res.stop_index, 1);
        assert!(res.final_set().is_none());
    }
}
