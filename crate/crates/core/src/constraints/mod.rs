//! Dirac's theory of constraints for affine constraints on a symplectic vector space.
//!
//! Constraints carry a role. Primary and secondary ones have the usual meaning; leaf
//! constraints are the extra primary constraints `φ_i = C_i` that cut a foliated constraint
//! set into leaves, with all other constraints held at zero. Brackets of affine constraints
//! are constants, so "first class on S" is an exact identity here.

mod bracket;
mod observable;

pub use bracket::{dirac_bracket, f_chi, leaf_family, DiracBracketContext};
pub use observable::{bracket_with_tensor, hamiltonian_field, poisson_bracket, Observable};

use num_traits::Zero;
use serde::Serialize;

use crate::error::{dim_check, Error, Result};
use crate::linalg::rational::{add, dot, Rational, Vector};
use crate::linalg::{AffineMap, AffineSubspace, Matrix, Solver, Subspace};
use crate::symplectic::SymplecticSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Primary,
    Secondary,
    Leaf,
}

impl Role {
    /// Leaf constraints are primary for the leaves they define.
    pub fn is_primary(self) -> bool {
        matches!(self, Role::Primary | Role::Leaf)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSet {
    space: SymplecticSpace,
    phis: Vec<Observable>,
    roles: Vec<Role>,
}

impl ConstraintSet {
    pub fn new(space: SymplecticSpace, phis: Vec<Observable>, roles: Vec<Role>) -> Result<Self> {
        dim_check(phis.len() == roles.len(), || "one role per constraint".into())?;
        let n = space.dim();
        for (i, f) in phis.iter().enumerate() {
            dim_check(f.dim() == n, || {
                format!("constraint {i} lives in dimension {}, expected {n}", f.dim())
            })?;
            if !f.is_affine() {
                return Err(Error::Invalid(format!(
                    "constraint {i} is not affine; only affine constraints are supported"
                )));
            }
        }
        let diffs: Vec<Vector> = phis.iter().map(|f| f.linear_part().to_vec()).collect();
        let rank = Subspace::span(n, &diffs).dim();
        if rank < phis.len() {
            return Err(Error::Invalid(format!(
                "constraint differentials are dependent: rank {rank} for {} constraints",
                phis.len()
            )));
        }
        Ok(ConstraintSet { space, phis, roles })
    }

    /// Contiguous layout: `φ₁..φ_{a'}` primary, up to `φ_a` secondary, the rest leaf.
    pub fn with_layout(
        space: SymplecticSpace,
        phis: Vec<Observable>,
        a_prime: usize,
        a: usize,
    ) -> Result<Self> {
        if a_prime > a || a > phis.len() {
            return Err(Error::Invalid("layout needs a' <= a <= b".into()));
        }
        let roles = (0..phis.len())
            .map(|i| {
                if i < a_prime {
                    Role::Primary
                } else if i < a {
                    Role::Secondary
                } else {
                    Role::Leaf
                }
            })
            .collect();
        ConstraintSet::new(space, phis, roles)
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn phis(&self) -> &[Observable] {
        &self.phis
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn len(&self) -> usize {
        self.phis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phis.is_empty()
    }

    pub fn primary_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.roles[i].is_primary()).collect()
    }

    pub fn secondary_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| !self.roles[i].is_primary())
            .collect()
    }

    pub fn leaf_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.roles[i] == Role::Leaf).collect()
    }

    fn surface_where(&self, keep: impl Fn(usize) -> Option<Rational>) -> Result<AffineSubspace> {
        let n = self.space.dim();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (i, f) in self.phis.iter().enumerate() {
            if let Some(c) = keep(i) {
                rows.push(f.linear_part().to_vec());
                rhs.push(c - f.constant_part());
            }
        }
        AffineSubspace::from_equations(n, &rows, &rhs)
            .ok_or_else(|| Error::Inconsistent("constraints have no common zero".into()))
    }

    /// `S = {φ_i = 0 for all i}`
    pub fn surface(&self) -> Result<AffineSubspace> {
        self.surface_where(|_| Some(Rational::zero()))
    }

    /// The union of all leaves: every non-leaf constraint vanishes.
    pub fn foliated_surface(&self) -> Result<AffineSubspace> {
        self.surface_where(|i| (self.roles[i] != Role::Leaf).then(Rational::zero))
    }

    /// `S_C`: leaf constraints equal to `values` (in leaf order), the others zero.
    pub fn leaf(&self, values: &[Rational]) -> Result<AffineSubspace> {
        let leaves = self.leaf_indices();
        dim_check(values.len() == leaves.len(), || {
            format!("{} leaf values for {} leaf constraints", values.len(), leaves.len())
        })?;
        self.surface_where(|i| match leaves.iter().position(|&l| l == i) {
            Some(k) => Some(values[k].clone()),
            None => Some(Rational::zero()),
        })
    }
}

/// `Φ_ij = {φ_i, φ_j}` with `2s = rank Φ` and `s'` the rank of the primary rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketMatrix {
    pub phi: Matrix,
    pub rank: usize,
    pub primary_rank: usize,
}

pub fn bracket_matrix(cs: &ConstraintSet) -> BracketMatrix {
    let b = cs.len();
    let pi = cs.space.poisson_tensor();
    let mut phi = Matrix::zeros(b, b);
    for i in 0..b {
        let di = pi.left_mul_vec(cs.phis[i].linear_part());
        for j in 0..b {
            phi[(i, j)] = dot(&di, cs.phis[j].linear_part());
        }
    }
    let rank = phi.rank();
    let primary_rank = phi.select_rows(&cs.primary_indices()).rank();
    BracketMatrix {
        phi,
        rank,
        primary_rank,
    }
}

/// A first class combination `ψ = φ_index + Σ α_k χ_k`, with coefficients over the
/// selected second class constraints in their stored order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstClass {
    pub index: usize,
    pub alpha: Vector,
    pub observable: Observable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifiedConstraints {
    pub set: ConstraintSet,
    pub brackets: BracketMatrix,
    /// Indices of the primary second class constraints `χ'`.
    pub chi_prime: Vec<usize>,
    /// Indices of the secondary second class constraints `χ''`.
    pub chi_dprime: Vec<usize>,
    pub psi_prime: Vec<FirstClass>,
    pub psi_dprime: Vec<FirstClass>,
    pub s: usize,
    pub s_prime: usize,
    /// `c_ij = {χ_i, χ_j}` over `χ = (χ', χ'')`.
    pub c_matrix: Matrix,
    pub c_inverse: Matrix,
}

impl ClassifiedConstraints {
    /// `(χ', χ'')` as indices into the constraint set.
    pub fn chi_indices(&self) -> Vec<usize> {
        let mut v = self.chi_prime.clone();
        v.extend(self.chi_dprime.iter().copied());
        v
    }

    pub fn chi(&self) -> Vec<Observable> {
        self.chi_indices()
            .iter()
            .map(|&i| self.set.phis[i].clone())
            .collect()
    }

    /// New order of the constraints: `ψ'` sources, `χ'`, `ψ''` sources, `χ''`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.psi_prime.iter().map(|p| p.index).collect();
        v.extend(self.chi_prime.iter().copied());
        v.extend(self.psi_dprime.iter().map(|p| p.index));
        v.extend(self.chi_dprime.iter().copied());
        v
    }

    /// `d_Λ = |primary| - s'`
    pub fn multiplier_dim(&self) -> usize {
        self.psi_prime.len()
    }

    pub fn context(&self) -> Result<DiracBracketContext> {
        DiracBracketContext::new(self.set.space.clone(), self.chi())
    }
}

/// Greedy row selection scanning candidates from the largest index down.
fn select_independent(phi: &Matrix, start: &[usize], candidates: &[usize], target: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = start.to_vec();
    let mut picked = Vec::new();
    let mut rank = if chosen.is_empty() {
        0
    } else {
        phi.select_rows(&chosen).rank()
    };
    for &i in candidates.iter().rev() {
        if rank == target {
            break;
        }
        chosen.push(i);
        let r = phi.select_rows(&chosen).rank();
        if r > rank {
            rank = r;
            picked.push(i);
        } else {
            chosen.pop();
        }
    }
    picked.sort_unstable();
    picked
}

fn first_class_combination(
    cs: &ConstraintSet,
    phi: &Matrix,
    index: usize,
    chis: &[usize],
) -> Result<FirstClass> {
    // Row condition: Φ_index + Σ α_k Φ_{χ_k} = 0.
    let rows = phi.select_rows(chis).transpose();
    let target: Vector = phi.row(index).iter().map(|x| -x).collect();
    let alpha = Solver::new(&rows).solve(&target).ok_or_else(|| {
        Error::CrossCheck(format!("constraint {index} is not reducible to first class"))
    })?;
    let mut observable = cs.phis[index].clone();
    for (a, &k) in alpha.iter().zip(chis) {
        observable = observable.add(&cs.phis[k].scale(a));
    }
    Ok(FirstClass {
        index,
        alpha,
        observable,
    })
}

pub fn classify(cs: &ConstraintSet) -> Result<ClassifiedConstraints> {
    let br = bracket_matrix(cs);
    let primary = cs.primary_indices();
    let secondary = cs.secondary_indices();
    let chi_prime = select_independent(&br.phi, &[], &primary, br.primary_rank);
    let chi_dprime = select_independent(&br.phi, &chi_prime, &secondary, br.rank);
    if chi_prime.len() != br.primary_rank || chi_prime.len() + chi_dprime.len() != br.rank {
        return Err(Error::CrossCheck("second class selection fell short of the rank".into()));
    }
    let mut psi_prime = Vec::new();
    for &i in primary.iter().filter(|i| !chi_prime.contains(i)) {
        psi_prime.push(first_class_combination(cs, &br.phi, i, &chi_prime)?);
    }
    let mut chis = chi_prime.clone();
    chis.extend(chi_dprime.iter().copied());
    let mut psi_dprime = Vec::new();
    for &i in secondary.iter().filter(|i| !chi_dprime.contains(i)) {
        psi_dprime.push(first_class_combination(cs, &br.phi, i, &chis)?);
    }
    let c_matrix = br.phi.select_rows(&chis).select_cols(&chis);
    let c_inverse = c_matrix
        .inverse()
        .ok_or_else(|| Error::Singular("second class bracket matrix".into()))?;
    Ok(ClassifiedConstraints {
        set: cs.clone(),
        s: br.rank / 2,
        s_prime: br.primary_rank,
        brackets: br,
        chi_prime,
        chi_dprime,
        psi_prime,
        psi_dprime,
        c_matrix,
        c_inverse,
    })
}

/// Solutions `λ(x)` of `{E, φ_j}(x) + λ^i {φ_i, φ_j} = 0`, `i` primary, on the foliated surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplierBundle {
    /// Primary constraint indices the multipliers belong to.
    pub indices: Vec<usize>,
    /// One particular solution, affine in the point.
    pub particular: AffineMap,
    /// Directions of the solution set, `d_Λ` of them.
    pub free: Vec<Vector>,
    pub domain: AffineSubspace,
}

impl MultiplierBundle {
    pub fn dim(&self) -> usize {
        self.free.len()
    }
}

/// Affine observables `{E, φ_j}` as rows `h_j · x + g_j`.
fn energy_brackets(cs: &ConstraintSet, energy: &Observable, idx: &[usize]) -> (Matrix, Vector) {
    let n = cs.space.dim();
    let mut rows = Vec::with_capacity(idx.len());
    let mut consts = Vec::with_capacity(idx.len());
    for &j in idx {
        let b = poisson_bracket(&cs.space, energy, &cs.phis[j]);
        debug_assert!(b.is_affine());
        rows.push(b.linear_part().to_vec());
        consts.push(b.constant_part().clone());
    }
    (Matrix::from_rows(n, &rows), consts)
}

/// Solves `M λ = -(H x + g)` as an affine map on `domain`, checking consistency there.
fn affine_solution(m: &Matrix, h: &Matrix, g: &Vector, domain: &AffineSubspace) -> Result<AffineMap> {
    let solver = Solver::new(m);
    let base_rhs = add(&h.mul_vec(domain.base()), g);
    for y in solver.left_kernel() {
        let consistent = dot(&y, &base_rhs).is_zero()
            && domain
                .direction()
                .basis()
                .iter()
                .all(|d| dot(&y, &h.mul_vec(d)).is_zero());
        if !consistent {
            return Err(Error::Inconsistent(
                "multiplier equations have no solution on the constraint set".into(),
            ));
        }
    }
    let p = solver.particular_map();
    Ok(AffineMap::new(
        p.mul(h).neg(),
        p.mul_vec(g).iter().map(|x| -x).collect(),
    ))
}

pub fn multiplier_bundle(cls: &ClassifiedConstraints, energy: &Observable) -> Result<MultiplierBundle> {
    let cs = &cls.set;
    let primary = cs.primary_indices();
    let all: Vec<usize> = (0..cs.len()).collect();
    let m = cls.brackets.phi.select_rows(&primary).transpose();
    let (h, g) = energy_brackets(cs, energy, &all);
    let domain = cs.foliated_surface()?;
    let particular = affine_solution(&m, &h, &g, &domain)?;
    let free = Solver::new(&m).kernel();
    Ok(MultiplierBundle {
        indices: primary,
        particular,
        free,
        domain,
    })
}

/// `E_AT = E + Σ λ'^k φ_k` over the primary constraints that are not in `χ'`.
pub fn abridged_total_energy(
    cls: &ClassifiedConstraints,
    energy: &Observable,
    lambda_prime: &[Rational],
) -> Result<Observable> {
    dim_check(lambda_prime.len() == cls.psi_prime.len(), || {
        format!(
            "{} multipliers given, {} expected",
            lambda_prime.len(),
            cls.psi_prime.len()
        )
    })?;
    let mut e = energy.clone();
    for (l, p) in lambda_prime.iter().zip(&cls.psi_prime) {
        e = e.add(&cls.set.phis[p.index].scale(l));
    }
    Ok(e)
}

/// `E_T = E + λ'^i ψ'_i + μ'^j(x) χ'_j`, with `μ'` fixed by `{E_T, χ} = 0` on the surface.
pub fn total_energy(
    cls: &ClassifiedConstraints,
    energy: &Observable,
    lambda_prime: &[Rational],
) -> Result<Observable> {
    dim_check(lambda_prime.len() == cls.psi_prime.len(), || {
        "one multiplier per primary first class constraint".into()
    })?;
    let cs = &cls.set;
    let chis = cls.chi_indices();
    // {E, χ_i} + μ'^j c_{χ'_j χ_i} = 0
    let m = cls.brackets.phi.select_rows(&cls.chi_prime).select_cols(&chis).transpose();
    let (h, g) = energy_brackets(cs, energy, &chis);
    let mu = affine_solution(&m, &h, &g, &cs.foliated_surface()?)?;
    let mut e = energy.clone();
    for (l, p) in lambda_prime.iter().zip(&cls.psi_prime) {
        e = e.add(&p.observable.scale(l));
    }
    for (j, &k) in cls.chi_prime.iter().enumerate() {
        let mu_j = Observable::affine(mu.matrix.row(j).to_vec(), mu.offset[j].clone());
        e = e.add(&mu_j.mul(&cs.phis[k])?);
    }
    Ok(e)
}

/// `E_E = E_T + λ''^i ψ''_i`
pub fn extended_energy(
    cls: &ClassifiedConstraints,
    energy: &Observable,
    lambda_prime: &[Rational],
    lambda_dprime: &[Rational],
) -> Result<Observable> {
    dim_check(lambda_dprime.len() == cls.psi_dprime.len(), || {
        format!(
            "{} secondary multipliers given, {} expected",
            lambda_dprime.len(),
            cls.psi_dprime.len()
        )
    })?;
    let mut e = total_energy(cls, energy, lambda_prime)?;
    for (l, p) in lambda_dprime.iter().zip(&cls.psi_dprime) {
        e = e.add(&p.observable.scale(l));
    }
    Ok(e)
}

/// `X_{(χ), E_AT}` as an affine vector field.
pub fn foliated_field(
    cls: &ClassifiedConstraints,
    energy: &Observable,
    lambda_prime: &[Rational],
) -> Result<AffineMap> {
    let ctx = cls.context()?;
    let eat = abridged_total_energy(cls, energy, lambda_prime)?;
    Ok(hamiltonian_field(ctx.tensor(), &eat))
}

/// `X_E + λ^i(x) X_{φ_i}` using the particular multipliers of a bundle.
pub fn multiplier_field(
    cls: &ClassifiedConstraints,
    energy: &Observable,
    bundle: &MultiplierBundle,
) -> AffineMap {
    let cs = &cls.set;
    let pi = cs.space.poisson_tensor();
    let n = cs.space.dim();
    let base = hamiltonian_field(pi, energy);
    let mut matrix = base.matrix;
    let mut offset = base.offset;
    for (k, &i) in bundle.indices.iter().enumerate() {
        let xi = pi.mul_vec(cs.phis[i].linear_part());
        let row = bundle.particular.matrix.row(k);
        for r in 0..n {
            if xi[r].is_zero() {
                continue;
            }
            for c in 0..n {
                if !row[c].is_zero() {
                    matrix[(r, c)] += &xi[r] * &row[c];
                }
            }
            offset[r] += &xi[r] * &bundle.particular.offset[k];
        }
    }
    AffineMap::new(matrix, offset)
}

/// Lie derivative `dφ · X(x)` of every constraint vanishes on the whole foliated surface.
pub fn tangent_to_leaves(cs: &ConstraintSet, field: &AffineMap) -> Result<bool> {
    let domain = cs.foliated_surface()?;
    for f in cs.phis() {
        let a = f.linear_part();
        let lin = field.matrix.left_mul_vec(a);
        let c = dot(a, &field.offset);
        if !(dot(&lin, domain.base()) + &c).is_zero() {
            return Ok(false);
        }
        if domain.direction().basis().iter().any(|d| !dot(&lin, d).is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The field restricted to points of `domain` agrees with another field there.
pub fn fields_agree_on(a: &AffineMap, b: &AffineMap, domain: &AffineSubspace) -> bool {
    let diff = AffineMap::new(a.matrix.sub(&b.matrix), crate::linalg::rational::sub(&a.offset, &b.offset));
    crate::linalg::rational::is_zero_vec(&diff.apply(domain.base()))
        && domain
            .direction()
            .basis()
            .iter()
            .all(|d| crate::linalg::rational::is_zero_vec(&diff.matrix.mul_vec(d)))
}
