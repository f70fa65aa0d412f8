//! Seeded random instances for property checks. Every generator draws small integers and
//! simple fractions so that exact arithmetic stays cheap.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cad::{ConstantDiracSystem, QuadraticEnergy};
use crate::circuits::{Branch, Mode, Netlist};
use crate::constraints::{DiracBracketContext, Observable};
use crate::dirac::LinearDiracStructure;
use crate::linalg::rational::{ratio, zero, Rational, Vector};
use crate::linalg::{Matrix, Subspace};
use crate::symplectic::{PresymplecticForm, SymplecticSpace};

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `|p| ≤ 3`, `1 ≤ q ≤ 3`.
pub fn small_rational(rng: &mut impl Rng) -> Rational {
    ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3))
}

pub fn positive_rational(rng: &mut impl Rng) -> Rational {
    ratio(rng.gen_range(1..=6), rng.gen_range(1..=3))
}

pub fn vector(rng: &mut impl Rng, n: usize) -> Vector {
    (0..n).map(|_| small_rational(rng)).collect()
}

/// Integer entries in `[-2, 2]`, biased towards zero for sparser structure.
pub fn sparse_vector(rng: &mut impl Rng, n: usize) -> Vector {
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.4) {
                zero()
            } else {
                ratio(rng.gen_range(-2..=2), 1)
            }
        })
        .collect()
}

pub fn matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    let data: Vec<Vector> = (0..rows).map(|_| sparse_vector(rng, cols)).collect();
    Matrix::from_rows(cols, &data)
}

/// Span of `k` random vectors; the dimension may come out smaller than `k`.
pub fn subspace(rng: &mut impl Rng, n: usize, k: usize) -> Subspace {
    let gens: Vec<Vector> = (0..k).map(|_| sparse_vector(rng, n)).collect();
    Subspace::span(n, &gens)
}

/// Random subspace of `outer`.
pub fn subspace_of(rng: &mut impl Rng, outer: &Subspace, k: usize) -> Subspace {
    let b = outer.basis_matrix();
    let gens: Vec<Vector> = (0..k)
        .map(|_| b.mul_vec(&sparse_vector(rng, outer.dim())))
        .collect();
    Subspace::span(outer.ambient_dim(), &gens)
}

/// Skew matrix of rank at most `2r`.
pub fn skew(rng: &mut impl Rng, n: usize, r: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for _ in 0..r {
        let a = sparse_vector(rng, n);
        let b = sparse_vector(rng, n);
        for i in 0..n {
            for j in 0..n {
                let x = &a[i] * &b[j] - &b[i] * &a[j];
                m[(i, j)] += x;
            }
        }
    }
    m
}

pub fn symmetric(rng: &mut impl Rng, n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = if rng.gen_bool(0.5) { zero() } else { small_rational(rng) };
            m[(i, j)] = x.clone();
            m[(j, i)] = x;
        }
    }
    m
}

/// Invertible matrix as a product of the identity with random elementary row operations.
pub fn invertible(rng: &mut impl Rng, n: usize) -> Matrix {
    let mut m = Matrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = small_rational(rng);
        let rj = m.row(j).to_vec();
        for (x, y) in m.row_mut(i).iter_mut().zip(&rj) {
            *x += &c * y;
        }
    }
    m
}

/// `TᵀJT` for a random invertible `T`, of dimension `2m`.
pub fn symplectic_space(rng: &mut impl Rng, m: usize) -> SymplecticSpace {
    let j = SymplecticSpace::canonical(m);
    let t = invertible(rng, 2 * m);
    SymplecticSpace::new(t.transpose().mul(j.omega()).mul(&t)).expect("congruent to J")
}

/// Dirac structure from a random carrier and a random form on it.
pub fn dirac_structure(rng: &mut impl Rng, n: usize) -> LinearDiracStructure {
    let k = rng.gen_range(0..=n);
    let carrier = subspace(rng, n, k);
    let r = rng.gen_range(0..=n / 2);
    let full = PresymplecticForm::on_full_space(skew(rng, n, r)).expect("skew");
    let form = full.restrict(&carrier).expect("carrier inside the full space");
    LinearDiracStructure::from_distribution_and_form(&form)
}

/// `(D, W)` with `W ⊆ E_D` and `dim V ≤ max_dim`.
pub fn dirac_pair(rng: &mut impl Rng, max_dim: usize) -> (LinearDiracStructure, Subspace) {
    let n = rng.gen_range(1..=max_dim);
    let d = dirac_structure(rng, n);
    let k = rng.gen_range(0..=d.e_d().dim());
    let w = subspace_of(rng, d.e_d(), k);
    (d, w)
}

pub fn quadratic_energy(rng: &mut impl Rng, n: usize) -> QuadraticEnergy {
    let h = symmetric(rng, n);
    let l = if rng.gen_bool(0.5) { vector(rng, n) } else { vec![zero(); n] };
    QuadraticEnergy::new(h, l, zero()).expect("symmetric Hessian")
}

/// Dirac system with a random constant Dirac structure and quadratic energy.
pub fn dirac_system(rng: &mut impl Rng, max_dim: usize) -> ConstantDiracSystem {
    let n = rng.gen_range(1..=max_dim);
    let d = dirac_structure(rng, n);
    ConstantDiracSystem::new(d, quadratic_energy(rng, n)).expect("dimensions agree")
}

/// Degenerate skew form and energy on `Qⁿ` for the graph-structure comparison.
pub fn presymplectic_system(rng: &mut impl Rng, max_dim: usize) -> (Matrix, QuadraticEnergy) {
    let n = rng.gen_range(1..=max_dim);
    let r = rng.gen_range(0..=n / 2);
    (skew(rng, n, r), quadratic_energy(rng, n))
}

pub fn quadratic_observable(rng: &mut impl Rng, n: usize) -> Observable {
    Observable::new(symmetric(rng, n), vector(rng, n), small_rational(rng)).expect("symmetric")
}

pub fn affine_observable(rng: &mut impl Rng, n: usize) -> Observable {
    Observable::affine(sparse_vector(rng, n), small_rational(rng))
}

/// Second class constraints on a random symplectic space of dimension `2m ≤ 2·max_half`,
/// redrawn until their bracket matrix is invertible.
pub fn second_class_context(rng: &mut impl Rng, max_half: usize) -> DiracBracketContext {
    loop {
        let m = rng.gen_range(1..=max_half);
        let space = symplectic_space(rng, m);
        let s = rng.gen_range(1..=m);
        let chi: Vec<Observable> = (0..2 * s).map(|_| affine_observable(rng, 2 * m)).collect();
        if let Ok(ctx) = DiracBracketContext::new(space, chi) {
            return ctx;
        }
    }
}

/// Physical netlist with at most `max_branches` branches on up to five nodes. Branches are
/// inductive, capacitive, both, or empty.
pub fn physical_netlist(rng: &mut impl Rng, max_branches: usize) -> Netlist {
    let nodes = rng.gen_range(2..=5);
    let count = rng.gen_range(1..=max_branches);
    let branches = (0..count)
        .map(|k| {
            let from = rng.gen_range(0..nodes);
            let mut to = rng.gen_range(0..nodes - 1);
            if to >= from {
                to += 1;
            }
            let kind = rng.gen_range(0..10);
            let (inductive, capacitive) = match kind {
                0..=2 => (true, false),
                3..=5 => (false, true),
                6..=7 => (true, true),
                _ => (false, false),
            };
            Branch {
                name: format!("b{k}"),
                from,
                to,
                inductance: if inductive { positive_rational(rng) } else { zero() },
                inverse_capacitance: if capacitive { positive_rational(rng) } else { zero() },
            }
        })
        .collect();
    Netlist {
        nodes: (0..nodes).map(|i| format!("n{i}")).collect(),
        branches,
        kcl_rows: None,
        mode: Mode::Physical,
    }
}

/// `count` netlists from consecutive seeds.
pub fn netlist_corpus(seed: u64, count: usize, max_branches: usize) -> Vec<Netlist> {
    let mut r = rng(seed);
    (0..count).map(|_| physical_netlist(&mut r, max_branches)).collect()
}
