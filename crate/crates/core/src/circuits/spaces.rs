use std::collections::VecDeque;

use serde::Serialize;

use crate::cad::{
    cad_run, pontryagin_energy, CadResult, ConstantDiracSystem, SymplecticEmbedding,
};
use crate::dirac::nonholonomic_dirac;
use crate::error::{Error, Result};
use crate::linalg::rational::{one, unit, zeros, Rational, Vector};
use crate::linalg::{AffineSubspace, Matrix, Subspace};

use super::netlist::{Mode, Netlist};

/// Linear-algebraic data of a circuit with `n` branches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitSpaces {
    pub names: Vec<String>,
    pub mode: Mode,
    /// `K`, one independent row per Kirchhoff current law equation.
    pub kcl: Matrix,
    /// `Δ = ker K`
    pub delta: Subspace,
    /// Loop currents spanning `Δ`: fundamental cycles, or a kernel basis for explicit rows.
    pub loops: Vec<Vector>,
    /// Inductances, the diagonal of `φ`.
    pub inductance: Vector,
    /// `1/C`; `ψ = -diag(1/C)` so that `∂L/∂q = ψ q`.
    pub inverse_capacitance: Vector,
    pub classes: LoopClasses,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopClasses {
    /// Loop currents vanishing on every inductive branch.
    pub non_inductive: Subspace,
    /// Loop currents vanishing on every inductive or capacitive branch.
    pub empty: Subspace,
    /// Purely capacitive loops completing a basis of `non_inductive` over `empty`.
    pub purely_capacitive: Vec<Vector>,
}

impl LoopClasses {
    pub fn has_purely_capacitive(&self) -> bool {
        !self.purely_capacitive.is_empty()
    }

    pub fn has_empty(&self) -> bool {
        !self.empty.is_zero()
    }
}

impl CircuitSpaces {
    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn phi(&self) -> Matrix {
        Matrix::diagonal(&self.inductance)
    }

    pub fn psi(&self) -> Matrix {
        Matrix::diagonal(&self.inverse_capacitance).neg()
    }

    /// Coordinate names on `(q, v, p)`.
    pub fn pontryagin_labels(&self) -> Vec<String> {
        ["q", "v", "p"]
            .iter()
            .flat_map(|k| self.names.iter().map(move |b| format!("{k}_{b}")))
            .collect()
    }
}

/// Node rows `+1` for branches leaving, `-1` for branches entering; dependent rows dropped.
pub fn incidence_rows(netlist: &Netlist) -> Matrix {
    let n = netlist.branches.len();
    let mut kept: Vec<Vector> = Vec::new();
    let mut span = Subspace::zero(n);
    for k in 0..netlist.nodes.len() {
        let mut row = zeros(n);
        for (j, b) in netlist.branches.iter().enumerate() {
            if b.from == b.to {
                continue;
            }
            if b.from == k {
                row[j] += one();
            }
            if b.to == k {
                row[j] -= one();
            }
        }
        if !span.contains(&row) {
            kept.push(row);
            span = Subspace::span(n, &kept);
        }
    }
    Matrix::from_rows(n, &kept)
}

/// Fundamental cycles of a breadth-first spanning forest, branches taken in listed order.
pub fn fundamental_cycles(netlist: &Netlist) -> Vec<Vector> {
    let nodes = netlist.nodes.len();
    let n = netlist.branches.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes];
    for (j, b) in netlist.branches.iter().enumerate() {
        if b.from != b.to {
            adj[b.from].push((j, b.to));
            adj[b.to].push((j, b.from));
        }
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nodes];
    let mut depth = vec![usize::MAX; nodes];
    let mut in_tree = vec![false; n];
    for root in 0..nodes {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(j, w) in &adj[u] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[u] + 1;
                    parent[w] = Some((j, u));
                    in_tree[j] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut cycles = Vec::new();
    for (j, b) in netlist.branches.iter().enumerate() {
        if in_tree[j] {
            continue;
        }
        let mut eta = zeros(n);
        eta[j] = one();
        // Return from `to` to `from` along the tree.
        let (mut x, mut y) = (b.to, b.from);
        let mut tail: Vec<(usize, usize, usize)> = Vec::new();
        while x != y {
            if depth[x] >= depth[y] {
                let (e, px) = parent[x].expect("non-root has a parent");
                let br = &netlist.branches[e];
                eta[e] += if br.from == x && br.to == px { one() } else { -one() };
                x = px;
            } else {
                let (e, py) = parent[y].expect("non-root has a parent");
                tail.push((e, py, y));
                y = py;
            }
        }
        for (e, from, to) in tail {
            let br = &netlist.branches[e];
            eta[e] += if br.from == from && br.to == to { one() } else { -one() };
        }
        cycles.push(eta);
    }
    cycles
}

fn vanishing_on(n: usize, idx: impl Iterator<Item = usize>) -> Subspace {
    let rows: Vec<Vector> = idx.map(|i| unit(n, i)).collect();
    Subspace::solutions_of(n, &rows)
}

pub fn build_spaces(netlist: &Netlist) -> Result<CircuitSpaces> {
    let n = netlist.branches.len();
    let (kcl, loops) = match &netlist.kcl_rows {
        Some(k) => {
            let delta = Subspace::kernel_of(k);
            (k.clone(), delta.basis().to_vec())
        }
        None => (incidence_rows(netlist), fundamental_cycles(netlist)),
    };
    let delta = Subspace::kernel_of(&kcl);
    if netlist.kcl_rows.is_none() && Subspace::span(n, &loops) != delta {
        return Err(Error::CrossCheck(
            "fundamental cycles do not span the current law subspace".into(),
        ));
    }
    let inductance: Vector = netlist.branches.iter().map(|b| b.inductance.clone()).collect();
    let inverse_capacitance: Vector = netlist
        .branches
        .iter()
        .map(|b| b.inverse_capacitance.clone())
        .collect();
    let inductive = netlist.branches.iter().enumerate().filter(|(_, b)| b.is_inductive());
    let non_inductive = delta.intersect(&vanishing_on(n, inductive.map(|(i, _)| i)));
    let stored = netlist.branches.iter().enumerate().filter(|(_, b)| !b.is_empty());
    let empty = delta.intersect(&vanishing_on(n, stored.map(|(i, _)| i)));
    let purely_capacitive = empty.complement_in(&non_inductive);
    Ok(CircuitSpaces {
        names: netlist.branch_names(),
        mode: netlist.mode,
        kcl,
        delta,
        loops,
        inductance,
        inverse_capacitance,
        classes: LoopClasses {
            non_inductive,
            empty,
            purely_capacitive,
        },
    })
}

/// `Q_W = ψ⁻¹(φ(W) + Δ°)`
fn charge_space(cs: &CircuitSpaces, w: &Subspace) -> Subspace {
    let target = w.image(&cs.phi()).sum(&cs.delta.annihilator());
    Subspace::preimage(&cs.psi(), &target)
}

/// `Δ₀ = Δ`, `Δ_k = Δ ∩ ψ⁻¹(φ(Δ_{k-1}) + Δ°)`, ending with the first repeated entry.
pub fn delta_chain(cs: &CircuitSpaces) -> Vec<Subspace> {
    let mut chain = vec![cs.delta.clone()];
    loop {
        let prev = chain.last().expect("nonempty");
        let next = cs.delta.intersect(&charge_space(cs, prev));
        let done = &next == prev;
        chain.push(next);
        if done {
            return chain;
        }
    }
}

/// `{q ∈ Q, v ∈ V, p = φ v}` in `(q, v, p)`.
fn pontryagin_set(cs: &CircuitSpaces, q: &Subspace, v: &Subspace) -> AffineSubspace {
    let n = cs.n();
    let phi = cs.phi();
    let mut gens = Vec::with_capacity(q.dim() + v.dim());
    for b in q.basis() {
        let mut g = b.clone();
        g.extend(zeros(2 * n));
        gens.push(g);
    }
    for b in v.basis() {
        let mut g = zeros(n);
        g.extend(b.iter().cloned());
        g.extend(phi.mul_vec(b));
        gens.push(g);
    }
    AffineSubspace::linear(Subspace::span(3 * n, &gens))
}

/// `M_j` from the closed forms in terms of the `Δ_k`.
pub fn closed_form_set(cs: &CircuitSpaces, deltas: &[Subspace], j: usize) -> AffineSubspace {
    let n = cs.n();
    let at = |k: usize| deltas[k.min(deltas.len() - 1)].clone();
    match j {
        0 => AffineSubspace::full(3 * n),
        1 => pontryagin_set(cs, &Subspace::full(n), &cs.delta),
        _ if j.is_multiple_of(2) => {
            let k = j / 2;
            pontryagin_set(cs, &charge_space(cs, &at(k - 1)), &at(k - 1))
        }
        _ => {
            let k = j.div_ceil(2);
            pontryagin_set(cs, &charge_space(cs, &at(k - 2)), &at(k - 1))
        }
    }
}

/// `M₀ ⊋ … ⊋ M_c` from the closed forms.
pub fn closed_form_chain(cs: &CircuitSpaces) -> Vec<AffineSubspace> {
    let deltas = delta_chain(cs);
    let mut chain = vec![closed_form_set(cs, &deltas, 0)];
    for j in 1.. {
        let next = closed_form_set(cs, &deltas, j);
        if &next == chain.last().expect("nonempty") {
            break;
        }
        chain.push(next);
    }
    chain
}

/// Nonholonomic Dirac system on `(q, v, p)` with `E = pv - ½ vᵀφv - ½ qᵀψq`.
pub fn circuit_system(cs: &CircuitSpaces) -> Result<ConstantDiracSystem> {
    let energy = pontryagin_energy(&cs.phi(), &Matrix::diagonal(&cs.inverse_capacitance))?;
    ConstantDiracSystem::new(nonholonomic_dirac(&cs.delta), energy)?
        .with_embedding(SymplecticEmbedding::pontryagin(cs.n()))
}

/// Generic constraint algorithm, cross-checked against the closed forms.
pub fn constraint_chain(cs: &CircuitSpaces) -> Result<CadResult> {
    let sys = circuit_system(cs)?;
    let res = cad_run(&sys, None)?;
    let closed = closed_form_chain(cs);
    if res.empty || res.chain != closed {
        return Err(Error::CrossCheck(format!(
            "closed-form chain {:?} differs from the constraint algorithm {:?}",
            closed.iter().map(AffineSubspace::dim).collect::<Vec<_>>(),
            res.dims()
        )));
    }
    Ok(res)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopReport {
    pub loop_dim: usize,
    pub non_inductive_dim: usize,
    pub empty_dim: usize,
    pub purely_capacitive_count: usize,
    pub has_purely_capacitive_loop: bool,
    pub has_empty_loop: bool,
    pub delta_dims: Vec<usize>,
    /// `φ(Δ) ⊆ φ(Δ₁) + Δ°`
    pub condition_star: bool,
    pub delta2_equals_delta1: bool,
    /// `φ(Δ) + Δ° = (Δ_NI)°`
    pub kvl_non_inductive: bool,
}

pub fn loop_report(cs: &CircuitSpaces) -> LoopReport {
    let deltas = delta_chain(cs);
    let d1 = deltas.get(1).cloned().unwrap_or_else(|| cs.delta.clone());
    let d2 = cs.delta.intersect(&charge_space(cs, &d1));
    let phi = cs.phi();
    let ann = cs.delta.annihilator();
    let condition_star = cs
        .delta
        .image(&phi)
        .is_subspace_of(&d1.image(&phi).sum(&ann));
    let kvl = cs.delta.image(&phi).sum(&ann) == cs.classes.non_inductive.annihilator();
    LoopReport {
        loop_dim: cs.delta.dim(),
        non_inductive_dim: cs.classes.non_inductive.dim(),
        empty_dim: cs.classes.empty.dim(),
        purely_capacitive_count: cs.classes.purely_capacitive.len(),
        has_purely_capacitive_loop: cs.classes.has_purely_capacitive(),
        has_empty_loop: cs.classes.has_empty(),
        delta_dims: deltas.iter().map(Subspace::dim).collect(),
        condition_star,
        delta2_equals_delta1: d2 == d1,
        kvl_non_inductive: kvl,
    }
}

/// `(q, v, p)` state from branch charges and currents with `p = φ v`.
pub fn state_from(cs: &CircuitSpaces, q: &[Rational], v: &[Rational]) -> Vector {
    let mut x = q.to_vec();
    x.extend(v.iter().cloned());
    x.extend(cs.phi().mul_vec(v));
    x
}
