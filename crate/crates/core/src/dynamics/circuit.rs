use std::str::FromStr;

use nalgebra::DVector;

use crate::cad::CadResult;
use crate::circuits::{
    constraint_chain, embed, reduced_system, CircuitSpaces, Preset,
    ReducedSystem,
};
use crate::constraints::{classify, foliated_field, Observable, Role};
use crate::error::{Error, Result};
use crate::linalg::rational::{add, sub, zeros, Rational, Vector};
use crate::linalg::{AffineMap, AffineSubspace, Matrix, Solver};

use super::{lower_to_float, lower_vector, LinearField, Monitor, MonitorKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// Darboux coordinates on the leaf through the initial state.
    Reduced,
    /// The leaf-independent Dirac-bracket field on `T*TE`.
    Full,
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reduced" => Ok(Target::Reduced),
            "full" => Ok(Target::Full),
            _ => Err(Error::Invalid(format!("unknown target {s:?}; expected reduced or full"))),
        }
    }
}

/// Exact field, its lowering, the initial state and the monitors for one circuit run.
#[derive(Clone, Debug)]
pub struct CircuitRun {
    pub target: Target,
    pub chain: CadResult,
    pub exact_field: AffineMap,
    pub exact_initial: Vector,
    pub field: LinearField,
    pub initial: DVector<f64>,
    pub labels: Vec<String>,
    pub monitors: Vec<Monitor>,
    pub reduced: Option<ReducedSystem>,
}

/// `x* + Σ w_i` over the basis of `W_c`, with `x*` the canonical base point of `M_c`: a
/// deterministic nontrivial state on the leaf through `x*`.
pub fn default_initial_state(res: &CadResult) -> Result<Vector> {
    let m = res
        .final_set()
        .ok_or_else(|| Error::Inconsistent("the final constraint set is empty".into()))?;
    let mut x = m.base().to_vec();
    for w in res.final_tangent.basis() {
        x = add(&x, w);
    }
    Ok(x)
}

fn monitors_for(
    constraints: &[(String, Observable, Role)],
    energy: &Observable,
) -> Result<Vec<Monitor>> {
    let mut out = vec![Monitor::new("energy", MonitorKind::Energy, energy)?];
    for (name, f, role) in constraints {
        let kind = if *role == Role::Leaf {
            MonitorKind::Leaf
        } else {
            MonitorKind::Constraint
        };
        out.push(Monitor::new(name.clone(), kind, f)?);
    }
    Ok(out)
}

/// Sets up a simulation from a state `x₀ = (q, v, p)` on the final constraint set.
/// `lambda` fixes the multipliers of primary first class constraints (zero by default).
pub fn simulate_circuit(
    cs: &CircuitSpaces,
    x0: Option<&[Rational]>,
    target: Target,
    lambda: Option<&[Rational]>,
) -> Result<CircuitRun> {
    let n = cs.n();
    let chain = constraint_chain(cs)?;
    let x0 = match x0 {
        Some(x) => x.to_vec(),
        None => default_initial_state(&chain)?,
    };
    if x0.len() != 3 * n {
        return Err(Error::Dimension(format!(
            "initial state of length {} for {n} branches (expected 3n = {})",
            x0.len(),
            3 * n
        )));
    }
    let m = chain
        .final_set()
        .ok_or_else(|| Error::Inconsistent("the final constraint set is empty".into()))?;
    if !m.contains(&x0) {
        return Err(Error::Invalid("initial state is not on the final constraint set".into()));
    }
    let emb = embed(cs, Some(&x0[..n]), Preset::Generic)?;
    let tagged: Vec<(String, Observable, Role)> = emb
        .labels
        .iter()
        .zip(emb.constraints.phis())
        .zip(emb.constraints.roles())
        .map(|((l, f), r)| (l.clone(), f.clone(), *r))
        .collect();
    match target {
        Target::Reduced => {
            let leaf = AffineSubspace::new(x0.clone(), chain.final_tangent.clone());
            let red = reduced_system(cs, &chain, leaf.base())?;
            let z0 = Solver::new(&red.basis)
                .solve(&sub(&x0, leaf.base()))
                .ok_or_else(|| Error::CrossCheck("initial state is off its own leaf".into()))?;
            let mut lifted = red.base.clone();
            lifted.extend(zeros(n));
            let basis = red.basis.vstack(&Matrix::zeros(n, red.basis.cols()));
            let pulled = tagged
                .iter()
                .map(|(l, f, r)| Ok((l.clone(), f.pullback(&lifted, &basis)?, *r)))
                .collect::<Result<Vec<_>>>()?;
            let monitors = monitors_for(&pulled, &red.hamiltonian)?;
            Ok(CircuitRun {
                target,
                chain,
                field: lower_to_float(&red.field)?,
                exact_field: red.field.clone(),
                initial: lower_vector(&z0)?,
                exact_initial: z0,
                labels: red.labels.clone(),
                monitors,
                reduced: Some(red),
            })
        }
        Target::Full => {
            let cls = classify(&emb.constraints)?;
            let lambda = match lambda {
                Some(l) => l.to_vec(),
                None => zeros(cls.multiplier_dim()),
            };
            let field = foliated_field(&cls, &emb.energy, &lambda)?;
            let y0 = emb.lift(&x0);
            let monitors = monitors_for(&tagged, &emb.energy)?;
            Ok(CircuitRun {
                target,
                chain,
                field: lower_to_float(&field)?,
                exact_field: field,
                initial: lower_vector(&y0)?,
                exact_initial: y0,
                labels: emb.coordinates.clone(),
                monitors,
                reduced: None,
            })
        }
    }
}
