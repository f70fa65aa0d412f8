use std::str::FromStr;

use crate::constraints::{bracket_matrix, ConstraintSet, Observable, Role};
use crate::error::{dim_check, Error, Result};
use crate::linalg::rational::{dot, one, zero, zeros, Rational, Vector};
use crate::linalg::Matrix;
use crate::symplectic::SymplecticSpace;

use super::spaces::CircuitSpaces;

/// Ordering and signs of the embedded constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `Kq - Kq₀`, `Γᵀ C⁻¹ q`, `p - φv`, `Kv`, `Γᵀ C⁻¹ v`, `ν`.
    Generic,
    /// `p - φv`, `-Kv`, `Γᵀ C⁻¹ q`, `Γᵀ C⁻¹ v`, `-(Kq - Kq₀)`, `ν`: the order used for the
    /// worked example with four branches.
    PaperFig1,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generic" => Ok(Preset::Generic),
            "paper-fig1" => Ok(Preset::PaperFig1),
            _ => Err(Error::Invalid(format!(
                "unknown preset {s:?}; expected generic or paper-fig1"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Group {
    KclQ,
    KvlQ,
    Flux,
    KclV,
    KvlV,
    Nu,
}

/// Circuit constraints on `T*TE` with coordinates `(q, v, p, ν)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedCircuit {
    pub constraints: ConstraintSet,
    pub labels: Vec<String>,
    pub coordinates: Vec<String>,
    pub energy: Observable,
    /// `Σ_ij = {ε_i, ε_j}`
    pub sigma: Matrix,
}

impl EmbeddedCircuit {
    pub fn space(&self) -> &SymplecticSpace {
        self.constraints.space()
    }

    /// `(q, v, p) ↦ (q, v, p, 0)`
    pub fn lift(&self, x: &[Rational]) -> Vector {
        let mut y = x.to_vec();
        y.extend(zeros(x.len() / 3));
        y
    }
}

fn covector(n: usize, block: usize, values: &[Rational]) -> Vector {
    let mut a = zeros(4 * n);
    for (i, v) in values.iter().enumerate() {
        a[block * n + i] = v.clone();
    }
    a
}

/// Embeds the circuit constraints; `base_charges` fixes the leaf `Kq = Kq₀`.
pub fn embed(
    cs: &CircuitSpaces,
    base_charges: Option<&[Rational]>,
    preset: Preset,
) -> Result<EmbeddedCircuit> {
    let n = cs.n();
    let q0 = base_charges.map(<[Rational]>::to_vec).unwrap_or_else(|| zeros(n));
    dim_check(q0.len() == n, || format!("{} base charges for {n} branches", q0.len()))?;
    let kcl = cs.kcl.row_vectors();
    let inv_c = Matrix::diagonal(&cs.inverse_capacitance);
    let pc: Vec<Vector> = cs
        .classes
        .purely_capacitive
        .iter()
        .map(|eta| inv_c.mul_vec(eta))
        .collect();

    let build = |g: Group| -> Vec<(Observable, String)> {
        match g {
            Group::KclQ => kcl
                .iter()
                .enumerate()
                .map(|(i, k)| {
                    (
                        Observable::affine(covector(n, 0, k), -dot(k, &q0)),
                        format!("kcl_q[{i}]"),
                    )
                })
                .collect(),
            Group::KvlQ => pc
                .iter()
                .enumerate()
                .map(|(j, r)| (Observable::affine(covector(n, 0, r), zero()), format!("kvl_pc_q[{j}]")))
                .collect(),
            Group::Flux => (0..n)
                .map(|i| {
                    let mut a = zeros(4 * n);
                    a[2 * n + i] = one();
                    a[n + i] = -&cs.inductance[i];
                    (Observable::affine(a, zero()), format!("flux[{}]", cs.names[i]))
                })
                .collect(),
            Group::KclV => kcl
                .iter()
                .enumerate()
                .map(|(i, k)| (Observable::affine(covector(n, 1, k), zero()), format!("kcl_v[{i}]")))
                .collect(),
            Group::KvlV => pc
                .iter()
                .enumerate()
                .map(|(j, r)| (Observable::affine(covector(n, 1, r), zero()), format!("kvl_pc_v[{j}]")))
                .collect(),
            Group::Nu => (0..n)
                .map(|i| {
                    let mut a = zeros(4 * n);
                    a[3 * n + i] = one();
                    (Observable::affine(a, zero()), format!("nu[{}]", cs.names[i]))
                })
                .collect(),
        }
    };
    let order: [(Group, bool); 6] = match preset {
        Preset::Generic => [
            (Group::KclQ, false),
            (Group::KvlQ, false),
            (Group::Flux, false),
            (Group::KclV, false),
            (Group::KvlV, false),
            (Group::Nu, false),
        ],
        Preset::PaperFig1 => [
            (Group::Flux, false),
            (Group::KclV, true),
            (Group::KvlQ, false),
            (Group::KvlV, false),
            (Group::KclQ, true),
            (Group::Nu, false),
        ],
    };
    let minus_one = -one();
    let mut phis = Vec::new();
    let mut labels = Vec::new();
    let mut roles = Vec::new();
    for (g, negate) in order {
        let role = match g {
            Group::Nu => Role::Primary,
            Group::KclQ => Role::Leaf,
            _ => Role::Secondary,
        };
        for (obs, label) in build(g) {
            if negate {
                phis.push(obs.scale(&minus_one));
                labels.push(format!("-{label}"));
            } else {
                phis.push(obs);
                labels.push(label);
            }
            roles.push(role);
        }
    }
    let space = SymplecticSpace::canonical(2 * n);
    let constraints = ConstraintSet::new(space, phis, roles)?;
    let coordinates = ["q", "v", "p", "nu"]
        .iter()
        .flat_map(|k| cs.names.iter().map(move |b| format!("{k}_{b}")))
        .collect();
    let sigma = bracket_matrix(&constraints).phi;
    Ok(EmbeddedCircuit {
        sigma,
        constraints,
        labels,
        coordinates,
        energy: circuit_energy(cs)?,
    })
}

/// `E = pv - ½ vᵀφv + ½ qᵀ C⁻¹ q` on `(q, v, p, ν)`.
pub fn circuit_energy(cs: &CircuitSpaces) -> Result<Observable> {
    let n = cs.n();
    let mut h = Matrix::zeros(4 * n, 4 * n);
    for i in 0..n {
        h[(i, i)] = cs.inverse_capacitance[i].clone();
        h[(n + i, n + i)] = -&cs.inductance[i];
        h[(n + i, 2 * n + i)] = one();
        h[(2 * n + i, n + i)] = one();
    }
    Observable::new(h, zeros(4 * n), zero())
}
