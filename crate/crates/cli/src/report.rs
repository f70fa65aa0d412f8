//! JSON reports. Every rational is written as a `"p/q"` string and every map keeps a fixed
//! field order, so the bytes only depend on the input.

use serde::Serialize;

use dirac_cad::cad::{uniqueness_report, CadResult};
use dirac_cad::circuits::{
    circuit_system, constraint_chain, delta_chain, embed, loop_report, CircuitSpaces, LoopReport,
    Preset,
};
use dirac_cad::constraints::{classify, Role};
use dirac_cad::linalg::rational::{format_rational, Rational};
use dirac_cad::linalg::{AffineSubspace, Matrix, Subspace};
use dirac_cad::{Error, Result};

fn q(r: &Rational) -> String {
    format_rational(r)
}

fn vec_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(q).collect()
}

pub fn matrix_strings(m: &Matrix) -> Vec<Vec<String>> {
    m.row_vectors().iter().map(|r| vec_strings(r)).collect()
}

/// `Σ c_i x_i = rhs` with the zero terms left out.
fn equation_text(row: &[Rational], rhs: &Rational, labels: &[String]) -> String {
    let mut out = String::new();
    for (c, name) in row.iter().zip(labels) {
        if num_traits::Zero::is_zero(c) {
            continue;
        }
        let neg = num_traits::Signed::is_negative(c);
        let mag = num_traits::Signed::abs(c);
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !num_traits::One::is_one(&mag) {
            out.push_str(&q(&mag));
            out.push(' ');
        }
        out.push_str(name);
    }
    if out.is_empty() {
        out.push('0');
    }
    format!("{out} = {}", q(rhs))
}

#[derive(Serialize)]
pub struct Equation {
    pub coefficients: Vec<String>,
    pub rhs: String,
    pub text: String,
}

#[derive(Serialize)]
pub struct ChainMember {
    pub index: usize,
    pub dim: usize,
    pub base: Vec<String>,
    pub equations: Vec<Equation>,
    /// Equations of this member not implied by the previous one.
    pub new_equations: Vec<Equation>,
}

#[derive(Serialize)]
pub struct DeltaMember {
    pub index: usize,
    pub dim: usize,
    pub basis: Vec<Vec<String>>,
}

#[derive(Serialize)]
pub struct LoopClassesReport {
    pub loops: Vec<Vec<String>>,
    pub non_inductive: Vec<Vec<String>>,
    pub empty: Vec<Vec<String>>,
    pub purely_capacitive: Vec<Vec<String>>,
    pub summary: LoopReport,
}

#[derive(Serialize)]
pub struct Classification {
    pub constraints: usize,
    pub primary: usize,
    pub two_s: usize,
    pub s_prime: usize,
    pub second_class: usize,
    pub first_class: usize,
    pub first_class_primary: usize,
    pub first_class_secondary: usize,
    pub all_second_class: bool,
    pub first_class_labels: Vec<String>,
}

#[derive(Serialize)]
pub struct AnalyzeReport {
    pub branches: Vec<String>,
    pub mode: dirac_cad::circuits::Mode,
    pub coordinates: Vec<String>,
    pub chain_dims: Vec<usize>,
    pub stop_index: usize,
    pub empty: bool,
    pub chain: Vec<ChainMember>,
    pub delta_chain: Vec<DeltaMember>,
    pub loop_classes: LoopClassesReport,
    pub classification: Classification,
    pub fiber_dim: usize,
    pub final_tangent_dim: usize,
    pub leaf_symplectic: bool,
    pub unique_solutions: bool,
}

fn equations_of(m: &AffineSubspace, labels: &[String]) -> Vec<(Vec<Rational>, Rational, Equation)> {
    m.equations()
        .into_iter()
        .map(|(row, rhs)| {
            let e = Equation {
                coefficients: vec_strings(&row),
                rhs: q(&rhs),
                text: equation_text(&row, &rhs, labels),
            };
            (row, rhs, e)
        })
        .collect()
}

/// `a·x = b` holds on all of `m`.
fn implied(m: &AffineSubspace, row: &[Rational], rhs: &Rational) -> bool {
    let dot = dirac_cad::linalg::rational::dot;
    &dot(row, m.base()) == rhs && m.direction().basis().iter().all(|d| num_traits::Zero::is_zero(&dot(row, d)))
}

fn chain_members(res: &CadResult, labels: &[String]) -> Vec<ChainMember> {
    res.chain
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let eqs = equations_of(m, labels);
            let mut equations = Vec::new();
            let mut new_equations = Vec::new();
            for (row, rhs, e) in eqs {
                let fresh = k > 0 && !implied(&res.chain[k - 1], &row, &rhs);
                if fresh {
                    new_equations.push(Equation {
                        coefficients: e.coefficients.clone(),
                        rhs: e.rhs.clone(),
                        text: e.text.clone(),
                    });
                }
                equations.push(e);
            }
            ChainMember {
                index: k,
                dim: m.dim(),
                base: vec_strings(m.base()),
                equations,
                new_equations,
            }
        })
        .collect()
}

fn basis_strings(s: &Subspace) -> Vec<Vec<String>> {
    s.basis().iter().map(|v| vec_strings(v)).collect()
}

pub fn analyze(cs: &CircuitSpaces) -> Result<AnalyzeReport> {
    let labels = cs.pontryagin_labels();
    let res = constraint_chain(cs)?;
    let rep = uniqueness_report(&circuit_system(cs)?, &res)?;
    let q0 = res
        .final_set()
        .map(|m| m.base()[..cs.n()].to_vec())
        .ok_or_else(|| Error::Inconsistent("the final constraint set is empty".into()))?;
    let emb = embed(cs, Some(&q0), Preset::Generic)?;
    let cls = classify(&emb.constraints)?;
    let primary = emb.constraints.roles().iter().filter(|r| r.is_primary()).count();
    let first_labels: Vec<String> = cls
        .psi_prime
        .iter()
        .chain(&cls.psi_dprime)
        .map(|p| emb.labels[p.index].clone())
        .collect();
    let second_class = cls.chi_indices().len();
    let deltas = delta_chain(cs);
    Ok(AnalyzeReport {
        branches: cs.names.clone(),
        mode: cs.mode,
        coordinates: labels.clone(),
        chain_dims: res.dims(),
        stop_index: res.stop_index,
        empty: res.empty,
        chain: chain_members(&res, &labels),
        delta_chain: deltas
            .iter()
            .enumerate()
            .map(|(k, d)| DeltaMember {
                index: k,
                dim: d.dim(),
                basis: basis_strings(d),
            })
            .collect(),
        loop_classes: LoopClassesReport {
            loops: cs.loops.iter().map(|v| vec_strings(v)).collect(),
            non_inductive: basis_strings(&cs.classes.non_inductive),
            empty: basis_strings(&cs.classes.empty),
            purely_capacitive: cs.classes.purely_capacitive.iter().map(|v| vec_strings(v)).collect(),
            summary: loop_report(cs),
        },
        classification: Classification {
            constraints: emb.constraints.len(),
            primary,
            two_s: 2 * cls.s,
            s_prime: cls.s_prime,
            second_class,
            first_class: first_labels.len(),
            first_class_primary: cls.psi_prime.len(),
            first_class_secondary: cls.psi_dprime.len(),
            all_second_class: first_labels.is_empty(),
            first_class_labels: first_labels,
        },
        fiber_dim: res.fiber_dim,
        final_tangent_dim: res.final_tangent.dim(),
        leaf_symplectic: rep.leaf_symplectic(),
        unique_solutions: rep.unique(),
    })
}

#[derive(Serialize)]
pub struct BracketReport {
    pub preset: String,
    pub branches: Vec<String>,
    pub constraint_labels: Vec<String>,
    pub constraint_roles: Vec<Role>,
    pub sigma: Vec<Vec<String>>,
    pub sigma_inverse: Vec<Vec<String>>,
    pub coordinates: Vec<String>,
    pub dirac_bracket: Vec<Vec<String>>,
}

/// `Σ`, `Σ⁻¹` (checked against the identity) and `{y_i, y_j}_χ` with `χ` every embedded
/// constraint.
pub fn bracket(cs: &CircuitSpaces, preset: Preset, preset_name: &str, q0: Option<&[Rational]>) -> Result<BracketReport> {
    let emb = embed(cs, q0, preset)?;
    let m = emb.sigma.rows();
    let Some(inverse) = emb.sigma.inverse() else {
        let kernel = Subspace::kernel_of(&emb.sigma);
        let dirs: Vec<String> = kernel
            .basis()
            .iter()
            .map(|v| {
                equation_text(v, &Rational::from_integer(0.into()), &emb.labels)
                    .trim_end_matches(" = 0")
                    .to_string()
            })
            .collect();
        let chi_note = if emb.sigma.rank() == 0 { " (no second class constraints: χ is empty)" } else { "" };
        return Err(Error::Singular(format!(
            "Σ ({m}x{m}) has rank {}{chi_note}; first class directions: {}",
            emb.sigma.rank(),
            dirs.join("; ")
        )));
    };
    if emb.sigma.mul(&inverse) != Matrix::identity(m) {
        return Err(Error::CrossCheck("Σ Σ⁻¹ is not the identity".into()));
    }
    let ctx = dirac_cad::constraints::DiracBracketContext::new(emb.space().clone(), emb.constraints.phis().to_vec())?;
    Ok(BracketReport {
        preset: preset_name.to_string(),
        branches: cs.names.clone(),
        constraint_labels: emb.labels.clone(),
        constraint_roles: emb.constraints.roles().to_vec(),
        sigma: matrix_strings(&emb.sigma),
        sigma_inverse: matrix_strings(&inverse),
        coordinates: emb.coordinates.clone(),
        dirac_bracket: matrix_strings(ctx.coordinate_brackets()),
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use dirac_cad::linalg::rational::{int, ratio};

    #[test]
    fn equation_text_skips_zeros_and_unit_coefficients() {
        let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        assert_eq!(equation_text(&[int(1), int(0), ratio(-1, 3)], &int(0), &labels), "a - 1/3 c = 0");
        assert_eq!(equation_text(&[int(0), int(-1), int(0)], &int(2), &labels), "-b = 2");
    }
}
