//! Acceptance checks for the shipped fixtures and seeded corpora. Each criterion produces one
//! outcome line; a panic inside a check is reported as a failure of that check.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use num_traits::Zero;

use crate::cad::{cad_run, gotay_nester, uniqueness_report, ConstantDiracSystem, QuadraticEnergy};
use crate::circuits::{
    build_spaces, circuit_system, closed_form_chain, constraint_chain, embed, loop_report,
    parse_netlist, reduced_system, CircuitSpaces, Mode, Netlist, Preset, FIGURE1_JSON,
    FIGURE1_UNIT_JSON,
};
use crate::constraints::{
    classify, dirac_bracket, foliated_field, leaf_family, tangent_to_leaves, DiracBracketContext,
    Observable,
};
use crate::corpus::{self, netlist_corpus};
use crate::dirac::{check_dirac, LinearDiracStructure};
use crate::dynamics::{exact_flow, exact_trajectory, integrate_rk4, simulate_circuit, Target};
use crate::error::{Error, Result};
use crate::linalg::rational::{dot, int, is_zero_vec, one, zero, zeros, Rational, Vector};
use crate::linalg::{AffineSubspace, Matrix, Subspace};
use crate::symplectic::PresymplecticForm;

/// Netlist texts the circuit criteria run on.
#[derive(Clone, Debug)]
pub struct Fixtures {
    pub figure1: String,
    pub figure1_unit: String,
}

impl Default for Fixtures {
    fn default() -> Self {
        Fixtures {
            figure1: FIGURE1_JSON.to_string(),
            figure1_unit: FIGURE1_UNIT_JSON.to_string(),
        }
    }
}

impl Fixtures {
    /// Shipped fixtures, with `figure1.json` and `figure1_unit.json` replaced by the files
    /// of the same name in `dir` where present.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let mut f = Fixtures::default();
        for (name, slot) in [
            ("figure1.json", &mut f.figure1),
            ("figure1_unit.json", &mut f.figure1_unit),
        ] {
            let path = dir.join(name);
            if path.exists() {
                *slot = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
            }
        }
        Ok(f)
    }
}

pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub tags: &'static [&'static str],
    check: fn(&Fixtures) -> std::result::Result<String, String>,
}

impl Criterion {
    /// A filter matches the id, the name, or one of the tags.
    pub fn matches(&self, filter: &str) -> bool {
        filter == self.id.to_string() || filter == self.name || self.tags.contains(&filter)
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {:<22} {:>7.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub fn criteria() -> &'static [Criterion] {
    const C: &[Criterion] = &[
        Criterion { id: 1, name: "figure1-chain", tags: &["circuit", "figure1"], check: chain_check },
        Criterion { id: 2, name: "figure1-sigma", tags: &["circuit", "figure1"], check: sigma_check },
        Criterion { id: 3, name: "figure1-dirac-block", tags: &["circuit", "figure1"], check: a_block_check },
        Criterion { id: 4, name: "figure1-reduced-ode", tags: &["circuit", "figure1", "dynamics"], check: reduced_check },
        Criterion { id: 5, name: "stop-index", tags: &["circuit", "corpus"], check: stop_index_check },
        Criterion { id: 6, name: "negative-capacitance", tags: &["circuit"], check: negative_c_check },
        Criterion { id: 7, name: "leaf-symplecticity", tags: &["circuit", "corpus"], check: leaf_check },
        Criterion { id: 8, name: "flat-annihilator", tags: &["dirac", "corpus"], check: flat_check },
        Criterion { id: 9, name: "dirac-bracket-algebra", tags: &["bracket", "corpus"], check: bracket_algebra_check },
        Criterion { id: 10, name: "leaf-independence", tags: &["bracket", "corpus"], check: leaf_independence_check },
        Criterion { id: 11, name: "cad-equivalences", tags: &["cad", "circuit", "corpus"], check: cad_check },
        Criterion { id: 12, name: "rk4-order", tags: &["dynamics", "figure1"], check: rk4_order_check },
    ];
    C
}

/// Runs every criterion matching `filter` (all of them when `None`), in parallel.
pub fn run(fixtures: &Fixtures, filter: Option<&str>) -> Vec<Outcome> {
    let selected: Vec<&Criterion> = criteria()
        .iter()
        .filter(|c| filter.is_none_or(|f| c.matches(f)))
        .collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|c| scope.spawn(move || run_one(c, fixtures)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion thread")).collect()
    })
}

fn run_one(c: &Criterion, fixtures: &Fixtures) -> Outcome {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(|| (c.check)(fixtures)));
    let elapsed = start.elapsed();
    let (passed, detail) = match result {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (false, format!("panicked: {msg}"))
        }
    };
    Outcome {
        id: c.id,
        name: c.name,
        passed,
        detail,
        elapsed,
    }
}

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn lib<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

struct FourBranch {
    cs: CircuitSpaces,
    l: Rational,
    c1: Rational,
    c2: Rational,
    c3: Rational,
}

/// The four-branch fixture, with its element values read back by branch name.
fn four_branch(text: &str) -> std::result::Result<FourBranch, String> {
    let nl = lib(parse_netlist(text, Mode::Physical))?;
    ensure(nl.branch_names() == ["L", "C1", "C2", "C3"], || {
        format!("fixture branches {:?}, expected [L, C1, C2, C3]", nl.branch_names())
    })?;
    let b = &nl.branches;
    let cap = |i: usize| {
        ensure(b[i].is_capacitive() && !b[i].is_inductive(), || {
            format!("branch {} is not a pure capacitor", b[i].name)
        })
        .map(|_| one() / &b[i].inverse_capacitance)
    };
    ensure(b[0].is_inductive() && !b[0].is_capacitive(), || "branch L is not a pure inductor".into())?;
    let (c1, c2, c3) = (cap(1)?, cap(2)?, cap(3)?);
    let l = b[0].inductance.clone();
    let cs = lib(build_spaces(&nl))?;
    let rows = vec![
        vec![int(-1), zero(), one(), zero()],
        vec![zero(), int(-1), one(), int(-1)],
    ];
    ensure(cs.delta == Subspace::solutions_of(4, &rows), || {
        "fixture Kirchhoff current law differs from the four-branch circuit".into()
    })?;
    Ok(FourBranch { cs, l, c1, c2, c3 })
}

fn chain_check(fx: &Fixtures) -> Check {
    let start = Instant::now();
    let f = four_branch(&fx.figure1)?;
    let res = lib(constraint_chain(&f.cs))?;
    ensure(res.dims() == [12, 6, 5, 4], || format!("dims {:?}", res.dims()))?;
    ensure(res.stop_index == 3 && !res.empty, || format!("stop {}", res.stop_index))?;
    let n = 4;
    let mut q_row = zeros(3 * n);
    q_row[1] = one() / &f.c1;
    q_row[3] = -(one() / &f.c3);
    let mut v_row = q_row.clone();
    v_row.rotate_right(n);
    let m2 = res.chain[1].intersect_equations(&[q_row], &[zero()]);
    ensure(m2.as_ref() == Some(&res.chain[2]), || "M2 is not M1 with q_C1/C1 = q_C3/C3".into())?;
    let m3 = res.chain[2].intersect_equations(&[v_row], &[zero()]);
    ensure(m3.as_ref() == Some(&res.chain[3]), || "M3 is not M2 with v_C1/C1 = v_C3/C3".into())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.2} s"))?;
    Ok(format!(
        "dims [12, 6, 5, 4], M4 = M3, q_C1/C1 = q_C3/C3 and v_C1/C1 = v_C3/C3 in {:.0} ms",
        secs * 1e3
    ))
}

/// Reference bracket matrix of the 14 embedding constraints in the `paper-fig1` order.
/// Its row 8 holds the two entries one column to the left; column 8 has them in place.
pub fn reference_sigma(l: &Rational, inv_c1: &Rational, inv_c3: &Rational) -> Matrix {
    let (a, b) = (inv_c1.clone(), inv_c3.clone());
    let mut s = Matrix::zeros(14, 14);
    let entries: [(usize, usize, Rational); 30] = [
        (1, 9, int(-1)),
        (1, 11, -l.clone()),
        (2, 7, -a.clone()),
        (2, 10, int(-1)),
        (3, 9, one()),
        (3, 10, one()),
        (4, 7, b.clone()),
        (4, 10, int(-1)),
        (5, 11, one()),
        (5, 13, int(-1)),
        (6, 12, one()),
        (6, 13, int(-1)),
        (6, 14, one()),
        (7, 2, a.clone()),
        (7, 4, -b.clone()),
        (8, 11, a.clone()),
        (8, 13, -b.clone()),
        (9, 1, one()),
        (9, 3, int(-1)),
        (10, 2, one()),
        (10, 3, int(-1)),
        (10, 4, one()),
        (11, 1, l.clone()),
        (11, 5, int(-1)),
        (12, 6, int(-1)),
        (12, 8, -a),
        (13, 5, one()),
        (13, 6, one()),
        (14, 6, int(-1)),
        (14, 8, b),
    ];
    for (i, j, x) in entries {
        s[(i - 1, j - 1)] = x;
    }
    s
}

fn sigma_check(fx: &Fixtures) -> Check {
    let f = four_branch(&fx.figure1)?;
    let emb = lib(embed(&f.cs, None, Preset::PaperFig1))?;
    let reference = reference_sigma(&f.l, &(one() / &f.c1), &(one() / &f.c3));
    let mut restored = reference.clone();
    for j in 0..14 {
        restored[(7, j)] = -reference[(j, 7)].clone();
    }
    let mut differing = Vec::new();
    for i in 0..14 {
        for j in 0..14 {
            if emb.sigma[(i, j)] != restored[(i, j)] {
                return Err(format!(
                    "entry ({}, {}) is {}, expected {}",
                    i + 1,
                    j + 1,
                    emb.sigma[(i, j)],
                    restored[(i, j)]
                ));
            }
            if emb.sigma[(i, j)] != reference[(i, j)] {
                differing.push((i + 1, j + 1));
            }
        }
    }
    ensure(differing == [(8, 11), (8, 12), (8, 13), (8, 14)], || {
        format!("unexpected differences from the reference matrix at {differing:?}")
    })?;
    let inv = emb.sigma.inverse().ok_or("Σ is singular")?;
    ensure(emb.sigma.mul(&inv) == Matrix::identity(14), || "Σ Σ⁻¹ ≠ I".into())?;
    Ok("14x14 Σ equal in all 196 entries (reference row 8 restored from its column), invertible".into())
}

fn a_block_check(fx: &Fixtures) -> Check {
    let f = four_branch(&fx.figure1)?;
    let emb = lib(embed(&f.cs, None, Preset::PaperFig1))?;
    let cls = lib(classify(&emb.constraints))?;
    ensure(cls.psi_prime.is_empty() && cls.psi_dprime.is_empty(), || "first class constraints present".into())?;
    let ctx = lib(cls.context())?;
    let t = ctx.coordinate_brackets();
    let s = &f.c1 + &f.c3;
    let (r1, r3, il) = (&f.c1 / &s, &f.c3 / &s, one() / &f.l);
    let row_l = vec![il.clone(), &r1 * &il, il.clone(), &r3 * &il, one()];
    let row_1 = vec![&r1 * &il, &r1 * &r1 * &il, &r1 * &il, &r1 * &r3 * &il, r1.clone()];
    let row_3 = vec![&r3 * &il, &r1 * &r3 * &il, &r3 * &il, &r3 * &r3 * &il, r3.clone()];
    let a = [row_l.clone(), row_1, row_l, row_3];
    // rows q_L … q_C3, columns v_L … v_C3, p_L
    let mut expected = Matrix::zeros(16, 16);
    for i in 0..4 {
        for j in 0..5 {
            expected[(i, 4 + j)] = a[i][j].clone();
            expected[(4 + j, i)] = -a[i][j].clone();
        }
    }
    for i in 0..16 {
        for j in 0..16 {
            ensure(t[(i, j)] == expected[(i, j)], || {
                format!("{{{}, {}}} = {}, expected {}", emb.coordinates[i], emb.coordinates[j], t[(i, j)], expected[(i, j)])
            })?;
        }
    }
    Ok(format!("A block and the rest of the 16x16 tensor exact; {{q_C1, v_C1}} = {}", t[(1, 5)]))
}

fn reduced_check(fx: &Fixtures) -> Check {
    let f = four_branch(&fx.figure1)?;
    let run = lib(simulate_circuit(&f.cs, None, Target::Reduced, None))?;
    let k = one() / (&f.c1 + &f.c3) + one() / &f.c2;
    let mut field = Matrix::zeros(2, 2);
    field[(0, 1)] = one() / &f.l;
    field[(1, 0)] = -k;
    ensure(run.labels == ["q_L", "p_L"], || format!("reduced coordinates {:?}", run.labels))?;
    ensure(run.exact_field.matrix == field && is_zero_vec(&run.exact_field.offset), || {
        "reduced field differs from q̇_L = p_L/L, ṗ_L = -q_L (1/(C1+C3) + 1/C2)".into()
    })?;
    let u = four_branch(&fx.figure1_unit)?;
    let unit = lib(simulate_circuit(&u.cs, None, Target::Reduced, None))?;
    let m = &unit.exact_field.matrix;
    let omega2 = -(&m[(1, 0)] * &m[(0, 1)]);
    ensure(omega2 == Rational::new(3.into(), 2.into()) && m[(0, 0)].is_zero() && m[(1, 1)].is_zero(), || {
        format!("unit-parameter ω² = {omega2}, expected 3/2")
    })?;
    let (dt, steps) = (1e-3, 100_000);
    let rk = lib(integrate_rk4(&unit.field, &unit.initial, dt, steps, unit.labels.clone(), &[]))?;
    let ex = lib(exact_trajectory(&unit.field, &unit.initial, dt, steps, unit.labels.clone(), &[]))?;
    let scale = ex.states.iter().map(|x| x.amax()).fold(0.0, f64::max);
    let rel = crate::dynamics::max_state_error(&rk, &ex) / scale;
    ensure(rel < 1e-9, || format!("relative error {rel:e} against the exponential"))?;
    Ok(format!("exact reduced field; unit ω² = 3/2, RK4 dt = 1e-3 on [0, 100] relative error {rel:.1e}"))
}

/// Cycle ranks `edges - nodes + components` of the whole graph, the non-inductive subgraph and
/// the empty subgraph.
fn cycle_ranks(nl: &Netlist) -> (usize, usize, usize) {
    let rank = |keep: &dyn Fn(&crate::circuits::Branch) -> bool| {
        let mut parent: Vec<usize> = (0..nl.nodes.len()).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut r = 0;
        for b in nl.branches.iter().filter(|b| keep(b)) {
            let (a, c) = (root(&mut parent, b.from), root(&mut parent, b.to));
            if a == c {
                r += 1;
            } else {
                parent[a] = c;
            }
        }
        r
    };
    (rank(&|_| true), rank(&|b| !b.is_inductive()), rank(&|b| b.is_empty()))
}

const CORPUS_SEED: u64 = 5;
const CORPUS_SIZE: usize = 500;

fn stop_index_check(_: &Fixtures) -> Check {
    let start = Instant::now();
    let (mut pc_count, mut empty_count) = (0, 0);
    for nl in netlist_corpus(CORPUS_SEED, CORPUS_SIZE, 8) {
        let cs = lib(build_spaces(&nl))?;
        let (loops, ni, empty) = cycle_ranks(&nl);
        let pc = ni > empty;
        pc_count += usize::from(pc);
        empty_count += usize::from(empty > 0);
        ensure(cs.delta.dim() == loops, || format!("loop space dimension on {}", nl.to_json()))?;
        let res = lib(constraint_chain(&cs))?;
        let expected = if pc { 3 } else { 1 };
        ensure(res.stop_index == expected, || {
            format!("stop {} (expected {expected}) on {}", res.stop_index, nl.to_json())
        })?;
        ensure(loop_report(&cs).delta2_equals_delta1, || format!("Δ₂ ≠ Δ₁ on {}", nl.to_json()))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "{CORPUS_SIZE} netlists ({pc_count} with capacitive loops, {empty_count} with empty loops), Δ₂ = Δ₁"
    ))
}

fn negative_c_check(_: &Fixtures) -> Check {
    let text = r#"{"nodes": ["a", "b"], "branches": [
        {"name": "L", "from": "a", "to": "b", "L": "1"},
        {"name": "C", "from": "a", "to": "b", "C": "1"},
        {"name": "Cn", "from": "a", "to": "b", "C": "-1"}]}"#;
    ensure(parse_netlist(text, Mode::Physical).is_err(), || "physical mode accepted C < 0".into())?;
    let cs = lib(build_spaces(&lib(parse_netlist(text, Mode::General))?))?;
    let res = lib(constraint_chain(&cs))?;
    ensure(res.stop_index == 5, || format!("stop {} with dims {:?}", res.stop_index, res.dims()))?;
    Ok(format!("L, C, -C in parallel: dims {:?}, stop 5", res.dims()))
}

fn leaf_check(_: &Fixtures) -> Check {
    let mut degenerate = 0;
    for nl in netlist_corpus(CORPUS_SEED, CORPUS_SIZE, 8) {
        let cs = lib(build_spaces(&nl))?;
        let (_, _, empty) = cycle_ranks(&nl);
        let res = lib(constraint_chain(&cs))?;
        let rep = lib(uniqueness_report(&lib(circuit_system(&cs))?, &res))?;
        ensure(rep.leaf_symplectic() == (empty == 0), || {
            format!("leaf symplectic = {} with {empty} empty loops on {}", rep.leaf_symplectic(), nl.to_json())
        })?;
        degenerate += usize::from(!rep.leaf_symplectic());
        if empty == 0 {
            let base = res.final_set().ok_or("empty final set")?.base().to_vec();
            lib(reduced_system(&cs, &res, &base))?;
        }
    }
    Ok(format!("{CORPUS_SIZE} netlists, {degenerate} degenerate leaves, all exactly the empty-loop circuits"))
}

/// `W^D` from its definition on a basis of `E_D`.
fn brute_d_orthogonal(d: &LinearDiracStructure, w: &Subspace) -> Subspace {
    let e = d.e_d().basis();
    let rows: Vec<Vector> = w
        .basis()
        .iter()
        .map(|wi| e.iter().map(|ek| d.omega_d().eval(ek, wi).expect("in E_D")).collect())
        .collect();
    let carrier = Subspace::span(d.n(), e);
    let vs: Vec<Vector> = Subspace::solutions_of(e.len(), &rows)
        .basis()
        .iter()
        .map(|c| carrier.combine(c))
        .collect();
    Subspace::span(d.n(), &vs)
}

fn flat_check(_: &Fixtures) -> Check {
    let mut r = corpus::rng(8);
    let mut nontrivial = 0;
    for k in 0..500 {
        let (d, w) = corpus::dirac_pair(&mut r, 8);
        lib(check_dirac(d.n(), d.space()))?;
        let flat = lib(d.d_flat(&w))?;
        let orth = brute_d_orthogonal(&d, &w);
        ensure(lib(d.d_orthogonal(&w))? == orth, || format!("W^D differs on case {k}"))?;
        ensure(flat == orth.annihilator(), || format!("W♭ ≠ (W^D)° on case {k}"))?;
        nontrivial += usize::from(!flat.is_zero() && !flat.is_full());
    }
    Ok(format!("500 pairs with dim V ≤ 8 ({nontrivial} with 0 ≠ W♭ ≠ V*)"))
}

fn bracket_algebra_check(_: &Fixtures) -> Check {
    let mut r = corpus::rng(9);
    let mut points = 0;
    for k in 0..100 {
        let ctx = corpus::second_class_context(&mut r, 4);
        let n = ctx.space().dim();
        let br = |a: &Observable, b: &Observable| lib(dirac_bracket(&ctx, a, b));
        let f = corpus::quadratic_observable(&mut r, n);
        let g = corpus::quadratic_observable(&mut r, n);
        let h = corpus::quadratic_observable(&mut r, n);
        ensure(br(&f, &g)?.add(&br(&g, &f)?) == Observable::zero(n), || format!("antisymmetry, context {k}"))?;
        let a = corpus::affine_observable(&mut r, n);
        let b = corpus::affine_observable(&mut r, n);
        let lhs = br(&f, &lib(a.mul(&b))?)?;
        let rhs = lib(br(&f, &a)?.mul(&b))?.add(&lib(a.mul(&br(&f, &b)?))?);
        ensure(lhs == rhs, || format!("Leibniz, context {k}"))?;
        for chi in ctx.chi() {
            ensure(br(&f, chi)? == Observable::zero(n), || format!("{{F, χ}} ≠ 0, context {k}"))?;
        }
        let jac = br(&f, &br(&g, &h)?)?.add(&br(&g, &br(&h, &f)?)?).add(&br(&h, &br(&f, &g)?)?);
        let rows: Vec<Vector> = ctx.chi().iter().map(|x| x.linear_part().to_vec()).collect();
        for _ in 0..3 {
            let c: Vec<Rational> = ctx
                .chi()
                .iter()
                .map(|x| corpus::small_rational(&mut r) - x.constant_part())
                .collect();
            let leaf = AffineSubspace::from_equations(n, &rows, &c).ok_or("empty leaf")?;
            for _ in 0..20 {
                let x = leaf.at(&corpus::vector(&mut r, leaf.dim()));
                ensure(jac.eval(&x).is_zero(), || format!("Jacobi sum nonzero, context {k}"))?;
                points += 1;
            }
        }
    }
    Ok(format!("100 contexts, antisymmetry, Leibniz and {{F, χ}} = 0 as identities, Jacobi zero at {points} leaf points"))
}

fn leaf_independence_check(fx: &Fixtures) -> Check {
    let mut r = corpus::rng(10);
    for k in 0..100 {
        let ctx: DiracBracketContext = corpus::second_class_context(&mut r, 4);
        let c = corpus::vector(&mut r, ctx.chi().len());
        let shifted = lib(leaf_family(&ctx, &c))?;
        let same = shifted.tensor() == ctx.tensor()
            && shifted.c_matrix() == ctx.c_matrix()
            && shifted.c_inverse() == ctx.c_inverse();
        ensure(same, || format!("shifted context differs, case {k}"))?;
    }
    let mut nets = vec![lib(parse_netlist(&fx.figure1, Mode::Physical))?];
    nets.extend(netlist_corpus(23, 100, 6));
    for nl in &nets {
        let cs = lib(build_spaces(nl))?;
        let q0 = corpus::vector(&mut r, cs.n());
        let emb = lib(embed(&cs, Some(&q0), Preset::Generic))?;
        let cls = lib(classify(&emb.constraints))?;
        let lambda = corpus::vector(&mut r, cls.multiplier_dim());
        let field = lib(foliated_field(&cls, &emb.energy, &lambda))?;
        ensure(lib(tangent_to_leaves(&emb.constraints, &field))?, || {
            format!("field leaves a leaf of {}", nl.to_json())
        })?;
    }
    Ok(format!("100 shifts C give identical contexts; foliated field tangent to the leaves of {} circuits", nets.len()))
}

/// Presymplectic algorithm with the orthogonal written out as a solution space.
fn brute_gotay_nester(omega: &Matrix, energy: &QuadraticEnergy) -> Vec<AffineSubspace> {
    let n = omega.rows();
    let mut chain = vec![AffineSubspace::full(n)];
    loop {
        let m = chain.last().expect("nonempty").clone();
        let rows: Vec<Vector> = m.direction().basis().iter().map(|w| omega.mul_vec(w)).collect();
        let orth = Subspace::solutions_of(n, &rows);
        let eq: Vec<Vector> = orth.basis().iter().map(|u| energy.hessian().mul_vec(u)).collect();
        let rhs: Vec<Rational> = orth.basis().iter().map(|u| -dot(energy.linear(), u)).collect();
        match m.intersect_equations(&eq, &rhs) {
            Some(next) if next != m => chain.push(next),
            _ => return chain,
        }
    }
}

fn cad_check(fx: &Fixtures) -> Check {
    let mut r = corpus::rng(11);
    let mut longest = 0;
    for k in 0..500 {
        let (omega, energy) = corpus::presymplectic_system(&mut r, 8);
        let form = lib(PresymplecticForm::on_full_space(omega.clone()))?;
        let gn = lib(gotay_nester(&form, &energy, None))?;
        let sys = lib(ConstantDiracSystem::new(lib(LinearDiracStructure::graph_of(&omega))?, energy.clone()))?;
        ensure(lib(cad_run(&sys, None))? == gn, || format!("graph system {k}: chains differ"))?;
        ensure(brute_gotay_nester(&omega, &energy) == gn.chain, || format!("graph system {k}: direct chain differs"))?;
        longest = longest.max(gn.chain.len() - 1);
    }
    let mut nets = vec![
        lib(parse_netlist(&fx.figure1, Mode::Physical))?,
        lib(parse_netlist(&fx.figure1_unit, Mode::Physical))?,
    ];
    nets.extend(netlist_corpus(CORPUS_SEED, CORPUS_SIZE, 8));
    for nl in &nets {
        let cs = lib(build_spaces(nl))?;
        let res = lib(cad_run(&lib(circuit_system(&cs))?, None))?;
        ensure(res.chain == closed_form_chain(&cs), || format!("closed form differs on {}", nl.to_json()))?;
    }
    Ok(format!(
        "500 graph systems (chains up to M{longest}), {} circuits with closed form = generic chain",
        nets.len()
    ))
}

fn rk4_order_check(fx: &Fixtures) -> Check {
    let f = four_branch(&fx.figure1)?;
    let run = lib(simulate_circuit(&f.cs, None, Target::Reduced, None))?;
    let t_end: f64 = 10.0;
    let mut errs = Vec::new();
    for dt in [0.1, 0.05, 0.025] {
        let steps = (t_end / dt).round() as usize;
        let rk = lib(integrate_rk4(&run.field, &run.initial, dt, steps, run.labels.clone(), &[]))?;
        errs.push((rk.last() - exact_flow(&run.field, &run.initial, t_end)).amax());
    }
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    ensure(ratios.iter().all(|r| (12.0..=20.0).contains(r)), || format!("ratios {ratios:?}"))?;
    Ok(format!("error ratios {:.2}, {:.2} per halving of dt = 0.1", ratios[0], ratios[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filters_select_by_tag_name_and_id() {
        let pick = |f: &str| criteria().iter().filter(|c| c.matches(f)).map(|c| c.id).collect::<Vec<_>>();
        assert_eq!(pick("circuit"), [1, 2, 3, 4, 5, 6, 7, 11]);
        assert_eq!(pick("12"), [12]);
        assert_eq!(pick("figure1-sigma"), [2]);
        assert!(pick("nothing").is_empty());
    }

    #[test]
    fn corrupted_fixture_fails_by_name() {
        let fx = Fixtures {
            figure1: FIGURE1_JSON.replace("\"C1\"", "\"Cx\""),
            ..Fixtures::default()
        };
        let out = run(&fx, Some("figure1-chain"));
        assert_eq!(out.len(), 1);
        assert!(!out[0].passed);
        assert!(out[0].line().starts_with("FAIL  1 figure1-chain"), "{}", out[0].line());
    }
}
