use dirac_cad::cad::{cad_run, uniqueness_report};
use dirac_cad::circuits::*;
use dirac_cad::constraints::classify;
use dirac_cad::linalg::rational::{int, one, ratio, unit, zero, zeros, Rational};
use dirac_cad::linalg::Matrix;

fn figure1() -> CircuitSpaces {
    build_spaces(&parse_netlist(FIGURE1_JSON, Mode::Physical).unwrap()).unwrap()
}

struct Values {
    l: Rational,
    c1: Rational,
    c2: Rational,
    c3: Rational,
}

fn values() -> Values {
    Values {
        l: ratio(3, 2),
        c1: int(2),
        c2: int(5),
        c3: ratio(1, 3),
    }
}

#[test]
fn fixture_rows_and_loops() {
    let nl = parse_netlist(FIGURE1_JSON, Mode::Physical).unwrap();
    assert_eq!(nl.branch_names(), ["L", "C1", "C2", "C3"]);
    let cs = build_spaces(&nl).unwrap();
    let rows: Vec<Vec<Rational>> = cs.kcl.row_vectors();
    assert_eq!(rows, vec![vec![int(-1), zero(), one(), zero()], vec![zero(), int(-1), one(), int(-1)]]);
    assert_eq!(cs.delta.dim(), 2);
    // the node rows of the drawn graph span the same constraints
    let inc = incidence_rows(&nl);
    assert_eq!(
        dirac_cad::linalg::Subspace::kernel_of(&inc),
        cs.delta
    );
    let rep = loop_report(&cs);
    assert_eq!(rep.purely_capacitive_count, 1);
    assert!(!rep.has_empty_loop);
    assert!(rep.condition_star && rep.delta2_equals_delta1 && rep.kvl_non_inductive);
    assert_eq!(rep.delta_dims, vec![2, 1, 1]);
}

#[test]
fn chain_dimensions_and_equations() {
    let cs = figure1();
    let v = values();
    let res = constraint_chain(&cs).unwrap();
    assert_eq!(res.dims(), vec![12, 6, 5, 4]);
    assert_eq!(res.stop_index, 3);
    assert_eq!(res.fiber_dim, 0);
    let n = 4;
    let mut q_row = zeros(3 * n);
    q_row[1] = one() / &v.c1;
    q_row[3] = -(one() / &v.c3);
    let mut v_row = zeros(3 * n);
    v_row[n + 1] = one() / &v.c1;
    v_row[n + 3] = -(one() / &v.c3);
    let m2 = res.chain[1].intersect_equations(&[q_row], &[zero()]).unwrap();
    assert_eq!(m2, res.chain[2]);
    let m3 = res.chain[2].intersect_equations(&[v_row], &[zero()]).unwrap();
    assert_eq!(m3, res.chain[3]);
    let rep = uniqueness_report(&circuit_system(&cs).unwrap(), &res).unwrap();
    assert!(rep.unique() && rep.leaf_symplectic() && rep.consistent());
}

/// Reference bracket matrix of `ε₁ … ε₁₄`, with `1/C₁`, `1/C₃` and `L` substituted.
fn reference_sigma(v: &Values) -> Matrix {
    let (l, a, b) = (v.l.clone(), one() / &v.c1, one() / &v.c3);
    let mut s = Matrix::zeros(14, 14);
    let mut set = |i: usize, j: usize, x: Rational| s[(i - 1, j - 1)] = x;
    set(1, 9, int(-1));
    set(1, 11, -l.clone());
    set(2, 7, -a.clone());
    set(2, 10, int(-1));
    set(3, 9, one());
    set(3, 10, one());
    set(4, 7, b.clone());
    set(4, 10, int(-1));
    set(5, 11, one());
    set(5, 13, int(-1));
    set(6, 12, one());
    set(6, 13, int(-1));
    set(6, 14, one());
    set(7, 2, a.clone());
    set(7, 4, -b.clone());
    set(8, 11, a.clone());
    set(8, 13, -b.clone());
    set(9, 1, one());
    set(9, 3, int(-1));
    set(10, 2, one());
    set(10, 3, int(-1));
    set(10, 4, one());
    set(11, 1, l);
    set(11, 5, int(-1));
    set(12, 6, int(-1));
    set(12, 8, -a);
    set(13, 5, one());
    set(13, 6, one());
    set(14, 6, int(-1));
    set(14, 8, b);
    s
}

/// Reference row 8 sits one column to the left of the transpose of reference column 8.
fn restore_row_8(reference: &Matrix) -> Matrix {
    let mut s = reference.clone();
    for j in 0..14 {
        s[(7, j)] = -reference[(j, 7)].clone();
    }
    s
}

#[test]
fn sigma_matches_reference_matrix() {
    let cs = figure1();
    let emb = embed(&cs, None, Preset::PaperFig1).unwrap();
    let reference = reference_sigma(&values());
    assert!(!reference.is_skew());
    let restored = restore_row_8(&reference);
    assert!(restored.is_skew());
    assert_eq!(emb.sigma, restored);
    let mut differing = Vec::new();
    for i in 0..14 {
        for j in 0..14 {
            if emb.sigma[(i, j)] != reference[(i, j)] {
                differing.push((i + 1, j + 1));
            }
        }
    }
    assert_eq!(differing, [(8, 11), (8, 12), (8, 13), (8, 14)]);
    assert!(emb.sigma.inverse().is_some());
    assert_eq!(emb.labels[0], "flux[L]");
    assert_eq!(emb.labels[13], "nu[C3]");
}

#[test]
fn generic_order_is_a_permutation_of_the_preset() {
    let cs = figure1();
    let g = embed(&cs, None, Preset::Generic).unwrap();
    let p = embed(&cs, None, Preset::PaperFig1).unwrap();
    assert_eq!(g.sigma.rank(), 14);
    let strip = |s: &str| s.trim_start_matches('-').to_string();
    let mut a: Vec<String> = g.labels.iter().map(|s| strip(s)).collect();
    let mut b: Vec<String> = p.labels.iter().map(|s| strip(s)).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn dirac_bracket_a_block() {
    let cs = figure1();
    let v = values();
    let emb = embed(&cs, None, Preset::PaperFig1).unwrap();
    let cls = classify(&emb.constraints).unwrap();
    assert!(cls.psi_prime.is_empty() && cls.psi_dprime.is_empty());
    let ctx = cls.context().unwrap();
    let t = ctx.coordinate_brackets();
    let s = &v.c1 + &v.c3;
    let r1 = &v.c1 / &s;
    let r3 = &v.c3 / &s;
    let il = one() / &v.l;
    let row_l = vec![il.clone(), &r1 * &il, il.clone(), &r3 * &il, one()];
    let row_1 = vec![&r1 * &il, &r1 * &r1 * &il, &r1 * &il, &r1 * &r3 * &il, r1.clone()];
    let row_3 = vec![&r3 * &il, &r1 * &r3 * &il, &r3 * &il, &r3 * &r3 * &il, r3.clone()];
    let a = [row_l.clone(), row_1, row_l, row_3];
    let mut expected = Matrix::zeros(16, 16);
    for i in 0..4 {
        for j in 0..5 {
            expected[(i, 4 + j)] = a[i][j].clone();
            expected[(4 + j, i)] = -a[i][j].clone();
        }
    }
    assert_eq!(t, &expected);
    assert_eq!(t[(1, 5)], &v.c1 * &v.c1 / (&s * &s * &v.l));
}

#[test]
fn reduced_oscillator() {
    let cs = figure1();
    let v = values();
    let res = constraint_chain(&cs).unwrap();
    let red = reduced_system(&cs, &res, &zeros(12)).unwrap();
    assert_eq!(red.labels, ["q_L", "p_L"]);
    let k = one() / (&v.c1 + &v.c3) + one() / &v.c2;
    let mut field = Matrix::zeros(2, 2);
    field[(0, 1)] = one() / &v.l;
    field[(1, 0)] = -k.clone();
    assert_eq!(red.field.matrix, field);
    assert_eq!(red.field.offset, zeros(2));
    let mut h = Matrix::zeros(2, 2);
    h[(0, 0)] = k;
    h[(1, 1)] = one() / &v.l;
    assert_eq!(red.hamiltonian.quadratic_part(), &h);
    // leaf parametrisation: q_C1 = C1/(C1+C3) q_L, v_L = p_L / L
    let x = red.state(&[one(), zero()]);
    assert_eq!(x[1], &v.c1 / (&v.c1 + &v.c3));
    let x = red.state(&[zero(), one()]);
    assert_eq!(x[4], one() / &v.l);
    assert!(reduced_matches_flow(&cs, &res, &red).unwrap());
}

#[test]
fn reduced_system_on_a_shifted_leaf() {
    let cs = figure1();
    let res = constraint_chain(&cs).unwrap();
    let m = res.final_set().unwrap();
    let base = m.at(&[int(1), int(-2), ratio(1, 2), int(3)]);
    let red = reduced_system(&cs, &res, &base).unwrap();
    assert!(reduced_matches_flow(&cs, &res, &red).unwrap());
    assert!(!m.contains(&unit(12, 11)));
    assert!(reduced_system(&cs, &res, &unit(12, 11)).is_err());
}

#[test]
fn full_chain_matches_generic_algorithm() {
    let cs = figure1();
    let res = cad_run(&circuit_system(&cs).unwrap(), None).unwrap();
    assert_eq!(res.chain, closed_form_chain(&cs));
}
