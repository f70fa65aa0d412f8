use dirac_cad::cad::uniqueness_report;
use dirac_cad::circuits::*;
use dirac_cad::corpus::netlist_corpus;
use dirac_cad::linalg::rational::zeros;

/// Cycle rank `edges - nodes + components` of the subgraph on the selected branches.
fn cycle_rank(nl: &Netlist, keep: impl Fn(&Branch) -> bool) -> usize {
    let mut parent: Vec<usize> = (0..nl.nodes.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut rank = 0;
    for b in nl.branches.iter().filter(|b| keep(b)) {
        let (a, c) = (find(&mut parent, b.from), find(&mut parent, b.to));
        if a == c {
            rank += 1;
        } else {
            parent[a] = c;
        }
    }
    rank
}

fn oracle(nl: &Netlist) -> (usize, bool, bool) {
    let all = cycle_rank(nl, |_| true);
    let non_inductive = cycle_rank(nl, |b| !b.is_inductive());
    let empty = cycle_rank(nl, Branch::is_empty);
    (all, non_inductive > empty, empty > 0)
}

#[test]
fn loop_spaces_match_graph_oracle() {
    for nl in netlist_corpus(11, 300, 8) {
        let cs = build_spaces(&nl).unwrap();
        let (loops, pc, empty) = oracle(&nl);
        assert_eq!(cs.delta.dim(), loops);
        assert_eq!(cs.loops.len(), loops);
        assert_eq!(cs.classes.has_purely_capacitive(), pc);
        assert_eq!(cs.classes.has_empty(), empty);
        assert!(loop_report(&cs).kvl_non_inductive);
    }
}

#[test]
fn stop_index_and_leaf_degeneracy() {
    let mut with_empty = 0;
    let mut with_pc = 0;
    for nl in netlist_corpus(5, 500, 8) {
        let cs = build_spaces(&nl).unwrap();
        let (_, pc, empty) = oracle(&nl);
        with_empty += usize::from(empty);
        with_pc += usize::from(pc);
        let res = constraint_chain(&cs).unwrap();
        assert_eq!(res.stop_index, if pc { 3 } else { 1 }, "{}", nl.to_json());
        let rep = loop_report(&cs);
        assert!(rep.delta2_equals_delta1 && rep.condition_star);
        let u = uniqueness_report(&circuit_system(&cs).unwrap(), &res).unwrap();
        assert!(u.consistent());
        assert_eq!(u.leaf_symplectic(), !empty, "{}", nl.to_json());
        assert_eq!(res.fiber_dim > 0, empty);
    }
    assert!(with_empty > 50 && with_pc > 50, "{with_empty} {with_pc}");
}

#[test]
fn empty_loop_makes_sigma_singular_and_blocks_reduction() {
    let text = r#"{"nodes": ["a", "b"], "branches": [
        {"name": "w1", "from": "a", "to": "b"},
        {"name": "w2", "from": "b", "to": "a"}]}"#;
    let cs = build_spaces(&parse_netlist(text, Mode::Physical).unwrap()).unwrap();
    assert!(cs.classes.has_empty());
    let emb = embed(&cs, None, Preset::Generic).unwrap();
    assert!(emb.sigma.rank() < emb.sigma.rows());
    let res = constraint_chain(&cs).unwrap();
    assert_eq!(res.stop_index, 1);
    assert!(res.fiber_dim > 0);
    let err = reduced_system(&cs, &res, &zeros(6)).unwrap_err();
    assert!(matches!(err, dirac_cad::Error::Degenerate(_)));
}

#[test]
fn two_inductor_loop_stops_at_one() {
    let text = r#"{"nodes": ["a", "b"], "branches": [
        {"name": "L1", "from": "a", "to": "b", "L": "1"},
        {"name": "L2", "from": "b", "to": "a", "L": "2"}]}"#;
    let cs = build_spaces(&parse_netlist(text, Mode::Physical).unwrap()).unwrap();
    assert_eq!(constraint_chain(&cs).unwrap().stop_index, 1);
}

#[test]
fn negative_capacitance_stops_at_five() {
    let text = r#"{"nodes": ["a", "b"], "branches": [
        {"name": "L", "from": "a", "to": "b", "L": "1"},
        {"name": "C", "from": "a", "to": "b", "C": "1"},
        {"name": "Cn", "from": "a", "to": "b", "C": "-1"}]}"#;
    assert!(parse_netlist(text, Mode::Physical).is_err());
    let cs = build_spaces(&parse_netlist(text, Mode::General).unwrap()).unwrap();
    let res = constraint_chain(&cs).unwrap();
    assert_eq!(res.dims(), vec![9, 5, 4, 3, 2, 1]);
    assert_eq!(res.stop_index, 5);
}
