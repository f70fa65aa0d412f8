use dirac_cad::constraints::*;
use dirac_cad::corpus;
use dirac_cad::linalg::rational::{dot, int, one, zero, zeros, Vector};
use dirac_cad::linalg::{AffineSubspace, Matrix, Solver};
use dirac_cad::symplectic::SymplecticSpace;
use rand::Rng;

/// `½ (p₁² + q₁²) + q₂ p₃` on `(q₁, q₂, q₃, p₁, p₂, p₃)`.
fn planted_energy() -> Observable {
    let mut q = Matrix::zeros(6, 6);
    q[(0, 0)] = one();
    q[(3, 3)] = one();
    q[(1, 5)] = one();
    q[(5, 1)] = one();
    Observable::new(q, zeros(6), zero()).unwrap()
}

#[test]
fn planted_first_class_pair() {
    let space = SymplecticSpace::canonical(3);
    let e = planted_energy();
    let p2 = Observable::coordinate(6, 4);
    // {p₂, E} = -∂E/∂q₂ = -p₃, so the secondary constraint is p₃
    assert_eq!(poisson_bracket(&space, &p2, &e), Observable::coordinate(6, 5).scale(&int(-1)));
    let p3 = Observable::coordinate(6, 5);
    assert_eq!(poisson_bracket(&space, &p3, &e), Observable::zero(6));
    let cs = ConstraintSet::new(space, vec![p2, p3], vec![Role::Primary, Role::Secondary]).unwrap();
    let cls = classify(&cs).unwrap();
    assert_eq!((cls.s, cls.s_prime), (0, 0));
    assert!(cls.chi_indices().is_empty());
    assert_eq!(cls.multiplier_dim(), 1);
    assert_eq!(cls.psi_dprime.len(), 1);
    assert!(matches!(cls.context(), Err(dirac_cad::Error::Invalid(_))));
}

#[test]
fn planted_second_class_pair() {
    // E = ½ (p₁² + q₁² + q₂²), φ = p₂ gives the secondary constraint q₂
    let space = SymplecticSpace::canonical(2);
    let q = Matrix::diagonal(&[one(), one(), one(), zero()]);
    let e = Observable::new(q, zeros(4), zero()).unwrap();
    let p2 = Observable::coordinate(4, 3);
    let q2 = poisson_bracket(&space, &p2, &e).scale(&int(-1));
    assert_eq!(q2, Observable::coordinate(4, 1));
    let cs = ConstraintSet::new(space.clone(), vec![p2, q2], vec![Role::Primary, Role::Secondary]).unwrap();
    let cls = classify(&cs).unwrap();
    assert_eq!((cls.s, cls.s_prime), (1, 1));
    assert_eq!(cls.chi_prime, [0]);
    assert_eq!(cls.chi_dprime, [1]);
    assert_eq!(cls.multiplier_dim(), 0);
    let ctx = cls.context().unwrap();
    // the Dirac bracket forgets the (q₂, p₂) pair entirely
    let mut expected = Matrix::zeros(4, 4);
    expected[(0, 2)] = one();
    expected[(2, 0)] = int(-1);
    assert_eq!(ctx.tensor(), &expected);
    let field = foliated_field(&cls, &e, &[]).unwrap();
    assert!(tangent_to_leaves(&cs, &field).unwrap());
    assert_eq!(field.apply(&[int(2), zero(), int(3), zero()]), vec![int(3), zero(), int(-2), zero()]);
}

#[test]
fn f_chi_agrees_on_the_surface_and_commutes_with_chi() {
    let mut r = corpus::rng(41);
    for _ in 0..50 {
        let ctx = corpus::second_class_context(&mut r, 3);
        let n = ctx.space().dim();
        let f = corpus::affine_observable(&mut r, n);
        let fx = f_chi(&ctx, &f).unwrap();
        let rows: Vec<Vector> = ctx.chi().iter().map(|x| x.linear_part().to_vec()).collect();
        let rhs: Vec<_> = ctx.chi().iter().map(|x| -x.constant_part()).collect();
        let surf = AffineSubspace::from_equations(n, &rows, &rhs).unwrap();
        for _ in 0..5 {
            let x = surf.at(&corpus::vector(&mut r, surf.dim()));
            assert_eq!(fx.eval(&x), f.eval(&x));
        }
        for chi in ctx.chi() {
            // {F_χ, χ_k} vanishes on the surface
            let b = poisson_bracket(ctx.space(), &fx, chi);
            assert_eq!(b.eval(surf.base()), zero());
        }
    }
}

#[test]
fn singular_bracket_matrix_names_first_class_directions() {
    let space = SymplecticSpace::canonical(2);
    let chi = vec![Observable::coordinate(4, 0), Observable::coordinate(4, 1)];
    match DiracBracketContext::new(space, chi) {
        Err(dirac_cad::Error::Singular(msg)) => assert!(msg.contains("chi[0]") && msg.contains("chi[1]"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

/// `(i_X Ω)|_V = β|_V` solved by brute force on the coordinates of `X` in a basis of `V`.
#[test]
fn presymplectic_solve_matches_direct_system() {
    let mut r = corpus::rng(9);
    let mut solvable = 0;
    for _ in 0..200 {
        let m = r.gen_range(1..=3);
        let space = corpus::symplectic_space(&mut r, m);
        let n = 2 * m;
        let k = r.gen_range(0..=n);
        let v = corpus::subspace(&mut r, n, k);
        let beta = corpus::vector(&mut r, n);
        let basis = v.basis();
        let a = Matrix::from_rows(
            basis.len(),
            &basis
                .iter()
                .map(|w| basis.iter().map(|u| space.pairing(u, w)).collect())
                .collect::<Vec<Vector>>(),
        );
        let b: Vector = basis.iter().map(|w| dot(&beta, w)).collect();
        let direct = Solver::new(&a).solve(&b);
        let got = space.solve_presymplectic(&v, &beta);
        assert_eq!(direct.is_some(), got.is_some());
        let Some(sol) = got else { continue };
        solvable += 1;
        assert!(sol.direction().is_subspace_of(&v));
        assert!(v.contains(sol.base()));
        for w in basis {
            assert_eq!(space.pairing(sol.base(), w), dot(&beta, w));
        }
        let kernel = v.intersect(&space.omega_orthogonal(&v));
        assert_eq!(sol.direction(), &kernel);
    }
    assert!(solvable > 50);
}
