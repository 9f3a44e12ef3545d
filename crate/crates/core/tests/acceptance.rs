use cyclogaudin::bethe::{
    expected_class, verify_eigenvector, verify_singular, weight_function, BetheProblem,
    SolverOptions,
};
use cyclogaudin::hamiltonians::{
    check_commutativity, check_invariance, ChiForm, HamiltonianKind, HamiltonianSet,
};
use cyclogaudin::lie::{
    critical_level, element_f, lambda0_roots, lambda0_trace, scalar_k, Automorphism, Series,
    SimpleLieAlgebra, Weight,
};
use cyclogaudin::linalg::C64;
use cyclogaudin::rep::{TensorModule, WeightBlock};
use cyclogaudin::takiff::residue::RationalFunction;
use cyclogaudin::takiff::{CurrentAlgebra, Orders, UElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn sl(rank: usize) -> SimpleLieAlgebra {
    SimpleLieAlgebra::new(Series::A, rank).unwrap()
}

fn sl2_inner(g: &SimpleLieAlgebra) -> Automorphism {
    Automorphism::new(g, &[0], &[c(-1.0)], 2, None).unwrap()
}

fn sl3_flip(g: &SimpleLieAlgebra) -> Automorphism {
    Automorphism::new(g, &[1, 0], &[c(1.0), c(1.0)], 2, None).unwrap()
}

fn fund(g: &SimpleLieAlgebra, coords: &[f64]) -> Weight {
    let v: Vec<C64> = coords.iter().map(|&x| c(x)).collect();
    g.from_fundamental(&v).unwrap()
}

#[test]
fn lie_core_axioms() {
    for (g, s) in [
        (sl(1), Automorphism::identity(&sl(1))),
        (sl(1), sl2_inner(&sl(1))),
        (sl(2), Automorphism::identity(&sl(2))),
        (sl(2), sl3_flip(&sl(2))),
    ] {
        assert!(g.jacobi_residual() <= 1e-10);
        assert!(g.invariance_residual() <= 1e-10);
        assert!(s.homomorphism_residual(&g) <= 1e-10);
        assert!(s.order_residual() <= 1e-10);
        assert!(s.form_residual(&g) <= 1e-10);
        assert!(s.projector_residual() <= 1e-12);
    }
}

#[test]
fn lambda0_two_ways() {
    let g = sl(1);
    let s = sl2_inner(&g);
    let a = lambda0_trace(&g, &s);
    let b = lambda0_roots(&g, &s);
    assert!(a.distance(&b) <= 1e-12);
    assert!(b.distance(&Weight::real(&[-0.5])) <= 1e-12);

    let g = sl(2);
    let s = sl3_flip(&g);
    let a = lambda0_trace(&g, &s);
    let b = lambda0_roots(&g, &s);
    assert!(a.distance(&b) <= 1e-12);
    assert!(b.distance(&Weight::real(&[-0.5, -0.5])) <= 1e-12);

    let k = scalar_k(&sl2_inner(&sl(1)), critical_level(&sl(1)));
    assert!((k - c(-0.25)).norm() <= 1e-12);
    let f = element_f(&g, &s);
    assert!(s.fixed_residual(&f) <= 1e-12);
}

#[test]
fn surat_identity() {
    let g = sl(1);
    let a = CurrentAlgebra::new(
        g.clone(),
        Automorphism::identity(&g),
        vec![c(1.0), C64::new(-0.5, 1.2)],
        Orders {
            n_inf: 2,
            n_sites: vec![1, 1],
            n0: 1,
        },
    )
    .unwrap();
    let g = sl(2);
    let b = CurrentAlgebra::new(
        g.clone(),
        sl3_flip(&g),
        vec![C64::new(0.8, 0.6)],
        Orders {
            n_inf: 3,
            n_sites: vec![2],
            n0: 2,
        },
    )
    .unwrap();
    // (b) has nonzero higher-order Hamiltonians at every kind of point
    assert!(b.h_site(0, 1).max_coefficient() > 0.0);
    assert!(b.h_origin(1).max_coefficient() > 0.0);
    assert!(b.h_infinity(0).max_coefficient() > 0.0 || b.h_infinity(1).max_coefficient() > 0.0);
    for (alg, seed) in [(a, 1), (b, 2)] {
        for u in alg.sample_regular_points(8, seed) {
            let r = alg.surat_residual(u).unwrap();
            assert!(r <= 1e-8, "residual {r:.3e} at u = {u}");
        }
    }
}

#[test]
fn structural_zeros() {
    let g = sl(2);
    let s = sl3_flip(&g);
    let set = HamiltonianSet::build(&g, &s, vec![c(1.0)], ChiForm::zero(&g)).unwrap();
    assert_eq!(
        set.get(HamiltonianKind::Origin { power: 0 })
            .unwrap()
            .element,
        UElement::zero()
    );
    let alg = CurrentAlgebra::new(g.clone(), s, vec![c(1.0)], Orders::regular(2, 1)).unwrap();
    assert_eq!(alg.h_origin(0), UElement::zero());

    let g = sl(1);
    let s4 = Automorphism::new(&g, &[0], &[C64::new(0.0, 1.0)], 4, None).unwrap();
    let alg =
        CurrentAlgebra::new(g.clone(), s4.clone(), vec![c(1.0)], Orders::regular(2, 1)).unwrap();
    assert_eq!(alg.h_infinity(0), UElement::zero());
    let set = HamiltonianSet::build(&g, &s4, vec![c(1.0)], ChiForm::zero(&g)).unwrap();
    assert_eq!(
        set.get(HamiltonianKind::Infinity { power: 0 })
            .unwrap()
            .element,
        UElement::zero()
    );
}

fn blocks_up_to(module: &TensorModule, height: i64) -> Vec<WeightBlock> {
    module
        .classes_up_to(height)
        .iter()
        .map(|cl| module.block(cl, 200_000).unwrap())
        .collect()
}

fn assert_commuting(
    g: &SimpleLieAlgebra,
    s: &Automorphism,
    points: Vec<C64>,
    lambdas: &[Weight],
    l0: &Weight,
    chi: ChiForm,
) {
    let module = TensorModule::new(g, s, lambdas, l0).unwrap();
    let set = HamiltonianSet::build(g, s, points, chi).unwrap();
    let blocks = blocks_up_to(&module, 6);
    let res = check_commutativity(&set, &module, &blocks).unwrap();
    let worst = res.iter().fold(0.0, |m: f64, r| m.max(r.residual));
    assert!(worst <= 1e-9, "commutator residual {worst:.3e}");
    let inv = check_invariance(&set, &module, &blocks[..blocks.len().min(12)]).unwrap();
    let worst = inv.iter().fold(0.0, |m: f64, r| m.max(r.residual));
    assert!(worst <= 1e-9, "invariance residual {worst:.3e}");
}

#[test]
fn commutativity_sl2_trivial() {
    let g = sl(1);
    let s = Automorphism::identity(&g);
    let l = [fund(&g, &[1.0]), fund(&g, &[2.0])];
    assert_commuting(
        &g,
        &s,
        vec![c(1.0), C64::new(-0.7, 0.4)],
        &l,
        &fund(&g, &[0.5]),
        ChiForm::zero(&g),
    );
}

#[test]
fn commutativity_sl2_inner() {
    let g = sl(1);
    let s = sl2_inner(&g);
    // χ must vanish here, since σ is trivial on h and ω = −1
    assert!(ChiForm::new(&g, &s, Weight::real(&[0.3]), 1e-12).is_err());
    let l = [fund(&g, &[1.0]), fund(&g, &[3.0])];
    assert_commuting(
        &g,
        &s,
        vec![c(1.0), C64::new(0.4, 1.3)],
        &l,
        &fund(&g, &[0.7]),
        ChiForm::zero(&g),
    );
}

#[test]
fn commutativity_sl3_flip_twisted() {
    let g = sl(2);
    let s = sl3_flip(&g);
    let chi = ChiForm::new(&g, &s, fund(&g, &[0.6, -0.6]), 1e-12).unwrap();
    let l = [fund(&g, &[1.0, 0.0]), fund(&g, &[0.0, 2.0])];
    assert_commuting(
        &g,
        &s,
        vec![c(1.0), C64::new(0.3, 1.1)],
        &l,
        &fund(&g, &[0.5, 0.5]),
        chi,
    );
}

struct Case {
    problem: BetheProblem,
    module: TensorModule,
    set: HamiltonianSet,
}

fn case(
    g: &SimpleLieAlgebra,
    s: &Automorphism,
    points: Vec<C64>,
    lambdas: Vec<Weight>,
    l0: Weight,
    chi: Weight,
    colors: Vec<usize>,
) -> Case {
    let problem = BetheProblem::new(
        g,
        s,
        points.clone(),
        lambdas.clone(),
        l0.clone(),
        chi.clone(),
        colors,
    )
    .unwrap();
    let module = TensorModule::new(g, s, &lambdas, &l0).unwrap();
    let set = HamiltonianSet::build(g, s, points, ChiForm::new(g, s, chi, 1e-12).unwrap()).unwrap();
    Case {
        problem,
        module,
        set,
    }
}

/// Solves, builds ψ for every solution and checks the eigen- and singular-vector
/// properties. Returns the number of solutions.
fn check_bethe(cs: &Case, seed: u64) -> usize {
    let opts = SolverOptions {
        seed,
        ..Default::default()
    };
    let sols = cs.problem.solve(&opts);
    assert!(!sols.is_empty(), "no Bethe solution found");
    let class = expected_class(&cs.problem, &cs.module);
    for sol in &sols {
        let psi = weight_function(&cs.problem, &cs.module, &sol.roots).unwrap();
        for k in psi.keys() {
            assert_eq!(cs.module.key_class(k), class);
        }
        let lambda_inf = cs.problem.lambda_infinity();
        assert_eq!(cs.module.class_for_weight(&lambda_inf).unwrap(), class);
        let rep = verify_eigenvector(&cs.problem, &cs.module, &cs.set, &psi, &sol.roots).unwrap();
        assert!(!rep.inconclusive);
        for ch in &rep.checks {
            if ch.predicted {
                assert!(
                    ch.residual <= 1e-8,
                    "{} residual {:.3e} at {:?}",
                    ch.hamiltonian,
                    ch.residual,
                    sol.roots
                );
            }
            assert!(
                ch.sine <= 1e-8,
                "{} not parallel: {:.3e}",
                ch.hamiltonian,
                ch.sine
            );
        }
        if cs.problem.chi.max_abs() == 0.0 {
            let r = verify_singular(&cs.problem, &cs.module, &psi).unwrap();
            assert!(r <= 1e-9, "singular residual {r:.3e}");
        }
    }
    sols.len()
}

#[test]
fn bethe_sl2_closed_form() {
    let g = sl(1);
    let s = Automorphism::identity(&g);
    let cs = case(
        &g,
        &s,
        vec![c(1.0)],
        vec![fund(&g, &[2.0])],
        fund(&g, &[2.0]),
        Weight::zero(1),
        vec![0],
    );
    let sols = cs.problem.solve(&SolverOptions::default());
    assert_eq!(sols.len(), 1);
    assert!((sols[0].roots[0] - c(0.5)).norm() <= 1e-10);
    assert!((cs.problem.eigenvalue(&sols[0].roots, 0) - c(-2.0)).norm() <= 1e-10);
    check_bethe(&cs, 0);
}

#[test]
fn bethe_sl3_flip() {
    let g = sl(2);
    let s = sl3_flip(&g);
    let points = vec![c(1.0), C64::new(0.3, 1.1)];
    let lambdas = vec![fund(&g, &[1.0, 0.0]), fund(&g, &[0.0, 2.0])];
    let l0 = fund(&g, &[0.5, 0.5]);
    for chi in [Weight::zero(2), fund(&g, &[0.6, -0.6])] {
        for colors in [vec![0], vec![0, 0], vec![0, 1]] {
            let cs = case(
                &g,
                &s,
                points.clone(),
                lambdas.clone(),
                l0.clone(),
                chi.clone(),
                colors,
            );
            check_bethe(&cs, 7);
        }
    }
}

#[test]
fn jacobian_and_determinism() {
    let g = sl(2);
    let s = sl3_flip(&g);
    let p = BetheProblem::new(
        &g,
        &s,
        vec![c(1.0), C64::new(0.3, 1.1)],
        vec![fund(&g, &[1.0, 0.0]), fund(&g, &[0.0, 2.0])],
        fund(&g, &[0.5, 0.5]),
        fund(&g, &[0.6, -0.6]),
        vec![0, 1],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let w: Vec<C64> = (0..2)
            .map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let jac = p.jacobian(&w).unwrap();
        let h = 1e-6;
        for k in 0..2 {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[k] += h;
            wm[k] -= h;
            let fd = (p.residual(&wp).unwrap() - p.residual(&wm).unwrap()) / c(2.0 * h);
            let scale = jac.column(k).iter().fold(1.0, |m: f64, x| m.max(x.norm()));
            for j in 0..2 {
                assert!((fd[j] - jac[(j, k)]).norm() <= 1e-6 * scale);
            }
        }
    }
    let opts = SolverOptions {
        seed: 42,
        ..Default::default()
    };
    let a = serde_json::to_string(&p.solve(&opts)).unwrap();
    let b = serde_json::to_string(&p.solve(&opts)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn residues_sum_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let mut poles: Vec<(C64, Vec<C64>)> = Vec::new();
        while poles.len() < 5 {
            let x = C64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            if poles.iter().all(|(y, _)| (x - y).norm() > 0.5) {
                let order = rng.gen_range(1..=3);
                poles.push((
                    x,
                    (0..order)
                        .map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                        .collect(),
                ));
            }
        }
        let f = RationalFunction {
            poles,
            polynomial: vec![c(1.0)],
        };
        assert!(f.residue_sum() <= 1e-12 * f.scale());
    }
}

#[test]
fn perturbed_roots_fail_the_eigencheck() {
    let g = sl(1);
    let s = Automorphism::identity(&g);
    let cs = case(
        &g,
        &s,
        vec![c(1.0)],
        vec![fund(&g, &[2.0])],
        fund(&g, &[2.0]),
        Weight::zero(1),
        vec![0],
    );
    let w = [c(0.5 + 0.1)];
    let psi = weight_function(&cs.problem, &cs.module, &w).unwrap();
    let rep = verify_eigenvector(&cs.problem, &cs.module, &cs.set, &psi, &w).unwrap();
    let h10 = rep.checks.iter().find(|ch| ch.predicted).unwrap();
    assert!(h10.residual >= 1e-3);

    let g = sl(2);
    let s = sl3_flip(&g);
    let cs = case(
        &g,
        &s,
        vec![c(1.0), C64::new(0.3, 1.1)],
        vec![fund(&g, &[1.0, 0.0]), fund(&g, &[0.0, 2.0])],
        fund(&g, &[0.5, 0.5]),
        Weight::zero(2),
        vec![0],
    );
    let sols = cs.problem.solve(&SolverOptions::default());
    let w = [sols[0].roots[0] + 0.1];
    let psi = weight_function(&cs.problem, &cs.module, &w).unwrap();
    let rep = verify_eigenvector(&cs.problem, &cs.module, &cs.set, &psi, &w).unwrap();
    let worst = rep
        .checks
        .iter()
        .filter(|ch| ch.predicted)
        .fold(0.0, |m: f64, ch| m.max(ch.residual));
    assert!(worst >= 1e-3);
}
