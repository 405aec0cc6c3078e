mod common;

use std::sync::Arc;

use proptest::prelude::*;

use common::*;
use wg_helmholtz::analysis::{self, StabilizerScale};
use wg_helmholtz::assembly::{assemble, prepare, BoundaryCondition, Coefficient, ProblemSpec, QuadratureOptions};
use wg_helmholtz::mesh::hexagon_mesh;
use wg_helmholtz::problems::{convex_problem, inhomogeneous_problem, pacman_problem, DielectricProfile};
use wg_helmholtz::solver::{solve, solve_with, SolverOptions};
use wg_helmholtz::wg_space::{Degree, DofMap, ElementWeakGradient, TriangleGeometry};
use wg_helmholtz::C64;

fn degree(one: bool) -> Degree {
    if one {
        Degree::One
    } else {
        Degree::Zero
    }
}

fn robin_problem(kappa: f64, d: f64) -> ProblemSpec {
    ProblemSpec {
        kappa,
        d: Coefficient::Constant(d),
        f: Arc::new(|p| C64::new(p[0], p[1] * p[1])),
        boundary: BoundaryCondition::Robin(Arc::new(|p, n| C64::new(n[0] + p[1], n[1]))),
        exact: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn constants_have_zero_weak_gradient(n in 1usize..6, seed in any::<u64>(), amp in 0.0..0.3f64) {
        let m = perturbed_hexagon(n, amp, seed);
        prop_assert!(constant_weak_gradients(&m, 1e-13).is_ok());
    }

    #[test]
    fn linear_functions_have_exact_weak_gradient(
        n in 1usize..6, seed in any::<u64>(), a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64,
    ) {
        let m = perturbed_hexagon(n, 0.25, seed);
        let r = linear_consistency(&m, [a, b, c], 1e-12);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn matrix_is_exactly_symmetric_with_boundary_imaginary_part(
        n in 1usize..6, seed in any::<u64>(), kappa in 0.1..20.0f64, d in 0.1..10.0f64, one in any::<bool>(),
    ) {
        let m = perturbed_hexagon(n, 0.2, seed);
        let dm = DofMap::new(&m, degree(one));
        let sys = assemble(&m, &dm, &robin_problem(kappa, d)).unwrap();
        prop_assert!(exact_symmetry(&sys.matrix).is_ok());
        let r = imaginary_support(&sys.matrix, &m, &dm);
        prop_assert!(r.is_ok(), "{:?}", r);
        // every boundary-edge DOF carries an impedance term
        prop_assert_eq!(r.unwrap() as usize, m.num_boundary_edges() * degree(one).edge_dim());
    }

    /// At κ = 0, xᵀAx = Σ_T d‖∇_w x‖² ≥ 0 for real x.
    #[test]
    fn energy_identity_at_zero_wave_number(
        n in 1usize..5, seed in any::<u64>(), d in 0.1..10.0f64, one in any::<bool>(),
    ) {
        let m = perturbed_hexagon(n, 0.2, seed);
        let dm = DofMap::new(&m, degree(one));
        let sys = assemble(&m, &dm, &robin_problem(0.0, d)).unwrap();
        let x = random_real_function(&dm, seed ^ 0x5eed);
        let ax = sys.matrix.mul_vec(&x.coefficients);
        let quad: C64 = x.coefficients.iter().zip(&ax).map(|(p, q)| p * q).sum();
        let mut energy = 0.0;
        for t in 0..m.num_triangles() {
            let geom = TriangleGeometry::from_mesh(&m, t).unwrap();
            let wg = ElementWeakGradient::new(&geom, degree(one)).unwrap();
            energy += d * wg.norm_sq(&wg.apply(&x.local(&dm, &m, t)));
        }
        prop_assert!(quad.im.abs() < 1e-12 * energy.max(1.0));
        prop_assert!((quad.re - energy).abs() < 1e-10 * energy.max(1.0), "{} vs {}", quad.re, energy);
        prop_assert!(energy >= 0.0);
    }

    #[test]
    fn solver_meets_residual_and_round_trip(
        n in 1usize..7, seed in any::<u64>(), kappa in 0.5..15.0f64, one in any::<bool>(),
    ) {
        let m = perturbed_hexagon(n, 0.2, seed);
        let dm = DofMap::new(&m, degree(one));
        let sys = assemble(&m, &dm, &robin_problem(kappa, 1.0)).unwrap();
        let (x, report) = solve(&sys.matrix, &sys.rhs).unwrap();
        let r = residual(&sys.matrix, &x, &sys.rhs, 1e-10);
        prop_assert!(r.is_ok(), "{:?}", r);
        prop_assert!((report.relative_residual - r.unwrap()).abs() <= 1e-12);

        let y = random_vector(sys.matrix.n(), seed);
        let b = sys.matrix.mul_vec(&y);
        let (z, _) = solve(&sys.matrix, &b).unwrap();
        let err: f64 = z.iter().zip(&y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
        let yn: f64 = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-10 * yn, "round trip {}", err / yn);
    }

    #[test]
    fn relative_errors_invariant_under_common_scaling(
        n in 2usize..5, re in -3.0..3.0f64, im in -3.0..3.0f64, one in any::<bool>(),
    ) {
        prop_assume!(re.abs() + im.abs() > 0.1);
        let s = C64::new(re, im);
        let m = hexagon_mesh(n).unwrap();
        let dm = DofMap::new(&m, degree(one));
        let q = analysis::project(&m, &dm, |p| C64::new(p[0].sin(), p[1]), 1.0).unwrap();
        let mut uh = random_real_function(&dm, n as u64);
        for (u, qv) in uh.coefficients.iter_mut().zip(&q.coefficients) {
            *u = *qv + 0.1 * *u;
        }
        let scaled = |f: &wg_helmholtz::wg_space::WgFunction| {
            wg_helmholtz::wg_space::WgFunction::from_vec(&dm, f.coefficients.iter().map(|v| v * s).collect()).unwrap()
        };
        let (uhs, qs) = (scaled(&uh), scaled(&q));
        let l2 = analysis::rel_l2_error(&uh, &q, &dm, &m).unwrap();
        let l2s = analysis::rel_l2_error(&uhs, &qs, &dm, &m).unwrap();
        prop_assert!((l2 - l2s).abs() < 1e-12 * l2);
        for scale in [StabilizerScale::Global, StabilizerScale::PerElement] {
            let h1 = analysis::rel_h1_error_with(&uh, &q, &dm, &m, scale).unwrap();
            let h1s = analysis::rel_h1_error_with(&uhs, &qs, &dm, &m, scale).unwrap();
            prop_assert!((h1 - h1s).abs() < 1e-12 * h1);
        }
    }

    #[test]
    fn inhomogeneous_residual_vanishes_in_every_region(seed in any::<u64>(), k in 0.5..4.0f64) {
        let prof = DielectricProfile::default();
        let p = inhomogeneous_problem(k, prof).unwrap();
        for (r0, r1) in [(0.05, 0.95), (1.05, 2.95), (3.05, 4.95)] {
            let pts = annulus_points(r0, r1, 5, seed);
            let r = max_pde_residual(&p, &pts, 1e-3, 1e-5);
            prop_assert!(r.is_ok(), "{:?}", r);
        }
    }
}

#[test]
fn quadrature_integrates_degree_five_monomials() {
    let worst = monomial_exactness(1e-14).unwrap();
    assert!(worst <= 1e-14);
}

#[test]
fn bessel_branches_agree_on_overlap() {
    bessel_branch_agreement(1e-9).unwrap();
}

#[test]
fn benchmark_problems_satisfy_their_equations() {
    let pts = annulus_points(0.1, 0.95, 40, 7);
    max_pde_residual(&convex_problem(5.0).unwrap(), &pts, 1e-3, 1e-4).unwrap();
    for xi in [1.0, 1.5, 2.0 / 3.0] {
        max_pde_residual(&pacman_problem(4.0, xi).unwrap(), &pts, 1e-3, 1e-4).unwrap();
    }
}

#[test]
fn dirichlet_elimination_keeps_symmetry() {
    let m = perturbed_hexagon(4, 0.2, 3);
    for d in [Degree::Zero, Degree::One] {
        let dm = DofMap::new(&m, d);
        let p = inhomogeneous_problem(2.0, DielectricProfile::new(2.0, 80.0, 0.3, 0.6, 1.0).unwrap()).unwrap();
        let sys = prepare(&m, &dm, &p, &QuadratureOptions::default()).unwrap();
        exact_symmetry(&sys.matrix).unwrap();
        // no boundary DOFs remain, so the matrix is real
        assert!(sys.matrix.values().iter().all(|v| v.im == 0.0));
        let (x, _) = solve_with(&sys.matrix, &sys.rhs, &SolverOptions::default()).unwrap();
        residual(&sys.matrix, &x, &sys.rhs, 1e-10).unwrap();
    }
}
