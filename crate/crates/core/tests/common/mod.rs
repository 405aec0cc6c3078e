//! Checks shared by the property suite and the acceptance runner. Each
//! returns the worst observed defect, or a description of the first failure.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wg_helmholtz::assembly::{ExactSolution, ProblemSpec};
use wg_helmholtz::mesh::{hexagon_mesh, Mesh, Point};
use wg_helmholtz::quadrature::{EdgeRule, TriangleRule};
use wg_helmholtz::sparse::SparseComplexMatrix;
use wg_helmholtz::special::{bessel_j_asymptotic, bessel_j_series};
use wg_helmholtz::wg_space::{Degree, DofMap, ElementWeakGradient, TriangleGeometry, WgFunction};
use wg_helmholtz::C64;

pub type Check = Result<f64, String>;

/// Hexagon mesh with every interior vertex moved by up to `amp · h` in each
/// coordinate. Boundary vertices stay put so the domain is unchanged.
pub fn perturbed_hexagon(n: usize, amp: f64, seed: u64) -> Mesh {
    let base = hexagon_mesh(n).unwrap();
    let mut on_boundary = vec![false; base.num_vertices()];
    for e in base.edges().iter().filter(|e| e.is_boundary()) {
        on_boundary[e.vertices[0]] = true;
        on_boundary[e.vertices[1]] = true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = base.h();
    let vertices = base
        .vertices()
        .iter()
        .zip(&on_boundary)
        .map(|(p, &b)| {
            if b {
                *p
            } else {
                [p[0] + amp * h * rng.random_range(-1.0..1.0), p[1] + amp * h * rng.random_range(-1.0..1.0)]
            }
        })
        .collect();
    Mesh::from_triangles(vertices, base.triangles().to_vec()).unwrap()
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `∇_w` of the constant WG function vanishes on every element. The defect is
/// measured as `diam(T) · ‖∇_w 1‖_T / |T|^½`, which is dimensionless: weak
/// gradients of unit basis functions have size `1/diam(T)`.
pub fn constant_weak_gradients(m: &Mesh, tol: f64) -> Check {
    let mut worst = 0.0f64;
    for degree in [Degree::Zero, Degree::One] {
        let n0 = degree.interior_dim();
        let ne = degree.edge_dim();
        let mut local = vec![c(0.0); degree.local_dim()];
        local[0] = c(1.0);
        for e in 0..3 {
            local[n0 + e * ne] = c(1.0);
        }
        for t in 0..m.num_triangles() {
            let geom = TriangleGeometry::from_mesh(m, t).map_err(|e| e.to_string())?;
            let wg = ElementWeakGradient::new(&geom, degree).map_err(|e| e.to_string())?;
            let norm = geom.diameter * wg.norm_sq(&wg.apply(&local)).sqrt() / geom.area.sqrt();
            worst = worst.max(norm);
            if norm > tol {
                return Err(format!("triangle {t}, {degree:?}: |∇_w 1| = {norm:e}"));
            }
        }
    }
    Ok(worst)
}

/// For k = 0, `∇_w Q_h u = ∇u` for linear `u = a + b x + c y`.
pub fn linear_consistency(m: &Mesh, coef: [f64; 3], tol: f64) -> Check {
    let [a, b, cc] = coef;
    let dm = DofMap::new(m, Degree::Zero);
    let q = wg_helmholtz::analysis::project(m, &dm, |p: Point| c(a + b * p[0] + cc * p[1]), 0.0).map_err(|e| e.to_string())?;
    let scale = 1.0f64.max(b.abs()).max(cc.abs());
    let mut worst = 0.0f64;
    for t in 0..m.num_triangles() {
        let geom = TriangleGeometry::from_mesh(m, t).map_err(|e| e.to_string())?;
        let wg = ElementWeakGradient::new(&geom, Degree::Zero).map_err(|e| e.to_string())?;
        let rt = wg.apply(&q.local(&dm, m, t));
        for p in geom.vertices.iter().chain([&geom.centroid]) {
            let g = wg.basis.eval(&rt, *p);
            let err = ((g[0] - b).norm()).max((g[1] - cc).norm()) / scale;
            worst = worst.max(err);
            if err > tol {
                return Err(format!("triangle {t}: weak gradient {g:?}, expected ({b}, {cc})"));
            }
        }
    }
    Ok(worst)
}

/// Entry `(i, j)` equals entry `(j, i)` bit for bit.
pub fn exact_symmetry(a: &SparseComplexMatrix) -> Check {
    for (i, j, v) in a.iter() {
        let w = a.get(j, i);
        if v != w {
            return Err(format!("A[{i},{j}] = {v} but A[{j},{i}] = {w}"));
        }
    }
    Ok(0.0)
}

/// Nonzero imaginary parts only on diagonal entries of boundary-edge DOFs.
pub fn imaginary_support(a: &SparseComplexMatrix, m: &Mesh, dm: &DofMap) -> Check {
    let mut count = 0usize;
    for (i, j, v) in a.iter() {
        if v.im == 0.0 {
            continue;
        }
        let ok = i == j && dm.edge_of(i).is_some_and(|e| m.edges()[e].is_boundary());
        if !ok {
            return Err(format!("Im A[{i},{j}] = {} off the boundary-edge diagonal", v.im));
        }
        count += 1;
    }
    Ok(count as f64)
}

/// Residual of a solve, recomputed here rather than taken from the report.
pub fn residual(a: &SparseComplexMatrix, x: &[C64], b: &[C64], tol: f64) -> Check {
    let ax = a.mul_vec(x);
    let rn: f64 = ax.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
    let bn: f64 = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let r = if bn == 0.0 { rn } else { rn / bn };
    if r <= tol {
        Ok(r)
    } else {
        Err(format!("relative residual {r:e} above {tol:e}"))
    }
}

/// `∫_T x^a y^b` over the reference triangle is `a! b! / (a + b + 2)!`.
pub fn monomial_exactness(tol: f64) -> Check {
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    let rule = TriangleRule::new(5).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for a in 0..=5u32 {
        for b in 0..=(5 - a) {
            let exact = fact(a) * fact(b) / fact(a + b + 2);
            let got = rule.integrate(|p| p[0].powi(a as i32) * p[1].powi(b as i32));
            let err = (got - exact).abs();
            worst = worst.max(err);
            if err > tol {
                return Err(format!("x^{a} y^{b}: {got} vs {exact}"));
            }
        }
    }
    let edge = EdgeRule::new(5).map_err(|e| e.to_string())?;
    for p in 0..=5i32 {
        let exact = if p % 2 == 0 { 2.0 / f64::from(p + 1) } else { 0.0 };
        let got: f64 = edge.points.iter().zip(&edge.weights).map(|(x, w)| w * x.powi(p)).sum();
        let err = (got - exact).abs();
        worst = worst.max(err);
        if err > tol {
            return Err(format!("edge t^{p}: {got} vs {exact}"));
        }
    }
    Ok(worst)
}

/// Series and asymptotic Bessel branches on the overlap window [25, 35].
pub fn bessel_branch_agreement(tol: f64) -> Check {
    let mut worst = 0.0f64;
    for nu in [0.0, 2.0 / 3.0, 1.0, 1.5, 2.0, 3.0, 4.0] {
        for i in 0..=200 {
            let x = 25.0 + 0.05 * f64::from(i);
            let s = bessel_j_series(nu, x).map_err(|e| e.to_string())?;
            let a = bessel_j_asymptotic(nu, x).map_err(|e| e.to_string())?;
            worst = worst.max((s - a).abs());
            if (s - a).abs() > tol {
                return Err(format!("J_{nu}({x}): series {s}, asymptotic {a}"));
            }
        }
    }
    Ok(worst)
}

/// `|−∇·(d∇u) − κ²u − f|` at `p` by central differences of step `s` on the
/// flux form, relative to the size of the terms.
pub fn pde_residual(problem: &ProblemSpec, p: Point, s: f64) -> f64 {
    let exact: &ExactSolution = problem.exact.as_ref().expect("problem with exact solution");
    let u = |x: f64, y: f64| (exact.value)([x, y]);
    let d = |x: f64, y: f64| problem.d.eval([x, y]);
    let [x, y] = p;
    let fx = |xm: f64| d(xm, y) * (u(xm + 0.5 * s, y) - u(xm - 0.5 * s, y)) / s;
    let fy = |ym: f64| d(x, ym) * (u(x, ym + 0.5 * s) - u(x, ym - 0.5 * s)) / s;
    let div = (fx(x + 0.5 * s) - fx(x - 0.5 * s)) / s + (fy(y + 0.5 * s) - fy(y - 0.5 * s)) / s;
    let k2u = problem.kappa * problem.kappa * u(x, y);
    let f = (problem.f)(p);
    let size = 1.0f64.max(div.norm()).max(k2u.norm());
    (-div - k2u - f).norm() / size
}

/// Largest PDE residual over `points`.
pub fn max_pde_residual(problem: &ProblemSpec, points: &[Point], s: f64, tol: f64) -> Check {
    let mut worst = 0.0f64;
    for &p in points {
        let r = pde_residual(problem, p, s);
        worst = worst.max(r);
        if r > tol {
            return Err(format!("residual {r:e} at {p:?}"));
        }
    }
    Ok(worst)
}

/// Random points in the annulus `r0 < r < r1`, away from the negative x-axis.
pub fn annulus_points(r0: f64, r1: f64, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = rng.random_range(r0..r1);
            let th = rng.random_range(-2.8..2.8f64);
            [r * th.cos(), r * th.sin()]
        })
        .collect()
}

/// Random complex vector of length `n`.
pub fn random_vector(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

/// Real random WG function.
pub fn random_real_function(dm: &DofMap, seed: u64) -> WgFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..dm.n_total()).map(|_| c(rng.random_range(-1.0..1.0))).collect();
    WgFunction::from_vec(dm, v).unwrap()
}
