//! L² projections `Q_h u`, relative error norms and convergence orders.
//!
//! The relative L² error is the broken L² norm of the interior components.
//! The relative H¹ error is the weak-gradient norm for k = 1 and, for k = 0,
//! the stabilizer seminorm
//!
//! ```text
//! |||v|||² = h⁻¹ Σ_T Σ_{e ⊂ ∂T} ∫_e |v₀ − v_b|² ds
//! ```
//!
//! with the same functional applied to `Q_h u` in the denominator.

use std::io::Write;

use thiserror::Error;

use crate::assembly::{AssemblyError, QuadratureOptions};
use crate::mesh::{Mesh, Point};
use crate::quadrature::EdgeRule;
use crate::wg_space::{
    edge_basis, project_edge, project_interior, Degree, DofMap, ElementWeakGradient, TriangleGeometry, WgError,
    WgFunction,
};
use crate::C64;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Wg(#[from] WgError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error("reference norm is zero")]
    ZeroDenominator,
    #[error("{errors} errors but {hs} mesh sizes")]
    LengthMismatch { errors: usize, hs: usize },
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("row {row}: error {value} is not positive")]
    NonPositiveError { row: usize, value: f64 },
    #[error("mesh sizes must be positive and strictly decreasing (row {row})")]
    NotDecreasing { row: usize },
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

/// `Q_h u` with default data quadrature.
pub fn project<F: Fn(Point) -> C64>(m: &Mesh, dm: &DofMap, u: F, kappa: f64) -> Result<WgFunction, AnalysisError> {
    project_with(m, dm, u, kappa, &QuadratureOptions::default())
}

/// `Q_h u`: elementwise projection onto P_k(T) and edgewise onto P_k(e).
/// The quadrature matches assembly so projected Dirichlet data coincide.
pub fn project_with<F: Fn(Point) -> C64>(
    m: &Mesh,
    dm: &DofMap,
    u: F,
    kappa: f64,
    q: &QuadratureOptions,
) -> Result<WgFunction, AnalysisError> {
    dm.check(m)?;
    let degree = dm.degree();
    let (trule, erule) = q.rules(kappa, m.h())?;
    let mut out = WgFunction::zeros(dm);
    let (n0, ne) = (degree.interior_dim(), degree.edge_dim());
    for t in 0..m.num_triangles() {
        let geom = TriangleGeometry::from_mesh(m, t)?;
        let c = project_interior(&geom, degree, &trule, &u);
        let o = dm.interior_offset(t);
        out.coefficients[o..o + n0].copy_from_slice(&c[..n0]);
    }
    for (e, edge) in m.edges().iter().enumerate() {
        let [a, b] = edge.vertices;
        let c = project_edge(degree, m.vertices()[a], m.vertices()[b], &erule, &u);
        let o = dm.edge_offset(e);
        out.coefficients[o..o + ne].copy_from_slice(&c[..ne]);
    }
    Ok(out)
}

/// Value of the interior component of `u` on triangle `t` at `p`.
pub fn eval_interior(m: &Mesh, dm: &DofMap, u: &WgFunction, t: usize) -> Result<impl Fn(Point) -> C64, AnalysisError> {
    let geom = TriangleGeometry::from_mesh(m, t)?;
    let degree = dm.degree();
    let c = u.interior(dm, t).to_vec();
    Ok(move |p| geom.eval_interior(degree, &c, p))
}

fn check_pair(m: &Mesh, dm: &DofMap, a: &WgFunction, b: &WgFunction) -> Result<(), AnalysisError> {
    dm.check(m)?;
    for f in [a, b] {
        if f.coefficients.len() != dm.n_total() {
            return Err(WgError::LengthMismatch { expected: dm.n_total(), got: f.coefficients.len() }.into());
        }
    }
    Ok(())
}

fn ratio(num: f64, den: f64) -> Result<f64, AnalysisError> {
    if den > 0.0 {
        Ok((num / den).sqrt())
    } else {
        Err(AnalysisError::ZeroDenominator)
    }
}

/// `Σ_T ‖v₀‖²_T`, exact for piecewise polynomials.
pub fn l2_norm_sq(m: &Mesh, dm: &DofMap, v: &[C64]) -> Result<f64, AnalysisError> {
    let degree = dm.degree();
    let mut s = 0.0;
    for t in 0..m.num_triangles() {
        let o = dm.interior_offset(t);
        match degree {
            Degree::Zero => s += m.triangle_area(t) * v[o].norm_sqr(),
            Degree::One => {
                let mass = TriangleGeometry::from_mesh(m, t)?.interior_mass(degree);
                for i in 0..3 {
                    for j in 0..3 {
                        s += mass[(i, j)] * (v[o + i].conj() * v[o + j]).re;
                    }
                }
            }
        }
    }
    Ok(s)
}

/// `‖u₀ − Q₀u‖ / ‖Q₀u‖`.
pub fn rel_l2_error(uh: &WgFunction, q: &WgFunction, dm: &DofMap, m: &Mesh) -> Result<f64, AnalysisError> {
    check_pair(m, dm, uh, q)?;
    let diff: Vec<C64> = uh.coefficients.iter().zip(&q.coefficients).map(|(a, b)| a - b).collect();
    ratio(l2_norm_sq(m, dm, &diff)?, l2_norm_sq(m, dm, &q.coefficients)?)
}

/// Which mesh size scales the stabilizer seminorm.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilizerScale {
    /// One global `h⁻¹`.
    #[default]
    Global,
    /// `h_T⁻¹` with the element diameter.
    PerElement,
}

/// `Σ_T h⁻¹ Σ_{e ⊂ ∂T} ∫_e |v₀ − v_b|² ds` for any degree.
pub fn stabilizer_seminorm_sq(m: &Mesh, dm: &DofMap, v: &[C64], scale: StabilizerScale) -> Result<f64, AnalysisError> {
    let degree = dm.degree();
    // |v₀ − v_b|² has degree 2k on each edge.
    let rule = EdgeRule::new(2 * degree.k()).expect("low degree");
    let h = m.h();
    let mut s = 0.0;
    for t in 0..m.num_triangles() {
        let geom = TriangleGeometry::from_mesh(m, t)?;
        let o = dm.interior_offset(t);
        let v0 = &v[o..o + degree.interior_dim()];
        let mut st = 0.0;
        for (le, &e) in m.triangle_edges()[t].iter().enumerate() {
            let edge = &geom.edges[le];
            let ob = dm.edge_offset(e);
            let vb = &v[ob..ob + degree.edge_dim()];
            for (&x, &w) in rule.points.iter().zip(&rule.weights) {
                let p = edge.point(x);
                let psi = edge_basis(degree, x);
                let b: C64 = vb.iter().zip(psi).map(|(c, s)| c * s).sum();
                st += 0.5 * edge.length * w * (geom.eval_interior(degree, v0, p) - b).norm_sqr();
            }
        }
        s += st
            / match scale {
                StabilizerScale::Global => h,
                StabilizerScale::PerElement => geom.diameter,
            };
    }
    Ok(s)
}

/// `Σ_T ‖∇_w v‖²_T`.
pub fn weak_gradient_norm_sq(m: &Mesh, dm: &DofMap, v: &[C64]) -> Result<f64, AnalysisError> {
    let degree = dm.degree();
    let mut s = 0.0;
    for t in 0..m.num_triangles() {
        let geom = TriangleGeometry::from_mesh(m, t)?;
        let wg = ElementWeakGradient::new(&geom, degree)?;
        let local: Vec<C64> = dm.local_dofs(m, t).into_iter().map(|i| v[i]).collect();
        s += wg.norm_sq(&wg.apply(&local));
    }
    Ok(s)
}

/// Relative H¹ error: stabilizer seminorm for k = 0, weak-gradient norm
/// for k = 1. The stabilizer uses the global `h`.
pub fn rel_h1_error(uh: &WgFunction, q: &WgFunction, dm: &DofMap, m: &Mesh) -> Result<f64, AnalysisError> {
    rel_h1_error_with(uh, q, dm, m, StabilizerScale::Global)
}

pub fn rel_h1_error_with(
    uh: &WgFunction,
    q: &WgFunction,
    dm: &DofMap,
    m: &Mesh,
    scale: StabilizerScale,
) -> Result<f64, AnalysisError> {
    check_pair(m, dm, uh, q)?;
    let diff: Vec<C64> = uh.coefficients.iter().zip(&q.coefficients).map(|(a, b)| a - b).collect();
    match dm.degree() {
        Degree::Zero => ratio(
            stabilizer_seminorm_sq(m, dm, &diff, scale)?,
            stabilizer_seminorm_sq(m, dm, &q.coefficients, scale)?,
        ),
        Degree::One => ratio(weak_gradient_norm_sq(m, dm, &diff)?, weak_gradient_norm_sq(m, dm, &q.coefficients)?),
    }
}

fn check_sequence(errors: &[f64], hs: &[f64], needed: usize) -> Result<(), AnalysisError> {
    if errors.len() != hs.len() {
        return Err(AnalysisError::LengthMismatch { errors: errors.len(), hs: hs.len() });
    }
    if errors.len() < needed {
        return Err(AnalysisError::TooFewRows { needed, got: errors.len() });
    }
    for (row, &e) in errors.iter().enumerate() {
        if !(e > 0.0 && e.is_finite()) {
            return Err(AnalysisError::NonPositiveError { row, value: e });
        }
    }
    for (row, w) in hs.windows(2).enumerate() {
        if !(w[1] > 0.0 && w[1] < w[0]) {
            return Err(AnalysisError::NotDecreasing { row: row + 1 });
        }
    }
    Ok(())
}

/// `log(e_{i−1}/e_i) / log(h_{i−1}/h_i)` for `i ≥ 1`.
pub fn convergence_order(errors: &[f64], hs: &[f64]) -> Result<Vec<f64>, AnalysisError> {
    check_sequence(errors, hs, 2)?;
    Ok(errors
        .windows(2)
        .zip(hs.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect())
}

/// Mean of the pairwise orders and the least-squares slope of `log e`
/// against `log h`.
pub fn average_and_lsq_order(errors: &[f64], hs: &[f64]) -> Result<(f64, f64), AnalysisError> {
    check_sequence(errors, hs, 3)?;
    let orders = convergence_order(errors, hs)?;
    let mean = orders.iter().sum::<f64>() / orders.len() as f64;
    let n = errors.len() as f64;
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok((mean, sxy / sxx))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub err_h1: f64,
    pub ord_h1: Option<f64>,
    pub err_l2: f64,
    pub ord_l2: Option<f64>,
    pub n_dof: usize,
    pub solve_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConvergenceReport {
    pub domain: String,
    pub kappa: f64,
    pub degree: Degree,
    pub rows: Vec<ConvergenceRow>,
    /// Set when a later level failed; the rows present are still valid.
    pub failure: Option<String>,
    /// Largest relative solver residual over the rows.
    #[serde(default)]
    pub max_residual: f64,
}

impl ConvergenceReport {
    pub fn new(domain: impl Into<String>, kappa: f64, degree: Degree) -> Self {
        ConvergenceReport { domain: domain.into(), kappa, degree, rows: Vec::new(), failure: None, max_residual: 0.0 }
    }

    /// Appends a level; orders are filled in from the previous row.
    pub fn push(&mut self, h: f64, err_h1: f64, err_l2: f64, n_dof: usize, solve_seconds: f64) {
        let order = |prev: f64, e: f64, hp: f64| (prev / e).ln() / (hp / h).ln();
        let (ord_h1, ord_l2) = match self.rows.last() {
            Some(p) => (Some(order(p.err_h1, err_h1, p.h)), Some(order(p.err_l2, err_l2, p.h))),
            None => (None, None),
        };
        self.rows.push(ConvergenceRow { h, err_h1, ord_h1, err_l2, ord_l2, n_dof, solve_seconds });
    }

    pub fn hs(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.h).collect()
    }

    pub fn errors_h1(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.err_h1).collect()
    }

    pub fn errors_l2(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.err_l2).collect()
    }

    /// CSV with header `h,errH1,ordH1,errL2,ordL2,nDof,solveSeconds`.
    /// Errors and `h` carry 6 significant digits, orders 4 decimals.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), AnalysisError> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["h", "errH1", "ordH1", "errL2", "ordL2", "nDof", "solveSeconds"])?;
        let ord = |o: Option<f64>| o.map(|v| format!("{v:.4}")).unwrap_or_default();
        for r in &self.rows {
            wr.write_record([
                format!("{:.5e}", r.h),
                format!("{:.5e}", r.err_h1),
                ord(r.ord_h1),
                format!("{:.5e}", r.err_l2),
                ord(r.ord_l2),
                r.n_dof.to_string(),
                format!("{:.3}", r.solve_seconds),
            ])?;
        }
        wr.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}
