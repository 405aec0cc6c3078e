//! Global assembly of the WG Helmholtz system
//!
//! ```text
//! a(u, v) = (d ∇_w u, ∇_w v) − κ² (u₀, v₀) + iκ ⟨u_b, v_b⟩_∂Ω
//! ```
//!
//! against the load `(f, v₀) + ⟨g, v_b⟩_∂Ω`. The boundary term is present
//! only for Robin problems; Dirichlet problems are assembled without it and
//! then reduced by [`apply_dirichlet`].

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::mesh::{Mesh, Point};
use crate::quadrature::{EdgeRule, TriangleRule};
use crate::sparse::{SparseComplexMatrix, SparseError, TripletBuilder};
use crate::wg_space::{edge_basis, edge_mass_diagonal, project_edge, DofMap, ElementWeakGradient, TriangleGeometry, WgError};
use crate::C64;

pub use crate::quadrature::{edge_quadrature, triangle_quadrature};

pub type ScalarField = Arc<dyn Fn(Point) -> C64 + Send + Sync>;
pub type RealField = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type GradientField = Arc<dyn Fn(Point) -> [C64; 2] + Send + Sync>;
/// Boundary data as a function of the point and the outward unit normal.
pub type BoundaryField = Arc<dyn Fn(Point, [f64; 2]) -> C64 + Send + Sync>;

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error(transparent)]
    Wg(#[from] WgError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error("wave number must be finite and non-negative, got {0}")]
    InvalidWaveNumber(f64),
    #[error("coefficient d = {value} is not positive in triangle {triangle}")]
    NonPositiveCoefficient { triangle: usize, value: f64 },
    #[error("Dirichlet elimination requested on a system assembled with Robin boundary terms")]
    NotDirichlet,
}

#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    Field(RealField),
}

impl Coefficient {
    pub fn eval(&self, p: Point) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Field(f) => f(p),
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "Constant({c})"),
            Coefficient::Field(_) => f.write_str("Field(..)"),
        }
    }
}

#[derive(Clone)]
pub enum BoundaryCondition {
    /// `d ∇u·n + iκu = g`.
    Robin(BoundaryField),
    /// `u = g`.
    Dirichlet(ScalarField),
}

impl BoundaryCondition {
    pub fn kind(&self) -> BoundaryKind {
        match self {
            BoundaryCondition::Robin(_) => BoundaryKind::Robin,
            BoundaryCondition::Dirichlet(_) => BoundaryKind::Dirichlet,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Robin,
    Dirichlet,
}

#[derive(Clone)]
pub struct ExactSolution {
    pub value: ScalarField,
    pub gradient: GradientField,
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub kappa: f64,
    pub d: Coefficient,
    pub f: ScalarField,
    pub boundary: BoundaryCondition,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("kappa", &self.kappa)
            .field("d", &self.d)
            .field("boundary", &self.boundary.kind())
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

/// Quadrature used for data-dependent integrals (variable `d`, `f`, `g`).
/// Polynomial Gram and mass integrals are always computed exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureOptions {
    pub triangle_degree: usize,
    pub edge_degree: usize,
    /// Uniform subdivision levels of both rules. `None` selects one level
    /// when `κ·h > 1` and none otherwise.
    pub subdivision: Option<u32>,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions { triangle_degree: 5, edge_degree: 5, subdivision: None }
    }
}

impl QuadratureOptions {
    pub fn levels(&self, kappa: f64, h: f64) -> u32 {
        self.subdivision.unwrap_or(if kappa * h > 1.0 { 1 } else { 0 })
    }

    pub fn rules(&self, kappa: f64, h: f64) -> Result<(TriangleRule, EdgeRule), AssemblyError> {
        let levels = self.levels(kappa, h);
        let unsupported = |d| AssemblyError::Wg(WgError::UnsupportedDegree(d));
        let t = TriangleRule::new(self.triangle_degree).map_err(|_| unsupported(self.triangle_degree))?;
        let e = EdgeRule::new(self.edge_degree).map_err(|_| unsupported(self.edge_degree))?;
        Ok((t.subdivided(levels), e.subdivided(levels)))
    }
}

/// Assembled system before any Dirichlet reduction.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: SparseComplexMatrix,
    pub rhs: Vec<C64>,
    pub boundary: BoundaryKind,
}

/// System on the free unknowns, plus what is needed to rebuild the full
/// coefficient vector.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub matrix: SparseComplexMatrix,
    pub rhs: Vec<C64>,
    /// Global index of each reduced unknown, ascending.
    pub free: Vec<usize>,
    /// Full-length vector holding the prescribed values; zero at free slots.
    pub fixed: Vec<C64>,
}

impl ReducedSystem {
    /// Full coefficient vector from a solution of the reduced system.
    pub fn expand(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.free.len());
        let mut out = self.fixed.clone();
        for (&g, &v) in self.free.iter().zip(x) {
            out[g] = v;
        }
        out
    }
}

pub fn assemble(m: &Mesh, dm: &DofMap, p: &ProblemSpec) -> Result<LinearSystem, AssemblyError> {
    assemble_with(m, dm, p, &QuadratureOptions::default())
}

pub fn assemble_with(m: &Mesh, dm: &DofMap, p: &ProblemSpec, q: &QuadratureOptions) -> Result<LinearSystem, AssemblyError> {
    dm.check(m)?;
    if !(p.kappa.is_finite() && p.kappa >= 0.0) {
        return Err(AssemblyError::InvalidWaveNumber(p.kappa));
    }
    let kappa = p.kappa;
    let degree = dm.degree();
    let (n0, ne, nloc) = (degree.interior_dim(), degree.edge_dim(), degree.local_dim());
    let (trule, erule) = q.rules(kappa, m.h())?;
    let edge_diag = edge_mass_diagonal(degree);

    let n = dm.n_total();
    let mut tb = TripletBuilder::with_capacity(n, m.num_triangles() * nloc * nloc);
    let mut rhs = vec![C64::new(0.0, 0.0); n];
    let mut a = vec![C64::new(0.0, 0.0); nloc * nloc];

    for t in 0..m.num_triangles() {
        let geom = TriangleGeometry::from_mesh(m, t)?;
        let wg = ElementWeakGradient::new(&geom, degree)?;
        let md = match &p.d {
            Coefficient::Constant(c) => {
                if !(*c > 0.0) {
                    return Err(AssemblyError::NonPositiveCoefficient { triangle: t, value: *c });
                }
                &wg.gram * *c
            }
            Coefficient::Field(f) => weighted_gram(&geom, &wg, &trule, |x| f(x), t)?,
        };
        let stiff: DMatrix<f64> = wg.matrix.transpose() * md * &wg.matrix;
        for i in 0..nloc {
            for j in i..nloc {
                a[i * nloc + j] = C64::new(stiff[(i, j)], 0.0);
            }
        }
        if kappa != 0.0 {
            let mass = geom.interior_mass(degree);
            for i in 0..n0 {
                for j in i..n0 {
                    a[i * nloc + j] -= kappa * kappa * mass[(i, j)];
                }
            }
        }

        let dofs = dm.local_dofs(m, t);
        for (x, w) in geom.quadrature(&trule) {
            let v = (p.f)(x) * w;
            let phi = geom.interior_basis(degree, x);
            for mm in 0..n0 {
                rhs[dofs[mm]] += v * phi[mm];
            }
        }

        if let BoundaryCondition::Robin(g) = &p.boundary {
            for (le, &e) in m.triangle_edges()[t].iter().enumerate() {
                if !m.edges()[e].is_boundary() {
                    continue;
                }
                let edge = &geom.edges[le];
                let base = n0 + le * ne;
                for mm in 0..ne {
                    a[(base + mm) * nloc + base + mm] += C64::new(0.0, kappa * edge.length * edge_diag[mm]);
                }
                let half = 0.5 * edge.length;
                for (&s, &w) in erule.points.iter().zip(&erule.weights) {
                    let v = g(edge.point(s), edge.normal) * (w * half);
                    let psi = edge_basis(degree, s);
                    for mm in 0..ne {
                        rhs[dofs[base + mm]] += v * psi[mm];
                    }
                }
            }
        }

        for i in 0..nloc {
            for j in i..nloc {
                tb.push_symmetric(dofs[i], dofs[j], a[i * nloc + j]);
            }
        }
    }
    Ok(LinearSystem { matrix: tb.build()?, rhs, boundary: p.boundary.kind() })
}

/// `(d θ_i, θ_j)_T` by quadrature, rejecting non-positive samples of `d`.
fn weighted_gram<F: Fn(Point) -> f64>(
    geom: &TriangleGeometry,
    wg: &ElementWeakGradient,
    rule: &TriangleRule,
    d: F,
    triangle: usize,
) -> Result<DMatrix<f64>, AssemblyError> {
    let nrt = wg.basis.dim();
    let mut md = DMatrix::zeros(nrt, nrt);
    for (x, w) in geom.quadrature(rule) {
        let dv = d(x);
        if !(dv > 0.0) {
            return Err(AssemblyError::NonPositiveCoefficient { triangle, value: dv });
        }
        let th = wg.basis.values(x);
        for i in 0..nrt {
            for j in i..nrt {
                md[(i, j)] += w * dv * (th[i][0] * th[j][0] + th[i][1] * th[j][1]);
            }
        }
    }
    for i in 0..nrt {
        for j in 0..i {
            md[(i, j)] = md[(j, i)];
        }
    }
    Ok(md)
}

/// Fixes boundary-edge DOFs to the edgewise L² projection of `g` and
/// eliminates them symmetrically.
pub fn apply_dirichlet(
    sys: &LinearSystem,
    m: &Mesh,
    dm: &DofMap,
    g: &ScalarField,
    kappa: f64,
    q: &QuadratureOptions,
) -> Result<ReducedSystem, AssemblyError> {
    if sys.boundary != BoundaryKind::Dirichlet {
        return Err(AssemblyError::NotDirichlet);
    }
    dm.check(m)?;
    let degree = dm.degree();
    let ne = degree.edge_dim();
    let (_, erule) = q.rules(kappa, m.h())?;
    let n = dm.n_total();
    let mut is_fixed = vec![false; n];
    let mut fixed = vec![C64::new(0.0, 0.0); n];
    for (e, edge) in m.edges().iter().enumerate() {
        if !edge.is_boundary() {
            continue;
        }
        let [a, b] = edge.vertices;
        let c = project_edge(degree, m.vertices()[a], m.vertices()[b], &erule, |x| g(x));
        let o = dm.edge_offset(e);
        for mm in 0..ne {
            is_fixed[o + mm] = true;
            fixed[o + mm] = c[mm];
        }
    }
    let free: Vec<usize> = (0..n).filter(|&i| !is_fixed[i]).collect();
    let rhs = free
        .iter()
        .map(|&i| {
            let mut r = sys.rhs[i];
            for (j, v) in sys.matrix.row(i) {
                if is_fixed[j] {
                    r -= v * fixed[j];
                }
            }
            r
        })
        .collect();
    Ok(ReducedSystem { matrix: sys.matrix.principal_submatrix(&free), rhs, free, fixed })
}

/// Assembles and, for Dirichlet problems, reduces. Robin systems are
/// returned with every unknown free.
pub fn prepare(m: &Mesh, dm: &DofMap, p: &ProblemSpec, q: &QuadratureOptions) -> Result<ReducedSystem, AssemblyError> {
    let sys = assemble_with(m, dm, p, q)?;
    match &p.boundary {
        BoundaryCondition::Dirichlet(g) => apply_dirichlet(&sys, m, dm, g, p.kappa, q),
        BoundaryCondition::Robin(_) => {
            let n = sys.rhs.len();
            Ok(ReducedSystem { matrix: sys.matrix, rhs: sys.rhs, free: (0..n).collect(), fixed: vec![C64::new(0.0, 0.0); n] })
        }
    }
}
