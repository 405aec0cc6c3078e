//! The weak Galerkin space and its discrete weak gradient.
//!
//! A WG function carries a polynomial of degree `k` inside every triangle
//! (`v₀`) and an independent polynomial of degree `k` on every edge (`v_b`).
//! The weak gradient on a triangle `T` is the Raviart–Thomas field
//! `∇_w v ∈ RT_k(T)` satisfying
//!
//! ```text
//! (∇_w v, τ)_T = −(v₀, ∇·τ)_T + ⟨v_b, τ·n⟩_∂T    for all τ ∈ RT_k(T),
//! ```
//!
//! which is a small Gram solve per element.
//!
//! All local polynomials are written in the scaled coordinates
//! `ξ = (x − x_c)/s`, `η = (y − y_c)/s` where `(x_c, y_c)` is the centroid and
//! `s` the element diameter. The spanned spaces are the usual ones; only the
//! conditioning of the local systems changes.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{Mesh, Point};
use crate::quadrature::{EdgeRule, TriangleRule};
use crate::C64;

#[derive(Debug, Error, PartialEq)]
pub enum WgError {
    #[error("unsupported element degree {0} (only 0 and 1 are implemented)")]
    UnsupportedDegree(usize),
    #[error("degenerate triangle: area {area:e} with diameter {diameter:e}")]
    Degenerate { area: f64, diameter: f64 },
    #[error("Raviart-Thomas Gram matrix is not positive definite")]
    SingularGram,
    #[error("coefficient vector has length {got}, DofMap expects {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("DofMap was built for {map_triangles} triangles / {map_edges} edges, mesh has {mesh_triangles} / {mesh_edges}")]
    DofMapMismatch { map_triangles: usize, map_edges: usize, mesh_triangles: usize, mesh_edges: usize },
}

/// Polynomial degree `k` of the WG element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub enum Degree {
    Zero,
    One,
}

impl TryFrom<usize> for Degree {
    type Error = WgError;
    fn try_from(k: usize) -> Result<Self, WgError> {
        match k {
            0 => Ok(Degree::Zero),
            1 => Ok(Degree::One),
            k => Err(WgError::UnsupportedDegree(k)),
        }
    }
}

impl From<Degree> for usize {
    fn from(d: Degree) -> usize {
        d.k()
    }
}

impl Degree {
    pub fn k(self) -> usize {
        match self {
            Degree::Zero => 0,
            Degree::One => 1,
        }
    }

    /// dim P_k(T)
    pub fn interior_dim(self) -> usize {
        let k = self.k();
        (k + 1) * (k + 2) / 2
    }

    /// dim P_k(e)
    pub fn edge_dim(self) -> usize {
        self.k() + 1
    }

    /// dim RT_k(T) = (k+1)(k+3)
    pub fn rt_dim(self) -> usize {
        let k = self.k();
        (k + 1) * (k + 3)
    }

    pub fn local_dim(self) -> usize {
        self.interior_dim() + 3 * self.edge_dim()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EdgeGeometry {
    /// Endpoint with the lower global vertex index.
    pub start: Point,
    pub end: Point,
    pub length: f64,
    /// Unit normal pointing out of the owning triangle.
    pub normal: [f64; 2],
}

impl EdgeGeometry {
    /// Point at parameter `t ∈ [-1, 1]`, running from `start` to `end`.
    pub fn point(&self, t: f64) -> Point {
        let a = 0.5 * (1.0 - t);
        let b = 0.5 * (1.0 + t);
        [a * self.start[0] + b * self.end[0], a * self.start[1] + b * self.end[1]]
    }
}

#[derive(Debug, Clone)]
pub struct TriangleGeometry {
    pub vertices: [Point; 3],
    pub centroid: Point,
    pub area: f64,
    pub diameter: f64,
    /// Local edge `i` is opposite vertex `i`.
    pub edges: [EdgeGeometry; 3],
}

impl TriangleGeometry {
    /// `ids` are the global vertex indices; they fix the orientation of each
    /// edge parametrization so neighbours agree on shared edges.
    pub fn new(vertices: [Point; 3], ids: [usize; 3]) -> Result<Self, WgError> {
        let [a, b, c] = vertices;
        let area = crate::mesh::signed_area(a, b, c);
        let len = |p: Point, q: Point| (q[0] - p[0]).hypot(q[1] - p[1]);
        let diameter = len(a, b).max(len(b, c)).max(len(c, a));
        if !(area > 1e-14 * diameter * diameter) {
            return Err(WgError::Degenerate { area, diameter });
        }
        let centroid = [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0];
        let edges = std::array::from_fn(|i| {
            let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
            let (p, q) = (vertices[i1], vertices[i2]);
            let length = len(p, q);
            // CCW traversal p -> q: outward normal is the tangent turned clockwise.
            let normal = [(q[1] - p[1]) / length, -(q[0] - p[0]) / length];
            let (start, end) = if ids[i1] < ids[i2] { (p, q) } else { (q, p) };
            EdgeGeometry { start, end, length, normal }
        });
        Ok(TriangleGeometry { vertices, centroid, area, diameter, edges })
    }

    pub fn from_mesh(mesh: &Mesh, t: usize) -> Result<Self, WgError> {
        TriangleGeometry::new(mesh.triangle_points(t), mesh.triangles()[t])
    }

    /// Scaled local coordinates (ξ, η).
    pub fn local(&self, p: Point) -> [f64; 2] {
        [(p[0] - self.centroid[0]) / self.diameter, (p[1] - self.centroid[1]) / self.diameter]
    }

    /// Maps reference-triangle coordinates to physical space.
    pub fn map(&self, r: Point) -> Point {
        let [a, b, c] = self.vertices;
        [
            a[0] + r[0] * (b[0] - a[0]) + r[1] * (c[0] - a[0]),
            a[1] + r[0] * (b[1] - a[1]) + r[1] * (c[1] - a[1]),
        ]
    }

    /// Physical quadrature points and weights for a reference rule.
    pub fn quadrature<'a>(&'a self, rule: &'a TriangleRule) -> impl Iterator<Item = (Point, f64)> + 'a {
        let jac = 2.0 * self.area;
        rule.points.iter().zip(&rule.weights).map(move |(&r, &w)| (self.map(r), w * jac))
    }

    /// Values of the interior basis of P_k(T) at `p`: `1` or `1, ξ, η`.
    pub fn interior_basis(&self, degree: Degree, p: Point) -> [f64; 3] {
        match degree {
            Degree::Zero => [1.0, 0.0, 0.0],
            Degree::One => {
                let [xi, eta] = self.local(p);
                [1.0, xi, eta]
            }
        }
    }

    /// Evaluates an interior polynomial with the given coefficients.
    pub fn eval_interior(&self, degree: Degree, coeffs: &[C64], p: Point) -> C64 {
        let phi = self.interior_basis(degree, p);
        coeffs.iter().zip(phi).map(|(&c, v)| c * v).sum()
    }

    /// Interior mass matrix (φ_m, φ_n)_T.
    pub fn interior_mass(&self, degree: Degree) -> DMatrix<f64> {
        let n = degree.interior_dim();
        let rule = TriangleRule::new(2 * degree.k()).expect("low degree");
        let mut m = DMatrix::zeros(n, n);
        for (p, w) in self.quadrature(&rule) {
            let phi = self.interior_basis(degree, p);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += w * phi[i] * phi[j];
                }
            }
        }
        m
    }
}

/// Basis of P_k(e) at parameter `t ∈ [-1, 1]`: `1` for k = 0, `1, t` for
/// k = 1. The parameter runs from the lower-indexed endpoint to the higher.
pub fn edge_basis(degree: Degree, t: f64) -> [f64; 2] {
    match degree {
        Degree::Zero => [1.0, 0.0],
        Degree::One => [1.0, t],
    }
}

/// Diagonal of the edge mass matrix ⟨ψ_m, ψ_n⟩_e divided by |e|.
pub fn edge_mass_diagonal(degree: Degree) -> [f64; 2] {
    match degree {
        Degree::Zero => [1.0, 0.0],
        Degree::One => [1.0, 1.0 / 3.0],
    }
}

/// Evaluates an edge polynomial at parameter `t`.
pub fn eval_edge(degree: Degree, coeffs: &[C64], t: f64) -> C64 {
    let psi = edge_basis(degree, t);
    coeffs.iter().zip(psi).map(|(&c, v)| c * v).sum()
}

/// L² projection of `f` onto P_k(T); `rule` is a reference-triangle rule.
pub fn project_interior<F: Fn(Point) -> C64>(geom: &TriangleGeometry, degree: Degree, rule: &TriangleRule, f: F) -> [C64; 3] {
    let n = degree.interior_dim();
    let mut moments = [C64::new(0.0, 0.0); 3];
    for (p, w) in geom.quadrature(rule) {
        let v = f(p) * w;
        let phi = geom.interior_basis(degree, p);
        for m in 0..n {
            moments[m] += v * phi[m];
        }
    }
    match degree {
        Degree::Zero => [moments[0] / geom.area, moments[1], moments[2]],
        Degree::One => {
            let inv = geom.interior_mass(degree).cholesky().expect("interior mass is SPD").inverse();
            std::array::from_fn(|i| (0..3).map(|j| moments[j] * inv[(i, j)]).sum())
        }
    }
}

/// L² projection of `f` onto P_k(e) for the segment `start → end`.
pub fn project_edge<F: Fn(Point) -> C64>(degree: Degree, start: Point, end: Point, rule: &EdgeRule, f: F) -> [C64; 2] {
    let edge = EdgeGeometry { start, end, length: 0.0, normal: [0.0; 2] };
    let (mut c0, mut c1) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for (&t, &w) in rule.points.iter().zip(&rule.weights) {
        let v = f(edge.point(t)) * w;
        c0 += v;
        c1 += v * t;
    }
    // ∫ 1 dt = 2 and ∫ t² dt = 2/3 on [-1, 1].
    match degree {
        Degree::Zero => [c0 * 0.5, C64::new(0.0, 0.0)],
        Degree::One => [c0 * 0.5, c1 * 1.5],
    }
}

/// Raviart–Thomas basis on one triangle in scaled local coordinates.
///
/// k = 0: `(1,0), (0,1), (ξ,η)`.
/// k = 1: `(1,0), (ξ,0), (η,0), (0,1), (0,ξ), (0,η), ξ(ξ,η), η(ξ,η)`.
#[derive(Debug, Clone)]
pub struct RtBasis {
    pub degree: Degree,
    pub centroid: Point,
    /// Length scale `s` of the local coordinates.
    pub scale: f64,
}

impl RtBasis {
    pub fn dim(&self) -> usize {
        self.degree.rt_dim()
    }

    /// Values of every basis field at a physical point.
    pub fn values(&self, p: Point) -> [[f64; 2]; 8] {
        let xi = (p[0] - self.centroid[0]) / self.scale;
        let eta = (p[1] - self.centroid[1]) / self.scale;
        let mut v = [[0.0; 2]; 8];
        match self.degree {
            Degree::Zero => {
                v[0] = [1.0, 0.0];
                v[1] = [0.0, 1.0];
                v[2] = [xi, eta];
            }
            Degree::One => {
                v[0] = [1.0, 0.0];
                v[1] = [xi, 0.0];
                v[2] = [eta, 0.0];
                v[3] = [0.0, 1.0];
                v[4] = [0.0, xi];
                v[5] = [0.0, eta];
                v[6] = [xi * xi, xi * eta];
                v[7] = [xi * eta, eta * eta];
            }
        }
        v
    }

    /// Divergences (with respect to physical x, y) at a physical point.
    pub fn divergences(&self, p: Point) -> [f64; 8] {
        let inv = 1.0 / self.scale;
        let mut d = [0.0; 8];
        match self.degree {
            Degree::Zero => d[2] = 2.0 * inv,
            Degree::One => {
                let xi = (p[0] - self.centroid[0]) * inv;
                let eta = (p[1] - self.centroid[1]) * inv;
                d[1] = inv;
                d[5] = inv;
                d[6] = 3.0 * xi * inv;
                d[7] = 3.0 * eta * inv;
            }
        }
        d
    }

    /// Evaluates `Σ c_i θ_i` at `p`.
    pub fn eval(&self, coeffs: &[C64], p: Point) -> [C64; 2] {
        let v = self.values(p);
        let mut out = [C64::new(0.0, 0.0); 2];
        for (c, th) in coeffs.iter().zip(v.iter()) {
            out[0] += c * th[0];
            out[1] += c * th[1];
        }
        out
    }
}

pub fn rt_basis(geom: &TriangleGeometry, degree: Degree) -> RtBasis {
    RtBasis { degree, centroid: geom.centroid, scale: geom.diameter }
}

/// Per-element weak-gradient operator `G = M⁻¹ B`.
///
/// Local DOF order: interior coefficients, then edge 0, edge 1, edge 2
/// (each `edge_dim` long). Column `j` of `matrix` holds the RT coefficients
/// of the weak gradient of the `j`-th local basis function.
#[derive(Debug, Clone)]
pub struct ElementWeakGradient {
    pub basis: RtBasis,
    /// RT Gram matrix (θ_i, θ_j)_T.
    pub gram: DMatrix<f64>,
    /// Right-hand sides −(φ, ∇·θ_i)_T + ⟨ψ, θ_i·n⟩_∂T.
    pub rhs: DMatrix<f64>,
    pub matrix: DMatrix<f64>,
}

impl ElementWeakGradient {
    pub fn new(geom: &TriangleGeometry, degree: Degree) -> Result<Self, WgError> {
        let basis = rt_basis(geom, degree);
        let k = degree.k();
        let nrt = degree.rt_dim();
        let n0 = degree.interior_dim();
        let ne = degree.edge_dim();
        let nloc = degree.local_dim();

        let tri_rule = TriangleRule::new(2 * k + 2).expect("low degree");
        let edge_rule = EdgeRule::new(2 * k + 1).expect("low degree");

        let mut gram = DMatrix::zeros(nrt, nrt);
        let mut rhs = DMatrix::zeros(nrt, nloc);
        for (p, w) in geom.quadrature(&tri_rule) {
            let th = basis.values(p);
            let div = basis.divergences(p);
            let phi = geom.interior_basis(degree, p);
            for i in 0..nrt {
                for j in i..nrt {
                    gram[(i, j)] += w * (th[i][0] * th[j][0] + th[i][1] * th[j][1]);
                }
                for m in 0..n0 {
                    rhs[(i, m)] -= w * phi[m] * div[i];
                }
            }
        }
        for i in 0..nrt {
            for j in 0..i {
                gram[(i, j)] = gram[(j, i)];
            }
        }
        for (le, edge) in geom.edges.iter().enumerate() {
            let half = 0.5 * edge.length;
            for (&t, &w) in edge_rule.points.iter().zip(&edge_rule.weights) {
                let p = edge.point(t);
                let th = basis.values(p);
                let psi = edge_basis(degree, t);
                for i in 0..nrt {
                    let flux = th[i][0] * edge.normal[0] + th[i][1] * edge.normal[1];
                    for m in 0..ne {
                        rhs[(i, n0 + le * ne + m)] += w * half * psi[m] * flux;
                    }
                }
            }
        }
        let chol = gram.clone().cholesky().ok_or(WgError::SingularGram)?;
        let matrix = chol.solve(&rhs);
        Ok(ElementWeakGradient { basis, gram, rhs, matrix })
    }

    /// RT coefficients of the weak gradient of a local coefficient vector.
    pub fn apply(&self, local: &[C64]) -> Vec<C64> {
        (0..self.matrix.nrows())
            .map(|i| (0..self.matrix.ncols()).map(|j| local[j] * self.matrix[(i, j)]).sum())
            .collect()
    }

    /// Squared L² norm of the RT field with coefficients `c`: `c̄ᵀ M c`.
    pub fn norm_sq(&self, c: &[C64]) -> f64 {
        let n = c.len();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.gram[(i, j)] * (c[i].conj() * c[j]).re;
            }
        }
        s
    }
}

/// Weak-gradient matrix of one triangle.
pub fn weak_gradient_matrix(geom: &TriangleGeometry, degree: Degree) -> Result<ElementWeakGradient, WgError> {
    ElementWeakGradient::new(geom, degree)
}

/// Global numbering: all interior blocks (triangle order), then all edge
/// blocks (edge order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    degree: Degree,
    n_triangles: usize,
    n_edges: usize,
}

impl DofMap {
    pub fn new(mesh: &Mesh, degree: Degree) -> Self {
        DofMap { degree, n_triangles: mesh.num_triangles(), n_edges: mesh.num_edges() }
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn n_triangles(&self) -> usize {
        self.n_triangles
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn n_interior(&self) -> usize {
        self.n_triangles * self.degree.interior_dim()
    }

    pub fn n_total(&self) -> usize {
        self.n_interior() + self.n_edges * self.degree.edge_dim()
    }

    pub fn interior_offset(&self, t: usize) -> usize {
        t * self.degree.interior_dim()
    }

    pub fn edge_offset(&self, e: usize) -> usize {
        self.n_interior() + e * self.degree.edge_dim()
    }

    /// Whether a global index belongs to an edge block.
    pub fn is_edge_dof(&self, i: usize) -> bool {
        i >= self.n_interior()
    }

    /// Edge owning an edge DOF.
    pub fn edge_of(&self, i: usize) -> Option<usize> {
        self.is_edge_dof(i).then(|| (i - self.n_interior()) / self.degree.edge_dim())
    }

    /// Global indices of triangle `t`'s local DOFs in local order.
    pub fn local_dofs(&self, mesh: &Mesh, t: usize) -> Vec<usize> {
        let n0 = self.degree.interior_dim();
        let ne = self.degree.edge_dim();
        let mut out = Vec::with_capacity(self.degree.local_dim());
        out.extend(self.interior_offset(t)..self.interior_offset(t) + n0);
        for &e in &mesh.triangle_edges()[t] {
            out.extend(self.edge_offset(e)..self.edge_offset(e) + ne);
        }
        out
    }

    pub fn check(&self, mesh: &Mesh) -> Result<(), WgError> {
        if self.n_triangles != mesh.num_triangles() || self.n_edges != mesh.num_edges() {
            return Err(WgError::DofMapMismatch {
                map_triangles: self.n_triangles,
                map_edges: self.n_edges,
                mesh_triangles: mesh.num_triangles(),
                mesh_edges: mesh.num_edges(),
            });
        }
        Ok(())
    }
}

pub fn dof_map(mesh: &Mesh, degree: Degree) -> DofMap {
    DofMap::new(mesh, degree)
}

/// Coefficients of a WG function `v = {v₀, v_b}` under a [`DofMap`].
#[derive(Debug, Clone, PartialEq)]
pub struct WgFunction {
    pub coefficients: Vec<C64>,
}

impl WgFunction {
    pub fn zeros(dm: &DofMap) -> Self {
        WgFunction { coefficients: vec![C64::new(0.0, 0.0); dm.n_total()] }
    }

    pub fn from_vec(dm: &DofMap, coefficients: Vec<C64>) -> Result<Self, WgError> {
        if coefficients.len() != dm.n_total() {
            return Err(WgError::LengthMismatch { expected: dm.n_total(), got: coefficients.len() });
        }
        Ok(WgFunction { coefficients })
    }

    pub fn interior<'a>(&'a self, dm: &DofMap, t: usize) -> &'a [C64] {
        let o = dm.interior_offset(t);
        &self.coefficients[o..o + dm.degree().interior_dim()]
    }

    pub fn edge<'a>(&'a self, dm: &DofMap, e: usize) -> &'a [C64] {
        let o = dm.edge_offset(e);
        &self.coefficients[o..o + dm.degree().edge_dim()]
    }

    /// Local coefficient vector of triangle `t` in local DOF order.
    pub fn local(&self, dm: &DofMap, mesh: &Mesh, t: usize) -> Vec<C64> {
        dm.local_dofs(mesh, t).into_iter().map(|i| self.coefficients[i]).collect()
    }
}
