//! Conforming triangular meshes for the three benchmark domains.
//!
//! A [`Mesh`] stores counter-clockwise triangles, a deduplicated edge list
//! with left/right triangle adjacency, and the mesh size `h` (longest edge).
//! Edges are stored with the lower vertex index first; both adjacent
//! triangles see the same orientation, which fixes the parametrization of
//! edge degrees of freedom.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use thiserror::Error;

pub type Point = [f64; 2];

/// Default bound on circumradius / inradius used by [`Mesh::validate`].
pub const DEFAULT_SHAPE_BOUND: f64 = 10.0;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("invalid mesh parameter: {0}")]
    InvalidParameter(String),
    #[error("vertex index {index} out of range in triangle {triangle}")]
    VertexOutOfRange { triangle: usize, index: usize },
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("mesh file parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Endpoints, lower index first.
    pub vertices: [usize; 2],
    pub left: usize,
    /// `None` on the domain boundary.
    pub right: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    /// `triangle_edges[t][i]` is the edge opposite local vertex `i`.
    triangle_edges: Vec<[usize; 3]>,
    h: f64,
}

/// A single invariant violation found by [`Mesh::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Orientation { triangle: usize, signed_area: f64 },
    VertexOutOfRange { triangle: usize },
    NonCanonicalEdge { edge: usize },
    EdgeAdjacency { edge: usize, detail: String },
    MissingEdge { triangle: usize, local: usize },
    DuplicateEdge { edge: usize },
    Euler { vertices: usize, edges: usize, triangles: usize },
    ShapeRegularity { triangle: usize, ratio: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Orientation { triangle, signed_area } => {
                write!(f, "triangle {triangle} has non-positive signed area {signed_area:e}")
            }
            Violation::VertexOutOfRange { triangle } => {
                write!(f, "triangle {triangle} references a missing vertex")
            }
            Violation::NonCanonicalEdge { edge } => {
                write!(f, "edge {edge} is not stored lower-index first")
            }
            Violation::EdgeAdjacency { edge, detail } => write!(f, "edge {edge}: {detail}"),
            Violation::MissingEdge { triangle, local } => {
                write!(f, "local edge {local} of triangle {triangle} is not in the edge list")
            }
            Violation::DuplicateEdge { edge } => write!(f, "edge {edge} is listed twice"),
            Violation::Euler { vertices, edges, triangles } => write!(
                f,
                "Euler relation V - E + F = 1 fails: {vertices} - {edges} + {triangles}"
            ),
            Violation::ShapeRegularity { triangle, ratio } => {
                write!(f, "triangle {triangle} has circumradius/inradius ratio {ratio:.3}")
            }
        }
    }
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dist(a: Point, b: Point) -> f64 {
    let d = sub(a, b);
    d[0].hypot(d[1])
}

/// Signed area, positive for counter-clockwise vertex order.
pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    let u = sub(b, a);
    let v = sub(c, a);
    0.5 * (u[0] * v[1] - u[1] * v[0])
}

/// Circumradius over inradius; 2 for an equilateral triangle.
pub fn shape_ratio(a: Point, b: Point, c: Point) -> f64 {
    let la = dist(b, c);
    let lb = dist(c, a);
    let lc = dist(a, b);
    let area = signed_area(a, b, c).abs();
    if area == 0.0 {
        return f64::INFINITY;
    }
    let s = 0.5 * (la + lb + lc);
    let circumradius = la * lb * lc / (4.0 * area);
    let inradius = area / s;
    circumradius / inradius
}

/// Builds the edge list from triangle connectivity.
fn build_edges(
    n_vertices: usize,
    triangles: &[[usize; 3]],
) -> Result<(Vec<Edge>, Vec<[usize; 3]>), MeshError> {
    let mut lookup: HashMap<(usize, usize), usize> = HashMap::with_capacity(triangles.len() * 2);
    let mut edges: Vec<Edge> = Vec::with_capacity(triangles.len() * 3 / 2 + 8);
    let mut triangle_edges = Vec::with_capacity(triangles.len());
    for (t, tri) in triangles.iter().enumerate() {
        let mut local = [0usize; 3];
        for i in 0..3 {
            if tri[i] >= n_vertices {
                return Err(MeshError::VertexOutOfRange { triangle: t, index: tri[i] });
            }
            let a = tri[(i + 1) % 3];
            let b = tri[(i + 2) % 3];
            let key = (a.min(b), a.max(b));
            let id = match lookup.get(&key) {
                Some(&id) => {
                    let e = &mut edges[id];
                    if e.right.is_some() {
                        return Err(MeshError::NonManifoldEdge(key.0, key.1));
                    }
                    e.right = Some(t);
                    id
                }
                None => {
                    let id = edges.len();
                    edges.push(Edge { vertices: [key.0, key.1], left: t, right: None });
                    lookup.insert(key, id);
                    id
                }
            };
            local[i] = id;
        }
        triangle_edges.push(local);
    }
    Ok((edges, triangle_edges))
}

impl Mesh {
    /// Builds a mesh from vertices and CCW triangles, deriving edges and `h`.
    pub fn from_triangles(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let (edges, triangle_edges) = build_edges(vertices.len(), &triangles)?;
        let mut mesh = Mesh { vertices, triangles, edges, triangle_edges, h: 0.0 };
        mesh.h = mesh.max_edge_length();
        Ok(mesh)
    }

    /// Assembles a mesh from raw parts without any consistency checks.
    ///
    /// Intended for importing externally built meshes and for exercising
    /// [`Mesh::validate`]; local edges that cannot be matched are recorded
    /// as `usize::MAX`.
    pub fn from_parts(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, edges: Vec<Edge>) -> Self {
        let lookup: HashMap<(usize, usize), usize> = edges
            .iter()
            .enumerate()
            .map(|(i, e)| ((e.vertices[0].min(e.vertices[1]), e.vertices[0].max(e.vertices[1])), i))
            .collect();
        let triangle_edges = triangles
            .iter()
            .map(|tri| {
                let mut local = [usize::MAX; 3];
                for (i, slot) in local.iter_mut().enumerate() {
                    let a = tri[(i + 1) % 3];
                    let b = tri[(i + 2) % 3];
                    if let Some(&id) = lookup.get(&(a.min(b), a.max(b))) {
                        *slot = id;
                    }
                }
                local
            })
            .collect();
        let mut mesh = Mesh { vertices, triangles, edges, triangle_edges, h: 0.0 };
        mesh.h = mesh.max_edge_length();
        mesh
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.triangle_edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_boundary_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.is_boundary()).count()
    }

    /// Mesh size: the longest triangle edge.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area(a, b, c)
    }

    pub fn area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e].vertices;
        dist(self.vertices[a], self.vertices[b])
    }

    fn max_edge_length(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|tri| {
                (0..3).map(move |i| (tri[i], tri[(i + 1) % 3]))
            })
            .filter(|&(a, b)| a < self.vertices.len() && b < self.vertices.len())
            .map(|(a, b)| dist(self.vertices[a], self.vertices[b]))
            .fold(0.0, f64::max)
    }

    /// Largest circumradius/inradius ratio over all triangles.
    pub fn max_shape_ratio(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| {
                let [a, b, c] = self.triangle_points(t);
                shape_ratio(a, b, c)
            })
            .fold(0.0, f64::max)
    }

    /// Checks every structural invariant with the default shape bound.
    pub fn validate(&self) -> Vec<Violation> {
        self.validate_with(DEFAULT_SHAPE_BOUND)
    }

    pub fn validate_with(&self, shape_bound: f64) -> Vec<Violation> {
        let mut out = Vec::new();
        let nv = self.vertices.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                out.push(Violation::VertexOutOfRange { triangle: t });
                continue;
            }
            let [a, b, c] = self.triangle_points(t);
            let area = signed_area(a, b, c);
            if area <= 0.0 {
                out.push(Violation::Orientation { triangle: t, signed_area: area });
            }
            let ratio = shape_ratio(a, b, c);
            if ratio > shape_bound {
                out.push(Violation::ShapeRegularity { triangle: t, ratio });
            }
        }

        // Expected incidences rebuilt from triangle connectivity.
        let mut incidence: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for i in 0..3 {
                let a = tri[(i + 1) % 3];
                let b = tri[(i + 2) % 3];
                incidence.entry((a.min(b), a.max(b))).or_default().push(t);
            }
        }
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for (id, e) in self.edges.iter().enumerate() {
            let [a, b] = e.vertices;
            if a >= b {
                out.push(Violation::NonCanonicalEdge { edge: id });
            }
            let key = (a.min(b), a.max(b));
            if seen.insert(key, id).is_some() {
                out.push(Violation::DuplicateEdge { edge: id });
            }
            let mut stored: Vec<usize> = std::iter::once(e.left).chain(e.right).collect();
            stored.sort_unstable();
            match incidence.get(&key) {
                None => out.push(Violation::EdgeAdjacency {
                    edge: id,
                    detail: "dangling edge: no triangle uses it".into(),
                }),
                Some(tris) => {
                    let mut expected = tris.clone();
                    expected.sort_unstable();
                    if expected.len() > 2 {
                        out.push(Violation::EdgeAdjacency {
                            edge: id,
                            detail: format!("{} adjacent triangles", expected.len()),
                        });
                    } else if expected != stored {
                        out.push(Violation::EdgeAdjacency {
                            edge: id,
                            detail: format!("stored adjacency {stored:?}, actual {expected:?}"),
                        });
                    }
                }
            }
        }
        for (t, local) in self.triangle_edges.iter().enumerate() {
            for (i, &id) in local.iter().enumerate() {
                if id == usize::MAX {
                    out.push(Violation::MissingEdge { triangle: t, local: i });
                }
            }
        }
        if nv + self.triangles.len() != self.edges.len() + 1 {
            out.push(Violation::Euler {
                vertices: nv,
                edges: self.edges.len(),
                triangles: self.triangles.len(),
            });
        }
        out
    }

    /// Splits every triangle into four through its edge midpoints.
    ///
    /// Midpoints of boundary edges stay on the chord.
    pub fn refine_uniform(&self) -> Mesh {
        let nv = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend(self.edges.iter().map(|e| {
            let [a, b] = e.vertices;
            let (p, q) = (self.vertices[a], self.vertices[b]);
            [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
        }));
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for (tri, local) in self.triangles.iter().zip(&self.triangle_edges) {
            let [a, b, c] = *tri;
            // Midpoint opposite vertex i lives on local edge i.
            let m_bc = nv + local[0];
            let m_ca = nv + local[1];
            let m_ab = nv + local[2];
            triangles.push([a, m_ab, m_ca]);
            triangles.push([m_ab, b, m_bc]);
            triangles.push([m_ca, m_bc, c]);
            triangles.push([m_ab, m_bc, m_ca]);
        }
        Mesh::from_triangles(vertices, triangles).expect("refinement of a valid mesh is valid")
    }

    /// Applies [`Mesh::refine_uniform`] `levels` times.
    pub fn refined(&self, levels: usize) -> Mesh {
        let mut m = self.clone();
        for _ in 0..levels {
            m = m.refine_uniform();
        }
        m
    }

    /// Writes the plain-text mesh format: vertex count, coordinates,
    /// triangle count, zero-based index triples.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.vertices.len())?;
        for p in &self.vertices {
            writeln!(w, "{:.16e} {:.16e}", p[0], p[1])?;
        }
        writeln!(w, "{}", self.triangles.len())?;
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Mesh, MeshError> {
        let mut lines = r
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));
        let mut next = |what: &str| -> Result<(usize, String), MeshError> {
            match lines.next() {
                Some((n, Ok(s))) => Ok((n, s)),
                Some((_, Err(e))) => Err(e.into()),
                None => Err(MeshError::Parse { line: 0, msg: format!("unexpected end of file, expected {what}") }),
            }
        };
        let parse_count = |(n, s): (usize, String)| -> Result<usize, MeshError> {
            s.trim().parse().map_err(|_| MeshError::Parse { line: n, msg: format!("bad count {s:?}") })
        };
        let nv = parse_count(next("vertex count")?)?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (n, s) = next("vertex")?;
            let v: Vec<f64> = s
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| MeshError::Parse { line: n, msg: "bad coordinate".into() })?;
            if v.len() != 2 {
                return Err(MeshError::Parse { line: n, msg: "expected two coordinates".into() });
            }
            vertices.push([v[0], v[1]]);
        }
        let nt = parse_count(next("triangle count")?)?;
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (n, s) = next("triangle")?;
            let v: Vec<usize> = s
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| MeshError::Parse { line: n, msg: "bad vertex index".into() })?;
            if v.len() != 3 {
                return Err(MeshError::Parse { line: n, msg: "expected three indices".into() });
            }
            triangles.push([v[0], v[1], v[2]]);
        }
        Mesh::from_triangles(vertices, triangles)
    }

    pub fn save(&self, path: &Path) -> Result<(), MeshError> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_text(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Mesh, MeshError> {
        let f = std::fs::File::open(path)?;
        Mesh::read_text(std::io::BufReader::new(f))
    }
}

/// Builds the hexagonal lattice triangulation with `n` layers, placing each
/// lattice vertex through `place(sector, a, b)`: the point sits in sector
/// `sector` at `a` steps along the sector's first corner direction and `b`
/// along the second.
fn hex_lattice<F>(n: usize, place: F) -> Result<Mesh, MeshError>
where
    F: Fn(usize, usize, usize) -> Point,
{
    // Integer lattice coordinates of the six corners in the basis (c0, c1).
    const CORNERS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
    let mut index: HashMap<(i64, i64), usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut triangles = Vec::with_capacity(6 * n * n);
    for s in 0..6 {
        let (c0, c1) = (CORNERS[s], CORNERS[(s + 1) % 6]);
        let mut id = |a: usize, b: usize| -> usize {
            let key = (
                a as i64 * c0.0 + b as i64 * c1.0,
                a as i64 * c0.1 + b as i64 * c1.1,
            );
            *index.entry(key).or_insert_with(|| {
                vertices.push(place(s, a, b));
                vertices.len() - 1
            })
        };
        for a in 0..n {
            for b in 0..(n - a) {
                let p = id(a, b);
                let q = id(a + 1, b);
                let r = id(a, b + 1);
                triangles.push([p, q, r]);
                if a + b + 1 < n {
                    let s2 = id(a + 1, b + 1);
                    triangles.push([q, s2, r]);
                }
            }
        }
    }
    Mesh::from_triangles(vertices, triangles)
}

/// Angle of the first hexagon corner; corners sit at 30° + 60°·j so that
/// the line y = 0 crosses element interiors.
const HEX_PHASE: f64 = PI / 6.0;

/// Unit regular hexagon centred at the origin, split into six equilateral
/// macro-triangles each subdivided into `n²` congruent triangles.
pub fn hexagon_mesh(n: usize) -> Result<Mesh, MeshError> {
    if n == 0 {
        return Err(MeshError::InvalidParameter("hexagon_mesh requires N >= 1".into()));
    }
    let corners: Vec<Point> = (0..6)
        .map(|j| {
            let t = HEX_PHASE + j as f64 * PI / 3.0;
            [t.cos(), t.sin()]
        })
        .collect();
    // Lattice vertices are a*c0 + b*c1 in the basis of the first two corners
    // so that shared points get bit-identical coordinates.
    let (c0, c1) = (corners[0], corners[1]);
    const CORNERS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
    let inv = 1.0 / n as f64;
    let mut mesh = hex_lattice(n, |s, a, b| {
        let (u0, u1) = (CORNERS[s], CORNERS[(s + 1) % 6]);
        let i = (a as i64 * u0.0 + b as i64 * u1.0) as f64;
        let j = (a as i64 * u0.1 + b as i64 * u1.1) as f64;
        [(i * c0[0] + j * c1[0]) * inv, (i * c0[1] + j * c1[1]) * inv]
    })?;
    // All elements are congruent with side 1/N.
    mesh.h = inv;
    Ok(mesh)
}

/// Polygonal disk of radius `radius`: ring `i` carries `6i` equally spaced
/// vertices at radius `i·radius/rings`, with a six-triangle fan at the centre.
pub fn disk_mesh(radius: f64, rings: usize) -> Result<Mesh, MeshError> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(MeshError::InvalidParameter(format!("disk radius must be positive, got {radius}")));
    }
    if rings == 0 {
        return Err(MeshError::InvalidParameter("disk_mesh requires rings >= 1".into()));
    }
    hex_lattice(rings, |s, a, b| {
        let ring = a + b;
        if ring == 0 {
            return [0.0, 0.0];
        }
        let r = radius * ring as f64 / rings as f64;
        let t = HEX_PHASE + (s as f64 + b as f64 / ring as f64) * PI / 3.0;
        [r * t.cos(), r * t.sin()]
    })
}

/// Default half-angle of the wedge removed around the negative x-axis.
pub const DEFAULT_NOTCH_HALF_ANGLE: f64 = PI / 60.0;

/// Unit disk with the wedge `|θ − π| < notch_half_angle` removed.
///
/// Layer `i` (between radii `(i−1)/rings` and `i/rings`) carries
/// `2·i·sectors` angular cells on its outer circle, so the mesh has
/// `2·sectors·rings²` triangles and is symmetric under `y ↦ −y`.
pub fn slit_disk_mesh(rings: usize, sectors: usize, notch_half_angle: f64) -> Result<Mesh, MeshError> {
    if rings == 0 || sectors == 0 {
        return Err(MeshError::InvalidParameter("slit_disk_mesh requires rings, sectors >= 1".into()));
    }
    if !(notch_half_angle > 0.0 && notch_half_angle < PI / 2.0) {
        return Err(MeshError::InvalidParameter(format!(
            "notch half-angle must lie in (0, pi/2), got {notch_half_angle}"
        )));
    }
    let opening = PI - notch_half_angle;
    // Innermost fan cells must stay below a right angle at the tip.
    if opening / sectors as f64 >= PI / 2.0 {
        return Err(MeshError::InvalidParameter(format!(
            "{sectors} sector(s) per half cannot resolve the domain around the notch"
        )));
    }
    let mut vertices: Vec<Point> = vec![[0.0, 0.0]];
    // ring_start[i] = index of the first vertex on circle i (i >= 1).
    let mut ring_start = vec![0usize; rings + 1];
    for i in 1..=rings {
        ring_start[i] = vertices.len();
        let cells = 2 * i * sectors;
        let r = i as f64 / rings as f64;
        for j in 0..=cells {
            // Symmetric spacing: angle of j and cells - j are exact negatives.
            let t = if 2 * j == cells {
                0.0
            } else if 2 * j < cells {
                -opening * (cells - 2 * j) as f64 / cells as f64
            } else {
                opening * (2 * j - cells) as f64 / cells as f64
            };
            vertices.push([r * t.cos(), r * t.sin()]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * sectors * rings * rings);
    // Triangulate the lower half (θ ≤ 0) and mirror it, so the connectivity
    // is exactly symmetric about the x-axis.
    for i in 1..=rings {
        let outer = 2 * i * sectors;
        let mirror_outer = |j: usize| ring_start[i] + outer - (j - ring_start[i]);
        let mut half: Vec<[usize; 3]> = Vec::new();
        if i == 1 {
            for j in 0..sectors {
                half.push([0, ring_start[1] + j, ring_start[1] + j + 1]);
            }
        } else {
            let inner = 2 * (i - 1) * sectors;
            let (p_end, q_end) = (inner / 2, outer / 2);
            let (mut p, mut q) = (0usize, 0usize);
            while p < p_end || q < q_end {
                let advance_outer = if p == p_end {
                    true
                } else if q == q_end {
                    false
                } else {
                    // Fractions of the half-opening reached by the next point.
                    (q + 1) as f64 / q_end as f64 <= (p + 1) as f64 / p_end as f64
                };
                let a = ring_start[i - 1] + p;
                let b = ring_start[i] + q;
                if advance_outer {
                    half.push([a, b, b + 1]);
                    q += 1;
                } else {
                    half.push([a, b, a + 1]);
                    p += 1;
                }
            }
        }
        let inner_cells = 2 * (i - 1) * sectors;
        let mirror = |v: usize| -> usize {
            if v == 0 {
                0
            } else if v >= ring_start[i] {
                mirror_outer(v)
            } else {
                let s0 = ring_start[i - 1];
                s0 + inner_cells - (v - s0)
            }
        };
        let mirrored: Vec<[usize; 3]> = half.iter().map(|t| [mirror(t[0]), mirror(t[2]), mirror(t[1])]).collect();
        triangles.extend(half);
        triangles.extend(mirrored);
    }
    Mesh::from_triangles(vertices, triangles)
}
