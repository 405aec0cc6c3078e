//! Quadrature on the reference triangle and on the interval [-1, 1].
//!
//! Triangle rules live on the reference triangle (0,0), (1,0), (0,1) with
//! weights summing to its area 1/2. Degree ≤ 5 uses the classical 7-point
//! rule; higher degrees use a collapsed (conical) Gauss–Legendre product.

use crate::mesh::Point;
use thiserror::Error;

/// Highest polynomial degree the rule constructors accept.
pub const MAX_DEGREE: usize = 63;

#[derive(Debug, Error, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature of degree {0} is not implemented (maximum {MAX_DEGREE})")]
    UnsupportedDegree(usize),
}

#[derive(Debug, Clone)]
pub struct TriangleRule {
    /// Reference coordinates (ξ, η).
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

#[derive(Debug, Clone)]
pub struct EdgeRule {
    /// Abscissae in [-1, 1].
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

impl EdgeRule {
    /// Gauss–Legendre rule with the fewest points exact to `degree`.
    pub fn new(degree: usize) -> Result<Self, QuadratureError> {
        if degree > MAX_DEGREE {
            return Err(QuadratureError::UnsupportedDegree(degree));
        }
        let n = degree / 2 + 1;
        let (points, weights) = gauss_legendre(n);
        Ok(EdgeRule { points, weights, degree: 2 * n - 1 })
    }

    pub fn with_points(n: usize) -> Self {
        let (points, weights) = gauss_legendre(n);
        EdgeRule { points, weights, degree: 2 * n - 1 }
    }

    /// Composite rule over `2^levels` equal pieces of [-1, 1].
    pub fn subdivided(&self, levels: u32) -> EdgeRule {
        let pieces = 1usize << levels;
        let len = 2.0 / pieces as f64;
        let mut points = Vec::with_capacity(pieces * self.points.len());
        let mut weights = Vec::with_capacity(pieces * self.points.len());
        for p in 0..pieces {
            let a = -1.0 + p as f64 * len;
            for (&x, &w) in self.points.iter().zip(&self.weights) {
                points.push(a + 0.5 * len * (x + 1.0));
                weights.push(0.5 * len * w);
            }
        }
        EdgeRule { points, weights, degree: self.degree }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn seven_point() -> TriangleRule {
    let s15 = 15f64.sqrt();
    let a = (6.0 - s15) / 21.0;
    let b = (6.0 + s15) / 21.0;
    let wa = (155.0 - s15) / 2400.0;
    let wb = (155.0 + s15) / 2400.0;
    TriangleRule {
        points: vec![
            [1.0 / 3.0, 1.0 / 3.0],
            [a, a],
            [1.0 - 2.0 * a, a],
            [a, 1.0 - 2.0 * a],
            [b, b],
            [1.0 - 2.0 * b, b],
            [b, 1.0 - 2.0 * b],
        ],
        weights: vec![9.0 / 80.0, wa, wa, wa, wb, wb, wb],
        degree: 5,
    }
}

/// Collapsed product rule: x = u, y = v(1 − u) with Jacobian (1 − u).
fn conical(degree: usize) -> TriangleRule {
    let n = (degree + 2).div_ceil(2);
    let (g, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for i in 0..n {
        let u = 0.5 * (g[i] + 1.0);
        for j in 0..n {
            let v = 0.5 * (g[j] + 1.0);
            points.push([u, v * (1.0 - u)]);
            weights.push(0.25 * w[i] * w[j] * (1.0 - u));
        }
    }
    TriangleRule { points, weights, degree }
}

impl TriangleRule {
    pub fn new(degree: usize) -> Result<Self, QuadratureError> {
        match degree {
            0..=5 => Ok(seven_point()),
            d if d <= MAX_DEGREE => Ok(conical(d)),
            d => Err(QuadratureError::UnsupportedDegree(d)),
        }
    }

    /// Composite rule on the `4^levels` congruent sub-triangles obtained by
    /// repeated midpoint subdivision. Polynomial exactness is unchanged; the
    /// finer sampling resolves oscillatory integrands.
    pub fn subdivided(&self, levels: u32) -> TriangleRule {
        let mut tris: Vec<[Point; 3]> = vec![[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]];
        for _ in 0..levels {
            let mut next = Vec::with_capacity(4 * tris.len());
            for [a, b, c] in tris {
                let mid = |p: Point, q: Point| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
                let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
                next.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
            }
            tris = next;
        }
        let scale = 1.0 / tris.len() as f64;
        let mut points = Vec::with_capacity(tris.len() * self.points.len());
        let mut weights = Vec::with_capacity(tris.len() * self.points.len());
        for [a, b, c] in &tris {
            for (p, &w) in self.points.iter().zip(&self.weights) {
                points.push([
                    a[0] + p[0] * (b[0] - a[0]) + p[1] * (c[0] - a[0]),
                    a[1] + p[0] * (b[1] - a[1]) + p[1] * (c[1] - a[1]),
                ]);
                weights.push(w * scale);
            }
        }
        TriangleRule { points, weights, degree: self.degree }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integral over the reference triangle.
    pub fn integrate<F: Fn(Point) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }
}

/// Reference-triangle rule exact to `degree`.
pub fn triangle_quadrature(degree: usize) -> Result<TriangleRule, QuadratureError> {
    TriangleRule::new(degree)
}

/// Gauss–Legendre rule on [-1, 1] exact to `degree`.
pub fn edge_quadrature(degree: usize) -> Result<EdgeRule, QuadratureError> {
    EdgeRule::new(degree)
}
