//! Benchmark problems with closed-form solutions.
//!
//! * convex: `d = 1`, `f = sin(kr)/r`, Robin data from
//!   `u = cos(kr)/k − C J₀(kr)`, `C = e^{ik} / (k (J₀(k) + i J₁(k)))`;
//! * pacman: `d = 1`, `f = 0`, Dirichlet data from `u = J_ξ(kr) cos(ξθ)`;
//! * inhomogeneous: smoothstep dielectric `d(r)`, Dirichlet data from
//!   `u = J₀(kr)` with the matching manufactured source.
//!
//! Robin data follow the convention of the assembled form,
//! `d ∇u·n + iκu = g`.

use std::f64::consts::PI;
use std::sync::Arc;

use thiserror::Error;

use crate::assembly::{BoundaryCondition, Coefficient};
pub use crate::assembly::{ExactSolution, ProblemSpec};
use crate::mesh::Point;
use crate::special::{bessel_j, bessel_j_derivative, MAX_ORDER};
use crate::C64;

#[derive(Debug, Error, PartialEq)]
pub enum ProblemError {
    #[error("wave number must be positive and finite, got {0}")]
    InvalidWaveNumber(f64),
    #[error("Bessel order {0} must lie in (0, {max}]", max = MAX_ORDER)]
    InvalidOrder(f64),
    #[error("invalid dielectric profile: {0}")]
    InvalidProfile(String),
    #[error("point ({0}, {1}) lies on the excluded negative x-axis")]
    OnBranchCut(f64, f64),
}

fn radius(p: Point) -> f64 {
    p[0].hypot(p[1])
}

/// Bessel value with out-of-range arguments mapped to NaN; constructors
/// validate the parameters, so this only triggers for far-away points.
fn jv(nu: f64, x: f64) -> f64 {
    bessel_j(nu, x).unwrap_or(f64::NAN)
}

fn check_k(k: f64) -> Result<(), ProblemError> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(ProblemError::InvalidWaveNumber(k))
    }
}

/// Radial exact solution `u(r)` with radial derivative `u′(r)`.
fn radial_exact<U, D>(u: U, du: D) -> ExactSolution
where
    U: Fn(f64) -> C64 + Send + Sync + 'static,
    D: Fn(f64) -> C64 + Send + Sync + 'static,
{
    let du = Arc::new(du);
    ExactSolution {
        value: Arc::new(move |p| u(radius(p))),
        gradient: Arc::new(move |p| {
            let r = radius(p);
            if r == 0.0 {
                return [C64::new(0.0, 0.0); 2];
            }
            let d = du(r);
            [d * (p[0] / r), d * (p[1] / r)]
        }),
    }
}

/// The constant `C` of the convex problem.
pub fn convex_constant(k: f64) -> C64 {
    let eik = C64::new(k.cos(), k.sin());
    eik / (C64::new(jv(0.0, k), jv(1.0, k)) * k)
}

/// Hexagon problem with Robin boundary condition.
pub fn convex_problem(k: f64) -> Result<ProblemSpec, ProblemError> {
    check_k(k)?;
    let c = convex_constant(k);
    let exact = radial_exact(
        move |r| C64::new((k * r).cos() / k, 0.0) - c * jv(0.0, k * r),
        move |r| C64::new(-(k * r).sin(), 0.0) + c * (k * jv(1.0, k * r)),
    );
    let (value, gradient) = (exact.value.clone(), exact.gradient.clone());
    let g = move |p: Point, n: [f64; 2]| {
        let du = gradient(p);
        du[0] * n[0] + du[1] * n[1] + C64::new(0.0, k) * value(p)
    };
    Ok(ProblemSpec {
        kappa: k,
        d: Coefficient::Constant(1.0),
        f: Arc::new(move |p| {
            let r = radius(p);
            // sin(kr)/r extended by continuity.
            C64::new(if r == 0.0 { k } else { (k * r).sin() / r }, 0.0)
        }),
        boundary: BoundaryCondition::Robin(Arc::new(g)),
        exact: Some(exact),
    })
}

/// `J_ξ(kr) cos(ξθ)` with `θ = atan2(y, x) ∈ (−π, π]`. Errors on the negative
/// x-axis when `ξ` is not an integer, where the angle jumps.
pub fn pacman_value(k: f64, xi: f64, p: Point) -> Result<C64, ProblemError> {
    if p[1] == 0.0 && p[0] < 0.0 && xi.fract() != 0.0 {
        return Err(ProblemError::OnBranchCut(p[0], p[1]));
    }
    let theta = p[1].atan2(p[0]);
    Ok(C64::new(jv(xi, k * radius(p)) * (xi * theta).cos(), 0.0))
}

/// Slit-disk problem with Dirichlet data and `f = 0`.
pub fn pacman_problem(k: f64, xi: f64) -> Result<ProblemSpec, ProblemError> {
    check_k(k)?;
    if !(xi > 0.0 && xi <= MAX_ORDER) {
        return Err(ProblemError::InvalidOrder(xi));
    }
    let value = move |p: Point| {
        let theta = p[1].atan2(p[0]);
        C64::new(jv(xi, k * radius(p)) * (xi * theta).cos(), 0.0)
    };
    let gradient = move |p: Point| {
        let r = radius(p);
        if r == 0.0 {
            // J_ξ(kr) ~ (kr/2)^ξ / Γ(ξ+1): bounded gradient only for ξ ≥ 1.
            let gx = if xi == 1.0 {
                0.5 * k
            } else if xi > 1.0 {
                0.0
            } else {
                f64::NAN
            };
            return [C64::new(gx, 0.0), C64::new(0.0, 0.0)];
        }
        let theta = p[1].atan2(p[0]);
        let (s, c) = theta.sin_cos();
        let (sx, cx) = (xi * theta).sin_cos();
        let ur = k * bessel_j_derivative(xi, k * r).unwrap_or(f64::NAN) * cx;
        let ut = -xi * jv(xi, k * r) * sx / r;
        [C64::new(ur * c - ut * s, 0.0), C64::new(ur * s + ut * c, 0.0)]
    };
    let value = Arc::new(value);
    Ok(ProblemSpec {
        kappa: k,
        d: Coefficient::Constant(1.0),
        f: Arc::new(|_| C64::new(0.0, 0.0)),
        boundary: BoundaryCondition::Dirichlet(value.clone()),
        exact: Some(ExactSolution { value, gradient: Arc::new(gradient) }),
    })
}

/// Smoothstep blend between two dielectric constants over `a ≤ r ≤ b`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DielectricProfile {
    pub eps1: f64,
    pub eps2: f64,
    pub a: f64,
    pub b: f64,
    /// Domain radius.
    pub radius: f64,
}

impl Default for DielectricProfile {
    /// Protein (ε = 2) inside `r < 1`, water (ε = 80) outside `r > 3`, on a
    /// disk of radius 5.
    fn default() -> Self {
        DielectricProfile { eps1: 2.0, eps2: 80.0, a: 1.0, b: 3.0, radius: 5.0 }
    }
}

impl DielectricProfile {
    pub fn new(eps1: f64, eps2: f64, a: f64, b: f64, radius: f64) -> Result<Self, ProblemError> {
        let p = DielectricProfile { eps1, eps2, a, b, radius };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        let finite = [self.eps1, self.eps2, self.a, self.b, self.radius].iter().all(|v| v.is_finite());
        if !finite || !(self.eps1 > 0.0 && self.eps2 > 0.0) {
            return Err(ProblemError::InvalidProfile("dielectric constants must be positive".into()));
        }
        if !(0.0 < self.a && self.a < self.b && self.b < self.radius) {
            return Err(ProblemError::InvalidProfile(format!(
                "need 0 < a < b < R, got a = {}, b = {}, R = {}",
                self.a, self.b, self.radius
            )));
        }
        Ok(())
    }

    fn t(&self, r: f64) -> f64 {
        (self.b - r) / (self.b - self.a)
    }

    /// `S(r)`: 1 inside `a`, 0 outside `b`, `3t² − 2t³` between.
    pub fn s(&self, r: f64) -> f64 {
        if r < self.a {
            1.0
        } else if r > self.b {
            0.0
        } else {
            let t = self.t(r);
            t * t * (3.0 - 2.0 * t)
        }
    }

    /// `S′(r) = (6t² − 6t)/(b − a)` on `[a, b]`, zero elsewhere.
    pub fn s_prime(&self, r: f64) -> f64 {
        if r < self.a || r > self.b {
            0.0
        } else {
            let t = self.t(r);
            6.0 * t * (t - 1.0) / (self.b - self.a)
        }
    }

    pub fn d(&self, r: f64) -> f64 {
        let s = self.s(r);
        s / self.eps1 + (1.0 - s) / self.eps2
    }

    pub fn d_prime(&self, r: f64) -> f64 {
        (1.0 / self.eps1 - 1.0 / self.eps2) * self.s_prime(r)
    }
}

/// Disk problem with the dielectric profile, Dirichlet data and
/// `u = J₀(kr)`.
pub fn inhomogeneous_problem(k: f64, profile: DielectricProfile) -> Result<ProblemSpec, ProblemError> {
    check_k(k)?;
    profile.validate()?;
    let exact = radial_exact(move |r| C64::new(jv(0.0, k * r), 0.0), move |r| C64::new(-k * jv(1.0, k * r), 0.0));
    let f = move |p: Point| {
        let r = radius(p);
        let v = k * k * (profile.d(r) - 1.0) * jv(0.0, k * r) + k * profile.d_prime(r) * jv(1.0, k * r);
        C64::new(v, 0.0)
    };
    Ok(ProblemSpec {
        kappa: k,
        d: Coefficient::Field(Arc::new(move |p| profile.d(radius(p)))),
        f: Arc::new(f),
        boundary: BoundaryCondition::Dirichlet(exact.value.clone()),
        exact: Some(exact),
    })
}

/// Angle of the excluded notch on each side of the negative x-axis used by
/// default slit-disk meshes.
pub const DEFAULT_NOTCH: f64 = PI / 60.0;
