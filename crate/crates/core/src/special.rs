//! Bessel functions of the first kind for real order and argument.
//!
//! Small arguments use the ascending series summed in double-double
//! arithmetic; the alternating terms grow to about `e^x / x` before
//! cancelling, so plain doubles lose roughly `log10(e^x)` digits. Large
//! arguments use Hankel's asymptotic expansion.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;
use thiserror::Error;

/// Largest supported order.
pub const MAX_ORDER: f64 = 4.0;
/// Largest supported argument.
pub const MAX_ARGUMENT: f64 = 1e4;
/// Arguments above this use the asymptotic expansion.
pub const SERIES_LIMIT: f64 = 30.0;

#[derive(Debug, Error, PartialEq)]
pub enum SpecialError {
    #[error("Bessel order {0} outside [0, {MAX_ORDER}]")]
    OrderOutOfRange(f64),
    #[error("Bessel argument {0} outside [0, {MAX_ARGUMENT}]")]
    ArgumentOutOfRange(f64),
}

fn check(nu: f64, x: f64) -> Result<(), SpecialError> {
    if !(0.0..=MAX_ORDER).contains(&nu) {
        return Err(SpecialError::OrderOutOfRange(nu));
    }
    if !(0.0..=MAX_ARGUMENT).contains(&x) {
        return Err(SpecialError::ArgumentOutOfRange(x));
    }
    Ok(())
}

/// `J_ν(x)` for `ν ∈ [0, 4]`, `x ∈ [0, 10⁴]`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64, SpecialError> {
    check(nu, x)?;
    Ok(if x <= SERIES_LIMIT { series(nu, x) } else { asymptotic(nu, x) })
}

/// Ascending-series branch, valid for any `x` in range but accurate only up
/// to about the switch point.
pub fn bessel_j_series(nu: f64, x: f64) -> Result<f64, SpecialError> {
    check(nu, x)?;
    Ok(series(nu, x))
}

/// Asymptotic branch; meaningful for `x` well above `ν²`.
pub fn bessel_j_asymptotic(nu: f64, x: f64) -> Result<f64, SpecialError> {
    check(nu, x)?;
    if x == 0.0 {
        return Err(SpecialError::ArgumentOutOfRange(x));
    }
    Ok(asymptotic(nu, x))
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

/// Dekker's exact product; avoids relying on a hardware fused multiply-add.
fn two_prod(a: f64, b: f64) -> Dd {
    const SPLIT: f64 = 134_217_729.0; // 2^27 + 1
    let split = |v: f64| {
        let t = SPLIT * v;
        let h = t - (t - v);
        (h, v - h)
    };
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    Dd { hi: p, lo: ((ah * bh - p) + ah * bl + al * bh) + al * bl }
}

impl Dd {
    fn from(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let u = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(u.hi, u.lo + t.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        quick_two_sum(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Dd::from(-q1)));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Dd::from(-q2)));
        let q3 = r.hi / o.hi;
        let q = quick_two_sum(q1, q2);
        q.add(Dd::from(q3))
    }
}

/// `(x/2)^ν / Γ(ν+1) · Σ_m (−x²/4)^m / (m! (ν+1)_m)`
fn series(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let x2 = two_prod(x, x);
    let q = Dd { hi: -0.25 * x2.hi, lo: -0.25 * x2.lo };
    let mut term = Dd::from(1.0);
    let mut sum = term;
    for m in 1..400 {
        let mf = m as f64;
        // ν + m and m(ν + m) carried exactly in double-double.
        let denom = two_sum(nu, mf).mul(Dd::from(mf));
        term = term.mul(q).div(denom);
        sum = sum.add(term);
        if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) {
            break;
        }
    }
    let prefactor = if nu == 0.0 { 1.0 } else { (0.5 * x).powf(nu) / gamma(nu + 1.0) };
    prefactor * (sum.hi + sum.lo)
}

/// `√(2/(πx)) (P cos ω − Q sin ω)`, `ω = x − νπ/2 − π/4`.
fn asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let (mut p, mut q) = (0.0, 0.0);
    let mut a = 1.0; // a_k(ν) / x^k
    let mut prev = f64::INFINITY;
    for k in 0..200 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        }
        if a.abs() > prev {
            break;
        }
        prev = a.abs();
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if a.abs() < 1e-17 * p.abs().max(1e-300) {
            break;
        }
    }
    // cos(x − φ) and sin(x − φ) without forming x − φ.
    let phi = 0.5 * nu * PI + 0.25 * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let cw = cx * cp + sx * sp;
    let sw = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cw - q * sw)
}

/// `J_ν′(x) = (ν/x) J_ν(x) − J_{ν+1}(x)`, with the limit at `x = 0`.
pub fn bessel_j_derivative(nu: f64, x: f64) -> Result<f64, SpecialError> {
    check(nu, x)?;
    if x == 0.0 {
        // J_ν′(0): 1/2 for ν = 1, infinite for 0 < ν < 1, zero otherwise.
        return Ok(if nu == 1.0 {
            0.5
        } else if nu > 0.0 && nu < 1.0 {
            f64::INFINITY
        } else {
            0.0
        });
    }
    let next = if x <= SERIES_LIMIT { series(nu + 1.0, x) } else { asymptotic(nu + 1.0, x) };
    Ok(nu / x * bessel_j(nu, x)? - next)
}
