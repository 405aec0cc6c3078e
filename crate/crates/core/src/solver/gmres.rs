//! Restarted GMRES with a right ILU(0) preconditioner.

use crate::sparse::SparseComplexMatrix;
use crate::C64;

use super::SolveError;

/// Incomplete LU with the sparsity pattern of `A`. Unit lower factor.
#[derive(Debug, Clone)]
pub struct Ilu0 {
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
    diag: Vec<usize>,
}

impl Ilu0 {
    pub fn new(a: &SparseComplexMatrix) -> Result<Self, SolveError> {
        let n = a.n();
        let row_ptr = a.row_ptr().to_vec();
        let col_idx = a.col_idx().to_vec();
        let mut values = a.values().to_vec();
        let mut diag = vec![usize::MAX; n];
        for i in 0..n {
            for p in row_ptr[i]..row_ptr[i + 1] {
                if col_idx[p] == i {
                    diag[i] = p;
                }
            }
            if diag[i] == usize::MAX {
                return Err(SolveError::Singular { column: i });
            }
        }
        let mut pos = vec![usize::MAX; n];
        for i in 0..n {
            for p in row_ptr[i]..row_ptr[i + 1] {
                pos[col_idx[p]] = p;
            }
            for p in row_ptr[i]..diag[i] {
                let k = col_idx[p];
                let pivot = values[diag[k]];
                if pivot == C64::new(0.0, 0.0) {
                    return Err(SolveError::Singular { column: k });
                }
                let lik = values[p] / pivot;
                values[p] = lik;
                for q in diag[k] + 1..row_ptr[k + 1] {
                    let slot = pos[col_idx[q]];
                    if slot != usize::MAX {
                        let ukj = values[q];
                        values[slot] -= lik * ukj;
                    }
                }
            }
            if values[diag[i]] == C64::new(0.0, 0.0) {
                return Err(SolveError::Singular { column: i });
            }
            for p in row_ptr[i]..row_ptr[i + 1] {
                pos[col_idx[p]] = usize::MAX;
            }
        }
        Ok(Ilu0 { row_ptr, col_idx, values, diag })
    }

    /// Returns `(LU)⁻¹ r`.
    pub fn apply(&self, r: &[C64]) -> Vec<C64> {
        let n = self.diag.len();
        let mut y = r.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for p in self.row_ptr[i]..self.diag[i] {
                s -= self.values[p] * y[self.col_idx[p]];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for p in self.diag[i] + 1..self.row_ptr[i + 1] {
                s -= self.values[p] * y[self.col_idx[p]];
            }
            y[i] = s / self.values[self.diag[i]];
        }
        y
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `Σ conj(a_i) b_i`
fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[derive(Debug, Clone, Copy)]
pub struct GmresOutcome {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Right-preconditioned GMRES(`restart`) from a zero initial guess. Stops when
/// the recurrence residual drops below `tol · ‖b‖`.
pub fn gmres(
    a: &SparseComplexMatrix,
    m: &Ilu0,
    b: &[C64],
    tol: f64,
    restart: usize,
    max_iterations: usize,
) -> (Vec<C64>, GmresOutcome) {
    let n = b.len();
    let zero = C64::new(0.0, 0.0);
    let mut x = vec![zero; n];
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return (x, GmresOutcome { iterations: 0, relative_residual: 0.0 });
    }
    let restart = restart.max(1);
    let mut iterations = 0;
    loop {
        let ax = a.mul_vec(&x);
        let r: Vec<C64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = norm(&r);
        if beta <= tol * bnorm || iterations >= max_iterations {
            return (x, GmresOutcome { iterations, relative_residual: beta / bnorm });
        }
        let mut v: Vec<Vec<C64>> = vec![r.iter().map(|z| z / beta).collect()];
        let mut h = vec![vec![zero; restart]; restart + 1];
        let mut cs = vec![0.0; restart];
        let mut sn = vec![zero; restart];
        let mut g = vec![zero; restart + 1];
        g[0] = C64::new(beta, 0.0);
        let mut j_done = 0;
        for j in 0..restart {
            iterations += 1;
            let z = m.apply(&v[j]);
            let mut w = a.mul_vec(&z);
            // Modified Gram–Schmidt.
            for (i, vi) in v.iter().enumerate() {
                let hij = dot(vi, &w);
                h[i][j] = hij;
                for (wk, vk) in w.iter_mut().zip(vi) {
                    *wk -= hij * vk;
                }
            }
            let hn = norm(&w);
            h[j + 1][j] = C64::new(hn, 0.0);
            for i in 0..j {
                let t = h[i][j] * cs[i] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i].conj() * h[i][j] + h[i + 1][j] * cs[i];
                h[i][j] = t;
            }
            let (aa, bb) = (h[j][j], h[j + 1][j]);
            let r = (aa.norm_sqr() + bb.norm_sqr()).sqrt();
            if aa.norm() == 0.0 {
                cs[j] = 0.0;
                sn[j] = C64::new(1.0, 0.0);
            } else {
                cs[j] = aa.norm() / r;
                sn[j] = aa / aa.norm() * bb.conj() / r;
            }
            h[j][j] = cs[j] * aa + sn[j] * bb;
            h[j + 1][j] = zero;
            g[j + 1] = -sn[j].conj() * g[j];
            g[j] *= cs[j];
            j_done = j + 1;
            if g[j + 1].norm() <= tol * bnorm || hn == 0.0 || iterations >= max_iterations {
                break;
            }
            v.push(w.iter().map(|z| z / hn).collect());
        }
        // Back substitution for the update coefficients.
        let mut yk = vec![zero; j_done];
        for i in (0..j_done).rev() {
            let mut s = g[i];
            for l in i + 1..j_done {
                s -= h[i][l] * yk[l];
            }
            yk[i] = s / h[i][i];
        }
        let mut u = vec![zero; n];
        for (l, &c) in yk.iter().enumerate() {
            for (uk, vk) in u.iter_mut().zip(&v[l]) {
                *uk += c * vk;
            }
        }
        let du = m.apply(&u);
        for (xk, d) in x.iter_mut().zip(du) {
            *xk += d;
        }
    }
}
