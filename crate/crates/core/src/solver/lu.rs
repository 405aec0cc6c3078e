//! Left-looking sparse LU (Gilbert–Peierls) with threshold partial pivoting.
//!
//! Factors `P A Q = L U` where `Q` is a given column order and `P` is chosen
//! during elimination. Each column is obtained by a sparse triangular solve
//! whose nonzero pattern comes from a depth-first reach in the graph of `L`.

use crate::sparse::SparseComplexMatrix;
use crate::C64;

use super::SolveError;

#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    /// Unit lower factor by columns; the diagonal 1 is stored first.
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<C64>,
    /// Upper factor by columns; the diagonal is stored last.
    up: Vec<usize>,
    ui: Vec<usize>,
    ux: Vec<C64>,
    /// `pinv[row] = pivot step`.
    pinv: Vec<usize>,
    q: Vec<usize>,
    off_diagonal_pivots: usize,
}

impl LuFactors {
    /// `q[k]` is the column eliminated at step `k`. A pivot on the diagonal
    /// entry `A[q[k], q[k]]` is kept whenever its magnitude is at least `tol`
    /// times the largest candidate.
    pub fn factor(a: &SparseComplexMatrix, q: &[usize], tol: f64) -> Result<Self, SolveError> {
        let n = a.n();
        assert_eq!(q.len(), n);
        // Columns of A are rows of Aᵀ.
        let at = a.transpose();
        let guess = 4 * a.nnz() + n;
        let mut lp = Vec::with_capacity(n + 1);
        let mut li = Vec::with_capacity(guess);
        let mut lx = Vec::with_capacity(guess);
        let mut up = Vec::with_capacity(n + 1);
        let mut ui = Vec::with_capacity(guess);
        let mut ux = Vec::with_capacity(guess);
        let mut pinv = vec![usize::MAX; n];
        let mut x = vec![C64::new(0.0, 0.0); n];
        let mut xi = vec![0usize; n];
        let mut stack = vec![0usize; n];
        let mut pstack = vec![0usize; n];
        let mut mark = vec![usize::MAX; n];
        let mut off_diagonal_pivots = 0;
        let tol2 = tol * tol;

        for k in 0..n {
            lp.push(li.len());
            up.push(ui.len());
            let col = q[k];

            // Reach: topological order of the nonzeros of L \ A(:, col).
            let mut top = n;
            for (i, _) in at.row(col) {
                if mark[i] == k {
                    continue;
                }
                // Nonrecursive depth-first search from i.
                let mut head = 0usize;
                stack[0] = i;
                loop {
                    let j = stack[head];
                    let jcol = pinv[j];
                    if mark[j] != k {
                        mark[j] = k;
                        pstack[head] = if jcol == usize::MAX { 0 } else { lp[jcol] };
                    }
                    let pend = if jcol == usize::MAX { 0 } else { lp[jcol + 1] };
                    let mut pushed = false;
                    let mut p = pstack[head];
                    while p < pend {
                        let r = li[p];
                        p += 1;
                        if mark[r] != k {
                            pstack[head] = p;
                            head += 1;
                            stack[head] = r;
                            pushed = true;
                            break;
                        }
                    }
                    if !pushed {
                        top -= 1;
                        xi[top] = j;
                        if head == 0 {
                            break;
                        }
                        head -= 1;
                    }
                }
            }

            // Numeric sparse triangular solve.
            for &i in &xi[top..n] {
                x[i] = C64::new(0.0, 0.0);
            }
            for (i, v) in at.row(col) {
                x[i] = v;
            }
            for px in top..n {
                let j = xi[px];
                let jcol = pinv[j];
                if jcol == usize::MAX {
                    continue;
                }
                let xj = x[j];
                if xj == C64::new(0.0, 0.0) {
                    continue;
                }
                for p in lp[jcol] + 1..lp[jcol + 1] {
                    x[li[p]] -= lx[p] * xj;
                }
            }

            // Pivot choice.
            let mut ipiv = usize::MAX;
            let mut amax = -1.0f64;
            for &i in &xi[top..n] {
                if pinv[i] == usize::MAX {
                    let m = x[i].norm_sqr();
                    if m > amax {
                        amax = m;
                        ipiv = i;
                    }
                } else {
                    ui.push(pinv[i]);
                    ux.push(x[i]);
                }
            }
            if ipiv == usize::MAX || !(amax > 0.0) || !amax.is_finite() {
                return Err(SolveError::Singular { column: col });
            }
            if pinv[col] == usize::MAX && mark[col] == k && x[col].norm_sqr() >= tol2 * amax {
                ipiv = col;
            }
            if ipiv != col {
                off_diagonal_pivots += 1;
            }
            let pivot = x[ipiv];
            ui.push(k);
            ux.push(pivot);
            pinv[ipiv] = k;
            li.push(ipiv);
            lx.push(C64::new(1.0, 0.0));
            let inv = pivot.inv();
            for &i in &xi[top..n] {
                if pinv[i] == usize::MAX {
                    li.push(i);
                    lx.push(x[i] * inv);
                }
                x[i] = C64::new(0.0, 0.0);
            }
        }
        lp.push(li.len());
        up.push(ui.len());
        for r in li.iter_mut() {
            *r = pinv[*r];
        }
        Ok(LuFactors { n, lp, li, lx, up, ui, ux, pinv, q: q.to_vec(), off_diagonal_pivots })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz_l(&self) -> usize {
        self.li.len()
    }

    pub fn nnz_u(&self) -> usize {
        self.ui.len()
    }

    pub fn off_diagonal_pivots(&self) -> usize {
        self.off_diagonal_pivots
    }

    /// `pinv[row]` is the elimination step at which `row` was pivotal.
    pub fn row_pivots(&self) -> &[usize] {
        &self.pinv
    }

    pub fn column_order(&self) -> &[usize] {
        &self.q
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut y = vec![C64::new(0.0, 0.0); n];
        for (i, &v) in b.iter().enumerate() {
            y[self.pinv[i]] = v;
        }
        for j in 0..n {
            let yj = y[j];
            if yj == C64::new(0.0, 0.0) {
                continue;
            }
            for p in self.lp[j] + 1..self.lp[j + 1] {
                y[self.li[p]] -= self.lx[p] * yj;
            }
        }
        for j in (0..n).rev() {
            let d = self.up[j + 1] - 1;
            y[j] /= self.ux[d];
            let yj = y[j];
            for p in self.up[j]..d {
                y[self.ui[p]] -= self.ux[p] * yj;
            }
        }
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (k, &c) in self.q.iter().enumerate() {
            x[c] = y[k];
        }
        x
    }
}
