//! Compressed sparse row storage for complex matrices.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::C64;

#[derive(Debug, Error)]
pub enum SparseError {
    #[error("triplet ({row}, {col}) outside a {n}x{n} matrix")]
    OutOfBounds { row: usize, col: usize, n: usize },
    #[error("coordinate file parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Square complex matrix in CSR form. Column indices within each row are
/// strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseComplexMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

/// Accumulates `(row, col, value)` triplets.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    n: usize,
    triplets: Vec<(usize, usize, C64)>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        TripletBuilder { n, triplets: Vec::new() }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        TripletBuilder { n, triplets: Vec::with_capacity(cap) }
    }

    pub fn push(&mut self, row: usize, col: usize, value: C64) {
        self.triplets.push((row, col, value));
    }

    /// Pushes `value` at `(row, col)` and, off the diagonal, at `(col, row)`
    /// as well. Both positions then see identical addend sequences, so the
    /// compressed matrix is exactly symmetric.
    pub fn push_symmetric(&mut self, row: usize, col: usize, value: C64) {
        self.triplets.push((row, col, value));
        if row != col {
            self.triplets.push((col, row, value));
        }
    }

    pub fn len(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }

    pub fn build(self) -> Result<SparseComplexMatrix, SparseError> {
        SparseComplexMatrix::from_triplets(self.n, self.triplets)
    }
}

impl SparseComplexMatrix {
    /// Compresses triplets, summing duplicates in their original order.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, C64)>) -> Result<Self, SparseError> {
        if let Some(&(row, col, _)) = triplets.iter().find(|t| t.0 >= n || t.1 >= n) {
            return Err(SparseError::OutOfBounds { row, col, n });
        }
        // Stable: duplicates keep insertion order.
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().expect("nonempty") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(SparseComplexMatrix { n, row_ptr, col_idx, values })
    }

    pub fn from_csr(n: usize, row_ptr: Vec<usize>, col_idx: Vec<usize>, values: Vec<C64>) -> Self {
        debug_assert_eq!(row_ptr.len(), n + 1);
        debug_assert_eq!(col_idx.len(), values.len());
        SparseComplexMatrix { n, row_ptr, col_idx, values }
    }

    pub fn identity(n: usize) -> Self {
        SparseComplexMatrix {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![C64::new(1.0, 0.0); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    /// Iterates stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    /// Stored value at `(i, j)`, zero if structurally absent.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(p) => self.values[r.start + p],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn transpose(&self) -> SparseComplexMatrix {
        let mut count = vec![0usize; self.n + 1];
        for &j in &self.col_idx {
            count[j + 1] += 1;
        }
        for i in 0..self.n {
            count[i + 1] += count[i];
        }
        let mut next = count.clone();
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![C64::new(0.0, 0.0); self.nnz()];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                col_idx[next[j]] = i;
                values[next[j]] = v;
                next[j] += 1;
            }
        }
        SparseComplexMatrix { n: self.n, row_ptr: count, col_idx, values }
    }

    /// `max |A_ij − A_ji|` over stored entries of either triangle.
    pub fn symmetry_defect(&self) -> f64 {
        self.iter().map(|(i, j, v)| (v - self.get(j, i)).norm()).fold(0.0, f64::max)
    }

    /// Principal submatrix on `keep` (ascending global indices).
    pub fn principal_submatrix(&self, keep: &[usize]) -> SparseComplexMatrix {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut row_ptr = Vec::with_capacity(keep.len() + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for &old in keep {
            for (j, v) in self.row(old) {
                if map[j] != usize::MAX {
                    col_idx.push(map[j]);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseComplexMatrix { n: keep.len(), row_ptr, col_idx, values }
    }

    /// Writes `n n nnz` then one `row col re im` line per entry, 1-based.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {} {}", self.n, self.n, self.nnz())?;
        for (i, j, v) in self.iter() {
            writeln!(w, "{} {} {:.17e} {:.17e}", i + 1, j + 1, v.re, v.im)?;
        }
        Ok(())
    }

    pub fn read_coordinate<R: BufRead>(r: R) -> Result<Self, SparseError> {
        let mut lines = r.lines().enumerate();
        let parse_err = |line: usize, msg: &str| SparseError::Parse { line: line + 1, msg: msg.to_string() };
        let (ln, header) = lines.next().ok_or_else(|| parse_err(0, "empty file"))?;
        let header = header?;
        let h: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(ln, "bad header")))
            .collect::<Result<_, _>>()?;
        if h.len() != 3 || h[0] != h[1] {
            return Err(parse_err(ln, "header must be `n n nnz`"));
        }
        let n = h[0];
        let mut triplets = Vec::with_capacity(h[2]);
        for (ln, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 4 {
                return Err(parse_err(ln, "expected `row col re im`"));
            }
            let idx = |s: &str| s.parse::<usize>().ok().filter(|&v| v >= 1).ok_or_else(|| parse_err(ln, "bad index"));
            let num = |s: &str| s.parse::<f64>().map_err(|_| parse_err(ln, "bad number"));
            triplets.push((idx(t[0])? - 1, idx(t[1])? - 1, C64::new(num(t[2])?, num(t[3])?)));
        }
        Self::from_triplets(n, triplets)
    }
}
