//! Dense linear algebra over `F_p`.
//!
//! Elimination keeps rows as unreduced `u64` accumulators and only reduces an
//! entry when it is inspected as a pivot candidate, so the inner update is a
//! plain multiply-add. Row updates below a pivot are independent and run on
//! rayon when [`Exec::Parallel`] is selected and the `parallel` feature is on.

use crate::field::{FieldElem, PrimeField};

/// Execution strategy for row elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

// Below this many row-entries per pivot step the rayon split costs more than it saves.
#[cfg(feature = "parallel")]
const PAR_THRESHOLD: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<FieldElem>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            m.row_mut(i).copy_from_slice(&r[..cols]);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<FieldElem>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m.set(i, j, c[i]);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, k: PrimeField, i: usize, j: usize, v: FieldElem) {
        let idx = i * self.cols + j;
        self.data[idx] = k.add(self.data[idx], v);
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [FieldElem] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, k: PrimeField, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let p = k.p() as u64;
        let mut out = Matrix::zeros(self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for l in 0..self.cols {
                let a = self.get(i, l) as u64;
                if a == 0 {
                    continue;
                }
                for (x, &b) in acc.iter_mut().zip(other.row(l)) {
                    *x = (*x + a * b as u64) % p;
                }
            }
            for (o, a) in out.row_mut(i).iter_mut().zip(&acc) {
                *o = *a as u32;
            }
        }
        out
    }

    pub fn mul_vec(&self, k: PrimeField, v: &[FieldElem]) -> Vec<FieldElem> {
        let p = k.p() as u64;
        (0..self.rows)
            .map(|i| {
                let s = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p);
                s as u32
            })
            .collect()
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            self.row_mut(r0 + i)[c0..c0 + block.cols].copy_from_slice(block.row(i));
        }
    }

    pub fn rank(&self, k: PrimeField, exec: Exec) -> usize {
        // eliminate along the shorter dimension
        if self.cols > self.rows {
            row_echelon(k, self.transpose().into_rows(), self.rows, false, exec)
                .pivots
                .len()
        } else {
            row_echelon(k, self.clone().into_rows(), self.cols, false, exec)
                .pivots
                .len()
        }
    }

    pub fn into_rows(self) -> Vec<Vec<FieldElem>> {
        if self.cols == 0 {
            return vec![Vec::new(); self.rows];
        }
        self.data.chunks(self.cols).map(|c| c.to_vec()).collect()
    }

    /// Basis of the right kernel `{x : A x = 0}`.
    pub fn kernel(&self, k: PrimeField, exec: Exec) -> Vec<Vec<FieldElem>> {
        let ech = row_echelon(k, self.clone().into_rows(), self.cols, true, exec);
        ech.nullspace(k)
    }

    /// Some solution of `A x = b`, if one exists.
    pub fn solve(&self, k: PrimeField, b: &[FieldElem]) -> Option<Vec<FieldElem>> {
        let rows: Vec<Vec<FieldElem>> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(b[i]);
                r
            })
            .collect();
        let ech = row_echelon(k, rows, self.cols + 1, true, Exec::Sequential);
        if ech.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (r, &c) in ech.rows.iter().zip(&ech.pivots) {
            x[c] = r[self.cols];
        }
        Some(x)
    }

    pub fn det(&self, k: PrimeField) -> FieldElem {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = 1;
        for c in 0..n {
            let Some(piv) = (c..n).find(|&i| a.get(i, c) != 0) else {
                return 0;
            };
            if piv != c {
                for j in 0..n {
                    let t = a.get(c, j);
                    a.set(c, j, a.get(piv, j));
                    a.set(piv, j, t);
                }
                det = k.neg(det);
            }
            let pv = a.get(c, c);
            det = k.mul(det, pv);
            let inv = k.inv(pv);
            for i in c + 1..n {
                let f = k.mul(a.get(i, c), inv);
                if f == 0 {
                    continue;
                }
                for j in c..n {
                    let v = k.sub(a.get(i, j), k.mul(f, a.get(c, j)));
                    a.set(i, j, v);
                }
            }
        }
        det
    }
}

/// Row echelon form of a list of row vectors.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub ncols: usize,
    pub pivots: Vec<usize>,
    /// Pivot rows, each normalized to a leading 1.
    pub rows: Vec<Vec<FieldElem>>,
    pub reduced: bool,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Basis of the vectors orthogonal to every row (requires reduced form).
    pub fn nullspace(&self, k: PrimeField) -> Vec<Vec<FieldElem>> {
        assert!(self.reduced);
        let mut is_pivot = vec![false; self.ncols];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        (0..self.ncols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0; self.ncols];
                v[free] = 1;
                for (r, &pc) in self.rows.iter().zip(&self.pivots) {
                    v[pc] = k.neg(r[free]);
                }
                v
            })
            .collect()
    }

    /// Non-pivot columns, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        (0..self.ncols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Reduces `v` modulo the row space (requires reduced form); the result
    /// vanishes on every pivot column.
    pub fn reduce(&self, k: PrimeField, v: &mut [FieldElem]) {
        assert!(self.reduced);
        let p = k.p() as u64;
        for (r, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if c == 0 {
                continue;
            }
            let mc = p - c as u64;
            for (x, &y) in v.iter_mut().zip(r) {
                if y != 0 {
                    *x = ((*x as u64 + mc * y as u64) % p) as u32;
                }
            }
        }
    }
}

fn reduce_budget(p: u64) -> usize {
    let sq = (p - 1) * (p - 1);
    ((u64::MAX - p) / sq.max(1)).min(usize::MAX as u64) as usize
}

#[inline]
fn eliminate_row(row: &mut [u64], piv: &[u64], col: usize, p: u64) {
    let c = row[col] % p;
    row[col] = 0;
    if c == 0 {
        return;
    }
    let mc = p - c;
    for (x, &y) in row[col + 1..].iter_mut().zip(&piv[col + 1..]) {
        *x += mc * y;
    }
}

fn eliminate_rows(rows: &mut [Vec<u64>], piv: &[u64], col: usize, p: u64, exec: Exec) {
    #[cfg(feature = "parallel")]
    if exec == Exec::Parallel && rows.len() * (piv.len() - col) >= PAR_THRESHOLD {
        use rayon::prelude::*;
        rows.par_iter_mut()
            .for_each(|r| eliminate_row(r, piv, col, p));
        return;
    }
    let _ = exec;
    for r in rows.iter_mut() {
        eliminate_row(r, piv, col, p);
    }
}

fn reduce_all(rows: &mut [Vec<u64>], p: u64) {
    for r in rows {
        for x in r.iter_mut() {
            *x %= p;
        }
    }
}

/// Gaussian elimination of `rows` (each of length `ncols`).
pub fn row_echelon(
    k: PrimeField,
    rows: Vec<Vec<FieldElem>>,
    ncols: usize,
    reduced: bool,
    exec: Exec,
) -> Echelon {
    let p = k.p() as u64;
    let budget = reduce_budget(p);
    let mut m: Vec<Vec<u64>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(|x| x as u64).collect())
        .collect();
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    let mut since_reduce = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let mut found = None;
        for (i, row) in m.iter_mut().enumerate().skip(r) {
            row[col] %= p;
            if row[col] != 0 {
                found = Some(i);
                break;
            }
        }
        let Some(i) = found else { continue };
        m.swap(r, i);
        if since_reduce >= budget {
            reduce_all(&mut m[r..], p);
            since_reduce = 0;
        }
        let inv = k.inv((m[r][col] % p) as u32) as u64;
        for x in m[r][col..].iter_mut() {
            *x = (*x % p) * inv % p;
        }
        let (head, tail) = m.split_at_mut(r + 1);
        eliminate_rows(tail, &head[r], col, p, exec);
        since_reduce += 1;
        pivots.push(col);
        r += 1;
    }
    m.truncate(r);
    reduce_all(&mut m, p);
    if reduced {
        // back substitution, last pivot first
        let mut since = 0;
        for idx in (0..r).rev() {
            let col = pivots[idx];
            if since >= budget {
                reduce_all(&mut m[..idx], p);
                since = 0;
            }
            let (head, tail) = m.split_at_mut(idx);
            // earlier steps accumulated into this row
            for x in tail[0].iter_mut() {
                *x %= p;
            }
            eliminate_rows(head, &tail[0], col, p, exec);
            since += 1;
        }
        reduce_all(&mut m, p);
    }
    Echelon {
        ncols,
        pivots,
        rows: m
            .into_iter()
            .map(|r| r.into_iter().map(|x| x as u32).collect())
            .collect(),
        reduced,
    }
}

/// A growing set of independent vectors kept in echelon form.
#[derive(Clone, Debug)]
pub struct IncrementalBasis {
    k: PrimeField,
    ncols: usize,
    rows: Vec<(usize, Vec<FieldElem>)>,
}

impl IncrementalBasis {
    pub fn new(k: PrimeField, ncols: usize) -> Self {
        IncrementalBasis {
            k,
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    /// Residue of `v` after reduction against the current rows.
    pub fn residue(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        let p = self.k.p() as u64;
        let mut acc: Vec<u64> = v.iter().map(|&x| x as u64).collect();
        let budget = reduce_budget(p);
        for (n, (pc, row)) in self.rows.iter().enumerate() {
            if n % budget == budget - 1 {
                acc.iter_mut().for_each(|x| *x %= p);
            }
            let c = acc[*pc] % p;
            acc[*pc] = 0;
            if c == 0 {
                continue;
            }
            let mc = p - c;
            for (x, &y) in acc[pc + 1..].iter_mut().zip(&row[pc + 1..]) {
                *x += mc * y as u64;
            }
        }
        acc.into_iter().map(|x| (x % p) as u32).collect()
    }

    /// Inserts `v`; returns whether it was independent of the current rows.
    pub fn insert(&mut self, v: &[FieldElem]) -> bool {
        if self.is_full() {
            return false;
        }
        let mut r = self.residue(v);
        let Some(pc) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.k.inv(r[pc]);
        for x in r.iter_mut() {
            *x = self.k.mul(*x, inv);
        }
        self.rows.push((pc, r));
        true
    }

    pub fn contains(&self, v: &[FieldElem]) -> bool {
        self.residue(v).iter().all(|&x| x == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k() -> PrimeField {
        PrimeField::new(32003).unwrap()
    }

    #[test]
    fn kernel_of_small_matrix() {
        let k = k();
        let a = Matrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6]], 3);
        let ker = a.kernel(k, Exec::Sequential);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(a.mul_vec(k, v).iter().all(|&x| x == 0));
        }
        assert_eq!(a.rank(k, Exec::Sequential), 1);
    }

    #[test]
    fn det_and_solve() {
        let k = PrimeField::new(7).unwrap();
        let a = Matrix::from_rows(&[vec![2, 1], vec![1, 1]], 2);
        assert_eq!(a.det(k), 1);
        let x = a.solve(k, &[3, 2]).unwrap();
        assert_eq!(a.mul_vec(k, &x), vec![3, 2]);
        let s = Matrix::from_rows(&[vec![1, 1], vec![1, 1]], 2);
        assert!(s.solve(k, &[1, 2]).is_none());
    }

    #[test]
    fn lazy_reduction_survives_large_primes() {
        let k = PrimeField::new(2147483647).unwrap();
        let n = 40;
        let mut a = Matrix::zeros(n, n);
        let mut s = 12345u64;
        for i in 0..n {
            for j in 0..n {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                a.set(i, j, ((s >> 33) % k.p() as u64) as u32);
            }
        }
        let inv_rows = row_echelon(k, a.clone().into_rows(), n, true, Exec::Sequential);
        assert_eq!(inv_rows.rank(), n);
        assert_eq!(a.rank(k, Exec::Sequential), n);
    }

    proptest! {
        #[test]
        fn sequential_and_parallel_agree(seed in any::<u64>(), rows in 1usize..30, cols in 1usize..30) {
            let k = k();
            let mut s = seed;
            let mut a = Matrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    // sparse-ish so that rank deficiency happens
                    let v = (s >> 33) % 5;
                    a.set(i, j, if v < 2 { 0 } else { (v as u32 * 7919) % k.p() });
                }
            }
            let e1 = row_echelon(k, a.clone().into_rows(), cols, true, Exec::Sequential);
            let e2 = row_echelon(k, a.clone().into_rows(), cols, true, Exec::Parallel);
            prop_assert_eq!(&e1.rows, &e2.rows);
            for v in e1.nullspace(k) {
                prop_assert!(a.mul_vec(k, &v).iter().all(|&x| x == 0));
            }
            prop_assert_eq!(e1.rank() + e1.nullspace(k).len(), cols);
            let mut inc = IncrementalBasis::new(k, cols);
            for i in 0..rows {
                inc.insert(a.row(i));
            }
            prop_assert_eq!(inc.len(), e1.rank());
        }
    }
}
