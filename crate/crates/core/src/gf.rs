//! Dense linear algebra over a prime field F_p.
//!
//! Everything here is desk-scale (dimensions in the tens), so the
//! implementations favor clarity: plain Gaussian elimination, row-major
//! storage, u32 entries reduced mod p.

use crate::error::Error;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Multiplicative inverse mod a prime, via Fermat.
fn inv_mod(a: u64, p: u64) -> u64 {
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Row-major matrix over F_p. Matroid representations store one column per
/// element, so `cols` is usually the ground-set size.
#[derive(Clone, PartialEq, Eq)]
pub struct GfMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl GfMatrix {
    pub fn zero(p: u32, rows: usize, cols: usize) -> Self {
        assert!(is_prime(p), "field order must be prime");
        Self { p, rows, cols, data: vec![0; rows * cols] }
    }

    /// Builds a matrix whose j-th column is `columns[j]`.
    pub fn from_columns(p: u32, columns: &[Vec<u32>]) -> Result<Self, Error> {
        if !is_prime(p) {
            return Err(Error::input(format!("field order {p} is not prime")));
        }
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::zero(p, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::input(format!(
                    "column {j} has {} entries, expected {rows}",
                    col.len()
                )));
            }
            for (i, &v) in col.iter().enumerate() {
                if v >= p {
                    return Err(Error::input(format!(
                        "entry {v} in column {j} is not reduced mod {p}"
                    )));
                }
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zero(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(v < self.p);
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    /// Rank of the column subset `sel`.
    pub fn rank_of_columns(&self, sel: impl Iterator<Item = usize>) -> usize {
        let mut ech = Echelon::new(self.p, self.rows);
        for c in sel {
            ech.try_add(&self.column(c));
        }
        ech.dim()
    }

    pub fn rank(&self) -> usize {
        self.rank_of_columns(0..self.cols)
    }

    /// Basis of {x : Mx = 0}, each vector of length `cols`.
    pub fn null_space(&self) -> Vec<Vec<u32>> {
        let p = self.p as u64;
        let mut m = self.clone();
        // Forward elimination with full pivot bookkeeping.
        let mut pivot_col_of_row = Vec::new();
        let mut pivot_cols = vec![false; self.cols];
        let mut row = 0;
        for col in 0..self.cols {
            let Some(pr) = (row..self.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            for c in 0..self.cols {
                let tmp = m.get(row, c);
                m.set(row, c, m.get(pr, c));
                m.set(pr, c, tmp);
            }
            let inv = inv_mod(m.get(row, col) as u64, p);
            for c in 0..self.cols {
                m.set(row, c, (m.get(row, c) as u64 * inv % p) as u32);
            }
            for r in 0..self.rows {
                if r != row && m.get(r, col) != 0 {
                    let f = m.get(r, col) as u64;
                    for c in 0..self.cols {
                        let v = (m.get(r, c) as u64 + (p - f % p) * m.get(row, c) as u64) % p;
                        m.set(r, c, v as u32);
                    }
                }
            }
            pivot_col_of_row.push(col);
            pivot_cols[col] = true;
            row += 1;
            if row == self.rows {
                break;
            }
        }
        // One basis vector per free column.
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !pivot_cols[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (r, &pc) in pivot_col_of_row.iter().enumerate() {
                let coeff = m.get(r, free);
                v[pc] = ((p - coeff as u64) % p) as u32;
            }
            basis.push(v);
        }
        basis
    }

    pub fn invert(&self) -> Option<GfMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let p = self.p as u64;
        let mut a = self.clone();
        let mut inv = GfMatrix::identity(self.p, n);
        for col in 0..n {
            let pr = (col..n).find(|&r| a.get(r, col) != 0)?;
            for c in 0..n {
                let (x, y) = (a.get(col, c), a.get(pr, c));
                a.set(col, c, y);
                a.set(pr, c, x);
                let (x, y) = (inv.get(col, c), inv.get(pr, c));
                inv.set(col, c, y);
                inv.set(pr, c, x);
            }
            let f = inv_mod(a.get(col, col) as u64, p);
            for c in 0..n {
                a.set(col, c, (a.get(col, c) as u64 * f % p) as u32);
                inv.set(col, c, (inv.get(col, c) as u64 * f % p) as u32);
            }
            for r in 0..n {
                if r != col && a.get(r, col) != 0 {
                    let f = a.get(r, col) as u64;
                    for c in 0..n {
                        let v = (a.get(r, c) as u64 + (p - f) * a.get(col, c) as u64) % p;
                        a.set(r, c, v as u32);
                        let v = (inv.get(r, c) as u64 + (p - f) * inv.get(col, c) as u64) % p;
                        inv.set(r, c, v as u32);
                    }
                }
            }
        }
        Some(inv)
    }

    /// Any solution x of Mx = b, or None if the system is inconsistent.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let p = self.p as u64;
        let mut m = self.clone();
        let mut rhs: Vec<u32> = b.to_vec();
        let mut pivot_of_row = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            let Some(pr) = (row..self.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            for c in 0..self.cols {
                let tmp = m.get(row, c);
                m.set(row, c, m.get(pr, c));
                m.set(pr, c, tmp);
            }
            rhs.swap(row, pr);
            let inv = inv_mod(m.get(row, col) as u64, p);
            for c in 0..self.cols {
                m.set(row, c, (m.get(row, c) as u64 * inv % p) as u32);
            }
            rhs[row] = (rhs[row] as u64 * inv % p) as u32;
            for r in 0..self.rows {
                if r != row && m.get(r, col) != 0 {
                    let f = m.get(r, col) as u64;
                    for c in 0..self.cols {
                        let v = (m.get(r, c) as u64 + (p - f) * m.get(row, c) as u64) % p;
                        m.set(r, c, v as u32);
                    }
                    rhs[r] = ((rhs[r] as u64 + (p - f) * rhs[row] as u64) % p) as u32;
                }
            }
            pivot_of_row.push(col);
            row += 1;
            if row == self.rows {
                break;
            }
        }
        if rhs.iter().skip(row).any(|&x| x != 0) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (r, &col) in pivot_of_row.iter().enumerate() {
            x[col] = rhs[r];
        }
        Some(x)
    }

    /// M · v.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.p as u64;
        (0..self.rows)
            .map(|r| {
                let mut acc = 0u64;
                for c in 0..self.cols {
                    acc = (acc + self.get(r, c) as u64 * v[c] as u64) % p;
                }
                acc as u32
            })
            .collect()
    }
}

impl std::fmt::Debug for GfMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "GfMatrix(p={}, {}x{})", self.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{} ", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Incremental row-echelon basis of a growing vector family. Used for rank
/// queries, greedy independence checks, and basis extension.
#[derive(Clone)]
pub struct Echelon {
    p: u64,
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(p: u32, dim: usize) -> Self {
        Self { p: p as u64, dim, rows: Vec::new(), pivots: Vec::new() }
    }

    /// Reduces `v` against the current basis; returns the residual.
    fn reduce(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.dim);
        let mut v = v.to_vec();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            if v[piv] != 0 {
                let f = v[piv] as u64;
                for (slot, &r) in v.iter_mut().zip(row) {
                    *slot = ((*slot as u64 + (self.p - f) * r as u64) % self.p) as u32;
                }
            }
        }
        v
    }

    /// Adds `v` to the span if it is independent of it. Returns whether the
    /// dimension grew.
    pub fn try_add(&mut self, v: &[u32]) -> bool {
        let mut r = self.reduce(v);
        let Some(piv) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let f = inv_mod(r[piv] as u64, self.p);
        for slot in r.iter_mut() {
            *slot = (*slot as u64 * f % self.p) as u32;
        }
        self.rows.push(r);
        self.pivots.push(piv);
        true
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Basis of span(u) ∩ span(w) via the Zassenhaus block trick: row-reduce
/// [(u|u); (w|0)] and read the intersection from rows whose left half vanished.
pub fn intersect_spans(p: u32, dim: usize, u: &[Vec<u32>], w: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut block = GfMatrix::zero(p, u.len() + w.len(), 2 * dim);
    for (r, v) in u.iter().enumerate() {
        for (c, &x) in v.iter().enumerate() {
            block.set(r, c, x);
            block.set(r, dim + c, x);
        }
    }
    for (r, v) in w.iter().enumerate() {
        for (c, &x) in v.iter().enumerate() {
            block.set(u.len() + r, c, x);
        }
    }
    // Row reduce on the left half only; collect right halves of zero-left rows.
    let pp = p as u64;
    let rows = block.rows();
    let mut row = 0;
    for col in 0..dim {
        let Some(pr) = (row..rows).find(|&r| block.get(r, col) != 0) else {
            continue;
        };
        for c in 0..2 * dim {
            let tmp = block.get(row, c);
            block.set(row, c, block.get(pr, c));
            block.set(pr, c, tmp);
        }
        let f = inv_mod(block.get(row, col) as u64, pp);
        for c in 0..2 * dim {
            block.set(row, c, (block.get(row, c) as u64 * f % pp) as u32);
        }
        for r in 0..rows {
            if r != row && block.get(r, col) != 0 {
                let f = block.get(r, col) as u64;
                for c in 0..2 * dim {
                    let v =
                        (block.get(r, c) as u64 + (pp - f) * block.get(row, c) as u64) % pp;
                    block.set(r, c, v as u32);
                }
            }
        }
        row += 1;
    }
    let mut basis = Echelon::new(p, dim);
    let mut out = Vec::new();
    for r in 0..rows {
        if (0..dim).all(|c| block.get(r, c) == 0) {
            let right: Vec<u32> = (dim..2 * dim).map(|c| block.get(r, c)).collect();
            if basis.try_add(&right) {
                out.push(right);
            }
        }
    }
    out
}

/// Enumerates every vector in the span of `basis` (including zero), in a
/// deterministic odometer order over the coefficient tuples.
pub fn enumerate_span(p: u32, dim: usize, basis: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let pp = p as u64;
    let count = (p as u64).pow(basis.len() as u32);
    let mut out = Vec::with_capacity(count as usize);
    for mut idx in 0..count {
        let mut v = vec![0u32; dim];
        for b in basis {
            let coeff = (idx % pp) as u64;
            idx /= pp;
            if coeff != 0 {
                for (slot, &x) in v.iter_mut().zip(b) {
                    *slot = ((*slot as u64 + coeff * x as u64) % pp) as u32;
                }
            }
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_prime(2) && is_prime(3) && is_prime(7));
        assert!(!is_prime(1) && !is_prime(4) && !is_prime(9));
    }

    #[test]
    fn rank_over_f2() {
        // Columns (1,0), (0,1), (1,1): any two are a basis, all three have rank 2.
        let m = GfMatrix::from_columns(2, &[vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(m.rank_of_columns([0, 2].into_iter()), 2);
        assert_eq!(m.rank_of_columns([2].into_iter()), 1);
    }

    #[test]
    fn null_space_annihilates_and_has_right_dim() {
        let m = GfMatrix::from_columns(
            5,
            &[vec![1, 2], vec![2, 4], vec![0, 1], vec![3, 0]],
        )
        .unwrap();
        let ns = m.null_space();
        assert_eq!(ns.len(), m.cols() - m.rank());
        for v in &ns {
            assert!(m.apply(v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = GfMatrix::from_columns(7, &[vec![1, 3, 0], vec![2, 1, 1], vec![5, 0, 6]]).unwrap();
        let inv = m.invert().expect("invertible");
        for j in 0..3 {
            let mut e = vec![0u32; 3];
            e[j] = 1;
            assert_eq!(m.apply(&inv.apply(&e)), e);
        }
        let singular =
            GfMatrix::from_columns(7, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert!(singular.invert().is_none());
    }

    #[test]
    fn solve_finds_solutions_and_detects_inconsistency() {
        let m = GfMatrix::from_columns(5, &[vec![1, 2, 0], vec![0, 1, 1], vec![1, 3, 1]]).unwrap();
        let b = vec![1, 4, 2]; // = col0 + 2·col1
        let x = m.solve(&b).expect("consistent");
        assert_eq!(m.apply(&x), b);
        // (1,1) and (2,2) only span multiples of (1,1).
        let m = GfMatrix::from_columns(5, &[vec![1, 1], vec![2, 2]]).unwrap();
        assert!(m.solve(&[1, 2]).is_none());
        assert!(m.solve(&[3, 3]).is_some());
    }

    #[test]
    fn intersection_of_spans() {
        // In F_2^3: span{(1,0,0),(0,1,0)} ∩ span{(0,1,0),(0,0,1)} = span{(0,1,0)}.
        let u = vec![vec![1, 0, 0], vec![0, 1, 0]];
        let w = vec![vec![0, 1, 0], vec![0, 0, 1]];
        let l = intersect_spans(2, 3, &u, &w);
        assert_eq!(l, vec![vec![0, 1, 0]]);
    }

    #[test]
    fn intersection_dim_matches_rank_formula() {
        // dim(U ∩ W) = dim U + dim W − dim(U + W), cross-checked on a few cases.
        let u = vec![vec![1, 1, 0, 0], vec![0, 0, 1, 1]];
        let w = vec![vec![1, 1, 1, 1], vec![1, 0, 0, 0]];
        let mut all = Echelon::new(3, 4);
        let mut du = 0;
        let mut dw = 0;
        for v in &u {
            du += Echelon::new(3, 4).try_add(v) as usize; // each vector nonzero
            all.try_add(v);
        }
        let mut wu = Echelon::new(3, 4);
        for v in &w {
            dw += wu.try_add(v) as usize;
            all.try_add(v);
        }
        let expected = du + dw - all.dim();
        assert_eq!(intersect_spans(3, 4, &u, &w).len(), expected);
    }

    #[test]
    fn span_enumeration_counts() {
        let basis = vec![vec![1, 0], vec![0, 1]];
        let vecs = enumerate_span(3, 2, &basis);
        assert_eq!(vecs.len(), 9);
        let uniq: std::collections::HashSet<_> = vecs.into_iter().collect();
        assert_eq!(uniq.len(), 9);
    }

    #[test]
    fn echelon_tracks_independence() {
        let mut e = Echelon::new(2, 3);
        assert!(e.try_add(&[1, 1, 0]));
        assert!(e.try_add(&[0, 1, 1]));
        assert!(!e.try_add(&[1, 0, 1])); // sum of the first two
        assert!(e.contains(&[1, 0, 1]));
        assert!(!e.contains(&[0, 0, 1]));
        assert_eq!(e.dim(), 2);
    }
}
