//! Exact integer linear algebra on Z^d: dense integer matrices, Smith normal
//! form, integer kernels and exact solving of `A x = b` over Z.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// A vector of Z^d.
pub type LatticeVector = Vec<i64>;

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str("; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", self[(r, c)])?;
            }
        }
        f.write_str("]")
    }
}

impl core::ops::Index<(usize, usize)> for IntMat {
    type Output = i64;
    fn index(&self, (r, c): (usize, usize)) -> &i64 {
        &self.data[r * self.cols + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut i64 {
        &mut self.data[r * self.cols + c]
    }
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds a matrix from rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged integer matrix");
            data.extend_from_slice(row);
        }
        IntMat { rows: r, cols: c, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[LatticeVector], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, v) in cols.iter().enumerate() {
            assert_eq!(v.len(), rows, "column length mismatch");
            for (i, x) in v.iter().enumerate() {
                m[(i, j)] = *x;
            }
        }
        m
    }

    pub fn diag(entries: &[i64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = *e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> LatticeVector {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> LatticeVector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    pub fn add(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        IntMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        IntMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> IntMat {
        IntMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> i64 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                let Some(p) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                    return 0;
                };
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
                }
            }
            prev = a[k * n + k];
        }
        (sign * a[n * n - 1]) as i64
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && matches!(self.det(), 1 | -1)
    }

    /// Classical adjugate, so that `A adj(A) = det(A) I`.
    pub fn adjugate(&self) -> IntMat {
        assert!(self.is_square(), "adjugate of a non-square matrix");
        let n = self.rows;
        let mut adj = IntMat::zeros(n, n);
        if n == 1 {
            adj[(0, 0)] = 1;
            return adj;
        }
        for i in 0..n {
            for j in 0..n {
                let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                adj[(i, j)] = s * self.minor(j, i).det();
            }
        }
        adj
    }

    /// Inverse of a unimodular matrix (adjugate over Z), `None` otherwise.
    pub fn inverse_unimodular(&self) -> Option<IntMat> {
        if !self.is_unimodular() {
            return None;
        }
        let det = self.det();
        let mut inv = self.adjugate();
        for x in inv.data.iter_mut() {
            *x *= det;
        }
        Some(inv)
    }

    fn minor(&self, r: usize, c: usize) -> IntMat {
        let n = self.rows;
        let mut m = IntMat::zeros(n - 1, n - 1);
        for (ii, i) in (0..n).filter(|&i| i != r).enumerate() {
            for (jj, j) in (0..n).filter(|&j| j != c).enumerate() {
                m[(ii, jj)] = self[(i, j)];
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i64) {
        for c in 0..self.cols {
            let v = self[(src, c)];
            self[(dst, c)] += k * v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i64) {
        for r in 0..self.rows {
            let v = self[(r, src)];
            self[(r, dst)] += k * v;
        }
    }

    fn scale_row(&mut self, r: usize, k: i64) {
        for c in 0..self.cols {
            self[(r, c)] *= k;
        }
    }
}

/// Smith decomposition `left * A * right = D` with `D` diagonal,
/// `diag[i] | diag[i+1]` and `diag[i] >= 0`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: Vec<i64>,
    pub left: IntMat,
    pub right: IntMat,
    pub rank: usize,
}

pub fn smith(a: &IntMat) -> Smith {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMat::identity(m);
    let mut v = IntMat::identity(n);
    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero pivot in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = d[(i, j)].abs();
                if x != 0 && best.is_none_or(|(bi, bj)| x < d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        let mut clean = false;
        while !clean {
            clean = true;
            for i in t + 1..m {
                let q = d[(i, t)].div_euclid(d[(t, t)]);
                if q != 0 {
                    d.add_row(i, t, -q);
                    u.add_row(i, t, -q);
                }
                if d[(i, t)] != 0 {
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = d[(t, j)].div_euclid(d[(t, t)]);
                if q != 0 {
                    d.add_col(j, t, -q);
                    v.add_col(j, t, -q);
                }
                if d[(t, j)] != 0 {
                    d.swap_cols(t, j);
                    v.swap_cols(t, j);
                    clean = false;
                }
            }
            if clean {
                // divisibility of the trailing block by the pivot
                let p = d[(t, t)];
                if let Some(i) = (t + 1..m).find(|&i| (t + 1..n).any(|j| d[(i, j)] % p != 0)) {
                    d.add_row(t, i, 1);
                    u.add_row(t, i, 1);
                    clean = false;
                }
            }
        }
        if d[(t, t)] < 0 {
            d.scale_row(t, -1);
            u.scale_row(t, -1);
        }
        t += 1;
    }
    let diag: Vec<i64> = (0..m.min(n)).map(|i| d[(i, i)]).collect();
    let rank = diag.iter().take_while(|&&x| x != 0).count();
    Smith { diag, left: u, right: v, rank }
}

/// Basis (as columns) of the integer kernel `{x : A x = 0}`.
pub fn integer_kernel(a: &IntMat) -> Vec<LatticeVector> {
    let s = smith(a);
    (s.rank..a.cols).map(|j| s.right.col(j)).collect()
}

/// One integer solution of `A x = b`, if any exists.
pub fn solve_integer(a: &IntMat, b: &[i64]) -> Option<LatticeVector> {
    assert_eq!(a.rows, b.len(), "right-hand side length mismatch");
    let s = smith(a);
    let ub = s.left.mul_vec(b);
    let mut y = vec![0i64; a.cols];
    for (i, &ubi) in ub.iter().enumerate() {
        if i < s.rank {
            if ubi % s.diag[i] != 0 {
                return None;
            }
            y[i] = ubi / s.diag[i];
        } else if ubi != 0 {
            return None;
        }
    }
    Some(s.right.mul_vec(&y))
}

/// True iff the integer span of `vectors` is all of Z^d.
pub fn generates_full_lattice(vectors: &[LatticeVector], d: usize) -> bool {
    if d == 0 {
        return true;
    }
    if vectors.len() < d {
        return false;
    }
    let s = smith(&IntMat::from_cols(vectors, d));
    s.rank == d && s.diag[..d].iter().all(|&x| x == 1)
}

/// Index of the sublattice spanned by `vectors` in Z^d (0 when it is not
/// of full rank).
pub fn sublattice_index(vectors: &[LatticeVector], d: usize) -> u64 {
    let s = smith(&IntMat::from_cols(vectors, d));
    if s.rank < d {
        return 0;
    }
    s.diag[..d].iter().map(|&x| x as u64).product()
}

pub(crate) fn add_vec(a: &[i64], b: &[i64]) -> LatticeVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn sub_vec(a: &[i64], b: &[i64]) -> LatticeVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_smith(a: &IntMat) {
        let s = smith(a);
        let d = s.left.mul(a).mul(&s.right);
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if i != j {
                    assert_eq!(d[(i, j)], 0, "{a:?} -> {d:?}");
                }
            }
        }
        for i in 0..s.diag.len() {
            assert_eq!(d[(i, i)], s.diag[i]);
            assert!(s.diag[i] >= 0);
            if i + 1 < s.diag.len() && s.diag[i] != 0 {
                assert_eq!(s.diag[i + 1] % s.diag[i], 0);
            }
        }
        assert!(s.left.is_unimodular() && s.right.is_unimodular());
    }

    #[test]
    fn smith_small_cases() {
        check_smith(&IntMat::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]));
        check_smith(&IntMat::from_rows(&[vec![2, 0], vec![0, 3]]));
        check_smith(&IntMat::from_rows(&[vec![0, 0], vec![0, 0]]));
        check_smith(&IntMat::from_rows(&[vec![1, 1, 1], vec![-1, -1, 1], vec![-1, 1, -1], vec![1, -1, -1]]));
        let s = smith(&IntMat::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]));
        assert_eq!(s.diag, vec![2, 6, 12]);
        let s = smith(&IntMat::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diag, vec![1, 6]);
    }

    #[test]
    fn determinant_and_inverse() {
        let m = IntMat::from_rows(&[vec![2, 1, 0], vec![1, 1, 0], vec![0, 0, -1]]);
        assert_eq!(m.det(), -1);
        let inv = m.inverse_unimodular().unwrap();
        assert_eq!(m.mul(&inv), IntMat::identity(3));
        assert_eq!(IntMat::diag(&[2, 1]).inverse_unimodular(), None);
        assert_eq!(IntMat::from_rows(&[vec![0, 1], vec![1, 0]]).det(), -1);
    }

    #[test]
    fn kernel_and_solve() {
        // fixed lattice of sigma_z is spanned by e1
        let a = IntMat::diag(&[0, -2]);
        let k = integer_kernel(&a);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0][1], 0);
        assert_eq!(k[0][0].abs(), 1);
        let two = IntMat::diag(&[2, 0]);
        assert!(solve_integer(&two, &[1, 0]).is_none());
        assert_eq!(two.mul_vec(&solve_integer(&two, &[4, 0]).unwrap()), vec![4, 0]);
    }

    #[test]
    fn lattice_generation() {
        assert!(generates_full_lattice(&[vec![1, 0], vec![0, 1]], 2));
        assert!(!generates_full_lattice(&[vec![2, 0], vec![0, 1]], 2));
        assert_eq!(sublattice_index(&[vec![2, 0], vec![0, 1]], 2), 2);
        let bcc = [vec![1, 1, 1], vec![-1, -1, 1], vec![-1, 1, -1], vec![1, -1, -1]];
        assert_eq!(sublattice_index(&bcc, 3), 4);
    }
}
