//! Dense exact linear algebra over prime fields.
//!
//! Matrices are small (cochain spaces of desk-scale nerves), so everything is
//! plain row reduction on a `Vec<u32>`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("vector {index} of the subspace is not contained in the ambient span")]
    NotASubspace { index: usize },
}

/// The field F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub const F2: PrimeField = PrimeField { p: 2 };
    pub const F3: PrimeField = PrimeField { p: 3 };

    /// Validates primality by trial division.
    pub fn new(p: u64) -> Result<Self, LinalgError> {
        if p < 2 || p > i32::MAX as u64 {
            return Err(LinalgError::NonPrimeModulus(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return Err(LinalgError::NonPrimeModulus(p));
            }
            d += 1;
        }
        Ok(PrimeField { p: p as u32 })
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.p) {
            return None;
        }
        // a^(p-2)
        let mut base = a as u64 % self.p as u64;
        let mut exp = self.p as u64 - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p as u64;
            }
            base = base * base % self.p as u64;
            exp >>= 1;
        }
        Some(acc as u32)
    }

    /// (-1)^k as a field element.
    pub fn sign(self, k: usize) -> u32 {
        if k.is_multiple_of(2) {
            1
        } else {
            self.p - 1
        }
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField::F2
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// A dense `rows x cols` matrix over F_p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FMatrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Rref {
    pub matrix: FMatrix,
    pub pivots: Vec<usize>,
}

impl FMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds from signed integer rows, reducing mod p. All rows must share a length.
    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(field, rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, field.reduce(v));
            }
        }
        m
    }

    /// Builds a `rows x columns.len()` matrix whose columns are the given vectors.
    pub fn from_columns(field: PrimeField, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (r, &v) in col.iter().enumerate() {
                m.set(r, c, v % field.p);
            }
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
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
        self.data[r * self.cols + c] = v % self.field.p;
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: u32) {
        let cur = self.get(r, c);
        self.set(r, c, self.field.add(cur, v));
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> FMatrix {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Matrix product `self * rhs`. Panics on a shape mismatch.
    pub fn mul(&self, rhs: &FMatrix) -> FMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        assert_eq!(self.field, rhs.field, "matrix product over different fields");
        let p = self.field.p as u64;
        let mut out = Self::zeros(self.field, self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c) as u64;
                    if b != 0 {
                        let i = r * out.cols + c;
                        out.data[i] = ((out.data[i] as u64 + a * b) % p) as u32;
                    }
                }
            }
        }
        out
    }

    /// Matrix-vector product. Panics if `v.len() != cols`.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "matrix-vector shape mismatch");
        let p = self.field.p as u64;
        (0..self.rows)
            .map(|r| {
                let s = self.row(r).iter().zip(v).fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p);
                s as u32
            })
            .collect()
    }

    pub fn add(&self, rhs: &FMatrix) -> FMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape mismatch");
        let mut out = self.clone();
        for (o, &b) in out.data.iter_mut().zip(&rhs.data) {
            *o = self.field.add(*o, b);
        }
        out
    }

    pub fn sub(&self, rhs: &FMatrix) -> FMatrix {
        self.add(&rhs.scale(self.field.neg(1)))
    }

    pub fn scale(&self, k: u32) -> FMatrix {
        let mut out = self.clone();
        for o in out.data.iter_mut() {
            *o = self.field.mul(*o, k);
        }
        out
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &FMatrix) -> FMatrix {
        assert_eq!(self.rows, rhs.rows, "hstack row mismatch");
        let mut out = Self::zeros(self.field, self.rows, self.cols + rhs.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..rhs.cols {
                out.set(r, self.cols + c, rhs.get(r, c));
            }
        }
        out
    }

    /// Stacks blocks vertically; all blocks must share a column count.
    pub fn vstack(field: PrimeField, cols: usize, blocks: &[FMatrix]) -> FMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut out = Self::zeros(field, rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            out.data[off * cols..(off + b.rows) * cols].copy_from_slice(&b.data);
            off += b.rows;
        }
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, block: &FMatrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c));
            }
        }
    }

    pub fn block_diagonal(field: PrimeField, blocks: &[FMatrix]) -> FMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.put_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn rref(&self) -> Rref {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if piv != row {
                for c in 0..m.cols {
                    m.data.swap(piv * m.cols + c, row * m.cols + c);
                }
            }
            let inv = f.inv(m.get(row, col)).expect("nonzero pivot");
            for c in col..m.cols {
                let v = f.mul(m.get(row, c), inv);
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// `(rank, nullity)` with `rank + nullity = cols`.
    pub fn rank_nullity(&self) -> (usize, usize) {
        let r = self.rank();
        (r, self.cols - r)
    }

    /// A basis of the null space, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let f = self.field;
        let Rref { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0u32; self.cols];
                v[fc] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(matrix.get(r, fc));
                }
                v
            })
            .collect()
    }

    /// An independent subset of the columns spanning the column space.
    pub fn column_space_basis(&self) -> Vec<Vec<u32>> {
        self.rref().pivots.iter().map(|&c| self.column(c)).collect()
    }

    /// Solves `self * x = b`. Returns `Ok(None)` when the system is inconsistent.
    pub fn solve(&self, b: &[u32]) -> Result<Option<Vec<u32>>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.rows, actual: b.len() });
        }
        let aug = self.hstack(&FMatrix::from_columns(self.field, self.rows, &[b.to_vec()]));
        let Rref { matrix, pivots } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0u32; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = matrix.get(r, self.cols);
        }
        Ok(Some(x))
    }

    /// Inverse of a square matrix, if it is invertible.
    pub fn inverse(&self) -> Option<FMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let Rref { matrix, pivots } = self.hstack(&FMatrix::identity(self.field, n)).rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = FMatrix::zeros(self.field, n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, matrix.get(r, n + c));
            }
        }
        Some(inv)
    }
}

/// Free-function form of [`FMatrix::rank_nullity`].
pub fn rank_nullity(a: &FMatrix) -> (usize, usize) {
    a.rank_nullity()
}

/// Free-function form of [`FMatrix::kernel_basis`].
pub fn kernel_basis(a: &FMatrix) -> Vec<Vec<u32>> {
    a.kernel_basis()
}

/// Free-function form of [`FMatrix::solve`].
pub fn solve_linear(a: &FMatrix, b: &[u32]) -> Result<Option<Vec<u32>>, LinalgError> {
    a.solve(b)
}

/// `dim span(z) - dim span(b)`, after checking `span(b) ⊆ span(z)`.
///
/// Both arguments are lists of vectors in a common ambient space of dimension
/// `ambient`.
pub fn quotient_dim(field: PrimeField, ambient: usize, z: &[Vec<u32>], b: &[Vec<u32>]) -> Result<usize, LinalgError> {
    let zm = FMatrix::from_columns(field, ambient, z);
    let rz = zm.rank();
    let mut acc = zm;
    for (i, v) in b.iter().enumerate() {
        let next = acc.hstack(&FMatrix::from_columns(field, ambient, std::slice::from_ref(v)));
        if next.rank() > rz {
            return Err(LinalgError::NotASubspace { index: i });
        }
        acc = next;
    }
    let rb = FMatrix::from_columns(field, ambient, b).rank();
    Ok(rz - rb)
}

#[cfg(test)]
mod tests {
    use super::*;

    const F2: PrimeField = PrimeField::F2;

    /// Coboundary δ⁰ of the 4-cycle a-b-c-d (edges ab, ad, bc, cd; vertices a,b,c,d).
    fn four_cycle_delta0() -> FMatrix {
        FMatrix::from_rows(
            F2,
            &[
                vec![-1, 1, 0, 0], // ab
                vec![-1, 0, 0, 1], // ad
                vec![0, -1, 1, 0], // bc
                vec![0, 0, -1, 1], // cd
            ],
        )
    }

    /// Brute-force rank over F_2: log2 of the number of distinct images.
    fn brute_rank_f2(m: &FMatrix) -> usize {
        let mut images = std::collections::BTreeSet::new();
        for mask in 0u32..(1 << m.cols()) {
            let v: Vec<u32> = (0..m.cols()).map(|i| (mask >> i) & 1).collect();
            images.insert(m.apply(&v));
        }
        images.len().trailing_zeros() as usize
    }

    #[test]
    fn primality() {
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(7).is_ok());
        assert_eq!(PrimeField::new(4), Err(LinalgError::NonPrimeModulus(4)));
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(0).is_err());
    }

    #[test]
    fn field_arithmetic() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        assert_eq!(f.inv(0), None);
        assert_eq!(f.reduce(-1), 6);
        assert_eq!(f.sign(3), 6);
    }

    #[test]
    fn rank_nullity_cases() {
        assert_eq!(FMatrix::zeros(F2, 3, 3).rank_nullity(), (0, 3));
        assert_eq!(FMatrix::identity(F2, 4).rank_nullity(), (4, 0));
        let d = four_cycle_delta0();
        assert_eq!(brute_rank_f2(&d), 3);
        assert_eq!(d.rank(), 3);
    }

    #[test]
    fn kernel_cases() {
        assert!(FMatrix::identity(F2, 3).kernel_basis().is_empty());
        let k = FMatrix::zeros(F2, 2, 3).kernel_basis();
        assert_eq!(k, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        // δ¹ on the 4-cycle maps into C² = 0
        let delta1 = FMatrix::zeros(F2, 0, 4);
        let mut count = 0;
        for mask in 0u32..16 {
            let v: Vec<u32> = (0..4).map(|i| (mask >> i) & 1).collect();
            if delta1.apply(&v).iter().all(|&x| x == 0) {
                count += 1;
            }
        }
        assert_eq!(count, 16);
        assert_eq!(delta1.kernel_basis().len(), 4);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let f = PrimeField::new(5).unwrap();
        let m = FMatrix::from_rows(f, &[vec![1, 2, 3, 4], vec![2, 4, 1, 3], vec![3, 1, 4, 2]]);
        let (_, null) = m.rank_nullity();
        let k = m.kernel_basis();
        assert_eq!(k.len(), null);
        for v in &k {
            assert!(m.apply(v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn solve_cases() {
        let b = vec![1, 0, 1];
        assert_eq!(FMatrix::identity(F2, 3).solve(&b).unwrap(), Some(b.clone()));
        assert_eq!(FMatrix::zeros(F2, 3, 3).solve(&b).unwrap(), None);
        assert!(matches!(FMatrix::identity(F2, 2).solve(&b), Err(LinalgError::DimensionMismatch { .. })));
        // 1-cochain with a single odd edge on the 4-cycle is not a coboundary;
        // brute force over all 2^4 vertex assignments agrees.
        let d = four_cycle_delta0();
        let g = vec![0, 0, 0, 1];
        let brute = (0u32..16).any(|mask| {
            let v: Vec<u32> = (0..4).map(|i| (mask >> i) & 1).collect();
            d.apply(&v) == g
        });
        assert!(!brute);
        assert_eq!(d.solve(&g).unwrap(), None);
    }

    #[test]
    fn quotient_dim_cases() {
        let z: Vec<Vec<u32>> = FMatrix::identity(F2, 4).kernel_basis(); // empty
        assert_eq!(quotient_dim(F2, 4, &z, &z).unwrap(), 0);
        let all: Vec<Vec<u32>> = FMatrix::zeros(F2, 0, 4).kernel_basis();
        let cob = four_cycle_delta0().column_space_basis();
        assert_eq!(quotient_dim(F2, 4, &all, &cob).unwrap(), 1);
        assert_eq!(quotient_dim(F2, 4, &all, &[]).unwrap(), 4);
        let small = vec![vec![1, 0, 0, 0]];
        assert_eq!(quotient_dim(F2, 4, &small, &[vec![0, 1, 0, 0]]), Err(LinalgError::NotASubspace { index: 0 }));
    }

    #[test]
    fn inverse_round_trip() {
        let f = PrimeField::new(5).unwrap();
        let a = FMatrix::from_rows(f, &[vec![1, 2], vec![3, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), FMatrix::identity(f, 2));
        assert!(FMatrix::from_rows(f, &[vec![1, 2], vec![2, 4]]).inverse().is_none());
        assert!(FMatrix::zeros(f, 2, 3).inverse().is_none());
    }
}
