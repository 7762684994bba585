//! Dense linear algebra over the prime field `F_p`.

use std::fmt;

use super::arith::{check_prime, mod_inverse, residue};
use crate::error::{Error, Result};
use crate::ExactMatrix;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModPMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

/// Result of [`ModPMatrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPRref {
    pub rank: usize,
    pub pivots: Vec<usize>,
    /// Nonzero rows of the reduced row-echelon form.
    pub row_basis: Vec<Vec<u64>>,
    /// One kernel vector per free column.
    pub kernel: Vec<Vec<u64>>,
}

pub fn rref_modp(m: &ModPMatrix) -> ModPRref {
    m.rref()
}

/// Solutions of `a x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolutionSet {
    Inconsistent,
    /// `particular + span(directions)`.
    Affine {
        particular: Vec<u64>,
        directions: Vec<Vec<u64>>,
    },
}

impl SolutionSet {
    pub fn is_unique(&self) -> bool {
        matches!(self, SolutionSet::Affine { directions, .. } if directions.is_empty())
    }

    pub fn dimension(&self) -> Option<usize> {
        match self {
            SolutionSet::Inconsistent => None,
            SolutionSet::Affine { directions, .. } => Some(directions.len()),
        }
    }
}

impl ModPMatrix {
    pub fn new(p: u64, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        check_prime(p)?;
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(ModPMatrix {
            p,
            rows,
            cols,
            data: data.into_iter().map(|x| x % p).collect(),
        })
    }

    pub fn from_i64_rows(p: u64, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let pi = p as i64;
        Self::new(
            p,
            r,
            c,
            rows.iter()
                .flatten()
                .map(|&x| x.rem_euclid(pi) as u64)
                .collect(),
        )
    }

    /// Matrix whose rows are the given residue vectors.
    pub fn from_rows(p: u64, rows: &[Vec<u64>], cols: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(
            p,
            rows.len(),
            cols,
            rows.iter().flatten().copied().collect(),
        )
    }

    /// Reduction of an `ell`-integral rational matrix.
    pub fn from_rational(m: &ExactMatrix, p: u64) -> Result<Self> {
        check_prime(p)?;
        let mut data = Vec::with_capacity(m.rows() * m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                data.push(residue(m.get(i, j), p).map_err(|_| Error::NotEllIntegral {
                    row: i,
                    col: j,
                    ell: p,
                })?);
            }
        }
        Self::new(p, m.rows(), m.cols(), data)
    }

    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        ModPMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<u64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows || self.p != rhs.p {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} (mod {}) by {}x{} (mod {})",
                self.rows, self.cols, self.p, rhs.rows, rhs.cols, rhs.p
            )));
        }
        let mut out = Self::zeros(self.p, self.rows, rhs.cols);
        for i in 0..self.rows {
            let mut acc = vec![0u128; rhs.cols];
            for k in 0..self.cols {
                let a = self.get(i, k) as u128;
                if a == 0 {
                    continue;
                }
                for (j, slot) in acc.iter_mut().enumerate() {
                    *slot += a * rhs.get(k, j) as u128;
                }
            }
            for (j, v) in acc.into_iter().enumerate() {
                out.data[i * rhs.cols + j] = (v % self.p as u128) as u64;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                let s: u128 = row
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as u128 * b as u128)
                    .sum();
                (s % self.p as u128) as u64
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols, self.p), (rhs.rows, rhs.cols, rhs.p));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a + b) % self.p)
            .collect();
        ModPMatrix {
            data,
            ..self.clone()
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols, self.p), (rhs.rows, rhs.cols, rhs.p));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a + self.p - b) % self.p)
            .collect();
        ModPMatrix {
            data,
            ..self.clone()
        }
    }

    pub fn scale(&self, c: u64) -> Self {
        let c = c % self.p;
        let data = self
            .data
            .iter()
            .map(|&a| ((a as u128 * c as u128) % self.p as u128) as u64)
            .collect();
        ModPMatrix {
            data,
            ..self.clone()
        }
    }

    /// Kronecker product, `self` giving the outer blocks.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (r, c) = (self.rows * rhs.rows, self.cols * rhs.cols);
        let mut out = Self::zeros(self.p, r, c);
        for i in 0..r {
            for j in 0..c {
                let v = self.get(i / rhs.rows, j / rhs.cols) as u128
                    * rhs.get(i % rhs.rows, j % rhs.cols) as u128;
                out.data[i * c + j] = (v % self.p as u128) as u64;
            }
        }
        out
    }

    /// Entries stacked column after column.
    pub fn vectorize(&self) -> Vec<u64> {
        (0..self.cols)
            .flat_map(|j| (0..self.rows).map(move |i| self.get(i, j)))
            .collect()
    }

    pub fn from_vectorized(p: u64, rows: usize, cols: usize, v: &[u64]) -> Self {
        let mut m = Self::zeros(p, rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.data[i * cols + j] = v[j * rows + i] % p;
            }
        }
        m
    }

    pub fn rref(&self) -> ModPRref {
        let p = self.p;
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(piv) = (r..rows).find(|&i| m[i * cols + c] != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..cols {
                    m.swap(piv * cols + j, r * cols + j);
                }
            }
            let inv = mod_inverse(m[r * cols + c], p);
            for j in c..cols {
                m[r * cols + j] = mul_mod(m[r * cols + j], inv, p);
            }
            for i in 0..rows {
                let f = m[i * cols + c];
                if i == r || f == 0 {
                    continue;
                }
                for j in c..cols {
                    let rj = m[r * cols + j];
                    if rj != 0 {
                        m[i * cols + j] = (m[i * cols + j] + p - mul_mod(f, rj, p)) % p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let row_basis: Vec<Vec<u64>> = (0..r)
            .map(|i| m[i * cols..(i + 1) * cols].to_vec())
            .collect();
        let kernel = (0..cols)
            .filter(|c| !pivots.contains(c))
            .map(|f| {
                let mut v = vec![0u64; cols];
                v[f] = 1 % p;
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = (p - row_basis[i][f]) % p;
                }
                v
            })
            .collect();
        ModPRref {
            rank: r,
            pivots,
            row_basis,
            kernel,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    pub fn kernel(&self) -> Vec<Vec<u64>> {
        self.rref().kernel
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Shape("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Self::zeros(self.p, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i * 2 * n + j] = self.get(i, j);
            }
            aug.data[i * 2 * n + n + i] = 1 % self.p;
        }
        let r = aug.rref();
        if r.rank < n || r.pivots[n - 1] >= n {
            return Err(Error::Singular);
        }
        let data = r
            .row_basis
            .iter()
            .flat_map(|row| row[n..].to_vec())
            .collect();
        Self::new(self.p, n, n, data)
    }

    /// Solves `self * x = b` for a single right-hand column `b`.
    pub fn solve(&self, b: &ModPMatrix) -> Result<SolutionSet> {
        if b.p != self.p {
            return Err(Error::PrimeMismatch(self.p, b.p));
        }
        if b.rows != self.rows || b.cols != 1 {
            return Err(Error::Shape(format!(
                "right-hand side must be {}x1, got {}x{}",
                self.rows, b.rows, b.cols
            )));
        }
        let n = self.cols;
        let mut aug = Self::zeros(self.p, self.rows, n + 1);
        for i in 0..self.rows {
            for j in 0..n {
                aug.data[i * (n + 1) + j] = self.get(i, j);
            }
            aug.data[i * (n + 1) + n] = b.get(i, 0);
        }
        let r = aug.rref();
        if r.pivots.contains(&n) {
            return Ok(SolutionSet::Inconsistent);
        }
        let mut particular = vec![0u64; n];
        for (i, &pc) in r.pivots.iter().enumerate() {
            particular[pc] = r.row_basis[i][n];
        }
        Ok(SolutionSet::Affine {
            particular,
            directions: self.kernel(),
        })
    }
}

pub fn solve_linear_modp(a: &ModPMatrix, b: &ModPMatrix) -> Result<SolutionSet> {
    a.solve(b)
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

impl fmt::Debug for ModPMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ModPMatrix {}x{} mod {} [", self.rows, self.cols, self.p)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Subspace of `F_p^n` held by its reduced row-echelon basis, so equal
/// subspaces compare and hash equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Subspace {
    dim_ambient: usize,
    p: u64,
    basis: Vec<Vec<u64>>,
}

impl Subspace {
    pub fn span(p: u64, dim_ambient: usize, vectors: &[Vec<u64>]) -> Self {
        let basis = if vectors.is_empty() {
            Vec::new()
        } else {
            ModPMatrix::from_rows(p, vectors, dim_ambient)
                .expect("vector length")
                .rref()
                .row_basis
        };
        Subspace {
            dim_ambient,
            p,
            basis,
        }
    }

    pub fn zero(p: u64, dim_ambient: usize) -> Self {
        Subspace {
            dim_ambient,
            p,
            basis: Vec::new(),
        }
    }

    pub fn full(p: u64, dim_ambient: usize) -> Self {
        let id = ModPMatrix::identity(p, dim_ambient);
        Subspace {
            dim_ambient,
            p,
            basis: (0..dim_ambient).map(|i| id.row(i)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim_ambient
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn is_proper_nonzero(&self) -> bool {
        self.dim() > 0 && self.dim() < self.dim_ambient
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|r| r.iter().position(|&x| x != 0).expect("nonzero row"))
            .collect()
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        reduce_by_rref(&mut w, &self.basis, &self.pivots(), self.p);
        w.iter().all(|&x| x == 0)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::span(self.p, self.dim_ambient, &vs)
    }

    pub fn is_stable_under(&self, g: &ModPMatrix) -> bool {
        self.basis.iter().all(|b| self.contains(&g.mul_vec(b)))
    }
}

pub(crate) fn reduce_by_rref(v: &mut [u64], basis: &[Vec<u64>], pivots: &[usize], p: u64) {
    for (row, &pc) in basis.iter().zip(pivots) {
        let f = v[pc];
        if f == 0 {
            continue;
        }
        for (x, &r) in v.iter_mut().zip(row) {
            if r != 0 {
                *x = (*x + p - mul_mod(f, r, p)) % p;
            }
        }
    }
}

/// Incrementally grown basis in semi-echelon form (each row has a unit
/// pivot that is zero in every later row).
#[derive(Clone, Debug)]
pub struct EchelonBuilder {
    p: u64,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl EchelonBuilder {
    pub fn new(p: u64) -> Self {
        EchelonBuilder {
            p,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// Reduces `v` against the basis; the residue is zero iff `v` is in the span.
    pub fn reduce(&self, v: &mut [u64]) {
        let p = self.p;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let f = v[pc];
            if f == 0 {
                continue;
            }
            for (x, &r) in v.iter_mut().zip(row) {
                if r != 0 {
                    *x = (*x + p - mul_mod(f, r, p)) % p;
                }
            }
        }
    }

    /// Adds `v` if it is independent; returns whether it was added.
    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        self.reduce(&mut v);
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = mod_inverse(v[pc], self.p);
        for x in v.iter_mut() {
            *x = mul_mod(*x, inv, self.p);
        }
        self.rows.push(v);
        self.pivots.push(pc);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_mod_5_has_full_rank() {
        let r = ModPMatrix::identity(5, 3).rref();
        assert_eq!(r.rank, 3);
        assert!(r.kernel.is_empty());
    }

    #[test]
    fn zero_mod_3_has_full_kernel() {
        let r = ModPMatrix::zeros(3, 2, 2).rref();
        assert_eq!(r.rank, 0);
        assert_eq!(r.kernel.len(), 2);
    }

    #[test]
    fn rank_one_kernel_is_multiple_of_2_minus_1() {
        let m = ModPMatrix::from_i64_rows(5, &[vec![1, 2], vec![2, 4]]).unwrap();
        let r = m.rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.kernel.len(), 1);
        let k = &r.kernel[0];
        assert_eq!(m.mul_vec(k), vec![0, 0]);
        // proportional to (2, -1) = (2, 4)
        let target = [2u64, 4];
        assert!((1..5).any(|c| k.iter().map(|x| x * c % 5).eq(target.iter().copied())));
    }

    #[test]
    fn composite_modulus_rejected() {
        assert!(matches!(
            ModPMatrix::new(4, 1, 1, vec![1]),
            Err(Error::NotPrime(4))
        ));
    }

    #[test]
    fn solve_identity_is_unique() {
        let a = ModPMatrix::identity(7, 3);
        let b = ModPMatrix::new(7, 3, 1, vec![3, 0, 6]).unwrap();
        assert_eq!(
            a.solve(&b).unwrap(),
            SolutionSet::Affine {
                particular: vec![3, 0, 6],
                directions: vec![]
            }
        );
    }

    #[test]
    fn solve_zero_system_is_everything() {
        let a = ModPMatrix::zeros(3, 2, 2);
        let b = ModPMatrix::zeros(3, 2, 1);
        assert_eq!(a.solve(&b).unwrap().dimension(), Some(2));
    }

    #[test]
    fn solve_one_row_mod_2_matches_exhaustive_scan() {
        let a = ModPMatrix::from_i64_rows(2, &[vec![1, 1]]).unwrap();
        let b = ModPMatrix::zeros(2, 1, 1);
        let SolutionSet::Affine {
            particular,
            directions,
        } = a.solve(&b).unwrap()
        else {
            panic!()
        };
        let mut reported = std::collections::BTreeSet::new();
        for t in 0..2u64 {
            let x: Vec<u64> = particular
                .iter()
                .zip(&directions[0])
                .map(|(p, d)| (p + t * d) % 2)
                .collect();
            reported.insert(x);
        }
        let exhaustive: std::collections::BTreeSet<Vec<u64>> = (0..4u64)
            .map(|k| vec![k & 1, k >> 1])
            .filter(|x| a.mul_vec(x) == vec![0])
            .collect();
        assert_eq!(reported, exhaustive);
    }

    #[test]
    fn inconsistent_and_shape_errors() {
        let a = ModPMatrix::zeros(3, 1, 2);
        let b = ModPMatrix::new(3, 1, 1, vec![1]).unwrap();
        assert_eq!(a.solve(&b).unwrap(), SolutionSet::Inconsistent);
        let bad = ModPMatrix::zeros(3, 2, 1);
        assert!(matches!(a.solve(&bad), Err(Error::Shape(_))));
    }

    #[test]
    fn inverse_round_trip() {
        let a = ModPMatrix::from_i64_rows(7, &[vec![1, 2], vec![3, 4]]).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), ModPMatrix::identity(7, 2));
    }

    #[test]
    fn subspaces_are_canonical() {
        let a = Subspace::span(3, 3, &[vec![1, 1, 0], vec![0, 1, 1]]);
        let b = Subspace::span(3, 3, &[vec![1, 2, 2], vec![2, 0, 1]]);
        assert_eq!(a.dim(), 2);
        assert_eq!(a == b, a.contains(&[1, 2, 2]) && a.contains(&[2, 0, 1]));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rank_nullity_and_kernel(p in prop::sample::select(vec![2u64, 3, 5, 7]),
                                       r in 1usize..6, c in 1usize..6,
                                       seed in proptest::collection::vec(0u64..50, 36)) {
                let m = ModPMatrix::new(p, r, c, seed[..r * c].to_vec()).unwrap();
                let rr = m.rref();
                prop_assert_eq!(rr.rank + rr.kernel.len(), c);
                for k in &rr.kernel {
                    prop_assert!(m.mul_vec(k).iter().all(|&x| x == 0));
                }
            }
        }
    }
}
