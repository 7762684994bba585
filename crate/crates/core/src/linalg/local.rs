//! Echelon and Hermite forms over `Z_(ℓ)`, the integers localized at ℓ.
//!
//! `Z_(ℓ)` is a discrete valuation ring, so the entry of least ℓ-valuation in
//! a column divides every other entry of that column. Elimination with such
//! pivots keeps every row operation invertible over `Z_(ℓ)`, which means the
//! ℓ-local span of the input vectors is preserved exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::arith::{ell_pow, valuation_ell};
use crate::Rat;

/// Basis of a `Z_(ℓ)`-submodule of `Q^n` in echelon form.
#[derive(Clone, Debug)]
pub struct LocalBasis {
    ell: u64,
    dim: usize,
    rows: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
}

impl LocalBasis {
    pub fn new(ell: u64, dim: usize) -> Self {
        LocalBasis {
            ell,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_vectors(ell: u64, dim: usize, vectors: impl IntoIterator<Item = Vec<Rat>>) -> Self {
        let mut b = Self::new(ell, dim);
        for v in vectors {
            b.insert(v);
        }
        b
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[Vec<Rat>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// ℓ-valuations of the pivot entries.
    pub fn pivot_valuations(&self) -> Vec<i64> {
        self.rows
            .iter()
            .zip(&self.pivots)
            .map(|(r, &c)| valuation_ell(&r[c], self.ell).expect("nonzero pivot"))
            .collect()
    }

    /// Adds `v` to the generating set; returns whether the module grew.
    pub fn insert(&mut self, mut v: Vec<Rat>) -> bool {
        assert_eq!(v.len(), self.dim, "vector length");
        let mut changed = false;
        while let Some(c) = v.iter().position(|x| !x.is_zero()) {
            match self.pivots.binary_search(&c) {
                Ok(k) => {
                    let vv = valuation_ell(&v[c], self.ell).expect("nonzero");
                    let vp = valuation_ell(&self.rows[k][c], self.ell).expect("nonzero");
                    if vv < vp {
                        normalize_pivot(&mut v, c, self.ell);
                        std::mem::swap(&mut v, &mut self.rows[k]);
                        changed = true;
                    }
                    let q = &v[c] / &self.rows[k][c];
                    axpy(&mut v, &q, &self.rows[k]);
                }
                Err(k) => {
                    normalize_pivot(&mut v, c, self.ell);
                    self.rows.insert(k, v);
                    self.pivots.insert(k, c);
                    return true;
                }
            }
        }
        changed
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        let mut v = v.to_vec();
        while let Some(c) = v.iter().position(|x| !x.is_zero()) {
            let Ok(k) = self.pivots.binary_search(&c) else {
                return false;
            };
            let q = &v[c] / &self.rows[k][c];
            if !super::arith::is_ell_integral(&q, self.ell) {
                return false;
            }
            axpy(&mut v, &q, &self.rows[k]);
        }
        true
    }

    /// Hermite normal form: pivots are powers of ℓ and every entry above a
    /// pivot is the canonical representative of its class modulo that pivot.
    /// Two bases span the same module iff their Hermite forms are equal.
    pub fn hermite(&self) -> Vec<Vec<Rat>> {
        let mut rows = self.rows.clone();
        let vals = self.pivot_valuations();
        for i in 0..rows.len() {
            for (j, &pc) in self.pivots.iter().enumerate().skip(i + 1) {
                let x = rows[i][pc].clone();
                if x.is_zero() {
                    continue;
                }
                let r = canonical_residue(&x, self.ell, vals[j]);
                let q = (&x - &r) / &rows[j][pc];
                if !q.is_zero() {
                    let (head, tail) = rows.split_at_mut(j);
                    axpy(&mut head[i], &q, &tail[0]);
                }
            }
        }
        rows
    }
}

/// Representative of `x` modulo `ℓ^k Z_(ℓ)`: `ℓ^{-s} * (x ℓ^s mod ℓ^{k+s})`
/// with `s` large enough to make both exponents nonnegative.
pub fn canonical_residue(x: &Rat, ell: u64, k: i64) -> Rat {
    if x.is_zero() {
        return Rat::zero();
    }
    let vx = valuation_ell(x, ell).expect("nonzero");
    let s = 0.max(-vx).max(-k);
    let y = x * ell_pow(ell, s);
    let modulus = num_traits::pow(BigInt::from(ell), (k + s) as usize);
    let d = y.denom().mod_floor(&modulus);
    let inv = if modulus.is_one() {
        BigInt::zero()
    } else {
        d.extended_gcd(&modulus).x.mod_floor(&modulus)
    };
    let r = (y.numer() * inv).mod_floor(&modulus);
    Rat::from_integer(r) / ell_pow(ell, s)
}

fn normalize_pivot(v: &mut [Rat], c: usize, ell: u64) {
    let val = valuation_ell(&v[c], ell).expect("nonzero");
    let unit = &v[c] / ell_pow(ell, val);
    if unit.is_one() {
        return;
    }
    for x in v.iter_mut() {
        if !x.is_zero() {
            *x = &*x / &unit;
        }
    }
}

/// v -= q * w
fn axpy(v: &mut [Rat], q: &Rat, w: &[Rat]) {
    for (x, y) in v.iter_mut().zip(w) {
        if !y.is_zero() {
            *x = &*x - q * y;
        }
    }
}
