//! ℓ-local lattices in `Q^m`, bilinear forms on them, dual lattices and
//! discriminant groups.
//!
//! A [`Lattice`] is stored through a rational basis but only its
//! localization at ℓ matters: containment and equality test ℓ-integrality
//! of transition matrices, so primes other than ℓ are invisible.

mod text;

pub use text::{format_form, format_lattice, parse_form, parse_lattice, read_form, read_lattice};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::arith::{
    check_prime, ell_pow, int_valuation, is_ell_integral, prime_to_ell_part, valuation_ell,
};
use crate::linalg::{snf, LocalBasis};
use crate::{ExactMatrix, Rat};

#[derive(Clone, Debug)]
pub struct Lattice {
    /// Columns are basis vectors in ambient coordinates.
    basis: ExactMatrix,
    ell: u64,
}

impl Lattice {
    /// Builds a lattice from a square nonsingular basis matrix (columns).
    ///
    /// Each column is rescaled by the prime-to-ℓ part of its common
    /// denominator, which leaves the lattice unchanged at ℓ and makes every
    /// denominator a power of ℓ.
    pub fn new(basis: ExactMatrix, ell: u64) -> Result<Self> {
        check_prime(ell)?;
        if !basis.is_square() {
            return Err(Error::InvalidLattice(format!(
                "basis is {}x{}, not square",
                basis.rows(),
                basis.cols()
            )));
        }
        if basis.det()?.is_zero() {
            return Err(Error::InvalidLattice("basis is singular".into()));
        }
        let m = basis.rows();
        let mut cols = basis.columns();
        for col in cols.iter_mut() {
            let lcm = col.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let unit = prime_to_ell_part(&lcm, ell);
            if !unit.is_one() {
                let u = Rat::from_integer(unit);
                for x in col.iter_mut() {
                    *x = &*x * &u;
                }
            }
        }
        let basis = ExactMatrix::from_columns(&cols)?;
        debug_assert_eq!(basis.rows(), m);
        Ok(Lattice { basis, ell })
    }

    /// `Z_(ℓ)^m`.
    pub fn standard(dim: usize, ell: u64) -> Result<Self> {
        Self::new(ExactMatrix::identity(dim), ell)
    }

    /// The `Z_(ℓ)`-span of `generators`, which must have full rank.
    pub fn from_generators(ell: u64, dim: usize, generators: &[Vec<Rat>]) -> Result<Self> {
        check_prime(ell)?;
        let b = LocalBasis::from_vectors(ell, dim, generators.iter().cloned());
        if b.rank() != dim {
            return Err(Error::InvalidLattice(format!(
                "generators span rank {} < {dim}",
                b.rank()
            )));
        }
        Self::new(ExactMatrix::from_columns(&b.hermite())?, ell)
    }

    pub fn basis(&self) -> &ExactMatrix {
        &self.basis
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Rat>> {
        self.basis.columns()
    }

    /// Canonical basis: the Hermite form over `Z_(ℓ)`. Equal at ℓ iff equal keys.
    pub fn canonical_key(&self) -> Vec<Vec<Rat>> {
        LocalBasis::from_vectors(self.ell, self.dim(), self.basis.columns()).hermite()
    }

    pub fn scaled(&self, c: &Rat) -> Result<Self> {
        Self::new(self.basis.scale(c), self.ell)
    }

    /// `ℓ^k L`.
    pub fn ell_multiple(&self, k: i64) -> Self {
        self.scaled(&ell_pow(self.ell, k))
            .expect("scaling by a nonzero scalar")
    }

    /// Coordinates of the columns of `vectors` in this basis.
    pub fn coordinates(&self, vectors: &ExactMatrix) -> Result<ExactMatrix> {
        self.basis.inverse()?.checked_mul(vectors)
    }

    pub fn contains_vector(&self, v: &[Rat]) -> Result<bool> {
        let x = self.basis.inverse()?.mul_vec(v);
        Ok(x.iter().all(|c| is_ell_integral(c, self.ell)))
    }

    /// `g L ⊆ L` at ℓ, for `g` acting on ambient coordinates.
    pub fn is_stable_under(&self, g: &ExactMatrix) -> Result<bool> {
        let x = self.coordinates(&g.checked_mul(&self.basis)?)?;
        Ok(x.entries().iter().all(|c| is_ell_integral(c, self.ell)))
    }

    /// `g` written in this lattice's basis: `B^-1 g B`.
    pub fn action_in_basis(&self, g: &ExactMatrix) -> Result<ExactMatrix> {
        self.coordinates(&g.checked_mul(&self.basis)?)
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        self.check_compatible(other)?;
        let mut gens = self.basis.columns();
        gens.extend(other.basis.columns());
        Self::from_generators(self.ell, self.dim(), &gens)
    }

    /// Dual with respect to the standard dot product.
    pub fn standard_dual(&self) -> Lattice {
        Lattice::new(
            self.basis.inverse().expect("nonsingular basis").transpose(),
            self.ell,
        )
        .expect("dual basis is nonsingular")
    }

    pub fn intersection(&self, other: &Lattice) -> Result<Lattice> {
        Ok(self
            .standard_dual()
            .sum(&other.standard_dual())?
            .standard_dual())
    }

    /// Smallest `s >= 0` with `ℓ^s L ⊆ Z_(ℓ)^m`.
    pub fn denominator_exponent(&self) -> i64 {
        self.basis
            .entries()
            .iter()
            .filter(|x| !x.is_zero())
            .map(|x| -valuation_ell(x, self.ell).expect("nonzero"))
            .max()
            .unwrap_or(0)
            .max(0)
    }

    fn check_compatible(&self, other: &Lattice) -> Result<()> {
        if self.ell != other.ell {
            return Err(Error::PrimeMismatch(self.ell, other.ell));
        }
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!(
                "ambient dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}

/// Kronecker product of bases; `a` gives the outer blocks.
pub fn tensor_lattice(a: &Lattice, b: &Lattice) -> Result<Lattice> {
    if a.ell != b.ell {
        return Err(Error::PrimeMismatch(a.ell, b.ell));
    }
    Lattice::new(a.basis.kron(&b.basis), a.ell)
}

pub fn contains_at_ell(outer: &Lattice, inner: &Lattice) -> Result<bool> {
    outer.check_compatible(inner)?;
    let x = outer.coordinates(&inner.basis)?;
    Ok(x.entries().iter().all(|c| is_ell_integral(c, outer.ell)))
}

pub fn equal_at_ell(a: &Lattice, b: &Lattice) -> Result<bool> {
    Ok(contains_at_ell(a, b)? && contains_at_ell(b, a)?)
}

/// `v` with `[outer : inner] = ℓ^v`, from the Smith form of the transition matrix.
pub fn index_valuation(outer: &Lattice, inner: &Lattice) -> Result<u64> {
    if !contains_at_ell(outer, inner)? {
        return Err(Error::NotContained { ell: outer.ell });
    }
    let x = outer.coordinates(&inner.basis)?;
    Ok(elementary_valuations(&x, outer.ell)?
        .iter()
        .map(|&v| v as u64)
        .sum())
}

/// ℓ-valuations of the Smith invariants of an ℓ-integral nonsingular matrix,
/// in nonincreasing order, zeros dropped.
pub(crate) fn elementary_valuations(x: &ExactMatrix, ell: u64) -> Result<Vec<u32>> {
    let lcm = x
        .entries()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    if !prime_to_ell_part(&lcm, ell).eq(&lcm) {
        return Err(Error::NotContained { ell });
    }
    let scaled = x.scale(&Rat::from_integer(lcm));
    let s = snf(&scaled)?;
    let mut vals = Vec::new();
    for d in &s.diag {
        if d.is_zero() {
            return Err(Error::Singular);
        }
        let v = int_valuation(d, ell)?;
        if v > 0 {
            vals.push(v);
        }
    }
    vals.sort_unstable_by(|a, b| b.cmp(a));
    Ok(vals)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Symmetric,
    Alternating,
}

impl FormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FormKind::Symmetric => "symmetric",
            FormKind::Alternating => "alternating",
        }
    }

    /// Kind of `f ⊗ h`; `None` when both factors have the same kind
    /// (their tensor is symmetric, not alternating).
    pub fn tensor(self, other: FormKind) -> FormKind {
        if self == other {
            FormKind::Symmetric
        } else {
            FormKind::Alternating
        }
    }
}

impl std::str::FromStr for FormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(FormKind::Symmetric),
            "alternating" => Ok(FormKind::Alternating),
            other => Err(Error::InvalidForm(format!("unknown kind `{other}`"))),
        }
    }
}

/// Bilinear form `e(x, y) = x^T G y` on ambient coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearForm {
    gram: ExactMatrix,
    kind: FormKind,
    ell: u64,
}

impl BilinearForm {
    pub fn new(gram: ExactMatrix, kind: FormKind, ell: u64) -> Result<Self> {
        check_prime(ell)?;
        if !gram.is_square() {
            return Err(Error::InvalidForm(format!(
                "Gram matrix is {}x{}",
                gram.rows(),
                gram.cols()
            )));
        }
        let t = gram.transpose();
        match kind {
            FormKind::Symmetric if t != gram => {
                return Err(Error::InvalidForm("Gram matrix is not symmetric".into()))
            }
            FormKind::Alternating => {
                let n = gram.rows();
                if t != -&gram || (0..n).any(|i| !gram.get(i, i).is_zero()) {
                    return Err(Error::InvalidForm("Gram matrix is not alternating".into()));
                }
            }
            _ => {}
        }
        Ok(BilinearForm { gram, kind, ell })
    }

    pub fn gram(&self) -> &ExactMatrix {
        &self.gram
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.gram.det().expect("square").is_zero()
    }

    pub fn pair(&self, x: &[Rat], y: &[Rat]) -> Rat {
        let gy = self.gram.mul_vec(y);
        x.iter()
            .zip(&gy)
            .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
    }

    /// Gram matrix in the basis of `t`: `B^T G B`.
    pub fn gram_in(&self, t: &Lattice) -> ExactMatrix {
        &(&t.basis.transpose() * &self.gram) * &t.basis
    }

    pub fn scaled(&self, c: &Rat) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Degenerate);
        }
        Self::new(self.gram.scale(c), self.kind, self.ell)
    }

    /// `g^T G g = G`.
    pub fn is_invariant_under(&self, g: &ExactMatrix) -> bool {
        &(&g.transpose() * &self.gram) * g == self.gram
    }

    /// `f ⊗ h`, with `self` giving the outer blocks.
    pub fn tensor(&self, other: &BilinearForm) -> Result<Self> {
        if self.ell != other.ell {
            return Err(Error::PrimeMismatch(self.ell, other.ell));
        }
        Self::new(
            self.gram.kron(&other.gram),
            self.kind.tensor(other.kind),
            self.ell,
        )
    }

    fn check_against(&self, t: &Lattice) -> Result<()> {
        if self.ell != t.ell {
            return Err(Error::PrimeMismatch(self.ell, t.ell));
        }
        if self.dim() != t.dim() {
            return Err(Error::Shape(format!(
                "form on dimension {}, lattice in dimension {}",
                self.dim(),
                t.dim()
            )));
        }
        Ok(())
    }
}

/// `T* = {y : e(T, y) ⊆ Z_(ℓ)}`, with basis `(B^T G)^{-1}`.
pub fn dual_lattice(t: &Lattice, e: &BilinearForm) -> Result<Lattice> {
    e.check_against(t)?;
    if !e.is_nondegenerate() {
        return Err(Error::Degenerate);
    }
    let m = &t.basis.transpose() * &e.gram;
    Lattice::new(m.inverse()?, t.ell)
}

/// Minimal ℓ-valuation of the Gram entries on `t`; `e(t, t) = ℓ^c Z_(ℓ)`.
pub fn content(t: &Lattice, e: &BilinearForm) -> Result<i64> {
    e.check_against(t)?;
    e.gram_in(t)
        .entries()
        .iter()
        .filter(|x| !x.is_zero())
        .map(|x| valuation_ell(x, t.ell).expect("nonzero"))
        .min()
        .ok_or(Error::Degenerate)
}

/// Divides `e` by `ℓ^c`, `c` its content on `t`, so that `e(t, t) = Z_(ℓ)`.
/// Returns the rescaled form and `c`.
pub fn normalize(t: &Lattice, e: &BilinearForm) -> Result<(BilinearForm, i64)> {
    let c = content(t, e)?;
    Ok((e.scaled(&ell_pow(t.ell, -c))?, c))
}

fn check_integral_pairing(t: &Lattice, e: &BilinearForm) -> Result<ExactMatrix> {
    e.check_against(t)?;
    if !e.is_nondegenerate() {
        return Err(Error::Degenerate);
    }
    let g = e.gram_in(t);
    if !g.entries().iter().all(|x| is_ell_integral(x, t.ell)) {
        return Err(Error::PairingNotIntegral { ell: t.ell });
    }
    Ok(g)
}

/// ℓ-part of `T*/T` as elementary-divisor valuations.
pub fn discriminant_group(t: &Lattice, e: &BilinearForm) -> Result<DiscriminantGroup> {
    check_integral_pairing(t, e)?;
    let dual = dual_lattice(t, e)?;
    let transition = dual.coordinates(&t.basis)?;
    Ok(DiscriminantGroup {
        ell: t.ell,
        valuations: elementary_valuations(&transition, t.ell)?,
    })
}

/// `e` is perfect on `t`: trivial discriminant group, equivalently a Gram
/// determinant that is an ℓ-unit. Both routes are computed and must agree.
pub fn is_perfect(t: &Lattice, e: &BilinearForm) -> Result<bool> {
    let g = check_integral_pairing(t, e)?;
    let by_det = valuation_ell(&g.det()?, t.ell)? == 0;
    let by_group = discriminant_group(t, e)?.is_trivial();
    if by_det != by_group {
        return Err(Error::Inconsistent(format!(
            "determinant test says perfect={by_det}, discriminant group says {by_group}"
        )));
    }
    Ok(by_group)
}

/// Finite abelian ℓ-group `⊕ Z/ℓ^{e_i}`, exponents in nonincreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminantGroup {
    pub ell: u64,
    pub valuations: Vec<u32>,
}

impl DiscriminantGroup {
    pub fn is_trivial(&self) -> bool {
        self.valuations.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.valuations.len() <= 1
    }

    /// `v` with `#group = ℓ^v`.
    pub fn order_valuation(&self) -> u64 {
        self.valuations.iter().map(|&v| v as u64).sum()
    }

    pub fn order(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.ell), self.order_valuation() as usize)
    }
}

impl std::fmt::Display for DiscriminantGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .valuations
            .iter()
            .map(|v| format!("Z/{}^{}", self.ell, v))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
