//! Exact verification of ℓ-local lattice statements for integral group
//! representations: well-rounded modules, root and weight lattices of the
//! symmetric groups, invariant pairings, discriminant groups of dual
//! lattices and the tensor construction that forces discriminants to be
//! powers of `ℓ^{2d}`.
//!
//! The linear-algebra kernel in [`linalg`] is generic over the scalar type
//! (any `num_traits` field or integer ring); everything above it runs on
//! arbitrary-precision rationals through the aliases defined here.

pub mod error;
pub mod lattice;
pub mod linalg;
pub mod modrep;
pub mod report;
pub mod symn;
pub mod tensor;

pub use error::{Error, Result};

/// Arbitrary-precision integer.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision rational.
pub type Rat = num_rational::BigRational;
/// Dense matrix of rationals; the carrier for lattice bases and Gram matrices.
pub type ExactMatrix = linalg::Matrix<Rat>;
/// Dense matrix of integers.
pub type IntMatrix = linalg::Matrix<Int>;

pub use lattice::{BilinearForm, DiscriminantGroup, FormKind, Lattice};
pub use linalg::{ModPMatrix, SnfResult};
pub use modrep::{GroupAction, ModuleModL};

/// Default cap on enumeration candidates; overridable through `LATREP_MAX_ENUM`.
pub const DEFAULT_MAX_ENUM: u64 = 1_000_000;

/// Current enumeration bound.
pub fn enumeration_bound() -> u64 {
    std::env::var("LATREP_MAX_ENUM")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_ENUM)
}
