//! Exact arithmetic kernel: generic dense matrices, Smith normal form,
//! linear algebra over `F_p`, and echelon forms over `Z_(ℓ)`.

pub mod arith;
pub mod local;
mod matrix;
pub mod modp;
pub mod snf;
pub mod text;

pub use arith::{is_prime, valuation_ell};
pub use local::LocalBasis;
pub use matrix::{Field, Matrix, Rref, Scalar};
pub use modp::{rref_modp, solve_linear_modp, ModPMatrix, ModPRref, SolutionSet, Subspace};
pub use snf::{smith_normal_form, snf, SnfResult};

use crate::error::Result;
use crate::{ExactMatrix, Rat};

pub fn det(m: &ExactMatrix) -> Result<Rat> {
    m.det()
}

pub fn inverse(m: &ExactMatrix) -> Result<ExactMatrix> {
    m.inverse()
}

/// Converts an `i64` matrix into exact rationals.
pub fn exact(m: &Matrix<i64>) -> ExactMatrix {
    m.map(|&x| arith::rat(x))
}

pub fn exact_from_rows(rows: &[&[i64]]) -> ExactMatrix {
    ExactMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| arith::rat(x)).collect())
            .collect(),
    )
    .expect("rectangular rows")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn det_of_diag() {
        assert_eq!(
            det(&exact_from_rows(&[&[2, 0], &[0, 3]])).unwrap(),
            arith::rat(6)
        );
    }

    proptest! {
        #[test]
        fn inverse_times_m_is_identity(n in 1usize..5, d in proptest::collection::vec(-9i64..=9, 16)) {
            let m = exact(&Matrix::new(n, n, d[..n * n].to_vec()).unwrap());
            if let Ok(inv) = inverse(&m) {
                prop_assert!((&inv * &m).is_identity());
                prop_assert!(!m.det().unwrap().is_integer() || m.det().unwrap() != arith::rat(0));
            } else {
                prop_assert_eq!(m.det().unwrap(), arith::rat(0));
            }
        }

        #[test]
        fn modl_rank_matches_integer_rank_when_det_is_unit(
            ell in prop::sample::select(vec![2u64, 3, 5, 7]),
            n in 1usize..5,
            d in proptest::collection::vec(-9i64..=9, 16),
        ) {
            let m = exact(&Matrix::new(n, n, d[..n * n].to_vec()).unwrap());
            let det = m.det().unwrap();
            prop_assume!(arith::is_ell_unit(&det, ell));
            let r = ModPMatrix::from_rational(&m, ell).unwrap().rank();
            prop_assert_eq!(r, m.rank());
        }
    }
}
