//! Smith normal form over a Euclidean integer type.
//!
//! Pivoting always takes the entry of smallest absolute value in the active
//! submatrix; every row and column operation is mirrored into the `left` and
//! `right` transforms so that `left * m * right` is the returned diagonal.

use num_integer::Integer;
use num_traits::Signed;

use super::matrix::{Matrix, Scalar};
use crate::error::{Error, Result};
use crate::{ExactMatrix, IntMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct SnfResult<T> {
    /// `min(rows, cols)` entries: `d_1 | d_2 | ... | d_r` followed by zeros.
    pub diag: Vec<T>,
    pub left: Matrix<T>,
    pub right: Matrix<T>,
}

impl<T: Scalar> SnfResult<T> {
    /// The diagonal as a full `rows x cols` matrix.
    pub fn diagonal_matrix(&self) -> Matrix<T> {
        let (r, c) = (self.left.rows(), self.right.rows());
        Matrix::from_fn(r, c, |i, j| {
            if i == j {
                self.diag[i].clone()
            } else {
                T::zero()
            }
        })
    }
}

pub fn smith_normal_form<T>(m: &Matrix<T>) -> SnfResult<T>
where
    T: Scalar + Integer + Signed,
{
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut left = Matrix::identity(rows);
    let mut right = Matrix::identity(cols);

    'outer: for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = min_abs_entry(&a, t) else {
                break 'outer;
            };
            row_swap(&mut a, t, pi);
            row_swap(&mut left, t, pi);
            col_swap(&mut a, t, pj);
            col_swap(&mut right, t, pj);

            let pivot = a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                let q = a.get(i, t).clone() / pivot.clone();
                if !q.is_zero() {
                    row_axpy(&mut a, i, t, &q);
                    row_axpy(&mut left, i, t, &q);
                }
                clean &= a.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                let q = a.get(t, j).clone() / pivot.clone();
                if !q.is_zero() {
                    col_axpy(&mut a, j, t, &q);
                    col_axpy(&mut right, j, t, &q);
                }
                clean &= a.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let offender =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let minus_one = T::zero() - T::one();
                    row_axpy(&mut a, t, i, &minus_one);
                    row_axpy(&mut left, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            row_negate(&mut a, t);
            row_negate(&mut left, t);
        }
    }

    let diag = (0..rows.min(cols)).map(|i| a.get(i, i).clone()).collect();
    SnfResult { diag, left, right }
}

/// Smith form of a rational matrix whose entries must all be integers.
pub fn snf(m: &ExactMatrix) -> Result<SnfResult<crate::Int>> {
    Ok(smith_normal_form(&to_integer_matrix(m)?))
}

pub fn to_integer_matrix(m: &ExactMatrix) -> Result<IntMatrix> {
    let mut out = IntMatrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let x = m.get(i, j);
            if !x.is_integer() {
                return Err(Error::NonInteger { row: i, col: j });
            }
            out.set(i, j, x.to_integer());
        }
    }
    Ok(out)
}

fn min_abs_entry<T: Scalar + Signed + PartialOrd>(
    a: &Matrix<T>,
    t: usize,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, T)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                best = Some((i, j, ax));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn row_swap<T: Scalar>(a: &mut Matrix<T>, r: usize, s: usize) {
    if r == s {
        return;
    }
    for j in 0..a.cols() {
        let x = a.get(r, j).clone();
        let y = a.get(s, j).clone();
        a.set(r, j, y);
        a.set(s, j, x);
    }
}

fn col_swap<T: Scalar>(a: &mut Matrix<T>, c: usize, d: usize) {
    if c == d {
        return;
    }
    for i in 0..a.rows() {
        let x = a.get(i, c).clone();
        let y = a.get(i, d).clone();
        a.set(i, c, y);
        a.set(i, d, x);
    }
}

/// row[dst] -= q * row[src]
fn row_axpy<T: Scalar>(a: &mut Matrix<T>, dst: usize, src: usize, q: &T) {
    for j in 0..a.cols() {
        let s = a.get(src, j);
        if s.is_zero() {
            continue;
        }
        let v = a.get(dst, j).clone() - q.clone() * s.clone();
        a.set(dst, j, v);
    }
}

/// col[dst] -= q * col[src]
fn col_axpy<T: Scalar>(a: &mut Matrix<T>, dst: usize, src: usize, q: &T) {
    for i in 0..a.rows() {
        let s = a.get(i, src);
        if s.is_zero() {
            continue;
        }
        let v = a.get(i, dst).clone() - q.clone() * s.clone();
        a.set(i, dst, v);
    }
}

fn row_negate<T: Scalar>(a: &mut Matrix<T>, r: usize) {
    for j in 0..a.cols() {
        let v = T::zero() - a.get(r, j).clone();
        a.set(r, j, v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::arith::{frac, rat};
    use num_bigint::BigInt;
    use num_traits::Zero;

    fn int_det(m: &Matrix<BigInt>) -> BigInt {
        m.map(|x| crate::Rat::from_integer(x.clone()))
            .det()
            .unwrap()
            .to_integer()
    }

    fn check_certificate(m: &Matrix<i64>) {
        let m = m.map(|&x| BigInt::from(x));
        let r = smith_normal_form(&m);
        assert_eq!(&(&r.left * &m) * &r.right, r.diagonal_matrix());
        assert_eq!(int_det(&r.left).abs(), BigInt::from(1));
        assert_eq!(int_det(&r.right).abs(), BigInt::from(1));
        for w in r.diag.windows(2) {
            if !w[0].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]), "{:?}", r.diag);
            } else {
                assert!(w[1].is_zero());
            }
        }
    }

    #[test]
    fn identity_is_fixed() {
        let r = smith_normal_form(&Matrix::<i64>::identity(2));
        assert_eq!(r.diag, vec![1, 1]);
        assert!(r.left.is_identity() && r.right.is_identity());
    }

    #[test]
    fn diag_2_3_becomes_1_6() {
        let m = Matrix::diagonal(&[2_i64, 3]);
        let r = smith_normal_form(&m);
        assert_eq!(r.diag, vec![1, 6]);
        check_certificate(&m);
    }

    #[test]
    fn zero_matrix() {
        let r = smith_normal_form(&Matrix::<i64>::zeros(2, 2));
        assert_eq!(r.diag, vec![0, 0]);
    }

    #[test]
    fn rectangular_and_bigint() {
        let m =
            Matrix::from_rows(vec![vec![2_i64, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]).unwrap();
        let r = smith_normal_form(&m);
        assert_eq!(r.diag, vec![2, 6, 12]);
        check_certificate(&m);
        let wide = Matrix::from_rows(vec![vec![4_i64, 6, 10]]).unwrap();
        assert_eq!(smith_normal_form(&wide).diag, vec![2]);
        let big = m.map(|&x| BigInt::from(x));
        assert_eq!(
            smith_normal_form(&big).diag,
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
    }

    #[test]
    fn rational_entries_rejected() {
        let m = ExactMatrix::from_rows(vec![vec![rat(1), frac(1, 2)]]).unwrap();
        assert!(matches!(snf(&m), Err(Error::NonInteger { row: 0, col: 1 })));
    }

    #[test]
    fn cartan_a5_has_single_nontrivial_divisor() {
        let n = 6;
        let m = Matrix::from_fn(n - 1, n - 1, |i, j| match i.abs_diff(j) {
            0 => 2_i64,
            1 => -1,
            _ => 0,
        });
        assert_eq!(smith_normal_form(&m).diag, vec![1, 1, 1, 1, 6]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn int_matrix() -> impl Strategy<Value = Matrix<i64>> {
            (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
                proptest::collection::vec(-20_i64..=20, r * c)
                    .prop_map(move |d| Matrix::new(r, c, d).unwrap())
            })
        }

        proptest! {
            #[test]
            fn certificate_holds(m in int_matrix()) {
                check_certificate(&m);
            }

            #[test]
            fn diagonal_product_is_abs_det(m in int_matrix().prop_filter("square", |m| m.is_square())) {
                let bm = m.map(|&x| BigInt::from(x));
                let prod: BigInt = smith_normal_form(&bm).diag.iter().product();
                prop_assert_eq!(prod, int_det(&bm).abs());
            }
        }
    }
}
