//! Invariant bilinear forms: `{B : g^T B g = B}` over the rationals.

use num_traits::Zero;

use super::GroupAction;
use crate::{ExactMatrix, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormFilter {
    Symmetric,
    Alternating,
    Any,
}

impl std::str::FromStr for FormFilter {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "symmetric" => Ok(FormFilter::Symmetric),
            "alternating" => Ok(FormFilter::Alternating),
            "any" => Ok(FormFilter::Any),
            other => Err(crate::Error::InvalidArgument(format!(
                "unknown form kind `{other}`"
            ))),
        }
    }
}

fn unit_forms(m: usize, filter: FormFilter) -> Vec<ExactMatrix> {
    let one = Rat::from_integer(1.into());
    let e = |i: usize, j: usize| {
        let mut b = ExactMatrix::zeros(m, m);
        b.set(i, j, one.clone());
        b
    };
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            match filter {
                FormFilter::Any => out.push(e(i, j)),
                FormFilter::Symmetric if i <= j => {
                    let mut b = e(i, j);
                    b.set(j, i, one.clone());
                    out.push(b);
                }
                FormFilter::Alternating if i < j => {
                    let mut b = e(i, j);
                    b.set(j, i, -one.clone());
                    out.push(b);
                }
                _ => {}
            }
        }
    }
    out
}

/// Basis of the invariant Gram matrices of the requested kind, in reduced
/// row-echelon order of their column-stacked entries.
pub fn invariant_forms(act: &GroupAction, filter: FormFilter) -> Vec<ExactMatrix> {
    let m = act.dim();
    let mut basis = unit_forms(m, filter);
    for g in act.generators() {
        if basis.is_empty() {
            break;
        }
        let gt = g.transpose();
        let images: Vec<Vec<Rat>> = basis
            .iter()
            .map(|b| (&(&(&gt * b) * g) - b).vectorize())
            .collect();
        if images.iter().all(|v| v.iter().all(Zero::is_zero)) {
            continue;
        }
        let a = ExactMatrix::from_columns(&images).expect("nonempty");
        let combos = a.kernel();
        basis = combos
            .iter()
            .map(|c| {
                c.iter()
                    .zip(&basis)
                    .filter(|(x, _)| !x.is_zero())
                    .fold(ExactMatrix::zeros(m, m), |acc, (x, b)| &acc + &b.scale(x))
            })
            .collect();
    }
    let vecs: Vec<Vec<Rat>> = basis.iter().map(ExactMatrix::vectorize).collect();
    if vecs.is_empty() {
        return Vec::new();
    }
    ExactMatrix::row_space_basis(&vecs)
        .iter()
        .map(|v| ExactMatrix::from_vectorized(m, m, v))
        .collect()
}
