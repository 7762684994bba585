//! Generated matrix algebras, intertwiners and the well-rounded test.

use serde::Serialize;

use super::{find_proper_submodule, GroupAction, ModuleModL};
use crate::error::{Error, Result};
use crate::linalg::arith::is_ell_integral;
use crate::linalg::modp::EchelonBuilder;
use crate::linalg::{LocalBasis, ModPMatrix};
use crate::ExactMatrix;

/// Spanning words of the unital `F_ℓ`-algebra generated by the action,
/// one per dimension of the algebra.
pub fn algebra_basis(m: &ModuleModL) -> Vec<ModPMatrix> {
    let dim = m.dim();
    let full = dim * dim;
    let mut b = EchelonBuilder::new(m.ell());
    let id = ModPMatrix::identity(m.ell(), dim);
    b.insert(id.entries().to_vec());
    let mut basis = vec![id];
    let mut next = 0;
    while next < basis.len() && b.len() < full {
        let a = basis[next].clone();
        next += 1;
        for g in m.generators() {
            let ga = g.mul(&a).expect("square generators");
            if b.insert(ga.entries().to_vec()) {
                basis.push(ga);
            }
        }
    }
    basis
}

/// Dimension of the algebra generated by the action; `dim^2` exactly when
/// the generators span the full matrix algebra.
pub fn algebra_span_dim(m: &ModuleModL) -> usize {
    algebra_basis(m).len()
}

/// Basis of `Hom(a, b)`: matrices `X` (`b.dim x a.dim`) with `X a_g = b_g X`
/// for every generator index `g`.
pub fn hom_space(a: &ModuleModL, b: &ModuleModL) -> Result<Vec<ModPMatrix>> {
    if a.ell() != b.ell() {
        return Err(Error::PrimeMismatch(a.ell(), b.ell()));
    }
    if a.generators().len() != b.generators().len() {
        return Err(Error::InvalidAction(
            "modules have different generator counts".into(),
        ));
    }
    let p = a.ell();
    let (rb, ca) = (b.dim(), a.dim());
    let unknowns = rb * ca;
    let mut rows = Vec::with_capacity(a.generators().len() * unknowns);
    for (ga, gb) in a.generators().iter().zip(b.generators()) {
        for r in 0..rb {
            for c in 0..ca {
                let mut eq = vec![0u64; unknowns];
                for j in 0..ca {
                    eq[r * ca + j] = ga.get(j, c);
                }
                for i in 0..rb {
                    let v = gb.get(r, i);
                    if v != 0 {
                        eq[i * ca + c] = (eq[i * ca + c] + p - v) % p;
                    }
                }
                if eq.iter().any(|&x| x != 0) {
                    rows.push(eq);
                }
            }
        }
    }
    let kernel = if rows.is_empty() {
        ModPMatrix::identity(p, unknowns)
            .entries()
            .chunks(unknowns)
            .map(<[u64]>::to_vec)
            .collect()
    } else {
        ModPMatrix::from_rows(p, &rows, unknowns)?.kernel()
    };
    kernel
        .into_iter()
        .map(|v| ModPMatrix::new(p, rb, ca, v))
        .collect()
}

pub fn commutant_dim(m: &ModuleModL) -> Result<usize> {
    Ok(hom_space(m, m)?.len())
}

/// Both characterizations of an absolutely simple reduction, side by side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WellRoundedEvidence {
    pub ell: u64,
    pub dim: usize,
    pub span_dim: usize,
    pub simple: bool,
    /// A proper nonzero stable subspace when one exists.
    pub proper_submodule: Option<Vec<Vec<u64>>>,
    pub commutant_dim: usize,
    pub well_rounded: bool,
}

/// Full-algebra span versus simplicity with scalar commutant. Disagreement
/// is reported as [`Error::Inconsistent`].
pub fn is_well_rounded(m: &ModuleModL) -> Result<WellRoundedEvidence> {
    let span_dim = algebra_span_dim(m);
    let by_span = span_dim == m.dim() * m.dim();
    let proper = find_proper_submodule(m, crate::enumeration_bound())?;
    let commutant_dim = commutant_dim(m)?;
    let by_simplicity = proper.is_none() && commutant_dim == 1;
    if by_span != by_simplicity {
        return Err(Error::Inconsistent(format!(
            "span dimension {span_dim} of {} but simple={} with commutant dimension {commutant_dim}",
            m.dim() * m.dim(),
            proper.is_none()
        )));
    }
    Ok(WellRoundedEvidence {
        ell: m.ell(),
        dim: m.dim(),
        span_dim,
        simple: proper.is_none(),
        proper_submodule: proper.map(|s| s.basis().to_vec()),
        commutant_dim,
        well_rounded: by_span,
    })
}

/// Whether the `Z_(ℓ)`-span of all words in the generators is `M_m(Z_(ℓ))`.
/// Generators must be ℓ-integral; the closure runs over exact rationals.
pub fn lifted_algebra_is_full(act: &GroupAction, ell: u64) -> Result<bool> {
    let m = act.dim();
    for g in act.generators() {
        if let Some(k) = g.entries().iter().position(|x| !is_ell_integral(x, ell)) {
            return Err(Error::NotEllIntegral {
                row: k / m,
                col: k % m,
                ell,
            });
        }
    }
    let full = m * m;
    let is_full = |b: &LocalBasis| b.rank() == full && b.pivot_valuations().iter().all(|&v| v == 0);
    let mut b = LocalBasis::new(ell, full);
    let id = ExactMatrix::identity(m);
    b.insert(id.entries().to_vec());
    let mut words = vec![id];
    let mut next = 0;
    while next < words.len() {
        if is_full(&b) {
            return Ok(true);
        }
        let a = words[next].clone();
        next += 1;
        for g in act.generators() {
            let ga = g * &a;
            if b.insert(ga.entries().to_vec()) {
                words.push(ga);
            }
        }
    }
    Ok(is_full(&b))
}
