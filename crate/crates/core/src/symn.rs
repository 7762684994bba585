//! Root and weight lattices of the symmetric group `S_n` acting on the
//! sum-zero hyperplane `U ⊂ Q^n`.
//!
//! Coordinates are taken in the simple-root basis `α_i = e_i - e_{i+1}`,
//! so the root lattice `Q` is the standard lattice and `h` restricted to
//! `U` has the Cartan matrix as its Gram matrix.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    contains_at_ell, discriminant_group, dual_lattice, elementary_valuations, equal_at_ell,
    index_valuation, is_perfect, normalize, BilinearForm, FormKind, Lattice,
};
use crate::linalg::arith::{check_prime, ell_pow, int_valuation, rat, valuation_ell};
use crate::modrep::{
    invariant_forms, is_well_rounded, stable_lattices_between, FormFilter, GroupAction,
    SeedStrategy,
};
use crate::{ExactMatrix, Rat};

#[derive(Clone, Debug)]
pub struct SymnContext {
    pub n: usize,
    pub ell: u64,
    /// `h` on the simple roots.
    pub cartan: ExactMatrix,
    /// `n x (n-1)`; column `i` is `α_i` in the coordinates of `Q^n`.
    pub embedding: ExactMatrix,
    /// `ω_1, ..., ω_n` in root coordinates.
    pub omega: Vec<Vec<Rat>>,
    /// Columns `ω_1 + ... + ω_i`, the basis dual to the roots under `h`.
    pub fundamental_weights: ExactMatrix,
    pub q: Lattice,
    pub p: Lattice,
    pub h: BilinearForm,
    pub h_on_q: BilinearForm,
    pub h_on_p: BilinearForm,
    /// Transpositions `(i, i+1)` in root coordinates.
    pub reflections: GroupAction,
}

pub fn cartan_matrix(r: usize) -> ExactMatrix {
    ExactMatrix::from_fn(r, r, |i, j| match i.abs_diff(j) {
        0 => rat(2),
        1 => rat(-1),
        _ => Rat::zero(),
    })
}

/// `t_i(x) = x - h(x, α_i) α_i` in root coordinates.
pub fn reflection(cartan: &ExactMatrix, i: usize) -> ExactMatrix {
    let r = cartan.rows();
    ExactMatrix::from_fn(r, r, |a, b| {
        let id = if a == b { Rat::one() } else { Rat::zero() };
        if a == i {
            id - cartan.get(i, b)
        } else {
            id
        }
    })
}

fn violation(msg: String) -> Error {
    Error::Violation(msg)
}

pub fn build_context(n: usize, ell: u64) -> Result<SymnContext> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "n must be at least 2, got {n}"
        )));
    }
    check_prime(ell)?;
    let r = n - 1;
    let cartan = cartan_matrix(r);
    let embedding = ExactMatrix::from_fn(n, r, |a, i| {
        if a == i {
            rat(1)
        } else if a == i + 1 {
            rat(-1)
        } else {
            Rat::zero()
        }
    });
    let nr = Rat::from_integer(BigInt::from(n));
    let omega: Vec<Vec<Rat>> = (1..=n)
        .map(|i| {
            (1..=r)
                .map(|k| Rat::from_integer(BigInt::from(u8::from(k >= i))) - rat(k as i64) / &nr)
                .collect()
        })
        .collect();
    let fundamental_weights = cartan.inverse()?;
    let q = Lattice::standard(r, ell)?;
    let p = Lattice::new(fundamental_weights.clone(), ell)?;
    let h = BilinearForm::new(cartan.clone(), FormKind::Symmetric, ell)?;
    let h_on_q = BilinearForm::new(h.gram_in(&q), FormKind::Symmetric, ell)?;
    let h_on_p = BilinearForm::new(h.gram_in(&p), FormKind::Symmetric, ell)?;
    let gens = (0..r).map(|i| reflection(&cartan, i)).collect();
    let reflections = GroupAction::new(r, gens, format!("S{n} on U"))?;
    let ctx = SymnContext {
        n,
        ell,
        cartan,
        embedding,
        omega,
        fundamental_weights,
        q,
        p,
        h,
        h_on_q,
        h_on_p,
        reflections,
    };
    check_context(&ctx)?;
    Ok(ctx)
}

fn check_context(ctx: &SymnContext) -> Result<()> {
    let (n, r) = (ctx.n, ctx.n - 1);
    if &ctx.embedding.transpose() * &ctx.embedding != ctx.cartan {
        return Err(violation(
            "Gram of the embedded roots is not the Cartan matrix".into(),
        ));
    }
    let alpha = |j: usize| -> Vec<Rat> {
        (0..r)
            .map(|k| if k == j { rat(1) } else { Rat::zero() })
            .collect()
    };
    let fundamental = &ctx.fundamental_weights;
    for i in 0..r {
        for j in 0..r {
            let delta = if i == j { rat(1) } else { Rat::zero() };
            if ctx.h.pair(&fundamental.col(i), &alpha(j)) != delta {
                return Err(violation(format!(
                    "fundamental weight {i} does not pair to delta with root {j}"
                )));
            }
            let shifted = if i == j + 1 { rat(1) } else { Rat::zero() };
            if ctx.h.pair(&ctx.omega[i], &alpha(j)) != &delta - &shifted {
                return Err(violation(format!(
                    "omega_{} pairs wrongly with alpha_{}",
                    i + 1,
                    j + 1
                )));
            }
        }
        let diff: Vec<Rat> = ctx.omega[i]
            .iter()
            .zip(&ctx.omega[i + 1])
            .map(|(a, b)| a - b)
            .collect();
        if diff != alpha(i) {
            return Err(violation(format!(
                "alpha_{} != omega_{} - omega_{}",
                i + 1,
                i + 1,
                i + 2
            )));
        }
    }
    let total = ctx.omega.iter().fold(vec![Rat::zero(); r], |acc, w| {
        acc.iter().zip(w).map(|(a, b)| a + b).collect()
    });
    if total.iter().any(|x| !x.is_zero()) {
        return Err(violation("omega vectors do not sum to zero".into()));
    }
    let omega_span = Lattice::from_generators(ctx.ell, r, &ctx.omega)?;
    if !equal_at_ell(&omega_span, &ctx.p)? {
        return Err(violation(
            "omega vectors and fundamental weights span different lattices".into(),
        ));
    }
    for (i, t) in ctx.reflections.generators().iter().enumerate() {
        let perm = ExactMatrix::from_fn(n, n, |a, b| {
            let image = if b == i {
                i + 1
            } else if b == i + 1 {
                i
            } else {
                b
            };
            if a == image {
                rat(1)
            } else {
                Rat::zero()
            }
        });
        if &ctx.embedding * t != &perm * &ctx.embedding {
            return Err(violation(format!(
                "reflection t_{} is not the transposition ({}, {})",
                i + 1,
                i + 1,
                i + 2
            )));
        }
        if !ctx.h.is_invariant_under(t) {
            return Err(violation(format!(
                "reflection t_{} does not preserve h",
                i + 1
            )));
        }
    }
    if !contains_at_ell(&ctx.p, &ctx.q)? {
        return Err(violation("Q is not contained in P".into()));
    }
    Ok(())
}

/// `ℓ`-adic valuation of `n`.
pub fn nu(n: usize, ell: u64) -> u32 {
    int_valuation(&BigInt::from(n), ell).expect("n > 0")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CraigReport {
    pub n: usize,
    pub ell: u64,
    pub pq_order_valuation: u64,
    pub pq_cyclic: bool,
    pub stable_lattice_classes: usize,
    pub perfect_symmetric_form_exists: bool,
    pub q_equals_p: bool,
    pub p_well_rounded: bool,
    /// Stable lattices found between `Q` and `P` before grouping into classes.
    pub stable_lattices_between_q_and_p: usize,
    pub perfect_form_on_q_or_p: bool,
    pub dual_of_p_is_scaled_q: bool,
    pub enumeration_bound: u64,
}

impl CraigReport {
    /// Statements of the lemma that fail for this `(n, ℓ)`, each prefixed
    /// with its item label.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        let v = nu(self.n, self.ell) as u64;
        if self.pq_order_valuation != v {
            out.push(format!(
                "(ii) order valuation of P/Q is {}, expected {v}",
                self.pq_order_valuation
            ));
        }
        if !self.pq_cyclic {
            out.push("(ii) P/Q is not cyclic".into());
        }
        if self.q_equals_p != (self.pq_order_valuation == 0) {
            out.push("report inconsistent: q_equals_p disagrees with pq_order_valuation".into());
        }
        if self.n > 2 && v >= 1 && self.perfect_form_on_q_or_p {
            out.push("(iv) an invariant perfect pairing exists on P or Q".into());
        }
        if self.n > 2 && v == 1 && self.perfect_symmetric_form_exists {
            out.push("(v) a stable lattice carries a perfect invariant pairing".into());
        }
        if v == 0 && !(self.q_equals_p && self.p_well_rounded) {
            out.push("(vi) Q = P with P well-rounded fails".into());
        }
        if !self.dual_of_p_is_scaled_q {
            out.push("dual of P under l^r h is not l^-r Q".into());
        }
        out
    }
}

/// `L_i ~ L_j` iff `L_i = ℓ^k L_j` for some integer `k`.
pub fn scaling_classes(lattices: &[Lattice]) -> Result<Vec<Lattice>> {
    let mut reps: Vec<(Lattice, i64)> = Vec::new();
    for l in lattices {
        let v = valuation_ell(&l.basis().det()?, l.ell())?;
        let m = l.dim() as i64;
        let mut found = false;
        for (r, rv) in &reps {
            let dv = v - rv;
            if dv % m == 0 && equal_at_ell(l, &r.ell_multiple(dv / m))? {
                found = true;
                break;
            }
        }
        if !found {
            reps.push((l.clone(), v));
        }
    }
    Ok(reps.into_iter().map(|(l, _)| l).collect())
}

/// Whether some invariant symmetric form, rescaled to content 1 on some
/// lattice of `lattices`, is perfect there.
fn perfect_form_among(
    ctx: &SymnContext,
    lattices: &[Lattice],
    forms: &[ExactMatrix],
) -> Result<bool> {
    for l in lattices {
        for b in forms {
            let e = BilinearForm::new(b.clone(), FormKind::Symmetric, ctx.ell)?;
            let (e, _) = normalize(l, &e)?;
            if is_perfect(l, &e)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

pub fn verify_craig(n: usize, ell: u64) -> Result<CraigReport> {
    let ctx = build_context(n, ell)?;
    let pq_order_valuation = index_valuation(&ctx.p, &ctx.q)?;
    let transition = ctx.p.coordinates(ctx.q.basis())?;
    let pq_cyclic = elementary_valuations(&transition, ell)?.len() <= 1;
    let disc = discriminant_group(&ctx.q, &ctx.h)?;
    if disc.order_valuation() != pq_order_valuation {
        return Err(Error::Inconsistent(
            "discriminant of (Q, h) and index [P : Q] disagree".into(),
        ));
    }

    let between = stable_lattices_between(&ctx.q, &ctx.p, &ctx.reflections, &SeedStrategy::Full)?;
    let classes = scaling_classes(&between)?;
    let forms = invariant_forms(&ctx.reflections, FormFilter::Symmetric);
    let perfect_symmetric_form_exists = perfect_form_among(&ctx, &classes, &forms)?;
    let perfect_form_on_q_or_p = perfect_form_among(&ctx, &[ctx.q.clone(), ctx.p.clone()], &forms)?;

    let p_action = ctx.reflections.in_basis(&ctx.p)?;
    let p_well_rounded = is_well_rounded(&p_action.reduce_mod(ell)?)?.well_rounded;
    let r = nu(n, ell) as i64;
    let dual_of_p_is_scaled_q =
        equal_at_ell(&dual_of_p_under_scaled_h(n, ell)?, &ctx.q.ell_multiple(-r))?;

    Ok(CraigReport {
        n,
        ell,
        pq_order_valuation,
        pq_cyclic,
        stable_lattice_classes: classes.len(),
        perfect_symmetric_form_exists,
        q_equals_p: equal_at_ell(&ctx.q, &ctx.p)?,
        p_well_rounded,
        stable_lattices_between_q_and_p: between.len(),
        perfect_form_on_q_or_p,
        dual_of_p_is_scaled_q,
        enumeration_bound: crate::enumeration_bound(),
    })
}

/// Dual of `P` with respect to `ℓ^r h`, where `ℓ^r` exactly divides `n`.
pub fn dual_of_p_under_scaled_h(n: usize, ell: u64) -> Result<Lattice> {
    let ctx = build_context(n, ell)?;
    let r = nu(n, ell) as i64;
    dual_lattice(&ctx.p, &ctx.h.scaled(&ell_pow(ell, r))?)
}

/// The `t` with `Q ⊆ ℓ^t L ⊆ P`, if one exists.
pub fn scaling_into_q_p(ctx: &SymnContext, l: &Lattice) -> Result<Option<i64>> {
    let m = ctx.n as i64 - 1;
    let vq = valuation_ell(&ctx.q.basis().det()?, ctx.ell)?;
    let vl = valuation_ell(&l.basis().det()?, ctx.ell)?;
    // det(ℓ^t L) has valuation vl + m t, which must lie in [vq - v(n), vq].
    let lo = (vq - nu(ctx.n, ctx.ell) as i64 - vl).div_euclid(m) - 1;
    let hi = (vq - vl).div_euclid(m) + 1;
    for t in lo..=hi {
        let s = l.ell_multiple(t);
        if contains_at_ell(&s, &ctx.q)? && contains_at_ell(&ctx.p, &s)? {
            return Ok(Some(t));
        }
    }
    Ok(None)
}
