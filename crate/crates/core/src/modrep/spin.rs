//! Submodules of `F_ℓ`-representations by spinning seed vectors.

use std::collections::BTreeSet;

use super::ModuleModL;
use crate::error::{Error, Result};
use crate::linalg::modp::EchelonBuilder;
use crate::linalg::{ModPMatrix, Subspace};

pub const MAX_STABLE_DIM: usize = 8;
pub const MAX_STABLE_ELL: u64 = 11;

/// Smallest subspace containing `seed` and stable under `gens`.
pub fn spin(ell: u64, gens: &[ModPMatrix], seed: &[u64]) -> Subspace {
    let dim = seed.len();
    let mut b = EchelonBuilder::new(ell);
    spin_into(&mut b, gens, vec![seed.to_vec()], dim);
    Subspace::span(ell, dim, b.vectors())
}

/// Adds the orbit span of `queue` to `b`, stopping early once `b` is full.
pub(crate) fn spin_into(
    b: &mut EchelonBuilder,
    gens: &[ModPMatrix],
    seeds: Vec<Vec<u64>>,
    dim: usize,
) {
    let mut queue: Vec<Vec<u64>> = seeds.into_iter().filter(|v| b.insert(v.clone())).collect();
    while let Some(v) = queue.pop() {
        if b.len() == dim {
            return;
        }
        for g in gens {
            let w = g.mul_vec(&v);
            if b.insert(w.clone()) {
                queue.push(w);
            }
        }
    }
}

/// Number of lines in `F_ℓ^dim`.
fn projective_count(ell: u64, dim: usize) -> u128 {
    let e = ell as u128;
    (0..dim).fold(0u128, |acc, _| acc.saturating_mul(e).saturating_add(1))
}

/// Representatives of the lines of `F_ℓ^dim`, first nonzero coordinate 1,
/// in lexicographic order.
pub(crate) fn projective_seeds(ell: u64, dim: usize) -> impl Iterator<Item = Vec<u64>> {
    (0..dim).rev().flat_map(move |lead| {
        let tail = dim - lead - 1;
        let total = (ell as u128).pow(tail as u32);
        (0..total).map(move |mut k| {
            let mut v = vec![0u64; dim];
            v[lead] = 1;
            for j in (lead + 1..dim).rev() {
                v[j] = (k % ell as u128) as u64;
                k /= ell as u128;
            }
            v
        })
    })
}

fn too_large(what: &str, count: u128, bound: u64) -> Error {
    Error::TooLarge {
        what: what.into(),
        count,
        bound,
    }
}

/// First proper nonzero submodule met while spinning seeds in order, or
/// `None` if every seed spins to the whole space (the module is simple).
/// Fails once more than `budget` seeds would be needed.
pub fn find_proper_submodule(m: &ModuleModL, budget: u64) -> Result<Option<Subspace>> {
    let dim = m.dim();
    for (k, seed) in projective_seeds(m.ell(), dim).enumerate() {
        if k as u64 >= budget {
            return Err(too_large(
                "seed vectors for simplicity test",
                projective_count(m.ell(), dim),
                budget,
            ));
        }
        let mut b = EchelonBuilder::new(m.ell());
        spin_into(&mut b, m.generators(), vec![seed], dim);
        if b.len() < dim {
            return Ok(Some(Subspace::span(m.ell(), dim, b.vectors())));
        }
    }
    Ok(None)
}

pub fn is_simple(m: &ModuleModL) -> Result<bool> {
    if m.dim() == 0 {
        return Ok(false);
    }
    Ok(find_proper_submodule(m, crate::enumeration_bound())?.is_none())
}

/// Every proper nonzero stable subspace, sorted by dimension then basis.
///
/// Cyclic submodules come from spinning each line; every submodule is a sum
/// of cyclic ones, so closing under sums completes the list.
pub fn stable_subspaces(m: &ModuleModL) -> Result<Vec<Subspace>> {
    let (ell, dim) = (m.ell(), m.dim());
    let bound = crate::enumeration_bound();
    let seeds = projective_count(ell, dim);
    if dim > MAX_STABLE_DIM || ell > MAX_STABLE_ELL || seeds > bound as u128 {
        return Err(too_large(
            &format!("stable subspace scan (dim {dim}, ell {ell})"),
            seeds,
            bound,
        ));
    }
    let mut cyclic = BTreeSet::new();
    for seed in projective_seeds(ell, dim) {
        let s = spin(ell, m.generators(), &seed);
        if s.is_proper_nonzero() {
            cyclic.insert(s);
        }
    }
    let cyclic: Vec<Subspace> = cyclic.into_iter().collect();
    let mut all: BTreeSet<Subspace> = cyclic.iter().cloned().collect();
    let mut frontier: Vec<Subspace> = cyclic.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for c in &cyclic {
                let s = x.sum(c);
                if s.is_proper_nonzero() && !all.contains(&s) {
                    all.insert(s.clone());
                    next.push(s);
                    if all.len() as u64 > bound {
                        return Err(too_large("stable subspaces", all.len() as u128, bound));
                    }
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<Subspace> = all.into_iter().collect();
    out.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.basis().cmp(b.basis())));
    Ok(out)
}
