//! Finite layers `X/Λ` with `ℓX ⊆ Λ ⊆ X` and the breadth-first search for
//! stable lattices inside a window.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;

use super::{algebra_basis, stable_subspaces, GroupAction, ModuleModL};
use crate::error::{Error, Result};
use crate::lattice::{contains_at_ell, equal_at_ell, index_valuation, Lattice};
use crate::linalg::modp::EchelonBuilder;
use crate::linalg::{ModPMatrix, SolutionSet, Subspace};
use crate::Rat;

/// `X/Λ` as an `F_ℓ`-representation, with coordinates on the non-pivot
/// columns of the image of `Λ` in `X/ℓX`.
#[derive(Clone, Debug)]
pub struct LayerModule {
    pub x: Lattice,
    pub lambda: Lattice,
    pub relations: Subspace,
    pub free: Vec<usize>,
    pub module: ModuleModL,
}

impl LayerModule {
    pub fn new(x: &Lattice, lambda: &Lattice, act: &GroupAction) -> Result<Self> {
        let ell = x.ell();
        if !contains_at_ell(x, lambda)? || !contains_at_ell(lambda, &x.ell_multiple(1))? {
            return Err(Error::NotContained { ell });
        }
        let t = x.coordinates(lambda.basis())?;
        let t = ModPMatrix::from_rational(&t, ell)?;
        let m = x.dim();
        let cols: Vec<Vec<u64>> = (0..m).map(|j| t.col(j)).collect();
        let relations = Subspace::span(ell, m, &cols);
        let pivots = relations.pivots();
        let free = (0..m).filter(|c| !pivots.contains(c)).collect();
        let gens = act
            .in_basis(x)?
            .generators()
            .iter()
            .map(|g| ModPMatrix::from_rational(g, ell))
            .collect::<Result<Vec<_>>>()?;
        let module = ModuleModL::new(ell, m, gens)?.quotient(&relations)?;
        Ok(LayerModule {
            x: x.clone(),
            lambda: lambda.clone(),
            relations,
            free,
            module,
        })
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Ambient vector lifting a quotient vector.
    pub fn lift_vector(&self, w: &[u64]) -> Vec<Rat> {
        let mut coords = vec![Rat::from_integer(BigInt::from(0)); self.x.dim()];
        for (&c, &v) in self.free.iter().zip(w) {
            coords[c] = Rat::from_integer(BigInt::from(v));
        }
        self.x.basis().mul_vec(&coords)
    }

    /// The lattice `Λ + lift(W)` between `Λ` and `X`.
    pub fn lift(&self, w: &Subspace) -> Result<Lattice> {
        let mut gens = self.lambda.basis_vectors();
        gens.extend(w.basis().iter().map(|v| self.lift_vector(v)));
        Lattice::from_generators(self.x.ell(), self.x.dim(), &gens)
    }
}

/// Reduction of the submodule lattice of an isotypic layer to a small
/// space. The first `n_generators` generators form the group whose
/// reduction `s_bar` is absolutely simple; the remaining generators commute
/// with them.
#[derive(Clone, Debug)]
pub struct Condensation {
    pub n_generators: usize,
    pub s_bar: ModuleModL,
}

#[derive(Clone, Debug)]
pub enum SeedStrategy {
    Full,
    Condensed(Condensation),
}

/// Nonzero stable subspaces of `m`, the whole space included.
fn nonzero_stable_subspaces(m: &ModuleModL, strategy: &SeedStrategy) -> Result<Vec<Subspace>> {
    if m.dim() == 0 {
        return Ok(Vec::new());
    }
    if let SeedStrategy::Condensed(c) = strategy {
        if let Some(list) = condensed_subspaces(m, c)? {
            return Ok(list);
        }
    }
    let mut out = stable_subspaces(m)?;
    out.push(Subspace::full(m.ell(), m.dim()));
    Ok(out)
}

/// Nonzero stable subspaces through an idempotent `e` of the image of the
/// first group's algebra that acts on `s_bar` as a matrix unit. Returns
/// `None` when the structural checks fail.
fn condensed_subspaces(m: &ModuleModL, c: &Condensation) -> Result<Option<Vec<Subspace>>> {
    let p = m.ell();
    let k = c.n_generators;
    let (s, x) = (c.s_bar.dim(), m.dim());
    if c.s_bar.generators().len() != k || m.generators().len() < k {
        return Ok(None);
    }
    let mn = m.restrict_generators(0..k);
    let md = m.restrict_generators(k..m.generators().len());
    for a in mn.generators() {
        for b in md.generators() {
            if a.mul(b)? != b.mul(a)? {
                return Ok(None);
            }
        }
    }
    let joint = c.s_bar.direct_sum(&mn)?;
    let words = algebra_basis(&joint);
    let block = |w: &ModPMatrix, off: usize, n: usize| {
        let mut out = ModPMatrix::zeros(p, n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, w.get(off + i, off + j));
            }
        }
        out
    };
    let on_s: Vec<ModPMatrix> = words.iter().map(|w| block(w, 0, s)).collect();
    let on_x: Vec<ModPMatrix> = words.iter().map(|w| block(w, s, x)).collect();

    let cols: Vec<Vec<u64>> = on_s.iter().map(ModPMatrix::vectorize).collect();
    let a = ModPMatrix::from_rows(p, &cols, s * s)?.transpose();
    let mut unit = ModPMatrix::zeros(p, s, s);
    unit.set(0, 0, 1);
    let rhs = ModPMatrix::new(p, s * s, 1, unit.vectorize())?;
    let SolutionSet::Affine { particular, .. } = a.solve(&rhs)? else {
        return Ok(None);
    };
    let mut e = ModPMatrix::zeros(p, x, x);
    for (coef, w) in particular.iter().zip(&on_x) {
        if *coef != 0 {
            e = e.add(&w.scale(*coef));
        }
    }
    if e.is_zero() || e.mul(&e)? != e {
        return Ok(None);
    }
    for w in &on_x {
        let ewe = e.mul(w)?.mul(&e)?;
        let lambda = (0..x * x)
            .map(|i| (ewe.entries()[i], e.entries()[i]))
            .find(|&(_, b)| b != 0)
            .map(|(a, b)| a * crate::linalg::arith::mod_inverse(b, p) % p);
        if ewe != e.scale(lambda.unwrap_or(0)) {
            return Ok(None);
        }
    }
    let mut ideal = EchelonBuilder::new(p);
    for l in &on_x {
        let le = l.mul(&e)?;
        for r in &on_x {
            ideal.insert(le.mul(r)?.entries().to_vec());
        }
    }
    let mut id = ModPMatrix::identity(p, x).entries().to_vec();
    ideal.reduce(&mut id);
    if id.iter().any(|&v| v != 0) {
        return Ok(None);
    }

    let ex = Subspace::span(p, x, &(0..x).map(|j| e.col(j)).collect::<Vec<_>>());
    let small = md.submodule(&ex)?;
    let mut pieces = stable_subspaces(&small)?;
    pieces.push(Subspace::full(p, small.dim()));
    let mut out = Vec::with_capacity(pieces.len());
    for u in pieces {
        let mut vecs = Vec::new();
        for coords in u.basis() {
            let mut amb = vec![0u64; x];
            for (cf, b) in coords.iter().zip(ex.basis()) {
                for (slot, &bv) in amb.iter_mut().zip(b) {
                    *slot = (*slot + cf * bv) % p;
                }
            }
            for w in &on_x {
                vecs.push(w.mul_vec(&amb));
            }
        }
        out.push(Subspace::span(p, x, &vecs));
    }
    Ok(Some(out))
}

/// Every lattice `L` with `bottom ⊆ L ⊆ top` stable under `act`, sorted by
/// index over `bottom` and then by canonical basis.
pub fn stable_lattices_between(
    bottom: &Lattice,
    top: &Lattice,
    act: &GroupAction,
    strategy: &SeedStrategy,
) -> Result<Vec<Lattice>> {
    if !contains_at_ell(top, bottom)? {
        return Err(Error::NotContained { ell: top.ell() });
    }
    for l in [bottom, top] {
        if let Some(k) = act.first_unstable(l)? {
            return Err(Error::NotStable { generator: k });
        }
    }
    let bound = crate::enumeration_bound();
    let mut seen: BTreeMap<Vec<Vec<Rat>>, Lattice> = BTreeMap::new();
    seen.insert(bottom.canonical_key(), bottom.clone());
    let mut queue = VecDeque::from([bottom.clone()]);
    while let Some(l) = queue.pop_front() {
        let x = l.ell_multiple(-1).intersection(top)?;
        if equal_at_ell(&x, &l)? {
            continue;
        }
        let layer = LayerModule::new(&x, &l, act)?;
        for w in nonzero_stable_subspaces(&layer.module, strategy)? {
            let next = layer.lift(&w)?;
            let key = next.canonical_key();
            if let std::collections::btree_map::Entry::Vacant(e) = seen.entry(key) {
                e.insert(next.clone());
                if seen.len() as u64 > bound {
                    return Err(Error::TooLarge {
                        what: "stable lattices".into(),
                        count: seen.len() as u128,
                        bound,
                    });
                }
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<(u64, Vec<Vec<Rat>>, Lattice)> = seen
        .into_iter()
        .map(|(k, l)| Ok((index_valuation(&l, bottom)?, k, l)))
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(out.into_iter().map(|t| t.2).collect())
}
