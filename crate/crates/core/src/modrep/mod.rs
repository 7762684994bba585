//! Matrix group actions, their reductions mod ℓ, and the well-rounded test.

mod algebra;
mod forms;
mod layers;
mod spin;

pub use algebra::{
    algebra_basis, algebra_span_dim, commutant_dim, hom_space, is_well_rounded,
    lifted_algebra_is_full, WellRoundedEvidence,
};
pub use forms::{invariant_forms, FormFilter};
pub use layers::{stable_lattices_between, Condensation, LayerModule, SeedStrategy};
pub use spin::{
    find_proper_submodule, is_simple, spin, stable_subspaces, MAX_STABLE_DIM, MAX_STABLE_ELL,
};

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::arith::{is_ell_integral, is_ell_unit};
use crate::linalg::text::{format_matrix, Tokens};
use crate::linalg::{ModPMatrix, Subspace};
use num_traits::Zero;

use crate::ExactMatrix;

/// A finite set of invertible rational matrices acting on `Q^m` by left
/// multiplication on column vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupAction {
    dim: usize,
    generators: Vec<ExactMatrix>,
    label: String,
}

impl GroupAction {
    pub fn new(dim: usize, generators: Vec<ExactMatrix>, label: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidAction("dimension 0".into()));
        }
        for (k, g) in generators.iter().enumerate() {
            if g.rows() != dim || g.cols() != dim {
                return Err(Error::InvalidAction(format!(
                    "generator {k} is {}x{}, expected {dim}x{dim}",
                    g.rows(),
                    g.cols()
                )));
            }
            if g.det()?.is_zero() {
                return Err(Error::InvalidAction(format!("generator {k} is singular")));
            }
        }
        Ok(GroupAction {
            dim,
            generators,
            label: label.into(),
        })
    }

    pub fn trivial(dim: usize) -> Self {
        GroupAction {
            dim,
            generators: Vec::new(),
            label: format!("trivial({dim})"),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[ExactMatrix] {
        &self.generators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Reduction mod ℓ; every generator must be ℓ-integral with unit determinant.
    pub fn reduce_mod(&self, ell: u64) -> Result<ModuleModL> {
        let mut gens = Vec::with_capacity(self.generators.len());
        for (k, g) in self.generators.iter().enumerate() {
            if !is_ell_unit(&g.det()?, ell) {
                return Err(Error::InvalidAction(format!(
                    "generator {k} does not have unit determinant at {ell}"
                )));
            }
            gens.push(ModPMatrix::from_rational(g, ell)?);
        }
        ModuleModL::new(ell, self.dim, gens)
    }

    /// Index of the first generator not preserving `l`.
    pub fn first_unstable(&self, l: &Lattice) -> Result<Option<usize>> {
        for (k, g) in self.generators.iter().enumerate() {
            if !l.is_stable_under(g)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    pub fn preserves(&self, l: &Lattice) -> Result<bool> {
        Ok(self.first_unstable(l)?.is_none())
    }

    /// The action written in the basis of `l`; `l` must be stable.
    pub fn in_basis(&self, l: &Lattice) -> Result<GroupAction> {
        let mut gens = Vec::with_capacity(self.generators.len());
        for (k, g) in self.generators.iter().enumerate() {
            let h = l.action_in_basis(g)?;
            if !h.entries().iter().all(|x| is_ell_integral(x, l.ell())) {
                return Err(Error::NotStable { generator: k });
            }
            gens.push(h);
        }
        Ok(GroupAction {
            dim: self.dim,
            generators: gens,
            label: self.label.clone(),
        })
    }

    /// Conjugate action `c^-1 g c`.
    pub fn conjugate(&self, c: &ExactMatrix) -> Result<GroupAction> {
        let ci = c.inverse()?;
        let gens = self.generators.iter().map(|g| &(&ci * g) * c).collect();
        Ok(GroupAction {
            dim: self.dim,
            generators: gens,
            label: self.label.clone(),
        })
    }

    /// Index of the first generator `g` with `g^T B g != B`.
    pub fn first_non_invariant(&self, gram: &ExactMatrix) -> Option<usize> {
        self.generators
            .iter()
            .position(|g| &(&g.transpose() * gram) * g != *gram)
    }

    /// Every group element, by breadth-first closure; fails past `limit` elements.
    pub fn enumerate_group(&self, limit: usize) -> Result<Vec<ExactMatrix>> {
        let id = ExactMatrix::identity(self.dim);
        let mut seen: HashSet<ExactMatrix> = HashSet::from([id.clone()]);
        let mut order = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = g * &x;
                if seen.insert(y.clone()) {
                    if seen.len() > limit {
                        return Err(Error::TooLarge {
                            what: format!("group {}", self.label),
                            count: seen.len() as u128,
                            bound: limit as u64,
                        });
                    }
                    order.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        Ok(order)
    }
}

/// Action on the tensor product: generators `g ⊗ 1` then `1 ⊗ h`, with `a`
/// giving the outer Kronecker blocks.
pub fn product_action(a: &GroupAction, b: &GroupAction) -> GroupAction {
    let ia = ExactMatrix::identity(a.dim);
    let ib = ExactMatrix::identity(b.dim);
    let mut gens: Vec<ExactMatrix> = a.generators.iter().map(|g| g.kron(&ib)).collect();
    gens.extend(b.generators.iter().map(|h| ia.kron(h)));
    GroupAction {
        dim: a.dim * b.dim,
        generators: gens,
        label: format!("{} x {}", a.label, b.label),
    }
}

/// An `F_ℓ`-representation given by generator matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleModL {
    ell: u64,
    dim: usize,
    generators: Vec<ModPMatrix>,
}

impl ModuleModL {
    pub fn new(ell: u64, dim: usize, generators: Vec<ModPMatrix>) -> Result<Self> {
        crate::linalg::arith::check_prime(ell)?;
        for (k, g) in generators.iter().enumerate() {
            if g.p() != ell {
                return Err(Error::PrimeMismatch(ell, g.p()));
            }
            if g.rows() != dim || g.cols() != dim {
                return Err(Error::InvalidAction(format!(
                    "generator {k} has the wrong shape"
                )));
            }
            if dim > 0 && !g.is_invertible() {
                return Err(Error::InvalidAction(format!(
                    "generator {k} is not invertible mod {ell}"
                )));
            }
        }
        Ok(ModuleModL {
            ell,
            dim,
            generators,
        })
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[ModPMatrix] {
        &self.generators
    }

    /// Keeps only the generators whose indices are listed.
    pub fn restrict_generators(&self, keep: impl IntoIterator<Item = usize>) -> ModuleModL {
        let generators = keep
            .into_iter()
            .map(|k| self.generators[k].clone())
            .collect();
        ModuleModL {
            generators,
            ..self.clone()
        }
    }

    /// Block-diagonal sum with the same number of generators.
    pub fn direct_sum(&self, other: &ModuleModL) -> Result<ModuleModL> {
        if self.generators.len() != other.generators.len() {
            return Err(Error::InvalidAction(
                "direct sum needs matching generator lists".into(),
            ));
        }
        let n = self.dim + other.dim;
        let gens = self
            .generators
            .iter()
            .zip(&other.generators)
            .map(|(a, b)| {
                let mut m = ModPMatrix::zeros(self.ell, n, n);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        m.set(i, j, a.get(i, j));
                    }
                }
                for i in 0..other.dim {
                    for j in 0..other.dim {
                        m.set(self.dim + i, self.dim + j, b.get(i, j));
                    }
                }
                m
            })
            .collect();
        ModuleModL::new(self.ell, n, gens)
    }

    /// The submodule `w` with the induced action in its rref basis.
    pub fn submodule(&self, w: &Subspace) -> Result<ModuleModL> {
        let basis = w.basis();
        let pivots = w.pivots();
        let mut gens = Vec::with_capacity(self.generators.len());
        for (k, g) in self.generators.iter().enumerate() {
            let mut m = ModPMatrix::zeros(self.ell, basis.len(), basis.len());
            for (j, b) in basis.iter().enumerate() {
                let image = g.mul_vec(b);
                if !w.contains(&image) {
                    return Err(Error::NotStable { generator: k });
                }
                // In rref coordinates the coefficient of row i is the entry at pivot i.
                for (i, &pc) in pivots.iter().enumerate() {
                    m.set(i, j, image[pc]);
                }
            }
            gens.push(m);
        }
        ModuleModL::new(self.ell, basis.len(), gens)
    }

    /// `self / w`, in coordinates indexed by the non-pivot columns of `w`.
    pub fn quotient(&self, w: &Subspace) -> Result<ModuleModL> {
        let pivots = w.pivots();
        let free: Vec<usize> = (0..self.dim).filter(|c| !pivots.contains(c)).collect();
        let mut gens = Vec::with_capacity(self.generators.len());
        for (k, g) in self.generators.iter().enumerate() {
            if !w.is_stable_under(g) {
                return Err(Error::NotStable { generator: k });
            }
            let mut m = ModPMatrix::zeros(self.ell, free.len(), free.len());
            for (j, &c) in free.iter().enumerate() {
                let mut image = g.col(c);
                crate::linalg::modp::reduce_by_rref(&mut image, w.basis(), &pivots, self.ell);
                for (i, &r) in free.iter().enumerate() {
                    m.set(i, j, image[r]);
                }
            }
            gens.push(m);
        }
        ModuleModL::new(self.ell, free.len(), gens)
    }
}

/// Reads `action dim=<m> ngens=<k> ell=<p>` followed by `k` matrices.
pub fn read_action(tokens: &mut Tokens) -> Result<(GroupAction, u64)> {
    let (line, head) = tokens.next_token()?;
    if head != "action" {
        return Err(Error::Parse {
            line,
            msg: format!("expected `action`, got `{head}`"),
        });
    }
    let mut field = |key: &str| -> Result<u64> {
        let (line, t) = tokens.next_token()?;
        match t.split_once('=') {
            Some((k, v)) if k == key => v.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad value in `{t}`"),
            }),
            _ => Err(Error::Parse {
                line,
                msg: format!("expected `{key}=...`, got `{t}`"),
            }),
        }
    };
    let dim = field("dim")? as usize;
    let ngens = field("ngens")? as usize;
    let ell = field("ell")?;
    crate::linalg::arith::check_prime(ell)?;
    let mut gens = Vec::with_capacity(ngens);
    for _ in 0..ngens {
        gens.push(tokens.next_matrix()?);
    }
    Ok((GroupAction::new(dim, gens, "file")?, ell))
}

pub fn parse_action(text: &str) -> Result<(GroupAction, u64)> {
    let mut t = Tokens::new(text);
    let out = read_action(&mut t)?;
    if !t.is_empty() {
        return Err(Error::Parse {
            line: t.line(),
            msg: "trailing tokens after action".into(),
        });
    }
    Ok(out)
}

pub fn format_action(a: &GroupAction, ell: u64) -> String {
    let mut s = format!(
        "action dim={} ngens={} ell={ell}\n",
        a.dim,
        a.generators.len()
    );
    for g in &a.generators {
        s.push_str(&format_matrix(g));
    }
    s
}
