//! Tensor lattices `T = S ⊗ Γ` with pairings `e = f ⊗ h`, where `S` is a
//! well-rounded module for a group `N` and `Γ` a lattice for a group `D`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    contains_at_ell, discriminant_group, dual_lattice, equal_at_ell, is_perfect, normalize,
    read_form, read_lattice, tensor_lattice, BilinearForm, DiscriminantGroup, FormKind, Lattice,
};
use crate::linalg::arith::{check_prime, is_ell_integral, is_ell_unit, residue, valuation_ell};
use crate::linalg::text::Tokens;
use crate::linalg::{ModPMatrix, Subspace};
use crate::modrep::{
    find_proper_submodule, hom_space, invariant_forms, is_well_rounded, product_action,
    read_action, stable_lattices_between, Condensation, FormFilter, GroupAction, LayerModule,
    ModuleModL, SeedStrategy,
};
use crate::symn::{build_context, nu, scaling_classes};
use crate::{ExactMatrix, Rat};

/// Search window `ℓ^below T ⊆ L ⊆ ℓ^-above T` around a reference lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub below: u32,
    pub above: u32,
}

impl Default for Window {
    fn default() -> Self {
        Window { below: 1, above: 1 }
    }
}

impl Window {
    pub fn around(&self, l: &Lattice) -> (Lattice, Lattice) {
        (
            l.ell_multiple(self.below as i64),
            l.ell_multiple(-(self.above as i64)),
        )
    }
}

#[derive(Clone, Debug)]
pub struct TensorScenario {
    pub label: String,
    pub ell: u64,
    /// `N` acting on `S`, written in a basis of `S`.
    pub s_action: GroupAction,
    pub f: BilinearForm,
    pub d_action: GroupAction,
    pub gamma: Lattice,
    pub h: BilinearForm,
    pub window: Window,
}

/// Unipotent generators of `SL_2(Z)`, which generate `SL_2(F_ℓ)` for every ℓ.
pub fn stand_in_action() -> GroupAction {
    let u = crate::linalg::exact_from_rows(&[&[1, 1], &[0, 1]]);
    let l = crate::linalg::exact_from_rows(&[&[1, 0], &[1, 1]]);
    GroupAction::new(2, vec![u, l], "SL2").expect("unimodular")
}

pub fn symplectic_form(ell: u64) -> Result<BilinearForm> {
    BilinearForm::new(
        crate::linalg::exact_from_rows(&[&[0, 1], &[-1, 0]]),
        FormKind::Alternating,
        ell,
    )
}

impl TensorScenario {
    /// Rank-2 symplectic stand-in for `S`, `D = S_n` on its root lattice.
    pub fn symmetric_group(n: usize, ell: u64) -> Result<Self> {
        let ctx = build_context(n, ell)?;
        Ok(TensorScenario {
            label: format!("2d=2 S{n} ell={ell}"),
            ell,
            s_action: stand_in_action(),
            f: symplectic_form(ell)?,
            d_action: ctx.reflections.clone(),
            gamma: ctx.q.clone(),
            h: ctx.h.clone(),
            window: Window::default(),
        })
    }

    /// `S` = stand-in ⊗ (weight lattice of `S_m`), acted on by
    /// `SL_2 × S_m`; `D = S_n` on its root lattice.
    pub fn composite(m: usize, n: usize, ell: u64) -> Result<Self> {
        let cm = build_context(m, ell)?;
        let cn = build_context(n, ell)?;
        let weight_action = cm.reflections.in_basis(&cm.p)?;
        let s_action =
            product_action(&stand_in_action(), &weight_action).with_label(format!("SL2 x S{m}"));
        let f = symplectic_form(ell)?.tensor(&cm.h_on_p)?;
        Ok(TensorScenario {
            label: format!("composite m={m} n={n} ell={ell}"),
            ell,
            s_action,
            f,
            d_action: cn.reflections.clone(),
            gamma: cn.q.clone(),
            h: cn.h.clone(),
            window: Window::default(),
        })
    }

    pub fn two_d(&self) -> usize {
        self.s_action.dim()
    }

    pub fn s_lattice(&self) -> Lattice {
        Lattice::standard(self.two_d(), self.ell).expect("prime checked at construction")
    }

    pub fn product(&self) -> GroupAction {
        product_action(&self.s_action, &self.d_action)
    }

    /// `N` alone on the tensor space.
    pub fn n_on_tensor(&self) -> GroupAction {
        product_action(&self.s_action, &GroupAction::trivial(self.d_action.dim()))
    }

    pub fn s_bar(&self) -> Result<ModuleModL> {
        self.s_action.reduce_mod(self.ell)
    }

    /// `(S ⊗ Γ, f ⊗ h)`.
    pub fn tensor(&self) -> Result<(Lattice, BilinearForm)> {
        build_tensor(&self.s_lattice(), &self.gamma, &self.f, &self.h)
    }

    pub fn hypotheses(&self) -> Result<Hypotheses> {
        let s = self.s_lattice();
        let s_well_rounded = is_well_rounded(&self.s_bar()?)?.well_rounded;
        let f_invariant = self.s_action.first_non_invariant(self.f.gram()).is_none();
        let (fnorm, _) = normalize(&s, &self.f)?;
        let f_perfect = is_perfect(&s, &fnorm)?;
        let h_invariant = self.d_action.first_non_invariant(self.h.gram()).is_none();
        let gamma_stable = self.d_action.preserves(&self.gamma)?;
        let d_irreducible = irreducibility_witness(&self.d_action, self.ell)?.is_some();
        let d_perfect_lattice_in_window = perfect_stable_lattice_in_window(self)?;
        Ok(Hypotheses {
            s_well_rounded,
            f_alternating: self.f.kind() == FormKind::Alternating,
            f_invariant,
            f_perfect,
            h_symmetric: self.h.kind() == FormKind::Symmetric,
            h_invariant,
            gamma_stable,
            d_irreducible,
            d_perfect_lattice_in_window,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub s_well_rounded: bool,
    pub f_alternating: bool,
    pub f_invariant: bool,
    pub f_perfect: bool,
    pub h_symmetric: bool,
    pub h_invariant: bool,
    pub gamma_stable: bool,
    pub d_irreducible: bool,
    /// Some `D`-stable lattice in the window around `Γ` carries a perfect
    /// invariant symmetric pairing (content normalized).
    pub d_perfect_lattice_in_window: bool,
}

impl Hypotheses {
    pub fn hold(&self) -> bool {
        self.s_well_rounded
            && self.f_alternating
            && self.f_invariant
            && self.f_perfect
            && self.h_symmetric
            && self.h_invariant
            && self.gamma_stable
            && self.d_irreducible
            && !self.d_perfect_lattice_in_window
    }
}

const IRREDUCIBILITY_PRIMES: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];

/// A prime `p` at which the reduction of `act` is simple; that forces
/// irreducibility over `Q`.
pub fn irreducibility_witness(act: &GroupAction, ell: u64) -> Result<Option<u64>> {
    let mut primes = vec![ell];
    primes.extend(IRREDUCIBILITY_PRIMES.iter().copied().filter(|&p| p != ell));
    for p in primes {
        let integral = act
            .generators()
            .iter()
            .all(|g| g.entries().iter().all(|x| is_ell_integral(x, p)));
        if !integral
            || !act
                .generators()
                .iter()
                .all(|g| g.det().is_ok_and(|d| is_ell_unit(&d, p)))
        {
            continue;
        }
        let m = act.reduce_mod(p)?;
        match find_proper_submodule(&m, crate::enumeration_bound()) {
            Ok(None) => return Ok(Some(p)),
            Ok(Some(_)) | Err(Error::TooLarge { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

fn perfect_stable_lattice_in_window(scn: &TensorScenario) -> Result<bool> {
    let (low, high) = scn.window.around(&scn.gamma);
    let lattices = stable_lattices_between(&low, &high, &scn.d_action, &SeedStrategy::Full)?;
    let forms = invariant_forms(&scn.d_action, FormFilter::Symmetric);
    for l in scaling_classes(&lattices)? {
        for b in &forms {
            let e = BilinearForm::new(b.clone(), FormKind::Symmetric, scn.ell)?;
            let (e, _) = normalize(&l, &e)?;
            if is_perfect(&l, &e)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// `(S ⊗ Γ, f ⊗ h)` with `S` giving the outer Kronecker blocks.
pub fn build_tensor(
    s: &Lattice,
    gamma: &Lattice,
    f: &BilinearForm,
    h: &BilinearForm,
) -> Result<(Lattice, BilinearForm)> {
    if f.kind() == h.kind() {
        return Err(Error::InvalidForm(format!(
            "both forms are {}; their tensor product would be symmetric, not alternating",
            f.kind().as_str()
        )));
    }
    if f.dim() != s.dim() || h.dim() != gamma.dim() {
        return Err(Error::Shape("form and lattice dimensions differ".into()));
    }
    Ok((tensor_lattice(s, gamma)?, f.tensor(h)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorVerdict {
    pub discriminant: DiscriminantGroup,
    /// `t` with `#(T*/T) = ℓ^{2dt}`; absent when `2d` does not divide the valuation.
    pub t_exponent: Option<u64>,
    pub e_perfect: bool,
    pub jh_factor_count: usize,
    pub factorization_ok: bool,
    pub two_d: usize,
    pub order_valuation: u64,
    /// Power of ℓ divided out of `e` to give it content 1 on `T`.
    pub content_shift: i64,
    pub hypotheses: Hypotheses,
    pub hypotheses_met: bool,
    pub violations: Vec<String>,
}

pub fn verify_theorem(
    scn: &TensorScenario,
    t: &Lattice,
    e: &BilinearForm,
) -> Result<TensorVerdict> {
    let act = scn.product();
    if let Some(k) = act.first_unstable(t)? {
        return Err(Error::NotStable { generator: k });
    }
    if let Some(k) = act.first_non_invariant(e.gram()) {
        return Err(Error::NotInvariant { generator: k });
    }
    let hypotheses = scn.hypotheses()?;
    let hypotheses_met = hypotheses.hold();
    let (e, content_shift) = normalize(t, e)?;
    let discriminant = discriminant_group(t, &e)?;
    let e_perfect = is_perfect(t, &e)?;
    let two_d = scn.two_d();
    let order_valuation = discriminant.order_valuation();
    let t_exponent = (order_valuation % two_d as u64 == 0).then(|| order_valuation / two_d as u64);
    let dual = dual_lattice(t, &e)?;
    let jh_factor_count = jh_factors(t, &dual, &scn.s_bar()?, &scn.n_on_tensor())?;
    let factorization_ok = factor_lattice(scn, t)?.is_some();

    let mut violations = Vec::new();
    if hypotheses_met {
        match t_exponent {
            None => violations.push(format!(
                "order l^{order_valuation} is not a power of l^{two_d}"
            )),
            Some(0) => violations.push("discriminant is trivial (t = 0)".into()),
            Some(te) if te as usize != jh_factor_count => violations.push(format!(
                "{jh_factor_count} composition factors, expected t = {te}"
            )),
            Some(_) => {}
        }
        if e_perfect {
            violations.push("e is perfect".into());
        }
    }
    Ok(TensorVerdict {
        discriminant,
        t_exponent,
        e_perfect,
        jh_factor_count,
        factorization_ok,
        two_d,
        order_valuation,
        content_shift,
        hypotheses,
        hypotheses_met,
        violations,
    })
}

/// Number of composition factors of `t_dual / t` as an `N`-module, each
/// certified isomorphic to `s_bar` by an injective intertwiner. The module
/// is filtered by `ℓ^i t_dual + t`; each layer is peeled one copy at a time.
pub fn jh_factors(
    t: &Lattice,
    t_dual: &Lattice,
    s_bar: &ModuleModL,
    n_action: &GroupAction,
) -> Result<usize> {
    if !contains_at_ell(t_dual, t)? {
        return Err(Error::NotContained { ell: t.ell() });
    }
    let mut count = 0;
    let mut upper = t_dual.clone();
    let mut i = 0;
    while !equal_at_ell(&upper, t)? {
        i += 1;
        let lower = t_dual.ell_multiple(i).sum(t)?;
        let layer = LayerModule::new(&upper, &lower, n_action)?;
        count += peel_copies(&layer.module, s_bar, i)?;
        upper = lower;
    }
    Ok(count)
}

fn peel_copies(layer: &ModuleModL, s_bar: &ModuleModL, index: i64) -> Result<usize> {
    let d = s_bar.dim();
    if !layer.dim().is_multiple_of(d) {
        return Err(Error::NotIsomorphic(format!(
            "layer {index} has dimension {} not divisible by {d}",
            layer.dim()
        )));
    }
    let mut current = layer.clone();
    let mut count = 0;
    while current.dim() > 0 {
        let homs = hom_space(s_bar, &current)?;
        let Some(phi) = homs.first() else {
            return Err(Error::NotIsomorphic(format!(
                "layer {index}: no copy of S/lS in a quotient of dimension {}",
                current.dim()
            )));
        };
        if phi.rank() != d {
            return Err(Error::NotIsomorphic(format!(
                "layer {index}: intertwiner of rank {} < {d}",
                phi.rank()
            )));
        }
        let image = Subspace::span(
            current.ell(),
            current.dim(),
            &phi.transpose().rref().row_basis,
        );
        current = current.quotient(&image)?;
        count += 1;
    }
    Ok(count)
}

/// `Γ` with `l = S ⊗ Γ` at ℓ and `Γ` stable under `D`, if one exists. The
/// candidate is the span of the block projections of `l`'s basis.
pub fn factor_lattice(scn: &TensorScenario, l: &Lattice) -> Result<Option<Lattice>> {
    let (two_d, m) = (scn.two_d(), scn.d_action.dim());
    let mut gens = Vec::with_capacity(two_d * m * l.dim());
    for v in l.basis_vectors() {
        for k in 0..two_d {
            gens.push(v[k * m..(k + 1) * m].to_vec());
        }
    }
    let Ok(gamma) = Lattice::from_generators(scn.ell, m, &gens) else {
        return Ok(None);
    };
    let rebuilt = tensor_lattice(&scn.s_lattice(), &gamma)?;
    if equal_at_ell(&rebuilt, l)? && scn.d_action.preserves(&gamma)? {
        Ok(Some(gamma))
    } else {
        Ok(None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedLattice {
    pub index_over_bottom: u64,
    pub factors: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub window: Window,
    pub strategy: String,
    pub lattices: Vec<ClassifiedLattice>,
    pub factorization_ok: bool,
    /// `D`-stable lattices in the matching window around `Γ`.
    pub d_lattices_in_window: usize,
    /// Every `Γ` recovered is one of those, and each of those occurs.
    pub matches_d_window: bool,
    pub gamma_classes: usize,
}

pub fn classify_product_stable_lattices(scn: &TensorScenario) -> Result<Classification> {
    let (t, _) = scn.tensor()?;
    let (bottom, top) = scn.window.around(&t);
    let s_bar = scn.s_bar()?;
    let strategy = if is_well_rounded(&s_bar)?.well_rounded {
        SeedStrategy::Condensed(Condensation {
            n_generators: scn.s_action.generators().len(),
            s_bar,
        })
    } else {
        SeedStrategy::Full
    };
    let found = stable_lattices_between(&bottom, &top, &scn.product(), &strategy)?;
    let (glow, ghigh) = scn.window.around(&scn.gamma);
    let d_lattices = stable_lattices_between(&glow, &ghigh, &scn.d_action, &SeedStrategy::Full)?;
    let mut d_keys: BTreeMap<Vec<Vec<Rat>>, bool> = d_lattices
        .iter()
        .map(|l| (l.canonical_key(), false))
        .collect();
    let mut lattices = Vec::with_capacity(found.len());
    let mut gammas = Vec::new();
    let mut all_in_window = true;
    for l in &found {
        let factor = factor_lattice(scn, l)?;
        if let Some(g) = &factor {
            match d_keys.get_mut(&g.canonical_key()) {
                Some(seen) => *seen = true,
                None => all_in_window = false,
            }
            gammas.push(g.clone());
        }
        lattices.push(ClassifiedLattice {
            index_over_bottom: crate::lattice::index_valuation(l, &bottom)?,
            factors: factor.is_some(),
        });
    }
    let factorization_ok = lattices.iter().all(|c| c.factors);
    Ok(Classification {
        window: scn.window,
        strategy: match strategy {
            SeedStrategy::Full => "full".into(),
            SeedStrategy::Condensed(_) => "condensed".into(),
        },
        lattices,
        factorization_ok,
        d_lattices_in_window: d_lattices.len(),
        matches_d_window: factorization_ok && all_in_window && d_keys.values().all(|&v| v),
        gamma_classes: scaling_classes(&gammas)?.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingSpace {
    pub dimension: usize,
    pub d_form_dimension: usize,
    /// Every basis form is `f ⊗ H` for some `H`.
    pub all_factor_through_f: bool,
    /// For a one-dimensional space: the recovered `H` equals `h` up to an
    /// ℓ-unit once both are normalized on `Γ`.
    pub recovers_h_up_to_unit: Option<bool>,
}

/// `H` with `b = f ⊗ H`, found by dividing one block by a nonzero entry of `f`.
pub fn divide_by_f(b: &ExactMatrix, f: &ExactMatrix) -> Option<ExactMatrix> {
    let (two_d, m) = (f.rows(), b.rows() / f.rows());
    let (i, j) = (0..two_d * two_d)
        .map(|k| (k / two_d, k % two_d))
        .find(|&(i, j)| !f.get(i, j).is_zero())?;
    let block = b.block(i, j, m, m);
    let h = block.scale(&(Rat::from_integer(BigInt::from(1)) / f.get(i, j)));
    (f.kron(&h) == *b).then_some(h)
}

pub fn invariant_pairing_space(scn: &TensorScenario) -> Result<PairingSpace> {
    let forms = invariant_forms(&scn.product(), FormFilter::Any);
    let d_forms = invariant_forms(&scn.d_action, FormFilter::Any);
    let factors: Vec<Option<ExactMatrix>> =
        forms.iter().map(|b| divide_by_f(b, scn.f.gram())).collect();
    let all_factor_through_f = factors.iter().all(Option::is_some);
    let recovers_h_up_to_unit = match (forms.len(), factors.first()) {
        (1, Some(Some(h_found))) => Some(same_up_to_unit(h_found, scn.h.gram(), &scn.gamma)?),
        (1, _) => Some(false),
        _ => None,
    };
    Ok(PairingSpace {
        dimension: forms.len(),
        d_form_dimension: d_forms.len(),
        all_factor_through_f,
        recovers_h_up_to_unit,
    })
}

/// `a = c b` with `c` an ℓ-unit, after giving both content 1 on `gamma`.
fn same_up_to_unit(a: &ExactMatrix, b: &ExactMatrix, gamma: &Lattice) -> Result<bool> {
    let ell = gamma.ell();
    let Some(k) = b.entries().iter().position(|x| !x.is_zero()) else {
        return Ok(false);
    };
    let c = &a.entries()[k] / &b.entries()[k];
    if c.is_zero() || b.scale(&c) != *a {
        return Ok(false);
    }
    let kind = if *a == a.transpose() {
        FormKind::Symmetric
    } else {
        FormKind::Alternating
    };
    let (na, _) = normalize(gamma, &BilinearForm::new(a.clone(), kind, ell)?)?;
    let (nb, _) = normalize(gamma, &BilinearForm::new(b.clone(), kind, ell)?)?;
    let k2 = nb
        .gram()
        .entries()
        .iter()
        .position(|x| !x.is_zero())
        .expect("nonzero");
    Ok(is_ell_unit(
        &(&na.gram().entries()[k2] / &nb.gram().entries()[k2]),
        ell,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// `z` in ambient coordinates of `Γ ⊗ Q`.
    pub z: Vec<String>,
    /// `z` in the basis of `Γ`, reduced mod ℓ (nonzero, so `z ∉ ℓΓ`).
    pub z_mod_ell: Vec<u64>,
    /// Minimum ℓ-valuation of `h(z, γ)` over the basis of `Γ` (at least 1).
    pub min_valuation_h: i64,
    /// Minimum ℓ-valuation of `e(x ⊗ z, τ)` over the basis of `T` (at least 1).
    pub min_valuation_e: i64,
}

/// `z ∈ Γ - ℓΓ` with `h(z, Γ) ⊆ ℓZ_(ℓ)` and `x ⊗ z` with
/// `e(x ⊗ z, T) ⊆ ℓZ_(ℓ)`, both verified directly. `None` when `h` is
/// perfect on `Γ`.
pub fn extract_witness(scn: &TensorScenario) -> Result<Option<Witness>> {
    let ell = scn.ell;
    let (h, _) = normalize(&scn.gamma, &scn.h)?;
    let gram = ModPMatrix::from_rational(&h.gram_in(&scn.gamma), ell)?;
    let Some(zbar) = gram.kernel().into_iter().next() else {
        return Ok(None);
    };
    let coords: Vec<Rat> = zbar
        .iter()
        .map(|&c| Rat::from_integer(BigInt::from(c)))
        .collect();
    let z = scn.gamma.basis().mul_vec(&coords);

    let back = scn
        .gamma
        .coordinates(&ExactMatrix::from_columns(std::slice::from_ref(&z))?)?;
    let z_mod_ell: Vec<u64> = back
        .entries()
        .iter()
        .map(|x| residue(x, ell))
        .collect::<Result<_>>()?;
    if z_mod_ell.iter().all(|&x| x == 0) {
        return Err(Error::Violation("witness lies in l*Gamma".into()));
    }
    let min_val = |vals: Vec<Rat>| -> i64 {
        vals.iter()
            .filter(|x| !x.is_zero())
            .map(|x| valuation_ell(x, ell).expect("nonzero"))
            .min()
            .unwrap_or(i64::MAX)
    };
    let min_valuation_h = min_val(
        scn.gamma
            .basis_vectors()
            .iter()
            .map(|g| h.pair(&z, g))
            .collect(),
    );

    let s = scn.s_lattice();
    let (f, _) = normalize(&s, &scn.f)?;
    let (t, e) = build_tensor(&s, &scn.gamma, &f, &h)?;
    let x = s.basis().col(0);
    let xz: Vec<Rat> = x
        .iter()
        .flat_map(|a| z.iter().map(move |b| a * b))
        .collect();
    let min_valuation_e = min_val(
        t.basis_vectors()
            .iter()
            .map(|tau| e.pair(&xz, tau))
            .collect(),
    );
    if min_valuation_h < 1 || min_valuation_e < 1 {
        return Err(Error::Violation(format!(
            "witness check failed: valuations {min_valuation_h} and {min_valuation_e}"
        )));
    }
    Ok(Some(Witness {
        z: z.iter().map(ToString::to_string).collect(),
        z_mod_ell,
        min_valuation_h,
        min_valuation_e,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeVerdict {
    pub m: usize,
    pub n: usize,
    pub ell: u64,
    pub stand_in_well_rounded: bool,
    pub weight_lattice_well_rounded: bool,
    pub product_well_rounded: bool,
    pub verdict: TensorVerdict,
    /// Order is a power of `ℓ^{2(m-1)}`, the rank of `S`.
    pub power_of_ell_2d: bool,
    /// Order is a power of `ℓ^{2(m-1)(n-1)}`, the full tensor rank.
    pub power_of_full_rank: bool,
}

pub const MAX_COMPOSITE_DIM: usize = 24;

pub fn composite_demo(m: usize, n: usize, ell: u64) -> Result<CompositeVerdict> {
    check_prime(ell)?;
    if m < 2 || m.is_multiple_of(ell as usize) {
        return Err(Error::InvalidArgument(format!(
            "need m >= 2 with {ell} not dividing m, got m={m}"
        )));
    }
    if n <= 2 || nu(n, ell) != 1 {
        return Err(Error::InvalidArgument(format!(
            "need n > 2 with {ell} exactly dividing n, got n={n}"
        )));
    }
    let total = 2 * (m - 1) * (n - 1);
    if total > MAX_COMPOSITE_DIM {
        return Err(Error::InvalidArgument(format!(
            "tensor dimension {total} exceeds {MAX_COMPOSITE_DIM}"
        )));
    }
    let scn = TensorScenario::composite(m, n, ell)?;
    let cm = build_context(m, ell)?;
    let stand_in_well_rounded = is_well_rounded(&stand_in_action().reduce_mod(ell)?)?.well_rounded;
    let weight_lattice_well_rounded =
        is_well_rounded(&cm.reflections.in_basis(&cm.p)?.reduce_mod(ell)?)?.well_rounded;
    let product_well_rounded = is_well_rounded(&scn.s_bar()?)?.well_rounded;
    let (t, e) = scn.tensor()?;
    let verdict = verify_theorem(&scn, &t, &e)?;
    let v = verdict.order_valuation as usize;
    let two_d = 2 * (m - 1);
    Ok(CompositeVerdict {
        m,
        n,
        ell,
        stand_in_well_rounded,
        weight_lattice_well_rounded,
        product_well_rounded,
        power_of_ell_2d: v.is_multiple_of(two_d),
        power_of_full_rank: v.is_multiple_of(total),
        verdict,
    })
}

/// Reads a scenario with sections `[s_action]`, `[f]`, `[d_action]`,
/// `[window]` and optional `[gamma]`, `[h]`.
pub fn parse_scenario(text: &str) -> Result<TensorScenario> {
    let mut sections: BTreeMap<String, Vec<(usize, &str)>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            if sections.insert(name.to_string(), Vec::new()).is_some() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("duplicate section [{name}]"),
                });
            }
            current = Some(name.to_string());
        } else if !body.is_empty() {
            let Some(name) = &current else {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "content before the first section".into(),
                });
            };
            sections
                .get_mut(name)
                .expect("inserted")
                .push((i + 1, line));
        }
    }
    for name in sections.keys() {
        if !["s_action", "f", "d_action", "window", "gamma", "h"].contains(&name.as_str()) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("unknown section [{name}]"),
            });
        }
    }
    let mut take = |name: &str| -> Option<Tokens> { sections.remove(name).map(Tokens::from_lines) };
    let need = |t: Option<Tokens>, name: &str| {
        t.ok_or(Error::Parse {
            line: 0,
            msg: format!("missing section [{name}]"),
        })
    };

    let mut st = need(take("s_action"), "s_action")?;
    let (s_action, ell) = read_action(&mut st)?;
    let mut dt = need(take("d_action"), "d_action")?;
    let (d_action, ell_d) = read_action(&mut dt)?;
    let f = read_form(&mut need(take("f"), "f")?)?;
    for other in [ell_d, f.ell()] {
        if other != ell {
            return Err(Error::PrimeMismatch(ell, other));
        }
    }
    let window = match take("window") {
        Some(mut w) => read_window(&mut w)?,
        None => Window::default(),
    };
    let gamma = match take("gamma") {
        Some(mut g) => read_lattice(&mut g)?,
        None => Lattice::standard(d_action.dim(), ell)?,
    };
    let h = match take("h") {
        Some(mut h) => read_form(&mut h)?,
        None => {
            let forms = invariant_forms(&d_action, FormFilter::Symmetric);
            if forms.len() != 1 {
                return Err(Error::InvalidForm(format!(
                    "no [h] section and the invariant symmetric forms span dimension {}",
                    forms.len()
                )));
            }
            BilinearForm::new(forms[0].clone(), FormKind::Symmetric, ell)?
        }
    };
    if gamma.ell() != ell || h.ell() != ell {
        return Err(Error::PrimeMismatch(
            ell,
            if gamma.ell() != ell {
                gamma.ell()
            } else {
                h.ell()
            },
        ));
    }
    Ok(TensorScenario {
        label: "file".into(),
        ell,
        s_action,
        f,
        d_action,
        gamma,
        h,
        window,
    })
}

fn read_window(t: &mut Tokens) -> Result<Window> {
    let mut w = Window::default();
    while !t.is_empty() {
        let (line, tok) = t.next_token()?;
        let bad = || Error::Parse {
            line,
            msg: format!("expected below=<k> or above=<k>, got `{tok}`"),
        };
        let (k, v) = tok.split_once('=').ok_or_else(bad)?;
        let v: u32 = v.parse().map_err(|_| bad())?;
        match k {
            "below" => w.below = v,
            "above" => w.above = v,
            _ => return Err(bad()),
        }
    }
    Ok(w)
}

pub fn format_scenario(scn: &TensorScenario) -> String {
    let mut s = String::new();
    s.push_str("[s_action]\n");
    s.push_str(&crate::modrep::format_action(&scn.s_action, scn.ell));
    s.push_str("[f]\n");
    s.push_str(&crate::lattice::format_form(&scn.f));
    s.push_str("[d_action]\n");
    s.push_str(&crate::modrep::format_action(&scn.d_action, scn.ell));
    s.push_str(&format!(
        "[window]\nbelow={} above={}\n",
        scn.window.below, scn.window.above
    ));
    s.push_str("[gamma]\n");
    s.push_str(&crate::lattice::format_lattice(&scn.gamma));
    s.push_str("[h]\n");
    s.push_str(&crate::lattice::format_form(&scn.h));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::exact_from_rows;

    fn trivial_control(ell: u64) -> TensorScenario {
        TensorScenario {
            label: "control".into(),
            ell,
            s_action: stand_in_action(),
            f: symplectic_form(ell).unwrap(),
            d_action: GroupAction::trivial(1),
            gamma: Lattice::standard(1, ell).unwrap(),
            h: BilinearForm::new(exact_from_rows(&[&[1]]), FormKind::Symmetric, ell).unwrap(),
            window: Window::default(),
        }
    }

    #[test]
    fn tensor_shapes_and_kinds() {
        let scn = TensorScenario::symmetric_group(3, 3).unwrap();
        let (t, e) = scn.tensor().unwrap();
        assert_eq!(t.dim(), 4);
        assert_eq!(e.kind(), FormKind::Alternating);
        assert_eq!(*e.gram(), scn.f.gram().kron(scn.h.gram()));
        let err = build_tensor(&scn.s_lattice(), &scn.gamma, &scn.h.clone(), &scn.h).unwrap_err();
        assert!(matches!(err, Error::InvalidForm(_)));
    }

    #[test]
    fn perfect_times_perfect_is_perfect() {
        let scn = trivial_control(5);
        let (t, e) = scn.tensor().unwrap();
        assert!(is_perfect(&t, &e).unwrap());
    }

    #[test]
    fn s6_at_3_gives_two_copies_of_z3() {
        let scn = TensorScenario::symmetric_group(6, 3).unwrap();
        let (t, e) = scn.tensor().unwrap();
        assert_eq!(discriminant_group(&t, &e).unwrap().valuations, vec![1, 1]);
        let v = verify_theorem(&scn, &t, &e).unwrap();
        assert!(v.hypotheses_met, "{:?}", v.hypotheses);
        assert_eq!(v.t_exponent, Some(1));
        assert_eq!(v.jh_factor_count, 1);
        assert!(!v.e_perfect && v.factorization_ok && v.violations.is_empty());
    }

    #[test]
    fn s9_at_3_has_t_two() {
        let scn = TensorScenario::symmetric_group(9, 3).unwrap();
        let (t, e) = scn.tensor().unwrap();
        let v = verify_theorem(&scn, &t, &e).unwrap();
        assert_eq!(v.order_valuation, 4);
        assert_eq!(v.t_exponent, Some(2));
        assert_eq!(v.jh_factor_count, 2);
    }

    #[test]
    fn trivial_d_control_reports_unmet_hypotheses() {
        let scn = trivial_control(3);
        let (t, e) = scn.tensor().unwrap();
        let v = verify_theorem(&scn, &t, &e).unwrap();
        assert!(!v.hypotheses_met && v.hypotheses.d_perfect_lattice_in_window);
        assert!(v.e_perfect);
        assert_eq!(v.jh_factor_count, 0);
        assert!(v.violations.is_empty());
    }

    #[test]
    fn instability_is_an_error() {
        let scn = TensorScenario::symmetric_group(3, 3).unwrap();
        let (_, e) = scn.tensor().unwrap();
        let skew =
            Lattice::new(ExactMatrix::diagonal(&[rat(3), rat(1), rat(1), rat(1)]), 3).unwrap();
        assert!(matches!(
            verify_theorem(&scn, &skew, &e),
            Err(Error::NotStable { .. })
        ));
        let (t, _) = scn.tensor().unwrap();
        let bad = BilinearForm::new(
            symplectic_form(3)
                .unwrap()
                .gram()
                .kron(&ExactMatrix::identity(2)),
            FormKind::Alternating,
            3,
        )
        .unwrap();
        assert!(matches!(
            verify_theorem(&scn, &t, &bad),
            Err(Error::NotInvariant { .. })
        ));
    }

    fn rat(x: i64) -> Rat {
        crate::linalg::arith::rat(x)
    }

    #[test]
    fn classification_s3_matches_q_and_p() {
        let scn = TensorScenario::symmetric_group(3, 3).unwrap();
        let c = classify_product_stable_lattices(&scn).unwrap();
        assert_eq!(c.strategy, "condensed");
        assert!(c.factorization_ok && c.matches_d_window);
        assert_eq!(c.lattices.len(), c.d_lattices_in_window);
        assert_eq!(c.gamma_classes, 2);
    }

    #[test]
    fn classification_trivial_d_gives_scalings_of_s() {
        let scn = trivial_control(3);
        let c = classify_product_stable_lattices(&scn).unwrap();
        assert_eq!(c.lattices.len(), 3);
        assert!(c.factorization_ok);
        assert_eq!(c.gamma_classes, 1);
    }

    #[test]
    fn classification_control_without_well_rounded_s() {
        let mut scn = TensorScenario::symmetric_group(3, 3).unwrap();
        scn.s_action =
            GroupAction::new(2, vec![exact_from_rows(&[&[1, 0], &[0, -1]])], "diag").unwrap();
        scn.f = BilinearForm::new(
            exact_from_rows(&[&[0, 1], &[-1, 0]]),
            FormKind::Alternating,
            3,
        )
        .unwrap();
        let c = classify_product_stable_lattices(&scn).unwrap();
        assert_eq!(c.strategy, "full");
        assert!(!c.factorization_ok);
    }

    #[test]
    fn pairing_space_examples() {
        let scn = TensorScenario::symmetric_group(4, 2).unwrap();
        let ps = invariant_pairing_space(&scn).unwrap();
        assert_eq!(ps.dimension, 1);
        assert_eq!(ps.recovers_h_up_to_unit, Some(true));
        let mut scn = trivial_control(3);
        scn.d_action = GroupAction::trivial(2);
        scn.gamma = Lattice::standard(2, 3).unwrap();
        let ps = invariant_pairing_space(&scn).unwrap();
        assert_eq!((ps.dimension, ps.d_form_dimension), (4, 4));
        assert!(ps.all_factor_through_f);
    }

    #[test]
    fn pairing_space_is_basis_independent() {
        let scn = TensorScenario::symmetric_group(3, 2).unwrap();
        let c = exact_from_rows(&[&[2, 1], &[1, 1]]);
        let mut moved = scn.clone();
        moved.d_action = scn.d_action.conjugate(&c).unwrap();
        moved.h = BilinearForm::new(
            &(&c.transpose() * scn.h.gram()) * &c,
            FormKind::Symmetric,
            2,
        )
        .unwrap();
        assert_eq!(
            invariant_pairing_space(&scn).unwrap().dimension,
            invariant_pairing_space(&moved).unwrap().dimension
        );
    }

    #[test]
    fn jh_perfect_control_is_zero() {
        let scn = trivial_control(5);
        let (t, e) = scn.tensor().unwrap();
        let d = dual_lattice(&t, &e).unwrap();
        assert_eq!(
            jh_factors(&t, &d, &scn.s_bar().unwrap(), &scn.n_on_tensor()).unwrap(),
            0
        );
    }

    #[test]
    fn witness_for_s6() {
        let scn = TensorScenario::symmetric_group(6, 3).unwrap();
        let w = extract_witness(&scn).unwrap().unwrap();
        assert!(w.min_valuation_h >= 1 && w.min_valuation_e >= 1);
        assert!(extract_witness(&trivial_control(3)).unwrap().is_none());
    }

    #[test]
    fn composite_small() {
        let c = composite_demo(2, 3, 3).unwrap();
        assert!(c.product_well_rounded);
        assert!(c.verdict.t_exponent.unwrap() >= 1 && !c.verdict.e_perfect);
        assert!(
            c.verdict.violations.is_empty(),
            "{:?}",
            c.verdict.violations
        );
        assert!(matches!(
            composite_demo(2, 4, 2),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            composite_demo(3, 3, 3),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn scenario_file_round_trip() {
        let scn = TensorScenario::symmetric_group(3, 3).unwrap();
        let back = parse_scenario(&format_scenario(&scn)).unwrap();
        assert_eq!(back.s_action.generators(), scn.s_action.generators());
        assert_eq!(back.h, scn.h);
        assert_eq!(back.window, Window::default());
        let minimal = "[s_action]\naction dim=2 ngens=2 ell=3\n2 2\n1 1\n0 1\n2 2\n1 0\n1 1\n[f]\nform kind=alternating ell=3\n2 2\n0 1\n-1 0\n[d_action]\naction dim=1 ngens=0 ell=3\n[window]\nbelow=0 above=2\n";
        let s = parse_scenario(minimal).unwrap();
        assert_eq!(s.window, Window { below: 0, above: 2 });
        assert_eq!(s.h.gram().rows(), 1);
        assert!(matches!(parse_scenario("[f]\n"), Err(Error::Parse { .. })));
    }
}
