use latrep::lattice::{
    discriminant_group, dual_lattice, normalize, BilinearForm, FormKind, Lattice,
};
use latrep::linalg::arith::rat;
use latrep::modrep::GroupAction;
use latrep::tensor::{
    invariant_pairing_space, jh_factors, stand_in_action, symplectic_form, TensorScenario, Window,
};
use latrep::{ExactMatrix, Rat};
use proptest::prelude::*;

fn monomial(dim: usize, perm: &[usize], signs: &[bool]) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(dim, dim);
    for (j, &i) in perm.iter().enumerate() {
        m.set(i, j, rat(if signs[j] { -1 } else { 1 }));
    }
    m
}

fn arb_perm(dim: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..dim).collect::<Vec<_>>()).prop_shuffle()
}

/// Monomial `D` on `Z^dim` with its group-averaged form, scaled by
/// `k ℓ^(k-1)` so that content normalization is exercised.
fn arb_scenario() -> impl Strategy<Value = TensorScenario> {
    (2usize..=3, prop::sample::select(vec![3u64, 5]), 1i64..=3)
        .prop_flat_map(|(dim, ell, scale)| {
            (
                Just(dim),
                Just(ell),
                Just(scale),
                arb_perm(dim),
                prop::collection::vec(any::<bool>(), dim),
                prop::collection::vec(any::<bool>(), dim),
            )
        })
        .prop_map(|(dim, ell, scale, perm, s1, s2)| {
            let ident: Vec<usize> = (0..dim).collect();
            let gens = vec![monomial(dim, &perm, &s1), monomial(dim, &ident, &s2)];
            let d = GroupAction::new(dim, gens, "monomial").unwrap();
            let mut h = ExactMatrix::zeros(dim, dim);
            for g in d.enumerate_group(100).unwrap() {
                h = &h + &(&g.transpose() * &g);
            }
            let h = h.scale(&Rat::from_integer(
                (ell.pow(scale as u32 - 1) as i64 * scale).into(),
            ));
            TensorScenario {
                label: "random".into(),
                ell,
                s_action: stand_in_action(),
                f: symplectic_form(ell).unwrap(),
                d_action: d,
                gamma: Lattice::standard(dim, ell).unwrap(),
                h: BilinearForm::new(h, FormKind::Symmetric, ell).unwrap(),
                window: Window::default(),
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kronecker_determinant(scn in arb_scenario()) {
        let (_, e) = scn.tensor().unwrap();
        let expected = num_traits::pow::pow(scn.f.gram().det().unwrap(), scn.d_action.dim())
            * num_traits::pow::pow(scn.h.gram().det().unwrap(), scn.two_d());
        prop_assert_eq!(e.gram().det().unwrap(), expected);
    }

    #[test]
    fn discriminant_scales_by_rank_of_s(scn in arb_scenario()) {
        let (t, e) = scn.tensor().unwrap();
        let (e, _) = normalize(&t, &e).unwrap();
        let (h, _) = normalize(&scn.gamma, &scn.h).unwrap();
        let dh = discriminant_group(&scn.gamma, &h).unwrap();
        let de = discriminant_group(&t, &e).unwrap();
        prop_assert_eq!(de.order_valuation(), scn.two_d() as u64 * dh.order_valuation());
        let dual = dual_lattice(&t, &e).unwrap();
        let jh = jh_factors(&t, &dual, &scn.s_bar().unwrap(), &scn.n_on_tensor()).unwrap();
        prop_assert_eq!(jh as u64, dh.order_valuation());
    }

    #[test]
    fn pairing_space_dimension_is_basis_independent(scn in arb_scenario(), a in -2i64..=2) {
        let dim = scn.d_action.dim();
        let mut upper = ExactMatrix::identity(dim);
        upper.set(0, 1, rat(a));
        let mut lower = ExactMatrix::identity(dim);
        lower.set(dim - 1, 0, rat(1));
        let c = &upper * &lower;
        let mut moved = scn.clone();
        moved.d_action = scn.d_action.conjugate(&c).unwrap();
        moved.h = BilinearForm::new(&(&c.transpose() * scn.h.gram()) * &c, FormKind::Symmetric, scn.ell).unwrap();
        moved.gamma = Lattice::new(c.inverse().unwrap(), scn.ell).unwrap();
        prop_assert!(moved.d_action.preserves(&moved.gamma).unwrap());
        let before = invariant_pairing_space(&scn).unwrap();
        let after = invariant_pairing_space(&moved).unwrap();
        prop_assert_eq!(before.dimension, after.dimension);
        prop_assert_eq!(before.d_form_dimension, after.d_form_dimension);
        prop_assert!(before.all_factor_through_f && after.all_factor_through_f);
    }
}
