//! Actions used to cross-validate the three well-roundedness conditions.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::exact_from_rows;
use crate::modrep::{product_action, GroupAction};
use crate::symn::build_context;
use crate::tensor::stand_in_action;
use crate::ExactMatrix;

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: String,
    pub action: GroupAction,
    pub ell: u64,
    /// Known answer, when there is one independent of the checks.
    pub expect_well_rounded: Option<bool>,
}

const CORPUS_SEED: u64 = 0x1a77_1ce5;

pub fn wellrounded_corpus() -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    let mut push = |id: String, action: GroupAction, ell: u64, expect: Option<bool>| {
        out.push(CorpusEntry {
            id,
            action,
            ell,
            expect_well_rounded: expect,
        });
    };

    for n in 3..=6usize {
        for ell in [2u64, 3, 5] {
            let ctx = build_context(n, ell)?;
            let coprime = !(n as u64).is_multiple_of(ell);
            push(
                format!("root-lattice/n={n}/ell={ell}"),
                ctx.reflections.clone(),
                ell,
                Some(coprime),
            );
            if ell != 5 {
                let on_p = ctx.reflections.in_basis(&ctx.p)?;
                push(
                    format!("weight-lattice/n={n}/ell={ell}"),
                    on_p,
                    ell,
                    Some(coprime),
                );
            }
        }
    }
    for ell in [2u64, 3, 5, 7, 11] {
        push(format!("sl2/ell={ell}"), stand_in_action(), ell, Some(true));
    }
    let p3 = build_context(3, 5)?;
    push(
        "sl2-x-weight3/ell=5".into(),
        product_action(&stand_in_action(), &p3.reflections.in_basis(&p3.p)?),
        5,
        Some(true),
    );
    push(
        "sl2-x-sl2/ell=3".into(),
        product_action(&stand_in_action(), &stand_in_action()),
        3,
        Some(true),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    for k in 0..8 {
        let dim = 2 + k % 4;
        let ell = [3u64, 5, 7][k % 3];
        let gens = (0..2).map(|_| random_monomial(&mut rng, dim)).collect();
        push(
            format!("monomial/{k}/dim={dim}/ell={ell}"),
            GroupAction::new(dim, gens, format!("monomial {k}"))?,
            ell,
            None,
        );
    }

    let unipotent = GroupAction::new(
        2,
        vec![exact_from_rows(&[&[1, 1], &[0, 1]])],
        "upper unipotent",
    )?;
    push(
        "control/upper-unipotent/ell=3".into(),
        unipotent,
        3,
        Some(false),
    );
    push(
        "control/trivial/ell=5".into(),
        GroupAction::trivial(2),
        5,
        Some(false),
    );
    let diag = GroupAction::new(2, vec![exact_from_rows(&[&[1, 0], &[0, -1]])], "diagonal")?;
    push("control/diagonal/ell=3".into(), diag, 3, Some(false));
    let sum = GroupAction::new(
        3,
        stand_in_action()
            .generators()
            .iter()
            .map(|g| block_sum(g, &exact_from_rows(&[&[1]])))
            .collect(),
        "sl2 + trivial",
    )?;
    push("control/sl2-plus-trivial/ell=7".into(), sum, 7, Some(false));
    Ok(out)
}

fn random_monomial(rng: &mut ChaCha8Rng, dim: usize) -> ExactMatrix {
    let mut perm: Vec<usize> = (0..dim).collect();
    perm.shuffle(rng);
    let mut m = ExactMatrix::zeros(dim, dim);
    for (j, &i) in perm.iter().enumerate() {
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        m.set(i, j, crate::linalg::arith::rat(sign));
    }
    m
}

fn block_sum(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    let (ra, rb) = (a.rows(), b.rows());
    ExactMatrix::from_fn(ra + rb, ra + rb, |i, j| match (i < ra, j < ra) {
        (true, true) => a.get(i, j).clone(),
        (false, false) => b.get(i - ra, j - ra).clone(),
        _ => crate::linalg::arith::rat(0),
    })
}
