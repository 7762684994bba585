//! One PASS/FAIL line per acceptance criterion. Every check is exact; the
//! time limits below are wall-clock bounds on each criterion as a whole.

use std::str::FromStr;
use std::time::{Duration, Instant};

use latrep::lattice::{discriminant_group, is_perfect, normalize, BilinearForm, FormKind, Lattice};
use latrep::linalg::{smith_normal_form, valuation_ell};
use latrep::modrep::{invariant_forms, is_well_rounded, lifted_algebra_is_full, FormFilter};
use latrep::report::corpus::wellrounded_corpus;
use latrep::report::tensor_scenarios;
use latrep::symn::{build_context, cartan_matrix, verify_craig};
use latrep::tensor::{
    classify_product_stable_lattices, composite_demo, extract_witness, invariant_pairing_space,
    verify_theorem,
};
use latrep::{Rat, Result};

const GRID_N: std::ops::RangeInclusive<usize> = 3..=8;
const GRID_ELL: [u64; 4] = [2, 3, 5, 7];

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, summary: String) -> Result<Outcome> {
    let ok = failures.is_empty();
    let detail = if ok {
        summary
    } else {
        format!("{summary}; failures: {}", failures.join("; "))
    };
    Ok(Outcome { ok, detail })
}

fn v_ell(mut n: u64, ell: u64) -> u64 {
    let mut v = 0;
    while n.is_multiple_of(ell) {
        n /= ell;
        v += 1;
    }
    v
}

fn criterion_1() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in GRID_N {
        let cartan: latrep::linalg::Matrix<i64> =
            cartan_matrix(n - 1).map(|x| i64::try_from(x.to_integer()).expect("small"));
        let diag = smith_normal_form(&cartan).diag;
        let snf_cyclic = diag[..diag.len() - 1].iter().all(|d| d.abs() == 1);
        for ell in GRID_ELL {
            let expected = v_ell(n as u64, ell);
            let r = verify_craig(n, ell)?;
            let ctx = build_context(n, ell)?;
            let disc = discriminant_group(&ctx.q, &ctx.h)?;
            let snf_val = v_ell(diag.last().unwrap().unsigned_abs(), ell);
            if r.pq_order_valuation as u64 != expected
                || disc.order_valuation() != expected
                || snf_val != expected
            {
                failures.push(format!(
                    "n={n} ell={ell}: {} / {} / {snf_val} vs {expected}",
                    r.pq_order_valuation,
                    disc.order_valuation()
                ));
            }
            if !r.pq_cyclic || !disc.is_cyclic() || !snf_cyclic {
                failures.push(format!("n={n} ell={ell}: P/Q not cyclic"));
            }
            checked += 1;
        }
    }
    outcome(
        failures,
        format!("{checked} (n, ell) pairs; order and cyclicity match v_ell(n)"),
    )
}

fn criterion_2() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut classes = Vec::new();
    for (n, ell) in [(3, 3), (6, 3), (6, 2), (10, 5), (10, 2)] {
        let r = verify_craig(n, ell)?;
        if r.perfect_symmetric_form_exists || r.stable_lattice_classes == 0 {
            failures.push(format!(
                "n={n} ell={ell}: perfect form found among {} classes",
                r.stable_lattice_classes
            ));
        }
        classes.push(format!("({n},{ell}):{}", r.stable_lattice_classes));
    }
    outcome(
        failures,
        format!("no perfect pairing; classes scanned {}", classes.join(" ")),
    )
}

fn criterion_3() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in GRID_N {
        for ell in GRID_ELL
            .into_iter()
            .filter(|&l| !(n as u64).is_multiple_of(l))
        {
            let ctx = build_context(n, ell)?;
            let ev = is_well_rounded(&ctx.reflections.in_basis(&ctx.p)?.reduce_mod(ell)?)?;
            let m = n - 1;
            if !ev.well_rounded || ev.span_dim != m * m || ev.commutant_dim != 1 || !ev.simple {
                failures.push(format!("n={n} ell={ell}: {ev:?}"));
            }
            checked += 1;
        }
    }
    outcome(
        failures,
        format!("{checked} coprime pairs well-rounded; span (n-1)^2, commutant 1"),
    )
}

fn criterion_4() -> Result<Outcome> {
    let corpus = wellrounded_corpus()?;
    let mut failures = Vec::new();
    let (mut wr, mut forms) = (0, 0);
    if corpus.len() < 30 {
        failures.push(format!("corpus has {} actions", corpus.len()));
    }
    for e in &corpus {
        let ev = is_well_rounded(&e.action.reduce_mod(e.ell)?)?;
        let dim = e.action.dim();
        let i = ev.span_dim == dim * dim;
        let ii = ev.simple && ev.commutant_dim == 1;
        let iii = lifted_algebra_is_full(&e.action, e.ell)?;
        if i != ii || ii != iii || ev.well_rounded != i {
            failures.push(format!("{}: ({i}, {ii}, {iii})", e.id));
        }
        if e.expect_well_rounded.is_some_and(|x| x != i) {
            failures.push(format!("{}: expected {:?}", e.id, e.expect_well_rounded));
        }
        if !i {
            continue;
        }
        wr += 1;
        let std = Lattice::standard(dim, e.ell)?;
        for b in invariant_forms(&e.action, FormFilter::Any) {
            let kind = if b == b.transpose() {
                FormKind::Symmetric
            } else {
                FormKind::Alternating
            };
            let (f, _) = normalize(&std, &BilinearForm::new(b, kind, e.ell)?)?;
            forms += 1;
            if !is_perfect(&std, &f)? {
                failures.push(format!("{}: content-1 form not perfect", e.id));
            }
        }
    }
    outcome(
        failures,
        format!(
            "{} actions, {wr} well-rounded, {forms} content-1 forms all perfect",
            corpus.len()
        ),
    )
}

fn criterion_5() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut seen = Vec::new();
    for (name, scn) in tensor_scenarios()? {
        let (t, e) = scn.tensor()?;
        let v = verify_theorem(&scn, &t, &e)?;
        let two_d = scn.two_d() as u64;
        let ok = v.t_exponent.is_some_and(|te| {
            te >= 1 && two_d * te == v.order_valuation && te as usize == v.jh_factor_count
        }) && !v.e_perfect;
        if !ok {
            failures.push(format!(
                "{name}: v={} t={:?} jh={} perfect={}",
                v.order_valuation, v.t_exponent, v.jh_factor_count, v.e_perfect
            ));
        }
        seen.push(format!("{name}:t={}", v.t_exponent.unwrap_or(0)));
    }
    outcome(
        failures,
        format!("order l^(2dt), e not perfect, jh = t [{}]", seen.join(" ")),
    )
}

fn criterion_6() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    for (name, scn) in tensor_scenarios()? {
        let c = classify_product_stable_lattices(&scn)?;
        let p = invariant_pairing_space(&scn)?;
        if !c.factorization_ok || !c.matches_d_window {
            failures.push(format!(
                "{name}: factorization {} / window match {}",
                c.factorization_ok, c.matches_d_window
            ));
        }
        if p.dimension != 1 || p.recovers_h_up_to_unit != Some(true) || !p.all_factor_through_f {
            failures.push(format!("{name}: pairing space {p:?}"));
        }
        counts.push(format!("{name}:{}", c.lattices.len()));
    }
    outcome(
        failures,
        format!(
            "all window lattices are S(x)Gamma, pairing space f(x)h [{}]",
            counts.join(" ")
        ),
    )
}

fn criterion_7() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut literal = Vec::new();
    for (m, n, ell) in [(2, 3, 3), (4, 3, 3)] {
        let c = composite_demo(m, n, ell)?;
        let v = &c.verdict;
        if !c.product_well_rounded
            || !c.power_of_ell_2d
            || v.t_exponent.unwrap_or(0) < 1
            || v.e_perfect
        {
            failures.push(format!("({m},{n},{ell}): {c:?}"));
        }
        literal.push(format!(
            "({m},{n},{ell}): order {ell}^{} power of {ell}^{}: {}, of {ell}^{}: {}",
            v.order_valuation,
            2 * (m - 1),
            c.power_of_ell_2d,
            2 * (m - 1) * (n - 1),
            c.power_of_full_rank
        ));
    }
    outcome(
        failures,
        format!(
            "S well-rounded, t >= 1 with 2d = 2(m-1) [{}]",
            literal.join("; ")
        ),
    )
}

fn criterion_8() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut n = 0;
    for (name, scn) in tensor_scenarios()? {
        let Some(w) = extract_witness(&scn)? else {
            failures.push(format!("{name}: no witness"));
            continue;
        };
        let z: Vec<Rat> =
            w.z.iter()
                .map(|s| Rat::from_str(s).expect("rational"))
                .collect();
        let ell = scn.ell;
        let (h, _) = normalize(&scn.gamma, &scn.h)?;
        let in_gamma = scn.gamma.contains_vector(&z)?;
        let outside = !scn.gamma.ell_multiple(1).contains_vector(&z)?;
        let small = scn
            .gamma
            .basis_vectors()
            .iter()
            .map(|g| h.pair(&z, g))
            .all(|x| {
                x == Rat::from_integer(0.into()) || valuation_ell(&x, ell).is_ok_and(|v| v >= 1)
            });
        if !(in_gamma && outside && small && w.min_valuation_e >= 1) {
            failures.push(format!(
                "{name}: in {in_gamma} outside {outside} h-small {small}"
            ));
        }
        n += 1;
    }
    outcome(
        failures,
        format!(
            "{n} witnesses z in Gamma - l Gamma with h(z, Gamma) in l Z_l, e(x(x)z, T) in l Z_l"
        ),
    )
}

fn main() {
    type Criterion = fn() -> Result<Outcome>;
    let criteria: [(&str, Criterion, u64); 8] = [
        (
            "1 craig grid: v_l(#P/Q) = v_l(n), P/Q cyclic",
            criterion_1,
            5,
        ),
        (
            "2 no perfect invariant pairing when l || n",
            criterion_2,
            30,
        ),
        (
            "3 weight lattice well-rounded when l does not divide n",
            criterion_3,
            10,
        ),
        (
            "4 well-roundedness conditions agree on corpus",
            criterion_4,
            60,
        ),
        (
            "5 tensor discriminant l^(2dt), t >= 1, jh = t",
            criterion_5,
            60,
        ),
        (
            "6 window lattices factor, pairing space = f (x) h",
            criterion_6,
            120,
        ),
        ("7 composite demo", criterion_7, 120),
        ("8 witness extraction", criterion_8, 10),
    ];
    let mut all = true;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let (ok, detail) = match result {
            Ok(o) => (o.ok && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= ok;
        println!(
            "{} criterion {name} | tolerance exact | {:.3}s (limit {limit}s) | {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if !all {
        std::process::exit(1);
    }
}
