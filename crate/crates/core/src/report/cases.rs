use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::corpus::{wellrounded_corpus, CorpusEntry};
use crate::error::{Error, Result};
use crate::lattice::{discriminant_group, is_perfect, normalize, BilinearForm, FormKind, Lattice};
use crate::linalg::text::format_matrix;
use crate::modrep::{
    invariant_forms, is_well_rounded, lifted_algebra_is_full, FormFilter, GroupAction,
};
use crate::symn::{build_context, verify_craig};
use crate::tensor::{
    classify_product_stable_lattices, composite_demo, extract_witness, invariant_pairing_space,
    verify_theorem, TensorScenario,
};
use crate::ExactMatrix;

#[derive(Clone, Debug)]
pub enum CaseKind {
    Craig { n: usize, ell: u64 },
    WellRounded(CorpusEntry),
    Theorem(TensorScenario),
    Window(TensorScenario),
    Witness(TensorScenario),
    Composite { m: usize, n: usize, ell: u64 },
}

#[derive(Clone, Debug)]
pub struct Case {
    pub id: String,
    pub anchor: String,
    pub kind: CaseKind,
}

impl Case {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, kind: CaseKind) -> Self {
        Case {
            id: id.into(),
            anchor: anchor.into(),
            kind,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub verdict: Value,
    pub violations: Vec<String>,
    /// Matrices reproducing a failure standalone; empty on success.
    pub counterexample: Vec<NamedMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_hit: Option<String>,
}

pub const CRAIG_ANCHOR: &str = "craig-lemma (ii)-(vi)";
pub const WELLROUNDED_ANCHOR: &str = "full-lattice-lemma (i)<=>(ii)<=>(iii), (c)";
pub const THEOREM_ANCHOR: &str = "tensor-discriminant-theorem";
pub const WINDOW_ANCHOR: &str = "stable-lattice-factorization-lemma";
pub const WITNESS_ANCHOR: &str = "tensor-discriminant-theorem witness z";
pub const COMPOSITE_ANCHOR: &str = "composite-construction (product well-rounded)";

/// The acceptance grid: Craig lemma on `3 ≤ n ≤ 8`, the perfect-form scans,
/// the well-roundedness corpus, and the tensor and composite scenarios.
pub fn default_suite() -> Result<Vec<Case>> {
    let mut cases = Vec::new();
    for n in 3..=8 {
        for ell in [2, 3, 5, 7] {
            cases.push(Case::new(
                format!("craig/n={n}/ell={ell}"),
                CRAIG_ANCHOR,
                CaseKind::Craig { n, ell },
            ));
        }
    }
    for (n, ell) in [(10, 5), (10, 2)] {
        cases.push(Case::new(
            format!("craig/n={n}/ell={ell}"),
            CRAIG_ANCHOR,
            CaseKind::Craig { n, ell },
        ));
    }
    for entry in wellrounded_corpus()? {
        cases.push(Case::new(
            format!("wellrounded/{}", entry.id),
            WELLROUNDED_ANCHOR,
            CaseKind::WellRounded(entry),
        ));
    }
    for (name, scn) in tensor_scenarios()? {
        cases.push(Case::new(
            format!("theorem/{name}"),
            THEOREM_ANCHOR,
            CaseKind::Theorem(scn.clone()),
        ));
        cases.push(Case::new(
            format!("window/{name}"),
            WINDOW_ANCHOR,
            CaseKind::Window(scn.clone()),
        ));
        cases.push(Case::new(
            format!("witness/{name}"),
            WITNESS_ANCHOR,
            CaseKind::Witness(scn),
        ));
    }
    for (m, n, ell) in [(2, 3, 3), (4, 3, 3)] {
        cases.push(Case::new(
            format!("composite/m={m}/n={n}/ell={ell}"),
            COMPOSITE_ANCHOR,
            CaseKind::Composite { m, n, ell },
        ));
    }
    Ok(cases)
}

/// Rank-2 scenarios for `S_n` at ℓ, plus the rank-4 composite.
pub fn tensor_scenarios() -> Result<Vec<(String, TensorScenario)>> {
    let mut out = Vec::new();
    for (n, ell) in [(3, 3), (6, 3), (9, 3), (6, 2)] {
        out.push((
            format!("2d=2/n={n}/ell={ell}"),
            TensorScenario::symmetric_group(n, ell)?,
        ));
    }
    out.push((
        "2d=4/m=3/n=5/ell=5".into(),
        TensorScenario::composite(3, 5, 5)?,
    ));
    Ok(out)
}

pub fn run_case(case: &Case) -> CaseResult {
    let mut result = CaseResult {
        id: case.id.clone(),
        anchor: case.anchor.clone(),
        status: Status::Pass,
        verdict: Value::Null,
        violations: Vec::new(),
        counterexample: Vec::new(),
        error: None,
        bound_hit: None,
    };
    match evaluate(&case.kind) {
        Ok((verdict, violations)) => {
            result.verdict = verdict;
            if !violations.is_empty() {
                result.status = Status::Fail;
                result.violations = violations;
                result.counterexample = reproduction(&case.kind);
            }
        }
        Err(e @ (Error::NotStable { .. } | Error::NotInvariant { .. })) => {
            result.status = Status::Fail;
            result.violations = vec![e.to_string()];
            result.counterexample = reproduction(&case.kind);
        }
        Err(e) => {
            result.status = Status::Error;
            if let Error::TooLarge { .. } = e {
                result.bound_hit = Some(e.to_string());
            }
            result.error = Some(e.to_string());
        }
    }
    result
}

fn evaluate(kind: &CaseKind) -> Result<(Value, Vec<String>)> {
    match kind {
        CaseKind::Craig { n, ell } => {
            let r = verify_craig(*n, *ell)?;
            let v = r.check();
            Ok((serde_json::to_value(&r)?, v))
        }
        CaseKind::WellRounded(entry) => wellrounded(entry),
        CaseKind::Theorem(scn) => theorem(scn),
        CaseKind::Window(scn) => window(scn),
        CaseKind::Witness(scn) => {
            let w = extract_witness(scn)?;
            let v = if w.is_none() {
                vec!["h is perfect on Gamma: no witness z".to_string()]
            } else {
                vec![]
            };
            Ok((serde_json::to_value(&w)?, v))
        }
        CaseKind::Composite { m, n, ell } => {
            let c = composite_demo(*m, *n, *ell)?;
            let mut v = c.verdict.violations.clone();
            if !c.product_well_rounded {
                v.push("S/lS is not well-rounded".into());
            }
            if !c.power_of_ell_2d || c.verdict.t_exponent.unwrap_or(0) < 1 {
                v.push(format!(
                    "order l^{} is not a positive power of l^{}",
                    c.verdict.order_valuation, c.verdict.two_d
                ));
            }
            if c.verdict.e_perfect {
                v.push("e is perfect".into());
            }
            Ok((serde_json::to_value(&c)?, v))
        }
    }
}

fn wellrounded(entry: &CorpusEntry) -> Result<(Value, Vec<String>)> {
    let mut v = Vec::new();
    let m = entry.action.reduce_mod(entry.ell)?;
    let ev = match is_well_rounded(&m) {
        Ok(ev) => ev,
        Err(Error::Inconsistent(msg)) => {
            return Ok((Value::Null, vec![format!("conditions disagree: {msg}")]))
        }
        Err(e) => return Err(e),
    };
    let dim = entry.action.dim();
    let cond_i = ev.span_dim == dim * dim;
    let cond_ii = ev.simple && ev.commutant_dim == 1;
    let cond_iii = lifted_algebra_is_full(&entry.action, entry.ell)?;
    if cond_i != cond_ii || cond_ii != cond_iii {
        v.push(format!(
            "conditions disagree: span {cond_i}, simple+commutant {cond_ii}, lifted {cond_iii}"
        ));
    }
    if let Some(expect) = entry.expect_well_rounded {
        if expect != ev.well_rounded {
            v.push(format!("expected well_rounded = {expect}"));
        }
    }
    let mut forms_checked = 0;
    if ev.well_rounded {
        let standard = Lattice::standard(dim, entry.ell)?;
        for b in invariant_forms(&entry.action, FormFilter::Any) {
            let kind = if b == b.transpose() {
                FormKind::Symmetric
            } else if b == b.transpose().scale(&crate::linalg::arith::rat(-1)) {
                FormKind::Alternating
            } else {
                v.push("invariant form neither symmetric nor alternating".into());
                continue;
            };
            let (f, _) = normalize(&standard, &BilinearForm::new(b, kind, entry.ell)?)?;
            forms_checked += 1;
            if !is_perfect(&standard, &f)? {
                v.push(format!(
                    "content-1 invariant form is not perfect:\n{}",
                    format_matrix(f.gram())
                ));
            }
        }
    }
    let verdict = json!({
        "evidence": ev,
        "condition_i_span": cond_i,
        "condition_ii_simple_commutant": cond_ii,
        "condition_iii_lifted": cond_iii,
        "invariant_forms_checked": forms_checked,
    });
    Ok((verdict, v))
}

fn theorem(scn: &TensorScenario) -> Result<(Value, Vec<String>)> {
    let (t, e) = scn.tensor()?;
    let verdict = verify_theorem(scn, &t, &e)?;
    let mut v = verdict.violations.clone();
    match verdict.t_exponent {
        Some(te) if te >= 1 => {
            if te as usize != verdict.jh_factor_count {
                v.push(format!(
                    "jh_factors = {}, t = {te}",
                    verdict.jh_factor_count
                ));
            }
        }
        _ => v.push(format!(
            "order l^{} is not l^(2dt) with t >= 1",
            verdict.order_valuation
        )),
    }
    if verdict.e_perfect {
        v.push("e is perfect".into());
    }
    let (fnorm, _) = normalize(&scn.s_lattice(), &scn.f)?;
    if is_perfect(&scn.s_lattice(), &fnorm)? {
        let (h, _) = normalize(&scn.gamma, &scn.h)?;
        let dh = discriminant_group(&scn.gamma, &h)?.order_valuation();
        if verdict.order_valuation != scn.two_d() as u64 * dh {
            v.push(format!(
                "order valuation {} != 2d * {dh}",
                verdict.order_valuation
            ));
        }
    }
    v.dedup();
    Ok((serde_json::to_value(&verdict)?, v))
}

fn window(scn: &TensorScenario) -> Result<(Value, Vec<String>)> {
    let c = classify_product_stable_lattices(scn)?;
    let p = invariant_pairing_space(scn)?;
    let mut v = Vec::new();
    if !c.factorization_ok {
        let k = c.lattices.iter().filter(|l| !l.factors).count();
        v.push(format!(
            "{k} stable lattices in the window do not factor as S (x) Gamma"
        ));
    }
    if !c.matches_d_window {
        v.push("recovered Gamma do not match the D-stable lattices of the window".into());
    }
    if p.dimension != 1 {
        v.push(format!(
            "invariant pairing space has dimension {}",
            p.dimension
        ));
    }
    if p.recovers_h_up_to_unit != Some(true) || !p.all_factor_through_f {
        v.push("invariant pairing is not f (x) h up to an l-unit".into());
    }
    Ok((json!({ "classification": c, "pairing_space": p }), v))
}

/// Matrices needed to rerun a failing case by hand.
fn reproduction(kind: &CaseKind) -> Vec<NamedMatrix> {
    let nm = |name: &str, m: &ExactMatrix| NamedMatrix {
        name: name.into(),
        matrix: format_matrix(m),
    };
    let gens = |prefix: &str, a: &GroupAction| -> Vec<NamedMatrix> {
        a.generators()
            .iter()
            .enumerate()
            .map(|(i, g)| nm(&format!("{prefix}[{i}]"), g))
            .collect()
    };
    match kind {
        CaseKind::Craig { n, ell } => match build_context(*n, *ell) {
            Ok(ctx) => {
                let mut out = vec![
                    nm("Q", ctx.q.basis()),
                    nm("P", ctx.p.basis()),
                    nm("h", ctx.h.gram()),
                ];
                out.extend(gens("t", &ctx.reflections));
                out
            }
            Err(_) => Vec::new(),
        },
        CaseKind::WellRounded(entry) => gens("g", &entry.action),
        CaseKind::Theorem(scn) | CaseKind::Window(scn) | CaseKind::Witness(scn) => {
            let mut out = gens("s_action", &scn.s_action);
            out.push(nm("f", scn.f.gram()));
            out.extend(gens("d_action", &scn.d_action));
            out.push(nm("gamma", scn.gamma.basis()));
            out.push(nm("h", scn.h.gram()));
            out
        }
        CaseKind::Composite { m, n, ell } => match TensorScenario::composite(*m, *n, *ell) {
            Ok(scn) => reproduction(&CaseKind::Theorem(scn)),
            Err(_) => Vec::new(),
        },
    }
}
