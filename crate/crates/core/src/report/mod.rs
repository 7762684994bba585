//! Verification runs and their JSON / markdown reports.

mod cases;
pub mod corpus;

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use cases::{
    default_suite, run_case, tensor_scenarios, Case, CaseKind, CaseResult, NamedMatrix, Status,
    COMPOSITE_ANCHOR, CRAIG_ANCHOR, THEOREM_ANCHOR, WELLROUNDED_ANCHOR, WINDOW_ANCHOR,
    WITNESS_ANCHOR,
};
use corpus::CorpusEntry;

use crate::error::{Error, Result};
use crate::linalg::arith::check_prime;
use crate::modrep::parse_action;
use crate::symn::build_context;
use crate::tensor::{parse_scenario, TensorScenario, Window};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyCraig,
    VerifyWellrounded,
    VerifyTensor,
    ClassifyLattices,
    CompositeDemo,
    Suite,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Markdown,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub n: Option<usize>,
    pub ell: Option<u64>,
    pub m: Option<usize>,
    pub action: Option<PathBuf>,
    pub scenario: Option<PathBuf>,
    pub window: Option<Window>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub jobs: usize,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            n: None,
            ell: None,
            m: None,
            action: None,
            scenario: None,
            window: None,
            out: None,
            format: Format::Json,
            jobs: 1,
        }
    }

    fn need_n_ell(&self) -> Result<(usize, u64)> {
        match (self.n, self.ell) {
            (Some(n), Some(ell)) => {
                check_prime(ell)?;
                Ok((n, ell))
            }
            _ => Err(Error::InvalidArgument("--n and --ell are required".into())),
        }
    }

    fn forbid(&self, present: &[(&str, bool)]) -> Result<()> {
        match present.iter().find(|(_, p)| *p) {
            Some((flag, _)) => Err(Error::InvalidArgument(format!(
                "{flag} is not accepted by this command"
            ))),
            None => Ok(()),
        }
    }

    /// Cases selected by the command, after validating its parameter set.
    pub fn cases(&self) -> Result<Vec<Case>> {
        if self.jobs == 0 {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
        }
        let with_window = |mut s: TensorScenario| {
            if let Some(w) = self.window {
                s.window = w;
            }
            s
        };
        let c = |id: String, anchor: &str, kind| vec![Case::new(id, anchor, kind)];
        match self.command {
            Command::VerifyCraig => {
                self.forbid(&[
                    ("--m", self.m.is_some()),
                    ("--scenario", self.scenario.is_some()),
                    ("--action", self.action.is_some()),
                ])?;
                let (n, ell) = self.need_n_ell()?;
                Ok(c(
                    format!("craig/n={n}/ell={ell}"),
                    CRAIG_ANCHOR,
                    CaseKind::Craig { n, ell },
                ))
            }
            Command::VerifyWellrounded => {
                self.forbid(&[
                    ("--m", self.m.is_some()),
                    ("--scenario", self.scenario.is_some()),
                ])?;
                let entry = match &self.action {
                    Some(path) => {
                        self.forbid(&[("--n", self.n.is_some())])?;
                        let (action, ell) = parse_action(&read_input(path)?)?;
                        if self.ell.is_some_and(|e| e != ell) {
                            return Err(Error::PrimeMismatch(ell, self.ell.unwrap_or(ell)));
                        }
                        CorpusEntry {
                            id: path.display().to_string(),
                            action,
                            ell,
                            expect_well_rounded: None,
                        }
                    }
                    None => {
                        let (n, ell) = self.need_n_ell()?;
                        let ctx = build_context(n, ell)?;
                        CorpusEntry {
                            id: format!("weight-lattice/n={n}/ell={ell}"),
                            action: ctx.reflections.in_basis(&ctx.p)?,
                            ell,
                            expect_well_rounded: Some(!(n as u64).is_multiple_of(ell)),
                        }
                    }
                };
                Ok(c(
                    format!("wellrounded/{}", entry.id),
                    WELLROUNDED_ANCHOR,
                    CaseKind::WellRounded(entry),
                ))
            }
            Command::VerifyTensor => {
                let scn = with_window(self.scenario_or_builtin()?);
                Ok(vec![
                    Case::new(
                        format!("theorem/{}", scn.label),
                        THEOREM_ANCHOR,
                        CaseKind::Theorem(scn.clone()),
                    ),
                    Case::new(
                        format!("witness/{}", scn.label),
                        WITNESS_ANCHOR,
                        CaseKind::Witness(scn),
                    ),
                ])
            }
            Command::ClassifyLattices => {
                let scn = with_window(self.scenario_or_builtin()?);
                Ok(c(
                    format!("window/{}", scn.label),
                    WINDOW_ANCHOR,
                    CaseKind::Window(scn),
                ))
            }
            Command::CompositeDemo => {
                self.forbid(&[
                    ("--scenario", self.scenario.is_some()),
                    ("--action", self.action.is_some()),
                ])?;
                let (n, ell) = self.need_n_ell()?;
                let m = self
                    .m
                    .ok_or_else(|| Error::InvalidArgument("--m is required".into()))?;
                Ok(c(
                    format!("composite/m={m}/n={n}/ell={ell}"),
                    COMPOSITE_ANCHOR,
                    CaseKind::Composite { m, n, ell },
                ))
            }
            Command::Suite => {
                self.forbid(&[
                    ("--n", self.n.is_some()),
                    ("--ell", self.ell.is_some()),
                    ("--m", self.m.is_some()),
                    ("--scenario", self.scenario.is_some()),
                    ("--action", self.action.is_some()),
                ])?;
                default_suite()
            }
        }
    }

    /// Scenario from `--scenario`, else the built-in one for `--n --ell`
    /// (composite when `--m` is given).
    fn scenario_or_builtin(&self) -> Result<TensorScenario> {
        self.forbid(&[("--action", self.action.is_some())])?;
        if let Some(path) = &self.scenario {
            self.forbid(&[("--n", self.n.is_some()), ("--m", self.m.is_some())])?;
            let mut scn = parse_scenario(&read_input(path)?)?;
            scn.label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            return Ok(scn);
        }
        let (n, ell) = self.need_n_ell()?;
        match self.m {
            Some(m) => TensorScenario::composite(m, n, ell),
            None => TensorScenario::symmetric_group(n, ell),
        }
    }
}

fn read_input(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Unreadable {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseTiming {
    pub id: String,
    pub millis: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub jobs: usize,
    pub total_millis: u128,
    pub cases: Vec<CaseTiming>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub tool_version: String,
    pub enumeration_bound: u64,
    pub summary: Summary,
    pub bounds_hit: Vec<String>,
    pub cases: Vec<CaseResult>,
    /// Wall-clock data, kept apart from the verdicts so that they compare
    /// byte for byte across runs.
    pub timing: Timing,
}

impl SuiteReport {
    pub fn exit_code(&self) -> i32 {
        if self.summary.errors > 0 {
            2
        } else if self.summary.failed > 0 {
            1
        } else {
            0
        }
    }

    /// The report without its timing section.
    pub fn verdict_body(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("serializable");
        v.as_object_mut().expect("object").remove("timing");
        v
    }
}

pub fn run_cases(cases: &[Case], jobs: usize) -> Result<SuiteReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let start = Instant::now();
    let mut results: Vec<(CaseResult, u128)> = pool.install(|| {
        cases
            .par_iter()
            .map(|c| {
                let t = Instant::now();
                let r = run_case(c);
                (r, t.elapsed().as_millis())
            })
            .collect()
    });
    results.sort_by(|a, b| a.0.id.cmp(&b.0.id));
    let count = |s: Status| results.iter().filter(|(r, _)| r.status == s).count();
    let summary = Summary {
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        errors: count(Status::Error),
    };
    let bounds_hit = results
        .iter()
        .filter_map(|(r, _)| r.bound_hit.as_ref().map(|b| format!("{}: {b}", r.id)))
        .collect();
    let timing = Timing {
        jobs,
        total_millis: start.elapsed().as_millis(),
        cases: results
            .iter()
            .map(|(r, ms)| CaseTiming {
                id: r.id.clone(),
                millis: *ms,
            })
            .collect(),
    };
    Ok(SuiteReport {
        schema: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        enumeration_bound: crate::enumeration_bound(),
        summary,
        bounds_hit,
        cases: results.into_iter().map(|(r, _)| r).collect(),
        timing,
    })
}

/// The full acceptance grid as one report.
pub fn suite(jobs: usize) -> Result<SuiteReport> {
    run_cases(&default_suite()?, jobs)
}

pub struct RunOutcome {
    pub exit_code: i32,
    pub report: SuiteReport,
    pub rendered: String,
}

/// Runs the configured cases and writes the rendered report to `--out`
/// when given. Input and configuration errors are returned as `Err`.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let cases = config.cases()?;
    let report = run_cases(&cases, config.jobs)?;
    let json = serde_json::to_value(&report)?;
    let rendered = match config.format {
        Format::Json => serde_json::to_string_pretty(&json)? + "\n",
        Format::Markdown => render_markdown(&json),
    };
    if let Some(path) = &config.out {
        std::fs::write(path, &rendered)?;
    }
    Ok(RunOutcome {
        exit_code: report.exit_code(),
        report,
        rendered,
    })
}

/// Markdown view of a serialized [`SuiteReport`].
pub fn render_markdown(report: &Value) -> String {
    let s = |v: &Value| match v {
        Value::String(x) => x.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    let mut out = String::new();
    out.push_str(&format!(
        "# latrep report\n\nschema {} · version {} · enumeration bound {}\n\n",
        s(&report["schema"]),
        s(&report["tool_version"]),
        s(&report["enumeration_bound"])
    ));
    let sm = &report["summary"];
    out.push_str(&format!(
        "**{} passed, {} failed, {} errors**\n\n",
        s(&sm["passed"]),
        s(&sm["failed"]),
        s(&sm["errors"])
    ));
    let empty = Vec::new();
    let cases = report["cases"].as_array().unwrap_or(&empty);
    if !cases.is_empty() {
        out.push_str("| case | anchor | status |\n|---|---|---|\n");
        for c in cases {
            out.push_str(&format!(
                "| `{}` | {} | {} |\n",
                s(&c["id"]),
                s(&c["anchor"]),
                s(&c["status"])
            ));
        }
    }
    for c in cases {
        out.push_str(&format!(
            "\n## {}\n\nstatus: **{}**\n",
            s(&c["id"]),
            s(&c["status"])
        ));
        if let Some(e) = c.get("error") {
            out.push_str(&format!("\nerror: {}\n", s(e)));
        }
        for v in c["violations"].as_array().unwrap_or(&empty) {
            out.push_str(&format!("\n- violation: {}\n", s(v)));
        }
        for m in c["counterexample"].as_array().unwrap_or(&empty) {
            out.push_str(&format!(
                "\n`{}`\n```\n{}```\n",
                s(&m["name"]),
                s(&m["matrix"])
            ));
        }
        if !c["verdict"].is_null() {
            let body = serde_json::to_string_pretty(&c["verdict"]).unwrap_or_default();
            out.push_str(&format!("\n```json\n{body}\n```\n"));
        }
    }
    let bounds = report["bounds_hit"].as_array().unwrap_or(&empty);
    if !bounds.is_empty() {
        out.push_str("\n## Bounds hit\n\n");
        for b in bounds {
            out.push_str(&format!("- {}\n", s(b)));
        }
    }
    let t = &report["timing"];
    out.push_str(&format!(
        "\n## Timing\n\njobs {} · total {} ms\n\n",
        s(&t["jobs"]),
        s(&t["total_millis"])
    ));
    for c in t["cases"].as_array().unwrap_or(&empty) {
        out.push_str(&format!("- `{}`: {} ms\n", s(&c["id"]), s(&c["millis"])));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{BilinearForm, FormKind};
    use crate::linalg::arith::rat;

    #[test]
    fn empty_suite_is_clean() {
        let r = run_cases(&[], 2).unwrap();
        assert_eq!(r.exit_code(), 0);
        assert!(r.cases.is_empty());
        assert!(render_markdown(&serde_json::to_value(&r).unwrap()).contains("0 passed"));
    }

    #[test]
    fn corrupted_gram_fails_only_its_case() {
        let good = TensorScenario::symmetric_group(3, 3).unwrap();
        let mut bad = good.clone();
        let mut g = bad.h.gram().clone();
        g.set(0, 1, rat(0));
        g.set(1, 0, rat(0));
        bad.h = BilinearForm::new(g, FormKind::Symmetric, 3).unwrap();
        let cases = vec![
            Case::new("b-good", THEOREM_ANCHOR, CaseKind::Theorem(good)),
            Case::new("a-corrupted", THEOREM_ANCHOR, CaseKind::Theorem(bad)),
            Case::new("c-craig", CRAIG_ANCHOR, CaseKind::Craig { n: 4, ell: 2 }),
        ];
        let r = run_cases(&cases, 3).unwrap();
        let ids: Vec<_> = r.cases.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["a-corrupted", "b-good", "c-craig"]);
        assert_eq!(r.cases[0].status, Status::Fail);
        assert!(r.cases[0].counterexample.iter().any(|m| m.name == "h"));
        assert!(r.cases[1..]
            .iter()
            .all(|c| c.status == Status::Pass && c.counterexample.is_empty()));
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn verdicts_are_byte_stable() {
        let cases: Vec<Case> = [(3, 3), (4, 2), (5, 5)]
            .into_iter()
            .map(|(n, ell)| {
                Case::new(
                    format!("craig/{n}/{ell}"),
                    CRAIG_ANCHOR,
                    CaseKind::Craig { n, ell },
                )
            })
            .collect();
        let a = run_cases(&cases, 1).unwrap().verdict_body();
        let b = run_cases(&cases, 3).unwrap().verdict_body();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a["schema"], 1);
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::new(Command::VerifyCraig);
        assert!(matches!(c.cases(), Err(Error::InvalidArgument(_))));
        c.n = Some(4);
        c.ell = Some(4);
        assert!(matches!(c.cases(), Err(Error::NotPrime(4))));
        c.ell = Some(2);
        c.m = Some(3);
        assert!(matches!(c.cases(), Err(Error::InvalidArgument(_))));
        let mut s = RunConfig::new(Command::Suite);
        s.n = Some(3);
        assert!(s.cases().is_err());
    }
}
