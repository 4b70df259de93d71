use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value as Json};

use super::{Caps, Exit, Outcome, SCHEMA};
use crate::analysis::{
    check_mct_window, cri_sweep, integration_modulus, mct_modulus, mu_from_mct, mu_search, NatFn, RealFunction,
    RealSequence, SearchOperator,
};
use crate::gh::{fan_suite, gh_suite, Functional, Library};
use crate::lang::{parse, parse_term, print};
use crate::model::{check_step, random_model, random_suite, sweep_models, ModelBounds, TwoLevelModel, Verdict};
use crate::rewrite::{normalize, MonotoneAnnotation, RewriteError, RewriteStep, RewriteTrace};
use crate::tstar::{apply, assemble_witness, eval_closed, obligations, TValue};

fn header(command: &str, caps: &Caps) -> serde_json::Map<String, Json> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m.insert("caps".into(), json!(caps));
    m
}

fn outcome(exit: Exit, mut head: serde_json::Map<String, Json>, body: Json, summary: String) -> Outcome {
    head.insert("status".into(), json!(status_name(exit)));
    if let Json::Object(extra) = body {
        head.extend(extra);
    }
    Outcome { exit, report: Json::Object(head), summary }
}

fn status_name(exit: Exit) -> &'static str {
    match exit {
        Exit::Ok => "ok",
        Exit::Input => "error",
        Exit::Stuck => "stuck",
        Exit::CapExceeded => "cap_exceeded",
        Exit::Counterexample => "counterexample",
    }
}

fn input_error(command: &str, caps: &Caps, message: impl fmt::Display) -> Outcome {
    let msg = message.to_string();
    outcome(Exit::Input, header(command, caps), json!({ "error": msg }), format!("error: {msg}"))
}

/// Normalizes the formula in `src`. `annotations` is a JSON list of
/// `{"var", "direction"}` objects.
pub fn cmd_normalize(src: &str, annotations: Option<&str>, caps: Caps) -> Outcome {
    let f = match parse(src) {
        Ok(f) => f,
        Err(e) => return input_error("normalize", &caps, e),
    };
    let anns: Vec<MonotoneAnnotation> = match annotations.map(serde_json::from_str).transpose() {
        Ok(a) => a.unwrap_or_default(),
        Err(e) => return input_error("normalize", &caps, format!("annotations: {e}")),
    };
    let mut head = header("normalize", &caps);
    head.insert("input".into(), json!(print(&f)));
    match normalize(&f, &anns) {
        Ok(out) => {
            let obs = obligations(&out.trace).unwrap_or_default();
            let rules: Vec<String> = out.trace.rules().iter().map(|r| r.to_string()).collect();
            let summary = format!("{}\n[{}] normal form", print(&out.formula), rules.join(", "));
            let body = json!({
                "normal_form": true,
                "final": print(&out.formula),
                "rules": rules,
                "obligations": obs,
                "trace": out.trace,
            });
            outcome(Exit::Ok, head, body, summary)
        }
        Err(RewriteError::Stuck { formula, path, trace }) => {
            let summary = format!("stuck at {path:?}: {}", print(&formula));
            let body = json!({ "normal_form": false, "final": print(&formula), "stuck_path": path, "trace": trace });
            outcome(Exit::Stuck, head, body, summary)
        }
        Err(e) => input_error("normalize", &caps, e),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseStudy {
    Cri,
    Mct,
    Gh,
    Fan,
}

impl FromStr for CaseStudy {
    type Err = String;

    fn from_str(s: &str) -> Result<CaseStudy, String> {
        match s {
            "cri" => Ok(CaseStudy::Cri),
            "mct" => Ok(CaseStudy::Mct),
            "gh" => Ok(CaseStudy::Gh),
            "fan" => Ok(CaseStudy::Fan),
            _ => Err(format!("unknown case study `{s}` (cri, mct, gh, fan)")),
        }
    }
}

impl fmt::Display for CaseStudy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseStudy::Cri => "cri",
            CaseStudy::Mct => "mct",
            CaseStudy::Gh => "gh",
            CaseStudy::Fan => "fan",
        })
    }
}

pub fn cmd_case_study(name: CaseStudy, seed: u64, caps: Caps) -> Outcome {
    let mut head = header("case-study", &caps);
    head.insert("case_study".into(), json!(name.to_string()));
    head.insert("seed".into(), json!(seed));
    match name {
        CaseStudy::Cri => cri(head, seed),
        CaseStudy::Mct => mct(head, seed, caps),
        CaseStudy::Gh => gh(head, caps),
        CaseStudy::Fan => fan(head, seed, caps),
    }
}

const CRI_BASE: &str = "\\g:1. \\c:0. <g (rec(0, \\i:0. \\a:0. succ(succ(a))) c)>";
const DOUBLE: &str = "\\k:0. rec(0, \\i:0. \\a:0. succ(succ(a))) k";

/// Witness for the CRI normal form applied to `g(k) = 2k`, for `n = 1..=10`,
/// against the numeric modulus.
fn cri_witness_cells() -> Result<Vec<Json>, String> {
    let f = parse(include_str!("../../corpus/cri.nsa")).map_err(|e| e.to_string())?;
    let anns: Vec<MonotoneAnnotation> =
        serde_json::from_str(include_str!("../../corpus/cri.ann.json")).map_err(|e| e.to_string())?;
    let trace = normalize(&f, &anns).map_err(|e| e.to_string())?.trace;
    let obs = obligations(&trace).map_err(|e| e.to_string())?;
    let base: BTreeMap<_, _> =
        obs.iter().map(|o| (o.name.clone(), parse_term(CRI_BASE).expect("base parses"))).collect();
    let ws = assemble_witness(&trace, &base).map_err(|e| e.to_string())?;
    let w = ws.first().ok_or("no witness")?;
    let t = eval_closed(&w.term).map_err(|e| e.to_string())?;
    let g = eval_closed(&parse_term(DOUBLE).expect("parses")).map_err(|e| e.to_string())?;
    (1..=10u64)
        .map(|n| {
            let got = apply(&t, [g.clone(), TValue::nat(n)]).map_err(|e| e.to_string())?;
            let want = integration_modulus(|k| 2 * k, n);
            Ok(json!({ "n": n, "witness": got.to_string(), "modulus": want, "pass": got == TValue::nat(want) }))
        })
        .collect()
}

fn cri(head: serde_json::Map<String, Json>, seed: u64) -> Outcome {
    let sweep = match cri_sweep(&RealFunction::library(), 10, 200, seed) {
        Ok(s) => s,
        Err(e) => return outcome(Exit::Input, head, json!({ "error": e.to_string() }), e.to_string()),
    };
    let witness = match cri_witness_cells() {
        Ok(w) => w,
        Err(e) => return outcome(Exit::Input, head, json!({ "error": e }), e),
    };
    let witness_ok = witness.iter().all(|c| c["pass"] == json!(true));
    let failing = sweep.cells.iter().filter(|c| c.failures > 0).count();
    let pass = sweep.passed && witness_ok;
    let summary = format!(
        "cri: {} cells, {failing} failing; witness t(g,n) = g(2n) {}",
        sweep.cells.len(),
        if witness_ok { "matches" } else { "MISMATCH" }
    );
    let body = json!({ "passed": pass, "sweep": sweep, "witness": witness });
    outcome(if pass { Exit::Ok } else { Exit::Counterexample }, head, body, summary)
}

fn mct(head: serde_json::Map<String, Json>, seed: u64, caps: Caps) -> Outcome {
    let op = SearchOperator { cap: caps.search_cap };
    let mut cap_hit = false;
    let mut moduli = Vec::new();
    for (name, c, k) in [("harmonic", RealSequence::harmonic(), 10), ("dyadic", RealSequence::dyadic(), 8)] {
        match mct_modulus(&c, op, k) {
            Ok(n) => {
                let trivial = n >= op.cap;
                cap_hit |= trivial;
                let w = check_mct_window(&c, n, k, op.cap, 1000, seed);
                moduli.push(json!({ "sequence": name, "k": k, "n": n, "window": w, "cap_hit": trivial }));
            }
            Err(e) => {
                cap_hit = true;
                moduli.push(json!({ "sequence": name, "k": k, "error": e.to_string() }));
            }
        }
    }
    let t = |c: &RealSequence, k| mct_modulus(c, op, k);
    let mut round_trip = Vec::new();
    for f in NatFn::corpus(seed, 50, op.cap) {
        let direct = mu_search(|n| f.eval(n), op);
        let via = mu_from_mct(t, f.as_rc(), op.cap);
        let agree = via.as_ref().ok() == Some(&direct);
        round_trip.push(json!({ "function": f, "mu": direct, "from_modulus": via.map_err(|e| e.to_string()), "agree": agree }));
    }
    let windows_ok = moduli.iter().all(|m| m["window"]["failures"] == json!(0));
    let trips_ok = round_trip.iter().all(|r| r["agree"] == json!(true));
    let pass = windows_ok && trips_ok && !cap_hit;
    let summary = format!(
        "mct: moduli {}; round trip {}/{} agree",
        moduli.iter().map(|m| format!("{}={}", m["sequence"].as_str().unwrap_or("?"), m["n"])).collect::<Vec<_>>().join(" "),
        round_trip.iter().filter(|r| r["agree"] == json!(true)).count(),
        round_trip.len()
    );
    let body = json!({ "passed": pass, "cap_hit": cap_hit, "moduli": moduli, "round_trip": round_trip });
    let exit = if cap_hit {
        Exit::CapExceeded
    } else if pass {
        Exit::Ok
    } else {
        Exit::Counterexample
    };
    outcome(exit, head, body, summary)
}

fn gh(head: serde_json::Map<String, Json>, caps: Caps) -> Outcome {
    let lib = Library::bundled();
    let report = gh_suite(&lib.gh, 3, 3, caps.max_depth, 8);
    let failing = report.cells.iter().filter(|c| !c.passed()).count();
    let summary = format!("gh: {} cells, {failing} failing", report.cells.len());
    let exit = suite_exit(report.cap_hit, report.passed);
    let functionals: BTreeMap<&str, String> = lib.gh.iter().map(|f| (f.name.as_str(), f.expr.to_string())).collect();
    outcome(exit, head, json!({ "passed": report.passed, "functionals": functionals, "report": report }), summary)
}

fn fan(head: serde_json::Map<String, Json>, seed: u64, caps: Caps) -> Outcome {
    let mut gs = Library::bundled().fan;
    gs.extend((0..=caps.depth_cap.min(12)).map(Functional::constant));
    let report = fan_suite(&gs, 100, 8, caps.depth_cap, seed);
    let failing = report.cells.iter().filter(|c| c.failures > 0 || c.error.is_some()).count();
    let summary = format!("fan: {} functionals, {failing} failing", report.cells.len());
    let exit = suite_exit(report.cap_hit, report.passed);
    outcome(exit, head, json!({ "passed": report.passed, "report": report }), summary)
}

fn suite_exit(cap_hit: bool, passed: bool) -> Exit {
    match (cap_hit, passed) {
        (true, _) => Exit::CapExceeded,
        (false, true) => Exit::Ok,
        (false, false) => Exit::Counterexample,
    }
}

/// Where the steps to check come from.
pub enum CheckInput<'a> {
    /// A trace as JSON.
    Trace(&'a str),
    /// `n` seeded random rule instances.
    Random(usize),
}

/// Checks every step against every model. Without explicit `models`, all
/// two-level models within the caps are used with default interpretations.
pub fn cmd_model_check(input: CheckInput<'_>, models: Option<Vec<(String, String)>>, seed: u64, caps: Caps) -> Outcome {
    let mut head = header("model-check", &caps);
    let explicit = match models.map(|ms| {
        ms.into_iter()
            .map(|(name, src)| TwoLevelModel::from_json(&src).map(|m| (name, m)).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()
    }) {
        Some(Err(e)) => return input_error("model-check", &caps, e),
        Some(Ok(ms)) => Some(ms),
        None => None,
    };
    // (step, models to check it in)
    let mut jobs: Vec<(RewriteStep, Vec<(String, TwoLevelModel)>)> = Vec::new();
    match input {
        CheckInput::Trace(src) => {
            let trace = match RewriteTrace::from_json(src) {
                Ok(t) => t,
                Err(e) => return input_error("model-check", &caps, format!("trace: {e}")),
            };
            head.insert("replay".into(), json!(trace.replay().map(|_| "ok".to_string()).unwrap_or_else(|e| e.to_string())));
            let models = explicit.unwrap_or_else(|| {
                let fs: Vec<_> = trace.steps.iter().flat_map(|s| [&s.before, &s.after]).collect();
                sweep_models(caps.max_u, caps.max_s, &[0, 1, 2], fs)
                    .into_iter()
                    .map(|m| (format!("U={} S={} salt={}", m.u, m.s, m.salt), m))
                    .collect()
            });
            jobs.extend(trace.steps.into_iter().map(|s| (s, models.clone())));
        }
        CheckInput::Random(n) => {
            head.insert("random_instances".into(), json!(n));
            head.insert("seed".into(), json!(seed));
            let bounds = ModelBounds { max_u: caps.max_u, max_s: caps.max_s };
            for (i, step) in random_suite(seed, n).into_iter().enumerate() {
                let models = explicit.clone().unwrap_or_else(|| {
                    (0..3u64)
                        .map(|k| {
                            let mut m = random_model(seed.wrapping_add(i as u64 * 3 + k), bounds);
                            m.interpret_defaults([&step.before, &step.after]);
                            (format!("random #{} (U={} S={})", i as u64 * 3 + k, m.u, m.s), m)
                        })
                        .collect()
                });
                jobs.push((step, models));
            }
        }
    }
    let (mut checks, mut holds, mut vacuous) = (0usize, 0usize, 0usize);
    let mut first: Option<Json> = None;
    let mut counterexamples = 0usize;
    for (i, (step, models)) in jobs.iter().enumerate() {
        for (name, m) in models {
            checks += 1;
            match check_step(m, step) {
                Err(e) => return input_error("model-check", &caps, format!("step {i} ({}) in {name}: {e}", step.rule)),
                Ok(Verdict::Holds) => holds += 1,
                Ok(Verdict::Vacuous { .. }) => vacuous += 1,
                Ok(Verdict::Counterexample(c)) => {
                    counterexamples += 1;
                    first.get_or_insert_with(|| {
                        json!({
                            "step": i,
                            "rule": step.rule,
                            "model": name,
                            "before": print(&step.before),
                            "after": print(&step.after),
                            "converse": c.converse,
                            "env": c.env,
                        })
                    });
                }
            }
        }
    }
    let summary = match &first {
        None => format!("{} steps, {checks} checks: {holds} hold, {vacuous} vacuous, no counterexample", jobs.len()),
        Some(c) => format!(
            "counterexample at step {} ({}) in {}: env {}",
            c["step"], c["rule"].as_str().unwrap_or("?"), c["model"].as_str().unwrap_or("?"), c["env"]
        ),
    };
    let body = json!({
        "steps": jobs.len(),
        "checks": checks,
        "holds": holds,
        "vacuous": vacuous,
        "counterexamples": counterexamples,
        "first_counterexample": first,
    });
    let exit = if counterexamples == 0 { Exit::Ok } else { Exit::Counterexample };
    outcome(exit, head, body, summary)
}
