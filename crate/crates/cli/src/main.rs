mod args;
mod output;

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

use qshare_core::allocate::{
    allocation_budget, bernoulli_deviation_check, edmonds_certificate, exhaustive_fair_allocation,
    matroid_intersection, matroid_mms, maximin_satisfaction_with_sizes, mms_quantile, mms_value, round_robin, FairSearch,
};
use qshare_core::bundle::{Allocation, Bundle};
use qshare_core::extremal::{
    binomial_qn, emc_bounds, emc_extremal_families, emc_falsify, kruskal_katona_check, lemma9_check, matching_number, poisson_below_mean, rainbow_matching, shadow,
    theorem_chain_check, SetFamily,
};
use qshare_core::instance::{parse_labels, MatroidDoc};
use qshare_core::lab::{
    budget, equal_size_gap_report, export_ip, expected_lp_counts, generate_named_instance, search_counterexample,
    NamedParams, SearchOutcome, SearchSpec,
};
use qshare_core::quantile::{
    allocation_report, exact_cap, exact_distribution, is_q_fair, quantile_share, sample_satisfaction, satisfaction,
    set_exact_cap,
};
use qshare_core::rational::{self, Q};
use qshare_core::repro::{run_target, TARGETS};
use qshare_core::veto::{equivalence_suite, find_unvetoed_allocation, veto_from_valuation, VetoListsDoc};
use qshare_core::{Instance, Rational, Valuation};

use args::{AllocateCmd, Cli, Command, ExtremalCmd, LabCmd, VetoCmd};

pub const EXACT_CAP_VAR: &str = "QFAIR_EXACT_CAP";

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] qshare_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_budget_refusal() => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// A result plus whether it is a semantic negative (exit 1).
struct Outcome {
    result: Value,
    negative: bool,
}

impl Outcome {
    fn ok(result: impl Serialize) -> CliResult<Self> {
        Ok(Outcome { result: to_value(result), negative: false })
    }

    fn negative_if(result: impl Serialize, negative: bool) -> CliResult<Self> {
        Ok(Outcome { result: to_value(result), negative })
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })
}

fn load_instance(path: &Path) -> CliResult<Instance> {
    Ok(Instance::from_json(&read(path)?)?)
}

fn parse_q(text: &str) -> CliResult<Rational> {
    rational::parse(text).map_err(|e| CliError::Usage(format!("bad rational `{text}`: {e}")))
}

fn agent_index(inst: &Instance, agent: usize) -> CliResult<usize> {
    if agent == 0 || agent > inst.agents() {
        return Err(CliError::Usage(format!("agent must lie in 1..={}, got {agent}", inst.agents())));
    }
    Ok(agent - 1)
}

fn parse_bundle(text: &str, m: usize) -> CliResult<Bundle> {
    Ok(Bundle::from_labels(&parse_labels(text)?, m)?)
}

fn parse_allocation(text: &str, m: usize) -> CliResult<Allocation> {
    let labels = text.split(';').map(|part| parse_labels(part.trim())).collect::<Result<Vec<_>, _>>()?;
    Ok(Allocation::from_labels(&labels, m)?)
}

fn parse_budget(text: Option<&str>, n: usize, m: usize) -> CliResult<qshare_core::lab::SearchSpec> {
    let mut spec = SearchSpec { n, m, budget: Default::default(), symmetry: true, time_limit: None };
    spec.budget = match text {
        Some(t) => t.parse().map_err(|_| CliError::Usage(format!("bad budget `{t}`")))?,
        None => budget(n, m)?,
    };
    Ok(spec)
}

fn run_quantile(a: &args::QuantileArgs, seed: u64) -> CliResult<Outcome> {
    let inst = load_instance(&a.instance.instance)?;
    let i = agent_index(&inst, a.agent)?;
    let (n, m) = (inst.agents(), inst.goods());
    let v = inst.valuation(i);
    let bundle = a.bundle.as_deref().map(|b| parse_bundle(b, m)).transpose()?;
    if let Some(samples) = a.samples {
        let b = bundle.ok_or_else(|| CliError::Usage("--samples needs --bundle".into()))?;
        let e = sample_satisfaction(v, n, b, samples, a.delta, seed)?;
        return Outcome::ok(json!({
            "agent": a.agent,
            "bundle": b.labels(),
            "value": Q(v.evaluate(b)?),
            "estimate": e.estimate,
            "half_width": e.half_width,
            "samples": e.samples,
            "delta": a.delta,
        }));
    }
    let Some(q) = a.q.as_deref() else {
        let d = exact_distribution(v, n)?;
        let atoms: Vec<Value> = d
            .atoms
            .iter()
            .enumerate()
            .map(|(k, (value, weight))| {
                json!({
                    "value": Q(value.clone()),
                    "weight": weight.to_string(),
                    "cdf": Q(Rational::new(d.cumulative(k).clone().into(), d.denominator().into())),
                })
            })
            .collect();
        return Outcome::ok(json!({
            "agent": a.agent,
            "n": n,
            "m": m,
            "denominator": d.denominator().to_string(),
            "atoms": atoms,
        }));
    };
    let q = parse_q(q)?;
    let share = quantile_share(v, n, &q)?;
    let mut out = json!({ "agent": a.agent, "q": Q(q.clone()), "quantile_share": Q(share) });
    if let Some(b) = bundle {
        out["bundle"] = json!(b.labels());
        out["value"] = to_value(Q(v.evaluate(b)?));
        out["satisfaction"] = to_value(Q(satisfaction(v, n, b)?));
        out["fair"] = json!(is_q_fair(v, n, &q, b)?);
    }
    Outcome::ok(out)
}

fn run_allocate(cmd: &AllocateCmd) -> CliResult<Outcome> {
    match cmd {
        AllocateCmd::Fair { instance, q } => {
            let inst = load_instance(&instance.instance)?;
            let q = parse_q(q)?;
            match exhaustive_fair_allocation(&inst, &q)? {
                FairSearch::Fair(alloc) => Outcome::ok(json!({
                    "feasible": true,
                    "allocation": alloc.labels(),
                    "report": allocation_report(&inst, &alloc, &q)?,
                })),
                FairSearch::Infeasible(cert) => {
                    Outcome::negative_if(json!({ "feasible": false, "certificate": cert }), true)
                }
            }
        }
        AllocateCmd::Maximin { instance, min_size, max_size } => {
            let inst = load_instance(&instance.instance)?;
            let sizes = match (min_size, max_size) {
                (None, None) => None,
                (lo, hi) => Some((lo.unwrap_or(0), hi.unwrap_or(inst.goods()))),
            };
            match maximin_satisfaction_with_sizes(&inst, sizes)? {
                Some(r) => Outcome::ok(json!({
                    "q_star": Q(r.q_star.clone()),
                    "allocation": r.allocation.labels(),
                    "report": allocation_report(&inst, &r.allocation, &r.q_star)?,
                })),
                None => Outcome::negative_if(json!({ "q_star": null, "allocation": null }), true),
            }
        }
        AllocateCmd::RoundRobin { instance, q } => {
            let inst = load_instance(&instance.instance)?;
            let alloc = round_robin(&inst)?;
            Outcome::ok(json!({
                "allocation": alloc.labels(),
                "report": allocation_report(&inst, &alloc, &parse_q(q)?)?,
            }))
        }
        AllocateCmd::Report { instance, allocation, q } => {
            let inst = load_instance(&instance.instance)?;
            let alloc = parse_allocation(allocation, inst.goods())?;
            Outcome::ok(allocation_report(&inst, &alloc, &parse_q(q)?)?)
        }
        AllocateCmd::Intersection { matroids } => {
            #[derive(serde::Deserialize)]
            #[serde(deny_unknown_fields)]
            struct Pair {
                first: MatroidDoc,
                second: MatroidDoc,
            }
            let pair: Pair = serde_json::from_str(&read(matroids)?)
                .map_err(|e| CliError::Usage(format!("bad matroid pair: {e}")))?;
            let (m1, m2) = (pair.first.into_matroid()?, pair.second.into_matroid()?);
            let set = matroid_intersection(&m1, &m2)?;
            Outcome::ok(json!({
                "size": set.len(),
                "set": set.labels(),
                "certificate": edmonds_certificate(&m1, &m2, set, None)?,
            }))
        }
        AllocateCmd::Deviation { weights, p } => {
            let w = weights.split(',').map(|t| parse_q(t.trim())).collect::<CliResult<Vec<_>>>()?;
            let r = bernoulli_deviation_check(&w, &parse_q(p)?)?;
            let ok = r.ok;
            Outcome::negative_if(r, !ok)
        }
    }
}

fn run_mms(a: &args::MmsArgs) -> CliResult<Outcome> {
    let inst = load_instance(&a.instance.instance)?;
    let agents: Vec<usize> = match a.agent {
        Some(i) => vec![agent_index(&inst, i)?],
        None => (0..inst.agents()).collect(),
    };
    let n = inst.agents();
    let reports = agents
        .into_iter()
        .map(|i| -> CliResult<Value> {
            let v = inst.valuation(i);
            let r = match (a.matroid_fast, v) {
                (false, _) => mms_value(v, n)?,
                (true, Valuation::MatroidRank(matroid)) => matroid_mms(matroid, n)?,
                (true, _) => {
                    return Err(CliError::Usage(format!("--matroid-fast needs a matroid-rank valuation for agent {}", i + 1)))
                }
            };
            Ok(json!({
                "agent": i + 1,
                "mms": Q(r.value),
                "witness": r.witness.labels(),
                "method": r.method,
                "quantile": Q(mms_quantile(v, n)?),
            }))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Outcome::ok(json!({ "n": n, "agents": reports }))
}

fn run_veto(cmd: &VetoCmd, seed: u64) -> CliResult<Outcome> {
    match cmd {
        VetoCmd::Lists { instance, q } => {
            let inst = load_instance(&instance.instance)?;
            let q = parse_q(q)?;
            let lists = (0..inst.agents())
                .map(|i| veto_from_valuation(inst.valuation(i), inst.agents(), &q, i))
                .collect::<Result<Vec<_>, _>>()?;
            let sizes: Vec<String> = lists.iter().map(|l| l.size().to_string()).collect();
            Outcome::ok(json!({ "q": Q(q), "lists": VetoListsDoc::from_lists(&lists), "sizes": sizes }))
        }
        VetoCmd::Solve { lists } => {
            let doc: VetoListsDoc = serde_json::from_str(&read(lists)?)
                .map_err(|e| CliError::Usage(format!("bad veto lists: {e}")))?;
            let lists = doc.into_lists()?;
            let found = find_unvetoed_allocation(&lists)?;
            let negative = found.is_none();
            Outcome::negative_if(json!({ "allocation": found.map(|a| a.labels()) }), negative)
        }
        VetoCmd::Suite { n, m, trials } => {
            let r = equivalence_suite(*n, *m, *trials, seed)?;
            let failed = !r.passed();
            Outcome::negative_if(r, failed)
        }
    }
}

fn load_family(path: &Path) -> CliResult<SetFamily> {
    #[derive(serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct FamilyDoc {
        m: usize,
        k: usize,
        sets: Vec<Vec<usize>>,
    }
    let doc: FamilyDoc =
        serde_json::from_str(&read(path)?).map_err(|e| CliError::Usage(format!("bad family: {e}")))?;
    Ok(SetFamily::from_labels(doc.m, doc.k, &doc.sets)?)
}

fn run_extremal(cmd: &ExtremalCmd, seed: u64) -> CliResult<Outcome> {
    match cmd {
        ExtremalCmd::Bounds { m, k, n } => Outcome::ok(emc_bounds(*m, *k, *n)?),
        ExtremalCmd::Families { m, k, n } => {
            let (cover, clique) = emc_extremal_families(*m, *k, *n)?;
            Outcome::ok(json!({ "cover": cover.labels(), "clique": clique.labels() }))
        }
        ExtremalCmd::Falsify { m, k, n, trials } => Outcome::ok(emc_falsify(*m, *k, *n, *trials, seed)?),
        ExtremalCmd::Matching { family } => {
            let f = load_family(family)?;
            Outcome::ok(json!({ "family_size": f.len(), "matching": matching_number(&f)? }))
        }
        ExtremalCmd::Rainbow { families } => {
            #[derive(serde::Deserialize)]
            #[serde(deny_unknown_fields)]
            struct FamiliesDoc {
                m: usize,
                k: usize,
                families: Vec<Vec<Vec<usize>>>,
            }
            let doc: FamiliesDoc = serde_json::from_str(&read(families)?)
                .map_err(|e| CliError::Usage(format!("bad families: {e}")))?;
            let fams = doc
                .families
                .iter()
                .map(|sets| SetFamily::from_labels(doc.m, doc.k, sets))
                .collect::<Result<Vec<_>, _>>()?;
            let found = rainbow_matching(&fams)?;
            let negative = found.is_none();
            let sets = found.map(|ms| ms.into_iter().map(|b| b.labels()).collect::<Vec<_>>());
            Outcome::negative_if(json!({ "families": fams.len(), "rainbow": sets }), negative)
        }
        ExtremalCmd::Shadow { family, k_prime } => {
            let f = load_family(family)?;
            let sh = shadow(&f, *k_prime)?;
            Outcome::ok(json!({ "family_size": f.len(), "k_prime": k_prime, "size": sh.len(), "shadow": sh.labels() }))
        }
        ExtremalCmd::Kk { family, m_prime, k_prime } => {
            let r = kruskal_katona_check(&load_family(family)?, *m_prime, *k_prime)?;
            let fails = !r.holds;
            Outcome::negative_if(r, fails)
        }
        ExtremalCmd::Qn { n, t_max, precision } => {
            let r = binomial_qn(*n, *t_max, *precision)?;
            let below = r.above_bound.is_false();
            Outcome::negative_if(r, below)
        }
        ExtremalCmd::Poisson { lambda, precision } => {
            let r = poisson_below_mean(&parse_q(lambda)?, *precision)?;
            let below = r.above_inverse_e.is_false();
            Outcome::negative_if(r, below)
        }
        ExtremalCmd::Lemma9 { n, k } => {
            let r = lemma9_check(*n, *k)?;
            let fails = !r.holds;
            Outcome::negative_if(r, fails)
        }
        ExtremalCmd::Chain { instance, agent } => {
            let inst = load_instance(&instance.instance)?;
            let i = agent_index(&inst, *agent)?;
            let r = theorem_chain_check(inst.valuation(i), inst.agents())?;
            let fails = !r.ok;
            Outcome::negative_if(r, fails)
        }
    }
}

fn run_lab(cmd: &LabCmd) -> CliResult<Outcome> {
    match cmd {
        LabCmd::Search { n, m, budget, no_symmetry, time_limit } => {
            let mut spec = parse_budget(budget.as_deref(), *n, *m)?;
            spec.symmetry = !no_symmetry;
            spec.time_limit = time_limit.map(Duration::from_secs);
            let outcome = search_counterexample(&spec)?;
            let mut result = to_value(&outcome);
            if let SearchOutcome::Counterexample(w) = &outcome {
                result["instance"] = serde_json::from_str(&w.instance.to_json()).expect("instance JSON");
            }
            let found = outcome.found();
            Outcome::negative_if(result, !found)
        }
        LabCmd::Export { n, m, budget, out } => {
            let spec = parse_budget(budget.as_deref(), *n, *m)?;
            let counts = export_ip(&spec, out)?;
            Outcome::ok(json!({
                "path": out.display().to_string(),
                "budget": spec.budget.to_string(),
                "counts": counts,
                "expected": expected_lp_counts(*n, *m),
            }))
        }
        LabCmd::Instance { name, n, m, epsilon } => {
            let params = NamedParams {
                n: *n,
                m: *m,
                epsilon: epsilon.as_deref().map(parse_q).transpose()?,
            };
            let inst = generate_named_instance(name, &params)?;
            let doc: Value = serde_json::from_str(&inst.to_json()).expect("instance JSON");
            Outcome::ok(json!({ "name": name, "instance": doc }))
        }
        LabCmd::Gap { n, m, epsilon, slack } => {
            let r = equal_size_gap_report(*n, *m, &parse_q(epsilon)?, *slack)?;
            Outcome::ok(r)
        }
    }
}

fn run_repro(target: &str, seed: u64) -> CliResult<Outcome> {
    let targets: Vec<&str> = if target == "all" {
        TARGETS.iter().map(|t| t.0).collect()
    } else if TARGETS.iter().any(|t| t.0 == target) {
        vec![target]
    } else {
        return Err(CliError::Usage(format!(
            "unknown target `{target}`; expected all or one of {}",
            TARGETS.map(|t| t.0).join(", ")
        )));
    };
    let mut reports = Vec::new();
    let mut passed = true;
    for t in targets {
        let r = run_target(t, seed)?;
        passed &= r.passed;
        let mut v = to_value(&r);
        v["verdict"] = json!(if r.passed { "PASS" } else { "FAIL" });
        v["summary"] = json!(r.to_string());
        reports.push(v);
    }
    Outcome::negative_if(json!({ "passed": passed, "reports": reports }), !passed)
}

fn dispatch(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Quantile(a) => run_quantile(a, cli.seed),
        Command::Allocate(c) => run_allocate(c),
        Command::Mms(a) => run_mms(a),
        Command::Veto(c) => run_veto(c, cli.seed),
        Command::Extremal(c) => run_extremal(c, cli.seed),
        Command::Lab(c) => run_lab(c),
        Command::Repro(a) => run_repro(&a.target, cli.seed),
    }
}

fn configure(cli: &Cli) -> CliResult<()> {
    if let Ok(text) = std::env::var(EXACT_CAP_VAR) {
        let cap = text
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{EXACT_CAP_VAR} must be an integer, got `{text}`")))?;
        set_exact_cap(cap);
    }
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<bool> {
    configure(cli)?;
    let outcome = dispatch(cli)?;
    let config = json!({
        "command": cli.command,
        "seed": cli.seed,
        "threads": cli.threads,
        "format": cli.format,
        "output": cli.output.as_ref().map(|p| p.display().to_string()),
        "exact_cap": exact_cap(),
        "allocation_budget": allocation_budget(),
    });
    let doc = output::envelope(config, outcome.result, outcome.negative);
    let text = output::render(&doc, cli.format);
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write { path: path.display().to_string(), source })?,
        None => print!("{text}"),
    }
    Ok(outcome.negative)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
