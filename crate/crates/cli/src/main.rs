//! `online-embed`: run online embedders on metric files, play adversary
//! duels, run property suites and render transcripts.
//!
//! ```bash
//! online-embed embed --algo line --metric m.json --out emb.json --report r.json
//! online-embed duel --adversary tree --n 3 --out duel.json --csv duel.csv
//! online-embed verify line-bounds --n 10 --trials 100 --seed 1
//! online-embed report duel.json --replay
//! ```
//!
//! Exit status is 0 when every certificate and bound check passed, 1 when
//! one failed and 2 on invalid input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use online_embed::adversary::{replay, run_duel, AdversaryKind, DuelConfig, DuelTranscript, EmbedderKind, Event};
use online_embed::io::{metric_from_json_as, read_json, read_transcript, write_json, write_transcript};
use online_embed::linf::LinfMode;
use online_embed::scalar::{parse_rational, Backend, Rational, Scalar};
use online_embed::suites::{check_greedy, check_line, check_linf, check_tree_lifts, run_suite, timed, Check, Checked, SuiteConfig, SuiteName};
use online_embed::MetricSpace;

/// Largest metric the greedy tree, line and tree-lift embedders accept.
const MAX_POINTS: usize = 64;
/// Largest metric for the `2^(n-2)`-dimensional l-infinity lift.
const MAX_TREE_LINF_POINTS: usize = 16;
const MAX_LINF_GUARANTEE_POINTS: usize = 3;
const MAX_LINF_EMPIRICAL_POINTS: usize = 6;
const MAX_BRANCH_CAP: usize = 10_000_000;
const MAX_L2_GENERATIONS: usize = 6;

#[derive(Parser, Debug)]
#[command(name = "online-embed", version, about = "Online metric embeddings, adversaries and certificate suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Embed the points of a metric file in order with an online embedder.
    Embed(EmbedArgs),
    /// Play an adaptive adversary against an embedder.
    Duel(DuelArgs),
    /// Run a randomized property suite.
    Verify(VerifyArgs),
    /// Print a transcript as a table and CSV.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    GreedyTree,
    Line,
    /// Exact Steiner tree of a tree metric.
    Steiner,
    /// Isometric l1 embedding of a tree metric.
    TreeL1,
    /// Isometric l-infinity embedding of a tree metric.
    TreeLinf,
    /// Branch family of 1-Lipschitz line maps into l-infinity.
    Linf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Main output: the embedding, transcript or suite summary (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report with every bound check.
    #[arg(long)]
    report: Option<PathBuf>,
    /// CSV with columns step,event,bound,measured,pass.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct LinfArgs {
    /// Target epsilon; sets delta = epsilon / (20 n^2) and certifies distortion <= 1/(1-epsilon).
    #[arg(long, conflicts_with = "delta")]
    epsilon: Option<String>,
    /// Lattice step, used as given (distortion is measured only).
    #[arg(long)]
    delta: Option<String>,
    /// Merge identical branches after every step.
    #[arg(long, value_enum, default_value = "off")]
    dedup: OnOff,
    /// Abort once a step would create more branches than this.
    #[arg(long, default_value_t = MAX_BRANCH_CAP)]
    max_branches: usize,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    /// Metric JSON file; rows are exposed in order.
    #[arg(long)]
    metric: PathBuf,
    /// Embed only the first n points.
    #[arg(long)]
    n: Option<usize>,
    /// Number backend; defaults to the one the metric file declares.
    #[arg(long)]
    backend: Option<Backend>,
    #[command(flatten)]
    linf: LinfArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct DuelArgs {
    #[arg(long)]
    adversary: AdversaryKind,
    /// Opponent; each adversary has a default.
    #[arg(long)]
    algo: Option<EmbedderKind>,
    /// Phases (tree), generations (l2) or host dimension (linf-dim).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    backend: Option<Backend>,
    /// Lattice step of the linf-branches opponent.
    #[arg(long)]
    delta: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// tree-bounds, line-bounds, linf-certificates, isometry or adversary-certificates.
    suite: SuiteName,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Instance size; each suite has a default.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value = "rational")]
    backend: Backend,
    #[command(flatten)]
    linf: LinfArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Transcript JSON written by `duel --out`.
    transcript: PathBuf,
    /// Rerun the duel and require an identical transcript.
    #[arg(long)]
    replay: bool,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Embed(a) => cmd_embed(a),
        Command::Duel(a) => cmd_duel(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// One CSV row.
struct Row {
    step: String,
    event: String,
    bound: String,
    measured: String,
    pass: String,
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn check_rows<'a>(checks: impl IntoIterator<Item = (String, &'a Check)>) -> Vec<Row> {
    checks
        .into_iter()
        .map(|(step, c)| Row { step, event: c.name.clone(), bound: cell(&c.bound), measured: cell(&c.measured), pass: c.pass.to_string() })
        .collect()
}

fn event_rows(events: &[Event]) -> Vec<Row> {
    events
        .iter()
        .map(|e| {
            let (event, bound, measured, pass) = match e {
                Event::Expose { point, .. } => (format!("expose:{point}"), String::new(), String::new(), String::new()),
                Event::Respond { point, .. } => (format!("respond:{point}"), String::new(), String::new(), String::new()),
                Event::Decide { decision, .. } => (format!("decide:{decision}"), String::new(), String::new(), String::new()),
                Event::Certify { name, bound, measured, pass, .. } => (format!("certify:{name}"), cell(bound), cell(measured), pass.to_string()),
            };
            Row { step: e.step().to_string(), event, bound, measured, pass }
        })
        .collect()
}

fn write_csv(path: &Path, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(["step", "event", "bound", "measured", "pass"])?;
    for r in rows {
        w.write_record([&r.step, &r.event, &r.bound, &r.measured, &r.pass])?;
    }
    w.flush()?;
    Ok(())
}

fn emit(output: &OutputArgs, main: &Value, report: &Value, rows: &[Row]) -> Result<()> {
    match &output.out {
        Some(p) => write_json(p, main)?,
        None if output.report.is_none() => println!("{}", serde_json::to_string_pretty(main)?),
        None => {}
    }
    if let Some(p) = &output.report {
        write_json(p, report)?;
    }
    if let Some(p) = &output.csv {
        write_csv(p, rows)?;
    }
    Ok(())
}

fn parse_positive(text: &str, what: &str) -> Result<Rational> {
    let r = parse_rational(text).with_context(|| format!("invalid {what}"))?;
    if r <= Rational::from_integer(0.into()) {
        bail!("{what} must be positive, got {text}");
    }
    Ok(r)
}

/// The delta mode of an l-infinity run on `n` points, with the size limits
/// enforced.
fn linf_mode(args: &LinfArgs, n: usize) -> Result<LinfMode<Rational>> {
    if args.max_branches > MAX_BRANCH_CAP {
        bail!("--max-branches is limited to {MAX_BRANCH_CAP}");
    }
    match (&args.epsilon, &args.delta) {
        (Some(_), Some(_)) => bail!("--epsilon and --delta are mutually exclusive"),
        (None, Some(d)) => {
            if n > MAX_LINF_EMPIRICAL_POINTS {
                bail!("linf with a free delta is limited to n <= {MAX_LINF_EMPIRICAL_POINTS}, got {n}");
            }
            Ok(LinfMode::Empirical { delta: parse_positive(d, "delta")? })
        }
        (e, None) => {
            if n > MAX_LINF_GUARANTEE_POINTS {
                bail!("linf with an epsilon guarantee is limited to n <= {MAX_LINF_GUARANTEE_POINTS}, got {n}; pass --delta for larger n");
            }
            let epsilon = match e {
                Some(e) => parse_positive(e, "epsilon")?,
                None => Rational::new(1.into(), 2.into()),
            };
            Ok(LinfMode::Guarantee { n, epsilon })
        }
    }
}

fn algo_name(a: Algo) -> String {
    a.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn embed_with<S: Scalar>(args: &EmbedArgs, space: MetricSpace<S>) -> Result<Checked> {
    let n = space.len();
    let limit = match args.algo {
        Algo::TreeLinf => MAX_TREE_LINF_POINTS,
        Algo::Linf => usize::MAX,
        _ => MAX_POINTS,
    };
    if n > limit {
        bail!("{} is limited to n <= {limit}, got {n}", algo_name(args.algo));
    }
    let checked = match args.algo {
        Algo::GreedyTree => check_greedy(&space),
        Algo::Line => check_line(&space),
        Algo::Steiner | Algo::TreeL1 | Algo::TreeLinf => check_tree_lifts(&space, args.algo == Algo::TreeLinf).map(|mut c| {
            let key = match args.algo {
                Algo::Steiner => "tree",
                Algo::TreeL1 => "l1",
                _ => "linf",
            };
            c.embedding = c.embedding[key].take();
            c
        }),
        Algo::Linf => {
            let mode = linf_mode(&args.linf, n)?;
            let exact: MetricSpace<Rational> = space.convert();
            check_linf(&exact, &mode, args.linf.dedup == OnOff::On, Some(args.linf.max_branches))
        }
    };
    checked.map_err(anyhow::Error::msg)
}

fn cmd_embed(args: EmbedArgs) -> Result<bool> {
    let file = read_json(&args.metric)?;
    let declared: Backend = match file.get("backend").and_then(Value::as_str) {
        Some(b) => b.parse().map_err(anyhow::Error::msg)?,
        None => Backend::Rational,
    };
    let backend = args.backend.unwrap_or(declared);
    let (checked, seconds) = timed(|| -> Result<Checked> {
        match backend {
            Backend::Rational => {
                let m = metric_from_json_as::<Rational>(&file)?;
                embed_with(&args, m.prefix(args.n.unwrap_or(m.len()).min(m.len())))
            }
            Backend::Float => {
                let m = metric_from_json_as::<f64>(&file)?;
                embed_with(&args, m.prefix(args.n.unwrap_or(m.len()).min(m.len())))
            }
        }
    });
    let checked = checked?;
    let pass = checked.pass();
    let report = json!({
        "algo": algo_name(args.algo),
        "metric": args.metric.display().to_string(),
        "backend": backend.to_string(),
        "pass": pass,
        "seconds": seconds,
        "report": checked.report,
        "checks": checked.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
    });
    let rows = check_rows(checked.checks.iter().enumerate().map(|(i, c)| (i.to_string(), c)));
    for c in checked.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {}: bound {} measured {}", c.name, cell(&c.bound), cell(&c.measured));
    }
    emit(&args.output, &checked.embedding, &report, &rows)?;
    Ok(pass)
}

fn print_certificates(t: &DuelTranscript) {
    for e in t.certificates() {
        if let Event::Certify { step, name, bound, measured, pass } = e {
            println!("{:>4}  {:<12} bound {:<24} measured {:<24} {}", step, name, cell(bound), cell(measured), if *pass { "pass" } else { "FAIL" });
        }
    }
}

fn cmd_duel(args: DuelArgs) -> Result<bool> {
    if args.adversary == AdversaryKind::L2 && args.n > MAX_L2_GENERATIONS {
        bail!("l2 duels are limited to {MAX_L2_GENERATIONS} generations, got {}", args.n);
    }
    if args.adversary == AdversaryKind::Tree && 2 * args.n + 2 > MAX_POINTS {
        bail!("tree duels are limited to {} phases, got {}", (MAX_POINTS - 2) / 2, args.n);
    }
    let mut config = DuelConfig::new(args.adversary, args.n).with_seed(args.seed);
    if let Some(e) = args.algo {
        config = config.with_embedder(e);
    }
    if let Some(b) = args.backend {
        config = config.with_backend(b);
    }
    if let Some(d) = &args.delta {
        config = config.with_delta(d.clone());
    }
    let (transcript, seconds) = timed(|| run_duel(&config));
    let transcript = transcript?;
    print_certificates(&transcript);
    println!("distortion report: {}", transcript.report);
    let report = json!({
        "config": serde_json::to_value(&transcript.config)?,
        "passed": transcript.passed,
        "seconds": seconds,
        "report": transcript.report,
        "transcript": args.output.out.as_ref().map(|p| p.display().to_string()),
    });
    if let Some(p) = &args.output.out {
        write_transcript(p, &transcript)?;
    }
    if let Some(p) = &args.output.report {
        write_json(p, &report)?;
    }
    if let Some(p) = &args.output.csv {
        write_csv(p, &event_rows(&transcript.events))?;
    }
    Ok(transcript.passed)
}

fn cmd_verify(args: VerifyArgs) -> Result<bool> {
    let mut config = SuiteConfig::new(args.suite, args.seed, args.trials)
        .with_backend(args.backend)
        .with_dedup(args.linf.dedup == OnOff::On)
        .with_max_branches(Some(args.linf.max_branches));
    if let Some(n) = args.n {
        if n > MAX_POINTS {
            bail!("suites are limited to n <= {MAX_POINTS}, got {n}");
        }
        config = config.with_n(n);
    }
    if args.suite == SuiteName::LinfCertificates {
        let n = args.n.unwrap_or(3);
        config = config.with_linf(linf_mode(&args.linf, n)?).with_n(n);
    }
    let summary = run_suite(&config);
    for r in &summary.results {
        let failed: Vec<&str> = r.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            println!("trial {:>4}  {:<28} pass", r.trial, r.label);
        } else {
            println!("trial {:>4}  {:<28} FAIL {}", r.trial, r.label, failed.join(","));
        }
    }
    for c in &summary.fixed {
        println!("{:<40} {}", c.name, if c.pass { "pass" } else { "FAIL" });
    }
    println!("{}: {}/{} trials passed in {:.2}s", args.suite, summary.passed(), summary.results.len(), summary.seconds);
    let mut rows = check_rows(summary.fixed.iter().map(|c| ("-".to_string(), c)));
    rows.extend(check_rows(summary.results.iter().flat_map(|r| r.checks.iter().map(move |c| (r.trial.to_string(), c)))));
    let json = summary.to_json();
    let out = OutputArgs { out: args.output.out.clone(), report: args.output.report.clone(), csv: args.output.csv.clone() };
    if out.out.is_some() || out.report.is_some() || out.csv.is_some() {
        emit(&out, &json, &json, &rows)?;
    }
    Ok(summary.all_pass())
}

fn cmd_report(args: ReportArgs) -> Result<bool> {
    let t = read_transcript(&args.transcript)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "{} adversary vs {}, size {}, seed {}", t.config.adversary, t.config.embedder, t.config.size, t.config.seed)?;
    writeln!(out, "{:>4}  {:<10} {:<40} {:<24} {:<24} pass", "step", "exposure", "decision", "bound", "measured")?;
    for e in &t.events {
        let (exposure, decision, bound, measured, pass) = match e {
            Event::Expose { point, .. } => (format!("x{point}"), String::new(), String::new(), String::new(), String::new()),
            Event::Respond { .. } => continue,
            Event::Decide { decision, .. } => (String::new(), decision.clone(), String::new(), String::new(), String::new()),
            Event::Certify { name, bound, measured, pass, .. } => {
                (String::new(), format!("certify {name}"), cell(bound), cell(measured), if *pass { "pass" } else { "FAIL" }.to_string())
            }
        };
        writeln!(out, "{:>4}  {:<10} {:<40} {:<24} {:<24} {}", e.step(), exposure, decision, bound, measured, pass)?;
    }
    writeln!(out, "distortion report: {}", t.report)?;
    let mut ok = t.passed;
    let mut report = json!({ "passed": t.passed, "report": t.report, "events": t.events.len() });
    if args.replay {
        let check = replay(&t)?;
        writeln!(out, "replay: {}", if check.identical { "identical" } else { "MISMATCH" })?;
        if let Some(i) = check.first_mismatch {
            writeln!(out, "first differing event: {i}")?;
        }
        report["replay_identical"] = json!(check.identical);
        ok &= check.identical;
    }
    drop(out);
    if let Some(p) = &args.output.csv {
        write_csv(p, &event_rows(&t.events))?;
    }
    if let Some(p) = &args.output.report.as_ref().or(args.output.out.as_ref()) {
        write_json(p, &report)?;
    }
    Ok(ok)
}
