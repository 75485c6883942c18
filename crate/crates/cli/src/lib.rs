//! `inquiry` subcommands. Every command is deterministic given its inputs.
//!
//! Exit codes: 0 success, 1 usage, 2 validation failure, 3 runtime error.

use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use inquiry_core::eval::{bench_retrieval, pilot_table, retrieval_table, run_pilot, REPORT_VERSION};
use inquiry_core::extraction::DialogueTurn;
use inquiry_core::io::{read_jsonl, to_json_pretty, to_jsonl, write_file};
use inquiry_core::pack::ScenarioPack;
use inquiry_core::planner::{run_policy, PolicyKind, SessionResult};
use inquiry_core::retrieval::KnowledgeBase;
use inquiry_core::session::{BusyPolicy, SessionManager};
use inquiry_core::Error;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "inquiry", version, about = "Stateful clinical inquiry engine")]
pub struct Cli {
    /// Accepted for reproducible invocations; no command draws random numbers.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scripted session and write its trace and record.
    Replay(ReplayArgs),
    /// Chunk-only versus hybrid retrieval over the pack's query points.
    BenchRetrieval(BenchArgs),
    /// All four policies plus the retrieval comparison; exits 2 when a pack
    /// threshold is violated.
    Evaluate(BenchArgs),
    /// Lint a scenario pack, optionally against a knowledge base.
    ValidatePack(ValidateArgs),
    /// Start the HTTP session service.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct Assets {
    #[arg(long, default_value = "packs/pilot")]
    pub pack: PathBuf,
    #[arg(long, default_value = "kb/pilot")]
    pub kb: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Scenario id, or a path to a script `.jsonl` whose file stem names the scenario.
    pub script: String,
    #[command(flatten)]
    pub assets: Assets,
    #[arg(long, default_value = "full_framework")]
    pub policy: String,
    /// Directory receiving `trace.jsonl` and `emr.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub assets: Assets,
    /// Ranking cutoff for recall, MRR, nDCG and the hit rates.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// File receiving the JSON report.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value = "packs/pilot")]
    pub pack: PathBuf,
    /// Also check knowledge-base cross references.
    #[arg(long)]
    pub kb: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub assets: Assets,
    #[arg(long, env = "INQUIRY_PORT", default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: IpAddr,
    /// Reject a second concurrent post on a session instead of queueing it.
    #[arg(long)]
    pub reject_busy: bool,
    /// Append each session's traces to `<dir>/<session_id>.jsonl`.
    #[arg(long)]
    pub persist: Option<PathBuf>,
}

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            error: anyhow::anyhow!(msg.into()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::UnknownPolicy(_) | Error::UnknownScenario(_) => EXIT_USAGE,
            Error::PackInvalid(_) | Error::KbInvalid(_) | Error::Json { .. } => EXIT_VALIDATION,
            _ => EXIT_RUNTIME,
        };
        Self { code, error: e.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Self {
            code: EXIT_RUNTIME,
            error,
        }
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Replay(a) => replay(&a).map(|s| print!("{s}")),
        Command::BenchRetrieval(a) => bench(&a).map(|s| print!("{s}")),
        Command::Evaluate(a) => {
            let (text, violations) = evaluate(&a)?;
            print!("{text}");
            if violations.is_empty() {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_VALIDATION,
                    error: anyhow::anyhow!("{} threshold(s) violated", violations.len()),
                })
            }
        }
        Command::ValidatePack(a) => validate(&a).map(|s| print!("{s}")),
        Command::Serve(a) => serve(&a),
    }
}

fn load(assets: &Assets) -> CmdResult<(ScenarioPack, Arc<KnowledgeBase>)> {
    let pack = ScenarioPack::load(&assets.pack)?;
    let kb = KnowledgeBase::load(&assets.kb)?;
    Ok((pack, Arc::new(kb)))
}

fn emit<T: Serialize>(format: Format, value: &T, table: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => to_json_pretty(value),
        Format::Table => table(),
    }
}

/// Resolve the replay target to a scenario id and its turns.
fn script_turns(pack: &ScenarioPack, script: &str) -> CmdResult<(String, Vec<DialogueTurn>)> {
    let path = Path::new(script);
    if path.extension().is_some_and(|e| e == "jsonl") {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Failure::usage(format!("cannot name a scenario from {script}")))?
            .to_owned();
        pack.scenario(&id)?;
        return Ok((id, read_jsonl(path)?));
    }
    Ok((script.to_owned(), pack.script(script)?.to_vec()))
}

#[derive(Serialize)]
struct ReplaySummary<'a> {
    v: u32,
    scenario_id: &'a str,
    policy: PolicyKind,
    turns: usize,
    actions: Vec<String>,
    t_goal: Option<u32>,
    final_state_hash: String,
}

pub fn replay(a: &ReplayArgs) -> CmdResult<String> {
    let policy: PolicyKind = a.policy.parse()?;
    let (pack, kb) = load(&a.assets)?;
    let (id, turns) = script_turns(&pack, &a.script)?;
    let case = Arc::new(pack.case(&id)?);
    let result = run_policy(case, kb, &turns, policy)?;
    if let Some(dir) = &a.out {
        write_replay(dir, &result)?;
    }
    let summary = ReplaySummary {
        v: REPORT_VERSION,
        scenario_id: &id,
        policy,
        turns: result.traces.len(),
        actions: result.traces.iter().filter_map(|t| t.chosen.as_ref().map(|c| c.to_string())).collect(),
        t_goal: result.t_goal,
        final_state_hash: inquiry_core::hash::digest(&result.final_state),
    };
    Ok(emit(a.format, &summary, || replay_table(&result)))
}

fn write_replay(dir: &Path, r: &SessionResult) -> CmdResult {
    write_file(&dir.join("trace.jsonl"), &to_jsonl(&r.traces))?;
    write_file(&dir.join("emr.json"), &to_json_pretty(&r.record))?;
    Ok(())
}

fn replay_table(r: &SessionResult) -> String {
    let mut out = format!("{} under {}\n", r.scenario_id, r.policy.label());
    for t in &r.traces {
        let action = t
            .chosen_candidate()
            .map(|c| {
                let slot = c.target_slot.as_ref().map_or("-", |s| s.as_str());
                format!("{} {} {} (u={:.3})", c.action_id, c.verb, slot, c.utility)
            })
            .unwrap_or_else(|| "-".to_owned());
        let text: String = t.input.text.chars().take(48).collect();
        out.push_str(&format!(
            "t{:02}  {:<48}  events {:>2}  gaps {:>2}  {}\n",
            t.turn_index,
            text,
            t.events.len(),
            t.gaps.len(),
            action
        ));
    }
    match r.t_goal {
        Some(t) => out.push_str(&format!("goal met at turn {t}\n")),
        None => out.push_str("goal not met\n"),
    }
    out
}

pub fn bench(a: &BenchArgs) -> CmdResult<String> {
    if a.k == 0 {
        return Err(Failure::usage("--k must be at least 1"));
    }
    let (pack, kb) = load(&a.assets)?;
    if pack.queries.is_empty() {
        return Err(Failure {
            code: EXIT_VALIDATION,
            error: anyhow::anyhow!("pack {} has no query points", pack.manifest.pack_id),
        });
    }
    let report = bench_retrieval(&pack, &kb, a.k, a.k)?;
    if let Some(out) = &a.out {
        write_file(out, &to_json_pretty(&report))?;
    }
    Ok(emit(a.format, &report, || retrieval_table(&report)))
}

/// The report text plus any violated pack thresholds.
pub fn evaluate(a: &BenchArgs) -> CmdResult<(String, Vec<String>)> {
    if a.k == 0 {
        return Err(Failure::usage("--k must be at least 1"));
    }
    let (pack, kb) = load(&a.assets)?;
    let report = run_pilot(&pack, &kb, &PolicyKind::ALL, a.k, a.k)?;
    if let Some(out) = &a.out {
        write_file(out, &to_json_pretty(&report))?;
    }
    let violations = report.threshold_violations(&pack.manifest.thresholds);
    let text = emit(a.format, &report, || {
        let mut s = pilot_table(&report);
        for v in &violations {
            s.push_str(&format!("threshold: {v}\n"));
        }
        s
    });
    Ok((text, violations))
}

pub fn validate(a: &ValidateArgs) -> CmdResult<String> {
    let pack = ScenarioPack::load(&a.pack)?;
    let kb = a.kb.as_deref().map(KnowledgeBase::load).transpose()?;
    let problems = pack.problems(kb.as_ref());
    if problems.is_empty() {
        let c = pack.measured_counts();
        return Ok(format!(
            "{}: ok ({} scenarios, {} gold items, {} risk items, {} structural slots, {} queries)\n",
            pack.manifest.pack_id, c.scenarios, c.gold_items, c.risk_items, c.structural_slots, c.queries
        ));
    }
    Err(Failure {
        code: EXIT_VALIDATION,
        error: anyhow::anyhow!("{} problem(s):\n  {}", problems.len(), problems.join("\n  ")),
    })
}

pub fn serve(a: &ServeArgs) -> CmdResult {
    let (pack, kb) = load(&a.assets)?;
    let mut manager = SessionManager::new(Arc::new(pack), kb)?;
    if a.reject_busy {
        manager = manager.with_busy_policy(BusyPolicy::Reject);
    }
    if let Some(dir) = &a.persist {
        manager = manager.with_persistence(dir.clone());
    }
    let addr = SocketAddr::new(a.bind, a.port);
    let rt = tokio::runtime::Runtime::new().context("starting the async runtime")?;
    eprintln!("listening on http://{addr}");
    rt.block_on(inquiry_service::serve(Arc::new(manager), addr))
        .with_context(|| format!("serving on {addr}"))?;
    Ok(())
}
