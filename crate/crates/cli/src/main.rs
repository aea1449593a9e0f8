//! `packing`: generate instances, run the swap descent, the exact oracle,
//! the neighbourhood audits and full campaigns from the command line.
//!
//! Exit codes: 0 when every checked property held, 1 when a violation was
//! found, 2 on usage or I/O errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use packing_core::campaign::{audit_instance, instance_digest, OUTPUT_DIR_ENV};
use packing_core::formats::{read_instance_file, read_labelling_file, write_instance, GraphFormat};
use packing_core::{
    audit_claim42, audit_nbound, exact_pack, generate, min_purple_labellings, run_campaign, solve,
    solve_multistart, thresholds, DescentPolicy, ExactConfig, ExperimentConfig, GenSpec, Labelling,
    PackingInstance, ResultRecord, SolveOptions, SolveOutcome, SolveStatus,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "packing", version, about = "Packing pairs of bounded-degree graphs by label swaps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance (blue graph, red graph) or a single graph.
    Gen(GenArgs),
    /// Run the swap descent on an instance.
    Pack(PackArgs),
    /// Solve a small instance exactly.
    PackExact(ExactArgs),
    /// Audit the second-neighbourhood bounds on random label pairs.
    Audit(AuditArgs),
    /// Print the threshold constants for the given t values.
    Constants(ConstantsArgs),
    /// Run a campaign described by a TOML config.
    Campaign(CampaignArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// Degree cap of the blue graph.
    #[arg(long)]
    delta_cap: usize,
    /// Degree cap of the red graph; defaults to the blue cap.
    #[arg(long)]
    red_cap: Option<usize>,
    /// Reject edges that would close a 4-, 6- or 8-cycle.
    #[arg(long)]
    forbid_girth: bool,
    /// Stop after this many edges per graph instead of saturating.
    #[arg(long)]
    edges: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "graph6")]
    format: GraphFormat,
    /// Emit only the blue graph.
    #[arg(long)]
    single: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PackArgs {
    instance: PathBuf,
    /// Random restarts; with 1 the descent starts from the file's labelling
    /// or the identity.
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_swaps: Option<usize>,
    /// Write one JSON line per applied swap to this file.
    #[arg(long)]
    emit_trace: Option<PathBuf>,
    /// Add the stuck-point certificate record and fail if it does not hold.
    #[arg(long)]
    certify: bool,
    #[arg(long, default_value = "full")]
    policy: DescentPolicy,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = ExactConfig::default().limit)]
    limit: usize,
    #[arg(long)]
    node_budget: Option<u64>,
    /// List every labelling with the minimum purple count (tiny n only).
    #[arg(long)]
    enumerate_optima: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    instance: PathBuf,
    /// File holding a `perm:` line.
    #[arg(long, conflicts_with = "from_solver")]
    labelling: Option<PathBuf>,
    /// Audit the labelling the descent ends at, adding audits at its purple edge.
    #[arg(long)]
    from_solver: bool,
    #[arg(long = "t", value_delimiter = ',', default_values_t = [2u32, 5, 15])]
    t: Vec<u32>,
    #[arg(long, default_value_t = 10)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long = "t", value_delimiter = ',', default_values_t = [15u32])]
    t: Vec<u32>,
}

#[derive(Args)]
struct CampaignArgs {
    config: PathBuf,
    /// Overrides the config's output path.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

type CliResult = Result<u8, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Pack(a) => cmd_pack(a),
        Command::PackExact(a) => cmd_exact(a),
        Command::Audit(a) => cmd_audit(a),
        Command::Constants(a) => cmd_constants(a),
        Command::Campaign(a) => cmd_campaign(a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), String> {
    match output {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            }
            fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| format!("stdout: {e}")),
    }
}

fn lines(records: &[ResultRecord]) -> String {
    records.iter().map(|r| r.to_line() + "\n").collect()
}

fn load(path: &Path) -> Result<(PackingInstance, Option<Labelling>), String> {
    let file = read_instance_file(path).map_err(|e| e.to_string())?;
    let inst = PackingInstance::new(file.blue, file.red).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((inst, file.perm))
}

fn record(kind: &str, inst: &PackingInstance, params: Value, outcome: Value) -> ResultRecord {
    ResultRecord { kind: kind.into(), digest: instance_digest(inst), params, outcome, wall_ms: None }
}

fn cmd_gen(a: GenArgs) -> CliResult {
    let build = |cap: usize, seed: u64| {
        generate(&GenSpec::new(a.n, cap, seed).forbid_even_short_cycles(a.forbid_girth).edge_budget(a.edges))
            .map(|g| g.graph)
            .map_err(|e| e.to_string())
    };
    let blue = build(a.delta_cap, a.seed)?;
    let text = if a.single {
        packing_core::formats::encode(&blue, a.format)
    } else {
        let red = build(a.red_cap.unwrap_or(a.delta_cap), a.seed.wrapping_add(1))?;
        write_instance(&blue, &red, None, a.format)
    };
    emit(a.output.as_deref(), &text)?;
    Ok(0)
}

fn outcome_json(out: &SolveOutcome) -> Value {
    json!({
        "status": out.status.as_str(),
        "purple_initial": out.purple_initial,
        "purple_final": out.purple_final.count,
        "max_purple_degree": out.purple_final.max_purple_degree,
        "purple_edges": out.purple_final.purple_edges,
        "swaps": out.swap_trace.len(),
        "truncated": out.truncated,
        "initial_perm": out.initial_labelling.perm(),
        "final_perm": out.final_labelling.perm(),
        "summary": out.summary(),
    })
}

fn cmd_pack(a: PackArgs) -> CliResult {
    let (inst, perm) = load(&a.instance)?;
    let opts = SolveOptions { policy: a.policy, max_swaps: a.max_swaps };
    let out = if a.restarts == 1 {
        let init = perm.unwrap_or_else(|| Labelling::identity(inst.n()));
        solve(&inst, &init, &opts)
    } else {
        solve_multistart(&inst, a.restarts, a.seed, &opts)
    }
    .map_err(|e| e.to_string())?;

    let mut ok = out.replay_ok(&inst);
    if out.status == SolveStatus::Packed {
        ok &= packing_core::is_packing(&inst, &out.final_labelling);
    }
    let params = json!({
        "path": a.instance.display().to_string(),
        "restarts": a.restarts,
        "seed": a.seed,
        "max_swaps": a.max_swaps,
        "policy": a.policy,
    });
    let mut records = vec![record("pack", &inst, params.clone(), outcome_json(&out))];
    if a.certify {
        let cert = match &out.stuck_certificate {
            Some(c) => {
                ok &= c.claim31_ok && c.claim32_ok;
                serde_json::to_value(c).expect("certificate serializes")
            }
            None => Value::Null,
        };
        records.push(record("certificate", &inst, params, json!({ "status": out.status.as_str(), "certificate": cert })));
    }
    if let Some(path) = &a.emit_trace {
        let trace: String = out
            .swap_trace
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let line = json!({
                    "kind": "swap",
                    "step": i,
                    "cycle": s.cycle.labels(),
                    "move": s.kind,
                    "purple_after": s.purple_after,
                });
                line.to_string() + "\n"
            })
            .collect();
        emit(Some(path), &trace)?;
    }
    eprintln!("{}", out.summary());
    emit(a.output.as_deref(), &lines(&records))?;
    Ok(u8::from(!ok))
}

fn cmd_exact(a: ExactArgs) -> CliResult {
    let (inst, _) = load(&a.instance)?;
    let cfg = ExactConfig { limit: a.limit, node_budget: a.node_budget };
    let res = exact_pack(&inst, &cfg).map_err(|e| e.to_string())?;
    let mut outcome = json!({
        "packable": res.packable,
        "min_purple": res.min_purple,
        "lower_bound": res.lower_bound,
        "complete": res.complete,
        "nodes": res.nodes_explored,
        "witness": res.witness.as_ref().map(|w| w.perm()),
    });
    let mut ok = true;
    if a.enumerate_optima {
        let optima = min_purple_labellings(&inst).map_err(|e| e.to_string())?;
        let best = packing_core::purple_report(&inst, &optima[0]).count;
        ok = !res.complete || best == res.min_purple;
        outcome["optima"] = json!(optima.iter().map(|l| l.perm()).collect::<Vec<_>>());
    }
    let params = json!({ "path": a.instance.display().to_string(), "limit": a.limit, "node_budget": a.node_budget });
    emit(a.output.as_deref(), &lines(&[record("pack-exact", &inst, params, outcome)]))?;
    Ok(u8::from(!ok))
}

fn cmd_audit(a: AuditArgs) -> CliResult {
    let (inst, perm) = load(&a.instance)?;
    let mut solver_edge = None;
    let lab = if a.from_solver {
        let init = perm.unwrap_or_else(|| Labelling::identity(inst.n()));
        let out = solve(&inst, &init, &SolveOptions::default()).map_err(|e| e.to_string())?;
        solver_edge = out.purple_final.purple_edges.first().copied();
        out.final_labelling
    } else if let Some(path) = &a.labelling {
        read_labelling_file(path).map_err(|e| e.to_string())?
    } else {
        perm.unwrap_or_else(|| Labelling::identity(inst.n()))
    };
    let out = audit_instance(&inst, &lab, &a.t, a.pairs, a.seed).map_err(|e| e.to_string())?;
    let mut records = out.records.clone();
    if let Some((u, v)) = solver_edge {
        for &t in &a.t {
            let params = json!({ "u": u, "v": v, "t": t });
            let c42 = audit_claim42(&inst, &lab, u, v, t).map_err(|e| e.to_string())?;
            let nb = audit_nbound(&inst, &lab, u, v, t).map_err(|e| e.to_string())?;
            records.push(record("claim42", &inst, params.clone(), serde_json::to_value(&c42).expect("serializes")));
            records.push(record("nbound", &inst, params, serde_json::to_value(&nb).expect("serializes")));
        }
    }
    let mut text = lines(&records);
    text.push_str(&serde_json::to_string(&out.summary).expect("summary serializes"));
    text.push('\n');
    emit(a.output.as_deref(), &text)?;
    Ok(out.summary.exit_code() as u8)
}

fn cmd_constants(a: ConstantsArgs) -> CliResult {
    let mut text = String::new();
    for &t in &a.t {
        let r = thresholds(t).map_err(|e| e.to_string())?;
        text.push_str(&serde_json::to_string(&r).expect("report serializes"));
        text.push('\n');
    }
    emit(None, &text)?;
    Ok(0)
}

fn cmd_campaign(a: CampaignArgs) -> CliResult {
    let mut cfg = ExperimentConfig::load(&a.config).map_err(|e| e.to_string())?;
    if a.output.is_some() {
        cfg.output = a.output;
    }
    if a.workers.is_some() {
        cfg.workers = a.workers;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    let out = run_campaign(&cfg).map_err(|e| e.to_string())?;
    let summary = serde_json::to_string(&out.summary).expect("summary serializes");
    match cfg.output_path() {
        Some(path) => {
            out.write_to(&path).map_err(|e| e.to_string())?;
            eprintln!("records written to {} (default directory from {OUTPUT_DIR_ENV})", path.display());
            println!("{summary}");
        }
        None => emit(None, &out.to_jsonl())?,
    }
    Ok(out.summary.exit_code() as u8)
}
