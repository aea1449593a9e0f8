//! Experiment configuration, JSON-lines result records and the campaign
//! pipelines that tie generation, descent, audits and the oracle together.
//!
//! A configuration plus the code version fixes every record bit for bit:
//! instance `i` draws from ChaCha8 stream `i` of the configured seed, and
//! the record list is sorted before it is written.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analyzer::{c_t, thresholds, Analyzer};
use crate::error::{Error, Result};
use crate::formats::{read_instance_file, to_edgelist, to_graph6};
use crate::generators::random_pair;
use crate::model::{bec_condition, condition_profile, is_packing, sauer_spencer_condition, Labelling, PackingInstance};
use crate::oracle::{exact_pack, min_purple_labellings, ExactConfig, ENUMERATION_LIMIT};
use crate::solver::{restart_labelling, solve, solve_multistart, DescentPolicy, SolveOptions, SolveStatus};

/// Environment variable naming the default directory for campaign output.
pub const OUTPUT_DIR_ENV: &str = "PACKING_OUTPUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Gen,
    Pack,
    PackExact,
    Audit,
    Constants,
    /// Generate, descend, audit at the final purple edge and cross-check
    /// with the oracle where `n` allows.
    Campaign,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Gen => "gen",
            ExperimentKind::Pack => "pack",
            ExperimentKind::PackExact => "pack-exact",
            ExperimentKind::Audit => "audit",
            ExperimentKind::Constants => "constants",
            ExperimentKind::Campaign => "campaign",
        }
    }
}

/// Which classical condition generated instances must satisfy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    #[default]
    Any,
    Bec,
    SauerSpencer,
}

/// A flat key-value document; every key has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Instance files; when non-empty they replace generation.
    pub instances: Vec<PathBuf>,
    pub count: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub delta1_cap: usize,
    pub delta2_cap: usize,
    pub regime: Regime,
    pub forbid_even_short_cycles: bool,
    pub seed: u64,
    pub restarts: usize,
    pub policy: DescentPolicy,
    pub t_grid: Vec<u32>,
    /// Random `(a, b)` pairs audited per instance.
    pub pairs: usize,
    pub oracle_limit: usize,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Add wall-clock times to records; off by default so output is reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::Campaign,
            instances: Vec::new(),
            count: 0,
            n_min: 8,
            n_max: 40,
            delta1_cap: 4,
            delta2_cap: 4,
            regime: Regime::Any,
            forbid_even_short_cycles: false,
            seed: 0,
            restarts: 1,
            policy: DescentPolicy::Full,
            t_grid: vec![2, 5, 15],
            pairs: 10,
            oracle_limit: 8,
            output: None,
            workers: None,
            timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(Error::Config(format!("need 1 <= n_min <= n_max, got {}..{}", self.n_min, self.n_max)));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        let t_min = if self.kind == ExperimentKind::Constants { 5 } else { 2 };
        if let Some(t) = self.t_grid.iter().find(|&&t| t < t_min) {
            return Err(Error::Config(format!("t = {t} below the minimum {t_min} for {}", self.kind.as_str())));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Where the records go: the configured path, or a file named after the
    /// kind and seed in the directory from [`OUTPUT_DIR_ENV`].
    pub fn output_path(&self) -> Option<PathBuf> {
        self.output.clone().or_else(|| {
            std::env::var_os(OUTPUT_DIR_ENV)
                .map(|dir| PathBuf::from(dir).join(format!("{}-{}.jsonl", self.kind.as_str(), self.seed)))
        })
    }
}

/// One line of output. `kind` serializes first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub kind: String,
    /// SHA-256 of the canonical edge lists of both graphs, hex encoded.
    pub digest: String,
    pub params: Value,
    pub outcome: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl ResultRecord {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyCount {
    pub checked: usize,
    pub passed: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub kind: String,
    pub experiment: String,
    pub instances: usize,
    pub records: usize,
    pub properties: BTreeMap<String, PropertyCount>,
    /// Counts of final solver statuses, for `pack` and `campaign`.
    pub statuses: BTreeMap<String, usize>,
    pub violations: usize,
}

impl CampaignSummary {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.violations > 0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignOutput {
    pub records: Vec<ResultRecord>,
    pub summary: CampaignSummary,
}

impl CampaignOutput {
    /// Sorted records followed by the summary line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_line());
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.summary).expect("summary serializes"));
        out.push('\n');
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_jsonl().as_bytes()).map_err(|e| Error::io(path, e))
    }
}

/// Hex SHA-256 of the two graphs' canonical edge lists, blue then red.
pub fn instance_digest(inst: &PackingInstance) -> String {
    let mut h = Sha256::new();
    h.update(to_edgelist(inst.blue()).as_bytes());
    h.update(to_edgelist(inst.red()).as_bytes());
    hex::encode(h.finalize())
}

/// Property outcomes gathered while processing one instance.
#[derive(Default)]
struct Tally {
    props: BTreeMap<String, PropertyCount>,
    statuses: BTreeMap<String, usize>,
    violations: usize,
}

impl Tally {
    fn check(&mut self, name: &str, ok: bool) -> bool {
        let e = self.props.entry(name.to_string()).or_default();
        e.checked += 1;
        if ok {
            e.passed += 1;
        } else {
            self.violations += 1;
        }
        ok
    }

    fn merge(&mut self, other: Tally) {
        for (k, v) in other.props {
            let e = self.props.entry(k).or_default();
            e.checked += v.checked;
            e.passed += v.passed;
        }
        for (k, v) in other.statuses {
            *self.statuses.entry(k).or_default() += v;
        }
        self.violations += other.violations;
    }
}

struct Source {
    index: usize,
    inst: PackingInstance,
    params: Value,
}

/// Degree caps for instance `i`, shrunk until the regime holds.
fn caps_for(cfg: &ExperimentConfig, n: usize, rng: &mut ChaCha8Rng) -> (usize, usize) {
    let mut c1 = rng.random_range(0..=cfg.delta1_cap);
    let mut c2 = rng.random_range(0..=cfg.delta2_cap.min(c1));
    let ok = |c1: usize, c2: usize| match cfg.regime {
        Regime::Any => true,
        Regime::Bec => bec_condition(n, c1, c2),
        Regime::SauerSpencer => sauer_spencer_condition(n, c1, c2),
    };
    while !ok(c1, c2) {
        if c1 >= c2 && c1 > 0 {
            c1 -= 1;
        } else {
            c2 -= 1;
        }
        c2 = c2.min(c1);
    }
    (c1, c2)
}

/// The `i`-th generated instance of a configuration.
pub fn generated_instance(cfg: &ExperimentConfig, i: usize) -> Result<(PackingInstance, Value)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(i as u64);
    let n = rng.random_range(cfg.n_min..=cfg.n_max);
    let (c1, c2) = caps_for(cfg, n, &mut rng);
    let pair_seed = rng.random::<u64>();
    let (blue, red) = random_pair(n, c1, c2, cfg.forbid_even_short_cycles, pair_seed)?;
    let inst = PackingInstance::new(blue, red)?;
    let params = json!({
        "index": i,
        "seed": cfg.seed,
        "n": n,
        "delta1_cap": c1,
        "delta2_cap": c2,
        "pair_seed": pair_seed,
        "forbid_even_short_cycles": cfg.forbid_even_short_cycles,
    });
    Ok((inst, params))
}

fn sources(cfg: &ExperimentConfig) -> Result<Vec<Source>> {
    if cfg.instances.is_empty() {
        (0..cfg.count)
            .map(|i| generated_instance(cfg, i).map(|(inst, params)| Source { index: i, inst, params }))
            .collect()
    } else {
        cfg.instances
            .iter()
            .enumerate()
            .map(|(i, path)| {
                let file = read_instance_file(path)?;
                let inst = PackingInstance::new(file.blue, file.red)?;
                Ok(Source { index: i, inst, params: json!({ "index": i, "path": path.display().to_string() }) })
            })
            .collect()
    }
}

/// Graph6 strings and labelling needed to replay a record on its own.
fn replay_payload(inst: &PackingInstance, perm: Option<&[usize]>) -> Value {
    json!({ "blue": to_graph6(inst.blue()), "red": to_graph6(inst.red()), "perm": perm })
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    records: Vec<ResultRecord>,
    tally: Tally,
    digest: String,
    started: std::time::Instant,
}

impl Ctx<'_> {
    fn push(&mut self, kind: &str, params: Value, outcome: Value) {
        let wall_ms = self.cfg.timing.then(|| self.started.elapsed().as_millis() as u64);
        self.records.push(ResultRecord { kind: kind.to_string(), digest: self.digest.clone(), params, outcome, wall_ms });
    }
}

fn run_gen(ctx: &mut Ctx<'_>, src: &Source) {
    let cond = condition_profile(&src.inst);
    ctx.push(
        "instance",
        src.params.clone(),
        json!({
            "blue": to_graph6(src.inst.blue()),
            "red": to_graph6(src.inst.red()),
            "delta1": src.inst.delta1(),
            "delta2": src.inst.delta2(),
            "conditions": cond,
        }),
    );
}

fn run_pack(ctx: &mut Ctx<'_>, src: &Source, with_audits: bool) -> Result<()> {
    let cfg = ctx.cfg;
    let inst = &src.inst;
    let stream_seed = cfg.seed ^ (src.index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let opts = SolveOptions { policy: cfg.policy, max_swaps: None };
    let out = solve_multistart(inst, cfg.restarts, stream_seed, &opts)?;
    let n = inst.n();
    let (d1, d2) = (inst.delta1(), inst.delta2());

    let mut ok = ctx.tally.check("packed_is_packing", out.status != SolveStatus::Packed || is_packing(inst, &out.final_labelling));
    ok &= ctx.tally.check("trace_replays", out.replay_ok(inst));
    if let Some(cert) = &out.stuck_certificate {
        ok &= ctx.tally.check("certificate_links", cert.claim31_ok && cert.claim32_ok);
    }
    if sauer_spencer_condition(n, d1, d2) {
        ok &= ctx.tally.check("sauer_spencer_packed", out.status == SolveStatus::Packed);
    }
    if bec_condition(n, d1, d2) {
        ok &= ctx.tally.check("bec_near_packed", out.purple_final.max_purple_degree <= 1);
    }
    *ctx.tally.statuses.entry(out.status.as_str().to_string()).or_default() += 1;

    let mut params = src.params.clone();
    params["restarts"] = json!(cfg.restarts);
    params["solve_seed"] = json!(stream_seed);
    params["policy"] = json!(cfg.policy);
    let mut outcome = json!({
        "status": out.status,
        "purple_initial": out.purple_initial,
        "purple_final": out.purple_final.count,
        "max_purple_degree": out.purple_final.max_purple_degree,
        "swaps": out.swap_trace.len(),
        "certificate": out.stuck_certificate,
        "summary": out.summary(),
    });
    if !ok {
        outcome["replay"] = replay_payload(inst, Some(out.initial_labelling.perm()));
    }
    ctx.push("pack", params.clone(), outcome);

    if with_audits {
        if let Some((u, v)) = out.purple_final.purple_edges.first().copied() {
            let an = Analyzer::new(inst, &out.final_labelling)?;
            let girth = an.flags();
            let supported =
                girth.blue_even_girth_ok && girth.red_even_girth_ok && girth.blue_c4_free && girth.red_c4_free;
            let cert_ok = out.stuck_certificate.as_ref().is_some_and(|c| c.claim31_ok && c.claim32_ok);
            for &t in &cfg.t_grid {
                let a42 = an.audit_claim42(u, v, t)?;
                let nb = an.audit_nbound(u, v, t)?;
                let mut good = true;
                if supported && cert_ok {
                    good &= ctx.tally.check("claim42_bounded", a42.all_bounded);
                }
                if cert_ok {
                    good &= ctx.tally.check("nbound_cover", nb.uncovered.iter().all(|&w| w == v));
                }
                let mut p = params.clone();
                p["t"] = json!(t);
                p["u"] = json!(u);
                p["v"] = json!(v);
                let mut o = json!({ "claim42": a42, "nbound": nb, "supported": supported });
                if !good {
                    o["replay"] = replay_payload(inst, Some(out.final_labelling.perm()));
                }
                ctx.push("stuck-audit", p, o);
            }
        }
        if n <= cfg.oracle_limit {
            let exact = exact_pack(inst, &ExactConfig { limit: cfg.oracle_limit, node_budget: None })?;
            let mut good = ctx.tally.check("oracle_agrees_packed", out.status != SolveStatus::Packed || exact.packable);
            good &= ctx.tally.check("oracle_not_above_solver", exact.min_purple <= out.purple_final.count);
            let mut o = json!({
                "packable": exact.packable,
                "min_purple": exact.min_purple,
                "nodes": exact.nodes_explored,
                "solver_purple": out.purple_final.count,
            });
            if !good {
                o["replay"] = replay_payload(inst, Some(out.initial_labelling.perm()));
            }
            ctx.push("oracle-check", params, o);
        }
    }
    Ok(())
}

fn run_exact(ctx: &mut Ctx<'_>, src: &Source) -> Result<()> {
    let cfg = ctx.cfg;
    let inst = &src.inst;
    let exact = exact_pack(inst, &ExactConfig { limit: cfg.oracle_limit, node_budget: None })?;
    let mut outcome = json!({
        "packable": exact.packable,
        "min_purple": exact.min_purple,
        "lower_bound": exact.lower_bound,
        "complete": exact.complete,
        "nodes": exact.nodes_explored,
        "witness": exact.witness,
    });
    if inst.n() <= ENUMERATION_LIMIT {
        let optima = min_purple_labellings(inst)?;
        let plain = crate::model::purple_report(inst, &optima[0]).count;
        if !ctx.tally.check("bnb_equals_exhaustive", plain == exact.min_purple) {
            outcome["replay"] = replay_payload(inst, None);
        }
        outcome["optima"] = json!(optima.len());
    }
    ctx.push("pack-exact", src.params.clone(), outcome);
    Ok(())
}

fn run_audit(ctx: &mut Ctx<'_>, src: &Source) -> Result<()> {
    let lab = restart_labelling(src.inst.n(), ctx.cfg.seed, src.index as u64);
    audit_labelled(ctx, src, &lab)
}

fn audit_labelled(ctx: &mut Ctx<'_>, src: &Source, lab: &Labelling) -> Result<()> {
    let cfg = ctx.cfg;
    let inst = &src.inst;
    let n = inst.n();
    if n < 2 {
        return Ok(());
    }
    let an = Analyzer::new(inst, lab)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    rng.set_stream(src.index as u64);
    let (d1, d2) = (inst.delta1(), inst.delta2());
    for _ in 0..cfg.pairs {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        for &t in &cfg.t_grid {
            let audit = an.audit_claim41(a, b, t)?;
            let mut good = true;
            for m in [&audit.primary, &audit.symmetric] {
                if m.supported {
                    good &= ctx.tally.check("claim41_holds", m.holds);
                    good &= ctx.tally.check("q_t_bound", m.q_t_size as f64 <= m.q_t_bound);
                    good &= ctx.tally.check("parts_cover", m.partition_covers());
                }
            }
            let params = json!({ "index": src.index, "a": a, "b": b, "t": t, "seed": cfg.seed });
            let mut outcome = json!({
                "holds": audit.holds(),
                "lhs": audit.primary.lhs,
                "rhs": audit.primary.rhs,
                "symmetric_lhs": audit.symmetric.lhs,
                "symmetric_rhs": audit.symmetric.rhs,
                "q_t_size": audit.primary.q_t_size,
                "r_t_size": audit.primary.r_t_size,
                "d_t_size": audit.primary.d_t_size,
                "a_overlap_ok": audit.primary.a_overlap_ok && audit.symmetric.a_overlap_ok,
                "d_t_inner_a": audit.primary.d_t_inner_a.max(audit.symmetric.d_t_inner_a),
                "supported": audit.primary.supported && audit.symmetric.supported,
                "delta1": d1,
                "delta2": d2,
            });
            if !good {
                outcome["replay"] = replay_payload(inst, Some(lab.perm()));
            }
            ctx.push("audit", params, outcome);
        }
    }
    Ok(())
}

fn run_constants(cfg: &ExperimentConfig, tally: &mut Tally) -> Result<Vec<ResultRecord>> {
    cfg.t_grid
        .iter()
        .map(|&t| {
            let r = thresholds(t)?;
            tally.check("roots_positive", r.delta1_root > 0.0 && r.delta2_root > 0.0);
            Ok(ResultRecord {
                kind: "constants".into(),
                digest: String::new(),
                params: json!({ "t": t }),
                outcome: json!({ "c_t": c_t(t), "delta2_root": r.delta2_root, "delta1_root": r.delta1_root }),
                wall_ms: None,
            })
        })
        .collect()
}

fn process(cfg: &ExperimentConfig, src: &Source) -> Result<(Vec<ResultRecord>, Tally)> {
    let mut ctx = Ctx {
        cfg,
        records: Vec::new(),
        tally: Tally::default(),
        digest: instance_digest(&src.inst),
        started: std::time::Instant::now(),
    };
    match cfg.kind {
        ExperimentKind::Gen => run_gen(&mut ctx, src),
        ExperimentKind::Pack => run_pack(&mut ctx, src, false)?,
        ExperimentKind::Campaign => run_pack(&mut ctx, src, true)?,
        ExperimentKind::PackExact => run_exact(&mut ctx, src)?,
        ExperimentKind::Audit => run_audit(&mut ctx, src)?,
        ExperimentKind::Constants => unreachable!("constants do not iterate instances"),
    }
    Ok((ctx.records, ctx.tally))
}

/// Runs the configured pipeline and returns the sorted records with a summary.
pub fn run_campaign(cfg: &ExperimentConfig) -> Result<CampaignOutput> {
    cfg.validate()?;
    let mut tally = Tally::default();
    let (records, instances) = if cfg.kind == ExperimentKind::Constants {
        (run_constants(cfg, &mut tally)?, 0)
    } else {
        let srcs = sources(cfg)?;
        let work = || srcs.par_iter().map(|s| process(cfg, s)).collect::<Result<Vec<_>>>();
        let results = match cfg.workers {
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?
                .install(work)?,
            None => work()?,
        };
        let mut records = Vec::new();
        for (r, t) in results {
            records.extend(r);
            tally.merge(t);
        }
        (records, srcs.len())
    };
    Ok(summarize(cfg, instances, records, tally))
}

fn summarize(cfg: &ExperimentConfig, instances: usize, mut records: Vec<ResultRecord>, tally: Tally) -> CampaignOutput {
    records.sort_by_cached_key(|r| r.to_line());
    let summary = CampaignSummary {
        kind: "summary".into(),
        experiment: cfg.kind.as_str().into(),
        instances,
        records: records.len(),
        properties: tally.props,
        statuses: tally.statuses,
        violations: tally.violations,
    };
    CampaignOutput { records, summary }
}

/// Audits `pairs` seeded random label pairs of one instance under a given
/// labelling, for every `t` in the grid.
pub fn audit_instance(
    inst: &PackingInstance,
    lab: &Labelling,
    t_grid: &[u32],
    pairs: usize,
    seed: u64,
) -> Result<CampaignOutput> {
    if lab.n() != inst.n() {
        return Err(Error::SizeMismatch(lab.n(), inst.n()));
    }
    let cfg = ExperimentConfig { kind: ExperimentKind::Audit, t_grid: t_grid.to_vec(), pairs, seed, ..Default::default() };
    cfg.validate()?;
    let src = Source { index: 0, inst: inst.clone(), params: json!({ "index": 0 }) };
    let mut ctx = Ctx {
        cfg: &cfg,
        records: Vec::new(),
        tally: Tally::default(),
        digest: instance_digest(inst),
        started: std::time::Instant::now(),
    };
    audit_labelled(&mut ctx, &src, lab)?;
    let Ctx { records, tally, .. } = ctx;
    Ok(summarize(&cfg, 1, records, tally))
}

/// Solves one instance file from its stored labelling or the identity.
pub fn solve_file(path: &Path, opts: &SolveOptions) -> Result<crate::solver::SolveOutcome> {
    let file = read_instance_file(path)?;
    let inst = PackingInstance::new(file.blue, file.red)?;
    let init = file.perm.unwrap_or_else(|| Labelling::identity(inst.n()));
    solve(&inst, &init, opts)
}
