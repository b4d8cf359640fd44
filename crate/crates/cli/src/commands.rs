//! The six subcommands.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;

use glass_core::chain::{self, AbsorbingChain, WalkSampler};
use glass_core::congress::Chamber;
use glass_core::graph::{build_graph, read_edge_list, read_labels, write_edge_list, write_labels};
use glass_core::metrics::{pearson, spearman};
use glass_core::numfmt::sig6;
use glass_core::regression::{design_matrix, ols_fit_with, significance_report, Aliasing, Model, TermSignificance};
use glass_core::{glass_run, ClassCount, GlassOptions, GlassResult, Label, NodeId, WeightedGraph};
use glass_rollcall::{
    apply_cleaning_rules, ingest_stats, network_shape, CleaningReport, NetworkKey, NetworkShape, RawNetworkData, Stage,
};
use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{MSource, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{input_digests, OutputDir};
use crate::pipeline::{analyse, evaluate, load_raw, paired_probabilities, prepare, Analysis, Evaluation, ReportRow};

/// Longest simulated walk before it counts as a timeout.
const MAX_WALK_STEPS: u64 = 10_000_000;

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let inputs = input_digests(cfg)?;
    let mut out = OutputDir::create(&cfg.out_dir)?;
    let outcome = match cfg.command.as_str() {
        "ingest" => ingest(cfg, &mut out),
        "label" => label(cfg, &mut out),
        "batch" => batch(cfg, &mut out),
        "sensitivity" => sensitivity(cfg, &mut out),
        "regress" => regress(cfg, &mut out),
        "stats" => stats(cfg, &mut out),
        other => Err(CliError::User(format!("unknown command `{other}`"))),
    };
    out.finish(cfg, &inputs)?;
    outcome
}

fn thread_pool(cfg: &RunConfig) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Data(format!("cannot start worker threads: {e}")))
}

/// Runs `work` on every selected network in parallel, in network order.
fn per_network<T, F>(cfg: &RunConfig, raw: &BTreeMap<NetworkKey, RawNetworkData>, work: F) -> CliResult<Vec<(NetworkKey, CliResult<T>)>>
where
    T: Send,
    F: Fn(NetworkKey, &RawNetworkData) -> CliResult<T> + Sync,
{
    let pool = thread_pool(cfg)?;
    Ok(pool.install(|| {
        cfg.networks
            .par_iter()
            .map(|&key| {
                let res = raw
                    .get(&key)
                    .ok_or_else(|| CliError::Data(format!("{key}: no data loaded")))
                    .and_then(|r| work(key, r));
                if let Err(e) = &res {
                    warn!("{key}: {e}");
                }
                (key, res)
            })
            .collect()
    }))
}

fn failures_to_error(failed: &[(NetworkKey, String)], total: usize) -> CliResult<()> {
    if failed.is_empty() {
        return Ok(());
    }
    let list: Vec<String> = failed
        .iter()
        .map(|(k, e)| if e.starts_with(&k.to_string()) { e.clone() } else { format!("{k}: {e}") })
        .collect();
    Err(CliError::Data(format!("{} of {total} network(s) failed\n  {}", failed.len(), list.join("\n  "))))
}

fn opt6(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}

fn shapes_csv(shapes: &[(NetworkKey, NetworkShape)], buf: &mut Vec<u8>) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(buf);
    w.write_record([
        "congress", "chamber", "members", "democrats", "republicans", "democrat_leaders", "republican_leaders", "rollcalls",
    ])?;
    for (key, s) in shapes {
        w.write_record([
            key.congress.to_string(),
            key.chamber.to_string(),
            s.members.to_string(),
            s.democrats.to_string(),
            s.republicans.to_string(),
            s.democrat_leaders.to_string(),
            s.republican_leaders.to_string(),
            s.rollcalls.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------- ingest

fn ingest(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<()> {
    let leaders = cfg.leaders_config()?;
    let opts = cfg.cleaning_options();
    let raw = load_raw(cfg)?;
    let results = per_network(cfg, &raw, |key, r| {
        let p = prepare(key, r, &leaders, &opts)?;
        let mut edges = Vec::new();
        write_edge_list(&p.graph, &mut edges)?;
        let mut labels = Vec::new();
        write_labels(p.graph.labels(), &mut labels)?;
        let mut truth = Vec::new();
        write_labels(&p.truth, &mut truth)?;
        let mut members = Vec::new();
        {
            let mut w = csv::Writer::from_writer(&mut members);
            w.write_record(["member_id", "party", "name", "state", "leader"])?;
            for m in p.dataset.members.values() {
                let leader = p.dataset.leader_labels.contains_key(&m.member_id);
                w.write_record([
                    m.member_id.to_string(),
                    m.party.to_string(),
                    m.name.clone(),
                    m.state.clone(),
                    leader.to_string(),
                ])?;
            }
            w.flush()?;
        }
        let shape = network_shape(&p.dataset);
        Ok((edges, labels, truth, members, ingest_stats(&p.dataset), shape))
    })?;

    let mut failed = Vec::new();
    let mut shapes = Vec::new();
    for (key, res) in results {
        match res {
            Ok((edges, labels, truth, members, report, s)) => {
                out.write_bytes(&format!("{key}/edges.csv"), &edges)?;
                out.write_bytes(&format!("{key}/labels.csv"), &labels)?;
                out.write_bytes(&format!("{key}/truth.csv"), &truth)?;
                out.write_bytes(&format!("{key}/members.csv"), &members)?;
                out.write_json(&format!("{key}/stats.json"), &report)?;
                println!(
                    "{key}: {} members ({} D + {} D leaders, {} R + {} R leaders), {} roll calls",
                    s.members, s.democrats, s.democrat_leaders, s.republicans, s.republican_leaders, s.rollcalls
                );
                shapes.push((key, s));
            }
            Err(e) => failed.push((key, e.to_string())),
        }
    }
    out.write_with("shapes.csv", |b| shapes_csv(&shapes, b))?;
    failures_to_error(&failed, cfg.networks.len())
}

// ---------------------------------------------------------------- label

#[derive(Serialize)]
struct LabelOutput<'a> {
    network: Option<String>,
    result: &'a GlassResult,
    evaluation: Option<&'a Evaluation>,
}

fn label(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<()> {
    let (key, graph, result, evaluation) = if let Some(g) = &cfg.graph {
        let edges = read_edge_list(File::open(&g.edges)?)?;
        let labels = read_labels(File::open(&g.labels)?)?;
        let truth = match &g.truth {
            Some(p) => Some(read_labels(File::open(p)?)?),
            None => None,
        };
        let (k1, k2) = class_labels(g.k1.as_deref(), g.k2.as_deref(), &labels)?;
        let graph = build_graph(edges, labels)?;
        let opts = GlassOptions { filter: cfg.filter, break_ties: cfg.break_ties, ..GlassOptions::new(k1.clone(), k2) };
        let count = match (cfg.m, &truth) {
            (MSource::Explicit(m), _) => ClassCount::Fixed(m),
            (MSource::TrueCount, Some(t)) => ClassCount::FromTruth(t.clone()),
            (MSource::TrueCount, None) => return Err(CliError::User("pass --m or --truth".into())),
        };
        let result = glass_run(&graph, &count, &opts)?;
        let evaluation = match &truth {
            Some(t) if !result.estimates.is_empty() => Some(evaluate(&result, t, &k1)?),
            _ => None,
        };
        (None, graph, result, evaluation)
    } else {
        let leaders = cfg.leaders_config()?;
        let raw = load_raw(cfg)?;
        let key = cfg.networks[0];
        let r = raw.get(&key).ok_or_else(|| CliError::Data(format!("{key}: no data loaded")))?;
        let Analysis { prepared, result, evaluation } =
            analyse(prepare(key, r, &leaders, &cfg.cleaning_options())?, cfg)?;
        (Some(key), prepared.graph, result, Some(evaluation))
    };

    out.write_with("nodes.csv", |b| Ok(result.write_node_csv(b)?))?;
    let name = key.map(|k| k.to_string());
    out.write_json("result.json", &LabelOutput { network: name.clone(), result: &result, evaluation: evaluation.as_ref() })?;

    let d = &result.distribution;
    println!(
        "{}: {} labelled, {} scored, m = {}, alpha = {}",
        name.as_deref().unwrap_or("graph"),
        graph.labelled_count(),
        d.len(),
        result.m,
        sig6(result.alpha.value())
    );
    for (what, ids) in [("stranded", &result.stranded), ("filtered", &result.filtered_out)] {
        if !ids.is_empty() {
            let list: Vec<&str> = ids.iter().map(NodeId::as_str).collect();
            println!("{what}: {}", list.join(" "));
        }
    }
    for w in &result.warnings {
        println!("warning: {w}");
    }
    if let Some(e) = &evaluation {
        let c = &e.confusion;
        println!(
            "positive {}: TP {} FP {} FN {} TN {}, F1 {}, macro-F1 {}, gap {}",
            e.positive,
            c.tp,
            c.fp,
            c.fn_,
            c.tn,
            opt6(e.f1()),
            opt6(e.macro_f1),
            opt6(e.gap)
        );
    }

    if cfg.walks > 0 {
        let mut excluded: BTreeSet<NodeId> = result.stranded.clone();
        excluded.extend(result.filtered_out.iter().cloned());
        let working = graph.without_nodes(&excluded);
        let bytes = walk_check(&working, &d.k1, cfg.walks, cfg.seed)?;
        out.write_bytes("walks.csv", &bytes)?;
        println!("walks: {} per node, seed {}", cfg.walks, cfg.seed);
    }
    Ok(())
}

/// The two classes: as given, or the two distinct labels in sorted order.
fn class_labels(k1: Option<&str>, k2: Option<&str>, labels: &BTreeMap<NodeId, Label>) -> CliResult<(Label, Label)> {
    if let (Some(a), Some(b)) = (k1, k2) {
        return Ok((Label::from(a), Label::from(b)));
    }
    let distinct: BTreeSet<&Label> = labels.values().collect();
    let mut it = distinct.iter();
    match (distinct.len(), k1, k2) {
        (2, None, None) => Ok(((*it.next().unwrap()).clone(), (*it.next().unwrap()).clone())),
        (2, Some(a), None) => {
            let other = distinct.iter().find(|l| l.as_str() != a).ok_or_else(|| CliError::User(format!("--k1 {a} is not a label")))?;
            Ok((Label::from(a), (*other).clone()))
        }
        (2, None, Some(b)) => {
            let other = distinct.iter().find(|l| l.as_str() != b).ok_or_else(|| CliError::User(format!("--k2 {b} is not a label")))?;
            Ok(((*other).clone(), Label::from(b)))
        }
        (n, ..) => Err(CliError::User(format!("expected exactly two label values, found {n}; pass --k1 and --k2"))),
    }
}

/// Simulated absorption frequencies and times next to the exact values.
fn walk_check(graph: &WeightedGraph, k1: &Label, walks: usize, seed: u64) -> CliResult<Vec<u8>> {
    let chain = AbsorbingChain::from_graph(graph)?;
    let exact = chain::solve(&chain)?;
    let is_k1: Vec<bool> = chain.absorbing().iter().map(|id| graph.label(id) == Some(k1)).collect();
    let sampler = WalkSampler::new(&chain);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(["node", "exact_prob_K1", "mc_prob_K1", "prob_se", "exact_t", "mc_t", "t_se", "timeouts"])?;
        for (i, id) in chain.transient().iter().enumerate() {
            let (mut hits, mut timeouts, mut sum, mut sumsq) = (0usize, 0usize, 0.0, 0.0);
            for _ in 0..walks {
                let (end, steps) = sampler.walk(i, &mut rng, MAX_WALK_STEPS);
                match end {
                    Some(j) => {
                        hits += usize::from(is_k1[j]);
                        let s = steps as f64;
                        sum += s;
                        sumsq += s * s;
                    }
                    None => timeouts += 1,
                }
            }
            let done = (walks - timeouts).max(1) as f64;
            let p = hits as f64 / done;
            let mean = sum / done;
            let var = if done > 1.0 { (sumsq - done * mean * mean) / (done - 1.0) } else { 0.0 };
            let exact_p: f64 = exact.h.row(i).iter().zip(&is_k1).filter(|(_, k)| **k).map(|(h, _)| h).sum();
            w.write_record([
                id.as_str().to_string(),
                sig6(exact_p),
                sig6(p),
                sig6((p * (1.0 - p) / done).sqrt()),
                sig6(exact.t[i]),
                sig6(mean),
                sig6((var.max(0.0) / done).sqrt()),
                timeouts.to_string(),
            ])?;
        }
        w.flush()?;
    }
    Ok(buf)
}

// ---------------------------------------------------------------- batch

struct BatchItem {
    row: ReportRow,
    cleaning: CleaningReport,
    probs: Vec<u8>,
}

fn batch_items(cfg: &RunConfig) -> CliResult<Vec<(NetworkKey, CliResult<BatchItem>)>> {
    let leaders = cfg.leaders_config()?;
    let opts = cfg.cleaning_options();
    let raw = load_raw(cfg)?;
    per_network(cfg, &raw, |key, r| {
        let a = analyse(prepare(key, r, &leaders, &opts)?, cfg)?;
        let mut probs = Vec::new();
        a.result.write_node_csv(&mut probs)?;
        Ok(BatchItem { row: a.row(), cleaning: ingest_stats(&a.prepared.dataset), probs })
    })
}

/// Per-network cleaning report and probability CSV of a successful network.
type BatchExtra = (NetworkKey, CleaningReport, Vec<u8>);

fn batch_rows(items: Vec<(NetworkKey, CliResult<BatchItem>)>) -> (Vec<ReportRow>, Vec<BatchExtra>) {
    let mut rows = Vec::new();
    let mut extras = Vec::new();
    for (key, res) in items {
        match res {
            Ok(item) => {
                rows.push(item.row);
                extras.push((key, item.cleaning, item.probs));
            }
            Err(e) => rows.push(ReportRow::failed(key, &e)),
        }
    }
    (rows, extras)
}

fn batch(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<()> {
    let (rows, extras) = batch_rows(batch_items(cfg)?);
    out.write_json("report.json", &rows)?;
    out.write_with("series.csv", |b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["congress", "chamber", "f1", "gap"])?;
        for r in &rows {
            w.write_record([r.congress.to_string(), r.chamber.to_string(), opt6(r.f1(cfg.positive)), opt6(r.gap)])?;
        }
        w.flush()?;
        Ok(())
    })?;
    let shapes: Vec<(NetworkKey, NetworkShape)> = rows.iter().filter_map(|r| r.shape.map(|s| (r.key(), s))).collect();
    out.write_with("shapes.csv", |b| shapes_csv(&shapes, b))?;
    let cleaning: Vec<&CleaningReport> = extras.iter().map(|(_, c, _)| c).collect();
    out.write_json("cleaning.json", &cleaning)?;
    for (key, _, probs) in &extras {
        out.write_bytes(&format!("probs/{key}.csv"), probs)?;
    }

    for chamber in [Chamber::House, Chamber::Senate] {
        let f1s: Vec<f64> = rows.iter().filter(|r| r.chamber == chamber).filter_map(|r| r.f1(cfg.positive)).collect();
        if f1s.is_empty() {
            continue;
        }
        let min = f1s.iter().copied().fold(f64::INFINITY, f64::min);
        let perfect = f1s.iter().filter(|f| **f == 1.0).count();
        println!("{chamber}: {} network(s), min F1 {}, {} with F1 = 1", f1s.len(), sig6(min), perfect);
    }
    let failed: Vec<(NetworkKey, String)> =
        rows.iter().filter_map(|r| r.error.clone().map(|e| (r.key(), e))).collect();
    failures_to_error(&failed, rows.len())
}

// ---------------------------------------------------------------- sensitivity

#[derive(Debug, Serialize)]
struct SensitivityRow {
    congress: u32,
    chamber: Chamber,
    common_nodes: Option<usize>,
    pearson: Option<f64>,
    spearman: Option<f64>,
    /// Positive-class F1 with agreeing roll calls removed.
    f1_excluding: Option<f64>,
    f1_including: Option<f64>,
    agreeing_rollcalls: Option<usize>,
    warnings: Vec<String>,
    error: Option<String>,
}

fn sensitivity(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<()> {
    let leaders = cfg.leaders_config()?;
    let raw = load_raw(cfg)?;
    let mut excl = cfg.clone();
    excl.include_agreeing = false;
    let mut incl = cfg.clone();
    incl.include_agreeing = true;
    let results = per_network(cfg, &raw, |key, r| {
        let a = analyse(prepare(key, r, &leaders, &excl.cleaning_options())?, &excl)?;
        let b = analyse(prepare(key, r, &leaders, &incl.cleaning_options())?, &incl)?;
        let pairs = paired_probabilities(&a.result, &b.result);
        let x: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.2).collect();
        let mut warnings = Vec::new();
        let mut corr = |f: fn(&[f64], &[f64]) -> glass_core::Result<f64>, name: &str| match f(&x, &y) {
            Ok(v) => Some(v),
            Err(e) => {
                warnings.push(format!("{name}: {e}"));
                None
            }
        };
        let pr = corr(pearson, "pearson");
        let sp = corr(spearman, "spearman");
        let mut csv_bytes = Vec::new();
        {
            let mut w = csv::Writer::from_writer(&mut csv_bytes);
            w.write_record(["node", "p_dem_excluding", "p_dem_including"])?;
            for (id, pa, pb) in &pairs {
                w.write_record([id.as_str(), &sig6(*pa), &sig6(*pb)])?;
            }
            w.flush()?;
        }
        let row = SensitivityRow {
            congress: key.congress,
            chamber: key.chamber,
            common_nodes: Some(pairs.len()),
            pearson: pr,
            spearman: sp,
            f1_excluding: a.evaluation.f1(),
            f1_including: b.evaluation.f1(),
            agreeing_rollcalls: Some(a.prepared.dataset.stats.agreeing_rollcalls),
            warnings,
            error: None,
        };
        Ok((row, csv_bytes))
    })?;

    let mut rows = Vec::new();
    for (key, res) in results {
        match res {
            Ok((row, bytes)) => {
                out.write_bytes(&format!("paired/{key}.csv"), &bytes)?;
                println!(
                    "{key}: pearson {}, spearman {}, F1 {} excluding / {} including agreeing roll calls",
                    opt6(row.pearson),
                    opt6(row.spearman),
                    opt6(row.f1_excluding),
                    opt6(row.f1_including)
                );
                rows.push(row);
            }
            Err(e) => rows.push(SensitivityRow {
                congress: key.congress,
                chamber: key.chamber,
                common_nodes: None,
                pearson: None,
                spearman: None,
                f1_excluding: None,
                f1_including: None,
                agreeing_rollcalls: None,
                warnings: Vec::new(),
                error: Some(e.to_string()),
            }),
        }
    }
    out.write_json("sensitivity.json", &rows)?;
    let failed: Vec<(NetworkKey, String)> = rows
        .iter()
        .filter_map(|r| r.error.clone().map(|e| (NetworkKey::new(r.congress, r.chamber), e)))
        .collect();
    failures_to_error(&failed, rows.len())
}

// ---------------------------------------------------------------- regress

#[derive(Debug, Serialize)]
pub struct FitSummary {
    pub chamber: Chamber,
    pub model: String,
    pub observations: usize,
    pub df_residual: usize,
    pub residual_std_error: f64,
    pub aliased: Vec<String>,
    pub terms: Vec<TermSignificance>,
    pub significant_terms: Vec<String>,
}

#[derive(serde::Deserialize)]
struct SeriesRow {
    congress: u32,
    chamber: Chamber,
    f1: Option<f64>,
}

fn read_series(cfg: &RunConfig) -> CliResult<BTreeMap<Chamber, BTreeMap<u32, f64>>> {
    let mut by_chamber: BTreeMap<Chamber, BTreeMap<u32, f64>> = BTreeMap::new();
    if let Some(path) = &cfg.series {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(File::open(path)?);
        for rec in rdr.deserialize::<SeriesRow>() {
            let r = rec.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            match r.f1 {
                Some(f) => {
                    by_chamber.entry(r.chamber).or_default().insert(r.congress, f);
                }
                None => warn!("{}-{}: no F1 in series, skipped", r.congress, r.chamber),
            }
        }
    } else {
        let (rows, _) = batch_rows(batch_items(cfg)?);
        for r in rows {
            match (r.f1(cfg.positive), &r.error) {
                (Some(f), _) => {
                    by_chamber.entry(r.chamber).or_default().insert(r.congress, f);
                }
                (None, Some(e)) => return Err(CliError::Data(format!("{}: {e}", r.key()))),
                (None, None) => warn!("{}: F1 undefined, skipped", r.key()),
            }
        }
    }
    Ok(by_chamber)
}

pub fn fit_models(
    records: &[glass_core::regression::ControlRecord],
    chamber: Chamber,
    f1: &BTreeMap<u32, f64>,
    level: f64,
) -> CliResult<Vec<FitSummary>> {
    let mut out = Vec::new();
    for model in [Model::FullThreeFactor, Model::Agreement(chamber)] {
        // not every party-control combination occurs, so aliased columns are dropped
        let d = design_matrix(records, f1, model)?;
        let fit = ols_fit_with(&d.x, &d.y, &d.terms, Aliasing::Drop)?;
        let terms = significance_report(&fit, level);
        out.push(FitSummary {
            chamber,
            model: model.name(),
            observations: d.y.len(),
            df_residual: fit.df_residual,
            residual_std_error: fit.residual_std_error,
            aliased: fit.aliased.clone(),
            significant_terms: terms.iter().filter(|t| t.significant).map(|t| t.term.clone()).collect(),
            terms,
        });
    }
    Ok(out)
}

fn regress(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<()> {
    let records = cfg.control_records()?;
    let series = read_series(cfg)?;
    if series.is_empty() {
        return Err(CliError::Data("F1 series is empty".into()));
    }
    let mut fits = Vec::new();
    for (chamber, f1) in &series {
        fits.extend(fit_models(&records, *chamber, f1, cfg.level)?);
    }
    out.write_json("fits.json", &fits)?;
    for f in &fits {
        println!(
            "{} {}: n = {}, residual df = {}, residual SE = {}",
            f.chamber,
            f.model,
            f.observations,
            f.df_residual,
            sig6(f.residual_std_error)
        );
        for t in &f.terms {
            println!(
                "  {:<12} {:>12} {:>12} {:>12} {:>12}{}",
                t.term,
                sig6(t.estimate),
                sig6(t.se),
                sig6(t.t),
                sig6(t.p),
                if t.significant { " *" } else { "" }
            );
        }
        if !f.aliased.is_empty() {
            println!("  aliased: {}", f.aliased.join(" "));
        }
    }
    let significant: usize = fits.iter().map(|f| f.significant_terms.len()).sum();
    println!("{significant} term(s) significant at level {}", cfg.level);
    Ok(())
}

// ---------------------------------------------------------------- stats

#[derive(Debug, Serialize)]
pub struct StageAverage {
    pub chamber: Chamber,
    pub stage: Stage,
    pub networks: usize,
    pub members_pct: f64,
    pub votes_pct: f64,
    pub rollcalls_pct: f64,
}

#[derive(Serialize)]
struct StatsOutput<'a> {
    networks: &'a [CleaningReport],
    averages: &'a [StageAverage],
    failures: &'a [(NetworkKey, String)],
}

/// Mean over networks of each stage's per-network percentage reduction.
pub fn stage_averages(reports: &[CleaningReport]) -> Vec<StageAverage> {
    let mut out = Vec::new();
    for chamber in [Chamber::House, Chamber::Senate] {
        let mine: Vec<&CleaningReport> = reports.iter().filter(|r| r.chamber == chamber).collect();
        if mine.is_empty() {
            continue;
        }
        for stage in &Stage::ALL[1..] {
            let reds: Vec<_> = mine.iter().filter_map(|r| r.reduction(*stage)).collect();
            if reds.is_empty() {
                continue;
            }
            let n = reds.len() as f64;
            out.push(StageAverage {
                chamber,
                stage: *stage,
                networks: reds.len(),
                members_pct: reds.iter().map(|r| r.members_pct).sum::<f64>() / n,
                votes_pct: reds.iter().map(|r| r.votes_pct).sum::<f64>() / n,
                rollcalls_pct: reds.iter().map(|r| r.rollcalls_pct).sum::<f64>() / n,
            });
        }
    }
    out
}

fn stats(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<()> {
    let leaders = cfg.leaders_config()?;
    let opts = cfg.cleaning_options();
    let raw = load_raw(cfg)?;
    let results = per_network(cfg, &raw, |key, r| Ok(ingest_stats(&apply_cleaning_rules(key, r, &leaders, &opts)?)))?;
    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for (key, res) in results {
        match res {
            Ok(r) => reports.push(r),
            Err(e) => failed.push((key, e.to_string())),
        }
    }
    let averages = stage_averages(&reports);
    out.write_json("stats.json", &StatsOutput { networks: &reports, averages: &averages, failures: &failed })?;
    out.write_with("stats.csv", |b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["congress", "chamber", "stage", "members", "votes", "rollcalls", "members_pct", "votes_pct", "rollcalls_pct"])?;
        for r in &reports {
            for s in &r.stages {
                let red = r.reduction(s.stage);
                let pct = |f: fn(&glass_rollcall::stats::Reduction) -> f64| red.map(|x| sig6(f(x))).unwrap_or_default();
                w.write_record([
                    r.congress.to_string(),
                    r.chamber.to_string(),
                    serde_json::to_value(s.stage)?.as_str().unwrap_or_default().to_string(),
                    s.members.to_string(),
                    s.votes.to_string(),
                    s.rollcalls.to_string(),
                    pct(|x| x.members_pct),
                    pct(|x| x.votes_pct),
                    pct(|x| x.rollcalls_pct),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    })?;
    for a in averages.iter().filter(|a| matches!(a.stage, Stage::Rule1 | Stage::Rule2)) {
        println!(
            "{} {:?}: mean reduction over {} network(s): members {}%, votes {}%, roll calls {}%",
            a.chamber,
            a.stage,
            a.networks,
            sig6(a.members_pct),
            sig6(a.votes_pct),
            sig6(a.rollcalls_pct)
        );
    }
    info!("{} cleaning report(s) written", reports.len());
    failures_to_error(&failed, cfg.networks.len())
}
