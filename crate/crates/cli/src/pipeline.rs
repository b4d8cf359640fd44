//! Per-network work shared by the subcommands: clean, build, label, evaluate.

use std::collections::{BTreeMap, BTreeSet};

use glass_core::congress::{Chamber, Party};
use glass_core::metrics::{confusion_matrix, f1_score, macro_f1, separation_gap, standardise_probs, ConfusionMatrix};
use glass_core::{glass_run, ClassCount, GlassOptions, GlassResult, Label, NodeId, WeightedGraph};
use glass_rollcall::{
    apply_cleaning_rules, build_vote_network, network_shape, truth_labels, CleanRollCallDataset, CleaningOptions,
    LeadersConfig, NetworkKey, NetworkShape, RawNetworkData,
};
use serde::Serialize;

use crate::config::{MSource, RunConfig};
use crate::error::{CliError, CliResult};

/// A cleaned network ready for labelling.
pub struct Prepared {
    pub key: NetworkKey,
    pub dataset: CleanRollCallDataset,
    pub graph: WeightedGraph,
    pub truth: BTreeMap<NodeId, Label>,
}

pub fn prepare(
    key: NetworkKey,
    raw: &RawNetworkData,
    leaders: &LeadersConfig,
    opts: &CleaningOptions,
) -> CliResult<Prepared> {
    let dataset = apply_cleaning_rules(key, raw, leaders, opts)?;
    let graph = build_vote_network(&dataset)?;
    let truth = truth_labels(&dataset);
    Ok(Prepared { key, dataset, graph, truth })
}

/// Democrats are `K1`, so `m` counts Republicans.
pub fn party_options(cfg: &RunConfig) -> GlassOptions {
    GlassOptions {
        filter: cfg.filter,
        break_ties: cfg.break_ties,
        ..GlassOptions::new(Party::Democrat.label(), Party::Republican.label())
    }
}

pub fn class_count(m: MSource, truth: &BTreeMap<NodeId, Label>) -> ClassCount {
    match m {
        MSource::Explicit(m) => ClassCount::Fixed(m),
        MSource::TrueCount => ClassCount::FromTruth(truth.clone()),
    }
}

/// Scores of one labelling against the withheld labels of the nodes it
/// classified. Undefined scores are `None` and explained in `warnings`.
#[derive(Debug, Clone, Serialize)]
pub struct Evaluation {
    pub evaluated: usize,
    pub k1: Label,
    pub positive: Label,
    pub confusion: ConfusionMatrix,
    /// F1 with `K1` as the positive class.
    pub f1_k1_pos: Option<f64>,
    pub f1_k2_pos: Option<f64>,
    pub macro_f1: Option<f64>,
    /// Separation of the standardised `P(K1)` between true `K1` and `K2` nodes.
    pub gap: Option<f64>,
    pub warnings: Vec<String>,
}

impl Evaluation {
    /// F1 for the configured positive class.
    pub fn f1(&self) -> Option<f64> {
        if self.positive == self.k1 {
            self.f1_k1_pos
        } else {
            self.f1_k2_pos
        }
    }
}

pub fn evaluate(result: &GlassResult, truth: &BTreeMap<NodeId, Label>, positive: &Label) -> CliResult<Evaluation> {
    let dist = &result.distribution;
    let (k1, k2) = (&dist.k1, &dist.k2);
    if positive != k1 && positive != k2 {
        return Err(CliError::User(format!("positive class `{positive}` is neither {k1} nor {k2}")));
    }
    let mut scoped = BTreeMap::new();
    for id in result.estimates.keys() {
        let l = truth.get(id).ok_or_else(|| CliError::Data(format!("no true label for node {id}")))?;
        scoped.insert(id.clone(), l.clone());
    }
    let mut warnings = Vec::new();
    let mut note = |what: &str, e: glass_core::Error| {
        warnings.push(format!("{what}: {e}"));
        None
    };
    let cm_k1 = confusion_matrix(&result.estimates, &scoped, k1)?;
    let f1_k1_pos = f1_score(&cm_k1).map_or_else(|e| note("F1 (K1 positive)", e), Some);
    let f1_k2_pos = f1_score(&cm_k1.flipped()).map_or_else(|e| note("F1 (K2 positive)", e), Some);
    let macro_f1 = macro_f1(&cm_k1).map_or_else(|e| note("macro-F1", e), Some);

    let groups: Vec<Label> = dist.nodes.iter().map(|id| scoped[id].clone()).collect();
    let gap = standardise_probs(&dist.p_k1, &groups)
        .and_then(|z| separation_gap(&z, &groups, k1))
        .map_or_else(|e| note("gap", e), Some);

    let confusion = if positive == k1 { cm_k1 } else { cm_k1.flipped() };
    Ok(Evaluation {
        evaluated: scoped.len(),
        positive: positive.clone(),
        k1: k1.clone(),
        confusion,
        f1_k1_pos,
        f1_k2_pos,
        macro_f1,
        gap,
        warnings,
    })
}

/// One row of the batch report. Failed networks carry `error` and no scores.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub congress: u32,
    pub chamber: Chamber,
    pub n: Option<usize>,
    pub u: Option<usize>,
    pub ell: Option<usize>,
    pub m: Option<usize>,
    pub f1_dem_pos: Option<f64>,
    pub f1_rep_pos: Option<f64>,
    pub macro_f1: Option<f64>,
    pub gap: Option<f64>,
    pub stranded_count: Option<usize>,
    pub filtered_count: Option<usize>,
    pub confusion: Option<ConfusionMatrix>,
    pub shape: Option<NetworkShape>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

impl ReportRow {
    pub fn failed(key: NetworkKey, error: &CliError) -> Self {
        ReportRow {
            congress: key.congress,
            chamber: key.chamber,
            n: None,
            u: None,
            ell: None,
            m: None,
            f1_dem_pos: None,
            f1_rep_pos: None,
            macro_f1: None,
            gap: None,
            stranded_count: None,
            filtered_count: None,
            confusion: None,
            shape: None,
            warnings: Vec::new(),
            error: Some(error.to_string()),
        }
    }

    pub fn key(&self) -> NetworkKey {
        NetworkKey::new(self.congress, self.chamber)
    }

    /// F1 for the configured positive class.
    pub fn f1(&self, positive: Party) -> Option<f64> {
        match positive {
            Party::Democrat => self.f1_dem_pos,
            Party::Republican => self.f1_rep_pos,
        }
    }
}

/// Everything computed for one network.
pub struct Analysis {
    pub prepared: Prepared,
    pub result: GlassResult,
    pub evaluation: Evaluation,
}

impl Analysis {
    pub fn row(&self) -> ReportRow {
        let g = &self.prepared.graph;
        let e = &self.evaluation;
        let mut warnings = self.result.warnings.clone();
        warnings.extend(e.warnings.iter().cloned());
        ReportRow {
            congress: self.prepared.key.congress,
            chamber: self.prepared.key.chamber,
            n: Some(g.node_count()),
            u: Some(g.unlabelled_count()),
            ell: Some(g.labelled_count()),
            m: Some(self.result.m),
            f1_dem_pos: e.f1_k1_pos,
            f1_rep_pos: e.f1_k2_pos,
            macro_f1: e.macro_f1,
            gap: e.gap,
            stranded_count: Some(self.result.stranded.len()),
            filtered_count: Some(self.result.filtered_out.len()),
            confusion: Some(e.confusion),
            shape: Some(network_shape(&self.prepared.dataset)),
            warnings,
            error: None,
        }
    }
}

pub fn analyse(prepared: Prepared, cfg: &RunConfig) -> CliResult<Analysis> {
    let count = class_count(cfg.m, &prepared.truth);
    let result = glass_run(&prepared.graph, &count, &party_options(cfg))?;
    let evaluation = evaluate(&result, &prepared.truth, &cfg.positive.label())?;
    Ok(Analysis { prepared, result, evaluation })
}

/// Reads the data files once for every selected network.
pub fn load_raw(cfg: &RunConfig) -> CliResult<BTreeMap<NetworkKey, RawNetworkData>> {
    let data = cfg.data.as_ref().ok_or_else(|| CliError::User("no roll-call data configured".into()))?;
    let wanted: BTreeSet<NetworkKey> = cfg.networks.iter().copied().collect();
    Ok(data.files().load(&wanted)?)
}

/// Nodes scored in both runs, with `P(K1)` from each.
pub fn paired_probabilities(a: &GlassResult, b: &GlassResult) -> Vec<(NodeId, f64, f64)> {
    let (da, db) = (&a.distribution, &b.distribution);
    da.nodes
        .iter()
        .zip(&da.p_k1)
        .filter_map(|(id, pa)| db.prob_k1(id).map(|pb| (id.clone(), *pa, pb)))
        .collect()
}
