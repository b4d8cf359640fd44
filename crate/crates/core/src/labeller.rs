//! Binary labelling from absorption probabilities.
//!
//! The class probability of an unlabelled node is the total absorption
//! probability into absorbing states carrying that class. Nodes are ranked by
//! `P(K1)`; the `m`-th smallest value is the threshold `alpha`, nodes strictly
//! above it become `K1` and the rest `K2`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use log::warn;
use serde::{Serialize, Serializer};

use crate::chain::{self, AbsorbingChain, AbsorptionResult};
use crate::error::{Error, Result};
use crate::graph::{reachable_to_labelled, Label, NodeId, WeightedGraph};
use crate::numfmt::sig6;

/// Per-node `P(Y = K1)` and `P(Y = K2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelDistribution {
    pub k1: Label,
    pub k2: Label,
    pub nodes: Vec<NodeId>,
    pub p_k1: Vec<f64>,
    pub p_k2: Vec<f64>,
}

impl LabelDistribution {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn prob_k1(&self, id: &NodeId) -> Option<f64> {
        self.nodes.binary_search(id).ok().map(|i| self.p_k1[i])
    }
}

/// Sums each row of `H` over the absorbing columns of each class.
pub fn label_distribution(
    result: &AbsorptionResult,
    labels_of_absorbing: &BTreeMap<NodeId, Label>,
    k1: &Label,
    k2: &Label,
) -> Result<LabelDistribution> {
    let mut is_k1 = Vec::with_capacity(result.absorbing.len());
    for id in &result.absorbing {
        let label = labels_of_absorbing
            .get(id)
            .ok_or_else(|| Error::UnlabelledAbsorbing(id.clone()))?;
        if label == k1 {
            is_k1.push(true);
        } else if label == k2 {
            is_k1.push(false);
        } else {
            return Err(Error::UnexpectedLabel { found: label.clone(), k1: k1.clone(), k2: k2.clone() });
        }
    }
    let u = result.transient.len();
    let mut p_k1 = Vec::with_capacity(u);
    let mut p_k2 = Vec::with_capacity(u);
    for i in 0..u {
        let (mut a, mut b) = (0.0, 0.0);
        for (h, first) in result.h.row(i).iter().zip(&is_k1) {
            if *first {
                a += h;
            } else {
                b += h;
            }
        }
        p_k1.push(a);
        p_k2.push(b);
    }
    Ok(LabelDistribution { k1: k1.clone(), k2: k2.clone(), nodes: result.transient.clone(), p_k1, p_k2 })
}

/// Optional exclusion of nodes with unusually long expected absorption times.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum FilterPolicy {
    #[default]
    Off,
    /// Drop nodes with `t > Q3 + k * IQR`.
    Iqr(f64),
}

impl fmt::Display for FilterPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterPolicy::Off => f.write_str("off"),
            FilterPolicy::Iqr(k) => write!(f, "iqr:{k}"),
        }
    }
}

impl FromStr for FilterPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("off") {
            return Ok(FilterPolicy::Off);
        }
        match s.split_once(':') {
            Some((name, k)) if name.eq_ignore_ascii_case("iqr") => {
                let k: f64 = k.parse().map_err(|_| format!("bad iqr multiplier `{k}`"))?;
                if k < 0.0 || !k.is_finite() {
                    return Err(format!("iqr multiplier must be finite and >= 0, got {k}"));
                }
                Ok(FilterPolicy::Iqr(k))
            }
            _ => Err(format!("unknown filter policy `{s}` (expected `off` or `iqr:<k>`)")),
        }
    }
}

impl Serialize for FilterPolicy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Linear-interpolation sample quantile of sorted data (the "type 7"
/// definition).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Indices of the nodes retained under `policy`.
pub fn filter_by_time(times: &[f64], policy: FilterPolicy) -> Vec<usize> {
    match policy {
        FilterPolicy::Off => (0..times.len()).collect(),
        FilterPolicy::Iqr(k) => {
            if times.is_empty() {
                return Vec::new();
            }
            let mut sorted = times.to_vec();
            sorted.sort_by(f64::total_cmp);
            let q1 = quantile(&sorted, 0.25);
            let q3 = quantile(&sorted, 0.75);
            let fence = q3 + k * (q3 - q1);
            (0..times.len()).filter(|&i| times[i] <= fence).collect()
        }
    }
}

/// The classification threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Threshold {
    /// `m = 0`: every node is `K1`.
    NegInfinity,
    At(f64),
}

impl Threshold {
    pub fn value(self) -> f64 {
        match self {
            Threshold::NegInfinity => f64::NEG_INFINITY,
            Threshold::At(a) => a,
        }
    }
}

/// The `m`-th smallest of `probs` (1-indexed); input order does not matter.
pub fn threshold_alpha(probs: &[f64], m: usize) -> Result<Threshold> {
    if m > probs.len() {
        return Err(Error::ClassCountOutOfRange { m, u: probs.len() });
    }
    if m == 0 {
        return Ok(Threshold::NegInfinity);
    }
    let mut sorted = probs.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Threshold::At(sorted[m - 1]))
}

/// `K1` iff `P(K1) > alpha`, otherwise `K2`.
pub fn classify(dist: &LabelDistribution, alpha: Threshold) -> BTreeMap<NodeId, Label> {
    let a = alpha.value();
    dist.nodes
        .iter()
        .zip(&dist.p_k1)
        .map(|(id, &p)| (id.clone(), if p > a { dist.k1.clone() } else { dist.k2.clone() }))
        .collect()
}

/// How many retained nodes should receive `K2`.
#[derive(Debug, Clone)]
pub enum ClassCount {
    Fixed(usize),
    /// Count the true `K2` nodes among those retained.
    FromTruth(BTreeMap<NodeId, Label>),
}

#[derive(Debug, Clone, Serialize)]
pub struct GlassOptions {
    pub k1: Label,
    pub k2: Label,
    pub filter: FilterPolicy,
    /// Resolve ties at `alpha` by node order so exactly `m` nodes get `K2`.
    pub break_ties: bool,
}

impl GlassOptions {
    pub fn new(k1: impl Into<Label>, k2: impl Into<Label>) -> Self {
        GlassOptions { k1: k1.into(), k2: k2.into(), filter: FilterPolicy::Off, break_ties: false }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GlassResult {
    pub distribution: LabelDistribution,
    pub alpha: Threshold,
    /// Requested `K2` count among the retained nodes.
    pub m: usize,
    pub estimates: BTreeMap<NodeId, Label>,
    /// Removed by the time filter.
    pub filtered_out: BTreeSet<NodeId>,
    /// Unlabelled nodes with no path to a labelled node.
    pub stranded: BTreeSet<NodeId>,
    /// Expected absorption times before filtering.
    pub times: BTreeMap<NodeId, f64>,
    /// Nodes whose `P(K1)` equals `alpha` when the count contract broke.
    pub tie_set: Vec<NodeId>,
    pub warnings: Vec<String>,
}

impl GlassResult {
    fn empty(opts: &GlassOptions, stranded: BTreeSet<NodeId>) -> Self {
        GlassResult {
            distribution: LabelDistribution {
                k1: opts.k1.clone(),
                k2: opts.k2.clone(),
                nodes: Vec::new(),
                p_k1: Vec::new(),
                p_k2: Vec::new(),
            },
            alpha: Threshold::NegInfinity,
            m: 0,
            estimates: BTreeMap::new(),
            filtered_out: BTreeSet::new(),
            stranded,
            times: BTreeMap::new(),
            tie_set: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn count_of(&self, label: &Label) -> usize {
        self.estimates.values().filter(|l| *l == label).count()
    }

    /// Writes `node,prob_K1,t,estimate` for every retained node.
    pub fn write_node_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["node", "prob_K1", "t", "estimate"])?;
        for (id, p) in self.distribution.nodes.iter().zip(&self.distribution.p_k1) {
            let t = self.times.get(id).copied().unwrap_or(f64::NAN);
            let est = self.estimates.get(id).map_or("", Label::as_str);
            w.write_record([id.as_str(), &sig6(*p), &sig6(t), est])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Full pipeline: chain, times, optional filter, absorption probabilities,
/// class distribution, threshold, classification.
///
/// Unlabelled nodes that cannot reach a labelled node are excluded up front
/// and reported in [`GlassResult::stranded`].
pub fn glass_run(graph: &WeightedGraph, count: &ClassCount, opts: &GlassOptions) -> Result<GlassResult> {
    let mut stranded = reachable_to_labelled(graph).stranded;
    let mut working = if stranded.is_empty() { graph.clone() } else { graph.without_nodes(&stranded) };
    if working.unlabelled_count() == 0 {
        if let ClassCount::Fixed(m) = count {
            if *m > 0 {
                return Err(Error::ClassCountOutOfRange { m: *m, u: 0 });
            }
        }
        return Ok(GlassResult::empty(opts, stranded));
    }

    let mut chain = AbsorbingChain::from_graph(&working)?;
    let first_times = chain::expected_absorption_times(&chain)?;
    let times: BTreeMap<NodeId, f64> = chain.transient().iter().cloned().zip(first_times.iter().copied()).collect();

    let retained = filter_by_time(&first_times, opts.filter);
    let mut filtered_out = BTreeSet::new();
    if retained.len() < chain.transient().len() {
        let keep: BTreeSet<usize> = retained.into_iter().collect();
        filtered_out = chain
            .transient()
            .iter()
            .enumerate()
            .filter(|(i, _)| !keep.contains(i))
            .map(|(_, id)| id.clone())
            .collect();
        working = working.without_nodes(&filtered_out);
        // removing nodes can cut others off from every labelled node
        let cut = reachable_to_labelled(&working).stranded;
        if !cut.is_empty() {
            working = working.without_nodes(&cut);
            stranded.extend(cut);
        }
        if working.unlabelled_count() == 0 {
            let mut r = GlassResult::empty(opts, stranded);
            r.filtered_out = filtered_out;
            r.times = times;
            return Ok(r);
        }
        chain = AbsorbingChain::from_graph(&working)?;
    }

    let absorption = chain::solve(&chain)?;
    let distribution = label_distribution(&absorption, working.labels(), &opts.k1, &opts.k2)?;

    let m = match count {
        ClassCount::Fixed(m) => *m,
        ClassCount::FromTruth(truth) => {
            let mut m = 0;
            for id in &distribution.nodes {
                let l = truth.get(id).ok_or_else(|| Error::MissingTruth(id.clone()))?;
                if *l == opts.k2 {
                    m += 1;
                }
            }
            m
        }
    };
    let alpha = threshold_alpha(&distribution.p_k1, m)?;
    let mut estimates = classify(&distribution, alpha);

    let mut warnings = Vec::new();
    let mut tie_set = Vec::new();
    let assigned_k2 = estimates.values().filter(|l| **l == opts.k2).count();
    if assigned_k2 != m {
        let a = alpha.value();
        tie_set = distribution
            .nodes
            .iter()
            .zip(&distribution.p_k1)
            .filter(|(_, p)| **p == a)
            .map(|(id, _)| id.clone())
            .collect();
        let msg = format!(
            "{} node(s) tie at alpha = {a}; {assigned_k2} labelled {} but {m} requested",
            tie_set.len(),
            opts.k2
        );
        warn!("{msg}");
        warnings.push(msg);
        if opts.break_ties {
            let below = assigned_k2 - tie_set.len();
            for (rank, id) in tie_set.iter().enumerate() {
                let l = if rank < m - below { &opts.k2 } else { &opts.k1 };
                estimates.insert(id.clone(), l.clone());
            }
        }
    }

    Ok(GlassResult { distribution, alpha, m, estimates, filtered_out, stranded, times, tie_set, warnings })
}
