//! Evaluation against withheld labels.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Label, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// The same counts seen from the other class.
    pub fn flipped(&self) -> ConfusionMatrix {
        ConfusionMatrix { tp: self.tn, fp: self.fn_, fn_: self.fp, tn: self.tp }
    }
}

pub fn confusion_matrix(
    estimates: &BTreeMap<NodeId, Label>,
    truth: &BTreeMap<NodeId, Label>,
    positive: &Label,
) -> Result<ConfusionMatrix> {
    let mut cm = ConfusionMatrix::default();
    for (id, est) in estimates {
        let actual = truth.get(id).ok_or_else(|| Error::NodeMismatch(id.clone()))?;
        match (est == positive, actual == positive) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fp += 1,
            (false, true) => cm.fn_ += 1,
            (false, false) => cm.tn += 1,
        }
    }
    if let Some(extra) = truth.keys().find(|id| !estimates.contains_key(*id)) {
        return Err(Error::NodeMismatch(extra.clone()));
    }
    Ok(cm)
}

/// `2TP / (2TP + FP + FN)`.
pub fn f1_score(cm: &ConfusionMatrix) -> Result<f64> {
    let denom = 2 * cm.tp + cm.fp + cm.fn_;
    if denom == 0 {
        return Err(Error::UndefinedF1);
    }
    Ok(2.0 * cm.tp as f64 / denom as f64)
}

/// Mean of the two one-class F1 scores.
pub fn macro_f1(cm: &ConfusionMatrix) -> Result<f64> {
    Ok(0.5 * (f1_score(cm)? + f1_score(&cm.flipped())?))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Centres on the mean over all nodes and scales by the pooled within-group
/// standard deviation. `groups` must contain exactly two distinct labels.
pub fn standardise_probs(probs: &[f64], groups: &[Label]) -> Result<Vec<f64>> {
    if probs.len() != groups.len() {
        return Err(Error::LengthMismatch { left: probs.len(), right: groups.len() });
    }
    let mut by_group: BTreeMap<&Label, Vec<f64>> = BTreeMap::new();
    for (p, g) in probs.iter().zip(groups) {
        by_group.entry(g).or_default().push(*p);
    }
    if by_group.len() != 2 {
        return Err(Error::NotTwoGroups(by_group.len()));
    }
    let mut num = 0.0;
    let mut dof = 0.0;
    for xs in by_group.values() {
        if xs.len() > 1 {
            num += (xs.len() as f64 - 1.0) * sample_variance(xs);
            dof += xs.len() as f64 - 1.0;
        }
    }
    if dof == 0.0 {
        return Err(Error::TooFewObservations { needed: 3, got: probs.len() });
    }
    let pooled_sd = (num / dof).sqrt();
    if pooled_sd.is_nan() || pooled_sd <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let centre = mean(probs);
    Ok(probs.iter().map(|p| (p - centre) / pooled_sd).collect())
}

/// Smallest standardised score among `positive` minus the largest among the
/// other group. Positive means the two groups do not overlap.
pub fn separation_gap(z: &[f64], groups: &[Label], positive: &Label) -> Result<f64> {
    if z.len() != groups.len() {
        return Err(Error::LengthMismatch { left: z.len(), right: groups.len() });
    }
    let mut min_pos = f64::INFINITY;
    let mut max_neg = f64::NEG_INFINITY;
    for (v, g) in z.iter().zip(groups) {
        if g == positive {
            min_pos = min_pos.min(*v);
        } else {
            max_neg = max_neg.max(*v);
        }
    }
    if !min_pos.is_finite() || !max_neg.is_finite() {
        return Err(Error::NotTwoGroups(1));
    }
    Ok(min_pos - max_neg)
}

/// Product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: x.len() });
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    // sqrt(fl(s * s)) == s, so identical inputs give exactly 1
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// 1-based ranks with ties given their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    pearson(&average_ranks(x), &average_ranks(y))
}
