use serde::{Deserialize, Serialize};

use crate::records::NetworkKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Raw,
    Rule1,
    Rule2,
    Rule3,
    Rule4,
    Rule5,
    Rule6,
    Rule7,
}

impl Stage {
    pub const ALL: [Stage; 8] =
        [Stage::Raw, Stage::Rule1, Stage::Rule2, Stage::Rule3, Stage::Rule4, Stage::Rule5, Stage::Rule6, Stage::Rule7];
}

/// Sizes of the dataset after one stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub stage: Stage,
    /// Members with at least one remaining vote.
    pub members: usize,
    pub votes: usize,
    pub rollcalls: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CleaningStats {
    pub stages: Vec<StageCounts>,
    /// Roll calls where both active leaders cast the same vote.
    pub agreeing_rollcalls: usize,
    /// Roll calls kept because an active leader did not vote.
    pub leader_absent_rollcalls: usize,
    /// `(alias, canonical)` member ids merged by rule 3.
    pub merged_members: Vec<(u32, u32)>,
    pub excluded_speaker: Option<u32>,
}

impl CleaningStats {
    pub fn stage(&self, stage: Stage) -> Option<&StageCounts> {
        self.stages.iter().find(|s| s.stage == stage)
    }
}

/// Change from the previous stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub stage: Stage,
    pub members_before: usize,
    pub members_after: usize,
    pub members_pct: f64,
    pub votes_before: usize,
    pub votes_after: usize,
    pub votes_pct: f64,
    pub rollcalls_before: usize,
    pub rollcalls_after: usize,
    pub rollcalls_pct: f64,
}

/// Percentage removed going from `before` to `after`; zero for an empty start.
pub fn reduction_pct(before: usize, after: usize) -> f64 {
    if before == 0 {
        0.0
    } else {
        100.0 * (before as f64 - after as f64) / before as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub congress: u32,
    pub chamber: glass_core::congress::Chamber,
    pub include_agreeing: bool,
    pub stages: Vec<StageCounts>,
    pub reductions: Vec<Reduction>,
    pub agreeing_rollcalls: usize,
    pub leader_absent_rollcalls: usize,
    pub merged_members: Vec<(u32, u32)>,
    pub excluded_speaker: Option<u32>,
}

impl CleaningReport {
    pub fn new(key: NetworkKey, include_agreeing: bool, stats: &CleaningStats) -> Self {
        let reductions = stats
            .stages
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                Reduction {
                    stage: b.stage,
                    members_before: a.members,
                    members_after: b.members,
                    members_pct: reduction_pct(a.members, b.members),
                    votes_before: a.votes,
                    votes_after: b.votes,
                    votes_pct: reduction_pct(a.votes, b.votes),
                    rollcalls_before: a.rollcalls,
                    rollcalls_after: b.rollcalls,
                    rollcalls_pct: reduction_pct(a.rollcalls, b.rollcalls),
                }
            })
            .collect();
        CleaningReport {
            congress: key.congress,
            chamber: key.chamber,
            include_agreeing,
            stages: stats.stages.clone(),
            reductions,
            agreeing_rollcalls: stats.agreeing_rollcalls,
            leader_absent_rollcalls: stats.leader_absent_rollcalls,
            merged_members: stats.merged_members.clone(),
            excluded_speaker: stats.excluded_speaker,
        }
    }

    pub fn reduction(&self, stage: Stage) -> Option<&Reduction> {
        self.reductions.iter().find(|r| r.stage == stage)
    }
}
