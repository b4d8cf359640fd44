use std::collections::BTreeMap;

use glass_core::congress::Party;
use glass_core::{Label, NodeId, WeightedGraph};
use serde::Serialize;

use crate::clean::CleanRollCallDataset;
use crate::error::{Error, Result};
use crate::records::Vote;

/// Edge weight between two members is the number of considered roll calls on
/// which they cast the same vote. Leaders carry their party label.
pub fn build_vote_network(clean: &CleanRollCallDataset) -> Result<WeightedGraph> {
    if clean.members.is_empty() {
        return Err(Error::EmptyDataset(clean.key));
    }
    let ids: Vec<u32> = clean.members.keys().copied().collect();
    let index: BTreeMap<u32, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let n = ids.len();
    let mut same = vec![0u32; n * n];
    let mut yea = Vec::with_capacity(n);
    let mut nay = Vec::with_capacity(n);
    for rc in clean.rollcalls.values() {
        yea.clear();
        nay.clear();
        for (id, v) in &rc.votes {
            let i = index[id];
            match v {
                Vote::Yea => yea.push(i),
                Vote::Nay => nay.push(i),
            }
        }
        for group in [&yea, &nay] {
            for (k, &a) in group.iter().enumerate() {
                for &b in &group[k + 1..] {
                    same[a * n + b] += 1;
                }
            }
        }
    }
    let mut builder = WeightedGraph::builder();
    for id in &ids {
        builder.add_node(*id);
    }
    for a in 0..n {
        for b in a + 1..n {
            let w = same[a * n + b];
            if w > 0 {
                builder.add_edge(ids[a], ids[b], w as f64);
            }
        }
    }
    for (id, party) in &clean.leader_labels {
        builder.set_label(*id, party.label());
    }
    Ok(builder.build()?)
}

/// Every retained member's party, leaders included.
pub fn truth_labels(clean: &CleanRollCallDataset) -> BTreeMap<NodeId, Label> {
    clean.members.iter().map(|(id, m)| (NodeId::from(*id), m.party.label())).collect()
}

/// Network sizes in the layout of a per-Congress summary table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NetworkShape {
    pub members: usize,
    /// Democrats other than leaders.
    pub democrats: usize,
    pub republicans: usize,
    pub democrat_leaders: usize,
    pub republican_leaders: usize,
    pub rollcalls: usize,
}

pub fn network_shape(clean: &CleanRollCallDataset) -> NetworkShape {
    let count = |p: Party| clean.members.values().filter(|m| m.party == p).count();
    let dl = clean.leader_count(Party::Democrat);
    let rl = clean.leader_count(Party::Republican);
    NetworkShape {
        members: clean.members.len(),
        democrats: count(Party::Democrat) - dl,
        republicans: count(Party::Republican) - rl,
        democrat_leaders: dl,
        republican_leaders: rl,
        rollcalls: clean.rollcalls.len(),
    }
}
