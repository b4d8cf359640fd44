//! Cleaning rules 1 to 7, applied in order.
//!
//! 1. keep only yea and nay votes
//! 2. keep only Democrat and Republican members
//! 3. merge records of one person (same bioguide id) onto the record with
//!    the earliest vote, whose party is the one held at election
//! 4. replacement members keep their own records
//! 5. drop roll calls where the two active party leaders cast the same vote
//! 6. "active" is decided by each roll call's date
//! 7. in the House, drop every vote of the chronologically first Speaker

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::NaiveDate;
use glass_core::congress::{Chamber, Party};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::leaders::{LeadersConfig, ResolvedLeader, Role};
use crate::records::{CastCodes, MemberRecord, NetworkKey, PartyCodes, RawNetworkData, Vote, VoteRecord};
use crate::stats::{CleaningReport, CleaningStats, Stage, StageCounts};

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CleaningOptions {
    pub cast_codes: CastCodes,
    pub party_codes: PartyCodes,
    /// Skip rule 5.
    pub include_agreeing: bool,
}

impl CleaningOptions {
    pub fn including_agreeing(include_agreeing: bool) -> Self {
        CleaningOptions { include_agreeing, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RetainedMember {
    pub member_id: u32,
    pub party: Party,
    pub name: String,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsideredRollCall {
    pub date: NaiveDate,
    pub votes: BTreeMap<u32, Vote>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CleanRollCallDataset {
    pub key: NetworkKey,
    pub include_agreeing: bool,
    pub members: BTreeMap<u32, RetainedMember>,
    pub rollcalls: BTreeMap<u32, ConsideredRollCall>,
    /// Leader nodes and the party label they carry.
    pub leader_labels: BTreeMap<u32, Party>,
    pub resolved_leaders: Vec<ResolvedLeader>,
    /// Democrat and Republican member records left after rule 3, voting or not.
    #[serde(skip)]
    pub member_records: Vec<MemberRecord>,
    pub stats: CleaningStats,
}

impl CleanRollCallDataset {
    pub fn vote_count(&self) -> usize {
        self.rollcalls.values().map(|r| r.votes.len()).sum()
    }

    pub fn leader_count(&self, party: Party) -> usize {
        self.leader_labels.values().filter(|p| **p == party).count()
    }

    /// The dataset as raw records, for feeding back through the rules.
    pub fn to_raw(&self, codes: &CastCodes) -> RawNetworkData {
        let votes = self
            .rollcalls
            .iter()
            .flat_map(|(&roll, rc)| {
                rc.votes.iter().map(move |(&member_id, &v)| VoteRecord {
                    congress: self.key.congress,
                    chamber: self.key.chamber,
                    rollnumber: roll,
                    member_id,
                    cast_code: codes.code_for(v),
                })
            })
            .collect();
        RawNetworkData {
            members: self.member_records.clone(),
            votes,
            dates: self.rollcalls.iter().map(|(&r, rc)| (r, rc.date)).collect(),
        }
    }
}

/// Per-rule CleaningStats report.
pub fn ingest_stats(dataset: &CleanRollCallDataset) -> CleaningReport {
    CleaningReport::new(dataset.key, dataset.include_agreeing, &dataset.stats)
}

#[derive(Clone, Copy)]
struct Cast {
    roll: u32,
    member: u32,
    vote: Option<Vote>,
}

fn counts(stage: Stage, casts: &[Cast]) -> StageCounts {
    let members: BTreeSet<u32> = casts.iter().map(|c| c.member).collect();
    let rolls: BTreeSet<u32> = casts.iter().map(|c| c.roll).collect();
    StageCounts { stage, members: members.len(), votes: casts.len(), rollcalls: rolls.len() }
}

pub fn apply_cleaning_rules(
    key: NetworkKey,
    raw: &RawNetworkData,
    leaders: &LeadersConfig,
    opts: &CleaningOptions,
) -> Result<CleanRollCallDataset> {
    if leaders.for_network(key).is_empty() {
        return Err(Error::LeadersMissing(key));
    }
    let mut records: HashMap<u32, &MemberRecord> = HashMap::new();
    for m in raw.members.iter().filter(|m| m.key() == key) {
        if records.insert(m.member_id, m).is_some() {
            return Err(Error::DuplicateMember { key, member_id: m.member_id });
        }
    }
    let date_of = |roll: u32| raw.dates.get(&roll).copied().ok_or(Error::MissingDate { key, rollnumber: roll });

    let mut casts = Vec::with_capacity(raw.votes.len());
    for v in raw.votes.iter().filter(|v| v.key() == key && opts.cast_codes.is_recorded(v.cast_code)) {
        if !records.contains_key(&v.member_id) {
            return Err(Error::UnknownMember { key, member_id: v.member_id });
        }
        casts.push(Cast { roll: v.rollnumber, member: v.member_id, vote: opts.cast_codes.vote(v.cast_code) });
    }
    let mut stats = CleaningStats::default();
    stats.stages.push(counts(Stage::Raw, &casts));

    casts.retain(|c| c.vote.is_some());
    stats.stages.push(counts(Stage::Rule1, &casts));

    let party_of = |id: u32| opts.party_codes.party(records[&id].party_code);
    casts.retain(|c| party_of(c.member).is_some());
    stats.stages.push(counts(Stage::Rule2, &casts));

    // rule 3
    let mut first_vote: HashMap<u32, (NaiveDate, u32)> = HashMap::new();
    for c in &casts {
        let at = (date_of(c.roll)?, c.roll);
        first_vote.entry(c.member).and_modify(|e| *e = (*e).min(at)).or_insert(at);
    }
    let mut by_person: BTreeMap<&str, Vec<u32>> = BTreeMap::new();
    for (id, m) in &records {
        if let (Some(bg), Some(_)) = (m.bioguide.as_deref(), party_of(*id)) {
            by_person.entry(bg).or_default().push(*id);
        }
    }
    let mut alias: HashMap<u32, u32> = HashMap::new();
    for ids in by_person.values().filter(|ids| ids.len() > 1) {
        let canonical = *ids
            .iter()
            .min_by_key(|id| (!first_vote.contains_key(id), first_vote.get(id).copied(), **id))
            .expect("non-empty group");
        for &id in ids.iter().filter(|&&id| id != canonical) {
            alias.insert(id, canonical);
            stats.merged_members.push((id, canonical));
        }
    }
    stats.merged_members.sort_unstable();
    if !alias.is_empty() {
        for c in casts.iter_mut() {
            if let Some(&to) = alias.get(&c.member) {
                c.member = to;
            }
        }
        let mut seen = BTreeSet::new();
        casts.retain(|c| seen.insert((c.roll, c.member)));
    }
    stats.stages.push(counts(Stage::Rule3, &casts));
    stats.stages.push(counts(Stage::Rule4, &casts));

    let mut member_records: Vec<MemberRecord> = records
        .values()
        .filter(|m| party_of(m.member_id).is_some() && !alias.contains_key(&m.member_id))
        .map(|m| (*m).clone())
        .collect();
    member_records.sort_by_key(|m| m.member_id);

    // rules 5 and 6
    let voters: BTreeSet<u32> = casts.iter().map(|c| c.member).collect();
    let resolved = leaders.resolve(key, &member_records, &opts.party_codes, |id| voters.contains(&id))?;
    let lookup: HashMap<(u32, u32), Vote> = casts.iter().map(|c| ((c.roll, c.member), c.vote.unwrap())).collect();
    let rolls: BTreeSet<u32> = casts.iter().map(|c| c.roll).collect();
    let active = |party: Party, date: NaiveDate| {
        resolved
            .iter()
            .find(|l| l.role == Role::Leader && l.party == party && l.active_on(date))
            .map(|l| l.member_id)
            .ok_or(Error::NoActiveLeader { key, party, date })
    };
    let mut agreeing = BTreeSet::new();
    for &roll in &rolls {
        let date = date_of(roll)?;
        let d = lookup.get(&(roll, active(Party::Democrat, date)?));
        let r = lookup.get(&(roll, active(Party::Republican, date)?));
        match (d, r) {
            (Some(a), Some(b)) if a == b => {
                agreeing.insert(roll);
            }
            (Some(_), Some(_)) => {}
            _ => {
                log::debug!("{key}: roll call {roll} kept with an active leader not voting");
                stats.leader_absent_rollcalls += 1;
            }
        }
    }
    stats.agreeing_rollcalls = agreeing.len();
    if !opts.include_agreeing {
        casts.retain(|c| !agreeing.contains(&c.roll));
    }
    stats.stages.push(counts(Stage::Rule5, &casts));
    stats.stages.push(counts(Stage::Rule6, &casts));

    if key.chamber == Chamber::House {
        let first = resolved
            .iter()
            .filter(|l| l.role == Role::Speaker)
            .min_by_key(|l| (l.start, l.member_id))
            .map(|l| l.member_id);
        if let Some(speaker) = first {
            casts.retain(|c| c.member != speaker);
            stats.excluded_speaker = Some(speaker);
        }
    }
    stats.stages.push(counts(Stage::Rule7, &casts));

    if casts.is_empty() {
        return Err(Error::EmptyDataset(key));
    }

    let mut rollcalls: BTreeMap<u32, ConsideredRollCall> = BTreeMap::new();
    for c in &casts {
        rollcalls
            .entry(c.roll)
            .or_insert_with(|| ConsideredRollCall { date: raw.dates[&c.roll], votes: BTreeMap::new() })
            .votes
            .insert(c.member, c.vote.unwrap());
    }
    let members: BTreeMap<u32, RetainedMember> = casts
        .iter()
        .map(|c| c.member)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|id| {
            let m = records[&id];
            let party = party_of(id).expect("rule 2 applied");
            (id, RetainedMember { member_id: id, party, name: m.name.clone(), state: m.state.clone() })
        })
        .collect();
    let mut leader_labels = BTreeMap::new();
    for l in resolved.iter().filter(|l| l.role == Role::Leader) {
        if let Some(m) = members.get(&l.member_id) {
            if m.party != l.party {
                log::warn!("{key}: leader {} listed as {} but elected as {}", l.member_id, l.party, m.party);
            }
            leader_labels.insert(l.member_id, l.party);
        }
    }
    Ok(CleanRollCallDataset {
        key,
        include_agreeing: opts.include_agreeing,
        members,
        rollcalls,
        leader_labels,
        resolved_leaders: resolved,
        member_records,
        stats,
    })
}
