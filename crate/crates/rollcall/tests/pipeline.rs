use std::collections::BTreeMap;
use std::fs;

use chrono::NaiveDate;
use glass_core::congress::{Chamber, Party};
use glass_rollcall::{
    apply_cleaning_rules, build_vote_network, ingest_stats, network_shape, CleaningOptions, DataFiles, LeaderEntry,
    LeadersConfig, MemberRecord, NetworkKey, RawNetworkData, Role, Stage, Vote, VoteRecord,
};
use proptest::prelude::*;

const KEY: NetworkKey = NetworkKey { congress: 101, chamber: Chamber::Senate };

fn leaders() -> LeadersConfig {
    let e = |id, party| LeaderEntry {
        congress: KEY.congress,
        chamber: KEY.chamber,
        member_id: Some(id),
        name: String::new(),
        state: String::new(),
        party,
        role: Role::Leader,
        start: None,
        end: None,
    };
    LeadersConfig::new(vec![e(1, Party::Democrat), e(2, Party::Republican)]).unwrap()
}

/// Members 1 and 2 are the Democrat and Republican leaders; the others get
/// random party codes including third parties.
fn raw_network() -> impl Strategy<Value = RawNetworkData> {
    (3usize..16, 1usize..12).prop_flat_map(|(n, rolls)| {
        let parties = prop::collection::vec(prop::sample::select(vec![100u32, 200, 328]), n - 2);
        let codes = prop::collection::vec(prop::sample::select(vec![0u8, 1, 1, 1, 6, 6, 6, 7, 9]), n * rolls);
        (parties, codes).prop_map(move |(parties, codes)| {
            let mut members = Vec::new();
            for (i, code) in [100u32, 200].into_iter().chain(parties).enumerate() {
                members.push(MemberRecord {
                    congress: KEY.congress,
                    chamber: KEY.chamber,
                    member_id: i as u32 + 1,
                    party_code: code,
                    name: format!("M{i}, x"),
                    state: "ZZ".into(),
                    bioguide: None,
                });
            }
            let votes = codes
                .iter()
                .enumerate()
                .map(|(k, &cast_code)| VoteRecord {
                    congress: KEY.congress,
                    chamber: KEY.chamber,
                    rollnumber: (k / n) as u32 + 1,
                    member_id: (k % n) as u32 + 1,
                    cast_code,
                })
                .collect();
            let start = NaiveDate::from_ymd_opt(1989, 1, 10).unwrap();
            let dates = (1..=rolls as u32).map(|r| (r, start + chrono::Days::new(r as u64))).collect();
            RawNetworkData { members, votes, dates }
        })
    })
}

proptest! {
    #[test]
    fn cleaning_invariants(raw in raw_network(), include in any::<bool>()) {
        let opts = CleaningOptions::including_agreeing(include);
        let ds = match apply_cleaning_rules(KEY, &raw, &leaders(), &opts) {
            Ok(ds) => ds,
            Err(glass_rollcall::Error::EmptyDataset(_)) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        // only Democrats and Republicans with yea/nay votes remain
        for rc in ds.rollcalls.values() {
            for id in rc.votes.keys() {
                prop_assert!(ds.members.contains_key(id));
            }
        }
        prop_assert!(ds.members.values().all(|m| matches!(m.party, Party::Democrat | Party::Republican)));

        // rule 5 soundness
        if !include {
            for rc in ds.rollcalls.values() {
                if let (Some(d), Some(r)) = (rc.votes.get(&1), rc.votes.get(&2)) {
                    prop_assert_ne!(d, r);
                }
            }
        }

        // stage counts never grow
        let st = &ds.stats.stages;
        prop_assert_eq!(st.len(), Stage::ALL.len());
        for w in st.windows(2) {
            prop_assert!(w[1].members <= w[0].members && w[1].votes <= w[0].votes && w[1].rollcalls <= w[0].rollcalls);
        }
        prop_assert_eq!(st.last().unwrap().votes, ds.vote_count());

        // reapplying changes nothing
        let again = apply_cleaning_rules(KEY, &ds.to_raw(&opts.cast_codes), &leaders(), &opts).unwrap();
        prop_assert_eq!(&again.members, &ds.members);
        prop_assert_eq!(&again.rollcalls, &ds.rollcalls);
        prop_assert_eq!(&again.leader_labels, &ds.leader_labels);

        // symmetric positive integer weights bounded by the roll-call count
        let g = build_vote_network(&ds).unwrap();
        prop_assert_eq!(g.node_count(), ds.members.len());
        let rolls = ds.rollcalls.len() as f64;
        for (a, b, w) in g.edges() {
            prop_assert!(w >= 1.0 && w <= rolls && w.fract() == 0.0);
            prop_assert_eq!(g.weight(a, b), g.weight(b, a));
        }
        // brute-force weight check
        let ids: Vec<u32> = ds.members.keys().copied().collect();
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                let same = ds
                    .rollcalls
                    .values()
                    .filter(|rc| matches!((rc.votes.get(&a), rc.votes.get(&b)), (Some(x), Some(y)) if x == y))
                    .count();
                prop_assert_eq!(g.weight(&a.into(), &b.into()), same as f64);
            }
        }
    }
}

#[test]
fn end_to_end_from_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("HSall_members.csv"),
        "congress,chamber,icpsr,state_abbrev,party_code,bioname,bioguide_id\n\
         101,President,99910,USA,200,\"BUSH, George Herbert Walker\",\n\
         101,Senate,1,ME,100,\"MITCHELL, George John\",M000811\n\
         101,Senate,2,KS,200,\"DOLE, Robert Joseph\",D000401\n\
         101,Senate,3,VT,100,\"LEAHY, Patrick Joseph\",L000174\n\
         101,Senate,4,NC,200,\"HELMS, Jesse\",H000463\n\
         101,Senate,5,XX,328,\"INDEPENDENT, Some\",I000001\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("HSall_rollcalls.csv"),
        "congress,chamber,rollnumber,date\n101,Senate,1,1989-02-01\n101,Senate,2,1989-03-01\n101,Senate,3,1989-04-01\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("HSall_votes.csv"),
        "congress,chamber,rollnumber,icpsr,cast_code,prob\n\
         101,Senate,1,1,1,\n101,Senate,1,2,6,\n101,Senate,1,3,1,\n101,Senate,1,4,6,\n101,Senate,1,5,1,\n\
         101,Senate,2,1,1,\n101,Senate,2,2,1,\n101,Senate,2,3,1,\n101,Senate,2,4,6,\n101,Senate,2,5,6,\n\
         101,Senate,3,1,6,\n101,Senate,3,2,1,\n101,Senate,3,3,9,\n101,Senate,3,4,1,\n101,Senate,3,5,6,\n\
         102,Senate,1,1,1,\n",
    )
    .unwrap();
    let files = DataFiles::in_dir(dir.path());
    assert_eq!(files.missing(), None);
    let raw = files.load(&[KEY].into()).unwrap();
    let leaders = LeadersConfig::shipped();
    let ds = apply_cleaning_rules(KEY, &raw[&KEY], &leaders, &CleaningOptions::default()).unwrap();
    assert_eq!(ds.leader_labels, BTreeMap::from([(1, Party::Democrat), (2, Party::Republican)]));
    assert_eq!(ds.rollcalls.len(), 2);
    assert_eq!(ds.rollcalls[&3].votes.get(&3), None);
    assert_eq!(ds.rollcalls[&1].votes[&4], Vote::Nay);

    let shape = network_shape(&ds);
    assert_eq!((shape.members, shape.democrats, shape.republicans), (4, 1, 1));

    let report = ingest_stats(&ds);
    let r1 = report.reduction(Stage::Rule1).unwrap();
    assert_eq!((r1.votes_before, r1.votes_after), (15, 14));
    let r2 = report.reduction(Stage::Rule2).unwrap();
    assert_eq!((r2.members_before, r2.members_after), (5, 4));
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["stages"][0]["stage"], "raw");

    let g = build_vote_network(&ds).unwrap();
    // member 3 did not vote on roll 3
    assert_eq!(g.weight(&1u32.into(), &3u32.into()), 1.0);
    assert_eq!(g.weight(&2u32.into(), &4u32.into()), 2.0);
    assert_eq!(g.weight(&1u32.into(), &4u32.into()), 0.0);
}
