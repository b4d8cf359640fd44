#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shape of a synthetic Senate.
#[derive(Clone, Copy)]
pub struct Fixture {
    pub congress: u32,
    pub democrats: u32,
    pub republicans: u32,
    pub rollcalls: u32,
    /// Every `bipartisan_every`-th roll call is a near-unanimous yea; 0 for none.
    pub bipartisan_every: u32,
    /// Largest per-member defection rate on party-line votes.
    pub max_defection: f64,
    pub seed: u64,
}

impl Default for Fixture {
    fn default() -> Self {
        Fixture {
            congress: 101,
            democrats: 12,
            republicans: 10,
            rollcalls: 40,
            bipartisan_every: 4,
            max_defection: 0.3,
            seed: 7,
        }
    }
}

/// Member ids: Democrats from 1, Republicans from 1001. The first of each
/// party leads.
pub fn dem_id(i: u32) -> u32 {
    1 + i
}

pub fn rep_id(i: u32) -> u32 {
    1001 + i
}

/// Writes the three data files for each fixture into `dir`, plus a leader
/// table covering the fixtures in `with_leaders`.
pub fn write_data(dir: &Path, fixtures: &[Fixture], with_leaders: &[u32]) -> PathBuf {
    let mut members = String::from("congress,chamber,icpsr,state_abbrev,party_code,bioname,bioguide_id\n");
    let mut rolls = String::from("congress,chamber,rollnumber,date\n");
    let mut votes = String::from("congress,chamber,rollnumber,icpsr,cast_code,prob\n");
    let mut leaders = String::from("congress,chamber,member_id,name,state,party,role,start,end\n");
    for f in fixtures {
        let c = f.congress;
        let year = 1787 + 2 * c;
        let mut rng = ChaCha8Rng::seed_from_u64(f.seed);
        let mut people = Vec::new();
        for i in 0..f.democrats {
            let id = dem_id(i);
            writeln!(members, "{c},Senate,{id},S{i},100,\"DEMSON{id}, Alex\",D{id:06}").unwrap();
            people.push((id, true, if i == 0 { 0.0 } else { f.max_defection * i as f64 / f.democrats as f64 }));
        }
        for i in 0..f.republicans {
            let id = rep_id(i);
            writeln!(members, "{c},Senate,{id},S{i},200,\"REPSON{id}, Sam\",R{id:06}").unwrap();
            people.push((id, false, if i == 0 { 0.0 } else { f.max_defection * i as f64 / f.republicans as f64 }));
        }
        for r in 1..=f.rollcalls {
            let month = 2 + (r - 1) % 11;
            let day = 1 + (r - 1) / 11;
            writeln!(rolls, "{c},Senate,{r},{year}-{month:02}-{day:02}").unwrap();
            let bipartisan = f.bipartisan_every > 0 && r % f.bipartisan_every == 0;
            for &(id, dem, defect) in &people {
                let yea = if bipartisan {
                    defect == 0.0 || rng.random::<f64>() > 0.1
                } else {
                    dem != (rng.random::<f64>() < defect)
                };
                writeln!(votes, "{c},Senate,{r},{id},{},", if yea { 1 } else { 6 }).unwrap();
            }
        }
        if with_leaders.contains(&c) {
            writeln!(leaders, "{c},senate,{},\"DEMSON{}\",S0,D,leader,,", dem_id(0), dem_id(0)).unwrap();
            writeln!(leaders, "{c},senate,{},\"REPSON{}\",S0,R,leader,,", rep_id(0), rep_id(0)).unwrap();
        }
    }
    fs::write(dir.join("HSall_members.csv"), members).unwrap();
    fs::write(dir.join("HSall_rollcalls.csv"), rolls).unwrap();
    fs::write(dir.join("HSall_votes.csv"), votes).unwrap();
    let path = dir.join("leaders.csv");
    fs::write(&path, leaders).unwrap();
    path
}

pub fn glass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glass"))
        .args(args)
        .env_remove("GLASS_DATA_DIR")
        .env("RUST_LOG", "off")
        .output()
        .expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}
