//! Locating and loading the three roll-call data files.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::records::{group_by_network, parse_members, parse_rollcalls, parse_votes_filtered, NetworkKey, RawNetworkData};

pub const MEMBERS_FILE: &str = "HSall_members.csv";
pub const VOTES_FILE: &str = "HSall_votes.csv";
pub const ROLLCALLS_FILE: &str = "HSall_rollcalls.csv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataFiles {
    pub members: PathBuf,
    pub votes: PathBuf,
    pub rollcalls: PathBuf,
}

impl DataFiles {
    /// The standard file names inside `dir`.
    pub fn in_dir(dir: &Path) -> Self {
        DataFiles { members: dir.join(MEMBERS_FILE), votes: dir.join(VOTES_FILE), rollcalls: dir.join(ROLLCALLS_FILE) }
    }

    pub fn paths(&self) -> [&Path; 3] {
        [&self.members, &self.votes, &self.rollcalls]
    }

    /// First file that does not exist.
    pub fn missing(&self) -> Option<&Path> {
        self.paths().into_iter().find(|p| !p.is_file())
    }

    /// Reads the files once and splits them into the `wanted` networks.
    pub fn load(&self, wanted: &BTreeSet<NetworkKey>) -> Result<BTreeMap<NetworkKey, RawNetworkData>> {
        let open = |p: &Path| {
            File::open(p)
                .map(|f| BufReader::with_capacity(1 << 20, f))
                .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display()))))
        };
        let members = parse_members(open(&self.members)?)?;
        let rollcalls = parse_rollcalls(open(&self.rollcalls)?)?;
        let votes = parse_votes_filtered(open(&self.votes)?, |k| wanted.contains(&k))?;
        log::info!("loaded {} members, {} roll calls, {} votes", members.len(), rollcalls.len(), votes.len());
        Ok(group_by_network(members, votes, rollcalls, wanted))
    }
}
