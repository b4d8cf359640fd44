use chrono::NaiveDate;
use glass_core::congress::Party;

use crate::records::NetworkKey;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("{key}: vote by member {member_id} who has no member record")]
    UnknownMember { key: NetworkKey, member_id: u32 },
    #[error("{key}: member {member_id} listed more than once")]
    DuplicateMember { key: NetworkKey, member_id: u32 },
    #[error("{key}: roll call {rollnumber} has no date")]
    MissingDate { key: NetworkKey, rollnumber: u32 },
    #[error("no leaders configured for {0}")]
    LeadersMissing(NetworkKey),
    #[error("{key}: no active {party} leader on {date}")]
    NoActiveLeader { key: NetworkKey, party: Party, date: NaiveDate },
    #[error("{key}: leader `{name}` matches no member")]
    LeaderNotFound { key: NetworkKey, name: String },
    #[error("{key}: leader `{name}` matches several members: {candidates:?}")]
    AmbiguousLeader { key: NetworkKey, name: String, candidates: Vec<u32> },
    #[error("invalid leaders config: {0}")]
    InvalidLeaders(String),
    #[error("{0}: no votes survive cleaning")]
    EmptyDataset(NetworkKey),
    #[error(transparent)]
    Graph(#[from] glass_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
