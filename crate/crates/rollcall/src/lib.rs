//! Roll-call ingestion: parse member, vote and roll-call records, apply the
//! seven cleaning rules and build one weighted voting network per chamber
//! and Congress.

pub mod clean;
pub mod error;
pub mod leaders;
pub mod network;
pub mod records;
pub mod source;
pub mod stats;

pub use clean::{apply_cleaning_rules, ingest_stats, CleanRollCallDataset, CleaningOptions};
pub use error::{Error, Result};
pub use leaders::{LeaderEntry, LeadersConfig, Role};
pub use network::{build_vote_network, network_shape, truth_labels, NetworkShape};
pub use records::{
    parse_members, parse_rollcalls, parse_votes, CastCodes, MemberRecord, NetworkKey, PartyCodes, RawNetworkData,
    RollCall, Vote, VoteRecord,
};
pub use source::DataFiles;
pub use stats::{CleaningReport, CleaningStats, Stage, StageCounts};
