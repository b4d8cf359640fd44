//! Validated run configuration. The whole struct is written into every
//! output directory's manifest.

use std::path::{Path, PathBuf};

use glass_core::congress::{Chamber, Party};
use glass_core::regression::{read_control_records, ControlRecord};
use glass_core::FilterPolicy;
use glass_rollcall::{CastCodes, CleaningOptions, DataFiles, LeadersConfig, NetworkKey};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const DATA_DIR_ENV: &str = "GLASS_DATA_DIR";

const SHIPPED_CONTROL: &str = include_str!("../data/control.csv");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DataPaths {
    pub members: PathBuf,
    pub votes: PathBuf,
    pub rollcalls: PathBuf,
}

impl DataPaths {
    pub fn files(&self) -> DataFiles {
        DataFiles { members: self.members.clone(), votes: self.votes.clone(), rollcalls: self.rollcalls.clone() }
    }
}

/// A graph given directly as edge and label files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphPaths {
    pub edges: PathBuf,
    pub labels: PathBuf,
    pub truth: Option<PathBuf>,
    pub k1: Option<String>,
    pub k2: Option<String>,
}

/// Where the number of `K2` nodes comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MSource {
    TrueCount,
    Explicit(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub data: Option<DataPaths>,
    pub graph: Option<GraphPaths>,
    /// `None` uses the bundled table.
    pub leaders: Option<PathBuf>,
    pub control: Option<PathBuf>,
    pub series: Option<PathBuf>,
    pub networks: Vec<NetworkKey>,
    pub include_agreeing: bool,
    pub lenient_cast_codes: bool,
    pub filter: FilterPolicy,
    pub break_ties: bool,
    pub m: MSource,
    pub positive: Party,
    pub level: f64,
    pub walks: usize,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn new(command: &str, out_dir: PathBuf) -> Self {
        RunConfig {
            command: command.to_string(),
            data: None,
            graph: None,
            leaders: None,
            control: None,
            series: None,
            networks: Vec::new(),
            include_agreeing: false,
            lenient_cast_codes: false,
            filter: FilterPolicy::Off,
            break_ties: false,
            m: MSource::TrueCount,
            positive: Party::Democrat,
            level: 0.05,
            walks: 0,
            seed: 0,
            jobs: None,
            out_dir,
        }
    }

    /// Checks arguments and input files before any work starts.
    pub fn validate(&self) -> CliResult<()> {
        let user = |m: String| Err(CliError::User(m));
        let exists = |what: &str, p: &Path| {
            if p.is_file() {
                Ok(())
            } else {
                Err(CliError::missing_file(what, p))
            }
        };
        if let Some(p) = &self.leaders {
            exists("leaders", p)?;
        }
        if let Some(p) = &self.control {
            exists("control", p)?;
        }
        if let Some(p) = &self.series {
            exists("series", p)?;
        }
        if let Some(g) = &self.graph {
            exists("edge list", &g.edges)?;
            exists("labels", &g.labels)?;
            if let Some(t) = &g.truth {
                exists("truth", t)?;
            }
            if self.m == MSource::TrueCount && g.truth.is_none() {
                return user("pass --m or --truth so the K2 count is known".into());
            }
        }
        if let Some(d) = &self.data {
            exists("members", &d.members)?;
            exists("votes", &d.votes)?;
            exists("roll-call", &d.rollcalls)?;
            if self.networks.is_empty() {
                return user("no networks selected".into());
            }
        }
        if self.graph.is_none() && self.data.is_none() && self.series.is_none() {
            return user(format!("no input data: pass --data-dir or set {DATA_DIR_ENV}"));
        }
        if matches!(self.m, MSource::Explicit(_)) && self.networks.len() > 1 {
            return user("--m applies to a single network".into());
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return user(format!("significance level must lie in (0, 1), got {}", self.level));
        }
        if self.jobs == Some(0) {
            return user("--jobs must be at least 1".into());
        }
        Ok(())
    }

    pub fn cleaning_options(&self) -> CleaningOptions {
        CleaningOptions {
            cast_codes: if self.lenient_cast_codes { CastCodes::lenient() } else { CastCodes::default() },
            include_agreeing: self.include_agreeing,
            ..Default::default()
        }
    }

    pub fn leaders_config(&self) -> CliResult<LeadersConfig> {
        match &self.leaders {
            None => Ok(LeadersConfig::shipped()),
            Some(p) => LeadersConfig::from_path(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display()))),
        }
    }

    pub fn control_records(&self) -> CliResult<Vec<ControlRecord>> {
        let parsed = match &self.control {
            None => read_control_records(SHIPPED_CONTROL.as_bytes()),
            Some(p) => read_control_records(std::fs::File::open(p)?),
        };
        parsed.map_err(|e| CliError::Data(format!("control file: {e}")))
    }
}

pub fn shipped_control_text() -> &'static str {
    SHIPPED_CONTROL
}

/// `74`, `74-80`, `74..80` and comma-separated mixtures of these.
pub fn parse_congresses(spec: &str) -> Result<Vec<u32>, String> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |s: &str| s.trim().parse::<u32>().map_err(|_| format!("bad congress `{s}`"));
        let (lo, hi) = match part.split_once("..").or_else(|| part.split_once('-')) {
            Some((a, b)) => (num(a)?, num(b)?),
            None => {
                let n = num(part)?;
                (n, n)
            }
        };
        if lo > hi {
            return Err(format!("empty congress range `{part}`"));
        }
        out.extend(lo..=hi);
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err("no congress selected".into());
    }
    Ok(out)
}

pub fn networks(congresses: &[u32], chambers: &[Chamber]) -> Vec<NetworkKey> {
    let mut keys: Vec<NetworkKey> =
        congresses.iter().flat_map(|&c| chambers.iter().map(move |&ch| NetworkKey::new(c, ch))).collect();
    keys.sort();
    keys
}
