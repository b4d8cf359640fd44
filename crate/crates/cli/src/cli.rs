//! Argument definitions and their translation into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use glass_core::congress::{Chamber, Party};
use glass_core::FilterPolicy;
use glass_rollcall::source::{MEMBERS_FILE, ROLLCALLS_FILE, VOTES_FILE};

use crate::config::{networks, parse_congresses, DataPaths, GraphPaths, MSource, RunConfig, DATA_DIR_ENV};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "glass", version, about = "Absorbing-random-walk labelling of roll-call voting networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean roll-call data and write one edge list and label file per network.
    Ingest {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        select: SelectArgs,
        #[command(flatten)]
        clean: CleanArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Label one network, from roll-call data or from edge and label files.
    Label {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        select: SelectArgs,
        #[command(flatten)]
        clean: CleanArgs,
        #[command(flatten)]
        label: LabelArgs,
        /// Check exact probabilities against this many simulated walks per node.
        #[arg(long, default_value_t = 0)]
        walks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Label and evaluate every selected network.
    Batch {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        select: SelectArgs,
        #[command(flatten)]
        clean: CleanArgs,
        #[command(flatten)]
        label: LabelArgs,
        #[command(flatten)]
        jobs: JobsArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare runs with and without roll calls on which the leaders agree.
    Sensitivity {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        select: SelectArgs,
        /// Treat paired, announced and present codes as votes.
        #[arg(long)]
        lenient_cast_codes: bool,
        #[command(flatten)]
        label: LabelArgs,
        #[command(flatten)]
        jobs: JobsArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Regress F1 on party control of the House, Senate and Presidency.
    Regress {
        /// `congress,chamber,f1` CSV, such as a batch `series.csv`. Without
        /// it the series is computed from roll-call data.
        #[arg(long)]
        series: Option<PathBuf>,
        /// `congress,house_majority,senate_majority,president_party` CSV.
        #[arg(long)]
        control: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        level: f64,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        select: SelectArgs,
        #[command(flatten)]
        clean: CleanArgs,
        #[command(flatten)]
        label: LabelArgs,
        #[command(flatten)]
        jobs: JobsArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Per-rule reduction statistics of the cleaning pipeline.
    Stats {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        select: SelectArgs,
        #[command(flatten)]
        clean: CleanArgs,
        #[command(flatten)]
        jobs: JobsArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Directory holding the member, vote and roll-call CSV files.
    #[arg(long, env = DATA_DIR_ENV)]
    pub data_dir: Option<PathBuf>,
    #[arg(long)]
    pub members: Option<PathBuf>,
    #[arg(long)]
    pub votes: Option<PathBuf>,
    #[arg(long)]
    pub rollcalls: Option<PathBuf>,
    /// Leader table; the bundled one is used when absent.
    #[arg(long)]
    pub leaders: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Headerless `a,b,weight` edge list.
    #[arg(long, requires = "labels")]
    pub edges: Option<PathBuf>,
    /// Headerless `node,label` list of labelled nodes.
    #[arg(long, requires = "edges")]
    pub labels: Option<PathBuf>,
    /// Headerless `node,label` list of true labels for evaluation.
    #[arg(long, requires = "edges")]
    pub truth: Option<PathBuf>,
    #[arg(long, requires = "edges")]
    pub k1: Option<String>,
    #[arg(long, requires = "edges")]
    pub k2: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChamberArg {
    House,
    Senate,
    Both,
}

impl ChamberArg {
    fn chambers(self) -> Vec<Chamber> {
        match self {
            ChamberArg::House => vec![Chamber::House],
            ChamberArg::Senate => vec![Chamber::Senate],
            ChamberArg::Both => vec![Chamber::House, Chamber::Senate],
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Congress numbers, e.g. `74-115` or `90,110`.
    #[arg(long, default_value = "74-115")]
    pub congress: String,
    #[arg(long, value_enum, default_value_t = ChamberArg::Both)]
    pub chamber: ChamberArg,
}

#[derive(Debug, Args)]
pub struct CleanArgs {
    /// Keep roll calls on which the party leaders vote the same way.
    #[arg(long)]
    pub include_agreeing: bool,
    /// Treat paired, announced and present codes as votes.
    #[arg(long)]
    pub lenient_cast_codes: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PartyArg {
    Dem,
    Rep,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    /// `off` or `iqr:<k>`.
    #[arg(long, default_value = "off", value_parser = parse_filter)]
    pub filter: FilterPolicy,
    /// Resolve ties at the threshold by node order.
    #[arg(long)]
    pub break_ties: bool,
    /// Number of nodes to label K2; defaults to the true count.
    #[arg(long)]
    pub m: Option<usize>,
    /// Positive class for the reported F1.
    #[arg(long, value_enum, default_value_t = PartyArg::Dem)]
    pub positive: PartyArg,
}

#[derive(Debug, Args)]
pub struct JobsArgs {
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

fn parse_filter(s: &str) -> Result<FilterPolicy, String> {
    s.parse()
}

impl DataArgs {
    fn paths(&self) -> Option<DataPaths> {
        let pick = |explicit: &Option<PathBuf>, name: &str| {
            explicit.clone().or_else(|| self.data_dir.as_ref().map(|d| d.join(name)))
        };
        Some(DataPaths {
            members: pick(&self.members, MEMBERS_FILE)?,
            votes: pick(&self.votes, VOTES_FILE)?,
            rollcalls: pick(&self.rollcalls, ROLLCALLS_FILE)?,
        })
    }

    fn apply(&self, cfg: &mut RunConfig) {
        cfg.data = self.paths();
        cfg.leaders = self.leaders.clone();
    }
}

impl SelectArgs {
    fn apply(&self, cfg: &mut RunConfig) -> CliResult<()> {
        let congresses = parse_congresses(&self.congress).map_err(CliError::User)?;
        cfg.networks = networks(&congresses, &self.chamber.chambers());
        Ok(())
    }
}

impl CleanArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        cfg.include_agreeing = self.include_agreeing;
        cfg.lenient_cast_codes = self.lenient_cast_codes;
    }
}

impl LabelArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        cfg.filter = self.filter;
        cfg.break_ties = self.break_ties;
        cfg.m = self.m.map_or(MSource::TrueCount, MSource::Explicit);
        cfg.positive = match self.positive {
            PartyArg::Dem => Party::Democrat,
            PartyArg::Rep => Party::Republican,
        };
    }
}

impl Command {
    pub fn into_config(self) -> CliResult<RunConfig> {
        let cfg = match self {
            Command::Ingest { data, select, clean, out } => {
                let mut cfg = RunConfig::new("ingest", out.out);
                data.apply(&mut cfg);
                select.apply(&mut cfg)?;
                clean.apply(&mut cfg);
                cfg
            }
            Command::Label { data, graph, select, clean, label, walks, seed, out } => {
                let mut cfg = RunConfig::new("label", out.out);
                label.apply(&mut cfg);
                cfg.walks = walks;
                cfg.seed = seed;
                match graph.edges {
                    Some(edges) => {
                        cfg.graph = Some(GraphPaths {
                            edges,
                            labels: graph.labels.expect("clap enforces --labels with --edges"),
                            truth: graph.truth,
                            k1: graph.k1,
                            k2: graph.k2,
                        });
                    }
                    None => {
                        data.apply(&mut cfg);
                        select.apply(&mut cfg)?;
                        clean.apply(&mut cfg);
                        if cfg.networks.len() != 1 {
                            return Err(CliError::User(format!(
                                "label works on one network; {} selected (use --congress N --chamber house|senate)",
                                cfg.networks.len()
                            )));
                        }
                    }
                }
                cfg
            }
            Command::Batch { data, select, clean, label, jobs, out } => {
                let mut cfg = RunConfig::new("batch", out.out);
                data.apply(&mut cfg);
                select.apply(&mut cfg)?;
                clean.apply(&mut cfg);
                label.apply(&mut cfg);
                cfg.jobs = jobs.jobs;
                cfg
            }
            Command::Sensitivity { data, select, lenient_cast_codes, label, jobs, out } => {
                let mut cfg = RunConfig::new("sensitivity", out.out);
                data.apply(&mut cfg);
                select.apply(&mut cfg)?;
                cfg.lenient_cast_codes = lenient_cast_codes;
                label.apply(&mut cfg);
                cfg.jobs = jobs.jobs;
                cfg
            }
            Command::Regress { series, control, level, data, select, clean, label, jobs, out } => {
                let mut cfg = RunConfig::new("regress", out.out);
                cfg.control = control;
                cfg.level = level;
                label.apply(&mut cfg);
                match series {
                    Some(s) => cfg.series = Some(s),
                    None => {
                        data.apply(&mut cfg);
                        select.apply(&mut cfg)?;
                        clean.apply(&mut cfg);
                        cfg.jobs = jobs.jobs;
                    }
                }
                cfg
            }
            Command::Stats { data, select, clean, jobs, out } => {
                let mut cfg = RunConfig::new("stats", out.out);
                data.apply(&mut cfg);
                select.apply(&mut cfg)?;
                clean.apply(&mut cfg);
                cfg.jobs = jobs.jobs;
                cfg
            }
        };
        Ok(cfg)
    }
}
