use thiserror::Error;

use crate::graph::{Label, NodeId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge {a}-{b} has non-positive weight {weight}")]
    NonPositiveWeight { a: NodeId, b: NodeId, weight: f64 },
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("label assigned to unknown node {0}")]
    LabelOnUnknownNode(NodeId),
    #[error("node {0} appears with two different labels")]
    ConflictingLabel(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("graph has no labelled nodes")]
    NoLabelledNodes,
    #[error("{} unlabelled node(s) cannot reach any labelled node (first: {})", .0.len(), .0[0])]
    StrandedNodes(Vec<NodeId>),
    #[error("unlabelled node {0} has zero weighted degree")]
    ZeroDegree(NodeId),
    #[error("linear system is singular (zero pivot in column {column})")]
    Singular { column: usize },
    #[error("solve residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("absorption probability {value} for node {node} is outside [0, 1]")]
    ProbabilityOutOfBounds { node: NodeId, value: f64 },
    #[error("node {0} is not a transient state")]
    NotTransient(NodeId),

    #[error("absorbing node {0} has no label")]
    UnlabelledAbsorbing(NodeId),
    #[error("label {found} is neither {k1} nor {k2}")]
    UnexpectedLabel { found: Label, k1: Label, k2: Label },
    #[error("class count {m} out of range for {u} node(s)")]
    ClassCountOutOfRange { m: usize, u: usize },
    #[error("no true label for node {0}")]
    MissingTruth(NodeId),

    #[error("estimate and truth node sets differ (first mismatch: {0})")]
    NodeMismatch(NodeId),
    #[error("F1 is undefined when TP, FP and FN are all zero")]
    UndefinedF1,
    #[error("zero variance")]
    ZeroVariance,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("expected exactly two groups, found {0}")]
    NotTwoGroups(usize),

    #[error("design column `{column}` is linearly dependent on earlier columns")]
    RankDeficient { column: String },
    #[error("non-finite value in regression input")]
    NonFinite,
    #[error("no control record for congress {0}")]
    MissingControl(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
