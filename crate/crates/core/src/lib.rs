//! Semi-supervised graph labelling with exact absorbing random walks.
//!
//! Labelled nodes of a weighted undirected graph become absorbing states of
//! a discrete-time Markov chain and unlabelled nodes become transient
//! states. Absorption probabilities and expected absorption times are
//! obtained from dense linear solves, and a binary classifier assigns
//! labels using an order-statistic threshold on the class probability.
//!
//! The crate also carries the evaluation side of the analysis: confusion
//! matrices, F1, the standardised separation gap, rank/product-moment
//! correlations and ordinary least squares with t-test p-values.

pub mod chain;
pub mod congress;
pub mod error;
pub mod graph;
pub mod labeller;
pub mod linalg;
pub mod metrics;
pub mod numfmt;
pub mod regression;

pub use chain::{AbsorbingChain, AbsorptionResult, WalkOutcome, WalkSampler};
pub use error::{Error, Result};
pub use graph::{GraphBuilder, Label, NodeId, Reachability, WeightedGraph};
pub use labeller::{glass_run, ClassCount, FilterPolicy, GlassOptions, GlassResult, LabelDistribution, Threshold};
pub use linalg::DenseMatrix;
