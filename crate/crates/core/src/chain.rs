//! Absorbing discrete-time Markov chains built from labelled graphs.
//!
//! Unlabelled nodes are transient states and labelled nodes are absorbing.
//! Only the transient rows `[P_UU | P_UL]` are stored; absorbing rows are
//! the identity and stay implicit.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{reachable_to_labelled, NodeId, WeightedGraph};
use crate::linalg::{solve_refined, DenseMatrix, Lu};

/// Max-norm residual allowed after every solve.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Slack for the `[0, 1]` bounds check on absorption probabilities.
const BOUNDS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AbsorbingChain {
    transient: Vec<NodeId>,
    absorbing: Vec<NodeId>,
    p_uu: DenseMatrix,
    p_ul: DenseMatrix,
}

impl AbsorbingChain {
    /// Transition probabilities `p_ij = a_ij / sum_k a_ik` for every
    /// unlabelled row.
    pub fn from_graph(graph: &WeightedGraph) -> Result<Self> {
        if graph.labelled_count() == 0 {
            return Err(Error::NoLabelledNodes);
        }
        let reach = reachable_to_labelled(graph);
        if !reach.stranded.is_empty() {
            return Err(Error::StrandedNodes(reach.stranded.into_iter().collect()));
        }

        let n = graph.node_count();
        // position of each graph node within its block
        let mut block = vec![(false, 0usize); n];
        let mut transient = Vec::new();
        let mut absorbing = Vec::new();
        for (i, id) in graph.nodes().iter().enumerate() {
            if graph.is_labelled(id) {
                block[i] = (true, absorbing.len());
                absorbing.push(id.clone());
            } else {
                block[i] = (false, transient.len());
                transient.push(id.clone());
            }
        }

        let u = transient.len();
        let mut p_uu = DenseMatrix::zeros(u, u);
        let mut p_ul = DenseMatrix::zeros(u, absorbing.len());
        for (i, id) in graph.nodes().iter().enumerate() {
            let (is_abs, row) = block[i];
            if is_abs {
                continue;
            }
            let degree = graph.degree(i);
            if degree.is_nan() || degree <= 0.0 {
                return Err(Error::ZeroDegree(id.clone()));
            }
            for &(j, w) in graph.neighbours(i) {
                let (to_abs, col) = block[j];
                let p = w / degree;
                if to_abs {
                    p_ul[(row, col)] = p;
                } else {
                    p_uu[(row, col)] = p;
                }
            }
        }
        Ok(AbsorbingChain { transient, absorbing, p_uu, p_ul })
    }

    pub fn transient(&self) -> &[NodeId] {
        &self.transient
    }

    pub fn absorbing(&self) -> &[NodeId] {
        &self.absorbing
    }

    pub fn p_uu(&self) -> &DenseMatrix {
        &self.p_uu
    }

    pub fn p_ul(&self) -> &DenseMatrix {
        &self.p_ul
    }

    pub fn transient_index(&self, id: &NodeId) -> Option<usize> {
        self.transient.binary_search(id).ok()
    }

    /// `I_u - P_UU`.
    pub fn fundamental_system(&self) -> DenseMatrix {
        let u = self.transient.len();
        let mut m = DenseMatrix::identity(u);
        for i in 0..u {
            for j in 0..u {
                m[(i, j)] -= self.p_uu[(i, j)];
            }
        }
        m
    }

    /// Writes `from,to,probability` for every nonzero transient-row entry.
    pub fn write_debug_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["from", "to", "probability"])?;
        for (i, from) in self.transient.iter().enumerate() {
            let targets = self
                .transient
                .iter()
                .zip(self.p_uu.row(i))
                .chain(self.absorbing.iter().zip(self.p_ul.row(i)));
            for (to, p) in targets {
                if *p != 0.0 {
                    w.write_record([from.as_str(), to.as_str(), &p.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Absorption probabilities and expected absorption times for every
/// transient state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsorptionResult {
    pub transient: Vec<NodeId>,
    pub absorbing: Vec<NodeId>,
    /// `h[(i, j)]`: probability that a walk from transient `i` ends in
    /// absorbing state `j`.
    #[serde(skip)]
    pub h: DenseMatrix,
    /// Expected steps to absorption from each transient state.
    pub t: Vec<f64>,
    /// Max residual over the columns of `H`, then for `t`.
    pub residual_norms: (f64, f64),
}

/// Factorises `I_u - P_UU` once and solves for both `H` and `t`.
pub fn solve(chain: &AbsorbingChain) -> Result<AbsorptionResult> {
    let system = chain.fundamental_system();
    let lu = factor(&system, chain)?;
    let (h, res_h) = solve_h(chain, &system, &lu)?;
    let (t, res_t) = solve_t(chain, &system, &lu)?;
    Ok(AbsorptionResult {
        transient: chain.transient.clone(),
        absorbing: chain.absorbing.clone(),
        h,
        t,
        residual_norms: (res_h, res_t),
    })
}

/// Solves `(I_u - P_UU) H = P_UL`.
pub fn absorption_probabilities(chain: &AbsorbingChain) -> Result<DenseMatrix> {
    let system = chain.fundamental_system();
    let lu = factor(&system, chain)?;
    solve_h(chain, &system, &lu).map(|(h, _)| h)
}

/// Solves `(I_u - P_UU) t = 1`.
pub fn expected_absorption_times(chain: &AbsorbingChain) -> Result<Vec<f64>> {
    let system = chain.fundamental_system();
    let lu = factor(&system, chain)?;
    solve_t(chain, &system, &lu).map(|(t, _)| t)
}

fn factor(system: &DenseMatrix, chain: &AbsorbingChain) -> Result<Option<Lu>> {
    if chain.transient.is_empty() {
        return Ok(None);
    }
    Lu::factor(system).map(Some)
}

fn check_residual(residual: f64) -> Result<()> {
    if residual <= RESIDUAL_TOLERANCE {
        Ok(())
    } else {
        Err(Error::ResidualTooLarge { residual, tolerance: RESIDUAL_TOLERANCE })
    }
}

fn solve_h(chain: &AbsorbingChain, system: &DenseMatrix, lu: &Option<Lu>) -> Result<(DenseMatrix, f64)> {
    let (u, l) = (chain.transient.len(), chain.absorbing.len());
    let mut h = DenseMatrix::zeros(u, l);
    let Some(lu) = lu else { return Ok((h, 0.0)) };
    let mut worst = 0.0f64;
    for j in 0..l {
        let (col, res) = solve_refined(system, lu, &chain.p_ul.column(j));
        check_residual(res)?;
        worst = worst.max(res);
        h.set_column(j, &col);
    }
    for i in 0..u {
        for v in h.row_mut(i) {
            if !(-BOUNDS_SLACK..=1.0 + BOUNDS_SLACK).contains(v) {
                return Err(Error::ProbabilityOutOfBounds { node: chain.transient[i].clone(), value: *v });
            }
            // rounding can leave values a few ulps outside [0, 1]
            *v = v.clamp(0.0, 1.0);
        }
    }
    Ok((h, worst))
}

fn solve_t(chain: &AbsorbingChain, system: &DenseMatrix, lu: &Option<Lu>) -> Result<(Vec<f64>, f64)> {
    let Some(lu) = lu else { return Ok((Vec::new(), 0.0)) };
    let ones = vec![1.0; chain.transient.len()];
    let (t, res) = solve_refined(system, lu, &ones);
    check_residual(res)?;
    Ok((t, res))
}

/// Where a simulated walk ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalkOutcome {
    Absorbed { at: NodeId, steps: u64 },
    Timeout { steps: u64 },
}

/// Precomputed cumulative rows for repeated walk simulation.
#[derive(Debug, Clone)]
pub struct WalkSampler<'a> {
    chain: &'a AbsorbingChain,
    // per transient row: (cumulative probability, target) where target < u is
    // transient and target >= u is absorbing (target - u)
    rows: Vec<Vec<(f64, usize)>>,
}

impl<'a> WalkSampler<'a> {
    pub fn new(chain: &'a AbsorbingChain) -> Self {
        let u = chain.transient.len();
        let rows = (0..u)
            .map(|i| {
                let mut acc = 0.0;
                let mut row = Vec::new();
                let entries = chain
                    .p_uu
                    .row(i)
                    .iter()
                    .enumerate()
                    .chain(chain.p_ul.row(i).iter().enumerate().map(|(j, p)| (j + u, p)));
                for (target, &p) in entries {
                    if p > 0.0 {
                        acc += p;
                        row.push((acc, target));
                    }
                }
                row
            })
            .collect();
        WalkSampler { chain, rows }
    }

    /// Runs one walk from transient index `start`. Returns the absorbing
    /// index reached (or `None` on timeout) and the number of steps taken.
    pub fn walk<R: Rng + ?Sized>(&self, start: usize, rng: &mut R, max_steps: u64) -> (Option<usize>, u64) {
        let u = self.rows.len();
        let mut state = start;
        for step in 1..=max_steps {
            let row = &self.rows[state];
            let total = row.last().map_or(1.0, |e| e.0);
            let r = rng.random::<f64>() * total;
            let k = row.partition_point(|&(c, _)| c <= r).min(row.len() - 1);
            let next = row[k].1;
            if next >= u {
                return (Some(next - u), step);
            }
            state = next;
        }
        (None, max_steps)
    }

    pub fn chain(&self) -> &AbsorbingChain {
        self.chain
    }
}

/// Simulates a single seeded random walk from `start`.
pub fn simulate_walk(chain: &AbsorbingChain, start: &NodeId, seed: u64, max_steps: u64) -> Result<WalkOutcome> {
    if max_steps == 0 {
        return Err(Error::InvalidArgument("max_steps must be at least 1".into()));
    }
    let idx = chain.transient_index(start).ok_or_else(|| Error::NotTransient(start.clone()))?;
    let sampler = WalkSampler::new(chain);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match sampler.walk(idx, &mut rng, max_steps) {
        (Some(j), steps) => WalkOutcome::Absorbed { at: chain.absorbing[j].clone(), steps },
        (None, steps) => WalkOutcome::Timeout { steps },
    })
}
