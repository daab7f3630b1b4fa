//! Monte Carlo measurement of the giant-component fraction.
//!
//! For each θ on a grid the per-link singlet probabilities are computed once,
//! then every ensemble member converts each link independently and the
//! largest connected component of the successful links is measured.
//!
//! Randomness is a ChaCha8 stream per `(θ index, ensemble index)` cell, keyed
//! by the master seed, so results do not depend on how cells are scheduled
//! across workers. Lattice edges always draw first, in lattice order; the GCP
//! pairs beyond the lattice draw afterwards. CEP and GCP runs with the same
//! seed therefore share the uniform draw of every lattice edge.

mod union_find;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use union_find::DisjointSet;

use crate::entanglement::{
    concurrence_of_theta, gcp_pair_concurrence, singlet_prob_of_concurrence, singlet_prob_of_theta,
    SingletProb, ThetaNorm,
};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeKind, NodeId};
use crate::paths::{pair_index, PathSummary, PathTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// General concurrence percolation: a direct link for every node pair.
    Gcp,
    /// Classical entanglement percolation: singlet conversion on lattice edges only.
    Cep,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Gcp => "gcp",
            Protocol::Cep => "cep",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gcp" => Ok(Protocol::Gcp),
            "cep" => Ok(Protocol::Cep),
            other => Err(Error::Usage(format!("unknown protocol `{other}`"))),
        }
    }
}

/// Which node pairs receive a link, in sampling order.
///
/// Lattice edges come first in lattice order. For GCP the remaining pairs
/// follow in lexicographic order, optionally thinned by a deterministic
/// per-pair coin.
#[derive(Debug, Clone)]
pub struct PairLayout {
    protocol: Protocol,
    node_count: usize,
    edge_count: usize,
    pairs: Vec<(NodeId, NodeId)>,
    paths: Vec<PathSummary>,
}

impl PairLayout {
    pub fn new(lattice: &Lattice, table: Option<&PathTable>, protocol: Protocol) -> Result<Self> {
        Self::with_pair_fraction(lattice, table, protocol, 1.0, 0)
    }

    /// GCP layout keeping each non-neighbour pair with probability
    /// `fraction`, decided once per pair from `seed`.
    pub fn with_pair_fraction(
        lattice: &Lattice,
        table: Option<&PathTable>,
        protocol: Protocol,
        fraction: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::Domain(format!(
                "pair fraction {fraction} not in (0, 1]"
            )));
        }
        let n = lattice.node_count();
        let mut pairs: Vec<(NodeId, NodeId)> = lattice.edges().to_vec();
        let mut paths = vec![PathSummary::new(1, 1); pairs.len()];

        if protocol == Protocol::Gcp {
            let table = table
                .ok_or_else(|| Error::Consistency("GCP needs the lattice's path table".into()))?;
            if !table.matches(lattice) {
                return Err(Error::Consistency(format!(
                    "path table for {} size {} does not match {} size {}",
                    table.kind(),
                    table.size(),
                    lattice.kind(),
                    lattice.size()
                )));
            }
            let mut is_edge = vec![false; n * n.saturating_sub(1) / 2];
            for &(u, v) in lattice.edges() {
                is_edge[pair_index(n, u.index(), v.index())] = true;
            }
            let mut coin = ChaCha8Rng::seed_from_u64(seed);
            for (idx, (u, v, summary)) in table.iter().enumerate() {
                if is_edge[idx] {
                    if summary != PathSummary::new(1, 1) {
                        return Err(Error::Consistency(format!(
                            "lattice edge ({u}, {v}) has path summary {summary:?}"
                        )));
                    }
                    continue;
                }
                if fraction < 1.0 && coin.random::<f64>() >= fraction {
                    continue;
                }
                pairs.push((u, v));
                paths.push(summary);
            }
        }

        Ok(PairLayout {
            protocol,
            node_count: n,
            edge_count: lattice.edge_count(),
            pairs,
            paths,
        })
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(NodeId, NodeId)] {
        &self.pairs
    }

    /// Link probabilities at one θ.
    pub fn edge_probs(&self, theta: ThetaNorm) -> Result<ProbabilisticEdgeSet> {
        let direct = singlet_prob_of_theta(theta);
        let c_edge = concurrence_of_theta(theta);
        let probs = self
            .paths
            .iter()
            .enumerate()
            .map(|(i, &summary)| {
                // lattice edges keep the direct conversion probability exactly
                if i < self.edge_count {
                    return Ok(direct);
                }
                gcp_pair_concurrence(c_edge, summary).map(singlet_prob_of_concurrence)
            })
            .collect::<Result<Vec<SingletProb>>>()?;
        Ok(ProbabilisticEdgeSet {
            protocol: self.protocol,
            theta,
            node_count: self.node_count,
            pairs: self.pairs.clone(),
            probs,
        })
    }
}

/// Candidate links with their singlet-conversion probabilities at one θ.
#[derive(Debug, Clone)]
pub struct ProbabilisticEdgeSet {
    pub protocol: Protocol,
    pub theta: ThetaNorm,
    pub node_count: usize,
    pub pairs: Vec<(NodeId, NodeId)>,
    pub probs: Vec<SingletProb>,
}

impl ProbabilisticEdgeSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((NodeId, NodeId), SingletProb)> + '_ {
        self.pairs.iter().copied().zip(self.probs.iter().copied())
    }

    /// One realisation: the links whose conversion succeeded.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<(NodeId, NodeId)> {
        self.iter()
            .filter(|(_, p)| rng.random::<f64>() < p.value())
            .map(|(pair, _)| pair)
            .collect()
    }
}

/// Builds the probabilistic link set of `protocol` at one θ.
pub fn build_edge_probs(
    lattice: &Lattice,
    table: &PathTable,
    theta: ThetaNorm,
    protocol: Protocol,
) -> Result<ProbabilisticEdgeSet> {
    if !table.matches(lattice) {
        return Err(Error::Consistency(
            "path table does not match lattice".into(),
        ));
    }
    PairLayout::new(lattice, Some(table), protocol)?.edge_probs(theta)
}

/// Largest connected component over `node_count`, as a fraction of `node_count`.
pub fn giant_fraction(node_count: usize, edges: &[(NodeId, NodeId)]) -> Result<f64> {
    if node_count == 0 {
        return Err(Error::Domain("empty graph".into()));
    }
    let mut ds = DisjointSet::new(node_count);
    for &(u, v) in edges {
        if u.index() >= node_count || v.index() >= node_count {
            return Err(Error::Domain(format!(
                "edge ({u}, {v}) outside {node_count} nodes"
            )));
        }
        ds.union(u.index(), v.index());
    }
    Ok(ds.largest() as f64 / node_count as f64)
}

/// RNG for one `(θ index, ensemble index)` cell.
pub fn cell_rng(master_seed: u64, theta_index: usize, ensemble: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((theta_index as u64) << 32) | ensemble as u64);
    rng
}

fn realise(set: &ProbabilisticEdgeSet, rng: &mut ChaCha8Rng, ds: &mut DisjointSet) -> f64 {
    ds.reset();
    for ((u, v), p) in set.iter() {
        if rng.random::<f64>() < p.value() {
            ds.union(u.index(), v.index());
        }
    }
    ds.largest() as f64 / set.node_count as f64
}

/// `n` uniform points on `[min, max]`; a single point sits at `min`.
pub fn theta_grid(min: f64, max: f64, points: usize) -> Result<Vec<ThetaNorm>> {
    if points == 0 {
        return Err(Error::Usage("theta grid needs at least one point".into()));
    }
    if min.is_nan() || max.is_nan() || min > max {
        return Err(Error::Usage(format!("theta range [{min}, {max}] is empty")));
    }
    if points > 1 && min == max {
        return Err(Error::Usage("theta range collapses to a point".into()));
    }
    (0..points)
        .map(|i| {
            let t = if points == 1 {
                min
            } else if i + 1 == points {
                max
            } else {
                min + (max - min) * i as f64 / (points - 1) as f64
            };
            ThetaNorm::new(t)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub protocol: Protocol,
    pub grid: Vec<ThetaNorm>,
    pub ensembles: usize,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Fraction of non-neighbour GCP pairs that receive a link.
    pub pair_fraction: f64,
}

impl SweepConfig {
    pub fn new(protocol: Protocol, grid: Vec<ThetaNorm>, ensembles: usize, seed: u64) -> Self {
        SweepConfig {
            protocol,
            grid,
            ensembles,
            seed,
            workers: None,
            pair_fraction: 1.0,
        }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.ensembles == 0 {
            return Err(Error::Domain("ensemble count must be at least 1".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::Domain("theta grid is empty".into()));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "theta grid must be strictly increasing".into(),
            ));
        }
        if self.workers == Some(0) {
            return Err(Error::Domain("worker count must be at least 1".into()));
        }
        if self.grid.len() > u32::MAX as usize || self.ensembles > u32::MAX as usize {
            return Err(Error::Domain("grid or ensemble count exceeds 2^32".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub theta: f64,
    /// Edge concurrence at `theta`.
    pub c: f64,
    pub p_mean: f64,
    pub p_stderr: f64,
}

/// Ensemble-averaged giant-component fraction `P(θ)` for one lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationCurve {
    pub kind: LatticeKind,
    pub node_count: usize,
    pub protocol: Protocol,
    pub ensembles: usize,
    pub seed: u64,
    pub points: Vec<CurvePoint>,
}

impl PercolationCurve {
    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.theta)
    }
}

/// Runs the Monte Carlo sweep over the θ grid.
pub fn sweep(
    lattice: &Lattice,
    table: Option<&PathTable>,
    config: &SweepConfig,
) -> Result<PercolationCurve> {
    config.validate()?;
    let layout = PairLayout::with_pair_fraction(
        lattice,
        table,
        config.protocol,
        config.pair_fraction,
        config.seed ^ 0x9e37_79b9_7f4a_7c15,
    )?;
    sweep_layout(lattice.kind(), &layout, config)
}

pub fn sweep_layout(
    kind: LatticeKind,
    layout: &PairLayout,
    config: &SweepConfig,
) -> Result<PercolationCurve> {
    config.validate()?;
    if layout.protocol() != config.protocol {
        return Err(Error::Consistency(
            "layout protocol differs from sweep protocol".into(),
        ));
    }
    let sets = config
        .grid
        .iter()
        .map(|&t| layout.edge_probs(t))
        .collect::<Result<Vec<_>>>()?;

    let ensembles = config.ensembles;
    let cells = sets.len() * ensembles;
    let n = layout.node_count();
    let run = || -> Vec<f64> {
        (0..cells)
            .into_par_iter()
            .map_init(
                || DisjointSet::new(n),
                |ds, cell| {
                    let (ti, e) = (cell / ensembles, cell % ensembles);
                    let mut rng = cell_rng(config.seed, ti, e);
                    realise(&sets[ti], &mut rng, ds)
                },
            )
            .collect()
    };
    let samples = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let points = config
        .grid
        .iter()
        .zip(samples.chunks_exact(ensembles))
        .map(|(&t, chunk)| {
            let (mean, stderr) = mean_stderr(chunk);
            CurvePoint {
                theta: t.value(),
                c: concurrence_of_theta(t).value(),
                p_mean: mean,
                p_stderr: stderr,
            }
        })
        .collect();

    Ok(PercolationCurve {
        kind,
        node_count: n,
        protocol: config.protocol,
        ensembles,
        seed: config.seed,
        points,
    })
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    if xs.iter().all(|&x| x == xs[0]) {
        return (xs[0], 0.0);
    }
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}
