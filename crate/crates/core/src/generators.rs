//! Reproducible test instances.
//!
//! Random graphs are built by greedy edge insertion in a seeded random
//! order. An edge is accepted when both endpoints are below the degree cap
//! and, if requested, it closes no 4-, 6- or 8-cycle. Odd cycles are allowed.
//!
//! Graphs of even girth at least ten become very sparse as the degree grows
//! (Moore-type bounds), so the generator is meant for `delta_cap <= 16` and
//! `n <= 5000`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cycles::closes_even_short_cycle;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Up to this many vertex pairs every pair is visited once, in random order.
/// Larger graphs sample pairs among unsaturated vertices instead.
pub const FULL_PASS_MAX_PAIRS: usize = 2_000_000;

/// In sampling mode, stop after this many consecutive rejections per vertex.
const STALL_PER_VERTEX: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub delta_cap: usize,
    pub forbid_even_short_cycles: bool,
    pub seed: u64,
    #[serde(default)]
    pub edge_budget: Option<usize>,
}

impl GenSpec {
    pub fn new(n: usize, delta_cap: usize, seed: u64) -> Self {
        GenSpec { n, delta_cap, forbid_even_short_cycles: false, seed, edge_budget: None }
    }

    pub fn forbid_even_short_cycles(mut self, yes: bool) -> Self {
        self.forbid_even_short_cycles = yes;
        self
    }

    pub fn edge_budget(mut self, budget: Option<usize>) -> Self {
        self.edge_budget = budget;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub graph: Graph,
    /// The edge budget was set and could not be met.
    pub shortfall: bool,
}

struct Builder {
    adj: Vec<Vec<usize>>,
    cap: usize,
    forbid: bool,
    edges: usize,
}

impl Builder {
    fn try_add(&mut self, u: usize, v: usize) -> bool {
        if u == v || self.adj[u].len() >= self.cap || self.adj[v].len() >= self.cap || self.adj[u].contains(&v) {
            return false;
        }
        if self.forbid && closes_even_short_cycle(&self.adj, u, v) {
            return false;
        }
        self.adj[u].push(v);
        self.adj[v].push(u);
        self.edges += 1;
        true
    }

    fn finish(mut self) -> Graph {
        for list in &mut self.adj {
            list.sort_unstable();
        }
        Graph::from_sorted_adjacency(self.adj)
    }
}

pub fn generate(spec: &GenSpec) -> Result<Generated> {
    if spec.n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut b = Builder { adj: vec![Vec::new(); n], cap: spec.delta_cap, forbid: spec.forbid_even_short_cycles, edges: 0 };
    let budget = spec.edge_budget.unwrap_or(usize::MAX);
    let pairs = n * (n - 1) / 2;

    if b.cap > 0 && budget > 0 && pairs > 0 {
        if pairs <= FULL_PASS_MAX_PAIRS {
            let mut order: Vec<(u32, u32)> =
                (0..n as u32).flat_map(|u| (u + 1..n as u32).map(move |v| (u, v))).collect();
            order.shuffle(&mut rng);
            for (u, v) in order {
                if b.try_add(u as usize, v as usize) && b.edges >= budget {
                    break;
                }
            }
        } else {
            let mut open: Vec<usize> = (0..n).collect();
            let mut stall = 0;
            let stall_limit = STALL_PER_VERTEX * n;
            while open.len() >= 2 && b.edges < budget && stall < stall_limit {
                let i = rng.random_range(0..open.len());
                let mut j = rng.random_range(0..open.len() - 1);
                if j >= i {
                    j += 1;
                }
                let (u, v) = (open[i], open[j]);
                if b.try_add(u, v) {
                    stall = 0;
                    open.retain(|&w| b.adj[w].len() < b.cap);
                } else {
                    stall += 1;
                }
            }
        }
    }

    let shortfall = spec.edge_budget.is_some_and(|m| b.edges < m);
    Ok(Generated { graph: b.finish(), shortfall })
}

/// Named graph families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Matching,
    Cycle,
    Path,
    Star,
    Complete,
    Edgeless,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "matching" => Family::Matching,
            "cycle" => Family::Cycle,
            "path" => Family::Path,
            "star" => Family::Star,
            "complete" => Family::Complete,
            "edgeless" => Family::Edgeless,
            other => return Err(Error::Domain(format!("unknown graph family `{other}`"))),
        })
    }
}

/// The named graph on `n` vertices. Matchings pair `2i` with `2i + 1` and
/// need even `n`; cycles need `n >= 3`; the star is centred at 0.
pub fn standard_family(family: Family, n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let edges: Vec<(usize, usize)> = match family {
        Family::Matching => {
            if n % 2 != 0 {
                return Err(Error::Domain(format!("a perfect matching needs even n, got {n}")));
            }
            (0..n / 2).map(|i| (2 * i, 2 * i + 1)).collect()
        }
        Family::Cycle => {
            if n < 3 {
                return Err(Error::Domain(format!("a cycle needs n >= 3, got {n}")));
            }
            (0..n).map(|i| (i, (i + 1) % n)).collect()
        }
        Family::Path => (1..n).map(|i| (i - 1, i)).collect(),
        Family::Star => (1..n).map(|i| (0, i)).collect(),
        Family::Complete => (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect(),
        Family::Edgeless => Vec::new(),
    };
    Graph::new(n, edges)
}

/// A seeded uniformly random permutation of the graph's vertices.
pub(crate) fn shuffled_copy<R: Rng>(g: &Graph, rng: &mut R) -> Graph {
    let mut map: Vec<usize> = (0..g.n()).collect();
    map.shuffle(rng);
    g.relabel(&map)
}

/// A random pair of graphs on `n` vertices with max degrees at most the
/// caps, generated from one seed. Used to build test corpora.
pub fn random_pair(n: usize, cap1: usize, cap2: usize, forbid: bool, seed: u64) -> Result<(Graph, Graph)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s1 = rng.random::<u64>();
    let s2 = rng.random::<u64>();
    let budget1 = rng.random_range(0..=n * cap1 / 2);
    let budget2 = rng.random_range(0..=n * cap2 / 2);
    let blue = generate(&GenSpec::new(n, cap1, s1).forbid_even_short_cycles(forbid).edge_budget(Some(budget1)))?.graph;
    let red = generate(&GenSpec::new(n, cap2, s2).forbid_even_short_cycles(forbid).edge_budget(Some(budget2)))?.graph;
    let red = shuffled_copy(&red, &mut rng);
    Ok((blue, red))
}
