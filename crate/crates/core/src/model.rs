//! The labelled pair: the blue graph sits on the ground set under the
//! identity, the red graph is placed by a permutation, and a pair of labels
//! that is an edge in both is purple.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cycles::{find_even_short_cycle, is_c4_free};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::swap::SwapCycle;

/// Ordered pair (blue, red) on a common vertex count with `Δ₁ >= Δ₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingInstance {
    blue: Graph,
    red: Graph,
    roles_swapped: bool,
}

impl PackingInstance {
    /// Swaps the two roles when the red graph has the larger maximum degree.
    /// On ties the input order is kept.
    pub fn new(blue: Graph, red: Graph) -> Result<Self> {
        if blue.n() != red.n() {
            return Err(Error::SizeMismatch(blue.n(), red.n()));
        }
        if red.max_degree() > blue.max_degree() {
            Ok(PackingInstance { blue: red, red: blue, roles_swapped: true })
        } else {
            Ok(PackingInstance { blue, red, roles_swapped: false })
        }
    }

    pub fn n(&self) -> usize {
        self.blue.n()
    }

    pub fn blue(&self) -> &Graph {
        &self.blue
    }

    pub fn red(&self) -> &Graph {
        &self.red
    }

    pub fn delta1(&self) -> usize {
        self.blue.max_degree()
    }

    pub fn delta2(&self) -> usize {
        self.red.max_degree()
    }

    /// Whether construction exchanged the two input graphs.
    pub fn roles_swapped(&self) -> bool {
        self.roles_swapped
    }

    /// Whether labels `a` and `b` are joined by a red edge under `lab`.
    pub fn red_edge(&self, lab: &Labelling, a: usize, b: usize) -> bool {
        self.red.has_edge(lab.vertex_of(a), lab.vertex_of(b))
    }

    /// Labels of the red neighbours of label `a` under `lab`.
    pub fn red_neighbors<'a>(&'a self, lab: &'a Labelling, a: usize) -> impl Iterator<Item = usize> + 'a {
        self.red.neighbors(lab.vertex_of(a)).iter().map(move |&w| lab.label_of(w))
    }

    /// The red graph carried onto labels.
    pub fn red_labelled(&self, lab: &Labelling) -> Graph {
        self.red.relabel(lab.perm())
    }

    fn red_edge_after(&self, lab: &Labelling, c: &SwapCycle, a: usize, b: usize) -> bool {
        let va = lab.vertex_of(c.preimage(a));
        let vb = lab.vertex_of(c.preimage(b));
        self.red.has_edge(va, vb)
    }

    /// Purple pairs incident to the labels of `c`, before (`after = false`)
    /// or after applying the swap.
    fn purple_at_cycle(&self, lab: &Labelling, c: &SwapCycle, after: bool) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &s in c.labels() {
            for &j in self.blue.neighbors(s) {
                let red = if after { self.red_edge_after(lab, c, s, j) } else { self.red_edge(lab, s, j) };
                if red {
                    out.push((s.min(j), s.max(j)));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Change in the purple count caused by applying `c`. Only edges incident
    /// to the swapped labels can change.
    pub fn swap_delta(&self, lab: &Labelling, c: &SwapCycle) -> isize {
        let before = self.purple_at_cycle(lab, c, false).len() as isize;
        let after = self.purple_at_cycle(lab, c, true).len() as isize;
        after - before
    }
}

/// The red placement: red vertex `v` carries label `perm[v]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Labelling {
    perm: Vec<usize>,
    inv: Vec<usize>,
}

impl Labelling {
    pub fn identity(n: usize) -> Self {
        Labelling { perm: (0..n).collect(), inv: (0..n).collect() }
    }

    pub fn from_perm(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut inv = vec![usize::MAX; n];
        for (v, &p) in perm.iter().enumerate() {
            if p >= n {
                return Err(Error::InvalidPermutation(format!("label {p} out of range for n = {n}")));
            }
            if inv[p] != usize::MAX {
                return Err(Error::InvalidPermutation(format!("label {p} used twice")));
            }
            inv[p] = v;
        }
        Ok(Labelling { perm, inv })
    }

    /// Fisher–Yates shuffle of the identity.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        Self::from_perm(perm).expect("shuffle of identity is a permutation")
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn label_of(&self, vertex: usize) -> usize {
        self.perm[vertex]
    }

    pub fn vertex_of(&self, label: usize) -> usize {
        self.inv[label]
    }

    /// The vertex labelled `u_k` takes the label `u_{k+1 mod l}`.
    pub(crate) fn apply_in_place(&mut self, c: &SwapCycle) {
        let vertices: Vec<usize> = c.labels().iter().map(|&u| self.inv[u]).collect();
        for (&x, &u) in vertices.iter().zip(c.labels()) {
            let next = c.image(u);
            self.perm[x] = next;
            self.inv[next] = x;
        }
    }
}

impl TryFrom<Vec<usize>> for Labelling {
    type Error = Error;

    fn try_from(perm: Vec<usize>) -> Result<Self> {
        Labelling::from_perm(perm)
    }
}

impl From<Labelling> for Vec<usize> {
    fn from(lab: Labelling) -> Self {
        lab.perm
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurpleReport {
    /// Purple label pairs `(i, j)` with `i < j`, sorted.
    pub purple_edges: Vec<(usize, usize)>,
    pub max_purple_degree: usize,
    pub count: usize,
}

impl PurpleReport {
    fn from_edges(n: usize, purple_edges: Vec<(usize, usize)>) -> Self {
        let mut deg = vec![0usize; n];
        for &(i, j) in &purple_edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        let count = purple_edges.len();
        PurpleReport { purple_edges, max_purple_degree: deg.into_iter().max().unwrap_or(0), count }
    }
}

/// Blue edges whose endpoints are also joined by a red edge under `lab`.
pub fn purple_report(inst: &PackingInstance, lab: &Labelling) -> PurpleReport {
    let edges = inst.blue.edges().filter(|&(i, j)| inst.red_edge(lab, i, j)).collect();
    PurpleReport::from_edges(inst.n(), edges)
}

pub fn is_packing(inst: &PackingInstance, lab: &Labelling) -> bool {
    inst.blue.edges().all(|(i, j)| !inst.red_edge(lab, i, j))
}

/// Incrementally maintained purple graph for a labelling under search.
#[derive(Clone, Debug)]
pub struct PurpleState {
    edges: BTreeSet<(usize, usize)>,
    degree: Vec<usize>,
}

impl PurpleState {
    pub fn new(inst: &PackingInstance, lab: &Labelling) -> Self {
        let report = purple_report(inst, lab);
        let mut degree = vec![0; inst.n()];
        for &(i, j) in &report.purple_edges {
            degree[i] += 1;
            degree[j] += 1;
        }
        PurpleState { edges: report.purple_edges.into_iter().collect(), degree }
    }

    pub fn count(&self) -> usize {
        self.edges.len()
    }

    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0)
    }

    pub fn degree(&self, label: usize) -> usize {
        self.degree[label]
    }

    /// The lexicographically smallest purple edge.
    pub fn lowest_edge(&self) -> Option<(usize, usize)> {
        self.edges.iter().next().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Labels with at least one purple edge, ascending.
    pub fn incident_labels(&self) -> Vec<usize> {
        (0..self.degree.len()).filter(|&v| self.degree[v] > 0).collect()
    }

    pub fn report(&self) -> PurpleReport {
        PurpleReport {
            purple_edges: self.edges.iter().copied().collect(),
            max_purple_degree: self.max_degree(),
            count: self.count(),
        }
    }

    /// Applies `c` to `lab`, touching only purple edges at the swapped labels.
    pub fn apply(&mut self, inst: &PackingInstance, lab: &mut Labelling, c: &SwapCycle) {
        for e in inst.purple_at_cycle(lab, c, false) {
            self.remove(e);
        }
        lab.apply_in_place(c);
        for &s in c.labels() {
            for &j in inst.blue.neighbors(s) {
                if inst.red_edge(lab, s, j) {
                    self.insert((s.min(j), s.max(j)));
                }
            }
        }
        debug_assert_eq!(self.report(), purple_report(inst, lab), "incremental purple update drifted");
    }

    fn insert(&mut self, e: (usize, usize)) {
        if self.edges.insert(e) {
            self.degree[e.0] += 1;
            self.degree[e.1] += 1;
        }
    }

    fn remove(&mut self, e: (usize, usize)) {
        if self.edges.remove(&e) {
            self.degree[e.0] -= 1;
            self.degree[e.1] -= 1;
        }
    }
}

/// Which classical packing conditions and hypotheses an instance meets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionProfile {
    /// `(Δ₁+1)(Δ₂+1) <= n+1`.
    pub bec: bool,
    /// `2Δ₁Δ₂ < n`.
    pub sauer_spencer: bool,
    /// Blue has no 4-, 6- or 8-cycle.
    pub girth_ok_blue: bool,
    pub girth_ok_red: bool,
    /// `Δ₁ >= 940060` or `Δ₂ >= 27620`.
    pub thm12_degree_ok: bool,
    /// Blue is C4-free and `Δ₁ > 34Δ₂`.
    pub thm13_applicable: bool,
}

pub const THM12_DELTA1_MIN: u128 = 940_060;
pub const THM12_DELTA2_MIN: u128 = 27_620;

pub fn bec_condition(n: usize, delta1: usize, delta2: usize) -> bool {
    (delta1 as u128 + 1) * (delta2 as u128 + 1) <= n as u128 + 1
}

pub fn sauer_spencer_condition(n: usize, delta1: usize, delta2: usize) -> bool {
    2 * delta1 as u128 * delta2 as u128 <= (n as u128).saturating_sub(1)
}

pub fn condition_profile(inst: &PackingInstance) -> ConditionProfile {
    let (n, d1, d2) = (inst.n(), inst.delta1(), inst.delta2());
    ConditionProfile {
        bec: bec_condition(n, d1, d2),
        sauer_spencer: sauer_spencer_condition(n, d1, d2),
        girth_ok_blue: find_even_short_cycle(inst.blue()).is_none(),
        girth_ok_red: find_even_short_cycle(inst.red()).is_none(),
        thm12_degree_ok: d1 as u128 >= THM12_DELTA1_MIN || d2 as u128 >= THM12_DELTA2_MIN,
        thm13_applicable: d1 as u128 > 34 * d2 as u128 && is_c4_free(inst.blue()),
    }
}
