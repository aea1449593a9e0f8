//! Exact answers for small instances.
//!
//! `exact_pack` is a branch-and-bound over partial placements of the red
//! vertices; `min_purple_labellings` enumerates every permutation and is the
//! plain reference the search is checked against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{bec_condition, purple_report, Labelling, PackingInstance};

/// Largest `n` accepted by the full enumerations.
pub const ENUMERATION_LIMIT: usize = 8;

/// Refuses instances above `limit`; `node_budget` caps the search and makes
/// the result a bracket when exhausted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactConfig {
    pub limit: usize,
    pub node_budget: Option<u64>,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig { limit: 12, node_budget: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub packable: bool,
    /// The best purple count found; exact when `complete`.
    pub min_purple: usize,
    /// A proven lower bound on the purple count.
    pub lower_bound: usize,
    pub witness: Option<Labelling>,
    pub nodes_explored: u64,
    pub complete: bool,
}

/// Purple edges forced by degrees alone: a label `i` with blue degree `d₁`
/// receiving a red vertex of degree `d₂` has at least `d₁ + d₂ - (n-1)`
/// purple edges. The summand is convex in `d₁ + d₂`, so pairing degrees in
/// opposite order gives the smallest total over all placements.
fn degree_lower_bound(inst: &PackingInstance) -> usize {
    let n = inst.n();
    let mut blue: Vec<usize> = (0..n).map(|v| inst.blue().degree(v)).collect();
    let mut red: Vec<usize> = (0..n).map(|v| inst.red().degree(v)).collect();
    blue.sort_unstable();
    red.sort_unstable();
    let forced: usize = blue.iter().zip(red.iter().rev()).map(|(&b, &r)| (b + r).saturating_sub(n - 1)).sum();
    forced.div_ceil(2)
}

struct Search<'a> {
    inst: &'a PackingInstance,
    order: Vec<usize>,
    /// `place[v]` is the label of red vertex `v`, or `usize::MAX`.
    place: Vec<usize>,
    used: Vec<bool>,
    best: usize,
    best_place: Vec<usize>,
    floor: usize,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn run(&mut self, depth: usize, purple: usize) {
        if self.best <= self.floor || self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if depth == self.order.len() {
            if purple < self.best {
                self.best = purple;
                self.best_place.clone_from(&self.place);
            }
            return;
        }
        let v = self.order[depth];
        let n = self.inst.n();
        for label in 0..n {
            if self.used[label] {
                continue;
            }
            let added = self
                .inst
                .red()
                .neighbors(v)
                .iter()
                .filter(|&&w| self.place[w] != usize::MAX && self.inst.blue().has_edge(label, self.place[w]))
                .count();
            if purple + added >= self.best {
                continue;
            }
            self.place[v] = label;
            self.used[label] = true;
            self.run(depth + 1, purple + added);
            self.place[v] = usize::MAX;
            self.used[label] = false;
            if self.best <= self.floor || self.exhausted {
                return;
            }
        }
    }
}

/// Packability and the minimum purple count by branch-and-bound.
pub fn exact_pack(inst: &PackingInstance, cfg: &ExactConfig) -> Result<OracleResult> {
    let n = inst.n();
    if n > cfg.limit {
        return Err(Error::SizeLimit { n, limit: cfg.limit });
    }
    let identity = Labelling::identity(n);
    let start = purple_report(inst, &identity).count;
    let floor = degree_lower_bound(inst);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(inst.red().degree(v)), v));
    let mut search = Search {
        inst,
        order,
        place: vec![usize::MAX; n],
        used: vec![false; n],
        best: start,
        best_place: identity.perm().to_vec(),
        floor,
        nodes: 0,
        budget: cfg.node_budget.unwrap_or(u64::MAX),
        exhausted: false,
    };
    search.run(0, 0);

    let witness = Labelling::from_perm(search.best_place)?;
    debug_assert_eq!(purple_report(inst, &witness).count, search.best);
    let complete = !search.exhausted;
    let lower_bound = if complete { search.best } else { floor.min(search.best) };
    Ok(OracleResult {
        packable: search.best == 0,
        min_purple: search.best,
        lower_bound,
        witness: Some(witness),
        nodes_explored: search.nodes,
        complete,
    })
}

/// Calls `visit` on every permutation of `0..n` (Heap's algorithm).
pub(crate) fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    visit(&perm);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Every labelling with the fewest purple edges, sorted by permutation.
pub fn min_purple_labellings(inst: &PackingInstance) -> Result<Vec<Labelling>> {
    let n = inst.n();
    if n > ENUMERATION_LIMIT {
        return Err(Error::SizeLimit { n, limit: ENUMERATION_LIMIT });
    }
    let blue_edges: Vec<(usize, usize)> = inst.blue().edges().collect();
    let red = inst.red();
    let mut best = usize::MAX;
    let mut optima: Vec<Vec<usize>> = Vec::new();
    let mut inv = vec![0usize; n];
    for_each_permutation(n, |perm| {
        for (v, &l) in perm.iter().enumerate() {
            inv[l] = v;
        }
        let count = blue_edges.iter().filter(|&&(i, j)| red.has_edge(inv[i], inv[j])).count();
        if count < best {
            best = count;
            optima.clear();
        }
        if count == best {
            optima.push(perm.to_vec());
        }
    });
    optima.sort_unstable();
    optima.into_iter().map(Labelling::from_perm).collect()
}

/// Whether every labelling with the fewest purple edges has purple maximum
/// degree at most 1. Requires `(Δ₁+1)(Δ₂+1) <= n+1`.
pub fn verify_eaton_smallscale(inst: &PackingInstance) -> Result<bool> {
    if !bec_condition(inst.n(), inst.delta1(), inst.delta2()) {
        return Err(Error::Precondition(format!(
            "(Δ₁+1)(Δ₂+1) <= n+1 fails: Δ₁ = {}, Δ₂ = {}, n = {}",
            inst.delta1(),
            inst.delta2(),
            inst.n()
        )));
    }
    Ok(min_purple_labellings(inst)?.iter().all(|lab| purple_report(inst, lab).max_purple_degree <= 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{standard_family, Family};
    use crate::graph::Graph;

    fn inst(blue: Graph, red: Graph) -> PackingInstance {
        PackingInstance::new(blue, red).unwrap()
    }

    #[test]
    fn star_against_matching_does_not_pack() {
        let m = standard_family(Family::Matching, 4).unwrap();
        let star = standard_family(Family::Star, 4).unwrap();
        let r = exact_pack(&inst(m, star), &ExactConfig::default()).unwrap();
        assert!(!r.packable && r.complete);
        assert_eq!(r.min_purple, 1);
    }

    #[test]
    fn edgeless_red_packs() {
        let c = standard_family(Family::Cycle, 6).unwrap();
        let r = exact_pack(&inst(c, Graph::edgeless(6).unwrap()), &ExactConfig::default()).unwrap();
        assert!(r.packable);
        assert_eq!((r.min_purple, r.lower_bound), (0, 0));
    }

    #[test]
    fn triangles() {
        let k3 = standard_family(Family::Complete, 3).unwrap();
        let i = inst(k3.clone(), k3);
        let r = exact_pack(&i, &ExactConfig::default()).unwrap();
        assert_eq!((r.packable, r.min_purple), (false, 3));
        assert_eq!(min_purple_labellings(&i).unwrap().len(), 6);
    }

    #[test]
    fn single_edge_optima() {
        let e = Graph::new(2, [(0, 1)]).unwrap();
        let all = min_purple_labellings(&inst(e.clone(), e.clone())).unwrap();
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|l| purple_report(&inst(e.clone(), e.clone()), l).count == 1));
    }

    #[test]
    fn limits_and_budget() {
        let big = Graph::edgeless(13).unwrap();
        let i = inst(big.clone(), big);
        assert!(matches!(exact_pack(&i, &ExactConfig::default()), Err(Error::SizeLimit { .. })));
        assert!(min_purple_labellings(&inst(Graph::edgeless(9).unwrap(), Graph::edgeless(9).unwrap())).is_err());

        let c = standard_family(Family::Cycle, 8).unwrap();
        let r = exact_pack(&inst(c.clone(), c), &ExactConfig { limit: 12, node_budget: Some(2) }).unwrap();
        assert!(!r.complete);
        assert!(r.lower_bound <= r.min_purple);
    }

    #[test]
    fn eaton_checks() {
        let m = standard_family(Family::Matching, 4).unwrap();
        assert!(verify_eaton_smallscale(&inst(m.clone(), m)).unwrap());
        let k3 = standard_family(Family::Complete, 3).unwrap();
        assert!(matches!(verify_eaton_smallscale(&inst(k3.clone(), k3)), Err(Error::Precondition(_))));
    }

    #[test]
    fn heap_visits_everything_once() {
        let mut seen = std::collections::HashSet::new();
        for_each_permutation(5, |p| {
            assert!(seen.insert(p.to_vec()));
        });
        assert_eq!(seen.len(), 120);
    }
}
