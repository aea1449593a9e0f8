//! Cyclic relabellings of the red graph and the searches for swaps that
//! remove purple edges.

use serde::{Deserialize, Serialize};

use crate::analyzer::LabelledPair;
use crate::error::{Error, Result};
use crate::model::{Labelling, PackingInstance, PurpleState};

/// A cycle `(u_0, ..., u_{l-1})` of distinct labels with `l` in `{2, 3}`.
/// Applying it gives the vertex labelled `u_k` the label `u_{k+1 mod l}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SwapCycle {
    labels: Vec<usize>,
}

impl SwapCycle {
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        if !(2..=3).contains(&labels.len()) {
            return Err(Error::InvalidSwap(format!("length must be 2 or 3, got {}", labels.len())));
        }
        for (i, u) in labels.iter().enumerate() {
            if labels[..i].contains(u) {
                return Err(Error::InvalidSwap(format!("label {u} repeated")));
            }
        }
        Ok(SwapCycle { labels })
    }

    pub fn pair(a: usize, b: usize) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn triple(a: usize, b: usize, c: usize) -> Result<Self> {
        Self::new(vec![a, b, c])
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, label: usize) -> bool {
        self.labels.contains(&label)
    }

    /// The label that `label` moves to.
    pub fn image(&self, label: usize) -> usize {
        match self.labels.iter().position(|&u| u == label) {
            Some(k) => self.labels[(k + 1) % self.labels.len()],
            None => label,
        }
    }

    pub fn preimage(&self, label: usize) -> usize {
        let l = self.labels.len();
        match self.labels.iter().position(|&u| u == label) {
            Some(k) => self.labels[(k + l - 1) % l],
            None => label,
        }
    }

    fn check_range(&self, n: usize) -> Result<()> {
        match self.labels.iter().find(|&&u| u >= n) {
            Some(&u) => Err(Error::InvalidSwap(format!("label {u} out of range for n = {n}"))),
            None => Ok(()),
        }
    }
}

impl TryFrom<Vec<usize>> for SwapCycle {
    type Error = Error;

    fn try_from(labels: Vec<usize>) -> Result<Self> {
        SwapCycle::new(labels)
    }
}

impl From<SwapCycle> for Vec<usize> {
    fn from(c: SwapCycle) -> Self {
        c.labels
    }
}

pub fn apply_swap(lab: &Labelling, c: &SwapCycle) -> Result<Labelling> {
    c.check_range(lab.n())?;
    let mut out = lab.clone();
    out.apply_in_place(c);
    Ok(out)
}

fn red_blue_link(inst: &PackingInstance, lab: &Labelling, from: usize, to: usize) -> bool {
    inst.red_neighbors(lab, from).any(|x| inst.blue().has_edge(x, to))
}

/// Checks the two hypotheses under which a swap leaves no purple edge at
/// any of its labels:
/// (a) no red–blue-link from `u_k` to `u_{k+1}`;
/// (b) if `u_k u_k'` is red then `u_{k+1} u_{k'+1}` is not blue.
pub fn is_safe_swap(inst: &PackingInstance, lab: &Labelling, c: &SwapCycle) -> bool {
    let u = c.labels();
    let l = u.len();
    if u.iter().any(|&x| x >= inst.n()) || lab.n() != inst.n() {
        return false;
    }
    for k in 0..l {
        if red_blue_link(inst, lab, u[k], u[(k + 1) % l]) {
            return false;
        }
        for k2 in 0..l {
            if k != k2 && inst.red_edge(lab, u[k], u[k2]) && inst.blue().has_edge(u[(k + 1) % l], u[(k2 + 1) % l]) {
                return false;
            }
        }
    }
    true
}

/// Labels with a red–blue- or blue–red-link from `u`, as a membership mask.
fn linked_mask(inst: &PackingInstance, lab: &Labelling, u: usize) -> Vec<bool> {
    let mut mask = vec![false; inst.n()];
    for x in inst.red_neighbors(lab, u) {
        for &w in inst.blue().neighbors(x) {
            mask[w] = true;
        }
    }
    for &x in inst.blue().neighbors(u) {
        for w in inst.red_neighbors(lab, x) {
            mask[w] = true;
        }
    }
    mask
}

/// Partners for a 2-swap at `u`: labels without a link from `u` first,
/// then the rest, each group ascending.
pub(crate) fn two_swap_candidates(inst: &PackingInstance, lab: &Labelling, u: usize) -> Vec<usize> {
    let linked = linked_mask(inst, lab, u);
    let mut out: Vec<usize> = (0..inst.n()).filter(|&w| w != u && !linked[w]).collect();
    out.extend((0..inst.n()).filter(|&w| w != u && linked[w]));
    out
}

/// Some 2-swap that strictly lowers the purple count, if one exists.
///
/// A swap avoiding every purple-incident label leaves all purple edges in
/// place, so it suffices to scan the pairs containing at least one
/// purple-incident label; this covers every improving pair.
pub fn find_reducing_2swap(inst: &PackingInstance, lab: &Labelling) -> Option<SwapCycle> {
    let state = PurpleState::new(inst, lab);
    find_reducing_2swap_with(inst, lab, &state)
}

pub(crate) fn find_reducing_2swap_with(inst: &PackingInstance, lab: &Labelling, state: &PurpleState) -> Option<SwapCycle> {
    for u in state.incident_labels() {
        for w in two_swap_candidates(inst, lab, u) {
            if state.degree(w) > 0 && w < u {
                continue; // tried from w's side already
            }
            let c = SwapCycle { labels: vec![u, w] };
            if inst.swap_delta(lab, &c) < 0 {
                return Some(c);
            }
        }
    }
    None
}

/// Some 2-swap `(u, w)` at the purple endpoint `u` that lowers the purple count.
pub(crate) fn find_reducing_2swap_at(inst: &PackingInstance, lab: &Labelling, u: usize) -> Option<SwapCycle> {
    two_swap_candidates(inst, lab, u)
        .into_iter()
        .map(|w| SwapCycle { labels: vec![u, w] })
        .find(|c| inst.swap_delta(lab, c) < 0)
}

/// Looks for `a ∈ A*(u)`, `b ∈ B(u)` with no red–blue-link from `a` to `b`
/// and returns the `(u, a, b)`-swap if it lowers the purple count.
pub fn find_claim32_3swap(inst: &PackingInstance, lab: &Labelling, u: usize) -> Result<Option<SwapCycle>> {
    let pair = LabelledPair::new(inst, lab);
    find_claim32_3swap_in(&pair, inst, lab, u)
}

pub(crate) fn find_claim32_3swap_in(
    pair: &LabelledPair<'_>,
    inst: &PackingInstance,
    lab: &Labelling,
    u: usize,
) -> Result<Option<SwapCycle>> {
    if u >= inst.n() {
        return Err(Error::VertexOutOfRange { vertex: u, n: inst.n() });
    }
    if !inst.blue().neighbors(u).iter().any(|&j| inst.red_edge(lab, u, j)) {
        return Err(Error::Domain(format!("label {u} is not incident to a purple edge")));
    }
    let profile = pair.profile(u);
    for a in profile.a_star.iter() {
        for b in profile.b_set.iter() {
            if pair.red_blue_link(a, b) {
                continue;
            }
            let c = SwapCycle { labels: vec![u, a, b] };
            if inst.swap_delta(lab, &c) < 0 {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::model::purple_report;

    fn g(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn cycle_validation() {
        assert!(SwapCycle::new(vec![1]).is_err());
        assert!(SwapCycle::new(vec![1, 2, 3, 4]).is_err());
        assert!(SwapCycle::new(vec![1, 1]).is_err());
        assert!(apply_swap(&Labelling::identity(3), &SwapCycle::pair(0, 3).unwrap()).is_err());
        assert!(serde_json::from_str::<SwapCycle>("[2,2]").is_err());
    }

    #[test]
    fn apply_examples() {
        let id = Labelling::identity(4);
        let t = apply_swap(&id, &SwapCycle::pair(0, 1).unwrap()).unwrap();
        assert_eq!(t.perm(), &[1, 0, 2, 3]);
        let c = SwapCycle::triple(0, 1, 2).unwrap();
        let r = apply_swap(&id, &c).unwrap();
        assert_eq!(r.perm(), &[1, 2, 0, 3]);

        let start = Labelling::from_perm(vec![3, 1, 0, 2]).unwrap();
        let mut lab = start.clone();
        for _ in 0..3 {
            lab = apply_swap(&lab, &SwapCycle::triple(2, 0, 3).unwrap()).unwrap();
        }
        assert_eq!(lab, start);
    }

    #[test]
    fn safe_when_everything_is_edgeless() {
        let e = Graph::edgeless(4).unwrap();
        let inst = PackingInstance::new(e.clone(), e).unwrap();
        assert!(is_safe_swap(&inst, &Labelling::identity(4), &SwapCycle::triple(0, 1, 2).unwrap()));
    }

    #[test]
    fn link_makes_swap_unsafe() {
        // red 0-2 then blue 2-1: a red–blue-link from 0 to 1
        let inst = PackingInstance::new(g(3, &[(1, 2)]), g(3, &[(0, 2)])).unwrap();
        assert!(!is_safe_swap(&inst, &Labelling::identity(3), &SwapCycle::pair(0, 1).unwrap()));
    }

    #[test]
    fn swapping_with_isolated_label_clears_purple() {
        let e = g(4, &[(0, 1)]);
        let inst = PackingInstance::new(e.clone(), e).unwrap();
        let lab = Labelling::identity(4);
        let c = SwapCycle::pair(0, 3).unwrap();
        assert!(is_safe_swap(&inst, &lab, &c));
        assert_eq!(purple_report(&inst, &lab).count, 1);
        let after = apply_swap(&lab, &c).unwrap();
        assert_eq!(purple_report(&inst, &after).count, 0);
        assert_eq!(inst.swap_delta(&lab, &c), -1);
    }

    #[test]
    fn reducing_2swap_examples() {
        let m = g(4, &[(0, 1), (2, 3)]);
        let inst = PackingInstance::new(m.clone(), g(4, &[(0, 2), (1, 3)])).unwrap();
        assert!(find_reducing_2swap(&inst, &Labelling::identity(4)).is_none());

        let e = g(4, &[(0, 1)]);
        let inst = PackingInstance::new(e.clone(), e).unwrap();
        let lab = Labelling::identity(4);
        let c = find_reducing_2swap(&inst, &lab).unwrap();
        // brute force over all six transpositions
        let mut reducing = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                let after = apply_swap(&lab, &SwapCycle::pair(a, b).unwrap()).unwrap();
                if purple_report(&inst, &after).count == 0 {
                    reducing.push((a, b));
                }
            }
        }
        assert_eq!(reducing, vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
        let (a, b) = (c.labels()[0].min(c.labels()[1]), c.labels()[0].max(c.labels()[1]));
        assert!(reducing.contains(&(a, b)));
    }

    #[test]
    fn claim32_requires_purple_endpoint() {
        let e = g(4, &[(0, 1)]);
        let inst = PackingInstance::new(e.clone(), e).unwrap();
        assert!(find_claim32_3swap(&inst, &Labelling::identity(4), 2).is_err());
        // A*(0) is empty here
        assert_eq!(find_claim32_3swap(&inst, &Labelling::identity(4), 0).unwrap(), None);
    }

    #[test]
    fn claim32_finds_unlinked_pair() {
        // blue: 0-1, 2-3, 2-5 ; red: 0-1, 0-3, 1-4
        // N2(N1(0)) = {0, 4}, N1(N2(0)) = {0, 2}, so A*(0) = {4} and B(0) = {2};
        // label 4 reaches only 1 in red, and 1-2 is not blue.
        let blue = g(6, &[(0, 1), (2, 3), (2, 5)]);
        let red = g(6, &[(0, 1), (0, 3), (1, 4)]);
        let inst = PackingInstance::new(blue, red).unwrap();
        assert!(!inst.roles_swapped());
        let lab = Labelling::identity(6);
        let before = purple_report(&inst, &lab).count;
        let c = find_claim32_3swap(&inst, &lab, 0).unwrap().unwrap();
        assert_eq!(c.labels(), &[0, 4, 2]);
        let after = purple_report(&inst, &apply_swap(&lab, &c).unwrap()).count;
        assert!(after < before);
    }
}
