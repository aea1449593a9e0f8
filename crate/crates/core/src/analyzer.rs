//! Mixed second-order neighbourhoods and the bounds built on them.
//!
//! Notation follows the blue/red convention: `N1` is the blue neighbourhood,
//! `N2` the red one (under the current labelling), and `N1(N2(i))` is the set
//! of labels reachable by a red edge followed by a blue edge.
//!
//! Every set is computed exactly. Audits report each term of the bound next
//! to the value it controls, so a failing audit shows which term broke.

use serde::{Deserialize, Serialize};

use crate::cycles::{find_even_short_cycle, is_c4_free};
use crate::error::{Error, Result};
use crate::graph::{composed_unchecked, Graph, VertexSet};
use crate::model::{Labelling, PackingInstance};

/// Slack used by the intersection bounds: `k² = SLACK · (t-1) · Δ`.
pub const SLACK: f64 = 1.37;

/// The blue graph together with the red graph carried onto labels.
pub struct LabelledPair<'a> {
    pub(crate) blue: &'a Graph,
    pub(crate) red: Graph,
    delta1: usize,
    delta2: usize,
}

impl<'a> LabelledPair<'a> {
    pub fn new(inst: &'a PackingInstance, lab: &Labelling) -> Self {
        LabelledPair { blue: inst.blue(), red: inst.red_labelled(lab), delta1: inst.delta1(), delta2: inst.delta2() }
    }

    pub fn n(&self) -> usize {
        self.blue.n()
    }

    fn n1(&self, i: usize) -> VertexSet {
        VertexSet::from_sorted(self.n(), self.blue.neighbors(i).to_vec())
    }

    fn n2(&self, i: usize) -> VertexSet {
        VertexSet::from_sorted(self.n(), self.red.neighbors(i).to_vec())
    }

    /// `N1(N2(i))`.
    pub fn n1n2(&self, i: usize) -> VertexSet {
        composed_unchecked(self.blue, &self.red, i)
    }

    /// `N2(N1(i))`.
    pub fn n2n1(&self, i: usize) -> VertexSet {
        composed_unchecked(&self.red, self.blue, i)
    }

    pub fn red_blue_link(&self, from: usize, to: usize) -> bool {
        self.red.neighbors(from).iter().any(|&x| self.blue.has_edge(x, to))
    }

    pub fn blue_red_link(&self, from: usize, to: usize) -> bool {
        self.blue.neighbors(from).iter().any(|&x| self.red.has_edge(x, to))
    }

    pub fn is_purple(&self, u: usize, v: usize) -> bool {
        self.blue.has_edge(u, v) && self.red.has_edge(u, v)
    }

    pub fn profile(&self, i: usize) -> NeighborhoodProfile {
        let n1 = self.n1(i);
        let n2 = self.n2(i);
        let n1n2 = self.n1n2(i);
        let n2n1 = self.n2n1(i);
        let a_set = n2n1.difference(&n1.union(&n2).union(&n1n2));
        let b_set = n1n2.difference(&n1.union(&n2).union(&n2n1));
        let a_star = n2n1.difference(&n2.union(&n1n2));
        let b_star = n1n2.difference(&n1.union(&n2n1));
        NeighborhoodProfile { focus: i, n1, n2, n1n2, n2n1, a_set, b_set, a_star, b_star }
    }
}

/// The eight neighbourhood sets around a focus label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborhoodProfile {
    pub focus: usize,
    pub n1: VertexSet,
    pub n2: VertexSet,
    pub n1n2: VertexSet,
    pub n2n1: VertexSet,
    /// `A = N2(N1) \ (N1 ∪ N2 ∪ N1(N2))`
    pub a_set: VertexSet,
    /// `B = N1(N2) \ (N1 ∪ N2 ∪ N2(N1))`
    pub b_set: VertexSet,
    /// `A* = N2(N1) \ (N2 ∪ N1(N2))`
    pub a_star: VertexSet,
    /// `B* = N1(N2) \ (N1 ∪ N2(N1))`
    pub b_star: VertexSet,
}

pub fn profile(inst: &PackingInstance, lab: &Labelling, i: usize) -> Result<NeighborhoodProfile> {
    check_labels(inst, lab, &[i])?;
    Ok(LabelledPair::new(inst, lab).profile(i))
}

fn check_labels(inst: &PackingInstance, lab: &Labelling, labels: &[usize]) -> Result<()> {
    if lab.n() != inst.n() {
        return Err(Error::SizeMismatch(lab.n(), inst.n()));
    }
    match labels.iter().find(|&&x| x >= inst.n()) {
        Some(&x) => Err(Error::VertexOutOfRange { vertex: x, n: inst.n() }),
        None => Ok(()),
    }
}

/// Subsets `A_1..A_N` of a universe `X = 0..universe_size`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetFamily {
    pub universe_size: usize,
    pub sets: Vec<Vec<usize>>,
    pub k: f64,
    pub t: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorradiCheck {
    /// All sets have at least `k` elements and pairwise intersections of at most `t-1`.
    pub hypotheses_ok: bool,
    pub n_sets: usize,
    /// `|X| (k - (t-1)) / (k² - (t-1)|X|)`
    pub bound: f64,
    /// `Some(N <= bound)` when the hypotheses hold.
    pub holds: Option<bool>,
}

/// Corrádi's counting bound for families with small pairwise intersections.
pub fn corradi_bound(fam: &SetFamily) -> Result<CorradiCheck> {
    if fam.t == 0 {
        return Err(Error::Precondition("t must be at least 1".into()));
    }
    let x = fam.universe_size as f64;
    let tm1 = (fam.t - 1) as f64;
    let denom = fam.k * fam.k - tm1 * x;
    if !(denom > 0.0) {
        return Err(Error::Precondition(format!(
            "need k² > (t-1)|X|, got k = {}, t = {}, |X| = {}",
            fam.k, fam.t, fam.universe_size
        )));
    }
    let bound = x * (fam.k - tm1) / denom;
    let sets: Vec<VertexSet> =
        fam.sets.iter().map(|s| VertexSet::collect(fam.universe_size, s.iter().copied())).collect();
    let in_universe = sets.iter().all(|s| s.as_slice().last().is_none_or(|&m| m < fam.universe_size));
    let large = sets.iter().all(|s| s.len() as f64 >= fam.k);
    let spread = sets
        .iter()
        .enumerate()
        .all(|(i, a)| sets[i + 1..].iter().all(|b| a.intersection_len(b) < fam.t));
    let hypotheses_ok = in_universe && large && spread;
    let n_sets = sets.len();
    Ok(CorradiCheck { hypotheses_ok, n_sets, bound, holds: hypotheses_ok.then(|| n_sets as f64 <= bound) })
}

/// `C_t = sqrt(1.37) / (0.37 sqrt(t-1)) + sqrt(1.37 (t-1))`, for `t >= 2`.
pub fn c_t(t: u32) -> f64 {
    let tm1 = f64::from(t - 1);
    SLACK.sqrt() / ((SLACK - 1.0) * tm1.sqrt()) + (SLACK * tm1).sqrt()
}

/// Accounting for one direction of the mixed-neighbourhood intersection bound.
///
/// "Inner" is the first step and "outer" the second: for the red–blue
/// direction `|N1(N2(a)) ∩ N1(N2(b))|` the inner graph is red.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedAudit {
    /// `sqrt(1.37 (t-1) Δ_inner)`
    pub k: f64,
    pub lhs: usize,
    pub rhs: f64,
    pub holds: bool,
    /// Inner graph C4-free and outer graph free of 4-, 6- and 8-cycles.
    pub supported: bool,
    /// `|N_in(a) ∩ N_in(b)|`, at most 1 when the inner graph is C4-free.
    pub shared_inner: usize,
    /// `|N_out(N_in(a) ∩ N_in(b))|`, bounded by `Δ_outer`.
    pub sep_shared: usize,
    pub q_t_size: usize,
    /// `Δ₁Δ₂ / t`
    pub q_t_bound: f64,
    /// `|N_out(N_in(a)) ∩ N_in(b)|`, bounded by `Δ_inner`.
    pub sep_inner_b: usize,
    pub d_t_size: usize,
    /// `|D_t ∩ N_in(a)|`. When nonzero a witness vertex can coincide with
    /// some `x*` and the overlap bound below can fail without any short even cycle.
    pub d_t_inner_a: usize,
    /// `|N_out(N_in(b)) ∩ D_t|`
    pub main_term: usize,
    /// `Δ_inner sqrt(1.37(t-1)Δ_inner) + sqrt(1.37)/0.37 sqrt(Δ_inner/(t-1)) Δ_outer`
    pub main_bound: f64,
    pub r_t_size: usize,
    /// Every `x ∈ R_t(k)` has `|A_t(x)| > k`.
    pub a_size_ok: bool,
    /// Distinct `x1, x2 ∈ N_in(b)` have `|A_t(x1) ∩ A_t(x2)| <= t-1`.
    pub a_overlap_ok: bool,
    /// Corrádi applied to `(A_t(x))_{x ∈ R_t(k)}`; absent when `R_t(k)` is empty.
    pub corradi: Option<CorradiCheck>,
    /// Sizes of the left-hand set within the shared, `Q_t`, `N_in(b)` and
    /// `D_t` parts; together they cover it.
    pub parts: [usize; 4],
}

impl MixedAudit {
    /// Whether each separately estimated part respects its own bound.
    pub fn parts_within_bounds(&self, delta_inner: usize, delta_outer: usize) -> bool {
        self.sep_shared <= delta_outer
            && self.q_t_size as f64 <= self.q_t_bound
            && self.sep_inner_b <= delta_inner
            && self.main_term as f64 <= self.main_bound
    }

    pub fn partition_covers(&self) -> bool {
        self.parts.iter().sum::<usize>() >= self.lhs
    }
}

struct Direction<'g> {
    inner: &'g Graph,
    outer: &'g Graph,
    d_inner: usize,
    d_outer: usize,
    supported: bool,
}

fn set_of(n: usize, slice: &[usize]) -> VertexSet {
    VertexSet::from_sorted(n, slice.to_vec())
}

fn mixed_audit(dir: &Direction<'_>, delta1: usize, delta2: usize, a: usize, b: usize, t: u32) -> MixedAudit {
    let n = dir.inner.n();
    let tm1 = f64::from(t - 1);
    let tf = f64::from(t);
    let (di, dout) = (dir.d_inner as f64, dir.d_outer as f64);
    let out_nb = |y: usize| set_of(n, dir.outer.neighbors(y));

    let na = set_of(n, dir.inner.neighbors(a));
    let nb = set_of(n, dir.inner.neighbors(b));
    let la = composed_unchecked(dir.outer, dir.inner, a);
    let lb = composed_unchecked(dir.outer, dir.inner, b);
    let lhs_set = la.intersection(&lb);

    let shared = na.intersection(&nb);
    let shared_cover = VertexSet::collect(n, shared.iter().flat_map(|x| dir.outer.neighbors(x).iter().copied()));

    // Q_t: members of N_out(N_in(a)) seen from at least t inner neighbours of a
    let q_t = VertexSet::collect(n, la.iter().filter(|&y| out_nb(y).intersection_len(&na) >= t as usize));
    let excluded = q_t.union(&nb);

    let s = na.difference(&nb);
    let d_of: Vec<VertexSet> = s.iter().map(|x| out_nb(x).difference(&excluded)).collect();
    let d_t = d_of.iter().fold(VertexSet::empty(n), |acc, d| acc.union(d));

    let k = (SLACK * tm1 * di).sqrt();
    let a_sets: Vec<Vec<usize>> = nb
        .iter()
        .map(|x| {
            let nx = out_nb(x);
            (0..s.len()).filter(|&idx| !nx.is_disjoint(&d_of[idx])).collect()
        })
        .collect();
    let r_idx: Vec<usize> =
        nb.iter().enumerate().filter(|&(_, x)| out_nb(x).intersection_len(&d_t) as f64 > k).map(|(i, _)| i).collect();

    let a_size_ok = r_idx.iter().all(|&i| a_sets[i].len() as f64 > k);
    let a_overlap_ok = (0..a_sets.len()).all(|i| {
        (i + 1..a_sets.len()).all(|j| a_sets[i].iter().filter(|x| a_sets[j].contains(x)).count() < t as usize)
    });
    let corradi = if r_idx.is_empty() {
        None
    } else {
        let fam = SetFamily {
            universe_size: s.len(),
            sets: r_idx.iter().map(|&i| a_sets[i].clone()).collect(),
            k,
            t: t as usize,
        };
        corradi_bound(&fam).ok()
    };

    let rhs = dout
        + di
        + (SLACK * tm1).sqrt() * di * di.sqrt()
        + SLACK.sqrt() / ((SLACK - 1.0) * tm1.sqrt()) * dout * di.sqrt()
        + (delta1 * delta2) as f64 / tf;
    let main_bound = di * k + SLACK.sqrt() / (SLACK - 1.0) * (di / tm1).sqrt() * dout;
    let lhs = lhs_set.len();

    MixedAudit {
        k,
        lhs,
        rhs,
        holds: lhs as f64 <= rhs,
        supported: dir.supported,
        shared_inner: shared.len(),
        sep_shared: shared_cover.len(),
        q_t_size: q_t.len(),
        q_t_bound: (delta1 * delta2) as f64 / tf,
        sep_inner_b: la.intersection_len(&nb),
        d_t_size: d_t.len(),
        d_t_inner_a: d_t.intersection_len(&na),
        main_term: lb.intersection_len(&d_t),
        main_bound,
        r_t_size: r_idx.len(),
        a_size_ok,
        a_overlap_ok,
        corradi,
        parts: [
            lhs_set.intersection_len(&shared_cover),
            lhs_set.intersection_len(&q_t),
            lhs_set.intersection_len(&nb),
            lhs_set.intersection_len(&d_t),
        ],
    }
}

/// Intersection-bound audit for a pair of labels, in both directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundAudit {
    pub a: usize,
    pub b: usize,
    pub t: u32,
    /// `|N1(N2(a)) ∩ N1(N2(b))|` against its bound. Flattened so that `k`,
    /// `lhs`, `rhs`, `holds` and the set sizes sit at the top level.
    #[serde(flatten)]
    pub primary: MixedAudit,
    /// `|N2(N1(a)) ∩ N2(N1(b))|` against the role-swapped bound.
    pub symmetric: MixedAudit,
}

impl BoundAudit {
    pub fn holds(&self) -> bool {
        self.primary.holds && self.symmetric.holds
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim42Audit {
    pub u: usize,
    pub v: usize,
    pub t: u32,
    /// `uv` is purple, the setting in which these bounds are claimed.
    pub purple_context: bool,
    /// `Δ₁ + Δ₂ + C_t Δ₁ sqrt(Δ₁) + Δ₁Δ₂/t`
    pub bound: f64,
    pub n1n2_uv: usize,
    pub n2n1_uv: usize,
    pub a_v: usize,
    pub b_v: usize,
    pub a_u: usize,
    pub b_u: usize,
    pub all_bounded: bool,
}

impl Claim42Audit {
    pub fn quantities(&self) -> [usize; 6] {
        [self.n1n2_uv, self.n2n1_uv, self.a_v, self.b_v, self.a_u, self.b_u]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NBoundAudit {
    pub u: usize,
    pub v: usize,
    pub t: u32,
    pub purple_context: bool,
    pub supported: bool,
    pub n_actual: usize,
    /// `4 C_t Δ₁ sqrt(Δ₁) + 4 Δ₁Δ₂/t + 7(Δ₁ + Δ₂)`
    pub n_upper: f64,
    /// Whether `N1(N2(u)) ∪ A*(u) ∪ N2(u)` is the whole ground set.
    pub covers: bool,
    pub uncovered: Vec<usize>,
}

/// Hypotheses of the intersection bounds, computed once per instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GirthFlags {
    pub blue_c4_free: bool,
    pub blue_even_girth_ok: bool,
    pub red_c4_free: bool,
    pub red_even_girth_ok: bool,
}

impl GirthFlags {
    pub fn of(inst: &PackingInstance) -> Self {
        let blue_even = find_even_short_cycle(inst.blue()).is_none();
        let red_even = find_even_short_cycle(inst.red()).is_none();
        GirthFlags {
            blue_c4_free: blue_even || is_c4_free(inst.blue()),
            blue_even_girth_ok: blue_even,
            red_c4_free: red_even || is_c4_free(inst.red()),
            red_even_girth_ok: red_even,
        }
    }
}

/// Audits for one labelled instance; the relabelled red graph and the girth
/// flags are computed once and reused across many label pairs.
pub struct Analyzer<'a> {
    pair: LabelledPair<'a>,
    flags: GirthFlags,
}

impl<'a> Analyzer<'a> {
    pub fn new(inst: &'a PackingInstance, lab: &Labelling) -> Result<Self> {
        check_labels(inst, lab, &[])?;
        Ok(Analyzer { pair: LabelledPair::new(inst, lab), flags: GirthFlags::of(inst) })
    }

    pub fn flags(&self) -> GirthFlags {
        self.flags
    }

    pub fn pair(&self) -> &LabelledPair<'a> {
        &self.pair
    }

    fn check(&self, labels: &[usize]) -> Result<()> {
        match labels.iter().find(|&&x| x >= self.pair.n()) {
            Some(&x) => Err(Error::VertexOutOfRange { vertex: x, n: self.pair.n() }),
            None => Ok(()),
        }
    }

    pub fn profile(&self, i: usize) -> Result<NeighborhoodProfile> {
        self.check(&[i])?;
        Ok(self.pair.profile(i))
    }

    pub fn audit_claim41(&self, a: usize, b: usize, t: u32) -> Result<BoundAudit> {
        self.check(&[a, b])?;
        if a == b {
            return Err(Error::Domain("the audited labels must be distinct".into()));
        }
        if t < 2 {
            return Err(Error::Precondition(format!("t must be at least 2, got {t}")));
        }
        let (d1, d2) = (self.pair.delta1, self.pair.delta2);
        let red_blue = Direction {
            inner: &self.pair.red,
            outer: self.pair.blue,
            d_inner: d2,
            d_outer: d1,
            supported: self.flags.red_c4_free && self.flags.blue_even_girth_ok,
        };
        let blue_red = Direction {
            inner: self.pair.blue,
            outer: &self.pair.red,
            d_inner: d1,
            d_outer: d2,
            supported: self.flags.blue_c4_free && self.flags.red_even_girth_ok,
        };
        Ok(BoundAudit {
            a,
            b,
            t,
            primary: mixed_audit(&red_blue, d1, d2, a, b, t),
            symmetric: mixed_audit(&blue_red, d1, d2, a, b, t),
        })
    }

    pub fn audit_claim42(&self, u: usize, v: usize, t: u32) -> Result<Claim42Audit> {
        self.check(&[u, v])?;
        if t < 2 {
            return Err(Error::Precondition(format!("t must be at least 2, got {t}")));
        }
        let (d1, d2) = (self.pair.delta1 as f64, self.pair.delta2 as f64);
        let bound = d1 + d2 + c_t(t) * d1 * d1.sqrt() + d1 * d2 / f64::from(t);
        let pu = self.pair.profile(u);
        let pv = self.pair.profile(v);
        let mut audit = Claim42Audit {
            u,
            v,
            t,
            purple_context: self.pair.is_purple(u, v),
            bound,
            n1n2_uv: pu.n1n2.intersection_len(&pv.n1n2),
            n2n1_uv: pu.n2n1.intersection_len(&pv.n2n1),
            a_v: pv.a_set.len(),
            b_v: pv.b_set.len(),
            a_u: pu.a_set.len(),
            b_u: pu.b_set.len(),
            all_bounded: false,
        };
        audit.all_bounded = audit.quantities().iter().all(|&q| q as f64 <= bound);
        Ok(audit)
    }

    pub fn audit_nbound(&self, u: usize, v: usize, t: u32) -> Result<NBoundAudit> {
        self.check(&[u, v])?;
        if t < 2 {
            return Err(Error::Precondition(format!("t must be at least 2, got {t}")));
        }
        let p = self.pair.profile(u);
        let cover = p.n1n2.union(&p.a_star).union(&p.n2);
        let uncovered: Vec<usize> = (0..self.pair.n()).filter(|&w| !cover.contains(w)).collect();
        Ok(NBoundAudit {
            u,
            v,
            t,
            purple_context: self.pair.is_purple(u, v),
            supported: self.flags.red_c4_free
                && self.flags.blue_even_girth_ok
                && self.flags.blue_c4_free
                && self.flags.red_even_girth_ok,
            n_actual: self.pair.n(),
            n_upper: n_upper(t, self.pair.delta1, self.pair.delta2),
            covers: uncovered.is_empty(),
            uncovered,
        })
    }
}

pub fn audit_claim41(inst: &PackingInstance, lab: &Labelling, a: usize, b: usize, t: u32) -> Result<BoundAudit> {
    Analyzer::new(inst, lab)?.audit_claim41(a, b, t)
}

pub fn audit_claim42(inst: &PackingInstance, lab: &Labelling, u: usize, v: usize, t: u32) -> Result<Claim42Audit> {
    Analyzer::new(inst, lab)?.audit_claim42(u, v, t)
}

pub fn audit_nbound(inst: &PackingInstance, lab: &Labelling, u: usize, v: usize, t: u32) -> Result<NBoundAudit> {
    Analyzer::new(inst, lab)?.audit_nbound(u, v, t)
}

/// `4 C_t Δ₁ sqrt(Δ₁) + 4 Δ₁Δ₂/t + 7(Δ₁ + Δ₂)`.
pub fn n_upper(t: u32, delta1: usize, delta2: usize) -> f64 {
    let (d1, d2) = (delta1 as f64, delta2 as f64);
    4.0 * c_t(t) * d1 * d1.sqrt() + 4.0 * d1 * d2 / f64::from(t) + 7.0 * (d1 + d2)
}

/// `sqrt(Δ₁) < ((t-4)Δ₂ - 12t) / (4 t C_t)`, the degree condition under
/// which the bound on `n` falls below `(Δ₁+1)(Δ₂+1) - (1 + 6(Δ₁-Δ₂))`.
pub fn small_delta1_condition(t: u32, delta1: usize, delta2: usize) -> bool {
    let tf = f64::from(t);
    (delta1 as f64).sqrt() < ((tf - 4.0) * delta2 as f64 - 12.0 * tf) / (4.0 * tf * c_t(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub t: u32,
    pub c_t: f64,
    /// Larger root of `(t-4)² x² - (544 t² C_t² + 24t) x + 144 t² = 0`.
    pub delta2_root: f64,
    /// Square of the positive root of `(t-4) y² - 136 t C_t y - 408 t = 0`.
    pub delta1_root: f64,
}

/// Larger real root of `a x² + b x + c`, assuming `a > 0` and a real root.
fn larger_root(a: f64, b: f64, c: f64) -> f64 {
    let disc = (b * b - 4.0 * a * c).sqrt();
    if b <= 0.0 {
        (-b + disc) / (2.0 * a)
    } else {
        // avoid cancellation: product of roots is c/a
        (2.0 * c) / (-b - disc)
    }
}

pub fn thresholds(t: u32) -> Result<ThresholdReport> {
    if t <= 4 {
        return Err(Error::Precondition(format!("thresholds need t >= 5, got {t}")));
    }
    let tf = f64::from(t);
    let c = c_t(t);
    let delta2_root = larger_root((tf - 4.0).powi(2), -(544.0 * tf * tf * c * c + 24.0 * tf), 144.0 * tf * tf);
    let y = larger_root(tf - 4.0, -136.0 * tf * c, -408.0 * tf);
    Ok(ThresholdReport { t, c_t: c, delta2_root, delta1_root: y * y })
}
