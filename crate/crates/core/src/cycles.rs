//! Detection of 4-, 6- and 8-cycles.
//!
//! A cycle of length `2L` is found from its smallest vertex `s`: the vertex
//! opposite `s` is the common endpoint of two internally disjoint paths of
//! length `L` that stay above `s`. Paths are enumerated to depth `L <= 4`.

use serde::{Deserialize, Serialize};

use crate::graph::{Adjacency, Graph};

/// The even lengths the detector certifies.
pub const EVEN_SHORT_LENGTHS: [usize; 3] = [4, 6, 8];

/// A cycle given by its vertices in traversal order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub vertices: Vec<usize>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Whether the vertices are distinct and consecutive ones are adjacent in `g`.
    pub fn is_valid_in(&self, g: &Graph) -> bool {
        let k = self.vertices.len();
        if k < 3 {
            return false;
        }
        let mut seen = self.vertices.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == k && (0..k).all(|i| g.has_edge(self.vertices[i], self.vertices[(i + 1) % k]))
    }
}

/// Fixed-capacity path of at most four edges.
#[derive(Clone, Copy)]
struct Path {
    v: [usize; 5],
    len: usize,
}

impl Path {
    fn end(&self) -> usize {
        self.v[self.len]
    }

    fn interior(&self) -> &[usize] {
        &self.v[1..self.len]
    }

    fn contains(&self, x: usize) -> bool {
        self.v[..=self.len].contains(&x)
    }
}

/// Calls `visit` on every simple path of exactly `len` edges from `start`
/// whose vertices after the first satisfy `allowed`.
fn for_each_path<G, F, V>(g: &G, start: usize, len: usize, allowed: &F, visit: &mut V)
where
    G: Adjacency + ?Sized,
    F: Fn(usize) -> bool,
    V: FnMut(&Path),
{
    fn rec<G, F, V>(g: &G, p: &mut Path, len: usize, allowed: &F, visit: &mut V)
    where
        G: Adjacency + ?Sized,
        F: Fn(usize) -> bool,
        V: FnMut(&Path),
    {
        if p.len == len {
            visit(p);
            return;
        }
        let tip = p.end();
        for &w in g.adjacent(tip) {
            if !allowed(w) || p.contains(w) {
                continue;
            }
            p.len += 1;
            p.v[p.len] = w;
            rec(g, p, len, allowed, visit);
            p.len -= 1;
        }
    }
    debug_assert!(len <= 4);
    let mut p = Path { v: [start; 5], len: 0 };
    rec(g, &mut p, len, allowed, visit);
}

fn cycle_through_min<G: Adjacency + ?Sized>(g: &G, s: usize, half: usize, by_end: &mut [Vec<Path>]) -> Option<Cycle> {
    let mut touched = Vec::new();
    let mut found = None;
    for_each_path(g, s, half, &|w| w > s, &mut |p: &Path| {
        if found.is_some() {
            return;
        }
        let end = p.end();
        for q in &by_end[end] {
            if q.interior().iter().all(|x| !p.interior().contains(x)) {
                let mut vertices = p.v[..=half].to_vec();
                vertices.extend(q.interior().iter().rev());
                found = Some(Cycle { vertices });
                return;
            }
        }
        if by_end[end].is_empty() {
            touched.push(end);
        }
        by_end[end].push(*p);
    });
    for t in touched {
        by_end[t].clear();
    }
    found
}

fn find_cycle_in<G: Adjacency + ?Sized>(g: &G, len: usize) -> Option<Cycle> {
    assert!(EVEN_SHORT_LENGTHS.contains(&len), "cycle length must be 4, 6 or 8, got {len}");
    let mut by_end = vec![Vec::new(); g.vertex_count()];
    (0..g.vertex_count()).find_map(|s| cycle_through_min(g, s, len / 2, &mut by_end))
}

/// A cycle of exactly `len` vertices, for `len` in `{4, 6, 8}`.
///
/// Panics on any other length.
pub fn find_cycle_of_length(g: &Graph, len: usize) -> Option<Cycle> {
    find_cycle_in(g, len)
}

/// The shortest 4-, 6- or 8-cycle of `g`, if any exists.
pub fn find_even_short_cycle(g: &Graph) -> Option<Cycle> {
    EVEN_SHORT_LENGTHS.iter().find_map(|&len| find_cycle_in(g, len))
}

pub fn is_c4_free(g: &Graph) -> bool {
    find_cycle_in(g, 4).is_none()
}

/// Whether `g` has no 4-, 6- or 8-cycle.
pub fn has_even_girth_at_least_10(g: &Graph) -> bool {
    find_even_short_cycle(g).is_none()
}

/// Whether adding the non-edge `uv` would close a 4-, 6- or 8-cycle, i.e.
/// whether `g` has a simple `u`–`v` path with 3, 5 or 7 edges.
///
/// A path of 5 or 7 edges splits into its first four edges from `u` and a
/// remainder of 1 or 3 edges from `v`, so paths are enumerated to depth 4
/// on one side and depth 3 on the other.
pub(crate) fn closes_even_short_cycle<G: Adjacency + ?Sized>(g: &G, u: usize, v: usize) -> bool {
    let not_v = |w: usize| w != v;
    let mut direct = false;
    for_each_path(g, u, 3, &|_| true, &mut |p: &Path| direct |= p.end() == v);
    if direct {
        return true;
    }
    let mut halves: Vec<Path> = Vec::new();
    for_each_path(g, u, 4, &not_v, &mut |p: &Path| halves.push(*p));
    if halves.is_empty() {
        return false;
    }
    halves.sort_unstable_by_key(|p| p.end());
    let not_u = |w: usize| w != u;
    let mut hit = false;
    for len in [1, 3] {
        for_each_path(g, v, len, &not_u, &mut |q: &Path| {
            if hit {
                return;
            }
            let end = q.end();
            let lo = halves.partition_point(|p| p.end() < end);
            hit = halves[lo..]
                .iter()
                .take_while(|p| p.end() == end)
                .any(|p| q.v[..q.len].iter().all(|x| !p.contains(*x)));
        });
        if hit {
            return true;
        }
    }
    false
}
