//! Simple undirected graphs on `0..n` and the neighbourhood algebra used by
//! the swap machinery.

use std::fmt;

use crate::error::{Error, Result};

/// Read-only adjacency access shared by [`Graph`] and the mutable builders
/// used during generation.
pub(crate) trait Adjacency {
    fn vertex_count(&self) -> usize;
    fn adjacent(&self, v: usize) -> &[usize];
}

/// A simple undirected graph on the vertex set `0..n`.
///
/// Neighbour lists are sorted, so edge queries are binary searches.
/// Graphs are immutable once built.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
    max_degree: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Self-loops, repeated edges and
    /// out-of-range endpoints are rejected.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::Domain("a graph needs at least one vertex".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Self::from_sorted_adjacency(adj))
    }

    /// The graph on `n` vertices with no edges.
    pub fn edgeless(n: usize) -> Result<Self> {
        Self::new(n, std::iter::empty())
    }

    /// Caller guarantees sorted, symmetric, loop-free neighbour lists.
    pub(crate) fn from_sorted_adjacency(adj: Vec<Vec<usize>>) -> Self {
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let max_degree = adj.iter().map(Vec::len).max().unwrap_or(0);
        Graph { adj, edge_count, max_degree }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Sorted neighbours of `v`. Panics if `v` is out of range.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// The isomorphic copy in which vertex `v` becomes `map[v]`.
    pub fn relabel(&self, map: &[usize]) -> Graph {
        debug_assert_eq!(map.len(), self.n());
        let mut adj = vec![Vec::new(); self.n()];
        for (u, list) in self.adj.iter().enumerate() {
            adj[map[u]] = list.iter().map(|&w| map[w]).collect();
            adj[map[u]].sort_unstable();
        }
        Graph::from_sorted_adjacency(adj)
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }
}

impl Adjacency for Graph {
    fn vertex_count(&self) -> usize {
        self.n()
    }

    fn adjacent(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }
}

impl Adjacency for Vec<Vec<usize>> {
    fn vertex_count(&self) -> usize {
        self.len()
    }

    fn adjacent(&self, v: usize) -> &[usize] {
        &self[v]
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// A subset of `0..universe_size`, stored as a sorted vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct VertexSet {
    members: Vec<usize>,
    universe_size: usize,
}

impl VertexSet {
    pub fn new<I>(universe_size: usize, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let set = Self::collect(universe_size, members);
        if let Some(&last) = set.members.last() {
            if last >= universe_size {
                return Err(Error::VertexOutOfRange { vertex: last, n: universe_size });
            }
        }
        Ok(set)
    }

    pub fn empty(universe_size: usize) -> Self {
        VertexSet { members: Vec::new(), universe_size }
    }

    pub(crate) fn collect<I: IntoIterator<Item = usize>>(universe_size: usize, members: I) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        VertexSet { members, universe_size }
    }

    pub(crate) fn from_sorted(universe_size: usize, members: Vec<usize>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        VertexSet { members, universe_size }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let (a, b) = (&self.members, &other.members);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        VertexSet::from_sorted(self.universe_size.max(other.universe_size), out)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let members = self.members.iter().copied().filter(|&v| other.contains(v)).collect();
        VertexSet::from_sorted(self.universe_size, members)
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let members = self.members.iter().copied().filter(|&v| !other.contains(v)).collect();
        VertexSet::from_sorted(self.universe_size, members)
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().filter(|&v| large.contains(v)).count()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.intersection_len(other) == 0
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// `{j : ij ∈ E(g)}`.
pub fn neighborhood(g: &Graph, i: usize) -> Result<VertexSet> {
    g.check_vertex(i)?;
    Ok(VertexSet::from_sorted(g.n(), g.neighbors(i).to_vec()))
}

/// Union of the `outer` neighbourhoods of the `inner` neighbours of `i`:
/// every endpoint of an inner edge followed by an outer edge. May contain `i`.
pub fn composed_neighborhood(outer: &Graph, inner: &Graph, i: usize) -> Result<VertexSet> {
    if outer.n() != inner.n() {
        return Err(Error::SizeMismatch(outer.n(), inner.n()));
    }
    inner.check_vertex(i)?;
    Ok(composed_unchecked(outer, inner, i))
}

pub(crate) fn composed_unchecked(outer: &Graph, inner: &Graph, i: usize) -> VertexSet {
    VertexSet::collect(
        outer.n(),
        inner.neighbors(i).iter().flat_map(|&j| outer.neighbors(j).iter().copied()),
    )
}

/// Whether some `i'` has `i i'` in `first` and `i' j` in `second`.
pub fn has_link(first: &Graph, second: &Graph, i: usize, j: usize) -> Result<bool> {
    if first.n() != second.n() {
        return Err(Error::SizeMismatch(first.n(), second.n()));
    }
    first.check_vertex(i)?;
    first.check_vertex(j)?;
    if i == j {
        return Err(Error::Domain(format!("a link needs distinct endpoints, got {i} twice")));
    }
    Ok(first.neighbors(i).iter().any(|&x| second.has_edge(x, j)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::new(3, [(0, 1), (1, 2)]).unwrap()
    }

    fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(Graph::new(3, [(0, 0)]), Err(Error::SelfLoop(0))));
        assert!(matches!(Graph::new(3, [(0, 1), (1, 0)]), Err(Error::DuplicateEdge(0, 1))));
        assert!(matches!(Graph::new(3, [(0, 3)]), Err(Error::VertexOutOfRange { vertex: 3, n: 3 })));
        assert!(Graph::new(0, []).is_err());
    }

    #[test]
    fn cached_degree_and_symmetry() {
        let g = Graph::new(5, [(0, 1), (0, 2), (0, 3), (3, 4)]).unwrap();
        assert_eq!(g.max_degree(), 3);
        assert_eq!(g.edge_count(), 4);
        for (u, v) in g.edges() {
            assert!(g.has_edge(v, u));
        }
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (0, 3), (3, 4)]);
    }

    #[test]
    fn neighborhood_examples() {
        assert_eq!(neighborhood(&path3(), 1).unwrap().as_slice(), &[0, 2]);
        let empty = Graph::edgeless(4).unwrap();
        for i in 0..4 {
            assert!(neighborhood(&empty, i).unwrap().is_empty());
        }
        assert_eq!(neighborhood(&complete(4), 0).unwrap().as_slice(), &[1, 2, 3]);
        assert!(neighborhood(&path3(), 3).is_err());
    }

    #[test]
    fn composed_neighborhood_examples() {
        let inner = Graph::new(3, [(0, 1)]).unwrap();
        let outer = Graph::new(3, [(1, 2)]).unwrap();
        assert_eq!(composed_neighborhood(&outer, &inner, 0).unwrap().as_slice(), &[2]);

        let none = Graph::edgeless(3).unwrap();
        assert!(composed_neighborhood(&outer, &none, 0).unwrap().is_empty());

        // 2-paths 0-1-3 and 0-2-3 both end at 3
        let star = Graph::new(4, [(0, 1), (0, 2)]).unwrap();
        let outer = Graph::new(4, [(1, 3), (2, 3)]).unwrap();
        assert_eq!(composed_neighborhood(&outer, &star, 0).unwrap().as_slice(), &[3]);

        let other = Graph::edgeless(5).unwrap();
        assert!(matches!(composed_neighborhood(&other, &star, 0), Err(Error::SizeMismatch(5, 4))));
    }

    #[test]
    fn has_link_examples() {
        let first = Graph::new(3, [(0, 1)]).unwrap();
        let second = Graph::new(3, [(1, 2)]).unwrap();
        assert!(has_link(&first, &second, 0, 2).unwrap());

        let e = Graph::edgeless(3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(!has_link(&e, &e, i, j).unwrap());
                }
            }
        }

        let second = Graph::new(3, [(0, 2)]).unwrap();
        assert!(!has_link(&first, &second, 0, 2).unwrap());
        assert!(has_link(&first, &second, 0, 0).is_err());
    }

    #[test]
    fn vertex_set_algebra() {
        let a = VertexSet::new(10, [5, 1, 3, 3]).unwrap();
        let b = VertexSet::new(10, [3, 4, 5]).unwrap();
        assert_eq!(a.as_slice(), &[1, 3, 5]);
        assert_eq!(a.union(&b).as_slice(), &[1, 3, 4, 5]);
        assert_eq!(a.intersection(&b).as_slice(), &[3, 5]);
        assert_eq!(a.difference(&b).as_slice(), &[1]);
        assert_eq!(a.intersection_len(&b), 2);
        assert!(VertexSet::new(3, [3]).is_err());
    }

    #[test]
    fn relabel_preserves_structure() {
        let g = path3();
        let h = g.relabel(&[2, 0, 1]);
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2)]);
    }
}
