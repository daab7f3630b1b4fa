//! Shortest-path length and multiplicity for node pairs.
//!
//! Square and triangular lattices have closed forms in the node coordinates;
//! any lattice can be handled by breadth-first counting over the shortest-path
//! DAG, which also serves as the oracle for the closed forms.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Coord, Lattice, LatticeKind, NodeId};

/// Length `l` and number `n` of shortest paths between two nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathSummary {
    pub length: u32,
    pub count: u64,
}

impl PathSummary {
    pub const SELF: PathSummary = PathSummary {
        length: 0,
        count: 1,
    };

    pub const fn new(length: u32, count: u64) -> Self {
        PathSummary { length, count }
    }
}

/// Binomial coefficient with a hard error instead of wrapping.
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n - k + i) / i stays integral at every step
        acc = acc * u128::from(n - k + i) / u128::from(i);
        if acc > u128::from(u64::MAX) {
            return Err(Error::CountOverflow { n, k });
        }
    }
    Ok(acc as u64)
}

fn check_on_grid(side: usize, c: Coord) -> Result<()> {
    if (c.x as usize) < side && (c.y as usize) < side {
        Ok(())
    } else {
        Err(Error::OffLattice { x: c.x, y: c.y })
    }
}

/// Closed form on an `L × L` square lattice: `l = Δx + Δy`, `n = C(l, Δx)`.
pub fn shortest_square(side: usize, s: Coord, t: Coord) -> Result<PathSummary> {
    check_on_grid(side, s)?;
    check_on_grid(side, t)?;
    let dx = s.x.abs_diff(t.x);
    let dy = s.y.abs_diff(t.y);
    let length = dx + dy;
    Ok(PathSummary::new(
        length,
        binomial(u64::from(length), u64::from(dx))?,
    ))
}

/// Closed form on an `L × L` triangular lattice whose diagonals run from
/// `(i, j)` to `(i + 1, j + 1)`.
pub fn shortest_triangular(side: usize, s: Coord, t: Coord) -> Result<PathSummary> {
    check_on_grid(side, s)?;
    check_on_grid(side, t)?;
    let (s, t) = if s.x <= t.x { (s, t) } else { (t, s) };
    if s.y >= t.y {
        // down-right or level: diagonals cannot help
        return shortest_square(side, s, t);
    }
    let dx = t.x - s.x;
    let dy = t.y - s.y;
    if dx == dy {
        return Ok(PathSummary::new(dx, 1));
    }
    let diagonal = dx.min(dy);
    let straight = dx.abs_diff(dy);
    let length = diagonal + straight;
    Ok(PathSummary::new(
        length,
        binomial(u64::from(length), u64::from(diagonal))?,
    ))
}

/// Closed-form summary for a square or triangular lattice; `None` for kinds
/// without one.
pub fn shortest_analytic(lattice: &Lattice, s: NodeId, t: NodeId) -> Option<Result<PathSummary>> {
    let (cs, ct) = (lattice.coord(s), lattice.coord(t));
    match lattice.kind() {
        LatticeKind::Square => Some(shortest_square(lattice.size(), cs, ct)),
        LatticeKind::Triangular => Some(shortest_triangular(lattice.size(), cs, ct)),
        LatticeKind::Hexagonal => None,
    }
}

/// Breadth-first distances and shortest-path counts from `source` to every node.
///
/// `n(source) = 1` and `n(v)` is the sum of `n(u)` over BFS predecessors `u`.
/// Unreachable nodes keep `count == 0`.
pub fn bfs_path_counts(lattice: &Lattice, source: NodeId) -> Result<Vec<PathSummary>> {
    let n = lattice.node_count();
    if source.index() >= n {
        return Err(Error::Domain(format!(
            "source node {source} outside lattice of {n} nodes"
        )));
    }
    let mut dist = vec![u32::MAX; n];
    let mut count = vec![0u64; n];
    dist[source.index()] = 0;
    count[source.index()] = 1;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u.index()];
        let cu = count[u.index()];
        for &v in lattice.neighbors(u) {
            let vi = v.index();
            if dist[vi] == u32::MAX {
                dist[vi] = du + 1;
                queue.push_back(v);
            }
            if dist[vi] == du + 1 {
                count[vi] = count[vi].checked_add(cu).ok_or(Error::CountOverflow {
                    n: u64::from(du + 1),
                    k: 0,
                })?;
            }
        }
    }
    Ok(dist
        .into_iter()
        .zip(count)
        .map(|(length, count)| PathSummary { length, count })
        .collect())
}

/// Position of the unordered pair `{u, v}` (`u != v`) in lexicographic order.
#[inline]
pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
    let (i, j) = if u < v { (u, v) } else { (v, u) };
    debug_assert!(i != j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Shortest-path summaries for every unordered node pair of one lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathTable {
    kind: LatticeKind,
    size: usize,
    node_count: usize,
    entries: Vec<PathSummary>,
}

impl PathTable {
    /// Closed forms on square/triangular lattices, BFS counting otherwise.
    pub fn build(lattice: &Lattice) -> Result<Self> {
        match lattice.kind() {
            LatticeKind::Square | LatticeKind::Triangular => Self::analytic(lattice),
            LatticeKind::Hexagonal => Self::by_bfs(lattice),
        }
    }

    fn analytic(lattice: &Lattice) -> Result<Self> {
        let n = lattice.node_count();
        let mut entries = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                let summary = shortest_analytic(lattice, NodeId::from(u), NodeId::from(v))
                    .expect("analytic kind")?;
                entries.push(summary);
            }
        }
        Ok(Self::from_parts(lattice, entries))
    }

    /// All pairs by one BFS per source.
    pub fn by_bfs(lattice: &Lattice) -> Result<Self> {
        let n = lattice.node_count();
        let rows = (0..n)
            .into_par_iter()
            .map(|u| bfs_path_counts(lattice, NodeId::from(u)))
            .collect::<Result<Vec<_>>>()?;
        let mut entries = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for (u, row) in rows.iter().enumerate() {
            for summary in &row[u + 1..] {
                if summary.count == 0 {
                    return Err(Error::Consistency("lattice is disconnected".into()));
                }
                entries.push(*summary);
            }
        }
        Ok(Self::from_parts(lattice, entries))
    }

    fn from_parts(lattice: &Lattice, entries: Vec<PathSummary>) -> Self {
        PathTable {
            kind: lattice.kind(),
            size: lattice.size(),
            node_count: lattice.node_count(),
            entries,
        }
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Number of unordered pairs, `N(N-1)/2`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn matches(&self, lattice: &Lattice) -> bool {
        self.kind == lattice.kind()
            && self.size == lattice.size()
            && self.node_count == lattice.node_count()
    }

    /// Summary for `{u, v}`; the identity pair yields `(0, 1)`.
    pub fn get(&self, u: NodeId, v: NodeId) -> PathSummary {
        if u == v {
            return PathSummary::SELF;
        }
        self.entries[pair_index(self.node_count, u.index(), v.index())]
    }

    /// `(u, v, summary)` with `u < v` in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId, PathSummary)> + '_ {
        let n = self.node_count;
        (0..n)
            .flat_map(move |u| (u + 1..n).map(move |v| (u, v)))
            .zip(self.entries.iter())
            .map(|((u, v), s)| (NodeId::from(u), NodeId::from(v), *s))
    }

    pub fn max_length(&self) -> u32 {
        self.entries.iter().map(|s| s.length).max().unwrap_or(0)
    }

    pub fn max_count(&self) -> u64 {
        self.entries.iter().map(|s| s.count).max().unwrap_or(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const fn c(x: u32, y: u32) -> Coord {
        Coord::new(x, y)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2).unwrap(), 6);
        assert_eq!(binomial(18, 9).unwrap(), 48620);
        assert_eq!(binomial(5, 0).unwrap(), 1);
        assert_eq!(binomial(3, 5).unwrap(), 0);
        assert_eq!(binomial(66, 33).unwrap(), 7219428434016265740);
        assert!(matches!(binomial(68, 34), Err(Error::CountOverflow { .. })));
    }

    #[test]
    fn square_examples() {
        assert_eq!(
            shortest_square(3, c(0, 0), c(2, 2)).unwrap(),
            PathSummary::new(4, 6)
        );
        assert_eq!(
            shortest_square(3, c(0, 0), c(0, 0)).unwrap(),
            PathSummary::SELF
        );
        assert_eq!(
            shortest_square(4, c(0, 1), c(0, 3)).unwrap(),
            PathSummary::new(2, 1)
        );
        assert!(matches!(
            shortest_square(3, c(0, 0), c(3, 0)),
            Err(Error::OffLattice { x: 3, y: 0 })
        ));
    }

    #[test]
    fn triangular_examples() {
        // the three cases of the closed form
        assert_eq!(
            shortest_triangular(3, c(0, 1), c(2, 2)).unwrap(),
            PathSummary::new(2, 2)
        );
        assert_eq!(
            shortest_triangular(3, c(0, 0), c(2, 2)).unwrap(),
            PathSummary::new(2, 1)
        );
        assert_eq!(
            shortest_triangular(3, c(0, 2), c(2, 0)).unwrap(),
            PathSummary::new(4, 6)
        );
        // argument order does not matter
        assert_eq!(
            shortest_triangular(3, c(2, 2), c(0, 1)).unwrap(),
            PathSummary::new(2, 2)
        );
        assert!(shortest_triangular(3, c(0, 3), c(0, 0)).is_err());
    }

    #[test]
    fn bfs_matches_worked_examples() {
        let sq = Lattice::build(LatticeKind::Square, 3).unwrap();
        let from_origin = bfs_path_counts(&sq, NodeId(0)).unwrap();
        let corner = sq.node_at(c(2, 2)).unwrap();
        assert_eq!(from_origin[corner.index()], PathSummary::new(4, 6));
        assert_eq!(from_origin[0], PathSummary::SELF);

        let tri = Lattice::build(LatticeKind::Triangular, 3).unwrap();
        let s = tri.node_at(c(0, 2)).unwrap();
        let t = tri.node_at(c(2, 0)).unwrap();
        assert_eq!(
            bfs_path_counts(&tri, s).unwrap()[t.index()],
            PathSummary::new(4, 6)
        );

        let hex = Lattice::build(LatticeKind::Hexagonal, 4).unwrap();
        for &(u, v) in hex.edges() {
            assert_eq!(
                bfs_path_counts(&hex, u).unwrap()[v.index()],
                PathSummary::new(1, 1)
            );
        }
        assert!(bfs_path_counts(&hex, NodeId(48)).is_err());
    }

    #[test]
    fn pair_index_is_dense() {
        let n = 7;
        let mut expected = 0;
        for u in 0..n {
            for v in u + 1..n {
                assert_eq!(pair_index(n, u, v), expected);
                assert_eq!(pair_index(n, v, u), expected);
                expected += 1;
            }
        }
    }

    #[test]
    fn table_sizes_and_symmetry() {
        let sq = Lattice::build(LatticeKind::Square, 3).unwrap();
        let table = PathTable::build(&sq).unwrap();
        assert_eq!(table.len(), 36);

        let tri = Lattice::build(LatticeKind::Triangular, 3).unwrap();
        let table = PathTable::build(&tri).unwrap();
        let s = tri.node_at(c(0, 1)).unwrap();
        let t = tri.node_at(c(2, 2)).unwrap();
        assert_eq!(table.get(s, t), PathSummary::new(2, 2));
        assert_eq!(table.get(t, s), PathSummary::new(2, 2));

        let hex = Lattice::build(LatticeKind::Hexagonal, 4).unwrap();
        let table = PathTable::build(&hex).unwrap();
        assert_eq!(table.len(), 1128);
        assert!(table.iter().all(|(_, _, s)| s.count >= 1 && s.length >= 1));
    }

    #[test]
    fn largest_reference_counts_fit() {
        for kind in [LatticeKind::Square, LatticeKind::Triangular] {
            let lat = Lattice::build(kind, 10).unwrap();
            let table = PathTable::build(&lat).unwrap();
            assert!(table.max_count() <= 48620);
        }
        let sq = PathTable::build(&Lattice::build(LatticeKind::Square, 10).unwrap()).unwrap();
        assert_eq!(sq.max_count(), 48620);
        assert_eq!(sq.max_length(), 18);
    }
}
