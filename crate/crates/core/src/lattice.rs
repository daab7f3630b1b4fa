//! Open-boundary square, triangular and hexagonal lattices.
//!
//! Square and triangular lattices of side `L` place node `(x, y)` at index
//! `y * L + x`. The triangular lattice is the square lattice plus one diagonal
//! `(x, y)–(x + 1, y + 1)` per unit cell. The hexagonal lattice is a `k × k`
//! patch of honeycomb cells drawn as a brick wall on an integer grid: rows are
//! joined horizontally everywhere and vertically where `x + y` is even, and the
//! two corner sites left with a single neighbour are dropped, which leaves
//! `2k² + 4k` nodes.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Square,
    Triangular,
    Hexagonal,
}

impl LatticeKind {
    pub const ALL: [LatticeKind; 3] = [Self::Square, Self::Triangular, Self::Hexagonal];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Square => "square",
            Self::Triangular => "triangular",
            Self::Hexagonal => "hexagonal",
        }
    }

    /// Node count for a given side parameter.
    pub fn node_count(self, size: usize) -> usize {
        match self {
            Self::Square | Self::Triangular => size * size,
            Self::Hexagonal => 2 * size * size + 4 * size,
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "square" => Ok(Self::Square),
            "triangular" => Ok(Self::Triangular),
            "hexagonal" | "honeycomb" => Ok(Self::Hexagonal),
            other => Err(Error::Usage(format!("unknown lattice kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(u32::try_from(i).expect("node index exceeds u32"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord {
    pub x: u32,
    pub y: u32,
}

impl Coord {
    pub const fn new(x: u32, y: u32) -> Self {
        Coord { x, y }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An immutable lattice graph with integer node coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    kind: LatticeKind,
    size: usize,
    coords: Vec<Coord>,
    edges: Vec<(NodeId, NodeId)>,
    adjacency: Vec<Vec<NodeId>>,
    // Dense grid lookup, `width * height` cells.
    width: usize,
    height: usize,
    grid: Vec<Option<NodeId>>,
}

impl Lattice {
    pub fn build(kind: LatticeKind, size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidSize { kind, size });
        }
        let lattice = match kind {
            LatticeKind::Square => Self::square_like(kind, size, false),
            LatticeKind::Triangular => Self::square_like(kind, size, true),
            LatticeKind::Hexagonal => Self::honeycomb(size),
        };
        Ok(lattice)
    }

    fn square_like(kind: LatticeKind, side: usize, diagonals: bool) -> Self {
        let coords: Vec<Coord> = (0..side)
            .flat_map(|y| (0..side).map(move |x| Coord::new(x as u32, y as u32)))
            .collect();
        let grid = (0..coords.len()).map(|i| Some(NodeId::from(i))).collect();
        let id = |x: usize, y: usize| NodeId::from(y * side + x);

        let mut edges = Vec::new();
        for y in 0..side {
            for x in 0..side {
                if x + 1 < side {
                    edges.push((id(x, y), id(x + 1, y)));
                }
                if y + 1 < side {
                    edges.push((id(x, y), id(x, y + 1)));
                }
                if diagonals && x + 1 < side && y + 1 < side {
                    edges.push((id(x, y), id(x + 1, y + 1)));
                }
            }
        }
        Self::assemble(kind, side, coords, edges, side, side, grid)
    }

    fn honeycomb(k: usize) -> Self {
        let width = 2 * k + 2;
        let height = k + 1;
        let cell = |x: usize, y: usize| y * width + x;

        let mut full_edges = Vec::new();
        for y in 0..height {
            for x in 0..width {
                if x + 1 < width {
                    full_edges.push((cell(x, y), cell(x + 1, y)));
                }
                if y + 1 < height && (x + y) % 2 == 0 {
                    full_edges.push((cell(x, y), cell(x, y + 1)));
                }
            }
        }

        let mut degree = vec![0usize; width * height];
        for &(a, b) in &full_edges {
            degree[a] += 1;
            degree[b] += 1;
        }

        let mut grid = vec![None; width * height];
        let mut coords = Vec::with_capacity(2 * k * k + 4 * k);
        for y in 0..height {
            for x in 0..width {
                if degree[cell(x, y)] >= 2 {
                    grid[cell(x, y)] = Some(NodeId::from(coords.len()));
                    coords.push(Coord::new(x as u32, y as u32));
                }
            }
        }

        let edges = full_edges
            .into_iter()
            .filter_map(|(a, b)| Some((grid[a]?, grid[b]?)))
            .collect();
        Self::assemble(
            LatticeKind::Hexagonal,
            k,
            coords,
            edges,
            width,
            height,
            grid,
        )
    }

    fn assemble(
        kind: LatticeKind,
        size: usize,
        coords: Vec<Coord>,
        edges: Vec<(NodeId, NodeId)>,
        width: usize,
        height: usize,
        grid: Vec<Option<NodeId>>,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); coords.len()];
        for &(u, v) in &edges {
            adjacency[u.index()].push(v);
            adjacency[v.index()].push(u);
        }
        Lattice {
            kind,
            size,
            coords,
            edges,
            adjacency,
            width,
            height,
            grid,
        }
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    /// Side length `L` for square/triangular, cell count `k` for hexagonal.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn node_count(&self) -> usize {
        self.coords.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in construction order.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn coord(&self, node: NodeId) -> Coord {
        self.coords[node.index()]
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node.index()]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node.index()].len()
    }

    pub fn node_at(&self, c: Coord) -> Option<NodeId> {
        let (x, y) = (c.x as usize, c.y as usize);
        if x >= self.width || y >= self.height {
            return None;
        }
        self.grid[y * self.width + x]
    }

    pub fn contains(&self, c: Coord) -> bool {
        self.node_at(c).is_some()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.coords.len()).map(NodeId::from)
    }

    /// Histogram of node degrees, indexed by degree.
    pub fn degree_histogram(&self) -> Vec<usize> {
        let max = self.adjacency.iter().map(Vec::len).max().unwrap_or(0);
        let mut hist = vec![0; max + 1];
        for nbrs in &self.adjacency {
            hist[nbrs.len()] += 1;
        }
        hist
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([NodeId(0)]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                if !seen[v.index()] {
                    seen[v.index()] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        reached == n
    }

    /// Two-colouring by breadth-first search; `None` if an odd cycle exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let n = self.node_count();
        let mut colour: Vec<Option<bool>> = vec![None; n];
        for start in 0..n {
            if colour[start].is_some() {
                continue;
            }
            colour[start] = Some(false);
            let mut queue = VecDeque::from([NodeId::from(start)]);
            while let Some(u) = queue.pop_front() {
                let cu = colour[u.index()].unwrap();
                for &v in self.neighbors(u) {
                    match colour[v.index()] {
                        None => {
                            colour[v.index()] = Some(!cu);
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(colour.into_iter().map(Option::unwrap).collect())
    }
}
