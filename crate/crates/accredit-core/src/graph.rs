//! Interaction graphs, bipartiteness testing, 2-colourings, chromatic
//! subsets, and the square-lattice checkerboard construction.
//!
//! Vertices are indexed 1-based, row-major from the top-left of a lattice;
//! every qubit index across the crate follows the same convention.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::fmt;

/// An undirected simple graph over vertices `1..=vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

/// Errors from graph construction and colouring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// Endpoint outside `1..=vertex_count`.
    VertexOutOfRange { vertex: usize, vertex_count: usize },
    /// Self-loops are not allowed.
    SelfLoop { vertex: usize },
    /// The graph has no 2-colouring; carries an odd cycle as witness.
    NotTwoColourable { odd_cycle: Vec<usize> },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::VertexOutOfRange { vertex, vertex_count } => {
                write!(f, "vertex {vertex} outside 1..={vertex_count}")
            }
            GraphError::SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            GraphError::NotTwoColourable { odd_cycle } => {
                write!(f, "graph is not 2-colourable; odd cycle: {odd_cycle:?}")
            }
        }
    }
}

impl core::error::Error for GraphError {}

impl InteractionGraph {
    pub fn new(vertex_count: usize) -> Self {
        assert!(vertex_count > 0, "vertex_count must be positive");
        InteractionGraph {
            vertex_count,
            edges: BTreeSet::new(),
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        for w in [u, v] {
            if w == 0 || w > self.vertex_count {
                return Err(GraphError::VertexOutOfRange {
                    vertex: w,
                    vertex_count: self.vertex_count,
                });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop { vertex: u });
        }
        self.edges.insert((u.min(v), u.max(v)));
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as normalized `(min, max)` pairs in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Parse the graph fixture format: first line `<vertex_count>`, then one
    /// `u v` edge per line. `#` starts a comment.
    pub fn parse_text(input: &str) -> Result<InteractionGraph, GraphParseError> {
        let mut lines = input.lines().enumerate().filter_map(|(idx, raw)| {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                None
            } else {
                Some((idx + 1, line))
            }
        });
        let (first_no, first) = lines.next().ok_or(GraphParseError {
            line: 0,
            message: "empty graph fixture",
        })?;
        let vertex_count: usize = first.parse().map_err(|_| GraphParseError {
            line: first_no,
            message: "first line must be the vertex count",
        })?;
        if vertex_count == 0 {
            return Err(GraphParseError {
                line: first_no,
                message: "vertex count must be positive",
            });
        }
        let mut g = InteractionGraph::new(vertex_count);
        for (line_no, line) in lines {
            let mut parts = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize, GraphParseError> {
                tok.and_then(|t| t.parse().ok()).ok_or(GraphParseError {
                    line: line_no,
                    message: "expected `u v`",
                })
            };
            let u = parse(parts.next())?;
            let v = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(GraphParseError {
                    line: line_no,
                    message: "unexpected tokens after edge",
                });
            }
            g.add_edge(u, v).map_err(|_| GraphParseError {
                line: line_no,
                message: "invalid edge",
            })?;
        }
        Ok(g)
    }
}

/// Parse failure for the graph fixture format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphParseError {
    pub line: usize,
    pub message: &'static str,
}

impl fmt::Display for GraphParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "graph fixture line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for GraphParseError {}

/// A proper 2-colouring: adjacent vertices always receive different colours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoColoring {
    /// `colors[v - 1]` is 1 or 2.
    colors: Vec<u8>,
}

impl TwoColoring {
    pub fn color_of(&self, vertex: usize) -> u8 {
        self.colors[vertex - 1]
    }

    /// The vertex set of one colour class.
    pub fn class(&self, color: u8) -> ChromaticSubset {
        ChromaticSubset {
            vertices: self
                .colors
                .iter()
                .enumerate()
                .filter_map(|(i, &c)| if c == color { Some(i + 1) } else { None })
                .collect(),
        }
    }
}

/// One colour class of a valid 2-colouring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChromaticSubset {
    vertices: BTreeSet<usize>,
}

impl ChromaticSubset {
    pub fn from_vertices(vertices: impl IntoIterator<Item = usize>) -> Self {
        ChromaticSubset {
            vertices: vertices.into_iter().collect(),
        }
    }

    pub fn contains(&self, vertex: usize) -> bool {
        self.vertices.contains(&vertex)
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Grid graph with `rows x cols` vertices indexed row-major from the
/// top-left starting at 1, with nearest-neighbour edges.
pub fn square_lattice(rows: usize, cols: usize) -> InteractionGraph {
    assert!(rows >= 1 && cols >= 1, "lattice dimensions must be >= 1");
    let mut g = InteractionGraph::new(rows * cols);
    let idx = |r: usize, c: usize| r * cols + c + 1;
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                g.add_edge(idx(r, c), idx(r, c + 1)).expect("in-range");
            }
            if r + 1 < rows {
                g.add_edge(idx(r, c), idx(r + 1, c)).expect("in-range");
            }
        }
    }
    g
}

/// Breadth-first 2-colouring. Vertex 1 (and each later component's smallest
/// vertex) receives colour 1, so the output is deterministic. Fails with an
/// odd-cycle witness when the graph is not bipartite.
pub fn two_color(g: &InteractionGraph) -> Result<TwoColoring, GraphError> {
    let n = g.vertex_count();
    let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); n + 1];
    for (u, v) in g.edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    for l in adj.iter_mut() {
        l.sort_unstable();
    }
    let mut colors: Vec<u8> = alloc::vec![0; n + 1];
    let mut parent: Vec<usize> = alloc::vec![0; n + 1];
    for root in 1..=n {
        if colors[root] != 0 {
            continue;
        }
        colors[root] = 1;
        let mut queue = VecDeque::new();
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if colors[v] == 0 {
                    colors[v] = 3 - colors[u];
                    parent[v] = u;
                    queue.push_back(v);
                } else if colors[v] == colors[u] {
                    return Err(GraphError::NotTwoColourable {
                        odd_cycle: odd_cycle_witness(u, v, &parent),
                    });
                }
            }
        }
    }
    Ok(TwoColoring {
        colors: colors[1..].to_vec(),
    })
}

/// Reconstruct the odd cycle closed by the conflict edge `(u, v)` from the
/// BFS parent pointers.
fn odd_cycle_witness(u: usize, v: usize, parent: &[usize]) -> Vec<usize> {
    let ancestors = |mut w: usize| -> Vec<usize> {
        let mut path = alloc::vec![w];
        while parent[w] != 0 {
            w = parent[w];
            path.push(w);
        }
        path
    };
    let pa = ancestors(u);
    let pb = ancestors(v);
    // Find the lowest common ancestor by walking back from the root.
    let mut i = pa.len();
    let mut j = pb.len();
    while i > 0 && j > 0 && pa[i - 1] == pb[j - 1] {
        i -= 1;
        j -= 1;
    }
    // u .. lca followed by lca-exclusive path back down to v.
    let mut cycle: Vec<usize> = pa[..=i.min(pa.len() - 1)].to_vec();
    for k in (0..j).rev() {
        cycle.push(pb[k]);
    }
    cycle
}

/// The checkerboard set of an `n_l x n_l` square lattice.
///
/// For odd `n_l` this is the set of odd indices. For even `n_l` the set is
/// obtained from the `(n_l + 1)`-sized construction by removing the
/// rightmost column and bottom row, re-indexing the surviving cells
/// row-major.
pub fn checkerboard_set(n_l: usize) -> ChromaticSubset {
    assert!(n_l >= 1, "lattice size must be >= 1");
    if n_l % 2 == 1 {
        ChromaticSubset::from_vertices((1..=n_l * n_l).filter(|j| j % 2 == 1))
    } else {
        let big = n_l + 1;
        let mut vertices = BTreeSet::new();
        let mut new_index = 0usize;
        for r in 0..big {
            for c in 0..big {
                if r == big - 1 || c == big - 1 {
                    continue; // removed bottom row / rightmost column
                }
                new_index += 1;
                let old_index = r * big + c + 1;
                if old_index % 2 == 1 {
                    vertices.insert(new_index);
                }
            }
        }
        ChromaticSubset { vertices }
    }
}

/// `true` iff every edge of `g` has exactly one endpoint in `s`.
pub fn validate_chromatic(g: &InteractionGraph, s: &ChromaticSubset) -> bool {
    g.edges()
        .all(|(u, v)| s.contains(u) != s.contains(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_lattice_3x3_matches_indexing() {
        let g = square_lattice(3, 3);
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.edge_count(), 12);
        assert_eq!(g.neighbours(5), alloc::vec![2, 4, 6, 8]);
        assert_eq!(g.neighbours(1), alloc::vec![2, 4]);
    }

    #[test]
    fn square_lattice_degenerate_sizes() {
        let g1 = square_lattice(1, 1);
        assert_eq!(g1.vertex_count(), 1);
        assert_eq!(g1.edge_count(), 0);

        let g2 = square_lattice(2, 2);
        assert_eq!(g2.vertex_count(), 4);
        assert_eq!(g2.edge_count(), 4);
    }

    #[test]
    fn two_color_3x3_gives_odd_indices() {
        let g = square_lattice(3, 3);
        let col = two_color(&g).unwrap();
        let class1 = col.class(1);
        let odd: Vec<usize> = (1..=9).filter(|j| j % 2 == 1).collect();
        assert_eq!(class1.vertices().collect::<Vec<_>>(), odd);
    }

    #[test]
    fn two_color_rejects_triangle_with_witness() {
        let mut g = InteractionGraph::new(3);
        g.add_edge(1, 2).unwrap();
        g.add_edge(2, 3).unwrap();
        g.add_edge(1, 3).unwrap();
        match two_color(&g) {
            Err(GraphError::NotTwoColourable { odd_cycle }) => {
                assert!(odd_cycle.len() >= 3 && odd_cycle.len() % 2 == 1);
                // witness is a closed walk: consecutive vertices adjacent
                for w in odd_cycle.windows(2) {
                    assert!(g.has_edge(w[0], w[1]));
                }
                assert!(g.has_edge(odd_cycle[0], *odd_cycle.last().unwrap()));
            }
            other => panic!("expected NotTwoColourable, got {other:?}"),
        }
    }

    #[test]
    fn two_color_path_alternates() {
        let mut g = InteractionGraph::new(4);
        g.add_edge(1, 2).unwrap();
        g.add_edge(2, 3).unwrap();
        g.add_edge(3, 4).unwrap();
        let col = two_color(&g).unwrap();
        assert_eq!(
            (1..=4).map(|v| col.color_of(v)).collect::<Vec<_>>(),
            alloc::vec![1, 2, 1, 2]
        );
    }

    #[test]
    fn odd_cycles_rejected_even_cycles_colored() {
        for len in 3..=11usize {
            let mut g = InteractionGraph::new(len);
            for v in 1..len {
                g.add_edge(v, v + 1).unwrap();
            }
            g.add_edge(len, 1).unwrap();
            let res = two_color(&g);
            if len % 2 == 1 {
                match res {
                    Err(GraphError::NotTwoColourable { odd_cycle }) => {
                        assert_eq!(odd_cycle.len() % 2, 1)
                    }
                    other => panic!("cycle {len}: expected failure, got {other:?}"),
                }
            } else {
                assert!(res.is_ok(), "cycle {len} should be 2-colourable");
            }
        }
    }

    #[test]
    fn checkerboard_examples() {
        assert_eq!(
            checkerboard_set(3).vertices().collect::<Vec<_>>(),
            alloc::vec![1, 3, 5, 7, 9]
        );
        assert_eq!(checkerboard_set(1).vertices().collect::<Vec<_>>(), alloc::vec![1]);
        assert_eq!(checkerboard_set(2).vertices().collect::<Vec<_>>(), alloc::vec![1, 4]);
    }

    #[test]
    fn checkerboard_is_chromatic_up_to_10() {
        for n_l in 1..=10 {
            let g = square_lattice(n_l, n_l);
            let s = checkerboard_set(n_l);
            assert!(validate_chromatic(&g, &s), "n_l = {n_l}");
            // and it matches the colour class of vertex 1 under two_color
            let col = two_color(&g).unwrap();
            let class = col.class(col.color_of(1));
            assert_eq!(s, class, "n_l = {n_l}");
        }
    }

    #[test]
    fn validate_chromatic_cases() {
        let g = square_lattice(3, 3);
        assert!(validate_chromatic(&g, &checkerboard_set(3)));
        assert!(!validate_chromatic(
            &g,
            &ChromaticSubset::from_vertices([1, 2])
        ));
        let edgeless = InteractionGraph::new(4);
        assert!(validate_chromatic(
            &edgeless,
            &ChromaticSubset::from_vertices([2, 3])
        ));
    }

    #[test]
    fn parse_graph_fixture() {
        let g = InteractionGraph::parse_text("3\n1 2 # edge\n2 3\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(InteractionGraph::parse_text("").is_err());
        assert!(InteractionGraph::parse_text("2\n1 2 3\n").is_err());
        assert!(InteractionGraph::parse_text("2\n1 5\n").is_err());
    }
}
