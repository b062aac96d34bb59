//! Undirected agent graphs: parsing, named topologies, connectivity and the
//! graph Laplacian.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Simple undirected graph on vertices `0..n`.
///
/// Edges are stored once, as `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from an edge iterator. Duplicates collapse.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (line, (i, j)) in edges.into_iter().enumerate() {
            if i == j {
                return Err(Error::SelfLoop { line: line + 1, vertex: i });
            }
            if i.max(j) >= n {
                return Err(Error::IndexOverflow { line: line + 1, index: i.max(j), n });
            }
            set.insert((i.min(j), i.max(j)));
        }
        Ok(Graph { n, edges: set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    /// Sorted neighbor lists.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
    }

    /// Cycle on `n` vertices. For `n < 3` this degenerates to a path.
    pub fn ring(n: usize) -> Self {
        if n < 3 {
            return Graph::path(n);
        }
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("ring edges are valid")
    }

    /// Star with center 0.
    pub fn star(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (0, i))).expect("star edges are valid")
    }

    pub fn complete(n: usize) -> Self {
        Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
            .expect("complete edges are valid")
    }

    /// Random connected graph: a uniformly shuffled spanning tree plus every
    /// remaining pair independently with probability `density`.
    ///
    /// The generator is `ChaCha8Rng::seed_from_u64(seed)`; draws happen in a
    /// fixed order (vertex shuffle, tree parents, then pairs in lexicographic
    /// order), so output is identical across platforms.
    pub fn random_connected(n: usize, density: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut edges = BTreeSet::new();
        for k in 1..n {
            let parent = order[rng.random_range(0..k)];
            let child = order[k];
            edges.insert((parent.min(child), parent.max(child)));
        }
        let density = density.clamp(0.0, 1.0);
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(density) {
                    edges.insert((i, j));
                }
            }
        }
        Graph { n, edges }
    }

    /// Breadth-first connectivity test. The empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.neighbors();
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    /// `L = Deg - Adj`.
    pub fn laplacian(&self) -> Matrix {
        let mut l = Matrix::zeros(self.n, self.n);
        for &(i, j) in &self.edges {
            l[(i, j)] -= 1.0;
            l[(j, i)] -= 1.0;
            l[(i, i)] += 1.0;
            l[(j, j)] += 1.0;
        }
        l
    }

    /// Parses the edge-list text format.
    ///
    /// One `i j` pair per line, 0-indexed. Blank lines and lines starting
    /// with `#` are skipped. An optional `n <count>` line fixes the vertex
    /// count; otherwise `n = 1 + max index`.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut declared_n = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            let parse_index = |tok: &str| {
                tok.parse::<usize>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("expected a vertex index, found `{tok}`"),
                })
            };
            match tokens.as_slice() {
                ["n", count] => {
                    if declared_n.is_some() {
                        return Err(Error::Parse { line, msg: "duplicate `n` header".into() });
                    }
                    declared_n = Some(parse_index(count)?);
                }
                [a, b] => {
                    let (i, j) = (parse_index(a)?, parse_index(b)?);
                    if i == j {
                        return Err(Error::SelfLoop { line, vertex: i });
                    }
                    edges.push((line, i, j));
                }
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("expected `i j` or `n <count>`, found `{trimmed}`"),
                    })
                }
            }
        }
        let n = match declared_n {
            Some(n) => n,
            None => edges.iter().map(|&(_, i, j)| i.max(j) + 1).max().unwrap_or(0),
        };
        let mut set = BTreeSet::new();
        for (line, i, j) in edges {
            if i.max(j) >= n {
                return Err(Error::IndexOverflow { line, index: i.max(j), n });
            }
            set.insert((i.min(j), i.max(j)));
        }
        Ok(Graph { n, edges: set })
    }
}

impl fmt::Display for Graph {
    /// Writes the graph back in edge-list format, with an `n` header.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n)?;
        for (i, j) in self.edges() {
            writeln!(f, "{i} {j}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_edge_list() {
        let g = Graph::parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn header_fixes_vertex_count() {
        let g = Graph::parse_edge_list("# comment\nn 4\n\n0 1\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edge_count(), 1);
        assert!(!g.is_connected());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(Graph::parse_edge_list("0 0"), Err(Error::SelfLoop { line: 1, vertex: 0 })));
        assert!(matches!(Graph::parse_edge_list("0 1\nx 2"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Graph::parse_edge_list("0 1 2"), Err(Error::Parse { .. })));
        assert!(matches!(
            Graph::parse_edge_list("n 2\n0 5"),
            Err(Error::IndexOverflow { index: 5, n: 2, .. })
        ));
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = Graph::parse_edge_list("0 1\n1 0\n0 1").unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn display_round_trips() {
        let g = Graph::random_connected(9, 0.3, 11);
        assert_eq!(Graph::parse_edge_list(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn connectivity() {
        assert!(Graph::path(3).is_connected());
        assert!(!Graph::new(2, []).unwrap().is_connected());
        assert!(Graph::ring(5).is_connected());
        for seed in 0..20 {
            assert!(Graph::random_connected(12, 0.1, seed).is_connected());
        }
    }

    #[test]
    fn laplacian_examples() {
        let l = Graph::path(2).laplacian();
        assert_eq!(l, Matrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        assert_eq!(Graph::new(3, []).unwrap().laplacian(), Matrix::zeros(3, 3));
        let tri = Graph::complete(3).laplacian();
        assert_eq!(
            tri,
            Matrix::from_row_slice(3, 3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0])
        );
    }

    #[test]
    fn laplacian_rows_sum_to_zero_and_psd() {
        let g = Graph::random_connected(10, 0.4, 3);
        let l = g.laplacian();
        for row in l.row_iter() {
            assert_eq!(row.sum(), 0.0);
        }
        let min_eig = l.symmetric_eigenvalues().min();
        assert!(min_eig > -1e-12);
    }

    #[test]
    fn random_graph_is_reproducible() {
        assert_eq!(Graph::random_connected(15, 0.2, 99), Graph::random_connected(15, 0.2, 99));
    }
}
