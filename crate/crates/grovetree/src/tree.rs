//! Immutable labeled trees and exact combinatorial functionals.
//!
//! A [`Tree`] is validated on construction (connected, acyclic, dense ids)
//! and never mutated afterwards: growth operations return new trees, and all
//! functionals here are pure, so a `Tree` can be shared freely across
//! threads.
//!
//! The Wiener index is computed two ways on purpose. [`Tree::wiener_fast`]
//! uses the O(n) edge-split identity `W = sum over edges of s * (n - s)`,
//! while [`Tree::wiener_bfs`] sums all pairwise BFS distances in O(n^2) and
//! exists solely as an independent oracle for the fast path.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from tree construction and tree functionals.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("a tree needs at least one vertex")]
    NoVertices,
    #[error("tree on {n} vertices must have {} edges, got {got}", n - 1)]
    WrongEdgeCount { n: usize, got: usize },
    #[error("vertex id {id} out of range for {n} vertices")]
    VertexOutOfRange { id: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("integer overflow while accumulating {0}")]
    Overflow(&'static str),
    #[error("per-pair averages are undefined on a single vertex")]
    SingleVertexAverage,
    #[error("invalid edge list text: {0}")]
    ParseEdgeList(String),
}

/// Serialized form: `{"n": 4, "edges": [[0,1],[1,2],[1,3]]}`.
#[derive(Serialize, Deserialize)]
struct TreeRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl From<Tree> for TreeRepr {
    fn from(t: Tree) -> Self {
        TreeRepr {
            n: t.n,
            edges: t.edges,
        }
    }
}

impl TryFrom<TreeRepr> for Tree {
    type Error = TreeError;
    fn try_from(r: TreeRepr) -> Result<Self, Self::Error> {
        Tree::from_edges(r.n, r.edges)
    }
}

/// An immutable labeled tree with dense vertex ids `0..n`.
///
/// Edges are stored normalized (`u < v`) and sorted, and adjacency lists are
/// sorted ascending, so equal trees serialize byte-for-byte identically.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TreeRepr", into = "TreeRepr")]
pub struct Tree {
    n: usize,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree(n={}, edges={:?})", self.n, self.edges)
    }
}

impl Tree {
    /// Build and validate a tree on `n` vertices from an edge list.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::NoVertices);
        }
        let mut norm: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a >= n {
                return Err(TreeError::VertexOutOfRange { id: a, n });
            }
            if b >= n {
                return Err(TreeError::VertexOutOfRange { id: b, n });
            }
            if a == b {
                return Err(TreeError::SelfLoop(a));
            }
            norm.push((a.min(b), a.max(b)));
        }
        if norm.len() != n - 1 {
            return Err(TreeError::WrongEdgeCount { n, got: norm.len() });
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(TreeError::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &norm {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let tree = Tree {
            n,
            adjacency,
            edges: norm,
        };
        // n-1 edges + connectivity => acyclic.
        if tree.distances_from(0).iter().any(|&d| d == u32::MAX) {
            return Err(TreeError::Disconnected);
        }
        Ok(tree)
    }

    /// The single-vertex tree.
    pub fn single_vertex() -> Self {
        Tree::from_edges(1, []).expect("single vertex is a valid tree")
    }

    /// The path on `n` vertices, `0-1-...-(n-1)`.
    pub fn path(n: usize) -> Result<Self, TreeError> {
        Tree::from_edges(n, (1..n).map(|v| (v - 1, v)))
    }

    /// The star with `leaves` leaves: center `0`, leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Result<Self, TreeError> {
        Tree::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v)))
    }

    /// Decode a Prüfer sequence into the tree on `seq.len() + 2` vertices.
    ///
    /// Every labeled tree on `n >= 2` vertices corresponds to exactly one
    /// sequence in `{0..n}^(n-2)`, which makes this the workhorse for both
    /// uniform random trees and exhaustive small-n enumeration in tests.
    pub fn from_prufer(seq: &[usize]) -> Result<Self, TreeError> {
        let n = seq.len() + 2;
        for &x in seq {
            if x >= n {
                return Err(TreeError::VertexOutOfRange { id: x, n });
            }
        }
        let mut degree = vec![1usize; n];
        for &x in seq {
            degree[x] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        // `ptr` scans for the smallest leaf; `leaf` tracks the current one.
        let mut ptr = 0;
        while degree[ptr] != 1 {
            ptr += 1;
        }
        let mut leaf = ptr;
        for &x in seq {
            edges.push((leaf, x));
            degree[x] -= 1;
            if degree[x] == 1 && x < ptr {
                leaf = x;
            } else {
                ptr += 1;
                while degree[ptr] != 1 {
                    ptr += 1;
                }
                leaf = ptr;
            }
        }
        edges.push((leaf, n - 1));
        Tree::from_edges(n, edges)
    }

    /// Vertex count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as normalized `(u, v)` pairs with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Degree of `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Degrees of all vertices.
    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    /// Maximum vertex degree (0 for the single vertex).
    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// True if `{u, v}` is an edge.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// BFS hop counts from `source`; unreachable marked `u32::MAX`
    /// (only possible on inputs that fail validation).
    pub fn distances_from(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n];
        dist[source] = 0;
        let mut queue = VecDeque::with_capacity(self.n);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Full n x n hop-count matrix (one BFS per source).
    pub fn all_distances(&self) -> DistanceMatrix {
        DistanceMatrix {
            n: self.n,
            d: (0..self.n).map(|s| self.distances_from(s)).collect(),
        }
    }

    /// Longest shortest path, via the classic double-BFS on trees.
    pub fn diameter(&self) -> u32 {
        let first = self.distances_from(0);
        let far = (0..self.n).max_by_key(|&v| first[v]).unwrap_or(0);
        self.distances_from(far).into_iter().max().unwrap_or(0)
    }

    /// The vertices on the unique path from `u` to `v`, inclusive.
    pub fn path_between(&self, u: usize, v: usize) -> Vec<usize> {
        let (parent, _) = self.bfs_parents(u);
        let mut path = vec![v];
        let mut cur = v;
        while cur != u {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Split sizes for every directed edge in O(n) total.
    pub fn split_sizes(&self) -> SplitSizes {
        let (parent, order) = self.bfs_parents(0);
        let mut subtree = vec![1usize; self.n];
        for &v in order.iter().rev() {
            if v != 0 {
                subtree[parent[v]] += subtree[v];
            }
        }
        SplitSizes {
            n: self.n,
            parent,
            subtree,
        }
    }

    /// Wiener index by the edge-split identity, O(n).
    ///
    /// Every pair `{x, y}` whose path crosses edge `{u, v}` contributes 1 to
    /// that edge's `s * (n - s)` product, so summing over edges counts each
    /// pair once per edge on its path, i.e. exactly its distance.
    pub fn wiener_fast(&self) -> Result<u128, TreeError> {
        let splits = self.split_sizes();
        let n = self.n as u128;
        let mut total: u128 = 0;
        for &(u, v) in &self.edges {
            let s = splits.get(u, v).expect("edge of this tree") as u128;
            let product = s
                .checked_mul(n - s)
                .ok_or(TreeError::Overflow("wiener edge product"))?;
            total = total
                .checked_add(product)
                .ok_or(TreeError::Overflow("wiener sum"))?;
        }
        Ok(total)
    }

    /// Wiener index by summing all BFS distances, O(n^2).
    ///
    /// Independent oracle for [`Tree::wiener_fast`]; shares no code with it.
    pub fn wiener_bfs(&self) -> Result<u128, TreeError> {
        let mut doubled: u128 = 0;
        for s in 0..self.n {
            let mut row: u128 = 0;
            for d in self.distances_from(s) {
                row = row
                    .checked_add(d as u128)
                    .ok_or(TreeError::Overflow("distance row sum"))?;
            }
            doubled = doubled
                .checked_add(row)
                .ok_or(TreeError::Overflow("wiener sum"))?;
        }
        debug_assert_eq!(doubled % 2, 0);
        Ok(doubled / 2)
    }

    /// Mean shortest path length `W / (n(n-1)/2)`; undefined for n = 1.
    pub fn mean_path_length(&self) -> Result<f64, TreeError> {
        if self.n == 1 {
            return Err(TreeError::SingleVertexAverage);
        }
        let w = self.wiener_fast()? as f64;
        let pairs = self.n as f64 * (self.n as f64 - 1.0) / 2.0;
        Ok(w / pairs)
    }

    /// Canonical JSON form.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tree serialization cannot fail")
    }

    /// Parse the JSON form, validating the tree invariants.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Plain-text edge list: one `u v` pair per line, `#` comments.
    pub fn to_edge_list_text(&self) -> String {
        let mut out = format!("# tree on {} vertices, {} edges\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Parse a plain-text edge list. The vertex count is recovered from the
    /// ids (a connected tree touches every id); a file with no edges is the
    /// single-vertex tree.
    pub fn from_edge_list_text(text: &str) -> Result<Self, TreeError> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize, TreeError> {
                tok.ok_or_else(|| {
                    TreeError::ParseEdgeList(format!("line {}: expected 'u v'", lineno + 1))
                })?
                .parse()
                .map_err(|_| {
                    TreeError::ParseEdgeList(format!("line {}: bad vertex id", lineno + 1))
                })
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            if it.next().is_some() {
                return Err(TreeError::ParseEdgeList(format!(
                    "line {}: trailing tokens",
                    lineno + 1
                )));
            }
            edges.push((u, v));
        }
        let n = edges
            .iter()
            .map(|&(u, v)| u.max(v) + 1)
            .max()
            .unwrap_or(1);
        Tree::from_edges(n, edges)
    }

    /// Parent of each vertex in the BFS tree rooted at `root` (the root is
    /// its own parent), plus the BFS visit order.
    pub(crate) fn bfs_parents(&self, root: usize) -> (Vec<usize>, Vec<usize>) {
        let mut parent = vec![usize::MAX; self.n];
        let mut order = Vec::with_capacity(self.n);
        parent[root] = root;
        let mut queue = VecDeque::with_capacity(self.n);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in &self.adjacency[u] {
                if parent[w] == usize::MAX {
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        (parent, order)
    }
}

/// Dense matrix of pairwise hop counts.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<Vec<u32>>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.d[u][v]
    }
}

/// Component sizes for every directed edge of a tree.
///
/// `get(u, v)` is the number of vertices on `v`'s side once edge `{u, v}` is
/// deleted; the two orientations of an edge always sum to `n`.
#[derive(Clone, Debug)]
pub struct SplitSizes {
    n: usize,
    parent: Vec<usize>,
    subtree: Vec<usize>,
}

impl SplitSizes {
    /// Size of the component containing `v` after deleting edge `{u, v}`.
    /// `None` if `{u, v}` is not an edge of the tree.
    pub fn get(&self, u: usize, v: usize) -> Option<usize> {
        if self.parent[v] == u {
            Some(self.subtree[v])
        } else if self.parent[u] == v {
            Some(self.n - self.subtree[u])
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// The deterministic one-step vertex growth of an edge with three
    /// single-vertex paths per endpoint: n = 8, used repeatedly as a fixture.
    pub(crate) fn three_whisker_edge() -> Tree {
        Tree::from_edges(
            8,
            [(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (1, 6), (1, 7)],
        )
        .unwrap()
    }

    #[test]
    fn rejects_invalid_trees() {
        assert_eq!(Tree::from_edges(0, []), Err(TreeError::NoVertices));
        assert_eq!(
            Tree::from_edges(3, [(0, 1)]),
            Err(TreeError::WrongEdgeCount { n: 3, got: 1 })
        );
        assert_eq!(
            Tree::from_edges(2, [(0, 0)]),
            Err(TreeError::SelfLoop(0))
        );
        assert_eq!(
            Tree::from_edges(3, [(0, 1), (1, 0)]),
            Err(TreeError::DuplicateEdge(0, 1))
        );
        assert_eq!(
            Tree::from_edges(2, [(0, 5)]),
            Err(TreeError::VertexOutOfRange { id: 5, n: 2 })
        );
        // Right edge count but a cycle plus an isolated vertex.
        assert_eq!(
            Tree::from_edges(4, [(0, 1), (1, 2), (2, 0)]),
            Err(TreeError::Disconnected)
        );
    }

    #[test]
    fn wiener_fast_examples() {
        assert_eq!(Tree::path(2).unwrap().wiener_fast().unwrap(), 1);
        // Path on 5 vertices: sum of all pairwise hop counts is 20.
        assert_eq!(Tree::path(5).unwrap().wiener_fast().unwrap(), 20);
        assert_eq!(three_whisker_edge().wiener_fast().unwrap(), 58);
    }

    #[test]
    fn wiener_bfs_examples() {
        assert_eq!(Tree::star(3).unwrap().wiener_bfs().unwrap(), 9);
        assert_eq!(Tree::single_vertex().wiener_bfs().unwrap(), 0);
        assert_eq!(Tree::path(5).unwrap().wiener_bfs().unwrap(), 20);
    }

    #[test]
    fn mean_path_length_examples() {
        assert_eq!(Tree::path(2).unwrap().mean_path_length().unwrap(), 1.0);
        assert_eq!(Tree::star(3).unwrap().mean_path_length().unwrap(), 1.5);
        assert_eq!(Tree::path(5).unwrap().mean_path_length().unwrap(), 2.0);
        assert_eq!(
            Tree::single_vertex().mean_path_length(),
            Err(TreeError::SingleVertexAverage)
        );
    }

    #[test]
    fn split_size_examples() {
        let edge = Tree::path(2).unwrap();
        let s = edge.split_sizes();
        assert_eq!(s.get(0, 1), Some(1));
        assert_eq!(s.get(1, 0), Some(1));

        let p3 = Tree::path(3).unwrap();
        let s = p3.split_sizes();
        assert_eq!(s.get(0, 1), Some(2)); // b-side of edge (a, b)
        assert_eq!(s.get(1, 0), Some(1));
        assert_eq!(s.get(2, 1), Some(2));
        assert_eq!(s.get(0, 2), None); // not an edge

        let fig = three_whisker_edge();
        let s = fig.split_sizes();
        assert_eq!(s.get(0, 1), Some(4));
        assert_eq!(s.get(1, 0), Some(4));
    }

    #[test]
    fn distances_and_diameter() {
        let p5 = Tree::path(5).unwrap();
        assert_eq!(p5.distances_from(0), vec![0, 1, 2, 3, 4]);
        assert_eq!(p5.diameter(), 4);
        assert_eq!(p5.all_distances().get(1, 4), 3);
        assert_eq!(Tree::star(3).unwrap().diameter(), 2);
        assert_eq!(Tree::single_vertex().diameter(), 0);
        assert_eq!(Tree::star(3).unwrap().degrees(), vec![3, 1, 1, 1]);
    }

    #[test]
    fn path_between_endpoints() {
        let fig = three_whisker_edge();
        assert_eq!(fig.path_between(2, 5), vec![2, 0, 1, 5]);
        assert_eq!(fig.path_between(3, 3), vec![3]);
    }

    #[test]
    fn prufer_known_trees() {
        // Empty sequence on n = 2 is the single edge.
        assert_eq!(Tree::from_prufer(&[]).unwrap(), Tree::path(2).unwrap());
        // Constant sequence decodes to a star at that vertex.
        assert_eq!(Tree::from_prufer(&[0, 0]).unwrap(), Tree::star(3).unwrap());
        // All 3 labeled trees on 3 vertices appear across the 3 sequences.
        let mut seen = std::collections::HashSet::new();
        for s in 0..3 {
            seen.insert(Tree::from_prufer(&[s]).unwrap().to_json());
        }
        assert_eq!(seen.len(), 3);
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let t = three_whisker_edge();
        let text = t.to_json();
        assert_eq!(
            text,
            r#"{"n":8,"edges":[[0,1],[0,2],[0,3],[0,4],[1,5],[1,6],[1,7]]}"#
        );
        assert_eq!(Tree::from_json(&text).unwrap(), t);
        // Deserialization validates: a cycle is rejected.
        assert!(Tree::from_json(r#"{"n":3,"edges":[[0,1],[1,2],[2,0]]}"#).is_err());
    }

    #[test]
    fn edge_list_text_round_trip() {
        let t = three_whisker_edge();
        let text = t.to_edge_list_text();
        assert_eq!(Tree::from_edge_list_text(&text).unwrap(), t);
        // Comments and blank lines are ignored; single vertex round-trips.
        let single = Tree::single_vertex();
        assert_eq!(
            Tree::from_edge_list_text(&single.to_edge_list_text()).unwrap(),
            single
        );
        assert!(Tree::from_edge_list_text("0 1 2\n").is_err());
        assert!(Tree::from_edge_list_text("0 x\n").is_err());
    }

    #[test]
    fn wiener_extremes_over_all_small_trees() {
        // Over every labeled tree on n <= 8 vertices, the path maximizes and
        // the star minimizes the Wiener index.
        for n in 2..=8usize {
            let w_path = (n as u128 * (n as u128 * n as u128 - 1)) / 6;
            let w_star = ((n - 1) as u128) * ((n - 1) as u128);
            let mut seq = vec![0usize; n.saturating_sub(2)];
            loop {
                let t = Tree::from_prufer(&seq).unwrap();
                let w = t.wiener_fast().unwrap();
                assert!(w <= w_path, "n={n} seq={seq:?} w={w}");
                assert!(w >= w_star, "n={n} seq={seq:?} w={w}");
                // Odometer over {0..n}^(n-2).
                let mut i = 0;
                loop {
                    if i == seq.len() {
                        break;
                    }
                    seq[i] += 1;
                    if seq[i] < n {
                        break;
                    }
                    seq[i] = 0;
                    i += 1;
                }
                if i == seq.len() {
                    break;
                }
            }
            assert_eq!(Tree::path(n).unwrap().wiener_fast().unwrap(), w_path);
            assert_eq!(Tree::star(n - 1).unwrap().wiener_fast().unwrap(), w_star);
        }
    }

    #[test]
    fn wiener_agreement_on_a_large_tree() {
        // One deliberately deep random-ish tree at n = 2000.
        let seq: Vec<usize> = (0..1998).map(|i| (i * 7919 + 13) % 2000).collect();
        let t = Tree::from_prufer(&seq).unwrap();
        assert_eq!(t.wiener_fast().unwrap(), t.wiener_bfs().unwrap());
    }

    proptest! {
        #[test]
        fn wiener_fast_matches_bfs_oracle(seq in prop::collection::vec(0usize..64, 0..62)) {
            let seq: Vec<usize> = seq.iter().map(|&x| x % (seq.len() + 2)).collect();
            let t = Tree::from_prufer(&seq).unwrap();
            prop_assert_eq!(t.wiener_fast().unwrap(), t.wiener_bfs().unwrap());
        }

        #[test]
        fn split_sizes_sum_to_n(seq in prop::collection::vec(0usize..64, 0..62)) {
            let seq: Vec<usize> = seq.iter().map(|&x| x % (seq.len() + 2)).collect();
            let t = Tree::from_prufer(&seq).unwrap();
            let s = t.split_sizes();
            for &(u, v) in t.edges() {
                prop_assert_eq!(s.get(u, v).unwrap() + s.get(v, u).unwrap(), t.n());
            }
        }

        #[test]
        fn mean_path_length_times_pairs_is_wiener(seq in prop::collection::vec(0usize..32, 1..30)) {
            let seq: Vec<usize> = seq.iter().map(|&x| x % (seq.len() + 2)).collect();
            let t = Tree::from_prufer(&seq).unwrap();
            let n = t.n() as f64;
            let recovered = t.mean_path_length().unwrap() * n * (n - 1.0) / 2.0;
            let w = t.wiener_fast().unwrap() as f64;
            // Divide-then-multiply costs at most a couple of ulps.
            prop_assert!((recovered - w).abs() <= 4.0 * f64::EPSILON * w);
        }

        #[test]
        fn serialization_round_trips(seq in prop::collection::vec(0usize..32, 0..30)) {
            let seq: Vec<usize> = seq.iter().map(|&x| x % (seq.len() + 2)).collect();
            let t = Tree::from_prufer(&seq).unwrap();
            prop_assert_eq!(&Tree::from_json(&t.to_json()).unwrap(), &t);
            prop_assert_eq!(&Tree::from_edge_list_text(&t.to_edge_list_text()).unwrap(), &t);
        }
    }
}
