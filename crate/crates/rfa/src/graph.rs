//! Undirected sparse graphs in compressed sparse row form.
//!
//! [`Graph`] is the input type for every other module: immutable after
//! construction, neighbor lists sorted ascending, no self-loops, no
//! duplicate edges, node ids dense in `0..n`. Construction enforces all of
//! that, so downstream code can rely on it without re-checking.
//!
//! Edge-list files are plain ASCII: two whitespace-separated integer node
//! ids per line, `#` starting a whole-line comment, blank lines ignored.
//! Arbitrary non-negative ids are accepted and compacted to `0..n` in
//! ascending order; the original ids come back as a sidecar vector so
//! outputs can be written in the caller's id space.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// An immutable undirected simple graph in CSR form.
///
/// Invariants (enforced by every constructor):
/// - neighbor lists are sorted ascending with no duplicates;
/// - `j ∈ neighbors(i)` iff `i ∈ neighbors(j)`;
/// - no self-loops;
/// - `degree(i)` equals the length of node `i`'s neighbor list, and the
///   degree sum equals `2m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    degrees: Vec<u32>,
}

impl Graph {
    /// Build a graph on `n` nodes from an undirected edge list.
    ///
    /// Self-loops are dropped and duplicate edges (in either orientation)
    /// are deduplicated. Endpoints must be `< n`.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Graph> {
        if n == 0 {
            return Err(Error::Data("empty graph (no nodes)".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "node count {n} exceeds the u32 id space"
            )));
        }
        for &(a, b) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(Error::Data(format!(
                    "edge ({a}, {b}) references a node outside 0..{n}"
                )));
            }
        }

        // Count raw directed entries (both orientations), then fill and
        // compact each row: sort, dedup, shift left over freed space.
        let mut counts = vec![0usize; n];
        for &(a, b) in edges {
            if a != b {
                counts[a as usize] += 1;
                counts[b as usize] += 1;
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + counts[i];
        }
        let mut col_idx = vec![0u32; row_ptr[n]];
        let mut cursor = row_ptr[..n].to_vec();
        for &(a, b) in edges {
            if a != b {
                col_idx[cursor[a as usize]] = b;
                cursor[a as usize] += 1;
                col_idx[cursor[b as usize]] = a;
                cursor[b as usize] += 1;
            }
        }

        let mut write = 0usize;
        let mut new_ptr = vec![0usize; n + 1];
        for i in 0..n {
            let (start, end) = (row_ptr[i], row_ptr[i + 1]);
            col_idx[start..end].sort_unstable();
            let mut prev: Option<u32> = None;
            for k in start..end {
                let v = col_idx[k];
                if prev != Some(v) {
                    col_idx[write] = v;
                    write += 1;
                    prev = Some(v);
                }
            }
            new_ptr[i + 1] = write;
        }
        col_idx.truncate(write);
        col_idx.shrink_to_fit();

        let degrees: Vec<u32> = (0..n).map(|i| (new_ptr[i + 1] - new_ptr[i]) as u32).collect();
        debug_assert_eq!(write % 2, 0, "directed entry count must be even");
        Ok(Graph {
            n,
            m: write / 2,
            row_ptr: new_ptr,
            col_idx,
            degrees,
        })
    }

    /// Node count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Undirected edge count.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Degree of node `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i] as usize
    }

    /// Per-node degree vector.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Sorted neighbor list of node `i`.
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Maximum degree over all nodes (0 for an edgeless graph).
    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0) as usize
    }

    /// True if some node has degree 0.
    pub fn has_isolated_nodes(&self) -> bool {
        self.degrees.iter().any(|&d| d == 0)
    }

    /// True if the graph is connected (trivially true for n = 1).
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        bfs_mark(self, 0, &mut seen) == self.n
    }

    /// Iterate undirected edges as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| (u as u32) < v)
                .map(move |v| (u as u32, v))
        })
    }
}

/// Breadth-first search from `start`, marking reached nodes in `seen`.
/// Returns the number of newly reached nodes.
fn bfs_mark(g: &Graph, start: usize, seen: &mut [bool]) -> usize {
    if seen[start] {
        return 0;
    }
    let mut queue = std::collections::VecDeque::new();
    seen[start] = true;
    queue.push_back(start as u32);
    let mut reached = 1usize;
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u as usize) {
            if !seen[v as usize] {
                seen[v as usize] = true;
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    reached
}

/// Connected-component labeling plus the relabeling used when the largest
/// component is extracted.
#[derive(Debug, Clone)]
pub struct ComponentMap {
    /// Per-node component label, contiguous from 0 in order of discovery
    /// (scanning nodes by ascending id).
    pub component_id: Vec<u32>,
    /// Per-component node counts, indexed by component label.
    pub sizes: Vec<usize>,
    /// Old id → new id for nodes of the extracted component; `None` for
    /// dropped nodes. Kept nodes preserve their relative order.
    pub remap: Vec<Option<u32>>,
}

impl ComponentMap {
    /// New id → old id for the extracted component.
    pub fn extracted_old_ids(&self) -> Vec<usize> {
        let mut old: Vec<(u32, usize)> = self
            .remap
            .iter()
            .enumerate()
            .filter_map(|(o, maybe)| maybe.map(|nw| (nw, o)))
            .collect();
        old.sort_unstable();
        old.into_iter().map(|(_, o)| o).collect()
    }

    /// Number of connected components.
    pub fn num_components(&self) -> usize {
        self.sizes.len()
    }
}

/// Extract the largest connected component.
///
/// Ties between equal-size components are broken by the smallest minimum
/// original node id (equivalently, the first one discovered scanning nodes
/// in ascending id order). Kept nodes are relabeled to `0..n'` preserving
/// their relative order; the returned [`ComponentMap`] records everything.
pub fn largest_connected_component(g: &Graph) -> (Graph, ComponentMap) {
    let n = g.n();
    let mut component_id = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let label = sizes.len() as u32;
        let mut queue = std::collections::VecDeque::new();
        seen[start] = true;
        component_id[start] = label;
        queue.push_back(start as u32);
        let mut size = 1usize;
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u as usize) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    component_id[v as usize] = label;
                    size += 1;
                    queue.push_back(v);
                }
            }
        }
        sizes.push(size);
    }

    // First maximum wins: components are discovered in ascending min-id
    // order, so this is exactly the smallest-min-id tie-break.
    let mut best = 0usize;
    for (c, &s) in sizes.iter().enumerate() {
        if s > sizes[best] {
            best = c;
        }
    }

    let mut remap = vec![None; n];
    let mut next = 0u32;
    for i in 0..n {
        if component_id[i] == best as u32 {
            remap[i] = Some(next);
            next += 1;
        }
    }
    let edges: Vec<(u32, u32)> = g
        .edges()
        .filter_map(|(u, v)| {
            match (remap[u as usize], remap[v as usize]) {
                (Some(a), Some(b)) => Some((a, b)),
                _ => None,
            }
        })
        .collect();
    let sub = Graph::from_edges(next as usize, &edges)
        .expect("component extraction preserves validity");
    (
        sub,
        ComponentMap {
            component_id,
            sizes,
            remap,
        },
    )
}

/// Whether input node ids start at 0 or at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexBase {
    /// Ids are used as-is.
    #[default]
    Zero,
    /// Ids are shifted down by one on load.
    One,
}

/// Options for [`load_edge_list`].
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Indexing base of the input file.
    pub base: IndexBase,
    /// Strict mode (default) rejects malformed lines with a parse error;
    /// lenient mode skips them.
    pub strict: bool,
}

impl LoadOptions {
    /// Strict, 0-indexed — the default for all CLI paths.
    pub fn strict() -> Self {
        LoadOptions {
            base: IndexBase::Zero,
            strict: true,
        }
    }
}

/// Load an undirected edge list from a text file.
///
/// Returns the graph plus the sidecar `original_ids` vector: entry `i` is
/// the input-file id of compact node `i`. Self-loops are dropped (their
/// endpoint still counts as a node), duplicate edges are deduplicated, and
/// every edge is stored in both directions.
pub fn load_edge_list(path: impl AsRef<Path>, options: LoadOptions) -> Result<(Graph, Vec<u64>)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut raw_edges: Vec<(u64, u64)> = Vec::new();
    let mut ids: Vec<u64> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match parse_edge_line(trimmed, options.base) {
            Ok((u, v)) => {
                ids.push(u);
                ids.push(v);
                if u != v {
                    raw_edges.push((u, v));
                }
            }
            Err(msg) => {
                if options.strict {
                    return Err(Error::parse(path, lineno, msg));
                }
            }
        }
    }

    if ids.is_empty() {
        return Err(Error::Data(format!(
            "{}: empty graph (no edges or nodes found)",
            path.display()
        )));
    }

    // Compact arbitrary ids to 0..n in ascending original order.
    ids.sort_unstable();
    ids.dedup();
    let index: HashMap<u64, u32> = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i as u32))
        .collect();
    let edges: Vec<(u32, u32)> = raw_edges
        .into_iter()
        .map(|(u, v)| (index[&u], index[&v]))
        .collect();
    let graph = Graph::from_edges(ids.len(), &edges)?;
    Ok((graph, ids))
}

/// Parse one non-comment edge line into a pair of 0-based ids.
fn parse_edge_line(line: &str, base: IndexBase) -> std::result::Result<(u64, u64), String> {
    let mut tokens = line.split_whitespace();
    let a = tokens.next().ok_or("expected two integer tokens")?;
    let b = tokens
        .next()
        .ok_or("expected two integer tokens, found one")?;
    if let Some(extra) = tokens.next() {
        return Err(format!("expected two integer tokens, found extra {extra:?}"));
    }
    let parse = |tok: &str| -> std::result::Result<u64, String> {
        if tok.starts_with('-') {
            return Err(format!("negative node id {tok:?}"));
        }
        tok.parse::<u64>()
            .map_err(|_| format!("non-integer token {tok:?}"))
    };
    let (mut u, mut v) = (parse(a)?, parse(b)?);
    if base == IndexBase::One {
        if u == 0 || v == 0 {
            return Err("id 0 is invalid in 1-indexed input".into());
        }
        u -= 1;
        v -= 1;
    }
    Ok((u, v))
}

/// Write a graph as an edge list: one `u v` line per undirected edge,
/// ascending, each edge once. `original_ids` maps compact ids back to the
/// caller's id space (pass `None` for identity).
pub fn save_edge_list(
    g: &Graph,
    path: impl AsRef<Path>,
    original_ids: Option<&[u64]>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let id = |i: u32| -> u64 {
        match original_ids {
            Some(map) => map[i as usize],
            None => i as u64,
        }
    };
    (|| -> std::io::Result<()> {
        writeln!(w, "# nodes={} edges={}", g.n(), g.m())?;
        for (u, v) in g.edges() {
            writeln!(w, "{} {}", id(u), id(v))?;
        }
        w.flush()
    })()
    .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    /// Direct scan of the CSR invariants: sorted unique neighbors, symmetry,
    /// degree bookkeeping.
    fn assert_valid(g: &Graph) {
        let mut degree_sum = 0usize;
        for i in 0..g.n() {
            let nbrs = g.neighbors(i);
            degree_sum += nbrs.len();
            assert_eq!(g.degree(i), nbrs.len());
            for w in nbrs.windows(2) {
                assert!(w[0] < w[1], "neighbors of {i} not sorted unique");
            }
            for &j in nbrs {
                assert_ne!(j as usize, i, "self-loop at {i}");
                assert!(
                    g.neighbors(j as usize).binary_search(&(i as u32)).is_ok(),
                    "edge ({i},{j}) missing its reverse"
                );
            }
        }
        assert_eq!(degree_sum, 2 * g.m());
    }

    #[test]
    fn path_graph_from_file() {
        let f = write_temp("0 1\n1 2\n");
        let (g, ids) = load_edge_list(f.path(), LoadOptions::strict()).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert_eq!(g.degrees(), &[1, 2, 1]);
        assert_eq!(ids, vec![0, 1, 2]);
        assert_valid(&g);
    }

    #[test]
    fn duplicates_and_self_loops_dropped() {
        let f = write_temp("0 1\n1 0\n0 0\n");
        let (g, _) = load_edge_list(f.path(), LoadOptions::strict()).unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        assert_valid(&g);
    }

    #[test]
    fn comments_blanks_and_gap_ids() {
        let f = write_temp("# a comment\n\n10 30\n30 20\n");
        let (g, ids) = load_edge_list(f.path(), LoadOptions::strict()).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert_eq!(ids, vec![10, 20, 30]);
        // 30 is compact id 2, adjacent to both others.
        assert_eq!(g.neighbors(2), &[0, 1]);
        assert_valid(&g);
    }

    #[test]
    fn one_indexed_input() {
        let f = write_temp("1 2\n2 3\n");
        let opts = LoadOptions {
            base: IndexBase::One,
            strict: true,
        };
        let (g, ids) = load_edge_list(f.path(), opts).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert_eq!(ids, vec![0, 1, 2]);
    }

    #[test]
    fn malformed_lines_error_with_line_number() {
        let f = write_temp("0 1\nnope 2\n");
        let err = load_edge_list(f.path(), LoadOptions::strict()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }

        let f = write_temp("0 1\n2\n");
        assert!(load_edge_list(f.path(), LoadOptions::strict()).is_err());

        let f = write_temp("0 1\n-3 2\n");
        let err = load_edge_list(f.path(), LoadOptions::strict()).unwrap_err();
        assert!(err.to_string().contains("negative"));
    }

    #[test]
    fn lenient_mode_skips_malformed_lines() {
        let f = write_temp("0 1\nnope 2\n1 2\n");
        let opts = LoadOptions {
            base: IndexBase::Zero,
            strict: false,
        };
        let (g, _) = load_edge_list(f.path(), opts).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
    }

    #[test]
    fn empty_file_is_a_data_error() {
        let f = write_temp("# only a comment\n");
        let err = load_edge_list(f.path(), LoadOptions::strict()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn self_loop_only_node_still_counts() {
        let f = write_temp("0 0\n1 2\n");
        let (g, ids) = load_edge_list(f.path(), LoadOptions::strict()).unwrap();
        assert_eq!((g.n(), g.m()), (3, 1));
        assert_eq!(ids, vec![0, 1, 2]);
        assert_eq!(g.degree(0), 0);
    }

    #[test]
    fn lcc_identity_on_connected_graph() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let (sub, map) = largest_connected_component(&g);
        assert_eq!(sub.n(), 3);
        assert_eq!(map.num_components(), 1);
        assert_eq!(map.remap, vec![Some(0), Some(1), Some(2)]);
        assert_eq!(map.extracted_old_ids(), vec![0, 1, 2]);
    }

    #[test]
    fn lcc_tie_break_on_min_id() {
        // Two disjoint triangles plus an isolated node: tie broken toward
        // the triangle containing node 0.
        let g = Graph::from_edges(
            7,
            &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)],
        )
        .unwrap();
        let (sub, map) = largest_connected_component(&g);
        assert_eq!((sub.n(), sub.m()), (3, 3));
        assert_eq!(map.num_components(), 3);
        assert_eq!(map.sizes, vec![3, 3, 1]);
        assert_eq!(map.extracted_old_ids(), vec![0, 1, 2]);
        assert!(sub.is_connected());
        assert_valid(&sub);
    }

    #[test]
    fn lcc_relabels_preserving_order() {
        // Component {1, 3, 5} (path), singletons 0, 2, 4.
        let g = Graph::from_edges(6, &[(1, 3), (3, 5)]).unwrap();
        let (sub, map) = largest_connected_component(&g);
        assert_eq!(sub.n(), 3);
        assert_eq!(map.remap[1], Some(0));
        assert_eq!(map.remap[3], Some(1));
        assert_eq!(map.remap[5], Some(2));
        assert_eq!(map.remap[0], None);
        assert_eq!(map.extracted_old_ids(), vec![1, 3, 5]);
        // Path structure survives the relabeling.
        assert_eq!(sub.neighbors(1), &[0, 2]);
    }

    #[test]
    fn single_node_graph_is_its_own_component() {
        let g = Graph::from_edges(1, &[]).unwrap();
        let (sub, map) = largest_connected_component(&g);
        assert_eq!(sub.n(), 1);
        assert_eq!(map.sizes, vec![1]);
    }

    #[test]
    fn save_then_load_round_trips() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cycle.edges");
        save_edge_list(&g, &path, None).unwrap();
        let (back, ids) = load_edge_list(&path, LoadOptions::strict()).unwrap();
        assert_eq!(back, g);
        assert_eq!(ids, vec![0, 1, 2, 3]);
    }

    #[test]
    fn save_uses_original_ids() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pair.edges");
        save_edge_list(&g, &path, Some(&[100, 200])).unwrap();
        let content = std::fs::read_to_string(&path).unwrap();
        assert!(content.contains("100 200"));
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert!(Graph::from_edges(0, &[]).is_err());
        assert!(Graph::from_edges(2, &[(0, 5)]).is_err());
    }

    #[test]
    fn edges_iterator_lists_each_edge_once() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 1), (0, 2), (1, 2)]);
    }
}
