//! Undirected simple graphs in compressed sparse row form.
//!
//! Vertices are contiguous ids `0..n`. Adjacency lists are stored in
//! ascending order and BFS scans neighbors in that order, so every
//! traversal, tree, and orientation derived downstream is deterministic.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

/// Largest supported vertex count.
///
/// Keeps every per-edge counter within `u32` and every accumulated total
/// within checked `u64`/`i64` arithmetic.
pub const MAX_ORDER: usize = 1 << 31;

const UNREACHED_U32: u32 = u32::MAX;
const UNREACHED_U16: u16 = u16::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {v} out of range for graph of order {n}")]
    VertexOutOfRange { v: u32, n: usize },
    #[error("({u}, {v}) is not an edge")]
    NotAnEdge { u: u32, v: u32 },
    #[error("self-loop at vertex {v}")]
    SelfLoop { v: u32 },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: u32, v: u32 },
    #[error("order {n} exceeds the supported maximum {MAX_ORDER}")]
    TooLarge { n: u64 },
}

/// Error for the edge-list text format, reported with a 1-based line number.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("malformed token {token:?}")]
    Malformed { token: String },
    #[error("expected `<u> <v>`, found {found} fields")]
    FieldCount { found: usize },
    #[error("header must be `p <n> <m>`")]
    BadHeader,
    #[error("self-loop at vertex {v}")]
    SelfLoop { v: u32 },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: u32, v: u32 },
    #[error("vertex {v} out of range: header declares order {n}")]
    VertexOutOfRange { v: u32, n: usize },
    #[error("header declares {declared} edges, body contains {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("declared order {n} exceeds the supported maximum {MAX_ORDER}")]
    TooLarge { n: u64 },
}

/// Immutable simple undirected graph.
///
/// Canonical form: no self-loops, no duplicate edges, adjacency symmetric
/// and strictly ascending per vertex, edge list sorted lexicographically
/// with `u < v` in every pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Builds a graph from an edge list; pairs may appear in either order.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, GraphError> {
        if n > MAX_ORDER {
            return Err(GraphError::TooLarge { n: n as u64 });
        }
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop { v: a });
            }
            pairs.push((a.min(b), a.max(b)));
        }
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateEdge {
                    u: w[0].0,
                    v: w[0].1,
                });
            }
        }
        if let Some(&(_, hi)) = pairs.last() {
            if hi as usize >= n {
                return Err(GraphError::VertexOutOfRange { v: hi, n });
            }
        }

        let mut degrees = vec![0usize; n];
        for &(u, v) in &pairs {
            degrees[u as usize] += 1;
            degrees[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for v in 0..n {
            offsets.push(offsets[v] + degrees[v]);
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0u32; offsets[n]];
        // Lexicographic edge order feeds each adjacency list in ascending
        // order: entries below v arrive with ascending first coordinate,
        // entries above v with ascending second.
        for &(u, v) in &pairs {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        Ok(Graph {
            n,
            offsets,
            neighbors,
            edges: pairs,
        })
    }

    /// Parses the edge-list text format.
    ///
    /// UTF-8 lines; an optional first content line `p <n> <m>`; every other
    /// non-empty, non-`#` line is `<u> <v>` with decimal ids. Without a
    /// header the order is `1 + max id` (0 for an empty document).
    ///
    /// ```
    /// use mostar::Graph;
    /// let g = Graph::parse("p 3 2\n0 1\n1 2\n").unwrap();
    /// assert_eq!((g.order(), g.size()), (3, 2));
    /// ```
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut header: Option<(usize, usize, usize)> = None; // (n, m, line)
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        let mut seen: HashSet<(u32, u32)> = HashSet::new();
        let mut first_content = true;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            if first_content && fields[0] == "p" {
                first_content = false;
                if fields.len() != 3 {
                    return Err(ParseError {
                        line,
                        kind: ParseErrorKind::BadHeader,
                    });
                }
                let n = parse_count(fields[1], line)?;
                let m = parse_count(fields[2], line)?;
                if n > MAX_ORDER as u64 {
                    return Err(ParseError {
                        line,
                        kind: ParseErrorKind::TooLarge { n },
                    });
                }
                header = Some((n as usize, m as usize, line));
                continue;
            }
            first_content = false;
            if fields.len() != 2 {
                return Err(ParseError {
                    line,
                    kind: ParseErrorKind::FieldCount {
                        found: fields.len(),
                    },
                });
            }
            let u = parse_id(fields[0], line)?;
            let v = parse_id(fields[1], line)?;
            if u == v {
                return Err(ParseError {
                    line,
                    kind: ParseErrorKind::SelfLoop { v },
                });
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(ParseError {
                    line,
                    kind: ParseErrorKind::DuplicateEdge { u: key.0, v: key.1 },
                });
            }
            if let Some((n, _, _)) = header {
                if key.1 as usize >= n {
                    return Err(ParseError {
                        line,
                        kind: ParseErrorKind::VertexOutOfRange { v: key.1, n },
                    });
                }
            }
            pairs.push(key);
        }

        let n = match header {
            Some((n, m, line)) => {
                if pairs.len() != m {
                    return Err(ParseError {
                        line,
                        kind: ParseErrorKind::EdgeCountMismatch {
                            declared: m,
                            found: pairs.len(),
                        },
                    });
                }
                n
            }
            None => pairs
                .iter()
                .map(|&(_, v)| v as usize + 1)
                .max()
                .unwrap_or(0),
        };
        Ok(Self::from_edges(n, pairs).expect("validated while parsing"))
    }

    /// Canonical serialization: `p <n> <m>` then one `u v` line per edge in
    /// lexicographic order. `parse` of this output reproduces the graph.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + 12 * self.edges.len());
        let _ = writeln!(out, "p {} {}", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{} {}", u, v);
        }
        out
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n)
            .map(|v| self.offsets[v + 1] - self.offsets[v])
            .max()
            .unwrap_or(0)
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        if u as usize >= self.n || v as usize >= self.n {
            return false;
        }
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Index of edge `(u, v)` in the canonical edge list.
    pub fn edge_index(&self, u: u32, v: u32) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    /// Fills `dist` with hop counts from `s`, `u32::MAX` for unreachable
    /// vertices, pushing visit order into `queue`. Neighbor scans are
    /// ascending, so the first discoverer of each vertex is fixed.
    pub(crate) fn bfs_fill(&self, s: u32, dist: &mut [u32], queue: &mut Vec<u32>) {
        dist.fill(UNREACHED_U32);
        queue.clear();
        dist[s as usize] = 0;
        queue.push(s);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            let du = dist[u as usize];
            for &w in self.neighbors(u) {
                if dist[w as usize] == UNREACHED_U32 {
                    dist[w as usize] = du + 1;
                    queue.push(w);
                }
            }
        }
    }

    /// Exact unweighted shortest-path distances from `s`.
    pub fn bfs_distances(&self, s: u32) -> Result<DistanceRow, GraphError> {
        if s as usize >= self.n {
            return Err(GraphError::VertexOutOfRange { v: s, n: self.n });
        }
        let mut dist = vec![UNREACHED_U32; self.n];
        let mut queue = Vec::with_capacity(self.n);
        self.bfs_fill(s, &mut dist, &mut queue);
        Ok(DistanceRow::from_raw(s, &dist))
    }

    /// A maximum-cardinality component as a sorted vertex set plus its order.
    /// Ties go to the component containing the smallest vertex id.
    pub fn largest_component(&self) -> (Vec<u32>, usize) {
        if self.n == 0 {
            return (Vec::new(), 0);
        }
        let mut visited = vec![false; self.n];
        let mut queue: Vec<u32> = Vec::new();
        let mut best_seed = 0u32;
        let mut best_size = 0usize;
        for s in 0..self.n as u32 {
            if visited[s as usize] {
                continue;
            }
            queue.clear();
            queue.push(s);
            visited[s as usize] = true;
            let mut head = 0;
            while head < queue.len() {
                let u = queue[head];
                head += 1;
                for &w in self.neighbors(u) {
                    if !visited[w as usize] {
                        visited[w as usize] = true;
                        queue.push(w);
                    }
                }
            }
            // Seeds are scanned in ascending id order, so keeping the first
            // strictly-larger component realizes the smallest-id tie rule.
            if queue.len() > best_size {
                best_size = queue.len();
                best_seed = s;
            }
        }
        let mut members = Vec::with_capacity(best_size);
        visited.fill(false);
        queue.clear();
        queue.push(best_seed);
        visited[best_seed as usize] = true;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            members.push(u);
            for &w in self.neighbors(u) {
                if !visited[w as usize] {
                    visited[w as usize] = true;
                    queue.push(w);
                }
            }
        }
        members.sort_unstable();
        (members, best_size)
    }

    /// Checks every degree against `delta` and reports regularity.
    pub fn validate_degree(&self, delta: u32) -> DegreeReport {
        let mut offenders = Vec::new();
        let mut regular = self.n > 0;
        for v in 0..self.n as u32 {
            let d = self.degree(v) as u32;
            if d > delta {
                offenders.push(v);
            }
            if d != delta {
                regular = false;
            }
        }
        DegreeReport {
            delta,
            passed: offenders.is_empty(),
            offenders,
            regular,
        }
    }
}

fn parse_count(token: &str, line: usize) -> Result<u64, ParseError> {
    token.parse::<u64>().map_err(|_| ParseError {
        line,
        kind: ParseErrorKind::Malformed {
            token: token.to_string(),
        },
    })
}

fn parse_id(token: &str, line: usize) -> Result<u32, ParseError> {
    token.parse::<u32>().map_err(|_| ParseError {
        line,
        kind: ParseErrorKind::Malformed {
            token: token.to_string(),
        },
    })
}

/// Degree validation outcome. `offenders` lists vertices above the cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeReport {
    pub delta: u32,
    pub passed: bool,
    pub offenders: Vec<u32>,
    pub regular: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum DistStore {
    // Narrow rows keep memory down when many rows are alive at once;
    // n <= u16::MAX guarantees every finite distance fits below the sentinel.
    Narrow(Vec<u16>),
    Wide(Vec<u32>),
}

/// Hop distances from one source vertex.
///
/// Unreachable vertices are an explicit state, never a large finite value:
/// `get` returns `None` outside the source's component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceRow {
    source: u32,
    store: DistStore,
}

impl DistanceRow {
    fn from_raw(source: u32, raw: &[u32]) -> Self {
        let store = if raw.len() <= u16::MAX as usize {
            DistStore::Narrow(
                raw.iter()
                    .map(|&d| {
                        if d == UNREACHED_U32 {
                            UNREACHED_U16
                        } else {
                            d as u16
                        }
                    })
                    .collect(),
            )
        } else {
            DistStore::Wide(raw.to_vec())
        };
        DistanceRow { source, store }
    }

    pub fn source(&self) -> u32 {
        self.source
    }

    pub fn len(&self) -> usize {
        match &self.store {
            DistStore::Narrow(v) => v.len(),
            DistStore::Wide(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Distance to `v`, or `None` when `v` is unreachable from the source.
    pub fn get(&self, v: u32) -> Option<u32> {
        match &self.store {
            DistStore::Narrow(d) => {
                let x = d[v as usize];
                (x != UNREACHED_U16).then_some(x as u32)
            }
            DistStore::Wide(d) => {
                let x = d[v as usize];
                (x != UNREACHED_U32).then_some(x)
            }
        }
    }

    pub fn is_reachable(&self, v: u32) -> bool {
        self.get(v).is_some()
    }
}
