//! Independent reference implementation and exhaustive small-graph search.
//!
//! Everything here recomputes distances with its own breadth-first search
//! over a full distance matrix and shares no traversal or accumulation code
//! with the streaming engine in [`crate::mostar`]; agreement between the two
//! is what the equivalence suites certify.
//!
//! Enumeration is over labeled graphs: upper-triangle edge subsets in
//! lexicographic order with the degree cap pruned during generation. No
//! isomorphism rejection — maxima are isomorphism-invariant and labeled
//! enumeration is easier to make airtight.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;

/// Exhaustive enumeration is capped here; the candidate space grows as
/// `2^(n(n-1)/2)` and degree pruning keeps only small orders feasible.
pub const MAX_ENUMERATION_ORDER: usize = 10;
/// The reference implementation materializes an n-by-n matrix.
pub const MAX_REFERENCE_ORDER: usize = 64;
/// Canonical forms scan all vertex permutations.
pub const MAX_CANONICAL_ORDER: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("order {n} outside the supported enumeration range 1..={MAX_ENUMERATION_ORDER}")]
    EnumerationOrder { n: usize },
    #[error("order {n} outside the supported search range 2..={MAX_ENUMERATION_ORDER}")]
    SearchOrder { n: usize },
    #[error("order {n} too large for the reference implementation (max {MAX_REFERENCE_ORDER})")]
    ReferenceOrder { n: usize },
    #[error("order {n} too large for canonical forms (max {MAX_CANONICAL_ORDER})")]
    CanonicalOrder { n: usize },
}

fn reference_bfs(adj: &[Vec<u32>], s: usize, dist: &mut [i32], queue: &mut VecDeque<u32>) {
    dist.fill(-1);
    queue.clear();
    dist[s] = 0;
    queue.push_back(s as u32);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &w in &adj[u as usize] {
            if dist[w as usize] < 0 {
                dist[w as usize] = du + 1;
                queue.push_back(w);
            }
        }
    }
}

fn reference_mostar(adj: &[Vec<u32>], pairs: &[(u32, u32)]) -> u64 {
    let n = adj.len();
    let mut matrix = vec![-1i32; n * n];
    let mut queue = VecDeque::with_capacity(n);
    for s in 0..n {
        reference_bfs(adj, s, &mut matrix[s * n..(s + 1) * n], &mut queue);
    }
    let mut total = 0u64;
    for &(u, v) in pairs {
        let mut closer_u = 0i64;
        let mut closer_v = 0i64;
        for w in 0..n {
            let du = matrix[w * n + u as usize];
            let dv = matrix[w * n + v as usize];
            let du = if du < 0 { i32::MAX } else { du };
            let dv = if dv < 0 { i32::MAX } else { dv };
            if du < dv {
                closer_u += 1;
            } else if dv < du {
                closer_v += 1;
            }
        }
        total += closer_u.abs_diff(closer_v);
    }
    total
}

/// Mostar index by the naive method: a full distance matrix, then per-edge
/// counting. Ground truth for the streaming engine.
pub fn mostar_reference(g: &Graph) -> Result<u64, OracleError> {
    let n = g.order();
    if n > MAX_REFERENCE_ORDER {
        return Err(OracleError::ReferenceOrder { n });
    }
    let adj: Vec<Vec<u32>> = (0..n as u32).map(|v| g.neighbors(v).to_vec()).collect();
    Ok(reference_mostar(&adj, g.edges()))
}

/// Lexicographic depth-first cursor over degree-capped edge subsets.
struct SubsetCursor {
    n: usize,
    delta: u32,
    all_pairs: Vec<(u32, u32)>,
    chosen: Vec<usize>,
    pairs: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
    degrees: Vec<u32>,
    next: usize,
    fixed_depth: usize,
    started: bool,
    visit_stamp: u32,
    visited: Vec<u32>,
    bfs_queue: Vec<u32>,
}

fn upper_triangle_pairs(n: usize) -> Vec<(u32, u32)> {
    let mut pairs = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            pairs.push((u, v));
        }
    }
    pairs
}

impl SubsetCursor {
    fn new(n: usize, delta: u32) -> Self {
        SubsetCursor {
            n,
            delta,
            all_pairs: upper_triangle_pairs(n),
            chosen: Vec::new(),
            pairs: Vec::new(),
            adj: vec![Vec::new(); n],
            degrees: vec![0; n],
            next: 0,
            fixed_depth: 0,
            started: false,
            visit_stamp: 0,
            visited: vec![0; n],
            bfs_queue: Vec::with_capacity(n),
        }
    }

    /// Cursor over all subsets extending `prefix` (inclusive); `None` when
    /// the prefix itself violates the degree cap.
    fn with_prefix(n: usize, delta: u32, prefix: &[usize]) -> Option<Self> {
        let mut cursor = Self::new(n, delta);
        for &idx in prefix {
            if !cursor.can_add(idx) {
                return None;
            }
            cursor.push(idx);
            cursor.next = idx + 1;
        }
        cursor.fixed_depth = prefix.len();
        Some(cursor)
    }

    fn can_add(&self, idx: usize) -> bool {
        let (u, v) = self.all_pairs[idx];
        self.degrees[u as usize] < self.delta && self.degrees[v as usize] < self.delta
    }

    fn push(&mut self, idx: usize) {
        let (u, v) = self.all_pairs[idx];
        self.chosen.push(idx);
        self.pairs.push((u, v));
        self.adj[u as usize].push(v);
        self.adj[v as usize].push(u);
        self.degrees[u as usize] += 1;
        self.degrees[v as usize] += 1;
    }

    fn pop(&mut self) -> usize {
        let idx = self.chosen.pop().expect("pop on empty cursor");
        let (u, v) = self.pairs.pop().expect("pairs track chosen");
        self.adj[u as usize].pop();
        self.adj[v as usize].pop();
        self.degrees[u as usize] -= 1;
        self.degrees[v as usize] -= 1;
        idx
    }

    /// Moves to the next subset in lexicographic order; the first call
    /// lands on the initial subset (empty set or the fixed prefix).
    fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            return true;
        }
        loop {
            while self.next < self.all_pairs.len() && !self.can_add(self.next) {
                self.next += 1;
            }
            if self.next < self.all_pairs.len() {
                let idx = self.next;
                self.push(idx);
                self.next = idx + 1;
                return true;
            }
            if self.chosen.len() <= self.fixed_depth {
                return false;
            }
            let last = self.pop();
            self.next = last + 1;
        }
    }

    fn is_connected(&mut self) -> bool {
        if self.n <= 1 {
            return true;
        }
        self.visit_stamp += 1;
        let stamp = self.visit_stamp;
        self.bfs_queue.clear();
        self.bfs_queue.push(0);
        self.visited[0] = stamp;
        let mut head = 0;
        while head < self.bfs_queue.len() {
            let u = self.bfs_queue[head];
            head += 1;
            for &w in &self.adj[u as usize] {
                if self.visited[w as usize] != stamp {
                    self.visited[w as usize] = stamp;
                    self.bfs_queue.push(w);
                }
            }
        }
        self.bfs_queue.len() == self.n
    }

    fn current_graph(&self) -> Graph {
        Graph::from_edges(self.n, self.pairs.iter().copied())
            .expect("cursor maintains a simple graph")
    }
}

/// Streaming enumeration of labeled graphs on `{0..n-1}` with maximum
/// degree at most `delta`, in lexicographic edge-subset order.
pub struct GraphEnumeration {
    cursor: SubsetCursor,
    connected_only: bool,
}

impl Iterator for GraphEnumeration {
    type Item = Graph;

    fn next(&mut self) -> Option<Graph> {
        while self.cursor.advance() {
            if self.connected_only && !self.cursor.is_connected() {
                continue;
            }
            return Some(self.cursor.current_graph());
        }
        None
    }
}

/// Iterator over every labeled simple graph of order `n` (1..=10) whose
/// maximum degree is at most `delta`, optionally connected ones only.
pub fn enumerate_graphs(
    n: usize,
    delta: u32,
    connected_only: bool,
) -> Result<GraphEnumeration, OracleError> {
    if n == 0 || n > MAX_ENUMERATION_ORDER {
        return Err(OracleError::EnumerationOrder { n });
    }
    Ok(GraphEnumeration {
        cursor: SubsetCursor::new(n, delta),
        connected_only,
    })
}

/// Outcome of an exhaustive maximum search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub n: usize,
    pub delta: u32,
    pub max_mostar: u64,
    /// First maximizer in enumeration order.
    pub witness: Graph,
    pub graphs_examined: u64,
    pub connected_only: bool,
}

impl SearchResult {
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Wire<'a> {
            n: usize,
            delta: u32,
            max_mostar: u64,
            witness_edges: &'a [(u32, u32)],
            graphs_examined: u64,
        }
        serde_json::to_string(&Wire {
            n: self.n,
            delta: self.delta,
            max_mostar: self.max_mostar,
            witness_edges: self.witness.edges(),
            graphs_examined: self.graphs_examined,
        })
        .expect("plain integers always serialize")
    }
}

struct TaskOutcome {
    best: Option<(u64, Vec<(u32, u32)>)>,
    examined: u64,
}

fn run_task(n: usize, delta: u32, connected_only: bool, prefix: &[usize]) -> TaskOutcome {
    let Some(mut cursor) = SubsetCursor::with_prefix(n, delta, prefix) else {
        return TaskOutcome {
            best: None,
            examined: 0,
        };
    };
    // Prefix tasks of depth < 2 must not descend into subsets owned by the
    // depth-2 tasks, so they evaluate only their own subset.
    let single = prefix.len() < 2;
    let mut best: Option<(u64, Vec<(u32, u32)>)> = None;
    let mut examined = 0u64;
    while cursor.advance() {
        if !(connected_only && !cursor.is_connected()) {
            examined += 1;
            let value = reference_mostar(&cursor.adj, &cursor.pairs);
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, cursor.pairs.clone()));
            }
        }
        if single {
            break;
        }
    }
    TaskOutcome { best, examined }
}

/// Exact maximum Mostar index over the enumerated class, found by
/// exhaustive search.
///
/// The lexicographic space splits into prefix blocks processed in parallel
/// and merged in order, so the result (including the witness, the first
/// maximizer in enumeration order) is identical for every worker count.
pub fn max_mostar(n: usize, delta: u32, connected_only: bool) -> Result<SearchResult, OracleError> {
    if !(2..=MAX_ENUMERATION_ORDER).contains(&n) {
        return Err(OracleError::SearchOrder { n });
    }
    let m_all = n * (n - 1) / 2;
    // Global lexicographic order: {}, then for each a the subset {a}
    // followed by the blocks extending {a, b} for b > a.
    let mut prefixes: Vec<Vec<usize>> = vec![Vec::new()];
    for a in 0..m_all {
        prefixes.push(vec![a]);
        for b in a + 1..m_all {
            prefixes.push(vec![a, b]);
        }
    }
    let outcomes: Vec<TaskOutcome> = prefixes
        .par_iter()
        .map(|prefix| run_task(n, delta, connected_only, prefix))
        .collect();

    let mut best: Option<(u64, Vec<(u32, u32)>)> = None;
    let mut examined = 0u64;
    for outcome in outcomes {
        examined += outcome.examined;
        if let Some((value, pairs)) = outcome.best {
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, pairs));
            }
        }
    }
    let (max_mostar, pairs) = best.unwrap_or((0, Vec::new()));
    let witness = Graph::from_edges(n, pairs).expect("witness comes from the cursor");
    Ok(SearchResult {
        n,
        delta,
        max_mostar,
        witness,
        graphs_examined: examined,
        connected_only,
    })
}

fn pair_position(n: usize, u: usize, v: usize) -> usize {
    // Lexicographic position of (u, v), u < v, in the upper triangle.
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

/// Minimum upper-triangle adjacency bitmask over all vertex relabelings;
/// equal exactly for isomorphic graphs. Exists to deduplicate reports, not
/// for the search path.
pub fn canonical_form(g: &Graph) -> Result<u64, OracleError> {
    let n = g.order();
    if n > MAX_CANONICAL_ORDER {
        return Err(OracleError::CanonicalOrder { n });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    loop {
        let mut mask = 0u64;
        for &(u, v) in g.edges() {
            let (a, b) = (perm[u as usize], perm[v as usize]);
            mask |= 1 << pair_position(n, a.min(b), a.max(b));
        }
        best = best.min(mask);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    if g.order() == 0 {
        best = 0;
    }
    Ok(best)
}

fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}
