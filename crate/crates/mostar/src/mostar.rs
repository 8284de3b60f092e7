//! Exact Mostar index computation and orientation lower bounds.
//!
//! For an edge `uv`, `n_uv` counts the vertices strictly closer to `u` than
//! to `v`. The Mostar index is the sum of `|n_uv - n_vu|` over all edges.
//! Rather than materializing an n-by-n distance matrix, the engine runs one
//! BFS per source vertex and folds the sign of `d(s,u) - d(s,v)` into
//! per-edge counters, which keeps working memory at `O(n + m)`.

use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

use crate::graph::{Graph, GraphError, MAX_ORDER};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MostarError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("orientation has {arcs} arcs but the graph has {edges} edges")]
    ArcCountMismatch { arcs: usize, edges: usize },
    #[error("arc ({tail}, {head}) does not match any graph edge")]
    ArcNotAnEdge { tail: u32, head: u32 },
    #[error("edge ({u}, {v}) oriented twice")]
    ArcDuplicated { u: u32, v: u32 },
    #[error("n must be at least 2")]
    OrderTooSmall,
    #[error("delta must be at least 1")]
    DegreeTooSmall,
    #[error("per-edge table does not correspond to the graph")]
    ComparisonMismatch,
    #[error("accumulated value overflows the result type")]
    Overflow,
}

/// Distance comparison for one edge `(u, v)` with `u < v`.
///
/// `n_uv + n_vu + equidistant = n`; vertices unreachable from both endpoints
/// count as equidistant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeComparison {
    pub u: u32,
    pub v: u32,
    pub n_uv: u32,
    pub n_vu: u32,
    #[serde(rename = "eq")]
    pub equidistant: u32,
}

impl EdgeComparison {
    /// `|n_uv - n_vu|`, the edge's contribution to the Mostar index.
    pub fn contribution(&self) -> u64 {
        self.n_uv.abs_diff(self.n_vu) as u64
    }

    /// Count of vertices at least as close to `side` as to the other
    /// endpoint, i.e. `n` minus the count strictly closer to the other side.
    pub fn bar_n_toward(&self, side: u32, n: usize) -> u64 {
        debug_assert!(side == self.u || side == self.v);
        let closer_to_other = if side == self.u { self.n_vu } else { self.n_uv };
        n as u64 - closer_to_other as u64
    }
}

/// Total Mostar index, optionally with the per-edge breakdown.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MostarResult {
    pub n: usize,
    pub m: usize,
    pub mostar: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_edge: Option<Vec<EdgeComparison>>,
}

impl MostarResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain integers always serialize")
    }

    /// CSV breakdown with header `u,v,n_uv,n_vu,eq,contribution`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,v,n_uv,n_vu,eq,contribution\n");
        if let Some(rows) = &self.per_edge {
            for c in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    c.u,
                    c.v,
                    c.n_uv,
                    c.n_vu,
                    c.equidistant,
                    c.contribution()
                ));
            }
        }
        out
    }
}

/// One directed arc `(tail, head)` per undirected edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    arcs: Vec<(u32, u32)>,
}

impl Orientation {
    /// Validates that the arcs cover the graph's edge set exactly once.
    pub fn new(g: &Graph, arcs: Vec<(u32, u32)>) -> Result<Self, MostarError> {
        if arcs.len() != g.size() {
            return Err(MostarError::ArcCountMismatch {
                arcs: arcs.len(),
                edges: g.size(),
            });
        }
        let mut covered = vec![false; g.size()];
        for &(tail, head) in &arcs {
            let idx = g
                .edge_index(tail, head)
                .ok_or(MostarError::ArcNotAnEdge { tail, head })?;
            if covered[idx] {
                return Err(MostarError::ArcDuplicated {
                    u: tail.min(head),
                    v: tail.max(head),
                });
            }
            covered[idx] = true;
        }
        Ok(Orientation { arcs })
    }

    pub fn arcs(&self) -> &[(u32, u32)] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }
}

/// Exact rational of the form `k/2`; the degree-based ceiling
/// `delta * n * (n - 2) / 2` is an integer exactly when `delta * n` is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct HalfInteger {
    twice: u128,
}

impl HalfInteger {
    pub fn twice(&self) -> u128 {
        self.twice
    }

    pub fn is_integer(&self) -> bool {
        self.twice.is_multiple_of(2)
    }

    pub fn as_f64(&self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// Exact comparison against an integer without leaving integer arithmetic.
    pub fn at_least(&self, value: u64) -> bool {
        self.twice >= 2 * value as u128
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}.5", self.twice / 2)
        }
    }
}

/// Ceiling `delta * n * (n - 2) / 2` on the Mostar index of any graph of
/// order `n` and maximum degree at most `delta`: each of at most
/// `delta * n / 2` edges contributes at most `n - 2`.
pub fn trivial_upper_bound(n: u64, delta: u64) -> Result<HalfInteger, MostarError> {
    if n < 2 {
        return Err(MostarError::OrderTooSmall);
    }
    if delta < 1 {
        return Err(MostarError::DegreeTooSmall);
    }
    let twice = (delta as u128) * (n as u128) * ((n - 2) as u128);
    Ok(HalfInteger { twice })
}

/// Distance comparison for the edge `(u, v)`, computed from two BFS rows.
pub fn edge_comparison(g: &Graph, u: u32, v: u32) -> Result<EdgeComparison, MostarError> {
    if !g.has_edge(u, v) {
        return Err(GraphError::NotAnEdge { u, v }.into());
    }
    let (u, v) = (u.min(v), u.max(v));
    let from_u = g.bfs_distances(u)?;
    let from_v = g.bfs_distances(v)?;
    let mut n_uv = 0u32;
    let mut n_vu = 0u32;
    for w in 0..g.order() as u32 {
        match (from_u.get(w), from_v.get(w)) {
            (Some(du), Some(dv)) if du < dv => n_uv += 1,
            (Some(du), Some(dv)) if dv < du => n_vu += 1,
            (Some(_), Some(_)) => {}
            // Both endpoints of an edge share a component, so w is either
            // reachable from both or from neither; unreachable counts as
            // equidistant.
            (None, None) => {}
            _ => unreachable!("vertex reachable from exactly one endpoint of an edge"),
        }
    }
    let equidistant = g.order() as u32 - n_uv - n_vu;
    Ok(EdgeComparison {
        u,
        v,
        n_uv,
        n_vu,
        equidistant,
    })
}

/// Count of vertices whose distance to `v` is at most their distance to `u`,
/// for an edge `(u, v)`; equals `n - n_uv`. Vertices unreachable from both
/// endpoints satisfy the comparison.
pub fn bar_n(g: &Graph, v: u32, u: u32) -> Result<u64, MostarError> {
    let comp = edge_comparison(g, u, v)?;
    Ok(comp.bar_n_toward(v, g.order()))
}

/// Exact Mostar index.
///
/// One BFS per source; each sweep adds the sign of `d(s,u) - d(s,v)` to the
/// edge's counters. Sources are split across the current rayon pool and the
/// per-worker counters merge by integer addition, so the result is identical
/// for every worker count.
///
/// ```
/// use mostar::{Graph, mostar_index};
/// let star = Graph::parse("0 1\n0 2\n0 3\n0 4").unwrap();
/// assert_eq!(mostar_index(&star, false).mostar, 12);
/// ```
pub fn mostar_index(g: &Graph, keep_per_edge: bool) -> MostarResult {
    let n = g.order();
    let m = g.size();
    if n == 0 || m == 0 {
        return MostarResult {
            n,
            m,
            mostar: 0,
            per_edge: keep_per_edge.then(Vec::new),
        };
    }
    debug_assert!(n <= MAX_ORDER);

    let workers = rayon::current_num_threads().max(1);
    let chunk = n.div_ceil(workers);
    let ranges: Vec<(usize, usize)> = (0..workers)
        .map(|w| (w * chunk, ((w + 1) * chunk).min(n)))
        .filter(|(lo, hi)| lo < hi)
        .collect();

    let partials: Vec<Vec<u32>> = ranges
        .par_iter()
        .map(|&(lo, hi)| {
            let mut counts = vec![0u32; 2 * m];
            let mut dist = vec![0u32; n];
            let mut queue = Vec::with_capacity(n);
            for s in lo..hi {
                g.bfs_fill(s as u32, &mut dist, &mut queue);
                for (i, &(u, v)) in g.edges().iter().enumerate() {
                    let du = dist[u as usize];
                    let dv = dist[v as usize];
                    // The unreachable sentinel is u32::MAX on both sides or
                    // neither, so it never wins a strict comparison.
                    counts[2 * i] += (du < dv) as u32;
                    counts[2 * i + 1] += (dv < du) as u32;
                }
            }
            counts
        })
        .collect();

    let mut counts = vec![0u32; 2 * m];
    for partial in &partials {
        for (acc, &x) in counts.iter_mut().zip(partial) {
            *acc += x;
        }
    }

    let mut total: u64 = 0;
    let mut per_edge = keep_per_edge.then(|| Vec::with_capacity(m));
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        let n_uv = counts[2 * i];
        let n_vu = counts[2 * i + 1];
        total = total
            .checked_add(n_uv.abs_diff(n_vu) as u64)
            .expect("Mostar total exceeds u64");
        if let Some(rows) = per_edge.as_mut() {
            rows.push(EdgeComparison {
                u,
                v,
                n_uv,
                n_vu,
                equidistant: n as u32 - n_uv - n_vu,
            });
        }
    }
    MostarResult {
        n,
        m,
        mostar: total,
        per_edge,
    }
}

/// Per-edge comparison table in canonical edge order.
pub fn per_edge_comparisons(g: &Graph) -> Vec<EdgeComparison> {
    mostar_index(g, true)
        .per_edge
        .expect("requested per-edge table")
}

fn checked_nm(n: usize, m: usize) -> Result<i64, MostarError> {
    let nm = (n as i128) * (m as i128);
    i64::try_from(nm).map_err(|_| MostarError::Overflow)
}

fn arc_bar_sum(g: &Graph, o: &Orientation, comps: &[EdgeComparison]) -> Result<u64, MostarError> {
    if comps.len() != g.size() {
        return Err(MostarError::ComparisonMismatch);
    }
    let n = g.order();
    let mut sum = 0u64;
    for &(tail, head) in o.arcs() {
        let idx = g
            .edge_index(tail, head)
            .ok_or(MostarError::ArcNotAnEdge { tail, head })?;
        let comp = &comps[idx];
        if (comp.u, comp.v) != (tail.min(head), tail.max(head)) {
            return Err(MostarError::ComparisonMismatch);
        }
        sum = sum
            .checked_add(comp.bar_n_toward(tail, n))
            .ok_or(MostarError::Overflow)?;
    }
    Ok(sum)
}

/// Sum of `bar_n(tail, head)` over an orientation, taken from a precomputed
/// comparison table (as produced by [`per_edge_comparisons`]).
pub fn orientation_bar_sum(
    g: &Graph,
    o: &Orientation,
    comps: &[EdgeComparison],
) -> Result<u64, MostarError> {
    arc_bar_sum(g, o, comps)
}

/// Lower bound `n*m - 2 * sum of bar_n(tail, head)` on the Mostar index,
/// valid for every orientation. May be negative and therefore vacuous.
pub fn orientation_lower_bound(g: &Graph, o: &Orientation) -> Result<i64, MostarError> {
    let comps = per_edge_comparisons(g);
    let sum = arc_bar_sum(g, o, &comps)?;
    let nm = checked_nm(g.order(), g.size())?;
    (nm as i128)
        .checked_sub(2 * sum as i128)
        .and_then(|v| i64::try_from(v).ok())
        .ok_or(MostarError::Overflow)
}

/// The strongest orientation bound: each edge is oriented so that the head
/// is the endpoint with the larger strictly-closer count (ties toward the
/// smaller id, which changes nothing in the value).
///
/// The value is `n*m - 2 * sum over edges of min{bar_n(u,v), bar_n(v,u)}`.
/// It never exceeds the Mostar index, and it equals the Mostar index exactly
/// when no edge has equidistant vertices (for example on bipartite graphs);
/// in general the gap is the total equidistant count over all edges.
pub fn optimal_orientation_bound(g: &Graph) -> Result<(i64, Orientation), MostarError> {
    let comps = per_edge_comparisons(g);
    let n = g.order();
    let mut arcs = Vec::with_capacity(g.size());
    let mut min_sum: u64 = 0;
    for c in &comps {
        // bar_n(tail, head) = n - closer-to-head; minimized by the head with
        // the larger closer count. On a tie the smaller id becomes the head.
        let (tail, head) = if c.n_uv >= c.n_vu {
            (c.v, c.u)
        } else {
            (c.u, c.v)
        };
        arcs.push((tail, head));
        min_sum = min_sum
            .checked_add(n as u64 - c.n_uv.max(c.n_vu) as u64)
            .ok_or(MostarError::Overflow)?;
    }
    let nm = checked_nm(n, g.size())?;
    let value = (nm as i128)
        .checked_sub(2 * min_sum as i128)
        .and_then(|v| i64::try_from(v).ok())
        .ok_or(MostarError::Overflow)?;
    let orientation = Orientation::new(g, arcs)?;
    Ok((value, orientation))
}

/// Total equidistant-vertex count over all edges; zero exactly when
/// [`optimal_orientation_bound`] attains the Mostar index.
pub fn equidistant_total(comps: &[EdgeComparison]) -> u64 {
    comps.iter().map(|c| c.equidistant as u64).sum()
}
