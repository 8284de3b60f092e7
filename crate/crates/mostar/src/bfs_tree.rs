//! BFS trees, depth/subtree statistics, and certified upper bounds on the
//! Mostar index.
//!
//! For a BFS tree rooted at `r`, each tree edge `(u, parent(u))` satisfies
//! `|n_uv - n_vu| <= n - 2 * min(depth(u), subtree(u))`, so
//! `m*n - 2 * sum of min(depth, subtree)` certifies an upper bound on the
//! whole index without any asymptotics.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::mostar::{mostar_index, per_edge_comparisons};

const UNSPANNED: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("tree does not belong to this graph")]
    TreeMismatch,
    #[error("delta must be at least 3")]
    DeltaTooSmall,
    #[error("order must be at least 1")]
    OrderTooSmall,
}

/// Breadth-first search tree of one component.
///
/// Vertices are dequeued in BFS order with ascending neighbor scans, and the
/// parent is the first discoverer, so the tree is a pure function of the
/// graph and the root. Depths equal graph distances from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsTree {
    root: u32,
    span: Vec<u32>,
    parent: Vec<u32>,
    depth: Vec<u32>,
    subtree: Vec<u32>,
}

impl BfsTree {
    pub fn root(&self) -> u32 {
        self.root
    }

    /// Spanned vertices in BFS discovery order.
    pub fn span(&self) -> &[u32] {
        &self.span
    }

    pub fn order(&self) -> usize {
        self.span.len()
    }

    pub fn in_span(&self, v: u32) -> bool {
        self.depth[v as usize] != UNSPANNED
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        let p = self.parent[v as usize];
        (p != UNSPANNED).then_some(p)
    }

    pub fn depth(&self, v: u32) -> Option<u32> {
        let d = self.depth[v as usize];
        (d != UNSPANNED).then_some(d)
    }

    /// Number of spanned vertices equal to `v` or below it in the tree.
    pub fn subtree_size(&self, v: u32) -> Option<u32> {
        self.in_span(v).then(|| self.subtree[v as usize])
    }

    /// Tree edges as `(child, parent)` pairs in BFS discovery order.
    pub fn tree_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.span
            .iter()
            .filter_map(move |&v| self.parent(v).map(|p| (v, p)))
    }

    /// Sum over spanned vertices of `min(depth, subtree size)`.
    pub fn min_depth_subtree_sum(&self) -> u64 {
        self.span
            .iter()
            .map(|&v| self.depth[v as usize].min(self.subtree[v as usize]) as u64)
            .sum()
    }

    /// Sum of subtree sizes; equals the sum of `depth + 1` over the span.
    pub fn subtree_sum(&self) -> u64 {
        self.span
            .iter()
            .map(|&v| self.subtree[v as usize] as u64)
            .sum()
    }
}

/// Deterministic BFS tree of the component containing `r`.
pub fn bfs_tree(g: &Graph, r: u32) -> Result<BfsTree, GraphError> {
    let n = g.order();
    if r as usize >= n {
        return Err(GraphError::VertexOutOfRange { v: r, n });
    }
    let mut parent = vec![UNSPANNED; n];
    let mut depth = vec![UNSPANNED; n];
    let mut span = Vec::with_capacity(n);
    depth[r as usize] = 0;
    span.push(r);
    let mut head = 0;
    while head < span.len() {
        let u = span[head];
        head += 1;
        for &w in g.neighbors(u) {
            if depth[w as usize] == UNSPANNED {
                depth[w as usize] = depth[u as usize] + 1;
                parent[w as usize] = u;
                span.push(w);
            }
        }
    }
    let mut subtree = vec![0u32; n];
    for &v in &span {
        subtree[v as usize] = 1;
    }
    for &v in span.iter().rev() {
        if parent[v as usize] != UNSPANNED {
            subtree[parent[v as usize] as usize] += subtree[v as usize];
        }
    }
    Ok(BfsTree {
        root: r,
        span,
        parent,
        depth,
        subtree,
    })
}

/// Checks for one tree edge, with `child` below `parent`.
///
/// `closer_child`/`closer_parent` are the exact strictly-closer counts for
/// the edge; the three verified inequalities are
/// `closer_parent >= depth(child)`, `closer_child >= subtree(child)`, and
/// `|closer_child - closer_parent| <= n - 2*min(depth, subtree)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeBoundCheck {
    pub child: u32,
    pub parent: u32,
    pub depth: u32,
    pub subtree: u32,
    pub closer_child: u32,
    pub closer_parent: u32,
    pub depth_ok: bool,
    pub subtree_ok: bool,
    pub bound: u64,
    pub actual: u64,
    pub bound_ok: bool,
}

impl EdgeBoundCheck {
    pub fn pass(&self) -> bool {
        self.depth_ok && self.subtree_ok && self.bound_ok
    }
}

/// Verifies the per-edge inequalities for every tree edge of `t` in `g`.
pub fn check_tree_edge_bounds(g: &Graph, t: &BfsTree) -> Result<Vec<EdgeBoundCheck>, TreeError> {
    if t.parent.len() != g.order() || t.root as usize >= g.order() {
        return Err(TreeError::TreeMismatch);
    }
    for (child, parent) in t.tree_edges() {
        if !g.has_edge(child, parent) {
            return Err(TreeError::TreeMismatch);
        }
    }
    let comps = per_edge_comparisons(g);
    let n = g.order() as u64;
    let mut out = Vec::with_capacity(t.order().saturating_sub(1));
    for (child, parent) in t.tree_edges() {
        let idx = g
            .edge_index(child, parent)
            .expect("tree edge verified above");
        let c = &comps[idx];
        let (closer_child, closer_parent) = if c.u == child {
            (c.n_uv, c.n_vu)
        } else {
            (c.n_vu, c.n_uv)
        };
        let depth = t.depth(child).expect("tree edge child is spanned");
        let subtree = t.subtree_size(child).expect("tree edge child is spanned");
        let bound = n - 2 * depth.min(subtree) as u64;
        let actual = closer_child.abs_diff(closer_parent) as u64;
        out.push(EdgeBoundCheck {
            child,
            parent,
            depth,
            subtree,
            closer_child,
            closer_parent,
            depth_ok: closer_parent >= depth,
            subtree_ok: closer_child >= subtree,
            bound,
            actual,
            bound_ok: actual <= bound,
        });
    }
    Ok(out)
}

/// Certified upper bound on the Mostar index from one BFS tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateReport {
    pub root: u32,
    pub certificate: i64,
    pub mostar: u64,
    pub per_edge_checks: Vec<EdgeBoundCheck>,
}

impl CertificateReport {
    pub fn tight(&self) -> bool {
        self.certificate == self.mostar as i64
    }

    /// True when the certificate dominates the index and every per-edge
    /// inequality holds; a failure signals an implementation bug.
    pub fn sound(&self) -> bool {
        self.certificate >= self.mostar as i64 && self.per_edge_checks.iter().all(|c| c.pass())
    }

    pub fn failed_edges(&self) -> Vec<(u32, u32)> {
        self.per_edge_checks
            .iter()
            .filter(|c| !c.pass())
            .map(|c| (c.child, c.parent))
            .collect()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Wire {
            root: u32,
            certificate: i64,
            mostar: u64,
            tight: bool,
            failed_edges: Vec<(u32, u32)>,
        }
        serde_json::to_string(&Wire {
            root: self.root,
            certificate: self.certificate,
            mostar: self.mostar,
            tight: self.tight(),
            failed_edges: self.failed_edges(),
        })
        .expect("plain integers always serialize")
    }
}

/// Computes `m*n - 2 * min_depth_subtree_sum` for the BFS tree rooted at `r`
/// together with the exact index and all per-edge checks.
///
/// On a disconnected graph the tree spans only `r`'s component; unspanned
/// vertices contribute zero to the min-sum, which keeps the bound valid.
pub fn mostar_upper_certificate(g: &Graph, r: u32) -> Result<CertificateReport, TreeError> {
    let t = bfs_tree(g, r)?;
    let certificate = certificate_value(g, &t);
    let mostar = mostar_index(g, false).mostar;
    let per_edge_checks = check_tree_edge_bounds(g, &t)?;
    Ok(CertificateReport {
        root: r,
        certificate,
        mostar,
        per_edge_checks,
    })
}

/// The certificate value alone, without per-edge verification.
pub fn certificate_value(g: &Graph, t: &BfsTree) -> i64 {
    let nm = g.order() as i64 * g.size() as i64;
    nm - 2 * t.min_depth_subtree_sum() as i64
}

/// Floor on the subtree-size sum of any b-ary tree (`b = delta - 1`) of
/// order `n`: `((delta-2)/(delta-1)^2) * n * (log_(delta-1)((delta-2)n) - 1)`.
/// May be negative and therefore vacuous.
pub fn subtree_sum_lower_bound(delta: u32, n: u64) -> Result<f64, TreeError> {
    if delta < 3 {
        return Err(TreeError::DeltaTooSmall);
    }
    if n < 1 {
        return Err(TreeError::OrderTooSmall);
    }
    let d = delta as f64;
    let nf = n as f64;
    let log = (((delta - 2) as u64 * n) as f64).ln() / (d - 1.0).ln();
    Ok((d - 2.0) / ((d - 1.0) * (d - 1.0)) * nf * (log - 1.0))
}

/// Leading-order evaluation of the degree-bounded ceiling
/// `(delta/2) n^2 - 2 * ((delta-2)/(delta-1)^2) * n * log log n`
/// (logs base `delta - 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticUpperBound {
    pub value: f64,
    /// Set when `log_(delta-1)(n) <= 1`, where the double logarithm is
    /// undefined and only the quadratic term is reported.
    pub guarded: bool,
}

/// Evaluates the asymptotic ceiling with the vanishing correction dropped
/// (factor 2 used as-is). This is a plot-scale evaluation, not a certified
/// finite-n bound; the certified object is [`mostar_upper_certificate`].
pub fn asymptotic_upper_bound(delta: u32, n: u64) -> Result<AsymptoticUpperBound, TreeError> {
    if delta < 3 {
        return Err(TreeError::DeltaTooSmall);
    }
    if n < 1 {
        return Err(TreeError::OrderTooSmall);
    }
    let d = delta as f64;
    let nf = n as f64;
    let quadratic = d / 2.0 * nf * nf;
    let base = (d - 1.0).ln();
    let log_n = nf.ln() / base;
    if log_n <= 1.0 {
        return Ok(AsymptoticUpperBound {
            value: quadratic,
            guarded: true,
        });
    }
    let log_log_n = log_n.ln() / base;
    let value = quadratic - 2.0 * (d - 2.0) / ((d - 1.0) * (d - 1.0)) * nf * log_log_n;
    Ok(AsymptoticUpperBound {
        value,
        guarded: false,
    })
}
