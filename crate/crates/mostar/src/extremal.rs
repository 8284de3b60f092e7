//! The extremal Δ-regular family and its structural verification.
//!
//! The construction starts from a rooted tree whose root has Δ children,
//! whose other internal vertices have Δ-1 children, and whose leaves all sit
//! at depth H (the *black* vertices). For every run of Δ consecutive leaves,
//! Δ-1 new *grey* vertices are joined completely to that run. The result is
//! Δ-regular, and orienting every edge toward the root gives an orientation
//! whose `bar_n` sum grows only like `n log n`, which forces the Mostar
//! index up to `(Δ/2)n² - O(n log n)`.
//!
//! Vertex ids are fixed: black vertices come first in level order
//! (left-to-right within a level), grey vertices follow group by group, so
//! generated files are byte-reproducible.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, MAX_ORDER};
use crate::mostar::{MostarError, Orientation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtremalError {
    #[error("delta must be at least 3")]
    DeltaTooSmall,
    #[error("height must be at least 2")]
    HeightTooSmall,
    #[error("branching must be at least 1")]
    BranchingTooSmall,
    #[error("order must be at least 1")]
    OrderTooSmall,
    #[error("order must be at least 2 for this bound")]
    BoundOrderTooSmall,
    #[error("construction exceeds the supported size")]
    TooLarge,
    #[error("vertex {v} is not a non-root black vertex")]
    NotNonRootBlack { v: u32 },
    #[error("invalid rooted tree: {0}")]
    InvalidTree(String),
    #[error("metadata does not match the graph: {0}")]
    MetadataMismatch(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Mostar(#[from] MostarError),
}

/// Rooted tree given by parent/depth/children arrays.
///
/// Child lists are ascending; for the trees built here vertex ids are
/// assigned level by level, left to right, so id order within a level is the
/// plane left-to-right order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTreeShape {
    root: u32,
    parent: Vec<Option<u32>>,
    depth: Vec<u32>,
    children: Vec<Vec<u32>>,
    height: u32,
}

impl RootedTreeShape {
    /// Validates a parent array (exactly one root, acyclic, connected) and
    /// derives depths, child lists, and the height.
    pub fn from_parents(parent: Vec<Option<u32>>) -> Result<Self, ExtremalError> {
        let n = parent.len();
        if n == 0 {
            return Err(ExtremalError::InvalidTree("empty vertex set".into()));
        }
        let mut root = None;
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            match p {
                None => {
                    if root.replace(v as u32).is_some() {
                        return Err(ExtremalError::InvalidTree("more than one root".into()));
                    }
                }
                Some(p) => {
                    if *p as usize >= n {
                        return Err(ExtremalError::InvalidTree(format!(
                            "parent {p} out of range"
                        )));
                    }
                    children[*p as usize].push(v as u32);
                }
            }
        }
        let root = root.ok_or_else(|| ExtremalError::InvalidTree("no root".into()))?;
        let mut depth = vec![u32::MAX; n];
        let mut queue = Vec::with_capacity(n);
        depth[root as usize] = 0;
        queue.push(root);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &c in &children[u as usize] {
                depth[c as usize] = depth[u as usize] + 1;
                queue.push(c);
            }
        }
        if queue.len() != n {
            return Err(ExtremalError::InvalidTree(
                "cycle or unreachable vertex".into(),
            ));
        }
        let height = depth.iter().copied().max().unwrap_or(0);
        Ok(RootedTreeShape {
            root,
            parent,
            depth,
            children,
            height,
        })
    }

    /// Left-packed tree where vertex `i > 0` hangs under `(i - 1) / branching`.
    ///
    /// Orders of the form `(b^(h+1) - 1) / (b - 1)` give the complete b-ary
    /// tree of height h; every other order gives an almost complete one with
    /// a partially filled last level.
    pub fn left_packed_ary(branching: usize, order: usize) -> Result<Self, ExtremalError> {
        if branching == 0 {
            return Err(ExtremalError::BranchingTooSmall);
        }
        if order == 0 {
            return Err(ExtremalError::OrderTooSmall);
        }
        let parent: Vec<Option<u32>> = (0..order)
            .map(|i| {
                if i == 0 {
                    None
                } else {
                    Some(((i - 1) / branching) as u32)
                }
            })
            .collect();
        Self::from_parents(parent)
    }

    pub fn order(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        self.parent[v as usize]
    }

    pub fn depth(&self, v: u32) -> u32 {
        self.depth[v as usize]
    }

    pub fn children(&self, v: u32) -> &[u32] {
        &self.children[v as usize]
    }

    /// True when every vertex has at most `branching` children.
    pub fn is_ary(&self, branching: usize) -> bool {
        self.children.iter().all(|c| c.len() <= branching)
    }

    /// Subtree size (the vertex itself plus all descendants) per vertex.
    pub fn subtree_sizes(&self) -> Vec<u32> {
        let n = self.order();
        let mut order_by_depth: Vec<u32> = (0..n as u32).collect();
        order_by_depth.sort_by_key(|&v| std::cmp::Reverse(self.depth[v as usize]));
        let mut sizes = vec![1u32; n];
        for &v in &order_by_depth {
            if let Some(p) = self.parent[v as usize] {
                sizes[p as usize] += sizes[v as usize];
            }
        }
        sizes
    }

    /// Sum of subtree sizes over all vertices; equals the sum of
    /// `depth(v) + 1`, since `v` lies in exactly that many subtrees.
    pub fn subtree_sum(&self) -> u64 {
        self.subtree_sizes().iter().map(|&s| s as u64).sum()
    }
}

/// Backbone tree of the extremal family: root with Δ children, every other
/// internal vertex with Δ-1 children, all leaves at depth `height`.
pub fn build_extremal_tree(delta: u32, height: u32) -> Result<RootedTreeShape, ExtremalError> {
    if delta < 3 {
        return Err(ExtremalError::DeltaTooSmall);
    }
    if height < 2 {
        return Err(ExtremalError::HeightTooSmall);
    }
    let b = (delta - 1) as u64;
    let mut level_sizes: Vec<u64> = vec![1];
    let mut width = delta as u64;
    for _ in 1..=height {
        level_sizes.push(width);
        width = width.checked_mul(b).ok_or(ExtremalError::TooLarge)?;
    }
    let total: u64 = level_sizes
        .iter()
        .try_fold(0u64, |acc, &w| acc.checked_add(w))
        .ok_or(ExtremalError::TooLarge)?;
    if total > MAX_ORDER as u64 {
        return Err(ExtremalError::TooLarge);
    }
    let total = total as usize;

    let mut level_start = vec![0u64; level_sizes.len() + 1];
    for (i, &w) in level_sizes.iter().enumerate() {
        level_start[i + 1] = level_start[i] + w;
    }

    let mut parent: Vec<Option<u32>> = Vec::with_capacity(total);
    let mut depth: Vec<u32> = Vec::with_capacity(total);
    let mut children: Vec<Vec<u32>> = vec![Vec::new(); total];
    parent.push(None);
    depth.push(0);
    for level in 1..=height as usize {
        for j in 0..level_sizes[level] {
            let id = (level_start[level] + j) as u32;
            let p = if level == 1 {
                0
            } else {
                (level_start[level - 1] + j / b) as u32
            };
            parent.push(Some(p));
            depth.push(level as u32);
            children[p as usize].push(id);
        }
    }
    Ok(RootedTreeShape {
        root: 0,
        parent,
        depth,
        children,
        height,
    })
}

/// Black or grey role of a vertex in the extremal graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexRole {
    Black,
    Grey,
}

/// One completion group: Δ consecutive leaves and the Δ-1 grey vertices
/// joined completely to them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreyGroup {
    pub leaves: Vec<u32>,
    pub greys: Vec<u32>,
}

/// The extremal graph together with its construction metadata.
#[derive(Debug, Clone)]
pub struct LabeledExtremalGraph {
    pub graph: Graph,
    pub delta: u32,
    pub height: u32,
    /// Backbone tree over the black vertex ids.
    pub tree: RootedTreeShape,
    pub role: Vec<VertexRole>,
    /// Height in the backbone tree, indexed by black vertex id.
    pub black_height: Vec<u32>,
    /// Leaves in left-to-right order.
    pub leaf_order: Vec<u32>,
    pub grey_groups: Vec<GreyGroup>,
    /// Canonical orientation: black edges child to parent, grey edges grey
    /// to leaf — every arc points toward the root.
    pub orientation: Orientation,
}

impl LabeledExtremalGraph {
    pub fn black_count(&self) -> usize {
        self.tree.order()
    }

    pub fn grey_count(&self) -> usize {
        self.graph.order() - self.tree.order()
    }

    pub fn is_black(&self, v: u32) -> bool {
        matches!(self.role[v as usize], VertexRole::Black)
    }
}

/// Builds the Δ-regular extremal graph of height parameter `height`.
pub fn build_extremal_graph(
    delta: u32,
    height: u32,
) -> Result<LabeledExtremalGraph, ExtremalError> {
    let tree = build_extremal_tree(delta, height)?;
    let black = tree.order() as u64;
    let b = (delta - 1) as u64;
    let leaves: Vec<u32> = (0..tree.order() as u32)
        .filter(|&v| tree.depth(v) == height)
        .collect();
    let groups = (leaves.len() as u64) / delta as u64;
    debug_assert_eq!(leaves.len() as u64 % delta as u64, 0);
    let grey = groups.checked_mul(b).ok_or(ExtremalError::TooLarge)?;
    let n = black.checked_add(grey).ok_or(ExtremalError::TooLarge)?;
    if n > MAX_ORDER as u64 || n > u32::MAX as u64 {
        return Err(ExtremalError::TooLarge);
    }

    let mut edges: Vec<(u32, u32)> = Vec::with_capacity((black - 1 + grey * delta as u64) as usize);
    let mut arcs: Vec<(u32, u32)> = Vec::with_capacity(edges.capacity());
    for v in 1..black as u32 {
        let p = tree.parent(v).expect("non-root black vertex has a parent");
        edges.push((p, v));
        arcs.push((v, p));
    }
    let mut grey_groups = Vec::with_capacity(groups as usize);
    for i in 0..groups {
        let group_leaves: Vec<u32> =
            leaves[(i * delta as u64) as usize..((i + 1) * delta as u64) as usize].to_vec();
        let group_greys: Vec<u32> = (0..b).map(|k| (black + i * b + k) as u32).collect();
        for &gv in &group_greys {
            for &leaf in &group_leaves {
                edges.push((leaf, gv));
                arcs.push((gv, leaf));
            }
        }
        grey_groups.push(GreyGroup {
            leaves: group_leaves,
            greys: group_greys,
        });
    }

    let graph = Graph::from_edges(n as usize, edges)?;
    let orientation = Orientation::new(&graph, arcs)?;
    let mut role = vec![VertexRole::Black; black as usize];
    role.extend(std::iter::repeat_n(VertexRole::Grey, grey as usize));
    let black_height: Vec<u32> = (0..black as u32).map(|v| height - tree.depth(v)).collect();

    Ok(LabeledExtremalGraph {
        graph,
        delta,
        height,
        tree,
        role,
        black_height,
        leaf_order: leaves,
        grey_groups,
        orientation,
    })
}

/// The downward set of a non-root black vertex `v`: `v` itself, its black
/// descendants, and every grey vertex with at least one parent among the
/// descendant leaves of `v` (boundary groups are included).
pub fn downward_set(lg: &LabeledExtremalGraph, v: u32) -> Result<Vec<u32>, ExtremalError> {
    if v as usize >= lg.graph.order() || !lg.is_black(v) || v == lg.tree.root() {
        return Err(ExtremalError::NotNonRootBlack { v });
    }
    let delta = lg.delta as usize;
    let leaf_start = lg.leaf_order[0];
    let mut members = Vec::new();
    let mut group_seen = vec![false; lg.grey_groups.len()];
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        members.push(u);
        if lg.tree.depth(u) == lg.height {
            let group = (u - leaf_start) as usize / delta;
            group_seen[group] = true;
        }
        stack.extend_from_slice(lg.tree.children(u));
    }
    for (i, seen) in group_seen.iter().enumerate() {
        if *seen {
            members.extend_from_slice(&lg.grey_groups[i].greys);
        }
    }
    members.sort_unstable();
    Ok(members)
}

/// Result of one structural check.
#[derive(Debug, Clone, Serialize)]
pub struct StructureCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub offenders: Vec<u32>,
}

/// Structural verification report; all checks must pass on a well-formed
/// instance, so any failure points at a corrupted graph or metadata.
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub checks: Vec<StructureCheck>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&StructureCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn pow_u128(base: u64, exp: u32) -> u128 {
    (base as u128).pow(exp)
}

/// Verifies regularity, the black/grey counting identities, the per-vertex
/// and aggregate downward-set bounds, and the toward-root orientation.
pub fn verify_structure(lg: &LabeledExtremalGraph) -> StructureReport {
    let mut checks = Vec::new();
    let delta = lg.delta;
    let b = (delta - 1) as u64;
    let h = lg.height;
    let n = lg.graph.order();

    let mut degree_offenders: Vec<u32> = Vec::new();
    for v in 0..n as u32 {
        if lg.graph.degree(v) != delta as usize {
            degree_offenders.push(v);
        }
    }
    checks.push(StructureCheck {
        name: "delta_regular",
        passed: degree_offenders.is_empty(),
        detail: if degree_offenders.is_empty() {
            format!("all {n} vertices have degree {delta}")
        } else {
            format!(
                "{} vertices deviate from degree {delta}",
                degree_offenders.len()
            )
        },
        offenders: degree_offenders,
    });

    let expected_black: u128 = 1
        + (1..=h)
            .map(|i| delta as u128 * pow_u128(b, i - 1))
            .sum::<u128>();
    let black = lg.black_count() as u128;
    checks.push(StructureCheck {
        name: "black_count",
        passed: black == expected_black,
        detail: format!("black {black}, expected {expected_black}"),
        offenders: Vec::new(),
    });

    let expected_grey = pow_u128(b, h);
    let grey = lg.grey_count() as u128;
    checks.push(StructureCheck {
        name: "grey_count",
        passed: grey == expected_grey,
        detail: format!("grey {grey}, expected {expected_grey}"),
        offenders: Vec::new(),
    });

    let size_ok = 2 * lg.graph.size() as u128 == delta as u128 * n as u128;
    checks.push(StructureCheck {
        name: "order_and_size",
        passed: n as u128 == black + grey && size_ok,
        detail: format!("n {n}, m {}", lg.graph.size()),
        offenders: Vec::new(),
    });

    let mut groups_ok = lg.grey_groups.len() as u128 == pow_u128(b, h - 1)
        && lg.leaf_order.len() == lg.grey_groups.len() * delta as usize;
    let mut group_offenders = Vec::new();
    for (i, group) in lg.grey_groups.iter().enumerate() {
        let expected_leaves = &lg.leaf_order[i * delta as usize..(i + 1) * delta as usize];
        if group.leaves != expected_leaves || group.greys.len() != b as usize {
            groups_ok = false;
        }
        for &gv in &group.greys {
            if lg.graph.neighbors(gv) != group.leaves.as_slice() {
                groups_ok = false;
                group_offenders.push(gv);
            }
        }
    }
    checks.push(StructureCheck {
        name: "grey_groups",
        passed: groups_ok,
        detail: format!(
            "{} groups of {} consecutive leaves with {} greys each",
            lg.grey_groups.len(),
            delta,
            b
        ),
        offenders: group_offenders,
    });

    let mut per_vertex_ok = true;
    let mut bound_offenders = Vec::new();
    let mut downward_total: u128 = 0;
    for v in 1..lg.black_count() as u32 {
        match downward_set(lg, v) {
            Ok(set) => {
                downward_total += set.len() as u128;
                let hv = lg.black_height[v as usize];
                let cap = 4 * pow_u128(b, hv + 1);
                if set.len() as u128 > cap {
                    per_vertex_ok = false;
                    bound_offenders.push(v);
                }
            }
            Err(_) => {
                per_vertex_ok = false;
                bound_offenders.push(v);
            }
        }
    }
    checks.push(StructureCheck {
        name: "downward_set_bound",
        passed: per_vertex_ok,
        detail: format!(
            "per-vertex cap 4*(delta-1)^(h+1) over {} vertices",
            lg.black_count() - 1
        ),
        offenders: bound_offenders,
    });

    let total_cap = 4 * delta as u128 * pow_u128(b, h) * h as u128;
    checks.push(StructureCheck {
        name: "downward_set_total",
        passed: downward_total <= total_cap,
        detail: format!("total {downward_total} against cap {total_cap}"),
        offenders: Vec::new(),
    });

    let mut orient_ok = lg.orientation.len() == lg.graph.size();
    let mut orient_offenders = Vec::new();
    for &(tail, head) in lg.orientation.arcs() {
        let ok = if (tail as usize) < lg.black_count() {
            lg.tree.parent(tail) == Some(head)
        } else {
            lg.graph.has_edge(tail, head) && (head as usize) < lg.black_count()
        };
        if !ok {
            orient_ok = false;
            orient_offenders.push(tail);
        }
    }
    checks.push(StructureCheck {
        name: "orientation_toward_root",
        passed: orient_ok,
        detail: "black arcs child->parent, grey arcs grey->leaf".into(),
        offenders: orient_offenders,
    });

    StructureReport { checks }
}

/// Coefficient of the `n log n` loss term in [`construction_lower_bound`].
pub fn construction_lower_constant(delta: u32) -> u64 {
    let d = delta as u64;
    20 * d * d * d + 12 * d * d - 24 * d + 48
}

/// Guaranteed Mostar index of the Δ-regular family at order `n`:
/// `(delta/2) n^2 - c(delta) * n * log_(delta-1)(n)`. Negative values make
/// the bound vacuous at small orders.
pub fn construction_lower_bound(delta: u32, n: u64) -> Result<f64, ExtremalError> {
    if delta < 3 {
        return Err(ExtremalError::DeltaTooSmall);
    }
    if n < 2 {
        return Err(ExtremalError::BoundOrderTooSmall);
    }
    let nf = n as f64;
    let log = nf.ln() / ((delta - 1) as f64).ln();
    Ok(delta as f64 / 2.0 * nf * nf - construction_lower_constant(delta) as f64 * nf * log)
}

/// Coefficient of `n log n` in [`orientation_sum_bound`].
pub fn orientation_sum_constant(delta: u32) -> u64 {
    let d = delta as u64;
    10 * d * d * d + 6 * d * d - 12 * d + 24
}

/// Ceiling on the `bar_n` sum of the toward-root orientation of the
/// extremal graph: `c(delta) * n * log_(delta-1)(n)`.
pub fn orientation_sum_bound(delta: u32, n: u64) -> Result<f64, ExtremalError> {
    if delta < 3 {
        return Err(ExtremalError::DeltaTooSmall);
    }
    if n < 2 {
        return Err(ExtremalError::BoundOrderTooSmall);
    }
    let nf = n as f64;
    let log = nf.ln() / ((delta - 1) as f64).ln();
    Ok(orientation_sum_constant(delta) as f64 * nf * log)
}

/// Sidecar metadata describing a generated extremal graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GhMetadata {
    pub delta: u32,
    #[serde(rename = "H")]
    pub height: u32,
    pub black: Vec<u32>,
    pub grey: Vec<u32>,
    pub black_height: BTreeMap<u32, u32>,
    pub grey_groups: Vec<(Vec<u32>, Vec<u32>)>,
    pub orientation: Vec<(u32, u32)>,
}

impl GhMetadata {
    pub fn from_labeled(lg: &LabeledExtremalGraph) -> Self {
        GhMetadata {
            delta: lg.delta,
            height: lg.height,
            black: (0..lg.black_count() as u32).collect(),
            grey: (lg.black_count() as u32..lg.graph.order() as u32).collect(),
            black_height: lg
                .black_height
                .iter()
                .enumerate()
                .map(|(v, &h)| (v as u32, h))
                .collect(),
            grey_groups: lg
                .grey_groups
                .iter()
                .map(|g| (g.leaves.clone(), g.greys.clone()))
                .collect(),
            orientation: lg.orientation.arcs().to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("metadata always serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Rebuilds a labeled instance from a parsed graph plus sidecar metadata,
/// validating that the two actually describe the same construction.
pub fn from_parts(graph: Graph, meta: &GhMetadata) -> Result<LabeledExtremalGraph, ExtremalError> {
    let n = graph.order();
    if meta.delta < 3 {
        return Err(ExtremalError::DeltaTooSmall);
    }
    if meta.height < 2 {
        return Err(ExtremalError::HeightTooSmall);
    }
    let black_count = meta.black.len();
    if meta.black.len() + meta.grey.len() != n {
        return Err(ExtremalError::MetadataMismatch(format!(
            "{} black + {} grey vertices for a graph of order {n}",
            meta.black.len(),
            meta.grey.len()
        )));
    }
    let blacks_contiguous = meta.black.iter().enumerate().all(|(i, &v)| v as usize == i);
    let greys_contiguous = meta
        .grey
        .iter()
        .enumerate()
        .all(|(i, &v)| v as usize == black_count + i);
    if !blacks_contiguous || !greys_contiguous {
        return Err(ExtremalError::MetadataMismatch(
            "black ids must precede grey ids contiguously".into(),
        ));
    }

    let orientation = Orientation::new(&graph, meta.orientation.clone())?;

    let mut parent: Vec<Option<u32>> = vec![None; black_count];
    for &(tail, head) in orientation.arcs() {
        if (tail as usize) < black_count && (head as usize) < black_count {
            if parent[tail as usize].is_some() {
                return Err(ExtremalError::MetadataMismatch(format!(
                    "black vertex {tail} has two outgoing arcs"
                )));
            }
            parent[tail as usize] = Some(head);
        }
    }
    let tree = RootedTreeShape::from_parents(parent)?;
    if tree.height() != meta.height {
        return Err(ExtremalError::MetadataMismatch(format!(
            "tree height {} but metadata declares {}",
            tree.height(),
            meta.height
        )));
    }

    let mut black_height = vec![0u32; black_count];
    for v in 0..black_count as u32 {
        let expected = meta.height - tree.depth(v);
        match meta.black_height.get(&v) {
            Some(&h) if h == expected => black_height[v as usize] = h,
            _ => {
                return Err(ExtremalError::MetadataMismatch(format!(
                    "black vertex {v} height disagrees with the tree"
                )))
            }
        }
    }

    let leaf_order: Vec<u32> = (0..black_count as u32)
        .filter(|&v| tree.depth(v) == meta.height)
        .collect();
    let mut grey_groups = Vec::with_capacity(meta.grey_groups.len());
    let mut cursor = 0usize;
    let mut grey_cursor = black_count as u32;
    for (leaves, greys) in &meta.grey_groups {
        let expected = leaf_order
            .get(cursor..cursor + leaves.len())
            .ok_or_else(|| {
                ExtremalError::MetadataMismatch("grey groups overrun the leaves".into())
            })?;
        if leaves.as_slice() != expected {
            return Err(ExtremalError::MetadataMismatch(
                "grey group leaves are not consecutive in leaf order".into(),
            ));
        }
        for &gv in greys {
            if gv != grey_cursor {
                return Err(ExtremalError::MetadataMismatch(
                    "grey ids must be assigned group by group".into(),
                ));
            }
            grey_cursor += 1;
        }
        cursor += leaves.len();
        grey_groups.push(GreyGroup {
            leaves: leaves.clone(),
            greys: greys.clone(),
        });
    }
    if cursor != leaf_order.len() || grey_cursor as usize != n {
        return Err(ExtremalError::MetadataMismatch(
            "groups do not cover all vertices".into(),
        ));
    }

    let mut role = vec![VertexRole::Black; black_count];
    role.extend(std::iter::repeat_n(VertexRole::Grey, n - black_count));
    Ok(LabeledExtremalGraph {
        graph,
        delta: meta.delta,
        height: meta.height,
        tree,
        role,
        black_height,
        leaf_order,
        grey_groups,
        orientation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mostar::{edge_comparison, per_edge_comparisons};

    #[test]
    fn backbone_tree_examples() {
        let t = build_extremal_tree(3, 2).unwrap();
        assert_eq!(t.order(), 10);
        assert_eq!((0..10u32).filter(|&v| t.depth(v) == 2).count(), 6);
        assert_eq!(t.children(0), &[1, 2, 3]);

        let t = build_extremal_tree(4, 2).unwrap();
        assert_eq!(t.order(), 17);
        assert_eq!((0..17u32).filter(|&v| t.depth(v) == 2).count(), 12);

        assert_eq!(
            build_extremal_tree(3, 1).unwrap_err(),
            ExtremalError::HeightTooSmall
        );
        assert_eq!(
            build_extremal_tree(2, 3).unwrap_err(),
            ExtremalError::DeltaTooSmall
        );
    }

    #[test]
    fn backbone_tree_degrees() {
        let t = build_extremal_tree(3, 3).unwrap();
        assert_eq!(t.children(0).len(), 3);
        for v in 1..t.order() as u32 {
            let expected = if t.depth(v) == 3 { 0 } else { 2 };
            assert_eq!(t.children(v).len(), expected, "v={v}");
        }
        // Plane order: a level's id order carries down, so the children of
        // consecutive vertices form consecutive blocks.
        for v in 0..t.order() as u32 - 1 {
            let u = v + 1;
            if t.depth(u) == t.depth(v) && !t.children(v).is_empty() && !t.children(u).is_empty() {
                assert!(t.children(v).last().unwrap() < t.children(u).first().unwrap());
                assert_eq!(
                    t.children(v).last().unwrap() + 1,
                    *t.children(u).first().unwrap()
                );
            }
        }
    }

    #[test]
    fn extremal_graph_examples() {
        let lg = build_extremal_graph(4, 3).unwrap();
        assert_eq!(lg.graph.order(), 80);
        assert_eq!(lg.graph.size(), 160);
        assert_eq!(lg.black_count(), 53);
        assert_eq!(lg.grey_count(), 27);
        assert!(lg.graph.validate_degree(4).regular);

        let lg = build_extremal_graph(3, 2).unwrap();
        assert_eq!((lg.graph.order(), lg.graph.size()), (14, 21));
        assert_eq!((lg.black_count(), lg.grey_count()), (10, 4));
        assert!(lg.graph.validate_degree(3).regular);

        let lg = build_extremal_graph(5, 2).unwrap();
        assert_eq!((lg.graph.order(), lg.graph.size()), (42, 105));
        assert_eq!((lg.black_count(), lg.grey_count()), (26, 16));
        assert!(lg.graph.validate_degree(5).regular);
    }

    #[test]
    fn downward_set_examples() {
        let lg = build_extremal_graph(3, 2).unwrap();
        // Leaves are ids 4..=9; each leaf pulls in the two greys of its group.
        for &leaf in &lg.leaf_order {
            assert_eq!(downward_set(&lg, leaf).unwrap().len(), 3);
        }
        // Vertex 2's children are leaves 6 and 7, which straddle both groups.
        assert_eq!(downward_set(&lg, 2).unwrap().len(), 7);
        assert_eq!(downward_set(&lg, 1).unwrap().len(), 5);
        assert_eq!(downward_set(&lg, 3).unwrap().len(), 5);
        assert_eq!(
            downward_set(&lg, 0).unwrap_err(),
            ExtremalError::NotNonRootBlack { v: 0 }
        );
        let grey = lg.grey_groups[0].greys[0];
        assert_eq!(
            downward_set(&lg, grey).unwrap_err(),
            ExtremalError::NotNonRootBlack { v: grey }
        );
    }

    #[test]
    fn downward_set_respects_cap() {
        let lg = build_extremal_graph(3, 2).unwrap();
        for v in 1..lg.black_count() as u32 {
            let h = lg.black_height[v as usize];
            let cap = 4u64 * 2u64.pow(h + 1);
            assert!(downward_set(&lg, v).unwrap().len() as u64 <= cap);
        }
    }

    #[test]
    fn structure_report_passes_on_built_instances() {
        for (delta, height) in [(3, 2), (3, 3), (4, 3), (5, 2)] {
            let lg = build_extremal_graph(delta, height).unwrap();
            let report = verify_structure(&lg);
            assert!(
                report.passed(),
                "delta={delta} H={height}: {:?}",
                report.checks
            );
        }
    }

    #[test]
    fn structure_report_flags_removed_grey_edge() {
        let lg = build_extremal_graph(3, 2).unwrap();
        let removed = {
            let group = &lg.grey_groups[0];
            (group.leaves[0], group.greys[0])
        };
        let edges: Vec<(u32, u32)> = lg
            .graph
            .edges()
            .iter()
            .copied()
            .filter(|&e| e != (removed.0.min(removed.1), removed.0.max(removed.1)))
            .collect();
        let mut corrupted = lg.clone();
        corrupted.graph = Graph::from_edges(lg.graph.order(), edges).unwrap();
        let report = verify_structure(&corrupted);
        assert!(!report.passed());
        let regular = report.check("delta_regular").unwrap();
        assert!(!regular.passed);
        let mut expected = vec![removed.0, removed.1];
        expected.sort_unstable();
        assert_eq!(regular.offenders, expected);
    }

    #[test]
    fn bound_constants() {
        assert_eq!(construction_lower_constant(3), 624);
        assert_eq!(construction_lower_constant(4), 1424);
        assert_eq!(orientation_sum_constant(3), 312);
        assert_eq!(orientation_sum_constant(4), 712);
    }

    #[test]
    fn bound_values() {
        // 294 - 624 * 14 * log2(14); vacuous at this size.
        let v = construction_lower_bound(3, 14).unwrap();
        assert!((v - (294.0 - 624.0 * 14.0 * 14f64.log2())).abs() < 1e-6);
        assert!(v < 0.0);

        let v = orientation_sum_bound(3, 14).unwrap();
        assert!((v - 312.0 * 14.0 * 14f64.log2()).abs() < 1e-6);
        assert!((v - 1.663e4).abs() < 50.0);

        assert_eq!(
            construction_lower_bound(2, 10).unwrap_err(),
            ExtremalError::DeltaTooSmall
        );
        assert_eq!(
            construction_lower_bound(3, 1).unwrap_err(),
            ExtremalError::BoundOrderTooSmall
        );
    }

    #[test]
    fn left_packed_trees() {
        let t = RootedTreeShape::left_packed_ary(2, 7).unwrap();
        assert_eq!(t.height(), 2);
        assert_eq!(t.subtree_sum(), 17);
        assert!(t.is_ary(2));

        let t = RootedTreeShape::left_packed_ary(2, 6).unwrap();
        assert_eq!(t.height(), 2);
        assert!(t.is_ary(2));

        let t = RootedTreeShape::left_packed_ary(1, 5).unwrap();
        assert_eq!(t.subtree_sum(), 15);
        assert_eq!(t.height(), 4);
    }

    #[test]
    fn subtree_sum_equals_depth_sum() {
        for (b, n) in [(2usize, 20usize), (3, 40), (4, 85), (1, 9)] {
            let t = RootedTreeShape::left_packed_ary(b, n).unwrap();
            let by_depth: u64 = (0..n as u32).map(|v| t.depth(v) as u64 + 1).sum();
            assert_eq!(t.subtree_sum(), by_depth);
        }
    }

    #[test]
    fn from_parents_rejects_malformed() {
        assert!(RootedTreeShape::from_parents(vec![]).is_err());
        assert!(RootedTreeShape::from_parents(vec![None, None]).is_err());
        assert!(RootedTreeShape::from_parents(vec![Some(1), Some(0)]).is_err());
        assert!(RootedTreeShape::from_parents(vec![None, Some(5)]).is_err());
    }

    #[test]
    fn metadata_round_trip() {
        let lg = build_extremal_graph(3, 2).unwrap();
        let meta = GhMetadata::from_labeled(&lg);
        let json = meta.to_json();
        assert!(json.starts_with("{\"delta\":3,\"H\":2,"));
        let back = GhMetadata::from_json(&json).unwrap();
        assert_eq!(back, meta);

        let rebuilt = from_parts(lg.graph.clone(), &back).unwrap();
        assert_eq!(rebuilt.graph, lg.graph);
        assert_eq!(rebuilt.leaf_order, lg.leaf_order);
        assert_eq!(rebuilt.black_height, lg.black_height);
        assert!(verify_structure(&rebuilt).passed());
    }

    #[test]
    fn from_parts_rejects_foreign_graph() {
        let lg = build_extremal_graph(3, 2).unwrap();
        let meta = GhMetadata::from_labeled(&lg);
        let other = Graph::from_edges(14, vec![(0, 1)]).unwrap();
        assert!(from_parts(other, &meta).is_err());
    }

    #[test]
    fn from_parts_rejects_corrupted_metadata() {
        let lg = build_extremal_graph(3, 3).unwrap();
        let good = GhMetadata::from_labeled(&lg);
        assert!(from_parts(lg.graph.clone(), &good).is_ok());

        // Declared height disagrees with the reconstructed tree.
        let mut meta = good.clone();
        meta.height = 2;
        assert!(from_parts(lg.graph.clone(), &meta).is_err());

        // Non-contiguous role partition.
        let mut meta = good.clone();
        meta.black.swap(0, 1);
        assert!(from_parts(lg.graph.clone(), &meta).is_err());

        // One black height off by one.
        let mut meta = good.clone();
        meta.black_height.insert(1, 9);
        assert!(from_parts(lg.graph.clone(), &meta).is_err());

        // Grey group ids out of order.
        let mut meta = good.clone();
        meta.grey_groups.swap(0, 1);
        assert!(from_parts(lg.graph.clone(), &meta).is_err());

        // A reversed black arc turns the tree invalid.
        let mut meta = good.clone();
        let arc = meta.orientation[0];
        meta.orientation[0] = (arc.1, arc.0);
        assert!(from_parts(lg.graph.clone(), &meta).is_err());
    }

    fn mirror_permutation(lg: &LabeledExtremalGraph) -> Vec<u32> {
        let n = lg.graph.order();
        let black = lg.black_count();
        let b = (lg.delta - 1) as usize;

        let mut level_start = vec![0usize; lg.height as usize + 2];
        for v in 0..black as u32 {
            level_start[lg.tree.depth(v) as usize + 1] += 1;
        }
        for i in 0..=lg.height as usize {
            level_start[i + 1] += level_start[i];
        }

        let groups = lg.grey_groups.len();
        let mut perm = vec![0u32; n];
        for v in 0..black as u32 {
            let d = lg.tree.depth(v) as usize;
            let width = level_start[d + 1] - level_start[d];
            let pos = v as usize - level_start[d];
            perm[v as usize] = (level_start[d] + width - 1 - pos) as u32;
        }
        for (offset, slot_perm) in perm[black..n].iter_mut().enumerate() {
            let (group, slot) = (offset / b, offset % b);
            *slot_perm = (black + (groups - 1 - group) * b + (b - 1 - slot)) as u32;
        }
        perm
    }

    /// The left-right mirror of the construction is an automorphism, and
    /// per-edge contributions are invariant under it.
    #[test]
    fn mirror_symmetry_preserves_contributions() {
        for (delta, height) in [(3, 3), (4, 2), (5, 2)] {
            let lg = build_extremal_graph(delta, height).unwrap();
            let perm = mirror_permutation(&lg);
            let comps = per_edge_comparisons(&lg.graph);
            for (i, &(u, v)) in lg.graph.edges().iter().enumerate() {
                let (mu, mv) = (perm[u as usize], perm[v as usize]);
                let j = lg
                    .graph
                    .edge_index(mu, mv)
                    .expect("mirror image must be an edge");
                assert_eq!(
                    comps[i].contribution(),
                    comps[j].contribution(),
                    "delta={delta} H={height} edge ({u},{v})"
                );
            }
        }
    }

    /// Grey vertices of one group are interchangeable: their incident-edge
    /// comparison multisets agree.
    #[test]
    fn grey_vertices_of_a_group_are_interchangeable() {
        let lg = build_extremal_graph(3, 2).unwrap();
        for group in &lg.grey_groups {
            let mut signatures = Vec::new();
            for &gv in &group.greys {
                let mut sig: Vec<(u64, u64, u32)> = group
                    .leaves
                    .iter()
                    .map(|&leaf| {
                        let c = edge_comparison(&lg.graph, gv, leaf).unwrap();
                        let toward_grey = if gv == c.u { c.n_uv } else { c.n_vu };
                        let toward_leaf = if gv == c.u { c.n_vu } else { c.n_uv };
                        (toward_grey as u64, toward_leaf as u64, c.equidistant)
                    })
                    .collect();
                sig.sort_unstable();
                signatures.push(sig);
            }
            assert!(signatures.windows(2).all(|w| w[0] == w[1]));
        }
    }
}
