//! Finite well-founded leveled forests and their ordinal ranks.
//!
//! Nodes carry an explicit level which is validated against the parent
//! relation, so `level` is the number of strict predecessors of a node.
//! Terminal nodes may carry an ordinal weight standing for a pruned subtree
//! hanging below them: the rank recursion returns the weight at such a
//! terminal instead of 0.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::Ordinal;

pub type NodeId = u64;

/// One node as it appears in the JSON tree format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: NodeId,
    pub level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Ordinal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl NodeRecord {
    pub fn new(id: NodeId, level: usize, parent: Option<NodeId>) -> Self {
        NodeRecord {
            id,
            level,
            parent,
            weight: None,
            label: None,
        }
    }

    pub fn weighted(mut self, weight: Ordinal) -> Self {
        self.weight = Some(weight);
        self
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("duplicate node id {0}")]
    DuplicateId(NodeId),
    #[error("node {node} names missing parent {parent}")]
    DanglingParent { node: NodeId, parent: NodeId },
    #[error("parent chain of node {0} is cyclic")]
    CycleDetected(NodeId),
    #[error("node {node} has level {level} but its position requires level {expected}")]
    LevelMismatch {
        node: NodeId,
        level: usize,
        expected: usize,
    },
    #[error("node {0} carries a weight but is not a terminal")]
    WeightOnInternalNode(NodeId),
    #[error("node {0} not found")]
    NodeNotFound(NodeId),
    #[error("level indices must be strictly increasing")]
    IndicesNotIncreasing,
    #[error("map is not defined on source node {0}")]
    MapNotTotal(NodeId),
    #[error("map sends node {source_node} to {target}, which is not in the target tree")]
    MapOutsideTarget { source_node: NodeId, target: NodeId },
    #[error("malformed tree json: {0}")]
    Json(String),
}

/// A validated finite forest.
#[derive(Debug, Clone)]
pub struct WfTree {
    nodes: Vec<NodeRecord>,
    index: HashMap<NodeId, usize>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
    ranks: Vec<Ordinal>,
}

impl PartialEq for WfTree {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
    }
}

impl Eq for WfTree {}

impl Default for WfTree {
    fn default() -> Self {
        WfTree::empty()
    }
}

/// Work item of `WfTree::product`.
type PairFrame = (Option<usize>, Option<usize>, Option<NodeId>, usize);

impl WfTree {
    pub fn empty() -> Self {
        WfTree {
            nodes: Vec::new(),
            index: HashMap::new(),
            children: Vec::new(),
            roots: Vec::new(),
            ranks: Vec::new(),
        }
    }

    /// Validates raw node records: unique ids, existing parents, acyclic
    /// parent chains, `level(child) = level(parent) + 1` and roots at level
    /// 0, weights on terminals only. Nodes are stored sorted by id.
    pub fn validate(raw: Vec<NodeRecord>) -> Result<WfTree, TreeError> {
        let mut nodes = raw;
        nodes.sort_by_key(|n| n.id);
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(TreeError::DuplicateId(n.id));
            }
        }
        let mut parent_idx = vec![None; nodes.len()];
        for (i, n) in nodes.iter().enumerate() {
            if let Some(p) = n.parent {
                let pi = *index.get(&p).ok_or(TreeError::DanglingParent {
                    node: n.id,
                    parent: p,
                })?;
                parent_idx[i] = Some(pi);
            }
        }
        // 0 = unvisited, 1 = on the current walk, 2 = known acyclic
        let mut state = vec![0u8; nodes.len()];
        for start in 0..nodes.len() {
            let mut walk = Vec::new();
            let mut cur = Some(start);
            while let Some(i) = cur {
                match state[i] {
                    2 => break,
                    1 => return Err(TreeError::CycleDetected(nodes[i].id)),
                    _ => {}
                }
                state[i] = 1;
                walk.push(i);
                cur = parent_idx[i];
            }
            for i in walk {
                state[i] = 2;
            }
        }
        let mut children = vec![Vec::new(); nodes.len()];
        let mut roots = Vec::new();
        for (i, n) in nodes.iter().enumerate() {
            let expected = match parent_idx[i] {
                Some(pi) => {
                    children[pi].push(i);
                    nodes[pi].level + 1
                }
                None => {
                    roots.push(i);
                    0
                }
            };
            if n.level != expected {
                return Err(TreeError::LevelMismatch {
                    node: n.id,
                    level: n.level,
                    expected,
                });
            }
        }
        for (i, n) in nodes.iter().enumerate() {
            if n.weight.is_some() && !children[i].is_empty() {
                return Err(TreeError::WeightOnInternalNode(n.id));
            }
        }
        let ranks = compute_ranks(&nodes, &children);
        Ok(WfTree {
            nodes,
            index,
            children,
            roots,
            ranks,
        })
    }

    pub fn from_json(text: &str) -> Result<WfTree, TreeError> {
        let raw: Vec<NodeRecord> =
            serde_json::from_str(text).map_err(|e| TreeError::Json(e.to_string()))?;
        WfTree::validate(raw)
    }

    /// JSON array of node records, with each node's rank added as `rank`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Annotated<'a> {
            #[serde(flatten)]
            node: &'a NodeRecord,
            rank: &'a Ordinal,
        }
        let items: Vec<_> = self
            .nodes
            .iter()
            .zip(&self.ranks)
            .map(|(node, rank)| Annotated { node, rank })
            .collect();
        serde_json::to_string_pretty(&items).expect("tree serializes")
    }

    /// Graphviz rendering; every node label carries its level and rank.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        writeln!(out, "digraph {name} {{").unwrap();
        writeln!(out, "  node [shape=box];").unwrap();
        for (i, n) in self.nodes.iter().enumerate() {
            let mut label = format!("id={} lh={} rank={}", n.id, n.level, self.ranks[i]);
            if let Some(l) = &n.label {
                write!(label, "\\n{}", l.replace('"', "\\\"")).unwrap();
            }
            if let Some(w) = &n.weight {
                write!(label, "\\nweight={w}").unwrap();
            }
            writeln!(out, "  n{} [label=\"{label}\"];", n.id).unwrap();
        }
        for n in &self.nodes {
            if let Some(p) = n.parent {
                writeln!(out, "  n{p} -> n{};", n.id).unwrap();
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn records(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeRecord> {
        self.index.get(&id).map(|&i| &self.nodes[i])
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().map(|n| n.id)
    }

    pub fn roots(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.roots.iter().map(|&i| self.nodes[i].id)
    }

    pub fn children(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let slot = self.index.get(&id).map(|&i| self.children[i].as_slice());
        slot.unwrap_or(&[]).iter().map(|&c| self.nodes[c].id)
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.node(id).and_then(|n| n.parent)
    }

    pub fn level(&self, id: NodeId) -> Option<usize> {
        self.node(id).map(|n| n.level)
    }

    pub fn max_level(&self) -> Option<usize> {
        self.nodes.iter().map(|n| n.level).max()
    }

    /// Nodes of `L_n(T)`.
    pub fn level_nodes(&self, n: usize) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().filter(move |r| r.level == n).map(|r| r.id)
    }

    /// Whether `a < b` in the tree order, i.e. `a` is a strict ancestor of
    /// `b`.
    pub fn is_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        let (Some(la), Some(mut cur)) = (self.level(a), self.node(b)) else {
            return false;
        };
        while cur.level > la {
            match cur.parent.and_then(|p| self.node(p)) {
                Some(p) => cur = p,
                None => return false,
            }
        }
        cur.id == a && self.level(b) != Some(la)
    }

    /// The strict ancestors of `id`, nearest first.
    pub fn ancestors(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = self.parent(id);
        while let Some(p) = cur {
            out.push(p);
            cur = self.parent(p);
        }
        out
    }

    /// `rho_T(s)`: the supremum of `rho_T(t) + 1` over children `t`; a
    /// weighted terminal returns its weight.
    pub fn node_rank(&self, id: NodeId) -> Result<&Ordinal, TreeError> {
        self.index
            .get(&id)
            .map(|&i| &self.ranks[i])
            .ok_or(TreeError::NodeNotFound(id))
    }

    /// `rho(T)`: the supremum of `rho_T(s) + 1` over roots; 0 for the empty
    /// forest.
    pub fn rank(&self) -> Ordinal {
        let succ: Vec<Ordinal> = self.roots.iter().map(|&r| self.ranks[r].succ()).collect();
        Ordinal::sup(&succ)
    }

    /// `T_s` re-leveled so that `s` sits at level 0. Ids are preserved. An
    /// absent `s` yields the empty tree.
    pub fn subtree_at(&self, s: Option<NodeId>) -> WfTree {
        let Some(&root) = s.and_then(|id| self.index.get(&id)) else {
            return WfTree::empty();
        };
        let base = self.nodes[root].level;
        let mut out = Vec::new();
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            let n = &self.nodes[i];
            let mut rec = n.clone();
            rec.level = n.level - base;
            if i == root {
                rec.parent = None;
            }
            out.push(rec);
            stack.extend(self.children[i].iter().copied());
        }
        WfTree::validate(out).expect("subtree of a valid tree is valid")
    }

    /// The level-subtree `T|(n_i)`: the nodes at levels `n_0 < n_1 < ...`,
    /// where a node at level `n_j` is moved to level `j` and hung below its
    /// ancestor at level `n_{j-1}`.
    ///
    /// Weighted terminals are read as a pruned forest of rank `w = l + m`
    /// (`l` a limit or zero) laid out as a chain of `m` nodes on levels
    /// `L+1 ..= L+m` above a forest of limit rank `l` occupying the levels
    /// beyond. Restricting that forest to the selected levels keeps `l` when
    /// some selected level lies past `L+m` and keeps one chain node per
    /// selected level in `L+1 ..= L+m`. When the terminal's own level is not
    /// selected the surviving material is re-attached as a fresh weighted
    /// terminal at the first selected level that contains it.
    pub fn level_subtree(&self, indices: &[usize]) -> Result<WfTree, TreeError> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TreeError::IndicesNotIncreasing);
        }
        let position: HashMap<usize, usize> =
            indices.iter().enumerate().map(|(j, &n)| (n, j)).collect();
        let mut next_id = self.nodes.iter().map(|n| n.id).max().map_or(0, |m| m + 1);
        let mut out = Vec::new();

        for (i, n) in self.nodes.iter().enumerate() {
            let parent_for = |j: usize| {
                if j == 0 {
                    None
                } else {
                    self.ancestor_at_level(i, indices[j - 1])
                }
            };
            let hidden = n.weight.as_ref().filter(|w| !w.is_zero()).map(|w| {
                let chain_end = n.level as u64 + w.finite_part();
                let chain: Vec<usize> = indices
                    .iter()
                    .copied()
                    .filter(|&l| l > n.level && l as u64 <= chain_end)
                    .collect();
                let beyond = indices.iter().copied().find(|&l| l as u64 > chain_end);
                let limit = if beyond.is_some() {
                    w.limit_part()
                } else {
                    Ordinal::zero()
                };
                (limit, chain, beyond)
            });
            match (position.get(&n.level), hidden) {
                (Some(&j), hidden) => {
                    let mut rec = n.clone();
                    rec.level = j;
                    rec.parent = parent_for(j);
                    if let Some((limit, chain, _)) = hidden {
                        let w = limit.add_nat(chain.len() as u64);
                        rec.weight = (!w.is_zero()).then_some(w);
                    }
                    out.push(rec);
                }
                (None, Some((limit, chain, beyond))) => {
                    let (at_level, w) = match (chain.first(), beyond) {
                        (Some(&first), _) => (first, limit.add_nat(chain.len() as u64 - 1)),
                        (None, Some(b)) if !limit.is_zero() => (b, limit),
                        _ => continue,
                    };
                    // every selected level strictly between this node's
                    // parent branch and `at_level` lies above the node
                    let j = position[&at_level];
                    let mut rec = NodeRecord::new(next_id, j, parent_for(j))
                        .labeled(format!("pruned below {}", n.id));
                    next_id += 1;
                    rec.weight = (!w.is_zero()).then_some(w);
                    out.push(rec);
                }
                (None, None) => {}
            }
        }
        WfTree::validate(out)
    }

    /// Id of the ancestor-or-self of node index `i` sitting at `level`.
    fn ancestor_at_level(&self, mut i: usize, level: usize) -> Option<NodeId> {
        while self.nodes[i].level > level {
            let p = self.nodes[i].parent?;
            i = self.index[&p];
        }
        (self.nodes[i].level == level).then_some(self.nodes[i].id)
    }

/// Level-wise product forest. A node is a pair `(a, b)` of nodes of the
    /// same level where either side may be exhausted (`None`). The rank of
    /// `(a, b)` is the maximum of the two node ranks; a weighted terminal
    /// that dominates its partner ends the branch carrying that maximum.
    pub fn product(&self, other: &WfTree) -> WfTree {
        let mut out = Vec::new();
        let mut next: NodeId = 0;
        let mut stack: Vec<PairFrame> = Vec::new();
        let seed = |left: &WfTree, right: &WfTree| {
            let mut s = Vec::new();
            let lr: Vec<Option<usize>> = std::iter::once(None)
                .chain(left.roots.iter().map(|&r| Some(r)))
                .collect();
            let rr: Vec<Option<usize>> = std::iter::once(None)
                .chain(right.roots.iter().map(|&r| Some(r)))
                .collect();
            for &a in &lr {
                for &b in &rr {
                    if a.is_some() || b.is_some() {
                        s.push((a, b, None, 0));
                    }
                }
            }
            s
        };
        stack.extend(seed(self, other).into_iter().rev());
        while let Some((a, b, parent, level)) = stack.pop() {
            let id = next;
            next += 1;
            let rank_a = a.map(|i| &self.ranks[i]);
            let rank_b = b.map(|i| &other.ranks[i]);
            let weighted_a = a.is_some_and(|i| self.nodes[i].weight.is_some());
            let weighted_b = b.is_some_and(|i| other.nodes[i].weight.is_some());
            let label = format!(
                "({}, {})",
                a.map_or("-".to_string(), |i| self.nodes[i].id.to_string()),
                b.map_or("-".to_string(), |i| other.nodes[i].id.to_string())
            );
            let mut rec = NodeRecord::new(id, level, parent).labeled(label);
            let top = match (rank_a, rank_b) {
                (Some(x), Some(y)) => x.max(y).clone(),
                (Some(x), None) | (None, Some(x)) => x.clone(),
                (None, None) => unreachable!(),
            };
            let dominated = (weighted_a && rank_a == Some(&top)) || (weighted_b && rank_b == Some(&top));
            if dominated {
                if !top.is_zero() {
                    rec.weight = Some(top);
                }
                out.push(rec);
                continue;
            }
            out.push(rec);
            let kids = |node: Option<usize>, t: &WfTree, weighted: bool| -> Vec<Option<usize>> {
                let mut v = vec![None];
                if let Some(i) = node {
                    if !weighted {
                        v.extend(t.children[i].iter().map(|&c| Some(c)));
                    }
                }
                v
            };
            let ka = kids(a, self, weighted_a);
            let kb = kids(b, other, weighted_b);
            let mut pending = Vec::new();
            for &x in &ka {
                for &y in &kb {
                    if x.is_some() || y.is_some() {
                        pending.push((x, y, Some(id), level + 1));
                    }
                }
            }
            stack.extend(pending.into_iter().rev());
        }
        WfTree::validate(out).expect("product forest is valid")
    }
}

fn compute_ranks(nodes: &[NodeRecord], children: &[Vec<usize>]) -> Vec<Ordinal> {
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(nodes[i].level));
    let mut ranks = vec![Ordinal::zero(); nodes.len()];
    for i in order {
        ranks[i] = if children[i].is_empty() {
            nodes[i].weight.clone().unwrap_or_default()
        } else {
            let succ: Vec<Ordinal> = children[i].iter().map(|&c| ranks[c].succ()).collect();
            Ordinal::sup(&succ)
        };
    }
    ranks
}

/// A total assignment from the nodes of one tree to the nodes of another.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeMap(pub BTreeMap<NodeId, NodeId>);

impl NodeMap {
    pub fn identity(tree: &WfTree) -> Self {
        NodeMap(tree.ids().map(|id| (id, id)).collect())
    }

    pub fn get(&self, id: NodeId) -> Option<NodeId> {
        self.0.get(&id).copied()
    }

    pub fn insert(&mut self, from: NodeId, to: NodeId) {
        self.0.insert(from, to);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Outcome of [`check_order_preserving`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapReport {
    pub order_preserving: bool,
    pub injective: bool,
    pub level_preserving: bool,
    /// `phi(s) < phi(t)` implies `s < t`.
    pub reflects_order: bool,
    /// Every target node is hit.
    pub surjective: bool,
    pub source_rank: Ordinal,
    pub target_rank: Ordinal,
    pub lipschitz_required: bool,
}

impl MapReport {
    /// Order preserving, and level preserving when that was requested.
    pub fn passes(&self) -> bool {
        self.order_preserving && (!self.lipschitz_required || self.level_preserving)
    }

    pub fn is_lipschitz_embedding(&self) -> bool {
        self.order_preserving && self.level_preserving && self.injective && self.reflects_order
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_lipschitz_embedding() && self.surjective
    }

    /// `rho(S) <= rho(T)`, which must hold whenever the map is order
    /// preserving.
    pub fn rank_bound_holds(&self) -> bool {
        self.source_rank <= self.target_rank
    }
}

/// Checks the order-theoretic properties of `phi: S -> T`. When `phi` is
/// order preserving the rank inequality `rho(S) <= rho(T)` is asserted.
pub fn check_order_preserving(
    phi: &NodeMap,
    source: &WfTree,
    target: &WfTree,
    lipschitz: bool,
) -> Result<MapReport, TreeError> {
    let mut image = HashMap::with_capacity(source.len());
    for s in source.ids() {
        let t = phi.get(s).ok_or(TreeError::MapNotTotal(s))?;
        if !target.contains(t) {
            return Err(TreeError::MapOutsideTarget {
                source_node: s,
                target: t,
            });
        }
        image.insert(s, t);
    }
    let injective = image.values().collect::<HashSet<_>>().len() == image.len();
    let level_preserving = source
        .ids()
        .all(|s| source.level(s) == target.level(image[&s]));
    let order_preserving = source
        .ids()
        .all(|s| source.ancestors(s).into_iter().all(|a| target.is_ancestor(image[&a], image[&s])));
    let mut preimage: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for (&s, &t) in &image {
        preimage.entry(t).or_default().push(s);
    }
    // phi(s) < phi(t) means phi(s) is a strict ancestor of phi(t)
    let reflects_order = source.ids().all(|t| {
        target.ancestors(image[&t]).iter().all(|a| {
            preimage
                .get(a)
                .is_none_or(|ss| ss.iter().all(|&s| source.is_ancestor(s, t)))
        })
    });
    let hit: HashSet<_> = image.values().copied().collect();
    let surjective = target.ids().all(|t| hit.contains(&t));
    let report = MapReport {
        order_preserving,
        injective,
        level_preserving,
        reflects_order,
        surjective,
        source_rank: source.rank(),
        target_rank: target.rank(),
        lipschitz_required: lipschitz,
    };
    if report.order_preserving {
        assert!(
            report.rank_bound_holds(),
            "order preserving map with rho(S) = {} > rho(T) = {}",
            report.source_rank,
            report.target_rank
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn chain(len: usize) -> WfTree {
        let raw = (0..len as u64)
            .map(|i| NodeRecord::new(i, i as usize, i.checked_sub(1)))
            .collect();
        WfTree::validate(raw).unwrap()
    }

    #[test]
    fn validation_examples() {
        let one = WfTree::validate(vec![NodeRecord::new(7, 0, None)]).unwrap();
        assert_eq!(one.roots().collect::<Vec<_>>(), vec![7]);

        let bad = WfTree::validate(vec![
            NodeRecord::new(0, 0, None),
            NodeRecord::new(1, 1, Some(0)),
            NodeRecord::new(2, 2, Some(1)),
            NodeRecord::new(3, 2, Some(2)),
        ]);
        assert!(matches!(bad, Err(TreeError::LevelMismatch { node: 3, .. })));

        let c = chain(3);
        assert_eq!(c.level(2), Some(2));
        assert_eq!(c.ancestors(2), vec![1, 0]);
    }

    #[test]
    fn validation_errors() {
        let dangling = WfTree::validate(vec![NodeRecord::new(1, 1, Some(9))]);
        assert_eq!(dangling, Err(TreeError::DanglingParent { node: 1, parent: 9 }));
        let cyclic = WfTree::validate(vec![
            NodeRecord::new(1, 1, Some(2)),
            NodeRecord::new(2, 2, Some(1)),
        ]);
        assert!(matches!(cyclic, Err(TreeError::CycleDetected(_))));
        let dup = WfTree::validate(vec![NodeRecord::new(1, 0, None), NodeRecord::new(1, 0, None)]);
        assert_eq!(dup, Err(TreeError::DuplicateId(1)));
        let root_level = WfTree::validate(vec![NodeRecord::new(1, 3, None)]);
        assert!(matches!(root_level, Err(TreeError::LevelMismatch { expected: 0, .. })));
        let internal_weight = WfTree::validate(vec![
            NodeRecord::new(0, 0, None).weighted(o("w")),
            NodeRecord::new(1, 1, Some(0)),
        ]);
        assert_eq!(internal_weight, Err(TreeError::WeightOnInternalNode(0)));
    }

    #[test]
    fn rank_examples() {
        let t = WfTree::validate(vec![NodeRecord::new(0, 0, None)]).unwrap();
        assert_eq!(t.node_rank(0).unwrap(), &o("0"));
        assert_eq!(t.rank(), o("1"));
        assert_eq!(chain(3).node_rank(0).unwrap(), &o("2"));
        assert_eq!(WfTree::empty().rank(), o("0"));
        let w = WfTree::validate(vec![NodeRecord::new(0, 0, None).weighted(o("w"))]).unwrap();
        assert_eq!(w.node_rank(0).unwrap(), &o("w"));
        assert_eq!(w.rank(), o("w+1"));
        assert_eq!(t.node_rank(5), Err(TreeError::NodeNotFound(5)));

        // two roots with node ranks 2 and 5
        let mut raw: Vec<NodeRecord> = (0..3u64)
            .map(|i| NodeRecord::new(i, i as usize, i.checked_sub(1)))
            .collect();
        raw.extend((10..16u64).map(|i| {
            NodeRecord::new(i, (i - 10) as usize, if i == 10 { None } else { Some(i - 1) })
        }));
        let two = WfTree::validate(raw).unwrap();
        assert_eq!(two.node_rank(0).unwrap(), &o("2"));
        assert_eq!(two.node_rank(10).unwrap(), &o("5"));
        assert_eq!(two.rank(), o("6"));
    }

    #[test]
    fn subtree_examples() {
        let c = chain(3);
        assert_eq!(c.subtree_at(Some(0)), c);
        assert_eq!(c.subtree_at(None).rank(), o("0"));
        assert_eq!(c.subtree_at(Some(42)).rank(), o("0"));
        let leaf = c.subtree_at(Some(2));
        assert_eq!(leaf.len(), 1);
        assert_eq!(leaf.rank(), o("1"));
        let mid = c.subtree_at(Some(1));
        assert_eq!(mid.level(1), Some(0));
        assert_eq!(mid.rank(), c.node_rank(1).unwrap().succ());
    }

    #[test]
    fn level_subtree_examples() {
        let c = chain(3);
        assert_eq!(c.level_subtree(&[0, 1, 2]).unwrap(), c);
        let skip = c.level_subtree(&[0, 2]).unwrap();
        assert_eq!(skip.len(), 2);
        assert_eq!(skip.rank(), o("2"));
        assert_eq!(skip.parent(2), Some(0));
        assert!(c.level_subtree(&[5, 9]).unwrap().is_empty());
        assert_eq!(c.level_subtree(&[1, 1]), Err(TreeError::IndicesNotIncreasing));
        let shifted = c.level_subtree(&[1, 2]).unwrap();
        assert_eq!(shifted.roots().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn level_subtree_weighted() {
        // root -> a -> b(weight w+2)
        let t = WfTree::validate(vec![
            NodeRecord::new(0, 0, None),
            NodeRecord::new(1, 1, Some(0)),
            NodeRecord::new(2, 2, Some(1)).weighted(o("w+2")),
        ])
        .unwrap();
        assert_eq!(t.rank(), o("w+5"));
        // all levels selected: unchanged
        assert_eq!(t.level_subtree(&[0, 1, 2, 3, 4, 5]).unwrap().rank(), o("w+5"));
        // skip the weighted level: hidden chain node at level 3 takes over
        let s = t.level_subtree(&[0, 1, 3, 4, 6]).unwrap();
        assert_eq!(s.rank(), o("w+4"));
        // nothing selected past the hidden chain: only finite material survives
        let s = t.level_subtree(&[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(s.rank(), o("5"));
        // limit weight skipped entirely: re-attached at the next selected level
        let u = WfTree::validate(vec![
            NodeRecord::new(0, 0, None),
            NodeRecord::new(1, 1, Some(0)).weighted(o("w^2")),
        ])
        .unwrap();
        let s = u.level_subtree(&[0, 2]).unwrap();
        assert_eq!(s.rank(), o("w^2+2"));
        assert!(s.rank() <= u.rank());
    }

    #[test]
    fn order_preserving_examples() {
        let c = chain(3);
        let id = NodeMap::identity(&c);
        let r = check_order_preserving(&id, &c, &c, true).unwrap();
        assert!(r.passes() && r.is_isomorphism());
        assert_eq!(r.source_rank, r.target_rank);

        let two = chain(2);
        let single = chain(1);
        let collapse = NodeMap([(0, 0), (1, 0)].into_iter().collect());
        let r = check_order_preserving(&collapse, &two, &single, false).unwrap();
        assert!(!r.order_preserving);

        let partial = NodeMap([(0, 0)].into_iter().collect());
        assert_eq!(
            check_order_preserving(&partial, &two, &two, false),
            Err(TreeError::MapNotTotal(1))
        );

        let sub = c.level_subtree(&[0, 2]).unwrap();
        let incl = NodeMap(sub.ids().map(|i| (i, i)).collect());
        let r = check_order_preserving(&incl, &sub, &c, false).unwrap();
        assert!(r.order_preserving && r.injective && !r.level_preserving);
        assert!(r.rank_bound_holds());
    }

    #[test]
    fn product_examples() {
        let c2 = chain(2);
        let c5 = chain(5);
        assert_eq!(c2.product(&WfTree::empty()).rank(), c2.rank());
        assert_eq!(WfTree::empty().product(&c5).len(), 5);
        assert_eq!(c2.product(&c5).rank(), o("5"));

        let a = WfTree::validate(vec![NodeRecord::new(0, 0, None).weighted(o("w"))]).unwrap();
        let b = WfTree::validate(vec![NodeRecord::new(0, 0, None).weighted(o("w*2"))]).unwrap();
        let p = a.product(&b);
        let both = p
            .records()
            .iter()
            .find(|r| r.label.as_deref() == Some("(0, 0)"))
            .unwrap();
        assert_eq!(both.weight, Some(o("w*2")));
        assert_eq!(p.rank(), o("w*2+1"));
    }

    #[test]
    fn json_and_dot() {
        let text = r#"[{"id":0,"level":0},{"id":1,"level":1,"parent":0,"weight":"w"}]"#;
        let t = WfTree::from_json(text).unwrap();
        assert_eq!(t.rank(), o("w+2"));
        let back = WfTree::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        let dot = t.to_dot("T");
        assert!(dot.contains("n0 -> n1"));
        assert!(dot.contains("rank=w+1"));
        assert!(matches!(WfTree::from_json("{"), Err(TreeError::Json(_))));
    }
}
