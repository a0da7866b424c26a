//! Decreasing, eventually discrete sequences of partitions of a finite set
//! and the orbit trees they induce.
//!
//! The orbit tree of `P_0 ⊇ P_1 ⊇ ... ⊇ P_N` has one node `(n, C)` for
//! every non-singleton class `C` of `P_n`, ordered by
//! `(n, C) < (m, D)` iff `n < m` and `C ⊇ D`. Levels past `N` repeat the
//! final (discrete) partition.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::wftree::{check_order_preserving, MapReport, NodeId, NodeMap, NodeRecord, TreeError, WfTree};

pub type PointId = u64;

/// A total map between the point sets of two sequences.
pub type PointMap = BTreeMap<PointId, PointId>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EqSeqError {
    #[error("partition {level} is not a partition of the point set: {reason}")]
    NotAPartition { level: usize, reason: String },
    #[error("partition {level} does not refine partition {}", level - 1)]
    NotDecreasing { level: usize },
    #[error("the final partition is not discrete")]
    NotEventuallyDiscrete,
    #[error("point map is not defined on point {0}")]
    MapNotTotal(PointId),
    #[error("point map sends {from} to {to}, which is not a target point")]
    UnknownTarget { from: PointId, to: PointId },
    #[error("point map is not injective")]
    NotInjective,
    #[error("point map is not a reduction at level {level}: witness pair ({x}, {y})")]
    NotAReduction { level: usize, x: PointId, y: PointId },
    #[error("point map is not surjective: {0} is not hit")]
    NotSurjective(PointId),
    #[error("image of class {class:?} at level {level} is not a full target class")]
    NotClassSurjective { level: usize, class: Vec<PointId> },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("malformed sequence json: {0}")]
    Json(String),
}

/// A validated decreasing sequence of partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqSeq {
    points: Vec<PointId>,
    /// `label[n][i]`: class index of point `i` in `P_n`.
    label: Vec<Vec<usize>>,
    /// `classes[n][c]`: sorted point indices of class `c` in `P_n`; classes
    /// are ordered by their least member.
    classes: Vec<Vec<Vec<usize>>>,
}

#[derive(Serialize, Deserialize)]
struct EqSeqJson {
    points: Vec<PointId>,
    partitions: Vec<Vec<Vec<PointId>>>,
}

impl EqSeq {
    /// Validates `partitions` as a decreasing, eventually discrete sequence
    /// of partitions of `points`.
    pub fn new(points: Vec<PointId>, partitions: Vec<Vec<Vec<PointId>>>) -> Result<EqSeq, EqSeqError> {
        let mut points = points;
        points.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(EqSeqError::NotAPartition {
                level: 0,
                reason: "duplicate point id".into(),
            });
        }
        let index: HashMap<PointId, usize> = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut labels = Vec::with_capacity(partitions.len());
        for (level, part) in partitions.iter().enumerate() {
            let mut label = vec![usize::MAX; points.len()];
            for (c, class) in part.iter().enumerate() {
                if class.is_empty() {
                    return Err(EqSeqError::NotAPartition {
                        level,
                        reason: "empty class".into(),
                    });
                }
                for p in class {
                    let i = *index.get(p).ok_or_else(|| EqSeqError::NotAPartition {
                        level,
                        reason: format!("unknown point {p}"),
                    })?;
                    if label[i] != usize::MAX {
                        return Err(EqSeqError::NotAPartition {
                            level,
                            reason: format!("point {p} appears twice"),
                        });
                    }
                    label[i] = c;
                }
            }
            if let Some(i) = label.iter().position(|&l| l == usize::MAX) {
                return Err(EqSeqError::NotAPartition {
                    level,
                    reason: format!("point {} is not covered", points[i]),
                });
            }
            labels.push(label);
        }
        Self::from_labels(points, labels)
    }

    /// Builds a sequence from per-level class labels of each point (point
    /// order as in `points`, which must be sorted). Label values are
    /// arbitrary; they are canonicalized here.
    pub fn from_labels(points: Vec<PointId>, labels: Vec<Vec<usize>>) -> Result<EqSeq, EqSeqError> {
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        let mut label = Vec::with_capacity(labels.len());
        let mut classes = Vec::with_capacity(labels.len());
        for raw in labels {
            debug_assert_eq!(raw.len(), points.len());
            let mut renumber = HashMap::new();
            let mut canon = Vec::with_capacity(raw.len());
            let mut cls: Vec<Vec<usize>> = Vec::new();
            for (i, l) in raw.iter().enumerate() {
                let next = renumber.len();
                let c = *renumber.entry(*l).or_insert(next);
                if c == cls.len() {
                    cls.push(Vec::new());
                }
                cls[c].push(i);
                canon.push(c);
            }
            label.push(canon);
            classes.push(cls);
        }
        if label.is_empty() {
            return Err(EqSeqError::NotEventuallyDiscrete);
        }
        for n in 1..label.len() {
            // each P_n class must sit inside one P_{n-1} class
            for cls in &classes[n] {
                let up = label[n - 1][cls[0]];
                if cls.iter().any(|&i| label[n - 1][i] != up) {
                    return Err(EqSeqError::NotDecreasing { level: n });
                }
            }
        }
        if classes.last().expect("non-empty").iter().any(|c| c.len() > 1) {
            return Err(EqSeqError::NotEventuallyDiscrete);
        }
        Ok(EqSeq {
            points,
            label,
            classes,
        })
    }

    pub fn from_json(text: &str) -> Result<EqSeq, EqSeqError> {
        let raw: EqSeqJson = serde_json::from_str(text).map_err(|e| EqSeqError::Json(e.to_string()))?;
        EqSeq::new(raw.points, raw.partitions)
    }

    pub fn to_json(&self) -> String {
        let raw = EqSeqJson {
            points: self.points.clone(),
            partitions: (0..self.len()).map(|n| self.partition(n)).collect(),
        };
        serde_json::to_string(&raw).expect("sequence serializes")
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    /// Number of stored partitions, `N + 1`.
    pub fn len(&self) -> usize {
        self.label.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn level_index(&self, n: usize) -> usize {
        n.min(self.label.len() - 1)
    }

    /// `P_n` as sorted lists of point ids; past the stored range this is the
    /// final partition.
    pub fn partition(&self, n: usize) -> Vec<Vec<PointId>> {
        self.classes[self.level_index(n)]
            .iter()
            .map(|c| c.iter().map(|&i| self.points[i]).collect())
            .collect()
    }

    /// Class index of point index `i` in `P_n`.
    fn class_of(&self, n: usize, i: usize) -> usize {
        self.label[self.level_index(n)][i]
    }

    fn class_members(&self, n: usize, c: usize) -> &[usize] {
        &self.classes[self.level_index(n)][c]
    }

    fn point_index(&self, p: PointId) -> Option<usize> {
        self.points.binary_search(&p).ok()
    }

    /// Whether `x` and `y` are `E_n`-equivalent.
    pub fn equivalent(&self, n: usize, x: PointId, y: PointId) -> bool {
        match (self.point_index(x), self.point_index(y)) {
            (Some(i), Some(j)) => self.class_of(n, i) == self.class_of(n, j),
            _ => false,
        }
    }

    /// The class `[x]_{E_n}` as point ids.
    pub fn class_containing(&self, n: usize, x: PointId) -> Option<Vec<PointId>> {
        let i = self.point_index(x)?;
        let c = self.class_of(n, i);
        Some(self.class_members(n, c).iter().map(|&j| self.points[j]).collect())
    }

    /// The orbit tree `T_E^X`.
    pub fn orbit_tree(&self) -> OrbitTree {
        let mut records = Vec::new();
        let mut nodes = Vec::new();
        let mut lookup = HashMap::new();
        for n in 0..self.len() {
            for (c, members) in self.classes[n].iter().enumerate() {
                if members.len() < 2 {
                    continue;
                }
                let id = nodes.len() as NodeId;
                let parent = (n > 0).then(|| lookup[&(n - 1, self.label[n - 1][members[0]])]);
                let label = members
                    .iter()
                    .map(|&i| self.points[i].to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                records.push(NodeRecord::new(id, n, parent).labeled(format!("{{{label}}}")));
                lookup.insert((n, c), id);
                nodes.push((n, c));
            }
        }
        let tree = WfTree::validate(records).expect("orbit tree is a valid tree");
        OrbitTree { tree, nodes, lookup }
    }

    /// The product sequence on `X × Y` with classes
    /// `[(x, y)]_n = [x]_n × [y]_n`; the shorter sequence is padded with its
    /// final partition. The pair of point indices `(i, j)` receives id
    /// `i * |Y| + j`.
    pub fn product(&self, other: &EqSeq) -> EqSeq {
        let ny = other.points.len();
        let points: Vec<PointId> = (0..(self.points.len() * ny) as PointId).collect();
        let levels = self.len().max(other.len());
        let labels = (0..levels)
            .map(|n| {
                let k = other.classes[other.level_index(n)].len();
                (0..self.points.len())
                    .flat_map(|i| (0..ny).map(move |j| (i, j)))
                    .map(|(i, j)| self.class_of(n, i) * k + other.class_of(n, j))
                    .collect()
            })
            .collect();
        EqSeq::from_labels(points, labels).expect("product of valid sequences is valid")
    }

    /// Id of the product point `(x, y)` in [`EqSeq::product`].
    pub fn product_point(&self, other: &EqSeq, x: PointId, y: PointId) -> Option<PointId> {
        let i = self.point_index(x)?;
        let j = other.point_index(y)?;
        Some((i * other.points.len() + j) as PointId)
    }

    /// Restriction to a subset of points; every class is intersected with
    /// the subset.
    pub fn restrict(&self, keep: &BTreeSet<PointId>) -> EqSeq {
        let idx: Vec<usize> = (0..self.points.len())
            .filter(|&i| keep.contains(&self.points[i]))
            .collect();
        let points = idx.iter().map(|&i| self.points[i]).collect();
        let labels = self
            .label
            .iter()
            .map(|l| idx.iter().map(|&i| l[i]).collect())
            .collect();
        EqSeq::from_labels(points, labels).expect("restriction stays decreasing and discrete")
    }
}

/// An orbit tree together with the correspondence between its node ids and
/// the `(level, class index)` pairs of the sequence it came from.
#[derive(Debug, Clone)]
pub struct OrbitTree {
    pub tree: WfTree,
    nodes: Vec<(usize, usize)>,
    lookup: HashMap<(usize, usize), NodeId>,
}

impl OrbitTree {
    /// The `(level, class index)` of a node.
    pub fn class_of_node(&self, id: NodeId) -> Option<(usize, usize)> {
        self.nodes.get(id as usize).copied()
    }

    /// The node `(n, C)` for class index `c` of `P_n`, if non-singleton.
    pub fn node_of_class(&self, n: usize, c: usize) -> Option<NodeId> {
        self.lookup.get(&(n, c)).copied()
    }
}

/// A Lipschitz embedding between orbit trees, with its verification report.
#[derive(Debug, Clone)]
pub struct TreeEmbedding {
    pub source: OrbitTree,
    pub target: OrbitTree,
    pub map: NodeMap,
    pub report: MapReport,
}

impl TreeEmbedding {
    pub fn verified(&self) -> bool {
        self.report.is_lipschitz_embedding() && self.report.rank_bound_holds()
    }
}

fn resolve_map(theta: &PointMap, from: &EqSeq, to: &EqSeq) -> Result<Vec<usize>, EqSeqError> {
    from.points
        .iter()
        .map(|&x| {
            let y = *theta.get(&x).ok_or(EqSeqError::MapNotTotal(x))?;
            to.point_index(y).ok_or(EqSeqError::UnknownTarget { from: x, to: y })
        })
        .collect()
}

/// For an injective `theta` that reduces every `E_n` to `F_n`, the map
/// `(n, C) ↦ (n, [theta(C)]_{F_n})` from `T_E` to `T_F`.
pub fn reduction_embedding(theta: &PointMap, e: &EqSeq, f: &EqSeq) -> Result<TreeEmbedding, EqSeqError> {
    let img = resolve_map(theta, e, f)?;
    if img.iter().collect::<BTreeSet<_>>().len() != img.len() {
        return Err(EqSeqError::NotInjective);
    }
    let levels = e.len().max(f.len());
    for n in 0..levels {
        for i in 0..img.len() {
            for j in (i + 1)..img.len() {
                let ee = e.class_of(n, i) == e.class_of(n, j);
                let ff = f.class_of(n, img[i]) == f.class_of(n, img[j]);
                if ee != ff {
                    return Err(EqSeqError::NotAReduction {
                        level: n,
                        x: e.points[i],
                        y: e.points[j],
                    });
                }
            }
        }
    }
    let source = e.orbit_tree();
    let target = f.orbit_tree();
    let mut map = NodeMap::default();
    for id in source.tree.ids() {
        let (n, c) = source.class_of_node(id).expect("node of the orbit tree");
        let rep = e.class_members(n, c)[0];
        let tc = f.class_of(n, img[rep]);
        let tid = target
            .node_of_class(n, tc)
            .expect("image of a non-singleton class under a reduction is non-singleton");
        map.insert(id, tid);
    }
    let report = check_order_preserving(&map, &source.tree, &target.tree, true)?;
    Ok(TreeEmbedding {
        source,
        target,
        map,
        report,
    })
}

/// For a surjective `theta: X -> Y` with `theta([x]_{E_n}) = [theta(x)]_{F_n}`
/// for all `n` and `x`, the embedding `psi: T_F -> T_E` built level by level:
/// `(n, C)` goes to `(n, [x]_{E_n})` for the least `x` inside the class of
/// the witness chosen for the parent of `C` with `theta(x) ∈ C`.
pub fn surjection_embedding(theta: &PointMap, e: &EqSeq, f: &EqSeq) -> Result<TreeEmbedding, EqSeqError> {
    let img = resolve_map(theta, e, f)?;
    let mut hit = vec![false; f.points.len()];
    for &y in &img {
        hit[y] = true;
    }
    if let Some(y) = hit.iter().position(|h| !h) {
        return Err(EqSeqError::NotSurjective(f.points[y]));
    }
    let levels = e.len().max(f.len());
    for n in 0..levels {
        for class in &e.classes[e.level_index(n)] {
            let image: BTreeSet<usize> = class.iter().map(|&i| img[i]).collect();
            let expected = f.class_members(n, f.class_of(n, img[class[0]]));
            if image.len() != expected.len() || !expected.iter().all(|j| image.contains(j)) {
                return Err(EqSeqError::NotClassSurjective {
                    level: n,
                    class: class.iter().map(|&i| e.points[i]).collect(),
                });
            }
        }
    }
    let source = f.orbit_tree();
    let target = e.orbit_tree();
    let mut witness: HashMap<NodeId, usize> = HashMap::new();
    let mut map = NodeMap::default();
    // ids of an orbit tree increase with level, so parents come first
    for id in source.tree.ids() {
        let (n, c) = source.class_of_node(id).expect("node of the orbit tree");
        let inside = |i: &usize| f.class_of(n, img[*i]) == c;
        let x = match source.tree.parent(id) {
            None => (0..img.len()).find(inside),
            Some(p) => {
                let xp = witness[&p];
                let pool = e.class_members(n - 1, e.class_of(n - 1, xp));
                pool.iter().copied().find(inside)
            }
        }
        .expect("class surjectivity provides a witness");
        witness.insert(id, x);
        let tid = target
            .node_of_class(n, e.class_of(n, x))
            .expect("witness class is non-singleton");
        map.insert(id, tid);
    }
    let report = check_order_preserving(&map, &source.tree, &target.tree, true)?;
    Ok(TreeEmbedding {
        source,
        target,
        map,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::Ordinal;

    fn seq(points: &[PointId], parts: &[&[&[PointId]]]) -> Result<EqSeq, EqSeqError> {
        EqSeq::new(
            points.to_vec(),
            parts
                .iter()
                .map(|p| p.iter().map(|c| c.to_vec()).collect())
                .collect(),
        )
    }

    #[test]
    fn make_examples() {
        let s = seq(&[1, 2], &[&[&[1], &[2]]]).unwrap();
        assert_eq!(s.len(), 1);
        assert!(seq(&[1, 2], &[&[&[1, 2]], &[&[1], &[2]]]).is_ok());
        assert_eq!(
            seq(&[1, 2], &[&[&[1], &[2]], &[&[1, 2]]]),
            Err(EqSeqError::NotDecreasing { level: 1 })
        );
    }

    #[test]
    fn make_errors() {
        assert_eq!(seq(&[1, 2], &[&[&[1, 2]]]), Err(EqSeqError::NotEventuallyDiscrete));
        assert_eq!(seq(&[1, 2], &[]), Err(EqSeqError::NotEventuallyDiscrete));
        assert!(matches!(seq(&[1, 2], &[&[&[1]]]), Err(EqSeqError::NotAPartition { .. })));
        assert!(matches!(seq(&[1, 2], &[&[&[1, 3], &[2]]]), Err(EqSeqError::NotAPartition { .. })));
        assert!(matches!(seq(&[1, 2], &[&[&[1, 1], &[2]]]), Err(EqSeqError::NotAPartition { .. })));
        assert!(matches!(seq(&[1, 2], &[&[&[1, 2], &[]]]), Err(EqSeqError::NotAPartition { .. })));
    }

    #[test]
    fn orbit_tree_examples() {
        let discrete = seq(&[1, 2, 3], &[&[&[1], &[2], &[3]]]).unwrap();
        assert_eq!(discrete.orbit_tree().tree.rank(), Ordinal::zero());

        let one = seq(&[1, 2], &[&[&[1, 2]], &[&[1], &[2]]]).unwrap();
        let t = one.orbit_tree();
        assert_eq!(t.tree.len(), 1);
        assert_eq!(t.tree.rank(), Ordinal::one());

        let three = seq(
            &[1, 2, 3, 4],
            &[&[&[1, 2, 3, 4]], &[&[1, 2], &[3, 4]], &[&[1], &[2], &[3], &[4]]],
        )
        .unwrap();
        let t = three.orbit_tree();
        assert_eq!(t.tree.len(), 3);
        assert_eq!(t.tree.rank(), Ordinal::from(2));
        for id in t.tree.ids() {
            assert_eq!(t.tree.level(id), Some(t.class_of_node(id).unwrap().0));
        }
    }

    #[test]
    fn product_examples() {
        let e = seq(&[1, 2, 3], &[&[&[1, 2, 3]], &[&[1, 2], &[3]], &[&[1], &[2], &[3]]]).unwrap();
        let point = seq(&[9], &[&[&[9]]]).unwrap();
        assert_eq!(e.product(&point).orbit_tree().tree.rank(), e.orbit_tree().tree.rank());

        let f = seq(
            &[1, 2, 3, 4],
            &[&[&[1, 2, 3, 4]], &[&[1, 2, 3], &[4]], &[&[1, 2], &[3], &[4]], &[&[1], &[2], &[3], &[4]]],
        )
        .unwrap();
        assert_eq!(e.orbit_tree().tree.rank(), Ordinal::from(2));
        assert_eq!(f.orbit_tree().tree.rank(), Ordinal::from(3));
        let p = e.product(&f);
        assert_eq!(p.points().len(), 12);
        assert_eq!(p.orbit_tree().tree.rank(), Ordinal::from(3));
        let x = e.product_point(&f, 2, 3).unwrap();
        assert_eq!(x, 4 + 2);
        assert_eq!(p.class_containing(1, x).unwrap().len(), 6);
        assert_eq!(p.class_containing(2, x).unwrap().len(), 1);
    }

    #[test]
    fn reduction_examples() {
        let e = seq(&[1, 2, 3], &[&[&[1, 2, 3]], &[&[1, 2], &[3]], &[&[1], &[2], &[3]]]).unwrap();
        let id: PointMap = e.points().iter().map(|&p| (p, p)).collect();
        let emb = reduction_embedding(&id, &e, &e).unwrap();
        assert!(emb.verified() && emb.report.is_isomorphism());

        // inclusion of the union of classes {1,2} ∪ {3} into a larger space
        let f = seq(
            &[1, 2, 3, 4, 5],
            &[&[&[1, 2, 3], &[4, 5]], &[&[1, 2], &[3], &[4, 5]], &[&[1], &[2], &[3], &[4], &[5]]],
        )
        .unwrap();
        let emb = reduction_embedding(&id, &e, &f).unwrap();
        assert!(emb.verified());
        assert!(!emb.report.surjective);

        let bad: PointMap = [(1, 1), (2, 4), (3, 3)].into_iter().collect();
        assert!(matches!(
            reduction_embedding(&bad, &e, &f),
            Err(EqSeqError::NotAReduction { .. })
        ));
        let collide: PointMap = [(1, 1), (2, 1), (3, 3)].into_iter().collect();
        assert_eq!(reduction_embedding(&collide, &e, &f).unwrap_err(), EqSeqError::NotInjective);
    }

    #[test]
    fn surjection_examples() {
        let e = seq(&[1, 2, 3], &[&[&[1, 2, 3]], &[&[1, 2], &[3]], &[&[1], &[2], &[3]]]).unwrap();
        let id: PointMap = e.points().iter().map(|&p| (p, p)).collect();
        let emb = surjection_embedding(&id, &e, &e).unwrap();
        assert!(emb.verified() && emb.report.is_isomorphism());

        // six points, two E_1 classes collapsing onto a single F_1 class
        let x = seq(
            &[0, 1, 2, 3, 4, 5],
            &[&[&[0, 1, 2, 3, 4, 5]], &[&[0, 1, 2], &[3, 4, 5]], &[&[0], &[1], &[2], &[3], &[4], &[5]]],
        )
        .unwrap();
        let y = seq(&[0, 1, 2], &[&[&[0, 1, 2]], &[&[0, 1, 2]], &[&[0], &[1], &[2]]]).unwrap();
        let theta: PointMap = (0..6).map(|p| (p, p % 3)).collect();
        let emb = surjection_embedding(&theta, &x, &y).unwrap();
        assert!(emb.verified());
        assert_eq!(y.orbit_tree().tree.rank(), Ordinal::from(2));
        assert_eq!(x.orbit_tree().tree.rank(), Ordinal::from(2));

        // theta([x]_{E_1}) is a proper part of [theta(x)]_{F_1}
        let x2 = seq(&[0, 1, 2, 3], &[&[&[0, 1, 2, 3]], &[&[0, 1], &[2], &[3]], &[&[0], &[1], &[2], &[3]]]).unwrap();
        let y2 = seq(&[0, 1, 2], &[&[&[0, 1, 2]], &[&[0, 1, 2]], &[&[0], &[1], &[2]]]).unwrap();
        let theta2: PointMap = [(0, 0), (1, 1), (2, 2), (3, 2)].into_iter().collect();
        assert!(matches!(
            surjection_embedding(&theta2, &x2, &y2),
            Err(EqSeqError::NotClassSurjective { level: 1, .. })
        ));
        let not_onto: PointMap = [(0, 0), (1, 0), (2, 0), (3, 0)].into_iter().collect();
        assert!(matches!(
            surjection_embedding(&not_onto, &x2, &y2),
            Err(EqSeqError::NotSurjective(_))
        ));
    }

    #[test]
    fn json_roundtrip() {
        let text = r#"{"points":[1,2,3],"partitions":[[[1,2,3]],[[1,2],[3]],[[1],[2],[3]]]}"#;
        let s = EqSeq::from_json(text).unwrap();
        assert_eq!(EqSeq::from_json(&s.to_json()).unwrap(), s);
        assert_eq!(s.orbit_tree().tree.rank(), Ordinal::from(2));
    }
}
