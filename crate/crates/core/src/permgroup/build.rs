use super::chain::{orbit_labels, CosetSpace};
use super::{ChainGroup, GroupError, Perm};
use crate::eqseq::EqSeq;
use crate::wftree::{check_order_preserving, MapReport, NodeMap};

fn checked_order(budget: usize, mut factors: impl Iterator<Item = usize>) -> Result<usize, GroupError> {
    factors.try_fold(1usize, |acc, f| {
        acc.checked_mul(f)
            .filter(|&o| o <= budget)
            .ok_or(GroupError::BudgetExceeded { budget })
    })
}

/// Direct product on disjoint points whose level-`n` member takes factor
/// `i` at its own level `level(i, n)`, for `n = 0 ..= top`.
fn product_with_levels<F>(factors: &[ChainGroup], top: usize, level: F) -> Result<ChainGroup, GroupError>
where
    F: Fn(usize, usize) -> usize,
{
    let budget = factors.iter().map(ChainGroup::budget).min().unwrap_or(super::DEFAULT_MAX_GROUP_ORDER);
    checked_order(budget, factors.iter().map(|f| f.order(0)))?;
    let offsets: Vec<usize> = factors
        .iter()
        .scan(0, |acc, f| {
            let o = *acc;
            *acc += f.degree;
            Some(o)
        })
        .collect();
    let total: usize = factors.iter().map(ChainGroup::degree).sum();
    let chain = (0..=top)
        .map(|n| {
            factors
                .iter()
                .enumerate()
                .flat_map(|(i, f)| f.generators(level(i, n)).iter().map(|g| g.embed(offsets[i], total)).collect::<Vec<_>>())
                .collect()
        })
        .collect();
    ChainGroup::with_budget(total, chain, budget)
}

impl ChainGroup {
    /// The chain `H ∩ G_n` on the subgroup `H = <h_gens>`, index-aligned with
    /// this chain.
    pub fn subgroup_chain(&self, h_gens: &[Perm]) -> Result<ChainGroup, GroupError> {
        let h = super::closure_with_budget(self.degree, h_gens, self.budget)?;
        if h.iter().any(|g| !self.contains(0, g)) {
            return Err(GroupError::NotASubgroup(0));
        }
        let levels = (0..self.len())
            .map(|n| h.iter().filter(|g| self.contains(n, g)).cloned().collect())
            .collect();
        ChainGroup::from_subgroups(self.degree, levels, self.budget)
    }

    /// The quotient `G/N`, `N = <n_gens>` normal in `G_0`, acting on the
    /// left cosets of `N`, with chain `G_n N / N`.
    pub fn quotient_chain(&self, n_gens: &[Perm]) -> Result<ChainGroup, GroupError> {
        let n = super::closure_with_budget(self.degree, n_gens, self.budget)?;
        if n.iter().any(|g| !self.contains(0, g)) {
            return Err(GroupError::NotASubgroup(0));
        }
        let normal = self.generators(0).iter().all(|g| {
            let inv = g.inverse();
            n_gens.iter().all(|x| n.binary_search(&g.mul(x).mul(&inv)).is_ok())
        });
        if !normal {
            return Err(GroupError::NotNormal);
        }
        let space = CosetSpace::new(self.elements(0), &n);
        let image = |g: &Perm| {
            let images = (0..space.len()).map(|c| space.act(g, c) as u32).collect();
            Perm::from_images(images).expect("left multiplication permutes cosets")
        };
        let chain = self.gens.iter().map(|gens| gens.iter().map(image).collect()).collect();
        ChainGroup::with_budget(space.len(), chain, self.budget)
    }

    /// `G × H` on disjoint points with chain `G_n × H_n`, the shorter chain
    /// padded by its trivial tail.
    pub fn product_chain(&self, other: &ChainGroup) -> Result<ChainGroup, GroupError> {
        checked_order(self.budget, [self.order(0), other.order(0)].into_iter())?;
        let total = self.degree + other.degree;
        let chain = (0..self.len().max(other.len()))
            .map(|n| {
                let left = self.generators(n).iter().map(|g| g.embed(0, total));
                let right = other.generators(n).iter().map(|g| g.embed(self.degree, total));
                left.chain(right).collect()
            })
            .collect();
        ChainGroup::with_budget(total, chain, self.budget)
    }

    /// `copies` copies of `G` with the staggered chain whose `n`-th member
    /// restricts the coordinates `i < n` to `G_n` and leaves the others at
    /// `G_0`.
    pub fn power_chain(&self, copies: usize) -> Result<ChainGroup, GroupError> {
        if copies == 0 {
            return Err(GroupError::InvalidArgument("power_chain needs at least one copy".into()));
        }
        let factors = vec![self.clone(); copies];
        ChainGroup::staggered_product(&factors)
    }

    /// `∏ G^i` with the chain `∏_{i<n} G^i_n × ∏_{i≥n} G^i_0`, continued
    /// until every coordinate is trivial.
    pub fn staggered_product(factors: &[ChainGroup]) -> Result<ChainGroup, GroupError> {
        let top = factors.iter().map(ChainGroup::depth).max().unwrap_or(0).max(factors.len());
        product_with_levels(factors, top, |i, n| if i < n { n } else { 0 })
    }

    /// `∏ G^i` with `G_0` the full product and, for `n ≥ 1`, the chain
    /// `∏_{i<n-1} G^i_n × ∏_{i≥n-1} G^i_1`, continued until trivial.
    pub fn restricted_product(factors: &[ChainGroup]) -> Result<ChainGroup, GroupError> {
        let top = factors.iter().map(ChainGroup::depth).max().unwrap_or(0).max(factors.len() + 1);
        product_with_levels(factors, top, |i, n| match n {
            0 => 0,
            _ if i + 1 < n => n,
            _ => 1,
        })
    }

    /// This chain with every member from index `depth` on replaced by the
    /// trivial group.
    pub fn cut(&self, depth: usize) -> ChainGroup {
        if depth >= self.depth() {
            return self.clone();
        }
        let mut out = self.clone();
        out.gens.truncate(depth);
        out.levels.truncate(depth);
        out.gens.push(Vec::new());
        out.levels.push(vec![Perm::identity(self.degree)]);
        out
    }

    /// The same chain with a different element budget for derived groups.
    pub fn rebudget(mut self, budget: usize) -> ChainGroup {
        self.budget = budget;
        self
    }

    /// The imprimitive wreath product `C_b ≀ G` on `b` blocks of this
    /// group's points, `λ_i = i` acting by block rotation. The chain is the
    /// whole group followed by `{(1, χ) : χ(λ_i) ∈ G_n for i < n}`.
    pub fn wreath_truncation(&self, b: usize) -> Result<ChainGroup, GroupError> {
        if b == 0 {
            return Err(GroupError::InvalidArgument("wreath_truncation needs b >= 1".into()));
        }
        checked_order(self.budget, std::iter::once(b).chain(std::iter::repeat_n(self.order(0), b)))?;
        let m = self.degree;
        let total = b * m;
        let base = |n: usize| -> Vec<Perm> {
            (0..b)
                .flat_map(|i| {
                    let level = if i < n { n } else { 0 };
                    self.generators(level).iter().map(move |g| g.embed(i * m, total))
                })
                .collect()
        };
        let mut top = base(0);
        if b > 1 {
            let images = (0..total).map(|x| ((x + m) % total) as u32).collect();
            top.insert(0, Perm::from_images(images).expect("block rotation is a permutation"));
        }
        let mut chain = vec![top];
        chain.extend((0..=b.max(self.depth())).map(base));
        ChainGroup::with_budget(total, chain, self.budget)
    }
}

/// Level-subtree isomorphisms for one coset space `G/H_k`.
#[derive(Debug, Clone)]
pub struct InterleaveCheck {
    pub k: usize,
    pub left_map: NodeMap,
    pub left_report: MapReport,
    pub right_map: NodeMap,
    pub right_report: MapReport,
}

impl InterleaveCheck {
    pub fn verified(&self) -> bool {
        self.left_report.is_isomorphism() && self.right_report.is_isomorphism()
    }
}

/// A common refinement `H` of two chains with `G_i = H_{left[i]}` and
/// `G'_j = H_{right[j]}`.
#[derive(Debug, Clone)]
pub struct Interleaving {
    pub chain: ChainGroup,
    pub left_levels: Vec<usize>,
    pub right_levels: Vec<usize>,
    pub checks: Vec<InterleaveCheck>,
}

impl Interleaving {
    pub fn verified(&self) -> bool {
        self.checks.iter().all(InterleaveCheck::verified)
    }
}

fn is_subset(small: &[Perm], big: &[Perm]) -> bool {
    small.len() <= big.len() && small.iter().all(|g| big.binary_search(g).is_ok())
}

/// Merges two chains on the same group into one decreasing chain containing
/// both, and verifies for every `k` that the orbit tree of `G/H_k` under each
/// input chain is the level subtree of the tree under `H` at that chain's
/// positions.
pub fn interleave_chains(a: &ChainGroup, b: &ChainGroup) -> Result<Interleaving, GroupError> {
    if a.degree != b.degree {
        return Err(GroupError::DegreeMismatch { expected: a.degree, found: b.degree });
    }
    if a.elements(0) != b.elements(0) {
        return Err(GroupError::InvalidArgument("chains must start at the same group".into()));
    }
    let mut gens = vec![a.gens[0].clone()];
    let mut levels = vec![a.levels[0].clone()];
    let (mut left, mut right) = (vec![0], vec![0]);
    let (mut i, mut j) = (1, 1);
    while i < a.len() || j < b.len() {
        let x = (i < a.len()).then(|| &a.levels[i]);
        let y = (j < b.len()).then(|| &b.levels[j]);
        let at = levels.len();
        let take_left = match (x, y) {
            (Some(x), Some(y)) if x == y => {
                right.push(at);
                j += 1;
                true
            }
            (Some(x), Some(y)) if is_subset(y, x) => true,
            (Some(x), Some(y)) if is_subset(x, y) => false,
            (Some(_), Some(_)) => return Err(GroupError::NoInterleaving(at)),
            (Some(_), None) => true,
            (None, _) => false,
        };
        if take_left {
            gens.push(a.gens[i].clone());
            levels.push(a.levels[i].clone());
            left.push(at);
            i += 1;
        } else {
            gens.push(b.gens[j].clone());
            levels.push(b.levels[j].clone());
            right.push(at);
            j += 1;
        }
    }
    let chain = ChainGroup { degree: a.degree, gens, levels, budget: a.budget.min(b.budget) };
    let checks = (0..chain.len())
        .map(|k| check_interleaving(&chain, k, a, &left, b, &right))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Interleaving { chain, left_levels: left, right_levels: right, checks })
}

fn check_interleaving(
    h: &ChainGroup,
    k: usize,
    a: &ChainGroup,
    left: &[usize],
    b: &ChainGroup,
    right: &[usize],
) -> Result<InterleaveCheck, GroupError> {
    let space = h.cosets(k)?;
    let full = h.coset_eqseq(k)?.orbit_tree();
    let side = |g: &ChainGroup, positions: &[usize]| -> Result<(NodeMap, MapReport), GroupError> {
        let labels = (0..g.len())
            .map(|n| orbit_labels(space.len(), g.generators(n), |x, c| space.act(x, c)))
            .collect();
        let own = EqSeq::from_labels((0..space.len() as u64).collect(), labels)?.orbit_tree();
        let restricted = full.tree.level_subtree(positions).expect("positions increase");
        let mut map = NodeMap::default();
        for id in own.tree.ids() {
            let (n, c) = own.class_of_node(id).expect("node of the orbit tree");
            let target = full.node_of_class(positions[n], c).expect("same partition in the refinement");
            map.insert(id, target);
        }
        let report = check_order_preserving(&map, &own.tree, &restricted, true).expect("map is total");
        Ok((map, report))
    };
    let (left_map, left_report) = side(a, left)?;
    let (right_map, right_report) = side(b, right)?;
    Ok(InterleaveCheck { k, left_map, left_report, right_map, right_report })
}
