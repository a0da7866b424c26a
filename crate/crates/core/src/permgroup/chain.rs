use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GroupError, Perm};
use crate::eqseq::EqSeq;
use crate::ordinal::Ordinal;
use crate::par::{self, Strategy};

pub const DEFAULT_MAX_GROUP_ORDER: usize = 20000;

/// Tunables shared by every group computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroupConfig {
    /// Largest subgroup closure that may be enumerated.
    pub max_group_order: usize,
}

impl Default for GroupConfig {
    fn default() -> Self {
        GroupConfig { max_group_order: DEFAULT_MAX_GROUP_ORDER }
    }
}

/// Elements of the group generated by `gens`, sorted.
pub fn closure(degree: usize, gens: &[Perm]) -> Result<Vec<Perm>, GroupError> {
    closure_with_budget(degree, gens, DEFAULT_MAX_GROUP_ORDER)
}

pub fn closure_with_budget(degree: usize, gens: &[Perm], budget: usize) -> Result<Vec<Perm>, GroupError> {
    for g in gens {
        if g.degree() != degree {
            return Err(GroupError::DegreeMismatch { expected: degree, found: g.degree() });
        }
    }
    let gens: Vec<&Perm> = gens.iter().filter(|g| !g.is_identity()).collect();
    let id = Perm::identity(degree);
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for s in &gens {
            let y = s.mul(&x);
            if !seen.contains(&y) {
                if seen.len() >= budget {
                    return Err(GroupError::BudgetExceeded { budget });
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<Perm> = seen.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

/// A small generating set for a subgroup given by its sorted elements.
pub(crate) fn generating_set(degree: usize, elements: &[Perm], budget: usize) -> Result<Vec<Perm>, GroupError> {
    let mut gens = Vec::new();
    let mut current = vec![Perm::identity(degree)];
    // prefer elements of large order so that few generators suffice
    let mut candidates: Vec<(usize, &Perm)> = elements.iter().map(|e| (element_order(e), e)).collect();
    candidates.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    for (_, e) in candidates {
        if current.len() == elements.len() {
            break;
        }
        if current.binary_search(e).is_err() {
            gens.push(e.clone());
            current = closure_with_budget(degree, &gens, budget)?;
        }
    }
    Ok(gens)
}

fn element_order(p: &Perm) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    p.cycles().iter().fold(1, |acc, c| acc / gcd(acc, c.len()) * c.len())
}

/// A permutation group `G = G_0 ⊇ G_1 ⊇ ... ⊇ G_N = {1}` on
/// `{0, ..., degree - 1}` with every member enumerated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainGroup {
    pub(super) degree: usize,
    pub(super) gens: Vec<Vec<Perm>>,
    pub(super) levels: Vec<Vec<Perm>>,
    pub(super) budget: usize,
}

impl ChainGroup {
    pub fn new(degree: usize, chain: Vec<Vec<Perm>>) -> Result<ChainGroup, GroupError> {
        Self::with_budget(degree, chain, DEFAULT_MAX_GROUP_ORDER)
    }

    pub fn with_config(degree: usize, chain: Vec<Vec<Perm>>, config: GroupConfig) -> Result<ChainGroup, GroupError> {
        Self::with_budget(degree, chain, config.max_group_order)
    }

    pub fn with_budget(degree: usize, chain: Vec<Vec<Perm>>, budget: usize) -> Result<ChainGroup, GroupError> {
        if chain.is_empty() {
            return Err(GroupError::ChainNotTrivialAtEnd);
        }
        let mut levels: Vec<Vec<Perm>> = Vec::with_capacity(chain.len());
        for (n, gens) in chain.iter().enumerate() {
            if let Some(prev) = levels.last() {
                if gens.iter().any(|g| g.degree() == degree && prev.binary_search(g).is_err()) {
                    return Err(GroupError::NotASubgroup(n));
                }
            }
            levels.push(closure_with_budget(degree, gens, budget)?);
        }
        if levels.last().is_some_and(|l| l.len() != 1) {
            return Err(GroupError::ChainNotTrivialAtEnd);
        }
        Ok(ChainGroup { degree, gens: chain, levels, budget })
    }

    /// Parses one generator list per level, each a comma separated list of
    /// permutations in cycle notation; an empty string is the trivial group.
    pub fn parse_levels(degree: usize, levels: &[&str]) -> Result<ChainGroup, GroupError> {
        let chain = levels
            .iter()
            .map(|l| split_generators(l).into_iter().map(|g| Perm::parse(g, degree)).collect())
            .collect::<Result<Vec<Vec<Perm>>, _>>()?;
        ChainGroup::new(degree, chain)
    }

    /// Builds a chain from enumerated subgroups, choosing generators.
    pub(crate) fn from_subgroups(degree: usize, levels: Vec<Vec<Perm>>, budget: usize) -> Result<ChainGroup, GroupError> {
        let mut gens: Vec<Vec<Perm>> = Vec::with_capacity(levels.len());
        for (n, l) in levels.iter().enumerate() {
            if n > 0 && l == &levels[n - 1] {
                let prev = gens[n - 1].clone();
                gens.push(prev);
            } else {
                gens.push(generating_set(degree, l, budget)?);
            }
        }
        debug_assert!(levels.windows(2).all(|w| w[1].iter().all(|g| w[0].binary_search(g).is_ok())));
        if levels.last().is_none_or(|l| l.len() != 1) {
            return Err(GroupError::ChainNotTrivialAtEnd);
        }
        Ok(ChainGroup { degree, gens, levels, budget })
    }

    /// The trivial group with the one-member chain `[{1}]`.
    pub fn trivial(degree: usize) -> ChainGroup {
        ChainGroup::new(degree, vec![vec![]]).expect("trivial chain is valid")
    }

    /// The cyclic group `C_b` acting regularly on `b` points, chain `[C_b, {1}]`.
    pub fn cyclic(b: usize) -> ChainGroup {
        let images: Vec<u32> = (0..b as u32).map(|i| (i + 1) % b as u32).collect();
        let g = Perm::from_images(images).expect("rotation is a permutation");
        ChainGroup::new(b, vec![vec![g], vec![]]).expect("cyclic chain is valid")
    }

    /// `[S_3, A_3, {1}]` in its natural action.
    pub fn s3() -> ChainGroup {
        ChainGroup::parse_levels(3, &["(0 1 2), (0 1)", "(0 1 2)", ""]).expect("S3 chain is valid")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Number of chain members `N + 1`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    /// Index `N` of the final (trivial) member.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn generators(&self, n: usize) -> &[Perm] {
        &self.gens[n.min(self.depth())]
    }

    /// Sorted elements of `G_n`; indices past the end give the trivial group.
    pub fn elements(&self, n: usize) -> &[Perm] {
        &self.levels[n.min(self.depth())]
    }

    pub fn order(&self, n: usize) -> usize {
        self.elements(n).len()
    }

    pub fn contains(&self, n: usize, g: &Perm) -> bool {
        self.elements(n).binary_search(g).is_ok()
    }

    pub fn check_index(&self, k: usize) -> Result<(), GroupError> {
        if k > self.depth() {
            return Err(GroupError::IndexOutOfRange { k, len: self.len() });
        }
        Ok(())
    }

    /// Left cosets `g G_k` of `G_k` in `G_0`.
    pub fn cosets(&self, k: usize) -> Result<CosetSpace, GroupError> {
        self.check_index(k)?;
        Ok(CosetSpace::new(self.elements(0), self.elements(k)))
    }

    /// Orbit partitions of `G_n` acting by left multiplication on `G/G_k`,
    /// for `n = 0 ..= N`.
    pub fn coset_eqseq(&self, k: usize) -> Result<EqSeq, GroupError> {
        let space = self.cosets(k)?;
        let count = space.len();
        let labels = (0..self.len())
            .map(|n| orbit_labels(count, self.generators(n), |g, c| space.act(g, c)))
            .collect();
        Ok(EqSeq::from_labels((0..count as u64).collect(), labels)?)
    }

    /// `ρ^k`, the rank of the orbit tree of `G/G_k`.
    pub fn rho_k(&self, k: usize) -> Result<Ordinal, GroupError> {
        Ok(self.coset_eqseq(k)?.orbit_tree().tree.rank())
    }

    /// `ρ^k` for `k = 0 ..= N`.
    pub fn rho_profile(&self, strategy: Strategy) -> Vec<Ordinal> {
        let ks: Vec<usize> = (0..self.len()).collect();
        par::map(strategy, &ks, |&k| self.rho_k(k).expect("index in range"))
    }

    /// `ρ = sup_k ρ^k`.
    pub fn rho(&self) -> Ordinal {
        self.rho_with(Strategy::default())
    }

    pub fn rho_with(&self, strategy: Strategy) -> Ordinal {
        Ordinal::sup(&self.rho_profile(strategy))
    }
}

/// Canonical orbit labels of a generated action on `0 .. count`.
pub(crate) fn orbit_labels<F>(count: usize, gens: &[Perm], act: F) -> Vec<usize>
where
    F: Fn(&Perm, usize) -> usize,
{
    let mut parent: Vec<usize> = (0..count).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for g in gens.iter().filter(|g| !g.is_identity()) {
        for c in 0..count {
            let (a, b) = (find(&mut parent, c), find(&mut parent, act(g, c)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..count).map(|c| find(&mut parent, c)).collect()
}

/// Splits `(0 1), (1 2)(3 4)` at top-level commas.
pub(crate) fn split_generators(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(text[start..].trim());
    out.retain(|s| !s.is_empty());
    out
}

impl fmt::Display for ChainGroup {
    /// `[ (0 1 2), (0 1) ] > [ (0 1 2) ] > [ ]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, gens) in self.gens.iter().enumerate() {
            if n > 0 {
                f.write_str(" > ")?;
            }
            let body: Vec<String> = gens.iter().filter(|g| !g.is_identity()).map(|g| g.to_string()).collect();
            if body.is_empty() {
                f.write_str("[ ]")?;
            } else {
                write!(f, "[ {} ]", body.join(", "))?;
            }
        }
        Ok(())
    }
}

/// The left cosets of a subgroup `K` in a group `G`, numbered in the order of
/// their least elements.
#[derive(Clone, Debug)]
pub struct CosetSpace {
    reps: Vec<Perm>,
    subgroup: Vec<Perm>,
    index: HashMap<Perm, usize>,
    coset_of: Vec<usize>,
}

impl CosetSpace {
    pub(crate) fn new(group: &[Perm], subgroup: &[Perm]) -> CosetSpace {
        let index: HashMap<Perm, usize> = group.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let mut coset_of = vec![usize::MAX; group.len()];
        let mut reps = Vec::with_capacity(group.len() / subgroup.len().max(1));
        for (i, g) in group.iter().enumerate() {
            if coset_of[i] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(g.clone());
            for h in subgroup {
                coset_of[index[&g.mul(h)]] = c;
            }
        }
        CosetSpace { reps, subgroup: subgroup.to_vec(), index, coset_of }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Least element of coset `c`.
    pub fn rep(&self, c: usize) -> &Perm {
        &self.reps[c]
    }

    pub fn reps(&self) -> &[Perm] {
        &self.reps
    }

    /// Coset containing `g`, if `g` lies in the ambient group.
    pub fn coset_of(&self, g: &Perm) -> Option<usize> {
        self.index.get(g).map(|&i| self.coset_of[i])
    }

    /// `g · (rep_c K)`.
    pub fn act(&self, g: &Perm, c: usize) -> usize {
        self.coset_of(&g.mul(&self.reps[c])).expect("acting element lies in the group")
    }

    /// Sorted members of coset `c`.
    pub fn members(&self, c: usize) -> Vec<Perm> {
        let mut out: Vec<Perm> = self.subgroup.iter().map(|h| self.reps[c].mul(h)).collect();
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, degree: usize) -> Perm {
        Perm::parse(s, degree).unwrap()
    }

    #[test]
    fn closure_examples() {
        assert_eq!(closure(3, &[]).unwrap(), vec![Perm::identity(3)]);
        assert_eq!(closure(2, &[p("(0 1)", 2)]).unwrap().len(), 2);
        assert_eq!(closure(3, &[p("(0 1 2)", 3), p("(0 1)", 3)]).unwrap().len(), 6);
        assert_eq!(
            closure_with_budget(4, &[p("(0 1 2 3)", 4), p("(0 1)", 4)], 10),
            Err(GroupError::BudgetExceeded { budget: 10 })
        );
        assert!(matches!(closure(3, &[p("(0 1)", 2)]), Err(GroupError::DegreeMismatch { .. })));
    }

    #[test]
    fn chain_validation() {
        let s3 = ChainGroup::s3();
        assert_eq!(s3.depth(), 2);
        assert_eq!(s3.order(0), 6);
        assert_eq!(s3.order(1), 3);
        assert_eq!(
            ChainGroup::parse_levels(3, &["(0 1 2)", "(0 1 2), (0 1)", ""]),
            Err(GroupError::NotASubgroup(1))
        );
        assert_eq!(ChainGroup::parse_levels(2, &["(0 1)"]), Err(GroupError::ChainNotTrivialAtEnd));
        assert_eq!(ChainGroup::new(2, vec![]), Err(GroupError::ChainNotTrivialAtEnd));
        assert_eq!(
            ChainGroup::parse_levels(4, &["(0 1 2 3), (0 1)", ""]).map(|_| ()),
            Ok(())
        );
        assert_eq!(
            ChainGroup::with_budget(4, vec![vec![p("(0 1 2 3)", 4), p("(0 1)", 4)], vec![]], 23),
            Err(GroupError::BudgetExceeded { budget: 23 })
        );
    }

    #[test]
    fn coset_examples() {
        let s3 = ChainGroup::s3();
        assert_eq!(s3.cosets(0).unwrap().len(), 1);
        assert_eq!(s3.cosets(1).unwrap().len(), 2);
        let c2 = s3.cosets(2).unwrap();
        assert_eq!(c2.len(), 6);
        assert!((0..6).all(|c| c2.members(c).len() == 1));
        assert_eq!(s3.cosets(3).unwrap_err(), GroupError::IndexOutOfRange { k: 3, len: 3 });
        let c1 = s3.cosets(1).unwrap();
        for c in 0..2 {
            assert_eq!(c1.members(c)[0], *c1.rep(c));
            assert_eq!(c1.act(&Perm::identity(3), c), c);
        }
        assert_eq!(c1.act(&p("(0 1)", 3), 0), 1);
    }

    #[test]
    fn coset_sequences() {
        let s3 = ChainGroup::s3();
        let e = s3.coset_eqseq(0).unwrap();
        assert!(e.orbit_tree().tree.is_empty());
        let e = s3.coset_eqseq(2).unwrap();
        let sizes = |n: usize| {
            let mut s: Vec<usize> = e.partition(n).iter().map(|c| c.len()).collect();
            s.sort();
            s
        };
        assert_eq!(sizes(0), vec![6]);
        assert_eq!(sizes(1), vec![3, 3]);
        assert_eq!(sizes(2), vec![1; 6]);
        let z2 = ChainGroup::cyclic(2);
        let e = z2.coset_eqseq(1).unwrap();
        assert_eq!(e.partition(0).len(), 1);
        assert_eq!(e.partition(1).len(), 2);
    }

    #[test]
    fn rank_examples() {
        let s3 = ChainGroup::s3();
        assert_eq!(s3.rho_k(0).unwrap(), Ordinal::zero());
        assert_eq!(s3.rho_k(2).unwrap(), Ordinal::from(2));
        assert_eq!(ChainGroup::cyclic(2).rho_k(1).unwrap(), Ordinal::one());
        assert_eq!(ChainGroup::trivial(3).rho(), Ordinal::zero());
        assert_eq!(ChainGroup::cyclic(2).rho(), Ordinal::one());
        assert_eq!(s3.rho(), Ordinal::from(2));
        assert_eq!(s3.rho_profile(Strategy::Sequential), s3.rho_profile(Strategy::Parallel));
    }

    #[test]
    fn display_round_trip() {
        let s3 = ChainGroup::s3();
        assert_eq!(s3.to_string(), "[ (0 1 2), (0 1) ] > [ (0 1 2) ] > [ ]");
        let text = s3.to_string();
        let levels: Vec<&str> = text
            .split('>')
            .map(|l| l.trim().trim_start_matches('[').trim_end_matches(']'))
            .collect();
        assert_eq!(ChainGroup::parse_levels(3, &levels).unwrap(), s3);
    }

    #[test]
    fn generating_sets_are_small() {
        let s4 = closure(4, &[p("(0 1 2 3)", 4), p("(0 1)", 4)]).unwrap();
        let gens = generating_set(4, &s4, 100).unwrap();
        assert!(gens.len() <= 2);
        assert_eq!(closure(4, &gens).unwrap(), s4);
    }
}
