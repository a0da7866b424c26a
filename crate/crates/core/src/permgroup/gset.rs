use std::collections::HashMap;

use super::chain::orbit_labels;
use super::{closure_with_budget, ChainGroup, GroupError, Perm};
use crate::eqseq::EqSeq;
use crate::ordinal::Ordinal;

/// A finite set `{0, ..., n - 1}` with an action of a chain group's `G_0`.
#[derive(Debug, Clone)]
pub struct GSet {
    points: usize,
    action: HashMap<Perm, Perm>,
}

impl GSet {
    /// Extends `g ↦ x` on the given generators to an action of `G_0`. The
    /// generators must generate `G_0` and the assignment must extend to a
    /// homomorphism, which holds exactly when the diagonal closure of the
    /// pairs `(g, x)` is no larger than `G_0`.
    pub fn new(group: &ChainGroup, points: usize, generators: Vec<(Perm, Perm)>) -> Result<GSet, GroupError> {
        let d = group.degree();
        let total = d + points;
        let mut diagonal = Vec::with_capacity(generators.len());
        for (g, x) in &generators {
            if g.degree() != d {
                return Err(GroupError::DegreeMismatch { expected: d, found: g.degree() });
            }
            if x.degree() != points {
                return Err(GroupError::DegreeMismatch { expected: points, found: x.degree() });
            }
            if !group.contains(0, g) {
                return Err(GroupError::InvalidAction(format!("{g} is not in the group")));
            }
            diagonal.push(g.embed(0, total).mul(&x.embed(d, total)));
        }
        let order = group.order(0);
        let combined = match closure_with_budget(total, &diagonal, order) {
            Ok(c) => c,
            Err(GroupError::BudgetExceeded { .. }) => {
                return Err(GroupError::InvalidAction("assignment is not a homomorphism".into()))
            }
            Err(e) => return Err(e),
        };
        if combined.len() != order {
            return Err(GroupError::InvalidAction("generators do not generate the group".into()));
        }
        let mut action = HashMap::with_capacity(order);
        for c in combined {
            let g = Perm::from_images(c.images()[..d].to_vec()).expect("diagonal restricts to a permutation");
            let x = c.images()[d..].iter().map(|&i| i - d as u32).collect();
            action.insert(g, Perm::from_images(x).expect("diagonal restricts to a permutation"));
        }
        Ok(GSet { points, action })
    }

    /// The group's own action on its `degree` points.
    pub fn natural(group: &ChainGroup) -> GSet {
        let action = group.elements(0).iter().map(|g| (g.clone(), g.clone())).collect();
        GSet { points: group.degree(), action }
    }

    /// `n` points, all fixed.
    pub fn trivial(group: &ChainGroup, n: usize) -> GSet {
        let id = Perm::identity(n);
        let action = group.elements(0).iter().map(|g| (g.clone(), id.clone())).collect();
        GSet { points: n, action }
    }

    /// Left multiplication on `G/G_k`.
    pub fn cosets(group: &ChainGroup, k: usize) -> Result<GSet, GroupError> {
        group.check_index(k)?;
        GSet::left_cosets(group, group.elements(k))
    }

    /// Left multiplication on `G_0/H` for a subgroup `H` given by its
    /// generators.
    pub fn left_cosets_of(group: &ChainGroup, h_gens: &[Perm]) -> Result<GSet, GroupError> {
        let h = super::closure_with_budget(group.degree(), h_gens, group.budget())?;
        if h.iter().any(|g| !group.contains(0, g)) {
            return Err(GroupError::NotASubgroup(0));
        }
        GSet::left_cosets(group, &h)
    }

    fn left_cosets(group: &ChainGroup, subgroup: &[Perm]) -> Result<GSet, GroupError> {
        let space = super::chain::CosetSpace::new(group.elements(0), subgroup);
        let action = group
            .elements(0)
            .iter()
            .map(|g| {
                let images = (0..space.len()).map(|c| space.act(g, c) as u32).collect();
                (g.clone(), Perm::from_images(images).expect("left multiplication permutes cosets"))
            })
            .collect();
        Ok(GSet { points: space.len(), action })
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    /// `g · x`; `None` when `g` is outside the acting group.
    pub fn act(&self, g: &Perm, x: usize) -> Option<usize> {
        self.action.get(g).map(|p| p.apply(x))
    }

    /// Orbit partitions of `G_n` for every chain member.
    pub fn eqseq(&self, group: &ChainGroup) -> Result<EqSeq, GroupError> {
        let labels = (0..group.len())
            .map(|n| {
                let gens: Vec<Perm> = group.generators(n).iter().map(|g| self.action[g].clone()).collect();
                orbit_labels(self.points, &gens, |p, x| p.apply(x))
            })
            .collect();
        Ok(EqSeq::from_labels((0..self.points as u64).collect(), labels)?)
    }
}

/// The stabilizer `G_x` with the least `k` such that `G_k ⊆ G_x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilizer {
    pub elements: Vec<Perm>,
    pub level: usize,
}

pub fn stabilizer(group: &ChainGroup, set: &GSet, x: usize) -> Stabilizer {
    let elements: Vec<Perm> = group
        .elements(0)
        .iter()
        .filter(|g| set.act(g, x) == Some(x))
        .cloned()
        .collect();
    let level = (0..group.len())
        .find(|&k| group.elements(k).iter().all(|g| elements.binary_search(g).is_ok()))
        .expect("the trivial member fixes every point");
    Stabilizer { elements, level }
}

/// Rank of the orbit tree of a `G`-set under the chain.
pub fn gset_rank(group: &ChainGroup, set: &GSet) -> Result<Ordinal, GroupError> {
    Ok(set.eqseq(group)?.orbit_tree().tree.rank())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, degree: usize) -> Perm {
        Perm::parse(s, degree).unwrap()
    }

    #[test]
    fn construction_checks_homomorphism() {
        let z2 = ChainGroup::cyclic(2);
        let swap = p("(0 1)", 2);
        let ok = GSet::new(&z2, 3, vec![(swap.clone(), p("(1 2)", 3))]).unwrap();
        assert_eq!(ok.act(&swap, 1), Some(2));
        let bad = GSet::new(&z2, 3, vec![(swap.clone(), p("(0 1 2)", 3))]);
        assert!(matches!(bad, Err(GroupError::InvalidAction(_))));
        let short = GSet::new(&ChainGroup::s3(), 2, vec![(p("(0 1)", 3), p("(0 1)", 2))]);
        assert!(matches!(short, Err(GroupError::InvalidAction(_))));
        // the sign character of S3
        let s3 = ChainGroup::s3();
        let sign = GSet::new(&s3, 2, vec![(p("(0 1 2)", 3), Perm::identity(2)), (p("(0 1)", 3), p("(0 1)", 2))]).unwrap();
        assert_eq!(sign.act(&p("(1 2)", 3), 0), Some(1));
        assert_eq!(gset_rank(&s3, &sign).unwrap(), Ordinal::one());
    }

    #[test]
    fn stabilizer_examples() {
        let s3 = ChainGroup::s3();
        let fixed = GSet::trivial(&s3, 2);
        assert_eq!(stabilizer(&s3, &fixed, 0), Stabilizer { elements: s3.elements(0).to_vec(), level: 0 });
        let z2 = ChainGroup::cyclic(2);
        let regular = GSet::cosets(&z2, 1).unwrap();
        let st = stabilizer(&z2, &regular, 1);
        assert_eq!((st.elements.len(), st.level), (1, z2.depth()));
        let st = stabilizer(&s3, &GSet::natural(&s3), 0);
        assert_eq!((st.elements.len(), st.level), (2, 2));
    }

    #[test]
    fn rank_examples() {
        let s3 = ChainGroup::s3();
        assert_eq!(gset_rank(&s3, &GSet::trivial(&s3, 4)).unwrap(), Ordinal::zero());
        for k in 0..s3.len() {
            assert_eq!(gset_rank(&s3, &GSet::cosets(&s3, k).unwrap()).unwrap(), s3.rho_k(k).unwrap());
        }
        let natural = gset_rank(&s3, &GSet::natural(&s3)).unwrap();
        assert!(natural <= s3.rho());
        assert_eq!(natural, Ordinal::from(2));
    }
}
