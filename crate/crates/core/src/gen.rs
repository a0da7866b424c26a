//! Seeded random instances for the property suite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eqseq::EqSeq;
use crate::ordinal::Ordinal;
use crate::permgroup::{closure_with_budget, ChainGroup, Perm};
use crate::wftree::{NodeRecord, WfTree};

/// Default sizes of generated groups.
pub const MAX_DEGREE: usize = 8;
pub const MAX_ORDER: usize = 2000;

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// An independent stream for trial `trial` of check `check`.
    pub fn for_trial(seed: u64, check: u64, trial: u64) -> Gen {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(check << 32 | trial);
        Gen { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn perm(&mut self, degree: usize) -> Perm {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        images.shuffle(&mut self.rng);
        Perm::from_images(images).expect("shuffle is a permutation")
    }

    /// A permutation moving at most `support` points.
    pub fn sparse_perm(&mut self, degree: usize, support: usize) -> Perm {
        let mut points: Vec<u32> = (0..degree as u32).collect();
        points.shuffle(&mut self.rng);
        let moved = &points[..support.min(degree)];
        let mut shuffled = moved.to_vec();
        shuffled.shuffle(&mut self.rng);
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for (a, b) in moved.iter().zip(&shuffled) {
            images[*a as usize] = *b;
        }
        Perm::from_images(images).expect("shuffle is a permutation")
    }

    /// Generators and sorted elements of a random group of order at most
    /// `max_order`.
    pub fn group(&mut self, max_degree: usize, max_order: usize) -> (usize, Vec<Perm>) {
        for _ in 0..64 {
            let degree = self.rng.gen_range(2..=max_degree.max(2));
            let count = self.rng.gen_range(1..=3);
            let gens: Vec<Perm> = (0..count)
                .map(|_| {
                    if self.rng.gen_bool(0.6) {
                        let support = self.rng.gen_range(2..=4);
                        self.sparse_perm(degree, support)
                    } else {
                        self.perm(degree)
                    }
                })
                .collect();
            if let Ok(elements) = closure_with_budget(degree, &gens, max_order) {
                if elements.len() > 1 {
                    return (degree, elements);
                }
            }
        }
        let c = ChainGroup::cyclic(max_degree.max(2));
        (c.degree(), c.elements(0).to_vec())
    }

    fn pick<'a>(&mut self, elements: &'a [Perm]) -> &'a Perm {
        &elements[self.rng.gen_range(0..elements.len())]
    }

    /// A random subgroup of the group with the given sorted elements.
    fn subgroup(&mut self, degree: usize, elements: &[Perm], budget: usize) -> Vec<Perm> {
        if self.rng.gen_bool(0.3) {
            let x = self.rng.gen_range(0..degree);
            return elements.iter().filter(|g| g.apply(x) == x).cloned().collect();
        }
        let count = if self.rng.gen_bool(0.7) { 1 } else { 2 };
        let gens: Vec<Perm> = (0..count).map(|_| self.pick(elements).clone()).collect();
        closure_with_budget(degree, &gens, budget).expect("subgroup of an enumerated group")
    }

    /// A random chain group of degree at most `max_degree` and order at most
    /// `max_order`, with at most `max_len` members.
    pub fn chain_group(&mut self, max_degree: usize, max_order: usize, max_len: usize) -> ChainGroup {
        let (degree, top) = self.group(max_degree, max_order);
        let mut levels = vec![top];
        while levels.len() + 1 < max_len.max(2) {
            let current = levels.last().expect("non-empty");
            if current.len() == 1 {
                break;
            }
            let mut next = self.subgroup(degree, current, max_order);
            if next.len() == current.len() && self.rng.gen_bool(0.7) {
                next = self.subgroup(degree, current, max_order);
            }
            levels.push(next);
        }
        if levels.last().is_some_and(|l| l.len() > 1) {
            levels.push(vec![Perm::identity(degree)]);
        }
        ChainGroup::from_subgroups(degree, levels, max_order).expect("generated chain is valid")
    }

    /// A random chain whose members are all normal in the first.
    pub fn normal_chain_group(&mut self, max_degree: usize, max_order: usize, max_len: usize) -> ChainGroup {
        let (degree, top) = self.group(max_degree, max_order);
        let outer = ChainGroup::from_subgroups(degree, vec![top.clone(), vec![Perm::identity(degree)]], max_order)
            .expect("two-member chain is valid");
        let outer_gens = outer.generators(0).to_vec();
        let mut levels = vec![top];
        while levels.len() + 1 < max_len.max(2) {
            let current = levels.last().expect("non-empty");
            if current.len() == 1 {
                break;
            }
            let seed = self.pick(current).clone();
            let next = normal_closure(degree, &outer_gens, vec![seed], max_order);
            if next.len() == current.len() && self.rng.gen_bool(0.5) {
                break;
            }
            levels.push(next);
        }
        if levels.last().is_some_and(|l| l.len() > 1) {
            levels.push(vec![Perm::identity(degree)]);
        }
        ChainGroup::from_subgroups(degree, levels, max_order).expect("generated chain is valid")
    }

    /// Generators of a random subgroup of `G_0`.
    pub fn subgroup_gens(&mut self, g: &ChainGroup) -> Vec<Perm> {
        let count = self.rng.gen_range(0..=2);
        (0..count).map(|_| self.pick(g.elements(0)).clone()).collect()
    }

    /// Generators of the normal closure in `G_0` of a random element.
    pub fn normal_subgroup_gens(&mut self, g: &ChainGroup) -> Vec<Perm> {
        if self.rng.gen_bool(0.15) {
            return Vec::new();
        }
        let seed = self.pick(g.elements(0)).clone();
        let n = normal_closure(g.degree(), g.generators(0), vec![seed], g.budget());
        ChainGroup::from_subgroups(g.degree(), vec![n, vec![Perm::identity(g.degree())]], g.budget())
            .expect("two-member chain is valid")
            .generators(0)
            .to_vec()
    }

    /// Two chains on one group admitting a common refinement: random
    /// subsequences of one random chain.
    pub fn compatible_pair(&mut self, max_degree: usize, max_order: usize) -> (ChainGroup, ChainGroup) {
        let g = self.chain_group(max_degree, max_order, 7);
        let pick = |gen: &mut Gen| -> ChainGroup {
            let mut levels = vec![g.elements(0).to_vec()];
            for n in 1..g.depth() {
                if gen.rng.gen_bool(0.5) {
                    levels.push(g.elements(n).to_vec());
                }
            }
            if g.depth() > 0 {
                levels.push(g.elements(g.depth()).to_vec());
            }
            ChainGroup::from_subgroups(g.degree(), levels, g.budget()).expect("subsequence of a chain")
        };
        (pick(self), pick(self))
    }

    /// A random forest of `1 ..= max_nodes` nodes with scattered ids.
    pub fn tree(&mut self, max_nodes: usize) -> WfTree {
        let n = self.rng.gen_range(1..=max_nodes.max(1));
        let mut records: Vec<NodeRecord> = Vec::with_capacity(n);
        for i in 0..n {
            let id = (i as u64) * 3 + 1;
            if i == 0 || self.rng.gen_bool(0.15) {
                records.push(NodeRecord::new(id, 0, None));
            } else {
                let p = self.rng.gen_range(0..i);
                let (pid, plevel) = (records[p].id, records[p].level);
                records.push(NodeRecord::new(id, plevel + 1, Some(pid)));
            }
        }
        records.shuffle(&mut self.rng);
        WfTree::validate(records).expect("generated forest is valid")
    }

    /// A random forest whose terminals carry ordinal weights below `ω^3`,
    /// at least one of them with a non-zero limit part.
    pub fn weighted_tree(&mut self, max_nodes: usize) -> WfTree {
        let base = self.tree(max_nodes);
        let terminals: Vec<u64> = base.ids().filter(|&id| base.children(id).next().is_none()).collect();
        let forced = terminals[self.rng.gen_range(0..terminals.len())];
        let records = base
            .records()
            .iter()
            .map(|r| {
                let mut r = r.clone();
                if terminals.contains(&r.id) && (r.id == forced || self.rng.gen_bool(0.4)) {
                    let mut w = self.ordinal_below_omega_cubed(3);
                    if r.id == forced && w.limit_part().is_zero() {
                        w = Ordinal::omega().add(&w);
                    }
                    r.weight = (!w.is_zero()).then_some(w);
                }
                r
            })
            .collect();
        WfTree::validate(records).expect("weights on terminals are valid")
    }

    /// Strictly increasing level indices drawn from `0 .. bound`, non-empty.
    pub fn indices(&mut self, bound: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..bound.max(1)).filter(|_| self.rng.gen_bool(0.6)).collect();
        if out.is_empty() {
            out.push(self.rng.gen_range(0..bound.max(1)));
        }
        out
    }

    /// A decreasing sequence of `1 ..= max_levels` partitions of
    /// `1 ..= max_points` points, discrete at the end.
    pub fn eqseq(&mut self, max_points: usize, max_levels: usize) -> EqSeq {
        let n = self.rng.gen_range(1..=max_points.max(1));
        let mut ids: Vec<u64> = (0..(3 * n) as u64).collect();
        ids.shuffle(&mut self.rng);
        let mut points: Vec<u64> = ids[..n].to_vec();
        points.sort_unstable();
        let levels = self.rng.gen_range(1..=max_levels.max(1));
        let classes = self.rng.gen_range(1..=n);
        let mut label: Vec<usize> = (0..n).map(|_| self.rng.gen_range(0..classes)).collect();
        let mut labels = vec![label.clone()];
        for _ in 1..levels {
            label = label.iter().map(|&l| 2 * l + usize::from(self.rng.gen_bool(0.35))).collect();
            labels.push(label.clone());
        }
        labels.push((0..n).collect());
        EqSeq::from_labels(points, labels).expect("refinements decrease")
    }

    /// `ω²·a + ω·b + c` with coefficients below `bound`.
    pub fn ordinal_below_omega_cubed(&mut self, bound: u64) -> Ordinal {
        let mut c = || self.rng.gen_range(0..bound.max(1));
        let (a, b, n) = (c(), c(), c());
        Ordinal::from_terms([
            (Ordinal::from(2), a),
            (Ordinal::one(), b),
            (Ordinal::zero(), n),
        ])
    }
}

/// The smallest subgroup normal under `outer` containing `seeds`.
pub fn normal_closure(degree: usize, outer: &[Perm], seeds: Vec<Perm>, budget: usize) -> Vec<Perm> {
    let mut gens = seeds;
    loop {
        let n = closure_with_budget(degree, &gens, budget).expect("inside an enumerated group");
        let extra: Vec<Perm> = outer
            .iter()
            .flat_map(|s| gens.iter().map(move |x| s.mul(x).mul(&s.inverse())))
            .filter(|c| n.binary_search(c).is_err())
            .collect();
        if extra.is_empty() {
            return n;
        }
        gens.extend(extra);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::tsi_check;

    #[test]
    fn deterministic_streams() {
        let a = Gen::for_trial(7, 1, 2).chain_group(MAX_DEGREE, MAX_ORDER, 6);
        let b = Gen::for_trial(7, 1, 2).chain_group(MAX_DEGREE, MAX_ORDER, 6);
        assert_eq!(a, b);
    }

    #[test]
    fn generated_instances_are_valid() {
        let mut g = Gen::new(3);
        for _ in 0..30 {
            let c = g.chain_group(MAX_DEGREE, MAX_ORDER, 6);
            assert!(c.order(0) <= MAX_ORDER && c.degree() <= MAX_DEGREE);
            assert_eq!(c.order(c.depth()), 1);
            assert!(tsi_check(&g.normal_chain_group(MAX_DEGREE, MAX_ORDER, 5)).all_normal());
            let n = g.normal_subgroup_gens(&c);
            assert!(c.quotient_chain(&n).is_ok());
            let (a, b) = g.compatible_pair(6, 500);
            assert!(crate::permgroup::interleave_chains(&a, &b).is_ok());
            let t = g.weighted_tree(40);
            assert!(t.len() <= 40 && t.rank().limit_part() > Ordinal::zero());
            let e = g.eqseq(6, 5);
            assert!(e.points().len() <= 6);
        }
    }
}
