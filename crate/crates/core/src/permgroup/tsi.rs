use super::{ChainGroup, GroupError, Perm};

/// For chain index `k`, the least `m` with `g⁻¹ G_m g ⊆ G_k` for all `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsiWitness {
    pub k: usize,
    pub m: usize,
    /// Result of checking every conjugate of `G_m` against `G_k` directly.
    pub conjugates_inside: bool,
}

#[derive(Debug, Clone)]
pub struct TsiReport {
    /// Whether `G_n` is normal in `G_0`, per chain index.
    pub normal: Vec<bool>,
    pub witnesses: Vec<TsiWitness>,
    /// The chain of normal cores `core(G_k) = ⋂_g g G_k g⁻¹`, a normal chain
    /// below the given one.
    pub core_chain: ChainGroup,
}

impl TsiReport {
    pub fn all_normal(&self) -> bool {
        self.normal.iter().all(|&n| n)
    }

    /// Whether the core chain coincides with the given chain.
    pub fn core_is_identity(&self, group: &ChainGroup) -> bool {
        (0..group.len()).all(|n| group.elements(n) == self.core_chain.elements(n))
    }
}

fn conjugates_inside(group: &ChainGroup, m: usize, k: usize) -> bool {
    group.elements(0).iter().all(|g| {
        let inv = g.inverse();
        group.generators(m).iter().all(|s| group.contains(k, &inv.mul(s).mul(g)))
    })
}

fn normal_core(group: &ChainGroup, k: usize) -> Result<Vec<Perm>, GroupError> {
    let space = group.cosets(k)?;
    let conj: Vec<(Perm, &Perm)> = space.reps().iter().map(|r| (r.inverse(), r)).collect();
    Ok(group
        .elements(k)
        .iter()
        .filter(|h| conj.iter().all(|(ri, r)| group.contains(k, &ri.mul(h).mul(r))))
        .cloned()
        .collect())
}

pub fn tsi_check(group: &ChainGroup) -> TsiReport {
    let normal = (0..group.len())
        .map(|n| {
            group.generators(0).iter().all(|g| {
                let inv = g.inverse();
                group.generators(n).iter().all(|h| group.contains(n, &g.mul(h).mul(&inv)))
            })
        })
        .collect();
    let cores: Vec<Vec<Perm>> = (0..group.len())
        .map(|k| normal_core(group, k).expect("index in range"))
        .collect();
    let witnesses = (0..group.len())
        .map(|k| {
            let m = (0..group.len())
                .find(|&m| group.elements(m).iter().all(|g| cores[k].binary_search(g).is_ok()))
                .expect("the trivial member lies in every core");
            TsiWitness { k, m, conjugates_inside: conjugates_inside(group, m, k) }
        })
        .collect();
    let core_chain = ChainGroup::from_subgroups(group.degree(), cores, group.budget()).expect("cores form a chain");
    TsiReport { normal, witnesses, core_chain }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_chains_are_normal() {
        let z4 = ChainGroup::parse_levels(4, &["(0 1 2 3)", "(0 2)(1 3)", ""]).unwrap();
        let r = tsi_check(&z4);
        assert!(r.all_normal());
        assert!(r.core_is_identity(&z4));
        assert!(r.witnesses.iter().all(|w| w.m == w.k && w.conjugates_inside));
    }

    #[test]
    fn s3_chain_is_normal() {
        let s3 = ChainGroup::s3();
        assert!(tsi_check(&s3).all_normal());
    }

    #[test]
    fn non_normal_member_has_smaller_core() {
        let s4 = ChainGroup::parse_levels(4, &["(0 1 2 3), (0 1)", "(0 1)", ""]).unwrap();
        let r = tsi_check(&s4);
        assert_eq!(r.normal, vec![true, false, true]);
        assert!(!r.core_is_identity(&s4));
        assert_eq!(r.core_chain.order(1), 1);
        assert_eq!(r.witnesses[1], TsiWitness { k: 1, m: 2, conjugates_inside: true });
        assert!(!conjugates_inside(&s4, 1, 1));
    }
}
