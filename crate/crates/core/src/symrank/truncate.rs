use super::{build_example, Factors, GroupExpr, SymError};
use crate::permgroup::{ChainGroup, DEFAULT_MAX_GROUP_ORDER};

/// A finite chain group shadowing `e`: chains are cut at `depth`, countable
/// products keep their first `breadth` factors, and infinite discrete
/// groups become cyclic of order `breadth`.
pub fn truncate(e: &GroupExpr, depth: usize, breadth: usize) -> Result<ChainGroup, SymError> {
    truncate_with_budget(e, depth, breadth, DEFAULT_MAX_GROUP_ORDER)
}

pub fn truncate_with_budget(e: &GroupExpr, depth: usize, breadth: usize, budget: usize) -> Result<ChainGroup, SymError> {
    if depth == 0 || breadth == 0 {
        return Err(SymError::InvalidTruncation("depth and breadth must be positive".into()));
    }
    Shadow { depth, breadth, budget }.of(e)
}

struct Shadow {
    depth: usize,
    breadth: usize,
    budget: usize,
}

impl Shadow {
    fn of(&self, e: &GroupExpr) -> Result<ChainGroup, SymError> {
        Ok(match e {
            GroupExpr::Trivial => ChainGroup::trivial(1).rebudget(self.budget),
            GroupExpr::Atom { chain, .. } => chain.clone().rebudget(self.budget).cut(self.depth),
            GroupExpr::DiscreteInfinite => ChainGroup::cyclic(self.breadth).rebudget(self.budget).cut(self.depth),
            GroupExpr::Prod(list) => {
                let mut acc = ChainGroup::trivial(0).rebudget(self.budget);
                for f in list {
                    acc = acc.product_chain(&self.of(f)?)?;
                }
                acc
            }
            GroupExpr::PowInf(inner) => self.of(inner)?.power_chain(self.breadth)?,
            GroupExpr::ProdInf(fs) => ChainGroup::staggered_product(&self.factors(fs)?)?,
            GroupExpr::Wreath(inner) => self.of(inner)?.wreath_truncation(self.breadth)?,
            GroupExpr::RestrictedProd(fs) => ChainGroup::restricted_product(&self.factors(fs)?)?.cut(self.depth),
            GroupExpr::Example(kind, alpha) => self.of(&build_example(*kind, alpha)?)?,
        })
    }

    fn factors(&self, fs: &Factors) -> Result<Vec<ChainGroup>, SymError> {
        (0..self.breadth).map(|i| self.of(&fs.factor(i)?)).collect()
    }
}
