//! Symbolic group expressions and their `(rank, tight)` classification.

mod truncate;

pub use truncate::{truncate, truncate_with_budget};

use std::fmt;

use thiserror::Error;

use crate::ordinal::{Ordinal, DEFAULT_MAX_DEPTH};
use crate::permgroup::{ChainGroup, GroupError};

/// Largest finite part accepted by [`build_example`]; each unit adds one
/// level of expression nesting.
pub const MAX_SUCCESSOR_STEPS: u64 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymError {
    #[error("wreath operand {0} is neither (a, not tight) nor (a+1, tight)")]
    WreathOperandUnsupported(String),
    #[error("restricted product hypothesis fails: {0}")]
    LimitHypothesisFails(String),
    #[error("ordinal {0} exceeds the construction budget")]
    DepthBudgetExceeded(Ordinal),
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Which of the two witness families an example belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExampleKind {
    /// `G_α`: rank `α`, not `α`-CLI.
    G,
    /// `H_α`: rank `α`, `α`-CLI.
    H,
}

impl fmt::Display for ExampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExampleKind::G => "G",
            ExampleKind::H => "H",
        })
    }
}

/// The factor sequence of a countable product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Factors {
    /// Finitely many factors, the rest trivial.
    Finite(Vec<GroupExpr>),
    /// `head` followed by infinitely many copies of `tail`.
    Eventually { head: Vec<GroupExpr>, tail: Box<GroupExpr> },
    /// The examples of the given kind along the fundamental sequence of a
    /// limit ordinal.
    Ladder { kind: ExampleKind, limit: Ordinal },
}

impl Factors {
    /// The `i`-th factor.
    pub fn factor(&self, i: usize) -> Result<GroupExpr, SymError> {
        match self {
            Factors::Finite(list) => Ok(list.get(i).cloned().unwrap_or(GroupExpr::Trivial)),
            Factors::Eventually { head, tail } => Ok(head.get(i).cloned().unwrap_or_else(|| (**tail).clone())),
            Factors::Ladder { kind, limit } => {
                let a = limit
                    .fundamental(i as u64)
                    .ok_or_else(|| SymError::LimitHypothesisFails(format!("{limit} is not a limit ordinal")))?;
                build_example(*kind, &a)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupExpr {
    Trivial,
    /// A finite group with its chain; discrete, so rank 0.
    Atom { name: String, chain: ChainGroup },
    /// A countably infinite discrete group such as the integers.
    DiscreteInfinite,
    Prod(Vec<GroupExpr>),
    /// `G^ω`.
    PowInf(Box<GroupExpr>),
    ProdInf(Factors),
    /// `Λ ≀ G` with `Λ` infinite discrete.
    Wreath(Box<GroupExpr>),
    /// The subgroup of `∏ G^i` of sequences eventually in `G^i_1`.
    RestrictedProd(Factors),
    Example(ExampleKind, Ordinal),
}

impl GroupExpr {
    pub fn atom(name: impl Into<String>, chain: ChainGroup) -> GroupExpr {
        GroupExpr::Atom { name: name.into(), chain }
    }

    /// The atom `Z2` with chain `[C_2, {1}]`.
    pub fn z2() -> GroupExpr {
        GroupExpr::atom("Z2", ChainGroup::cyclic(2))
    }

    pub fn pow_inf(e: GroupExpr) -> GroupExpr {
        GroupExpr::PowInf(Box::new(e))
    }

    pub fn wreath(e: GroupExpr) -> GroupExpr {
        GroupExpr::Wreath(Box::new(e))
    }
}

/// `rank` with whether `ρ = ω·rank` exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Classification {
    pub rank: Ordinal,
    pub tight: bool,
}

impl Classification {
    pub fn new(rank: Ordinal, tight: bool) -> Classification {
        Classification { rank, tight }
    }

    /// `ρ ≤ ω·α`.
    pub fn is_alpha_cli(&self, alpha: &Ordinal) -> bool {
        self.rank < *alpha || (self.rank == *alpha && self.tight)
    }

    /// `rank ≤ α`.
    pub fn is_l_alpha_cli(&self, alpha: &Ordinal) -> bool {
        let l = self.rank <= *alpha;
        debug_assert!(!l || self.is_alpha_cli(&alpha.succ()));
        l
    }

    /// The least `α` with the group `α`-CLI.
    pub fn least_cli(&self) -> Ordinal {
        if self.tight {
            self.rank.clone()
        } else {
            self.rank.succ()
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.rank, if self.tight { "tight" } else { "not tight" })
    }
}

pub fn classify(e: &GroupExpr) -> Result<Classification, SymError> {
    use GroupExpr::*;
    Ok(match e {
        Trivial => Classification::new(Ordinal::zero(), true),
        Atom { chain, .. } => Classification::new(Ordinal::zero(), chain.order(0) == 1),
        DiscreteInfinite => Classification::new(Ordinal::zero(), false),
        Prod(list) => {
            let cs = list.iter().map(classify).collect::<Result<Vec<_>, _>>()?;
            let rank = Ordinal::sup(cs.iter().map(|c| &c.rank));
            let tight = cs.iter().filter(|c| c.rank == rank).all(|c| c.tight);
            Classification::new(rank, tight)
        }
        PowInf(inner) => classify_product(&[], Some(&classify(inner)?)),
        ProdInf(Factors::Finite(list)) => {
            let cs = list.iter().map(classify).collect::<Result<Vec<_>, _>>()?;
            classify_product(&cs, Some(&Classification::new(Ordinal::zero(), true)))
        }
        ProdInf(Factors::Eventually { head, tail }) => {
            let cs = head.iter().map(classify).collect::<Result<Vec<_>, _>>()?;
            classify_product(&cs, Some(&classify(tail)?))
        }
        ProdInf(Factors::Ladder { limit, .. }) => {
            check_ladder(limit)?;
            Classification::new(limit.clone(), true)
        }
        Wreath(inner) => {
            let c = classify(inner)?;
            let supported = !c.tight || c.rank.pred().is_some();
            if !supported {
                return Err(SymError::WreathOperandUnsupported(c.to_string()));
            }
            let rank = if c.tight { c.rank } else { c.rank.succ() };
            Classification::new(rank, false)
        }
        RestrictedProd(Factors::Ladder { limit, .. }) => {
            check_ladder(limit)?;
            Classification::new(limit.clone(), false)
        }
        RestrictedProd(_) => {
            return Err(SymError::LimitHypothesisFails(
                "factor ranks must increase strictly to a limit ordinal".into(),
            ))
        }
        Example(kind, alpha) => Classification::new(alpha.clone(), *kind == ExampleKind::H),
    })
}

/// `∏ G^i` with finitely many `head` factors then copies of `tail`: the
/// rank is the least `α` bounding every factor rank such that all tail
/// copies are `α`-CLI, and the product is `α`-CLI iff every factor is.
fn classify_product(head: &[Classification], tail: Option<&Classification>) -> Classification {
    let mut rank = Ordinal::sup(head.iter().map(|c| &c.rank));
    if let Some(t) = tail {
        rank = rank.max(t.least_cli());
    }
    let tight = head.iter().chain(tail).all(|c| c.is_alpha_cli(&rank));
    Classification::new(rank, tight)
}

fn check_ladder(limit: &Ordinal) -> Result<(), SymError> {
    if limit.is_limit() {
        Ok(())
    } else {
        Err(SymError::LimitHypothesisFails(format!("{limit} is not a limit ordinal")))
    }
}

pub fn is_alpha_cli(e: &GroupExpr, alpha: &Ordinal) -> Result<bool, SymError> {
    Ok(classify(e)?.is_alpha_cli(alpha))
}

pub fn is_l_alpha_cli(e: &GroupExpr, alpha: &Ordinal) -> Result<bool, SymError> {
    Ok(classify(e)?.is_l_alpha_cli(alpha))
}

/// The witness `G_α` or `H_α`, expanded one constructor deep at each
/// successor step; limits become ladders whose factors expand on demand.
pub fn build_example(kind: ExampleKind, alpha: &Ordinal) -> Result<GroupExpr, SymError> {
    if alpha.depth() > DEFAULT_MAX_DEPTH || alpha.finite_part() > MAX_SUCCESSOR_STEPS {
        return Err(SymError::DepthBudgetExceeded(alpha.clone()));
    }
    Ok(match (kind, alpha.pred()) {
        (ExampleKind::H, _) if alpha.is_zero() => GroupExpr::Trivial,
        (ExampleKind::G, _) if alpha.is_zero() => GroupExpr::z2(),
        (ExampleKind::H, Some(beta)) => GroupExpr::pow_inf(build_example(ExampleKind::G, &beta)?),
        (ExampleKind::G, Some(_)) => GroupExpr::wreath(build_example(ExampleKind::H, alpha)?),
        (ExampleKind::H, None) => GroupExpr::ProdInf(Factors::Ladder { kind: ExampleKind::G, limit: alpha.clone() }),
        (ExampleKind::G, None) => {
            GroupExpr::RestrictedProd(Factors::Ladder { kind: ExampleKind::G, limit: alpha.clone() })
        }
    })
}

fn write_list(f: &mut fmt::Formatter<'_>, list: &[GroupExpr]) -> fmt::Result {
    for (i, e) in list.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{e}")?;
    }
    Ok(())
}

impl fmt::Display for Factors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factors::Finite(list) => write_list(f, list),
            Factors::Eventually { head, tail } => {
                write_list(f, head)?;
                write!(f, "; {tail}")
            }
            Factors::Ladder { kind, limit } => write!(f, "ladder({kind}, {limit})"),
        }
    }
}

impl fmt::Display for GroupExpr {
    /// The expression syntax of spec files.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupExpr::Trivial => f.write_str("trivial"),
            GroupExpr::Atom { name, .. } => write!(f, "atom({name})"),
            GroupExpr::DiscreteInfinite => f.write_str("Z"),
            GroupExpr::Prod(list) => {
                f.write_str("prod(")?;
                write_list(f, list)?;
                f.write_str(")")
            }
            GroupExpr::PowInf(e) => write!(f, "powinf({e})"),
            GroupExpr::ProdInf(fs) => write!(f, "prodinf({fs})"),
            GroupExpr::Wreath(e) => write!(f, "wreath({e})"),
            GroupExpr::RestrictedProd(fs) => write!(f, "restricted({fs})"),
            GroupExpr::Example(kind, alpha) => write!(f, "example({kind}, {alpha})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn c(rank: &str, tight: bool) -> Classification {
        Classification::new(o(rank), tight)
    }

    #[test]
    fn base_classifications() {
        assert_eq!(classify(&GroupExpr::Trivial).unwrap(), c("0", true));
        assert_eq!(classify(&GroupExpr::z2()).unwrap(), c("0", false));
        assert_eq!(classify(&GroupExpr::atom("one", ChainGroup::trivial(2))).unwrap(), c("0", true));
        assert_eq!(classify(&GroupExpr::DiscreteInfinite).unwrap(), c("0", false));
        assert_eq!(classify(&GroupExpr::pow_inf(GroupExpr::z2())).unwrap(), c("1", true));
        assert_eq!(classify(&GroupExpr::pow_inf(GroupExpr::Trivial)).unwrap(), c("0", true));
        assert_eq!(classify(&GroupExpr::wreath(GroupExpr::pow_inf(GroupExpr::z2()))).unwrap(), c("1", false));
        assert_eq!(classify(&GroupExpr::wreath(GroupExpr::DiscreteInfinite)).unwrap(), c("1", false));
    }

    #[test]
    fn product_rules() {
        let two = GroupExpr::Example(ExampleKind::H, o("2"));
        let one = GroupExpr::Example(ExampleKind::G, o("1"));
        assert_eq!(classify(&GroupExpr::Prod(vec![two.clone(), one.clone()])).unwrap(), c("2", true));
        assert_eq!(classify(&GroupExpr::Prod(vec![one.clone(), two.clone()])).unwrap(), c("2", true));
        let g2 = GroupExpr::Example(ExampleKind::G, o("2"));
        assert_eq!(classify(&GroupExpr::Prod(vec![two.clone(), g2])).unwrap(), c("2", false));
        assert_eq!(classify(&GroupExpr::Prod(vec![])).unwrap(), c("0", true));
        let pair = GroupExpr::Prod(vec![one.clone(), GroupExpr::Trivial]);
        assert_eq!(classify(&pair).unwrap(), classify(&one).unwrap());

        let head_only = GroupExpr::ProdInf(Factors::Eventually { head: vec![one.clone()], tail: Box::new(GroupExpr::Trivial) });
        assert_eq!(classify(&head_only).unwrap(), c("1", false));
        let mixed = GroupExpr::ProdInf(Factors::Eventually { head: vec![one.clone()], tail: Box::new(two.clone()) });
        assert_eq!(classify(&mixed).unwrap(), c("2", true));
        let finite = GroupExpr::ProdInf(Factors::Finite(vec![two]));
        assert_eq!(classify(&finite).unwrap(), c("2", true));
    }

    #[test]
    fn unsupported_forms() {
        let limit = GroupExpr::Example(ExampleKind::H, o("w"));
        assert!(matches!(classify(&GroupExpr::wreath(limit)), Err(SymError::WreathOperandUnsupported(_))));
        assert!(matches!(classify(&GroupExpr::wreath(GroupExpr::Trivial)), Err(SymError::WreathOperandUnsupported(_))));
        let finite = GroupExpr::RestrictedProd(Factors::Finite(vec![GroupExpr::z2()]));
        assert!(matches!(classify(&finite), Err(SymError::LimitHypothesisFails(_))));
        let ladder = GroupExpr::RestrictedProd(Factors::Ladder { kind: ExampleKind::G, limit: o("w+1") });
        assert!(matches!(classify(&ladder), Err(SymError::LimitHypothesisFails(_))));
    }

    #[test]
    fn cli_verdicts() {
        let zero = Ordinal::zero();
        assert!(is_alpha_cli(&GroupExpr::Trivial, &zero).unwrap());
        assert!(!is_alpha_cli(&GroupExpr::z2(), &zero).unwrap());
        assert!(is_l_alpha_cli(&GroupExpr::z2(), &zero).unwrap());
        let g = GroupExpr::Example(ExampleKind::G, o("w"));
        assert!(!is_alpha_cli(&g, &o("w")).unwrap());
        assert!(is_l_alpha_cli(&g, &o("w")).unwrap());
        assert!(is_alpha_cli(&g, &o("w+1")).unwrap());
    }

    #[test]
    fn examples_classify_as_designed() {
        for a in ["0", "1", "2", "3", "w", "w+1", "w*2", "w^2", "w^w+3"] {
            let a = o(a);
            let h = build_example(ExampleKind::H, &a).unwrap();
            let g = build_example(ExampleKind::G, &a).unwrap();
            assert_eq!(classify(&h).unwrap(), Classification::new(a.clone(), true), "H {a}");
            assert_eq!(classify(&g).unwrap(), Classification::new(a.clone(), false), "G {a}");
        }
    }

    #[test]
    fn example_shapes() {
        assert_eq!(build_example(ExampleKind::H, &o("0")).unwrap(), GroupExpr::Trivial);
        assert_eq!(
            build_example(ExampleKind::G, &o("1")).unwrap(),
            GroupExpr::wreath(GroupExpr::pow_inf(GroupExpr::z2()))
        );
        let h = build_example(ExampleKind::H, &o("w")).unwrap();
        assert_eq!(h, GroupExpr::ProdInf(Factors::Ladder { kind: ExampleKind::G, limit: o("w") }));
        if let GroupExpr::ProdInf(fs) = &h {
            assert_eq!(fs.factor(3).unwrap(), build_example(ExampleKind::G, &o("3")).unwrap());
        }
        assert!(matches!(build_example(ExampleKind::G, &o("65")), Err(SymError::DepthBudgetExceeded(_))));
    }

    #[test]
    fn display_syntax() {
        let g = build_example(ExampleKind::G, &o("w+1")).unwrap();
        assert_eq!(g.to_string(), "wreath(powinf(restricted(ladder(G, w))))");
        let e = GroupExpr::ProdInf(Factors::Eventually {
            head: vec![GroupExpr::z2(), GroupExpr::DiscreteInfinite],
            tail: Box::new(GroupExpr::Example(ExampleKind::H, o("w*2"))),
        });
        assert_eq!(e.to_string(), "prodinf(atom(Z2), Z; example(H, w*2))");
    }
}
