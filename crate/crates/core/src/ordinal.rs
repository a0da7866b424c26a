//! Countable ordinals below epsilon-zero in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `w^e1*c1 + w^e2*c2 + ...` with strictly
//! decreasing exponents `e1 > e2 > ...` (themselves ordinals) and positive
//! natural coefficients. The empty sum is zero. Every constructor and every
//! operation returns the canonical form, so structural equality coincides
//! with ordinal equality and the derived lexicographic order on the term
//! list coincides with the ordinal order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Default bound on the nesting depth of exponents accepted by the parser.
pub const DEFAULT_MAX_DEPTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Term {
    exp: Ordinal,
    coeff: u64,
}

/// An ordinal below epsilon-zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

/// Zero, successor or limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrdinalKind {
    Zero,
    Successor,
    Limit,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("ordinal syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("exponent nesting depth {depth} exceeds the configured bound {max}")]
    DepthExceeded { depth: usize, max: usize },
    #[error("coefficient overflow")]
    Overflow,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from(1u64)
    }

    /// The first infinite ordinal.
    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `w^exp`.
    pub fn omega_pow(exp: Ordinal) -> Self {
        Self::monomial(exp, 1)
    }

    /// `w^exp * coeff`; zero when `coeff == 0`.
    pub fn monomial(exp: Ordinal, coeff: u64) -> Self {
        if coeff == 0 {
            return Self::zero();
        }
        Ordinal {
            terms: vec![Term { exp, coeff }],
        }
    }

    /// Builds an ordinal from `(exponent, coefficient)` pairs given in any
    /// order by summing the monomials left to right. Zero coefficients are
    /// skipped.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Ordinal, u64)>,
    {
        terms
            .into_iter()
            .fold(Self::zero(), |acc, (e, c)| acc.add(&Self::monomial(e, c)))
    }

    /// The CNF terms, leading term first.
    pub fn terms(&self) -> impl Iterator<Item = (&Ordinal, u64)> {
        self.terms.iter().map(|t| (&t.exp, t.coeff))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.as_finite().is_some()
    }

    /// The natural number this ordinal equals, if finite.
    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exp.is_zero() => Some(t.coeff),
            _ => None,
        }
    }

    /// Exponent nesting depth: 0 for naturals, `1 + max depth(exponent)`
    /// otherwise.
    pub fn depth(&self) -> usize {
        if self.is_finite() {
            return 0;
        }
        1 + self.terms.iter().map(|t| t.exp.depth()).max().unwrap_or(0)
    }

    pub fn kind(&self) -> OrdinalKind {
        match self.terms.last() {
            None => OrdinalKind::Zero,
            Some(t) if t.exp.is_zero() => OrdinalKind::Successor,
            Some(_) => OrdinalKind::Limit,
        }
    }

    pub fn is_limit(&self) -> bool {
        self.kind() == OrdinalKind::Limit
    }

    /// Ordinal sum `self + rhs`. Terms of `self` below the leading exponent
    /// of `rhs` are absorbed.
    pub fn add(&self, rhs: &Ordinal) -> Ordinal {
        let Some(lead) = rhs.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let mut merged = None;
        for t in &self.terms {
            match t.exp.cmp(&lead.exp) {
                Ordering::Greater => terms.push(t.clone()),
                Ordering::Equal => merged = Some(t.coeff),
                Ordering::Less => break,
            }
        }
        let mut rest = rhs.terms.iter();
        let first = rest.next().expect("non-empty");
        terms.push(Term {
            exp: first.exp.clone(),
            coeff: first.coeff + merged.unwrap_or(0),
        });
        terms.extend(rest.cloned());
        Ordinal { terms }
    }

    /// `self + n` for a natural `n`.
    pub fn add_nat(&self, n: u64) -> Ordinal {
        self.add(&Ordinal::from(n))
    }

    pub fn succ(&self) -> Ordinal {
        self.add_nat(1)
    }

    /// The immediate predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Ordinal> {
        if self.kind() != OrdinalKind::Successor {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor has a finite tail");
        if last.coeff == 1 {
            terms.pop();
        } else {
            last.coeff -= 1;
        }
        Some(Ordinal { terms })
    }

    /// Left multiplication by omega: `w * self`, using
    /// `w * w^g * c = w^(1+g) * c` term by term.
    pub fn mul_omega(&self) -> Ordinal {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                exp: Ordinal::one().add(&t.exp),
                coeff: t.coeff,
            })
            .collect();
        Ordinal { terms }
    }

    /// The largest limit ordinal not exceeding `self`, or zero.
    pub fn limit_part(&self) -> Ordinal {
        let mut terms = self.terms.clone();
        if terms.last().is_some_and(|t| t.exp.is_zero()) {
            terms.pop();
        }
        Ordinal { terms }
    }

    /// The natural `m` with `self = limit_part(self) + m`.
    pub fn finite_part(&self) -> u64 {
        match self.terms.last() {
            Some(t) if t.exp.is_zero() => t.coeff,
            _ => 0,
        }
    }

    /// Maximum of a finite family; zero when empty.
    pub fn sup<'a, I>(items: I) -> Ordinal
    where
        I: IntoIterator<Item = &'a Ordinal>,
    {
        items.into_iter().max().cloned().unwrap_or_default()
    }

    /// The `i`-th element of the canonical fundamental sequence of a limit
    /// ordinal. With the last term written `w^g * c`, the prefix
    /// `... + w^g * (c-1)` is followed by `w^d * i` when `g = d + 1`, and by
    /// `w^(g[i])` when `g` is itself a limit. `None` for non-limits.
    pub fn fundamental(&self, i: u64) -> Option<Ordinal> {
        if !self.is_limit() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.pop().expect("limit is non-zero");
        if last.coeff > 1 {
            terms.push(Term {
                exp: last.exp.clone(),
                coeff: last.coeff - 1,
            });
        }
        let prefix = Ordinal { terms };
        let tail = match last.exp.pred() {
            Some(d) => Ordinal::monomial(d, i),
            None => Ordinal::omega_pow(last.exp.fundamental(i)?),
        };
        Some(prefix.add(&tail))
    }

    /// Parses with an explicit bound on exponent nesting depth.
    pub fn parse_with_depth(text: &str, max_depth: usize) -> Result<Ordinal, OrdinalError> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let value = p.sum()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        let depth = value.depth();
        if depth > max_depth {
            return Err(OrdinalError::DepthExceeded {
                depth,
                max: max_depth,
            });
        }
        Ok(value)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::monomial(Ordinal::zero(), n)
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ordinal::parse_with_depth(s, DEFAULT_MAX_DEPTH)
    }
}

fn fmt_exponent(exp: &Ordinal, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match exp.as_finite() {
        Some(1) => Ok(()),
        Some(n) => write!(f, "^{n}"),
        None => write!(f, "^({exp})"),
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if t.exp.is_zero() {
                write!(f, "{}", t.coeff)?;
                continue;
            }
            f.write_str("w")?;
            fmt_exponent(&t.exp, f)?;
            if t.coeff != 1 {
                write!(f, "*{}", t.coeff)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Nat(u64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Nat(n) => Ok(Ordinal::from(n)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

// sum   := term ('+' term)*
// term  := atom ('*' nat)?
// atom  := nat | 'w' ('^' (nat | 'w' | '(' sum ')'))?
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> OrdinalError {
        OrdinalError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<u64, OrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a natural number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| OrdinalError::Overflow)
    }

    fn sum(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            let next = self.term()?;
            acc = acc.add(&next);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, OrdinalError> {
        self.skip_ws();
        let (exp, mut coeff) = match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                let exp = if self.eat(b'^') {
                    self.skip_ws();
                    match self.peek() {
                        Some(b'(') => {
                            self.pos += 1;
                            let e = self.sum()?;
                            if !self.eat(b')') {
                                return Err(self.error("expected ')'"));
                            }
                            e
                        }
                        Some(b'w') => {
                            self.pos += 1;
                            Ordinal::omega()
                        }
                        _ => Ordinal::from(self.nat()?),
                    }
                } else {
                    Ordinal::one()
                };
                (exp, 1)
            }
            Some(c) if c.is_ascii_digit() => (Ordinal::zero(), self.nat()?),
            _ => return Err(self.error("expected a natural number or 'w'")),
        };
        while self.eat(b'*') {
            coeff = coeff.checked_mul(self.nat()?).ok_or(OrdinalError::Overflow)?;
        }
        Ok(Ordinal::monomial(exp, coeff))
    }
}
