//! The line-oriented spec-file language.
//!
//! ```text
//! # comment
//! chain S3deg3 = [ (0 1 2), (0 1) ] > [ (0 1 2) ] > [ ]
//! chain Z4 degree 4 = [ (0 1 2 3) ] > [ (0 2) ] > [ ]
//! group W = wreath(powinf(atom(Z2)))
//! group L = prodinf(atom(Z4), Z; W)
//! ```
//!
//! `Z2` and `S3` are predefined chains. A bare name inside an expression
//! refers to another `group`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use orbit_rank::ordinal::Ordinal;
use orbit_rank::permgroup::{ChainGroup, GroupConfig, Perm};
use orbit_rank::symrank::{classify, ExampleKind, Factors, GroupExpr};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown name `{name}`")]
    UnknownName { line: usize, col: usize, name: String },
    #[error("{line}:{col}: `{name}` is already defined")]
    DuplicateName { line: usize, col: usize, name: String },
    #[error("{line}: invalid definition of `{name}`: {msg}")]
    Validation { line: usize, name: String, msg: String },
}

/// A permutation as written: its cycles.
pub type Cycles = Vec<Vec<u32>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainDef {
    pub name: String,
    pub degree: usize,
    /// Generators of each member, outermost first.
    pub levels: Vec<Vec<Cycles>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Args {
    List(Vec<Expr>),
    Tail(Vec<Expr>, Box<Expr>),
    Ladder(ExampleKind, Ordinal),
}

/// An unresolved expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Trivial,
    Z,
    Atom(String),
    Ref(String),
    Prod(Vec<Expr>),
    PowInf(Box<Expr>),
    ProdInf(Args),
    Wreath(Box<Expr>),
    Restricted(Args),
    Example(ExampleKind, Ordinal),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupDef {
    pub name: String,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Chain(ChainDef),
    Group(GroupDef),
}

/// A parsed and validated spec file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecFile {
    pub items: Vec<Item>,
    chains: BTreeMap<String, ChainGroup>,
    groups: BTreeMap<String, GroupExpr>,
}

/// What a name refers to.
pub enum Definition<'a> {
    Chain(&'a ChainGroup),
    Group(&'a GroupExpr),
}

impl SpecFile {
    pub fn chain(&self, name: &str) -> Option<&ChainGroup> {
        self.chains.get(name)
    }

    pub fn group(&self, name: &str) -> Option<&GroupExpr> {
        self.groups.get(name)
    }

    pub fn lookup(&self, name: &str) -> Option<Definition<'_>> {
        self.chain(name)
            .map(Definition::Chain)
            .or_else(|| self.group(name).map(Definition::Group))
    }

    /// User-defined chains in file order.
    pub fn chains(&self) -> Vec<(String, ChainGroup)> {
        self.items
            .iter()
            .filter_map(|i| match i {
                Item::Chain(c) => Some((c.name.clone(), self.chains[&c.name].clone())),
                Item::Group(_) => None,
            })
            .collect()
    }
}

pub fn builtin_chain(name: &str) -> Option<ChainGroup> {
    match name {
        "Z2" => Some(ChainGroup::cyclic(2)),
        "S3" => Some(ChainGroup::s3()),
        _ => None,
    }
}

pub fn parse_spec(text: &str) -> Result<SpecFile, SpecError> {
    parse_spec_with(text, &GroupConfig::default())
}

/// A reference met while parsing, for later resolution.
struct Use {
    name: String,
    line: usize,
    col: usize,
    chain: bool,
}

pub fn parse_spec_with(text: &str, config: &GroupConfig) -> Result<SpecFile, SpecError> {
    let mut items = Vec::new();
    let mut lines: HashMap<String, usize> = HashMap::new();
    let mut uses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut p = Parser::new(raw, line);
        p.skip_ws();
        if p.at_end() {
            continue;
        }
        let col = p.col();
        let keyword = p.ident()?;
        p.skip_ws();
        let name_col = p.col();
        let name = p.ident()?;
        if lines.insert(name.clone(), line).is_some() {
            return Err(SpecError::DuplicateName { line, col: name_col, name });
        }
        let item = match keyword.as_str() {
            "chain" => Item::Chain(p.chain_body(name)?),
            "group" => {
                p.skip_ws();
                p.expect('=')?;
                let expr = p.expr(&mut uses)?;
                Item::Group(GroupDef { name, expr })
            }
            other => return Err(p.error_at(col, format!("expected `chain` or `group`, found `{other}`"))),
        };
        p.skip_ws();
        if !p.at_end() {
            return Err(p.error("unexpected trailing input"));
        }
        items.push(item);
    }

    let mut chains = BTreeMap::new();
    let mut exprs = HashMap::new();
    for item in &items {
        match item {
            Item::Chain(def) => {
                let chain = build_chain(def, config).map_err(|msg| SpecError::Validation {
                    line: lines[&def.name],
                    name: def.name.clone(),
                    msg,
                })?;
                chains.insert(def.name.clone(), chain);
            }
            Item::Group(def) => {
                exprs.insert(def.name.clone(), &def.expr);
            }
        }
    }
    for u in &uses {
        let known = if u.chain {
            chains.contains_key(&u.name) || builtin_chain(&u.name).is_some()
        } else {
            exprs.contains_key(&u.name)
        };
        if !known {
            return Err(SpecError::UnknownName { line: u.line, col: u.col, name: u.name.clone() });
        }
    }

    let mut groups = BTreeMap::new();
    for item in &items {
        if let Item::Group(def) = item {
            let mut resolver = Resolver { chains: &chains, exprs: &exprs, done: &mut groups, stack: Vec::new() };
            let line = lines[&def.name];
            let e = resolver.resolve(&def.name).map_err(|msg| SpecError::Validation { line, name: def.name.clone(), msg })?;
            classify(&e).map_err(|err| SpecError::Validation { line, name: def.name.clone(), msg: err.to_string() })?;
        }
    }
    Ok(SpecFile { items, chains, groups })
}

fn build_chain(def: &ChainDef, config: &GroupConfig) -> Result<ChainGroup, String> {
    let levels = def
        .levels
        .iter()
        .map(|level| level.iter().map(|c| Perm::from_cycles(def.degree, c)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    ChainGroup::with_config(def.degree, levels, *config).map_err(|e| e.to_string())
}

struct Resolver<'a> {
    chains: &'a BTreeMap<String, ChainGroup>,
    exprs: &'a HashMap<String, &'a Expr>,
    done: &'a mut BTreeMap<String, GroupExpr>,
    stack: Vec<String>,
}

impl Resolver<'_> {
    fn resolve(&mut self, name: &str) -> Result<GroupExpr, String> {
        if let Some(e) = self.done.get(name) {
            return Ok(e.clone());
        }
        if self.stack.iter().any(|n| n == name) {
            return Err(format!("cyclic definition through {}", self.stack.join(" -> ")));
        }
        self.stack.push(name.to_string());
        let expr = self.exprs[name];
        let e = self.expr(expr)?;
        self.stack.pop();
        self.done.insert(name.to_string(), e.clone());
        Ok(e)
    }

    fn list(&mut self, list: &[Expr]) -> Result<Vec<GroupExpr>, String> {
        list.iter().map(|e| self.expr(e)).collect()
    }

    fn factors(&mut self, args: &Args) -> Result<Factors, String> {
        Ok(match args {
            Args::List(list) => Factors::Finite(self.list(list)?),
            Args::Tail(head, tail) => Factors::Eventually { head: self.list(head)?, tail: Box::new(self.expr(tail)?) },
            Args::Ladder(kind, limit) => Factors::Ladder { kind: *kind, limit: limit.clone() },
        })
    }

    fn expr(&mut self, e: &Expr) -> Result<GroupExpr, String> {
        Ok(match e {
            Expr::Trivial => GroupExpr::Trivial,
            Expr::Z => GroupExpr::DiscreteInfinite,
            Expr::Atom(name) => {
                let chain = self.chains.get(name).cloned().or_else(|| builtin_chain(name)).expect("checked");
                GroupExpr::atom(name.clone(), chain)
            }
            Expr::Ref(name) => self.resolve(name)?,
            Expr::Prod(list) => GroupExpr::Prod(self.list(list)?),
            Expr::PowInf(inner) => GroupExpr::PowInf(Box::new(self.expr(inner)?)),
            Expr::ProdInf(args) => GroupExpr::ProdInf(self.factors(args)?),
            Expr::Wreath(inner) => GroupExpr::Wreath(Box::new(self.expr(inner)?)),
            Expr::Restricted(args) => GroupExpr::RestrictedProd(self.factors(args)?),
            Expr::Example(kind, alpha) => GroupExpr::Example(*kind, alpha.clone()),
        })
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Parser {
    fn new(text: &str, line: usize) -> Parser {
        let text = text.split('#').next().unwrap_or("");
        Parser { chars: text.chars().collect(), pos: 0, line }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn error_at(&self, col: usize, msg: impl Into<String>) -> SpecError {
        SpecError::Syntax { line: self.line, col, msg: msg.into() }
    }

    fn error(&self, msg: impl Into<String>) -> SpecError {
        self.error_at(self.col(), msg)
    }

    fn expect(&mut self, c: char) -> Result<(), SpecError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            let found = self.peek().map_or("end of line".to_string(), |f| format!("`{f}`"));
            Err(self.error(format!("expected `{c}`, found {found}")))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        let hit = self.peek() == Some(c);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn ident(&mut self) -> Result<String, SpecError> {
        self.skip_ws();
        let start = self.pos;
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
            return Err(self.error("expected a name"));
        }
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn number(&mut self) -> Result<u32, SpecError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| self.error_at(start + 1, "expected a number"))
    }

    /// `[degree N] = [ perms ] > [ perms ] > ...`
    fn chain_body(&mut self, name: String) -> Result<ChainDef, SpecError> {
        self.skip_ws();
        let mut degree = None;
        if self.peek() == Some('d') {
            let col = self.col();
            let word = self.ident()?;
            if word != "degree" {
                return Err(self.error_at(col, format!("expected `degree` or `=`, found `{word}`")));
            }
            let d = self.number()? as usize;
            if d == 0 {
                return Err(self.error("degree must be positive"));
            }
            degree = Some(d);
        }
        self.expect('=')?;
        let mut levels = vec![self.level()?];
        while self.eat('>') {
            levels.push(self.level()?);
        }
        let points = levels.iter().flatten().flatten().flatten().map(|&p| p as usize + 1).max().unwrap_or(1);
        let degree = match degree {
            Some(d) if d < points => {
                return Err(self.error_at(1, format!("point {} exceeds degree {d}", points - 1)));
            }
            Some(d) => d,
            None => points,
        };
        Ok(ChainDef { name, degree, levels })
    }

    fn level(&mut self) -> Result<Vec<Cycles>, SpecError> {
        self.expect('[')?;
        let mut perms = Vec::new();
        if self.eat(']') {
            return Ok(perms);
        }
        loop {
            perms.push(self.perm()?);
            if self.eat(']') {
                return Ok(perms);
            }
            self.expect(',')?;
        }
    }

    fn perm(&mut self) -> Result<Cycles, SpecError> {
        self.skip_ws();
        if self.peek() != Some('(') {
            return Err(self.error("expected a permutation in cycle notation"));
        }
        let mut cycles = Vec::new();
        while self.peek() == Some('(') {
            self.pos += 1;
            let mut cycle = Vec::new();
            loop {
                self.skip_ws();
                if self.peek() == Some(')') {
                    self.pos += 1;
                    break;
                }
                let col = self.col();
                let x = self.number()?;
                if cycle.contains(&x) {
                    return Err(self.error_at(col, format!("point {x} repeats in a cycle")));
                }
                cycle.push(x);
                self.eat(',');
            }
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            self.skip_ws();
        }
        Ok(cycles)
    }

    fn args(&mut self, uses: &mut Vec<Use>) -> Result<Vec<Expr>, SpecError> {
        let mut list = vec![self.expr(uses)?];
        while self.eat(',') {
            list.push(self.expr(uses)?);
        }
        Ok(list)
    }

    /// Raw text up to the `)` closing the current call.
    fn ordinal(&mut self) -> Result<Ordinal, SpecError> {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0;
        while let Some(c) = self.peek() {
            match c {
                '(' => depth += 1,
                ')' if depth == 0 => break,
                ')' => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.trim().parse().map_err(|e| self.error_at(start + 1, format!("bad ordinal `{}`: {e}", text.trim())))
    }

    fn kind(&mut self) -> Result<ExampleKind, SpecError> {
        self.skip_ws();
        let col = self.col();
        match self.ident()?.as_str() {
            "G" => Ok(ExampleKind::G),
            "H" => Ok(ExampleKind::H),
            other => Err(self.error_at(col, format!("expected `G` or `H`, found `{other}`"))),
        }
    }

    fn factor_args(&mut self, uses: &mut Vec<Use>) -> Result<Args, SpecError> {
        self.skip_ws();
        let save = self.pos;
        if self.ident().ok().as_deref() == Some("ladder") && self.eat('(') {
            let kind = self.kind()?;
            self.expect(',')?;
            let limit = self.ordinal()?;
            self.expect(')')?;
            return Ok(Args::Ladder(kind, limit));
        }
        self.pos = save;
        let head = self.args(uses)?;
        if self.eat(';') {
            let tail = self.expr(uses)?;
            return Ok(Args::Tail(head, Box::new(tail)));
        }
        Ok(Args::List(head))
    }

    fn expr(&mut self, uses: &mut Vec<Use>) -> Result<Expr, SpecError> {
        self.skip_ws();
        let col = self.col();
        let word = self.ident()?;
        let call = |p: &mut Parser| p.eat('(');
        let e = match word.as_str() {
            "trivial" => Expr::Trivial,
            "Z" => Expr::Z,
            "atom" | "prod" | "powinf" | "prodinf" | "wreath" | "restricted" | "example" => {
                if !call(self) {
                    return Err(self.error(format!("expected `(` after `{word}`")));
                }
                let e = match word.as_str() {
                    "atom" => {
                        self.skip_ws();
                        let col = self.col();
                        let name = self.ident()?;
                        uses.push(Use { name: name.clone(), line: self.line, col, chain: true });
                        Expr::Atom(name)
                    }
                    "prod" => Expr::Prod(self.args(uses)?),
                    "powinf" => Expr::PowInf(Box::new(self.expr(uses)?)),
                    "wreath" => Expr::Wreath(Box::new(self.expr(uses)?)),
                    "prodinf" => Expr::ProdInf(self.factor_args(uses)?),
                    "restricted" => Expr::Restricted(self.factor_args(uses)?),
                    _ => {
                        let kind = self.kind()?;
                        self.expect(',')?;
                        Expr::Example(kind, self.ordinal()?)
                    }
                };
                self.expect(')')?;
                e
            }
            _ => {
                uses.push(Use { name: word.clone(), line: self.line, col, chain: false });
                Expr::Ref(word)
            }
        };
        Ok(e)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, list: &[Expr]) -> fmt::Result {
    for (i, e) in list.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{e}")?;
    }
    Ok(())
}

impl fmt::Display for Args {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Args::List(list) => write_list(f, list),
            Args::Tail(head, tail) => {
                write_list(f, head)?;
                write!(f, "; {tail}")
            }
            Args::Ladder(kind, limit) => write!(f, "ladder({kind}, {limit})"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Trivial => f.write_str("trivial"),
            Expr::Z => f.write_str("Z"),
            Expr::Atom(name) => write!(f, "atom({name})"),
            Expr::Ref(name) => f.write_str(name),
            Expr::Prod(list) => {
                f.write_str("prod(")?;
                write_list(f, list)?;
                f.write_str(")")
            }
            Expr::PowInf(e) => write!(f, "powinf({e})"),
            Expr::ProdInf(a) => write!(f, "prodinf({a})"),
            Expr::Wreath(e) => write!(f, "wreath({e})"),
            Expr::Restricted(a) => write!(f, "restricted({a})"),
            Expr::Example(kind, alpha) => write!(f, "example({kind}, {alpha})"),
        }
    }
}

fn write_cycles(f: &mut fmt::Formatter<'_>, cycles: &Cycles) -> fmt::Result {
    if cycles.is_empty() {
        return f.write_str("()");
    }
    for c in cycles {
        let points: Vec<String> = c.iter().map(u32::to_string).collect();
        write!(f, "({})", points.join(" "))?;
    }
    Ok(())
}

impl fmt::Display for ChainDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chain {} degree {} = ", self.name, self.degree)?;
        for (n, level) in self.levels.iter().enumerate() {
            if n > 0 {
                f.write_str(" > ")?;
            }
            f.write_str("[ ")?;
            for (i, p) in level.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_cycles(f, p)?;
            }
            f.write_str(if level.is_empty() { "]" } else { " ]" })?;
        }
        Ok(())
    }
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            match item {
                Item::Chain(c) => writeln!(f, "{c}")?,
                Item::Group(g) => writeln!(f, "group {} = {}", g.name, g.expr)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_statement() {
        let spec = parse_spec("chain S3deg3 = [ (0 1 2),(0 1) ] > [ (0 1 2) ] > [ ]").unwrap();
        let g = spec.chain("S3deg3").unwrap();
        assert_eq!((g.degree(), g.order(0), g.order(1), g.order(2)), (3, 6, 3, 1));
    }

    #[test]
    fn group_statement() {
        let spec = parse_spec("group W = wreath(powinf(atom(Z2)))").unwrap();
        assert_eq!(spec.group("W").unwrap().to_string(), "wreath(powinf(atom(Z2)))");
    }

    #[test]
    fn diagnostics() {
        assert!(matches!(parse_spec("group W = atom(Q)"), Err(SpecError::UnknownName { line: 1, col: 16, .. })));
        assert!(matches!(parse_spec("group A = trivial\ngroup A = Z"), Err(SpecError::DuplicateName { line: 2, .. })));
        assert!(matches!(parse_spec("group A = prod(trivial"), Err(SpecError::Syntax { line: 1, col: 23, .. })));
        assert!(matches!(parse_spec("chain C = [ (0 1) ]"), Err(SpecError::Validation { .. })));
        assert!(matches!(parse_spec("group A = B\ngroup B = powinf(A)"), Err(SpecError::Validation { .. })));
        assert!(parse_spec("group A = wreath(powinf(Z))").is_ok());
        assert!(matches!(parse_spec("group A = restricted(Z, Z)"), Err(SpecError::Validation { .. })));
    }

    #[test]
    fn factor_forms() {
        let spec = parse_spec(
            "group A = prodinf(atom(Z2), Z; example(H, w*2))\n\
             group B = restricted(ladder(G, w^2))\n\
             group C = prodinf(A, B)",
        )
        .unwrap();
        assert_eq!(spec.group("A").unwrap().to_string(), "prodinf(atom(Z2), Z; example(H, w*2))");
        assert_eq!(spec.group("B").unwrap().to_string(), "restricted(ladder(G, w^2))");
        assert!(matches!(spec.group("C"), Some(GroupExpr::ProdInf(Factors::Finite(l))) if l.len() == 2));
    }

    #[test]
    fn print_parse_round_trip() {
        let text = "# test\nchain C degree 5 = [ (0 1 2)(3 4), () ] > [ ]\n\ngroup A = prod(atom(C), powinf(atom(S3)))\ngroup B = prodinf(A; example(H, w))";
        let spec = parse_spec(text).unwrap();
        let printed = spec.to_string();
        assert_eq!(parse_spec(&printed).unwrap(), spec);
        assert_eq!(parse_spec(&printed).unwrap().to_string(), printed);
    }
}
