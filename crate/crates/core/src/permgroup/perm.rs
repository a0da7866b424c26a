use std::fmt;
use std::str::FromStr;

use super::GroupError;

/// A permutation of `{0, ..., degree - 1}` stored as its image list.
///
/// The derived order is lexicographic on image lists; it is the fixed total
/// order used to pick canonical coset representatives.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Box<[u32]>);

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm((0..degree as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Perm, GroupError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            match seen.get_mut(i as usize) {
                Some(s) if !*s => *s = true,
                _ => return Err(GroupError::NotAPermutation(format!("{images:?}"))),
            }
        }
        Ok(Perm(images.into_boxed_slice()))
    }

    /// Builds a permutation of the given degree from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<u32>]) -> Result<Perm, GroupError> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let b = cycle[(k + 1) % cycle.len()];
                let (ai, bi) = (a as usize, b as usize);
                if ai >= degree || bi >= degree || touched[ai] {
                    return Err(GroupError::NotAPermutation(format!("{cycles:?}")));
                }
                touched[ai] = true;
                images[ai] = b;
            }
        }
        Ok(Perm(images.into_boxed_slice()))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self * rhs`, the map `x ↦ self(rhs(x))`.
    pub fn mul(&self, rhs: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), rhs.degree());
        Perm(rhs.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv.into_boxed_slice())
    }

    /// `self^-1 * h * self`.
    pub fn conjugate(&self, h: &Perm) -> Perm {
        self.inverse().mul(h).mul(self)
    }

    /// This permutation acting on `offset .. offset + degree` inside a
    /// permutation of `total` points, fixing everything else.
    pub fn embed(&self, offset: usize, total: usize) -> Perm {
        let mut images: Vec<u32> = (0..total as u32).collect();
        for (i, &x) in self.0.iter().enumerate() {
            images[offset + i] = offset as u32 + x;
        }
        Perm(images.into_boxed_slice())
    }

    /// Disjoint cycles of length at least two, each starting at its least
    /// point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                cycle.push(cur as u32);
                cur = self.0[cur] as usize;
            }
            out.push(cycle);
        }
        out
    }

    /// Parses cycle notation `(0 1 2)(3 4)` (identity `()`), or an image
    /// list `[1, 0, 2]`. Cycle notation needs the degree; an image list
    /// determines its own.
    pub fn parse(text: &str, degree: usize) -> Result<Perm, GroupError> {
        let t = text.trim();
        if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let images = inner
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| GroupError::NotAPermutation(text.to_string()))?;
            return Perm::from_images(images);
        }
        Perm::from_cycles(degree, &parse_cycles(t)?)
    }
}

/// Splits cycle notation into its cycles without fixing a degree.
pub fn parse_cycles(text: &str) -> Result<Vec<Vec<u32>>, GroupError> {
    let bad = || GroupError::NotAPermutation(text.to_string());
    let mut cycles = Vec::new();
    let mut rest = text.trim();
    if rest.is_empty() {
        return Err(bad());
    }
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(bad)?;
        let close = body.find(')').ok_or_else(bad)?;
        let cycle = body[..close]
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = body[close + 1..].trim_start();
    }
    Ok(cycles)
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

impl FromStr for Perm {
    type Err = GroupError;

    /// Image-list form only; cycle notation needs a degree, see
    /// [`Perm::parse`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if !s.trim_start().starts_with('[') {
            return Err(GroupError::NotAPermutation(s.to_string()));
        }
        Perm::parse(s, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_notation() {
        let p = Perm::parse("(0 1 2)(3 4)", 5).unwrap();
        assert_eq!(p.images(), &[1, 2, 0, 4, 3]);
        assert_eq!(p.to_string(), "(0 1 2)(3 4)");
        assert_eq!(Perm::parse("()", 3).unwrap(), Perm::identity(3));
        assert_eq!(Perm::identity(3).to_string(), "()");
        assert!(Perm::parse("(0 1)(1 2)", 3).is_err());
        assert!(Perm::parse("(0 5)", 3).is_err());
        assert!(Perm::parse("0 1", 3).is_err());
    }

    #[test]
    fn image_lists() {
        let p: Perm = "[1, 0, 2]".parse().unwrap();
        assert_eq!(p, Perm::parse("(0 1)", 3).unwrap());
        assert!("[0, 0]".parse::<Perm>().is_err());
        assert!("(0 1)".parse::<Perm>().is_err());
    }

    #[test]
    fn composition_applies_right_factor_first() {
        let a = Perm::parse("(0 1)", 3).unwrap();
        let b = Perm::parse("(1 2)", 3).unwrap();
        let ab = a.mul(&b);
        assert_eq!(ab.apply(1), a.apply(b.apply(1)));
        assert_eq!(ab, Perm::parse("(0 1 2)", 3).unwrap());
        assert!(ab.mul(&ab.inverse()).is_identity());
        assert_eq!(a.conjugate(&b), Perm::parse("(0 2)", 3).unwrap());
    }

    #[test]
    fn embedding() {
        let a = Perm::parse("(0 1)", 2).unwrap();
        assert_eq!(a.embed(2, 5).images(), &[0, 1, 3, 2, 4]);
    }
}
