use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// A bijection of `{0, .., degree - 1}` stored as its image array.
///
/// Composition is right to left: `(a * b)(x) = a(b(x))`. Cycle notation
/// (parsing and `Display`) is 1-indexed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!(
                    "image list {images:?} is not a bijection"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation {
            images: images.into_iter().map(|x| x as u32).collect(),
        })
    }

    /// Builds a permutation from cycles of 0-indexed points.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for &x in cycle {
                if x >= degree {
                    return Err(Error::PointOutOfRange { point: x, degree });
                }
                if used[x] {
                    return Err(Error::InvalidPermutation(format!(
                        "point {} appears twice in cycle notation",
                        x + 1
                    )));
                }
                used[x] = true;
            }
            for (i, &x) in cycle.iter().enumerate() {
                images[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Permutation::from_images(images)
    }

    /// Parses 1-indexed cycle notation such as `(1 2 3)(4 5)`; `()` is the identity.
    pub fn parse_cycles(degree: usize, text: &str) -> Result<Self> {
        let cycles = parse_cycle_list(text, 1, 1)?;
        let zero_based: Vec<Vec<usize>> = cycles
            .into_iter()
            .map(|c| c.into_iter().map(|x| x - 1).collect())
            .collect();
        Permutation::from_cycles(degree, &zero_based)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self * other)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    /// `[g, h] = g h g⁻¹ h⁻¹`.
    pub fn commutator(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(&(&(self * other) * &self.inverse()) * &other.inverse())
    }

    /// `self * other * self⁻¹`.
    pub fn conjugate(&self, other: &Permutation) -> Permutation {
        &(self * other) * &self.inverse()
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Order of the permutation as a group element (lcm of cycle lengths).
    pub fn order(&self) -> u64 {
        self.cycle_lengths()
            .into_iter()
            .fold(1u64, |acc, l| lcm(acc, l as u64))
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.apply(start) == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    fn cycle_lengths(&self) -> Vec<usize> {
        self.cycles().iter().map(Vec::len).collect()
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    pub fn smallest_moved_point(&self) -> Option<usize> {
        self.images
            .iter()
            .enumerate()
            .find(|&(i, &x)| i as u32 != x)
            .map(|(i, _)| i)
    }

    pub fn fixes(&self, x: usize) -> bool {
        self.apply(x) == x
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        (0..self.degree()).all(|x| self.apply(other.apply(x)) == other.apply(self.apply(x)))
    }

    /// Places `self` on points `offset..offset+degree` of a larger domain.
    pub fn embed(&self, total_degree: usize, offset: usize) -> Permutation {
        let mut images: Vec<u32> = (0..total_degree as u32).collect();
        for (i, &x) in self.images.iter().enumerate() {
            images[offset + i] = offset as u32 + x;
        }
        Permutation { images }
    }

    /// Restriction to an invariant point list, relabelled to `0..points.len()`.
    pub fn restrict(&self, points: &[usize]) -> Result<Permutation> {
        let mut index = vec![usize::MAX; self.degree()];
        for (i, &p) in points.iter().enumerate() {
            if p >= self.degree() {
                return Err(Error::PointOutOfRange {
                    point: p,
                    degree: self.degree(),
                });
            }
            index[p] = i;
        }
        let mut images = Vec::with_capacity(points.len());
        for &p in points {
            let q = index[self.apply(p)];
            if q == usize::MAX {
                return Err(Error::Input(format!(
                    "point set is not invariant under {self}"
                )));
            }
            images.push(q);
        }
        Permutation::from_images(images)
    }
}

impl Mul<&Permutation> for &Permutation {
    type Output = Permutation;

    fn mul(self, rhs: &Permutation) -> Permutation {
        assert_eq!(self.degree(), rhs.degree(), "degree mismatch in product");
        Permutation {
            images: rhs
                .images
                .iter()
                .map(|&x| self.images[x as usize])
                .collect(),
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Parses `(a b c)(d e)` into 1-indexed cycles. `line` and `col0` locate
/// the text inside a larger document for error reporting.
pub(crate) fn parse_cycle_list(text: &str, line: usize, col0: usize) -> Result<Vec<Vec<usize>>> {
    let err = |col: usize, message: String| Error::Parse {
        line,
        column: col0 + col,
        message,
    };
    let mut cycles = Vec::new();
    let mut current: Option<Vec<usize>> = None;
    let mut number = String::new();
    let mut number_start = 0;
    let chars: Vec<char> = text.chars().collect();
    if chars.iter().all(|c| c.is_whitespace()) {
        return Err(err(
            0,
            "empty cycle notation (write `()` for the identity)".into(),
        ));
    }
    for (i, &ch) in chars.iter().enumerate() {
        match ch {
            '(' => {
                if current.is_some() {
                    return Err(err(i, "nested `(`".into()));
                }
                current = Some(Vec::new());
            }
            ')' | ' ' | ',' | '\t' => {
                if !number.is_empty() {
                    let cycle = current
                        .as_mut()
                        .ok_or_else(|| err(number_start, "number outside a cycle".into()))?;
                    let value: usize = number
                        .parse()
                        .map_err(|_| err(number_start, format!("bad number `{number}`")))?;
                    if value == 0 {
                        return Err(err(number_start, "points are 1-indexed".into()));
                    }
                    cycle.push(value);
                    number.clear();
                }
                if ch == ')' {
                    let cycle = current
                        .take()
                        .ok_or_else(|| err(i, "unmatched `)`".into()))?;
                    if cycle.len() > 1 {
                        cycles.push(cycle);
                    }
                }
            }
            c if c.is_ascii_digit() => {
                if current.is_none() {
                    return Err(err(i, "number outside a cycle".into()));
                }
                if number.is_empty() {
                    number_start = i;
                }
                number.push(c);
            }
            other => return Err(err(i, format!("unexpected character `{other}`"))),
        }
    }
    if current.is_some() {
        return Err(err(chars.len(), "unterminated cycle".into()));
    }
    Ok(cycles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(deg: usize, s: &str) -> Permutation {
        Permutation::parse_cycles(deg, s).unwrap()
    }

    #[test]
    fn composition_is_right_to_left() {
        let a = p(3, "(1 2)");
        let b = p(3, "(2 3)");
        // b first: 1 -> 1 -> 2
        assert_eq!((&a * &b).apply(0), 1);
        assert_eq!(a.compose(&b).unwrap(), p(3, "(1 2 3)"));
    }

    #[test]
    fn commutator_conventions() {
        let id = Permutation::identity(3);
        let g = p(3, "(1 2)");
        let h = p(3, "(1 3)");
        assert_eq!(id.commutator(&h).unwrap(), id);
        // g h g^-1 h^-1 evaluated right to left
        assert_eq!(g.commutator(&h).unwrap(), p(3, "(1 2 3)"));
        assert_eq!(h.commutator(&g).unwrap(), p(3, "(1 3 2)"));
    }

    #[test]
    fn inverse_law_and_mismatch() {
        let q = p(5, "(1 4 2)(3 5)");
        assert!(q.compose(&q.inverse()).unwrap().is_identity());
        assert!(matches!(
            q.compose(&Permutation::identity(4)),
            Err(Error::DegreeMismatch { left: 5, right: 4 })
        ));
    }

    #[test]
    fn display_round_trip() {
        let q = p(6, "(2 5 3)(4 6)");
        assert_eq!(q.to_string(), "(2 5 3)(4 6)");
        assert_eq!(Permutation::identity(3).to_string(), "()");
        assert_eq!(q.order(), 6);
    }

    #[test]
    fn parse_errors_are_located() {
        match Permutation::parse_cycles(4, "(1 2)(3 x)") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 9),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Permutation::parse_cycles(4, "(1 2)(2 3)").is_err());
        assert!(Permutation::parse_cycles(4, "(1 5)").is_err());
        assert!(Permutation::parse_cycles(4, "(1 2").is_err());
    }

    #[test]
    fn restriction_and_embedding() {
        let q = p(5, "(2 4)(3 5)");
        assert_eq!(q.restrict(&[1, 2, 3, 4]).unwrap(), p(4, "(1 3)(2 4)"));
        assert!(q.restrict(&[1, 2]).is_err());
        assert_eq!(p(2, "(1 2)").embed(4, 2), p(4, "(3 4)"));
    }
}
