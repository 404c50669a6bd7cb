//! Permutations of `{0..n-1}` stored as image lists, with cycle notation I/O.
//!
//! Composition is functional: `(g * h)(x) = g(h(x))`, so `h` acts first.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// A bijection on `{0..degree-1}`.
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

    /// Builds a permutation from its image list, rejecting non-bijections.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let degree = images.len();
        let mut seen = vec![false; degree];
        for &y in &images {
            if y >= degree || seen[y] {
                return Err(Error::NotBijection { degree });
            }
            seen[y] = true;
        }
        Ok(Permutation {
            images: images.into_iter().map(|y| y as u32).collect(),
        })
    }

    /// Builds a permutation on `degree` points from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x >= degree || touched[x] {
                    return Err(Error::NotBijection { degree });
                }
                touched[x] = true;
                images[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Permutation::from_images(images)
    }

    /// Builds `x ↦ f(x)`; `f` must be a bijection of `0..degree`.
    pub fn from_fn(degree: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        Permutation::from_images((0..degree).map(f).collect())
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(
            Permutation::from_images(images.iter().map(|&x| x as usize).collect()).is_ok()
        );
        Permutation { images }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &y)| i as u32 == y)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(
            self.degree(),
            other.degree(),
            "composing permutations of different degree"
        );
        Permutation {
            images: other
                .images
                .iter()
                .map(|&y| self.images[y as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &y) in self.images.iter().enumerate() {
            inv[y as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    /// `g ∘ self ∘ g⁻¹`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        let mut out = vec![0u32; self.degree()];
        for x in 0..self.degree() {
            out[g.apply(x)] = g.images[self.apply(x)];
        }
        Permutation { images: out }
    }

    /// Element order (lcm of cycle lengths).
    pub fn order(&self) -> u64 {
        self.cycle_type()
            .into_iter()
            .fold(1u64, |acc, len| lcm(acc, len as u64))
    }

    /// Sorted cycle lengths, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles_with_fixed().iter().map(Vec::len).collect();
        lens.sort_unstable();
        lens
    }

    fn cycles_with_fixed(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
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

    /// Nontrivial cycles, each starting at its least point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        self.cycles_with_fixed()
            .into_iter()
            .filter(|c| c.len() > 1)
            .collect()
    }

    /// Points moved by the permutation.
    pub fn support(&self) -> Vec<usize> {
        (0..self.degree()).filter(|&x| self.apply(x) != x).collect()
    }

    pub fn maps_set_onto_itself(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.degree()];
        for &x in set {
            member[x] = true;
        }
        set.iter().all(|&x| member[self.apply(x)])
    }

    /// The permutation equal to `self` on `set` and the identity elsewhere.
    pub fn restrict(&self, set: &[usize]) -> Result<Permutation> {
        if set.iter().any(|&x| x >= self.degree()) {
            return Err(Error::DegreeMismatch {
                expected: self.degree(),
                found: set.iter().copied().max().unwrap_or(0) + 1,
            });
        }
        if !self.maps_set_onto_itself(set) {
            return Err(Error::NotSetwiseFixed);
        }
        let mut images: Vec<u32> = (0..self.degree() as u32).collect();
        for &x in set {
            images[x] = self.images[x];
        }
        Ok(Permutation { images })
    }

    /// Parses cycle notation such as `(0 1 2)(3 4)`; `()` or an empty string is the identity.
    pub fn parse(text: &str, degree: usize) -> Result<Permutation> {
        let cycles = parse_cycles(text)?;
        for (cycle, line, column) in &cycles {
            for &x in cycle {
                if x >= degree {
                    return Err(Error::Parse {
                        line: *line,
                        column: *column,
                        message: format!("point {x} out of range for degree {degree}"),
                    });
                }
            }
        }
        let plain: Vec<Vec<usize>> = cycles.into_iter().map(|(c, _, _)| c).collect();
        Permutation::from_cycles(degree, &plain).map_err(|_| Error::Parse {
            line: 1,
            column: 1,
            message: "cycles are not disjoint".into(),
        })
    }
}

/// Returns each cycle with the line and column of its opening parenthesis.
fn parse_cycles(text: &str) -> Result<Vec<(Vec<usize>, usize, usize)>> {
    let mut out = Vec::new();
    let mut current: Option<(Vec<usize>, usize, usize)> = None;
    let mut number: Option<(usize, usize, usize)> = None;
    let err = |line, column, message: &str| Error::Parse {
        line,
        column,
        message: message.to_string(),
    };
    let mut line = 1;
    let mut column = 0;
    for ch in text.chars() {
        column += 1;
        if let Some(d) = ch.to_digit(10) {
            if current.is_none() {
                return Err(err(line, column, "point outside of a cycle"));
            }
            let (value, l, c) = number.unwrap_or((0, line, column));
            let value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(d as usize))
                .ok_or_else(|| err(line, column, "point too large"))?;
            number = Some((value, l, c));
            continue;
        }
        if let Some((value, _, _)) = number.take() {
            current.as_mut().expect("number inside cycle").0.push(value);
        }
        match ch {
            '(' => {
                if current.is_some() {
                    return Err(err(line, column, "nested parenthesis"));
                }
                current = Some((Vec::new(), line, column));
            }
            ')' => {
                let (cycle, l, c) = current
                    .take()
                    .ok_or_else(|| err(line, column, "unmatched ')'"))?;
                let mut sorted = cycle.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(err(l, c, "repeated point in cycle"));
                }
                if !cycle.is_empty() {
                    out.push((cycle, l, c));
                }
            }
            '\n' => {
                if current.is_some() {
                    return Err(err(line, column, "line break inside cycle"));
                }
                line += 1;
                column = 0;
            }
            c if c.is_whitespace() => {}
            c => return Err(err(line, column, &format!("unexpected character {c:?}"))),
        }
    }
    if let Some((_, l, c)) = current {
        return Err(err(l, c, "unclosed '('"));
    }
    Ok(out)
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            f.write_str("(")?;
            for (i, x) in cycle.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Mul for &Permutation {
    type Output = Permutation;
    fn mul(self, rhs: &Permutation) -> Permutation {
        self.compose(rhs)
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}
