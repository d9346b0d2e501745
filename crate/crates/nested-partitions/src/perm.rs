//! Permutations with the left-to-right product convention.
//!
//! Products multiply left to right: `i ^ (a*b) = (i^a)^b`, so
//! `(1,2)*(2,3) = (1,3,2)`. This convention is local to the wreath-product
//! side of the crate; endomorphisms compose right to left.

use std::fmt;

use crate::error::{Error, Result};

/// A permutation of `{1..n}`, stored as a 0-based image table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm {
            images: (0..n as u32).collect(),
        }
    }

    /// Builds a permutation from a 0-based image table.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v as usize >= n || seen[v as usize] {
                return Err(Error::NotAPermutation { len: n });
            }
            seen[v as usize] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation from a 1-based image table.
    pub fn from_one_based(images: &[u32]) -> Result<Self> {
        let n = images.len() as u32;
        let mut table = Vec::with_capacity(images.len());
        for &v in images {
            if v == 0 || v > n {
                return Err(Error::EntryOutOfRange { value: v, max: n });
            }
            table.push(v - 1);
        }
        Self::from_images(table)
    }

    /// Builds a permutation of degree `n` from disjoint cycles in 1-based
    /// notation, e.g. `from_cycles(3, &[&[1, 2]])` is the transposition (1,2).
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (idx, &v) in cycle.iter().enumerate() {
                if v == 0 || v as usize > n {
                    return Err(Error::EntryOutOfRange {
                        value: v,
                        max: n as u32,
                    });
                }
                if touched[v as usize - 1] {
                    return Err(Error::InvalidInput(format!(
                        "point {v} appears in two cycles"
                    )));
                }
                touched[v as usize - 1] = true;
                let next = cycle[(idx + 1) % cycle.len()];
                images[v as usize - 1] = next - 1;
            }
        }
        Self::from_images(images)
    }

    /// The transposition (a, b) in degree `n` (1-based; a = b gives the identity).
    pub fn transposition(n: usize, a: u32, b: u32) -> Result<Self> {
        if a == b {
            return Ok(Self::identity(n));
        }
        Self::from_cycles(n, &[&[a, b]])
    }

    /// The full cycle (1, 2, ..., n).
    pub fn full_cycle(n: usize) -> Self {
        Perm {
            images: (0..n as u32).map(|i| (i + 1) % n as u32).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a 0-based point.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    /// Image of a 1-based point.
    pub fn apply_one_based(&self, i: u32) -> u32 {
        self.images[(i - 1) as usize] + 1
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn to_one_based(&self) -> Vec<u32> {
        self.images.iter().map(|&v| v + 1).collect()
    }

    /// Left-to-right product: `i ^ (self*other) = (i^self)^other`.
    pub fn mul(&self, other: &Perm) -> Result<Perm> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(Perm {
            images: self
                .images
                .iter()
                .map(|&v| other.images[v as usize])
                .collect(),
        })
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u32; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v as usize] = i as u32;
        }
        Perm { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// Multiplicative order, found by iterated multiplication.
    pub fn order(&self) -> u64 {
        let mut acc = self.clone();
        let mut n = 1u64;
        while !acc.is_identity() {
            acc = acc.mul(self).expect("same degree");
            n += 1;
        }
        n
    }

    /// Sign of the permutation: `Parity::Odd` for an odd number of transpositions.
    pub fn sign(&self) -> Parity {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut transpositions = 0usize;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0usize;
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                cur = self.images[cur] as usize;
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Nontrivial cycles in 1-based notation, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] as usize == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                cycle.push(cur as u32 + 1);
                cur = self.images[cur] as usize;
            }
            out.push(cycle);
        }
        out
    }

    /// All permutations of degree `n` in lexicographic image-table order.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut table: Vec<u32> = (0..n as u32).collect();
        loop {
            out.push(Perm {
                images: table.clone(),
            });
            if !next_permutation(&mut table) {
                break;
            }
        }
        out
    }
}

fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "id");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (i, v) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// An element of the two-element group: the sign of a permutation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn add(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "e"),
            Parity::Odd => write!(f, "s"),
        }
    }
}

/// An element of the direct power of the two-element group, one sign per level.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ParityVector(pub Vec<Parity>);

impl ParityVector {
    pub fn add(&self, other: &ParityVector) -> ParityVector {
        ParityVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a.add(b))
                .collect(),
        )
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&p| p == Parity::Even)
    }
}

impl fmt::Display for ParityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn left_to_right_product() {
        // (1,2)(2,3) = (1,3,2)
        let a = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        let b = Perm::from_cycles(3, &[&[2, 3]]).unwrap();
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab, Perm::from_cycles(3, &[&[1, 3, 2]]).unwrap());
    }

    #[test]
    fn inverse_cancels() {
        let p = Perm::from_one_based(&[3, 1, 4, 2, 5]).unwrap();
        assert!(p.mul(&p.inverse()).unwrap().is_identity());
        assert!(p.inverse().mul(&p).unwrap().is_identity());
    }

    #[test]
    fn convention_is_pointwise() {
        // i^(ab) = (i^a)^b for every pair in S_4 and every point.
        let all = Perm::all(4);
        assert_eq!(all.len(), 24);
        for a in &all {
            for b in &all {
                let ab = a.mul(b).unwrap();
                for i in 0..4 {
                    assert_eq!(ab.apply(i), b.apply(a.apply(i)));
                }
            }
        }
    }

    #[test]
    fn sign_is_a_homomorphism() {
        let all = Perm::all(4);
        for a in &all {
            for b in &all {
                let ab = a.mul(b).unwrap();
                assert_eq!(ab.sign(), a.sign().add(b.sign()));
            }
        }
    }

    #[test]
    fn orders() {
        assert_eq!(Perm::identity(4).order(), 1);
        assert_eq!(Perm::from_cycles(4, &[&[1, 2]]).unwrap().order(), 2);
        assert_eq!(Perm::full_cycle(5).order(), 5);
        assert_eq!(
            Perm::from_cycles(5, &[&[1, 2], &[3, 4, 5]]).unwrap().order(),
            6
        );
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Perm::from_one_based(&[1, 1, 3]).is_err());
        assert!(Perm::from_one_based(&[1, 2, 4]).is_err());
    }

    #[test]
    fn display_uses_cycles() {
        let p = Perm::from_cycles(4, &[&[1, 3, 2]]).unwrap();
        assert_eq!(p.to_string(), "(1,3,2)");
        assert_eq!(Perm::identity(3).to_string(), "id");
    }
}
