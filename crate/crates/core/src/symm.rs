//! Symmetric-group combinatorics: permutations in one-line notation, cycle types,
//! Catalan numbers and the Moebius function on `S_k`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{LabError, Result};

/// Largest degree accepted by [`enumerate_permutations`] and [`moebius`].
pub const MAX_DEGREE: usize = 8;
/// Largest index accepted by [`catalan`].
pub const MAX_CATALAN_INDEX: usize = 30;

/// A permutation of `{0, …, k−1}` in one-line notation: `images[i] = p(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        if k == 0 {
            return Err(LabError::DegreeTooLarge(0, MAX_DEGREE));
        }
        let mut seen = vec![false; k];
        for &i in &images {
            if i >= k || seen[i] {
                return Err(LabError::NotBijection(k));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(k: usize) -> Self {
        Self { images: (0..k).collect() }
    }

    /// The transposition exchanging `a` and `b` in `S_k`.
    pub fn transposition(k: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..k).collect();
        images.swap(a, b);
        Self { images }
    }

    /// The cycle `c[0] → c[1] → … → c[0]`, fixing everything else.
    pub fn cycle(k: usize, c: &[usize]) -> Result<Self> {
        let mut images: Vec<usize> = (0..k).collect();
        for (t, &from) in c.iter().enumerate() {
            images[from] = c[(t + 1) % c.len()];
        }
        Self::new(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(LabError::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(Permutation { images: other.images.iter().map(|&j| self.images[j]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Permutation { images }
    }

    /// Disjoint cycles, each starting at its smallest element, ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let k = self.degree();
        let mut visited = vec![false; k];
        let mut out = Vec::new();
        for start in 0..k {
            if visited[start] {
                continue;
            }
            let mut c = Vec::new();
            let mut i = start;
            while !visited[i] {
                visited[i] = true;
                c.push(i);
                i = self.images[i];
            }
            out.push(c);
        }
        out
    }

    pub fn num_cycles(&self) -> usize {
        self.cycles().len()
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::from_lengths(self.cycles().iter().map(Vec::len).collect())
    }

    /// `|π| = k − #cycles(π)`, the minimal number of transpositions.
    pub fn length(&self) -> usize {
        self.degree() - self.num_cycles()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (t, i) in self.images.iter().enumerate() {
            if t > 0 {
                write!(f, " ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "]")
    }
}

/// Multiset of cycle lengths, stored in non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleType {
    lengths: Vec<usize>,
}

impl CycleType {
    pub fn from_lengths(mut lengths: Vec<usize>) -> Self {
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        Self { lengths }
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn degree(&self) -> usize {
        self.lengths.iter().sum()
    }

    pub fn num_cycles(&self) -> usize {
        self.lengths.len()
    }

    pub fn length(&self) -> usize {
        self.degree() - self.num_cycles()
    }

    /// A permutation with this cycle type, built from consecutive blocks.
    pub fn representative(&self) -> Permutation {
        let k = self.degree();
        let mut images: Vec<usize> = (0..k).collect();
        let mut start = 0;
        for &len in &self.lengths {
            for t in 0..len {
                images[start + t] = start + (t + 1) % len;
            }
            start += len;
        }
        Permutation { images }
    }
}

// Ordered by `|π|` first (identity first), then by the partition in reverse lexicographic
// order, so `{1,1} < {2}` and `{2,1,1} < {2,2} < {3,1}`.
impl Ord for CycleType {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.length().cmp(&other.length()))
            .then_with(|| self.lengths.cmp(&other.lengths))
    }
}

impl PartialOrd for CycleType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut lengths = self.lengths.clone();
        lengths.sort_unstable();
        write!(f, "{{")?;
        for (t, l) in lengths.iter().enumerate() {
            if t > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// All `k!` permutations of degree `k` in lexicographic order of their one-line notation.
pub fn enumerate_permutations(k: usize) -> Result<Vec<Permutation>> {
    if k == 0 || k > MAX_DEGREE {
        return Err(LabError::DegreeTooLarge(k, MAX_DEGREE));
    }
    let mut current: Vec<usize> = (0..k).collect();
    let mut out = vec![Permutation { images: current.clone() }];
    // next-permutation in lexicographic order
    loop {
        let Some(i) = (0..k - 1).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..k).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
        out.push(Permutation { images: current.clone() });
    }
    Ok(out)
}

/// Integer partitions of `k`, one [`CycleType`] each, in the [`CycleType`] order.
pub fn cycle_types(k: usize) -> Vec<CycleType> {
    fn rec(rest: usize, max: usize, acc: &mut Vec<usize>, out: &mut Vec<CycleType>) {
        if rest == 0 {
            out.push(CycleType::from_lengths(acc.clone()));
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            acc.push(part);
            rec(rest - part, part, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// `Cat_l = binomial(2l, l) / (l + 1)`, exact.
pub fn catalan(l: usize) -> Result<u64> {
    if l > MAX_CATALAN_INDEX {
        return Err(LabError::Overflow(l, MAX_CATALAN_INDEX));
    }
    // Cat_{i+1} = Cat_i * 2(2i+1) / (i+2); the product fits in u128 and divides exactly.
    let mut c: u128 = 1;
    for i in 0..l as u128 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    Ok(c as u64)
}

/// Moebius function of the non-crossing partition lattice, evaluated through the cycle
/// type: `Mb(π) = ∏_c (−1)^{|c|−1} Cat_{|c|−1}`.
pub fn moebius(p: &Permutation) -> Result<i64> {
    if p.degree() > MAX_DEGREE {
        return Err(LabError::DegreeTooLarge(p.degree(), MAX_DEGREE));
    }
    moebius_of_type(&p.cycle_type())
}

pub fn moebius_of_type(t: &CycleType) -> Result<i64> {
    t.lengths().iter().try_fold(1i64, |acc, &len| {
        let sign = if (len - 1) % 2 == 0 { 1 } else { -1 };
        Ok(acc * sign * catalan(len - 1)? as i64)
    })
}
