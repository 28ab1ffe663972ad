//! Finite permutations of `{1, …, n}`.
//!
//! Points are 1-indexed at every public boundary; storage is 0-indexed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{DynError, Result};
use crate::orders::lcm;

/// A bijection of `{1, …, n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    // image[i] = θ(i + 1) - 1
    image: Vec<usize>,
}

/// Serialized form: `{"n": 4, "image": [2,3,4,1]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PermutationJson {
    n: usize,
    image: Vec<usize>,
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PermutationJson {
            n: self.len(),
            image: self.image(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PermutationJson::deserialize(d)?;
        if raw.n != raw.image.len() {
            return Err(serde::de::Error::custom(format!(
                "n = {} but image has {} entries",
                raw.n,
                raw.image.len()
            )));
        }
        Permutation::from_image(&raw.image).map_err(serde::de::Error::custom)
    }
}

/// Multiset of disjoint cycle lengths, sorted descending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn lengths(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Order of any permutation with this cycle type.
    pub fn order(&self) -> usize {
        self.0.iter().fold(1, |acc, &l| lcm(acc, l))
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (0..n).collect(),
        }
    }

    /// Builds from a 1-indexed image array, `image[i-1] = θ(i)`.
    pub fn from_image(image: &[usize]) -> Result<Self> {
        let n = image.len();
        if n == 0 {
            return Err(DynError::domain("permutation needs n >= 1"));
        }
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &v in image {
            if v == 0 || v > n {
                return Err(DynError::domain(format!("image value {v} outside 1..={n}")));
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(DynError::domain(format!("image value {v} repeated")));
            }
            out.push(v - 1);
        }
        Ok(Permutation { image: out })
    }

    /// Builds from disjoint cycles on `{1, …, n}`; unlisted points are fixed.
    /// The cycle `[1, 2, 3, 4]` sends 1 to 2, 2 to 3, 3 to 4 and 4 to 1.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        if n == 0 {
            return Err(DynError::domain("permutation needs n >= 1"));
        }
        let mut image: Vec<Option<usize>> = vec![None; n];
        for cycle in cycles {
            for (t, &p) in cycle.iter().enumerate() {
                if p == 0 || p > n {
                    return Err(DynError::domain(format!("cycle point {p} outside 1..={n}")));
                }
                let next = cycle[(t + 1) % cycle.len()];
                if image[p - 1].replace(next).is_some() {
                    return Err(DynError::domain(format!("point {p} appears in two cycles")));
                }
            }
        }
        let image: Vec<usize> = image
            .iter()
            .enumerate()
            .map(|(i, v)| v.unwrap_or(i + 1))
            .collect();
        Permutation::from_image(&image)
    }

    /// Parses cycle notation such as `"1,2,3,4"`, `"(1,2,3,4)"` or `"(1,3)(2,4)"`.
    /// `n` defaults to the largest point mentioned.
    pub fn parse_cycles(text: &str, n: Option<usize>) -> Result<Self> {
        let text = text.trim();
        let mut cycles = Vec::new();
        let groups: Vec<&str> = if text.contains('(') {
            text.split(')')
                .map(|g| g.trim().trim_start_matches('('))
                .filter(|g| !g.trim().is_empty())
                .collect()
        } else {
            vec![text]
        };
        for g in groups {
            let cycle = g
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| DynError::Parse(format!("bad cycle entry {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if cycle.is_empty() {
                return Err(DynError::Parse(format!("empty cycle in {text:?}")));
            }
            cycles.push(cycle);
        }
        let max = cycles.iter().flatten().copied().max().unwrap_or(0);
        Permutation::from_cycles(n.unwrap_or(max), &cycles)
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    /// θ(i) for a 1-indexed point.
    pub fn apply(&self, i: usize) -> usize {
        self.image[i - 1] + 1
    }

    /// 1-indexed image array.
    pub fn image(&self) -> Vec<usize> {
        self.image.iter().map(|v| v + 1).collect()
    }

    pub(crate) fn apply0(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { image: inv }
    }

    /// `alpha ∘ beta`: apply `beta` first, then `alpha`.
    pub fn compose(alpha: &Self, beta: &Self) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(DynError::Dimension {
                left: alpha.len(),
                right: beta.len(),
            });
        }
        Ok(Permutation {
            image: beta.image.iter().map(|&b| alpha.image[b]).collect(),
        })
    }

    pub fn power(&self, k: usize) -> Self {
        let mut result = Permutation::identity(self.len());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = Permutation::compose(&base, &result).expect("same size");
            }
            base = Permutation::compose(&base, &base).expect("same size");
            k >>= 1;
        }
        result
    }

    /// Disjoint cycles in 1-indexed form, each starting at its least point,
    /// ordered by that point. Fixed points are included as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cycle.push(p + 1);
                p = self.image[p];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut lengths: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        CycleType(lengths)
    }

    pub fn order(&self) -> usize {
        self.cycle_type().order()
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// True when the permutation is a single cycle through all `n` points.
    pub fn is_full_cycle(&self) -> bool {
        self.cycle_type().lengths() == [self.len()]
    }

    /// `{ i : θ(i) = i }`, 1-indexed and ascending.
    pub fn fixed_points(&self) -> Vec<usize> {
        self.image
            .iter()
            .enumerate()
            .filter(|(i, v)| i == *v)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<Vec<usize>> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "id");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

/// Every cyclic permutation of `{1, …, n}`, each exactly once.
///
/// The order is deterministic: cycles are written `(1, a_2, …, a_n)` and the
/// tails `a_2 … a_n` are produced in lexicographic order.
pub fn enumerate_cycles(n: usize) -> Result<CycleIter> {
    if n < 2 {
        return Err(DynError::domain(format!("enumerate_cycles needs n >= 2, got {n}")));
    }
    Ok(CycleIter {
        n,
        tail: Some((2..=n).collect()),
    })
}

/// Iterator returned by [`enumerate_cycles`].
#[derive(Debug, Clone)]
pub struct CycleIter {
    n: usize,
    tail: Option<Vec<usize>>,
}

impl Iterator for CycleIter {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let tail = self.tail.take()?;
        let mut cycle = Vec::with_capacity(self.n);
        cycle.push(1);
        cycle.extend_from_slice(&tail);
        let perm = Permutation::from_cycles(self.n, &[cycle]).expect("valid cycle");
        let mut next = tail;
        if next_lex_permutation(&mut next) {
            self.tail = Some(next);
        }
        Some(perm)
    }
}

/// Every permutation of `{1, …, n}` in lexicographic order of image arrays.
pub fn enumerate_all(n: usize) -> impl Iterator<Item = Permutation> {
    let mut current: Option<Vec<usize>> = if n == 0 { None } else { Some((1..=n).collect()) };
    std::iter::from_fn(move || {
        let cur = current.take()?;
        let perm = Permutation::from_image(&cur).expect("valid permutation");
        let mut next = cur;
        if next_lex_permutation(&mut next) {
            current = Some(next);
        }
        Some(perm)
    })
}

fn next_lex_permutation(v: &mut [usize]) -> bool {
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
