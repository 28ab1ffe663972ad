//! Closed walks in signed Markov graphs: counting, enumeration, prime
//! decomposition, and the constructions that turn trace information into
//! negative non-repetitive closed walks.

mod forcing;
mod search;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{DynError, Result};
use crate::markov::{MarkovGraph, Sign};
use crate::orders::{divisors, mobius};
use crate::IntMatrix;

pub use forcing::{
    horseshoe_graph, horseshoe_walks, horseshoe_witness, lemma3_walk, lemma7_witness,
    power_of_two_walk, Horseshoe, Lemma7Route, Lemma7Witness,
};
pub(crate) use forcing::{forcing_walk_in_graph, negative_power_of_two_walk};
pub use search::{
    enumerate_closed, find_negative_nonrepetitive, first_closed, SearchCaps, DEFAULT_WALK_CAP,
};

/// A walk in a Markov graph, with the sign of every traversed edge.
///
/// Vertices are 0-indexed internally and printed as `E1`, `E2`, ….
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Walk {
    vertices: Vec<usize>,
    steps: Vec<Sign>,
}

impl Walk {
    /// Validates every step against `g`. Parallel edges are rejected as
    /// ambiguous since a vertex sequence cannot name one of them.
    pub fn in_graph(g: &MarkovGraph, vertices: Vec<usize>) -> Result<Walk> {
        if vertices.is_empty() {
            return Err(DynError::contract("a walk needs at least one vertex"));
        }
        let mut steps = Vec::with_capacity(vertices.len() - 1);
        for pair in vertices.windows(2) {
            let (s, t) = (pair[0], pair[1]);
            if s >= g.vertex_count() || t >= g.vertex_count() {
                return Err(DynError::contract(format!("vertex out of range in E{} -> E{}", s + 1, t + 1)));
            }
            let sign = g.edge_sign(s, t).ok_or_else(|| {
                DynError::contract(format!("no unique edge E{} -> E{} in the graph", s + 1, t + 1))
            })?;
            steps.push(sign);
        }
        Ok(Walk { vertices, steps })
    }

    /// Same as [`Walk::in_graph`] with 1-indexed vertex labels.
    pub fn from_labels(g: &MarkovGraph, labels: &[usize]) -> Result<Walk> {
        if labels.contains(&0) {
            return Err(DynError::contract("walk labels are 1-indexed"));
        }
        Walk::in_graph(g, labels.iter().map(|v| v - 1).collect())
    }

    pub(crate) fn from_parts(vertices: Vec<usize>, steps: Vec<Sign>) -> Walk {
        debug_assert_eq!(vertices.len(), steps.len() + 1);
        Walk { vertices, steps }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// 1-indexed vertex labels.
    pub fn labels(&self) -> Vec<usize> {
        self.vertices.iter().map(|v| v + 1).collect()
    }

    pub fn steps(&self) -> &[Sign] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    /// Even number of negative edges gives `+`.
    pub fn sign(&self) -> Sign {
        self.steps.iter().fold(Sign::Plus, |acc, &s| acc * s)
    }

    pub fn is_closed(&self) -> bool {
        self.vertices.first() == self.vertices.last()
    }

    /// Follows `self` with `other`; `other` must start where `self` ends.
    pub fn concat(&self, other: &Walk) -> Result<Walk> {
        if self.vertices.last() != other.vertices.first() {
            return Err(DynError::contract(format!("cannot join {self} and {other}")));
        }
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        Ok(Walk { vertices, steps })
    }

    /// `self` traversed `times` times; `self` must be closed.
    pub fn repeat(&self, times: usize) -> Result<Walk> {
        if !self.is_closed() {
            return Err(DynError::contract("only closed walks can be repeated"));
        }
        let mut out = Walk {
            vertices: vec![self.start()],
            steps: Vec::new(),
        };
        for _ in 0..times {
            out = out.concat(self)?;
        }
        Ok(out)
    }

    /// Least rotation of a closed walk, used as the canonical representative
    /// of its rotation class.
    pub fn canonical_rotation(&self) -> Result<Walk> {
        if !self.is_closed() {
            return Err(DynError::contract("rotation needs a closed walk"));
        }
        let k = self.len();
        if k == 0 {
            return Ok(self.clone());
        }
        let best = (0..k)
            .map(|r| self.rotate(r))
            .min()
            .expect("nonempty");
        Ok(best)
    }

    fn rotate(&self, r: usize) -> Walk {
        let k = self.len();
        let vertices: Vec<usize> = (0..=k).map(|t| self.vertices[(r + t) % k]).collect();
        let steps: Vec<Sign> = (0..k).map(|t| self.steps[(r + t) % k]).collect();
        Walk { vertices, steps }
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vertices {
            write!(f, "E{}", v + 1)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WalkJson {
    vertices: Vec<usize>,
    sign: i64,
    length: usize,
}

impl Serialize for Walk {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WalkJson {
            vertices: self.labels(),
            sign: self.sign().value(),
            length: self.len(),
        }
        .serialize(s)
    }
}

/// True iff the closed walk is a `d`-fold repetition of a shorter closed walk
/// for some `d > 1`.
pub fn is_repetitive(w: &Walk) -> Result<bool> {
    if !w.is_closed() {
        return Err(DynError::contract(format!("{w} is not closed")));
    }
    let k = w.len();
    if k <= 1 {
        return Ok(false);
    }
    let repeats = divisors(k as u64).into_iter().filter(|&d| (d as usize) < k).any(|d| {
        let d = d as usize;
        (0..k - d).all(|i| w.vertices[i] == w.vertices[i + d] && w.steps[i] == w.steps[i + d])
    });
    Ok(repeats)
}

/// A closed walk split at every visit of its base vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeDecomposition {
    pub base_vertex: usize,
    pub factors: Vec<Walk>,
}

impl PrimeDecomposition {
    pub fn rejoin(&self) -> Result<Walk> {
        let mut out = Walk {
            vertices: vec![self.base_vertex],
            steps: Vec::new(),
        };
        for f in &self.factors {
            out = out.concat(f)?;
        }
        Ok(out)
    }
}

pub fn prime_decompose(w: &Walk) -> Result<PrimeDecomposition> {
    if !w.is_closed() {
        return Err(DynError::contract(format!("{w} is not closed")));
    }
    let base = w.start();
    let mut factors = Vec::new();
    let mut begin = 0;
    for t in 1..w.vertices.len() {
        if w.vertices[t] == base {
            factors.push(Walk {
                vertices: w.vertices[begin..=t].to_vec(),
                steps: w.steps[begin..t].to_vec(),
            });
            begin = t;
        }
    }
    Ok(PrimeDecomposition {
        base_vertex: base,
        factors,
    })
}

/// Rearranges the prime factors of a closed walk so the result cannot be a
/// repetition: every copy of the least prime factor first, then the other
/// factors in their original order. Length, sign and the multiset of prime
/// factors are unchanged.
pub fn surgery_nonrepetitive(w: &Walk) -> Result<Walk> {
    let decomposition = prime_decompose(w)?;
    let lead = decomposition
        .factors
        .iter()
        .min()
        .ok_or_else(|| DynError::contract("surgery needs a walk of positive length"))?
        .clone();
    if decomposition.factors.iter().all(|f| *f == lead) {
        return Err(DynError::CannotDesynchronize);
    }
    let (leading, rest): (Vec<Walk>, Vec<Walk>) =
        decomposition.factors.into_iter().partition(|f| *f == lead);
    let rearranged = PrimeDecomposition {
        base_vertex: decomposition.base_vertex,
        factors: leading.into_iter().chain(rest).collect(),
    }
    .rejoin()?;
    if is_repetitive(&rearranged)? {
        return Err(DynError::invariant(format!("surgery produced repetitive walk {rearranged}")));
    }
    Ok(rearranged)
}

/// Number of closed walks of length `k`, i.e. `tr(M^k)`.
pub fn count_closed(m: &IntMatrix, k: u64) -> Result<BigInt> {
    if !m.is_nonnegative() {
        return Err(DynError::contract("count_closed needs the unsigned Markov matrix"));
    }
    if k == 0 {
        return Err(DynError::contract("walk length must be positive"));
    }
    Ok(m.pow(k).trace())
}

/// Number of non-repetitive closed walks of length `k`, each rotation class
/// counted once: `(1/k) Σ_{d | k} μ(d) tr(M^{k/d})`.
pub fn count_nonrepetitive_closed(m: &IntMatrix, k: u64) -> Result<BigInt> {
    if !m.is_nonnegative() {
        return Err(DynError::contract(
            "count_nonrepetitive_closed needs the unsigned Markov matrix",
        ));
    }
    if k == 0 {
        return Err(DynError::contract("walk length must be positive"));
    }
    let mut total = BigInt::zero();
    for d in divisors(k) {
        let mu = mobius(d);
        if mu != 0 {
            total += m.pow(k / d).trace() * BigInt::from(mu);
        }
    }
    let (q, r) = total.div_rem(&BigInt::from(k));
    if !r.is_zero() || q.is_negative() {
        return Err(DynError::invariant(format!(
            "Möbius sum {total} is not a nonnegative multiple of {k}"
        )));
    }
    Ok(q)
}
