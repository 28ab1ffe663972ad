//! Markov graphs, Markov matrices and oriented Markov matrices of
//! connect-the-dots maps.
//!
//! For a permutation θ of `{1, …, n}` the edge symbol `E_i` is the interval
//! `[i, i+1]`. The connect-the-dots map is linear on `E_i` with image
//! `[θ(i), θ(i+1)]` (in some order), so `E_i → E_j` exactly when `E_j` sits
//! inside that image, with sign `+` when θ(i) < θ(i+1).

use std::fmt;
use std::ops::Mul;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{DynError, Result};
use crate::permutation::Permutation;
use crate::IntMatrix;

/// Orientation of an edge or walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_value(v).ok_or_else(|| serde::de::Error::custom(format!("sign must be ±1, got {v}")))
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A signed directed edge between 0-indexed vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphEdge {
    pub source: usize,
    pub target: usize,
    pub sign: Sign,
}

/// Directed graph on edge symbols `E_1 … E_d` (stored 0-indexed) with signed edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovGraph {
    vertex_count: usize,
    edges: Vec<GraphEdge>,
    // out[v] sorted by (target, sign), indices into `edges`
    out: Vec<Vec<usize>>,
}

impl MarkovGraph {
    pub fn new(vertex_count: usize, mut edges: Vec<GraphEdge>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(DynError::domain("a Markov graph needs at least one vertex"));
        }
        for e in &edges {
            if e.source >= vertex_count || e.target >= vertex_count {
                return Err(DynError::contract(format!(
                    "edge {:?} references a vertex outside 0..{vertex_count}",
                    e
                )));
            }
        }
        edges.sort();
        let mut out = vec![Vec::new(); vertex_count];
        for (idx, e) in edges.iter().enumerate() {
            out[e.source].push(idx);
        }
        Ok(MarkovGraph {
            vertex_count,
            edges,
            out,
        })
    }

    /// One edge per occurrence of `±E_i` in the route of `E_j`.
    pub fn from_routes(vertex_count: usize, routes: &[Vec<(usize, Sign)>]) -> Result<Self> {
        let edges = routes
            .iter()
            .enumerate()
            .flat_map(|(source, route)| {
                route.iter().map(move |&(target, sign)| GraphEdge {
                    source,
                    target,
                    sign,
                })
            })
            .collect();
        MarkovGraph::new(vertex_count, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    /// Outgoing edges of `v` in ascending target order, `+` before `-`.
    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = &GraphEdge> {
        self.out[v].iter().map(move |&i| &self.edges[i])
    }

    /// Sign of the edge `source → target`, when exactly one such edge exists.
    pub fn edge_sign(&self, source: usize, target: usize) -> Option<Sign> {
        let mut found = self.out_edges(source).filter(|e| e.target == target);
        let first = found.next()?;
        if found.next().is_some() {
            None
        } else {
            Some(first.sign)
        }
    }

    pub fn has_edge(&self, source: usize, target: usize) -> bool {
        self.out_edges(source).any(|e| e.target == target)
    }

    /// Unsigned matrix: entry `(i, j)` counts edges `E_j → E_i`.
    pub fn markov_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.vertex_count);
        for e in &self.edges {
            *m.get_mut(e.target, e.source) += 1;
        }
        m
    }

    /// Signed matrix: positive minus negative edges `E_j → E_i`.
    pub fn oriented_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.vertex_count);
        for e in &self.edges {
            *m.get_mut(e.target, e.source) += e.sign.value();
        }
        m
    }

    /// Graph with one edge per unit of `|OM(i, j)|`, signed like the entry.
    /// Only meaningful when no cancellation happened in `om`.
    pub fn from_oriented_matrix(om: &IntMatrix) -> Result<Self> {
        let d = om.dim();
        let mut edges = Vec::new();
        for target in 0..d {
            for source in 0..d {
                let v = om.get(target, source);
                let count = v
                    .magnitude()
                    .to_usize()
                    .ok_or_else(|| DynError::domain("matrix entry too large for a graph"))?;
                let sign = if v.sign() == num_bigint::Sign::Minus {
                    Sign::Minus
                } else {
                    Sign::Plus
                };
                for _ in 0..count {
                    edges.push(GraphEdge {
                        source,
                        target,
                        sign,
                    });
                }
            }
        }
        MarkovGraph::new(d, edges)
    }

    /// Graphviz rendering with vertices `E1 … Ed` and `+`/`-` edge labels.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph {name} {{\n");
        for v in 0..self.vertex_count {
            s.push_str(&format!("  E{};\n", v + 1));
        }
        for e in &self.edges {
            s.push_str(&format!(
                "  E{} -> E{} [label=\"{}\"];\n",
                e.source + 1,
                e.target + 1,
                e.sign.symbol()
            ));
        }
        s.push_str("}\n");
        s
    }
}

/// Routes of the edge symbols under the connect-the-dots map: `E_i` is sent
/// monotonically across the symbols between θ(i) and θ(i+1).
pub(crate) fn interval_routes(theta: &Permutation) -> Result<Vec<Vec<(usize, Sign)>>> {
    let n = theta.len();
    if n < 2 {
        return Err(DynError::domain(format!(
            "connect-the-dots Markov data needs n >= 2, got n = {n}"
        )));
    }
    Ok((0..n - 1)
        .map(|i| {
            let (a, b) = (theta.apply0(i), theta.apply0(i + 1));
            let sign = if a < b { Sign::Plus } else { Sign::Minus };
            let (lo, hi) = (a.min(b), a.max(b));
            // 0-indexed symbol j is [j+1, j+2], covered iff lo <= j < hi
            (lo..hi).map(|j| (j, sign)).collect()
        })
        .collect())
}

pub fn markov_graph(theta: &Permutation) -> Result<MarkovGraph> {
    let routes = interval_routes(theta)?;
    MarkovGraph::from_routes(theta.len() - 1, &routes)
}

pub fn markov_matrix(theta: &Permutation) -> Result<IntMatrix> {
    Ok(markov_graph(theta)?.markov_matrix())
}

pub fn om_of(theta: &Permutation) -> Result<IntMatrix> {
    Ok(markov_graph(theta)?.oriented_matrix())
}

/// Both matrices at once, `(M, OM)`.
pub fn matrices_of(theta: &Permutation) -> Result<(IntMatrix, IntMatrix)> {
    let g = markov_graph(theta)?;
    Ok((g.markov_matrix(), g.oriented_matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SignedMatrix;
    use crate::permutation::{enumerate_all, enumerate_cycles};
    use num_bigint::BigInt;

    fn small(m: &SignedMatrix<BigInt>) -> Vec<Vec<i64>> {
        m.rows()
            .iter()
            .map(|r| r.iter().map(|v| v.to_i64().expect("small entry")).collect())
            .collect()
    }

    fn cyc(c: &[usize]) -> Permutation {
        Permutation::from_cycles(c.len(), &[c.to_vec()]).unwrap()
    }

    fn edge(s: usize, t: usize, sign: Sign) -> GraphEdge {
        GraphEdge {
            source: s - 1,
            target: t - 1,
            sign,
        }
    }

    #[test]
    fn four_cycle_graph() {
        let g = markov_graph(&cyc(&[1, 2, 3, 4])).unwrap();
        let mut expected = vec![
            edge(1, 2, Sign::Plus),
            edge(2, 3, Sign::Plus),
            edge(3, 1, Sign::Minus),
            edge(3, 2, Sign::Minus),
            edge(3, 3, Sign::Minus),
        ];
        expected.sort();
        assert_eq!(g.edges(), expected.as_slice());
    }

    #[test]
    fn identity_graph_is_loops() {
        let g = markov_graph(&Permutation::identity(4)).unwrap();
        assert_eq!(
            g.edges(),
            &[
                edge(1, 1, Sign::Plus),
                edge(2, 2, Sign::Plus),
                edge(3, 3, Sign::Plus)
            ]
        );
        assert!(om_of(&Permutation::identity(4)).unwrap().is_identity());
    }

    #[test]
    fn transposition_graph() {
        let g = markov_graph(&cyc(&[1, 2])).unwrap();
        assert_eq!(g.edges(), &[edge(1, 1, Sign::Minus)]);
    }

    #[test]
    fn degenerate_permutation_rejected() {
        assert!(markov_graph(&Permutation::identity(1)).is_err());
        assert!(om_of(&Permutation::identity(1)).is_err());
    }

    #[test]
    fn markov_matrix_examples() {
        let m = markov_matrix(&cyc(&[1, 2, 3, 4])).unwrap();
        assert_eq!(small(&m), vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1]]);
        assert!(markov_matrix(&Permutation::identity(4)).unwrap().is_identity());
        let m = markov_matrix(&cyc(&[1, 3, 2])).unwrap();
        assert_eq!(small(&m), vec![vec![1, 1], vec![1, 0]]);
    }

    #[test]
    fn oriented_matrix_examples() {
        let theta = cyc(&[1, 2, 3, 4]);
        let om = om_of(&theta).unwrap();
        assert_eq!(small(&om), vec![vec![0, 0, -1], vec![1, 0, -1], vec![0, 1, -1]]);
        let om2 = om_of(&theta.power(2)).unwrap();
        assert_eq!(small(&om2), vec![vec![0, -1, 1], vec![0, -1, 0], vec![1, -1, 0]]);
        let om = om_of(&cyc(&[1, 3, 4, 2])).unwrap();
        assert_eq!(small(&om).iter().enumerate().map(|(i, r)| r[i]).collect::<Vec<_>>(), vec![-1, 1, -1]);
    }

    #[test]
    fn worked_example_powers_and_traces() {
        let theta = cyc(&[1, 2, 3, 4]);
        let (m, om) = matrices_of(&theta).unwrap();
        assert_eq!(small(&m.pow(2)), vec![vec![0, 1, 1], vec![0, 1, 2], vec![1, 1, 2]]);
        assert_eq!(small(&m.pow(4)), vec![vec![1, 2, 4], vec![2, 3, 6], vec![2, 4, 7]]);
        assert_eq!(small(&om.pow(2)), vec![vec![0, -1, 1], vec![0, -1, 0], vec![1, -1, 0]]);
        assert_eq!(m.trace(), 1.into());
        assert_eq!(m.pow(2).trace(), 3.into());
        assert_eq!(m.pow(4).trace(), 11.into());
        // 31 walks of length 4 in total
        let total: i64 = small(&m.pow(4)).iter().flatten().sum();
        assert_eq!(total, 31);
    }

    #[test]
    fn unsigned_powers_differ_from_power_permutation() {
        let theta = cyc(&[1, 2, 3, 4]);
        let m = markov_matrix(&theta).unwrap();
        let m_of_square = markov_matrix(&theta.power(2)).unwrap();
        assert_eq!(small(&m_of_square), vec![vec![0, 1, 1], vec![0, 1, 0], vec![1, 1, 0]]);
        assert_ne!(m.pow(2), m_of_square);
    }

    #[test]
    fn oriented_entries_are_units_and_match_unsigned() {
        for n in 2..=6 {
            for theta in enumerate_all(n) {
                let (m, om) = matrices_of(&theta).unwrap();
                assert_eq!(om.abs(), m, "{theta}");
                assert!(small(&om).iter().flatten().all(|v| v.abs() <= 1));
            }
        }
    }

    #[test]
    fn interval_graphs_have_no_parallel_edges() {
        for theta in enumerate_cycles(6).unwrap() {
            let g = markov_graph(&theta).unwrap();
            let mut pairs: Vec<_> = g.edges().iter().map(|e| (e.source, e.target)).collect();
            let before = pairs.len();
            pairs.dedup();
            assert_eq!(pairs.len(), before);
        }
    }

    #[test]
    fn dot_lists_signed_edges() {
        let g = markov_graph(&cyc(&[1, 2, 3, 4])).unwrap();
        let dot = g.to_dot("markov");
        assert!(dot.starts_with("digraph markov {"));
        assert_eq!(dot.matches(" -> ").count(), 5);
        assert!(dot.contains("E3 -> E3 [label=\"-\"]"));
        assert!(dot.contains("E1 -> E2 [label=\"+\"]"));
    }

    #[test]
    fn graph_from_oriented_matrix_round_trips() {
        let g = markov_graph(&cyc(&[1, 3, 4, 2])).unwrap();
        let back = MarkovGraph::from_oriented_matrix(&g.oriented_matrix()).unwrap();
        assert_eq!(back, g);
    }
}
