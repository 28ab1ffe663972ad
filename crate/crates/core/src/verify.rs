//! Exhaustive and seeded sweeps over small cases. Each sweep stops at the
//! first counterexample in enumeration order, so reports are reproducible.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{DynError, Result};
use crate::markov::{markov_graph, markov_matrix, om_of};
use crate::orders::shark_forced;
use crate::permutation::{enumerate_all, enumerate_cycles, Permutation};
use crate::pwl::least_period_set;
use crate::trees::{random_derangement, random_tree, tree_trace_check, TreeVertexMap};
use crate::walks::{count_closed, count_nonrepetitive_closed, enumerate_closed, SearchCaps};

/// Largest `n` swept exhaustively over all permutations; above it the trace
/// sweep samples.
const EXHAUSTIVE_MAX: usize = 7;
const SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Trace,
    Power,
    Product,
    Forcing,
    TreeTrace,
    WalkCounts,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Trace,
        Suite::Power,
        Suite::Product,
        Suite::Forcing,
        Suite::TreeTrace,
        Suite::WalkCounts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Trace => "trace",
            Suite::Power => "power",
            Suite::Product => "product",
            Suite::Forcing => "forcing",
            Suite::TreeTrace => "tree-trace",
            Suite::WalkCounts => "walk-counts",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = DynError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| DynError::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepParams {
    pub n_max: usize,
    pub upto: usize,
    pub seed: u64,
    pub cap: usize,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams {
            n_max: 6,
            upto: 8,
            seed: 0,
            cap: crate::pwl::DEFAULT_PIECE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub suite: Suite,
    pub checked: usize,
    pub counterexample: Option<Value>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "checked": self.checked,
            "passed": self.passed(),
            "counterexample": self.counterexample,
        })
    }
}

pub fn run(suite: Suite, p: SweepParams) -> Result<SweepReport> {
    match suite {
        Suite::Trace => trace_sweep(p.n_max, p.seed),
        Suite::Power => power_sweep(p.n_max, p.upto),
        Suite::Product => product_sweep(p.n_max),
        Suite::Forcing => forcing_sweep(p.n_max, p.upto, p.cap),
        Suite::TreeTrace => tree_trace_sweep(200, p.n_max.max(3), p.seed),
        Suite::WalkCounts => walk_count_sweep(p.n_max, p.upto, p.cap),
    }
}

/// Runs `check` over `items` in parallel and keeps the first failure in
/// input order.
fn sweep<T: Sync>(
    suite: Suite,
    items: &[T],
    check: impl Fn(&T) -> Result<Option<Value>> + Sync,
) -> Result<SweepReport> {
    let first = items
        .par_iter()
        .map(&check)
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    let counterexample = match first {
        None => None,
        Some(r) => r?,
    };
    Ok(SweepReport {
        suite,
        checked: items.len(),
        counterexample,
    })
}

fn cycles_upto(n_max: usize) -> Result<Vec<Permutation>> {
    let mut out = Vec::new();
    for n in 2..=n_max {
        out.extend(enumerate_cycles(n)?);
    }
    Ok(out)
}

/// Fixed-point-free permutations have `tr OM = -1`; `θ^k = id` gives
/// `OM^k = I`.
pub fn trace_sweep(n_max: usize, seed: u64) -> Result<SweepReport> {
    let mut perms = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 2..=n_max {
        if n <= EXHAUSTIVE_MAX {
            perms.extend(enumerate_all(n));
        } else {
            let mut image: Vec<usize> = (1..=n).collect();
            for _ in 0..SAMPLES {
                image.shuffle(&mut rng);
                perms.push(Permutation::from_image(&image)?);
            }
        }
    }
    sweep(Suite::Trace, &perms, |theta| {
        let om = om_of(theta)?;
        if theta.fixed_points().is_empty() {
            let tr = om.trace();
            if tr != (-1).into() {
                return Ok(Some(json!({"perm": theta.image(), "check": "trace", "trace": tr.to_string()})));
            }
        }
        if !om.pow(theta.order() as u64).is_identity() {
            return Ok(Some(json!({"perm": theta.image(), "check": "order", "order": theta.order()})));
        }
        Ok(None)
    })
}

/// `OM(θ)^k = OM(θ^k)` for `n`-cycles.
pub fn power_sweep(n_max: usize, k_max: usize) -> Result<SweepReport> {
    let cycles = cycles_upto(n_max)?;
    sweep(Suite::Power, &cycles, |theta| {
        let om = om_of(theta)?;
        let mut acc = om.clone();
        for k in 1..=k_max {
            if acc != om_of(&theta.power(k))? {
                return Ok(Some(json!({"perm": theta.image(), "k": k})));
            }
            acc = acc.mul(&om)?;
        }
        Ok(None)
    })
}

/// `OM(α)·OM(β) = OM(α∘β)` over all pairs.
pub fn product_sweep(n_max: usize) -> Result<SweepReport> {
    let mut pairs = Vec::new();
    for n in 2..=n_max {
        let perms: Vec<Permutation> = enumerate_all(n).collect();
        for a in &perms {
            for b in &perms {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    sweep(Suite::Product, &pairs, |(a, b)| {
        let lhs = om_of(a)?.mul(&om_of(b)?)?;
        if lhs != om_of(&Permutation::compose(a, b)?)? {
            return Ok(Some(json!({"alpha": a.image(), "beta": b.image()})));
        }
        Ok(None)
    })
}

/// Every period forced by an `n`-cycle up to `upto` occurs for its
/// connect-the-dots map.
pub fn forcing_sweep(n_max: usize, upto: usize, cap: usize) -> Result<SweepReport> {
    let cycles = cycles_upto(n_max)?;
    sweep(Suite::Forcing, &cycles, |theta| {
        let found = least_period_set(theta, upto, cap)?;
        let forced: BTreeSet<usize> = shark_forced(theta.len() as u64, upto as u64)
            .into_iter()
            .map(|m| m as usize)
            .collect();
        let missing: Vec<usize> = forced.difference(&found).copied().collect();
        if missing.is_empty() {
            Ok(None)
        } else {
            Ok(Some(json!({"perm": theta.image(), "missing": missing})))
        }
    })
}

/// Random trees with fixed-point-free vertex permutations: trace `-1`, one dot
/// per vertex, `1 - OM_ii` dots on each edge.
pub fn tree_trace_sweep(count: usize, v_max: usize, seed: u64) -> Result<SweepReport> {
    if v_max < 3 {
        return Err(DynError::domain("tree sweeps need v_max >= 3"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut maps = Vec::with_capacity(count);
    for _ in 0..count {
        let v = rng.gen_range(3..=v_max);
        let tree = random_tree(v, &mut rng)?;
        maps.push(TreeVertexMap::new(tree, random_derangement(v, &mut rng)?)?);
    }
    sweep(Suite::TreeTrace, &maps, |tvm| {
        let cert = tree_trace_check(tvm)?;
        let v = tvm.tree().vertex_count();
        if cert.trace != -1 || cert.total != v || !cert.matches_diagonal() {
            return Ok(Some(json!({"tree": tvm.to_json(), "certificate": cert})));
        }
        Ok(None)
    })
}

/// Enumerated closed walks agree with `tr M^k`, and rotation classes of
/// non-repetitive ones with the Möbius count.
pub fn walk_count_sweep(n_max: usize, k_max: usize, cap: usize) -> Result<SweepReport> {
    let cycles = cycles_upto(n_max)?;
    let caps = SearchCaps { visited_nodes: cap };
    sweep(Suite::WalkCounts, &cycles, |theta| {
        let g = markov_graph(theta)?;
        let m = markov_matrix(theta)?;
        for k in 1..=k_max {
            let mut total = 0usize;
            let mut classes = BTreeSet::new();
            for base in 0..g.vertex_count() {
                for w in enumerate_closed(&g, base, k, None, false, caps)? {
                    total += 1;
                    if !crate::walks::is_repetitive(&w)? {
                        classes.insert(w.canonical_rotation()?);
                    }
                }
            }
            let closed = count_closed(&m, k as u64)?.to_usize();
            let nonrep = count_nonrepetitive_closed(&m, k as u64)?.to_usize();
            if closed != Some(total) || nonrep != Some(classes.len()) {
                return Ok(Some(json!({
                    "perm": theta.image(),
                    "k": k,
                    "enumerated": total,
                    "classes": classes.len(),
                })));
            }
        }
        Ok(None)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps_pass() {
        assert!(trace_sweep(5, 1).unwrap().passed());
        assert!(power_sweep(5, 8).unwrap().passed());
        assert!(product_sweep(4).unwrap().passed());
        assert!(forcing_sweep(4, 6, 100_000).unwrap().passed());
        assert!(tree_trace_sweep(40, 7, 3).unwrap().passed());
        assert!(walk_count_sweep(4, 5, 100_000).unwrap().passed());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn sampled_trace_sweep_is_deterministic() {
        let a = trace_sweep(8, 5).unwrap();
        assert!(a.passed());
        assert_eq!(a.checked, trace_sweep(8, 5).unwrap().checked);
    }

    #[test]
    fn counterexamples_are_reported() {
        let report = sweep(Suite::Forcing, &[3usize, 5], |&n| {
            Ok((n == 5).then(|| json!({"n": n})))
        })
        .unwrap();
        assert_eq!(report.counterexample, Some(json!({"n": 5})));
    }
}
