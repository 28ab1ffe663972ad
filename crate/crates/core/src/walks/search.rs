use crate::error::{DynError, Result};
use crate::markov::{MarkovGraph, Sign};

use super::{is_repetitive, Walk};

/// Default bound on DFS nodes visited by one enumeration.
pub const DEFAULT_WALK_CAP: usize = 1_000_000;

const PLUS: u8 = 1;
const MINUS: u8 = 2;

fn bit(s: Sign) -> u8 {
    match s {
        Sign::Plus => PLUS,
        Sign::Minus => MINUS,
    }
}

/// Exploration budget for walk searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchCaps {
    pub visited_nodes: usize,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            visited_nodes: DEFAULT_WALK_CAP,
        }
    }
}

/// `table[l][v]` holds the signs of walks of length `l` from `v` to `base`.
fn sign_reach(g: &MarkovGraph, base: usize, k: usize) -> Vec<Vec<u8>> {
    let d = g.vertex_count();
    let mut table = Vec::with_capacity(k + 1);
    let mut zero = vec![0u8; d];
    zero[base] = PLUS;
    table.push(zero);
    for l in 1..=k {
        let prev = &table[l - 1];
        let row: Vec<u8> = (0..d)
            .map(|v| {
                g.out_edges(v).fold(0u8, |acc, e| {
                    let m = prev[e.target];
                    let flipped = if e.sign == Sign::Minus {
                        ((m & PLUS) << 1) | ((m & MINUS) >> 1)
                    } else {
                        m
                    };
                    acc | flipped
                })
            })
            .collect();
        table.push(row);
    }
    table
}

fn admissible(mask: u8, so_far: Sign, wanted: Option<Sign>) -> bool {
    match wanted {
        None => mask != 0,
        Some(w) => mask & bit(so_far * w) != 0,
    }
}

/// Depth-first enumeration of closed walks of length `k` at `base`, in
/// lexicographic order of vertex sequences (ascending target, `+` before `-`).
/// `visit` returns `false` to stop early.
fn dfs_closed(
    g: &MarkovGraph,
    base: usize,
    k: usize,
    wanted: Option<Sign>,
    cap: usize,
    visited: &mut usize,
    mut visit: impl FnMut(Walk) -> Result<bool>,
) -> Result<()> {
    if base >= g.vertex_count() {
        return Err(DynError::contract(format!("vertex E{} not in graph", base + 1)));
    }
    if k == 0 {
        return Err(DynError::contract("walk length must be positive"));
    }
    let reach = sign_reach(g, base, k);
    if !admissible(reach[k][base], Sign::Plus, wanted) {
        return Ok(());
    }
    let mut vertices = vec![base];
    let mut steps: Vec<Sign> = Vec::with_capacity(k);
    // per depth: the candidate edges still to try
    let mut pending: Vec<Vec<(usize, Sign)>> = Vec::with_capacity(k);
    let children = |v: usize, depth: usize, so_far: Sign| -> Vec<(usize, Sign)> {
        let remaining = k - depth - 1;
        let mut c: Vec<(usize, Sign)> = g
            .out_edges(v)
            .filter(|e| admissible(reach[remaining][e.target], so_far * e.sign, wanted))
            .map(|e| (e.target, e.sign))
            .collect();
        c.reverse();
        c
    };
    pending.push(children(base, 0, Sign::Plus));
    *visited += 1;
    while let Some(top) = pending.last_mut() {
        match top.pop() {
            None => {
                pending.pop();
                vertices.pop();
                steps.pop();
            }
            Some((target, sign)) => {
                *visited += 1;
                if *visited > cap {
                    return Err(DynError::resource(cap, format!("enumerating closed walks of length {k}")));
                }
                vertices.push(target);
                steps.push(sign);
                let depth = steps.len();
                if depth == k {
                    let keep_going = visit(Walk::from_parts(vertices.clone(), steps.clone()))?;
                    if !keep_going {
                        return Ok(());
                    }
                    vertices.pop();
                    steps.pop();
                } else {
                    let so_far = steps.iter().fold(Sign::Plus, |a, &s| a * s);
                    pending.push(children(target, depth, so_far));
                }
            }
        }
    }
    Ok(())
}

/// All closed walks of length `k` based at `base` (0-indexed), optionally
/// restricted to one sign and to non-repetitive walks.
pub fn enumerate_closed(
    g: &MarkovGraph,
    base: usize,
    k: usize,
    sign_filter: Option<Sign>,
    nonrepetitive_only: bool,
    caps: SearchCaps,
) -> Result<Vec<Walk>> {
    let mut out = Vec::new();
    let mut visited = 0;
    dfs_closed(g, base, k, sign_filter, caps.visited_nodes, &mut visited, |w| {
        if !nonrepetitive_only || !is_repetitive(&w)? {
            out.push(w);
        }
        Ok(true)
    })?;
    Ok(out)
}

/// Lexicographically least closed walk of length `k` at `base` with the given
/// sign. The sign-reachability table prunes every dead branch, so this never
/// backtracks.
pub fn first_closed(g: &MarkovGraph, base: usize, k: usize, sign: Sign) -> Result<Option<Walk>> {
    let mut found = None;
    let mut visited = 0;
    dfs_closed(g, base, k, Some(sign), usize::MAX, &mut visited, |w| {
        found = Some(w);
        Ok(false)
    })?;
    Ok(found)
}

/// First negative non-repetitive closed walk of length `k`, scanning base
/// vertices in ascending order. `Ok(None)` means the exhaustive search found
/// none; running out of budget is an error.
pub fn find_negative_nonrepetitive(g: &MarkovGraph, k: usize, caps: SearchCaps) -> Result<Option<Walk>> {
    let mut visited = 0;
    for base in 0..g.vertex_count() {
        let mut found = None;
        dfs_closed(g, base, k, Some(Sign::Minus), caps.visited_nodes, &mut visited, |w| {
            if is_repetitive(&w)? {
                Ok(true)
            } else {
                found = Some(w);
                Ok(false)
            }
        })?;
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{markov_graph, markov_matrix};
    use crate::permutation::{enumerate_cycles, Permutation};
    use crate::walks::count_closed;
    use num_traits::ToPrimitive;
    use std::collections::BTreeSet;

    fn four_cycle_graph() -> MarkovGraph {
        markov_graph(&Permutation::parse_cycles("1,2,3,4", None).unwrap()).unwrap()
    }

    /// Independent enumeration: every vertex sequence of length k+1, kept if
    /// each step is an edge.
    fn brute_closed(g: &MarkovGraph, base: usize, k: usize) -> Vec<Walk> {
        let d = g.vertex_count();
        let mut out = Vec::new();
        let total = d.pow(k as u32 - 1);
        for code in 0..total {
            let mut seq = vec![base];
            let mut c = code;
            for _ in 0..k - 1 {
                seq.push(c % d);
                c /= d;
            }
            seq.push(base);
            if let Ok(w) = Walk::in_graph(g, seq) {
                out.push(w);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn length_one_loops() {
        let g = four_cycle_graph();
        let at3 = enumerate_closed(&g, 2, 1, None, false, SearchCaps::default()).unwrap();
        assert_eq!(at3.len(), 1);
        assert_eq!(at3[0].labels(), vec![3, 3]);
        assert_eq!(at3[0].sign(), Sign::Minus);
        assert!(enumerate_closed(&g, 0, 1, None, false, SearchCaps::default()).unwrap().is_empty());
    }

    #[test]
    fn finds_the_length_five_walk() {
        let g = four_cycle_graph();
        let walks = enumerate_closed(&g, 2, 5, None, true, SearchCaps::default()).unwrap();
        assert!(walks.iter().any(|w| w.labels() == vec![3, 1, 2, 3, 2, 3]));
        assert!(walks.iter().all(|w| !is_repetitive(w).unwrap()));
    }

    #[test]
    fn output_is_sorted_and_matches_brute_force() {
        for theta in enumerate_cycles(5).unwrap() {
            let g = markov_graph(&theta).unwrap();
            for base in 0..g.vertex_count() {
                for k in 1..=5 {
                    let fast = enumerate_closed(&g, base, k, None, false, SearchCaps::default()).unwrap();
                    assert_eq!(fast, brute_closed(&g, base, k), "{theta} base {base} k {k}");
                    for sign in [Sign::Plus, Sign::Minus] {
                        let filtered =
                            enumerate_closed(&g, base, k, Some(sign), false, SearchCaps::default()).unwrap();
                        let expected: Vec<_> = fast.iter().filter(|w| w.sign() == sign).cloned().collect();
                        assert_eq!(filtered, expected);
                        assert_eq!(first_closed(&g, base, k, sign).unwrap(), expected.first().cloned());
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_matches_trace_counts() {
        for n in 2..=6 {
            for theta in enumerate_cycles(n).unwrap() {
                let g = markov_graph(&theta).unwrap();
                let m = markov_matrix(&theta).unwrap();
                for k in 1..=8 {
                    let enumerated: usize = (0..g.vertex_count())
                        .map(|b| enumerate_closed(&g, b, k, None, false, SearchCaps::default()).unwrap().len())
                        .sum();
                    let counted = count_closed(&m, k as u64).unwrap().to_usize().unwrap();
                    assert_eq!(enumerated, counted, "{theta} k = {k}");
                }
            }
        }
    }

    #[test]
    fn rotation_classes_match_mobius_count() {
        for n in 2..=5 {
            for theta in enumerate_cycles(n).unwrap() {
                let g = markov_graph(&theta).unwrap();
                let m = markov_matrix(&theta).unwrap();
                for k in 1..=6 {
                    let mut classes = BTreeSet::new();
                    for b in 0..g.vertex_count() {
                        for w in enumerate_closed(&g, b, k, None, true, SearchCaps::default()).unwrap() {
                            classes.insert(w.canonical_rotation().unwrap());
                        }
                    }
                    let counted = crate::walks::count_nonrepetitive_closed(&m, k as u64).unwrap();
                    assert_eq!(classes.len(), counted.to_usize().unwrap(), "{theta} k = {k}");
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = four_cycle_graph();
        let err = enumerate_closed(&g, 2, 20, None, false, SearchCaps { visited_nodes: 50 }).unwrap_err();
        assert!(matches!(err, DynError::Resource { cap: 50, .. }));
    }

    #[test]
    fn negative_nonrepetitive_search() {
        let g = four_cycle_graph();
        let w = find_negative_nonrepetitive(&g, 4, SearchCaps::default()).unwrap().unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.sign(), Sign::Minus);
        assert!(!is_repetitive(&w).unwrap());
    }

    #[test]
    fn bad_base_rejected() {
        let g = four_cycle_graph();
        assert!(enumerate_closed(&g, 7, 2, None, false, SearchCaps::default()).is_err());
    }
}
