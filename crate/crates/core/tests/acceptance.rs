//! Acceptance suite: one PASS/FAIL line per criterion, each with its time
//! budget.

use std::collections::BTreeSet;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use combdyn::markov::{markov_graph, markov_matrix, matrices_of};
use combdyn::orders::{basic_forced, remove_ones, shark_cmp, shark_forced, tree_forced};
use combdyn::permutation::{enumerate_cycles, Permutation};
use combdyn::pwl::{lift_walk, lift_walk_through};
use combdyn::trees::{tree_walk_witnesses, TreeVertexMap};
use combdyn::verify;
use combdyn::walks::{
    count_nonrepetitive_closed, enumerate_closed, horseshoe_walks, horseshoe_witness, is_repetitive, lemma3_walk,
    lemma7_witness, power_of_two_walk, SearchCaps, Walk,
};
use combdyn::{ExactMap, IntMatrix, Sign};

type Outcome = Result<(), String>;

fn check(cond: bool, what: impl Into<String>) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn mat(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_i64_rows(rows).unwrap()
}

fn four_cycle() -> Permutation {
    Permutation::parse_cycles("1,2,3,4", None).unwrap()
}

fn worked_example_matrices() -> Outcome {
    let theta = four_cycle();
    let (m, om) = matrices_of(&theta).unwrap();
    check(m == mat(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1]]), "M")?;
    check(m.pow(2) == mat(&[&[0, 1, 1], &[0, 1, 2], &[1, 1, 2]]), "M^2")?;
    check(m.pow(4) == mat(&[&[1, 2, 4], &[2, 3, 6], &[2, 4, 7]]), "M^4")?;
    check(om == mat(&[&[0, 0, -1], &[1, 0, -1], &[0, 1, -1]]), "OM")?;
    check(om.pow(2) == mat(&[&[0, -1, 1], &[0, -1, 0], &[1, -1, 0]]), "OM^2")?;
    check(
        markov_matrix(&theta.power(2)).unwrap() == mat(&[&[0, 1, 1], &[0, 1, 0], &[1, 1, 0]]),
        "M(θ^2)",
    )?;
    let traces: Vec<i64> = [1u64, 2, 4].iter().map(|&k| m.pow(k).trace().try_into().unwrap()).collect();
    check(traces == [1, 3, 11], format!("traces {traces:?}"))
}

fn walk_counts() -> Outcome {
    let theta = four_cycle();
    let m = markov_matrix(&theta).unwrap();
    let g = markov_graph(&theta).unwrap();
    for (k, want) in [(2usize, 1u32), (4, 2)] {
        let counted = count_nonrepetitive_closed(&m, k as u64).unwrap();
        check(counted == want.into(), format!("count at k = {k} is {counted}"))?;
        let mut classes = BTreeSet::new();
        for base in 0..3 {
            for w in enumerate_closed(&g, base, k, None, true, SearchCaps::default()).unwrap() {
                classes.insert(w.canonical_rotation().unwrap());
            }
        }
        check(classes.len() == want as usize, format!("enumerated {} classes at k = {k}", classes.len()))?;
    }
    Ok(())
}

fn report(r: verify::SweepReport) -> Outcome {
    match r.counterexample {
        None => Ok(()),
        Some(c) => Err(format!("{} counterexample {c}", r.suite)),
    }
}

fn trace_identities() -> Outcome {
    report(verify::trace_sweep(7, 2024).unwrap())
}

fn algebra() -> Outcome {
    report(verify::power_sweep(6, 12).unwrap())?;
    report(verify::product_sweep(5).unwrap())
}

fn sharkovsky_soundness() -> Outcome {
    report(verify::forcing_sweep(6, 8, combdyn::pwl::DEFAULT_PIECE_CAP).unwrap())
}

fn forcing_walk_ok(w: &Walk, len: usize) -> Outcome {
    check(w.is_closed() && w.len() == len, format!("{w} should be closed of length {len}"))?;
    check(w.sign() == Sign::Minus, format!("{w} is not negative"))?;
    check(!is_repetitive(w).unwrap(), format!("{w} is repetitive"))
}

fn lifts_to_period(theta: &Permutation, w: &Walk) -> Outcome {
    let rec = lift_walk(theta, w).map_err(|e| format!("lift of {w} for {theta}: {e}"))?;
    check(
        rec.least_period == w.len(),
        format!("{w} for {theta} lifted to least period {}", rec.least_period),
    )
}

fn constructive_walks() -> Outcome {
    for n in [3usize, 5, 6] {
        for theta in enumerate_cycles(n).unwrap() {
            for j in 0..=3u32 {
                if (1usize << j) % n != 0 {
                    let w = power_of_two_walk(&theta, j).unwrap();
                    forcing_walk_ok(&w, 1 << j)?;
                    lifts_to_period(&theta, &w)?;
                }
            }
            let (k, r) = (n.trailing_zeros(), n >> n.trailing_zeros());
            for s in r + 1..=(12 >> k) {
                let w = lemma3_walk(&theta, s as u64).unwrap();
                forcing_walk_ok(&w, s << k)?;
                lifts_to_period(&theta, &w)?;
            }
            let l7 = lemma7_witness(&theta).unwrap();
            forcing_walk_ok(&l7.walk, 3 << (k + 1))?;
            lifts_to_period(&theta, &l7.walk)?;
            if let Some(h) = horseshoe_witness(&theta).unwrap() {
                let f = ExactMap::from_permutation(&theta).unwrap();
                for len in 1..=8 {
                    let w = horseshoe_walks(&h, &theta, len).unwrap();
                    forcing_walk_ok(&w, len)?;
                    let lift = lift_walk_through(&f, &h.intervals(), &w).unwrap();
                    check(
                        lift.record.least_period == len,
                        format!("horseshoe walk of length {len} for {theta}"),
                    )?;
                }
            }
        }
    }
    Ok(())
}

const FIG10: &str = include_str!("../fixtures/fig10.json");

fn tree_counterexample() -> Outcome {
    let tvm = TreeVertexMap::from_json(FIG10).unwrap();
    let g = tvm.graph().unwrap();
    let mut got: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.source + 1, e.target + 1)).collect();
    got.sort();
    let mut want = vec![
        (1, 1),
        (1, 2),
        (2, 3),
        (3, 4),
        (4, 5),
        (5, 6),
        (6, 7),
        (7, 8),
        (8, 1),
        (3, 2),
        (7, 4),
    ];
    want.sort();
    check(got == want, format!("edges {got:?}"))?;
    check(g.edge_sign(0, 0) == Some(Sign::Minus), "loop at E1 should be negative")?;
    let (m, _) = tvm.matrices().unwrap();
    check(count_nonrepetitive_closed(&m, 6).unwrap() == 0.into(), "a non-repetitive 6-walk exists")?;
    check(
        tree_walk_witnesses(&tvm, 6, SearchCaps::default()).unwrap().is_none(),
        "tree_walk_witnesses found a 6-walk",
    )?;
    let tf = tree_forced(9, 12).unwrap();
    check(tf == BTreeSet::from([1, 2, 4, 8, 9, 10, 11, 12]), format!("tree_forced(9, 12) = {tf:?}"))?;
    check(shark_forced(9, 12).contains(&6), "shark_forced(9, 12) misses 6")
}

fn removing_ones() -> Outcome {
    check(remove_ones(31) == [30, 28, 24, 16, 0], format!("{:?}", remove_ones(31)))
}

fn tree_traces() -> Outcome {
    let r = verify::tree_trace_sweep(200, 9, 4).unwrap();
    check(r.checked == 200, "sweep size")?;
    report(r)
}

fn order_consistency() -> Outcome {
    for n in 1..=64u64 {
        for k in 1..=64u64 {
            let basic = basic_forced(n, k);
            let shark = shark_forced(n, k);
            if n >= 2 {
                let tree = tree_forced(n, k).unwrap();
                check(basic.is_subset(&tree), format!("basic ⊄ tree at n = {n}, K = {k}"))?;
                check(tree.is_subset(&shark), format!("tree ⊄ shark at n = {n}, K = {k}"))?;
            } else {
                check(basic.is_subset(&shark), "basic ⊄ shark at n = 1")?;
            }
        }
    }
    let range = 1..=200u64;
    for a in range.clone() {
        for b in range.clone() {
            let ab = shark_cmp(a, b);
            check(ab == shark_cmp(b, a).reverse(), format!("antisymmetry at {a}, {b}"))?;
            check((ab == std::cmp::Ordering::Equal) == (a == b), format!("totality at {a}, {b}"))?;
        }
    }
    let mut sorted: Vec<u64> = range.collect();
    sorted.sort_by(|&a, &b| shark_cmp(a, b));
    check(
        sorted.windows(2).all(|w| shark_cmp(w[0], w[1]) == std::cmp::Ordering::Less),
        "sorting is not strict",
    )?;
    for a in 1..=200u64 {
        for b in 1..=200u64 {
            if shark_cmp(a, b) != std::cmp::Ordering::Less {
                continue;
            }
            for c in 1..=200u64 {
                if shark_cmp(b, c) == std::cmp::Ordering::Less && shark_cmp(a, c) != std::cmp::Ordering::Less {
                    return Err(format!("transitivity fails at {a}, {b}, {c}"));
                }
            }
        }
    }
    Ok(())
}

// written straight to stderr so the lines survive output capture
fn line(s: String) {
    writeln!(std::io::stderr(), "{s}").ok();
}

#[test]
fn acceptance() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 10] = [
        (1, "worked-example matrices of (1,2,3,4)", Duration::from_secs(1), worked_example_matrices),
        (2, "non-repetitive walk counts", Duration::from_secs(1), walk_counts),
        (3, "trace identities, n <= 7", Duration::from_secs(30), trace_identities),
        (4, "power and product identities", Duration::from_secs(60), algebra),
        (5, "forced periods occur, n <= 6", Duration::from_secs(300), sharkovsky_soundness),
        (6, "constructive walks lift", Duration::from_secs(300), constructive_walks),
        (7, "tree counterexample", Duration::from_secs(1), tree_counterexample),
        (8, "removing ones", Duration::from_secs(1), removing_ones),
        (9, "random tree traces", Duration::from_secs(10), tree_traces),
        (10, "order consistency", Duration::from_secs(5), order_consistency),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = match catch_unwind(AssertUnwindSafe(run)) {
            Ok(r) => r,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into())),
        };
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            check(
                elapsed <= budget,
                format!("took {:.2}s, budget {}s", elapsed.as_secs_f64(), budget.as_secs()),
            )
        });
        match &outcome {
            Ok(()) => line(format!("PASS criterion {id:>2}: {name} ({:.2}s)", elapsed.as_secs_f64())),
            Err(e) => {
                line(format!("FAIL criterion {id:>2}: {name} ({:.2}s): {e}", elapsed.as_secs_f64()));
                failed.push(id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
