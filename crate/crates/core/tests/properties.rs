use std::cmp::Ordering;

use num_bigint::BigInt;
use proptest::prelude::*;

use combdyn::markov::{markov_graph, om_of};
use combdyn::orders::{remove_ones, shark_cmp};
use combdyn::trees::{compose_routes, prufer_decode, reduce_route, route_matrix, tree_trace_check, TreeVertexMap};
use combdyn::walks::{count_closed, enumerate_closed, SearchCaps};
use combdyn::{ExactMap, Permutation, Rational};

fn perm(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Permutation> {
    n.prop_flat_map(|n| Just((1..=n).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|image| Permutation::from_image(&image).unwrap())
}

fn derangement(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Permutation> {
    perm(n).prop_filter("fixed point", |p| p.fixed_points().is_empty())
}

fn tree_map(v: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = TreeVertexMap> {
    derangement(v).prop_flat_map(|p| {
        let v = p.len();
        proptest::collection::vec(1..=v, v - 2).prop_map(move |code| {
            TreeVertexMap::new(prufer_decode(v, &code).unwrap(), p.clone()).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn fixed_point_free_trace(theta in derangement(2..=10)) {
        prop_assert_eq!(om_of(&theta).unwrap().trace(), BigInt::from(-1));
    }

    #[test]
    fn product_rule(a in perm(5..=8), seed in any::<u64>()) {
        let n = a.len();
        let mut image: Vec<usize> = (1..=n).collect();
        image.rotate_left((seed as usize) % n);
        image.swap(0, (seed as usize / 7) % n);
        let b = Permutation::from_image(&image).unwrap();
        let lhs = om_of(&a).unwrap().mul(&om_of(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs, om_of(&Permutation::compose(&a, &b).unwrap()).unwrap());
    }

    #[test]
    fn enumeration_counts_match_traces(theta in perm(2..=7), k in 1usize..=6) {
        let g = markov_graph(&theta).unwrap();
        let total: usize = (0..g.vertex_count())
            .map(|b| enumerate_closed(&g, b, k, None, false, SearchCaps::default()).unwrap().len())
            .sum();
        prop_assert_eq!(BigInt::from(total), count_closed(&g.markov_matrix(), k as u64).unwrap());
    }

    #[test]
    fn composition_evaluates_pointwise(theta in perm(2..=7), num in 0i64..=600, k in 1usize..=3) {
        let f = ExactMap::from_permutation(&theta).unwrap();
        let x = Rational::new(BigInt::from(600 + num * (theta.len() as i64 - 1)), BigInt::from(600));
        let mut y = x.clone();
        for _ in 0..k {
            y = f.eval(&y).unwrap();
        }
        prop_assert_eq!(f.power(k).unwrap().eval(&x).unwrap(), y);
    }

    #[test]
    fn tree_trace_and_dots(tvm in tree_map(3..=10)) {
        let cert = tree_trace_check(&tvm).unwrap();
        prop_assert_eq!(cert.trace, -1);
        prop_assert_eq!(cert.total, tvm.tree().vertex_count());
        prop_assert!(cert.matches_diagonal());
    }

    #[test]
    fn route_composition_matches_matrix_product(tvm in tree_map(3..=8)) {
        let r = tvm.routes();
        let e = tvm.tree().edge_count();
        let (_, om) = tvm.matrices().unwrap();
        let twice = compose_routes(&r, &r);
        prop_assert_eq!(route_matrix(e, &twice).unwrap(), om.pow(2));
        prop_assert_eq!(compose_routes(&twice, &r), compose_routes(&r, &twice));
        for route in &twice {
            prop_assert_eq!(&reduce_route(route), route);
        }
    }

    #[test]
    fn sharkovsky_order_is_antisymmetric(a in 1u64..1_000_000, b in 1u64..1_000_000) {
        prop_assert_eq!(shark_cmp(a, b), shark_cmp(b, a).reverse());
        prop_assert_eq!(shark_cmp(a, b) == Ordering::Equal, a == b);
    }

    #[test]
    fn remove_ones_clears_one_bit_per_step(v in 1u64..u64::MAX) {
        let seq = remove_ones(v);
        prop_assert_eq!(seq.len() as u32, v.count_ones());
        prop_assert_eq!(*seq.last().unwrap(), 0);
        let mut prev = v;
        for &x in &seq {
            prop_assert_eq!((prev ^ x).count_ones(), 1);
            prop_assert!(x < prev);
            prev = x;
        }
    }
}
