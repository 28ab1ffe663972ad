//! Between closed walks and periodic points.
//!
//! A closed walk `V_0 → V_1 → … → V_m = V_0` through intervals that cover one
//! another is lifted by backward nesting: `J_m = V_0` and `J_t ⊆ V_t` with
//! `f(J_t) = J_{t+1}`, endpoints to endpoints in the orientation of the edge.
//! Then `f^m` maps `J_0` onto `V_0 ⊇ J_0` and has a fixed point there.

use super::{record_for, PeriodicPointRecord, PlMap};
use crate::error::{DynError, Result};
use crate::markov::{markov_graph, MarkovGraph, Sign};
use crate::permutation::Permutation;
use crate::scalar::Scalar;
use crate::walks::{is_repetitive, Walk};
use crate::{ExactMap, Rational};

/// A lifted walk: the chosen periodic point and the nested interval `J_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lift<T: Scalar> {
    pub record: PeriodicPointRecord<T>,
    pub nest: (T, T),
    /// Every iterate stays in the interior of the interval its walk vertex
    /// names, so the itinerary is exactly the walk.
    pub interior: bool,
}

/// `[x1, x2] ⊆ [lo, hi]` with `f` mapping it onto `[u, v]`, endpoint to
/// endpoint, preserving order for `+` and reversing it for `-`.
fn cover<T: Scalar>(f: &PlMap<T>, (lo, hi): (&T, &T), (u, v): (&T, &T), sign: Sign) -> Result<(T, T)> {
    let (first, second) = match sign {
        Sign::Plus => (u, v),
        Sign::Minus => (v, u),
    };
    let fail = || DynError::contract(format!("[{lo}, {hi}] does not cover [{u}, {v}] with sign {sign}"));
    let start = f.first_hit(lo, hi, first)?.ok_or_else(fail)?;
    let x2 = f.first_hit(&start, hi, second)?.ok_or_else(fail)?;
    let x1 = f.last_hit(&start, &x2, first)?.ok_or_else(fail)?;
    Ok((x1, x2))
}

fn strictly_inside<T: Scalar>(x: &T, (lo, hi): &(T, T)) -> bool {
    x > lo && x < hi
}

/// Lifts a closed walk whose vertices index `intervals` to a periodic point
/// of `f` following it. Among the fixed points of `f^m` on `J_0` the first
/// one whose orbit avoids all interval endpoints is preferred, on a piece of
/// `f^m|J_0` whose slope has the walk's sign when possible.
pub fn lift_walk_through<T: Scalar>(f: &PlMap<T>, intervals: &[(T, T)], w: &Walk) -> Result<Lift<T>> {
    if !w.is_closed() || w.is_empty() {
        return Err(DynError::contract(format!("{w} is not a closed walk of positive length")));
    }
    let vs = w.vertices();
    if let Some(v) = vs.iter().find(|&&v| v >= intervals.len()) {
        return Err(DynError::contract(format!("walk vertex E{} has no interval", v + 1)));
    }
    let m = w.len();
    let mut nest: Vec<(T, T)> = vec![intervals[vs[0]].clone(); m + 1];
    for t in (0..m).rev() {
        let (lo, hi) = &intervals[vs[t]];
        let (u, v) = nest[t + 1].clone();
        nest[t] = cover(f, (lo, hi), (&u, &v), w.steps()[t])?;
    }
    let mut h = f.restrict(&nest[0].0, &nest[0].1)?;
    for interval in &nest[1..m] {
        h = f.restrict(&interval.0, &interval.1)?.compose(&h)?;
    }
    let (points, segments) = h.fixed_points();
    let mut candidates: Vec<T> = points;
    candidates.extend(segments.iter().map(|(a, b)| T::midpoint(a, b)));
    if candidates.is_empty() {
        return Err(DynError::invariant(format!("no fixed point of the lifted map for {w}")));
    }
    let clean = |x: &T| -> Result<bool> {
        let mut y = x.clone();
        for t in 0..m {
            if !strictly_inside(&y, &intervals[vs[t]]) {
                return Ok(false);
            }
            y = f.eval(&y)?;
        }
        Ok(true)
    };
    let slope_sign = |x: &T| -> Result<Sign> {
        let j = h.locate(x)?;
        Ok(if h.piece(j).0.is_negative() { Sign::Minus } else { Sign::Plus })
    };
    let mut chosen: Option<(T, bool)> = None;
    for x in &candidates {
        if clean(x)? && slope_sign(x)? == w.sign() {
            chosen = Some((x.clone(), true));
            break;
        }
    }
    if chosen.is_none() {
        for x in &candidates {
            if clean(x)? {
                chosen = Some((x.clone(), true));
                break;
            }
        }
    }
    let (x, interior) = chosen.unwrap_or_else(|| (candidates[0].clone(), false));
    let record = record_for(f, &x, m)?;
    Ok(Lift {
        record,
        nest: nest[0].clone(),
        interior,
    })
}

fn unit_intervals(n: usize) -> Vec<(Rational, Rational)> {
    (1..n)
        .map(|i| (Rational::from_int(i as i64), Rational::from_int(i as i64 + 1)))
        .collect()
}

fn check_in_graph(g: &MarkovGraph, w: &Walk) -> Result<()> {
    let rebuilt = Walk::in_graph(g, w.vertices().to_vec())?;
    if rebuilt.steps() != w.steps() {
        return Err(DynError::contract(format!("edge signs of {w} do not match the graph")));
    }
    Ok(())
}

/// Lifts a closed walk of the oriented Markov graph of `θ` to an exact
/// periodic point of `L_θ`. For a negative non-repetitive walk of length `m`
/// the point is interior to its edge and has least period `m`.
pub fn lift_walk(theta: &Permutation, w: &Walk) -> Result<PeriodicPointRecord<Rational>> {
    let f = ExactMap::from_permutation(theta)?;
    check_in_graph(&markov_graph(theta)?, w)?;
    let lift = lift_walk_through(&f, &unit_intervals(theta.len()), w)?;
    if w.sign() == Sign::Minus && !is_repetitive(w)? {
        if !lift.interior || lift.record.least_period != w.len() {
            return Err(DynError::invariant(format!(
                "{w} lifted to {} of least period {}",
                lift.record.point, lift.record.least_period
            )));
        }
    }
    Ok(lift.record)
}

/// The closed walk through the intervals containing `x, f(x), …, f^m(x)`.
/// Fails when an iterate is not interior to exactly one interval.
pub fn itinerary_walk_through<T: Scalar>(
    f: &PlMap<T>,
    intervals: &[(T, T)],
    g: &MarkovGraph,
    x: &T,
    m: usize,
) -> Result<Walk> {
    if m == 0 {
        return Err(DynError::contract("period must be positive"));
    }
    let mut vertices = Vec::with_capacity(m + 1);
    let mut y = x.clone();
    for t in 0..m {
        if let Some((lo, hi)) = intervals.iter().find(|(lo, hi)| *lo == y || *hi == y) {
            let point = if *lo == y { lo } else { hi };
            return Err(DynError::CriticalItinerary {
                iterate: t,
                point: point.to_text(),
            });
        }
        let v = intervals
            .iter()
            .position(|iv| strictly_inside(&y, iv))
            .ok_or_else(|| DynError::contract(format!("iterate {t} = {y} lies in no interval")))?;
        vertices.push(v);
        y = f.eval(&y)?;
    }
    if y != *x {
        return Err(DynError::contract(format!("{x} is not fixed by the {m}-th iterate")));
    }
    vertices.push(vertices[0]);
    Walk::in_graph(g, vertices)
}

/// The closed walk traced by a periodic point of `L_θ` whose orbit avoids
/// the integers. Its sign is the point's orientation, and a negatively
/// oriented point gives a non-repetitive walk.
pub fn itinerary_walk(theta: &Permutation, p: &PeriodicPointRecord<Rational>) -> Result<Walk> {
    let f = ExactMap::from_permutation(theta)?;
    let g = markov_graph(theta)?;
    let w = itinerary_walk_through(&f, &unit_intervals(theta.len()), &g, &p.point, p.least_period)?;
    let expected = match p.orientation.value() {
        Some(v) => Sign::from_value(v),
        None => None,
    };
    if expected != Some(w.sign()) {
        return Err(DynError::invariant(format!(
            "itinerary {w} has sign {} but the point has orientation {}",
            w.sign(),
            p.orientation
        )));
    }
    if w.sign() == Sign::Minus && is_repetitive(&w)? {
        return Err(DynError::invariant(format!("negative itinerary {w} is repetitive")));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pwl::{periodic_points, Orientation, DEFAULT_PIECE_CAP};
    use crate::permutation::enumerate_cycles;
    use crate::walks::{enumerate_closed, SearchCaps};
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn four() -> (Permutation, MarkovGraph) {
        let theta = Permutation::parse_cycles("1,2,3,4", None).unwrap();
        let g = markov_graph(&theta).unwrap();
        (theta, g)
    }

    #[test]
    fn loop_lifts_to_the_fixed_point() {
        let (theta, g) = four();
        let r = lift_walk(&theta, &Walk::from_labels(&g, &[3, 3]).unwrap()).unwrap();
        assert_eq!(r.point, q(13, 4));
        assert_eq!(r.least_period, 1);
        let r = lift_walk(&theta, &Walk::from_labels(&g, &[3, 3, 3, 3, 3]).unwrap()).unwrap();
        assert_eq!(r.point, q(13, 4));
        assert_eq!(r.least_period, 1);
    }

    #[test]
    fn two_walk_lifts_to_period_two() {
        let (theta, g) = four();
        let r = lift_walk(&theta, &Walk::from_labels(&g, &[3, 2, 3]).unwrap()).unwrap();
        assert_eq!(r.least_period, 2);
        let pp = periodic_points(&theta, 2, DEFAULT_PIECE_CAP).unwrap();
        assert!(pp.points.iter().any(|p| p.point == r.point && p.least_period == 2));
    }

    #[test]
    fn foreign_walks_rejected() {
        let (theta, _) = four();
        let other = markov_graph(&Permutation::parse_cycles("1,3,2,4", None).unwrap()).unwrap();
        let w = Walk::from_labels(&other, &[2, 2]).unwrap();
        assert!(lift_walk(&theta, &w).is_err());
    }

    #[test]
    fn itinerary_of_the_fixed_point() {
        let (theta, g) = four();
        let pp = periodic_points(&theta, 1, DEFAULT_PIECE_CAP).unwrap();
        let w = itinerary_walk(&theta, &pp.points[0]).unwrap();
        assert_eq!(w, Walk::from_labels(&g, &[3, 3]).unwrap());
        assert_eq!(w.sign(), Sign::Minus);
    }

    #[test]
    fn itinerary_refuses_integers() {
        let (theta, _) = four();
        let pp = periodic_points(&theta, 4, DEFAULT_PIECE_CAP).unwrap();
        let orbit_point = pp.points.iter().find(|p| p.point == q(1, 1)).unwrap();
        assert!(matches!(
            itinerary_walk(&theta, orbit_point),
            Err(DynError::CriticalItinerary { .. })
        ));
    }

    #[test]
    fn itinerary_of_period_two_orbit() {
        let (theta, _) = four();
        let pp = periodic_points(&theta, 2, DEFAULT_PIECE_CAP).unwrap();
        for p in pp.points.iter().filter(|p| p.least_period == 2) {
            let w = itinerary_walk(&theta, p).unwrap();
            assert_eq!(w.len(), 2);
            assert_eq!(Some(w.sign().value()), p.orientation.value());
        }
    }

    /// Round trip on every negative non-repetitive walk of small length:
    /// lift, then read the itinerary back.
    #[test]
    fn negative_walks_round_trip() {
        for n in 3..=5 {
            for theta in enumerate_cycles(n).unwrap() {
                let g = markov_graph(&theta).unwrap();
                for k in 1..=4 {
                    for base in 0..g.vertex_count() {
                        let walks =
                            enumerate_closed(&g, base, k, Some(Sign::Minus), true, SearchCaps::default()).unwrap();
                        for w in walks {
                            let r = lift_walk(&theta, &w).unwrap();
                            assert_eq!(r.least_period, k, "{theta} {w}");
                            assert_eq!(r.orientation, Orientation::Negative);
                            assert_eq!(itinerary_walk(&theta, &r).unwrap(), w);
                        }
                    }
                }
            }
        }
    }
}
