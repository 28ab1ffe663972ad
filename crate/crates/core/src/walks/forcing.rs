//! Constructions of negative non-repetitive closed walks of prescribed
//! lengths. Each such walk lifts to a periodic point of exactly that least
//! period, so these functions are the constructive side of period forcing.

use num_traits::Zero;
use serde::Serialize;
use serde_json::json;

use super::search::{find_negative_nonrepetitive, first_closed, SearchCaps};
use super::{is_repetitive, surgery_nonrepetitive, Walk};
use crate::error::{DynError, Result};
use crate::markov::{markov_graph, om_of, GraphEdge, MarkovGraph, Sign};
use crate::orders::PeriodClass;
use crate::permutation::Permutation;
use crate::pwl::{itinerary_walk, lift_walk_through, record_for, Orientation, PeriodicPointRecord, PlMap};
use crate::scalar::Scalar;
use crate::{ExactMap, Rational};

fn require_cycle(theta: &Permutation) -> Result<()> {
    if theta.len() < 2 || !theta.is_full_cycle() {
        return Err(DynError::contract(format!("{theta} is not a single cycle on n >= 2 points")));
    }
    Ok(())
}

/// Checks the three properties every forcing walk must have.
pub(crate) fn verify_forcing_walk(w: &Walk, length: usize) -> Result<()> {
    if !w.is_closed() || w.len() != length {
        return Err(DynError::invariant(format!("{w} is not a closed walk of length {length}")));
    }
    if w.sign() != Sign::Minus {
        return Err(DynError::invariant(format!("{w} is not negative")));
    }
    if is_repetitive(w)? {
        return Err(DynError::invariant(format!("{w} is repetitive")));
    }
    Ok(())
}

/// Lexicographically least negative closed walk of length `2^j`, at the
/// smallest vertex carrying one. A negative walk of even length cannot be
/// an even-fold repetition, so it is non-repetitive.
pub(crate) fn negative_power_of_two_walk(g: &MarkovGraph, j: u32) -> Result<Option<Walk>> {
    let length = 1usize << j;
    for base in 0..g.vertex_count() {
        if let Some(w) = first_closed(g, base, length, Sign::Minus)? {
            verify_forcing_walk(&w, length)?;
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// A negative non-repetitive closed walk of length `2^j` for an `n`-cycle
/// with `n ∤ 2^j`; `OM(θ)^{2^j}` then has trace `-1`.
pub fn power_of_two_walk(theta: &Permutation, j: u32) -> Result<Walk> {
    require_cycle(theta)?;
    if j >= 32 {
        return Err(DynError::domain("exponent too large"));
    }
    if (1usize << j) % theta.len() == 0 {
        return Err(DynError::domain(format!(
            "θ^{} is the identity, so there is no negative diagonal to use",
            1u64 << j
        )));
    }
    negative_power_of_two_walk(&markov_graph(theta)?, j)?
        .ok_or_else(|| DynError::invariant(format!("no negative closed walk of length {} for {theta}", 1u64 << j)))
}

/// Walk of length `2^k·s` from a graph where every vertex carries a positive
/// closed walk of length `2^k·r` and some vertex a negative one of length
/// `2^{k+p}`, `s - r = 2^p·q`: go `q` times around the negative walk, once
/// around the positive one, then reorder prime factors.
pub(crate) fn forcing_walk_in_graph(g: &MarkovGraph, k: u32, r: u64, s: u64) -> Result<Walk> {
    if r < 3 || r % 2 == 0 || s <= r {
        return Err(DynError::domain(format!("need odd r > 1 and s > r, got r = {r}, s = {s}")));
    }
    let diff = PeriodClass::of(s - r);
    let neg_len = 1usize << (k + diff.k);
    let pos_len = (1usize << k) * r as usize;
    for base in 0..g.vertex_count() {
        let Some(neg) = first_closed(g, base, neg_len, Sign::Minus)? else {
            continue;
        };
        let Some(pos) = first_closed(g, base, pos_len, Sign::Plus)? else {
            continue;
        };
        let joined = neg.repeat(diff.s as usize)?.concat(&pos)?;
        let w = surgery_nonrepetitive(&joined)?;
        verify_forcing_walk(&w, (1usize << k) * s as usize)?;
        return Ok(w);
    }
    Err(DynError::invariant(format!(
        "no vertex carries both a negative walk of length {neg_len} and a positive walk of length {pos_len}"
    )))
}

/// For an `n`-cycle with `n = 2^k·r`, `r > 1` odd, and any `s > r`: a negative
/// non-repetitive closed walk of length `2^k·s`.
pub fn lemma3_walk(theta: &Permutation, s: u64) -> Result<Walk> {
    require_cycle(theta)
        .map_err(|e| DynError::domain(e.to_string()))?;
    let class = PeriodClass::of(theta.len() as u64);
    if class.s == 1 {
        return Err(DynError::domain(format!("n = {} is a power of two", theta.len())));
    }
    if s <= class.s {
        return Err(DynError::domain(format!("s = {s} must exceed the odd part {}", class.s)));
    }
    forcing_walk_in_graph(&markov_graph(theta)?, class.k, class.s, s)
}

/// Points with `f(b) ≤ c < b < a = f(a) ≤ f(c)`. The intervals `[c, b]` and
/// `[b, a]` then cover each other like a horseshoe.
#[derive(Debug, Clone, PartialEq)]
pub struct Horseshoe<T = Rational> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Scalar> Horseshoe<T> {
    pub fn holds_for(&self, f: &PlMap<T>) -> Result<bool> {
        if !(self.c < self.b && self.b < self.a) {
            return Ok(false);
        }
        let (fa, fb, fc) = (f.eval(&self.a)?, f.eval(&self.b)?, f.eval(&self.c)?);
        Ok(fb <= self.c && fa == self.a && fa <= fc)
    }

    /// `E1 = [c, b]`, `E2 = [b, a]`.
    pub fn intervals(&self) -> Vec<(T, T)> {
        vec![
            (self.c.clone(), self.b.clone()),
            (self.b.clone(), self.a.clone()),
        ]
    }

    /// Scans consecutive isolated fixed points `z < a` from the left; `b` is
    /// the lowest breakpoint between them, and `c` the largest candidate in
    /// `[f(b), z)` reaching `a`.
    pub fn search(f: &PlMap<T>) -> Result<Option<Self>> {
        let (fixed, _) = f.fixed_points();
        for pair in fixed.windows(2) {
            let (z, a) = (&pair[0], &pair[1]);
            let mut best: Option<(T, T)> = None;
            for x in f.breakpoints().iter().filter(|x| *x > z && *x < a) {
                let y = f.eval(x)?;
                if best.as_ref().map_or(true, |(_, fy)| y < *fy) {
                    best = Some((x.clone(), y));
                }
            }
            let Some((b, fb)) = best else { continue };
            if fb >= *z {
                continue;
            }
            let mut candidates: Vec<T> = f
                .breakpoints()
                .iter()
                .filter(|x| **x >= fb && *x < z)
                .cloned()
                .collect();
            candidates.push(fb.clone());
            candidates.sort_by(crate::pwl::cmp);
            for c in candidates.into_iter().rev() {
                if f.eval(&c)? >= *a {
                    let h = Horseshoe { a: a.clone(), b: b.clone(), c };
                    if h.holds_for(f)? {
                        return Ok(Some(h));
                    }
                    break;
                }
            }
        }
        Ok(None)
    }
}

impl<T: Scalar> Serialize for Horseshoe<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        json!({ "a": self.a.to_text(), "b": self.b.to_text(), "c": self.c.to_text() }).serialize(s)
    }
}

fn nonzero_diagonal(theta: &Permutation, power: u64) -> Result<usize> {
    Ok(om_of(theta)?.pow(power).diagonal().iter().filter(|v| !v.is_zero()).count())
}

/// A horseshoe for `L_θ` when its oriented Markov matrix has at least two
/// nonzero diagonal entries; absent otherwise.
pub fn horseshoe_witness(theta: &Permutation) -> Result<Option<Horseshoe>> {
    require_cycle(theta)?;
    if nonzero_diagonal(theta, 1)? < 2 {
        return Ok(None);
    }
    let f = ExactMap::from_permutation(theta)?;
    match Horseshoe::search(&f)? {
        Some(h) => Ok(Some(h)),
        None => Err(DynError::invariant(format!(
            "{theta} has two nonzero diagonal entries but no horseshoe was found"
        ))),
    }
}

/// The two-vertex graph of a horseshoe: `E1 → E1, E2` reversing, `E2 → E1, E2`
/// preserving orientation.
pub fn horseshoe_graph() -> MarkovGraph {
    let edge = |source, target, sign| GraphEdge { source, target, sign };
    MarkovGraph::new(
        2,
        vec![
            edge(0, 0, Sign::Minus),
            edge(0, 1, Sign::Minus),
            edge(1, 0, Sign::Plus),
            edge(1, 1, Sign::Plus),
        ],
    )
    .expect("two vertices")
}

fn horseshoe_walk(k: usize) -> Result<Walk> {
    if k == 0 {
        return Err(DynError::contract("walk length must be positive"));
    }
    let mut vertices = vec![0];
    vertices.extend(std::iter::repeat(1).take(k - 1));
    vertices.push(0);
    Walk::in_graph(&horseshoe_graph(), vertices)
}

/// `E1 E2^{k-1} E1` in the horseshoe graph: negative and non-repetitive for
/// every `k ≥ 1`.
pub fn horseshoe_walks(h: &Horseshoe, theta: &Permutation, k: usize) -> Result<Walk> {
    let f = ExactMap::from_permutation(theta)?;
    if !h.holds_for(&f)? {
        return Err(DynError::contract("points do not form a horseshoe for this map"));
    }
    let w = horseshoe_walk(k)?;
    verify_forcing_walk(&w, k)?;
    Ok(w)
}

/// Which argument produced a period `3·2^{k+1}` witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma7Route {
    /// Horseshoe for `g = L_θ^{2^{k+1}}`, lifted to a negatively oriented
    /// point of least period 3 under `g`.
    HorseshoeLift,
    /// The horseshoe point was an orbit point of θ itself (`n = 3·2^k`); the
    /// `2^k·s` construction with `s = 6` finishes.
    HorseshoeOrbit,
    /// A single nonzero diagonal entry: four copies of a negative walk of
    /// length `2^k` and a negative walk of length `2^{k+1}`, reordered.
    SingleDiagonal,
    /// Exhaustive search in the oriented Markov graph.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma7Witness {
    pub route: Lemma7Route,
    /// Negative non-repetitive closed walk of length `3·2^{k+1}`.
    pub walk: Walk,
    /// The periodic point found on the horseshoe routes.
    pub point: Option<PeriodicPointRecord<Rational>>,
    pub horseshoe: Option<Horseshoe>,
}

/// Witness that an `n`-cycle with `n = 2^k·r`, `r > 1` odd, forces least
/// period `3·2^{k+1}`.
pub fn lemma7_witness(theta: &Permutation) -> Result<Lemma7Witness> {
    require_cycle(theta).map_err(|e| DynError::domain(e.to_string()))?;
    let class = PeriodClass::of(theta.len() as u64);
    if class.s == 1 {
        return Err(DynError::domain(format!("n = {} is a power of two", theta.len())));
    }
    let k = class.k;
    let big = 1usize << (k + 1);
    let target = 3 * big;
    let g = markov_graph(theta)?;
    if nonzero_diagonal(theta, big as u64)? >= 2 {
        if let Some(w) = horseshoe_route(theta, k, big)? {
            return Ok(w);
        }
    } else {
        for base in 0..g.vertex_count() {
            let Some(short) = first_closed(&g, base, 1 << k, Sign::Minus)? else {
                continue;
            };
            let Some(long) = first_closed(&g, base, big, Sign::Minus)? else {
                continue;
            };
            let joined = short.repeat(4)?.concat(&long)?;
            let walk = surgery_nonrepetitive(&joined)?;
            verify_forcing_walk(&walk, target)?;
            return Ok(Lemma7Witness {
                route: Lemma7Route::SingleDiagonal,
                walk,
                point: None,
                horseshoe: None,
            });
        }
        return Err(DynError::invariant(format!(
            "no vertex of {theta} carries negative closed walks of lengths {} and {big}",
            1 << k
        )));
    }
    let walk = find_negative_nonrepetitive(&g, target, SearchCaps::default())?
        .ok_or_else(|| DynError::invariant(format!("no negative non-repetitive walk of length {target} for {theta}")))?;
    Ok(Lemma7Witness {
        route: Lemma7Route::Exhaustive,
        walk,
        point: None,
        horseshoe: None,
    })
}

fn horseshoe_route(theta: &Permutation, k: u32, big: usize) -> Result<Option<Lemma7Witness>> {
    let f = ExactMap::from_permutation(theta)?;
    let g = f.power(big)?;
    let Some(h) = Horseshoe::search(&g)? else {
        return Ok(None);
    };
    let lift = lift_walk_through(&g, &h.intervals(), &horseshoe_walk(3)?)?;
    if !lift.interior || lift.record.least_period != 3 {
        return Ok(None);
    }
    let record = record_for(&f, &lift.record.point, 3 * big)?;
    if record.least_period == 3 * big && record.orientation == Orientation::Negative {
        let walk = itinerary_walk(theta, &record)?;
        verify_forcing_walk(&walk, 3 * big)?;
        return Ok(Some(Lemma7Witness {
            route: Lemma7Route::HorseshoeLift,
            walk,
            point: Some(record),
            horseshoe: Some(h),
        }));
    }
    let n = theta.len();
    if record.point.is_integer() && record.least_period == n && n == 3 << k {
        let walk = lemma3_walk(theta, 6)?;
        return Ok(Some(Lemma7Witness {
            route: Lemma7Route::HorseshoeOrbit,
            walk,
            point: Some(record),
            horseshoe: Some(h),
        }));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::om_of;
    use crate::permutation::enumerate_cycles;
    use crate::pwl::lift_walk;
    use num_bigint::BigInt;
    use num_traits::Signed;

    fn cyc(s: &str) -> Permutation {
        Permutation::parse_cycles(s, None).unwrap()
    }

    #[test]
    fn powers_of_two_have_negative_diagonals() {
        for n in [3, 5, 6, 7] {
            for theta in enumerate_cycles(n).unwrap() {
                let om = om_of(&theta).unwrap();
                for j in 0..=4 {
                    let d = om.pow(1 << j).diagonal();
                    assert!(d.iter().any(|v| v.is_negative()), "{theta} 2^{j}");
                }
            }
        }
    }

    #[test]
    fn power_of_two_walks() {
        for theta in enumerate_cycles(5).unwrap() {
            for j in 0..=4 {
                let w = power_of_two_walk(&theta, j).unwrap();
                assert_eq!(w.len(), 1 << j);
                assert_eq!(lift_walk(&theta, &w).unwrap().least_period, 1 << j);
            }
        }
        assert!(power_of_two_walk(&cyc("1,2,3,4"), 2).is_err());
        assert!(power_of_two_walk(&cyc("1,2,3,4"), 1).is_ok());
    }

    #[test]
    fn lemma3_examples() {
        for theta in enumerate_cycles(3).unwrap() {
            let w = lemma3_walk(&theta, 5).unwrap();
            verify_forcing_walk(&w, 5).unwrap();
        }
        let six = cyc("1,2,3,4,5,6");
        verify_forcing_walk(&lemma3_walk(&six, 5).unwrap(), 10).unwrap();
        let stefan = Permutation::from_image(&[3, 5, 4, 2, 1]).unwrap();
        let w = lemma3_walk(&stefan, 7).unwrap();
        verify_forcing_walk(&w, 7).unwrap();
        assert_eq!(lift_walk(&stefan, &w).unwrap().least_period, 7);
    }

    #[test]
    fn lemma3_preconditions() {
        assert!(matches!(lemma3_walk(&cyc("1,2,3,4"), 5), Err(DynError::Domain(_))));
        assert!(matches!(lemma3_walk(&cyc("1,2,3"), 3), Err(DynError::Domain(_))));
        assert!(matches!(lemma3_walk(&Permutation::identity(3), 5), Err(DynError::Domain(_))));
    }

    #[test]
    fn lemma3_all_lengths_for_six_cycles() {
        for theta in enumerate_cycles(6).unwrap() {
            for s in [4, 5, 7] {
                let w = lemma3_walk(&theta, s).unwrap();
                assert_eq!(w.len(), 2 * s as usize);
            }
        }
    }

    #[test]
    fn horseshoe_presence() {
        assert_eq!(horseshoe_witness(&cyc("1,2,3,4")).unwrap(), None);
        let theta = cyc("1,3,4,2");
        let diag: Vec<i64> = om_of(&theta)
            .unwrap()
            .diagonal()
            .iter()
            .map(|v| i64::try_from(v.clone()).unwrap())
            .collect();
        assert_eq!(diag, vec![-1, 1, -1]);
        let h = horseshoe_witness(&theta).unwrap().unwrap();
        let f = ExactMap::from_permutation(&theta).unwrap();
        assert!(h.holds_for(&f).unwrap());
        assert!(horseshoe_witness(&Permutation::identity(3)).is_err());
    }

    #[test]
    fn horseshoes_exist_whenever_the_diagonal_allows() {
        for n in 2..=7 {
            for theta in enumerate_cycles(n).unwrap() {
                let two = nonzero_diagonal(&theta, 1).unwrap() >= 2;
                assert_eq!(horseshoe_witness(&theta).unwrap().is_some(), two, "{theta}");
            }
        }
    }

    #[test]
    fn horseshoe_walk_shapes() {
        let g = horseshoe_graph();
        let w1 = horseshoe_walk(1).unwrap();
        assert_eq!(w1.labels(), vec![1, 1]);
        assert_eq!(w1.sign(), Sign::Minus);
        let w2 = horseshoe_walk(2).unwrap();
        assert_eq!(w2, Walk::from_labels(&g, &[1, 2, 1]).unwrap());
        assert_eq!(w2.sign(), Sign::Minus);
        let w5 = horseshoe_walk(5).unwrap();
        assert_eq!(w5.labels(), vec![1, 2, 2, 2, 2, 1]);
        verify_forcing_walk(&w5, 5).unwrap();
    }

    #[test]
    fn horseshoe_walks_lift_to_every_period() {
        let theta = cyc("1,3,4,2");
        let h = horseshoe_witness(&theta).unwrap().unwrap();
        let f = ExactMap::from_permutation(&theta).unwrap();
        for k in 1..=7 {
            let w = horseshoe_walks(&h, &theta, k).unwrap();
            let lift = lift_walk_through(&f, &h.intervals(), &w).unwrap();
            assert!(lift.interior);
            assert_eq!(lift.record.least_period, k);
        }
        let bad = Horseshoe {
            a: h.b.clone(),
            b: h.a.clone(),
            c: h.c.clone(),
        };
        assert!(horseshoe_walks(&bad, &theta, 2).is_err());
    }

    #[test]
    fn lemma7_small_cycles() {
        for n in [3, 5] {
            for theta in enumerate_cycles(n).unwrap() {
                let wit = lemma7_witness(&theta).unwrap();
                verify_forcing_walk(&wit.walk, 6).unwrap();
                assert_eq!(lift_walk(&theta, &wit.walk).unwrap().least_period, 6);
                if let Some(p) = &wit.point {
                    assert_eq!(p.point.denom() == &BigInt::from(1), wit.route == Lemma7Route::HorseshoeOrbit);
                }
            }
        }
        assert!(matches!(lemma7_witness(&cyc("1,2,3,4")), Err(DynError::Domain(_))));
    }

    #[test]
    fn lemma7_case_split_never_needs_the_fallback() {
        let cycles = [3, 5, 6, 7].into_iter().flat_map(|n| enumerate_cycles(n).unwrap());
        for theta in cycles {
            let target = if theta.len() == 6 { 12 } else { 6 };
            let wit = lemma7_witness(&theta).unwrap();
            verify_forcing_walk(&wit.walk, target).unwrap();
            assert_ne!(wit.route, Lemma7Route::Exhaustive, "{theta}");
            assert_eq!(lift_walk(&theta, &wit.walk).unwrap().least_period, target);
        }
    }
}
