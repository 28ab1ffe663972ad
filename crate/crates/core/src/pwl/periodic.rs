//! Exact periodic points of piecewise-linear maps.
//!
//! `f^k` is explored lap by lap: a node is a subinterval on which `f^t` is
//! affine, together with its image. The image is cut at the breakpoints of
//! `f` to get the laps of `f^{t+1}`. On each lap `f^t(x) = αx + β` has either
//! no fixed point, exactly one, or (when `α = 1, β = 0`) a whole segment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use super::{cmp, PlMap};
use crate::error::{DynError, Result};
use crate::permutation::Permutation;
use crate::scalar::Scalar;
use crate::{ExactMap, Rational};

/// Default bound on laps explored by one periodic-point computation.
pub const DEFAULT_PIECE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Positive,
    Negative,
    /// Some iterate lands on a breakpoint, where the slope is not defined.
    Undefined,
}

impl Orientation {
    pub fn value(self) -> Option<i64> {
        match self {
            Orientation::Positive => Some(1),
            Orientation::Negative => Some(-1),
            Orientation::Undefined => None,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicPointRecord<T> {
    pub point: T,
    pub least_period: usize,
    pub orientation: Orientation,
    /// Pieces (1-indexed) containing `x, f(x), …, f^m(x)`; absent when an
    /// iterate is a breakpoint.
    pub itinerary: Option<Vec<usize>>,
}

impl<T: Scalar> PeriodicPointRecord<T> {
    pub fn to_json_value(&self) -> Value {
        let orientation = match self.orientation.value() {
            Some(v) => json!(v),
            None => json!("undefined"),
        };
        json!({
            "point": self.point.to_text(),
            "least_period": self.least_period,
            "orientation": orientation,
            "itinerary": self.itinerary,
        })
    }
}

impl<T: Scalar> Serialize for PeriodicPointRecord<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

/// A segment on which `f^iterate` is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedSegment<T> {
    pub lo: T,
    pub hi: T,
    pub iterate: usize,
}

impl<T: Scalar> Serialize for FixedSegment<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        json!({ "lo": self.lo.to_text(), "hi": self.hi.to_text(), "iterate": self.iterate }).serialize(s)
    }
}

/// The solution set of `f^k(x) = x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicPoints<T: Scalar> {
    pub k: usize,
    pub points: Vec<PeriodicPointRecord<T>>,
    pub segments: Vec<FixedSegment<T>>,
}

struct Lap<T> {
    depth: usize,
    lo: T,
    hi: T,
    alpha: T,
    beta: T,
    image_lo: T,
    image_hi: T,
}

/// Fixed points and fixed segments of `f^t` for every `t ≤ depth`.
struct Solutions<T> {
    points: Vec<Vec<T>>,
    segments: Vec<Vec<(T, T)>>,
}

fn sorted<T: Scalar>(a: T, b: T) -> (T, T) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn explore<T: Scalar>(f: &PlMap<T>, depth: usize, cap: usize) -> Result<Solutions<T>> {
    if depth == 0 {
        return Err(DynError::contract("iterate must be positive"));
    }
    let (rmin, rmax) = f.range();
    if !f.contains(&rmin) || !f.contains(&rmax) {
        return Err(DynError::domain("map does not send its domain into itself"));
    }
    let mut out = Solutions {
        points: vec![Vec::new(); depth + 1],
        segments: vec![Vec::new(); depth + 1],
    };
    let mut stack: Vec<Lap<T>> = Vec::new();
    for j in (0..f.piece_count()).rev() {
        let (alpha, beta) = f.piece(j);
        let (image_lo, image_hi) = sorted(f.ys[j].clone(), f.ys[j + 1].clone());
        stack.push(Lap {
            depth: 1,
            lo: f.xs[j].clone(),
            hi: f.xs[j + 1].clone(),
            alpha,
            beta,
            image_lo,
            image_hi,
        });
    }
    let mut visited = 0usize;
    while let Some(lap) = stack.pop() {
        visited += 1;
        if visited > cap {
            return Err(DynError::resource(cap, format!("solving f^{depth}(x) = x")));
        }
        if lap.alpha.is_one() {
            if lap.beta.is_zero() {
                out.segments[lap.depth].push((lap.lo.clone(), lap.hi.clone()));
            }
        } else {
            let x = lap.beta.clone() / (T::one() - lap.alpha.clone());
            if x >= lap.lo && x <= lap.hi {
                out.points[lap.depth].push(x);
            }
        }
        if lap.depth == depth {
            continue;
        }
        let mut children = Vec::new();
        if lap.image_lo == lap.image_hi {
            let j = f.locate(&lap.image_lo)?;
            let (s, c) = f.piece(j);
            let y = s.clone() * lap.image_lo.clone() + c.clone();
            children.push(Lap {
                depth: lap.depth + 1,
                lo: lap.lo.clone(),
                hi: lap.hi.clone(),
                alpha: s.clone() * lap.alpha.clone(),
                beta: s * lap.beta.clone() + c,
                image_lo: y.clone(),
                image_hi: y,
            });
        } else {
            let first = f.locate(&lap.image_lo)?;
            let last = f.locate(&lap.image_hi)?;
            for j in first..=last {
                let p = if f.xs[j] > lap.image_lo { f.xs[j].clone() } else { lap.image_lo.clone() };
                let q = if f.xs[j + 1] < lap.image_hi { f.xs[j + 1].clone() } else { lap.image_hi.clone() };
                if p >= q {
                    continue;
                }
                let pre_p = (p.clone() - lap.beta.clone()) / lap.alpha.clone();
                let pre_q = (q.clone() - lap.beta.clone()) / lap.alpha.clone();
                let (lo, hi) = sorted(pre_p, pre_q);
                let (s, c) = f.piece(j);
                let (image_lo, image_hi) = sorted(s.clone() * p + c.clone(), s.clone() * q + c.clone());
                children.push(Lap {
                    depth: lap.depth + 1,
                    lo,
                    hi,
                    alpha: s.clone() * lap.alpha.clone(),
                    beta: s * lap.beta.clone() + c,
                    image_lo,
                    image_hi,
                });
            }
        }
        // keep left-to-right order in x for determinism
        children.sort_by(|a, b| cmp(&b.lo, &a.lo));
        stack.extend(children);
    }
    for points in &mut out.points {
        points.sort_by(cmp);
        points.dedup();
    }
    for segments in &mut out.segments {
        *segments = merge_segments(std::mem::take(segments));
    }
    Ok(out)
}

fn merge_segments<T: Scalar>(mut segments: Vec<(T, T)>) -> Vec<(T, T)> {
    segments.sort_by(|a, b| cmp(&a.0, &b.0));
    let mut merged: Vec<(T, T)> = Vec::new();
    for (lo, hi) in segments {
        match merged.last_mut() {
            Some(prev) if prev.1 >= lo => {
                if hi > prev.1 {
                    prev.1 = hi;
                }
            }
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

/// Least period, orientation and itinerary of `x`, which must satisfy
/// `f^t(x) = x` for some `t ≤ bound`.
pub fn record_for<T: Scalar>(f: &PlMap<T>, x: &T, bound: usize) -> Result<PeriodicPointRecord<T>> {
    let mut orbit = vec![x.clone()];
    let mut y = f.eval(x)?;
    while y != *x {
        if orbit.len() >= bound {
            return Err(DynError::contract(format!("{x} is not periodic with period at most {bound}")));
        }
        orbit.push(y.clone());
        y = f.eval(&y)?;
    }
    let least_period = orbit.len();
    let critical = orbit.iter().any(|p| f.is_breakpoint(p));
    let (orientation, itinerary) = if critical {
        (Orientation::Undefined, None)
    } else {
        let mut negative = false;
        let mut pieces = Vec::with_capacity(least_period + 1);
        for p in &orbit {
            let j = f.locate(p)?;
            if f.piece(j).0.is_negative() {
                negative = !negative;
            }
            pieces.push(j + 1);
        }
        pieces.push(pieces[0]);
        let o = if negative { Orientation::Negative } else { Orientation::Positive };
        (o, Some(pieces))
    };
    Ok(PeriodicPointRecord {
        point: x.clone(),
        least_period,
        orientation,
        itinerary,
    })
}

/// All solutions of `f^k(x) = x`, with the least period of every isolated
/// solution. Points covered by a fixed segment are reported only through the
/// segment.
pub fn periodic_points_of<T: Scalar>(f: &PlMap<T>, k: usize, cap: usize) -> Result<PeriodicPoints<T>> {
    let solutions = explore(f, k, cap)?;
    let segments = solutions.segments[k].clone();
    let points = solutions.points[k]
        .iter()
        .filter(|p| !segments.iter().any(|(lo, hi)| *p >= lo && *p <= hi))
        .map(|p| record_for(f, p, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(PeriodicPoints {
        k,
        points,
        segments: segments
            .into_iter()
            .map(|(lo, hi)| FixedSegment { lo, hi, iterate: k })
            .collect(),
    })
}

/// Exact solutions of `L_θ^k(x) = x` for the connect-the-dots map.
pub fn periodic_points(theta: &Permutation, k: usize, cap: usize) -> Result<PeriodicPoints<Rational>> {
    periodic_points_of(&ExactMap::from_permutation(theta)?, k, cap)
}

/// For every `m ≤ bound` that occurs as a least period of `f`, the leftmost
/// point found with that least period.
pub fn least_period_witnesses<T: Scalar>(f: &PlMap<T>, bound: usize, cap: usize) -> Result<BTreeMap<usize, T>> {
    let solutions = explore(f, bound, cap)?;
    let mut all_points: Vec<T> = solutions.points.iter().flatten().cloned().collect();
    all_points.sort_by(cmp);
    all_points.dedup();
    let mut witnesses: BTreeMap<usize, T> = BTreeMap::new();
    let note = |m: usize, x: &T, witnesses: &mut BTreeMap<usize, T>| {
        let better = witnesses.get(&m).map_or(true, |w| x < w);
        if better {
            witnesses.insert(m, x.clone());
        }
    };
    for x in &all_points {
        let r = record_for(f, x, bound)?;
        note(r.least_period, x, &mut witnesses);
    }
    // Inside a fixed segment of f^t the least period is constant between
    // consecutive solutions of lower iterates, so one midpoint per gap decides.
    let all_segments: Vec<(T, T)> = solutions.segments.iter().flatten().cloned().collect();
    for (t, segments) in solutions.segments.iter().enumerate() {
        for (lo, hi) in segments {
            let mut events: Vec<T> = vec![lo.clone(), hi.clone()];
            events.extend(all_points.iter().filter(|p| *p >= lo && *p <= hi).cloned());
            for (u, v) in &all_segments {
                for e in [u, v] {
                    if e >= lo && e <= hi {
                        events.push(e.clone());
                    }
                }
            }
            events.sort_by(cmp);
            events.dedup();
            let mut candidates = events.clone();
            candidates.extend(events.windows(2).map(|w| T::midpoint(&w[0], &w[1])));
            for x in &candidates {
                let r = record_for(f, x, t)?;
                note(r.least_period, x, &mut witnesses);
            }
        }
    }
    Ok(witnesses)
}

/// `{ m ≤ bound : L_θ has a point of least period m }`.
pub fn least_period_set(theta: &Permutation, bound: usize, cap: usize) -> Result<BTreeSet<usize>> {
    let f = ExactMap::from_permutation(theta)?;
    Ok(least_period_witnesses(&f, bound, cap)?.into_keys().collect())
}
