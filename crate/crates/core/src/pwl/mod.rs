//! Piecewise-linear maps of a compact interval.
//!
//! A map is stored as its graph: breakpoints `x_0 < … < x_m` and values
//! `y_0, …, y_m`, linear in between. The connect-the-dots map of a
//! permutation has breakpoints `1, …, n` and values `θ(1), …, θ(n)`.

mod lift;
mod periodic;

use std::cmp::Ordering;

use crate::error::{DynError, Result};
use crate::permutation::Permutation;
use crate::scalar::Scalar;

pub use lift::{itinerary_walk, itinerary_walk_through, lift_walk, lift_walk_through, Lift};
pub use periodic::{
    least_period_set, least_period_witnesses, periodic_points, periodic_points_of, record_for,
    FixedSegment, Orientation, PeriodicPointRecord, PeriodicPoints, DEFAULT_PIECE_CAP,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PlMap<T> {
    xs: Vec<T>,
    ys: Vec<T>,
}

pub(crate) fn cmp<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).expect("scalars are totally ordered")
}

impl<T: Scalar> PlMap<T> {
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(DynError::Dimension {
                left: xs.len(),
                right: ys.len(),
            });
        }
        if xs.len() < 2 {
            return Err(DynError::domain("a piecewise-linear map needs at least two breakpoints"));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DynError::domain("breakpoints must be strictly increasing"));
        }
        Ok(PlMap { xs, ys })
    }

    /// The connect-the-dots map of `theta` on `[1, n]`.
    pub fn from_permutation(theta: &Permutation) -> Result<Self> {
        let n = theta.len();
        if n < 2 {
            return Err(DynError::domain(format!("connect-the-dots map needs n >= 2, got {n}")));
        }
        let xs = (1..=n).map(|i| T::from_int(i as i64)).collect();
        let ys = theta.image().into_iter().map(|v| T::from_int(v as i64)).collect();
        PlMap::new(xs, ys)
    }

    pub fn identity(lo: T, hi: T) -> Result<Self> {
        PlMap::new(vec![lo.clone(), hi.clone()], vec![lo, hi])
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.xs
    }

    pub fn values(&self) -> &[T] {
        &self.ys
    }

    pub fn lo(&self) -> &T {
        &self.xs[0]
    }

    pub fn hi(&self) -> &T {
        self.xs.last().expect("nonempty")
    }

    pub fn piece_count(&self) -> usize {
        self.xs.len() - 1
    }

    /// Slope and intercept of piece `t` (between `x_t` and `x_{t+1}`).
    pub fn piece(&self, t: usize) -> (T, T) {
        let dx = self.xs[t + 1].clone() - self.xs[t].clone();
        let slope = (self.ys[t + 1].clone() - self.ys[t].clone()) / dx;
        let intercept = self.ys[t].clone() - slope.clone() * self.xs[t].clone();
        (slope, intercept)
    }

    pub fn contains(&self, x: &T) -> bool {
        x >= self.lo() && x <= self.hi()
    }

    pub fn is_breakpoint(&self, x: &T) -> bool {
        self.xs.binary_search_by(|b| cmp(b, x)).is_ok()
    }

    /// Index of a piece containing `x`; the left piece at interior breakpoints.
    pub fn locate(&self, x: &T) -> Result<usize> {
        if !self.contains(x) {
            return Err(DynError::domain(format!(
                "{x} outside the domain [{}, {}]",
                self.lo(),
                self.hi()
            )));
        }
        let t = match self.xs.binary_search_by(|b| cmp(b, x)) {
            Ok(0) => 0,
            Ok(i) => i - 1,
            Err(i) => i - 1,
        };
        Ok(t.min(self.piece_count() - 1))
    }

    pub fn eval(&self, x: &T) -> Result<T> {
        let t = self.locate(x)?;
        if *x == self.xs[t] {
            return Ok(self.ys[t].clone());
        }
        if *x == self.xs[t + 1] {
            return Ok(self.ys[t + 1].clone());
        }
        let (a, b) = self.piece(t);
        Ok(a * x.clone() + b)
    }

    /// `f^k(x)`.
    pub fn iterate(&self, x: &T, k: usize) -> Result<T> {
        let mut y = x.clone();
        for _ in 0..k {
            y = self.eval(&y)?;
        }
        Ok(y)
    }

    /// Smallest and largest value on `[lo, hi]`.
    pub fn range_on(&self, lo: &T, hi: &T) -> Result<(T, T)> {
        let mut candidates = vec![self.eval(lo)?, self.eval(hi)?];
        for (x, y) in self.xs.iter().zip(&self.ys) {
            if x > lo && x < hi {
                candidates.push(y.clone());
            }
        }
        let min = candidates.iter().min_by(|a, b| cmp(*a, *b)).expect("nonempty").clone();
        let max = candidates.iter().max_by(|a, b| cmp(*a, *b)).expect("nonempty").clone();
        Ok((min, max))
    }

    pub fn range(&self) -> (T, T) {
        let min = self.ys.iter().min_by(|a, b| cmp(*a, *b)).expect("nonempty").clone();
        let max = self.ys.iter().max_by(|a, b| cmp(*a, *b)).expect("nonempty").clone();
        (min, max)
    }

    /// The same map on `[lo, hi]`.
    pub fn restrict(&self, lo: &T, hi: &T) -> Result<Self> {
        if lo >= hi || !self.contains(lo) || !self.contains(hi) {
            return Err(DynError::domain(format!("cannot restrict to [{lo}, {hi}]")));
        }
        let mut xs = vec![lo.clone()];
        let mut ys = vec![self.eval(lo)?];
        for (x, y) in self.xs.iter().zip(&self.ys) {
            if x > lo && x < hi {
                xs.push(x.clone());
                ys.push(y.clone());
            }
        }
        xs.push(hi.clone());
        ys.push(self.eval(hi)?);
        PlMap::new(xs, ys)
    }

    /// Drops breakpoints where the two neighbouring pieces are collinear.
    fn pruned(self) -> Self {
        let m = self.xs.len();
        let mut xs = vec![self.xs[0].clone()];
        let mut ys = vec![self.ys[0].clone()];
        for t in 1..m - 1 {
            let left = (self.ys[t].clone() - ys.last().unwrap().clone()) / (self.xs[t].clone() - xs.last().unwrap().clone());
            let right = (self.ys[t + 1].clone() - self.ys[t].clone()) / (self.xs[t + 1].clone() - self.xs[t].clone());
            if left != right {
                xs.push(self.xs[t].clone());
                ys.push(self.ys[t].clone());
            }
        }
        xs.push(self.xs[m - 1].clone());
        ys.push(self.ys[m - 1].clone());
        PlMap { xs, ys }
    }

    /// `self ∘ inner`; the range of `inner` must lie in the domain of `self`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let (rmin, rmax) = inner.range();
        if !self.contains(&rmin) || !self.contains(&rmax) {
            return Err(DynError::domain(format!(
                "range [{rmin}, {rmax}] escapes the domain [{}, {}]",
                self.lo(),
                self.hi()
            )));
        }
        let mut xs = Vec::new();
        for t in 0..inner.piece_count() {
            let (x0, x1) = (&inner.xs[t], &inner.xs[t + 1]);
            let (y0, y1) = (&inner.ys[t], &inner.ys[t + 1]);
            xs.push(x0.clone());
            if y0 == y1 {
                continue;
            }
            let mut inside: Vec<T> = self
                .xs
                .iter()
                .filter(|b| (*b > y0 && *b < y1) || (*b < y0 && *b > y1))
                .map(|b| x0.clone() + (b.clone() - y0.clone()) * (x1.clone() - x0.clone()) / (y1.clone() - y0.clone()))
                .collect();
            inside.sort_by(cmp);
            xs.extend(inside);
        }
        xs.push(inner.hi().clone());
        let ys = xs
            .iter()
            .map(|x| self.eval(&inner.eval(x)?))
            .collect::<Result<Vec<T>>>()?;
        Ok(PlMap { xs, ys }.pruned())
    }

    /// `f^k` as a single map; requires `f` to map its domain into itself.
    pub fn power(&self, k: usize) -> Result<Self> {
        let mut out = PlMap::identity(self.lo().clone(), self.hi().clone())?;
        for _ in 0..k {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    /// Every `x` in `[lo, hi]` with `f(x) = y`, as isolated points and
    /// intervals on which `f` is constantly `y`, in increasing order.
    fn hits(&self, lo: &T, hi: &T, y: &T) -> Result<Vec<(T, T)>> {
        let mut out: Vec<(T, T)> = Vec::new();
        let first = self.locate(lo)?;
        let last = self.locate(hi)?;
        for t in first..=last {
            let a = if self.xs[t] > *lo { self.xs[t].clone() } else { lo.clone() };
            let b = if self.xs[t + 1] < *hi { self.xs[t + 1].clone() } else { hi.clone() };
            if a > b {
                continue;
            }
            let (fa, fb) = (self.eval(&a)?, self.eval(&b)?);
            let hit = if fa == *y && fb == *y {
                Some((a, b))
            } else if (fa <= *y && *y <= fb) || (fb <= *y && *y <= fa) {
                let x = a.clone() + (y.clone() - fa.clone()) * (b.clone() - a.clone()) / (fb - fa);
                Some((x.clone(), x))
            } else {
                None
            };
            if let Some((u, v)) = hit {
                match out.last_mut() {
                    Some(prev) if prev.1 >= u => {
                        if v > prev.1 {
                            prev.1 = v;
                        }
                    }
                    _ => out.push((u, v)),
                }
            }
        }
        Ok(out)
    }

    /// Smallest `x` in `[lo, hi]` with `f(x) = y`.
    pub fn first_hit(&self, lo: &T, hi: &T, y: &T) -> Result<Option<T>> {
        Ok(self.hits(lo, hi, y)?.into_iter().next().map(|(u, _)| u))
    }

    /// Largest `x` in `[lo, hi]` with `f(x) = y`.
    pub fn last_hit(&self, lo: &T, hi: &T, y: &T) -> Result<Option<T>> {
        Ok(self.hits(lo, hi, y)?.into_iter().last().map(|(_, v)| v))
    }

    /// Fixed points, as isolated points and fixed segments, left to right.
    pub fn fixed_points(&self) -> (Vec<T>, Vec<(T, T)>) {
        let mut points: Vec<T> = Vec::new();
        let mut segments: Vec<(T, T)> = Vec::new();
        for t in 0..self.piece_count() {
            let (a, b) = self.piece(t);
            let (lo, hi) = (&self.xs[t], &self.xs[t + 1]);
            if a.is_one() {
                if b.is_zero() {
                    match segments.last_mut() {
                        Some(s) if s.1 == *lo => s.1 = hi.clone(),
                        _ => segments.push((lo.clone(), hi.clone())),
                    }
                }
                continue;
            }
            let x = b / (T::one() - a);
            if x >= *lo && x <= *hi && points.last() != Some(&x) {
                points.push(x);
            }
        }
        points.retain(|p| !segments.iter().any(|(u, v)| p >= u && p <= v));
        (points, segments)
    }
}
