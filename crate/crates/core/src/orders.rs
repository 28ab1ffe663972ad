//! Forcing orders on periods and the number theory behind them.
//!
//! Three models are provided. `Sharkovsky` is the full order for continuous
//! maps of the line. `Basic` is the weaker set obtained from the power-of-two
//! and `2^k·s` walk constructions alone. `Tree` is the order for vertex maps
//! on trees whose vertices form one orbit, which adds the periods reached by
//! clearing low bits of the binary expansion.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{DynError, Result};

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    num_integer::lcm(a, b)
}

/// `n = 2^k · s` with `s` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodClass {
    pub k: u32,
    pub s: u64,
}

impl PeriodClass {
    pub fn of(n: u64) -> Self {
        assert!(n > 0, "period classes are defined for positive integers");
        let k = n.trailing_zeros();
        PeriodClass { k, s: n >> k }
    }

    pub fn value(&self) -> u64 {
        self.s << self.k
    }

    pub fn is_power_of_two(&self) -> bool {
        self.s == 1
    }
}

/// Compares `m` and `n` in the Sharkovsky order; `Less` means `m ◁ n`.
pub fn shark_cmp(m: u64, n: u64) -> Ordering {
    assert!(m > 0 && n > 0, "Sharkovsky order is on positive integers");
    if m == n {
        return Ordering::Equal;
    }
    let (a, b) = (PeriodClass::of(m), PeriodClass::of(n));
    match (a.is_power_of_two(), b.is_power_of_two()) {
        (true, true) => a.k.cmp(&b.k),
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        // larger power of two is smaller; then larger odd part is smaller
        (false, false) => b.k.cmp(&a.k).then(b.s.cmp(&a.s)),
    }
}

/// `{ m ≤ bound : m ⊴ n }`.
pub fn shark_forced(n: u64, bound: u64) -> BTreeSet<u64> {
    (1..=bound)
        .filter(|&m| shark_cmp(m, n) != Ordering::Greater)
        .collect()
}

/// Periods forced by the power-of-two and `2^k·s` walk constructions alone,
/// truncated at `bound`. Contains `n` when `n ≤ bound`.
pub fn basic_forced(n: u64, bound: u64) -> BTreeSet<u64> {
    assert!(n > 0, "periods are positive");
    let class = PeriodClass::of(n);
    let mut out = BTreeSet::new();
    if class.is_power_of_two() {
        out.extend(powers_of_two(bound).filter(|&p| p <= n));
        return out;
    }
    let (k, s) = (class.k, class.s);
    out.extend(powers_of_two(bound));
    for m in 1..=bound {
        let c = PeriodClass::of(m);
        if c.is_power_of_two() {
            continue;
        }
        if c.k == k && c.s >= s {
            out.insert(m);
        } else if c.k > k && (c.s << (c.k - k)) > s {
            out.insert(m);
        }
    }
    out
}

/// Repeatedly clears the lowest set bit until reaching zero.
pub fn remove_ones(v: u64) -> Vec<u64> {
    assert!(v >= 1, "remove_ones needs v >= 1");
    let mut out = Vec::new();
    let mut cur = v;
    while cur != 0 {
        cur &= cur - 1;
        out.push(cur);
    }
    out
}

/// Periods forced for a tree vertex map whose `v` vertices form one orbit,
/// truncated at `bound`.
///
/// The `2^p·r` clause admits every integer `r ≥ q`, odd or even.
pub fn tree_forced(v: u64, bound: u64) -> Result<BTreeSet<u64>> {
    if v < 2 {
        return Err(DynError::domain(format!("tree_forced needs v >= 2, got {v}")));
    }
    let class = PeriodClass::of(v);
    let mut out = BTreeSet::new();
    if class.is_power_of_two() {
        out.extend(powers_of_two(bound).filter(|&p| p <= v));
    } else {
        out.extend(powers_of_two(bound));
        let (p, q) = (class.k, class.s);
        let mut r = q;
        while (r << p) <= bound {
            out.insert(r << p);
            r += 1;
        }
    }
    out.extend(remove_ones(v).into_iter().filter(|&m| m > 0 && m <= bound));
    if v <= bound {
        out.insert(v);
    }
    Ok(out)
}

fn powers_of_two(bound: u64) -> impl Iterator<Item = u64> {
    (0..64)
        .map(|e| 1u64 << e)
        .take_while(move |&p| p <= bound)
}

/// Which forcing order to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForcingModel {
    Sharkovsky,
    Basic,
    Tree,
}

impl ForcingModel {
    pub fn forced(self, n: u64, bound: u64) -> Result<BTreeSet<u64>> {
        match self {
            ForcingModel::Sharkovsky => Ok(shark_forced(n, bound)),
            ForcingModel::Basic => Ok(basic_forced(n, bound)),
            ForcingModel::Tree => tree_forced(n, bound),
        }
    }
}

impl FromStr for ForcingModel {
    type Err = DynError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sharkovsky" => Ok(ForcingModel::Sharkovsky),
            "basic" => Ok(ForcingModel::Basic),
            "tree" => Ok(ForcingModel::Tree),
            other => Err(DynError::Parse(format!("unknown forcing model {other:?}"))),
        }
    }
}

impl fmt::Display for ForcingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ForcingModel::Sharkovsky => "sharkovsky",
            ForcingModel::Basic => "basic",
            ForcingModel::Tree => "tree",
        };
        f.write_str(name)
    }
}

/// Möbius function.
pub fn mobius(d: u64) -> i64 {
    assert!(d > 0, "mobius is defined for positive integers");
    let mut n = d;
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Positive divisors in ascending order.
pub fn divisors(k: u64) -> Vec<u64> {
    assert!(k > 0, "divisors of zero are not a finite list");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= k {
        if k % d == 0 {
            small.push(d);
            if d * d != k {
                large.push(k / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}
