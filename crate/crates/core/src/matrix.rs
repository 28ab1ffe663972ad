//! Square integer matrices for Markov and oriented Markov data.
//!
//! Entry `(i, j)` counts edges from `E_j` to `E_i` (column = source,
//! row = target), so products compose like functions, right to left.

use std::fmt;

use num_bigint::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{DynError, Result};
use crate::scalar::Entry;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedMatrix<T> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Entry> SignedMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        SignedMatrix {
            dim,
            entries: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = T::one();
        }
        m
    }

    /// Builds from row-major rows.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(DynError::Dimension {
                    left: dim,
                    right: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(SignedMatrix { dim, entries })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| T::from_int(v)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.entries[row * self.dim + col]
    }

    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut T {
        &mut self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.dim.max(1)).map(<[T]>::to_vec).collect()
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.dim).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn abs(&self) -> Self {
        SignedMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|v| !v.is_negative())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(DynError::Dimension {
                left: self.dim,
                right: other.dim,
            });
        }
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cell = out.get_mut(i, j);
                    *cell = cell.clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    /// `self^k` by repeated squaring; `self^0` is the identity.
    pub fn pow(&self, k: u64) -> Self {
        let mut result = Self::identity(self.dim);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("square");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("square");
            }
        }
        result
    }

    /// Conjugation by a diagonal ±1 matrix, i.e. flipping the orientation of
    /// the listed edges.
    pub fn flip_orientations(&self, flipped: &[bool]) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if flipped[i] != flipped[j] {
                    let cell = out.get_mut(i, j);
                    *cell = -cell.clone();
                }
            }
        }
        out
    }

    pub fn map<U: Entry>(&self, f: impl Fn(&T) -> U) -> SignedMatrix<U> {
        SignedMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = self
            .rows()
            .into_iter()
            .map(|r| Value::Array(r.iter().map(entry_to_json).collect()))
            .collect();
        serde_json::json!({ "d": self.dim, "entries": rows })
    }
}

fn entry_to_json<T: Entry>(v: &T) -> Value {
    match v.to_i64() {
        Some(x) => Value::from(x),
        None => Value::String(v.to_string()),
    }
}

/// Matrix product; fails on dimension mismatch.
pub fn mat_mul<T: Entry>(a: &SignedMatrix<T>, b: &SignedMatrix<T>) -> Result<SignedMatrix<T>> {
    a.mul(b)
}

pub fn mat_pow<T: Entry>(a: &SignedMatrix<T>, k: u64) -> SignedMatrix<T> {
    a.pow(k)
}

pub fn trace<T: Entry>(a: &SignedMatrix<T>) -> T {
    a.trace()
}

impl<T: Entry> Serialize for SignedMatrix<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SignedMatrix<BigInt> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            d: usize,
            entries: Vec<Vec<Value>>,
        }
        let raw = Raw::deserialize(d)?;
        let rows = raw
            .entries
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| match v {
                        Value::Number(n) => n
                            .as_i64()
                            .map(BigInt::from)
                            .ok_or_else(|| D::Error::custom("matrix entry is not an integer")),
                        Value::String(s) => s.parse::<BigInt>().map_err(D::Error::custom),
                        _ => Err(D::Error::custom("matrix entry must be a number or string")),
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let m = SignedMatrix::from_rows(rows).map_err(D::Error::custom)?;
        if m.dim != raw.d {
            return Err(D::Error::custom(format!("d = {} but {} rows", raw.d, m.dim)));
        }
        Ok(m)
    }
}

impl<T: Entry> fmt::Display for SignedMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(|v| v.to_string()).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for row in cells.chunks(self.dim.max(1)) {
            let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[{}]", padded.join(" "))?;
        }
        Ok(())
    }
}
