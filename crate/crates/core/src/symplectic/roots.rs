//! Combinatorics of the root system `C_n`, independent of any matrix realization.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::SymplecticError;

/// Shape of a root; indices are 1-based, `i < j` for the short kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RootKind {
    /// `e_i - e_j`
    ShortDiff(usize, usize),
    /// `e_i + e_j`
    ShortSum(usize, usize),
    /// `2 e_i`
    Long(usize),
}

/// A root of `C_n`: a kind together with a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootIndex {
    pub kind: RootKind,
    pub positive: bool,
}

impl RootIndex {
    pub fn short_diff(i: usize, j: usize, positive: bool) -> Self {
        RootIndex {
            kind: RootKind::ShortDiff(i, j),
            positive,
        }
    }

    pub fn short_sum(i: usize, j: usize, positive: bool) -> Self {
        RootIndex {
            kind: RootKind::ShortSum(i, j),
            positive,
        }
    }

    pub fn long(i: usize, positive: bool) -> Self {
        RootIndex {
            kind: RootKind::Long(i),
            positive,
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), SymplecticError> {
        let ok = match self.kind {
            RootKind::ShortDiff(i, j) | RootKind::ShortSum(i, j) => 1 <= i && i < j && j <= n,
            RootKind::Long(i) => 1 <= i && i <= n,
        };
        if ok {
            Ok(())
        } else {
            Err(SymplecticError::InvalidRoot(*self, n))
        }
    }

    pub fn is_long(&self) -> bool {
        matches!(self.kind, RootKind::Long(_))
    }

    pub fn negate(&self) -> Self {
        RootIndex {
            kind: self.kind,
            positive: !self.positive,
        }
    }

    /// Coordinates in the basis `e_1, ..., e_n`.
    pub fn weight(&self, n: usize) -> Vec<i32> {
        let mut w = vec![0; n];
        let s = if self.positive { 1 } else { -1 };
        match self.kind {
            RootKind::ShortDiff(i, j) => {
                w[i - 1] = s;
                w[j - 1] = -s;
            }
            RootKind::ShortSum(i, j) => {
                w[i - 1] = s;
                w[j - 1] = s;
            }
            RootKind::Long(i) => w[i - 1] = 2 * s,
        }
        w
    }

    /// Inverse of [`RootIndex::weight`]; `None` if `w` is not a root.
    pub fn from_weight(w: &[i32]) -> Option<Self> {
        let nz: Vec<(usize, i32)> = w
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| (k + 1, c))
            .collect();
        match nz.as_slice() {
            [(i, c)] if c.abs() == 2 => Some(RootIndex::long(*i, *c > 0)),
            [(i, a), (j, b)] if a.abs() == 1 && b.abs() == 1 => {
                if a == b {
                    Some(RootIndex::short_sum(*i, *j, *a > 0))
                } else {
                    Some(RootIndex::short_diff(*i, *j, *a > 0))
                }
            }
            _ => None,
        }
    }

    /// All `2 n^2` roots, positive ones first.
    pub fn all(n: usize) -> Vec<RootIndex> {
        let pos = Self::positive_roots(n);
        let neg: Vec<RootIndex> = pos.iter().map(|r| r.negate()).collect();
        pos.into_iter().chain(neg).collect()
    }

    pub fn positive_roots(n: usize) -> Vec<RootIndex> {
        let mut out = Vec::with_capacity(n * n);
        for i in 1..=n {
            for j in i + 1..=n {
                out.push(RootIndex::short_diff(i, j, true));
            }
        }
        for i in 1..=n {
            for j in i + 1..=n {
                out.push(RootIndex::short_sum(i, j, true));
            }
        }
        for i in 1..=n {
            out.push(RootIndex::long(i, true));
        }
        out
    }

    /// Simple roots `alpha_1, ..., alpha_{n-1}, beta` with `alpha_i = e_{n-i} - e_{n-i+1}`, `beta = 2 e_n`.
    pub fn simple_roots(n: usize) -> Vec<RootIndex> {
        let mut out: Vec<RootIndex> = (1..n)
            .map(|i| RootIndex::short_diff(n - i, n - i + 1, true))
            .collect();
        out.push(RootIndex::long(n, true));
        out
    }

    /// Image of `self` under the reflection in `alpha`.
    pub fn reflect(&self, alpha: &RootIndex, n: usize) -> RootIndex {
        let v = self.weight(n);
        let a = alpha.weight(n);
        let dot: i32 = v.iter().zip(&a).map(|(x, y)| x * y).sum();
        let norm: i32 = a.iter().map(|x| x * x).sum();
        let c = 2 * dot / norm;
        let w: Vec<i32> = v.iter().zip(&a).map(|(x, y)| x - c * y).collect();
        RootIndex::from_weight(&w).expect("reflections permute roots")
    }

    /// Sum of two roots, if it is a root.
    pub fn add(&self, o: &RootIndex, n: usize) -> Option<RootIndex> {
        let w: Vec<i32> = self
            .weight(n)
            .iter()
            .zip(o.weight(n))
            .map(|(x, y)| x + y)
            .collect();
        RootIndex::from_weight(&w)
    }

    /// `i * self + j * o`, if it is a root.
    pub fn combine(&self, i: i32, o: &RootIndex, j: i32, n: usize) -> Option<RootIndex> {
        let w: Vec<i32> = self
            .weight(n)
            .iter()
            .zip(o.weight(n))
            .map(|(x, y)| i * x + j * y)
            .collect();
        RootIndex::from_weight(&w)
    }

    /// 0-based matrix position holding the parameter of the root element.
    pub fn primary_position(&self, n: usize) -> (usize, usize) {
        let (r, c) = match self.kind {
            RootKind::ShortDiff(i, j) => (i - 1, j - 1),
            RootKind::ShortSum(i, j) => (i - 1, n + j - 1),
            RootKind::Long(i) => (i - 1, n + i - 1),
        };
        if self.positive {
            (r, c)
        } else {
            (c, r)
        }
    }
}

impl fmt::Display for RootIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = if self.positive { ("", "-") } else { ("-", "+") };
        match self.kind {
            RootKind::ShortDiff(i, j) => write!(f, "{a}e{i}{b}e{j}"),
            RootKind::ShortSum(i, j) => {
                let b = if self.positive { "+" } else { "-" };
                write!(f, "{a}e{i}{b}e{j}")
            }
            RootKind::Long(i) => write!(f, "{a}2e{i}"),
        }
    }
}

impl FromStr for RootIndex {
    type Err = SymplecticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SymplecticError::ParseRoot(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        if let Some(i) = body.strip_prefix("2e") {
            let i: usize = i.parse().map_err(|_| bad())?;
            return Ok(RootIndex::long(i, !neg));
        }
        let body = body.strip_prefix('e').ok_or_else(bad)?;
        let split = body.find(['+', '-']).ok_or_else(bad)?;
        let i: usize = body[..split].parse().map_err(|_| bad())?;
        let op = &body[split..=split];
        let j: usize = body[split + 1..]
            .strip_prefix('e')
            .ok_or_else(bad)?
            .parse()
            .map_err(|_| bad())?;
        let mut w = vec![0i32; i.max(j)];
        if i == 0 || j == 0 || i == j {
            return Err(bad());
        }
        let si = if neg { -1 } else { 1 };
        w[i - 1] += si;
        w[j - 1] += if op == "+" { 1 } else { -1 };
        RootIndex::from_weight(&w).ok_or_else(bad)
    }
}

impl Serialize for RootIndex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RootIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
