//! Structure constants of the commutator formula in this matrix realization.
//!
//! For roots `phi, psi` with `phi + psi` a root,
//! `(eps_phi(u), eps_psi(v)) = prod eps_{i phi + j psi}(c_ij u^i v^j)` over
//! `(i, j) in {(1,1), (1,2), (2,1)}` with `i phi + j psi` a root.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{root_element, RootIndex, SpMatrix};
use crate::rings::RingDesc;

/// One term `eps_root(coeff * u^i * v^j)` of a commutator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignTerm {
    pub i: u32,
    pub j: u32,
    pub root: RootIndex,
    pub coeff: i64,
}

/// Which relation family a pair belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// two short roots with short sum: one term `+-uv`
    A2,
    /// two short roots with long sum: one term `+-2uv`
    ShortShortLong,
    /// a short and a long root: a short term `+-uv` and a long term quadratic in the short parameter
    ShortLong,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignEntry {
    pub first: RootIndex,
    pub second: RootIndex,
    pub family: Family,
    pub terms: Vec<SignTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignTable {
    pub n: usize,
    pub entries: Vec<SignEntry>,
}

const STORED_N3: &str = include_str!("../../data/sign_table_n3.json");

/// The table shipped with the crate for rank 3.
pub fn stored_table_n3() -> SignTable {
    serde_json::from_str(STORED_N3).expect("bundled sign table parses")
}

fn family(first: &RootIndex, second: &RootIndex, sum: &RootIndex) -> Family {
    match (first.is_long() || second.is_long(), sum.is_long()) {
        (true, _) => Family::ShortLong,
        (false, true) => Family::ShortShortLong,
        (false, false) => Family::A2,
    }
}

/// Reads the constants off the matrices at `u = v = 1` over `Z`.
pub fn derive_entry(n: usize, first: &RootIndex, second: &RootIndex) -> Option<SignEntry> {
    let sum = first.add(second, n)?;
    let z = RingDesc::Integers;
    let one = BigInt::one();
    let c = root_element(n, &z, first, &one).commutator(&root_element(n, &z, second, &one));
    let terms: Vec<SignTerm> = [(1u32, 1u32), (1, 2), (2, 1)]
        .into_iter()
        .filter_map(|(i, j)| {
            let root = first.combine(i as i32, second, j as i32, n)?;
            let (r, col) = root.primary_position(n);
            let coeff = c.get(r, col).to_i64().expect("small structure constant");
            Some(SignTerm { i, j, root, coeff })
        })
        .collect();
    Some(SignEntry {
        first: *first,
        second: *second,
        family: family(first, second, &sum),
        terms,
    })
}

/// Table over every ordered pair of positive roots whose sum is a root.
pub fn derive_table(n: usize) -> SignTable {
    let pos = RootIndex::positive_roots(n);
    let entries = pos
        .iter()
        .flat_map(|a| pos.iter().map(move |b| (a, b)))
        .filter_map(|(a, b)| derive_entry(n, a, b))
        .collect();
    SignTable { n, entries }
}

impl SignEntry {
    /// Right-hand side of the relation for parameters `u` (first) and `v` (second).
    pub fn predicted(&self, n: usize, ring: &RingDesc, u: &BigInt, v: &BigInt) -> SpMatrix {
        let mut out = SpMatrix::identity(n, ring);
        for t in &self.terms {
            let p = BigInt::from(t.coeff) * u.pow(t.i) * v.pow(t.j);
            out = out.mul(&root_element(n, ring, &t.root, &p));
        }
        out
    }

    pub fn holds(&self, n: usize, ring: &RingDesc, u: &BigInt, v: &BigInt) -> bool {
        let lhs = root_element(n, ring, &self.first, u).commutator(&root_element(n, ring, &self.second, v));
        lhs == self.predicted(n, ring, u, v)
    }

    /// Whether the magnitudes match the family: `1` for A2 and mixed pairs, `2` for short pairs with long sum.
    pub fn magnitudes_match_family(&self) -> bool {
        let mags: Vec<i64> = self.terms.iter().map(|t| t.coeff.abs()).collect();
        match self.family {
            Family::A2 => mags == [1],
            Family::ShortShortLong => mags == [2],
            Family::ShortLong => mags == [1, 1],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stored_table_matches_derivation() {
        assert_eq!(derive_table(3), stored_table_n3());
    }

    #[test]
    fn families_have_expected_shapes() {
        for n in 2..5 {
            let t = derive_table(n);
            assert!(t.entries.iter().all(|e| e.magnitudes_match_family()));
        }
    }

    #[test]
    fn relations_hold_over_z() {
        let z = RingDesc::Integers;
        let t = derive_table(3);
        for e in &t.entries {
            for (u, v) in [(1, 1), (2, -3), (-5, 7)] {
                assert!(e.holds(3, &z, &BigInt::from(u), &BigInt::from(v)), "{e:?}");
            }
        }
    }
}
