//! The matrix model of `Sp_2n(R)`: membership, block inverse, root and Weyl elements,
//! reduction modulo maximal ideals.

mod dense;
mod roots;
pub mod signs;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rings::{JsonInt, MaxIdeal, RingDesc, RingError};

pub use dense::Mat;
pub(crate) use dense::{compress_vector, embed_2x2, inverse_2x2, rotation};
pub use roots::{RootIndex, RootKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymplecticError {
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("expected a {expected}x{expected} matrix, got {got} rows")]
    BadShape { expected: usize, got: usize },
    #[error("root {0} is invalid for rank {1}")]
    InvalidRoot(RootIndex, usize),
    #[error("cannot parse root {0:?}")]
    ParseRoot(String),
    #[error("Weyl index {k} out of range 2..={n}")]
    WeylIndex { k: usize, n: usize },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("prime {0} does not divide the modulus of {1}")]
    PrimeNotInRing(u64, RingDesc),
    #[error("canonical byte encoding needs a finite ring")]
    NoEncoding,
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A `2n x 2n` matrix with `A^T J A = J`, entries in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpMatrix {
    n: usize,
    mat: Mat,
}

impl fmt::Debug for SpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SpMatrix(n={}, {})", self.n, self.mat.ring())?;
        for r in self.mat.rows() {
            let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// The four `n x n` blocks `[[A1, A2], [A3, A4]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockView {
    pub a1: Mat,
    pub a2: Mat,
    pub a3: Mat,
    pub a4: Mat,
}

impl BlockView {
    pub fn assemble(&self) -> Mat {
        let n = self.a1.dim();
        let mut m = Mat::zero(2 * n, self.a1.ring());
        m.set_block(0, 0, &self.a1);
        m.set_block(0, n, &self.a2);
        m.set_block(n, 0, &self.a3);
        m.set_block(n, n, &self.a4);
        m
    }
}

/// The standard form `J = [[0, I], [-I, 0]]` as a plain matrix.
pub fn form_matrix(n: usize, ring: &RingDesc) -> Mat {
    let mut j = Mat::zero(2 * n, ring);
    for i in 0..n {
        j.set(i, n + i, BigInt::one());
        j.set(n + i, i, -BigInt::one());
    }
    j
}

pub fn is_symplectic_mat(m: &Mat) -> bool {
    let d = m.dim();
    if d % 2 != 0 {
        return false;
    }
    let j = form_matrix(d / 2, m.ring());
    m.transpose().mul(&j).mul(m) == j
}

impl SpMatrix {
    /// Checked constructor.
    pub fn from_mat(n: usize, mat: Mat) -> Result<Self, SymplecticError> {
        if mat.dim() != 2 * n {
            return Err(SymplecticError::BadShape {
                expected: 2 * n,
                got: mat.dim(),
            });
        }
        if !is_symplectic_mat(&mat) {
            return Err(SymplecticError::NotSymplectic);
        }
        Ok(SpMatrix { n, mat })
    }

    pub fn from_rows(n: usize, ring: &RingDesc, rows: &[Vec<BigInt>]) -> Result<Self, SymplecticError> {
        if rows.len() != 2 * n || rows.iter().any(|r| r.len() != 2 * n) {
            return Err(SymplecticError::BadShape {
                expected: 2 * n,
                got: rows.len(),
            });
        }
        SpMatrix::from_mat(n, Mat::from_rows(ring, rows))
    }

    /// Wraps a matrix known to be symplectic by construction (a product of symplectic matrices).
    pub(crate) fn trusted(n: usize, mat: Mat) -> Self {
        debug_assert!(is_symplectic_mat(&mat), "internal construction left the group");
        SpMatrix { n, mat }
    }

    pub fn identity(n: usize, ring: &RingDesc) -> Self {
        SpMatrix {
            n,
            mat: Mat::identity(2 * n, ring),
        }
    }

    /// The form matrix `J`, itself symplectic.
    pub fn j(n: usize, ring: &RingDesc) -> Self {
        SpMatrix {
            n,
            mat: form_matrix(n, ring),
        }
    }

    pub fn minus_identity(n: usize, ring: &RingDesc) -> Self {
        SpMatrix {
            n,
            mat: Mat::identity(2 * n, ring).neg(),
        }
    }

    /// `block-diag(P, P^{-T})` for `P` in `GL_n`.
    pub fn block_diag(p: &Mat) -> Option<Self> {
        let n = p.dim();
        let pit = p.inverse_by_elimination()?.transpose();
        let mut m = Mat::zero(2 * n, p.ring());
        m.set_block(0, 0, p);
        m.set_block(n, n, &pit);
        Some(SpMatrix { n, mat: m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &RingDesc {
        self.mat.ring()
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    /// Entry at 0-based `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        self.mat.get(i, j)
    }

    /// Entry at 1-based `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        self.mat.get(i - 1, j - 1)
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.mat.rows()
    }

    pub fn is_identity(&self) -> bool {
        self.mat.is_identity()
    }

    pub fn is_symplectic(&self) -> bool {
        is_symplectic_mat(&self.mat)
    }

    fn check_compatible(&self, o: &SpMatrix) {
        assert_eq!(self.n, o.n, "rank mismatch");
        assert_eq!(self.ring(), o.ring(), "ring mismatch");
    }

    pub fn mul(&self, o: &SpMatrix) -> SpMatrix {
        self.check_compatible(o);
        SpMatrix {
            n: self.n,
            mat: self.mat.mul(&o.mat),
        }
    }

    /// Inverse via the block formula `A^{-1} = -J A^T J`.
    pub fn inverse(&self) -> SpMatrix {
        let b = self.blocks();
        let mut m = Mat::zero(2 * self.n, self.ring());
        m.set_block(0, 0, &b.a4.transpose());
        m.set_block(0, self.n, &b.a2.transpose().neg());
        m.set_block(self.n, 0, &b.a3.transpose().neg());
        m.set_block(self.n, self.n, &b.a1.transpose());
        SpMatrix { n: self.n, mat: m }
    }

    pub fn transpose(&self) -> SpMatrix {
        SpMatrix {
            n: self.n,
            mat: self.mat.transpose(),
        }
    }

    /// `W A W^{-1}`.
    pub fn conjugate_by(&self, w: &SpMatrix) -> SpMatrix {
        w.mul(self).mul(&w.inverse())
    }

    /// `(A, B) = A B A^{-1} B^{-1}`.
    pub fn commutator(&self, b: &SpMatrix) -> SpMatrix {
        self.mul(b).mul(&self.inverse()).mul(&b.inverse())
    }

    pub fn pow(&self, e: i64) -> SpMatrix {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = SpMatrix::identity(self.n, self.ring());
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn blocks(&self) -> BlockView {
        let n = self.n;
        BlockView {
            a1: self.mat.block(0, 0, n),
            a2: self.mat.block(0, n, n),
            a3: self.mat.block(n, 0, n),
            a4: self.mat.block(n, n, n),
        }
    }

    /// Entrywise reduction modulo a maximal ideal; the result lives over `F_p`.
    pub fn reduce_mod(&self, m: &MaxIdeal) -> Result<SpMatrix, SymplecticError> {
        if let Some(modulus) = self.ring().modulus() {
            if !modulus.is_multiple_of(&BigInt::from(m.prime)) {
                return Err(SymplecticError::PrimeNotInRing(m.prime, self.ring().clone()));
            }
        }
        let field = RingDesc::modulo(m.prime)?;
        Ok(SpMatrix {
            n: self.n,
            mat: self.mat.change_ring(&field),
        })
    }

    /// Whether the image modulo `m` is `+I` or `-I`.
    pub fn is_central_mod(&self, m: &MaxIdeal) -> Result<bool, SymplecticError> {
        let r = self.reduce_mod(m)?;
        let field = r.ring().clone();
        Ok(r.is_identity() || r == SpMatrix::minus_identity(self.n, &field))
    }

    /// Row-major bit packing of residues, `ceil(log2 m)` bits each, least significant bit first.
    pub fn canonical_bytes(&self) -> Result<Vec<u8>, SymplecticError> {
        let m = self.ring().modulus().ok_or(SymplecticError::NoEncoding)?;
        let width = residue_width(m);
        let total = self.mat.entries().len() * width;
        let mut out = vec![0u8; total.div_ceil(8)];
        let mut pos = 0;
        for x in self.mat.entries() {
            let bytes = x.to_bytes_le().1;
            for b in 0..width {
                let bit = bytes.get(b / 8).map(|byte| (byte >> (b % 8)) & 1).unwrap_or(0);
                if bit == 1 {
                    out[pos / 8] |= 1 << (pos % 8);
                }
                pos += 1;
            }
        }
        Ok(out)
    }

    pub fn change_ring(&self, ring: &RingDesc) -> SpMatrix {
        SpMatrix {
            n: self.n,
            mat: self.mat.change_ring(ring),
        }
    }

    /// Replaces `self` with a root element if it is one.
    pub fn as_root_element(&self) -> Option<(RootIndex, BigInt)> {
        RootIndex::all(self.n).into_iter().find_map(|r| {
            let (i, j) = r.primary_position(self.n);
            let t = self.get(i, j).clone();
            (!t.is_zero() && root_element(self.n, self.ring(), &r, &t) == *self).then_some((r, t))
        })
    }
}

/// `ceil(log2 m)`: bits needed for residues in `[0, m)`.
pub fn residue_width(m: &BigInt) -> usize {
    let top = m - BigInt::one();
    (top.bits() as usize).max(1)
}

/// The root element `epsilon_r(t)`.
pub fn root_element(n: usize, ring: &RingDesc, r: &RootIndex, t: &BigInt) -> SpMatrix {
    r.validate(n).expect("root valid for rank");
    let mut m = Mat::identity(2 * n, ring);
    let neg_t = -t.clone();
    let mut put = |i: usize, j: usize, v: &BigInt| {
        // positions are 1-based in the positive realization; negative roots are transposed
        let (a, b) = if r.positive { (i - 1, j - 1) } else { (j - 1, i - 1) };
        m.set(a, b, v.clone());
    };
    match r.kind {
        RootKind::ShortDiff(i, j) => {
            put(i, j, t);
            put(n + j, n + i, &neg_t);
        }
        RootKind::ShortSum(i, j) => {
            put(i, n + j, t);
            put(j, n + i, t);
        }
        RootKind::Long(i) => put(i, n + i, t),
    }
    SpMatrix { n, mat: m }
}

pub fn root_element_checked(
    n: usize,
    ring: &RingDesc,
    r: &RootIndex,
    t: &BigInt,
) -> Result<SpMatrix, SymplecticError> {
    r.validate(n)?;
    Ok(root_element(n, ring, r, t))
}

/// `w_k`: the signed transposition of coordinates `1 <-> k` and `n+1 <-> n+k`.
pub fn weyl_k(n: usize, ring: &RingDesc, k: usize) -> Result<SpMatrix, SymplecticError> {
    if k < 2 || k > n {
        return Err(SymplecticError::WeylIndex { k, n });
    }
    let mut m = Mat::identity(2 * n, ring);
    let (a, b, c, d) = (0, k - 1, n, n + k - 1);
    for &(i, j, v) in &[(a, a, 0), (b, b, 0), (c, c, 0), (d, d, 0), (a, b, 1), (b, a, -1), (c, d, 1), (d, c, -1)] {
        m.set(i, j, BigInt::from(v));
    }
    Ok(SpMatrix { n, mat: m })
}

/// `w_r(t) = eps_r(t) eps_{-r}(-t^{-1}) eps_r(t)` for a unit `t`.
pub fn weyl_root(n: usize, ring: &RingDesc, r: &RootIndex, t: &BigInt) -> Result<SpMatrix, SymplecticError> {
    r.validate(n)?;
    let tinv = ring.inverse(t)?;
    let e = root_element(n, ring, r, t);
    let f = root_element(n, ring, &r.negate(), &-tinv);
    Ok(e.mul(&f).mul(&e))
}

/// A Weyl element `W` and sign `s` with `W eps_from(x) W^{-1} = eps_to(s x)` for all `x`.
///
/// Found by breadth-first search over simple reflections; `from` and `to` must have equal length.
pub fn weyl_transport(n: usize, ring: &RingDesc, from: &RootIndex, to: &RootIndex) -> Option<(SpMatrix, i64)> {
    if from.is_long() != to.is_long() {
        return None;
    }
    let simple = RootIndex::simple_roots(n);
    let mut prev: HashMap<RootIndex, Option<(RootIndex, usize)>> = HashMap::new();
    prev.insert(*from, None);
    let mut queue = VecDeque::from([*from]);
    while let Some(r) = queue.pop_front() {
        if r == *to {
            break;
        }
        for (k, a) in simple.iter().enumerate() {
            let s = r.reflect(a, n);
            if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(s) {
                e.insert(Some((r, k)));
                queue.push_back(s);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = *to;
    while let Some(Some((p, k))) = prev.get(&cur) {
        path.push(*k);
        cur = *p;
    }
    if cur != *from {
        return None;
    }
    // reflections applied first-to-last become left factors last-to-first
    let mut w = SpMatrix::identity(n, ring);
    for &k in path.iter().rev() {
        let wa = weyl_root(n, ring, &simple[k], &BigInt::one()).expect("1 is a unit");
        w = wa.mul(&w);
    }
    let probe = root_element(n, ring, from, &BigInt::one()).conjugate_by(&w);
    let (i, j) = to.primary_position(n);
    let v = probe.get(i, j).clone();
    let sign = if v.is_one() { 1 } else { -1 };
    debug_assert_eq!(probe, root_element(n, ring, to, &BigInt::from(sign)));
    Some((w, sign))
}

/// A product of `word_length` uniformly chosen root elements with nonzero parameters.
///
/// Over `Z` parameters are drawn from `{-2, -1, 1, 2}`.
pub fn random_sp(n: usize, ring: &RingDesc, word_length: usize, seed: u64) -> SpMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_sp_with(n, ring, word_length, &mut rng)
}

pub fn random_sp_with<R: Rng>(n: usize, ring: &RingDesc, word_length: usize, rng: &mut R) -> SpMatrix {
    let roots = RootIndex::all(n);
    let mut out = SpMatrix::identity(n, ring);
    for _ in 0..word_length {
        let r = roots[rng.gen_range(0..roots.len())];
        let t = random_nonzero(ring, rng);
        out = out.mul(&root_element(n, ring, &r, &t));
    }
    out
}

pub(crate) fn random_nonzero<R: Rng>(ring: &RingDesc, rng: &mut R) -> BigInt {
    match ring.modulus().and_then(|m| m.to_u64()) {
        Some(m) => BigInt::from(rng.gen_range(1..m)),
        None => match ring.modulus() {
            Some(m) => {
                let bits = m.bits();
                loop {
                    let words: Vec<u32> = (0..bits.div_ceil(32)).map(|_| rng.gen()).collect();
                    let x = BigInt::from_slice(num_bigint::Sign::Plus, &words).mod_floor(m);
                    if !x.is_zero() {
                        return x;
                    }
                }
            }
            None => BigInt::from([-2, -1, 1, 2][rng.gen_range(0..4)]),
        },
    }
}

pub(crate) fn random_elem<R: Rng>(ring: &RingDesc, rng: &mut R) -> BigInt {
    match ring.modulus().and_then(|m| m.to_u64()) {
        Some(m) => BigInt::from(rng.gen_range(0..m)),
        None if ring.is_finite() => {
            if rng.gen_bool(0.1) {
                BigInt::zero()
            } else {
                random_nonzero(ring, rng)
            }
        }
        None => BigInt::from(rng.gen_range(-20..=20)),
    }
}

#[derive(Serialize, Deserialize)]
struct SpMatrixJson {
    n: usize,
    ring: RingDesc,
    rows: Vec<Vec<JsonInt>>,
}

impl Serialize for SpMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SpMatrixJson {
            n: self.n,
            ring: self.ring().clone(),
            rows: self
                .rows()
                .iter()
                .map(|r| r.iter().map(JsonInt::from).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = SpMatrixJson::deserialize(d)?;
        let rows: Vec<Vec<BigInt>> = raw
            .rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.0).collect())
            .collect();
        SpMatrix::from_rows(raw.n, &raw.ring, &rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zm(m: i64) -> RingDesc {
        RingDesc::modulo(m).unwrap()
    }

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn long_root_matrix() {
        let z = RingDesc::Integers;
        let e = root_element(3, &z, &RootIndex::long(1, true), &b(7));
        let mut expected = Mat::identity(6, &z);
        expected.set(0, 3, b(7));
        assert_eq!(e.mat(), &expected);
        assert!(root_element(3, &z, &RootIndex::long(2, false), &b(0)).is_identity());
    }

    #[test]
    fn short_diff_matrix_mod_7() {
        let r = zm(7);
        let e = root_element(3, &r, &RootIndex::short_diff(1, 2, true), &b(5));
        let mut expected = Mat::identity(6, &r);
        expected.set(0, 1, b(5));
        expected.set(4, 3, b(-5));
        assert_eq!(e.mat(), &expected);
        // the form check written out by hand
        let j = form_matrix(3, &r);
        assert_eq!(e.mat().transpose().mul(&j).mul(e.mat()), j);
    }

    #[test]
    fn every_root_element_is_symplectic_and_additive() {
        let r = zm(11);
        for n in 2..5 {
            for root in RootIndex::all(n) {
                let a = root_element(n, &r, &root, &b(3));
                assert!(a.is_symplectic(), "{root}");
                let c = root_element(n, &r, &root, &b(5));
                assert_eq!(a.mul(&c), root_element(n, &r, &root, &b(8)));
                assert_eq!(a.inverse(), root_element(n, &r, &root, &b(-3)));
            }
        }
    }

    #[test]
    fn inverse_of_random_products() {
        let r = zm(11);
        for seed in 0..20 {
            let a = random_sp(3, &r, 10, seed);
            assert!(a.mul(&a.inverse()).is_identity());
            assert_eq!(a.inverse().mat(), &a.mat().inverse_by_elimination().unwrap());
        }
        let z = RingDesc::Integers;
        for seed in 0..10 {
            let a = random_sp(4, &z, 12, seed);
            assert!(a.is_symplectic());
            assert_eq!(a.inverse().mat(), &a.mat().inverse_by_elimination().unwrap());
        }
    }

    #[test]
    fn weyl_k_properties() {
        let z = RingDesc::Integers;
        let a = random_sp(3, &z, 12, 4);
        for k in 2..=3 {
            let w = weyl_k(3, &z, k).unwrap();
            assert!(w.is_symplectic());
            assert!(w.pow(4).is_identity());
            let twice = a.conjugate_by(&w).conjugate_by(&w);
            for i in 0..6 {
                assert_eq!(twice.get(i, i), a.get(i, i));
            }
        }
        let a3 = a.conjugate_by(&weyl_k(3, &z, 3).unwrap());
        assert_eq!(a3.at(1, 1), a.at(3, 3));
        assert!(weyl_k(3, &z, 1).is_err());
        assert!(weyl_k(3, &z, 4).is_err());
    }

    #[test]
    fn weyl_k_first_column() {
        // first column of w_k A w_k^{-1}: a_kk, a_2k..a_{k-1,k}, -a_1k, a_{k+1,k}.., then the
        // lower half a_{n+k,k}, a_{n+2,k}.., -a_{n+1,k}, a_{n+k+1,k}..
        let r = zm(210);
        let n = 4;
        let a = random_sp(n, &r, 30, 9);
        for k in 2..=n {
            let ak = a.conjugate_by(&weyl_k(n, &r, k).unwrap());
            for i in 1..=n {
                let src = if i == 1 { k } else if i == k { 1 } else { i };
                let sign = if i == k { -1 } else { 1 };
                assert_eq!(*ak.at(i, 1), r.reduce(&(a.at(src, k) * sign)));
                assert_eq!(*ak.at(n + i, 1), r.reduce(&(a.at(n + src, k) * sign)));
            }
        }
    }

    #[test]
    fn weyl_root_basics() {
        let r = zm(5);
        let w = weyl_root(3, &r, &RootIndex::long(1, true), &b(1)).unwrap();
        assert!(w.is_symplectic());
        let wm = weyl_root(3, &r, &RootIndex::long(1, true), &b(-1)).unwrap();
        assert_eq!(wm, w.inverse());
        assert!(weyl_root(3, &r, &RootIndex::long(1, true), &b(5)).is_err());
    }

    #[test]
    fn transport_reaches_every_root_of_equal_length() {
        let r = zm(7);
        let n = 3;
        let reference = RootIndex::short_diff(1, 2, true);
        for to in RootIndex::all(n) {
            let from = if to.is_long() { RootIndex::long(1, true) } else { reference };
            let (w, s) = weyl_transport(n, &r, &from, &to).unwrap();
            for x in 0..7 {
                let lhs = root_element(n, &r, &from, &b(x)).conjugate_by(&w);
                assert_eq!(lhs, root_element(n, &r, &to, &b(s * x)));
            }
        }
        assert!(weyl_transport(n, &r, &reference, &RootIndex::long(1, true)).is_none());
    }

    #[test]
    fn reduction_and_centrality() {
        let z = RingDesc::Integers;
        let p3 = MaxIdeal { prime: 3 };
        let e6 = root_element(3, &z, &RootIndex::long(1, true), &b(6));
        assert!(e6.reduce_mod(&p3).unwrap().is_identity());
        assert!(e6.is_central_mod(&p3).unwrap());
        assert!(!e6.is_central_mod(&MaxIdeal { prime: 5 }).unwrap());
        let r = zm(210);
        let a = random_sp(3, &r, 40, 2);
        let c = random_sp(3, &r, 40, 3);
        let p7 = MaxIdeal { prime: 7 };
        let ra = a.reduce_mod(&p7).unwrap();
        assert!(ra.is_symplectic());
        assert_eq!(a.mul(&c).reduce_mod(&p7).unwrap(), ra.mul(&c.reduce_mod(&p7).unwrap()));
        assert!(a.reduce_mod(&MaxIdeal { prime: 11 }).is_err());
        let minus = SpMatrix::minus_identity(3, &zm(7));
        assert!(minus.is_central_mod(&p7).unwrap());
        for root in RootIndex::all(3) {
            let e = root_element(3, &zm(7), &root, &b(1));
            assert_eq!(minus.mul(&e), e.mul(&minus));
        }
    }

    #[test]
    fn random_sp_determinism() {
        let r = zm(5);
        assert!(random_sp(3, &r, 0, 1).is_identity());
        assert_eq!(random_sp(3, &r, 40, 1), random_sp(3, &r, 40, 1));
        assert!(random_sp(3, &r, 40, 1).is_symplectic());
    }

    #[test]
    fn json_roundtrip_and_rejection() {
        let r = zm(210);
        let a = random_sp(3, &r, 20, 5);
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.contains("\"ring\":\"Z/210\""));
        let back: SpMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        let bad = r#"{"n":1,"ring":"Z","rows":[[1,1],[1,1]]}"#;
        assert!(serde_json::from_str::<SpMatrix>(bad).is_err());
        let big = r#"{"n":1,"ring":"Z","rows":[[1,"123456789012345678901234567890"],[0,1]]}"#;
        let m: SpMatrix = serde_json::from_str(big).unwrap();
        assert_eq!(m.at(1, 2).to_string(), "123456789012345678901234567890");
    }

    #[test]
    fn canonical_bytes_layout() {
        let r = zm(5);
        let e = root_element(1, &r, &RootIndex::long(1, true), &b(3));
        // entries 1, 3, 0, 1 at 3 bits each: 001 | 011 | 000 | 001 little-endian
        let bytes = e.canonical_bytes().unwrap();
        let bits: u32 = 1 | (3 << 3) | (1 << 9);
        assert_eq!(bytes, vec![(bits & 0xff) as u8, (bits >> 8) as u8]);
        assert_eq!(residue_width(&b(2)), 1);
        assert_eq!(residue_width(&b(8)), 3);
        assert_eq!(residue_width(&b(9)), 4);
        assert!(SpMatrix::identity(2, &RingDesc::Integers).canonical_bytes().is_err());
    }

    #[test]
    fn root_element_detection() {
        let r = zm(8);
        for root in RootIndex::all(3) {
            let e = root_element(3, &r, &root, &b(3));
            assert_eq!(e.as_root_element(), Some((root, b(3))));
        }
        assert_eq!(SpMatrix::identity(3, &r).as_root_element(), None);
    }
}
