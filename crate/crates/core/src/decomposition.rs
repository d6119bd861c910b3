//! Unipotent factorizations over stable-range-1 rings, root-element words, and the
//! end-to-end conjugation-word pipeline.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::reduction::{level_ideal_7n_split, reference_root, CertifiedIdeal, ReductionError};
use crate::rings::{decompose_over_ideals, prime_factors, IdealRep, RingDesc, RingError};
use crate::symplectic::signs::derive_entry;
use crate::symplectic::{compress_vector, random_elem, root_element, weyl_transport, Mat, RootIndex, SpMatrix};
use crate::words::{conjugate_word, ConjWord, GenRef, Letter};

#[derive(Debug, Error)]
pub enum DecompositionError {
    #[error("ring {0} is not a finite quotient Z/m")]
    NotFinite(RingDesc),
    #[error("rank n >= {0} required, got {1}")]
    RankTooSmall(usize, usize),
    #[error("matrix is not upper unipotent")]
    NotUpperUnipotent,
    #[error("no (U+U-)^2 factorization found after {0} attempts")]
    NoFactorization(usize),
    #[error("the set does not normally generate: it is central modulo {0:?}")]
    NotNormallyGenerating(Vec<u64>),
    #[error("empty generating set")]
    EmptySet,
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Whether `m = [[U, *], [0, U^{-T}]]` with `U` upper unitriangular.
pub fn is_upper_unipotent(m: &SpMatrix) -> bool {
    let n = m.n();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let top = m.get(i, j);
            let ok_top = match i.cmp(&j) {
                std::cmp::Ordering::Equal => top.is_one(),
                std::cmp::Ordering::Greater => top.is_zero(),
                std::cmp::Ordering::Less => true,
            };
            ok_top && m.get(n + i, j).is_zero()
        })
    })
}

pub fn is_lower_unipotent(m: &SpMatrix) -> bool {
    is_upper_unipotent(&m.transpose())
}

/// `A = u1p u1m u2p u2m` with `u*p` upper and `u*m` lower unipotent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnipotentFactorization {
    pub u1p: SpMatrix,
    pub u1m: SpMatrix,
    pub u2p: SpMatrix,
    pub u2m: SpMatrix,
}

impl UnipotentFactorization {
    pub fn product(&self) -> SpMatrix {
        self.u1p.mul(&self.u1m).mul(&self.u2p).mul(&self.u2m)
    }

    pub fn is_well_formed(&self) -> bool {
        is_upper_unipotent(&self.u1p)
            && is_upper_unipotent(&self.u2p)
            && is_lower_unipotent(&self.u1m)
            && is_lower_unipotent(&self.u2m)
    }
}

fn finite_modulus(ring: &RingDesc) -> Result<BigInt, DecompositionError> {
    ring.modulus().cloned().ok_or_else(|| DecompositionError::NotFinite(ring.clone()))
}

/// Prime-power factorization `m = prod p^e`, as the list of `p^e`.
fn prime_powers(m: &BigInt) -> Result<Vec<BigInt>, RingError> {
    Ok(prime_factors(m)?
        .into_iter()
        .map(|p| {
            let p = BigInt::from(p);
            let mut q = p.clone();
            while (m % (&q * &p)).is_zero() {
                q *= &p;
            }
            q
        })
        .collect())
}

/// Some `s` with `a s = b (mod q)`.
fn solve_linear(a: &BigInt, b: &BigInt, q: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(q).extended_gcd(q);
    let g = e.gcd;
    let b = b.mod_floor(q);
    if g.is_zero() {
        return b.is_zero().then(BigInt::zero);
    }
    if !(&b % &g).is_zero() {
        return None;
    }
    let q2 = q / &g;
    Some(((b / &g) * e.x).mod_floor(&q2))
}

/// `(t, s)` with `alpha + beta t + gamma s + delta t s = 1` modulo `m`.
fn solve_bilinear(c: &[BigInt; 4], m: &BigInt, powers: &[BigInt], rng: &mut ChaCha8Rng) -> Option<(BigInt, BigInt)> {
    let mut parts_t = Vec::with_capacity(powers.len());
    let mut parts_s = Vec::with_capacity(powers.len());
    for q in powers {
        let candidates: Vec<BigInt> = match q.to_u64() {
            Some(qq) if qq <= 4096 => (0..qq).map(BigInt::from).collect(),
            _ => (0..4096).map(|i| if i == 0 { BigInt::zero() } else { BigInt::from(rng.gen::<u64>()).mod_floor(q) }).collect(),
        };
        let found = candidates.into_iter().find_map(|t| {
            let rhs = BigInt::one() - &c[0] - &c[1] * &t;
            let coef = &c[2] + &c[3] * &t;
            solve_linear(&coef, &rhs, q).map(|s| (t, s))
        })?;
        parts_t.push((found.0, q.clone()));
        parts_s.push((found.1, q.clone()));
    }
    let t = crate::rings::crt(&parts_t).mod_floor(m);
    let s = crate::rings::crt(&parts_s).mod_floor(m);
    Some((t, s))
}

fn sigma(n: usize, ring: &RingDesc, s: &Mat) -> SpMatrix {
    let mut m = Mat::identity(2 * n, ring);
    m.set_block(0, n, s);
    SpMatrix::from_mat(n, m).expect("symmetric blocks give symplectic matrices")
}

fn diag_mat(ring: &RingDesc, d: &[BigInt]) -> Mat {
    let mut m = Mat::zero(d.len(), ring);
    for (i, x) in d.iter().enumerate() {
        m.set(i, i, x.clone());
    }
    m
}

/// Splits `c` into lower and upper unipotent factors when every leading minor of its upper-left block is 1.
fn split_lower_upper(c: &SpMatrix) -> Option<(SpMatrix, SpMatrix)> {
    let n = c.n();
    let ring = c.ring().clone();
    let b = c.blocks();
    // Doolittle with unit pivots
    let mut l = Mat::identity(n, &ring);
    let mut u = Mat::zero(n, &ring);
    for k in 0..n {
        for j in k..n {
            let s: BigInt = (0..k).map(|p| l.get(k, p) * u.get(p, j)).sum();
            u.set(k, j, ring.reduce(&(b.a1.get(k, j) - s)));
        }
        if !u.get(k, k).is_one() {
            return None;
        }
        for i in k + 1..n {
            let s: BigInt = (0..k).map(|p| l.get(i, p) * u.get(p, k)).sum();
            l.set(i, k, ring.reduce(&(b.a1.get(i, k) - s)));
        }
    }
    let linv = l.inverse_by_elimination()?;
    let uinv = u.inverse_by_elimination()?;
    let mut lower = Mat::identity(2 * n, &ring);
    lower.set_block(0, 0, &l);
    lower.set_block(n, 0, &b.a3.mul(&uinv));
    lower.set_block(n, n, &linv.transpose());
    let mut upper = Mat::identity(2 * n, &ring);
    upper.set_block(0, 0, &u);
    upper.set_block(0, n, &linv.mul(&b.a2));
    upper.set_block(n, n, &uinv.transpose());
    let lower = SpMatrix::from_mat(n, lower).ok()?;
    let upper = SpMatrix::from_mat(n, upper).ok()?;
    (lower.mul(&upper) == *c).then_some((lower, upper))
}

fn random_upper<R: Rng>(n: usize, ring: &RingDesc, rng: &mut R) -> SpMatrix {
    RootIndex::positive_roots(n)
        .iter()
        .fold(SpMatrix::identity(n, ring), |acc, r| acc.mul(&root_element(n, ring, r, &random_elem(ring, rng))))
}

const SR1_ATTEMPTS: usize = 64;

/// `(U+ U-)^2` factorization over `Z/m`, deterministic for a given input.
pub fn unipotent_decompose_sr1(a: &SpMatrix) -> Result<UnipotentFactorization, DecompositionError> {
    let n = a.n();
    let ring = a.ring().clone();
    let m = finite_modulus(&ring)?;
    if n < 2 {
        return Err(DecompositionError::RankTooSmall(2, n));
    }
    let id = SpMatrix::identity(n, &ring);
    if is_upper_unipotent(a) {
        return Ok(UnipotentFactorization {
            u1p: a.clone(),
            u1m: id.clone(),
            u2p: id.clone(),
            u2m: id,
        });
    }
    if is_lower_unipotent(a) {
        return Ok(UnipotentFactorization {
            u1p: id.clone(),
            u1m: id.clone(),
            u2p: id,
            u2m: a.clone(),
        });
    }
    let powers = prime_powers(&m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for attempt in 0..SR1_ATTEMPTS {
        let (rp, rm) = if attempt == 0 {
            (id.clone(), id.clone())
        } else {
            (random_upper(n, &ring, &mut rng), random_upper(n, &ring, &mut rng).transpose())
        };
        let mp = rp.mul(a).mul(&rm);
        if let Some(f) = sr1_attempt(&mp, &m, &powers, &mut rng) {
            let (t_neg, l, w, s_neg) = f;
            let out = UnipotentFactorization {
                u1p: rp.inverse().mul(&t_neg),
                u1m: l,
                u2p: w,
                u2m: s_neg.mul(&rm.inverse()),
            };
            debug_assert_eq!(out.product(), *a);
            return Ok(out);
        }
    }
    Err(DecompositionError::NoFactorization(SR1_ATTEMPTS))
}

/// Finds diagonal `t, s` making `sigma(t) M [[I,0],[s,I]]` lie in `U- U+`.
fn sr1_attempt(
    mp: &SpMatrix,
    m: &BigInt,
    powers: &[BigInt],
    rng: &mut ChaCha8Rng,
) -> Option<(SpMatrix, SpMatrix, SpMatrix, SpMatrix)> {
    let n = mp.n();
    let ring = mp.ring().clone();
    let b = mp.blocks();
    let mut t = vec![BigInt::zero(); n];
    let mut s = vec![BigInt::zero(); n];
    let top_left = |t: &[BigInt], s: &[BigInt], k: usize| -> BigInt {
        let mut c = Mat::zero(k, &ring);
        for i in 0..k {
            for j in 0..k {
                let v = b.a1.get(i, j) + &t[i] * b.a3.get(i, j) + b.a2.get(i, j) * &s[j] + &t[i] * b.a4.get(i, j) * &s[j];
                c.set(i, j, ring.reduce(&v));
            }
        }
        c.det()
    };
    for k in 0..n {
        let mut f = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
        for (idx, (tv, sv)) in [(0, 0), (1, 0), (0, 1), (1, 1)].into_iter().enumerate() {
            t[k] = BigInt::from(tv);
            s[k] = BigInt::from(sv);
            f[idx] = top_left(&t, &s, k + 1);
        }
        let coeffs = [f[0].clone(), &f[1] - &f[0], &f[2] - &f[0], &f[3] - &f[1] - &f[2] + &f[0]];
        let (tk, sk) = solve_bilinear(&coeffs, m, powers, rng)?;
        t[k] = tk;
        s[k] = sk;
    }
    let st = sigma(n, &ring, &diag_mat(&ring, &t));
    let mut low = Mat::identity(2 * n, &ring);
    low.set_block(n, 0, &diag_mat(&ring, &s));
    let ts = SpMatrix::from_mat(n, low).ok()?;
    let c = st.mul(mp).mul(&ts);
    let (l, w) = split_lower_upper(&c)?;
    Some((st.inverse(), l, w, ts.inverse()))
}

fn root_letter(ring: &RingDesc, conj: SpMatrix, r: RootIndex, t: BigInt) -> Option<Letter> {
    let t = ring.reduce(&t);
    (!t.is_zero()).then(|| Letter {
        conj,
        base: GenRef::RootElem(r, t),
        exp: 1,
    })
}

/// Embeds a `k x k` block at the bottom-right of the `n x n` identity.
fn embed_tail(n: usize, ring: &RingDesc, d: &Mat) -> Mat {
    let mut m = Mat::identity(n, ring);
    m.set_block(n - d.dim(), n - d.dim(), d);
    m
}

/// Reduces `u` in `U+` to the corner generated by the roots of `e_{n-1}, e_n`.
///
/// Returns `(u', w)` with `eval(w) = u'^{-1} u` and `|w| <= 3(n-2)`.
pub fn unipotent_reduce_to_c2(u: &SpMatrix) -> Result<(SpMatrix, ConjWord), DecompositionError> {
    if !is_upper_unipotent(u) {
        return Err(DecompositionError::NotUpperUnipotent);
    }
    let n = u.n();
    let ring = u.ring().clone();
    let b = u.blocks();
    let mut uu = b.a1.clone();
    let uinv = uu.inverse_by_elimination().ok_or(DecompositionError::NotUpperUnipotent)?;
    let mut s = uinv.mul(&b.a2);
    let mut levels: Vec<Vec<Letter>> = Vec::new();
    for l in 0..n.saturating_sub(2) {
        let mut letters = Vec::new();
        // T: diag(V), V = I + e_l c^T
        let c: Vec<BigInt> = (l + 1..n).map(|j| uu.get(l, j).clone()).collect();
        let mut v = Mat::identity(n, &ring);
        let mut vinv = Mat::identity(n, &ring);
        for (off, x) in c.iter().enumerate() {
            v.set(l, l + 1 + off, x.clone());
            vinv.set(l, l + 1 + off, ring.reduce(&-x));
        }
        let (d, g) = compress_vector(&ring, &c);
        let q = embed_tail(n, &ring, &d.transpose());
        let conj = SpMatrix::block_diag(&q).expect("determinant one");
        let t_letter = root_letter(&ring, conj, RootIndex::short_diff(l + 1, l + 2, true), g);
        uu = uu.mul(&vinv);
        s = v.mul(&s).mul(&v.transpose());
        // S: sigma(b e_l e_l^T) sigma(e_l d^T + d e_l^T)
        let bll = s.get(l, l).clone();
        let dv: Vec<BigInt> = (l + 1..n).map(|j| s.get(l, j).clone()).collect();
        let (d2, g2) = compress_vector(&ring, &dv);
        let q2 = embed_tail(n, &ring, &d2.inverse_by_elimination().expect("determinant one"));
        let conj2 = SpMatrix::block_diag(&q2).expect("determinant one");
        letters.extend(root_letter(&ring, SpMatrix::identity(n, &ring), RootIndex::long(l + 1, true), bll));
        letters.extend(root_letter(&ring, conj2, RootIndex::short_sum(l + 1, l + 2, true), g2));
        letters.extend(t_letter);
        for j in l..n {
            s.set(l, j, BigInt::zero());
            s.set(j, l, BigInt::zero());
        }
        levels.push(letters);
    }
    let mut word = ConjWord::empty(n, &ring);
    for letters in levels.into_iter().rev() {
        for l in letters {
            word.push(l);
        }
    }
    let mut top = Mat::identity(2 * n, &ring);
    top.set_block(0, 0, &uu);
    top.set_block(0, n, &uu.mul(&s));
    top.set_block(n, n, &uu.inverse_by_elimination().expect("unitriangular").transpose());
    let corner = SpMatrix::from_mat(n, top).expect("upper unipotent");
    Ok((corner, word))
}

/// Whether `u` lies in the subgroup generated by roots supported on `e_{n-1}, e_n`, positive part.
pub fn in_c2_corner(u: &SpMatrix) -> bool {
    let n = u.n();
    if !is_upper_unipotent(u) || n < 2 {
        return false;
    }
    let c = n - 2;
    (0..2 * n).all(|i| {
        (0..2 * n).all(|j| {
            let inside = |k: usize| k % n >= c;
            i == j || (inside(i) && inside(j)) || u.get(i, j).is_zero()
        })
    })
}

/// At most four root letters for an element of the upper corner.
fn corner_word(u: &SpMatrix) -> ConjWord {
    let n = u.n();
    let ring = u.ring().clone();
    let id = SpMatrix::identity(n, &ring);
    let a = u.get(n - 2, n - 1).clone();
    let b = u.blocks();
    let s = b.a1.inverse_by_elimination().expect("unitriangular").mul(&b.a2);
    let mut w = ConjWord::empty(n, &ring);
    let letters = [
        root_letter(&ring, id.clone(), RootIndex::short_diff(n - 1, n, true), a),
        root_letter(&ring, id.clone(), RootIndex::long(n - 1, true), s.get(n - 2, n - 2).clone()),
        root_letter(&ring, id.clone(), RootIndex::long(n, true), s.get(n - 1, n - 1).clone()),
        root_letter(&ring, id, RootIndex::short_sum(n - 1, n, true), s.get(n - 2, n - 1).clone()),
    ];
    for l in letters.into_iter().flatten() {
        w.push(l);
    }
    w
}

/// Root-element word of length at most `3n - 2` for an upper unipotent matrix.
pub fn upper_unipotent_word(u: &SpMatrix) -> Result<ConjWord, DecompositionError> {
    let (corner, rest) = unipotent_reduce_to_c2(u)?;
    Ok(corner_word(&corner).concat(&rest))
}

/// A word over conjugates of root elements, evaluated against the empty generating set.
#[derive(Debug, Clone)]
pub struct ElqFactorization {
    pub word: ConjWord,
    pub budget: usize,
}

pub fn elq_budget(n: usize) -> usize {
    9 * n - 6
}

/// Writes `A` with at most `9n - 6` conjugates of root elements.
pub fn factor_elq(a: &SpMatrix) -> Result<ElqFactorization, DecompositionError> {
    let n = a.n();
    let ring = a.ring().clone();
    let budget = elq_budget(n);
    if a.is_identity() {
        return Ok(ElqFactorization {
            word: ConjWord::empty(n, &ring),
            budget,
        });
    }
    if let Some((r, t)) = a.as_root_element() {
        let word = ConjWord::single(n, &ring, GenRef::RootElem(r, t), 1);
        return Ok(ElqFactorization { word, budget });
    }
    let f = unipotent_decompose_sr1(a)?;
    let j = SpMatrix::j(n, &ring);
    let jinv = j.inverse();
    // lower unipotent x = J (J^{-1} x J) J^{-1} with the inner factor upper unipotent
    let lower_word = |x: &SpMatrix| -> Result<ConjWord, DecompositionError> {
        Ok(conjugate_word(&upper_unipotent_word(&x.conjugate_by(&jinv))?, &j))
    };
    let first = conjugate_word(&lower_word(&f.u1m)?, &f.u1p);
    let middle = upper_unipotent_word(&f.u1p.mul(&f.u2p))?;
    let last = lower_word(&f.u2m)?;
    let word = first.concat(&middle).concat(&last);
    Ok(ElqFactorization { word, budget })
}

/// Which family of ideals supplies short-root certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// one sub-ideal of budget 64 per maximal ideal
    PerPrime,
    /// the full level ideal of every generator, budget `320 n` each
    LevelIdeals,
}

/// Budget summary emitted with pipeline certificates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BudgetReport {
    pub q: usize,
    pub k: usize,
    pub n: usize,
    pub route: Route,
    pub short_root_budget: usize,
    pub bound: usize,
    pub actual_length: usize,
}

/// `576 (3n - 2) min{q, 5nk}`.
pub fn pipeline_bound(n: usize, q: usize, k: usize) -> usize {
    576 * (3 * n - 2) * q.min(5 * n * k)
}

/// Precomputed short-root certificates over a normally generating set.
#[derive(Debug, Clone)]
pub struct PipelineContext {
    set: Vec<SpMatrix>,
    parts: Vec<(usize, CertifiedIdeal)>,
    route: Route,
    q: usize,
    short_budget: usize,
    transports: HashMap<RootIndex, (SpMatrix, i64)>,
    long_coeffs: (i64, i64),
}

impl PipelineContext {
    /// Picks the route by `min{q, 5nk}`, preferring the per-prime route on ties.
    pub fn new(set: &[SpMatrix]) -> Result<Self, DecompositionError> {
        Self::with_route(set, None)
    }

    pub fn with_route(set: &[SpMatrix], forced: Option<Route>) -> Result<Self, DecompositionError> {
        let first = set.first().ok_or(DecompositionError::EmptySet)?;
        let n = first.n();
        let ring = first.ring().clone();
        let m = finite_modulus(&ring)?;
        if n < 3 {
            return Err(DecompositionError::RankTooSmall(3, n));
        }
        let primes = prime_factors(&m)?;
        let q = primes.len();
        let k = set.len();
        let route = forced.unwrap_or(if q <= 5 * n * k { Route::PerPrime } else { Route::LevelIdeals });
        let splits: Vec<Vec<CertifiedIdeal>> = set.iter().map(level_ideal_7n_split).collect::<Result<_, _>>()?;
        let parts: Vec<(usize, CertifiedIdeal)> = match route {
            Route::LevelIdeals => splits.iter().enumerate().map(|(i, s)| (i, CertifiedIdeal::merge(s))).collect(),
            Route::PerPrime => {
                let mut chosen = Vec::new();
                let mut missing = Vec::new();
                for &p in &primes {
                    let pick = splits.iter().enumerate().find_map(|(i, s)| {
                        s.iter()
                            .find(|c| !(&c.ideal.canonical % BigInt::from(p)).is_zero())
                            .map(|c| (i, c.clone()))
                    });
                    match pick {
                        Some(c) => chosen.push(c),
                        None => missing.push(p),
                    }
                }
                if !missing.is_empty() {
                    return Err(DecompositionError::NotNormallyGenerating(missing));
                }
                chosen
            }
        };
        let sum = IdealRep::new(ring.clone(), parts.iter().map(|(_, c)| c.ideal.canonical.clone()).collect());
        if !sum.is_unit_ideal() {
            let bad = primes.into_iter().filter(|p| (&sum.canonical % BigInt::from(*p)).is_zero()).collect();
            return Err(DecompositionError::NotNormallyGenerating(bad));
        }
        let short_budget = parts.iter().map(|(_, c)| c.budget()).sum();
        let alpha = RootIndex::short_diff(n - 1, n, true);
        let beta = RootIndex::long(n, true);
        let entry = derive_entry(n, &alpha, &beta).expect("alpha + beta is a root");
        let coeff = |i: u32| entry.terms.iter().find(|t| t.i == i && t.j == 1).map(|t| t.coeff).expect("both terms present");
        Ok(PipelineContext {
            set: set.to_vec(),
            parts,
            route,
            q,
            short_budget,
            transports: HashMap::new(),
            long_coeffs: (coeff(1), coeff(2)),
        })
    }

    pub fn n(&self) -> usize {
        self.set[0].n()
    }

    pub fn ring(&self) -> &RingDesc {
        self.set[0].ring()
    }

    pub fn set(&self) -> &[SpMatrix] {
        &self.set
    }

    pub fn route(&self) -> Route {
        self.route
    }

    /// Length bound for any short-root certificate.
    pub fn short_root_budget(&self) -> usize {
        self.short_budget
    }

    pub fn bound(&self) -> usize {
        pipeline_bound(self.n(), self.q, self.set.len())
    }

    /// A word over `S` for `eps_ref(x)`.
    pub fn certify_reference(&self, x: &BigInt) -> Result<ConjWord, DecompositionError> {
        let ring = self.ring().clone();
        let ideals: Vec<IdealRep> = self.parts.iter().map(|(_, c)| c.ideal.clone()).collect();
        let mut w = ConjWord::empty(self.n(), &ring);
        for (idx, part) in decompose_over_ideals(&ring.elem(ring.reduce(x)), &ideals)? {
            let (set_idx, ideal) = &self.parts[idx];
            let piece = ideal.certify(part.value())?;
            w.append(piece.reindex(|_| *set_idx));
        }
        Ok(w)
    }

    fn transport_from_reference(&mut self, to: RootIndex) -> (SpMatrix, i64) {
        let (n, ring) = (self.n(), self.ring().clone());
        self.transports
            .entry(to)
            .or_insert_with(|| weyl_transport(n, &ring, &reference_root(), &to).expect("short roots are conjugate"))
            .clone()
    }

    /// A word over `S` for `eps_r(t)`, `r` short.
    pub fn certify_short(&mut self, r: &RootIndex, t: &BigInt) -> Result<ConjWord, DecompositionError> {
        let (w, s) = self.transport_from_reference(*r);
        let x = BigInt::from(s) * t;
        Ok(conjugate_word(&self.certify_reference(&x)?, &w))
    }

    /// A word over `S` for `eps_r(t)`, `r` long, at three times the short cost.
    pub fn certify_long(&mut self, r: &RootIndex, t: &BigInt) -> Result<ConjWord, DecompositionError> {
        let n = self.n();
        let ring = self.ring().clone();
        let anchor = RootIndex::long(n - 1, true);
        let (w, s) = weyl_transport(n, &ring, &anchor, r).expect("long roots are conjugate");
        // eps_{2a+b}(d x) = eps_{a+b}(-c x) (eps_a(1), eps_b(x))
        let (c, d) = self.long_coeffs;
        let x = ring.reduce(&(BigInt::from(d * s) * t));
        let alpha = RootIndex::short_diff(n - 1, n, true);
        let beta = RootIndex::long(n, true);
        let sum = RootIndex::short_sum(n - 1, n, true);
        let one = BigInt::one();
        let mut word = self.certify_short(&sum, &(-BigInt::from(c) * &x))?;
        word.append(self.certify_short(&alpha, &one)?);
        let inner = self.certify_short(&alpha, &-one)?;
        word.append(conjugate_word(&inner, &root_element(n, &ring, &beta, &x)));
        Ok(conjugate_word(&word, &w))
    }

    pub fn certify_root(&mut self, r: &RootIndex, t: &BigInt) -> Result<ConjWord, DecompositionError> {
        if r.is_long() {
            self.certify_long(r, t)
        } else {
            self.certify_short(r, t)
        }
    }

    /// A word over conjugates of `S^{+-1}` evaluating to `a`, with its budget report.
    pub fn run(&mut self, a: &SpMatrix) -> Result<(ConjWord, BudgetReport), DecompositionError> {
        let elq = factor_elq(a)?;
        let mut out = ConjWord::empty(self.n(), self.ring());
        for l in &elq.word.letters {
            let GenRef::RootElem(r, t) = &l.base else {
                unreachable!("root-element words only")
            };
            let t = if l.exp < 0 { -t.clone() } else { t.clone() };
            out.append(conjugate_word(&self.certify_root(r, &t)?, &l.conj));
        }
        let report = BudgetReport {
            q: self.q,
            k: self.set.len(),
            n: self.n(),
            route: self.route,
            short_root_budget: self.short_budget,
            bound: self.bound(),
            actual_length: out.len(),
        };
        Ok((out, report))
    }
}

/// One-shot form of [`PipelineContext::run`].
pub fn theorem_b1_pipeline(a: &SpMatrix, set: &[SpMatrix]) -> Result<(ConjWord, BudgetReport), DecompositionError> {
    PipelineContext::new(set)?.run(a)
}
