//! Hessenberg reductions, short commutator certificates, and the certified level ideal.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rings::{IdealRep, JsonInt, RingDesc, RingError};
use crate::symplectic::{embed_2x2, inverse_2x2, root_element, rotation, weyl_k, weyl_transport, Mat, RootIndex, SpMatrix};
use crate::words::{commutator_with_constant, conjugate_word, pull_back_word, ConjWord, GenRef, Letter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("this construction needs rank n >= 3, got {0}")]
    RankTooSmall(usize),
    #[error("matrix is not in {0} Hessenberg form")]
    NotHessenberg(HessenbergVariant),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HessenbergVariant {
    First,
    Second,
}

impl fmt::Display for HessenbergVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HessenbergVariant::First => "first",
            HessenbergVariant::Second => "second",
        })
    }
}

/// `form = conjugator * input * conjugator^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HessenbergResult {
    pub conjugator: SpMatrix,
    pub form: SpMatrix,
    pub variant: HessenbergVariant,
}

fn require_rank(a: &SpMatrix) -> Result<(), ReductionError> {
    if a.n() < 3 {
        Err(ReductionError::RankTooSmall(a.n()))
    } else {
        Ok(())
    }
}

/// `block-diag(G, G^{-T})` with `G` a determinant-one rotation on coordinates `(i, j)`.
fn rotation_block(n: usize, ring: &RingDesc, i: usize, j: usize, rot: &[BigInt; 4], swap: bool) -> SpMatrix {
    let g = embed_2x2(n, ring, i, j, rot);
    let git = embed_2x2(n, ring, i, j, &inverse_2x2(rot)).transpose();
    let (top, bottom) = if swap { (git, g) } else { (g, git) };
    let mut m = Mat::zero(2 * n, ring);
    m.set_block(0, 0, &top);
    m.set_block(n, n, &bottom);
    SpMatrix::from_mat(n, m).expect("rotation blocks are symplectic")
}

fn hessenberg(a: &SpMatrix, variant: HessenbergVariant) -> Result<HessenbergResult, ReductionError> {
    require_rank(a)?;
    let n = a.n();
    let ring = a.ring().clone();
    let row0 = match variant {
        HessenbergVariant::First => 0,
        HessenbergVariant::Second => n,
    };
    let mut form = a.clone();
    let mut conj = SpMatrix::identity(n, &ring);
    for j in 0..n.saturating_sub(2) {
        for k in j + 2..n {
            let y = form.get(row0 + k, j).clone();
            if y.is_zero() {
                continue;
            }
            let x = form.get(row0 + j + 1, j).clone();
            let (rot, _) = rotation(&x, &y);
            let t = rotation_block(n, &ring, j + 1, k, &rot, variant == HessenbergVariant::Second);
            form = t.mul(&form).mul(&t.inverse());
            conj = t.mul(&conj);
        }
    }
    Ok(HessenbergResult {
        conjugator: conj,
        form,
        variant,
    })
}

/// Conjugates `a` so the upper-left block is upper Hessenberg, with `form(2,1)` a gcd of `a_21..a_n1`.
pub fn first_hessenberg(a: &SpMatrix) -> Result<HessenbergResult, ReductionError> {
    hessenberg(a, HessenbergVariant::First)
}

/// Conjugates `a` so the lower-left block is upper Hessenberg, with `form(n+2,1)` a gcd of `a_{n+2,1}..a_{2n,1}`.
pub fn second_hessenberg(a: &SpMatrix) -> Result<HessenbergResult, ReductionError> {
    hessenberg(a, HessenbergVariant::Second)
}

/// Whether the relevant block vanishes strictly below its first subdiagonal.
pub fn is_hessenberg(a: &SpMatrix, variant: HessenbergVariant) -> bool {
    let n = a.n();
    let row0 = match variant {
        HessenbergVariant::First => 0,
        HessenbergVariant::Second => n,
    };
    (0..n).all(|j| (j + 2..n).all(|i| a.get(row0 + i, j).is_zero()))
}

/// Whether the first column of the relevant block vanishes below row 2.
pub fn has_first_column_pattern(a: &SpMatrix, variant: HessenbergVariant) -> bool {
    let n = a.n();
    let row0 = match variant {
        HessenbergVariant::First => 0,
        HessenbergVariant::Second => n,
    };
    (2..n).all(|i| a.get(row0 + i, 0).is_zero())
}

fn one(ring: &RingDesc) -> BigInt {
    ring.reduce(&BigInt::one())
}

/// `X = (A, I + e_{1,n+1})`.
pub fn hessenberg_commutator_x(a: &SpMatrix) -> Result<SpMatrix, ReductionError> {
    require_rank(a)?;
    if !has_first_column_pattern(a, HessenbergVariant::First) {
        return Err(ReductionError::NotHessenberg(HessenbergVariant::First));
    }
    let e = root_element(a.n(), a.ring(), &RootIndex::long(1, true), &one(a.ring()));
    Ok(a.commutator(&e))
}

/// `b_{n+1,n+1} - b_{n+1,1}` for `B = A^{-1}`.
fn inverse_row_difference(a: &SpMatrix) -> BigInt {
    let n = a.n();
    let b = a.inverse();
    a.ring().reduce(&(b.at(n + 1, n + 1) - b.at(n + 1, 1)))
}

/// Which of the four commutator identities a certificate uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaVariant {
    /// first form, generator `a_11 (b_{n+1,n+1} - b_{n+1,1}) - 1`
    FirstUnit,
    /// first form, generator `a_21 (b_{n+1,n+1} - b_{n+1,1})`
    FirstSub,
    /// second form, generator `a_11 (b_{n+1,n+1} - b_{n+1,1}) - 1`
    SecondUnit,
    /// second form, generator `a_{n+2,1} (b_{n+1,n+1} - b_{n+1,1})`
    SecondSub,
}

impl LemmaVariant {
    pub fn form(&self) -> HessenbergVariant {
        match self {
            LemmaVariant::FirstUnit | LemmaVariant::FirstSub => HessenbergVariant::First,
            LemmaVariant::SecondUnit | LemmaVariant::SecondSub => HessenbergVariant::Second,
        }
    }

    /// Root of the element produced: the certificate evaluates to `eps_root(-g y)`.
    pub fn target_root(&self, n: usize) -> RootIndex {
        match self {
            LemmaVariant::FirstUnit => RootIndex::short_sum(2, n, false),
            LemmaVariant::FirstSub => RootIndex::short_sum(1, n, false),
            LemmaVariant::SecondUnit => RootIndex::short_diff(2, n, false),
            LemmaVariant::SecondSub => RootIndex::short_sum(1, n, true),
        }
    }

    pub fn generator(&self, a: &SpMatrix) -> BigInt {
        let n = a.n();
        let d = inverse_row_difference(a);
        let ring = a.ring();
        match self {
            LemmaVariant::FirstUnit | LemmaVariant::SecondUnit => ring.reduce(&(a.at(1, 1) * &d - 1)),
            LemmaVariant::FirstSub => ring.reduce(&(a.at(2, 1) * &d)),
            LemmaVariant::SecondSub => ring.reduce(&(a.at(n + 2, 1) * &d)),
        }
    }

    /// The nested commutator over `{a}` of length 16.
    pub fn word(&self, a: &SpMatrix, y: &BigInt) -> Result<ConjWord, ReductionError> {
        require_rank(a)?;
        if !has_first_column_pattern(a, self.form()) {
            return Err(ReductionError::NotHessenberg(self.form()));
        }
        let n = a.n();
        let ring = a.ring();
        let u = one(ring);
        let eps = |r: RootIndex, t: &BigInt| root_element(n, ring, &r, t);
        let x = commutator_with_constant(&ConjWord::single(n, ring, GenRef::SetElem(0), 1), &eps(RootIndex::long(1, true), &u));
        let steps: [SpMatrix; 3] = match self {
            LemmaVariant::FirstUnit => [
                eps(RootIndex::short_sum(1, n, false), &u),
                eps(RootIndex::long(1, false), &u),
                eps(RootIndex::short_diff(1, 2, true), y),
            ],
            LemmaVariant::FirstSub => [
                eps(RootIndex::short_sum(1, n, false), &u),
                eps(RootIndex::long(2, false), &u),
                eps(RootIndex::short_diff(1, 2, false), y),
            ],
            LemmaVariant::SecondUnit => [
                eps(RootIndex::short_diff(1, n, false), &u),
                eps(RootIndex::long(1, false), &u),
                eps(RootIndex::short_diff(1, 2, true), y),
            ],
            LemmaVariant::SecondSub => [
                eps(RootIndex::short_diff(1, n, false), &u),
                eps(RootIndex::long(2, true), &u),
                eps(RootIndex::short_diff(1, 2, true), y),
            ],
        };
        Ok(steps.iter().fold(x, |w, m| commutator_with_constant(&w, m)))
    }

    /// Closed-form value of [`LemmaVariant::word`].
    pub fn target(&self, a: &SpMatrix, y: &BigInt) -> SpMatrix {
        let g = self.generator(a);
        root_element(a.n(), a.ring(), &self.target_root(a.n()), &-(g * y))
    }
}

pub const LEMMA_WORD_LENGTH: usize = 16;

/// The two first-form certificates for parameter `x`, evaluating to
/// `I - g_1 x (e_{2n,2} + e_{n+2,n})` and `I - g_2 x (e_{2n,1} + e_{n+1,n})`.
pub fn lemma16_certificates(a: &SpMatrix, x: &BigInt) -> Result<(ConjWord, ConjWord), ReductionError> {
    Ok((LemmaVariant::FirstUnit.word(a, x)?, LemmaVariant::FirstSub.word(a, x)?))
}

/// The two second-form certificates; together they place
/// `(a_{n+2,1} d, a_11 d - 1)` with `d = b_{n+1,n+1} - b_{n+1,1}` inside a ball of radius 32.
pub fn lemma32_second_form(a: &SpMatrix, x: &BigInt) -> Result<(ConjWord, ConjWord), ReductionError> {
    Ok((LemmaVariant::SecondUnit.word(a, x)?, LemmaVariant::SecondSub.word(a, x)?))
}

/// How a word over a derived matrix `F` is read as a word over the base matrix `A`.
///
/// `F = H Q core Q^{-1} H^{-1}` where `core` is `X` or `(X, M)` and `X = P A P^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lift {
    pre: SpMatrix,
    comm: Option<SpMatrix>,
    post: SpMatrix,
}

impl Lift {
    pub fn identity(n: usize, ring: &RingDesc) -> Self {
        Lift {
            pre: SpMatrix::identity(n, ring),
            comm: None,
            post: SpMatrix::identity(n, ring),
        }
    }

    /// Rewrites letters over `{F}` into letters over `{A}`; doubles the length when a commutator is involved.
    pub fn apply(&self, w: &ConjWord) -> ConjWord {
        let w = pull_back_word(w, &self.pre);
        let Some(m) = &self.comm else {
            return pull_back_word(&w, &self.post);
        };
        let mut out = ConjWord::empty(w.n(), w.ring());
        for l in &w.letters {
            let dm = l.conj.mul(m);
            let pairs = if l.exp > 0 {
                [(l.conj.clone(), 1), (dm, -1)]
            } else {
                [(dm, 1), (l.conj.clone(), -1)]
            };
            for (c, e) in pairs {
                out.push(Letter {
                    conj: c.mul(&self.post),
                    base: l.base.clone(),
                    exp: e,
                });
            }
        }
        out
    }

    pub fn factor(&self) -> usize {
        if self.comm.is_some() {
            2
        } else {
            1
        }
    }
}

/// One generator of a certified ideal with the recipe that certifies its multiples.
#[derive(Debug, Clone)]
pub struct GeneratorSource {
    pub generator: BigInt,
    pub form: SpMatrix,
    pub variant: LemmaVariant,
    pub lift: Lift,
    pub budget: usize,
    transport: (SpMatrix, i64),
}

impl GeneratorSource {
    /// A word over `{A}` for `eps_ref(c * generator)`.
    fn certify_multiple(&self, c: &BigInt) -> ConjWord {
        let (w, s) = &self.transport;
        // eps_ref(s t) = W eps_target(t) W^{-1} and the lemma gives eps_target(-g y), so y = -s c
        let y = self.form.ring().reduce(&-(BigInt::from(*s) * c));
        let word = self.variant.word(&self.form, &y).expect("sources hold Hessenberg forms");
        conjugate_word(&self.lift.apply(&word), w)
    }
}

/// One line of the additive budget accounting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub label: String,
    pub canonical: JsonInt,
    pub budget: usize,
}

/// An ideal `I` with a provider of words for `eps_ref(x)`, `x` in `I`, over `{A}`.
#[derive(Debug, Clone)]
pub struct CertifiedIdeal {
    pub base: SpMatrix,
    pub ideal: IdealRep,
    pub reference: RootIndex,
    pub per_generator_budget: usize,
    pub sources: Vec<GeneratorSource>,
    pub ledger: Vec<LedgerEntry>,
}

/// The fixed short root all certificates target.
pub fn reference_root() -> RootIndex {
    RootIndex::short_diff(1, 2, true)
}

impl CertifiedIdeal {
    fn from_sources(base: &SpMatrix, sources: Vec<GeneratorSource>, ledger: Vec<LedgerEntry>) -> Self {
        let ideal = IdealRep::new(base.ring().clone(), sources.iter().map(|s| s.generator.clone()).collect());
        let per_generator_budget = sources.iter().map(|s| s.budget).max().unwrap_or(0);
        CertifiedIdeal {
            base: base.clone(),
            ideal,
            reference: reference_root(),
            per_generator_budget,
            sources,
            ledger,
        }
    }

    /// Budget for an arbitrary element: the sum over generators.
    pub fn budget(&self) -> usize {
        self.sources.iter().map(|s| s.budget).sum()
    }

    pub fn ledger_total(&self) -> usize {
        self.ledger.iter().map(|e| e.budget).sum()
    }

    pub fn target(&self, x: &BigInt) -> SpMatrix {
        root_element(self.base.n(), self.base.ring(), &self.reference, x)
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        self.ideal.contains(x)
    }

    /// A word over `{A}` for `eps_ref(generator_i)`.
    pub fn certify_generator(&self, i: usize) -> ConjWord {
        self.sources[i].certify_multiple(&BigInt::one())
    }

    /// A word over `{A}` of length at most [`CertifiedIdeal::budget`] evaluating to `eps_ref(x)`.
    pub fn certify(&self, x: &BigInt) -> Result<ConjWord, ReductionError> {
        let coeffs = self.ideal.express(x)?;
        let mut w = ConjWord::empty(self.base.n(), self.base.ring());
        for (src, c) in self.sources.iter().zip(&coeffs) {
            if c.is_zero() || src.generator.is_zero() {
                continue;
            }
            w.append(src.certify_multiple(c));
        }
        Ok(w)
    }

    /// Sum of certified ideals over the same base matrix.
    pub fn merge(parts: &[CertifiedIdeal]) -> CertifiedIdeal {
        let base = &parts[0].base;
        let sources = parts.iter().flat_map(|p| p.sources.iter().cloned()).collect();
        let ledger = parts.iter().flat_map(|p| p.ledger.iter().cloned()).collect();
        CertifiedIdeal::from_sources(base, sources, ledger)
    }
}

/// Caches Weyl transports from each lemma target root to the reference root.
struct Transports {
    n: usize,
    ring: RingDesc,
    cache: HashMap<RootIndex, (SpMatrix, i64)>,
}

impl Transports {
    fn new(n: usize, ring: &RingDesc) -> Self {
        Transports {
            n,
            ring: ring.clone(),
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, from: RootIndex) -> (SpMatrix, i64) {
        let (n, ring) = (self.n, self.ring.clone());
        self.cache
            .entry(from)
            .or_insert_with(|| weyl_transport(n, &ring, &from, &reference_root()).expect("short roots are conjugate"))
            .clone()
    }
}

/// The two-generator ideal from one Hessenberg form of the derived matrix `y`.
fn lemma_ideal(
    a: &SpMatrix,
    y: &SpMatrix,
    variant: HessenbergVariant,
    lift: &Lift,
    label: &str,
    transports: &mut Transports,
) -> Result<CertifiedIdeal, ReductionError> {
    let h = hessenberg(y, variant)?;
    let lift = Lift {
        pre: h.conjugator.mul(&lift.pre),
        comm: lift.comm.clone(),
        post: lift.post.clone(),
    };
    let per = LEMMA_WORD_LENGTH * lift.factor();
    let variants = match variant {
        HessenbergVariant::First => [LemmaVariant::FirstUnit, LemmaVariant::FirstSub],
        HessenbergVariant::Second => [LemmaVariant::SecondUnit, LemmaVariant::SecondSub],
    };
    let sources: Vec<GeneratorSource> = variants
        .iter()
        .map(|v| GeneratorSource {
            generator: v.generator(&h.form),
            form: h.form.clone(),
            variant: *v,
            lift: lift.clone(),
            budget: per,
            transport: transports.get(v.target_root(a.n())),
        })
        .collect();
    let mut ideal = CertifiedIdeal::from_sources(a, sources, Vec::new());
    ideal.ledger.push(LedgerEntry {
        label: label.to_string(),
        canonical: JsonInt::from(&ideal.ideal.canonical),
        budget: 2 * per,
    });
    Ok(ideal)
}

/// `I_1(A)`: contains `a_21..a_n1` and `a_{n+2,1}..a_{2n,1}`, certified within 64.
pub fn first_column_ideal(a: &SpMatrix) -> Result<CertifiedIdeal, ReductionError> {
    require_rank(a)?;
    let mut tr = Transports::new(a.n(), a.ring());
    let lift = Lift::identity(a.n(), a.ring());
    let p1 = lemma_ideal(a, a, HessenbergVariant::First, &lift, "I1(1)(A)", &mut tr)?;
    let p2 = lemma_ideal(a, a, HessenbergVariant::Second, &lift, "I1(2)(A)", &mut tr)?;
    Ok(CertifiedIdeal::merge(&[p1, p2]))
}

/// The `7n` ideals whose sum is the level ideal, each certified within 64.
pub fn level_ideal_7n_split(a: &SpMatrix) -> Result<Vec<CertifiedIdeal>, ReductionError> {
    require_rank(a)?;
    let n = a.n();
    let ring = a.ring().clone();
    let id = SpMatrix::identity(n, &ring);
    let jinv = SpMatrix::j(n, &ring).inverse();
    let w2 = weyl_k(n, &ring, 2).expect("n >= 2");
    let shift = root_element(n, &ring, &RootIndex::short_diff(1, 2, true), &one(&ring));
    let mut tr = Transports::new(n, &ring);

    // X_k = P_k A P_k^{-1}: A_1 = A, A_k = w_k A w_k^{-1}, and the same after A -> J^{-1} A J
    let conj_k = |k: usize| if k == 1 { id.clone() } else { weyl_k(n, &ring, k).expect("2 <= k <= n") };
    let plain: Vec<(String, SpMatrix)> = (1..=n).map(|k| (format!("A_{k}"), conj_k(k))).collect();
    let primed: Vec<(String, SpMatrix)> = (1..=n).map(|k| (format!("A'_{k}"), conj_k(k).mul(&jinv))).collect();

    let mut out = Vec::with_capacity(7 * n);
    for (name, p) in plain.iter().chain(&primed) {
        let x = a.conjugate_by(p);
        let lift = Lift {
            pre: id.clone(),
            comm: None,
            post: p.clone(),
        };
        out.push(lemma_ideal(a, &x, HessenbergVariant::First, &lift, &format!("I1(1)({name})"), &mut tr)?);
        out.push(lemma_ideal(a, &x, HessenbergVariant::Second, &lift, &format!("I1(2)({name})"), &mut tr)?);
    }
    let fourth = |name: &str, p: &SpMatrix, both: bool, tr: &mut Transports| -> Result<Vec<CertifiedIdeal>, ReductionError> {
        let x = a.conjugate_by(p);
        let xx = x.commutator(&shift);
        let lift = Lift {
            pre: id.clone(),
            comm: Some(shift.clone()),
            post: p.clone(),
        };
        let mut v = vec![lemma_ideal(a, &xx, HessenbergVariant::Second, &lift, &format!("I4(1)({name})"), tr)?];
        if both {
            let lift2 = Lift {
                pre: w2.clone(),
                comm: Some(shift.clone()),
                post: p.clone(),
            };
            v.push(lemma_ideal(a, &xx.conjugate_by(&w2), HessenbergVariant::First, &lift2, &format!("I4(2)({name})"), tr)?);
        }
        Ok(v)
    };
    for (name, p) in &plain {
        out.extend(fourth(name, p, true, &mut tr)?);
    }
    for (name, p) in &primed {
        out.extend(fourth(name, p, false, &mut tr)?);
    }
    Ok(out)
}

/// The level ideal `I(A)`: every maximal ideal containing it makes `A` central, and
/// `eps_ref(x)` for `x` in `I(A)` is certified over `{A}` within `320 n`.
pub fn level_ideal(a: &SpMatrix) -> Result<CertifiedIdeal, ReductionError> {
    Ok(CertifiedIdeal::merge(&level_ideal_7n_split(a)?))
}

/// `A` is congruent to `c I_n (+) c^{-1} I_n` modulo `ideal`, and `a_11^2 - 1` lies in it.
pub fn scalar_congruence_holds(a: &SpMatrix, ideal: &IdealRep) -> bool {
    let n = a.n();
    let ring = a.ring();
    let inside = |x: BigInt| ideal.contains(&ring.reduce(&x));
    let off_diag = (0..2 * n).all(|i| (0..2 * n).all(|j| i == j || inside(a.get(i, j).clone())));
    let top = a.get(0, 0);
    let bottom = a.get(n, n);
    let diag = (0..n).all(|i| inside(a.get(i, i) - top) && inside(a.get(n + i, n + i) - bottom));
    off_diag && diag && inside(top * bottom - 1) && inside(top * top - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{v_of_ideal, MaxIdealSet};
    use crate::symplectic::random_sp;
    use crate::words::{eval_word, verify_certificate};

    fn zm(m: i64) -> RingDesc {
        RingDesc::modulo(m).unwrap()
    }

    #[test]
    fn identity_is_fixed() {
        let r = zm(210);
        let id = SpMatrix::identity(3, &r);
        for h in [first_hessenberg(&id).unwrap(), second_hessenberg(&id).unwrap()] {
            assert!(h.form.is_identity());
            assert!(h.conjugator.is_identity());
        }
        let x = hessenberg_commutator_x(&id).unwrap();
        assert!(x.is_identity());
        assert_eq!(LemmaVariant::FirstUnit.generator(&id), BigInt::zero());
    }

    #[test]
    fn rank_two_rejected() {
        let r = zm(7);
        let a = SpMatrix::identity(2, &r);
        assert_eq!(first_hessenberg(&a).unwrap_err(), ReductionError::RankTooSmall(2));
        assert!(level_ideal(&a).is_err());
    }

    #[test]
    fn commutator_x_entries() {
        let r = zm(105);
        for seed in 0..40 {
            let a = first_hessenberg(&random_sp(3, &r, 30, seed)).unwrap().form;
            let x = hessenberg_commutator_x(&a).unwrap();
            let n = 3;
            let b = a.inverse();
            let d = b.at(n + 1, n + 1) - b.at(n + 1, 1);
            assert_eq!(*x.at(1, n + 1), r.reduce(&(a.at(1, 1) * &d - 1)));
            assert_eq!(*x.at(2, n + 1), r.reduce(&(a.at(2, 1) * &d)));
            for i in 3..=n {
                for j in 1..=2 * n {
                    let delta = |a: usize, b: usize| BigInt::from((a == b) as u8);
                    assert_eq!(*x.at(i, j), delta(i, j));
                    assert_eq!(*x.at(j, n + i), delta(j, n + i), "column {}", n + i);
                }
            }
        }
    }

    #[test]
    fn lemma_words_match_closed_forms() {
        let r = zm(210);
        for seed in 0..30 {
            let a = random_sp(3, &r, 30, seed);
            let f = first_hessenberg(&a).unwrap().form;
            let s = second_hessenberg(&a).unwrap().form;
            let y = BigInt::from(seed * 7 + 3);
            for v in [LemmaVariant::FirstUnit, LemmaVariant::FirstSub] {
                let w = v.word(&f, &y).unwrap();
                assert!(verify_certificate(&w, &[f.clone()], &v.target(&f, &y), 16), "{v:?}");
            }
            for v in [LemmaVariant::SecondUnit, LemmaVariant::SecondSub] {
                let w = v.word(&s, &y).unwrap();
                assert!(verify_certificate(&w, &[s.clone()], &v.target(&s, &y), 16), "{v:?}");
            }
        }
    }

    #[test]
    fn lemma_targets_match_displayed_matrices() {
        let r = zm(210);
        let n = 3;
        let a = first_hessenberg(&random_sp(n, &r, 30, 77)).unwrap().form;
        let x = BigInt::from(11);
        let (w1, w2) = lemma16_certificates(&a, &x).unwrap();
        let g1 = LemmaVariant::FirstUnit.generator(&a);
        let g2 = LemmaVariant::FirstSub.generator(&a);
        let mut t1 = Mat::identity(2 * n, &r);
        t1.set(2 * n - 1, 1, -(&g1 * &x));
        t1.set(n + 1, n - 1, -(&g1 * &x));
        let mut t2 = Mat::identity(2 * n, &r);
        t2.set(2 * n - 1, 0, -(&g2 * &x));
        t2.set(n, n - 1, -(&g2 * &x));
        assert_eq!(eval_word(&w1, &[a.clone()]).unwrap().mat(), &t1);
        assert_eq!(eval_word(&w2, &[a.clone()]).unwrap().mat(), &t2);
    }

    #[test]
    fn first_column_entries_are_members() {
        let r = zm(210);
        for seed in 0..10 {
            let a = random_sp(3, &r, 30, seed);
            let i1 = first_column_ideal(&a).unwrap();
            for i in [2, 3, 5, 6] {
                assert!(i1.contains(a.at(i, 1)), "a_{i}1");
            }
            assert_eq!(i1.budget(), 64);
            let x = i1.ideal.canonical.clone() * BigInt::from(seed + 1);
            let w = i1.certify(&x).unwrap();
            assert!(verify_certificate(&w, &[a.clone()], &i1.target(&x), 64));
        }
    }

    #[test]
    fn level_ideal_over_z210() {
        let r = zm(210);
        for seed in 0..6 {
            let a = random_sp(3, &r, 30, 1000 + seed);
            let li = level_ideal(&a).unwrap();
            assert_eq!(li.budget(), 960);
            assert_eq!(li.ledger_total(), 960);
            assert!(scalar_congruence_holds(&a, &li.ideal));
            for (i, src) in li.sources.iter().enumerate() {
                let w = li.certify_generator(i);
                assert!(verify_certificate(&w, &[a.clone()], &li.target(&src.generator), src.budget));
            }
            let x = li.ideal.canonical.clone() * BigInt::from(13);
            let w = li.certify(&x).unwrap();
            assert!(verify_certificate(&w, &[a.clone()], &li.target(&x), 960));
        }
    }

    #[test]
    fn level_ideal_of_identity_and_long_root() {
        let r = zm(30);
        let id = SpMatrix::identity(3, &r);
        let li = level_ideal(&id).unwrap();
        assert!(li.ideal.is_zero_ideal());
        assert_eq!(v_of_ideal(&li.ideal).unwrap(), MaxIdealSet::from_primes([2, 3, 5]));
        let e = root_element(3, &r, &RootIndex::long(1, true), &BigInt::from(6));
        let li = level_ideal(&e).unwrap();
        // eps(6) is central exactly modulo 2 and 3
        let v = v_of_ideal(&li.ideal).unwrap();
        assert!(v.is_subset_of(&MaxIdealSet::from_primes([2, 3])));
    }

    #[test]
    fn level_ideal_over_integers_and_rank_four() {
        let z = RingDesc::Integers;
        for seed in 0..3 {
            let a = random_sp(3, &z, 12, 50 + seed);
            let li = level_ideal(&a).unwrap();
            assert!(scalar_congruence_holds(&a, &li.ideal));
            let x = li.ideal.canonical.clone() * BigInt::from(-3);
            let w = li.certify(&x).unwrap();
            assert!(verify_certificate(&w, &[a.clone()], &li.target(&x), 960));
        }
        let r = zm(30);
        let a = random_sp(4, &r, 30, 9);
        let split = level_ideal_7n_split(&a).unwrap();
        assert_eq!(split.len(), 28);
        assert!(split.iter().all(|s| s.budget() <= 64));
        let li = CertifiedIdeal::merge(&split);
        assert_eq!(li.budget(), 320 * 4);
        assert!(scalar_congruence_holds(&a, &li.ideal));
        let x = li.ideal.canonical.clone();
        assert!(verify_certificate(&li.certify(&x).unwrap(), &[a.clone()], &li.target(&x), 1280));
    }

    #[test]
    fn vanishing_locus_makes_matrix_central() {
        use crate::rings::MaxIdeal;
        let r = zm(2 * 3 * 5 * 7 * 11);
        for seed in 0..8 {
            let a = random_sp(3, &r, 4, 300 + seed);
            let li = level_ideal(&a).unwrap();
            for p in v_of_ideal(&li.ideal).unwrap().primes().unwrap() {
                assert!(a.is_central_mod(&MaxIdeal { prime: p }).unwrap(), "p = {p}");
            }
        }
    }
}
