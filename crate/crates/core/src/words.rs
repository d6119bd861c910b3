//! Words in conjugates of generators, and their certificates.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rings::{JsonInt, RingDesc};
use crate::symplectic::{root_element, Mat, RootIndex, SpMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("letter {letter} refers to generator {index}, but the set has {len}")]
    Unresolved { letter: usize, index: usize, len: usize },
    #[error("letter {0} does not match the word's rank or ring")]
    Mismatch(usize),
    #[error("exponent must be 1 or -1, got {0}")]
    Exponent(i8),
}

/// What a letter conjugates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenRef {
    /// Index into the bound generating set.
    SetElem(usize),
    /// A root element `eps_r(t)`.
    RootElem(RootIndex, BigInt),
}

/// One factor `conj * base^exp * conj^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Letter {
    pub conj: SpMatrix,
    pub base: GenRef,
    pub exp: i8,
}

/// A product of conjugated generators; its length is the number of letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjWord {
    n: usize,
    ring: RingDesc,
    pub letters: Vec<Letter>,
    pub bound_set: Option<String>,
}

impl ConjWord {
    pub fn empty(n: usize, ring: &RingDesc) -> Self {
        ConjWord {
            n,
            ring: ring.clone(),
            letters: Vec::new(),
            bound_set: None,
        }
    }

    /// A single unconjugated letter.
    pub fn single(n: usize, ring: &RingDesc, base: GenRef, exp: i8) -> Self {
        let mut w = ConjWord::empty(n, ring);
        w.letters.push(Letter {
            conj: SpMatrix::identity(n, ring),
            base,
            exp,
        });
        w
    }

    pub fn with_bound_set(mut self, name: impl Into<String>) -> Self {
        self.bound_set = Some(name.into());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &RingDesc {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn push(&mut self, letter: Letter) {
        self.letters.push(letter);
    }

    /// `self` followed by `o`.
    pub fn concat(&self, o: &ConjWord) -> ConjWord {
        let mut w = self.clone();
        w.letters.extend(o.letters.iter().cloned());
        w
    }

    pub fn append(&mut self, o: ConjWord) {
        self.letters.extend(o.letters);
    }

    /// Replaces each `SetElem(i)` with `SetElem(map(i))`.
    pub fn reindex(mut self, map: impl Fn(usize) -> usize) -> ConjWord {
        for l in &mut self.letters {
            if let GenRef::SetElem(i) = l.base {
                l.base = GenRef::SetElem(map(i));
            }
        }
        self
    }
}

fn base_matrix(n: usize, ring: &RingDesc, base: &GenRef, s: &[SpMatrix], letter: usize) -> Result<SpMatrix, WordError> {
    match base {
        GenRef::SetElem(i) => s.get(*i).cloned().ok_or(WordError::Unresolved {
            letter,
            index: *i,
            len: s.len(),
        }),
        GenRef::RootElem(r, t) => {
            r.validate(n).map_err(|_| WordError::Mismatch(letter))?;
            Ok(root_element(n, ring, r, t))
        }
    }
}

/// Evaluates one letter.
pub fn eval_letter(w: &ConjWord, idx: usize, s: &[SpMatrix]) -> Result<SpMatrix, WordError> {
    let l = &w.letters[idx];
    if l.exp != 1 && l.exp != -1 {
        return Err(WordError::Exponent(l.exp));
    }
    if l.conj.n() != w.n || l.conj.ring() != &w.ring {
        return Err(WordError::Mismatch(idx));
    }
    let mut b = base_matrix(w.n, &w.ring, &l.base, s, idx)?;
    if b.n() != w.n || b.ring() != &w.ring {
        return Err(WordError::Mismatch(idx));
    }
    if l.exp < 0 {
        b = b.inverse();
    }
    Ok(b.conjugate_by(&l.conj))
}

/// The ordered product of the letters.
pub fn eval_word(w: &ConjWord, s: &[SpMatrix]) -> Result<SpMatrix, WordError> {
    if let Some(fast) = FastEval::new(w) {
        return fast.eval(w, s);
    }
    let mut acc = SpMatrix::identity(w.n, &w.ring);
    for i in 0..w.letters.len() {
        acc = acc.mul(&eval_letter(w, i, s)?);
    }
    Ok(acc)
}

/// Machine-word evaluation for small moduli; same result as the generic path.
struct FastEval {
    d: usize,
    m: u64,
}

impl FastEval {
    fn new(w: &ConjWord) -> Option<Self> {
        let m = w.ring.modulus()?.to_u64()?;
        (m <= 1 << 31).then_some(FastEval { d: 2 * w.n, m })
    }

    fn load(&self, a: &Mat) -> Vec<u64> {
        a.entries().iter().map(|x| x.to_u64().unwrap_or(0)).collect()
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let d = self.d;
        let mut out = vec![0u64; d * d];
        for i in 0..d {
            for k in 0..d {
                let av = a[i * d + k];
                if av == 0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] = (out[i * d + j] + av * b[k * d + j]) % self.m;
                }
            }
        }
        out
    }

    fn eval(&self, w: &ConjWord, s: &[SpMatrix]) -> Result<SpMatrix, WordError> {
        let d = self.d;
        let mut acc: Vec<u64> = (0..d * d).map(|k| u64::from(k / d == k % d)).collect();
        let set: Vec<Vec<u64>> = s.iter().map(|x| self.load(x.mat())).collect();
        let set_inv: Vec<Vec<u64>> = s.iter().map(|x| self.load(x.inverse().mat())).collect();
        for (idx, l) in w.letters.iter().enumerate() {
            if l.exp != 1 && l.exp != -1 {
                return Err(WordError::Exponent(l.exp));
            }
            if l.conj.n() != w.n || l.conj.ring() != &w.ring {
                return Err(WordError::Mismatch(idx));
            }
            let base = match &l.base {
                GenRef::SetElem(i) => {
                    let src = if l.exp > 0 { &set } else { &set_inv };
                    let b = src.get(*i).ok_or(WordError::Unresolved {
                        letter: idx,
                        index: *i,
                        len: s.len(),
                    })?;
                    if s[*i].n() != w.n || s[*i].ring() != &w.ring {
                        return Err(WordError::Mismatch(idx));
                    }
                    b.clone()
                }
                GenRef::RootElem(..) => self.load(eval_base_root(w, l, s, idx)?.mat()),
            };
            let c = self.load(l.conj.mat());
            let ci = self.load(l.conj.inverse().mat());
            acc = self.mul(&self.mul(&self.mul(&acc, &c), &base), &ci);
        }
        let rows: Vec<Vec<BigInt>> = acc.chunks(d).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Ok(SpMatrix::from_rows(w.n, &w.ring, &rows).expect("products of symplectic matrices are symplectic"))
    }
}

fn eval_base_root(w: &ConjWord, l: &Letter, s: &[SpMatrix], idx: usize) -> Result<SpMatrix, WordError> {
    let b = base_matrix(w.n, &w.ring, &l.base, s, idx)?;
    Ok(if l.exp < 0 { b.inverse() } else { b })
}

/// Each conjugator left-multiplied by `m`: evaluates to `m * eval(w) * m^{-1}`.
pub fn conjugate_word(w: &ConjWord, m: &SpMatrix) -> ConjWord {
    let mut out = w.clone();
    for l in &mut out.letters {
        l.conj = m.mul(&l.conj);
    }
    out
}

/// Each conjugator right-multiplied by `p`: a word over `{p^{-1} s p}` read as a word over `{s}`.
pub fn pull_back_word(w: &ConjWord, p: &SpMatrix) -> ConjWord {
    let mut out = w.clone();
    for l in &mut out.letters {
        l.conj = l.conj.mul(p);
    }
    out
}

/// Letters reversed with exponents negated.
pub fn invert_word(w: &ConjWord) -> ConjWord {
    let mut out = w.clone();
    out.letters.reverse();
    for l in &mut out.letters {
        l.exp = -l.exp;
    }
    out
}

/// `(w, M) = w * (w^{-1})^M`, twice the length of `w`.
pub fn commutator_with_constant(w: &ConjWord, m: &SpMatrix) -> ConjWord {
    w.concat(&conjugate_word(&invert_word(w), m))
}

/// True iff `w` evaluates to `target` over `s` and has at most `budget` letters.
pub fn verify_certificate(w: &ConjWord, s: &[SpMatrix], target: &SpMatrix, budget: usize) -> bool {
    w.len() <= budget && eval_word(w, s).map(|v| &v == target).unwrap_or(false)
}

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum BaseJson {
    Set { set: usize },
    Root { root: RootIndex, t: JsonInt },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LetterJson {
    pub conj: SpMatrix,
    pub base: BaseJson,
    pub exp: i8,
}

/// Serialized certificate: a word, the generating set it is over, its target and budget.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Certificate {
    pub schema_version: u32,
    pub bound_set: Option<String>,
    pub n: usize,
    pub ring: RingDesc,
    pub generators: Vec<SpMatrix>,
    pub letters: Vec<LetterJson>,
    pub claimed_target: SpMatrix,
    pub budget: usize,
}

impl Certificate {
    pub fn new(w: &ConjWord, generators: &[SpMatrix], target: &SpMatrix, budget: usize) -> Self {
        let letters = w
            .letters
            .iter()
            .map(|l| LetterJson {
                conj: l.conj.clone(),
                base: match &l.base {
                    GenRef::SetElem(i) => BaseJson::Set { set: *i },
                    GenRef::RootElem(r, t) => BaseJson::Root {
                        root: *r,
                        t: JsonInt::from(t),
                    },
                },
                exp: l.exp,
            })
            .collect();
        Certificate {
            schema_version: SCHEMA_VERSION,
            bound_set: w.bound_set.clone(),
            n: w.n,
            ring: w.ring.clone(),
            generators: generators.to_vec(),
            letters,
            claimed_target: target.clone(),
            budget,
        }
    }

    pub fn word(&self) -> ConjWord {
        ConjWord {
            n: self.n,
            ring: self.ring.clone(),
            letters: self
                .letters
                .iter()
                .map(|l| Letter {
                    conj: l.conj.clone(),
                    base: match &l.base {
                        BaseJson::Set { set } => GenRef::SetElem(*set),
                        BaseJson::Root { root, t } => GenRef::RootElem(*root, self.ring.reduce(&t.0)),
                    },
                    exp: l.exp,
                })
                .collect(),
            bound_set: self.bound_set.clone(),
        }
    }

    /// Evaluation-only check of the stored claim.
    pub fn verify(&self) -> bool {
        verify_certificate(&self.word(), &self.generators, &self.claimed_target, self.budget)
    }
}

/// Letters whose base is a root element with parameter zero evaluate to the identity.
pub fn is_trivial_letter(l: &Letter) -> bool {
    matches!(&l.base, GenRef::RootElem(_, t) if t.is_zero())
}
