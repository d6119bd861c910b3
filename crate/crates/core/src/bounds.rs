//! Normal generation via centrality locus, fixed-space counting, and lower-bound generating sets.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::rings::{crt, is_prime, prime_factors, v_of_ideal, IdealRep, JsonInt, MaxIdeal, MaxIdealSet, RingDesc, RingError};
use crate::symplectic::{random_sp_with, root_element, Mat, RootIndex, SpMatrix, SymplecticError};

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("the centrality criterion needs rank n >= 3, got {0}; use the search module for smaller ranks")]
    RankTooSmall(usize),
    #[error("ring {0} is not a prime field")]
    NotPrimeField(RingDesc),
    #[error("no matrix without eigenvalue 1 found for n = {0}, p = {1}")]
    NoWitness(usize, u64),
    #[error("k = {k} exceeds the number of available primes {q}")]
    TooManyFactors { k: usize, q: usize },
    #[error("root {0} is not long")]
    NotLong(RootIndex),
    #[error("ring {0} is not Z/m")]
    NotFinite(RingDesc),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
}

/// Maximal ideals modulo which `a` is `+-I`.
fn pi_of_matrix(a: &SpMatrix) -> Result<MaxIdealSet, BoundsError> {
    match a.ring() {
        RingDesc::Integers => {
            let n = a.n();
            let one = BigInt::one();
            let entries = |sign: &BigInt| -> Vec<BigInt> {
                (0..2 * n)
                    .flat_map(|i| (0..2 * n).map(move |j| (i, j)))
                    .map(|(i, j)| if i == j { a.get(i, j) - sign } else { a.get(i, j).clone() })
                    .collect()
            };
            let plus = v_of_ideal(&IdealRep::new(RingDesc::Integers, entries(&one)))?;
            let minus = v_of_ideal(&IdealRep::new(RingDesc::Integers, entries(&-one)))?;
            Ok(plus.union(&minus))
        }
        RingDesc::IntegersMod(m) => {
            let mut out = Vec::new();
            for p in prime_factors(m)? {
                if a.is_central_mod(&MaxIdeal { prime: p })? {
                    out.push(p);
                }
            }
            Ok(MaxIdealSet::from_primes(out))
        }
    }
}

/// `Pi(S)`: maximal ideals modulo which every element of `S` is central. The empty set gives `All`.
pub fn pi_of_set(s: &[SpMatrix]) -> Result<MaxIdealSet, BoundsError> {
    s.iter().try_fold(MaxIdealSet::All, |acc, a| Ok(acc.intersect(&pi_of_matrix(a)?)))
}

/// Whether the conjugates of `S` generate the group, decided by `Pi(S)` being empty (rank at least 3).
pub fn normally_generates(s: &[SpMatrix]) -> Result<bool, BoundsError> {
    if let Some(a) = s.first() {
        if a.n() < 3 {
            return Err(BoundsError::RankTooSmall(a.n()));
        }
    }
    Ok(pi_of_set(s)?.is_empty())
}

fn prime_modulus(ring: &RingDesc) -> Result<u64, BoundsError> {
    ring.modulus()
        .and_then(|m| m.to_u64())
        .filter(|p| is_prime(*p))
        .ok_or_else(|| BoundsError::NotPrimeField(ring.clone()))
}

/// `dim ker(A - I)` over `F_p`.
pub fn fixed_space_dim(a: &SpMatrix) -> Result<usize, BoundsError> {
    let p = prime_modulus(a.ring())?;
    let diff = a.mat().sub(&Mat::identity(2 * a.n(), a.ring()));
    Ok(2 * a.n() - diff.rank_mod_prime(p))
}

/// `B (+) B^{-T}` for a companion matrix `B` in `SL_n(F_p)` with `det(B - I) != 0`.
pub fn no_eigenvalue_one_witness(n: usize, p: u64) -> Result<SpMatrix, BoundsError> {
    let ring = RingDesc::modulo(p)?;
    if !is_prime(p) {
        return Err(BoundsError::NotPrimeField(ring));
    }
    // x^n + c_{n-1} x^{n-1} + ... + c_0 with det = (-1)^n c_0 = 1
    let c0 = ring.reduce(&BigInt::from(if n % 2 == 0 { 1 } else { -1 }));
    let free = n.saturating_sub(1) as u32;
    let total = p.checked_pow(free).unwrap_or(u64::MAX);
    for idx in 0..total {
        let mut coeffs = vec![c0.clone()];
        let mut r = idx;
        for _ in 0..free {
            coeffs.push(BigInt::from(r % p));
            r /= p;
        }
        let mut b = Mat::zero(n, &ring);
        for i in 1..n {
            b.set(i, i - 1, BigInt::one());
        }
        for (i, c) in coeffs.iter().enumerate() {
            b.set(i, n - 1, ring.reduce(&-c));
        }
        let Some(witness) = SpMatrix::block_diag(&b) else {
            continue;
        };
        if fixed_space_dim(&witness)? == 0 {
            return Ok(witness);
        }
    }
    Err(BoundsError::NoWitness(n, p))
}

/// What one maximal ideal contributes to a lower bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorRecord {
    pub prime: u64,
    pub field: String,
    /// index `j` of the only generator that is nontrivial modulo this prime
    pub generator_index: usize,
    pub image_generator: SpMatrix,
    pub per_factor_bound: usize,
}

/// `S = {eps_phi(x_j)}` whose conjugation diameter is at least `2nk`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowerBoundCertificate {
    pub n: usize,
    pub ring: RingDesc,
    pub k: usize,
    pub root: RootIndex,
    pub xs: Vec<JsonInt>,
    pub set: Vec<SpMatrix>,
    pub claimed_bound: usize,
    pub factor_data: Vec<FactorRecord>,
}

fn factor_records(n: usize, root: &RootIndex, primes: &[u64]) -> Result<Vec<FactorRecord>, BoundsError> {
    primes
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let field = RingDesc::modulo(p)?;
            Ok(FactorRecord {
                prime: p,
                field: field.to_string(),
                generator_index: j,
                image_generator: root_element(n, &field, root, &BigInt::one()),
                per_factor_bound: 2 * n,
            })
        })
        .collect()
}

/// Residues `x_j` with `x_j = 1` mod `p_j`, `0` mod `p_i` for other `i <= k`, and `1` mod `p_i` for `i > k`.
pub fn crt_generating_set(n: usize, ring: &RingDesc, k: usize, root: &RootIndex) -> Result<LowerBoundCertificate, BoundsError> {
    if !root.is_long() {
        return Err(BoundsError::NotLong(*root));
    }
    let m = ring.modulus().ok_or_else(|| BoundsError::NotFinite(ring.clone()))?;
    let primes = prime_factors(m)?;
    if k > primes.len() || k == 0 {
        return Err(BoundsError::TooManyFactors { k, q: primes.len() });
    }
    let powers: Vec<BigInt> = primes
        .iter()
        .map(|&p| {
            let p = BigInt::from(p);
            let mut q = p.clone();
            while (m % (&q * &p)).is_zero() {
                q *= &p;
            }
            q
        })
        .collect();
    let xs: Vec<BigInt> = (0..k)
        .map(|j| {
            let residues: Vec<(BigInt, BigInt)> = powers
                .iter()
                .enumerate()
                .map(|(i, q)| (BigInt::from(u8::from(i == j || i >= k)), q.clone()))
                .collect();
            crt(&residues).mod_floor(m)
        })
        .collect();
    let set = xs.iter().map(|x| root_element(n, ring, root, x)).collect();
    Ok(LowerBoundCertificate {
        n,
        ring: ring.clone(),
        k,
        root: *root,
        xs: xs.iter().map(JsonInt::from).collect(),
        set,
        claimed_bound: 2 * n * k,
        factor_data: factor_records(n, root, &primes[..k])?,
    })
}

/// The integer variant: `x_j` is the product of the given primes with `p_j` omitted.
pub fn crt_generating_set_integers(n: usize, primes: &[u64], root: &RootIndex) -> Result<LowerBoundCertificate, BoundsError> {
    if !root.is_long() {
        return Err(BoundsError::NotLong(*root));
    }
    if let Some(&p) = primes.iter().find(|p| !is_prime(**p)) {
        return Err(BoundsError::NotPrimeField(RingDesc::modulo(p)?));
    }
    let ring = RingDesc::Integers;
    let xs: Vec<BigInt> = (0..primes.len())
        .map(|j| primes.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, &p)| BigInt::from(p)).product())
        .collect();
    let set = xs.iter().map(|x| root_element(n, &ring, root, x)).collect();
    Ok(LowerBoundCertificate {
        n,
        ring,
        k: primes.len(),
        root: *root,
        xs: xs.iter().map(JsonInt::from).collect(),
        set,
        claimed_bound: 2 * n * primes.len(),
        factor_data: factor_records(n, root, primes)?,
    })
}

impl LowerBoundCertificate {
    /// Re-checks the congruence pattern, the factor images, the bound arithmetic, and `Pi(S)`.
    pub fn validate(&self) -> Result<bool, BoundsError> {
        let one = BigInt::one();
        let xs: Vec<BigInt> = self.xs.iter().map(|x| x.0.clone()).collect();
        let pattern = self.factor_data.iter().all(|f| {
            let p = BigInt::from(f.prime);
            xs.iter().enumerate().all(|(j, x)| {
                let r = x.mod_floor(&p);
                if j == f.generator_index {
                    r == one.clone().mod_floor(&p)
                } else {
                    r.is_zero()
                }
            })
        });
        let set_ok = self.set.len() == xs.len()
            && self.set.iter().zip(&xs).all(|(a, x)| *a == root_element(self.n, &self.ring, &self.root, x));
        let mut images_ok = true;
        for f in &self.factor_data {
            images_ok &= f.per_factor_bound == 2 * self.n && fixed_space_dim(&f.image_generator)? == 2 * self.n - 1;
            let reduced = self.set[f.generator_index].change_ring(&RingDesc::modulo(f.prime)?);
            images_ok &= reduced == f.image_generator;
        }
        let bound_ok = self.claimed_bound == 2 * self.n * self.k && self.factor_data.len() == self.k;
        let pi_ok = pi_of_set(&self.set)?.is_empty();
        Ok(pattern && set_ok && images_ok && bound_ok && pi_ok)
    }
}

/// Samples products of at most `max_len` conjugates of `e^{+-1}` over `F_p`;
/// returns the smallest fixed-space dimension seen.
pub fn min_fixed_dim_of_products(e: &SpMatrix, max_len: usize, samples: usize, seed: u64) -> Result<usize, BoundsError> {
    prime_modulus(e.ring())?;
    let n = e.n();
    let ring = e.ring().clone();
    let einv = e.inverse();
    let dims: Result<Vec<usize>, BoundsError> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let len = rng.gen_range(1..=max_len.max(1));
            let mut prod = SpMatrix::identity(n, &ring);
            for _ in 0..len {
                let g = random_sp_with(n, &ring, 4 * n * n, &mut rng);
                let base = if rng.gen_bool(0.5) { e } else { &einv };
                prod = prod.mul(&base.conjugate_by(&g));
            }
            fixed_space_dim(&prod)
        })
        .collect();
    Ok(dims?.into_iter().min().unwrap_or(2 * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zm(m: i64) -> RingDesc {
        RingDesc::modulo(m).unwrap()
    }

    #[test]
    fn pi_examples() {
        let z = RingDesc::Integers;
        assert_eq!(pi_of_set(&[SpMatrix::identity(3, &z)]).unwrap(), MaxIdealSet::All);
        let e = root_element(3, &z, &RootIndex::long(1, true), &BigInt::from(6));
        assert_eq!(pi_of_set(&[e]).unwrap(), MaxIdealSet::from_primes([2, 3]));
        assert_eq!(pi_of_set(&[SpMatrix::minus_identity(2, &z)]).unwrap(), MaxIdealSet::All);
        let r = zm(30);
        let e1 = root_element(3, &r, &RootIndex::long(1, true), &BigInt::one());
        assert!(normally_generates(&[e1]).unwrap());
        assert!(!normally_generates(&[SpMatrix::identity(3, &r)]).unwrap());
        assert!(normally_generates(&[SpMatrix::identity(2, &r)]).is_err());
    }

    #[test]
    fn fixed_space_examples() {
        let r = zm(7);
        let n = 3;
        assert_eq!(fixed_space_dim(&SpMatrix::identity(n, &r)).unwrap(), 6);
        let e = root_element(n, &r, &RootIndex::long(1, true), &BigInt::from(3));
        assert_eq!(fixed_space_dim(&e).unwrap(), 5);
        for seed in 0..10 {
            let g = crate::symplectic::random_sp(n, &r, 30, seed);
            assert_eq!(fixed_space_dim(&e.conjugate_by(&g)).unwrap(), 5);
        }
        assert!(fixed_space_dim(&SpMatrix::identity(2, &zm(6))).is_err());
    }

    #[test]
    fn witnesses_have_no_fixed_vectors() {
        for (n, p) in [(2, 3), (3, 2), (2, 2), (3, 5), (4, 7)] {
            let w = no_eigenvalue_one_witness(n, p).unwrap();
            assert!(w.is_symplectic());
            let d = w.mat().sub(&Mat::identity(2 * n, w.ring())).det();
            assert!(!d.is_zero());
            assert_eq!(fixed_space_dim(&w).unwrap(), 0);
        }
        assert!(no_eigenvalue_one_witness(1, 2).is_err());
    }

    #[test]
    fn crt_sets() {
        let r = zm(30);
        let phi = RootIndex::long(1, true);
        let c = crt_generating_set(3, &r, 3, &phi).unwrap();
        assert_eq!(c.claimed_bound, 18);
        assert!(c.validate().unwrap());
        let primes = [2u64, 3, 5];
        for (j, s) in c.set.iter().enumerate() {
            let others: Vec<u64> = primes.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, &p)| p).collect();
            assert_eq!(pi_of_set(std::slice::from_ref(s)).unwrap(), MaxIdealSet::from_primes(others));
        }
        let c1 = crt_generating_set(3, &zm(7), 1, &phi).unwrap();
        assert_eq!(c1.xs[0].0, BigInt::one());
        assert_eq!(c1.claimed_bound, 6);
        let partial = crt_generating_set(3, &zm(210), 2, &phi).unwrap();
        assert!(partial.validate().unwrap());
        assert!(matches!(crt_generating_set(3, &r, 4, &phi), Err(BoundsError::TooManyFactors { .. })));
        let zc = crt_generating_set_integers(3, &[2, 3, 5], &phi).unwrap();
        assert_eq!(zc.xs.iter().map(|x| x.0.clone()).collect::<Vec<_>>(), [15, 10, 6].map(BigInt::from));
        assert!(zc.validate().unwrap());
    }

    #[test]
    fn short_products_keep_a_fixed_vector() {
        let r = zm(2);
        let e = root_element(3, &r, &RootIndex::long(1, true), &BigInt::one());
        assert!(min_fixed_dim_of_products(&e, 5, 400, 1).unwrap() >= 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn fixed_space_law(s1 in 0u64..1000, s2 in 0u64..1000) {
            let r = zm(3);
            let a = crate::symplectic::random_sp(2, &r, 10, s1);
            let b = crate::symplectic::random_sp(2, &r, 10, s2);
            let (da, db) = (fixed_space_dim(&a).unwrap(), fixed_space_dim(&b).unwrap());
            let dab = fixed_space_dim(&a.mul(&b)).unwrap();
            prop_assert!(dab + 4 >= da + db);
        }

        #[test]
        fn pi_of_union_is_intersection(s1 in 0u64..500, s2 in 0u64..500) {
            let r = zm(30);
            let a = vec![crate::symplectic::random_sp(3, &r, 2, s1)];
            let b = vec![crate::symplectic::random_sp(3, &r, 2, s2)];
            let both: Vec<SpMatrix> = a.iter().chain(&b).cloned().collect();
            prop_assert_eq!(pi_of_set(&both).unwrap(), pi_of_set(&a).unwrap().intersect(&pi_of_set(&b).unwrap()));
        }
    }
}
