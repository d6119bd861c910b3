//! Exact arithmetic over `Z` and `Z/m`, ideals, and maximal ideals.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingDesc, RingDesc),
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(BigInt),
    #[error("the integers have infinitely many maximal ideals")]
    InfiniteMaximalIdeals,
    #[error("{0} does not lie in the ideal generated by {1}")]
    NotInIdeal(BigInt, BigInt),
    #[error("{0} is not a unit in {1}")]
    NotAUnit(BigInt, RingDesc),
    #[error("cannot factor {0} by trial division")]
    FactorizationTooLarge(BigInt),
    #[error("cannot parse ring description {0:?}")]
    Parse(String),
}

/// The coefficient ring: `Z` or `Z/m` with `m >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingDesc {
    Integers,
    IntegersMod(BigInt),
}

impl RingDesc {
    pub fn modulo(m: impl Into<BigInt>) -> Result<Self, RingError> {
        let m = m.into();
        if m < BigInt::from(2) {
            return Err(RingError::InvalidModulus(m));
        }
        Ok(RingDesc::IntegersMod(m))
    }

    pub fn modulus(&self) -> Option<&BigInt> {
        match self {
            RingDesc::Integers => None,
            RingDesc::IntegersMod(m) => Some(m),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, RingDesc::IntegersMod(_))
    }

    /// Canonical representative: identity over `Z`, residue in `[0, m)` over `Z/m`.
    pub fn reduce(&self, x: &BigInt) -> BigInt {
        match self {
            RingDesc::Integers => x.clone(),
            RingDesc::IntegersMod(m) => x.mod_floor(m),
        }
    }

    pub fn reduce_in_place(&self, x: &mut BigInt) {
        if let RingDesc::IntegersMod(m) = self {
            if x.is_negative() || &*x >= m {
                *x = x.mod_floor(m);
            }
        }
    }

    pub fn elem(&self, v: impl Into<BigInt>) -> RingElem {
        RingElem::new(v.into(), self.clone())
    }

    pub fn zero(&self) -> RingElem {
        self.elem(0)
    }

    pub fn one(&self) -> RingElem {
        self.elem(1)
    }

    pub fn is_unit(&self, x: &BigInt) -> bool {
        match self {
            RingDesc::Integers => x.abs().is_one(),
            RingDesc::IntegersMod(m) => x.gcd(m).is_one(),
        }
    }

    pub fn inverse(&self, x: &BigInt) -> Result<BigInt, RingError> {
        match self {
            RingDesc::Integers => {
                if x.abs().is_one() {
                    Ok(x.clone())
                } else {
                    Err(RingError::NotAUnit(x.clone(), self.clone()))
                }
            }
            RingDesc::IntegersMod(m) => {
                let e = x.extended_gcd(m);
                if e.gcd.is_one() {
                    Ok(e.x.mod_floor(m))
                } else {
                    Err(RingError::NotAUnit(x.clone(), self.clone()))
                }
            }
        }
    }

    /// Unit-normalized generator of the principal ideal `(x)`.
    ///
    /// Over `Z` this is `|x|`; over `Z/m` it is `gcd(x, m)` (with `m` itself read as `0`),
    /// the smallest nonnegative lift generating the same ideal.
    pub fn canonical(&self, x: &BigInt) -> BigInt {
        match self {
            RingDesc::Integers => x.abs(),
            RingDesc::IntegersMod(m) => {
                let g = x.gcd(m);
                if &g == m {
                    BigInt::zero()
                } else {
                    g
                }
            }
        }
    }

    /// Whether `x` lies in the principal ideal `(d)`, `d` canonical.
    pub fn divides(&self, d: &BigInt, x: &BigInt) -> bool {
        let x = self.reduce(x);
        if d.is_zero() {
            x.is_zero()
        } else {
            x.is_multiple_of(d)
        }
    }

    /// Some `q` with `q * d = x` in the ring, assuming `d` canonical and `d | x`.
    pub fn exact_quotient(&self, x: &BigInt, d: &BigInt) -> Result<BigInt, RingError> {
        let xr = self.reduce(x);
        if d.is_zero() {
            return if xr.is_zero() {
                Ok(BigInt::zero())
            } else {
                Err(RingError::NotInIdeal(xr, d.clone()))
            };
        }
        if !xr.is_multiple_of(d) {
            return Err(RingError::NotInIdeal(xr, d.clone()));
        }
        Ok(self.reduce(&(xr / d)))
    }

    fn check_same(&self, other: &RingDesc) -> Result<(), RingError> {
        if self == other {
            Ok(())
        } else {
            Err(RingError::RingMismatch(self.clone(), other.clone()))
        }
    }
}

impl fmt::Display for RingDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDesc::Integers => write!(f, "Z"),
            RingDesc::IntegersMod(m) => write!(f, "Z/{m}"),
        }
    }
}

impl FromStr for RingDesc {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "Z" {
            return Ok(RingDesc::Integers);
        }
        let m = t
            .strip_prefix("Z/")
            .and_then(|m| BigInt::from_str(m).ok())
            .ok_or_else(|| RingError::Parse(s.to_string()))?;
        RingDesc::modulo(m)
    }
}

impl Serialize for RingDesc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RingDesc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An element of a [`RingDesc`], kept in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElem {
    value: BigInt,
    ring: RingDesc,
}

impl RingElem {
    pub fn new(value: BigInt, ring: RingDesc) -> Self {
        let value = ring.reduce(&value);
        RingElem { value, ring }
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn ring(&self) -> &RingDesc {
        &self.ring
    }

    pub fn into_value(self) -> BigInt {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.ring.is_unit(&self.value)
    }

    pub fn add(&self, o: &RingElem) -> Result<RingElem, RingError> {
        self.ring.check_same(&o.ring)?;
        Ok(RingElem::new(&self.value + &o.value, self.ring.clone()))
    }

    pub fn sub(&self, o: &RingElem) -> Result<RingElem, RingError> {
        self.ring.check_same(&o.ring)?;
        Ok(RingElem::new(&self.value - &o.value, self.ring.clone()))
    }

    pub fn mul(&self, o: &RingElem) -> Result<RingElem, RingError> {
        self.ring.check_same(&o.ring)?;
        Ok(RingElem::new(&self.value * &o.value, self.ring.clone()))
    }

    pub fn neg(&self) -> RingElem {
        RingElem::new(-&self.value, self.ring.clone())
    }

    pub fn inverse(&self) -> Result<RingElem, RingError> {
        Ok(RingElem::new(self.ring.inverse(&self.value)?, self.ring.clone()))
    }

    /// Unit-normalized associate generating the same principal ideal.
    pub fn normalized(&self) -> RingElem {
        RingElem::new(self.ring.canonical(&self.value), self.ring.clone())
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Extended gcd: `(g, u, v)` with `u*a + v*b = g`, `g` unit-normalized.
pub fn gcd_bezout(a: &RingElem, b: &RingElem) -> Result<(RingElem, RingElem, RingElem), RingError> {
    a.ring.check_same(&b.ring)?;
    let ring = a.ring.clone();
    let (g, u, v) = bezout_values(&ring, &a.value, &b.value);
    Ok((
        RingElem::new(g, ring.clone()),
        RingElem::new(u, ring.clone()),
        RingElem::new(v, ring),
    ))
}

/// Value-level Bézout over a ring.
pub(crate) fn bezout_values(ring: &RingDesc, a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    match ring {
        RingDesc::Integers => {
            // extended_gcd returns a nonnegative gcd for integers
            (e.gcd, e.x, e.y)
        }
        RingDesc::IntegersMod(m) => {
            let f = e.gcd.extended_gcd(m);
            let d = ring.canonical(&f.gcd);
            (
                d,
                ring.reduce(&(&f.x * &e.x)),
                ring.reduce(&(&f.x * &e.y)),
            )
        }
    }
}

/// A finitely generated ideal with its canonical principal generator.
///
/// `witness[i]` are coefficients with `sum witness[i] * generators[i] = canonical`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealRep {
    pub ring: RingDesc,
    pub generators: Vec<BigInt>,
    pub canonical: BigInt,
    pub witness: Vec<BigInt>,
}

impl IdealRep {
    pub fn new(ring: RingDesc, generators: Vec<BigInt>) -> Self {
        let generators: Vec<BigInt> = generators.iter().map(|g| ring.reduce(g)).collect();
        let mut canonical = BigInt::zero();
        let mut witness: Vec<BigInt> = Vec::with_capacity(generators.len());
        for g in &generators {
            let (d, u, v) = bezout_values(&ring, &canonical, g);
            for w in witness.iter_mut() {
                *w = ring.reduce(&(&*w * &u));
            }
            witness.push(v);
            canonical = d;
        }
        IdealRep {
            ring,
            generators,
            canonical,
            witness,
        }
    }

    pub fn zero(ring: RingDesc) -> Self {
        IdealRep::new(ring, Vec::new())
    }

    pub fn principal(x: &RingElem) -> Self {
        IdealRep::new(x.ring.clone(), vec![x.value.clone()])
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        self.ring.divides(&self.canonical, x)
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.ring.is_unit(&self.canonical)
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.canonical.is_zero()
    }

    /// Whether `self` is contained in `other`.
    pub fn is_subset_of(&self, other: &IdealRep) -> bool {
        other.contains(&self.canonical)
    }

    /// Coefficients `c_i` with `sum c_i * generators[i] = x`.
    pub fn express(&self, x: &BigInt) -> Result<Vec<BigInt>, RingError> {
        let q = self.ring.exact_quotient(x, &self.canonical)?;
        Ok(self
            .witness
            .iter()
            .map(|w| self.ring.reduce(&(w * &q)))
            .collect())
    }
}

impl Serialize for IdealRep {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("IdealRep", 3)?;
        st.serialize_field("ring", &self.ring)?;
        let gens: Vec<JsonInt> = self.generators.iter().map(JsonInt::from).collect();
        st.serialize_field("generators", &gens)?;
        st.serialize_field("canonical", &JsonInt::from(&self.canonical))?;
        st.end()
    }
}

/// Integer that serializes as a JSON number when it fits in `i64`, else as a string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl From<&BigInt> for JsonInt {
    fn from(b: &BigInt) -> Self {
        JsonInt(b.clone())
    }
}

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            I(i64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::I(v) => Ok(JsonInt(BigInt::from(v))),
            Raw::S(s) => BigInt::from_str(&s)
                .map(JsonInt)
                .map_err(serde::de::Error::custom),
        }
    }
}

/// A maximal ideal `(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MaxIdeal {
    pub prime: u64,
}

/// A set of maximal ideals; `All` is every maximal ideal of `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaxIdealSet {
    All,
    Finite(BTreeSet<MaxIdeal>),
}

impl MaxIdealSet {
    pub fn empty() -> Self {
        MaxIdealSet::Finite(BTreeSet::new())
    }

    pub fn from_primes(ps: impl IntoIterator<Item = u64>) -> Self {
        MaxIdealSet::Finite(ps.into_iter().map(|prime| MaxIdeal { prime }).collect())
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, MaxIdealSet::Finite(s) if s.is_empty())
    }

    pub fn contains(&self, m: &MaxIdeal) -> bool {
        match self {
            MaxIdealSet::All => true,
            MaxIdealSet::Finite(s) => s.contains(m),
        }
    }

    pub fn intersect(&self, o: &MaxIdealSet) -> MaxIdealSet {
        match (self, o) {
            (MaxIdealSet::All, x) | (x, MaxIdealSet::All) => x.clone(),
            (MaxIdealSet::Finite(a), MaxIdealSet::Finite(b)) => {
                MaxIdealSet::Finite(a.intersection(b).copied().collect())
            }
        }
    }

    pub fn union(&self, o: &MaxIdealSet) -> MaxIdealSet {
        match (self, o) {
            (MaxIdealSet::All, _) | (_, MaxIdealSet::All) => MaxIdealSet::All,
            (MaxIdealSet::Finite(a), MaxIdealSet::Finite(b)) => {
                MaxIdealSet::Finite(a.union(b).copied().collect())
            }
        }
    }

    pub fn is_subset_of(&self, o: &MaxIdealSet) -> bool {
        match (self, o) {
            (_, MaxIdealSet::All) => true,
            (MaxIdealSet::All, MaxIdealSet::Finite(_)) => false,
            (MaxIdealSet::Finite(a), MaxIdealSet::Finite(b)) => a.is_subset(b),
        }
    }

    pub fn primes(&self) -> Option<Vec<u64>> {
        match self {
            MaxIdealSet::All => None,
            MaxIdealSet::Finite(s) => Some(s.iter().map(|m| m.prime).collect()),
        }
    }
}

impl Serialize for MaxIdealSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MaxIdealSet::All => s.serialize_str("all"),
            MaxIdealSet::Finite(set) => {
                let ps: Vec<u64> = set.iter().map(|m| m.prime).collect();
                ps.serialize(s)
            }
        }
    }
}

/// Distinct prime factors of `|x|` by trial division, ascending. `x` must be nonzero.
pub fn prime_factors(x: &BigInt) -> Result<Vec<u64>, RingError> {
    let mut rest = x.abs();
    let mut out = Vec::new();
    if rest.is_zero() {
        return Ok(out);
    }
    let mut d: u64 = 2;
    while BigInt::from(d) * BigInt::from(d) <= rest {
        let db = BigInt::from(d);
        if rest.is_multiple_of(&db) {
            out.push(d);
            while rest.is_multiple_of(&db) {
                rest /= &db;
            }
        }
        d += if d == 2 { 1 } else { 2 };
        if d > 1 << 32 {
            return Err(RingError::FactorizationTooLarge(x.clone()));
        }
    }
    if rest > BigInt::one() {
        let p = rest
            .to_u64()
            .ok_or_else(|| RingError::FactorizationTooLarge(x.clone()))?;
        out.push(p);
    }
    Ok(out)
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && prime_factors(&BigInt::from(p)).map(|f| f == vec![p]).unwrap_or(false)
}

/// `V(I)`: the maximal ideals containing `I`.
pub fn v_of_ideal(i: &IdealRep) -> Result<MaxIdealSet, RingError> {
    match &i.ring {
        RingDesc::Integers => {
            if i.canonical.is_zero() {
                Ok(MaxIdealSet::All)
            } else {
                Ok(MaxIdealSet::from_primes(prime_factors(&i.canonical)?))
            }
        }
        RingDesc::IntegersMod(m) => {
            let ps = prime_factors(m)?;
            Ok(MaxIdealSet::from_primes(
                ps.into_iter()
                    .filter(|p| i.canonical.is_multiple_of(&BigInt::from(*p))),
            ))
        }
    }
}

pub fn ideal_sum(i: &IdealRep, j: &IdealRep) -> Result<IdealRep, RingError> {
    i.ring.check_same(&j.ring)?;
    let mut gens = i.generators.clone();
    gens.extend(j.generators.iter().cloned());
    Ok(IdealRep::new(i.ring.clone(), gens))
}

/// Sum of a list of ideals in a common ring.
pub fn ideal_sum_all<'a>(
    ring: &RingDesc,
    ideals: impl IntoIterator<Item = &'a IdealRep>,
) -> Result<IdealRep, RingError> {
    let mut gens = Vec::new();
    for i in ideals {
        ring.check_same(&i.ring)?;
        gens.extend(i.generators.iter().cloned());
    }
    Ok(IdealRep::new(ring.clone(), gens))
}

pub fn maximal_ideals(ring: &RingDesc) -> Result<Vec<MaxIdeal>, RingError> {
    match ring {
        RingDesc::Integers => Err(RingError::InfiniteMaximalIdeals),
        RingDesc::IntegersMod(m) => Ok(prime_factors(m)?
            .into_iter()
            .map(|prime| MaxIdeal { prime })
            .collect()),
    }
}

/// Writes `x = sum x_i` with `x_i` in `ideals[i]`; zero parts are omitted.
pub fn decompose_over_ideals(
    x: &RingElem,
    ideals: &[IdealRep],
) -> Result<Vec<(usize, RingElem)>, RingError> {
    let ring = x.ring.clone();
    for i in ideals {
        ring.check_same(&i.ring)?;
    }
    let canon: Vec<BigInt> = ideals.iter().map(|i| i.canonical.clone()).collect();
    let sum = IdealRep::new(ring.clone(), canon);
    let coeffs = sum.express(&x.value)?;
    Ok(coeffs
        .into_iter()
        .zip(ideals)
        .enumerate()
        .filter_map(|(idx, (c, i))| {
            let part = ring.reduce(&(c * &i.canonical));
            (!part.is_zero()).then(|| (idx, RingElem::new(part, ring.clone())))
        })
        .collect())
}

/// Chinese remainder: the residue mod `prod m_i` congruent to `r_i` mod `m_i` (coprime moduli).
pub fn crt(residues: &[(BigInt, BigInt)]) -> BigInt {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (r, mi) in residues {
        let e = m.extended_gcd(mi);
        // x + m*t = r mod mi
        let t = ((r - &x) * &e.x).mod_floor(mi);
        x += &m * t;
        m *= mi;
        x = x.mod_floor(&m);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> RingDesc {
        RingDesc::Integers
    }

    fn zm(m: i64) -> RingDesc {
        RingDesc::modulo(m).unwrap()
    }

    fn ideal(r: &RingDesc, gens: &[i64]) -> IdealRep {
        IdealRep::new(r.clone(), gens.iter().map(|&g| BigInt::from(g)).collect())
    }

    #[test]
    fn bezout_over_integers() {
        let (g, u, v) = gcd_bezout(&z().elem(4), &z().elem(6)).unwrap();
        assert_eq!(g.value(), &BigInt::from(2));
        assert_eq!(u.value() * 4 + v.value() * 6, BigInt::from(2));
        let (g, _, v) = gcd_bezout(&z().elem(-7), &z().elem(0)).unwrap();
        assert_eq!(g.value(), &BigInt::from(7));
        assert_eq!(v.value(), &BigInt::zero());
    }

    #[test]
    fn bezout_mod_35_matches_brute_force_ideal() {
        let r = zm(35);
        let (g, u, v) = gcd_bezout(&r.elem(21), &r.elem(15)).unwrap();
        // brute-force ideal generated by 21 and 15 in Z/35
        let mut gen_ideal = BTreeSet::new();
        for s in 0..35 {
            for t in 0..35 {
                gen_ideal.insert((21 * s + 15 * t) % 35);
            }
        }
        let by_g: BTreeSet<i64> = (0..35).map(|s| (s * g.value().to_i64().unwrap()) % 35).collect();
        assert_eq!(gen_ideal, by_g);
        assert_eq!(g.value(), &BigInt::one());
        assert_eq!(r.reduce(&(u.value() * 21 + v.value() * 15)), *g.value());
    }

    #[test]
    fn v_examples() {
        assert_eq!(v_of_ideal(&ideal(&z(), &[0])).unwrap(), MaxIdealSet::All);
        assert_eq!(
            v_of_ideal(&ideal(&z(), &[12])).unwrap(),
            MaxIdealSet::from_primes([2, 3])
        );
        // maximal ideals of Z/30 are (2),(3),(5); (10) lies in (2) and (5)
        let r = zm(30);
        let i = ideal(&r, &[10]);
        let brute: Vec<u64> = [2u64, 3, 5]
            .into_iter()
            .filter(|p| (0..30).all(|s| (10 * s % 30) % (*p as i64) == 0))
            .collect();
        assert_eq!(v_of_ideal(&i).unwrap(), MaxIdealSet::from_primes(brute));
    }

    #[test]
    fn sums_and_maximal_ideals() {
        let s = ideal_sum(&ideal(&z(), &[4]), &ideal(&z(), &[6])).unwrap();
        assert_eq!(s.canonical, BigInt::from(2));
        let i = ideal(&z(), &[9]);
        assert_eq!(ideal_sum(&i, &ideal(&z(), &[0])).unwrap().canonical, i.canonical);
        let s = ideal_sum_all(&z(), &[ideal(&z(), &[6]), ideal(&z(), &[10]), ideal(&z(), &[15])]).unwrap();
        assert!(s.canonical.is_one());
        assert!(v_of_ideal(&s).unwrap().is_empty());
        assert_eq!(maximal_ideals(&zm(210)).unwrap().len(), 4);
        assert_eq!(maximal_ideals(&zm(8)).unwrap(), vec![MaxIdeal { prime: 2 }]);
        assert_eq!(maximal_ideals(&zm(101)).unwrap(), vec![MaxIdeal { prime: 101 }]);
        assert!(maximal_ideals(&z()).is_err());
    }

    #[test]
    fn decompositions() {
        assert!(decompose_over_ideals(&z().elem(0), &[ideal(&z(), &[2])]).unwrap().is_empty());
        let parts = decompose_over_ideals(&z().elem(1), &[ideal(&z(), &[2]), ideal(&z(), &[3])]).unwrap();
        let total: BigInt = parts.iter().map(|(_, x)| x.value().clone()).sum();
        assert_eq!(total, BigInt::one());
        let ids = [ideal(&z(), &[6]), ideal(&z(), &[10]), ideal(&z(), &[15])];
        let parts = decompose_over_ideals(&z().elem(7), &ids).unwrap();
        let total: BigInt = parts.iter().map(|(_, x)| x.value().clone()).sum();
        assert_eq!(total, BigInt::from(7));
        for (i, x) in &parts {
            assert!(ids[*i].contains(x.value()));
        }
        assert!(decompose_over_ideals(&z().elem(1), &[ideal(&z(), &[2])]).is_err());
    }

    #[test]
    fn crt_combines() {
        let x = crt(&[(BigInt::from(1), BigInt::from(2)), (BigInt::from(0), BigInt::from(3)), (BigInt::from(4), BigInt::from(5))]);
        assert_eq!(x.clone() % 2, BigInt::from(1));
        assert_eq!(x.clone() % 3, BigInt::from(0));
        assert_eq!(x % 5, BigInt::from(4));
    }

    #[test]
    fn ring_parse_roundtrip() {
        for s in ["Z", "Z/210"] {
            assert_eq!(s.parse::<RingDesc>().unwrap().to_string(), s);
        }
        assert!("Z/1".parse::<RingDesc>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn bezout_identity(a in -500i64..500, b in -500i64..500, m in 2i64..300) {
                for r in [z(), zm(m)] {
                    let (g, u, v) = gcd_bezout(&r.elem(a), &r.elem(b)).unwrap();
                    prop_assert_eq!(r.reduce(&(u.value() * a + v.value() * b)), g.value().clone());
                    prop_assert!(r.divides(g.value(), &BigInt::from(a)));
                    prop_assert!(r.divides(g.value(), &BigInt::from(b)));
                }
            }

            #[test]
            fn v_of_sum_is_intersection(a in 0i64..1000, b in 0i64..1000, m in 2i64..400) {
                let r = zm(m);
                let i = ideal(&r, &[a]);
                let j = ideal(&r, &[b]);
                let lhs = v_of_ideal(&ideal_sum(&i, &j).unwrap()).unwrap();
                // containment (x) in (p) checked directly on all residues of the ideal
                let contained = |gens: &[i64], p: i64| gens.iter().all(|g| g.rem_euclid(m) % p == 0);
                let ps = prime_factors(&BigInt::from(m)).unwrap();
                let rhs = MaxIdealSet::from_primes(ps.into_iter().filter(|&p| contained(&[a, b], p as i64)));
                prop_assert_eq!(lhs.clone(), rhs);
                prop_assert_eq!(lhs, v_of_ideal(&i).unwrap().intersect(&v_of_ideal(&j).unwrap()));
            }

            #[test]
            fn decomposition_resums(x in -300i64..300, gens in proptest::collection::vec(-60i64..60, 1..5), m in 2i64..200) {
                for r in [z(), zm(m)] {
                    let ids: Vec<IdealRep> = gens.iter().map(|g| ideal(&r, &[*g])).collect();
                    let sum = ideal_sum_all(&r, &ids).unwrap();
                    let xe = r.elem(x);
                    match decompose_over_ideals(&xe, &ids) {
                        Ok(parts) => {
                            let total = parts.iter().fold(BigInt::zero(), |acc, (_, p)| acc + p.value());
                            prop_assert_eq!(r.reduce(&total), xe.value().clone());
                            for (i, p) in &parts {
                                prop_assert!(ids[*i].contains(p.value()));
                            }
                        }
                        Err(_) => prop_assert!(!sum.contains(xe.value())),
                    }
                }
            }

            #[test]
            fn normalization_idempotent(x in -1000i64..1000, m in 2i64..500) {
                for r in [z(), zm(m)] {
                    let e = r.elem(x);
                    prop_assert_eq!(e.normalized().normalized(), e.normalized());
                    prop_assert_eq!(IdealRep::principal(&e).canonical, e.normalized().value().clone());
                }
            }
        }
    }
}
