//! Exhaustive breadth-first search in small symplectic groups over prime fields.
//!
//! Elements are packed into `u128` keys with the same layout as
//! [`SpMatrix::canonical_bytes`]: row-major residues, `ceil(log2 p)` bits each,
//! least significant bit first.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;
use thiserror::Error;

use crate::rings::{is_prime, RingDesc};
use crate::symplectic::{residue_width, root_element, Mat, RootIndex, SpMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("modulus {0} is not a prime")]
    NotPrime(u64),
    #[error("Sp({dim}, F_{p}) elements do not fit in 128 bits")]
    TooLarge { dim: usize, p: u64 },
    #[error("matrix over {0} does not belong to this group")]
    WrongGroup(RingDesc),
    #[error("search exceeded the element cutoff {0}")]
    Cutoff(usize),
    #[error("invalid WORKER_COUNT: {0}")]
    Workers(String),
}

/// `|Sp_{2n}(F_q)| = q^{n^2} prod_{i=1}^n (q^{2i} - 1)`.
pub fn group_order(n: usize, q: u64) -> u128 {
    let q = q as u128;
    let mut out = q.pow((n * n) as u32);
    for i in 1..=n {
        out *= q.pow(2 * i as u32) - 1;
    }
    out
}

/// `Sp_{2n}(F_p)` with packed elements.
#[derive(Debug, Clone)]
pub struct FiniteSp {
    n: usize,
    p: u64,
    dim: usize,
    width: usize,
    ring: RingDesc,
    generators: Vec<u128>,
}

type Entries = [u8; 64];

impl FiniteSp {
    pub fn new(n: usize, p: u64) -> Result<Self, SearchError> {
        if !is_prime(p) || p > 255 {
            return Err(SearchError::NotPrime(p));
        }
        let dim = 2 * n;
        let width = residue_width(&BigInt::from(p));
        if dim * dim * width > 128 || dim > 8 {
            return Err(SearchError::TooLarge { dim, p });
        }
        let ring = RingDesc::modulo(p).expect("prime modulus");
        let mut g = FiniteSp {
            n,
            p,
            dim,
            width,
            ring,
            generators: Vec::new(),
        };
        // root elements for +- simple roots generate the group over a prime field
        let one = BigInt::from(1);
        g.generators = RootIndex::simple_roots(n)
            .into_iter()
            .flat_map(|r| [r, r.negate()])
            .map(|r| g.encode(&root_element(n, &g.ring, &r, &one)).expect("same group"))
            .collect();
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ring(&self) -> &RingDesc {
        &self.ring
    }

    pub fn order(&self) -> u128 {
        group_order(self.n, self.p)
    }

    /// Generators of the whole group.
    pub fn generators(&self) -> &[u128] {
        &self.generators
    }

    pub fn identity(&self) -> u128 {
        let mut e = [0u8; 64];
        for i in 0..self.dim {
            e[i * self.dim + i] = 1;
        }
        self.pack(&e)
    }

    fn pack(&self, e: &Entries) -> u128 {
        let mut k = 0u128;
        for (idx, &x) in e[..self.dim * self.dim].iter().enumerate() {
            k |= (x as u128) << (idx * self.width);
        }
        k
    }

    fn unpack(&self, k: u128) -> Entries {
        let mask = (1u128 << self.width) - 1;
        let mut e = [0u8; 64];
        for (idx, slot) in e[..self.dim * self.dim].iter_mut().enumerate() {
            *slot = ((k >> (idx * self.width)) & mask) as u8;
        }
        e
    }

    pub fn encode(&self, a: &SpMatrix) -> Result<u128, SearchError> {
        if a.n() != self.n || *a.ring() != self.ring {
            return Err(SearchError::WrongGroup(a.ring().clone()));
        }
        let mut e = [0u8; 64];
        for i in 0..self.dim {
            for j in 0..self.dim {
                e[i * self.dim + j] = a.get(i, j).to_u8().expect("reduced residue");
            }
        }
        Ok(self.pack(&e))
    }

    pub fn decode(&self, k: u128) -> SpMatrix {
        let e = self.unpack(k);
        let rows: Vec<Vec<BigInt>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| BigInt::from(e[i * self.dim + j])).collect())
            .collect();
        SpMatrix::trusted(self.n, Mat::from_rows(&self.ring, &rows))
    }

    pub fn mul(&self, a: u128, b: u128) -> u128 {
        if self.p == 2 {
            return self.mul_bits(a, b);
        }
        let (x, y) = (self.unpack(a), self.unpack(b));
        let d = self.dim;
        let p = self.p as u32;
        let mut out = [0u8; 64];
        for i in 0..d {
            let mut acc = [0u32; 8];
            for k in 0..d {
                let xik = x[i * d + k] as u32;
                if xik == 0 {
                    continue;
                }
                for j in 0..d {
                    acc[j] += xik * y[k * d + j] as u32;
                }
            }
            for j in 0..d {
                out[i * d + j] = (acc[j] % p) as u8;
            }
        }
        self.pack(&out)
    }

    fn mul_bits(&self, a: u128, b: u128) -> u128 {
        let d = self.dim;
        let mask = (1u128 << d) - 1;
        let mut out = 0u128;
        for i in 0..d {
            let row = (a >> (i * d)) & mask;
            let mut acc = 0u128;
            let mut bits = row;
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                acc ^= (b >> (k * d)) & mask;
                bits &= bits - 1;
            }
            out |= acc << (i * d);
        }
        out
    }

    /// `A^{-1} = [[A4^T, -A2^T], [-A3^T, A1^T]]`.
    pub fn inverse(&self, a: u128) -> u128 {
        let x = self.unpack(a);
        let (n, d, p) = (self.n, self.dim, self.p as u8);
        let neg = |v: u8| if v == 0 { 0 } else { p - v };
        let mut out = [0u8; 64];
        for i in 0..n {
            for j in 0..n {
                out[i * d + j] = x[(n + j) * d + n + i];
                out[i * d + n + j] = neg(x[j * d + n + i]);
                out[(n + i) * d + j] = neg(x[(n + j) * d + i]);
                out[(n + i) * d + n + j] = x[j * d + i];
            }
        }
        self.pack(&out)
    }

    /// Product of `len` random generators.
    pub fn random_element<R: rand::Rng>(&self, rng: &mut R, len: usize) -> u128 {
        (0..len).fold(self.identity(), |acc, _| {
            self.mul(acc, self.generators[rng.gen_range(0..self.generators.len())])
        })
    }

    pub fn conjugate(&self, x: u128, g: u128) -> u128 {
        self.mul(self.mul(g, x), self.inverse(g))
    }

    /// Whether `x` is `+-I`.
    pub fn is_central(&self, x: u128) -> bool {
        x == self.identity() || x == self.minus_identity()
    }

    pub fn minus_identity(&self) -> u128 {
        let mut e = [0u8; 64];
        for i in 0..self.dim {
            e[i * self.dim + i] = (self.p - 1) as u8;
        }
        self.pack(&e)
    }
}

/// The union of the conjugacy classes of `s` and `s^{-1}`, sorted.
pub fn conjugacy_closure(group: &FiniteSp, s: &[u128], cutoff: usize) -> Result<Vec<u128>, SearchError> {
    let mut seen: FxHashSet<u128> = FxHashSet::default();
    let mut queue: VecDeque<u128> = VecDeque::new();
    for &x in s {
        for y in [x, group.inverse(x)] {
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    let gens: Vec<(u128, u128)> = group.generators().iter().map(|&g| (g, group.inverse(g))).collect();
    while let Some(x) = queue.pop_front() {
        for &(g, gi) in &gens {
            let y = group.mul(group.mul(g, x), gi);
            if seen.insert(y) {
                if seen.len() > cutoff {
                    return Err(SearchError::Cutoff(cutoff));
                }
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<u128> = seen.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

/// Ball sizes of the word norm given by a conjugation-closed generating set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallReport {
    pub group: String,
    pub group_order: u64,
    pub generator_count: usize,
    /// `(r, |B(r)|)` for every radius explored
    pub radii: Vec<(usize, u64)>,
    /// set when the ball reached the whole group
    pub diameter: Option<usize>,
    /// radius cutoff hit before the ball stopped growing
    pub exceeds_cutoff: bool,
    /// the ball stopped growing below the group order
    pub stalled: bool,
}

/// Layered result of a breadth-first search from the identity.
#[derive(Debug, Clone)]
pub struct BallSearch {
    pub layers: Vec<Vec<u128>>,
    distance: FxHashMap<u128, u32>,
    pub report: BallReport,
}

impl BallSearch {
    pub fn distance(&self, x: u128) -> Option<usize> {
        self.distance.get(&x).map(|&d| d as usize)
    }

    /// Elements of `B(r)`.
    pub fn ball(&self, r: usize) -> impl Iterator<Item = u128> + '_ {
        self.layers.iter().take(r + 1).flatten().copied()
    }
}

/// Number of rayon workers: `WORKER_COUNT` if set, otherwise rayon's default.
pub fn worker_count() -> Result<Option<usize>, SearchError> {
    match std::env::var("WORKER_COUNT") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&c| c > 0)
            .map(Some)
            .ok_or(SearchError::Workers(v)),
        Err(_) => Ok(None),
    }
}

fn pool(threads: Option<usize>) -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t);
    }
    b.build().expect("thread pool")
}

/// BFS over the Cayley graph of `gens` up to `max_radius` (unbounded if `None`).
pub fn bfs_balls_with_threads(
    group: &FiniteSp,
    gens: &[u128],
    max_radius: Option<usize>,
    threads: Option<usize>,
) -> BallSearch {
    let id = group.identity();
    let mut distance: FxHashMap<u128, u32> = FxHashMap::default();
    distance.insert(id, 0);
    let mut layers = vec![vec![id]];
    let order = group.order() as u64;
    let mut radii = vec![(0usize, 1u64)];
    let mut exceeds_cutoff = false;
    let workers = pool(threads);
    loop {
        let r = layers.len();
        if distance.len() as u64 == order {
            break;
        }
        if max_radius.is_some_and(|m| r > m) {
            exceeds_cutoff = true;
            break;
        }
        let frontier = layers.last().expect("nonempty");
        let seen = &distance;
        let mut next: Vec<u128> = workers.install(|| {
            frontier
                .par_chunks(1024)
                .flat_map_iter(|chunk| {
                    let mut local = Vec::new();
                    for &x in chunk {
                        for &g in gens {
                            let y = group.mul(x, g);
                            if !seen.contains_key(&y) {
                                local.push(y);
                            }
                        }
                    }
                    local
                })
                .collect()
        });
        next.par_sort_unstable();
        next.dedup();
        if next.is_empty() {
            break;
        }
        for &y in &next {
            distance.insert(y, r as u32);
        }
        radii.push((r, distance.len() as u64));
        layers.push(next);
    }
    let total = distance.len() as u64;
    let generates = total == order;
    let report = BallReport {
        group: format!("Sp{}(F{})", 2 * group.n(), group.p()),
        group_order: order,
        generator_count: gens.len(),
        radii,
        diameter: generates.then(|| layers.len() - 1),
        exceeds_cutoff: exceeds_cutoff && !generates,
        stalled: !generates && !exceeds_cutoff,
    };
    BallSearch {
        layers,
        distance,
        report,
    }
}

/// [`bfs_balls_with_threads`] honoring `WORKER_COUNT`.
pub fn bfs_balls(group: &FiniteSp, gens: &[u128], max_radius: Option<usize>) -> Result<BallSearch, SearchError> {
    Ok(bfs_balls_with_threads(group, gens, max_radius, worker_count()?))
}

/// Subgroup generated by `gens`; stops early once it exceeds `limit` elements.
fn subgroup(group: &FiniteSp, gens: &[u128], limit: usize) -> FxHashSet<u128> {
    let mut h: FxHashSet<u128> = FxHashSet::default();
    let id = group.identity();
    h.insert(id);
    let mut frontier = vec![id];
    while !frontier.is_empty() && h.len() <= limit {
        let mut next = Vec::new();
        for &x in &frontier {
            for &g in gens {
                let y = group.mul(x, g);
                if h.insert(y) {
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    h
}

/// Whether the normal closure of `s` is the whole group, by incremental subgroup closure.
pub fn normal_closure_is_whole_group(group: &FiniteSp, s: &[u128]) -> bool {
    let id = group.identity();
    let order = group.order();
    // a subgroup with more than half the elements is everything
    let half = (order / 2) as usize;
    let mut gens: Vec<u128> = s.iter().copied().filter(|&x| x != id).collect();
    gens.sort_unstable();
    gens.dedup();
    loop {
        let h = subgroup(group, &gens, half);
        if h.len() > half {
            return true;
        }
        let missing = gens
            .iter()
            .flat_map(|&x| group.generators().iter().map(move |&g| (x, g)))
            .map(|(x, g)| group.conjugate(x, g))
            .find(|y| !h.contains(y));
        match missing {
            Some(y) => gens.push(y),
            None => return h.len() as u128 == order,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::fixed_space_dim;

    #[test]
    fn orders_from_enumeration() {
        for (n, p, expected) in [(1, 2, 6u128), (1, 3, 24), (2, 2, 720), (2, 3, 51840)] {
            let g = FiniteSp::new(n, p).unwrap();
            assert_eq!(g.order(), expected);
            let b = bfs_balls_with_threads(&g, g.generators(), None, Some(2));
            assert_eq!(b.report.radii.last().unwrap().1 as u128, expected);
            assert!(b.report.diameter.is_some());
        }
        assert_eq!(group_order(3, 2), 1_451_520);
    }

    #[test]
    fn keys_match_canonical_bytes() {
        for p in [2u64, 3, 5] {
            let g = FiniteSp::new(2, p).unwrap();
            let a = crate::symplectic::random_sp(2, g.ring(), 20, p);
            let k = g.encode(&a).unwrap();
            let mut bytes = a.canonical_bytes().unwrap();
            bytes.resize(16, 0);
            assert_eq!(k, u128::from_le_bytes(bytes.try_into().unwrap()));
            assert_eq!(g.decode(k), a);
            let b = crate::symplectic::random_sp(2, g.ring(), 20, p + 100);
            let kb = g.encode(&b).unwrap();
            assert_eq!(g.decode(g.mul(k, kb)), a.mul(&b));
            assert_eq!(g.decode(g.inverse(k)), a.inverse());
        }
    }

    #[test]
    fn transvection_class_in_sp4_f2() {
        let g = FiniteSp::new(2, 2).unwrap();
        let e = g.encode(&root_element(2, g.ring(), &RootIndex::long(1, true), &BigInt::from(1))).unwrap();
        let closure = conjugacy_closure(&g, &[e], 10_000).unwrap();
        // v -> v + <v, u> u for nonzero u in F_2^4
        let form = crate::symplectic::form_matrix(2, g.ring());
        let mut direct: Vec<u128> = (1u32..16)
            .map(|bits| {
                let u: Vec<BigInt> = (0..4).map(|i| BigInt::from((bits >> i) & 1)).collect();
                let rows: Vec<Vec<BigInt>> = (0..4)
                    .map(|i| {
                        (0..4)
                            .map(|j| {
                                let uj: BigInt = (0..4).map(|k| &u[k] * form.get(k, j)).sum();
                                BigInt::from(u8::from(i == j)) + &u[i] * uj
                            })
                            .collect()
                    })
                    .collect();
                g.encode(&SpMatrix::from_rows(2, g.ring(), &rows).unwrap()).unwrap()
            })
            .collect();
        direct.sort_unstable();
        assert_eq!(closure, direct);
        let conj = g.conjugate(e, g.generators()[1]);
        assert_eq!(conjugacy_closure(&g, &[conj], 10_000).unwrap().len(), 15);
        assert_eq!(conjugacy_closure(&g, &[g.identity()], 10).unwrap(), vec![g.identity()]);
    }

    #[test]
    fn sp4_f2_long_root_balls() {
        let g = FiniteSp::new(2, 2).unwrap();
        let e = g.encode(&root_element(2, g.ring(), &RootIndex::long(1, true), &BigInt::from(1))).unwrap();
        let gens = conjugacy_closure(&g, &[e], 10_000).unwrap();
        let b = bfs_balls_with_threads(&g, &gens, None, Some(1));
        let diameter = b.report.diameter.unwrap();
        assert!(diameter >= 4);
        for x in b.ball(3) {
            assert!(fixed_space_dim(&g.decode(x)).unwrap() >= 1);
        }
        let b4 = bfs_balls_with_threads(&g, &gens, None, Some(4));
        assert_eq!(b.report, b4.report);
        let full = bfs_balls_with_threads(&g, &g.generators().iter().copied().chain([g.identity()]).collect::<Vec<_>>(), None, None);
        let all: Vec<u128> = full.ball(100).collect();
        let b1 = bfs_balls_with_threads(&g, &all, None, None);
        assert_eq!(b1.report.diameter, Some(1));
    }

    #[test]
    fn normal_closures() {
        let g = FiniteSp::new(2, 3).unwrap();
        assert!(!normal_closure_is_whole_group(&g, &[g.identity()]));
        assert!(!normal_closure_is_whole_group(&g, &[g.minus_identity()]));
        assert!(normal_closure_is_whole_group(&g, &[g.generators()[0]]));
        let g2 = FiniteSp::new(2, 2).unwrap();
        assert!(normal_closure_is_whole_group(&g2, &[g2.generators()[0]]));
    }

    #[test]
    fn too_large_rejected() {
        assert!(matches!(FiniteSp::new(4, 5), Err(SearchError::TooLarge { .. })));
        assert!(matches!(FiniteSp::new(2, 4), Err(SearchError::NotPrime(4))));
    }
}
