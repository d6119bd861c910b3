//! Square matrices over a [`RingDesc`], with canonical entries.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::rings::RingDesc;

/// Dense square matrix, row-major, entries kept reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    dim: usize,
    ring: RingDesc,
    data: Vec<BigInt>,
}

/// Largest modulus for which products are accumulated in machine words.
const FAST_MODULUS_LIMIT: u64 = 1 << 31;

impl Mat {
    pub fn zero(dim: usize, ring: &RingDesc) -> Self {
        Mat {
            dim,
            ring: ring.clone(),
            data: vec![BigInt::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize, ring: &RingDesc) -> Self {
        let mut m = Mat::zero(dim, ring);
        for i in 0..dim {
            m.data[i * dim + i] = BigInt::one();
        }
        m
    }

    /// Builds from rows; entries are reduced into the ring. Panics on ragged input.
    pub fn from_rows(ring: &RingDesc, rows: &[Vec<BigInt>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.len(), dim, "matrix rows must be square");
            data.extend(r.iter().map(|x| ring.reduce(x)));
        }
        Mat {
            dim,
            ring: ring.clone(),
            data,
        }
    }

    pub fn from_i64(ring: &RingDesc, rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Mat::from_rows(ring, &rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ring(&self) -> &RingDesc {
        &self.ring
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.dim + j] = self.ring.reduce(&v);
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let v = self.get(i, j);
                if i == j {
                    v.is_one()
                } else {
                    v.is_zero()
                }
            })
        })
    }

    fn fast_modulus(&self) -> Option<u64> {
        self.ring
            .modulus()
            .and_then(|m| m.to_u64())
            .filter(|&m| m <= FAST_MODULUS_LIMIT)
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        assert_eq!(self.ring, o.ring, "ring mismatch");
        let d = self.dim;
        if let Some(m) = self.fast_modulus() {
            let a: Vec<u64> = self.data.iter().map(|x| x.to_u64().unwrap_or(0)).collect();
            let b: Vec<u64> = o.data.iter().map(|x| x.to_u64().unwrap_or(0)).collect();
            let mut data = Vec::with_capacity(d * d);
            for i in 0..d {
                for j in 0..d {
                    let mut acc: u64 = 0;
                    for k in 0..d {
                        let av = a[i * d + k];
                        if av != 0 {
                            // both factors < 2^31, so a product fits and one reduction keeps acc bounded
                            acc = (acc + av * b[k * d + j]) % m;
                        }
                    }
                    data.push(BigInt::from(acc));
                }
            }
            return Mat {
                dim: d,
                ring: self.ring.clone(),
                data,
            };
        }
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = BigInt::zero();
                for k in 0..d {
                    let av = &self.data[i * d + k];
                    if !av.is_zero() {
                        acc += av * &o.data[k * d + j];
                    }
                }
                self.ring.reduce_in_place(&mut acc);
                data.push(acc);
            }
        }
        Mat {
            dim: d,
            ring: self.ring.clone(),
            data,
        }
    }

    pub fn transpose(&self) -> Mat {
        let d = self.dim;
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                data.push(self.data[j * d + i].clone());
            }
        }
        Mat {
            dim: d,
            ring: self.ring.clone(),
            data,
        }
    }

    pub fn add(&self, o: &Mat) -> Mat {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        self.zip(o, |a, b| a - b)
    }

    pub fn neg(&self) -> Mat {
        self.map(|a| -a)
    }

    pub fn scale(&self, s: &BigInt) -> Mat {
        self.map(|a| a * s)
    }

    fn map(&self, f: impl Fn(&BigInt) -> BigInt) -> Mat {
        Mat {
            dim: self.dim,
            ring: self.ring.clone(),
            data: self.data.iter().map(|a| self.ring.reduce(&f(a))).collect(),
        }
    }

    fn zip(&self, o: &Mat, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Mat {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        assert_eq!(self.ring, o.ring, "ring mismatch");
        Mat {
            dim: self.dim,
            ring: self.ring.clone(),
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| self.ring.reduce(&f(a, b)))
                .collect(),
        }
    }

    /// The `k x k` block starting at `(r, c)`.
    pub fn block(&self, r: usize, c: usize, k: usize) -> Mat {
        let mut out = Mat::zero(k, &self.ring);
        for i in 0..k {
            for j in 0..k {
                out.data[i * k + j] = self.get(r + i, c + j).clone();
            }
        }
        out
    }

    pub fn set_block(&mut self, r: usize, c: usize, b: &Mat) {
        for i in 0..b.dim {
            for j in 0..b.dim {
                self.data[(r + i) * self.dim + c + j] = b.get(i, j).clone();
            }
        }
    }

    /// Determinant via fraction-free elimination on integer lifts.
    pub fn det(&self) -> BigInt {
        let d = self.dim;
        if d == 0 {
            return BigInt::one();
        }
        let mut a: Vec<BigInt> = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..d {
            if a[k * d + k].is_zero() {
                match (k + 1..d).find(|&r| !a[r * d + k].is_zero()) {
                    Some(r) => {
                        for j in 0..d {
                            a.swap(k * d + j, r * d + j);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let v = &a[k * d + k] * &a[i * d + j] - &a[i * d + k] * &a[k * d + j];
                    a[i * d + j] = v / &prev;
                }
            }
            prev = a[k * d + k].clone();
        }
        self.ring.reduce(&(sign * &a[(d - 1) * d + d - 1]))
    }

    /// Inverse by unimodular row elimination, independent of any symplectic structure.
    ///
    /// Pivots are produced by Bézout combinations on integer lifts, so the procedure
    /// works over `Z/m` even when no column entry is a unit. Returns `None` if singular.
    pub fn inverse_by_elimination(&self) -> Option<Mat> {
        let d = self.dim;
        let ring = &self.ring;
        let mut a = self.data.clone();
        let mut inv = Mat::identity(d, ring).data;
        let row_op = |m: &mut Vec<BigInt>, r1: usize, r2: usize, c: [&BigInt; 4]| {
            // (row r1, row r2) <- [[c0, c1], [c2, c3]] * (row r1, row r2)
            for j in 0..d {
                let x = m[r1 * d + j].clone();
                let y = m[r2 * d + j].clone();
                m[r1 * d + j] = ring.reduce(&(c[0] * &x + c[1] * &y));
                m[r2 * d + j] = ring.reduce(&(c[2] * &x + c[3] * &y));
            }
        };
        for k in 0..d {
            for r in k + 1..d {
                let x = a[k * d + k].clone();
                let y = a[r * d + k].clone();
                if y.is_zero() {
                    continue;
                }
                let e = x.extended_gcd(&y);
                let (g, u, v) = (e.gcd, e.x, e.y);
                let p = -(&y / &g);
                let q = &x / &g;
                row_op(&mut a, k, r, [&u, &v, &p, &q]);
                row_op(&mut inv, k, r, [&u, &v, &p, &q]);
            }
            let piv = a[k * d + k].clone();
            let pinv = ring.inverse(&piv).ok()?;
            for j in 0..d {
                a[k * d + j] = ring.reduce(&(&a[k * d + j] * &pinv));
                inv[k * d + j] = ring.reduce(&(&inv[k * d + j] * &pinv));
            }
            for r in 0..d {
                if r == k || a[r * d + k].is_zero() {
                    continue;
                }
                let f = a[r * d + k].clone();
                for j in 0..d {
                    a[r * d + j] = ring.reduce(&(&a[r * d + j] - &f * &a[k * d + j]));
                    inv[r * d + j] = ring.reduce(&(&inv[r * d + j] - &f * &inv[k * d + j]));
                }
            }
        }
        Some(Mat {
            dim: d,
            ring: ring.clone(),
            data: inv,
        })
    }

    /// Reduces every entry into another ring (used for reduction modulo a prime).
    pub fn change_ring(&self, ring: &RingDesc) -> Mat {
        Mat {
            dim: self.dim,
            ring: ring.clone(),
            data: self.data.iter().map(|x| ring.reduce(x)).collect(),
        }
    }

    /// Rank over the prime field `F_p`.
    pub fn rank_mod_prime(&self, p: u64) -> usize {
        let d = self.dim;
        let pb = BigInt::from(p);
        let mut a: Vec<u64> = self
            .data
            .iter()
            .map(|x| x.mod_floor(&pb).to_u64().unwrap_or(0))
            .collect();
        let mut rank = 0;
        for c in 0..d {
            let Some(piv) = (rank..d).find(|&r| a[r * d + c] != 0) else {
                continue;
            };
            for j in 0..d {
                a.swap(rank * d + j, piv * d + j);
            }
            let inv = mod_inverse_u64(a[rank * d + c], p);
            for j in 0..d {
                a[rank * d + j] = a[rank * d + j] * inv % p;
            }
            for r in 0..d {
                if r != rank && a[r * d + c] != 0 {
                    let f = a[r * d + c];
                    for j in 0..d {
                        a[r * d + j] = (a[r * d + j] + (p - f) * a[rank * d + j]) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

pub(crate) fn mod_inverse_u64(a: u64, p: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(p as i128));
    e.x.rem_euclid(p as i128) as u64
}

/// An element of `SL_n` that sends `v` to `(g, 0, ..., 0)`, with `g` the integer gcd of the lifts.
///
/// Built from 2x2 Bézout rotations; returns `(D, g)` with `D v = g e_1` exactly.
pub(crate) fn compress_vector(ring: &RingDesc, v: &[BigInt]) -> (Mat, BigInt) {
    let k = v.len();
    let mut d = Mat::identity(k, ring);
    let mut w: Vec<BigInt> = v.iter().map(|x| ring.reduce(x)).collect();
    for j in 1..k {
        if w[j].is_zero() {
            continue;
        }
        let (a, b) = (w[0].clone(), w[j].clone());
        let (rot, g) = rotation(&a, &b);
        apply_rows(&mut d, 0, j, &rot);
        w[0] = ring.reduce(&g);
        w[j] = BigInt::zero();
    }
    (d, w[0].clone())
}

/// A determinant-one integer matrix `[[u, v], [x, y]]` with `u a + v b = g`, `x a + y b = 0`.
pub(crate) fn rotation(a: &BigInt, b: &BigInt) -> ([BigInt; 4], BigInt) {
    let e = a.extended_gcd(b);
    let g = e.gcd;
    if g.is_zero() {
        return ([BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()], g);
    }
    let x = -(b / &g);
    let y = a / &g;
    ([e.x, e.y, x, y], g)
}

/// Left-multiplies rows `(r1, r2)` of `m` by the 2x2 block `c`.
pub(crate) fn apply_rows(m: &mut Mat, r1: usize, r2: usize, c: &[BigInt; 4]) {
    let d = m.dim;
    for j in 0..d {
        let x = m.data[r1 * d + j].clone();
        let y = m.data[r2 * d + j].clone();
        m.data[r1 * d + j] = m.ring.reduce(&(&c[0] * &x + &c[1] * &y));
        m.data[r2 * d + j] = m.ring.reduce(&(&c[2] * &x + &c[3] * &y));
    }
}

/// Embeds the 2x2 block `c` acting on coordinates `(i, j)` into the identity of size `dim`.
pub(crate) fn embed_2x2(dim: usize, ring: &RingDesc, i: usize, j: usize, c: &[BigInt; 4]) -> Mat {
    let mut m = Mat::identity(dim, ring);
    m.set(i, i, c[0].clone());
    m.set(i, j, c[1].clone());
    m.set(j, i, c[2].clone());
    m.set(j, j, c[3].clone());
    m
}

/// Inverse of a determinant-one 2x2 block.
pub(crate) fn inverse_2x2(c: &[BigInt; 4]) -> [BigInt; 4] {
    [c[3].clone(), -&c[1], -&c[2], c[0].clone()]
}
