//! Small finite fields `F_{p^k}` with full addition and multiplication
//! tables, and point enumeration on projective spaces over them.

use crate::error::{Error, Result};
use crate::fp::{monic_from_index, FpPoly};

/// Largest field order for which tables are built.
pub const MAX_ORDER: usize = 4096;

/// `F_{p^k}` as `F_p[t]/(m)`; element `i` is the polynomial whose base-p
/// digits are its coefficients, so `0..p` is the prime field.
#[derive(Clone, Debug)]
pub struct Gf {
    pub p: u64,
    pub k: u32,
    pub q: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

fn digits(p: u64, k: u32, mut i: usize) -> Vec<u64> {
    let mut c = Vec::with_capacity(k as usize);
    for _ in 0..k {
        c.push(i as u64 % p);
        i /= p as usize;
    }
    c
}

fn undigits(p: u64, c: &[u64]) -> usize {
    c.iter().rev().fold(0usize, |acc, &d| acc * p as usize + d as usize)
}

/// The first monic irreducible of degree `k` in index order.
pub fn irreducible_poly(p: u64, k: u32) -> FpPoly {
    (0..p.pow(k))
        .map(|i| monic_from_index(p, k as usize, i))
        .find(|f| {
            let fac = f.factor();
            fac.len() == 1 && fac[0].1 == 1
        })
        .expect("irreducibles exist in every degree")
}

impl Gf {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !crate::arith::is_prime(p) || k == 0 {
            return Err(Error::InvalidInput(format!("no field of order {p}^{k}")));
        }
        let q = p.checked_pow(k).filter(|&q| q as usize <= MAX_ORDER);
        let q = q.ok_or_else(|| Error::InvalidInput(format!("field {p}^{k} too large for tables")))? as usize;
        let m = irreducible_poly(p, k);
        let polys: Vec<FpPoly> = (0..q).map(|i| FpPoly::new(p, digits(p, k, i))).collect();
        let encode = |f: &FpPoly| {
            let mut c = f.c.clone();
            c.resize(k as usize, 0);
            undigits(p, &c)
        };
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for i in 0..q {
            for j in i..q {
                let s = encode(&polys[i].add(&polys[j])) as u16;
                let t = encode(&polys[i].mul(&polys[j]).rem(&m)) as u16;
                add[i * q + j] = s;
                add[j * q + i] = s;
                mul[i * q + j] = t;
                mul[j * q + i] = t;
            }
        }
        let neg = (0..q).map(|i| (0..q).find(|&j| add[i * q + j] == 0).expect("additive inverse") as u16).collect();
        let inv = (0..q).map(|i| (1..q).find(|&j| mul[i * q + j] == 1).unwrap_or(0) as u16).collect();
        Ok(Gf { p, k, q, add, mul, neg, inv })
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; 0 maps to 0.
    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        self.inv[a as usize]
    }

    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, v: i64) -> u16 {
        v.rem_euclid(self.p as i64) as u16
    }

    /// Points of `P^n` with first nonzero coordinate 1, calling `f` on each.
    pub fn for_each_projective_point(&self, n: usize, mut f: impl FnMut(&[u16])) {
        let mut pt = vec![0u16; n + 1];
        for lead in 0..=n {
            // coordinates before `lead` are 0, `lead` is 1, later ones free
            let free = n - lead;
            let total = self.q.pow(free as u32);
            for idx in 0..total {
                pt.iter_mut().for_each(|c| *c = 0);
                pt[lead] = 1;
                let mut r = idx;
                for slot in pt[lead + 1..].iter_mut() {
                    *slot = (r % self.q) as u16;
                    r /= self.q;
                }
                f(&pt);
            }
        }
    }
}

/// Roots of every monic quadratic `t^2 + bt + c` over a field, by table.
#[derive(Clone, Debug)]
pub struct QuadraticRoots {
    q: usize,
    count: Vec<u8>,
    roots: Vec<[u16; 2]>,
}

impl QuadraticRoots {
    pub fn new(gf: &Gf) -> Self {
        let q = gf.q;
        let mut count = vec![0u8; q * q];
        let mut roots = vec![[0u16; 2]; q * q];
        for t in 0..q as u16 {
            let t2 = gf.mul(t, t);
            for b in 0..q as u16 {
                let c = gf.neg(gf.add(t2, gf.mul(b, t)));
                let i = b as usize * q + c as usize;
                let n = count[i] as usize;
                if n == 0 || roots[i][0] != t {
                    roots[i][n] = t;
                    count[i] += 1;
                }
            }
        }
        QuadraticRoots { q, count, roots }
    }

    #[inline]
    pub fn roots(&self, b: u16, c: u16) -> &[u16] {
        let i = b as usize * self.q + c as usize;
        &self.roots[i][..self.count[i] as usize]
    }
}

/// Orbit sizes from point counts `N_1..N_K`: `N_k = Σ_{d | k} M_d` where
/// `M_d` counts points of exact degree `d`. Returns the partition of the
/// total, or `None` if some `M_d` is negative or not divisible by `d`.
pub fn orbit_partition(counts: &[u64]) -> Option<Vec<u32>> {
    let mut exact: Vec<i64> = Vec::with_capacity(counts.len());
    for k in 1..=counts.len() {
        let lower: i64 = (1..k).filter(|d| k % d == 0).map(|d| exact[d - 1]).sum();
        exact.push(counts[k - 1] as i64 - lower);
    }
    let mut parts = Vec::new();
    for (i, &m) in exact.iter().enumerate() {
        let d = i as i64 + 1;
        if m < 0 || m % d != 0 {
            return None;
        }
        parts.extend(std::iter::repeat_n(d as u32, (m / d) as usize));
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Some(parts)
}
