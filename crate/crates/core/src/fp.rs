//! Dense univariate polynomials over a prime field, with deterministic
//! factorization (squarefree, distinct-degree and equal-degree splitting).

use crate::arith::{add_mod, inv_mod, mul_mod, sub_mod};

/// Polynomial over F_p, coefficients lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, c: vec![] }
    }

    pub fn one(p: u64) -> Self {
        FpPoly { p, c: vec![1 % p] }
    }

    /// The monomial `T`.
    pub fn x(p: u64) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial has degree `usize::MAX` sentinel avoided by callers.
    pub fn deg(&self) -> usize {
        assert!(!self.c.is_empty(), "degree of zero polynomial");
        self.c.len() - 1
    }

    pub fn lead(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lead(), self.p).expect("unit leading coefficient");
        self.scale(inv)
    }

    pub fn scale(&self, k: u64) -> Self {
        FpPoly::new(self.p, self.c.iter().map(|&x| mul_mod(x, k, self.p)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let v = (0..n)
            .map(|i| {
                add_mod(
                    *self.c.get(i).unwrap_or(&0),
                    *o.c.get(i).unwrap_or(&0),
                    self.p,
                )
            })
            .collect();
        FpPoly::new(self.p, v)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let v = (0..n)
            .map(|i| {
                sub_mod(
                    *self.c.get(i).unwrap_or(&0),
                    *o.c.get(i).unwrap_or(&0),
                    self.p,
                )
            })
            .collect();
        FpPoly::new(self.p, v)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(self.p);
        }
        let mut v = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                v[i + j] = add_mod(v[i + j], mul_mod(a, b, self.p), self.p);
            }
        }
        FpPoly::new(self.p, v)
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        if self.c.len() < d.c.len() {
            return (FpPoly::zero(p), self.clone());
        }
        let inv = inv_mod(d.lead(), p).expect("unit leading coefficient");
        let mut r = self.c.clone();
        let dd = d.deg();
        let mut q = vec![0u64; r.len() - dd];
        for i in (0..q.len()).rev() {
            let coef = mul_mod(r[i + dd], inv, p);
            q[i] = coef;
            if coef != 0 {
                for (j, &b) in d.c.iter().enumerate() {
                    r[i + j] = sub_mod(r[i + j], mul_mod(coef, b, p), p);
                }
            }
        }
        (FpPoly::new(p, q), FpPoly::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        let v = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| mul_mod(a, i as u64 % p, p))
            .collect();
        FpPoly::new(p, v)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0;
        for &a in self.c.iter().rev() {
            acc = add_mod(mul_mod(acc, x, self.p), a, self.p);
        }
        acc
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut r = FpPoly::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        r
    }

    /// `T^(p^k) mod m` by repeated Frobenius.
    fn frobenius_power(&self, m: &Self) -> Self {
        self.pow_mod(self.p as u128, m)
    }

    /// p-th root of a polynomial whose derivative vanishes.
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        let v = self.c.iter().step_by(p).copied().collect();
        FpPoly::new(self.p, v)
    }

    /// Complete factorization into monic irreducibles with multiplicities,
    /// sorted by (degree, coefficients). The input must be nonzero.
    pub fn factor(&self) -> Vec<(FpPoly, u32)> {
        assert!(!self.is_zero(), "factor of zero polynomial");
        let f = self.monic();
        let mut out: Vec<(FpPoly, u32)> = Vec::new();
        for (g, m) in squarefree_decomposition(&f) {
            for (deg, part) in distinct_degree(&g) {
                for h in equal_degree(&part, deg) {
                    out.push((h, m));
                }
            }
        }
        out.sort_by(|a, b| (a.0.c.len(), &a.0.c).cmp(&(b.0.c.len(), &b.0.c)));
        // merge equal factors produced by separate squarefree layers
        let mut merged: Vec<(FpPoly, u32)> = Vec::new();
        for (g, m) in out {
            match merged.last_mut() {
                Some((h, k)) if *h == g => *k += m,
                _ => merged.push((g, m)),
            }
        }
        merged
    }
}

/// Squarefree decomposition: list of (squarefree factor, multiplicity).
fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let p = f.p;
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let d = f.derivative();
    if d.is_zero() {
        for (g, m) in squarefree_decomposition(&f.pth_root()) {
            out.push((g, m * p as u32));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.divrem(&c).0;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.divrem(&y).0;
        if !z.is_one() {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.divrem(&w).0;
    }
    if !c.is_one() {
        for (g, m) in squarefree_decomposition(&c.pth_root().monic()) {
            out.push((g, m * p as u32));
        }
    }
    out
}

/// Distinct-degree factorization of a squarefree monic polynomial.
fn distinct_degree(f: &FpPoly) -> Vec<(usize, FpPoly)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = FpPoly::x(p);
    let mut h = x.rem(&rest);
    let mut d = 0;
    while !rest.is_one() && rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = h.frobenius_power(&rest);
        let g = rest.gcd(&h.sub(&x));
        if !g.is_one() {
            out.push((d, g.clone()));
            rest = rest.divrem(&g).0;
            h = h.rem(&rest);
        }
    }
    if !rest.is_one() {
        out.push((rest.deg(), rest.monic()));
    }
    out
}

/// Equal-degree splitting with a deterministic sequence of trial polynomials.
fn equal_degree(f: &FpPoly, d: usize) -> Vec<FpPoly> {
    if f.deg() == d {
        return vec![f.monic()];
    }
    let p = f.p;
    let n = f.deg();
    let mut seed: u64 = 1;
    loop {
        // trial polynomial of degree < n built from a counter
        let mut coeffs = Vec::with_capacity(n);
        let mut s = seed;
        for _ in 0..n {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            coeffs.push((s >> 33) % p);
        }
        seed += 1;
        let a = FpPoly::new(p, coeffs);
        if a.is_zero() || a.deg() == 0 {
            continue;
        }
        let g = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            f.gcd(&acc)
        } else {
            let e = ((p as u128).pow(d as u32) - 1) / 2;
            let b = a.pow_mod(e, f).sub(&FpPoly::one(p));
            f.gcd(&b)
        };
        if !g.is_one() && g.deg() < n {
            let h = f.divrem(&g).0.monic();
            let mut out = equal_degree(&g, d);
            out.extend(equal_degree(&h, d));
            return out;
        }
    }
}

/// Monic polynomials of degree `n` over F_p enumerated by index in `[0, p^n)`.
pub fn monic_from_index(p: u64, n: usize, mut idx: u64) -> FpPoly {
    let mut c = vec![0u64; n + 1];
    c[n] = 1;
    for slot in c.iter_mut().take(n) {
        *slot = idx % p;
        idx /= p;
    }
    FpPoly::new(p, c)
}

/// Whether `f` has a repeated factor over F_p.
pub fn is_squarefree(f: &FpPoly) -> bool {
    if f.deg() == 0 {
        return true;
    }
    let d = f.derivative();
    if d.is_zero() {
        return false;
    }
    f.gcd(&d).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(fs: &[(FpPoly, u32)], p: u64) -> FpPoly {
        let mut acc = FpPoly::one(p);
        for (g, m) in fs {
            for _ in 0..*m {
                acc = acc.mul(g);
            }
        }
        acc
    }

    fn irreducible_brute(g: &FpPoly) -> bool {
        let n = g.deg();
        let p = g.p;
        for d in 1..=n / 2 {
            for i in 0..p.pow(d as u32) {
                let h = monic_from_index(p, d, i);
                if g.rem(&h).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn factorization_reproduces_input() {
        for p in [2u64, 3, 5, 7] {
            let limit = if p <= 3 { 6 } else { 4 };
            for n in 1..=limit {
                for i in 0..p.pow(n as u32) {
                    let f = monic_from_index(p, n, i);
                    let fs = f.factor();
                    assert_eq!(product(&fs, p), f, "p={p} f={:?}", f.c);
                    for (g, _) in &fs {
                        assert!(irreducible_brute(g), "reducible factor {:?}", g.c);
                    }
                    for w in fs.windows(2) {
                        assert_ne!(w[0].0, w[1].0);
                    }
                }
            }
        }
    }

    #[test]
    fn characteristic_power_multiplicities() {
        // (T^2+1)^3 (T+1)^2 over F_3
        let p = 3;
        let a = FpPoly::new(p, vec![1, 0, 1]);
        let b = FpPoly::new(p, vec![1, 1]);
        let f = a.mul(&a).mul(&a).mul(&b).mul(&b);
        let fs = f.factor();
        assert_eq!(fs, vec![(b, 2), (a, 3)]);
    }

    #[test]
    fn larger_prime_split() {
        let p = 1_000_003;
        // (T-1)(T-2)(T-3)(T^2 - 5) with 5 a nonresidue?
        let mut f = FpPoly::one(p);
        for r in 1..=3u64 {
            f = f.mul(&FpPoly::new(p, vec![p - r, 1]));
        }
        f = f.mul(&FpPoly::new(p, vec![p - 2, 0, 1]));
        let fs = f.factor();
        let degs: u32 = fs.iter().map(|(g, m)| g.deg() as u32 * m).sum();
        assert_eq!(degs, 5);
        assert_eq!(product(&fs, p), f);
    }
}
