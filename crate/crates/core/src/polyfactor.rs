//! Monic integer polynomials: discriminants, heights, reduction modulo
//! primes, splitting symbols and the Dedekind maximality criterion.

use crate::arith::{mobius, residue, Int};
use crate::conjugacy::{partitions, CycleType};
use crate::error::{Error, Result};
use crate::fp::FpPoly;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// `T^n + a_1 T^{n-1} + ... + a_n` with coefficients in `T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonicPoly<T: Int> {
    coeffs: Vec<T>,
}

impl<T: Int> MonicPoly<T> {
    /// Build from `a_1..a_n`.
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("monic polynomial needs degree >= 1".into()));
        }
        Ok(MonicPoly { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| T::from_i64(c).expect("coefficient fits")).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `a_1..a_n`.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficients lowest degree first, including the leading 1.
    pub fn dense(&self) -> Vec<T> {
        let mut v: Vec<T> = self.coeffs.iter().rev().cloned().collect();
        v.push(T::one());
        v
    }

    pub fn to_bigint(&self) -> MonicPoly<BigInt> {
        MonicPoly {
            coeffs: self.coeffs.iter().map(|c| BigInt::from(c.to_i128().expect("fits i128"))).collect(),
        }
    }

    pub fn reduce_mod(&self, p: u64) -> FpPoly {
        FpPoly::new(p, self.dense().iter().map(|c| residue(c, p)).collect())
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::one();
        for a in &self.coeffs {
            acc = acc * x.clone() + a.clone();
        }
        acc
    }
}

impl<T: Int> fmt::Display for MonicPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        write!(f, "T^{n}")?;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let e = n - i - 1;
            let sign = if a.is_negative() { '-' } else { '+' };
            let mag = a.abs();
            let mono = match e {
                0 => String::new(),
                1 => "T".into(),
                _ => format!("T^{e}"),
            };
            if e > 0 && mag.is_one() {
                write!(f, " {sign} {mono}")?;
            } else {
                write!(f, " {sign} {mag}{mono}")?;
            }
        }
        Ok(())
    }
}

pub type MonicPolyZ = MonicPoly<BigInt>;
pub type MonicPoly64 = MonicPoly<i64>;

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn bareiss_det<T: Int>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].clone() * m[k][k].clone() - m[i][k].clone() * m[k][j].clone();
                m[i][j] = v / prev.clone();
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Resultant of two polynomials given lowest degree first, via the Sylvester matrix.
pub fn resultant<T: Int>(f: &[T], g: &[T]) -> T {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return T::one();
    }
    let mut s = vec![vec![T::zero(); size]; size];
    for r in 0..n {
        for (j, c) in f.iter().rev().enumerate() {
            s[r][r + j] = c.clone();
        }
    }
    for r in 0..m {
        for (j, c) in g.iter().rev().enumerate() {
            s[n + r][r + j] = c.clone();
        }
    }
    bareiss_det(s)
}

/// Discriminant `(-1)^{n(n-1)/2} Res(f, f')` of a monic polynomial.
pub fn discriminant_monic<T: Int>(f: &MonicPoly<T>) -> T {
    let dense = f.dense();
    let n = f.degree();
    if n == 1 {
        return T::one();
    }
    let deriv: Vec<T> = dense
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.clone() * T::from_usize(i).expect("small"))
        .collect();
    let r = resultant(&dense, &deriv);
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

/// Whether `h(f) < x`, i.e. `|a_i|^{n(n-1)} < x^i` for every i.
pub fn height_lt<T: Int>(f: &MonicPoly<T>, x: &BigInt) -> bool {
    assert!(x >= &BigInt::one(), "height bound must be >= 1");
    let n = f.degree() as u32;
    f.coeffs.iter().enumerate().all(|(i, a)| {
        let a = BigInt::from(a.to_i128().expect("fits i128")).abs();
        Pow::pow(&a, n * (n - 1)) < Pow::pow(x, (i + 1) as u32)
    })
}

/// Factorization of a polynomial modulo a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpFactorization {
    pub p: u64,
    pub factors: Vec<(FpPoly, u32)>,
}

impl FpFactorization {
    pub fn product(&self) -> FpPoly {
        let mut acc = FpPoly::one(self.p);
        for (g, m) in &self.factors {
            for _ in 0..*m {
                acc = acc.mul(g);
            }
        }
        acc
    }

    pub fn symbol(&self) -> SplittingSymbol {
        SplittingSymbol::new(self.factors.iter().map(|(g, m)| (*m, g.deg() as u32)).collect())
    }
}

pub fn factor_mod_p<T: Int>(f: &MonicPoly<T>, p: u64) -> FpFactorization {
    FpFactorization { p, factors: f.reduce_mod(p).factor() }
}

/// Decomposition of a prime: multiset of (ramification index e, residue degree f).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SplittingSymbol {
    factors: Vec<(u32, u32)>,
}

impl SplittingSymbol {
    /// Build from (e, f) pairs in any order.
    pub fn new(mut factors: Vec<(u32, u32)>) -> Self {
        factors.sort_by(|a, b| (b.1, b.0).cmp(&(a.1, a.0)));
        SplittingSymbol { factors }
    }

    /// Unramified symbol with the given residue degrees.
    pub fn unramified(degrees: &[u32]) -> Self {
        Self::new(degrees.iter().map(|&f| (1, f)).collect())
    }

    pub fn from_cycle_type(t: &CycleType) -> Self {
        Self::unramified(&t.parts)
    }

    pub fn factors(&self) -> &[(u32, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|&(e, f)| e * f).sum()
    }

    pub fn is_unramified(&self) -> bool {
        self.factors.iter().all(|&(e, _)| e == 1)
    }

    pub fn is_totally_ramified(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].0 == self.degree()
    }

    /// Frobenius cycle type of an unramified symbol.
    pub fn cycle_type(&self) -> Option<CycleType> {
        if self.is_unramified() {
            CycleType::new(self.factors.iter().map(|&(_, f)| f).collect()).ok()
        } else {
            None
        }
    }

    /// Conventional notation, e.g. `(1^2 1)` or `(21)`.
    pub fn pretty(&self) -> String {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(e, f)| if e == 1 { f.to_string() } else { format!("{f}^{e}") })
            .collect();
        let sep = if self.factors.iter().any(|&(e, f)| e > 1 || f >= 10) { " " } else { "" };
        format!("({})", parts.join(sep))
    }
}

impl fmt::Display for SplittingSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|(e, d)| format!("{e}:{d}")).collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl serde::Serialize for SplittingSymbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for SplittingSymbol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for part in s.split('+') {
            let (e, f) = part.split_once(':').ok_or_else(|| Error::UnknownSymbol(s.into()))?;
            let e: u32 = e.trim().parse().map_err(|_| Error::UnknownSymbol(s.into()))?;
            let f: u32 = f.trim().parse().map_err(|_| Error::UnknownSymbol(s.into()))?;
            if e == 0 || f == 0 {
                return Err(Error::UnknownSymbol(s.into()));
            }
            out.push((e, f));
        }
        Ok(SplittingSymbol::new(out))
    }
}

pub fn splitting_symbol<T: Int>(f: &MonicPoly<T>, p: u64) -> Result<SplittingSymbol> {
    if discriminant_monic(f).is_zero() {
        return Err(Error::ZeroDiscriminant);
    }
    if !is_p_maximal(f, p)? {
        return Err(Error::NotPMaximal(p));
    }
    Ok(factor_mod_p(f, p).symbol())
}

/// Dedekind criterion: whether `Z[T]/f` is maximal at `p`.
pub fn is_p_maximal<T: Int>(f: &MonicPoly<T>, p: u64) -> Result<bool> {
    if discriminant_monic(f).is_zero() {
        return Err(Error::ZeroDiscriminant);
    }
    Ok(dedekind_maximal(f, p))
}

/// Dedekind test without the discriminant precondition.
pub fn dedekind_maximal<T: Int>(f: &MonicPoly<T>, p: u64) -> bool {
    assert!(p < (1 << 31), "prime too large for the word-size Dedekind test");
    let fbar = f.reduce_mod(p);
    let fac = fbar.factor();
    if fac.iter().all(|(_, m)| *m == 1) {
        return true;
    }
    let mut g = FpPoly::one(p);
    for (gi, _) in &fac {
        g = g.mul(gi);
    }
    let h = fbar.divrem(&g).0;
    let p2 = p * p;
    let lift_f: Vec<i128> = f.dense().iter().map(|c| residue(c, p2) as i128).collect();
    let mut gh = vec![0i128; g.c.len() + h.c.len() - 1];
    for (i, &a) in g.c.iter().enumerate() {
        for (j, &b) in h.c.iter().enumerate() {
            gh[i + j] += a as i128 * b as i128;
        }
    }
    let big_f: Vec<u64> = gh
        .iter()
        .zip(lift_f.iter())
        .map(|(&x, &y)| {
            let d = x - y;
            debug_assert_eq!(d.rem_euclid(p as i128), 0);
            (d / p as i128).rem_euclid(p as i128) as u64
        })
        .collect();
    let big_f = FpPoly::new(p, big_f);
    let t = big_f.gcd(&g).gcd(&h);
    t.is_one()
}

/// Number of monic irreducible polynomials of degree `k` over F_p.
pub fn necklace_count(p: u64, k: u32) -> BigInt {
    let mut acc = BigInt::zero();
    for d in 1..=k {
        if k.is_multiple_of(d) {
            acc += BigInt::from(mobius(d as u64)) * Pow::pow(&BigInt::from(p), k / d);
        }
    }
    acc / BigInt::from(k)
}

fn binomial(n: &BigInt, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - BigInt::from(i)) / BigInt::from(i + 1);
    }
    acc
}

/// Number of squarefree monic degree-n polynomials over F_p with factor degrees `tau`.
pub fn exact_type_count(n: u32, p: u64, tau: &CycleType) -> BigUint {
    assert_eq!(tau.n(), n, "cycle type must partition n");
    let mut acc = BigInt::one();
    for (k, m) in tau.multiplicities() {
        acc *= binomial(&necklace_count(p, k), m);
    }
    acc.to_biguint().expect("count is nonnegative")
}

/// `theta_K(p^m)`: sum of residue degrees dividing m, minus one.
pub fn theta_coefficient(s: &SplittingSymbol, m: u32) -> i64 {
    assert!(m >= 1, "theta needs m >= 1");
    s.factors.iter().filter(|&&(_, f)| m.is_multiple_of(f)).map(|&(_, f)| f as i64).sum::<i64>() - 1
}

type Series = Vec<BigRational>;

fn series_mul(a: &Series, b: &Series, len: usize) -> Series {
    let mut out = vec![BigRational::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn geometric(step: usize, len: usize) -> Series {
    (0..len)
        .map(|i| if i % step == 0 { BigRational::one() } else { BigRational::zero() })
        .collect()
}

fn series_exp(a: &Series, len: usize) -> Series {
    // b' = a' b with b(0) = 1 and a(0) = 0
    let mut b = vec![BigRational::zero(); len];
    b[0] = BigRational::one();
    for k in 1..len {
        let mut s = BigRational::zero();
        for j in 1..=k {
            s += BigRational::from_integer(BigInt::from(j)) * &a[j] * &b[k - j];
        }
        b[k] = s / BigRational::from_integer(BigInt::from(k));
    }
    b
}

/// Verify `zeta_p(u) L_p(u) = zeta_{K,p}(u)` through `u^precision`, where
/// `L_p = exp(sum theta(p^k) u^k / k)`.
pub fn euler_factor_check(s: &SplittingSymbol, precision: usize) -> Result<bool> {
    if precision > 30 {
        return Err(Error::InvalidInput("precision must be at most 30".into()));
    }
    let len = precision + 1;
    let mut log = vec![BigRational::zero(); len];
    for (k, slot) in log.iter_mut().enumerate().skip(1) {
        *slot = BigRational::new(BigInt::from(theta_coefficient(s, k as u32)), BigInt::from(k));
    }
    let l = series_exp(&log, len);
    let lhs = series_mul(&geometric(1, len), &l, len);
    let mut rhs = vec![BigRational::zero(); len];
    rhs[0] = BigRational::one();
    for &(_, f) in &s.factors {
        rhs = series_mul(&rhs, &geometric(f as usize, len), len);
    }
    if let Some(k) = (0..len).find(|&k| lhs[k] != rhs[k]) {
        return Err(Error::EulerFactorMismatch(k));
    }
    if len > 2 {
        let t1 = BigRational::from_integer(theta_coefficient(s, 1).into());
        let t2 = BigRational::from_integer(theta_coefficient(s, 2).into());
        if t1 != l[1] {
            return Err(Error::EulerFactorMismatch(1));
        }
        let two = BigRational::from_integer(2.into());
        if t2 != two * &l[2] - &l[1] * &l[1] {
            return Err(Error::EulerFactorMismatch(2));
        }
    }
    Ok(true)
}

/// Every splitting symbol of degree n (all (e,f) multisets with sum e*f = n).
pub fn all_symbols(n: u32) -> Vec<SplittingSymbol> {
    let mut items: Vec<(u32, u32)> = Vec::new();
    for e in 1..=n {
        for f in 1..=n / e {
            items.push((e, f));
        }
    }
    let mut out = BTreeSet::new();
    fn rec(rem: u32, start: usize, items: &[(u32, u32)], cur: &mut Vec<(u32, u32)>, out: &mut BTreeSet<SplittingSymbol>) {
        if rem == 0 {
            out.insert(SplittingSymbol::new(cur.clone()));
            return;
        }
        for i in start..items.len() {
            let (e, f) = items[i];
            if e * f <= rem {
                cur.push((e, f));
                rec(rem - e * f, i, items, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, 0, &items, &mut Vec::new(), &mut out);
    out.into_iter().collect()
}

/// Unramified symbols of degree n, one per cycle type.
pub fn unramified_symbols(n: u32) -> Vec<SplittingSymbol> {
    partitions(n).iter().map(SplittingSymbol::from_cycle_type).collect()
}

/// Possible degrees of a proper rational factor allowed by the factorization
/// pattern modulo p (subset sums of the factor degrees).
fn subset_sums(degrees: &[usize], n: usize) -> Vec<bool> {
    let mut can = vec![false; n + 1];
    can[0] = true;
    for &d in degrees {
        for s in (d..=n).rev() {
            if can[s - d] {
                can[s] = true;
            }
        }
    }
    can
}

/// Irreducibility over Q for monic integer polynomials of degree at most 5,
/// by factor-degree certificates modulo primes below 100, then an exact search
/// for linear and quadratic factors when the certificate is inconclusive.
pub fn is_irreducible_q<T: Int>(f: &MonicPoly<T>) -> bool {
    let n = f.degree();
    assert!(n <= 5, "irreducibility test supports degree <= 5");
    if n == 1 {
        return true;
    }
    let mut allowed = vec![true; n + 1];
    for p in crate::arith::primes_up_to(100) {
        let fb = f.reduce_mod(p);
        if !crate::fp::is_squarefree(&fb) {
            continue;
        }
        let degs: Vec<usize> = fb.factor().iter().map(|(g, _)| g.deg()).collect();
        let can = subset_sums(&degs, n);
        for d in 1..n {
            allowed[d] &= can[d];
        }
        if (1..n).all(|d| !allowed[d]) {
            return true;
        }
    }
    let fz = f.to_bigint();
    if (allowed[1] || allowed[n - 1])
        && has_integer_root(&fz) {
            return false;
        }
    if n >= 4 && (allowed[2] || allowed[n - 2]) && has_quadratic_factor(&fz) {
        return false;
    }
    true
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let m = n.abs().to_u64().expect("constant term fits u64");
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(BigInt::from(d));
            if d * d != m {
                out.push(BigInt::from(m / d));
            }
        }
        d += 1;
    }
    out
}

fn has_integer_root(f: &MonicPoly<BigInt>) -> bool {
    let a_n = f.coeffs.last().expect("nonempty").clone();
    if a_n.is_zero() {
        return true;
    }
    divisors(&a_n).into_iter().any(|d| f.eval(&d).is_zero() || f.eval(&-d).is_zero())
}

/// Distinct integer roots of a monic integer polynomial, increasing.
pub fn integer_roots(f: &MonicPoly<BigInt>) -> Vec<BigInt> {
    let mut c = f.coeffs.clone();
    let mut out = Vec::new();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
        if out.is_empty() {
            out.push(BigInt::zero());
        }
    }
    if c.is_empty() {
        return out;
    }
    let g = MonicPoly { coeffs: c };
    let a_n = g.coeffs.last().expect("nonempty").clone();
    for d in divisors(&a_n).into_iter().flat_map(|d| [d.clone(), -d]) {
        if g.eval(&d).is_zero() {
            out.push(d);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Search for a monic quadratic factor `T^2 + bT + c`.
fn has_quadratic_factor(f: &MonicPoly<BigInt>) -> bool {
    let a_n = f.coeffs.last().expect("nonempty").clone();
    if a_n.is_zero() {
        return true;
    }
    let bound = f.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default() + BigInt::one();
    let bmax = (BigInt::from(2) * bound).to_i64().expect("bound fits");
    let dense = f.dense();
    for c in divisors(&a_n).into_iter().flat_map(|d| [d.clone(), -d]) {
        for b in -bmax..=bmax {
            let q = [c.clone(), BigInt::from(b), BigInt::one()];
            if poly_rem_monic(&dense, &q).iter().all(|x| x.is_zero()) {
                return true;
            }
        }
    }
    false
}

/// Remainder of `a` modulo monic `m` (lowest degree first).
pub fn poly_rem_monic(a: &[BigInt], m: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    if r.len() <= dm {
        return r;
    }
    for i in (dm..r.len()).rev() {
        let c = r[i].clone();
        if c.is_zero() {
            continue;
        }
        for (j, mc) in m.iter().enumerate() {
            r[i - dm + j] -= &c * mc;
        }
    }
    r.truncate(dm);
    r
}

/// Lower bound on `p^n / |Stab(tau)|` deviation: returns `exact_type_count - p^n/|C(tau)|`.
pub fn type_count_deviation(n: u32, p: u64, tau: &CycleType) -> BigRational {
    let exact = BigRational::from_integer(BigInt::from(exact_type_count(n, p, tau)));
    let main = BigRational::new(
        Pow::pow(&BigInt::from(p), n),
        BigInt::from(tau.centralizer_order()),
    );
    exact - main
}

/// `p`-adic valuation helper on arbitrary integers.
pub fn valuation<T: Int>(x: &T, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let pp = T::from_u64(p).expect("fits");
    let mut v = 0;
    let mut y = x.clone();
    while y.mod_floor(&pp).is_zero() {
        y = y / pp.clone();
        v += 1;
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::monic_from_index;

    fn mp(c: &[i64]) -> MonicPolyZ {
        MonicPolyZ::from_i64(c).unwrap()
    }

    #[test]
    fn discriminants() {
        assert_eq!(discriminant_monic(&mp(&[0, -1])), BigInt::from(4));
        assert_eq!(discriminant_monic(&mp(&[0, 0, 7])), BigInt::from(-1323));
        assert_eq!(discriminant_monic(&mp(&[0, 0, 0])), BigInt::zero());
        // generic quadratic and depressed cubic formulas
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                assert_eq!(discriminant_monic(&mp(&[a, b])), BigInt::from(a * a - 4 * b));
                assert_eq!(discriminant_monic(&mp(&[0, a, b])), BigInt::from(-4 * a * a * a - 27 * b * b));
            }
        }
        assert_eq!(discriminant_monic(&MonicPoly64::from_i64(&[0, 0, 7]).unwrap()), -1323);
    }

    #[test]
    fn heights() {
        let f = mp(&[0, 2, 3]);
        assert!(height_lt(&f, &BigInt::from(10)));
        assert!(!height_lt(&f, &BigInt::from(9)));
        assert!(height_lt(&mp(&[0, 0, 0]), &BigInt::one()));
        // i = 1 carries exponent n(n-1) = 6, so the comparison is 5^6 < x
        let g = mp(&[5, 0, 0]);
        assert!(!height_lt(&g, &BigInt::from(15625)));
        assert!(height_lt(&g, &BigInt::from(15626)));
    }

    #[test]
    fn factorizations_mod_p() {
        let f = mp(&[0, 0, 7]);
        // 7 = 1 mod 3, so T^3 + 7 = (T + 1)^3 in characteristic 3
        let f3 = factor_mod_p(&f, 3);
        assert_eq!(f3.factors, vec![(FpPoly::new(3, vec![1, 1]), 3)]);
        let f5 = factor_mod_p(&f, 5);
        assert_eq!(f5.symbol().to_string(), "1:2+1:1");
        let f7 = factor_mod_p(&f, 7);
        assert_eq!(f7.factors, vec![(FpPoly::x(7), 3)]);
        let g = factor_mod_p(&mp(&[0, -1]), 5);
        assert_eq!(g.factors, vec![(FpPoly::new(5, vec![1, 1]), 1), (FpPoly::new(5, vec![4, 1]), 1)]);
    }

    #[test]
    fn symbols() {
        let f = mp(&[0, 0, 7]);
        assert_eq!(splitting_symbol(&f, 3).unwrap().to_string(), "3:1");
        assert_eq!(splitting_symbol(&f, 13).unwrap().to_string(), "1:3");
        assert_eq!(splitting_symbol(&f, 7).unwrap().to_string(), "3:1");
        assert_eq!(splitting_symbol(&mp(&[0, 0, 0]), 5), Err(Error::ZeroDiscriminant));
        assert_eq!(splitting_symbol(&mp(&[5, 25]), 5), Err(Error::NotPMaximal(5)));
        let s: SplittingSymbol = "1:1+2:1".parse().unwrap();
        assert_eq!(s.to_string(), "2:1+1:1");
        assert_eq!(SplittingSymbol::unramified(&[1, 2]).to_string(), "1:2+1:1");
        assert!("2:x".parse::<SplittingSymbol>().is_err());
    }

    #[test]
    fn maximality() {
        assert!(is_p_maximal(&mp(&[0, 0, 7]), 3).unwrap());
        assert!(is_p_maximal(&mp(&[0, 0, 7]), 7).unwrap());
        assert!(!is_p_maximal(&mp(&[5, 25]), 5).unwrap());
        // T^2 - 5*9: Z[3 sqrt 5] is not maximal at 3
        assert!(!is_p_maximal(&mp(&[0, -45]), 3).unwrap());
        // T^2 + T + 1 at 3 is maximal (Eisenstein after shift)
        assert!(is_p_maximal(&mp(&[1, 1]), 3).unwrap());
        // T^2 - 5 at 2: Z[sqrt5] is not 2-maximal
        assert!(!is_p_maximal(&mp(&[0, -5]), 2).unwrap());
        assert!(is_p_maximal(&mp(&[0, -3]), 2).unwrap());
    }

    #[test]
    fn type_counts() {
        let t = |p: &[u32]| CycleType::new(p.to_vec()).unwrap();
        assert_eq!(exact_type_count(2, 3, &t(&[1, 1])), BigUint::from(3u32));
        assert_eq!(exact_type_count(2, 3, &t(&[2])), BigUint::from(3u32));
        assert_eq!(exact_type_count(3, 2, &t(&[3])), BigUint::from(2u32));
    }

    #[test]
    fn type_counts_match_enumeration() {
        for n in 1..=4u32 {
            for p in [2u64, 3, 5] {
                let mut counts = std::collections::BTreeMap::new();
                for i in 0..p.pow(n) {
                    let f = monic_from_index(p, n as usize, i);
                    if crate::fp::is_squarefree(&f) {
                        let mut degs: Vec<u32> = f.factor().iter().map(|(g, _)| g.deg() as u32).collect();
                        degs.sort_unstable_by(|a, b| b.cmp(a));
                        *counts.entry(degs).or_insert(0u64) += 1;
                    }
                }
                for tau in partitions(n) {
                    let got = exact_type_count(n, p, &tau);
                    let want = counts.get(&tau.parts).copied().unwrap_or(0);
                    assert_eq!(got, BigUint::from(want), "n={n} p={p} tau={tau}");
                }
            }
        }
    }

    #[test]
    fn theta_values() {
        let s3 = SplittingSymbol::unramified(&[3]);
        assert_eq!(theta_coefficient(&s3, 1), -1);
        assert_eq!(theta_coefficient(&s3, 3), 2);
        let r: SplittingSymbol = "2:1+1:1".parse().unwrap();
        let t: SplittingSymbol = "3:1".parse().unwrap();
        for m in 1..8 {
            assert_eq!(theta_coefficient(&r, m), 1);
            assert_eq!(theta_coefficient(&t, m), 0);
        }
    }

    #[test]
    fn euler_factors() {
        for s in ["1:1+1:1+1:1", "1:2+1:1", "2:1+2:1"] {
            assert!(euler_factor_check(&s.parse().unwrap(), 12).unwrap(), "{s}");
        }
        for n in 1..=5 {
            for s in all_symbols(n) {
                assert!(euler_factor_check(&s, 20).unwrap(), "{s}");
            }
        }
        assert!(euler_factor_check(&"1:1".parse().unwrap(), 31).is_err());
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible_q(&mp(&[0, 0, 7])));
        assert!(!is_irreducible_q(&mp(&[0, 0, -8])));
        // T^4 + 1 is reducible mod every prime but irreducible over Q
        assert!(is_irreducible_q(&mp(&[0, 0, 0, 1])));
        // (T^2+1)(T^2+2)
        assert!(!is_irreducible_q(&mp(&[0, 3, 0, 2])));
        // (T^2+T+1)(T^3-2)
        assert!(!is_irreducible_q(&mp(&[1, 1, -2, -2, -2])));
        assert!(is_irreducible_q(&mp(&[0, 0, 0, -1, -1])));
    }

    #[test]
    fn display() {
        assert_eq!(mp(&[0, 2, -3]).to_string(), "T^3 + 2T - 3");
    }
}
