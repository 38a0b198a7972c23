//! Hilbert symbols, square roots in Q_p, and exact arithmetic in biquadratic
//! fields Q(√a, √b) together with their embeddings into Q_p at split primes.

use crate::arith::{factor_u64, legendre, sqrt_mod_prime};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use std::fmt;

/// Default number of p-adic digits.
pub const DEFAULT_PRECISION: u32 = 32;

/// A place of Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinity,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

fn val_i64(mut n: i64, p: u64) -> (u32, i64) {
    let p = p as i64;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    (v, n)
}

/// Split a nonzero rational as `p^v * u` with `u = num/den` a p-adic unit.
fn split_rational(t: &Rational64, p: u64) -> (i64, i64, i64) {
    let (vn, un) = val_i64(*t.numer(), p);
    let (vd, ud) = val_i64(*t.denom(), p);
    (vn as i64 - vd as i64, un, ud)
}

fn unit_mod8(num: i64, den: i64) -> i64 {
    // den is odd, so den^{-1} = den mod 8
    (num.rem_euclid(8) * den.rem_euclid(8)).rem_euclid(8)
}

/// Hilbert symbol `(a, b)_v`.
pub fn hilbert_symbol(a: Rational64, b: Rational64, place: Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput);
    }
    match place {
        Place::Infinity => Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 }),
        Place::Prime(2) => {
            let (alpha, un, ud) = split_rational(&a, 2);
            let (beta, vn, vd) = split_rational(&b, 2);
            let u = unit_mod8(un, ud);
            let v = unit_mod8(vn, vd);
            let eps = |x: i64| ((x - 1) / 2).rem_euclid(2);
            let omega = |x: i64| ((x * x - 1) / 8).rem_euclid(2);
            let e = eps(u) * eps(v) + alpha.rem_euclid(2) * omega(v) + beta.rem_euclid(2) * omega(u);
            Ok(if e % 2 == 0 { 1 } else { -1 })
        }
        Place::Prime(p) => {
            let (alpha, un, ud) = split_rational(&a, p);
            let (beta, vn, vd) = split_rational(&b, p);
            let leg = |n: i64, d: i64| legendre(n.rem_euclid(p as i64) as u64, p) * legendre(d.rem_euclid(p as i64) as u64, p);
            let mut s = 1;
            if (alpha * beta).rem_euclid(2) == 1 && ((p - 1) / 2) % 2 == 1 {
                s = -s;
            }
            if beta.rem_euclid(2) == 1 {
                s *= leg(un, ud);
            }
            if alpha.rem_euclid(2) == 1 {
                s *= leg(vn, vd);
            }
            Ok(s)
        }
    }
}

/// Places where `(a, b)_v` can be nontrivial: infinity, 2 and the primes
/// dividing a numerator or denominator.
pub fn relevant_places(a: Rational64, b: Rational64) -> Vec<Place> {
    let mut primes: Vec<u64> = vec![2];
    for x in [*a.numer(), *a.denom(), *b.numer(), *b.denom()] {
        if x != 0 {
            primes.extend(factor_u64(x.unsigned_abs()).into_iter().map(|(p, _)| p));
        }
    }
    primes.sort_unstable();
    primes.dedup();
    let mut out = vec![Place::Infinity];
    out.extend(primes.into_iter().map(Place::Prime));
    out
}

/// Product of `(a,b)_v` over all places (must be +1).
pub fn hilbert_product(a: Rational64, b: Rational64) -> Result<i32> {
    let mut prod = 1;
    for v in relevant_places(a, b) {
        prod *= hilbert_symbol(a, b, v)?;
    }
    Ok(prod)
}

fn is_square_i64(n: i64) -> bool {
    n >= 0 && crate::arith::is_square(n as u64)
}

/// Whether `(-a,-b)_v = (-1,-1)_v` at every place, the criterion for Q(√a,√b)
/// to embed in a Q8-extension.
pub fn witt_condition(a: i64, b: i64) -> Result<bool> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidInput("a and b must be nonzero".into()));
    }
    for x in [a, b] {
        if !crate::arith::is_squarefree(x.unsigned_abs()) {
            return Err(Error::InvalidInput(format!("{x} is not squarefree")));
        }
    }
    let ab = a as i128 * b as i128;
    if is_square_i64(a) || is_square_i64(b) || (ab >= 0 && crate::arith::isqrt_u128(ab as u128).pow(2) == ab as u128) {
        return Err(Error::InvalidInput("a, b and ab must be nonsquares".into()));
    }
    let ma = Rational64::from_integer(-a);
    let mb = Rational64::from_integer(-b);
    let m1 = Rational64::from_integer(-1);
    let mut places = vec![Place::Infinity, Place::Prime(2)];
    for (p, _) in factor_u64(a.unsigned_abs()).into_iter().chain(factor_u64(b.unsigned_abs())) {
        if p != 2 {
            places.push(Place::Prime(p));
        }
    }
    for v in places {
        if hilbert_symbol(ma, mb, v)? != hilbert_symbol(m1, m1, v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether a positive integer is a sum of three integer squares (Legendre).
pub fn is_sum_of_three_squares(mut n: u64) -> bool {
    if n == 0 {
        return true;
    }
    while n.is_multiple_of(4) {
        n /= 4;
    }
    n % 8 != 7
}

/// Whether a positive rational is a sum of three rational squares
/// (equivalently its squarefree part is a sum of three integer squares).
pub fn is_rational_sum_of_three_squares(n: i64) -> bool {
    if n <= 0 {
        return n == 0;
    }
    let sf: u64 = factor_u64(n as u64)
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .product();
    is_sum_of_three_squares(sf)
}

/// `p^v · unit` with the unit known modulo `p^precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAdicApprox {
    pub p: u64,
    pub valuation: i64,
    pub unit: BigInt,
    pub precision: u32,
}

impl PAdicApprox {
    pub fn modulus(&self) -> BigInt {
        Pow::pow(&BigInt::from(self.p), self.precision)
    }

    /// Approximation of a rational number.
    pub fn from_rational(t: &BigRational, p: u64, precision: u32) -> Result<Self> {
        if t.is_zero() {
            return Err(Error::ZeroInput);
        }
        let (vn, un) = big_val(t.numer(), p);
        let (vd, ud) = big_val(t.denom(), p);
        let m = Pow::pow(&BigInt::from(p), precision);
        let inv = mod_inverse(&ud, &m).expect("unit denominator");
        Ok(PAdicApprox { p, valuation: vn as i64 - vd as i64, unit: (un * inv).mod_floor(&m), precision })
    }

    /// Whether the value is a square in Q_p (decided from the known digits).
    pub fn is_square(&self) -> Result<bool> {
        if self.valuation % 2 != 0 {
            return Ok(false);
        }
        if self.p == 2 {
            if self.precision < 3 {
                return Err(Error::Undecided2Adic(self.precision));
            }
            Ok(self.unit.mod_floor(&BigInt::from(8)) == BigInt::one())
        } else {
            let r = self.unit.mod_floor(&BigInt::from(self.p)).to_u64().expect("small");
            Ok(legendre(r, self.p) == 1)
        }
    }
}

fn big_val(n: &BigInt, p: u64) -> (u32, BigInt) {
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while !n.is_zero() && n.mod_floor(&pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    (v, n)
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Square root of a p-adic unit modulo `p^k` (the unit given modulo `p^k`).
fn sqrt_unit(u: &BigInt, p: u64, k: u32) -> Option<BigInt> {
    let m = Pow::pow(&BigInt::from(p), k);
    let u = u.mod_floor(&m);
    if p == 2 {
        if k >= 3 && u.mod_floor(&BigInt::from(8)) != BigInt::one() {
            return None;
        }
        // lift one bit at a time: if r^2 != u mod 2^{j+1}, add 2^{j-1}
        let mut r = BigInt::one();
        for j in 3..k {
            let mj = BigInt::one() << (j + 1);
            if (&r * &r - &u).mod_floor(&mj) != BigInt::zero() {
                r += BigInt::one() << (j - 1);
            }
        }
        return Some(r.mod_floor(&m));
    }
    let r0 = sqrt_mod_prime(u.mod_floor(&BigInt::from(p)).to_u64()?, p)?;
    let mut r = BigInt::from(r0);
    let mut prec = 1u32;
    while prec < k {
        prec = (2 * prec).min(k);
        let mp = Pow::pow(&BigInt::from(p), prec);
        let inv = mod_inverse(&(BigInt::from(2) * &r), &mp)?;
        r = (&r - (&r * &r - &u) * inv).mod_floor(&mp);
    }
    Some(r.mod_floor(&m))
}

/// A square root of `t` in Q_p to precision `k`.
pub fn sqrt_in_qp(t: &BigRational, p: u64, k: u32) -> Result<PAdicApprox> {
    if k == 0 || k > 64 {
        return Err(Error::InvalidInput("precision must be in 1..=64".into()));
    }
    let x = PAdicApprox::from_rational(t, p, k)?;
    let fail = || Error::NoSquareRoot(t.to_string(), p);
    if x.valuation % 2 != 0 {
        return Err(fail());
    }
    let r = sqrt_unit(&x.unit, p, k).ok_or_else(fail)?;
    Ok(PAdicApprox { p, valuation: x.valuation / 2, unit: r, precision: k })
}

/// Element `c0 + c1√a + c2√b + c3√(ab)` of Q(√a, √b).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiquadraticElement {
    pub a: i64,
    pub b: i64,
    pub c: [BigRational; 4],
}

fn qi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl BiquadraticElement {
    pub fn new(a: i64, b: i64, c: [BigRational; 4]) -> Self {
        BiquadraticElement { a, b, c }
    }

    pub fn from_ints(a: i64, b: i64, c: [i64; 4]) -> Self {
        Self::new(a, b, c.map(qi))
    }

    pub fn rational(a: i64, b: i64, r: BigRational) -> Self {
        Self::new(a, b, [r, BigRational::zero(), BigRational::zero(), BigRational::zero()])
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!((self.a, self.b), (o.a, o.b), "elements of different fields");
        let (a, b) = (qi(self.a), qi(self.b));
        let [x0, x1, x2, x3] = &self.c;
        let [y0, y1, y2, y3] = &o.c;
        let c0 = x0 * y0 + &a * x1 * y1 + &b * x2 * y2 + &a * &b * x3 * y3;
        let c1 = x0 * y1 + x1 * y0 + &b * (x2 * y3 + x3 * y2);
        let c2 = x0 * y2 + x2 * y0 + &a * (x1 * y3 + x3 * y1);
        let c3 = x0 * y3 + x3 * y0 + x1 * y2 + x2 * y1;
        Self::new(self.a, self.b, [c0, c1, c2, c3])
    }

    pub fn add(&self, o: &Self) -> Self {
        let c = [0, 1, 2, 3].map(|i| &self.c[i] + &o.c[i]);
        Self::new(self.a, self.b, c)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(self.a, self.b, self.c.clone().map(|x| x * r))
    }

    /// Automorphism negating √a (and √ab).
    pub fn conj_a(&self) -> Self {
        let [c0, c1, c2, c3] = self.c.clone();
        Self::new(self.a, self.b, [c0, -c1, c2, -c3])
    }

    /// Automorphism negating √b (and √ab).
    pub fn conj_b(&self) -> Self {
        let [c0, c1, c2, c3] = self.c.clone();
        Self::new(self.a, self.b, [c0, c1, -c2, -c3])
    }

    /// Relative norm down to Q(√a): `x · σ_b(x)`.
    pub fn norm_to_sqrt_a(&self) -> Self {
        self.mul(&self.conj_b())
    }

    /// Absolute norm to Q.
    pub fn norm(&self) -> BigRational {
        let n = self.norm_to_sqrt_a();
        let m = n.mul(&n.conj_a());
        debug_assert!(m.c[1..].iter().all(|x| x.is_zero()));
        m.c[0].clone()
    }

    /// Matrix of multiplication by `self` on the basis (1, √a, √b, √ab); column j is self·e_j.
    pub fn mult_matrix(&self) -> [[BigRational; 4]; 4] {
        let mut m: [[BigRational; 4]; 4] = Default::default();
        for j in 0..4 {
            let mut e = [0i64; 4];
            e[j] = 1;
            let col = self.mul(&Self::from_ints(self.a, self.b, e));
            for i in 0..4 {
                m[i][j] = col.c[i].clone();
            }
        }
        m
    }

    /// Characteristic polynomial over Q of multiplication by `self`, lowest degree first, monic.
    pub fn char_poly(&self) -> Vec<BigRational> {
        // product of (S - conjugate) expanded in the field
        let conjs = [self.clone(), self.conj_a(), self.conj_b(), self.conj_a().conj_b()];
        let one = Self::rational(self.a, self.b, BigRational::one());
        let zero = Self::rational(self.a, self.b, BigRational::zero());
        let mut poly = vec![one.clone()];
        for c in &conjs {
            let neg = c.scale(&qi(-1));
            let mut next = vec![zero.clone(); poly.len() + 1];
            for (i, coef) in poly.iter().enumerate() {
                next[i + 1] = next[i + 1].add(coef);
                next[i] = next[i].add(&coef.mul(&neg));
            }
            poly = next;
        }
        poly.into_iter()
            .map(|e| {
                assert!(e.c[1..].iter().all(|x| x.is_zero()), "characteristic polynomial must be rational");
                e.c[0].clone()
            })
            .collect()
    }
}

/// The four images of `x` in Q_p for a prime p split in Q(√a, √b).
pub fn embed_biquadratic(x: &BiquadraticElement, p: u64, k: u32) -> Result<Vec<PAdicApprox>> {
    if p == 2 {
        return Err(Error::InvalidInput("embedding requires an odd prime".into()));
    }
    for t in [x.a, x.b] {
        if t.rem_euclid(p as i64) == 0 || legendre(t.rem_euclid(p as i64) as u64, p) != 1 {
            return Err(Error::NotSplit(t, p));
        }
    }
    let roots = embedding_roots(x.a, x.b, p, k)?;
    let mut out = Vec::with_capacity(4);
    for (ra, rb) in roots {
        out.push(evaluate_at(x, &ra, &rb, p, k)?);
    }
    Ok(out)
}

/// Pairs (√a, √b) in Z/p^k for the four sign choices, in the order (+,+), (+,-), (-,+), (-,-).
pub fn embedding_roots(a: i64, b: i64, p: u64, k: u32) -> Result<Vec<(BigInt, BigInt)>> {
    let m = Pow::pow(&BigInt::from(p), k);
    let ra = sqrt_unit(&BigInt::from(a), p, k).ok_or(Error::NotSplit(a, p))?;
    let rb = sqrt_unit(&BigInt::from(b), p, k).ok_or(Error::NotSplit(b, p))?;
    let neg = |r: &BigInt| (-r).mod_floor(&m);
    Ok(vec![
        (ra.clone(), rb.clone()),
        (ra.clone(), neg(&rb)),
        (neg(&ra), rb.clone()),
        (neg(&ra), neg(&rb)),
    ])
}

/// Value of `x` at the embedding √a ↦ ra, √b ↦ rb, as a p-adic approximation.
pub fn evaluate_at(x: &BiquadraticElement, ra: &BigInt, rb: &BigInt, p: u64, k: u32) -> Result<PAdicApprox> {
    let den = x.c.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let (vd, _) = big_val(&den, p);
    let work = k + vd;
    let m = Pow::pow(&BigInt::from(p), work);
    // ra, rb are known modulo p^k only; extend the working modulus by recomputing if needed
    let (ra, rb) = if vd > 0 {
        let r = embedding_roots_exact(x.a, x.b, ra, rb, p, k, work)?;
        (r.0, r.1)
    } else {
        (ra.clone(), rb.clone())
    };
    let ints: Vec<BigInt> = x.c.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    let val = (&ints[0] + &ints[1] * &ra + &ints[2] * &rb + &ints[3] * &ra * &rb).mod_floor(&m);
    if val.is_zero() {
        return Err(Error::InvalidInput("element vanishes to working precision".into()));
    }
    let (vn, unit) = big_val(&val, p);
    let (_, den_unit) = big_val(&den, p);
    let prec = work - vn;
    let mp = Pow::pow(&BigInt::from(p), prec);
    let inv = mod_inverse(&den_unit, &mp).expect("unit");
    Ok(PAdicApprox { p, valuation: vn as i64 - vd as i64, unit: (unit * inv).mod_floor(&mp), precision: prec })
}

fn embedding_roots_exact(
    a: i64,
    b: i64,
    ra: &BigInt,
    rb: &BigInt,
    p: u64,
    k: u32,
    work: u32,
) -> Result<(BigInt, BigInt)> {
    let mk = Pow::pow(&BigInt::from(p), k);
    let mw = Pow::pow(&BigInt::from(p), work);
    let lift = |t: i64, r: &BigInt| -> Result<BigInt> {
        let s = sqrt_unit(&BigInt::from(t), p, work).ok_or(Error::NotSplit(t, p))?;
        if (&s - r).mod_floor(&mk).is_zero() {
            Ok(s)
        } else {
            Ok((-s).mod_floor(&mw))
        }
    };
    Ok((lift(a, ra)?, lift(b, rb)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    fn br(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Solubility of z^2 = a x^2 + b y^2 with a primitive solution mod p^k.
    fn hilbert_brute(a: i64, b: i64, p: u64, k: u32) -> i32 {
        let m = (p as i64).pow(k);
        let sq: Vec<i64> = (0..m).map(|x| x * x % m).collect();
        for x in 0..m {
            for y in 0..m {
                let rhs = (a.rem_euclid(m) * sq[x as usize] + b.rem_euclid(m) * sq[y as usize]) % m;
                for z in 0..m {
                    if (x % p as i64 != 0 || y % p as i64 != 0 || z % p as i64 != 0) && sq[z as usize] == rhs {
                        return 1;
                    }
                }
            }
        }
        -1
    }

    #[test]
    fn examples() {
        assert_eq!(hilbert_symbol(r(-1), r(-1), Place::Infinity).unwrap(), -1);
        assert_eq!(hilbert_symbol(r(-1), r(-1), Place::Prime(2)).unwrap(), -1);
        assert_eq!(hilbert_symbol(r(-1), r(-1), Place::Prime(5)).unwrap(), 1);
        assert_eq!(hilbert_symbol(r(0), r(3), Place::Prime(5)), Err(Error::ZeroInput));
    }

    #[test]
    fn closed_form_matches_search() {
        let vals: Vec<i64> = (-12..=12).filter(|&x: &i64| x != 0 && crate::arith::is_squarefree(x.unsigned_abs())).collect();
        for &a in &vals {
            for &b in &vals {
                assert_eq!(hilbert_symbol(r(a), r(b), Place::Prime(2)).unwrap(), hilbert_brute(a, b, 2, 4), "({a},{b})_2");
                assert_eq!(hilbert_symbol(r(a), r(b), Place::Prime(3)).unwrap(), hilbert_brute(a, b, 3, 2), "({a},{b})_3");
                assert_eq!(hilbert_symbol(r(a), r(b), Place::Prime(5)).unwrap(), hilbert_brute(a, b, 5, 2), "({a},{b})_5");
            }
        }
    }

    #[test]
    fn witt_examples() {
        assert!(witt_condition(2, 3).unwrap());
        assert!(witt_condition(5, 41).unwrap());
        assert!(!witt_condition(163, 14).unwrap());
        assert!(witt_condition(4, 3).is_err());
        assert!(witt_condition(2, 8).is_err());
    }

    #[test]
    fn square_roots() {
        let s = sqrt_in_qp(&br(4, 1), 7, 5).unwrap();
        let m = s.modulus();
        let u = s.unit.clone();
        assert!(u == BigInt::from(2) || u == &m - 2);
        let s = sqrt_in_qp(&br(2, 1), 7, 3).unwrap();
        assert!(s.unit == BigInt::from(108) || s.unit == BigInt::from(343 - 108));
        assert!(matches!(sqrt_in_qp(&br(5, 1), 7, 8), Err(Error::NoSquareRoot(..))));
        assert!(matches!(sqrt_in_qp(&br(7, 1), 7, 8), Err(Error::NoSquareRoot(..))));
        // 2-adic: 17 = 1 mod 8 is a square, 5 is not
        let s = sqrt_in_qp(&br(17, 1), 2, 20).unwrap();
        assert_eq!((&s.unit * &s.unit - BigInt::from(17)).mod_floor(&s.modulus()), BigInt::zero());
        assert!(sqrt_in_qp(&br(5, 1), 2, 20).is_err());
        let s = sqrt_in_qp(&br(-7, 4), 2, 30).unwrap();
        assert_eq!(s.valuation, -1);
        assert_eq!((&s.unit * &s.unit + BigInt::from(7)).mod_floor(&s.modulus()), BigInt::zero());
        let s = sqrt_in_qp(&br(2, 9), 7, 10).unwrap();
        let m = s.modulus();
        assert_eq!((&s.unit * &s.unit * BigInt::from(9) - BigInt::from(2)).mod_floor(&m), BigInt::zero());
    }

    #[test]
    fn biquadratic_arithmetic() {
        let (a, b) = (2, 3);
        let sa = BiquadraticElement::from_ints(a, b, [0, 1, 0, 0]);
        let sb = BiquadraticElement::from_ints(a, b, [0, 0, 1, 0]);
        assert_eq!(sa.mul(&sa), BiquadraticElement::from_ints(a, b, [2, 0, 0, 0]));
        assert_eq!(sa.mul(&sb), BiquadraticElement::from_ints(a, b, [0, 0, 0, 1]));
        let sab = sa.mul(&sb);
        assert_eq!(sab.mul(&sab), BiquadraticElement::from_ints(a, b, [6, 0, 0, 0]));
        let x = BiquadraticElement::from_ints(a, b, [1, 2, -1, 3]);
        let y = BiquadraticElement::from_ints(a, b, [0, -1, 5, 1]);
        assert_eq!(x.mul(&y).norm(), x.norm() * y.norm());
        let cp = x.char_poly();
        assert_eq!(cp.len(), 5);
        assert_eq!(cp[0], x.norm());
    }

    #[test]
    fn embeddings() {
        let one = BiquadraticElement::from_ints(2, 7, [1, 0, 0, 0]);
        // 2 and 7 are squares mod 31 (2 = 8^2, 7 = 10^2)
        let e = embed_biquadratic(&one, 31, 10).unwrap();
        assert_eq!(e.len(), 4);
        assert!(e.iter().all(|v| v.unit == BigInt::one() && v.valuation == 0));
        assert!(matches!(embed_biquadratic(&one, 5, 10), Err(Error::NotSplit(..))));
        let theta = BiquadraticElement::new(2, 3, [br(1, 1), br(1, 2), br(-1, 3), br(-1, 3)]);
        let e = embed_biquadratic(&theta, 23, 12).unwrap();
        // product of the four embeddings is the absolute norm
        let m = Pow::pow(&BigInt::from(23u64), 8u32);
        let mut prod = BigInt::one();
        let mut val = 0;
        for v in &e {
            prod = (prod * &v.unit).mod_floor(&m);
            val += v.valuation;
        }
        let n = PAdicApprox::from_rational(&theta.norm(), 23, 8).unwrap();
        assert_eq!(val, n.valuation);
        assert_eq!(prod, n.unit.mod_floor(&m));
    }

    #[test]
    fn three_squares() {
        assert!(is_sum_of_three_squares(6));
        assert!(!is_sum_of_three_squares(7));
        assert!(!is_sum_of_three_squares(28));
        for n in 0..200u64 {
            let brute = (0..15u64).any(|x| (0..15u64).any(|y| (0..15u64).any(|z| x * x + y * y + z * z == n)));
            assert_eq!(is_sum_of_three_squares(n), brute, "n={n}");
        }
    }
}
