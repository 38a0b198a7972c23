//! Pairs of ternary quadratic forms (quartic rings) and quadruples of
//! alternating 5x5 matrices (quintic rings): resolvents, splitting types from
//! the geometry of the intersection points over finite fields, exhaustive and
//! Monte Carlo local densities.

use crate::arith::{inv_mod, is_prime};
use crate::conjugacy::{partitions, CycleType};
use crate::cubicforms::BinaryCubicForm;
use crate::error::{Error, Result};
use crate::fp::FpPoly;
use crate::gf::{orbit_partition, Gf, QuadraticRoots};
use crate::polyfactor::{discriminant_monic, integer_roots, is_irreducible_q, MonicPoly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

type Mat3 = [[i64; 3]; 3];

/// Monomial order for ternary quadratic forms: xx, xy, xz, yy, yz, zz.
const TERNARY_MONOMIALS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// A pair of ternary quadratic forms stored as doubled Gram matrices
/// (`2A`, `2B`): even diagonal, off-diagonal entries equal to the
/// coefficients of the mixed monomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TernaryPair {
    pub a: Mat3,
    pub b: Mat3,
}

fn check_gram(m: &Mat3) -> bool {
    (0..3).all(|i| m[i][i] % 2 == 0 && (0..3).all(|j| m[i][j] == m[j][i]))
}

fn gram_from_coeffs(c: &[i64; 6]) -> Mat3 {
    let mut m = [[0i64; 3]; 3];
    for (k, &(i, j)) in TERNARY_MONOMIALS.iter().enumerate() {
        if i == j {
            m[i][i] = 2 * c[k];
        } else {
            m[i][j] = c[k];
            m[j][i] = c[k];
        }
    }
    m
}

fn det3(m: &[[i128; 3]; 3]) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn congruence(m: &Mat3, g: &Mat3) -> Mat3 {
    let mut out = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = 0i64;
            for k in 0..3 {
                for l in 0..3 {
                    s += g[k][i] * m[k][l] * g[l][j];
                }
            }
            out[i][j] = s;
        }
    }
    out
}

/// Coordinate changes tried in order when a projection fails to separate
/// the intersection points: identity, then shears and permutations.
const SCHEDULE: [Mat3; 20] = [
    [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    [[1, 0, 1], [0, 1, 0], [0, 0, 1]],
    [[1, 0, 0], [0, 1, 1], [0, 0, 1]],
    [[1, 0, 1], [0, 1, 1], [0, 0, 1]],
    [[0, 0, 1], [1, 0, 0], [0, 1, 0]],
    [[0, 1, 0], [0, 0, 1], [1, 0, 0]],
    [[1, 0, -1], [0, 1, 1], [0, 0, 1]],
    [[1, 0, 2], [0, 1, 1], [0, 0, 1]],
    [[1, 0, 1], [0, 1, 2], [0, 0, 1]],
    [[1, 0, 2], [0, 1, -1], [0, 0, 1]],
    [[1, 1, 0], [0, 1, 0], [0, 1, 1]],
    [[1, 0, 0], [1, 1, 0], [1, 0, 1]],
    [[1, 0, 3], [0, 1, 1], [0, 0, 1]],
    [[1, 0, 1], [0, 1, 3], [0, 0, 1]],
    [[1, 0, -2], [0, 1, 3], [0, 0, 1]],
    [[1, 0, 3], [0, 1, -2], [0, 0, 1]],
    [[1, 0, 4], [0, 1, 1], [0, 0, 1]],
    [[1, 0, 1], [0, 1, 4], [0, 0, 1]],
    [[1, 0, 5], [0, 1, 2], [0, 0, 1]],
    [[1, 0, 2], [0, 1, 5], [0, 0, 1]],
];

impl TernaryPair {
    pub fn new(a: Mat3, b: Mat3) -> Result<Self> {
        if !check_gram(&a) || !check_gram(&b) {
            return Err(Error::InvalidInput("doubled Gram matrices must be symmetric with even diagonal".into()));
        }
        Ok(TernaryPair { a, b })
    }

    /// From coefficient vectors in the order xx, xy, xz, yy, yz, zz.
    pub fn from_coeffs(a: [i64; 6], b: [i64; 6]) -> Self {
        TernaryPair { a: gram_from_coeffs(&a), b: gram_from_coeffs(&b) }
    }

    /// `(x0 x2 - x1^2, Q)` with `Q(1, t, t^2) = t^4 + a t^3 + b t^2 + c t + d`:
    /// the intersection points are `(1, α, α^2)` for the roots `α`.
    pub fn from_monic_quartic(a: i64, b: i64, c: i64, d: i64) -> Self {
        TernaryPair::from_coeffs([0, 0, 1, -1, 0, 0], [d, c, b, 0, a, 1])
    }

    pub fn coeffs(m: &Mat3) -> [i64; 6] {
        let mut out = [0i64; 6];
        for (k, &(i, j)) in TERNARY_MONOMIALS.iter().enumerate() {
            out[k] = if i == j { m[i][i] / 2 } else { m[i][j] };
        }
        out
    }

    /// Substitute `v -> g v` in both forms.
    pub fn transform(&self, g: &Mat3) -> Self {
        TernaryPair { a: congruence(&self.a, g), b: congruence(&self.b, g) }
    }

    fn pencil_det(&self, x: i128, y: i128) -> i128 {
        let mut m = [[0i128; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.a[i][j] as i128 * x - self.b[i][j] as i128 * y;
            }
        }
        det3(&m)
    }

    /// `4 det(Ax - By)`, computed as `det(2Ax - 2By) / 2`.
    pub fn resolvent_cubic(&self) -> BinaryCubicForm {
        let f = |x: i128, y: i128| self.pencil_det(x, y) / 2;
        let (a, d) = (f(1, 0), f(0, 1));
        let s = f(1, 1) - a - d;
        let t = f(1, -1) - a + d;
        let c = (s + t) / 2;
        let b = (s - t) / 2;
        let n = |v: i128| i64::try_from(v).expect("resolvent coefficient fits i64");
        BinaryCubicForm::new(n(a), n(b), n(c), n(d))
    }

    pub fn disc(&self) -> i128 {
        self.resolvent_cubic().disc()
    }
}

/// Orbit type of the four intersection points of `A = B = 0` over `F_p`.
pub fn splitting_symbol_pair(pair: &TernaryPair, p: u64) -> Result<CycleType> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("p = {p} must be an odd prime")));
    }
    if pair.disc().rem_euclid(p as i128) == 0 {
        return Err(Error::Degenerate(p));
    }
    for g in &SCHEDULE {
        if let Some(t) = projection_type(&pair.transform(g), p) {
            return Ok(t);
        }
    }
    census_type(pair, p)
}

/// Binary forms over F_p, coefficient `i` on `x^{d-i} y^i`.
fn bf_mul(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = (out[i + j] + a * b) % p;
        }
    }
    out
}

fn bf_sub(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    f.iter().zip(g).map(|(&a, &b)| (a + p - b) % p).collect()
}

fn bf_scale(f: &[u64], k: u64, p: u64) -> Vec<u64> {
    f.iter().map(|&a| a * k % p).collect()
}

/// `Res_z(A, B)` as a binary quartic in `(x, y)` over `F_p`.
fn resultant_quartic(pair: &TernaryPair, p: u64) -> Vec<u64> {
    let half = inv_mod(2, p).expect("odd p");
    let split = |m: &Mat3| {
        let r = |v: i64| v.rem_euclid(p as i64) as u64;
        let alpha = r(m[2][2]) * half % p;
        let beta = vec![r(m[0][2]), r(m[1][2])];
        let gamma = vec![r(m[0][0]) * half % p, r(m[0][1]), r(m[1][1]) * half % p];
        (alpha, beta, gamma)
    };
    let (a1, b1, c1) = split(&pair.a);
    let (a2, b2, c2) = split(&pair.b);
    // (a1 c2 - a2 c1)^2 - (a1 b2 - a2 b1)(b1 c2 - b2 c1)
    let u = bf_sub(&bf_scale(&c2, a1, p), &bf_scale(&c1, a2, p), p);
    let v = bf_sub(&bf_scale(&b2, a1, p), &bf_scale(&b1, a2, p), p);
    let w = bf_sub(&bf_mul(&b1, &c2, p), &bf_mul(&b2, &c1, p), p);
    bf_sub(&bf_mul(&u, &u, p), &bf_mul(&v, &w, p), p)
}

/// Factorization type of the projected quartic when the projection from
/// `(0:0:1)` separates the four points.
fn projection_type(pair: &TernaryPair, p: u64) -> Option<CycleType> {
    let q = resultant_quartic(pair, p);
    let at_infinity = q[0] == 0;
    if at_infinity && q[1] == 0 {
        return None;
    }
    let g = FpPoly::new(p, q.iter().rev().copied().collect());
    if !crate::fp::is_squarefree(&g) {
        return None;
    }
    let mut parts: Vec<u32> = g.factor().iter().map(|(h, _)| h.deg() as u32).collect();
    if at_infinity {
        parts.push(1);
    }
    CycleType::new(parts).ok()
}

fn eval_ternary(gf: &Gf, c: &[u16; 6], pt: &[u16]) -> u16 {
    let mut acc = 0u16;
    for (k, &(i, j)) in TERNARY_MONOMIALS.iter().enumerate() {
        if c[k] != 0 {
            acc = gf.add(acc, gf.mul(c[k], gf.mul(pt[i], pt[j])));
        }
    }
    acc
}

fn coeffs_in(gf: &Gf, m: &Mat3) -> [u16; 6] {
    let mut out = [0u16; 6];
    for (k, &(i, j)) in TERNARY_MONOMIALS.iter().enumerate() {
        out[k] = gf.from_int(if i == j { m[i][i] / 2 } else { m[i][j] });
    }
    out
}

/// Number of common zeros of the pair in `P^2(F_q)`.
pub fn census_pair(pair: &TernaryPair, gf: &Gf) -> u64 {
    let (ca, cb) = (coeffs_in(gf, &pair.a), coeffs_in(gf, &pair.b));
    let mut n = 0;
    gf.for_each_projective_point(2, |pt| {
        if eval_ternary(gf, &ca, pt) == 0 && eval_ternary(gf, &cb, pt) == 0 {
            n += 1;
        }
    });
    n
}

/// Type from the point counts over `F_p` and `F_{p^2}`, which determine the
/// orbit structure of four distinct points.
fn census_type(pair: &TernaryPair, p: u64) -> Result<CycleType> {
    let f1 = Gf::new(p, 1)?;
    let f2 = Gf::new(p, 2).map_err(|_| Error::NoSeparatingProjection(p))?;
    let (n1, n2) = (census_pair(pair, &f1), census_pair(pair, &f2));
    let m2 = n2.checked_sub(n1).filter(|m| m % 2 == 0).ok_or(Error::NoSeparatingProjection(p))?;
    let parts = match (n1, m2) {
        (4, 0) => vec![1, 1, 1, 1],
        (2, 2) => vec![2, 1, 1],
        (0, 4) => vec![2, 2],
        (1, 0) => vec![3, 1],
        (0, 0) => vec![4],
        _ => return Err(Error::NoSeparatingProjection(p)),
    };
    CycleType::new(parts)
}

/// Resolvent-cubic type over `F_p` for each quartic type.
pub fn quartic_to_cubic_splitting(tau: &CycleType) -> Result<CycleType> {
    let parts: &[u32] = match tau.parts.as_slice() {
        [1, 1, 1, 1] | [2, 2] => &[1, 1, 1],
        [2, 1, 1] | [4] => &[2, 1],
        [3, 1] => &[3],
        _ => return Err(Error::InvalidInput(format!("{tau} is not a partition of 4"))),
    };
    CycleType::new(parts.to_vec())
}

/// Factorization type of a binary cubic with `p ∤ disc` over `F_p`.
pub fn cubic_form_type(f: &BinaryCubicForm, p: u64) -> Result<CycleType> {
    let s = f.splitting_symbol(p)?;
    s.cycle_type().ok_or(Error::Degenerate(p))
}

/// Exhaustive count over all `p^12` pairs over `F_p`.
#[derive(Clone, Debug, Serialize)]
pub struct PairDensityReport {
    pub format_version: String,
    pub p: u64,
    pub total: u64,
    pub degenerate: u64,
    pub counts: BTreeMap<String, u64>,
    /// Share of each type among nondegenerate pairs, as exact fractions.
    pub ratios: BTreeMap<String, String>,
    pub predicted: BTreeMap<String, String>,
    pub exact_match: bool,
    pub degenerate_share: String,
}

fn pair_from_index(p: u64, mut idx: u64) -> TernaryPair {
    let mut c = [[0i64; 6]; 2];
    for form in c.iter_mut() {
        for slot in form.iter_mut() {
            *slot = (idx % p) as i64;
            idx /= p;
        }
    }
    TernaryPair::from_coeffs(c[0], c[1])
}

pub fn brute_force_pair_density(p: u64, threads: usize) -> Result<PairDensityReport> {
    if p != 3 && p != 5 {
        return Err(Error::InvalidInput("exhaustive pair density supports p = 3 or 5".into()));
    }
    let outer = p.pow(6);
    let types: Vec<CycleType> = partitions(4);
    let next = std::sync::atomic::AtomicU64::new(0);
    let work = || {
        let mut counts = vec![0u64; types.len()];
        let mut degenerate = 0u64;
        loop {
            let hi = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            if hi >= outer {
                break;
            }
            for lo in 0..outer {
                let pair = pair_from_index(p, lo + outer * hi);
                match splitting_symbol_pair(&pair, p) {
                    Ok(t) => counts[types.iter().position(|u| *u == t).expect("partition of 4")] += 1,
                    Err(Error::Degenerate(_)) => degenerate += 1,
                    Err(e) => return Err(e),
                }
            }
        }
        Ok((counts, degenerate))
    };
    let results: Vec<Result<(Vec<u64>, u64)>> = if threads <= 1 {
        vec![work()]
    } else {
        std::thread::scope(|s| {
            let hs: Vec<_> = (0..threads).map(|_| s.spawn(work)).collect();
            hs.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut counts = vec![0u64; types.len()];
    let mut degenerate = 0;
    for r in results {
        let (c, d) = r?;
        counts.iter_mut().zip(&c).for_each(|(a, b)| *a += b);
        degenerate += d;
    }
    let total = p.pow(12);
    let nondeg = total - degenerate;
    let rs = crate::conjugacy::rational_string;
    let mut report = PairDensityReport {
        format_version: crate::monicfamily::FORMAT_VERSION.into(),
        p,
        total,
        degenerate,
        counts: BTreeMap::new(),
        ratios: BTreeMap::new(),
        predicted: BTreeMap::new(),
        exact_match: true,
        degenerate_share: rs(&BigRational::new(degenerate.into(), total.into())),
    };
    for (t, &c) in types.iter().zip(&counts) {
        let ratio = BigRational::new(c.into(), nondeg.into());
        let pred = BigRational::new(t.class_size().into(), 24.into());
        report.exact_match &= ratio == pred;
        report.counts.insert(t.to_string(), c);
        report.ratios.insert(t.to_string(), rs(&ratio));
        report.predicted.insert(t.to_string(), rs(&pred));
    }
    Ok(report)
}

/// Random pair over `F_p` with `p ∤ Δ`, from sample index `i` of stream `seed`.
pub fn random_nondegenerate_pair(p: u64, seed: u64, i: u64) -> TernaryPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    loop {
        let mut c = [[0i64; 6]; 2];
        for form in c.iter_mut() {
            for slot in form.iter_mut() {
                *slot = rng.gen_range(0..p as i64);
            }
        }
        let pair = TernaryPair::from_coeffs(c[0], c[1]);
        if pair.disc().rem_euclid(p as i128) != 0 {
            return pair;
        }
    }
}

/// Agreement of quartic types with resolvent-cubic types over random pairs.
#[derive(Clone, Debug, Serialize)]
pub struct Table1Report {
    pub p: u64,
    pub samples: u64,
    pub agreements: u64,
    pub mismatches: u64,
    pub by_type: BTreeMap<String, (String, u64)>,
}

pub fn table1_check(p: u64, samples: u64, seed: u64) -> Result<Table1Report> {
    let mut rep = Table1Report { p, samples, agreements: 0, mismatches: 0, by_type: BTreeMap::new() };
    for i in 0..samples {
        let pair = random_nondegenerate_pair(p, seed, i);
        let t4 = splitting_symbol_pair(&pair, p)?;
        let t3 = cubic_form_type(&pair.resolvent_cubic(), p)?;
        if quartic_to_cubic_splitting(&t4)? == t3 {
            rep.agreements += 1;
        } else {
            rep.mismatches += 1;
        }
        rep.by_type.entry(t4.to_string()).or_insert_with(|| (t3.to_string(), 0)).1 += 1;
    }
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QuarticGroup {
    S4,
    A4,
    D4,
    C4,
    V4,
    Reducible,
}

fn is_rational_square(v: &BigInt) -> bool {
    !v.is_negative() && {
        let r = v.sqrt();
        &r * &r == *v
    }
}

/// Galois group of the quartic algebra of an integral pair.
pub fn classify_quartic_group(pair: &TernaryPair) -> Result<QuarticGroup> {
    if pair.disc() == 0 {
        return Err(Error::ZeroDiscriminant);
    }
    let f = rational_quartic(pair).ok_or(Error::NoSeparatingProjection(0))?;
    classify_monic_quartic(&f)
}

/// Monic integer quartic whose algebra is that of the pair, via a projection
/// that separates the intersection points over `Q`.
fn rational_quartic(pair: &TernaryPair) -> Option<MonicPoly<BigInt>> {
    for g in &SCHEDULE {
        let t = pair.transform(g);
        let big = |v: i64| BigInt::from(v);
        let part = |m: &Mat3| {
            // doubled: 2A = 2α z^2 + 2β z + 2γ
            (big(m[2][2]), [big(2 * m[0][2]), big(2 * m[1][2])], [big(m[0][0]), big(2 * m[0][1]), big(m[1][1])])
        };
        let (a1, b1, c1) = part(&t.a);
        let (a2, b2, c2) = part(&t.b);
        let mul = |f: &[BigInt], g: &[BigInt]| {
            let mut out = vec![BigInt::zero(); f.len() + g.len() - 1];
            for (i, x) in f.iter().enumerate() {
                for (j, y) in g.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        };
        let lin = |k1: &BigInt, f2: &[BigInt], k2: &BigInt, f1: &[BigInt]| -> Vec<BigInt> {
            f2.iter().zip(f1).map(|(x, y)| k1 * x - k2 * y).collect()
        };
        let u = lin(&a1, &c2, &a2, &c1);
        let v = lin(&a1, &b2, &a2, &b1);
        let w: Vec<BigInt> = mul(&b1, &c2).iter().zip(mul(&b2, &c1)).map(|(x, y)| x - y).collect();
        let mut q: Vec<BigInt> = mul(&u, &u).iter().zip(mul(&v, &w)).map(|(x, y)| x - y).collect();
        if q[0].is_zero() {
            continue;
        }
        let content = q.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        q.iter_mut().for_each(|c| *c /= &content);
        // X = q0 x turns q(x, 1) into a monic integer quartic
        let mut coeffs = Vec::with_capacity(4);
        let mut scale = BigInt::from(1);
        for c in &q[1..] {
            coeffs.push(c * &scale);
            scale *= &q[0];
        }
        let f = MonicPoly::new(coeffs).expect("degree 4");
        if !discriminant_monic(&f).is_zero() {
            return Some(f);
        }
    }
    None
}

/// Classification of a separable monic quartic over `Q` by its resolvent cubic
/// and, for a single rational resolvent root, the Kappe–Warren test.
pub fn classify_monic_quartic(f: &MonicPoly<BigInt>) -> Result<QuarticGroup> {
    let c = f.coeffs();
    if c.len() != 4 {
        return Err(Error::InvalidInput("expected a quartic".into()));
    }
    let disc = discriminant_monic(f);
    if disc.is_zero() {
        return Err(Error::ZeroDiscriminant);
    }
    if !is_irreducible_q(f) {
        return Ok(QuarticGroup::Reducible);
    }
    let (a, b, cc, d) = (&c[0], &c[1], &c[2], &c[3]);
    let four = BigInt::from(4);
    let resolvent = MonicPoly::new(vec![
        -b.clone(),
        a * cc - &four * d,
        -(a * a * d - &four * b * d + cc * cc),
    ])
    .expect("cubic");
    let roots = integer_roots(&resolvent);
    let square = is_rational_square(&disc);
    Ok(match roots.len() {
        0 => {
            if square {
                QuarticGroup::A4
            } else {
                QuarticGroup::S4
            }
        }
        1 => {
            let r = &roots[0];
            let splits = |dq: BigInt| is_rational_square(&dq) || is_rational_square(&(dq * &disc));
            if splits(r * r - &four * d) && splits(a * a - &four * (b - r)) {
                QuarticGroup::C4
            } else {
                QuarticGroup::D4
            }
        }
        _ => QuarticGroup::V4,
    })
}

/// Four alternating 5x5 matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlternatingQuadruple {
    pub m: [[[i64; 5]; 5]; 4],
}

/// Monomial order for quaternary quadratic forms.
pub const QUATERNARY_MONOMIALS: [(usize, usize); 10] =
    [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

/// Pfaffian of a 4x4 alternating matrix.
pub fn pf4<T>(m: &[[T; 4]; 4]) -> T
where
    T: Copy + std::ops::Mul<Output = T> + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    m[0][1] * m[2][3] - m[0][2] * m[1][3] + m[0][3] * m[1][2]
}

impl AlternatingQuadruple {
    pub fn new(m: [[[i64; 5]; 5]; 4]) -> Result<Self> {
        for mat in &m {
            for i in 0..5 {
                for j in 0..5 {
                    if mat[i][j] != -mat[j][i] {
                        return Err(Error::InvalidInput("matrices must be alternating".into()));
                    }
                }
            }
        }
        Ok(AlternatingQuadruple { m })
    }

    /// Upper-triangular entries in row order, 10 per matrix.
    pub fn from_upper(entries: &[i64; 40]) -> Self {
        let mut m = [[[0i64; 5]; 5]; 4];
        let mut it = entries.iter();
        for mat in m.iter_mut() {
            for i in 0..5 {
                for j in i + 1..5 {
                    let v = *it.next().expect("40 entries");
                    mat[i][j] = v;
                    mat[j][i] = -v;
                }
            }
        }
        AlternatingQuadruple { m }
    }

    /// The five principal 4x4 sub-Pfaffians of `Ax + By + Cz + Dt`, deleting
    /// row and column `i`, as coefficient vectors over [`QUATERNARY_MONOMIALS`].
    pub fn pfaffian_quadrics(&self) -> [[i64; 10]; 5] {
        let mut out = [[0i64; 10]; 5];
        for (del, q) in out.iter_mut().enumerate() {
            let idx: Vec<usize> = (0..5).filter(|&r| r != del).collect();
            let lin = |j: usize, k: usize| -> [i64; 4] {
                let mut l = [0i64; 4];
                for (v, slot) in l.iter_mut().enumerate() {
                    *slot = self.m[v][idx[j]][idx[k]];
                }
                l
            };
            for (sign, (j1, k1), (j2, k2)) in [(1i64, (0, 1), (2, 3)), (-1, (0, 2), (1, 3)), (1, (0, 3), (1, 2))] {
                let (l1, l2) = (lin(j1, k1), lin(j2, k2));
                for (mi, &(u, v)) in QUATERNARY_MONOMIALS.iter().enumerate() {
                    let c = if u == v { l1[u] * l2[u] } else { l1[u] * l2[v] + l1[v] * l2[u] };
                    q[mi] += sign * c;
                }
            }
        }
        out
    }
}

/// Common zeros in `P^3(F_q)` of quadrics given by coefficient vectors,
/// stopping once the count exceeds `cap`.
///
/// Points are `(0:0:0:1)` and `(x : t)` with `x` in `P^2`; for each `x` one
/// quadric is solved for `t` and the others are checked at its roots.
pub fn census_quadrics(quadrics: &[[i64; 10]], gf: &Gf, roots: &QuadraticRoots, cap: u64) -> u64 {
    let cs: Vec<[u16; 10]> = quadrics.iter().map(|q| q.map(|c| gf.from_int(c))).collect();
    let eval = |c: &[u16; 10], pt: &[u16; 4]| {
        let mut acc = 0u16;
        for (a, &(u, v)) in c.iter().zip(QUATERNARY_MONOMIALS.iter()) {
            if *a != 0 {
                acc = gf.add(acc, gf.mul(*a, gf.mul(pt[u], pt[v])));
            }
        }
        acc
    };
    let mut n = u64::from(cs.iter().all(|c| c[9] == 0));
    let Some(pivot) = cs
        .iter()
        .position(|c| c[9] != 0)
        .or_else(|| cs.iter().position(|c| c[3] != 0 || c[6] != 0 || c[8] != 0))
        .or(if cs.is_empty() { None } else { Some(0) })
    else {
        return (gf.q as u64).pow(3) + (gf.q as u64).pow(2) + gf.q as u64 + 1;
    };
    let piv = cs[pivot];
    let inv_a = gf.inv(piv[9]);
    let mut pt = [0u16; 4];
    gf.for_each_projective_point(2, |x| {
        if n > cap {
            return;
        }
        pt[..3].copy_from_slice(x);
        pt[3] = 0;
        // pivot = a t^2 + b t + c along the line over x
        let b = gf.add(gf.add(gf.mul(piv[3], x[0]), gf.mul(piv[6], x[1])), gf.mul(piv[8], x[2]));
        let c = eval(&piv, &pt);
        let mut check = |t: u16| {
            pt[3] = t;
            if cs.iter().all(|q| eval(q, &pt) == 0) {
                n += 1;
            }
        };
        if piv[9] != 0 {
            roots.roots(gf.mul(b, inv_a), gf.mul(c, inv_a)).iter().for_each(|&t| check(t));
        } else if b != 0 {
            check(gf.mul(gf.neg(c), gf.inv(b)));
        } else if c == 0 {
            (0..gf.q as u16).for_each(check);
        }
    });
    n
}

/// Fields `F_{p^k}`, `k = 1..=5`, reused across quintic censuses.
pub struct QuinticFields {
    pub p: u64,
    fields: Vec<Gf>,
    roots: Vec<QuadraticRoots>,
}

impl QuinticFields {
    pub fn new(p: u64) -> Result<Self> {
        let fields = (1..=5).map(|k| Gf::new(p, k)).collect::<Result<Vec<_>>>()?;
        let roots = fields.iter().map(QuadraticRoots::new).collect();
        Ok(QuinticFields { p, fields, roots })
    }
}

/// Orbit type of the five points cut out by the Pfaffian quadrics over `F_p`.
pub fn splitting_symbol_quintic(q: &AlternatingQuadruple, fields: &QuinticFields) -> Result<CycleType> {
    let quadrics = q.pfaffian_quadrics();
    let mut counts = Vec::with_capacity(5);
    for (gf, roots) in fields.fields.iter().zip(&fields.roots) {
        let n = census_quadrics(&quadrics, gf, roots, 5);
        counts.push(n);
        let exact = orbit_partition(&counts).ok_or(Error::DegenerateScheme)?;
        if exact.iter().sum::<u32>() > 5 {
            return Err(Error::DegenerateScheme);
        }
    }
    let parts = orbit_partition(&counts).ok_or(Error::DegenerateScheme)?;
    if parts.iter().sum::<u32>() != 5 {
        return Err(Error::DegenerateScheme);
    }
    CycleType::new(parts)
}

#[derive(Clone, Debug, Serialize)]
pub struct QuinticMcReport {
    pub format_version: String,
    pub p: u64,
    pub seed: u64,
    pub drawn: u64,
    pub nondegenerate: u64,
    pub degenerate: u64,
    pub counts: BTreeMap<String, u64>,
    pub predicted: BTreeMap<String, String>,
    pub z_scores: BTreeMap<String, f64>,
    pub max_abs_z: f64,
}

/// Sample `i` of the quadruple stream for `seed`.
pub fn random_quadruple(p: u64, seed: u64, i: u64) -> AlternatingQuadruple {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    let mut e = [0i64; 40];
    for slot in e.iter_mut() {
        *slot = rng.gen_range(0..p as i64);
    }
    AlternatingQuadruple::from_upper(&e)
}

/// Draw quadruples in index order until `samples` nondegenerate ones are
/// classified; the result depends only on `(p, samples, seed)`.
pub fn quintic_monte_carlo(p: u64, samples: u64, seed: u64, threads: usize) -> Result<QuinticMcReport> {
    if !is_prime(p) || p.pow(5) > crate::gf::MAX_ORDER as u64 {
        return Err(Error::InvalidInput(format!("quintic census needs a prime p with p^5 <= {}", crate::gf::MAX_ORDER)));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    let fields = QuinticFields::new(p)?;
    let types = partitions(5);
    let mut counts = vec![0u64; types.len()];
    let (mut drawn, mut nondeg, mut degen) = (0u64, 0u64, 0u64);
    let block = 256u64;
    let threads = threads.max(1);
    while nondeg < samples {
        let start = drawn;
        let slots: Vec<std::sync::Mutex<Option<Result<CycleType>>>> =
            (0..block).map(|_| std::sync::Mutex::new(None)).collect();
        let next = std::sync::atomic::AtomicU64::new(0);
        let work = || loop {
            let j = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            if j >= block {
                break;
            }
            let r = splitting_symbol_quintic(&random_quadruple(p, seed, start + j), &fields);
            *slots[j as usize].lock().expect("poisoned") = Some(r);
        };
        if threads == 1 {
            work();
        } else {
            std::thread::scope(|s| {
                for _ in 0..threads {
                    s.spawn(work);
                }
            });
        }
        for slot in slots {
            if nondeg >= samples {
                break;
            }
            drawn += 1;
            match slot.into_inner().expect("poisoned").expect("filled") {
                Ok(t) => {
                    nondeg += 1;
                    counts[types.iter().position(|u| *u == t).expect("partition of 5")] += 1;
                }
                Err(Error::DegenerateScheme) => degen += 1,
                Err(e) => return Err(e),
            }
        }
    }
    let mut rep = QuinticMcReport {
        format_version: crate::monicfamily::FORMAT_VERSION.into(),
        p,
        seed,
        drawn,
        nondegenerate: nondeg,
        degenerate: degen,
        counts: BTreeMap::new(),
        predicted: BTreeMap::new(),
        z_scores: BTreeMap::new(),
        max_abs_z: 0.0,
    };
    for (t, &c) in types.iter().zip(&counts) {
        let pred = BigRational::new(t.class_size().into(), 120.into());
        let pf = crate::conjugacy::rational_to_f64(&pred);
        let sigma = (pf * (1.0 - pf) / nondeg as f64).sqrt();
        let z = (c as f64 / nondeg as f64 - pf) / sigma;
        rep.max_abs_z = rep.max_abs_z.max(z.abs());
        rep.counts.insert(t.to_string(), c);
        rep.predicted.insert(t.to_string(), crate::conjugacy::rational_string(&pred));
        rep.z_scores.insert(t.to_string(), z);
    }
    Ok(rep)
}
