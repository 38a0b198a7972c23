//! One-parameter families of quaternionic fields `K_q = Q(√(qθ))` over a
//! fixed biquadratic field `M = Q(√a, √b)`.
//!
//! Construction follows Witt's criterion: a rational orthogonal pair of
//! three-square decompositions of `a` and `b` gives
//! `θ = 1 + α/√a + μ/√b + (αμ − βλ)/√(ab)`, and every twist `qθ` by a
//! fundamental discriminant coprime to `ab` is again quaternionic.

use crate::arith::{is_fundamental_discriminant, is_prime, is_squarefree, legendre_i, primes_up_to};
use crate::error::{Error, Result};
use crate::family::{FamilyStats, SymbolIndex};
use crate::lowlying::{one_level_density, OneLevelReport, Symmetry};
use crate::monicfamily::{serialize_display, FORMAT_VERSION};
use crate::padic::{embed_biquadratic, sqrt_in_qp, witt_condition, BiquadraticElement};
use crate::polyfactor::SplittingSymbol;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

fn qi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Fixed data of a family: `a`, `b`, the decomposition `(α,β,γ,λ,μ,ν)` and `θ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuaternionParams {
    pub a: i64,
    pub b: i64,
    pub decomposition: [BigRational; 6],
    pub theta: BiquadraticElement,
}

impl Serialize for QuaternionParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("QuaternionParams", 4)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("b", &self.b)?;
        let dec: Vec<String> = self.decomposition.iter().map(|r| r.to_string()).collect();
        st.serialize_field("decomposition", &dec)?;
        let th: Vec<String> = self.theta.c.iter().map(|r| r.to_string()).collect();
        st.serialize_field("theta", &th)?;
        st.end()
    }
}

impl QuaternionParams {
    /// Parameters from the first decomposition found with denominators up to `dmax`.
    pub fn new(a: i64, b: i64, dmax: u32) -> Result<Self> {
        let dec = orthogonal_three_squares(a, b, dmax)?;
        Self::with_decomposition(a, b, dec)
    }

    /// Parameters from a given decomposition, checked against the three
    /// equations and against ramification of `θ` outside `2ab`.
    pub fn with_decomposition(a: i64, b: i64, decomposition: [BigRational; 6]) -> Result<Self> {
        validate_pair(a, b)?;
        let [al, be, ga, la, mu, nu] = &decomposition;
        if al * al + be * be + ga * ga != qi(a) || la * la + mu * mu + nu * nu != qi(b) {
            return Err(Error::InvalidInput("decomposition does not sum to a and b".into()));
        }
        if !(al * la + be * mu + ga * nu).is_zero() {
            return Err(Error::InvalidInput("decomposition is not orthogonal".into()));
        }
        let theta = theta_element(a, b, &decomposition);
        let params = QuaternionParams { a, b, decomposition, theta };
        params.check_theta_unramified()?;
        Ok(params)
    }

    /// Whether 2 is unramified in `M`, which the twist family requires.
    pub fn admits_family(&self) -> bool {
        self.a.rem_euclid(4) == 1 && self.b.rem_euclid(4) == 1
    }

    fn require_family(&self) -> Result<()> {
        if self.admits_family() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "twist family needs a, b ≡ 1 mod 4 so that 2 is unramified in M; got ({}, {})",
                self.a, self.b
            )))
        }
    }

    /// `|ab|`, the squarefree part of `ab`.
    pub fn r_ab(&self) -> BigInt {
        BigInt::from(self.a) * BigInt::from(self.b)
    }

    /// How an odd prime decomposes in `M`.
    pub fn m_type(&self, p: u64) -> MType {
        let (a, b) = (self.a.rem_euclid(p as i64), self.b.rem_euclid(p as i64));
        if a == 0 || b == 0 {
            MType::Ramified
        } else if legendre_i(a, p) == 1 && legendre_i(b, p) == 1 {
            MType::Split
        } else {
            MType::Inert
        }
    }

    /// Rejects `θ` with odd valuation above an odd prime not dividing `ab`:
    /// such a `θ` would make every twist ramified there.
    fn check_theta_unramified(&self) -> Result<()> {
        let n = self.theta.norm();
        if n.is_zero() {
            return Err(Error::InvalidInput("θ is zero".into()));
        }
        let mut primes = Vec::new();
        for part in [n.numer(), n.denom()] {
            let f = crate::arith::factor_bigint(part)
                .ok_or_else(|| Error::InvalidInput("norm of θ too large to factor".into()))?;
            primes.extend(f.into_iter().map(|(p, _)| p));
        }
        primes.sort_unstable();
        primes.dedup();
        for p in primes {
            if p == 2 || self.a % p as i64 == 0 || self.b % p as i64 == 0 {
                continue;
            }
            if theta_valuation(self, p)? % 2 != 0 {
                return Err(Error::InvalidInput(format!("θ is ramified at {p}; choose another decomposition")));
            }
        }
        Ok(())
    }
}

fn validate_pair(a: i64, b: i64) -> Result<()> {
    if a <= 0 || b <= 0 {
        return Err(Error::InvalidInput("a and b must be positive".into()));
    }
    if !is_squarefree(a as u64) || !is_squarefree(b as u64) || a == 1 || b == 1 || a == b {
        return Err(Error::InvalidInput(format!("({a}, {b}) are not distinct squarefree nonsquares")));
    }
    if a.gcd(&b) != 1 {
        return Err(Error::InvalidInput(format!("{a} and {b} are not coprime")));
    }
    Ok(())
}

/// Splitting of an odd prime in `M = Q(√a, √b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MType {
    /// `(1)^4`
    Split,
    /// `(2)^2`
    Inert,
    /// divides `ab`
    Ramified,
}

/// Integer solutions of `A² + B² + C² = n`, ordered by `A` then `B` in
/// the sequence 0, 1, −1, 2, −2, …, with `C ≥ 0` before `C < 0`.
fn three_square_reps(n: i64) -> Vec<[i64; 3]> {
    let r = crate::arith::isqrt(n as u64) as i64;
    let order = |m: i64| std::iter::once(0).chain((1..=m).flat_map(|k| [k, -k]));
    let mut out = Vec::new();
    for x in order(r) {
        let rest = n - x * x;
        for y in order(crate::arith::isqrt(rest as u64) as i64) {
            let c2 = rest - y * y;
            let z = crate::arith::isqrt(c2 as u64) as i64;
            if z * z == c2 {
                out.push([x, y, z]);
                if z != 0 {
                    out.push([x, y, -z]);
                }
            }
        }
    }
    out
}

/// Rationals `(α,β,γ)`, `(λ,μ,ν)` with `α²+β²+γ² = a`, `λ²+μ²+ν² = b`,
/// `αλ+βμ+γν = 0` and denominators at most `dmax`.
pub fn orthogonal_three_squares(a: i64, b: i64, dmax: u32) -> Result<[BigRational; 6]> {
    validate_pair(a, b)?;
    if !witt_condition(a, b)? {
        return Err(Error::InvalidInput(format!("({a}, {b}) fails Witt's condition")));
    }
    let primitive = |v: &[i64; 3], d: i64| v.iter().fold(d, |g, &x| g.gcd(&x)) == 1;
    let b_reps: Vec<(i64, Vec<[i64; 3]>)> =
        (1..=dmax as i64).map(|d| (d, three_square_reps(b * d * d))).collect();
    for d1 in 1..=dmax as i64 {
        for u in three_square_reps(a * d1 * d1).iter().filter(|u| primitive(u, d1)) {
            for (d2, reps) in &b_reps {
                for w in reps.iter().filter(|w| primitive(w, *d2)) {
                    if u[0] * w[0] + u[1] * w[1] + u[2] * w[2] == 0 {
                        let r = |x: i64, d: i64| BigRational::new(BigInt::from(x), BigInt::from(d));
                        return Ok([
                            r(u[0], d1),
                            r(u[1], d1),
                            r(u[2], d1),
                            r(w[0], *d2),
                            r(w[1], *d2),
                            r(w[2], *d2),
                        ]);
                    }
                }
            }
        }
    }
    Err(Error::NotFound)
}

/// `θ = 1 + α/√a + μ/√b + (αμ − βλ)/√(ab)` on the basis `(1, √a, √b, √ab)`.
pub fn theta_element(a: i64, b: i64, dec: &[BigRational; 6]) -> BiquadraticElement {
    let [al, be, _, la, mu, _] = dec;
    BiquadraticElement::new(
        a,
        b,
        [
            BigRational::one(),
            al / qi(a),
            mu / qi(b),
            (al * mu - be * la) / (qi(a) * qi(b)),
        ],
    )
}

/// Valuation of `θ` at one prime of `M` above an odd `p ∤ ab`.
fn theta_valuation(params: &QuaternionParams, p: u64) -> Result<i64> {
    const K: u32 = 24;
    match params.m_type(p) {
        MType::Split => Ok(embed_biquadratic(&params.theta, p, K)?[0].valuation),
        MType::Inert => {
            // p splits in exactly one quadratic subfield Q(√c); primes of M
            // above it are inert, so v_P(θ) is half the valuation of the norm to Q(√c)
            let th = &params.theta;
            let (c, norm, slot) = if legendre_i(params.a, p) == 1 {
                (params.a, th.mul(&th.conj_b()), 1)
            } else if legendre_i(params.b, p) == 1 {
                (params.b, th.mul(&th.conj_a()), 2)
            } else {
                (params.a * params.b, th.mul(&th.conj_a().conj_b()), 3)
            };
            let s = sqrt_in_qp(&qi(c), p, K)?.unit;
            let v = valuation_linear(&norm.c[0], &norm.c[slot], &s, p, K)?;
            debug_assert!(v % 2 == 0);
            Ok(v / 2)
        }
        MType::Ramified => Err(Error::InvalidInput(format!("{p} divides ab"))),
    }
}

/// p-adic valuation of `r0 + r·s` with `s` an integer known modulo `p^k`.
fn valuation_linear(r0: &BigRational, r: &BigRational, s: &BigInt, p: u64, k: u32) -> Result<i64> {
    let den = r0.denom().lcm(r.denom());
    let m = Pow::pow(&BigInt::from(p), k);
    let val = ((r0 * BigRational::from_integer(den.clone())).to_integer()
        + (r * BigRational::from_integer(den.clone())).to_integer() * s)
        .mod_floor(&m);
    if val.is_zero() {
        return Err(Error::InvalidInput(format!("norm of θ vanishes modulo {p}^{k}")));
    }
    Ok(big_valuation(&val, p) as i64 - big_valuation(&den, p) as i64)
}

fn big_valuation(n: &BigInt, p: u64) -> u32 {
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while !n.is_zero() && n.mod_floor(&pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    v
}

/// Minimal polynomial of `√θ` over Q, lowest degree first, with the data
/// certifying that it has degree 8.
#[derive(Clone, Debug, Serialize)]
pub struct DegreeCertificate {
    pub min_poly: Vec<String>,
    /// The four conjugates of `θ` are distinct, so `Q(θ) = M`.
    pub generates_m: bool,
    /// Split primes at which `θ` is not a p-adic square, so `θ ∉ M²`.
    pub nonsquare_witnesses: Vec<u64>,
}

/// `P(Y²)` where `P` is the characteristic polynomial of `θ`; equal to the
/// resultant `Res_X(P(X), X − Y²)`.
pub fn sqrt_theta_poly(theta: &BiquadraticElement) -> Vec<BigRational> {
    let p = theta.char_poly();
    let mut out = vec![BigRational::zero(); 2 * (p.len() - 1) + 1];
    for (i, c) in p.into_iter().enumerate() {
        out[2 * i] = c;
    }
    out
}

/// Certificate that `[Q(√θ) : Q] = 8`: `θ` generates `M` and is not a
/// square in `M` (a non-square image in some `Q_p` rules that out).
pub fn certify_degree(params: &QuaternionParams, witnesses: usize) -> Result<DegreeCertificate> {
    let th = &params.theta;
    let distinct = [th.conj_a(), th.conj_b(), th.conj_a().conj_b()].iter().all(|c| c != th);
    let mut found = Vec::new();
    for p in primes_up_to(10_000).into_iter().skip(1) {
        if found.len() >= witnesses {
            break;
        }
        if params.m_type(p) != MType::Split {
            continue;
        }
        let images = embed_biquadratic(th, p, 24)?;
        if !images[0].is_square()? {
            found.push(p);
        }
    }
    Ok(DegreeCertificate {
        min_poly: sqrt_theta_poly(th).iter().map(|c| c.to_string()).collect(),
        generates_m: distinct,
        nonsquare_witnesses: found,
    })
}

/// Twist parameters `q` with `|q| ≤ qmax`: fundamental discriminants
/// coprime to `ab`, plus the base field `q = 1`, in increasing order.
pub fn twist_parameters(params: &QuaternionParams, qmax: u64) -> Vec<i64> {
    let ab = params.a * params.b;
    let qmax = qmax as i64;
    (-qmax..=qmax).filter(|&q| q == 1 || (is_fundamental_discriminant(q) && q.gcd(&ab) == 1)).collect()
}

/// The splitting types occurring in the family, as symbols on 8 letters.
pub fn q8_symbols() -> Vec<SplittingSymbol> {
    vec![
        sym(1, 1, 8),
        sym(1, 2, 4),
        sym(1, 4, 2),
        sym(2, 1, 4),
        sym(2, 2, 2),
        sym(4, 1, 2),
        sym(4, 2, 1),
    ]
}

fn sym(e: u32, f: u32, g: usize) -> SplittingSymbol {
    SplittingSymbol::new(vec![(e, f); g])
}

/// `χ(Frob^k)` for the 2-dimensional character of Q8, 0 at ramified primes.
pub fn theta_q8(s: &SplittingSymbol, k: u32) -> Result<i64> {
    let fs = s.factors();
    if fs.is_empty() || s.degree() != 8 || fs.iter().any(|&x| x != fs[0]) {
        return Err(Error::UnknownSymbol(s.to_string()));
    }
    match fs[0] {
        (1, 1) => Ok(2),
        (1, 2) => Ok(if k % 2 == 1 { -2 } else { 2 }),
        (1, 4) => Ok(match k % 4 {
            0 => 2,
            2 => -2,
            _ => 0,
        }),
        (e, _) if e > 1 => Ok(0),
        _ => Err(Error::UnknownSymbol(s.to_string())),
    }
}

fn odd_part(q: i64) -> u64 {
    let q = q.unsigned_abs();
    q >> q.trailing_zeros()
}

/// Modular inverse of an odd number modulo 2^64.
fn inv_2adic(x: u64) -> u64 {
    let mut y = x;
    for _ in 0..6 {
        y = y.wrapping_mul(2u64.wrapping_sub(x.wrapping_mul(y)));
    }
    y
}

fn to_u64_wrapping(x: &BigInt) -> u64 {
    x.mod_floor(&(BigInt::one() << 64)).to_u64().expect("reduced modulo 2^64")
}

/// How `qθ` sits in `M ⊗ Q_2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwoAdicClass {
    /// `M_P(√(qθ))/M_P` ramified, so the conductor exponent is 4.
    pub ramified: bool,
    /// `qθ` a square in `M_P = Q_2` (meaningful when 2 splits in `M` and
    /// the extension is unramified).
    pub square: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SubfieldChoice {
    /// `c = b`, `M_P = Q_2(√a)`
    B,
    /// `c = a`, `M_P = Q_2(√b)`
    A,
    /// `c = ab`, `M_P = Q_2(√a)`
    Ab,
}

/// Data for deciding unramifiedness of `K_q` at 2 by Hensel square tests.
#[derive(Clone, Debug)]
struct TwoAdicSetup {
    split: bool,
    choice: SubfieldChoice,
    /// `θ` times the square of its common denominator, coordinates mod 2^64.
    x: [u64; 4],
    /// `√c` for the subfield in which 2 splits (both signs).
    s: [u64; 2],
    /// `√d` when 2 splits completely (both signs).
    t: [u64; 2],
    /// `(d − 1)/4` for the unramified quadratic `M_P = Q_2(√d)`.
    e: u64,
    a_inv: u64,
}

/// Precision ladder for the 2-adic tests; roots are exact to 2^63.
const TWO_ADIC_PRECISIONS: [u32; 4] = [8, 16, 32, 62];

impl TwoAdicSetup {
    fn new(params: &QuaternionParams) -> Result<Self> {
        params.require_family()?;
        let (a, b) = (params.a, params.b);
        let one_mod_8 = |c: i64| c.rem_euclid(8) == 1;
        let split = one_mod_8(a) && one_mod_8(b);
        let (choice, c, d) = if one_mod_8(b) {
            (SubfieldChoice::B, b, a)
        } else if one_mod_8(a) {
            (SubfieldChoice::A, a, b)
        } else {
            (SubfieldChoice::Ab, a * b, a)
        };
        let root = |n: i64| -> Result<[u64; 2]> {
            let r = to_u64_wrapping(&sqrt_in_qp(&qi(n), 2, 64)?.unit);
            Ok([r, r.wrapping_neg()])
        };
        let s = root(c)?;
        let t = if split { root(d)? } else { [0, 0] };
        let den = params.theta.c.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let den2 = BigRational::from_integer(&den * &den);
        let x = [0, 1, 2, 3].map(|i| to_u64_wrapping(&(&params.theta.c[i] * &den2).to_integer()));
        Ok(TwoAdicSetup {
            split,
            choice,
            x,
            s,
            t,
            e: ((d - 1) / 4).rem_euclid(4) as u64,
            a_inv: inv_2adic(a as u64),
        })
    }

    /// `qθ = u + v√d` after embedding `√c ↦ s`.
    fn uv(&self, q: i64, s: u64) -> (u64, u64) {
        let q = q as u64;
        let x = self.x.map(|c| c.wrapping_mul(q));
        let (u, v) = match self.choice {
            SubfieldChoice::B => (x[0].wrapping_add(x[2].wrapping_mul(s)), x[1].wrapping_add(x[3].wrapping_mul(s))),
            SubfieldChoice::A => (x[0].wrapping_add(x[1].wrapping_mul(s)), x[2].wrapping_add(x[3].wrapping_mul(s))),
            SubfieldChoice::Ab => (
                x[0].wrapping_add(x[3].wrapping_mul(s)),
                x[1].wrapping_add(x[2].wrapping_mul(s).wrapping_mul(self.a_inv)),
            ),
        };
        (u, v)
    }

    fn classify_one(&self, q: i64, s: u64, t: u64) -> Result<TwoAdicClass> {
        let (u, v) = self.uv(q, s);
        for k in TWO_ADIC_PRECISIONS {
            let mask = (1u64 << k) - 1;
            if self.split {
                let x = u.wrapping_add(v.wrapping_mul(t)) & mask;
                if x == 0 {
                    continue;
                }
                let m = x.trailing_zeros();
                if m % 2 == 1 {
                    return Ok(TwoAdicClass { ramified: true, square: false });
                }
                if k - m < 3 {
                    continue;
                }
                let y = x >> m;
                return Ok(TwoAdicClass { ramified: y % 4 != 1, square: y % 8 == 1 });
            }
            // basis (1, ω) with ω = (1 + √d)/2: u + v√d = (u − v) + 2v·ω
            let (ca, cb) = (u.wrapping_sub(v) & mask, v.wrapping_mul(2) & mask);
            if ca == 0 && cb == 0 {
                continue;
            }
            let m = ca.trailing_zeros().min(cb.trailing_zeros());
            if m % 2 == 1 {
                return Ok(TwoAdicClass { ramified: true, square: false });
            }
            if k - m < 3 {
                continue;
            }
            let (y0, y1) = ((ca >> m) % 4, (cb >> m) % 4);
            // ω² = ω + e, so (s + tω)² = (s² + e t²) + (2st + t²)ω
            let square_mod_4 = (0..4u64).any(|s0| {
                (0..4u64).any(|t0| (s0 * s0 + self.e * t0 * t0) % 4 == y0 && (2 * s0 * t0 + t0 * t0) % 4 == y1)
            });
            return Ok(TwoAdicClass { ramified: !square_mod_4, square: false });
        }
        Err(Error::Undecided2Adic(*TWO_ADIC_PRECISIONS.last().unwrap()))
    }

    /// The class of `qθ` at 2, checked to agree across the primes of `M`
    /// above 2 (and, if 2 splits, across all four embeddings).
    fn classify(&self, q: i64) -> Result<TwoAdicClass> {
        let ts: &[u64] = if self.split { &self.t } else { &self.t[..1] };
        let mut first = None;
        for &s in &self.s {
            for &t in ts {
                let c = self.classify_one(q, s, t)?;
                match first {
                    None => first = Some(c),
                    Some(f) if f != c => return Err(Error::EmbeddingDisagreement(2)),
                    _ => {}
                }
            }
        }
        Ok(first.expect("at least one embedding"))
    }
}

/// `2^α · r(ab)² · (q*)²` with `α ∈ {0, 4}` from the 2-adic test.
pub fn conductor_kq(params: &QuaternionParams, q: i64) -> Result<BigInt> {
    let setup = TwoAdicSetup::new(params)?;
    check_twist(params, q)?;
    Ok(conductor_from_alpha(params, q, alpha_of(&setup.classify(q)?)))
}

fn alpha_of(c: &TwoAdicClass) -> u32 {
    if c.ramified {
        4
    } else {
        0
    }
}

fn conductor_from_alpha(params: &QuaternionParams, q: i64, alpha: u32) -> BigInt {
    let r = params.r_ab();
    (BigInt::one() << alpha) * &r * &r * BigInt::from(odd_part(q)).pow(2u32)
}

fn check_twist(params: &QuaternionParams, q: i64) -> Result<()> {
    if q != 1 && !(is_fundamental_discriminant(q) && q.gcd(&(params.a * params.b)) == 1) {
        return Err(Error::InvalidInput(format!("{q} is not a fundamental discriminant coprime to ab")));
    }
    Ok(())
}

/// Splitting type of `p` in `K_q`, computed from scratch: at odd `p ∤ abq`
/// split in `M` the four embeddings of `qθ` into `Q_p` are compared.
pub fn splitting_in_kq(params: &QuaternionParams, q: i64, p: u64) -> Result<SplittingSymbol> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    check_twist(params, q)?;
    if p == 2 {
        let c = TwoAdicSetup::new(params)?.classify(q)?;
        return Ok(two_symbol(params, &c));
    }
    let mt = params.m_type(p);
    if mt == MType::Ramified {
        return Ok(ab_symbol(params, p));
    }
    if q.rem_euclid(p as i64) == 0 {
        return Ok(if mt == MType::Split { sym(2, 1, 4) } else { sym(2, 2, 2) });
    }
    if mt == MType::Inert {
        return Ok(sym(1, 4, 2));
    }
    let images = embed_biquadratic(&params.theta.scale(&qi(q)), p, 24)?;
    let mut squares = Vec::with_capacity(4);
    for im in &images {
        if im.valuation % 2 != 0 {
            return Err(Error::RamifiedInput(p));
        }
        squares.push(im.is_square()?);
    }
    if squares.iter().any(|&s| s != squares[0]) {
        return Err(Error::EmbeddingDisagreement(p));
    }
    Ok(if squares[0] { sym(1, 1, 8) } else { sym(1, 2, 4) })
}

fn two_symbol(params: &QuaternionParams, c: &TwoAdicClass) -> SplittingSymbol {
    let split = params.a.rem_euclid(8) == 1 && params.b.rem_euclid(8) == 1;
    match (split, c.ramified) {
        (true, true) => sym(2, 1, 4),
        (false, true) => sym(2, 2, 2),
        (true, false) if c.square => sym(1, 1, 8),
        (true, false) => sym(1, 2, 4),
        (false, false) => sym(1, 4, 2),
    }
}

/// At `p | ab` inertia is cyclic of order 4; the decomposition group is
/// that C4 when `p` has residue degree 1 in `M`, and all of Q8 otherwise.
fn ab_symbol(params: &QuaternionParams, p: u64) -> SplittingSymbol {
    let other = if params.a % p as i64 == 0 { params.b } else { params.a };
    if legendre_i(other, p) == 1 {
        sym(4, 1, 2)
    } else {
        sym(4, 2, 1)
    }
}

/// One twist `K_q` with its conductor and cached splitting types.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistRecord {
    pub q: i64,
    #[serde(serialize_with = "serialize_display")]
    pub conductor: BigInt,
    pub alpha: u32,
    pub splitting: BTreeMap<u64, SplittingSymbol>,
    /// Root number, when supplied from outside; never computed here.
    pub root_number: Option<i8>,
}

#[derive(Clone, Copy, Debug)]
enum Local {
    Two,
    Split { theta_square: bool },
    Inert,
    Ramified(u8),
}

/// A family with per-prime data precomputed for fast splitting lookups.
#[derive(Clone, Debug)]
pub struct QuaternionFamily {
    pub params: QuaternionParams,
    primes: Vec<u64>,
    local: Vec<Local>,
    two: TwoAdicSetup,
    index: SymbolIndex,
}

impl QuaternionFamily {
    /// Precomputes the square class of `θ` at every split prime up to `pmax`,
    /// checking that all four embeddings agree.
    pub fn new(params: QuaternionParams, pmax: u64) -> Result<Self> {
        let two = TwoAdicSetup::new(&params)?;
        let index = SymbolIndex::from_symbols(8, q8_symbols());
        let primes = primes_up_to(pmax);
        let mut local = Vec::with_capacity(primes.len());
        for &p in &primes {
            local.push(if p == 2 {
                Local::Two
            } else {
                match params.m_type(p) {
                    MType::Ramified => Local::Ramified(index.code(&ab_symbol(&params, p))),
                    MType::Inert => Local::Inert,
                    MType::Split => {
                        let images = embed_biquadratic(&params.theta, p, 24)?;
                        let mut sq = Vec::with_capacity(4);
                        for im in &images {
                            if im.valuation % 2 != 0 {
                                return Err(Error::RamifiedInput(p));
                            }
                            sq.push(im.is_square()?);
                        }
                        if sq.iter().any(|&s| s != sq[0]) {
                            return Err(Error::EmbeddingDisagreement(p));
                        }
                        Local::Split { theta_square: sq[0] }
                    }
                }
            });
        }
        Ok(QuaternionFamily { params, primes, local, two, index })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn symbol_index(&self) -> &SymbolIndex {
        &self.index
    }

    pub fn two_adic(&self, q: i64) -> Result<TwoAdicClass> {
        self.two.classify(q)
    }

    fn fill_codes(&self, q: i64, two: &TwoAdicClass, out: &mut [u8]) {
        let code = |s: SplittingSymbol| self.index.code(&s);
        for (i, (&p, l)) in self.primes.iter().zip(&self.local).enumerate() {
            out[i] = match *l {
                Local::Two => code(two_symbol(&self.params, two)),
                Local::Ramified(c) => c,
                Local::Inert => {
                    if q.rem_euclid(p as i64) == 0 {
                        code(sym(2, 2, 2))
                    } else {
                        code(sym(1, 4, 2))
                    }
                }
                Local::Split { theta_square } => match legendre_i(q, p) {
                    0 => code(sym(2, 1, 4)),
                    l if (l == 1) == theta_square => code(sym(1, 1, 8)),
                    _ => code(sym(1, 2, 4)),
                },
            };
        }
    }

    /// Record for one twist parameter.
    pub fn record(&self, q: i64) -> Result<TwistRecord> {
        check_twist(&self.params, q)?;
        let two = self.two.classify(q)?;
        let mut codes = vec![0u8; self.primes.len()];
        self.fill_codes(q, &two, &mut codes);
        let alpha = alpha_of(&two);
        Ok(TwistRecord {
            q,
            conductor: conductor_from_alpha(&self.params, q, alpha),
            alpha,
            splitting: self.primes.iter().zip(&codes).map(|(&p, &c)| (p, self.index.symbol(c).clone())).collect(),
            root_number: None,
        })
    }

    /// All twists with `|q| ≤ qmax` in increasing `q`.
    pub fn enumerate_twists(&self, qmax: u64) -> impl Iterator<Item = Result<TwistRecord>> + '_ {
        twist_parameters(&self.params, qmax).into_iter().map(move |q| self.record(q))
    }

    fn log_conductor(&self, q: i64, alpha: u32) -> f64 {
        alpha as f64 * std::f64::consts::LN_2
            + 2.0 * (self.params.r_ab().to_f64().expect("small")).ln()
            + 2.0 * (odd_part(q) as f64).ln()
    }

    /// Splitting statistics over the twists in `qs`, split into `threads` chunks.
    pub fn stats(&self, qs: &[(i64, TwoAdicClass)], threads: usize) -> FamilyStats {
        let work = |chunk: &[(i64, TwoAdicClass)]| {
            let mut st = FamilyStats::new(&self.index, self.primes.clone());
            let mut codes = vec![0u8; self.primes.len()];
            for (q, two) in chunk {
                self.fill_codes(*q, two, &mut codes);
                st.add(&codes, self.log_conductor(*q, alpha_of(two)));
            }
            st
        };
        let threads = threads.max(1);
        let size = qs.len().div_ceil(threads).max(1);
        let parts: Vec<FamilyStats> = if threads == 1 {
            vec![work(qs)]
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = qs.chunks(size).map(|c| s.spawn(move || work(c))).collect();
                handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
            })
        };
        let mut total = FamilyStats::new(&self.index, self.primes.clone());
        for p in &parts {
            total.merge(p);
        }
        total
    }
}

/// Twist parameters with the 2-adic class of `qθ`.
pub fn twists_with_class(params: &QuaternionParams, qmax: u64) -> Result<Vec<(i64, TwoAdicClass)>> {
    let setup = TwoAdicSetup::new(params)?;
    twist_parameters(params, qmax).into_iter().map(|q| Ok((q, setup.classify(q)?))).collect()
}

fn alpha_histogram(qs: &[(i64, TwoAdicClass)]) -> BTreeMap<u32, u64> {
    let mut out = BTreeMap::new();
    for (_, c) in qs {
        *out.entry(alpha_of(c)).or_insert(0u64) += 1;
    }
    out
}

/// One row of the splitting-density comparison.
#[derive(Clone, Debug, Serialize)]
pub struct DensityRow {
    pub p: u64,
    pub m_type: MType,
    pub counts: BTreeMap<String, u64>,
    pub predicted: BTreeMap<String, f64>,
    pub z: BTreeMap<String, f64>,
}

/// Empirical splitting densities over twists against the local prediction:
/// at an odd `p ∤ ab`, a fraction `1/(p+1)` of fundamental discriminants is
/// divisible by `p`, and the rest split evenly between residues and
/// non-residues. Split primes then give `(1)^8` and `(2)^4` equally often and
/// `(2)^2` primes always give `(4)^2`; averaged over primes with Chebotarev
/// weights 1/4, 3/4 this is the 1/8, 1/8, 3/4 table.
#[derive(Clone, Debug, Serialize)]
pub struct TwistDensityReport {
    pub format_version: String,
    pub params: QuaternionParams,
    pub qmax: u64,
    pub family_size: u64,
    pub alpha_counts: BTreeMap<u32, u64>,
    pub rows: Vec<DensityRow>,
    pub max_abs_z: f64,
    /// Unramified fractions of `(1)^8, (2)^4, (4)^2` averaged over odd `p ∤ ab`.
    pub prime_averaged: [f64; 3],
    pub split_prime_share: f64,
}

/// Predicted fractions at an odd prime `p ∤ ab`.
pub fn predicted_twist_density(mt: MType, p: u64) -> Vec<(SplittingSymbol, f64)> {
    let pf = p as f64;
    let ram = 1.0 / (pf + 1.0);
    match mt {
        MType::Split => vec![
            (sym(1, 1, 8), (1.0 - ram) / 2.0),
            (sym(1, 2, 4), (1.0 - ram) / 2.0),
            (sym(2, 1, 4), ram),
        ],
        MType::Inert => vec![(sym(1, 4, 2), 1.0 - ram), (sym(2, 2, 2), ram)],
        MType::Ramified => Vec::new(),
    }
}

pub fn twist_density_report(
    fam: &QuaternionFamily,
    qmax: u64,
    pmax: u64,
    threads: usize,
) -> Result<TwistDensityReport> {
    let qs = twists_with_class(&fam.params, qmax)?;
    let alpha_counts = alpha_histogram(&qs);
    let stats = fam.stats(&qs, threads);
    let n = stats.total as f64;
    let mut rows = Vec::new();
    let mut max_z: f64 = 0.0;
    let mut avg = [0.0; 3];
    let (mut used, mut split) = (0usize, 0usize);
    for &p in fam.primes().iter().filter(|&&p| p <= pmax) {
        let counts = stats.counts_at(p).expect("cached prime");
        let mt = if p == 2 { None } else { Some(fam.params.m_type(p)) };
        let mut row = DensityRow {
            p,
            m_type: mt.unwrap_or(if fam.two.split { MType::Split } else { MType::Inert }),
            counts: counts.iter().filter(|(_, c)| *c > 0).map(|(s, c)| (s.to_string(), *c)).collect(),
            predicted: BTreeMap::new(),
            z: BTreeMap::new(),
        };
        if let Some(mt @ (MType::Split | MType::Inert)) = mt {
            for (s, pi) in predicted_twist_density(mt, p) {
                let c = stats.count(p, &s) as f64;
                let z = (c - n * pi) / (n * pi * (1.0 - pi)).sqrt();
                max_z = max_z.max(z.abs());
                row.predicted.insert(s.to_string(), pi);
                row.z.insert(s.to_string(), z);
            }
            let unram: f64 = [sym(1, 1, 8), sym(1, 2, 4), sym(1, 4, 2)].iter().map(|s| stats.count(p, s) as f64).sum();
            for (slot, s) in [sym(1, 1, 8), sym(1, 2, 4), sym(1, 4, 2)].iter().enumerate() {
                avg[slot] += stats.count(p, s) as f64 / unram;
            }
            used += 1;
            split += (mt == MType::Split) as usize;
        }
        rows.push(row);
    }
    let used_f = used.max(1) as f64;
    Ok(TwistDensityReport {
        format_version: FORMAT_VERSION.into(),
        params: fam.params.clone(),
        qmax,
        family_size: stats.total,
        alpha_counts,
        rows,
        max_abs_z: max_z,
        prime_averaged: avg.map(|x| x / used_f),
        split_prime_share: split as f64 / used_f,
    })
}

/// The one-level density experiment over twists with `|q| ≤ qmax`.
#[derive(Clone, Debug, Serialize)]
pub struct QuaternionOneLevel {
    pub params: QuaternionParams,
    pub qmax: u64,
    pub alpha_counts: BTreeMap<u32, u64>,
    pub report: OneLevelReport,
}

/// Runs the explicit formula with the Q8 character: conductors first, then
/// splitting types at every prime the test function reaches.
pub fn quaternion_one_level(params: &QuaternionParams, qmax: u64, sigma: f64, threads: usize) -> Result<QuaternionOneLevel> {
    let qs = twists_with_class(params, qmax)?;
    let alpha_counts = alpha_histogram(&qs);
    let r = params.r_ab().to_f64().expect("small");
    let sum_log: f64 = qs
        .iter()
        .map(|(q, c)| alpha_of(c) as f64 * std::f64::consts::LN_2 + 2.0 * r.ln() + 2.0 * (odd_part(*q) as f64).ln())
        .sum();
    let l = sum_log / qs.len() as f64;
    let pmax = (l * sigma).exp().ceil() as u64 + 1;
    let fam = QuaternionFamily::new(params.clone(), pmax)?;
    let stats = fam.stats(&qs, threads);
    let theta = |s: &SplittingSymbol, k: u32| theta_q8(s, k).expect("family symbols are Q8 types");
    let report = one_level_density(&stats, qmax as f64, sigma, Symmetry::SO, &theta)?;
    Ok(QuaternionOneLevel { params: params.clone(), qmax, alpha_counts, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn dec(v: [i64; 6]) -> [BigRational; 6] {
        v.map(qi)
    }

    #[test]
    fn theta_for_2_3() {
        let p = QuaternionParams::with_decomposition(2, 3, dec([1, 1, 0, 1, -1, 1])).unwrap();
        assert_eq!(p.theta.c, [qi(1), r(1, 2), r(-1, 3), r(-2, 6)]);
        assert!(!p.admits_family());
    }

    #[test]
    fn norm_identity() {
        for (a, b, d) in [(2, 3, [1, 1, 0, 1, -1, 1]), (5, 41, [0, 1, 2, 6, -2, 1])] {
            let p = QuaternionParams::with_decomposition(a, b, dec(d)).unwrap();
            let [al, _, ga, la, _, nu] = &p.decomposition;
            // (1/b)(ν + (αν − γλ)/√a)² in Q(√a)
            let y = BiquadraticElement::new(a, b, [nu.clone(), (al * nu - ga * la) / qi(a), qi(0), qi(0)]);
            let want = y.mul(&y).scale(&r(1, b));
            assert_eq!(p.theta.norm_to_sqrt_a(), want);
        }
    }

    #[test]
    fn search_finds_valid_decompositions() {
        for (a, b) in [(2, 3), (5, 41), (5, 29), (13, 17)] {
            let p = QuaternionParams::new(a, b, 6).unwrap();
            assert_eq!(p.theta.c[0], qi(1));
        }
        assert!(orthogonal_three_squares(163, 14, 4).is_err());
        assert!(orthogonal_three_squares(3, 7, 4).is_err());
    }

    #[test]
    fn q8_character() {
        assert_eq!(theta_q8(&sym(1, 2, 4), 1).unwrap(), -2);
        assert_eq!(theta_q8(&sym(1, 4, 2), 2).unwrap(), -2);
        assert_eq!(theta_q8(&sym(1, 4, 2), 4).unwrap(), 2);
        assert_eq!(theta_q8(&sym(1, 4, 2), 3).unwrap(), 0);
        assert_eq!(theta_q8(&sym(2, 1, 4), 2).unwrap(), 0);
        assert_eq!(theta_q8(&sym(4, 2, 1), 5).unwrap(), 0);
        assert!(theta_q8(&SplittingSymbol::unramified(&[3, 1]), 1).is_err());
    }

    #[test]
    fn fast_path_matches_direct_computation() {
        let params = QuaternionParams::new(5, 41, 4).unwrap();
        let fam = QuaternionFamily::new(params.clone(), 200).unwrap();
        for q in twist_parameters(&params, 60) {
            let rec = fam.record(q).unwrap();
            for (&p, s) in &rec.splitting {
                assert_eq!(&splitting_in_kq(&params, q, p).unwrap(), s, "q={q} p={p}");
            }
        }
    }

    #[test]
    fn alpha_depends_on_square_class_only() {
        let params = QuaternionParams::new(5, 41, 4).unwrap();
        let mut by_class: BTreeMap<i64, u32> = BTreeMap::new();
        for (q, c) in twists_with_class(&params, 3000).unwrap() {
            let a = alpha_of(&c);
            // q and q·u² with u odd share a class in Q_2^×/(Q_2^×)²
            let v = q.trailing_zeros();
            let class = ((q >> v).rem_euclid(8)) * 8 + v as i64;
            if let Some(&prev) = by_class.get(&class) {
                assert_eq!(prev, a, "q={q}");
            }
            by_class.insert(class, a);
        }
    }
}
