//! Binary cubic forms `a x^3 + b x^2 y + c x y^2 + d y^3` under the twisted
//! GL2(Z) action, Davenport–Heilbronn maximality, splitting of primes in the
//! associated cubic rings, and a tabulation of cubic fields by discriminant.

use crate::arith::{factor_u64, is_fundamental_discriminant, SpfTable};
use crate::conjugacy::CycleType;
use crate::error::{Error, Result};
use crate::family::{FamilyStats, SymbolIndex};
use crate::fp::FpPoly;
use crate::polyfactor::SplittingSymbol;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, OnceLock};

/// A 2x2 integer matrix acting on row vectors: `(x, y) ↦ (x, y) g`.
pub type Mat2 = [[i64; 2]; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BinaryCubicForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl fmt::Display for BinaryCubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.a, self.b, self.c, self.d)
    }
}

const REDUCTION_TOL: f64 = 1e-9;

impl BinaryCubicForm {
    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        BinaryCubicForm { a, b, c, d }
    }

    pub fn coeffs(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs() == [0; 4]
    }

    pub fn disc(&self) -> i128 {
        let [a, b, c, d] = self.coeffs().map(|v| v as i128);
        b * b * c * c + 18 * a * b * c * d - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        let [a, b, c, d] = self.coeffs().map(|v| v as i128);
        ((a * x + b * y) * x + c * y * y) * x + d * y * y * y
    }

    /// `∂f/∂x (x, y)`.
    pub fn eval_dx(&self, x: i128, y: i128) -> i128 {
        let [a, b, c, _] = self.coeffs().map(|v| v as i128);
        3 * a * x * x + 2 * b * x * y + c * y * y
    }

    /// Hessian covariant `(P, Q, R)` for `P x^2 + Q x y + R y^2`, with `Q^2 - 4PR = -3Δ`.
    pub fn hessian(&self) -> (i128, i128, i128) {
        let [a, b, c, d] = self.coeffs().map(|v| v as i128);
        (b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d)
    }

    /// Twisted action `(g·f)(x, y) = f((x, y) g) / det g` for `g` in GL2(Z).
    pub fn act(&self, g: &Mat2) -> Self {
        let det = g[0][0] as i128 * g[1][1] as i128 - g[0][1] as i128 * g[1][0] as i128;
        assert!(det == 1 || det == -1, "matrix not in GL2(Z)");
        // X = g00 x + g10 y, Y = g01 x + g11 y, as coefficient pairs of (x, y)
        let lx = [g[0][0] as i128, g[1][0] as i128];
        let ly = [g[0][1] as i128, g[1][1] as i128];
        let mul = |p: &[i128], l: &[i128; 2]| -> Vec<i128> {
            let mut out = vec![0i128; p.len() + 1];
            for (i, &c) in p.iter().enumerate() {
                out[i] += c * l[0];
                out[i + 1] += c * l[1];
            }
            out
        };
        let x2 = mul(&lx, &lx);
        let x3 = mul(&x2, &lx);
        let x2y = mul(&x2, &ly);
        let xy2 = mul(&mul(&lx, &ly), &ly);
        let y3 = mul(&mul(&ly, &ly), &ly);
        let [a, b, c, d] = self.coeffs().map(|v| v as i128);
        let coef: Vec<i64> = (0..4)
            .map(|i| {
                let v = (a * x3[i] + b * x2y[i] + c * xy2[i] + d * y3[i]) * det;
                i64::try_from(v).expect("coefficient overflow in GL2 action")
            })
            .collect();
        BinaryCubicForm::new(coef[0], coef[1], coef[2], coef[3])
    }

    /// For Δ < 0: `(u, N)` where the complex root of `f(x, 1)` is `s = u + iv` and `N = |s|^2`.
    fn complex_root_data(&self) -> (f64, f64) {
        if self.a == 0 {
            // real root at infinity; the complex pair are the roots of b s^2 + c s + d
            let (b, c, d) = (self.b as f64, self.c as f64, self.d as f64);
            return (-c / (2.0 * b), d / b);
        }
        let r = real_root(self);
        let (a, b, c) = (self.a as f64, self.b as f64, self.c as f64);
        let u = -(b / a + r) / 2.0;
        let n = c / a - 2.0 * u * r;
        (u, n)
    }

    /// Whether the form is reduced (with the twisted-action-invariant
    /// tolerance used for Δ < 0).
    pub fn is_reduced(&self) -> bool {
        let disc = self.disc();
        if disc > 0 {
            let (p, q, r) = self.hessian();
            q.abs() <= p && p <= r
        } else if disc < 0 {
            let (u, n) = self.complex_root_data();
            u.abs() <= 0.5 + REDUCTION_TOL && n >= 1.0 - REDUCTION_TOL
        } else {
            false
        }
    }

    /// A reduced form in the GL2(Z)-orbit, or `None` for Δ = 0.
    pub fn reduce(&self) -> Option<Self> {
        let disc = self.disc();
        if disc == 0 {
            return None;
        }
        let mut f = *self;
        for _ in 0..10_000 {
            if disc > 0 {
                let (p, q, r) = f.hessian();
                if q.abs() > p {
                    let k = round_div(q, 2 * p);
                    f = f.act(&[[1, 0], [-(k as i64), 1]]);
                } else if p > r {
                    f = f.act(&[[0, 1], [1, 0]]);
                } else {
                    return Some(f);
                }
            } else {
                let (u, n) = f.complex_root_data();
                if u.abs() > 0.5 + REDUCTION_TOL {
                    let k = u.round() as i64;
                    f = f.act(&[[1, 0], [k, 1]]);
                } else if n < 1.0 - REDUCTION_TOL {
                    f = f.act(&[[0, -1], [1, 0]]);
                } else {
                    return Some(f);
                }
            }
        }
        panic!("reduction of {self} did not terminate");
    }

    /// Canonical representative of a reduced form: the lexicographically
    /// least reduced form with positive leading coefficient among its images
    /// under matrices with entries in {-1, 0, 1}.
    pub fn canonical_of_reduced(&self) -> Self {
        let mut best: Option<Self> = None;
        for g in small_matrices() {
            let h = self.act(g);
            let positive = h.coeffs().iter().find(|&&v| v != 0).is_some_and(|&v| v > 0);
            if positive && best.is_none_or(|b| h < b) && h.is_reduced() {
                best = Some(h);
            }
        }
        best.expect("reduced form has a sign-normalized reduced image")
    }

    /// Canonical orbit representative.
    pub fn canonical(&self) -> Option<Self> {
        self.reduce().map(|f| f.canonical_of_reduced())
    }

    /// Irreducible over Q (no rational linear factor).
    pub fn is_irreducible(&self) -> bool {
        if self.a == 0 || self.d == 0 || self.disc() == 0 {
            return false;
        }
        for r in real_roots(self) {
            for q in divisors(self.a.unsigned_abs()) {
                let p = (r * q as f64).round() as i128;
                if self.eval(p, q as i128) == 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Davenport–Heilbronn maximality at `p`.
    pub fn is_dh_maximal(&self, p: u64) -> Result<bool> {
        if self.disc() == 0 {
            return Err(Error::ZeroDiscriminant);
        }
        Ok(self.dh_maximal_unchecked(p))
    }

    fn dh_maximal_unchecked(&self, p: u64) -> bool {
        let pi = p as i128;
        let p2 = pi * pi;
        let [a, b, c, d] = self.coeffs().map(|v| v as i128);
        if a % pi == 0 && b % pi == 0 && c % pi == 0 && d % pi == 0 {
            return false;
        }
        if a % p2 == 0 && b % pi == 0 {
            return false;
        }
        for t in 0..pi {
            if self.eval(t, 1) % p2 == 0 && self.eval_dx(t, 1) % pi == 0 {
                return false;
            }
        }
        true
    }

    /// Number of distinct projective roots modulo `p`.
    fn projective_roots_mod(&self, p: u64) -> usize {
        let pi = p as i128;
        let at_inf = (self.a as i128 % pi == 0) as usize;
        if p < 128 {
            return at_inf + (0..pi).filter(|&t| self.eval(t, 1) % pi == 0).count();
        }
        let poly = FpPoly::new(p, [self.d, self.c, self.b, self.a].iter().map(|&v| crate::arith::rem_i(v, p)).collect());
        let xp = FpPoly::x(p).pow_mod(p as u128, &poly);
        let g = xp.sub(&FpPoly::x(p)).gcd(&poly);
        at_inf + g.deg()
    }

    /// Splitting of `p` in the cubic ring of the form (requires maximality at `p`).
    pub fn splitting_symbol(&self, p: u64) -> Result<SplittingSymbol> {
        let disc = self.disc();
        if disc == 0 {
            return Err(Error::ZeroDiscriminant);
        }
        if !self.dh_maximal_unchecked(p) {
            return Err(Error::NotPMaximal(p));
        }
        Ok(symbol_from_roots(self.projective_roots_mod(p), disc % p as i128 == 0))
    }

    /// Totally ramified at `p`, for a form maximal at `p`.
    fn totally_ramified_at(&self, p: u64) -> bool {
        if self.disc() % p as i128 != 0 {
            return false;
        }
        if p <= 3 {
            return self.projective_roots_mod(p) == 1;
        }
        // for p >= 5 the form is a cube mod p exactly when its Hessian vanishes mod p
        let (hp, hq, hr) = self.hessian();
        let pi = p as i128;
        hp % pi == 0 && hq % pi == 0 && hr % pi == 0
    }
}

fn symbol_from_roots(roots: usize, p_divides_disc: bool) -> SplittingSymbol {
    let s = match (p_divides_disc, roots) {
        (false, 0) => "1:3",
        (false, 1) => "1:2+1:1",
        (false, _) => "1:1+1:1+1:1",
        (true, 1) => "3:1",
        (true, _) => "2:1+1:1",
    };
    s.parse().expect("valid symbol")
}

/// `splitting_symbol_cubic` as a free function.
pub fn splitting_symbol_cubic(f: &BinaryCubicForm, p: u64) -> Result<SplittingSymbol> {
    f.splitting_symbol(p)
}

pub fn disc_cubic(f: &BinaryCubicForm) -> i128 {
    f.disc()
}

fn round_div(q: i128, d: i128) -> i128 {
    // nearest integer to q/d for d > 0
    (2 * q + d).div_euclid(2 * d)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor_u64(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out
}

fn polish(f: &BinaryCubicForm, mut x: f64) -> f64 {
    let (a, b, c, d) = (f.a as f64, f.b as f64, f.c as f64, f.d as f64);
    for _ in 0..4 {
        let v = ((a * x + b) * x + c) * x + d;
        let dv = (3.0 * a * x + 2.0 * b) * x + c;
        if dv == 0.0 {
            break;
        }
        let step = v / dv;
        x -= step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// The real root of a form with Δ < 0 (as a root of `f(x, 1)`).
fn real_root(f: &BinaryCubicForm) -> f64 {
    let a = f.a as f64;
    let (b, c, d) = (f.b as f64 / a, f.c as f64 / a, f.d as f64 / a);
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let s = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
    let t = (-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt();
    polish(f, t - b / 3.0)
}

/// Real roots of `f(x, 1)` for `a ≠ 0`.
fn real_roots(f: &BinaryCubicForm) -> Vec<f64> {
    if f.disc() < 0 {
        return vec![real_root(f)];
    }
    let a = f.a as f64;
    let (b, c, d) = (f.b as f64 / a, f.c as f64 / a, f.d as f64 / a);
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    if p.abs() < 1e-300 {
        return vec![polish(f, -b / 3.0)];
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = ((3.0 * q / (p * m)) * 1.0).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    (0..3)
        .map(|k| polish(f, m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - b / 3.0))
        .collect()
}

/// Matrices in GL2(Z) with entries in {-1, 0, 1}.
pub fn small_matrices() -> &'static [Mat2] {
    static CELL: OnceLock<Vec<Mat2>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out = Vec::new();
        for e in 0..81 {
            let v = [e % 3, (e / 3) % 3, (e / 9) % 3, (e / 27) % 3].map(|t| t as i64 - 1);
            let g = [[v[0], v[1]], [v[2], v[3]]];
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            if det.abs() == 1 {
                out.push(g);
            }
        }
        out
    })
}

/// Exact census of binary cubic forms over F_p with nonzero discriminant by
/// projective splitting type (0, 1 or 3 roots give (3), (21), (111)).
pub fn fp_form_type_counts(p: u64) -> (Vec<(CycleType, u64)>, u64) {
    let mut counts = [0u64; 4];
    let pi = p as i128;
    for e in 0..p.pow(4) {
        let f = BinaryCubicForm::new((e % p) as i64, (e / p % p) as i64, (e / p / p % p) as i64, (e / p / p / p) as i64);
        if f.disc() % pi == 0 {
            continue;
        }
        counts[f.projective_roots_mod(p)] += 1;
    }
    let total = counts[0] + counts[1] + counts[3];
    debug_assert_eq!(counts[2], 0);
    let ct = |v: Vec<u32>| CycleType::new(v).expect("valid");
    (vec![(ct(vec![3]), counts[0]), (ct(vec![2, 1]), counts[1]), (ct(vec![1, 1, 1]), counts[3])], total)
}

/// Fundamental discriminant of the quadratic algebra Q(√d), 1 when d is a square.
pub fn fundamental_discriminant(d: i64) -> i64 {
    assert!(d != 0, "discriminant must be nonzero");
    let core: i64 = factor_u64(d.unsigned_abs())
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p as i64)
        .product::<i64>()
        * d.signum();
    if core.rem_euclid(4) == 1 {
        core
    } else {
        4 * core
    }
}

/// Quadratic resolvent of an unramified cubic Frobenius.
pub fn resolvent_splitting(sigma: &CycleType) -> Result<CycleType> {
    match sigma.parts.as_slice() {
        [1, 1, 1] | [3] => Ok(CycleType::identity(2)),
        [2, 1] => Ok(CycleType::new(vec![2])?),
        _ => Err(Error::InvalidInput(format!("{sigma} is not an unramified cubic type"))),
    }
}

/// One cubic field: its canonical form and arithmetic data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CubicFieldRecord {
    pub form: BinaryCubicForm,
    pub disc: i64,
    pub fundamental_resolvent_disc: i64,
    /// Nowhere totally ramified.
    pub ntr: bool,
    /// Symbol codes at the tabulation's cached primes.
    pub splitting: Vec<u8>,
}

/// All cubic fields with `0 < |Δ| < x`, with splitting symbols at a fixed list of primes.
#[derive(Clone, Debug)]
pub struct CubicTabulation {
    pub x: u64,
    pub primes: Vec<u64>,
    pub index: SymbolIndex,
    pub records: Vec<CubicFieldRecord>,
}

impl CubicTabulation {
    pub fn symbol_at(&self, r: &CubicFieldRecord, p: u64) -> Option<&SplittingSymbol> {
        let i = self.primes.binary_search(&p).ok()?;
        Some(self.index.symbol(r.splitting[i]))
    }

    pub fn stats(&self) -> FamilyStats {
        let mut s = FamilyStats::new(&self.index, self.primes.clone());
        for r in &self.records {
            s.add(&r.splitting, (r.disc.unsigned_abs() as f64).ln());
        }
        s
    }

    pub fn count(&self) -> usize {
        self.records.len()
    }

    /// CSV with columns `a,b,c,d,disc,ntr,resolvent_disc,p2,p3,...`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = String::from("a,b,c,d,disc,ntr,resolvent_disc");
        for p in &self.primes {
            header.push_str(&format!(",p{p}"));
        }
        writeln!(w, "{header}")?;
        for r in &self.records {
            let f = r.form;
            write!(w, "{},{},{},{},{},{},{}", f.a, f.b, f.c, f.d, r.disc, r.ntr, r.fundamental_resolvent_disc)?;
            for &c in &r.splitting {
                write!(w, ",{}", self.index.symbol(c))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

pub fn quadratic_resolvent_disc(r: &CubicFieldRecord) -> Result<i64> {
    if !r.ntr {
        return Err(Error::TotallyRamifiedSomewhere);
    }
    Ok(r.fundamental_resolvent_disc)
}

/// `#Cl(d)[3] = 1 + 2·#{cubic fields of discriminant d}` for a fundamental discriminant `d`.
pub fn cl3(d: i64, tab: &CubicTabulation) -> Result<u64> {
    if !is_fundamental_discriminant(d) || d == 1 {
        return Err(Error::InvalidInput(format!("{d} is not a fundamental discriminant")));
    }
    if d.unsigned_abs() >= tab.x {
        return Err(Error::InsufficientTabulation(d));
    }
    let k = tab.records.iter().filter(|r| r.disc == d && r.ntr).count() as u64;
    Ok(1 + 2 * k)
}

enum Factorer {
    Table(SpfTable),
    Rho,
}

impl Factorer {
    fn new(x: u64) -> Self {
        if x <= 50_000_000 {
            Factorer::Table(SpfTable::new(x as usize))
        } else {
            Factorer::Rho
        }
    }

    fn factor(&self, n: u64) -> Vec<(u64, u32)> {
        match self {
            Factorer::Table(t) if n <= t.limit() => t.factor(n),
            _ => factor_u64(n),
        }
    }
}

struct Shard {
    positive: bool,
    a: i64,
}

fn build_record(f: BinaryCubicForm, disc: i128, factorer: &Factorer, primes: &[u64], index: &SymbolIndex) -> Option<CubicFieldRecord> {
    let fac = factorer.factor(disc.unsigned_abs() as u64);
    for &(p, e) in &fac {
        if e >= 2 && !f.dh_maximal_unchecked(p) {
            return None;
        }
    }
    if !f.is_irreducible() {
        return None;
    }
    if f.canonical_of_reduced() != f {
        return None;
    }
    let disc = disc as i64;
    let ntr = fac.iter().all(|&(p, _)| !f.totally_ramified_at(p));
    let splitting = primes
        .iter()
        .map(|&p| index.code(&symbol_from_roots(f.projective_roots_mod(p), disc % p as i64 == 0)))
        .collect();
    Some(CubicFieldRecord { form: f, disc, fundamental_resolvent_disc: fundamental_discriminant(disc), ntr, splitting })
}

fn shard_positive(a: i64, x: u64, emit: &mut dyn FnMut(BinaryCubicForm, i128)) {
    let pmax = crate::arith::isqrt(x.saturating_sub(1)) as i64;
    let ai = a as i128;
    let bmax = (1.5 * a as f64 + (pmax as f64).sqrt()).floor() as i64 + 1;
    for b in -bmax..=bmax {
        let b2 = (b as i128) * (b as i128);
        // 1 <= P = b^2 - 3ac <= pmax
        let c_lo = (b2 - pmax as i128).div_euclid(3 * ai) + ((b2 - pmax as i128).rem_euclid(3 * ai) != 0) as i128;
        let c_hi = (b2 - 1).div_euclid(3 * ai);
        for c in c_lo..=c_hi {
            let p = b2 - 3 * ai * c;
            let bc = b as i128 * c;
            // |Q| = |bc - 9ad| <= P
            let d_lo = (bc - p).div_euclid(9 * ai) + ((bc - p).rem_euclid(9 * ai) != 0) as i128;
            let d_hi = (bc + p).div_euclid(9 * ai);
            for d in d_lo..=d_hi {
                let f = BinaryCubicForm::new(a, b, c as i64, d as i64);
                let (_, _, r) = f.hessian();
                if r < p {
                    continue;
                }
                let disc = f.disc();
                if disc > 0 && disc < x as i128 {
                    emit(f, disc);
                }
            }
        }
    }
}

fn shard_negative(a: i64, x: u64, emit: &mut dyn FnMut(BinaryCubicForm, i128)) {
    let xf = x as f64;
    let af = a as f64;
    let slack = 1.0 + 1e-6;
    let w = (xf / (3.0 * af.powi(4))).powf(0.25) * slack + 1e-6;
    let v2 = (xf / (4.0 * af.powi(4))).powf(1.0 / 3.0) * slack + 1e-6;
    let bmax = (af * (w + 1.5)).floor() as i64 + 1;
    let c_lo = (-af * w).floor() as i64 - 1;
    let c_hi = (af * (w + 0.75 + v2)).ceil() as i64 + 1;
    let dmax = (af * (w + 0.5) * (0.25 + v2)).ceil() as i64 + 1;
    let ai = a as i128;
    for b in -bmax..=bmax {
        for c in c_lo..=c_hi {
            let (bi, ci) = (b as i128, c as i128);
            let beta = (18 * ai * bi * ci - 4 * bi * bi * bi) as f64;
            let gamma = (bi * bi * ci * ci - 4 * ai * ci * ci * ci) as f64;
            let disc_d = beta * beta + 108.0 * af * af * (gamma + xf);
            if disc_d < 0.0 {
                continue;
            }
            let sq = disc_d.sqrt();
            let lo = (((beta - sq) / (54.0 * af * af)).floor() as i64 - 1).max(-dmax);
            let hi = (((beta + sq) / (54.0 * af * af)).ceil() as i64 + 1).min(dmax);
            for d in lo..=hi {
                let f = BinaryCubicForm::new(a, b, c, d);
                let disc = f.disc();
                if disc < 0 && -disc < x as i128 && f.is_reduced() {
                    emit(f, disc);
                }
            }
        }
    }
}

/// Reduced forms with `a > 0` and `0 < ±Δ < x` (all of them, before the
/// irreducibility, maximality and canonical filters).
pub fn reduced_forms(x: u64, positive: bool) -> Vec<BinaryCubicForm> {
    let mut out = Vec::new();
    for a in 1..=a_max(x, positive) {
        let mut emit = |f: BinaryCubicForm, _d: i128| out.push(f);
        if positive {
            shard_positive(a, x, &mut emit)
        } else {
            shard_negative(a, x, &mut emit)
        }
    }
    out
}

fn a_max(x: u64, positive: bool) -> i64 {
    let xf = x as f64;
    let bound = if positive { (4.0f64 / 27.0).sqrt() * xf.powf(0.25) } else { (16.0 * xf / 27.0).powf(0.25) };
    (bound * (1.0 + 1e-9)).floor() as i64 + 1
}

/// Tabulate cubic fields with `0 < |Δ| < x`, one record per GL2(Z)-orbit of
/// irreducible maximal forms, ordered by (sign of Δ descending, a, b, c, d).
pub fn enumerate_cubic_fields(x: u64, primes: &[u64], threads: usize) -> Result<CubicTabulation> {
    if x < 2 {
        return Err(Error::InvalidInput("x must be at least 2".into()));
    }
    if x > 100_000_000 {
        return Err(Error::InvalidInput("x above 1e8 is not supported".into()));
    }
    let index = SymbolIndex::new(3);
    let factorer = Factorer::new(x);
    let mut shards = Vec::new();
    for positive in [true, false] {
        for a in 1..=a_max(x, positive) {
            shards.push(Shard { positive, a });
        }
    }
    let results: Vec<Mutex<Vec<CubicFieldRecord>>> = shards.iter().map(|_| Mutex::new(Vec::new())).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        if i >= shards.len() {
            break;
        }
        let s = &shards[i];
        let mut local = Vec::new();
        let mut emit = |f: BinaryCubicForm, disc: i128| {
            if let Some(r) = build_record(f, disc, &factorer, primes, &index) {
                local.push(r);
            }
        };
        if s.positive {
            shard_positive(s.a, x, &mut emit);
        } else {
            shard_negative(s.a, x, &mut emit);
        }
        *results[i].lock().expect("poisoned") = local;
    };
    let threads = threads.max(1);
    if threads == 1 {
        work();
    } else {
        std::thread::scope(|sc| {
            for _ in 0..threads {
                sc.spawn(work);
            }
        });
    }
    let records = results.into_iter().flat_map(|m| m.into_inner().expect("poisoned")).collect();
    Ok(CubicTabulation { x, primes: primes.to_vec(), index, records })
}

/// Predicted share of fields with unramified type `tau` at `p`.
pub fn predicted_type_density(p: u64, tau: &CycleType) -> f64 {
    let pf = p as f64;
    let size = tau.class_size().to_f64().expect("small") / 6.0;
    size * pf * pf / (pf * pf + pf + 1.0)
}

/// [`predicted_type_density`] as an exact rational.
pub fn predicted_type_density_exact(p: u64, tau: &CycleType) -> num_rational::BigRational {
    use num_bigint::BigInt;
    let p2 = BigInt::from(p) * BigInt::from(p);
    let size = BigInt::from(tau.class_size());
    num_rational::BigRational::new(size * &p2, BigInt::from(6) * (&p2 + BigInt::from(p) + BigInt::from(1)))
}

/// Predicted share of fields ramified at `p`.
pub fn predicted_ramified_density(p: u64) -> f64 {
    let pf = p as f64;
    (pf + 1.0) / (pf * pf + pf + 1.0)
}

/// Counts of each splitting type at `p` in a tabulation.
pub fn type_counts_at(tab: &CubicTabulation, p: u64) -> Option<BTreeMap<SplittingSymbol, u64>> {
    let i = tab.primes.binary_search(&p).ok()?;
    let mut m = BTreeMap::new();
    for r in &tab.records {
        *m.entry(tab.index.symbol(r.splitting[i]).clone()).or_insert(0) += 1;
    }
    Some(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfactor::{discriminant_monic, MonicPoly64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn form(a: i64, b: i64, c: i64, d: i64) -> BinaryCubicForm {
        BinaryCubicForm::new(a, b, c, d)
    }

    fn random_unimodular(rng: &mut ChaCha8Rng, steps: usize) -> Mat2 {
        let mut g: Mat2 = [[1, 0], [0, 1]];
        for _ in 0..steps {
            let h: Mat2 = match rng.gen_range(0..4) {
                0 => [[1, 0], [rng.gen_range(-2..=2), 1]],
                1 => [[1, rng.gen_range(-2..=2)], [0, 1]],
                2 => [[0, 1], [1, 0]],
                _ => [[-1, 0], [0, 1]],
            };
            g = [
                [g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]],
                [g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]],
            ];
        }
        g
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(form(1, 0, 0, 7).disc(), -1323);
        assert_eq!(form(1, 0, 0, 7).disc(), discriminant_monic(&MonicPoly64::from_i64(&[0, 0, 7]).unwrap()) as i128);
        assert_eq!(form(1, 0, -1, 0).disc(), 4);
        assert_eq!(form(0, 0, 0, 1).disc(), 0);
        let (p, q, r) = form(2, -3, 5, 7).hessian();
        assert_eq!(q * q - 4 * p * r, -3 * form(2, -3, 5, 7).disc());
    }

    #[test]
    fn discriminant_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let f = form(rng.gen_range(-9..=9), rng.gen_range(-9..=9), rng.gen_range(-9..=9), rng.gen_range(-9..=9));
            for _ in 0..100 {
                let g = random_unimodular(&mut rng, 3);
                let h = f.act(&g);
                assert_eq!(h.disc(), f.disc());
                let (p, q, r) = f.hessian();
                let (p2, q2, r2) = h.hessian();
                // H_{g f} = H_f ∘ g
                let (x, y) = (3i128, -2i128);
                let (gx, gy) = (g[0][0] as i128 * x + g[1][0] as i128 * y, g[0][1] as i128 * x + g[1][1] as i128 * y);
                assert_eq!(p2 * x * x + q2 * x * y + r2 * y * y, p * gx * gx + q * gx * gy + r * gy * gy);
            }
        }
    }

    #[test]
    fn maximality_examples() {
        assert!(form(1, 0, 0, 7).is_dh_maximal(3).unwrap());
        assert!(!form(25, 5, 1, 1).is_dh_maximal(5).unwrap());
        assert!(form(1, 0, -1, 0).is_dh_maximal(5).unwrap());
        assert_eq!(form(0, 0, 0, 1).is_dh_maximal(2), Err(Error::ZeroDiscriminant));
    }

    /// Nonmaximal at p iff some GL2(Z/p^2) image has p^2 | a and p | b, or p | f.
    fn brute_nonmaximal(f: &BinaryCubicForm, p: i64) -> bool {
        let m = p * p;
        if f.coeffs().iter().all(|v| v % p == 0) {
            return true;
        }
        for e in 0..m.pow(4) {
            let g = [[e % m, e / m % m], [e / m / m % m, e / m / m / m]];
            let det = (g[0][0] * g[1][1] - g[0][1] * g[1][0]).rem_euclid(p);
            if det == 0 {
                continue;
            }
            // leading pair of f((x,y)g): a' = f(g00, g01), b' = coefficient of x^2 y
            let (s, t) = (g[0][0] as i128, g[0][1] as i128);
            let (u, v) = (g[1][0] as i128, g[1][1] as i128);
            let a2 = f.eval(s, t);
            let [a, b, c, _] = f.coeffs().map(|v| v as i128);
            let d = f.d as i128;
            let b2 = 3 * a * s * s * u + b * (s * s * v + 2 * s * t * u) + c * (2 * s * t * v + t * t * u) + 3 * d * t * t * v;
            if a2 % (m as i128) == 0 && b2 % p as i128 == 0 {
                return true;
            }
        }
        false
    }

    #[test]
    fn maximality_matches_brute_force() {
        for p in [2i64, 3] {
            let m = p * p;
            for e in 0..m.pow(4) {
                let f = form(e % m, e / m % m, e / m / m % m, e / m / m / m);
                let f_shift = form(f.a + 7 * m, f.b, f.c, f.d + 5 * m);
                let g = if f.disc() != 0 { f } else { f_shift };
                if g.disc() == 0 {
                    continue;
                }
                assert_eq!(g.dh_maximal_unchecked(p as u64), !brute_nonmaximal(&g, p), "{g} at {p}");
            }
        }
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(form(1, 0, 0, 7).splitting_symbol(3).unwrap().to_string(), "3:1");
        assert_eq!(form(1, 0, 0, 7).splitting_symbol(7).unwrap().to_string(), "3:1");
        assert_eq!(form(1, 0, 0, 7).splitting_symbol(13).unwrap().to_string(), "1:3");
        assert_eq!(form(1, 0, -1, 0).splitting_symbol(5).unwrap().to_string(), "1:1+1:1+1:1");
        assert!(matches!(form(25, 5, 1, 1).splitting_symbol(5), Err(Error::NotPMaximal(5))));
    }

    fn symbol_by_factoring(f: &BinaryCubicForm, p: u64) -> SplittingSymbol {
        let poly = FpPoly::new(p, [f.d, f.c, f.b, f.a].iter().map(|&v| crate::arith::rem_i(v, p)).collect());
        let mut factors: Vec<(u32, u32)> = poly.factor().into_iter().map(|(g, e)| (e, g.deg() as u32)).collect();
        let inf = 3 - poly.deg() as u32;
        if inf > 0 {
            factors.push((inf, 1));
        }
        SplittingSymbol::new(factors)
    }

    #[test]
    fn splitting_matches_factorization() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut tried = 0;
        while tried < 3000 {
            let f = form(rng.gen_range(-30..=30), rng.gen_range(-30..=30), rng.gen_range(-30..=30), rng.gen_range(-30..=30));
            if f.disc() == 0 {
                continue;
            }
            tried += 1;
            for p in [2u64, 3, 5, 7, 11, 131, 257] {
                if f.dh_maximal_unchecked(p) {
                    assert_eq!(f.splitting_symbol(p).unwrap(), symbol_by_factoring(&f, p), "{f} at {p}");
                }
            }
        }
    }

    #[test]
    fn exact_orbit_ratios_small() {
        for p in [2u64, 3, 5, 7] {
            let (counts, total) = fp_form_type_counts(p);
            for (tau, k) in counts {
                assert_eq!(k * 6, total * tau.class_size().to_u64().unwrap(), "p={p} {tau}");
            }
        }
    }

    #[test]
    fn fundamental_discriminants() {
        assert_eq!(fundamental_discriminant(-23), -23);
        assert_eq!(fundamental_discriminant(-44), -11);
        assert_eq!(fundamental_discriminant(12), 12);
        assert_eq!(fundamental_discriminant(49), 1);
        assert_eq!(fundamental_discriminant(-108), -3);
    }

    #[test]
    fn resolvent_examples() {
        let ct = |v: Vec<u32>| CycleType::new(v).unwrap();
        assert_eq!(resolvent_splitting(&ct(vec![1, 1, 1])).unwrap(), ct(vec![1, 1]));
        assert_eq!(resolvent_splitting(&ct(vec![3])).unwrap(), ct(vec![1, 1]));
        assert_eq!(resolvent_splitting(&ct(vec![2, 1])).unwrap(), ct(vec![2]));
    }

    #[test]
    fn reduction_is_in_orbit_and_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 400 {
            let f = form(rng.gen_range(1..=6), rng.gen_range(-6..=6), rng.gen_range(-6..=6), rng.gen_range(-6..=6));
            if f.disc() == 0 {
                continue;
            }
            checked += 1;
            let c = f.canonical().unwrap();
            assert_eq!(c.disc(), f.disc());
            for _ in 0..5 {
                let g = random_unimodular(&mut rng, 4);
                assert_eq!(f.act(&g).canonical().unwrap(), c, "{f}");
            }
        }
    }

    #[test]
    fn smallest_fields() {
        let tab = enumerate_cubic_fields(1000, &[2, 3, 5], 1).unwrap();
        let mut pos: Vec<i64> = tab.records.iter().map(|r| r.disc).filter(|&d| d > 0).collect();
        pos.sort_unstable();
        let want = [
            49, 81, 148, 169, 229, 257, 316, 321, 361, 404, 469, 473, 564, 568, 621, 697, 733, 756, 761, 785, 788, 837, 892, 940,
            961, 985, 993,
        ];
        assert_eq!(pos, want);
        let mut neg: Vec<i64> = tab.records.iter().map(|r| r.disc).filter(|&d| d < 0).collect();
        neg.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(&neg[..14], &[-23, -31, -44, -59, -76, -83, -87, -104, -107, -108, -116, -135, -139, -140]);
    }

    #[test]
    fn enumeration_matches_box_search() {
        let x = 400u64;
        let primes: Vec<u64> = vec![];
        let tab = enumerate_cubic_fields(x, &primes, 2).unwrap();
        let got: BTreeSet<BinaryCubicForm> = tab.records.iter().map(|r| r.form).collect();
        assert_eq!(got.len(), tab.records.len());
        let mut want = BTreeSet::new();
        let b = 20i64;
        for a in -b..=b {
            for bb in -b..=b {
                for c in -b..=b {
                    for d in -b..=b {
                        let f = form(a, bb, c, d);
                        let disc = f.disc();
                        if disc == 0 || disc.unsigned_abs() >= x as u128 || !f.is_irreducible() {
                            continue;
                        }
                        if factor_u64(disc.unsigned_abs() as u64).iter().any(|&(p, e)| e >= 2 && !f.dh_maximal_unchecked(p)) {
                            continue;
                        }
                        want.insert(f.canonical().unwrap());
                    }
                }
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn class_number_three_parts() {
        let tab = enumerate_cubic_fields(600, &[], 1).unwrap();
        assert_eq!(cl3(-23, &tab).unwrap(), 3);
        assert_eq!(cl3(5, &tab).unwrap(), 1);
        assert!(matches!(cl3(-4027, &tab), Err(Error::InsufficientTabulation(_))));
        let r = tab.records.iter().find(|r| r.disc == -23).unwrap();
        assert_eq!(quadratic_resolvent_disc(r).unwrap(), -23);
        let r49 = tab.records.iter().find(|r| r.disc == 49).unwrap();
        assert!(!r49.ntr);
        assert_eq!(quadratic_resolvent_disc(r49), Err(Error::TotallyRamifiedSomewhere));
    }

    #[test]
    fn resolvent_consistency() {
        let primes = crate::arith::primes_up_to(100);
        let tab = enumerate_cubic_fields(20_000, &primes, 1).unwrap();
        let mut checked = 0;
        for r in tab.records.iter().filter(|r| r.ntr).take(1000) {
            let d = quadratic_resolvent_disc(r).unwrap();
            for &p in &primes {
                let s = tab.symbol_at(r, p).unwrap();
                if let Some(ct) = s.cycle_type() {
                    let res = resolvent_splitting(&ct).unwrap();
                    let k = crate::arith::kronecker(d, p);
                    assert_eq!(k == 1, res == CycleType::identity(2), "{} at {p}", r.form);
                    checked += 1;
                }
            }
        }
        assert!(checked > 10_000);
    }
}
