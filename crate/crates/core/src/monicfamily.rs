//! The family of monogenized fields: monic integer polynomials ordered by
//! height, sieved to irreducible polynomials with maximal equation orders,
//! and summarized by splitting densities.
//!
//! Degree 3 has a dedicated sieve (see [`run_monic`]) that handles the
//! 10^8-height range; other degrees go through [`MaximalSieve`].

use crate::arith::{factor_u64, is_prime, primes_up_to, rem_i128, sqrt_mod_prime};
use crate::conjugacy::CycleType;
use crate::cubicforms::BinaryCubicForm;
use crate::error::{Error, Result};
use crate::family::{FamilyStats, SymbolIndex};
use crate::polyfactor::{
    dedekind_maximal, discriminant_monic, exact_type_count, factor_mod_p, is_irreducible_q, unramified_symbols, MonicPoly,
    MonicPoly64, SplittingSymbol,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Version tag written into caches and reports.
pub const FORMAT_VERSION: &str = "arithstat-1";

/// Largest `b >= 0` with `b^{n(n-1)} < x^i` (no such `b` gives `None`).
pub fn coefficient_bound(n: u32, i: u32, x: &BigInt) -> Option<i64> {
    let e = n * (n - 1);
    let xi = Pow::pow(x, i);
    if xi <= BigInt::zero() {
        return None;
    }
    let guess = (x.to_f64().expect("finite").ln() * i as f64 / e as f64).exp().floor() as i64;
    let mut b = guess.max(0) + 2;
    while b >= 0 && Pow::pow(&BigInt::from(b), e) >= xi {
        b -= 1;
    }
    (b >= 0).then_some(b)
}

/// Monic degree-n polynomials with `a_1 ∈ [0, n)` and `|a_i|^{n(n-1)} < x^i`
/// for `i >= 2`, in lexicographic order of `(a_1, ..., a_n)`.
pub fn enumerate_monic(n: u32, x: &BigInt) -> Result<impl Iterator<Item = MonicPoly64>> {
    if !(2..=5).contains(&n) {
        return Err(Error::InvalidInput(format!("degree {n} outside 2..=5")));
    }
    if x < &BigInt::from(1) {
        return Err(Error::InvalidInput("x must be at least 1".into()));
    }
    let mut bounds = vec![n as i64 - 1];
    for i in 2..=n {
        match coefficient_bound(n, i, x) {
            Some(b) => bounds.push(b),
            None => return Err(Error::InvalidInput("empty height box".into())),
        }
    }
    let lows: Vec<i64> = std::iter::once(0).chain(bounds[1..].iter().map(|b| -b)).collect();
    let mut cur = lows.clone();
    let mut done = false;
    Ok(std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = MonicPoly64::from_i64(&cur).expect("nonempty");
        let mut i = cur.len();
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            if cur[i] < bounds[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lows[i];
        }
        Some(out)
    }))
}

/// Flags carried by a family record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub struct RecordFlags {
    pub irreducible: bool,
    pub maximal: bool,
    pub discriminant_fully_factored: bool,
}

impl RecordFlags {
    pub fn encode(&self) -> String {
        let mut v = Vec::new();
        if self.irreducible {
            v.push("irr");
        }
        if self.maximal {
            v.push("max");
        }
        if self.discriminant_fully_factored {
            v.push("fac");
        }
        v.join("|")
    }

    pub fn decode(s: &str) -> Self {
        let has = |t: &str| s.split('|').any(|x| x == t);
        RecordFlags { irreducible: has("irr"), maximal: has("max"), discriminant_fully_factored: has("fac") }
    }
}

pub(crate) fn serialize_display<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// One member of the family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyRecord {
    pub id: u64,
    pub poly: Vec<i64>,
    #[serde(serialize_with = "serialize_display")]
    pub conductor: BigInt,
    pub splitting: BTreeMap<u64, SplittingSymbol>,
    pub flags: RecordFlags,
}

impl FamilyRecord {
    pub fn degree(&self) -> u32 {
        self.poly.len() as u32
    }

    pub fn monic(&self) -> MonicPoly64 {
        MonicPoly64::from_i64(&self.poly).expect("nonempty")
    }
}

/// Counters for members removed by the sieve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SieveCounters {
    pub enumerated: u64,
    pub kept: u64,
    pub zero_discriminant: u64,
    pub reducible: u64,
    pub nonmaximal: u64,
    pub unresolved: u64,
}

impl SieveCounters {
    pub fn merge(&mut self, o: &SieveCounters) {
        self.enumerated += o.enumerated;
        self.kept += o.kept;
        self.zero_discriminant += o.zero_discriminant;
        self.reducible += o.reducible;
        self.nonmaximal += o.nonmaximal;
        self.unresolved += o.unresolved;
    }
}

/// Factor `n` by trial division to `bound`, then one Pollard–Brent pass if
/// the cofactor fits in 64 bits. `None` if the cofactor is out of reach.
pub fn factor_with_trial_bound(n: u128, bound: u64) -> Option<Vec<(u64, u32)>> {
    let mut n = n;
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut d = 2u64;
    while d <= bound && (d as u128) * (d as u128) <= n {
        if n.is_multiple_of(d as u128) {
            let mut e = 0;
            while n.is_multiple_of(d as u128) {
                n /= d as u128;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        let m = u64::try_from(n).ok()?;
        if is_prime(m) {
            out.push((m, 1));
        } else {
            for (p, e) in factor_u64(m) {
                match out.iter_mut().find(|(q, _)| *q == p) {
                    Some(slot) => slot.1 += e,
                    None => out.push((p, e)),
                }
            }
        }
    }
    out.sort_unstable();
    Some(out)
}

/// Generic-degree sieve: irreducible, nonzero discriminant, maximal at every
/// `p` with `p^2 | Δ`.
pub struct MaximalSieve {
    pub trial_bound: u64,
    pub primes: Vec<u64>,
    pub squarefree_only: bool,
    pub counters: SieveCounters,
}

impl MaximalSieve {
    pub fn new(trial_bound: u64, primes: Vec<u64>) -> Result<Self> {
        if trial_bound < 2 {
            return Err(Error::InvalidInput("trial bound must be at least 2".into()));
        }
        Ok(MaximalSieve { trial_bound, primes, squarefree_only: false, counters: SieveCounters::default() })
    }

    pub fn process(&mut self, f: &MonicPoly64) -> Option<FamilyRecord> {
        let id = self.counters.enumerated;
        self.counters.enumerated += 1;
        let wide: MonicPoly<i128> = MonicPoly::new(f.coeffs().iter().map(|&c| c as i128).collect()).expect("nonempty");
        let disc = discriminant_monic(&wide);
        if disc == 0 {
            self.counters.zero_discriminant += 1;
            return None;
        }
        if !is_irreducible_q(f) {
            self.counters.reducible += 1;
            return None;
        }
        let Some(fac) = factor_with_trial_bound(disc.unsigned_abs(), self.trial_bound) else {
            self.counters.unresolved += 1;
            return None;
        };
        for &(p, e) in &fac {
            if e >= 2 && (self.squarefree_only || !dedekind_maximal(f, p)) {
                self.counters.nonmaximal += 1;
                return None;
            }
        }
        self.counters.kept += 1;
        let splitting = self.primes.iter().map(|&p| (p, factor_mod_p(f, p).symbol())).collect();
        Some(FamilyRecord {
            id,
            poly: f.coeffs().to_vec(),
            conductor: BigInt::from(disc.unsigned_abs()),
            splitting,
            flags: RecordFlags { irreducible: true, maximal: true, discriminant_fully_factored: true },
        })
    }
}

/// `sieve_maximal` over a stream of polynomials.
pub fn sieve_maximal<I: IntoIterator<Item = MonicPoly64>>(
    polys: I,
    trial_bound: u64,
    primes: &[u64],
) -> Result<(Vec<FamilyRecord>, SieveCounters)> {
    let mut s = MaximalSieve::new(trial_bound, primes.to_vec())?;
    let out = polys.into_iter().filter_map(|f| s.process(&f)).collect();
    Ok((out, s.counters))
}

/// Parameters of a family run.
#[derive(Clone, Debug, Serialize)]
pub struct MonicRunConfig {
    pub n: u32,
    pub x: u64,
    /// Primes at which splitting symbols are recorded.
    pub primes: Vec<u64>,
    pub trial_bound: u64,
    pub threads: usize,
    pub squarefree_only: bool,
}

impl MonicRunConfig {
    pub fn new(n: u32, x: u64, pmax: u64) -> Self {
        MonicRunConfig { n, x, primes: primes_up_to(pmax), trial_bound: 1_000_000, threads: 1, squarefree_only: false }
    }
}

/// Output of a family run: splitting statistics and sieve counters.
#[derive(Clone, Debug, Serialize)]
pub struct MonicRunSummary {
    pub n: u32,
    pub x: u64,
    pub counters: SieveCounters,
    pub stats: FamilyStats,
}

/// Enumerate, sieve and summarize the degree-n family up to height `x`,
/// streaming kept records to `sink` in enumeration order.
pub fn run_monic(cfg: &MonicRunConfig, sink: Option<&mut dyn FnMut(FamilyRecord)>) -> Result<MonicRunSummary> {
    if !(2..=5).contains(&cfg.n) {
        return Err(Error::InvalidInput(format!("degree {} outside 2..=5", cfg.n)));
    }
    if cfg.x < 1 {
        return Err(Error::InvalidInput("x must be at least 1".into()));
    }
    if cfg.primes.iter().any(|&p| !is_prime(p)) || cfg.primes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("cache primes must be increasing primes".into()));
    }
    if cfg.n == 3 && !cfg.squarefree_only {
        return cubic::run(cfg, sink);
    }
    let index = SymbolIndex::new(cfg.n);
    let mut stats = FamilyStats::new(&index, cfg.primes.clone());
    let mut sieve = MaximalSieve::new(cfg.trial_bound, cfg.primes.clone())?;
    sieve.squarefree_only = cfg.squarefree_only;
    let mut sink = sink;
    for f in enumerate_monic(cfg.n, &BigInt::from(cfg.x))? {
        if let Some(r) = sieve.process(&f) {
            let codes: Vec<u8> = r.splitting.values().map(|s| index.code(s)).collect();
            stats.add(&codes, r.conductor.to_f64().expect("finite").ln());
            if let Some(s) = sink.as_mut() {
                s(r);
            }
        }
    }
    check_unresolved(&sieve.counters)?;
    Ok(MonicRunSummary { n: cfg.n, x: cfg.x, counters: sieve.counters, stats })
}

fn check_unresolved(c: &SieveCounters) -> Result<()> {
    if c.enumerated > 0 && (c.unresolved as f64) >= 1e-4 * c.enumerated as f64 {
        return Err(Error::InvalidInput(format!(
            "{} of {} discriminants could not be factored",
            c.unresolved, c.enumerated
        )));
    }
    Ok(())
}

mod cubic {
    //! Degree-3 sieve. Maximality at p <= 7 comes from tables indexed by the
    //! coefficients mod p^2. For p >= 11, `p^2 | Δ` is located along each
    //! `a_3`-line from the roots of the quadratic `Δ(a_3)`, whose discriminant
    //! is `16 E^3` with `E = a_1^2 - 3 a_2`; candidates are then decided by
    //! `p^2 | f(t)` at the multiple root `t`.

    use super::*;

    const SMALL: [u64; 4] = [2, 3, 5, 7];
    const ROOT_PRIMES: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
    const TABLE_LIMIT: u64 = 200;

    pub(super) struct Tables {
        nonmax: Vec<(u64, Vec<bool>)>,
        has_root: Vec<(u64, Vec<bool>)>,
        codes: Vec<(u64, Vec<u8>)>,
    }

    fn idx(p: u64, a: [i64; 3]) -> usize {
        let m = p as i64;
        (((a[0].rem_euclid(m)) * m + a[1].rem_euclid(m)) * m + a[2].rem_euclid(m)) as usize
    }

    /// Codes of the factorization pattern of every monic cubic mod p.
    fn code_table(p: u64, index: &SymbolIndex) -> Vec<u8> {
        let sym = |s: &str| index.code(&s.parse::<SplittingSymbol>().expect("valid"));
        let (inert, split, one_two, double, triple) =
            (sym("1:3"), sym("1:1+1:1+1:1"), sym("1:2+1:1"), sym("2:1+1:1"), sym("3:1"));
        let pi = p as i64;
        let mut t = vec![inert; (p * p * p) as usize];
        for r1 in 0..pi {
            for r2 in r1..pi {
                for r3 in r2..pi {
                    let a1 = -(r1 + r2 + r3);
                    let a2 = r1 * r2 + r1 * r3 + r2 * r3;
                    let a3 = -(r1 * r2 * r3);
                    let distinct = 1 + (r2 != r1) as usize + (r3 != r2) as usize;
                    t[idx(p, [a1, a2, a3])] = match distinct {
                        3 => split,
                        2 => double,
                        _ => triple,
                    };
                }
            }
        }
        // (T - r)(T^2 + uT + v) with T^2 + uT + v irreducible
        let mut has_root_q = vec![false; (p * p) as usize];
        for s in 0..pi {
            for w in 0..pi {
                // (T - s)(T - w) = T^2 - (s + w)T + sw
                let u = (-(s + w)).rem_euclid(pi);
                let v = (s * w).rem_euclid(pi);
                has_root_q[(u * pi + v) as usize] = true;
            }
        }
        for u in 0..pi {
            for v in 0..pi {
                if has_root_q[(u * pi + v) as usize] {
                    continue;
                }
                for r in 0..pi {
                    let a1 = u - r;
                    let a2 = v - r * u;
                    let a3 = -r * v;
                    t[idx(p, [a1, a2, a3])] = one_two;
                }
            }
        }
        t
    }

    impl Tables {
        pub(super) fn new(primes: &[u64], index: &SymbolIndex) -> Self {
            let nonmax = SMALL
                .iter()
                .map(|&p| {
                    let m = p * p;
                    let mut t = vec![false; (m * m * m) as usize];
                    for e in 0..m * m * m {
                        let a = [(e / (m * m)) as i64, (e / m % m) as i64, (e % m) as i64];
                        let f = MonicPoly64::from_i64(&a).expect("nonempty");
                        t[e as usize] = !dedekind_maximal(&f, p);
                    }
                    (p, t)
                })
                .collect();
            let has_root = ROOT_PRIMES
                .iter()
                .map(|&p| {
                    let pi = p as i64;
                    let mut t = vec![false; (p * p * p) as usize];
                    for e in 0..p * p * p {
                        let a = [(e / (p * p)) as i64, (e / p % p) as i64, (e % p) as i64];
                        t[e as usize] = (0..pi).any(|r| ((r * r + a[0] * r + a[1]) * r + a[2]) % pi == 0);
                    }
                    (p, t)
                })
                .collect();
            let codes = primes.iter().filter(|&&p| p <= TABLE_LIMIT).map(|&p| (p, code_table(p, index))).collect();
            Tables { nonmax, has_root, codes }
        }

        fn small_nonmax(&self, a: [i64; 3]) -> bool {
            self.nonmax.iter().any(|(p, t)| t[idx(p * p, a)])
        }

        fn irreducible(&self, a: [i64; 3]) -> bool {
            if self.has_root.iter().any(|(p, t)| !t[idx(*p, a)]) {
                return true;
            }
            BinaryCubicForm::new(1, a[0], a[1], a[2]).is_irreducible()
        }

        fn code_at(&self, i: usize, p: u64, a: [i64; 3], index: &SymbolIndex) -> u8 {
            if let Some((q, t)) = self.codes.get(i) {
                if *q == p {
                    return t[idx(p, a)];
                }
            }
            // primes beyond the table range: count roots of the cubic mod p
            let f = BinaryCubicForm::new(1, a[0], a[1], a[2]);
            index.code(&f.splitting_symbol(p).expect("maximal member"))
        }
    }

    fn disc3(a1: i128, a2: i128, a3: i128) -> i128 {
        a1 * a1 * a2 * a2 - 4 * a2 * a2 * a2 - 4 * a1 * a1 * a1 * a3 + 18 * a1 * a2 * a3 - 27 * a3 * a3
    }

    fn eval3(a: [i64; 3], t: i128) -> i128 {
        ((t + a[0] as i128) * t + a[1] as i128) * t + a[2] as i128
    }

    /// Mark `a_3 ∈ [-b3, b3]` for which the row `(a1, a2)` is nonmaximal at some p >= 11.
    fn sieve_row(a1: i64, a2: i64, b3: i64, sieve_primes: &[u64], marks: &mut [bool]) {
        let (a1i, a2i) = (a1 as i128, a2 as i128);
        let e = a1i * a1i - 3 * a2i;
        let beta = 18 * a1i * a2i - 4 * a1i * a1i * a1i;
        let gamma = a1i * a1i * a2i * a2i - 4 * a2i * a2i * a2i;
        let row_max = gamma.abs() + beta.abs() * b3 as i128 + 27 * (b3 as i128) * (b3 as i128);
        let mut mark_if_nonmax = |a3: i64, p: u64| {
            let i = (a3 + b3) as usize;
            if marks[i] {
                return;
            }
            let a = [a1, a2, a3];
            let pi = p as i128;
            // multiple root t: (9 a3 - a1 a2) / (2E), or -a1/3 when p | E
            let em = rem_i128(e, p);
            let t = if em == 0 {
                let inv3 = crate::arith::inv_mod(3, p).expect("p > 3");
                crate::arith::mul_mod(rem_i128(-a1i, p), inv3, p)
            } else {
                let num = rem_i128(9 * a3 as i128 - a1i * a2i, p);
                let inv = crate::arith::inv_mod(crate::arith::mul_mod(2, em, p), p).expect("unit");
                crate::arith::mul_mod(num, inv, p)
            };
            if eval3(a, t as i128).rem_euclid(pi * pi) == 0 {
                marks[i] = true;
            }
        };
        for &p in sieve_primes {
            let p2 = (p as i128) * (p as i128);
            if p2 > row_max {
                break;
            }
            let em = rem_i128(e, p);
            let inv54 = crate::arith::inv_mod(54, p).expect("p > 3");
            if em == 0 {
                let t0 = crate::arith::mul_mod(rem_i128(beta, p), inv54, p) as i64;
                let pi = p as i64;
                let mut a3 = -b3 + (t0 - (-b3)).rem_euclid(pi);
                while a3 <= b3 {
                    if disc3(a1i, a2i, a3 as i128).rem_euclid(p2) == 0 {
                        mark_if_nonmax(a3, p);
                    }
                    a3 += pi;
                }
                continue;
            }
            let Some(r) = sqrt_mod_prime(em, p) else { continue };
            let four_e_r = crate::arith::mul_mod(crate::arith::mul_mod(4, em, p), r, p);
            let bm = rem_i128(beta, p);
            for root in [crate::arith::add_mod(bm, four_e_r, p), crate::arith::sub_mod(bm, four_e_r, p)] {
                let t = crate::arith::mul_mod(root, inv54, p) as i128;
                // Hensel step to a root of Δ(a3) modulo p^2
                let val = disc3(a1i, a2i, t);
                let der = -54 * t + beta;
                let der_inv = crate::arith::inv_mod(rem_i128(der, p), p).expect("simple root") as i128;
                let t2 = (t - (val / p as i128) * der_inv * p as i128).rem_euclid(p2);
                debug_assert_eq!(disc3(a1i, a2i, t2).rem_euclid(p2), 0);
                let step = p2 as i64;
                let mut a3 = -b3 + ((t2 as i64) - (-b3)).rem_euclid(step);
                while a3 <= b3 {
                    mark_if_nonmax(a3, p);
                    a3 += step;
                }
            }
        }
    }

    struct RowOutput {
        counters: SieveCounters,
        stats: FamilyStats,
        records: Vec<FamilyRecord>,
    }

    pub(super) fn run(cfg: &MonicRunConfig, sink: Option<&mut dyn FnMut(FamilyRecord)>) -> Result<MonicRunSummary> {
        let x = BigInt::from(cfg.x);
        let b2 = coefficient_bound(3, 2, &x).expect("x >= 1");
        let b3 = coefficient_bound(3, 3, &x).expect("x >= 1");
        let index = SymbolIndex::new(3);
        let tables = Tables::new(&cfg.primes, &index);
        let max_disc = 4 * (b2 as i128).pow(3) + 4 * 8 * b3 as i128 + 18 * 2 * b2 as i128 * b3 as i128
            + 4 * (b2 as i128).pow(2) + 27 * (b3 as i128).pow(2);
        let sieve_bound = crate::arith::isqrt_u128(max_disc as u128) as u64 + 1;
        let sieve_primes: Vec<u64> = primes_up_to(sieve_bound).into_iter().filter(|&p| p >= 11).collect();
        let rows: Vec<(i64, i64)> = (0..3).flat_map(|a1| (-b2..=b2).map(move |a2| (a1, a2))).collect();
        let want_records = sink.is_some();
        let mut total = MonicRunSummary {
            n: 3,
            x: cfg.x,
            counters: SieveCounters::default(),
            stats: FamilyStats::new(&index, cfg.primes.clone()),
        };
        let mut sink = sink;
        let mut next_id = 0u64;
        let chunk = 64usize;
        for block in rows.chunks(chunk) {
            let slots: Vec<Mutex<Option<RowOutput>>> = block.iter().map(|_| Mutex::new(None)).collect();
            let next = AtomicUsize::new(0);
            let work = || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= block.len() {
                    break;
                }
                let (a1, a2) = block[i];
                let out = process_row(a1, a2, b3, &sieve_primes, &tables, &index, &cfg.primes, want_records);
                *slots[i].lock().expect("poisoned") = Some(out);
            };
            if cfg.threads <= 1 {
                work();
            } else {
                std::thread::scope(|s| {
                    for _ in 0..cfg.threads {
                        s.spawn(work);
                    }
                });
            }
            for slot in slots {
                let out = slot.into_inner().expect("poisoned").expect("row processed");
                total.stats.merge(&out.stats);
                if let Some(s) = sink.as_mut() {
                    for mut r in out.records {
                        r.id += next_id;
                        s(r);
                    }
                }
                next_id += out.counters.enumerated;
                total.counters.merge(&out.counters);
            }
        }
        Ok(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn process_row(
        a1: i64,
        a2: i64,
        b3: i64,
        sieve_primes: &[u64],
        tables: &Tables,
        index: &SymbolIndex,
        primes: &[u64],
        want_records: bool,
    ) -> RowOutput {
        let len = (2 * b3 + 1) as usize;
        let mut marks = vec![false; len];
        sieve_row(a1, a2, b3, sieve_primes, &mut marks);
        let mut counters = SieveCounters::default();
        let mut stats = FamilyStats::new(index, primes.to_vec());
        let mut records = Vec::new();
        let mut codes = vec![0u8; primes.len()];
        for (i, a3) in (-b3..=b3).enumerate() {
            counters.enumerated += 1;
            let a = [a1, a2, a3];
            let disc = disc3(a1 as i128, a2 as i128, a3 as i128);
            if disc == 0 {
                counters.zero_discriminant += 1;
                continue;
            }
            if !tables.irreducible(a) {
                counters.reducible += 1;
                continue;
            }
            if marks[i] || tables.small_nonmax(a) {
                counters.nonmaximal += 1;
                continue;
            }
            counters.kept += 1;
            for (j, &p) in primes.iter().enumerate() {
                codes[j] = tables.code_at(j, p, a, index);
            }
            let conductor = disc.unsigned_abs();
            stats.add(&codes, (conductor as f64).ln());
            if want_records {
                records.push(FamilyRecord {
                    id: i as u64,
                    poly: a.to_vec(),
                    conductor: BigInt::from(conductor),
                    splitting: primes.iter().zip(&codes).map(|(&p, &c)| (p, index.symbol(c).clone())).collect(),
                    flags: RecordFlags { irreducible: true, maximal: true, discriminant_fully_factored: true },
                });
            }
        }
        RowOutput { counters, stats, records }
    }
}

/// Splitting densities at one prime, observed and predicted.
#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub format_version: String,
    pub n: u32,
    pub x: u64,
    pub p: u64,
    pub total: u64,
    /// Counts per unramified symbol, plus the key `ramified`.
    pub counts: BTreeMap<String, u64>,
    pub empirical: BTreeMap<String, f64>,
    /// Exact predicted densities as rational strings.
    pub predicted: BTreeMap<String, String>,
    pub predicted_f64: BTreeMap<String, f64>,
    /// Binomial standard deviation of each empirical share under the prediction.
    pub sigma: BTreeMap<String, f64>,
    pub t_f_empirical: f64,
    pub t_f_predicted: String,
}

impl DensityReport {
    /// Largest |empirical - predicted| / sigma over all buckets.
    pub fn max_z(&self) -> f64 {
        self.empirical
            .iter()
            .map(|(k, e)| {
                let s = self.sigma[k];
                if s == 0.0 {
                    0.0
                } else {
                    (e - self.predicted_f64[k]).abs() / s
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Predicted monic-family density of an unramified type: the share of
/// `p`-maximal monic polynomials mod `p^2` whose reduction has type `tau`.
pub fn predicted_monic_density(n: u32, p: u64, tau: &CycleType) -> BigRational {
    let pn = Pow::pow(&BigInt::from(p), n);
    let denom = BigRational::from_integer(pn) * (BigRational::from_integer(1.into()) - BigRational::new(1.into(), (p * p).into()));
    BigRational::from_integer(BigInt::from(exact_type_count(n, p, tau))) / denom
}

/// Build a density report from family statistics and per-type predictions.
pub fn density_report_with(
    stats: &FamilyStats,
    x: u64,
    p: u64,
    predicted: impl Fn(&CycleType) -> BigRational,
) -> Result<DensityReport> {
    let at = stats.counts_at(p).ok_or(Error::CacheMiss(p, stats.max_prime()))?;
    if stats.total == 0 {
        return Err(Error::EmptyFamily);
    }
    let n = stats.n;
    let total = stats.total;
    let mut counts = BTreeMap::new();
    let mut ramified = 0u64;
    for (s, c) in &at {
        if s.is_unramified() {
            counts.insert(s.to_string(), *c);
        } else {
            ramified += c;
        }
    }
    let mut pred = BTreeMap::new();
    let mut pred_sum = BigRational::zero();
    let mut t_pred = BigRational::zero();
    let mut t_emp = 0.0;
    for s in unramified_symbols(n) {
        let ct = s.cycle_type().expect("unramified");
        let c = predicted(&ct);
        pred_sum += &c;
        t_pred += &c * BigRational::from_integer(ct.char_std().into());
        t_emp += counts.get(&s.to_string()).copied().unwrap_or(0) as f64 * ct.char_std() as f64 / total as f64;
        counts.entry(s.to_string()).or_insert(0);
        pred.insert(s.to_string(), c);
    }
    pred.insert("ramified".into(), BigRational::from_integer(1.into()) - pred_sum);
    counts.insert("ramified".into(), ramified);
    let rs = crate::conjugacy::rational_string;
    let to_f = crate::conjugacy::rational_to_f64;
    let empirical: BTreeMap<String, f64> = counts.iter().map(|(k, &c)| (k.clone(), c as f64 / total as f64)).collect();
    let predicted_f64: BTreeMap<String, f64> = pred.iter().map(|(k, v)| (k.clone(), to_f(v))).collect();
    let sigma = predicted_f64.iter().map(|(k, &c)| (k.clone(), (c * (1.0 - c) / total as f64).sqrt())).collect();
    Ok(DensityReport {
        format_version: FORMAT_VERSION.into(),
        n,
        x,
        p,
        total,
        counts,
        empirical,
        predicted: pred.iter().map(|(k, v)| (k.clone(), rs(v))).collect(),
        predicted_f64,
        sigma,
        t_f_empirical: t_emp,
        t_f_predicted: rs(&t_pred),
    })
}

/// Density report for the monic family.
pub fn density_report(stats: &FamilyStats, x: u64, p: u64) -> Result<DensityReport> {
    let n = stats.n;
    density_report_with(stats, x, p, |ct| predicted_monic_density(n, p, ct))
}

/// Predicted family size `2^{n-1} n / ζ(2) · x^{(n+2)/(2n)}`.
pub fn predicted_family_count(n: u32, x: f64) -> f64 {
    let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
    2f64.powi(n as i32 - 1) * n as f64 / zeta2 * x.powf((n as f64 + 2.0) / (2.0 * n as f64))
}

/// Share of monic degree-n polynomials mod `p^2` whose order is maximal at `p`.
pub fn maximal_density_zp2(n: u32, p: u64) -> Result<BigRational> {
    if !(1..=6).contains(&n) {
        return Err(Error::InvalidInput(format!("degree {n} outside 1..=6")));
    }
    let m = p * p;
    let total = m.checked_pow(n).filter(|&t| t <= 50_000_000).ok_or_else(|| Error::InvalidInput("enumeration too large".into()))?;
    let mut good = 0u64;
    let mut a = vec![0i64; n as usize];
    for e in 0..total {
        let mut r = e;
        for slot in a.iter_mut() {
            *slot = (r % m) as i64;
            r /= m;
        }
        if dedekind_maximal(&MonicPoly64::from_i64(&a).expect("nonempty"), p) {
            good += 1;
        }
    }
    Ok(BigRational::new(good.into(), total.into()))
}

/// CSV header for a family cache with the given cached primes.
pub fn cache_header(n: u32, primes: &[u64]) -> String {
    let mut h = String::from("id,n");
    for i in 1..=n {
        h.push_str(&format!(",a{i}"));
    }
    h.push_str(",conductor,flags");
    for p in primes {
        h.push_str(&format!(",p{p}"));
    }
    h
}

pub fn cache_line(r: &FamilyRecord) -> String {
    let mut s = format!("{},{}", r.id, r.degree());
    for a in &r.poly {
        s.push_str(&format!(",{a}"));
    }
    s.push_str(&format!(",{},{}", r.conductor, r.flags.encode()));
    for sym in r.splitting.values() {
        s.push_str(&format!(",{sym}"));
    }
    s
}

/// Parse a cache line against a header produced by [`cache_header`].
pub fn parse_cache_line(line: &str, n: u32, primes: &[u64]) -> Result<FamilyRecord> {
    let bad = || Error::MalformedCache(line.chars().take(80).collect());
    let f: Vec<&str> = line.split(',').collect();
    let n_us = n as usize;
    if f.len() != 4 + n_us + primes.len() {
        return Err(bad());
    }
    let id = f[0].parse().map_err(|_| bad())?;
    if f[1].parse::<u32>().map_err(|_| bad())? != n {
        return Err(bad());
    }
    let poly = f[2..2 + n_us].iter().map(|v| v.parse().map_err(|_| bad())).collect::<Result<Vec<i64>>>()?;
    let conductor = f[2 + n_us].parse::<BigInt>().map_err(|_| bad())?;
    let flags = RecordFlags::decode(f[3 + n_us]);
    let mut splitting = BTreeMap::new();
    for (p, v) in primes.iter().zip(&f[4 + n_us..]) {
        splitting.insert(*p, v.parse::<SplittingSymbol>()?);
    }
    Ok(FamilyRecord { id, poly, conductor, splitting, flags })
}

/// Parse the primes of a cache header, checking the leading columns.
pub fn parse_cache_header(line: &str) -> Result<(u32, Vec<u64>)> {
    let bad = || Error::MalformedCache(format!("unexpected header: {line}"));
    let f: Vec<&str> = line.split(',').collect();
    if f.len() < 4 || f[0] != "id" || f[1] != "n" {
        return Err(bad());
    }
    let n = f.iter().filter(|c| c.starts_with('a') && c[1..].parse::<u32>().is_ok()).count() as u32;
    let rest = &f[2 + n as usize..];
    if rest.len() < 2 || rest[0] != "conductor" || rest[1] != "flags" {
        return Err(bad());
    }
    let primes = rest[2..]
        .iter()
        .map(|c| c.strip_prefix('p').and_then(|v| v.parse().ok()).ok_or_else(bad))
        .collect::<Result<Vec<u64>>>()?;
    Ok((n, primes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_counts() {
        assert_eq!(enumerate_monic(2, &BigInt::from(17)).unwrap().count(), 66);
        assert_eq!(enumerate_monic(3, &BigInt::from(1)).unwrap().count(), 3);
        // n = 3, x = 10^6: |a2| <= 99, |a3| <= 999
        assert_eq!(coefficient_bound(3, 2, &BigInt::from(1_000_000)), Some(99));
        assert_eq!(coefficient_bound(3, 3, &BigInt::from(1_000_000)), Some(999));
        let c = enumerate_monic(3, &BigInt::from(1_000_000)).unwrap().count() as f64;
        let raw = 3.0 * 4.0 * 1e6f64.powf(5.0 / 6.0);
        assert!((c / raw - 1.0).abs() < 0.05, "{c} vs {raw}");
    }

    #[test]
    fn enumeration_is_ordered_and_unique() {
        let v: Vec<Vec<i64>> = enumerate_monic(3, &BigInt::from(200)).unwrap().map(|f| f.coeffs().to_vec()).collect();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        for f in &v {
            assert!((0..3).contains(&f[0]));
            assert!(f[1].abs().pow(6) < 200i64.pow(2) && f[2].abs().pow(6) < 200i64.pow(3));
        }
    }

    #[test]
    fn sieve_examples() {
        let polys = [[0, 0, 7].to_vec(), vec![5, 25], vec![-1, 0, 0]];
        let fs: Vec<MonicPoly64> = polys.iter().map(|c| MonicPoly64::from_i64(c).unwrap()).collect();
        let (kept, c) = sieve_maximal(fs, 1_000_000, &[2, 3]).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].poly, vec![0, 0, 7]);
        assert_eq!(kept[0].conductor, BigInt::from(1323));
        assert_eq!(c.nonmaximal, 1);
        assert_eq!(c.zero_discriminant + c.reducible, 1);
    }

    #[test]
    fn predicted_example() {
        let tau = CycleType::new(vec![3]).unwrap();
        assert_eq!(predicted_monic_density(3, 5, &tau), BigRational::new(1.into(), 3.into()));
        for p in [2u64, 3, 5, 7] {
            let mut sum = BigRational::zero();
            for s in unramified_symbols(3) {
                sum += predicted_monic_density(3, p, &s.cycle_type().unwrap());
            }
            assert_eq!(sum, BigRational::new(p.into(), (p + 1).into()));
        }
    }

    #[test]
    fn monic_type_densities() {
        for (n, p) in [(2u32, 2u64), (2, 3), (3, 2), (3, 3), (4, 2)] {
            let want = BigRational::from_integer(1.into()) - BigRational::new(1.into(), (p * p).into());
            assert_eq!(maximal_density_zp2(n, p).unwrap(), want, "n={n} p={p}");
        }
    }

    fn slow_stats(x: u64, primes: &[u64]) -> (FamilyStats, SieveCounters, Vec<FamilyRecord>) {
        let index = SymbolIndex::new(3);
        let mut st = FamilyStats::new(&index, primes.to_vec());
        let mut sieve = MaximalSieve::new(1_000_000, primes.to_vec()).unwrap();
        let mut recs = Vec::new();
        for f in enumerate_monic(3, &BigInt::from(x)).unwrap() {
            if let Some(r) = sieve.process(&f) {
                let codes: Vec<u8> = r.splitting.values().map(|s| index.code(s)).collect();
                st.add(&codes, r.conductor.to_f64().unwrap().ln());
                recs.push(r);
            }
        }
        (st, sieve.counters, recs)
    }

    #[test]
    fn fast_cubic_matches_generic_sieve() {
        let primes = primes_up_to(250);
        for x in [500u64, 20_000] {
            let (slow, sc, srecs) = slow_stats(x, &primes);
            let cfg = MonicRunConfig { threads: 2, primes: primes.clone(), ..MonicRunConfig::new(3, x, 0) };
            let mut frecs = Vec::new();
            let mut sink = |r: FamilyRecord| frecs.push(r);
            let fast = run_monic(&cfg, Some(&mut sink)).unwrap();
            assert_eq!(fast.counters.kept, sc.kept, "x={x}");
            assert_eq!(fast.counters.enumerated, sc.enumerated);
            assert_eq!(fast.counters.nonmaximal, sc.nonmaximal);
            assert_eq!(fast.counters.reducible + fast.counters.zero_discriminant, sc.reducible + sc.zero_discriminant);
            assert_eq!(frecs, srecs);
            for &p in &primes {
                assert_eq!(fast.stats.counts_at(p), slow.counts_at(p), "p={p}");
            }
        }
    }

    #[test]
    fn large_prime_sieve_finds_nonmaximal() {
        // large enough that p^2 | Δ occurs for many p >= 11
        let cfg = MonicRunConfig { primes: vec![2, 3], ..MonicRunConfig::new(3, 400_000, 0) };
        let fast = run_monic(&cfg, None).unwrap();
        let mut sieve = MaximalSieve::new(1_000_000, vec![2, 3]).unwrap();
        let mut big = 0;
        for f in enumerate_monic(3, &BigInt::from(400_000u64)).unwrap() {
            if sieve.process(&f).is_none() {
                let d = discriminant_monic(&MonicPoly::<i128>::new(f.coeffs().iter().map(|&c| c as i128).collect()).unwrap());
                let fac = factor_with_trial_bound(d.unsigned_abs(), 1 << 20).unwrap_or_default();
                big += fac.iter().any(|&(p, e)| p >= 11 && e >= 2 && !dedekind_maximal(&f, p)) as u32;
            }
        }
        assert!(big > 100, "{big}");
        assert_eq!(fast.counters, sieve.counters);
    }

    #[test]
    fn cache_roundtrip() {
        let primes = vec![2, 3, 5, 7];
        let (_, _, recs) = slow_stats(2000, &primes);
        let header = cache_header(3, &primes);
        assert_eq!(parse_cache_header(&header).unwrap(), (3, primes.clone()));
        for r in recs.iter().take(200) {
            let back = parse_cache_line(&cache_line(r), 3, &primes).unwrap();
            assert_eq!(&back, r);
        }
    }

    #[test]
    fn density_report_sums() {
        let primes = vec![2, 3, 5];
        let (st, _, _) = slow_stats(50_000, &primes);
        let rep = density_report(&st, 50_000, 5).unwrap();
        assert_eq!(rep.counts.values().sum::<u64>(), rep.total);
        assert!((rep.empirical.values().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((rep.predicted_f64.values().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(matches!(density_report(&st, 50_000, 7), Err(Error::CacheMiss(7, 5))));
    }
}
