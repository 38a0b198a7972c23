//! One-level density of low-lying zeros through the explicit formula:
//! Fejér test functions, the average log conductor, and the prime sums
//! `S1, S2, S3, S_ram` over a family's cached splitting statistics.

use crate::arith::primes_up_to;
use crate::error::{Error, Result};
use crate::family::FamilyStats;
use crate::polyfactor::{theta_coefficient, SplittingSymbol};
use num_bigint::BigInt;
use num_traits::{Float, FloatConst, ToPrimitive};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

pub const MAX_SIGMA: f64 = 0.45;

/// `f(y) = σ (sin πσy / πσy)^2`, with `f̂(u) = max(0, 1 - |u|/σ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TestFunction<F> {
    pub sigma: F,
}

pub type Fejer = TestFunction<f64>;

impl<F: Float + FloatConst> TestFunction<F> {
    pub fn new(sigma: F) -> Result<Self> {
        if !(sigma > F::zero()) || sigma > F::from(MAX_SIGMA).expect("representable") {
            return Err(Error::InvalidInput(format!("sigma must lie in (0, {MAX_SIGMA}]")));
        }
        Ok(TestFunction { sigma })
    }

    pub fn eval(&self, y: F) -> F {
        let t = F::PI() * self.sigma * y;
        if t.abs() < F::from(1e-8).expect("representable") {
            return self.sigma;
        }
        let s = t.sin() / t;
        self.sigma * s * s
    }

    pub fn fourier(&self, u: F) -> F {
        (F::one() - u.abs() / self.sigma).max(F::zero())
    }

    /// `f̂(0)`, the main term of the density.
    pub fn main_term(&self) -> F {
        F::one()
    }
}

/// Mean of `ln C` over the given conductors.
pub fn average_log_conductor<'a, I: IntoIterator<Item = &'a BigInt>>(conductors: I) -> Result<f64> {
    let (mut n, mut acc) = (0u64, 0.0);
    for c in conductors {
        acc += ln_bigint(c)?;
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyFamily);
    }
    Ok(acc / n as f64)
}

pub fn ln_bigint(c: &BigInt) -> Result<f64> {
    if c.sign() != num_bigint::Sign::Plus {
        return Err(Error::InvalidInput(format!("conductor {c} is not positive")));
    }
    let bits = c.bits();
    if bits < 1000 {
        return Ok(c.to_f64().expect("finite").ln());
    }
    let shift = bits - 64;
    Ok((c >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2)
}

/// Local character values `θ(p^k)` from a splitting symbol.
pub type ThetaFn<'a> = &'a dyn Fn(&SplittingSymbol, u32) -> i64;

/// The standard-representation values `Σ_{f | k} f - 1`.
pub fn standard_theta(s: &SplittingSymbol, k: u32) -> i64 {
    theta_coefficient(s, k)
}

/// The four prime sums and per-prime `S1` terms.
#[derive(Clone, Debug, Serialize)]
pub struct PrimeSums {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s_ram: f64,
    /// Largest `p^k` range end: sums run over `k log p < σ L`.
    pub prime_bound: f64,
    pub per_prime_s1: Vec<(u64, f64)>,
}

/// Pairwise summation, so results do not depend on how terms were grouped upstream.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// `S1, S2, S3, S_ram` with weights `2/(L|F|) · log p / p^{k/2} · f̂(k log p / L) · Σ θ(p^k)`.
pub fn prime_sums(stats: &FamilyStats, tf: &Fejer, theta: ThetaFn) -> Result<PrimeSums> {
    let l = stats.mean_log_conductor().ok_or(Error::EmptyFamily)?;
    prime_sums_with_l(stats, tf, theta, l)
}

pub fn prime_sums_with_l(stats: &FamilyStats, tf: &Fejer, theta: ThetaFn, l: f64) -> Result<PrimeSums> {
    if stats.total == 0 {
        return Err(Error::EmptyFamily);
    }
    let bound = (l * tf.sigma).exp();
    let needed: Vec<u64> = if bound < 2.0 { Vec::new() } else { primes_up_to(bound.floor() as u64) };
    if let Some(&need) = needed.iter().rev().find(|&&p| (p as f64).ln() < l * tf.sigma) {
        if needed.iter().any(|&p| stats.prime_index(p).is_none()) {
            return Err(Error::InsufficientPrimeCache { have: stats.max_prime(), need });
        }
    }
    let scale = 2.0 / (l * stats.total as f64);
    let (mut t1, mut t2, mut t3, mut tr) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut per_prime_s1 = Vec::new();
    for &p in &needed {
        let lp = (p as f64).ln();
        let counts = stats.counts_at(p).expect("checked above");
        let mut s1_here = 0.0;
        let mut k = 1u32;
        while (k as f64) * lp < l * tf.sigma {
            let w = scale * lp / (p as f64).powf(k as f64 / 2.0) * tf.fourier(k as f64 * lp / l);
            for (s, c) in &counts {
                if *c == 0 {
                    continue;
                }
                let term = w * (*c as f64) * theta(s, k) as f64;
                if !s.is_unramified() {
                    tr.push(term);
                } else if k == 1 {
                    s1_here += term;
                    t1.push(term);
                } else if k == 2 {
                    t2.push(term);
                } else {
                    t3.push(term);
                }
            }
            k += 1;
        }
        per_prime_s1.push((p, s1_here));
    }
    Ok(PrimeSums {
        s1: pairwise_sum(&t1),
        s2: pairwise_sum(&t2),
        s3: pairwise_sum(&t3),
        s_ram: pairwise_sum(&tr),
        prime_bound: bound,
        per_prime_s1,
    })
}

/// `Σ_{p: 2 log p < σL} (2/L)(log p / p) f̂(2 log p / L) · i3`, the value `S2`
/// approaches when `E[θ(p^2)] → i3` over the family.
pub fn s2_indicator_prediction(tf: &Fejer, l: f64, i3: i64) -> f64 {
    let bound = (l * tf.sigma / 2.0).exp();
    if bound < 2.0 {
        return 0.0;
    }
    let terms: Vec<f64> = primes_up_to(bound.floor() as u64)
        .into_iter()
        .map(|p| {
            let lp = (p as f64).ln();
            2.0 / l * lp / p as f64 * tf.fourier(2.0 * lp / l) * i3 as f64
        })
        .collect();
    pairwise_sum(&terms)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Symmetry {
    Sp,
    SO,
}

impl Symmetry {
    /// `f̂(0) ∓ f(0)/2` for the Fejér kernel.
    pub fn target(&self, sigma: f64) -> f64 {
        match self {
            Symmetry::Sp => 1.0 - sigma / 2.0,
            Symmetry::SO => 1.0 + sigma / 2.0,
        }
    }

    pub fn indicator(&self) -> i64 {
        match self {
            Symmetry::Sp => 1,
            Symmetry::SO => -1,
        }
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symmetry::Sp => "sp",
            Symmetry::SO => "so",
        })
    }
}

impl FromStr for Symmetry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sp" | "symplectic" => Ok(Symmetry::Sp),
            "so" | "orthogonal" => Ok(Symmetry::SO),
            _ => Err(Error::InvalidInput(format!("unknown symmetry {s}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OneLevelReport {
    pub format_version: String,
    pub x: f64,
    pub sigma: f64,
    pub symmetry: Symmetry,
    pub family_size: u64,
    #[serde(rename = "L")]
    pub l: f64,
    pub main_term: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s_ram: f64,
    pub density_estimate: f64,
    pub target: f64,
    pub residual: f64,
    pub s2_indicator_prediction: f64,
    pub prime_bound: f64,
    /// The archimedean O(1) and pole terms of the explicit formula are not included.
    pub pole_term_included: bool,
    pub per_prime_s1: Vec<(u64, f64)>,
}

/// `D = f̂(0) - (S1 + S2 + S3 + S_ram)`; the main term is exactly `f̂(0)`
/// because `L` is the family mean of `log C`.
pub fn one_level_density(
    stats: &FamilyStats,
    x: f64,
    sigma: f64,
    symmetry: Symmetry,
    theta: ThetaFn,
) -> Result<OneLevelReport> {
    let tf = Fejer::new(sigma)?;
    let l = stats.mean_log_conductor().ok_or(Error::EmptyFamily)?;
    let sums = prime_sums_with_l(stats, &tf, theta, l)?;
    let main_term = tf.main_term();
    let d = main_term - (sums.s1 + sums.s2 + sums.s3 + sums.s_ram);
    let target = symmetry.target(sigma);
    Ok(OneLevelReport {
        format_version: crate::monicfamily::FORMAT_VERSION.into(),
        x,
        sigma,
        symmetry,
        family_size: stats.total,
        l,
        main_term,
        s1: sums.s1,
        s2: sums.s2,
        s3: sums.s3,
        s_ram: sums.s_ram,
        density_estimate: d,
        target,
        residual: d - target,
        s2_indicator_prediction: s2_indicator_prediction(&tf, l, symmetry.indicator()),
        prime_bound: sums.prime_bound,
        pole_term_included: false,
        per_prime_s1: sums.per_prime_s1,
    })
}
