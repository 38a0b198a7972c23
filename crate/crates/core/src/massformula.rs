//! Local masses of degree-n étale algebras, the local densities of the
//! universal family, and the predicted field-count constants
//! `c_n = 1/2 · d_inf · prod_p d_p`.

use crate::arith::primes_up_to;
use crate::conjugacy::{rational_to_f64, two_torsion_proportion};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use serde::Serialize;

/// Number of partitions of `k` into at most `m` parts.
pub fn partitions_at_most(k: i64, m: i64) -> u64 {
    if k < 0 {
        return 0;
    }
    if k == 0 {
        return 1;
    }
    if m <= 0 {
        return 0;
    }
    // dp over part sizes 1..=m, equivalent by conjugation to parts of size <= m
    let k = k as usize;
    let mut dp = vec![0u64; k + 1];
    dp[0] = 1;
    for part in 1..=(m as usize).min(k) {
        for s in part..=k {
            dp[s] += dp[s - part];
        }
    }
    dp[k]
}

fn check_n(n: u32) -> Result<()> {
    if (1..=8).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("n = {n} outside 1..=8")))
    }
}

/// `sum_{k<n} q(k, n-k) p^{-k}`.
pub fn local_mass(n: u32, p: u64) -> Result<BigRational> {
    check_n(n)?;
    let mut acc = BigRational::zero();
    for k in 0..n as i64 {
        let q = partitions_at_most(k, n as i64 - k);
        acc += BigRational::new(BigInt::from(q), Pow::pow(&BigInt::from(p), k as u32));
    }
    Ok(acc)
}

/// Coefficients `c_0..c_n` with `d_p = sum_k c_k p^{-k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalDensityTable {
    pub n: u32,
    pub coefficients: Vec<i64>,
}

impl LocalDensityTable {
    pub fn eval(&self, p: u64) -> BigRational {
        let mut acc = BigRational::zero();
        for (k, &c) in self.coefficients.iter().enumerate() {
            acc += BigRational::new(BigInt::from(c), Pow::pow(&BigInt::from(p), k as u32));
        }
        acc
    }

    pub fn eval_f64(&self, p: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 * p.powi(-(k as i32)))
            .sum()
    }
}

pub fn local_density(n: u32) -> Result<LocalDensityTable> {
    check_n(n)?;
    let n_i = n as i64;
    let coefficients = (0..=n_i)
        .map(|k| partitions_at_most(k, n_i - k) as i64 - partitions_at_most(k - 1, n_i - k + 1) as i64)
        .collect();
    Ok(LocalDensityTable { n, coefficients })
}

/// `c_n` with a rigorous interval for the omitted primes `p > P`.
#[derive(Clone, Debug, Serialize)]
pub struct FieldCountConstant {
    pub n: u32,
    pub prime_cutoff: u64,
    pub d_infinity: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Bound on `sum_{p > P} p^{-2}` by the odd integers above `P`.
fn prime_tail_inverse_squares(cutoff: u64) -> f64 {
    // sum over odd m > P of m^-2 <= integral from P-1 of dt/(2 t^2)
    1.0 / (2.0 * (cutoff as f64 - 1.0))
}

/// Tail bound: `|log d_p| <= 2 p^{-2}` for all `p > P >= 100` and `n <= 8`.
///
/// Since `c_1 = q(1,n-1) - q(0,n) = 0`, `|d_p - 1| <= p^{-2} (|c_2| + sum_{k>=3} |c_k| p^{2-k})`.
/// For `n <= 8` one has `|c_2| <= 1` and `sum |c_k| <= 20`, so `|d_p - 1| <= 1.2 p^{-2}` once
/// `p >= 100`, and `|log(1+t)| <= |t|/(1-|t|) < 2|t|/1.2` there.
pub const TAIL_LOG_CONSTANT: f64 = 2.0;

pub fn field_count_constant(n: u32, prime_cutoff: u64) -> Result<FieldCountConstant> {
    check_n(n)?;
    if prime_cutoff < 100 {
        return Err(Error::InvalidInput("prime cutoff must be at least 100".into()));
    }
    let table = local_density(n)?;
    debug_assert!(table.coefficients.get(1).is_none_or(|&c| c == 0));
    let d_inf = two_torsion_proportion(n)?;
    let mut log_prod = 0.0f64;
    for p in primes_up_to(prime_cutoff) {
        log_prod += table.eval_f64(p as f64).ln();
    }
    let value = 0.5 * rational_to_f64(&d_inf) * log_prod.exp();
    let tail = TAIL_LOG_CONSTANT * prime_tail_inverse_squares(prime_cutoff);
    Ok(FieldCountConstant {
        n,
        prime_cutoff,
        d_infinity: crate::conjugacy::rational_string(&d_inf),
        value,
        lower: value * (-tail).exp(),
        upper: value * tail.exp(),
    })
}

/// `zeta(s)` for real `s > 1` by partial sums plus an integral tail bound,
/// returned as (estimate, error bound).
pub fn zeta_with_bound(s: f64, terms: u64) -> (f64, f64) {
    let mut acc = 0.0;
    for m in (1..=terms).rev() {
        acc += (m as f64).powf(-s);
    }
    // tail lies between the integrals from N+1 and from N
    let lo = (terms as f64 + 1.0).powf(1.0 - s) / (s - 1.0);
    let hi = (terms as f64).powf(1.0 - s) / (s - 1.0);
    (acc + 0.5 * (lo + hi), 0.5 * (hi - lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Signed};

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn partition_counts() {
        assert_eq!(partitions_at_most(0, 5), 1);
        assert_eq!(partitions_at_most(2, 2), 2);
        assert_eq!(partitions_at_most(3, 1), 1);
        assert_eq!(partitions_at_most(4, 0), 0);
        assert_eq!(partitions_at_most(10, 10), 42);
    }

    #[test]
    fn partition_counts_brute_force() {
        for k in 0..=12 {
            let all = crate::conjugacy::partitions(k as u32);
            for m in 0..=12 {
                let want = if k == 0 { 1 } else { all.iter().filter(|t| t.parts.len() <= m).count() as u64 };
                assert_eq!(partitions_at_most(k, m as i64), want, "k={k} m={m}");
            }
        }
    }

    #[test]
    fn masses() {
        assert_eq!(local_mass(2, 3).unwrap(), q(4, 3));
        let want = q(1, 1) + q(1, 2) + q(2, 4) + q(2, 8) + q(1, 16);
        assert_eq!(local_mass(5, 2).unwrap(), want);
        for n in 2..=8 {
            for p in [2u64, 3, 101] {
                let dev = local_mass(n, p).unwrap() - BigRational::one() - q(1, p as i64);
                let second = q(partitions_at_most(2, n as i64 - 2) as i64, (p * p) as i64);
                let rest = dev - second;
                let bound = q(30, (p * p * p) as i64);
                assert!(rest.abs() <= bound, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn densities() {
        assert_eq!(local_density(3).unwrap().coefficients, vec![1, 0, 0, -1]);
        assert_eq!(local_density(4).unwrap().coefficients, vec![1, 0, 1, -1, -1]);
        assert_eq!(local_density(5).unwrap().coefficients, vec![1, 0, 1, 0, -1, -1]);
    }

    #[test]
    fn tail_constant_is_valid() {
        for n in 2..=8 {
            let c = local_density(n).unwrap().coefficients;
            assert_eq!(c[1], 0);
            assert!(c[2].abs() <= 1);
            assert!(c.iter().map(|x| x.abs()).sum::<i64>() <= 21);
            for p in [101.0f64, 1009.0] {
                let d = local_density(n).unwrap().eval_f64(p);
                assert!(d.ln().abs() <= TAIL_LOG_CONSTANT / (p * p));
            }
        }
    }

    #[test]
    fn cubic_constant() {
        let c = field_count_constant(3, 100_000).unwrap();
        let (z3, err) = zeta_with_bound(3.0, 100_000);
        assert!(err < 1e-14);
        let target = 1.0 / (3.0 * z3);
        assert!((c.value - target).abs() < 1e-6, "{} vs {}", c.value, target);
        assert!(c.lower <= target && target <= c.upper);
    }
}
