//! Conjugacy classes of symmetric groups, Sato-Tate measures pushed forward
//! from finite monodromy groups, and their indicators.
//!
//! Eigenangles are rational rotation numbers, so traces live in a
//! cyclotomic field and every indicator is computed exactly.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

/// Upper bound on the order of a group generated by explicit permutations.
pub const GROUP_SIZE_BOUND: usize = 1_000_000;

/// A partition of `n`, parts weakly decreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    pub parts: Vec<u32>,
}

impl CycleType {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidInput("cycle type needs positive parts".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CycleType { parts })
    }

    pub fn identity(n: u32) -> Self {
        CycleType { parts: vec![1; n as usize] }
    }

    pub fn n(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn fixed_points(&self) -> u32 {
        self.parts.iter().filter(|&&k| k == 1).count() as u32
    }

    /// Value of the standard (n-1)-dimensional character.
    pub fn char_std(&self) -> i64 {
        self.fixed_points() as i64 - 1
    }

    /// Order of the centralizer, `prod_k k^{m_k} m_k!`.
    pub fn centralizer_order(&self) -> BigUint {
        let mut mult: BTreeMap<u32, u32> = BTreeMap::new();
        for &k in &self.parts {
            *mult.entry(k).or_default() += 1;
        }
        let mut acc = BigUint::one();
        for (k, m) in mult {
            for i in 1..=m {
                acc *= BigUint::from(k) * BigUint::from(i);
            }
        }
        acc
    }

    /// Number of permutations with this cycle type.
    pub fn class_size(&self) -> BigUint {
        factorial(self.n()) / self.centralizer_order()
    }

    /// Multiplicity of each part length.
    pub fn multiplicities(&self) -> BTreeMap<u32, u32> {
        let mut mult = BTreeMap::new();
        for &k in &self.parts {
            *mult.entry(k).or_default() += 1;
        }
        mult
    }

    /// Eigenangles of the class under the standard representation.
    pub fn spectral_point(&self) -> SpectralPoint {
        let mut angles = Vec::new();
        for &f in &self.parts {
            for j in 0..f {
                angles.push((j as i64, f as i64));
            }
        }
        let pos = angles.iter().position(|&(j, _)| j == 0).expect("angle 0 present");
        angles.remove(pos);
        SpectralPoint::new(angles)
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        let many = self.parts.iter().any(|&k| k >= 10);
        for (i, k) in self.parts.iter().enumerate() {
            if many && i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

pub fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// All partitions of `n`, each weakly decreasing, in reverse lexicographic order.
pub fn partitions(n: u32) -> Vec<CycleType> {
    fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<CycleType>) {
        if n == 0 {
            out.push(CycleType { parts: cur.clone() });
            return;
        }
        for k in (1..=max.min(n)).rev() {
            cur.push(k);
            rec(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClassData {
    pub cycle_type: CycleType,
    pub size: BigUint,
    pub char_std: i64,
    pub ambient_n: u32,
}

pub fn conjugacy_classes(n: u32) -> Result<Vec<ConjugacyClassData>> {
    if !(1..=12).contains(&n) {
        return Err(Error::InvalidInput(format!("n = {n} outside 1..=12")));
    }
    Ok(partitions(n)
        .into_iter()
        .rev()
        .map(|t| ConjugacyClassData {
            size: t.class_size(),
            char_std: t.char_std(),
            ambient_n: n,
            cycle_type: t,
        })
        .collect())
}

/// Cycle type of `tau^k`: each part l becomes gcd(l,k) parts of length l/gcd(l,k).
pub fn power_class(tau: &CycleType, k: u32) -> CycleType {
    let mut parts = Vec::new();
    for &l in &tau.parts {
        let g = if k == 0 { l } else { l.gcd(&k) };
        parts.extend(std::iter::repeat_n(l / g, g as usize));
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    CycleType { parts }
}

/// Fraction `j/f` with `0 <= j < f`, reduced.
fn norm_angle(j: i64, f: i64) -> (i64, i64) {
    let g = j.gcd(&f);
    let (j, f) = (j / g, f / g);
    (j.rem_euclid(f), f)
}

/// Multiset of eigenangles `j/f` in `[0,1)`, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpectralPoint {
    angles: Vec<(i64, i64)>,
}

impl SpectralPoint {
    pub fn new(angles: Vec<(i64, i64)>) -> Self {
        let mut a: Vec<(i64, i64)> = angles.into_iter().map(|(j, f)| norm_angle(j, f)).collect();
        a.sort_by(|x, y| (x.0 * y.1).cmp(&(y.0 * x.1)));
        SpectralPoint { angles: a }
    }

    pub fn dim(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[(i64, i64)] {
        &self.angles
    }

    fn order(&self) -> i64 {
        self.angles.iter().fold(1, |acc, &(_, f)| acc.lcm(&f))
    }
}

impl fmt::Display for SpectralPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .angles
            .iter()
            .map(|&(j, d)| if j == 0 { "0".into() } else { format!("{j}/{d}") })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Finitely supported probability measure on spectral points of a fixed dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatoTateMeasure {
    pub dim: usize,
    pub atoms: Vec<(SpectralPoint, BigRational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Indicators {
    pub i1: BigRational,
    pub i2: BigRational,
    pub i3: BigRational,
}

impl SatoTateMeasure {
    /// Build from weighted points, merging repeated points.
    pub fn from_weighted(points: Vec<(SpectralPoint, BigRational)>) -> Result<Self> {
        let dim = points.first().map(|p| p.0.dim()).unwrap_or(0);
        let mut merged: BTreeMap<SpectralPoint, BigRational> = BTreeMap::new();
        for (pt, m) in points {
            if pt.dim() != dim {
                return Err(Error::InvalidInput("mixed spectral dimensions".into()));
            }
            if m.is_negative() {
                return Err(Error::InvalidInput("negative mass".into()));
            }
            *merged.entry(pt).or_insert_with(BigRational::zero) += m;
        }
        Ok(SatoTateMeasure { dim, atoms: merged.into_iter().collect() })
    }

    pub fn total_mass(&self) -> BigRational {
        self.atoms.iter().fold(BigRational::zero(), |acc, (_, m)| acc + m)
    }

    pub fn mass_of(&self, pt: &SpectralPoint) -> BigRational {
        self.atoms
            .iter()
            .find(|(q, _)| q == pt)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn indicators(&self) -> Result<Indicators> {
        let total = self.total_mass();
        if !total.is_one() {
            return Err(Error::NonNormalizedMeasure(total.to_string()));
        }
        let n = self.atoms.iter().fold(1i64, |acc, (pt, _)| acc.lcm(&pt.order()));
        let field = Cyclotomic::new(n as usize);
        let mut i1 = field.zero();
        let mut i2 = field.zero();
        let mut i3 = field.zero();
        for (pt, mass) in &self.atoms {
            let exps: Vec<usize> = pt.angles.iter().map(|&(j, f)| (j * (n / f)) as usize).collect();
            let tr = field.sum_of_powers(&exps, 1);
            let tr_bar = field.conj(&tr);
            let tr_sq = field.sum_of_powers(&exps, 2);
            field.add_scaled(&mut i1, &field.mul(&tr, &tr_bar), mass);
            field.add_scaled(&mut i2, &field.mul(&tr, &tr), mass);
            field.add_scaled(&mut i3, &tr_sq, mass);
        }
        Ok(Indicators {
            i1: field.rational_value(&i1)?,
            i2: field.rational_value(&i2)?,
            i3: field.rational_value(&i3)?,
        })
    }
}

/// Arithmetic in Q[x]/(x^N - 1), with reduction modulo the N-th cyclotomic
/// polynomial to read off rational values.
struct Cyclotomic {
    n: usize,
    phi: Vec<BigInt>,
}

impl Cyclotomic {
    fn new(n: usize) -> Self {
        Cyclotomic { n, phi: cyclotomic_poly(n) }
    }

    fn zero(&self) -> Vec<BigRational> {
        vec![BigRational::zero(); self.n]
    }

    fn sum_of_powers(&self, exps: &[usize], k: usize) -> Vec<BigRational> {
        let mut v = self.zero();
        for &e in exps {
            v[(e * k) % self.n] += BigRational::one();
        }
        v
    }

    fn conj(&self, a: &[BigRational]) -> Vec<BigRational> {
        let mut v = self.zero();
        for (i, c) in a.iter().enumerate() {
            v[(self.n - i) % self.n] += c;
        }
        v
    }

    fn mul(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut v = self.zero();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    v[(i + j) % self.n] += x * y;
                }
            }
        }
        v
    }

    fn add_scaled(&self, acc: &mut [BigRational], a: &[BigRational], s: &BigRational) {
        for (x, y) in acc.iter_mut().zip(a) {
            *x += y * s;
        }
    }

    /// Reduce modulo Phi_N; the element must be rational.
    fn rational_value(&self, a: &[BigRational]) -> Result<BigRational> {
        let mut r: Vec<BigRational> = a.to_vec();
        let d = self.phi.len() - 1;
        for i in (d..r.len()).rev() {
            let c = r[i].clone();
            if c.is_zero() {
                continue;
            }
            for (j, pc) in self.phi.iter().enumerate() {
                r[i - d + j] -= &c * BigRational::from_integer(pc.clone());
            }
        }
        if r[1..d.max(1)].iter().any(|c| !c.is_zero()) {
            return Err(Error::InvalidInput("indicator is not rational".into()));
        }
        Ok(r[0].clone())
    }
}

/// Integer coefficients of the n-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_poly(n: usize) -> Vec<BigInt> {
    // x^n - 1 divided by Phi_d for every proper divisor d
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    num[0] = BigInt::from(-1);
    num[n] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let den = cyclotomic_poly(d);
            num = exact_div(&num, &den);
        }
    }
    num
}

fn exact_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![BigInt::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db].clone();
        q[i] = c.clone();
        for (j, bc) in b.iter().enumerate() {
            r[i + j] -= &c * bc;
        }
    }
    debug_assert!(r.iter().all(|c| c.is_zero()));
    q
}

/// Monodromy groups whose Sato-Tate measures are used by the families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    SnStandard(u32),
    C3InS3,
    S2InS3,
    D4InS4,
    Q8Dim2,
    /// Permutations in one-line notation on `0..n`.
    Generators { n: usize, gens: Vec<Vec<usize>> },
}

impl GroupSpec {
    /// Parse `S5`, `C3_in_S3`, `S2_in_S3`, `D4_in_S4`, `Q8`, or
    /// `perm:<n>:<img>|<img>` with 1-based comma-separated images.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "C3_in_S3" => return Ok(GroupSpec::C3InS3),
            "S2_in_S3" => return Ok(GroupSpec::S2InS3),
            "D4_in_S4" => return Ok(GroupSpec::D4InS4),
            "Q8" | "Q8_dim2" => return Ok(GroupSpec::Q8Dim2),
            _ => {}
        }
        if let Some(rest) = t.strip_prefix("perm:") {
            let (n, gens) = rest
                .split_once(':')
                .ok_or_else(|| Error::InvalidInput(format!("bad generator spec {t}")))?;
            let n: usize = n.parse().map_err(|_| Error::InvalidInput(format!("bad degree in {t}")))?;
            let mut out = Vec::new();
            for g in gens.split('|') {
                let img: std::result::Result<Vec<usize>, _> =
                    g.split(',').map(|x| x.trim().parse::<usize>().map(|v| v.wrapping_sub(1))).collect();
                let img = img.map_err(|_| Error::InvalidInput(format!("bad permutation {g}")))?;
                out.push(img);
            }
            return Ok(GroupSpec::Generators { n, gens: out });
        }
        if let Some(n) = t.strip_prefix('S').and_then(|x| x.parse::<u32>().ok()) {
            return Ok(GroupSpec::SnStandard(n));
        }
        Err(Error::InvalidInput(format!("unknown group spec {t}")))
    }

    fn generators(&self) -> Option<(usize, Vec<Vec<usize>>)> {
        match self {
            GroupSpec::SnStandard(n) => {
                let n = *n as usize;
                if n == 1 {
                    return Some((1, vec![vec![0]]));
                }
                let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
                let mut swap: Vec<usize> = (0..n).collect();
                swap.swap(0, 1);
                Some((n, vec![cycle, swap]))
            }
            GroupSpec::C3InS3 => Some((3, vec![vec![1, 2, 0]])),
            GroupSpec::S2InS3 => Some((3, vec![vec![1, 0, 2]])),
            GroupSpec::D4InS4 => Some((4, vec![vec![1, 2, 3, 0], vec![2, 1, 0, 3]])),
            GroupSpec::Q8Dim2 => None,
            GroupSpec::Generators { n, gens } => Some((*n, gens.clone())),
        }
    }
}

/// Composition `a` after `b` in one-line notation.
fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

/// Cycle type of a permutation in one-line notation.
pub fn cycle_type_of(perm: &[usize]) -> CycleType {
    let mut seen = vec![false; perm.len()];
    let mut parts = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        parts.push(len);
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    CycleType { parts }
}

/// All elements of the subgroup of S_n generated by `gens`.
pub fn group_closure(n: usize, gens: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    for g in gens {
        let mut sorted = g.clone();
        sorted.sort_unstable();
        if g.len() != n || sorted != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidInput(format!("{g:?} is not a permutation of 1..{n}")));
        }
    }
    let id: Vec<usize> = (0..n).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(id.clone());
    queue.push_back(id);
    let mut out = Vec::new();
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = compose(g, &x);
            if seen.insert(y.clone()) {
                if seen.len() > GROUP_SIZE_BOUND {
                    return Err(Error::GroupTooLarge(GROUP_SIZE_BOUND));
                }
                queue.push_back(y);
            }
        }
        out.push(x);
    }
    Ok(out)
}

/// The Sato-Tate measure of the family with monodromy `spec`.
pub fn subgroup_pushforward(spec: &GroupSpec) -> Result<SatoTateMeasure> {
    if let GroupSpec::SnStandard(n) = spec {
        if !(1..=12).contains(n) {
            return Err(Error::InvalidInput(format!("n = {n} outside 1..=12")));
        }
        if *n > 8 {
            // closure would be too large; use the class sizes directly
            let total = BigInt::from(factorial(*n));
            let pts = conjugacy_classes(*n)?
                .into_iter()
                .map(|c| {
                    (
                        c.cycle_type.spectral_point(),
                        BigRational::new(BigInt::from(c.size), total.clone()),
                    )
                })
                .collect();
            return SatoTateMeasure::from_weighted(pts);
        }
    }
    match spec.generators() {
        None => Ok(q8_measure()),
        Some((n, gens)) => {
            let elems = group_closure(n, &gens)?;
            let order = BigInt::from(elems.len());
            let mut counts: BTreeMap<CycleType, u64> = BTreeMap::new();
            for g in &elems {
                *counts.entry(cycle_type_of(g)).or_default() += 1;
            }
            let pts = counts
                .into_iter()
                .map(|(t, c)| (t.spectral_point(), BigRational::new(BigInt::from(c), order.clone())))
                .collect();
            SatoTateMeasure::from_weighted(pts)
        }
    }
}

/// Conjugacy classes of Q8 in its 2-dimensional representation:
/// (label, class size, eigenangles).
pub fn q8_classes() -> Vec<(&'static str, u32, SpectralPoint)> {
    vec![
        ("1", 1, SpectralPoint::new(vec![(0, 1), (0, 1)])),
        ("-1", 1, SpectralPoint::new(vec![(1, 2), (1, 2)])),
        ("i", 2, SpectralPoint::new(vec![(1, 4), (3, 4)])),
        ("j", 2, SpectralPoint::new(vec![(1, 4), (3, 4)])),
        ("k", 2, SpectralPoint::new(vec![(1, 4), (3, 4)])),
    ]
}

fn q8_measure() -> SatoTateMeasure {
    let pts = q8_classes()
        .into_iter()
        .map(|(_, size, pt)| (pt, BigRational::new(BigInt::from(size), BigInt::from(8))))
        .collect();
    SatoTateMeasure::from_weighted(pts).expect("Q8 classes are consistent")
}

pub fn indicators(mu: &SatoTateMeasure) -> Result<Indicators> {
    mu.indicators()
}

/// Proportion of elements of S_n whose square is the identity.
pub fn two_torsion_proportion(n: u32) -> Result<BigRational> {
    let classes = conjugacy_classes(n)?;
    let count = classes
        .iter()
        .filter(|c| c.cycle_type.parts.iter().all(|&k| k <= 2))
        .fold(BigUint::zero(), |acc, c| acc + &c.size);
    Ok(BigRational::new(BigInt::from(count), BigInt::from(factorial(n))))
}

/// Render a rational as `num/den` (or `num` when integral).
pub fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn ct(p: &[u32]) -> CycleType {
        CycleType::new(p.to_vec()).unwrap()
    }

    #[test]
    fn classes_of_small_groups() {
        let c1 = conjugacy_classes(1).unwrap();
        assert_eq!(c1.len(), 1);
        assert_eq!(c1[0].size, BigUint::one());
        assert_eq!(c1[0].char_std, 0);

        let c3 = conjugacy_classes(3).unwrap();
        let got: Vec<(Vec<u32>, u64, i64)> = c3
            .iter()
            .map(|c| (c.cycle_type.parts.clone(), c.size.to_u64().unwrap(), c.char_std))
            .collect();
        assert_eq!(got, vec![(vec![1, 1, 1], 1, 2), (vec![2, 1], 3, 0), (vec![3], 2, -1)]);

        let c5 = conjugacy_classes(5).unwrap();
        assert_eq!(c5.len(), 7);
        let total: BigUint = c5.iter().map(|c| c.size.clone()).sum();
        assert_eq!(total, BigUint::from(120u32));
        assert!(conjugacy_classes(0).is_err());
        assert!(conjugacy_classes(13).is_err());
    }

    #[test]
    fn class_sizes_sum_to_factorial() {
        for n in 1..=12 {
            let total: BigUint = conjugacy_classes(n).unwrap().iter().map(|c| c.size.clone()).sum();
            assert_eq!(total, factorial(n));
        }
    }

    #[test]
    fn powers() {
        assert_eq!(power_class(&ct(&[3]), 3), ct(&[1, 1, 1]));
        assert_eq!(power_class(&ct(&[4]), 2), ct(&[2, 2]));
        assert_eq!(power_class(&ct(&[2, 1]), 2), ct(&[1, 1, 1]));
        assert_eq!(power_class(&ct(&[6, 2]), 4), ct(&[3, 3, 1, 1]));
    }

    #[test]
    fn embedding_removes_one_trivial_angle() {
        let pt = ct(&[2, 1]).spectral_point();
        assert_eq!(pt.angles(), &[(0, 1), (1, 2)]);
        let pt = ct(&[1, 1, 1]).spectral_point();
        assert_eq!(pt.angles(), &[(0, 1), (0, 1)]);
    }

    #[test]
    fn s3_measure_masses() {
        let mu = subgroup_pushforward(&GroupSpec::SnStandard(3)).unwrap();
        assert_eq!(mu.mass_of(&ct(&[1, 1, 1]).spectral_point()), q(1, 6));
        assert_eq!(mu.mass_of(&ct(&[2, 1]).spectral_point()), q(1, 2));
        assert_eq!(mu.mass_of(&ct(&[3]).spectral_point()), q(1, 3));
    }

    #[test]
    fn c3_and_q8_measures() {
        let mu = subgroup_pushforward(&GroupSpec::C3InS3).unwrap();
        assert_eq!(mu.atoms.len(), 2);
        assert_eq!(mu.mass_of(&ct(&[1, 1, 1]).spectral_point()), q(1, 3));
        assert_eq!(mu.mass_of(&ct(&[3]).spectral_point()), q(2, 3));

        let mu = subgroup_pushforward(&GroupSpec::Q8Dim2).unwrap();
        assert_eq!(mu.dim, 2);
        assert_eq!(mu.mass_of(&SpectralPoint::new(vec![(0, 1), (0, 1)])), q(1, 8));
        assert_eq!(mu.mass_of(&SpectralPoint::new(vec![(1, 2), (1, 2)])), q(1, 8));
        assert_eq!(mu.mass_of(&SpectralPoint::new(vec![(1, 4), (3, 4)])), q(3, 4));
    }

    #[test]
    fn d4_measure() {
        let mu = subgroup_pushforward(&GroupSpec::D4InS4).unwrap();
        // (1,1,1), (1,1,-1), (-1,i,-i), (1,-1,-1)
        assert_eq!(mu.mass_of(&ct(&[1, 1, 1, 1]).spectral_point()), q(1, 8));
        assert_eq!(mu.mass_of(&ct(&[2, 1, 1]).spectral_point()), q(1, 4));
        assert_eq!(mu.mass_of(&ct(&[4]).spectral_point()), q(1, 4));
        assert_eq!(mu.mass_of(&ct(&[2, 2]).spectral_point()), q(3, 8));
    }

    #[test]
    fn indicator_values() {
        let one = Indicators { i1: q(1, 1), i2: q(1, 1), i3: q(1, 1) };
        for n in 2..=8 {
            let mu = subgroup_pushforward(&GroupSpec::SnStandard(n)).unwrap();
            assert_eq!(mu.indicators().unwrap(), one, "n={n}");
        }
        let q8 = subgroup_pushforward(&GroupSpec::Q8Dim2).unwrap();
        assert_eq!(q8.indicators().unwrap(), Indicators { i1: q(1, 1), i2: q(1, 1), i3: q(-1, 1) });
        let c3 = subgroup_pushforward(&GroupSpec::C3InS3).unwrap();
        assert_eq!(c3.indicators().unwrap(), Indicators { i1: q(2, 1), i2: q(2, 1), i3: q(0, 1) });
    }

    #[test]
    fn non_normalized_rejected() {
        let mu = SatoTateMeasure::from_weighted(vec![(ct(&[2]).spectral_point(), q(1, 2))]).unwrap();
        assert!(matches!(mu.indicators(), Err(Error::NonNormalizedMeasure(_))));
    }

    #[test]
    fn two_torsion() {
        assert_eq!(two_torsion_proportion(3).unwrap(), q(2, 3));
        assert_eq!(two_torsion_proportion(4).unwrap(), q(5, 12));
        assert_eq!(two_torsion_proportion(5).unwrap(), q(13, 60));
    }

    #[test]
    fn cyclotomic_polys() {
        let c12: Vec<i64> = cyclotomic_poly(12).iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(c12, vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn closure_bound_enforced() {
        let n = 10;
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        assert_eq!(group_closure(n, &[cycle, swap]), Err(Error::GroupTooLarge(GROUP_SIZE_BOUND)));
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(GroupSpec::parse("S4").unwrap(), GroupSpec::SnStandard(4));
        assert_eq!(GroupSpec::parse("Q8").unwrap(), GroupSpec::Q8Dim2);
        let g = GroupSpec::parse("perm:4:2,3,4,1|3,2,1,4").unwrap();
        let mu = subgroup_pushforward(&g).unwrap();
        assert_eq!(mu, subgroup_pushforward(&GroupSpec::D4InS4).unwrap());
        assert!(GroupSpec::parse("bogus").is_err());
    }
}
