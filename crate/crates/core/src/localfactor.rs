//! Local smoothness probabilities on a fiber, their Euler products over the
//! base line, and the limiting point-count distributions.
//!
//! Every closed form here is an exact rational; floats appear only in
//! [`CertifiedValue`], where an infinite product has to be truncated.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{closed_point_count, field_new, prime_power, Fe, FieldCtx, SpaceKind};
use crate::poly::BinaryForm;
use crate::smoothcheck::{is_good_pair_forms, projective_root_count};

/// Largest number of pairs the brute-force counters will enumerate.
pub const PAIR_CAP: u128 = 1 << 24;

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// `p/q` with an explicit denominator, even when it is one.
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::Malformed(format!("not a rational: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse::<BigInt>().map_err(|_| bad())?, q.trim().parse::<BigInt>().map_err(|_| bad())?),
        None => (s.trim().parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
    };
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

fn check_q(q: u64) -> Result<(u32, u32)> {
    prime_power(q).ok_or_else(|| Error::InvalidParameter(format!("{q} is not a prime power")))
}

fn check_ne(e: u32, n: u32) -> Result<()> {
    if e == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!("need e >= 1 and n >= 1, got e = {e}, n = {n}")));
    }
    Ok(())
}

/// Number of good pairs `(F1, F2)` of binary forms of degree `n` over
/// `F_{q^e}`, in closed form.
pub fn good_pair_count(q: u64, e: u32, n: u32) -> Result<BigInt> {
    check_q(q)?;
    check_ne(e, n)?;
    let qe = big(q).pow(e);
    let p = |k: u32| qe.pow(k);
    Ok(match n {
        1 => p(4) - p(2),
        2 => p(6) - p(4) - p(3) + p(2),
        _ => p(2 * n + 2) - p(2 * n) - p(2 * n - 1) + p(2 * n - 3),
    })
}

fn pair_space(q: u64, e: u32, n: u32) -> Result<(FieldCtx, u64)> {
    let (p, k) = check_q(q)?;
    check_ne(e, n)?;
    let pairs = (q as u128).checked_pow(2 * e * (n + 1)).filter(|&c| c <= PAIR_CAP);
    if pairs.is_none() {
        return Err(Error::cap(format!("{q}^{} pairs of forms", 2 * e * (n + 1)), PAIR_CAP));
    }
    let big_field = field_new(p as u64, k * e)?;
    let forms = (big_field.q() as u64).pow(n + 1);
    Ok((big_field, forms))
}

fn form_at(k: &FieldCtx, n: u32, mut idx: u64) -> BinaryForm<Fe> {
    let q = k.q() as u64;
    let c = (0..=n)
        .map(|_| {
            let d = idx % q;
            idx /= q;
            Fe(d as u32)
        })
        .collect();
    BinaryForm::new(k, n as usize, c).expect("length n + 1")
}

/// Good pairs over `F_{q^e}` counted one by one with the good-pair test.
pub fn good_pair_count_bruteforce(q: u64, e: u32, n: u32) -> Result<BigInt> {
    let (k, forms) = pair_space(q, e, n)?;
    let total: u64 = (0..forms)
        .into_par_iter()
        .map(|i| {
            let f1 = form_at(&k, n, i);
            (0..forms).filter(|&j| is_good_pair_forms(&k, &f1, &form_at(&k, n, j))).count() as u64
        })
        .sum();
    Ok(big(total))
}

/// Probability that a curve is smooth along a given fiber of degree `e`,
/// for fiber degree `n` of the linear system.
pub fn local_smooth_factor(q: u64, e: u32, n: u32) -> Result<BigRational> {
    let count = good_pair_count(q, e, n)?;
    Ok(BigRational::new(count, big(q).pow(e * (2 * n + 2))))
}

/// `zeta_X(s)^-1 = prod_i (1 - q^(i - s))^(m_i)` where the space has
/// `sum_i m_i q^(i e)` points over `F_{q^e}`.
pub fn zeta_inverse(space: SpaceKind, q: u64, s: u32) -> Result<BigRational> {
    check_q(q)?;
    if s <= space.dimension() {
        return Err(Error::InvalidParameter(format!("zeta diverges at s = {s} for a space of dimension {}", space.dimension())));
    }
    let mut acc = BigRational::one();
    for (i, &m) in space.point_count_polynomial().iter().enumerate() {
        let factor = BigRational::one() - BigRational::new(BigInt::one(), big(q).pow(s - i as u32));
        for _ in 0..m {
            acc *= &factor;
        }
    }
    Ok(acc)
}

/// Integer polynomials in `u`, coefficient `i` multiplying `u^i`.
fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut c = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    c
}

/// The local factor as a polynomial in `u = q^-e`.
pub fn local_factor_polynomial(n: u32) -> Vec<i64> {
    match n {
        1 => vec![1, 0, -1],
        2 => vec![1, 0, -1, -1, 1],
        _ => vec![1, 0, -1, -1, 0, 1],
    }
}

/// `(1 - u^2)(1 - u^3) = 1 - u^2 - u^3 + u^5`, checked on coefficients.
pub fn product_identity_holds() -> bool {
    poly_mul(&[1, 0, -1], &[1, 0, 0, -1]) == local_factor_polynomial(3)
}

/// A truncated infinite product with a rigorous bound on the error.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedValue {
    pub value: f64,
    /// `|value - limit| <= tail_bound`.
    pub tail_bound: f64,
    /// Closed points of degree up to this were multiplied in.
    pub truncation: u32,
    /// The limit in closed form, when one is known.
    pub exact: Option<BigRational>,
}

impl CertifiedValue {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "value": self.value,
            "tail_bound": self.tail_bound,
            "truncation": self.truncation,
            "exact": self.exact.as_ref().map(ratio_string),
        })
    }
}

impl fmt::Display for CertifiedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12} +- {:.3e} (E = {})", self.value, self.tail_bound, self.truncation)?;
        if let Some(x) = &self.exact {
            write!(f, " = {}", ratio_string(x))?;
        }
        Ok(())
    }
}

/// Allowance for rounding in the truncated product, which is summed in
/// `f64` logarithms over at most a few dozen degrees.
const ROUNDING: f64 = 1e-14;

/// Per-factor constant: `1 - factor <= q^-2e + q^-3e <= 2 q^-2e` for every
/// implemented local factor.
const TAIL_C: f64 = 2.0;

/// Curves of fiber degree `n` on `F_a`; the local factors do not depend on `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothFamily {
    pub a: u32,
    pub n: u32,
}

/// Limiting probability that a curve of bidegree `(n, d)` on `F_a` is
/// smooth as `d` grows: the product of local factors over closed points of
/// the base line.
///
/// The tail bound uses `1 - prod (1 - x_i) <= sum x_i` with
/// `x_e = 1 - factor <= 2 q^-2e` and `N_e <= q^e` for `e >= 2`, so the
/// product over degrees above `E` is within `2 q^-E / (q - 1)` of one.
pub fn smooth_probability(family: SmoothFamily, q: u64, eps: f64) -> Result<CertifiedValue> {
    check_q(q)?;
    if family.n == 0 {
        return Err(Error::InvalidParameter("fiber degree n must be at least 1".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {eps}")));
    }
    let qf = q as f64;
    let tail = |e: u32| TAIL_C * qf.powi(-(e as i32)) / (qf - 1.0);
    let mut big_e = 1u32;
    while tail(big_e) + ROUNDING > eps {
        big_e += 1;
        if big_e > 120 {
            return Err(Error::cap(format!("truncation degree for eps = {eps}"), 120));
        }
    }
    let coeffs = local_factor_polynomial(family.n);
    let mut log = 0.0f64;
    for e in 1..=big_e {
        let count = closed_point_count(SpaceKind::ProjLine, q, e)?;
        let u = qf.powi(-(e as i32));
        // 1 - factor, summed from the smallest term for accuracy
        let deficit: f64 = coeffs.iter().enumerate().skip(1).rev().map(|(i, &c)| -(c as f64) * u.powi(i as i32)).sum();
        log += count as f64 * (-deficit).ln_1p();
    }
    let exact = match family.n {
        1 => Some(zeta_inverse(SpaceKind::ProjLine, q, 2)?),
        2 => None,
        _ => {
            debug_assert!(product_identity_holds());
            Some(zeta_inverse(SpaceKind::ProjLine, q, 2)? * zeta_inverse(SpaceKind::ProjLine, q, 3)?)
        }
    };
    Ok(CertifiedValue { value: log.exp(), tail_bound: tail(big_e) + ROUNDING, truncation: big_e, exact })
}

/// A probability mass function on `0..support.len()` with exact weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    weights: Vec<BigRational>,
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    support: Vec<usize>,
    weights: Vec<String>,
}

impl Distribution {
    /// Weights must be non-negative and sum to exactly one.
    pub fn new(weights: Vec<BigRational>) -> Result<Self> {
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidParameter("negative probability".into()));
        }
        let total: BigRational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidParameter(format!("weights sum to {}", ratio_string(&total))));
        }
        let mut d = Distribution { weights };
        d.trim();
        Ok(d)
    }

    /// Normalizes non-negative integer counts.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidParameter("no mass to normalize".into()));
        }
        Self::new(counts.iter().map(|&c| BigRational::new(big(c), big(total))).collect())
    }

    pub fn point_mass(k: usize) -> Self {
        let mut weights = vec![BigRational::zero(); k + 1];
        weights[k] = BigRational::one();
        Distribution { weights }
    }

    fn trim(&mut self) {
        while self.weights.len() > 1 && self.weights.last().is_some_and(|w| w.is_zero()) {
            self.weights.pop();
        }
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn pmf(&self, k: usize) -> BigRational {
        self.weights.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Largest value with positive probability.
    pub fn max_value(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn mean(&self) -> BigRational {
        self.weights.iter().enumerate().map(|(k, w)| w * BigInt::from(k)).sum()
    }

    /// Law of the sum of independent draws.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut weights = vec![BigRational::zero(); self.weights.len() + other.weights.len() - 1];
        for (i, a) in self.weights.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.weights.iter().enumerate() {
                weights[i + j] += a * b;
            }
        }
        let mut d = Distribution { weights };
        d.trim();
        d
    }

    /// Law of the sum of `m` independent copies.
    pub fn power(&self, m: u64) -> Self {
        let mut acc = Self::point_mass(0);
        let mut base = self.clone();
        let mut m = m;
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.convolve(&base);
            }
            m >>= 1;
            if m > 0 {
                base = base.convolve(&base);
            }
        }
        acc
    }

    /// `(1/2) sum |p_k - q_k|`.
    pub fn total_variation(&self, other: &Self) -> BigRational {
        let n = self.weights.len().max(other.weights.len());
        let sum: BigRational = (0..n).map(|k| (self.pmf(k) - other.pmf(k)).abs()).sum();
        sum / BigInt::from(2)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(DistributionJson {
            support: (0..self.weights.len()).collect(),
            weights: self.weights.iter().map(ratio_string).collect(),
        })
        .expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: DistributionJson = serde_json::from_value(v.clone()).map_err(|e| Error::Malformed(e.to_string()))?;
        if raw.support.len() != raw.weights.len() {
            return Err(Error::Malformed("support and weights differ in length".into()));
        }
        let n = raw.support.iter().max().map_or(0, |m| m + 1);
        let mut weights = vec![BigRational::zero(); n];
        for (k, w) in raw.support.iter().zip(&raw.weights) {
            weights[*k] += parse_ratio(w)?;
        }
        Self::new(weights)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// Points of a smooth curve at a closed point of the surface where the
/// linear system is very ample: `1` with probability `(q^2-1)/(q^3-1)`.
pub fn x_variable(q: u64) -> Distribution {
    let q = q as i64;
    let den = q * q * q - 1;
    Distribution::new(vec![ratio(q * q * q - q * q, den), ratio(q * q - 1, den)]).expect("sums to one")
}

/// Points of a smooth bidegree `(2, d)` curve on a rational fiber.
pub fn y_variable(q: u64) -> Distribution {
    let q = q as i64;
    let den = 2 * q * q * q + 2 * q * q - 2;
    Distribution::new(vec![ratio(q * q * q - q * q, den), ratio(2 * q * q - 2, den), ratio(q * q * q + q * q, den)])
        .expect("sums to one")
}

/// Points of a smooth bidegree `(3, d)` curve on a rational fiber.
pub fn z_variable(q: u64) -> Distribution {
    let q = q as i64;
    let den = 6 * q * q + 6 * q + 6;
    Distribution::new(vec![ratio(2 * q * q, den), ratio(3 * q * q + 6, den), ratio(6 * q, den), ratio(q * q, den)])
        .expect("sums to one")
}

/// Families with a known limiting law for `#C(F_q)` among smooth curves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointFamily {
    /// Both bidegree entries growing.
    Ample,
    /// `(2, d)`.
    TwoD,
    /// `(3, d)`.
    ThreeD,
    /// `(d, 2)`, only on `F_a` with `a >= 1`.
    DTwo,
    /// `(d, 3)`, only on `F_a` with `a >= 1`.
    DThree,
}

impl PointFamily {
    pub const ALL: [PointFamily; 5] = [PointFamily::Ample, PointFamily::TwoD, PointFamily::ThreeD, PointFamily::DTwo, PointFamily::DThree];
}

/// Limiting distribution of the number of `F_q`-points on a smooth curve
/// of the family on `F_a`.
pub fn point_count_distribution(family: PointFamily, a: u32, q: u64) -> Result<Distribution> {
    check_q(q)?;
    Ok(match family {
        PointFamily::Ample => x_variable(q).power((q + 1) * (q + 1)),
        PointFamily::TwoD => y_variable(q).power(q + 1),
        PointFamily::ThreeD => z_variable(q).power(q + 1),
        PointFamily::DTwo | PointFamily::DThree if a == 0 => {
            return Err(Error::InvalidParameter(format!("family {family:?} needs a >= 1")));
        }
        PointFamily::DTwo => y_variable(q).convolve(&x_variable(q).power(q * q + q)),
        PointFamily::DThree => z_variable(q).convolve(&x_variable(q).power(q * q + q)),
    })
}

/// Law of the number of `P^1(F_q)`-roots of `F1` over good pairs of forms
/// of degree `n` over `F_q`, by enumeration.
pub fn fiber_point_pmf_bruteforce(q: u64, n: u32) -> Result<Distribution> {
    let (k, forms) = pair_space(q, 1, n)?;
    let tally = (0..forms)
        .into_par_iter()
        .map(|i| {
            let f1 = form_at(&k, n, i);
            let good = (0..forms).filter(|&j| is_good_pair_forms(&k, &f1, &form_at(&k, n, j))).count() as u64;
            let mut m = BTreeMap::new();
            if good > 0 {
                m.insert(projective_root_count(&k, &f1) as usize, good);
            }
            m
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (key, v) in b {
                *a.entry(key).or_insert(0) += v;
            }
            a
        });
    let len = tally.keys().max().map_or(1, |m| m + 1);
    let mut counts = vec![0u64; len];
    for (key, v) in tally {
        counts[key] = v;
    }
    Distribution::from_counts(&counts)
}

/// `max(b(m + 1) - 1, bp + 1)`: the fiber degree past which the general
/// semiample theorem applies. On Hirzebruch surfaces `n0 = 1` already
/// suffices.
pub fn n0_bound(m: u32, b: u32, p: u64) -> i64 {
    let (m, b, p) = (m as i64, b as i64, p as i64);
    (b * (m + 1) - 1).max(b * p + 1)
}

/// All forms of degree `n` over `k`, in index order.
pub fn forms_of_degree(k: &FieldCtx, n: u32) -> impl Iterator<Item = BinaryForm<Fe>> + '_ {
    let count = (k.q() as u64).pow(n + 1);
    (0..count).map(move |i| form_at(k, n, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        assert_eq!(good_pair_count(2, 1, 3).unwrap(), big(168));
        assert_eq!(good_pair_count(2, 1, 1).unwrap(), big(12));
        assert_eq!(good_pair_count(2, 1, 2).unwrap(), big(44));
        assert_eq!(local_smooth_factor(2, 1, 3).unwrap(), ratio(21, 32));
        assert_eq!(local_smooth_factor(2, 2, 2).unwrap(), ratio(256 - 16 - 4 + 1, 256));
        assert!(good_pair_count(2, 1, 0).is_err());
    }

    #[test]
    fn brute_force_small() {
        assert_eq!(good_pair_count_bruteforce(2, 1, 1).unwrap(), big(12));
        assert_eq!(good_pair_count_bruteforce(2, 1, 2).unwrap(), big(44));
        assert_eq!(good_pair_count_bruteforce(3, 1, 1).unwrap(), big(72));
        assert!(good_pair_count_bruteforce(3, 2, 4).unwrap_err().is_cap());
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta_inverse(SpaceKind::ProductOfLines, 2, 3).unwrap(), ratio(63, 256));
        assert_eq!(zeta_inverse(SpaceKind::ProjLine, 2, 3).unwrap(), ratio(21, 32));
        assert_eq!(zeta_inverse(SpaceKind::ProjLine, 5, 2).unwrap(), ratio(24, 25) * ratio(4, 5));
        assert!(zeta_inverse(SpaceKind::ProjPlane, 2, 2).is_err());
        assert!(product_identity_holds());
    }

    #[test]
    fn products() {
        let fam = |n| SmoothFamily { a: 0, n };
        let v = smooth_probability(fam(3), 2, 1e-9).unwrap();
        assert_eq!(v.exact, Some(ratio(63, 256)));
        assert!((v.value - 63.0 / 256.0).abs() <= v.tail_bound);
        let v = smooth_probability(fam(1), 2, 1e-9).unwrap();
        assert_eq!(v.exact, Some(ratio(3, 8)));
        assert!((v.value - 0.375).abs() <= v.tail_bound);
        let v = smooth_probability(fam(2), 2, 1e-9).unwrap();
        assert!(v.exact.is_none() && v.tail_bound <= 1e-9);
        assert!((v.value - 0.2839863).abs() < 1e-7 + v.tail_bound, "{v}");
    }

    #[test]
    fn distributions() {
        assert_eq!(y_variable(2).weights(), &[ratio(2, 11), ratio(3, 11), ratio(6, 11)]);
        assert_eq!(point_count_distribution(PointFamily::TwoD, 0, 2).unwrap().mean(), ratio(45, 11));
        assert_eq!(point_count_distribution(PointFamily::ThreeD, 0, 2).unwrap().mean(), ratio(27, 7));
        assert_eq!(point_count_distribution(PointFamily::DTwo, 1, 2).unwrap().mean(), ratio(303, 77));
        assert!(point_count_distribution(PointFamily::DThree, 0, 2).is_err());
        let d = x_variable(3).power(16);
        assert_eq!(d.weights().iter().sum::<BigRational>(), BigRational::one());
        assert_eq!(Distribution::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn fiber_pmf() {
        assert_eq!(fiber_point_pmf_bruteforce(2, 2).unwrap(), y_variable(2));
        assert_eq!(fiber_point_pmf_bruteforce(2, 3).unwrap().weights(), &[ratio(4, 21), ratio(3, 7), ratio(2, 7), ratio(2, 21)]);
        assert_eq!(fiber_point_pmf_bruteforce(3, 1).unwrap(), Distribution::point_mass(1));
    }

    #[test]
    fn n0_examples() {
        assert_eq!(n0_bound(2, 1, 2), 3);
        assert_eq!(n0_bound(2, 1, 5), 6);
        assert_eq!(n0_bound(4, 0, 7), 1);
    }
}
