//! Factorization over finite fields: squarefree decomposition, distinct
//! degree factorization, and Cantor-Zassenhaus equal degree splitting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::UniPoly;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{self, Fe, FieldCtx};

fn order<F: Field>(k: &F) -> u128 {
    k.order().expect("field order must fit in u128")
}

/// `x^(q^n) mod f` for `n = 1..=count`, i.e. the iterated Frobenius images.
fn frobenius_powers<F: Field>(f: &UniPoly<F::Elem>, count: usize, k: &F) -> Vec<UniPoly<F::Elem>> {
    let q = order(k);
    let mut out = Vec::with_capacity(count);
    let mut h = UniPoly::x(k).rem(f, k);
    for _ in 0..count {
        h = h.pow_mod(q, f, k);
        out.push(h.clone());
    }
    out
}

fn prime_divisors(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut m = n;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Rabin's test. Constants (including zero) are not irreducible.
pub fn is_irreducible<F: Field>(f: &UniPoly<F::Elem>, k: &F) -> bool {
    let Some(n) = f.degree() else { return false };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let f = f.monic(k);
    let powers = frobenius_powers(&f, n, k);
    let x = UniPoly::x(k);
    if powers[n - 1] != x.rem(&f, k) {
        return false;
    }
    prime_divisors(n).into_iter().all(|r| {
        let h = powers[n / r - 1].sub(&x, k);
        h.gcd(&f, k).is_one(k)
    })
}

/// p-th root of a polynomial whose derivative vanishes.
fn pth_root<F: Field>(f: &UniPoly<F::Elem>, k: &F) -> UniPoly<F::Elem> {
    let p = k.characteristic() as usize;
    // a -> a^(q/p) inverts Frobenius on F_q
    let e = order(k) / p as u128;
    let c = f.coeffs().iter().step_by(p).map(|a| k.pow(a, e)).collect();
    UniPoly::from_coeffs(k, c)
}

/// Squarefree decomposition of a nonzero polynomial: pairs `(g, m)` with
/// `g` monic squarefree of positive degree, pairwise coprime, and
/// `f = lc(f) prod g^m`.
pub fn squarefree_decomposition<F: Field>(f: &UniPoly<F::Elem>, k: &F) -> Vec<(UniPoly<F::Elem>, u32)> {
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    sqf_rec(&f.monic(k), 1, k, &mut out);
    out
}

fn sqf_rec<F: Field>(f: &UniPoly<F::Elem>, mult: u32, k: &F, out: &mut Vec<(UniPoly<F::Elem>, u32)>) {
    let p = k.characteristic();
    let d = f.derivative(k);
    if d.is_zero() {
        sqf_rec(&pth_root(f, k), mult * p, k, out);
        return;
    }
    let mut c = f.gcd(&d, k);
    let mut w = f.div_exact(&c, k).unwrap();
    let mut i = 1;
    while !w.is_one(k) {
        let y = w.gcd(&c, k);
        let fac = w.div_exact(&y, k).unwrap();
        if !fac.is_constant() {
            out.push((fac, mult * i));
        }
        i += 1;
        c = c.div_exact(&y, k).unwrap();
        w = y;
    }
    if !c.is_one(k) {
        sqf_rec(&pth_root(&c, k), mult * p, k, out);
    }
}

/// Distinct degree factorization of a monic squarefree polynomial: pairs
/// `(g, d)` where `g` is the product of all irreducible factors of degree `d`.
pub fn distinct_degree_factorization<F: Field>(f: &UniPoly<F::Elem>, k: &F) -> Vec<(UniPoly<F::Elem>, usize)> {
    let q = order(k);
    let x = UniPoly::x(k);
    let mut out = Vec::new();
    let mut f = f.monic(k);
    let mut h = x.rem(&f, k);
    let mut d = 1;
    while f.deg() >= 2 * d as i64 {
        h = h.pow_mod(q, &f, k);
        let g = h.sub(&x, k).gcd(&f, k);
        if !g.is_one(k) {
            f = f.div_exact(&g, k).unwrap();
            h = h.rem(&f, k);
            out.push((g, d));
        }
        d += 1;
    }
    if f.deg() > 0 {
        let n = f.deg() as usize;
        out.push((f, n));
    }
    out
}

fn random_poly<F: Field>(deg_bound: usize, k: &F, rng: &mut ChaCha8Rng) -> UniPoly<F::Elem> {
    let q = order(k);
    let c = (0..deg_bound).map(|_| k.element(rng.gen_range(0..q))).collect();
    UniPoly::from_coeffs(k, c)
}

/// Splits a monic squarefree `f` whose irreducible factors all have degree
/// `d` into those factors.
fn equal_degree<F: Field>(f: &UniPoly<F::Elem>, d: usize, k: &F, rng: &mut ChaCha8Rng, out: &mut Vec<UniPoly<F::Elem>>) {
    let n = f.degree().unwrap();
    if n == d {
        out.push(f.clone());
        return;
    }
    let q = order(k);
    let p = k.characteristic();
    loop {
        let a = random_poly(n, k, rng);
        if a.is_constant() {
            continue;
        }
        let b = if p == 2 {
            // absolute trace to F_2: a + a^2 + ... + a^(2^(k d - 1))
            let steps = k.prime_degree() as usize * d;
            let mut t = a.rem(f, k);
            let mut acc = t.clone();
            for _ in 1..steps {
                t = t.mul(&t, k).rem(f, k);
                acc = acc.add(&t, k);
            }
            acc
        } else {
            // a^((q^d - 1)/2) = (a^(1 + q + ... + q^(d-1)))^((q - 1)/2)
            let mut t = a.rem(f, k);
            let mut norm = t.clone();
            for _ in 1..d {
                t = t.pow_mod(q, f, k);
                norm = norm.mul(&t, k).rem(f, k);
            }
            norm.pow_mod((q - 1) / 2, f, k).sub(&UniPoly::one(k), k)
        };
        let g = b.gcd(f, k);
        if !g.is_constant() && g.deg() < f.deg() {
            let h = f.div_exact(&g, k).unwrap();
            equal_degree(&g, d, k, rng, out);
            equal_degree(&h, d, k, rng, out);
            return;
        }
    }
}

/// Complete factorization into monic irreducibles with multiplicities,
/// sorted by `(degree, coefficients)`. The randomized splitting step draws
/// from a ChaCha stream keyed by `seed`; the output does not depend on it.
pub fn factor_seeded<F: Field>(f: &UniPoly<F::Elem>, k: &F, seed: u64) -> Result<Vec<(UniPoly<F::Elem>, u32)>>
where
    F::Elem: Ord,
{
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (g, m) in squarefree_decomposition(f, k) {
        for (h, d) in distinct_degree_factorization(&g, k) {
            let mut pieces = Vec::new();
            equal_degree(&h, d, k, &mut rng, &mut pieces);
            out.extend(pieces.into_iter().map(|pc| (pc, m)));
        }
    }
    out.sort_by(|a, b| (a.0.deg(), a.0.coeffs().iter().rev().collect::<Vec<_>>(), a.1)
        .cmp(&(b.0.deg(), b.0.coeffs().iter().rev().collect::<Vec<_>>(), b.1)));
    Ok(out)
}

pub fn factor<F: Field>(f: &UniPoly<F::Elem>, k: &F) -> Result<Vec<(UniPoly<F::Elem>, u32)>>
where
    F::Elem: Ord,
{
    factor_seeded(f, k, 0)
}

/// Distinct roots of a nonzero polynomial over `F_q`, sorted.
pub fn roots(f: &UniPoly<Fe>, k: &FieldCtx) -> Vec<Fe> {
    assert!(!f.is_zero(), "the zero polynomial has every element as a root");
    if f.is_constant() {
        return Vec::new();
    }
    let f = f.monic(k);
    let x = UniPoly::x(k);
    let split = x.pow_mod(k.q() as u128, &f, k).sub(&x, k).gcd(&f, k);
    if split.is_constant() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut linear = Vec::new();
    equal_degree(&split, 1, k, &mut rng, &mut linear);
    let mut out: Vec<Fe> = linear.iter().map(|l| k.neg(&l.coeffs()[0])).collect();
    out.sort();
    out
}

/// Number of monic irreducible polynomials of degree `e` over `F_q`:
/// `(1/e) sum_{d | e} mu(e/d) q^d`.
pub fn irreducible_count(q: u64, e: u32) -> Result<u128> {
    if gf::prime_power(q).is_none() {
        return Err(Error::InvalidParameter(format!("{q} is not a prime power")));
    }
    if e == 0 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    let overflow = || Error::cap(format!("{q}^{e}"), "i128");
    let mut total: i128 = 0;
    for d in gf::divisors(e as u64) {
        let mu = gf::mobius(e as u64 / d) as i128;
        if mu == 0 {
            continue;
        }
        let term = (q as i128).checked_pow(d as u32).ok_or_else(overflow)?;
        total = total.checked_add(mu * term).ok_or_else(overflow)?;
    }
    Ok((total / e as i128) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_new;

    fn p(c: &[u32]) -> UniPoly<Fe> {
        UniPoly::from_u32(c)
    }

    #[test]
    fn factor_examples() {
        let k = field_new(2, 1).unwrap();
        assert_eq!(factor(&p(&[0, 1, 1]), &k).unwrap(), vec![(p(&[0, 1]), 1), (p(&[1, 1]), 1)]);
        assert_eq!(factor(&p(&[1, 1, 1]), &k).unwrap(), vec![(p(&[1, 1, 1]), 1)]);
        assert_eq!(
            factor(&p(&[0, 1, 0, 0, 1]), &k).unwrap(),
            vec![(p(&[0, 1]), 1), (p(&[1, 1]), 1), (p(&[1, 1, 1]), 1)]
        );
        assert_eq!(factor(&UniPoly::zero(), &k), Err(Error::ZeroPolynomial));
        // (x+1)^4 x^2 in characteristic 2
        let f = p(&[1, 1]).pow(4, &k).mul(&p(&[0, 0, 1]), &k);
        assert_eq!(factor(&f, &k).unwrap(), vec![(p(&[0, 1]), 2), (p(&[1, 1]), 4)]);
    }

    #[test]
    fn irreducible_counts() {
        assert_eq!(irreducible_count(2, 2).unwrap(), 1);
        assert_eq!(irreducible_count(2, 3).unwrap(), 2);
        assert_eq!(irreducible_count(3, 1).unwrap(), 3);
        assert!(irreducible_count(6, 1).is_err());
    }

    #[test]
    fn irreducible_count_matches_enumeration() {
        for (pp, kk, e) in [(2, 1, 4), (3, 1, 3), (2, 2, 2), (5, 1, 2)] {
            let k = field_new(pp, kk).unwrap();
            let q = k.q() as u64;
            let mut count = 0;
            for idx in 0..q.pow(e) {
                let mut c: Vec<Fe> = (0..e).map(|i| Fe(((idx / q.pow(i)) % q) as u32)).collect();
                c.push(Fe(1));
                if is_irreducible(&UniPoly::new(c), &k) {
                    count += 1;
                }
            }
            assert_eq!(count, irreducible_count(q, e).unwrap());
        }
    }

    #[test]
    fn roots_over_extension() {
        let k = field_new(2, 2).unwrap();
        // x^2 + x + 1 splits over F_4 as its two primitive elements
        assert_eq!(roots(&p(&[1, 1, 1]), &k), vec![Fe(2), Fe(3)]);
        let k3 = field_new(3, 1).unwrap();
        assert!(roots(&p(&[1, 0, 1]), &k3).is_empty());
    }

    #[test]
    fn large_field_factor() {
        let k = field_new(2, 20).unwrap();
        let a = p(&[5, 1]);
        let b = p(&[77, 3, 1]);
        let f = a.mul(&b, &k).mul(&a, &k);
        let fac = factor(&f, &k).unwrap();
        let back = fac.iter().fold(UniPoly::one(&k), |acc, (g, m)| acc.mul(&g.pow(*m, &k), &k));
        assert_eq!(back, f.monic(&k));
    }
}
