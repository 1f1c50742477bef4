//! Dense univariate polynomials over any [`Field`], plus binary forms and
//! bivariate polynomials built on top of them.
//!
//! Coefficients are stored constant term first and trimmed, so the zero
//! polynomial has no coefficients and `degree()` is `None`.

mod binary;
mod bivariate;
mod factor;

pub use binary::BinaryForm;
pub use bivariate::BiPoly;
pub use factor::{
    distinct_degree_factorization, factor, factor_seeded, irreducible_count, is_irreducible,
    roots, squarefree_decomposition,
};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::Fe;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UniPoly<E> {
    c: Vec<E>,
}

impl UniPoly<Fe> {
    /// Builds a polynomial over a [`FieldCtx`](crate::gf::FieldCtx) from
    /// canonical coefficients, constant term first.
    pub fn new(mut c: Vec<Fe>) -> Self {
        while c.last() == Some(&Fe(0)) {
            c.pop();
        }
        UniPoly { c }
    }

    /// Shorthand for tests and examples: coefficients given as integers.
    pub fn from_u32(c: &[u32]) -> Self {
        Self::new(c.iter().map(|&x| Fe(x)).collect())
    }
}

impl<E: Clone + PartialEq> UniPoly<E> {
    pub fn zero() -> Self {
        UniPoly { c: Vec::new() }
    }

    pub fn from_coeffs<F: Field<Elem = E>>(k: &F, mut c: Vec<E>) -> Self {
        while c.last().is_some_and(|x| k.is_zero(x)) {
            c.pop();
        }
        UniPoly { c }
    }

    pub fn constant<F: Field<Elem = E>>(k: &F, a: E) -> Self {
        Self::from_coeffs(k, vec![a])
    }

    pub fn one<F: Field<Elem = E>>(k: &F) -> Self {
        Self::constant(k, k.one())
    }

    /// The polynomial `x`.
    pub fn x<F: Field<Elem = E>>(k: &F) -> Self {
        Self::monomial(k, k.one(), 1)
    }

    /// `a x^n`.
    pub fn monomial<F: Field<Elem = E>>(k: &F, a: E, n: usize) -> Self {
        let mut c = vec![k.zero(); n + 1];
        c[n] = a;
        Self::from_coeffs(k, c)
    }

    pub fn coeffs(&self) -> &[E] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<E> {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to `-1`.
    pub fn deg(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn lead(&self) -> Option<&E> {
        self.c.last()
    }

    pub fn coeff<F: Field<Elem = E>>(&self, k: &F, i: usize) -> E {
        self.c.get(i).cloned().unwrap_or_else(|| k.zero())
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn is_one<F: Field<Elem = E>>(&self, k: &F) -> bool {
        self.c.len() == 1 && self.c[0] == k.one()
    }

    pub fn is_monic<F: Field<Elem = E>>(&self, k: &F) -> bool {
        self.lead() == Some(&k.one())
    }

    pub fn add<F: Field<Elem = E>>(&self, o: &Self, k: &F) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| match (self.c.get(i), o.c.get(i)) {
                (Some(a), Some(b)) => k.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::from_coeffs(k, c)
    }

    pub fn neg<F: Field<Elem = E>>(&self, k: &F) -> Self {
        UniPoly { c: self.c.iter().map(|a| k.neg(a)).collect() }
    }

    pub fn sub<F: Field<Elem = E>>(&self, o: &Self, k: &F) -> Self {
        self.add(&o.neg(k), k)
    }

    pub fn scale<F: Field<Elem = E>>(&self, a: &E, k: &F) -> Self {
        Self::from_coeffs(k, self.c.iter().map(|x| k.mul(x, a)).collect())
    }

    /// Multiplication by `x^n`.
    pub fn shift<F: Field<Elem = E>>(&self, n: usize, k: &F) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![k.zero(); n];
        c.extend(self.c.iter().cloned());
        UniPoly { c }
    }

    pub fn mul<F: Field<Elem = E>>(&self, o: &Self, k: &F) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(k, k.poly_mul(&self.c, &o.c))
    }

    /// Quotient and remainder. Panics if `d` is zero.
    pub fn divrem<F: Field<Elem = E>>(&self, d: &Self, k: &F) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![k.zero(); r.len() - dd];
        k.poly_divrem(&mut r, &d.c, &mut q);
        r.truncate(dd);
        (Self::from_coeffs(k, q), Self::from_coeffs(k, r))
    }

    pub fn rem<F: Field<Elem = E>>(&self, d: &Self, k: &F) -> Self {
        self.divrem(d, k).1
    }

    /// Exact quotient; `None` if `d` does not divide `self`.
    pub fn div_exact<F: Field<Elem = E>>(&self, d: &Self, k: &F) -> Option<Self> {
        let (q, r) = self.divrem(d, k);
        r.is_zero().then_some(q)
    }

    pub fn divides<F: Field<Elem = E>>(&self, other: &Self, k: &F) -> bool {
        other.rem(self, k).is_zero()
    }

    /// Scales to leading coefficient one (zero stays zero).
    pub fn monic<F: Field<Elem = E>>(&self, k: &F) -> Self {
        match self.lead() {
            None => Self::zero(),
            Some(l) => {
                let inv = k.inv(l).unwrap();
                self.scale(&inv, k)
            }
        }
    }

    /// Monic gcd, with `gcd(0, f) = monic(f)` and `gcd(0, 0) = 0`.
    pub fn gcd<F: Field<Elem = E>>(&self, o: &Self, k: &F) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, k);
            a = b;
            b = r;
        }
        a.monic(k)
    }

    /// `(g, s, t)` with `g = s self + t o` and `g` monic.
    pub fn ext_gcd<F: Field<Elem = E>>(&self, o: &Self, k: &F) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(k), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one(k));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1, k);
            let s2 = s0.sub(&q.mul(&s1, k), k);
            let t2 = t0.sub(&q.mul(&t1, k), k);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.lead() {
            None => (r0, s0, t0),
            Some(l) => {
                let inv = k.inv(l).unwrap();
                (r0.scale(&inv, k), s0.scale(&inv, k), t0.scale(&inv, k))
            }
        }
    }

    pub fn derivative<F: Field<Elem = E>>(&self, k: &F) -> Self {
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, a)| k.mul(a, &k.from_int(i as u64)))
            .collect();
        Self::from_coeffs(k, c)
    }

    pub fn eval<F: Field<Elem = E>>(&self, x: &E, k: &F) -> E {
        self.c.iter().rev().fold(k.zero(), |acc, a| k.add(&k.mul(&acc, x), a))
    }

    /// Evaluates at an element of a bigger field through `embed`.
    pub fn eval_in<G: Field>(&self, x: &G::Elem, big: &G, embed: impl Fn(&E) -> G::Elem) -> G::Elem {
        self.c.iter().rev().fold(big.zero(), |acc, a| big.add(&big.mul(&acc, x), &embed(a)))
    }

    /// `self^e mod m`.
    pub fn pow_mod<F: Field<Elem = E>>(&self, mut e: u128, m: &Self, k: &F) -> Self {
        let mut base = self.rem(m, k);
        let mut acc = Self::one(k).rem(m, k);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, k).rem(m, k);
            }
            base = base.mul(&base, k).rem(m, k);
            e >>= 1;
        }
        acc
    }

    pub fn pow<F: Field<Elem = E>>(&self, mut e: u32, k: &F) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(k);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, k);
            }
            base = base.mul(&base, k);
            e >>= 1;
        }
        acc
    }

    /// `self(g(x))`.
    pub fn compose<F: Field<Elem = E>>(&self, g: &Self, k: &F) -> Self {
        self.c
            .iter()
            .rev()
            .fold(Self::zero(), |acc, a| acc.mul(g, k).add(&Self::constant(k, a.clone()), k))
    }

    /// Coefficients mapped through `f` into another field.
    pub fn map<G: Field>(&self, big: &G, f: impl Fn(&E) -> G::Elem) -> UniPoly<G::Elem> {
        UniPoly::from_coeffs(big, self.c.iter().map(f).collect())
    }
}

/// Sylvester resultant of `f` and `g`, computed by the Euclidean recurrence
/// `res(f, g) = (-1)^{mn} lc(g)^{m - deg r} res(g, r)` with `r = f mod g`.
///
/// Degrees are the actual degrees. Conventions: `res(c, g) = c^{deg g}` for a
/// nonzero constant `c`, and `res(f, 0) = 0` whenever `deg f >= 1`. Two zero
/// inputs are an error.
pub fn resultant<F: Field>(f: &UniPoly<F::Elem>, g: &UniPoly<F::Elem>, k: &F) -> Result<F::Elem> {
    if f.is_zero() && g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.is_zero() {
        return resultant(g, f, k);
    }
    let (mut a, mut b) = (f.clone(), g.clone());
    let mut acc = k.one();
    loop {
        let m = a.degree().unwrap();
        let Some(n) = b.degree() else {
            return Ok(if m == 0 { acc } else { k.zero() });
        };
        if n == 0 {
            return Ok(k.mul(&acc, &k.pow(b.lead().unwrap(), m as u128)));
        }
        if m == 0 {
            return Ok(k.mul(&acc, &k.pow(a.lead().unwrap(), n as u128)));
        }
        let r = a.rem(&b, k);
        if r.is_zero() {
            return Ok(k.zero());
        }
        if (m * n) % 2 == 1 {
            acc = k.neg(&acc);
        }
        let drop = m - r.degree().unwrap();
        acc = k.mul(&acc, &k.pow(b.lead().unwrap(), drop as u128));
        a = b;
        b = r;
    }
}
