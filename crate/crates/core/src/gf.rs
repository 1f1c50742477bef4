//! Finite fields `F_{p^k}` with exact arithmetic, their extensions, and
//! closed-point counts of the ambient spaces.
//!
//! Elements are stored as integers in `[0, p^k)` whose base-`p` digits are
//! the coordinates in the polynomial basis `1, x, ..., x^{k-1}` of
//! `F_p[x]/(m(x))`. The defining polynomial `m` is the least monic
//! irreducible polynomial of degree `k`, ordered by the integer encoding of
//! its lower coefficients (constant term least significant), so every field
//! has the same representation on every run and machine.
//!
//! Arithmetic backends:
//!
//! * `k = 1`: reduction modulo `p`.
//! * order at most `2^16`: exponent/logarithm tables (plus a Zech table for
//!   addition when `p` is odd).
//! * larger binary fields: carry-less multiplication.
//! * larger odd fields: schoolbook multiplication on digit vectors.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{self, UniPoly};

/// Largest supported field order.
pub const MAX_FIELD_ORDER: u64 = 1 << 31;
/// Largest order that gets lookup tables.
pub const TABLE_LIMIT: u32 = 1 << 16;

/// A field element in canonical (digit-encoded) form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fe(pub u32);

const NO_ZECH: u32 = u32::MAX;

enum Arith {
    Prime,
    Tables {
        exp: Vec<u32>,
        log: Vec<u32>,
        /// `zech[i] = log(1 + g^i)`; empty for binary fields.
        zech: Vec<u32>,
    },
    Binary,
    Digits,
}

struct Inner {
    p: u32,
    k: u32,
    order: u32,
    /// Monic modulus over `F_p`, constant term first, length `k + 1`.
    modulus: Vec<u32>,
    /// Modulus as a bit mask (binary fields only).
    modulus_bits: u64,
    arith: Arith,
}

/// An explicit finite field. Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct FieldCtx(Arc<Inner>);

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{}; modulus {:?})", self.0.p, self.0.k, self.0.modulus)
        }
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}
impl Eq for FieldCtx {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(p, k)` with `q = p^k`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut k = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p as u32, k))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Builds `F_{p^k}` with the least monic irreducible modulus.
pub fn field_new(p: u64, k: u32) -> Result<FieldCtx> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("field degree must be at least 1".into()));
    }
    let order = (p as u128).checked_pow(k).filter(|&n| n <= MAX_FIELD_ORDER as u128);
    if order.is_none() {
        return Err(Error::cap(format!("field order {p}^{k}"), MAX_FIELD_ORDER));
    }
    let p = p as u32;
    if k == 1 {
        return Ok(FieldCtx::prime_unchecked(p));
    }
    let prime = FieldCtx::prime_unchecked(p);
    let lower = (p as u64).pow(k);
    for idx in 0..lower {
        let mut coeffs = digits(idx, p, k as usize);
        if coeffs[0] == 0 {
            continue;
        }
        coeffs.push(1);
        let f = UniPoly::new(coeffs.iter().map(|&c| Fe(c)).collect());
        if poly::is_irreducible(&f, &prime) {
            return Ok(FieldCtx::build(p, coeffs));
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn digits(mut n: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for d in out.iter_mut() {
        *d = (n % p as u64) as u32;
        n /= p as u64;
    }
    out
}

impl FieldCtx {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Self> {
        field_new(p, 1)
    }

    fn prime_unchecked(p: u32) -> Self {
        FieldCtx(Arc::new(Inner {
            p,
            k: 1,
            order: p,
            modulus: vec![0, 1],
            modulus_bits: 0b10,
            arith: Arith::Prime,
        }))
    }

    /// `F_p[x]/(modulus)`; the modulus (constant term first) must be monic
    /// and irreducible over `F_p`.
    pub fn with_modulus(p: u64, modulus: &[u32]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let k = modulus.len().saturating_sub(1) as u32;
        if k == 0 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c as u64 >= p) {
            return Err(Error::Malformed("modulus must be monic with reduced coefficients".into()));
        }
        if (p as u128).pow(k) > MAX_FIELD_ORDER as u128 {
            return Err(Error::cap(format!("field order {p}^{k}"), MAX_FIELD_ORDER));
        }
        let prime = FieldCtx::prime_unchecked(p as u32);
        let f = UniPoly::new(modulus.iter().map(|&c| Fe(c)).collect());
        if !poly::is_irreducible(&f, &prime) {
            return Err(Error::NotIrreducible);
        }
        if k == 1 {
            return Ok(prime);
        }
        Ok(FieldCtx::build(p as u32, modulus.to_vec()))
    }

    fn build(p: u32, modulus: Vec<u32>) -> Self {
        let k = (modulus.len() - 1) as u32;
        let order = p.pow(k);
        let modulus_bits = if p == 2 {
            modulus.iter().enumerate().fold(0u64, |acc, (i, &c)| acc | ((c as u64) << i))
        } else {
            0
        };
        let mut inner = Inner {
            p,
            k,
            order,
            modulus,
            modulus_bits,
            arith: if p == 2 { Arith::Binary } else { Arith::Digits },
        };
        if order <= TABLE_LIMIT {
            inner.arith = build_tables(&inner);
        }
        FieldCtx(Arc::new(inner))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    /// Degree over the prime field.
    pub fn k(&self) -> u32 {
        self.0.k
    }

    /// Number of elements.
    pub fn q(&self) -> u32 {
        self.0.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn has_tables(&self) -> bool {
        matches!(self.0.arith, Arith::Tables { .. })
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.0.order).map(Fe)
    }

    /// Coordinates of `a` over `F_p` (length `k`).
    pub fn coordinates(&self, a: Fe) -> Vec<u32> {
        digits(a.0 as u64, self.0.p, self.0.k as usize)
    }

    pub fn from_coordinates(&self, coords: &[u32]) -> Fe {
        let p = self.0.p as u64;
        Fe(coords.iter().rev().fold(0u64, |acc, &c| acc * p + c as u64) as u32)
    }

    /// The class of `x` in `F_p[x]/(m)` (for `k = 1`, the element `0`).
    pub fn generator(&self) -> Fe {
        if self.0.k == 1 {
            Fe(0)
        } else {
            Fe(self.0.p)
        }
    }

    /// Wraps `a` for operator syntax.
    pub fn elem(&self, a: Fe) -> FieldElem<'_> {
        FieldElem { ctx: self, value: a }
    }

    fn add_digits(&self, a: u32, b: u32) -> u32 {
        let p = self.0.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.0.k {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    fn neg_digits(&self, a: u32) -> u32 {
        let p = self.0.p;
        let mut a = a;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.0.k {
            out += ((p - a % p) % p) * place;
            a /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        mul_slow(&self.0, a, b)
    }
}

fn mul_slow(inner: &Inner, a: u32, b: u32) -> u32 {
    let k = inner.k as usize;
    if inner.p == 2 {
        let mut prod: u64 = 0;
        let (a, mut b) = (a as u64, b as u64);
        let mut shift = 0;
        while b != 0 {
            if b & 1 == 1 {
                prod ^= a << shift;
            }
            b >>= 1;
            shift += 1;
        }
        for bit in (k..2 * k).rev() {
            if prod >> bit & 1 == 1 {
                prod ^= inner.modulus_bits << (bit - k);
            }
        }
        return prod as u32;
    }
    let p = inner.p as u64;
    let da = digits(a as u64, inner.p, k);
    let db = digits(b as u64, inner.p, k);
    let mut prod = vec![0u64; 2 * k - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
        }
    }
    for deg in (k..2 * k - 1).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        for j in 0..k {
            let m = inner.modulus[j] as u64;
            prod[deg - k + j] = (prod[deg - k + j] + (p - c) * m) % p;
        }
        prod[deg] = 0;
    }
    prod[..k].iter().rev().fold(0u64, |acc, &c| acc * p + c) as u32
}

fn build_tables(inner: &Inner) -> Arith {
    let n = inner.order;
    let group = (n - 1) as u64;
    let factors = prime_factors(group);
    let pow = |g: u32, mut e: u64| {
        let mut acc = 1u32;
        let mut base = g;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_slow(inner, acc, base);
            }
            base = mul_slow(inner, base, base);
            e >>= 1;
        }
        acc
    };
    let g = (2..n)
        .find(|&g| factors.iter().all(|&r| pow(g, group / r) != 1))
        .expect("multiplicative group is cyclic");
    let mut exp = vec![0u32; 2 * (n as usize - 1)];
    let mut log = vec![0u32; n as usize];
    let mut x = 1u32;
    for i in 0..(n as usize - 1) {
        exp[i] = x;
        exp[i + n as usize - 1] = x;
        log[x as usize] = i as u32;
        x = mul_slow(inner, x, g);
    }
    let zech = if inner.p == 2 {
        Vec::new()
    } else {
        let ctx_add = |a: u32, b: u32| {
            let p = inner.p;
            let (mut a, mut b) = (a, b);
            let mut out = 0u32;
            let mut place = 1u32;
            for _ in 0..inner.k {
                out += ((a % p + b % p) % p) * place;
                a /= p;
                b /= p;
                place = place.wrapping_mul(p);
            }
            out
        };
        (0..(n as usize - 1))
            .map(|i| {
                let s = ctx_add(exp[i], 1);
                if s == 0 {
                    NO_ZECH
                } else {
                    log[s as usize]
                }
            })
            .collect()
    };
    Arith::Tables { exp, log, zech }
}

impl Field for FieldCtx {
    type Elem = Fe;

    fn zero(&self) -> Fe {
        Fe(0)
    }

    fn one(&self) -> Fe {
        Fe(1)
    }

    #[inline]
    fn add(&self, a: &Fe, b: &Fe) -> Fe {
        let inner = &*self.0;
        if inner.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        match &inner.arith {
            Arith::Prime => {
                let s = a.0 + b.0;
                Fe(if s >= inner.p { s - inner.p } else { s })
            }
            Arith::Tables { exp, log, zech } => {
                if a.0 == 0 {
                    return *b;
                }
                if b.0 == 0 {
                    return *a;
                }
                let m = inner.order - 1;
                let la = log[a.0 as usize];
                let lb = log[b.0 as usize];
                let d = if lb >= la { lb - la } else { lb + m - la };
                let z = zech[d as usize];
                if z == NO_ZECH {
                    Fe(0)
                } else {
                    Fe(exp[(la + z) as usize])
                }
            }
            _ => Fe(self.add_digits(a.0, b.0)),
        }
    }

    #[inline]
    fn neg(&self, a: &Fe) -> Fe {
        let inner = &*self.0;
        if inner.p == 2 || a.0 == 0 {
            return *a;
        }
        match &inner.arith {
            Arith::Prime => Fe(inner.p - a.0),
            _ => Fe(self.neg_digits(a.0)),
        }
    }

    #[inline]
    fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        if self.0.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        if let Arith::Prime = self.0.arith {
            let p = self.0.p;
            return Fe(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + p - b.0 });
        }
        self.add(a, &self.neg(b))
    }

    #[inline]
    fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        let inner = &*self.0;
        match &inner.arith {
            Arith::Prime => Fe(((a.0 as u64 * b.0 as u64) % inner.p as u64) as u32),
            Arith::Tables { exp, log, .. } => {
                if a.0 == 0 || b.0 == 0 {
                    Fe(0)
                } else {
                    Fe(exp[(log[a.0 as usize] + log[b.0 as usize]) as usize])
                }
            }
            _ => Fe(self.mul_slow(a.0, b.0)),
        }
    }

    fn inv(&self, a: &Fe) -> Option<Fe> {
        if a.0 == 0 {
            return None;
        }
        let inner = &*self.0;
        Some(match &inner.arith {
            Arith::Prime => {
                // extended Euclid on (a, p)
                let (mut t, mut new_t) = (0i64, 1i64);
                let (mut r, mut new_r) = (inner.p as i64, a.0 as i64);
                while new_r != 0 {
                    let quo = r / new_r;
                    (t, new_t) = (new_t, t - quo * new_t);
                    (r, new_r) = (new_r, r - quo * new_r);
                }
                Fe(t.rem_euclid(inner.p as i64) as u32)
            }
            Arith::Tables { exp, log, .. } => {
                let m = inner.order - 1;
                let l = log[a.0 as usize];
                Fe(exp[((m - l) % m) as usize])
            }
            _ => self.pow(a, inner.order as u128 - 2),
        })
    }

    fn characteristic(&self) -> u32 {
        self.0.p
    }

    fn prime_degree(&self) -> u32 {
        self.0.k
    }

    fn element(&self, idx: u128) -> Fe {
        Fe((idx % self.0.order as u128) as u32)
    }

    fn order(&self) -> Option<u128> {
        Some(self.0.order as u128)
    }

    fn poly_mul(&self, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
        let inner = &*self.0;
        match &inner.arith {
            Arith::Prime if inner.p == 2 => {
                let mut c = vec![Fe(0); a.len() + b.len() - 1];
                for (i, x) in a.iter().enumerate() {
                    if x.0 != 0 {
                        c[i..i + b.len()].iter_mut().zip(b).for_each(|(z, y)| z.0 ^= y.0);
                    }
                }
                c
            }
            // products stay below 2^32, so sums of fewer than 2^32 fit in u64
            Arith::Prime if inner.p < 1 << 16 => {
                let mut acc = vec![0u64; a.len() + b.len() - 1];
                for (i, x) in a.iter().enumerate() {
                    if x.0 != 0 {
                        let x = x.0 as u64;
                        acc[i..i + b.len()].iter_mut().zip(b).for_each(|(z, y)| *z += x * y.0 as u64);
                    }
                }
                let p = inner.p as u64;
                acc.into_iter().map(|z| Fe((z % p) as u32)).collect()
            }
            Arith::Tables { exp, log, .. } => {
                let lb: Vec<Option<u32>> = b.iter().map(|y| (y.0 != 0).then(|| log[y.0 as usize])).collect();
                let mut c = vec![Fe(0); a.len() + b.len() - 1];
                for (i, x) in a.iter().enumerate() {
                    if x.0 == 0 {
                        continue;
                    }
                    let la = log[x.0 as usize];
                    for (j, l) in lb.iter().enumerate() {
                        if let Some(l) = l {
                            c[i + j] = self.add(&c[i + j], &Fe(exp[(la + l) as usize]));
                        }
                    }
                }
                c
            }
            _ => crate::field::schoolbook_mul(self, a, b),
        }
    }

    fn poly_divrem(&self, r: &mut [Fe], d: &[Fe], q: &mut [Fe]) {
        let inner = &*self.0;
        let dd = d.len() - 1;
        match &inner.arith {
            Arith::Prime if inner.p == 2 => {
                for i in (dd..r.len()).rev() {
                    if r[i].0 != 0 {
                        q[i - dd] = Fe(1);
                        r[i - dd..=i].iter_mut().zip(d).for_each(|(z, y)| z.0 ^= y.0);
                    }
                }
            }
            Arith::Prime if inner.p < 1 << 16 => {
                let p = inner.p as u64;
                let inv = self.inv(&d[dd]).expect("nonzero leading coefficient").0 as u64;
                for i in (dd..r.len()).rev() {
                    if r[i].0 == 0 {
                        continue;
                    }
                    let t = r[i].0 as u64 * inv % p;
                    let neg = p - t;
                    r[i - dd..=i].iter_mut().zip(d).for_each(|(z, y)| z.0 = ((z.0 as u64 + neg * y.0 as u64) % p) as u32);
                    q[i - dd] = Fe(t as u32);
                }
            }
            _ => crate::field::schoolbook_divrem(self, r, d, q),
        }
    }
}

/// A field element paired with its field, for operator syntax.
#[derive(Clone, Copy)]
pub struct FieldElem<'a> {
    ctx: &'a FieldCtx,
    value: Fe,
}

impl fmt::Debug for FieldElem<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value.0)
    }
}

impl PartialEq for FieldElem<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.ctx == other.ctx
    }
}

impl<'a> FieldElem<'a> {
    pub fn value(&self) -> Fe {
        self.value
    }

    pub fn inv(&self) -> Option<Self> {
        self.ctx.inv(&self.value).map(|v| self.ctx.elem(v))
    }

    pub fn pow(&self, e: u128) -> Self {
        self.ctx.elem(self.ctx.pow(&self.value, e))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl<'a> $tr for FieldElem<'a> {
            type Output = FieldElem<'a>;
            fn $m(self, rhs: Self) -> Self::Output {
                self.ctx.elem(self.ctx.$f(&self.value, &rhs.value))
            }
        }
    };
}
binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl<'a> Div for FieldElem<'a> {
    type Output = FieldElem<'a>;
    fn div(self, rhs: Self) -> Self::Output {
        let v = self.ctx.div(&self.value, &rhs.value).expect("division by zero");
        self.ctx.elem(v)
    }
}

impl<'a> Neg for FieldElem<'a> {
    type Output = FieldElem<'a>;
    fn neg(self) -> Self::Output {
        self.ctx.elem(self.ctx.neg(&self.value))
    }
}

/// `F_{q^e}` together with the fixed embedding of `F_q`.
#[derive(Clone, Debug)]
pub struct Extension {
    pub field: FieldCtx,
    pub base: FieldCtx,
    degree: u32,
    /// Image of the base generator; `None` when the embedding is the
    /// identity on digit encodings (prime base or trivial extension).
    generator_image: Option<Fe>,
}

impl Extension {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn embed(&self, a: Fe) -> Fe {
        match self.generator_image {
            None => a,
            Some(g) => {
                let f = &self.field;
                let mut acc = Fe(0);
                for &c in self.base.coordinates(a).iter().rev() {
                    acc = f.add(&f.mul(&acc, &g), &Fe(c));
                }
                acc
            }
        }
    }
}

/// Builds `F_{q^e}` over `ctx = F_q`.
///
/// The big field is `field_new(p, k e)`; for a non-prime base the generator
/// of `F_q` is sent to the least root of its modulus.
pub fn ext_field(ctx: &FieldCtx, e: u32) -> Result<Extension> {
    if e == 0 {
        return Err(Error::InvalidParameter("extension degree must be at least 1".into()));
    }
    if e == 1 {
        return Ok(Extension { field: ctx.clone(), base: ctx.clone(), degree: 1, generator_image: None });
    }
    let big = field_new(ctx.p() as u64, ctx.k() * e)?;
    let generator_image = if ctx.k() == 1 {
        None
    } else {
        let m = UniPoly::new(ctx.modulus().iter().map(|&c| Fe(c)).collect());
        let roots = poly::roots(&m, &big);
        Some(*roots.iter().min().expect("F_q embeds in F_{q^e}"))
    };
    Ok(Extension { field: big, base: ctx.clone(), degree: e, generator_image })
}

/// The ambient spaces whose closed points index local factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceKind {
    ProjLine,
    ProjPlane,
    ProductOfLines,
    Hirzebruch(u32),
}

impl SpaceKind {
    pub fn dimension(&self) -> u32 {
        match self {
            SpaceKind::ProjLine => 1,
            _ => 2,
        }
    }

    /// Multiplicities `m_i` with `#X(F_{q^e}) = sum_i m_i q^{i e}`.
    pub fn point_count_polynomial(&self) -> Vec<u32> {
        match self {
            SpaceKind::ProjLine => vec![1, 1],
            SpaceKind::ProjPlane => vec![1, 1, 1],
            // a P^1-bundle over P^1 has the point count of P^1 x P^1
            SpaceKind::ProductOfLines | SpaceKind::Hirzebruch(_) => vec![1, 2, 1],
        }
    }

    /// `#X(F_{q^e})`, or `None` on overflow.
    pub fn rational_point_count(&self, q: u64, e: u32) -> Option<u128> {
        let qe = (q as u128).checked_pow(e)?;
        let mut acc = 0u128;
        let mut power = 1u128;
        for (i, &m) in self.point_count_polynomial().iter().enumerate() {
            if i > 0 {
                power = power.checked_mul(qe)?;
            }
            acc = acc.checked_add(power.checked_mul(m as u128)?)?;
        }
        Some(acc)
    }
}

pub(crate) fn mobius(n: u64) -> i64 {
    let mut n = n;
    let mut result = 1i64;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

pub(crate) fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Number of closed points of degree exactly `e` on `space` over `F_q`,
/// by Mobius inversion of the rational point counts.
pub fn closed_point_count(space: SpaceKind, q: u64, e: u32) -> Result<u128> {
    if prime_power(q).is_none() {
        return Err(Error::InvalidParameter(format!("{q} is not a prime power")));
    }
    if e == 0 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    let overflow = || Error::cap(format!("point count over F_{{{q}^{e}}}"), "u128");
    let mut total: i128 = 0;
    for f in divisors(e as u64) {
        let mu = mobius(e as u64 / f);
        if mu == 0 {
            continue;
        }
        let count = space.rational_point_count(q, f as u32).ok_or_else(overflow)?;
        let count = i128::try_from(count).map_err(|_| overflow())?;
        total = total.checked_add(mu as i128 * count).ok_or_else(overflow)?;
    }
    debug_assert_eq!(total % e as i128, 0);
    Ok((total / e as i128) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fields() {
        let f2 = field_new(2, 1).unwrap();
        assert_eq!(f2.q(), 2);
        let f4 = field_new(2, 2).unwrap();
        assert_eq!(f4.q(), 4);
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let f8 = field_new(2, 3).unwrap();
        assert_eq!(f8.modulus(), &[1, 1, 0, 1]);
        assert_eq!(field_new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert!(field_new(2, 0).is_err());
        assert!(field_new(2, 32).unwrap_err().is_cap());
    }

    #[test]
    fn modulus_must_be_irreducible() {
        assert_eq!(FieldCtx::with_modulus(2, &[1, 0, 1]).unwrap_err(), Error::NotIrreducible);
        assert!(FieldCtx::with_modulus(3, &[1, 0, 1]).is_ok());
    }

    #[test]
    fn inverses_everywhere() {
        for (p, k) in [(2, 1), (2, 4), (3, 2), (5, 1), (7, 2), (2, 17), (3, 11)] {
            let f = field_new(p, k).unwrap();
            let step = (f.q() / 500).max(1);
            for a in (1..f.q()).step_by(step as usize) {
                let a = Fe(a);
                assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), Fe(1), "{f:?} {a:?}");
                assert_eq!(f.add(&a, &f.neg(&a)), Fe(0));
            }
        }
    }

    #[test]
    fn tables_agree_with_schoolbook() {
        // same modulus, one field tabulated, the other computed digit-wise
        let f = field_new(3, 4).unwrap();
        assert!(f.has_tables());
        for a in 0..f.q() {
            for b in (0..f.q()).step_by(7) {
                assert_eq!(f.mul(&Fe(a), &Fe(b)).0, f.mul_slow(a, b));
                assert_eq!(f.add(&Fe(a), &Fe(b)).0, f.add_digits(a, b));
            }
        }
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn extension_embedding() {
        let f2 = field_new(2, 1).unwrap();
        let ext = ext_field(&f2, 1).unwrap();
        assert_eq!(ext.field, f2);
        let f4 = ext_field(&f2, 2).unwrap();
        assert_eq!(f4.field.q(), 4);
        let fixed: Vec<Fe> = f4
            .field
            .elements()
            .filter(|a| f4.field.frobenius(a) == *a)
            .collect();
        assert_eq!(fixed, vec![f4.embed(Fe(0)), f4.embed(Fe(1))]);
        assert_eq!(ext_field(&field_new(3, 1).unwrap(), 2).unwrap().field.q(), 9);
        assert!(ext_field(&f2, 0).is_err());
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let f4 = field_new(2, 2).unwrap();
        let ext = ext_field(&f4, 3).unwrap();
        let big = &ext.field;
        for a in f4.elements() {
            for b in f4.elements() {
                assert_eq!(ext.embed(f4.add(&a, &b)), big.add(&ext.embed(a), &ext.embed(b)));
                assert_eq!(ext.embed(f4.mul(&a, &b)), big.mul(&ext.embed(a), &ext.embed(b)));
            }
        }
    }

    #[test]
    fn closed_points() {
        assert_eq!(closed_point_count(SpaceKind::ProjLine, 2, 1).unwrap(), 3);
        assert_eq!(closed_point_count(SpaceKind::ProjLine, 2, 2).unwrap(), 1);
        assert_eq!(closed_point_count(SpaceKind::ProductOfLines, 2, 1).unwrap(), 9);
        assert_eq!(
            closed_point_count(SpaceKind::Hirzebruch(3), 3, 2).unwrap(),
            closed_point_count(SpaceKind::ProductOfLines, 3, 2).unwrap()
        );
        assert!(closed_point_count(SpaceKind::ProjLine, 6, 1).is_err());
    }

    #[test]
    fn closed_points_partition_rational_points() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            for e in 1..=4u32 {
                let total: u128 = divisors(e as u64)
                    .into_iter()
                    .map(|f| f as u128 * closed_point_count(SpaceKind::ProjLine, q, f as u32).unwrap())
                    .sum();
                assert_eq!(total, SpaceKind::ProjLine.rational_point_count(q, e).unwrap());
            }
        }
    }

    #[test]
    fn field_elem_operators() {
        let f = field_new(5, 1).unwrap();
        let a = f.elem(Fe(3));
        let b = f.elem(Fe(4));
        assert_eq!((a + b).value(), Fe(2));
        assert_eq!((a * b).value(), Fe(2));
        assert_eq!((a / b * b).value(), Fe(3));
        assert_eq!((-a).value(), Fe(2));
    }
}
