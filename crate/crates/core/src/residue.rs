//! Residue fields `F_q[s]/(r)` of closed points of the base line.
//!
//! Elements are coefficient vectors of length `deg r` in the basis
//! `1, s, ..., s^(e-1)`. Unlike [`FieldCtx`] there is no size cap, so
//! fibers of any degree can be tested.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{Fe, FieldCtx};
use crate::poly::{self, UniPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientField {
    base: FieldCtx,
    r: UniPoly<Fe>,
    e: usize,
}

impl QuotientField {
    /// `r` must be monic irreducible of positive degree.
    pub fn new(base: &FieldCtx, r: &UniPoly<Fe>) -> Result<Self> {
        if !r.is_monic(base) || !poly::is_irreducible(r, base) {
            return Err(Error::NotIrreducible);
        }
        Ok(Self::new_unchecked(base, r))
    }

    pub(crate) fn new_unchecked(base: &FieldCtx, r: &UniPoly<Fe>) -> Self {
        QuotientField { base: base.clone(), r: r.clone(), e: r.deg() as usize }
    }

    pub fn base(&self) -> &FieldCtx {
        &self.base
    }

    pub fn modulus(&self) -> &UniPoly<Fe> {
        &self.r
    }

    pub fn degree(&self) -> usize {
        self.e
    }

    /// Reduction of a base polynomial modulo `r`.
    pub fn reduce(&self, f: &UniPoly<Fe>) -> Vec<Fe> {
        let mut c = f.rem(&self.r, &self.base).into_coeffs();
        c.resize(self.e, Fe(0));
        c
    }

    /// The canonical representative of degree `< e`.
    pub fn lift(&self, a: &[Fe]) -> UniPoly<Fe> {
        UniPoly::new(a.to_vec())
    }

    pub fn from_base(&self, a: Fe) -> Vec<Fe> {
        let mut c = vec![Fe(0); self.e];
        c[0] = a;
        c
    }
}

impl Field for QuotientField {
    type Elem = Vec<Fe>;

    fn zero(&self) -> Vec<Fe> {
        vec![Fe(0); self.e]
    }

    fn one(&self) -> Vec<Fe> {
        self.from_base(Fe(1))
    }

    fn add(&self, a: &Vec<Fe>, b: &Vec<Fe>) -> Vec<Fe> {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }

    fn sub(&self, a: &Vec<Fe>, b: &Vec<Fe>) -> Vec<Fe> {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }

    fn neg(&self, a: &Vec<Fe>) -> Vec<Fe> {
        a.iter().map(|x| self.base.neg(x)).collect()
    }

    fn mul(&self, a: &Vec<Fe>, b: &Vec<Fe>) -> Vec<Fe> {
        let e = self.e;
        let mut prod = self.base.poly_mul(a, b);
        if e > 1 {
            let mut quot = vec![Fe(0); e - 1];
            self.base.poly_divrem(&mut prod, self.r.coeffs(), &mut quot);
        }
        prod.truncate(e);
        prod
    }

    fn inv(&self, a: &Vec<Fe>) -> Option<Vec<Fe>> {
        let f = self.lift(a);
        if f.is_zero() {
            return None;
        }
        let (g, s, _) = f.ext_gcd(&self.r, &self.base);
        debug_assert!(g.is_one(&self.base));
        Some(self.reduce(&s))
    }

    fn characteristic(&self) -> u32 {
        self.base.p()
    }

    fn prime_degree(&self) -> u32 {
        self.base.k() * self.e as u32
    }

    fn element(&self, idx: u128) -> Vec<Fe> {
        let q = self.base.q() as u128;
        let mut idx = idx;
        (0..self.e)
            .map(|_| {
                let d = idx % q;
                idx /= q;
                Fe(d as u32)
            })
            .collect()
    }
}
