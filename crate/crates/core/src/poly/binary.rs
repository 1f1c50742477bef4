//! Binary forms `F(u, v)` of a fixed degree.
//!
//! Roots at `(1:0)` are handled by tracking the power of `v` dividing the
//! form, so callers never split into charts themselves.

use super::UniPoly;
use crate::error::{Error, Result};
use crate::field::Field;

/// A homogeneous form of degree `n`; `coeffs[i]` multiplies `u^i v^(n-i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryForm<E> {
    n: usize,
    c: Vec<E>,
}

impl<E: Clone + PartialEq> BinaryForm<E> {
    /// Pads or rejects `coeffs` to length `n + 1`.
    pub fn new<F: Field<Elem = E>>(k: &F, n: usize, mut coeffs: Vec<E>) -> Result<Self> {
        if coeffs.len() > n + 1 {
            if coeffs[n + 1..].iter().any(|a| !k.is_zero(a)) {
                return Err(Error::Malformed(format!("form of degree {n} given {} coefficients", coeffs.len())));
            }
            coeffs.truncate(n + 1);
        }
        coeffs.resize(n + 1, k.zero());
        Ok(BinaryForm { n, c: coeffs })
    }

    pub fn zero<F: Field<Elem = E>>(k: &F, n: usize) -> Self {
        BinaryForm { n, c: vec![k.zero(); n + 1] }
    }

    /// `v^(n - deg f) * f(u/v) * v^deg f`: the homogenization of `f` in degree `n`.
    pub fn homogenize<F: Field<Elem = E>>(k: &F, f: &UniPoly<E>, n: usize) -> Result<Self> {
        Self::new(k, n, f.coeffs().to_vec())
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[E] {
        &self.c
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, k: &F) -> bool {
        self.c.iter().all(|a| k.is_zero(a))
    }

    pub fn eval<F: Field<Elem = E>>(&self, k: &F, u: &E, v: &E) -> E {
        // Horner: ((c_n u + c_{n-1} v) u + c_{n-2} v^2) u + ...
        let mut acc = k.zero();
        let mut vpow = k.one();
        for a in self.c.iter().rev() {
            acc = k.add(&k.mul(&acc, u), &k.mul(a, &vpow));
            vpow = k.mul(&vpow, v);
        }
        acc
    }

    /// `F(u, 1)`.
    pub fn dehomogenize<F: Field<Elem = E>>(&self, k: &F) -> UniPoly<E> {
        UniPoly::from_coeffs(k, self.c.clone())
    }

    /// Exponent of `v` dividing the form: the multiplicity of the root
    /// `(1:0)`. `None` for the zero form.
    pub fn multiplicity_at_infinity<F: Field<Elem = E>>(&self, k: &F) -> Option<usize> {
        let d = self.dehomogenize(k).degree()?;
        Some(self.n - d)
    }

    pub fn partial_u<F: Field<Elem = E>>(&self, k: &F) -> Self {
        if self.n == 0 {
            return Self::zero(k, 0);
        }
        let c = (1..=self.n).map(|i| k.mul(&self.c[i], &k.from_int(i as u64))).collect();
        BinaryForm { n: self.n - 1, c }
    }

    pub fn partial_v<F: Field<Elem = E>>(&self, k: &F) -> Self {
        if self.n == 0 {
            return Self::zero(k, 0);
        }
        let c = (0..self.n).map(|i| k.mul(&self.c[i], &k.from_int((self.n - i) as u64))).collect();
        BinaryForm { n: self.n - 1, c }
    }

    /// Greatest common divisor, normalized so its dehomogenization is monic.
    /// `gcd(0, G) = G` (normalized); `gcd(0, 0)` is the zero form of degree 0.
    pub fn gcd<F: Field<Elem = E>>(&self, other: &Self, k: &F) -> Self {
        let (ma, mb) = (self.multiplicity_at_infinity(k), other.multiplicity_at_infinity(k));
        let v_power = match (ma, mb) {
            (None, None) => return Self::zero(k, 0),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.min(b),
        };
        let g = self.dehomogenize(k).gcd(&other.dehomogenize(k), k);
        let n = g.deg() as usize + v_power;
        Self::homogenize(k, &g, n).expect("gcd degree fits")
    }

    /// `gcd(F, F_u, F_v)`: its roots are exactly the multiple roots of `F`
    /// over the algebraic closure. In characteristic `p` both partials can
    /// vanish identically, in which case the result is `F` itself.
    pub fn multiple_root_locus<F: Field<Elem = E>>(&self, k: &F) -> Result<Self> {
        if self.is_zero(k) {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.gcd(&self.partial_u(k), k).gcd(&self.partial_v(k), k))
    }

    /// Squarefree in the sense of binary forms (no repeated projective root).
    pub fn is_squarefree<F: Field<Elem = E>>(&self, k: &F) -> Result<bool> {
        Ok(self.multiple_root_locus(k)?.degree() == 0)
    }

    pub fn map<T>(&self, f: impl Fn(&E) -> T) -> BinaryForm<T> {
        BinaryForm { n: self.n, c: self.c.iter().map(f).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{field_new, Fe};

    fn form(n: usize, c: &[u32]) -> BinaryForm<Fe> {
        let k = field_new(2, 1).unwrap();
        BinaryForm::new(&k, n, c.iter().map(|&x| Fe(x)).collect()).unwrap()
    }

    #[test]
    fn locus_examples() {
        let k3 = field_new(3, 1).unwrap();
        // u v (u + v)
        let f = BinaryForm::new(&k3, 3, vec![Fe(0), Fe(1), Fe(1), Fe(0)]).unwrap();
        assert_eq!(f.multiple_root_locus(&k3).unwrap().degree(), 0);
        // u^2 v: double root at (0:1)
        let d = form(3, &[0, 0, 1, 0]).multiple_root_locus(&k3).unwrap();
        assert_eq!(d, form(1, &[0, 1]));
        let k = field_new(2, 1).unwrap();
        // u^2 + v^2 = (u + v)^2 in characteristic 2
        let f = form(2, &[1, 0, 1]);
        assert_eq!(f.multiple_root_locus(&k).unwrap(), f);
        assert_eq!(form(2, &[0, 0, 0]).multiple_root_locus(&k), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn root_at_infinity() {
        let k = field_new(3, 1).unwrap();
        // v^2 u: double root at (1:0)
        let f = form(3, &[0, 1, 0, 0]);
        assert_eq!(f.multiplicity_at_infinity(&k), Some(2));
        assert_eq!(f.multiple_root_locus(&k).unwrap(), form(1, &[1, 0]));
        // in characteristic 2 the locus is v^2, same root
        let k2 = field_new(2, 1).unwrap();
        assert_eq!(f.multiple_root_locus(&k2).unwrap(), form(2, &[1, 0, 0]));
    }

    #[test]
    fn scaling() {
        let k = field_new(5, 1).unwrap();
        let f = BinaryForm::new(&k, 3, vec![Fe(1), Fe(2), Fe(0), Fe(4)]).unwrap();
        for lam in 1..5 {
            for u in 0..5 {
                for v in 0..5 {
                    let l = Fe(lam);
                    let lhs = f.eval(&k, &k.mul(&l, &Fe(u)), &k.mul(&l, &Fe(v)));
                    let rhs = k.mul(&k.pow(&l, 3), &f.eval(&k, &Fe(u), &Fe(v)));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
