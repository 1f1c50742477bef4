//! The arithmetic interface shared by every finite field in the crate.
//!
//! Polynomial algorithms are written once against [`Field`]; the concrete
//! fields are the table-backed [`FieldCtx`](crate::gf::FieldCtx) and the
//! residue fields of closed fibers in [`residue`](crate::residue).

use std::fmt::Debug;
use std::hash::Hash;

pub trait Field: Clone + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn characteristic(&self) -> u32;
    /// Degree over the prime field, so the order is `p^degree`.
    fn prime_degree(&self) -> u32;

    /// The `idx`-th element in the canonical enumeration (base-`p` digits of
    /// `idx` as coordinates). Indices at or beyond the order wrap around.
    fn element(&self, idx: u128) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    /// Field order, when it fits in a `u128`.
    fn order(&self) -> Option<u128> {
        (self.characteristic() as u128).checked_pow(self.prime_degree())
    }

    /// The image of an integer.
    fn from_int(&self, n: u64) -> Self::Elem {
        self.element((n % self.characteristic() as u64) as u128)
    }

    fn pow(&self, a: &Self::Elem, mut e: u128) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Frobenius `a -> a^p`.
    fn frobenius(&self, a: &Self::Elem) -> Self::Elem {
        self.pow(a, self.characteristic() as u128)
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// Product of coefficient slices, constant term first, untrimmed.
    /// Both inputs must be nonempty.
    fn poly_mul(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Vec<Self::Elem> {
        schoolbook_mul(self, a, b)
    }

    /// Long division in place: on return `r[..d.len() - 1]` is the remainder
    /// and `q` (of length `r.len() - d.len() + 1`) the quotient. The last
    /// entry of `d` must be nonzero.
    fn poly_divrem(&self, r: &mut [Self::Elem], d: &[Self::Elem], q: &mut [Self::Elem]) {
        schoolbook_divrem(self, r, d, q)
    }
}

pub(crate) fn schoolbook_mul<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut c = vec![k.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if k.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            c[i + j] = k.add(&c[i + j], &k.mul(x, y));
        }
    }
    c
}

pub(crate) fn schoolbook_divrem<F: Field>(k: &F, r: &mut [F::Elem], d: &[F::Elem], q: &mut [F::Elem]) {
    let dd = d.len() - 1;
    let inv = k.inv(&d[dd]).expect("nonzero leading coefficient");
    for i in (dd..r.len()).rev() {
        if k.is_zero(&r[i]) {
            continue;
        }
        let t = k.mul(&r[i], &inv);
        for (j, b) in d.iter().enumerate() {
            let idx = i - dd + j;
            r[idx] = k.sub(&r[idx], &k.mul(&t, b));
        }
        q[i - dd] = t;
    }
}
