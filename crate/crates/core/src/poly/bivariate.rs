//! Polynomials in `F_q[s][u]`: the affine chart of a section, with `u` the
//! fiber coordinate and `s` the base coordinate.

use super::UniPoly;
use crate::field::Field;
use crate::gf::{Fe, FieldCtx};

/// `sum_i c[i](s) u^i`, trimmed so the top coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiPoly {
    c: Vec<UniPoly<Fe>>,
}

type P = UniPoly<Fe>;

impl BiPoly {
    pub fn new(mut c: Vec<P>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        BiPoly { c }
    }

    pub fn zero() -> Self {
        BiPoly { c: Vec::new() }
    }

    /// A polynomial in `s` alone.
    pub fn from_base(p: P) -> Self {
        Self::new(vec![p])
    }

    pub fn coeffs(&self) -> &[P] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree in `u`; `-1` for zero.
    pub fn deg_u(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn lead(&self) -> &P {
        self.c.last().expect("zero polynomial has no leading coefficient")
    }

    pub fn add(&self, o: &Self, k: &FieldCtx) -> Self {
        let n = self.c.len().max(o.c.len());
        let zero = P::zero();
        Self::new((0..n).map(|i| self.c.get(i).unwrap_or(&zero).add(o.c.get(i).unwrap_or(&zero), k)).collect())
    }

    pub fn sub(&self, o: &Self, k: &FieldCtx) -> Self {
        let n = self.c.len().max(o.c.len());
        let zero = P::zero();
        Self::new((0..n).map(|i| self.c.get(i).unwrap_or(&zero).sub(o.c.get(i).unwrap_or(&zero), k)).collect())
    }

    pub fn mul(&self, o: &Self, k: &FieldCtx) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![P::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b, k), k);
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, a: &P, k: &FieldCtx) -> Self {
        Self::new(self.c.iter().map(|x| x.mul(a, k)).collect())
    }

    fn shift_u(&self, n: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![P::zero(); n];
        c.extend(self.c.iter().cloned());
        BiPoly { c }
    }

    pub fn d_u(&self, k: &FieldCtx) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a.scale(&k.from_int(i as u64), k))
                .collect(),
        )
    }

    pub fn d_s(&self, k: &FieldCtx) -> Self {
        Self::new(self.c.iter().map(|a| a.derivative(k)).collect())
    }

    /// Monic gcd of the coefficients; zero for the zero polynomial.
    pub fn content(&self, k: &FieldCtx) -> P {
        self.c.iter().fold(P::zero(), |g, a| g.gcd(a, k))
    }

    pub fn primitive_part(&self, k: &FieldCtx) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let c = self.content(k);
        Self::new(self.c.iter().map(|a| a.div_exact(&c, k).unwrap()).collect())
    }

    /// Normalizes so the leading coefficient is monic in `s`.
    pub fn normalize(&self, k: &FieldCtx) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let inv = k.inv(self.lead().lead().unwrap()).unwrap();
        Self::new(self.c.iter().map(|a| a.scale(&inv, k)).collect())
    }

    /// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) a = q b + r`.
    pub fn prem(&self, b: &Self, k: &FieldCtx) -> Self {
        let db = b.deg_u();
        assert!(db >= 0, "pseudo-division by zero");
        let mut r = self.clone();
        let lb = b.lead().clone();
        let mut steps = (self.deg_u() - db + 1).max(0);
        while r.deg_u() >= db {
            let lr = r.lead().clone();
            let shift = (r.deg_u() - db) as usize;
            r = r.scale(&lb, k).sub(&b.scale(&lr, k).shift_u(shift), k);
            steps -= 1;
        }
        // top up the lc(b) power so the identity holds with the full exponent
        if steps > 0 {
            r = r.scale(&lb.pow(steps as u32, k), k);
        }
        r
    }

    /// Greatest common divisor in `F_q[s, u]`, normalized, by the primitive
    /// remainder sequence. `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &Self, k: &FieldCtx) -> Self {
        if self.is_zero() {
            return o.normalize(k);
        }
        if o.is_zero() {
            return self.normalize(k);
        }
        let cont = self.content(k).gcd(&o.content(k), k);
        let (mut a, mut b) = (self.primitive_part(k), o.primitive_part(k));
        if a.deg_u() < b.deg_u() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            if b.deg_u() == 0 {
                return Self::from_base(cont);
            }
            let r = a.prem(&b, k);
            if r.is_zero() {
                return b.scale(&cont, k).normalize(k);
            }
            a = b;
            b = r.primitive_part(k);
        }
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide.
    pub fn div_exact(&self, d: &Self, k: &FieldCtx) -> Option<Self> {
        assert!(!d.is_zero(), "division by zero");
        let dd = d.deg_u();
        let mut r = self.clone();
        let mut q = vec![P::zero(); (self.deg_u() - dd + 1).max(0) as usize];
        while r.deg_u() >= dd {
            let t = r.lead().div_exact(d.lead(), k)?;
            let shift = (r.deg_u() - dd) as usize;
            q[shift] = t.clone();
            r = r.sub(&d.scale(&t, k).shift_u(shift), k);
        }
        r.is_zero().then(|| Self::new(q))
    }

    /// Resultant with respect to `u`, by fraction-free elimination of the
    /// Sylvester matrix. Degrees are the actual `u`-degrees; a zero input
    /// gives zero unless the other input is a nonzero constant in `u`.
    pub fn resultant_u(&self, o: &Self, k: &FieldCtx) -> P {
        let (m, n) = (self.deg_u(), o.deg_u());
        if m < 0 || n < 0 {
            let other = if m < 0 { n } else { m };
            return if other == 0 { P::one(k) } else { P::zero() };
        }
        let (m, n) = (m as usize, n as usize);
        if m == 0 {
            return self.lead().pow(n as u32, k);
        }
        if n == 0 {
            return o.lead().pow(m as u32, k);
        }
        if n == 1 {
            // (-1)^m sum a_i (-b0)^i b1^(m - i)
            let r = linear_resultant(&self.c, &o.c[0].neg(k), &o.c[1], k);
            return if m % 2 == 1 { r.neg(k) } else { r };
        }
        if m == 1 {
            return linear_resultant(&o.c, &self.c[0].neg(k), &self.c[1], k);
        }
        if m == 2 && n == 2 {
            let (a, b) = (&self.c, &o.c);
            let x = a[2].mul(&b[0], k).sub(&a[0].mul(&b[2], k), k);
            let y = a[2].mul(&b[1], k).sub(&a[1].mul(&b[2], k), k);
            let z = a[1].mul(&b[0], k).sub(&a[0].mul(&b[1], k), k);
            return x.mul(&x, k).sub(&y.mul(&z, k), k);
        }
        let size = m + n;
        let mut a = vec![vec![P::zero(); size]; size];
        for i in 0..n {
            for (j, c) in self.c.iter().rev().enumerate() {
                a[i][i + j] = c.clone();
            }
        }
        for i in 0..m {
            for (j, c) in o.c.iter().rev().enumerate() {
                a[n + i][i + j] = c.clone();
            }
        }
        bareiss_det(a, k)
    }

    /// Substitutes `s = s0` from an extension given by `eval`.
    pub fn eval_s<G: Field>(&self, big: &G, s0: &G::Elem, embed: impl Fn(&Fe) -> G::Elem + Copy) -> UniPoly<G::Elem> {
        UniPoly::from_coeffs(big, self.c.iter().map(|a| a.eval_in(s0, big, embed)).collect())
    }
}

/// `sum_i c_i x^i y^(deg - i)`: the resultant with a linear polynomial up to sign.
fn linear_resultant(c: &[P], x: &P, y: &P, k: &FieldCtx) -> P {
    let deg = c.len() - 1;
    let mut acc = P::zero();
    let mut xp = P::one(k);
    let mut ypows = vec![P::one(k)];
    for _ in 0..deg {
        let next = ypows.last().unwrap().mul(y, k);
        ypows.push(next);
    }
    for (i, a) in c.iter().enumerate() {
        acc = acc.add(&a.mul(&xp, k).mul(&ypows[deg - i], k), k);
        xp = xp.mul(x, k);
    }
    acc
}

/// Determinant over `F_q[s]` by Bareiss elimination.
pub(crate) fn bareiss_det(mut a: Vec<Vec<P>>, k: &FieldCtx) -> P {
    let n = a.len();
    if n == 0 {
        return P::one(k);
    }
    let mut negate = false;
    let mut prev = P::one(k);
    for col in 0..n - 1 {
        if a[col][col].is_zero() {
            let Some(piv) = (col + 1..n).find(|&r| !a[r][col].is_zero()) else {
                return P::zero();
            };
            a.swap(col, piv);
            negate = !negate;
        }
        for i in col + 1..n {
            for j in col + 1..n {
                let num = a[i][j].mul(&a[col][col], k).sub(&a[i][col].mul(&a[col][j], k), k);
                a[i][j] = num.div_exact(&prev, k).expect("Bareiss division is exact");
            }
            a[i][col] = P::zero();
        }
        prev = a[col][col].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        det.neg(k)
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_new;
    use crate::poly::resultant;

    fn bp(rows: &[&[u32]]) -> BiPoly {
        BiPoly::new(rows.iter().map(|r| P::from_u32(r)).collect())
    }

    #[test]
    fn resultant_specializes() {
        // Res_u commutes with substituting s = s0 when leading terms survive
        let k = field_new(5, 1).unwrap();
        let f = bp(&[&[1, 2], &[0, 1, 3], &[2]]);
        let g = bp(&[&[3], &[1, 1], &[0, 4], &[1]]);
        let r = f.resultant_u(&g, &k);
        for s0 in k.elements() {
            let fs = f.eval_s(&k, &s0, |a| *a);
            let gs = g.eval_s(&k, &s0, |a| *a);
            assert_eq!(r.eval(&s0, &k), resultant(&fs, &gs, &k).unwrap());
        }
    }

    #[test]
    fn small_degree_formulas_match_elimination() {
        let k = field_new(5, 1).unwrap();
        let polys = [
            bp(&[&[1, 2], &[0, 1, 3], &[2]]),
            bp(&[&[3], &[1, 1]]),
            bp(&[&[0, 4], &[2, 0, 1], &[1, 1], &[3]]),
            bp(&[&[2, 2], &[4]]),
            bp(&[&[1], &[0, 0, 1], &[1, 3]]),
        ];
        for f in &polys {
            for g in &polys {
                let size = (f.deg_u() + g.deg_u()) as usize;
                let mut a = vec![vec![P::zero(); size]; size];
                for i in 0..g.deg_u() as usize {
                    for (j, c) in f.c.iter().rev().enumerate() {
                        a[i][i + j] = c.clone();
                    }
                }
                for i in 0..f.deg_u() as usize {
                    for (j, c) in g.c.iter().rev().enumerate() {
                        a[g.deg_u() as usize + i][i + j] = c.clone();
                    }
                }
                assert_eq!(f.resultant_u(g, &k), bareiss_det(a, &k), "{f:?} {g:?}");
            }
        }
    }

    #[test]
    fn gcd_and_division() {
        let k = field_new(3, 1).unwrap();
        let h = bp(&[&[0, 1], &[1]]); // u + s
        let a = h.mul(&bp(&[&[1], &[0, 1], &[1]]), &k);
        let b = h.mul(&bp(&[&[2, 0, 1], &[1]]), &k);
        assert_eq!(a.gcd(&b, &k), h);
        assert_eq!(a.div_exact(&h, &k).unwrap().mul(&h, &k), a);
        assert!(a.div_exact(&bp(&[&[1], &[1]]), &k).is_none());
        assert!(a.resultant_u(&b, &k).is_zero());
    }

    #[test]
    fn prem_identity() {
        let k = field_new(7, 1).unwrap();
        let a = bp(&[&[1, 1], &[2], &[0, 3], &[1, 0, 1]]);
        let b = bp(&[&[4], &[0, 0, 2]]);
        let r = a.prem(&b, &k);
        assert!(r.deg_u() < b.deg_u());
        let lhs = a.scale(&b.lead().pow(3, &k), &k).sub(&r, &k);
        assert!(lhs.div_exact(&b, &k).is_some());
    }
}
