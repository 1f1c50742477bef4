//! Buchberger's algorithm in `F_q[u, s]` under graded lexicographic order
//! (`u > s`), just enough to decide emptiness and finiteness of the
//! Jacobian scheme of an affine chart.

use crate::field::Field;
use crate::gf::{Fe, FieldCtx};

pub(crate) type Mon = (u32, u32);

fn key(m: Mon) -> (u32, u32) {
    (m.0 + m.1, m.0)
}

/// Terms sorted by decreasing monomial; no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct GPoly {
    terms: Vec<(Mon, Fe)>,
}

impl GPoly {
    pub fn from_terms(k: &FieldCtx, mut raw: Vec<(Mon, Fe)>) -> Self {
        raw.sort_by(|a, b| key(b.0).cmp(&key(a.0)));
        let mut terms: Vec<(Mon, Fe)> = Vec::with_capacity(raw.len());
        for (m, c) in raw {
            match terms.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = k.add(lc, &c),
                _ => terms.push((m, c)),
            }
        }
        terms.retain(|(_, c)| *c != Fe(0));
        GPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lm(&self) -> Mon {
        self.terms[0].0
    }

    fn lc(&self) -> Fe {
        self.terms[0].1
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.lm() == (0, 0)
    }

    pub fn d_u(&self, k: &FieldCtx) -> Self {
        let raw = self
            .terms
            .iter()
            .filter(|((a, _), _)| *a > 0)
            .map(|&((a, b), c)| ((a - 1, b), k.mul(&c, &k.from_int(a as u64))))
            .collect();
        Self::from_terms(k, raw)
    }

    pub fn d_s(&self, k: &FieldCtx) -> Self {
        let raw = self
            .terms
            .iter()
            .filter(|((_, b), _)| *b > 0)
            .map(|&((a, b), c)| ((a, b - 1), k.mul(&c, &k.from_int(b as u64))))
            .collect();
        Self::from_terms(k, raw)
    }

    pub fn mul(&self, other: &Self, k: &FieldCtx) -> Self {
        let raw = self
            .terms
            .iter()
            .flat_map(|&((a, b), c)| other.terms.iter().map(move |&((x, y), d)| ((a + x, b + y), (c, d))))
            .map(|(m, (c, d))| (m, k.mul(&c, &d)))
            .collect();
        Self::from_terms(k, raw)
    }

    pub fn sub(&self, other: &Self, k: &FieldCtx) -> Self {
        self.sub_scaled(Fe(1), (0, 0), other, k)
    }

    fn monic(&self, k: &FieldCtx) -> Self {
        let inv = k.inv(&self.lc()).unwrap();
        GPoly { terms: self.terms.iter().map(|(m, c)| (*m, k.mul(c, &inv))).collect() }
    }

    /// `self - c m g`.
    fn sub_scaled(&self, c: Fe, m: Mon, g: &GPoly, k: &FieldCtx) -> Self {
        let mut raw = self.terms.clone();
        raw.extend(g.terms.iter().map(|((a, b), d)| ((a + m.0, b + m.1), k.neg(&k.mul(&c, d)))));
        Self::from_terms(k, raw)
    }
}

fn divides(a: Mon, b: Mon) -> bool {
    a.0 <= b.0 && a.1 <= b.1
}

/// Full reduction of `f` modulo `basis`.
fn reduce(f: &GPoly, basis: &[GPoly], k: &FieldCtx) -> GPoly {
    let mut rem: Vec<(Mon, Fe)> = Vec::new();
    let mut p = f.clone();
    'outer: while !p.is_zero() {
        let (m, c) = p.terms[0];
        for g in basis {
            let gm = g.lm();
            if divides(gm, m) {
                let coef = k.mul(&c, &k.inv(&g.lc()).unwrap());
                p = p.sub_scaled(coef, (m.0 - gm.0, m.1 - gm.1), g, k);
                continue 'outer;
            }
        }
        rem.push((m, c));
        p.terms.remove(0);
    }
    GPoly::from_terms(k, rem)
}

fn s_poly(f: &GPoly, g: &GPoly, k: &FieldCtx) -> GPoly {
    let (a, b) = (f.lm(), g.lm());
    let l = (a.0.max(b.0), a.1.max(b.1));
    let f1 = GPoly::from_terms(k, Vec::new()).sub_scaled(k.neg(&k.inv(&f.lc()).unwrap()), (l.0 - a.0, l.1 - a.1), f, k);
    f1.sub_scaled(k.inv(&g.lc()).unwrap(), (l.0 - b.0, l.1 - b.1), g, k)
}

/// Reduced Groebner basis (monic, sorted by leading monomial).
pub(crate) fn groebner_basis(gens: &[GPoly], k: &FieldCtx) -> Vec<GPoly> {
    let mut basis: Vec<GPoly> = Vec::new();
    for g in gens {
        let r = reduce(g, &basis, k);
        if !r.is_zero() {
            basis.push(r.monic(k));
        }
    }
    let mut pairs: Vec<(usize, usize)> = (0..basis.len()).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    while let Some((i, j)) = pairs.pop() {
        let (a, b) = (basis[i].lm(), basis[j].lm());
        // coprime leading monomials reduce to zero
        if a.0.min(b.0) == 0 && a.1.min(b.1) == 0 {
            continue;
        }
        let r = reduce(&s_poly(&basis[i], &basis[j], k), &basis, k);
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return vec![GPoly::from_terms(k, vec![((0, 0), Fe(1))])];
        }
        let n = basis.len();
        basis.push(r.monic(k));
        pairs.extend((0..n).map(|i| (i, n)));
    }
    // minimalize and interreduce
    let mut minimal: Vec<GPoly> = Vec::new();
    for (idx, g) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            j != idx && divides(h.lm(), g.lm()) && (h.lm() != g.lm() || j < idx)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut out: Vec<GPoly> = Vec::new();
    for idx in 0..minimal.len() {
        let others: Vec<GPoly> = minimal.iter().enumerate().filter(|(j, _)| *j != idx).map(|(_, g)| g.clone()).collect();
        let lead = GPoly { terms: vec![minimal[idx].terms[0]] };
        let tail = GPoly { terms: minimal[idx].terms[1..].to_vec() };
        let mut r = reduce(&tail, &others, k);
        r.terms.insert(0, lead.terms[0]);
        out.push(r.monic(k));
    }
    out.sort_by_key(|a| key(a.lm()));
    out
}

pub(crate) fn is_unit_ideal(basis: &[GPoly]) -> bool {
    basis.iter().any(|g| g.is_constant())
}

/// `dim_k k[u, s]/I` from the leading monomials of a Groebner basis, or
/// `None` when the quotient is infinite dimensional.
pub(crate) fn quotient_dimension(basis: &[GPoly]) -> Option<usize> {
    if is_unit_ideal(basis) {
        return Some(0);
    }
    let lms: Vec<Mon> = basis.iter().map(|g| g.lm()).collect();
    let umax = lms.iter().filter(|m| m.1 == 0).map(|m| m.0).min()?;
    let smax = lms.iter().filter(|m| m.0 == 0).map(|m| m.1).min()?;
    let mut count = 0;
    for a in 0..umax {
        for b in 0..smax {
            if !lms.iter().any(|&m| divides(m, (a, b))) {
                count += 1;
            }
        }
    }
    Some(count)
}
