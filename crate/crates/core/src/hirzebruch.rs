//! Hirzebruch surfaces `F_a`, their Cox rings and section spaces, closed
//! fibers of the ruling, and restriction of sections to doubled fibers.
//!
//! The Cox ring is `F_q[x, y, s, t]` with `x` of degree `(1, 0)`, `y` of
//! degree `(1, -a)` and `s, t` of degree `(0, 1)`. A section of bidegree
//! `(i, j)` is `sum_beta x^(i - beta) y^beta g_beta(s, t)` with `g_beta` a
//! binary form of degree `j + a beta`; the ruling is the projection to
//! `(s : t)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{self, Extension, Fe, FieldCtx, SpaceKind};
use crate::poly::{self, BiPoly, BinaryForm, UniPoly};
use crate::residue::QuotientField;

/// Largest number of points `rational_points` will enumerate.
pub const POINT_CAP: u128 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surface {
    a: u32,
    field: FieldCtx,
}

impl Surface {
    pub fn new(a: u32, field: &FieldCtx) -> Self {
        Surface { a, field: field.clone() }
    }

    /// `F_a` over the field with `q` elements.
    pub fn over(a: u32, q: u64) -> Result<Self> {
        let (p, k) = gf::prime_power(q).ok_or_else(|| Error::InvalidParameter(format!("{q} is not a prime power")))?;
        Ok(Surface::new(a, &gf::field_new(p as u64, k)?))
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn kind(&self) -> SpaceKind {
        SpaceKind::Hirzebruch(self.a)
    }
}

/// The divisor class `i D_h + j D_v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bidegree {
    pub i: i64,
    pub j: i64,
}

impl Bidegree {
    pub fn new(i: i64, j: i64) -> Self {
        Bidegree { i, j }
    }
}

/// `x^alpha y^beta s^gamma t^delta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
    pub delta: u32,
}

impl Monomial {
    pub fn new(alpha: u32, beta: u32, gamma: u32, delta: u32) -> Self {
        Monomial { alpha, beta, gamma, delta }
    }

    pub fn bidegree(&self, a: u32) -> Bidegree {
        let i = (self.alpha + self.beta) as i64;
        Bidegree::new(i, (self.gamma + self.delta) as i64 - a as i64 * self.beta as i64)
    }
}

/// Degree of `g_beta` in `(s, t)`, or `None` if that block is empty.
fn block_degree(a: u32, b: Bidegree, beta: i64) -> Option<u32> {
    let d = b.j + a as i64 * beta;
    (d >= 0).then_some(d as u32)
}

/// Monomials of bidegree `b`, ordered by `(beta, gamma)` ascending.
pub fn section_basis(surface: &Surface, b: Bidegree) -> Vec<Monomial> {
    basis_for(surface.a, b)
}

pub(crate) fn basis_for(a: u32, b: Bidegree) -> Vec<Monomial> {
    let mut out = Vec::new();
    if b.i < 0 {
        return out;
    }
    for beta in 0..=b.i {
        let Some(d) = block_degree(a, b, beta) else { continue };
        for gamma in 0..=d {
            out.push(Monomial::new((b.i - beta) as u32, beta as u32, gamma, d - gamma));
        }
    }
    out
}

/// `sum_{beta=0}^{i} max(0, j + a beta + 1)`.
pub fn section_dimension(a: u32, b: Bidegree) -> usize {
    if b.i < 0 {
        return 0;
    }
    (0..=b.i).map(|beta| (b.j + a as i64 * beta + 1).max(0) as usize).sum()
}

/// A section of `O(i D_h + j D_v)` with coefficients on [`section_basis`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    surface: Surface,
    bidegree: Bidegree,
    coeffs: Vec<Fe>,
}

#[derive(Serialize, Deserialize)]
struct SectionDoc {
    a: u32,
    q: u64,
    i: i64,
    j: i64,
    coeffs: Vec<u32>,
}

impl Section {
    pub fn new(surface: &Surface, bidegree: Bidegree, coeffs: Vec<Fe>) -> Result<Self> {
        let dim = section_dimension(surface.a, bidegree);
        if coeffs.len() != dim {
            return Err(Error::Malformed(format!("expected {dim} coefficients, got {}", coeffs.len())));
        }
        if let Some(c) = coeffs.iter().find(|c| c.0 >= surface.q()) {
            return Err(Error::Malformed(format!("coefficient {} is not a field element", c.0)));
        }
        Ok(Section { surface: surface.clone(), bidegree, coeffs })
    }

    pub fn zero(surface: &Surface, bidegree: Bidegree) -> Self {
        let dim = section_dimension(surface.a, bidegree);
        Section { surface: surface.clone(), bidegree, coeffs: vec![Fe(0); dim] }
    }

    /// Builds a section from `(coefficient, monomial)` terms; repeated
    /// monomials are summed.
    pub fn from_terms(surface: &Surface, bidegree: Bidegree, terms: &[(Fe, Monomial)]) -> Result<Self> {
        let basis = section_basis(surface, bidegree);
        let mut s = Section::zero(surface, bidegree);
        let k = surface.field();
        for (c, m) in terms {
            let idx = basis
                .iter()
                .position(|b| b == m)
                .ok_or_else(|| Error::Malformed(format!("{m:?} does not have bidegree {bidegree:?}")))?;
            s.coeffs[idx] = k.add(&s.coeffs[idx], c);
        }
        Ok(s)
    }

    pub fn surface(&self) -> &Surface {
        &self.surface
    }

    pub fn field(&self) -> &FieldCtx {
        &self.surface.field
    }

    pub fn bidegree(&self) -> Bidegree {
        self.bidegree
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Fe(0))
    }

    pub fn basis(&self) -> Vec<Monomial> {
        section_basis(&self.surface, self.bidegree)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Fe, Monomial)> + '_ {
        self.coeffs.iter().copied().zip(self.basis()).filter(|(c, _)| *c != Fe(0))
    }

    pub fn scale(&self, c: Fe) -> Self {
        let k = self.field();
        Section { coeffs: self.coeffs.iter().map(|x| k.mul(x, &c)).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.bidegree != other.bidegree || self.surface != other.surface {
            return Err(Error::InvalidParameter("sections live in different spaces".into()));
        }
        let k = self.field();
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| k.add(x, y)).collect();
        Ok(Section { coeffs, ..self.clone() })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.surface != other.surface {
            return Err(Error::InvalidParameter("sections live on different surfaces".into()));
        }
        let b = Bidegree::new(self.bidegree.i + other.bidegree.i, self.bidegree.j + other.bidegree.j);
        let k = self.field();
        let terms: Vec<(Fe, Monomial)> = self
            .terms()
            .flat_map(|(c1, m1)| {
                other.terms().map(move |(c2, m2)| {
                    let m = Monomial::new(m1.alpha + m2.alpha, m1.beta + m2.beta, m1.gamma + m2.gamma, m1.delta + m2.delta);
                    (k.mul(&c1, &c2), m)
                })
            })
            .collect();
        Section::from_terms(&self.surface, b, &terms)
    }

    /// Pullback along the base automorphism `s -> m[0] s + m[1] t`,
    /// `t -> m[2] s + m[3] t`.
    pub fn substitute_base(&self, m: [Fe; 4]) -> Result<Section> {
        let k = self.field();
        if k.sub(&k.mul(&m[0], &m[3]), &k.mul(&m[1], &m[2])) == Fe(0) {
            return Err(Error::InvalidParameter("base substitution is singular".into()));
        }
        let new_s = UniPoly::from_coeffs(k, vec![m[1], m[0]]);
        let new_t = UniPoly::from_coeffs(k, vec![m[3], m[2]]);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for block in self.blocks() {
            let d = block.len();
            let mut acc = UniPoly::zero();
            for (gamma, c) in block.iter().enumerate() {
                if *c == Fe(0) {
                    continue;
                }
                let term = new_s.pow(gamma as u32, k).mul(&new_t.pow((d - 1 - gamma) as u32, k), k);
                acc = acc.add(&term.scale(c, k), k);
            }
            let mut c = acc.into_coeffs();
            c.resize(d, Fe(0));
            coeffs.extend(c);
        }
        Section::new(&self.surface, self.bidegree, coeffs)
    }

    /// The binary form `g_beta(s, t)` as coefficients of `s^gamma t^(d - gamma)`.
    pub fn block(&self, beta: u32) -> Vec<Fe> {
        let mut out = Vec::new();
        let mut offset = 0;
        for b in 0..=self.bidegree.i.max(-1) {
            let Some(d) = block_degree(self.surface.a, self.bidegree, b) else { continue };
            if b == beta as i64 {
                out.extend_from_slice(&self.coeffs[offset..offset + d as usize + 1]);
                return out;
            }
            offset += d as usize + 1;
        }
        out
    }

    /// All blocks `g_0, ..., g_i` (empty vectors for empty blocks).
    pub fn blocks(&self) -> Vec<Vec<Fe>> {
        let mut out = Vec::new();
        let mut offset = 0;
        for b in 0..=self.bidegree.i.max(-1) {
            match block_degree(self.surface.a, self.bidegree, b) {
                Some(d) => {
                    out.push(self.coeffs[offset..offset + d as usize + 1].to_vec());
                    offset += d as usize + 1;
                }
                None => out.push(Vec::new()),
            }
        }
        out
    }

    /// Dehomogenization on a base chart: `g_beta(s, 1)` for [`Chart::T`] or
    /// `g_beta(1, t)` for [`Chart::S`], as polynomials in the chart variable.
    pub fn block_polys(&self, chart: Chart) -> Vec<UniPoly<Fe>> {
        self.blocks()
            .into_iter()
            .map(|g| match chart {
                Chart::T => UniPoly::new(g),
                Chart::S => UniPoly::new(g.into_iter().rev().collect()),
            })
            .collect()
    }

    /// The affine chart `y = 1` over a base chart, as a polynomial in
    /// `u = x` with coefficients in the base variable.
    pub fn chart_poly(&self, chart: Chart) -> BiPoly {
        let i = self.bidegree.i.max(0) as usize;
        let blocks = self.block_polys(chart);
        let mut c = vec![UniPoly::zero(); i + 1];
        for (beta, g) in blocks.into_iter().enumerate() {
            c[i - beta] = g;
        }
        BiPoly::new(c)
    }

    /// Evaluates at Cox coordinates over an extension field.
    pub fn eval_ext(&self, ext: &Extension, pt: &[Fe; 4]) -> Fe {
        let big = &ext.field;
        let pows: Vec<Vec<Fe>> = pt.iter().map(|c| power_table(big, c, self.max_exponent())).collect();
        let mut acc = Fe(0);
        for (c, m) in self.terms() {
            let v = big.mul(
                &big.mul(&pows[0][m.alpha as usize], &pows[1][m.beta as usize]),
                &big.mul(&pows[2][m.gamma as usize], &pows[3][m.delta as usize]),
            );
            acc = big.add(&acc, &big.mul(&ext.embed(c), &v));
        }
        acc
    }

    pub fn eval(&self, pt: &[Fe; 4]) -> Fe {
        let ext = gf::ext_field(self.field(), 1).expect("degree one");
        self.eval_ext(&ext, pt)
    }

    /// The section and its four Cox partials at a point.
    pub fn eval_with_partials(&self, ext: &Extension, pt: &[Fe; 4]) -> [Fe; 5] {
        let big = &ext.field;
        let pows: Vec<Vec<Fe>> = pt.iter().map(|c| power_table(big, c, self.max_exponent())).collect();
        let mut out = [Fe(0); 5];
        for (c, m) in self.terms() {
            let c = ext.embed(c);
            let e = [m.alpha, m.beta, m.gamma, m.delta];
            let full = (0..4).fold(c, |acc, v| big.mul(&acc, &pows[v][e[v] as usize]));
            out[0] = big.add(&out[0], &full);
            for v in 0..4 {
                if e[v] == 0 {
                    continue;
                }
                let factor = big.from_int(e[v] as u64);
                if factor == Fe(0) {
                    continue;
                }
                let mut term = big.mul(&c, &factor);
                for w in 0..4 {
                    let exp = if w == v { e[w] - 1 } else { e[w] };
                    term = big.mul(&term, &pows[w][exp as usize]);
                }
                out[v + 1] = big.add(&out[v + 1], &term);
            }
        }
        out
    }

    fn max_exponent(&self) -> usize {
        let i = self.bidegree.i.max(0) as usize;
        let j = (self.bidegree.j + self.surface.a as i64 * self.bidegree.i).max(self.bidegree.j).max(0) as usize;
        i.max(j)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SectionDoc {
            a: self.surface.a,
            q: self.surface.q() as u64,
            i: self.bidegree.i,
            j: self.bidegree.j,
            coeffs: self.coeffs.iter().map(|c| c.0).collect(),
        })
        .expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: SectionDoc = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        let surface = Surface::over(doc.a, doc.q)?;
        Section::new(&surface, Bidegree::new(doc.i, doc.j), doc.coeffs.into_iter().map(Fe).collect())
    }
}

fn power_table(k: &FieldCtx, x: &Fe, n: usize) -> Vec<Fe> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Fe(1);
    for _ in 0..=n {
        out.push(acc);
        acc = k.mul(&acc, x);
    }
    out
}

/// Uniformly random section from a ChaCha8 stream keyed by `seed`.
pub fn random_section(surface: &Surface, b: Bidegree, seed: u64) -> Result<Section> {
    random_section_indexed(surface, b, seed, 0)
}

/// As [`random_section`], drawing from stream `index` of the seed, so that
/// sample `index` of a run is reproducible on its own.
pub fn random_section_indexed(surface: &Surface, b: Bidegree, seed: u64, index: u64) -> Result<Section> {
    let dim = section_dimension(surface.a, b);
    if dim == 0 {
        return Err(Error::EmptyBasis(b.i, b.j));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let q = surface.q();
    let coeffs = (0..dim).map(|_| Fe(rng.gen_range(0..q))).collect();
    Ok(Section { surface: surface.clone(), bidegree: b, coeffs })
}

/// Which base coordinate is set to one when trivializing near a fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chart {
    /// `t = 1`; the fiber is `r(s) = 0` with `r` monic in `s`.
    T,
    /// `s = 1`; only used for the fiber `t = 0`, with `r = t`.
    S,
}

/// A closed point of the base `P^1`, i.e. a fiber of the ruling.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClosedFiber {
    chart: Chart,
    /// Monic irreducible in the chart variable.
    r: UniPoly<Fe>,
}

impl ClosedFiber {
    /// The fiber `r(s, 1) = 0` for a monic irreducible `r`.
    pub fn finite(field: &FieldCtx, r: &UniPoly<Fe>) -> Result<Self> {
        if !r.is_monic(field) || !poly::is_irreducible(r, field) {
            return Err(Error::NotIrreducible);
        }
        Ok(ClosedFiber { chart: Chart::T, r: r.clone() })
    }

    pub(crate) fn finite_unchecked(r: UniPoly<Fe>) -> Self {
        ClosedFiber { chart: Chart::T, r }
    }

    /// The fiber `t = 0`.
    pub fn at_infinity() -> Self {
        ClosedFiber { chart: Chart::S, r: UniPoly::from_u32(&[0, 1]) }
    }

    /// The fiber `s = 0`.
    pub fn at_zero() -> Self {
        ClosedFiber::finite_unchecked(UniPoly::from_u32(&[0, 1]))
    }

    /// From an irreducible binary form `r(s, t)`; coefficient `i` multiplies
    /// `s^i t^(e - i)`.
    pub fn from_form(field: &FieldCtx, form: &BinaryForm<Fe>) -> Result<Self> {
        let e = form.degree();
        let f = form.dehomogenize(field);
        if f.deg() == e as i64 {
            ClosedFiber::finite(field, &f.monic(field))
        } else if e == 1 && f.deg() == 0 {
            Ok(ClosedFiber::at_infinity())
        } else {
            Err(Error::NotIrreducible)
        }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn modulus(&self) -> &UniPoly<Fe> {
        &self.r
    }

    pub fn degree(&self) -> usize {
        self.r.deg() as usize
    }

    /// `r(s, t)` as a binary form in `(s, t)`.
    pub fn form(&self, field: &FieldCtx) -> BinaryForm<Fe> {
        match self.chart {
            Chart::T => BinaryForm::homogenize(field, &self.r, self.degree()).unwrap(),
            Chart::S => BinaryForm::new(field, 1, vec![Fe(1), Fe(0)]).unwrap(),
        }
    }

    pub fn residue_field(&self, field: &FieldCtx) -> QuotientField {
        QuotientField::new_unchecked(field, &self.r)
    }

    /// All closed fibers of degree `e`, sorted.
    pub fn all_of_degree(field: &FieldCtx, e: usize) -> Result<Vec<ClosedFiber>> {
        let q = field.q() as u128;
        let count = q.checked_pow(e as u32).filter(|&n| n <= POINT_CAP).ok_or_else(|| Error::cap(format!("{q}^{e} monic polynomials"), POINT_CAP))?;
        let mut out = Vec::new();
        if e == 1 {
            out.push(ClosedFiber::at_infinity());
        }
        for idx in 0..count {
            let mut c: Vec<Fe> = (0..e).map(|i| Fe(((idx / q.pow(i as u32)) % q) as u32)).collect();
            c.push(Fe(1));
            let r = UniPoly::new(c);
            if poly::is_irreducible(&r, field) {
                out.push(ClosedFiber::finite_unchecked(r));
            }
        }
        out.sort();
        Ok(out)
    }
}

/// Restriction of a section to a doubled fiber: `F1 = f mod r` and
/// `F2 = (f - lift(F1)) / r mod r`, as binary forms in `(x, y)` over the
/// residue field `L = F_q[s]/(r)`.
///
/// `lift` is the ring embedding `L -> F_q[s]/(r^2)` sending `s` to the Newton
/// lift `s - r/r'`, not the representative of degree `< e`. For `e >= 2` only
/// the ring embedding makes goodness of `(F1, F2)` match smoothness of the
/// curve along the fiber. In terms of `f = r1 + r q1` with `deg r1 < e` this
/// is `F2 = q1 + r1' / r' mod r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberJet {
    pub fiber: ClosedFiber,
    pub f1: BinaryForm<Vec<Fe>>,
    pub f2: BinaryForm<Vec<Fe>>,
}

impl FiberJet {
    pub fn residue_field(&self, base: &FieldCtx) -> QuotientField {
        self.fiber.residue_field(base)
    }
}

/// See [`FiberJet`]. The form variables are `u = x` and `v = y`.
pub fn restrict_to_fiber_jet(section: &Section, fiber: &ClosedFiber) -> Result<FiberJet> {
    let b = section.bidegree;
    if b.i < 0 {
        return Err(Error::InvalidParameter(format!("bidegree {b:?} has negative fiber degree")));
    }
    let k = section.field();
    let res = fiber.residue_field(k);
    let i = b.i as usize;
    let w = newton_weight(&res, fiber);
    let mut f1 = vec![res.zero(); i + 1];
    let mut f2 = vec![res.zero(); i + 1];
    for (beta, g) in section.block_polys(fiber.chart).into_iter().enumerate() {
        let (q1, r1) = g.divrem(&fiber.r, k);
        f1[i - beta] = res.reduce(&r1);
        f2[i - beta] = res.reduce(&q1);
        if let Some(w) = &w {
            let d = res.mul(w, &res.reduce(&r1.derivative(k)));
            f2[i - beta] = res.add(&f2[i - beta], &d);
        }
    }
    Ok(FiberJet {
        fiber: fiber.clone(),
        f1: BinaryForm::new(&res, i, f1)?,
        f2: BinaryForm::new(&res, i, f2)?,
    })
}

/// `1 / r' mod r`, or `None` for a fiber of degree one where the
/// correction vanishes.
fn newton_weight(res: &QuotientField, fiber: &ClosedFiber) -> Option<Vec<Fe>> {
    if fiber.degree() < 2 {
        return None;
    }
    let dr = res.reduce(&fiber.r.derivative(res.base()));
    Some(res.inv(&dr).expect("irreducible over a finite field is separable"))
}

/// Inverse of restriction on jets: the section of bidegree `(i, j)` whose
/// blocks are `lift(F1) + r lift(F2)` with the lift of [`FiberJet`], defined
/// when every block has degree at least `2e - 1`. Used to check that
/// restriction is onto.
pub fn jet_to_section(surface: &Surface, b: Bidegree, jet: &FiberJet) -> Result<Section> {
    let k = surface.field();
    let res = jet.fiber.residue_field(k);
    let i = b.i as usize;
    let w = newton_weight(&res, &jet.fiber);
    let mut coeffs = Vec::new();
    for beta in 0..=i {
        let Some(d) = block_degree(surface.a, b, beta as i64) else { continue };
        let r1 = res.lift(&jet.f1.coeffs()[i - beta]);
        let mut q1 = jet.f2.coeffs()[i - beta].clone();
        if let Some(w) = &w {
            q1 = res.sub(&q1, &res.mul(w, &res.reduce(&r1.derivative(k))));
        }
        let g = r1.add(&jet.fiber.r.mul(&res.lift(&q1), k), k);
        if g.deg() > d as i64 {
            return Err(Error::InvalidParameter("block degree too small to realize the jet".into()));
        }
        let mut c = g.into_coeffs();
        c.resize(d as usize + 1, Fe(0));
        if jet.fiber.chart == Chart::S {
            c.reverse();
        }
        coeffs.extend(c);
    }
    Section::new(surface, b, coeffs)
}

/// Normalized Cox coordinates `(x, y, s, t)` of the `F_{q^e}`-points of the
/// surface: `(s : t)` is `(s0, 1)` or `(1, 0)` and `(x : y)` is `(x0, 1)` or
/// `(1, 0)`, one representative per torus orbit.
pub fn rational_points(surface: &Surface, e: u32) -> Result<(Extension, Vec<[Fe; 4]>)> {
    let total = surface
        .kind()
        .rational_point_count(surface.q() as u64, e)
        .filter(|&n| n <= POINT_CAP)
        .ok_or_else(|| Error::cap(format!("points of F_{} over degree {e}", surface.a), POINT_CAP))?;
    let ext = gf::ext_field(surface.field(), e)?;
    let big = &ext.field;
    let line: Vec<(Fe, Fe)> = big.elements().map(|c| (c, Fe(1))).chain(std::iter::once((Fe(1), Fe(0)))).collect();
    let mut pts = Vec::with_capacity(total as usize);
    for &(s, t) in &line {
        for &(x, y) in &line {
            pts.push([x, y, s, t]);
        }
    }
    Ok((ext, pts))
}
