//! Exact smoothness decisions for curves on `F_a`.
//!
//! A curve is smooth along the fiber over a closed point `r` exactly when
//! its doubled-fiber jet `(F1, F2)` is a good pair: `F1 != 0` and no
//! multiple root of `F1` is a root of `F2`. [`singular_fibers`] finds the
//! finitely many fibers where this can fail from discriminant-type
//! resultants and tests each; [`oracle`] decides the same question from
//! the Jacobian criterion without looking at fibers.

mod groebner;
pub mod oracle;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{self, Fe, FieldCtx};
use crate::hirzebruch::{rational_points, restrict_to_fiber_jet, Chart, ClosedFiber, FiberJet, Section};
use crate::poly::{self, BiPoly, BinaryForm, UniPoly};

pub use oracle::{brute_force_is_smooth, complete_e_max, intersection_is_singular, jacobian_is_smooth, jacobian_verdict, share_component};

/// Fibers of residue degree up to this many bits get witness points.
pub const WITNESS_FIELD_BITS: u32 = 12;

/// Good-pair test on forms over any field.
pub fn is_good_pair_forms<F: Field>(k: &F, f1: &BinaryForm<F::Elem>, f2: &BinaryForm<F::Elem>) -> bool {
    let Ok(locus) = f1.multiple_root_locus(k) else {
        return false;
    };
    if locus.degree() == 0 {
        return true;
    }
    locus.gcd(f2, k).degree() == 0
}

/// Whether the jet is a good pair, i.e. the curve is smooth at every point
/// of the fiber.
pub fn is_good_pair(base: &FieldCtx, jet: &FiberJet) -> bool {
    if jet.fiber.degree() == 1 {
        // F_q[s]/(s - c) is F_q itself
        let f1 = jet.f1.map(|c| c[0]);
        let f2 = jet.f2.map(|c| c[0]);
        is_good_pair_forms(base, &f1, &f2)
    } else {
        is_good_pair_forms(&jet.residue_field(base), &jet.f1, &jet.f2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Smooth,
    Singular,
    NonReduced,
}

/// A singular point in normalized Cox coordinates over `F_{q^degree}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub degree: u32,
    pub point: [u32; 4],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothnessReport {
    pub verdict: Verdict,
    pub fibers: Vec<ClosedFiber>,
    pub witnesses: Vec<Witness>,
}

#[derive(Serialize)]
struct FiberDoc {
    chart: Chart,
    degree: usize,
    modulus: Vec<u32>,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    verdict: Verdict,
    fibers: Vec<FiberDoc>,
    witnesses: &'a [Witness],
}

impl SmoothnessReport {
    pub fn is_smooth(&self) -> bool {
        self.verdict == Verdict::Smooth
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = ReportDoc {
            verdict: self.verdict,
            fibers: self
                .fibers
                .iter()
                .map(|f| FiberDoc { chart: f.chart(), degree: f.degree(), modulus: f.modulus().coeffs().iter().map(|c| c.0).collect() })
                .collect(),
            witnesses: &self.witnesses,
        };
        serde_json::to_value(doc).expect("plain data serializes")
    }
}

fn fibers_of(k: &FieldCtx, f: &UniPoly<Fe>, out: &mut BTreeSet<ClosedFiber>) {
    if f.is_zero() || f.is_constant() {
        return;
    }
    for (g, _) in poly::factor(f, k).expect("nonzero") {
        out.insert(ClosedFiber::finite_unchecked(g));
    }
}

/// Base polynomials whose roots contain the base coordinate of every
/// singular point of `V(f)` in the chart. `f` must be primitive and
/// squarefree of positive `u`-degree.
fn candidate_polys(f: &BiPoly, k: &FieldCtx, out: &mut Vec<UniPoly<Fe>>) {
    if f.deg_u() < 1 {
        return;
    }
    let fu = f.d_u(k);
    if fu.is_zero() {
        // f is a polynomial in u^p; singular points satisfy f = f_s = 0
        out.push(f.resultant_u(&f.d_s(k), k));
        return;
    }
    let r = f.resultant_u(&fu, k);
    if !r.is_zero() {
        // a singular point over s0 is also a common root of f and f_s there
        let rs = f.resultant_u(&f.d_s(k), k);
        out.push(if rs.is_zero() { r } else { r.gcd(&rs, k) });
        return;
    }
    // f and f_u share a factor h with h_u = 0; split it off
    let h = f.gcd(&fu, k);
    let rest = f.div_exact(&h, k).expect("gcd divides");
    out.push(h.resultant_u(&rest, k));
    candidate_polys(&h, k, out);
    candidate_polys(&rest, k, out);
}

/// Content fibers with multiplicity: the common factor of all blocks.
fn content_factors(section: &Section) -> Vec<(ClosedFiber, u32)> {
    let k = section.field();
    let mut content: Option<BinaryForm<Fe>> = None;
    for block in section.blocks() {
        if block.is_empty() {
            continue;
        }
        let form = BinaryForm::new(k, block.len() - 1, block).expect("sized");
        content = Some(match content {
            None => form,
            Some(c) => c.gcd(&form, k),
        });
    }
    let Some(c) = content else { return Vec::new() };
    if c.is_zero(k) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let at_inf = c.multiplicity_at_infinity(k).unwrap();
    if at_inf > 0 {
        out.push((ClosedFiber::at_infinity(), at_inf as u32));
    }
    let f = c.dehomogenize(k);
    if !f.is_constant() {
        for (g, m) in poly::factor(&f, k).expect("nonzero") {
            out.push((ClosedFiber::finite_unchecked(g), m));
        }
    }
    out
}

/// Whether the section has a repeated factor (content fibers excluded).
fn has_repeated_component(section: &Section, k: &FieldCtx) -> bool {
    let blocks = section.block_polys(Chart::T);
    let zero_block = |b: usize| blocks.get(b).is_none_or(|g| g.is_zero());
    if zero_block(0) && zero_block(1) {
        // y^2 divides
        return true;
    }
    let f = section.chart_poly(Chart::T).primitive_part(k);
    if f.deg_u() < 1 {
        return false;
    }
    let g = f.gcd(&f.d_u(k).gcd(&f.d_s(k), k), k);
    g.deg_u() >= 1
}

/// Fiberwise smoothness decision. See the module docs.
///
/// For `non_reduced` verdicts only fibers contained in the curve are
/// listed, since the repeated component meets every fiber.
pub fn singular_fibers(section: &Section) -> Result<SmoothnessReport> {
    let (verdict, fibers) = decide(section, false)?;
    let witnesses = match verdict {
        Verdict::Singular => fibers.iter().flat_map(|f| witnesses_on(section, f)).collect(),
        _ => Vec::new(),
    };
    Ok(SmoothnessReport { verdict, fibers, witnesses })
}

/// The verdict of [`singular_fibers`] alone, stopping at the first bad fiber.
pub fn smoothness_verdict(section: &Section) -> Result<Verdict> {
    Ok(decide(section, true)?.0)
}

fn decide(section: &Section, first_only: bool) -> Result<(Verdict, Vec<ClosedFiber>)> {
    let b = section.bidegree();
    if b.i < 0 {
        return Err(Error::InvalidParameter(format!("fiber degree {} is negative", b.i)));
    }
    if section.is_zero() {
        return Err(Error::ZeroSection);
    }
    let k = section.field();
    let content = content_factors(section);
    if b.i == 0 {
        // a union of fibers, smooth exactly when they are distinct
        if content.iter().any(|(_, m)| *m >= 2) {
            return Ok((Verdict::NonReduced, content.into_iter().filter(|(_, m)| *m >= 2).map(|(f, _)| f).collect()));
        }
        return Ok((Verdict::Smooth, Vec::new()));
    }
    if content.iter().any(|(_, m)| *m >= 2) || has_repeated_component(section, k) {
        return Ok((Verdict::NonReduced, content.into_iter().map(|(f, _)| f).collect()));
    }

    let mut candidates: BTreeSet<ClosedFiber> = content.into_iter().map(|(f, _)| f).collect();
    candidates.insert(ClosedFiber::at_infinity());

    // points on the section y = 0: g_0 = g_0' = g_1 = 0 there
    let blocks = section.block_polys(Chart::T);
    let g0 = blocks[0].clone();
    let g1 = blocks.get(1).cloned().unwrap_or_else(UniPoly::zero);
    let along_y = g0.gcd(&g0.derivative(k), k).gcd(&g1, k);
    fibers_of(k, &along_y, &mut candidates);

    // points with y != 0 over t != 0
    let f = section.chart_poly(Chart::T).primitive_part(k);
    let mut polys = Vec::new();
    candidate_polys(&f, k, &mut polys);
    for r in &polys {
        fibers_of(k, r, &mut candidates);
    }

    let mut fibers = Vec::new();
    for fiber in candidates {
        let jet = restrict_to_fiber_jet(section, &fiber)?;
        if !is_good_pair(k, &jet) {
            fibers.push(fiber);
            if first_only {
                break;
            }
        }
    }
    let verdict = if fibers.is_empty() { Verdict::Smooth } else { Verdict::Singular };
    Ok((verdict, fibers))
}

/// Singular points on the fiber defined over its residue field, when that
/// field is small.
fn witnesses_on(section: &Section, fiber: &ClosedFiber) -> Vec<Witness> {
    let k = section.field();
    let e = fiber.degree() as u32;
    if (k.q() as f64).log2() * e as f64 > WITNESS_FIELD_BITS as f64 {
        return Vec::new();
    }
    let Ok(ext) = gf::ext_field(k, e) else { return Vec::new() };
    let big = &ext.field;
    let base_pts: Vec<(Fe, Fe)> = match fiber.chart() {
        Chart::S => vec![(Fe(1), Fe(0))],
        Chart::T => {
            let r = fiber.modulus().map(big, |c| ext.embed(*c));
            // one representative of the Galois orbit suffices
            big.elements().filter(|x| r.eval(x, big) == Fe(0)).take(1).map(|x| (x, Fe(1))).collect()
        }
    };
    let mut out = Vec::new();
    for (s, t) in base_pts {
        let fiber_pts = big.elements().map(|x| (x, Fe(1))).chain(std::iter::once((Fe(1), Fe(0))));
        for (x, y) in fiber_pts {
            let pt = [x, y, s, t];
            if section.eval_with_partials(&ext, &pt).iter().all(|v| *v == Fe(0)) {
                out.push(Witness { degree: e, point: pt.map(|c| c.0) });
            }
        }
    }
    out
}

/// Number of `F_{q^e}`-points on the zero locus.
pub fn count_points(section: &Section, e: u32) -> Result<u64> {
    if section.is_zero() {
        return Err(Error::ZeroSection);
    }
    let (ext, pts) = rational_points(section.surface(), e)?;
    Ok(pts.iter().filter(|pt| section.eval_ext(&ext, pt) == Fe(0)).count() as u64)
}

/// `F_q`-points, from the jets at degree-one fibers: the roots of `F1`
/// on each rational fiber.
pub fn count_rational_points(section: &Section) -> Result<u64> {
    if section.is_zero() {
        return Err(Error::ZeroSection);
    }
    let k = section.field();
    let mut total = 0u64;
    for fiber in ClosedFiber::all_of_degree(k, 1)? {
        let jet = restrict_to_fiber_jet(section, &fiber)?;
        let f1 = jet.f1.map(|c| c[0]);
        total += projective_root_count(k, &f1);
    }
    Ok(total)
}

/// Number of distinct `P^1(F_q)` roots of a binary form; `q + 1` for zero.
pub fn projective_root_count(k: &FieldCtx, f: &BinaryForm<Fe>) -> u64 {
    match f.multiplicity_at_infinity(k) {
        None => k.q() as u64 + 1,
        Some(m) => poly::roots(&f.dehomogenize(k), k).len() as u64 + u64::from(m > 0),
    }
}
