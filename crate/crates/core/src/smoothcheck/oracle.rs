//! Independent smoothness oracles from the Jacobian criterion.
//!
//! A point of `F_a` is singular on `f = 0` iff `f` and its four Cox
//! partials vanish there (the two Euler relations make this equivalent to
//! the affine Jacobian criterion on any chart). [`brute_force_is_smooth`]
//! checks every closed point up to a degree; [`jacobian_is_smooth`]
//! decides emptiness of the singular scheme on the four standard affine
//! charts by Groebner bases, with no degree bound at all.

use super::groebner::{groebner_basis, is_unit_ideal, quotient_dimension, GPoly};
use crate::error::{Error, Result};
use crate::gf::{Fe, FieldCtx};
use crate::hirzebruch::{rational_points, Section};

/// The section on the affine chart where the two named Cox variables are
/// one, as a polynomial in the remaining fiber and base variables.
/// `fiber_y`: chart `y = 1` (variable `x`), else `x = 1` (variable `y`);
/// `base_t`: chart `t = 1` (variable `s`), else `s = 1` (variable `t`).
pub(crate) fn chart(section: &Section, fiber_y: bool, base_t: bool) -> GPoly {
    let k = section.field();
    let raw = section
        .terms()
        .map(|(c, m)| {
            let u = if fiber_y { m.alpha } else { m.beta };
            let s = if base_t { m.gamma } else { m.delta };
            ((u, s), c)
        })
        .collect();
    GPoly::from_terms(k, raw)
}

fn jacobian_bases(section: &Section) -> Vec<Vec<GPoly>> {
    let k: &FieldCtx = section.field();
    let mut out = Vec::new();
    for fiber_y in [true, false] {
        for base_t in [true, false] {
            let f = chart(section, fiber_y, base_t);
            out.push(groebner_basis(&[f.clone(), f.d_u(k), f.d_s(k)], k));
        }
    }
    out
}

/// True iff the curve has no singular point over the algebraic closure.
pub fn jacobian_is_smooth(section: &Section) -> Result<bool> {
    if section.is_zero() {
        return Err(Error::ZeroSection);
    }
    Ok(jacobian_bases(section).iter().all(|gb| is_unit_ideal(gb)))
}

/// [`jacobian_is_smooth`] and [`complete_e_max`] from one set of bases.
pub fn jacobian_verdict(section: &Section) -> Result<(bool, Option<u32>)> {
    if section.is_zero() {
        return Err(Error::ZeroSection);
    }
    let bases = jacobian_bases(section);
    let smooth = bases.iter().all(|gb| is_unit_ideal(gb));
    let mut best = Some(0);
    for gb in &bases {
        best = match (best, quotient_dimension(gb)) {
            (Some(b), Some(d)) => Some(b.max(d as u32)),
            _ => None,
        };
    }
    Ok((smooth, best))
}

/// An upper bound on the degree of any singular closed point: the largest
/// length of the singular scheme on a chart. `None` when the singular
/// locus is positive dimensional (a repeated component).
pub fn complete_e_max(section: &Section) -> Result<Option<u32>> {
    if section.is_zero() {
        return Err(Error::ZeroSection);
    }
    let mut best = 0;
    for gb in jacobian_bases(section) {
        match quotient_dimension(&gb) {
            None => return Ok(None),
            Some(d) => best = best.max(d as u32),
        }
    }
    Ok(Some(best))
}

/// True iff the curves `f = 0` and `h = 0` share a component.
pub fn share_component(f: &Section, h: &Section) -> Result<bool> {
    if f.is_zero() || h.is_zero() {
        return Err(Error::ZeroSection);
    }
    let k = f.field();
    for fiber_y in [true, false] {
        for base_t in [true, false] {
            let gb = groebner_basis(&[chart(f, fiber_y, base_t), chart(h, fiber_y, base_t)], k);
            if quotient_dimension(&gb).is_none() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// True iff the scheme `f = h = 0` is singular somewhere over the
/// algebraic closure: some common point where the differentials are
/// dependent. Curves sharing a component count as singular.
pub fn intersection_is_singular(f: &Section, h: &Section) -> Result<bool> {
    if f.is_zero() || h.is_zero() {
        return Err(Error::ZeroSection);
    }
    let k = f.field();
    for fiber_y in [true, false] {
        for base_t in [true, false] {
            let (a, b) = (chart(f, fiber_y, base_t), chart(h, fiber_y, base_t));
            let jac = a.d_u(k).mul(&b.d_s(k), k).sub(&a.d_s(k).mul(&b.d_u(k), k), k);
            if !is_unit_ideal(&groebner_basis(&[a, b, jac], k)) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Checks every closed point of degree at most `e_max` by enumerating the
/// `F_{q^e}`-points for `e = 1..=e_max`.
pub fn brute_force_is_smooth(section: &Section, e_max: u32) -> Result<bool> {
    if section.is_zero() {
        return Err(Error::ZeroSection);
    }
    for e in 1..=e_max {
        let (ext, pts) = rational_points(section.surface(), e)?;
        if pts.iter().any(|pt| section.eval_with_partials(&ext, pt).iter().all(|v| *v == Fe(0))) {
            return Ok(false);
        }
    }
    Ok(true)
}
