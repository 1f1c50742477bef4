//! A small-scale version of the anti-Bertini construction on `P^1 x P^1`:
//! a smooth curve `X` made to contain prescribed closed points of one
//! fiber and to be tangent there to prescribed curves `H_i`, so that every
//! `X ∩ H_i` is singular.
//!
//! The full construction enumerates every `H_i` up to a large bidegree.
//! Here the list is cut off after a constraint budget, and the resulting
//! property of `X` is only checked on a finite window of bidegrees.

use num_bigint::BigInt;
use num_integer::binomial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{self, Extension, Fe, FieldCtx};
use crate::hirzebruch::{section_basis, section_dimension, Bidegree, Chart, ClosedFiber, Section, Surface};
use crate::smoothcheck::{intersection_is_singular, jacobian_is_smooth, share_component, smoothness_verdict, Verdict};
use crate::stabmap::GFMatrix;

/// Largest number of curves [`verify_window`] enumerates per bidegree.
pub const WINDOW_CAP: u128 = 1 << 16;

/// A closed point of `P^1 x P^1`, given by one `F_{q^e}`-point of its
/// Galois orbit in normalized Cox coordinates `(x, y, s, t)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedPoint {
    degree: u32,
    coords: [Fe; 4],
}

impl ClosedPoint {
    /// Checks that each coordinate pair is `(c, 1)` or `(1, 0)` and that
    /// the orbit under Frobenius has exactly `degree` points.
    pub fn new(field: &FieldCtx, degree: u32, coords: [Fe; 4]) -> Result<Self> {
        let ext = gf::ext_field(field, degree)?;
        let big = &ext.field;
        for pair in [[coords[0], coords[1]], [coords[2], coords[3]]] {
            let ok = pair[1] == Fe(1) && (pair[0].0 as u128) < big.order().unwrap_or(0) || pair == [Fe(1), Fe(0)];
            if !ok {
                return Err(Error::InvalidParameter(format!("coordinates {pair:?} are not normalized")));
            }
        }
        let q = field.q() as u128;
        let frob = |c: &[Fe; 4]| c.map(|v| big.pow(&v, q));
        let mut orbit = 1;
        let mut cur = frob(&coords);
        while cur != coords {
            orbit += 1;
            cur = frob(&cur);
        }
        if orbit != degree {
            return Err(Error::InvalidParameter(format!("point has degree {orbit}, not {degree}")));
        }
        Ok(ClosedPoint { degree, coords })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coords(&self) -> [Fe; 4] {
        self.coords
    }

    fn ext(&self, field: &FieldCtx) -> Extension {
        gf::ext_field(field, self.degree).expect("checked at construction")
    }

    /// Value and the two chart derivatives of a section at the point, in
    /// `F_{q^e}`.
    pub fn jet(&self, section: &Section) -> [Fe; 3] {
        let ext = self.ext(section.field());
        let v = section.eval_with_partials(&ext, &self.coords);
        let du = if self.coords[1] == Fe(1) { v[1] } else { v[2] };
        let ds = if self.coords[3] == Fe(1) { v[3] } else { v[4] };
        [v[0], du, ds]
    }
}

/// Closed points of the fiber `s = 0` of degree at most `max_degree`, one
/// per orbit, ordered by degree.
pub fn fiber_points(field: &FieldCtx, max_degree: u32) -> Result<Vec<ClosedPoint>> {
    let mut out = vec![ClosedPoint::new(field, 1, [Fe(1), Fe(0), Fe(0), Fe(1)])?];
    for e in 1..=max_degree {
        let ext = gf::ext_field(field, e)?;
        let big = &ext.field;
        for fiber in ClosedFiber::all_of_degree(field, e as usize)?.into_iter().filter(|f| f.chart() == Chart::T) {
            let r = fiber.modulus().map(big, |c| ext.embed(*c));
            let root = big.elements().find(|x| r.eval(x, big) == Fe(0)).expect("irreducible splits");
            out.push(ClosedPoint::new(field, e, [root, Fe(1), Fe(0), Fe(1)])?);
        }
    }
    out.sort_by_key(|p| p.degree);
    Ok(out)
}

/// A linear condition on the coefficients of `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TangencyConstraint {
    /// `X` passes through the point.
    Contains(ClosedPoint),
    /// `X` and `target` have the same first-order jet at the point.
    Tangent { point: ClosedPoint, target: Section },
}

impl TangencyConstraint {
    pub fn point(&self) -> &ClosedPoint {
        match self {
            TangencyConstraint::Contains(p) | TangencyConstraint::Tangent { point: p, .. } => p,
        }
    }

    /// Required jet entries: `(index, value)` pairs over `F_{q^e}`.
    fn targets(&self) -> Vec<(usize, Fe)> {
        match self {
            TangencyConstraint::Contains(_) => vec![(0, Fe(0))],
            TangencyConstraint::Tangent { point, target } => point.jet(target).into_iter().enumerate().collect(),
        }
    }

    /// Exact re-check on a section.
    pub fn holds(&self, section: &Section) -> bool {
        let jet = self.point().jet(section);
        self.targets().into_iter().all(|(i, v)| jet[i] == v)
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            TangencyConstraint::Contains(p) => serde_json::json!({ "kind": "contains", "point": p }),
            TangencyConstraint::Tangent { point, target } => serde_json::json!({
                "kind": "tangent",
                "point": point,
                "target": serde_json::from_str::<serde_json::Value>(&target.to_json()).expect("valid json"),
            }),
        }
    }
}

fn require_prime(field: &FieldCtx) -> Result<()> {
    if field.k() != 1 {
        return Err(Error::InvalidParameter(format!("tangency systems need a prime field, got F_{}", field.q())));
    }
    Ok(())
}

/// The affine system `[M | b]` cutting out the sections of bidegree `b`
/// meeting every constraint. Each `F_{q^e}` condition contributes its `e`
/// coordinates over the prime field.
pub fn tangency_system(surface: &Surface, b: Bidegree, constraints: &[TangencyConstraint]) -> Result<GFMatrix> {
    let k = surface.field();
    require_prime(k)?;
    for (i, c) in constraints.iter().enumerate() {
        if constraints[..i].iter().any(|o| o.point() == c.point()) {
            return Err(Error::InvalidParameter("constraint points must be distinct".into()));
        }
    }
    let basis = section_basis(surface, b);
    if basis.is_empty() {
        return Err(Error::EmptyBasis(b.i, b.j));
    }
    let monomials: Vec<Section> = basis.iter().map(|m| Section::from_terms(surface, b, &[(Fe(1), *m)])).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (ci, c) in constraints.iter().enumerate() {
        let p = c.point();
        let ext = p.ext(k);
        let jets: Vec<[Fe; 3]> = monomials.iter().map(|m| p.jet(m)).collect();
        for (i, v) in c.targets() {
            for digit in 0..p.degree as usize {
                let coord = |x: Fe| Fe(ext.field.coordinates(x)[digit]);
                let mut row: Vec<Fe> = jets.iter().map(|j| coord(j[i])).collect();
                row.push(coord(v));
                rows.push(row);
                labels.push(format!("c{ci}:jet{i}:{digit}"));
            }
        }
    }
    let mut m = GFMatrix::from_rows(k, basis.len() + 1, rows)?;
    m.row_labels = labels;
    m.col_labels = basis.iter().map(|c| format!("x^{}y^{}s^{}t^{}", c.alpha, c.beta, c.gamma, c.delta)).chain(["rhs".to_string()]).collect();
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    pub q: u64,
    /// `X` has bidegree `(k, k)`.
    pub k: i64,
    /// Targets `H_i` run over bidegrees `(j, j)` for `j = 1..=j_max`.
    pub j_max: i64,
    /// Number of targets to place.
    pub budget: usize,
    /// Largest degree of a constraint point.
    pub max_point_degree: u32,
    /// Random members of the solution space to try.
    pub trials: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntiBertiniCandidate {
    pub section: Section,
    pub constraints: Vec<TangencyConstraint>,
    /// Dimension of the affine solution space the candidate was drawn from.
    pub solution_dimension: usize,
}

impl AntiBertiniCandidate {
    /// Every constraint holds exactly and both smoothness tests pass.
    pub fn reverify(&self) -> Result<bool> {
        Ok(self.constraints.iter().all(|c| c.holds(&self.section))
            && smoothness_verdict(&self.section)? == Verdict::Smooth
            && jacobian_is_smooth(&self.section)?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "section": serde_json::from_str::<serde_json::Value>(&self.section.to_json()).expect("valid json"),
            "constraints": self.constraints.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            "solution_dimension": self.solution_dimension,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(AntiBertiniCandidate),
    NotFound { placed: usize, reason: String },
}

/// Nonzero sections of bidegree `b` up to scaling (first nonzero
/// coefficient one), in odometer order.
pub fn projective_sections(surface: &Surface, b: Bidegree) -> impl Iterator<Item = Section> + '_ {
    let dim = section_dimension(surface.a(), b);
    let q = surface.q() as u128;
    let total = q.checked_pow(dim as u32).unwrap_or(u128::MAX);
    (1..total).filter_map(move |idx| {
        let mut rest = idx;
        let coeffs: Vec<Fe> = (0..dim)
            .map(|_| {
                let c = Fe((rest % q) as u32);
                rest /= q;
                c
            })
            .collect();
        let lead = coeffs.iter().rev().find(|c| c.0 != 0)?;
        (lead.0 == 1).then(|| Section::new(surface, b, coeffs).expect("sized"))
    })
}

/// The constraint making `X ∩ H` singular at `p`: containment when `H`
/// is already singular there, tangency otherwise. `None` if `p` is not on
/// `H`.
fn constraint_for(h: &Section, p: &ClosedPoint) -> Option<TangencyConstraint> {
    let jet = p.jet(h);
    if jet[0] != Fe(0) {
        return None;
    }
    if jet[1] == Fe(0) && jet[2] == Fe(0) {
        return Some(TangencyConstraint::Contains(p.clone()));
    }
    Some(TangencyConstraint::Tangent { point: p.clone(), target: h.clone() })
}

/// Greedy placement of `budget` targets on distinct points of the fiber
/// `s = 0`, then a seeded random scan of the solutions for a smooth one.
pub fn search_anti_bertini(params: SearchParams, seed: u64) -> Result<SearchOutcome> {
    let surface = Surface::over(0, params.q)?;
    let k = surface.field().clone();
    require_prime(&k)?;
    if params.k < 1 {
        return Err(Error::InvalidParameter(format!("bidegree ({0}, {0}) has no smooth members", params.k)));
    }
    let xb = Bidegree::new(params.k, params.k);
    let points = fiber_points(&k, params.max_point_degree)?;
    let mut constraints: Vec<TangencyConstraint> = Vec::new();
    let targets = (1..=params.j_max).flat_map(|j| projective_sections(&surface, Bidegree::new(j, j)));
    for h in targets.take(params.budget) {
        let (mut placed, mut free) = (false, 0);
        for p in &points {
            if constraints.iter().any(|c| c.point() == p) {
                continue;
            }
            let Some(c) = constraint_for(&h, p) else { continue };
            free += 1;
            constraints.push(c);
            if tangency_system(&surface, xb, &constraints)?.solve_augmented().is_ok() {
                placed = true;
                break;
            }
            constraints.pop();
        }
        if !placed {
            let reason = if free == 0 {
                format!("target {} meets the fiber only at used points", constraints.len())
            } else {
                format!("target {} is inconsistent at all {free} free points", constraints.len())
            };
            return Ok(SearchOutcome::NotFound { placed: constraints.len(), reason });
        }
    }
    let (x0, kernel) = tangency_system(&surface, xb, &constraints)?.solve_augmented()?;
    let trial = |i: u64| -> Result<Option<Section>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let mut v = x0.clone();
        for basis in &kernel {
            let c = Fe(rng.gen_range(0..k.q()));
            for (a, b) in v.iter_mut().zip(basis) {
                *a = k.add(a, &k.mul(&c, b));
            }
        }
        let s = Section::new(&surface, xb, v)?;
        if s.is_zero() || smoothness_verdict(&s)? != Verdict::Smooth {
            return Ok(None);
        }
        Ok(Some(s))
    };
    let hit = (0..params.trials.max(1)).into_par_iter().map(trial).find_first(|r| !matches!(r, Ok(None)));
    match hit {
        Some(Ok(Some(section))) => {
            let cand = AntiBertiniCandidate { section, constraints, solution_dimension: kernel.len() };
            if !cand.reverify()? {
                return Err(Error::Malformed("candidate failed re-verification".into()));
            }
            Ok(SearchOutcome::Found(cand))
        }
        Some(Err(e)) => Err(e),
        _ => Ok(SearchOutcome::NotFound { placed: constraints.len(), reason: format!("no smooth member in {} trials", params.trials) }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowRow {
    pub n: i64,
    pub d: i64,
    /// Curves `H` up to scaling.
    pub curves: u64,
    /// Those containing `X`, which cut out no divisor.
    pub containing: u64,
    pub singular: u64,
}

impl WindowRow {
    pub fn all_singular(&self) -> bool {
        self.singular + self.containing == self.curves
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowReport {
    pub rows: Vec<WindowRow>,
}

impl WindowReport {
    /// True when every row was fully singular. This covers the window only.
    pub fn verified(&self) -> bool {
        self.rows.iter().all(|r| r.all_singular())
    }
}

/// For each `n` in `n_range` and `d` in `d_range`, counts the curves of
/// bidegree `(n, n + d)` whose intersection with `x` is singular.
pub fn verify_window(x: &Section, n_range: std::ops::RangeInclusive<i64>, d_range: std::ops::RangeInclusive<i64>) -> Result<WindowReport> {
    let surface = x.surface();
    let mut rows = Vec::new();
    for n in n_range {
        for d in d_range.clone() {
            let b = Bidegree::new(n, n + d);
            let dim = section_dimension(surface.a(), b);
            let q = surface.q() as u128;
            if q.checked_pow(dim as u32).is_none_or(|c| c > WINDOW_CAP) {
                return Err(Error::cap(format!("{q}^{dim} curves of bidegree ({n}, {})", n + d), WINDOW_CAP));
            }
            let hs: Vec<Section> = projective_sections(surface, b).collect();
            let verdicts: Vec<(bool, bool)> = hs
                .par_iter()
                .map(|h| -> Result<(bool, bool)> {
                    if share_component(x, h)? {
                        return Ok((true, false));
                    }
                    Ok((false, intersection_is_singular(x, h)?))
                })
                .collect::<Result<_>>()?;
            rows.push(WindowRow {
                n,
                d,
                curves: hs.len() as u64,
                containing: verdicts.iter().filter(|v| v.0).count() as u64,
                singular: verdicts.iter().filter(|v| v.1).count() as u64,
            });
        }
    }
    Ok(WindowReport { rows })
}

fn binom(top: i64, bottom: i64) -> BigInt {
    if top < 0 || bottom < 0 || top < bottom {
        return BigInt::from(0);
    }
    binomial(BigInt::from(top), BigInt::from(bottom))
}

/// `C(n+B, B) C(n+d+C, C) - C(n-k+B, B) C(n+d-k+C, C)`, with `C(x, y) = 0`
/// whenever `x < y` or either argument is negative.
pub fn embedding_dimension(b: i64, c: i64, n: i64, k: i64, d: i64) -> BigInt {
    binom(n + b, b) * binom(n + d + c, c) - binom(n - k + b, b) * binom(n + d - k + c, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hirzebruch::Monomial;

    fn f2() -> Surface {
        Surface::over(0, 2).unwrap()
    }

    #[test]
    fn embedding_examples() {
        assert_eq!(embedding_dimension(1, 1, 1, 1, 1), BigInt::from(4));
        assert_eq!(embedding_dimension(1, 1, 3, 0, 7), BigInt::from(0));
        for d in 0..50 {
            assert!(embedding_dimension(1, 1, 2, 1, d + 1) > embedding_dimension(1, 1, 2, 1, d));
        }
    }

    #[test]
    fn system_codimensions() {
        let s = f2();
        let b = Bidegree::new(1, 1);
        let k = s.field();
        let none = tangency_system(&s, b, &[]).unwrap();
        assert_eq!((none.rows(), none.cols()), (0, 5));
        let p = ClosedPoint::new(k, 1, [Fe(0), Fe(1), Fe(0), Fe(1)]).unwrap();
        let one = tangency_system(&s, b, &[TangencyConstraint::Contains(p.clone())]).unwrap();
        assert_eq!(one.solve_augmented().unwrap().1.len(), 3);
        // tangent to x t + y s at the origin
        let h = Section::from_terms(&s, b, &[(Fe(1), Monomial::new(1, 0, 0, 1)), (Fe(1), Monomial::new(0, 1, 1, 0))]).unwrap();
        let tan = tangency_system(&s, b, &[TangencyConstraint::Tangent { point: p, target: h }]).unwrap();
        let (_, kernel) = tan.solve_augmented().unwrap();
        assert!(4 - kernel.len() <= 3);
    }

    #[test]
    fn points_have_their_degree() {
        let k = f2().field().clone();
        let pts = fiber_points(&k, 3).unwrap();
        // 3 rational, 1 quadratic, 2 cubic
        assert_eq!(pts.iter().map(|p| p.degree()).collect::<Vec<_>>(), vec![1, 1, 1, 2, 3, 3]);
        let ext = gf::ext_field(&k, 2).unwrap();
        assert!(ClosedPoint::new(&k, 2, [Fe(1), Fe(1), Fe(0), Fe(1)]).is_err());
        assert!(ClosedPoint::new(&k, 2, [ext.field.elements().nth(2).unwrap(), Fe(1), Fe(0), Fe(1)]).is_ok());
    }

    #[test]
    fn unconstrained_search_finds_smooth_member() {
        let params = SearchParams { q: 2, k: 1, j_max: 1, budget: 0, max_point_degree: 1, trials: 64 };
        match search_anti_bertini(params, 7).unwrap() {
            SearchOutcome::Found(c) => assert!(c.reverify().unwrap()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn overfull_budget_is_not_found() {
        let params = SearchParams { q: 2, k: 1, j_max: 1, budget: 6, max_point_degree: 1, trials: 64 };
        assert!(matches!(search_anti_bertini(params, 7).unwrap(), SearchOutcome::NotFound { .. }));
    }
}
