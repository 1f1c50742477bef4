//! Restriction of sections to doubled fibers as explicit matrices over
//! `F_q`, their ranks as the base degree grows, and the local factor read
//! off the stabilized image.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{Fe, FieldCtx};
use crate::hirzebruch::{restrict_to_fiber_jet, section_basis, Bidegree, ClosedFiber, Section, Surface};
use crate::poly::BinaryForm;
use crate::smoothcheck::is_good_pair_forms;

/// Rank must hold still for this many consecutive base degrees.
pub const STABLE_WINDOW: usize = 10;
/// Base degrees scanned before giving up on stabilization.
pub const MAX_SCAN_DEGREE: i64 = 80;
/// Largest subspace enumerated by [`local_factor_from_image`]; applied to
/// the `F1` projection and to the `F1 = 0` part separately.
pub const IMAGE_CAP: u128 = 1 << 24;

/// A dense matrix over `F_q` with labelled rows and columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GFMatrix {
    field: FieldCtx,
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl GFMatrix {
    pub fn zeros(field: &FieldCtx, rows: usize, cols: usize) -> Self {
        GFMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![Fe(0); rows * cols],
            row_labels: (0..rows).map(|i| format!("r{i}")).collect(),
            col_labels: (0..cols).map(|j| format!("c{j}")).collect(),
        }
    }

    /// All rows must have length `cols`.
    pub fn from_rows(field: &FieldCtx, cols: usize, rows: Vec<Vec<Fe>>) -> Result<Self> {
        let mut m = Self::zeros(field, rows.len(), cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Malformed(format!("row {i} has {} entries, expected {cols}", row.len())));
            }
            m.data[i * cols..(i + 1) * cols].copy_from_slice(&row);
        }
        Ok(m)
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Fe> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t.row_labels = self.col_labels.clone();
        t.col_labels = self.row_labels.clone();
        t
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        let k = self.field.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c) != Fe(0)) else { continue };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
                self.row_labels.swap(p, r);
            }
            let inv = k.inv(&self.get(r, c)).expect("nonzero pivot");
            for j in c..self.cols {
                let v = k.mul(&self.get(r, j), &inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                let f = self.get(i, c);
                if i == r || f == Fe(0) {
                    continue;
                }
                for j in c..self.cols {
                    let v = k.sub(&self.get(i, j), &k.mul(&f, &self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Rank by elimination over the field.
    pub fn rank_generic(&self) -> usize {
        self.clone().row_reduce().len()
    }

    /// Rank over `F_2` with rows packed into 64-bit words.
    pub fn rank_gf2_packed(&self) -> Result<usize> {
        if self.field.q() != 2 {
            return Err(Error::InvalidParameter(format!("packed rank needs F_2, got F_{}", self.field.q())));
        }
        let words = self.cols.div_ceil(64);
        let mut rows: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| {
                let mut w = vec![0u64; words];
                for (j, v) in self.row(i).iter().enumerate() {
                    if v.0 != 0 {
                        w[j / 64] |= 1 << (j % 64);
                    }
                }
                w
            })
            .collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let (wi, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..rows.len()).find(|&i| rows[i][wi] & bit != 0) else { continue };
            rows.swap(p, rank);
            let pivot = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && row[wi] & bit != 0 {
                    row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
                }
            }
            rank += 1;
        }
        Ok(rank)
    }

    pub fn rank(&self) -> usize {
        if self.field.q() == 2 {
            self.rank_gf2_packed().expect("binary field")
        } else {
            self.rank_generic()
        }
    }

    /// A basis of `{x : M x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Fe>> {
        let mut m = self.clone();
        let pivots = m.row_reduce();
        let k = &self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Fe(0); self.cols];
                x[f] = Fe(1);
                for (r, &p) in pivots.iter().enumerate() {
                    x[p] = k.neg(&m.get(r, f));
                }
                x
            })
            .collect()
    }

    /// Solves `M x = b` for the augmented matrix `[M | b]`: a particular
    /// solution and a basis of the homogeneous solutions, or
    /// [`Error::Inconsistent`].
    pub fn solve_augmented(&self) -> Result<(Vec<Fe>, Vec<Vec<Fe>>)> {
        if self.cols == 0 {
            return Err(Error::Malformed("augmented matrix needs a right-hand column".into()));
        }
        let n = self.cols - 1;
        let mut m = self.clone();
        let pivots = m.row_reduce();
        if pivots.last() == Some(&n) {
            return Err(Error::Inconsistent);
        }
        let mut x = vec![Fe(0); n];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = m.get(r, n);
        }
        let mut coeffs = self.clone();
        coeffs.cols = n;
        coeffs.data = (0..self.rows).flat_map(|i| self.row(i)[..n].to_vec()).collect();
        coeffs.col_labels.truncate(n);
        Ok((x, coeffs.nullspace()))
    }

    pub fn mul_vec(&self, x: &[Fe]) -> Vec<Fe> {
        let k = &self.field;
        (0..self.rows).map(|i| self.row(i).iter().zip(x).fold(Fe(0), |acc, (a, b)| k.add(&acc, &k.mul(a, b)))).collect()
    }
}

/// Distinct closed fibers whose doubled neighborhoods are restricted to.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RestrictionTarget {
    fibers: Vec<ClosedFiber>,
}

impl RestrictionTarget {
    pub fn new(fibers: Vec<ClosedFiber>) -> Result<Self> {
        for (i, f) in fibers.iter().enumerate() {
            if fibers[..i].contains(f) {
                return Err(Error::InvalidParameter(format!("fiber {f:?} listed twice")));
            }
        }
        Ok(RestrictionTarget { fibers })
    }

    pub fn fibers(&self) -> &[ClosedFiber] {
        &self.fibers
    }

    /// Number of jet coordinates: `2 e (n + 1)` per fiber.
    pub fn jet_dimension(&self, n: usize) -> usize {
        self.fibers.iter().map(|f| 2 * f.degree() * (n + 1)).sum()
    }
}

/// Jet coordinates of one section: per fiber, `F1` then `F2`, each listing
/// the `F_q`-coordinates of the coefficient of `u^i v^(n - i)` for
/// `i = 0..=n`.
pub fn jet_vector(section: &Section, target: &RestrictionTarget) -> Result<Vec<Fe>> {
    let mut out = Vec::with_capacity(target.jet_dimension(section.bidegree().i.max(0) as usize));
    for fiber in target.fibers() {
        let jet = restrict_to_fiber_jet(section, fiber)?;
        for form in [&jet.f1, &jet.f2] {
            for c in form.coeffs() {
                out.extend_from_slice(c);
            }
        }
    }
    Ok(out)
}

/// The matrix of `H^0(F_a, O(n, d)) -> jets on the doubled target fibers`
/// with columns indexed by [`section_basis`].
pub fn restriction_matrix(surface: &Surface, n: i64, d: i64, target: &RestrictionTarget) -> Result<GFMatrix> {
    let b = Bidegree::new(n, d);
    let basis = section_basis(surface, b);
    if basis.is_empty() {
        return Err(Error::EmptyBasis(n, d));
    }
    let k = surface.field();
    let dim = target.jet_dimension(n.max(0) as usize);
    let mut m = GFMatrix::zeros(k, dim, basis.len());
    for (j, mono) in basis.iter().enumerate() {
        let sec = Section::from_terms(surface, b, &[(Fe(1), *mono)])?;
        for (i, v) in jet_vector(&sec, target)?.into_iter().enumerate() {
            m.set(i, j, v);
        }
    }
    m.col_labels = basis.iter().map(|c| format!("x^{}y^{}s^{}t^{}", c.alpha, c.beta, c.gamma, c.delta)).collect();
    m.row_labels = row_labels(target, n.max(0) as usize);
    Ok(m)
}

fn row_labels(target: &RestrictionTarget, n: usize) -> Vec<String> {
    let mut out = Vec::new();
    for (idx, fiber) in target.fibers().iter().enumerate() {
        for part in ["F1", "F2"] {
            for i in 0..=n {
                for l in 0..fiber.degree() {
                    out.push(format!("P{idx}:{part}[u^{i}v^{}]:s^{l}", n - i));
                }
            }
        }
    }
    out
}

/// Ranks of the restriction map for `d = 0, 1, ...`, stopping at the first
/// `d_star` after which the rank holds for [`STABLE_WINDOW`] degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableRank {
    pub d_star: i64,
    pub rank: usize,
    /// `ranks[d]` for every scanned `d`.
    pub ranks: Vec<usize>,
}

pub fn stabilized_rank(surface: &Surface, n: i64, target: &RestrictionTarget) -> Result<StableRank> {
    if n < 0 {
        return Err(Error::InvalidParameter(format!("fiber degree {n} is negative")));
    }
    let mut ranks = Vec::new();
    for d in 0..=MAX_SCAN_DEGREE {
        let rank = match restriction_matrix(surface, n, d, target) {
            Ok(m) => m.rank(),
            Err(Error::EmptyBasis(..)) => 0,
            Err(e) => return Err(e),
        };
        ranks.push(rank);
        if ranks.len() >= STABLE_WINDOW {
            let start = ranks.len() - STABLE_WINDOW;
            if ranks[start..].iter().all(|&r| r == rank) {
                // earliest d with this rank that starts the constant run
                let mut d_star = start;
                while d_star > 0 && ranks[d_star - 1] == rank {
                    d_star -= 1;
                }
                return Ok(StableRank { d_star: d_star as i64, rank, ranks });
            }
        }
    }
    Err(Error::NotStabilized { max_d: MAX_SCAN_DEGREE, ranks })
}

/// Echelon basis of a subspace of `F_q^dim` for reducing vectors to a
/// canonical coset representative.
struct Echelon {
    rows: Vec<Vec<Fe>>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn new(k: &FieldCtx, dim: usize, vectors: Vec<Vec<Fe>>) -> Self {
        if vectors.is_empty() {
            return Echelon { rows: Vec::new(), pivots: Vec::new() };
        }
        let mut m = GFMatrix::from_rows(k, dim, vectors).expect("sized");
        let pivots = m.row_reduce();
        let rows = (0..pivots.len()).map(|i| m.row(i).to_vec()).collect();
        Echelon { rows, pivots }
    }

    fn reduce(&self, k: &FieldCtx, v: &mut [Fe]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = v[p];
            if f != Fe(0) {
                for (a, b) in v.iter_mut().zip(row) {
                    *a = k.sub(a, &k.mul(&f, b));
                }
            }
        }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Every vector of the span, in a fixed order.
    fn span(&self, k: &FieldCtx) -> Vec<Vec<Fe>> {
        let len = self.rows.first().map_or(0, |r| r.len());
        let q = k.q() as u64;
        let count = q.pow(self.dim() as u32);
        (0..count)
            .map(|mut idx| {
                let mut v = vec![Fe(0); len];
                for row in &self.rows {
                    let c = Fe((idx % q) as u32);
                    idx /= q;
                    if c != Fe(0) {
                        for (a, b) in v.iter_mut().zip(row) {
                            *a = k.add(a, &k.mul(&c, b));
                        }
                    }
                }
                v
            })
            .collect()
    }
}

fn forms_from(v: &[Fe], e: usize, n: usize, res: &impl Field<Elem = Vec<Fe>>) -> BinaryForm<Vec<Fe>> {
    let c = (0..=n).map(|i| v[i * e..(i + 1) * e].to_vec()).collect();
    BinaryForm::new(res, n, c).expect("sized")
}

/// Fraction of the stabilized image (at `d_star`) whose jet is a good
/// pair. Goodness depends on `F2` only through its class modulo the part
/// of the image with `F1 = 0`, so each `F1` costs one pass over that part
/// per distinct multiple-root locus.
pub fn local_factor_from_image(surface: &Surface, n: i64, fiber: &ClosedFiber) -> Result<BigRational> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!("fiber degree {n} must be at least 1")));
    }
    let target = RestrictionTarget::new(vec![fiber.clone()])?;
    let stable = stabilized_rank(surface, n, &target)?;
    let k = surface.field();
    let q = k.q() as u128;
    let m = restriction_matrix(surface, n, stable.d_star, &target)?;
    let (e, nn) = (fiber.degree(), n as usize);
    let half = e * (nn + 1);
    // image basis, with F1 coordinates first so the echelon form splits it
    let image = Echelon::new(k, m.rows(), (0..m.cols()).map(|j| m.column(j)).collect());
    let f1_part: Vec<Vec<Fe>> = image.rows.iter().zip(&image.pivots).filter(|(_, &p)| p < half).map(|(r, _)| r.clone()).collect();
    let kernel: Vec<Vec<Fe>> = image.rows.iter().zip(&image.pivots).filter(|(_, &p)| p >= half).map(|(r, _)| r[half..].to_vec()).collect();
    let lifts = Echelon { pivots: (0..f1_part.len()).collect(), rows: f1_part };
    let kernel = Echelon::new(k, half, kernel);
    // the enumeration touches |F1 part| + |K| per locus class, never the whole image
    for (what, dim) in [("F1 projection", lifts.dim()), ("F2 kernel", kernel.dim())] {
        if q.checked_pow(dim as u32).is_none_or(|c| c > IMAGE_CAP) {
            return Err(Error::cap(format!("{what} of size {q}^{dim}"), IMAGE_CAP));
        }
    }
    let kernel_span = kernel.span(k);
    let res = fiber.residue_field(k);

    let mut memo: HashMap<(Vec<Vec<Fe>>, Vec<Fe>), u64> = HashMap::new();
    let mut good: u64 = 0;
    for v in lifts.span(k) {
        let f1 = forms_from(&v[..half], e, nn, &res);
        let Ok(locus) = f1.multiple_root_locus(&res) else { continue };
        if locus.degree() == 0 {
            good += kernel_span.len() as u64;
            continue;
        }
        let mut rep = v[half..].to_vec();
        kernel.reduce(k, &mut rep);
        let key = (locus.coeffs().to_vec(), rep.clone());
        let count = *memo.entry(key).or_insert_with(|| {
            kernel_span
                .iter()
                .filter(|w| {
                    let f2: Vec<Fe> = rep.iter().zip(w.iter()).map(|(a, b)| k.add(a, b)).collect();
                    is_good_pair_forms(&res, &f1, &forms_from(&f2, e, nn, &res))
                })
                .count() as u64
        });
        good += count;
    }
    let total = BigInt::from(q).pow(stable.rank as u32);
    Ok(BigRational::new(BigInt::from(good), total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::UniPoly;

    fn target(fibers: Vec<ClosedFiber>) -> RestrictionTarget {
        RestrictionTarget::new(fibers).unwrap()
    }

    #[test]
    fn matrix_examples() {
        let s = Surface::over(0, 2).unwrap();
        let t = target(vec![ClosedFiber::at_zero()]);
        let m = restriction_matrix(&s, 1, 1, &t).unwrap();
        assert_eq!((m.rows(), m.cols(), m.rank()), (4, 4, 4));
        assert_eq!(restriction_matrix(&s, 1, 0, &t).unwrap().rank(), 2);
        let empty = restriction_matrix(&s, 1, 3, &target(vec![])).unwrap();
        assert_eq!((empty.rows(), empty.rank()), (0, 0));
    }

    #[test]
    fn packed_rank_agrees() {
        let k = crate::gf::field_new(2, 1).unwrap();
        for seed in 0..40u64 {
            let rows: Vec<Vec<Fe>> =
                (0..9).map(|i| (0..70).map(|j| Fe(((seed * 7919 + i * 131 + j * 17) % 5 == 0) as u32)).collect()).collect();
            let m = GFMatrix::from_rows(&k, 70, rows).unwrap();
            assert_eq!(m.rank_gf2_packed().unwrap(), m.rank_generic());
        }
    }

    #[test]
    fn nullspace_and_solve() {
        let k = crate::gf::field_new(3, 1).unwrap();
        let m = GFMatrix::from_rows(&k, 3, vec![vec![Fe(1), Fe(2), Fe(0)], vec![Fe(0), Fe(1), Fe(1)]]).unwrap();
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(|v| *v == Fe(0)));
        let aug = GFMatrix::from_rows(&k, 3, vec![vec![Fe(1), Fe(1), Fe(1)], vec![Fe(2), Fe(2), Fe(0)]]).unwrap();
        assert_eq!(aug.solve_augmented(), Err(Error::Inconsistent));
    }

    #[test]
    fn stable_ranks() {
        let s = Surface::over(0, 2).unwrap();
        let one = stabilized_rank(&s, 1, &target(vec![ClosedFiber::at_zero()])).unwrap();
        assert_eq!(one.rank, 4);
        let k = s.field();
        let quad = ClosedFiber::finite(k, &UniPoly::from_u32(&[1, 1, 1])).unwrap();
        assert_eq!(stabilized_rank(&s, 2, &target(vec![quad])).unwrap().rank, 12);
    }

    #[test]
    fn image_factors() {
        let s = Surface::over(0, 2).unwrap();
        let r = |p: i64, q: i64| BigRational::new(p.into(), q.into());
        assert_eq!(local_factor_from_image(&s, 2, &ClosedFiber::at_zero()).unwrap(), r(11, 16));
        assert_eq!(local_factor_from_image(&s, 1, &ClosedFiber::at_zero()).unwrap(), r(3, 4));
        assert_eq!(local_factor_from_image(&s, 3, &ClosedFiber::at_zero()).unwrap(), r(21, 32));
    }

    #[test]
    fn image_matches_closed_form_over_f3() {
        let s = Surface::over(0, 3).unwrap();
        let k = s.field();
        let quad = ClosedFiber::all_of_degree(k, 2).unwrap().remove(0);
        for n in 1..=3u32 {
            let expect = crate::localfactor::local_smooth_factor(3, 2, n).unwrap();
            assert_eq!(local_factor_from_image(&s, n as i64, &quad).unwrap(), expect, "n = {n}");
        }
    }
}
