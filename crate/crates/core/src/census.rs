//! Exhaustive and Monte Carlo censuses of curves in a linear system: the
//! smooth fraction and the `F_q`-point counts of the smooth members.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gf::Fe;
use crate::hirzebruch::{random_section_indexed, section_basis, section_dimension, Bidegree, ClosedFiber, Monomial, Section, Surface};
use crate::localfactor::Distribution;
use crate::smoothcheck::{count_rational_points, smoothness_verdict, Verdict};
use crate::stabmap::GFMatrix;

/// Largest number of sections an exhaustive census visits.
pub const EXHAUSTIVE_CAP: u128 = 1 << 25;
/// Sections between checkpoints.
pub const CHECKPOINT_EVERY: u64 = 1 << 20;
/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.5758293035489;

const BLOCK: u64 = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CensusParams {
    pub a: u32,
    pub n: i64,
    pub d: i64,
    pub q: u64,
}

impl CensusParams {
    pub fn new(a: u32, n: i64, d: i64, q: u64) -> Self {
        CensusParams { a, n, d, q }
    }

    fn surface(&self) -> Result<Surface> {
        Surface::over(self.a, self.q)
    }

    fn bidegree(&self) -> Bidegree {
        Bidegree::new(self.n, self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CensusMode {
    Exhaustive,
    MonteCarlo { samples: u64, seed: u64 },
}

/// A Wilson score interval at 99%.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilsonInterval {
    pub center: f64,
    pub radius: f64,
}

impl WilsonInterval {
    pub fn new(successes: u64, trials: u64) -> Self {
        if trials == 0 {
            return WilsonInterval { center: 0.5, radius: 0.5 };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = Z_99 * Z_99;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let radius = Z_99 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        WilsonInterval { center, radius }
    }

    /// The radius in units of one standard deviation.
    pub fn sigma(&self) -> f64 {
        self.radius / Z_99
    }

    pub fn lo(&self) -> f64 {
        (self.center - self.radius).max(0.0)
    }

    pub fn hi(&self) -> f64 {
        (self.center + self.radius).min(1.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo() <= x && x <= self.hi()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusResult {
    pub params: CensusParams,
    pub mode: CensusMode,
    /// Sections examined, the zero section included.
    pub total: u64,
    pub zero_sections: u64,
    pub smooth: u64,
    /// `point_counts[k]`: smooth sections with exactly `k` rational points.
    pub point_counts: Vec<u64>,
    pub interval: Option<WilsonInterval>,
}

impl CensusResult {
    /// Sections defining a curve: the denominator of every fraction.
    pub fn nonzero(&self) -> u64 {
        self.total - self.zero_sections
    }

    pub fn smooth_ratio(&self) -> BigRational {
        BigRational::new(BigInt::from(self.smooth), BigInt::from(self.nonzero().max(1)))
    }

    pub fn smooth_fraction(&self) -> f64 {
        self.smooth as f64 / self.nonzero().max(1) as f64
    }

    /// Point-count pmf among smooth sections.
    pub fn point_pmf(&self) -> Result<Distribution> {
        Distribution::from_counts(&self.point_counts)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("plain data");
        v["smooth_fraction"] = serde_json::json!(self.smooth_fraction());
        v["smooth_ratio"] = serde_json::json!(crate::localfactor::ratio_string(&self.smooth_ratio()));
        v
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        serde_json::from_value(v.clone()).map_err(|e| Error::Malformed(e.to_string()))
    }
}

/// Partial counts; merging is a commutative sum, so any schedule gives the
/// same totals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
struct Tally {
    total: u64,
    zero: u64,
    smooth: u64,
    points: Vec<u64>,
}

impl Tally {
    fn record(&mut self, section: &Section) -> Result<()> {
        self.total += 1;
        if section.is_zero() {
            self.zero += 1;
            return Ok(());
        }
        if smoothness_verdict(section)? == Verdict::Smooth {
            self.smooth += 1;
            let k = count_rational_points(section)? as usize;
            if self.points.len() <= k {
                self.points.resize(k + 1, 0);
            }
            self.points[k] += 1;
        }
        Ok(())
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.total += other.total;
        self.zero += other.zero;
        self.smooth += other.smooth;
        if self.points.len() < other.points.len() {
            self.points.resize(other.points.len(), 0);
        }
        for (a, b) in self.points.iter_mut().zip(other.points) {
            *a += b;
        }
        self
    }

    fn into_result(self, params: CensusParams, mode: CensusMode) -> CensusResult {
        let interval = match mode {
            CensusMode::Exhaustive => None,
            CensusMode::MonteCarlo { .. } => Some(WilsonInterval::new(self.smooth, self.total - self.zero)),
        };
        CensusResult { params, mode, total: self.total, zero_sections: self.zero, smooth: self.smooth, point_counts: self.points, interval }
    }
}

fn par_tally(range: std::ops::Range<u64>, make: impl Fn(u64) -> Result<Section> + Sync) -> Result<Tally> {
    let blocks: Vec<u64> = (range.start..range.end).step_by(BLOCK as usize).collect();
    blocks
        .into_par_iter()
        .map(|start| {
            let mut t = Tally::default();
            for idx in start..(start + BLOCK).min(range.end) {
                t.record(&make(idx)?)?;
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
}

/// Where an exhaustive run persists its progress and results.
#[derive(Clone, Debug, Default)]
pub struct CensusStore {
    /// Directory of finished results, keyed by a hash of the parameters.
    pub cache_dir: Option<PathBuf>,
    /// Progress file written every [`CHECKPOINT_EVERY`] sections and
    /// resumed from when present.
    pub checkpoint: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    params: CensusParams,
    next: u64,
    tally: Tally,
}

/// Content hash naming the cached result of a run.
pub fn cache_key(params: &CensusParams, mode: &CensusMode) -> String {
    let doc = serde_json::json!({ "params": params, "mode": mode, "version": env!("CARGO_PKG_VERSION") });
    hex::encode(Sha256::digest(doc.to_string().as_bytes()))
}

fn cache_path(dir: &Path, params: &CensusParams, mode: &CensusMode) -> PathBuf {
    dir.join(format!("{}.json", cache_key(params, mode)))
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Malformed(format!("{}: {e}", path.display()))
}

fn read_cached(dir: &Path, params: &CensusParams, mode: &CensusMode) -> Option<CensusResult> {
    let text = fs::read_to_string(cache_path(dir, params, mode)).ok()?;
    let v: serde_json::Value = serde_json::from_str(&text).ok()?;
    CensusResult::from_json(&v).ok().filter(|r| r.params == *params && r.mode == *mode)
}

fn write_cached(dir: &Path, result: &CensusResult) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let path = cache_path(dir, &result.params, &result.mode);
    fs::write(&path, result.to_json().to_string()).map_err(|e| io_err(&path, e))
}

/// Every section of bidegree `(n, d)` on `F_a` over `F_q`, in odometer
/// order over the coefficient vector.
pub fn exhaustive_census(a: u32, n: i64, d: i64, q: u64) -> Result<CensusResult> {
    exhaustive_census_stored(CensusParams::new(a, n, d, q), &CensusStore::default())
}

pub fn exhaustive_census_stored(params: CensusParams, store: &CensusStore) -> Result<CensusResult> {
    let mode = CensusMode::Exhaustive;
    if let Some(hit) = store.cache_dir.as_deref().and_then(|dir| read_cached(dir, &params, &mode)) {
        return Ok(hit);
    }
    let surface = params.surface()?;
    let b = params.bidegree();
    let dim = section_dimension(params.a, b);
    if dim == 0 {
        return Err(Error::EmptyBasis(b.i, b.j));
    }
    let count = (params.q as u128)
        .checked_pow(dim as u32)
        .filter(|&c| c <= EXHAUSTIVE_CAP)
        .ok_or_else(|| Error::cap(format!("{}^{dim} sections", params.q), EXHAUSTIVE_CAP))? as u64;

    let (mut next, mut tally) = (0, Tally::default());
    if let Some(path) = &store.checkpoint {
        if let Ok(text) = fs::read_to_string(path) {
            let cp: Checkpoint = serde_json::from_str(&text).map_err(|e| io_err(path, e))?;
            if cp.params != params {
                return Err(Error::Malformed(format!("{} belongs to a different run", path.display())));
            }
            (next, tally) = (cp.next, cp.tally);
        }
    }
    let q = params.q;
    let make = |idx: u64| {
        let mut rest = idx;
        let coeffs = (0..dim)
            .map(|_| {
                let c = Fe((rest % q) as u32);
                rest /= q;
                c
            })
            .collect();
        Section::new(&surface, b, coeffs)
    };
    while next < count {
        let end = (next + CHECKPOINT_EVERY).min(count);
        tally = tally.merge(par_tally(next..end, make)?);
        next = end;
        if let Some(path) = &store.checkpoint {
            let cp = Checkpoint { params, next, tally: tally.clone() };
            fs::write(path, serde_json::to_string(&cp).expect("plain data")).map_err(|e| io_err(path, e))?;
        }
    }
    let result = tally.into_result(params, mode);
    if let Some(dir) = &store.cache_dir {
        write_cached(dir, &result)?;
    }
    Ok(result)
}

/// `samples` uniform sections; sample `i` uses stream `i` of `seed`.
pub fn mc_census(a: u32, n: i64, d: i64, q: u64, samples: u64, seed: u64) -> Result<CensusResult> {
    if samples == 0 {
        return Err(Error::InvalidParameter("at least one sample is needed".into()));
    }
    let params = CensusParams::new(a, n, d, q);
    let surface = params.surface()?;
    let b = params.bidegree();
    let tally = par_tally(0..samples, |i| random_section_indexed(&surface, b, seed, i))?;
    Ok(tally.into_result(params, CensusMode::MonteCarlo { samples, seed }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableMode {
    Exhaustive,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub d: i64,
    pub smooth_fraction: f64,
    /// Wilson 99% radius; zero for exhaustive rows.
    pub radius: f64,
    pub sections: u64,
}

/// One census per `d`, in the order given.
pub fn convergence_table(a: u32, n: i64, q: u64, d_list: &[i64], mode: TableMode) -> Result<Vec<ConvergenceRow>> {
    d_list
        .iter()
        .map(|&d| {
            let r = match mode {
                TableMode::Exhaustive => exhaustive_census(a, n, d, q)?,
                TableMode::MonteCarlo { samples, seed } => mc_census(a, n, d, q, samples, seed)?,
            };
            Ok(ConvergenceRow { d, smooth_fraction: r.smooth_fraction(), radius: r.interval.map_or(0.0, |i| i.radius), sections: r.nonzero() })
        })
        .collect()
}

pub fn table_to_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("d,smooth_fraction,radius,sections\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.d, r.smooth_fraction, r.radius, r.sections));
    }
    out
}

pub fn table_to_json(rows: &[ConvergenceRow]) -> serde_json::Value {
    serde_json::to_value(rows).expect("plain data")
}

/// The fiber as a section of bidegree `(0, e)`.
pub fn fiber_section(surface: &Surface, fiber: &ClosedFiber) -> Result<Section> {
    let e = fiber.degree() as u32;
    let form = fiber.form(surface.field());
    let terms: Vec<(Fe, Monomial)> = form.coeffs().iter().enumerate().map(|(i, c)| (*c, Monomial::new(0, 0, i as u32, e - i as u32))).collect();
    Section::from_terms(surface, Bidegree::new(0, e as i64), &terms)
}

/// Probability that a uniform section of bidegree `(n, d)` is divisible by
/// the square of the fiber's equation, from the rank of multiplication by
/// `r^2`.
pub fn doubled_fiber_probability(a: u32, n: i64, d: i64, q: u64, fiber: &ClosedFiber) -> Result<BigRational> {
    let surface = Surface::over(a, q)?;
    let b = Bidegree::new(n, d);
    let dim = section_dimension(a, b);
    if dim == 0 {
        return Err(Error::EmptyBasis(n, d));
    }
    let r = fiber_section(&surface, fiber)?;
    let r2 = r.mul(&r)?;
    let sb = Bidegree::new(n, d - 2 * fiber.degree() as i64);
    let cols: Vec<Vec<Fe>> = section_basis(&surface, sb)
        .into_iter()
        .map(|m| Ok(Section::from_terms(&surface, sb, &[(Fe(1), m)])?.mul(&r2)?.coeffs().to_vec()))
        .collect::<Result<_>>()?;
    if cols.is_empty() {
        // only the zero section is divisible, and it defines no curve
        return Ok(BigRational::from_integer(BigInt::from(0)));
    }
    let rank = GFMatrix::from_rows(surface.field(), dim, cols)?.rank();
    let q = BigInt::from(q);
    Ok(BigRational::new(BigInt::from(1), q.pow((dim - rank) as u32)))
}
