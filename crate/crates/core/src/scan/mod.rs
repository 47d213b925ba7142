//! Rectangle scans: one verdict per pixel centre, written as a PGM raster,
//! a CSV table and a JSON summary.

mod cache;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::certified::{decide_point_with, CertError, DecideOptions, RationalRect, MAX_BOX_POINTS};
use crate::param::{ParamVector, Rational};
use crate::regions::{classify_with_tolerance, Status, Verdict, BOUNDARY_TOLERANCE};

pub use cache::{DecisionCache, ALGORITHM_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ClosedForm,
    Certified,
    Hybrid,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::ClosedForm => "closed-form",
            Mode::Certified => "certified",
            Mode::Hybrid => "hybrid",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "closed-form" | "closed" => Ok(Mode::ClosedForm),
            "certified" => Ok(Mode::Certified),
            "hybrid" => Ok(Mode::Hybrid),
            _ => Err(format!("unknown mode {s:?} (closed-form, certified, hybrid)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("invalid scan configuration: {0}")]
    Config(String),

    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Cert(#[from] CertError),
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanConfig {
    pub rect: RationalRect,
    pub resolution: usize,
    pub mode: Mode,
    /// Boundary tolerance for the closed-form rules.
    pub tolerance: f64,
    /// Witness box limit for certified pixels.
    pub max_box_points: u128,
    pub rho: Option<f64>,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
}

impl ScanConfig {
    pub fn new(rect: RationalRect, resolution: usize, mode: Mode) -> Self {
        Self {
            rect,
            resolution,
            mode,
            tolerance: BOUNDARY_TOLERANCE,
            max_box_points: MAX_BOX_POINTS,
            rho: None,
            jobs: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        if self.resolution == 0 {
            return Err(ScanError::Config("resolution must be at least 1".into()));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(ScanError::Config(format!("bad tolerance {}", self.tolerance)));
        }
        if self.max_box_points == 0 {
            return Err(ScanError::Config("budget must be positive".into()));
        }
        Ok(())
    }

    /// Exact centre of pixel `(i, j)`; `i` counts columns left to right in
    /// `r0`, `j` counts rows bottom to top in `r1`.
    pub fn pixel_center(&self, i: usize, j: usize) -> Result<[Rational; 2], ScanError> {
        let n = self.resolution as i64;
        let at = |[lo, hi]: [Rational; 2], k: usize| -> Option<Rational> {
            let num = Rational::from_integer(2 * k as i64 + 1);
            let width = hi.checked_sub(&lo)?;
            lo.checked_add(&width.checked_mul(&num)?.checked_div(&Rational::from_integer(2 * n))?)
        };
        match (at(self.rect.r0(), i), at(self.rect.r1(), j)) {
            (Some(a), Some(b)) => Ok([a, b]),
            _ => Err(ScanError::Config("pixel coordinates overflow".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pixel {
    pub r0: Rational,
    pub r1: Rational,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub config: ScanConfig,
    /// Row-major, top row (largest `r1`) first.
    pub pixels: Vec<Pixel>,
    pub counts: BTreeMap<String, usize>,
    pub elapsed_ms: u128,
    pub certified_runs: usize,
    pub cache_hits: usize,
}

impl ScanResult {
    pub fn pixel(&self, i: usize, j: usize) -> &Pixel {
        let n = self.config.resolution;
        &self.pixels[(n - 1 - j) * n + i]
    }
}

fn certified(r: &ParamVector, opts: &DecideOptions) -> Result<Verdict, CertError> {
    decide_point_with(r, opts).map(|d| d.verdict)
}

fn needs_certificate(mode: Mode, closed: &Option<Verdict>) -> bool {
    match mode {
        Mode::ClosedForm => false,
        Mode::Certified => true,
        Mode::Hybrid => matches!(
            closed.as_ref().map(Verdict::status),
            Some(Status::UnknownBounded | Status::BoundaryUndecidable)
        ),
    }
}

/// Final verdict when the certified route was attempted.
fn merge(mode: Mode, closed: Option<Verdict>, cert: Option<Verdict>) -> Verdict {
    match (mode, cert) {
        (_, Some(v)) => v,
        (Mode::Certified, None) => match closed {
            Some(Verdict::Contractive) => Verdict::Contractive,
            _ => Verdict::UnknownBounded,
        },
        (_, None) => closed.unwrap_or(Verdict::BoundaryUndecidable),
    }
}

/// Runs a scan. With a cache, certified decisions are looked up first and
/// new ones appended afterwards.
pub fn run_scan(config: &ScanConfig, mut cache: Option<&mut DecisionCache>) -> Result<ScanResult, ScanError> {
    config.validate()?;
    let start = Instant::now();
    let n = config.resolution;
    let mut coords = Vec::with_capacity(n * n);
    for j in (0..n).rev() {
        for i in 0..n {
            coords.push(config.pixel_center(i, j)?);
        }
    }
    let opts = DecideOptions {
        rho: config.rho,
        max_box_points: config.max_box_points,
    };
    let cached: Vec<Option<Verdict>> = coords
        .iter()
        .map(|[a, b]| cache.as_deref().and_then(|c| c.lookup(a, b)).cloned())
        .collect();

    let work = || {
        coords
            .par_iter()
            .zip(cached.par_iter())
            .map(|([a, b], hit)| {
                let r = ParamVector::from_rationals(&[*a, *b]).expect("dimension two");
                let closed = if config.mode == Mode::Certified {
                    crate::regions::classify(&r).ok().filter(|v| *v == Verdict::Contractive)
                } else {
                    classify_with_tolerance(&r, config.tolerance).ok()
                };
                if !needs_certificate(config.mode, &closed) {
                    return (merge(config.mode, closed, None), None);
                }
                if let Some(v) = hit {
                    return (v.clone(), None);
                }
                match certified(&r, &opts) {
                    Ok(v) => (v.clone(), Some(v)),
                    Err(e) => {
                        log::debug!("({a}, {b}): {e}");
                        (merge(config.mode, closed, None), None)
                    }
                }
            })
            .collect::<Vec<_>>()
    };
    let outcomes = if config.jobs == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| ScanError::Config(e.to_string()))?
            .install(work)
    };

    let cache_hits = cached.iter().filter(|c| c.is_some()).count();
    let fresh: Vec<(Rational, Rational, &Verdict)> = coords
        .iter()
        .zip(&outcomes)
        .filter_map(|([a, b], (_, new))| new.as_ref().map(|v| (*a, *b, v)))
        .collect();
    let certified_runs = fresh.len();
    if let Some(c) = cache.as_deref_mut() {
        if !fresh.is_empty() {
            let path = c.path().to_path_buf();
            c.store_all(fresh).map_err(|source| ScanError::Io { path, source })?;
        }
    }

    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let pixels: Vec<Pixel> = coords
        .into_iter()
        .zip(outcomes)
        .map(|([r0, r1], (verdict, _))| {
            *counts.entry(verdict.status().name().to_string()).or_default() += 1;
            Pixel { r0, r1, verdict }
        })
        .collect();
    Ok(ScanResult {
        config: config.clone(),
        pixels,
        counts,
        elapsed_ms: start.elapsed().as_millis(),
        certified_runs,
        cache_hits,
    })
}

/// Gray level: 0 for `InDStar`, 255 for `NotInDStar`, 128 otherwise.
pub fn gray_level(v: &Verdict) -> u8 {
    match v.status() {
        Status::InDStar => 0,
        Status::NotInDStar => 255,
        _ => 128,
    }
}

pub fn write_pgm<W: Write>(res: &ScanResult, mut w: W) -> io::Result<()> {
    let n = res.config.resolution;
    writeln!(w, "P2")?;
    writeln!(w, "{n} {n}")?;
    writeln!(w, "255")?;
    for row in res.pixels.chunks(n) {
        // plain PGM lines must stay under 70 characters
        for chunk in row.chunks(16) {
            let line: Vec<String> = chunk.iter().map(|p| gray_level(&p.verdict).to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
    }
    w.flush()
}

pub fn write_csv<W: Write>(res: &ScanResult, mut w: W) -> io::Result<()> {
    writeln!(w, "r0,r1,status,rule,cycle")?;
    for p in &res.pixels {
        let rule = p.verdict.rule().map(|r| r.tag()).unwrap_or("");
        let cycle = p
            .verdict
            .cycle()
            .map(|c| c.entries().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"))
            .unwrap_or_default();
        writeln!(w, "{},{},{},{},{}", p.r0, p.r1, p.verdict.status().name(), rule, cycle)?;
    }
    w.flush()
}

#[derive(Serialize)]
struct Summary<'a> {
    rect: &'a RationalRect,
    resolution: usize,
    mode: Mode,
    tolerance: f64,
    pixels: usize,
    counts: &'a BTreeMap<String, usize>,
    rules: BTreeMap<&'static str, usize>,
    certified_runs: usize,
    cache_hits: usize,
    cache_hit_rate: f64,
    elapsed_ms: u128,
}

pub fn write_json<W: Write>(res: &ScanResult, mut w: W) -> io::Result<()> {
    let mut rules = BTreeMap::new();
    for p in &res.pixels {
        if let Some(r) = p.verdict.rule() {
            *rules.entry(r.tag()).or_default() += 1;
        }
    }
    let lookups = res.cache_hits + res.certified_runs;
    let summary = Summary {
        rect: &res.config.rect,
        resolution: res.config.resolution,
        mode: res.config.mode,
        tolerance: res.config.tolerance,
        pixels: res.pixels.len(),
        counts: &res.counts,
        rules,
        certified_runs: res.certified_runs,
        cache_hits: res.cache_hits,
        cache_hit_rate: if lookups == 0 {
            0.0
        } else {
            res.cache_hits as f64 / lookups as f64
        },
        elapsed_ms: res.elapsed_ms,
    };
    serde_json::to_writer_pretty(&mut w, &summary)?;
    writeln!(w)?;
    w.flush()
}

/// Creates `path` for writing, so unwritable outputs fail before a long scan.
pub fn create_output(path: &Path) -> Result<BufWriter<File>, ScanError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| ScanError::Io {
            path: path.to_path_buf(),
            source,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(rect: &str, res: usize, mode: Mode) -> ScanConfig {
        ScanConfig::new(RationalRect::parse(rect).unwrap(), res, mode)
    }

    #[test]
    fn pixel_centres_are_exact() {
        let c = config("0,1,-1,1", 4, Mode::ClosedForm);
        assert_eq!(
            c.pixel_center(0, 0).unwrap(),
            [Rational::new(1, 8), Rational::new(-3, 4)]
        );
        assert_eq!(
            c.pixel_center(3, 3).unwrap(),
            [Rational::new(7, 8), Rational::new(3, 4)]
        );
    }

    #[test]
    fn counts_sum_and_top_row_first() {
        let res = run_scan(&config("-3,3,-3,3", 12, Mode::ClosedForm), None).unwrap();
        assert_eq!(res.pixels.len(), 144);
        assert_eq!(res.counts.values().sum::<usize>(), 144);
        assert!(res.pixels[0].r1 > res.pixels[143].r1);
        assert_eq!(res.pixel(0, 0).r1, Rational::new(-11, 4));
    }

    #[test]
    fn strip_is_white_and_far_corner_black() {
        // below the anti-diagonal the corner meets the (1) strip
        let res = run_scan(&config("4,5,-9/2,-4", 8, Mode::ClosedForm), None).unwrap();
        for p in &res.pixels {
            let want = if p.r0 + p.r1 >= Rational::from_integer(0) { 0 } else { 255 };
            assert_eq!(gray_level(&p.verdict), want, "{} {}", p.r0, p.r1);
        }
        let res = run_scan(&config("-1/2,-1/4,-1,-3/4", 8, Mode::ClosedForm), None).unwrap();
        assert!(res.pixels.iter().all(|p| gray_level(&p.verdict) == 255));
    }

    #[test]
    fn hybrid_fills_unknown_band() {
        let res = run_scan(&config("11/10,6/5,0,1/10", 3, Mode::Hybrid), None).unwrap();
        assert!(res.pixels.iter().all(|p| p.verdict.status() != Status::UnknownBounded));
        assert_eq!(res.certified_runs, 9);
    }

    #[test]
    fn pgm_and_csv_shape() {
        let res = run_scan(&config("-3,3,-3,3", 20, Mode::ClosedForm), None).unwrap();
        let mut pgm = Vec::new();
        write_pgm(&res, &mut pgm).unwrap();
        let text = String::from_utf8(pgm).unwrap();
        assert!(text.starts_with("P2\n20 20\n255\n"));
        assert!(text.lines().all(|l| l.len() <= 70));
        let values: Vec<&str> = text.lines().skip(3).flat_map(|l| l.split(' ')).collect();
        assert_eq!(values.len(), 400);

        let mut csv = Vec::new();
        write_csv(&res, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 401);
        assert_eq!(text.lines().next(), Some("r0,r1,status,rule,cycle"));
    }
}
