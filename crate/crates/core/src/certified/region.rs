//! Decisions for whole rectangles of parameters.
//!
//! A norm built at the centre of a rectangle `K` stays expanding on all of
//! `K` once the perturbation `R(s) - R(center)` is small in the induced
//! operator norm, and then one witness ball bounds the cycles of every
//! `tau_s`, `s` in `K`.
//!
//! [`subdivide_region`] cuts `K` by every line `x . s = k` over the witness
//! ball. That arrangement is far too fine for practical rectangles, so
//! [`decide_region`] instead enumerates, for each possible cycle, the convex
//! polygon of parameters realising it ([`cycle_polygons`]) and cuts `K` only
//! along the edges of those polygons. Each resulting cell carries the same
//! set of cycles at every interior parameter off finitely many lines; a
//! certified point decision at an interior sample is cross-checked against
//! the polygons.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::norm::{build_norm, exact_expanding, NormCertificate, INFLATION, ROUNDING};
use super::polygon::{param_of, q_floor, q_int, q_rat, Line, Polygon, Side, Q};
use super::witness::{decide_point_report, witness_set, ExactStep, WitnessSet};
use super::CertError;
use crate::dynamics::{cycle_canonicalize, CycleWitness};
use crate::error::SrsError;
use crate::param::{parse_rational, Rational, WideRational};
use crate::regions::Status;

/// Default limit on the number of arrangement cells.
pub const MAX_CELLS: usize = 1_000_000;

/// `[a, b] x [c, d]` with exact rational bounds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalRect {
    r0: [Rational; 2],
    r1: [Rational; 2],
}

impl RationalRect {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self, CertError> {
        if a > b || c > d {
            return Err(CertError::InvalidRect(format!(
                "bounds out of order: [{a}, {b}]x[{c}, {d}]"
            )));
        }
        Ok(Self {
            r0: [a, b],
            r1: [c, d],
        })
    }

    /// Parses `a,b,c,d` meaning `[a, b] x [c, d]`.
    pub fn parse(s: &str) -> Result<Self, CertError> {
        let parts: Vec<&str> = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect();
        if parts.len() != 4 {
            return Err(SrsError::Parse(s.to_string()).into());
        }
        let q: Vec<Rational> = parts
            .iter()
            .map(|p| parse_rational(p))
            .collect::<Result<_, _>>()?;
        Self::new(q[0], q[1], q[2], q[3])
    }

    pub fn r0(&self) -> [Rational; 2] {
        self.r0
    }

    pub fn r1(&self) -> [Rational; 2] {
        self.r1
    }

    pub fn center(&self) -> [Rational; 2] {
        let two = Rational::from_integer(2);
        [
            (self.r0[0] + self.r0[1]) / two,
            (self.r1[0] + self.r1[1]) / two,
        ]
    }

    pub fn corners(&self) -> [[Rational; 2]; 4] {
        let [a, b] = self.r0;
        let [c, d] = self.r1;
        [[a, c], [b, c], [b, d], [a, d]]
    }

    /// The four quarters, in the order lower-left, lower-right, upper-left,
    /// upper-right.
    pub fn quadrants(&self) -> [RationalRect; 4] {
        let [m0, m1] = self.center();
        let [a, b] = self.r0;
        let [c, d] = self.r1;
        [
            RationalRect { r0: [a, m0], r1: [c, m1] },
            RationalRect { r0: [m0, b], r1: [c, m1] },
            RationalRect { r0: [a, m0], r1: [m1, d] },
            RationalRect { r0: [m0, b], r1: [m1, d] },
        ]
    }

    pub fn polygon(&self) -> Option<Polygon> {
        Polygon::rect(
            [q_rat(&self.r0[0]), q_rat(&self.r0[1])],
            [q_rat(&self.r1[0]), q_rat(&self.r1[1])],
        )
    }

    pub fn contains(&self, s: &[Rational; 2]) -> bool {
        self.r0[0] <= s[0] && s[0] <= self.r0[1] && self.r1[0] <= s[1] && s[1] <= self.r1[1]
    }
}

impl fmt::Display for RationalRect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]x[{}, {}]",
            self.r0[0], self.r0[1], self.r1[0], self.r1[1]
        )
    }
}

fn ser_pair<S: Serializer>(p: &[Rational; 2], s: S) -> Result<S::Ok, S::Error> {
    [p[0].to_string(), p[1].to_string()].serialize(s)
}

impl Serialize for RationalRect {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        struct P<'a>(&'a [Rational; 2]);
        impl Serialize for P<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                ser_pair(self.0, s)
            }
        }
        let mut st = s.serialize_struct("RationalRect", 2)?;
        st.serialize_field("r0", &P(&self.r0))?;
        st.serialize_field("r1", &P(&self.r1))?;
        st.end()
    }
}

fn wide(q: &Rational) -> WideRational {
    WideRational::new(*q.numer() as i128, *q.denom() as i128)
}

/// Which of the two open convex cones of expanding parameters holds `s`.
fn expanding_cone(s: &[Rational; 2]) -> Option<bool> {
    let (r0, r1) = (wide(&s[0]), wide(&s[1]));
    if !exact_expanding(&r0, &r1) {
        return None;
    }
    Some(r0 > WideRational::from_integer(0))
}

/// All of `K` is expanding: the four corners lie in the same convex cone.
pub fn rect_is_expanding(k: &RationalRect) -> bool {
    let cones: Vec<Option<bool>> = k.corners().iter().map(expanding_cone).collect();
    cones[0].is_some() && cones.iter().all(|c| *c == cones[0])
}

/// Upper bound on `sup_{s in K} |R(s) - R(p)|` in the operator norm of the
/// certificate, `p` the certificate's parameter.
///
/// `R(s) - R(p)` maps `x` to `-(delta . x) e_2`, so its operator norm is
/// `N(e_2)` times the dual norm of `T^t delta`; the maximum over `K` is
/// attained at a corner.
pub fn uniformity_defect(k: &RationalRect, cert: &NormCertificate) -> f64 {
    let p = [cert.parameter.approx_at(0), cert.parameter.approx_at(1)];
    let t = &cert.basis;
    let worst = k
        .corners()
        .iter()
        .map(|c| {
            let d = [
                crate::param::rational_to_f64(&c[0]) - p[0],
                crate::param::rational_to_f64(&c[1]) - p[1],
            ];
            cert.norm.dual([
                t[0][0] * d[0] + t[1][0] * d[1],
                t[0][1] * d[0] + t[1][1] * d[1],
            ])
        })
        .fold(0.0, f64::max);
    cert.unit_last_norm * worst * (1.0 + INFLATION) + ROUNDING
}

/// Lines `x . s = k` for witnesses `x` and integers `k` strictly inside the
/// range of `x . s` over `K`, deduplicated.
pub fn cut_lines(k: &RationalRect, witnesses: impl IntoIterator<Item = [i64; 2]>) -> Vec<Line> {
    let Some(poly) = k.polygon() else {
        return Vec::new();
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for x in witnesses {
        if x == [0, 0] {
            continue;
        }
        let (lo, hi) = poly.range(x);
        let (Some(a), Some(b)) = (q_floor(&lo), q_floor(&hi)) else {
            continue;
        };
        for c in (a + 1)..=b {
            let qc = q_int(c);
            if qc >= hi {
                break;
            }
            let line = Line::new(x, qc);
            if seen.insert(line.key()) {
                out.push(line);
            }
        }
    }
    out
}

/// Cells of `K` cut by `lines`, in a deterministic order.
pub fn arrangement(k: &RationalRect, lines: &[Line]) -> Result<Vec<Polygon>, CertError> {
    arrangement_limited(k, lines, MAX_CELLS)
}

fn arrangement_limited(
    k: &RationalRect,
    lines: &[Line],
    limit: usize,
) -> Result<Vec<Polygon>, CertError> {
    let poly = k
        .polygon()
        .ok_or_else(|| CertError::InvalidRect(format!("{k} has no interior")))?;
    arrangement_of(poly, lines, limit)
}

fn arrangement_of(poly: Polygon, lines: &[Line], limit: usize) -> Result<Vec<Polygon>, CertError> {
    let mut cells = vec![poly];
    for line in lines {
        let mut next = Vec::with_capacity(cells.len() + 1);
        for cell in cells {
            match cell.split(line) {
                Some((lo, hi)) => {
                    next.push(lo);
                    next.push(hi);
                }
                None => next.push(cell),
            }
        }
        if next.len() > limit {
            return Err(CertError::CellExplosion(limit));
        }
        cells = next;
    }
    Ok(cells)
}

/// The full arrangement of `K` by every witness line. Requires the
/// certificate to expand uniformly on `K`; its witness ball then holds the
/// cycles of every parameter in `K`, and on each cell `floor(s . x)` is
/// constant for every witness `x`.
pub fn subdivide_region(
    k: &RationalRect,
    cert: &NormCertificate,
    witnesses: &WitnessSet,
) -> Result<Vec<Polygon>, CertError> {
    if witnesses.certificate().parameter != cert.parameter {
        return Err(SrsError::CertificateMismatch.into());
    }
    if uniformity_defect(k, cert) > cert.margin {
        return Err(CertError::UniformityFailure(k.to_string()));
    }
    let lines = cut_lines(k, witnesses.iter());
    arrangement(k, &lines)
}

/// Every cycle that occurs for some parameter in `poly` (on a set of
/// positive area), with the closed polygon of parameters realising it.
///
/// Depth-first search over orbit prefixes: each step branches on the
/// integer `k = floor(s . x)` and clips the parameter polygon to
/// `k <= s . x <= k + 1`. A cycle is reported from its lexicographically
/// least state only.
pub fn cycle_polygons(
    poly: &Polygon,
    ws: &WitnessSet,
) -> Result<Vec<(CycleWitness, Polygon)>, CertError> {
    let mut out = Vec::new();
    let mut stack: Vec<(usize, [i64; 2], Polygon)> = Vec::new();
    let mut path: Vec<[i64; 2]> = Vec::new();
    for x0 in ws.iter() {
        if x0 == [0, 0] {
            continue;
        }
        stack.push((0, x0, poly.clone()));
        while let Some((depth, x, cell)) = stack.pop() {
            path.truncate(depth);
            path.push(x);
            let (lo, hi) = cell.range_f64(x);
            let (kmin, kmax) = (lo.floor() as i64, hi.ceil() as i64 - 1);
            for k in kmin..=kmax {
                let y = [x[1], k.checked_neg().ok_or(SrsError::Overflow)?];
                let closes = y == x0;
                if !closes && (y == [0, 0] || y < x0 || !ws.contains(y) || path.contains(&y)) {
                    continue;
                }
                let sub = if lo > k as f64 && hi < (k + 1) as f64 {
                    Some(cell.clone())
                } else {
                    cell.clip(&Line::new(x, q_int(k)), Side::Above)
                        .and_then(|c| c.clip(&Line::new(x, q_int(k + 1)), Side::Below))
                };
                let Some(sub) = sub else {
                    continue;
                };
                if closes {
                    let entries: Vec<i64> = path.iter().map(|p| p[0]).collect();
                    out.push((cycle_canonicalize(&entries)?, sub));
                } else {
                    stack.push((depth + 1, y, sub));
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum CellVerdict {
    InDStar,
    NotInDStar { cycle: CycleWitness },
    Undecided { reason: String },
}

impl CellVerdict {
    pub fn status(&self) -> Option<Status> {
        match self {
            CellVerdict::InDStar => Some(Status::InDStar),
            CellVerdict::NotInDStar { .. } => Some(Status::NotInDStar),
            CellVerdict::Undecided { .. } => None,
        }
    }
}

impl fmt::Display for CellVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellVerdict::InDStar => f.write_str("InDStar"),
            CellVerdict::NotInDStar { cycle } => write!(f, "NotInDStar cycle={cycle}"),
            CellVerdict::Undecided { reason } => write!(f, "Undecided ({reason})"),
        }
    }
}

fn ser_opt_pair<S: Serializer>(p: &Option<[Rational; 2]>, s: S) -> Result<S::Ok, S::Error> {
    p.map(|p| [p[0].to_string(), p[1].to_string()]).serialize(s)
}

/// One cell of a region decision.
#[derive(Debug, Clone, Serialize)]
pub struct CellDecision {
    /// The bisection rectangle the cell belongs to.
    pub rect: RationalRect,
    pub cell: Polygon,
    pub verdict: CellVerdict,
    /// All nontrivial cycles present throughout the cell interior.
    pub cycles: Vec<CycleWitness>,
    #[serde(serialize_with = "ser_opt_pair")]
    pub sample: Option<[Rational; 2]>,
    /// `x -> tau_s(x)` for the witnesses whose image is the same for every
    /// `s` in the cell.
    pub symbolic_map: Vec<([i64; 2], [i64; 2])>,
    pub witnesses: usize,
}

#[derive(Debug, Clone)]
pub struct RegionOptions {
    /// Bisection levels before a rectangle is reported undecided.
    pub max_depth: usize,
    pub symbolic_maps: bool,
}

impl Default for RegionOptions {
    fn default() -> Self {
        Self {
            max_depth: 20,
            symbolic_maps: true,
        }
    }
}

enum Plan {
    Leaf(RationalRect, NormCertificate),
    Undecided(RationalRect),
}

fn plan(k: RationalRect, depth: usize, opts: &RegionOptions, out: &mut Vec<Plan>) {
    let center = param_of(&k.center());
    if let Ok(cert) = build_norm(&center, None) {
        if uniformity_defect(&k, &cert) <= cert.margin {
            out.push(Plan::Leaf(k, cert));
            return;
        }
    }
    if depth >= opts.max_depth {
        out.push(Plan::Undecided(k));
        return;
    }
    for q in k.quadrants() {
        plan(q, depth + 1, opts, out);
    }
}

/// Certified decision of every parameter in `K`, with the default options.
pub fn decide_region(k: &RationalRect) -> Result<Vec<CellDecision>, CertError> {
    decide_region_with(k, &RegionOptions::default())
}

pub fn decide_region_with(
    k: &RationalRect,
    opts: &RegionOptions,
) -> Result<Vec<CellDecision>, CertError> {
    if k.polygon().is_none() {
        return Err(CertError::InvalidRect(format!("{k} has no interior")));
    }
    if !rect_is_expanding(k) {
        return Err(CertError::NotExpanding);
    }
    let mut plans = Vec::new();
    plan(k.clone(), 0, opts, &mut plans);
    let parts: Vec<Result<Vec<CellDecision>, CertError>> = plans
        .into_par_iter()
        .map(|p| match p {
            Plan::Leaf(rect, cert) => decide_leaf(&rect, &cert, opts),
            Plan::Undecided(rect) => Ok(vec![CellDecision {
                cell: rect.polygon().expect("interior"),
                rect,
                verdict: CellVerdict::Undecided {
                    reason: "bisection depth exhausted".into(),
                },
                cycles: Vec::new(),
                sample: None,
                symbolic_map: Vec::new(),
                witnesses: 0,
            }]),
        })
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// True if `s . x` is an integer for no witness `x`.
fn generic_sample(s: &[Rational; 2], ws: &WitnessSet) -> Result<bool, CertError> {
    let step = ExactStep::new(&param_of(s))?;
    for x in ws.iter() {
        if x != [0, 0] && step.is_integral(x) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn decide_leaf(
    rect: &RationalRect,
    cert: &NormCertificate,
    opts: &RegionOptions,
) -> Result<Vec<CellDecision>, CertError> {
    let ws = witness_set(cert)?;
    let poly = rect.polygon().expect("interior");
    let found = cycle_polygons(&poly, &ws)?;

    let mut seen = HashSet::new();
    let mut lines = Vec::new();
    for (_, p) in &found {
        for e in p.edges() {
            if seen.insert(e.key()) {
                lines.push(e.clone());
            }
        }
    }
    let cells = arrangement_of(poly, &lines, MAX_CELLS)?;

    cells
        .into_par_iter()
        .map(|cell| decide_cell(rect, cell, &found, &ws, opts))
        .collect()
}

fn decide_cell(
    rect: &RationalRect,
    cell: Polygon,
    found: &[(CycleWitness, Polygon)],
    ws: &WitnessSet,
    opts: &RegionOptions,
) -> Result<CellDecision, CertError> {
    let mut sample = None;
    for s in cell.interior_samples() {
        if generic_sample(&s, ws)? {
            sample = Some(s);
            break;
        }
    }
    let mut decision = CellDecision {
        rect: rect.clone(),
        cell,
        verdict: CellVerdict::Undecided {
            reason: "no generic interior sample".into(),
        },
        cycles: Vec::new(),
        sample,
        symbolic_map: Vec::new(),
        witnesses: ws.len(),
    };
    let Some(s) = sample else {
        return Ok(decision);
    };

    let sq = [q_rat(&s[0]), q_rat(&s[1])];
    let mut expected: Vec<CycleWitness> = found
        .iter()
        .filter(|(_, p)| p.contains_strict(&sq))
        .map(|(c, _)| c.clone())
        .collect();
    expected.sort_by(|a, b| a.preference(b));
    expected.dedup();

    let point = decide_point_report(&param_of(&s), None)?;
    if point.cycles != expected {
        return Err(CertError::Inconsistent(format!(
            "at ({}, {}): point search found {:?}, cycle polygons give {:?}",
            s[0],
            s[1],
            point.cycles.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            expected.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        )));
    }
    decision.verdict = match expected.first() {
        Some(c) => CellVerdict::NotInDStar { cycle: c.clone() },
        None => CellVerdict::InDStar,
    };
    decision.cycles = expected;
    if opts.symbolic_maps {
        decision.symbolic_map = symbolic_map(&decision.cell, ws);
    }
    Ok(decision)
}

fn symbolic_map(cell: &Polygon, ws: &WitnessSet) -> Vec<([i64; 2], [i64; 2])> {
    let mut out = Vec::new();
    for x in ws.iter() {
        let (lo_f, hi_f) = cell.range_f64(x);
        if hi_f - lo_f > 1.5 || lo_f.floor() + 2.0 < hi_f {
            continue;
        }
        let (lo, hi) = cell.range(x);
        let Some(k) = q_floor(&lo) else { continue };
        if hi <= q_int(k + 1) {
            out.push((x, [x[1], -k]));
        }
    }
    out
}

/// Area of the union of `cells`, for coverage checks.
pub fn total_area(cells: &[CellDecision]) -> Q {
    cells
        .iter()
        .map(|c| c.cell.double_area())
        .fold(Q::from_integer(0.into()), |a, b| a + b)
        / q_int(2)
}

#[cfg(test)]
fn rect_area(k: &RationalRect) -> Q {
    let [a, b] = k.r0();
    let [c, d] = k.r1();
    (q_rat(&b) - q_rat(&a)) * (q_rat(&d) - q_rat(&c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(s: &str) -> RationalRect {
        RationalRect::parse(s).unwrap()
    }

    #[test]
    fn rect_parsing_and_order() {
        let k = rect("3/2, 8/5, -1/10, 1/10");
        assert_eq!(k.to_string(), "[3/2, 8/5]x[-1/10, 1/10]");
        assert!(RationalRect::parse("2,1,0,1").is_err());
        assert!(RationalRect::parse("1,2,0").is_err());
    }

    #[test]
    fn expanding_rectangles() {
        assert!(rect_is_expanding(&rect("3/2,8/5,-1/10,1/10")));
        assert!(rect_is_expanding(&rect("23/20,5/4,-8/5,-29/20")));
        assert!(!rect_is_expanding(&rect("0,1,0,1")));
        assert_eq!(decide_region(&rect("0,1,0,1")).unwrap_err(), CertError::NotExpanding);
    }

    #[test]
    fn cut_line_examples() {
        let k = rect("3/2,8/5,-1/10,1/10");
        assert!(cut_lines(&k, [[1, 0]]).is_empty());
        let k = rect("6/5,13/10,0,1/10");
        assert!(cut_lines(&k, [[1, 1], [2, 1]]).is_empty());
        // s0 = 2 only touches the boundary of [1,2]x[0,1]
        let k = rect("1,2,0,1");
        let lines = cut_lines(&k, [[1, 0]]);
        assert!(lines.is_empty());
        assert_eq!(arrangement(&k, &lines).unwrap().len(), 1);
        // s0 + s1 = 2 crosses it
        let lines = cut_lines(&k, [[1, 1], [2, 2]]);
        assert_eq!(lines.len(), 3);
        assert_eq!(arrangement(&k, &lines).unwrap().len(), 4);
    }

    #[test]
    fn uniform_rectangle_subdivides() {
        let k = rect("3/2,8/5,-1/10,1/10");
        let cert = build_norm(&param_of(&k.center()), None).unwrap();
        assert!(uniformity_defect(&k, &cert) <= cert.margin);
        let ws = witness_set(&cert).unwrap();
        let cells = subdivide_region(&k, &cert, &ws).unwrap();
        let area = cells.iter().map(|c| c.double_area()).fold(q_int(0), |a, b| a + b) / q_int(2);
        assert_eq!(area, rect_area(&k));
        // floor(s . x) is constant on every cell
        for cell in &cells {
            for x in ws.iter() {
                let (lo, hi) = cell.range(x);
                let k = q_floor(&lo).unwrap();
                assert!(hi <= q_int(k + 1));
            }
        }
    }

    #[test]
    fn wide_rectangles_fail_uniformity() {
        let k = rect("3/2,5/2,-1/2,1/2");
        let cert = build_norm(&param_of(&k.center()), None).unwrap();
        let ws = witness_set(&cert).unwrap();
        assert!(matches!(
            subdivide_region(&k, &cert, &ws),
            Err(CertError::UniformityFailure(_))
        ));
    }

    #[test]
    fn cycle_polygon_for_constant_cycle() {
        let k = rect("23/20,5/4,-8/5,-29/20");
        let cert = build_norm(&param_of(&k.center()), None).unwrap();
        let ws = witness_set(&cert).unwrap();
        let found = cycle_polygons(&k.polygon().unwrap(), &ws).unwrap();
        let one = found.iter().find(|(c, _)| c.entries() == [1]);
        // (1) needs -1 <= s0 + s1 < 0, which holds on the whole rectangle
        let (_, p) = one.expect("cycle (1)");
        assert_eq!(p.double_area(), k.polygon().unwrap().double_area());
    }

    #[test]
    fn generic_samples_avoid_witness_lines() {
        let cert = build_norm(&param_of(&[Rational::new(3, 2), Rational::new(0, 1)]), None).unwrap();
        let ws = witness_set(&cert).unwrap();
        assert!(!generic_sample(&[Rational::new(3, 2), Rational::new(0, 1)], &ws).unwrap());
        let s = [Rational::new(3, 2) + Rational::new(1, 1_000_003), Rational::new(1, 999_983)];
        assert!(generic_sample(&s, &ws).unwrap());
    }
}
