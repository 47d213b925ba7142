//! Finite witness sets and certified single-parameter decisions.

use std::collections::HashMap;

use serde::Serialize;

use super::norm::{build_norm, NormCertificate, VectorNorm, INFLATION};
use super::CertError;
use crate::dynamics::{cycle_canonicalize, CycleWitness, LatticePoint};
use crate::error::SrsError;
use crate::param::ParamVector;
use crate::regions::{Rule, Verdict};

/// Enclosing boxes larger than this are refused.
pub const MAX_BOX_POINTS: u128 = 100_000_000;

/// Boxes up to this size use a dense visit table.
const DENSE_LIMIT: u64 = 1 << 25;

/// All lattice points in the closed norm ball of radius
/// `unit_last_norm / (rho - 1)`, plus possibly a few points within rounding
/// distance outside it.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessSet {
    certificate: NormCertificate,
    threshold: f64,
    /// `|x_i| <= bounds[i]` for every member.
    bounds: [i64; 2],
    count: usize,
}

impl WitnessSet {
    pub fn certificate(&self) -> &NormCertificate {
        &self.certificate
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn bounds(&self) -> [i64; 2] {
        self.bounds
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn contains(&self, x: [i64; 2]) -> bool {
        x[0].abs() <= self.bounds[0]
            && x[1].abs() <= self.bounds[1]
            && self.certificate.norm_int(&x) <= self.certificate.inflated_threshold()
    }

    /// Members in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = [i64; 2]> + '_ {
        let [b0, b1] = self.bounds;
        (-b0..=b0)
            .flat_map(move |a| (-b1..=b1).map(move |b| [a, b]))
            .filter(move |&x| self.contains(x))
    }

    pub fn points(&self) -> Vec<LatticePoint> {
        self.iter().map(|x| LatticePoint(x.to_vec())).collect()
    }

    fn box_len(&self) -> u64 {
        ((2 * self.bounds[0] + 1) * (2 * self.bounds[1] + 1)) as u64
    }

    fn box_index(&self, x: [i64; 2]) -> u64 {
        let w = 2 * self.bounds[1] + 1;
        ((x[0] + self.bounds[0]) * w + (x[1] + self.bounds[1])) as u64
    }
}

/// Enumerates the witness ball of `cert`.
pub fn witness_set(cert: &NormCertificate) -> Result<WitnessSet, CertError> {
    witness_set_limited(cert, MAX_BOX_POINTS)
}

/// As [`witness_set`], refusing enclosing boxes above `max_points`.
pub fn witness_set_limited(cert: &NormCertificate, max_points: u128) -> Result<WitnessSet, CertError> {
    let radius = cert.inflated_threshold();
    let t = &cert.basis;
    // x = T y with |y| <= radius
    let reach = |row: &[f64; 2]| match cert.norm {
        VectorNorm::Max => radius * (row[0].abs() + row[1].abs()),
        VectorNorm::Euclidean => radius * row[0].hypot(row[1]),
    };
    let mut bounds = [0i64; 2];
    for (i, row) in t.iter().enumerate() {
        let b = reach(row) * (1.0 + INFLATION) + 1.0;
        if !(b < 1e9) {
            return Err(CertError::WitnessExplosion { points: u128::MAX });
        }
        bounds[i] = b.floor() as i64;
    }
    let points = (2 * bounds[0] as u128 + 1) * (2 * bounds[1] as u128 + 1);
    if points > max_points {
        return Err(CertError::WitnessExplosion { points });
    }
    let mut ws = WitnessSet {
        certificate: cert.clone(),
        threshold: cert.threshold(),
        bounds,
        count: 0,
    };
    ws.count = ws.iter().count();
    Ok(ws)
}

/// `floor(r . x)` for a fixed rational `r` with a common denominator.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ExactStep {
    n0: i128,
    n1: i128,
    den: i128,
}

impl ExactStep {
    pub(crate) fn new(r: &ParamVector) -> Result<Self, SrsError> {
        r.require_dim(2)?;
        let q = r.exact().ok_or(SrsError::NotExact)?;
        let (d0, d1) = (*q[0].denom() as i128, *q[1].denom() as i128);
        Ok(Self {
            n0: *q[0].numer() as i128 * d1,
            n1: *q[1].numer() as i128 * d0,
            den: d0 * d1,
        })
    }

    pub(crate) fn step(&self, x: [i64; 2]) -> Option<[i64; 2]> {
        let num = self
            .n0
            .checked_mul(x[0] as i128)?
            .checked_add(self.n1.checked_mul(x[1] as i128)?)?;
        let f = num.div_euclid(self.den);
        Some([x[1], i64::try_from(-f).ok()?])
    }

    /// `r . x` is an integer.
    pub(crate) fn is_integral(&self, x: [i64; 2]) -> bool {
        let num = self.n0 * x[0] as i128 + self.n1 * x[1] as i128;
        num.rem_euclid(self.den) == 0
    }
}

enum Marks {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

impl Marks {
    fn new(len: u64) -> Self {
        if len <= DENSE_LIMIT {
            Marks::Dense(vec![0; len as usize])
        } else {
            Marks::Sparse(HashMap::new())
        }
    }

    fn get(&self, i: u64) -> u32 {
        match self {
            Marks::Dense(v) => v[i as usize],
            Marks::Sparse(m) => m.get(&i).copied().unwrap_or(0),
        }
    }

    fn set(&mut self, i: u64, walk: u32) {
        match self {
            Marks::Dense(v) => v[i as usize] = walk,
            Marks::Sparse(m) => {
                m.insert(i, walk);
            }
        }
    }
}

/// Every nontrivial cycle of `tau_r` for the certificate's parameter,
/// sorted by [`CycleWitness::preference`].
///
/// Cycles lie inside the witness ball, so a point whose image leaves the
/// ball is not on a cycle; the search is a walk over the partial functional
/// graph on the ball.
pub fn witness_cycles(ws: &WitnessSet) -> Result<Vec<CycleWitness>, CertError> {
    let stepper = ExactStep::new(&ws.certificate.parameter)?;
    let mut marks = Marks::new(ws.box_len());
    let mut walk: u32 = 0;
    let mut path: Vec<[i64; 2]> = Vec::new();
    let mut cycles: Vec<CycleWitness> = Vec::new();

    for start in ws.iter() {
        if marks.get(ws.box_index(start)) != 0 {
            continue;
        }
        walk += 1;
        path.clear();
        let mut cur = start;
        loop {
            if !ws.contains(cur) {
                break;
            }
            let idx = ws.box_index(cur);
            let m = marks.get(idx);
            if m == walk {
                let pos = path.iter().rposition(|&p| p == cur).expect("on path");
                let entries: Vec<i64> = path[pos..].iter().map(|p| p[0]).collect();
                let c = cycle_canonicalize(&entries)?;
                if !c.is_trivial() {
                    cycles.push(c);
                }
                break;
            }
            if m != 0 {
                break;
            }
            marks.set(idx, walk);
            path.push(cur);
            cur = stepper.step(cur).ok_or(SrsError::Overflow)?;
        }
    }
    cycles.sort_by(|a, b| a.preference(b));
    cycles.dedup();
    Ok(cycles)
}

/// Outcome of [`decide_point_report`].
#[derive(Debug, Clone, Serialize)]
pub struct PointDecision {
    pub verdict: Verdict,
    pub cycles: Vec<CycleWitness>,
    pub witnesses: usize,
    pub rho: f64,
    pub margin: f64,
    pub threshold: f64,
}

/// Certified decision for an exact rational parameter: `InDStar` iff the
/// witness ball holds no nontrivial cycle. Among several cycles the one
/// preferred by [`CycleWitness::preference`] is reported.
pub fn decide_point(r: &ParamVector) -> Result<Verdict, CertError> {
    decide_point_report(r, None).map(|d| d.verdict)
}

pub fn decide_point_report(r: &ParamVector, rho: Option<f64>) -> Result<PointDecision, CertError> {
    decide_point_with(
        r,
        &DecideOptions {
            rho,
            ..DecideOptions::default()
        },
    )
}

#[derive(Debug, Clone, Copy)]
pub struct DecideOptions {
    pub rho: Option<f64>,
    pub max_box_points: u128,
}

impl Default for DecideOptions {
    fn default() -> Self {
        Self {
            rho: None,
            max_box_points: MAX_BOX_POINTS,
        }
    }
}

pub fn decide_point_with(r: &ParamVector, opts: &DecideOptions) -> Result<PointDecision, CertError> {
    r.require_dim(2)?;
    if !r.is_exact() {
        return Err(SrsError::NotExact.into());
    }
    let cert = build_norm(r, opts.rho)?;
    let ws = witness_set_limited(&cert, opts.max_box_points)?;
    let cycles = witness_cycles(&ws)?;
    let verdict = match cycles.first() {
        Some(c) => Verdict::NotInDStar {
            cycle: c.clone(),
            rule: Rule::Certified,
        },
        None => Verdict::InDStar {
            rule: Rule::Certified,
        },
    };
    Ok(PointDecision {
        verdict,
        cycles,
        witnesses: ws.len(),
        rho: cert.rho,
        margin: cert.margin,
        threshold: cert.threshold(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{srs_step, verify_cycle};
    use crate::regions::Status;

    fn p(s: &str) -> ParamVector {
        s.parse().unwrap()
    }

    #[test]
    fn eigen_witness_set_example() {
        let cert = build_norm(&p("6 -5"), Some(1.5)).unwrap();
        let ws = witness_set(&cert).unwrap();
        assert!(ws.contains([0, 0]));
        assert!(!ws.contains([1, -1]));
        assert!(ws.contains([0, 1]));
        for x in ws.iter() {
            assert!(cert.norm_int(&x) <= 2.0 + 1e-6);
        }
    }

    #[test]
    fn witness_set_is_complete_in_its_box() {
        let cert = build_norm(&p("3/2 0"), None).unwrap();
        let ws = witness_set(&cert).unwrap();
        let [b0, b1] = ws.bounds();
        // nothing just outside the box is inside the ball
        for a in -(b0 + 3)..=(b0 + 3) {
            for b in -(b1 + 3)..=(b1 + 3) {
                if a.abs() > b0 || b.abs() > b1 {
                    assert!(cert.norm_int(&[a, b]) > cert.threshold(), "({a},{b})");
                }
            }
        }
        assert!(ws.len() > 1);
    }

    #[test]
    fn exact_step_matches_generic_step() {
        let r = p("7/5 -3/7");
        let s = ExactStep::new(&r).unwrap();
        for a in -20..=20 {
            for b in -20..=20 {
                let x = LatticePoint(vec![a, b]);
                assert_eq!(s.step([a, b]).unwrap().to_vec(), srs_step(&r, &x).unwrap().0);
            }
        }
    }

    #[test]
    fn decide_examples() {
        assert_eq!(decide_point(&p("3/2 0")).unwrap().status(), Status::InDStar);
        assert_eq!(decide_point(&p("6 -5")).unwrap().status(), Status::InDStar);
        let v = decide_point(&p("6/5 -3/2")).unwrap();
        assert_eq!(v.cycle().unwrap().entries(), &[1]);
        assert_eq!(decide_point(&p("1 0")), Err(CertError::NotExpanding));
    }

    #[test]
    fn all_cycles_verify() {
        for s in ["6/5 -3/2", "2 5/2", "-3 -1/2", "-5/2 7/10", "7/5 -9/4"] {
            let r = p(s);
            let d = decide_point_report(&r, None).unwrap();
            for c in &d.cycles {
                assert!(verify_cycle(&r, c), "{s}: {c}");
            }
        }
    }

    #[test]
    fn float_parameters_are_refused() {
        let r = ParamVector::from_f64s(&[1.5, 0.0]).unwrap();
        assert!(matches!(decide_point(&r), Err(CertError::Srs(SrsError::NotExact))));
    }
}
