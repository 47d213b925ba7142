//! Closed-form classification of two-dimensional parameters.
//!
//! Every region is a finite conjunction of polynomial inequalities in
//! `(r_0, r_1)`. For rational parameters each inequality is decided exactly;
//! the ones involving `sqrt(r_0)`, `sqrt(2)` or `sqrt(5)` are squared out.
//! For float parameters, an inequality whose defining expression is within
//! the tolerance of zero is reported as undecided, and the point is
//! classified [`Verdict::BoundaryUndecidable`].

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{cycle_canonicalize, srs_step, CycleWitness, LatticePoint};
use crate::error::{Result, SrsError};
use crate::param::{ParamVector, WideRational};

/// Default distance to an irrational region boundary below which float
/// parameters are not classified.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Which result decided a verdict. `Display` gives the short tag used in
/// reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// Constant cycle `(1)` or `(-1)` on the strip `-2 < r_0 + r_1 < 0`.
    ConstantCycle,
    /// Cycle `(t, -t)` on the line `r_1 = r_0 + 1`.
    AlternatingCycle,
    /// Cycles `(0, -1)` and `(0, 1)` on two boxes with `r_0 < 0`.
    ZeroOneCycle,
    /// Two real roots above 1.
    RealRootsAboveOne,
    /// `r_0 + r_1 <= -2`.
    SumBelowMinusTwo,
    /// `r_0 < 0`, `r_1 >= 1`, `r_0 + r_1 >= 0`.
    NegativeConstantTerm,
    /// Sector transition argument for `r_0 - r_1 < -1`, `r_0 >= 0`.
    SectorTransitions,
    /// Cycle bound below 2 for large `r_0`.
    SmallCycleBound,
    /// Alternating-sign argument between `r_0 - r_1 = -1` and `-1/2`.
    AlternatingStrip,
    /// Decided by exhaustive search over a finite witness set.
    WitnessSearch,
    /// Certified decision for a single rational parameter.
    Certified,
}

impl Rule {
    pub fn tag(&self) -> &'static str {
        match self {
            Rule::ConstantCycle => "Lemma4.1",
            Rule::AlternatingCycle => "Lemma4.2",
            Rule::ZeroOneCycle => "Lemma4.3",
            Rule::RealRootsAboveOne => "Thm4.4i",
            Rule::SumBelowMinusTwo => "Thm4.4ii",
            Rule::NegativeConstantTerm => "Thm4.4iii",
            Rule::SectorTransitions => "Thm4.5",
            Rule::SmallCycleBound => "Thm4.7",
            Rule::AlternatingStrip => "Thm4.8",
            Rule::WitnessSearch => "Thm4.9",
            Rule::Certified => "Certified",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Rule> {
        ALL_RULES.iter().copied().find(|r| r.tag() == tag)
    }
}

const ALL_RULES: [Rule; 11] = [
    Rule::ConstantCycle,
    Rule::AlternatingCycle,
    Rule::ZeroOneCycle,
    Rule::RealRootsAboveOne,
    Rule::SumBelowMinusTwo,
    Rule::NegativeConstantTerm,
    Rule::SectorTransitions,
    Rule::SmallCycleBound,
    Rule::AlternatingStrip,
    Rule::WitnessSearch,
    Rule::Certified,
];

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Status {
    InDStar,
    NotInDStar,
    Contractive,
    UnknownBounded,
    BoundaryUndecidable,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::InDStar => "InDStar",
            Status::NotInDStar => "NotInDStar",
            Status::Contractive => "Contractive",
            Status::UnknownBounded => "UnknownBounded",
            Status::BoundaryUndecidable => "BoundaryUndecidable",
        }
    }

    pub fn from_name(s: &str) -> Option<Status> {
        [
            Status::InDStar,
            Status::NotInDStar,
            Status::Contractive,
            Status::UnknownBounded,
            Status::BoundaryUndecidable,
        ]
        .into_iter()
        .find(|st| st.name() == s)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Classification of a parameter point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum Verdict {
    InDStar { rule: Rule },
    NotInDStar { cycle: CycleWitness, rule: Rule },
    Contractive,
    UnknownBounded,
    BoundaryUndecidable,
}

impl Verdict {
    pub fn status(&self) -> Status {
        match self {
            Verdict::InDStar { .. } => Status::InDStar,
            Verdict::NotInDStar { .. } => Status::NotInDStar,
            Verdict::Contractive => Status::Contractive,
            Verdict::UnknownBounded => Status::UnknownBounded,
            Verdict::BoundaryUndecidable => Status::BoundaryUndecidable,
        }
    }

    pub fn rule(&self) -> Option<Rule> {
        match self {
            Verdict::InDStar { rule } | Verdict::NotInDStar { rule, .. } => Some(*rule),
            _ => None,
        }
    }

    pub fn cycle(&self) -> Option<&CycleWitness> {
        match self {
            Verdict::NotInDStar { cycle, .. } => Some(cycle),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::InDStar { rule } => write!(f, "InDStar rule={rule}"),
            Verdict::NotInDStar { cycle, rule } => write!(f, "NotInDStar cycle={cycle} rule={rule}"),
            other => f.write_str(other.status().name()),
        }
    }
}

/// Three-valued truth for inequalities evaluated with a tolerance band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tri {
    Yes,
    No,
    Unsure,
}

impl Tri {
    fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::No, _) | (_, Tri::No) => Tri::No,
            (Tri::Yes, Tri::Yes) => Tri::Yes,
            _ => Tri::Unsure,
        }
    }

    fn not(self) -> Tri {
        match self {
            Tri::Yes => Tri::No,
            Tri::No => Tri::Yes,
            Tri::Unsure => Tri::Unsure,
        }
    }

    fn all(items: &[Tri]) -> Tri {
        items.iter().fold(Tri::Yes, |acc, &t| acc.and(t))
    }
}

type W = WideRational;

fn w(n: i128) -> W {
    W::from_integer(n)
}

fn half(n: i128) -> W {
    W::new(n, 2)
}

/// A point where each predicate is decided exactly or in float.
struct Point {
    exact: Option<(W, W)>,
    approx: (f64, f64),
    tol: f64,
}

impl Point {
    fn new(r: &ParamVector, tol: f64) -> Self {
        let exact = r.exact().map(|q| {
            (
                W::new(*q[0].numer() as i128, *q[0].denom() as i128),
                W::new(*q[1].numer() as i128, *q[1].denom() as i128),
            )
        });
        Self {
            exact,
            approx: (r.approx_at(0), r.approx_at(1)),
            tol,
        }
    }

    /// Sign of a polynomial expression, `None` when a float value is within
    /// the tolerance band.
    fn sign(&self, exact: impl Fn(&W, &W) -> W, approx: impl Fn(f64, f64) -> f64) -> Option<Ordering> {
        match &self.exact {
            Some((r0, r1)) => Some(exact(r0, r1).cmp(&W::zero())),
            None => {
                let v = approx(self.approx.0, self.approx.1);
                if v.abs() <= self.tol {
                    None
                } else {
                    Some(v.total_cmp(&0.0))
                }
            }
        }
    }

    fn test(
        &self,
        exact: impl Fn(&W, &W) -> W,
        approx: impl Fn(f64, f64) -> f64,
        accept: impl Fn(Ordering) -> bool,
    ) -> Tri {
        match self.sign(exact, approx) {
            Some(o) if accept(o) => Tri::Yes,
            Some(_) => Tri::No,
            None => Tri::Unsure,
        }
    }

    /// `c0 r0 + c1 r1 + c  (op)  0`
    fn lin(&self, c0: W, c1: W, c: W, accept: impl Fn(Ordering) -> bool) -> Tri {
        let (f0, f1, fc) = (to_f64(&c0), to_f64(&c1), to_f64(&c));
        self.test(
            |r0, r1| c0 * r0 + c1 * r1 + c,
            |r0, r1| f0 * r0 + f1 * r1 + fc,
            accept,
        )
    }

    fn r0(&self, c: W, accept: impl Fn(Ordering) -> bool) -> Tri {
        self.lin(w(1), w(0), -c, accept)
    }

    fn r1(&self, c: W, accept: impl Fn(Ordering) -> bool) -> Tri {
        self.lin(w(0), w(1), -c, accept)
    }

    fn sum(&self, c: W, accept: impl Fn(Ordering) -> bool) -> Tri {
        self.lin(w(1), w(1), -c, accept)
    }

    /// `r0 - r1 (op) c`
    fn diff(&self, c: W, accept: impl Fn(Ordering) -> bool) -> Tri {
        self.lin(w(1), w(-1), -c, accept)
    }

    /// `r1^2 - 4 r0 (op) 0`
    fn disc(&self, accept: impl Fn(Ordering) -> bool) -> Tri {
        self.test(|r0, r1| r1 * r1 - w(4) * r0, |r0, r1| r1 * r1 - 4.0 * r0, accept)
    }

    /// `r1 <= -2 sqrt(r0)`, assuming `r0 >= 0`.
    fn below_neg_two_sqrt(&self) -> Tri {
        match &self.exact {
            Some((r0, r1)) => bool_tri(!r1.is_positive() && r1 * r1 >= w(4) * r0),
            None => self.test(
                |_, _| W::zero(),
                |r0, r1| r1 + 2.0 * r0.max(0.0).sqrt(),
                |o| o != Ordering::Greater,
            ),
        }
    }

    /// `r1 >= -2 sqrt(r0)`, assuming `r0 >= 0`.
    fn above_neg_two_sqrt(&self) -> Tri {
        match &self.exact {
            Some((r0, r1)) => bool_tri(!r1.is_negative() || r1 * r1 <= w(4) * r0),
            None => self.test(
                |_, _| W::zero(),
                |r0, r1| r1 + 2.0 * r0.max(0.0).sqrt(),
                |o| o != Ordering::Less,
            ),
        }
    }

    /// `r0 > 3/2 + sqrt(2)`
    fn r0_above_three_halves_plus_sqrt2(&self) -> Tri {
        match &self.exact {
            Some((r0, _)) => {
                let d = r0 - half(3);
                bool_tri(d.is_positive() && d * d > w(2))
            }
            None => self.test(
                |_, _| W::zero(),
                |r0, _| r0 - 1.5 - std::f64::consts::SQRT_2,
                |o| o == Ordering::Greater,
            ),
        }
    }

    /// `r1 >= 1 + sqrt(5)`
    fn r1_above_one_plus_sqrt5(&self) -> Tri {
        match &self.exact {
            Some((_, r1)) => {
                let d = r1 - w(1);
                bool_tri(!d.is_negative() && d * d >= w(5))
            }
            None => self.test(
                |_, _| W::zero(),
                |_, r1| r1 - 1.0 - 5f64.sqrt(),
                |o| o != Ordering::Less,
            ),
        }
    }
}

fn to_f64(q: &W) -> f64 {
    crate::param::wide_to_f64(q)
}

fn bool_tri(b: bool) -> Tri {
    if b {
        Tri::Yes
    } else {
        Tri::No
    }
}

fn lt(o: Ordering) -> bool {
    o == Ordering::Less
}
fn le(o: Ordering) -> bool {
    o != Ordering::Greater
}
fn gt(o: Ordering) -> bool {
    o == Ordering::Greater
}
fn ge(o: Ordering) -> bool {
    o != Ordering::Less
}
fn eq(o: Ordering) -> bool {
    o == Ordering::Equal
}

/// One region of the classification, in evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    ConstantOne,
    ConstantMinusOne,
    ZeroMinusOneBox,
    ZeroOneBox,
    AlternatingLine,
    SchurCohnClosure,
    RealRootsAboveOne,
    SumBelowMinusTwo,
    NegativeConstantTerm,
    SectorTransitions,
    SmallCycleBound,
    AlternatingStrip,
    WitnessSearch,
    UnknownBand,
}

impl Region {
    pub const ORDER: [Region; 14] = [
        Region::ConstantOne,
        Region::ConstantMinusOne,
        Region::ZeroMinusOneBox,
        Region::ZeroOneBox,
        Region::AlternatingLine,
        Region::SchurCohnClosure,
        Region::RealRootsAboveOne,
        Region::SumBelowMinusTwo,
        Region::NegativeConstantTerm,
        Region::SectorTransitions,
        Region::SmallCycleBound,
        Region::AlternatingStrip,
        Region::WitnessSearch,
        Region::UnknownBand,
    ];

    /// The verdict a point of this region receives.
    pub fn verdict(&self) -> Verdict {
        let cyc = |e: &[i64]| cycle_canonicalize(e).expect("nonempty");
        match self {
            Region::ConstantOne => Verdict::NotInDStar {
                cycle: cyc(&[1]),
                rule: Rule::ConstantCycle,
            },
            Region::ConstantMinusOne => Verdict::NotInDStar {
                cycle: cyc(&[-1]),
                rule: Rule::ConstantCycle,
            },
            Region::ZeroMinusOneBox => Verdict::NotInDStar {
                cycle: cyc(&[0, -1]),
                rule: Rule::ZeroOneCycle,
            },
            Region::ZeroOneBox => Verdict::NotInDStar {
                cycle: cyc(&[0, 1]),
                rule: Rule::ZeroOneCycle,
            },
            Region::AlternatingLine => Verdict::NotInDStar {
                cycle: cyc(&[1, -1]),
                rule: Rule::AlternatingCycle,
            },
            Region::SchurCohnClosure => Verdict::Contractive,
            Region::RealRootsAboveOne => Verdict::InDStar {
                rule: Rule::RealRootsAboveOne,
            },
            Region::SumBelowMinusTwo => Verdict::InDStar {
                rule: Rule::SumBelowMinusTwo,
            },
            Region::NegativeConstantTerm => Verdict::InDStar {
                rule: Rule::NegativeConstantTerm,
            },
            Region::SectorTransitions => Verdict::InDStar {
                rule: Rule::SectorTransitions,
            },
            Region::SmallCycleBound => Verdict::InDStar {
                rule: Rule::SmallCycleBound,
            },
            Region::AlternatingStrip => Verdict::InDStar {
                rule: Rule::AlternatingStrip,
            },
            Region::WitnessSearch => Verdict::InDStar {
                rule: Rule::WitnessSearch,
            },
            Region::UnknownBand => Verdict::UnknownBounded,
        }
    }

    fn test(&self, p: &Point) -> Tri {
        let third = |n: i128| W::new(n, 3);
        match self {
            // -1 <= r0 + r1 < 0
            Region::ConstantOne => p.sum(w(-1), ge).and(p.sum(w(0), lt)),
            // -2 < r0 + r1 < -1
            Region::ConstantMinusOne => p.sum(w(-2), gt).and(p.sum(w(-1), lt)),
            // -2 < r0 <= -1, -1 < r1 <= 0
            Region::ZeroMinusOneBox => Tri::all(&[
                p.r0(w(-2), gt),
                p.r0(w(-1), le),
                p.r1(w(-1), gt),
                p.r1(w(0), le),
            ]),
            // -1 <= r0 < 0, 0 <= r1 < 1
            Region::ZeroOneBox => Tri::all(&[
                p.r0(w(-1), ge),
                p.r0(w(0), lt),
                p.r1(w(0), ge),
                p.r1(w(1), lt),
            ]),
            // r0 - r1 + 1 = 0
            Region::AlternatingLine => p.diff(w(-1), eq),
            // |r0| <= 1, |r1| <= 1 + r0
            Region::SchurCohnClosure => Tri::all(&[
                p.r0(w(-1), ge),
                p.r0(w(1), le),
                p.lin(w(1), w(-1), w(1), ge),
                p.lin(w(1), w(1), w(1), ge),
            ]),
            // r0 > 0, r1 <= -2 sqrt(r0), r0 + r1 >= 0
            Region::RealRootsAboveOne => {
                let pos = p.r0(w(0), gt);
                pos.and(p.sum(w(0), ge)).and(if pos == Tri::No {
                    Tri::No
                } else {
                    p.below_neg_two_sqrt()
                })
            }
            // r0 + r1 <= -2, r0 - r1 != -1, not (r0 > -2 and r1 > -1)
            Region::SumBelowMinusTwo => Tri::all(&[
                p.sum(w(-2), le),
                p.diff(w(-1), eq).not(),
                p.r0(w(-2), gt).and(p.r1(w(-1), gt)).not(),
            ]),
            // r0 + r1 >= 0, r0 < 0, r1 >= 1
            Region::NegativeConstantTerm => {
                Tri::all(&[p.sum(w(0), ge), p.r0(w(0), lt), p.r1(w(1), ge)])
            }
            // r0 - r1 < -1, r0 >= 0
            Region::SectorTransitions => p.diff(w(-1), lt).and(p.r0(w(0), ge)),
            // r0 - r1 > -1/2, r1 >= max(-2 sqrt(r0), -r0), r0 > 3/2 + sqrt(2)
            Region::SmallCycleBound => {
                let big = p.r0_above_three_halves_plus_sqrt2();
                if big == Tri::No {
                    return Tri::No;
                }
                Tri::all(&[
                    big,
                    p.diff(half(-1), gt),
                    p.above_neg_two_sqrt(),
                    p.sum(w(0), ge),
                ])
            }
            // -1 < r0 - r1 <= -1/2, r1 >= 1 + sqrt(5), r1^2 >= 4 r0
            Region::AlternatingStrip => Tri::all(&[
                p.diff(w(-1), gt),
                p.diff(half(-1), le),
                p.r1_above_one_plus_sqrt5(),
                p.disc(ge),
            ]),
            // r0 >= 4/3, -r0 <= r1 < r0 + 1
            Region::WitnessSearch => Tri::all(&[
                p.r0(third(4), ge),
                p.sum(w(0), ge),
                p.diff(w(-1), gt),
            ]),
            // 1 <= r0 < 4/3, -r0 <= r1 < r0 + 1; cycles occur on both sides
            // of r1 = r0 - 1 here
            Region::UnknownBand => Tri::all(&[
                p.r0(w(1), ge),
                p.r0(third(4), lt),
                p.sum(w(0), ge),
                p.diff(w(-1), gt),
            ]),
        }
    }
}

/// Classifies `r` with the default boundary tolerance.
pub fn classify(r: &ParamVector) -> Result<Verdict> {
    classify_with_tolerance(r, BOUNDARY_TOLERANCE)
}

/// Evaluates the regions in precedence order: explicit cycles, the closed
/// Schur-Cohn region, the positive results, the witness-search band, and
/// finally the unknown band 1 <= r0 < 4/3.
pub fn classify_with_tolerance(r: &ParamVector, tol: f64) -> Result<Verdict> {
    r.require_dim(2)?;
    let p = Point::new(r, tol);
    for region in Region::ORDER {
        match region.test(&p) {
            Tri::Yes => return Ok(region.verdict()),
            Tri::Unsure => return Ok(Verdict::BoundaryUndecidable),
            Tri::No => {}
        }
    }
    // the regions cover the plane; this is only reachable through rounding
    // of float parameters
    Ok(Verdict::BoundaryUndecidable)
}

/// All regions containing `r`, ignoring precedence. Float parameters
/// within the tolerance of a boundary count as inside.
pub fn matching_regions(r: &ParamVector) -> Result<Vec<Region>> {
    r.require_dim(2)?;
    let p = Point::new(r, BOUNDARY_TOLERANCE);
    Ok(Region::ORDER
        .into_iter()
        .filter(|reg| reg.test(&p) != Tri::No)
        .collect())
}

/// The seven-set partition of the integer plane used for the sector
/// transition argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    S0,
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
}

impl Sector {
    /// Sectors a point of this sector can be mapped to.
    pub fn successors(&self) -> &'static [Sector] {
        use Sector::*;
        match self {
            S0 => &[S0],
            S1 => &[S2],
            S2 => &[S1],
            S3 => &[S1, S0],
            S4 => &[S2, S0],
            S5 => &[S2, S4, S6],
            S6 => &[S1, S3, S5],
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub fn sector(x: &LatticePoint) -> Result<Sector> {
    if x.dim() != 2 {
        return Err(SrsError::DimensionMismatch {
            expected: 2,
            found: x.dim(),
        });
    }
    let (a1, a2) = (x.0[0], x.0[1]);
    Ok(if a1 == 0 && a2 == 0 {
        Sector::S0
    } else if a1 >= 0 && a2 <= -a1 {
        Sector::S1
    } else if a1 <= 0 && a2 >= -a1 {
        Sector::S2
    } else if a1 > 0 && a2 >= 0 {
        Sector::S3
    } else if a1 < 0 && a2 <= 0 {
        Sector::S4
    } else if a1 >= 0 {
        // -a1 < a2 < 0
        Sector::S5
    } else {
        // 0 < a2 < -a1
        Sector::S6
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransitionError {
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error(transparent)]
    Srs(#[from] SrsError),
}

/// Checks that one step from `x` lands in a sector allowed by the
/// transition graph. Requires `r_0 - r_1 < -1`, `r_0 >= 0` and `x != 0`.
pub fn sector_transition_ok(r: &ParamVector, x: &LatticePoint) -> Result<bool, TransitionError> {
    r.require_dim(2)?;
    let p = Point::new(r, 0.0);
    if Region::SectorTransitions.test(&p) != Tri::Yes {
        return Err(TransitionError::Precondition(
            "parameter outside r0 - r1 < -1, r0 >= 0",
        ));
    }
    if x.is_zero() {
        return Err(TransitionError::Precondition("x must be nonzero"));
    }
    let from = sector(x)?;
    let to = sector(&srs_step(r, x)?)?;
    Ok(from.successors().contains(&to))
}
