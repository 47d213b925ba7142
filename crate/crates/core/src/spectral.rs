//! Roots of the characteristic polynomial and the bounds they imply on
//! bounded orbits and cycles.

use std::cmp::Ordering;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Result;
use crate::param::{ParamVector, WideRational};

/// Root moduli closer than this to 1 make every bound invalid.
pub const UNIT_MODULUS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumKind {
    RealDistinct,
    RealRepeated,
    ComplexPair,
}

/// Roots `beta_1, ..., beta_d` ordered by nondecreasing modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub roots: Vec<Complex64>,
    pub moduli: Vec<f64>,
    /// Only set for quadratics.
    pub kind: Option<SpectrumKind>,
    /// Sign of `r_1^2 - 4 r_0`; exact when the parameter is rational.
    pub discriminant_sign: Option<Ordering>,
}

impl Spectrum {
    /// Wraps caller-supplied roots (any degree).
    pub fn from_roots(mut roots: Vec<Complex64>) -> Self {
        roots.sort_by(|a, b| {
            a.norm()
                .total_cmp(&b.norm())
                .then(a.re.total_cmp(&b.re))
                .then(a.im.total_cmp(&b.im))
        });
        let moduli = roots.iter().map(|z| z.norm()).collect();
        Self {
            roots,
            moduli,
            kind: None,
            discriminant_sign: None,
        }
    }

    pub fn min_modulus(&self) -> f64 {
        self.moduli.first().copied().unwrap_or(f64::NAN)
    }

    /// True if no modulus lies within [`UNIT_MODULUS_TOLERANCE`] of 1.
    pub fn off_unit_circle(&self) -> bool {
        self.moduli
            .iter()
            .all(|m| (m - 1.0).abs() > UNIT_MODULUS_TOLERANCE)
    }

    pub fn real_roots(&self) -> Option<(f64, f64)> {
        match self.kind {
            Some(SpectrumKind::RealDistinct) | Some(SpectrumKind::RealRepeated) => {
                Some((self.roots[0].re, self.roots[1].re))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum BoundError {
    #[error("a root modulus is within tolerance of 1; the bound diverges")]
    NearUnitModulus,
    #[error("requires a quadratic")]
    NotQuadratic,
    #[error("requires real roots")]
    ComplexRoots,
    #[error("root must not be +1 or -1")]
    UnitRoot,
}

/// Exact sign of `r_1^2 - 4 r_0` when possible, else the float sign.
pub fn discriminant_sign(r: &ParamVector) -> Result<Ordering> {
    r.require_dim(2)?;
    match r.exact() {
        Some(q) => {
            let r0 = WideRational::new(*q[0].numer() as i128, *q[0].denom() as i128);
            let r1 = WideRational::new(*q[1].numer() as i128, *q[1].denom() as i128);
            let disc = r1 * r1 - WideRational::from_integer(4) * r0;
            Ok(disc.cmp(&WideRational::zero()))
        }
        None => {
            let (r0, r1) = (r.approx_at(0), r.approx_at(1));
            Ok((r1 * r1 - 4.0 * r0).total_cmp(&0.0))
        }
    }
}

/// Closed-form roots of `x^2 + r_1 x + r_0`.
pub fn quadratic_roots(r: &ParamVector) -> Result<Spectrum> {
    let sign = discriminant_sign(r)?;
    let (r0, r1) = (r.approx_at(0), r.approx_at(1));
    let disc = r1 * r1 - 4.0 * r0;
    let (roots, kind) = match sign {
        Ordering::Greater => {
            let sq = disc.max(0.0).sqrt();
            // avoid cancellation: take the larger-magnitude root first
            let q = -0.5 * (r1 + if r1 >= 0.0 { sq } else { -sq });
            let roots = if q == 0.0 {
                vec![Complex64::new(0.5 * sq, 0.0), Complex64::new(-0.5 * sq, 0.0)]
            } else {
                vec![Complex64::new(q, 0.0), Complex64::new(r0 / q, 0.0)]
            };
            (roots, SpectrumKind::RealDistinct)
        }
        Ordering::Equal => {
            let root = Complex64::new(-0.5 * r1, 0.0);
            (vec![root, root], SpectrumKind::RealRepeated)
        }
        Ordering::Less => {
            let re = -0.5 * r1;
            let im = 0.5 * (-disc).max(0.0).sqrt();
            (
                vec![Complex64::new(re, -im), Complex64::new(re, im)],
                SpectrumKind::ComplexPair,
            )
        }
    };
    let mut s = Spectrum::from_roots(roots);
    if kind == SpectrumKind::ComplexPair {
        // both moduli are sqrt(r_0); avoid hypot rounding asymmetry
        let m = r0.sqrt();
        s.moduli = vec![m, m];
    }
    s.kind = Some(kind);
    s.discriminant_sign = Some(sign);
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchurCohn {
    Inside,
    Boundary,
    Outside,
}

/// Membership in the region where both roots lie strictly inside the unit
/// disc: `|r_0| < 1` and `|r_1| < 1 + r_0`.
pub fn schur_cohn_member(r: &ParamVector) -> Result<SchurCohn> {
    r.require_dim(2)?;
    let (inside, closure) = match r.exact() {
        Some(q) => {
            let one = crate::param::Rational::from_integer(1);
            let (r0, r1) = (q[0], q[1]);
            (
                r0.abs() < one && r1.abs() < one + r0,
                r0.abs() <= one && r1.abs() <= one + r0,
            )
        }
        None => {
            let (r0, r1) = (r.approx_at(0), r.approx_at(1));
            (
                r0.abs() < 1.0 && r1.abs() < 1.0 + r0,
                r0.abs() <= 1.0 && r1.abs() <= 1.0 + r0,
            )
        }
    };
    Ok(if inside {
        SchurCohn::Inside
    } else if closure {
        SchurCohn::Boundary
    } else {
        SchurCohn::Outside
    })
}

/// Rounds a positive bound up by a few ulps.
fn outward(x: f64) -> f64 {
    x * (1.0 + 8.0 * f64::EPSILON) + f64::MIN_POSITIVE
}

/// `E / prod_j |1 - |beta_j||`, the asymptotic bound on a bounded sequence
/// whose linear recurrence residual is at most `E` in absolute value.
pub fn nlrs_bound(spectrum: &Spectrum, e: f64) -> Result<f64, BoundError> {
    if !spectrum.off_unit_circle() {
        return Err(BoundError::NearUnitModulus);
    }
    let prod: f64 = spectrum.moduli.iter().map(|m| (1.0 - m).abs()).product();
    Ok(outward(e / prod))
}

/// Bound on every element of every cycle: `1 / prod |1 - |beta_j||`.
pub fn cycle_bound(r: &ParamVector) -> Result<Result<f64, BoundError>> {
    let s = quadratic_roots(r)?;
    Ok(nlrs_bound(&s, 1.0))
}

/// Checks `|a| <= cycle_bound(r)`. Exact when both roots are real with the
/// same sign (then the product equals `|p(1)|` or `|p(-1)|`), otherwise an
/// outward-rounded float comparison.
pub fn cycle_bound_admits(r: &ParamVector, a: i64) -> Result<Result<bool, BoundError>> {
    let s = quadratic_roots(r)?;
    let bound = match nlrs_bound(&s, 1.0) {
        Ok(b) => b,
        Err(e) => return Ok(Err(e)),
    };
    if let (Some(q), Some((x, y))) = (r.exact(), s.real_roots()) {
        let one = crate::param::Rational::from_integer(1);
        let prod = if x > 0.0 && y > 0.0 {
            Some(one + q[1] + q[0])
        } else if x < 0.0 && y < 0.0 {
            Some(one - q[1] + q[0])
        } else {
            None
        };
        if let Some(prod) = prod {
            let lhs = WideRational::from_integer(a.unsigned_abs() as i128)
                * WideRational::new(prod.numer().abs() as i128, *prod.denom() as i128);
            return Ok(Ok(lhs <= WideRational::from_integer(1)));
        }
    }
    Ok(Ok((a.unsigned_abs() as f64) <= bound))
}

/// `(1/||alpha_2|-1|, 1/||alpha_1|-1|)`, bounding `|a_{n+1} - alpha_1 a_n|`
/// and `|a_{n+1} - alpha_2 a_n|` on cycles, where `alpha_1` is the root of
/// smaller modulus.
pub fn pair_bounds(spectrum: &Spectrum) -> Result<(f64, f64), BoundError> {
    if spectrum.roots.len() != 2 {
        return Err(BoundError::NotQuadratic);
    }
    if !spectrum.off_unit_circle() {
        return Err(BoundError::NearUnitModulus);
    }
    let m1 = spectrum.moduli[0];
    let m2 = spectrum.moduli[1];
    Ok((outward(1.0 / (m2 - 1.0).abs()), outward(1.0 / (m1 - 1.0).abs())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootCase {
    /// `0 <= alpha_2 < 1`
    NonNegativeInside,
    /// `alpha_2 > 1`
    AboveOne,
    /// `-1 < alpha_2 < 0`
    NegativeInside,
    /// `alpha_2 < -1`
    BelowMinusOne,
}

/// The interval containing `a_{n+1} - alpha_1 a_n` for cycle elements when
/// both roots are real. Endpoint flags follow the strict/weak inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferenceInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
    pub case: RootCase,
}

impl DifferenceInterval {
    pub fn contains(&self, v: f64) -> bool {
        let above = if self.lo_closed { v >= self.lo } else { v > self.lo };
        let below = if self.hi_closed { v <= self.hi } else { v < self.hi };
        above && below
    }

    /// Membership after widening both ends by `tol` (relative to the
    /// endpoint magnitude, with an absolute floor).
    pub fn contains_outward(&self, v: f64, tol: f64) -> bool {
        let widen = |x: f64| tol * x.abs().max(1.0);
        let lo = self.lo - widen(self.lo);
        let hi = self.hi + widen(self.hi);
        let above = if self.lo_closed { v >= lo } else { v > lo };
        let below = if self.hi_closed { v <= hi } else { v < hi };
        above && below
    }
}

/// The case-matched interval for `a_{n+1} - alpha_1 a_n` given the other
/// real root `alpha_2`.
pub fn difference_interval(alpha2: f64) -> Result<DifferenceInterval, BoundError> {
    if alpha2 == 1.0 || alpha2 == -1.0 || !alpha2.is_finite() {
        return Err(BoundError::UnitRoot);
    }
    let a = alpha2;
    Ok(if (0.0..1.0).contains(&a) {
        DifferenceInterval {
            lo: 0.0,
            hi: 1.0 / (1.0 - a),
            lo_closed: true,
            hi_closed: false,
            case: RootCase::NonNegativeInside,
        }
    } else if a > 1.0 {
        DifferenceInterval {
            lo: -1.0 / (a - 1.0),
            hi: 0.0,
            lo_closed: false,
            hi_closed: true,
            case: RootCase::AboveOne,
        }
    } else if a > -1.0 {
        let den = 1.0 - a * a;
        DifferenceInterval {
            lo: a / den,
            hi: 1.0 / den,
            lo_closed: false,
            hi_closed: false,
            case: RootCase::NegativeInside,
        }
    } else {
        let den = a * a - 1.0;
        DifferenceInterval {
            lo: -1.0 / den,
            hi: -a / den,
            lo_closed: false,
            hi_closed: false,
            case: RootCase::BelowMinusOne,
        }
    })
}

/// `b_n = a_{n+1} - alpha_1 a_n` around a cycle (indices taken cyclically).
pub fn root_differences(cycle: &[i64], alpha1: f64) -> Vec<f64> {
    let p = cycle.len();
    (0..p)
        .map(|n| cycle[(n + 1) % p] as f64 - alpha1 * cycle[n] as f64)
        .collect()
}

/// Everything the spectrum says about cycles of a two-dimensional parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub cycle_bound: Option<f64>,
    pub pair_bounds: Option<(f64, f64)>,
    /// `(alpha_1, interval for a_{n+1} - alpha_1 a_n)` with `alpha_1` the root
    /// of smaller modulus; present for real roots only.
    pub difference_interval: Option<(f64, DifferenceInterval)>,
    /// False when some root modulus is within tolerance of 1.
    pub valid: bool,
}

pub fn bound_report(r: &ParamVector) -> Result<BoundReport> {
    let s = quadratic_roots(r)?;
    let valid = s.off_unit_circle();
    let difference = s.real_roots().and_then(|(a1, a2)| {
        difference_interval(a2).ok().filter(|_| valid).map(|iv| (a1, iv))
    });
    Ok(BoundReport {
        cycle_bound: nlrs_bound(&s, 1.0).ok(),
        pair_bounds: pair_bounds(&s).ok(),
        difference_interval: difference,
        valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ParamVector {
        s.parse().unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn roots_examples() {
        let s = quadratic_roots(&p("1.1 -1.15")).unwrap();
        assert_eq!(s.kind, Some(SpectrumKind::ComplexPair));
        assert!(s.moduli.iter().all(|&m| close(m, 1.1f64.sqrt(), 1e-15) && m > 1.0));
        assert!(close(s.moduli[0], 1.0488, 1e-4));

        let s = quadratic_roots(&p("6 -5")).unwrap();
        assert_eq!(s.kind, Some(SpectrumKind::RealDistinct));
        assert_eq!(s.real_roots(), Some((2.0, 3.0)));

        let s = quadratic_roots(&p("4 -4")).unwrap();
        assert_eq!(s.kind, Some(SpectrumKind::RealRepeated));
        assert_eq!(s.real_roots(), Some((2.0, 2.0)));
        assert_eq!(s.discriminant_sign, Some(Ordering::Equal));
    }

    #[test]
    fn rejects_wrong_dimension() {
        assert!(quadratic_roots(&p("1 2 3")).is_err());
    }

    #[test]
    fn schur_cohn_examples() {
        assert_eq!(schur_cohn_member(&p("0 0")).unwrap(), SchurCohn::Inside);
        assert_eq!(schur_cohn_member(&p("1 0")).unwrap(), SchurCohn::Boundary);
        assert_eq!(schur_cohn_member(&p("0.9 1.85")).unwrap(), SchurCohn::Inside);
        assert_eq!(schur_cohn_member(&p("0 1")).unwrap(), SchurCohn::Boundary);
        assert_eq!(schur_cohn_member(&p("2 0")).unwrap(), SchurCohn::Outside);
    }

    #[test]
    fn nlrs_bound_examples() {
        let b = |roots: &[f64]| {
            let s = Spectrum::from_roots(roots.iter().map(|&x| Complex64::new(x, 0.0)).collect());
            nlrs_bound(&s, 1.0).unwrap()
        };
        assert!(close(b(&[2.0, 3.0]), 0.5, 1e-14));
        assert!(close(b(&[0.5]), 2.0, 1e-14));
        assert!(close(b(&[2.0, 2.0]), 1.0, 1e-14));
        let s = Spectrum::from_roots(vec![Complex64::new(1.0 + 1e-12, 0.0)]);
        assert_eq!(nlrs_bound(&s, 1.0), Err(BoundError::NearUnitModulus));
    }

    #[test]
    fn cycle_bound_closed_forms() {
        // real roots -1.5 and -4, both below -1: 1/(r0 - r1 + 1)
        let r = p("6 5.5");
        let (a, b) = quadratic_roots(&r).unwrap().real_roots().unwrap();
        assert!(a < -1.0 && b < -1.0);
        let bound = cycle_bound(&r).unwrap().unwrap();
        assert!(close(bound, 1.0 / (6.0 - 5.5 + 1.0), 1e-12));
        assert!(bound < 2.0);

        // complex pair: 1/(sqrt(r0) - 1)^2, below 2 when r0 > 3/2 + sqrt(2)
        let r = p("3 0");
        let bound = cycle_bound(&r).unwrap().unwrap();
        assert!(close(bound, 1.0 / (3f64.sqrt() - 1.0).powi(2), 1e-12));
        assert!(bound < 2.0);

        let bound = cycle_bound(&p("6 -5")).unwrap().unwrap();
        assert!(close(bound, 0.5, 1e-14));
        assert!(cycle_bound(&p("1 0")).unwrap().is_err());
    }

    #[test]
    fn exact_bound_comparison() {
        // roots 2, 3: product (1-2)(1-3) = 2 = p(1) = 1 - 5 + 6
        let r = p("6 -5");
        assert_eq!(cycle_bound_admits(&r, 0).unwrap(), Ok(true));
        assert_eq!(cycle_bound_admits(&r, 1).unwrap(), Ok(false));
        // roots -2, -3: p(-1) = 1 - 5 + 6 = 2
        let r = p("6 5");
        assert_eq!(cycle_bound_admits(&r, 1).unwrap(), Ok(false));
        // roots -1.5, -2: product 0.5 -> bound exactly 2
        let r = p("3 3.5");
        assert_eq!(cycle_bound_admits(&r, 2).unwrap(), Ok(true));
        assert_eq!(cycle_bound_admits(&r, 3).unwrap(), Ok(false));
    }

    #[test]
    fn pair_bounds_examples() {
        let s = quadratic_roots(&p("6 -5")).unwrap();
        let (b1, b2) = pair_bounds(&s).unwrap();
        assert!(close(b1, 0.5, 1e-14) && close(b2, 1.0, 1e-14));

        let s = quadratic_roots(&p("1.1 -1.15")).unwrap();
        let (b1, b2) = pair_bounds(&s).unwrap();
        let expect = 1.0 / (1.1f64.sqrt() - 1.0);
        assert!(close(b1, expect, 1e-12) && close(b2, expect, 1e-12));
        assert!(close(b1, 20.49, 1e-3));

        let s = Spectrum::from_roots(vec![Complex64::new(0.5, 0.0), Complex64::new(3.0, 0.0)]);
        let (b1, _) = pair_bounds(&s).unwrap();
        assert!(close(b1, 0.5, 1e-14));
    }

    #[test]
    fn difference_interval_cases() {
        let iv = difference_interval(0.5).unwrap();
        assert_eq!((iv.lo, iv.hi, iv.lo_closed, iv.hi_closed), (0.0, 2.0, true, false));
        assert!(iv.contains(0.0) && !iv.contains(2.0));

        let iv = difference_interval(2.0).unwrap();
        assert_eq!((iv.lo, iv.hi, iv.lo_closed, iv.hi_closed), (-1.0, 0.0, false, true));
        assert!(iv.contains(0.0) && !iv.contains(-1.0));

        let iv = difference_interval(-2.0).unwrap();
        assert!(close(iv.lo, -1.0 / 3.0, 1e-15) && close(iv.hi, 2.0 / 3.0, 1e-15));
        assert_eq!(iv.case, RootCase::BelowMinusOne);

        let iv = difference_interval(-0.5).unwrap();
        assert!(close(iv.lo, -0.5 / 0.75, 1e-15) && close(iv.hi, 1.0 / 0.75, 1e-15));
        assert_eq!(iv.case, RootCase::NegativeInside);

        assert_eq!(difference_interval(1.0), Err(BoundError::UnitRoot));
        assert_eq!(difference_interval(-1.0), Err(BoundError::UnitRoot));
    }

    #[test]
    fn report_flags_unit_modulus() {
        let rep = bound_report(&p("1 0.5")).unwrap();
        assert!(!rep.valid);
        assert!(rep.cycle_bound.is_none());
        let rep = bound_report(&p("6 -5")).unwrap();
        assert!(rep.valid);
        let (a1, iv) = rep.difference_interval.unwrap();
        assert_eq!(a1, 2.0);
        assert_eq!(iv.case, RootCase::AboveOne);
    }
}
