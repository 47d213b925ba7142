//! Expansion-adapted norms for expanding companion matrices.
//!
//! The norm is `N(x) = |S x|` where `S` is the inverse of a basis `T` in
//! which the companion matrix is (nearly) diagonal, a rotation-scaling, or
//! an `eps`-scaled Jordan block. The expansion constant of the norm is read
//! off `M = S R T` and lowered by a rounding slack proportional to the
//! condition number of `T`.

use std::cmp::Ordering;

use num_traits::Signed;
use serde::Serialize;

use super::CertError;
use crate::dynamics::EscapeCertificate;
use crate::param::{ParamVector, WideRational};
use crate::spectral::{discriminant_sign, quadratic_roots, SpectrumKind};

/// Margins below this are rejected.
pub const MARGIN_FLOOR: f64 = 1e-9;

/// Relative inflation applied to float membership tests and box bounds.
pub(crate) const INFLATION: f64 = 1e-9;

/// Per-unit-condition rounding slack subtracted from expansion constants.
pub(crate) const ROUNDING: f64 = 1e-12;

pub(crate) type Mat = [[f64; 2]; 2];

pub(crate) fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat_inv(a: &Mat) -> Mat {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ]
}

fn mat_norm_inf(a: &Mat) -> f64 {
    a.iter()
        .map(|row| row[0].abs() + row[1].abs())
        .fold(0.0, f64::max)
}

/// Smallest singular value of a 2x2 matrix.
fn sigma_min(a: &Mat) -> f64 {
    let p: f64 = a.iter().flatten().map(|v| v * v).sum();
    let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).abs();
    let disc = (p * p - 4.0 * det * det).max(0.0).sqrt();
    let smax = ((p + disc) / 2.0).sqrt();
    if smax == 0.0 {
        0.0
    } else {
        det / smax
    }
}

/// Which vector norm is applied to the transformed coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VectorNorm {
    Max,
    Euclidean,
}

impl VectorNorm {
    pub(crate) fn apply(&self, v: [f64; 2]) -> f64 {
        match self {
            VectorNorm::Max => v[0].abs().max(v[1].abs()),
            VectorNorm::Euclidean => v[0].hypot(v[1]),
        }
    }

    pub(crate) fn dual(&self, v: [f64; 2]) -> f64 {
        match self {
            VectorNorm::Max => v[0].abs() + v[1].abs(),
            VectorNorm::Euclidean => v[0].hypot(v[1]),
        }
    }
}

/// The basis the norm is built on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BasisKind {
    /// Columns `(1, l1)`, `(1, l2)`; max-norm of eigencoordinates.
    Eigen,
    /// Columns `(1, a)`, `(0, b)` for roots `a +- bi`; Euclidean norm.
    RotationScaling,
    /// Columns `(1, l)`, `(0, eps)` with `l = -r_1/2`; max-norm.
    Jordan { epsilon: f64 },
}

/// Exact-sign lower bound on `min |root| - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpandingMargin {
    pub kind: SpectrumKind,
    pub min_modulus: f64,
    pub margin: f64,
}

fn wide(q: &crate::param::Rational) -> WideRational {
    WideRational::new(*q.numer() as i128, *q.denom() as i128)
}

/// Both roots strictly outside the unit circle, decided exactly.
pub(crate) fn exact_expanding(r0: &WideRational, r1: &WideRational) -> bool {
    let one = WideRational::from_integer(1);
    (*r0 > one && r1.abs() < r0 + one) || (*r0 < -one && r1.abs() < -r0 - one)
}

/// `min |root| - 1` for `x^2 + r_1 x + r_0`, rejecting non-expanding
/// parameters and margins below [`MARGIN_FLOOR`].
pub fn expanding_margin(r: &ParamVector) -> Result<ExpandingMargin, CertError> {
    r.require_dim(2)?;
    let spectrum = quadratic_roots(r)?;
    let kind = spectrum.kind.expect("quadratic");
    let min_modulus = spectrum.min_modulus();
    let margin = match r.exact() {
        Some(q) => {
            let (r0, r1) = (wide(&q[0]), wide(&q[1]));
            if !exact_expanding(&r0, &r1) {
                return Err(CertError::NotExpanding);
            }
            match discriminant_sign(r)? {
                Ordering::Less => {
                    // modulus^2 = r0 exactly; sqrt(r0) - 1 = (r0 - 1)/(sqrt(r0) + 1)
                    let excess = crate::param::wide_to_f64(&(r0 - WideRational::from_integer(1)));
                    excess / (min_modulus + 1.0)
                }
                _ => min_modulus - 1.0,
            }
        }
        None => {
            if min_modulus < 1.0 - MARGIN_FLOOR {
                return Err(CertError::NotExpanding);
            }
            min_modulus - 1.0
        }
    };
    if !(margin >= MARGIN_FLOOR) {
        return Err(CertError::MarginTooSmall { margin });
    }
    Ok(ExpandingMargin {
        kind,
        min_modulus,
        margin,
    })
}

/// A norm `N` with `N(R x) >= expansion * N(x)` for all real `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormCertificate {
    pub parameter: ParamVector,
    pub spectrum: SpectrumKind,
    pub basis_kind: BasisKind,
    pub norm: VectorNorm,
    /// `T`, columns are the basis vectors.
    pub basis: Mat,
    /// `S = T^-1`.
    pub inverse: Mat,
    pub rho: f64,
    pub min_modulus: f64,
    /// Certified lower bound on `N(R x) / N(x)`.
    pub expansion: f64,
    /// `expansion - rho`.
    pub margin: f64,
    /// `N((0, 1))`, rounded up.
    pub unit_last_norm: f64,
    pub condition: f64,
}

impl NormCertificate {
    pub fn norm_of(&self, x: [f64; 2]) -> f64 {
        let s = &self.inverse;
        self.norm.apply([
            s[0][0] * x[0] + s[0][1] * x[1],
            s[1][0] * x[0] + s[1][1] * x[1],
        ])
    }

    pub fn norm_int(&self, x: &[i64]) -> f64 {
        self.norm_of([x[0] as f64, x[1] as f64])
    }

    /// `unit_last_norm / (rho - 1)`: every cycle lies in the closed ball of
    /// this radius.
    pub fn threshold(&self) -> f64 {
        self.unit_last_norm / (self.rho - 1.0)
    }

    /// Threshold widened to absorb rounding in [`Self::norm_of`].
    pub(crate) fn inflated_threshold(&self) -> f64 {
        self.threshold() * (1.0 + INFLATION) + ROUNDING
    }
}

impl EscapeCertificate for NormCertificate {
    fn parameter(&self) -> &ParamVector {
        &self.parameter
    }

    /// Outside the ball `N(tau(x)) >= rho N(x) - N((0,1)) > N(x)`, and the
    /// gap only grows.
    fn certifies_escape(&self, x: &[i64]) -> bool {
        x.len() == 2 && self.norm_int(x) > self.inflated_threshold()
    }
}

/// Builds the adapted norm. `rho` defaults to `(1 + min modulus) / 2`.
pub fn build_norm(r: &ParamVector, rho: Option<f64>) -> Result<NormCertificate, CertError> {
    let em = expanding_margin(r)?;
    let m = em.min_modulus;
    let rho = match rho {
        Some(p) if p > 1.0 && p < m => p,
        Some(p) => return Err(CertError::RhoOutOfRange { rho: p, limit: m }),
        None => 0.5 * (1.0 + m),
    };
    let (r0, r1) = (r.approx_at(0), r.approx_at(1));
    let lam = -0.5 * r1;
    let disc = r1 * r1 - 4.0 * r0;
    let eps = 0.5 * (lam.abs() - rho);
    let exact_repeated = em.kind == SpectrumKind::RealRepeated;

    let (basis_kind, norm, t): (BasisKind, VectorNorm, Mat) =
        if exact_repeated || (eps > 0.0 && disc.abs().sqrt() <= eps) {
            // near-double root: the eigen/rotation bases degenerate
            (
                BasisKind::Jordan { epsilon: eps },
                VectorNorm::Max,
                [[1.0, 0.0], [lam, eps]],
            )
        } else if disc > 0.0 {
            let spectrum = quadratic_roots(r)?;
            let (l1, l2) = spectrum.real_roots().expect("real");
            (BasisKind::Eigen, VectorNorm::Max, [[1.0, 1.0], [l1, l2]])
        } else {
            let b = 0.5 * (-disc).sqrt();
            (
                BasisKind::RotationScaling,
                VectorNorm::Euclidean,
                [[1.0, 0.0], [lam, b]],
            )
        };

    let s = mat_inv(&t);
    let companion: Mat = [[0.0, 1.0], [-r0, -r1]];
    let m_mat = mat_mul(&mat_mul(&s, &companion), &t);
    let raw = match norm {
        // row dominance: |(My)_i| >= (|M_ii| - |M_ij|) |y_i| at the maximal
        // coordinate i
        VectorNorm::Max => (m_mat[0][0].abs() - m_mat[0][1].abs())
            .min(m_mat[1][1].abs() - m_mat[1][0].abs()),
        VectorNorm::Euclidean => sigma_min(&m_mat),
    };
    let condition = mat_norm_inf(&t) * mat_norm_inf(&s);
    let slack = ROUNDING * condition * (1.0 + r0.abs() + r1.abs());
    let expansion = raw - slack;
    let margin = expansion - rho;
    if !(margin > 0.0) {
        return Err(CertError::MarginTooSmall { margin });
    }
    let unit_last_norm = norm.apply([s[0][1], s[1][1]]) * (1.0 + ROUNDING);

    Ok(NormCertificate {
        parameter: r.clone(),
        spectrum: em.kind,
        basis_kind,
        norm,
        basis: t,
        inverse: s,
        rho,
        min_modulus: m,
        expansion,
        margin,
        unit_last_norm,
        condition,
    })
}
