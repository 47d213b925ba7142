//! Parameter vectors with an exact rational path and a float shadow.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Result, SrsError};

/// Exact rational coefficient type.
pub type Rational = Ratio<i64>;

/// Rational with wide numerator/denominator, used for dot products and
/// fractional parts.
pub type WideRational = Ratio<i128>;

/// One entry of a [`ParamVector`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficient {
    exact: Option<Rational>,
    approx: f64,
}

impl Coefficient {
    pub fn from_rational(q: Rational) -> Self {
        Self {
            exact: Some(q),
            approx: rational_to_f64(&q),
        }
    }

    /// A coefficient known only in floating point (e.g. an irrational value).
    pub fn from_f64(x: f64) -> Self {
        Self {
            exact: None,
            approx: x,
        }
    }

    pub fn exact(&self) -> Option<Rational> {
        self.exact
    }

    pub fn approx(&self) -> f64 {
        self.approx
    }
}

/// The parameter `r = (r_0, ..., r_{d-1})` of a shift radix system.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    coeffs: Vec<Coefficient>,
}

impl ParamVector {
    pub fn new(coeffs: Vec<Coefficient>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(SrsError::UnsupportedDimension {
                expected: 1,
                found: 0,
            });
        }
        Ok(Self { coeffs })
    }

    pub fn from_rationals(entries: &[Rational]) -> Result<Self> {
        Self::new(entries.iter().copied().map(Coefficient::from_rational).collect())
    }

    pub fn from_f64s(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().copied().map(Coefficient::from_f64).collect())
    }

    /// Two-dimensional exact parameter `(n0/d0, n1/d1)`.
    pub fn ratio2(n0: i64, d0: i64, n1: i64, d1: i64) -> Self {
        Self {
            coeffs: vec![
                Coefficient::from_rational(Rational::new(n0, d0)),
                Coefficient::from_rational(Rational::new(n1, d1)),
            ],
        }
    }

    /// Parses each entry with [`parse_rational`]; entries are exact.
    pub fn parse<S: AsRef<str>>(entries: &[S]) -> Result<Self> {
        let qs = entries
            .iter()
            .map(|s| parse_rational(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rationals(&qs)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Coefficient] {
        &self.coeffs
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(|c| c.exact.is_some())
    }

    /// All entries as rationals, if every entry is exact.
    pub fn exact(&self) -> Option<Vec<Rational>> {
        self.coeffs.iter().map(|c| c.exact).collect()
    }

    pub fn approx(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.approx).collect()
    }

    pub fn approx_at(&self, i: usize) -> f64 {
        self.coeffs[i].approx
    }

    pub fn exact_at(&self, i: usize) -> Option<Rational> {
        self.coeffs[i].exact
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(SrsError::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    pub(crate) fn require_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(SrsError::UnsupportedDimension {
                expected,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for ParamVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match c.exact {
                Some(q) => write!(f, "{q}")?,
                None => write!(f, "{}", c.approx)?,
            }
        }
        write!(f, ")")
    }
}

/// Nearest `f64` to a rational.
pub fn rational_to_f64(q: &Rational) -> f64 {
    // i64 -> f64 conversions are exact up to 2^53, which covers every
    // denominator used in practice; larger values round once more.
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn wide_to_f64(q: &WideRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Parses `p/q`, integers, and decimals such as `-1.15` or `2.5e-1` into an
/// exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = || SrsError::Parse(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| err())?;
        let d: i64 = d.trim().parse().map_err(|_| err())?;
        if d == 0 {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }

    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = t[pos + 1..].parse().map_err(|_| err())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: i128 = if all.is_empty() { 0 } else { all.parse().map_err(|_| err())? };
    let mut scale = exponent - frac_part.len() as i32;
    let mut den: i128 = 1;
    while scale > 0 {
        num = num.checked_mul(10).ok_or_else(err)?;
        scale -= 1;
    }
    while scale < 0 {
        den = den.checked_mul(10).ok_or_else(err)?;
        scale += 1;
    }
    if negative {
        num = -num;
    }
    let g = num.gcd(&den);
    let (num, den) = if g.is_zero() { (num, den) } else { (num / g, den / g) };
    let n = i64::try_from(num).map_err(|_| err())?;
    let d = i64::try_from(den).map_err(|_| err())?;
    Ok(Rational::new(n, d))
}

/// Exact `sum_i q_i * a_i` as a reduced wide rational.
pub fn exact_dot(qs: &[Rational], a: &[i64]) -> Result<WideRational> {
    let mut den: i128 = 1;
    for q in qs {
        let qd = *q.denom() as i128;
        den = den.lcm(&qd);
        if den > (1i128 << 100) {
            return Err(SrsError::Overflow);
        }
    }
    let mut num: i128 = 0;
    for (q, &ai) in qs.iter().zip(a) {
        let scale = den / (*q.denom() as i128);
        let term = (*q.numer() as i128)
            .checked_mul(scale)
            .and_then(|t| t.checked_mul(ai as i128))
            .ok_or(SrsError::Overflow)?;
        num = num.checked_add(term).ok_or(SrsError::Overflow)?;
    }
    Ok(WideRational::new(num, den))
}

/// Floor of a wide rational.
pub fn floor_wide(q: &WideRational) -> i128 {
    q.numer().div_floor(q.denom())
}

/// Fractional part `{q} = q - floor(q)` in `[0, 1)`.
pub fn fract_wide(q: &WideRational) -> WideRational {
    WideRational::new(q.numer().mod_floor(q.denom()), *q.denom())
}

impl serde::Serialize for ParamVector {
    /// Exact entries as `p/q` strings, float-only entries as numbers.
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = ser.serialize_seq(Some(self.dim()))?;
        for c in &self.coeffs {
            match c.exact {
                Some(q) => seq.serialize_element(&q.to_string())?,
                None => seq.serialize_element(&c.approx)?,
            }
        }
        seq.end()
    }
}

impl FromStr for ParamVector {
    type Err = SrsError;

    /// Comma or whitespace separated list of rationals.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect();
        Self::parse(&parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("1.1").unwrap(), Rational::new(11, 10));
        assert_eq!(parse_rational("-1.15").unwrap(), Rational::new(-23, 20));
        assert_eq!(parse_rational("3/2").unwrap(), Rational::new(3, 2));
        assert_eq!(parse_rational("-4").unwrap(), Rational::from_integer(-4));
        assert_eq!(parse_rational("2.5e-1").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational(".5").unwrap(), Rational::new(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn float_shadow_is_nearest() {
        let p = ParamVector::parse(&["11/10", "-23/20"]).unwrap();
        assert_eq!(p.approx(), vec![1.1, -1.15]);
        assert!(p.is_exact());
    }

    #[test]
    fn fractional_part_of_negative() {
        let r = [Rational::new(11, 10), Rational::new(-23, 20)];
        let dot = exact_dot(&r, &[1, 1]).unwrap();
        assert_eq!(dot, WideRational::new(-1, 20));
        assert_eq!(floor_wide(&dot), -1);
        assert_eq!(fract_wide(&dot), WideRational::new(19, 20));
    }

    #[test]
    fn from_str_accepts_commas() {
        let p: ParamVector = "3/2, 0".parse().unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.exact_at(0), Some(Rational::new(3, 2)));
    }
}
