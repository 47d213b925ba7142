//! The shift radix system map, orbits, error terms and cycles.
//!
//! For `r = (r_0, ..., r_{d-1})` the map sends `a = (a_0, ..., a_{d-1})` to
//! `(a_1, ..., a_{d-1}, -floor(r . a))`. An orbit is stored both as the list of
//! states and, for cycles, in compressed scalar form: the first coordinate of
//! each state, one integer per step.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SrsError};
use crate::param::{
    exact_dot, floor_wide, fract_wide, wide_to_f64, Coefficient, ParamVector, Rational,
    WideRational,
};

/// Integer state vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn new(entries: Vec<i64>) -> Self {
        Self(entries)
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|x| x.saturating_abs()).max().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

impl From<[i64; 2]> for LatticePoint {
    fn from(v: [i64; 2]) -> Self {
        Self(v.to_vec())
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

fn write_tuple(f: &mut fmt::Formatter<'_>, xs: &[i64]) -> fmt::Result {
    write!(f, "(")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, ")")
}

/// A nontrivial or trivial cycle in compressed scalar form.
///
/// Entries are the minimal period, rotated to the lexicographically least
/// rotation. The trivial cycle is `[0]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycleWitness {
    entries: Vec<i64>,
}

impl CycleWitness {
    pub fn trivial() -> Self {
        Self { entries: vec![0] }
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn period(&self) -> usize {
        self.entries.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.entries == [0]
    }

    pub fn max_abs(&self) -> i64 {
        self.entries.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    /// Total order used to pick a representative among several cycles:
    /// shorter period first, then smaller entries in absolute value, then
    /// lexicographic.
    pub fn preference(&self, other: &Self) -> Ordering {
        self.period()
            .cmp(&other.period())
            .then(self.max_abs().cmp(&other.max_abs()))
            .then(self.entries.cmp(&other.entries))
    }

    /// True if `other` is the same cycle up to rotation.
    pub fn same_cycle(&self, entries: &[i64]) -> bool {
        cycle_canonicalize(entries).map(|c| c == *self).unwrap_or(false)
    }
}

impl fmt::Display for CycleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.entries)
    }
}

/// One error term `e_n = {r . a}`; exact when the parameter is rational.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorTerm {
    #[serde(skip)]
    pub exact: Option<WideRational>,
    pub approx: f64,
}

/// Why an orbit was declared escaping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EscapeReason {
    /// The state left the witness ball of an expansion norm; the norm grows
    /// strictly from then on.
    Certified,
    /// The max-norm exceeded the heuristic radius. Not a proof.
    Heuristic { radius: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitOutcome {
    ReachedCycle(CycleWitness),
    ReachedZero,
    Escaped { step: usize, reason: EscapeReason },
    Undecided { budget: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub start: LatticePoint,
    pub states: Vec<LatticePoint>,
    pub errors: Vec<ErrorTerm>,
    pub outcome: OrbitOutcome,
}

impl OrbitRecord {
    /// The orbit in compressed scalar form `a_0, a_1, ...`.
    pub fn scalars(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self.start.0.clone();
        out.extend(self.states.iter().skip(1).filter_map(|s| s.0.last().copied()));
        out
    }
}

/// Something that can prove an orbit escapes to infinity.
pub trait EscapeCertificate {
    fn parameter(&self) -> &ParamVector;
    /// True only if every further iterate is provably larger in some norm.
    fn certifies_escape(&self, x: &[i64]) -> bool;
}

/// Iteration limits for [`iterate_orbit`].
pub struct OrbitOptions<'a> {
    pub budget: usize,
    pub certificate: Option<&'a dyn EscapeCertificate>,
    pub heuristic_radius: Option<i64>,
}

impl Default for OrbitOptions<'_> {
    fn default() -> Self {
        Self {
            budget: 1_000_000,
            certificate: None,
            heuristic_radius: Some(1_000_000),
        }
    }
}

/// `r . a` evaluated exactly when `r` is rational.
pub(crate) enum Dot {
    Exact(WideRational),
    Approx(f64),
}

pub(crate) fn dot(r: &ParamVector, a: &[i64]) -> Result<Dot> {
    r.check_dim(a.len())?;
    match r.exact() {
        Some(qs) => exact_dot(&qs, a).map(Dot::Exact),
        None => Ok(Dot::Approx(
            r.approx().iter().zip(a).map(|(x, &ai)| x * ai as f64).sum(),
        )),
    }
}

/// `floor(r . a)`.
pub fn floor_dot(r: &ParamVector, a: &[i64]) -> Result<i64> {
    let f = match dot(r, a)? {
        Dot::Exact(q) => floor_wide(&q),
        Dot::Approx(x) => x.floor() as i128,
    };
    i64::try_from(f).map_err(|_| SrsError::Overflow)
}

/// One application of the map.
pub fn srs_step(r: &ParamVector, a: &LatticePoint) -> Result<LatticePoint> {
    let f = floor_dot(r, &a.0)?;
    let mut next = Vec::with_capacity(a.dim());
    next.extend_from_slice(&a.0[1..]);
    next.push(f.checked_neg().ok_or(SrsError::Overflow)?);
    Ok(LatticePoint(next))
}

/// Fractional part `{r . a}` in `[0, 1)`.
pub fn error_term(r: &ParamVector, a: &LatticePoint) -> Result<ErrorTerm> {
    Ok(match dot(r, &a.0)? {
        Dot::Exact(q) => {
            let e = fract_wide(&q);
            ErrorTerm {
                approx: wide_to_f64(&e),
                exact: Some(e),
            }
        }
        Dot::Approx(x) => ErrorTerm {
            exact: None,
            approx: x - x.floor(),
        },
    })
}

/// Companion matrix with identity block and last row `(-r_0, ..., -r_{d-1})`.
pub fn companion_matrix(r: &ParamVector) -> Vec<Vec<Coefficient>> {
    let d = r.dim();
    let zero = Coefficient::from_rational(Rational::from_integer(0));
    let one = Coefficient::from_rational(Rational::from_integer(1));
    let mut rows = vec![vec![zero; d]; d];
    for (i, row) in rows.iter_mut().enumerate().take(d - 1) {
        row[i + 1] = one;
    }
    rows[d - 1] = r
        .coeffs()
        .iter()
        .map(|c| match c.exact() {
            Some(q) => Coefficient::from_rational(-q),
            None => Coefficient::from_f64(-c.approx()),
        })
        .collect();
    rows
}

/// `R(r) a` computed exactly. Requires a rational parameter.
pub fn apply_companion_exact(r: &ParamVector, a: &LatticePoint) -> Result<Vec<WideRational>> {
    let qs = r.exact().ok_or(SrsError::NotExact)?;
    r.check_dim(a.dim())?;
    let mut out: Vec<WideRational> = a.0[1..]
        .iter()
        .map(|&x| WideRational::from_integer(x as i128))
        .collect();
    out.push(-exact_dot(&qs, &a.0)?);
    Ok(out)
}

/// Iterates the map from `start` until it hits the origin, repeats a state,
/// escapes, or exhausts the budget.
pub fn iterate_orbit(
    r: &ParamVector,
    start: &LatticePoint,
    opts: &OrbitOptions<'_>,
) -> Result<OrbitRecord> {
    r.check_dim(start.dim())?;
    if opts.budget == 0 {
        return Err(SrsError::ZeroBudget);
    }
    if let Some(cert) = opts.certificate {
        if cert.parameter() != r {
            return Err(SrsError::CertificateMismatch);
        }
    }

    let mut states = vec![start.clone()];
    let mut errors = Vec::new();
    let mut seen: HashMap<LatticePoint, usize> = HashMap::new();
    let mut current = start.clone();
    let mut step = 0usize;

    let outcome = loop {
        if current.is_zero() {
            break OrbitOutcome::ReachedZero;
        }
        if let Some(&first) = seen.get(&current) {
            let entries: Vec<i64> = states[first..step].iter().map(|s| s.0[0]).collect();
            break OrbitOutcome::ReachedCycle(cycle_canonicalize(&entries)?);
        }
        if opts
            .certificate
            .is_some_and(|c| c.certifies_escape(&current.0))
        {
            break OrbitOutcome::Escaped {
                step,
                reason: EscapeReason::Certified,
            };
        }
        if let Some(radius) = opts.heuristic_radius {
            if current.max_abs() > radius {
                break OrbitOutcome::Escaped {
                    step,
                    reason: EscapeReason::Heuristic { radius },
                };
            }
        }
        if step == opts.budget {
            break OrbitOutcome::Undecided {
                budget: opts.budget,
            };
        }
        seen.insert(current.clone(), step);
        errors.push(error_term(r, &current)?);
        current = srs_step(r, &current)?;
        states.push(current.clone());
        step += 1;
    };

    Ok(OrbitRecord {
        start: start.clone(),
        states,
        errors,
        outcome,
    })
}

/// Checks that every cyclic window `(c_i, ..., c_{i+d})` satisfies
/// `0 <= c_{i+d} + r . (c_i, ..., c_{i+d-1}) < 1`.
pub fn verify_cycle(r: &ParamVector, c: &CycleWitness) -> bool {
    verify_cycle_entries(r, c.entries())
}

pub fn verify_cycle_entries(r: &ParamVector, entries: &[i64]) -> bool {
    let p = entries.len();
    if p == 0 {
        return false;
    }
    let d = r.dim();
    let mut window = vec![0i64; d];
    (0..p).all(|i| {
        for (j, w) in window.iter_mut().enumerate() {
            *w = entries[(i + j) % p];
        }
        let next = entries[(i + d) % p];
        match dot(r, &window) {
            Ok(Dot::Exact(q)) => {
                let e = q + WideRational::from_integer(next as i128);
                e >= WideRational::from_integer(0) && e < WideRational::from_integer(1)
            }
            Ok(Dot::Approx(x)) => {
                let e = x + next as f64;
                (0.0..1.0).contains(&e)
            }
            Err(_) => false,
        }
    })
}

/// Reduces a periodic sequence to its minimal period and least rotation.
pub fn cycle_canonicalize(entries: &[i64]) -> Result<CycleWitness> {
    if entries.is_empty() {
        return Err(SrsError::EmptyCycle);
    }
    let n = entries.len();
    // prefix function gives the smallest period of the word
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut k = pi[i - 1];
        while k > 0 && entries[i] != entries[k] {
            k = pi[k - 1];
        }
        if entries[i] == entries[k] {
            k += 1;
        }
        pi[i] = k;
    }
    let p = n - pi[n - 1];
    let period = if n % p == 0 { p } else { n };
    let core = &entries[..period];
    let start = least_rotation(core);
    let mut out = Vec::with_capacity(period);
    out.extend_from_slice(&core[start..]);
    out.extend_from_slice(&core[..start]);
    Ok(CycleWitness { entries: out })
}

/// Start index of the lexicographically least rotation (two-pointer scan).
fn least_rotation(s: &[i64]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        match a.cmp(&b) {
            Ordering::Equal => k += 1,
            Ordering::Greater => {
                i += k + 1;
                if i == j {
                    i += 1;
                }
                k = 0;
            }
            Ordering::Less => {
                j += k + 1;
                if i == j {
                    j += 1;
                }
                k = 0;
            }
        }
    }
    i.min(j)
}
