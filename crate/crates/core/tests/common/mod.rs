//! Independent reference implementations for integration tests. Nothing here
//! calls into the library's dynamics, bounds or certificates.

#![allow(dead_code)]

use rand::Rng;
use srs_lab::{ParamVector, Rational};

/// `r = (n0/d0, n1/d1)` with positive denominators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exact {
    pub n0: i128,
    pub d0: i128,
    pub n1: i128,
    pub d1: i128,
}

impl Exact {
    pub fn from_rationals(a: Rational, b: Rational) -> Self {
        Self {
            n0: *a.numer() as i128,
            d0: *a.denom() as i128,
            n1: *b.numer() as i128,
            d1: *b.denom() as i128,
        }
    }

    pub fn param(&self) -> ParamVector {
        ParamVector::from_rationals(&[
            Rational::new(self.n0 as i64, self.d0 as i64),
            Rational::new(self.n1 as i64, self.d1 as i64),
        ])
        .unwrap()
    }

    pub fn f64s(&self) -> (f64, f64) {
        (self.n0 as f64 / self.d0 as f64, self.n1 as f64 / self.d1 as f64)
    }

    /// `(a1, -floor(r0 a0 + r1 a1))`.
    pub fn step(&self, a: (i64, i64)) -> (i64, i64) {
        let num = self.n0 * self.d1 * a.0 as i128 + self.n1 * self.d0 * a.1 as i128;
        let q = num.div_euclid(self.d0 * self.d1);
        (a.1, -(q as i64))
    }
}

/// Moduli of the roots of `x^2 + r1 x + r0`.
pub fn root_moduli(r0: f64, r1: f64) -> [f64; 2] {
    let disc = r1 * r1 - 4.0 * r0;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [((-r1 - s) / 2.0).abs(), ((-r1 + s) / 2.0).abs()]
    } else {
        let m = r0.sqrt();
        [m, m]
    }
}

/// Bound on cycle elements, `1 / prod |1 - |beta||`, or `None` near the
/// unit circle.
pub fn element_bound(r0: f64, r1: f64) -> Option<f64> {
    let [a, b] = root_moduli(r0, r1);
    let p = (1.0 - a).abs() * (1.0 - b).abs();
    (p > 1e-9).then(|| 1.0 / p)
}

pub fn min_modulus(r0: f64, r1: f64) -> f64 {
    let [a, b] = root_moduli(r0, r1);
    a.min(b)
}

/// Rotation-invariant form of a cycle.
pub fn least_rotation(c: &[i64]) -> Vec<i64> {
    let n = c.len();
    (0..n)
        .map(|k| c[k..].iter().chain(&c[..k]).copied().collect::<Vec<_>>())
        .min()
        .unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Oracle {
    NoCycle,
    Cycle(Vec<i64>),
    /// Some orbit neither closed nor left the box within the budget.
    Inconclusive,
}

/// Iterates every start in `[-b, b]^2` (b = ceil(bound)). A start on a cycle
/// never leaves the box, so scanning all starts finds every cycle. Orbits
/// that leave the box are dropped. Cycles are found with Brent's method.
pub fn brute_force(r: &Exact, budget: usize) -> Option<Oracle> {
    let (r0, r1) = r.f64s();
    let b = element_bound(r0, r1)?.ceil() as i64;
    let inside = |a: (i64, i64)| a.0.abs() <= b && a.1.abs() <= b;
    let mut inconclusive = false;
    let mut found: Option<Vec<i64>> = None;
    for x in -b..=b {
        for y in -b..=b {
            if (x, y) == (0, 0) {
                continue;
            }
            match brent(r, (x, y), budget, &inside) {
                Walk::Left => {}
                Walk::Budget => inconclusive = true,
                Walk::Cycle(c) => {
                    if c.iter().any(|&v| v != 0) {
                        let c = least_rotation(&c);
                        if found.as_ref().map_or(true, |f| (c.len(), &c) < (f.len(), f)) {
                            found = Some(c);
                        }
                    }
                }
            }
        }
    }
    Some(match (found, inconclusive) {
        (Some(c), _) => Oracle::Cycle(c),
        (None, true) => Oracle::Inconclusive,
        (None, false) => Oracle::NoCycle,
    })
}

enum Walk {
    Left,
    Budget,
    Cycle(Vec<i64>),
}

fn brent(r: &Exact, start: (i64, i64), budget: usize, inside: &dyn Fn((i64, i64)) -> bool) -> Walk {
    let mut power = 1usize;
    let mut lam = 1usize;
    let mut tortoise = start;
    let mut hare = r.step(start);
    let mut steps = 1usize;
    while tortoise != hare {
        if !inside(hare) {
            return Walk::Left;
        }
        if steps >= budget {
            return Walk::Budget;
        }
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = r.step(hare);
        lam += 1;
        steps += 1;
    }
    // hare is on the cycle; collect first coordinates over one period
    let mut c = Vec::with_capacity(lam);
    let mut p = hare;
    for _ in 0..lam {
        c.push(p.0);
        p = r.step(p);
    }
    Walk::Cycle(c)
}

/// Random rational in `[lo, hi]` with denominator at most `max_den`.
pub fn rational_in<R: Rng>(rng: &mut R, lo: f64, hi: f64, max_den: i64) -> Rational {
    let d = rng.gen_range(1..=max_den);
    let lo_n = (lo * d as f64).ceil() as i64;
    let hi_n = (hi * d as f64).floor() as i64;
    if lo_n > hi_n {
        return Rational::new(lo.round() as i64, 1);
    }
    Rational::new(rng.gen_range(lo_n..=hi_n), d)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}
