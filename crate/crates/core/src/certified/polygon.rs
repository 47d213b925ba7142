//! Convex polygons with exact rational vertices, cut by lines
//! `a_0 s_0 + a_1 s_1 = c`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::param::{ParamVector, Rational};

pub type Q = BigRational;

pub(crate) fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub(crate) fn q_rat(r: &Rational) -> Q {
    Q::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub(crate) fn q_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// `floor(v)` as an `i64`, if it fits.
pub(crate) fn q_floor(v: &Q) -> Option<i64> {
    v.floor().to_integer().to_i64()
}

/// The line `a[0] s_0 + a[1] s_1 = c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Line {
    pub a: [i64; 2],
    pub c: Q,
}

impl Line {
    pub fn new(a: [i64; 2], c: Q) -> Self {
        Self { a, c }
    }

    /// `a . v - c`
    pub fn eval(&self, v: &[Q; 2]) -> Q {
        q_int(self.a[0]) * &v[0] + q_int(self.a[1]) * &v[1] - &self.c
    }

    fn negated(&self) -> Line {
        Line {
            a: [-self.a[0], -self.a[1]],
            c: -self.c.clone(),
        }
    }

    /// Scaled so the coefficients are coprime integers with a positive
    /// leading entry; equal keys mean equal lines.
    pub fn key(&self) -> ([i64; 2], Q) {
        let g = num_integer::gcd(self.a[0], self.a[1]).max(1);
        let sign = if self.a[0] < 0 || (self.a[0] == 0 && self.a[1] < 0) {
            -1
        } else {
            1
        };
        let s = sign * g;
        ([self.a[0] / s, self.a[1] / s], &self.c / q_int(s))
    }

    fn intersect(&self, other: &Line) -> Option<[Q; 2]> {
        let det = self.a[0] as i128 * other.a[1] as i128 - self.a[1] as i128 * other.a[0] as i128;
        if det == 0 {
            return None;
        }
        let det = Q::from_integer(BigInt::from(det));
        let x = (&self.c * q_int(other.a[1]) - &other.c * q_int(self.a[1])) / &det;
        let y = (q_int(self.a[0]) * &other.c - q_int(other.a[0]) * &self.c) / &det;
        Some([x, y])
    }
}

/// Counterclockwise convex polygon with positive area. `edges[i]` is the
/// supporting line of the segment `vertices[i] -> vertices[i + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<[Q; 2]>,
    edges: Vec<Line>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Keep `a . s <= c`.
    Below,
    /// Keep `a . s >= c`.
    Above,
}

impl Polygon {
    /// The rectangle `[a, b] x [c, d]`, `None` if it has no interior.
    pub fn rect(r0: [Q; 2], r1: [Q; 2]) -> Option<Self> {
        if r0[0] >= r0[1] || r1[0] >= r1[1] {
            return None;
        }
        let [a, b] = r0;
        let [c, d] = r1;
        Some(Self {
            vertices: vec![
                [a.clone(), c.clone()],
                [b.clone(), c.clone()],
                [b.clone(), d.clone()],
                [a.clone(), d.clone()],
            ],
            edges: vec![
                Line::new([0, 1], c),
                Line::new([1, 0], b),
                Line::new([0, 1], d),
                Line::new([1, 0], a),
            ],
        })
    }

    pub fn vertices(&self) -> &[[Q; 2]] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Line] {
        &self.edges
    }

    pub fn vertices_f64(&self) -> Vec<[f64; 2]> {
        self.vertices
            .iter()
            .map(|v| [q_f64(&v[0]), q_f64(&v[1])])
            .collect()
    }

    /// Twice the area.
    pub fn double_area(&self) -> Q {
        let n = self.vertices.len();
        let mut acc = Q::zero();
        for i in 0..n {
            let (p, q) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
            acc += &p[0] * &q[1] - &q[0] * &p[1];
        }
        acc
    }

    /// Minimum and maximum of `a . s` over the polygon.
    pub fn range(&self, a: [i64; 2]) -> (Q, Q) {
        let line = Line::new(a, Q::zero());
        let mut vals = self.vertices.iter().map(|v| line.eval(v));
        let first = vals.next().expect("nonempty");
        vals.fold((first.clone(), first), |(lo, hi), v| {
            let lo = if v < lo { v.clone() } else { lo };
            let hi = if v > hi { v } else { hi };
            (lo, hi)
        })
    }

    /// Float bounds on `a . s`, widened slightly.
    pub fn range_f64(&self, a: [i64; 2]) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in self.vertices_f64() {
            let x = a[0] as f64 * v[0] + a[1] as f64 * v[1];
            lo = lo.min(x);
            hi = hi.max(x);
        }
        let pad = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
        (lo - pad, hi + pad)
    }

    /// Intersection with a closed half-plane; `None` when it has no
    /// interior.
    pub fn clip(&self, line: &Line, side: Side) -> Option<Polygon> {
        let line = match side {
            Side::Below => line.clone(),
            Side::Above => line.negated(),
        };
        let vals: Vec<Q> = self.vertices.iter().map(|v| line.eval(v)).collect();
        if vals.iter().all(|v| !v.is_positive()) {
            return Some(self.clone());
        }
        if vals.iter().all(|v| !v.is_negative()) {
            return None;
        }
        let n = self.vertices.len();
        let mut verts: Vec<[Q; 2]> = Vec::with_capacity(n + 1);
        let mut edges: Vec<Line> = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (vi, vj) = (&vals[i], &vals[j]);
            let edge = &self.edges[i];
            if !vi.is_positive() {
                if vj.is_positive() {
                    if vi.is_negative() {
                        verts.push(self.vertices[i].clone());
                        edges.push(edge.clone());
                        verts.push(edge.intersect(&line).expect("crossing edge"));
                    } else {
                        verts.push(self.vertices[i].clone());
                    }
                    edges.push(line.clone());
                } else {
                    verts.push(self.vertices[i].clone());
                    edges.push(edge.clone());
                }
            } else if vj.is_negative() {
                verts.push(edge.intersect(&line).expect("crossing edge"));
                edges.push(edge.clone());
            }
        }
        let poly = Polygon {
            vertices: verts,
            edges,
        };
        poly.normalized()
    }

    fn normalized(mut self) -> Option<Polygon> {
        let mut i = 0;
        while self.vertices.len() > 1 && i < self.vertices.len() {
            let j = (i + 1) % self.vertices.len();
            if self.vertices[i] == self.vertices[j] {
                // keep the later vertex, whose outgoing edge continues
                self.vertices.remove(i);
                self.edges.remove(i);
            } else {
                i += 1;
            }
        }
        if self.vertices.len() < 3 || !self.double_area().is_positive() {
            return None;
        }
        Some(self)
    }

    /// Splits along `line` if it crosses the interior.
    pub fn split(&self, line: &Line) -> Option<(Polygon, Polygon)> {
        let lo = self.clip(line, Side::Below)?;
        let hi = self.clip(line, Side::Above)?;
        Some((lo, hi))
    }

    /// Strictly inside: left of every counterclockwise edge.
    pub fn contains_strict(&self, p: &[Q; 2]) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
            let cross = (&b[0] - &a[0]) * (&p[1] - &a[1]) - (&b[1] - &a[1]) * (&p[0] - &a[0]);
            cross.is_positive()
        })
    }

    pub fn contains_closed(&self, p: &[Q; 2]) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
            let cross = (&b[0] - &a[0]) * (&p[1] - &a[1]) - (&b[1] - &a[1]) * (&p[0] - &a[0]);
            !cross.is_negative()
        })
    }

    /// Average of the vertices; strictly interior.
    pub fn vertex_mean(&self) -> [Q; 2] {
        let n = q_int(self.vertices.len() as i64);
        let mut sx = Q::zero();
        let mut sy = Q::zero();
        for v in &self.vertices {
            sx += &v[0];
            sy += &v[1];
        }
        [sx / &n, sy / n]
    }

    /// Interior points with `i64` rational coordinates: roundings of the
    /// vertex mean to large prime denominators, which keeps `s . x` away
    /// from integers for short `x`, then the mean itself.
    pub fn interior_samples(&self) -> impl Iterator<Item = [Rational; 2]> + '_ {
        const PRIMES: [i64; 6] = [
            10_007,
            1_000_003,
            100_000_007,
            10_000_000_019,
            1_000_000_000_039,
            100_000_000_000_031,
        ];
        let mean = self.vertex_mean();
        let approx = [q_f64(&mean[0]), q_f64(&mean[1])];
        let rounded = PRIMES.into_iter().flat_map(move |p| {
            [(0, 0), (1, 0), (0, 1), (1, 1), (-1, 1)]
                .into_iter()
                .filter_map(move |(d0, d1)| {
                    let n = [(approx[0] * p as f64).round(), (approx[1] * p as f64).round()];
                    if n.iter().any(|v| v.abs() >= 9.0e18) {
                        return None;
                    }
                    Some([
                        Rational::new(n[0] as i64 + d0, p),
                        Rational::new(n[1] as i64 + d1, p),
                    ])
                })
        });
        let exact = to_rational(&mean[0]).zip(to_rational(&mean[1])).map(|(a, b)| [a, b]);
        rounded
            .chain(exact)
            .filter(move |s| self.contains_strict(&[q_rat(&s[0]), q_rat(&s[1])]))
    }
}

fn to_rational(v: &Q) -> Option<Rational> {
    Some(Rational::new(v.numer().to_i64()?, v.denom().to_i64()?))
}

pub(crate) fn param_of(s: &[Rational; 2]) -> ParamVector {
    ParamVector::from_rationals(s).expect("two entries")
}

/// Rational vertex coordinate as `p/q`.
fn ser_q<S: Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
    if v.denom().is_one() {
        s.serialize_str(&v.numer().to_string())
    } else {
        s.serialize_str(&format!("{}/{}", v.numer(), v.denom()))
    }
}

impl Serialize for Polygon {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        struct V<'a>(&'a Q);
        impl Serialize for V<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                ser_q(self.0, s)
            }
        }
        let mut seq = s.serialize_seq(Some(self.vertices.len()))?;
        for v in &self.vertices {
            seq.serialize_element(&[V(&v[0]), V(&v[1])])?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    fn unit() -> Polygon {
        Polygon::rect([q(0, 1), q(1, 1)], [q(0, 1), q(1, 1)]).unwrap()
    }

    #[test]
    fn clip_diagonal() {
        let p = unit();
        let (lo, hi) = p.split(&Line::new([1, 1], q(1, 1))).unwrap();
        assert_eq!(lo.double_area(), q(1, 1));
        assert_eq!(hi.double_area(), q(1, 1));
        assert_eq!(lo.vertices().len(), 3);
    }

    #[test]
    fn clip_through_vertex_keeps_edges_consistent() {
        let p = unit();
        let (lo, hi) = p.split(&Line::new([2, -1], q(1, 1))).unwrap();
        assert_eq!(lo.double_area() + hi.double_area(), q(2, 1));
        for poly in [&lo, &hi] {
            let n = poly.vertices().len();
            for i in 0..n {
                let e = &poly.edges()[i];
                assert!(e.eval(&poly.vertices()[i]).is_zero());
                assert!(e.eval(&poly.vertices()[(i + 1) % n]).is_zero());
            }
        }
    }

    #[test]
    fn touching_lines_do_not_split() {
        let p = unit();
        assert!(p.split(&Line::new([1, 0], q(1, 1))).is_none());
        assert!(p.split(&Line::new([1, 1], q(2, 1))).is_none());
        assert!(p.clip(&Line::new([1, 1], q(0, 1)), Side::Below).is_none());
    }

    #[test]
    fn samples_are_interior() {
        let p = unit().clip(&Line::new([1, 3], q(1, 7)), Side::Below).unwrap();
        let s = p.interior_samples().next().unwrap();
        assert!(p.contains_strict(&[q_rat(&s[0]), q_rat(&s[1])]));
    }

    #[test]
    fn line_keys_identify_scaled_lines() {
        let a = Line::new([2, -4], q(6, 1));
        let b = Line::new([-1, 2], q(-3, 1));
        assert_eq!(a.key(), b.key());
    }
}
