mod common;

use common::{least_rotation, q};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srs_lab::certified::{
    decide_point_report, decide_region, rect_is_expanding, total_area, CellVerdict, CertError, RationalRect, Q,
};
use srs_lab::dynamics::verify_cycle;
use srs_lab::{ParamVector, Rational, Status};

const DEN: i64 = 10007;

/// Random point strictly inside the cell with denominator `DEN`, if one is
/// found.
fn sample_in(cell: &srs_lab::certified::Polygon, k: &RationalRect, rng: &mut impl Rng) -> Option<[Rational; 2]> {
    let [a, b] = k.r0();
    let [c, d] = k.r1();
    let span = |lo: Rational, hi: Rational| {
        let lo = (lo * Rational::from_integer(DEN)).ceil().to_integer();
        let hi = (hi * Rational::from_integer(DEN)).floor().to_integer();
        (lo, hi)
    };
    let (x0, x1) = span(a, b);
    let (y0, y1) = span(c, d);
    for _ in 0..2000 {
        let p = [
            Rational::new(rng.gen_range(x0..=x1), DEN),
            Rational::new(rng.gen_range(y0..=y1), DEN),
        ];
        let qp = [to_q(p[0]), to_q(p[1])];
        if cell.contains_strict(&qp) {
            return Some(p);
        }
    }
    None
}

fn to_q(r: Rational) -> Q {
    Q::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn check_cells(k: &RationalRect, per_cell: usize, seed: u64) {
    let cells = decide_region(k).unwrap();
    let full = (k.r0()[1] - k.r0()[0]) * (k.r1()[1] - k.r1()[0]);
    assert_eq!(total_area(&cells), to_q(full), "cells do not tile {k}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for cell in &cells {
        let status = cell.verdict.status().expect("undecided cell");
        let mut want: Vec<Vec<i64>> = cell.cycles.iter().map(|c| least_rotation(c.entries())).collect();
        want.sort();
        if let CellVerdict::NotInDStar { cycle } = &cell.verdict {
            assert!(cell.cycles.contains(cycle));
        }
        for _ in 0..per_cell {
            let Some(p) = sample_in(&cell.cell, &cell.rect, &mut rng) else {
                continue;
            };
            let r = ParamVector::from_rationals(&p).unwrap();
            let d = decide_point_report(&r, None).unwrap();
            assert_eq!(d.verdict.status(), status, "{} {} vs cell {}", p[0], p[1], cell.verdict);
            let mut got: Vec<Vec<i64>> = d.cycles.iter().map(|c| least_rotation(c.entries())).collect();
            got.sort();
            assert_eq!(got, want, "cycle sets differ at ({}, {})", p[0], p[1]);
            for c in &cell.cycles {
                assert!(verify_cycle(&r, c));
            }
        }
    }
}

#[test]
fn uniform_rectangle_is_one_cell() {
    let k = RationalRect::new(q(3, 2), q(8, 5), q(-1, 10), q(1, 10)).unwrap();
    let cells = decide_region(&k).unwrap();
    assert!(cells.iter().all(|c| c.verdict.status() == Some(Status::InDStar)));
    check_cells(&k, 10, 1);
}

#[test]
fn constant_strip_edge_splits_cells() {
    let k = RationalRect::parse("5/4,13/10,-13/10,-6/5").unwrap();
    check_cells(&k, 8, 2);
}

#[test]
fn mixed_rectangle_cells_match_point_decisions() {
    let k = RationalRect::parse("11/10,6/5,-3/5,-1/2").unwrap();
    let cells = decide_region(&k).unwrap();
    let statuses: Vec<_> = cells.iter().map(|c| c.verdict.status()).collect();
    assert!(statuses.contains(&Some(Status::InDStar)));
    assert!(statuses.contains(&Some(Status::NotInDStar)));
    check_cells(&k, 4, 3);
}

#[test]
fn non_expanding_rectangles_are_rejected() {
    let k = RationalRect::parse("1/2,3/2,0,1").unwrap();
    assert!(!rect_is_expanding(&k));
    assert_eq!(decide_region(&k).unwrap_err(), CertError::NotExpanding);
    // corners in different cones
    let k = RationalRect::parse("-3,3,-1/2,1/2").unwrap();
    assert_eq!(decide_region(&k).unwrap_err(), CertError::NotExpanding);
}
