//! Test-side lattice helpers and polytope generators, independent of the
//! library's Smith/Hermite code paths.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use quasifold::exactmath::{FieldScalar, IntMatrix, RationalMatrix};
use quasifold::polytope::{Halfspace, PolytopeH};
use quasifold::verify::determinantal_divisor;

fn rational_rows(rows: &[Vec<BigInt>]) -> RationalMatrix {
    RationalMatrix::from_rows(rows.iter().map(|r| r.iter().cloned().map(BigRational::from_integer).collect()).collect())
        .unwrap()
}

/// `X` with `X·B = A` for full-row-rank `B`, if `A` lies in the row space.
fn solve_left(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Option<Vec<Vec<BigRational>>> {
    let (qa, qb) = (rational_rows(a), rational_rows(b));
    let inv = qb.mul_mat(&qb.transpose()).inverse()?;
    let x = qa.mul_mat(&qb.transpose()).mul_mat(&inv);
    (x.mul_mat(&qb) == qa).then(|| x.to_rows())
}

fn integral(x: Vec<Vec<BigRational>>) -> Option<Vec<Vec<BigInt>>> {
    x.into_iter().map(|r| r.into_iter().map(|v| v.is_integer().then(|| v.to_integer())).collect()).collect()
}

/// Every row of `a` is an integer combination of the rows of `b`.
pub fn lattice_contains(b: &[Vec<BigInt>], a: &[Vec<BigInt>]) -> bool {
    if a.is_empty() {
        return true;
    }
    if b.is_empty() {
        return a.iter().all(|r| r.iter().all(Zero::is_zero));
    }
    solve_left(a, b).and_then(integral).is_some()
}

/// `A = X·B` with `X` integral and `det X = ±1`, for full-row-rank `A`, `B`.
pub fn unimodularly_equivalent(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let Some(x) = solve_left(a, b).and_then(integral) else { return false };
    let n = x.len();
    determinantal_divisor(&IntMatrix::from_rows(x).unwrap(), n).abs().is_one()
}

fn to_int(x: &FieldScalar) -> BigInt {
    assert!(x.is_rational() && x.rational_part().is_integer(), "{x} is not an integer");
    x.rational_part().to_integer()
}

/// For a lattice `Q = ℤ⟨X_1..X_d⟩ ⊂ ℤⁿ` and a vertex `v`, `|Q / ℤ⟨X_v⟩|` is
/// `|det X_v| / covol(Q)`, with `covol(Q)` the gcd of the maximal minors.
pub fn lattice_vertex_order(p: &PolytopeH, active: &[usize]) -> BigInt {
    let n = p.dim();
    let normals = p.normals();
    let g = IntMatrix::from_rows(normals.iter().map(|r| r.iter().map(to_int).collect()).collect()).unwrap();
    let xv = IntMatrix::from_rows(active.iter().map(|&j| normals[j].iter().map(to_int).collect()).collect()).unwrap();
    determinantal_divisor(&xv, n).abs() / determinantal_divisor(&g, n).abs()
}

/// Rational point on the unit circle at parameter `t = tan(θ/2)`.
pub fn circle_point(t: &BigRational) -> (BigRational, BigRational) {
    let one = BigRational::one();
    let den = &one + t * t;
    ((&one - t * t) / &den, (t + t) / den)
}

/// Polygon circumscribed about the unit circle, one facet per angle. With
/// consecutive angles less than `π` apart every facet is a genuine edge.
/// Angles are in turns and must be increasing within `(−1/2, 1/2)`.
pub fn tangent_polygon(turns: &[f64], m: u64) -> PolytopeH {
    let halfspaces = turns
        .iter()
        .map(|&u| {
            let t = (std::f64::consts::PI * u).tan();
            let t = BigRational::new(BigInt::from((t * 1000.0).round() as i64), BigInt::from(1000));
            let (c, s) = circle_point(&t);
            Halfspace::new(
                vec![FieldScalar::rational(c, m), FieldScalar::rational(s, m)],
                FieldScalar::from_int(-1, m),
            )
        })
        .collect();
    PolytopeH::new(2, halfspaces).unwrap()
}

/// `k` increasing angles spread around the circle, consecutive gaps below
/// half a turn. `jitter` entries lie in `[0.3, 0.7]`.
pub fn spread_turns(jitter: &[f64]) -> Vec<f64> {
    let k = jitter.len() as f64;
    jitter.iter().enumerate().map(|(i, j)| -0.5 + (i as f64 + j) / k).collect()
}

/// Scales every facet so that its normal is a primitive integer vector.
pub fn integral_facets(p: &PolytopeH) -> PolytopeH {
    let m = p.discriminant();
    let halfspaces = p
        .halfspaces()
        .iter()
        .map(|h| {
            let lcm = h.normal.iter().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.rational_part().denom().clone()));
            let ints: Vec<BigInt> = h.normal.iter().map(|x| (x.rational_part() * &lcm).to_integer()).collect();
            let g = ints.iter().fold(BigInt::from(0), |acc, x| num_integer::gcd(acc, x.clone()));
            let c = FieldScalar::rational(BigRational::new(lcm, g), m);
            h.scaled(&c)
        })
        .collect();
    PolytopeH::new(p.dim(), halfspaces).unwrap()
}

/// Rational points strictly inside `p`, drawn from the grid `ℤⁿ/997` over
/// the bounding box.
pub fn rational_interior<R: Rng>(p: &PolytopeH, rng: &mut R, count: usize) -> Vec<Vec<FieldScalar>> {
    let m = p.discriminant();
    let bbox = p.bounding_box().unwrap();
    let den: i64 = 997;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mu: Vec<FieldScalar> = bbox
            .iter()
            .map(|&(lo, hi)| {
                let lo = (lo * den as f64).floor() as i64;
                let hi = (hi * den as f64).ceil() as i64;
                FieldScalar::from_ratio(rng.random_range(lo..=hi), den, m)
            })
            .collect();
        if (0..p.num_facets()).all(|j| p.slack(j, &mu).is_positive()) {
            out.push(mu);
        }
    }
    out
}
