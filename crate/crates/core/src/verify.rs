//! Sampling checks of the moment image, and brute-force oracles for the
//! integer algebra.
//!
//! The image of `Φ` lies in `Δ` by construction and every vertex is hit by
//! an exact fiber point; sampling exists to catch implementation faults in
//! the float path and to quantify how well a random cloud fills `Δ`.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::delzant::{DelzantData, DelzantError, LevelPoint};
use crate::exactmath::{clear_denominators, IntMatrix};
use crate::polytope::PolytopeError;

/// Samples per RNG stream; stream `k` covers samples `[k·CHUNK, (k+1)·CHUNK)`.
const CHUNK: usize = 256;
const MAX_ATTEMPTS: usize = 1_000_000;
/// Default consistency tolerance handed to the float moment map.
pub const LEVEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("rejection sampling gave up after {0} attempts")]
    RejectionBudgetExceeded(usize),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Delzant(#[from] DelzantError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleReport {
    pub samples: usize,
    pub seed: u64,
    /// `max |Φ(fiber(μ)) − μ|` in sup-norm.
    pub max_roundtrip_error: f64,
    /// `max |ψ(p)|` over sampled level points.
    pub max_level_residual: f64,
    /// Largest amount by which a sampled `Φ` value violates a facet inequality.
    pub max_outside_slack: f64,
    /// Sup-norm distance from each vertex to the nearest sampled `Φ` value.
    pub vertex_distances: Vec<f64>,
    /// Per-coordinate `[min, max]` of the sampled `Φ` values.
    pub sampled_extent: Vec<(f64, f64)>,
    /// Per-coordinate `[min, max]` over the exact vertices.
    pub exact_extent: Vec<(f64, f64)>,
    /// `max(|sampled min − exact min|, |sampled max − exact max|)`.
    pub extent_gaps: Vec<f64>,
}

/// Draws `μ` uniformly from `Δ` by rejection from the bounding box, then a
/// level point over it with uniform phases.
pub fn random_level_point<R: Rng>(
    data: &DelzantData,
    rng: &mut R,
) -> Result<(Vec<f64>, LevelPoint), SampleError> {
    let bbox = data.polytope().bounding_box()?;
    draw(data, &bbox, rng)
}

fn draw<R: Rng>(
    data: &DelzantData,
    bbox: &[(f64, f64)],
    rng: &mut R,
) -> Result<(Vec<f64>, LevelPoint), SampleError> {
    let p = data.polytope();
    for _ in 0..MAX_ATTEMPTS {
        let mu: Vec<f64> = bbox.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>()).collect();
        if !p.contains_approx(&mu, 0.0) {
            continue;
        }
        let phases: Vec<f64> = (0..data.torus_rank()).map(|_| rng.random::<f64>()).collect();
        let point = data.fiber_point_f64(&mu)?.with_phases(phases);
        return Ok((mu, point));
    }
    Err(SampleError::RejectionBudgetExceeded(MAX_ATTEMPTS))
}

struct Chunk {
    values: Vec<Vec<f64>>,
    roundtrip: f64,
    residual: f64,
}

fn sample_chunk(
    data: &DelzantData,
    bbox: &[(f64, f64)],
    seed: u64,
    stream: u64,
    count: usize,
    tol: f64,
) -> Result<Chunk, SampleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut chunk = Chunk { values: Vec::with_capacity(count), roundtrip: 0.0, residual: 0.0 };
    for _ in 0..count {
        let (mu, point) = draw(data, bbox, &mut rng)?;
        let image = data.moment_map(&point, tol)?.to_f64();
        let err = mu.iter().zip(&image).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        chunk.roundtrip = chunk.roundtrip.max(err);
        chunk.residual = chunk.residual.max(data.psi(&point)?.max_abs());
        chunk.values.push(image);
    }
    Ok(chunk)
}

/// Samples `n` level points and returns the report together with the
/// sampled moment values, in sample order. `tol` bounds the disagreement
/// between the solved moment value and the remaining facet equations.
pub fn sample_moment_image(
    data: &DelzantData,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<(SampleReport, Vec<Vec<f64>>), SampleError> {
    let bbox = data.polytope().bounding_box()?;
    let chunks: Vec<Chunk> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|k| sample_chunk(data, &bbox, seed, k as u64, CHUNK.min(n - k * CHUNK), tol))
        .collect::<Result<_, _>>()?;

    let mut values = Vec::with_capacity(n);
    let (mut roundtrip, mut residual) = (0.0f64, 0.0f64);
    for c in chunks {
        roundtrip = roundtrip.max(c.roundtrip);
        residual = residual.max(c.residual);
        values.extend(c.values);
    }
    let report = summarize(data, &values, seed, roundtrip, residual)?;
    Ok((report, values))
}

/// Statistical evidence that the moment image is the whole polytope.
pub fn certify_moment_image(data: &DelzantData, n: usize, seed: u64) -> Result<SampleReport, SampleError> {
    sample_moment_image(data, n, seed, LEVEL_TOL).map(|(report, _)| report)
}

fn summarize(
    data: &DelzantData,
    values: &[Vec<f64>],
    seed: u64,
    roundtrip: f64,
    residual: f64,
) -> Result<SampleReport, SampleError> {
    let p = data.polytope();
    let exact_extent = p.bounding_box()?;
    let vertices: Vec<Vec<f64>> = p.vertices()?.iter().map(|v| v.to_f64()).collect();
    let mut vertex_distances = vec![f64::INFINITY; vertices.len()];
    let mut sampled_extent = vec![(f64::INFINITY, f64::NEG_INFINITY); p.dim()];
    let mut outside = 0.0f64;
    for mu in values {
        for (dist, v) in vertex_distances.iter_mut().zip(&vertices) {
            let d = v.iter().zip(mu).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
            *dist = dist.min(d);
        }
        for (ext, x) in sampled_extent.iter_mut().zip(mu) {
            *ext = (ext.0.min(*x), ext.1.max(*x));
        }
        let worst = p.float_slacks(mu).into_iter().fold(0.0f64, |acc, s| acc.max(-s));
        outside = outside.max(worst);
    }
    let extent_gaps = sampled_extent
        .iter()
        .zip(&exact_extent)
        .map(|(s, e)| {
            if values.is_empty() {
                f64::INFINITY
            } else {
                (s.0 - e.0).abs().max((s.1 - e.1).abs())
            }
        })
        .collect();
    Ok(SampleReport {
        samples: values.len(),
        seed,
        max_roundtrip_error: roundtrip,
        max_level_residual: residual,
        max_outside_slack: outside,
        vertex_distances,
        sampled_extent,
        exact_extent,
        extent_gaps,
    })
}

/// Determinant by cofactor expansion along the first row.
fn det_laplace(m: &[Vec<BigInt>]) -> BigInt {
    match m.len() {
        0 => BigInt::one(),
        1 => m[0][0].clone(),
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = &m[0][j] * det_laplace(&minor);
                if j % 2 == 0 { term } else { -term }
            })
            .sum(),
    }
}

/// gcd of all `k × k` minors.
pub fn determinantal_divisor(a: &IntMatrix, k: usize) -> BigInt {
    let mut g = BigInt::zero();
    for rows in (0..a.nrows()).combinations(k) {
        for cols in (0..a.ncols()).combinations(k) {
            let sub: Vec<Vec<BigInt>> =
                rows.iter().map(|&i| cols.iter().map(|&j| a[(i, j)].clone()).collect()).collect();
            g = g.gcd(&det_laplace(&sub));
            if g.is_one() {
                return g;
            }
        }
    }
    g
}

/// Invariant factors from determinantal divisors: `d_k = D_k / D_{k−1}`.
pub fn snf_oracle(a: &IntMatrix) -> Vec<BigInt> {
    let mut factors = Vec::new();
    let mut prev = BigInt::one();
    for k in 1..=a.nrows().min(a.ncols()) {
        let dk = determinantal_divisor(a, k);
        if dk.is_zero() {
            break;
        }
        factors.push(&dk / &prev);
        prev = dk;
    }
    factors
}

fn smallest_prime_factor(n: &BigInt) -> BigInt {
    let mut p = BigInt::from(2);
    while &(&p * &p) <= n {
        if (n % &p).is_zero() {
            return p;
        }
        p += 1;
    }
    n.clone()
}

/// A nonzero `c` over `ℤ/p` with `Σ c_i L_i ≡ 0 (mod p)`, scaled so that some
/// `c_i = 1`; returns `(c, i)`.
fn dependency_mod_p(rows: &[Vec<BigInt>], p: &BigInt) -> (Vec<BigInt>, usize) {
    let r = rows.len();
    let d = rows[0].len();
    // columns of the augmented system are the rows L_i; eliminate on Lᵀ
    let mut m: Vec<Vec<BigInt>> = (0..d).map(|j| (0..r).map(|i| rows[i][j].mod_floor(p)).collect()).collect();
    let inv = |x: &BigInt| x.modpow(&(p - 2u32), p);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..r {
        let Some(pr) = (row..d).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(row, pr);
        let s = inv(&m[row][col]);
        for x in m[row].iter_mut() {
            *x = (&*x * &s).mod_floor(p);
        }
        for i in 0..d {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let pivot_row = m[row].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x = (&*x - &f * y).mod_floor(p);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free = (0..r).find(|c| !pivots.contains(c)).expect("rows are dependent mod p");
    let mut c = vec![BigInt::zero(); r];
    c[free] = BigInt::one();
    for (i, &pc) in pivots.iter().enumerate() {
        c[pc] = (-&m[i][free]).mod_floor(p);
    }
    (c, free)
}

/// Saturation by repeated index-`p` enlargement, independent of the Smith
/// normal form route: while the maximal minors of the basis share a prime
/// `p`, a combination of the rows is divisible by `p` and replaces one row.
pub fn saturation_oracle(basis: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = basis.iter().map(|r| clear_denominators(r)).collect();
    if rows.is_empty() {
        return rows;
    }
    loop {
        let m = IntMatrix::from_rows(rows.clone()).expect("rectangular");
        let g = determinantal_divisor(&m, rows.len()).abs();
        assert!(!g.is_zero(), "basis must be independent");
        if g.is_one() {
            return rows;
        }
        let p = smallest_prime_factor(&g);
        let (c, i) = dependency_mod_p(&rows, &p);
        let d = rows[0].len();
        let combo: Vec<BigInt> = (0..d)
            .map(|j| rows.iter().zip(&c).map(|(r, ci)| &r[j] * ci).sum::<BigInt>())
            .collect();
        rows[i] = combo.into_iter().map(|x| {
            debug_assert!((&x % &p).is_zero());
            x / &p
        }).collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delzant::build_construction;
    use crate::exactmath::{smith_normal_form, FieldScalar};
    use crate::fixtures;

    fn im(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
            .unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(snf_oracle(&im(&[&[2, 1], &[1, 0]])), ints(&[1, 1]));
        assert_eq!(snf_oracle(&im(&[&[2, 0], &[0, 4]])), ints(&[2, 4]));
        assert_eq!(snf_oracle(&im(&[&[6, 4], &[4, 6]])), ints(&[2, 10]));
        assert_eq!(snf_oracle(&im(&[&[2, 0], &[0, 0]])), ints(&[2]));
        let a = im(&[&[3, 1, 4], &[1, 5, 9], &[2, 6, 5]]);
        assert_eq!(snf_oracle(&a), smith_normal_form(&a).factors);
    }

    #[test]
    fn saturation_oracle_examples() {
        let q = |n: i64| BigRational::from_integer(n.into());
        assert_eq!(saturation_oracle(&[vec![q(2), q(4)]]), vec![ints(&[1, 2])]);
        let out = saturation_oracle(&[vec![q(2), q(0), q(2)], vec![q(0), q(3), q(3)]]);
        let g = determinantal_divisor(&IntMatrix::from_rows(out).unwrap(), 2);
        assert!(g.abs().is_one());
    }

    #[test]
    fn level_point_in_square() {
        let data = build_construction(&fixtures::square()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (mu, p) = random_level_point(&data, &mut rng).unwrap();
        assert!(mu.iter().all(|x| (0.0..=1.0).contains(x)));
        assert!(data.psi(&p).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn triangle_acceptance_ratio() {
        let data = build_construction(&fixtures::triangle()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trials = 20_000;
        let hits = (0..trials)
            .filter(|_| {
                let mu = [rng.random::<f64>(), rng.random::<f64>()];
                data.polytope().contains_approx(&mu, 0.0)
            })
            .count();
        let ratio = hits as f64 / trials as f64;
        assert!((ratio - 0.5).abs() < 0.02, "ratio {ratio}");
    }

    #[test]
    fn empty_sample_report() {
        let data = build_construction(&fixtures::interval()).unwrap();
        let r = certify_moment_image(&data, 0, 3).unwrap();
        assert_eq!(r.samples, 0);
        assert_eq!(r.max_roundtrip_error, 0.0);
        assert_eq!(r.max_level_residual, 0.0);
        assert!(r.vertex_distances.iter().all(|d| d.is_infinite()));
        assert!(r.extent_gaps.iter().all(|d| d.is_infinite()));
    }

    #[test]
    fn quasi_sphere_interval_samples() {
        let data =
            build_construction(&fixtures::quasi_sphere(FieldScalar::one(2), FieldScalar::sqrt_m(2))).unwrap();
        let (report, values) = sample_moment_image(&data, 1000, 5, LEVEL_TOL).unwrap();
        assert!(values.iter().all(|v| (0.0..=1.0).contains(&v[0])));
        assert!(report.max_roundtrip_error <= 1e-12);
        assert_eq!(report.max_outside_slack, 0.0);
    }

    #[test]
    fn quasi_sphere_seed_42() {
        let data =
            build_construction(&fixtures::quasi_sphere(FieldScalar::one(2), FieldScalar::sqrt_m(2))).unwrap();
        let r = certify_moment_image(&data, 10_000, 42).unwrap();
        let (lo, hi) = r.sampled_extent[0];
        assert!(lo >= 0.0 && hi <= 1.0);
        assert!(r.extent_gaps[0] <= 1e-3);
        assert!(r.max_roundtrip_error <= 1e-12);
    }

    #[test]
    fn square_vertices_approached() {
        // a 0.05 × 0.05 corner is missed by all 10⁴ uniform draws with
        // probability (1 − 0.0025)^10⁴ < e^{−24}
        let miss: f64 = (1.0f64 - 0.05 * 0.05).powi(10_000);
        assert!(miss < 1e-10);
        let data = build_construction(&fixtures::square()).unwrap();
        let r = certify_moment_image(&data, 10_000, 0).unwrap();
        assert_eq!(r.vertex_distances.len(), 4);
        assert!(r.vertex_distances.iter().all(|&d| d <= 5e-2), "{:?}", r.vertex_distances);
    }

    #[test]
    fn identical_seeds_give_identical_reports() {
        let data = build_construction(&fixtures::golden_pentagon()).unwrap();
        let a = sample_moment_image(&data, 700, 9, LEVEL_TOL).unwrap();
        let b = sample_moment_image(&data, 700, 9, LEVEL_TOL).unwrap();
        assert_eq!(a, b);
        assert!(a.1.iter().all(|mu| data.polytope().contains_approx(mu, 1e-9)));
    }
}
