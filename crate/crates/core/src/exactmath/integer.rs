//! Integer normal forms and lattice saturation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::{IntMatrix, RationalMatrix};
use super::ExactError;

/// Smith normal form `U·A·V = diag(d₁, …, d_r, 0, …)`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// All nonzero diagonal entries, including 1s, with `d₁ | d₂ | …`.
    pub factors: Vec<BigInt>,
    pub rank: usize,
    /// Unimodular row transform `U`.
    pub left: IntMatrix,
    /// Unimodular column transform `V`.
    pub right: IntMatrix,
    /// `V⁻¹`, maintained alongside `V`.
    pub right_inverse: IntMatrix,
}

impl SmithForm {
    /// Invariant factors other than 1.
    pub fn nontrivial_factors(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

fn identity(n: usize) -> IntMatrix {
    IntMatrix::from_fn(n, n, |i, j| if i == j { BigInt::one() } else { BigInt::zero() })
}

/// `row_dst += q · row_src`
fn add_row_multiple(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for j in 0..m.ncols() {
        let delta = q * &m[(src, j)];
        m[(dst, j)] += delta;
    }
}

fn add_col_multiple(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for i in 0..m.nrows() {
        let delta = q * &m[(i, src)];
        m[(i, dst)] += delta;
    }
}

fn negate_row(m: &mut IntMatrix, r: usize) {
    for j in 0..m.ncols() {
        m[(r, j)] = -m[(r, j)].clone();
    }
}

/// Position of the entry of least absolute value in the trailing block.
fn smallest_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.nrows() {
        for j in t..a.ncols() {
            let v = &a[(i, j)];
            if v.is_zero() {
                continue;
            }
            match best {
                Some(b) if a[b].abs() <= v.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Smith normal form with pivoting on the smallest nonzero entry.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (rows, cols) = (a.nrows(), a.ncols());
    let mut d = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut v_inv = identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        let Some(_) = smallest_nonzero(&d, t) else { break };
        loop {
            let (pi, pj) = smallest_nonzero(&d, t).expect("block became zero");
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let pivot = d[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&pivot);
                add_row_multiple(&mut d, i, t, &q);
                add_row_multiple(&mut u, i, t, &q);
                dirty |= !d[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&pivot);
                add_col_multiple(&mut d, j, t, &q);
                add_col_multiple(&mut v, j, t, &q);
                // V⁻¹ picks up the inverse elementary operation on rows
                let neg = -q;
                add_row_multiple(&mut v_inv, t, j, &neg);
                dirty |= !d[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            // row and column are clear; enforce divisibility of the block
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&pivot));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::one();
                    add_row_multiple(&mut d, t, i, &one);
                    add_row_multiple(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
        t += 1;
    }
    let factors: Vec<BigInt> = (0..rows.min(cols))
        .map(|i| d[(i, i)].clone())
        .take_while(|x| !x.is_zero())
        .collect();
    SmithForm { rank: factors.len(), factors, left: u, right: v, right_inverse: v_inv }
}

/// Row-style Hermite normal form: nonzero rows only, positive pivots, entries
/// above each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(a: &IntMatrix) -> IntMatrix {
    let mut h = a.clone();
    let (rows, cols) = (h.nrows(), h.ncols());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // gcd-combine everything below into row r
        for i in r + 1..rows {
            if h[(i, c)].is_zero() {
                continue;
            }
            let (x, y) = (h[(r, c)].clone(), h[(i, c)].clone());
            let eg = x.extended_gcd(&y);
            let (g, s, tco) = (eg.gcd, eg.x, eg.y);
            let (xg, yg) = (&x / &g, &y / &g);
            for j in 0..cols {
                let top = &s * &h[(r, j)] + &tco * &h[(i, j)];
                let bottom = &xg * &h[(i, j)] - &yg * &h[(r, j)];
                h[(r, j)] = top;
                h[(i, j)] = bottom;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            negate_row(&mut h, r);
        }
        let pivot = h[(r, c)].clone();
        for i in 0..r {
            let q = -h[(i, c)].div_floor(&pivot);
            if !q.is_zero() {
                add_row_multiple(&mut h, i, r, &q);
            }
        }
        r += 1;
    }
    h.select_rows(&(0..r).collect::<Vec<_>>())
}

/// Scales a rational vector by the lcm of its denominators.
pub fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

/// Integer basis (in Hermite normal form) of `V ∩ ℤᵈ`, where `V` is the
/// ℚ-span of `basis`.
pub fn saturate_lattice(basis: &[Vec<BigRational>]) -> Result<IntMatrix, ExactError> {
    let Some(first) = basis.first() else {
        return Ok(IntMatrix::from_fn(0, 0, |_, _| BigInt::zero()));
    };
    let dim = first.len();
    if basis.iter().any(|r| r.len() != dim) {
        return Err(ExactError::Ragged);
    }
    let a = IntMatrix::from_rows(basis.iter().map(|r| clear_denominators(r)).collect())?;
    let snf = smith_normal_form(&a);
    if snf.rank < basis.len() {
        return Err(ExactError::DependentBasis);
    }
    // A = U⁻¹ D V⁻¹, so the first r rows of V⁻¹ span V and are part of a ℤ-basis of ℤᵈ
    let rows: Vec<usize> = (0..snf.rank).collect();
    Ok(hermite_normal_form(&snf.right_inverse.select_rows(&rows)))
}

/// Rational view of an integer matrix.
pub fn to_rational(a: &IntMatrix) -> RationalMatrix {
    a.map(|x| BigRational::from_integer(x.clone()))
}
