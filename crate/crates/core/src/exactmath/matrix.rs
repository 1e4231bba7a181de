//! Dense exact matrices and Gauss-Jordan elimination over ℚ and ℚ(√m).

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::FieldScalar;
use super::ExactError;

/// Arithmetic needed by the elimination routines.
///
/// `zero_like`/`one_like` exist because a [`FieldScalar`] carries its
/// discriminant, so constants have to be minted from an existing element.
pub trait Scalar: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_value(&self) -> bool;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    /// Panics on a zero divisor.
    fn div_ref(&self, rhs: &Self) -> Self;
}

impl Scalar for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_ref(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

impl Scalar for FieldScalar {
    fn zero_like(&self) -> Self {
        FieldScalar::zero(self.discriminant())
    }
    fn one_like(&self) -> Self {
        FieldScalar::one(self.discriminant())
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_ref(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExactMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type FieldMatrix = ExactMatrix<FieldScalar>;
pub type RationalMatrix = ExactMatrix<BigRational>;
pub type IntMatrix = ExactMatrix<BigInt>;

impl<T: Clone> ExactMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, ExactError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(ExactError::Ragged);
        }
        Ok(ExactMatrix { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() })
    }

    /// Builds a `rows × cols` matrix from a generator function.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix { rows, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])].clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |i, j| self[(rows[i], j)].clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> ExactMatrix<U> {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T> Index<(usize, usize)> for ExactMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ExactMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Display for ExactMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Result of Gauss-Jordan elimination.
#[derive(Clone, Debug)]
pub struct Echelon<T> {
    pub reduced: ExactMatrix<T>,
    pub pivots: Vec<usize>,
}

impl<T: Scalar> ExactMatrix<T> {
    /// Any element, used to mint zeros and ones with the right discriminant.
    fn sample(&self) -> &T {
        self.data.first().expect("elimination on an empty matrix")
    }

    /// Reduced row echelon form with the list of pivot columns.
    pub fn rref(&self) -> Echelon<T> {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        if a.is_empty() {
            return Echelon { reduced: a, pivots };
        }
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero_value()) else {
                continue;
            };
            a.swap_rows(r, p);
            let inv = a[(r, c)].one_like().div_ref(&a[(r, c)]);
            for j in c..a.cols {
                a[(r, j)] = a[(r, j)].mul_ref(&inv);
            }
            for i in 0..a.rows {
                if i != r && !a[(i, c)].is_zero_value() {
                    let factor = a[(i, c)].clone();
                    for j in c..a.cols {
                        let delta = factor.mul_ref(&a[(r, j)]);
                        a[(i, j)] = a[(i, j)].sub_ref(&delta);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: a, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right kernel `{v : A v = 0}`, one vector per free column.
    ///
    /// Each basis vector has a 1 in its free column and zeros in the other
    /// free columns, so the returned basis is canonical for the matrix.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        if self.is_empty() {
            return Vec::new();
        }
        let Echelon { reduced, pivots } = self.rref();
        let zero = self.sample().zero_like();
        let one = self.sample().one_like();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![zero.clone(); self.cols];
                v[f] = one.clone();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = zero.sub_ref(&reduced[(r, f)]);
                }
                v
            })
            .collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.sample().zero_like();
                for j in 0..self.cols {
                    acc = acc.add_ref(&self[(i, j)].mul_ref(&v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn mul_mat(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in mul_mat");
        let zero = self.sample().zero_like();
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = zero.clone();
            for k in 0..self.cols {
                acc = acc.add_ref(&self[(i, k)].mul_ref(&rhs[(k, j)]));
            }
            acc
        })
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let zero = self.sample().zero_like();
        let one = self.sample().one_like();
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                one.clone()
            } else {
                zero.clone()
            }
        });
        let Echelon { reduced, pivots } = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| reduced[(i, n + j)].clone()))
    }

    /// Unique solution of the square system `A x = b`, `None` when singular.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        Some(self.inverse()?.mul_vec(b))
    }
}

impl FieldMatrix {
    /// Common discriminant of all entries.
    pub fn discriminant(&self) -> Option<u64> {
        self.data.first().map(FieldScalar::discriminant)
    }

    pub fn check_discriminant(&self) -> Result<(), ExactError> {
        if let Some(m) = self.discriminant() {
            if let Some(x) = self.data.iter().find(|x| x.discriminant() != m) {
                return Err(ExactError::DiscriminantMismatch(m, x.discriminant()));
            }
        }
        Ok(())
    }

    /// Kernel over ℚ(√m).
    pub fn field_kernel(&self) -> Vec<Vec<FieldScalar>> {
        self.kernel()
    }

    /// `{v ∈ ℚᵈ : A v = 0}`: every row splits into its rational and √m rows.
    pub fn rational_kernel(&self) -> Vec<Vec<BigRational>> {
        if self.is_empty() {
            return Vec::new();
        }
        self.rational_split().kernel()
    }

    /// The `2r × c` rational matrix whose kernel is the rational kernel of `self`.
    pub fn rational_split(&self) -> RationalMatrix {
        RationalMatrix::from_fn(2 * self.rows, self.cols, |i, j| {
            let x = &self[(i / 2, j)];
            if i % 2 == 0 {
                x.rational_part().clone()
            } else {
                x.irrational_part().clone()
            }
        })
    }

    pub fn to_f64(&self) -> ExactMatrix<f64> {
        self.map(FieldScalar::to_f64)
    }
}

/// Free-function form of [`FieldMatrix::field_kernel`].
pub fn field_kernel(m: &FieldMatrix) -> Vec<Vec<FieldScalar>> {
    m.field_kernel()
}

/// Free-function form of [`FieldMatrix::rational_kernel`].
pub fn rational_kernel(m: &FieldMatrix) -> Vec<Vec<BigRational>> {
    m.rational_kernel()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fi(v: i64, m: u64) -> FieldScalar {
        FieldScalar::from_int(v, m)
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn kernel_of_irrational_row() {
        let m = FieldMatrix::from_rows(vec![vec![fi(1, 2), -FieldScalar::sqrt_m(2)]]).unwrap();
        assert_eq!(m.field_kernel(), vec![vec![FieldScalar::sqrt_m(2), fi(1, 2)]]);
        assert!(m.rational_kernel().is_empty());
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let m = FieldMatrix::from_rows(vec![vec![fi(1, 1), fi(0, 1)], vec![fi(0, 1), fi(1, 1)]])
            .unwrap();
        assert!(m.field_kernel().is_empty());
    }

    #[test]
    fn kernel_of_opposite_normals() {
        let rows = vec![
            vec![fi(1, 1), fi(0, 1), fi(-1, 1), fi(0, 1)],
            vec![fi(0, 1), fi(1, 1), fi(0, 1), fi(-1, 1)],
        ];
        let m = FieldMatrix::from_rows(rows).unwrap();
        let expect = vec![
            vec![fi(1, 1), fi(0, 1), fi(1, 1), fi(0, 1)],
            vec![fi(0, 1), fi(1, 1), fi(0, 1), fi(1, 1)],
        ];
        assert_eq!(m.field_kernel(), expect);
    }

    #[test]
    fn rational_kernels_of_rational_rows() {
        let m = FieldMatrix::from_rows(vec![vec![fi(1, 1), fi(-1, 1)]]).unwrap();
        assert_eq!(m.rational_kernel(), vec![vec![q(1), q(1)]]);
        let m = FieldMatrix::from_rows(vec![vec![fi(1, 1), fi(-2, 1)]]).unwrap();
        assert_eq!(m.rational_kernel(), vec![vec![q(2), q(1)]]);
    }

    #[test]
    fn inverse_and_solve() {
        let s = FieldScalar::sqrt_m(5);
        let m = FieldMatrix::from_rows(vec![vec![fi(1, 5), s.clone()], vec![s.clone(), fi(2, 5)]])
            .unwrap();
        let inv = m.inverse().unwrap();
        let id = m.mul_mat(&inv);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(id[(i, j)], fi(i64::from(i == j), 5));
            }
        }
        let sing = FieldMatrix::from_rows(vec![vec![fi(1, 5), s.clone()], vec![s.clone(), fi(5, 5)]])
            .unwrap();
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn mixed_discriminants_detected() {
        let m = FieldMatrix::from_rows(vec![vec![fi(1, 2), fi(1, 3)]]).unwrap();
        assert_eq!(m.check_discriminant(), Err(ExactError::DiscriminantMismatch(2, 3)));
        assert_eq!(
            FieldMatrix::from_rows(vec![vec![fi(1, 2)], vec![]]).unwrap_err(),
            ExactError::Ragged
        );
    }
}
