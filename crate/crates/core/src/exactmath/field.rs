//! Exact elements `a + b·√m` of a real quadratic field ℚ(√m).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ExactError;

/// Returns true when `m` has no repeated prime factor. `1` counts as square-free.
pub fn is_square_free(m: u64) -> bool {
    if m == 0 {
        return false;
    }
    let mut rest = m;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        if rest.is_multiple_of(p) {
            rest /= p;
            if rest.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// An exact element `a + b·√m` of ℚ(√m) with `m` square-free.
///
/// The representation is canonical: fractions are reduced by `BigRational`,
/// and for `m = 1` the irrational part is folded into `a`, so structural
/// equality coincides with equality of real numbers.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldScalar {
    a: BigRational,
    b: BigRational,
    m: u64,
}

/// The four field operations accepted by [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Applies `op` to two scalars of the same field.
pub fn field_arith(x: &FieldScalar, y: &FieldScalar, op: FieldOp) -> Result<FieldScalar, ExactError> {
    match op {
        FieldOp::Add => x.checked_add(y),
        FieldOp::Sub => x.checked_sub(y),
        FieldOp::Mul => x.checked_mul(y),
        FieldOp::Div => x.checked_div(y),
    }
}

impl FieldScalar {
    pub fn new(a: BigRational, b: BigRational, m: u64) -> Result<Self, ExactError> {
        if !is_square_free(m) {
            return Err(ExactError::NotSquareFree(m));
        }
        Ok(Self::canonical(a, b, m))
    }

    fn canonical(a: BigRational, b: BigRational, m: u64) -> Self {
        if m == 1 {
            FieldScalar { a: a + b, b: BigRational::zero(), m }
        } else {
            FieldScalar { a, b, m }
        }
    }

    /// The rational number `q` viewed inside ℚ(√m).
    pub fn rational(q: BigRational, m: u64) -> Self {
        debug_assert!(is_square_free(m));
        FieldScalar { a: q, b: BigRational::zero(), m }
    }

    pub fn from_int(v: i64, m: u64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(v)), m)
    }

    pub fn from_ratio(num: i64, den: i64, m: u64) -> Self {
        Self::rational(BigRational::new(num.into(), den.into()), m)
    }

    /// `p/q + r/s·√m` from machine integers; panics on a zero denominator.
    pub fn from_parts(a: (i64, i64), b: (i64, i64), m: u64) -> Self {
        Self::canonical(
            BigRational::new(a.0.into(), a.1.into()),
            BigRational::new(b.0.into(), b.1.into()),
            m,
        )
    }

    pub fn zero(m: u64) -> Self {
        Self::rational(BigRational::zero(), m)
    }

    pub fn one(m: u64) -> Self {
        Self::rational(BigRational::one(), m)
    }

    /// √m itself (equal to 1 when m = 1).
    pub fn sqrt_m(m: u64) -> Self {
        Self::canonical(BigRational::zero(), BigRational::one(), m)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    pub fn discriminant(&self) -> u64 {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Algebraic conjugate `a − b√m`.
    pub fn conjugate(&self) -> Self {
        FieldScalar { a: self.a.clone(), b: -self.b.clone(), m: self.m }
    }

    /// Field norm `a² − b²m`, a rational number.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(BigInt::from(self.m))
    }

    /// Exact sign as −1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a² against b²m
        let a2 = &self.a * &self.a;
        let b2m = &self.b * &self.b * BigRational::from_integer(BigInt::from(self.m));
        match a2.cmp(&b2m) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.m as f64).sqrt()
    }

    fn check(&self, other: &Self) -> Result<(), ExactError> {
        if self.m == other.m {
            Ok(())
        } else {
            Err(ExactError::DiscriminantMismatch(self.m, other.m))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        self.check(other)?;
        Ok(FieldScalar { a: &self.a + &other.a, b: &self.b + &other.b, m: self.m })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.check(other)?;
        Ok(FieldScalar { a: &self.a - &other.a, b: &self.b - &other.b, m: self.m })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExactError> {
        self.check(other)?;
        let m = BigRational::from_integer(BigInt::from(self.m));
        let a = &self.a * &other.a + &self.b * &other.b * m;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(FieldScalar { a, b, m: self.m })
    }

    /// Multiplicative inverse via `1/(a+b√m) = (a−b√m)/(a²−b²m)`.
    pub fn checked_inv(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        // m square-free and m > 1 makes √m irrational, so the norm is nonzero
        let n = self.norm();
        Ok(FieldScalar { a: &self.a / &n, b: -(&self.b / &n), m: self.m })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ExactError> {
        self.check(other)?;
        self.checked_mul(&other.checked_inv()?)
    }

    /// Exact comparison; errors on mismatched fields.
    pub fn cmp_exact(&self, other: &Self) -> Result<Ordering, ExactError> {
        Ok(self.checked_sub(other)?.signum().cmp(&0))
    }

    /// Config-file rendering: always `p/q` or `p/q ± r/s*sqrt(m)`.
    pub fn to_config_string(&self) -> String {
        let a = format!("{}/{}", self.a.numer(), self.a.denom());
        if self.b.is_zero() {
            return a;
        }
        let sign = if self.b.is_negative() { '-' } else { '+' };
        let b = self.b.abs();
        format!("{a} {sign} {}/{}*sqrt({})", b.numer(), b.denom(), self.m)
    }
}

fn sign_of(q: &BigRational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for FieldScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.cmp_exact(other).ok()
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let b_abs = self.b.abs();
        let coeff = if b_abs.is_one() { String::new() } else { format!("{b_abs}*") };
        if self.a.is_zero() {
            let sign = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{sign}{coeff}sqrt({})", self.m)
        } else {
            let sign = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{} {sign} {coeff}sqrt({})", self.a, self.m)
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a FieldScalar> for &'a FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: &'a FieldScalar) -> FieldScalar {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        impl $trait for FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: FieldScalar) -> FieldScalar {
                (&self).$method(&rhs)
            }
        }
    };
}

// Operator forms panic on mismatched discriminants or division by zero; use
// the `checked_*` methods where the inputs are not already validated.
forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        FieldScalar { a: -self.a.clone(), b: -self.b.clone(), m: self.m }
    }
}

impl Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(a: (i64, i64), b: (i64, i64), m: u64) -> FieldScalar {
        FieldScalar::from_parts(a, b, m)
    }

    #[test]
    fn conjugate_product() {
        let x = fs((1, 1), (1, 1), 2);
        let y = fs((1, 1), (-1, 1), 2);
        assert_eq!(&x * &y, FieldScalar::from_int(-1, 2));
    }

    #[test]
    fn rationalized_inverse() {
        let x = fs((1, 1), (1, 1), 2);
        assert_eq!(x.checked_inv().unwrap(), fs((-1, 1), (1, 1), 2));
        assert_eq!(
            field_arith(&FieldScalar::one(2), &x, FieldOp::Div).unwrap(),
            fs((-1, 1), (1, 1), 2)
        );
    }

    #[test]
    fn componentwise_add() {
        let x = fs((1, 2), (0, 1), 5);
        let y = fs((0, 1), (1, 3), 5);
        assert_eq!(field_arith(&x, &y, FieldOp::Add).unwrap(), fs((1, 2), (1, 3), 5));
    }

    #[test]
    fn errors() {
        let x = FieldScalar::one(2);
        assert_eq!(
            x.checked_div(&FieldScalar::zero(2)),
            Err(ExactError::DivisionByZero)
        );
        assert_eq!(
            x.checked_add(&FieldScalar::one(3)),
            Err(ExactError::DiscriminantMismatch(2, 3))
        );
        assert_eq!(
            FieldScalar::new(BigRational::one(), BigRational::one(), 8),
            Err(ExactError::NotSquareFree(8))
        );
    }

    #[test]
    fn rational_field_folds_sqrt() {
        let x = fs((1, 2), (1, 2), 1);
        assert!(x.is_rational());
        assert_eq!(x, FieldScalar::one(1));
    }

    #[test]
    fn signs() {
        assert_eq!(fs((3, 2), (-1, 1), 2).signum(), 1); // 1.5 - 1.414
        assert_eq!(fs((7, 5), (-1, 1), 2).signum(), -1); // 1.4 - 1.414
        assert_eq!(fs((-3, 1), (2, 1), 2).signum(), -1);
        assert_eq!(fs((0, 1), (0, 1), 2).signum(), 0);
        assert!(fs((1, 1), (0, 1), 5) < FieldScalar::sqrt_m(5));
    }

    #[test]
    fn square_free() {
        let sf: Vec<u64> = (1..=20).filter(|&m| is_square_free(m)).collect();
        assert_eq!(sf, vec![1, 2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19]);
        assert!(!is_square_free(0));
    }

    #[test]
    fn display_forms() {
        assert_eq!(fs((1, 2), (-1, 3), 5).to_config_string(), "1/2 - 1/3*sqrt(5)");
        assert_eq!(FieldScalar::from_int(3, 2).to_config_string(), "3/1");
        assert_eq!(FieldScalar::sqrt_m(2).to_string(), "sqrt(2)");
        assert_eq!((-FieldScalar::sqrt_m(2)).to_string(), "-sqrt(2)");
        assert_eq!(fs((1, 1), (2, 1), 3).to_string(), "1 + 2*sqrt(3)");
    }
}
