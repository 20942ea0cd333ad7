//! Dual-mode complex scalars: exact Gaussian rationals or IEEE complex doubles.
//!
//! Exact mode keeps every identity test exact; float mode carries the
//! decomposition paths that need radicals. The two modes never mix silently:
//! arithmetic on mismatched modes panics, and public entry points validate
//! modes up front and return [`WaringError::MixedModes`](crate::error::WaringError).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::complex::Complex64;
use num::{BigInt, BigRational, Complex, One, Signed, ToPrimitive, Zero};

use crate::error::{Result, WaringError};

/// Scalar arithmetic mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Float => write!(f, "float"),
        }
    }
}

/// A complex scalar in one of the two modes.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Complex<BigRational>),
    Float(Complex64),
}

fn big_ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(Complex::new(BigRational::zero(), BigRational::zero())),
            Mode::Float => Scalar::Float(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(mode: Mode) -> Self {
        Scalar::from_int(1, mode)
    }

    /// The imaginary unit.
    pub fn i(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(Complex::new(BigRational::zero(), BigRational::one())),
            Mode::Float => Scalar::Float(Complex64::new(0.0, 1.0)),
        }
    }

    pub fn from_int(n: i64, mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(Complex::new(big_ratio(n, 1), BigRational::zero())),
            Mode::Float => Scalar::Float(Complex64::new(n as f64, 0.0)),
        }
    }

    /// n/d as a real scalar. Panics if `d == 0`.
    pub fn from_ratio(n: i64, d: i64, mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(Complex::new(big_ratio(n, d), BigRational::zero())),
            Mode::Float => Scalar::Float(Complex64::new(n as f64 / d as f64, 0.0)),
        }
    }

    pub fn from_f64(re: f64) -> Self {
        Scalar::Float(Complex64::new(re, 0.0))
    }

    pub fn from_complex(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    /// Parses exact rationals from "n/d" or "n" strings.
    pub fn exact_from_strs(re: &str, im: &str) -> Result<Self> {
        let parse = |s: &str| -> Result<BigRational> {
            BigRational::from_str(s.trim())
                .map_err(|e| WaringError::Parse(format!("bad rational {s:?}: {e}")))
        };
        Ok(Scalar::Exact(Complex::new(parse(re)?, parse(im)?)))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.re.is_zero() && z.im.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.re.is_one() && z.im.is_zero(),
            Scalar::Float(z) => z.re == 1.0 && z.im == 0.0,
        }
    }

    /// Modulus as f64. In exact mode this is an approximation used only for
    /// norms, margins, and pivot selection.
    pub fn abs(&self) -> f64 {
        match self {
            Scalar::Exact(z) => {
                let re = z.re.to_f64().unwrap_or(f64::NAN);
                let im = z.im.to_f64().unwrap_or(f64::NAN);
                re.hypot(im)
            }
            Scalar::Float(z) => z.norm(),
        }
    }

    pub fn to_complex64(&self) -> Complex64 {
        match self {
            Scalar::Exact(z) => Complex64::new(
                z.re.to_f64().unwrap_or(f64::NAN),
                z.im.to_f64().unwrap_or(f64::NAN),
            ),
            Scalar::Float(z) => *z,
        }
    }

    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_complex64())
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::Exact(z.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn checked_op(&self, other: &Scalar) -> Result<()> {
        if self.mode() == other.mode() {
            Ok(())
        } else {
            Err(WaringError::MixedModes(self.mode(), other.mode()))
        }
    }

    #[track_caller]
    fn expect_same(&self, other: &Scalar) {
        assert!(
            self.mode() == other.mode(),
            "mixed scalar modes: {} vs {}",
            self.mode(),
            other.mode()
        );
    }

    pub fn pow(&self, n: u32) -> Scalar {
        let mut acc = Scalar::one(self.mode());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(WaringError::Precondition {
                op: "scalar inverse",
                detail: "division by zero".into(),
            });
        }
        Ok(match self {
            Scalar::Exact(z) => {
                let one: Complex<BigRational> = Complex::new(BigRational::one(), BigRational::zero());
                Scalar::Exact(one / z.clone())
            }
            Scalar::Float(z) => Scalar::Float(Complex64::new(1.0, 0.0) / z),
        })
    }

    /// Principal square root. Float mode always succeeds; exact mode succeeds
    /// only when the root is again a Gaussian rational.
    pub fn sqrt(&self) -> Result<Scalar> {
        match self {
            Scalar::Float(z) => Ok(Scalar::Float(z.sqrt())),
            Scalar::Exact(z) => gaussian_sqrt(z).map(Scalar::Exact).ok_or(
                WaringError::RadicalRequired {
                    op: "scalar sqrt",
                    detail: "square root is not a Gaussian rational",
                },
            ),
        }
    }

    /// Principal square root, promoting exact inputs to float when the exact
    /// root does not exist.
    pub fn sqrt_lossy(&self) -> Scalar {
        match self.sqrt() {
            Ok(s) => s,
            Err(_) => Scalar::Float(self.to_complex64().sqrt()),
        }
    }

    /// Principal cube root, always in float mode.
    pub fn cbrt_float(&self) -> Scalar {
        let z = self.to_complex64();
        if z.re == 0.0 && z.im == 0.0 {
            return Scalar::Float(Complex64::new(0.0, 0.0));
        }
        Scalar::Float(z.powf(1.0 / 3.0))
    }

    pub fn re_f64(&self) -> f64 {
        self.to_complex64().re
    }

    pub fn im_f64(&self) -> f64 {
        self.to_complex64().im
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let sn = r.numer().sqrt();
    if &(&sn * &sn) != r.numer() {
        return None;
    }
    let sd = r.denom().sqrt();
    if &(&sd * &sd) != r.denom() {
        return None;
    }
    Some(BigRational::new(sn, sd))
}

/// Principal square root of a Gaussian rational, when it is one.
fn gaussian_sqrt(z: &Complex<BigRational>) -> Option<Complex<BigRational>> {
    if z.im.is_zero() {
        if !z.re.is_negative() {
            let s = rational_sqrt(&z.re)?;
            Some(Complex::new(s, BigRational::zero()))
        } else {
            let s = rational_sqrt(&-z.re.clone())?;
            Some(Complex::new(BigRational::zero(), s))
        }
    } else {
        let n2 = &z.re * &z.re + &z.im * &z.im;
        let r = rational_sqrt(&n2)?;
        let two = big_ratio(2, 1);
        let x = rational_sqrt(&((&z.re + &r) / &two))?;
        if x.is_zero() {
            return None;
        }
        let y = &z.im / &(&x * &two);
        Some(Complex::new(x, y))
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            #[track_caller]
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.expect_same(rhs);
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.clone() $op b.clone()),
                    (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a $op b),
                    _ => unreachable!(),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            #[track_caller]
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    #[track_caller]
    fn div(self, rhs: &Scalar) -> Scalar {
        self.expect_same(rhs);
        assert!(!rhs.is_zero(), "scalar division by zero");
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.clone() / b.clone()),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a / b),
            _ => unreachable!(),
        }
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    #[track_caller]
    fn div(self, rhs: Scalar) -> Scalar {
        (&self) / (&rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::Exact(-z.clone()),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(&self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(z) => {
                if z.im.is_zero() {
                    write!(f, "{}", z.re)
                } else {
                    write!(f, "{}{:+}i", z.re, z.im)
                }
            }
            Scalar::Float(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", z.re)
                } else {
                    write!(f, "{}{:+}i", z.re, z.im)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_is_lossless() {
        let a = Scalar::from_ratio(1, 3, Mode::Exact);
        let b = Scalar::from_ratio(1, 6, Mode::Exact);
        let sum = &a + &b;
        assert_eq!(sum, Scalar::from_ratio(1, 2, Mode::Exact));
        let prod = &a * &b;
        assert_eq!(prod, Scalar::from_ratio(1, 18, Mode::Exact));
    }

    #[test]
    fn mixed_mode_is_rejected() {
        let a = Scalar::from_int(1, Mode::Exact);
        let b = Scalar::from_int(1, Mode::Float);
        assert!(a.checked_op(&b).is_err());
        let r = std::panic::catch_unwind(|| &a + &b);
        assert!(r.is_err());
    }

    #[test]
    fn gaussian_sqrt_exact_cases() {
        // sqrt(-1) = i
        let m1 = Scalar::from_int(-1, Mode::Exact);
        assert_eq!(m1.sqrt().unwrap(), Scalar::i(Mode::Exact));
        // sqrt(9/4) = 3/2
        let q = Scalar::from_ratio(9, 4, Mode::Exact);
        assert_eq!(q.sqrt().unwrap(), Scalar::from_ratio(3, 2, Mode::Exact));
        // sqrt(2i) = 1 + i
        let z = &Scalar::i(Mode::Exact) * &Scalar::from_int(2, Mode::Exact);
        let s = z.sqrt().unwrap();
        assert_eq!(&s * &s, z);
        // sqrt(2) is not a Gaussian rational
        assert!(Scalar::from_int(2, Mode::Exact).sqrt().is_err());
    }

    #[test]
    fn float_sqrt_is_principal() {
        let z = Scalar::from_complex(-4.0, 0.0);
        let s = z.sqrt().unwrap();
        assert!((s.re_f64()).abs() < 1e-15 && (s.im_f64() - 2.0).abs() < 1e-15);
    }
}
