//! Dense views of linear, quadratic, and cubic forms in x1, x2, x3.
//!
//! The coefficient orders are fixed once and for all; every file format and
//! every linear solve in the crate indexes against them:
//!
//! - quadratic: x1², x1x2, x1x3, x2², x2x3, x3²
//! - cubic: x1³, x1²x2, x1²x3, x1x2², x1x2x3, x1x3², x2³, x2²x3, x2x3², x3³

use std::ops::{Add, Neg, Sub};

use crate::error::{Result, WaringError};

use super::{Mode, Monomial, Poly, Scalar, Var};

/// Canonical cubic monomial exponents, in order.
pub const CUBIC_MONOMIALS: [[u8; 3]; 10] = [
    [3, 0, 0],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [1, 1, 1],
    [1, 0, 2],
    [0, 3, 0],
    [0, 2, 1],
    [0, 1, 2],
    [0, 0, 3],
];

/// Canonical quadratic monomial exponents, in order.
pub const QUADRATIC_MONOMIALS: [[u8; 3]; 6] = [
    [2, 0, 0],
    [1, 1, 0],
    [1, 0, 1],
    [0, 2, 0],
    [0, 1, 1],
    [0, 0, 2],
];

/// a1 x1 + a2 x2 + a3 x3.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    pub coeffs: [Scalar; 3],
}

impl LinearForm {
    pub fn new(coeffs: [Scalar; 3]) -> Self {
        let m = coeffs[0].mode();
        assert!(
            coeffs.iter().all(|c| c.mode() == m),
            "mixed scalar modes in linear form"
        );
        LinearForm { coeffs }
    }

    pub fn zero(mode: Mode) -> Self {
        LinearForm::new([Scalar::zero(mode), Scalar::zero(mode), Scalar::zero(mode)])
    }

    pub fn from_ints(c: [i64; 3], mode: Mode) -> Self {
        LinearForm::new([
            Scalar::from_int(c[0], mode),
            Scalar::from_int(c[1], mode),
            Scalar::from_int(c[2], mode),
        ])
    }

    /// The i-th coordinate form (0-based).
    pub fn var(i: usize, mode: Mode) -> Self {
        let mut l = LinearForm::zero(mode);
        l.coeffs[i] = Scalar::one(mode);
        l
    }

    pub fn mode(&self) -> Mode {
        self.coeffs[0].mode()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn to_poly(&self) -> Poly {
        let mode = self.mode();
        let mut p = Poly::zero(mode);
        for i in 0..3 {
            let mut exps = [0u8; 3];
            exps[i] = 1;
            p.add_term(Monomial::from_x(exps), self.coeffs[i].clone());
        }
        p
    }

    pub fn eval(&self, x: &[Scalar; 3]) -> Scalar {
        let mut acc = Scalar::zero(self.mode());
        for i in 0..3 {
            acc = &acc + &(&self.coeffs[i] * &x[i]);
        }
        acc
    }

    pub fn scale(&self, s: &Scalar) -> LinearForm {
        LinearForm::new([
            &self.coeffs[0] * s,
            &self.coeffs[1] * s,
            &self.coeffs[2] * s,
        ])
    }

    pub fn to_float(&self) -> LinearForm {
        LinearForm::new([
            self.coeffs[0].to_float(),
            self.coeffs[1].to_float(),
            self.coeffs[2].to_float(),
        ])
    }

    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(Scalar::abs).fold(0.0, f64::max)
    }

    /// Deterministic representative of the line's direction.
    ///
    /// Float mode: unit sup norm, then the first nonzero coefficient is
    /// rotated to the positive real axis. Exact mode: the first nonzero
    /// coefficient is scaled to exactly 1, which keeps the result exact.
    pub fn normalize(&self) -> LinearForm {
        if self.is_zero() {
            return self.clone();
        }
        match self.mode() {
            Mode::Exact => {
                let lead = self.coeffs.iter().find(|c| !c.is_zero()).unwrap().clone();
                self.scale(&lead.inv().expect("nonzero lead"))
            }
            Mode::Float => {
                let norm = self.coeff_norm();
                let scaled = self.scale(&Scalar::from_f64(1.0 / norm));
                let lead = scaled.coeffs.iter().find(|c| c.abs() > 1e-14);
                match lead {
                    Some(l) => {
                        let phase = &l.clone() * &Scalar::from_f64(1.0 / l.abs());
                        scaled.scale(&phase.conj())
                    }
                    None => scaled,
                }
            }
        }
    }
}

impl Add<&LinearForm> for &LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: &LinearForm) -> LinearForm {
        LinearForm::new([
            &self.coeffs[0] + &rhs.coeffs[0],
            &self.coeffs[1] + &rhs.coeffs[1],
            &self.coeffs[2] + &rhs.coeffs[2],
        ])
    }
}

impl Sub<&LinearForm> for &LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: &LinearForm) -> LinearForm {
        LinearForm::new([
            &self.coeffs[0] - &rhs.coeffs[0],
            &self.coeffs[1] - &rhs.coeffs[1],
            &self.coeffs[2] - &rhs.coeffs[2],
        ])
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        LinearForm::new([-&self.coeffs[0], -&self.coeffs[1], -&self.coeffs[2]])
    }
}

/// Quadratic form as 6 coefficients in the canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm {
    pub coeffs: [Scalar; 6],
}

impl QuadraticForm {
    pub fn new(coeffs: [Scalar; 6]) -> Self {
        let m = coeffs[0].mode();
        assert!(
            coeffs.iter().all(|c| c.mode() == m),
            "mixed scalar modes in quadratic form"
        );
        QuadraticForm { coeffs }
    }

    pub fn zero(mode: Mode) -> Self {
        QuadraticForm::new(std::array::from_fn(|_| Scalar::zero(mode)))
    }

    pub fn from_ints(c: [i64; 6], mode: Mode) -> Self {
        QuadraticForm::new(std::array::from_fn(|i| Scalar::from_int(c[i], mode)))
    }

    pub fn mode(&self) -> Mode {
        self.coeffs[0].mode()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn to_poly(&self) -> Poly {
        let mut p = Poly::zero(self.mode());
        for (i, exps) in QUADRATIC_MONOMIALS.iter().enumerate() {
            p.add_term(Monomial::from_x(*exps), self.coeffs[i].clone());
        }
        p
    }

    /// Lossless round trip from a polynomial of bidegree (2, 0).
    pub fn from_poly(p: &Poly) -> Result<Self> {
        let mut out = QuadraticForm::zero(p.mode());
        for (m, c) in p.terms() {
            if m.udeg() != 0 || m.xdeg() != 2 {
                return Err(WaringError::BidegreeMismatch {
                    expected: (2, 0),
                    found: (m.xdeg(), m.udeg()),
                });
            }
            let idx = QUADRATIC_MONOMIALS
                .iter()
                .position(|e| *e == m.x)
                .expect("degree-2 exponent");
            out.coeffs[idx] = c.clone();
        }
        Ok(out)
    }

    /// The symmetric 3x3 matrix M with q(x) = x^T M x.
    pub fn matrix(&self) -> [[Scalar; 3]; 3] {
        let mode = self.mode();
        let half = Scalar::from_ratio(1, 2, mode);
        let c = &self.coeffs;
        let m01 = &c[1] * &half;
        let m02 = &c[2] * &half;
        let m12 = &c[4] * &half;
        [
            [c[0].clone(), m01.clone(), m02.clone()],
            [m01, c[3].clone(), m12.clone()],
            [m02, m12, c[5].clone()],
        ]
    }

    pub fn eval(&self, x: &[Scalar; 3]) -> Scalar {
        self.to_poly().eval(x, &zero_point(self.mode()))
    }

    pub fn gradient_at(&self, x: &[Scalar; 3]) -> [Scalar; 3] {
        let p = self.to_poly();
        let zeros = zero_point(self.mode());
        std::array::from_fn(|i| p.diff(Var::X[i]).eval(x, &zeros))
    }

    pub fn scale(&self, s: &Scalar) -> QuadraticForm {
        QuadraticForm::new(std::array::from_fn(|i| &self.coeffs[i] * s))
    }

    pub fn sub(&self, other: &QuadraticForm) -> QuadraticForm {
        QuadraticForm::new(std::array::from_fn(|i| &self.coeffs[i] - &other.coeffs[i]))
    }

    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(Scalar::abs).fold(0.0, f64::max)
    }

    pub fn to_float(&self) -> QuadraticForm {
        QuadraticForm::new(std::array::from_fn(|i| self.coeffs[i].to_float()))
    }

    /// b·c as a quadratic form.
    pub fn from_line_product(b: &LinearForm, c: &LinearForm) -> QuadraticForm {
        QuadraticForm::from_poly(&(&b.to_poly() * &c.to_poly())).expect("degree 2 product")
    }

    pub fn from_square(a: &LinearForm) -> QuadraticForm {
        QuadraticForm::from_line_product(a, a)
    }
}

/// Cubic form as 10 coefficients in the canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicForm {
    pub coeffs: [Scalar; 10],
}

impl CubicForm {
    pub fn new(coeffs: [Scalar; 10]) -> Self {
        let m = coeffs[0].mode();
        assert!(
            coeffs.iter().all(|c| c.mode() == m),
            "mixed scalar modes in cubic form"
        );
        CubicForm { coeffs }
    }

    pub fn zero(mode: Mode) -> Self {
        CubicForm::new(std::array::from_fn(|_| Scalar::zero(mode)))
    }

    pub fn from_ints(c: [i64; 10], mode: Mode) -> Self {
        CubicForm::new(std::array::from_fn(|i| Scalar::from_int(c[i], mode)))
    }

    pub fn mode(&self) -> Mode {
        self.coeffs[0].mode()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn to_poly(&self) -> Poly {
        let mut p = Poly::zero(self.mode());
        for (i, exps) in CUBIC_MONOMIALS.iter().enumerate() {
            p.add_term(Monomial::from_x(*exps), self.coeffs[i].clone());
        }
        p
    }

    /// Lossless round trip from a polynomial of bidegree (3, 0).
    pub fn from_poly(p: &Poly) -> Result<Self> {
        let mut out = CubicForm::zero(p.mode());
        for (m, c) in p.terms() {
            if m.udeg() != 0 || m.xdeg() != 3 {
                return Err(WaringError::BidegreeMismatch {
                    expected: (3, 0),
                    found: (m.xdeg(), m.udeg()),
                });
            }
            let idx = CUBIC_MONOMIALS
                .iter()
                .position(|e| *e == m.x)
                .expect("degree-3 exponent");
            out.coeffs[idx] = c.clone();
        }
        Ok(out)
    }

    pub fn coeff(&self, exps: [u8; 3]) -> Scalar {
        let idx = CUBIC_MONOMIALS
            .iter()
            .position(|e| *e == exps)
            .expect("degree-3 exponent");
        self.coeffs[idx].clone()
    }

    pub fn eval(&self, x: &[Scalar; 3]) -> Scalar {
        self.to_poly().eval(x, &zero_point(self.mode()))
    }

    pub fn gradient_at(&self, x: &[Scalar; 3]) -> [Scalar; 3] {
        let p = self.to_poly();
        let zeros = zero_point(self.mode());
        std::array::from_fn(|i| p.diff(Var::X[i]).eval(x, &zeros))
    }

    pub fn scale(&self, s: &Scalar) -> CubicForm {
        CubicForm::new(std::array::from_fn(|i| &self.coeffs[i] * s))
    }

    pub fn add(&self, other: &CubicForm) -> CubicForm {
        CubicForm::new(std::array::from_fn(|i| &self.coeffs[i] + &other.coeffs[i]))
    }

    pub fn sub(&self, other: &CubicForm) -> CubicForm {
        CubicForm::new(std::array::from_fn(|i| &self.coeffs[i] - &other.coeffs[i]))
    }

    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(Scalar::abs).fold(0.0, f64::max)
    }

    pub fn to_float(&self) -> CubicForm {
        CubicForm::new(std::array::from_fn(|i| self.coeffs[i].to_float()))
    }

    /// a·b·c as a cubic form.
    pub fn from_line_product(a: &LinearForm, b: &LinearForm, c: &LinearForm) -> CubicForm {
        let p = &(&a.to_poly() * &b.to_poly()) * &c.to_poly();
        CubicForm::from_poly(&p).expect("degree 3 product")
    }

    /// a³ as a cubic form.
    pub fn cube_of(a: &LinearForm) -> CubicForm {
        CubicForm::from_line_product(a, a, a)
    }

    /// Σ sᵢ·ℓᵢ³.
    pub fn sum_of_scaled_cubes(terms: &[(Scalar, LinearForm)], mode: Mode) -> CubicForm {
        let mut acc = CubicForm::zero(mode);
        for (s, l) in terms {
            acc = acc.add(&CubicForm::cube_of(l).scale(s));
        }
        acc
    }
}

fn zero_point(mode: Mode) -> [Scalar; 3] {
    std::array::from_fn(|_| Scalar::zero(mode))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_round_trip_is_lossless() {
        let f = CubicForm::from_ints([1, -2, 3, 0, 7, 0, -1, 4, 0, 9], Mode::Exact);
        let back = CubicForm::from_poly(&f.to_poly()).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn quadratic_round_trip_is_lossless() {
        let q = QuadraticForm::from_ints([2, 0, -5, 1, 0, 3], Mode::Exact);
        let back = QuadraticForm::from_poly(&q.to_poly()).unwrap();
        assert_eq!(q, back);
    }

    #[test]
    fn from_poly_rejects_wrong_degree() {
        let p = LinearForm::from_ints([1, 1, 0], Mode::Exact).to_poly();
        assert!(CubicForm::from_poly(&p).is_err());
        assert!(QuadraticForm::from_poly(&p).is_err());
    }

    #[test]
    fn line_product_matches_canonical_order() {
        // x1 * x2 * x3 has coefficient 1 on the x1x2x3 slot (index 4)
        let a = LinearForm::var(0, Mode::Exact);
        let b = LinearForm::var(1, Mode::Exact);
        let c = LinearForm::var(2, Mode::Exact);
        let f = CubicForm::from_line_product(&a, &b, &c);
        for (i, coeff) in f.coeffs.iter().enumerate() {
            if i == 4 {
                assert!(coeff.is_one());
            } else {
                assert!(coeff.is_zero());
            }
        }
    }

    #[test]
    fn float_normalize_is_unit_norm_positive_lead() {
        let l = LinearForm::new([
            Scalar::from_complex(0.0, -2.0),
            Scalar::from_f64(1.0),
            Scalar::zero(Mode::Float),
        ]);
        let n = l.normalize();
        assert!((n.coeff_norm() - 1.0).abs() < 1e-12);
        assert!(n.coeffs[0].im_f64().abs() < 1e-12 && n.coeffs[0].re_f64() > 0.0);
    }
}
