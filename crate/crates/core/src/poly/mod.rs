//! Sparse bihomogeneous polynomials in the variables x1..x3 and u1..u3.
//!
//! Coefficients are dual-mode [`Scalar`]s. Terms are kept in a `BTreeMap`
//! keyed by exponent vectors, so iteration order (and hence float summation
//! order) is deterministic. Zero coefficients are never stored; in float mode
//! only exact `0.0` is dropped automatically, tolerance pruning is the
//! explicit [`Poly::prune`] operation.

mod forms;
mod scalar;

pub use forms::{CubicForm, LinearForm, QuadraticForm, CUBIC_MONOMIALS, QUADRATIC_MONOMIALS};
pub use scalar::{Mode, Scalar};

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Result, WaringError};

/// One of the six variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X1,
    X2,
    X3,
    U1,
    U2,
    U3,
}

impl Var {
    pub const ALL: [Var; 6] = [Var::X1, Var::X2, Var::X3, Var::U1, Var::U2, Var::U3];

    pub const X: [Var; 3] = [Var::X1, Var::X2, Var::X3];
    pub const U: [Var; 3] = [Var::U1, Var::U2, Var::U3];
}

/// Exponent vector, split into the x-block and the u-block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub x: [u8; 3],
    pub u: [u8; 3],
}

impl Monomial {
    pub const ONE: Monomial = Monomial { x: [0; 3], u: [0; 3] };

    pub fn from_x(x: [u8; 3]) -> Self {
        Monomial { x, u: [0; 3] }
    }

    pub fn from_u(u: [u8; 3]) -> Self {
        Monomial { x: [0; 3], u }
    }

    pub fn xdeg(&self) -> u8 {
        self.x.iter().sum()
    }

    pub fn udeg(&self) -> u8 {
        self.u.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut x = [0u8; 3];
        let mut u = [0u8; 3];
        for i in 0..3 {
            x[i] = self.x[i] + other.x[i];
            u[i] = self.u[i] + other.u[i];
        }
        Monomial { x, u }
    }

    fn exp(&self, v: Var) -> u8 {
        match v {
            Var::X1 => self.x[0],
            Var::X2 => self.x[1],
            Var::X3 => self.x[2],
            Var::U1 => self.u[0],
            Var::U2 => self.u[1],
            Var::U3 => self.u[2],
        }
    }

    fn with_exp(&self, v: Var, e: u8) -> Monomial {
        let mut m = *self;
        match v {
            Var::X1 => m.x[0] = e,
            Var::X2 => m.x[1] = e,
            Var::X3 => m.x[2] = e,
            Var::U1 => m.u[0] = e,
            Var::U2 => m.u[1] = e,
            Var::U3 => m.u[2] = e,
        }
        m
    }
}

/// Sparse polynomial over a fixed scalar mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    mode: Mode,
    terms: BTreeMap<Monomial, Scalar>,
    declared: Option<(u8, u8)>,
}

impl Poly {
    pub fn zero(mode: Mode) -> Self {
        Poly {
            mode,
            terms: BTreeMap::new(),
            declared: None,
        }
    }

    pub fn constant(s: Scalar) -> Self {
        let mut p = Poly::zero(s.mode());
        p.insert(Monomial::ONE, s);
        p
    }

    pub fn var(v: Var, mode: Mode) -> Self {
        let mut p = Poly::zero(mode);
        p.insert(Monomial::ONE.with_exp(v, 1), Scalar::one(mode));
        p
    }

    pub fn from_terms<I>(mode: Mode, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Scalar)>,
    {
        let mut p = Poly::zero(mode);
        for (m, c) in terms {
            if c.mode() != mode {
                return Err(WaringError::MixedModes(mode, c.mode()));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Declares a bidegree and validates every stored term against it.
    pub fn with_declared_bidegree(mut self, dx: u8, du: u8) -> Result<Self> {
        for m in self.terms.keys() {
            if m.xdeg() != dx || m.udeg() != du {
                return Err(WaringError::BidegreeMismatch {
                    expected: (dx, du),
                    found: (m.xdeg(), m.udeg()),
                });
            }
        }
        self.declared = Some((dx, du));
        Ok(self)
    }

    pub fn declared_bidegree(&self) -> Option<(u8, u8)> {
        self.declared
    }

    /// The common (x, u) bidegree of all terms, if the polynomial is
    /// bihomogeneous. The zero polynomial reports `None`.
    pub fn bidegree(&self) -> Option<(u8, u8)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let bd = (first.xdeg(), first.udeg());
        for m in it {
            if (m.xdeg(), m.udeg()) != bd {
                return None;
            }
        }
        Some(bd)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.mode))
    }

    fn insert(&mut self, m: Monomial, c: Scalar) {
        if !c.is_zero() {
            self.terms.insert(m, c);
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        assert!(c.mode() == self.mode, "mixed scalar modes in add_term");
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => self.insert(m, &old + &c),
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.same_mode(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.same_mode(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.same_mode(other)?;
        Ok(self * other)
    }

    pub fn checked_scale(&self, s: &Scalar) -> Result<Poly> {
        if s.mode() != self.mode {
            return Err(WaringError::MixedModes(self.mode, s.mode()));
        }
        Ok(self.scale(s))
    }

    fn same_mode(&self, other: &Poly) -> Result<()> {
        if self.mode == other.mode {
            Ok(())
        } else {
            Err(WaringError::MixedModes(self.mode, other.mode))
        }
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        assert!(s.mode() == self.mode, "mixed scalar modes in scale");
        let mut out = Poly::zero(self.mode);
        if s.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            out.insert(*m, c * s);
        }
        out.declared = self.declared;
        out
    }

    pub fn scale_int(&self, n: i64) -> Poly {
        self.scale(&Scalar::from_int(n, self.mode))
    }

    pub fn scale_ratio(&self, n: i64, d: i64) -> Poly {
        self.scale(&Scalar::from_ratio(n, d, self.mode))
    }

    /// Formal partial derivative.
    pub fn diff(&self, v: Var) -> Poly {
        let mut out = Poly::zero(self.mode);
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            let factor = Scalar::from_int(e as i64, self.mode);
            out.add_term(m.with_exp(v, e - 1), c * &factor);
        }
        out
    }

    /// Substitutes x ↦ Lx where `l[i][j]` is the coefficient of the new x_j
    /// in the image of x_i. Requires u-degree zero.
    pub fn substitute_linear(&self, l: &[[Scalar; 3]; 3]) -> Result<Poly> {
        for m in self.terms.keys() {
            if m.udeg() != 0 {
                return Err(WaringError::NonzeroUDegree(m.udeg()));
            }
        }
        for row in l {
            for s in row {
                if s.mode() != self.mode {
                    return Err(WaringError::MixedModes(self.mode, s.mode()));
                }
            }
        }
        let images: Vec<Poly> = (0..3)
            .map(|i| {
                let mut p = Poly::zero(self.mode);
                for j in 0..3 {
                    p.add_term(Monomial::ONE.with_exp(Var::X[j], 1), l[i][j].clone());
                }
                p
            })
            .collect();
        let mut out = Poly::zero(self.mode);
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(c.clone());
            for i in 0..3 {
                for _ in 0..m.x[i] {
                    acc = &acc * &images[i];
                }
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    /// Value at a point. Both points must be in the polynomial's mode.
    pub fn eval(&self, x: &[Scalar; 3], u: &[Scalar; 3]) -> Scalar {
        let mut acc = Scalar::zero(self.mode);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..3 {
                if m.x[i] > 0 {
                    t = &t * &x[i].pow(m.x[i] as u32);
                }
                if m.u[i] > 0 {
                    t = &t * &u[i].pow(m.u[i] as u32);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Substitutes numeric values for the u-block, leaving x symbolic.
    pub fn restrict_u(&self, u: &[Scalar; 3]) -> Poly {
        let mut out = Poly::zero(self.mode);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..3 {
                if m.u[i] > 0 {
                    t = &t * &u[i].pow(m.u[i] as u32);
                }
            }
            out.add_term(Monomial::from_x(m.x), t);
        }
        out
    }

    /// The value of a constant polynomial (degree 0 in both blocks).
    ///
    /// Panics if any non-constant term is stored.
    pub fn constant_value(&self) -> Scalar {
        for m in self.terms.keys() {
            assert!(
                *m == Monomial::ONE,
                "constant_value on non-constant polynomial"
            );
        }
        self.coeff(&Monomial::ONE)
    }

    /// Sup norm of the coefficients.
    pub fn coeff_norm(&self) -> f64 {
        self.terms.values().map(Scalar::abs).fold(0.0, f64::max)
    }

    /// Drops float coefficients with modulus at most `eps`. Exact mode is
    /// returned unchanged (exact zeros are never stored).
    pub fn prune(&self, eps: f64) -> Poly {
        if self.mode == Mode::Exact {
            return self.clone();
        }
        let mut out = Poly::zero(self.mode);
        for (m, c) in &self.terms {
            if c.abs() > eps {
                out.insert(*m, c.clone());
            }
        }
        out.declared = self.declared;
        out
    }

    pub fn to_float(&self) -> Poly {
        let mut out = Poly::zero(Mode::Float);
        for (m, c) in &self.terms {
            out.add_term(*m, c.to_float());
        }
        out.declared = self.declared;
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = Poly::zero(self.mode);
        for (m, c) in &self.terms {
            out.insert(*m, -c);
        }
        out.declared = self.declared;
        out
    }
}

impl std::ops::Add<&Poly> for &Poly {
    type Output = Poly;
    #[track_caller]
    fn add(self, rhs: &Poly) -> Poly {
        assert!(self.mode == rhs.mode, "mixed scalar modes in add");
        let mut out = self.clone();
        out.declared = match (self.declared, rhs.declared) {
            (Some(a), Some(b)) if a == b => Some(a),
            _ => None,
        };
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl std::ops::Sub<&Poly> for &Poly {
    type Output = Poly;
    #[track_caller]
    fn sub(self, rhs: &Poly) -> Poly {
        self + &rhs.neg()
    }
}

impl std::ops::Mul<&Poly> for &Poly {
    type Output = Poly;
    #[track_caller]
    fn mul(self, rhs: &Poly) -> Poly {
        assert!(self.mode == rhs.mode, "mixed scalar modes in mul");
        let mut out = Poly::zero(self.mode);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out.declared = match (self.declared, rhs.declared) {
            (Some((ax, au)), Some((bx, bu))) => Some((ax + bx, au + bu)),
            _ => None,
        };
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = ["x1", "x2", "x3", "u1", "u2", "u3"];
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            let exps = [m.x[0], m.x[1], m.x[2], m.u[0], m.u[1], m.u[2]];
            for (i, &e) in exps.iter().enumerate() {
                if e == 1 {
                    write!(f, "*{}", names[i])?;
                } else if e > 1 {
                    write!(f, "*{}^{}", names[i], e)?;
                }
            }
        }
        Ok(())
    }
}
