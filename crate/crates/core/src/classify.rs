//! Tolerance-aware zero tests and the rank decision procedures.
//!
//! The cubic classifier walks a fixed decision table on the sup-norm
//! normalized form; each row is reached only when every previous row failed.
//! In float mode a concomitant of homogeneity weight w counts as zero when
//! its coefficient sup norm is at most ε·‖f‖^w; in exact mode zero means
//! exactly zero and ε is ignored. Classification is discontinuous, so the
//! tested magnitudes are reported as margins rather than hidden.

use std::collections::BTreeMap;

use crate::concom::quad_concomitants;
use crate::poly::{CubicForm, Mode, Poly, QuadraticForm, Scalar};
use crate::transvect::{transvectant, ux_power};

/// Zero-test policy: epsilon is only consulted in float mode.
#[derive(Clone, Copy, Debug)]
pub struct ZeroTestPolicy {
    pub epsilon: f64,
    pub mode: Mode,
}

impl ZeroTestPolicy {
    pub const DEFAULT_EPSILON: f64 = 1e-8;

    pub fn exact() -> Self {
        ZeroTestPolicy {
            epsilon: Self::DEFAULT_EPSILON,
            mode: Mode::Exact,
        }
    }

    pub fn float(epsilon: f64) -> Self {
        ZeroTestPolicy {
            epsilon,
            mode: Mode::Float,
        }
    }

    pub fn for_mode(mode: Mode) -> Self {
        ZeroTestPolicy {
            epsilon: Self::DEFAULT_EPSILON,
            mode,
        }
    }

    /// Zero test for a polynomial concomitant of the given homogeneity
    /// weight, relative to the source form's sup norm.
    pub fn is_zero_poly(&self, value: &Poly, weight: u32, norm: f64) -> bool {
        match self.mode {
            Mode::Exact => value.is_zero(),
            Mode::Float => value.coeff_norm() <= self.epsilon * norm.powi(weight as i32),
        }
    }

    pub fn is_zero_scalar(&self, value: &Scalar, weight: u32, norm: f64) -> bool {
        match self.mode {
            Mode::Exact => value.is_zero(),
            Mode::Float => value.abs() <= self.epsilon * norm.powi(weight as i32),
        }
    }
}

impl Default for ZeroTestPolicy {
    fn default() -> Self {
        ZeroTestPolicy::float(Self::DEFAULT_EPSILON)
    }
}

/// Row label of the rank table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RankLabel {
    Zero,
    Cube,
    Binomial,
    SquareLine,
    Fermat,
    Cusp,
    TangentConic,
    Generic,
}

impl RankLabel {
    pub const ALL: [RankLabel; 8] = [
        RankLabel::Zero,
        RankLabel::Cube,
        RankLabel::Binomial,
        RankLabel::SquareLine,
        RankLabel::Fermat,
        RankLabel::Cusp,
        RankLabel::TangentConic,
        RankLabel::Generic,
    ];

    pub fn rank(&self) -> u8 {
        match self {
            RankLabel::Zero => 0,
            RankLabel::Cube => 1,
            RankLabel::Binomial => 2,
            RankLabel::SquareLine => 3,
            RankLabel::Fermat => 3,
            RankLabel::Cusp => 4,
            RankLabel::Generic => 4,
            RankLabel::TangentConic => 5,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RankLabel::Zero => "ZERO",
            RankLabel::Cube => "CUBE",
            RankLabel::Binomial => "BINOMIAL",
            RankLabel::SquareLine => "SQUARE_LINE",
            RankLabel::Fermat => "FERMAT",
            RankLabel::Cusp => "CUSP",
            RankLabel::TangentConic => "TANGENT_CONIC",
            RankLabel::Generic => "GENERIC",
        }
    }

    fn normal_form(&self) -> &'static str {
        match self {
            RankLabel::Zero => "0",
            RankLabel::Cube => "a^3",
            RankLabel::Binomial => "a^3 + b^3",
            RankLabel::SquareLine => "a^2 b",
            RankLabel::Fermat => "a^3 + b^3 + c^3",
            RankLabel::Cusp => "a^2 c + b^3",
            RankLabel::TangentConic => "a(ac + b^2)",
            RankLabel::Generic => "a^3 + b^3 + c^3 + d^3",
        }
    }
}

/// Result of the cubic rank decision.
#[derive(Clone, Debug)]
pub struct RankClassification {
    pub rank: u8,
    pub label: RankLabel,
    /// Normalized magnitude of every concomitant that was tested before the
    /// decision fired.
    pub margins: BTreeMap<&'static str, f64>,
    pub normal_form_note: &'static str,
}

impl RankClassification {
    fn decided(label: RankLabel, margins: BTreeMap<&'static str, f64>) -> Self {
        RankClassification {
            rank: label.rank(),
            label,
            margins,
            normal_form_note: label.normal_form(),
        }
    }
}

/// Rank of a quadratic form: 0, 1, 2, or 3.
pub fn quadratic_rank(q: &QuadraticForm, policy: &ZeroTestPolicy) -> u8 {
    let norm = q.coeff_norm().max(f64::MIN_POSITIVE);
    let q = match q.mode() {
        Mode::Float => q.scale(&Scalar::from_f64(1.0 / norm)),
        Mode::Exact => q.clone(),
    };
    let norm = match q.mode() {
        Mode::Float => 1.0,
        Mode::Exact => norm,
    };
    if policy.is_zero_poly(&q.to_poly(), 1, norm) {
        return 0;
    }
    let qc = quad_concomitants(&q, None).expect("no linear slot requested");
    if policy.is_zero_poly(&qc.j2_qq_u2, 2, norm) {
        return 1;
    }
    if policy.is_zero_scalar(&qc.j2_qqq, 3, norm) {
        return 2;
    }
    3
}

/// Walks the decision table. Concomitants are computed lazily in row order:
/// f = 0, θ = 0, F_6u = 0, Δ = 0, T_uuu = 0, S = T = 0, S = 0, else generic.
/// T_uuu = 0 stands in for θ(Δ) = 0 and S = T = 0 for F_6u(Δ) = 0; both
/// substitutions are degree-lowering equivalences validated by the identity
/// suite.
pub fn cubic_rank(f: &CubicForm, policy: &ZeroTestPolicy) -> RankClassification {
    let mut margins = BTreeMap::new();

    let raw_norm = f.coeff_norm();
    margins.insert("f", raw_norm);
    if f.is_zero() || (policy.mode == Mode::Float && raw_norm <= policy.epsilon) {
        return RankClassification::decided(RankLabel::Zero, margins);
    }

    // Normalize to sup norm 1 in float mode so one epsilon is meaningful for
    // every weight.
    let (f, norm) = match f.mode() {
        Mode::Float => (f.scale(&Scalar::from_f64(1.0 / raw_norm)), 1.0),
        Mode::Exact => (f.clone(), raw_norm),
    };

    let mode = f.mode();
    let fp = f.to_poly();
    let u1 = ux_power(1, mode);
    let u2 = ux_power(2, mode);

    let theta = transvectant(2, &fp, &fp, &u2).scale_ratio(1, 4);
    margins.insert("theta", theta.coeff_norm() / norm.powi(2));
    if policy.is_zero_poly(&theta, 2, norm) {
        return RankClassification::decided(RankLabel::Cube, margins);
    }

    let f6u = transvectant(2, &theta, &theta, &u2).scale_ratio(1, 192);
    margins.insert("f6u", f6u.coeff_norm() / norm.powi(4));
    if policy.is_zero_poly(&f6u, 4, norm) {
        return RankClassification::decided(RankLabel::SquareLine, margins);
    }

    let delta_poly = transvectant(2, &fp, &fp, &fp).scale_ratio(1, 12);
    margins.insert("delta", delta_poly.coeff_norm() / norm.powi(3));
    if policy.is_zero_poly(&delta_poly, 3, norm) {
        return RankClassification::decided(RankLabel::Binomial, margins);
    }

    let fu = &fp * &u1;
    let du = &delta_poly * &u1;
    let t_uuu = transvectant(4, &fu, &fu, &du).scale_ratio(-1, 576);
    margins.insert("t_uuu", t_uuu.coeff_norm() / norm.powi(5));
    if policy.is_zero_poly(&t_uuu, 5, norm) {
        return RankClassification::decided(RankLabel::TangentConic, margins);
    }

    let s_uuu = transvectant(4, &fu, &fu, &fu).scale_ratio(-1, 576);
    let six = Scalar::from_int(6, mode);
    let s = &crate::transvect::apolar_sub(&s_uuu, &f).expect("u-cubic") * &six;
    let t = &crate::transvect::apolar_sub(&t_uuu, &f).expect("u-cubic") * &six;
    margins.insert("s", s.abs() / norm.powi(4));
    margins.insert("t", t.abs() / norm.powi(6));
    let s_zero = policy.is_zero_scalar(&s, 4, norm);
    let t_zero = policy.is_zero_scalar(&t, 6, norm);
    if s_zero && t_zero {
        return RankClassification::decided(RankLabel::Cusp, margins);
    }
    if s_zero {
        return RankClassification::decided(RankLabel::Fermat, margins);
    }
    RankClassification::decided(RankLabel::Generic, margins)
}
