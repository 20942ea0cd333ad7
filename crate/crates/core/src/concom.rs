//! The named concomitants of quadratic and cubic forms, and the identity web
//! that cross-checks their normalization.
//!
//! For a cubic f the bundle carries θ (a (2,2)-form), the Hessian Δ, the
//! contravariants S_uuu, T_uuu and F_6u, the Aronhold invariants S and T, and
//! the "script" concomitants — the same quantities recomputed on Δ.
//!
//! Normalization is anchored as follows, with every constant pinned by
//! machine-checked closed-form values (see the tests and the identity suite):
//!
//! - θ      = (1/4)·J²\[f, f, u_x²]
//! - Δ      = (1/12)·J²\[f, f, f]
//! - S_uuu  = −(1/576)·J⁴\[f·u_x, f·u_x, f·u_x]
//! - T_uuu  = −(1/576)·J⁴\[f·u_x, f·u_x, Δ·u_x]
//! - F_6u   = (1/192)·J²\[θ, θ, u_x²]  (equivalently 1/3072 with J²\[f,f,u²]
//!   fed in unnormalized)
//! - S      = 6·apolar_sub(S_uuu, f), and likewise T from T_uuu. The factor 6
//!   makes the pairing Σ pₘ fₘ Π(mᵢ!), the weighting under which S = \[abc]⁴
//!   and T = \[abc]⁶ on triple products.
//!
//! Under these anchors the completely-reducible closed forms, the Weierstrass
//! values S = −48p, T = 864q, and the whole identity web hold exactly. Three
//! closed-form constants were re-derived during calibration because the
//! quoted versions are inconsistent with the rest of the web:
//!
//! - on a³ + b³ + c³, S_uuu = −54·\[abc]\[abu]\[bcu]\[cau] (pinned by the scripted
//!   closed form 𝒮_uuu = 4T·S_uuu − 3S·T_uuu plus weight covariance);
//! - on a(ac + b²), S_uuu = −2·\[abc]\[abu]³ (gauge invariance under
//!   b ↦ b + λa forces the \[abu] bracket);
//! - the contraction identity for θ(Δ) reads θ(Δ) = 8·C\[T_uuu·f] − 2T·u_x²
//!   − S·θ with no factor 9 on the left.
//!
//! The Hesse-family T invariant, computed exactly here and pinned in the
//! tests, is T = (t⁶ + 540·s³t³ − 5832·s⁶)\[abc]⁶.

use crate::error::Result;
use crate::poly::{CubicForm, LinearForm, Mode, Poly, QuadraticForm, Scalar};
use crate::transvect::{
    apolar_sub, contraction, contraction_power, transvectant, ux_power,
};

/// All concomitants of one cubic form.
#[derive(Clone, Debug)]
pub struct ConcomitantBundle {
    /// θ, bidegree (2,2).
    pub theta: Poly,
    /// The Hessian Δ.
    pub delta: CubicForm,
    /// S_uuu, bidegree (0,3).
    pub s_uuu: Poly,
    /// T_uuu, bidegree (0,3).
    pub t_uuu: Poly,
    /// Aronhold S.
    pub s: Scalar,
    /// Aronhold T.
    pub t: Scalar,
    /// F_6u, bidegree (0,6).
    pub f6u: Poly,
    /// θ of Δ.
    pub script_theta: Poly,
    /// Δ of Δ.
    pub script_delta: CubicForm,
    /// F_6u of Δ.
    pub script_f6u: Poly,
    /// S of Δ.
    pub script_s: Scalar,
    /// T of Δ.
    pub script_t: Scalar,
}

/// Homogeneity degree of each bundle field in the coefficients of f.
pub const WEIGHTS: [(&str, u32); 12] = [
    ("theta", 2),
    ("delta", 3),
    ("s_uuu", 3),
    ("f6u", 4),
    ("s", 4),
    ("t_uuu", 5),
    ("t", 6),
    ("script_theta", 6),
    ("script_delta", 9),
    ("script_f6u", 12),
    ("script_s", 12),
    ("script_t", 18),
];

struct BaseConcomitants {
    theta: Poly,
    delta: CubicForm,
    s_uuu: Poly,
    t_uuu: Poly,
    s: Scalar,
    t: Scalar,
    f6u: Poly,
}

fn base_concomitants(f: &CubicForm) -> BaseConcomitants {
    let mode = f.mode();
    let fp = f.to_poly();
    let u1 = ux_power(1, mode);
    let u2 = ux_power(2, mode);
    let theta = transvectant(2, &fp, &fp, &u2).scale_ratio(1, 4);
    let delta_poly = transvectant(2, &fp, &fp, &fp).scale_ratio(1, 12);
    let delta = CubicForm::from_poly(&delta_poly).expect("Hessian is a cubic in x");
    let fu = &fp * &u1;
    let du = &delta_poly * &u1;
    let s_uuu = transvectant(4, &fu, &fu, &fu).scale_ratio(-1, 576);
    let t_uuu = transvectant(4, &fu, &fu, &du).scale_ratio(-1, 576);
    let s = pair_u3(&s_uuu, f);
    let t = pair_u3(&t_uuu, f);
    let f6u = transvectant(2, &theta, &theta, &u2).scale_ratio(1, 192);
    BaseConcomitants {
        theta,
        delta,
        s_uuu,
        t_uuu,
        s,
        t,
        f6u,
    }
}

/// Σ pₘ fₘ Π(mᵢ!): the pairing of a u-cubic against a cubic form under which
/// the Aronhold invariants take their classical values.
fn pair_u3(p: &Poly, f: &CubicForm) -> Scalar {
    let six = Scalar::from_int(6, f.mode());
    match apolar_sub(p, f) {
        Ok(v) => &v * &six,
        Err(_) => Scalar::zero(f.mode()),
    }
}

/// Computes the full bundle. Script fields are genuine re-executions on Δ;
/// the closed forms of [`script_st_closed`] are cross-checks, not the
/// computation.
pub fn concomitants(f: &CubicForm) -> ConcomitantBundle {
    let base = base_concomitants(f);
    let script = base_concomitants(&base.delta);
    ConcomitantBundle {
        theta: base.theta,
        delta: base.delta,
        s_uuu: base.s_uuu,
        t_uuu: base.t_uuu,
        s: base.s,
        t: base.t,
        f6u: base.f6u,
        script_theta: script.theta,
        script_delta: script.delta,
        script_f6u: script.f6u,
        script_s: script.s,
        script_t: script.t,
    }
}

/// Closed forms for the Aronhold invariants of the Hessian:
/// 𝒮 = 4T² − 3S³ and 𝒯 = T(9S³ − 8T²).
pub fn script_st_closed(s: &Scalar, t: &Scalar) -> (Scalar, Scalar) {
    let mode = s.mode();
    let four = Scalar::from_int(4, mode);
    let three = Scalar::from_int(3, mode);
    let eight = Scalar::from_int(8, mode);
    let nine = Scalar::from_int(9, mode);
    let s3 = s.pow(3);
    let t2 = t.pow(2);
    let script_s = &(&four * &t2) - &(&three * &s3);
    let script_t = t * &(&(&nine * &s3) - &(&eight * &t2));
    (script_s, script_t)
}

/// Re-evaluates a named concomitant on another form; the substitution
/// ‖·‖_{f↦g} realized as plain function application.
pub enum ConcomitantKind {
    Theta,
    Delta,
    Suuu,
    Tuuu,
    S,
    T,
    F6u,
}

/// Value of one concomitant of g.
pub fn substitute_concomitant(kind: ConcomitantKind, g: &CubicForm) -> ConcomitantValue {
    let b = base_concomitants(g);
    match kind {
        ConcomitantKind::Theta => ConcomitantValue::Form(b.theta),
        ConcomitantKind::Delta => ConcomitantValue::Cubic(b.delta),
        ConcomitantKind::Suuu => ConcomitantValue::Form(b.s_uuu),
        ConcomitantKind::Tuuu => ConcomitantValue::Form(b.t_uuu),
        ConcomitantKind::S => ConcomitantValue::Number(b.s),
        ConcomitantKind::T => ConcomitantValue::Number(b.t),
        ConcomitantKind::F6u => ConcomitantValue::Form(b.f6u),
    }
}

pub enum ConcomitantValue {
    Number(Scalar),
    Cubic(CubicForm),
    Form(Poly),
}

/// One checked identity: residual in coefficient sup norm, relative to the
/// larger of the two sides (falling back to ‖f‖^weight when both vanish).
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: f64,
    pub relative_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    pub max_relative_residual: f64,
    pub all_pass: bool,
}

impl IdentityReport {
    fn push(
        &mut self,
        name: &'static str,
        lhs: &Poly,
        rhs: &Poly,
        f_norm: f64,
        weight: u32,
        exact: bool,
        epsilon: f64,
    ) {
        let diff = lhs - rhs;
        let residual = diff.coeff_norm();
        let scale = lhs
            .coeff_norm()
            .max(rhs.coeff_norm())
            .max(f_norm.powi(weight as i32))
            .max(f64::MIN_POSITIVE);
        let relative = residual / scale;
        let pass = if exact { diff.is_zero() } else { relative <= epsilon };
        self.checks.push(IdentityCheck {
            name,
            residual,
            relative_residual: relative,
            pass,
        });
        if relative > self.max_relative_residual {
            self.max_relative_residual = relative;
        }
        self.all_pass &= pass;
    }
}

/// Evaluates both sides of every identity relating the concomitants of f to
/// those of its Hessian. Exact mode demands exact equality; float mode
/// compares scale-aware relative residuals against `epsilon`. Failures are
/// data — they signal a normalization bug, not an error condition.
pub fn identity_suite(f: &CubicForm, epsilon: f64) -> IdentityReport {
    let mode = f.mode();
    let exact = mode == Mode::Exact;
    let fp = f.to_poly();
    let f_norm = f.coeff_norm().max(1.0);
    let base = base_concomitants(f);
    let script_base = base_concomitants(&base.delta);
    let b = ConcomitantBundle {
        theta: base.theta,
        delta: base.delta,
        s_uuu: base.s_uuu,
        t_uuu: base.t_uuu,
        s: base.s,
        t: base.t,
        f6u: base.f6u,
        script_theta: script_base.theta.clone(),
        script_delta: script_base.delta.clone(),
        script_f6u: script_base.f6u.clone(),
        script_s: script_base.s.clone(),
        script_t: script_base.t.clone(),
    };
    let u2 = ux_power(2, mode);
    let u3 = ux_power(3, mode);
    let delta_poly = b.delta.to_poly();

    let mut report = IdentityReport {
        checks: Vec::new(),
        max_relative_residual: 0.0,
        all_pass: true,
    };

    let cnum = |n: i64| Scalar::from_int(n, mode);
    let as_poly = |s: &Scalar| Poly::constant(s.clone());

    // θ(Δ) = 8·C[T_uuu·f] − 2T·u_x² − S·θ
    // (printed with an extra factor 9 on the left; the web-consistent factor
    // under the normalization above is 1, verified by exact linear solve)
    let lhs = b.script_theta.clone();
    let rhs = &(&contraction(&(&b.t_uuu * &fp)).scale_int(8)
        - &u2.scale(&(&cnum(2) * &b.t)))
        - &b.theta.scale(&b.s);
    report.push("script_theta_contraction", &lhs, &rhs, f_norm, 6, exact, epsilon);

    // Δ(Δ) = 3S²·f − 2T·Δ
    let lhs = b.script_delta.to_poly();
    let rhs = &fp.scale(&(&cnum(3) * &b.s.pow(2))) - &delta_poly.scale(&(&cnum(2) * &b.t));
    report.push("script_delta_closed", &lhs, &rhs, f_norm, 9, exact, epsilon);

    // F_6u(Δ) = 12S·T_uuu·S_uuu − 3S²·F_6u − 8T·S_uuu²
    let lhs = b.script_f6u.clone();
    let rhs = &(&(&b.t_uuu * &b.s_uuu).scale(&(&cnum(12) * &b.s))
        - &b.f6u.scale(&(&cnum(3) * &b.s.pow(2))))
        - &(&b.s_uuu * &b.s_uuu).scale(&(&cnum(8) * &b.t));
    report.push("script_f6u_closed", &lhs, &rhs, f_norm, 12, exact, epsilon);

    // S(Δ) = 4T² − 3S³ and T(Δ) = T(9S³ − 8T²)
    let (cs, ct) = script_st_closed(&b.s, &b.t);
    report.push("script_s_closed", &as_poly(&b.script_s), &as_poly(&cs), f_norm, 12, exact, epsilon);
    report.push("script_t_closed", &as_poly(&b.script_t), &as_poly(&ct), f_norm, 18, exact, epsilon);

    // S_uuu(Δ) = 4T·S_uuu − 3S·T_uuu and T_uuu(Δ) = 6ST·T_uuu − (8T² − 3S³)·S_uuu
    let rhs = &b.s_uuu.scale(&(&cnum(4) * &b.t)) - &b.t_uuu.scale(&(&cnum(3) * &b.s));
    report.push("script_s_uuu_closed", &script_base.s_uuu, &rhs, f_norm, 9, exact, epsilon);
    let coeff = &(&cnum(8) * &b.t.pow(2)) - &(&cnum(3) * &b.s.pow(3));
    let rhs = &b.t_uuu.scale(&(&(&cnum(6) * &b.s) * &b.t)) - &b.s_uuu.scale(&coeff);
    report.push("script_t_uuu_closed", &script_base.t_uuu, &rhs, f_norm, 15, exact, epsilon);

    // 6T = C³[T_uuu·f]
    let lhs = as_poly(&(&cnum(6) * &b.t));
    let rhs = contraction_power(3, &(&b.t_uuu * &fp));
    report.push("t_contraction", &lhs, &rhs, f_norm, 6, exact, epsilon);

    // 6S² = C³[T_uuu·Δ]
    let lhs = as_poly(&(&cnum(6) * &b.s.pow(2)));
    let rhs = contraction_power(3, &(&b.t_uuu * &delta_poly));
    report.push("s_squared_contraction", &lhs, &rhs, f_norm, 8, exact, epsilon);

    // 12·T_uuu = C²[S_uuu·θ]
    let lhs = b.t_uuu.scale_int(12);
    let rhs = contraction_power(2, &(&b.s_uuu * &b.theta));
    report.push("t_uuu_contraction", &lhs, &rhs, f_norm, 5, exact, epsilon);

    // J²[θ, C[f·T_uuu], u²] = 48·S_uuu·T_uuu
    let lhs = transvectant(2, &b.theta, &contraction(&(&fp * &b.t_uuu)), &u2);
    let rhs = (&b.s_uuu * &b.t_uuu).scale_int(48);
    report.push("mixed_transvectant", &lhs, &rhs, f_norm, 8, exact, epsilon);

    // J³[f, Δ, u³] = 0
    let lhs = transvectant(3, &fp, &delta_poly, &u3);
    let rhs = Poly::zero(mode);
    report.push("hessian_apolarity", &lhs, &rhs, f_norm, 4, exact, epsilon);

    // Shifted-form identities at fixed sample points (u, u0):
    // for g = f − u0·u_x³,
    //   S(g) = S − 24·u0·S_uuu(u)
    //   T(g) = T − 36·u0·T_uuu(u) + 216·u0²·F_6u(u)
    //   72·u0²·F_6u(Δ)(u) = (S·T + 24·u0·T·S_uuu(u) − 36·u0·S·T_uuu(u))·S(g) − S²·T(g)
    for (name_s, name_t, name_f, upt, u0) in [
        (
            "shifted_s_sample1",
            "shifted_t_sample1",
            "shifted_script_f6u_sample1",
            [1i64, 2, 3],
            Scalar::from_ratio(1, 2, mode),
        ),
        (
            "shifted_s_sample2",
            "shifted_t_sample2",
            "shifted_script_f6u_sample2",
            [2i64, -1, 1],
            Scalar::from_ratio(-2, 3, mode),
        ),
    ] {
        let uline = LinearForm::from_ints(upt, mode);
        let upoint: [Scalar; 3] = std::array::from_fn(|i| Scalar::from_int(upt[i], mode));
        let g = f.sub(&CubicForm::cube_of(&uline).scale(&u0));
        let gb = base_concomitants(&g);

        let s_at_u = b.s_uuu.restrict_u(&upoint).constant_value();
        let t_at_u = b.t_uuu.restrict_u(&upoint).constant_value();
        let f_at_u = b.f6u.restrict_u(&upoint).constant_value();
        let sf_at_u = b.script_f6u.restrict_u(&upoint).constant_value();

        let rhs_s = &b.s - &(&(&cnum(24) * &u0) * &s_at_u);
        report.push(name_s, &as_poly(&gb.s), &as_poly(&rhs_s), f_norm, 4, exact, epsilon);

        let rhs_t = &(&b.t - &(&(&cnum(36) * &u0) * &t_at_u))
            + &(&(&cnum(216) * &u0.pow(2)) * &f_at_u);
        report.push(name_t, &as_poly(&gb.t), &as_poly(&rhs_t), f_norm, 6, exact, epsilon);

        let lhs = &(&cnum(72) * &u0.pow(2)) * &sf_at_u;
        let paren = &(&(&b.s * &b.t) + &(&(&(&cnum(24) * &u0) * &b.t) * &s_at_u))
            - &(&(&(&cnum(36) * &u0) * &b.s) * &t_at_u);
        let rhs = &(&paren * &gb.s) - &(&b.s.pow(2) * &gb.t);
        report.push(name_f, &as_poly(&lhs), &as_poly(&rhs), f_norm, 12, exact, epsilon);
    }

    report
}

/// Joint concomitants of a quadratic form (and optionally a linear form).
#[derive(Clone, Debug)]
pub struct QuadConcomitants {
    /// J²\[q,q,q], a number.
    pub j2_qqq: Scalar,
    /// J²\[q,q,u²], a u-quadratic.
    pub j2_qq_u2: Poly,
    /// J\[q,a,u_x], a (1,1)-form; zero iff a² divides q.
    pub j1_qau: Option<Poly>,
    /// J²\[q,a²,u²], a u-quadratic; zero iff a divides q.
    pub j2_qa2u2: Option<Poly>,
    /// J²\[q,q,a²], a number; zero iff a is tangent to the conic q = 0.
    pub j2_qqa2: Option<Scalar>,
}

pub fn quad_concomitants(q: &QuadraticForm, a: Option<&LinearForm>) -> Result<QuadConcomitants> {
    let mode = q.mode();
    let qp = q.to_poly();
    let u2 = ux_power(2, mode);
    let u1 = ux_power(1, mode);
    let j2_qqq = transvectant(2, &qp, &qp, &qp).constant_value();
    let j2_qq_u2 = transvectant(2, &qp, &qp, &u2);
    let (mut j1_qau, mut j2_qa2u2, mut j2_qqa2) = (None, None, None);
    if let Some(a) = a {
        let ap = a.to_poly();
        let a2 = &ap * &ap;
        j1_qau = Some(transvectant(1, &qp, &ap, &u1));
        j2_qa2u2 = Some(transvectant(2, &qp, &a2, &u2));
        j2_qqa2 = Some(transvectant(2, &qp, &qp, &a2).constant_value());
    }
    Ok(QuadConcomitants {
        j2_qqq,
        j2_qq_u2,
        j1_qau,
        j2_qa2u2,
        j2_qqa2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;
    use crate::transvect::bracket;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(c: [i64; 3]) -> LinearForm {
        LinearForm::from_ints(c, Mode::Exact)
    }

    fn xyz() -> CubicForm {
        CubicForm::from_line_product(&line([1, 0, 0]), &line([0, 1, 0]), &line([0, 0, 1]))
    }

    fn weierstrass(p: i64, q: i64) -> CubicForm {
        let mode = Mode::Exact;
        let mut w = CubicForm::zero(mode);
        w.coeffs[7] = Scalar::one(mode);
        w.coeffs[0] = Scalar::from_int(-1, mode);
        w.coeffs[5] = Scalar::from_int(-p, mode);
        w.coeffs[9] = Scalar::from_int(-q, mode);
        w
    }

    fn random_cubic(rng: &mut ChaCha8Rng) -> CubicForm {
        CubicForm::from_ints(std::array::from_fn(|_| rng.gen_range(-9..=9)), Mode::Exact)
    }

    #[test]
    fn triple_product_anchors() {
        let b = concomitants(&xyz());
        assert_eq!(b.delta, xyz());
        assert!(b.s.is_one());
        assert!(b.t.is_one());
        // F_6u = u1²u2²u3²
        let expect = Poly::from_terms(
            Mode::Exact,
            [(Monomial::from_u([2, 2, 2]), Scalar::one(Mode::Exact))],
        )
        .unwrap();
        assert_eq!(b.f6u, expect);
        // S_uuu = u1u2u3
        let expect = Poly::from_terms(
            Mode::Exact,
            [(Monomial::from_u([1, 1, 1]), Scalar::one(Mode::Exact))],
        )
        .unwrap();
        assert_eq!(b.s_uuu, expect);
    }

    #[test]
    fn two_cube_anchors() {
        let f = CubicForm::cube_of(&line([1, 0, 0])).add(&CubicForm::cube_of(&line([0, 1, 0])));
        let b = concomitants(&f);
        // θ = 36·u3²·x1x2
        let expect = Poly::from_terms(
            Mode::Exact,
            [(
                Monomial {
                    x: [1, 1, 0],
                    u: [0, 0, 2],
                },
                Scalar::from_int(36, Mode::Exact),
            )],
        )
        .unwrap();
        assert_eq!(b.theta, expect);
        assert!(b.delta.is_zero());
        assert!(b.s.is_zero());
        assert!(b.t.is_zero());
        // F_6u = −27·u3⁶
        let expect = Poly::from_terms(
            Mode::Exact,
            [(Monomial::from_u([0, 0, 6]), Scalar::from_int(-27, Mode::Exact))],
        )
        .unwrap();
        assert_eq!(b.f6u, expect);
    }

    #[test]
    fn three_cube_anchors() {
        let f = CubicForm::cube_of(&line([1, 0, 0]))
            .add(&CubicForm::cube_of(&line([0, 1, 0])))
            .add(&CubicForm::cube_of(&line([0, 0, 1])));
        let b = concomitants(&f);
        assert_eq!(b.delta, xyz().scale(&Scalar::from_int(108, Mode::Exact)));
        assert!(b.s.is_zero());
        assert_eq!(b.t, Scalar::from_int(-5832, Mode::Exact));
        // S_uuu = −54·u1u2u3 (calibrated against the scripted closed forms)
        let expect = Poly::from_terms(
            Mode::Exact,
            [(Monomial::from_u([1, 1, 1]), Scalar::from_int(-54, Mode::Exact))],
        )
        .unwrap();
        assert_eq!(b.s_uuu, expect);
    }

    #[test]
    fn weierstrass_invariants() {
        for (p, q) in [(2i64, 3i64), (1, 1), (-5, 7), (0, 4), (3, 0)] {
            let b = concomitants(&weierstrass(p, q));
            assert_eq!(b.s, Scalar::from_int(-48 * p, Mode::Exact), "S for p={p}");
            assert_eq!(b.t, Scalar::from_int(864 * q, Mode::Exact), "T for q={q}");
        }
    }

    #[test]
    fn conic_plus_line_s_value() {
        // x1(x2² + x3²) has S = 16
        let f = CubicForm::from_poly(
            &(&line([1, 0, 0]).to_poly()
                * &(&(&line([0, 1, 0]).to_poly() * &line([0, 1, 0]).to_poly())
                    + &(&line([0, 0, 1]).to_poly() * &line([0, 0, 1]).to_poly()))),
        )
        .unwrap();
        let b = concomitants(&f);
        assert_eq!(b.s, Scalar::from_int(16, Mode::Exact));
    }

    #[test]
    fn identity_suite_on_random_exact_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            let f = random_cubic(&mut rng);
            let report = identity_suite(&f, 1e-8);
            for c in &report.checks {
                assert!(c.pass, "identity {} failed: residual {}", c.name, c.residual);
            }
        }
    }

    #[test]
    fn identity_suite_on_zero_form() {
        let report = identity_suite(&CubicForm::zero(Mode::Exact), 1e-8);
        assert!(report.all_pass);
    }

    #[test]
    fn identity_suite_float_shadow() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..3 {
            let f = random_cubic(&mut rng);
            let norm = f.coeff_norm();
            let f = f.to_float().scale(&Scalar::from_f64(1.0 / norm));
            let report = identity_suite(&f, 1e-8);
            assert!(
                report.all_pass,
                "max relative residual {}",
                report.max_relative_residual
            );
        }
    }

    #[test]
    fn weight_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let f = random_cubic(&mut rng);
        let two = Scalar::from_int(2, Mode::Exact);
        let b1 = concomitants(&f);
        let b2 = concomitants(&f.scale(&two));
        let pow = |w: u32| Scalar::from_int(2, Mode::Exact).pow(w);
        assert_eq!(b2.theta, b1.theta.scale(&pow(2)));
        assert_eq!(b2.delta, b1.delta.scale(&pow(3)));
        assert_eq!(b2.s_uuu, b1.s_uuu.scale(&pow(3)));
        assert_eq!(b2.f6u, b1.f6u.scale(&pow(4)));
        assert_eq!(b2.s, &b1.s * &pow(4));
        assert_eq!(b2.t_uuu, b1.t_uuu.scale(&pow(5)));
        assert_eq!(b2.t, &b1.t * &pow(6));
        assert_eq!(b2.script_theta, b1.script_theta.scale(&pow(6)));
        assert_eq!(b2.script_delta, b1.script_delta.scale(&pow(9)));
        assert_eq!(b2.script_f6u, b1.script_f6u.scale(&pow(12)));
        assert_eq!(b2.script_s, &b1.script_s * &pow(12));
        assert_eq!(b2.script_t, &b1.script_t * &pow(18));
    }

    #[test]
    fn invariance_under_unimodular_substitution() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let f = random_cubic(&mut rng);
        // shear x1 -> x1 + 2x2, then swap-style unimodular mix
        let m = unimodular([[1, 2, 0], [0, 1, 0], [0, 0, 1]]);
        let g = CubicForm::from_poly(&f.to_poly().substitute_linear(&m).unwrap()).unwrap();
        let bf = concomitants(&f);
        let bg = concomitants(&g);
        assert_eq!(bf.s, bg.s);
        assert_eq!(bf.t, bg.t);
        // Δ(f∘L) = Δ(f)∘L
        let delta_sub =
            CubicForm::from_poly(&bf.delta.to_poly().substitute_linear(&m).unwrap()).unwrap();
        assert_eq!(bg.delta, delta_sub);
    }

    fn unimodular(rows: [[i64; 3]; 3]) -> [[Scalar; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| Scalar::from_int(rows[i][j], Mode::Exact)))
    }

    #[test]
    fn tangent_family_closed_forms() {
        // f = a(ac + b²): Δ = −4[abc]²a³, S_uuu = −2[abc][acu]³, T_uuu = S = T = θ(Δ) = 0
        let (a, b, c) = (line([1, 2, -1]), line([0, 1, 3]), line([2, -1, 1]));
        let g = &(&a.to_poly() * &c.to_poly()) + &(&b.to_poly() * &b.to_poly());
        let f = CubicForm::from_poly(&(&a.to_poly() * &g)).unwrap();
        let bn = concomitants(&f);
        let br = bracket(&a, &b, &c);
        let expect = CubicForm::cube_of(&a).scale(&(&Scalar::from_int(-4, Mode::Exact) * &br.pow(2)));
        assert_eq!(bn.delta, expect);
        assert!(bn.t_uuu.is_zero());
        assert!(bn.s.is_zero());
        assert!(bn.t.is_zero());
        assert!(bn.script_theta.is_zero());
        // S_uuu = −2[abc][abu]³ (the gauge-invariant bracket; b ↦ b + λa
        // leaves both [abc] and [abu] fixed, as it must for a concomitant)
        let abu = bracket_u(&a, &b);
        let expect = (&(&abu * &abu) * &abu)
            .scale(&(&Scalar::from_int(-2, Mode::Exact) * &br));
        assert_eq!(bn.s_uuu, expect);
    }

    #[test]
    fn cusp_family_closed_forms() {
        // f = a²c + b³: Δ = −12[abc]²a²b, S = T = 0, θ(Δ) = −576[abc]⁴[abu]²a²
        let (a, b, c) = (line([1, 0, 2]), line([0, 1, -1]), line([1, 1, 1]));
        let f = CubicForm::from_poly(
            &(&(&a.to_poly() * &a.to_poly()) * &c.to_poly()),
        )
        .unwrap()
        .add(&CubicForm::cube_of(&b));
        let bn = concomitants(&f);
        let br = bracket(&a, &b, &c);
        let a2b = &(&a.to_poly() * &a.to_poly()) * &b.to_poly();
        let expect = CubicForm::from_poly(&a2b)
            .unwrap()
            .scale(&(&Scalar::from_int(-12, Mode::Exact) * &br.pow(2)));
        assert_eq!(bn.delta, expect);
        assert!(bn.s.is_zero());
        assert!(bn.t.is_zero());
        let abu = bracket_u(&a, &b);
        let expect = (&(&abu * &abu) * &(&a.to_poly() * &a.to_poly()))
            .scale(&(&Scalar::from_int(-576, Mode::Exact) * &br.pow(4)));
        assert_eq!(bn.script_theta, expect);
    }

    /// \[abu] as a (0,1)-form in u.
    fn bracket_u(a: &LinearForm, b: &LinearForm) -> Poly {
        let mode = a.mode();
        let mut p = Poly::zero(mode);
        let det2 = |p: &Scalar, q: &Scalar, r: &Scalar, s: &Scalar| &(p * s) - &(q * r);
        let coeffs = [
            det2(&a.coeffs[1], &a.coeffs[2], &b.coeffs[1], &b.coeffs[2]),
            -&det2(&a.coeffs[0], &a.coeffs[2], &b.coeffs[0], &b.coeffs[2]),
            det2(&a.coeffs[0], &a.coeffs[1], &b.coeffs[0], &b.coeffs[1]),
        ];
        for (i, c) in coeffs.into_iter().enumerate() {
            let mut m = Monomial::ONE;
            m.u[i] = 1;
            p.add_term(m, c);
        }
        p
    }

    #[test]
    fn four_cube_s_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for _ in 0..4 {
            let mut rline = || {
                line([
                    rng.gen_range(-5..=5),
                    rng.gen_range(-5..=5),
                    rng.gen_range(-5..=5),
                ])
            };
            let (a, b, c, d) = (rline(), rline(), rline(), rline());
            let f = CubicForm::cube_of(&a)
                .add(&CubicForm::cube_of(&b))
                .add(&CubicForm::cube_of(&c))
                .add(&CubicForm::cube_of(&d));
            let bn = concomitants(&f);
            let expect = &(&(&bracket(&a, &b, &c) * &bracket(&a, &b, &d))
                * &bracket(&a, &c, &d))
                * &bracket(&b, &c, &d);
            assert_eq!(bn.s, &expect * &Scalar::from_int(1296, Mode::Exact));
        }
    }

    #[test]
    fn hesse_family_invariants() {
        // f = s(a³+b³+c³) + t·abc over the coordinate triangle:
        // S = t(t³ − 216s³), T = t⁶ + 540·s³t³ − 5832·s⁶
        for (s, t) in [(1i64, 1i64), (1, 2), (2, 1), (3, -1), (1, 0), (0, 1)] {
            let fermat = CubicForm::cube_of(&line([1, 0, 0]))
                .add(&CubicForm::cube_of(&line([0, 1, 0])))
                .add(&CubicForm::cube_of(&line([0, 0, 1])));
            let f = fermat
                .scale(&Scalar::from_int(s, Mode::Exact))
                .add(&xyz().scale(&Scalar::from_int(t, Mode::Exact)));
            let b = concomitants(&f);
            let s_expect = t * (t.pow(3) - 216 * s.pow(3));
            let t_expect = t.pow(6) + 540 * s.pow(3) * t.pow(3) - 5832 * s.pow(6);
            assert_eq!(b.s, Scalar::from_int(s_expect, Mode::Exact), "(s,t)=({s},{t})");
            assert_eq!(b.t, Scalar::from_int(t_expect, Mode::Exact), "(s,t)=({s},{t})");
        }
    }

    #[test]
    fn implication_chain_between_zero_tests() {
        // θ=0 ⇒ F=0; F=0 ⇒ (Δ=0 ⇔ S_uuu=0); Δ=0 ⇒ (θ(Δ)=0 ⇔ T_uuu=0);
        // T_uuu=0 ⇒ (F(Δ)=0 ⇔ Δ(Δ)=0 ⇔ S=T=0) — checked on every battery row
        // plus random cubics, all exact.
        use crate::battery::FormGen;
        use crate::classify::RankLabel;
        let mut gen = FormGen::new(34, Mode::Exact);
        let mut forms: Vec<CubicForm> = Vec::new();
        for label in RankLabel::ALL {
            for _ in 0..4 {
                forms.push(gen.sample(label));
            }
        }
        for _ in 0..8 {
            forms.push(gen.random_cubic());
        }
        for f in &forms {
            let b = concomitants(f);
            if b.theta.is_zero() {
                assert!(b.f6u.is_zero());
            }
            if b.f6u.is_zero() {
                assert_eq!(b.delta.is_zero(), b.s_uuu.is_zero());
            }
            if b.delta.is_zero() {
                assert_eq!(b.script_theta.is_zero(), b.t_uuu.is_zero());
            }
            // the stronger equivalences, unconditionally:
            // T_uuu = 0 ⇔ θ(Δ) = 0; F(Δ) = 0 ⇔ Δ(Δ) = 0 ⇔ (S = 0 ∧ T = 0)
            assert_eq!(b.t_uuu.is_zero(), b.script_theta.is_zero());
            let st_zero = b.s.is_zero() && b.t.is_zero();
            assert_eq!(b.script_f6u.is_zero(), st_zero);
            assert_eq!(b.script_delta.is_zero(), st_zero);
        }
    }

    #[test]
    fn weierstrass_script_invariants_match_closed_forms() {
        // recomputing S and T on the Hessian agrees with 4T² − 3S³ and
        // T(9S³ − 8T²) for rational (p, q)
        for (pn, pd, qn, qd) in [(2i64, 1i64, 3i64, 1i64), (1, 3, -5, 7), (-2, 5, 1, 4)] {
            let mode = Mode::Exact;
            let p = Scalar::from_ratio(pn, pd, mode);
            let q = Scalar::from_ratio(qn, qd, mode);
            let mut w = CubicForm::zero(mode);
            w.coeffs[7] = Scalar::one(mode);
            w.coeffs[0] = Scalar::from_int(-1, mode);
            w.coeffs[5] = -&p;
            w.coeffs[9] = -&q;
            let b = concomitants(&w);
            let (cs, ct) = script_st_closed(&b.s, &b.t);
            assert_eq!(b.script_s, cs);
            assert_eq!(b.script_t, ct);
        }
    }

    #[test]
    fn substitute_concomitant_is_reevaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let g = random_cubic(&mut rng);
        let b = concomitants(&g);
        // ‖Δ‖_{f↦f} = Δ: re-evaluation on the same form is the identity
        match substitute_concomitant(ConcomitantKind::Delta, &g) {
            ConcomitantValue::Cubic(d) => assert_eq!(d, b.delta),
            _ => panic!("Delta is a cubic"),
        }
        match substitute_concomitant(ConcomitantKind::S, &g) {
            ConcomitantValue::Number(s) => assert_eq!(s, b.s),
            _ => panic!("S is a number"),
        }
        match substitute_concomitant(ConcomitantKind::Theta, &g) {
            ConcomitantValue::Form(t) => assert_eq!(t, b.theta),
            _ => panic!("theta is a form"),
        }
    }

    #[test]
    fn quadratic_joint_concomitants() {
        let mode = Mode::Exact;
        // q = x1x2 is reducible
        let q = QuadraticForm::from_line_product(&line([1, 0, 0]), &line([0, 1, 0]));
        let qc = quad_concomitants(&q, None).unwrap();
        assert!(qc.j2_qqq.is_zero());

        // full-rank quadratic
        let q = QuadraticForm::from_ints([1, 0, 0, 1, 0, 1], mode);
        let qc = quad_concomitants(&q, None).unwrap();
        assert!(!qc.j2_qqq.is_zero());

        // q = x1x3 + x2² has the tangent line x1
        let q = QuadraticForm::from_ints([0, 0, 1, 1, 0, 0], mode);
        let qc = quad_concomitants(&q, Some(&line([1, 0, 0]))).unwrap();
        assert!(qc.j2_qqa2.unwrap().is_zero());

        // divisibility detectors
        let q = QuadraticForm::from_line_product(&line([1, 0, 0]), &line([1, 2, 3]));
        let qc = quad_concomitants(&q, Some(&line([1, 0, 0]))).unwrap();
        assert!(qc.j2_qa2u2.unwrap().is_zero());
        let qc = quad_concomitants(&q, Some(&line([0, 1, 0]))).unwrap();
        assert!(!qc.j2_qa2u2.unwrap().is_zero());
        let q = QuadraticForm::from_square(&line([1, -2, 0]));
        let qc = quad_concomitants(&q, Some(&line([1, -2, 0]))).unwrap();
        assert!(qc.j1_qau.unwrap().is_zero());
    }
}
