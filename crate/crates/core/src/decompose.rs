//! Waring decompositions: rank-specific constructions dispatched off the
//! classifier, plus closed-form certificates for the special families
//! (products of lines, conic-with-secant, the Hesse pencil, and the
//! Weierstrass family).
//!
//! Every construction re-expands its certificate and only returns it when
//! the relative residual clears the policy tolerance, so callers always hold
//! a verified witness. Constructions that need radicals (two-cube splits,
//! complete factorizations, the generic four-cube method) run in float mode;
//! exact inputs on radical-free routes (cube, square-line, cusp, tangent)
//! keep exact scalars and certify with residual exactly zero.

use crate::classify::{cubic_rank, RankClassification, RankLabel, ZeroTestPolicy};
use crate::error::{Result, WaringError};
use crate::factor::{
    divide_linear_exact, extract_cube, factor_completely_reducible, factor_rank2_quadratic,
    factor_square_line, lstsq, tangent_split, GenericChooser,
};
use crate::poly::{CubicForm, LinearForm, Mode, Poly, QuadraticForm, Scalar};
use crate::transvect::{apolar_sub, bracket, transvectant, ux_power};

/// Record of the random choices a construction made.
#[derive(Clone, Debug, Default)]
pub struct SeedTrace {
    pub seed: u64,
    pub attempts: u32,
    pub chosen_u: Option<[i64; 3]>,
    pub u0: Option<Scalar>,
    pub rejected_u: Vec<[i64; 3]>,
}

/// A verified sum-of-cubes certificate: f ≈ Σ scalarᵢ · lineᵢ³.
#[derive(Clone, Debug)]
pub struct WaringDecomposition {
    pub terms: Vec<(Scalar, LinearForm)>,
    pub claimed_rank: u8,
    pub class_label: RankLabel,
    /// ‖f − Σ sᵢℓᵢ³‖ / ‖f‖ in coefficient sup norms.
    pub residual: f64,
    pub seed_trace: SeedTrace,
}

impl WaringDecomposition {
    pub fn mode(&self) -> Mode {
        self.terms
            .first()
            .map(|(s, _)| s.mode())
            .unwrap_or(Mode::Exact)
    }

    /// Σ sᵢ·ℓᵢ³ re-expanded.
    pub fn expand(&self, mode: Mode) -> CubicForm {
        CubicForm::sum_of_scaled_cubes(&self.terms, mode)
    }

    /// Opt-in normalizer: absorbs each scalar into its line by a principal
    /// cube root. Always produces a float certificate.
    pub fn absorb_scalars(&self) -> WaringDecomposition {
        let terms = self
            .terms
            .iter()
            .map(|(s, l)| {
                let root = s.cbrt_float();
                (Scalar::from_f64(1.0), l.to_float().scale(&root))
            })
            .collect();
        WaringDecomposition {
            terms,
            ..self.clone()
        }
    }
}

/// Report from re-verifying a certificate against a form.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub residual: f64,
    pub pass: bool,
    pub terms_count: usize,
    pub classified_rank: u8,
    pub rank_matches: bool,
}

fn relative_residual(f: &CubicForm, expansion: &CubicForm, epsilon: f64) -> f64 {
    let diff = f.sub(expansion).coeff_norm();
    let norm = f.coeff_norm();
    if norm > epsilon {
        diff / norm
    } else {
        diff
    }
}

/// Expands a candidate term list and certifies it against f, or reports the
/// residual as an error. Float certificates whose first-shot residual misses
/// the tolerance get a short Gauss–Newton polish before the final gate:
/// upstream factoring (gradient directions, near-rank-one extractions) can
/// lose a few digits, and the certificate itself is a perfectly good set of
/// coordinates to finish the job in.
fn certify(
    op: &'static str,
    f: &CubicForm,
    mut terms: Vec<(Scalar, LinearForm)>,
    label: RankLabel,
    trace: SeedTrace,
    policy: &ZeroTestPolicy,
) -> Result<WaringDecomposition> {
    let mode = terms.first().map(|(s, _)| s.mode()).unwrap_or(f.mode());
    let f_cmp = if mode == f.mode() { f.clone() } else { f.to_float() };
    let expansion = CubicForm::sum_of_scaled_cubes(&terms, mode);
    let mut residual = relative_residual(&f_cmp, &expansion, policy.epsilon);
    let tolerance = match mode {
        Mode::Exact => 0.0,
        Mode::Float => policy.epsilon,
    };
    if mode == Mode::Float && residual > tolerance * 1e-3 && !terms.is_empty() {
        polish_certificate(&f_cmp, &mut terms);
        let expansion = CubicForm::sum_of_scaled_cubes(&terms, mode);
        residual = relative_residual(&f_cmp, &expansion, policy.epsilon);
    }
    if residual > tolerance {
        return Err(WaringError::ResidualTooLarge {
            op,
            residual,
            tolerance,
        });
    }
    Ok(WaringDecomposition {
        claimed_rank: terms.len() as u8,
        terms,
        class_label: label,
        residual,
        seed_trace: trace,
    })
}

/// Two Gauss–Newton sweeps over a float certificate: refit the scalars
/// jointly, then correct each line by the 10×3 linearization
/// f − Σ sᵢℓᵢ³ ≈ 3sᵢℓᵢ²·δ.
fn polish_certificate(f: &CubicForm, terms: &mut [(Scalar, LinearForm)]) {
    let mode = Mode::Float;
    for _ in 0..2 {
        // joint scalar refit
        let cubes: Vec<CubicForm> = terms.iter().map(|(_, l)| CubicForm::cube_of(l)).collect();
        let rows: Vec<Vec<Scalar>> = (0..10)
            .map(|i| cubes.iter().map(|c| c.coeffs[i].clone()).collect())
            .collect();
        if let Ok((x, _)) = lstsq("polish_scalars", &rows, &f.coeffs.to_vec()) {
            for (t, s) in terms.iter_mut().zip(x) {
                t.0 = s;
            }
        }
        // per-line correction
        for i in 0..terms.len() {
            let expansion = CubicForm::sum_of_scaled_cubes(terms, mode);
            let r = f.sub(&expansion);
            if r.coeff_norm() <= 1e-14 * f.coeff_norm().max(1.0) {
                return;
            }
            let (s, l) = &terms[i];
            if s.is_zero() {
                continue;
            }
            let l2 = QuadraticForm::from_square(l);
            let three_s = &Scalar::from_int(3, mode) * s;
            let cols: Vec<CubicForm> = (0..3)
                .map(|j| {
                    let ej = LinearForm::var(j, mode);
                    CubicForm::from_poly(&(&l2.to_poly() * &ej.to_poly()))
                        .expect("cubic")
                        .scale(&three_s)
                })
                .collect();
            let rows: Vec<Vec<Scalar>> = (0..10)
                .map(|k| cols.iter().map(|c| c.coeffs[k].clone()).collect())
                .collect();
            if let Ok((delta, _)) = lstsq("polish_line", &rows, &r.coeffs.to_vec()) {
                let dl = LinearForm::new([delta[0].clone(), delta[1].clone(), delta[2].clone()]);
                terms[i].1 = &terms[i].1 + &dl;
            }
        }
    }
}

/// Decomposes f as a sum of rank-many cubes, dispatching on the rank table.
/// The seed drives every generic choice; identical (f, policy, seed) gives
/// identical certificates.
pub fn decompose(f: &CubicForm, policy: &ZeroTestPolicy, seed: u64) -> Result<WaringDecomposition> {
    let input_policy = ZeroTestPolicy {
        epsilon: policy.epsilon,
        mode: f.mode(),
    };
    let classification = cubic_rank(f, &input_policy);
    decompose_classified(f, &classification, policy, seed)
}

/// Decomposition with an already-computed classification.
pub fn decompose_classified(
    f: &CubicForm,
    classification: &RankClassification,
    policy: &ZeroTestPolicy,
    seed: u64,
) -> Result<WaringDecomposition> {
    const OUTER_ATTEMPTS: u32 = 8;

    // Radical-needing classes always run in float; the rest keep the input
    // mode and fall back to float only if an exact radical fails.
    let needs_float = matches!(
        classification.label,
        RankLabel::Binomial | RankLabel::Fermat | RankLabel::Generic
    );
    let (work, work_policy) = if needs_float && f.mode() == Mode::Exact {
        (f.to_float(), ZeroTestPolicy::float(policy.epsilon))
    } else {
        (
            f.clone(),
            ZeroTestPolicy {
                epsilon: policy.epsilon,
                mode: f.mode(),
            },
        )
    };

    // Float inputs are normalized to sup norm 1; the certificate scalars are
    // scaled back at the end. Forms at or below the zero threshold are left
    // alone — they take the empty-certificate row.
    let (work, back_scale) = match work.mode() {
        Mode::Float if work.coeff_norm() > work_policy.epsilon => {
            let nu = work.coeff_norm();
            (work.scale(&Scalar::from_f64(1.0 / nu)), Some(nu))
        }
        _ => (work, None),
    };

    let mut last_err = None;
    for attempt in 0..OUTER_ATTEMPTS {
        let mut chooser = GenericChooser::new(seed.wrapping_add(attempt as u64 * 0x9e3779b9));
        let mut trace = SeedTrace {
            seed,
            attempts: attempt + 1,
            ..Default::default()
        };
        let result = dispatch(
            &work,
            classification.label,
            &work_policy,
            &mut chooser,
            &mut trace,
        );
        match result {
            Ok(mut d) => {
                if let Some(nu) = back_scale {
                    let nu = Scalar::from_f64(nu);
                    for (s, _) in d.terms.iter_mut() {
                        *s = &*s * &nu;
                    }
                }
                return Ok(d);
            }
            Err(WaringError::RadicalRequired { .. }) if work.mode() == Mode::Exact => {
                // restart the whole construction in float mode
                let fl = work.to_float();
                let fl_policy = ZeroTestPolicy::float(policy.epsilon);
                return decompose_classified(&fl, classification, &fl_policy, seed);
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or(WaringError::RetriesExhausted {
        op: "decompose",
        attempts: OUTER_ATTEMPTS,
        best_residual: f64::INFINITY,
    }))
}

fn dispatch(
    f: &CubicForm,
    label: RankLabel,
    policy: &ZeroTestPolicy,
    chooser: &mut GenericChooser,
    trace: &mut SeedTrace,
) -> Result<WaringDecomposition> {
    match label {
        RankLabel::Zero => certify(
            "decompose_rank0",
            f,
            Vec::new(),
            RankLabel::Zero,
            std::mem::take(trace),
            policy,
        ),
        RankLabel::Cube => decompose_rank1(f, policy, chooser, trace),
        RankLabel::Binomial => decompose_rank2(f, policy, chooser, trace),
        RankLabel::SquareLine => decompose_rank3_square_line(f, policy, chooser, trace),
        RankLabel::Fermat => decompose_rank3_fermat(f, policy, chooser, trace),
        RankLabel::Cusp => decompose_rank4_cusp(f, policy, chooser, trace),
        RankLabel::Generic => decompose_rank4_generic(f, policy, chooser, trace),
        RankLabel::TangentConic => decompose_rank5_tangent(f, policy, chooser, trace),
    }
}

/// Rank 1: f = λ·a³ via cube extraction.
pub fn decompose_rank1(
    f: &CubicForm,
    policy: &ZeroTestPolicy,
    chooser: &mut GenericChooser,
    trace: &mut SeedTrace,
) -> Result<WaringDecomposition> {
    let (lambda, a) = extract_cube(f, policy, chooser)?;
    certify(
        "decompose_rank1",
        f,
        vec![(lambda, a)],
        RankLabel::Cube,
        std::mem::take(trace),
        policy,
    )
}

/// Candidate u-points: a fixed preference list, then seeded small integers.
fn u_candidates(chooser: &mut GenericChooser, count: usize) -> Vec<[i64; 3]> {
    let mut out = vec![
        [1, 0, 0],
        [0, 1, 0],
        [0, 0, 1],
        [1, 1, 0],
        [1, 0, 1],
        [0, 1, 1],
        [1, 1, 1],
        [1, -1, 1],
    ];
    while out.len() < count {
        let c = chooser.int_triple();
        if c != [0, 0, 0] {
            out.push(c);
        }
    }
    out
}

/// Rank 2: fix u with θ(·, u) nonzero, split it into two lines, and match
/// coefficients on the 10×2 system.
pub fn decompose_rank2(
    f: &CubicForm,
    policy: &ZeroTestPolicy,
    chooser: &mut GenericChooser,
    trace: &mut SeedTrace,
) -> Result<WaringDecomposition> {
    let mode = f.mode();
    let fp = f.to_poly();
    let u2 = ux_power(2, mode);
    let theta = transvectant(2, &fp, &fp, &u2).scale_ratio(1, 4);
    let tnorm = theta.coeff_norm();
    if tnorm == 0.0 {
        return Err(WaringError::Precondition {
            op: "decompose_rank2",
            detail: "theta vanishes".into(),
        });
    }
    let mut best: Option<WaringError> = None;
    for upt in u_candidates(chooser, 40) {
        let upoint: [Scalar; 3] = std::array::from_fn(|i| Scalar::from_int(upt[i], mode));
        let theta_u = theta.restrict_u(&upoint);
        let unorm = upt
            .iter()
            .map(|v| (*v as f64).abs())
            .fold(0.0f64, f64::max);
        if theta_u.coeff_norm() <= 1e-3 * tnorm * unorm.powi(2) {
            trace.rejected_u.push(upt);
            continue;
        }
        let theta_q = QuadraticForm::from_poly(&theta_u).expect("theta is an x-quadratic");
        let (l1, l2) = match factor_rank2_quadratic(&theta_q, &stage(policy)) {
            Ok(v) => v,
            Err(e @ WaringError::RadicalRequired { .. }) => return Err(e),
            Err(_) => {
                trace.rejected_u.push(upt);
                continue;
            }
        };
        // unit-scale lines keep the cube-matching system well conditioned
        let (l1, l2) = (l1.normalize(), l2.normalize());
        let c1 = CubicForm::cube_of(&l1);
        let c2 = CubicForm::cube_of(&l2);
        let rows: Vec<Vec<Scalar>> = (0..10)
            .map(|i| vec![c1.coeffs[i].clone(), c2.coeffs[i].clone()])
            .collect();
        let (x, _) = match lstsq("decompose_rank2", &rows, &f.coeffs.to_vec()) {
            Ok(v) => v,
            Err(_) => {
                trace.rejected_u.push(upt);
                continue;
            }
        };
        let terms = vec![(x[0].clone(), l1), (x[1].clone(), l2)];
        let mut candidate_trace = trace.clone();
        candidate_trace.chosen_u = Some(upt);
        match certify(
            "decompose_rank2",
            f,
            terms,
            RankLabel::Binomial,
            candidate_trace,
            policy,
        ) {
            Ok(d) => return Ok(d),
            Err(e) => {
                best = Some(e);
                trace.rejected_u.push(upt);
            }
        }
    }
    Err(best.unwrap_or(WaringError::RetriesExhausted {
        op: "decompose_rank2",
        attempts: 40,
        best_residual: f64::INFINITY,
    }))
}

/// 6·a²b = (a+b)³ − (a−b)³ − 2b³, applied after splitting f = a²b.
pub fn decompose_rank3_square_line(
    f: &CubicForm,
    policy: &ZeroTestPolicy,
    chooser: &mut GenericChooser,
    trace: &mut SeedTrace,
) -> Result<WaringDecomposition> {
    let (a, b) = factor_square_line(f, &stage(policy), chooser)?;
    let mode = f.mode();
    let terms = square_line_cubes(&a, &b, &Scalar::one(mode));
    certify(
        "decompose_rank3_square_line",
        f,
        terms,
        RankLabel::SquareLine,
        std::mem::take(trace),
        policy,
    )
}

/// The three cubes of λ·a²b from the two-cube difference identity.
fn square_line_cubes(a: &LinearForm, b: &LinearForm, lambda: &Scalar) -> Vec<(Scalar, LinearForm)> {
    let mode = lambda.mode();
    let sixth = &Scalar::from_ratio(1, 6, mode) * lambda;
    let third = &Scalar::from_ratio(1, 3, mode) * lambda;
    vec![
        (sixth.clone(), a + b),
        (-&sixth, a - b),
        (-&third, b.clone()),
    ]
}

/// The alternative square-line certificate parameterized by (a0, b0): peel
/// off c³ with c = a0·a + b0·b, then split the rank-2 remainder in closed
/// form. Requires b0·(4 − 27·a0²·b0) ≠ 0.
pub fn decompose_rank3_square_line_with(
    f: &CubicForm,
    a0: &Scalar,
    b0: &Scalar,
    policy: &ZeroTestPolicy,
    chooser: &mut GenericChooser,
) -> Result<WaringDecomposition> {
    let mode = f.mode();
    let (a, b) = factor_square_line(f, &stage(policy), chooser)?;
    let four = Scalar::from_int(4, mode);
    let twenty7 = Scalar::from_int(27, mode);
    let three = Scalar::from_int(3, mode);
    let gate = b0 * &(&four - &(&(&twenty7 * &a0.pow(2)) * b0));
    if gate.is_zero() {
        return Err(WaringError::Precondition {
            op: "decompose_rank3_square_line_with",
            detail: "b0(4 - 27 a0^2 b0) must be nonzero".into(),
        });
    }
    // 3γ² = −b0(4 − 27 a0² b0)
    let gamma = (&(-&gate) / &three).sqrt()?;
    let c = &a.scale(a0) + &b.scale(b0);
    let sixteen = Scalar::from_int(16, mode);
    let denom = &(&sixteen * &b0.pow(3)) * &gamma;
    let s1 = &(&(&(&three * a0) * b0) + &gamma) / &denom;
    let s2 = -&(&(&(&(&three * a0) * b0) - &gamma) / &denom);
    let two_b02 = &Scalar::from_int(2, mode) * &b0.pow(2);
    let l1 = &a.scale(&(&(a0 * b0) - &gamma)) - &b.scale(&two_b02);
    let l2 = &a.scale(&(&(a0 * b0) + &gamma)) - &b.scale(&two_b02);
    let terms = vec![(s1, l1), (s2, l2), (Scalar::one(mode), c)];
    certify(
        "decompose_rank3_square_line_with",
        f,
        terms,
        RankLabel::SquareLine,
        SeedTrace::default(),
        policy,
    )
}

/// Rank 3: factor the Hessian into three independent lines and match
/// coefficients on the 10×3 system.
pub fn decompose_rank3_fermat(
    f: &CubicForm,
    policy: &ZeroTestPolicy,
    chooser: &mut GenericChooser,
    trace: &mut SeedTrace,
) -> Result<WaringDecomposition> {
    let fp = f.to_poly();
    let delta_poly = transvectant(2, &fp, &fp, &fp).scale_ratio(1, 12);
    let delta = CubicForm::from_poly(&delta_poly).expect("cubic");
    let lines = factor_completely_reducible(&delta, &stage(policy), chooser)?;
    let f_float = f.to_float();
    let lines: Vec<_> = lines.lines.iter().map(|l| l.normalize()).collect();
    let cubes: Vec<CubicForm> = lines.iter().map(CubicForm::cube_of).collect();
    let rows: Vec<Vec<Scalar>> = (0..10)
        .map(|i| cubes.iter().map(|c| c.coeffs[i].clone()).collect())
        .collect();
    let (x, _) = lstsq("decompose_rank3_fermat", &rows, &f_float.coeffs.to_vec())?;
    let terms = x.into_iter().zip(lines).collect();
    certify(
        "decompose_rank3_fermat",
        &f_float,
        terms,
        RankLabel::Fermat,
        std::mem::take(trace),
        policy,
    )
}

/// Nondegeneracy gate for the four-cube method: both S_uuu and F_6u(Δ) must
/// be nonzero numbers at the candidate u.
pub fn generic_u_admissible(
    s_uuu: &Poly,
    script_f6u: &Poly,
    upt: &[i64; 3],
    mode: Mode,
    gate: f64,
) -> bool {
    let upoint: [Scalar; 3] = std::array::from_fn(|i| Scalar::from_int(upt[i], mode));
    let unorm = upt
        .iter()
        .map(|v| (*v as f64).abs())
        .fold(0.0, f64::max)
        .max(1.0);
    let s3 = s_uuu.restrict_u(&upoint).constant_value();
    let sf = script_f6u.restrict_u(&upoint).constant_value();
    let s_scale = s_uuu.coeff_norm().max(f64::MIN_POSITIVE) * unorm.powi(3);
    let f_scale = script_f6u.coeff_norm().max(f64::MIN_POSITIVE) * unorm.powi(6);
    s3.abs() > gate * s_scale && sf.abs() > gate * f_scale
}

/// Rank 4, S ≠ 0: pick u with S_uuu·F_6u(Δ) ≠ 0 at u, set u0 = S/(24·S_uuu)
/// so the shifted form g = f − u0·u_x³ has S(g) = 0 and T(g) ≠ 0, decompose
/// g as three cubes, and append u0·u_x³.
pub fn decompose_rank4_generic(
    f: &CubicForm,
    policy: &ZeroTestPolicy,
    chooser: &mut GenericChooser,
    trace: &mut SeedTrace,
) -> Result<WaringDecomposition> {
    let mode = f.mode();
    let fp = f.to_poly();
    let u1 = ux_power(1, mode);
    let u2 = ux_power(2, mode);
    let delta_poly = transvectant(2, &fp, &fp, &fp).scale_ratio(1, 12);
    let delta = CubicForm::from_poly(&delta_poly).expect("cubic");
    let fu = &fp * &u1;
    let s_uuu = transvectant(4, &fu, &fu, &fu).scale_ratio(-1, 576);
    let six = Scalar::from_int(6, mode);
    let s = &apolar_sub(&s_uuu, f)? * &six;

    // F_6u of the Hessian, for the admissibility gate
    let dp = delta.to_poly();
    let dtheta = transvectant(2, &dp, &dp, &u2).scale_ratio(1, 4);
    let script_f6u = transvectant(2, &dtheta, &dtheta, &u2).scale_ratio(1, 192);

    let gate = 1e-4;
    for upt in u_candidates(chooser, 48) {
        if !generic_u_admissible(&s_uuu, &script_f6u, &upt, mode, gate) {
            trace.rejected_u.push(upt);
            continue;
        }
        let upoint: [Scalar; 3] = std::array::from_fn(|i| Scalar::from_int(upt[i], mode));
        let s3 = s_uuu.restrict_u(&upoint).constant_value();
        let u0 = &s / &(&Scalar::from_int(24, mode) * &s3);
        let uline = LinearForm::new(upoint);
        let g = f.sub(&CubicForm::cube_of(&uline).scale(&u0));

        // internal contract: S(g) ≈ 0 and T(g) away from zero
        let gp = g.to_poly();
        let gu = &gp * &u1;
        let gdelta = transvectant(2, &gp, &gp, &gp).scale_ratio(1, 12);
        let gdu = &gdelta * &u1;
        let gs_uuu = transvectant(4, &gu, &gu, &gu).scale_ratio(-1, 576);
        let gt_uuu = transvectant(4, &gu, &gu, &gdu).scale_ratio(-1, 576);
        let gs = &apolar_sub(&gs_uuu, &g)? * &six;
        let gt = &apolar_sub(&gt_uuu, &g)? * &six;
        let gnorm = g.coeff_norm().max(1.0);
        let s_ok = match mode {
            Mode::Exact => gs.is_zero(),
            Mode::Float => gs.abs() <= policy.epsilon * gnorm.powi(4) * 1e3,
        };
        let t_ok = match mode {
            Mode::Exact => !gt.is_zero(),
            Mode::Float => gt.abs() > policy.epsilon * gnorm.powi(6),
        };
        if !s_ok || !t_ok {
            trace.rejected_u.push(upt);
            continue;
        }

        let mut inner = chooser.fork(upt[0] as u64 ^ ((upt[1] as u64) << 8) ^ ((upt[2] as u64) << 16));
        let mut inner_trace = SeedTrace::default();
        let fermat = match decompose_rank3_fermat(&g, policy, &mut inner, &mut inner_trace) {
            Ok(d) => d,
            Err(_) => {
                trace.rejected_u.push(upt);
                continue;
            }
        };
        trace.chosen_u = Some(upt);
        trace.u0 = Some(u0.clone());
        let mut terms = fermat.terms;
        terms.push((u0.to_float(), uline.to_float()));
        return certify(
            "decompose_rank4_generic",
            &f.to_float(),
            terms,
            RankLabel::Generic,
            std::mem::take(trace),
            policy,
        );
    }
    Err(WaringError::RetriesExhausted {
        op: "decompose_rank4_generic",
        attempts: 48,
        best_residual: f64::INFINITY,
    })
}

/// Rank 4, S = T = 0 with θ(Δ) ≠ 0: the Hessian is a square times a line,
/// which hands over the a and b directions; c and β come from the 10×4
/// least-squares solve of f = a²c + β·b³.
pub fn decompose_rank4_cusp(
    f: &CubicForm,
    policy: &ZeroTestPolicy,
    chooser: &mut GenericChooser,
    trace: &mut SeedTrace,
) -> Result<WaringDecomposition> {
    let mode = f.mode();
    let fp = f.to_poly();
    let delta_poly = transvectant(2, &fp, &fp, &fp).scale_ratio(1, 12);
    let delta = CubicForm::from_poly(&delta_poly).expect("cubic");
    if delta.is_zero() {
        return Err(WaringError::Precondition {
            op: "decompose_rank4_cusp",
            detail: "Hessian vanishes; not a cusp form".into(),
        });
    }
    let (a, b) = factor_square_line(&delta, &stage(policy), chooser)?;
    let b = b.normalize();

    // f = a²·(c1x1 + c2x2 + c3x3) + β·b³
    let b3 = CubicForm::cube_of(&b);
    let a2 = QuadraticForm::from_square(&a);
    let cols: Vec<CubicForm> = (0..3)
        .map(|j| {
            let lj = LinearForm::var(j, mode);
            CubicForm::from_poly(&(&a2.to_poly() * &lj.to_poly())).expect("cubic")
        })
        .collect();
    let rows: Vec<Vec<Scalar>> = (0..10)
        .map(|i| {
            let mut row: Vec<Scalar> = cols.iter().map(|c| c.coeffs[i].clone()).collect();
            row.push(b3.coeffs[i].clone());
            row
        })
        .collect();
    let (x, solve_residual) = lstsq("decompose_rank4_cusp", &rows, &f.coeffs.to_vec())?;
    let tol = match mode {
        Mode::Exact => 0.0,
        Mode::Float => stage(policy).epsilon * f.coeff_norm().max(1.0),
    };
    if solve_residual > tol {
        return Err(WaringError::ResidualTooLarge {
            op: "decompose_rank4_cusp",
            residual: solve_residual,
            tolerance: tol,
        });
    }
    let c = LinearForm::new([x[0].clone(), x[1].clone(), x[2].clone()]);
    let beta = x[3].clone();
    let mut terms = square_line_cubes(&a, &c, &Scalar::one(mode));
    terms.push((beta, b));
    certify(
        "decompose_rank4_cusp",
        f,
        terms,
        RankLabel::Cusp,
        std::mem::take(trace),
        policy,
    )
}

/// Rank 5: a = cube root of the Hessian, g = f/a = a·c + b², and then
/// 3f = (a−b)³ + b³ − a²·(a − 3b − 3c) with the last term expanded by the
/// square-line identity.
pub fn decompose_rank5_tangent(
    f: &CubicForm,
    policy: &ZeroTestPolicy,
    chooser: &mut GenericChooser,
    trace: &mut SeedTrace,
) -> Result<WaringDecomposition> {
    let mode = f.mode();
    let fp = f.to_poly();
    let delta_poly = transvectant(2, &fp, &fp, &fp).scale_ratio(1, 12);
    let delta = CubicForm::from_poly(&delta_poly).expect("cubic");
    if delta.is_zero() {
        return Err(WaringError::Precondition {
            op: "decompose_rank5_tangent",
            detail: "Hessian vanishes; not a tangent-conic form".into(),
        });
    }
    let loose = stage(policy);
    let (_, a) = extract_cube(&delta, &loose, chooser)?;
    let g = divide_linear_exact(f, &a, &loose)?;
    // In exact mode the split of g itself may need a radical even though f
    // has a rational representation; rescaling g squares the obstruction
    // away, and the line gauge a ↦ a/α absorbs the scale again.
    let (a, b, c) = match tangent_split(&g, &a, &loose, chooser) {
        Ok((b, c)) => (a, b, c),
        Err(WaringError::RadicalRequired { .. }) if mode == Mode::Exact => {
            let alpha = crate::factor::tangent_restriction_scale(&g, &a)?;
            let g2 = g.scale(&alpha);
            let (b2, c2) = tangent_split(&g2, &a, &loose, chooser)?;
            (a.scale(&alpha.inv()?), b2, c2.scale(&alpha))
        }
        Err(e) => return Err(e),
    };

    // 3f = (a−b)³ + b³ − a²w with w = a − 3b − 3c
    let three = Scalar::from_int(3, mode);
    let w = &(&a - &b.scale(&three)) - &c.scale(&three);
    let third = Scalar::from_ratio(1, 3, mode);
    let mut terms = vec![((&third).clone(), &a - &b), (third.clone(), b.clone())];
    // −(1/3)·a²w expanded: −(1/18)(a+w)³ + (1/18)(a−w)³ + (1/9)w³
    let s18 = Scalar::from_ratio(1, 18, mode);
    let s9 = Scalar::from_ratio(1, 9, mode);
    terms.push((-&s18, &a + &w));
    terms.push((s18.clone(), &a - &w));
    terms.push((s9, w));
    certify(
        "decompose_rank5_tangent",
        f,
        terms,
        RankLabel::TangentConic,
        std::mem::take(trace),
        policy,
    )
}

/// The four-cube certificate 24·a0b0c0·abc = Σ ±(±a0a ± b0b ± c0c)³ for a
/// product of independent lines with nonzero weights.
pub fn family_product(
    a: &LinearForm,
    b: &LinearForm,
    c: &LinearForm,
    weights: (&Scalar, &Scalar, &Scalar),
    policy: &ZeroTestPolicy,
) -> Result<WaringDecomposition> {
    let (a0, b0, c0) = weights;
    if bracket(a, b, c).is_zero() {
        return Err(WaringError::Precondition {
            op: "family_product",
            detail: "lines are dependent ([abc] = 0)".into(),
        });
    }
    let prod = &(a0 * b0) * c0;
    if prod.is_zero() {
        return Err(WaringError::Precondition {
            op: "family_product",
            detail: "weights must be nonzero".into(),
        });
    }
    let mode = a.mode();
    let f = CubicForm::from_line_product(a, b, c);
    let denom = &Scalar::from_int(24, mode) * &prod;
    let s = (&Scalar::one(mode) / &denom).clone();
    let (aa, bb, cc) = (a.scale(a0), b.scale(b0), c.scale(c0));
    let terms = vec![
        (s.clone(), &(&aa + &bb) + &cc),
        (-&s, &(&aa + &bb) - &cc),
        (-&s, &(&bb + &cc) - &aa),
        (-&s, &(&cc + &aa) - &bb),
    ];
    certify(
        "family_product",
        &f,
        terms,
        RankLabel::Generic,
        SeedTrace::default(),
        policy,
    )
}

/// Two-cube certificate for a product of pairwise-independent but dependent
/// lines, via the cube-root-of-unity identity. Always float (ω is not a
/// Gaussian rational).
pub fn family_dependent_product(
    a: &LinearForm,
    b: &LinearForm,
    c: &LinearForm,
    policy: &ZeroTestPolicy,
) -> Result<WaringDecomposition> {
    use crate::battery::pairwise_independent;
    if !bracket(a, b, c).is_zero() {
        return Err(WaringError::Precondition {
            op: "family_dependent_product",
            detail: "lines must be dependent ([abc] = 0)".into(),
        });
    }
    if !(pairwise_independent(a, b) && pairwise_independent(b, c) && pairwise_independent(a, c)) {
        return Err(WaringError::Precondition {
            op: "family_dependent_product",
            detail: "lines must be pairwise independent".into(),
        });
    }
    let (a, b, c) = (a.to_float(), b.to_float(), c.to_float());
    let f = CubicForm::from_line_product(&a, &b, &c);

    // a0·a + b0·b + c0·c = 0 with all three nonzero
    let rows: Vec<Vec<Scalar>> = (0..3)
        .map(|i| vec![a.coeffs[i].clone(), b.coeffs[i].clone()])
        .collect();
    let rhs: Vec<Scalar> = (0..3).map(|i| -&c.coeffs[i]).collect();
    let (x, _) = lstsq("family_dependent_product", &rows, &rhs)?;
    let (a0, b0, c0) = (x[0].clone(), x[1].clone(), Scalar::from_f64(1.0));

    let omega = Scalar::Float(num::complex::Complex64::from_polar(
        1.0,
        2.0 * std::f64::consts::PI / 3.0,
    ));
    let one_plus_2w = &Scalar::from_f64(1.0) + &(&Scalar::from_f64(2.0) * &omega);
    let denom = &(&(&Scalar::from_f64(9.0) * &a0) * &b0) * &c0;
    let s = &one_plus_2w / &denom;
    let aa = a.scale(&a0);
    let bb = b.scale(&b0);
    let l1 = &aa - &bb.scale(&(&omega * &omega));
    let l2 = &aa - &bb.scale(&omega);
    let terms = vec![(s.clone(), l1), (-&s, l2)];
    certify(
        "family_dependent_product",
        &f,
        terms,
        RankLabel::Binomial,
        SeedTrace::default(),
        policy,
    )
}

/// Four-cube certificate for f = a(a² + bc), the conic-with-secant family,
/// with weights (a0, b0, c0) and σ² = a0² − 12·b0c0. The default weights
/// (4, 1, 1) give σ = 2 and a radical-free certificate.
pub fn family_conic_secant_weighted(
    a: &LinearForm,
    b: &LinearForm,
    c: &LinearForm,
    a0: &Scalar,
    b0: &Scalar,
    c0: &Scalar,
    policy: &ZeroTestPolicy,
) -> Result<WaringDecomposition> {
    if bracket(a, b, c).is_zero() {
        return Err(WaringError::Precondition {
            op: "family_conic_secant",
            detail: "lines are dependent ([abc] = 0)".into(),
        });
    }
    let mode = a.mode();
    let prod = &(a0 * b0) * c0;
    if prod.is_zero() {
        return Err(WaringError::Precondition {
            op: "family_conic_secant",
            detail: "weights must be nonzero".into(),
        });
    }
    let twelve = Scalar::from_int(12, mode);
    let sigma2 = &a0.pow(2) - &(&twelve * &(b0 * c0));
    if sigma2.is_zero() {
        return Err(WaringError::Precondition {
            op: "family_conic_secant",
            detail: "sigma^2 = a0^2 - 12 b0 c0 must be nonzero".into(),
        });
    }
    let sigma = sigma2.sqrt()?;

    let ap = a.to_poly();
    let conic = &(&ap * &ap) + &(&b.to_poly() * &c.to_poly());
    let f = CubicForm::from_poly(&(&ap * &conic)).expect("cubic");

    let denom = &(&Scalar::from_int(24, mode) * &prod) * &sigma;
    let (aa, bb, cc) = (a.scale(a0), b.scale(b0), c.scale(c0));
    let sa = a.scale(&sigma);
    let bmc = &bb - &cc;
    let s_sigma = &sigma / &denom;
    let s_a0 = &(-a0) / &denom;
    let terms = vec![
        (s_sigma.clone(), &(&aa + &bb) + &cc),
        (s_sigma, &(&aa - &bb) - &cc),
        (s_a0.clone(), &sa - &bmc),
        (s_a0, &sa + &bmc),
    ];
    certify(
        "family_conic_secant",
        &f,
        terms,
        RankLabel::Generic,
        SeedTrace::default(),
        policy,
    )
}

/// The radical-free default: weights (4, 1, 1), σ = 2.
pub fn family_conic_secant(
    a: &LinearForm,
    b: &LinearForm,
    c: &LinearForm,
    policy: &ZeroTestPolicy,
) -> Result<WaringDecomposition> {
    let mode = a.mode();
    family_conic_secant_weighted(
        a,
        b,
        c,
        &Scalar::from_int(4, mode),
        &Scalar::one(mode),
        &Scalar::one(mode),
        policy,
    )
}

/// Rank-correct certificate for the Hesse pencil f = s(a³+b³+c³) + t·abc.
///
/// Branches: the closed four-cube identity when 3s + t ≠ 0 (the fourth term
/// drops out exactly when S = 0); the ω-product route when 3s + t = 0; and
/// the three-cube ω certificate when 6s − t = 0.
pub fn family_hesse(
    s: &Scalar,
    t: &Scalar,
    a: &LinearForm,
    b: &LinearForm,
    c: &LinearForm,
    policy: &ZeroTestPolicy,
) -> Result<WaringDecomposition> {
    let mode = a.mode();
    if s.is_zero() && t.is_zero() {
        return Err(WaringError::Precondition {
            op: "family_hesse",
            detail: "(s, t) = (0, 0)".into(),
        });
    }
    if bracket(a, b, c).is_zero() {
        return Err(WaringError::Precondition {
            op: "family_hesse",
            detail: "lines are dependent ([abc] = 0)".into(),
        });
    }
    let f = hesse_form(s, t, a, b, c);

    let three = Scalar::from_int(3, mode);
    let six = Scalar::from_int(6, mode);
    let three_s_plus_t = &(&three * s) + t;
    let six_s_minus_t = &(&six * s) - t;

    if three_s_plus_t.is_zero() {
        // completely reducible: f = s·L1·L2·L3 over the ω-lines
        let omega = omega_scalar();
        let (af, bf, cf, sf) = (a.to_float(), b.to_float(), c.to_float(), s.to_float());
        let l1 = &(&af + &bf) + &cf;
        let l2 = &(&af + &bf.scale(&omega)) + &cf.scale(&omega.pow(2));
        let l3 = &(&af + &bf.scale(&omega.pow(2))) + &cf.scale(&omega);
        let one = Scalar::from_f64(1.0);
        let base = family_product(&l1, &l2, &l3, (&one, &one, &one), &float_policy(policy))?;
        let terms = base
            .terms
            .into_iter()
            .map(|(w, l)| (&w * &sf, l))
            .collect();
        return certify(
            "family_hesse",
            &f.to_float(),
            terms,
            RankLabel::Generic,
            SeedTrace::default(),
            &float_policy(policy),
        );
    }

    if six_s_minus_t.is_zero() {
        // 3f = s((a+b+c)³ + (a+ωb+ω²c)³ + (a+ω²b+ωc)³)
        let omega = omega_scalar();
        let (af, bf, cf, sf) = (a.to_float(), b.to_float(), c.to_float(), s.to_float());
        let w = &sf / &Scalar::from_f64(3.0);
        let terms = vec![
            (w.clone(), &(&af + &bf) + &cf),
            (w.clone(), &(&af + &bf.scale(&omega)) + &cf.scale(&omega.pow(2))),
            (w, &(&af + &bf.scale(&omega.pow(2))) + &cf.scale(&omega)),
        ];
        return certify(
            "family_hesse",
            &f.to_float(),
            terms,
            RankLabel::Fermat,
            SeedTrace::default(),
            &float_policy(policy),
        );
    }

    // 24(3s+t)²·f = A³ + B³ + C³ + t(36s² + 6st + t²)(a+b+c)³
    let twenty4 = Scalar::from_int(24, mode);
    let denom = &twenty4 * &three_s_plus_t.pow(2);
    let six_s_plus_t = &(&six * s) + t;
    let mk = |x: &LinearForm, y: &LinearForm, z: &LinearForm| -> LinearForm {
        &x.scale(&six_s_plus_t) - &(&(y + z)).scale(t)
    };
    let big_a = mk(a, b, c);
    let big_b = mk(b, c, a);
    let big_c = mk(c, a, b);
    let u = &(a + b) + c;
    let thirty6 = Scalar::from_int(36, mode);
    let u_coeff = t * &(&(&(&thirty6 * &s.pow(2)) + &(&(&six * s) * t)) + &t.pow(2));
    let inv = Scalar::one(mode) / denom;
    let mut terms = vec![
        (inv.clone(), big_a),
        (inv.clone(), big_b),
        (inv.clone(), big_c),
    ];
    let u_scalar = &u_coeff * &inv;
    let mut label = RankLabel::Fermat;
    if !u_scalar.is_zero() {
        terms.push((u_scalar, u));
        label = RankLabel::Generic;
    }
    certify("family_hesse", &f, terms, label, SeedTrace::default(), policy)
}

fn hesse_form(
    s: &Scalar,
    t: &Scalar,
    a: &LinearForm,
    b: &LinearForm,
    c: &LinearForm,
) -> CubicForm {
    CubicForm::cube_of(a)
        .add(&CubicForm::cube_of(b))
        .add(&CubicForm::cube_of(c))
        .scale(s)
        .add(&CubicForm::from_line_product(a, b, c).scale(t))
}

fn omega_scalar() -> Scalar {
    Scalar::Float(num::complex::Complex64::from_polar(
        1.0,
        2.0 * std::f64::consts::PI / 3.0,
    ))
}

fn float_policy(policy: &ZeroTestPolicy) -> ZeroTestPolicy {
    ZeroTestPolicy::float(policy.epsilon)
}

/// Loosened tolerance for intermediate factoring stages. Structure errors
/// (a misrouted class) miss this by orders of magnitude; precision-tail
/// cases pass through and the final certificate gate, with its polish step,
/// decides at the real epsilon.
fn stage(policy: &ZeroTestPolicy) -> ZeroTestPolicy {
    match policy.mode {
        Mode::Exact => *policy,
        Mode::Float => ZeroTestPolicy::float(policy.epsilon.sqrt().max(policy.epsilon)),
    }
}

/// Branch-correct certificate for the Weierstrass family
/// f = x2²x3 − x1³ − p·x1x3² − q·x3³.
pub fn family_weierstrass(
    p: &Scalar,
    q: &Scalar,
    policy: &ZeroTestPolicy,
    seed: u64,
) -> Result<WaringDecomposition> {
    let mode = p.mode();
    let f = weierstrass_form(p, q);

    if p.is_zero() && q.is_zero() {
        // x2²x3 − x1³ is a cusp form; route to the cusp decomposer
        let mut chooser = GenericChooser::new(seed);
        let mut trace = SeedTrace {
            seed,
            ..Default::default()
        };
        return decompose_rank4_cusp(&f, policy, &mut chooser, &mut trace);
    }

    let x1 = LinearForm::var(0, mode);
    let x2 = LinearForm::var(1, mode);
    let x3 = LinearForm::var(2, mode);
    let m3 = Scalar::from_int(-3, mode);

    if p.is_zero() {
        // three cubes: −x1³ + (1/6τ)(x2+τx3)³ − (1/6τ)(x2−τx3)³, τ² = −3q
        let tau = (&m3 * q).sqrt_lossy();
        let (tau, f, x1, x2, x3, policy) = float_ctx(tau, &f, &x1, &x2, &x3, policy);
        let six_tau = &Scalar::from_f64(6.0) * &tau;
        let s = Scalar::from_f64(1.0) / six_tau;
        let terms = vec![
            (Scalar::from_f64(-1.0), x1),
            (s.clone(), &x2 + &x3.scale(&tau)),
            (-&s, &x2 - &x3.scale(&tau)),
        ];
        return certify(
            "family_weierstrass",
            &f,
            terms,
            RankLabel::Fermat,
            SeedTrace::default(),
            &policy,
        );
    }

    if q.is_zero() {
        // p ≠ 0, q = 0: split f = (x3x2² + a·x3³) − (x1³ + p·x1x3² + a·x3³)
        // with a chosen so both halves have rank two.
        let mut a_val = Scalar::one(mode);
        let twenty7 = Scalar::from_int(27, mode);
        let four = Scalar::from_int(4, mode);
        let gate = |aa: &Scalar| -> Scalar {
            &(&twenty7 * &aa.pow(2)) + &(&four * &p.pow(3))
        };
        if gate(&a_val).is_zero() {
            a_val = Scalar::from_int(2, mode);
        }
        let nu2 = &Scalar::from_int(3, mode) * &gate(&a_val);
        let mu2 = &Scalar::from_int(3, mode) * &a_val;
        let mu = mu2.sqrt_lossy();
        let nu = nu2.sqrt_lossy();
        // work uniformly in float: μ and ν are irrational for the defaults
        let (mu, f, x1, x2, x3, policy) = float_ctx(mu, &f, &x1, &x2, &x3, policy);
        let nu = nu.to_float();
        let a_val = a_val.to_float();
        let p = p.to_float();

        let six_mu = &Scalar::from_f64(6.0) * &mu;
        let s_g = Scalar::from_f64(1.0) / six_mu;
        let nine_a = &Scalar::from_f64(9.0) * &a_val;
        let denom = &(&Scalar::from_f64(432.0) * &p.pow(3)) * &nu;
        let s_h1 = &(&nu + &nine_a) / &denom;
        let s_h2 = &(&nu - &nine_a) / &denom;
        let six_p = &Scalar::from_f64(6.0) * &p;
        let l3 = &x1.scale(&six_p) + &x3.scale(&(&nine_a - &nu));
        let l4 = &x1.scale(&six_p) + &x3.scale(&(&nine_a + &nu));
        let terms = vec![
            (s_g.clone(), &x2 + &x3.scale(&mu)),
            (-&s_g, &x2 - &x3.scale(&mu)),
            (-&s_h1, l3),
            (-&s_h2, l4),
        ];
        return certify(
            "family_weierstrass",
            &f,
            terms,
            RankLabel::Generic,
            SeedTrace::default(),
            &policy,
        );
    }

    // p, q ≠ 0: 54τ·f = 9(x2+τx3)³ − 9(x2−τx3)³ − τ(3x1+σx3)³ − τ(3x1−σx3)³
    // with τ² = −3q and σ² = 3p (the sign that makes the pair identity
    // 54·x1(x1² + px3²) = (3x1+σx3)³ + (3x1−σx3)³ hold).
    let tau = (&m3 * q).sqrt_lossy();
    let sigma = (&Scalar::from_int(3, mode) * p).sqrt_lossy();
    let (tau, f, x1, x2, x3, policy) = float_ctx(tau, &f, &x1, &x2, &x3, policy);
    let sigma = sigma.to_float();
    let denom = &Scalar::from_f64(54.0) * &tau;
    let nine = Scalar::from_f64(9.0);
    let s12 = &nine / &denom;
    let s34 = &(-&tau) / &denom;
    let three_x1 = x1.scale(&Scalar::from_f64(3.0));
    let terms = vec![
        (s12.clone(), &x2 + &x3.scale(&tau)),
        (-&s12, &x2 - &x3.scale(&tau)),
        (s34.clone(), &three_x1 + &x3.scale(&sigma)),
        (s34, &three_x1 - &x3.scale(&sigma)),
    ];
    certify(
        "family_weierstrass",
        &f,
        terms,
        RankLabel::Generic,
        SeedTrace::default(),
        &policy,
    )
}

/// x2²x3 − x1³ − p·x1x3² − q·x3³.
pub fn weierstrass_form(p: &Scalar, q: &Scalar) -> CubicForm {
    let mode = p.mode();
    let mut w = CubicForm::zero(mode);
    w.coeffs[7] = Scalar::one(mode); // x2²x3
    w.coeffs[0] = Scalar::from_int(-1, mode); // x1³
    w.coeffs[5] = -p; // x1x3²
    w.coeffs[9] = -q; // x3³
    w
}

type FloatCtx = (
    Scalar,
    CubicForm,
    LinearForm,
    LinearForm,
    LinearForm,
    ZeroTestPolicy,
);

/// Converts the working set to float when the lead radical is float;
/// otherwise keeps exact scalars.
fn float_ctx(
    radical: Scalar,
    f: &CubicForm,
    x1: &LinearForm,
    x2: &LinearForm,
    x3: &LinearForm,
    policy: &ZeroTestPolicy,
) -> FloatCtx {
    (
        radical.to_float(),
        f.to_float(),
        x1.to_float(),
        x2.to_float(),
        x3.to_float(),
        ZeroTestPolicy::float(policy.epsilon),
    )
}

/// Re-expands a certificate against f: relative residual, pass/fail, and
/// whether the term count matches the classified rank.
pub fn verify(f: &CubicForm, d: &WaringDecomposition, policy: &ZeroTestPolicy) -> VerifyReport {
    let mode = d.mode();
    let f_cmp = if mode == f.mode() { f.clone() } else { f.to_float() };
    let expansion = d.expand(mode);
    let residual = relative_residual(&f_cmp, &expansion, policy.epsilon);
    let tolerance = match mode {
        Mode::Exact => 0.0,
        Mode::Float => policy.epsilon,
    };
    let classification = cubic_rank(
        f,
        &ZeroTestPolicy {
            epsilon: policy.epsilon,
            mode: f.mode(),
        },
    );
    VerifyReport {
        residual,
        pass: residual <= tolerance,
        terms_count: d.terms.len(),
        classified_rank: classification.rank,
        rank_matches: d.terms.len() == classification.rank as usize,
    }
}
