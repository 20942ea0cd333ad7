//! Factoring subroutines for the decomposition pipeline: perfect-power
//! extraction, low-rank quadratic splitting, complete factorization into
//! lines, divisibility tests, and exact division by a linear form.
//!
//! Every division and "matching coefficients" step is a least-squares solve
//! against the canonical monomial bases, and every factoring op re-expands
//! its output and checks the residual, so a successful return doubles as a
//! certificate. Generic choices (points, transversals, gauge rows) come from
//! a seeded PRNG drawing small integers with a bounded retry budget.
//!
//! A note on the tangent/secant splits: the splitting statements require
//! {a, b, c} linearly independent (equivalently \[abc] ≠ 0, which is what the
//! irreducibility of q comes down to). Source material sometimes words the
//! proof-side condition as "dependent"; the implementations follow the
//! independent reading and certify it through the re-expansion residual.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::{quadratic_rank, ZeroTestPolicy};
use crate::error::{Result, WaringError};
use crate::poly::{
    CubicForm, LinearForm, Mode, QuadraticForm, Scalar, CUBIC_MONOMIALS, QUADRATIC_MONOMIALS,
};
use crate::transvect::{bracket, transvectant, ux_power};

/// Retry budget for generic choices.
pub const MAX_RETRIES: u32 = 32;

/// Seeded source of generic small-integer choices.
pub struct GenericChooser {
    rng: ChaCha8Rng,
}

impl GenericChooser {
    pub fn new(seed: u64) -> Self {
        GenericChooser {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Derives an independent stream for a sub-task.
    pub fn fork(&mut self, stream: u64) -> GenericChooser {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng.gen());
        rng.set_stream(stream);
        GenericChooser { rng }
    }

    pub fn small_int(&mut self) -> i64 {
        self.rng.gen_range(-9..=9)
    }

    pub fn point(&mut self, mode: Mode) -> [Scalar; 3] {
        std::array::from_fn(|_| Scalar::from_int(self.small_int(), mode))
    }

    pub fn int_triple(&mut self) -> [i64; 3] {
        std::array::from_fn(|_| self.small_int())
    }
}

/// Lines found by a factoring op; `certified` means each one passed the
/// divisibility test against the source form.
#[derive(Clone, Debug)]
pub struct LineSet {
    pub lines: Vec<LinearForm>,
    pub certified: bool,
}

/// Least-squares solve of (rows)·x = rhs via the normal equations, with
/// partial pivoting and (in float mode) two steps of iterative refinement to
/// recover the digits the normal equations square away. In exact mode the
/// solution of a consistent full-rank system is exact.
pub fn lstsq(op: &'static str, rows: &[Vec<Scalar>], rhs: &[Scalar]) -> Result<(Vec<Scalar>, f64)> {
    let m = rows.len();
    assert!(m > 0 && m == rhs.len(), "lstsq shape");
    let n = rows[0].len();
    let mode = rhs[0].mode();

    let solve_normal = |target: &[Scalar]| -> Result<Vec<Scalar>> {
        // normal equations: (AᴴA) x = Aᴴ target
        let mut mat: Vec<Vec<Scalar>> = vec![vec![Scalar::zero(mode); n + 1]; n];
        for (i, row) in mat.iter_mut().enumerate() {
            for j in 0..n {
                let mut acc = Scalar::zero(mode);
                for r in 0..m {
                    acc = &acc + &(&rows[r][i].conj() * &rows[r][j]);
                }
                row[j] = acc;
            }
            let mut acc = Scalar::zero(mode);
            for r in 0..m {
                acc = &acc + &(&rows[r][i].conj() * &target[r]);
            }
            row[n] = acc;
        }
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&a, &b| {
                    mat[a][col]
                        .abs()
                        .partial_cmp(&mat[b][col].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if mat[pivot_row][col].is_zero() {
                return Err(WaringError::SingularSystem(op));
            }
            mat.swap(col, pivot_row);
            let pivot = mat[col][col].clone();
            for r in 0..n {
                if r == col || mat[r][col].is_zero() {
                    continue;
                }
                let factor = &mat[r][col] / &pivot;
                for c in col..=n {
                    let sub = &factor * &mat[col][c];
                    mat[r][c] = &mat[r][c] - &sub;
                }
            }
        }
        Ok((0..n).map(|i| &mat[i][n] / &mat[i][i]).collect())
    };

    let apply = |x: &[Scalar]| -> Vec<Scalar> {
        (0..m)
            .map(|r| {
                let mut acc = Scalar::zero(mode);
                for j in 0..n {
                    acc = &acc + &(&rows[r][j] * &x[j]);
                }
                acc
            })
            .collect()
    };

    let mut x = solve_normal(rhs)?;
    if mode == Mode::Float {
        for _ in 0..2 {
            let ax = apply(&x);
            let defect: Vec<Scalar> = (0..m).map(|r| &rhs[r] - &ax[r]).collect();
            if defect.iter().all(|d| d.abs() == 0.0) {
                break;
            }
            if let Ok(dx) = solve_normal(&defect) {
                for j in 0..n {
                    x[j] = &x[j] + &dx[j];
                }
            } else {
                break;
            }
        }
    }

    // residual of the original overdetermined system, sup norm
    let ax = apply(&x);
    let mut residual = 0.0f64;
    for r in 0..m {
        residual = residual.max((&ax[r] - &rhs[r]).abs());
    }
    Ok((x, residual))
}

fn residual_gate(op: &'static str, residual: f64, norm: f64, policy: &ZeroTestPolicy) -> Result<()> {
    let tolerance = match policy.mode {
        Mode::Exact => 0.0,
        Mode::Float => policy.epsilon * norm.max(1.0),
    };
    if residual > tolerance {
        return Err(WaringError::ResidualTooLarge {
            op,
            residual,
            tolerance,
        });
    }
    Ok(())
}

/// Extracts (λ, a) with c = λ·a³ from a cube of a line. The gradient of a³
/// at a generic point p is 3a(p)²·(a1, a2, a3), so the line is read off the
/// gradient direction; λ comes from one coefficient match and the result is
/// certified by re-expansion.
pub fn extract_cube(
    c: &CubicForm,
    policy: &ZeroTestPolicy,
    chooser: &mut GenericChooser,
) -> Result<(Scalar, LinearForm)> {
    if c.is_zero() {
        return Err(WaringError::ZeroInput("extract_cube"));
    }
    let mode = c.mode();
    let norm = c.coeff_norm();
    for _ in 0..MAX_RETRIES {
        let p = chooser.point(mode);
        let grad = c.gradient_at(&p);
        let g = LinearForm::new(grad);
        if g.coeff_norm() <= 1e-3 * norm {
            continue;
        }
        let a = g.normalize();
        let cube = CubicForm::cube_of(&a);
        // scale by the largest coefficient of a³
        let k = (0..10)
            .max_by(|&i, &j| {
                cube.coeffs[i]
                    .abs()
                    .partial_cmp(&cube.coeffs[j].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if cube.coeffs[k].is_zero() {
            continue;
        }
        let lambda = &c.coeffs[k] / &cube.coeffs[k];
        let diff = c.sub(&cube.scale(&lambda));
        residual_gate("extract_cube", diff.coeff_norm(), norm, policy)?;
        return Ok((lambda, a));
    }
    Err(WaringError::RetriesExhausted {
        op: "extract_cube",
        attempts: MAX_RETRIES,
        best_residual: f64::INFINITY,
    })
}

/// Extracts (λ, a) with q = λ·a² from a rank-1 quadratic, by the same
/// gradient method.
pub fn extract_square(
    q: &QuadraticForm,
    policy: &ZeroTestPolicy,
    chooser: &mut GenericChooser,
) -> Result<(Scalar, LinearForm)> {
    if q.is_zero() {
        return Err(WaringError::ZeroInput("extract_square"));
    }
    let mode = q.mode();
    let norm = q.coeff_norm();
    for _ in 0..MAX_RETRIES {
        let p = chooser.point(mode);
        let grad = q.gradient_at(&p);
        let g = LinearForm::new(grad);
        if g.coeff_norm() <= 1e-3 * norm {
            continue;
        }
        let a = g.normalize();
        let square = QuadraticForm::from_square(&a);
        let k = (0..6)
            .max_by(|&i, &j| {
                square.coeffs[i]
                    .abs()
                    .partial_cmp(&square.coeffs[j].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if square.coeffs[k].is_zero() {
            continue;
        }
        let lambda = &q.coeffs[k] / &square.coeffs[k];
        let diff = q.sub(&square.scale(&lambda));
        residual_gate("extract_square", diff.coeff_norm(), norm, policy)?;
        return Ok((lambda, a));
    }
    Err(WaringError::RetriesExhausted {
        op: "extract_square",
        attempts: MAX_RETRIES,
        best_residual: f64::INFINITY,
    })
}

/// Splits a rank-2 quadratic into a product of two independent lines: find
/// the kernel of the symmetric matrix, change coordinates so the form lives
/// in two variables, split the binary quadratic, pull back.
pub fn factor_rank2_quadratic(
    q: &QuadraticForm,
    policy: &ZeroTestPolicy,
) -> Result<(LinearForm, LinearForm)> {
    if quadratic_rank(q, policy) != 2 {
        return Err(WaringError::Precondition {
            op: "factor_rank2_quadratic",
            detail: "quadratic rank is not 2".into(),
        });
    }
    let mode = q.mode();
    let norm = q.coeff_norm();
    let kernel = symmetric_kernel_vector(&q.matrix(), norm, policy)?;

    // complete the kernel vector to a basis with two standard basis vectors
    let j0 = (0..3)
        .max_by(|&a, &b| {
            kernel[a]
                .abs()
                .partial_cmp(&kernel[b].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    let others: Vec<usize> = (0..3).filter(|&j| j != j0).collect();
    // columns of P: e_{others[0]}, e_{others[1]}, kernel
    let mut p_cols: [[Scalar; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| Scalar::zero(mode)));
    p_cols[0][others[0]] = Scalar::one(mode);
    p_cols[1][others[1]] = Scalar::one(mode);
    p_cols[2] = kernel.clone();

    // q(P z) as a binary quadratic in z1, z2: alpha z1² + beta z1 z2 + gamma z2²
    let qp = |u: &[Scalar; 3], v: &[Scalar; 3]| -> Scalar {
        // polarization q(u, v) = uᵀ M v
        let m = q.matrix();
        let mut acc = Scalar::zero(mode);
        for i in 0..3 {
            for j in 0..3 {
                acc = &acc + &(&(&u[i] * &m[i][j]) * &v[j]);
            }
        }
        acc
    };
    let alpha = qp(&p_cols[0], &p_cols[0]);
    let beta = &qp(&p_cols[0], &p_cols[1]) * &Scalar::from_int(2, mode);
    let gamma = qp(&p_cols[1], &p_cols[1]);

    // Split alpha z1² + beta z1 z2 + gamma z2² into two linear factors in
    // (z1, z2). The lead coefficient is whichever diagonal entry dominates
    // (a noise-level diagonal must not be divided by), the first root takes
    // the cancellation-free numerator, and the second comes from the product
    // of roots.
    let two = Scalar::from_int(2, mode);
    let four = Scalar::from_int(4, mode);
    let scale = alpha.abs().max(beta.abs()).max(gamma.abs());
    let significant = |x: &Scalar| -> bool {
        match policy.mode {
            Mode::Exact => !x.is_zero(),
            Mode::Float => x.abs() > 1e-10 * scale,
        }
    };
    let (l1z, l2z): ([Scalar; 2], [Scalar; 2]) = if significant(&alpha) || significant(&gamma) {
        let flip = gamma.abs() > alpha.abs();
        let (lead, trail) = if flip {
            (gamma.clone(), alpha.clone())
        } else {
            (alpha.clone(), gamma.clone())
        };
        let disc = &(&beta * &beta) - &(&four * &(&alpha * &gamma));
        let root = disc.sqrt()?;
        let t1 = &(-&beta) + &root;
        let t2 = &(-&beta) - &root;
        let t = if t1.abs() >= t2.abs() { t1 } else { t2 };
        let r1 = &t / &(&two * &lead);
        let denom = &lead * &r1;
        let r2 = if denom.is_zero() {
            Scalar::zero(mode)
        } else {
            &trail / &denom
        };
        if flip {
            // gamma (z2 - r1 z1)(z2 - r2 z1)
            ([-&(&lead * &r1), lead.clone()], [-&r2, Scalar::one(mode)])
        } else {
            // alpha (z1 - r1 z2)(z1 - r2 z2)
            ([lead.clone(), -&(&lead * &r1)], [Scalar::one(mode), -&r2])
        }
    } else {
        // pure beta z1 z2
        (
            [beta.clone(), Scalar::zero(mode)],
            [Scalar::zero(mode), Scalar::one(mode)],
        )
    };

    // pull back: z_i are the first two rows of P⁻¹ in the x basis
    let pinv = invert3(&p_cols_to_matrix(&p_cols))?;
    let z1 = LinearForm::new([pinv[0][0].clone(), pinv[0][1].clone(), pinv[0][2].clone()]);
    let z2 = LinearForm::new([pinv[1][0].clone(), pinv[1][1].clone(), pinv[1][2].clone()]);
    let b = &z1.scale(&l1z[0]) + &z2.scale(&l1z[1]);
    let c = &z1.scale(&l2z[0]) + &z2.scale(&l2z[1]);

    let diff = q.sub(&QuadraticForm::from_line_product(&b, &c));
    residual_gate("factor_rank2_quadratic", diff.coeff_norm(), norm, policy)?;
    Ok((b, c))
}

/// Columns to row-major matrix.
fn p_cols_to_matrix(cols: &[[Scalar; 3]; 3]) -> [[Scalar; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone()))
}

fn invert3(m: &[[Scalar; 3]; 3]) -> Result<[[Scalar; 3]; 3]> {
    let det2 = |a: &Scalar, b: &Scalar, c: &Scalar, d: &Scalar| &(a * d) - &(b * c);
    let cof = |r: usize, c: usize| -> Scalar {
        let rs: Vec<usize> = (0..3).filter(|&i| i != r).collect();
        let cs: Vec<usize> = (0..3).filter(|&j| j != c).collect();
        let minor = det2(&m[rs[0]][cs[0]], &m[rs[0]][cs[1]], &m[rs[1]][cs[0]], &m[rs[1]][cs[1]]);
        if (r + c) % 2 == 0 {
            minor
        } else {
            -&minor
        }
    };
    let det = &(&(&m[0][0] * &cof(0, 0)) + &(&m[0][1] * &cof(0, 1))) + &(&m[0][2] * &cof(0, 2));
    if det.is_zero() {
        return Err(WaringError::SingularSystem("invert3"));
    }
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| &cof(j, i) / &det)
    }))
}

/// One kernel vector of a symmetric 3×3 matrix of rank 2.
fn symmetric_kernel_vector(
    m: &[[Scalar; 3]; 3],
    norm: f64,
    policy: &ZeroTestPolicy,
) -> Result<[Scalar; 3]> {
    let mode = m[0][0].mode();
    let threshold = match policy.mode {
        Mode::Exact => 0.0,
        Mode::Float => policy.epsilon * norm.max(1.0),
    };
    let mut a: Vec<Vec<Scalar>> = m.iter().map(|r| r.to_vec()).collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..3 {
        let pr = (row..3)
            .max_by(|&x, &y| {
                a[x][col]
                    .abs()
                    .partial_cmp(&a[y][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if a[pr][col].abs() <= threshold {
            continue;
        }
        a.swap(row, pr);
        let piv = a[row][col].clone();
        for r in 0..3 {
            if r == row {
                continue;
            }
            let factor = &a[r][col] / &piv;
            for c in 0..3 {
                let sub = &factor * &a[row][c];
                a[r][c] = &a[r][c] - &sub;
            }
        }
        pivot_cols.push((row, col));
        row += 1;
        if row == 3 {
            break;
        }
    }
    let free: Vec<usize> = (0..3)
        .filter(|c| !pivot_cols.iter().any(|&(_, pc)| pc == *c))
        .collect();
    if free.is_empty() {
        return Err(WaringError::Precondition {
            op: "symmetric_kernel_vector",
            detail: "matrix has full rank".into(),
        });
    }
    let fc = free[0];
    let mut k: [Scalar; 3] = std::array::from_fn(|_| Scalar::zero(mode));
    k[fc] = Scalar::one(mode);
    for &(r, pc) in &pivot_cols {
        k[pc] = -&(&a[r][fc] / &a[r][pc]);
    }
    Ok(k)
}

/// Divisibility of a cubic by a line, via the vanishing of J³\[f, a³, u³].
pub fn divides_linear(f: &CubicForm, a: &LinearForm, policy: &ZeroTestPolicy) -> bool {
    if a.is_zero() {
        return false;
    }
    let mode = f.mode();
    let ap = a.to_poly();
    let a3 = &(&ap * &ap) * &ap;
    let j3 = transvectant(3, &f.to_poly(), &a3, &ux_power(3, mode));
    let scale = f.coeff_norm().max(f64::MIN_POSITIVE) * a.coeff_norm().powi(3).max(f64::MIN_POSITIVE);
    match policy.mode {
        Mode::Exact => j3.is_zero(),
        Mode::Float => j3.coeff_norm() <= policy.epsilon * scale * 100.0,
    }
}

/// The quadratic g with f = a·g, by a 10×6 least-squares solve in the
/// canonical bases.
pub fn divide_linear_exact(
    f: &CubicForm,
    a: &LinearForm,
    policy: &ZeroTestPolicy,
) -> Result<QuadraticForm> {
    let mode = f.mode();
    let ap = a.to_poly();
    let mut rows = vec![vec![Scalar::zero(mode); 6]; 10];
    for j in 0..QUADRATIC_MONOMIALS.len() {
        let mut qmono = QuadraticForm::zero(mode);
        qmono.coeffs[j] = Scalar::one(mode);
        let prod = &ap * &qmono.to_poly();
        let prod = CubicForm::from_poly(&prod).expect("degree 3");
        for i in 0..10 {
            rows[i][j] = prod.coeffs[i].clone();
        }
    }
    let rhs: Vec<Scalar> = f.coeffs.to_vec();
    let (x, residual) = lstsq("divide_linear_exact", &rows, &rhs)?;
    residual_gate("divide_linear_exact", residual, f.coeff_norm(), policy)?;
    Ok(QuadraticForm::new(std::array::from_fn(|i| x[i].clone())))
}

/// The line b with q = a·b, by a 6×3 least-squares solve.
pub fn divide_quadratic_by_linear(
    q: &QuadraticForm,
    a: &LinearForm,
    policy: &ZeroTestPolicy,
) -> Result<LinearForm> {
    let mode = q.mode();
    let ap = a.to_poly();
    let mut rows = vec![vec![Scalar::zero(mode); 3]; 6];
    for j in 0..3 {
        let bj = LinearForm::var(j, mode);
        let prod = QuadraticForm::from_poly(&(&ap * &bj.to_poly())).expect("degree 2");
        for i in 0..6 {
            rows[i][j] = prod.coeffs[i].clone();
        }
    }
    let rhs: Vec<Scalar> = q.coeffs.to_vec();
    let (x, residual) = lstsq("divide_quadratic_by_linear", &rows, &rhs)?;
    residual_gate("divide_quadratic_by_linear", residual, q.coeff_norm(), policy)?;
    Ok(LinearForm::new(std::array::from_fn(|i| x[i].clone())))
}

/// The three projective roots (s : t) of c0·s³ + c1·s²t + c2·st² + c3·t³.
/// Roots at infinity come back as (1 : 0). Always computed in float mode.
pub fn binary_cubic_roots(coeffs: &[Scalar; 4]) -> Result<Vec<(Scalar, Scalar)>> {
    if coeffs.iter().all(Scalar::is_zero) {
        return Err(WaringError::ZeroInput("binary_cubic_roots"));
    }
    let c: Vec<num::complex::Complex64> = coeffs.iter().map(Scalar::to_complex64).collect();
    let norm = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let c: Vec<_> = c.iter().map(|z| z / norm).collect();

    let mut roots: Vec<(num::complex::Complex64, num::complex::Complex64)> = Vec::new();
    let one = num::complex::Complex64::new(1.0, 0.0);

    // strip roots at infinity: leading coefficients below working precision
    let mut cs = c.clone();
    while cs.len() > 1 && cs[0].norm() <= 1e-14 {
        roots.push((one, num::complex::Complex64::new(0.0, 0.0)));
        cs.remove(0);
    }
    let finite: Vec<num::complex::Complex64> = match cs.len() {
        1 => vec![],
        2 => vec![-cs[1] / cs[0]],
        3 => {
            let (b, cc) = (cs[1] / cs[0], cs[2] / cs[0]);
            let disc = (b * b - 4.0 * cc).sqrt();
            vec![(-b + disc) / 2.0, (-b - disc) / 2.0]
        }
        4 => cubic_roots_monic(cs[1] / cs[0], cs[2] / cs[0], cs[3] / cs[0]),
        _ => unreachable!(),
    };
    for z in finite {
        // two Newton polish steps on the full homogeneous cubic at t = 1
        let mut z = z;
        for _ in 0..2 {
            let f = ((c[0] * z + c[1]) * z + c[2]) * z + c[3];
            let df = (3.0 * c[0] * z + 2.0 * c[1]) * z + c[2];
            if df.norm() > 1e-12 {
                z -= f / df;
            }
        }
        roots.push((z, one));
    }
    Ok(roots
        .into_iter()
        .map(|(s, t)| (Scalar::Float(s), Scalar::Float(t)))
        .collect())
}

/// Roots of z³ + pz² + qz + r by the closed cubic formula with principal
/// branches and the larger-magnitude cube-root branch.
fn cubic_roots_monic(
    p: num::complex::Complex64,
    q: num::complex::Complex64,
    r: num::complex::Complex64,
) -> Vec<num::complex::Complex64> {
    type C = num::complex::Complex64;
    let three = C::new(3.0, 0.0);
    // depressed: w³ + aw + b with z = w − p/3
    let shift = p / three;
    let a = q - p * p / three;
    let b = 2.0 * p * p * p / 27.0 - p * q / three + r;
    if a.norm() < 1e-14 && b.norm() < 1e-14 {
        return vec![-shift, -shift, -shift];
    }
    let disc = (b * b / 4.0 + a * a * a / 27.0).sqrt();
    let cand1 = -b / 2.0 + disc;
    let cand2 = -b / 2.0 - disc;
    let big = if cand1.norm() >= cand2.norm() { cand1 } else { cand2 };
    let c = big.powf(1.0 / 3.0);
    let omega = C::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let mut out = Vec::with_capacity(3);
    for k in 0..3 {
        let ck = c * omega.powu(k);
        let w = if ck.norm() > 1e-14 { ck - a / (3.0 * ck) } else { ck };
        out.push(w - shift);
    }
    out
}

/// Factors a product of three pairwise-independent lines. Restricts f to two
/// generic transversal lines, finds the three intersection points on each
/// via the binary cubic roots, forms the nine candidate lines through point
/// pairs, keeps the ones that divide f, and fits the overall scalar by
/// least squares. Always works in float mode.
pub fn factor_completely_reducible(
    f: &CubicForm,
    policy: &ZeroTestPolicy,
    chooser: &mut GenericChooser,
) -> Result<LineSet> {
    let f = f.to_float();
    let policy = ZeroTestPolicy::float(policy.epsilon);
    let norm = f.coeff_norm();
    if norm == 0.0 {
        return Err(WaringError::ZeroInput("factor_completely_reducible"));
    }
    let mut best_residual = f64::INFINITY;
    for _ in 0..MAX_RETRIES {
        let p = chooser.point(Mode::Float);
        let q = chooser.point(Mode::Float);
        let pencil1 = restrict_to_pencil(&f, &p, &q);
        let p2 = chooser.point(Mode::Float);
        let q2 = chooser.point(Mode::Float);
        let pencil2 = restrict_to_pencil(&f, &p2, &q2);
        let (r1, r2) = match (binary_cubic_roots(&pencil1), binary_cubic_roots(&pencil2)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        let pts1: Vec<[Scalar; 3]> = r1.iter().map(|(s, t)| combine(&p, &q, s, t)).collect();
        let pts2: Vec<[Scalar; 3]> = r2.iter().map(|(s, t)| combine(&p2, &q2, s, t)).collect();

        let mut lines: Vec<LinearForm> = Vec::new();
        for a in &pts1 {
            for b in &pts2 {
                let l = cross_line(a, b);
                if l.coeff_norm() <= 1e-9 {
                    continue;
                }
                let l = l.normalize();
                if lines.iter().any(|m| same_line(m, &l)) {
                    continue;
                }
                if divides_linear(&f, &l, &policy) {
                    lines.push(l);
                }
            }
        }
        if lines.len() != 3 {
            continue;
        }
        // fit f = κ·l1·l2·l3 and fold κ into the first line
        let prod = CubicForm::from_line_product(&lines[0], &lines[1], &lines[2]);
        let rows: Vec<Vec<Scalar>> = prod.coeffs.iter().map(|c| vec![c.clone()]).collect();
        let (kappa, residual) = lstsq("factor_completely_reducible", &rows, &f.coeffs.to_vec())?;
        if residual <= policy.epsilon * norm.max(1.0) {
            let mut out = lines;
            out[0] = out[0].scale(&kappa[0]);
            return Ok(LineSet {
                lines: out,
                certified: true,
            });
        }
        best_residual = best_residual.min(residual);
    }
    Err(WaringError::RetriesExhausted {
        op: "factor_completely_reducible",
        attempts: MAX_RETRIES,
        best_residual,
    })
}

/// Coefficients of the binary cubic f(s·p + t·q) in s³, s²t, st², t³.
fn restrict_to_pencil(f: &CubicForm, p: &[Scalar; 3], q: &[Scalar; 3]) -> [Scalar; 4] {
    let mode = f.mode();
    let mut out: [Scalar; 4] = std::array::from_fn(|_| Scalar::zero(mode));
    for (idx, exps) in CUBIC_MONOMIALS.iter().enumerate() {
        let coeff = &f.coeffs[idx];
        if coeff.is_zero() {
            continue;
        }
        // expand Π (s·p_i + t·q_i)^{e_i} into binary coefficients
        let mut binary = vec![Scalar::one(mode)];
        for i in 0..3 {
            for _ in 0..exps[i] {
                let mut next = vec![Scalar::zero(mode); binary.len() + 1];
                for (k, b) in binary.iter().enumerate() {
                    next[k] = &next[k] + &(b * &p[i]);
                    next[k + 1] = &next[k + 1] + &(b * &q[i]);
                }
                binary = next;
            }
        }
        for k in 0..4 {
            out[k] = &out[k] + &(coeff * &binary[k]);
        }
    }
    out
}

fn combine(p: &[Scalar; 3], q: &[Scalar; 3], s: &Scalar, t: &Scalar) -> [Scalar; 3] {
    std::array::from_fn(|i| &(&p[i] * s) + &(&q[i] * t))
}

/// The line through two projective points, as a coefficient vector (the
/// cross product).
fn cross_line(a: &[Scalar; 3], b: &[Scalar; 3]) -> LinearForm {
    LinearForm::new([
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ])
}

/// Proportionality test for normalized float lines.
fn same_line(a: &LinearForm, b: &LinearForm) -> bool {
    let diff = (a - b).coeff_norm();
    let sum = (a + b).coeff_norm();
    diff <= 1e-6 || sum <= 1e-6
}

/// Splits f = a²·b for a square-line form: the line a is the square factor
/// of θ at a generic u, and b falls out by dividing twice.
pub fn factor_square_line(
    f: &CubicForm,
    policy: &ZeroTestPolicy,
    chooser: &mut GenericChooser,
) -> Result<(LinearForm, LinearForm)> {
    let mode = f.mode();
    let fp = f.to_poly();
    let u2 = ux_power(2, mode);
    let theta = transvectant(2, &fp, &fp, &u2).scale_ratio(1, 4);
    if theta.is_zero() {
        return Err(WaringError::Precondition {
            op: "factor_square_line",
            detail: "theta vanishes; the form is a perfect cube or zero".into(),
        });
    }
    let tnorm = theta.coeff_norm();
    for _ in 0..MAX_RETRIES {
        let upt = chooser.point(mode);
        let theta_u = theta.restrict_u(&upt);
        if theta_u.coeff_norm() <= 1e-3 * tnorm {
            continue;
        }
        let theta_q = QuadraticForm::from_poly(&theta_u).expect("theta is an x-quadratic");
        let (_, a) = extract_square(&theta_q, policy, chooser)?;
        let g = divide_linear_exact(f, &a, policy)?;
        let b = divide_quadratic_by_linear(&g, &a, policy)?;
        let diff = f.sub(&CubicForm::from_line_product(&a, &a, &b));
        residual_gate("factor_square_line", diff.coeff_norm(), f.coeff_norm(), policy)?;
        return Ok((a, b));
    }
    Err(WaringError::RetriesExhausted {
        op: "factor_square_line",
        attempts: MAX_RETRIES,
        best_residual: f64::INFINITY,
    })
}

/// The restriction value whose square root [`tangent_split`] takes. Scaling
/// q by this value squares it, which makes the exact-mode split radical-free:
/// the caller can split α·q = a·c* + b*² and read q = a·(c*/α) + (b*/√α)²
/// back off in whatever gauge it needs.
pub fn tangent_restriction_scale(q: &QuadraticForm, a: &LinearForm) -> Result<Scalar> {
    if a.is_zero() {
        return Err(WaringError::ZeroInput("tangent_restriction_scale"));
    }
    let (w1, w2) = plane_basis(a);
    let m = q.matrix();
    let mode = q.mode();
    let pol = |u: &[Scalar; 3], v: &[Scalar; 3]| -> Scalar {
        let mut acc = Scalar::zero(mode);
        for i in 0..3 {
            for j in 0..3 {
                acc = &acc + &(&(&u[i] * &m[i][j]) * &v[j]);
            }
        }
        acc
    };
    let alpha = pol(&w1, &w1);
    let gamma = pol(&w2, &w2);
    if alpha.abs() >= gamma.abs() && !alpha.is_zero() {
        Ok(alpha)
    } else if !gamma.is_zero() {
        Ok(gamma)
    } else {
        Err(WaringError::Precondition {
            op: "tangent_restriction_scale",
            detail: "restriction to the plane vanishes on both basis vectors".into(),
        })
    }
}

/// Two independent vectors spanning the plane a·x = 0.
fn plane_basis(a: &LinearForm) -> ([Scalar; 3], [Scalar; 3]) {
    let mode = a.mode();
    let j0 = (0..3)
        .max_by(|&x, &y| {
            a.coeffs[x]
                .abs()
                .partial_cmp(&a.coeffs[y].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    let others: Vec<usize> = (0..3).filter(|&j| j != j0).collect();
    let mk = |j: usize| -> [Scalar; 3] {
        let mut v: [Scalar; 3] = std::array::from_fn(|_| Scalar::zero(mode));
        v[j] = a.coeffs[j0].clone();
        v[j0] = -&a.coeffs[j];
        v
    };
    (mk(others[0]), mk(others[1]))
}

/// For an irreducible q tangent to the line a (J²\[q,q,a²] = 0): writes
/// q = a·c + b² with {a, b, c} independent. b is recovered on the plane
/// a = 0, where q restricts to a perfect square; c by least squares.
pub fn tangent_split(
    q: &QuadraticForm,
    a: &LinearForm,
    policy: &ZeroTestPolicy,
    chooser: &mut GenericChooser,
) -> Result<(LinearForm, LinearForm)> {
    if a.is_zero() {
        return Err(WaringError::ZeroInput("tangent_split"));
    }
    if quadratic_rank(q, policy) != 3 {
        return Err(WaringError::Precondition {
            op: "tangent_split",
            detail: "quadratic is not irreducible (rank 3 required)".into(),
        });
    }
    let mode = q.mode();
    let qp = q.to_poly();
    let ap = a.to_poly();
    let a2 = &ap * &ap;
    let j2qqa2 = transvectant(2, &qp, &qp, &a2).constant_value();
    let scale = q.coeff_norm().powi(2) * a.coeff_norm().powi(2);
    let tangency_ok = match policy.mode {
        Mode::Exact => j2qqa2.is_zero(),
        Mode::Float => j2qqa2.abs() <= policy.epsilon * scale.max(1.0) * 100.0,
    };
    if !tangency_ok {
        return Err(WaringError::Precondition {
            op: "tangent_split",
            detail: "line is not tangent to the conic (J²[q,q,a²] != 0)".into(),
        });
    }

    // parameterize the plane a = 0
    let (w1, w2) = plane_basis(a);

    // q restricted to s·w1 + t·w2 is (μs + νt)²
    let m = q.matrix();
    let pol = |u: &[Scalar; 3], v: &[Scalar; 3]| -> Scalar {
        let mut acc = Scalar::zero(mode);
        for i in 0..3 {
            for j in 0..3 {
                acc = &acc + &(&(&u[i] * &m[i][j]) * &v[j]);
            }
        }
        acc
    };
    let alpha = pol(&w1, &w1);
    let beta2 = pol(&w1, &w2);
    let gamma = pol(&w2, &w2);
    let (mu, nu) = if alpha.abs() >= gamma.abs() && !alpha.is_zero() {
        let mu = alpha.sqrt()?;
        let nu = &beta2 / &mu;
        (mu, nu)
    } else if !gamma.is_zero() {
        let nu = gamma.sqrt()?;
        let mu = &beta2 / &nu;
        (mu, nu)
    } else {
        // both diagonal restrictions vanish: the restriction is 2·β·st,
        // which is a perfect square only when β = 0 (q touches the plane
        // in a double line through both basis points). Rank-3 q forbids it.
        return Err(WaringError::Precondition {
            op: "tangent_split",
            detail: "restriction to the tangent plane is not a square".into(),
        });
    };

    // b solves b(w1) = μ, b(w2) = ν plus one generic gauge row
    for _ in 0..MAX_RETRIES {
        let r = chooser.point(mode);
        let rows = vec![w1.to_vec(), w2.to_vec(), r.to_vec()];
        let rhs = vec![mu.clone(), nu.clone(), Scalar::zero(mode)];
        let solved = lstsq("tangent_split", &rows, &rhs);
        let (x, _) = match solved {
            Ok(v) => v,
            Err(_) => continue,
        };
        let b = LinearForm::new([x[0].clone(), x[1].clone(), x[2].clone()]);
        // c from q − b² = a·c
        let resid_q = q.sub(&QuadraticForm::from_square(&b));
        let c = match divide_quadratic_by_linear(&resid_q, a, policy) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if bracket(a, &b, &c).abs()
            <= match policy.mode {
                Mode::Exact => 0.0,
                Mode::Float => policy.epsilon,
            }
        {
            continue;
        }
        let expand = QuadraticForm::from_line_product(a, &c);
        let b2 = QuadraticForm::from_square(&b);
        let total = QuadraticForm::new(std::array::from_fn(|i| {
            &expand.coeffs[i] + &b2.coeffs[i]
        }));
        let diff = q.sub(&total);
        residual_gate("tangent_split", diff.coeff_norm(), q.coeff_norm(), policy)?;
        return Ok((b, c));
    }
    Err(WaringError::RetriesExhausted {
        op: "tangent_split",
        attempts: MAX_RETRIES,
        best_residual: f64::INFINITY,
    })
}

/// For an irreducible q with a as a secant line (J²\[q,q,a²] ≠ 0): writes
/// q = a0·a² + b·c with a0 = J²\[q,q,q] / (3·J²\[q,q,a²]).
pub fn secant_split(
    q: &QuadraticForm,
    a: &LinearForm,
    policy: &ZeroTestPolicy,
) -> Result<(Scalar, LinearForm, LinearForm)> {
    if a.is_zero() {
        return Err(WaringError::ZeroInput("secant_split"));
    }
    if quadratic_rank(q, policy) != 3 {
        return Err(WaringError::Precondition {
            op: "secant_split",
            detail: "quadratic is not irreducible (rank 3 required)".into(),
        });
    }
    let mode = q.mode();
    let qp = q.to_poly();
    let ap = a.to_poly();
    let a2 = &ap * &ap;
    let jqqq = transvectant(2, &qp, &qp, &qp).constant_value();
    let jqqa2 = transvectant(2, &qp, &qp, &a2).constant_value();
    let scale = q.coeff_norm().powi(2) * a.coeff_norm().powi(2);
    let secant_ok = match policy.mode {
        Mode::Exact => !jqqa2.is_zero(),
        Mode::Float => jqqa2.abs() > policy.epsilon * scale.max(1.0),
    };
    if !secant_ok {
        return Err(WaringError::Precondition {
            op: "secant_split",
            detail: "line is tangent to the conic (J²[q,q,a²] = 0)".into(),
        });
    }
    let a0 = &jqqq / &(&Scalar::from_int(3, mode) * &jqqa2);
    let rest = q.sub(&QuadraticForm::from_square(a).scale(&a0));
    let (b, c) = factor_rank2_quadratic(&rest, policy)?;
    Ok((a0, b, c))
}
