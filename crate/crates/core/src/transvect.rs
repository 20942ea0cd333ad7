//! The Cayley omega process over three copies of the x-block.
//!
//! `transvectant(n, f, g, h)` applies Ω^n to f(x⁽¹⁾)g(x⁽²⁾)h(x⁽³⁾) and
//! restricts to the diagonal, where Ω is the determinant of the 3×3 matrix of
//! partials ∂/∂xᵢ⁽ʲ⁾. No further normalization is applied; on linear forms
//! the first transvectant is the coefficient determinant `[abc]`.
//!
//! The u-block rides along as inert coefficients throughout.
//!
//! Two implementations are kept: the production path expands Ω^n into a
//! sign-weighted table of derivative multi-indices, and [`TripleTensor`]
//! materializes the 9-variable tensor literally. They must agree; the tests
//! cross-check them on random inputs.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Result, WaringError};
use crate::poly::{CubicForm, LinearForm, Mode, Monomial, Poly, Scalar, Var};

/// The six permutations of {0,1,2} with their signs.
const PERMS: [([usize; 3], i64); 6] = [
    ([0, 1, 2], 1),
    ([1, 2, 0], 1),
    ([2, 0, 1], 1),
    ([0, 2, 1], -1),
    ([1, 0, 2], -1),
    ([2, 1, 0], -1),
];

type SignRow = ([u8; 3], [u8; 3], [u8; 3], i64);

fn sign_table(n: usize) -> Arc<Vec<SignRow>> {
    static TABLES: OnceLock<Mutex<HashMap<usize, Arc<Vec<SignRow>>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = tables.lock().expect("sign table lock");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(build_sign_table(n)))
        .clone()
}

/// Expands Ω^n into Σ c · D^{α1} ⊗ D^{α2} ⊗ D^{α3} by walking all 6^n
/// permutation tuples and collecting signs per derivative multi-index.
fn build_sign_table(n: usize) -> Vec<SignRow> {
    let mut acc: BTreeMap<([u8; 3], [u8; 3], [u8; 3]), i64> = BTreeMap::new();
    let mut idx = vec![0usize; n];
    loop {
        let mut alphas = [[0u8; 3]; 3];
        let mut sign = 1i64;
        for &k in &idx {
            let (perm, s) = PERMS[k];
            sign *= s;
            for (slot, alpha) in alphas.iter_mut().enumerate() {
                alpha[perm[slot]] += 1;
            }
        }
        *acc.entry((alphas[0], alphas[1], alphas[2])).or_insert(0) += sign;

        // odometer over the n tuple positions
        let mut pos = 0;
        loop {
            if pos == n {
                let rows = acc
                    .into_iter()
                    .filter(|(_, c)| *c != 0)
                    .map(|((a, b, c), s)| (a, b, c, s))
                    .collect();
                return rows;
            }
            idx[pos] += 1;
            if idx[pos] < 6 {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn partial(p: &Poly, alpha: &[u8; 3]) -> Poly {
    let mut out = p.clone();
    for i in 0..3 {
        for _ in 0..alpha[i] {
            out = out.diff(Var::X[i]);
            if out.is_zero() {
                return out;
            }
        }
    }
    out
}

/// The n-th transvectant J^n\[f, g, h]. When nonzero, its x-degree is
/// deg f + deg g + deg h − 3n.
///
/// Exact inputs are pre-scaled to Gaussian integers and evaluated without
/// rational reductions; the common denominator divides back out at the end.
pub fn transvectant(n: usize, f: &Poly, g: &Poly, h: &Poly) -> Poly {
    assert!(
        f.mode() == g.mode() && g.mode() == h.mode(),
        "mixed scalar modes in transvectant"
    );
    let mode = f.mode();
    if f.is_zero() || g.is_zero() || h.is_zero() {
        return Poly::zero(mode);
    }
    if n == 0 {
        return &(f * g) * h;
    }
    if mode == Mode::Exact {
        return int_path::transvectant_exact(n, f, g, h);
    }
    let table = sign_table(n);
    let mut cache: [HashMap<[u8; 3], Poly>; 3] =
        [HashMap::new(), HashMap::new(), HashMap::new()];
    let inputs = [f, g, h];
    let mut out = Poly::zero(mode);
    for (a0, a1, a2, c) in table.iter() {
        let alphas = [a0, a1, a2];
        let mut vanishes = false;
        for slot in 0..3 {
            // split borrows: compute into the per-slot cache
            let entry = cache[slot]
                .entry(*alphas[slot])
                .or_insert_with(|| partial(inputs[slot], alphas[slot]));
            if entry.is_zero() {
                vanishes = true;
                break;
            }
        }
        if vanishes {
            continue;
        }
        let row_scale = Scalar::from_int(*c, mode);
        for (m0, c0) in cache[0][alphas[0]].terms() {
            for (m1, c1) in cache[1][alphas[1]].terms() {
                let partial_prod = &(c0 * c1) * &row_scale;
                let m01 = m0.mul(m1);
                for (m2, c2) in cache[2][alphas[2]].terms() {
                    out.add_term(m01.mul(m2), &partial_prod * c2);
                }
            }
        }
    }
    out
}

/// Gaussian-integer evaluation of the omega process for exact inputs.
mod int_path {
    use super::{sign_table, Mode, Monomial, Poly, Scalar};
    use num::{BigInt, BigRational, Complex, One, Zero};
    use std::collections::{BTreeMap, HashMap};

    type GInt = Complex<BigInt>;

    struct IntPoly {
        terms: BTreeMap<Monomial, GInt>,
    }

    /// Clears denominators: p = (returned integer poly) / den.
    fn to_int(p: &Poly) -> (IntPoly, BigInt) {
        let mut den = BigInt::one();
        for (_, c) in p.terms() {
            if let Scalar::Exact(z) = c {
                den = num::integer::lcm(den.clone(), z.re.denom().clone());
                den = num::integer::lcm(den, z.im.denom().clone());
            }
        }
        let mut terms = BTreeMap::new();
        for (m, c) in p.terms() {
            if let Scalar::Exact(z) = c {
                let re = z.re.numer() * (&den / z.re.denom());
                let im = z.im.numer() * (&den / z.im.denom());
                terms.insert(*m, Complex::new(re, im));
            }
        }
        (IntPoly { terms }, den)
    }

    fn diff_int(p: &IntPoly, var: usize) -> IntPoly {
        // var indexes x1..x3 only; the omega process never touches u
        let mut terms = BTreeMap::new();
        for (m, c) in &p.terms {
            let e = m.x[var];
            if e == 0 {
                continue;
            }
            let mut m2 = *m;
            m2.x[var] = e - 1;
            terms.insert(m2, c * BigInt::from(e));
        }
        IntPoly { terms }
    }

    fn partial_int(p: &IntPoly, alpha: &[u8; 3]) -> IntPoly {
        let mut out = IntPoly {
            terms: p.terms.clone(),
        };
        for (v, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                out = diff_int(&out, v);
                if out.terms.is_empty() {
                    return out;
                }
            }
        }
        out
    }

    pub(super) fn transvectant_exact(n: usize, f: &Poly, g: &Poly, h: &Poly) -> Poly {
        let (fi, df) = to_int(f);
        let (gi, dg) = to_int(g);
        let (hi, dh) = to_int(h);
        let table = sign_table(n);

        // identical slots share one partial cache; folding the (α1, α2)
        // symmetry would also work but sharing the cache is enough
        let same_fg = f == g;
        let mut cache_f: HashMap<[u8; 3], IntPoly> = HashMap::new();
        let mut cache_g: HashMap<[u8; 3], IntPoly> = HashMap::new();
        let mut cache_h: HashMap<[u8; 3], IntPoly> = HashMap::new();

        let mut acc: BTreeMap<Monomial, GInt> = BTreeMap::new();
        for (a0, a1, a2, c) in table.iter() {
            {
                let e0 = cache_f
                    .entry(*a0)
                    .or_insert_with(|| partial_int(&fi, a0));
                if e0.terms.is_empty() {
                    continue;
                }
            }
            {
                let src: &IntPoly = &gi;
                let cache = if same_fg { &mut cache_f } else { &mut cache_g };
                let e1 = cache.entry(*a1).or_insert_with(|| partial_int(src, a1));
                if e1.terms.is_empty() {
                    continue;
                }
            }
            {
                let e2 = cache_h
                    .entry(*a2)
                    .or_insert_with(|| partial_int(&hi, a2));
                if e2.terms.is_empty() {
                    continue;
                }
            }
            let p0 = &cache_f[a0];
            let p1 = if same_fg { &cache_f[a1] } else { &cache_g[a1] };
            let p2 = &cache_h[a2];
            let row = BigInt::from(*c);
            for (m0, c0) in &p0.terms {
                for (m1, c1) in &p1.terms {
                    let c01 = c0 * c1;
                    let c01 = Complex::new(&c01.re * &row, &c01.im * &row);
                    let m01 = m0.mul(m1);
                    for (m2, c2) in &p2.terms {
                        let prod = &c01 * c2;
                        let key = m01.mul(m2);
                        match acc.get_mut(&key) {
                            Some(v) => {
                                v.re += prod.re;
                                v.im += prod.im;
                            }
                            None => {
                                acc.insert(key, prod);
                            }
                        }
                    }
                }
            }
        }

        let den = &(&df * &dg) * &dh;
        let mut out = Poly::zero(Mode::Exact);
        for (m, z) in acc {
            if z.re.is_zero() && z.im.is_zero() {
                continue;
            }
            let re = BigRational::new(z.re, den.clone());
            let im = BigRational::new(z.im, den.clone());
            out.add_term(m, Scalar::Exact(Complex::new(re, im)));
        }
        out
    }

}

/// Polynomial in three independent copies of the x-block with a shared
/// u-block. Materializes f(x⁽¹⁾)g(x⁽²⁾)h(x⁽³⁾) so the omega process can be
/// applied literally.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleTensor {
    mode: Mode,
    terms: BTreeMap<([u8; 9], [u8; 3]), Scalar>,
}

impl TripleTensor {
    pub fn from_product(f: &Poly, g: &Poly, h: &Poly) -> TripleTensor {
        assert!(
            f.mode() == g.mode() && g.mode() == h.mode(),
            "mixed scalar modes in tensor product"
        );
        let mode = f.mode();
        let mut terms = BTreeMap::new();
        for (mf, cf) in f.terms() {
            for (mg, cg) in g.terms() {
                for (mh, ch) in h.terms() {
                    let mut x = [0u8; 9];
                    x[0..3].copy_from_slice(&mf.x);
                    x[3..6].copy_from_slice(&mg.x);
                    x[6..9].copy_from_slice(&mh.x);
                    let mut u = [0u8; 3];
                    for i in 0..3 {
                        u[i] = mf.u[i] + mg.u[i] + mh.u[i];
                    }
                    let coeff = &(cf * cg) * ch;
                    add_tt_term(&mut terms, (x, u), coeff);
                }
            }
        }
        TripleTensor { mode, terms }
    }

    /// One application of Ω = det(∂/∂xᵢ⁽ʲ⁾).
    pub fn apply_omega(&self) -> TripleTensor {
        let mut terms = BTreeMap::new();
        for ((x, u), c) in &self.terms {
            for (perm, sign) in PERMS {
                // slot j differentiates with respect to variable perm[j] of copy j
                let mut factor = 1i64;
                let mut nx = *x;
                let mut ok = true;
                for (j, &v) in perm.iter().enumerate() {
                    let idx = 3 * j + v;
                    if nx[idx] == 0 {
                        ok = false;
                        break;
                    }
                    factor *= nx[idx] as i64;
                    nx[idx] -= 1;
                }
                if !ok {
                    continue;
                }
                let coeff = c * &Scalar::from_int(sign * factor, self.mode);
                add_tt_term(&mut terms, (nx, *u), coeff);
            }
        }
        TripleTensor {
            mode: self.mode,
            terms,
        }
    }

    /// Sets all three copies equal, returning an ordinary polynomial.
    pub fn restrict_diagonal(&self) -> Poly {
        let mut out = Poly::zero(self.mode);
        for ((x, u), c) in &self.terms {
            let folded = Monomial {
                x: [x[0] + x[3] + x[6], x[1] + x[4] + x[7], x[2] + x[5] + x[8]],
                u: *u,
            };
            out.add_term(folded, c.clone());
        }
        out
    }
}

fn add_tt_term(
    terms: &mut BTreeMap<([u8; 9], [u8; 3]), Scalar>,
    key: ([u8; 9], [u8; 3]),
    coeff: Scalar,
) {
    if coeff.is_zero() {
        return;
    }
    match terms.remove(&key) {
        Some(old) => {
            let s = &old + &coeff;
            if !s.is_zero() {
                terms.insert(key, s);
            }
        }
        None => {
            terms.insert(key, coeff);
        }
    }
}

/// J^n computed through the materialized tensor. Slower; kept as an
/// independent cross-check of [`transvectant`].
pub fn transvectant_materialized(n: usize, f: &Poly, g: &Poly, h: &Poly) -> Poly {
    let mut t = TripleTensor::from_product(f, g, h);
    for _ in 0..n {
        t = t.apply_omega();
    }
    t.restrict_diagonal()
}

/// The bracket \[abc]: determinant of the coefficient matrix of three linear
/// forms.
pub fn bracket(a: &LinearForm, b: &LinearForm, c: &LinearForm) -> Scalar {
    let det2 = |p: &Scalar, q: &Scalar, r: &Scalar, s: &Scalar| &(p * s) - &(q * r);
    let (a1, a2, a3) = (&a.coeffs[0], &a.coeffs[1], &a.coeffs[2]);
    let m1 = det2(&b.coeffs[1], &b.coeffs[2], &c.coeffs[1], &c.coeffs[2]);
    let m2 = det2(&b.coeffs[0], &b.coeffs[2], &c.coeffs[0], &c.coeffs[2]);
    let m3 = det2(&b.coeffs[0], &b.coeffs[1], &c.coeffs[0], &c.coeffs[1]);
    &(&(a1 * &m1) - &(a2 * &m2)) + &(a3 * &m3)
}

/// The contraction operator C_ux = Σᵢ ∂²/∂xᵢ∂uᵢ.
pub fn contraction(p: &Poly) -> Poly {
    let mut out = Poly::zero(p.mode());
    for i in 0..3 {
        out = &out + &p.diff(Var::X[i]).diff(Var::U[i]);
    }
    out
}

/// C_ux applied k times.
pub fn contraction_power(k: usize, p: &Poly) -> Poly {
    let mut out = p.clone();
    for _ in 0..k {
        out = contraction(&out);
    }
    out
}

/// u_x = u1x1 + u2x2 + u3x3 as a (1,1)-form.
pub fn ux_poly(mode: Mode) -> Poly {
    let mut p = Poly::zero(mode);
    for i in 0..3 {
        let mut m = Monomial::ONE;
        m.x[i] = 1;
        m.u[i] = 1;
        p.add_term(m, Scalar::one(mode));
    }
    p
}

/// u_x^k.
pub fn ux_power(k: usize, mode: Mode) -> Poly {
    let base = ux_poly(mode);
    let mut out = Poly::constant(Scalar::one(mode));
    for _ in 0..k {
        out = &out * &base;
    }
    out
}

/// multinomial(3; a, b, c) for a + b + c = 3.
pub fn multinomial3(exps: &[u8; 3]) -> i64 {
    let fact = |n: u8| -> i64 { (1..=n as i64).product::<i64>().max(1) };
    6 / (fact(exps[0]) * fact(exps[1]) * fact(exps[2]))
}

/// The substitution u³ ↦ f: each monomial u^m in a pure u-cubic is replaced
/// by the matching coefficient of f divided by multinomial(3; m).
pub fn apolar_sub(p: &Poly, f: &CubicForm) -> Result<Scalar> {
    let mode = p.mode();
    if mode != f.mode() {
        return Err(WaringError::MixedModes(mode, f.mode()));
    }
    if p.is_zero() {
        return Ok(Scalar::zero(mode));
    }
    match p.bidegree() {
        Some((0, 3)) => {}
        other => {
            return Err(WaringError::BidegreeMismatch {
                expected: (0, 3),
                found: other.unwrap_or((0, 0)),
            })
        }
    }
    let mut acc = Scalar::zero(mode);
    for (m, c) in p.terms() {
        let fm = f.coeff(m.u);
        let mult = Scalar::from_int(multinomial3(&m.u), mode);
        acc = &acc + &(&(c * &fm) / &mult);
    }
    Ok(acc)
}

/// Σ_m p_m f_m Π(mᵢ!) — the symmetric-tensor pairing of a u-cubic against a
/// cubic form. Equals 6·apolar_sub for cubics; this is the weighting under
/// which the Aronhold invariants come out on their classical scale.
pub fn polar_pairing(p: &Poly, f: &CubicForm) -> Result<Scalar> {
    let six = Scalar::from_int(6, p.mode());
    Ok(&apolar_sub(p, f)? * &six)
}
