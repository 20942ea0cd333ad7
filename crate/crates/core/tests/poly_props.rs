//! Property tests for the polynomial layer: ring axioms, float shadowing of
//! exact arithmetic, and the substitution homomorphism.

use proptest::prelude::*;

use waring::poly::{CubicForm, Mode, Monomial, Poly, QuadraticForm, Scalar, Var};

fn monomial_strategy(max_deg: u8) -> impl Strategy<Value = Monomial> {
    (0..=max_deg).prop_flat_map(|d| {
        proptest::collection::vec(0..3usize, d as usize).prop_map(|picks| {
            let mut x = [0u8; 3];
            for p in picks {
                x[p] += 1;
            }
            Monomial::from_x(x)
        })
    })
}

fn poly_strategy(max_deg: u8, max_terms: usize) -> impl Strategy<Value = Poly> {
    proptest::collection::vec((monomial_strategy(max_deg), -9i64..=9), 1..=max_terms).prop_map(
        |terms| {
            let mut p = Poly::zero(Mode::Exact);
            for (m, c) in terms {
                p.add_term(m, Scalar::from_int(c, Mode::Exact));
            }
            p
        },
    )
}

fn matrix_strategy() -> impl Strategy<Value = [[i64; 3]; 3]> {
    proptest::array::uniform3(proptest::array::uniform3(-4i64..=4))
}

fn to_scalar_matrix(m: [[i64; 3]; 3], mode: Mode) -> [[Scalar; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| Scalar::from_int(m[i][j], mode)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(
        p in poly_strategy(2, 4),
        q in poly_strategy(2, 4),
        r in poly_strategy(2, 4),
    ) {
        let lhs = &(&p * &q) * &r;
        let rhs = &p * &(&q * &r);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiplication_distributes(
        p in poly_strategy(3, 4),
        q in poly_strategy(3, 4),
        r in poly_strategy(3, 4),
    ) {
        let lhs = &p * &(&q + &r);
        let rhs = &(&p * &q) + &(&p * &r);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn addition_commutes_and_cancels(
        p in poly_strategy(3, 5),
        q in poly_strategy(3, 5),
    ) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert!((&(&p + &q) - &q) == p);
    }

    #[test]
    fn float_mul_shadows_exact_mul(
        p in poly_strategy(3, 5),
        q in poly_strategy(3, 5),
    ) {
        let exact = (&p * &q).to_float();
        let float = &p.to_float() * &q.to_float();
        let diff = (&exact - &float).coeff_norm();
        let scale = exact.coeff_norm().max(1.0);
        prop_assert!(diff <= 1e-12 * scale, "relative error {}", diff / scale);
    }

    #[test]
    fn substitution_is_a_ring_homomorphism(
        p in poly_strategy(2, 4),
        q in poly_strategy(2, 4),
        m in matrix_strategy(),
    ) {
        let l = to_scalar_matrix(m, Mode::Exact);
        let lhs = (&p * &q).substitute_linear(&l).unwrap();
        let rhs = &p.substitute_linear(&l).unwrap() * &q.substitute_linear(&l).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cubic_form_round_trip(coeffs in proptest::array::uniform10(-99i64..=99)) {
        let f = CubicForm::from_ints(coeffs, Mode::Exact);
        let back = CubicForm::from_poly(&f.to_poly()).unwrap();
        prop_assert_eq!(f, back);
    }

    #[test]
    fn quadratic_form_round_trip(coeffs in proptest::array::uniform6(-99i64..=99)) {
        let q = QuadraticForm::from_ints(coeffs, Mode::Exact);
        let back = QuadraticForm::from_poly(&q.to_poly()).unwrap();
        prop_assert_eq!(q, back);
    }

    #[test]
    fn differentiation_is_linear(
        p in poly_strategy(4, 5),
        q in poly_strategy(4, 5),
    ) {
        for v in [Var::X1, Var::X2, Var::X3] {
            let lhs = (&p + &q).diff(v);
            let rhs = &p.diff(v) + &q.diff(v);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
