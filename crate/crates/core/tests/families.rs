use nilcurv::attributes::{decompose, quasi_einstein_check};
use nilcurv::curvature::{einstein_check, ricci_general, ricci_nilpotent, EinsteinMode};
use nilcurv::families::*;
use nilcurv::liealg::change_basis;
use nilcurv::pseudolinalg::signature;
use nilcurv::{Mat, MetricLieAlgebra, Rational, Scalar, Tolerance};

fn q(a: i64, b: i64) -> Rational {
    Rational::from_ratio(a, b)
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn ricci_flat<T: Scalar>(a: &MetricLieAlgebra<T>) -> bool {
    einstein_check(a, &EinsteinMode::RicciFlat, &tol()).holds
}

fn shape<T: Scalar>(a: &MetricLieAlgebra<T>) -> (usize, usize, (usize, usize)) {
    let t = tol();
    (
        a.lie.nilpotency_class(&t).unwrap(),
        a.lie.center(&t).dim(),
        signature(&a.metric, &t).unwrap(),
    )
}

#[test]
fn l6_19_grid() {
    for alpha in [q(1, 1), q(2, 1), q(-1, 1), q(1, 3), q(-5, 2)] {
        let a = make_l6_19(alpha).unwrap();
        assert_eq!(a.lie.jacobi_residual(), q(0, 1));
        assert_eq!(shape(&a), (3, 1, (1, 5)));
        assert!(ricci_flat(&a));
        assert_eq!(ricci_general(&a).ric, Mat::zeros(6, 6));
    }
}

#[test]
fn dim7_147e_grid() {
    for (r, a) in [(q(1, 2), q(1, 1)), (q(1, 4), q(2, 1)), (q(3, 4), q(1, 3)), (q(1, 10), q(5, 1)), (q(9, 10), q(7, 2))] {
        let h = make_dim7_147e(r, a).unwrap();
        assert_eq!(h.lie.jacobi_residual(), q(0, 1));
        assert_eq!(shape(&h), (3, 1, (1, 6)));
        assert_eq!(ricci_general(&h).ric, Mat::zeros(7, 7));
    }
}

#[test]
fn qe_families_are_quasi_einstein_at_zero() {
    let t = tol();
    for (alpha, eps, sign) in [
        (q(1, 1), Sign::Plus, Sign::Plus),
        (q(2, 1), Sign::Minus, Sign::Minus),
        (q(-1, 3), Sign::Plus, Sign::Minus),
        (q(5, 2), Sign::Minus, Sign::Plus),
        (q(7, 1), Sign::Plus, Sign::Plus),
    ] {
        let (g, omega) = make_qe_dim5(alpha, eps, sign).unwrap();
        assert_eq!(shape(&g), (2, 2, (1, 4)));
        assert!(g.lie.center(&t).same_as(&g.lie.derived_ideal(&t), &t));
        assert_eq!(omega.s[0].rank(&t), 4);
        assert!(quasi_einstein_check(&g, &omega, &q(0, 1), &t).holds);
        assert!(!quasi_einstein_check(&g, &omega.scaled(&q(0, 1)), &q(0, 1), &t).holds);
    }
    for (a2, a3, eps, sign) in [
        (q(3, 1), q(4, 1), Sign::Minus, Sign::Plus),
        (q(4, 1), q(3, 1), Sign::Plus, Sign::Plus),
        (q(5, 1), q(12, 1), Sign::Plus, Sign::Minus),
        (q(-8, 1), q(15, 1), Sign::Minus, Sign::Minus),
        (q(3, 5), q(4, 5), Sign::Plus, Sign::Plus),
    ] {
        let (g, omega) = make_qe_dim6(a2, a3, eps, sign).unwrap();
        assert_eq!(shape(&g), (2, 3, (1, 5)));
        assert!(quasi_einstein_check(&g, &omega, &q(0, 1), &t).holds);
    }
    let (g, omega) = make_qe_dim6(1.0, 1.0, Sign::Plus, Sign::Plus).unwrap();
    let v = quasi_einstein_check(&g, &omega, &0.0, &t);
    assert!(v.holds, "{v:?}");
}

#[test]
fn qe_dim6_swap_keeps_invariants() {
    let t = tol();
    let (g1, _) = make_qe_dim6(q(3, 1), q(4, 1), Sign::Plus, Sign::Plus).unwrap();
    let (g2, _) = make_qe_dim6(q(4, 1), q(3, 1), Sign::Plus, Sign::Plus).unwrap();
    let r1 = ricci_nilpotent(&g1, &t).unwrap().report;
    let r2 = ricci_nilpotent(&g2, &t).unwrap().report;
    assert_eq!(r1.scalar, r2.scalar);
    assert_eq!(r1.einstein_residual, r2.einstein_residual);
    // Relabel u₂↔u₃, e₂↔e₃.
    let mut p = Mat::zeros(6, 6);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3), (4, 5), (5, 4)] {
        p[(i, j)] = q(1, 1);
    }
    let swapped = change_basis(&g1, &p, &t).unwrap();
    let r3 = ricci_general(&swapped);
    assert_eq!(r3.scalar, r2.scalar);
}

#[test]
fn three_step_families_are_ricci_flat() {
    for alpha in [q(1, 1), q(2, 1), q(-3, 1), q(1, 2), q(5, 3)] {
        for variant in [Variant::A, Variant::B] {
            for sign in [Sign::Plus, Sign::Minus] {
                let h = make_three_step_dim6(alpha.clone(), variant, sign).unwrap();
                assert_eq!(shape(&h), (3, 1, (1, 5)));
                assert!(ricci_flat(&h));
            }
        }
    }
    for (a2, a3) in [(q(3, 1), q(4, 1)), (q(4, 1), q(3, 1)), (q(5, 1), q(12, 1)), (q(-6, 1), q(8, 1)), (q(3, 5), q(-4, 5))] {
        for eps in [Sign::Plus, Sign::Minus] {
            for sign in [Sign::Plus, Sign::Minus] {
                let h = make_three_step_dim7(a2.clone(), a3.clone(), eps, sign).unwrap();
                assert_eq!(shape(&h), (3, 1, (1, 6)));
                assert!(ricci_flat(&h));
            }
        }
    }
}

#[test]
fn decompose_recovers_quasi_einstein_data() {
    let t = tol();
    for sign in [Sign::Plus, Sign::Minus] {
        for (variant, eps) in [(Variant::A, Sign::Plus), (Variant::B, Sign::Minus)] {
            let h = make_three_step_dim6(q(2, 1), variant, sign).unwrap();
            let attrs = decompose(&h, &t).unwrap();
            let (g, omega) = make_qe_dim5(q(2, 1), eps, sign).unwrap();
            assert_eq!(attrs.g, g);
            assert_eq!(attrs.omega, omega);
            assert!(attrs.rigid);
        }
    }
    let h = make_three_step_dim7(q(3, 1), q(4, 1), Sign::Minus, Sign::Plus).unwrap();
    let attrs = decompose(&h, &t).unwrap();
    let (g, omega) = make_qe_dim6(q(3, 1), q(4, 1), Sign::Minus, Sign::Plus).unwrap();
    assert_eq!(attrs.g, g);
    assert_eq!(attrs.omega, omega);
}

#[test]
fn variant_b_is_variant_a_with_u3_negated() {
    let t = tol();
    let a = make_three_step_dim6(q(1, 1), Variant::A, Sign::Plus).unwrap();
    let b = make_three_step_dim6(q(1, 1), Variant::B, Sign::Minus).unwrap();
    let flip = Mat::diagonal(&[q(1, 1), q(1, 1), q(1, 1), q(1, 1), q(-1, 1), q(1, 1)]);
    assert_eq!(change_basis(&a, &flip, &t).unwrap(), b);
}

#[test]
fn substitution_gives_l6_19() {
    let t = tol();
    for alpha in [q(1, 1), q(2, 1), q(-1, 2)] {
        for sign in [Sign::Plus, Sign::Minus] {
            let h = make_three_step_dim6(alpha.clone(), Variant::A, sign).unwrap();
            let f = change_basis(&h, &l6_19_substitution(alpha.clone(), sign), &t).unwrap();
            assert_eq!(f, make_l6_19(alpha.clone()).unwrap());
        }
    }
}

#[test]
fn substitution_gives_147e() {
    let t = tol();
    for (a2, a3) in [(q(3, 1), q(4, 1)), (q(5, 1), q(-12, 1))] {
        for eps in [Sign::Plus, Sign::Minus] {
            for sign in [Sign::Plus, Sign::Minus] {
                let h = make_three_step_dim7(a2.clone(), a3.clone(), eps, sign).unwrap();
                let (sub, r, a) = dim7_147e_substitution(a2.clone(), a3.clone(), eps, sign).unwrap();
                let f = change_basis(&h, &sub, &t).unwrap();
                assert_eq!(f, make_dim7_147e(r, a).unwrap());
            }
        }
    }
    let (_, r, _) = dim7_147e_substitution(1.0, 1.0, Sign::Plus, Sign::Plus).unwrap();
    assert!((r - 0.5).abs() < 1e-15);
    let h = make_three_step_dim7(1.0, 1.0, Sign::Plus, Sign::Plus).unwrap();
    let (sub, r, a) = dim7_147e_substitution(1.0, 1.0, Sign::Plus, Sign::Plus).unwrap();
    let f = change_basis(&h, &sub, &t).unwrap();
    let target = make_dim7_147e(r, a).unwrap();
    assert!(f.lie.to_f64().entries().len() == target.lie.entries().len());
    assert!(f.metric.matrix().max_abs_diff(target.metric.matrix()) < 1e-12);
}

#[test]
fn closing_examples() {
    let t = tol();
    let c = make_conti8::<f64>().unwrap();
    assert!(c.lie.jacobi_residual() < 1e-12);
    assert_eq!(c.lie.center(&t).dim(), 2);
    let v = einstein_check(&c, &EinsteinMode::Einstein, &t);
    assert!(v.holds && v.lambda.abs() > 1e-3, "{v:?}");

    let e7 = make_example7::<f64>().unwrap();
    assert!(e7.lie.jacobi_residual() < 1e-12);
    let z = e7.lie.center(&t);
    assert_eq!(z.dim(), 2);
    assert!(z.is_nondegenerate(&e7.metric, &t));
    assert!(z.contains(&[0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 0.0], &t));
    assert!(ricci_flat(&e7));
    assert_eq!(e7.lie.nilpotency_class(&t).unwrap(), 3);

    for (p, r) in [(1.0, 1.0), (1.0, 2.0), (-2.0, 0.5)] {
        let h = make_example10(p, r).unwrap();
        assert!(h.lie.jacobi_residual() < 1e-12);
        assert_eq!(shape(&h), (3, 4, (1, 9)));
        assert!(ricci_flat(&h));
    }
    let exact = make_example10(q(3, 1), q(4, 1)).unwrap();
    assert_eq!(ricci_general(&exact).ric, Mat::zeros(10, 10));
}
