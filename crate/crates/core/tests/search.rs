mod common;

use nilcurv::families::*;
use nilcurv::matlemmas::LemmaimpBranch;
use nilcurv::search::*;
use nilcurv::{LiePresentation, Mat, MetricLieAlgebra, MetricTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn metric_slots(n: usize) -> Vec<Slot> {
    (0..n).flat_map(|i| (i..n).map(move |j| Slot::Metric(i, j))).collect()
}

fn oracle_residual(a: &MetricLieAlgebra<f64>, lambda: Option<f64>) -> f64 {
    let ric = common::ricci_of(a);
    let ginv = common::gram(a).try_inverse().unwrap();
    let op = ginv * ric;
    let n = a.dim();
    let lam = lambda.unwrap_or(op.trace() / n as f64);
    let d = op - nalgebra::DMatrix::<f64>::identity(n, n) * lam;
    d.iter().map(|x| x * x).sum()
}

fn l6_19_problem(width: f64) -> (SearchProblem, Vec<f64>) {
    let a = make_l6_19(1.0).unwrap();
    let slots = metric_slots(6);
    let g = a.metric.matrix().clone();
    let x0: Vec<f64> = slots
        .iter()
        .map(|s| match *s {
            Slot::Metric(i, j) => g[(i, j)],
            _ => unreachable!(),
        })
        .collect();
    let bounds = x0.iter().map(|v| (v - width, v + width)).collect();
    (SearchProblem::new(Base::Algebra(a), slots, bounds, ResidualKind::Einstein).unwrap(), x0)
}

#[test]
fn classified_family_is_a_zero() {
    let (p, x0) = l6_19_problem(0.1);
    let e = p.evaluate(&x0);
    assert!(e.feasible && e.value <= 1e-20, "{e:?}");
    assert!(e.lambda.unwrap().abs() < 1e-12);
}

#[test]
fn abelian_base_is_always_einstein() {
    let a = MetricLieAlgebra::new(LiePresentation::abelian(4), MetricTensor::euclidean(4)).unwrap();
    let slots = metric_slots(4);
    let bounds = slots
        .iter()
        .map(|s| match s {
            Slot::Metric(i, j) if i == j => (1.0, 3.0),
            _ => (-0.2, 0.2),
        })
        .collect::<Vec<_>>();
    let p = SearchProblem::new(Base::Algebra(a), slots, bounds.clone(), ResidualKind::Einstein).unwrap();
    for idx in 0..10 {
        let x = random_start(&bounds, 4, idx);
        let e = p.evaluate(&x);
        assert_eq!(e.value, 0.0);
        assert_eq!(e.lambda, Some(0.0));
    }
}

#[test]
fn perturbed_147e_is_not_ricci_flat() {
    let h = make_dim7_147e(0.5, 1.0).unwrap();
    let p = SearchProblem::new(
        Base::Algebra(h.clone()),
        vec![Slot::Metric(3, 3), Slot::Lambda],
        vec![(-2.0, 0.0), (-1.0, 1.0)],
        ResidualKind::Einstein,
    )
    .unwrap();
    assert!(p.einstein_residual(&[-1.0, 0.0]) < 1e-24);
    let r = p.einstein_residual(&[-0.9, 0.0]);
    let mut g = h.metric.matrix().clone();
    g[(3, 3)] = -0.9;
    let perturbed = MetricLieAlgebra::new(h.lie.clone(), MetricTensor::new(g, &Default::default()).unwrap()).unwrap();
    let oracle = oracle_residual(&perturbed, Some(0.0));
    assert!(r > 1e-6);
    assert!((r - oracle).abs() <= 1e-9 * oracle);
}

#[test]
fn residuals_match_the_oracle_at_random_points() {
    let templates = [
        make_l6_19(2.0).unwrap(),
        make_three_step_dim6(1.0, Variant::B, Sign::Minus).unwrap(),
        make_conti8::<f64>().unwrap(),
    ];
    for h in templates {
        let n = h.dim();
        let slots: Vec<Slot> = (0..n).map(Slot::MetricScale).collect();
        let bounds = vec![(0.5, 2.0); n];
        let p = SearchProblem::new(Base::Algebra(h), slots, bounds.clone(), ResidualKind::Einstein).unwrap();
        for idx in 0..20 {
            let x = random_start(&bounds, 2, idx);
            let e = p.evaluate(&x);
            let inst = match p.unpack(&x).unwrap() {
                Instance::Algebra { algebra, .. } => algebra,
                _ => unreachable!(),
            };
            let oracle = oracle_residual(&inst, None);
            assert!((e.value - oracle).abs() <= 1e-9 * oracle.max(1e-12), "{} vs {oracle}", e.value);
        }
    }
}

#[test]
fn pack_inverts_unpack() {
    let (qe, omega) = make_qe_dim5(1.0, Sign::Plus, Sign::Minus).unwrap();
    let problems = vec![
        l6_19_problem(0.05).0,
        SearchProblem::new(
            Base::Algebra(make_dim7_147e(0.25, 1.0).unwrap()),
            vec![Slot::MetricScale(0), Slot::Bracket(0, 1, 4), Slot::Lambda],
            vec![(0.5, 2.0), (0.5, 1.5), (-1.0, 1.0)],
            ResidualKind::EsSystem,
        )
        .unwrap(),
        SearchProblem::new(
            Base::Algebra(make_conti8::<f64>().unwrap()),
            vec![Slot::MetricOverall, Slot::Lambda],
            vec![(0.5, 2.0), (-1.0, 1.0)],
            ResidualKind::EsSystem,
        )
        .unwrap(),
        SearchProblem::new(
            Base::Extension { g: qe, omega },
            vec![Slot::Cocycle(0, 0, 2), Slot::Metric(2, 2), Slot::Lambda],
            vec![(-2.0, 2.0), (0.5, 2.0), (-1.0, 1.0)],
            ResidualKind::QuasiEinstein,
        )
        .unwrap(),
    ];
    for p in problems {
        for idx in 0..10 {
            let x = random_start(&p.bounds, 8, idx);
            let back = p.pack(&p.unpack(&x).unwrap());
            for (a, b) in x.iter().zip(&back) {
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{x:?} vs {back:?}");
            }
        }
    }
}

#[test]
fn infeasible_points_never_outrank_feasible_ones() {
    let (p, x0) = l6_19_problem(3.0);
    let mut degenerate = x0.clone();
    degenerate.iter_mut().for_each(|v| *v = 0.0);
    let bad = p.evaluate(&degenerate);
    assert!(!bad.feasible && bad.value == PENALTY);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let x: Vec<f64> = p.bounds.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect();
        let e = p.evaluate(&x);
        if e.feasible {
            assert!(e.value < bad.value);
        }
    }
}

#[test]
fn minimize_stays_in_basin() {
    let (p, _) = l6_19_problem(0.02);
    let r = minimize(&p, 3, 5, &OptimizerConfig::default()).unwrap();
    assert!(r.feasible && r.residual <= 1e-10, "{}", r.residual);
    assert_eq!(r.residual, p.evaluate(&r.params).value);
}

#[test]
fn minimize_is_deterministic() {
    let h = make_three_step_dim6(1.0, Variant::A, Sign::Plus).unwrap();
    let p = lambda_sign_problem(&h, MetricFreedom::PerAxis, (0.5, 2.0), (-1.0, 1.0)).unwrap();
    let cfg = OptimizerConfig::default();
    let a = minimize(&p, 3, 42, &cfg).unwrap();
    let b = minimize(&p, 3, 42, &cfg).unwrap();
    assert_eq!(a, b);
    let bits = |r: &SearchResult| r.params.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn quadratic_sanity() {
    let target = [0.25, -0.75, 1.5, 0.0];
    let f = |x: &[f64]| x.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    let outs = minimize_fn(|_, x| f(x), &[(-2.0, 2.0); 4], 4, 9, &OptimizerConfig::default());
    let best = best_outcome(&outs).unwrap();
    for (a, b) in best.x.iter().zip(&target) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn lambda_scan_on_three_step_templates() {
    let cfg = OptimizerConfig::default();
    let h = make_three_step_dim6(2.0, Variant::A, Sign::Minus).unwrap();
    let p = lambda_sign_problem(&h, MetricFreedom::PerAxis, (0.5, 2.0), (-2.0, 2.0)).unwrap();
    let s = scan_lambda_sign(&p, 6, 3, &cfg).unwrap();
    assert!(!s.near_solutions.is_empty());
    assert!(s.near_solutions.iter().all(|n| n.lambda.abs() <= 1e-6), "{s:?}");
    assert!(s.nonnegative(1e-6));
}

#[test]
fn lambda_scan_on_scaled_conti8_is_positive() {
    let c = make_conti8::<f64>().unwrap();
    let p = lambda_sign_problem(&c, MetricFreedom::Overall, (0.5, 2.0), (-2.0, 2.0)).unwrap();
    let s = scan_lambda_sign(&p, 4, 1, &OptimizerConfig::default()).unwrap();
    assert!(!s.near_solutions.is_empty());
    assert!(s.min_lambda.unwrap() > 0.0);
}

#[test]
fn lambda_scan_on_abelian_template() {
    let mut g = Mat::identity(3);
    g[(0, 0)] = -1.0;
    let a = MetricLieAlgebra::new(LiePresentation::abelian(3), MetricTensor::euclidean(3)).unwrap();
    let p = SearchProblem::new(
        Base::Algebra(a),
        vec![Slot::MetricScale(0), Slot::MetricScale(1), Slot::MetricScale(2)],
        vec![(0.5, 2.0); 3],
        ResidualKind::Einstein,
    )
    .unwrap();
    let s = scan_lambda_sign(&p, 5, 0, &OptimizerConfig::default()).unwrap();
    assert_eq!(s.near_solutions.len(), 5);
    assert!(s.near_solutions.iter().all(|n| n.lambda == 0.0));
}

#[test]
fn finite_difference_gradient_matches_analytic() {
    // Objective of the (K, A, P) problem; analytic gradient in the K entries.
    let b = LemmaimpBranch { k: 2, alpha_sign: Sign::Plus, reflect: false };
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5 {
        let x: Vec<f64> = b.bounds().iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect();
        let t = b.triple(&x);
        let n = 4;
        let k = common::to_dm(&t.k_mat);
        let a = common::to_dm(&t.a);
        let pm = common::to_dm(&t.p);
        let e1 = &k * &k - pm.transpose() * &a * &pm - &a;
        let e2 = &k * t.alpha - (&a * &pm - pm.transpose() * &a);
        let grad = (&e1 * k.transpose() + k.transpose() * &e1) * 2.0 + &e2 * (2.0 * t.alpha);
        let fd = fd_gradient(|y| b.objective(y), &x, 1e-6);
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                let analytic = grad[(i, j)] - grad[(j, i)];
                assert!((fd[idx] - analytic).abs() <= 1e-4 * analytic.abs().max(1.0), "{} vs {analytic}", fd[idx]);
                idx += 1;
            }
        }
    }
}

#[test]
fn lemmaimp_problem_uses_the_same_objective() {
    let b = LemmaimpBranch { k: 1, alpha_sign: Sign::Minus, reflect: false };
    let p = SearchProblem::lemmaimp(b);
    let x = random_start(&p.bounds, 0, 0);
    assert_eq!(p.einstein_residual(&x), b.objective(&x));
}

#[test]
fn overall_and_axis_factors_do_not_mix() {
    let c = make_conti8::<f64>().unwrap();
    assert!(SearchProblem::new(
        Base::Algebra(c),
        vec![Slot::MetricOverall, Slot::MetricScale(1)],
        vec![(0.5, 2.0); 2],
        ResidualKind::Einstein,
    )
    .is_err());
}
