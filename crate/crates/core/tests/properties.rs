mod common;

use nalgebra::DMatrix;
use nilcurv::attributes::{decompose, einstein_conditions_es, einstein_structure, om_and_derivation, ricci_via_attributes};
use nilcurv::curvature::{
    einstein_check, invariant_operators, ricci_general, ricci_nilpotent, structure_endos, Connection, EinsteinMode,
};
use nilcurv::families::Sign;
use nilcurv::matlemmas::{genlem1_basis, lemmaimp_residual, sym_eigenvalues, weyl_bounds, LemmaimpTriple};
use nilcurv::matrix::unit;
use nilcurv::pseudolinalg::{adjoint, inertia, orthogonal_complement, pseudo_orthonormalize, signature};
use nilcurv::sampling::{random_extension, random_metric, random_metric_lie, random_nilpotent};
use nilcurv::search::{random_start, Base, ResidualKind, SearchProblem, Slot};
use nilcurv::{Mat, MetricTensor, Rational, Scalar, Subspace, Tolerance};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64) -> Rational {
    Rational::from_i64(n)
}

fn int_matrix(rng: &mut ChaCha8Rng, n: usize) -> Mat<Rational> {
    Mat::from_fn(n, n, |_, _| q(rng.random_range(-3..=3)))
}

/// Unit lower times unit upper triangular, so always invertible.
fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> Mat<Rational> {
    let mut l = Mat::identity(n);
    let mut u = Mat::identity(n);
    for i in 0..n {
        for j in 0..i {
            l[(i, j)] = q(rng.random_range(-2..=2));
            u[(j, i)] = q(rng.random_range(-2..=2));
        }
    }
    l.matmul(&u)
}

fn rel_diff(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    a.max_abs_diff(b) / a.max_abs().max(b.max_abs()).max(1.0)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn adjoint_is_an_involution_reversing_products(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let timelike = rng.random_range(0..=n.min(2));
        let m: MetricTensor<Rational> = random_metric(&mut rng, n, timelike);
        let f = int_matrix(&mut rng, n);
        let g = int_matrix(&mut rng, n);
        let fs = adjoint(&f, &m).unwrap();
        prop_assert_eq!(adjoint(&fs, &m).unwrap(), f.clone());
        prop_assert_eq!(adjoint(&f.matmul(&g), &m).unwrap(), adjoint(&g, &m).unwrap().matmul(&fs));
    }

    #[test]
    fn signature_is_a_congruence_invariant(seed in any::<u64>(), n in 1usize..=6) {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let timelike = rng.random_range(0..=n);
        let m: MetricTensor<Rational> = random_metric(&mut rng, n, timelike);
        let t = unimodular(&mut rng, n);
        let moved = m.transported(&t, &tol).unwrap();
        prop_assert_eq!(signature(&m, &tol).unwrap(), (timelike, n - timelike));
        prop_assert_eq!(signature(&moved, &tol).unwrap(), (timelike, n - timelike));
        let mf = m.to_f64();
        let moved_f = moved.to_f64();
        // Float congruence is only meaningful while the result is well conditioned.
        let g = moved_f.matrix();
        let eig = nalgebra::DMatrix::from_fn(n, n, |i, j| g[(i, j)]).symmetric_eigenvalues();
        let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x.abs()), hi.max(x.abs())));
        if lo > 1e-6 * hi {
            prop_assert_eq!(signature(&moved_f, &tol).unwrap(), signature(&mf, &tol).unwrap());
        }
    }

    #[test]
    fn complements_split_dimension_and_inertia(seed in any::<u64>(), n in 2usize..=6) {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let timelike = rng.random_range(0..=n.min(2));
        let m: MetricTensor<Rational> = random_metric(&mut rng, n, timelike);
        let k = rng.random_range(1..n);
        let vs: Vec<Vec<Rational>> = (0..k).map(|_| (0..n).map(|_| q(rng.random_range(-2..=2))).collect()).collect();
        let s = Subspace::span(n, vs, &tol);
        let c = orthogonal_complement(&s, &m, &tol);
        prop_assert_eq!(s.dim() + c.space.dim(), n);
        if c.complementary {
            let a = inertia(&s.restricted_metric(&m), &tol).unwrap();
            let b = inertia(&c.space.restricted_metric(&m), &tol).unwrap();
            prop_assert_eq!((a.0 + b.0, a.1 + b.1), (timelike, n - timelike));
        }
    }

    #[test]
    fn pseudo_orthonormal_bases_are_orthonormal(seed in any::<u64>(), n in 1usize..=7) {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let timelike = rng.random_range(0..=n.min(3));
        let m: MetricTensor<f64> = random_metric(&mut rng, n, timelike);
        let b = pseudo_orthonormalize(&Subspace::full(n), &m, &tol).unwrap();
        prop_assert_eq!(b.vectors.len(), n);
        let gram = m.gram(&b.vectors);
        let scale = m.matrix().max_abs().max(1.0);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { f64::from(b.signs[i]) } else { 0.0 };
                prop_assert!((gram[(i, j)] - want).abs() <= 1e-9 * scale, "{gram:?}");
            }
        }
    }

    #[test]
    fn brackets_are_antisymmetric_and_satisfy_jacobi(seed in any::<u64>(), n in 2usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lie = random_nilpotent::<Rational>(&mut rng, n);
        prop_assert!(lie.jacobi_residual().is_zero());
        for i in 0..n {
            for j in 0..n {
                let a = lie.bracket_basis(i, j);
                let b = lie.bracket_basis(j, i);
                prop_assert!(a.iter().zip(&b).all(|(x, y)| (x.clone() + y.clone()).is_zero()));
            }
        }
    }

    #[test]
    fn central_series_is_nested_and_ad_invariant(seed in any::<u64>(), n in 2usize..=7) {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lie = random_nilpotent::<Rational>(&mut rng, n);
        let series = lie.lower_central_series(&tol).unwrap();
        let full = Subspace::full(n);
        for w in series.terms.windows(2) {
            prop_assert!(w[1].is_subspace_of(&w[0], &tol));
            prop_assert!(lie.bracket_span(&w[0], &full, &tol).is_subspace_of(&w[1], &tol));
        }
        prop_assert!(series.terms.last().unwrap().is_zero());
    }

    #[test]
    fn center_lies_in_every_structure_kernel(seed in any::<u64>(), n in 2usize..=6) {
        let tol = Tolerance::default();
        let a = random_metric_lie::<Rational>(seed, n);
        let endos = structure_endos(&a, &a.lie.derived_ideal(&tol), &tol).unwrap();
        prop_assert!(endos.reconstruction_residual(&a).is_zero());
        for z in a.lie.center(&tol).basis() {
            for j in &endos.j {
                prop_assert!(j.mul_vec(z).iter().all(Scalar::is_zero));
            }
        }
    }

    #[test]
    fn change_basis_preserves_structure_and_curvature(seed in any::<u64>(), n in 2usize..=6) {
        let tol = Tolerance::default();
        let a = random_metric_lie::<Rational>(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let t = unimodular(&mut rng, n);
        let b = nilcurv::change_basis(&a, &t, &tol).unwrap();
        prop_assert!(b.lie.jacobi_residual().is_zero());
        prop_assert_eq!(b.lie.nilpotency_class(&tol).unwrap(), a.lie.nilpotency_class(&tol).unwrap());
        let ra = ricci_general(&a);
        let rb = ricci_general(&b);
        prop_assert_eq!(&ra.lambda_star, &rb.lambda_star);
        prop_assert_eq!(&ra.scalar, &rb.scalar);
        // Ric is an endomorphism, so it transforms by conjugation.
        let tinv = t.inverse(&tol).unwrap();
        prop_assert_eq!(tinv.matmul(&ra.ric_op).matmul(&t), rb.ric_op.clone());
        prop_assert_eq!(ra.einstein_residual.is_zero(), rb.einstein_residual.is_zero());
    }

    #[test]
    fn rigid_extensions_add_one_step(seed in any::<u64>(), m in 2usize..=5, p in 1usize..=2) {
        let tol = Tolerance::default();
        if let Some(s) = random_extension::<Rational>(seed, m, p) {
            let center = s.h.lie.center(&tol);
            for l in 0..p {
                prop_assert!(center.contains(&unit(m + p, m + l), &tol));
            }
            prop_assert_eq!(
                s.h.lie.nilpotency_class(&tol).unwrap(),
                s.g.lie.nilpotency_class(&tol).unwrap() + 1
            );
        }
    }

    #[test]
    fn levi_civita_is_metric_and_torsion_free(seed in any::<u64>(), n in 2usize..=6) {
        let a = random_metric_lie::<Rational>(seed, n);
        let conn = Connection::new(&a);
        let g = a.metric.matrix();
        for i in 0..n {
            let l = conn.basis_op(i);
            // ⟨L_u v, w⟩ + ⟨v, L_u w⟩ = 0 ⟺ Lᵀg + gL = 0.
            prop_assert!(l.transpose().matmul(g).add(&g.matmul(l)).max_abs().is_zero());
            for j in 0..n {
                let t: Vec<Rational> = conn.basis_op(i).column(j).iter()
                    .zip(conn.basis_op(j).column(i))
                    .map(|(x, y)| x.clone() - y)
                    .collect();
                prop_assert_eq!(t, a.lie.bracket_basis(i, j));
            }
        }
    }

    #[test]
    fn both_ricci_routes_agree_exactly(seed in any::<u64>(), n in 2usize..=6) {
        let tol = Tolerance::default();
        let a = random_metric_lie::<Rational>(seed, n);
        let general = ricci_general(&a);
        let nil = ricci_nilpotent(&a, &tol).unwrap();
        prop_assert_eq!(&general.ric, &nil.report.ric);
        prop_assert_eq!(general.ric.transpose(), general.ric.clone());
        prop_assert_eq!(nil.j1.trace(), nil.j2.trace());
        prop_assert_eq!(general.scalar.clone(), general.lambda_star * q(n as i64));
    }

    #[test]
    fn both_ricci_routes_agree_in_floats(seed in any::<u64>(), n in 3usize..=8) {
        let tol = Tolerance::default();
        let a = random_metric_lie::<f64>(seed, n);
        let general = ricci_general(&a).ric;
        let nil = ricci_nilpotent(&a, &tol).unwrap();
        prop_assert!(rel_diff(&general, &nil.report.ric) <= 1e-8);
        let oracle = common::ricci_of(&a);
        let ours = DMatrix::from_fn(n, n, |i, j| general[(i, j)]);
        prop_assert!((oracle - ours).amax() <= 1e-8 * general.max_abs().max(1.0));
        let (t1, t2) = (nil.j1.trace(), nil.j2.trace());
        prop_assert!((t1 - t2).abs() <= 1e-9 * t1.abs().max(1.0));
    }

    #[test]
    fn invariant_operators_match_the_nilpotent_route(seed in any::<u64>(), n in 2usize..=6) {
        let tol = Tolerance::default();
        let a = random_metric_lie::<Rational>(seed, n);
        let endos = structure_endos(&a, &a.lie.derived_ideal(&tol), &tol).unwrap();
        let (j1, j2) = invariant_operators(&a, &endos);
        let nil = ricci_nilpotent(&a, &tol).unwrap();
        prop_assert_eq!(j1, nil.j1);
        prop_assert_eq!(j2, nil.j2);
    }

    #[test]
    fn decompose_inverts_central_extension(seed in any::<u64>(), m in 2usize..=5, p in 1usize..=2) {
        let tol = Tolerance::default();
        if let Some(s) = random_extension::<Rational>(seed, m, p) {
            let t = decompose(&s.h, &tol).unwrap();
            prop_assert!(t.rigid);
            let back = t.reconstruct(&tol).unwrap();
            let moved = nilcurv::change_basis(&s.h, &t.embedding, &tol).unwrap();
            prop_assert_eq!(back, moved);
            let via = ricci_via_attributes(&t, &tol).unwrap();
            prop_assert_eq!(via.ric, ricci_nilpotent(&s.h, &tol).unwrap().report.ric);
            let om = om_and_derivation(&s.g, &s.omega);
            prop_assert!(om.derivation_residual.is_zero() || !om.om_residual.is_zero());
        }
    }

    #[test]
    fn attribute_route_matches_in_floats(seed in any::<u64>(), m in 2usize..=6, p in 1usize..=2) {
        let tol = Tolerance::default();
        if let Some(s) = random_extension::<f64>(seed, m, p) {
            let t = decompose(&s.h, &tol).unwrap();
            let via = ricci_via_attributes(&t, &tol).unwrap().ric;
            let direct = ricci_nilpotent(&s.h, &tol).unwrap().report.ric;
            prop_assert!(rel_diff(&via, &direct) <= 1e-9);
        }
    }

    #[test]
    fn es_system_agrees_with_einstein_check(seed in any::<u64>(), m in 2usize..=5, p in 1usize..=2) {
        let tol = Tolerance::default();
        if let Some(s) = random_extension::<Rational>(seed, m, p) {
            let t = decompose(&s.h, &tol).unwrap();
            let v = einstein_check(&s.h, &EinsteinMode::Einstein, &tol);
            let es = einstein_conditions_es(&t, &v.lambda, &tol);
            prop_assert_eq!(es.max().is_zero(), v.holds);
            let st = einstein_structure(&s.h, &tol).unwrap();
            prop_assert!(st.lambda_implication_holds(&tol));
            prop_assert!(st.derived_implication_holds(&tol));
        }
    }

    #[test]
    fn weyl_inequality_on_random_pairs(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sym = || {
            let x = Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0));
            x.add(&x.transpose()).scale(&0.5)
        };
        let (a, b) = (sym(), sym());
        for k in 1..=n {
            let (lo, mid, hi) = weyl_bounds(&a, &b, k).unwrap();
            prop_assert!(lo <= mid + 1e-10 && mid <= hi + 1e-10, "k = {k}: {lo} {mid} {hi}");
        }
    }

    #[test]
    fn squares_of_skew_matrices_pair_up(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0));
        let k = x.sub(&x.transpose());
        let ev = sym_eigenvalues(&k.matmul(&k));
        let scale = k.max_abs().powi(2).max(1.0);
        prop_assert!(ev.iter().all(|&l| l <= 1e-10 * scale));
        for pair in ev.chunks(2).filter(|c| c.len() == 2) {
            prop_assert!((pair[0] - pair[1]).abs() <= 1e-8 * scale, "{ev:?}");
        }
    }

    #[test]
    fn adapted_basis_is_orthonormal(seed in any::<u64>(), m in 3usize..=6) {
        // K_i = α_i (u₀ ∧ u_i) for a random orthonormal frame.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..m);
        let x = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..=1.0));
        let frame = x.qr().q();
        let col = |c: usize| -> Vec<f64> { frame.column(c).iter().copied().collect() };
        let ks: Vec<Mat<f64>> = (1..=n)
            .map(|i| {
                let alpha = rng.random_range(0.5..=2.0);
                let (u0, ui) = (col(0), col(i));
                Mat::from_fn(m, m, |r, c| alpha * (ui[r] * u0[c] - u0[r] * ui[c]))
            })
            .collect();
        let b = genlem1_basis(&ks, 1e-9).unwrap();
        prop_assert!(b.gram_residual() <= 1e-10);
        prop_assert!(b.action_residual(&ks) <= 1e-9);
        prop_assert_eq!(b.u.len() + b.v.len() + 1, m);
    }

    #[test]
    fn explicit_lemmaimp_solutions_solve_exactly(
        a in 1i64..=6, b in 1i64..=6, c in 1i64..=5, d in 1i64..=5,
        eps in prop::bool::ANY, tau in prop::bool::ANY,
    ) {
        prop_assume!(a != b);
        let sign = |s: bool| if s { Sign::Plus } else { Sign::Minus };
        // Pythagorean legs scaled by c/d.
        let scale = <Rational as Scalar>::from_ratio(c, d);
        let x = q(a * a - b * b) * scale.clone();
        let y = q(2 * a * b) * scale;
        let t = LemmaimpTriple::explicit(x, y, sign(eps), sign(tau)).unwrap();
        prop_assert!(lemmaimp_residual(&t).is_zero());
    }

    #[test]
    fn explicit_lemmaimp_solutions_in_floats(x in 0.05f64..5.0, y in 0.05f64..5.0, eps in prop::bool::ANY) {
        let sign = if eps { Sign::Plus } else { Sign::Minus };
        let t = LemmaimpTriple::explicit(x, y, sign, sign.flip()).unwrap();
        prop_assert!(lemmaimp_residual(&t) <= 1e-12 * (x * x + y * y).max(1.0));
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn pack_inverts_unpack_on_random_extensions(seed in any::<u64>(), idx in 0usize..64) {
        let Some(s) = random_extension::<f64>(seed, 4, 1) else { return Ok(()); };
        let mut slots = vec![Slot::MetricScale(0), Slot::MetricScale(4), Slot::Lambda];
        let mut bounds = vec![(0.5, 2.0), (0.5, 2.0), (-1.0, 1.0)];
        if let Some(&(i, j, k, _)) = s.h.lie.entries().first() {
            slots.push(Slot::Bracket(i, j, k));
            bounds.push((-2.0, 2.0));
        }
        let p = SearchProblem::new(Base::Algebra(s.h), slots, bounds, ResidualKind::EsSystem).unwrap();
        let x = random_start(&p.bounds, seed, idx);
        let back = p.pack(&p.unpack(&x).unwrap());
        for (u, v) in x.iter().zip(&back) {
            prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0), "{x:?} vs {back:?}");
        }
        let e = p.evaluate(&x);
        prop_assert!(e.value.is_finite() && e.value >= 0.0);
    }
}
