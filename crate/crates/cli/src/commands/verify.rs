//! Every checkable claim, one report line each.

use nilcurv::attributes::{decompose, einstein_conditions_es, quasi_einstein_check, ricci_via_attributes};
use nilcurv::curvature::{einstein_check, ricci_general, ricci_nilpotent, EinsteinMode};
use nilcurv::families::*;
use nilcurv::matlemmas::{lemmaimp_residual, LemmaimpTriple};
use nilcurv::matrix::unit;
use nilcurv::sampling::{random_extension, random_metric_lie};
use nilcurv::{change_basis, Mat, MetricLieAlgebra, MetricTensor, Rational, Scalar, Tolerance};

use crate::commands::{lemma, search};
use crate::error::Result;
use crate::report::{number, Check};

/// The `k = 2` search size of the full run and of `--quick`.
pub const K2_RESTARTS: usize = 200;
pub const K2_RESTARTS_QUICK: usize = 20;
/// Einstein constant of `conti8`, frozen at first computation.
pub const CONTI8_LAMBDA: f64 = 0.5;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VerifyOptions {
    /// Replaces every claim's own threshold.
    pub tol: Option<f64>,
    pub quick: bool,
}

struct Ctx {
    opts: VerifyOptions,
}

impl Ctx {
    fn thr(&self, default: f64) -> f64 {
        self.opts.tol.unwrap_or(default)
    }

    fn tol(&self) -> Tolerance {
        Tolerance::new(self.opts.tol.unwrap_or(nilcurv::scalar::DEFAULT_REL_TOL))
    }
}

/// Threshold claim on a worst-case value.
fn bounded(name: &str, worst: f64, thr: f64, cases: usize) -> Check {
    let ok = worst <= thr;
    Check::new(name, if ok { "pass" } else { "fail" }, ok)
        .residual(&worst)
        .detail("threshold", number(thr))
        .detail("cases", cases)
}

fn q(a: i64, b: i64) -> Rational {
    Rational::from_ratio(a, b)
}

fn rel_diff(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    a.max_abs_diff(b) / a.max_abs().max(b.max_abs()).max(1.0)
}

fn ricci_flat_claims(cx: &Ctx, out: &mut Vec<Check>) -> Result<()> {
    let thr = cx.thr(1e-10);
    for (label, alpha) in [("1/2", 0.5), ("1", 1.0), ("2", 2.0)] {
        let a = make_l6_19(alpha)?;
        let worst = ricci_general(&a).ric.max_abs();
        out.push(bounded(&format!("ricci_flat.l6_19[alpha={label}]"), worst, thr, 1));
    }
    for (label, r, a) in [("1/4,1", 0.25, 1.0), ("1/2,1", 0.5, 1.0), ("3/4,2", 0.75, 2.0)] {
        let h = make_dim7_147e(r, a)?;
        let worst = ricci_general(&h).ric.max_abs();
        out.push(bounded(&format!("ricci_flat.147e[r,a={label}]"), worst, thr, 1));
    }
    Ok(())
}

fn dual_route_claims(cx: &Ctx, out: &mut Vec<Check>) -> Result<()> {
    let tol = cx.tol();
    let mut worst: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    for i in 0..100u64 {
        let a = random_metric_lie::<f64>(i, 3 + (i as usize) % 6);
        let nil = ricci_nilpotent(&a, &tol)?;
        worst = worst.max(rel_diff(&ricci_general(&a).ric, &nil.report.ric));
        let (t1, t2) = (nil.j1.trace(), nil.j2.trace());
        worst_trace = worst_trace.max((t1 - t2).abs() / t1.abs().max(1.0));
    }
    out.push(bounded("ricci_routes.float", worst, cx.thr(1e-8), 100));
    let mut mismatches = 0;
    for i in 0..20u64 {
        let a = random_metric_lie::<Rational>(1000 + i, 3 + (i as usize) % 4);
        if ricci_general(&a).ric != ricci_nilpotent(&a, &tol)?.report.ric {
            mismatches += 1;
        }
    }
    out.push(
        Check::new("ricci_routes.exact", if mismatches == 0 { "pass" } else { "fail" }, mismatches == 0)
            .detail("cases", 20)
            .detail("mismatches", mismatches),
    );
    out.push(bounded("trace_identity", worst_trace, cx.thr(1e-10), 100));
    Ok(())
}

/// Family instances with a nondegenerate Euclidean center.
fn decomposable_families() -> Result<Vec<(String, MetricLieAlgebra<f64>)>> {
    let mut v = vec![
        ("l6_19".to_string(), make_l6_19(1.0)?),
        ("147e".to_string(), make_dim7_147e(0.5, 1.0)?),
        ("conti8".to_string(), make_conti8()?),
        ("example7".to_string(), make_example7()?),
        ("example10".to_string(), make_example10(1.0, 2.0)?),
        ("three_step_dim7".to_string(), make_three_step_dim7(1.0, 1.0, Sign::Plus, Sign::Plus)?),
    ];
    for (variant, name) in [(Variant::A, "three_step_dim6_a"), (Variant::B, "three_step_dim6_b")] {
        v.push((name.to_string(), make_three_step_dim6(1.5, variant, Sign::Minus)?));
    }
    Ok(v)
}

fn attribute_claims(cx: &Ctx, out: &mut Vec<Check>) -> Result<()> {
    let tol = cx.tol();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut subjects: Vec<MetricLieAlgebra<f64>> = decomposable_families()?.into_iter().map(|f| f.1).collect();
    subjects.extend((0..50u64).filter_map(|s| random_extension::<f64>(s, 2 + (s as usize) % 5, 1 + (s as usize) % 2).map(|e| e.h)));
    for h in &subjects {
        let t = decompose(h, &tol)?;
        let via = ricci_via_attributes(&t, &tol)?.ric;
        worst = worst.max(rel_diff(&via, &ricci_nilpotent(h, &tol)?.report.ric));
        cases += 1;
    }
    out.push(bounded("attributes_ricci", worst, cx.thr(1e-9), cases));

    let mut failures = 0;
    let mut trips = 0;
    for s in 0..50u64 {
        let Some(e) = random_extension::<Rational>(s, 2 + (s as usize) % 4, 1 + (s as usize) % 2) else {
            continue;
        };
        let t = decompose(&e.h, &tol)?;
        if t.reconstruct(&tol)? != change_basis(&e.h, &t.embedding, &tol)? {
            failures += 1;
        }
        trips += 1;
    }
    out.push(
        Check::new("attributes_round_trip", if failures == 0 { "pass" } else { "fail" }, failures == 0)
            .detail("cases", trips)
            .detail("mismatches", failures),
    );
    Ok(())
}

/// Metric rescaled by `1.1²` along coordinate `i`.
fn stretched(h: &MetricLieAlgebra<f64>, i: usize) -> Result<MetricLieAlgebra<f64>> {
    let n = h.dim();
    let d = Mat::from_fn(n, n, |r, c| if r != c { 0.0 } else if r == i { 1.1 } else { 1.0 });
    let g = d.matmul(h.metric.matrix()).matmul(&d);
    Ok(MetricLieAlgebra::new(h.lie.clone(), MetricTensor::new(g, &Tolerance::default())?)?)
}

fn es_claims(cx: &Ctx, out: &mut Vec<Check>) -> Result<()> {
    let tol = cx.tol();
    let thr = cx.thr(1e-9);
    let families = decomposable_families()?;
    let mut subjects: Vec<MetricLieAlgebra<f64>> = families.iter().map(|f| f.1.clone()).collect();
    let mut negatives = 0;
    'outer: for (_, h) in &families {
        for i in 0..2 {
            if negatives == 20 {
                break 'outer;
            }
            subjects.push(stretched(h, i)?);
            negatives += 1;
        }
    }
    // Fill up to 20 negatives with further coordinates.
    let mut i = 2;
    while negatives < 20 {
        for (_, h) in &families {
            if negatives < 20 && i < h.dim() {
                subjects.push(stretched(h, i)?);
                negatives += 1;
            }
        }
        i += 1;
    }
    let mut disagreements = 0;
    let mut einstein_count = 0;
    for h in &subjects {
        let t = decompose(h, &tol)?;
        let v = einstein_check(h, &EinsteinMode::Einstein, &tol);
        let es = einstein_conditions_es(&t, &v.lambda, &tol);
        let ein = v.residual <= thr;
        if ein {
            einstein_count += 1;
        }
        if (es.max() <= thr) != ein {
            disagreements += 1;
        }
    }
    let ok = disagreements == 0;
    out.push(
        Check::new("es_equivalence", if ok { "pass" } else { "fail" }, ok)
            .detail("cases", subjects.len())
            .detail("perturbed", negatives)
            .detail("einstein", einstein_count)
            .detail("disagreements", disagreements),
    );
    Ok(())
}

fn quasi_einstein_claims(cx: &Ctx, out: &mut Vec<Check>) -> Result<()> {
    let tol = cx.tol();
    let mut instances = Vec::new();
    for (alpha, eps, sign) in [
        (1.0, Sign::Plus, Sign::Plus),
        (2.0, Sign::Minus, Sign::Minus),
        (-1.0 / 3.0, Sign::Plus, Sign::Minus),
        (2.5, Sign::Minus, Sign::Plus),
        (7.0, Sign::Plus, Sign::Plus),
    ] {
        instances.push(("qe_dim5", make_qe_dim5(alpha, eps, sign)?));
    }
    for (a2, a3, eps, sign) in [
        (3.0, 4.0, Sign::Minus, Sign::Plus),
        (1.0, 1.0, Sign::Plus, Sign::Plus),
        (5.0, 12.0, Sign::Plus, Sign::Minus),
        (-2.0, 0.5, Sign::Minus, Sign::Minus),
        (0.6, 0.8, Sign::Plus, Sign::Plus),
    ] {
        instances.push(("qe_dim6", make_qe_dim6(a2, a3, eps, sign)?));
    }
    for name in ["qe_dim5", "qe_dim6"] {
        let mut pass = 0;
        let mut perturbed = 0;
        let mut undetected = 0;
        let mut total = 0;
        for (_, (g, omega)) in instances.iter().filter(|i| i.0 == name) {
            total += 1;
            if quasi_einstein_check(g, omega, &0.0, &tol).holds {
                pass += 1;
            }
            let m = g.dim();
            for l in 0..omega.p() {
                for a in 0..m {
                    for b in 0..m {
                        let mut o = omega.clone();
                        o.s[l][(a, b)] += 0.1;
                        perturbed += 1;
                        if quasi_einstein_check(g, &o, &0.0, &tol).holds {
                            undetected += 1;
                        }
                    }
                }
            }
        }
        let ok = pass == total && undetected == 0;
        out.push(
            Check::new(format!("quasi_einstein.{name}"), if ok { "pass" } else { "fail" }, ok)
                .lambda(&0.0)
                .detail("points", total)
                .detail("passing_points", pass)
                .detail("perturbations", perturbed)
                .detail("undetected_perturbations", undetected),
        );
    }
    Ok(())
}

fn example_claims(cx: &Ctx, out: &mut Vec<Check>) -> Result<()> {
    let tol = cx.tol();
    let c = make_conti8::<f64>()?;
    let v = einstein_check(&c, &EinsteinMode::Einstein, &tol);
    let thr = cx.thr(1e-9);
    let ok = v.residual <= thr && (v.lambda - CONTI8_LAMBDA).abs() <= thr && v.lambda.abs() > 0.0;
    out.push(
        Check::new("einstein.conti8", if ok { "pass" } else { "fail" }, ok)
            .residual(&v.residual)
            .lambda(&v.lambda)
            .detail("baseline_lambda", number(CONTI8_LAMBDA))
            .detail("threshold", number(thr)),
    );

    let thr = cx.thr(1e-10);
    let e7 = make_example7::<f64>()?;
    let z = e7.lie.center(&tol);
    let mut diff = unit::<f64>(7, 4);
    diff[5] = -1.0;
    let center_ok = z.dim() == 2 && z.contains(&unit(7, 6), &tol) && z.contains(&diff, &tol);
    let worst = ricci_general(&e7).ric.max_abs();
    let ok = worst <= thr && center_ok;
    out.push(
        Check::new("ricci_flat.example7", if ok { "pass" } else { "fail" }, ok)
            .residual(&worst)
            .detail("center_dim", z.dim())
            .detail("center_matches", center_ok),
    );
    for (p, r) in [(1.0, 1.0), (1.0, 2.0)] {
        let h = make_example10(p, r)?;
        let z = h.lie.center(&tol);
        let center_ok = z.dim() == 4 && (6..10).all(|i| z.contains(&unit(10, i), &tol));
        let worst = ricci_general(&h).ric.max_abs();
        let ok = worst <= thr && center_ok;
        out.push(
            Check::new(format!("ricci_flat.example10[p,r={p},{r}]"), if ok { "pass" } else { "fail" }, ok)
                .residual(&worst)
                .detail("center_dim", z.dim())
                .detail("center_matches", center_ok),
        );
    }
    Ok(())
}

fn lemma_claims(cx: &Ctx, out: &mut Vec<Check>) -> Result<()> {
    out.push(lemma::weyl(1000, 0, cx.thr(1e-10)));

    let exact = LemmaimpTriple::explicit(q(3, 1), q(4, 1), Sign::Plus, Sign::Plus)?;
    let r = lemmaimp_residual(&exact);
    out.push(
        Check::new("lemmaimp_explicit.exact", if r.is_zero() { "pass" } else { "fail" }, r.is_zero())
            .residual(&r)
            .detail("alpha1", "3")
            .detail("alpha2", "4"),
    );
    let mut worst: f64 = 0.0;
    for (a1, a2) in [(3.0, 4.0), (1.0, 1.0), (0.3, 2.5)] {
        for eps in [Sign::Plus, Sign::Minus] {
            for sign in [Sign::Plus, Sign::Minus] {
                worst = worst.max(lemmaimp_residual(&LemmaimpTriple::explicit(a1, a2, eps, sign)?));
            }
        }
    }
    out.push(bounded("lemmaimp_explicit.float", worst, cx.thr(1e-12), 12));

    let mut k1 = lemma::imp_search(1, 50, 0)?;
    k1.name = "lemmaimp_search.k1".into();
    out.push(k1);
    let restarts = if cx.opts.quick { K2_RESTARTS_QUICK } else { K2_RESTARTS };
    let mut k2 = lemma::imp_search(2, restarts, 7)?;
    k2.name = "lemmaimp_search.k2_floor".into();
    out.push(k2);
    Ok(())
}

fn lambda_sign_claim(out: &mut Vec<Check>) -> Result<()> {
    let parts = search::lambda_sign_scan(50, 1)?;
    let min = parts
        .iter()
        .filter_map(|c| c.lambda.as_ref().and_then(|v| v.as_f64()))
        .fold(f64::INFINITY, f64::min);
    let near: u64 = parts.iter().filter_map(|c| c.details.get("near_solutions")?.as_u64()).sum();
    let ok = parts.iter().all(|c| c.passed);
    let mut c = Check::new("lambda_sign.three_step", if ok { "pass" } else { "fail" }, ok)
        .detail("trials", 50)
        .detail("templates", parts.len())
        .detail("near_solutions", near);
    if min.is_finite() {
        c = c.lambda(&min);
    }
    out.push(c);
    Ok(())
}

fn basis_change_claims(cx: &Ctx, out: &mut Vec<Check>) -> Result<()> {
    let tol = cx.tol();
    let thr = cx.thr(1e-12);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for alpha in [0.5, 1.0, 2.0] {
        for sign in [Sign::Plus, Sign::Minus] {
            let h = make_three_step_dim6(alpha, Variant::A, sign)?;
            let f = change_basis(&h, &l6_19_substitution(alpha, sign), &tol)?;
            worst = worst.max(algebra_diff(&f, &make_l6_19(alpha)?));
            cases += 1;
        }
    }
    out.push(bounded("basis_change.l6_19", worst, thr, cases));

    let mut worst: f64 = 0.0;
    let mut r_err: f64 = 0.0;
    cases = 0;
    for (a2, a3) in [(1.0, 1.0), (3.0, 4.0), (0.5, -2.0)] {
        for eps in [Sign::Plus, Sign::Minus] {
            for sign in [Sign::Plus, Sign::Minus] {
                let h = make_three_step_dim7(a2, a3, eps, sign)?;
                let (sub, r, a) = dim7_147e_substitution(a2, a3, eps, sign)?;
                let f = change_basis(&h, &sub, &tol)?;
                worst = worst.max(algebra_diff(&f, &make_dim7_147e(r, a)?));
                r_err = r_err.max((r - a2 * a2 / (a2 * a2 + a3 * a3)).abs());
                cases += 1;
            }
        }
    }
    out.push(bounded("basis_change.147e", worst.max(r_err), thr, cases));
    Ok(())
}

fn algebra_diff(a: &MetricLieAlgebra<f64>, b: &MetricLieAlgebra<f64>) -> f64 {
    let n = a.dim();
    let mut worst = a.metric.matrix().max_abs_diff(b.metric.matrix());
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                worst = worst.max((a.lie.structure(i, j, k) - b.lie.structure(i, j, k)).abs());
            }
        }
    }
    worst
}

pub fn verify_paper(opts: VerifyOptions) -> Result<Vec<Check>> {
    let cx = Ctx { opts };
    let mut out = Vec::new();
    ricci_flat_claims(&cx, &mut out)?;
    dual_route_claims(&cx, &mut out)?;
    attribute_claims(&cx, &mut out)?;
    es_claims(&cx, &mut out)?;
    quasi_einstein_claims(&cx, &mut out)?;
    example_claims(&cx, &mut out)?;
    lemma_claims(&cx, &mut out)?;
    lambda_sign_claim(&mut out)?;
    basis_change_claims(&cx, &mut out)?;
    Ok(out)
}
