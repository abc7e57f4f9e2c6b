use nilcurv::attributes::{
    d_operator_product, decompose, einstein_conditions_es, quasi_einstein_check, ricci_via_attributes, soliton_check,
};
use nilcurv::curvature::{einstein_check, ricci_general, ricci_nilpotent, EinsteinMode};
use nilcurv::pseudolinalg::signature;
use nilcurv::{central_extension, change_basis, Error, MetricLieAlgebra, Scalar, Tolerance};
use serde_json::Value;

use crate::error::Result;
use crate::format::{AnyDocument, Document, FileScalar};
use crate::report::Check;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    pub decompose: bool,
    pub soliton: bool,
}

pub fn run_checks(doc: &AnyDocument, opts: CheckOptions, tol: &Tolerance) -> Result<Vec<Check>> {
    match doc {
        AnyDocument::Rational(d) => checks(d, opts, tol),
        AnyDocument::Float(d) => checks(d, opts, tol),
    }
}

fn vector<T: FileScalar>(v: &[T]) -> Value {
    Value::Array(v.iter().map(FileScalar::encode).collect())
}

fn max_of<T: Scalar>(a: T, b: T) -> T {
    if a > b {
        a
    } else {
        b
    }
}

/// Structure, curvature and (optionally) attribute checks for one algebra.
fn algebra_checks<T: FileScalar>(prefix: &str, a: &MetricLieAlgebra<T>, tol: &Tolerance, out: &mut Vec<Check>) -> bool {
    let name = |s: &str| format!("{prefix}{s}");
    let scale = a.lie.scale().max(1.0);
    let jac = a.lie.jacobi_residual();
    let lie_ok = tol.is_zero(&jac, scale * scale);
    out.push(
        Check::new(name("jacobi"), if lie_ok { "lie_algebra" } else { "not_lie_algebra" }, lie_ok).residual(&jac),
    );
    if !lie_ok {
        return false;
    }
    let (neg, pos) = signature(&a.metric, tol).unwrap_or((0, 0));
    out.push(Check::info(name("metric"), format!("signature ({neg},{pos})")).detail("timelike", neg).detail("spacelike", pos));

    let series = match a.lie.lower_central_series(tol) {
        Ok(s) => s,
        Err(e) => {
            out.push(Check::new(name("nilpotency"), "not_nilpotent", false).detail("error", e.to_string()));
            return false;
        }
    };
    let dims: Vec<Value> = series.terms.iter().map(|s| s.dim().into()).collect();
    out.push(
        Check::info(name("nilpotency"), format!("{}-step", series.class()))
            .detail("class", series.class())
            .detail("series_dims", Value::Array(dims)),
    );

    let z = a.lie.center(tol);
    let nondeg = z.is_nondegenerate(&a.metric, tol);
    let mut c = Check::info(name("center"), if nondeg { "nondegenerate" } else { "degenerate" })
        .detail("dim", z.dim())
        .detail("basis", Value::Array(z.basis().iter().map(|v| vector(v)).collect()));
    if nondeg && !z.is_zero() {
        if let Ok((zn, zp)) = nilcurv::pseudolinalg::inertia(&z.restricted_metric(&a.metric), tol) {
            c = c.detail("timelike", zn).detail("spacelike", zp);
        }
    }
    out.push(c);

    let general = ricci_general(a);
    let nil = match ricci_nilpotent(a, tol) {
        Ok(n) => n,
        Err(e) => {
            out.push(Check::new(name("ricci_routes"), "not_applicable", false).detail("error", e.to_string()));
            return false;
        }
    };
    let ric_scale = general.ric.max_abs().to_f64().max(1.0);
    let diff = general.ric.max_abs_diff(&nil.report.ric);
    let agree = tol.is_zero(&diff, ric_scale);
    out.push(Check::new(name("ricci_routes"), if agree { "agree" } else { "disagree" }, agree).residual(&diff));

    let (t1, t2) = (nil.j1.trace(), nil.j2.trace());
    let tdiff = (t1.clone() - t2).abs();
    let tok = tol.is_zero(&tdiff, t1.to_f64().abs().max(1.0));
    out.push(
        Check::new(name("trace_identity"), if tok { "agree" } else { "disagree" }, tok)
            .residual(&tdiff)
            .detail("trace_j1", t1.encode()),
    );

    let flat = einstein_check(a, &EinsteinMode::RicciFlat, tol);
    let ein = einstein_check(a, &EinsteinMode::Einstein, tol);
    let verdict = if flat.holds {
        "ricci_flat"
    } else if ein.holds {
        "einstein"
    } else {
        "not_einstein"
    };
    out.push(
        Check::info(name("einstein"), verdict)
            .residual(&ein.residual)
            .lambda(&ein.lambda)
            .detail("scalar_curvature", general.scalar.encode())
            .detail("max_abs_ric", general.ric.max_abs().encode()),
    );
    true
}

fn attribute_checks<T: FileScalar>(
    prefix: &str,
    h: &MetricLieAlgebra<T>,
    opts: CheckOptions,
    tol: &Tolerance,
    out: &mut Vec<Check>,
) -> Result<()> {
    let name = |s: &str| format!("{prefix}{s}");
    let t = match decompose(h, tol) {
        Ok(t) => t,
        Err(e @ (Error::DegenerateCenter | Error::NonEuclideanCenter)) => return Err(e.into()),
        Err(e) => {
            out.push(Check::new(name("decompose"), "failed", false).detail("error", e.to_string()));
            return Ok(());
        }
    };
    out.push(
        Check::info(name("decompose"), if t.rigid { "rigid" } else { "not_rigid" })
            .detail("g_dim", t.g_dim())
            .detail("p", t.p()),
    );

    let back = t.reconstruct(tol)?;
    let moved = change_basis(h, &t.embedding, tol)?;
    let rt = {
        let s = moved.lie.scale().max(1.0);
        let d = max_of(
            moved.metric.matrix().max_abs_diff(back.metric.matrix()),
            structure_diff(&moved, &back),
        );
        (tol.is_zero(&d, s), d)
    };
    out.push(Check::new(name("round_trip"), if rt.0 { "identity" } else { "mismatch" }, rt.0).residual(&rt.1));

    if opts.decompose {
        let direct = ricci_nilpotent(h, tol)?.report.ric;
        let via = ricci_via_attributes(&t, tol)?.ric;
        let diff = direct.max_abs_diff(&via);
        let ok = tol.is_zero(&diff, direct.max_abs().to_f64().max(1.0));
        out.push(Check::new(name("attributes_ricci"), if ok { "agree" } else { "disagree" }, ok).residual(&diff));

        let ein = einstein_check(h, &EinsteinMode::Einstein, tol);
        let es = einstein_conditions_es(&t, &ein.lambda, tol);
        let scale = t.g.lie.scale().max(1.0).powi(2);
        let es_holds = es.holds(tol, scale);
        out.push(
            Check::new(name("es_system"), if es_holds { "holds" } else { "fails" }, es_holds == ein.holds)
                .residual(&es.max())
                .lambda(&ein.lambda)
                .detail("ricci_g", es.ricci_g.encode())
                .detail("mixed", es.mixed.encode())
                .detail("center", es.center.encode())
                .detail("einstein", ein.holds),
        );
    }

    if opts.soliton {
        match soliton_check(&t, tol) {
            None => out.push(Check::info(name("soliton"), "not_applicable")),
            Some(v) => {
                let mut c = Check::info(name("soliton"), if v.holds { "soliton" } else { "not_soliton" })
                    .residual(&v.residual)
                    .lambda(&v.lambda);
                if let Some(d) = &v.derivation_residual {
                    c = c.detail("derivation_residual", d.encode());
                }
                out.push(c);
            }
        }
    }
    Ok(())
}

fn structure_diff<T: Scalar>(a: &MetricLieAlgebra<T>, b: &MetricLieAlgebra<T>) -> T {
    let n = a.dim();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                worst = max_of(worst, (a.lie.structure(i, j, k) - b.lie.structure(i, j, k)).abs());
            }
        }
    }
    worst
}

fn checks<T: FileScalar>(d: &Document<T>, opts: CheckOptions, tol: &Tolerance) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let ok = algebra_checks("", &d.algebra, tol, &mut out);
    let Some(omega) = &d.cocycle else {
        if ok && (opts.decompose || opts.soliton) {
            attribute_checks("", &d.algebra, opts, tol, &mut out)?;
        }
        return Ok(out);
    };
    if !ok {
        return Ok(out);
    }

    let g = &d.algebra;
    let m = g.dim();
    let scale = g.lie.scale().max(1.0) * omega.s.iter().map(|s| s.max_abs().to_f64()).fold(1.0, f64::max);
    let res = omega.cocycle_residual(&g.lie, &g.metric);
    let is_cocycle = tol.is_zero(&res, scale * scale);
    out.push(Check::new("cocycle", if is_cocycle { "cocycle" } else { "not_cocycle" }, is_cocycle).residual(&res));
    if !is_cocycle {
        return Ok(out);
    }

    // λ from the trace of Ric_g − ½D.
    let ric_g = nilcurv::curvature::ricci(g, tol).ric_op;
    let half_d = d_operator_product(omega).scale(&T::from_ratio(1, 2));
    let lambda = ric_g.sub(&half_d).trace() / T::from_i64(m as i64);
    let qe = quasi_einstein_check(g, omega, &lambda, tol);
    out.push(
        Check::info("quasi_einstein", if qe.holds { "quasi_einstein" } else { "not_quasi_einstein" })
            .residual(&max_of(qe.ricci_residual.clone(), qe.trace_residual.clone()))
            .lambda(&lambda)
            .detail("ricci_residual", qe.ricci_residual.encode())
            .detail("trace_residual", qe.trace_residual.encode())
            .detail("rigid", qe.rigid),
    );

    let ext = central_extension(g, omega, tol)?;
    let h = ext.algebra;
    out.push(
        Check::info("extension", format!("dim {}", h.dim()))
            .detail("rigid", ext.rigid)
            .detail("p", omega.p()),
    );
    if algebra_checks("extension.", &h, tol, &mut out) && (opts.decompose || opts.soliton) {
        attribute_checks("extension.", &h, opts, tol, &mut out)?;
    }
    Ok(out)
}
