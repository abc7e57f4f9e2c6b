use nilcurv::families::{make_qe_dim6, Sign};
use nilcurv::matlemmas::{
    genlem0_verify, genlem1_basis, j_family, lemmaimp_residual, lemmaimp_search, weyl_fuzz, LemmaimpTriple,
};
use nilcurv::{Error, Mat, MetricLieAlgebra, Mode, Rational, Scalar, Tolerance};
use serde_json::Value;

use crate::error::Result;
use crate::format::{AnyDocument, FileScalar};
use crate::report::{number, Check};

/// Residual below which the `k = 1` search counts as solved.
pub const IMP_SOLVED: f64 = 1e-8;
/// Floor above which a `k ≥ 2` search counts as finding no solution.
pub const IMP_FLOOR: f64 = 1e-3;

pub fn weyl(pairs: usize, seed: u64, tol: f64) -> Check {
    let r = weyl_fuzz(pairs, seed);
    let ok = r.holds(tol);
    Check::new("weyl_inequalities", if ok { "hold" } else { "violated" }, ok)
        .residual(&r.worst_violation.max(0.0))
        .detail("pairs", r.pairs)
        .detail("checks", r.checks)
        .detail("seed", seed)
        .detail("worst_violation", number(r.worst_violation))
}

/// The skew family `J_i` of a float algebra, or of the default `qe_dim6`
/// instance.
fn family_source(doc: Option<&AnyDocument>) -> Result<MetricLieAlgebra<f64>> {
    Ok(match doc {
        Some(AnyDocument::Float(d)) => d.algebra.clone(),
        Some(AnyDocument::Rational(d)) => d.algebra.to_f64(),
        None => make_qe_dim6(1.0, 1.0, Sign::Plus, Sign::Plus)?.0,
    })
}

pub fn genlem0(doc: Option<&AnyDocument>, v: Option<Vec<f64>>, tol: f64) -> Result<Check> {
    let a = family_source(doc)?;
    let fam = j_family(&a, &Tolerance::default())?;
    let v = v.unwrap_or_else(|| vec![0.0; fam.m().saturating_sub(fam.n())]);
    let r = genlem0_verify(&fam, &v, tol);
    let verdict = match r.conclusions_hold {
        None => "hypothesis_fails",
        Some(true) => "conclusions_hold",
        Some(false) => "counterexample",
    };
    let mut c = Check::new("genlem0", verdict, !r.counterexample())
        .residual(&r.hypothesis_residual)
        .detail("m", fam.m())
        .detail("n", fam.n())
        .detail("ranks", Value::Array(r.ranks.iter().map(|&k| k.into()).collect()));
    if let Some(d) = r.additivity_defect {
        c = c.detail("additivity_defect", number(d));
    }
    Ok(c)
}

pub fn genlem1(doc: Option<&AnyDocument>, tol: f64) -> Result<Check> {
    let a = family_source(doc)?;
    let fam = j_family(&a, &Tolerance::default())?;
    let ks: Vec<Mat<f64>> = fam.mats()[1..].to_vec();
    Ok(match genlem1_basis(&ks, tol) {
        Ok(b) => {
            let (g, act) = (b.gram_residual(), b.action_residual(&ks));
            let ok = g <= tol && act <= tol;
            Check::new("genlem1", if ok { "adapted_basis" } else { "basis_defect" }, ok)
                .residual(&g.max(act))
                .detail("gram_residual", number(g))
                .detail("action_residual", number(act))
                .detail("alphas", Value::Array(b.alphas.iter().map(|&x| number(x)).collect()))
        }
        Err(Error::HypothesisViolated(why)) => Check::info("genlem1", "hypothesis_fails").detail("reason", why),
        Err(e) => return Err(e.into()),
    })
}

fn imp_check_in<T: FileScalar>(a1: T, a2: T, eps: Sign, sign: Sign, tol: f64) -> Result<Check> {
    let t = LemmaimpTriple::explicit(a1, a2, eps, sign)?;
    let r = lemmaimp_residual(&t);
    let scale = t.k_mat.max_abs().to_f64().powi(2).max(1.0);
    let ok = Tolerance::new(tol).is_zero(&r, scale);
    Ok(Check::new("lemmaimp_explicit", if ok { "solution" } else { "not_a_solution" }, ok)
        .residual(&r)
        .lambda(&t.alpha)
        .detail("mode", T::MODE.as_str()))
}

pub fn imp_check(a1: &Rational, a2: &Rational, eps: Sign, sign: Sign, mode: Mode, tol: f64) -> Result<Check> {
    match mode {
        Mode::Rational => imp_check_in(a1.clone(), a2.clone(), eps, sign, tol),
        Mode::Float => imp_check_in(a1.to_f64(), a2.to_f64(), eps, sign, tol),
    }
}

pub fn imp_search(k: usize, restarts: usize, seed: u64) -> Result<Check> {
    let s = lemmaimp_search(k, restarts, seed)?;
    let (verdict, ok) = if k == 1 {
        let ok = s.residual <= IMP_SOLVED;
        (if ok { "solved" } else { "not_solved" }, ok)
    } else {
        let ok = s.residual > IMP_FLOOR;
        (if ok { "floor" } else { "below_floor" }, ok)
    };
    Ok(Check::new(format!("lemmaimp_search_k{k}"), verdict, ok)
        .residual(&s.residual)
        .detail("k", k)
        .detail("restarts", restarts)
        .detail("seed", seed)
        .detail("best_restart", s.restart)
        .detail("alpha_sign", if s.branch.alpha_sign == Sign::Plus { "+" } else { "-" })
        .detail("reflect", s.branch.reflect)
        .detail("alpha", number(s.best.alpha)))
}
