use nilcurv::families::{make_example10, make_example7, make_three_step_dim6, make_three_step_dim7, Sign, Variant};
use nilcurv::search::{lambda_sign_problem, scan_lambda_sign, MetricFreedom, OptimizerConfig, NEAR_SOLUTION};
use nilcurv::MetricLieAlgebra;

use crate::error::Result;
use crate::report::{number, Check};

/// Slack allowed below zero for a near-solution's λ.
pub const LAMBDA_SLACK: f64 = 1e-6;

/// The 3-step Ricci-flat algebras used as starting shapes for the λ-sign scan.
pub fn three_step_templates() -> Result<Vec<(String, MetricLieAlgebra<f64>)>> {
    Ok(vec![
        ("three_step_dim6_a".into(), make_three_step_dim6(1.0, Variant::A, Sign::Plus)?),
        ("three_step_dim6_b".into(), make_three_step_dim6(2.0, Variant::B, Sign::Minus)?),
        ("three_step_dim7".into(), make_three_step_dim7(1.0, 2.0, Sign::Plus, Sign::Minus)?),
        ("example7".into(), make_example7()?),
        ("example10".into(), make_example10(1.0, 1.0)?),
    ])
}

/// Per-axis rescalings of the template metric in `[1/2, 2]`, λ in `[−2, 2]`.
pub fn lambda_sign(name: &str, template: &MetricLieAlgebra<f64>, trials: usize, seed: u64) -> Result<Check> {
    let p = lambda_sign_problem(template, MetricFreedom::PerAxis, (0.5, 2.0), (-2.0, 2.0))?;
    let s = scan_lambda_sign(&p, trials, seed, &OptimizerConfig::default())?;
    let ok = s.nonnegative(LAMBDA_SLACK);
    let mut c = Check::new(
        format!("lambda_sign[{name}]"),
        if ok { "nonnegative" } else { "negative_lambda" },
        ok,
    )
    .detail("trials", trials)
    .detail("seed", seed)
    .detail("near_solutions", s.near_solutions.len())
    .detail("near_threshold", number(NEAR_SOLUTION));
    if let Some(l) = s.min_lambda {
        c = c.lambda(&l);
    }
    if let Some(l) = s.max_lambda {
        c = c.detail("max_lambda", number(l));
    }
    Ok(c)
}

/// Splits `trials` round-robin over the 3-step templates; template `t` uses
/// seed `seed + t`.
pub fn lambda_sign_scan(trials: usize, seed: u64) -> Result<Vec<Check>> {
    let templates = three_step_templates()?;
    let n = templates.len();
    templates
        .iter()
        .enumerate()
        .filter_map(|(t, (name, h))| {
            let share = trials / n + usize::from(t < trials % n);
            (share > 0).then(|| lambda_sign(name, h, share, seed.wrapping_add(t as u64)))
        })
        .collect()
}
