//! Seeded multi-start Nelder–Mead over parameterised metrics, structure
//! constants and the `(K, A, P)` system.
//!
//! Random starts come from `ChaCha8Rng::seed_from_u64(seed)` with
//! `set_stream(restart_index)`, drawn uniformly inside the bounds, so any
//! ChaCha8 implementation reproduces them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::attributes::{decompose, einstein_conditions_es, quasi_einstein_check};
use crate::curvature::ricci_general;
use crate::error::{Error, Result};
use crate::liealg::{CocycleData, MetricLieAlgebra};
use crate::matlemmas::{LemmaimpBranch, LemmaimpTriple};
use crate::matrix::Mat;
use crate::pseudolinalg::MetricTensor;
use crate::scalar::Tolerance;

/// Objective value for infeasible points. Feasible values are capped below it.
pub const PENALTY: f64 = 1e100;
const FEASIBLE_CAP: f64 = 1e99;

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub max_evals: usize,
    /// Stop when every vertex is within this ∞-distance of the best one.
    pub diameter_tol: f64,
    /// Also stop when `f_worst − f_best ≤ value_rel_tol · |f_best|`.
    pub value_rel_tol: f64,
    /// Initial simplex edge as a fraction of each box width.
    pub initial_step: f64,
    /// Fresh simplices built around the optimum after convergence.
    pub polish: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_evals: 100_000,
            diameter_tol: 1e-10,
            value_rel_tol: 1e-12,
            initial_step: 0.1,
            polish: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalOutcome {
    pub index: usize,
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

fn clamp(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, (lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(*lo, *hi);
    }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        PENALTY
    } else {
        v
    }
}

/// Bounded Nelder–Mead with dimension-adaptive coefficients. Points leaving
/// the box are projected back onto it.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], bounds: &[(f64, f64)], cfg: &OptimizerConfig) -> LocalOutcome {
    let n = x0.len();
    let counter = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        counter.set(counter.get() + 1);
        sanitize(f(x))
    };
    let mut best_x = x0.to_vec();
    clamp(&mut best_x, bounds);
    let mut best_v = eval(&best_x);
    if n == 0 {
        return LocalOutcome {
            index: 0,
            x: best_x,
            value: best_v,
            evaluations: 1,
            converged: true,
        };
    }
    let nf = n as f64;
    let (rho, chi, gamma, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    let mut converged = false;
    for _round in 0..=cfg.polish {
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(best_x.clone(), best_v)];
        for i in 0..n {
            let (lo, hi) = bounds[i];
            let mut y = best_x.clone();
            let step = cfg.initial_step * (hi - lo).max(1e-12);
            y[i] = if y[i] + step <= hi { y[i] + step } else { y[i] - step };
            clamp(&mut y, bounds);
            let v = eval(&y);
            simplex.push((y, v));
        }
        converged = false;
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let diameter = simplex[1..]
                .iter()
                .map(|(y, _)| y.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            let spread = simplex[n].1 - simplex[0].1;
            if diameter < cfg.diameter_tol || spread <= cfg.value_rel_tol * simplex[0].1.abs() {
                converged = true;
                break;
            }
            if counter.get() >= cfg.max_evals {
                break;
            }
            let mut centroid = vec![0.0; n];
            for (y, _) in &simplex[..n] {
                for (c, yi) in centroid.iter_mut().zip(y) {
                    *c += yi / nf;
                }
            }
            let worst = simplex[n].clone();
            let along = |t: f64| {
                let mut p: Vec<f64> = centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect();
                clamp(&mut p, bounds);
                p
            };
            let xr = along(rho);
            let vr = eval(&xr);
            if vr < simplex[0].1 {
                let xe = along(rho * chi);
                let ve = eval(&xe);
                simplex[n] = if ve < vr { (xe, ve) } else { (xr, vr) };
                continue;
            }
            if vr < simplex[n - 1].1 {
                simplex[n] = (xr, vr);
                continue;
            }
            let (xc, vc) = if vr < worst.1 {
                let xc = along(rho * gamma);
                let vc = eval(&xc);
                (xc, vc)
            } else {
                let xc = along(-gamma);
                let vc = eval(&xc);
                (xc, vc)
            };
            if vc < worst.1.min(vr) {
                simplex[n] = (xc, vc);
                continue;
            }
            let anchor = simplex[0].0.clone();
            for (y, v) in simplex[1..].iter_mut() {
                for (yi, ai) in y.iter_mut().zip(&anchor) {
                    *yi = ai + sigma * (*yi - ai);
                }
                *v = eval(y);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let improved = simplex[0].1 < best_v;
        if simplex[0].1 <= best_v {
            best_x = simplex[0].0.clone();
            best_v = simplex[0].1;
        }
        if counter.get() >= cfg.max_evals || (!improved && converged) {
            break;
        }
    }
    LocalOutcome {
        index: 0,
        x: best_x,
        value: best_v,
        evaluations: counter.get(),
        converged,
    }
}

/// Uniform start for restart `index`.
pub fn random_start(bounds: &[(f64, f64)], seed: u64, index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    bounds
        .iter()
        .map(|&(lo, hi)| if hi > lo { rng.random_range(lo..=hi) } else { lo })
        .collect()
}

/// Runs `restarts` local searches in parallel; `f` receives the restart
/// index. Outcomes come back in restart order.
pub fn minimize_fn<F>(f: F, bounds: &[(f64, f64)], restarts: usize, seed: u64, cfg: &OptimizerConfig) -> Vec<LocalOutcome>
where
    F: Fn(usize, &[f64]) -> f64 + Sync,
{
    (0..restarts)
        .into_par_iter()
        .map(|idx| {
            let x0 = random_start(bounds, seed, idx);
            let mut out = nelder_mead(|x| f(idx, x), &x0, bounds, cfg);
            out.index = idx;
            out
        })
        .collect()
}

/// Best outcome by `(value, index)`.
pub fn best_outcome(outcomes: &[LocalOutcome]) -> Option<&LocalOutcome> {
    outcomes
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value).then(a.index.cmp(&b.index)))
}

/// One free parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    /// Symmetric metric entry `g_ij = g_ji`.
    Metric(usize, usize),
    /// Factor `d_i` with `g_ab ↦ d_a d_b g_ab` relative to the base metric.
    MetricScale(usize),
    /// Overall factor `c` with `g ↦ c g`.
    MetricOverall,
    /// Structure constant `c_ij^k` with `i < j`.
    Bracket(usize, usize, usize),
    /// Entry `(i, j)` (`i < j`) of the values matrix of cocycle component `l`.
    Cocycle(usize, usize, usize),
    Lambda,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualKind {
    /// `‖Ric − λId‖_F²`.
    Einstein,
    /// Sum of squares of the three attribute conditions.
    EsSystem,
    /// Sum of squares of the quasi-Einstein residuals.
    QuasiEinstein,
    /// Sum of squares of both `(K, A, P)` equations.
    Lemmaimp,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Base {
    Algebra(MetricLieAlgebra<f64>),
    Extension {
        g: MetricLieAlgebra<f64>,
        omega: CocycleData<f64>,
    },
    Lemmaimp(LemmaimpBranch),
}

/// Concrete object described by a parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Algebra {
        algebra: MetricLieAlgebra<f64>,
        lambda: Option<f64>,
    },
    Extension {
        g: MetricLieAlgebra<f64>,
        omega: CocycleData<f64>,
        lambda: Option<f64>,
    },
    Lemmaimp(LemmaimpTriple<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub lambda: Option<f64>,
    pub feasible: bool,
}

impl Evaluation {
    fn infeasible() -> Self {
        Self {
            value: PENALTY,
            lambda: None,
            feasible: false,
        }
    }

    fn feasible(value: f64, lambda: Option<f64>) -> Self {
        if value.is_nan() {
            return Self::infeasible();
        }
        Self {
            value: value.min(FEASIBLE_CAP),
            lambda,
            feasible: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchProblem {
    pub base: Base,
    pub slots: Vec<Slot>,
    pub bounds: Vec<(f64, f64)>,
    pub kind: ResidualKind,
}

fn raw_metric(base: &Base) -> Option<(Mat<f64>, usize)> {
    match base {
        Base::Algebra(a) => Some((a.metric.matrix().clone(), a.dim())),
        Base::Extension { g, .. } => Some((g.metric.matrix().clone(), g.dim())),
        Base::Lemmaimp(_) => None,
    }
}

impl SearchProblem {
    pub fn new(base: Base, slots: Vec<Slot>, bounds: Vec<(f64, f64)>, kind: ResidualKind) -> Result<Self> {
        if slots.len() != bounds.len() {
            return Err(Error::SizeMismatch(format!("{} slots, {} bounds", slots.len(), bounds.len())));
        }
        if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| !(lo <= hi)) {
            return Err(Error::ParameterOutOfRange {
                name: "bounds",
                reason: format!("[{lo}, {hi}] is empty"),
            });
        }
        let n = match &base {
            Base::Algebra(a) => a.dim(),
            Base::Extension { g, .. } => g.dim(),
            Base::Lemmaimp(b) => {
                if !slots.is_empty() || kind != ResidualKind::Lemmaimp {
                    return Err(Error::HypothesisViolated(
                        "the (K, A, P) base has a fixed layout and residual".into(),
                    ));
                }
                let bounds = b.bounds();
                return Ok(Self { base, slots, bounds, kind });
            }
        };
        for s in &slots {
            let ok = match *s {
                Slot::Metric(i, j) => i < n && j < n,
                Slot::MetricScale(i) => i < n,
                Slot::MetricOverall => true,
                Slot::Bracket(i, j, k) => i < j && j < n && k < n,
                Slot::Cocycle(l, i, j) => match &base {
                    Base::Extension { omega, .. } => l < omega.p() && i < j && j < n,
                    _ => false,
                },
                Slot::Lambda => true,
            };
            if !ok {
                return Err(Error::HypothesisViolated(format!("slot {s:?} does not fit the base")));
            }
        }
        if slots.contains(&Slot::MetricOverall) && slots.iter().any(|s| matches!(s, Slot::MetricScale(_))) {
            return Err(Error::HypothesisViolated(
                "an overall metric factor cannot be combined with per-axis factors".into(),
            ));
        }
        let valid_kind = matches!(
            (&base, kind),
            (Base::Algebra(_), ResidualKind::Einstein | ResidualKind::EsSystem)
                | (Base::Extension { .. }, ResidualKind::QuasiEinstein)
        );
        if !valid_kind {
            return Err(Error::HypothesisViolated(format!("residual {kind:?} does not apply to this base")));
        }
        Ok(Self { base, slots, bounds, kind })
    }

    /// The `(K, A, P)` problem for one branch.
    pub fn lemmaimp(branch: LemmaimpBranch) -> Self {
        Self {
            bounds: branch.bounds(),
            base: Base::Lemmaimp(branch),
            slots: Vec::new(),
            kind: ResidualKind::Lemmaimp,
        }
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    /// Builds the object at `x`; fails when the metric is degenerate or the
    /// cocycle values are not skew.
    pub fn unpack(&self, x: &[f64]) -> Result<Instance> {
        if x.len() != self.len() {
            return Err(Error::SizeMismatch(format!("expected {} parameters, got {}", self.len(), x.len())));
        }
        let tol = Tolerance::default();
        if let Base::Lemmaimp(b) = &self.base {
            return Ok(Instance::Lemmaimp(b.triple(x)));
        }
        let (base_g, _) = raw_metric(&self.base).expect("metric base");
        let (mut lie, mut values) = match &self.base {
            Base::Algebra(a) => (a.lie.clone(), Vec::new()),
            Base::Extension { g, omega } => (g.lie.clone(), omega.values(&g.metric)),
            Base::Lemmaimp(_) => unreachable!(),
        };
        let mut g = base_g.clone();
        let mut scale = vec![1.0; g.nrows()];
        let mut lambda = None;
        let mut overall = 1.0;
        for (s, &v) in self.slots.iter().zip(x) {
            match *s {
                Slot::Metric(i, j) => {
                    g[(i, j)] = v;
                    g[(j, i)] = v;
                }
                Slot::MetricScale(i) => scale[i] = v,
                Slot::MetricOverall => overall = v,
                Slot::Bracket(i, j, k) => lie.set(i, j, k, v),
                Slot::Cocycle(l, i, j) => {
                    values[l][(i, j)] = v;
                    values[l][(j, i)] = -v;
                }
                Slot::Lambda => lambda = Some(v),
            }
        }
        let g = Mat::from_fn(g.nrows(), g.ncols(), |a, b| overall * scale[a] * scale[b] * g[(a, b)]);
        let metric = MetricTensor::new(g, &tol)?;
        let algebra = MetricLieAlgebra::new(lie, metric)?;
        Ok(match &self.base {
            Base::Algebra(_) => Instance::Algebra { algebra, lambda },
            Base::Extension { omega, .. } => {
                let omega = CocycleData::from_values(&algebra.metric, values, omega.z_metric.clone())?;
                Instance::Extension {
                    g: algebra,
                    omega,
                    lambda,
                }
            }
            Base::Lemmaimp(_) => unreachable!(),
        })
    }

    /// Reads the slot values back out of an instance.
    pub fn pack(&self, inst: &Instance) -> Vec<f64> {
        let (alg, omega, lambda) = match inst {
            Instance::Algebra { algebra, lambda } => (algebra, None, *lambda),
            Instance::Extension { g, omega, lambda } => (g, Some(omega), *lambda),
            Instance::Lemmaimp(t) => return pack_lemmaimp(t),
        };
        let (base_g, _) = raw_metric(&self.base).expect("metric base");
        let g = alg.metric.matrix();
        let values = omega.map(|o| o.values(&alg.metric));
        // Scale factors are recovered from diagonal ratios; they are only
        // well defined for nonzero base diagonals and positive factors.
        let factor = |i: usize| (g[(i, i)] / base_g[(i, i)]).sqrt();
        let overall = || {
            let (i, j) = (0..g.nrows())
                .flat_map(|i| (0..g.ncols()).map(move |j| (i, j)))
                .find(|&(i, j)| base_g[(i, j)] != 0.0)
                .expect("nonzero metric");
            g[(i, j)] / base_g[(i, j)]
        };
        self.slots
            .iter()
            .map(|s| match *s {
                Slot::Metric(i, j) => g[(i, j)],
                Slot::MetricScale(i) => factor(i),
                Slot::MetricOverall => overall(),
                Slot::Bracket(i, j, k) => alg.lie.structure(i, j, k),
                Slot::Cocycle(l, i, j) => values.as_ref().expect("extension")[l][(i, j)],
                Slot::Lambda => lambda.unwrap_or(0.0),
            })
            .collect()
    }

    /// Objective at `x`, with penalties for points outside the feasible set.
    pub fn evaluate(&self, x: &[f64]) -> Evaluation {
        if let Base::Lemmaimp(b) = &self.base {
            return Evaluation::feasible(b.objective(x), None);
        }
        let tol = Tolerance::default();
        let inst = match self.unpack(x) {
            Ok(i) => i,
            Err(_) => return Evaluation::infeasible(),
        };
        match inst {
            Instance::Algebra { algebra, lambda } => {
                let scale = algebra.lie.scale().max(1.0);
                if algebra.lie.jacobi_residual() > 1e-9 * scale * scale {
                    return Evaluation::infeasible();
                }
                match self.kind {
                    ResidualKind::Einstein => {
                        let r = ricci_general(&algebra);
                        let n = algebra.dim();
                        let lam = lambda.unwrap_or(r.lambda_star);
                        let value = r.ric_op.sub(&Mat::identity(n).scale(&lam)).frobenius_sq();
                        Evaluation::feasible(value, Some(lam))
                    }
                    ResidualKind::EsSystem => {
                        let attrs = match decompose(&algebra, &tol) {
                            Ok(t) => t,
                            Err(_) => return Evaluation::infeasible(),
                        };
                        let lam = lambda.unwrap_or_else(|| ricci_general(&algebra).lambda_star);
                        let es = einstein_conditions_es(&attrs, &lam, &tol);
                        let value = es.ricci_g.powi(2) + es.mixed.powi(2) + es.center.powi(2);
                        Evaluation::feasible(value, Some(lam))
                    }
                    _ => unreachable!("validated in new"),
                }
            }
            Instance::Extension { g, omega, lambda } => {
                let lam = lambda.unwrap_or(0.0);
                let v = quasi_einstein_check(&g, &omega, &lam, &tol);
                Evaluation::feasible(v.ricci_residual.powi(2) + v.trace_residual.powi(2), Some(lam))
            }
            Instance::Lemmaimp(_) => unreachable!(),
        }
    }

    /// Objective value alone; what the optimiser sees.
    pub fn einstein_residual(&self, x: &[f64]) -> f64 {
        self.evaluate(x).value
    }
}

fn pack_lemmaimp(t: &LemmaimpTriple<f64>) -> Vec<f64> {
    // The exponential map is not inverted; only `K` and the `α_i` are
    // recovered, followed by zeros for the generator.
    let n = 2 * t.k;
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(t.k_mat[(i, j)]);
        }
    }
    out.extend((0..n).map(|i| (-t.a[(i, i)]).sqrt()));
    out.extend(std::iter::repeat_n(0.0, n * (n - 1) / 2));
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    /// Objective re-evaluated at `params`.
    pub residual: f64,
    pub params: Vec<f64>,
    pub lambda: Option<f64>,
    pub feasible: bool,
    pub restart: usize,
    pub evaluations: usize,
    pub seed: u64,
    pub outcomes: Vec<LocalOutcome>,
}

pub fn minimize(p: &SearchProblem, restarts: usize, seed: u64, cfg: &OptimizerConfig) -> Result<SearchResult> {
    if restarts == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "restarts",
            reason: "must be at least 1".into(),
        });
    }
    let outcomes = minimize_fn(|_, x| p.einstein_residual(x), &p.bounds, restarts, seed, cfg);
    let best = best_outcome(&outcomes).expect("nonempty").clone();
    let e = p.evaluate(&best.x);
    Ok(SearchResult {
        residual: e.value,
        params: best.x,
        lambda: e.lambda,
        feasible: e.feasible,
        restart: best.index,
        evaluations: best.evaluations,
        seed,
        outcomes,
    })
}

/// How the metric of a template may vary in a λ-sign scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricFreedom {
    /// One factor per basis vector.
    PerAxis,
    /// A single overall factor.
    Overall,
}

/// Scaled template metric plus a free `λ`, es-system residual.
pub fn lambda_sign_problem(
    template: &MetricLieAlgebra<f64>,
    freedom: MetricFreedom,
    scale_range: (f64, f64),
    lambda_range: (f64, f64),
) -> Result<SearchProblem> {
    let n = template.dim();
    let mut slots: Vec<Slot> = match freedom {
        MetricFreedom::PerAxis => (0..n).map(Slot::MetricScale).collect(),
        MetricFreedom::Overall => vec![Slot::MetricOverall],
    };
    let mut bounds = vec![scale_range; slots.len()];
    slots.push(Slot::Lambda);
    bounds.push(lambda_range);
    SearchProblem::new(Base::Algebra(template.clone()), slots, bounds, ResidualKind::EsSystem)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NearSolution {
    pub trial: usize,
    pub residual: f64,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaScan {
    pub trials: usize,
    pub seed: u64,
    pub near_solutions: Vec<NearSolution>,
    pub min_lambda: Option<f64>,
    pub max_lambda: Option<f64>,
}

impl LambdaScan {
    /// Every near-solution has `λ ≥ −slack`.
    pub fn nonnegative(&self, slack: f64) -> bool {
        self.min_lambda.is_none_or(|l| l >= -slack)
    }
}

/// Residual below which a trial counts as a near-solution.
pub const NEAR_SOLUTION: f64 = 1e-6;

/// One seeded local search per trial; records `λ` at every near-solution.
pub fn scan_lambda_sign(p: &SearchProblem, trials: usize, seed: u64, cfg: &OptimizerConfig) -> Result<LambdaScan> {
    let r = minimize(p, trials, seed, cfg)?;
    let mut near = Vec::new();
    for o in &r.outcomes {
        let e = p.evaluate(&o.x);
        if e.feasible && e.value <= NEAR_SOLUTION {
            if let Some(lambda) = e.lambda {
                near.push(NearSolution {
                    trial: o.index,
                    residual: e.value,
                    lambda,
                });
            }
        }
    }
    let min_lambda = near.iter().map(|s| s.lambda).reduce(f64::min);
    let max_lambda = near.iter().map(|s| s.lambda).reduce(f64::max);
    Ok(LambdaScan {
        trials,
        seed,
        near_solutions: near,
        min_lambda,
        max_lambda,
    })
}

/// Central-difference gradient with step `h`.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            y[i] = x[i] + h;
            let up = f(&y);
            y[i] = x[i] - h;
            let down = f(&y);
            y[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}
