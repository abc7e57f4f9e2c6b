//! Matrix analysis used in the Einstein classification: Weyl eigenvalue
//! bounds, the skew-family lemmas and the `(K, A, P)` system.

use nalgebra::{DMatrix, DVector, SMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::structure_endos;
use crate::error::{Error, Result};
use crate::families::Sign;
use crate::liealg::MetricLieAlgebra;
use crate::matrix::{from_nalgebra, Mat, Vector};
use crate::pseudolinalg::{orthogonal_complement, pseudo_orthonormalize, Subspace};
use crate::scalar::{Scalar, Tolerance};
use crate::search::{minimize_fn, OptimizerConfig};

/// Relative cut-off for numerical rank.
pub const RANK_REL_TOL: f64 = 1e-8;

/// Ascending eigenvalues of a symmetric matrix.
pub fn sym_eigenvalues(m: &Mat<f64>) -> Vec<f64> {
    let e = SymmetricEigen::new(m.to_nalgebra());
    let mut v: Vec<f64> = e.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Count of singular values above `RANK_REL_TOL · σ_max`.
pub fn numerical_rank(m: &Mat<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.to_nalgebra().singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_REL_TOL * top).count()
}

fn check_symmetric(m: &Mat<f64>, name: &str) -> Result<()> {
    let scale = m.max_abs().max(1.0);
    if m.sub(&m.transpose()).max_abs() > 1e-12 * scale {
        return Err(Error::HypothesisViolated(format!("{name} is not symmetric")));
    }
    Ok(())
}

/// `(λ_k(A)+λ₁(B), λ_k(A+B), λ_k(A)+λ_m(B))` with eigenvalues in ascending
/// order and `k` 1-based.
pub fn weyl_bounds(a: &Mat<f64>, b: &Mat<f64>, k: usize) -> Result<(f64, f64, f64)> {
    if !a.is_square() || !b.is_square() || a.nrows() != b.nrows() {
        return Err(Error::SizeMismatch(format!(
            "{}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let m = a.nrows();
    if k == 0 || k > m {
        return Err(Error::SizeMismatch(format!("index {k} outside 1..={m}")));
    }
    check_symmetric(a, "A")?;
    check_symmetric(b, "B")?;
    let la = sym_eigenvalues(a);
    let lb = sym_eigenvalues(b);
    let ls = sym_eigenvalues(&a.add(b));
    Ok((la[k - 1] + lb[0], ls[k - 1], la[k - 1] + lb[m - 1]))
}

fn random_symmetric(rng: &mut ChaCha8Rng, m: usize) -> Mat<f64> {
    let mut x = Mat::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v: f64 = rng.random_range(-1.0..1.0);
            x[(i, j)] = v;
            x[(j, i)] = v;
        }
    }
    x
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeylFuzzReport {
    pub pairs: usize,
    pub checks: usize,
    /// Largest amount by which any inequality was violated (≤ 0 when all hold).
    pub worst_violation: f64,
}

impl WeylFuzzReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.worst_violation <= tol
    }
}

/// Random symmetric pairs of size 1..=8, every index checked.
pub fn weyl_fuzz(pairs: usize, seed: u64) -> WeylFuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..pairs {
        let m = rng.random_range(1..=8);
        let a = random_symmetric(&mut rng, m);
        let b = random_symmetric(&mut rng, m);
        for k in 1..=m {
            let (lo, mid, hi) = weyl_bounds(&a, &b, k).expect("square symmetric input");
            worst = worst.max(lo - mid).max(mid - hi);
            checks += 2;
        }
    }
    WeylFuzzReport {
        pairs,
        checks,
        worst_violation: worst,
    }
}

/// Family of `m×m` skew-symmetric matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewFamily {
    m: usize,
    mats: Vec<Mat<f64>>,
}

impl SkewFamily {
    pub fn new(m: usize, mats: Vec<Mat<f64>>) -> Result<Self> {
        for x in &mats {
            if x.nrows() != m || x.ncols() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: x.nrows(),
                });
            }
            if x.add(&x.transpose()).max_abs() > 1e-12 * x.max_abs().max(1.0) {
                return Err(Error::NotSkew);
            }
        }
        Ok(Self { m, mats })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[Mat<f64>] {
        &self.mats
    }

    fn sum_of_squares_from(&self, start: usize) -> Mat<f64> {
        let mut s = Mat::zeros(self.m, self.m);
        for x in &self.mats[start..] {
            s = s.add(&x.matmul(x));
        }
        s
    }
}

/// Restrictions of the structure endomorphisms of a 2-step algebra to
/// `[g,g]^⊥`, written in an orthonormal basis of that complement.
///
/// The derived ideal gets a pseudo-orthonormal basis (timelike first). When
/// every `J_i` has a one-dimensional kernel in the complement and these
/// kernels are mutually orthogonal, they become the first basis vectors.
pub fn j_family(a: &MetricLieAlgebra<f64>, tol: &Tolerance) -> Result<SkewFamily> {
    let derived = a.lie.derived_ideal(tol);
    if !derived.is_nondegenerate(&a.metric, tol) {
        return Err(Error::DegenerateDerived);
    }
    let on = pseudo_orthonormalize(&derived, &a.metric, tol)?;
    let endos = structure_endos(a, &Subspace::from_basis(a.dim(), on.vectors), tol)?;
    let perp = orthogonal_complement(&derived, &a.metric, tol).space;
    let pb = pseudo_orthonormalize(&perp, &a.metric, tol)?;
    if pb.signs.iter().any(|&s| s < 0) {
        return Err(Error::HypothesisViolated("complement of the derived ideal is not Euclidean".into()));
    }
    let f = pb.vectors;
    let m = f.len();
    let restrict = |j: &Mat<f64>, basis: &[Vector<f64>]| {
        Mat::from_fn(m, m, |r, s| a.metric.inner(&j.mul_vec(&basis[s]), &basis[r]))
    };
    let plain: Vec<Mat<f64>> = endos.j.iter().map(|j| restrict(j, &f)).collect();
    let basis = adapted_basis(&plain, m).map(|c| {
        c.iter()
            .map(|coef| {
                let mut v = vec![0.0; a.dim()];
                for (x, fv) in coef.iter().zip(&f) {
                    for (vi, fi) in v.iter_mut().zip(fv) {
                        *vi += x * fi;
                    }
                }
                v
            })
            .collect::<Vec<_>>()
    });
    let mats = match basis {
        Some(b) => endos.j.iter().map(|j| restrict(j, &b)).collect(),
        None => plain,
    };
    SkewFamily::new(m, mats)
}

fn adapted_basis(mats: &[Mat<f64>], m: usize) -> Option<Vec<Vector<f64>>> {
    if mats.is_empty() || mats.len() > m {
        return None;
    }
    let t = Tolerance::new(1e-9);
    let mut kernels: Vec<Vector<f64>> = Vec::new();
    for x in mats {
        let ns = x.nullspace(&t);
        if ns.len() != 1 {
            return None;
        }
        let mut v = ns[0].clone();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        let pivot = v.iter().copied().fold(0.0, |acc: f64, c| if c.abs() > acc.abs() { c } else { acc });
        let s = pivot.signum() / norm;
        v.iter_mut().for_each(|c| *c *= s);
        if kernels.iter().any(|k| k.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>().abs() > 1e-9) {
            return None;
        }
        kernels.push(v);
    }
    Some(complete_orthonormal(kernels, m))
}

/// Extends an orthonormal family to a basis of `ℝ^m` by Gram–Schmidt on
/// the standard basis.
fn complete_orthonormal(mut vs: Vec<Vector<f64>>, m: usize) -> Vec<Vector<f64>> {
    for i in 0..m {
        if vs.len() == m {
            break;
        }
        let mut w = vec![0.0; m];
        w[i] = 1.0;
        for _ in 0..2 {
            for v in &vs {
                let c: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
            }
        }
        let n = w.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-6 {
            vs.push(w.into_iter().map(|c| c / n).collect());
        }
    }
    vs
}

#[derive(Clone, Debug, PartialEq)]
pub struct Genlem0Report {
    /// `‖M₁² − ΣM_l² − Diag(…)‖∞`, or infinity when shapes or signs
    /// rule the hypothesis out.
    pub hypothesis_residual: f64,
    pub hypothesis_holds: bool,
    pub v_zero: Option<bool>,
    /// Numerical ranks of `M₂..M_n`.
    pub ranks: Vec<usize>,
    pub rank_ok: Option<bool>,
    /// `λ₁(ΣM_l²) − Σλ₁(M_l²)` over `l ≥ 2`.
    pub additivity_defect: Option<f64>,
    pub conclusions_hold: Option<bool>,
}

impl Genlem0Report {
    /// True when the hypothesis held but a conclusion failed.
    pub fn counterexample(&self) -> bool {
        self.conclusions_hold == Some(false)
    }
}

/// Evaluates the hypothesis of the skew-family lemma and, when it holds
/// within `tol`, checks each conclusion.
pub fn genlem0_verify(f: &SkewFamily, v: &[f64], tol: f64) -> Genlem0Report {
    let (m, n) = (f.m(), f.n());
    let ranks: Vec<usize> = f.mats().iter().skip(1).map(numerical_rank).collect();
    let shaped = (2..=m).contains(&n) && v.len() == m - n && v.iter().all(|&x| x <= 0.0);
    if !shaped {
        return Genlem0Report {
            hypothesis_residual: f64::INFINITY,
            hypothesis_holds: false,
            v_zero: None,
            ranks,
            rank_ok: None,
            additivity_defect: None,
            conclusions_hold: None,
        };
    }
    let mats = f.mats();
    let sq1 = mats[0].matmul(&mats[0]);
    let rest = f.sum_of_squares_from(1);
    let mut diag = vec![-0.5 * sq1.trace()];
    diag.extend(mats[1..].iter().map(|x| 0.5 * x.trace_product(x)));
    diag.extend_from_slice(v);
    let lhs = sq1.sub(&rest);
    let residual = lhs.sub(&Mat::diagonal(&diag)).max_abs();
    let scale = lhs.max_abs().max(1.0);
    let holds = residual <= tol * scale;
    if !holds {
        return Genlem0Report {
            hypothesis_residual: residual,
            hypothesis_holds: false,
            v_zero: None,
            ranks,
            rank_ok: None,
            additivity_defect: None,
            conclusions_hold: None,
        };
    }
    let v_zero = v.iter().all(|x| x.abs() <= tol * scale);
    let rank_ok = ranks.iter().all(|&r| r <= 2);
    let lam1 = |x: &Mat<f64>| sym_eigenvalues(x).first().copied().unwrap_or(0.0);
    let separate: f64 = mats[1..].iter().map(|x| lam1(&x.matmul(x))).sum();
    let defect = lam1(&rest) - separate;
    let additive = defect.abs() <= tol.max(1e-10) * scale;
    Genlem0Report {
        hypothesis_residual: residual,
        hypothesis_holds: true,
        v_zero: Some(v_zero),
        ranks,
        rank_ok: Some(rank_ok),
        additivity_defect: Some(defect),
        conclusions_hold: Some(v_zero && rank_ok && additive),
    }
}

/// Orthonormal basis `(u₀, u₁..u_n, v₁..v_{m−n−1})` adapted to a rank-2 skew
/// family, with `K_i u₀ = α_i u_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Genlem1Basis {
    pub u0: Vector<f64>,
    pub u: Vec<Vector<f64>>,
    pub v: Vec<Vector<f64>>,
    pub alphas: Vec<f64>,
}

impl Genlem1Basis {
    /// Columns in the order `u₀, u₁.., v₁..`.
    pub fn basis_matrix(&self) -> Mat<f64> {
        let mut cols = vec![self.u0.clone()];
        cols.extend(self.u.iter().cloned());
        cols.extend(self.v.iter().cloned());
        Mat::from_columns(self.u0.len(), &cols)
    }

    pub fn gram_residual(&self) -> f64 {
        let b = self.basis_matrix();
        b.transpose().matmul(&b).sub(&Mat::identity(b.ncols())).max_abs()
    }

    /// Worst deviation from `K_i u₀ = α_i u_i`, `K_i u_j = −δ_ij α_i u₀`,
    /// `K_i v_l = 0`.
    pub fn action_residual(&self, ks: &[Mat<f64>]) -> f64 {
        let mut worst: f64 = 0.0;
        let mut diff = |x: Vector<f64>, y: Vector<f64>| {
            for (a, b) in x.iter().zip(&y) {
                worst = worst.max((a - b).abs());
            }
        };
        let m = self.u0.len();
        for (i, k) in ks.iter().enumerate() {
            let a = self.alphas[i];
            diff(k.mul_vec(&self.u0), self.u[i].iter().map(|x| a * x).collect());
            for (j, uj) in self.u.iter().enumerate() {
                let want = if i == j {
                    self.u0.iter().map(|x| -a * x).collect()
                } else {
                    vec![0.0; m]
                };
                diff(k.mul_vec(uj), want);
            }
            for vl in &self.v {
                diff(k.mul_vec(vl), vec![0.0; m]);
            }
        }
        worst
    }
}

/// Builds the adapted basis: `u₀` is a unit eigenvector for the smallest
/// eigenvalue of `ΣK_i²` and `u_i = K_i u₀ / |K_i u₀|`.
pub fn genlem1_basis(ks: &[Mat<f64>], tol: f64) -> Result<Genlem1Basis> {
    let n = ks.len();
    let m = ks.first().map(|k| k.nrows()).unwrap_or(0);
    if n == 0 || n >= m {
        return Err(Error::HypothesisViolated(format!("need 1 ≤ n < m, got n = {n}, m = {m}")));
    }
    let fam = SkewFamily::new(m, ks.to_vec())?;
    let scale = ks.iter().map(|k| k.max_abs()).fold(1.0, f64::max).powi(2);
    for (i, k) in ks.iter().enumerate() {
        let r = numerical_rank(k);
        if r != 2 {
            return Err(Error::HypothesisViolated(format!("rank of K_{} is {r}, expected 2", i + 1)));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let t = ks[i].trace_product(&ks[j]);
            if t.abs() > tol * scale {
                return Err(Error::HypothesisViolated(format!(
                    "tr(K_{}K_{}) = {t:e} is not zero",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let total = fam.sum_of_squares_from(0);
    let eig = SymmetricEigen::new(total.to_nalgebra());
    let (idx, lam) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, l)| if l < acc.1 { (i, l) } else { acc });
    let separate: f64 = ks.iter().map(|k| sym_eigenvalues(&k.matmul(k))[0]).sum();
    if (lam - separate).abs() > tol * scale {
        return Err(Error::HypothesisViolated(format!(
            "λ₁(ΣK_i²) = {lam} differs from Σλ₁(K_i²) = {separate}"
        )));
    }
    let mut u0: Vector<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
    let pivot = u0.iter().copied().fold(0.0, |acc: f64, c| if c.abs() > acc.abs() + 1e-12 { c } else { acc });
    if pivot < 0.0 {
        u0.iter_mut().for_each(|c| *c = -*c);
    }
    let mut u = Vec::with_capacity(n);
    let mut alphas = Vec::with_capacity(n);
    for k in ks {
        let w = k.mul_vec(&u0);
        let a = w.iter().map(|c| c * c).sum::<f64>().sqrt();
        alphas.push(a);
        u.push(w.into_iter().map(|c| c / a).collect::<Vector<f64>>());
    }
    let mut head = vec![u0.clone()];
    head.extend(u.iter().cloned());
    let full = complete_orthonormal(head, m);
    let v = full[n + 1..].to_vec();
    Ok(Genlem1Basis { u0, u, v, alphas })
}

/// Candidate solution `(K, A, P, α)` of `K² = P⁻¹AP + A`, `αK = AP − P⁻¹A`.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaimpTriple<T: Scalar> {
    pub k: usize,
    pub k_mat: Mat<T>,
    pub a: Mat<T>,
    pub p: Mat<T>,
    pub alpha: T,
}

impl<T: Scalar> LemmaimpTriple<T> {
    /// Explicit `k = 1` solution; `eps` is the sign in `K` and `alpha_sign`
    /// the sign of `α`.
    pub fn explicit(alpha1: T, alpha2: T, eps: Sign, alpha_sign: Sign) -> Result<Self> {
        if alpha1.is_zero() {
            return Err(Error::ZeroParameter("alpha1"));
        }
        if alpha2.is_zero() {
            return Err(Error::ZeroParameter("alpha2"));
        }
        let s = alpha1.clone() * alpha1.clone() + alpha2.clone() * alpha2.clone();
        let root = s.sqrt().ok_or_else(|| Error::Irrational(format!("sqrt({s})")))?;
        let e: T = eps.value();
        let tau: T = alpha_sign.value();
        let beta = e.clone() * root.clone();
        let sigma = e * tau.clone();
        let z = T::zero();
        Ok(Self {
            k: 1,
            k_mat: Mat::from_rows(vec![vec![z.clone(), beta.clone()], vec![-beta, z.clone()]]),
            a: Mat::diagonal(&[-(alpha1.clone() * alpha1), -(alpha2.clone() * alpha2)]),
            p: Mat::from_rows(vec![vec![z.clone(), -sigma.clone()], vec![sigma, z]]),
            alpha: tau * root,
        })
    }

    pub fn to_f64(&self) -> LemmaimpTriple<f64> {
        LemmaimpTriple {
            k: self.k,
            k_mat: self.k_mat.to_f64(),
            a: self.a.to_f64(),
            p: self.p.to_f64(),
            alpha: self.alpha.to_f64(),
        }
    }
}

/// Both equations' entrywise residuals; `P⁻¹` is taken as `Pᵀ`.
pub fn lemmaimp_residual<T: Scalar>(t: &LemmaimpTriple<T>) -> T {
    let (r1, r2) = lemmaimp_parts(t);
    let (r1, r2) = (r1.max_abs(), r2.max_abs());
    if r1 > r2 {
        r1
    } else {
        r2
    }
}

fn lemmaimp_parts<T: Scalar>(t: &LemmaimpTriple<T>) -> (Mat<T>, Mat<T>) {
    let pt = t.p.transpose();
    let k2 = t.k_mat.matmul(&t.k_mat);
    let first = k2.sub(&pt.matmul(&t.a).matmul(&t.p).add(&t.a));
    let second = t
        .k_mat
        .scale(&t.alpha)
        .sub(&t.a.matmul(&t.p).sub(&pt.matmul(&t.a)));
    (first, second)
}

/// Search parameterisation of the system for a fixed `k`, `α` sign and
/// orientation of `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LemmaimpBranch {
    pub k: usize,
    pub alpha_sign: Sign,
    /// Compose `exp(Ω)` with the reflection `diag(−1, 1, …)`.
    pub reflect: bool,
}

impl LemmaimpBranch {
    /// Bounds on the ratios `α_i / α_{2k}`; the system is invariant under
    /// simultaneous permutation, so `α_{2k}` may be taken largest.
    pub const RATIO_BOUNDS: (f64, f64) = (0.1, 1.0);

    fn size(&self) -> usize {
        2 * self.k
    }

    fn skew_len(&self) -> usize {
        let n = self.size();
        n * (n - 1) / 2
    }

    /// Layout: skew entries of `K`, the ratios `α_i / α_{2k}` for
    /// `i < 2k` (the `α_i` are then rescaled to `Σα_i² = 1`), and the skew
    /// entries of the generator `Ω`.
    pub fn param_len(&self) -> usize {
        2 * self.skew_len() + self.size() - 1
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        let s = self.skew_len();
        let mut b = vec![(-2.0, 2.0); s];
        b.extend(std::iter::repeat_n(Self::RATIO_BOUNDS, self.size() - 1));
        b.extend(std::iter::repeat_n((-std::f64::consts::PI, std::f64::consts::PI), s));
        b
    }

    fn parts(&self, x: &[f64]) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
        let n = self.size();
        let s = self.skew_len();
        let skew = |v: &[f64]| {
            let mut m = DMatrix::zeros(n, n);
            let mut it = v.iter();
            for i in 0..n {
                for j in i + 1..n {
                    let c = *it.next().expect("parameter count");
                    m[(i, j)] = c;
                    m[(j, i)] = -c;
                }
            }
            m
        };
        let k_mat = skew(&x[..s]);
        let mut ratios = x[s..s + n - 1].to_vec();
        ratios.push(1.0);
        let norm_sq: f64 = ratios.iter().map(|r| r * r).sum();
        let a: Vec<f64> = ratios.iter().map(|r| -r * r / norm_sq).collect();
        let mut p = skew(&x[s + n - 1..]).exp();
        if self.reflect {
            p.row_mut(0).neg_mut();
        }
        (k_mat, a, p)
    }

    pub fn triple(&self, x: &[f64]) -> LemmaimpTriple<f64> {
        let (k_mat, a, p) = self.parts(x);
        LemmaimpTriple {
            k: self.k,
            k_mat: from_nalgebra(&k_mat),
            a: Mat::diagonal(&a),
            p: from_nalgebra(&p),
            alpha: self.alpha_sign.value::<f64>(),
        }
    }

    /// Smooth objective: sum of squared entries of both equations.
    pub fn objective(&self, x: &[f64]) -> f64 {
        match self.size() {
            2 => objective_2(self, x),
            4 => objective_4(self, x),
            6 => objective_6(self, x),
            _ => self.objective_dyn(x),
        }
    }

    fn objective_dyn(&self, x: &[f64]) -> f64 {
        let (k_mat, a, p) = self.parts(x);
        let alpha = self.alpha_sign.value::<f64>();
        let ap = DMatrix::from_fn(p.nrows(), p.ncols(), |i, j| a[i] * p[(i, j)]);
        let pta = ap.transpose();
        let first = &k_mat * &k_mat - p.transpose() * &ap - DMatrix::from_diagonal(&DVector::from_vec(a));
        let second = k_mat * alpha - (ap - pta);
        first.norm_squared() + second.norm_squared()
    }

    /// The four branches, indexed by restart number modulo 4.
    pub fn for_restart(k: usize, idx: usize) -> Self {
        Self {
            k,
            alpha_sign: if idx % 2 == 0 { Sign::Plus } else { Sign::Minus },
            reflect: (idx / 2) % 2 == 1,
        }
    }
}

/// Stack-allocated evaluation of the branch objective for a fixed size.
macro_rules! fixed_objective {
    ($name:ident, $n:literal) => {
        fn $name(b: &LemmaimpBranch, x: &[f64]) -> f64 {
            const N: usize = $n;
            let s = b.skew_len();
            let skew = |v: &[f64]| {
                let mut m = SMatrix::<f64, N, N>::zeros();
                let mut it = v.iter();
                for i in 0..N {
                    for j in i + 1..N {
                        let c = *it.next().expect("parameter count");
                        m[(i, j)] = c;
                        m[(j, i)] = -c;
                    }
                }
                m
            };
            let k_mat = skew(&x[..s]);
            let mut a = [1.0; N];
            a[..N - 1].copy_from_slice(&x[s..s + N - 1]);
            let norm_sq: f64 = a.iter().map(|r| r * r).sum();
            a.iter_mut().for_each(|r| *r = -*r * *r / norm_sq);
            let mut p = skew(&x[s + N - 1..]).exp();
            if b.reflect {
                p.row_mut(0).neg_mut();
            }
            let alpha = b.alpha_sign.value::<f64>();
            let ap = SMatrix::<f64, N, N>::from_fn(|i, j| a[i] * p[(i, j)]);
            let mut first = k_mat * k_mat - p.transpose() * ap;
            for (i, ai) in a.iter().enumerate() {
                first[(i, i)] -= ai;
            }
            let second = k_mat * alpha - (ap - ap.transpose());
            first.norm_squared() + second.norm_squared()
        }
    };
}

fixed_objective!(objective_2, 2);
fixed_objective!(objective_4, 4);
fixed_objective!(objective_6, 6);

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaimpSearch {
    pub k: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Smallest `lemmaimp_residual` reached over all restarts.
    pub residual: f64,
    pub best: LemmaimpTriple<f64>,
    pub branch: LemmaimpBranch,
    pub restart: usize,
    /// Best residual per restart, in restart order.
    pub per_restart: Vec<f64>,
}

/// Seeded multi-start minimisation over every branch. Restart `i` uses
/// branch `i mod 4`; restarts run in parallel and merge by
/// `(residual, index)`.
pub fn lemmaimp_search(k: usize, restarts: usize, seed: u64) -> Result<LemmaimpSearch> {
    lemmaimp_search_with(k, restarts, seed, &OptimizerConfig::default())
}

pub fn lemmaimp_search_with(k: usize, restarts: usize, seed: u64, cfg: &OptimizerConfig) -> Result<LemmaimpSearch> {
    if k == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "k",
            reason: "must be at least 1".into(),
        });
    }
    if restarts == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "restarts",
            reason: "must be at least 1".into(),
        });
    }
    let bounds = LemmaimpBranch::for_restart(k, 0).bounds();
    let outcomes = minimize_fn(
        |idx, x: &[f64]| LemmaimpBranch::for_restart(k, idx).objective(x),
        &bounds,
        restarts,
        seed,
        cfg,
    );
    let scored: Vec<(f64, usize, LemmaimpTriple<f64>)> = outcomes
        .iter()
        .map(|o| {
            let t = LemmaimpBranch::for_restart(k, o.index).triple(&o.x);
            (lemmaimp_residual(&t), o.index, t)
        })
        .collect();
    let per_restart = scored.iter().map(|s| s.0).collect();
    let (residual, restart, best) = scored
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("at least one restart");
    Ok(LemmaimpSearch {
        k,
        restarts,
        seed,
        residual,
        best,
        branch: LemmaimpBranch::for_restart(k, restart),
        restart,
        per_restart,
    })
}

/// Best `(residual, triple)` within one branch.
pub fn lemmaimp_search_branch(
    branch: LemmaimpBranch,
    restarts: usize,
    seed: u64,
    cfg: &OptimizerConfig,
) -> (f64, LemmaimpTriple<f64>) {
    let outcomes = minimize_fn(|_, x: &[f64]| branch.objective(x), &branch.bounds(), restarts.max(1), seed, cfg);
    outcomes
        .iter()
        .map(|o| {
            let t = branch.triple(&o.x);
            (lemmaimp_residual(&t), t)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one restart")
}
