//! Levi-Civita product, curvature and Ricci curvature of metric Lie algebras.
//!
//! Two independent Ricci routes are provided: [`ricci_general`] traces the
//! curvature operator, and [`ricci_nilpotent`] uses the closed form
//! `Ric = −½𝒥₁ + ¼𝒥₂` that is valid for nilpotent algebras. They are
//! expected to agree and the test suites use each as the other's oracle.

use crate::error::{Error, Result};
use crate::liealg::MetricLieAlgebra;
use crate::matrix::{Mat, Vector};
use crate::pseudolinalg::{MetricTensor, Subspace};
use crate::scalar::{Scalar, Tolerance};

/// Matrices of `L_{e_i}` for every basis vector.
#[derive(Clone, Debug)]
pub struct Connection<T: Scalar> {
    ops: Vec<Mat<T>>,
}

impl<T: Scalar> Connection<T> {
    /// Koszul formula
    /// `2⟨L_u v, w⟩ = ⟨[u,v],w⟩ + ⟨[w,u],v⟩ + ⟨[w,v],u⟩` on basis triples.
    pub fn new(a: &MetricLieAlgebra<T>) -> Self {
        let n = a.dim();
        let g = a.metric.matrix();
        let ginv = a.metric.inverse();
        // low[i][j][k] = ⟨[e_i, e_j], e_k⟩
        let low: Vec<Vec<Vector<T>>> = (0..n)
            .map(|i| (0..n).map(|j| g.mul_vec(&a.lie.bracket_basis(i, j))).collect())
            .collect();
        let half = T::from_ratio(1, 2);
        let ops = (0..n)
            .map(|i| {
                let mut l = Mat::zeros(n, n);
                for j in 0..n {
                    let lowered: Vector<T> = (0..n)
                        .map(|k| half.clone() * (low[i][j][k].clone() + low[k][i][j].clone() + low[k][j][i].clone()))
                        .collect();
                    for (r, x) in ginv.mul_vec(&lowered).into_iter().enumerate() {
                        l[(r, j)] = x;
                    }
                }
                l
            })
            .collect();
        Self { ops }
    }

    pub fn basis_op(&self, i: usize) -> &Mat<T> {
        &self.ops[i]
    }

    /// Matrix of `L_u`.
    pub fn op(&self, u: &[T]) -> Mat<T> {
        let n = self.ops.len();
        let mut m = Mat::zeros(n, n);
        for (i, ui) in u.iter().enumerate() {
            if !ui.is_zero() {
                m = m.add(&self.ops[i].scale(ui));
            }
        }
        m
    }

    pub fn apply(&self, u: &[T], v: &[T]) -> Vector<T> {
        self.op(u).mul_vec(v)
    }
}

/// `L_u v`.
pub fn levi_civita<T: Scalar>(a: &MetricLieAlgebra<T>, u: &[T], v: &[T]) -> Result<Vector<T>> {
    let a_len = a.dim();
    for x in [u, v] {
        if x.len() != a_len {
            return Err(Error::DimensionMismatch {
                expected: a_len,
                got: x.len(),
            });
        }
    }
    Ok(Connection::new(a).apply(u, v))
}

/// `K(u,v) = L_{[u,v]} − [L_u, L_v]`.
pub fn curvature_op<T: Scalar>(a: &MetricLieAlgebra<T>, u: &[T], v: &[T]) -> Result<Mat<T>> {
    let conn = Connection::new(a);
    let uv = a.lie.bracket(u, v)?;
    Ok(curvature_with(&conn, &uv, u, v))
}

fn curvature_with<T: Scalar>(conn: &Connection<T>, uv: &[T], u: &[T], v: &[T]) -> Mat<T> {
    conn.op(uv).sub(&conn.op(u).commutator(&conn.op(v)))
}

fn basis_curvatures<T: Scalar>(a: &MetricLieAlgebra<T>, conn: &Connection<T>) -> Vec<Vec<Mat<T>>> {
    let n = a.dim();
    let mut k = vec![vec![Mat::zeros(n, n); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let kij = conn
                .op(&a.lie.bracket_basis(i, j))
                .sub(&conn.basis_op(i).commutator(conn.basis_op(j)));
            k[j][i] = kij.neg();
            k[i][j] = kij;
        }
    }
    k
}

/// `K ≡ 0`.
pub fn is_flat<T: Scalar>(a: &MetricLieAlgebra<T>, tol: &Tolerance) -> bool {
    let conn = Connection::new(a);
    let scale = a.lie.scale().powi(2).max(1.0);
    basis_curvatures(a, &conn)
        .iter()
        .flatten()
        .all(|k| tol.is_zero(&k.max_abs(), scale))
}

/// Ricci form, operator and derived quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport<T: Scalar> {
    pub ric: Mat<T>,
    /// `Ric = g⁻¹ ric`.
    pub ric_op: Mat<T>,
    pub scalar: T,
    /// `tr Ric / n`.
    pub lambda_star: T,
    /// `max |Ric − λ* Id|`.
    pub einstein_residual: T,
}

impl<T: Scalar> CurvatureReport<T> {
    pub fn from_ric(ric: Mat<T>, a: &MetricLieAlgebra<T>) -> Self {
        Self::from_metric(ric, &a.metric)
    }

    pub fn from_metric(ric: Mat<T>, metric: &MetricTensor<T>) -> Self {
        let n = metric.dim();
        let ric_op = metric.inverse().matmul(&ric);
        let scalar = ric_op.trace();
        let lambda_star = if n == 0 {
            T::zero()
        } else {
            scalar.clone() / T::from_i64(n as i64)
        };
        let einstein_residual = ric_op.sub(&Mat::identity(n).scale(&lambda_star)).max_abs();
        Self {
            ric,
            ric_op,
            scalar,
            lambda_star,
            einstein_residual,
        }
    }

    pub fn to_f64(&self) -> CurvatureReport<f64> {
        CurvatureReport {
            ric: self.ric.to_f64(),
            ric_op: self.ric_op.to_f64(),
            scalar: self.scalar.to_f64(),
            lambda_star: self.lambda_star.to_f64(),
            einstein_residual: self.einstein_residual.to_f64(),
        }
    }
}

/// `ric(e_i, e_j) = tr(w ↦ K(e_i, w) e_j)`, valid for any Lie algebra.
pub fn ricci_general<T: Scalar>(a: &MetricLieAlgebra<T>) -> CurvatureReport<T> {
    let n = a.dim();
    let conn = Connection::new(a);
    let k = basis_curvatures(a, &conn);
    let ric = Mat::from_fn(n, n, |i, j| {
        (0..n).fold(T::zero(), |acc, m| acc + k[i][m][(m, j)].clone())
    });
    CurvatureReport::from_ric(ric, a)
}

/// Output of [`ricci_nilpotent`].
#[derive(Clone, Debug)]
pub struct NilpotentRicci<T: Scalar> {
    pub report: CurvatureReport<T>,
    /// `⟨𝒥₁u, v⟩ = tr(ad_u ∘ ad_v*)`.
    pub j1: Mat<T>,
    /// `⟨𝒥₂u, v⟩ = −tr(J_u ∘ J_v)` with `J_u v = ad_v* u`.
    pub j2: Mat<T>,
}

/// `Ric = −½𝒥₁ + ¼𝒥₂`, after checking nilpotency.
pub fn ricci_nilpotent<T: Scalar>(a: &MetricLieAlgebra<T>, tol: &Tolerance) -> Result<NilpotentRicci<T>> {
    a.lie.lower_central_series(tol)?;
    let n = a.dim();
    let ads: Vec<Mat<T>> = (0..n).map(|i| a.lie.ad_basis(i)).collect();
    let ad_stars: Vec<Mat<T>> = (0..n).map(|i| a.ad_adjoint_basis(i)).collect();
    let js: Vec<Mat<T>> = (0..n)
        .map(|i| Mat::from_fn(n, n, |r, k| ad_stars[k][(r, i)].clone()))
        .collect();
    let b1 = Mat::from_fn(n, n, |i, j| ads[i].trace_product(&ad_stars[j]));
    let b2 = Mat::from_fn(n, n, |i, j| -js[i].trace_product(&js[j]));
    let ric = b1
        .scale(&T::from_ratio(-1, 2))
        .add(&b2.scale(&T::from_ratio(1, 4)));
    let ginv = a.metric.inverse();
    Ok(NilpotentRicci {
        report: CurvatureReport::from_ric(ric, a),
        j1: ginv.matmul(&b1),
        j2: ginv.matmul(&b2),
    })
}

/// Nilpotent closed form when it applies, the general trace otherwise.
pub fn ricci<T: Scalar>(a: &MetricLieAlgebra<T>, tol: &Tolerance) -> CurvatureReport<T> {
    match ricci_nilpotent(a, tol) {
        Ok(r) => r.report,
        Err(_) => ricci_general(a),
    }
}

/// `[u,v] = Σ ⟨J_i u, v⟩ f_i` for a basis `(f_i)` of the derived ideal.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureEndos<T: Scalar> {
    pub basis: Vec<Vector<T>>,
    pub j: Vec<Mat<T>>,
}

impl<T: Scalar> StructureEndos<T> {
    /// `max ‖[e_a,e_b] − Σ ⟨J_i e_a, e_b⟩ f_i‖∞`.
    pub fn reconstruction_residual(&self, a: &MetricLieAlgebra<T>) -> T {
        let n = a.dim();
        let g = a.metric.matrix();
        let lowered: Vec<Mat<T>> = self.j.iter().map(|j| j.transpose().matmul(g)).collect();
        let mut worst = T::zero();
        for p in 0..n {
            for q in 0..n {
                let mut v = a.lie.bracket_basis(p, q);
                for (f, c) in self.basis.iter().zip(&lowered) {
                    for (x, fx) in v.iter_mut().zip(f) {
                        *x = x.clone() - c[(p, q)].clone() * fx.clone();
                    }
                }
                for x in v {
                    let x = x.abs();
                    if x > worst {
                        worst = x;
                    }
                }
            }
        }
        worst
    }

    /// Largest deviation from metric skewness over the family.
    pub fn skew_residual(&self, a: &MetricLieAlgebra<T>) -> T {
        let g = a.metric.matrix();
        self.j
            .iter()
            .map(|j| {
                let w = j.transpose().matmul(g);
                w.add(&w.transpose()).max_abs()
            })
            .fold(T::zero(), |acc, x| if x > acc { x } else { acc })
    }
}

/// Structure endomorphisms for the given basis of `[h,h]`.
pub fn structure_endos<T: Scalar>(
    a: &MetricLieAlgebra<T>,
    basis_of_derived: &Subspace<T>,
    tol: &Tolerance,
) -> Result<StructureEndos<T>> {
    let n = a.dim();
    let basis = basis_of_derived.basis().to_vec();
    let r = basis.len();
    let f = Mat::from_columns(n, &basis);
    let derived = a.lie.derived_ideal(tol);
    if basis_of_derived.ambient() != n
        || f.rank(tol) != r
        || r != derived.dim()
        || !derived.is_subspace_of(basis_of_derived, tol)
    {
        return Err(Error::BasisDoesNotSpanDerived);
    }
    if r == 0 {
        return Ok(StructureEndos { basis, j: Vec::new() });
    }
    // Column (p, q) of the right-hand side is [e_p, e_q].
    let rhs = Mat::from_fn(n, n * n, |k, c| a.lie.structure(c / n, c % n, k));
    let coef = f.solve(&rhs, tol).ok_or(Error::BasisDoesNotSpanDerived)?;
    let ginv = a.metric.inverse();
    let j = (0..r)
        .map(|i| {
            // C_i[p][q] = ⟨J_i e_p, e_q⟩ = (J_iᵀ g)[p][q]  ⇒  J_i = g⁻¹ C_iᵀ.
            let c = Mat::from_fn(n, n, |p, q| coef[(i, p * n + q)].clone());
            ginv.matmul(&c.transpose())
        })
        .collect();
    Ok(StructureEndos { basis, j })
}

/// `𝒥₁ = −Σ⟨f_i,f_j⟩ J_i J_j` and `𝒥₂u = −Σ⟨f_i,u⟩ tr(J_i J_j) f_j`.
pub fn invariant_operators<T: Scalar>(a: &MetricLieAlgebra<T>, endos: &StructureEndos<T>) -> (Mat<T>, Mat<T>) {
    let n = a.dim();
    let f = &endos.basis;
    let r = f.len();
    let mut j1 = Mat::zeros(n, n);
    let mut j2 = Mat::zeros(n, n);
    for i in 0..r {
        let gfi = a.metric.lower(&f[i]);
        for k in 0..r {
            let fik = a.metric.inner(&f[i], &f[k]);
            if !fik.is_zero() {
                j1 = j1.sub(&endos.j[i].matmul(&endos.j[k]).scale(&fik));
            }
            let t = endos.j[i].trace_product(&endos.j[k]);
            if !t.is_zero() {
                let outer = Mat::from_fn(n, n, |p, q| f[k][p].clone() * gfi[q].clone());
                j2 = j2.sub(&outer.scale(&t));
            }
        }
    }
    (j1, j2)
}

/// Which curvature condition [`einstein_check`] tests.
#[derive(Clone, Debug, PartialEq)]
pub enum EinsteinMode<T: Scalar> {
    Einstein,
    RicciFlat,
    /// `Ric = λ Id + D` for the given candidate `D`.
    Soliton(Mat<T>),
}

impl<T: Scalar> EinsteinMode<T> {
    pub fn name(&self) -> &'static str {
        match self {
            EinsteinMode::Einstein => "einstein",
            EinsteinMode::RicciFlat => "ricci_flat",
            EinsteinMode::Soliton(_) => "soliton",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EinsteinVerdict<T: Scalar> {
    pub holds: bool,
    pub lambda: T,
    pub residual: T,
    /// Soliton mode only: zero iff `D` is a derivation.
    pub derivation_residual: Option<T>,
}

pub fn einstein_check<T: Scalar>(a: &MetricLieAlgebra<T>, mode: &EinsteinMode<T>, tol: &Tolerance) -> EinsteinVerdict<T> {
    let report = ricci(a, tol);
    let n = a.dim();
    let scale = report.ric_op.max_abs().to_f64().max(1.0);
    match mode {
        EinsteinMode::Einstein => EinsteinVerdict {
            holds: tol.is_zero(&report.einstein_residual, scale),
            lambda: report.lambda_star,
            residual: report.einstein_residual,
            derivation_residual: None,
        },
        EinsteinMode::RicciFlat => {
            let r = report.ric.max_abs();
            EinsteinVerdict {
                holds: tol.is_zero(&r, 1.0),
                lambda: T::zero(),
                residual: r,
                derivation_residual: None,
            }
        }
        EinsteinMode::Soliton(d) => {
            let diff = report.ric_op.sub(d);
            let lambda = if n == 0 {
                T::zero()
            } else {
                diff.trace() / T::from_i64(n as i64)
            };
            let residual = diff.sub(&Mat::identity(n).scale(&lambda)).max_abs();
            let der = a.lie.derivation_residual(d);
            let dscale = d.max_abs().to_f64().max(1.0) * a.lie.scale().max(1.0);
            EinsteinVerdict {
                holds: tol.is_zero(&residual, scale) && tol.is_zero(&der, dscale),
                lambda,
                residual,
                derivation_residual: Some(der),
            }
        }
    }
}
