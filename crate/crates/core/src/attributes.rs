//! Splitting `h = g ⊥ Z(h)` of a metric nilpotent Lie algebra with
//! nondegenerate Euclidean center, and the curvature identities expressed in
//! terms of `(g, Z(h), ω)`.

use crate::curvature::{einstein_check, ricci, CurvatureReport, EinsteinMode, EinsteinVerdict, StructureEndos};
use crate::error::{Error, Result};
use crate::liealg::{central_extension, change_basis, CocycleData, MetricLieAlgebra};
use crate::matrix::{unit, Mat, Vector};
use crate::pseudolinalg::{
    inertia, orthogonal_complement, orthogonalize, pseudo_orthonormalize, MetricTensor, Subspace,
};
use crate::scalar::{Scalar, Tolerance};

/// `(g, ⟨,⟩_g, [,]_g)`, `(Z(h), ⟨,⟩_z)` and `ω`.
#[derive(Clone, Debug)]
pub struct AttributeTriple<T: Scalar> {
    pub g: MetricLieAlgebra<T>,
    /// `ω` together with the Gram matrix of the chosen center basis.
    pub omega: CocycleData<T>,
    /// Columns: basis of `g`, then basis of `Z(h)`, in the coordinates of `h`.
    pub embedding: Mat<T>,
    /// Metric of `h` in its original coordinates.
    pub h_metric: MetricTensor<T>,
    /// `Z(g) ∩ ker ω = {0}`.
    pub rigid: bool,
}

impl<T: Scalar> AttributeTriple<T> {
    pub fn g_dim(&self) -> usize {
        self.g.dim()
    }

    pub fn p(&self) -> usize {
        self.omega.p()
    }

    /// `h` rebuilt from the attributes, in the embedding's basis.
    pub fn reconstruct(&self, tol: &Tolerance) -> Result<MetricLieAlgebra<T>> {
        Ok(central_extension(&self.g, &self.omega, tol)?.algebra)
    }

    pub fn to_f64(&self) -> AttributeTriple<f64> {
        AttributeTriple {
            g: self.g.to_f64(),
            omega: self.omega.to_f64(),
            embedding: self.embedding.to_f64(),
            h_metric: self.h_metric.to_f64(),
            rigid: self.rigid,
        }
    }
}

/// Orthonormal center basis when square roots exist, otherwise an orthogonal one.
fn center_basis<T: Scalar>(z: &Subspace<T>, m: &MetricTensor<T>, tol: &Tolerance) -> Result<Vec<Vector<T>>> {
    match pseudo_orthonormalize(z, m, tol) {
        Ok(b) => Ok(b.vectors),
        Err(Error::Irrational(_)) => Ok(orthogonalize(z, m, tol)?.into_iter().map(|(v, _)| v).collect()),
        Err(e) => Err(e),
    }
}

pub fn decompose<T: Scalar>(h: &MetricLieAlgebra<T>, tol: &Tolerance) -> Result<AttributeTriple<T>> {
    let n = h.dim();
    let z = h.lie.center(tol);
    if !z.is_nondegenerate(&h.metric, tol) {
        return Err(Error::DegenerateCenter);
    }
    let (neg, _) = inertia(&z.restricted_metric(&h.metric), tol)?;
    if neg > 0 {
        return Err(Error::NonEuclideanCenter);
    }
    let zb = center_basis(&z, &h.metric, tol)?;
    let gb = orthogonal_complement(&z, &h.metric, tol).space;
    let m = gb.dim();
    let p = zb.len();
    let cols: Vec<Vector<T>> = gb.basis().iter().cloned().chain(zb).collect();
    let t = Mat::from_columns(n, &cols);
    let ht = change_basis(h, &t, tol)?;

    let lie_g = crate::liealg::LiePresentation::from_brackets(
        m,
        ht.lie.entries().into_iter().filter(|&(i, j, k, _)| i < m && j < m && k < m),
    )?;
    let gm = ht.metric.matrix();
    let g_metric = MetricTensor::new(gm.block(0..m, 0..m), tol)?;
    let z_metric = MetricTensor::new(gm.block(m..n, m..n), tol)?;
    let values: Vec<Mat<T>> = (0..p)
        .map(|l| Mat::from_fn(m, m, |a, b| ht.lie.structure(a, b, m + l)))
        .collect();
    let g = MetricLieAlgebra::new(lie_g, g_metric)?;
    let omega = CocycleData::from_values(&g.metric, values, z_metric)?;
    let res = omega.cocycle_residual(&g.lie, &g.metric);
    let scale = g.lie.scale().max(1.0);
    if !tol.is_zero(&res, scale * scale) {
        return Err(Error::NotACocycle(res.to_f64()));
    }
    let rigid = g.lie.center(tol).intersection(&omega.kernel(tol), tol).is_zero();
    Ok(AttributeTriple {
        g,
        omega,
        embedding: t,
        h_metric: h.metric.clone(),
        rigid,
    })
}

/// `S_{z_a} = Σ_i ⟨z_i, z_a⟩ S_i`, i.e. `S_x u = ω_u* x` for `x = z_a`.
pub fn s_for_basis<T: Scalar>(omega: &CocycleData<T>) -> Vec<Mat<T>> {
    let gz = omega.z_metric.matrix();
    let n = omega.g_dim();
    (0..omega.p())
        .map(|a| {
            omega
                .s
                .iter()
                .enumerate()
                .fold(Mat::zeros(n, n), |acc, (i, s)| acc.add(&s.scale(&gz[(i, a)])))
        })
        .collect()
}

/// `D = −Σ ⟨z_i,z_j⟩ S_i S_j`.
pub fn d_operator_product<T: Scalar>(omega: &CocycleData<T>) -> Mat<T> {
    let n = omega.g_dim();
    let gz = omega.z_metric.matrix();
    let mut d = Mat::zeros(n, n);
    for (i, si) in omega.s.iter().enumerate() {
        for (j, sj) in omega.s.iter().enumerate() {
            if !gz[(i, j)].is_zero() {
                d = d.sub(&si.matmul(sj).scale(&gz[(i, j)]));
            }
        }
    }
    d
}

/// `⟨Du, v⟩ = tr(ω_u* ∘ ω_v)`, computed from the values of `ω` on basis pairs.
pub fn d_operator_trace<T: Scalar>(g: &MetricTensor<T>, omega: &CocycleData<T>) -> Mat<T> {
    let n = omega.g_dim();
    let w = omega.values(g);
    let gz = omega.z_metric.matrix();
    // Ω_u[i][b] = ω_i(u, e_b); ω_u* = g⁻¹ Ω_uᵀ G.
    let omega_u = |a: usize| Mat::from_fn(omega.p(), n, |i, b| w[i][(a, b)].clone());
    let stars: Vec<Mat<T>> = (0..n)
        .map(|a| g.inverse().matmul(&omega_u(a).transpose()).matmul(gz))
        .collect();
    let low = Mat::from_fn(n, n, |a, b| stars[a].trace_product(&omega_u(b)));
    g.inverse().matmul(&low)
}

pub fn d_operator<T: Scalar>(t: &AttributeTriple<T>) -> Mat<T> {
    d_operator_product(&t.omega)
}

/// Residual of `ω(ad_u* v, w) + ω(v, ad_u* w) = 0` and of `D` being a derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct OmCheck<T: Scalar> {
    pub om_residual: T,
    pub derivation_residual: T,
}

pub fn check_om_and_derivation<T: Scalar>(t: &AttributeTriple<T>) -> OmCheck<T> {
    om_and_derivation(&t.g, &t.omega)
}

pub fn om_and_derivation<T: Scalar>(g: &MetricLieAlgebra<T>, omega: &CocycleData<T>) -> OmCheck<T> {
    let n = g.dim();
    let w = omega.values(&g.metric);
    let stars: Vec<Mat<T>> = (0..n).map(|i| g.ad_adjoint_basis(i)).collect();
    let mut worst = T::zero();
    for star in &stars {
        for v in 0..n {
            for x in 0..n {
                // ω_i(ad_u* e_v, e_x) + ω_i(e_v, ad_u* e_x)
                for wi in &w {
                    let mut s = T::zero();
                    for k in 0..n {
                        s = s + star[(k, v)].clone() * wi[(k, x)].clone() + star[(k, x)].clone() * wi[(v, k)].clone();
                    }
                    let s = s.abs();
                    if s > worst {
                        worst = s;
                    }
                }
            }
        }
    }
    OmCheck {
        om_residual: worst,
        derivation_residual: g.lie.derivation_residual(&d_operator_product(omega)),
    }
}

/// Ricci curvature of `h` from its attributes, returned in `h`'s coordinates.
pub fn ricci_via_attributes<T: Scalar>(t: &AttributeTriple<T>, tol: &Tolerance) -> Result<CurvatureReport<T>> {
    let m = t.g_dim();
    let p = t.p();
    let n = m + p;
    let g = &t.g;
    let ric_g = ricci(g, tol).ric;
    let dlow = g.metric.matrix().matmul(&d_operator(t));
    let half = T::from_ratio(1, 2);
    let quarter = T::from_ratio(1, 4);
    let sx = s_for_basis(&t.omega);
    let ju = j_operators(g);
    let ric_t = Mat::from_fn(n, n, |a, b| match (a < m, b < m) {
        (true, true) => ric_g[(a, b)].clone() - half.clone() * dlow[(a, b)].clone(),
        (false, false) => -quarter.clone() * sx[a - m].trace_product(&sx[b - m]),
        (true, false) => -quarter.clone() * ju[a].trace_product(&sx[b - m]),
        (false, true) => -quarter.clone() * ju[b].trace_product(&sx[a - m]),
    });
    let tinv = t.embedding.inverse(tol).ok_or(Error::SingularTransform)?;
    let ric = tinv.transpose().matmul(&ric_t).matmul(&tinv);
    Ok(CurvatureReport::from_metric(ric, &t.h_metric))
}

/// `J_{e_a}` on `g`: `J_u v = ad_v* u`.
fn j_operators<T: Scalar>(g: &MetricLieAlgebra<T>) -> Vec<Mat<T>> {
    let n = g.dim();
    let stars: Vec<Mat<T>> = (0..n).map(|i| g.ad_adjoint_basis(i)).collect();
    (0..n)
        .map(|a| Mat::from_fn(n, n, |r, k| stars[k][(r, a)].clone()))
        .collect()
}

/// The three residuals of the Einstein system written on the attributes.
#[derive(Clone, Debug, PartialEq)]
pub struct EsResiduals<T: Scalar> {
    /// `‖Ric_g − λ Id − ½D‖∞`.
    pub ricci_g: T,
    /// `max |tr(J_u S_x)|` over basis vectors.
    pub mixed: T,
    /// `max |tr(S_x S_y) + 4λ⟨x,y⟩_z|`.
    pub center: T,
}

impl<T: Scalar> EsResiduals<T> {
    pub fn max(&self) -> T {
        [&self.ricci_g, &self.mixed, &self.center]
            .into_iter()
            .fold(T::zero(), |a, x| if *x > a { x.clone() } else { a })
    }

    pub fn holds(&self, tol: &Tolerance, scale: f64) -> bool {
        tol.is_zero(&self.max(), scale)
    }
}

pub fn einstein_conditions_es<T: Scalar>(t: &AttributeTriple<T>, lambda: &T, tol: &Tolerance) -> EsResiduals<T> {
    let g = &t.g;
    let m = g.dim();
    let ric_g = ricci(g, tol).ric_op;
    let d = d_operator(t);
    let ricci_g = ric_g
        .sub(&Mat::identity(m).scale(lambda))
        .sub(&d.scale(&T::from_ratio(1, 2)))
        .max_abs();
    let sx = s_for_basis(&t.omega);
    let ju = j_operators(g);
    let mut mixed = T::zero();
    for j in &ju {
        for s in &sx {
            let v = j.trace_product(s).abs();
            if v > mixed {
                mixed = v;
            }
        }
    }
    EsResiduals {
        ricci_g,
        mixed,
        center: center_trace_residual(&sx, &t.omega.z_metric, lambda),
    }
}

fn center_trace_residual<T: Scalar>(sx: &[Mat<T>], z: &MetricTensor<T>, lambda: &T) -> T {
    let four = T::from_i64(4);
    let gz = z.matrix();
    let mut worst = T::zero();
    for (a, sa) in sx.iter().enumerate() {
        for (b, sb) in sx.iter().enumerate() {
            let v = (sa.trace_product(sb) + four.clone() * lambda.clone() * gz[(a, b)].clone()).abs();
            if v > worst {
                worst = v;
            }
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiEinsteinVerdict<T: Scalar> {
    /// `‖Ric_g − λ Id − ½D‖∞`.
    pub ricci_residual: T,
    /// `max |tr(S_x S_y) + 4λ⟨x,y⟩_z|`.
    pub trace_residual: T,
    /// `ker ω ∩ Z(g) = {0}`.
    pub rigid: bool,
    pub holds: bool,
}

pub fn quasi_einstein_check<T: Scalar>(
    g: &MetricLieAlgebra<T>,
    omega: &CocycleData<T>,
    lambda: &T,
    tol: &Tolerance,
) -> QuasiEinsteinVerdict<T> {
    let m = g.dim();
    let ric_g = ricci(g, tol).ric_op;
    let d = d_operator_product(omega);
    let ricci_residual = ric_g
        .sub(&Mat::identity(m).scale(lambda))
        .sub(&d.scale(&T::from_ratio(1, 2)))
        .max_abs();
    let trace_residual = center_trace_residual(&s_for_basis(omega), &omega.z_metric, lambda);
    let rigid = g.lie.center(tol).intersection(&omega.kernel(tol), tol).is_zero();
    let scale = ric_g.max_abs().to_f64().max(d.max_abs().to_f64()).max(1.0);
    QuasiEinsteinVerdict {
        holds: rigid && tol.is_zero(&ricci_residual, scale) && tol.is_zero(&trace_residual, scale),
        ricci_residual,
        trace_residual,
        rigid,
    }
}

/// Soliton verdict for `g` with candidate derivation `½D`, offered only when
/// `ω` satisfies the `ad*`-invariance condition.
pub fn soliton_check<T: Scalar>(t: &AttributeTriple<T>, tol: &Tolerance) -> Option<EinsteinVerdict<T>> {
    let om = check_om_and_derivation(t);
    let scale = t.g.lie.scale().max(1.0) * t.omega.s.iter().map(|s| s.max_abs().to_f64()).fold(1.0, f64::max);
    if !tol.is_zero(&om.om_residual, scale) {
        return None;
    }
    let d = d_operator(t).scale(&T::from_ratio(1, 2));
    Some(einstein_check(&t.g, &EinsteinMode::Soliton(d), tol))
}

/// Blocks of the Einstein system for a 3-step `h`, in orthonormal bases
/// `(e_1,…,e_s)` of `[g,g]` (with `e_1` timelike), `(f_1,…,f_m)` of
/// `[g,g]^⊥` and `(z_1,…,z_p)` of the center.
#[derive(Clone, Debug)]
pub struct ThreeStepBlocks {
    pub s: usize,
    pub m: usize,
    pub p: usize,
    /// `J_i` restricted to `[g,g]^⊥`.
    pub j: Vec<Mat<f64>>,
    /// `B_i : [g,g] → [g,g]^⊥`, an `m×s` matrix.
    pub b: Vec<Mat<f64>>,
    /// `D_i`, skew on `[g,g]^⊥`.
    pub d: Vec<Mat<f64>>,
    /// `max |S_i|` on the `[g,g] → [g,g]` block (zero for a cocycle).
    pub derived_block_residual: f64,
    /// `Z(g) = [g,g]`.
    pub center_is_derived: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThreeStepResiduals {
    pub eq1: f64,
    pub eq2: f64,
    pub eq3: f64,
    /// `Σ tr(D_i²)`.
    pub trace_d_sq: f64,
    /// `−4(2s+m+3p)λ`.
    pub trace_d_sq_predicted: f64,
    /// `Σ tr(D_i²) + 4λ(2s+m+3p) − (−4 tr R₁ + 2 tr R₂ + 3 Σ (R₃)_ii)` where `R_k`
    /// are the residual matrices; zero for any input.
    pub trace_identity_defect: f64,
}

impl ThreeStepBlocks {
    /// `B_i* = η B_iᵀ`.
    pub fn b_star(&self, i: usize) -> Mat<f64> {
        let mut bs = self.b[i].transpose();
        for c in 0..self.m {
            bs[(0, c)] = -bs[(0, c)];
        }
        bs
    }

    pub fn residuals(&self, lambda: f64) -> ThreeStepResiduals {
        let (s, m, p) = (self.s, self.m, self.p);
        let eta = |i: usize| if i == 0 { -1.0 } else { 1.0 };
        let bstar: Vec<Mat<f64>> = (0..p).map(|i| self.b_star(i)).collect();

        let mut r1 = Mat::identity(m).scale(&-lambda);
        for (i, j) in self.j.iter().enumerate() {
            r1 = r1.add(&j.matmul(j).scale(&(0.5 * eta(i))));
        }
        for i in 0..p {
            r1 = r1.add(&self.d[i].matmul(&self.d[i]).sub(&self.b[i].matmul(&bstar[i])).scale(&0.5));
        }

        // Column i of the first term is the image of e_i: Σ_j η_i tr(J_i J_j) e_j.
        let mut r2 = Mat::from_fn(s, s, |jj, i| eta(i) * self.j[i].trace_product(&self.j[jj]));
        for i in 0..p {
            r2 = r2.add(&bstar[i].matmul(&self.b[i]).scale(&2.0));
        }
        r2 = r2.add(&Mat::identity(s).scale(&(4.0 * lambda)));

        let r3 = Mat::from_fn(p, p, |i, j| {
            self.d[i].trace_product(&self.d[j]) - 2.0 * bstar[i].trace_product(&self.b[j])
                + if i == j { 4.0 * lambda } else { 0.0 }
        });

        let trace_d_sq: f64 = self.d.iter().map(|d| d.trace_product(d)).sum();
        let weight = (2 * s + m + 3 * p) as f64;
        let trace_identity_defect =
            trace_d_sq + 4.0 * lambda * weight - (-4.0 * r1.trace() + 2.0 * r2.trace() + 3.0 * r3.trace());
        ThreeStepResiduals {
            eq1: r1.max_abs(),
            eq2: r2.max_abs(),
            eq3: r3.max_abs(),
            trace_d_sq,
            trace_d_sq_predicted: -4.0 * weight * lambda,
            trace_identity_defect,
        }
    }
}

pub fn three_step_blocks<T: Scalar>(t: &AttributeTriple<T>, tol: &Tolerance) -> Result<ThreeStepBlocks> {
    let t = t.to_f64();
    let g = &t.g;
    let class = g.lie.nilpotency_class(tol)?;
    if class != 2 {
        return Err(Error::WrongNilpotencyClass {
            expected: 2,
            found: class,
        });
    }
    let n = g.dim();
    let derived = g.lie.derived_ideal(tol);
    let e = pseudo_orthonormalize(&derived, &g.metric, tol).map_err(|_| Error::DegenerateDerived)?;
    if e.signs.iter().filter(|&&x| x < 0).count() != 1 {
        return Err(Error::DegenerateDerived);
    }
    let perp = orthogonal_complement(&derived, &g.metric, tol);
    if !perp.complementary {
        return Err(Error::DegenerateDerived);
    }
    let f = pseudo_orthonormalize(&perp.space, &g.metric, tol).map_err(|_| Error::DegenerateDerived)?;
    if f.signs.iter().any(|&x| x < 0) {
        return Err(Error::DegenerateDerived);
    }
    let s = e.vectors.len();
    let m = f.vectors.len();
    let cols: Vec<Vector<f64>> = e.vectors.iter().chain(&f.vectors).cloned().collect();
    let o = Mat::from_columns(n, &cols);
    let go = change_basis(g, &o, tol)?;
    let oinv = o.inverse(tol).ok_or(Error::SingularTransform)?;

    let basis = Subspace::from_basis(n, (0..s).map(|i| unit(n, i)).collect());
    let endos: StructureEndos<f64> = crate::curvature::structure_endos(&go, &basis, tol)?;
    let j = endos.j.iter().map(|ji| ji.block(s..n, s..n)).collect();

    let z = orthonormal_center(&t.omega, tol)?;
    let p = z.len();
    let mut b = Vec::with_capacity(p);
    let mut d = Vec::with_capacity(p);
    let mut derived_block_residual: f64 = 0.0;
    for si in &z {
        let so = oinv.matmul(si).matmul(&o);
        derived_block_residual = derived_block_residual.max(so.block(0..s, 0..s).max_abs());
        b.push(so.block(s..n, 0..s));
        d.push(so.block(s..n, s..n));
    }
    let center_is_derived = g.lie.center(tol).same_as(&derived, &Tolerance::new(tol.rel.max(1e-8)));
    Ok(ThreeStepBlocks {
        s,
        m,
        p,
        j,
        b,
        d,
        derived_block_residual,
        center_is_derived,
    })
}

/// `S_i` for an orthonormal basis of the value space of `ω`.
fn orthonormal_center(omega: &CocycleData<f64>, tol: &Tolerance) -> Result<Vec<Mat<f64>>> {
    let p = omega.p();
    let basis = pseudo_orthonormalize(&Subspace::full(p), &omega.z_metric, tol)?;
    // z'_k = Σ_a c[a][k] z_a, so z_a = Σ_k c⁻¹[k][a] z'_k and S'_k = Σ_a c⁻¹[k][a] S_a.
    let c = Mat::from_columns(p, &basis.vectors);
    let cinv = c.inverse(tol).ok_or(Error::SingularTransform)?;
    let n = omega.g_dim();
    Ok((0..p)
        .map(|k| {
            omega
                .s
                .iter()
                .enumerate()
                .fold(Mat::zeros(n, n), |acc, (a, sa)| acc.add(&sa.scale(&cinv[(k, a)])))
        })
        .collect())
}

/// Structural facts tied to an Einstein `h` with nondegenerate center.
#[derive(Clone, Debug, PartialEq)]
pub struct EinsteinStructure {
    pub einstein: bool,
    pub lambda: f64,
    pub class: usize,
    /// `[g,g]_g` nondegenerate of signature `(1, ·)`.
    pub derived_lorentzian: bool,
    /// `Z(g) = [g,g]_g`.
    pub center_equals_derived: bool,
}

impl EinsteinStructure {
    /// Einstein ⇒ `[g,g]` Lorentzian; 3-step Einstein with `λ ≥ 0` ⇒ `Z(g) = [g,g]`.
    pub fn derived_implication_holds(&self, tol: &Tolerance) -> bool {
        if !self.einstein {
            return true;
        }
        self.derived_lorentzian && (self.class != 3 || self.lambda < -tol.rel || self.center_equals_derived)
    }

    /// 3-step Einstein ⇒ `λ ≥ 0`.
    pub fn lambda_implication_holds(&self, tol: &Tolerance) -> bool {
        !(self.einstein && self.class == 3) || self.lambda >= -tol.rel
    }
}

pub fn einstein_structure<T: Scalar>(h: &MetricLieAlgebra<T>, tol: &Tolerance) -> Result<EinsteinStructure> {
    let t = decompose(h, tol)?;
    let v = einstein_check(h, &EinsteinMode::Einstein, tol);
    let class = h.lie.nilpotency_class(tol)?;
    let derived = t.g.lie.derived_ideal(tol);
    let derived_lorentzian = derived.is_nondegenerate(&t.g.metric, tol)
        && inertia(&derived.restricted_metric(&t.g.metric), tol).map(|(neg, _)| neg == 1).unwrap_or(false);
    let center_equals_derived = t.g.lie.center(tol).same_as(&derived, tol);
    Ok(EinsteinStructure {
        einstein: v.holds,
        lambda: v.lambda.to_f64(),
        class,
        derived_lorentzian,
        center_equals_derived,
    })
}

/// Outcome of testing whether `ω = −α ∘ [,]_g` for some linear `α : g → Z(h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoboundaryReport<T: Scalar> {
    pub is_coboundary: bool,
    /// `α` as a `p×m` matrix when one exists.
    pub alpha: Option<Mat<T>>,
    /// `λ*` of `h`; must vanish for a coboundary when `h` is Einstein.
    pub lambda: T,
    pub einstein: bool,
}

pub fn coboundary_check<T: Scalar>(t: &AttributeTriple<T>, tol: &Tolerance) -> Result<CoboundaryReport<T>> {
    let g = &t.g;
    let m = g.dim();
    let p = t.p();
    let w = t.omega.values(&g.metric);
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
    // Row (pair, i), column (i', k): coefficient of α[i'][k].
    let rows = pairs.len() * p;
    let cols = p * m;
    let mut lhs = Mat::zeros(rows.max(1), cols.max(1));
    let mut rhs = Mat::zeros(rows.max(1), 1);
    for (r, &(a, b)) in pairs.iter().enumerate() {
        for i in 0..p {
            for k in 0..m {
                lhs[(r * p + i, i * m + k)] = g.lie.structure(a, b, k);
            }
            rhs[(r * p + i, 0)] = -w[i][(a, b)].clone();
        }
    }
    let alpha = lhs
        .solve(&rhs, tol)
        .map(|x| Mat::from_fn(p, m, |i, k| x[(i * m + k, 0)].clone()));
    let h = t.reconstruct(tol)?;
    let v = einstein_check(&h, &EinsteinMode::Einstein, tol);
    Ok(CoboundaryReport {
        is_coboundary: alpha.is_some(),
        alpha,
        lambda: v.lambda,
        einstein: v.holds,
    })
}
