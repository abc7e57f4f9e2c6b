//! Lie algebras presented by structure constants, and metric Lie algebras.

use crate::error::{Error, Result};
use crate::matrix::{unit, Mat, Vector};
use crate::pseudolinalg::{MetricTensor, Subspace};
use crate::scalar::{max_abs, Scalar, Tolerance};

/// `[e_i, e_j] = Σ_k c(i,j,k) e_k`, stored for `i < j` only.
#[derive(Clone, Debug, PartialEq)]
pub struct LiePresentation<T: Scalar> {
    n: usize,
    c: Vec<T>,
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl<T: Scalar> LiePresentation<T> {
    pub fn abelian(n: usize) -> Self {
        Self {
            n,
            c: vec![T::zero(); n * n.saturating_sub(1) / 2 * n],
        }
    }

    /// Build from `(i, j, k, c)` records meaning `[e_i, e_j] += c e_k`
    /// (0-based). Records with `i > j` are stored with the sign flipped.
    pub fn from_brackets(n: usize, entries: impl IntoIterator<Item = (usize, usize, usize, T)>) -> Result<Self> {
        let mut p = Self::abelian(n);
        for (i, j, k, c) in entries {
            if i >= n || j >= n || k >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: i.max(j).max(k) + 1,
                });
            }
            if i == j {
                if c.is_zero() {
                    continue;
                }
                return Err(Error::SizeMismatch(format!("bracket [e{i},e{i}] must vanish")));
            }
            p.add(i, j, k, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Coefficient of `e_k` in `[e_i, e_j]`.
    pub fn structure(&self, i: usize, j: usize, k: usize) -> T {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.c[pair_index(self.n, i, j) * self.n + k].clone(),
            Greater => -self.c[pair_index(self.n, j, i) * self.n + k].clone(),
            Equal => T::zero(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: T) {
        assert!(i != j, "diagonal bracket");
        if i < j {
            self.c[pair_index(self.n, i, j) * self.n + k] = v;
        } else {
            self.c[pair_index(self.n, j, i) * self.n + k] = -v;
        }
    }

    pub fn add(&mut self, i: usize, j: usize, k: usize, v: T) {
        let cur = self.structure(i, j, k);
        self.set(i, j, k, cur + v);
    }

    /// Nonzero records `(i, j, k, c)` with `i < j`, in lexicographic order.
    pub fn entries(&self) -> Vec<(usize, usize, usize, T)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                for k in 0..self.n {
                    let c = self.structure(i, j, k);
                    if !c.is_zero() {
                        out.push((i, j, k, c));
                    }
                }
            }
        }
        out
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> Vector<T> {
        (0..self.n).map(|k| self.structure(i, j, k)).collect()
    }

    pub fn bracket(&self, u: &[T], v: &[T]) -> Result<Vector<T>> {
        self.check_len(u)?;
        self.check_len(v)?;
        Ok(self.bracket_unchecked(u, v))
    }

    pub(crate) fn bracket_unchecked(&self, u: &[T], v: &[T]) -> Vector<T> {
        let mut out = vec![T::zero(); self.n];
        for i in 0..self.n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..self.n {
                if i == j || v[j].is_zero() {
                    continue;
                }
                let w = u[i].clone() * v[j].clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.structure(i, j, k);
                    if !c.is_zero() {
                        *o = o.clone() + w.clone() * c;
                    }
                }
            }
        }
        out
    }

    fn check_len(&self, v: &[T]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Matrix of `ad_{e_i} = [e_i, ·]`.
    pub fn ad_basis(&self, i: usize) -> Mat<T> {
        Mat::from_fn(self.n, self.n, |k, j| self.structure(i, j, k))
    }

    /// Matrix of `ad_u`.
    pub fn ad(&self, u: &[T]) -> Mat<T> {
        let mut m = Mat::zeros(self.n, self.n);
        for (i, ui) in u.iter().enumerate() {
            if !ui.is_zero() {
                m = m.add(&self.ad_basis(i).scale(ui));
            }
        }
        m
    }

    /// `max_{i,j,k} ‖[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]‖∞`.
    pub fn jacobi_residual(&self) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                let ij = self.bracket_basis(i, j);
                for k in j + 1..n {
                    let jk = self.bracket_basis(j, k);
                    let ki = self.bracket_basis(k, i);
                    let a = self.bracket_unchecked(&ij, &unit(n, k));
                    let b = self.bracket_unchecked(&jk, &unit(n, i));
                    let c = self.bracket_unchecked(&ki, &unit(n, j));
                    let s: Vec<T> = (0..n).map(|l| a[l].clone() + b[l].clone() + c[l].clone()).collect();
                    let m = max_abs(&s);
                    if m > worst {
                        worst = m;
                    }
                }
            }
        }
        worst
    }

    /// Span of `[a, b]` for `a ∈ A`, `b ∈ B`.
    pub fn bracket_span(&self, a: &Subspace<T>, b: &Subspace<T>, tol: &Tolerance) -> Subspace<T> {
        let mut vecs = Vec::new();
        for u in a.basis() {
            for v in b.basis() {
                vecs.push(self.bracket_unchecked(u, v));
            }
        }
        Subspace::span(self.n, vecs, tol)
    }

    pub fn derived_ideal(&self, tol: &Tolerance) -> Subspace<T> {
        let vecs = (0..self.n).flat_map(|i| (i + 1..self.n).map(move |j| (i, j))).map(|(i, j)| self.bracket_basis(i, j));
        Subspace::span(self.n, vecs, tol)
    }

    /// Kernel of `u ↦ ad_u`.
    pub fn center(&self, tol: &Tolerance) -> Subspace<T> {
        let n = self.n;
        // Row (j,k), column i: c(i,j,k).
        let m = Mat::from_fn(n * n, n, |r, i| self.structure(i, r / n, r % n));
        Subspace::from_basis(n, m.nullspace(tol))
    }

    /// `C¹ = h ⊇ C² = [h,h] ⊇ …`, ending at the first zero term.
    pub fn lower_central_series(&self, tol: &Tolerance) -> Result<CentralSeries<T>> {
        let full = Subspace::full(self.n);
        let mut terms = vec![full.clone()];
        for _ in 0..=self.n {
            let last = terms.last().expect("nonempty");
            if last.is_zero() {
                return Ok(CentralSeries { terms });
            }
            let next = self.bracket_span(last, &full, tol);
            if next.dim() == last.dim() {
                return Err(Error::NotNilpotent(next.dim()));
            }
            terms.push(next);
        }
        Err(Error::NotNilpotent(terms.last().map_or(0, Subspace::dim)))
    }

    pub fn nilpotency_class(&self, tol: &Tolerance) -> Result<usize> {
        Ok(self.lower_central_series(tol)?.class())
    }

    /// `max ‖D[e_i,e_j] − [De_i,e_j] − [e_i,De_j]‖∞`; zero iff `D` is a derivation.
    pub fn derivation_residual(&self, d: &Mat<T>) -> T {
        let n = self.n;
        let cols = d.columns();
        let mut worst = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                let lhs = d.mul_vec(&self.bracket_basis(i, j));
                let a = self.bracket_unchecked(&cols[i], &unit(n, j));
                let b = self.bracket_unchecked(&unit(n, i), &cols[j]);
                for k in 0..n {
                    let r = (lhs[k].clone() - a[k].clone() - b[k].clone()).abs();
                    if r > worst {
                        worst = r;
                    }
                }
            }
        }
        worst
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LiePresentation<U> {
        LiePresentation {
            n: self.n,
            c: self.c.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> LiePresentation<f64> {
        self.map(Scalar::to_f64)
    }

    /// Exact reinterpretation of float constants (or the reverse).
    pub fn convert<U: Scalar>(&self) -> Result<LiePresentation<U>> {
        let mut c = Vec::with_capacity(self.c.len());
        for x in &self.c {
            c.push(U::from_f64(x.to_f64()).ok_or_else(|| Error::Irrational(x.to_string()))?);
        }
        Ok(LiePresentation { n: self.n, c })
    }

    /// Largest absolute structure constant.
    pub fn scale(&self) -> f64 {
        max_abs(&self.c).to_f64()
    }
}

/// Lower central series `C¹ ⊇ C² ⊇ … ⊇ C^{k+1} = 0`.
#[derive(Clone, Debug)]
pub struct CentralSeries<T: Scalar> {
    pub terms: Vec<Subspace<T>>,
}

impl<T: Scalar> CentralSeries<T> {
    /// Nilpotency class: the `k` with `C^k ≠ 0 = C^{k+1}`.
    pub fn class(&self) -> usize {
        self.terms.len() - 1
    }

    /// Dimension of `C^k` (1-based, `C¹ = h`).
    pub fn dim_of(&self, k: usize) -> usize {
        self.terms.get(k - 1).map_or(0, Subspace::dim)
    }
}

/// Lie algebra together with a pseudo-Euclidean metric.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricLieAlgebra<T: Scalar> {
    pub lie: LiePresentation<T>,
    pub metric: MetricTensor<T>,
}

impl<T: Scalar> MetricLieAlgebra<T> {
    pub fn new(lie: LiePresentation<T>, metric: MetricTensor<T>) -> Result<Self> {
        if lie.dim() != metric.dim() {
            return Err(Error::DimensionMismatch {
                expected: lie.dim(),
                got: metric.dim(),
            });
        }
        Ok(Self { lie, metric })
    }

    pub fn dim(&self) -> usize {
        self.lie.dim()
    }

    pub fn to_f64(&self) -> MetricLieAlgebra<f64> {
        MetricLieAlgebra {
            lie: self.lie.to_f64(),
            metric: self.metric.to_f64(),
        }
    }

    pub fn convert<U: Scalar>(&self, tol: &Tolerance) -> Result<MetricLieAlgebra<U>> {
        MetricLieAlgebra::new(self.lie.convert()?, self.metric.convert(tol)?)
    }

    /// `ad_u* = g⁻¹ ad_uᵀ g` for basis vector `e_i`.
    pub fn ad_adjoint_basis(&self, i: usize) -> Mat<T> {
        let g = self.metric.matrix();
        self.metric.inverse().matmul(&self.lie.ad_basis(i).transpose()).matmul(g)
    }
}

/// 2-cocycle data `ω(u,v) = Σ_i ⟨S_i u, v⟩ z_i` with `z_metric` the Gram
/// matrix of `(z_1, …, z_p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleData<T: Scalar> {
    pub s: Vec<Mat<T>>,
    pub z_metric: MetricTensor<T>,
}

impl<T: Scalar> CocycleData<T> {
    pub fn new(s: Vec<Mat<T>>, z_metric: MetricTensor<T>) -> Result<Self> {
        if s.len() != z_metric.dim() {
            return Err(Error::DimensionMismatch {
                expected: z_metric.dim(),
                got: s.len(),
            });
        }
        if let Some(first) = s.first() {
            let n = first.nrows();
            if s.iter().any(|m| m.nrows() != n || m.ncols() != n) {
                return Err(Error::SizeMismatch("cocycle matrices must share one square shape".into()));
            }
        }
        Ok(Self { s, z_metric })
    }

    /// Cocycle with the given values on basis pairs: `values[i][(a,b)] = ω_i(e_a, e_b)`.
    /// `values` must be antisymmetric.
    pub fn from_values(g: &MetricTensor<T>, values: Vec<Mat<T>>, z_metric: MetricTensor<T>) -> Result<Self> {
        // ω_i(u,v) = uᵀ W_i v = ⟨S_i u, v⟩ = uᵀ S_iᵀ g v  ⇒  S_i = g⁻¹ W_iᵀ.
        let s = values.iter().map(|w| g.inverse().matmul(&w.transpose())).collect();
        Self::new(s, z_metric)
    }

    pub fn zero(g_dim: usize, z_metric: MetricTensor<T>) -> Self {
        let p = z_metric.dim();
        Self {
            s: vec![Mat::zeros(g_dim, g_dim); p],
            z_metric,
        }
    }

    pub fn p(&self) -> usize {
        self.s.len()
    }

    pub fn g_dim(&self) -> usize {
        self.s.first().map_or(0, Mat::nrows)
    }

    /// Values on basis pairs: `W_i = S_iᵀ g`, so `ω_i(e_a, e_b) = W_i[a][b]`.
    pub fn values(&self, g: &MetricTensor<T>) -> Vec<Mat<T>> {
        self.s.iter().map(|s| s.transpose().matmul(g.matrix())).collect()
    }

    /// `ω(u, v)` in `z`-coordinates.
    pub fn omega(&self, g: &MetricTensor<T>, u: &[T], v: &[T]) -> Vector<T> {
        self.s.iter().map(|s| g.inner(&s.mul_vec(u), v)).collect()
    }

    /// Largest deviation of any `S_i` from metric skewness (`S* = −S`).
    pub fn skew_residual(&self, g: &MetricTensor<T>) -> T {
        self.values(g)
            .iter()
            .map(|w| w.add(&w.transpose()).max_abs())
            .fold(T::zero(), |a, x| if x > a { x } else { a })
    }

    /// `max ‖ω([u,v],w) + ω([v,w],u) + ω([w,u],v)‖∞` over basis triples.
    pub fn cocycle_residual(&self, lie: &LiePresentation<T>, g: &MetricTensor<T>) -> T {
        let n = lie.dim();
        let w = self.values(g);
        let omega_vec = |x: &[T], b: usize| -> Vec<T> {
            w.iter()
                .map(|wi| (0..n).fold(T::zero(), |acc, a| acc + x[a].clone() * wi[(a, b)].clone()))
                .collect()
        };
        let mut worst = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let a = omega_vec(&lie.bracket_basis(i, j), k);
                    let b = omega_vec(&lie.bracket_basis(j, k), i);
                    let c = omega_vec(&lie.bracket_basis(k, i), j);
                    for l in 0..self.p() {
                        let s = (a[l].clone() + b[l].clone() + c[l].clone()).abs();
                        if s > worst {
                            worst = s;
                        }
                    }
                }
            }
        }
        worst
    }

    /// `ker ω = {u : ω(u, ·) = 0} = ⋂ ker S_i`.
    pub fn kernel(&self, tol: &Tolerance) -> Subspace<T> {
        let n = self.g_dim();
        if self.s.is_empty() {
            return Subspace::full(n);
        }
        let m = Mat::from_fn(n * self.p(), n, |r, c| self.s[r / n][(r % n, c)].clone());
        Subspace::from_basis(n, m.nullspace(tol))
    }

    pub fn scaled(&self, f: &T) -> Self {
        Self {
            s: self.s.iter().map(|m| m.scale(f)).collect(),
            z_metric: self.z_metric.clone(),
        }
    }

    pub fn to_f64(&self) -> CocycleData<f64> {
        CocycleData {
            s: self.s.iter().map(Mat::to_f64).collect(),
            z_metric: self.z_metric.to_f64(),
        }
    }
}

/// Result of [`central_extension`].
#[derive(Clone, Debug)]
pub struct CentralExtension<T: Scalar> {
    pub algebra: MetricLieAlgebra<T>,
    /// Whether `Z(g) ∩ ker ω = {0}` holds.
    pub rigid: bool,
}

/// `h = g ⊕ R^p` with `[u,v] = [u,v]_g + ω(u,v)` and metric `g ⊕ z_metric`.
/// The extension coordinates come last.
pub fn central_extension<T: Scalar>(
    g: &MetricLieAlgebra<T>,
    omega: &CocycleData<T>,
    tol: &Tolerance,
) -> Result<CentralExtension<T>> {
    let m = g.dim();
    if omega.g_dim() != m && omega.p() > 0 {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: omega.g_dim(),
        });
    }
    let scale = omega.s.iter().map(|s| s.max_abs().to_f64()).fold(g.lie.scale(), f64::max).max(1.0);
    let skew = omega.skew_residual(&g.metric);
    if !tol.is_zero(&skew, scale) {
        return Err(Error::NotSkew);
    }
    let res = omega.cocycle_residual(&g.lie, &g.metric);
    if !tol.is_zero(&res, scale * scale) {
        return Err(Error::NotACocycle(res.to_f64()));
    }
    let p = omega.p();
    let n = m + p;
    let mut lie = LiePresentation::abelian(n);
    for (i, j, k, c) in g.lie.entries() {
        lie.set(i, j, k, c);
    }
    for (l, w) in omega.values(&g.metric).iter().enumerate() {
        for a in 0..m {
            for b in a + 1..m {
                if !w[(a, b)].is_zero() {
                    lie.set(a, b, m + l, w[(a, b)].clone());
                }
            }
        }
    }
    let zg = omega.z_metric.matrix();
    let gm = g.metric.matrix();
    let metric = Mat::from_fn(n, n, |i, j| match (i < m, j < m) {
        (true, true) => gm[(i, j)].clone(),
        (false, false) => zg[(i - m, j - m)].clone(),
        _ => T::zero(),
    });
    let algebra = MetricLieAlgebra::new(lie, MetricTensor::new(metric, tol)?)?;
    let rigid = g.lie.center(tol).intersection(&omega.kernel(tol), tol).is_zero();
    Ok(CentralExtension { algebra, rigid })
}

/// Transport to the basis `f_k = Σ_i t[i][k] e_i` (columns of `t`).
pub fn change_basis<T: Scalar>(a: &MetricLieAlgebra<T>, t: &Mat<T>, tol: &Tolerance) -> Result<MetricLieAlgebra<T>> {
    let n = a.dim();
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: t.nrows(),
        });
    }
    let tinv = t.inverse(tol).ok_or(Error::SingularTransform)?;
    let cols = t.columns();
    let mut lie = LiePresentation::abelian(n);
    for i in 0..n {
        for j in i + 1..n {
            let b = tinv.mul_vec(&a.lie.bracket_unchecked(&cols[i], &cols[j]));
            for (k, c) in b.into_iter().enumerate() {
                if !c.is_zero() {
                    lie.set(i, j, k, c);
                }
            }
        }
    }
    let metric = a.metric.transported(t, tol)?;
    MetricLieAlgebra::new(lie, metric)
}
