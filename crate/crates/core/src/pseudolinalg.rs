//! Pseudo-Euclidean linear algebra: metrics of arbitrary signature,
//! adjoints, orthogonal complements and pseudo-orthonormal bases.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::matrix::{dot, Mat, Vector};
use crate::scalar::{Scalar, Tolerance};

/// Nondegenerate symmetric bilinear form on `R^n`, with its inverse cached.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTensor<T: Scalar> {
    g: Mat<T>,
    inv: Mat<T>,
}

impl<T: Scalar> MetricTensor<T> {
    pub fn new(g: Mat<T>, tol: &Tolerance) -> Result<Self> {
        if !g.is_square() {
            return Err(Error::SizeMismatch(format!(
                "metric must be square, got {}x{}",
                g.nrows(),
                g.ncols()
            )));
        }
        let n = g.nrows();
        let scale = g.max_abs().to_f64();
        for i in 0..n {
            for j in i + 1..n {
                let d = g[(i, j)].clone() - g[(j, i)].clone();
                if !tol.is_zero(&d, scale) {
                    return Err(Error::AsymmetricMetric(i, j));
                }
            }
        }
        // Symmetrise float input so later identities are not polluted by
        // round-off in the stored matrix.
        let g = if T::is_exact() {
            g
        } else {
            let half = T::from_ratio(1, 2);
            g.add(&g.transpose()).scale(&half)
        };
        if is_degenerate(&g, tol) {
            return Err(Error::DegenerateMetric);
        }
        let inv = g.inverse(tol).ok_or(Error::DegenerateMetric)?;
        Ok(Self { g, inv })
    }

    pub fn diagonal(entries: &[T]) -> Result<Self> {
        Self::new(Mat::diagonal(entries), &Tolerance::default())
    }

    pub fn euclidean(n: usize) -> Self {
        Self {
            g: Mat::identity(n),
            inv: Mat::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.g
    }

    pub fn inverse(&self) -> &Mat<T> {
        &self.inv
    }

    pub fn inner(&self, u: &[T], v: &[T]) -> T {
        dot(u, &self.g.mul_vec(v))
    }

    /// `⟨u, ·⟩` as a covector.
    pub fn lower(&self, u: &[T]) -> Vector<T> {
        self.g.mul_vec(u)
    }

    /// Gram matrix of a family of vectors.
    pub fn gram(&self, vectors: &[Vector<T>]) -> Mat<T> {
        let lowered: Vec<_> = vectors.iter().map(|v| self.lower(v)).collect();
        Mat::from_fn(vectors.len(), vectors.len(), |i, j| dot(&vectors[i], &lowered[j]))
    }

    /// Metric in a new basis whose vectors are the columns of `t`: `tᵀ g t`.
    pub fn transported(&self, t: &Mat<T>, tol: &Tolerance) -> Result<Self> {
        Self::new(t.transpose().matmul(&self.g).matmul(t), tol)
    }

    pub fn to_f64(&self) -> MetricTensor<f64> {
        MetricTensor {
            g: self.g.to_f64(),
            inv: self.inv.to_f64(),
        }
    }

    /// Reinterpret a float metric exactly (every double is rational).
    pub fn convert<U: Scalar>(&self, tol: &Tolerance) -> Result<MetricTensor<U>> {
        let g = convert_mat(&self.g)?;
        MetricTensor::new(g, tol)
    }
}

pub(crate) fn convert_mat<T: Scalar, U: Scalar>(m: &Mat<T>) -> Result<Mat<U>> {
    let mut data = Vec::with_capacity(m.nrows() * m.ncols());
    for x in m.entries() {
        data.push(U::from_f64(x.to_f64()).ok_or_else(|| Error::Irrational(x.to_string()))?);
    }
    Ok(Mat::from_fn(m.nrows(), m.ncols(), |i, j| data[i * m.ncols() + j].clone()))
}

/// Degeneracy test: exact `det = 0`, or in float mode
/// `σ_min ≤ rel · σ_max`.
pub fn is_degenerate<T: Scalar>(g: &Mat<T>, tol: &Tolerance) -> bool {
    let n = g.nrows();
    if n == 0 {
        return false;
    }
    if T::is_exact() {
        return g.determinant().is_zero();
    }
    let sv = g.to_nalgebra().singular_values();
    let top = sv.max();
    top == 0.0 || sv.min() <= tol.rel * top
}

/// Sylvester inertia `(negative, positive)` of a symmetric matrix.
pub fn inertia<T: Scalar>(g: &Mat<T>, tol: &Tolerance) -> Result<(usize, usize)> {
    let n = g.nrows();
    if T::is_exact() {
        let (neg, pos, zero) = exact_inertia(g);
        if zero > 0 {
            return Err(Error::DegenerateMetric);
        }
        return Ok((neg, pos));
    }
    let eig = SymmetricEigen::new(g.to_nalgebra()).eigenvalues;
    let scale = eig.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let mut neg = 0;
    let mut pos = 0;
    for &e in eig.iter() {
        if e.abs() <= tol.rel * scale || scale == 0.0 {
            return Err(Error::DegenerateMetric);
        }
        if e < 0.0 {
            neg += 1;
        } else {
            pos += 1;
        }
    }
    debug_assert_eq!(neg + pos, n);
    Ok((neg, pos))
}

/// Signature of a metric as `(negative, positive)` counts.
pub fn signature<T: Scalar>(m: &MetricTensor<T>, tol: &Tolerance) -> Result<(usize, usize)> {
    inertia(m.matrix(), tol)
}

/// Congruence diagonalisation over an exact field: returns
/// `(negative, positive, zero)` diagonal counts.
fn exact_inertia<T: Scalar>(g: &Mat<T>) -> (usize, usize, usize) {
    let mut a = g.clone();
    let mut n = a.nrows();
    let (mut neg, mut pos) = (0, 0);
    while n > 0 {
        let pivot = (0..n).find(|&i| !a[(i, i)].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                let off = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| !a[(i, j)].is_zero());
                match off {
                    // a_ii = a_jj = 0, a_ij ≠ 0: row/col i += row/col j makes a_ii = 2 a_ij.
                    Some((i, j)) => {
                        for k in 0..n {
                            let v = a[(i, k)].clone() + a[(j, k)].clone();
                            a[(i, k)] = v;
                        }
                        for k in 0..n {
                            let v = a[(k, i)].clone() + a[(k, j)].clone();
                            a[(k, i)] = v;
                        }
                        i
                    }
                    None => return (neg, pos, n),
                }
            }
        };
        let d = a[(p, p)].clone();
        if d > T::zero() {
            pos += 1;
        } else {
            neg += 1;
        }
        // Schur complement on the remaining indices.
        let rest: Vec<usize> = (0..n).filter(|&i| i != p).collect();
        let next = Mat::from_fn(n - 1, n - 1, |i, j| {
            let (ri, rj) = (rest[i], rest[j]);
            a[(ri, rj)].clone() - a[(ri, p)].clone() * a[(p, rj)].clone() / d.clone()
        });
        a = next;
        n -= 1;
    }
    (neg, pos, 0)
}

/// `F* = g⁻¹ Fᵀ g`, so that `⟨F* x, y⟩ = ⟨x, F y⟩`.
pub fn adjoint<T: Scalar>(f: &Mat<T>, m: &MetricTensor<T>) -> Result<Mat<T>> {
    if f.nrows() != m.dim() || f.ncols() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: f.nrows(),
        });
    }
    Ok(m.inverse().matmul(&f.transpose()).matmul(m.matrix()))
}

/// Linear subspace of `R^ambient` given by an independent basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<T: Scalar> {
    ambient: usize,
    basis: Vec<Vector<T>>,
}

impl<T: Scalar> Subspace<T> {
    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            basis: (0..ambient).map(|i| crate::matrix::unit(ambient, i)).collect(),
        }
    }

    /// Span of `vectors`, keeping the first independent ones in order.
    pub fn span(ambient: usize, vectors: impl IntoIterator<Item = Vector<T>>, tol: &Tolerance) -> Self {
        let mut basis: Vec<Vector<T>> = Vec::new();
        for v in vectors {
            assert_eq!(v.len(), ambient, "vector has wrong length");
            let mut trial = basis.clone();
            trial.push(v);
            if Mat::from_columns(ambient, &trial).rank(tol) == trial.len() {
                basis = trial;
            }
        }
        Self { ambient, basis }
    }

    /// Trusts the caller that `basis` is independent.
    pub fn from_basis(ambient: usize, basis: Vec<Vector<T>>) -> Self {
        Self { ambient, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vector<T>] {
        &self.basis
    }

    /// Basis vectors as the columns of an `ambient × dim` matrix.
    pub fn basis_matrix(&self) -> Mat<T> {
        Mat::from_columns(self.ambient, &self.basis)
    }

    pub fn contains(&self, v: &[T], tol: &Tolerance) -> bool {
        let mut all = self.basis.clone();
        all.push(v.to_vec());
        Mat::from_columns(self.ambient, &all).rank(tol) == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Self, tol: &Tolerance) -> bool {
        let mut all = other.basis.clone();
        all.extend(self.basis.iter().cloned());
        Mat::from_columns(self.ambient, &all).rank(tol) == other.dim()
    }

    /// Equality by mutual containment.
    pub fn same_as(&self, other: &Self, tol: &Tolerance) -> bool {
        self.dim() == other.dim() && self.is_subspace_of(other, tol) && other.is_subspace_of(self, tol)
    }

    pub fn sum(&self, other: &Self, tol: &Tolerance) -> Self {
        Self::span(self.ambient, self.basis.iter().chain(&other.basis).cloned(), tol)
    }

    pub fn intersection(&self, other: &Self, tol: &Tolerance) -> Self {
        // Solve Σ a_i u_i − Σ b_j w_j = 0; the u-part of each solution spans the intersection.
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ambient);
        }
        let k = self.dim();
        let m = Mat::from_fn(self.ambient, k + other.dim(), |i, j| {
            if j < k {
                self.basis[j][i].clone()
            } else {
                -other.basis[j - k][i].clone()
            }
        });
        let vecs = m.nullspace(tol).into_iter().map(|coeffs| {
            let mut v = vec![T::zero(); self.ambient];
            for (a, u) in coeffs.iter().take(k).zip(&self.basis) {
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi = vi.clone() + a.clone() * ui.clone();
                }
            }
            v
        });
        Self::span(self.ambient, vecs, tol)
    }

    /// Gram matrix of the basis under `m`.
    pub fn restricted_metric(&self, m: &MetricTensor<T>) -> Mat<T> {
        m.gram(&self.basis)
    }

    pub fn is_nondegenerate(&self, m: &MetricTensor<T>, tol: &Tolerance) -> bool {
        !is_degenerate(&self.restricted_metric(m), tol)
    }

    /// Coordinates of `v` in this basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[T], tol: &Tolerance) -> Option<Vector<T>> {
        let b = Mat::from_columns(self.ambient, &[v.to_vec()]);
        self.basis_matrix().solve(&b, tol).map(|x| x.column(0))
    }

    pub fn to_f64(&self) -> Subspace<f64> {
        Subspace {
            ambient: self.ambient,
            basis: self
                .basis
                .iter()
                .map(|v| v.iter().map(Scalar::to_f64).collect())
                .collect(),
        }
    }
}

/// Orthogonal complement together with whether it is a genuine complement
/// (the input subspace nondegenerate).
#[derive(Clone, Debug)]
pub struct Complement<T: Scalar> {
    pub space: Subspace<T>,
    pub complementary: bool,
}

/// `{v : ⟨v, s⟩ = 0}`. The basis comes from the canonical nullspace of
/// `Bᵀ g`, so it is deterministic.
pub fn orthogonal_complement<T: Scalar>(s: &Subspace<T>, m: &MetricTensor<T>, tol: &Tolerance) -> Complement<T> {
    let n = m.dim();
    if s.is_zero() {
        return Complement {
            space: Subspace::full(n),
            complementary: true,
        };
    }
    let rows: Vec<Vector<T>> = s.basis().iter().map(|b| m.lower(b)).collect();
    let space = Subspace::from_basis(n, Mat::from_rows(rows).nullspace(tol));
    Complement {
        complementary: s.is_nondegenerate(m, tol),
        space,
    }
}

/// Strict form: errors with `DegenerateSubspace` unless `s ⊕ s^⊥ = V`.
pub fn orthogonal_complement_strict<T: Scalar>(
    s: &Subspace<T>,
    m: &MetricTensor<T>,
    tol: &Tolerance,
) -> Result<Subspace<T>> {
    let c = orthogonal_complement(s, m, tol);
    if c.complementary {
        Ok(c.space)
    } else {
        Err(Error::DegenerateSubspace)
    }
}

/// Basis with `⟨b_i, b_j⟩ = signs[i] δ_ij`, timelike vectors first.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis<T: Scalar> {
    pub vectors: Vec<Vector<T>>,
    pub signs: Vec<i8>,
}

/// Pseudo-Gram–Schmidt without normalisation. Each step pivots on the
/// remaining vector with the largest `|⟨v,v⟩|`; when every remaining vector
/// is null, two of them are combined into a non-null one.
/// Returns the orthogonal vectors and their squared norms, in pivot order.
pub fn orthogonalize<T: Scalar>(
    s: &Subspace<T>,
    m: &MetricTensor<T>,
    tol: &Tolerance,
) -> Result<Vec<(Vector<T>, T)>> {
    let mut rest: Vec<Vector<T>> = s.basis().to_vec();
    let scale = {
        let gm = s.restricted_metric(m);
        gm.max_abs().to_f64()
    };
    let mut out = Vec::new();
    while !rest.is_empty() {
        let norms: Vec<T> = rest.iter().map(|v| m.inner(v, v)).collect();
        let (best, best_abs) = norms
            .iter()
            .enumerate()
            .map(|(i, x)| (i, x.to_f64().abs()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let pivot = if !tol.is_zero(&norms[best], scale) && best_abs > 0.0 {
            rest.remove(best)
        } else {
            // All remaining vectors are null: find a pair with ⟨v_i, v_j⟩ ≠ 0.
            let mut found = None;
            'outer: for i in 0..rest.len() {
                for j in i + 1..rest.len() {
                    let ip = m.inner(&rest[i], &rest[j]);
                    if !tol.is_zero(&ip, scale) {
                        found = Some((i, j));
                        break 'outer;
                    }
                }
            }
            let (i, j) = found.ok_or(Error::DegenerateSubspace)?;
            let combined: Vector<T> = rest[i].iter().zip(&rest[j]).map(|(a, b)| a.clone() + b.clone()).collect();
            rest.remove(i);
            combined
        };
        let nn = m.inner(&pivot, &pivot);
        if tol.is_zero(&nn, scale) {
            return Err(Error::DegenerateSubspace);
        }
        let lowered = m.lower(&pivot);
        for v in rest.iter_mut() {
            let c = dot(v, &lowered) / nn.clone();
            for (vi, pi) in v.iter_mut().zip(&pivot) {
                *vi = vi.clone() - c.clone() * pi.clone();
            }
        }
        out.push((pivot, nn));
    }
    Ok(out)
}

/// Pseudo-orthonormal basis of `s`; errors with `Irrational` in exact mode
/// when a norm has no rational square root.
pub fn pseudo_orthonormalize<T: Scalar>(
    s: &Subspace<T>,
    m: &MetricTensor<T>,
    tol: &Tolerance,
) -> Result<OrthonormalBasis<T>> {
    let orth = orthogonalize(s, m, tol)?;
    let mut timelike = Vec::new();
    let mut spacelike = Vec::new();
    for (v, nn) in orth {
        let neg = nn < T::zero();
        let len = nn.abs().sqrt().ok_or_else(|| Error::Irrational(format!("sqrt({})", nn.abs())))?;
        let unit: Vector<T> = v.iter().map(|x| x.clone() / len.clone()).collect();
        if neg {
            timelike.push(unit);
        } else {
            spacelike.push(unit);
        }
    }
    let signs = std::iter::repeat_n(-1, timelike.len())
        .chain(std::iter::repeat_n(1, spacelike.len()))
        .collect();
    timelike.extend(spacelike);
    Ok(OrthonormalBasis {
        vectors: timelike,
        signs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::unit;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn l6_19_metric(alpha: f64) -> MetricTensor<f64> {
        let a2 = alpha * alpha;
        let mut g = Mat::diagonal(&[1.0, 2.0, 2.0, 0.0, 0.0, 4.0 * a2 * a2]);
        g[(3, 4)] = -2.0 * a2;
        g[(4, 3)] = -2.0 * a2;
        MetricTensor::new(g, &Tolerance::default()).unwrap()
    }

    #[test]
    fn signature_examples() {
        let tol = Tolerance::default();
        assert_eq!(signature(&MetricTensor::<f64>::euclidean(3), &tol).unwrap(), (0, 3));
        let mink = MetricTensor::diagonal(&[q(-1), q(1), q(1), q(1)]).unwrap();
        assert_eq!(signature(&mink, &tol).unwrap(), (1, 3));
        assert_eq!(signature(&l6_19_metric(1.0), &tol).unwrap(), (1, 5));
    }

    #[test]
    fn exact_inertia_handles_zero_diagonal() {
        let mut g = Mat::diagonal(&[q(0), q(0), q(3)]);
        g[(0, 1)] = q(-2);
        g[(1, 0)] = q(-2);
        assert_eq!(inertia(&g, &Tolerance::default()).unwrap(), (1, 2));
        let g = Mat::diagonal(&[q(1), q(0)]);
        assert_eq!(inertia(&g, &Tolerance::default()), Err(Error::DegenerateMetric));
    }

    #[test]
    fn degenerate_and_asymmetric_metrics_rejected() {
        let tol = Tolerance::default();
        let g = Mat::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(MetricTensor::new(g, &tol), Err(Error::DegenerateMetric));
        let g = Mat::from_rows(vec![vec![1.0, 0.5], vec![0.0, 1.0]]);
        assert_eq!(MetricTensor::new(g, &tol), Err(Error::AsymmetricMetric(0, 1)));
    }

    #[test]
    fn adjoint_on_minkowski_plane() {
        let m = MetricTensor::diagonal(&[q(-1), q(1)]).unwrap();
        let f = Mat::from_rows(vec![vec![q(0), q(1)], vec![q(0), q(0)]]);
        let fs = adjoint(&f, &m).unwrap();
        assert_eq!(fs, Mat::from_rows(vec![vec![q(0), q(0)], vec![q(-1), q(0)]]));
        assert_eq!(adjoint(&fs, &m).unwrap(), f);
    }

    #[test]
    fn complement_examples() {
        let tol = Tolerance::default();
        let e = MetricTensor::<Rational>::euclidean(3);
        let s = Subspace::from_basis(3, vec![unit(3, 0)]);
        let c = orthogonal_complement(&s, &e, &tol);
        assert!(c.complementary);
        assert_eq!(c.space.basis(), &[unit(3, 1), unit(3, 2)]);

        let m = MetricTensor::diagonal(&[q(-1), q(1)]).unwrap();
        let null = Subspace::from_basis(2, vec![vec![q(1), q(1)]]);
        let c = orthogonal_complement(&null, &m, &tol);
        assert!(!c.complementary);
        assert!(c.space.same_as(&null, &tol));
        assert_eq!(orthogonal_complement_strict(&null, &m, &tol), Err(Error::DegenerateSubspace));
    }

    #[test]
    fn orthonormalize_examples() {
        let tol = Tolerance::default();
        let m = MetricTensor::diagonal(&[q(-4), q(9)]).unwrap();
        let b = pseudo_orthonormalize(&Subspace::full(2), &m, &tol).unwrap();
        assert_eq!(b.signs, vec![-1, 1]);
        assert_eq!(b.vectors, vec![vec![Rational::from_ratio(1, 2), q(0)], vec![q(0), Rational::from_ratio(1, 3)]]);

        let e = MetricTensor::<f64>::euclidean(3);
        let b = pseudo_orthonormalize(&Subspace::full(3), &e, &tol).unwrap();
        assert_eq!(b.vectors, Subspace::<f64>::full(3).basis().to_vec());
        assert_eq!(b.signs, vec![1, 1, 1]);

        // Null plane spanned by f4, f5 of the six-dimensional Ricci-flat metric.
        let g = l6_19_metric(1.0);
        let s = Subspace::from_basis(6, vec![unit(6, 3), unit(6, 4)]);
        let b = pseudo_orthonormalize(&s, &g, &tol).unwrap();
        assert_eq!(b.signs, vec![-1, 1]);
        let gram = g.gram(&b.vectors);
        assert!(gram.max_abs_diff(&Mat::diagonal(&[-1.0, 1.0])) < 1e-12);
    }

    #[test]
    fn irrational_norm_in_exact_mode() {
        let m = MetricTensor::diagonal(&[q(2)]).unwrap();
        let r = pseudo_orthonormalize(&Subspace::full(1), &m, &Tolerance::default());
        assert!(matches!(r, Err(Error::Irrational(_))));
    }

    #[test]
    fn intersection_and_sum() {
        let tol = Tolerance::default();
        let a = Subspace::from_basis(3, vec![unit::<Rational>(3, 0), unit(3, 1)]);
        let b = Subspace::from_basis(3, vec![unit::<Rational>(3, 1), unit(3, 2)]);
        let i = a.intersection(&b, &tol);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&unit(3, 1), &tol));
        assert_eq!(a.sum(&b, &tol).dim(), 3);
    }
}
