//! Seeded random nilpotent metric Lie algebras, built by iterated
//! one-dimensional central extensions with random 2-cocycles.
//!
//! Exact mode draws small integers; float mode draws uniform reals. Metrics
//! are `Tᵀ η T` with `η` diagonal of signs and `T` a product of unit lower
//! and upper triangular matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::liealg::{central_extension, CocycleData, LiePresentation, MetricLieAlgebra};
use crate::matrix::Mat;
use crate::pseudolinalg::MetricTensor;
use crate::scalar::{Scalar, Tolerance};

/// Basis of the 2-cocycles of `lie`, as antisymmetric value matrices
/// `W[(a,b)] = ω(e_a, e_b)`.
pub fn cocycle_space<T: Scalar>(lie: &LiePresentation<T>, tol: &Tolerance) -> Vec<Mat<T>> {
    let n = lie.dim();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let index = |a: usize, b: usize| -> Option<(usize, bool)> {
        if a == b {
            return None;
        }
        let (lo, hi, flip) = if a < b { (a, b, false) } else { (b, a, true) };
        Some((pairs.iter().position(|&p| p == (lo, hi)).expect("pair"), flip))
    };
    let mut rows: Vec<Vec<T>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut row = vec![T::zero(); pairs.len()];
                for (x, y, z) in [(i, j, k), (j, k, i), (k, i, j)] {
                    let br = lie.bracket_basis(x, y);
                    for (a, c) in br.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        if let Some((col, flip)) = index(a, z) {
                            let v = if flip { -c.clone() } else { c.clone() };
                            row[col] = row[col].clone() + v;
                        }
                    }
                }
                rows.push(row);
            }
        }
    }
    let basis = if rows.is_empty() {
        (0..pairs.len())
            .map(|c| (0..pairs.len()).map(|r| if r == c { T::one() } else { T::zero() }).collect())
            .collect()
    } else {
        Mat::from_rows(rows).nullspace(tol)
    };
    basis
        .into_iter()
        .map(|v: Vec<T>| {
            let mut w = Mat::zeros(n, n);
            for (&(a, b), x) in pairs.iter().zip(v) {
                w[(b, a)] = -x.clone();
                w[(a, b)] = x;
            }
            // Float row reduction can leave badly scaled basis vectors.
            if T::is_exact() || w.max_abs().is_zero() {
                w
            } else {
                let s = T::one() / w.max_abs();
                w.scale(&s)
            }
        })
        .collect()
}

fn draw<T: Scalar>(rng: &mut ChaCha8Rng, span: i64) -> T {
    if T::is_exact() {
        T::from_i64(rng.random_range(-span..=span))
    } else {
        T::from_f64(rng.random_range(-(span as f64)..=span as f64)).expect("finite")
    }
}

fn random_combination<T: Scalar>(rng: &mut ChaCha8Rng, basis: &[Mat<T>], n: usize) -> Mat<T> {
    let mut w = Mat::zeros(n, n);
    for b in basis {
        let c: T = draw(rng, 2);
        w = w.add(&b.scale(&c));
    }
    w
}

/// Random nilpotent Lie algebra of dimension `dim`, grown from an abelian
/// algebra of dimension `min(dim, 2)`.
pub fn random_nilpotent<T: Scalar>(rng: &mut ChaCha8Rng, dim: usize) -> LiePresentation<T> {
    let tol = Tolerance::default();
    let start = dim.min(2);
    let mut lie = LiePresentation::<T>::abelian(start);
    for n in start..dim {
        let space = cocycle_space(&lie, &tol);
        let mut w = random_combination(rng, &space, n);
        for _ in 0..4 {
            if !w.max_abs().is_zero() || space.is_empty() {
                break;
            }
            w = random_combination(rng, &space, n);
        }
        let mut entries = lie.entries();
        for a in 0..n {
            for b in a + 1..n {
                if !w[(a, b)].is_zero() {
                    entries.push((a, b, n, w[(a, b)].clone()));
                }
            }
        }
        lie = LiePresentation::from_brackets(n + 1, entries).expect("valid brackets");
    }
    lie
}

/// Random nondegenerate metric with `timelike` negative directions.
pub fn random_metric<T: Scalar>(rng: &mut ChaCha8Rng, n: usize, timelike: usize) -> MetricTensor<T> {
    let mut l = Mat::identity(n);
    let mut u = Mat::identity(n);
    for i in 0..n {
        for j in 0..i {
            l[(i, j)] = draw(rng, 1);
            u[(j, i)] = draw(rng, 1);
        }
    }
    let t = l.matmul(&u);
    let signs: Vec<T> = (0..n).map(|i| if i < timelike { -T::one() } else { T::one() }).collect();
    let g = t.transpose().matmul(&Mat::diagonal(&signs)).matmul(&t);
    MetricTensor::new(g, &Tolerance::default()).expect("Tᵀ η T is nondegenerate")
}

/// Random nilpotent metric Lie algebra; the signature has at most two
/// timelike directions.
pub fn random_metric_lie<T: Scalar>(seed: u64, dim: usize) -> MetricLieAlgebra<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lie = random_nilpotent(&mut rng, dim);
    let timelike = rng.random_range(0..=dim.min(2));
    let metric = random_metric(&mut rng, dim, timelike);
    MetricLieAlgebra::new(lie, metric).expect("matching dimensions")
}

/// Random cocycle with `p` components and Euclidean center metric.
pub fn random_cocycle<T: Scalar>(rng: &mut ChaCha8Rng, g: &MetricLieAlgebra<T>, p: usize) -> Result<CocycleData<T>> {
    let space = cocycle_space(&g.lie, &Tolerance::default());
    let values = (0..p).map(|_| random_combination(rng, &space, g.dim())).collect();
    CocycleData::from_values(&g.metric, values, MetricTensor::euclidean(p))
}

/// A rigid central extension `h` of a random `g` by `p` Euclidean central
/// directions. Draws until rigidity holds, giving up after 32 attempts.
#[derive(Clone, Debug)]
pub struct ExtensionSample<T: Scalar> {
    pub g: MetricLieAlgebra<T>,
    pub omega: CocycleData<T>,
    pub h: MetricLieAlgebra<T>,
}

pub fn random_extension<T: Scalar>(seed: u64, g_dim: usize, p: usize) -> Option<ExtensionSample<T>> {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..32 {
        let lie = random_nilpotent(&mut rng, g_dim);
        let timelike = rng.random_range(0..=g_dim.min(2));
        let metric = random_metric(&mut rng, g_dim, timelike);
        let g = MetricLieAlgebra::new(lie, metric).ok()?;
        let omega = random_cocycle(&mut rng, &g, p).ok()?;
        let ext = central_extension(&g, &omega, &tol).ok()?;
        if ext.rigid {
            return Some(ExtensionSample { g, omega, h: ext.algebra });
        }
    }
    None
}
