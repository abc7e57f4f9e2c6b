//! Independent oracles shared by the integration tests. Everything here is
//! written against plain `f64` arrays and `nalgebra`, not the crate's own
//! linear algebra.

#![allow(dead_code)]

use nalgebra::DMatrix;
use nilcurv::{Mat, MetricLieAlgebra};

/// `c[i][j][k]` = coefficient of `e_k` in `[e_i, e_j]`.
pub fn structure(a: &MetricLieAlgebra<f64>) -> Vec<Vec<Vec<f64>>> {
    let n = a.dim();
    let mut c = vec![vec![vec![0.0; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                c[i][j][k] = a.lie.structure(i, j, k);
            }
        }
    }
    c
}

pub fn gram(a: &MetricLieAlgebra<f64>) -> DMatrix<f64> {
    let g = a.metric.matrix();
    DMatrix::from_fn(a.dim(), a.dim(), |i, j| g[(i, j)])
}

/// Ricci form from Christoffel symbols of the Koszul formula and
/// `ric(u,v) = tr(w ↦ K(u,w)v)` with `K(u,v) = L_[u,v] − [L_u, L_v]`.
pub fn naive_ricci(c: &[Vec<Vec<f64>>], g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let ginv = g.clone().try_inverse().expect("nondegenerate");
    let low = |a: usize, b: usize, l: usize| (0..n).map(|k| c[a][b][k] * g[(k, l)]).sum::<f64>();
    // l_ops[i][(k, j)] = k-th coordinate of L_{e_i} e_j.
    let mut l_ops = vec![DMatrix::zeros(n, n); n];
    for i in 0..n {
        for j in 0..n {
            let lowered: Vec<f64> = (0..n).map(|l| 0.5 * (low(i, j, l) + low(l, i, j) + low(l, j, i))).collect();
            for k in 0..n {
                l_ops[i][(k, j)] = (0..n).map(|l| ginv[(k, l)] * lowered[l]).sum();
            }
        }
    }
    let curv = |i: usize, k: usize| {
        let mut m = DMatrix::zeros(n, n);
        for (a, op) in l_ops.iter().enumerate() {
            m += op * c[i][k][a];
        }
        m - (&l_ops[i] * &l_ops[k] - &l_ops[k] * &l_ops[i])
    };
    let mut ric = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let r = curv(i, k);
            for j in 0..n {
                ric[(i, j)] += r[(k, j)];
            }
        }
    }
    ric
}

pub fn ricci_of(a: &MetricLieAlgebra<f64>) -> DMatrix<f64> {
    naive_ricci(&structure(a), &gram(a))
}

pub fn to_dm(m: &Mat<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}
