//! Explicit algebras and metrics: the classified Ricci-flat families, the
//! type-1 quasi-Einstein algebras they are built from, and three examples with
//! a center of dimension greater than one.
//!
//! Constructors are generic over the scalar. Entries involving square roots
//! succeed in exact mode only when the root is rational; otherwise they return
//! [`Error::Irrational`] and the float instantiation should be used.
//!
//! Coordinates put central directions last. The type-1 algebras use
//! `(e_1, …, u_1, …)` with `e_1` timelike; their central extensions append `x`.

use crate::error::{Error, Result};
use crate::liealg::{CocycleData, LiePresentation, MetricLieAlgebra};
use crate::matrix::Mat;
use crate::pseudolinalg::MetricTensor;
use crate::scalar::{Scalar, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Scalar>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "+" | "+1" | "1" | "plus" => Ok(Sign::Plus),
            "-" | "-1" | "minus" => Ok(Sign::Minus),
            other => Err(format!("invalid sign `{other}` (expected + or -)")),
        }
    }
}

/// Which of the two 6-dimensional 3-step tables to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `[e₂,u₃] = αx`, `[e₁,u₁] = ∓αx`.
    A,
    /// `[e₂,u₃] = −αx`, `[e₁,u₁] = ±αx`.
    B,
}

/// Algebra plus the cocycle when the family carries one.
#[derive(Clone, Debug)]
pub struct Family<T: Scalar> {
    pub algebra: MetricLieAlgebra<T>,
    pub cocycle: Option<CocycleData<T>>,
}

fn nonzero<T: Scalar>(x: &T, name: &'static str) -> Result<()> {
    if x.is_zero() {
        Err(Error::ZeroParameter(name))
    } else {
        Ok(())
    }
}

fn sqrt_of<T: Scalar>(x: T) -> Result<T> {
    x.sqrt().ok_or_else(|| Error::Irrational(format!("sqrt({x})")))
}

fn sqrt_ratio<T: Scalar>(num: i64, den: i64) -> Result<T> {
    sqrt_of(T::from_ratio(num, den))
}

fn build<T: Scalar>(n: usize, brackets: Vec<(usize, usize, usize, T)>, metric: Mat<T>) -> Result<MetricLieAlgebra<T>> {
    let lie = LiePresentation::from_brackets(n, brackets)?;
    MetricLieAlgebra::new(lie, MetricTensor::new(metric, &Tolerance::default())?)
}

fn lorentz_diag<T: Scalar>(n: usize, timelike: usize) -> Mat<T> {
    Mat::from_fn(n, n, |i, j| match (i == j, i == timelike) {
        (true, true) => -T::one(),
        (true, false) => T::one(),
        _ => T::zero(),
    })
}

/// `[f₁,f₂]=f₄, [f₁,f₃]=f₅, [f₂,f₄]=f₆, [f₃,f₅]=−f₆` with
/// `f₁*² + 2f₂*² + 2f₃*² + 4α⁴f₆*² − 2α² f₄*⊙f₅*`.
pub fn make_l6_19<T: Scalar>(alpha: T) -> Result<MetricLieAlgebra<T>> {
    nonzero(&alpha, "alpha")?;
    let one = T::one;
    let a2 = alpha.clone() * alpha;
    let brackets = vec![(0, 1, 3, one()), (0, 2, 4, one()), (1, 3, 5, one()), (2, 4, 5, -one())];
    let two = T::from_i64(2);
    let mut g = Mat::diagonal(&[
        one(),
        two.clone(),
        two.clone(),
        T::zero(),
        T::zero(),
        T::from_i64(4) * a2.clone() * a2.clone(),
    ]);
    g[(3, 4)] = -two.clone() * a2.clone();
    g[(4, 3)] = -two * a2;
    build(6, brackets, g)
}

/// The 7-dimensional algebra 147E with `0 < r < 1`, `a > 0`.
pub fn make_dim7_147e<T: Scalar>(r: T, a: T) -> Result<MetricLieAlgebra<T>> {
    if !(r > T::zero() && r < T::one()) {
        return Err(Error::ParameterOutOfRange {
            name: "r",
            reason: format!("{r} not in (0, 1)"),
        });
    }
    if !(a > T::zero()) {
        return Err(Error::ParameterOutOfRange {
            name: "a",
            reason: format!("{a} not positive"),
        });
    }
    let one = T::one;
    let brackets = vec![
        (0, 1, 4, one()),
        (0, 2, 5, one()),
        (1, 2, 3, one()),
        (5, 1, 6, one() - r.clone()),
        (4, 2, 6, -r.clone()),
        (3, 0, 6, one()),
    ];
    let g = Mat::diagonal(&[
        one(),
        one(),
        one(),
        -a.clone(),
        a.clone() * r.clone(),
        a.clone() * (one() - r),
        a.clone() * a,
    ]);
    build(7, brackets, g)
}

/// Type-1 quasi-Einstein algebra on `(e₁,e₂,u₁,u₂,u₃)`:
/// `[u₁,u₂]=αe₂, [u₂,u₃]=±αe₁, ω(e₂,u₃)=εα, ω(e₁,u₁)=∓εα`.
pub fn make_qe_dim5<T: Scalar>(alpha: T, eps: Sign, sign: Sign) -> Result<(MetricLieAlgebra<T>, CocycleData<T>)> {
    nonzero(&alpha, "alpha")?;
    let s: T = sign.value();
    let e: T = eps.value();
    let brackets = vec![(2, 3, 1, alpha.clone()), (3, 4, 0, s.clone() * alpha.clone())];
    let g = build(5, brackets, lorentz_diag(5, 0))?;
    let mut w = Mat::zeros(5, 5);
    set_skew(&mut w, 1, 4, e.clone() * alpha.clone());
    set_skew(&mut w, 0, 2, -s * e * alpha);
    let omega = CocycleData::from_values(&g.metric, vec![w], MetricTensor::euclidean(1))?;
    Ok((g, omega))
}

/// Type-1 quasi-Einstein algebra on `(e₁,e₂,e₃,u₁,u₂,u₃)` with `α = √(α₂²+α₃²)`.
pub fn make_qe_dim6<T: Scalar>(
    alpha2: T,
    alpha3: T,
    eps: Sign,
    sign: Sign,
) -> Result<(MetricLieAlgebra<T>, CocycleData<T>)> {
    nonzero(&alpha2, "alpha2")?;
    nonzero(&alpha3, "alpha3")?;
    let alpha = sqrt_of(alpha2.clone() * alpha2.clone() + alpha3.clone() * alpha3.clone())?;
    let s: T = sign.value();
    let e: T = eps.value();
    let brackets = vec![
        (3, 4, 1, alpha2.clone()),
        (3, 5, 2, alpha3.clone()),
        (4, 5, 0, e.clone() * alpha.clone()),
    ];
    let g = build(6, brackets, lorentz_diag(6, 0))?;
    let mut w = Mat::zeros(6, 6);
    set_skew(&mut w, 1, 5, -s.clone() * e.clone() * alpha2);
    set_skew(&mut w, 2, 4, s.clone() * e * alpha3);
    set_skew(&mut w, 0, 3, s * alpha);
    let omega = CocycleData::from_values(&g.metric, vec![w], MetricTensor::euclidean(1))?;
    Ok((g, omega))
}

fn set_skew<T: Scalar>(w: &mut Mat<T>, a: usize, b: usize, v: T) {
    w[(b, a)] = -v.clone();
    w[(a, b)] = v;
}

/// 6-dimensional Ricci-flat 3-step algebra on `(e₁,e₂,u₁,u₂,u₃,x)`.
pub fn make_three_step_dim6<T: Scalar>(alpha: T, variant: Variant, sign: Sign) -> Result<MetricLieAlgebra<T>> {
    nonzero(&alpha, "alpha")?;
    let s: T = sign.value();
    let v: T = match variant {
        Variant::A => T::one(),
        Variant::B => -T::one(),
    };
    let brackets = vec![
        (2, 3, 1, alpha.clone()),
        (3, 4, 0, s.clone() * alpha.clone()),
        (1, 4, 5, v.clone() * alpha.clone()),
        (0, 2, 5, -v * s * alpha),
    ];
    build(6, brackets, lorentz_diag(6, 0))
}

/// 7-dimensional Ricci-flat 3-step algebra on `(e₁,e₂,e₃,u₁,u₂,u₃,x)`.
pub fn make_three_step_dim7<T: Scalar>(alpha2: T, alpha3: T, eps: Sign, sign: Sign) -> Result<MetricLieAlgebra<T>> {
    nonzero(&alpha2, "alpha2")?;
    nonzero(&alpha3, "alpha3")?;
    let alpha = sqrt_of(alpha2.clone() * alpha2.clone() + alpha3.clone() * alpha3.clone())?;
    let s: T = sign.value();
    let e: T = eps.value();
    let brackets = vec![
        (3, 4, 1, alpha2.clone()),
        (3, 5, 2, alpha3.clone()),
        (4, 5, 0, e.clone() * alpha.clone()),
        (1, 5, 6, -s.clone() * e.clone() * alpha2),
        (2, 4, 6, s.clone() * e * alpha3),
        (0, 3, 6, s * alpha),
    ];
    build(7, brackets, lorentz_diag(7, 0))
}

/// Columns `f₁..f₆` in the coordinates of [`make_three_step_dim6`] (variant A)
/// that carry its table onto [`make_l6_19`]:
/// `f₁=u₂, f₂=u₃+u₁, f₃=u₃−u₁, f₄=±αe₁−αe₂, f₅=±αe₁+αe₂, f₆=2α²x`.
pub fn l6_19_substitution<T: Scalar>(alpha: T, sign: Sign) -> Mat<T> {
    let s: T = sign.value();
    let one = T::one;
    let mut t = Mat::zeros(6, 6);
    t[(3, 0)] = one();
    t[(4, 1)] = one();
    t[(2, 1)] = one();
    t[(4, 2)] = one();
    t[(2, 2)] = -one();
    t[(0, 3)] = s.clone() * alpha.clone();
    t[(1, 3)] = -alpha.clone();
    t[(0, 4)] = s * alpha.clone();
    t[(1, 4)] = alpha.clone();
    t[(5, 5)] = T::from_i64(2) * alpha.clone() * alpha;
    t
}

/// Columns `f₁..f₇` in the coordinates of [`make_three_step_dim7`] that carry
/// it onto 147E, together with `(r, a) = (α₂²/α², α²)`.
pub fn dim7_147e_substitution<T: Scalar>(alpha2: T, alpha3: T, eps: Sign, sign: Sign) -> Result<(Mat<T>, T, T)> {
    let a = alpha2.clone() * alpha2.clone() + alpha3.clone() * alpha3.clone();
    let alpha = sqrt_of(a.clone())?;
    let e: T = eps.value();
    let s: T = sign.value();
    let mut t = Mat::zeros(7, 7);
    t[(3, 0)] = T::one();
    t[(4, 1)] = T::one();
    t[(5, 2)] = T::one();
    t[(0, 3)] = e.clone() * alpha;
    t[(1, 4)] = alpha2.clone();
    t[(2, 5)] = alpha3;
    t[(6, 6)] = s * e * a.clone();
    let r = alpha2.clone() * alpha2 / a.clone();
    Ok((t, r, a))
}

/// 8-dimensional Einstein algebra with nonzero scalar curvature; `e₆` timelike.
pub fn make_conti8<T: Scalar>() -> Result<MetricLieAlgebra<T>> {
    let s3 = sqrt_ratio::<T>(3, 1)?;
    let s52 = sqrt_ratio::<T>(5, 2)?;
    let s72 = sqrt_ratio::<T>(7, 2)?;
    let s2 = sqrt_ratio::<T>(2, 1)?;
    let s21 = sqrt_ratio::<T>(21, 1)?;
    let k = T::from_i64;
    let brackets = vec![
        (0, 1, 2, -k(4) * s3.clone()),
        (0, 2, 3, s52.clone()),
        (0, 3, 7, -k(2) * s3.clone()),
        (0, 4, 5, k(3) * s72.clone()),
        (0, 5, 6, -k(4) * s2.clone()),
        (1, 2, 4, -s52),
        (1, 3, 5, -k(3) * s72),
        (1, 4, 6, -k(2) * s3),
        (1, 5, 7, -k(4) * s2),
        (2, 3, 6, -s21.clone()),
        (2, 4, 7, -s21),
    ];
    build(8, brackets, lorentz_diag(8, 5))
}

/// 7-dimensional Ricci-flat 3-step algebra with center `span{e₇, e₅−e₆}`.
pub fn make_example7<T: Scalar>() -> Result<MetricLieAlgebra<T>> {
    let s2 = sqrt_ratio::<T>(2, 1)?;
    let m1 = -T::one();
    let brackets = vec![
        (0, 2, 6, s2.clone()),
        (1, 3, 6, s2),
        (3, 4, 0, m1.clone()),
        (3, 5, 0, m1.clone()),
        (2, 4, 1, m1.clone()),
        (2, 5, 1, m1),
    ];
    build(7, brackets, lorentz_diag(7, 0))
}

/// 10-dimensional Ricci-flat 3-step algebra with center `span{e₇,…,e₁₀}`; `e₅` timelike.
pub fn make_example10<T: Scalar>(p: T, r: T) -> Result<MetricLieAlgebra<T>> {
    nonzero(&p, "p")?;
    nonzero(&r, "r")?;
    let q = -sqrt_of(p.clone() * p.clone() + r.clone() * r.clone())?;
    let brackets = vec![
        (0, 2, 4, q.clone()),
        (0, 3, 5, q.clone()),
        (1, 3, 4, q.clone()),
        (1, 2, 5, q),
        (4, 0, 6, p.clone()),
        (4, 1, 7, p.clone()),
        (4, 2, 8, r.clone()),
        (4, 3, 9, r.clone()),
        (5, 0, 7, p.clone()),
        (5, 1, 6, p),
        (5, 2, 9, r.clone()),
        (5, 3, 8, r),
    ];
    build(10, brackets, lorentz_diag(10, 4))
}

/// A named family with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec<T: Scalar> {
    L619 { alpha: T },
    Dim7_147e { r: T, a: T },
    QeDim5 { alpha: T, eps: Sign, sign: Sign },
    QeDim6 { alpha2: T, alpha3: T, eps: Sign, sign: Sign },
    ThreeStepDim6 { alpha: T, variant: Variant, sign: Sign },
    ThreeStepDim7 { alpha2: T, alpha3: T, eps: Sign, sign: Sign },
    Conti8,
    Example7,
    Example10 { p: T, r: T },
}

pub const FAMILY_NAMES: [&str; 10] = [
    "l6_19",
    "dim7_147e",
    "qe_dim5",
    "qe_dim6",
    "three_step_dim6_a",
    "three_step_dim6_b",
    "three_step_dim7",
    "conti8",
    "example7",
    "example10",
];

impl<T: Scalar> FamilySpec<T> {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::L619 { .. } => "l6_19",
            FamilySpec::Dim7_147e { .. } => "dim7_147e",
            FamilySpec::QeDim5 { .. } => "qe_dim5",
            FamilySpec::QeDim6 { .. } => "qe_dim6",
            FamilySpec::ThreeStepDim6 { variant: Variant::A, .. } => "three_step_dim6_a",
            FamilySpec::ThreeStepDim6 { variant: Variant::B, .. } => "three_step_dim6_b",
            FamilySpec::ThreeStepDim7 { .. } => "three_step_dim7",
            FamilySpec::Conti8 => "conti8",
            FamilySpec::Example7 => "example7",
            FamilySpec::Example10 { .. } => "example10",
        }
    }

    pub fn build(&self) -> Result<Family<T>> {
        let plain = |algebra| Family { algebra, cocycle: None };
        Ok(match self.clone() {
            FamilySpec::L619 { alpha } => plain(make_l6_19(alpha)?),
            FamilySpec::Dim7_147e { r, a } => plain(make_dim7_147e(r, a)?),
            FamilySpec::QeDim5 { alpha, eps, sign } => {
                let (algebra, c) = make_qe_dim5(alpha, eps, sign)?;
                Family {
                    algebra,
                    cocycle: Some(c),
                }
            }
            FamilySpec::QeDim6 {
                alpha2,
                alpha3,
                eps,
                sign,
            } => {
                let (algebra, c) = make_qe_dim6(alpha2, alpha3, eps, sign)?;
                Family {
                    algebra,
                    cocycle: Some(c),
                }
            }
            FamilySpec::ThreeStepDim6 { alpha, variant, sign } => plain(make_three_step_dim6(alpha, variant, sign)?),
            FamilySpec::ThreeStepDim7 {
                alpha2,
                alpha3,
                eps,
                sign,
            } => plain(make_three_step_dim7(alpha2, alpha3, eps, sign)?),
            FamilySpec::Conti8 => plain(make_conti8()?),
            FamilySpec::Example7 => plain(make_example7()?),
            FamilySpec::Example10 { p, r } => plain(make_example10(p, r)?),
        })
    }
}
