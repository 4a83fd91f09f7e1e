//! Scalar abstraction and small numeric helpers shared across the crate.

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating-point scalar usable throughout the crate.
///
/// Implemented for `f32` and `f64`. The two sampling methods exist so generic
/// code can draw uniforms and normals without spelling out distribution trait
/// bounds at every call site.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + serde::Serialize
    + serde::de::DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Uniform draw from `[0, 1)`.
    fn uniform01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Standard normal draw.
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Shorthand for lossless conversion from `f64` literals in defaults and
    /// tolerances. Panics only if the target type cannot represent any f64,
    /// which does not happen for the provided impls.
    fn c(value: f64) -> Self {
        Self::from_f64(value).expect("f64 constant must convert")
    }
}

impl Scalar for f64 {
    fn uniform01<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f64>()
    }

    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Scalar for f32 {
    fn uniform01<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f32>()
    }

    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

/// Logistic function `1 / (1 + exp(-x))`, computed so that neither branch
/// overflows for large `|x|`.
pub fn logistic<F: Scalar>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// `log(sum(exp(v)))` guarded against overflow by factoring out the maximum.
///
/// Returns negative infinity for an empty slice, matching `log(0)`.
pub fn log_sum_exp<F: Scalar>(values: &[F]) -> F {
    let mut max = F::neg_infinity();
    for &v in values {
        if v > max {
            max = v;
        }
    }
    if max == F::neg_infinity() {
        return F::neg_infinity();
    }
    let mut sum = F::zero();
    for &v in values {
        sum += (v - max).exp();
    }
    max + sum.ln()
}

/// Log-density of a mean-zero normal with the given variance.
pub fn normal_logpdf0<F: Scalar>(x: F, variance: F) -> F {
    let two = F::c(2.0);
    let tau = F::c(std::f64::consts::TAU);
    -((tau * variance).ln() + x * x / variance) / two
}
