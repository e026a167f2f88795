//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All grids, symbols and operators are generic over a real floating type
//! `T: Real` and store `Complex<T>` samples. `f32` and `f64` are supported;
//! the tolerances quoted throughout the test-suite assume `f64`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use nalgebra::DMatrix;
use ndarray::Array2;
use num_traits::{Float, FloatConst};
use rustfft::FftNum;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub use rustfft::num_complex::Complex;

use crate::error::{Error, Result};

/// Dense singular value decomposition `A = U · diag(s) · Vᴴ`.
///
/// Columns of `u` and `v` are the left and right singular vectors; `s` is
/// sorted nonincreasing.
#[derive(Clone, Debug)]
pub struct DenseSvd<T> {
    pub u: Array2<Complex<T>>,
    pub s: Vec<T>,
    pub v: Array2<Complex<T>>,
}

/// Real floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FftNum
    + Sum
    + Default
    + Display
    + LowerExp
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Full dense SVD of a complex matrix.
    fn dense_svd(a: &Array2<Complex<Self>>) -> Result<DenseSvd<Self>>;

    /// Singular values only, sorted nonincreasing.
    fn dense_singular_values(a: &Array2<Complex<Self>>) -> Result<Vec<Self>>;
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in target float type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub(crate) fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

fn check_finite<T: Real>(a: &Array2<Complex<T>>) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("matrix passed to SVD"))
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn dense_svd(a: &Array2<Complex<$t>>) -> Result<DenseSvd<$t>> {
                check_finite(a)?;
                let (rows, cols) = a.dim();
                let m = DMatrix::from_fn(rows, cols, |i, j| a[[i, j]]);
                let svd = m.svd(true, true);
                let u = svd.u.expect("left singular vectors requested");
                let v_t = svd.v_t.expect("right singular vectors requested");
                let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
                order.sort_by(|&i, &j| {
                    svd.singular_values[j]
                        .partial_cmp(&svd.singular_values[i])
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
                let k = order.len();
                let s = order.iter().map(|&i| svd.singular_values[i]).collect();
                let u = Array2::from_shape_fn((rows, k), |(r, c)| u[(r, order[c])]);
                let v = Array2::from_shape_fn((cols, k), |(r, c)| v_t[(order[c], r)].conj());
                Ok(DenseSvd { u, s, v })
            }

            fn dense_singular_values(a: &Array2<Complex<$t>>) -> Result<Vec<$t>> {
                check_finite(a)?;
                let (rows, cols) = a.dim();
                let m = DMatrix::from_fn(rows, cols, |i, j| a[[i, j]]);
                let mut s: Vec<$t> = m.singular_values().iter().copied().collect();
                s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
                Ok(s)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
