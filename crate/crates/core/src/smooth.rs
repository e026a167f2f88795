//! `exp(-1/x)` transition functions and plateau cutoffs.

use crate::scalar::{lit, Real};

#[inline]
fn flat_zero<T: Real>(u: T) -> T {
    if u > T::zero() {
        (-u.recip()).exp()
    } else {
        T::zero()
    }
}

/// Smooth step on `[0, 1]`: 0 for `t ≤ 0`, 1 for `t ≥ 1`, and
/// `step(t) + step(1 - t) = 1` exactly in exact arithmetic.
#[inline]
pub fn step<T: Real>(t: T) -> T {
    if t <= T::zero() {
        return T::zero();
    }
    if t >= T::one() {
        return T::one();
    }
    let a = flat_zero(t);
    let b = flat_zero(T::one() - t);
    a / (a + b)
}

/// Rising transition centred at `center`, going from 0 at `center - half`
/// to 1 at `center + half`.
#[inline]
pub fn rise<T: Real>(x: T, center: T, half: T) -> T {
    step((x - (center - half)) / (lit::<T>(2.0) * half))
}

/// Smooth cutoff equal to 1 on `|x| ≤ inner` and 0 on `|x| ≥ outer`.
#[inline]
pub fn radial_plateau<T: Real>(x: T, inner: T, outer: T) -> T {
    let r = x.abs();
    T::one() - step((r - inner) / (outer - inner))
}
