//! Fourth-order central-difference stencils used as the numeric derivative
//! source and as an independent oracle for analytic derivatives.

use std::ops::{Add, Div, Mul, Sub};

/// Scalar or small-vector value that the stencils can combine linearly.
pub trait StencilValue:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
}

impl<T> StencilValue for T where
    T: Copy
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<f64, Output = T>
        + Div<f64, Output = T>
{
}

/// First derivative, O(h^4): (-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h.
pub fn derivative1<V: StencilValue>(f: impl Fn(f64) -> V, x: f64, h: f64) -> V {
    (f(x - 2.0 * h) - f(x + 2.0 * h) + (f(x + h) - f(x - h)) * 8.0) / (12.0 * h)
}

/// Second derivative, O(h^4):
/// (-f(x+2h) + 16f(x+h) - 30f(x) + 16f(x-h) - f(x-2h)) / 12h^2.
pub fn derivative2<V: StencilValue>(f: impl Fn(f64) -> V, x: f64, h: f64) -> V {
    let far = f(x + 2.0 * h) + f(x - 2.0 * h);
    let near = (f(x + h) + f(x - h)) * 16.0;
    (near - far - f(x) * 30.0) / (12.0 * h * h)
}

/// [`derivative1`] over a fallible field, propagating the first evaluation
/// error.
pub fn try_derivative1<V: StencilValue, E>(
    f: impl Fn(f64) -> Result<V, E>,
    x: f64,
    h: f64,
) -> Result<V, E> {
    Ok((f(x - 2.0 * h)? - f(x + 2.0 * h)? + (f(x + h)? - f(x - h)?) * 8.0) / (12.0 * h))
}
