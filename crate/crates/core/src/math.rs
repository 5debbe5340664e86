//! Scalar math routed through `std` or `libm` depending on the target.

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("dtl-core requires either the `std` or the `libm` feature");

macro_rules! forward {
    ($($name:ident),* $(,)?) => {
        $(
            #[inline]
            pub(crate) fn $name(x: f64) -> f64 {
                #[cfg(feature = "std")]
                {
                    x.$name()
                }
                #[cfg(not(feature = "std"))]
                {
                    libm::$name(x)
                }
            }
        )*
    };
}

forward!(sqrt, exp, atan, sin, cos, acos);

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.abs()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::fabs(x)
    }
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.ln()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::log(x)
    }
}

/// Euclidean norm of a coordinate slice.
#[inline]
pub(crate) fn norm(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

/// Euclidean distance between two coordinate slices of equal length.
#[inline]
pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    sqrt(dist_sq(a, b))
}

/// Squared Euclidean distance.
#[inline]
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
