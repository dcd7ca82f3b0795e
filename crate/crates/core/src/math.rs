//! Base-2 numerics shared by every measure.
//!
//! `core` has no transcendental functions for `f64`, so everything routes
//! through `libm`.

pub const LN_2: f64 = core::f64::consts::LN_2;

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn exp2(x: f64) -> f64 {
    libm::exp2(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// `|x|⁺ = max{x, 0}`.
#[inline]
pub fn pos_part(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// `log2 Σ 2^{t_i}` computed with a running max shift.
///
/// `-∞` terms are skipped; an empty or all-`-∞` input gives `-∞`, and any
/// `+∞` term makes the result `+∞`.
pub fn log2_sum_exp2<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut max = f64::NEG_INFINITY;
    let mut acc = 0.0;
    for t in terms {
        if t == f64::NEG_INFINITY {
            continue;
        }
        if t == f64::INFINITY {
            return f64::INFINITY;
        }
        if t <= max {
            acc += exp2(t - max);
        } else {
            acc = acc * exp2(max - t) + 1.0;
            max = t;
        }
    }
    if max == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        max + log2(acc)
    }
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `x log2 x` with the `0 log 0 = 0` convention.
#[inline]
pub fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * log2(x)
    } else {
        0.0
    }
}

/// `x log2 (x / y)` with `0 log(0/y) = 0` and `x log(x/0) = +∞` for `x > 0`.
#[inline]
pub fn xlog2_ratio(x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if y <= 0.0 {
        f64::INFINITY
    } else {
        x * log2(x / y)
    }
}
