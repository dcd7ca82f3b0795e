//! Orders on the extended half-line `[0, ∞]`.
//!
//! The points `0`, `1` and `∞` carry their own tags so that every limit
//! formula is a separate code path instead of a numeric limit.

use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum OrderError {
    #[error("order must be a non-negative number, got {0}")]
    Invalid(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtOrder {
    Zero,
    /// Strictly positive, finite and different from 1.
    Finite(f64),
    One,
    Infinity,
}

impl ExtOrder {
    /// Tags `0`, `1` and `+∞` exactly; anything else positive and finite is
    /// `Finite`.
    pub fn new(v: f64) -> Result<Self, OrderError> {
        if v.is_nan() || v < 0.0 {
            Err(OrderError::Invalid(v))
        } else if v == 0.0 {
            Ok(ExtOrder::Zero)
        } else if v == 1.0 {
            Ok(ExtOrder::One)
        } else if v == f64::INFINITY {
            Ok(ExtOrder::Infinity)
        } else {
            Ok(ExtOrder::Finite(v))
        }
    }

    /// The numeric value, with `Infinity` mapped to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            ExtOrder::Zero => 0.0,
            ExtOrder::Finite(v) => v,
            ExtOrder::One => 1.0,
            ExtOrder::Infinity => f64::INFINITY,
        }
    }

    /// `Some(v)` for orders in `(0, ∞)`, including 1.
    pub fn positive_finite(self) -> Option<f64> {
        match self {
            ExtOrder::Finite(v) => Some(v),
            ExtOrder::One => Some(1.0),
            _ => None,
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, ExtOrder::Zero)
    }

    pub fn is_one(self) -> bool {
        matches!(self, ExtOrder::One)
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtOrder::Infinity)
    }
}

impl fmt::Display for ExtOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtOrder::Zero => f.write_str("0"),
            ExtOrder::One => f.write_str("1"),
            ExtOrder::Infinity => f.write_str("inf"),
            ExtOrder::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl core::str::FromStr for ExtOrder {
    type Err = OrderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "inf" | "infinity" | "Inf" | "∞" => Ok(ExtOrder::Infinity),
            _ => t
                .parse::<f64>()
                .map_err(|_| OrderError::Invalid(f64::NAN))
                .and_then(ExtOrder::new),
        }
    }
}

/// An `(α, β)` pair. For `β` the `One` tag is an ordinary finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderPair {
    pub alpha: ExtOrder,
    pub beta: ExtOrder,
}

impl OrderPair {
    pub fn new(alpha: ExtOrder, beta: ExtOrder) -> Self {
        OrderPair { alpha, beta }
    }

    pub fn from_values(alpha: f64, beta: f64) -> Result<Self, OrderError> {
        Ok(OrderPair { alpha: ExtOrder::new(alpha)?, beta: ExtOrder::new(beta)? })
    }

    /// The `(0, 0)` corner, where the iterated limits do not commute.
    pub fn is_discontinuity_corner(self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero()
    }
}

impl fmt::Display for OrderPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.beta)
    }
}
