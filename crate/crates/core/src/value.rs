use serde::{Deserialize, Serialize};
use std::fmt;

/// A real number together with a rigorous bound on its absolute error.
///
/// The true quantity lies in `[value - abs_err, value + abs_err]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueWithError {
    pub value: f64,
    pub abs_err: f64,
}

impl ValueWithError {
    /// Panics if `abs_err` is negative or not finite.
    pub fn new(value: f64, abs_err: f64) -> Self {
        assert!(
            abs_err.is_finite() && abs_err >= 0.0,
            "abs_err must be finite and non-negative, got {abs_err}"
        );
        Self { value, abs_err }
    }

    pub fn exact(value: f64) -> Self {
        Self::new(value, 0.0)
    }

    pub fn lo(&self) -> f64 {
        self.value - self.abs_err
    }

    pub fn hi(&self) -> f64 {
        self.value + self.abs_err
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.abs_err
    }

    /// True when the whole interval lies strictly on one side of zero.
    pub fn excludes_zero(&self) -> bool {
        self.value.abs() > self.abs_err
    }

    pub fn rel_err(&self) -> f64 {
        self.abs_err / self.value.abs()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.value * c, self.abs_err * c.abs() + (self.value * c).abs() * f64::EPSILON)
    }

    pub fn add(&self, other: &Self) -> Self {
        let v = self.value + other.value;
        Self::new(v, self.abs_err + other.abs_err + v.abs() * f64::EPSILON)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let v = self.value * other.value;
        let err = self.abs_err * other.value.abs()
            + other.abs_err * self.value.abs()
            + self.abs_err * other.abs_err
            + v.abs() * f64::EPSILON;
        Self::new(v, err)
    }

    /// Quotient; the denominator interval must exclude zero.
    pub fn div(&self, other: &Self) -> Self {
        assert!(other.excludes_zero(), "division by an interval containing zero");
        let v = self.value / other.value;
        let d = other.value.abs() - other.abs_err;
        let err = (self.abs_err + v.abs() * other.abs_err) / d + v.abs() * f64::EPSILON;
        Self::new(v, err)
    }
}

impl fmt::Display for ValueWithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.15e} ± {:.2e}", self.value, self.abs_err)
    }
}
