//! Log-space helpers for factorial and gamma products.

use statrs::function::gamma::ln_gamma;

/// ln(n!) exact through 20! and via log-gamma beyond.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 20 {
        (2..=n).map(|k| k as f64).product::<f64>().ln()
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

pub fn ln_gamma_fn(x: f64) -> f64 {
    ln_gamma(x)
}

/// A real number stored as `sign * exp(ln_abs)`.
///
/// Zero is represented with `ln_abs = -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub ln_abs: f64,
    pub negative: bool,
}

#[allow(clippy::should_implement_trait)]
impl LogValue {
    pub const ONE: LogValue = LogValue {
        ln_abs: 0.0,
        negative: false,
    };

    pub fn from_ln(ln_abs: f64) -> Self {
        LogValue {
            ln_abs,
            negative: false,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        LogValue {
            ln_abs: x.abs().ln(),
            negative: x.is_sign_negative() && x != 0.0,
        }
    }

    pub fn neg(self) -> Self {
        LogValue {
            negative: !self.negative,
            ..self
        }
    }

    pub fn mul(self, other: LogValue) -> Self {
        LogValue {
            ln_abs: self.ln_abs + other.ln_abs,
            negative: self.negative != other.negative,
        }
    }

    pub fn div(self, other: LogValue) -> Self {
        LogValue {
            ln_abs: self.ln_abs - other.ln_abs,
            negative: self.negative != other.negative,
        }
    }

    /// Integer power; the sign follows the parity of `k`.
    pub fn powi(self, k: u32) -> Self {
        if k == 0 {
            return LogValue::ONE;
        }
        LogValue {
            ln_abs: self.ln_abs * k as f64,
            negative: self.negative && k % 2 == 1,
        }
    }

    /// Real power of a positive value.
    pub fn powf(self, p: f64) -> Self {
        debug_assert!(!self.negative);
        LogValue {
            ln_abs: self.ln_abs * p,
            negative: false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.ln_abs == f64::NEG_INFINITY
    }

    pub fn to_f64(self) -> f64 {
        let m = self.ln_abs.exp();
        if self.negative {
            -m
        } else {
            m
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert!((ln_factorial(5).exp() - 120.0).abs() < 1e-12);
        let direct: f64 = (1..=25).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(25) - direct).abs() < 1e-12);
    }

    #[test]
    fn signed_products() {
        let a = LogValue::from_f64(-2.0);
        let b = LogValue::from_f64(3.0);
        assert!((a.mul(b).to_f64() + 6.0).abs() < 1e-12);
        assert!((a.powi(3).to_f64() + 8.0).abs() < 1e-12);
        assert!((a.powi(2).to_f64() - 4.0).abs() < 1e-12);
        assert!((b.div(a).to_f64() + 1.5).abs() < 1e-12);
        assert!(LogValue::from_f64(0.0).is_zero());
        assert_eq!(LogValue::from_f64(0.0).to_f64(), 0.0);
    }
}
