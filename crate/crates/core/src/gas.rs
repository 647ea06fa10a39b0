//! Polytropic closure and the relativistic factor (light speed set to 1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Adiabatic exponent of a polytropic gas, `p = S n^gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct GasParams {
    gamma: f64,
}

impl GasParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 1.0 {
            return Err(Error::Domain(format!(
                "adiabatic exponent must satisfy gamma > 1, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `1 / (gamma - 1)`
    #[inline]
    pub fn inv_gm1(&self) -> f64 {
        1.0 / (self.gamma - 1.0)
    }
}

impl TryFrom<f64> for GasParams {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        GasParams::new(value)
    }
}

impl From<GasParams> for f64 {
    fn from(value: GasParams) -> Self {
        value.gamma
    }
}

/// `sqrt(1 - v^2)`. Note this is the reciprocal of the usual Lorentz factor.
pub fn gamma_factor(v: f64) -> Result<f64> {
    if !(v.abs() < 1.0) {
        return Err(Error::SuperluminalState(v.abs()));
    }
    Ok((1.0 - v * v).sqrt())
}

pub fn pressure(n: f64, s: f64, gamma: f64) -> Result<f64> {
    if !(n > 0.0) || !(s > 0.0) {
        return Err(Error::Domain(format!(
            "pressure needs n > 0 and S > 0, got n = {n}, S = {s}"
        )));
    }
    Ok(s * n.powf(gamma))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_factor_values() {
        assert_eq!(gamma_factor(0.0).unwrap(), 1.0);
        assert!((gamma_factor(0.6).unwrap() - 0.8).abs() < 1e-15);
        assert!((gamma_factor(-0.6).unwrap() - 0.8).abs() < 1e-15);
        assert!(matches!(gamma_factor(1.0), Err(Error::SuperluminalState(_))));
        assert!(matches!(gamma_factor(-1.5), Err(Error::SuperluminalState(_))));
        assert!(gamma_factor(f64::NAN).is_err());
    }

    #[test]
    fn pressure_values() {
        assert_eq!(pressure(1.0, 1.0, 5.0 / 3.0).unwrap(), 1.0);
        assert_eq!(pressure(2.0, 1.0, 2.0).unwrap(), 4.0);
        assert!(matches!(pressure(0.0, 1.0, 2.0), Err(Error::Domain(_))));
        assert!(matches!(pressure(1.0, -1.0, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn gas_params_rejects_gamma_at_most_one() {
        assert!(GasParams::new(1.0).is_err());
        assert!(GasParams::new(0.5).is_err());
        assert!(GasParams::new(f64::INFINITY).is_err());
        assert_eq!(GasParams::new(1.4).unwrap().gamma(), 1.4);
    }
}
