//! Entropy profiles `S0(xi)` along particle labels.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type DerivFn = dyn Fn(f64) -> [f64; 4] + Send + Sync;

/// A user-supplied profile: `eval(xi)` returns `[S0, S0', S0'', S0''']`.
#[derive(Clone)]
pub struct CustomProfile {
    name: String,
    domain: (f64, f64),
    eval: Arc<DerivFn>,
}

impl CustomProfile {
    pub fn new<F>(name: impl Into<String>, domain: (f64, f64), eval: F) -> Self
    where
        F: Fn(f64) -> [f64; 4] + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            domain,
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

/// Entropy as a function of the mass coordinate.
#[derive(Debug, Clone)]
pub enum EntropyProfile {
    /// `S0(xi) = s0`
    Constant(f64),
    /// `S0(xi) = exp(q xi)`
    Exponential(f64),
    /// `S0(xi) = xi^q`, defined for `xi > 0`
    Power(f64),
    Custom(CustomProfile),
}

impl EntropyProfile {
    pub fn constant(s0: f64) -> Result<Self> {
        if !(s0 > 0.0) || !s0.is_finite() {
            return Err(Error::Domain(format!("constant entropy must be > 0, got {s0}")));
        }
        Ok(Self::Constant(s0))
    }

    pub fn exponential(q: f64) -> Result<Self> {
        if q == 0.0 || !q.is_finite() {
            return Err(Error::Domain(format!("exponential rate must be nonzero, got {q}")));
        }
        Ok(Self::Exponential(q))
    }

    pub fn power(q: f64) -> Result<Self> {
        if q == 0.0 || !q.is_finite() {
            return Err(Error::Domain(format!("power exponent must be nonzero, got {q}")));
        }
        Ok(Self::Power(q))
    }

    /// Polynomial `sum c_k xi^k` with exact derivatives.
    pub fn polynomial(coeffs: Vec<f64>, domain: (f64, f64)) -> Self {
        let name = format!("polynomial{coeffs:?}");
        Self::Custom(CustomProfile::new(name, domain, move |xi| {
            let mut out = [0.0; 4];
            for (order, slot) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for k in (order..coeffs.len()).rev() {
                    let falling: f64 = (0..order).map(|j| (k - j) as f64).product();
                    acc = acc * xi + coeffs[k] * falling;
                }
                *slot = acc;
            }
            out
        }))
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Self::Constant(_) => "constant",
            Self::Exponential(_) => "exponential",
            Self::Power(_) => "power",
            Self::Custom(_) => "custom",
        }
    }

    /// `[S0, S0', S0'', S0''']` at `xi`.
    pub fn derivs(&self, xi: f64) -> [f64; 4] {
        match self {
            Self::Constant(s) => [*s, 0.0, 0.0, 0.0],
            Self::Exponential(q) => {
                let e = (q * xi).exp();
                [e, q * e, q * q * e, q * q * q * e]
            }
            Self::Power(q) => {
                let s = xi.powf(*q);
                [
                    s,
                    q * s / xi,
                    q * (q - 1.0) * s / (xi * xi),
                    q * (q - 1.0) * (q - 2.0) * s / (xi * xi * xi),
                ]
            }
            Self::Custom(c) => (c.eval)(xi),
        }
    }

    #[inline]
    pub fn value(&self, xi: f64) -> f64 {
        match self {
            Self::Constant(s) => *s,
            Self::Exponential(q) => (q * xi).exp(),
            Self::Power(q) => xi.powf(*q),
            Self::Custom(c) => (c.eval)(xi)[0],
        }
    }

    /// `(S0, S0')` at `xi`.
    #[inline]
    pub fn value_and_slope(&self, xi: f64) -> (f64, f64) {
        match self {
            Self::Constant(s) => (*s, 0.0),
            Self::Exponential(q) => {
                let e = (q * xi).exp();
                (e, q * e)
            }
            Self::Power(q) => {
                let s = xi.powf(*q);
                (s, q * s / xi)
            }
            Self::Custom(c) => {
                let d = (c.eval)(xi);
                (d[0], d[1])
            }
        }
    }

    /// Multiplies the entropy by `exp(a)`; the classification is unchanged by this.
    pub fn rescaled(&self, a: f64) -> Self {
        let k = a.exp();
        let inner = self.clone();
        let domain = self.natural_domain();
        Self::Custom(CustomProfile::new(
            format!("exp({a})*{}", self.tag()),
            domain,
            move |xi| inner.derivs(xi).map(|d| k * d),
        ))
    }

    fn natural_domain(&self) -> (f64, f64) {
        match self {
            Self::Power(_) => (f64::MIN_POSITIVE, f64::INFINITY),
            Self::Custom(c) => c.domain,
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Checks positivity (and the power-law `xi > 0` requirement) on `[lo, hi]`.
    pub fn validate_on(&self, lo: f64, hi: f64) -> Result<()> {
        if let Self::Power(_) = self {
            if !(lo > 0.0) {
                return Err(Error::Domain(format!(
                    "power-law entropy needs xi > 0 on the whole domain, got xi_min = {lo}"
                )));
            }
        }
        let (dlo, dhi) = self.natural_domain();
        if lo < dlo || hi > dhi {
            return Err(Error::Domain(format!(
                "domain [{lo}, {hi}] exceeds the profile domain [{dlo}, {dhi}]"
            )));
        }
        const PROBES: usize = 257;
        for i in 0..PROBES {
            let xi = lo + (hi - lo) * i as f64 / (PROBES - 1) as f64;
            let s = self.value(xi);
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::Domain(format!("entropy S0({xi}) = {s} is not positive")));
            }
        }
        Ok(())
    }

    /// Compares each supplied derivative with a centered difference of the
    /// next-lower one; fails when the relative mismatch exceeds `rel_tol`.
    pub fn check_derivatives(&self, samples: &[f64], rel_tol: f64) -> Result<()> {
        for &xi in samples {
            let h = 1e-4 * xi.abs().max(1.0);
            let plus = self.derivs(xi + h);
            let minus = self.derivs(xi - h);
            let here = self.derivs(xi);
            for order in 1..4 {
                let fd = (plus[order - 1] - minus[order - 1]) / (2.0 * h);
                let scale = here[order].abs().max(here[order - 1].abs()).max(1e-12);
                if (fd - here[order]).abs() > rel_tol * scale {
                    return Err(Error::Domain(format!(
                        "derivative of order {order} at xi = {xi}: supplied {}, finite difference {fd}",
                        here[order]
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives_are_exact() {
        let p = EntropyProfile::polynomial(vec![1.0, 0.0, 1.0], (-5.0, 5.0));
        assert_eq!(p.derivs(1.0), [2.0, 2.0, 2.0, 0.0]);
        let cubic = EntropyProfile::polynomial(vec![0.5, -1.0, 2.0, 3.0], (-5.0, 5.0));
        let x: f64 = 0.7;
        let d = cubic.derivs(x);
        assert!((d[0] - (0.5 - x + 2.0 * x * x + 3.0 * x.powi(3))).abs() < 1e-14);
        assert!((d[1] - (-1.0 + 4.0 * x + 9.0 * x * x)).abs() < 1e-14);
        assert!((d[2] - (4.0 + 18.0 * x)).abs() < 1e-14);
        assert!((d[3] - 18.0).abs() < 1e-14);
    }

    #[test]
    fn builtin_families_pass_derivative_check() {
        let samples: Vec<f64> = (1..10).map(|i| 0.5 + 0.2 * i as f64).collect();
        for p in [
            EntropyProfile::Constant(2.0),
            EntropyProfile::Exponential(1.3),
            EntropyProfile::Power(-0.7),
            EntropyProfile::polynomial(vec![1.0, 0.0, 1.0], (-5.0, 5.0)),
        ] {
            p.check_derivatives(&samples, 1e-6).unwrap();
        }
    }

    #[test]
    fn inconsistent_custom_derivatives_are_caught() {
        let bad = EntropyProfile::Custom(CustomProfile::new("bad", (0.0, 2.0), |xi: f64| {
            [xi.exp(), 2.0 * xi.exp(), xi.exp(), xi.exp()]
        }));
        assert!(bad.check_derivatives(&[1.0], 1e-6).is_err());
    }

    #[test]
    fn power_needs_positive_domain() {
        let p = EntropyProfile::power(2.0).unwrap();
        assert!(p.validate_on(0.0, 1.0).is_err());
        assert!(p.validate_on(1.0, 2.0).is_ok());
    }

    #[test]
    fn constructors_reject_degenerate_parameters() {
        assert!(EntropyProfile::constant(0.0).is_err());
        assert!(EntropyProfile::exponential(0.0).is_err());
        assert!(EntropyProfile::power(0.0).is_err());
    }

    #[test]
    fn rescaling_multiplies_all_derivatives() {
        let p = EntropyProfile::Exponential(2.0);
        let r = p.rescaled(0.5);
        let (a, b) = (p.derivs(0.3), r.derivs(0.3));
        for k in 0..4 {
            assert!((b[k] - 0.5f64.exp() * a[k]).abs() < 1e-12 * b[k].abs());
        }
    }
}
