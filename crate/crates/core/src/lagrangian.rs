//! Lagrangian density, its analytic partials, and the quasilinear
//! second-order equation it generates in mass coordinates.
//!
//! With `P = phi_t`, `Q = phi_xi` and `Gamma = sqrt(1 - P^2)` the density is
//!
//! ```text
//! L = Gamma + Gamma^gamma S0 Q^(1 - gamma) / (gamma - 1)
//! ```
//!
//! and the equation of motion is
//!
//! ```text
//! A phi_tt + B phi_txi + C phi_xixi + D S0' = 0
//! A = (gamma/(gamma-1) (1 - (gamma-1) P^2) S0 + Gamma^(1-gamma) Q^(gamma-1)) Q^2
//! B = -2 gamma Gamma^2 S0 P Q,  C = -gamma Gamma^4 S0,  D = Gamma^4 Q
//! ```
//!
//! The variational derivative of `L` equals `Gamma^(gamma-4) Q^(-gamma-1)`
//! times the left-hand side above.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{validate_kinematics, Jet1, Jet2};

/// Default guard on `|A|` below which the acceleration is refused.
pub const DEFAULT_DENOMINATOR_GUARD: f64 = 1e-12;

fn validate(phi_t: f64, phi_xi: f64, s0: f64, gamma: f64) -> Result<()> {
    validate_kinematics(phi_t, phi_xi)?;
    if !(s0 >= 0.0) || !s0.is_finite() {
        return Err(Error::Domain(format!("entropy must be >= 0, got {s0}")));
    }
    if !(gamma > 1.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("gamma must be > 1, got {gamma}")));
    }
    Ok(())
}

/// Shared subexpressions at one first-order jet.
#[derive(Debug, Clone, Copy)]
struct Kin {
    gamma: f64,
    p: f64,
    q: f64,
    lorentz: f64,
    /// `Gamma^gamma S0 Q^(1 - gamma)`
    a: f64,
}

impl Kin {
    fn new(phi_t: f64, phi_xi: f64, s0: f64, gamma: f64) -> Result<Self> {
        validate(phi_t, phi_xi, s0, gamma)?;
        let lorentz = (1.0 - phi_t * phi_t).sqrt();
        let a = lorentz.powf(gamma) * s0 * phi_xi.powf(1.0 - gamma);
        Ok(Self {
            gamma,
            p: phi_t,
            q: phi_xi,
            lorentz,
            a,
        })
    }

    fn g(&self) -> f64 {
        1.0 + self.gamma * self.a / (self.lorentz * (self.gamma - 1.0))
    }
}

pub fn lagrangian_density(jet: &Jet1, s0: f64, gamma: f64) -> Result<f64> {
    let k = Kin::new(jet.phi_t, jet.phi_xi, s0, gamma)?;
    Ok(k.lorentz + k.a / (gamma - 1.0))
}

/// `G = 1 + gamma S0 Q^(1-gamma) Gamma^(gamma-1) / (gamma-1)`, the pressure
/// correction that multiplies the inertia in the momentum and energy densities.
pub fn g_factor(phi_t: f64, phi_xi: f64, s0: f64, gamma: f64) -> Result<f64> {
    Ok(Kin::new(phi_t, phi_xi, s0, gamma)?.g())
}

/// Value and first partials of the Lagrangian density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Partials {
    pub value: f64,
    /// `dL/dphi_t = -phi_t Gamma^-1 G`
    pub d_phi_t: f64,
    /// `dL/dphi_xi = -S0 Gamma^gamma Q^-gamma`
    pub d_phi_xi: f64,
    /// `dL/dS0 = Gamma^gamma Q^(1-gamma) / (gamma - 1)`
    pub d_entropy: f64,
}

pub fn partials(phi_t: f64, phi_xi: f64, s0: f64, gamma: f64) -> Result<Partials> {
    let k = Kin::new(phi_t, phi_xi, s0, gamma)?;
    let inv_gm1 = 1.0 / (gamma - 1.0);
    let gq = k.lorentz.powf(gamma) * phi_xi.powf(1.0 - gamma);
    Ok(Partials {
        value: k.lorentz + k.a * inv_gm1,
        d_phi_t: -phi_t * k.g() / k.lorentz,
        d_phi_xi: -k.a / phi_xi,
        d_entropy: gq * inv_gm1,
    })
}

/// Second partials of the Lagrangian that appear in its variational derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hessian {
    pub tt: f64,
    pub txi: f64,
    pub xixi: f64,
    /// mixed `phi_xi` / `S0` partial
    pub xi_entropy: f64,
}

pub fn hessian(phi_t: f64, phi_xi: f64, s0: f64, gamma: f64) -> Result<Hessian> {
    let k = Kin::new(phi_t, phi_xi, s0, gamma)?;
    let l = k.lorentz;
    let tt = -k.g() / (l * l * l) + gamma * k.p * k.p * k.a / (l * l * l * l);
    let txi = gamma * k.p * k.a / (l * l * k.q);
    let xixi = gamma * k.a / (k.q * k.q);
    let xi_entropy = -l.powf(gamma) * k.q.powf(-gamma);
    Ok(Hessian {
        tt,
        txi,
        xixi,
        xi_entropy,
    })
}

/// Coefficients of `(phi_tt, phi_txi, phi_xixi, S0')` in the variational
/// derivative `-D_t(dL/dphi_t) - D_xi(dL/dphi_xi)`, built from the Hessian.
pub fn el_expansion(phi_t: f64, phi_xi: f64, s0: f64, gamma: f64) -> Result<[f64; 4]> {
    let h = hessian(phi_t, phi_xi, s0, gamma)?;
    Ok([-h.tt, -2.0 * h.txi, -h.xixi, -h.xi_entropy])
}

/// Coefficients of the quasilinear equation of motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiLinear {
    pub tt: f64,
    pub txi: f64,
    pub xixi: f64,
    pub entropy_slope: f64,
}

impl QuasiLinear {
    pub fn as_array(&self) -> [f64; 4] {
        [self.tt, self.txi, self.xixi, self.entropy_slope]
    }
}

pub fn quasilinear(phi_t: f64, phi_xi: f64, s0: f64, gamma: f64) -> Result<QuasiLinear> {
    let k = Kin::new(phi_t, phi_xi, s0, gamma)?;
    let l2 = k.lorentz * k.lorentz;
    let l4 = l2 * l2;
    let q = k.q;
    let bracket = gamma / (gamma - 1.0) * (l2 * (gamma - 1.0) - gamma + 2.0) * s0
        + k.lorentz.powf(1.0 - gamma) * q.powf(gamma - 1.0);
    Ok(QuasiLinear {
        tt: bracket * q * q,
        txi: -2.0 * gamma * l2 * s0 * k.p * q,
        xixi: -gamma * l4 * s0,
        entropy_slope: l4 * q,
    })
}

/// Left-hand side of the equation of motion at a second-order jet.
pub fn el_residual(jet: &Jet2, s0: f64, s0p: f64, gamma: f64) -> Result<f64> {
    let c = quasilinear(jet.first.phi_t, jet.first.phi_xi, s0, gamma)?;
    Ok(c.tt * jet.phi_tt + c.txi * jet.phi_txi + c.xixi * jet.phi_xixi + c.entropy_slope * s0p)
}

/// Largest single term of [`el_residual`], the natural scale for round-off.
pub fn el_residual_scale(jet: &Jet2, s0: f64, s0p: f64, gamma: f64) -> Result<f64> {
    let c = quasilinear(jet.first.phi_t, jet.first.phi_xi, s0, gamma)?;
    Ok([
        c.tt * jet.phi_tt,
        c.txi * jet.phi_txi,
        c.xixi * jet.phi_xixi,
        c.entropy_slope * s0p,
    ]
    .iter()
    .fold(0.0f64, |m, v| m.max(v.abs())))
}

/// `phi_tt` solved from the equation of motion, with the default guard.
pub fn accel(phi_t: f64, phi_xi: f64, phi_txi: f64, phi_xixi: f64, s0: f64, s0p: f64, gamma: f64) -> Result<f64> {
    accel_guarded(
        phi_t,
        phi_xi,
        phi_txi,
        phi_xixi,
        s0,
        s0p,
        gamma,
        DEFAULT_DENOMINATOR_GUARD,
    )
}

/// `phi_tt` solved from the equation of motion. The coefficient of `phi_tt`
/// contains `1 - (gamma - 1) phi_t^2`, which vanishes for `gamma > 2`; `|A|`
/// at or below `eps_den` is reported as [`Error::DegenerateDenominator`].
#[allow(clippy::too_many_arguments)]
pub fn accel_guarded(
    phi_t: f64,
    phi_xi: f64,
    phi_txi: f64,
    phi_xixi: f64,
    s0: f64,
    s0p: f64,
    gamma: f64,
    eps_den: f64,
) -> Result<f64> {
    let c = quasilinear(phi_t, phi_xi, s0, gamma)?;
    if !(c.tt.abs() > eps_den) {
        return Err(Error::DegenerateDenominator(c.tt.abs()));
    }
    Ok(-(c.txi * phi_txi + c.xixi * phi_xixi + c.entropy_slope * s0p) / c.tt)
}

/// Deviation of two coefficient vectors from being parallel: the largest
/// component of the difference between their unit vectors, after aligning signs.
pub fn parallel_deviation(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return if na == nb { 0.0 } else { 1.0 };
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let sign = if dot < 0.0 { -1.0 } else { 1.0 };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x / na - sign * y / nb).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{JetRanges, JetSampler};

    fn rest_jet2(phi_tt: f64) -> Jet2 {
        Jet2 {
            first: Jet1::kinematic(0.0, 1.0),
            phi_tt,
            phi_txi: 0.0,
            phi_xixi: 0.0,
        }
    }

    #[test]
    fn lagrangian_density_values() {
        for gamma in [1.4, 2.0, 3.0] {
            let l = lagrangian_density(&Jet1::kinematic(0.0, 1.0), 0.0, gamma).unwrap();
            assert_eq!(l, 1.0);
        }
        let l = lagrangian_density(&Jet1::kinematic(0.0, 1.0), 1.0, 2.0).unwrap();
        assert!((l - 2.0).abs() < 1e-15);
        let l = lagrangian_density(&Jet1::kinematic(0.6, 2.0), 1.0, 2.0).unwrap();
        assert!((l - 1.12).abs() < 1e-14);
    }

    #[test]
    fn lagrangian_density_errors() {
        assert!(matches!(
            lagrangian_density(&Jet1::kinematic(1.0, 1.0), 1.0, 2.0),
            Err(Error::SuperluminalState(_))
        ));
        assert!(matches!(
            lagrangian_density(&Jet1::kinematic(0.0, -1.0), 1.0, 2.0),
            Err(Error::NonPositiveStretch(_))
        ));
    }

    #[test]
    fn g_factor_values() {
        assert_eq!(g_factor(0.3, 1.7, 0.0, 1.4).unwrap(), 1.0);
        assert!((g_factor(0.0, 1.0, 1.0, 2.0).unwrap() - 3.0).abs() < 1e-15);
        assert!((g_factor(0.6, 2.0, 1.0, 2.0).unwrap() - 1.8).abs() < 1e-14);
    }

    #[test]
    fn el_residual_examples() {
        assert_eq!(el_residual(&rest_jet2(0.0), 1.0, 0.0, 5.0 / 3.0).unwrap(), 0.0);
        let drift = Jet2 {
            first: Jet1::kinematic(0.4, 1.3),
            phi_tt: 0.0,
            phi_txi: 0.0,
            phi_xixi: 0.0,
        };
        assert_eq!(el_residual(&drift, 2.0, 0.0, 1.4).unwrap(), 0.0);
        let r = el_residual(&rest_jet2(-1.0 / 3.0), 1.0, 1.0, 2.0).unwrap();
        assert!(r.abs() < 1e-15, "{r}");
    }

    #[test]
    fn accel_examples() {
        assert_eq!(accel(0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 2.0).unwrap(), 0.0);
        let a = accel(0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 2.0).unwrap();
        assert!((a + 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            accel(0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 2.0),
            Err(Error::NonPositiveStretch(_))
        ));
    }

    #[test]
    fn accel_detects_vanishing_denominator() {
        // gamma = 3, v = 0.8: 1 - (gamma - 1) v^2 < 0, so S0 can cancel the vacuum term.
        let gamma: f64 = 3.0;
        let v: f64 = 0.8;
        let q: f64 = 1.0;
        let lorentz = (1.0 - v * v).sqrt();
        let vac = lorentz.powf(1.0 - gamma) * q.powf(gamma - 1.0);
        let factor = 1.0 - (gamma - 1.0) * v * v;
        let s0 = -vac * (gamma - 1.0) / (gamma * factor);
        assert!(s0 > 0.0);
        assert!(matches!(
            accel(v, q, 0.0, 0.0, s0, 0.0, gamma),
            Err(Error::DegenerateDenominator(_))
        ));
    }

    #[test]
    fn accel_zeroes_residual() {
        let mut sampler = JetSampler::new(11, JetRanges::default());
        for _ in 0..2000 {
            let j = sampler.jet2();
            let gamma = sampler.uniform(1.05, 2.0);
            let s0 = sampler.uniform(0.0, 3.0);
            let s0p = sampler.uniform(-3.0, 3.0);
            let (p, q) = (j.first.phi_t, j.first.phi_xi);
            let a = accel(p, q, j.phi_txi, j.phi_xixi, s0, s0p, gamma).unwrap();
            let jet = Jet2 { phi_tt: a, ..j };
            let r = el_residual(&jet, s0, s0p, gamma).unwrap();
            let scale = el_residual_scale(&jet, s0, s0p, gamma).unwrap().max(1e-300);
            assert!(r.abs() <= 1e-12 * scale, "r = {r}, scale = {scale}");
        }
    }

    fn fd_partial(f: impl Fn(f64, f64) -> f64, p: f64, q: f64, dp: f64, dq: f64) -> f64 {
        let h = 1e-6;
        (f(p + h * dp, q + h * dq) - f(p - h * dp, q - h * dq)) / (2.0 * h)
    }

    #[test]
    fn analytic_partials_match_finite_differences() {
        let mut sampler = JetSampler::new(5, JetRanges::default());
        for _ in 0..500 {
            let j = sampler.jet1();
            let gamma = sampler.uniform(1.1, 3.0);
            let s0 = sampler.uniform(0.1, 3.0);
            let (p, q) = (j.phi_t, j.phi_xi);
            let l = |p: f64, q: f64| lagrangian_density(&Jet1::kinematic(p, q), s0, gamma).unwrap();
            let d = partials(p, q, s0, gamma).unwrap();
            let tol = |x: f64| 1e-6 * x.abs().max(1.0);
            assert!((d.d_phi_t - fd_partial(l, p, q, 1.0, 0.0)).abs() < tol(d.d_phi_t));
            assert!((d.d_phi_xi - fd_partial(l, p, q, 0.0, 1.0)).abs() < tol(d.d_phi_xi));
            let ls = |s: f64| lagrangian_density(&Jet1::kinematic(p, q), s, gamma).unwrap();
            let fd_s = (ls(s0 + 1e-6) - ls(s0 - 1e-6)) / 2e-6;
            assert!((d.d_entropy - fd_s).abs() < tol(d.d_entropy));

            let h = hessian(p, q, s0, gamma).unwrap();
            let lp = |p: f64, q: f64| partials(p, q, s0, gamma).unwrap().d_phi_t;
            let lq = |p: f64, q: f64| partials(p, q, s0, gamma).unwrap().d_phi_xi;
            assert!((h.tt - fd_partial(lp, p, q, 1.0, 0.0)).abs() < tol(h.tt));
            assert!((h.txi - fd_partial(lp, p, q, 0.0, 1.0)).abs() < tol(h.txi));
            assert!((h.txi - fd_partial(lq, p, q, 1.0, 0.0)).abs() < tol(h.txi));
            assert!((h.xixi - fd_partial(lq, p, q, 0.0, 1.0)).abs() < tol(h.xixi));
            let lqs = |s: f64| partials(p, q, s, gamma).unwrap().d_phi_xi;
            let fd_qs = (lqs(s0 + 1e-6) - lqs(s0 - 1e-6)) / 2e-6;
            assert!((h.xi_entropy - fd_qs).abs() < tol(h.xi_entropy));
        }
    }

    #[test]
    fn variational_derivative_is_parallel_to_equation_of_motion() {
        let mut sampler = JetSampler::new(3, JetRanges::default());
        for _ in 0..1000 {
            let j = sampler.jet1();
            let gamma = sampler.uniform(1.01, 3.0);
            let s0 = sampler.uniform(0.01, 3.0);
            let e = el_expansion(j.phi_t, j.phi_xi, s0, gamma).unwrap();
            let c = quasilinear(j.phi_t, j.phi_xi, s0, gamma).unwrap().as_array();
            assert!(parallel_deviation(&e, &c) < 1e-10);
            // proportionality factor Gamma^(gamma-4) Q^(-gamma-1)
            let l = (1.0 - j.phi_t * j.phi_t).sqrt();
            let factor = l.powf(gamma - 4.0) * j.phi_xi.powf(-gamma - 1.0);
            for k in 0..4 {
                assert!((e[k] - factor * c[k]).abs() <= 1e-10 * e[k].abs().max(factor * c[k].abs()).max(1e-300));
            }
        }
    }

    #[test]
    fn lagrangian_is_even_in_velocity() {
        let mut sampler = JetSampler::new(9, JetRanges::default());
        for _ in 0..200 {
            let j = sampler.jet1();
            let flipped = Jet1 { phi_t: -j.phi_t, ..j };
            let a = lagrangian_density(&j, 1.3, 1.7).unwrap();
            let b = lagrangian_density(&flipped, 1.3, 1.7).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn parallel_deviation_basics() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(parallel_deviation(&a, &a.map(|x| -2.0 * x)), 0.0);
        assert!(parallel_deviation(&a, &[1.0, 2.0, 3.0, 5.0]) > 1e-2);
    }
}
