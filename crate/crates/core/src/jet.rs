//! Pointwise jets of the trajectory map `phi(xi, t)`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// First-order jet `(xi, t, phi, phi_t, phi_xi)`.
///
/// `phi_t` is the particle velocity and `1 / phi_xi` the density `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet1 {
    pub xi: f64,
    pub t: f64,
    pub phi: f64,
    pub phi_t: f64,
    pub phi_xi: f64,
}

impl Jet1 {
    pub fn new(xi: f64, t: f64, phi: f64, phi_t: f64, phi_xi: f64) -> Result<Self> {
        let jet = Self {
            xi,
            t,
            phi,
            phi_t,
            phi_xi,
        };
        jet.validate()?;
        Ok(jet)
    }

    /// A jet carrying only the derivatives that enter the Lagrangian.
    pub fn kinematic(phi_t: f64, phi_xi: f64) -> Self {
        Self {
            xi: 0.0,
            t: 0.0,
            phi: 0.0,
            phi_t,
            phi_xi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_kinematics(self.phi_t, self.phi_xi)
    }
}

/// Second-order jet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet2 {
    pub first: Jet1,
    pub phi_tt: f64,
    pub phi_txi: f64,
    pub phi_xixi: f64,
}

impl Jet2 {
    pub fn new(first: Jet1, phi_tt: f64, phi_txi: f64, phi_xixi: f64) -> Result<Self> {
        first.validate()?;
        Ok(Self {
            first,
            phi_tt,
            phi_txi,
            phi_xixi,
        })
    }
}

#[inline]
pub(crate) fn validate_kinematics(phi_t: f64, phi_xi: f64) -> Result<()> {
    if !(phi_t.abs() < 1.0) {
        return Err(Error::SuperluminalState(phi_t.abs()));
    }
    if !(phi_xi > 0.0) {
        return Err(Error::NonPositiveStretch(phi_xi));
    }
    Ok(())
}

/// Ranges for random admissible jets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JetRanges {
    pub max_speed: f64,
    pub stretch: (f64, f64),
    pub xi: (f64, f64),
    pub t: (f64, f64),
    pub phi: (f64, f64),
    pub second: f64,
}

impl Default for JetRanges {
    fn default() -> Self {
        Self {
            max_speed: 0.9,
            stretch: (0.2, 5.0),
            xi: (0.2, 3.0),
            t: (-2.0, 2.0),
            phi: (-3.0, 3.0),
            second: 2.0,
        }
    }
}

/// Deterministic source of random admissible jets.
pub struct JetSampler {
    rng: ChaCha8Rng,
    ranges: JetRanges,
}

impl JetSampler {
    pub fn new(seed: u64, ranges: JetRanges) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            ranges,
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn jet1(&mut self) -> Jet1 {
        let r = self.ranges;
        Jet1 {
            xi: self.uniform(r.xi.0, r.xi.1),
            t: self.uniform(r.t.0, r.t.1),
            phi: self.uniform(r.phi.0, r.phi.1),
            phi_t: self.uniform(-r.max_speed, r.max_speed),
            phi_xi: self.uniform(r.stretch.0, r.stretch.1),
        }
    }

    pub fn jet2(&mut self) -> Jet2 {
        let first = self.jet1();
        let s = self.ranges.second;
        Jet2 {
            first,
            phi_tt: self.uniform(-s, s),
            phi_txi: self.uniform(-s, s),
            phi_xixi: self.uniform(-s, s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_invariants() {
        assert!(Jet1::new(0.0, 0.0, 0.0, 0.5, 1.0).is_ok());
        assert!(matches!(
            Jet1::new(0.0, 0.0, 0.0, 1.0, 1.0),
            Err(Error::SuperluminalState(_))
        ));
        assert!(matches!(
            Jet1::new(0.0, 0.0, 0.0, 0.1, 0.0),
            Err(Error::NonPositiveStretch(_))
        ));
    }

    #[test]
    fn sampler_is_reproducible_and_admissible() {
        let mut a = JetSampler::new(7, JetRanges::default());
        let mut b = JetSampler::new(7, JetRanges::default());
        for _ in 0..100 {
            let (ja, jb) = (a.jet2(), b.jet2());
            assert_eq!(ja, jb);
            ja.first.validate().unwrap();
        }
    }
}
