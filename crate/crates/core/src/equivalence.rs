//! Equivalence transformations, used to check that the equation of motion and
//! the entropy classification transform covariantly.

use crate::entropy::EntropyProfile;
use crate::jet::{Jet1, Jet2};

/// Uniform dilation `(xi, t, phi) -> e^a (xi, t, phi)` applied to a jet and to
/// the entropy slope at that jet. First derivatives are unchanged; second
/// derivatives and `S0'` scale by `e^-a`. The equation of motion picks up the
/// factor `e^-a`.
pub fn dilate(jet: &Jet2, s0p: f64, a: f64) -> (Jet2, f64) {
    let k = a.exp();
    let first = Jet1 {
        xi: k * jet.first.xi,
        t: k * jet.first.t,
        phi: k * jet.first.phi,
        ..jet.first
    };
    (
        Jet2 {
            first,
            phi_tt: jet.phi_tt / k,
            phi_txi: jet.phi_txi / k,
            phi_xixi: jet.phi_xixi / k,
        },
        s0p / k,
    )
}

/// Entropy rescaling `S0 -> e^a S0`.
pub fn scale_entropy(profile: &EntropyProfile, a: f64) -> EntropyProfile {
    profile.rescaled(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{JetRanges, JetSampler};
    use crate::lagrangian::{accel, el_residual, el_residual_scale};

    #[test]
    fn dilation_preserves_solutions_and_non_solutions() {
        let mut sampler = JetSampler::new(21, JetRanges::default());
        for _ in 0..500 {
            let mut jet = sampler.jet2();
            let gamma = sampler.uniform(1.1, 2.0);
            let s0 = sampler.uniform(0.1, 3.0);
            let s0p = sampler.uniform(-2.0, 2.0);
            let a = sampler.uniform(-1.0, 1.0);
            let f = &jet.first;
            jet.phi_tt = accel(f.phi_t, f.phi_xi, jet.phi_txi, jet.phi_xixi, s0, s0p, gamma).unwrap();
            let (dj, dp) = dilate(&jet, s0p, a);
            let r = el_residual(&dj, s0, dp, gamma).unwrap();
            assert!(r.abs() <= 1e-12 * el_residual_scale(&dj, s0, dp, gamma).unwrap());

            jet.phi_tt += 0.3;
            let r0 = el_residual(&jet, s0, s0p, gamma).unwrap();
            let (dj, dp) = dilate(&jet, s0p, a);
            let r1 = el_residual(&dj, s0, dp, gamma).unwrap();
            assert!(r1.abs() > 0.0);
            assert!((r1 - (-a).exp() * r0).abs() <= 1e-12 * r0.abs().max(1.0));
        }
    }
}
