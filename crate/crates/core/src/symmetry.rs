//! Point symmetries of the equation of motion, the Noether condition for
//! variational symmetries, and classification of entropy profiles by the
//! symmetry extension they admit.

use serde::{Deserialize, Serialize};

use crate::entropy::EntropyProfile;
use crate::error::{Error, Result};
use crate::jet::{Jet1, JetRanges, JetSampler};
use crate::lagrangian::partials;

/// Generator `zeta_xi d_xi + zeta_t d_t + eta d_phi` with coefficients affine in
/// `(xi, t, phi)`:
///
/// ```text
/// zeta_xi = a0 + a1 xi
/// zeta_t  = b0 + b1 t + b2 phi
/// eta     = c0 + c1 t + c2 phi
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineGenerator {
    pub name: String,
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl AffineGenerator {
    fn zero(name: &str) -> Self {
        Self {
            name: name.to_string(),
            a0: 0.0,
            a1: 0.0,
            b0: 0.0,
            b1: 0.0,
            b2: 0.0,
            c0: 0.0,
            c1: 0.0,
            c2: 0.0,
        }
    }

    /// Shift of the position, `d_phi`.
    pub fn x1() -> Self {
        Self {
            c0: 1.0,
            ..Self::zero("X1")
        }
    }

    /// Time translation, `d_t`.
    pub fn x2() -> Self {
        Self {
            b0: 1.0,
            ..Self::zero("X2")
        }
    }

    /// Lorentz boost, `phi d_t + t d_phi`.
    pub fn x3() -> Self {
        Self {
            b2: 1.0,
            c1: 1.0,
            ..Self::zero("X3")
        }
    }

    /// Uniform dilation, `xi d_xi + t d_t + phi d_phi`.
    pub fn x4() -> Self {
        Self {
            a1: 1.0,
            b1: 1.0,
            c2: 1.0,
            ..Self::zero("X4")
        }
    }

    /// Label translation, `d_xi`.
    pub fn x5() -> Self {
        Self {
            a0: 1.0,
            ..Self::zero("X5")
        }
    }

    /// `(gamma - 1) d_xi + q (t d_t + phi d_phi)`, admitted for `S0 = exp(q xi)`.
    pub fn x4a(q: f64, gamma: f64) -> Self {
        Self {
            a0: gamma - 1.0,
            b1: q,
            c2: q,
            ..Self::zero("X4a")
        }
    }

    /// `(gamma - 1) xi d_xi + (gamma + q - 1)(t d_t + phi d_phi)`, admitted for `S0 = xi^q`.
    pub fn x4b(q: f64, gamma: f64) -> Self {
        Self {
            a1: gamma - 1.0,
            b1: gamma + q - 1.0,
            c2: gamma + q - 1.0,
            ..Self::zero("X4b")
        }
    }

    pub fn coefficients(&self) -> [f64; 8] {
        [self.a0, self.a1, self.b0, self.b1, self.b2, self.c0, self.c1, self.c2]
    }

    pub fn is_nonzero(&self) -> bool {
        self.coefficients().iter().any(|c| *c != 0.0)
    }

    #[inline]
    pub fn zeta_xi(&self, xi: f64) -> f64 {
        self.a0 + self.a1 * xi
    }

    #[inline]
    pub fn zeta_t(&self, t: f64, phi: f64) -> f64 {
        self.b0 + self.b1 * t + self.b2 * phi
    }

    #[inline]
    pub fn eta(&self, t: f64, phi: f64) -> f64 {
        self.c0 + self.c1 * t + self.c2 * phi
    }

    /// `D_t zeta_t + D_xi zeta_xi`
    #[inline]
    fn total_divergence(&self, jet: &Jet1) -> f64 {
        self.b1 + self.b2 * jet.phi_t + self.a1
    }

    /// Characteristic `eta - zeta_t phi_t - zeta_xi phi_xi`.
    pub fn characteristic(&self, jet: &Jet1) -> f64 {
        self.eta(jet.t, jet.phi) - self.zeta_t(jet.t, jet.phi) * jet.phi_t - self.zeta_xi(jet.xi) * jet.phi_xi
    }
}

pub fn kernel_generators() -> Vec<AffineGenerator> {
    vec![AffineGenerator::x1(), AffineGenerator::x2(), AffineGenerator::x3()]
}

/// Generators extending the kernel for a given entropy profile.
pub fn extension_for(profile: &EntropyProfile, gamma: f64) -> Vec<AffineGenerator> {
    match family_of(profile, gamma) {
        Family::Constant => vec![AffineGenerator::x4(), AffineGenerator::x5()],
        Family::Exponential { q } => vec![AffineGenerator::x4a(q, gamma)],
        Family::Power { q } => vec![AffineGenerator::x4b(q, gamma)],
        Family::Generic => Vec::new(),
    }
}

/// Family of a profile. Built-in variants map directly; custom profiles are
/// classified on 16 points of their domain.
pub fn family_of(profile: &EntropyProfile, gamma: f64) -> Family {
    match profile {
        EntropyProfile::Constant(_) => Family::Constant,
        EntropyProfile::Exponential(q) => Family::Exponential { q: *q },
        EntropyProfile::Power(q) => Family::Power { q: *q },
        EntropyProfile::Custom(c) => {
            let (lo, hi) = c.domain();
            let lo = if lo.is_finite() { lo } else { -1.0 };
            let hi = if hi.is_finite() { hi } else { lo + 2.0 };
            let samples = default_samples(lo, hi, 16);
            classify_entropy(profile, &samples, DEFAULT_CLASSIFY_TOL, gamma)
                .map(|c| c.family)
                .unwrap_or(Family::Generic)
        }
    }
}

/// First prolongation `(eta^(t), eta^(xi))` of an affine generator at a jet.
pub fn prolong1(gen: &AffineGenerator, jet: &Jet1) -> (f64, f64) {
    let (p, q) = (jet.phi_t, jet.phi_xi);
    // D_t eta = c1 + c2 p, D_t zeta_t = b1 + b2 p, D_t zeta_xi = 0
    // D_xi eta = c2 q, D_xi zeta_t = b2 q, D_xi zeta_xi = a1
    let eta_t = gen.c1 + gen.c2 * p - p * (gen.b1 + gen.b2 * p);
    let eta_xi = gen.c2 * q - p * gen.b2 * q - q * gen.a1;
    (eta_t, eta_xi)
}

/// Noether residual together with the largest magnitude among its terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoetherEvaluation {
    pub residual: f64,
    pub scale: f64,
    pub lagrangian: f64,
}

impl NoetherEvaluation {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.residual.abs() / self.scale
        }
    }
}

/// `X L + L (D_t zeta_t + D_xi zeta_xi)` with the generator acting on the
/// explicit `xi` dependence of `S0` as well as on the derivatives.
pub fn noether_residual(gen: &AffineGenerator, jet: &Jet1, profile: &EntropyProfile, gamma: f64) -> Result<f64> {
    Ok(noether_evaluate(gen, jet, profile, gamma)?.residual)
}

pub fn noether_evaluate(
    gen: &AffineGenerator,
    jet: &Jet1,
    profile: &EntropyProfile,
    gamma: f64,
) -> Result<NoetherEvaluation> {
    let (s0, s0p) = profile.value_and_slope(jet.xi);
    let d = partials(jet.phi_t, jet.phi_xi, s0, gamma)?;
    let (eta_t, eta_xi) = prolong1(gen, jet);
    let terms = [
        gen.zeta_xi(jet.xi) * s0p * d.d_entropy,
        eta_t * d.d_phi_t,
        eta_xi * d.d_phi_xi,
        d.value * gen.total_divergence(jet),
    ];
    let residual = terms.iter().sum();
    let scale = terms.iter().fold(d.value.abs(), |m, t| m.max(t.abs()));
    Ok(NoetherEvaluation {
        residual,
        scale,
        lagrangian: d.value,
    })
}

/// `Delta = -S0 S0' S0''' + 2 S0 S0''^2 - S0'' S0'^2`; vanishes exactly for
/// exponential and power-law profiles.
pub fn delta_invariant(s0: f64, s0p: f64, s0pp: f64, s0ppp: f64) -> f64 {
    -s0 * s0p * s0ppp + 2.0 * s0 * s0pp * s0pp - s0pp * s0p * s0p
}

/// Sum of the magnitudes of the three terms of [`delta_invariant`].
pub fn delta_scale(s0: f64, s0p: f64, s0pp: f64, s0ppp: f64) -> f64 {
    (s0 * s0p * s0ppp).abs() + 2.0 * (s0 * s0pp * s0pp).abs() + (s0pp * s0p * s0p).abs()
}

pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-8;
pub const MIN_CLASSIFY_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Constant,
    Exponential { q: f64 },
    Power { q: f64 },
    Generic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub kernel: Vec<AffineGenerator>,
    pub extensions: Vec<AffineGenerator>,
    pub family: Family,
    /// `(xi, Delta, Delta / scale)` at each sample.
    pub delta_samples: Vec<(f64, f64, f64)>,
}

/// Evenly spaced sample points strictly inside `[lo, hi]`.
pub fn default_samples(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
}

/// Fits a constant to `values` by least squares and accepts it when every
/// sample lies within `tol` (relative to `max(1, |fit|)`).
fn constant_fit(values: &[f64], tol: f64) -> Option<f64> {
    let fit = values.iter().sum::<f64>() / values.len() as f64;
    let dev = values.iter().fold(0.0f64, |m, v| m.max((v - fit).abs()));
    (dev <= tol * fit.abs().max(1.0)).then_some(fit)
}

/// Decides which symmetry family a profile belongs to from its derivatives at
/// the sample points.
pub fn classify_entropy(
    profile: &EntropyProfile,
    samples: &[f64],
    tol: f64,
    gamma: f64,
) -> Result<ClassificationResult> {
    if samples.len() < MIN_CLASSIFY_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_CLASSIFY_SAMPLES,
            got: samples.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "classification tolerance must be > 0, got {tol}"
        )));
    }
    let derivs: Vec<[f64; 4]> = samples.iter().map(|&xi| profile.derivs(xi)).collect();
    let delta_samples: Vec<(f64, f64, f64)> = samples
        .iter()
        .zip(&derivs)
        .map(|(&xi, d)| {
            let delta = delta_invariant(d[0], d[1], d[2], d[3]);
            let scale = delta_scale(d[0], d[1], d[2], d[3]);
            let rel = if scale == 0.0 { 0.0 } else { delta / scale };
            (xi, delta, rel)
        })
        .collect();

    let is_constant = derivs.iter().all(|d| d[1].abs() <= tol * d[0].abs());
    let family = if is_constant {
        Family::Constant
    } else if delta_samples.iter().all(|s| s.2.abs() <= tol) {
        let log_slope: Vec<f64> = derivs.iter().map(|d| d[1] / d[0]).collect();
        let exponential = constant_fit(&log_slope, tol);
        let power = if samples.iter().all(|&xi| xi > 0.0) {
            let elasticity: Vec<f64> = samples.iter().zip(&derivs).map(|(xi, d)| xi * d[1] / d[0]).collect();
            constant_fit(&elasticity, tol)
        } else {
            None
        };
        match (exponential, power) {
            (Some(q), _) => Family::Exponential { q },
            (None, Some(q)) => Family::Power { q },
            (None, None) => Family::Generic,
        }
    } else {
        Family::Generic
    };

    let extensions = match family {
        Family::Constant => vec![AffineGenerator::x4(), AffineGenerator::x5()],
        Family::Exponential { q } => vec![AffineGenerator::x4a(q, gamma)],
        Family::Power { q } => vec![AffineGenerator::x4b(q, gamma)],
        Family::Generic => Vec::new(),
    };
    Ok(ClassificationResult {
        kernel: kernel_generators(),
        extensions,
        family,
        delta_samples,
    })
}

/// Conserved current generated by a variational symmetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoetherDensity {
    pub generator: AffineGenerator,
    pub gamma: f64,
    /// Set when the generator failed the variational test on the validation sample.
    pub warning: Option<String>,
}

impl NoetherDensity {
    /// `(T^t, T^xi)` with zero gauge terms:
    ///
    /// ```text
    /// T^t  = zeta_t L  + W dL/dphi_t
    /// T^xi = zeta_xi L + W dL/dphi_xi,   W = eta - zeta_t phi_t - zeta_xi phi_xi
    /// ```
    pub fn eval(&self, jet: &Jet1, s0: f64) -> Result<(f64, f64)> {
        let d = partials(jet.phi_t, jet.phi_xi, s0, self.gamma)?;
        let w = self.generator.characteristic(jet);
        let g = &self.generator;
        Ok((
            g.zeta_t(jet.t, jet.phi) * d.value + w * d.d_phi_t,
            g.zeta_xi(jet.xi) * d.value + w * d.d_phi_xi,
        ))
    }
}

/// Number of random jets used to check that a generator is variational.
pub const NOETHER_VALIDATION_SAMPLES: usize = 256;
pub const NOETHER_TOL: f64 = 1e-10;

/// Builds the conserved current of `gen`, attaching a warning if the Noether
/// residual does not vanish for `profile` on a validation sample.
pub fn noether_density(gen: &AffineGenerator, profile: &EntropyProfile, gamma: f64) -> NoetherDensity {
    let mut ranges = JetRanges::default();
    if let EntropyProfile::Custom(c) = profile {
        let (lo, hi) = c.domain();
        if lo.is_finite() && hi.is_finite() {
            ranges.xi = (lo, hi);
        }
    }
    let mut sampler = JetSampler::new(0x5eed, ranges);
    let mut worst = 0.0f64;
    for _ in 0..NOETHER_VALIDATION_SAMPLES {
        let jet = sampler.jet1();
        worst = match noether_evaluate(gen, &jet, profile, gamma) {
            Ok(ev) => worst.max(ev.relative()),
            Err(_) => f64::INFINITY,
        };
    }
    let warning = (worst > NOETHER_TOL).then(|| {
        format!(
            "{} is not variational for this profile (max relative Noether residual {worst:e}); \
             the current is not conserved",
            gen.name
        )
    });
    NoetherDensity {
        generator: gen.clone(),
        gamma,
        warning,
    }
}

/// Summary of a sampled Noether check for one generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoetherSweep {
    pub generator: String,
    pub samples: usize,
    pub max_relative: f64,
    /// Fraction of jets with relative residual at least `nonzero_floor`.
    pub fraction_nonzero: f64,
}

/// Evaluates the Noether residual of `gen` at `samples` random jets.
pub fn noether_sweep(
    gen: &AffineGenerator,
    profile: &EntropyProfile,
    gamma: f64,
    samples: usize,
    seed: u64,
    ranges: JetRanges,
    nonzero_floor: f64,
) -> Result<NoetherSweep> {
    let mut sampler = JetSampler::new(seed, ranges);
    let mut max_relative = 0.0f64;
    let mut nonzero = 0usize;
    for _ in 0..samples {
        let jet = sampler.jet1();
        let rel = noether_evaluate(gen, &jet, profile, gamma)?.relative();
        max_relative = max_relative.max(rel);
        if rel >= nonzero_floor {
            nonzero += 1;
        }
    }
    Ok(NoetherSweep {
        generator: gen.name.clone(),
        samples,
        max_relative,
        fraction_nonzero: nonzero as f64 / samples.max(1) as f64,
    })
}
