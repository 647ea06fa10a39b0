//! Run configuration in a flat `key = value` text format.
//!
//! Blank lines and text after `#` are ignored. Unknown keys are rejected.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `gamma` | `1.6666666666666667` | adiabatic exponent, `> 1` |
//! | `entropy` | `constant` | `constant`, `exponential`, `power` or `polynomial` |
//! | `entropy_s0` | `1` | value for `constant` |
//! | `entropy_q` | `1` | rate or exponent for `exponential` / `power` |
//! | `entropy_coeffs` | | comma-separated coefficients for `polynomial`, lowest order first |
//! | `xi_min`, `xi_max` | `0`, `1` | mass-coordinate domain |
//! | `n` | `200` | number of cells |
//! | `boundary` | `periodic` | `periodic` or `wall` |
//! | `cfl` | `0.4` | Courant number in `(0, 1]` |
//! | `t_end` | `1` | final time |
//! | `snapshot_stride` | `1` | steps between stored snapshots |
//! | `eps_v` | `1e-6` | velocity margin below light speed |
//! | `eps_den` | `1e-12` | acceleration denominator guard |
//! | `dt_max` | `0.25 dxi` | step used when all characteristic speeds vanish |
//! | `ic` | `sine-velocity` | `rest`, `sine-displacement`, `sine-velocity`, `gaussian-velocity` |
//! | `base_stretch` | `uniform` | `uniform` (`phi = xi`) or `hydrostatic` (uniform pressure at rest) under the preset |
//! | `ic_amplitude` | `0.1` | `a` or `b` of the preset |
//! | `ic_k` | `1` | wave number of the sine presets |
//! | `ic_sigma`, `ic_xi0` | `0.1`, domain centre | Gaussian width and centre |
//! | `seed` | `0` | random seed for sampled checks |
//! | `el_samples`, `el_tol` | `1000`, `1e-8` | EL equivalence check |
//! | `noether_samples`, `noether_tol` | `10000`, `1e-10` | Noether check |
//! | `noether_floor`, `noether_fraction` | `1e-3`, `0.99` | "not variational" criterion |
//! | `classify_samples`, `classify_tol` | `16`, `1e-8` | entropy classification |
//! | `euler_points` | `n + 1` | points of the uniform Eulerian grid |
//! | `refine_levels` | `3` | grids `n, 2n, 4n, ...` in refinement studies |
//! | `order_target`, `order_tol` | `2`, `0.3` | accepted convergence orders |
//! | `diagnostics` | `true` | write `diagnostics.csv` from `simulate` |
//! | `euler_bridge` | `false` | also write `eulerian.csv` from `simulate` |

use std::path::Path;

use serde::Serialize;

use crate::entropy::EntropyProfile;
use crate::error::{Error, Result};
use crate::gas::GasParams;
use crate::lagrangian::DEFAULT_DENOMINATOR_GUARD;
use crate::solver::{short_hash, BaseStretch, Boundary, Grid, InitialCondition, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum EntropySpec {
    Constant { s0: f64 },
    Exponential { q: f64 },
    Power { q: f64 },
    Polynomial { coeffs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub gamma: f64,
    pub entropy: EntropySpec,
    pub xi_min: f64,
    pub xi_max: f64,
    pub n: usize,
    pub boundary: Boundary,
    pub cfl: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub eps_v: f64,
    pub eps_den: f64,
    pub dt_max: Option<f64>,
    pub ic: InitialCondition,
    pub base_stretch: BaseStretch,
    pub seed: u64,
    pub el_samples: usize,
    pub el_tol: f64,
    pub noether_samples: usize,
    pub noether_tol: f64,
    pub noether_floor: f64,
    pub noether_fraction: f64,
    pub classify_samples: usize,
    pub classify_tol: f64,
    pub euler_points: Option<usize>,
    pub refine_levels: usize,
    pub order_target: f64,
    pub order_tol: f64,
    pub diagnostics: bool,
    pub euler_bridge: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma: 5.0 / 3.0,
            entropy: EntropySpec::Constant { s0: 1.0 },
            xi_min: 0.0,
            xi_max: 1.0,
            n: 200,
            boundary: Boundary::Periodic,
            cfl: 0.4,
            t_end: 1.0,
            snapshot_stride: 1,
            eps_v: 1e-6,
            eps_den: DEFAULT_DENOMINATOR_GUARD,
            dt_max: None,
            ic: InitialCondition::SineVelocity { b: 0.1, k: 1.0 },
            base_stretch: BaseStretch::Uniform,
            seed: 0,
            el_samples: 1000,
            el_tol: 1e-8,
            noether_samples: 10_000,
            noether_tol: 1e-10,
            noether_floor: 1e-3,
            noether_fraction: 0.99,
            classify_samples: 16,
            classify_tol: 1e-8,
            euler_points: None,
            refine_levels: 3,
            order_target: 2.0,
            order_tol: 0.3,
            diagnostics: true,
            euler_bridge: false,
        }
    }
}

const KEYS: &[&str] = &[
    "gamma",
    "entropy",
    "entropy_s0",
    "entropy_q",
    "entropy_coeffs",
    "xi_min",
    "xi_max",
    "n",
    "boundary",
    "cfl",
    "t_end",
    "snapshot_stride",
    "eps_v",
    "eps_den",
    "dt_max",
    "ic",
    "base_stretch",
    "ic_amplitude",
    "ic_k",
    "ic_sigma",
    "ic_xi0",
    "seed",
    "el_samples",
    "el_tol",
    "noether_samples",
    "noether_tol",
    "noether_floor",
    "noether_fraction",
    "classify_samples",
    "classify_tol",
    "euler_points",
    "refine_levels",
    "order_target",
    "order_tol",
    "diagnostics",
    "euler_bridge",
];

fn invalid(msg: String) -> Error {
    Error::InvalidConfig(msg)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| invalid(format!("key `{key}`: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(invalid(format!("key `{key}`: expected a boolean, got {value:?}"))),
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(invalid(format!("unknown key `{key}` at line {}", lineno + 1)));
            }
            if pairs.iter().any(|(k, _)| k == key) {
                return Err(invalid(format!("duplicate key `{key}` at line {}", lineno + 1)));
            }
            pairs.push((key.to_string(), value.trim().to_string()));
        }
        let get = |k: &str| pairs.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());

        let mut c = RunConfig::default();
        macro_rules! set {
            ($field:ident) => {
                if let Some(v) = get(stringify!($field)) {
                    c.$field = parse_value(stringify!($field), v)?;
                }
            };
        }
        set!(gamma);
        set!(xi_min);
        set!(xi_max);
        set!(n);
        set!(cfl);
        set!(t_end);
        set!(snapshot_stride);
        set!(eps_v);
        set!(eps_den);
        set!(seed);
        set!(el_samples);
        set!(el_tol);
        set!(noether_samples);
        set!(noether_tol);
        set!(noether_floor);
        set!(noether_fraction);
        set!(classify_samples);
        set!(classify_tol);
        set!(refine_levels);
        set!(order_target);
        set!(order_tol);
        if let Some(v) = get("dt_max") {
            c.dt_max = Some(parse_value("dt_max", v)?);
        }
        if let Some(v) = get("euler_points") {
            c.euler_points = Some(parse_value("euler_points", v)?);
        }
        if let Some(v) = get("diagnostics") {
            c.diagnostics = parse_bool("diagnostics", v)?;
        }
        if let Some(v) = get("euler_bridge") {
            c.euler_bridge = parse_bool("euler_bridge", v)?;
        }
        if let Some(v) = get("base_stretch") {
            c.base_stretch = match v {
                "uniform" => BaseStretch::Uniform,
                "hydrostatic" => BaseStretch::Hydrostatic,
                _ => {
                    return Err(invalid(format!(
                        "key `base_stretch`: expected uniform or hydrostatic, got {v:?}"
                    )))
                }
            };
        }
        if let Some(v) = get("boundary") {
            c.boundary = match v {
                "periodic" => Boundary::Periodic,
                "wall" => Boundary::Wall,
                _ => return Err(invalid(format!("key `boundary`: expected periodic or wall, got {v:?}"))),
            };
        }

        let s0 = get("entropy_s0").map(|v| parse_value("entropy_s0", v)).transpose()?;
        let q = get("entropy_q").map(|v| parse_value("entropy_q", v)).transpose()?;
        let coeffs = get("entropy_coeffs")
            .map(|v| {
                v.split(',')
                    .map(|s| parse_value::<f64>("entropy_coeffs", s.trim()))
                    .collect::<Result<Vec<f64>>>()
            })
            .transpose()?;
        c.entropy = match get("entropy").unwrap_or("constant") {
            "constant" => EntropySpec::Constant { s0: s0.unwrap_or(1.0) },
            "exponential" => EntropySpec::Exponential { q: q.unwrap_or(1.0) },
            "power" => EntropySpec::Power { q: q.unwrap_or(1.0) },
            "polynomial" => EntropySpec::Polynomial {
                coeffs: coeffs
                    .ok_or_else(|| invalid("key `entropy_coeffs` is required for polynomial entropy".into()))?,
            },
            other => return Err(invalid(format!("key `entropy`: unknown family {other:?}"))),
        };

        let amplitude: Option<f64> = get("ic_amplitude")
            .map(|v| parse_value("ic_amplitude", v))
            .transpose()?;
        let k: f64 = get("ic_k").map(|v| parse_value("ic_k", v)).transpose()?.unwrap_or(1.0);
        let sigma: f64 = get("ic_sigma")
            .map(|v| parse_value("ic_sigma", v))
            .transpose()?
            .unwrap_or(0.1);
        let xi0: f64 = get("ic_xi0")
            .map(|v| parse_value("ic_xi0", v))
            .transpose()?
            .unwrap_or(0.5 * (c.xi_min + c.xi_max));
        c.ic = match get("ic").unwrap_or("sine-velocity") {
            "rest" => InitialCondition::Rest,
            "sine-displacement" => InitialCondition::SineDisplacement {
                a: amplitude.unwrap_or(0.01),
                k,
            },
            "sine-velocity" => InitialCondition::SineVelocity {
                b: amplitude.unwrap_or(0.1),
                k,
            },
            "gaussian-velocity" => InitialCondition::GaussianVelocity {
                b: amplitude.unwrap_or(0.1),
                sigma,
                xi0,
            },
            other => return Err(invalid(format!("key `ic`: unknown preset {other:?}"))),
        };
        c.validate()?;
        Ok(c)
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        GasParams::new(self.gamma).map_err(|e| invalid(format!("key `gamma`: {e}")))?;
        self.grid()?;
        self.profile()?;
        let positive = [
            ("noether_tol", self.noether_tol),
            ("noether_floor", self.noether_floor),
            ("classify_tol", self.classify_tol),
            ("order_tol", self.order_tol),
        ];
        for (key, v) in positive {
            if !(v > 0.0) {
                return Err(invalid(format!("key `{key}` must be > 0, got {v}")));
            }
        }
        // A zero tolerance is accepted so that the EL check can be made to fail deliberately.
        if !(self.el_tol >= 0.0) {
            return Err(invalid(format!("key `el_tol` must be >= 0, got {}", self.el_tol)));
        }
        if !(self.noether_fraction > 0.0 && self.noether_fraction <= 1.0) {
            return Err(invalid(format!(
                "key `noether_fraction` must lie in (0, 1], got {}",
                self.noether_fraction
            )));
        }
        for (key, v) in [
            ("el_samples", self.el_samples),
            ("noether_samples", self.noether_samples),
        ] {
            if v == 0 {
                return Err(invalid(format!("key `{key}` must be >= 1")));
            }
        }
        if self.refine_levels < 2 {
            return Err(invalid("key `refine_levels` must be >= 2".into()));
        }
        if let Some(p) = self.euler_points {
            if p < 3 {
                return Err(invalid(format!("key `euler_points` must be >= 3, got {p}")));
            }
        }
        self.solver_config().and_then(|s| s.validate())
    }

    pub fn gas(&self) -> Result<GasParams> {
        GasParams::new(self.gamma).map_err(|e| invalid(format!("key `gamma`: {e}")))
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.xi_min, self.xi_max, self.n, self.boundary).map_err(|e| invalid(e.to_string()))
    }

    pub fn profile(&self) -> Result<EntropyProfile> {
        let p = match &self.entropy {
            EntropySpec::Constant { s0 } => EntropyProfile::constant(*s0),
            EntropySpec::Exponential { q } => EntropyProfile::exponential(*q),
            EntropySpec::Power { q } => EntropyProfile::power(*q),
            EntropySpec::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return Err(invalid("key `entropy_coeffs` is empty".into()));
                }
                Ok(EntropyProfile::polynomial(coeffs.clone(), (self.xi_min, self.xi_max)))
            }
        };
        p.map_err(|e| invalid(e.to_string()))
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let mut s = SolverConfig::new(self.gas()?, self.profile()?, self.grid()?);
        s.cfl = self.cfl;
        s.t_end = self.t_end;
        s.snapshot_stride = self.snapshot_stride;
        s.eps_v = self.eps_v;
        s.eps_den = self.eps_den;
        s.dt_max = self.dt_max;
        s.base_stretch = self.base_stretch;
        Ok(s)
    }

    /// Same configuration on a grid with `factor` times as many cells.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            n: self.n * factor,
            euler_points: self.euler_points.map(|p| (p - 1) * factor + 1),
            ..self.clone()
        }
    }

    pub fn euler_points(&self) -> usize {
        self.euler_points.unwrap_or(self.n + 1)
    }

    /// Short digest of the full configuration, recorded in every report.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("configuration serializes");
        short_hash(json.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c, RunConfig::default());
        let c = RunConfig::parse(
            "# comment\ngamma = 1.5\nentropy = power\nentropy_q = -1 # trailing\nxi_min = 1\nxi_max = 2\nboundary = wall\nic = rest\n",
        )
        .unwrap();
        assert_eq!(c.gamma, 1.5);
        assert_eq!(c.entropy, EntropySpec::Power { q: -1.0 });
        assert_eq!(c.boundary, Boundary::Wall);
        assert_eq!(c.ic, InitialCondition::Rest);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::parse("gamma = 1.4\nbogus_key = 3\n").unwrap_err();
        assert!(err.to_string().contains("bogus_key"), "{err}");
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert!(RunConfig::parse("gamma = 1").is_err());
        assert!(RunConfig::parse("cfl = 1.5").is_err());
        assert!(RunConfig::parse("entropy = power\nentropy_q = 2\nxi_min = 0").is_err());
        assert!(RunConfig::parse("n = abc").is_err());
        assert!(RunConfig::parse("gamma").is_err());
        assert!(RunConfig::parse("entropy = polynomial").is_err());
        assert!(RunConfig::parse("el_tol = 0").is_ok());
        assert!(RunConfig::parse("noether_tol = 0").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let b = RunConfig { seed: 1, ..a.clone() };
        assert_eq!(a.hash(), RunConfig::default().hash());
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }
}
