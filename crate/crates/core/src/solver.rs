//! Method-of-lines integration of the equation of motion in mass coordinates.
//!
//! The unknown is the displacement `u = phi - xi` together with the velocity
//! `w = phi_t`, so periodic boundaries are well posed. Spatial derivatives are
//! centered second order; time stepping is classical RK4 with a step chosen
//! from the characteristic speeds of the quasilinear equation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::entropy::EntropyProfile;
use crate::error::{Error, Result};
use crate::gas::GasParams;
use crate::lagrangian::{accel_guarded, quasilinear, DEFAULT_DENOMINATOR_GUARD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    /// Reflecting walls: the end nodes are fixed (`w = 0`).
    Wall,
}

/// Uniform grid in the mass coordinate.
///
/// Periodic grids carry `n` nodes `xi_min + j dxi`, `j < n`; wall grids carry
/// `n + 1` nodes including both walls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub xi_min: f64,
    pub xi_max: f64,
    pub n: usize,
    pub boundary: Boundary,
}

impl Grid {
    pub fn new(xi_min: f64, xi_max: f64, n: usize, boundary: Boundary) -> Result<Self> {
        if !(xi_max > xi_min) || !xi_min.is_finite() || !xi_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need xi_max > xi_min, got [{xi_min}, {xi_max}]"
            )));
        }
        if n < 8 {
            return Err(Error::InvalidGrid(format!("need at least 8 cells, got {n}")));
        }
        Ok(Self {
            xi_min,
            xi_max,
            n,
            boundary,
        })
    }

    #[inline]
    pub fn dxi(&self) -> f64 {
        (self.xi_max - self.xi_min) / self.n as f64
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.xi_max - self.xi_min
    }

    /// Number of stored nodes.
    #[inline]
    pub fn len(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.n,
            Boundary::Wall => self.n + 1,
        }
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn xi(&self, j: usize) -> f64 {
        self.xi_min + j as f64 * self.dxi()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.xi(j)).collect()
    }

    /// Nodes at which the evolution equation is applied.
    pub fn interior(&self) -> std::ops::Range<usize> {
        match self.boundary {
            Boundary::Periodic => 0..self.n,
            Boundary::Wall => 1..self.n,
        }
    }
}

/// Grid state at one instant: `phi = xi + u`, `phi_t = w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub t: f64,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

impl SimState {
    pub fn phi(&self, grid: &Grid) -> Vec<f64> {
        self.u.iter().enumerate().map(|(j, u)| grid.xi(j) + u).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialCondition {
    Rest,
    /// `u = a sin(2 pi k s)`, `s = (xi - xi_min) / L`.
    SineDisplacement {
        a: f64,
        k: f64,
    },
    /// `w = b sin(2 pi k s)`.
    SineVelocity {
        b: f64,
        k: f64,
    },
    /// `w = b exp(-(xi - xi0)^2 / (2 sigma^2))`.
    GaussianVelocity {
        b: f64,
        sigma: f64,
        xi0: f64,
    },
}

impl InitialCondition {
    pub fn state(&self, grid: &Grid) -> SimState {
        let len = grid.len();
        let mut u = vec![0.0; len];
        let mut w = vec![0.0; len];
        let two_pi = 2.0 * std::f64::consts::PI;
        for j in 0..len {
            let xi = grid.xi(j);
            let s = (xi - grid.xi_min) / grid.length();
            match *self {
                Self::Rest => {}
                Self::SineDisplacement { a, k } => u[j] = a * (two_pi * k * s).sin(),
                Self::SineVelocity { b, k } => w[j] = b * (two_pi * k * s).sin(),
                Self::GaussianVelocity { b, sigma, xi0 } => {
                    w[j] = b * (-(xi - xi0).powi(2) / (2.0 * sigma * sigma)).exp()
                }
            }
        }
        if grid.boundary == Boundary::Wall {
            for j in [0, len - 1] {
                u[j] = 0.0;
                w[j] = 0.0;
            }
        }
        SimState { t: 0.0, u, w }
    }
}

/// Stretch `phi_xi` underneath the initial-condition preset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseStretch {
    /// `phi = xi`
    #[default]
    Uniform,
    /// `phi_xi = c S0^(1/gamma)`, the rest state with uniform pressure; `c`
    /// keeps both ends of the domain in place.
    Hydrostatic,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Displacement `u = phi - xi` of the hydrostatic base at every stored node.
pub fn hydrostatic_displacement(grid: &Grid, profile: &EntropyProfile, gamma: f64) -> Vec<f64> {
    let h = grid.dxi();
    let cell = |j: usize| {
        let mid = grid.xi_min + (j as f64 + 0.5) * h;
        GAUSS5
            .iter()
            .map(|(x, w)| 0.5 * h * w * profile.value(mid + 0.5 * h * x).powf(1.0 / gamma))
            .sum::<f64>()
    };
    let parts: Vec<f64> = (0..grid.n).map(cell).collect();
    let c = grid.length() / parts.iter().sum::<f64>();
    let mut u = vec![0.0; grid.len()];
    let mut acc = 0.0;
    for j in 1..grid.len() {
        acc += c * parts[j - 1];
        u[j] = acc - (grid.xi(j) - grid.xi_min);
    }
    if grid.boundary == Boundary::Wall {
        u[grid.n] = 0.0;
    }
    u
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub gas: GasParams,
    pub profile: EntropyProfile,
    pub grid: Grid,
    pub cfl: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    /// Velocities within this margin of 1 are rejected.
    pub eps_v: f64,
    pub eps_den: f64,
    /// Step used when every characteristic speed vanishes (dust); defaults to `0.25 dxi`.
    pub dt_max: Option<f64>,
    pub base_stretch: BaseStretch,
}

impl SolverConfig {
    pub fn new(gas: GasParams, profile: EntropyProfile, grid: Grid) -> Self {
        Self {
            gas,
            profile,
            grid,
            cfl: 0.4,
            t_end: 1.0,
            snapshot_stride: 1,
            eps_v: 1e-6,
            eps_den: DEFAULT_DENOMINATOR_GUARD,
            dt_max: None,
            base_stretch: BaseStretch::Uniform,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gas.gamma()
    }

    pub fn dt_max(&self) -> f64 {
        self.dt_max.unwrap_or(0.25 * self.grid.dxi())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidConfig(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidConfig("snapshot_stride must be >= 1".into()));
        }
        if !(self.eps_v > 0.0 && self.eps_v < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "eps_v must lie in (0, 1), got {}",
                self.eps_v
            )));
        }
        if !(self.eps_den > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "eps_den must be > 0, got {}",
                self.eps_den
            )));
        }
        if let Some(d) = self.dt_max {
            if !(d > 0.0) {
                return Err(Error::InvalidConfig(format!("dt_max must be > 0, got {d}")));
            }
        }
        self.profile
            .validate_on(self.grid.xi_min, self.grid.xi_max)
            .map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// Short hex digest of every numeric setting, recorded in run metadata.
    pub fn fingerprint(&self) -> String {
        let g = &self.grid;
        let text = format!(
            "gamma={};profile={:?};xi=[{},{}];n={};bc={:?};cfl={};t_end={};stride={};eps_v={};eps_den={};dt_max={};base={:?}",
            self.gamma(),
            self.profile,
            g.xi_min,
            g.xi_max,
            g.n,
            g.boundary,
            self.cfl,
            self.t_end,
            self.snapshot_stride,
            self.eps_v,
            self.eps_den,
            self.dt_max(),
            self.base_stretch,
        );
        short_hash(text.as_bytes())
    }
}

pub(crate) fn short_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Spatial derivatives at every stored node.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialDerivs {
    pub phi_xi: Vec<f64>,
    pub phi_xixi: Vec<f64>,
    pub phi_txi: Vec<f64>,
}

/// Centered first and second differences of `f`, periodic or with one-sided
/// second-order stencils at the end nodes.
pub(crate) fn differences(f: &[f64], h: f64, boundary: Boundary) -> (Vec<f64>, Vec<f64>) {
    let n = f.len();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    let h2 = h * h;
    for j in 1..n - 1 {
        d1[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
        d2[j] = (f[j + 1] - 2.0 * f[j] + f[j - 1]) / h2;
    }
    match boundary {
        Boundary::Periodic => {
            d1[0] = (f[1] - f[n - 1]) / (2.0 * h);
            d2[0] = (f[1] - 2.0 * f[0] + f[n - 1]) / h2;
            d1[n - 1] = (f[0] - f[n - 2]) / (2.0 * h);
            d2[n - 1] = (f[0] - 2.0 * f[n - 1] + f[n - 2]) / h2;
        }
        Boundary::Wall => {
            d1[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
            d2[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
            let m = n - 1;
            d1[m] = (3.0 * f[m] - 4.0 * f[m - 1] + f[m - 2]) / (2.0 * h);
            d2[m] = (2.0 * f[m] - 5.0 * f[m - 1] + 4.0 * f[m - 2] - f[m - 3]) / h2;
        }
    }
    (d1, d2)
}

pub fn spatial_derivs(state: &SimState, grid: &Grid) -> Result<SpatialDerivs> {
    let h = grid.dxi();
    let (du, phi_xixi) = differences(&state.u, h, grid.boundary);
    let (phi_txi, _) = differences(&state.w, h, grid.boundary);
    let phi_xi: Vec<f64> = du.iter().map(|d| 1.0 + d).collect();
    if let Some((j, q)) = phi_xi.iter().enumerate().find(|(_, q)| !(**q > 0.0)) {
        return Err(Error::NonPositiveStretch(*q).at_node(j, state.t));
    }
    Ok(SpatialDerivs {
        phi_xi,
        phi_xixi,
        phi_txi,
    })
}

fn first_error(results: Vec<Result<f64>>) -> Result<Vec<f64>> {
    results.into_iter().collect()
}

/// Semi-discrete right-hand side `(du/dt, dw/dt)`.
pub fn rhs(state: &SimState, config: &SolverConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let grid = &config.grid;
    let gamma = config.gamma();
    let limit = 1.0 - config.eps_v;
    if let Some((j, w)) = state.w.iter().enumerate().find(|(_, w)| !(w.abs() < limit)) {
        return Err(Error::SuperluminalState(w.abs()).at_node(j, state.t));
    }
    let d = spatial_derivs(state, grid)?;
    let interior = grid.interior();
    let accel: Vec<Result<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            if !interior.contains(&j) {
                return Ok(0.0);
            }
            let (s0, s0p) = config.profile.value_and_slope(grid.xi(j));
            accel_guarded(
                state.w[j],
                d.phi_xi[j],
                d.phi_txi[j],
                d.phi_xixi[j],
                s0,
                s0p,
                gamma,
                config.eps_den,
            )
            .map_err(|e| e.at_node(j, state.t))
        })
        .collect();
    let dw = first_error(accel)?;
    let mut du = state.w.clone();
    if grid.boundary == Boundary::Wall {
        let m = du.len() - 1;
        du[0] = 0.0;
        du[m] = 0.0;
    }
    Ok((du, dw))
}

/// Characteristic speeds `lambda` solving `A lambda^2 - B lambda + C = 0` at a node.
pub fn characteristic_speeds(phi_t: f64, phi_xi: f64, s0: f64, gamma: f64) -> Result<(f64, f64, f64)> {
    let c = quasilinear(phi_t, phi_xi, s0, gamma)?;
    let disc = c.txi * c.txi - 4.0 * c.tt * c.xixi;
    let root = disc.max(0.0).sqrt();
    let lp = (c.txi + root) / (2.0 * c.tt);
    let lm = (c.txi - root) / (2.0 * c.tt);
    Ok((lp, lm, disc))
}

pub fn max_speed(state: &SimState, config: &SolverConfig) -> Result<f64> {
    let grid = &config.grid;
    let gamma = config.gamma();
    let d = spatial_derivs(state, grid)?;
    let speeds: Vec<Result<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let s0 = config.profile.value(grid.xi(j));
            let (lp, lm, disc) =
                characteristic_speeds(state.w[j], d.phi_xi[j], s0, gamma).map_err(|e| e.at_node(j, state.t))?;
            // B^2 - 4AC = 0 only in the pressureless limit, where both speeds vanish.
            if disc < 0.0 || (disc == 0.0 && s0 > 0.0) {
                return Err(Error::LossOfHyperbolicity {
                    node: j,
                    discriminant: disc,
                });
            }
            Ok(lp.abs().max(lm.abs()))
        })
        .collect();
    Ok(first_error(speeds)?.into_iter().fold(0.0, f64::max))
}

/// `cfl dxi / max |lambda|`, or `dt_max` when all speeds vanish.
pub fn stable_dt(state: &SimState, config: &SolverConfig) -> Result<f64> {
    let lambda = max_speed(state, config)?;
    if lambda <= f64::EPSILON {
        return Ok(config.dt_max());
    }
    Ok(config.cfl * config.grid.dxi() / lambda)
}

fn axpy(y: &[f64], a: f64, x: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(y, x)| y + a * x).collect()
}

fn check_state(state: &SimState, config: &SolverConfig) -> Result<()> {
    let limit = 1.0 - config.eps_v;
    for (j, (u, w)) in state.u.iter().zip(&state.w).enumerate() {
        if !u.is_finite() || !w.is_finite() {
            return Err(Error::NonFinite(j).at_node(j, state.t));
        }
        if !(w.abs() < limit) {
            return Err(Error::SuperluminalState(w.abs()).at_node(j, state.t));
        }
    }
    spatial_derivs(state, &config.grid).map(|_| ())
}

/// One classical RK4 step; the new state is revalidated before it is returned.
pub fn step_rk4(state: &SimState, dt: f64, config: &SolverConfig) -> Result<SimState> {
    let stage = |u: Vec<f64>, w: Vec<f64>, t: f64| SimState { t, u, w };
    let (k1u, k1w) = rhs(state, config)?;
    let s2 = stage(
        axpy(&state.u, 0.5 * dt, &k1u),
        axpy(&state.w, 0.5 * dt, &k1w),
        state.t + 0.5 * dt,
    );
    let (k2u, k2w) = rhs(&s2, config)?;
    let s3 = stage(
        axpy(&state.u, 0.5 * dt, &k2u),
        axpy(&state.w, 0.5 * dt, &k2w),
        state.t + 0.5 * dt,
    );
    let (k3u, k3w) = rhs(&s3, config)?;
    let s4 = stage(axpy(&state.u, dt, &k3u), axpy(&state.w, dt, &k3w), state.t + dt);
    let (k4u, k4w) = rhs(&s4, config)?;
    let combine = |y: &[f64], k1: &[f64], k2: &[f64], k3: &[f64], k4: &[f64]| -> Vec<f64> {
        (0..y.len())
            .map(|j| y[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
            .collect()
    };
    let next = SimState {
        t: state.t + dt,
        u: combine(&state.u, &k1u, &k2u, &k3u, &k4u),
        w: combine(&state.w, &k1w, &k2w, &k3w, &k4w),
    };
    check_state(&next, config)?;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub config_hash: String,
    pub dt: f64,
    pub steps: usize,
    pub guard_events: Vec<String>,
}

/// Snapshots at a uniform time spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub grid: Grid,
    pub snapshots: Vec<SimState>,
    /// Time between consecutive snapshots.
    pub snapshot_dt: f64,
    pub meta: RunMeta,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &SimState {
        self.snapshots.last().expect("trajectory holds the initial state")
    }
}

/// Result of [`run`]: the trajectory up to the last accepted step, and the
/// error that stopped it early, if any.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub failure: Option<Error>,
}

impl RunOutcome {
    pub fn into_result(self) -> Result<Trajectory> {
        match self.failure {
            None => Ok(self.trajectory),
            Some(e) => Err(e),
        }
    }
}

/// Integrates from `ic` to `config.t_end` with a fixed step chosen from the
/// initial characteristic speeds, rounded so that the snapshots fall on a
/// uniform time grid ending exactly at `t_end`.
pub fn run(config: &SolverConfig, ic: &InitialCondition) -> Result<RunOutcome> {
    config.validate()?;
    run_from(config, initial_state(config, ic))
}

/// The preset `ic` laid over the configured base stretch.
pub fn initial_state(config: &SolverConfig, ic: &InitialCondition) -> SimState {
    let mut state = ic.state(&config.grid);
    if config.base_stretch == BaseStretch::Hydrostatic {
        let base = hydrostatic_displacement(&config.grid, &config.profile, config.gamma());
        for (u, b) in state.u.iter_mut().zip(base) {
            *u += b;
        }
    }
    state
}

pub fn run_from(config: &SolverConfig, initial: SimState) -> Result<RunOutcome> {
    config.validate()?;
    if initial.u.len() != config.grid.len() || initial.w.len() != config.grid.len() {
        return Err(Error::InvalidConfig(format!(
            "initial state has {} nodes, grid has {}",
            initial.u.len(),
            config.grid.len()
        )));
    }
    check_state(&initial, config).map_err(|e| Error::InvalidConfig(format!("initial condition: {e}")))?;
    let dt0 = stable_dt(&initial, config)?;
    let stride = config.snapshot_stride;
    let steps = if config.t_end == 0.0 {
        0
    } else {
        let raw = (config.t_end / dt0).ceil() as usize;
        raw.div_ceil(stride).max(1) * stride
    };
    let dt = if steps == 0 { 0.0 } else { config.t_end / steps as f64 };

    let mut meta = RunMeta {
        config_hash: config.fingerprint(),
        dt,
        steps: 0,
        guard_events: Vec::new(),
    };
    let mut snapshots = vec![initial.clone()];
    let mut state = initial;
    let mut failure = None;
    let mut warned_cfl = false;
    for step in 1..=steps {
        if !warned_cfl {
            if let Ok(lambda) = max_speed(&state, config) {
                if lambda * dt > config.grid.dxi() {
                    meta.guard_events.push(format!(
                        "step {step}: Courant number {:.3} exceeds 1 at t = {}",
                        lambda * dt / config.grid.dxi(),
                        state.t
                    ));
                    warned_cfl = true;
                }
            }
        }
        match step_rk4(&state, dt, config) {
            Ok(mut next) => {
                next.t = step as f64 * dt;
                state = next;
                meta.steps = step;
                if step % stride == 0 {
                    snapshots.push(state.clone());
                }
            }
            Err(e) => {
                meta.guard_events.push(format!("step {step} rejected: {e}"));
                failure = Some(e);
                break;
            }
        }
    }
    Ok(RunOutcome {
        trajectory: Trajectory {
            grid: config.grid,
            snapshots,
            snapshot_dt: dt * stride as f64,
            meta,
        },
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(profile: EntropyProfile, gamma: f64, grid: Grid) -> SolverConfig {
        SolverConfig::new(GasParams::new(gamma).unwrap(), profile, grid)
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 1.0, 7, Boundary::Periodic).is_err());
        assert!(Grid::new(1.0, 1.0, 16, Boundary::Periodic).is_err());
        let g = Grid::new(0.0, 1.0, 16, Boundary::Wall).unwrap();
        assert_eq!(g.len(), 17);
        assert_eq!(g.xi(16), 1.0);
    }

    #[test]
    fn identity_map_derivatives() {
        let grid = Grid::new(0.0, 1.0, 32, Boundary::Wall).unwrap();
        let state = InitialCondition::Rest.state(&grid);
        let d = spatial_derivs(&state, &grid).unwrap();
        assert!(d.phi_xi.iter().all(|q| *q == 1.0));
        assert!(d.phi_xixi.iter().all(|q| *q == 0.0));
        let uniform = SimState {
            t: 0.0,
            u: vec![0.0; 33],
            w: vec![0.3; 33],
        };
        let d = spatial_derivs(&uniform, &grid).unwrap();
        assert!(d.phi_txi.iter().all(|q| q.abs() < 1e-12));
    }

    fn derivative_error(n: usize, boundary: Boundary) -> (f64, f64) {
        let grid = Grid::new(0.0, 1.0, n, boundary).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        let a = 0.05;
        let u: Vec<f64> = grid.nodes().iter().map(|x| a * (two_pi * x).sin()).collect();
        let state = SimState {
            t: 0.0,
            w: vec![0.0; u.len()],
            u,
        };
        let d = spatial_derivs(&state, &grid).unwrap();
        let mut e1 = 0.0f64;
        let mut e2 = 0.0f64;
        for (j, x) in grid.nodes().iter().enumerate() {
            e1 = e1.max((d.phi_xi[j] - (1.0 + a * two_pi * (two_pi * x).cos())).abs());
            e2 = e2.max((d.phi_xixi[j] + a * two_pi * two_pi * (two_pi * x).sin()).abs());
        }
        (e1, e2)
    }

    #[test]
    fn derivative_stencils_are_second_order() {
        for bc in [Boundary::Periodic, Boundary::Wall] {
            let (a1, a2) = derivative_error(128, bc);
            let (b1, b2) = derivative_error(256, bc);
            let r1 = (a1 / b1).log2();
            let r2 = (a2 / b2).log2();
            assert!((r1 - 2.0).abs() < 0.2, "{bc:?} first {r1}");
            assert!((r2 - 2.0).abs() < 0.2, "{bc:?} second {r2}");
        }
    }

    #[test]
    fn rest_state_is_equilibrium_for_constant_entropy() {
        let grid = Grid::new(0.0, 1.0, 32, Boundary::Periodic).unwrap();
        let cfg = config(EntropyProfile::Constant(1.0), 5.0 / 3.0, grid);
        let state = InitialCondition::Rest.state(&grid);
        let (du, dw) = rhs(&state, &cfg).unwrap();
        assert!(du.iter().chain(&dw).all(|v| *v == 0.0));
    }

    #[test]
    fn hydrostatic_base_is_a_discrete_equilibrium_to_second_order() {
        let worst = |n: usize| {
            let grid = Grid::new(1.0, 2.0, n, Boundary::Wall).unwrap();
            let mut cfg = config(EntropyProfile::Exponential(1.0), 1.5, grid);
            cfg.base_stretch = BaseStretch::Hydrostatic;
            let state = initial_state(&cfg, &InitialCondition::Rest);
            assert_eq!(state.u[0], 0.0);
            assert_eq!(state.u[n], 0.0);
            let (_, dw) = rhs(&state, &cfg).unwrap();
            dw.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        };
        let (a, b) = (worst(64), worst(128));
        assert!(a < 1e-3, "{a}");
        assert!((a / b).log2() > 1.9, "{a} {b}");
    }

    #[test]
    fn entropy_gradient_pushes_toward_low_entropy() {
        let grid = Grid::new(0.0, 1.0, 32, Boundary::Wall).unwrap();
        let cfg = config(EntropyProfile::Exponential(1.0), 1.4, grid);
        let state = InitialCondition::Rest.state(&grid);
        let (_, dw) = rhs(&state, &cfg).unwrap();
        for j in grid.interior() {
            let (s0, s0p) = cfg.profile.value_and_slope(grid.xi(j));
            let c = quasilinear(0.0, 1.0, s0, 1.4).unwrap();
            let expected = -c.entropy_slope * s0p / c.tt;
            assert!(dw[j] < 0.0);
            assert!((dw[j] - expected).abs() < 1e-14 * expected.abs());
        }
    }

    #[test]
    fn superluminal_guard() {
        let grid = Grid::new(0.0, 1.0, 16, Boundary::Periodic).unwrap();
        let cfg = config(EntropyProfile::Constant(1.0), 1.4, grid);
        let mut state = InitialCondition::Rest.state(&grid);
        state.w[5] = 1.0 - 1e-7;
        let err = rhs(&state, &cfg).unwrap_err();
        assert!(matches!(err, Error::AtNode { node: 5, .. }));
        assert!(matches!(err.root(), Error::SuperluminalState(_)));
    }

    #[test]
    fn stable_dt_examples() {
        let grid = Grid::new(0.0, 1.0, 100, Boundary::Periodic).unwrap();
        let state = InitialCondition::Rest.state(&grid);
        let cfg = config(EntropyProfile::Constant(1.0), 2.0, grid);
        let dt = stable_dt(&state, &cfg).unwrap();
        let expected = 0.4 * 0.01 / (2.0f64 / 3.0).sqrt();
        assert!((dt - expected).abs() < 1e-15);

        let mut dust = config(EntropyProfile::Constant(1.0), 2.0, grid);
        dust.profile = EntropyProfile::Custom(crate::entropy::CustomProfile::new("dust", (-1.0, 2.0), |_| [0.0; 4]));
        assert_eq!(stable_dt(&state, &dust).unwrap(), 0.25 * 0.01);
    }

    #[test]
    fn hyperbolic_on_admissible_jets() {
        let mut sampler = crate::jet::JetSampler::new(4, crate::jet::JetRanges::default());
        for _ in 0..5000 {
            let j = sampler.jet1();
            let gamma = sampler.uniform(1.01, 2.0);
            let s0 = sampler.uniform(1e-3, 5.0);
            let (_, _, disc) = characteristic_speeds(j.phi_t, j.phi_xi, s0, gamma).unwrap();
            assert!(disc > 0.0);
        }
    }

    #[test]
    fn power_profile_rejects_domain_through_zero() {
        let grid = Grid::new(0.0, 1.0, 16, Boundary::Wall).unwrap();
        let cfg = config(EntropyProfile::Power(-1.0), 1.5, grid);
        assert!(matches!(
            run(&cfg, &InitialCondition::Rest),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn rest_run_is_stationary() {
        let grid = Grid::new(0.0, 1.0, 32, Boundary::Periodic).unwrap();
        let mut cfg = config(EntropyProfile::Constant(1.0), 5.0 / 3.0, grid);
        cfg.t_end = 0.5;
        let out = run(&cfg, &InitialCondition::Rest).unwrap();
        assert!(out.failure.is_none());
        let first = &out.trajectory.snapshots[0];
        for s in &out.trajectory.snapshots {
            assert_eq!(s.u, first.u);
            assert_eq!(s.w, first.w);
        }
        assert!((out.trajectory.last().t - 0.5).abs() < 1e-15);
    }
}
