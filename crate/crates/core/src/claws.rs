//! Conservation laws in mass coordinates and their discrete diagnostics.
//!
//! Every density pair satisfies `D_t T^t + D_xi T^xi = 0` on solutions. With
//! `P = phi_t`, `Q = phi_xi`, `Gamma = sqrt(1 - P^2)`:
//!
//! ```text
//! T1 = (P G / Gamma,                       S0 Gamma^g Q^-g)
//! T2 = (G / Gamma - S0 Gamma^g Q^(1-g),    S0 Gamma^g P Q^-g)
//! T3 = (phi T2^t - t T1^t,                 S0 Gamma^g (phi P - t) Q^-g)
//! T5 = (P Q G / Gamma,                     Gamma G)                         S0 constant
//! T4 = (t (S0 Gamma^g Q^(1-g) - G / Gamma) + (phi + xi Q) P G / Gamma,
//!       xi Gamma G + S0 Gamma^g Q^-g (phi - t P))                          S0 = xi^(2(1-g))
//! ```
//!
//! The boost density `T3^t` is written as `phi T2^t - t T1^t`; the expanded
//! form `phi Gamma^-1 (1 - S0 Q^(1-g) Gamma^(g-2)) - t P G` differs from it by
//! a term that is not a null divergence, see [`t3_time_density_expanded`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::EntropyProfile;
use crate::error::{Error, Result};
use crate::gas::gamma_factor;
use crate::jet::{validate_kinematics, Jet1};
use crate::lagrangian::g_factor;
use crate::solver::{spatial_derivs, Boundary, Grid, SimState, Trajectory};
use crate::symmetry::{family_of, AffineGenerator, Family, NoetherDensity};

/// Identifier of a built-in conservation law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LawId {
    /// Momentum, from translations of `phi`.
    T1,
    /// Energy, from time translations.
    T2,
    /// Centre-of-energy motion, from the boost.
    T3,
    /// Label translation, constant entropy only.
    T5,
    /// Dilation, `S0 = xi^(2(1-gamma))` only.
    T4,
}

impl LawId {
    pub const ALL: [LawId; 5] = [LawId::T1, LawId::T2, LawId::T3, LawId::T5, LawId::T4];

    pub fn name(&self) -> &'static str {
        match self {
            LawId::T1 => "T1",
            LawId::T2 => "T2",
            LawId::T3 => "T3",
            LawId::T5 => "T5",
            LawId::T4 => "T4",
        }
    }

    /// Whether the density depends explicitly on `t`.
    pub fn explicit_time(&self) -> bool {
        matches!(self, LawId::T3 | LawId::T4)
    }

    /// Whether `T^t` is periodic in `xi` when `phi - xi` is, so the charge is
    /// conserved on a periodic grid without a boundary term.
    pub fn periodic_charge(&self) -> bool {
        matches!(self, LawId::T1 | LawId::T2 | LawId::T5)
    }

    /// The variational symmetry whose current reproduces this law.
    pub fn generator(&self, gamma: f64) -> AffineGenerator {
        match self {
            LawId::T1 => AffineGenerator::x1(),
            LawId::T2 => AffineGenerator::x2(),
            LawId::T3 => AffineGenerator::x3(),
            LawId::T5 => AffineGenerator::x5(),
            LawId::T4 => AffineGenerator::x4b(2.0 * (1.0 - gamma), gamma),
        }
    }

    /// `c` such that this law's density equals `c` times the current of
    /// [`LawId::generator`] built with zero gauge terms.
    pub fn noether_factor(&self, gamma: f64) -> f64 {
        match self {
            LawId::T1 => -1.0,
            LawId::T2 | LawId::T3 | LawId::T5 => 1.0,
            LawId::T4 => 1.0 / (gamma - 1.0),
        }
    }
}

impl std::fmt::Display for LawId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for LawId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LawId::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown conservation law {s:?}")))
    }
}

/// Relative tolerance on `q = 2(1 - gamma)` for the dilation law.
pub const POWER_MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConservationLaw {
    pub id: LawId,
}

impl ConservationLaw {
    pub fn new(id: LawId) -> Self {
        Self { id }
    }

    pub fn name(&self) -> &'static str {
        self.id.name()
    }

    pub fn applies(&self, profile: &EntropyProfile, gamma: f64) -> bool {
        applies_to_family(self.id, family_of(profile, gamma), gamma)
    }

    /// `(T^t, T^xi)` at `jet`, with `S0` taken from `profile` at `jet.xi`.
    pub fn eval(&self, jet: &Jet1, profile: &EntropyProfile, gamma: f64) -> Result<(f64, f64)> {
        eval_density(self, jet, profile, gamma)
    }
}

fn applies_to_family(id: LawId, family: Family, gamma: f64) -> bool {
    match id {
        LawId::T1 | LawId::T2 | LawId::T3 => true,
        LawId::T5 => family == Family::Constant,
        LawId::T4 => match family {
            Family::Power { q } => {
                let target = 2.0 * (1.0 - gamma);
                (q - target).abs() <= POWER_MATCH_TOL * q.abs().max(1.0)
            }
            _ => false,
        },
    }
}

/// Laws that hold for `profile`, in the order T1, T2, T3, T5, T4.
pub fn builtin_laws(profile: &EntropyProfile, gamma: f64) -> Vec<ConservationLaw> {
    let family = family_of(profile, gamma);
    LawId::ALL
        .into_iter()
        .filter(|id| applies_to_family(*id, family, gamma))
        .map(ConservationLaw::new)
        .collect()
}

pub fn eval_density(law: &ConservationLaw, jet: &Jet1, profile: &EntropyProfile, gamma: f64) -> Result<(f64, f64)> {
    if !law.applies(profile, gamma) {
        return Err(Error::NotApplicable {
            law: law.name().to_string(),
        });
    }
    density(law.id, jet, profile.value(jet.xi), gamma)
}

/// Density pair without the applicability check.
pub fn density(id: LawId, jet: &Jet1, s0: f64, gamma: f64) -> Result<(f64, f64)> {
    let (p, q) = (jet.phi_t, jet.phi_xi);
    validate_kinematics(p, q)?;
    let l = gamma_factor(p)?;
    let g = g_factor(p, q, s0, gamma)?;
    let flux = s0 * l.powf(gamma) * q.powf(-gamma);
    let inertia = g / l;
    let momentum = p * inertia;
    let energy = inertia - flux * q;
    let (xi, t, phi) = (jet.xi, jet.t, jet.phi);
    Ok(match id {
        LawId::T1 => (momentum, flux),
        LawId::T2 => (energy, flux * p),
        LawId::T3 => (phi * energy - t * momentum, flux * (phi * p - t)),
        LawId::T5 => (p * q * inertia, l * g),
        LawId::T4 => (
            t * (flux * q - inertia) + (phi + xi * q) * momentum,
            xi * l * g + flux * (phi - t * p),
        ),
    })
}

/// `phi Gamma^-1 (1 - S0 Q^(1-g) Gamma^(g-2)) - t P G`. Kept for comparison
/// with [`density`]; it is not conserved.
pub fn t3_time_density_expanded(jet: &Jet1, s0: f64, gamma: f64) -> Result<f64> {
    let (p, q) = (jet.phi_t, jet.phi_xi);
    validate_kinematics(p, q)?;
    let l = gamma_factor(p)?;
    let g = g_factor(p, q, s0, gamma)?;
    Ok(jet.phi / l * (1.0 - s0 * q.powf(1.0 - gamma) * l.powf(gamma - 2.0)) - jet.t * p * g)
}

/// The current of `law`'s generator with the law's normalization applied, so
/// that it coincides with [`density`].
pub fn noether_current(id: LawId, jet: &Jet1, s0: f64, gamma: f64) -> Result<(f64, f64)> {
    let current = NoetherDensity {
        generator: id.generator(gamma),
        gamma,
        warning: None,
    };
    let c = id.noether_factor(gamma);
    let (tt, tx) = current.eval(jet, s0)?;
    Ok((c * tt, c * tx))
}

/// Jet at node `j` (possibly one period outside `0..n` on periodic grids,
/// where `xi` and `phi` are shifted by the period and `S0` is read at the
/// wrapped node).
fn node_jet(grid: &Grid, state: &SimState, phi_xi: &[f64], j: isize, profile: &EntropyProfile) -> (Jet1, f64) {
    let len = grid.len() as isize;
    let (idx, shift) = match grid.boundary {
        Boundary::Periodic => {
            let w = j.rem_euclid(len);
            (w as usize, ((j - w) / len) as f64 * grid.length())
        }
        Boundary::Wall => (j as usize, 0.0),
    };
    let xi = grid.xi(idx);
    let jet = Jet1 {
        xi: xi + shift,
        t: state.t,
        phi: xi + state.u[idx] + shift,
        phi_t: state.w[idx],
        phi_xi: phi_xi[idx],
    };
    (jet, profile.value(xi))
}

/// Densities at every stored node, plus the node one period to the right on
/// periodic grids.
struct SnapshotDensities {
    tt: Vec<f64>,
    tx: Vec<f64>,
    /// `T^xi` one node left of node 0 (periodic grids only).
    tx_left: f64,
}

fn snapshot_densities(
    id: LawId,
    state: &SimState,
    grid: &Grid,
    profile: &EntropyProfile,
    gamma: f64,
) -> Result<SnapshotDensities> {
    let d = spatial_derivs(state, grid)?;
    let extra = match grid.boundary {
        Boundary::Periodic => 1,
        Boundary::Wall => 0,
    };
    let count = grid.len() + extra;
    let mut tt = Vec::with_capacity(count);
    let mut tx = Vec::with_capacity(count);
    for j in 0..count {
        let (jet, s0) = node_jet(grid, state, &d.phi_xi, j as isize, profile);
        let (a, b) = density(id, &jet, s0, gamma).map_err(|e| e.at_node(j, state.t))?;
        tt.push(a);
        tx.push(b);
    }
    let tx_left = match grid.boundary {
        Boundary::Periodic => {
            let (jet, s0) = node_jet(grid, state, &d.phi_xi, -1, profile);
            density(id, &jet, s0, gamma)
                .map_err(|e| e.at_node(grid.len() - 1, state.t))?
                .1
        }
        Boundary::Wall => f64::NAN,
    };
    Ok(SnapshotDensities { tt, tx, tx_left })
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1].iter().sum();
    h * (inner + 0.5 * (values[0] + values[n - 1]))
}

/// `Q = int T^t dxi` by the trapezoid rule over one period or between the walls.
pub fn global_charge(
    law: &ConservationLaw,
    state: &SimState,
    grid: &Grid,
    profile: &EntropyProfile,
    gamma: f64,
) -> Result<f64> {
    let d = snapshot_densities(law.id, state, grid, profile, gamma)?;
    Ok(trapezoid(&d.tt, grid.dxi()))
}

fn check_snapshots(traj: &Trajectory) -> Result<f64> {
    let k = traj.snapshots.len();
    if k < 3 {
        return Err(Error::InsufficientSnapshots { needed: 3, got: k });
    }
    let dt = traj.snapshots[1].t - traj.snapshots[0].t;
    if !(dt > 0.0) {
        return Err(Error::NonUniformSnapshots);
    }
    for w in traj.snapshots.windows(2) {
        if ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt.max(w[1].t.abs()) {
            return Err(Error::NonUniformSnapshots);
        }
    }
    Ok(dt)
}

/// Centered time derivative with one-sided second-order stencils at both ends.
fn time_derivative(series: &[f64], dt: f64) -> Vec<f64> {
    let k = series.len();
    (0..k)
        .map(|i| {
            if i == 0 {
                (-3.0 * series[0] + 4.0 * series[1] - series[2]) / (2.0 * dt)
            } else if i == k - 1 {
                (3.0 * series[k - 1] - 4.0 * series[k - 2] + series[k - 3]) / (2.0 * dt)
            } else {
                (series[i + 1] - series[i - 1]) / (2.0 * dt)
            }
        })
        .collect()
}

fn all_densities(id: LawId, traj: &Trajectory, profile: &EntropyProfile, gamma: f64) -> Result<Vec<SnapshotDensities>> {
    traj.snapshots
        .par_iter()
        .map(|s| snapshot_densities(id, s, &traj.grid, profile, gamma))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Discrete `D_t T^t + D_xi T^xi` at interior nodes of every snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceField {
    pub times: Vec<f64>,
    /// Node indices of the columns of `values`.
    pub nodes: Vec<usize>,
    /// `values[k][i]` at snapshot `k`, node `nodes[i]`. The first and last
    /// rows use one-sided time differences.
    pub values: Vec<Vec<f64>>,
}

impl DivergenceField {
    /// `max |r|` per snapshot.
    pub fn max_per_snapshot(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|row| row.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .collect()
    }

    /// `max |r|` over interior snapshots.
    pub fn max_interior(&self) -> f64 {
        interior_max(&self.max_per_snapshot())
    }
}

/// Largest magnitude excluding the first and last entries.
pub fn interior_max(series: &[f64]) -> f64 {
    if series.len() < 3 {
        return 0.0;
    }
    series[1..series.len() - 1].iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

pub fn divergence_residual(
    law: &ConservationLaw,
    traj: &Trajectory,
    profile: &EntropyProfile,
    gamma: f64,
) -> Result<DivergenceField> {
    let dt = check_snapshots(traj)?;
    divergence_from(&all_densities(law.id, traj, profile, gamma)?, traj, dt)
}

fn divergence_from(dens: &[SnapshotDensities], traj: &Trajectory, dt: f64) -> Result<DivergenceField> {
    let grid = &traj.grid;
    let h = grid.dxi();
    let nodes: Vec<usize> = grid.interior().collect();
    let k = dens.len();
    let values = (0..k)
        .map(|i| {
            nodes
                .iter()
                .map(|&j| {
                    let col: Vec<f64> = [0usize, 1, 2]
                        .iter()
                        .map(|&o| {
                            let ki = match i {
                                0 => o,
                                _ if i == k - 1 => k - 3 + o,
                                _ => i - 1 + o,
                            };
                            dens[ki].tt[j]
                        })
                        .collect();
                    let d_t = if i == 0 {
                        (-3.0 * col[0] + 4.0 * col[1] - col[2]) / (2.0 * dt)
                    } else if i == k - 1 {
                        (3.0 * col[2] - 4.0 * col[1] + col[0]) / (2.0 * dt)
                    } else {
                        (col[2] - col[0]) / (2.0 * dt)
                    };
                    let tx = &dens[i].tx;
                    let right = tx[j + 1];
                    let left = if j == 0 { dens[i].tx_left } else { tx[j - 1] };
                    d_t + (right - left) / (2.0 * h)
                })
                .collect()
        })
        .collect();
    Ok(DivergenceField {
        times: traj.times(),
        nodes,
        values,
    })
}

/// `b(t) = dQ/dt + T^xi(right) - T^xi(left)` per snapshot; the first and last
/// entries use one-sided time differences.
pub fn balance_residual(
    law: &ConservationLaw,
    traj: &Trajectory,
    profile: &EntropyProfile,
    gamma: f64,
) -> Result<Vec<f64>> {
    let dt = check_snapshots(traj)?;
    let dens = all_densities(law.id, traj, profile, gamma)?;
    Ok(balance_from(&dens, traj.grid.dxi(), dt))
}

fn balance_from(dens: &[SnapshotDensities], h: f64, dt: f64) -> Vec<f64> {
    let charges: Vec<f64> = dens.iter().map(|d| trapezoid(&d.tt, h)).collect();
    time_derivative(&charges, dt)
        .into_iter()
        .zip(dens)
        .map(|(dq, d)| dq + d.tx[d.tx.len() - 1] - d.tx[0])
        .collect()
}

/// Time series for one law along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawSeries {
    pub law: LawId,
    pub charge: Vec<f64>,
    pub balance: Vec<f64>,
    pub max_divergence: Vec<f64>,
    /// `max_k |Q_k - Q_0| / max(|Q_0|, int |T^t| dxi at t_0)`
    pub relative_drift: f64,
    /// Balance and divergence maxima over interior snapshots.
    pub max_balance: f64,
    pub max_divergence_interior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub times: Vec<f64>,
    pub laws: Vec<LawSeries>,
}

impl DiagnosticsReport {
    pub fn law(&self, id: LawId) -> Option<&LawSeries> {
        self.laws.iter().find(|l| l.law == id)
    }
}

/// Charge, balance and divergence diagnostics for every applicable law.
pub fn diagnose(traj: &Trajectory, profile: &EntropyProfile, gamma: f64) -> Result<DiagnosticsReport> {
    let laws = builtin_laws(profile, gamma);
    diagnose_laws(traj, profile, gamma, &laws)
}

pub fn diagnose_laws(
    traj: &Trajectory,
    profile: &EntropyProfile,
    gamma: f64,
    laws: &[ConservationLaw],
) -> Result<DiagnosticsReport> {
    let dt = check_snapshots(traj)?;
    let h = traj.grid.dxi();
    let mut out = Vec::with_capacity(laws.len());
    for law in laws {
        let dens = all_densities(law.id, traj, profile, gamma)?;
        let charge: Vec<f64> = dens.iter().map(|d| trapezoid(&d.tt, h)).collect();
        let magnitude: Vec<f64> = dens[0].tt.iter().map(|v| v.abs()).collect();
        let scale = charge[0].abs().max(trapezoid(&magnitude, h));
        let drift = charge.iter().fold(0.0f64, |m, q| m.max((q - charge[0]).abs()));
        let relative_drift = if scale > 0.0 { drift / scale } else { drift };
        let balance = balance_from(&dens, h, dt);
        let field = divergence_from(&dens, traj, dt)?;
        let max_divergence = field.max_per_snapshot();
        out.push(LawSeries {
            law: law.id,
            max_balance: interior_max(&balance),
            max_divergence_interior: interior_max(&max_divergence),
            charge,
            balance,
            max_divergence,
            relative_drift,
        });
    }
    Ok(DiagnosticsReport {
        times: traj.times(),
        laws: out,
    })
}

/// Least-squares slope of `log err` against `log h`.
pub fn convergence_order(h: &[f64], err: &[f64]) -> Option<f64> {
    if h.len() != err.len() || h.len() < 2 {
        return None;
    }
    if h.iter().chain(err).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return None;
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
