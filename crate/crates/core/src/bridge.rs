//! Eulerian fields from Lagrangian states.
//!
//! A particle with label `xi` sits at `x = phi(xi, t)` with velocity
//! `v = phi_t` and lab-frame density `m = 1 / phi_xi`; the proper density is
//! `n = m Gamma` and the entropy `S = S0(xi)` is carried along. Derivatives of
//! `m` follow from the chain rule, `m_x = -phi_xixi / phi_xi^3`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::claws::LawId;
use crate::entropy::EntropyProfile;
use crate::error::{Error, Result};
use crate::gas::gamma_factor;
use crate::interp::MonotoneCubic;
use crate::solver::{spatial_derivs, Grid, SimState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerianSnapshot {
    pub t: f64,
    /// Label of the particle at each point.
    pub xi: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub m: Vec<f64>,
    pub n: Vec<f64>,
    pub s: Vec<f64>,
}

impl EulerianSnapshot {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }
}

/// Maps a grid state to Eulerian fields at the particle positions.
pub fn to_eulerian(state: &SimState, grid: &Grid, profile: &EntropyProfile) -> Result<EulerianSnapshot> {
    let d = spatial_derivs(state, grid)?;
    let xi = grid.nodes();
    let x: Vec<f64> = xi.iter().zip(&state.u).map(|(a, u)| a + u).collect();
    let m: Vec<f64> = d.phi_xi.iter().map(|q| 1.0 / q).collect();
    let n = m
        .iter()
        .zip(&state.w)
        .enumerate()
        .map(|(j, (m, v))| Ok(m * gamma_factor(*v).map_err(|e| e.at_node(j, state.t))?))
        .collect::<Result<Vec<f64>>>()?;
    let s = xi.iter().map(|a| profile.value(*a)).collect();
    Ok(EulerianSnapshot {
        t: state.t,
        xi,
        x,
        v: state.w.clone(),
        m,
        n,
        s,
    })
}

/// `count` evenly spaced points on `[lo, hi]`.
pub fn uniform_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (count - 1) as f64
            }
        })
        .collect()
}

/// Interpolates `v`, `m`, `S` and the label onto `x_grid`; `n` is rebuilt as `m Gamma`.
pub fn resample(snap: &EulerianSnapshot, x_grid: &[f64]) -> Result<EulerianSnapshot> {
    let fv = MonotoneCubic::new(&snap.x, &snap.v)?;
    let fm = MonotoneCubic::new(&snap.x, &snap.m)?;
    let fs = MonotoneCubic::new(&snap.x, &snap.s)?;
    let fxi = MonotoneCubic::new(&snap.x, &snap.xi)?;
    let eval = |f: &MonotoneCubic| x_grid.iter().map(|x| f.eval(*x)).collect::<Result<Vec<f64>>>();
    let v = eval(&fv)?;
    let m = eval(&fm)?;
    let n = m
        .iter()
        .zip(&v)
        .map(|(m, v)| Ok(m * gamma_factor(*v)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(EulerianSnapshot {
        t: snap.t,
        xi: eval(&fxi)?,
        x: x_grid.to_vec(),
        v,
        m,
        n,
        s: eval(&fs)?,
    })
}

/// `G^E = 1 + gamma S m^(gamma-1) Gamma^(gamma-1) / (gamma - 1)`
pub fn g_euler(v: f64, m: f64, s: f64, gamma: f64) -> Result<f64> {
    let l = gamma_factor(v)?;
    if !(m > 0.0) {
        return Err(Error::Domain(format!("density must be > 0, got {m}")));
    }
    Ok(1.0 + gamma * s * m.powf(gamma - 1.0) * l.powf(gamma - 1.0) / (gamma - 1.0))
}

/// Eulerian fields at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerianPoint {
    pub t: f64,
    pub x: f64,
    pub v: f64,
    pub m: f64,
    pub s: f64,
}

/// Density pair of `id` in Eulerian variables. The dilation law recovers the
/// label from `xi = S^(1/q)`, `q = 2(1 - gamma)`.
pub fn eulerian_density(id: LawId, p: &EulerianPoint, gamma: f64) -> Result<(f64, f64)> {
    let ge = g_euler(p.v, p.m, p.s, gamma)?;
    let l = gamma_factor(p.v)?;
    let flux = p.s * l.powf(gamma) * p.m.powf(gamma);
    let inertia = ge / l;
    let momentum = p.v * inertia;
    let energy = inertia - flux / p.m;
    Ok(match id {
        LawId::T1 => (momentum, flux),
        LawId::T2 => (energy, flux * p.v),
        LawId::T3 => (p.x * energy - p.t * momentum, flux * (p.x * p.v - p.t)),
        LawId::T5 => (momentum / p.m, l * ge),
        LawId::T4 => {
            let q = 2.0 * (1.0 - gamma);
            let label = p.s.powf(1.0 / q);
            (
                p.t * (flux / p.m - inertia) + (p.x + label / p.m) * momentum,
                label * l * ge + flux * (p.x - p.t * p.v),
            )
        }
    })
}

/// Per-law density arrays over a snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerianLawDensity {
    pub law: LawId,
    pub tt: Vec<f64>,
    pub tx: Vec<f64>,
}

pub fn eulerian_densities(snap: &EulerianSnapshot, laws: &[LawId], gamma: f64) -> Result<Vec<EulerianLawDensity>> {
    laws.iter()
        .map(|&law| {
            let (tt, tx): (Vec<f64>, Vec<f64>) = (0..snap.len())
                .map(|j| {
                    let p = EulerianPoint {
                        t: snap.t,
                        x: snap.x[j],
                        v: snap.v[j],
                        m: snap.m[j],
                        s: snap.s[j],
                    };
                    eulerian_density(law, &p, gamma).map_err(|e| e.at_node(j, snap.t))
                })
                .collect::<Result<Vec<(f64, f64)>>>()?
                .into_iter()
                .unzip();
            Ok(EulerianLawDensity { law, tt, tx })
        })
        .collect()
}

/// Residuals of the Eulerian equations at interior points of interior snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerianResiduals {
    pub times: Vec<f64>,
    /// `m_t + (m v)_x`
    pub continuity: Vec<Vec<f64>>,
    /// `S_t + v S_x`
    pub entropy: Vec<Vec<f64>>,
    /// Momentum-equation residual; does not converge, reported only.
    pub momentum: Vec<Vec<f64>>,
}

fn field_max(field: &[Vec<f64>]) -> f64 {
    field.iter().flat_map(|r| r.iter()).fold(0.0f64, |m, v| m.max(v.abs()))
}

impl EulerianResiduals {
    pub fn max_continuity(&self) -> f64 {
        field_max(&self.continuity)
    }
    pub fn max_entropy(&self) -> f64 {
        field_max(&self.entropy)
    }
    pub fn max_momentum(&self) -> f64 {
        field_max(&self.momentum)
    }
}

/// Largest interval contained in the image of every snapshot.
pub fn common_range(snaps: &[EulerianSnapshot]) -> (f64, f64) {
    snaps.iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(lo, hi), s| {
        let (a, b) = s.range();
        (lo.max(a), hi.min(b))
    })
}

/// Centered differences of the Eulerian system on snapshots sharing one
/// uniform `x` grid and a uniform time step.
pub fn eulerian_residuals(snaps: &[EulerianSnapshot], gamma: f64) -> Result<EulerianResiduals> {
    if snaps.len() < 3 {
        return Err(Error::InsufficientSnapshots {
            needed: 3,
            got: snaps.len(),
        });
    }
    let dt = snaps[1].t - snaps[0].t;
    if !(dt > 0.0)
        || snaps
            .windows(2)
            .any(|w| ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt.max(w[1].t.abs()))
    {
        return Err(Error::NonUniformSnapshots);
    }
    let x = &snaps[0].x;
    if snaps.iter().any(|s| s.x != *x) {
        return Err(Error::InvalidGrid("snapshots must share one x grid".into()));
    }
    if x.len() < 3 {
        return Err(Error::InvalidGrid("need at least 3 x points".into()));
    }
    let h = x[1] - x[0];
    let k = snaps.len();
    let rows: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (1..k - 1)
        .into_par_iter()
        .map(|i| {
            let (prev, cur, next) = (&snaps[i - 1], &snaps[i], &snaps[i + 1]);
            let mut cont = Vec::with_capacity(x.len() - 2);
            let mut ent = Vec::with_capacity(x.len() - 2);
            let mut mom = Vec::with_capacity(x.len() - 2);
            for j in 1..x.len() - 1 {
                let dx = |f: &[f64]| (f[j + 1] - f[j - 1]) / (2.0 * h);
                let dtf = |a: &[f64], b: &[f64]| (b[j] - a[j]) / (2.0 * dt);
                let mv: Vec<f64> = [j - 1, j, j + 1].iter().map(|&i| cur.m[i] * cur.v[i]).collect();
                cont.push(dtf(&prev.m, &next.m) + (mv[2] - mv[0]) / (2.0 * h));
                ent.push(dtf(&prev.s, &next.s) + cur.v[j] * dx(&cur.s));
                let (n, v, s) = (cur.n[j], cur.v[j], cur.s[j]);
                let l2 = 1.0 - v * v;
                let v_t = dtf(&prev.v, &next.v);
                let v_x = dx(&cur.v);
                mom.push(
                    n * (v_t + v * v_x)
                        + l2 * l2 * n.powf(gamma - 1.0) * (gamma * s * dx(&cur.n) + n * dx(&cur.s))
                        + n.powf(gamma) * s / (gamma - 1.0)
                            * ((1.0 + v * v - gamma * v * v) * v_t + gamma * (2.0 - gamma) * v * v_x),
                );
            }
            (cont, ent, mom)
        })
        .collect();
    let mut out = EulerianResiduals {
        times: snaps[1..k - 1].iter().map(|s| s.t).collect(),
        continuity: Vec::with_capacity(rows.len()),
        entropy: Vec::with_capacity(rows.len()),
        momentum: Vec::with_capacity(rows.len()),
    };
    for (c, e, m) in rows {
        out.continuity.push(c);
        out.entropy.push(e);
        out.momentum.push(m);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    /// `S_x = m q S`
    Exponential,
    /// `q m S S_xx + (1 - q) m S_x^2 - q m_x S S_x = 0`
    Power,
}

/// Pointwise residual of the entropy constraint at interior points of a
/// snapshot on a uniform `x` grid.
pub fn constraint_residual(snap: &EulerianSnapshot, q: f64, kind: ConstraintKind) -> Result<Vec<f64>> {
    let x = &snap.x;
    if x.len() < 3 {
        return Err(Error::InvalidGrid("need at least 3 x points".into()));
    }
    let h = x[1] - x[0];
    let (s, m) = (&snap.s, &snap.m);
    Ok((1..x.len() - 1)
        .map(|j| {
            let s_x = (s[j + 1] - s[j - 1]) / (2.0 * h);
            match kind {
                ConstraintKind::Exponential => s_x - m[j] * q * s[j],
                ConstraintKind::Power => {
                    let s_xx = (s[j + 1] - 2.0 * s[j] + s[j - 1]) / (h * h);
                    let m_x = (m[j + 1] - m[j - 1]) / (2.0 * h);
                    q * m[j] * s[j] * s_xx + (1.0 - q) * m[j] * s_x * s_x - q * m_x * s[j] * s_x
                }
            }
        })
        .collect())
}

/// `m_x` at the particle positions, `-phi_xixi / phi_xi^3`.
pub fn density_gradient(state: &SimState, grid: &Grid) -> Result<Vec<f64>> {
    let d = spatial_derivs(state, grid)?;
    Ok(d.phi_xi
        .iter()
        .zip(&d.phi_xixi)
        .map(|(q, qq)| -qq / (q * q * q))
        .collect())
}
