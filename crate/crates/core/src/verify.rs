//! Sampled checks and refinement studies behind the CLI subcommands.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bridge::{
    common_range, constraint_residual, eulerian_residuals, resample, to_eulerian, uniform_points, ConstraintKind,
    EulerianSnapshot,
};
use crate::claws::{convergence_order, diagnose, DiagnosticsReport, LawId};
use crate::config::RunConfig;
use crate::entropy::EntropyProfile;
use crate::error::{Error, Result};
use crate::jet::{Jet1, JetRanges, JetSampler};
use crate::lagrangian::{
    accel, el_expansion, el_residual, el_residual_scale, parallel_deviation, partials, quasilinear,
};
use crate::solver::{run, Trajectory};
use crate::symmetry::{family_of, noether_sweep, AffineGenerator, Family};

/// Outcome of comparing the variational derivative with the equation of motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElReport {
    pub gamma: f64,
    pub samples: usize,
    pub seed: u64,
    /// Largest parallel deviation using the analytic second partials.
    pub max_deviation: f64,
    /// Same, with second partials from central differences of the first partials.
    pub max_deviation_fd: f64,
    /// Largest `|residual| / scale` after solving for `phi_tt`.
    pub max_accel_residual: f64,
    pub worst_jet: Jet1,
    pub worst_s0: f64,
}

fn fd_expansion(p: f64, q: f64, s0: f64, gamma: f64) -> Result<[f64; 4]> {
    let hp = 1e-6;
    let hq = 1e-6 * q;
    let hs = 1e-6 * s0.max(1e-3);
    let lp = |p: f64, q: f64| partials(p, q, s0, gamma).map(|d| d.d_phi_t);
    let lq = |q: f64, s: f64| partials(p, q, s, gamma).map(|d| d.d_phi_xi);
    let pp = (lp(p + hp, q)? - lp(p - hp, q)?) / (2.0 * hp);
    let pq = (lp(p, q + hq)? - lp(p, q - hq)?) / (2.0 * hq);
    let qq = (lq(q + hq, s0)? - lq(q - hq, s0)?) / (2.0 * hq);
    let qs = (lq(q, s0 + hs)? - lq(q, s0 - hs)?) / (2.0 * hs);
    Ok([-pp, -2.0 * pq, -qq, -qs])
}

/// Samples first-order jets and entropy values, and compares the coefficient
/// vectors of `(phi_tt, phi_txi, phi_xixi, S0')` in the expanded Euler-Lagrange
/// expression and in the equation of motion.
pub fn el_equivalence(gamma: f64, samples: usize, seed: u64) -> Result<ElReport> {
    let mut sampler = JetSampler::new(seed, JetRanges::default());
    let draws: Vec<(Jet1, f64, [f64; 3])> = (0..samples)
        .map(|_| {
            let j2 = sampler.jet2();
            let s0 = sampler.uniform(0.05, 5.0);
            let s0p = sampler.uniform(-2.0, 2.0);
            (j2.first, s0, [j2.phi_txi, j2.phi_xixi, s0p])
        })
        .collect();
    let rows: Vec<(f64, f64, f64)> = draws
        .par_iter()
        .map(|(jet, s0, [txi, xixi, s0p])| {
            let (p, q) = (jet.phi_t, jet.phi_xi);
            let eq = quasilinear(p, q, *s0, gamma)?.as_array();
            let dev = parallel_deviation(&el_expansion(p, q, *s0, gamma)?, &eq);
            let dev_fd = parallel_deviation(&fd_expansion(p, q, *s0, gamma)?, &eq);
            let tt = accel(p, q, *txi, *xixi, *s0, *s0p, gamma)?;
            let j2 = crate::jet::Jet2 {
                first: *jet,
                phi_tt: tt,
                phi_txi: *txi,
                phi_xixi: *xixi,
            };
            let scale = el_residual_scale(&j2, *s0, *s0p, gamma)?;
            let r = el_residual(&j2, *s0, *s0p, gamma)?.abs();
            Ok((dev, dev_fd, if scale > 0.0 { r / scale } else { r }))
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<_>>()?;
    let mut report = ElReport {
        gamma,
        samples,
        seed,
        max_deviation: 0.0,
        max_deviation_fd: 0.0,
        max_accel_residual: 0.0,
        worst_jet: draws.first().map(|d| d.0).unwrap_or(Jet1::kinematic(0.0, 1.0)),
        worst_s0: draws.first().map(|d| d.1).unwrap_or(1.0),
    };
    for ((dev, dev_fd, acc), (jet, s0, _)) in rows.into_iter().zip(&draws) {
        if dev > report.max_deviation {
            report.max_deviation = dev;
            report.worst_jet = *jet;
            report.worst_s0 = *s0;
        }
        report.max_deviation_fd = report.max_deviation_fd.max(dev_fd);
        report.max_accel_residual = report.max_accel_residual.max(acc);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Variational,
    NotVariational,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Variational => "variational",
            Verdict::NotVariational => "not-variational",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoetherRow {
    pub generator: String,
    pub profile: String,
    pub gamma: f64,
    pub samples: usize,
    pub max_relative: f64,
    pub fraction_nonzero: f64,
    pub observed: Verdict,
    pub expected: Verdict,
}

impl NoetherRow {
    pub fn matches(&self) -> bool {
        self.observed == self.expected
    }
}

/// Thresholds deciding a Noether verdict from sampled residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoetherCriteria {
    /// Variational when every relative residual is at most this.
    pub tol: f64,
    /// Not variational when at least `fraction` of the residuals reach `floor`.
    pub floor: f64,
    pub fraction: f64,
}

impl Default for NoetherCriteria {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            floor: 1e-3,
            fraction: 0.99,
        }
    }
}

fn short(v: f64) -> String {
    let s = format!("{v:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn profile_label(p: &EntropyProfile) -> String {
    match p {
        EntropyProfile::Constant(s) => format!("constant({})", short(*s)),
        EntropyProfile::Exponential(q) => format!("exponential({})", short(*q)),
        EntropyProfile::Power(q) => format!("power({})", short(*q)),
        EntropyProfile::Custom(c) => c.name().to_string(),
    }
}

/// The generators and profiles whose verdicts are fixed by the classification:
/// the kernel is variational for every profile, the dilation `X4` and the
/// exponential extension `X4a` never are, the label shift `X5` is for constant
/// entropy, and `X4b` is exactly when `q = 2(1 - gamma)`.
pub fn noether_panel(gamma: f64) -> Vec<(EntropyProfile, AffineGenerator, Verdict)> {
    let matched = 2.0 * (1.0 - gamma);
    let mismatched = matched - 0.5;
    let mut out = Vec::new();
    let mut add = |p: EntropyProfile, extra: Vec<(AffineGenerator, Verdict)>| {
        for g in crate::symmetry::kernel_generators() {
            out.push((p.clone(), g, Verdict::Variational));
        }
        for (g, v) in extra {
            out.push((p.clone(), g, v));
        }
    };
    add(
        EntropyProfile::Constant(1.0),
        vec![
            (AffineGenerator::x4(), Verdict::NotVariational),
            (AffineGenerator::x5(), Verdict::Variational),
        ],
    );
    add(
        EntropyProfile::Exponential(1.0),
        vec![(AffineGenerator::x4a(1.0, gamma), Verdict::NotVariational)],
    );
    add(
        EntropyProfile::Power(matched),
        vec![(AffineGenerator::x4b(matched, gamma), Verdict::Variational)],
    );
    add(
        EntropyProfile::Power(mismatched),
        vec![(AffineGenerator::x4b(mismatched, gamma), Verdict::NotVariational)],
    );
    out
}

pub fn noether_check(gamma: f64, samples: usize, seed: u64, criteria: NoetherCriteria) -> Result<Vec<NoetherRow>> {
    noether_panel(gamma)
        .into_iter()
        .map(|(profile, gen, expected)| {
            let sweep = noether_sweep(
                &gen,
                &profile,
                gamma,
                samples,
                seed,
                JetRanges::default(),
                criteria.floor,
            )?;
            let observed = if sweep.max_relative <= criteria.tol {
                Verdict::Variational
            } else if sweep.fraction_nonzero >= criteria.fraction {
                Verdict::NotVariational
            } else {
                Verdict::Inconclusive
            };
            Ok(NoetherRow {
                generator: gen.name.clone(),
                profile: profile_label(&profile),
                gamma,
                samples,
                max_relative: sweep.max_relative,
                fraction_nonzero: sweep.fraction_nonzero,
                observed,
                expected,
            })
        })
        .collect()
}

/// Runs the configured problem and fails on any guard.
pub fn simulate(cfg: &RunConfig) -> Result<Trajectory> {
    run(&cfg.solver_config()?, &cfg.ic)?.into_result()
}

/// One grid level of a refinement study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDiagnostics {
    pub n: usize,
    pub dxi: f64,
    pub dt: f64,
    pub report: DiagnosticsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawOrders {
    pub law: LawId,
    pub max_balance: Vec<f64>,
    pub max_divergence: Vec<f64>,
    pub balance_order: Option<f64>,
    pub divergence_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub levels: Vec<LevelDiagnostics>,
    pub orders: Vec<LawOrders>,
}

/// Diagnostics on grids `n, 2n, 4n, ...` with a fixed snapshot stride, so the
/// snapshot spacing shrinks with the grid.
pub fn refinement_study(cfg: &RunConfig) -> Result<RefinementStudy> {
    let profile = cfg.profile()?;
    let mut levels = Vec::new();
    for k in 0..cfg.refine_levels {
        let level = cfg.refined(1 << k);
        let traj = simulate(&level)?;
        let report = diagnose(&traj, &profile, cfg.gamma)?;
        levels.push(LevelDiagnostics {
            n: level.n,
            dxi: traj.grid.dxi(),
            dt: traj.meta.dt,
            report,
        });
    }
    let h: Vec<f64> = levels.iter().map(|l| l.dxi).collect();
    let orders = levels[0]
        .report
        .laws
        .iter()
        .map(|first| {
            let pick = |f: &dyn Fn(&crate::claws::LawSeries) -> f64| -> Vec<f64> {
                levels
                    .iter()
                    .map(|l| l.report.law(first.law).map(f).unwrap_or(f64::NAN))
                    .collect()
            };
            let max_balance = pick(&|s| s.max_balance);
            let max_divergence = pick(&|s| s.max_divergence_interior);
            LawOrders {
                law: first.law,
                balance_order: convergence_order(&h, &max_balance),
                divergence_order: convergence_order(&h, &max_divergence),
                max_balance,
                max_divergence,
            }
        })
        .collect();
    Ok(RefinementStudy { levels, orders })
}

/// Eulerian fields of a trajectory resampled onto one uniform grid.
pub fn eulerian_sequence(traj: &Trajectory, profile: &EntropyProfile, points: usize) -> Result<Vec<EulerianSnapshot>> {
    let raw = traj
        .snapshots
        .par_iter()
        .map(|s| to_eulerian(s, &traj.grid, profile))
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi) = common_range(&raw);
    if !(hi > lo) {
        return Err(Error::InvalidGrid("snapshots share no common x range".into()));
    }
    let x = uniform_points(lo, hi, points);
    raw.par_iter()
        .map(|e| resample(e, &x))
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect()
}

/// The entropy constraint that `profile` should satisfy, if any.
pub fn constraint_for(profile: &EntropyProfile, gamma: f64) -> Option<(ConstraintKind, f64)> {
    match family_of(profile, gamma) {
        Family::Exponential { q } => Some((ConstraintKind::Exponential, q)),
        Family::Power { q } => Some((ConstraintKind::Power, q)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerLevel {
    pub n: usize,
    pub points: usize,
    pub max_continuity: f64,
    pub max_entropy: f64,
    pub max_momentum: f64,
    pub max_constraint: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerStudy {
    pub levels: Vec<EulerLevel>,
    pub continuity_order: Option<f64>,
    pub entropy_order: Option<f64>,
    pub momentum_order: Option<f64>,
    pub constraint: Option<ConstraintKind>,
    pub constraint_order: Option<f64>,
}

pub fn euler_level(cfg: &RunConfig, traj: &Trajectory) -> Result<(EulerLevel, Vec<EulerianSnapshot>)> {
    let profile = cfg.profile()?;
    let seq = eulerian_sequence(traj, &profile, cfg.euler_points())?;
    let res = eulerian_residuals(&seq, cfg.gamma)?;
    let max_constraint = match constraint_for(&profile, cfg.gamma) {
        Some((kind, q)) => {
            let mut worst = 0.0f64;
            for s in &seq {
                for r in constraint_residual(s, q, kind)? {
                    worst = worst.max(r.abs());
                }
            }
            Some(worst)
        }
        None => None,
    };
    Ok((
        EulerLevel {
            n: cfg.n,
            points: cfg.euler_points(),
            max_continuity: res.max_continuity(),
            max_entropy: res.max_entropy(),
            max_momentum: res.max_momentum(),
            max_constraint,
        },
        seq,
    ))
}

pub fn euler_study(cfg: &RunConfig) -> Result<EulerStudy> {
    let profile = cfg.profile()?;
    let mut levels = Vec::new();
    for k in 0..cfg.refine_levels {
        let level = cfg.refined(1 << k);
        let traj = simulate(&level)?;
        levels.push(euler_level(&level, &traj)?.0);
    }
    let h: Vec<f64> = levels.iter().map(|l| 1.0 / l.points as f64).collect();
    let order = |f: &dyn Fn(&EulerLevel) -> f64| convergence_order(&h, &levels.iter().map(f).collect::<Vec<_>>());
    let constraint = constraint_for(&profile, cfg.gamma).map(|c| c.0);
    Ok(EulerStudy {
        continuity_order: order(&|l| l.max_continuity),
        entropy_order: order(&|l| l.max_entropy),
        momentum_order: order(&|l| l.max_momentum),
        constraint_order: constraint.and_then(|_| order(&|l| l.max_constraint.unwrap_or(f64::NAN))),
        constraint,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn el_report_is_tight() {
        let r = el_equivalence(1.4, 200, 3).unwrap();
        assert!(r.max_deviation < 1e-12, "{r:?}");
        assert!(r.max_deviation_fd < 1e-6, "{r:?}");
        assert!(r.max_accel_residual < 1e-12, "{r:?}");
    }

    #[test]
    fn noether_panel_matches_expectations() {
        let rows = noether_check(5.0 / 3.0, 500, 1, NoetherCriteria::default()).unwrap();
        assert_eq!(rows.len(), 17);
        for r in &rows {
            assert!(r.matches(), "{r:?}");
        }
    }
}
