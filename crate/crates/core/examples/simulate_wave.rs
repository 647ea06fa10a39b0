//! Integrates a small-amplitude velocity wave on a periodic mass grid and
//! prints how well each conserved charge is held.
//!
//! cargo run --release --example simulate_wave

use relgas::claws::diagnose;
use relgas::prelude::*;

fn main() -> relgas::Result<()> {
    let gamma = 5.0 / 3.0;
    let grid = Grid::new(0.0, 1.0, 200, Boundary::Periodic)?;
    let mut cfg = SolverConfig::new(GasParams::new(gamma)?, EntropyProfile::Constant(1.0), grid);
    cfg.t_end = 1.0;
    cfg.snapshot_stride = 4;

    let ic = InitialCondition::SineVelocity { b: 0.1, k: 1.0 };
    let traj = run(&cfg, &ic)?.into_result()?;
    println!(
        "{} steps of dt = {:.3e}, {} snapshots, solver hash {}",
        traj.meta.steps,
        traj.meta.dt,
        traj.snapshots.len(),
        traj.meta.config_hash
    );

    let report = diagnose(&traj, &cfg.profile, gamma)?;
    println!(
        "{:<4} {:>14} {:>14} {:>12} {:>12}",
        "law", "Q(0)", "Q(end)", "drift", "max div"
    );
    for l in &report.laws {
        println!(
            "{:<4} {:>14.8} {:>14.8} {:>12.3e} {:>12.3e}",
            l.law.to_string(),
            l.charge[0],
            l.charge[l.charge.len() - 1],
            l.relative_drift,
            l.max_divergence_interior
        );
    }
    Ok(())
}
