//! Maps a Lagrangian run to Eulerian fields, resamples them onto a uniform
//! x grid and measures the continuity and entropy-advection residuals.
//!
//! cargo run --release --example eulerian_bridge

use relgas::config::{EntropySpec, RunConfig};
use relgas::solver::{BaseStretch, Boundary};
use relgas::verify::euler_study;

fn main() -> relgas::Result<()> {
    let cfg = RunConfig {
        entropy: EntropySpec::Exponential { q: 0.5 },
        xi_min: 0.0,
        xi_max: 1.0,
        boundary: Boundary::Wall,
        n: 100,
        t_end: 0.5,
        refine_levels: 3,
        base_stretch: BaseStretch::Hydrostatic,
        ..RunConfig::default()
    };
    let study = euler_study(&cfg)?;
    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>12}",
        "n", "continuity", "entropy", "momentum", "constraint"
    );
    for l in &study.levels {
        println!(
            "{:>5} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}",
            l.n,
            l.max_continuity,
            l.max_entropy,
            l.max_momentum,
            l.max_constraint.unwrap_or(f64::NAN)
        );
    }
    println!(
        "orders: continuity {:?} entropy {:?} momentum {:?} constraint {:?}",
        study.continuity_order, study.entropy_order, study.momentum_order, study.constraint_order
    );
    Ok(())
}
