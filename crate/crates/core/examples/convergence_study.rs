//! Grid refinement study of the discrete balance of every conservation law
//! on a reflective domain with stratified entropy, starting from a wave on
//! top of the hydrostatic rest state.
//!
//! cargo run --release --example convergence_study

use relgas::config::{EntropySpec, RunConfig};
use relgas::solver::{BaseStretch, Boundary, InitialCondition};
use relgas::verify::refinement_study;

fn main() -> relgas::Result<()> {
    let cfg = RunConfig {
        gamma: 1.5,
        entropy: EntropySpec::Exponential { q: 1.0 },
        xi_min: 1.0,
        xi_max: 2.0,
        n: 100,
        boundary: Boundary::Wall,
        t_end: 0.5,
        ic: InitialCondition::SineVelocity { b: 0.05, k: 1.0 },
        refine_levels: 3,
        base_stretch: BaseStretch::Hydrostatic,
        ..RunConfig::default()
    };
    let study = refinement_study(&cfg)?;
    for o in &study.orders {
        let fmt = |v: Option<f64>| v.map_or("n/a".into(), |v| format!("{v:.3}"));
        println!(
            "{}: balance {:?}\n    order {}   divergence order {}",
            o.law,
            o.max_balance.iter().map(|b| format!("{b:.2e}")).collect::<Vec<_>>(),
            fmt(o.balance_order),
            fmt(o.divergence_order)
        );
    }
    Ok(())
}
