//! Runs the symmetry panel: every generator of the kernel and of each
//! profile's extension is tested for the Noether (variational) condition,
//! then each conservation law is compared with the current of its generator.
//!
//! cargo run --release --example noether_symmetries

use relgas::claws::{density, noether_current, LawId};
use relgas::jet::{JetRanges, JetSampler};
use relgas::verify::{noether_check, NoetherCriteria};

fn main() -> relgas::Result<()> {
    let gamma = 1.4;
    let rows = noether_check(gamma, 2000, 11, NoetherCriteria::default())?;
    for r in &rows {
        println!(
            "{:<4} {:<26} {:>10.3e}  {:<16} expected {}",
            r.generator,
            r.profile,
            r.max_relative,
            r.observed.as_str(),
            r.expected.as_str()
        );
    }

    // noether_current returns factor * current of the law's generator
    let mut sampler = JetSampler::new(3, JetRanges::default());
    let laws = [LawId::T1, LawId::T2, LawId::T3, LawId::T5];
    let mut worst = [0.0f64; 4];
    for _ in 0..1000 {
        let jet = sampler.jet1();
        for (k, id) in laws.iter().enumerate() {
            let (dt, dx) = density(*id, &jet, 1.0, gamma)?;
            let (ct, cx) = noether_current(*id, &jet, 1.0, gamma)?;
            worst[k] = worst[k].max((dt - ct).abs()).max((dx - cx).abs());
        }
    }
    for (id, w) in laws.iter().zip(worst) {
        println!(
            "{id} = {:+.3} x current of {}: max deviation {w:.2e}",
            id.noether_factor(gamma),
            id.generator(gamma).name
        );
    }
    Ok(())
}
