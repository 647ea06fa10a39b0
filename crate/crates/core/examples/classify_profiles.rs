//! Classifies entropy profiles by their symmetry extension and prints the
//! differential invariant Delta along the domain.
//!
//! cargo run --release --example classify_profiles

use relgas::entropy::{CustomProfile, EntropyProfile};
use relgas::symmetry::{classify_entropy, default_samples};

fn main() -> relgas::Result<()> {
    let gamma = 5.0 / 3.0;
    let profiles = vec![
        EntropyProfile::constant(2.0)?,
        EntropyProfile::exponential(0.7)?,
        EntropyProfile::power(2.0 * (1.0 - gamma))?,
        EntropyProfile::power(3.0)?,
        EntropyProfile::polynomial(vec![1.0, 0.5, 0.25], (1.0, 2.0)),
        // exp(0.4 xi) in disguise, should be recognised
        EntropyProfile::Custom(CustomProfile::new("exp-like", (1.0, 2.0), |xi| {
            let e = (0.4 * xi).exp();
            [e, 0.4 * e, 0.16 * e, 0.064 * e]
        })),
    ];
    for p in &profiles {
        let samples = default_samples(1.0, 2.0, 16);
        let r = classify_entropy(p, &samples, 1e-8, gamma)?;
        let worst = r.delta_samples.iter().fold(0.0f64, |m, d| m.max(d.2.abs()));
        println!(
            "{:<10} -> {:<40} extensions {}  max |Delta|/scale {:.2e}",
            p.tag(),
            serde_json::to_string(&r.family).unwrap(),
            r.extensions.len(),
            worst
        );
    }
    Ok(())
}
