//! The equation of motion under the dilation `(xi, t, phi) -> e^a (xi, t, phi)`
//! combined with entropy rescaling: solutions stay solutions.
//!
//! cargo run --release --example dilation_covariance

use relgas::equivalence::dilate;
use relgas::jet::{Jet2, JetRanges, JetSampler};
use relgas::lagrangian::{accel, el_residual};

fn main() -> relgas::Result<()> {
    let gamma = 1.4;
    let mut sampler = JetSampler::new(5, JetRanges::default());
    for a in [-0.5, 0.3, 1.0] {
        let mut worst = 0.0f64;
        for _ in 0..500 {
            let j = sampler.jet2();
            let (s0, s0p) = (1.3, 0.4);
            // put the jet on a solution by solving for phi_tt
            let phi_tt = accel(j.first.phi_t, j.first.phi_xi, j.phi_txi, j.phi_xixi, s0, s0p, gamma)?;
            let on = Jet2 { phi_tt, ..j };
            let (d, s0p_d) = dilate(&on, s0p, a);
            worst = worst.max(el_residual(&d, s0, s0p_d, gamma)?.abs());
        }
        println!("a = {a:+.1}: max residual after dilation {worst:.2e}");
    }
    Ok(())
}
