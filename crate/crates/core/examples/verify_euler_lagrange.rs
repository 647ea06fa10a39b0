//! Checks on random jets that the Euler-Lagrange expression of the Lagrangian
//! is parallel to the equation of motion, for several adiabatic indices.
//!
//! cargo run --release --example verify_euler_lagrange

use relgas::verify::el_equivalence;

fn main() -> relgas::Result<()> {
    println!("{:>6} {:>14} {:>14} {:>14}", "gamma", "parallel", "fd oracle", "accel");
    for gamma in [1.2, 4.0 / 3.0, 1.4, 5.0 / 3.0, 2.0, 3.0] {
        let r = el_equivalence(gamma, 1000, 7)?;
        println!(
            "{:>6.3} {:>14.3e} {:>14.3e} {:>14.3e}",
            gamma, r.max_deviation, r.max_deviation_fd, r.max_accel_residual
        );
    }
    Ok(())
}
