//! Adversarial ERM can need exponentially many rounds.
//!
//! Builds a sequence of classifiers, one per vector of a spherical code,
//! each of which separates two antipodal points with margin `eps`, handles
//! every earlier adversarial pair, and is fooled by the current one.
//!
//! ```text
//! cargo run --release --example pathology
//! ```

use hypmargin::synth::{build_erm_pathology, shannon_lower_bound};

fn main() -> hypmargin::Result<()> {
    let (eps, alpha, rho) = (0.05, 0.5, 0.99);
    println!("{:>3} {:>10} {:>8} {:>12} {:>8}", "d", "theta", "rounds", "shannon", "checks");
    for d in [3, 4, 6, 8, 10] {
        let w = build_erm_pathology(d, eps, alpha, rho, 1)?;
        let c = w.validate()?;
        println!(
            "{d:>3} {:>10.5} {:>8} {:>12.4} {:>8}",
            w.theta,
            w.len(),
            shannon_lower_bound(d, w.theta)?,
            if c.all_passed(1e-9) { "ok" } else { "FAILED" }
        );
    }
    // Narrower angles make the bound grow exponentially in d.
    for d in [8, 16, 32, 64] {
        println!("A({d}, pi/4) >= {:.3e}", shannon_lower_bound(d, std::f64::consts::FRAC_PI_4)?);
    }
    Ok(())
}
