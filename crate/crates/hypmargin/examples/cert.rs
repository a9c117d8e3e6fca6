//! Worst-case perturbation of a single sample.
//!
//! The search scans the reachable time coordinates of the budget sphere and
//! solves each slice in closed form. The printout compares it with the point
//! reached by walking `alpha` along the geodesic towards the boundary.
//!
//! ```text
//! cargo run --release --example cert
//! ```

use hypmargin::cert::{feasible_z0_interval, geodesic_worst_case, maximize_cert, CertSearch};
use hypmargin::geometry::{lorentz_distance, minkowski};
use hypmargin::margin::{decide, signed_margin};
use hypmargin::{Hypothesis, LorentzPoint};

fn main() -> hypmargin::Result<()> {
    let w = Hypothesis::new(vec![0.2, 1.0, -0.4])?;
    let x = LorentzPoint::lift(&[-0.9, 0.3]);
    let y = decide(&w, &x);
    println!("sample margin {:.6} (label {:?})", signed_margin(&w, &x, y), y);
    println!("{:>6} {:>10} {:>10} {:>12} {:>12} {:>6}", "alpha", "z0 lo", "z0 hi", "objective", "geodesic", "flips");
    for alpha in [0.0, 0.1, 0.25, 0.5, 0.75, 1.0] {
        let iv = feasible_z0_interval(&x, alpha);
        let adv = maximize_cert(&w, &x, y, alpha, &CertSearch::default()).expect("budget sphere is non-empty");
        let g = geodesic_worst_case(&w, &x, y, alpha)?;
        let g_obj = -y.sign() * minkowski(w.as_slice(), g.as_slice())?;
        assert!((lorentz_distance(&adv.point, &x)? - alpha).abs() < 1e-6);
        println!(
            "{alpha:>6.2} {:>10.6} {:>10.6} {:>12.8} {:>12.8} {:>6}",
            iv.lo, iv.hi, adv.objective, g_obj, adv.misclassifies
        );
    }
    Ok(())
}
