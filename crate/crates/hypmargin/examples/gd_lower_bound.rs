//! Plain gradient descent grows the margin only logarithmically.
//!
//! On the two antipodal points `(e0, +1)` and `(-e0, -1)` the logistic loss
//! keeps decreasing, but the margin after `t` steps stays below
//! `ln(t + 2)`.
//!
//! ```text
//! cargo run --release --example gd_lower_bound
//! ```

use hypmargin::train::{run_plain_gd, LossChoice, StepSize, TrainConfig};
use hypmargin::{Label, LabeledSet, LorentzPoint};

fn main() -> hypmargin::Result<()> {
    let e0 = LorentzPoint::origin(2);
    let s = LabeledSet::new_double_sheet(vec![e0.clone(), e0.antipode()], vec![Label::Pos, Label::Neg], 2)?;
    let cfg = TrainConfig {
        loss: LossChoice::Logistic { radius: Some(1.0) },
        step: StepSize::Fixed(0.25),
        iterations: 10_000,
        ..TrainConfig::default()
    };
    let trace = run_plain_gd(&s, &cfg)?;
    println!("{:>6} {:>10} {:>10} {:>12}", "t", "margin", "ln(t+2)", "clean loss");
    for r in trace.rows.iter().filter(|r| r.iter.is_power_of_two() || r.iter == 10_000) {
        println!("{:>6} {:>10.5} {:>10.5} {:>12.3e}", r.iter, r.margin, ((r.iter + 2) as f64).ln(), r.clean_loss);
    }
    let worst = trace.rows.iter().map(|r| r.margin - ((r.iter + 2) as f64).ln()).fold(f64::NEG_INFINITY, f64::max);
    println!("max over t of margin - ln(t+2): {worst:.5}");
    Ok(())
}
