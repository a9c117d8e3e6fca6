//! Adversarial gradient descent over a sweep of budgets.
//!
//! Larger budgets make the robust loss harder to drive down but push the
//! learned boundary further from the samples. Each row reports the state
//! after the final iteration.
//!
//! ```text
//! cargo run --release --example adversarial_training
//! ```

use hypmargin::synth::sample_separable;
use hypmargin::train::{run_adversarial_gd, LossChoice, StepSize, TrainConfig};

fn main() -> hypmargin::Result<()> {
    let (s, _) = sample_separable(3, 500, 0.5, 2.0, 7)?;
    println!("{:>6} {:>12} {:>12} {:>12} {:>8}", "alpha", "clean loss", "robust loss", "margin", "adv");
    for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let cfg = TrainConfig {
            loss: LossChoice::Logistic { radius: Some(10.0) },
            alpha,
            step: StepSize::Fixed(0.5),
            iterations: 2000,
            seed: 7,
            ..TrainConfig::default()
        };
        let trace = run_adversarial_gd(&s, &cfg)?;
        let last = trace.rows.last().expect("at least one iteration");
        println!(
            "{alpha:>6.2} {:>12.6} {:>12.6} {:>12.6} {:>8}",
            last.clean_loss, last.robust_loss, last.margin, trace.pool_size
        );
    }
    Ok(())
}
