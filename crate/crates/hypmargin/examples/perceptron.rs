//! Hyperbolic perceptron on generated data.
//!
//! Compares the two update rules with the mistake bound
//! `(cosh(pi) - 1) / sinh(gamma)` and runs the Euclidean perceptron on the
//! same samples for reference.
//!
//! ```text
//! cargo run --release --example perceptron
//! ```

use hypmargin::margin::dataset_margin;
use hypmargin::perceptron::{run_euclidean_perceptron, run_hyperbolic_perceptron, PerceptronConfig, UpdateRule};
use hypmargin::synth::sample_separable;
use hypmargin::Hypothesis;

fn main() -> hypmargin::Result<()> {
    let gamma: f64 = 0.3;
    let bound = ((std::f64::consts::PI.cosh() - 1.0) / gamma.sinh()).ceil();
    println!("mistake bound for gamma = {gamma}: {bound}");
    println!("{:>4} {:>4} {:>10} {:>10} {:>10}", "seed", "d", "reflected", "ambient", "euclidean");
    for seed in 0..8u64 {
        let d = 2 + seed as usize;
        let (s, _) = sample_separable(d, 150, gamma, 2.0, seed)?;
        let w0 = Hypothesis::axis(d);

        let r = run_hyperbolic_perceptron(&s, &w0, &PerceptronConfig::default())?;
        assert!(dataset_margin(&r.final_w, &s)?.margin > 0.0);

        let ambient = PerceptronConfig { max_epochs: 2000, rule: UpdateRule::Ambient };
        let a = match run_hyperbolic_perceptron(&s, &w0, &ambient) {
            Ok(a) if a.converged => a.mistakes.to_string(),
            Ok(_) => "no conv.".to_string(),
            Err(e) => format!("err: {e}"),
        };

        let feats: Vec<Vec<f64>> = s.points().iter().map(|p| p.as_slice().to_vec()).collect();
        let e = run_euclidean_perceptron(&feats, s.labels(), 10_000)?;
        println!("{seed:>4} {d:>4} {:>10} {a:>10} {:>10}", r.mistakes, e.mistakes);
    }
    Ok(())
}
