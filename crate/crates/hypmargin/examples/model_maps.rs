//! The same points in the hyperboloid, ball and half-plane models.
//!
//! Distances agree across models; the largest discrepancy over a batch of
//! random pairs is printed at the end.
//!
//! ```text
//! cargo run --release --example model_maps
//! ```

use hypmargin::geometry::{model_map, Model, ModelPoint};
use hypmargin::LorentzPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> hypmargin::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let a = LorentzPoint::lift(&[rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]);
        let b = LorentzPoint::lift(&[rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]);
        let (a, b) = (ModelPoint::Lorentz(a), ModelPoint::Lorentz(b));
        let reference = a.distance(&b)?;
        for model in [Model::Ball, Model::HalfPlane] {
            let d = model_map(&a, model)?.distance(&model_map(&b, model)?)?;
            worst = worst.max((d - reference).abs() / reference.max(1.0));
        }
        if k < 3 {
            println!("lorentz {:?}", a);
            println!("   ball {:?}", model_map(&a, Model::Ball)?);
            println!("  plane {:?}", model_map(&a, Model::HalfPlane)?);
        }
    }
    println!("largest relative distance discrepancy: {worst:.2e}");
    Ok(())
}
