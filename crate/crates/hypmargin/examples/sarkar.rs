//! Tree embeddings in the hyperbolic plane and in Euclidean space.
//!
//! Scaling up the edge length brings the hyperbolic distortion of a tree
//! towards 1, while a planar stress layout of the same tree stays far from
//! isometric.
//!
//! ```text
//! cargo run --release --example sarkar
//! ```

use hypmargin::synth::{
    euclidean_distance_matrix, euclidean_stress_embed, lorentz_distance_matrix, measure_distortion, sarkar_embed,
    TreeMetric,
};

fn main() -> hypmargin::Result<()> {
    let tree = TreeMetric::balanced(3, 3);
    let truth = tree.distance_matrix();
    println!("ternary tree of depth 3, {} nodes", tree.len());
    for tau in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let pts = sarkar_embed(&tree, tau)?;
        let r = measure_distortion(&truth, &lorentz_distance_matrix(&pts))?;
        println!("  sarkar tau = {tau:>4}: distortion {:.5}", r.c_m);
    }
    for d in [2, 3, 5, 10] {
        let e = euclidean_stress_embed(&truth, d, 3000, 0)?;
        let r = measure_distortion(&truth, &euclidean_distance_matrix(&e.coords))?;
        println!("  stress d = {d:>2}: distortion {:.5}, stress {:.4}", r.c_m, e.stress);
    }
    Ok(())
}
