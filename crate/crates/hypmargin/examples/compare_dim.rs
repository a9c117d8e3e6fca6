//! Linear separability of tree leaves after embedding.
//!
//! The leaves under the root's first child form one class. In the
//! hyperbolic plane a single geodesic separates the two subtrees; the
//! Euclidean stress layout needs more dimensions before a line does.
//!
//! ```text
//! cargo run --release --example compare_dim
//! ```

use hypmargin::synth::{compare_dimensions, two_subtree_tree, CompareConfig};

fn main() -> hypmargin::Result<()> {
    let tree = two_subtree_tree(24, 6, 5, 6);
    let rows = compare_dimensions(&tree, &[2, 3, 4, 6, 10], &CompareConfig::default())?;
    println!("{:>3} {:>10} {:>10} {:>12} {:>12}", "d", "hyp err", "euc err", "hyp distort", "euc distort");
    for r in rows {
        println!(
            "{:>3} {:>10.4} {:>10.4} {:>12.4} {:>12.4}",
            r.d, r.hyperbolic_error, r.euclidean_error, r.hyperbolic_distortion, r.euclidean_distortion
        );
    }
    Ok(())
}
