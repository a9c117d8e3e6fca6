use std::f64::consts::TAU;

use num_complex::Complex64;

use super::tree::TreeMetric;
use crate::error::{Error, Result};
use crate::geometry::{ball_to_lorentz, BallPoint, LorentzPoint};

/// Disk isometry sending `a` to the origin.
fn to_origin(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

/// Inverse of [`to_origin`].
fn from_origin(a: Complex64, z: Complex64) -> Complex64 {
    (z + a) / (Complex64::new(1.0, 0.0) + a.conj() * z)
}

/// Embeds a tree in the hyperbolic plane (`d = 2`), returning one point per
/// node in node order.
///
/// The root sits at the origin of the disk and its children are spread
/// evenly around it. Every other node is moved to the origin by a disk
/// isometry; its parent then lies in some direction and its children take
/// the remaining evenly spaced directions. An edge of weight `w` has
/// hyperbolic length `tau * w`.
///
/// Double precision limits the usable radius: once nodes sit about 30 units
/// from the root, siblings at the same depth become indistinguishable and the
/// measured distortion is reported as degenerate.
pub fn sarkar_embed(tree: &TreeMetric, tau: f64) -> Result<Vec<LorentzPoint>> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {tau}")));
    }
    let n = tree.len();
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    let root = tree.root();
    let mut stack = Vec::new();
    let kids = tree.children(root);
    for (k, &c) in kids.iter().enumerate() {
        let r = (tau * tree.edge_weight(c) / 2.0).tanh();
        z[c] = Complex64::from_polar(r, TAU * k as f64 / kids.len() as f64);
        stack.push(c);
    }
    while let Some(u) = stack.pop() {
        let p = tree.parent(u).expect("non-root node has a parent");
        let theta = to_origin(z[u], z[p]).arg();
        let kids = tree.children(u);
        let slots = (kids.len() + 1) as f64;
        for (k, &c) in kids.iter().enumerate() {
            let r = (tau * tree.edge_weight(c) / 2.0).tanh();
            let local = Complex64::from_polar(r, theta + TAU * (k + 1) as f64 / slots);
            z[c] = from_origin(z[u], local);
            stack.push(c);
        }
    }
    z.into_iter()
        .map(|c| {
            let b = BallPoint::new(vec![c.re, c.im]).map_err(|_| {
                Error::Numerical(format!("embedded point reached the disk boundary (scale {tau} too large)"))
            })?;
            Ok(ball_to_lorentz(&b))
        })
        .collect()
}
