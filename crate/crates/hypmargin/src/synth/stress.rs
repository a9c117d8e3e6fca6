use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Euclidean coordinates fitted to a distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct StressEmbedding {
    pub coords: Vec<Vec<f64>>,
    /// `sum_{i<j} (|u_i - u_j| - d_ij)^2` at the returned coordinates.
    pub stress: f64,
    pub iterations: usize,
}

pub fn stress(coords: &[Vec<f64>], dist: &[Vec<f64>]) -> f64 {
    let n = coords.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let e: f64 = coords[i].iter().zip(&coords[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            s += (e - dist[i][j]).powi(2);
        }
    }
    s
}

/// Minimises the squared stress by repeated gradient steps of size `1/(2n)`
/// (the Guttman transform), which never increase the stress.
///
/// Starts from uniform random coordinates drawn from `seed` and stops after
/// `iters` steps or when the relative decrease falls below `1e-13`.
pub fn euclidean_stress_embed(dist: &[Vec<f64>], d: usize, iters: usize, seed: u64) -> Result<StressEmbedding> {
    let n = dist.len();
    if d == 0 {
        return Err(Error::InvalidArgument("target dimension must be at least 1".into()));
    }
    if dist.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: dist.iter().map(|r| r.len()).max().unwrap_or(0) });
    }
    if dist.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidArgument("distances must be finite and non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = if n > 1 { dist.iter().flatten().sum::<f64>() / (n * (n - 1)) as f64 } else { 0.0 };
    let mut x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| mean * (rng.random::<f64>() - 0.5)).collect()).collect();
    let mut current = stress(&x, dist);
    let mut used = 0;
    for _ in 0..iters {
        used += 1;
        let mut next = vec![vec![0.0; d]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let e: f64 = x[i].iter().zip(&x[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                let ratio = if e > 1e-300 { dist[i][j] / e } else { 0.0 };
                for k in 0..d {
                    next[i][k] += ratio * (x[i][k] - x[j][k]);
                }
            }
            for v in next[i].iter_mut() {
                *v /= n as f64;
            }
        }
        x = next;
        let s = stress(&x, dist);
        let done = current - s <= 1e-13 * current.max(1e-300);
        current = s;
        if done {
            break;
        }
    }
    Ok(StressEmbedding { coords: x, stress: current, iterations: used })
}
