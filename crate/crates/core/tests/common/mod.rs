//! Helpers shared by the integration test targets.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Square orthogonal matrix from modified Gram-Schmidt on a seeded random
/// matrix (test-local; the library itself never needs one).
pub fn random_orthogonal(dim: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = Array2::<f64>::zeros((dim, dim));
    for j in 0..dim {
        let mut col: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
        for prev in 0..j {
            let dot: f64 = (0..dim).map(|i| q[[i, prev]] * col[i]).sum();
            for i in 0..dim {
                col[i] -= dot * q[[i, prev]];
            }
        }
        let norm: f64 = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm > 1e-8, "degenerate draw for orthogonalization");
        for i in 0..dim {
            q[[i, j]] = col[i] / norm;
        }
    }
    q
}

/// |a - b| relative to the larger magnitude (safe at zero).
pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
