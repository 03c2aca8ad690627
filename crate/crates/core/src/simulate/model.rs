//! Data-generating models for size and power studies.
//!
//! All models draw rows i.i.d. from a latent-factor construction:
//!
//! ```text
//! X = W1 + gamma * W2[..p1]      (first block, p1 columns)
//! Y = (1 + gamma) * W2           (second block, p2 columns)
//! ```
//!
//! where `W1`, `W2` have i.i.d. coordinates. For the plain models the
//! coordinates are standard normal; the contaminated model adds
//! `theta * V` with `V` a standardized gamma variable to every latent
//! coordinate, giving skewed, heavier-tailed data with the same correlation
//! structure scaled by `1 + theta^2`. At `gamma = 0` the blocks are
//! independent (the null); `gamma > 0` induces cross-covariance
//! `gamma (1 + gamma) (1 + theta^2)` on the first `p1` coordinate pairs.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// A fully specified data-generating truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TruthModel {
    /// Independent standard normal blocks (`gamma = 0` by construction).
    NullIdentity { p1: usize, p2: usize },
    /// Shared normal latent factor with coupling `gamma >= 0`.
    Mixture { p1: usize, p2: usize, gamma: f64 },
    /// Mixture with standardized-gamma contamination: every latent normal
    /// coordinate gains `theta * V`, `V = (G - shape) / sqrt(shape)`,
    /// `G ~ Gamma(shape, 1)`.
    Contaminated {
        p1: usize,
        p2: usize,
        gamma: f64,
        theta: f64,
        shape: f64,
    },
}

impl TruthModel {
    /// Independent standard normal blocks.
    pub fn null_identity(p1: usize, p2: usize) -> Result<Self> {
        let m = TruthModel::NullIdentity { p1, p2 };
        m.validate()?;
        Ok(m)
    }

    /// Latent-factor coupling with strength `gamma`.
    pub fn mixture(p1: usize, p2: usize, gamma: f64) -> Result<Self> {
        let m = TruthModel::Mixture { p1, p2, gamma };
        m.validate()?;
        Ok(m)
    }

    /// Coupled model with contamination weight `theta` and gamma shape
    /// parameter `shape`.
    pub fn contaminated(p1: usize, p2: usize, gamma: f64, theta: f64, shape: f64) -> Result<Self> {
        let m = TruthModel::Contaminated {
            p1,
            p2,
            gamma,
            theta,
            shape,
        };
        m.validate()?;
        Ok(m)
    }

    /// Check all parameter domains. The coupled models require `p1 <= p2`
    /// because the first block reuses the leading `p1` coordinates of the
    /// second block's latent factor.
    pub fn validate(&self) -> Result<()> {
        let (p1, p2) = (self.p1(), self.p2());
        if p1 == 0 || p2 == 0 {
            return Err(Error::InvalidParameter {
                name: "p1/p2",
                message: "block dimensions must be positive".into(),
                value: format!("({p1}, {p2})"),
            });
        }
        match *self {
            TruthModel::NullIdentity { .. } => {}
            TruthModel::Mixture { gamma, .. } => {
                check_gamma(gamma)?;
                check_latent_widths(p1, p2)?;
            }
            TruthModel::Contaminated {
                gamma,
                theta,
                shape,
                ..
            } => {
                check_gamma(gamma)?;
                check_latent_widths(p1, p2)?;
                if !theta.is_finite() || theta < 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "theta",
                        message: "contamination weight must be finite and non-negative".into(),
                        value: format!("{theta}"),
                    });
                }
                if !shape.is_finite() || shape <= 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "shape",
                        message: "gamma shape parameter must be finite and positive".into(),
                        value: format!("{shape}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Width of the first block.
    pub fn p1(&self) -> usize {
        match *self {
            TruthModel::NullIdentity { p1, .. }
            | TruthModel::Mixture { p1, .. }
            | TruthModel::Contaminated { p1, .. } => p1,
        }
    }

    /// Width of the second block.
    pub fn p2(&self) -> usize {
        match *self {
            TruthModel::NullIdentity { p2, .. }
            | TruthModel::Mixture { p2, .. }
            | TruthModel::Contaminated { p2, .. } => p2,
        }
    }

    /// Coupling strength (0 for the null model).
    pub fn gamma(&self) -> f64 {
        match *self {
            TruthModel::NullIdentity { .. } => 0.0,
            TruthModel::Mixture { gamma, .. } | TruthModel::Contaminated { gamma, .. } => gamma,
        }
    }

    /// Contamination weight (0 unless contaminated).
    pub fn theta(&self) -> f64 {
        match *self {
            TruthModel::Contaminated { theta, .. } => theta,
            _ => 0.0,
        }
    }

    /// Whether the two blocks are independent under this model.
    pub fn is_null(&self) -> bool {
        self.gamma() == 0.0
    }

    /// The same model with a different coupling strength (for sweeps).
    /// The null model cannot be re-coupled.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        match *self {
            TruthModel::NullIdentity { .. } => Err(Error::InvalidParameter {
                name: "model",
                message: "the null model has no coupling to sweep; use a mixture model".into(),
                value: "null-identity".into(),
            }),
            TruthModel::Mixture { p1, p2, .. } => Self::mixture(p1, p2, gamma),
            TruthModel::Contaminated {
                p1,
                p2,
                theta,
                shape,
                ..
            } => Self::contaminated(p1, p2, gamma, theta, shape),
        }
    }

    /// The same model with a different second-block width (for sweeps).
    pub fn with_p2(&self, p2: usize) -> Result<Self> {
        match *self {
            TruthModel::NullIdentity { p1, .. } => Self::null_identity(p1, p2),
            TruthModel::Mixture { p1, gamma, .. } => Self::mixture(p1, p2, gamma),
            TruthModel::Contaminated {
                p1,
                gamma,
                theta,
                shape,
                ..
            } => Self::contaminated(p1, p2, gamma, theta, shape),
        }
    }

    /// Per-coordinate variance scale `1 + theta^2` from contamination.
    fn contamination_scale(&self) -> f64 {
        let th = self.theta();
        1.0 + th * th
    }

    /// Population covariance of the first block: `(1 + gamma^2)(1 + theta^2) I`.
    pub fn sigma_xx(&self) -> Array2<f64> {
        let g = self.gamma();
        Array2::eye(self.p1()) * ((1.0 + g * g) * self.contamination_scale())
    }

    /// Population covariance of the second block: `(1 + gamma)^2 (1 + theta^2) I`.
    pub fn sigma_yy(&self) -> Array2<f64> {
        let g = self.gamma();
        Array2::eye(self.p2()) * ((1.0 + g) * (1.0 + g) * self.contamination_scale())
    }

    /// Population cross covariance: `gamma (1 + gamma)(1 + theta^2) [I 0]`.
    pub fn sigma_xy(&self) -> Array2<f64> {
        let g = self.gamma();
        let c = g * (1.0 + g) * self.contamination_scale();
        let mut s = Array2::zeros((self.p1(), self.p2()));
        for j in 0..self.p1() {
            s[[j, j]] = c;
        }
        s
    }

    /// Population value of `tr(Sigma_xy Sigma_yx)` (what the cross estimator
    /// is unbiased for).
    pub fn target_cross_trace(&self) -> f64 {
        let g = self.gamma();
        let c = g * (1.0 + g) * self.contamination_scale();
        self.p1() as f64 * c * c
    }

    /// Population value of `tr(Sigma_xx^2)`.
    pub fn target_xx_trace(&self) -> f64 {
        let g = self.gamma();
        let v = (1.0 + g * g) * self.contamination_scale();
        self.p1() as f64 * v * v
    }

    /// Population value of `tr(Sigma_yy^2)`.
    pub fn target_yy_trace(&self) -> f64 {
        let g = self.gamma();
        let v = (1.0 + g) * (1.0 + g) * self.contamination_scale();
        self.p2() as f64 * v * v
    }

    /// Draw `n_obs` joint observations (rows) deterministically from `seed`.
    ///
    /// Row layout: the first `p1` columns are the X block, the remaining
    /// `p2` the Y block. Within a row the latent draws are consumed in a
    /// fixed order (W1 normals, W1 contaminations, W2 normals, W2
    /// contaminations), and contamination draws are skipped entirely when
    /// `theta = 0`, so a contaminated model with `theta = 0` reproduces the
    /// mixture bit for bit, and a mixture with `gamma = 0` reproduces the
    /// null bit for bit.
    pub fn generate(&self, n_obs: usize, seed: u64) -> Result<DataMatrix> {
        self.validate()?;
        if n_obs < 2 {
            return Err(Error::InsufficientObservations {
                message: "generation needs at least 2 observations".into(),
                got: n_obs,
            });
        }
        let (p1, p2) = (self.p1(), self.p2());
        let gamma = self.gamma();
        let theta = self.theta();
        let contaminate = theta != 0.0;
        let gamma_dist = if contaminate {
            let shape = match *self {
                TruthModel::Contaminated { shape, .. } => shape,
                _ => unreachable!("theta > 0 only occurs on the contaminated variant"),
            };
            Some((Gamma::new(shape, 1.0).map_err(|e| Error::InvalidParameter {
                name: "shape",
                message: format!("gamma distribution rejected the shape: {e}"),
                value: format!("{shape}"),
            })?, shape))
        } else {
            None
        };

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w1 = vec![0.0f64; p1];
        let mut w2 = vec![0.0f64; p2];
        let mut rows = Array2::<f64>::zeros((n_obs, p1 + p2));
        for mut row in rows.rows_mut() {
            fill_latent(&mut rng, &mut w1, theta, &gamma_dist);
            fill_latent(&mut rng, &mut w2, theta, &gamma_dist);
            for j in 0..p1 {
                row[j] = w1[j] + gamma * w2[j];
            }
            for j in 0..p2 {
                row[p1 + j] = (1.0 + gamma) * w2[j];
            }
        }
        DataMatrix::new(rows)
    }
}

/// Fill a latent coordinate buffer: standard normals first, then (only if
/// contaminating) one standardized gamma perturbation per coordinate.
fn fill_latent(
    rng: &mut ChaCha8Rng,
    buf: &mut [f64],
    theta: f64,
    gamma_dist: &Option<(Gamma<f64>, f64)>,
) {
    for w in buf.iter_mut() {
        *w = StandardNormal.sample(rng);
    }
    if let Some((dist, shape)) = gamma_dist {
        let scale = shape.sqrt();
        for w in buf.iter_mut() {
            let g: f64 = dist.sample(rng);
            *w += theta * (g - shape) / scale;
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma",
            message: "coupling strength must be finite and non-negative".into(),
            value: format!("{gamma}"),
        });
    }
    Ok(())
}

fn check_latent_widths(p1: usize, p2: usize) -> Result<()> {
    if p1 > p2 {
        return Err(Error::InvalidParameter {
            name: "p1",
            message: "coupled models require p1 <= p2 (the first block reuses the second block's latent factor)"
                .into(),
            value: format!("p1 = {p1}, p2 = {p2}"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn validation_rules() {
        assert!(TruthModel::null_identity(0, 5).is_err());
        assert!(TruthModel::mixture(6, 5, 0.3).is_err(), "p1 > p2 must fail");
        assert!(TruthModel::mixture(2, 5, -0.1).is_err());
        assert!(TruthModel::contaminated(2, 5, 0.3, -1.0, 3.0).is_err());
        assert!(TruthModel::contaminated(2, 5, 0.3, 1.0, 0.0).is_err());
        assert!(TruthModel::contaminated(2, 5, 0.3, 1.0, 3.0).is_ok());
        // The null model has no p1 <= p2 restriction.
        assert!(TruthModel::null_identity(6, 5).is_ok());
    }

    #[test]
    fn null_flags() {
        assert!(TruthModel::null_identity(2, 5).unwrap().is_null());
        assert!(TruthModel::mixture(2, 5, 0.0).unwrap().is_null());
        assert!(!TruthModel::mixture(2, 5, 0.4).unwrap().is_null());
        assert!(TruthModel::contaminated(2, 5, 0.0, 2.0, 3.0).unwrap().is_null());
    }

    #[test]
    fn covariance_targets_mixture() {
        // gamma = 0.5: Var(X) = 1.25, Var(Y) = 2.25, Cov = 0.75 on the
        // first p1 diagonal pairs.
        let m = TruthModel::mixture(3, 20, 0.5).unwrap();
        assert_abs_diff_eq!(m.sigma_xx()[[0, 0]], 1.25, epsilon = 1e-15);
        assert_abs_diff_eq!(m.sigma_yy()[[0, 0]], 2.25, epsilon = 1e-15);
        assert_abs_diff_eq!(m.sigma_xy()[[1, 1]], 0.75, epsilon = 1e-15);
        assert_eq!(m.sigma_xy()[[0, 5]], 0.0);
        assert_abs_diff_eq!(m.target_cross_trace(), 3.0 * 0.5625, epsilon = 1e-12);
        assert_abs_diff_eq!(m.target_xx_trace(), 4.6875, epsilon = 1e-12);
        assert_abs_diff_eq!(m.target_yy_trace(), 101.25, epsilon = 1e-12);
    }

    #[test]
    fn covariance_targets_scale_with_contamination() {
        let base = TruthModel::mixture(2, 5, 0.3).unwrap();
        let cont = TruthModel::contaminated(2, 5, 0.3, 2.0, 3.0).unwrap();
        let scale = 5.0; // 1 + theta^2
        assert_abs_diff_eq!(
            cont.sigma_xy()[[0, 0]],
            scale * base.sigma_xy()[[0, 0]],
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            cont.target_cross_trace(),
            scale * scale * base.target_cross_trace(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn generation_is_deterministic() {
        let m = TruthModel::contaminated(2, 4, 0.5, 1.0, 3.0).unwrap();
        let a = m.generate(10, 77).unwrap();
        let b = m.generate(10, 77).unwrap();
        assert_eq!(a, b);
        let c = m.generate(10, 78).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn null_equals_mixture_at_zero_gamma() {
        let null = TruthModel::null_identity(3, 7).unwrap();
        let mix = TruthModel::mixture(3, 7, 0.0).unwrap();
        assert_eq!(null.generate(12, 5).unwrap(), mix.generate(12, 5).unwrap());
    }

    #[test]
    fn mixture_equals_contaminated_at_zero_theta() {
        let mix = TruthModel::mixture(3, 7, 0.4).unwrap();
        let cont = TruthModel::contaminated(3, 7, 0.4, 0.0, 3.0).unwrap();
        assert_eq!(mix.generate(12, 5).unwrap(), cont.generate(12, 5).unwrap());
    }

    #[test]
    fn generated_shape_and_latent_sharing() {
        let m = TruthModel::mixture(2, 6, 0.9).unwrap();
        let d = m.generate(25, 3).unwrap();
        assert_eq!(d.n_observations(), 25);
        assert_eq!(d.n_variables(), 8);
        // The latent coordinates W2 are recoverable exactly from Y, and the
        // residual X_j - gamma * W2_j must be the *same* draw as the null
        // model's X block would produce from this seed (draw-order pinning):
        // at gamma = 0 the generator emits W1 directly.
        let null = TruthModel::mixture(2, 6, 0.0).unwrap().generate(25, 3).unwrap();
        let g = 0.9;
        for i in 0..25 {
            for j in 0..2 {
                let w2 = d.values()[[i, 2 + j]] / (1.0 + g);
                let w1 = d.values()[[i, j]] - g * w2;
                assert_abs_diff_eq!(w1, null.values()[[i, j]], epsilon = 1e-12);
            }
            for j in 0..6 {
                let w2 = d.values()[[i, 2 + j]] / (1.0 + g);
                assert_abs_diff_eq!(w2, null.values()[[i, 2 + j]], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn sample_moments_approach_targets() {
        // 40k observations of a contaminated model: sample variances and the
        // planted cross-covariance land near their targets (3-sigma-ish
        // bands, deterministic seed).
        let m = TruthModel::contaminated(2, 3, 0.5, 1.0, 3.0).unwrap();
        let d = m.generate(40_000, 99).unwrap();
        let (s, _n) = crate::cov::sample_covariance(&d);
        let scale = 2.0; // 1 + theta^2
        // Var(X_0) = 1.25 * 2 = 2.5; Var(Y_0) = 2.25 * 2 = 4.5; Cov = 1.5.
        assert_abs_diff_eq!(s[[0, 0]], 2.5, epsilon = 0.15);
        assert_abs_diff_eq!(s[[2, 2]], 4.5, epsilon = 0.25);
        assert_abs_diff_eq!(s[[0, 2]], 0.75 * scale, epsilon = 0.15);
        // Off-diagonal cross terms are zero in truth.
        assert_abs_diff_eq!(s[[0, 3]], 0.0, epsilon = 0.15);
    }
}
