//! Random feature maps and the kernels they approximate.
//!
//! A [`FeatureMap`] holds `M` sampled frequency rows. Applying it to an input
//! point yields a length-`M` vector whose Euclidean inner products approximate
//! a positive-definite kernel: the Gaussian kernel for cosine features, the
//! linear kernel for Gaussian sketches. The approximation is a Monte Carlo
//! average, so its error decays like `1/sqrt(M)`.
//!
//! Sampling is keyed per feature row: row `j` is drawn from an RNG stream
//! derived from `(seed, j)`, so maps with the same seed agree bit-for-bit and
//! row sampling is independent of evaluation order.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kernel family a feature map approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    /// Cosine features `sqrt(2/M) cos(xi * w.x + b)` with `w` standard normal
    /// and `b` uniform on `[0, 2pi)`; approximates the Gaussian kernel
    /// `exp(-xi^2 ||x - x'||^2 / 2)`.
    GaussianRff,
    /// Linear sketch `(1/sqrt(M)) w.x` with `w` standard normal; approximates
    /// the linear kernel `x.x'`. The bandwidth multiplier is unused.
    LinearSketch,
}

impl FeatureKind {
    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::GaussianRff => "gaussian_rff",
            FeatureKind::LinearSketch => "linear_sketch",
        }
    }
}

/// A sampled finite-dimensional feature map `R^D -> R^M`.
///
/// Immutable after sampling; safe to share across threads. `apply` and the
/// covariance helpers are pure functions of the stored parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureMap {
    pub kind: FeatureKind,
    /// Sampled frequency/direction rows, `M x D`, standard normal entries.
    pub w: DMatrix<f64>,
    /// Phase offsets in `[0, 2pi)`; present only for cosine features.
    pub b: Option<DVector<f64>>,
    /// Bandwidth multiplier applied to `w.x` at evaluation time.
    pub xi: f64,
    /// Seed the rows were derived from.
    pub seed: u64,
    /// Drop the `sqrt(2)` factor on cosine features (amplitude bound becomes 1
    /// instead of sqrt(2), and inner products approximate half the Gaussian
    /// kernel). Off by default.
    pub legacy_scaling: bool,
}

/// Sample a feature map. Row `j` of `w` (and offset `j` when present) comes
/// from RNG stream `j` of `seed`, so identical seeds reproduce the map exactly.
pub fn sample_feature_map(
    kind: FeatureKind,
    input_dim: usize,
    num_features: usize,
    xi: f64,
    seed: u64,
) -> Result<FeatureMap> {
    if input_dim == 0 {
        return Err(Error::parameter("input_dim", "must be at least 1"));
    }
    if num_features == 0 {
        return Err(Error::parameter("num_features", "must be at least 1"));
    }
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::parameter("xi", "must be a positive finite number"));
    }

    let mut w = DMatrix::<f64>::zeros(num_features, input_dim);
    let mut b = (kind == FeatureKind::GaussianRff).then(|| DVector::<f64>::zeros(num_features));
    for j in 0..num_features {
        let mut rng = row_rng(seed, j);
        for d in 0..input_dim {
            w[(j, d)] = rng.sample(StandardNormal);
        }
        if let Some(offsets) = b.as_mut() {
            offsets[j] = rng.random_range(0.0..TAU);
        }
    }

    Ok(FeatureMap {
        kind,
        w,
        b,
        xi,
        seed,
        legacy_scaling: false,
    })
}

fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64 + 1);
    rng
}

impl FeatureMap {
    pub fn num_features(&self) -> usize {
        self.w.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.w.ncols()
    }

    pub fn with_legacy_scaling(mut self, on: bool) -> Self {
        self.legacy_scaling = on;
        self
    }

    /// Uniform bound on a single feature component times `sqrt(M)`, i.e. the
    /// amplitude `kappa` with `sup |psi| <= kappa`. `None` for linear sketches,
    /// which are unbounded.
    pub fn psi_bound(&self) -> Option<f64> {
        match self.kind {
            FeatureKind::GaussianRff => Some(if self.legacy_scaling {
                1.0
            } else {
                std::f64::consts::SQRT_2
            }),
            FeatureKind::LinearSketch => None,
        }
    }

    fn amplitude(&self) -> f64 {
        let m = self.num_features() as f64;
        match self.kind {
            FeatureKind::GaussianRff => {
                if self.legacy_scaling {
                    (1.0 / m).sqrt()
                } else {
                    (2.0 / m).sqrt()
                }
            }
            FeatureKind::LinearSketch => (1.0 / m).sqrt(),
        }
    }

    /// Evaluate the map at a single point.
    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::dimension(format!(
                "input has length {}, map expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        let mut z = &self.w * x;
        self.finish(&mut z);
        Ok(z)
    }

    /// Evaluate the map at every row of `xs` (`N x D`), returning the `N x M`
    /// feature matrix.
    pub fn apply_matrix(&self, xs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if xs.ncols() != self.input_dim() {
            return Err(Error::dimension(format!(
                "inputs have dimension {}, map expects {}",
                xs.ncols(),
                self.input_dim()
            )));
        }
        let mut z = xs * self.w.transpose();
        let scale = self.amplitude();
        match self.kind {
            FeatureKind::GaussianRff => {
                let b = self.b.as_ref().expect("cosine map carries offsets");
                for j in 0..z.ncols() {
                    let bj = b[j];
                    for i in 0..z.nrows() {
                        z[(i, j)] = scale * (self.xi * z[(i, j)] + bj).cos();
                    }
                }
            }
            FeatureKind::LinearSketch => z.scale_mut(scale),
        }
        Ok(z)
    }

    fn finish(&self, z: &mut DVector<f64>) {
        let scale = self.amplitude();
        match self.kind {
            FeatureKind::GaussianRff => {
                let b = self.b.as_ref().expect("cosine map carries offsets");
                for j in 0..z.len() {
                    z[j] = scale * (self.xi * z[j] + b[j]).cos();
                }
            }
            FeatureKind::LinearSketch => z.scale_mut(scale),
        }
    }

    /// Serialize to a self-describing JSON blob (kind, dimensions, xi, seed,
    /// sampled rows and offsets) sufficient to reproduce any run exactly.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<FeatureMap> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Closed-form kernel value for the given family.
///
/// Gaussian: `exp(-xi^2 ||x - x'||^2 / 2)`, matching the convention that the
/// feature map multiplies frequencies by `xi` at evaluation time. Linear:
/// `x.x'`.
pub fn kernel_exact(kind: FeatureKind, x: &DVector<f64>, x2: &DVector<f64>, xi: f64) -> Result<f64> {
    if x.len() != x2.len() {
        return Err(Error::dimension(format!(
            "kernel arguments have lengths {} and {}",
            x.len(),
            x2.len()
        )));
    }
    Ok(match kind {
        FeatureKind::GaussianRff => {
            let d2 = (x - x2).norm_squared();
            (-xi * xi * d2 / 2.0).exp()
        }
        FeatureKind::LinearSketch => x.dot(x2),
    })
}

/// Monte Carlo kernel value `<phi(x), phi(x')>` under the given map.
pub fn kernel_approx(map: &FeatureMap, x: &DVector<f64>, x2: &DVector<f64>) -> Result<f64> {
    Ok(map.apply(x)?.dot(&map.apply(x2)?))
}

/// Empirical second-moment operator `(1/m) sum_i phi(x_i) phi(x_i)^T` of the
/// feature vectors of the rows of `xs`. Symmetric positive semidefinite; for
/// bounded features its trace is at most `kappa^2`.
pub fn empirical_covariance(map: &FeatureMap, xs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if xs.nrows() == 0 {
        return Err(Error::parameter("xs", "needs at least one sample row"));
    }
    let phi = map.apply_matrix(xs)?;
    let mut c = phi.transpose() * &phi;
    c.scale_mut(1.0 / xs.nrows() as f64);
    // symmetrize away accumulation asymmetry
    let ct = c.transpose();
    c = (c + ct) * 0.5;
    Ok(c)
}
