//! Base metrics between single-object densities.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::{Density, GaussianDensity};

/// Which distance `d_b` to use between single-object densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BaseMetricKind {
    /// 2-Wasserstein distance; Diracs are zero-covariance Gaussians.
    #[default]
    Wasserstein2,
    /// Euclidean distance between means, ignoring covariances.
    EuclideanMeans,
}

impl BaseMetricKind {
    pub fn name(&self) -> &'static str {
        match self {
            BaseMetricKind::Wasserstein2 => "wasserstein2",
            BaseMetricKind::EuclideanMeans => "euclidean",
        }
    }
}

impl std::str::FromStr for BaseMetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wasserstein2" | "w2" => Ok(BaseMetricKind::Wasserstein2),
            "euclidean" | "euclidean_means" => Ok(BaseMetricKind::EuclideanMeans),
            other => Err(Error::invalid(
                "base metric",
                format!("unknown kind `{other}`"),
            )),
        }
    }
}

pub fn base_distance(kind: BaseMetricKind, a: &Density, b: &Density) -> Result<f64> {
    match kind {
        BaseMetricKind::Wasserstein2 => wasserstein2(a, b),
        BaseMetricKind::EuclideanMeans => {
            check_dims(a, b)?;
            Ok(a.mean().distance_squared(b.mean()).sqrt())
        }
    }
}

/// Closed-form 2-Wasserstein distance between Gaussian or Dirac densities.
///
/// `W2^2 = |mu_a - mu_b|^2 + tr(S_a) + tr(S_b) - 2 tr((S_b^½ S_a S_b^½)^½)`.
/// The cross term is averaged over both operand orders so the result is
/// exactly symmetric in floating point.
pub fn wasserstein2(a: &Density, b: &Density) -> Result<f64> {
    check_dims(a, b)?;
    if a == b {
        return Ok(0.0);
    }
    let mean_sq = a.mean().distance_squared(b.mean());
    let sq = match (a, b) {
        (Density::Dirac(_), Density::Dirac(_)) => mean_sq,
        (Density::Gaussian(g), Density::Dirac(_)) | (Density::Dirac(_), Density::Gaussian(g)) => {
            mean_sq + g.covariance().trace()
        }
        (Density::Gaussian(ga), Density::Gaussian(gb)) => {
            let cross = 0.5 * (trace_sqrt_sandwich(gb, ga) + trace_sqrt_sandwich(ga, gb));
            mean_sq + (ga.covariance().trace() + gb.covariance().trace()) - 2.0 * cross
        }
    };
    Ok(sq.max(0.0).sqrt())
}

/// `tr((S_outer^½ S_inner S_outer^½)^½)`.
fn trace_sqrt_sandwich(outer: &GaussianDensity, inner: &GaussianDensity) -> f64 {
    let root = outer.sqrt_covariance();
    let m: DMatrix<f64> = root * inner.covariance() * root;
    let sym = (&m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .sum()
}

fn check_dims(a: &Density, b: &Density) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}
