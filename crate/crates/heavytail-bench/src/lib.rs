//! Shared fixtures for the benchmark targets.

use heavytail::{DensityKind, DensityModel, Weights};

pub fn abs_model() -> DensityModel {
    DensityModel::new(DensityKind::AbsRatio, 0.5, Weights::pair(0.3).unwrap()).unwrap()
}

pub fn bm_model() -> DensityModel {
    DensityModel::new(DensityKind::StoppedBm, 0.5, Weights::pair(0.5).unwrap()).unwrap()
}
