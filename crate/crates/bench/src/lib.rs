//! Shared fixtures for the criterion benches.

use qbp_core::{sample_disk, Complex64, DiskGrid, QParams};

/// Parameter pairs spanning fast convergence (small q) to slow (q near 1).
pub const PARAMS: [(f64, f64); 3] = [(0.1, 1.0), (0.5, 1.0), (0.9, -0.5)];

pub fn params(q: f64, nu: f64) -> QParams {
    QParams::new(q, nu).expect("fixture parameters are valid")
}

pub fn points() -> Vec<Complex64> {
    sample_disk(&DiskGrid::default()).expect("default grid is valid")
}
