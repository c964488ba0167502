//! Benchmark fixtures shared by the criterion targets.

use gclab_core::generators::{MarkovChainSpec, StationaryModel};
use gclab_core::Path;

/// Gaussian AR(1) path used by the sup-deviation benchmarks.
pub fn ar1_path(n: usize) -> Path {
    StationaryModel::gaussian_ar1(0.6)
        .expect("valid rho")
        .sample(n, 11)
        .expect("positive length")
}

/// A 6-state birth-death chain with a small spectral gap.
pub fn slow_chain() -> MarkovChainSpec {
    let s = 6;
    let transition = (0..s)
        .map(|i| {
            let mut row = vec![0.0; s];
            let down = if i > 0 { 0.1 } else { 0.0 };
            let up = if i + 1 < s { 0.1 } else { 0.0 };
            if i > 0 {
                row[i - 1] = down;
            }
            if i + 1 < s {
                row[i + 1] = up;
            }
            row[i] = 1.0 - down - up;
            row
        })
        .collect();
    MarkovChainSpec::new(transition, (0..s).map(|v| v as f64).collect()).expect("valid chain")
}
