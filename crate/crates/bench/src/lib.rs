//! Fixtures shared by the solver benchmarks.

use assign3d::matching::BipartiteCosts;
use assign3d::CostTensor;

/// The tensor every benchmark of size `n` runs on.
pub fn tensor(n: usize) -> CostTensor {
    CostTensor::generate(n, 3, 0xBE_4C).expect("benchmark sizes fit in memory")
}

/// First plane of [`tensor`] as a bipartite instance.
pub fn plane(n: usize) -> BipartiteCosts {
    let t = tensor(n);
    BipartiteCosts::new(n, t.plane(0).to_vec()).expect("square plane")
}
