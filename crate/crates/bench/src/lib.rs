//! Fixed problem instances shared by the benchmarks.

use covshift_core::experiments::{gen_sim1, gen_sim2, Sim1Config, Sim2Case, Sim2Config};
use covshift_core::{weights_from_exact, ClipBounds, RatioWeights, RngSeed, SplitDataset};

/// Simulation 1 data with exact (clipped) density-ratio weights.
pub fn sim1_problem(n_labeled: usize, seed: u64) -> (SplitDataset, RatioWeights) {
    let cfg = Sim1Config::new(n_labeled);
    let data = gen_sim1(&cfg, RngSeed(seed)).expect("valid configuration");
    let weights = weights_from_exact(
        &cfg.label_density,
        &cfg.unlabel_density,
        &data,
        ClipBounds::default(),
    )
    .expect("matching dimensions");
    (data, weights)
}

/// Simulation 2 data for `case` (1, 2 or 3).
pub fn sim2_data(case: u8, seed: u64) -> SplitDataset {
    let case = Sim2Case::from_index(case).expect("case is 1, 2 or 3");
    gen_sim2(&Sim2Config::new(case), RngSeed(seed)).expect("valid configuration")
}
