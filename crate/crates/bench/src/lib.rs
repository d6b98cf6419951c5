//! Parameter points shared by the benchmarks.

use z6_core::abel::sigma_thresholds;
use z6_core::SystemParams;

pub const P2: f64 = -1.0;
pub const S1: f64 = -0.5;
pub const S2: f64 = 1.2;

pub fn example(p1: f64) -> SystemParams {
    SystemParams::new(p1, P2, S1, S2).expect("finite parameters")
}

/// The worked example at its outer threshold, where six saddle-nodes appear.
pub fn at_sigma_plus() -> SystemParams {
    let s = sigma_thresholds(&example(0.0)).expect("regular parameters");
    example(s.sigma_a_plus)
}
