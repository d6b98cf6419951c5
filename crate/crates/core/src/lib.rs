//! Analysis of the planar quintic Z6-equivariant system
//!
//! ```text
//! z' = (p1 + i p2) z^2 zbar + (s1 + i s2) z^3 zbar^2 - zbar^5
//! ```
//!
//! in its complex, cartesian and polar forms: equilibria and their
//! classification, stability of the origin and of infinity, the Abel reduction
//! used to bound the number of limit cycles, a Poincaré return map for locating
//! them, and no-contact polygonals.

pub mod abel;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod geometry;
pub mod model;
pub mod stability;

pub use abel::{region_report, sigma_thresholds, Certificate, RegionReport, SigmaThresholds};
pub use dynamics::{find_limit_cycle, return_map, scan_cycles, LimitCycle, ReturnMapSample};
pub use equilibria::{solve_equilibria, Equilibrium, EquilibriumKind};
pub use error::{Error, Result};
pub use model::{CartesianState, PolarState, SystemParams};
pub use stability::{infinity_report, origin_report, InfinityReport, OriginReport};
