//! Best purely atomic approximations of probability measures on the real
//! line under the ε-Lévy metric.

pub mod asymptotics;
pub mod bisect;
pub mod distributions;
pub mod error;
pub mod levy;
pub mod monotone;
pub mod oracle;
pub mod quadrature;
pub mod quantizer;

pub use asymptotics::{
    limit_best, limit_uniform, point_density, second_order_best, second_order_uniform, AsymptoticReport, BestExpansion,
    PointDensity,
};
pub use distributions::{DistributionSpec, FamilyRegistry, Mass};
pub use error::{LevyError, Result};
pub use levy::{distance_general, distance_to_atomic, ell, ell_star, AtomicMeasure, IntervalX};
pub use monotone::{invert, MonotoneMap, StepMap};
pub use oracle::{brute_force_best, empirical_point_check, GridConfig, OracleResult};
pub use quantizer::{
    best_locations_given_weights, best_unconstrained, best_uniform, best_weights_given_locations, certify,
    ApproxResult, Certificate, Quantizer, QuantizerRegistry,
};
