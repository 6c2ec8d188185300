//! Test-suite redundancy reduction.
//!
//! A test suite is modelled as an [`Instance`]: tests plus requirements,
//! each requirement listing the tests that can satisfy it. Solvers search
//! for a small representative set that still satisfies every requirement:
//!
//! * [`fis`]: population search whose operator is maintained or changed by
//!   Mamdani fuzzy inference ([`fuzzy`]),
//! * [`baselines`]: GE, GRE, HGS and simulated annealing,
//! * [`oracle`]: exact minimum cover by branch and bound.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, with `*F32` variants for single precision.

pub mod baselines;
pub mod bench;
pub mod bitset;
pub mod corpus;
pub mod fis;
pub mod fuzzy;
pub mod io;
pub mod operators;
pub mod oracle;
pub mod problem;
pub mod scalar;

pub use corpus::{builtin, BUILTIN_NAMES};
pub use io::{parse_instance, parse_report, write_report, InstanceDocument, RunReport};
pub use operators::Operator;
pub use problem::{
    is_cover, reduction_percent, validate_instance, Instance, Permutation, Reduction, Requirement,
    Solution,
};
pub use scalar::Scalar;

pub type Trapezoid = fuzzy::Trapezoid<f64>;
pub type TrapezoidF32 = fuzzy::Trapezoid<f32>;
pub type LinguisticVariable = fuzzy::LinguisticVariable<f64>;
pub type LinguisticVariableF32 = fuzzy::LinguisticVariable<f32>;
pub type RuleBase = fuzzy::RuleBase<f64>;
pub type RuleBaseF32 = fuzzy::RuleBase<f32>;
pub type FisSolver<'a> = fis::FisSolver<'a, f64>;
pub type FisSolverF32<'a> = fis::FisSolver<'a, f32>;
pub type Selection = fis::Selection<f64>;

/// Exact reduction ratio type.
pub type Fraction = num_rational::Ratio<u64>;
