//! Tower constructions for actions of countable amenable groups.
//!
//! The crate builds and verifies sequences of nested finite subsets
//! `(F_n, C_{n+1})` in a concrete group, realizes the locally compact space
//! they generate through its cylinder base with exact rational measures,
//! samples Poisson point configurations on compact-open windows of that
//! space, and estimates freeness, entropy bounds, and mixing decay for the
//! induced probability-preserving system on configurations.
//!
//! Module map:
//!
//! - [`group`]: canonical-form arithmetic, enumeration, and element orders
//!   for the group catalog (integer lattices, infinite sums of finite cyclic
//!   groups, lamplighter over the integers).
//! - [`set`]: exact finite-set algebra (products, inverses, disjointness,
//!   cardinality) with symbolic representations that stay closed under the
//!   operations the verifiers need.
//! - [`builder`]: greedy tower construction plus exact verifiers for every
//!   combinatorial condition, with per-level reports and per-element
//!   displacement/stabilizer certificates.
//! - [`space`]: cylinders, windows, truncated points, the partial action
//!   with level promotion, and exact intersection-measure intervals.
//! - [`suspension`]: Poisson configuration sampling on windows, counts,
//!   pushforwards, and Poisson pmf/entropy numerics.
//! - [`estimators`]: exact and Monte Carlo checks of freeness, the entropy
//!   upper bound, and correlation decay, plus a chi-square fit test for the
//!   sampler.

pub mod builder;
pub mod estimators;
pub mod group;
pub mod set;
pub mod space;
pub mod suspension;

/// Exact rational scalar used for all measures and ratios.
pub type Ratio = num_rational::BigRational;

pub use builder::{build_sequence, BuildOptions, CfSequence};
pub use group::{Group, GroupDescriptor, GroupElement};
pub use space::{Cylinder, TruncatedPoint, Window};
pub use suspension::{Configuration, CountEvent};

pub(crate) fn ratio_from_biguint(n: &num_bigint::BigUint) -> Ratio {
    Ratio::from_integer(num_bigint::BigInt::from(n.clone()))
}

pub(crate) fn ratio_u64(n: u64) -> Ratio {
    Ratio::from_integer(num_bigint::BigInt::from(n))
}
