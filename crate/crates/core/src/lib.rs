//! Exact laboratory for Value-at-Risk subadditivity and comonotonicity.
//!
//! Every law here is a finite discrete distribution on the rationals, and
//! all probability arithmetic is exact. That makes statements quantified
//! over every confidence level `alpha in (0, 1)` finitely decidable: the
//! quantile functions involved are left-continuous step functions, so one
//! evaluation per interval between jump levels covers the whole range.
//!
//! * [`dist`]: discrete and joint discrete laws, CDFs, quantiles, sums.
//! * [`risk`]: VaR, stop-loss transform, convex order.
//! * [`comonotone`]: comonotonicity detectors and the quantile coupling.
//! * [`theorem`]: all-level subadditivity reports, equivalence trials and
//!   seeded instance generators.
//! * [`elliptic`]: the Gaussian case in floating point.

pub mod comonotone;
pub mod dist;
pub mod elliptic;
pub mod error;
pub mod rational;
pub mod risk;
pub mod theorem;

pub use comonotone::{
    comonotonic_coupling, e4_check, is_comonotonic, is_comonotonic_support, min_copula_check,
    ComonotoneVerdict,
};
pub use dist::{Atom, DiscreteDistribution, JointDiscreteDistribution, JointPoint, MAX_JOINT_POINTS};
pub use error::{Error, Result};
pub use rational::{Rational, Relation};
pub use risk::{convex_order_leq, stop_loss, var, ConvexOrderVerdict};
pub use theorem::{
    bernoulli_counterexample, check_subadditivity_all_alpha, critical_alphas, random_comonotonic,
    random_coupling, theorem_equivalence_trial, GeneratorSpec, SubadditivityReport, TrialVerdict,
};
