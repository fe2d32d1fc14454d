//! Exact all-level subadditivity checks and the comonotonicity equivalence.
//!
//! For a joint law `j` the statement "`VaR_a(X_1 + ... + X_n) <= sum_i
//! VaR_a(X_i)` for every `a in (0, 1)`" only involves `n + 1` quantile
//! functions. Each is a left-continuous step function that jumps at its
//! cumulative-probability levels, so all of them are constant on every
//! interval `(b_{k-1}, b_k]` of the merged level set and take their value at
//! the right endpoint. Evaluating once per interval decides the statement
//! exactly.

use std::collections::{BTreeSet, HashMap};

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::comonotone::{comonotonic_coupling, is_comonotonic};
use crate::dist::{DiscreteDistribution, JointDiscreteDistribution, MAX_JOINT_POINTS};
use crate::error::{Error, Result};
use crate::rational::{common_denominator, Rational, Relation};

/// Sorted union of the jump levels of every marginal quantile function and
/// of the quantile function of the sum. All lie in `(0, 1]`; the last is 1.
pub fn critical_alphas(j: &JointDiscreteDistribution) -> Vec<Rational> {
    let mut levels: BTreeSet<Rational> = j.marginals().iter().flat_map(|m| m.breakpoints()).collect();
    levels.extend(j.sum_distribution().breakpoints());
    levels.into_iter().collect()
}

/// Comparison of both sides of the subadditivity inequality on one
/// interval `(interval_start, alpha_star]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalVerdict {
    pub interval_start: Rational,
    pub alpha_star: Rational,
    pub var_sum: Rational,
    pub sum_of_vars: Rational,
    pub relation: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubadditivityReport {
    pub breakpoints: Vec<Rational>,
    pub verdicts: Vec<IntervalVerdict>,
    pub subadditive_everywhere: bool,
    pub additive_everywhere: bool,
    /// Right endpoint of the first interval where `VaR(sum) > sum of VaRs`.
    pub first_violation: Option<Rational>,
}

impl SubadditivityReport {
    /// The verdict whose interval contains `alpha`.
    pub fn verdict_at(&self, alpha: &Rational) -> Option<&IntervalVerdict> {
        self.verdicts
            .iter()
            .find(|v| &v.interval_start < alpha && alpha <= &v.alpha_star)
    }
}

pub fn check_subadditivity_all_alpha(j: &JointDiscreteDistribution) -> SubadditivityReport {
    let marginals = j.marginals();
    let sum = j.sum_distribution();
    let breakpoints = critical_alphas(j);

    let sum_vars = sum.quantiles_sorted(&breakpoints);
    let column_vars: Vec<Vec<&Rational>> = marginals.iter().map(|m| m.quantiles_sorted(&breakpoints)).collect();

    let mut verdicts = Vec::with_capacity(breakpoints.len());
    let mut start = Rational::zero();
    for (k, b) in breakpoints.iter().enumerate() {
        let var_sum = sum_vars[k].clone();
        let sum_of_vars: Rational = column_vars.iter().map(|col| col[k]).sum();
        let relation = Relation::of(&var_sum, &sum_of_vars);
        verdicts.push(IntervalVerdict {
            interval_start: start,
            alpha_star: b.clone(),
            var_sum,
            sum_of_vars,
            relation,
        });
        start = b.clone();
    }

    let first_violation = verdicts
        .iter()
        .find(|v| v.relation == Relation::Greater)
        .map(|v| v.alpha_star.clone());
    SubadditivityReport {
        subadditive_everywhere: first_violation.is_none(),
        additive_everywhere: verdicts.iter().all(|v| v.relation == Relation::Equal),
        first_violation,
        breakpoints,
        verdicts,
    }
}

/// Comonotonicity, all-level subadditivity and all-level additivity must
/// coincide for every joint law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialVerdict {
    pub comonotonic: bool,
    pub subadditive_everywhere: bool,
    pub additive_everywhere: bool,
    pub consistent: bool,
}

pub fn theorem_equivalence_trial(j: &JointDiscreteDistribution) -> TrialVerdict {
    let comonotonic = is_comonotonic(j).comonotonic;
    let report = check_subadditivity_all_alpha(j);
    TrialVerdict {
        comonotonic,
        subadditive_everywhere: report.subadditive_everywhere,
        additive_everywhere: report.additive_everywhere,
        consistent: comonotonic == report.subadditive_everywhere
            && report.subadditive_everywhere == report.additive_everywhere,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BernoulliCounterexample {
    /// `(1 - p)(1 - q) < alpha < 1 - max(p, q)`.
    pub precondition: bool,
    pub var_sum: Rational,
    pub sum_of_vars: Rational,
    /// `VaR(X + Y) > VaR(X) + VaR(Y)`.
    pub superadditive: bool,
}

/// VaR of independent `Bern(p)` and `Bern(q)` losses against VaR of their
/// sum.
///
/// The left inequality of the precondition is strict: at
/// `alpha = (1 - p)(1 - q)` the sum still has `F(0) >= alpha`, so both sides
/// are zero.
pub fn bernoulli_counterexample(p: &Rational, q: &Rational, alpha: &Rational) -> Result<BernoulliCounterexample> {
    for x in [p, q] {
        if !x.in_unit_open() {
            return Err(Error::ParameterOutOfRange(x.clone()));
        }
    }
    if !alpha.in_unit_open() {
        return Err(Error::LevelOutOfRange(alpha.clone()));
    }
    let x = DiscreteDistribution::bernoulli(p.clone())?;
    let y = DiscreteDistribution::bernoulli(q.clone())?;
    let sum = JointDiscreteDistribution::independent(&[x.clone(), y.clone()])?.sum_distribution();

    let one = Rational::one();
    let lower = (&one - p) * (&one - q);
    let upper = &one - std::cmp::max(p, q);
    let precondition = &lower < alpha && alpha < &upper;

    let var_sum = sum.quantile(alpha)?;
    let sum_of_vars = x.quantile(alpha)? + y.quantile(alpha)?;
    Ok(BernoulliCounterexample {
        precondition,
        superadditive: var_sum > sum_of_vars,
        var_sum,
        sum_of_vars,
    })
}

/// Shape of randomly drawn instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorSpec {
    /// Number of coordinates.
    pub n: usize,
    /// Upper bound on atoms per marginal.
    pub max_atoms: usize,
    /// Inclusive range the atom values are drawn from.
    pub value_range: (i64, i64),
    /// Upper bound on probability and value denominators.
    pub denom_bound: u32,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            n: 2,
            max_atoms: 8,
            value_range: (-10, 10),
            denom_bound: 16,
        }
    }
}

impl GeneratorSpec {
    pub fn with_n(n: usize) -> Self {
        GeneratorSpec { n, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("n must be at least 1".into()));
        }
        if self.max_atoms == 0 {
            return Err(Error::InvalidSpec("max_atoms must be at least 1".into()));
        }
        if self.denom_bound == 0 {
            return Err(Error::InvalidSpec("denom_bound must be at least 1".into()));
        }
        if self.value_range.0 > self.value_range.1 {
            return Err(Error::InvalidSpec(format!(
                "empty value range [{}, {}]",
                self.value_range.0, self.value_range.1
            )));
        }
        Ok(())
    }
}

/// One random marginal: `k` atoms whose probabilities share a denominator
/// `d <= denom_bound`, and values `a / b` in `value_range` with
/// `b <= denom_bound` (integers half of the time).
pub fn random_marginal<R: Rng + ?Sized>(rng: &mut R, spec: &GeneratorSpec) -> Result<DiscreteDistribution> {
    spec.validate()?;
    let bound = spec.denom_bound as i64;
    let k = rng.gen_range(1..=spec.max_atoms).min(spec.denom_bound as usize);
    let d = rng.gen_range(k as i64..=bound);

    // Random composition of d into k positive parts.
    let mut cuts: Vec<i64> = rand::seq::index::sample(rng, (d - 1) as usize, k - 1)
        .into_iter()
        .map(|c| c as i64 + 1)
        .collect();
    cuts.sort_unstable();
    cuts.push(d);
    let mut prev = 0;
    let (lo, hi) = spec.value_range;
    let mut pairs = Vec::with_capacity(k);
    for cut in cuts {
        let weight = Rational::new(cut - prev, d);
        prev = cut;
        let b = if bound == 1 || rng.gen_bool(0.5) { 1 } else { rng.gen_range(2..=bound) };
        let a = rng.gen_range(lo * b..=hi * b);
        pairs.push((Rational::new(a, b), weight));
    }
    DiscreteDistribution::from_weighted_values(pairs)
}

/// The `n` marginals drawn by the generators for `seed`.
pub fn random_marginals(seed: u64, spec: &GeneratorSpec) -> Result<Vec<DiscreteDistribution>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw_marginals(&mut rng, spec)
}

fn draw_marginals<R: Rng + ?Sized>(rng: &mut R, spec: &GeneratorSpec) -> Result<Vec<DiscreteDistribution>> {
    spec.validate()?;
    (0..spec.n).map(|_| random_marginal(rng, spec)).collect()
}

/// Comonotonic coupling of the marginals drawn for `seed`.
pub fn random_comonotonic(seed: u64, spec: &GeneratorSpec) -> Result<JointDiscreteDistribution> {
    comonotonic_coupling(&random_marginals(seed, spec)?)
}

/// A random member of the Fréchet class of the marginals drawn for `seed`.
///
/// Each marginal is laid out on `D` cells of width `1/D`, where `D` is the
/// common denominator of all marginal probabilities, and the cells of each
/// coordinate are shuffled independently before being matched.
pub fn random_coupling(seed: u64, spec: &GeneratorSpec) -> Result<JointDiscreteDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let marginals = draw_marginals(&mut rng, spec)?;
    let cells = unit_cell_count(&marginals)?;
    let permutations: Vec<Vec<usize>> = (0..marginals.len())
        .map(|_| {
            let mut perm: Vec<usize> = (0..cells).collect();
            perm.shuffle(&mut rng);
            perm
        })
        .collect();
    transport_plan(&marginals, &permutations)
}

/// Number of unit cells on the common-denominator grid of `marginals`.
pub fn unit_cell_count(marginals: &[DiscreteDistribution]) -> Result<usize> {
    let denom = common_denominator(marginals.iter().flat_map(|m| m.atoms().iter().map(|a| &a.prob)));
    denom
        .to_usize()
        .filter(|&d| d <= MAX_JOINT_POINTS)
        .ok_or(Error::TooManyPoints { limit: MAX_JOINT_POINTS })
}

/// Couples `marginals` by matching unit cells: cell `k` of the output takes
/// coordinate `i` from cell `permutations[i][k]` of marginal `i`. Identity
/// permutations give the comonotonic coupling.
pub fn transport_plan(
    marginals: &[DiscreteDistribution],
    permutations: &[Vec<usize>],
) -> Result<JointDiscreteDistribution> {
    if marginals.is_empty() {
        return Err(Error::EmptyInput);
    }
    let cells = unit_cell_count(marginals)?;
    let valid = permutations.len() == marginals.len()
        && permutations.iter().all(|p| {
            let mut seen = vec![false; cells];
            p.len() == cells && p.iter().all(|&c| c < cells && !std::mem::replace(&mut seen[c], true))
        });
    if !valid {
        return Err(Error::InvalidPermutation { expected: marginals.len(), len: cells });
    }

    // Atom index occupying each unit cell, per coordinate.
    let cell_atoms: Vec<Vec<usize>> = marginals
        .iter()
        .map(|m| {
            let mut out = Vec::with_capacity(cells);
            for (idx, a) in m.atoms().iter().enumerate() {
                let width = (&a.prob * Rational::from_integer(cells as i64))
                    .numer()
                    .to_usize()
                    .expect("probabilities are multiples of 1/cells");
                out.extend(std::iter::repeat_n(idx, width));
            }
            out
        })
        .collect();

    let mut counts: HashMap<Vec<usize>, i64> = HashMap::new();
    for k in 0..cells {
        let key: Vec<usize> = permutations
            .iter()
            .zip(&cell_atoms)
            .map(|(perm, atoms)| atoms[perm[k]])
            .collect();
        *counts.entry(key).or_default() += 1;
    }
    JointDiscreteDistribution::from_weighted_points(
        marginals.len(),
        counts.into_iter().map(|(key, count)| {
            let coords = key
                .iter()
                .zip(marginals)
                .map(|(&idx, m)| m.atoms()[idx].value.clone())
                .collect();
            (coords, Rational::from_integer(count))
        }),
    )
}
