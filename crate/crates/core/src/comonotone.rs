//! Comonotonicity: detection, the quantile-transform coupling, and the
//! min-copula and convex-order characterizations.
//!
//! Three detectors are provided and are deliberately computed along
//! unrelated routes so they can be cross-checked:
//!
//! * [`is_comonotonic`] inspects the support for a pair of points moving in
//!   opposite directions.
//! * [`min_copula_check`] compares the joint CDF with `min_i F_i(x_i)` on the
//!   full grid of marginal support values.
//! * [`e4_check`] compares the law of the coordinate sum with the law of the
//!   sum under the comonotonic coupling of the same marginals.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::dist::{DiscreteDistribution, JointDiscreteDistribution};
use crate::error::{Error, Result};
use crate::rational::{common_denominator, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComonotoneVerdict {
    pub comonotonic: bool,
    /// Two support points `x`, `y` with `x_i < y_i` and `x_j > y_j` for some
    /// coordinates `i`, `j`.
    pub witness: Option<(Vec<Rational>, Vec<Rational>)>,
}

impl ComonotoneVerdict {
    fn yes() -> Self {
        ComonotoneVerdict { comonotonic: true, witness: None }
    }

    fn no(x: &[Rational], y: &[Rational]) -> Self {
        ComonotoneVerdict {
            comonotonic: false,
            witness: Some((x.to_vec(), y.to_vec())),
        }
    }
}

fn componentwise_leq(x: &[Rational], y: &[Rational]) -> bool {
    x.iter().zip(y).all(|(a, b)| a <= b)
}

/// True when some coordinate rises strictly from `x` to `y` while another
/// falls strictly.
pub fn is_violating_pair(x: &[Rational], y: &[Rational]) -> bool {
    let rises = x.iter().zip(y).any(|(a, b)| a < b);
    let falls = x.iter().zip(y).any(|(a, b)| a > b);
    rises && falls
}

fn validate_points(points: &[Vec<Rational>]) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyInput)?;
    let n = first.len();
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if let Some((index, p)) = points.iter().enumerate().find(|(_, p)| p.len() != n) {
        return Err(Error::DimensionMismatch { index, expected: n, found: p.len() });
    }
    Ok(n)
}

/// Decides whether a finite point set is comonotonic.
///
/// Distinct points of a comonotonic set have distinct coordinate sums, and
/// the sum is a linear extension of the componentwise order. Sorting by sum
/// and checking consecutive pairs therefore decides the question in
/// `O(m log m + m n)`.
pub fn is_comonotonic_support(points: &[Vec<Rational>]) -> Result<ComonotoneVerdict> {
    validate_points(points)?;
    let distinct: BTreeSet<&Vec<Rational>> = points.iter().collect();
    let mut keyed: Vec<(Rational, &Vec<Rational>)> = distinct
        .into_iter()
        .map(|p| (p.iter().sum::<Rational>(), p))
        .collect();
    keyed.sort();
    for pair in keyed.windows(2) {
        let (x, y) = (pair[0].1, pair[1].1);
        if !componentwise_leq(x, y) {
            // sum(x) <= sum(y) and some x_j > y_j, so some x_i < y_i as well.
            return Ok(ComonotoneVerdict::no(x, y));
        }
    }
    Ok(ComonotoneVerdict::yes())
}

/// All-pairs form of [`is_comonotonic_support`]; `O(m^2 n)`. Kept as a
/// reference implementation for cross-checking.
pub fn is_comonotonic_support_pairwise(points: &[Vec<Rational>]) -> Result<ComonotoneVerdict> {
    validate_points(points)?;
    for (k, x) in points.iter().enumerate() {
        for y in &points[k + 1..] {
            if is_violating_pair(x, y) {
                return Ok(ComonotoneVerdict::no(x, y));
            }
        }
    }
    Ok(ComonotoneVerdict::yes())
}

/// Comonotonicity of a joint law: its support, which is exactly its point
/// list, is a comonotonic set.
pub fn is_comonotonic(j: &JointDiscreteDistribution) -> ComonotoneVerdict {
    let points: Vec<Vec<Rational>> = j.points().iter().map(|p| p.coords.clone()).collect();
    is_comonotonic_support(&points).expect("joint points are non-empty and share a dimension")
}

/// Joint law of `(F_1^{-1}(U), ..., F_n^{-1}(U))` for a uniform `U`.
///
/// Every quantile function is constant on each interval between consecutive
/// cumulative-probability breakpoints of the union, so one point per
/// interval, weighted by the interval length, gives the exact law.
pub fn comonotonic_coupling(marginals: &[DiscreteDistribution]) -> Result<JointDiscreteDistribution> {
    if marginals.is_empty() {
        return Err(Error::EmptyInput);
    }
    let levels: Vec<Rational> = marginals
        .iter()
        .flat_map(|m| m.breakpoints())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let columns: Vec<Vec<&Rational>> = marginals.iter().map(|m| m.quantiles_sorted(&levels)).collect();
    let mut previous = Rational::zero();
    let mut cells = Vec::with_capacity(levels.len());
    for (k, level) in levels.iter().enumerate() {
        let coords = columns.iter().map(|col| col[k].clone()).collect();
        cells.push((coords, level - &previous));
        previous = level.clone();
    }
    JointDiscreteDistribution::from_weighted_points(marginals.len(), cells)
}

/// Checks that the joint CDF is the min copula applied to the marginal CDFs
/// at every corner of the grid of marginal support values.
///
/// Cost is linear in the product of the marginal support sizes.
pub fn min_copula_check(j: &JointDiscreteDistribution) -> bool {
    let scale = common_denominator(j.points().iter().map(|p| &p.prob));
    match scale.to_u128() {
        Some(_) => copula_grid_matches::<u128>(j, &scale, |x| x.to_u128().expect("bounded by scale")),
        None => copula_grid_matches::<BigInt>(j, &scale, |x| x),
    }
}

/// Works in integer units of `1/scale`; every joint and marginal
/// probability is a multiple of that unit and never exceeds `scale` units.
fn copula_grid_matches<T>(j: &JointDiscreteDistribution, scale: &BigInt, to_units: impl Fn(BigInt) -> T) -> bool
where
    T: Clone + Zero + Ord + for<'a> std::ops::AddAssign<&'a T>,
{
    let units = |p: &Rational| -> T {
        let u = p.numer() * (scale / p.denom());
        to_units(u)
    };
    let marginals = j.marginals();
    let shape: Vec<usize> = marginals.iter().map(|m| m.len()).collect();
    let mut strides = vec![1usize; shape.len()];
    for a in (0..shape.len().saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * shape[a + 1];
    }
    let size = strides[0] * shape[0];

    let mut grid: Vec<T> = vec![T::zero(); size];
    for p in j.points() {
        let idx: usize = p
            .coords
            .iter()
            .zip(&marginals)
            .zip(&strides)
            .map(|((c, m), s)| {
                let rank = m
                    .atoms()
                    .binary_search_by(|a| a.value.cmp(c))
                    .expect("coordinate lies in its marginal support");
                rank * s
            })
            .sum();
        grid[idx] += &units(&p.prob);
    }

    // In-place prefix sums along each axis turn point masses into the
    // joint CDF evaluated at each grid corner.
    for (a, &stride) in strides.iter().enumerate() {
        for idx in 0..size {
            if (idx / stride) % shape[a] > 0 {
                let prev = grid[idx - stride].clone();
                grid[idx] += &prev;
            }
        }
    }

    let marginal_cdfs: Vec<Vec<T>> = marginals
        .iter()
        .map(|m| m.breakpoints().iter().map(&units).collect())
        .collect();
    grid.iter().enumerate().all(|(idx, joint_cdf)| {
        let upper = (0..shape.len())
            .map(|a| &marginal_cdfs[a][(idx / strides[a]) % shape[a]])
            .min()
            .expect("dimension >= 1");
        joint_cdf == upper
    })
}

/// Convex-order characterization: the law of `X_1 + ... + X_n` equals the
/// law of the sum under the comonotonic coupling of the same marginals.
///
/// The comonotonic sum is the maximum of the Fréchet class in convex order,
/// so `j` is itself maximal exactly when its sum has that law.
pub fn e4_check(j: &JointDiscreteDistribution) -> bool {
    let coupled = comonotonic_coupling(&j.marginals()).expect("joint has at least one marginal");
    j.sum_distribution() == coupled.sum_distribution()
}
