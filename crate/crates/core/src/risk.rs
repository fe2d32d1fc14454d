//! Value at Risk, the stop-loss transform and the convex order.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::dist::DiscreteDistribution;
use crate::error::Result;
use crate::rational::Rational;

/// `VaR_alpha(X) = inf { x : F_X(x) >= alpha }` for `0 < alpha < 1`.
pub fn var(d: &DiscreteDistribution, alpha: &Rational) -> Result<Rational> {
    d.quantile(alpha)
}

/// `E[max(X - c, 0)]`.
pub fn stop_loss(d: &DiscreteDistribution, c: &Rational) -> Rational {
    d.atoms()
        .iter()
        .filter(|a| &a.value > c)
        .map(|a| (&a.value - c) * &a.prob)
        .sum()
}

/// Outcome of a `a <=_cx b` test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvexOrderVerdict {
    pub holds: bool,
    pub mean_equal: bool,
    /// A kink `c` with `stop_loss(a, c) > stop_loss(b, c)`.
    pub witness_c: Option<Rational>,
}

/// Decides `a <=_cx b`: equal means and stop-loss dominance everywhere.
///
/// Both stop-loss transforms are piecewise linear with kinks only at support
/// values, and coincide with `mean - c` to the left of both supports and
/// with zero to the right. Dominance at every kink of the union therefore
/// gives dominance on all of the real line.
pub fn convex_order_leq(a: &DiscreteDistribution, b: &DiscreteDistribution) -> ConvexOrderVerdict {
    let mean_equal = a.mean() == b.mean();
    let kinks: Vec<&Rational> = a.support().chain(b.support()).collect::<BTreeSet<_>>().into_iter().collect();
    let (sa, sb) = (stop_loss_at_sorted(a, &kinks), stop_loss_at_sorted(b, &kinks));
    let witness_c = kinks
        .iter()
        .zip(sa.iter().zip(&sb))
        .find(|(_, (x, y))| x > y)
        .map(|(c, _)| (*c).clone());
    ConvexOrderVerdict {
        holds: mean_equal && witness_c.is_none(),
        mean_equal,
        witness_c,
    }
}

/// [`stop_loss`] at each of the ascending `points`, via tail sums
/// `E[X; X > c] - c P(X > c)` accumulated from the right.
pub fn stop_loss_at_sorted(d: &DiscreteDistribution, points: &[&Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); points.len()];
    let mut atoms = d.atoms().iter().rev().peekable();
    let mut tail_prob = Rational::zero();
    let mut tail_moment = Rational::zero();
    for (slot, c) in out.iter_mut().zip(points).rev() {
        while let Some(a) = atoms.next_if(|a| &a.value > *c) {
            tail_prob += &a.prob;
            tail_moment += &(&a.value * &a.prob);
        }
        *slot = &tail_moment - &(*c * &tail_prob);
    }
    out
}
