//! Finite discrete distributions with exact rational probabilities.
//!
//! Both [`DiscreteDistribution`] and [`JointDiscreteDistribution`] are kept in
//! canonical form from construction on: atoms sorted, duplicates merged,
//! zero-probability atoms dropped, probabilities summing to exactly one.
//! Two distributions are equal as laws iff they are equal as values.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest joint support accepted by [`JointDiscreteDistribution`].
pub const MAX_JOINT_POINTS: usize = 100_000;

/// A single support point of a one-dimensional law.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Atom {
    pub value: Rational,
    pub prob: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DiscreteDistribution {
    atoms: Vec<Atom>,
}

impl DiscreteDistribution {
    /// Normalizes non-negative weights into probabilities, merging repeated
    /// values and dropping zero weights.
    pub fn from_weighted_values<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
        let mut seen = false;
        for (value, weight) in pairs {
            seen = true;
            if weight.is_negative() {
                return Err(Error::NegativeWeight(weight));
            }
            if weight.is_zero() {
                continue;
            }
            *merged.entry(value).or_default() += weight;
        }
        if !seen {
            return Err(Error::EmptyInput);
        }
        let total: Rational = merged.values().sum();
        if total.is_zero() {
            return Err(Error::ZeroTotalWeight);
        }
        let atoms = merged
            .into_iter()
            .map(|(value, w)| Atom { value, prob: w / &total })
            .collect();
        Ok(DiscreteDistribution { atoms })
    }

    pub fn point_mass(value: Rational) -> Self {
        DiscreteDistribution {
            atoms: vec![Atom { value, prob: Rational::one() }],
        }
    }

    /// Bernoulli law on {0, 1} with `P(1) = p`. Degenerate `p` of 0 or 1
    /// yields a point mass.
    pub fn bernoulli(p: Rational) -> Result<Self> {
        if p.is_negative() || p > Rational::one() {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        let q = Rational::one() - &p;
        Self::from_weighted_values([(Rational::zero(), q), (Rational::one(), p)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &Rational> + '_ {
        self.atoms.iter().map(|a| &a.value)
    }

    pub fn min_value(&self) -> &Rational {
        &self.atoms[0].value
    }

    pub fn max_value(&self) -> &Rational {
        &self.atoms[self.atoms.len() - 1].value
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: &Rational) -> Rational {
        self.atoms
            .iter()
            .take_while(|a| &a.value <= x)
            .map(|a| &a.prob)
            .sum()
    }

    /// Cumulative probabilities at each atom, in atom order. The last entry
    /// is exactly one. These are the jump levels of the quantile function.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut acc = Rational::zero();
        self.atoms
            .iter()
            .map(|a| {
                acc += &a.prob;
                acc.clone()
            })
            .collect()
    }

    /// Left-continuous generalized inverse `inf { x : F(x) >= alpha }`.
    pub fn quantile(&self, alpha: &Rational) -> Result<Rational> {
        if !alpha.in_unit_open() {
            return Err(Error::LevelOutOfRange(alpha.clone()));
        }
        Ok(self.quantile_closed(alpha).clone())
    }

    /// Same rule as [`quantile`](Self::quantile) but also accepts `alpha = 1`,
    /// where it returns the largest atom: the value of the quantile function
    /// on an interval `(b, alpha]` that ends at `alpha`.
    pub fn quantile_closed(&self, alpha: &Rational) -> &Rational {
        let mut acc = Rational::zero();
        for atom in &self.atoms {
            acc += &atom.prob;
            if &acc >= alpha {
                return &atom.value;
            }
        }
        self.max_value()
    }

    /// [`quantile_closed`](Self::quantile_closed) at each of `levels`, which
    /// must be sorted ascending and lie in `(0, 1]`. One pass over the atoms.
    pub fn quantiles_sorted<'a>(&'a self, levels: &[Rational]) -> Vec<&'a Rational> {
        debug_assert!(levels.windows(2).all(|w| w[0] <= w[1]));
        let mut out = Vec::with_capacity(levels.len());
        let mut atoms = self.atoms.iter();
        let mut current = atoms.next().expect("distribution is non-empty");
        let mut acc = current.prob.clone();
        for level in levels {
            while &acc < level {
                match atoms.next() {
                    Some(a) => {
                        acc += &a.prob;
                        current = a;
                    }
                    None => break,
                }
            }
            out.push(&current.value);
        }
        out
    }

    pub fn mean(&self) -> Rational {
        self.atoms.iter().map(|a| &a.value * &a.prob).sum()
    }

    /// Law of `X + c`.
    pub fn shift(&self, c: &Rational) -> Self {
        DiscreteDistribution {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { value: &a.value + c, prob: a.prob.clone() })
                .collect(),
        }
    }

    /// Law of `lambda * X` for `lambda > 0`.
    pub fn scale(&self, lambda: &Rational) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::NonPositiveScale(lambda.clone()));
        }
        Ok(DiscreteDistribution {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { value: &a.value * lambda, prob: a.prob.clone() })
                .collect(),
        })
    }
}

/// A support point of an n-dimensional law.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct JointPoint {
    pub coords: Vec<Rational>,
    pub prob: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct JointDiscreteDistribution {
    dimension: usize,
    points: Vec<JointPoint>,
}

impl JointDiscreteDistribution {
    /// Builds a joint law from weighted coordinate tuples. Points are sorted
    /// lexicographically and duplicates merged.
    pub fn from_weighted_points<I>(dimension: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<Rational>, Rational)>,
    {
        if dimension == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut merged: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
        let mut seen = false;
        for (index, (coords, weight)) in pairs.into_iter().enumerate() {
            seen = true;
            if coords.len() != dimension {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dimension,
                    found: coords.len(),
                });
            }
            if weight.is_negative() {
                return Err(Error::NegativeWeight(weight));
            }
            if weight.is_zero() {
                continue;
            }
            *merged.entry(coords).or_default() += weight;
            if merged.len() > MAX_JOINT_POINTS {
                return Err(Error::TooManyPoints { limit: MAX_JOINT_POINTS });
            }
        }
        if !seen {
            return Err(Error::EmptyInput);
        }
        let total: Rational = merged.values().sum();
        if total.is_zero() {
            return Err(Error::ZeroTotalWeight);
        }
        let points = merged
            .into_iter()
            .map(|(coords, w)| JointPoint { coords, prob: w / &total })
            .collect();
        Ok(JointDiscreteDistribution { dimension, points })
    }

    /// Joint law of independent components.
    pub fn independent(marginals: &[DiscreteDistribution]) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::EmptyInput);
        }
        let size: usize = marginals.iter().map(|m| m.len()).product();
        if size > MAX_JOINT_POINTS {
            return Err(Error::TooManyPoints { limit: MAX_JOINT_POINTS });
        }
        let mut cells: Vec<(Vec<Rational>, Rational)> = vec![(Vec::new(), Rational::one())];
        for m in marginals {
            cells = cells
                .into_iter()
                .flat_map(|(coords, p)| {
                    m.atoms().iter().map(move |a| {
                        let mut c = coords.clone();
                        c.push(a.value.clone());
                        (c, &p * &a.prob)
                    })
                })
                .collect();
        }
        Self::from_weighted_points(marginals.len(), cells)
    }

    pub fn point_mass(coords: Vec<Rational>) -> Result<Self> {
        let n = coords.len();
        Self::from_weighted_points(n, [(coords, Rational::one())])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[JointPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Law of coordinate `i`, counted from 1.
    pub fn marginal(&self, i: usize) -> Result<DiscreteDistribution> {
        if i == 0 || i > self.dimension {
            return Err(Error::IndexOutOfRange { index: i, dimension: self.dimension });
        }
        DiscreteDistribution::from_weighted_values(
            self.points
                .iter()
                .map(|p| (p.coords[i - 1].clone(), p.prob.clone())),
        )
    }

    /// All `n` marginals in coordinate order.
    pub fn marginals(&self) -> Vec<DiscreteDistribution> {
        (1..=self.dimension)
            .map(|i| self.marginal(i).expect("index within dimension"))
            .collect()
    }

    /// Exact law of `X_1 + ... + X_n`.
    pub fn sum_distribution(&self) -> DiscreteDistribution {
        DiscreteDistribution::from_weighted_values(
            self.points
                .iter()
                .map(|p| (p.coords.iter().sum(), p.prob.clone())),
        )
        .expect("joint law is non-empty with unit mass")
    }
}
