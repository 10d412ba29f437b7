use crate::error::{Error, Result};
use crate::rational::{one, zero, Rational};
use crate::space::{FiniteSpace, SubsetMask, Transformation};

/// A bounded function `f: Ω → ℚ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionOnSpace {
    values: Vec<Rational>,
}

impl FunctionOnSpace {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        FiniteSpace::new(values.len())?;
        Ok(Self { values })
    }

    pub fn constant(width: usize, value: Rational) -> Self {
        Self { values: vec![value; width] }
    }

    pub fn indicator(set: SubsetMask) -> Self {
        Self { values: (0..set.width()).map(|p| if set.contains(p) { one() } else { zero() }).collect() }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn width(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, point: usize) -> &Rational {
        &self.values[point]
    }

    /// `f ∘ T`.
    pub fn compose(&self, map: &Transformation) -> Self {
        assert_eq!(self.width(), map.size());
        Self { values: map.table().iter().map(|&p| self.values[p].clone()).collect() }
    }

    /// `{ω : f(ω) ≥ level}`.
    pub fn level_set(&self, level: &Rational) -> SubsetMask {
        let points = (0..self.width()).filter(|&p| &self.values[p] >= level);
        SubsetMask::from_points(self.width(), points).unwrap()
    }

    /// Distinct values in decreasing order.
    pub fn distinct_values_desc(&self) -> Vec<Rational> {
        let mut values = self.values.clone();
        values.sort_by(|a, b| b.cmp(a));
        values.dedup();
        values
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.width(), other.width());
        Self { values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect() }
    }

    /// Equality at every point of `on`.
    pub fn agrees_on(&self, other: &Self, on: SubsetMask) -> bool {
        on.points().all(|p| self.values[p] == other.values[p])
    }
}

impl From<SubsetMask> for FunctionOnSpace {
    fn from(set: SubsetMask) -> Self {
        Self::indicator(set)
    }
}

impl TryFrom<Vec<Rational>> for FunctionOnSpace {
    type Error = Error;

    fn try_from(values: Vec<Rational>) -> Result<Self> {
        Self::new(values)
    }
}
