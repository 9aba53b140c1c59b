use std::ops::Index;

use serde::{Deserialize, Serialize};

use super::Interval;
use crate::error::{shape_err, Error, Result};

/// Cartesian product of intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalBox(Vec<Interval>);

impl IntervalBox {
    pub fn new(components: Vec<Interval>) -> Self {
        IntervalBox(components)
    }

    pub fn from_bounds(bounds: &[(f64, f64)]) -> Result<Self> {
        bounds
            .iter()
            .map(|&(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()
            .map(IntervalBox)
    }

    pub fn point(x: &[f64]) -> Self {
        IntervalBox(x.iter().map(|&v| Interval::point(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[Interval] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Interval> {
        self.0
    }

    /// Largest component width.
    pub fn width(&self) -> f64 {
        self.0.iter().map(Interval::wid).fold(0.0, f64::max)
    }

    /// Index of the widest component; ties go to the lowest index.
    pub fn widest_component(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in self.0.iter().enumerate() {
            let w = c.wid();
            if best.is_none_or(|(_, bw)| w > bw) {
                best = Some((i, w));
            }
        }
        best.map(|(i, _)| i)
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.0.iter().map(Interval::mid).collect()
    }

    /// Product of component widths.
    pub fn volume(&self) -> f64 {
        self.0.iter().map(|c| c.hi() - c.lo()).product()
    }

    /// Splits component `i` at its midpoint.
    pub fn split(&self, i: usize) -> (IntervalBox, IntervalBox) {
        let c = self.0[i];
        let m = c.mid();
        let mut left = self.clone();
        let mut right = self.clone();
        left.0[i] = Interval::raw(c.lo(), m);
        right.0[i] = Interval::raw(m, c.hi());
        (left, right)
    }

    /// Midpoint bisection of the widest component.
    pub fn bisect(&self) -> Result<(IntervalBox, IntervalBox)> {
        match self.widest_component() {
            Some(i) if self.0[i].wid() > 0.0 => {
                let c = self.0[i];
                let m = c.mid();
                if m <= c.lo() || m >= c.hi() {
                    // adjacent floats: nothing left to split
                    return Err(Error::DegenerateBox);
                }
                Ok(self.split(i))
            }
            _ => Err(Error::DegenerateBox),
        }
    }

    fn check_dim(&self, other: &IntervalBox) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(shape_err(
                format!("box of dimension {}", self.dim()),
                format!("dimension {}", other.dim()),
            ));
        }
        Ok(())
    }

    /// Intersection, `None` when empty.
    pub fn intersect(&self, other: &IntervalBox) -> Result<Option<IntervalBox>> {
        self.check_dim(other)?;
        let mut out = Vec::with_capacity(self.dim());
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.intersect(b) {
                Some(c) => out.push(c),
                None => return Ok(None),
            }
        }
        Ok(Some(IntervalBox(out)))
    }

    pub fn hull(&self, other: &IntervalBox) -> Result<IntervalBox> {
        self.check_dim(other)?;
        Ok(IntervalBox(
            self.0.iter().zip(&other.0).map(|(a, b)| a.hull(b)).collect(),
        ))
    }

    pub fn is_subset(&self, other: &IntervalBox) -> Result<bool> {
        self.check_dim(other)?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a.is_subset(b)))
    }

    /// `self ⊆ int(other)`: strict inclusion in every component.
    pub fn subset_of_interior(&self, other: &IntervalBox) -> Result<bool> {
        self.check_dim(other)?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .all(|(a, b)| a.is_interior_subset(b)))
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.0.iter().zip(x).all(|(c, &v)| c.contains(v))
    }

    /// Hausdorff distance in the max norm.
    pub fn distance(&self, other: &IntervalBox) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.endpoint_distance(b))
            .fold(0.0, f64::max))
    }

    /// Components at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> IntervalBox {
        IntervalBox(indices.iter().map(|&i| self.0[i]).collect())
    }

    pub fn concat(&self, other: &IntervalBox) -> IntervalBox {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        IntervalBox(v)
    }

    /// Componentwise `self - x`.
    pub fn sub_point(&self, x: &[f64]) -> IntervalBox {
        IntervalBox(
            self.0
                .iter()
                .zip(x)
                .map(|(c, &v)| *c - Interval::point(v))
                .collect(),
        )
    }

    /// Componentwise `x + self`.
    pub fn add_point(&self, x: &[f64]) -> IntervalBox {
        IntervalBox(
            self.0
                .iter()
                .zip(x)
                .map(|(c, &v)| Interval::point(v) + *c)
                .collect(),
        )
    }

    pub fn add(&self, other: &IntervalBox) -> Result<IntervalBox> {
        self.check_dim(other)?;
        Ok(IntervalBox(
            self.0.iter().zip(&other.0).map(|(a, b)| *a + *b).collect(),
        ))
    }

    pub fn sub(&self, other: &IntervalBox) -> Result<IntervalBox> {
        self.check_dim(other)?;
        Ok(IntervalBox(
            self.0.iter().zip(&other.0).map(|(a, b)| *a - *b).collect(),
        ))
    }

    pub fn scale(&self, factor: f64) -> IntervalBox {
        let f = Interval::point(factor);
        IntervalBox(self.0.iter().map(|c| *c * f).collect())
    }

    /// The `2^dim` corner points.
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|i| {
                        if mask >> i & 1 == 0 {
                            self.0[i].lo()
                        } else {
                            self.0[i].hi()
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

impl Index<usize> for IntervalBox {
    type Output = Interval;

    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl FromIterator<Interval> for IntervalBox {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        IntervalBox(iter.into_iter().collect())
    }
}
