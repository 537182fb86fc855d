use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Independent variable of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    X,
    Z,
}

/// Uniform grid with `intervals + 1` nodes on `[left, right]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub left: f64,
    pub right: f64,
    pub intervals: usize,
    pub variable: Variable,
}

pub const MIN_INTERVALS: usize = 16;

impl GridSpec {
    pub fn new(left: f64, right: f64, intervals: usize, variable: Variable) -> Result<Self> {
        if !(left.is_finite() && right.is_finite() && left < right) {
            return Err(invalid(format!("grid needs left < right, got [{left}, {right}]")));
        }
        if intervals < MIN_INTERVALS {
            return Err(invalid(format!("grid needs at least {MIN_INTERVALS} intervals, got {intervals}")));
        }
        Ok(Self { left, right, intervals, variable })
    }

    pub fn x(left: f64, right: f64, intervals: usize) -> Result<Self> {
        Self::new(left, right, intervals, Variable::X)
    }

    pub fn z(z_min: f64, intervals: usize) -> Result<Self> {
        Self::new(z_min, 0.0, intervals, Variable::Z)
    }

    /// `z in [-10, 0]` with 20000 intervals, `h = 5e-4`.
    pub fn default_z() -> Self {
        Self { left: -10.0, right: 0.0, intervals: 20000, variable: Variable::Z }
    }

    /// `x in [-40, 40]` with 4096 intervals.
    pub fn default_evolution() -> Self {
        Self { left: -40.0, right: 40.0, intervals: 4096, variable: Variable::X }
    }

    pub fn h(&self) -> f64 {
        (self.right - self.left) / self.intervals as f64
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.intervals {
            self.right
        } else {
            self.left + i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Same domain with twice as many intervals.
    pub fn refined(&self) -> Self {
        Self { intervals: 2 * self.intervals, ..*self }
    }
}
