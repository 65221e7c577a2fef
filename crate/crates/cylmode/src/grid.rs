//! Uniform t-grids. Every trajectory, energy profile, and check in the crate
//! lives on one of these, which keeps outputs deterministic for fixed
//! configuration.

use crate::{Error, Result};

/// A uniform grid on `[t0, t1]` with `n` steps (`n + 1` nodes).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    t0: f64,
    t1: f64,
    n: usize,
}

impl Grid {
    pub fn new(t0: f64, t1: f64, n: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) || t1 <= t0 || n == 0 {
            return Err(Error::InvalidGrid(format!(
                "need finite t0 < t1 and n >= 1, got [{t0}, {t1}] with n = {n}"
            )));
        }
        Ok(Self { t0, t1, n })
    }

    /// Grid with step as close to `h` as divides `[t0, t1]` evenly.
    pub fn from_step(t0: f64, t1: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("step must be positive, got {h}")));
        }
        let n = ((t1 - t0) / h).round().max(1.0) as usize;
        Self::new(t0, t1, n)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn h(&self) -> f64 {
        (self.t1 - self.t0) / self.n as f64
    }

    /// Number of steps.
    pub fn steps(&self) -> usize {
        self.n
    }

    /// Number of nodes (`steps + 1`).
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t(&self, i: usize) -> f64 {
        if i == self.n {
            self.t1
        } else {
            self.t0 + i as f64 * self.h()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.t(i)).collect()
    }

    pub fn contains(&self, t: f64) -> bool {
        let slack = 1e-9 * (1.0 + self.h());
        t >= self.t0 - slack && t <= self.t1 + slack
    }

    pub fn contains_span(&self, a: f64, b: f64) -> bool {
        self.contains(a) && self.contains(b)
    }

    /// Index of the node closest to `t`, if `t` is on the grid to 1e-6·h.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        if !self.contains(t) {
            return None;
        }
        let x = (t - self.t0) / self.h();
        let i = x.round();
        if (x - i).abs() <= 1e-6 && i >= 0.0 && (i as usize) <= self.n {
            Some(i as usize)
        } else {
            None
        }
    }

    /// Subgrid spanning `[a, b]`; both endpoints must be grid nodes.
    pub fn subgrid(&self, a: f64, b: f64) -> Result<(Grid, usize)> {
        let (ia, ib) = match (self.index_of(a), self.index_of(b)) {
            (Some(ia), Some(ib)) if ib > ia => (ia, ib),
            _ => {
                return Err(Error::InvalidGrid(format!(
                    "span [{a}, {b}] does not align with grid nodes"
                )))
            }
        };
        Ok((Grid::new(self.t(ia), self.t(ib), ib - ia)?, ia))
    }

    /// Same span, doubled resolution.
    pub fn refined(&self) -> Grid {
        Grid {
            t0: self.t0,
            t1: self.t1,
            n: self.n * 2,
        }
    }
}
