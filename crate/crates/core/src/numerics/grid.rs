use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform frequency lattice `omega_j = -omega_max + j * d_omega`,
/// `d_omega = 2 omega_max / n`, `j = 0..n`.
///
/// `n` is a power of two and at least 16, so `omega = 0` is the node `n / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid<T> {
    omega_max: T,
    n_points: usize,
}

impl<T: Real> FrequencyGrid<T> {
    pub const DEFAULT_OMEGA_MAX: f64 = 20.0;
    pub const DEFAULT_POINTS: usize = 4096;

    pub fn new(omega_max: T, n_points: usize) -> Result<Self> {
        if !(omega_max > T::zero()) || !omega_max.is_finite() {
            return Err(Error::InvalidGrid(format!("omega_max must be positive, got {omega_max}")));
        }
        if n_points < 16 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= 16, got {n_points}"
            )));
        }
        Ok(Self { omega_max, n_points })
    }

    pub fn omega_max(&self) -> T {
        self.omega_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> T {
        T::lit(2.0) * self.omega_max / T::from_usize_lossy(self.n_points)
    }

    /// Index of the `omega = 0` node.
    pub fn zero_index(&self) -> usize {
        self.n_points / 2
    }

    #[inline]
    pub fn omega(&self, j: usize) -> T {
        -self.omega_max + T::from_usize_lossy(j) * self.step()
    }

    pub fn values(&self) -> Vec<T> {
        (0..self.n_points).map(|j| self.omega(j)).collect()
    }

    /// Nearest node to `omega` (clamped to the grid).
    pub fn nearest(&self, omega: T) -> usize {
        let x = ((omega + self.omega_max) / self.step()).round();
        let x = x.max(T::zero()).to_usize().unwrap_or(0);
        x.min(self.n_points - 1)
    }

    /// Grid with the same spacing and `factor` times as many points, centred
    /// on the same origin. Node `j` of `self` is node `j + offset` of the result.
    pub fn padded(&self, factor: usize) -> Result<(Self, usize)> {
        let f = factor.max(1).next_power_of_two();
        let grid = Self::new(self.omega_max * T::from_usize_lossy(f), self.n_points * f)?;
        Ok((grid, (grid.n_points - self.n_points) / 2))
    }

    pub fn time_grid(&self) -> TimeGrid<T> {
        TimeGrid::dual_of(self)
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.n_points == other.n_points && self.omega_max == other.omega_max
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "({}, {}) vs ({}, {})",
                self.omega_max, self.n_points, other.omega_max, other.n_points
            )))
        }
    }
}

impl Default for FrequencyGrid<f64> {
    fn default() -> Self {
        Self::new(Self::DEFAULT_OMEGA_MAX, Self::DEFAULT_POINTS).expect("valid default grid")
    }
}

/// Time lattice dual to a [`FrequencyGrid`]: `tau_n = (n - n_points/2) d_tau`
/// with `d_tau * d_omega = 2 pi / n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid<T> {
    tau_max: T,
    n_points: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn dual_of(freq: &FrequencyGrid<T>) -> Self {
        let d_tau = T::PI() / freq.omega_max();
        Self {
            tau_max: d_tau * T::from_usize_lossy(freq.len() / 2),
            n_points: freq.len(),
        }
    }

    pub fn tau_max(&self) -> T {
        self.tau_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> T {
        T::lit(2.0) * self.tau_max / T::from_usize_lossy(self.n_points)
    }

    pub fn zero_index(&self) -> usize {
        self.n_points / 2
    }

    #[inline]
    pub fn tau(&self, n: usize) -> T {
        (T::from_usize_lossy(n) - T::from_usize_lossy(self.n_points / 2)) * self.step()
    }

    pub fn values(&self) -> Vec<T> {
        (0..self.n_points).map(|n| self.tau(n)).collect()
    }

    /// Heaviside step on the periodic lattice with `theta(0) = 1/2`.
    ///
    /// Node 0 (`tau = -tau_max`) coincides with `+tau_max` on the circle and
    /// also gets 1/2, so `theta(tau) + theta(-tau) = 1` holds at every node.
    pub fn heaviside(&self) -> Vec<T> {
        let half = T::lit(0.5);
        let z = self.zero_index();
        (0..self.n_points)
            .map(|n| {
                if n == z || n == 0 {
                    half
                } else if n > z {
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect()
    }

    pub fn is_dual_of(&self, freq: &FrequencyGrid<T>) -> bool {
        let d = Self::dual_of(freq);
        d.n_points == self.n_points && (d.tau_max - self.tau_max).abs() <= T::epsilon() * d.tau_max
    }
}
