//! Uniform time grids, piecewise-constant order schedules and node-indexed
//! trajectories.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Relative slack, in units of one step, when matching a time to a node.
const NODE_SLACK: f64 = 1e-6;

/// Uniform grid `t_i = t0 + i*h`, `i = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    tf: f64,
    n_steps: usize,
    h: f64,
}

impl TimeGrid {
    pub fn new(t0: f64, tf: f64, n_steps: usize) -> Result<Self> {
        if !(t0.is_finite() && tf.is_finite()) || tf <= t0 || n_steps == 0 {
            return Err(Error::InvalidGrid { t0, tf, n_steps });
        }
        Ok(Self {
            t0,
            tf,
            n_steps,
            h: (tf - t0) / n_steps as f64,
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tf(&self) -> f64 {
        self.tf
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of nodes, `n_steps + 1`.
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }

    /// Index of the node at time `t`; times between nodes are rejected.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let x = (t - self.t0) / self.h;
        let i = math::round(x);
        if !(i >= 0.0 && i <= self.n_steps as f64) || math::abs(x - i) > NODE_SLACK {
            return Err(Error::OffGrid { t });
        }
        Ok(i as usize)
    }

    /// Grid on nodes `start..=end` of `self`, sharing the same step.
    pub fn sub(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.n_steps {
            return Err(Error::InvalidGrid {
                t0: self.node(start),
                tf: self.node(end),
                n_steps: end.saturating_sub(start),
            });
        }
        Ok(Self {
            t0: self.node(start),
            tf: self.node(end),
            n_steps: end - start,
            h: self.h,
        })
    }

    /// Mirror of a node index about the grid midpoint.
    #[inline]
    pub fn mirror(&self, i: usize) -> usize {
        self.n_steps - i
    }
}

/// One constant-order piece of an [`OrderSchedule`], covering
/// `(previous end, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub end: f64,
    pub order: f64,
}

/// A segment resolved against a grid: nodes `start..=end` at a fixed order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignedSegment {
    pub start: usize,
    pub end: usize,
    pub order: f64,
}

/// Piecewise-constant Caputo order `alpha(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSchedule {
    segments: Vec<Segment>,
}

pub(crate) fn check_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidOrder(alpha))
    }
}

impl OrderSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSchedule("no segments"));
        }
        for s in &segments {
            check_order(s.order)?;
            if !s.end.is_finite() {
                return Err(Error::InvalidSchedule("non-finite end time"));
            }
        }
        if segments.windows(2).any(|w| w[1].end <= w[0].end) {
            return Err(Error::InvalidSchedule("end times must be strictly increasing"));
        }
        Ok(Self { segments })
    }

    pub fn constant(alpha: f64, tf: f64) -> Result<Self> {
        Self::new(alloc::vec![Segment { end: tf, order: alpha }])
    }

    /// Order `alpha0` on `[t0, t_switch]` and classical order on
    /// `(t_switch, tf]`. Empty pieces are dropped, so `t_switch = tf` gives a
    /// constant schedule.
    pub fn fractint(alpha0: f64, t_switch: f64, t0: f64, tf: f64) -> Result<Self> {
        if !(t_switch >= t0 && t_switch <= tf) {
            return Err(Error::InvalidSchedule("switch time outside the horizon"));
        }
        let mut segs = Vec::with_capacity(2);
        if t_switch > t0 {
            segs.push(Segment {
                end: t_switch,
                order: alpha0,
            });
        }
        if t_switch < tf {
            segs.push(Segment { end: tf, order: 1.0 });
        }
        Self::new(segs)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_constant(&self) -> bool {
        self.segments.len() == 1
    }

    /// Order in force at time `t` (segments are closed on the right).
    pub fn order_at(&self, t: f64) -> f64 {
        self.segments
            .iter()
            .find(|s| t <= s.end)
            .unwrap_or_else(|| self.segments.last().expect("non-empty"))
            .order
    }

    /// Resolve breakpoints to node indices of `grid`.
    pub fn align(&self, grid: &TimeGrid) -> Result<Vec<AlignedSegment>> {
        let mut out = Vec::with_capacity(self.segments.len());
        let mut start = 0usize;
        for (k, s) in self.segments.iter().enumerate() {
            let end = grid
                .index_of(s.end)
                .map_err(|_| Error::InvalidSchedule("breakpoint is not a grid node"))?;
            if end <= start {
                return Err(Error::InvalidSchedule("segment spans no grid step"));
            }
            if k + 1 == self.segments.len() && end != grid.n_steps() {
                return Err(Error::InvalidSchedule("last segment must end at the grid horizon"));
            }
            out.push(AlignedSegment {
                start,
                end,
                order: s.order,
            });
            start = end;
        }
        Ok(out)
    }

    /// Schedule seen in reversed time `tau = t0 + tf - t` on `grid`.
    pub fn mirrored(&self, grid: &TimeGrid) -> Result<Self> {
        let aligned = self.align(grid)?;
        let n = grid.n_steps();
        let segs = aligned
            .iter()
            .rev()
            .map(|s| Segment {
                end: grid.node(n - s.start),
                order: s.order,
            })
            .collect();
        Self::new(segs)
    }
}

/// States on every node of a grid, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: TimeGrid,
    dim: usize,
    data: Vec<f64>,
}

impl Trajectory {
    pub fn from_rows(grid: TimeGrid, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: grid.len() * dim,
                found: data.len(),
            });
        }
        Ok(Self { grid, dim, data })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn first(&self) -> &[f64] {
        self.row(0)
    }

    pub fn last(&self) -> &[f64] {
        self.row(self.grid.n_steps())
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn component(&self, c: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[c])
    }

    /// State at time `t`, which must be a grid node.
    pub fn at_time(&self, t: f64) -> Result<&[f64]> {
        self.grid.index_of(t).map(|i| self.row(i))
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Rows in reverse node order, re-labelled on the same grid.
    pub fn reversed(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for r in self.data.chunks_exact(self.dim).rev() {
            data.extend_from_slice(r);
        }
        Self {
            grid: self.grid,
            dim: self.dim,
            data,
        }
    }
}
