//! Caputo fractional initial-value problems on uniform grids.
//!
//! The integrator is the fractional Adams–Bashforth–Moulton scheme in PECE
//! form: a product-rectangle predictor followed by one or more
//! product-trapezoid corrector passes. The whole history is kept, so a solve
//! over `N` steps costs `O(N^2)` right-hand side combinations.
//!
//! Variable order is handled piecewise: every segment of an
//! [`OrderSchedule`] restarts the lower terminal of the Caputo operator at its
//! own start time and inherits the terminal state of the previous segment.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{check_order, OrderSchedule, TimeGrid, Trajectory};
use crate::math;

/// Right-hand side `f(t, y)` of `D^alpha y = f(t, y)`.
///
/// Implementations must be deterministic and write exactly `dim()` values.
pub trait Rhs {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

impl<R: Rhs + ?Sized> Rhs for &R {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        (**self).eval(t, y, dy)
    }
}

/// Adapter turning an infallible closure into an [`Rhs`].
#[derive(Clone, Copy)]
pub struct FnRhs<F> {
    dim: usize,
    f: F,
}

impl<F> Rhs for FnRhs<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        (self.f)(t, y, dy);
        Ok(())
    }
}

pub fn rhs_fn<F>(dim: usize, f: F) -> FnRhs<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    FnRhs { dim, f }
}

/// PECE integrator settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pece {
    /// Corrector passes per step; 1 is the plain PECE scheme.
    pub corrector_iterations: usize,
}

impl Default for Pece {
    fn default() -> Self {
        Self {
            corrector_iterations: 1,
        }
    }
}

impl Pece {
    pub fn new(corrector_iterations: usize) -> Result<Self> {
        if corrector_iterations == 0 {
            return Err(Error::InvalidConfig("corrector_iterations must be positive"));
        }
        Ok(Self {
            corrector_iterations,
        })
    }

    pub fn solve<R: Rhs>(&self, rhs: &R, alpha: f64, grid: &TimeGrid, y0: &[f64]) -> Result<Trajectory> {
        check_order(alpha)?;
        check_dim(rhs, y0)?;
        let data = integrate(rhs, alpha, grid, y0, self.corrector_iterations, 0)?;
        Trajectory::from_rows(*grid, y0.len(), data)
    }

    /// Piecewise solve over `schedule`; `rhs_for_order` builds the right-hand
    /// side used on a segment of the given order.
    pub fn solve_variable_order<R, F>(
        &self,
        mut rhs_for_order: F,
        schedule: &OrderSchedule,
        grid: &TimeGrid,
        y0: &[f64],
    ) -> Result<Trajectory>
    where
        R: Rhs,
        F: FnMut(f64) -> R,
    {
        let segments = schedule.align(grid)?;
        let d = y0.len();
        let mut data: Vec<f64> = Vec::with_capacity(grid.len() * d);
        data.extend_from_slice(y0);
        for seg in segments {
            let rhs = rhs_for_order(seg.order);
            check_dim(&rhs, y0)?;
            let sub = grid.sub(seg.start, seg.end)?;
            let start_state: Vec<f64> = data[seg.start * d..(seg.start + 1) * d].to_vec();
            let piece = integrate(&rhs, seg.order, &sub, &start_state, self.corrector_iterations, seg.start)?;
            // boundary node is shared with the previous segment
            data.extend_from_slice(&piece[d..]);
        }
        Trajectory::from_rows(*grid, d, data)
    }
}

fn check_dim<R: Rhs>(rhs: &R, y0: &[f64]) -> Result<()> {
    if rhs.dim() != y0.len() {
        return Err(Error::DimensionMismatch {
            expected: rhs.dim(),
            found: y0.len(),
        });
    }
    Ok(())
}

/// Solve `D^alpha y = f(t, y)`, `y(t0) = y0` with the PECE scheme.
pub fn solve_caputo_ivp<R: Rhs>(
    rhs: &R,
    alpha: f64,
    grid: &TimeGrid,
    y0: &[f64],
    corrector_iterations: usize,
) -> Result<Trajectory> {
    Pece::new(corrector_iterations)?.solve(rhs, alpha, grid, y0)
}

/// Solve with a piecewise-constant order, restarting the memory at every
/// breakpoint.
pub fn solve_variable_order<R, F>(
    rhs_for_order: F,
    schedule: &OrderSchedule,
    grid: &TimeGrid,
    y0: &[f64],
    corrector_iterations: usize,
) -> Result<Trajectory>
where
    R: Rhs,
    F: FnMut(f64) -> R,
{
    Pece::new(corrector_iterations)?.solve_variable_order(rhs_for_order, schedule, grid, y0)
}

/// Convolution weights of the scheme for a given order and step count.
struct Weights {
    /// `(k+1)^a - k^a`, indexed by `k = n - j`.
    predictor: Vec<f64>,
    /// `(k+2)^(a+1) + k^(a+1) - 2 (k+1)^(a+1)`, indexed by `k = n - j`.
    corrector: Vec<f64>,
    /// `k^(a+1)` for the start weight.
    pow_a1: Vec<f64>,
    /// `k^a` for the start weight.
    pow_a: Vec<f64>,
    alpha: f64,
    predictor_scale: f64,
    corrector_scale: f64,
}

impl Weights {
    fn new(alpha: f64, h: f64, n_steps: usize) -> Self {
        let pow_a: Vec<f64> = (0..=n_steps + 1).map(|k| math::pow(k as f64, alpha)).collect();
        let pow_a1: Vec<f64> = (0..=n_steps + 1)
            .map(|k| math::pow(k as f64, alpha + 1.0))
            .collect();
        let predictor = (0..n_steps).map(|k| pow_a[k + 1] - pow_a[k]).collect();
        let corrector = (0..n_steps)
            .map(|k| pow_a1[k + 2] + pow_a1[k] - 2.0 * pow_a1[k + 1])
            .collect();
        let ha = math::pow(h, alpha);
        Self {
            predictor,
            corrector,
            pow_a1,
            pow_a,
            alpha,
            predictor_scale: ha / math::gamma(alpha + 1.0),
            corrector_scale: ha / math::gamma(alpha + 2.0),
        }
    }

    /// Weight of `f_0` in the corrector for the step producing node `n + 1`.
    #[inline]
    fn corrector_start(&self, n: usize) -> f64 {
        self.pow_a1[n] - (n as f64 - self.alpha) * self.pow_a[n + 1]
    }
}

/// Core PECE loop; `offset` only shifts node indices in error reports.
fn integrate<R: Rhs>(
    rhs: &R,
    alpha: f64,
    grid: &TimeGrid,
    y0: &[f64],
    corrector_iterations: usize,
    offset: usize,
) -> Result<Vec<f64>> {
    let d = y0.len();
    let n_steps = grid.n_steps();
    let w = Weights::new(alpha, grid.step(), n_steps);

    let mut y = vec![0.0; (n_steps + 1) * d];
    let mut f = vec![0.0; (n_steps + 1) * d];
    y[..d].copy_from_slice(y0);
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { node: offset });
    }
    rhs.eval(grid.node(0), y0, &mut f[..d])?;
    if f[..d].iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { node: offset });
    }

    let mut pred = vec![0.0; d];
    let mut hist = vec![0.0; d];
    let mut cur = vec![0.0; d];
    let mut fcur = vec![0.0; d];

    for n in 0..n_steps {
        pred.iter_mut().for_each(|v| *v = 0.0);
        hist.iter_mut().for_each(|v| *v = 0.0);

        let a0 = w.corrector_start(n);
        for (c, h) in hist.iter_mut().enumerate() {
            *h = a0 * f[c];
        }
        for j in 0..=n {
            let fj = &f[j * d..(j + 1) * d];
            let bp = w.predictor[n - j];
            for (p, &fv) in pred.iter_mut().zip(fj) {
                *p += bp * fv;
            }
            if j >= 1 {
                let ac = w.corrector[n - j];
                for (h, &fv) in hist.iter_mut().zip(fj) {
                    *h += ac * fv;
                }
            }
        }

        for c in 0..d {
            cur[c] = y0[c] + w.predictor_scale * pred[c];
        }
        let t_next = grid.node(n + 1);
        for _ in 0..corrector_iterations {
            rhs.eval(t_next, &cur, &mut fcur)?;
            for c in 0..d {
                cur[c] = y0[c] + w.corrector_scale * (fcur[c] + hist[c]);
            }
        }
        if cur.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                node: offset + n + 1,
            });
        }
        let row = (n + 1) * d;
        y[row..row + d].copy_from_slice(&cur);
        rhs.eval(t_next, &cur, &mut f[row..row + d])?;
        if f[row..row + d].iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                node: offset + n + 1,
            });
        }
    }
    Ok(y)
}
