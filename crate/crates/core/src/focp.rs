//! Fractional optimal control of the cholera model by forward–backward sweep.
//!
//! Each sweep integrates the state forward, integrates the co-state system in
//! reversed time `tau = t0 + tf - t` from the zero transversality condition,
//! projects the controls through the clipped stationarity conditions of the
//! Hamiltonian, and relaxes them toward the projection.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fode::{Pece, Rhs};
use crate::grid::{OrderSchedule, TimeGrid, Trajectory};
use crate::math;
use crate::model::{
    alpha_scale, rhs, CholeraSystem, ControlVector, Controls, ModelParams, ScaledParams, State, DIM,
};

/// Co-state vector `xi_1..xi_8`, ordered like [`State`].
pub type AdjointState = [f64; DIM];

/// Weights of the cost functional: `k1 I1 + k2 I2 + k3 u^2 + k4 v^2 + k5 m^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostWeights {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
}

impl CostWeights {
    pub const BASELINE: Self = Self {
        k1: 4.0,
        k2: 2.4,
        k3: 1.6,
        k4: 1.0,
        k5: 1.0,
    };

    pub fn validate(&self) -> Result<()> {
        let all = [self.k1, self.k2, self.k3, self.k4, self.k5];
        if all.iter().all(|k| k.is_finite() && *k > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidConfig("cost weights must be positive and finite"))
        }
    }

    /// Integrand of the cost functional.
    pub fn running_cost(&self, s: &State, c: &ControlVector) -> f64 {
        self.k1 * s.i1
            + self.k2 * s.i2
            + self.k3 * c.u * c.u
            + self.k4 * c.v * c.v
            + self.k5 * c.m * c.m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlBounds {
    pub u_max: f64,
    pub v_max: f64,
    pub m_max: f64,
}

impl ControlBounds {
    pub const UNIT: Self = Self {
        u_max: 1.0,
        v_max: 1.0,
        m_max: 1.0,
    };

    pub fn validate(&self) -> Result<()> {
        let all = [self.u_max, self.v_max, self.m_max];
        if all.iter().all(|b| *b > 0.0 && *b <= 1.0) {
            Ok(())
        } else {
            Err(Error::InvalidConfig("control bounds must lie in (0, 1]"))
        }
    }

    pub fn contains(&self, c: &ControlVector) -> bool {
        (0.0..=self.u_max).contains(&c.u)
            && (0.0..=self.v_max).contains(&c.v)
            && (0.0..=self.m_max).contains(&c.m)
    }
}

/// Which controls may act. Water treatment `u` is never enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Strategy {
    pub vaccination: bool,
    pub hygiene: bool,
}

impl Strategy {
    /// Vaccination only.
    pub const A: Self = Self {
        vaccination: true,
        hygiene: false,
    };
    /// Hygiene only.
    pub const B: Self = Self {
        vaccination: false,
        hygiene: true,
    };
    /// Vaccination and hygiene.
    pub const C: Self = Self {
        vaccination: true,
        hygiene: true,
    };
    pub const NONE: Self = Self {
        vaccination: false,
        hygiene: false,
    };

    pub fn label(&self) -> &'static str {
        match (self.vaccination, self.hygiene) {
            (true, false) => "A",
            (false, true) => "B",
            (true, true) => "C",
            (false, false) => "none",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s.trim() {
            "A" | "a" => Some(Self::A),
            "B" | "b" => Some(Self::B),
            "C" | "c" => Some(Self::C),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub max_iterations: usize,
    /// Weight of the new projection in the convex control update.
    pub relaxation: f64,
    /// Stop when the max relative change of every series is at most this.
    pub tolerance: f64,
    pub corrector_iterations: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            relaxation: 0.5,
            tolerance: 1e-3,
            corrector_iterations: 1,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive"));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::InvalidConfig("relaxation must lie in (0, 1]"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerance must be positive"));
        }
        Pece::new(self.corrector_iterations).map(|_| ())
    }
}

/// Everything that defines one optimal control problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub params: ModelParams,
    pub schedule: OrderSchedule,
    pub grid: TimeGrid,
    pub initial: State,
    pub weights: CostWeights,
    pub bounds: ControlBounds,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationLog {
    pub iteration: usize,
    pub max_rel_change: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalSolution {
    pub state: Trajectory,
    pub adjoint: Trajectory,
    /// One control vector per grid node.
    pub controls: Vec<ControlVector>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<IterationLog>,
}

impl OptimalSolution {
    pub fn grid(&self) -> &TimeGrid {
        self.state.grid()
    }

    pub fn state_at(&self, i: usize) -> State {
        State::from_slice(self.state.row(i))
    }

    pub fn last_change(&self) -> f64 {
        self.history.last().map_or(f64::INFINITY, |h| h.max_rel_change)
    }
}

/// Trapezoid approximation of the cost functional.
pub fn objective(state: &Trajectory, controls: &[ControlVector], weights: &CostWeights) -> Result<f64> {
    if controls.len() != state.len() || state.dim() != DIM {
        return Err(Error::GridMismatch);
    }
    let h = state.grid().step();
    Ok(math::trapezoid(
        h,
        state
            .rows()
            .zip(controls)
            .map(|(r, c)| weights.running_cost(&State::from_slice(r), c)),
    ))
}

/// Hamiltonian: running cost plus `xi . f(x, c)`.
pub fn hamiltonian(
    s: &State,
    xi: &AdjointState,
    c: &ControlVector,
    sp: &ScaledParams,
    w: &CostWeights,
) -> Result<f64> {
    let f = rhs(s, c, sp)?;
    Ok(w.running_cost(s, c) + xi.iter().zip(f.iter()).map(|(a, b)| a * b).sum::<f64>())
}

/// Right-hand side of the co-state system in reversed time.
pub fn adjoint_rhs(
    xi: &AdjointState,
    s: &State,
    c: &ControlVector,
    sp: &ScaledParams,
    w: &CostWeights,
) -> Result<[f64; DIM]> {
    let [x1, x2, x3, x4, x5, x6, x7, x8] = *xi;
    let State {
        s1,
        i1,
        b1,
        s2,
        i2,
        b2,
        ..
    } = *s;
    let ControlVector { u, v, m } = *c;
    let k = sp.k;
    let (den1, den2) = (b1 + k, b2 + k);
    if den1 == 0.0 || den2 == 0.0 {
        return Err(Error::SingularIncidence);
    }
    Ok([
        sp.varrho1 * i1 * (m - 1.0) * (x1 - x2)
            + sp.a1 * (x5 - x1)
            + (b1 * sp.beta1 * (x1 - x2) * (u - 1.0) - b1 * sp.mu1 * x1 - k * sp.mu1 * x1) / den1
            + (x3 - x1) * v,
        w.k1 + sp.gamma1 * x3 + sp.b1 * x6 + sp.varrho1 * (m - 1.0) * x1 * s1
            - x2 * (sp.q1 + sp.varrho1 * (m - 1.0) * s1)
            + x4 * sp.sigma1,
        sp.omega * (x1 - x3) - (sp.mu1 + sp.c1) * x3 + sp.c1 * x7,
        (k * (-k * x4 * sp.q2 + sp.beta1 * (x1 - x2) * s1 * (u - 1.0))
            - b1 * b1 * x4 * sp.q2
            - 2.0 * b1 * k * x4 * sp.q2)
            / (den1 * den1),
        sp.a2 * (x1 - x5)
            + sp.varrho2 * i2 * (m - 1.0) * (x5 - x6)
            + (b2 * sp.beta2 * (x5 - x6) * (u - 1.0) - b2 * sp.mu2 * x5 - k * sp.mu2 * x5) / den2
            + (x7 - x5) * v,
        w.k2 + sp.b2 * x2 + sp.gamma2 * x7 + sp.varrho2 * (m - 1.0) * x5 * s2
            - x6 * (sp.q3 + sp.varrho2 * (m - 1.0) * s2)
            + x8 * sp.sigma2,
        sp.omega * x5 + sp.c2 * x3 - (sp.mu2 + sp.omega + sp.c2) * x7,
        (k * (-k * x8 * sp.q4 + sp.beta2 * (x5 - x6) * s2 * (u - 1.0))
            - b2 * b2 * x8 * sp.q4
            - 2.0 * b2 * k * x8 * sp.q4)
            / (den2 * den2),
    ])
}

/// Clipped stationarity conditions; disabled controls are forced to zero.
pub fn project_controls(
    s: &State,
    xi: &AdjointState,
    sp: &ScaledParams,
    w: &CostWeights,
    bounds: &ControlBounds,
    strategy: &Strategy,
) -> ControlVector {
    let clip = |x: f64, hi: f64| x.max(0.0).min(hi);
    let v = if strategy.vaccination {
        clip((s.s1 * (xi[0] - xi[2]) + s.s2 * (xi[4] - xi[6])) / (2.0 * w.k4), bounds.v_max)
    } else {
        0.0
    };
    let m = if strategy.hygiene {
        clip(
            (sp.varrho1 * s.i1 * (xi[1] - xi[0]) * s.s1 + sp.varrho2 * s.i2 * (xi[5] - xi[4]) * s.s2)
                / (2.0 * w.k5),
            bounds.m_max,
        )
    } else {
        0.0
    };
    ControlVector { u: 0.0, v, m }
}

/// Unclipped water-treatment stationarity value, kept for diagnostics; the
/// sweep never enables `u`.
pub fn water_treatment_argmin(s: &State, xi: &AdjointState, sp: &ScaledParams, w: &CostWeights) -> f64 {
    sp.beta1 * s.b1 * (xi[1] - xi[0]) * s.s1 / (2.0 * w.k3 * (s.b1 + sp.k))
        + sp.beta2 * s.b2 * (xi[5] - xi[4]) * s.s2 / (2.0 * w.k3 * (s.b2 + sp.k))
}

/// Co-state system in reversed time. States and controls are looked up at
/// the mirrored node; no interpolation happens.
pub struct AdjointSystem<'a> {
    pub params: ScaledParams,
    pub weights: CostWeights,
    pub state: &'a Trajectory,
    pub controls: &'a [ControlVector],
}

impl Rhs for AdjointSystem<'_> {
    fn dim(&self) -> usize {
        DIM
    }

    fn eval(&self, tau: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let grid = self.state.grid();
        let i = grid.mirror(grid.index_of(tau)?);
        let mut xi = [0.0; DIM];
        xi.copy_from_slice(y);
        let out = adjoint_rhs(
            &xi,
            &State::from_slice(self.state.row(i)),
            &self.controls[i],
            &self.params,
            &self.weights,
        )?;
        dy.copy_from_slice(&out);
        Ok(())
    }
}

/// Forward state solve under node-wise controls.
pub fn forward_state(
    params: &ModelParams,
    schedule: &OrderSchedule,
    grid: &TimeGrid,
    initial: &State,
    controls: &[ControlVector],
    pece: &Pece,
) -> Result<Trajectory> {
    if controls.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    pece.solve_variable_order(
        |a| {
            CholeraSystem::new(
                alpha_scale(params, a).expect("schedule orders are validated"),
                Controls::Nodes {
                    grid: *grid,
                    values: controls,
                },
            )
        },
        schedule,
        grid,
        &initial.to_array(),
    )
}

/// Backward co-state solve; the result is indexed in forward time, so its
/// last node is the zero terminal condition.
pub fn backward_adjoint(
    params: &ModelParams,
    schedule: &OrderSchedule,
    weights: &CostWeights,
    state: &Trajectory,
    controls: &[ControlVector],
    pece: &Pece,
) -> Result<Trajectory> {
    let grid = state.grid();
    if controls.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let mirrored = schedule.mirrored(grid)?;
    let reversed = pece.solve_variable_order(
        |a| AdjointSystem {
            params: alpha_scale(params, a).expect("schedule orders are validated"),
            weights: *weights,
            state,
            controls,
        },
        &mirrored,
        grid,
        &[0.0; DIM],
    )?;
    Ok(reversed.reversed())
}

fn max_series_change(new: &[f64], old: &[f64], dim: usize, scratch: &mut [Vec<f64>; 2]) -> f64 {
    let mut worst = 0.0f64;
    for c in 0..dim {
        scratch[0].clear();
        scratch[1].clear();
        scratch[0].extend(new.iter().skip(c).step_by(dim));
        scratch[1].extend(old.iter().skip(c).step_by(dim));
        worst = worst.max(math::rel_change(&scratch[0], &scratch[1]));
    }
    worst
}

fn flatten_controls(c: &[ControlVector]) -> Vec<f64> {
    c.iter().flat_map(|c| [c.u, c.v, c.m]).collect()
}

/// Forward–backward sweep from zero controls.
pub fn solve_focp(problem: &Problem, sweep: &SweepConfig) -> Result<OptimalSolution> {
    problem.params.validate()?;
    problem.weights.validate()?;
    problem.bounds.validate()?;
    sweep.validate()?;
    let Problem {
        params,
        schedule,
        grid,
        initial,
        weights,
        bounds,
        strategy,
    } = problem;
    let aligned = schedule.align(grid)?;
    let pece = Pece::new(sweep.corrector_iterations)?;

    // scaled parameters in force at each node
    let mut node_params = Vec::with_capacity(grid.len());
    for (k, seg) in aligned.iter().enumerate() {
        let sp = alpha_scale(params, seg.order)?;
        let from = if k == 0 { 0 } else { seg.start + 1 };
        node_params.extend(core::iter::repeat(sp).take(seg.end + 1 - from));
    }

    let theta = sweep.relaxation;
    let mut controls = vec![ControlVector::ZERO; grid.len()];
    let mut prev: Option<(Trajectory, Trajectory)> = None;
    let mut history = Vec::new();
    let mut converged = false;
    let mut scratch = [Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len())];
    let mut adjoint = None;

    for iteration in 1..=sweep.max_iterations {
        let state = forward_state(params, schedule, grid, initial, &controls, &pece)?;
        let costate = backward_adjoint(params, schedule, weights, &state, &controls, &pece)?;
        let j = objective(&state, &controls, weights)?;

        let updated: Vec<ControlVector> = (0..grid.len())
            .map(|i| {
                let s = State::from_slice(state.row(i));
                let mut xi = [0.0; DIM];
                xi.copy_from_slice(costate.row(i));
                let p = project_controls(&s, &xi, &node_params[i], weights, bounds, strategy);
                let old = controls[i];
                ControlVector {
                    u: (theta * p.u + (1.0 - theta) * old.u).clamp(0.0, bounds.u_max),
                    v: (theta * p.v + (1.0 - theta) * old.v).clamp(0.0, bounds.v_max),
                    m: (theta * p.m + (1.0 - theta) * old.m).clamp(0.0, bounds.m_max),
                }
            })
            .collect();

        let mut change = max_series_change(
            &flatten_controls(&updated),
            &flatten_controls(&controls),
            3,
            &mut scratch,
        );
        change = change.max(match &prev {
            Some((ps, pa)) => max_series_change(state.as_flat(), ps.as_flat(), DIM, &mut scratch)
                .max(max_series_change(costate.as_flat(), pa.as_flat(), DIM, &mut scratch)),
            None => f64::INFINITY,
        });

        history.push(IterationLog {
            iteration,
            max_rel_change: change,
            objective: j,
        });
        controls = updated;
        adjoint = Some(costate.clone());
        prev = Some((state, costate));
        if change <= sweep.tolerance {
            converged = true;
            break;
        }
    }

    let state = forward_state(params, schedule, grid, initial, &controls, &pece)?;
    let objective = objective(&state, &controls, weights)?;
    Ok(OptimalSolution {
        state,
        adjoint: adjoint.expect("at least one iteration"),
        iterations: history.len(),
        controls,
        objective,
        converged,
        history,
    })
}
