mod common;

use common::{hamiltonian_state_gradient, baseline_grid, baseline_problem};
use focp_core::focp::{
    adjoint_rhs, objective, project_controls, solve_focp, ControlBounds, CostWeights, OptimalSolution, Strategy,
    SweepConfig,
};
use focp_core::model::{CholeraSystem, DIM};
use focp_core::{
    alpha_scale, solve_caputo_ivp, ControlVector, ModelParams, OrderSchedule, State, TimeGrid, Trajectory,
};
use proptest::prelude::*;
use proptest::strategy::Strategy as _;
use std::sync::OnceLock;

fn classical(strategy: Strategy) -> OptimalSolution {
    solve_focp(
        &baseline_problem(OrderSchedule::constant(1.0, 100.0).unwrap(), strategy),
        &SweepConfig::default(),
    )
    .unwrap()
}

fn strategy_c() -> &'static OptimalSolution {
    static RUN: OnceLock<OptimalSolution> = OnceLock::new();
    RUN.get_or_init(|| classical(Strategy::C))
}

fn flat(grid: TimeGrid, row: [f64; DIM]) -> Trajectory {
    let data = (0..grid.len()).flat_map(|_| row).collect();
    Trajectory::from_rows(grid, DIM, data).unwrap()
}

#[test]
fn objective_of_rectangle() {
    let grid = TimeGrid::new(0.0, 100.0, 40).unwrap();
    let zero = vec![ControlVector::ZERO; grid.len()];
    let w = CostWeights::BASELINE;
    assert_eq!(objective(&flat(grid, [0.0; DIM]), &zero, &w).unwrap(), 0.0);
    let mut row = [0.0; DIM];
    row[1] = 1.0;
    assert!((objective(&flat(grid, row), &zero, &w).unwrap() - 400.0).abs() < 1e-9);
    assert!(objective(&flat(grid, row), &zero[1..], &w).is_err());
}

#[test]
fn vanishing_costate_leaves_running_cost_weights() {
    let sp = alpha_scale(&ModelParams::baseline(), 0.8).unwrap();
    let s = State::baseline();
    let c = ControlVector::new(0.2, 0.3, 0.4);
    let out = adjoint_rhs(&[0.0; DIM], &s, &c, &sp, &CostWeights::BASELINE).unwrap();
    let mut want = [0.0; DIM];
    want[1] = CostWeights::BASELINE.k1;
    want[5] = CostWeights::BASELINE.k2;
    assert_eq!(out, want);
    let w = CostWeights { k1: 0.0, k2: 0.0, ..CostWeights::BASELINE };
    assert_eq!(adjoint_rhs(&[0.0; DIM], &s, &c, &sp, &w).unwrap(), [0.0; DIM]);
}

#[test]
fn projection_examples() {
    let sp = alpha_scale(&ModelParams::baseline(), 1.0).unwrap();
    let s = State::baseline();
    let (w, b) = (CostWeights::BASELINE, ControlBounds::UNIT);
    assert_eq!(project_controls(&s, &[0.0; DIM], &sp, &w, &b, &Strategy::C), ControlVector::ZERO);
    let mut xi = [0.0; DIM];
    xi[0] = 100.0;
    xi[4] = 100.0;
    assert_eq!(project_controls(&s, &xi, &sp, &w, &b, &Strategy::C).v, 1.0);
    assert_eq!(project_controls(&s, &xi, &sp, &w, &b, &Strategy::B).v, 0.0);
    // interior value is inverse-linear in k4
    xi[0] = 0.5;
    xi[4] = 0.2;
    let v1 = project_controls(&s, &xi, &sp, &w, &b, &Strategy::A).v;
    let v2 = project_controls(&s, &xi, &sp, &CostWeights { k4: 2.0 * w.k4, ..w }, &b, &Strategy::A).v;
    assert!(v1 > 0.0 && v1 < 1.0);
    assert!((v2 - 0.5 * v1).abs() < 1e-15);
}

#[test]
fn classical_sweep_properties() {
    let opt = strategy_c();
    assert!(opt.converged);
    assert!(opt.last_change() <= SweepConfig::default().tolerance);
    assert!(opt.controls.iter().all(|c| ControlBounds::UNIT.contains(c) && c.u == 0.0));
    assert!(opt.adjoint.last().iter().all(|x| *x == 0.0));
    assert!(opt.objective.is_finite() && opt.objective > 0.0);
    assert!(opt.state.as_flat().iter().all(|x| *x >= -1e-9));

    let tail: Vec<f64> = opt.history.iter().rev().take(5).map(|h| h.max_rel_change).collect();
    assert!(tail.windows(2).all(|w| w[0] <= w[1]), "tail {tail:?}");

    let js: Vec<f64> = opt.history.iter().skip(1).map(|h| h.objective).collect();
    assert!(js.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)), "J {js:?}");
    assert!(opt.objective <= opt.history[0].objective);
}

#[test]
fn larger_admissible_set_costs_no_more() {
    let b = classical(Strategy::B);
    assert!(b.controls.iter().all(|c| c.u == 0.0 && c.v == 0.0));
    assert!(strategy_c().objective <= b.objective);
}

#[test]
fn prohibitive_control_costs_switch_controls_off() {
    let mut problem = baseline_problem(OrderSchedule::constant(1.0, 100.0).unwrap(), Strategy::C);
    problem.weights = CostWeights { k3: 1e9, k4: 1e9, k5: 1e9, ..problem.weights };
    let opt = solve_focp(&problem, &SweepConfig::default()).unwrap();
    assert!(opt.controls.iter().all(|c| c.v < 1e-3 && c.m < 1e-3));
    let sys = CholeraSystem::uncontrolled(alpha_scale(&problem.params, 1.0).unwrap());
    let free = solve_caputo_ivp(&sys, 1.0, &problem.grid, &problem.initial.to_array(), 1).unwrap();
    let dev = opt.state.as_flat().iter().zip(free.as_flat()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(dev < 1e-3, "deviation {dev}");
}

#[test]
fn fractint_sweep_is_continuous_at_switch() {
    let problem = baseline_problem(OrderSchedule::fractint(0.68, 7.0, 0.0, 100.0).unwrap(), Strategy::C);
    let opt = solve_focp(&problem, &SweepConfig::default()).unwrap();
    let grid = baseline_grid();
    let k = grid.index_of(7.0).unwrap();
    let jump = |i: usize| {
        opt.state.row(i).iter().zip(opt.state.row(i + 1)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    assert!(jump(k) <= 2.0 * jump(k - 1).max(jump(k + 1)) + 1e-12);
    assert!(opt.controls.iter().all(|c| ControlBounds::UNIT.contains(c)));
    assert!(opt.adjoint.last().iter().all(|x| *x == 0.0));
}

#[test]
fn iteration_cap_reports_non_convergence() {
    let problem = baseline_problem(OrderSchedule::constant(1.0, 100.0).unwrap(), Strategy::C);
    let opt = solve_focp(&problem, &SweepConfig { max_iterations: 2, ..SweepConfig::default() }).unwrap();
    assert!(!opt.converged);
    assert_eq!(opt.iterations, 2);
}

#[test]
fn sweep_config_is_validated() {
    let problem = baseline_problem(OrderSchedule::constant(1.0, 100.0).unwrap(), Strategy::C);
    for bad in [
        SweepConfig { relaxation: 0.0, ..SweepConfig::default() },
        SweepConfig { relaxation: 1.5, ..SweepConfig::default() },
        SweepConfig { tolerance: 0.0, ..SweepConfig::default() },
        SweepConfig { max_iterations: 0, ..SweepConfig::default() },
    ] {
        assert!(solve_focp(&problem, &bad).is_err());
    }
}

fn unit_state() -> impl proptest::strategy::Strategy<Value = State> {
    prop::array::uniform8(0.0f64..1.0).prop_map(|y: [f64; DIM]| State::from_slice(&y))
}

proptest! {
    #[test]
    fn projected_controls_respect_bounds(
        s in unit_state(),
        xi in prop::array::uniform8(-1e3f64..1e3),
        v_max in 0.0f64..1.0,
        m_max in 0.0f64..1.0,
        alpha in 0.5f64..=1.0,
    ) {
        let sp = alpha_scale(&ModelParams::baseline(), alpha).unwrap();
        let b = ControlBounds { u_max: 1.0, v_max, m_max };
        for strategy in [Strategy::A, Strategy::B, Strategy::C] {
            let c = project_controls(&s, &xi, &sp, &CostWeights::BASELINE, &b, &strategy);
            prop_assert!(b.contains(&c));
            prop_assert_eq!(c.u, 0.0);
        }
    }

    #[test]
    fn costate_rhs_is_hamiltonian_gradient(
        s in unit_state(),
        xi in prop::array::uniform8(-10.0f64..10.0),
        c in (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0),
        alpha in 0.5f64..=1.0,
    ) {
        let sp = alpha_scale(&ModelParams::baseline(), alpha).unwrap();
        let c = ControlVector::new(c.0, c.1, c.2);
        let w = CostWeights::BASELINE;
        let got = adjoint_rhs(&xi, &s, &c, &sp, &w).unwrap();
        let g = hamiltonian_state_gradient(&s, &xi, &c, &sp, &w);
        let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..DIM {
            prop_assert!((got[i] - g[i]).abs() <= 1e-6 * g[i].abs().max(scale));
        }
    }
}
