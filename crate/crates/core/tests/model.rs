mod common;

use common::{baseline_grid, reference_r0};
use focp_core::model::{reproduction_numbers, rhs, CholeraSystem, Controls};
use focp_core::{alpha_scale, solve_caputo_ivp, solve_variable_order, ControlVector, ModelParams, OrderSchedule, State};
use proptest::prelude::*;

fn perturbed(scale: [f64; 6]) -> ModelParams {
    let mut p = ModelParams::baseline();
    p.beta1 *= scale[0];
    p.beta2 *= scale[1];
    p.varrho1 *= scale[2];
    p.varrho2 *= scale[3];
    p.a1 *= scale[4];
    p.b2 *= scale[5];
    p
}

#[test]
fn classical_scaling_is_identity() {
    let p = ModelParams::baseline();
    let sp = alpha_scale(&p, 1.0).unwrap();
    assert_eq!(sp.beta1, p.beta1);
    assert_eq!(sp.mu_p, p.mu_p);
    assert_eq!(sp.a2, p.a2);
    assert_eq!(sp.k, p.k);
    assert_eq!(sp.q2, p.mu_p - p.g1);
}

#[test]
fn baseline_scenario_is_endemic_and_asymmetric() {
    let sp = alpha_scale(&ModelParams::baseline(), 1.0).unwrap();
    let r = reproduction_numbers(&sp, 0.0, 0.0, 0.0).unwrap();
    assert!(r.r01 > 1.0 && r.r02 > 1.0);
    assert!(r.r01 != r.r02);
}

#[test]
fn uncontrolled_baseline_run_stays_nonnegative() {
    let grid = baseline_grid();
    for alpha in [1.0, 0.9, 0.68] {
        let sys = CholeraSystem::uncontrolled(alpha_scale(&ModelParams::baseline(), alpha).unwrap());
        let y = solve_caputo_ivp(&sys, alpha, &grid, &State::baseline().to_array(), 1).unwrap();
        assert!(y.as_flat().iter().all(|v| *v >= -1e-9));
    }
}

#[test]
fn fractint_run_is_continuous_at_switch() {
    let grid = baseline_grid();
    let p = ModelParams::baseline();
    let schedule = OrderSchedule::fractint(0.68, 7.0, 0.0, 100.0).unwrap();
    let y = solve_variable_order(
        |a| CholeraSystem::uncontrolled(alpha_scale(&p, a).unwrap()),
        &schedule,
        &grid,
        &State::baseline().to_array(),
        1,
    )
    .unwrap();
    let k = grid.index_of(7.0).unwrap();
    let step = |i: usize| -> f64 {
        y.row(i).iter().zip(y.row(i + 1)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    // the jump across the switch is no larger than ordinary neighbouring steps
    assert!(step(k) <= 2.0 * step(k - 1).max(step(k + 1)) + 1e-12);
}

#[test]
fn node_controls_reject_off_grid_time() {
    let grid = baseline_grid();
    let values = vec![ControlVector::ZERO; grid.len()];
    let c = Controls::Nodes { grid, values: &values };
    assert!(c.at(0.05).is_ok());
    assert!(c.at(0.0251).is_err());
}

proptest! {
    #[test]
    fn r0_matches_reference(scale in prop::array::uniform6(0.5f64..2.0), u in 0.0f64..1.0, m in 0.0f64..1.0, v in 0.0f64..1.0) {
        let p = perturbed(scale);
        let r = reproduction_numbers(&alpha_scale(&p, 1.0).unwrap(), u, m, v).unwrap();
        let (r01, r02) = reference_r0(&p, 1.0, u, m, v);
        prop_assert!((r.r01 - r01).abs() <= 1e-12 * r01.abs());
        prop_assert!((r.r02 - r02).abs() <= 1e-12 * r02.abs());
    }

    #[test]
    fn r0_matches_reference_at_fractional_order(alpha in 0.3f64..1.0, v in 0.0f64..1.0) {
        let p = ModelParams::baseline();
        let r = reproduction_numbers(&alpha_scale(&p, alpha).unwrap(), 0.0, 0.0, v).unwrap();
        let (r01, r02) = reference_r0(&p, alpha, 0.0, 0.0, v);
        prop_assert!((r.r01 - r01).abs() <= 1e-10 * r01.abs());
        prop_assert!((r.r02 - r02).abs() <= 1e-10 * r02.abs());
    }

    #[test]
    fn r0_never_grows_with_u_or_m(alpha in 0.5f64..=1.0, v in 0.0f64..1.0, lo in 0.0f64..1.0, d in 0.0f64..1.0) {
        let sp = alpha_scale(&ModelParams::baseline(), alpha).unwrap();
        let hi = (lo + d).min(1.0);
        let base = reproduction_numbers(&sp, lo, lo, v).unwrap();
        let more_u = reproduction_numbers(&sp, hi, lo, v).unwrap();
        let more_m = reproduction_numbers(&sp, lo, hi, v).unwrap();
        for r in [more_u, more_m] {
            prop_assert!(r.r01 <= base.r01 && r.r02 <= base.r02);
        }
    }

    #[test]
    fn swapping_communities_swaps_r0(scale in prop::array::uniform6(0.5f64..2.0), alpha in 0.4f64..=1.0, u in 0.0f64..1.0, m in 0.0f64..1.0, v in 0.0f64..1.0) {
        let p = perturbed(scale);
        let r = reproduction_numbers(&alpha_scale(&p, alpha).unwrap(), u, m, v).unwrap();
        let s = reproduction_numbers(&alpha_scale(&p.swapped(), alpha).unwrap(), u, m, v).unwrap();
        prop_assert!((r.r01 - s.r02).abs() <= 1e-12 * r.r01.abs());
        prop_assert!((r.r02 - s.r01).abs() <= 1e-12 * r.r02.abs());
    }

    #[test]
    fn swapping_communities_swaps_rhs(y in prop::array::uniform8(0.0f64..1.0), alpha in 0.4f64..=1.0, u in 0.0f64..1.0, m in 0.0f64..1.0, v in 0.0f64..1.0) {
        let p = ModelParams::baseline();
        let c = ControlVector::new(u, v, m);
        let s = State::from_slice(&y);
        let mirrored = State::from_slice(&[y[4], y[5], y[6], y[7], y[0], y[1], y[2], y[3]]);
        let a = rhs(&s, &c, &alpha_scale(&p, alpha).unwrap()).unwrap();
        let b = rhs(&mirrored, &c, &alpha_scale(&p.swapped(), alpha).unwrap()).unwrap();
        for i in 0..8 {
            prop_assert!((a[i] - b[(i + 4) % 8]).abs() <= 1e-12 * (1.0 + a[i].abs()));
        }
    }

    #[test]
    fn scaled_rates_are_powers(alpha in 0.05f64..=1.0) {
        let p = ModelParams::baseline();
        let sp = alpha_scale(&p, alpha).unwrap();
        prop_assert_eq!(sp.k, p.k);
        prop_assert!((sp.mu1 - p.mu1.powf(alpha)).abs() <= 1e-14);
        prop_assert!(sp.q2 > 0.0 && sp.q4 > 0.0);
    }

    #[test]
    fn controlled_runs_stay_nonnegative(alpha in 0.6f64..=1.0, u in 0.0f64..1.0, m in 0.0f64..1.0, v in 0.0f64..1.0) {
        let grid = focp_core::TimeGrid::new(0.0, 100.0, 500).unwrap();
        let sys = CholeraSystem::new(
            alpha_scale(&ModelParams::baseline(), alpha).unwrap(),
            Controls::Constant(ControlVector::new(u, v, m)),
        );
        let y = solve_caputo_ivp(&sys, alpha, &grid, &State::baseline().to_array(), 1).unwrap();
        prop_assert!(y.as_flat().iter().all(|x| *x >= -1e-9));
    }
}
