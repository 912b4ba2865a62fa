//! Reference computations shared by the integration and acceptance tests.
//! Nothing here calls into the code path it is used to check.
#![allow(dead_code)]

use focp_core::costeff::StrategyOutcome;
use focp_core::focp::{hamiltonian, AdjointState, ControlBounds, CostWeights, Problem, Strategy};
use focp_core::model::DIM;
use focp_core::{ControlVector, ModelParams, OrderSchedule, Rhs, ScaledParams, State, TimeGrid};

/// Classical fourth-order Runge–Kutta on the nodes of `grid`.
pub fn rk4<R: Rhs>(rhs: &R, grid: &TimeGrid, y0: &[f64]) -> Vec<Vec<f64>> {
    let d = y0.len();
    let h = grid.step();
    let mut out = vec![y0.to_vec()];
    let mut y = y0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut tmp = vec![0.0; d];
    for i in 0..grid.n_steps() {
        let t = grid.node(i);
        rhs.eval(t, &y, &mut k1).unwrap();
        for c in 0..d {
            tmp[c] = y[c] + 0.5 * h * k1[c];
        }
        rhs.eval(t + 0.5 * h, &tmp, &mut k2).unwrap();
        for c in 0..d {
            tmp[c] = y[c] + 0.5 * h * k2[c];
        }
        rhs.eval(t + 0.5 * h, &tmp, &mut k3).unwrap();
        for c in 0..d {
            tmp[c] = y[c] + h * k3[c];
        }
        rhs.eval(t + h, &tmp, &mut k4).unwrap();
        for c in 0..d {
            y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        out.push(y.clone());
    }
    out
}

/// Lanczos approximation of the gamma function (g = 7, n = 9), independent
/// of the solver's `libm` gamma.
pub fn lanczos_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * lanczos_gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Exact solution of `D^alpha y = t^p`, `y(0) = 0`:
/// `Gamma(p+1) / Gamma(p+1+alpha) t^(p+alpha)`.
pub fn caputo_monomial(alpha: f64, p: f64, t: f64) -> f64 {
    lanczos_gamma(p + 1.0) / lanczos_gamma(p + 1.0 + alpha) * t.powf(p + alpha)
}

/// Baseline problem on the default grid.
pub fn baseline_problem(schedule: OrderSchedule, strategy: Strategy) -> Problem {
    Problem {
        params: ModelParams::baseline(),
        schedule,
        grid: baseline_grid(),
        initial: State::baseline(),
        weights: CostWeights::BASELINE,
        bounds: ControlBounds::UNIT,
        strategy,
    }
}

pub fn baseline_grid() -> TimeGrid {
    TimeGrid::new(0.0, 100.0, 2000).unwrap()
}

/// Reproduction numbers recomputed from the unscaled rates with explicit
/// powers and the expanded denominator `D1 D2 - a1 a2`.
pub fn reference_r0(p: &ModelParams, alpha: f64, u: f64, m: f64, v: f64) -> (f64, f64) {
    let e = |x: f64| x.powf(alpha);
    let q1 = e(p.mu1) + e(p.delta1) + e(p.gamma1) + e(p.b1);
    let q2 = e(p.mu_p) - e(p.g1);
    let q3 = e(p.mu2) + e(p.delta2) + e(p.gamma2) + e(p.b2);
    let q4 = e(p.mu_p) - e(p.g2);
    let d1 = e(p.mu1) + e(p.a1) + v;
    let d2 = e(p.mu2) + e(p.a2) + v;
    let det = d1 * d2 - e(p.a1) * e(p.a2);
    let r01 = (e(p.pi1) * d2 + e(p.a2) * e(p.pi2)) * ((1.0 - u) * e(p.beta1) * e(p.sigma1) / p.k + (1.0 - m) * q2 * e(p.varrho1))
        / (q1 * q2 * det);
    let r02 = (e(p.pi2) * d1 + e(p.a1) * e(p.pi1)) * ((1.0 - u) * e(p.beta2) * e(p.sigma2) / p.k + (1.0 - m) * q4 * e(p.varrho2))
        / (q3 * q4 * det);
    (r01, r02)
}

/// Central-difference gradient of the Hamiltonian in the state variables,
/// Richardson-extrapolated from steps `h` and `h/2`.
pub fn hamiltonian_state_gradient(
    s: &State,
    xi: &AdjointState,
    c: &ControlVector,
    sp: &ScaledParams,
    w: &CostWeights,
) -> [f64; DIM] {
    let x0 = s.to_array();
    let mut g = [0.0; DIM];
    for i in 0..DIM {
        let h = 1e-3 * x0[i].abs().max(1e-2);
        let diff = |h: f64| {
            let (mut up, mut dn) = (x0, x0);
            up[i] += h;
            dn[i] -= h;
            let hu = hamiltonian(&State::from_slice(&up), xi, c, sp, w).unwrap();
            let hd = hamiltonian(&State::from_slice(&dn), xi, c, sp, w).unwrap();
            (hu - hd) / (2.0 * h)
        };
        let (d1, d2) = (diff(h), diff(0.5 * h));
        g[i] = (4.0 * d2 - d1) / 3.0;
    }
    g
}

/// Labels of strategies not strongly dominated by any other, by exhaustive
/// pairwise comparison.
pub fn pareto_labels(outcomes: &[StrategyOutcome]) -> Vec<String> {
    let mut out: Vec<String> = outcomes
        .iter()
        .filter(|b| {
            !outcomes.iter().any(|a| {
                !std::ptr::eq(a, *b) && a.tc <= b.tc && a.av >= b.av && (a.tc < b.tc || a.av > b.av)
            })
        })
        .map(|o| o.label.clone())
        .collect();
    out.sort();
    out
}

/// Round to `sig` significant figures.
pub fn round_sig(x: f64, sig: i32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mag = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(sig - 1 - mag);
    (x * scale).round() / scale
}
