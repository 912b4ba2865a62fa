use focp_core::costeff::{efficacy_series, icer_ranking, StrategyOutcome};
use focp_core::focp::{forward_state, solve_focp, OptimalSolution, Problem, Strategy};
use focp_core::fode::Pece;
use focp_core::model::reproduction_numbers;
use focp_core::sensitivity::{index_vs_alpha, index_vs_control, table, BasePoint, SensitivityRow, Target};
use focp_core::{alpha_scale, OrderSchedule, State, Trajectory};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::output::{num, ratio, OutDir};
use crate::plot::{line_chart, Series};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensitivityMode {
    Table,
    VsAlpha,
    VsControl,
}

fn times(cfg: &RunConfig) -> Vec<f64> {
    cfg.grid.nodes().collect()
}

fn state_rows<'a>(ts: &'a [f64], y: &'a Trajectory) -> impl Iterator<Item = Vec<String>> + 'a {
    ts.iter()
        .zip(y.rows())
        .map(|(t, r)| std::iter::once(num(*t)).chain(r.iter().map(|v| num(*v))).collect())
}

const STATE_HEADER: [&str; 9] = ["t", "S1", "I1", "R1", "B1", "S2", "I2", "R2", "B2"];

pub fn simulate(cfg: &RunConfig, out: &OutDir) -> Result<(), CliError> {
    let controls = vec![cfg.controls; cfg.grid.len()];
    let pece = Pece::new(cfg.sweep.corrector_iterations)?;
    let y = forward_state(&cfg.params, &cfg.schedule, &cfg.grid, &cfg.initial, &controls, &pece)?;
    let ts = times(cfg);
    out.csv("trajectory.csv", &STATE_HEADER, state_rows(&ts, &y))?;
    if cfg.output.plot {
        for (c, name) in State::NAMES.iter().enumerate() {
            let svg = line_chart(name, "t (days)", name, &[Series::new(*name, &ts, y.component(c))]);
            out.text(&format!("trajectory_{name}.svg"), &svg)?;
        }
    }
    println!("[simulate] {} nodes written to {}", ts.len(), out.path("trajectory.csv").display());
    Ok(())
}

/// Smallest scanned order from which both numbers stay above 1.
pub fn endemic_threshold(rows: &[(f64, f64, f64)]) -> Option<f64> {
    let endemic: Vec<bool> = rows.iter().map(|r| r.1 > 1.0 && r.2 > 1.0).collect();
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].0.total_cmp(&rows[b].0));
    let mut best = None;
    for &i in order.iter().rev() {
        if !endemic[i] {
            break;
        }
        best = Some(rows[i].0);
    }
    best
}

pub fn r0(cfg: &RunConfig, out: &OutDir) -> Result<(), CliError> {
    let c = cfg.controls;
    let rows = cfg
        .r0_alphas
        .iter()
        .map(|&a| {
            let r = reproduction_numbers(&alpha_scale(&cfg.params, a)?, c.u, c.m, c.v)?;
            Ok((a, r.r01, r.r02))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    out.csv(
        "r0_vs_alpha.csv",
        &["alpha", "R01", "R02"],
        rows.iter().map(|r| vec![num(r.0), num(r.1), num(r.2)]),
    )?;
    let report = match endemic_threshold(&rows) {
        Some(a) => format!("smallest scanned alpha with R01 > 1 and R02 > 1 for it and every larger scanned alpha: {}\n", num(a)),
        None => "no scanned alpha has R01 > 1 and R02 > 1 up to the largest scanned alpha\n".to_string(),
    };
    out.text("r0_threshold.txt", &report)?;
    if cfg.output.plot {
        let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let svg = line_chart(
            "Reproduction numbers",
            "alpha",
            "R0",
            &[
                Series::new("R01", &xs, rows.iter().map(|r| r.1)),
                Series::new("R02", &xs, rows.iter().map(|r| r.2)),
            ],
        );
        out.text("r0_vs_alpha.svg", &svg)?;
    }
    print!("[r0] {}", report);
    Ok(())
}

fn constant_order(cfg: &RunConfig) -> Result<f64, CliError> {
    match cfg.schedule.segments() {
        [only] => Ok(only.order),
        _ => Err(CliError::Config("sensitivity needs a constant order (set order.alpha, no segments)".into())),
    }
}

pub fn sensitivity(cfg: &RunConfig, out: &OutDir, mode: SensitivityMode) -> Result<(), CliError> {
    let base = BasePoint {
        params: cfg.params,
        controls: cfg.controls,
        alpha: constant_order(cfg)?,
    };
    let (name, rows): (&str, Vec<SensitivityRow>) = match mode {
        SensitivityMode::Table => ("sensitivity_table", table(&base)?),
        SensitivityMode::VsAlpha => {
            let mut rows = Vec::new();
            for t in Target::BOTH {
                for &p in &cfg.sensitivity_params {
                    rows.extend(index_vs_alpha(&base, t, p, &cfg.sensitivity_alphas)?);
                }
            }
            ("sensitivity_vs_alpha", rows)
        }
        SensitivityMode::VsControl => {
            let mut rows = Vec::new();
            for t in Target::BOTH {
                for &c in &cfg.sensitivity_controls {
                    rows.extend(index_vs_control(&base, t, c, &cfg.sensitivity_levels)?);
                }
            }
            ("sensitivity_vs_control", rows)
        }
    };
    out.csv(
        &format!("{name}.csv"),
        &["target", "parameter", "alpha", "level", "index"],
        rows.iter().map(|r| {
            vec![
                r.target.name().to_string(),
                r.parameter.name().to_string(),
                num(r.alpha),
                r.level.map(num).unwrap_or_default(),
                num(r.index),
            ]
        }),
    )?;
    if cfg.output.plot && mode != SensitivityMode::Table {
        for t in Target::BOTH {
            let mut series: Vec<Series> = Vec::new();
            for r in rows.iter().filter(|r| r.target == t) {
                let x = r.level.unwrap_or(r.alpha);
                match series.iter_mut().find(|s| s.name == r.parameter.name()) {
                    Some(s) => s.points.push((x, r.index)),
                    None => series.push(Series {
                        name: r.parameter.name().into(),
                        points: vec![(x, r.index)],
                    }),
                }
            }
            let x_label = if mode == SensitivityMode::VsAlpha { "alpha" } else { "control level" };
            let svg = line_chart(&format!("Sensitivity of {}", t.name()), x_label, "index", &series);
            out.text(&format!("{name}_{}.svg", t.name()), &svg)?;
        }
    }
    println!("[sensitivity] {} indices written to {}", rows.len(), out.path(&format!("{name}.csv")).display());
    Ok(())
}

fn problem(cfg: &RunConfig, schedule: OrderSchedule, strategy: Strategy) -> Problem {
    Problem {
        params: cfg.params,
        schedule,
        grid: cfg.grid,
        initial: cfg.initial,
        weights: cfg.weights,
        bounds: cfg.bounds,
        strategy,
    }
}

fn solve(cfg: &RunConfig, schedule: OrderSchedule, strategy: Strategy) -> Result<OptimalSolution, CliError> {
    Ok(solve_focp(&problem(cfg, schedule, strategy), &cfg.sweep)?)
}

fn non_convergence(opt: &OptimalSolution) -> CliError {
    CliError::NonConvergence {
        iterations: opt.iterations,
        change: opt.last_change(),
    }
}

/// Write the standard file set of one optimal-control run.
pub fn write_solution(cfg: &RunConfig, out: &OutDir, opt: &OptimalSolution) -> Result<(), CliError> {
    let ts = times(cfg);
    out.csv(
        "controls.csv",
        &["t", "u", "v", "m"],
        ts.iter().zip(&opt.controls).map(|(t, c)| vec![num(*t), num(c.u), num(c.v), num(c.m)]),
    )?;
    out.csv("optimal_trajectory.csv", &STATE_HEADER, state_rows(&ts, &opt.state))?;
    out.csv(
        "adjoint.csv",
        &["t", "xi1", "xi2", "xi3", "xi4", "xi5", "xi6", "xi7", "xi8"],
        state_rows(&ts, &opt.adjoint),
    )?;
    out.csv(
        "convergence.csv",
        &["iteration", "max_rel_change", "J"],
        opt.history
            .iter()
            .map(|h| vec![h.iteration.to_string(), num(h.max_rel_change), num(h.objective)]),
    )?;
    let f = efficacy_series(opt, cfg.cost()?.i0)?;
    out.csv("efficacy.csv", &["t", "F"], ts.iter().zip(&f).map(|(t, v)| vec![num(*t), num(*v)]))?;
    if cfg.output.plot {
        let one = |name: &str, file: &str, ys: Vec<f64>| -> Result<(), CliError> {
            out.text(file, &line_chart(name, "t (days)", name, &[Series::new(name, &ts, ys)]))
        };
        one("I1", "optimal_I1.svg", opt.state.component(1).collect())?;
        one("I2", "optimal_I2.svg", opt.state.component(5).collect())?;
        one("v", "control_v.svg", opt.controls.iter().map(|c| c.v).collect())?;
        one("m", "control_m.svg", opt.controls.iter().map(|c| c.m).collect())?;
        one("F", "efficacy.svg", f)?;
    }
    Ok(())
}

fn outcome(cfg: &RunConfig, label: &str, opt: &OptimalSolution) -> Result<StrategyOutcome, CliError> {
    Ok(StrategyOutcome::from_solution(label, opt, &cfg.cost()?))
}

pub fn optimize(cfg: &RunConfig, out: &OutDir, strategy: Strategy) -> Result<(), CliError> {
    let opt = solve(cfg, cfg.schedule.clone(), strategy)?;
    write_solution(cfg, out, &opt)?;
    let o = outcome(cfg, strategy.label(), &opt)?;
    println!(
        "[optimize] strategy {}: {} iterations (converged: {}), J = {}, AV = {}, TC = {}, ACER = {}, Fbar = {}",
        strategy.label(),
        opt.iterations,
        opt.converged,
        num(opt.objective),
        num(o.av),
        num(o.tc),
        ratio(o.acer),
        num(o.fbar)
    );
    if opt.converged {
        Ok(())
    } else {
        Err(non_convergence(&opt))
    }
}

pub fn costeff(cfg: &RunConfig, out: &OutDir) -> Result<(), CliError> {
    let cost = cfg.cost()?;
    let mut failed = None;
    let outcomes: Vec<StrategyOutcome> = if !cfg.outcomes.is_empty() {
        cfg.outcomes
            .iter()
            .map(|o| StrategyOutcome::from_measures(o.label.clone(), o.av, o.tc, &cost))
            .collect()
    } else if cfg.strategies.is_empty() {
        return Err(CliError::Config("no strategies and no stored outcomes to rank".into()));
    } else {
        let runs = cfg
            .strategies
            .par_iter()
            .map(|s| solve(cfg, cfg.schedule.clone(), *s).map(|o| (s.label(), o)))
            .collect::<Result<Vec<_>, _>>()?;
        failed = runs.iter().find(|r| !r.1.converged).map(|r| non_convergence(&r.1));
        runs.iter().map(|(l, o)| StrategyOutcome::from_solution(*l, o, &cost)).collect()
    };

    out.csv(
        "costeff_outcomes.csv",
        &["strategy", "AV", "TC", "ACER", "Fbar"],
        outcomes
            .iter()
            .map(|o| vec![o.label.clone(), num(o.av), num(o.tc), ratio(o.acer), num(o.fbar)]),
    )?;
    let report = icer_ranking(&outcomes, cfg.orientation, cfg.ranking)?;
    out.csv(
        "icer.csv",
        &["strategy", "AV", "TC", "ICER", "eliminated", "pass"],
        report.passes.iter().enumerate().flat_map(|(k, rows)| {
            rows.iter().map(move |r| {
                vec![
                    r.label.clone(),
                    num(r.av),
                    num(r.tc),
                    ratio(r.icer),
                    r.eliminated.to_string(),
                    (k + 1).to_string(),
                ]
            })
        }),
    )?;
    println!(
        "[costeff] ranked {} strategies; eliminated [{}]; retained [{}]",
        outcomes.len(),
        report.eliminated.join(", "),
        report.survivors.join(", ")
    );
    failed.map_or(Ok(()), Err)
}

pub fn fractint(cfg: &RunConfig, out: &OutDir, strategy: Strategy, scan: bool) -> Result<(), CliError> {
    let fi = cfg.fractint;
    let (t0, tf) = (cfg.grid.t0(), cfg.grid.tf());
    let candidates: Vec<f64> = if scan {
        let n = ((tf - t0) / fi.scan_step).round() as usize;
        let ts: Vec<f64> = (0..=n).map(|k| (t0 + k as f64 * fi.scan_step).min(tf)).collect();
        for &t in &ts {
            cfg.grid
                .index_of(t)
                .map_err(|_| CliError::Config(format!("scan switch time {t} is not a grid node")))?;
        }
        ts
    } else {
        vec![fi.t_prime]
    };
    let runs = candidates
        .par_iter()
        .map(|&tp| {
            let schedule = OrderSchedule::fractint(fi.alpha0, tp, t0, tf)
                .and_then(|s| s.align(&cfg.grid).map(|_| s))
                .map_err(|e| CliError::Config(format!("fractint switch time {tp}: {e}")))?;
            let opt = solve(cfg, schedule, strategy)?;
            let o = outcome(cfg, strategy.label(), &opt)?;
            Ok((tp, opt, o))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    out.csv(
        "fractint_summary.csv",
        &["alpha0", "t_prime", "AV", "TC", "ACER", "Fbar"],
        runs.iter()
            .map(|(tp, _, o)| vec![num(fi.alpha0), num(*tp), num(o.av), num(o.tc), ratio(o.acer), num(o.fbar)]),
    )?;
    // first maximizer on ties
    let best = runs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .2.fbar.total_cmp(&b.1 .2.fbar).then(b.0.cmp(&a.0)))
        .map(|(_, r)| r)
        .expect("at least one candidate");
    write_solution(cfg, out, &best.1)?;
    println!(
        "[fractint] alpha0 = {}, {} switch time(s); best t' = {} with Fbar = {} (AV = {}, TC = {})",
        num(fi.alpha0),
        runs.len(),
        num(best.0),
        num(best.2.fbar),
        num(best.2.av),
        num(best.2.tc)
    );
    match runs.iter().find(|r| !r.1.converged) {
        Some(r) => Err(non_convergence(&r.1)),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_requires_every_larger_order() {
        let rows = [(0.5, 0.9, 2.0), (0.6, 1.1, 1.2), (0.7, 0.99, 1.3), (0.8, 1.2, 1.4), (0.9, 1.3, 1.5)];
        assert_eq!(endemic_threshold(&rows), Some(0.8));
        assert_eq!(endemic_threshold(&rows[..3]), None);
        assert_eq!(endemic_threshold(&[(1.0, 2.0, 2.0)]), Some(1.0));
    }
}
