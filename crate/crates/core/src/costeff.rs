//! Cost-effectiveness measures of optimal control runs and incremental
//! cost-effectiveness ranking.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::focp::OptimalSolution;
use crate::math;
use crate::model::State;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostEffConfig {
    /// Unit cost of vaccinating one susceptible.
    pub c1: f64,
    /// Unit cost of hygiene practice per infected.
    pub c2: f64,
    /// Horizon length in days.
    pub tf: f64,
    /// Initial infectious total `I1(0) + I2(0)`.
    pub i0: f64,
}

impl CostEffConfig {
    pub fn new(c1: f64, c2: f64, tf: f64, i0: f64) -> Result<Self> {
        if !(c1 >= 0.0 && c2 >= 0.0) {
            return Err(Error::InvalidCostInput("unit costs must be nonnegative"));
        }
        if !(i0 > 0.0) {
            return Err(Error::InvalidCostInput("initial infectious total must be positive"));
        }
        if !(tf > 0.0) {
            return Err(Error::InvalidCostInput("horizon must be positive"));
        }
        Ok(Self { c1, c2, tf, i0 })
    }

    /// Unit costs with horizon and `i0` taken from a solved problem.
    pub fn for_solution(c1: f64, c2: f64, opt: &OptimalSolution) -> Result<Self> {
        let g = opt.grid();
        Self::new(c1, c2, g.tf() - g.t0(), opt.state_at(0).infectious())
    }
}

/// A quotient that may have a vanishing denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Finite(f64),
    PosInfinite,
    NegInfinite,
    /// `0 / 0`.
    Undefined,
}

impl Ratio {
    pub fn of(num: f64, den: f64) -> Self {
        if den != 0.0 {
            Ratio::Finite(num / den)
        } else if num > 0.0 {
            Ratio::PosInfinite
        } else if num < 0.0 {
            Ratio::NegInfinite
        } else {
            Ratio::Undefined
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Ratio::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Finite(v) => write!(f, "{v}"),
            Ratio::PosInfinite => f.write_str("inf"),
            Ratio::NegInfinite => f.write_str("-inf"),
            Ratio::Undefined => f.write_str("undefined"),
        }
    }
}

/// `F(t) = 1 - i(t) / i0` for an infectious series.
pub fn efficacy_from_infectious(infectious: impl IntoIterator<Item = f64>, i0: f64) -> Result<Vec<f64>> {
    if !(i0 > 0.0) {
        return Err(Error::InvalidCostInput("initial infectious total must be positive"));
    }
    Ok(infectious.into_iter().map(|i| 1.0 - i / i0).collect())
}

fn infectious_series(opt: &OptimalSolution) -> impl Iterator<Item = f64> + '_ {
    opt.state.rows().map(|r| State::from_slice(r).infectious())
}

pub fn efficacy_series(opt: &OptimalSolution, i0: f64) -> Result<Vec<f64>> {
    efficacy_from_infectious(infectious_series(opt), i0)
}

/// `AV = tf i0 - int i(t) dt` by the trapezoid rule on step `h`.
pub fn averted_from_infectious(h: f64, infectious: impl IntoIterator<Item = f64>, cfg: &CostEffConfig) -> f64 {
    cfg.tf * cfg.i0 - math::trapezoid(h, infectious)
}

pub fn averted_cases(opt: &OptimalSolution, cfg: &CostEffConfig) -> f64 {
    averted_from_infectious(opt.grid().step(), infectious_series(opt), cfg)
}

/// `F_bar = AV / (i0 tf)`.
pub fn effectiveness(av: f64, cfg: &CostEffConfig) -> f64 {
    av / (cfg.i0 * cfg.tf)
}

/// `TC = int (C1 v s + C2 m i) dt` by the trapezoid rule.
pub fn total_cost(opt: &OptimalSolution, cfg: &CostEffConfig) -> f64 {
    let h = opt.grid().step();
    math::trapezoid(
        h,
        opt.state.rows().zip(&opt.controls).map(|(r, c)| {
            let s = State::from_slice(r);
            cfg.c1 * c.v * s.susceptible() + cfg.c2 * c.m * s.infectious()
        }),
    )
}

/// `ACER = TC / AV`.
pub fn acer(tc: f64, av: f64) -> Ratio {
    Ratio::of(tc, av)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyOutcome {
    pub label: String,
    pub av: f64,
    pub tc: f64,
    pub acer: Ratio,
    pub fbar: f64,
}

impl StrategyOutcome {
    pub fn from_measures(label: impl Into<String>, av: f64, tc: f64, cfg: &CostEffConfig) -> Self {
        Self {
            label: label.into(),
            av,
            tc,
            acer: acer(tc, av),
            fbar: effectiveness(av, cfg),
        }
    }

    pub fn from_solution(label: impl Into<String>, opt: &OptimalSolution, cfg: &CostEffConfig) -> Self {
        Self::from_measures(label, averted_cases(opt, cfg), total_cost(opt, cfg), cfg)
    }
}

/// Which incremental quotient is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `dTC / dAV`, additional cost per additional averted case.
    CostPerEffect,
    /// `dAV / dTC`.
    EffectPerCost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankingKey {
    IncreasingAv,
    DecreasingTc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcerRow {
    pub label: String,
    pub av: f64,
    pub tc: f64,
    pub icer: Ratio,
    /// Removed at the end of this pass.
    pub eliminated: bool,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcerReport {
    /// Ranked rows of every pass, first pass first.
    pub passes: Vec<Vec<IcerRow>>,
    /// Labels in elimination order.
    pub eliminated: Vec<String>,
    /// Labels never eliminated, in ranking order.
    pub survivors: Vec<String>,
}

fn dominates(a: &StrategyOutcome, b: &StrategyOutcome) -> bool {
    a.tc <= b.tc && a.av >= b.av && (a.tc < b.tc || a.av > b.av)
}

/// Rank, compute incremental ratios, and repeatedly drop the costliest
/// strongly dominated strategy until none is left.
///
/// The first ranked row always reports its ACER; each later row compares with
/// the previous retained row.
pub fn icer_ranking(outcomes: &[StrategyOutcome], orientation: Orientation, key: RankingKey) -> Result<IcerReport> {
    if outcomes.is_empty() {
        return Err(Error::InvalidCostInput("no strategies to rank"));
    }
    let mut order: Vec<usize> = (0..outcomes.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&outcomes[i], &outcomes[j]);
        match key {
            RankingKey::IncreasingAv => a.av.total_cmp(&b.av),
            RankingKey::DecreasingTc => b.tc.total_cmp(&a.tc),
        }
    });

    let mut passes = Vec::new();
    let mut eliminated = Vec::new();
    loop {
        let mut rows: Vec<IcerRow> = Vec::with_capacity(order.len());
        for (pos, &i) in order.iter().enumerate() {
            let o = &outcomes[i];
            let icer = if pos == 0 {
                o.acer
            } else {
                let p = &outcomes[order[pos - 1]];
                let (d_tc, d_av) = (o.tc - p.tc, o.av - p.av);
                match orientation {
                    Orientation::CostPerEffect => Ratio::of(d_tc, d_av),
                    Orientation::EffectPerCost => Ratio::of(d_av, d_tc),
                }
            };
            rows.push(IcerRow {
                label: o.label.clone(),
                av: o.av,
                tc: o.tc,
                icer,
                eliminated: false,
                orientation,
            });
        }

        let victim = order
            .iter()
            .enumerate()
            .filter(|&(_, &i)| order.iter().any(|&j| j != i && dominates(&outcomes[j], &outcomes[i])))
            .max_by(|a, b| outcomes[*a.1].tc.total_cmp(&outcomes[*b.1].tc).then(b.0.cmp(&a.0)))
            .map(|(pos, _)| pos);

        match victim {
            Some(pos) => {
                rows[pos].eliminated = true;
                eliminated.push(outcomes[order[pos]].label.clone());
                order.remove(pos);
                passes.push(rows);
            }
            None => {
                passes.push(rows);
                break;
            }
        }
    }
    let survivors = order.iter().map(|&i| outcomes[i].label.clone()).collect();
    Ok(IcerReport {
        passes,
        eliminated,
        survivors,
    })
}
