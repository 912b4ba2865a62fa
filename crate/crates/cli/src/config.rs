//! TOML run configuration.
//!
//! Every section except `[model]`, `[initial]` and `[grid]` may be omitted and
//! falls back to the baseline values. Within `[model]`, the seven rates with
//! no reference value (`a1`, `a2`, `b1`, `b2`, `c1`, `c2`, `omega`) must be
//! given explicitly unless derived defaults are requested.

use std::path::{Path, PathBuf};

use focp_core::costeff::{CostEffConfig, Orientation, RankingKey};
use focp_core::focp::{ControlBounds, CostWeights, Strategy, SweepConfig};
use focp_core::{ControlVector, ModelParams, OrderSchedule, Param, Segment, State, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Model rates, per day unless noted. Populations are fractions of the total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub pi1: f64,
    pub pi2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub varrho1: f64,
    pub varrho2: f64,
    /// Half-saturation concentration of vibrios (cells/ml).
    #[serde(rename = "K")]
    pub k: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub mu_p: f64,
    pub g1: f64,
    pub g2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
}

/// Derivative order: a constant `alpha`, or piecewise `segments` which take
/// precedence when present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrderSection {
    pub alpha: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<SegmentEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentEntry {
    /// Right end of the segment (days).
    pub end: f64,
    pub order: f64,
}

impl Default for OrderSection {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            segments: Vec::new(),
        }
    }
}

/// Uniform time grid (days).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t0: f64,
    pub tf: f64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct InitialSection {
    pub S1: f64,
    pub I1: f64,
    pub R1: f64,
    pub B1: f64,
    pub S2: f64,
    pub I2: f64,
    pub R2: f64,
    pub B2: f64,
}

/// Constant controls used by `simulate`, `r0` and `sensitivity --mode table`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ControlsSection {
    pub u: f64,
    pub v: f64,
    pub m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightsSection {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
}

impl Default for WeightsSection {
    fn default() -> Self {
        let w = CostWeights::BASELINE;
        Self {
            k1: w.k1,
            k2: w.k2,
            k3: w.k3,
            k4: w.k4,
            k5: w.k5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsSection {
    pub u_max: f64,
    pub v_max: f64,
    pub m_max: f64,
}

impl Default for BoundsSection {
    fn default() -> Self {
        Self {
            u_max: 1.0,
            v_max: 1.0,
            m_max: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub max_iterations: usize,
    pub relaxation: f64,
    pub tolerance: f64,
    pub corrector_iterations: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        let s = SweepConfig::default();
        Self {
            max_iterations: s.max_iterations,
            relaxation: s.relaxation,
            tolerance: s.tolerance,
            corrector_iterations: s.corrector_iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoredOutcome {
    pub label: String,
    pub av: f64,
    pub tc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostEffSection {
    /// Unit cost of vaccination.
    pub c1: f64,
    /// Unit cost of hygiene measures.
    pub c2: f64,
    /// Strategies solved by `costeff` when no stored outcomes are given.
    pub strategies: Vec<String>,
    /// `dtc-dav` or `dav-dtc`.
    pub orientation: String,
    /// `increasing-av` or `decreasing-tc`.
    pub ranking: String,
    /// Stored AV/TC pairs; when non-empty `costeff` ranks these instead of
    /// solving.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outcomes: Vec<StoredOutcome>,
}

impl Default for CostEffSection {
    fn default() -> Self {
        Self {
            c1: 1.0,
            c2: 1.0,
            strategies: vec!["A".into(), "B".into(), "C".into()],
            orientation: "dtc-dav".into(),
            ranking: "increasing-av".into(),
            outcomes: Vec::new(),
        }
    }
}

/// Inclusive, evenly spaced range; `steps = 1` means `min` alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSection {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl RangeSection {
    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.min];
        }
        let d = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.max } else { self.min + i as f64 * d })
            .collect()
    }

    fn validate(&self, what: &str) -> Result<(), CliError> {
        if !(self.min.is_finite() && self.max.is_finite()) || self.steps == 0 || self.max < self.min {
            return Err(CliError::Config(format!("{what}: need finite min <= max and steps >= 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct R0Section {
    pub alpha: RangeSection,
}

impl Default for R0Section {
    fn default() -> Self {
        Self {
            alpha: RangeSection {
                min: 0.5,
                max: 1.0,
                steps: 51,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensitivitySection {
    /// Parameters swept over `alpha` in `vs-alpha` mode.
    pub parameters: Vec<String>,
    pub alpha: RangeSection,
    /// Controls swept over `levels` in `vs-control` mode.
    pub controls: Vec<String>,
    pub levels: RangeSection,
}

impl Default for SensitivitySection {
    fn default() -> Self {
        Self {
            parameters: Param::MODEL.iter().map(|p| p.name().to_string()).collect(),
            alpha: RangeSection {
                min: 0.5,
                max: 1.0,
                steps: 11,
            },
            controls: vec!["u".into(), "v".into(), "m".into()],
            levels: RangeSection {
                min: 0.0,
                max: 0.95,
                steps: 20,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FractIntSection {
    /// Order on `[t0, t_prime]`; order 1 applies afterwards.
    pub alpha0: f64,
    /// Switch time (days).
    pub t_prime: f64,
    /// Spacing of candidate switch times for `--scan` (days, a multiple of
    /// the grid step).
    pub scan_step: f64,
}

impl Default for FractIntSection {
    fn default() -> Self {
        Self {
            alpha0: 0.68,
            t_prime: 7.0,
            scan_step: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub plot: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            plot: false,
        }
    }
}

/// The configuration file as written by a user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: ModelSection,
    pub initial: InitialSection,
    pub grid: GridSection,
    #[serde(default)]
    pub order: OrderSection,
    #[serde(default)]
    pub controls: ControlsSection,
    #[serde(default)]
    pub weights: WeightsSection,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub costeff: CostEffSection,
    #[serde(default)]
    pub r0: R0Section,
    #[serde(default)]
    pub sensitivity: SensitivitySection,
    #[serde(default)]
    pub fractint: FractIntSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Fill missing unpublished-rate fields from the baseline when allowed.
    pub fn fill_derived_defaults(&mut self) {
        let b = ModelParams::baseline();
        let m = &mut self.model;
        m.omega.get_or_insert(b.omega);
        m.a1.get_or_insert(b.a1);
        m.a2.get_or_insert(b.a2);
        m.b1.get_or_insert(b.b1);
        m.b2.get_or_insert(b.b2);
        m.c1.get_or_insert(b.c1);
        m.c2.get_or_insert(b.c2);
    }

    /// Validate and convert into core types.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let params = self.model.to_params()?;
        params.validate().map_err(config_err)?;
        let grid = TimeGrid::new(self.grid.t0, self.grid.tf, self.grid.n_steps).map_err(config_err)?;
        let schedule = self.order.schedule(&grid)?;

        let s = &self.initial;
        let initial = State {
            s1: s.S1,
            i1: s.I1,
            r1: s.R1,
            b1: s.B1,
            s2: s.S2,
            i2: s.I2,
            r2: s.R2,
            b2: s.B2,
        };
        if !initial.to_array().iter().all(|x| x.is_finite() && *x >= 0.0) {
            return Err(CliError::Config("initial state must be finite and nonnegative".into()));
        }

        let c = self.controls;
        if !([c.u, c.m].iter().all(|x| (0.0..=1.0).contains(x)) && c.v.is_finite() && c.v >= 0.0) {
            return Err(CliError::Config("constant controls need u, m in [0, 1] and v >= 0".into()));
        }
        let controls = ControlVector::new(c.u, c.v, c.m);

        let w = self.weights;
        let weights = CostWeights {
            k1: w.k1,
            k2: w.k2,
            k3: w.k3,
            k4: w.k4,
            k5: w.k5,
        };
        weights.validate().map_err(config_err)?;
        let b = self.bounds;
        let bounds = ControlBounds {
            u_max: b.u_max,
            v_max: b.v_max,
            m_max: b.m_max,
        };
        bounds.validate().map_err(config_err)?;
        let sw = self.sweep;
        let sweep = SweepConfig {
            max_iterations: sw.max_iterations,
            relaxation: sw.relaxation,
            tolerance: sw.tolerance,
            corrector_iterations: sw.corrector_iterations,
        };
        sweep.validate().map_err(config_err)?;

        let ce = &self.costeff;
        // Needs a positive initial infectious total, so only checked by the
        // commands that use it.
        let cost = CostEffConfig::new(ce.c1, ce.c2, grid.tf() - grid.t0(), initial.infectious()).map_err(|e| e.to_string());
        let strategies = ce
            .strategies
            .iter()
            .map(|l| parse_strategy(l))
            .collect::<Result<Vec<_>, _>>()?;
        let orientation = parse_orientation(&ce.orientation)?;
        let ranking = match ce.ranking.as_str() {
            "increasing-av" => RankingKey::IncreasingAv,
            "decreasing-tc" => RankingKey::DecreasingTc,
            other => return Err(CliError::Config(format!("unknown ranking '{other}'"))),
        };
        for o in &ce.outcomes {
            if !(o.av.is_finite() && o.tc.is_finite()) {
                return Err(CliError::Config(format!("outcome '{}' is not finite", o.label)));
            }
        }

        self.r0.alpha.validate("r0.alpha")?;
        check_orders(&self.r0.alpha.values(), "r0.alpha")?;
        let sens = &self.sensitivity;
        sens.alpha.validate("sensitivity.alpha")?;
        check_orders(&sens.alpha.values(), "sensitivity.alpha")?;
        sens.levels.validate("sensitivity.levels")?;
        if sens.levels.min < 0.0 || sens.levels.max >= 1.0 {
            return Err(CliError::Config("sensitivity.levels must lie in [0, 1)".into()));
        }
        let sens_params = sens
            .parameters
            .iter()
            .map(|n| Param::from_name(n).ok_or_else(|| CliError::Config(format!("unknown parameter '{n}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        let sens_controls = sens
            .controls
            .iter()
            .map(|n| match Param::from_name(n) {
                Some(p) if p.is_control() => Ok(p),
                _ => Err(CliError::Config(format!("'{n}' is not a control"))),
            })
            .collect::<Result<Vec<_>, _>>()?;

        let fi = self.fractint;
        if !(fi.alpha0 > 0.0 && fi.alpha0 <= 1.0) {
            return Err(CliError::Config("fractint.alpha0 must lie in (0, 1]".into()));
        }
        if !(fi.scan_step > 0.0) {
            return Err(CliError::Config("fractint.scan_step must be positive".into()));
        }

        Ok(RunConfig {
            params,
            schedule,
            grid,
            initial,
            controls,
            weights,
            bounds,
            sweep,
            cost,
            strategies,
            orientation,
            ranking,
            outcomes: ce.outcomes.clone(),
            r0_alphas: self.r0.alpha.values(),
            sensitivity_params: sens_params,
            sensitivity_alphas: sens.alpha.values(),
            sensitivity_controls: sens_controls,
            sensitivity_levels: sens.levels.values(),
            fractint: fi,
            output: self.output.clone(),
        })
    }
}

impl ModelSection {
    fn to_params(&self) -> Result<ModelParams, CliError> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| {
                CliError::Config(format!(
                    "model.{name} is required (no reference value exists); set it or pass --use-derived-defaults"
                ))
            })
        };
        Ok(ModelParams {
            pi1: self.pi1,
            pi2: self.pi2,
            beta1: self.beta1,
            beta2: self.beta2,
            varrho1: self.varrho1,
            varrho2: self.varrho2,
            k: self.k,
            mu1: self.mu1,
            mu2: self.mu2,
            delta1: self.delta1,
            delta2: self.delta2,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            omega: need(self.omega, "omega")?,
            a1: need(self.a1, "a1")?,
            a2: need(self.a2, "a2")?,
            b1: need(self.b1, "b1")?,
            b2: need(self.b2, "b2")?,
            c1: need(self.c1, "c1")?,
            c2: need(self.c2, "c2")?,
            sigma1: self.sigma1,
            sigma2: self.sigma2,
            mu_p: self.mu_p,
            g1: self.g1,
            g2: self.g2,
        })
    }
}

impl OrderSection {
    fn schedule(&self, grid: &TimeGrid) -> Result<OrderSchedule, CliError> {
        let s = if self.segments.is_empty() {
            OrderSchedule::constant(self.alpha, grid.tf())
        } else {
            OrderSchedule::new(
                self.segments
                    .iter()
                    .map(|s| Segment {
                        end: s.end,
                        order: s.order,
                    })
                    .collect(),
            )
        }
        .map_err(config_err)?;
        s.align(grid).map_err(config_err)?;
        Ok(s)
    }
}

fn check_orders(alphas: &[f64], what: &str) -> Result<(), CliError> {
    if alphas.iter().all(|a| *a > 0.0 && *a <= 1.0) {
        Ok(())
    } else {
        Err(CliError::Config(format!("{what}: orders must lie in (0, 1]")))
    }
}

pub fn parse_strategy(label: &str) -> Result<Strategy, CliError> {
    Strategy::from_label(label).ok_or_else(|| CliError::Config(format!("unknown strategy '{label}' (use A, B or C)")))
}

pub fn parse_orientation(s: &str) -> Result<Orientation, CliError> {
    match s {
        "dtc-dav" => Ok(Orientation::CostPerEffect),
        "dav-dtc" => Ok(Orientation::EffectPerCost),
        other => Err(CliError::Config(format!("unknown orientation '{other}' (use dtc-dav or dav-dtc)"))),
    }
}

pub fn orientation_name(o: Orientation) -> &'static str {
    match o {
        Orientation::CostPerEffect => "dtc-dav",
        Orientation::EffectPerCost => "dav-dtc",
    }
}

fn config_err(e: focp_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

/// A validated run, in core types.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    pub schedule: OrderSchedule,
    pub grid: TimeGrid,
    pub initial: State,
    pub controls: ControlVector,
    pub weights: CostWeights,
    pub bounds: ControlBounds,
    pub sweep: SweepConfig,
    cost: Result<CostEffConfig, String>,
    pub strategies: Vec<Strategy>,
    pub orientation: Orientation,
    pub ranking: RankingKey,
    pub outcomes: Vec<StoredOutcome>,
    pub r0_alphas: Vec<f64>,
    pub sensitivity_params: Vec<Param>,
    pub sensitivity_alphas: Vec<f64>,
    pub sensitivity_controls: Vec<Param>,
    pub sensitivity_levels: Vec<f64>,
    pub fractint: FractIntSection,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn cost(&self) -> Result<CostEffConfig, CliError> {
        self.cost.clone().map_err(CliError::Config)
    }
}
