//! Normalized forward sensitivity indices `(dQ/dp) * p / Q` of the
//! reproduction numbers.
//!
//! Derivatives are central finite differences on the closed forms, taken at
//! the unscaled parameter level so the `p^alpha` chain rule is included. Each
//! index is computed with relative steps `1e-6` and `1e-5`; the two must agree
//! to three significant figures.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{reproduction_numbers, scale_unchecked, ControlVector, ModelParams, Param};

const FINE_STEP: f64 = 1e-6;
const COARSE_STEP: f64 = 1e-5;
const AGREEMENT_REL: f64 = 5e-4;
const AGREEMENT_ABS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    R01,
    R02,
}

impl Target {
    pub const BOTH: [Target; 2] = [Target::R01, Target::R02];

    pub fn name(self) -> &'static str {
        match self {
            Target::R01 => "R01",
            Target::R02 => "R02",
        }
    }
}

/// Parameters, controls and order at which an index is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasePoint {
    pub params: ModelParams,
    pub controls: ControlVector,
    pub alpha: f64,
}

impl BasePoint {
    /// Uncontrolled baseline at order `alpha`.
    pub fn uncontrolled(params: ModelParams, alpha: f64) -> Self {
        Self {
            params,
            controls: ControlVector::ZERO,
            alpha,
        }
    }

    pub fn value_of(&self, p: Param) -> f64 {
        match p {
            Param::Alpha => self.alpha,
            Param::U | Param::V | Param::M => self.controls.get(p).unwrap_or(0.0),
            _ => self.params.get(p),
        }
    }

    pub fn with(&self, p: Param, value: f64) -> Self {
        let mut out = *self;
        match p {
            Param::Alpha => out.alpha = value,
            Param::U | Param::V | Param::M => out.controls.set(p, value),
            _ => out.params.set(p, value),
        }
        out
    }

    /// Reproduction number `target` at this point.
    pub fn evaluate(&self, target: Target) -> Result<f64> {
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidOrder(self.alpha));
        }
        let sp = scale_unchecked(&self.params, self.alpha);
        let c = self.controls;
        let r = reproduction_numbers(&sp, c.u, c.m, c.v)?;
        Ok(match target {
            Target::R01 => r.r01,
            Target::R02 => r.r02,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityQuery {
    pub target: Target,
    pub parameter: Param,
    pub base: BasePoint,
}

/// An index value; `zero_baseline` marks indices defined as 0 because the
/// parameter itself is 0 at the base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexValue {
    pub value: f64,
    pub zero_baseline: bool,
}

/// Normalized index of a scalar function `q` at `p`.
pub fn normalized_index<F>(q: F, p: f64) -> Result<IndexValue>
where
    F: Fn(f64) -> Result<f64>,
{
    if p == 0.0 {
        return Ok(IndexValue {
            value: 0.0,
            zero_baseline: true,
        });
    }
    let q0 = q(p)?;
    if q0 == 0.0 {
        return Err(Error::ZeroQuantity);
    }
    let central = |eps: f64| -> Result<f64> {
        let dp = eps * p;
        let d = (q(p + dp)? - q(p - dp)?) / (2.0 * dp);
        Ok(d * p / q0)
    };
    let fine = central(FINE_STEP)?;
    let coarse = central(COARSE_STEP)?;
    let tol = AGREEMENT_REL * math::abs(fine).max(math::abs(coarse)) + AGREEMENT_ABS;
    if !(math::abs(fine - coarse) <= tol) {
        return Err(Error::UnstableDerivative { fine, coarse });
    }
    Ok(IndexValue {
        value: fine,
        zero_baseline: false,
    })
}

pub fn forward_index(q: &SensitivityQuery) -> Result<IndexValue> {
    let p0 = q.base.value_of(q.parameter);
    normalized_index(|p| q.base.with(q.parameter, p).evaluate(q.target), p0)
}

/// One emitted index, CSV-ready as `target,parameter,alpha,level,index`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityRow {
    pub target: Target,
    pub parameter: Param,
    pub alpha: f64,
    /// Control level for control sweeps.
    pub level: Option<f64>,
    pub index: f64,
    pub zero_baseline: bool,
}

fn row(target: Target, parameter: Param, base: &BasePoint, level: Option<f64>) -> Result<SensitivityRow> {
    let v = forward_index(&SensitivityQuery {
        target,
        parameter,
        base: *base,
    })?;
    Ok(SensitivityRow {
        target,
        parameter,
        alpha: base.alpha,
        level,
        index: v.value,
        zero_baseline: v.zero_baseline,
    })
}

/// Index of `parameter` at every order in `alpha_grid`.
pub fn index_vs_alpha(
    base: &BasePoint,
    target: Target,
    parameter: Param,
    alpha_grid: &[f64],
) -> Result<Vec<SensitivityRow>> {
    if alpha_grid.is_empty() {
        return Err(Error::InvalidConfig("alpha grid is empty"));
    }
    alpha_grid
        .iter()
        .map(|&a| {
            crate::grid::check_order(a)?;
            row(target, parameter, &BasePoint { alpha: a, ..*base }, None)
        })
        .collect()
}

/// Index of a control at each level, the other controls held at zero.
pub fn index_vs_control(
    base: &BasePoint,
    target: Target,
    control: Param,
    levels: &[f64],
) -> Result<Vec<SensitivityRow>> {
    if !control.is_control() {
        return Err(Error::InvalidConfig("index_vs_control needs u, v or m"));
    }
    if levels.is_empty() {
        return Err(Error::InvalidConfig("level grid is empty"));
    }
    levels
        .iter()
        .map(|&l| {
            if !(0.0..1.0).contains(&l) {
                return Err(Error::InvalidLevel(l));
            }
            let mut b = *base;
            b.controls = ControlVector::ZERO;
            b.controls.set(control, l);
            row(target, control, &b, Some(l))
        })
        .collect()
}

/// Indices of every model parameter for both targets.
pub fn table(base: &BasePoint) -> Result<Vec<SensitivityRow>> {
    let mut out = Vec::with_capacity(2 * Param::MODEL.len());
    for target in Target::BOTH {
        for p in Param::MODEL {
            out.push(row(target, p, base, None)?);
        }
    }
    Ok(out)
}

/// Classical-order reference indices from which the migration rates are
/// recovered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceIndices {
    /// Index of `b1` on `R01`.
    pub b1_on_r01: f64,
    /// Index of `b2` on `R02`.
    pub b2_on_r02: f64,
    /// Index of `a1` on `R01`.
    pub a1_on_r01: f64,
    /// Index of `a2` on `R02`.
    pub a2_on_r02: f64,
}

impl ReferenceIndices {
    pub const BASELINE: Self = Self {
        b1_on_r01: -0.343,
        b2_on_r02: -0.259,
        a1_on_r01: -0.454,
        a2_on_r02: -0.545,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MigrationRates {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

/// Invert the classical-order, uncontrolled closed forms of the indices of
/// `a1`, `a2`, `b1`, `b2` for the rates themselves.
///
/// With `v = 0` the `b` indices are `-b/Q` and the `a` indices are
/// `-a1 mu2 / D`, `-a2 mu1 / D` with `D = mu1 mu2 + mu1 a2 + a1 mu2`.
pub fn recover_migration_rates(p: &ModelParams, idx: &ReferenceIndices) -> Result<MigrationRates> {
    let (x1, x2) = (-idx.b1_on_r01, -idx.b2_on_r02);
    let (y1, y2) = (-idx.a1_on_r01, -idx.a2_on_r02);
    if !(x1 > 0.0 && x1 < 1.0 && x2 > 0.0 && x2 < 1.0 && y1 > 0.0 && y2 > 0.0 && y1 + y2 < 1.0) {
        return Err(Error::InvalidParameter("indices outside the invertible range"));
    }
    let b1 = x1 * (p.mu1 + p.delta1 + p.gamma1) / (1.0 - x1);
    let b2 = x2 * (p.mu2 + p.delta2 + p.gamma2) / (1.0 - x2);
    let d = p.mu1 * p.mu2 / (1.0 - y1 - y2);
    Ok(MigrationRates {
        a1: y1 * d / p.mu2,
        a2: y2 * d / p.mu1,
        b1,
        b2,
    })
}
