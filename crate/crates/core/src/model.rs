//! Two-community cholera dynamics with dimension-consistent fractional rates.
//!
//! Every rate constant enters the order-`alpha` equations raised to the power
//! `alpha`; the half-saturation constant `K` and the controls do not.

use crate::error::{Error, Result};
use crate::fode::Rhs;
use crate::grid::{check_order, TimeGrid};
use crate::math;

/// Number of state components.
pub const DIM: usize = 8;

/// Epidemiological rates at unit order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Recruitment, persons/day.
    pub pi1: f64,
    pub pi2: f64,
    /// Water-route ingestion rates, 1/day.
    pub beta1: f64,
    pub beta2: f64,
    /// Person-to-person contact rates.
    pub varrho1: f64,
    pub varrho2: f64,
    /// Half-saturation vibrio concentration, cells/mL.
    pub k: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Immunity waning.
    pub omega: f64,
    /// Susceptible migration 1 -> 2 and 2 -> 1.
    pub a1: f64,
    pub a2: f64,
    /// Infectious migration.
    pub b1: f64,
    pub b2: f64,
    /// Recovered migration.
    pub c1: f64,
    pub c2: f64,
    /// Vibrio shedding.
    pub sigma1: f64,
    pub sigma2: f64,
    /// Vibrio mortality.
    pub mu_p: f64,
    /// Vibrio growth.
    pub g1: f64,
    pub g2: f64,
}

impl ModelParams {
    /// Reference endemic scenario. The migration rates `a`, `b` are recovered
    /// from reference sensitivity indices (see
    /// [`recover_migration_rates`](crate::sensitivity::recover_migration_rates));
    /// `omega`, `c1`, `c2` are placeholders.
    pub fn baseline() -> Self {
        Self {
            pi1: 1.08e-4,
            pi2: 1.08e-4,
            beta1: 0.00125,
            beta2: 0.0125,
            varrho1: 0.102,
            varrho2: 0.1875,
            k: 1e6,
            mu1: 8.4e-5,
            mu2: 8.4e-5,
            delta1: 0.0125,
            delta2: 0.045,
            gamma1: 0.045,
            gamma2: 0.035,
            omega: 0.001,
            a1: 0.0381,
            a2: 0.0458,
            b1: 0.0300,
            b2: 0.0280,
            c1: 0.03,
            c2: 0.03,
            sigma1: 50.0,
            sigma2: 50.0,
            mu_p: 1.06,
            g1: 0.73,
            g2: 0.73,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if Param::MODEL.iter().any(|&p| {
            let v = self.get(p);
            !(v.is_finite() && v >= 0.0)
        }) {
            return Err(Error::InvalidParameter("rates must be finite and nonnegative"));
        }
        if self.k <= 0.0 {
            return Err(Error::InvalidParameter("K must be positive"));
        }
        if self.mu_p <= self.g1 || self.mu_p <= self.g2 {
            return Err(Error::InvalidParameter("vibrio mortality must exceed growth"));
        }
        Ok(())
    }

    /// Value of a model parameter; control ids and `Alpha` read as 0.
    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::Pi1 => self.pi1,
            Param::Pi2 => self.pi2,
            Param::Beta1 => self.beta1,
            Param::Beta2 => self.beta2,
            Param::Varrho1 => self.varrho1,
            Param::Varrho2 => self.varrho2,
            Param::K => self.k,
            Param::Mu1 => self.mu1,
            Param::Mu2 => self.mu2,
            Param::Delta1 => self.delta1,
            Param::Delta2 => self.delta2,
            Param::Gamma1 => self.gamma1,
            Param::Gamma2 => self.gamma2,
            Param::Omega => self.omega,
            Param::A1 => self.a1,
            Param::A2 => self.a2,
            Param::B1 => self.b1,
            Param::B2 => self.b2,
            Param::C1 => self.c1,
            Param::C2 => self.c2,
            Param::Sigma1 => self.sigma1,
            Param::Sigma2 => self.sigma2,
            Param::MuP => self.mu_p,
            Param::G1 => self.g1,
            Param::G2 => self.g2,
            Param::U | Param::V | Param::M | Param::Alpha => 0.0,
        }
    }

    /// Set a model parameter; control ids and `Alpha` are ignored.
    pub fn set(&mut self, p: Param, value: f64) {
        let slot = match p {
            Param::Pi1 => &mut self.pi1,
            Param::Pi2 => &mut self.pi2,
            Param::Beta1 => &mut self.beta1,
            Param::Beta2 => &mut self.beta2,
            Param::Varrho1 => &mut self.varrho1,
            Param::Varrho2 => &mut self.varrho2,
            Param::K => &mut self.k,
            Param::Mu1 => &mut self.mu1,
            Param::Mu2 => &mut self.mu2,
            Param::Delta1 => &mut self.delta1,
            Param::Delta2 => &mut self.delta2,
            Param::Gamma1 => &mut self.gamma1,
            Param::Gamma2 => &mut self.gamma2,
            Param::Omega => &mut self.omega,
            Param::A1 => &mut self.a1,
            Param::A2 => &mut self.a2,
            Param::B1 => &mut self.b1,
            Param::B2 => &mut self.b2,
            Param::C1 => &mut self.c1,
            Param::C2 => &mut self.c2,
            Param::Sigma1 => &mut self.sigma1,
            Param::Sigma2 => &mut self.sigma2,
            Param::MuP => &mut self.mu_p,
            Param::G1 => &mut self.g1,
            Param::G2 => &mut self.g2,
            Param::U | Param::V | Param::M | Param::Alpha => return,
        };
        *slot = value;
    }

    /// Parameters of the mirrored system (community 1 <-> community 2).
    pub fn swapped(&self) -> Self {
        Self {
            pi1: self.pi2,
            pi2: self.pi1,
            beta1: self.beta2,
            beta2: self.beta1,
            varrho1: self.varrho2,
            varrho2: self.varrho1,
            mu1: self.mu2,
            mu2: self.mu1,
            delta1: self.delta2,
            delta2: self.delta1,
            gamma1: self.gamma2,
            gamma2: self.gamma1,
            a1: self.a2,
            a2: self.a1,
            b1: self.b2,
            b2: self.b1,
            c1: self.c2,
            c2: self.c1,
            sigma1: self.sigma2,
            sigma2: self.sigma1,
            g1: self.g2,
            g2: self.g1,
            ..*self
        }
    }
}

/// Identifier of a model parameter, a control, or the derivative order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Pi1,
    Pi2,
    Beta1,
    Beta2,
    Varrho1,
    Varrho2,
    K,
    Mu1,
    Mu2,
    Delta1,
    Delta2,
    Gamma1,
    Gamma2,
    Omega,
    A1,
    A2,
    B1,
    B2,
    C1,
    C2,
    Sigma1,
    Sigma2,
    MuP,
    G1,
    G2,
    U,
    V,
    M,
    Alpha,
}

impl Param {
    /// All fields of [`ModelParams`].
    pub const MODEL: [Param; 25] = [
        Param::Pi1,
        Param::Pi2,
        Param::Beta1,
        Param::Beta2,
        Param::Varrho1,
        Param::Varrho2,
        Param::K,
        Param::Mu1,
        Param::Mu2,
        Param::Delta1,
        Param::Delta2,
        Param::Gamma1,
        Param::Gamma2,
        Param::Omega,
        Param::A1,
        Param::A2,
        Param::B1,
        Param::B2,
        Param::C1,
        Param::C2,
        Param::Sigma1,
        Param::Sigma2,
        Param::MuP,
        Param::G1,
        Param::G2,
    ];

    pub const CONTROLS: [Param; 3] = [Param::U, Param::V, Param::M];

    pub fn name(self) -> &'static str {
        match self {
            Param::Pi1 => "pi1",
            Param::Pi2 => "pi2",
            Param::Beta1 => "beta1",
            Param::Beta2 => "beta2",
            Param::Varrho1 => "varrho1",
            Param::Varrho2 => "varrho2",
            Param::K => "K",
            Param::Mu1 => "mu1",
            Param::Mu2 => "mu2",
            Param::Delta1 => "delta1",
            Param::Delta2 => "delta2",
            Param::Gamma1 => "gamma1",
            Param::Gamma2 => "gamma2",
            Param::Omega => "omega",
            Param::A1 => "a1",
            Param::A2 => "a2",
            Param::B1 => "b1",
            Param::B2 => "b2",
            Param::C1 => "c1",
            Param::C2 => "c2",
            Param::Sigma1 => "sigma1",
            Param::Sigma2 => "sigma2",
            Param::MuP => "mu_p",
            Param::G1 => "g1",
            Param::G2 => "g2",
            Param::U => "u",
            Param::V => "v",
            Param::M => "m",
            Param::Alpha => "alpha",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Param::MODEL
            .iter()
            .chain(Param::CONTROLS.iter())
            .chain(core::iter::once(&Param::Alpha))
            .copied()
            .find(|p| p.name().eq_ignore_ascii_case(s))
    }

    pub fn is_control(self) -> bool {
        matches!(self, Param::U | Param::V | Param::M)
    }
}

/// Rates raised to the derivative order, with the aggregated removal rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledParams {
    pub alpha: f64,
    pub pi1: f64,
    pub pi2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub varrho1: f64,
    pub varrho2: f64,
    pub k: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub omega: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub mu_p: f64,
    pub g1: f64,
    pub g2: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub q4: f64,
}

/// Raise every rate to `alpha` and form `Q1..Q4`.
pub fn alpha_scale(p: &ModelParams, alpha: f64) -> Result<ScaledParams> {
    check_order(alpha)?;
    Ok(scale_unchecked(p, alpha))
}

/// [`alpha_scale`] without the order range check; finite differences in the
/// order need to step past 1.
pub(crate) fn scale_unchecked(p: &ModelParams, alpha: f64) -> ScaledParams {
    let s = |x: f64| if alpha == 1.0 { x } else { math::pow(x, alpha) };
    let (mu1, mu2, mu_p, g1, g2) = (s(p.mu1), s(p.mu2), s(p.mu_p), s(p.g1), s(p.g2));
    let (delta1, delta2, gamma1, gamma2, b1, b2) = (
        s(p.delta1),
        s(p.delta2),
        s(p.gamma1),
        s(p.gamma2),
        s(p.b1),
        s(p.b2),
    );
    ScaledParams {
        alpha,
        pi1: s(p.pi1),
        pi2: s(p.pi2),
        beta1: s(p.beta1),
        beta2: s(p.beta2),
        varrho1: s(p.varrho1),
        varrho2: s(p.varrho2),
        k: p.k,
        mu1,
        mu2,
        delta1,
        delta2,
        gamma1,
        gamma2,
        omega: s(p.omega),
        a1: s(p.a1),
        a2: s(p.a2),
        b1,
        b2,
        c1: s(p.c1),
        c2: s(p.c2),
        sigma1: s(p.sigma1),
        sigma2: s(p.sigma2),
        mu_p,
        g1,
        g2,
        q1: mu1 + delta1 + gamma1 + b1,
        q2: mu_p - g1,
        q3: mu2 + delta2 + gamma2 + b2,
        q4: mu_p - g2,
    }
}

/// Compartments in solver order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub s1: f64,
    pub i1: f64,
    pub r1: f64,
    pub b1: f64,
    pub s2: f64,
    pub i2: f64,
    pub r2: f64,
    pub b2: f64,
}

impl State {
    pub const NAMES: [&'static str; DIM] = ["S1", "I1", "R1", "B1", "S2", "I2", "R2", "B2"];

    /// Endemic equilibrium of the classical model used as the control start.
    pub fn baseline() -> Self {
        Self {
            s1: 0.53144,
            i1: 0.001997,
            r1: 0.01028,
            b1: 0.30254,
            s2: 0.44222,
            i2: 0.002380,
            r2: 0.01082,
            b2: 0.36065,
        }
    }

    pub fn from_slice(y: &[f64]) -> Self {
        Self {
            s1: y[0],
            i1: y[1],
            r1: y[2],
            b1: y[3],
            s2: y[4],
            i2: y[5],
            r2: y[6],
            b2: y[7],
        }
    }

    pub fn to_array(&self) -> [f64; DIM] {
        [self.s1, self.i1, self.r1, self.b1, self.s2, self.i2, self.r2, self.b2]
    }

    /// Total infectious `I1 + I2`.
    pub fn infectious(&self) -> f64 {
        self.i1 + self.i2
    }

    /// Total susceptible `S1 + S2`.
    pub fn susceptible(&self) -> f64 {
        self.s1 + self.s2
    }
}

/// Water treatment `u`, vaccination `v`, hygiene `m`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlVector {
    pub u: f64,
    pub v: f64,
    pub m: f64,
}

impl ControlVector {
    pub const ZERO: Self = Self {
        u: 0.0,
        v: 0.0,
        m: 0.0,
    };

    pub fn new(u: f64, v: f64, m: f64) -> Self {
        Self { u, v, m }
    }

    pub fn get(&self, p: Param) -> Option<f64> {
        match p {
            Param::U => Some(self.u),
            Param::V => Some(self.v),
            Param::M => Some(self.m),
            _ => None,
        }
    }

    pub fn set(&mut self, p: Param, value: f64) {
        match p {
            Param::U => self.u = value,
            Param::V => self.v = value,
            Param::M => self.m = value,
            _ => {}
        }
    }
}

/// Right-hand sides of the eight state equations.
pub fn rhs(state: &State, c: &ControlVector, sp: &ScaledParams) -> Result<[f64; DIM]> {
    let State {
        s1,
        i1,
        r1,
        b1,
        s2,
        i2,
        r2,
        b2,
    } = *state;
    let (den1, den2) = (sp.k + b1, sp.k + b2);
    if den1 == 0.0 || den2 == 0.0 {
        return Err(Error::SingularIncidence);
    }
    let water1 = (1.0 - c.u) * sp.beta1 * b1 * s1 / den1;
    let water2 = (1.0 - c.u) * sp.beta2 * b2 * s2 / den2;
    let contact1 = (1.0 - c.m) * sp.varrho1 * i1 * s1;
    let contact2 = (1.0 - c.m) * sp.varrho2 * i2 * s2;
    Ok([
        sp.pi1 + sp.a2 * s2 + sp.omega * r1 - water1 - contact1 - (sp.a1 + sp.mu1 + c.v) * s1,
        water1 + contact1 + sp.b2 * i2 - sp.q1 * i1,
        c.v * s1 + sp.gamma1 * i1 - (sp.mu1 + sp.omega + sp.c1) * r1 + sp.c2 * r2,
        sp.sigma1 * i1 - sp.q2 * b1,
        sp.pi2 + sp.a1 * s1 + sp.omega * r2 - water2 - contact2 - (sp.a2 + sp.mu2 + c.v) * s2,
        water2 + contact2 + sp.b1 * i1 - sp.q3 * i2,
        c.v * s2 + sp.gamma2 * i2 - (sp.mu2 + sp.omega + sp.c2) * r2 + sp.c1 * r1,
        sp.sigma2 * i2 - sp.q4 * b2,
    ])
}

/// Community reproduction numbers and the migration coupling `Phi_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reproduction {
    pub r01: f64,
    pub r02: f64,
    pub phi1: f64,
}

pub fn reproduction_numbers(sp: &ScaledParams, u: f64, m: f64, v: f64) -> Result<Reproduction> {
    let d1 = sp.mu1 + sp.a1 + v;
    let d2 = sp.mu2 + sp.a2 + v;
    let phi1 = sp.a1 * sp.a2 / (d1 * d2);
    if !(phi1 < 1.0) {
        return Err(Error::InvalidMigration { phi1 });
    }
    let common = d1 * d2 * (1.0 - phi1) * sp.k;
    let r01 = (sp.pi1 * d2 + sp.a2 * sp.pi2)
        * ((1.0 - u) * sp.beta1 * sp.sigma1 + (1.0 - m) * sp.q2 * sp.varrho1 * sp.k)
        / (sp.q1 * sp.q2 * common);
    let r02 = (sp.pi2 * d1 + sp.a1 * sp.pi1)
        * ((1.0 - u) * sp.beta2 * sp.sigma2 + (1.0 - m) * sp.q4 * sp.varrho2 * sp.k)
        / (sp.q3 * sp.q4 * common);
    Ok(Reproduction { r01, r02, phi1 })
}

/// Control input to the state equations.
#[derive(Debug, Clone, Copy)]
pub enum Controls<'a> {
    Constant(ControlVector),
    /// One control vector per node of `grid`.
    Nodes {
        grid: TimeGrid,
        values: &'a [ControlVector],
    },
}

impl Controls<'_> {
    pub fn at(&self, t: f64) -> Result<ControlVector> {
        match self {
            Controls::Constant(c) => Ok(*c),
            Controls::Nodes { grid, values } => Ok(values[grid.index_of(t)?]),
        }
    }
}

/// The controlled state system as an [`Rhs`].
#[derive(Debug, Clone, Copy)]
pub struct CholeraSystem<'a> {
    pub params: ScaledParams,
    pub controls: Controls<'a>,
}

impl<'a> CholeraSystem<'a> {
    pub fn new(params: ScaledParams, controls: Controls<'a>) -> Self {
        Self { params, controls }
    }

    pub fn uncontrolled(params: ScaledParams) -> Self {
        Self::new(params, Controls::Constant(ControlVector::ZERO))
    }
}

impl Rhs for CholeraSystem<'_> {
    fn dim(&self) -> usize {
        DIM
    }

    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let c = self.controls.at(t)?;
        dy.copy_from_slice(&rhs(&State::from_slice(y), &c, &self.params)?);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(alpha: f64) -> ScaledParams {
        alpha_scale(&ModelParams::baseline(), alpha).unwrap()
    }

    #[test]
    fn unit_order_is_identity() {
        let p = ModelParams::baseline();
        let sp = base(1.0);
        for id in Param::MODEL {
            let scaled = match id {
                Param::Pi1 => sp.pi1,
                Param::Beta2 => sp.beta2,
                Param::MuP => sp.mu_p,
                Param::K => sp.k,
                Param::Omega => sp.omega,
                _ => continue,
            };
            assert_eq!(scaled, p.get(id));
        }
        assert!((sp.q2 - 0.33).abs() < 1e-12);
    }

    #[test]
    fn scaling_examples() {
        let sp = base(0.5);
        assert!((sp.beta2 - 0.111_803_4).abs() < 1e-7);
        assert_eq!(sp.k, 1e6);
        // 1.06^0.68 - 0.73^0.68, evaluated at 40 digits
        let sp = base(0.68);
        assert!((sp.q2 - 0.233_072_598_714_657_5).abs() < 1e-14, "{}", sp.q2);
        assert!(alpha_scale(&ModelParams::baseline(), 0.0).is_err());
        assert!(alpha_scale(&ModelParams::baseline(), 1.01).is_err());
    }

    #[test]
    fn recruitment_only_at_origin() {
        let sp = base(0.9);
        let d = rhs(&State::default(), &ControlVector::ZERO, &sp).unwrap();
        assert_eq!(d, [sp.pi1, 0.0, 0.0, 0.0, sp.pi2, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn closed_routes_stop_infection() {
        let sp = base(1.0);
        let mut s = State::baseline();
        s.i1 = 0.0;
        s.i2 = 0.0;
        let d = rhs(&s, &ControlVector::new(1.0, 0.0, 1.0), &sp).unwrap();
        assert_eq!(d[1], 0.0);
        assert_eq!(d[5], 0.0);
    }

    #[test]
    fn baseline_state_is_near_equilibrium() {
        let d = rhs(&State::baseline(), &ControlVector::ZERO, &base(1.0)).unwrap();
        let worst = d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(worst < 1e-3, "{d:?}");
    }

    #[test]
    fn singular_incidence_guarded() {
        let mut p = ModelParams::baseline();
        p.k = 1.0;
        let sp = alpha_scale(&p, 1.0).unwrap();
        let mut s = State::baseline();
        s.b1 = -1.0;
        assert_eq!(rhs(&s, &ControlVector::ZERO, &sp), Err(Error::SingularIncidence));
    }

    #[test]
    fn endemic_baseline() {
        let r = reproduction_numbers(&base(1.0), 0.0, 0.0, 0.0).unwrap();
        assert!(r.r01 > 1.0 && r.r02 > 1.0);
        assert!((r.r01 - r.r02).abs() > 0.1);
        let r = reproduction_numbers(&base(1.0), 1.0, 1.0, 0.0).unwrap();
        assert_eq!((r.r01, r.r02), (0.0, 0.0));
    }

    #[test]
    fn migration_singularity_rejected() {
        let mut p = ModelParams::baseline();
        p.mu1 = 0.0;
        p.mu2 = 0.0;
        let sp = alpha_scale(&p, 1.0).unwrap();
        assert!(matches!(
            reproduction_numbers(&sp, 0.0, 0.0, 0.0),
            Err(Error::InvalidMigration { .. })
        ));
    }

    #[test]
    fn swap_exchanges_reproduction_numbers() {
        let p = ModelParams::baseline();
        let a = reproduction_numbers(&alpha_scale(&p, 0.9).unwrap(), 0.2, 0.3, 0.01).unwrap();
        let b = reproduction_numbers(&alpha_scale(&p.swapped(), 0.9).unwrap(), 0.2, 0.3, 0.01).unwrap();
        assert!((a.r01 - b.r02).abs() <= 1e-12 * a.r01);
        assert!((a.r02 - b.r01).abs() <= 1e-12 * a.r02);
    }

    #[test]
    fn validation() {
        let mut p = ModelParams::baseline();
        assert!(p.validate().is_ok());
        p.g1 = 2.0;
        assert!(p.validate().is_err());
        let mut p = ModelParams::baseline();
        p.omega = -1.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn param_names_round_trip() {
        for p in Param::MODEL.iter().chain(Param::CONTROLS.iter()) {
            assert_eq!(Param::from_name(p.name()), Some(*p));
        }
        assert_eq!(Param::from_name("MU_P"), Some(Param::MuP));
        assert_eq!(Param::from_name("nope"), None);
    }
}
