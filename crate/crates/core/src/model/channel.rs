use std::f64::consts::LN_2;

use super::qfunc::{decode_denominator, decoding_power_dynamic};
use super::{Allocation, Binding, Error, PowerModel, Result, SystemParams};

/// Absolute tolerance used when checking constraints, in watts or bits/s/Hz.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Linear power gain of the line-of-sight model `PL = 30.8 + 24.2 log10(d)` dB.
pub fn pathloss_gain(d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::NonPositiveDistance(d));
    }
    let pl_db = 30.8 + 24.2 * d.log10();
    Ok(10f64.powf(-pl_db / 10.0))
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// `log2(1 + gain p_signal / (gain p_interf + sigma2))`.
pub fn shannon_rate(gain: f64, p_signal: f64, p_interf: f64, sigma2: f64) -> f64 {
    (gain * p_signal / (gain * p_interf + sigma2)).ln_1p() / LN_2
}

/// Energy UE 1 collects over one normalized slot.
pub fn harvested_energy(params: &SystemParams, alloc: &Allocation) -> f64 {
    let gain = params.xi * params.h1_sq;
    alloc.t * gain * alloc.p2_1 + (1.0 - alloc.t) * alloc.rho * gain * (alloc.p1_2 + alloc.p2_2)
}

/// SINR of UE 1's own stream after SIC and of UE 2's stream at UE 1.
pub(crate) fn ue1_sinrs(params: &SystemParams, alloc: &Allocation) -> (f64, f64) {
    let g = params.h1_sq * (1.0 - alloc.rho);
    let gamma1 = g * alloc.p1_2 / params.sigma2;
    let gamma2 = g * alloc.p2_2 / (g * alloc.p1_2 + params.sigma2);
    (gamma1, gamma2)
}

/// Decoder energy UE 1 spends in the second sub-slot.
fn decoding_energy(params: &SystemParams, model: &PowerModel, alloc: &Allocation) -> f64 {
    let power = match model {
        PowerModel::Constant { p_sic } => *p_sic,
        PowerModel::Dynamic(dm) => {
            let (gamma1, gamma2) = ue1_sinrs(params, alloc);
            decoding_power_dynamic(dm, alloc.r1_2, alloc.r2_2, gamma1, gamma2)
        }
    };
    (1.0 - alloc.t) * power
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// Variable ranges: `0 <= t < 1`, `0 <= rho < 1`, non-negative powers and rates.
    Range,
    /// UE 2's power in the first sub-slot is within the budget.
    PeakPowerFirst,
    /// UE 2's first-sub-slot rate is below its capacity.
    Ue2RateFirst,
    /// Superposed power in the second sub-slot is within the budget.
    PeakPowerSecond,
    /// UE 1's rate is below its post-SIC capacity.
    Ue1Rate,
    /// UE 2's second-sub-slot rate is decodable at UE 2.
    Ue2Rate,
    /// UE 2's second-sub-slot rate is decodable at UE 1 (SIC).
    SicRate,
    /// Harvested energy covers the decoder.
    Energy,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeasibilityReport {
    pub violations: Vec<Constraint>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_feasible(
    params: &SystemParams,
    model: &PowerModel,
    alloc: &Allocation,
    tol: f64,
) -> FeasibilityReport {
    let a = alloc;
    let mut violations = Vec::new();
    let nonneg = [a.p2_1, a.p1_2, a.p2_2, a.r2_1, a.r1_2, a.r2_2];
    if !(a.t >= 0.0 && a.t < 1.0 && a.rho >= 0.0 && a.rho < 1.0)
        || nonneg.iter().any(|&v| !(v >= -tol))
    {
        violations.push(Constraint::Range);
    }
    if a.p2_1 > params.p_max + tol {
        violations.push(Constraint::PeakPowerFirst);
    }
    if a.r2_1 > shannon_rate(params.h2_sq, a.p2_1, 0.0, params.sigma2) + tol {
        violations.push(Constraint::Ue2RateFirst);
    }
    if a.p1_2 + a.p2_2 > params.p_max + tol {
        violations.push(Constraint::PeakPowerSecond);
    }
    let g1 = params.h1_sq * (1.0 - a.rho);
    if a.r1_2 > shannon_rate(g1, a.p1_2, 0.0, params.sigma2) + tol {
        violations.push(Constraint::Ue1Rate);
    }
    if a.r2_2 > shannon_rate(params.h2_sq, a.p2_2, a.p1_2, params.sigma2) + tol {
        violations.push(Constraint::Ue2Rate);
    }
    if a.r2_2 > shannon_rate(g1, a.p2_2, a.p1_2, params.sigma2) + tol {
        violations.push(Constraint::SicRate);
    }
    let demand = decoding_energy(params, model, a);
    if !(harvested_energy(params, a) >= demand - tol) {
        violations.push(Constraint::Energy);
    }
    FeasibilityReport { violations }
}

/// Upper limits on UE 2's second-sub-slot rate at a given allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R2Caps {
    pub ue2: f64,
    pub sic: f64,
    /// Largest rate the energy budget pays for; only the rate-dependent
    /// decoder ties the budget to `r2_2`.
    pub power: Option<f64>,
}

impl R2Caps {
    pub fn min(&self) -> f64 {
        let m = self.ue2.min(self.sic);
        self.power.map_or(m, |p| m.min(p))
    }

    /// The smallest cap; ties resolve in the order UE 2, SIC, power.
    pub fn binding(&self) -> Binding {
        let m = self.min();
        let close = |v: f64| v <= m + 1e-12 * m.abs().max(1.0);
        if close(self.ue2) {
            Binding::Ue2
        } else if close(self.sic) {
            Binding::Sic
        } else {
            Binding::Power
        }
    }
}

pub fn r2_caps(params: &SystemParams, model: &PowerModel, alloc: &Allocation) -> R2Caps {
    let g1 = params.h1_sq * (1.0 - alloc.rho);
    let ue2 = shannon_rate(params.h2_sq, alloc.p2_2, alloc.p1_2, params.sigma2);
    let sic = shannon_rate(g1, alloc.p2_2, alloc.p1_2, params.sigma2);
    let power = match model {
        PowerModel::Constant { .. } => None,
        PowerModel::Dynamic(dm) => {
            let (gamma1, gamma2) = ue1_sinrs(params, alloc);
            let budget = harvested_energy(params, alloc) / (1.0 - alloc.t)
                - decoding_power_dynamic(dm, alloc.r1_2, 0.0, gamma1, gamma2);
            let d2 = decode_denominator(gamma2);
            Some(if budget < 0.0 {
                budget
            } else if dm.omega == 0.0 {
                f64::INFINITY
            } else {
                d2 * budget / dm.omega
            })
        }
    };
    R2Caps { ue2, sic, power }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference() -> SystemParams {
        SystemParams::from_distances(0.5, 10.0, dbm_to_watts(-104.0), 40.0, 0.5).unwrap()
    }

    #[test]
    fn pathloss_reference_distances() {
        assert_eq!(pathloss_gain(1.0).unwrap(), 10f64.powf(-3.08));
        assert_relative_eq!(
            pathloss_gain(10.0).unwrap(),
            10f64.powf(-5.5),
            max_relative = 1e-14
        );
        // 30.8 + 24.2 log10(0.5) = 23.5152... dB
        assert_relative_eq!(pathloss_gain(0.5).unwrap(), 4.451e-3, max_relative = 1e-3);
        assert_eq!(pathloss_gain(0.0), Err(Error::NonPositiveDistance(0.0)));
        assert!(pathloss_gain(-2.0).is_err());
    }

    #[test]
    fn shannon_rate_examples() {
        assert_eq!(shannon_rate(0.7, 0.0, 3.0, 1e-3), 0.0);
        assert_eq!(shannon_rate(1.0, 2.5, 0.0, 2.5), 1.0);
        let r = shannon_rate(3.162e-6, 40.0, 0.0, 3.981e-14);
        assert_relative_eq!(
            r,
            (1.0 + 3.162e-6 * 40.0 / 3.981e-14f64).log2(),
            max_relative = 1e-14
        );
        assert!((r - 31.565).abs() < 0.01, "{r}");
    }

    #[test]
    fn harvested_energy_examples() {
        let p = reference();
        let a = Allocation {
            t: 0.0,
            rho: 0.3,
            p2_1: 40.0,
            p1_2: 10.0,
            p2_2: 30.0,
            ..Default::default()
        };
        assert_relative_eq!(harvested_energy(&p, &a), 0.3 * p.xi * p.h1_sq * 40.0);
        let a = Allocation {
            t: 0.4733,
            rho: 0.0,
            p2_1: 40.0,
            ..Default::default()
        };
        let e = harvested_energy(&p, &a);
        assert_relative_eq!(e, 0.4733 * p.full_harvest());
        assert!((e - 0.04213).abs() < 5e-5, "{e}");
    }

    #[test]
    fn zero_allocation_needs_no_energy_only_without_fixed_cost() {
        let p = reference();
        let zero = Allocation::default();
        let free = PowerModel::dynamic(0.044, 0.0).unwrap();
        assert!(check_feasible(&p, &free, &zero, DEFAULT_TOL).is_feasible());
        let fixed = PowerModel::constant(0.08).unwrap();
        let report = check_feasible(&p, &fixed, &zero, DEFAULT_TOL);
        assert_eq!(report.violations, vec![Constraint::Energy]);
    }

    #[test]
    fn violations_are_reported_by_constraint() {
        let p = reference();
        let m = PowerModel::constant(0.08).unwrap();
        let a = Allocation {
            t: 0.6,
            rho: 0.0,
            p2_1: 41.0,
            p1_2: 30.0,
            p2_2: 20.0,
            r2_1: 50.0,
            r1_2: 1.0,
            r2_2: 0.0,
        };
        let v = check_feasible(&p, &m, &a, DEFAULT_TOL).violations;
        assert!(v.contains(&Constraint::PeakPowerFirst));
        assert!(v.contains(&Constraint::Ue2RateFirst));
        assert!(v.contains(&Constraint::PeakPowerSecond));
        assert!(!v.contains(&Constraint::Energy));
        let bad_range = Allocation { t: 1.0, ..a };
        assert!(check_feasible(&p, &m, &bad_range, DEFAULT_TOL)
            .violations
            .contains(&Constraint::Range));
    }

    #[test]
    fn dbm_conversion() {
        assert_eq!(dbm_to_watts(30.0), 1.0);
        assert_relative_eq!(
            dbm_to_watts(-104.0),
            10f64.powf(-13.4),
            max_relative = 1e-15
        );
    }
}
