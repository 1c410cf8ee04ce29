//! Grid searches for the rate-dependent decoder power model.
//!
//! With the decoder cost tied to the rates and SINRs, neither UE 1's rate
//! constraint nor UE 2's is necessarily tight at the optimum, so the problem
//! loses the one-dimensional structure of the constant case. What remains
//! tight is the full-power first sub-slot and the full second-sub-slot
//! budget, leaving `(t, rho, p1)` to search. At a fixed triple the best
//! `R2` in the second sub-slot is the smallest of three caps: UE 2's own
//! decoding, UE 1's SIC stage, and what the leftover energy can decode.
//!
//! The suboptimal search pins `p1` at the smallest value that carries UE 1's
//! rate and sweeps `(t, rho)`; the exhaustive search also sweeps `p1` on a
//! dB grid. The exhaustive search skips parts of the grid only when an upper
//! bound proves they cannot beat the incumbent, so it returns exactly the
//! grid maximum.

use std::f64::consts::LN_2;

use crate::model::{
    decode_denominator, r2_caps, shannon_rate, Allocation, DynamicModel, Error, PowerModel, R2Caps,
    Result, SplitMode, SystemParams,
};
use crate::solver_constant::{BoundaryResult, Status};

/// Lower limit of the dB-spaced `p1` grid relative to `P_max`.
pub const P_FLOOR_RATIO: f64 = 1e-12;

/// Step sizes of the search grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub dt: f64,
    pub drho: f64,
    /// Spacing of `p1` levels, dB.
    pub dp_db: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            drho: 1e-3,
            dp_db: 0.1,
        }
    }
}

impl GridSpec {
    pub fn new(dt: f64, drho: f64, dp_db: f64) -> Result<Self> {
        for (name, v) in [("dt", dt), ("drho", drho), ("dp_db", dp_db)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("grid step must be positive, got {v}"),
                });
            }
        }
        Ok(Self { dt, drho, dp_db })
    }

    /// Every step multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dt: self.dt * factor,
            drho: self.drho * factor,
            dp_db: self.dp_db * factor,
        }
    }
}

fn rate_infeasible(r: f64) -> Error {
    Error::InfeasibleR1(r)
}

/// `2^x - 1` without cancellation at small `x`.
fn pow2_m1(x: f64) -> f64 {
    (x * LN_2).exp_m1()
}

/// Longest first sub-slot that still leaves room for rate `r`.
pub fn t_max(r: f64, params: &SystemParams) -> Result<f64> {
    let cap = params.r1_cap();
    if !(r >= 0.0 && r <= cap) {
        return Err(rate_infeasible(r));
    }
    Ok(1.0 - r / cap)
}

/// Largest splitting ratio that still carries rate `r` at full power.
pub fn rho_max(r: f64, t: f64, params: &SystemParams) -> Result<f64> {
    let v = 1.0 - params.sigma2 / (params.h1_sq * params.p_max) * pow2_m1(r / (1.0 - t));
    if !(v >= 0.0) {
        return Err(rate_infeasible(r));
    }
    Ok(v)
}

/// Smallest power for UE 1's stream that carries rate `r`.
pub fn p_min(r: f64, t: f64, rho: f64, params: &SystemParams) -> Result<f64> {
    if !(rho < 1.0) {
        return Err(rate_infeasible(r));
    }
    let v = params.sigma2 / (params.h1_sq * (1.0 - rho)) * pow2_m1(r / (1.0 - t));
    if !(v <= params.p_max) {
        return Err(rate_infeasible(r));
    }
    Ok(v)
}

/// Allocation at `(t, rho, p1)` with both budgets spent and `r2_2` unset.
fn base_allocation(t: f64, rho: f64, p1: f64, r: f64, params: &SystemParams) -> Allocation {
    Allocation {
        t,
        rho,
        p2_1: params.p_max,
        p1_2: p1,
        p2_2: params.p_max - p1,
        r2_1: params.r2_max(),
        r1_2: r / (1.0 - t),
        r2_2: 0.0,
    }
}

/// The three caps on UE 2's second-sub-slot rate at `(t, rho, p1)`. A
/// negative power cap means the harvest cannot even pay for UE 1's stream.
pub fn r2_candidates(
    t: f64,
    rho: f64,
    p1: f64,
    r: f64,
    params: &SystemParams,
    model: &DynamicModel,
) -> R2Caps {
    let alloc = base_allocation(t, rho, p1, r, params);
    r2_caps(params, &PowerModel::Dynamic(*model), &alloc)
}

fn evaluate(
    t: f64,
    rho: f64,
    p1: f64,
    r: f64,
    params: &SystemParams,
    model: &DynamicModel,
) -> Option<Allocation> {
    let mut alloc = base_allocation(t, rho, p1, r, params);
    let caps = r2_caps(params, &PowerModel::Dynamic(*model), &alloc);
    if !(caps.power.unwrap_or(0.0) >= 0.0) {
        return None;
    }
    alloc.r2_2 = caps.min().max(0.0);
    Some(alloc)
}

/// Grid indices `(t, rho, p1)`; ties resolve to the smallest.
type Key = (usize, usize, usize);

#[derive(Debug, Clone, Copy)]
struct Best {
    value: f64,
    key: Key,
    alloc: Allocation,
}

impl Best {
    fn offer(slot: &mut Option<Best>, key: Key, alloc: Allocation) {
        let value = alloc.r2();
        let better = match slot {
            None => true,
            Some(b) => value > b.value || (value == b.value && key < b.key),
        };
        if better {
            *slot = Some(Best { value, key, alloc });
        }
    }

    fn into_result(slot: Option<Best>) -> BoundaryResult {
        match slot {
            Some(b) => BoundaryResult::optimal(b.value, b.alloc),
            None => BoundaryResult::failed(Status::InfeasibleR1),
        }
    }
}

/// Grid values `0, step, 2 step, ...` up to `limit`, staying below 1.
fn steps(limit: f64, step: f64) -> impl Iterator<Item = (usize, f64)> {
    let n = ((limit / step) * (1.0 + 1e-12)).floor() as usize;
    (0..=n)
        .map(move |k| (k, k as f64 * step))
        .take_while(|&(_, v)| v < 1.0)
}

/// Visits every `(t, rho)` grid point of `mode` that carries rate `r`,
/// passing its indices and `P_min`, until `visit` returns `false`.
fn for_each_split<F>(r: f64, params: &SystemParams, grid: &GridSpec, mode: SplitMode, mut visit: F)
where
    F: FnMut(usize, usize, f64, f64, f64) -> bool,
{
    let Ok(t_hi) = t_max(r, params) else {
        return;
    };
    let t_hi = if mode == SplitMode::PowerSplitting {
        0.0
    } else {
        t_hi
    };
    for (k, t) in steps(t_hi, grid.dt) {
        let Ok(rho_hi) = rho_max(r, t, params) else {
            continue;
        };
        let rho_hi = if mode == SplitMode::TimeSwitching {
            0.0
        } else {
            rho_hi
        };
        for (j, rho) in steps(rho_hi, grid.drho) {
            if let Ok(p1) = p_min(r, t, rho, params) {
                if !visit(k, j, t, rho, p1) {
                    return;
                }
            }
        }
    }
}

fn valid_target(r: f64, params: &SystemParams) -> bool {
    r >= 0.0 && r <= params.r1_cap()
}

/// Two-dimensional search over `(t, rho)` with `p1 = P_min`.
pub fn suboptimal_search_with(
    r: f64,
    params: &SystemParams,
    model: &DynamicModel,
    grid: &GridSpec,
    mode: SplitMode,
) -> BoundaryResult {
    if !valid_target(r, params) {
        return BoundaryResult::failed(Status::InfeasibleR1);
    }
    let mut best = None;
    for_each_split(r, params, grid, mode, |k, j, t, rho, p1| {
        if let Some(alloc) = evaluate(t, rho, p1, r, params, model) {
            Best::offer(&mut best, (k, j, 0), alloc);
        }
        true
    });
    Best::into_result(best)
}

/// Generalized-scheme suboptimal search.
pub fn suboptimal_search(
    r: f64,
    params: &SystemParams,
    model: &DynamicModel,
    grid: &GridSpec,
) -> BoundaryResult {
    suboptimal_search_with(r, params, model, grid, SplitMode::Generalized)
}

/// Upper bounds on the objective over every `p1' >= p1` at a fixed split.
struct SplitBound<'a> {
    params: &'a SystemParams,
    model: &'a DynamicModel,
    t: f64,
    rho: f64,
    /// Energy left per unit time for UE 2's stream in the best case, where
    /// UE 1's stream is as cheap as it gets (`p1 = P_max`).
    budget: f64,
}

impl<'a> SplitBound<'a> {
    fn new(params: &'a SystemParams, model: &'a DynamicModel, t: f64, rho: f64, r: f64) -> Self {
        let g = params.h1_sq * (1.0 - rho);
        let gamma1 = g * params.p_max / params.sigma2;
        let r1_2 = r / (1.0 - t);
        let cost1 = if r1_2 <= 0.0 || model.omega == 0.0 {
            0.0
        } else {
            model.omega * r1_2 / decode_denominator(gamma1)
        };
        let harvest = params.full_harvest() * (t / (1.0 - t) + rho);
        Self {
            params,
            model,
            t,
            rho,
            budget: harvest - model.p_r - cost1,
        }
    }

    fn feasible(&self) -> bool {
        self.budget >= 0.0
    }

    fn at(&self, p1: f64) -> f64 {
        let p = self.params;
        let g = p.h1_sq * (1.0 - self.rho);
        let p2 = p.p_max - p1;
        let gamma2 = g * p2 / (g * p1 + p.sigma2);
        let ue2 = shannon_rate(p.h2_sq, p2, p1, p.sigma2);
        let sic = gamma2.ln_1p() / LN_2;
        let power = if self.model.omega == 0.0 {
            f64::INFINITY
        } else {
            decode_denominator(gamma2) * self.budget / self.model.omega
        };
        self.t * p.r2_max() + (1.0 - self.t) * ue2.min(sic).min(power)
    }
}

/// `p1` levels above `P_min`: dB-spaced from `max(P_min, P_floor)` up to
/// `P_max`.
fn p1_levels(p_lo: f64, p_max: f64, dp_db: f64) -> impl Iterator<Item = f64> {
    let start = p_lo.max(p_max * P_FLOOR_RATIO);
    let ratio_db = 10.0 * (p_max / start).log10();
    let n = ((ratio_db / dp_db) * (1.0 + 1e-12)).floor().max(0.0) as usize;
    (0..=n).map(move |i| (start * 10f64.powf(i as f64 * dp_db / 10.0)).min(p_max))
}

/// Three-dimensional search over `(t, rho, p1)`.
pub fn exhaustive_search_with(
    r: f64,
    params: &SystemParams,
    model: &DynamicModel,
    grid: &GridSpec,
    mode: SplitMode,
) -> BoundaryResult {
    if !valid_target(r, params) {
        return BoundaryResult::failed(Status::InfeasibleR1);
    }
    // The suboptimal grid is a subset; its optimum seeds the pruning bound.
    let mut best = None;
    let seed = suboptimal_search_with(r, params, model, grid, mode);
    if let (Some(alloc), true) = (seed.alloc, seed.is_optimal()) {
        let k = (alloc.t / grid.dt).round() as usize;
        let j = (alloc.rho / grid.drho).round() as usize;
        Best::offer(&mut best, (k, j, 0), alloc);
    }
    for_each_split(r, params, grid, mode, |k, j, t, rho, pmin| {
        let bound = SplitBound::new(params, model, t, rho, r);
        if !bound.feasible() {
            return true;
        }
        let beaten = |v: f64, best: &Option<Best>| best.is_some_and(|b| v < b.value);
        for (i, p1) in std::iter::once(pmin)
            .chain(p1_levels(pmin, params.p_max, grid.dp_db))
            .enumerate()
        {
            if beaten(bound.at(p1), &best) {
                break;
            }
            if let Some(alloc) = evaluate(t, rho, p1, r, params, model) {
                Best::offer(&mut best, (k, j, i), alloc);
            }
        }
        true
    });
    Best::into_result(best)
}

/// Whether any point of the exhaustive grid carries rate `r`.
pub fn feasible_exists(
    r: f64,
    params: &SystemParams,
    model: &DynamicModel,
    grid: &GridSpec,
    mode: SplitMode,
) -> bool {
    if !valid_target(r, params) {
        return false;
    }
    let mut found = false;
    for_each_split(r, params, grid, mode, |_, _, t, rho, pmin| {
        if SplitBound::new(params, model, t, rho, r).feasible() {
            found = std::iter::once(pmin)
                .chain(p1_levels(pmin, params.p_max, grid.dp_db))
                .any(|p1| evaluate(t, rho, p1, r, params, model).is_some());
        }
        !found
    });
    found
}

/// Generalized-scheme exhaustive search.
pub fn exhaustive_search(
    r: f64,
    params: &SystemParams,
    model: &DynamicModel,
    grid: &GridSpec,
) -> BoundaryResult {
    exhaustive_search_with(r, params, model, grid, SplitMode::Generalized)
}
