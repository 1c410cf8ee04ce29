//! Brute-force reference solver, the orthogonal baseline, and time sharing.
//!
//! [`brute_force_p0`] evaluates the original problem on a grid with every
//! constraint written out again from the system model. It assumes nothing
//! about which constraints are tight, except that the objective grows with
//! UE 2's rates, so among feasible rates it keeps the largest.

use crate::model::{
    decode_denominator, Allocation, Binding, Error, PowerModel, RatePoint, RegionBoundary, Result,
    SplitMode, SystemParams,
};
use crate::solver_constant::{BoundaryResult, Status};
use crate::solver_dynamic::{GridSpec, P_FLOOR_RATIO};

/// Rate levels tried for UE 2's second-sub-slot stream under the dynamic model.
pub const RATE_LEVELS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub r2_best: f64,
    pub alloc: Allocation,
    pub points_evaluated: u64,
}

fn log2_1p(x: f64) -> f64 {
    (1.0 + x).log2()
}

/// Decoder power at UE 1, from the model definitions.
fn decoder_power(
    model: &PowerModel,
    params: &SystemParams,
    rho: f64,
    p1: f64,
    p2: f64,
    r1_2: f64,
    r2_2: f64,
) -> f64 {
    match model {
        PowerModel::Constant { p_sic } => *p_sic,
        PowerModel::Dynamic(dm) => {
            let g = params.h1_sq * (1.0 - rho);
            let gamma1 = g * p1 / params.sigma2;
            let gamma2 = g * p2 / (g * p1 + params.sigma2);
            let stream = |rate: f64, gamma: f64| {
                if rate <= 0.0 {
                    0.0
                } else {
                    dm.omega * rate / decode_denominator(gamma)
                }
            };
            stream(r1_2, gamma1) + stream(r2_2, gamma2) + dm.p_r
        }
    }
}

fn grid_points(step: f64, fixed_at_zero: bool) -> Vec<f64> {
    if fixed_at_zero {
        return vec![0.0];
    }
    (0..)
        .map(|k| k as f64 * step)
        .take_while(|&v| v < 1.0)
        .collect()
}

/// Maximum of `t R2(1) + (1 - t) R2(2)` subject to UE 1 receiving `r`.
///
/// The `p1` axis holds the smallest power that carries UE 1's rate followed
/// by the levels of a dB grid from `P_max * 1e-12` upward that exceed it.
/// For each `(t, rho)` the levels are visited in increasing order and the
/// scan stops once the rate caps, which only fall with `p1`, cannot beat the
/// best point found.
pub fn brute_force_p0(
    r: f64,
    params: &SystemParams,
    model: &PowerModel,
    grid: &GridSpec,
    mode: SplitMode,
) -> Result<OracleResult> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InfeasibleR1(r));
    }
    let p = params;
    let pmax = p.p_max;
    let alpha = log2_1p(p.h2_sq * pmax / p.sigma2);
    let p_floor = pmax * P_FLOOR_RATIO;
    let ts = grid_points(grid.dt, mode == SplitMode::PowerSplitting);
    let rhos = grid_points(grid.drho, mode == SplitMode::TimeSwitching);

    let mut best: Option<(f64, Allocation)> = None;
    let mut evaluated = 0u64;

    for &t in &ts {
        let r1_2 = r / (1.0 - t);
        for &rho in &rhos {
            let g1 = p.h1_sq * (1.0 - rho);
            let harvest = t * p.xi * p.h1_sq * pmax + (1.0 - t) * rho * p.xi * p.h1_sq * pmax;
            // Cheapest possible decoder: UE 1's stream at full power, none of UE 2's.
            let floor_cost = (1.0 - t) * decoder_power(model, p, rho, pmax, 0.0, r1_2, 0.0);
            if harvest < floor_cost {
                continue;
            }
            let needed = p.sigma2 * ((r1_2 * std::f64::consts::LN_2).exp_m1()) / g1;
            if !(needed <= pmax) {
                continue;
            }
            let first_level = if needed <= p_floor {
                0
            } else {
                (10.0 * (needed / p_floor).log10() / grid.dp_db).ceil() as i64
            };
            let levels = (first_level..)
                .map(|i| p_floor * 10f64.powf(i as f64 * grid.dp_db / 10.0))
                .take_while(|&v| v <= pmax);
            for p1 in std::iter::once(needed).chain(levels) {
                let p2 = pmax - p1;
                let cap7 = log2_1p(p.h2_sq * p2 / (p.h2_sq * p1 + p.sigma2));
                let cap8 = log2_1p(g1 * p2 / (g1 * p1 + p.sigma2));
                let cap = cap7.min(cap8);
                let bound = t * alpha + (1.0 - t) * cap;
                if best.is_some_and(|(v, _)| bound < v) {
                    break;
                }
                if log2_1p(g1 * p1 / p.sigma2) < r1_2 {
                    continue;
                }
                let levels: Vec<f64> = match model {
                    PowerModel::Constant { .. } => vec![cap],
                    PowerModel::Dynamic(_) => (0..=RATE_LEVELS)
                        .rev()
                        .map(|m| cap * m as f64 / RATE_LEVELS as f64)
                        .collect(),
                };
                for r2_2 in levels {
                    evaluated += 1;
                    let demand = (1.0 - t) * decoder_power(model, p, rho, p1, p2, r1_2, r2_2);
                    if harvest < demand {
                        continue;
                    }
                    let value = t * alpha + (1.0 - t) * r2_2;
                    if best.is_none_or(|(v, _)| value > v) {
                        let alloc = Allocation {
                            t,
                            rho,
                            p2_1: pmax,
                            p1_2: p1,
                            p2_2: p2,
                            r2_1: alpha,
                            r1_2,
                            r2_2,
                        };
                        best = Some((value, alloc));
                    }
                    break;
                }
            }
        }
    }
    best.map(|(r2_best, alloc)| OracleResult {
        r2_best,
        alloc,
        points_evaluated: evaluated,
    })
    .ok_or(Error::InfeasibleR1(r))
}

/// Orthogonal two-phase schedule: UE 2 is served at full power for a
/// fraction `tau` of the slot while UE 1 harvests, then UE 1 is served for
/// the rest, splitting off just enough power to run its decoder.
///
/// The result is expressed as an [`Allocation`] with `t = tau`,
/// `rho` the phase-two split and all second-sub-slot power on UE 1.
pub fn tdma_baseline(
    r: f64,
    params: &SystemParams,
    model: &PowerModel,
    grid: &GridSpec,
) -> BoundaryResult {
    let p = params;
    let alpha = p.r2_max();
    if r == 0.0 {
        // tau -> 1: UE 1 neither receives nor decodes.
        return BoundaryResult {
            status: Status::Optimal,
            r2_star: alpha,
            alloc: None,
        };
    }
    if !(r > 0.0 && r <= p.r1_cap()) {
        return BoundaryResult::failed(Status::InfeasibleR1);
    }
    let harvest_rate = p.full_harvest();
    let n = (1.0 / grid.dt).floor() as usize;
    for k in (0..=n).rev() {
        let tau = k as f64 * grid.dt;
        if tau >= 1.0 {
            continue;
        }
        let rate = r / (1.0 - tau);
        let rho_cap =
            1.0 - p.sigma2 * (rate * std::f64::consts::LN_2).exp_m1() / (p.h1_sq * p.p_max);
        if !(rho_cap >= 0.0) {
            continue;
        }
        let covers = |rho: f64| {
            let harvested = tau * harvest_rate + (1.0 - tau) * rho * harvest_rate;
            let cost = decoder_power(model, p, rho, p.p_max, 0.0, rate, 0.0);
            harvested >= (1.0 - tau) * cost
        };
        let rho = match model {
            PowerModel::Constant { p_sic } => {
                let need = (p_sic / harvest_rate - tau / (1.0 - tau)).max(0.0);
                (need <= rho_cap && need < 1.0).then_some(need)
            }
            PowerModel::Dynamic(_) => (0..)
                .map(|j| j as f64 * grid.drho)
                .take_while(|&v| v <= rho_cap && v < 1.0)
                .find(|&v| covers(v)),
        };
        if let Some(rho) = rho {
            let alloc = Allocation {
                t: tau,
                rho,
                p2_1: p.p_max,
                p1_2: p.p_max,
                p2_2: 0.0,
                r2_1: alpha,
                r1_2: rate,
                r2_2: 0.0,
            };
            return BoundaryResult::optimal(tau * alpha, alloc);
        }
    }
    BoundaryResult::failed(Status::InfeasibleR1)
}

/// Upper concave envelope of the feasible points of `boundary`.
///
/// Points under the envelope are lifted onto it and lose their allocation,
/// since they are reached by alternating between the chord's ends. The axis
/// anchors `(0, r2 at the first point)` and `(r1_max, 0)` join the envelope
/// and the output when the sweep does not already reach them. Infeasible
/// points pass through unchanged.
pub fn time_sharing_hull(boundary: &RegionBoundary) -> RegionBoundary {
    let mut points = boundary.points.clone();
    let feasible: Vec<usize> = (0..points.len()).filter(|&i| points[i].feasible).collect();
    let anchor = |r1: f64, r2: f64| RatePoint {
        r1,
        r2,
        alloc: None,
        feasible: true,
        binding: Binding::None,
    };
    if let (Some(&first), Some(&last)) = (feasible.first(), feasible.last()) {
        let (r1_first, r2_first) = (points[first].r1, points[first].r2);
        let r1_last = points[last].r1;
        debug_assert!(first <= last);
        if let Some(r1_max) = boundary.r1_max.filter(|&m| m > r1_last) {
            let at = points.partition_point(|p| p.r1 <= r1_max);
            points.insert(at, anchor(r1_max, 0.0));
        }
        if r1_first > 0.0 {
            points.insert(first, anchor(0.0, r2_first));
        }
    }

    let mut hull: Vec<(f64, f64)> = Vec::new();
    for pt in points.iter().filter(|p| p.feasible) {
        let c = (pt.r1, pt.r2);
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // b is dropped when it lies on or under the chord a-c.
            let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(c);
    }

    let envelope = |x: f64| -> f64 {
        let i = hull.partition_point(|v| v.0 < x);
        if i < hull.len() && hull[i].0 == x {
            return hull[i].1;
        }
        let (a, b) = (hull[i - 1], hull[i]);
        a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
    };
    for pt in points.iter_mut().filter(|p| p.feasible) {
        let h = envelope(pt.r1);
        if pt.r2 < h - 1e-12 * h.abs().max(1.0) {
            *pt = anchor(pt.r1, h);
        }
    }
    RegionBoundary {
        scheme: boundary.scheme,
        points,
        r1_max: boundary.r1_max,
    }
}
