//! Boundary sweeps: dispatch by scheme and decoder model, the largest
//! supported `R1`, and sampling the boundary on a uniform `R1` grid.

use crate::model::{
    r2_caps, Allocation, Binding, PowerModel, RatePoint, RegionBoundary, Scheme, SystemParams,
};
use crate::oracle::tdma_baseline;
use crate::solver_constant::{
    generalized_boundary, generalized_r1_max, ps_boundary, ps_r1_max, ts_boundary, ts_r1_max,
    BoundaryResult, DEFAULT_EPS,
};
use crate::solver_dynamic::{
    exhaustive_search_with, feasible_exists, suboptimal_search_with, GridSpec,
};

/// Which grid search serves the rate-dependent decoder model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DynamicSearch {
    #[default]
    Exhaustive,
    Suboptimal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Bisection tolerance of the constant-power solvers.
    pub eps: f64,
    pub grid: GridSpec,
    pub search: DynamicSearch,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            eps: DEFAULT_EPS,
            grid: GridSpec::default(),
            search: DynamicSearch::default(),
        }
    }
}

/// Largest `R2` at `R1 = r` for `scheme`.
pub fn solve(
    r: f64,
    scheme: Scheme,
    params: &SystemParams,
    model: &PowerModel,
    opts: &SolverOptions,
) -> BoundaryResult {
    let Some(mode) = scheme.split_mode() else {
        return tdma_baseline(r, params, model, &opts.grid);
    };
    match model {
        PowerModel::Constant { p_sic } => match scheme {
            Scheme::Ts => ts_boundary(r, params, *p_sic),
            Scheme::Ps => ps_boundary(r, params, *p_sic),
            _ => generalized_boundary(r, params, *p_sic, opts.eps),
        },
        PowerModel::Dynamic(dm) => match opts.search {
            DynamicSearch::Exhaustive => exhaustive_search_with(r, params, dm, &opts.grid, mode),
            DynamicSearch::Suboptimal => suboptimal_search_with(r, params, dm, &opts.grid, mode),
        },
    }
}

/// Largest rate in `[0, hi]` at which `feasible` holds, assuming it holds at
/// zero and the feasible rates form an interval.
fn bisect_rate<F: Fn(f64) -> bool>(feasible: F, hi: f64) -> f64 {
    if feasible(hi) {
        return hi;
    }
    let (mut good, mut bad) = (0.0, hi);
    while bad - good > 1e-10 * hi {
        let mid = 0.5 * (good + bad);
        if feasible(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// Largest `R1` the scheme supports; `None` when it supports none.
///
/// Grid-searched cases bisect on feasibility, using the exhaustive grid so
/// the suboptimal search is judged against the true extent of the region.
pub fn r1_max(
    scheme: Scheme,
    params: &SystemParams,
    model: &PowerModel,
    opts: &SolverOptions,
) -> Option<f64> {
    let cap = params.r1_cap();
    match (scheme.split_mode(), model) {
        (Some(_), PowerModel::Constant { p_sic }) => match scheme {
            Scheme::Ts => Some(ts_r1_max(params, *p_sic)),
            Scheme::Ps => ps_r1_max(params, *p_sic),
            _ => generalized_r1_max(params, *p_sic, opts.eps).ok(),
        },
        (Some(mode), PowerModel::Dynamic(dm)) => {
            let feasible = |r: f64| feasible_exists(r, params, dm, &opts.grid, mode);
            feasible(0.0).then(|| bisect_rate(feasible, cap))
        }
        (None, _) => {
            // Zero rate is always served by giving the whole slot to UE 2.
            let feasible = |r: f64| tdma_baseline(r, params, model, &opts.grid).is_optimal();
            Some(bisect_rate(feasible, cap))
        }
    }
}

/// Which cap limits UE 2's second-sub-slot rate at `alloc`.
pub fn binding_of(params: &SystemParams, model: &PowerModel, alloc: &Allocation) -> Binding {
    r2_caps(params, model, alloc).binding()
}

/// Boundary sample at `R1 = r`, flagged infeasible when no allocation exists.
pub fn rate_point(
    r: f64,
    scheme: Scheme,
    params: &SystemParams,
    model: &PowerModel,
    opts: &SolverOptions,
) -> RatePoint {
    let res = solve(r, scheme, params, model, opts);
    if !res.is_optimal() {
        return RatePoint::infeasible(r);
    }
    let binding = match (scheme, &res.alloc) {
        (Scheme::Tdma, _) | (_, None) => Binding::None,
        (_, Some(a)) => binding_of(params, model, a),
    };
    RatePoint {
        r1: r,
        r2: res.r2_star,
        alloc: res.alloc,
        feasible: true,
        binding,
    }
}

/// Samples the boundary at `points` evenly spaced rates on `[0, r1_max]`.
///
/// A scheme with no feasible rate yields the degenerate region: UE 2 alone
/// at full rate, UE 1 at zero, and `r1_max = None`.
pub fn sweep(
    scheme: Scheme,
    params: &SystemParams,
    model: &PowerModel,
    points: usize,
    opts: &SolverOptions,
) -> RegionBoundary {
    let Some(r_max) = r1_max(scheme, params, model, opts) else {
        let degenerate = RatePoint {
            r1: 0.0,
            r2: params.r2_max(),
            alloc: None,
            feasible: true,
            binding: Binding::None,
        };
        return RegionBoundary {
            scheme,
            points: vec![degenerate],
            r1_max: None,
        };
    };
    let n = points.max(1);
    let rates: Vec<f64> = if n == 1 || r_max == 0.0 {
        vec![0.0]
    } else {
        (0..n)
            .map(|i| r_max * (i as f64 / (n - 1) as f64))
            .collect()
    };
    let pts = rates
        .into_iter()
        .map(|r| rate_point(r, scheme, params, model, opts))
        .collect();
    RegionBoundary {
        scheme,
        points: pts,
        r1_max: Some(r_max),
    }
}
