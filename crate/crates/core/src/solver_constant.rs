//! Boundary solvers for a constant decoder power `p_sic`.
//!
//! Time switching and power splitting have closed forms. The generalized
//! receiver splits into two one-dimensional concave programs in `t`, one
//! where UE 2's own decoding caps its rate and one where UE 1's SIC stage
//! does; each is solved by bisection on derivative signs.
//!
//! Every optimum spends exactly the harvested energy on decoding, so `rho`
//! is tied to `t` through `rho = zeta - t / (1 - t)` with
//! `zeta = p_sic / (xi |h1|^2 P_max)`.

use std::f64::consts::LN_2;

use crate::model::{shannon_rate, Allocation, Error, Result, SystemParams};

/// Default bisection tolerance on `t`.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Inward clamp applied to open interval endpoints.
pub const EPS_OPEN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    /// The scheme works, but not at this `R1`.
    InfeasibleR1,
    /// The scheme cannot power UE 1's decoder at any rate.
    SchemeInfeasible,
}

/// Maximum `R2` at a target `R1`, with the allocation achieving it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResult {
    pub status: Status,
    pub r2_star: f64,
    pub alloc: Option<Allocation>,
}

impl BoundaryResult {
    pub fn optimal(r2_star: f64, alloc: Allocation) -> Self {
        Self {
            status: Status::Optimal,
            r2_star,
            alloc: Some(alloc),
        }
    }

    pub fn failed(status: Status) -> Self {
        debug_assert!(status != Status::Optimal);
        Self {
            status,
            r2_star: 0.0,
            alloc: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

/// The constant-power problem with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantProblem {
    pub params: SystemParams,
    pub p_sic: f64,
    /// Full-power capacity of UE 2.
    alpha: f64,
    /// `|h2|^2 / |h1|^2`.
    beta: f64,
    /// Decoder power relative to the full-power harvest.
    zeta: f64,
    snr1: f64,
}

impl ConstantProblem {
    /// `p_sic = 0` is accepted as the no-decoder-cost limit.
    pub fn new(params: &SystemParams, p_sic: f64) -> Result<Self> {
        if !(p_sic >= 0.0 && p_sic.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "p_sic",
                reason: format!("must be non-negative, got {p_sic}"),
            });
        }
        Ok(Self {
            params: *params,
            p_sic,
            alpha: params.r2_max(),
            beta: params.h2_sq / params.h1_sq,
            zeta: p_sic / params.full_harvest(),
            snr1: params.snr1(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Sub-slot length at which pure time switching just powers the decoder.
    pub fn t_upper(&self) -> f64 {
        self.p_sic / (self.params.full_harvest() + self.p_sic)
    }

    /// Sub-slot length below which the economical split pushes `1 - rho`
    /// under `|h2|^2 / |h1|^2`. May be negative.
    pub fn t_lower(&self) -> f64 {
        let harvest = self.params.full_harvest();
        1.0 - harvest / (self.p_sic + self.params.xi * self.params.h2_sq * self.params.p_max)
    }

    /// Smallest `t` with `rho < 1` under the economical split, clamped to 0.
    fn t_min_split(&self) -> f64 {
        if self.zeta > 1.0 {
            1.0 - 1.0 / self.zeta + EPS_OPEN
        } else {
            0.0
        }
    }

    /// Economical splitting ratio at sub-slot length `t`.
    pub fn rho_at(&self, t: f64) -> f64 {
        self.zeta - t / (1.0 - t)
    }

    fn domain(function: &'static str, value: f64) -> Error {
        Error::Domain { function, value }
    }

    /// Time-switching objective with `rho = 0` and all rate constraints tight.
    pub fn f0(&self, t: f64, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&t) {
            return Err(Self::domain("f0", t));
        }
        let grow = (r / (1.0 - t) * LN_2).exp_m1();
        Ok(self.alpha - (1.0 - t) * (self.beta * grow).ln_1p() / LN_2)
    }

    fn f1_domain(&self, t: f64) -> Result<()> {
        let ok = t >= 0.0 && t <= self.t_upper() + EPS_OPEN && 1.0 / (1.0 - t) > self.zeta;
        if ok {
            Ok(())
        } else {
            Err(Self::domain("f1", t))
        }
    }

    /// UE 2's rate when its own decoding binds, along the economical split.
    pub fn f1(&self, t: f64, r: f64) -> Result<f64> {
        self.f1_domain(t)?;
        Ok(self.f1_raw(t, r))
    }

    pub fn f1_prime(&self, t: f64, r: f64) -> Result<f64> {
        self.f1_domain(t)?;
        Ok(self.f1_prime_raw(t, r))
    }

    fn f1_raw(&self, t: f64, r: f64) -> f64 {
        let u = 1.0 / (1.0 - t);
        let grow = (r * u * LN_2).exp_m1();
        let a = self.beta * grow / (u - self.zeta);
        self.alpha - (1.0 - t) * a.ln_1p() / LN_2
    }

    // With u = 1/(1-t) and A(u) = beta (2^{ru} - 1)/(u - zeta) + 1,
    // f1 = alpha - log2(A)/u, so df1/dt = log2(A) - u A'/(A ln 2).
    fn f1_prime_raw(&self, t: f64, r: f64) -> f64 {
        let u = 1.0 / (1.0 - t);
        let x = u - self.zeta;
        let grow = (r * u * LN_2).exp_m1();
        let pow = grow + 1.0;
        let a_minus_1 = self.beta * grow / x;
        let da = self.beta * (r * LN_2 * pow * x - grow) / (x * x);
        a_minus_1.ln_1p() / LN_2 - u * da / ((1.0 + a_minus_1) * LN_2)
    }

    /// UE 1's largest slot-averaged rate along the economical split.
    pub fn f2(&self, t: f64) -> Result<f64> {
        let v = self.f2_raw(t);
        if !(0.0..1.0).contains(&t) || !(1.0 + self.snr1 * (1.0 / (1.0 - t) - self.zeta) > 0.0) {
            return Err(Self::domain("f2", t));
        }
        Ok(v)
    }

    pub fn f2_prime(&self, t: f64) -> Result<f64> {
        self.f2(t)?;
        Ok(self.f2_prime_raw(t))
    }

    fn f2_raw(&self, t: f64) -> f64 {
        let u = 1.0 / (1.0 - t);
        (1.0 - t) * (self.snr1 * (u - self.zeta)).ln_1p() / LN_2
    }

    // f2 = h(u)/u with h(u) = log2(1 + S (u - zeta)), so df2/dt = u h'(u) - h(u).
    fn f2_prime_raw(&self, t: f64) -> f64 {
        let u = 1.0 / (1.0 - t);
        let s = self.snr1 * (u - self.zeta);
        u * self.snr1 / ((1.0 + s) * LN_2) - s.ln_1p() / LN_2
    }

    fn f3_domain(&self, t: f64) -> Result<()> {
        if (0.0..1.0).contains(&t) && 1.0 / (1.0 - t) > self.zeta {
            Ok(())
        } else {
            Err(Self::domain("f3", t))
        }
    }

    /// UE 2's rate when UE 1's SIC stage binds, along the economical split.
    pub fn f3(&self, t: f64, r: f64) -> Result<f64> {
        self.f3_domain(t)?;
        Ok(t * self.alpha + self.f2_raw(t) - r)
    }

    pub fn f3_prime(&self, t: f64) -> Result<f64> {
        self.f3_domain(t)?;
        Ok(self.alpha + self.f2_prime_raw(t))
    }

    /// Full operating point at `(t, rho)` with the first sub-slot at full
    /// power, UE 1's rate constraint tight and the second sub-slot using the
    /// whole budget.
    pub fn allocation(&self, t: f64, rho: f64, r: f64) -> Allocation {
        let p = &self.params;
        let r1_2 = r / (1.0 - t);
        let g1 = p.h1_sq * (1.0 - rho);
        let p1_2 = (p.sigma2 * (r1_2 * LN_2).exp_m1() / g1).min(p.p_max);
        let p2_2 = p.p_max - p1_2;
        let r2_2 =
            shannon_rate(p.h2_sq, p2_2, p1_2, p.sigma2).min(shannon_rate(g1, p2_2, p1_2, p.sigma2));
        Allocation {
            t,
            rho,
            p2_1: p.p_max,
            p1_2,
            p2_2,
            r2_1: self.alpha,
            r1_2,
            r2_2,
        }
    }

    /// Allocation on the economical split at `t`.
    pub fn economical_allocation(&self, t: f64, r: f64) -> Allocation {
        self.allocation(t, self.rho_at(t).clamp(0.0, 1.0), r)
    }
}

fn valid_rate(r: f64) -> bool {
    r >= 0.0 && r.is_finite()
}

/// Largest `R1` of time switching.
pub fn ts_r1_max(params: &SystemParams, p_sic: f64) -> f64 {
    let harvest = params.full_harvest();
    harvest / (harvest + p_sic) * params.r1_cap()
}

/// Closed-form time-switching boundary.
pub fn ts_boundary(r: f64, params: &SystemParams, p_sic: f64) -> BoundaryResult {
    let Ok(prob) = ConstantProblem::new(params, p_sic) else {
        return BoundaryResult::failed(Status::SchemeInfeasible);
    };
    if !valid_rate(r) || r > ts_r1_max(params, p_sic) {
        return BoundaryResult::failed(Status::InfeasibleR1);
    }
    let t = prob.t_upper();
    let alloc = prob.allocation(t, 0.0, r);
    let r2 = prob.f0(t, r).expect("t_upper < 1");
    BoundaryResult::optimal(r2, alloc)
}

/// Whether UE 1 can power its decoder by power splitting alone.
pub fn ps_feasible(params: &SystemParams, p_sic: f64) -> bool {
    params.h1_sq > p_sic / (params.xi * params.p_max)
}

pub fn ps_r1_max(params: &SystemParams, p_sic: f64) -> Option<f64> {
    ps_feasible(params, p_sic).then(|| {
        let excess = params.full_harvest() - p_sic;
        (excess / (params.xi * params.sigma2)).ln_1p() / LN_2
    })
}

/// Closed-form power-splitting boundary.
pub fn ps_boundary(r: f64, params: &SystemParams, p_sic: f64) -> BoundaryResult {
    let Ok(prob) = ConstantProblem::new(params, p_sic) else {
        return BoundaryResult::failed(Status::SchemeInfeasible);
    };
    let Some(r_max) = ps_r1_max(params, p_sic) else {
        return BoundaryResult::failed(Status::SchemeInfeasible);
    };
    if !valid_rate(r) || r > r_max {
        return BoundaryResult::failed(Status::InfeasibleR1);
    }
    let p = params;
    let excess = p.full_harvest() - p_sic;
    let r2 = if p.h2_sq <= p.h1_sq - p_sic / (p.xi * p.p_max) {
        let num = (p.h2_sq * p.p_max + p.sigma2) * excess;
        let den = (p.xi * p.p_max * (p.h2_sq * (r * LN_2).exp_m1() + p.h1_sq) - p_sic) * p.sigma2;
        (num / den).log2()
    } else {
        r_max - r
    };
    let alloc = prob.allocation(0.0, prob.zeta(), r);
    BoundaryResult::optimal(r2, alloc)
}

/// Maximizes a concave function on `[a, b]` by bisection on the sign of its
/// derivative, stopping once the bracket is at most `eps` wide.
pub fn maximize_concave<F, D>(fun: F, dfun: D, interval: (f64, f64), eps: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (a, b) = interval;
    if b <= a {
        return (a, fun(a));
    }
    if dfun(a) < 0.0 {
        return (a, fun(a));
    }
    if dfun(b) > 0.0 {
        return (b, fun(b));
    }
    let (mut lo, mut hi) = (a, b);
    while hi - lo > eps {
        let mid = 0.5 * (lo + hi);
        if dfun(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    (t, fun(t))
}

/// Bisects between a point satisfying `pred` and one violating it and
/// returns the satisfying end once they are within `eps`.
fn bisect_edge<P: Fn(f64) -> bool>(pred: P, mut good: f64, mut bad: f64, eps: f64) -> f64 {
    while (bad - good).abs() > eps {
        let mid = 0.5 * (good + bad);
        if pred(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubproblemKind {
    /// UE 2's own decoding caps its second-sub-slot rate.
    UeTwoLimited,
    /// UE 1's SIC stage caps it.
    SicLimited,
}

/// One of the two concave programs in `t` the generalized scheme reduces to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexSubproblem {
    pub kind: SubproblemKind,
    pub problem: ConstantProblem,
    pub r: f64,
    pub t_lower: f64,
    pub t_upper: f64,
}

impl ConvexSubproblem {
    pub fn ue2_limited(problem: &ConstantProblem, r: f64) -> Self {
        Self {
            kind: SubproblemKind::UeTwoLimited,
            problem: *problem,
            r,
            t_lower: problem.t_lower().max(0.0),
            t_upper: problem.t_upper(),
        }
    }

    /// `None` when the SIC stage can never bind (`t_lower < 0`).
    pub fn sic_limited(problem: &ConstantProblem, r: f64) -> Option<Self> {
        let t_l = problem.t_lower();
        (t_l >= 0.0).then(|| Self {
            kind: SubproblemKind::SicLimited,
            problem: *problem,
            r,
            t_lower: problem.t_min_split(),
            t_upper: t_l,
        })
    }

    pub fn objective(&self, t: f64) -> f64 {
        match self.kind {
            SubproblemKind::UeTwoLimited => self.problem.f1_raw(t, self.r),
            SubproblemKind::SicLimited => t * self.problem.alpha + self.problem.f2_raw(t) - self.r,
        }
    }

    pub fn objective_prime(&self, t: f64) -> f64 {
        match self.kind {
            SubproblemKind::UeTwoLimited => self.problem.f1_prime_raw(t, self.r),
            SubproblemKind::SicLimited => self.problem.alpha + self.problem.f2_prime_raw(t),
        }
    }

    /// Largest `f2` over the subproblem's range and where it is reached.
    pub fn max_f2(&self, eps: f64) -> (f64, f64) {
        let p = &self.problem;
        maximize_concave(
            |t| p.f2_raw(t),
            |t| p.f2_prime_raw(t),
            (self.t_lower, self.t_upper),
            eps,
        )
    }
}

/// `{t in [t_lower, t_upper] : f2(t) >= r}`, an interval since `f2` is
/// concave. Endpoints found by bisection lie on the feasible side.
pub fn feasible_interval(sub: &ConvexSubproblem, eps: f64) -> Option<(f64, f64)> {
    let (t1, t2) = (sub.t_lower, sub.t_upper);
    if t1 > t2 {
        return None;
    }
    let p = &sub.problem;
    let ok = |t: f64| p.f2_raw(t) >= sub.r;
    match (ok(t1), ok(t2)) {
        (true, true) => Some((t1, t2)),
        (false, true) => Some((bisect_edge(ok, t2, t1, eps), t2)),
        (true, false) => Some((t1, bisect_edge(ok, t1, t2, eps))),
        (false, false) => {
            let (t0, peak) = sub.max_f2(eps);
            if peak < sub.r {
                return None;
            }
            Some((bisect_edge(ok, t0, t1, eps), bisect_edge(ok, t0, t2, eps)))
        }
    }
}

fn solve_subproblem(sub: &ConvexSubproblem, eps: f64) -> BoundaryResult {
    if !valid_rate(sub.r) {
        return BoundaryResult::failed(Status::InfeasibleR1);
    }
    let Some(interval) = feasible_interval(sub, eps) else {
        return BoundaryResult::failed(Status::InfeasibleR1);
    };
    let (t, value) = maximize_concave(
        |t| sub.objective(t),
        |t| sub.objective_prime(t),
        interval,
        eps,
    );
    let alloc = sub.problem.economical_allocation(t, sub.r);
    BoundaryResult::optimal(value, alloc)
}

/// Generalized scheme restricted to `|h2|^2 <= (1 - rho) |h1|^2`.
pub fn solve_p31c(r: f64, params: &SystemParams, p_sic: f64, eps: f64) -> BoundaryResult {
    match ConstantProblem::new(params, p_sic) {
        Ok(prob) => solve_subproblem(&ConvexSubproblem::ue2_limited(&prob, r), eps),
        Err(_) => BoundaryResult::failed(Status::SchemeInfeasible),
    }
}

/// Generalized scheme restricted to `|h2|^2 >= (1 - rho) |h1|^2`.
pub fn solve_p32c(r: f64, params: &SystemParams, p_sic: f64, eps: f64) -> BoundaryResult {
    let Ok(prob) = ConstantProblem::new(params, p_sic) else {
        return BoundaryResult::failed(Status::SchemeInfeasible);
    };
    match ConvexSubproblem::sic_limited(&prob, r) {
        Some(sub) => solve_subproblem(&sub, eps),
        None => BoundaryResult::failed(Status::SchemeInfeasible),
    }
}

/// Generalized (time switching plus power splitting) boundary.
pub fn generalized_boundary(r: f64, params: &SystemParams, p_sic: f64, eps: f64) -> BoundaryResult {
    let first = solve_p31c(r, params, p_sic, eps);
    let second = solve_p32c(r, params, p_sic, eps);
    match (first.is_optimal(), second.is_optimal()) {
        (_, false) => first,
        (false, true) => second,
        (true, true) if second.r2_star > first.r2_star => second,
        (true, true) => first,
    }
}

/// Largest `R1` the generalized scheme supports: the peak of `f2`.
pub fn generalized_r1_max(params: &SystemParams, p_sic: f64, eps: f64) -> Result<f64> {
    let prob = ConstantProblem::new(params, p_sic)?;
    let (_, peak) = ConvexSubproblem::ue2_limited(&prob, 0.0).max_f2(eps);
    let other = ConvexSubproblem::sic_limited(&prob, 0.0)
        .filter(|s| s.t_lower <= s.t_upper)
        .map(|s| s.max_f2(eps).1);
    Ok(other.map_or(peak, |o| o.max(peak)))
}
