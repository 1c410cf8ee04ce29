//! System description and the per-link expressions shared by every solver.

mod channel;
mod qfunc;

pub use channel::{
    check_feasible, dbm_to_watts, harvested_energy, pathloss_gain, r2_caps, shannon_rate,
    Constraint, FeasibilityReport, R2Caps, DEFAULT_TOL,
};
pub use qfunc::{decode_denominator, decoding_power_dynamic, neg_log2_two_q, q_function};

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("argument {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },
    #[error("target rate {0} bits/s/Hz is not achievable")]
    InfeasibleR1(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Channel and transmitter description.
///
/// `h1_sq > h2_sq > 0`: UE 1 is the near user. Construct through
/// [`SystemParams::new`] or [`SystemParams::from_distances`], which enforce
/// the ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub h1_sq: f64,
    pub h2_sq: f64,
    /// Noise power, watts.
    pub sigma2: f64,
    /// Peak BS transmit power, watts.
    pub p_max: f64,
    /// Energy harvesting efficiency in (0, 1).
    pub xi: f64,
}

impl SystemParams {
    pub fn new(h1_sq: f64, h2_sq: f64, sigma2: f64, p_max: f64, xi: f64) -> Result<Self> {
        if !(h2_sq > 0.0 && h2_sq.is_finite()) {
            return Err(invalid("h2_sq", format!("must be positive, got {h2_sq}")));
        }
        if !(h1_sq > h2_sq && h1_sq.is_finite()) {
            return Err(invalid(
                "h1_sq",
                format!("must exceed h2_sq = {h2_sq}, got {h1_sq}"),
            ));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(invalid("sigma2", format!("must be positive, got {sigma2}")));
        }
        if !(p_max > 0.0 && p_max.is_finite()) {
            return Err(invalid("p_max", format!("must be positive, got {p_max}")));
        }
        if !(xi > 0.0 && xi < 1.0) {
            return Err(invalid("xi", format!("must lie in (0, 1), got {xi}")));
        }
        Ok(Self {
            h1_sq,
            h2_sq,
            sigma2,
            p_max,
            xi,
        })
    }

    /// Gains from BS-user distances through the line-of-sight path loss.
    pub fn from_distances(d1: f64, d2: f64, sigma2: f64, p_max: f64, xi: f64) -> Result<Self> {
        Self::new(pathloss_gain(d1)?, pathloss_gain(d2)?, sigma2, p_max, xi)
    }

    /// Received SNR of UE 1 at full power, `|h1|^2 P_max / sigma^2`.
    pub fn snr1(&self) -> f64 {
        self.h1_sq * self.p_max / self.sigma2
    }

    /// Single-user capacity of UE 2 at full power (`R_2,max`).
    pub fn r2_max(&self) -> f64 {
        (self.h2_sq * self.p_max / self.sigma2).ln_1p() / std::f64::consts::LN_2
    }

    /// Single-user capacity of UE 1 at full power.
    pub fn r1_cap(&self) -> f64 {
        self.snr1().ln_1p() / std::f64::consts::LN_2
    }

    /// Power UE 1 harvests from the full-power downlink, `xi |h1|^2 P_max`.
    pub fn full_harvest(&self) -> f64 {
        self.xi * self.h1_sq * self.p_max
    }
}

/// Rate-dependent decoder power: `omega * R / sqrt(-log2(2 Q(sqrt(gamma))))`
/// per decoded stream plus the analog front-end power `p_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicModel {
    pub omega: f64,
    pub p_r: f64,
}

impl DynamicModel {
    /// `omega = 0` is accepted and means decoding itself is free.
    pub fn new(omega: f64, p_r: f64) -> Result<Self> {
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(invalid(
                "omega",
                format!("must be non-negative, got {omega}"),
            ));
        }
        if !(p_r >= 0.0 && p_r.is_finite()) {
            return Err(invalid("p_r", format!("must be non-negative, got {p_r}")));
        }
        Ok(Self { omega, p_r })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerModel {
    Constant { p_sic: f64 },
    Dynamic(DynamicModel),
}

impl PowerModel {
    pub fn constant(p_sic: f64) -> Result<Self> {
        if !(p_sic > 0.0 && p_sic.is_finite()) {
            return Err(invalid("p_sic", format!("must be positive, got {p_sic}")));
        }
        Ok(Self::Constant { p_sic })
    }

    pub fn dynamic(omega: f64, p_r: f64) -> Result<Self> {
        DynamicModel::new(omega, p_r).map(Self::Dynamic)
    }
}

/// One operating point of the two-sub-slot schedule.
///
/// Sub-slot 1 (length `t`) carries only UE 2's data while UE 1 harvests;
/// in sub-slot 2 UE 1 sends a fraction `rho` of its received power to the
/// harvester and decodes with the rest.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Allocation {
    pub t: f64,
    pub rho: f64,
    pub p2_1: f64,
    pub p1_2: f64,
    pub p2_2: f64,
    pub r2_1: f64,
    pub r1_2: f64,
    pub r2_2: f64,
}

impl Allocation {
    /// Slot-averaged rate of UE 1.
    pub fn r1(&self) -> f64 {
        (1.0 - self.t) * self.r1_2
    }

    /// Slot-averaged rate of UE 2.
    pub fn r2(&self) -> f64 {
        self.t * self.r2_1 + (1.0 - self.t) * self.r2_2
    }
}

/// Which cap limits UE 2's second-sub-slot rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Binding {
    /// UE 2's own decoding.
    Ue2,
    /// UE 1 decoding UE 2's stream during SIC.
    Sic,
    /// UE 1's harvested-energy budget (rate-dependent decoder only).
    Power,
    None,
}

impl Binding {
    pub fn as_str(self) -> &'static str {
        match self {
            Binding::Ue2 => "ue2",
            Binding::Sic => "sic",
            Binding::Power => "power",
            Binding::None => "none",
        }
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Binding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ue2" => Ok(Binding::Ue2),
            "sic" => Ok(Binding::Sic),
            "power" => Ok(Binding::Power),
            "none" => Ok(Binding::None),
            other => Err(invalid("binding", format!("unknown value `{other}`"))),
        }
    }
}

/// Receiver energy-harvesting structure of the NOMA schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitMode {
    /// `rho = 0`.
    TimeSwitching,
    /// `t = 0`.
    PowerSplitting,
    /// `t` and `rho` both free.
    Generalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Ts,
    Ps,
    Gen,
    Tdma,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Ts => "ts",
            Scheme::Ps => "ps",
            Scheme::Gen => "gen",
            Scheme::Tdma => "tdma",
        }
    }

    /// The NOMA split this scheme uses; `None` for the orthogonal baseline.
    pub fn split_mode(self) -> Option<SplitMode> {
        match self {
            Scheme::Ts => Some(SplitMode::TimeSwitching),
            Scheme::Ps => Some(SplitMode::PowerSplitting),
            Scheme::Gen => Some(SplitMode::Generalized),
            Scheme::Tdma => None,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ts" => Ok(Scheme::Ts),
            "ps" => Ok(Scheme::Ps),
            "gen" => Ok(Scheme::Gen),
            "tdma" => Ok(Scheme::Tdma),
            other => Err(invalid("scheme", format!("unknown scheme `{other}`"))),
        }
    }
}

/// One sample of a region boundary.
///
/// `alloc` is `None` for points that no single allocation achieves: flagged
/// infeasible samples, the degenerate `R1 = 0` region of an infeasible
/// scheme, and points lifted onto a time-sharing chord.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
    pub alloc: Option<Allocation>,
    pub feasible: bool,
    pub binding: Binding,
}

impl RatePoint {
    pub fn infeasible(r1: f64) -> Self {
        Self {
            r1,
            r2: 0.0,
            alloc: None,
            feasible: false,
            binding: Binding::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionBoundary {
    pub scheme: Scheme,
    /// Ordered by `r1`, strictly increasing.
    pub points: Vec<RatePoint>,
    /// Largest feasible `r1`; `None` when the scheme has no feasible point.
    pub r1_max: Option<f64>,
}
