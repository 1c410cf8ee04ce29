//! Gaussian tail and the BPSK-based decoder power law.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

use super::DynamicModel;

/// Standard normal tail probability `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `-log2(2 Q(x))` for `x >= 0`.
///
/// Evaluated in the log domain: near zero through `erf` to avoid the
/// cancellation in `1 - erf`, and far in the tail through the continued
/// fraction of `erfc` since `Q` underflows for `x` beyond about 38 while the
/// SINRs of interest reach 1e12.
pub fn neg_log2_two_q(x: f64) -> f64 {
    let z = x * FRAC_1_SQRT_2;
    let nat = if z <= 0.5 {
        -(-libm::erf(z)).ln_1p()
    } else if z <= 26.0 {
        -libm::erfc(z).ln()
    } else {
        z * z + 0.5 * PI.ln() - erfc_continued_fraction(z).ln()
    };
    nat / LN_2
}

/// `erfc(z) e^{z^2} sqrt(pi)` for large `z`, by backward evaluation of
/// `1 / (z + (1/2) / (z + 1 / (z + (3/2) / (z + ...))))`.
fn erfc_continued_fraction(z: f64) -> f64 {
    const TERMS: usize = 60;
    let mut f = z;
    for k in (1..=TERMS).rev() {
        f = z + 0.5 * k as f64 / f;
    }
    1.0 / f
}

/// `sqrt(-log2(2 Q(sqrt(gamma))))`; zero at `gamma = 0`.
pub fn decode_denominator(gamma: f64) -> f64 {
    if !(gamma > 0.0) {
        return 0.0;
    }
    neg_log2_two_q(gamma.sqrt()).max(0.0).sqrt()
}

/// Decoder power of UE 1 when it decodes `r1_2` and `r2_2` at SINRs
/// `gamma1` and `gamma2`. Returns `f64::INFINITY` when a positive rate is
/// asked of a zero-SINR stream.
pub fn decoding_power_dynamic(
    model: &DynamicModel,
    r1_2: f64,
    r2_2: f64,
    gamma1: f64,
    gamma2: f64,
) -> f64 {
    let term = |rate: f64, gamma: f64| {
        if rate <= 0.0 || model.omega == 0.0 {
            return 0.0;
        }
        let d = decode_denominator(gamma);
        if d > 0.0 {
            model.omega * rate / d
        } else {
            f64::INFINITY
        }
    };
    term(r1_2, gamma1) + term(r2_2, gamma2) + model.p_r
}
