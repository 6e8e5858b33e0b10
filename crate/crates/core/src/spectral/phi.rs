//! The functions `phi_0(a) = e^-a`, `phi_1(a) = (1 - e^-a)/a` and
//! `phi_2(a) = (e^-a - 1 + a)/a^2` of exponential time differencing.
//!
//! Both quotients cancel catastrophically as `a -> 0`, so small arguments are
//! served by Taylor series. `phi_2` keeps using its series up to `a = 1`;
//! its closed form still loses `~2 eps_mach / a` relative accuracy well above
//! `1e-3`.

use crate::error::{invalid, Result};

/// Below this argument `phi_1` switches to its series.
pub const PHI1_SERIES_BELOW: f64 = 1e-3;
/// Below this argument `phi_2` switches to its series.
pub const PHI2_SERIES_BELOW: f64 = 1.0;

#[inline]
pub fn phi0(a: f64) -> f64 {
    (-a).exp()
}

#[inline]
pub fn phi1(a: f64) -> f64 {
    if a < PHI1_SERIES_BELOW {
        // 1 - a/2 + a^2/6 - a^3/24 + a^4/120
        1.0 - a / 2.0 * (1.0 - a / 3.0 * (1.0 - a / 4.0 * (1.0 - a / 5.0)))
    } else {
        -(-a).exp_m1() / a
    }
}

#[inline]
pub fn phi2(a: f64) -> f64 {
    if a < PHI2_SERIES_BELOW {
        // sum_k (-a)^k / (k + 2)!, Horner form; 20 terms reach full precision on [0, 1)
        let mut acc = 1.0;
        for k in (1..20).rev() {
            acc = 1.0 - a / (k as f64 + 2.0) * acc;
        }
        acc / 2.0
    } else {
        ((-a).exp_m1() + a) / (a * a)
    }
}

/// `phi_gamma(a)` for `gamma` in `{0, 1, 2}` and `a >= 0`.
pub fn phi(gamma: u8, a: f64) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(invalid(format!("phi functions are evaluated at a >= 0, got {a}")));
    }
    match gamma {
        0 => Ok(phi0(a)),
        1 => Ok(phi1(a)),
        2 => Ok(phi2(a)),
        _ => Err(invalid(format!("phi index must be 0, 1 or 2, got {gamma}"))),
    }
}
