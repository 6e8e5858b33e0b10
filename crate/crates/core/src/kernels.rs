//! Fractional-power interaction kernels.
//!
//! The kernel family is
//!
//! ```text
//! rho_delta(r) = 2 (4 - alpha) / (pi delta^(4 - alpha) r^alpha),   0 < r <= delta,
//! ```
//!
//! and zero outside the horizon. The constant is chosen so that the second
//! moment over the disc `B_delta` equals 4 (= 2d for d = 2), which makes the
//! nonlocal operator consistent with the Laplacian as `delta -> 0`.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Radial kernel described by its exponent and horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    alpha: f64,
    delta: f64,
}

/// Total kernel mass `C_delta`, or a tag when the kernel is not integrable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelMass {
    Finite(f64),
    NonIntegrable,
}

impl KernelMass {
    pub fn finite(self) -> Option<f64> {
        match self {
            KernelMass::Finite(c) => Some(c),
            KernelMass::NonIntegrable => None,
        }
    }
}

impl KernelSpec {
    pub fn new(alpha: f64, delta: f64) -> Result<Self> {
        if !(alpha.is_finite() && (0.0..4.0).contains(&alpha)) {
            return Err(invalid(format!("kernel exponent alpha must lie in [0, 4), got {alpha}")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(invalid(format!("horizon delta must be positive, got {delta}")));
        }
        Ok(KernelSpec { alpha, delta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The factor `2(4 - alpha) / (pi delta^(4 - alpha))` multiplying `r^(-alpha)`.
    pub fn normalization(&self) -> f64 {
        2.0 * (4.0 - self.alpha) / (PI * self.delta.powf(4.0 - self.alpha))
    }

    /// Evaluates `rho_delta(r)`. The origin is singular and rejected.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || r.is_nan() {
            return Err(invalid(format!("kernel evaluated at r = {r}; r must be positive")));
        }
        if r > self.delta {
            return Ok(0.0);
        }
        Ok(self.normalization() * r.powf(-self.alpha))
    }

    /// `C_delta = 4(4 - alpha) / ((2 - alpha) delta^2)` for `alpha < 2`.
    pub fn mass(&self) -> KernelMass {
        if self.alpha >= 2.0 {
            KernelMass::NonIntegrable
        } else {
            KernelMass::Finite(4.0 * (4.0 - self.alpha) / ((2.0 - self.alpha) * self.delta * self.delta))
        }
    }

    /// Jump `2 sqrt(1 - eps^2 C_delta)` of a locally increasing steady state,
    /// or 0 when `eps^2 C_delta >= 1` and the steady state is continuous.
    pub fn predicted_jump(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        let mass = self.mass().finite().ok_or_else(|| {
            invalid(format!("jump prediction needs an integrable kernel (alpha < 2), got alpha = {}", self.alpha))
        })?;
        let gap = 1.0 - eps * eps * mass;
        Ok(if gap > 0.0 { 2.0 * gap.sqrt() } else { 0.0 })
    }
}

/// Horizon `delta_0 = 2 eps sqrt((4 - alpha)/(2 - alpha))` at which `eps^2 C_delta = 1`.
pub fn critical_delta(alpha: f64, eps: f64) -> Result<f64> {
    if !(alpha.is_finite() && (0.0..2.0).contains(&alpha)) {
        return Err(invalid(format!("critical horizon needs alpha in [0, 2), got {alpha}")));
    }
    check_eps(eps)?;
    Ok(2.0 * eps * ((4.0 - alpha) / (2.0 - alpha)).sqrt())
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("interfacial parameter eps must be positive, got {eps}")))
    }
}
