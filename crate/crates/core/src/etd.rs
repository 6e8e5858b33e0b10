//! Exponential time differencing for the semi-discrete system
//! `dU/dt + L_h U = f(U)` with `L_h = kappa I - eps^2 D_h` and
//! `f(U) = (kappa + 1) U - U^3`.
//!
//! ETD1:   `U^{n+1} = phi_0(L_h tau) U^n + tau phi_1(L_h tau) f(U^n)`
//!
//! ETDRK2: the ETD1 update is a predictor `U~`, corrected by
//!         `U^{n+1} = U~ + tau phi_2(L_h tau) (f(U~) - f(U^n))`.
//!
//! With `kappa >= 2` both keep `max |U^n| <= 1` for every `tau > 0` once
//! `max |U^0| <= 1`; the driver treats a violation as a hard error.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::diagnostics::{energy_from_parts, max_norm, LogRecord, RunLog};
use crate::error::{invalid, Error, Result};
use crate::operator::{Field, Grid};
use crate::spectral::{local_symbol, ModelParams, SpectralOperator, Spectrum, Symbol};

/// Slack allowed above 1 in the maximum-principle check.
pub const MAX_PRINCIPLE_SLACK: f64 = 1e-12;

/// Default steady-state threshold on `max |u^{n+1} - u^n| / tau`.
pub const STEADY_STATE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Etd1,
    Etdrk2,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Etd1 => "etd1",
            Scheme::Etdrk2 => "etdrk2",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "etd1" => Ok(Scheme::Etd1),
            "etdrk2" => Ok(Scheme::Etdrk2),
            _ => Err(invalid(format!("unknown scheme {s:?} (expected etd1 or etdrk2)"))),
        }
    }
}

/// Nonlocal (NAC) or local 5-point (LAC) diffusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Nonlocal,
    Local,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Nonlocal => "nac",
            Model::Local => "lac",
        })
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nac" | "nonlocal" => Ok(Model::Nonlocal),
            "lac" | "local" => Ok(Model::Local),
            _ => Err(invalid(format!("unknown model {s:?} (expected nac or lac)"))),
        }
    }
}

/// Uniform step `tau` with `steps * tau = t_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimePlan {
    tau: f64,
    steps: usize,
}

impl TimePlan {
    /// Fails unless `t_end / tau` is an integer to relative `1e-12`.
    pub fn new(tau: f64, t_end: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(invalid(format!("time step must be positive, got {tau}")));
        }
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(invalid(format!("final time must be positive, got {t_end}")));
        }
        let steps = (t_end / tau).round();
        if steps < 1.0 || ((steps * tau - t_end) / t_end).abs() > 1e-12 {
            return Err(invalid(format!("final time {t_end} is not an integer multiple of tau = {tau}")));
        }
        Ok(TimePlan { tau, steps: steps as usize })
    }

    pub fn from_steps(tau: f64, steps: usize) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(invalid(format!("time step must be positive, got {tau}")));
        }
        Ok(TimePlan { tau, steps })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn t_end(&self) -> f64 {
        self.tau * self.steps as f64
    }
}

/// Solution `U^n` at time `t = n tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub u: Field,
    pub t: f64,
    pub step: usize,
}

/// Pointwise `f(u) = (kappa + 1) u - u^3`.
pub fn nonlinear_term(u: &Field, kappa: f64) -> Field {
    u.map(|v| (kappa + 1.0) * v - v * v * v)
}

/// Symbol of the local Allen-Cahn reference (5-point Laplacian).
pub fn lac_symbol(grid: &Grid, params: &ModelParams) -> Symbol {
    local_symbol(grid, params)
}

struct Advance {
    next: Field,
    next_hat: Spectrum,
    predictor: Option<Field>,
}

fn combine(op: &SpectralOperator, u_hat: &Spectrum, f_hat: &Spectrum) -> Spectrum {
    let tau = op.tau();
    let (p0, p1, _) = op.phi_tables();
    let data = u_hat
        .data
        .par_iter()
        .zip(&f_hat.data)
        .zip(p0.par_iter().zip(p1))
        .map(|((u, f), (a, b))| u * *a + f * (tau * *b))
        .collect();
    Spectrum { data }
}

fn advance(
    op: &SpectralOperator,
    scheme: Scheme,
    u: &Field,
    u_hat: &Spectrum,
    keep_predictor: bool,
) -> Result<Advance> {
    let kappa = op.params().kappa();
    let tau = op.tau();
    let f = nonlinear_term(u, kappa);
    let f_hat = op.forward(&f);
    let scale = max_norm(u) + tau * max_norm(&f);
    let pred_hat = combine(op, u_hat, &f_hat);
    match scheme {
        Scheme::Etd1 => {
            let next = op.inverse(pred_hat.clone(), scale)?;
            Ok(Advance { next, next_hat: pred_hat, predictor: None })
        }
        Scheme::Etdrk2 => {
            let pred = op.inverse(pred_hat.clone(), scale)?;
            let f_pred = nonlinear_term(&pred, kappa);
            let f_pred_hat = op.forward(&f_pred);
            let (_, _, p2) = op.phi_tables();
            let data: Vec<_> = pred_hat
                .data
                .par_iter()
                .zip(&f_pred_hat.data)
                .zip(f_hat.data.par_iter().zip(p2))
                .map(|((p, fp), (f0, c))| p + (fp - f0) * (tau * *c))
                .collect();
            let next_hat = Spectrum { data };
            let next = op.inverse(next_hat.clone(), scale + tau * max_norm(&f_pred))?;
            Ok(Advance { next, next_hat, predictor: keep_predictor.then_some(pred) })
        }
    }
}

/// One ETD1 step.
pub fn etd1_step(op: &SpectralOperator, u: &Field) -> Result<Field> {
    u.check_same_grid(op.grid())?;
    Ok(advance(op, Scheme::Etd1, u, &op.forward(u), false)?.next)
}

/// One ETDRK2 step.
pub fn etdrk2_step(op: &SpectralOperator, u: &Field) -> Result<Field> {
    Ok(etdrk2_stages(op, u)?.1)
}

/// The ETDRK2 predictor `U~` (identical to an ETD1 step) and the corrected
/// `U^{n+1}`.
pub fn etdrk2_stages(op: &SpectralOperator, u: &Field) -> Result<(Field, Field)> {
    u.check_same_grid(op.grid())?;
    let adv = advance(op, Scheme::Etdrk2, u, &op.forward(u), true)?;
    Ok((adv.predictor.expect("predictor requested"), adv.next))
}

/// Monitoring and stopping controls for [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Record every `log_stride`-th step (the final step is always recorded).
    pub log_stride: usize,
    /// Stop once `max |u^{n+1} - u^n| / tau` falls below this value.
    pub steady_tolerance: Option<f64>,
    /// Abort on a maximum-principle violation. Only effective when the model
    /// parameters carry the guarantee and `max |U^0| <= 1`.
    pub enforce_max_principle: bool,
}

impl RunOptions {
    /// Logs every step up to `n = 256`, every 10th step above.
    pub fn for_grid(grid: &Grid) -> Self {
        RunOptions {
            log_stride: if grid.n() <= 256 { 1 } else { 10 },
            steady_tolerance: None,
            enforce_max_principle: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: SolverState,
    pub log: RunLog,
    pub reached_steady_state: bool,
}

/// Advances `initial` over `plan` with `scheme`, calling `observer` after
/// every step.
pub fn run(
    op: &SpectralOperator,
    scheme: Scheme,
    initial: Field,
    plan: &TimePlan,
    options: &RunOptions,
    mut observer: impl FnMut(&SolverState),
) -> Result<RunOutcome> {
    initial.check_same_grid(op.grid())?;
    if ((plan.tau() - op.tau()) / plan.tau()).abs() > 1e-15 {
        return Err(invalid(format!(
            "operator tables built for tau = {} but the plan uses tau = {}",
            op.tau(),
            plan.tau()
        )));
    }
    if options.log_stride == 0 {
        return Err(invalid("log stride must be positive"));
    }
    let enforce = options.enforce_max_principle && op.params().guarantees() && max_norm(&initial) <= 1.0;
    let tau = plan.tau();
    let mut log = RunLog::new();
    let mut u_hat = op.forward(&initial);
    let mut state = SolverState { u: initial, t: 0.0, step: 0 };
    let mut steady = false;
    for n in 0..plan.steps() {
        let step = n + 1;
        let adv = advance(op, scheme, &state.u, &u_hat, false)?;
        if !adv.next.all_finite() {
            return Err(Error::NonFinite { step });
        }
        let norm = max_norm(&adv.next);
        if enforce && norm > 1.0 + MAX_PRINCIPLE_SLACK {
            return Err(Error::MaximumPrinciple { step, max_norm: norm });
        }
        let increment_rate = crate::diagnostics::max_diff(&adv.next, &state.u) / tau;
        steady = options.steady_tolerance.is_some_and(|tol| increment_rate < tol);
        state = SolverState { u: adv.next, t: step as f64 * tau, step };
        u_hat = adv.next_hat;
        if step % options.log_stride == 0 || step == plan.steps() || steady {
            let energy = energy_from_parts(op, &state.u, &u_hat);
            if !energy.is_finite() || !increment_rate.is_finite() {
                return Err(Error::NonFinite { step });
            }
            log.push(LogRecord { t: state.t, max_norm: norm, energy, increment_rate })?;
        }
        observer(&state);
        if steady {
            break;
        }
    }
    Ok(RunOutcome { state, log, reached_steady_state: steady })
}
