//! Solvers for the nonlocal Allen-Cahn equation
//!
//! ```text
//! u_t - eps^2 L_delta u + u^3 - u = 0   on the periodic square (0, X)^2,
//! ```
//!
//! where `L_delta` is a nonlocal diffusion operator with a fractional-power
//! kernel of horizon `delta`. Space is discretized with quadrature-based
//! finite differences ([`operator`]); time is advanced with stabilized
//! exponential time differencing ([`etd`]) whose operator functions are
//! applied through the 2D FFT ([`spectral`]). Both time steppers keep
//! `max |u| <= 1` for any step size when the stabilizer `kappa >= 2`.

pub mod diagnostics;
pub mod error;
pub mod etd;
pub mod kernels;
pub mod operator;
pub mod quadrature;
pub mod spectral;

pub use diagnostics::{
    discrete_energy, discrete_energy_fft, max_diff, max_norm, measure_jump, rate_table, LogRecord, RateTable, RunLog,
};
pub use error::{Error, Result};
pub use etd::{
    etd1_step, etdrk2_step, lac_symbol, nonlinear_term, run, Model, RunOptions, RunOutcome, Scheme, SolverState,
    TimePlan,
};
pub use kernels::{critical_delta, KernelMass, KernelSpec};
pub use operator::{apply_direct, build_stencil, sample_function, Field, Grid, Stencil, StencilCache, StencilOptions};
pub use spectral::{build_symbol, local_symbol, ModelParams, Multiplier, SpectralOperator, Symbol};
