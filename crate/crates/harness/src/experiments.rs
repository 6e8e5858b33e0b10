//! The experiment drivers. Each returns an in-memory report; writing the
//! report to disk is the job of [`crate::output`].

use rayon::prelude::*;

use nlac_core::diagnostics::default_jump_row;
use nlac_core::{
    build_symbol, lac_symbol, max_diff, measure_jump, rate_table, run, Field, Grid, KernelSpec, Model, ModelParams,
    RateTable, RunLog, RunOptions, RunOutcome, Scheme, SpectralOperator, Stencil, StencilCache, StencilOptions,
    TimePlan,
};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::initial::InitialCondition;

/// Shared state for the runs of one experiment.
#[derive(Debug, Default)]
pub struct Workspace {
    stencils: StencilCache,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stencil(
        &self,
        c: &ExperimentConfig,
        alpha: f64,
        delta: f64,
        grid: &Grid,
    ) -> Result<std::sync::Arc<Stencil>> {
        let kernel = KernelSpec::new(alpha, delta)?;
        let options = StencilOptions { quadrature_order: c.quadrature_order, allow_wrap: c.allow_wrap };
        Ok(self.stencils.get_or_build(&kernel, grid, &options)?)
    }

    /// Operator for the nonlocal model with `(alpha, delta)`, or for the local
    /// model when `model` is [`Model::Local`].
    pub fn operator(
        &self,
        c: &ExperimentConfig,
        model: Model,
        alpha: f64,
        delta: f64,
        grid: Grid,
        tau: f64,
    ) -> Result<SpectralOperator> {
        let params = model_params(c)?;
        let symbol = match model {
            Model::Nonlocal => build_symbol(&*self.stencil(c, alpha, delta, &grid)?, &grid, &params)?,
            Model::Local => lac_symbol(&grid, &params),
        };
        Ok(SpectralOperator::new(grid, params, symbol, tau)?)
    }
}

pub fn model_params(c: &ExperimentConfig) -> Result<ModelParams> {
    Ok(if c.unstable_kappa { ModelParams::experimental(c.eps, c.kappa)? } else { ModelParams::new(c.eps, c.kappa)? })
}

pub fn time_plan(tau: f64, t_end: f64) -> Result<TimePlan> {
    Ok(if t_end == 0.0 { TimePlan::from_steps(tau, 0)? } else { TimePlan::new(tau, t_end)? })
}

fn quiet_options(c: &ExperimentConfig) -> RunOptions {
    RunOptions { log_stride: usize::MAX, steady_tolerance: None, enforce_max_principle: !c.unstable_kappa }
}

fn solve_to(op: &SpectralOperator, scheme: Scheme, u0: Field, t_end: f64, options: &RunOptions) -> Result<RunOutcome> {
    let plan = time_plan(op.tau(), t_end)?;
    Ok(run(op, scheme, u0, &plan, options, |_| {})?)
}

fn label_number(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Clone)]
pub struct SingleRun {
    pub initial: Field,
    pub outcome: RunOutcome,
}

pub fn single_run(c: &ExperimentConfig, ws: &Workspace) -> Result<SingleRun> {
    let grid = Grid::new(c.n, c.extent)?;
    let op = ws.operator(c, c.model, c.alpha, c.delta, grid, c.tau)?;
    let initial = InitialCondition::from_config(c)?.sample(grid);
    let mut options = RunOptions::for_grid(&grid);
    options.steady_tolerance = c.steady_tolerance;
    options.enforce_max_principle = !c.unstable_kappa;
    if let Some(stride) = c.log_stride {
        options.log_stride = stride;
    }
    let outcome = solve_to(&op, c.scheme, initial.clone(), c.t_end, &options)?;
    Ok(SingleRun { initial, outcome })
}

/// One error/rate table of a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceCase {
    pub label: String,
    pub alpha: f64,
    pub delta: f64,
    pub scheme: Scheme,
    pub table: RateTable,
}

/// Max-norm errors against an ETDRK2 benchmark with the finest step divided
/// by `benchmark_divisor`, for both schemes and every `(alpha, delta)`.
pub fn convergence_time(c: &ExperimentConfig, ws: &Workspace) -> Result<Vec<ConvergenceCase>> {
    if c.levels < 2 || c.benchmark_divisor == 0 {
        return Err(HarnessError::Usage("convergence-time needs levels >= 2 and benchmark_divisor >= 1".into()));
    }
    let grid = Grid::new(c.n, c.extent)?;
    let u0 = InitialCondition::from_config(c)?.sample(grid);
    let taus: Vec<f64> = (0..c.levels).map(|k| c.tau / 2f64.powi(k as i32)).collect();
    let tau_ref = taus[c.levels - 1] / c.benchmark_divisor as f64;
    let pairs: Vec<(f64, f64)> = c.alphas.iter().flat_map(|&a| c.deltas.iter().map(move |&d| (a, d))).collect();
    let options = quiet_options(c);
    let cases: Vec<Vec<ConvergenceCase>> = pairs
        .par_iter()
        .map(|&(alpha, delta)| {
            let base = ws.operator(c, Model::Nonlocal, alpha, delta, grid, tau_ref)?;
            let reference = solve_to(&base, Scheme::Etdrk2, u0.clone(), c.t_end, &options)?.state.u;
            [Scheme::Etd1, Scheme::Etdrk2]
                .into_iter()
                .map(|scheme| {
                    let errors = taus
                        .par_iter()
                        .map(|&tau| {
                            let op = base.with_tau(tau)?;
                            let u = solve_to(&op, scheme, u0.clone(), c.t_end, &options)?.state.u;
                            Ok((tau, max_diff(&u, &reference)))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(ConvergenceCase {
                        label: format!("{scheme}_alpha{}_delta{}", label_number(alpha), label_number(delta)),
                        alpha,
                        delta,
                        scheme,
                        table: rate_table(&errors)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(cases.into_iter().flatten().collect())
}

/// Max-norm errors on coincident nodes against the solution on
/// `benchmark_n`, with `delta` fixed.
pub fn convergence_space(c: &ExperimentConfig, ws: &Workspace) -> Result<Vec<ConvergenceCase>> {
    for &n in &c.sizes {
        if n == 0 || !c.benchmark_n.is_multiple_of(n) {
            return Err(HarnessError::Usage(format!("size {n} does not divide benchmark_n = {}", c.benchmark_n)));
        }
    }
    let ic = InitialCondition::from_config(c)?;
    let options = quiet_options(c);
    let solve = |alpha: f64, n: usize| -> Result<Field> {
        let grid = Grid::new(n, c.extent)?;
        let op = ws.operator(c, Model::Nonlocal, alpha, c.delta, grid, c.tau)?;
        Ok(solve_to(&op, c.scheme, ic.sample(grid), c.t_end, &options)?.state.u)
    };
    c.alphas
        .par_iter()
        .map(|&alpha| {
            let reference = solve(alpha, c.benchmark_n)?;
            let errors = c
                .sizes
                .par_iter()
                .map(|&n| {
                    let u = solve(alpha, n)?;
                    let stride = c.benchmark_n / n;
                    let mut err: f64 = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            err = err.max((u.get(i, j) - reference.get(i * stride, j * stride)).abs());
                        }
                    }
                    Ok((c.extent / n as f64, err))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ConvergenceCase {
                label: format!("{}_alpha{}_delta{}", c.scheme, label_number(alpha), label_number(c.delta)),
                alpha,
                delta: c.delta,
                scheme: c.scheme,
                table: rate_table(&errors)?,
            })
        })
        .collect()
}

/// Max-norm gap between the nonlocal solutions for `delta / 2^k` and the
/// local solution on the same grid.
pub fn convergence_delta(c: &ExperimentConfig, ws: &Workspace) -> Result<Vec<ConvergenceCase>> {
    if c.levels < 2 {
        return Err(HarnessError::Usage("convergence-delta needs levels >= 2".into()));
    }
    let grid = Grid::new(c.n, c.extent)?;
    let u0 = InitialCondition::from_config(c)?.sample(grid);
    let options = quiet_options(c);
    let local = ws.operator(c, Model::Local, c.alpha, c.delta, grid, c.tau)?;
    let reference = solve_to(&local, c.scheme, u0.clone(), c.t_end, &options)?.state.u;
    let deltas: Vec<f64> = (0..c.levels).map(|k| c.delta / 2f64.powi(k as i32)).collect();
    c.alphas
        .par_iter()
        .map(|&alpha| {
            let errors = deltas
                .par_iter()
                .map(|&delta| {
                    let op = ws.operator(c, Model::Nonlocal, alpha, delta, grid, c.tau)?;
                    let u = solve_to(&op, c.scheme, u0.clone(), c.t_end, &options)?.state.u;
                    Ok((delta, max_diff(&u, &reference)))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ConvergenceCase {
                label: format!("{}_alpha{}", c.scheme, label_number(alpha)),
                alpha,
                delta: c.delta,
                scheme: c.scheme,
                table: rate_table(&errors)?,
            })
        })
        .collect()
}

/// A monitored long run with snapshots.
#[derive(Debug, Clone)]
pub struct MonitoredRun {
    pub label: String,
    pub model: Model,
    pub delta: Option<f64>,
    pub log: RunLog,
    pub snapshots: Vec<(f64, Field)>,
    pub final_state: Field,
    pub t_final: f64,
    pub steady: bool,
}

impl MonitoredRun {
    pub fn peak_norm(&self) -> f64 {
        self.log.records().iter().map(|r| r.max_norm).fold(0.0, f64::max)
    }

    /// Whether the logged energy never rises by more than `tol` relative.
    pub fn energy_monotone(&self, tol: f64) -> bool {
        self.log.records().windows(2).all(|w| w[1].energy <= w[0].energy + tol * (1.0 + w[0].energy.abs()))
    }
}

fn monitored(
    c: &ExperimentConfig,
    op: &SpectralOperator,
    label: String,
    model: Model,
    delta: Option<f64>,
    u0: Field,
) -> Result<MonitoredRun> {
    let plan = time_plan(c.tau, c.t_end)?;
    let mut options = RunOptions::for_grid(op.grid());
    options.steady_tolerance = c.steady_tolerance;
    options.enforce_max_principle = !c.unstable_kappa;
    if let Some(stride) = c.log_stride {
        options.log_stride = stride;
    }
    let dump_steps: Vec<(usize, f64)> =
        c.dump_times.iter().map(|&t| ((t / c.tau).round() as usize, t)).filter(|&(s, _)| s <= plan.steps()).collect();
    let mut snapshots = Vec::new();
    if let Some(&(_, t)) = dump_steps.iter().find(|(s, _)| *s == 0) {
        snapshots.push((t, u0.clone()));
    }
    let outcome = run(op, c.scheme, u0, &plan, &options, |state| {
        if let Some(&(_, t)) = dump_steps.iter().find(|(s, _)| *s == state.step) {
            snapshots.push((t, state.u.clone()));
        }
    })?;
    Ok(MonitoredRun {
        label,
        model,
        delta,
        log: outcome.log,
        snapshots,
        t_final: outcome.state.t,
        final_state: outcome.state.u,
        steady: outcome.reached_steady_state,
    })
}

/// Nonlocal runs for every entry of `deltas`, plus the local model when
/// `include_local` is set.
pub fn stability(c: &ExperimentConfig, ws: &Workspace) -> Result<Vec<MonitoredRun>> {
    let grid = Grid::new(c.n, c.extent)?;
    let u0 = InitialCondition::from_config(c)?.sample(grid);
    let mut jobs: Vec<(Model, Option<f64>)> = c.deltas.iter().map(|&d| (Model::Nonlocal, Some(d))).collect();
    if c.include_local {
        jobs.push((Model::Local, None));
    }
    jobs.par_iter()
        .map(|&(model, delta)| {
            let op = ws.operator(c, model, c.alpha, delta.unwrap_or(c.delta), grid, c.tau)?;
            let label = match delta {
                Some(d) => format!("nac_delta{}", label_number(d)),
                None => "lac".to_string(),
            };
            monitored(c, &op, label, model, delta, u0.clone())
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct BubbleRun {
    pub delta: f64,
    /// Zero when the steady state is continuous.
    pub predicted: f64,
    pub measured: f64,
    /// No node is left in the positive phase.
    pub extinct: bool,
    pub run: MonitoredRun,
}

/// Runs the bubble to steady state for every `delta` and measures the jump
/// along the row nearest the domain's mid-line.
pub fn bubble(c: &ExperimentConfig, ws: &Workspace) -> Result<Vec<BubbleRun>> {
    let grid = Grid::new(c.n, c.extent)?;
    let u0 = InitialCondition::from_config(c)?.sample(grid);
    let row = default_jump_row(grid.n());
    c.deltas
        .par_iter()
        .map(|&delta| {
            let predicted = KernelSpec::new(c.alpha, delta)?.predicted_jump(c.eps)?;
            let op = ws.operator(c, Model::Nonlocal, c.alpha, delta, grid, c.tau)?;
            let run =
                monitored(c, &op, format!("delta{}", label_number(delta)), Model::Nonlocal, Some(delta), u0.clone())?;
            let measured = measure_jump(&run.final_state, row)?;
            let extinct = run.final_state.values().iter().all(|&v| v < 0.0);
            Ok(BubbleRun { delta, predicted, measured, extinct, run })
        })
        .collect()
}

/// Stencil coefficients for `(alpha, delta)` on the grid of spacing
/// `extent / n`.
pub fn coeffs(c: &ExperimentConfig, ws: &Workspace) -> Result<std::sync::Arc<Stencil>> {
    let grid = Grid::new(c.n, c.extent)?;
    ws.stencil(c, c.alpha, c.delta, &grid)
}
