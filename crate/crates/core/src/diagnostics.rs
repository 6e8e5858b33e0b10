//! Discrete energy, norms, jump measurement, convergence-rate tables and the
//! per-step run log.

use std::collections::BTreeMap;
use std::io::{self, Write};

use crate::error::{invalid, Result};
use crate::operator::{apply_direct, Field, Stencil};
use crate::spectral::SpectralOperator;

/// `max |u_ij|`.
pub fn max_norm(u: &Field) -> f64 {
    u.values().iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `max |a - b|`.
pub fn max_diff(a: &Field, b: &Field) -> f64 {
    a.values().iter().zip(b.values()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn double_well(u: &Field) -> f64 {
    0.25 * u.values().iter().map(|v| (v * v - 1.0) * (v * v - 1.0)).sum::<f64>()
}

/// Discrete energy `E_h(U) = 1/4 sum (U_i^2 - 1)^2 - eps^2/2 U^T D_h U` with
/// plain (unweighted) sums, the quadratic term by direct stencil summation.
pub fn discrete_energy(u: &Field, stencil: &Stencil, eps: f64) -> Result<f64> {
    let du = apply_direct(stencil, u)?;
    let quad: f64 = u.values().iter().zip(du.values()).map(|(a, b)| a * b).sum();
    Ok(double_well(u) - 0.5 * eps * eps * quad)
}

/// [`discrete_energy`] with the quadratic term evaluated in Fourier space by
/// Parseval. Works for any operator the spectral layer represents,
/// including the local 5-point reference.
pub fn discrete_energy_fft(op: &SpectralOperator, u: &Field) -> Result<f64> {
    u.check_same_grid(op.grid())?;
    let spec = op.forward(u);
    Ok(energy_from_parts(op, u, &spec))
}

pub(crate) fn energy_from_parts(op: &SpectralOperator, u: &Field, spec: &crate::spectral::Spectrum) -> f64 {
    let eps = op.params().eps();
    double_well(u) - 0.5 * eps * eps * op.diffusion_quadratic(spec)
}

/// `h^2 E_h`, a Riemann sum of the continuum energy. Reported for plotting;
/// stability checks use the unweighted [`discrete_energy`].
pub fn physical_energy(op: &SpectralOperator, u: &Field) -> Result<f64> {
    let h = op.grid().spacing();
    Ok(h * h * discrete_energy_fft(op, u)?)
}

/// Row index (second array index, the `y` coordinate) nearest `y = X/2`.
pub fn default_jump_row(n: usize) -> usize {
    (n as f64 / 2.0).round() as usize % n
}

/// Largest jump `max_i |u_{i+1,row} - u_{i,row}|` along the cross-section
/// `j = row`, including the periodic wrap from the last node to the first.
pub fn measure_jump(u: &Field, row: usize) -> Result<f64> {
    let n = u.grid().n();
    if row >= n {
        return Err(invalid(format!("cross-section row {row} outside a grid of {n}")));
    }
    Ok((0..n).map(|i| (u.get((i + 1) % n, row) - u.get(i, row)).abs()).fold(0.0, f64::max))
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub param: f64,
    pub error: f64,
    pub rate: Option<f64>,
}

/// Errors against a resolution parameter with observed orders
/// `log(e_{i-1}/e_i) / log(p_{i-1}/p_i)` (`log2` of the error ratio when the
/// parameter halves).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
}

impl RateTable {
    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "param,error,rate")?;
        for r in &self.rows {
            match r.rate {
                Some(rate) => writeln!(w, "{:e},{:e},{}", r.param, r.error, rate)?,
                None => writeln!(w, "{:e},{:e},", r.param, r.error)?,
            }
        }
        Ok(())
    }
}

/// Builds a [`RateTable`] from `(param, error)` pairs with strictly
/// decreasing positive parameters. A rate is absent when either error is not
/// positive.
pub fn rate_table(entries: &[(f64, f64)]) -> Result<RateTable> {
    for (k, &(p, e)) in entries.iter().enumerate() {
        if !(p > 0.0 && p.is_finite()) {
            return Err(invalid(format!("resolution parameter {p} must be positive")));
        }
        if !(e >= 0.0 && e.is_finite()) {
            return Err(invalid(format!("error {e} must be finite and nonnegative")));
        }
        if k > 0 && !(p < entries[k - 1].0) {
            return Err(invalid("resolution parameters must be strictly decreasing"));
        }
    }
    let rows = entries
        .iter()
        .enumerate()
        .map(|(k, &(param, error))| {
            let rate = (k > 0).then(|| {
                let (p0, e0) = entries[k - 1];
                let ratio = p0 / param;
                if (ratio - 2.0).abs() < 1e-12 {
                    (e0 / error).log2()
                } else {
                    (e0 / error).ln() / ratio.ln()
                }
            });
            RateRow { param, error, rate: rate.filter(|r| r.is_finite()) }
        })
        .collect();
    Ok(RateTable { rows })
}

/// Diagnostics recorded after a time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRecord {
    pub t: f64,
    pub max_norm: f64,
    pub energy: f64,
    /// `max |u^{n+1} - u^n| / tau`.
    pub increment_rate: f64,
}

/// Time series of [`LogRecord`]s plus free-form run metadata.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunLog {
    records: Vec<LogRecord>,
    pub metadata: BTreeMap<String, String>,
}

impl RunLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn records(&self) -> &[LogRecord] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Appends a record; times must increase strictly and all entries be finite.
    pub fn push(&mut self, rec: LogRecord) -> Result<()> {
        if ![rec.t, rec.max_norm, rec.energy, rec.increment_rate].iter().all(|v| v.is_finite()) {
            return Err(invalid(format!("non-finite log record at t = {}", rec.t)));
        }
        if let Some(last) = self.records.last() {
            if !(rec.t > last.t) {
                return Err(invalid(format!("log time {} does not follow {}", rec.t, last.t)));
            }
        }
        self.records.push(rec);
        Ok(())
    }

    /// CSV with columns `t,max_norm,energy,increment_rate`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,max_norm,energy,increment_rate")?;
        for r in &self.records {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", r.t, r.max_norm, r.energy, r.increment_rate)?;
        }
        Ok(())
    }
}
