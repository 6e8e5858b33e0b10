//! Fourier symbols of the stabilized operator `L_h = kappa I - eps^2 D_h` and
//! FFT application of `L_h`, `D_h` and `phi_gamma(L_h tau)`.
//!
//! On a periodic grid `L_h` is diagonalized by the 2D DFT with eigenvalues
//!
//! ```text
//! lambda_kl = kappa + 4 eps^2 sum_{p,q} c_pq (1 - cos(2 pi k p / n) cos(2 pi l q / n)),
//! ```
//!
//! with 0-based mode indices `k, l` (the 1-based `(k-1)` convention shifted).
//! Every operator function is then a pointwise multiplier on the spectrum.

mod fft;
pub mod phi;

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::operator::{Field, Grid, Stencil};

pub(crate) use fft::{Fft2, Spectrum};
pub use phi::{phi, phi0, phi1, phi2};

/// Imaginary residue tolerated after an inverse transform, relative to the
/// max norm of the transformed input.
pub const IMAGINARY_TOLERANCE: f64 = 1e-12;

/// Interfacial parameter `eps` and stabilizer `kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    eps: f64,
    kappa: f64,
    guarantees: bool,
}

impl ModelParams {
    /// Requires `kappa >= 2`, under which both ETD schemes preserve the
    /// maximum principle for every step size.
    pub fn new(eps: f64, kappa: f64) -> Result<Self> {
        Self::check_eps(eps)?;
        if !(kappa >= 2.0 && kappa.is_finite()) {
            return Err(invalid(format!(
                "stabilizer kappa must be >= 2 for the maximum principle, got {kappa}; use ModelParams::experimental to override"
            )));
        }
        Ok(ModelParams { eps, kappa, guarantees: true })
    }

    /// Accepts any `kappa >= 0`. Maximum-principle enforcement is disabled
    /// for such parameters.
    pub fn experimental(eps: f64, kappa: f64) -> Result<Self> {
        Self::check_eps(eps)?;
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(invalid(format!("stabilizer kappa must be nonnegative, got {kappa}")));
        }
        Ok(ModelParams { eps, kappa, guarantees: false })
    }

    fn check_eps(eps: f64) -> Result<()> {
        if eps.is_finite() && eps > 0.0 {
            Ok(())
        } else {
            Err(invalid(format!("interfacial parameter eps must be positive, got {eps}")))
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Whether the maximum principle is guaranteed (and therefore enforced).
    pub fn guarantees(&self) -> bool {
        self.guarantees
    }
}

/// Eigenvalues `lambda_kl` on an `n x n` grid, row-major in `(k, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    n: usize,
    values: Vec<f64>,
}

impl Symbol {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Self {
        let values = (0..n * n).into_par_iter().map(|k| f(k / n, k % n)).collect();
        Symbol { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `lambda` at 0-based mode `(k, l)`.
    #[inline]
    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.values[k * self.n + l]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `lambda_kl` of the nonlocal operator from its stencil.
pub fn build_symbol(stencil: &Stencil, grid: &Grid, params: &ModelParams) -> Result<Symbol> {
    let h = grid.spacing();
    if ((stencil.spacing() - h) / h).abs() > 1e-12 {
        return Err(invalid(format!("stencil built for h = {} used on a grid with h = {h}", stencil.spacing())));
    }
    let n = grid.n();
    let w = stencil.radius() + 1;
    let cos_table: Vec<f64> = (0..n).map(|m| (2.0 * PI * m as f64 / n as f64).cos()).collect();
    let cos_at = |k: usize, p: usize| cos_table[(k * p) % n];
    let c = stencil.coeffs();
    // partial[p][l] = sum_q c_pq cos(2 pi l q / n)
    let partial: Vec<f64> = (0..w * n)
        .into_par_iter()
        .map(|idx| {
            let (p, l) = (idx / n, idx % n);
            (0..w).map(|q| c[p * w + q] * cos_at(l, q)).sum()
        })
        .collect();
    // summed in the same order as `mixed` so that lambda_00 = kappa exactly
    let total: f64 = (0..w).map(|p| partial[p * n]).sum();
    let scale = 4.0 * params.eps() * params.eps();
    let kappa = params.kappa();
    Ok(Symbol::from_fn(n, |k, l| {
        let mixed: f64 = (0..w).map(|p| cos_at(k, p) * partial[p * n + l]).sum();
        kappa + scale * (total - mixed)
    }))
}

/// Symbol of `kappa I - eps^2 Delta_h` with the 5-point Laplacian, the local
/// counterpart used for the classical Allen-Cahn reference.
pub fn local_symbol(grid: &Grid, params: &ModelParams) -> Symbol {
    let n = grid.n();
    let h2 = grid.spacing() * grid.spacing();
    let e2 = params.eps() * params.eps();
    let kappa = params.kappa();
    let w = |k: usize| 2.0 - 2.0 * (2.0 * PI * k as f64 / n as f64).cos();
    Symbol::from_fn(n, |k, l| kappa + e2 * (w(k) + w(l)) / h2)
}

/// Which operator an FFT application realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplier {
    /// `L_h`, multiplier `lambda`.
    Stabilized,
    /// `D_h`, multiplier `(kappa - lambda)/eps^2`.
    Diffusion,
    Phi0,
    Phi1,
    Phi2,
}

/// Per-mode tables in the transposed half-spectrum layout.
#[derive(Debug)]
struct Tables {
    lambda: Vec<f64>,
    phi0: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
}

/// Symbol plus `phi` tables for one step size.
#[derive(Debug, Clone)]
pub struct SpectralOperator {
    grid: Grid,
    params: ModelParams,
    symbol: Arc<Symbol>,
    tau: f64,
    tables: Arc<Tables>,
    fft: Arc<Fft2>,
}

impl SpectralOperator {
    pub fn new(grid: Grid, params: ModelParams, symbol: Symbol, tau: f64) -> Result<Self> {
        if symbol.n() != grid.n() {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0} symbol", grid.n()),
                actual: format!("{0}x{0} symbol", symbol.n()),
            });
        }
        let fft = Arc::new(Fft2::new(grid.n()));
        Self::assemble(grid, params, Arc::new(symbol), tau, fft)
    }

    /// Same symbol, new step size; only the `phi` tables are recomputed.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::assemble(self.grid, self.params, Arc::clone(&self.symbol), tau, Arc::clone(&self.fft))
    }

    fn assemble(grid: Grid, params: ModelParams, symbol: Arc<Symbol>, tau: f64, fft: Arc<Fft2>) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(invalid(format!("time step must be positive, got {tau}")));
        }
        if let Some(bad) = symbol.values().iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(invalid(format!("symbol value {bad} is negative or not finite")));
        }
        let n = grid.n();
        let m = fft.half();
        let lambda: Vec<f64> = (0..m * n).map(|idx| symbol.get(idx % n, idx / n)).collect();
        let table = |f: fn(f64) -> f64| lambda.par_iter().map(|l| f(l * tau)).collect::<Vec<_>>();
        let tables = Tables { phi0: table(phi0), phi1: table(phi1), phi2: table(phi2), lambda };
        Ok(SpectralOperator { grid, params, symbol, tau, tables: Arc::new(tables), fft })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    /// `phi_gamma(lambda_kl tau)` at 0-based mode `(k, l)`.
    pub fn phi_value(&self, gamma: u8, k: usize, l: usize) -> Result<f64> {
        phi(gamma, self.symbol.get(k, l) * self.tau)
    }

    /// Applies the requested operator to `u` through the FFT.
    pub fn apply(&self, which: Multiplier, u: &Field) -> Result<Field> {
        u.check_same_grid(&self.grid)?;
        let mut spec = self.forward(u);
        let t = &*self.tables;
        let (kappa, e2) = (self.params.kappa(), self.params.eps() * self.params.eps());
        spec.data.par_iter_mut().enumerate().for_each(|(idx, z)| {
            let m = match which {
                Multiplier::Stabilized => t.lambda[idx],
                Multiplier::Diffusion => (kappa - t.lambda[idx]) / e2,
                Multiplier::Phi0 => t.phi0[idx],
                Multiplier::Phi1 => t.phi1[idx],
                Multiplier::Phi2 => t.phi2[idx],
            };
            *z *= m;
        });
        self.inverse(spec, crate::diagnostics::max_norm(u))
    }

    pub(crate) fn forward(&self, u: &Field) -> Spectrum {
        self.fft.forward(u.values())
    }

    /// Inverse transform with the imaginary-residue check; `scale` is the max
    /// norm the residue is measured against.
    pub(crate) fn inverse(&self, spec: Spectrum, scale: f64) -> Result<Field> {
        let (values, residue) = self.fft.inverse(spec);
        let bound = IMAGINARY_TOLERANCE * scale.max(f64::MIN_POSITIVE);
        if residue > bound {
            return Err(Error::ImaginaryResidue { residue, bound });
        }
        Ok(Field::from_raw(self.grid, values))
    }

    pub(crate) fn phi_tables(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.tables.phi0, &self.tables.phi1, &self.tables.phi2)
    }

    /// `sum_x u (D_h u)` evaluated from the spectrum of `u`.
    pub(crate) fn diffusion_quadratic(&self, spec: &Spectrum) -> f64 {
        let n = self.grid.n();
        let (kappa, e2) = (self.params.kappa(), self.params.eps() * self.params.eps());
        let lambda = &self.tables.lambda;
        let fft = &self.fft;
        let sum: f64 = spec
            .data
            .par_chunks(n)
            .zip(lambda.par_chunks(n))
            .enumerate()
            .map(|(l, (zs, ls))| {
                let weight = if fft.is_self_conjugate(l) { 1.0 } else { 2.0 };
                weight * zs.iter().zip(ls).map(|(z, lam)| z.norm_sqr() * (kappa - lam) / e2).sum::<f64>()
            })
            .sum();
        sum / (n * n) as f64
    }
}

#[cfg(test)]
mod tests;
