//! Periodic grids, nodal fields and the quadrature-based discrete nonlocal
//! operator.

mod stencil;

pub use stencil::{build_stencil, Stencil, StencilCache, StencilOptions, DEFAULT_QUADRATURE_ORDER};

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

/// Uniform periodic `n x n` mesh over `(0, extent)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    extent: f64,
}

impl Grid {
    pub fn new(n: usize, extent: f64) -> Result<Self> {
        if n < 4 {
            return Err(invalid(format!("grid needs at least 4 nodes per dimension, got {n}")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(invalid(format!("domain extent must be positive, got {extent}")));
        }
        Ok(Grid { n, extent })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn spacing(&self) -> f64 {
        self.extent / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    /// Coordinate of node index `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    #[inline]
    pub fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.n as isize) as usize
    }
}

/// Nodal values on a [`Grid`], stored row-major: row `i` is the line `x = i h`,
/// column `j` is `y = j h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} values", grid.len()),
                actual: format!("{} values", values.len()),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("field value at ({}, {}) is not finite", k / grid.n(), k % grid.n())));
        }
        Ok(Field { grid, values })
    }

    /// Wraps values that are known to have the grid's shape.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Field { grid, values: vec![value; grid.len()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n + j]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Field {
        Field::from_raw(self.grid, self.values.par_iter().map(|&v| f(v)).collect())
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_same_grid(&self, grid: &Grid) -> Result<()> {
        if self.grid.n != grid.n {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0} grid", grid.n),
                actual: format!("{0}x{0} grid", self.grid.n),
            });
        }
        Ok(())
    }
}

/// Samples `f(x, y)` at every node, `values[i][j] = f(i h, j h)`.
pub fn sample_function(grid: Grid, f: impl Fn(f64, f64) -> f64 + Sync) -> Field {
    let n = grid.n();
    let h = grid.spacing();
    let values = (0..grid.len()).into_par_iter().map(|k| f((k / n) as f64 * h, (k % n) as f64 * h)).collect();
    Field::from_raw(grid, values)
}

/// Applies the discrete nonlocal operator by direct stencil summation,
///
/// ```text
/// v_ij = sum_{p,q} c_pq (u_{i+p,j+q} + u_{i-p,j+q} + u_{i+p,j-q} + u_{i-p,j-q} - 4 u_ij)
/// ```
///
/// with periodic indices. Costs `O(n^2 r^2)`; the FFT route in
/// [`crate::spectral`] is the production path and this one is its oracle.
pub fn apply_direct(stencil: &Stencil, u: &Field) -> Result<Field> {
    let grid = *u.grid();
    let n = grid.n();
    let r = stencil.radius();
    if 2 * r >= n {
        return Err(Error::StencilWraps { radius: r, n });
    }
    let h = grid.spacing();
    if ((stencil.spacing() - h) / h).abs() > 1e-12 {
        return Err(invalid(format!("stencil built for h = {} applied on a grid with h = {h}", stencil.spacing())));
    }
    let taps: Vec<(usize, usize, f64)> = stencil.nonzero().collect();
    let total: f64 = taps.iter().map(|t| t.2).sum();
    let vals = u.values();
    let mut out = vec![0.0; grid.len()];
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, slot) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &(p, q, c) in &taps {
                let ip = (i + p) % n;
                let im = (i + n - p) % n;
                let jp = (j + q) % n;
                let jm = (j + n - q) % n;
                acc += c * (vals[ip * n + jp] + vals[im * n + jp] + vals[ip * n + jm] + vals[im * n + jm]);
            }
            *slot = acc - 4.0 * total * vals[i * n + j];
        }
    });
    Ok(Field::from_raw(grid, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;
    use std::f64::consts::PI;

    #[test]
    fn grid_validation() {
        assert!(Grid::new(3, 1.0).is_err());
        assert!(Grid::new(4, 0.0).is_err());
        let g = Grid::new(8, 2.0 * PI).unwrap();
        assert!((g.spacing() - PI / 4.0).abs() < 1e-15);
        assert_eq!(g.wrap(-1), 7);
        assert_eq!(g.wrap(9), 1);
    }

    #[test]
    fn field_validation() {
        let g = Grid::new(4, 1.0).unwrap();
        assert!(Field::new(g, vec![0.0; 15]).is_err());
        let mut v = vec![0.0; 16];
        v[5] = f64::NAN;
        assert!(Field::new(g, v).is_err());
    }

    #[test]
    fn sampling() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let ones = sample_function(g, |_, _| 1.0);
        assert!(ones.values().iter().all(|&v| v == 1.0));
        let s = sample_function(g, |x, y| 0.5 * x.sin() * y.sin());
        assert!((s.get(4, 4) - 0.5).abs() < 1e-15);
        assert!((s.get(3, 5) - 0.5 * (3.0 * PI / 8.0).sin() * (5.0 * PI / 8.0).sin()).abs() < 1e-15);
    }

    #[test]
    fn direct_rejects_wrapping_stencil() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let k = KernelSpec::new(1.0, 3.0).unwrap();
        let s = build_stencil(&k, &g, &StencilOptions::default()).unwrap();
        assert!(matches!(apply_direct(&s, &Field::zeros(g)), Err(Error::StencilWraps { .. })));
    }

    #[test]
    fn single_node_response() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let k = KernelSpec::new(1.0, 2.0).unwrap();
        let s = build_stencil(&k, &g, &StencilOptions::default()).unwrap();
        let mut v = vec![0.0; g.len()];
        v[3 * 16 + 7] = 1.0;
        let out = apply_direct(&s, &Field::new(g, v).unwrap()).unwrap();
        let sum: f64 = s.nonzero().map(|t| t.2).sum();
        assert!((out.get(3, 7) + 4.0 * sum).abs() < 1e-12 * sum);
    }
}
