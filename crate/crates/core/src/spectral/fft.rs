//! Real 2D FFT on square periodic grids.
//!
//! Rows (the `y` direction) go through a real-to-complex transform, the
//! resulting `n/2 + 1` columns through complex transforms. Spectra are kept
//! transposed, `data[l * n + k]` for `x`-frequency `k` and `y`-frequency `l`,
//! so that both passes operate on contiguous memory.

use std::sync::Arc;

use rayon::prelude::*;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct Fft2 {
    n: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("n", &self.n).finish()
    }
}

/// Half spectrum in transposed layout.
#[derive(Debug, Clone)]
pub(crate) struct Spectrum {
    pub data: Vec<Complex64>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut real = RealFftPlanner::<f64>::new();
        let mut cplx = FftPlanner::<f64>::new();
        Fft2 {
            n,
            r2c: real.plan_fft_forward(n),
            c2r: real.plan_fft_inverse(n),
            fwd: cplx.plan_fft_forward(n),
            inv: cplx.plan_fft_inverse(n),
        }
    }

    /// Number of retained `y`-frequencies.
    pub fn half(&self) -> usize {
        self.n / 2 + 1
    }

    /// Indices `l` whose bins are their own conjugate partners.
    pub fn is_self_conjugate(&self, l: usize) -> bool {
        l == 0 || (self.n.is_multiple_of(2) && l == self.n / 2)
    }

    pub fn forward(&self, input: &[f64]) -> Spectrum {
        let n = self.n;
        let m = self.half();
        debug_assert_eq!(input.len(), n * n);
        let mut rows = vec![Complex64::new(0.0, 0.0); n * m];
        rows.par_chunks_mut(m).zip(input.par_chunks(n)).for_each_init(
            || (vec![0.0; n], self.r2c.make_scratch_vec()),
            |(buf, scratch), (out, row)| {
                buf.copy_from_slice(row);
                self.r2c.process_with_scratch(buf, out, scratch).expect("buffer lengths match the plan");
            },
        );
        let mut data = transpose(&rows, n, m);
        data.par_chunks_mut(n).for_each_init(
            || vec![Complex64::new(0.0, 0.0); self.fwd.get_inplace_scratch_len()],
            |scratch, col| self.fwd.process_with_scratch(col, scratch),
        );
        Spectrum { data }
    }

    /// Inverse transform including the `1/n^2` normalization. Returns the real
    /// field and the largest imaginary part found in the self-conjugate bins
    /// (which the real inverse discards).
    pub fn inverse(&self, mut spec: Spectrum) -> (Vec<f64>, f64) {
        let n = self.n;
        let m = self.half();
        spec.data.par_chunks_mut(n).for_each_init(
            || vec![Complex64::new(0.0, 0.0); self.inv.get_inplace_scratch_len()],
            |scratch, col| self.inv.process_with_scratch(col, scratch),
        );
        let mut rows = transpose(&spec.data, m, n);
        let scale = 1.0 / (n * n) as f64;
        let mut out = vec![0.0; n * n];
        let residue = out
            .par_chunks_mut(n)
            .zip(rows.par_chunks_mut(m))
            .map_init(
                || self.c2r.make_scratch_vec(),
                |scratch, (dst, row)| {
                    let mut worst: f64 = row[0].im.abs();
                    row[0].im = 0.0;
                    if n.is_multiple_of(2) {
                        worst = worst.max(row[m - 1].im.abs());
                        row[m - 1].im = 0.0;
                    }
                    self.c2r.process_with_scratch(row, dst, scratch).expect("buffer lengths match the plan");
                    for v in dst.iter_mut() {
                        *v *= scale;
                    }
                    worst * scale
                },
            )
            .reduce(|| 0.0, f64::max);
        (out, residue)
    }
}

/// Transposes a `rows x cols` matrix.
fn transpose(src: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut dst = vec![Complex64::new(0.0, 0.0); rows * cols];
    const B: usize = 32;
    dst.par_chunks_mut(rows * B.min(cols)).enumerate().for_each(|(blk, out)| {
        let c0 = blk * B;
        let c1 = (c0 + B).min(cols);
        for r0 in (0..rows).step_by(B) {
            let r1 = (r0 + B).min(rows);
            for c in c0..c1 {
                for r in r0..r1 {
                    out[(c - c0) * rows + r] = src[r * cols + c];
                }
            }
        }
    });
    dst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transpose_roundtrip() {
        let (r, c) = (37, 70);
        let src: Vec<Complex64> = (0..r * c).map(|k| Complex64::new(k as f64, -(k as f64))).collect();
        let t = transpose(&src, r, c);
        assert_eq!(t[5 * r + 3], src[3 * c + 5]);
        assert_eq!(transpose(&t, c, r), src);
    }

    #[test]
    fn matches_naive_dft() {
        for n in [4usize, 6, 8, 9] {
            let fft = Fft2::new(n);
            let u: Vec<f64> = (0..n * n).map(|k| ((k * 7919) % 13) as f64 - 6.0).collect();
            let spec = fft.forward(&u);
            for k in 0..n {
                for l in 0..fft.half() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..n {
                        for j in 0..n {
                            let ang = -2.0 * std::f64::consts::PI * ((k * i + l * j) % n) as f64 / n as f64;
                            acc += u[i * n + j] * Complex64::from_polar(1.0, ang);
                        }
                    }
                    assert!((spec.data[l * n + k] - acc).norm() < 1e-10, "n={n} k={k} l={l}");
                }
            }
            let (back, residue) = fft.inverse(spec);
            assert!(residue < 1e-12);
            for (a, b) in back.iter().zip(&u) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
