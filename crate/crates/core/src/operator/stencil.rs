//! Stencil coefficients `c_pq` of the quadrature-based finite-difference
//! discretization.
//!
//! With `psi_pq` the bilinear hat function at `(p h, q h)` and `B+` the first
//! quadrant of the horizon disc,
//!
//! ```text
//! c_pq = (p + q) / ((p^2 + q^2) h) * iint_{B+} psi_pq rho(|s|) |s|^2 / (x + y) dx dy,   c_00 = 0.
//! ```
//!
//! The integral is accumulated cell by cell: on each mesh cell the four hat
//! pieces are bilinear, so one set of quadrature points serves all four
//! corners. Integration is carried out in polar coordinates, where the
//! integrand becomes `K rho^(2-alpha) psi / (cos + sin)`; the angular range of
//! a cell is split at every corner and every crossing of the horizon arc so
//! that each piece is smooth. The cell touching the origin integrates the
//! radial factor exactly, which absorbs the `r^(-alpha)` singularity for all
//! `alpha < 4`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use crate::error::{invalid, Error, Result};
use crate::kernels::KernelSpec;
use crate::operator::Grid;
use crate::quadrature::GaussRule;

pub const DEFAULT_QUADRATURE_ORDER: usize = 16;

/// Residual allowed in the discrete second-moment identity `h^2 sum c_pq (p^2 + q^2) = 1`.
const MOMENT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilOptions {
    /// Gauss-Legendre points per angular piece and per radial segment.
    pub quadrature_order: usize,
    /// Permit `delta > X/2`; the stencil then wraps around the periodic domain.
    pub allow_wrap: bool,
}

impl Default for StencilOptions {
    fn default() -> Self {
        StencilOptions { quadrature_order: DEFAULT_QUADRATURE_ORDER, allow_wrap: false }
    }
}

/// Nonnegative, symmetric coefficients `c_pq`, `0 <= p, q <= r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    radius: usize,
    coeffs: Vec<f64>,
    kernel: KernelSpec,
    spacing: f64,
}

impl Stencil {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn coeff(&self, p: usize, q: usize) -> f64 {
        let w = self.radius + 1;
        self.coeffs[p * w + q]
    }

    /// Row-major `(r + 1) x (r + 1)` coefficient table.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `(p, q, c_pq)` for every nonzero coefficient.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let w = self.radius + 1;
        self.coeffs.iter().enumerate().filter(|(_, c)| **c != 0.0).map(move |(k, c)| (k / w, k % w, *c))
    }

    /// `h^2 sum c_pq (p^2 + q^2)`, which equals 1 for an exact quadrature:
    /// the scheme reproduces `L (x^2 + y^2) = 4`.
    pub fn second_moment(&self) -> f64 {
        let h2 = self.spacing * self.spacing;
        self.nonzero().map(|(p, q, c)| c * (p * p + q * q) as f64).sum::<f64>() * h2
    }

    /// Plain-text golden format: a header
    /// `r=<int> alpha=<real> delta=<real> h=<real>` followed by `r + 1` rows of
    /// `r + 1` coefficients in 17 significant digits.
    pub fn to_golden(&self) -> String {
        let w = self.radius + 1;
        let mut out = String::with_capacity(w * w * 25 + 64);
        let _ = writeln!(
            out,
            "r={} alpha={:?} delta={:?} h={:?}",
            self.radius,
            self.kernel.alpha(),
            self.kernel.delta(),
            self.spacing
        );
        for row in self.coeffs.chunks(w) {
            let line: Vec<String> = row.iter().map(|c| format!("{c:.16e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the golden format written by [`Stencil::to_golden`] and checks
    /// the coefficient invariants.
    pub fn from_golden(text: &str) -> Result<Stencil> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| fmt_err(1, "empty stencil file"))?;
        let mut radius = None;
        let mut alpha = None;
        let mut delta = None;
        let mut spacing = None;
        for tok in header.split_whitespace() {
            let (key, value) =
                tok.split_once('=').ok_or_else(|| fmt_err(1, format!("malformed header token {tok:?}")))?;
            match key {
                "r" => radius = Some(value.parse::<usize>().map_err(|e| fmt_err(1, format!("r: {e}")))?),
                "alpha" => alpha = Some(parse_real(1, key, value)?),
                "delta" => delta = Some(parse_real(1, key, value)?),
                "h" => spacing = Some(parse_real(1, key, value)?),
                _ => return Err(fmt_err(1, format!("unknown header key {key:?}"))),
            }
        }
        let missing = |k: &str| fmt_err(1, format!("header lacks {k}"));
        let radius = radius.ok_or_else(|| missing("r"))?;
        let kernel = KernelSpec::new(alpha.ok_or_else(|| missing("alpha"))?, delta.ok_or_else(|| missing("delta"))?)
            .map_err(|e| fmt_err(1, e.to_string()))?;
        let spacing = spacing.ok_or_else(|| missing("h"))?;
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(fmt_err(1, "h must be positive"));
        }
        if radius > 1 << 14 {
            return Err(fmt_err(1, format!("radius {radius} is implausibly large")));
        }
        let w = radius + 1;
        let mut coeffs = Vec::with_capacity(w * w);
        for (idx, line) in lines {
            let lineno = idx + 1;
            let before = coeffs.len();
            for tok in line.split_whitespace() {
                coeffs.push(parse_real(lineno, "coefficient", tok)?);
            }
            if coeffs.len() - before != w {
                return Err(fmt_err(lineno, format!("expected {w} coefficients, found {}", coeffs.len() - before)));
            }
            if coeffs.len() > w * w {
                return Err(fmt_err(lineno, format!("more than {w} coefficient rows")));
            }
        }
        if coeffs.len() != w * w {
            return Err(fmt_err(0, format!("expected {w} coefficient rows, found {}", coeffs.len() / w)));
        }
        let stencil = Stencil { radius, coeffs, kernel, spacing };
        stencil.check_invariants().map_err(|m| fmt_err(0, m))?;
        Ok(stencil)
    }

    fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.coeff(0, 0) != 0.0 {
            return Err("c_00 must be zero".into());
        }
        let w = self.radius + 1;
        for p in 0..w {
            for q in 0..w {
                let c = self.coeff(p, q);
                if !(c >= 0.0) {
                    return Err(format!("c_{p},{q} = {c} is negative or not a number"));
                }
                if c != self.coeff(q, p) {
                    return Err(format!("c_{p},{q} != c_{q},{p}"));
                }
            }
        }
        Ok(())
    }
}

fn fmt_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format { line, message: message.into() }
}

fn parse_real(line: usize, what: &str, s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|e| fmt_err(line, format!("{what}: {e}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(fmt_err(line, format!("{what} is not finite")))
    }
}

/// Builds the stencil for `kernel` on `grid`.
///
/// The radius is `r = floor(delta/h) + 1`, the smallest integer strictly
/// larger than `delta/h`. After assembly the discrete second-moment identity
/// is checked; a residual above `1e-9` is reported as a quadrature failure.
pub fn build_stencil(kernel: &KernelSpec, grid: &Grid, options: &StencilOptions) -> Result<Stencil> {
    let delta = kernel.delta();
    let half = 0.5 * grid.extent();
    if delta > half && !options.allow_wrap {
        return Err(Error::HorizonTooLarge { delta, half_extent: half });
    }
    if options.quadrature_order == 0 {
        return Err(invalid("quadrature order must be positive"));
    }
    let h = grid.spacing();
    let reach = delta / h;
    let radius = reach.floor() as usize + 1;
    let w = radius + 1;
    let rule = GaussRule::new(options.quadrature_order);
    let alpha = kernel.alpha();

    // Raw integrals of psi_pq rho^(2 - alpha) / (cos + sin) in mesh units.
    let mut raw = vec![0.0; w * w];
    for i in 0..radius {
        for j in 0..radius {
            if ((i * i + j * j) as f64) >= reach * reach {
                continue;
            }
            let cell = integrate_cell(i, j, reach, alpha, &rule);
            raw[i * w + j] += cell[0];
            raw[(i + 1) * w + j] += cell[1];
            raw[i * w + j + 1] += cell[2];
            raw[(i + 1) * w + j + 1] += cell[3];
        }
    }

    let scale = kernel.normalization() * h.powf(3.0 - alpha) / h;
    let mut coeffs = vec![0.0; w * w];
    for p in 0..w {
        for q in 0..w {
            if p == 0 && q == 0 {
                continue;
            }
            let sym = 0.5 * (raw[p * w + q] + raw[q * w + p]);
            let pq = (p + q) as f64 / (p * p + q * q) as f64;
            coeffs[p * w + q] = (pq * scale * sym).max(0.0);
        }
    }
    let stencil = Stencil { radius, coeffs, kernel: *kernel, spacing: h };
    let residual = (stencil.second_moment() - 1.0).abs();
    if !(residual <= MOMENT_TOLERANCE) {
        return Err(Error::Quadrature { estimate: residual, tolerance: MOMENT_TOLERANCE });
    }
    Ok(stencil)
}

/// Integrals over mesh cell `[i, i+1] x [j, j+1]` (mesh units) clipped to the
/// disc of radius `reach`, for the hat pieces of corners
/// `(i, j), (i+1, j), (i, j+1), (i+1, j+1)`.
fn integrate_cell(i: usize, j: usize, reach: f64, alpha: f64, rule: &GaussRule) -> [f64; 4] {
    let (fi, fj) = (i as f64, j as f64);
    let lo = fj.atan2(fi + 1.0);
    let hi = (fj + 1.0).atan2(fi);
    let mut cuts = vec![lo, hi, (fj + 1.0).atan2(fi + 1.0)];
    if i > 0 || j > 0 {
        cuts.push(fj.atan2(fi));
    }
    let r2 = reach * reach;
    for a in [fi, fi + 1.0] {
        if a < reach {
            let y = (r2 - a * a).sqrt();
            if y >= fj && y <= fj + 1.0 {
                cuts.push(y.atan2(a));
            }
        }
    }
    for b in [fj, fj + 1.0] {
        if b < reach {
            let x = (r2 - b * b).sqrt();
            if x >= fi && x <= fi + 1.0 {
                cuts.push(b.atan2(x));
            }
        }
    }
    cuts.retain(|t| *t >= lo && *t <= hi);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let origin = i == 0 && j == 0;
    let mut acc = [0.0; 4];
    for piece in cuts.windows(2) {
        let (t0, t1) = (piece[0], piece[1]);
        if t1 - t0 < 1e-15 {
            continue;
        }
        for (theta, wt) in rule.points(t0, t1) {
            let (s, c) = theta.sin_cos();
            let mut r_lo: f64 = 0.0;
            let mut r_hi = reach;
            if c > 0.0 {
                r_lo = r_lo.max(fi / c);
                r_hi = r_hi.min((fi + 1.0) / c);
            }
            if s > 0.0 {
                r_lo = r_lo.max(fj / s);
                r_hi = r_hi.min((fj + 1.0) / s);
            }
            if r_hi <= r_lo {
                continue;
            }
            let weight = wt / (c + s);
            // corner hat pieces as (a0 + a1 r)(b0 + b1 r)
            let xs = [(fi + 1.0, -c), (-fi, c)];
            let ys = [(fj + 1.0, -s), (-fj, s)];
            if origin {
                for (k, (xi, yi)) in [(0, 0), (1, 0), (0, 1), (1, 1)].into_iter().enumerate() {
                    if k == 0 {
                        continue; // psi_00 carries c_00 = 0
                    }
                    let (a0, a1) = xs[xi];
                    let (b0, b1) = ys[yi];
                    let poly = [a0 * b0, a0 * b1 + a1 * b0, a1 * b1];
                    let mut sum = 0.0;
                    for (m, coef) in poly.iter().enumerate() {
                        if *coef != 0.0 {
                            sum += coef * power_moment(r_lo, r_hi, 2.0 - alpha + m as f64);
                        }
                    }
                    acc[k] += weight * sum;
                }
            } else {
                for (rr, wr) in rule.points(r_lo, r_hi) {
                    let base = weight * wr * rr.powf(2.0 - alpha);
                    let x = rr * c;
                    let y = rr * s;
                    let wx0 = fi + 1.0 - x;
                    let wx1 = x - fi;
                    let wy0 = fj + 1.0 - y;
                    let wy1 = y - fj;
                    acc[0] += base * wx0 * wy0;
                    acc[1] += base * wx1 * wy0;
                    acc[2] += base * wx0 * wy1;
                    acc[3] += base * wx1 * wy1;
                }
            }
        }
    }
    acc
}

/// `int_a^b r^e dr` for `b > a >= 0`.
fn power_moment(a: f64, b: f64, e: f64) -> f64 {
    let k = e + 1.0;
    if k.abs() < 1e-14 {
        (b / a).ln()
    } else {
        (b.powf(k) - a.powf(k)) / k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    alpha: u64,
    delta: u64,
    spacing: u64,
    order: usize,
    wrap: bool,
}

/// Memoizes stencils by `(alpha, delta, h, quadrature order)`; building them
/// dominates setup cost when `delta/h` is large.
#[derive(Debug, Default)]
pub struct StencilCache {
    entries: Mutex<HashMap<CacheKey, Arc<Stencil>>>,
}

impl StencilCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(&self, kernel: &KernelSpec, grid: &Grid, options: &StencilOptions) -> Result<Arc<Stencil>> {
        let key = CacheKey {
            alpha: kernel.alpha().to_bits(),
            delta: kernel.delta().to_bits(),
            spacing: grid.spacing().to_bits(),
            order: options.quadrature_order,
            wrap: options.allow_wrap,
        };
        if let Some(s) = self.entries.lock().unwrap().get(&key) {
            return Ok(Arc::clone(s));
        }
        let built = Arc::new(build_stencil(kernel, grid, options)?);
        self.entries.lock().unwrap().insert(key, Arc::clone(&built));
        Ok(built)
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn build(alpha: f64, delta: f64, n: usize, extent: f64) -> Stencil {
        let grid = Grid::new(n, extent).unwrap();
        build_stencil(&KernelSpec::new(alpha, delta).unwrap(), &grid, &StencilOptions::default()).unwrap()
    }

    #[test]
    fn radius_rule() {
        // delta / h = 2 exactly: r = 3 and the outer ring vanishes
        let s = build(1.0, 0.2, 10, 1.0);
        assert_eq!(s.radius(), 3);
        for k in 0..=3 {
            assert_eq!(s.coeff(3, k), 0.0);
        }
        let s = build(1.0, 0.25, 10, 1.0);
        assert_eq!(s.radius(), 3);
    }

    #[test]
    fn basic_invariants() {
        for &alpha in &[0.0, 1.0, 1.5, 3.0, 3.9] {
            for &(delta, n) in &[(0.2, 64usize), (2.0, 16), (2.0, 64), (0.05, 128)] {
                let s = build(alpha, delta, n, 2.0 * PI);
                assert_eq!(s.coeff(0, 0), 0.0);
                let w = s.radius() + 1;
                for p in 0..w {
                    for q in 0..w {
                        assert!(s.coeff(p, q) >= 0.0);
                        assert_eq!(s.coeff(p, q), s.coeff(q, p));
                        let reach = delta / s.spacing();
                        if p >= 1 && q >= 1 {
                            let d = (((p - 1) * (p - 1) + (q - 1) * (q - 1)) as f64).sqrt();
                            if d >= reach {
                                assert_eq!(s.coeff(p, q), 0.0);
                            }
                        }
                    }
                }
                assert!(
                    (s.second_moment() - 1.0).abs() < 1e-10,
                    "alpha {alpha} delta {delta} n {n}: {}",
                    s.second_moment()
                );
            }
        }
    }

    #[test]
    fn horizon_check() {
        let grid = Grid::new(16, 2.0 * PI).unwrap();
        let k = KernelSpec::new(1.0, 3.2).unwrap();
        let err = build_stencil(&k, &grid, &StencilOptions::default()).unwrap_err();
        assert!(matches!(err, Error::HorizonTooLarge { .. }));
        assert!(err.to_string().contains("X/2"));
        let opts = StencilOptions { allow_wrap: true, ..Default::default() };
        let s = build_stencil(&k, &grid, &opts).unwrap();
        assert!(2 * s.radius() >= 16);
    }

    #[test]
    fn golden_round_trip() {
        let s = build(1.0, 0.2, 10, 1.0);
        let text = s.to_golden();
        assert!(text.starts_with("r=3 alpha=1.0 delta=0.2 h=0.1\n"));
        let back = Stencil::from_golden(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn golden_rejects_bad_input() {
        assert!(Stencil::from_golden("").is_err());
        assert!(Stencil::from_golden("r=1 alpha=1 delta=0.1 h=0.1\n0 1\n1\n").is_err());
        assert!(Stencil::from_golden("r=1 alpha=1 delta=0.1 h=0.1\n0 1\n2 0\n").is_err());
        assert!(Stencil::from_golden("r=1 alpha=1 delta=0.1 h=0.1\n1 1\n1 0\n").is_err());
        assert!(Stencil::from_golden("r=1 alpha=1 delta=0.1\n0 1\n1 0\n").is_err());
        assert!(Stencil::from_golden("r=1 alpha=1 delta=0.1 h=0.1 z=3\n0 1\n1 0\n").is_err());
        assert!(Stencil::from_golden("r=1 alpha=1 delta=0.1 h=0.1\n0 -1\n-1 0\n").is_err());
        assert!(Stencil::from_golden("r=1 alpha=1 delta=0.1 h=0.1\n0 1\n1 0\n").is_ok());
    }

    #[test]
    fn cache_reuses() {
        let cache = StencilCache::new();
        let grid = Grid::new(32, 2.0 * PI).unwrap();
        let k = KernelSpec::new(1.0, 1.0).unwrap();
        let a = cache.get_or_build(&k, &grid, &StencilOptions::default()).unwrap();
        let b = cache.get_or_build(&k, &grid, &StencilOptions::default()).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.len(), 1);
    }
}
