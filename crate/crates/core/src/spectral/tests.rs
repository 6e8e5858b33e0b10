use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::kernels::KernelSpec;
use crate::operator::{apply_direct, build_stencil, sample_function, StencilOptions};

fn setup(n: usize, alpha: f64, delta: f64, eps: f64, kappa: f64, tau: f64) -> (Stencil, SpectralOperator) {
    let grid = Grid::new(n, 2.0 * PI).unwrap();
    let stencil = build_stencil(&KernelSpec::new(alpha, delta).unwrap(), &grid, &StencilOptions::default()).unwrap();
    let params = ModelParams::new(eps, kappa).unwrap();
    let symbol = build_symbol(&stencil, &grid, &params).unwrap();
    (stencil, SpectralOperator::new(grid, params, symbol, tau).unwrap())
}

fn random_field(grid: Grid, rng: &mut ChaCha8Rng) -> Field {
    Field::new(grid, (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn rel_max_diff(a: &Field, b: &Field) -> f64 {
    let scale = b.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.values().iter().zip(b.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

#[test]
fn params_validation() {
    assert!(ModelParams::new(0.1, 1.9).is_err());
    assert!(ModelParams::new(0.0, 2.0).is_err());
    let p = ModelParams::new(0.1, 2.0).unwrap();
    assert!(p.guarantees());
    let q = ModelParams::experimental(0.1, 0.5).unwrap();
    assert!(!q.guarantees());
    assert!(ModelParams::experimental(0.1, -1.0).is_err());
}

#[test]
fn zero_mode_and_symmetry() {
    let (_, op) = setup(32, 1.0, 2.0, 0.1, 2.0, 0.1);
    let sym = op.symbol();
    assert_eq!(sym.get(0, 0), 2.0);
    assert_eq!(sym.min(), 2.0);
    for k in 0..32 {
        for l in 0..32 {
            let (a, b) = (sym.get(k, l), sym.get(l, k));
            assert!((a - b).abs() <= 1e-13 * a, "({k},{l})");
            if (k, l) != (0, 0) {
                assert!(a > 2.0, "min attained away from the zero mode at ({k},{l})");
            }
            // even in each index
            assert!((a - sym.get((32 - k) % 32, l)).abs() <= 1e-13 * a);
        }
    }
}

#[test]
fn low_mode_matches_rayleigh_quotient() {
    let (stencil, op) = setup(16, 1.0, 2.0, 0.1, 2.0, 0.1);
    let grid = *op.grid();
    let x = grid.extent();
    let u = sample_function(grid, |a, b| (2.0 * PI * (a + b) / x).cos());
    let du = apply_direct(&stencil, &u).unwrap();
    let num: f64 = u.values().iter().zip(du.values()).map(|(a, b)| a * (2.0 * a - 0.01 * b)).sum();
    let den: f64 = u.values().iter().map(|a| a * a).sum();
    let lam = op.symbol().get(1, 1);
    assert!((num / den - lam).abs() <= 1e-12 * lam, "{} vs {lam}", num / den);
}

#[test]
fn local_symbol_examples() {
    let grid = Grid::new(16, 2.0 * PI).unwrap();
    let params = ModelParams::new(0.1, 2.0).unwrap();
    let s = local_symbol(&grid, &params);
    assert_eq!(s.get(0, 0), 2.0);
    let h = grid.spacing();
    assert!((s.get(8, 0) - (2.0 + 4.0 * 0.01 / (h * h))).abs() < 1e-12);
    for k in 0..16 {
        for l in 0..16 {
            assert_eq!(s.get(k, l), s.get(l, k));
        }
    }
}

const PHI_REFERENCE: &[(f64, f64, f64, f64)] = &[
    (0.0, 1.0, 1.0, 0.5),
    (1e-12, 0.999999999999, 0.9999999999995, 0.49999999999983333333),
    (1e-8, 0.99999999000000005, 0.99999999500000001667, 0.4999999983333333375),
    (1e-5, 0.99999000004999983333, 0.999995000016666625, 0.49999833333749999167),
    (3e-4, 0.99970004499550033748, 0.9998500149988750675, 0.49995000374977501125),
    (9.99e-4, 0.99900149883437432546, 0.99950066629196650704, 0.49983354157506802482),
    (1e-3, 0.99900049983337499167, 0.99950016662500833194, 0.49983337499166805536),
    (0.0123, 0.98777533580685305047, 0.99387513765422353884, 0.49795628827450903778),
    (0.5, 0.6065306597126334236, 0.78693868057473315279, 0.42612263885053369442),
    (0.999, 0.36824750461366292121, 0.63238488026660368247, 0.36798310283623255008),
    (1.0, 0.3678794411714423216, 0.6321205588285576784, 0.3678794411714423216),
    (1.7, 0.18268352405273465022, 0.48077439761603844104, 0.3054268249317420935),
    (10.0, 0.000045399929762484851536, 0.099995460007023751515, 0.090000453999297624849),
    (123.4, 2.5589448912509853844e-54, 0.0081037277147487844408, 0.0080380573118739968846),
    (1000.0, 0.0, 0.001, 0.000999),
];

#[test]
fn phi_against_high_precision_reference() {
    for &(a, p0, p1, p2) in PHI_REFERENCE {
        for (gamma, want) in [(0u8, p0), (1, p1), (2, p2)] {
            let got = phi(gamma, a).unwrap();
            let err = if want == 0.0 { got.abs() } else { ((got - want) / want).abs() };
            assert!(err <= 1e-14, "phi_{gamma}({a}) = {got:e}, want {want:e}, rel err {err:e}");
        }
    }
}

#[test]
fn phi_limits_and_errors() {
    assert_eq!(phi(1, 0.0).unwrap(), 1.0);
    assert_eq!(phi(2, 0.0).unwrap(), 0.5);
    assert!((phi(1, 1.0).unwrap() - 0.6321206).abs() < 1e-7);
    assert!(phi(0, -1e-3).is_err());
    assert!(phi(3, 1.0).is_err());
    assert!(phi(1, f64::NAN).is_err());
}

#[test]
fn phi_positive_and_decreasing() {
    let mut prev = [f64::INFINITY; 3];
    for i in 0..=300 {
        let a = 10f64.powf(-12.0 + 15.0 * i as f64 / 300.0);
        for g in 0..3u8 {
            let v = phi(g, a).unwrap();
            // e^-a underflows to zero past a ~ 745
            let underflow = g == 0 && a > 700.0;
            assert!(v > 0.0 || underflow);
            assert!(v < prev[g as usize] || (underflow && v == 0.0), "phi_{g} not decreasing at {a}");
            prev[g as usize] = v;
        }
    }
}

#[test]
fn phi_series_accuracy() {
    // Series branch against the quotient evaluated at extended argument
    // spacing: compare with the integral form int_0^1 (1-s)^(g-1) e^{-a s} ds / (g-1)!
    // via a 40-point Gauss rule, which is exact to rounding for a <= 1e-3.
    let rule = crate::quadrature::GaussRule::new(40);
    for i in 0..=90 {
        let a = 10f64.powf(-12.0 + 9.0 * i as f64 / 90.0);
        let r1 = rule.integrate(0.0, 1.0, |s| (-a * s).exp());
        let r2 = rule.integrate(0.0, 1.0, |s| (1.0 - s) * (-a * s).exp());
        assert!((phi1(a) / r1 - 1.0).abs() <= 1e-14, "phi1({a})");
        assert!((phi2(a) / r2 - 1.0).abs() <= 1e-14, "phi2({a})");
    }
}

#[test]
fn constant_fields() {
    let (_, op) = setup(16, 1.0, 2.0, 0.1, 2.0, 0.3);
    let ones = Field::constant(*op.grid(), 1.0);
    let p0 = op.apply(Multiplier::Phi0, &ones).unwrap();
    let want = (-2.0f64 * 0.3).exp();
    assert!(p0.values().iter().all(|v| (v - want).abs() < 1e-14));
    let d = op.apply(Multiplier::Diffusion, &ones).unwrap();
    assert!(d.values().iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn fft_matches_direct_stencil() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for &n in &[8usize, 16, 32] {
        let (stencil, op) = setup(n, 1.0, 2.0, 0.1, 2.0, 0.1);
        for _ in 0..50 {
            let u = random_field(*op.grid(), &mut rng);
            let fast = op.apply(Multiplier::Stabilized, &u).unwrap();
            let du = apply_direct(&stencil, &u).unwrap();
            let slow =
                Field::new(*op.grid(), u.values().iter().zip(du.values()).map(|(a, b)| 2.0 * a - 0.01 * b).collect())
                    .unwrap();
            assert!(rel_max_diff(&fast, &slow) <= 1e-11);
            let d = op.apply(Multiplier::Diffusion, &u).unwrap();
            assert!(rel_max_diff(&d, &du) <= 1e-11);
        }
    }
}

#[test]
fn round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &n in &[8usize, 30, 64] {
        let grid = Grid::new(n, 1.0).unwrap();
        let fft = Fft2::new(n);
        let u = random_field(grid, &mut rng);
        let (back, residue) = fft.inverse(fft.forward(u.values()));
        assert!(residue <= 1e-13);
        let diff = back.iter().zip(u.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff <= 1e-13, "n = {n}: {diff:e}");
    }
}

#[test]
fn tau_change_reuses_symbol() {
    let (_, op) = setup(16, 1.0, 2.0, 0.1, 2.0, 0.1);
    let op2 = op.with_tau(0.2).unwrap();
    assert!(std::ptr::eq(op.symbol(), op2.symbol()));
    assert!((op2.phi_value(1, 3, 4).unwrap() - phi1(op.symbol().get(3, 4) * 0.2)).abs() == 0.0);
    assert!(op.with_tau(0.0).is_err());
}
