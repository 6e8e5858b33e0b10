use std::f64::consts::PI;

use nlac_core::{apply_direct, build_stencil, build_symbol, Field, Grid, KernelSpec, ModelParams, StencilOptions};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stencil_invariants(alpha in 0.0f64..3.95, ratio in 0.3f64..10.0, n in 24usize..64) {
        let grid = Grid::new(n, 2.0 * PI).unwrap();
        let delta = ratio * grid.spacing();
        let s = build_stencil(&KernelSpec::new(alpha, delta).unwrap(), &grid, &StencilOptions::default()).unwrap();
        let r = s.radius();
        prop_assert_eq!(r, (delta / grid.spacing()).floor() as usize + 1);
        prop_assert_eq!(s.coeff(0, 0), 0.0);
        for p in 0..=r {
            for q in 0..=r {
                prop_assert!(s.coeff(p, q) >= 0.0);
                prop_assert_eq!(s.coeff(p, q), s.coeff(q, p));
            }
        }
        prop_assert!((s.second_moment() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constants_are_annihilated(alpha in 0.0f64..3.95, ratio in 0.3f64..6.0, c in -1.0f64..1.0) {
        let grid = Grid::new(16, 2.0 * PI).unwrap();
        let delta = ratio * grid.spacing();
        let s = build_stencil(&KernelSpec::new(alpha, delta).unwrap(), &grid, &StencilOptions::default()).unwrap();
        let v = apply_direct(&s, &Field::constant(grid, c)).unwrap();
        let total: f64 = s.nonzero().map(|(_, _, w)| w).sum();
        prop_assert!(v.values().iter().all(|x| x.abs() <= 1e-13 * total));
    }

    #[test]
    fn symbol_bounded_below_by_kappa(alpha in 0.0f64..3.95, ratio in 0.3f64..8.0, kappa in 2.0f64..10.0) {
        let grid = Grid::new(32, 2.0 * PI).unwrap();
        let delta = ratio * grid.spacing();
        let s = build_stencil(&KernelSpec::new(alpha, delta).unwrap(), &grid, &StencilOptions::default()).unwrap();
        let params = ModelParams::new(0.1, kappa).unwrap();
        let symbol = build_symbol(&s, &grid, &params).unwrap();
        prop_assert_eq!(symbol.get(0, 0), kappa);
        prop_assert_eq!(symbol.min(), kappa);
        for k in 0..32 {
            for l in 0..32 {
                prop_assert!((symbol.get(k, l) - symbol.get(l, k)).abs() <= 1e-14 * symbol.get(k, l));
            }
        }
    }
}
