use nlac_core::{build_stencil, Grid, KernelSpec, Stencil, StencilOptions};

fn check(file: &str, alpha: f64, delta: f64) {
    let path = format!("{}/tests/data/{file}", env!("CARGO_MANIFEST_DIR"));
    let golden = Stencil::from_golden(&std::fs::read_to_string(path).unwrap()).unwrap();
    let grid = Grid::new(10, 1.0).unwrap();
    let built = build_stencil(&KernelSpec::new(alpha, delta).unwrap(), &grid, &StencilOptions::default()).unwrap();
    assert_eq!(built.radius(), golden.radius());
    assert_eq!(built.spacing(), golden.spacing());
    let scale = golden.coeffs().iter().cloned().fold(0.0, f64::max);
    for (a, b) in built.coeffs().iter().zip(golden.coeffs()) {
        assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
    }
}

#[test]
fn integrable_kernel_matches_reference() {
    check("stencil_alpha1_delta0.2_h0.1.txt", 1.0, 0.2);
}

#[test]
fn singular_kernel_matches_reference() {
    check("stencil_alpha3_delta0.3_h0.1.txt", 3.0, 0.3);
}
