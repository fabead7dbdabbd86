use pencillab_core::compat::{check_almost_compatible, check_compatible, classify_curvature, SampleGrid, DEFAULT_LAMBDA_SAMPLES};
use pencillab_core::families::{harmonic_example, liouville_example, with_euclidean};

#[test]
fn checks_run_in_single_precision() {
    let grid = SampleGrid::<f32>::cube(2, -1.0, 1.0, 5).unwrap();
    assert!(classify_curvature(&harmonic_example(), &grid, 1e-4).unwrap().is_flat());
    let c = classify_curvature(&liouville_example(1.0).unwrap(), &grid, 1e-4).unwrap();
    assert!((c.constant_k().unwrap() - 1.0).abs() < 1e-4);
    let pair = with_euclidean(harmonic_example()).unwrap();
    assert!(check_almost_compatible(&pair, &grid, 1e-4).unwrap().holds());
    assert!(check_compatible(&pair, &grid, &DEFAULT_LAMBDA_SAMPLES, 1e-4).unwrap().fails());
}
