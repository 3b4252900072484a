use barrier_bound::barriers::solve_warped_barrier;
use barrier_bound::geometry::{warp_factor, ModelManifold, TorusNorm};
use barrier_bound::pde::{relax_to_steady, seed_field, solve_symmetric, BoundaryCondition, Seed};
use barrier_bound::profiles::{coefficients_from_profile, Potential, VariationalProfile};

#[test]
fn warped_field_is_its_own_barrier() {
    for n in [2, 3] {
        let warp = warp_factor(-1.0, 0.3).unwrap();
        let model = ModelManifold::WarpedProduct {
            n,
            interval: (0.0, 1.0),
            warp: warp,
        };
        let prof = VariationalProfile::linear(Potential::allen_cahn(1.0), (-0.5, 0.5)).unwrap();
        let coeffs = coefficients_from_profile(&prof);
        let field = solve_symmetric(
            &model,
            &coeffs,
            BoundaryCondition::Dirichlet {
                left: Some(-0.5),
                right: 0.5,
            },
        )
        .unwrap();
        assert!(field.residual_norm <= 1e-8, "{:e}", field.residual_norm);
        let curve = solve_warped_barrier(&coeffs, &warp, n, 0.0, 1.0, (-0.5, 0.5)).unwrap();
        assert_eq!(curve.grid.len(), field.len());
        let gap = curve
            .phi
            .iter()
            .zip(&field.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap <= 1e-8, "n = {n}: {gap:e}");
    }
}

#[test]
fn relaxation_is_independent_of_the_worker_count() {
    let model = ModelManifold::FlatTorus {
        periods: vec![7.0, 7.0],
        norm: TorusNorm::Euclidean,
    };
    let prof = VariationalProfile::linear(Potential::allen_cahn(1.0), (-1.0, 1.0)).unwrap();
    let seed = seed_field(
        &model,
        &[32, 32],
        &Seed::Stripe {
            amplitude: 0.5,
            wavenumber: 1,
            axis: 0,
        },
    )
    .unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| relax_to_steady(&model, &prof, &seed, 1e-10).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert!(one.is_certified());
    assert_eq!(one.values, four.values);
    assert_eq!(one.gradient_norm, four.gradient_norm);
}
