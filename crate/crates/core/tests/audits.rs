use barrier_bound::barriers::{invert_barrier, modica_barrier, solve_flat_barrier};
use barrier_bound::geometry::ModelManifold;
use barrier_bound::pde::{solve_symmetric, BoundaryCondition, Grid, ScalarField};
use barrier_bound::profiles::{coefficients_from_profile, Potential, VariationalProfile};
use barrier_bound::verify::{
    dirichlet_boundary_audit, gradient_audit, modica_audit, two_point_audit, Sampling, Verdict,
};
use barrier_bound::Error;

fn kink(points: usize) -> ScalarField {
    let model = ModelManifold::Interval { a: -10.0, b: 10.0 };
    let grid = Grid::interval(-10.0, 10.0, points).unwrap();
    let r = std::f64::consts::SQRT_2;
    let xs = grid.axis(0);
    let values = xs.iter().map(|x| (x / r).tanh()).collect();
    let grads = xs
        .iter()
        .map(|x| (1.0 - (x / r).tanh().powi(2)) / r)
        .collect();
    ScalarField::analytic(model, grid, values, grads, 0.0, 1e-12).unwrap()
}

fn ac_profile(range: (f64, f64)) -> VariationalProfile {
    VariationalProfile::linear(Potential::allen_cahn(1.0), range).unwrap()
}

#[test]
fn kink_attains_the_modica_bound() {
    let f = kink(513);
    let r = modica_audit(&f, &ac_profile(f.range())).unwrap();
    assert!(r.max_defect.abs() <= 1e-9, "{:e}", r.max_defect);
    assert!(r.sharp);
}

#[test]
fn larger_level_can_only_lower_the_two_point_maximum() {
    let f = kink(257);
    let prof = ac_profile(f.range());
    let cu = prof.c_sup().value;
    let model = f.model.clone();
    let z = |off: f64| {
        let inv = invert_barrier(&modica_barrier(&prof, cu + off, 0.0).unwrap());
        two_point_audit(&f, &inv, &model, &Sampling::default())
            .unwrap()
            .max_defect
    };
    let (steep, flat) = (z(1e-1), z(1e-2));
    assert!(
        steep <= flat,
        "c_u + 0.1 gives {steep:e}, c_u + 0.01 gives {flat:e}"
    );
    assert!(flat <= 0.0);
}

#[test]
fn kink_gradient_stays_below_the_barrier_slope() {
    let f = kink(257);
    let prof = ac_profile(f.range());
    let curve = modica_barrier(&prof, prof.c_sup().value + 1e-3, 0.0).unwrap();
    let r = gradient_audit(&f, &curve, &invert_barrier(&curve)).unwrap();
    assert!(r.max_defect < 0.0);
    assert_eq!(r.verdict, Verdict::Pass);
}

#[test]
fn barrier_shorter_than_the_field_range_is_a_domain_error() {
    let f = kink(129);
    let prof = ac_profile((-0.5, 0.5));
    let inv = invert_barrier(&modica_barrier(&prof, prof.c_sup().value + 0.01, 0.0).unwrap());
    let err = two_point_audit(&f, &inv, &f.model, &Sampling::default()).unwrap_err();
    assert!(matches!(err, Error::Domain(_)), "{err}");
}

#[test]
fn torsion_field_against_its_flat_barrier() {
    let model = ModelManifold::RadialBall { n: 3, radius: 1.0 };
    let prof = VariationalProfile::linear(Potential::linear(6.0), (0.0, 1.0)).unwrap();
    let coeffs = coefficients_from_profile(&prof);
    let field = solve_symmetric(
        &model,
        &coeffs,
        BoundaryCondition::Dirichlet {
            left: None,
            right: 0.0,
        },
    )
    .unwrap();
    let gap = field
        .grid
        .axis(0)
        .iter()
        .zip(&field.values)
        .map(|(r, u)| (1.0 - r * r - u).abs())
        .fold(0.0, f64::max);
    assert!(gap <= 1e-8, "{gap:e}");
    let curve = solve_flat_barrier(&coeffs, 0.0, 0.5, field.range(), 0.0).unwrap();
    let inv = invert_barrier(&curve);
    let r = dirichlet_boundary_audit(&field, &inv, &model).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{:e}", r.max_defect);
    let radial = two_point_audit(&field, &inv, &model, &Sampling::default()).unwrap();
    assert!(
        radial.max_defect <= radial.tolerance,
        "{:e}",
        radial.max_defect
    );
}

#[test]
fn audits_are_deterministic() {
    let f = kink(257);
    let prof = ac_profile(f.range());
    let inv = invert_barrier(&modica_barrier(&prof, prof.c_sup().value + 1e-3, 0.0).unwrap());
    let a = two_point_audit(&f, &inv, &f.model, &Sampling::default()).unwrap();
    let b = two_point_audit(&f, &inv, &f.model, &Sampling::default()).unwrap();
    assert_eq!(a, b);
}
