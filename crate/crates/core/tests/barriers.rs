use barrier_bound::barriers::{
    invert_barrier, modica_barrier, modica_ode_curve, solve_flat_barrier, solve_sphere_family,
    solve_warped_barrier,
};
use barrier_bound::geometry::warp_factor;
use barrier_bound::numeric::ode::Dopri5;
use barrier_bound::profiles::{
    coefficients_from_profile, IsotropicCoefficients, Potential, VariationalProfile,
};
use barrier_bound::Error;

#[test]
fn flat_barrier_keeps_its_first_integral() {
    let prof = VariationalProfile::linear(Potential::allen_cahn(1.0), (-0.5, 0.5)).unwrap();
    let coeffs = coefficients_from_profile(&prof);
    let curve = solve_flat_barrier(&coeffs, 0.0, 2.0, (-0.5, 0.5), 0.0).unwrap();
    assert!((curve.phi[0] + 0.5).abs() < 1e-10);
    assert!((curve.phi[curve.phi.len() - 1] - 0.5).abs() < 1e-10);
    let spread = curve.first_integral_spread(&prof);
    assert!(spread <= 1e-8, "spread {spread:e}");
}

#[test]
fn p_laplace_flat_barrier_keeps_its_first_integral() {
    let prof = VariationalProfile::p_laplace(3.0, Potential::allen_cahn(1.0), (-0.5, 0.5)).unwrap();
    let coeffs = coefficients_from_profile(&prof);
    let curve = solve_flat_barrier(&coeffs, 0.0, 2.0, (-0.5, 0.5), 0.0).unwrap();
    let spread = curve.first_integral_spread(&prof);
    assert!(spread <= 1e-8, "spread {spread:e}");
}

#[test]
fn manufactured_warped_barrier_is_the_identity() {
    // q = -(n - 1) (rho'/rho) makes phi(z) = z a solution with alpha = beta = 1
    let warp = warp_factor(-1.0, 0.3).unwrap();
    let n = 3;
    let w = warp;
    let coeffs = IsotropicCoefficients::new(
        "identity",
        |_, _| 1.0,
        |_, _| 1.0,
        move |u, _| -((n - 1) as f64) * w.log_derivative(u),
    );
    let curve = solve_warped_barrier(&coeffs, &warp, n, 0.0, 1.0, (0.0, 1.0)).unwrap();
    let err = curve
        .grid
        .iter()
        .zip(&curve.phi)
        .map(|(z, p)| (z - p).abs())
        .fold(0.0, f64::max);
    assert!(err <= 1e-8, "{err:e}");
    assert!(curve.residuals.ode <= 1e-8, "{:e}", curve.residuals.ode);
}

#[test]
fn modica_quadrature_matches_the_ode() {
    for p in [2.0, 3.0] {
        let prof =
            VariationalProfile::p_laplace(p, Potential::allen_cahn(1.0), (-0.8, 0.8)).unwrap();
        let c = prof.c_sup().value + 0.05;
        let curve = modica_barrier(&prof, c, 0.0).unwrap();
        let ode = Dopri5::with_tolerances(1e-12, 1e-12);
        let direct = modica_ode_curve(&prof, c, &curve.grid, &ode).unwrap();
        let gap = curve
            .phi
            .iter()
            .zip(&direct)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap <= 1e-6, "p = {p}: {gap:e}");
    }
}

#[test]
fn sphere_family_slope_never_drops_below_the_level_bound() {
    let prof = VariationalProfile::linear(Potential::allen_cahn_well(25.0), (-0.9, 0.9)).unwrap();
    let cu = prof.c_sup().value;
    let mut lengths = Vec::new();
    for off in [1e-1, 1e-2, 1e-3] {
        let curve = solve_sphere_family(&prof, cu + off, 0.0, 2).unwrap();
        // K(s) = s/2 for the linear flux
        let bound = (2.0 * off).sqrt();
        let margin = curve.min_slope() - bound;
        assert!(margin >= -1e-10, "offset {off}: margin {margin:e}");
        lengths.push(curve.length());
    }
    assert!(
        lengths[0] < lengths[1] && lengths[1] < lengths[2],
        "{lengths:?}"
    );
}

#[test]
fn levels_at_or_below_cu_are_rejected() {
    let prof = VariationalProfile::linear(Potential::allen_cahn(1.0), (-0.5, 0.5)).unwrap();
    let cu = prof.c_sup().value;
    for c in [cu, cu - 0.1] {
        assert!(matches!(
            modica_barrier(&prof, c, 0.0),
            Err(Error::Parameter(_))
        ));
    }
}

#[test]
fn inverse_slope_is_reciprocal_of_barrier_slope() {
    let prof = VariationalProfile::linear(Potential::allen_cahn(1.0), (-0.7, 0.7)).unwrap();
    let curve = modica_barrier(&prof, prof.c_sup().value + 0.02, 0.0).unwrap();
    let inv = invert_barrier(&curve);
    for i in (0..curve.grid.len()).step_by(64) {
        let s = inv.slope_at(curve.phi[i]).unwrap();
        assert!((s - curve.dphi[i]).abs() <= 1e-9 * curve.dphi[i].max(1.0));
    }
}
