use barrier_bound::barriers::{invert_barrier, modica_barrier};
use barrier_bound::geometry::{distance, dual_norm, MinkowskiNorm, ModelManifold, TorusNorm};
use barrier_bound::profiles::{Flux, Potential, VariationalProfile};
use proptest::prelude::*;

fn torus(norm: TorusNorm) -> ModelManifold {
    ModelManifold::FlatTorus {
        periods: vec![3.0, 5.0],
        norm,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn k_inverse_undoes_k_for_p_laplace(p in 1.2f64..6.0, log_s in -6.0f64..3.0) {
        let prof = VariationalProfile::p_laplace(p, Potential::constant(0.0), (0.0, 1.0)).unwrap();
        let s = 10f64.powf(log_s);
        let back = prof.invert_k(prof.eval_k(s).unwrap()).unwrap();
        prop_assert!((back - s).abs() <= 1e-10 * s.max(1.0), "s = {s}, back = {back}");
    }

    #[test]
    fn k_inverse_undoes_k_for_polynomial_flux(a2 in 0.0f64..0.5, log_s in -4.0f64..2.0) {
        let flux = Flux::Polynomial(vec![0.0, 1.0, a2]);
        let prof = VariationalProfile::new(flux, Potential::constant(0.0), (0.0, 1.0)).unwrap();
        let s = 10f64.powf(log_s);
        let back = prof.invert_k_numeric(prof.eval_k(s).unwrap()).unwrap();
        prop_assert!((back - s).abs() <= 1e-10 * s.max(1.0), "s = {s}, back = {back}");
    }

    #[test]
    fn euclidean_torus_distance_is_symmetric(
        x in (0.0f64..3.0, 0.0f64..5.0),
        y in (0.0f64..3.0, 0.0f64..5.0),
    ) {
        let m = torus(TorusNorm::Euclidean);
        let (p, q) = ([x.0, x.1], [y.0, y.1]);
        let dxy = distance(&m, &p, &q).unwrap();
        let dyx = distance(&m, &q, &p).unwrap();
        prop_assert!((dxy - dyx).abs() <= 1e-14);
        prop_assert!(dxy <= 0.5 * (3f64.powi(2) + 5f64.powi(2)).sqrt() + 1e-12);
    }

    #[test]
    fn minkowski_torus_distance_satisfies_the_chain_inequality(
        x in (0.0f64..3.0, 0.0f64..5.0),
        y in (0.0f64..3.0, 0.0f64..5.0),
        z in (0.0f64..3.0, 0.0f64..5.0),
    ) {
        let m = torus(TorusNorm::Minkowski(MinkowskiNorm::lp(4.0).unwrap()));
        let (a, b, c) = ([x.0, x.1], [y.0, y.1], [z.0, z.1]);
        let ac = distance(&m, &a, &c).unwrap();
        let ab = distance(&m, &a, &b).unwrap();
        let bc = distance(&m, &b, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-9);
    }

    #[test]
    fn numeric_dual_matches_holder(p in 1.3f64..8.0, v in (-5.0f64..5.0, -5.0f64..5.0), t in 0.1f64..10.0) {
        let h = MinkowskiNorm::lp(p).unwrap();
        let q = p / (p - 1.0);
        let holder = (v.0.abs().powf(q) + v.1.abs().powf(q)).powf(1.0 / q);
        let numeric = dual_norm(&h, &[v.0, v.1]).unwrap();
        prop_assert!((numeric - holder).abs() <= 1e-8 * holder.max(1.0));
        let scaled = dual_norm(&h, &[t * v.0, t * v.1]).unwrap();
        prop_assert!((scaled - t * numeric).abs() <= 1e-8 * (t * numeric).max(1.0));
    }

    #[test]
    fn modica_barriers_are_monotone_and_invertible(
        p in prop::sample::select(vec![2.0f64, 2.5, 3.0, 4.0]),
        log_offset in -3.0f64..0.0,
        half in 0.2f64..0.95,
    ) {
        let prof = VariationalProfile::p_laplace(p, Potential::allen_cahn(1.0), (-half, half)).unwrap();
        let c = prof.c_sup().value + 10f64.powf(log_offset);
        let curve = modica_barrier(&prof, c, 0.0).unwrap();
        prop_assert!(curve.min_slope() > 0.0);
        prop_assert!(curve.phi.windows(2).all(|w| w[1] > w[0]));
        let inv = invert_barrier(&curve);
        let scale = curve.length().max(1.0);
        for (z, v) in curve.grid.iter().zip(&curve.phi) {
            prop_assert!((inv.psi(*v).unwrap() - z).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn two_point_function_is_antisymmetric_up_to_distance(
        x in (0.0f64..3.0, 0.0f64..5.0),
        y in (0.0f64..3.0, 0.0f64..5.0),
        u in (-0.9f64..0.9, -0.9f64..0.9),
    ) {
        let prof = VariationalProfile::linear(Potential::allen_cahn(1.0), (-0.9, 0.9)).unwrap();
        let curve = modica_barrier(&prof, prof.c_sup().value + 0.01, 0.0).unwrap();
        let inv = invert_barrier(&curve);
        let m = torus(TorusNorm::Euclidean);
        let (p, q) = ([x.0, x.1], [y.0, y.1]);
        let d = distance(&m, &p, &q).unwrap();
        let zxy = inv.psi(u.1).unwrap() - inv.psi(u.0).unwrap() - d;
        let zyx = inv.psi(u.0).unwrap() - inv.psi(u.1).unwrap() - distance(&m, &q, &p).unwrap();
        prop_assert!((zxy + zyx + 2.0 * d).abs() <= 1e-12 * (1.0 + d + curve.length()));
    }
}
