use numrange::corners::{cone_margin, cone_test, default_epsilon, probe_derivatives};
use numrange::frames::{haar_frame, Frame};
use numrange::numerics::{gram_schmidt, hermitian_eigensystem, hermitian_part, inner, norm, ComplexMatrix};
use numrange::range::{
    compress, permute_point, sample_cloud, support_exact_1d, support_stiefel, tau, RangePoint,
};
use numrange::Complex64;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn matrix(max_d: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_d).prop_flat_map(|d| {
        prop::collection::vec(complex(), d * d).prop_map(move |e| ComplexMatrix::new(d, e).unwrap())
    })
}

fn unit_phase() -> impl Strategy<Value = Complex64> {
    (0.0..std::f64::consts::TAU).prop_map(|t| Complex64::from_polar(1.0, t))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn hermitian_part_quadratic_form(t in matrix(6), w in unit_phase(), seed in any::<u64>()) {
        let h = hermitian_part(&t, w).unwrap();
        prop_assert!(h.is_hermitian(1e-12));
        let x = haar_frame(t.dim(), 1, seed).unwrap().column(0).to_vec();
        let lhs = inner(&h.matvec(&x), &x);
        let rhs = (w.conj() * inner(&t.matvec(&x), &x)).re;
        prop_assert!((lhs.re - rhs).abs() <= 1e-12 * (1.0 + t.frobenius_norm()));
        prop_assert!(lhs.im.abs() <= 1e-12 * (1.0 + t.frobenius_norm()));
    }

    #[test]
    fn eigensystem_reconstructs(t in matrix(7), w in unit_phase()) {
        let h = hermitian_part(&t, w).unwrap();
        let eig = hermitian_eigensystem(&h).unwrap();
        let err = eig.reconstruct().sub(&h).frobenius_norm();
        prop_assert!(err <= 1e-10 * (1.0 + h.frobenius_norm()));
        prop_assert!(eig.values.windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn gram_schmidt_is_orthonormal(t in matrix(6)) {
        let cols: Vec<Vec<Complex64>> = (0..t.dim()).map(|j| t.column(j)).collect();
        if let Ok(q) = gram_schmidt(&cols) {
            let f = Frame::new(q).unwrap();
            prop_assert!(f.gram_residual() <= 1e-10);
        }
    }

    #[test]
    fn sampled_points_carry_valid_witnesses(t in matrix(5), seed in any::<u64>(), n_raw in 1usize..5) {
        let n = 1 + (n_raw - 1) % t.dim();
        let cloud = sample_cloud(&t, n, 20, seed).unwrap();
        let scale = t.spectral_norm().max(1e-300);
        for p in &cloud.points {
            prop_assert!(p.witness_error(&t).unwrap() <= 1e-10 * scale);
            prop_assert!(p.witness.gram_residual() <= 1e-10);
        }
    }

    #[test]
    fn permuted_points_stay_in_the_range(t in matrix(5), seed in any::<u64>(), rot in 0usize..5) {
        let n = t.dim();
        let p = RangePoint::from_frame(&t, haar_frame(n, n, seed).unwrap()).unwrap();
        let pi: Vec<usize> = (0..n).map(|k| (k + rot) % n).collect();
        let q = permute_point(&p, &pi).unwrap();
        prop_assert!(q.witness_error(&t).unwrap() <= 1e-10 * t.spectral_norm().max(1e-300));
    }

    #[test]
    fn compression_values_lift(t in matrix(6), s1 in any::<u64>(), s2 in any::<u64>()) {
        let d = t.dim();
        let m = 1 + (s1 as usize) % d;
        let f = haar_frame(d, m, s1).unwrap();
        let g = haar_frame(m, 1, s2).unwrap();
        let lifted = Frame::new(vec![f.combine(g.column(0))]).unwrap();
        let a = tau(&t, &lifted).unwrap()[0];
        let b = tau(&compress(&t, &f).unwrap(), &g).unwrap()[0];
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + t.spectral_norm()));
    }

    #[test]
    fn scalar_support_matches_closed_form(t in matrix(6), theta in 0.0..std::f64::consts::TAU, seed in any::<u64>()) {
        let exact = support_exact_1d(&t, theta).unwrap().value;
        let w = [Complex64::from_polar(1.0, theta)];
        let got = support_stiefel(&t, 1, &w, 2, seed).unwrap();
        prop_assert!((got.value - exact).abs() <= 1e-8 * t.spectral_norm().max(1e-300));
    }

    #[test]
    fn cone_claims_hold_for_every_neighbour(t in matrix(4), seed in any::<u64>(), pick in 0usize..300) {
        let cloud = sample_cloud(&t, 1, 300, seed).unwrap();
        let u = &cloud.points[pick];
        let eps = default_epsilon(&cloud);
        if let Ok(res) = cone_test(&cloud, u, eps) {
            prop_assert!((norm(&res.direction) - 1.0).abs() <= 1e-12);
            if let Some(margin) = cone_margin(&cloud, &u.value, &res.direction, eps) {
                prop_assert!(margin >= res.delta - 1e-12);
            }
        }
    }

    #[test]
    fn probe_report_max_is_consistent(t in matrix(5), seed in any::<u64>()) {
        let d = t.dim();
        let n = 1 + (seed as usize) % d;
        let f = haar_frame(d, n, seed).unwrap();
        let report = probe_derivatives(&t, &f, 2, seed).unwrap();
        let max = report.probes.iter().map(|p| p.derivative.norm()).fold(0.0, f64::max);
        prop_assert_eq!(report.max_abs, max);
        prop_assert_eq!(report.exterior_skipped, n == d);
    }
}
