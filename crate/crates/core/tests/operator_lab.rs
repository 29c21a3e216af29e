mod common;

use common::{harmonic, sigma_min, CMatrix};
use contraction_lab::measure::MeasureSpec;
use contraction_lab::operator_lab::{
    char_fn, charfn_identities_check, coker_dim, defect, identity_battery, mobius_of_operator, mobius_scalar,
    random_contraction, random_contractions, trace_defect, ContractionMatrix,
};
use contraction_lab::poly_space::TruncatedSpace;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Principal square root of a positive definite matrix by the Denman–Beavers
/// iteration.
fn sqrtm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = CMatrix::identity(n, n);
    for _ in 0..100 {
        let yi = y.clone().try_inverse().expect("invertible");
        let zi = z.clone().try_inverse().expect("invertible");
        let y_next = (&y + zi) * c(0.5, 0.0);
        let z_next = (&z + yi) * c(0.5, 0.0);
        let step = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if step < 1e-15 * y.norm() {
            break;
        }
    }
    y
}

fn strict_contraction(seed: u64, dim: usize) -> ContractionMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = random_contraction(dim, &mut rng, false).unwrap();
    let norm = common::min_eigenvalue_bisect(&-(raw.matrix().adjoint() * raw.matrix()), 1e-15).abs().sqrt();
    ContractionMatrix::new(raw.matrix() * c(0.95 / norm, 0.0)).unwrap()
}

#[test]
fn scalar_characteristic_function_is_the_blaschke_factor() {
    let t = ContractionMatrix::scalar(c(0.5, 0.0)).unwrap();
    for z in [c(0.0, 0.0), c(0.3, 0.1), c(-0.7, 0.2), c(0.0, -0.9)] {
        let theta = char_fn(&t, z, None).unwrap().theta;
        assert_eq!(theta.shape(), (1, 1));
        assert!((theta[(0, 0)] - mobius_scalar(c(0.5, 0.0), z)).norm() < 1e-15, "z={z}");
    }
}

#[test]
fn unitary_input_has_empty_defects() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let u = CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, s), c(0.0, s), c(s, 0.0)]);
    let t = ContractionMatrix::new(u).unwrap();
    let d = defect(&t, None).unwrap();
    assert_eq!(d.d_t_basis.ncols(), 0);
    assert_eq!(d.d_tstar_basis.ncols(), 0);
    let report = charfn_identities_check(&t, c(0.2, 0.1), c(-0.3, 0.0), c(0.5, 0.5), 1e-8).unwrap();
    assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
    assert!(!report.notes.is_empty());
}

#[test]
fn truncated_bergman_shift_defect_rank() {
    let space = TruncatedSpace::new(&MeasureSpec::bergman(0.0).unwrap(), 10).unwrap();
    let t = ContractionMatrix::new(space.multiplication().t_n.clone()).unwrap();
    let d = defect(&t, None).unwrap();
    assert_eq!(d.d_t_basis.ncols(), 10);
    let mut gaps: Vec<f64> = (0..9).map(|n| 1.0 - (n as f64 + 1.0) / (n as f64 + 2.0)).collect();
    gaps.push(1.0);
    gaps.sort_by(f64::total_cmp);
    for (got, want) in d.d_t_eigenvalues.iter().zip(&gaps) {
        assert!((got - want).abs() < 1e-14);
    }
}

#[test]
fn characteristic_function_satisfies_the_defect_identity() {
    for seed in 0..12u64 {
        let dim = 2 + (seed as usize % 5);
        let t = strict_contraction(seed, dim);
        let a = t.matrix();
        let n = a.nrows();
        let id = CMatrix::identity(n, n);
        let d_t = sqrtm(&(&id - a.adjoint() * a));
        for z in [c(0.2, -0.5), c(-0.6, 0.1)] {
            let sample = char_fn(&t, z, None).unwrap();
            let u = &sample.d_t_basis;
            let theta = &sample.theta;
            let lhs = CMatrix::identity(u.ncols(), u.ncols()) - theta.adjoint() * theta;
            let left = (&id - a * z.conj()).try_inverse().unwrap();
            let right = (&id - a.adjoint() * z).try_inverse().unwrap();
            let rhs = u.adjoint() * &d_t * left * right * &d_t * u * c(1.0 - z.norm_sqr(), 0.0);
            assert!((lhs - rhs).norm() < 1e-11, "seed={seed} z={z}");
        }
    }
}

#[test]
fn trace_defect_of_bergman_shift_is_harmonic() {
    let nu = MeasureSpec::bergman(0.0).unwrap();
    for n in [10usize, 100, 1000] {
        let space = TruncatedSpace::new(&nu, n).unwrap();
        let got = trace_defect(&space.multiplication().m_rect);
        let want = harmonic(n + 1) - 1.0;
        assert!((got - want).abs() < 1e-10, "N={n}: {got} vs {want}");
        if n >= 100 {
            assert!(got >= 0.9 * (n as f64).ln());
        }
    }
}

#[test]
fn coker_counts_small_singular_values() {
    let a = CMatrix::from_row_slice(3, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1e-3, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    assert_eq!(coker_dim(&a, 1e-6).unwrap().dim, 1);
    assert_eq!(coker_dim(&a, 1e-2).unwrap().dim, 2);
    assert!((sigma_min(&a) - 1e-3).abs() < 1e-12);
}

#[test]
fn battery_is_clean_and_reproducible() {
    let a = identity_battery(40, 2..=8, 3, 42, 1e-8).unwrap();
    let b = identity_battery(40, 2..=8, 3, 42, 1e-8).unwrap();
    assert_eq!(a.violations, 0, "{:?}", a.failures);
    assert_eq!(a.checks_run, b.checks_run);
    let m1 = random_contractions(8, 2..=8, 9).unwrap();
    let m2 = random_contractions(8, 2..=8, 9).unwrap();
    assert_eq!(m1, m2);
    for (i, t) in m1.iter().enumerate() {
        assert_eq!(t.dim(), 2 + i % 7);
    }
}

fn contraction() -> impl Strategy<Value = ContractionMatrix> {
    (any::<u64>(), 1usize..7, any::<bool>()).prop_map(|(seed, dim, sphere)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_contraction(dim, &mut rng, sphere).unwrap()
    })
}

fn disk_point(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0f64..r, 0.0f64..std::f64::consts::TAU).prop_map(|(m, t)| Complex64::from_polar(m, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mobius_maps_compose_to_the_identity(t in contraction(), lambda in disk_point(0.9)) {
        let there = mobius_of_operator(&t, -lambda).unwrap();
        let back = mobius_of_operator(&there, lambda).unwrap();
        prop_assert!((back.matrix() - t.matrix()).norm() < 1e-10 * (t.dim() as f64));
    }

    #[test]
    fn characteristic_function_is_contractive(t in contraction(), z in disk_point(0.95)) {
        let sample = char_fn(&t, z, None).unwrap();
        prop_assert!(sample.norm() <= 1.0 + 1e-9);
    }

    #[test]
    fn identities_hold_on_random_contractions(t in contraction(), l in disk_point(0.95), m in disk_point(0.95), z in disk_point(0.95)) {
        let report = charfn_identities_check(&t, l, m, z, 1e-8).unwrap();
        prop_assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
    }
}
