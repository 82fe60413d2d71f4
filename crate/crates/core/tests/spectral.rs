mod common;

use common::{largest_real_root, perron_root, q, random_matrix, Poly};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shishikura::fixtures::persian_carpet;
use shishikura::spectral::{
    certify_lower, certify_upper, count_matrix, matrix_power, spectral_radius_estimate, transition_matrix, BoundKind,
    Matrix, SpectralCertificate,
};
use shishikura::{Rational, Scalar};

const TOL: f64 = 2e-6;

fn contains(est: &shishikura::Estimate, root: &(Rational, Rational)) -> bool {
    est.lower <= root.1 && root.0 < est.upper
}

#[test]
fn carpet_radius_matches_quartic_root() {
    let m = transition_matrix(&persian_carpet::<Rational>());
    // λ⁴ - λ/2 - 1/4
    let root = largest_real_root(&Poly(vec![q(-1, 4), q(-1, 2), q(0, 1), q(0, 1), q(1, 1)]), 50).unwrap();
    assert!((root.0.to_f64() - 0.917_543_340_8).abs() < 1e-9);
    let est = spectral_radius_estimate(&m, 1e-6).unwrap();
    assert!(est.width() <= q(1, 1_000_000));
    assert!(contains(&est, &root));
    assert!(est.certifies_below_one());
    assert_eq!(common::char_poly(&m), Poly(vec![q(-1, 4), q(-1, 2), q(0, 1), q(0, 1), q(1, 1)]));
}

#[test]
fn carpet_count_radius_matches_quartic_root() {
    let c = count_matrix(&persian_carpet::<Rational>());
    // λ⁴ - 2λ - 1
    let root = largest_real_root(&Poly(vec![q(-1, 1), q(-2, 1), q(0, 1), q(0, 1), q(1, 1)]), 50).unwrap();
    assert!((root.0.to_f64() - 1.395_336_994).abs() < 1e-8);
    let est = spectral_radius_estimate(&c, 1e-6).unwrap();
    assert!(contains(&est, &root));
    assert!(certify_lower(&c, &q(5, 4)).unwrap().verify(&c));
}

#[test]
fn hand_witness_for_the_cube() {
    let m3 = matrix_power(&transition_matrix(&persian_carpet::<Rational>()), 3);
    let v = vec![q(7, 2), q(2, 1), q(3, 1), q(1, 1)];
    // v4/2 < v2 < v3 < v1 < 4 v4
    assert!(v[3].clone() / q(2, 1) < v[1] && v[1] < v[2] && v[2] < v[0] && v[0] < v[3].clone() * q(4, 1));
    let cert = SpectralCertificate { kind: BoundKind::Upper, bound: q(1, 1), witness: v };
    assert!(cert.verify(&m3));
    assert!(certify_upper(&m3, &q(1, 1)).unwrap().verify(&m3));
}

#[test]
fn certificates_are_sharp_on_both_sides() {
    let m = transition_matrix(&persian_carpet::<Rational>());
    assert!(certify_upper(&m, &q(918, 1000)).is_some());
    assert!(certify_upper(&m, &q(917, 1000)).is_none());
    assert!(certify_lower(&m, &q(917, 1000)).is_some());
    assert!(certify_lower(&m, &q(918, 1000)).is_none());
}

#[test]
fn estimates_agree_with_characteristic_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..60 {
        let m = random_matrix(&mut rng, 1 + k % 6, 0.4);
        let est = spectral_radius_estimate(&m, TOL).unwrap();
        let root = perron_root(&m);
        assert!(contains(&est, &root), "{m}\n{} not in [{}, {})", root.0, est.lower, est.upper);
        assert!(est.width().to_f64() <= TOL);
    }
}

fn matrix_strategy(max_dim: usize) -> impl Strategy<Value = Matrix<Rational>> {
    (1..=max_dim, any::<u64>(), 0.15f64..0.8).prop_map(|(d, seed, density)| {
        random_matrix(&mut ChaCha8Rng::seed_from_u64(seed), d, density)
    })
}

/// Entrywise `b ≥ a`.
fn dominate(a: &Matrix<Rational>, seed: u64) -> Matrix<Rational> {
    let extra = random_matrix(&mut ChaCha8Rng::seed_from_u64(seed), a.dim(), 0.3);
    let rows = a
        .rows()
        .iter()
        .zip(extra.rows())
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect();
    Matrix::from_rows(rows).unwrap()
}

/// `[[a, c], [0, b]]`.
fn block_triangular(a: &Matrix<Rational>, b: &Matrix<Rational>, seed: u64) -> Matrix<Rational> {
    let (n, k) = (a.dim(), b.dim());
    let c = random_matrix(&mut ChaCha8Rng::seed_from_u64(seed), n + k, 0.5);
    let rows = (0..n + k)
        .map(|i| {
            (0..n + k)
                .map(|j| match (i < n, j < n) {
                    (true, true) => a.get(i, j).clone(),
                    (false, false) => b.get(i - n, j - n).clone(),
                    (true, false) => c.get(i, j).clone(),
                    (false, true) => q(0, 1),
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn monotone_in_entries(a in matrix_strategy(6), seed in any::<u64>()) {
        let b = dominate(&a, seed);
        let ea = spectral_radius_estimate(&a, TOL).unwrap();
        let eb = spectral_radius_estimate(&b, TOL).unwrap();
        prop_assert!(ea.width().to_f64() <= TOL && eb.width().to_f64() <= TOL);
        // λ(a) ≤ λ(b) is consistent with both intervals
        prop_assert!(ea.lower < eb.upper);
        prop_assert!(ea.estimate <= eb.estimate + 2.0 * TOL);
        prop_assert!(contains(&ea, &perron_root(&a)));
        prop_assert!(contains(&eb, &perron_root(&b)));
    }

    #[test]
    fn block_triangular_radius_is_block_maximum(a in matrix_strategy(4), b in matrix_strategy(4), seed in any::<u64>()) {
        let m = block_triangular(&a, &b, seed);
        let em = spectral_radius_estimate(&m, TOL).unwrap();
        let ea = spectral_radius_estimate(&a, TOL).unwrap();
        let eb = spectral_radius_estimate(&b, TOL).unwrap();
        let max_lo = if ea.lower > eb.lower { &ea.lower } else { &eb.lower };
        let max_hi = if ea.upper > eb.upper { &ea.upper } else { &eb.upper };
        prop_assert!(em.lower < *max_hi && *max_lo < em.upper);
        prop_assert!((em.estimate - ea.estimate.max(eb.estimate)).abs() <= 2.0 * TOL);
        prop_assert!(contains(&em, &perron_root(&m)));
    }

    #[test]
    fn certificates_verify_exactly(a in matrix_strategy(5), num in 1i64..40, den in 1i64..8) {
        let lambda = q(num, den);
        if let Some(c) = certify_upper(&a, &lambda) {
            prop_assert!(c.verify(&a));
            prop_assert!(perron_root(&a).1 <= lambda || perron_root(&a).0 < lambda);
        }
        if let Some(c) = certify_lower(&a, &lambda) {
            prop_assert!(c.verify(&a));
            prop_assert!(perron_root(&a).1 >= lambda);
        }
    }
}
