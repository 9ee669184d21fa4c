mod common;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spdc_core::kernel::gaussian_integral;

#[test]
fn real_instances_match_gauss_hermite() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..25 {
        let mut m = common::random_instance(&mut rng);
        m.m0 = Complex64::new(m.m0.re, 0.0);
        m.m1 = m.m1.map(|v| Complex64::new(v.re, 0.0));
        m.m2 = m.m2.map(|row| row.map(|v| Complex64::new(v.re, 0.0)));
        let analytic = gaussian_integral(&m).unwrap();
        let brute = common::gauss_hermite_6d(&m, 12);
        assert!(analytic.im.abs() < 1e-14 * analytic.re);
        assert!((analytic - brute).norm() < 1e-6 * brute.norm(), "{analytic} vs {brute}");
    }
}

#[test]
fn complex_instances_match_gauss_hermite() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..25 {
        let m = common::random_instance(&mut rng);
        let analytic = gaussian_integral(&m).unwrap();
        let brute = common::gauss_hermite_6d(&m, 12);
        assert!((analytic - brute).norm() < 1e-6 * brute.norm(), "{analytic} vs {brute}");
    }
}
