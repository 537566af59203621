use a2g_los::curves::linear_grid;
use a2g_los::fitting::{fit_surface, parametric_surface, FitOptions};
use a2g_los::ParametricCoeffs;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn recovers_random_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let hs = linear_grid(10.0, 500.0, 10.0).unwrap();
    let ds = linear_grid(10.0, 1000.0, 10.0).unwrap();
    for draw in 0..20 {
        let truth = [
            rng.random_range(0.15..2.0),
            rng.random_range(0.9..1.1),
            rng.random_range(10.0..35.0),
            rng.random_range(12.0..40.0),
            rng.random_range(0.38..0.52),
        ];
        let coeffs = ParametricCoeffs::new(truth[0], truth[1], truth[2], truth[3], truth[4]).unwrap();
        let target = parametric_surface(&coeffs, &hs, &ds).unwrap();
        let fit = fit_surface(&target, &FitOptions::default()).unwrap();
        let got = [fit.coeffs.a1, fit.coeffs.b1, fit.coeffs.c1, fit.coeffs.a2, fit.coeffs.b2];
        for (name, (g, t)) in ["a1", "b1", "c1", "a2", "b2"].iter().zip(got.iter().zip(truth)) {
            assert!((g / t - 1.0).abs() < 0.01, "draw {draw}: {name} = {g}, expected {t}");
        }
    }
}
