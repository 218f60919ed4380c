use num_complex::Complex;
use proptest::prelude::*;
use unicd::chebyshev::{chebyshev_t, odd_series};
use unicd::scaling::{fit_asymptote, AsymptoteForm};
use unicd::spectral::{histogram, Binning, Kernel, SpectralLine};
use unicd::{fit_inverse, FitMode, PauliOperator, PauliString};

const N: usize = 4;

fn operator() -> impl Strategy<Value = PauliOperator<f64>> {
    let term = (0u64..1 << N, 0u64..1 << N, -1.0..1.0f64, -1.0..1.0f64);
    prop::collection::vec(term, 1..6).prop_map(|ts| {
        PauliOperator::from_terms(N, ts.into_iter().map(|(x, z, re, im)| (PauliString::from_masks(x, z), Complex::new(re, im))))
    })
}

fn close(a: &PauliOperator<f64>, b: &PauliOperator<f64>) -> bool {
    let d = a.sub(b);
    d.norm() <= 1e-12 * (1.0 + a.norm() + b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative(a in operator(), b in operator(), c in operator()) {
        prop_assert!(close(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
    }

    #[test]
    fn commutator_is_antisymmetric(a in operator(), b in operator()) {
        prop_assert!(close(&a.commutator(&b), &b.commutator(&a).scale_real(-1.0)));
    }

    #[test]
    fn jacobi_identity(a in operator(), b in operator(), c in operator()) {
        let s = a.commutator(&b.commutator(&c))
            .add(&b.commutator(&c.commutator(&a)))
            .add(&c.commutator(&a.commutator(&b)));
        prop_assert!(s.norm() <= 1e-11 * (1.0 + a.norm() * b.norm() * c.norm()));
    }

    #[test]
    fn adjoint_reverses_products(a in operator(), b in operator()) {
        prop_assert!(close(&a.mul(&b).adjoint(), &b.adjoint().mul(&a.adjoint())));
    }

    #[test]
    fn matches_dense_product(a in operator(), b in operator()) {
        let dense = a.to_dense(N).unwrap() * b.to_dense(N).unwrap();
        let diff = (a.mul(&b).to_dense(N).unwrap() - dense).norm();
        prop_assert!(diff <= 1e-12 * (1.0 + a.norm() * b.norm()) * 4.0);
    }

    #[test]
    fn fits_are_odd(ell in 1usize..12, zeta in 0.01..0.5f64, x in -1.0..1.0f64) {
        let fit = fit_inverse::<f64>(ell, zeta, FitMode::Cost).unwrap();
        prop_assert!((fit.eval(x) + fit.eval(-x)).abs() <= 1e-12 * (1.0 + fit.eval(x).abs()));
    }

    #[test]
    fn odd_series_sums_odd_polynomials(betas in prop::collection::vec(-1.0..1.0f64, 1..15), x in -1.0..1.0f64) {
        let direct: f64 = betas.iter().enumerate().map(|(k, b)| b * chebyshev_t(2 * k + 1, x)).sum();
        prop_assert!((odd_series(&betas, x) - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
    }

    #[test]
    fn histograms_keep_weight_in_range(
        lines in prop::collection::vec((-5.0..5.0f64, 0.0..1.0f64), 1..40),
        bins in 1usize..60,
    ) {
        let lines: Vec<SpectralLine> = lines.into_iter().map(|(omega, weight)| SpectralLine { omega, weight }).collect();
        let total: f64 = lines.iter().map(|l| l.weight).sum();
        let hist = histogram(&lines, &Binning { lo: -5.0, hi: 5.0, bins, kernel: Kernel::Hard }).unwrap();
        prop_assert!((hist.total() - total).abs() <= 1e-12 * (1.0 + total));
    }

    #[test]
    fn asymptote_fits_recover_exact_data(a in 0.1..3.0f64, b in 0.1..1.5f64) {
        let ells = [2.0, 4.0, 8.0, 16.0, 32.0];
        for (form, f) in [
            (AsymptoteForm::Linear, Box::new(|l: f64| a * l + b) as Box<dyn Fn(f64) -> f64>),
            (AsymptoteForm::Power, Box::new(|l: f64| a * l.powf(b))),
            (AsymptoteForm::LoglOverL, Box::new(|l: f64| (a * l.ln() + b) / l)),
        ] {
            let pts: Vec<(f64, f64)> = ells.iter().map(|&l| (l, f(l))).collect();
            let fit = fit_asymptote(&pts, form, [1.0, 40.0]).unwrap();
            prop_assert!((fit.params[0] - a).abs() < 1e-9 && (fit.params[1] - b).abs() < 1e-9, "{form:?} {:?}", fit.params);
        }
    }

    #[test]
    fn single_precision_tracks_double(ell in 1usize..6, zeta in 0.05..0.5f64, x in 0.1..1.0f64) {
        let wide = fit_inverse::<f64>(ell, zeta, FitMode::Cost).unwrap();
        let narrow = fit_inverse::<f32>(ell, zeta, FitMode::Cost).unwrap();
        let (w, n) = (wide.eval(x), narrow.eval(x as f32) as f64);
        // Low orders are well conditioned, so f32 keeps several digits.
        prop_assert!((w - n).abs() <= 1e-3 * (1.0 + w.abs()), "{w} vs {n}");
    }
}
