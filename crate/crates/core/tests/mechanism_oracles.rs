mod common;

use adp_core::accounting::adp_to_approx;
use adp_core::divergence::{alpha_divergence_discrete, alpha_divergence_quadrature};
use adp_core::mechanisms::{
    gaussian_adp_epsilon, gaussian_sigma_for_adp, laplace_adp_epsilon, laplace_pure_epsilon,
    rr_adp_epsilon, rr_pure_epsilon,
};
use adp_core::{AdpGuarantee, ConversionForm, DensitySpec, DiscreteDistribution, Error, ErrorKind};
use common::rel_err;
use proptest::prelude::*;

const ALPHAS: [f64; 7] = [1.5, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
const SHIFTS: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
const SCALES: [f64; 4] = [0.5, 1.0, 10.0, 100.0];

/// Closed form and quadrature agree, or both report the value as unrepresentable.
fn check_agreement(closed: adp_core::Result<f64>, quad: adp_core::Result<f64>, label: &str) {
    match (closed, quad) {
        (Ok(c), Ok(q)) => assert!(rel_err(q, c) <= 1e-6, "{label}: closed {c} quadrature {q}"),
        (Err(Error::Overflow { .. }), Err(e)) => assert_eq!(e.kind(), ErrorKind::Numeric, "{label}"),
        (Err(Error::Overflow { exponent, .. }), Ok(q)) => {
            assert!(exponent > 700.0 && q.ln() > 690.0, "{label}: quadrature {q}")
        }
        (c, q) => panic!("{label}: closed {c:?} quadrature {q:?}"),
    }
}

#[test]
fn gaussian_closed_form_matches_quadrature() {
    for &alpha in &ALPHAS {
        for &shift in &SHIFTS {
            for &sigma in &SCALES {
                let p = DensitySpec::gaussian(shift, sigma).unwrap();
                let q = DensitySpec::gaussian(0.0, sigma).unwrap();
                check_agreement(
                    gaussian_adp_epsilon(sigma, shift, alpha),
                    alpha_divergence_quadrature(&p, &q, alpha),
                    &format!("gaussian alpha={alpha} shift={shift} sigma={sigma}"),
                );
            }
        }
    }
}

#[test]
fn laplace_closed_form_matches_quadrature() {
    for &alpha in &ALPHAS {
        for &shift in &SHIFTS {
            for &b in &SCALES {
                let p = DensitySpec::laplace(shift, b).unwrap();
                let q = DensitySpec::laplace(0.0, b).unwrap();
                check_agreement(
                    laplace_adp_epsilon(b, shift, alpha),
                    alpha_divergence_quadrature(&p, &q, alpha),
                    &format!("laplace alpha={alpha} shift={shift} b={b}"),
                );
            }
        }
    }
}

#[test]
fn pure_dp_baselines_are_approached_from_above() {
    let delta = 1e-5;
    let gap = |eps: f64, alpha: f64, pure: f64| {
        adp_to_approx(AdpGuarantee::new(alpha, eps).unwrap(), delta, ConversionForm::Proof)
            .unwrap()
            .epsilon
            - pure
    };
    for p in [0.55, 0.75, 0.9] {
        let pure = rr_pure_epsilon(p).unwrap();
        let g2 = gap(rr_adp_epsilon(p, 2.0).unwrap(), 2.0, pure);
        let g200 = gap(rr_adp_epsilon(p, 200.0).unwrap(), 200.0, pure);
        assert!(g200 > 0.0 && g200 < g2, "p={p}: {g2} {g200}");
    }
    for b in [1.0, 2.0, 4.0] {
        let pure = laplace_pure_epsilon(b, 1.0).unwrap();
        let g2 = gap(laplace_adp_epsilon(b, 1.0, 2.0).unwrap(), 2.0, pure);
        let g200 = gap(laplace_adp_epsilon(b, 1.0, 200.0).unwrap(), 200.0, pure);
        assert!(g200 > 0.0 && g200 < g2, "b={b}: {g2} {g200}");
    }
}

proptest! {
    #[test]
    fn rr_matches_discrete_flip_pair_exactly(p in 0.01f64..0.99, alpha in 1.01f64..100.0) {
        let a = DiscreteDistribution::new(vec![p, 1.0 - p]).unwrap();
        let b = DiscreteDistribution::new(vec![1.0 - p, p]).unwrap();
        let oracle = alpha_divergence_discrete(&a, &b, alpha).unwrap();
        prop_assert_eq!(rr_adp_epsilon(p, alpha).unwrap().to_bits(), oracle.to_bits());
    }

    #[test]
    fn rr_is_symmetric_and_grows_with_bias(p in 0.5f64..0.98, extra in 0.001f64..0.01, alpha in 1.1f64..50.0) {
        prop_assert_eq!(rr_adp_epsilon(p, alpha).unwrap(), rr_adp_epsilon(1.0 - p, alpha).unwrap());
        prop_assert!(rr_adp_epsilon(p + extra, alpha).unwrap() > rr_adp_epsilon(p, alpha).unwrap());
    }

    #[test]
    fn noise_lowers_cost(scale in 0.5f64..50.0, factor in 1.01f64..4.0, alpha in 1.5f64..20.0) {
        prop_assert!(
            laplace_adp_epsilon(scale * factor, 1.0, alpha).unwrap()
                < laplace_adp_epsilon(scale, 1.0, alpha).unwrap()
        );
        prop_assert!(
            gaussian_adp_epsilon(scale * factor, 1.0, alpha).unwrap()
                < gaussian_adp_epsilon(scale, 1.0, alpha).unwrap()
        );
    }

    #[test]
    fn calibration_round_trip(alpha in 1.1f64..200.0, eps in 1e-6f64..10.0, sens in 0.01f64..10.0) {
        let sigma = gaussian_sigma_for_adp(alpha, eps, sens).unwrap();
        let back = gaussian_adp_epsilon(sigma, sens, alpha).unwrap();
        prop_assert!(rel_err(back, eps) <= 1e-9, "{back} vs {eps}");
    }
}
