use adp_core::accounting::{adp_to_approx, zcdp_to_approx};
use adp_core::mechanisms::{gaussian_zcdp_rho, laplace_adp_epsilon, laplace_pure_epsilon};
use adp_core::sweep::{
    sweep_cumulative_vs_iterations, sweep_mechanism_vs_alpha, sweep_optimizer_curves,
};
use adp_core::{
    AdpGuarantee, AlphaSearchConfig, AlphaSelection, ConversionForm, MechanismSpec,
    OptimizerCurve, SweepTable, ZcdpGuarantee,
};

fn small_cfg() -> AlphaSearchConfig {
    AlphaSearchConfig {
        alpha_max: 120.0,
        ..Default::default()
    }
}

#[test]
fn mechanism_sweep_cells_are_recomputable() {
    let grid: Vec<f64> = (2..=40).map(f64::from).collect();
    let mech = MechanismSpec::Laplace {
        scale_b: 2.0,
        l1_sensitivity: 1.0,
    };
    let t = sweep_mechanism_vs_alpha(&mech, &grid, 1e-5, ConversionForm::Proof).unwrap();
    t.validate().unwrap();
    assert_eq!(t.columns, ["alpha", "adp_converted_epsilon", "baseline_epsilon"]);
    for row in &t.rows {
        let alpha = row[0].unwrap();
        let eps = laplace_adp_epsilon(2.0, 1.0, alpha).unwrap();
        let expected = adp_to_approx(AdpGuarantee::new(alpha, eps).unwrap(), 1e-5, ConversionForm::Proof)
            .unwrap()
            .epsilon;
        assert_eq!(row[1], Some(expected));
        assert_eq!(row[2], Some(laplace_pure_epsilon(2.0, 1.0).unwrap()));
    }
}

#[test]
fn cumulative_sweep_is_deterministic_and_consistent() {
    let cfg = small_cfg();
    let a = sweep_cumulative_vs_iterations(100.0, 1.0, 1e-5, 100, &cfg, AlphaSelection::PerCurve).unwrap();
    let b = sweep_cumulative_vs_iterations(100.0, 1.0, 1e-5, 100, &cfg, AlphaSelection::PerCurve).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    a.validate().unwrap();
    assert_eq!(a.rows.len(), 100);

    let rho = gaussian_zcdp_rho(100.0, 1.0).unwrap();
    for row in &a.rows {
        let n = row[0].unwrap();
        let z = zcdp_to_approx(ZcdpGuarantee::new(n * rho).unwrap(), 1e-5).unwrap().epsilon;
        assert_eq!(row[3], Some(z));
        if n >= 10.0 {
            let others = [row[1], row[2], row[3]].map(Option::unwrap);
            assert!(others.iter().all(|v| row[4].unwrap() > *v), "row {row:?}");
        }
    }
}

#[test]
fn per_iteration_selection_never_costs_more() {
    let cfg = small_cfg();
    let curve = sweep_cumulative_vs_iterations(100.0, 1.0, 1e-5, 200, &cfg, AlphaSelection::PerCurve).unwrap();
    let each = sweep_cumulative_vs_iterations(100.0, 1.0, 1e-5, 200, &cfg, AlphaSelection::PerIteration).unwrap();
    for (c, e) in curve.rows.iter().zip(&each.rows) {
        assert!(e[1].unwrap() <= c[1].unwrap());
        assert!(e[2].unwrap() <= c[2].unwrap());
    }
    assert_eq!(curve.rows.last(), each.rows.last());
}

#[test]
fn large_iteration_counts_are_sampled() {
    let t = sweep_cumulative_vs_iterations(100.0, 1.0, 1e-5, 100_000, &small_cfg(), AlphaSelection::PerCurve)
        .unwrap();
    assert_eq!(t.rows.len(), 64);
    assert!(t.metadata["sampling"].starts_with("log"));
    assert!(t.metadata.contains_key("sampled_iterations"));
}

#[test]
fn csv_round_trips_exactly() {
    let t = sweep_optimizer_curves(
        1000,
        1e-5,
        1.0,
        &[50.0, 100.0],
        OptimizerCurve::EpsilonVsAlpha,
        &small_cfg(),
    )
    .unwrap();
    let csv = t.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "alpha,sigma_50,sigma_100");
    for (line, row) in lines.zip(&t.rows) {
        let parsed: Vec<Option<f64>> = line
            .split(',')
            .map(|c| (!c.is_empty()).then(|| c.parse().unwrap()))
            .collect();
        assert_eq!(&parsed, row);
    }
    let back: SweepTable = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
    assert_eq!(back, t);
}
