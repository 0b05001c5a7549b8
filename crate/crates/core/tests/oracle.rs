//! Closed forms against the simulation oracle on the reference scenario.

use cellplan::montecarlo::{compare_budget, mc_budget};
use cellplan::throughput::{success_probability, LinkBudget};
use cellplan::{
    build_layout, mc_success_probability, Architecture, LinkGain, LinkModels, McConfig,
    PowerConfig, RadioConfig, Scenario,
};

#[test]
fn reference_rates_agree_with_simulation() {
    let scenario = Scenario::default();
    let cfg = McConfig::new(100_000, 11);
    for (arch, side) in [
        (Architecture::Conventional, 300.0),
        (Architecture::ProposedTdrs, 900.0),
        (Architecture::ProposedFdrs, 900.0),
    ] {
        let layout = scenario.layout(side).unwrap();
        let budget = scenario.budget(arch, &layout).unwrap();
        let agreement = compare_budget(&budget, &mc_budget(&budget, &cfg).unwrap());
        for a in &agreement.rates {
            assert!(a.within(3.0), "{arch} at {side} m: {a:?}");
        }
    }
}

#[test]
fn ue_at_300_m_against_two_tiers() {
    // UE 300 m east of the serving BTS in a 900 m, two-tier grid
    let layout = build_layout(900.0, 2, 1, 200.0, 200.0, 1).unwrap();
    let models = LinkModels::table_defaults();
    let powers = PowerConfig::default();
    let radio = RadioConfig::default();
    let mut moved = layout.clone();
    moved.routine_ues = vec![cellplan::Point::new(300.0, 0.0)];
    let budget = LinkBudget::conventional(&moved, &models, &powers, &radio).unwrap();
    let ue = &budget.routine.links[0];
    assert_eq!(ue.interferers.len(), 24);
    let g = ue.serving.gain;
    assert!((g.log10() + 13.243_975_917_745_93).abs() < 1e-9);

    let p = success_probability(&ue.serving, &ue.interferers, budget.noise_psd, radio.gamma);
    let est = mc_success_probability(
        &ue.serving,
        &ue.interferers,
        budget.noise_psd,
        radio.gamma,
        &McConfig::new(200_000, 3),
    )
    .unwrap();
    let sigma = (p * (1.0 - p) / 200_000.0).sqrt();
    assert!(
        (est.mean - p).abs() <= 3.0 * sigma,
        "closed {p} vs mc {}",
        est.mean
    );
}

#[test]
fn single_equal_interferer_is_one_in_eleven() {
    let s = LinkGain::new(3e-12, 1e-6);
    assert_eq!(success_probability(&s, &[s], 0.0, 10.0), 1.0 / 11.0);
}
