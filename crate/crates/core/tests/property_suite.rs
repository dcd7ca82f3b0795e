use renyi_core::props::*;
use renyi_core::{h_tilde, JointPmf, OrderPair};

#[test]
fn default_suite_passes() {
    let cfg = VerifyConfig::default();
    for out in run_properties(&Library, &PropertyId::ALL, &cfg) {
        assert!(out.passed(), "{} failed: {:?}", out.id, out.counterexample);
        assert!(out.checks > 0);
    }
}

/// Reports `H̃` with the sign of its `β`-dependence flipped for `α > 1`.
struct FlippedBeta;

impl MeasureSource for FlippedBeta {
    fn h_tilde(&self, joint: &JointPmf, order: OrderPair) -> Option<f64> {
        let v = h_tilde(joint, order).ok()?.value;
        let b = order.beta.value();
        Some(if order.alpha.value() > 1.0 && b.is_finite() { v + 0.01 * b } else { v })
    }
}

#[test]
fn injected_fault_is_named_with_a_counterexample() {
    let cfg = VerifyConfig { samples: 10, ..VerifyConfig::default() };
    let out = run_properties(&FlippedBeta, &[PropertyId::MonoBeta, PropertyId::MonoAlpha], &cfg);
    assert_eq!(out[0].id, PropertyId::MonoBeta);
    assert!(!out[0].passed());
    let ce = out[0].counterexample.as_ref().unwrap();
    assert!(ce.detail.contains("alpha="), "{}", ce.detail);
}
