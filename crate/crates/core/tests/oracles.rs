//! Closed-form values the norms must reproduce.

use std::f64::consts::PI;

use pwenv_core::conformal::{verify_transfer_identity, PowerSeries};
use pwenv_core::evaluate::BandLimitedFunction;
use pwenv_core::norms::{bergman_disk_norm, envelope_integral, ep_norm, lp_line_norm, EnvelopeParams, QuadratureSpec};
use pwenv_core::spectrum::make_fejer;

fn fejer() -> BandLimitedFunction {
    BandLimitedFunction::new(make_fejer(PI / 2.0).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn fejer_ep_norms() {
    let quad = QuadratureSpec::default();
    let one = ep_norm(&fejer(), 1.0, &quad).unwrap();
    assert!(rel(one.value, 2.0) < 1e-8, "{one:?}");
    let two = ep_norm(&fejer(), 2.0, &quad).unwrap();
    assert!(rel(two.value, (4.0f64 / 3.0).sqrt()) < 1e-8, "{two:?}");
}

/// For `a = π/2`, `|f(x+iy)| = (sin²(ax) + sinh²(ay)) / (a²|x+iy|²)`, whose
/// integral over `x` is `2 sinh(π|y|)/(π|y|)`.
#[test]
fn fejer_l1_means_off_axis() {
    let quad = QuadratureSpec::default();
    for &y in &[-2.0, -0.5, 0.25, 1.0, 3.0] {
        let got = lp_line_norm(&fejer(), 1.0, y, &quad).unwrap();
        let want = 2.0 * (PI * f64::abs(y)).sinh() / (PI * f64::abs(y));
        assert!(rel(got.value, want) < 1e-8, "y = {y}: {got:?} vs {want}");
    }
}

/// Integrating the line means against `e^{-π|y|}|y|^α` gives
/// `(2/π) (-Γ(α)) (2π)^{-α}` for `-1 < α < 0`.
#[test]
fn fejer_envelope_integral_closed_form() {
    let quad = QuadratureSpec::default();
    let params = EnvelopeParams::new(0.75, 1.0).unwrap();
    let alpha = params.alpha();
    let want = 2.0 / PI * -libm::tgamma(alpha) * (2.0 * PI).powf(-alpha);
    let got = envelope_integral(&fejer(), params, &quad).unwrap();
    assert!(rel(got.value, want) < 1e-7, "{got:?} vs {want}");
    assert!(got.quadrature_error_estimate < 1e-5 * want);
}

#[test]
fn disk_norms() {
    let quad = QuadratureSpec::default();
    let one = PowerSeries::constant(1.0);
    assert!(rel(bergman_disk_norm(&one, 1.0, 0.0, &quad).unwrap().value, PI) < 1e-10);
    assert!(rel(bergman_disk_norm(&one, 1.0, 1.0, &quad).unwrap().value, PI / 2.0) < 1e-10);
    let w = PowerSeries::monomial(1);
    let v = bergman_disk_norm(&w, 2.0, 0.0, &quad).unwrap().value;
    assert!(rel(v, (PI / 2.0).sqrt()) < 1e-10);
}

#[test]
fn transfer_identity_for_constant() {
    let quad = QuadratureSpec::default();
    let r = verify_transfer_identity(&PowerSeries::constant(1.0), 1.0, 0.0, &quad).unwrap();
    assert!(rel(r.lhs, PI) < 1e-8, "{r:?}");
    assert!(rel(r.rhs, PI) < 1e-8, "{r:?}");
}
