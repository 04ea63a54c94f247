use proptest::prelude::*;

use pwenv::formats::{density_from_json, density_to_json, DensityDoc};
use pwenv::pwenv_core::spectrum::{make_bump, make_fejer, modulate};
use pwenv::pwenv_core::C64;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_json_round_trips_bit_for_bit(
        a in -3.0f64..2.0,
        w in 0.1f64..1.0,
        k in 2u32..7,
        shift in -0.5f64..0.5,
        re in -2.0f64..2.0,
        im in -2.0f64..2.0,
    ) {
        let s = modulate(&make_bump(a, a + w, k).unwrap(), shift).unwrap().scale(C64::new(re, im));
        let back = density_from_json(&density_to_json(&s)).unwrap();
        prop_assert_eq!(back.pieces().len(), s.pieces().len());
        prop_assert_eq!(back.smoothness(), s.smoothness());
        for (p, q) in s.pieces().iter().zip(back.pieces()) {
            prop_assert_eq!((p.lo, p.hi), (q.lo, q.hi));
            let trimmed = p.coeffs.iter().rposition(|c| *c != C64::new(0.0, 0.0)).map_or(1, |i| i + 1);
            prop_assert_eq!(&p.coeffs[..trimmed], &q.coeffs[..]);
        }
    }
}

#[test]
fn fejer_document_shape() {
    let doc = DensityDoc::from_density(&make_fejer(std::f64::consts::FRAC_PI_2).unwrap());
    assert_eq!(doc.version, 1);
    let [a, b] = doc.support.unwrap();
    assert!((a + std::f64::consts::PI).abs() < 1e-15 && (b - std::f64::consts::PI).abs() < 1e-15);
    let text = serde_json::to_string(&doc).unwrap();
    assert!(text.contains("\"re_coeffs\""));
}

#[test]
fn malformed_documents_are_rejected() {
    let bad = [
        r#"{"version": 2, "support": null, "smoothness": null, "pieces": []}"#,
        r#"{"version": 1, "support": [0, 1], "smoothness": null, "pieces": []}"#,
        r#"{"version": 1, "support": [0, 1], "smoothness": 0, "pieces": [{"interval": [0, 1], "re_coeffs": [1], "im_coeffs": []}]}"#,
        r#"{"version": 1, "support": null, "smoothness": null, "pieces": [], "extra": 1}"#,
        // A constant piece jumps at both ends, so smoothness 1 is a lie.
        r#"{"version": 1, "support": [0, 1], "smoothness": 1, "pieces": [{"interval": [0, 1], "re_coeffs": [1], "im_coeffs": [0]}]}"#,
    ];
    for text in bad {
        assert!(density_from_json(text).is_err(), "{text}");
    }
}
