//! Randomized structural properties of the spectral, conformal and envelope layers.

use std::f64::consts::PI;

use proptest::prelude::*;
use pwenv_core::conformal::{cayley, cayley_identities, cayley_inverse};
use pwenv_core::envelope::{apply_t, embed_j, project_q};
use pwenv_core::evaluate::{eval_point, BandLimitedFunction};
use pwenv_core::norms::{ep_norm, lp_line_norm, QuadratureSpec};
use pwenv_core::spectrum::{make_bump, make_fejer, make_partition, modulate};
use pwenv_core::C64;

/// A bump `[a, a + w]` inside `[-π, π]`, with smoothness `k ∈ {2, 3, 5}`.
fn bump() -> impl Strategy<Value = BandLimitedFunction> {
    (-PI..PI - 0.4, 0.3f64..2.5, prop::sample::select(vec![2u32, 3, 5])).prop_map(|(a, w, k)| {
        let b = (a + w).min(PI);
        BandLimitedFunction::new(make_bump(a, b, k).unwrap())
    })
}

fn complex(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(re, im)| C64::new(re, im))
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn modulation_multiplies_by_exponential(f in bump(), shift in -PI..PI, z in complex(20.0)) {
        let g = BandLimitedFunction::new(modulate(f.density(), shift).unwrap());
        let want = (C64::new(0.0, shift) * z).exp() * eval_point(&f, z);
        prop_assert!(close(eval_point(&g, z), want, 1e-11));
    }

    #[test]
    fn evaluation_is_linear(f in bump(), g in bump(), c in complex(3.0), z in complex(30.0)) {
        let h = f.scale(c).add(&g);
        let want = c * eval_point(&f, z) + eval_point(&g, z);
        prop_assert!(close(eval_point(&h, z), want, 1e-11));
    }

    /// `|f(x+iy)| ≤ e^{τ|y|} ∫|s|` for spectrum inside `[-τ, τ]`.
    #[test]
    fn growth_is_bounded_by_type(f in bump(), z in complex(6.0)) {
        let bound = (f.type_bound() * z.im.abs()).exp() * f.density().l1_mass();
        prop_assert!(eval_point(&f, z).norm() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn cayley_maps_upper_half_plane_into_disk(x in -1e3f64..1e3, y in 1e-6f64..1e3) {
        let z = C64::new(x, y);
        let w = cayley(z).unwrap();
        prop_assert!(w.norm() < 1.0);
        let (gap, jac) = cayley_identities(z).unwrap();
        let d2 = (z + C64::new(0.0, 1.0)).norm_sqr();
        prop_assert!((jac - 4.0 / (d2 * d2)).abs() <= 1e-12 * jac);
        prop_assert!(gap > 0.0);
    }

    #[test]
    fn cayley_inverse_round_trips(r in 0.0f64..0.99, theta in -PI..PI) {
        let w = C64::from_polar(r, theta);
        let z = cayley_inverse(w).unwrap();
        prop_assert!(z.im > -1e-12);
        prop_assert!(close(cayley(z).unwrap(), w, 1e-12));
    }

    /// A Hermitian spectrum gives a function real on the axis, so `f(z̄) = conj f(z)`.
    #[test]
    fn schwarz_reflection_for_symmetric_spectra(a in 0.3f64..PI, k in 2u32..6, x in -40.0f64..40.0, y in -3.0f64..3.0) {
        let f = BandLimitedFunction::new(make_bump(-a, a, k).unwrap());
        let z = C64::new(x, y);
        prop_assert!(close(eval_point(&f, z.conj()), eval_point(&f, z).conj(), 1e-12));
    }

    #[test]
    fn t_fixes_the_diagonal(f in bump(), c in complex(2.0), t in -PI..PI) {
        let f = f.scale(c);
        let pu = make_partition(3).unwrap();
        let out = apply_t(&f, &f, &pu).unwrap();
        let want = f.density().eval(t);
        prop_assert!((out.eval(t) - want).norm() <= 1e-12 * (1.0 + want.norm()));
    }

    #[test]
    fn q_inverts_j(f in bump(), c in complex(2.0), x in -50.0f64..50.0) {
        let f = f.scale(c);
        let pu = make_partition(3).unwrap();
        let back = project_q(&embed_j(&f).unwrap(), &pu).unwrap();
        let z = C64::new(x, 0.0);
        prop_assert!(close(eval_point(&back, z), eval_point(&f, z), 1e-12));
    }
}

proptest! {
    // Each case runs full line quadratures.
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn ep_norm_is_homogeneous(f in bump(), c in complex(4.0), p in 0.6f64..2.0) {
        prop_assume!(c.norm() > 1e-3);
        let quad = QuadratureSpec::default();
        let base = ep_norm(&f, p, &quad).unwrap().value;
        let scaled = ep_norm(&f.scale(c), p, &quad).unwrap().value;
        prop_assert!((scaled - c.norm() * base).abs() <= 1e-10 * scaled);
    }

    #[test]
    fn plancherel_polya_holds(f in bump(), p in 0.6f64..2.0, y in -2.0f64..2.0) {
        let quad = QuadratureSpec::default();
        let on_axis = lp_line_norm(&f, p, 0.0, &quad).unwrap();
        let off = lp_line_norm(&f, p, y, &quad).unwrap();
        let budget = off.quadrature_error_estimate + on_axis.quadrature_error_estimate;
        prop_assert!(off.value <= (p * PI * y.abs()).exp() * on_axis.value * (1.0 + 1e-8) + budget);
    }

    #[test]
    fn line_means_are_reflection_symmetric(p in 0.6f64..2.0, y in 0.1f64..2.0) {
        let f = BandLimitedFunction::new(make_fejer(PI / 2.0).unwrap());
        let quad = QuadratureSpec::default();
        let up = lp_line_norm(&f, p, y, &quad).unwrap().value;
        let down = lp_line_norm(&f, p, -y, &quad).unwrap().value;
        prop_assert!((up - down).abs() <= 1e-9 * up);
    }
}
