//! Property-based invariants for the norm machinery and the
//! convolution layer.

use num_complex::Complex64;
use proptest::prelude::*;
use sqg_core::nonlinear::{convolve_direct, convolve_fast};
use sqg_core::{SpectralField, Wave};

const N: u32 = 4;

/// Mode entries on the canonical half-lattice; `from_modes` supplies
/// the mirrors.
fn field_strategy() -> impl Strategy<Value = SpectralField> {
    let entry = (1i64..=N as i64, -(N as i64)..=N as i64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_map(|(k1, k2, re, im)| (Wave(k1, k2), Complex64::new(re, im)));
    proptest::collection::vec(entry, 0..12).prop_map(|entries| {
        // duplicate keys would be symmetry conflicts; keep the first
        let mut seen = std::collections::BTreeSet::new();
        let deduped: Vec<_> = entries
            .into_iter()
            .filter(|(k, _)| seen.insert(*k))
            .collect();
        SpectralField::from_modes(N, &deduped).expect("canonical entries are conflict-free")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn structural_invariants_preserved(f in field_strategy(), g in field_strategy(),
                                       s in -2.0..2.0f64, t in 0.0..3.0f64) {
        prop_assert!(f.validate().is_ok());
        prop_assert!(f.add(&g).validate().is_ok());
        prop_assert!(f.sub(&g).validate().is_ok());
        prop_assert!(f.scale(s).validate().is_ok());
        prop_assert!(f.semigroup(t, 1.0).unwrap().validate().is_ok());
        prop_assert!(f.gevrey(0.5, t).unwrap().validate().is_ok());
        prop_assert!(f.fractional_laplacian(1.0).validate().is_ok());
    }

    #[test]
    fn x_norm_triangle_inequality(f in field_strategy(), g in field_strategy()) {
        for sigma in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let lhs = f.add(&g).x_norm(sigma);
            let rhs = f.x_norm(sigma) + g.x_norm(sigma);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn x_norm_monotone_in_sigma(f in field_strategy()) {
        // |k| >= 1 on the torus, so raising sigma can only grow the norm
        let sigmas = [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
        for w in sigmas.windows(2) {
            prop_assert!(f.x_norm(w[0]) <= f.x_norm(w[1]) * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn semigroup_composes(f in field_strategy(), s in 0.0..2.0f64, t in 0.0..2.0f64) {
        let two_step = f.semigroup(s, 1.0).unwrap().semigroup(t, 1.0).unwrap();
        let one_step = f.semigroup(s + t, 1.0).unwrap();
        prop_assert!(sqg_core::field::sup_coeff_distance(&two_step, &one_step) < 1e-13);
    }

    #[test]
    fn algebra_inequalities_on_products(f in field_strategy(), g in field_strategy()) {
        let p = convolve_direct(&f, &g).unwrap();
        let slack = 1.0 + 1e-12;
        prop_assert!(p.x_norm(0.0) <= f.x_norm(0.0) * g.x_norm(0.0) * slack + 1e-15);
        let leibniz = f.x_norm(0.0) * g.x_norm(1.0) + f.x_norm(1.0) * g.x_norm(0.0);
        prop_assert!(p.x_norm(1.0) <= leibniz * slack + 1e-15);
        for sigma in [0.5, 2.0] {
            let bound = 2f64.powf(sigma)
                * (f.x_norm(0.0) * g.x_norm(sigma) + f.x_norm(sigma) * g.x_norm(0.0));
            prop_assert!(p.x_norm(sigma) <= bound * slack + 1e-15);
        }
    }

    #[test]
    fn fast_convolution_matches_direct(f in field_strategy(), g in field_strategy()) {
        let direct = convolve_direct(&f, &g).unwrap();
        let fast = convolve_fast(&f, &g).unwrap();
        let scale = (f.x_norm(0.0) * g.x_norm(0.0)).max(1e-30);
        for (k, c) in direct.modes() {
            prop_assert!((c - fast.coeff(k)).norm() <= 1e-12 * scale);
        }
        for (k, c) in fast.modes() {
            prop_assert!((c - direct.coeff(k)).norm() <= 1e-12 * scale);
        }
    }
}
