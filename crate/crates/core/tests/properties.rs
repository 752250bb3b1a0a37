use fracdrift::fracops::{GridField, GridSpec};
use fracdrift::io::{decode_field_snapshot, encode_field_snapshot, parse_profile_csv, write_profile_csv, ProfileRow};
use fracdrift::mc::{fit_vanishing_exponent, radial_density};
use fracdrift::model::{beta_of_kappa, drift_factor, sup_drift, ModelParams};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn snapshot_round_trip(vals in prop::collection::vec(any::<f64>(), 16), l in 0.1f64..100.0, tag in "[a-z][a-z ]{0,11}") {
        let spec = GridSpec::new(1, 16, l).unwrap();
        let field = GridField { spec, values: vals.clone() };
        let bytes = encode_field_snapshot(&field, std::slice::from_ref(&tag)).unwrap();
        let (back, prov) = decode_field_snapshot(&bytes).unwrap();
        prop_assert_eq!(back.spec, spec);
        prop_assert_eq!(prov, vec![tag]);
        prop_assert!(back.values.iter().zip(&vals).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn snapshot_decoder_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..300)) {
        let mut data = b"fracdrift-field 1\n".to_vec();
        data.extend(bytes);
        let _ = decode_field_snapshot(&data);
    }

    #[test]
    fn profile_round_trip(steps in prop::collection::vec((1e-6f64..1.0, 0.0f64..10.0, 0.0f64..1.0), 1..20)) {
        let mut r = 0.0;
        let rows: Vec<ProfileRow> = steps
            .iter()
            .map(|&(dr, density, stderr)| {
                r += dr;
                ProfileRow { r_mid: r, density, stderr }
            })
            .collect();
        let mut out = Vec::new();
        write_profile_csv(&mut out, &rows, &["provenance".to_string()]).unwrap();
        prop_assert_eq!(parse_profile_csv(std::str::from_utf8(&out).unwrap()).unwrap(), rows);
    }

    #[test]
    fn exponent_is_increasing_and_below_alpha(k1 in 1e-3f64..1e3, ratio in 1.01f64..10.0, alpha in 0.2f64..=1.0, d in 3usize..6) {
        let p = ModelParams::new(d, alpha, 1.0).unwrap();
        let b1 = beta_of_kappa(k1, &p).unwrap().beta;
        let b2 = beta_of_kappa(k1 * ratio, &p).unwrap().beta;
        prop_assert!(0.0 < b1 && b1 < b2 && b2 < alpha, "{} {} {}", b1, b2, alpha);
    }

    #[test]
    fn drift_is_repulsive_and_bounded(r in 1e-4f64..3.0, eps in 0.0f64..0.1, kappa in 0.01f64..5.0, alpha in 0.2f64..=1.0) {
        let p = ModelParams::new(3, alpha, kappa).unwrap();
        let (phi, _) = drift_factor(r, eps, &p);
        prop_assert!(phi >= 0.0);
        prop_assert!(phi * r <= sup_drift(eps, &p));
        if r >= 2.0 {
            prop_assert_eq!(phi, 0.0);
        }
    }

    #[test]
    fn histogram_mass_bookkeeping(radii in prop::collection::vec(0.0f64..2.0, 1..200)) {
        let edges = [0.0, 0.25, 0.5, 1.0, 1.5];
        let bins = radial_density(&radii, 3, &edges).unwrap();
        let ball = |r: f64| 4.0 / 3.0 * std::f64::consts::PI * r.powi(3);
        let mass: f64 = bins.iter().map(|b| b.density * (ball(b.r_hi) - ball(b.r_lo))).sum();
        let inside = radii.iter().filter(|&&r| r < 1.5).count() as f64 / radii.len() as f64;
        prop_assert!((mass - inside).abs() < 1e-12, "{} {}", mass, inside);
    }

    #[test]
    fn fit_recovers_exact_power_laws(slope in -1.0f64..2.0, scale in 1e-3f64..1e3) {
        let rows: Vec<ProfileRow> = (0..6)
            .map(|i| {
                let r = 0.01 * 2f64.powi(i);
                let density = scale * r.powf(slope);
                ProfileRow { r_mid: r, density, stderr: 0.01 * density }
            })
            .collect();
        let fit = fit_vanishing_exponent(&rows, (0.0, 1.0)).unwrap();
        prop_assert!((fit.beta_hat - slope).abs() < 1e-9);
        prop_assert_eq!(fit.bins_used, 6);
    }
}
