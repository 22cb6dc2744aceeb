use proptest::prelude::*;

use patchsep::io::{format_float, read_vector_coeffs, write_vector_coeffs};
use patchsep::separation::ShellWeighting;
use patchsep::sphere::{grid_l2_norm, sh_analysis, sh_count, sh_synthesis, ShCoeffs, SphereGrid};
use patchsep::vsh::{vector_analysis, vector_synthesis, ChannelCoeffs, Channel, GridVectorField, VectorFieldCoeffs};

fn sh_coeffs(max: usize) -> impl Strategy<Value = ShCoeffs> {
    (0..=max).prop_flat_map(|n| {
        prop::collection::vec(-10.0f64..10.0, sh_count(n)).prop_map(move |v| ShCoeffs::from_vec(n, v).unwrap())
    })
}

fn vector_coeffs(max: usize) -> impl Strategy<Value = VectorFieldCoeffs> {
    (1..=max, 0..=max, 1..=max).prop_flat_map(|(e, i, d)| {
        let len = |ch: Channel, n: usize| ChannelCoeffs::zeros(ch, n).values().len();
        (
            prop::collection::vec(-5.0f64..5.0, len(Channel::Ext, e)),
            prop::collection::vec(-5.0f64..5.0, len(Channel::Int, i)),
            prop::collection::vec(-5.0f64..5.0, len(Channel::Df, d)),
        )
            .prop_map(move |(a, b, c)| VectorFieldCoeffs {
                ext: ChannelCoeffs::from_vec(Channel::Ext, Some(e), a).unwrap(),
                int: ChannelCoeffs::from_vec(Channel::Int, Some(i), b).unwrap(),
                df: ChannelCoeffs::from_vec(Channel::Df, Some(d), c).unwrap(),
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scalar_parseval_and_round_trip(c in sh_coeffs(9)) {
        let g = SphereGrid::gauss(9);
        let samples = sh_synthesis(&c, g.nodes());
        let l2 = grid_l2_norm(&samples, &g);
        prop_assert!((l2 - c.norm()).abs() <= 1e-11 * (1.0 + c.norm()));
        let back = sh_analysis(&samples, &g, c.max_degree()).unwrap();
        for (a, b) in c.values().iter().zip(back.values()) {
            prop_assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn vector_parseval_and_round_trip(c in vector_coeffs(6)) {
        let g = SphereGrid::gauss(7);
        let f = GridVectorField::new(vector_synthesis(&c, g.nodes())).unwrap();
        let l2 = f.weighted_norm(g.weights()).unwrap();
        prop_assert!((l2 - c.norm()).abs() <= 1e-11 * (1.0 + c.norm()));
        let back = vector_analysis(&f, &g, 6).unwrap();
        for (ch, n, k, v) in back.iter() {
            prop_assert!((v - c.channel(ch).get_or_zero(n, k)).abs() < 1e-10);
        }
    }

    #[test]
    fn coefficient_text_is_bit_exact(c in vector_coeffs(4), scale in -300i32..300) {
        let c = c.scale(10f64.powi(scale));
        let back = read_vector_coeffs(&write_vector_coeffs(&c)).unwrap();
        prop_assert_eq!(c.iter().count(), back.iter().count());
        for ((_, _, _, a), (_, _, _, b)) in c.iter().zip(back.iter()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn float_formatting_round_trips(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(v.is_finite());
        let parsed: f64 = format_float(v).parse().unwrap();
        prop_assert_eq!(parsed.to_bits(), v.to_bits());
    }

    #[test]
    fn shell_weights_positive_and_decreasing(r in 1.0001f64..4.0) {
        let s = ShellWeighting::new(r).unwrap();
        let w: Vec<f64> = (1..=30).map(|n| s.column_weight(n)).collect();
        prop_assert!(w.iter().all(|v| *v > 0.0));
        prop_assert!(w.windows(2).all(|p| p[1] < p[0]));
        let d = ShellWeighting::disabled();
        prop_assert!((1..=30).all(|n| d.column_weight(n) == 1.0));
    }
}
