//! Contract properties for the potential families: determinism, boundedness,
//! prefix stability, and config-format round trips.

use proptest::prelude::*;
use speclab_core::Potential;
use speclab_potentials::{bernoulli, PotentialSpec};

fn arbitrary_spec() -> impl Strategy<Value = PotentialSpec> {
    prop_oneof![
        Just(PotentialSpec::zero()),
        (-3.0..3.0f64).prop_map(PotentialSpec::constant),
        ((-2.0..2.0f64), (0.1..3.0f64)).prop_map(|(c0, a)| PotentialSpec::power_decay(c0, a)),
        ((0.0..3.0f64), (1.1..2.9f64)).prop_map(|(l, b)| PotentialSpec::cos_power(l, b)),
        ((0.0..3.0f64), (0.0..1.0f64), (0.0..6.0f64))
            .prop_map(|(l, a, t)| PotentialSpec::almost_mathieu(l, a, t)),
        ((0.0..2.0f64), any::<u64>()).prop_map(|(a, s)| PotentialSpec::random_decay(a, s)),
        (
            (0.0..0.49f64),
            any::<u64>(),
            prop::collection::vec(0u64..6, 1..4),
            prop::collection::vec(1u64..6, 1..4),
        )
            .prop_map(|(a, s, mut gaps, blocks)| {
                gaps.resize(blocks.len(), 0);
                PotentialSpec::sparse_composite(a, s, gaps, blocks)
            }),
        Just(PotentialSpec::bernoulli()),
        prop::collection::vec(-2.0..2.0f64, 1..5).prop_map(PotentialSpec::periodic),
    ]
}

proptest! {
    #[test]
    fn evaluation_is_deterministic(spec in arbitrary_spec(), sites in prop::collection::vec(1i64..100_000, 1..20)) {
        let a = spec.compile().unwrap();
        let b = spec.compile().unwrap();
        for &n in &sites {
            prop_assert_eq!(a.eval(n).unwrap(), b.eval(n).unwrap());
        }
    }

    #[test]
    fn values_respect_the_declared_bound(spec in arbitrary_spec(), sites in prop::collection::vec(1i64..100_000, 1..20)) {
        let p = spec.compile().unwrap();
        for &n in &sites {
            let v = p.eval(n).unwrap();
            prop_assert!(v.is_finite());
            prop_assert!(v.abs() <= p.bound() + 1e-12,
                "{:?} at {}: |{}| > {}", spec, n, v, p.bound());
        }
    }

    #[test]
    fn bernoulli_prefixes_nest(short in 1u64..200, extra in 0u64..200) {
        let a = bernoulli::sequence(short);
        let b = bernoulli::sequence(short + extra);
        prop_assert_eq!(&b[..short as usize], &a[..]);
    }

    #[test]
    fn specs_round_trip_through_json(spec in arbitrary_spec()) {
        let text = serde_json::to_string(&spec).unwrap();
        let back: PotentialSpec = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, spec);
    }
}

#[test]
fn specs_parse_from_toml_tables() {
    let spec: PotentialSpec = toml::from_str(
        r#"
        family = "random_decay"
        alpha = 0.8
        seed = 2024
        "#,
    )
    .unwrap();
    assert_eq!(spec, PotentialSpec::random_decay(0.8, 2024));

    let spec: PotentialSpec = toml::from_str(
        r#"
        family = "almost_mathieu"
        lambda = 3.0
        alpha = 0.618
        theta0 = 0.0
        domain = "whole_line"
        "#,
    )
    .unwrap();
    assert_eq!(
        spec,
        PotentialSpec::almost_mathieu(3.0, 0.618, 0.0).on_whole_line()
    );

    let spec: PotentialSpec = toml::from_str(
        r#"
        family = "sparse_composite"
        alpha = 0.3
        seed = 7
        gaps = [1000, 10000]
        blocks = [30, 30]
        "#,
    )
    .unwrap();
    assert_eq!(
        spec,
        PotentialSpec::sparse_composite(0.3, 7, vec![1000, 10_000], vec![30, 30])
    );

    let spec: PotentialSpec = toml::from_str(
        r#"
        family = "shifted"
        n0 = 500
        [base]
        family = "cos_power"
        lambda = 1.0
        beta = 1.5
        "#,
    )
    .unwrap();
    assert_eq!(
        spec,
        PotentialSpec::shifted(PotentialSpec::cos_power(1.0, 1.5), 500)
    );

    // unknown family names are rejected, not silently defaulted
    assert!(toml::from_str::<PotentialSpec>("family = \"fourier\"\n").is_err());
}
