use biquat_core::action::{
    action_cross_decompose, action_volume, lagrangian_density, mass_from_cutoff,
    tube_kinetic_action, Region4D, TubeQuadrature, VOLUME_NORMALIZATION,
};
use biquat_core::maxwell::{pack_eh, potential_catalog, CatalogName, FieldStrength};
use biquat_core::quadrature::Rule;
use biquat_core::worldline::Worldline;
use biquat_core::{
    make_transformer, minkowski_interval, Biquaternion, FourEvent, Involution, ReversalVariant,
    TransformKind,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn biquaternion() -> impl Strategy<Value = Biquaternion> {
    prop::array::uniform8(-2.0f64..2.0).prop_map(|c| {
        Biquaternion::new(
            Complex64::new(c[0], c[1]),
            [
                Complex64::new(c[2], c[3]),
                Complex64::new(c[4], c[5]),
                Complex64::new(c[6], c[7]),
            ],
        )
    })
}

fn unit_axis() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-1.0f64..1.0)
        .prop_filter("axis too short", |v| {
            v.iter().map(|c| c * c).sum::<f64>() > 0.01
        })
        .prop_map(|v| {
            let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            v.map(|c| c / n)
        })
}

fn event() -> impl Strategy<Value = FourEvent> {
    prop::array::uniform4(-3.0f64..3.0).prop_map(FourEvent::from_coords)
}

fn variant() -> impl Strategy<Value = ReversalVariant> {
    prop_oneof![
        Just(ReversalVariant::Transpose),
        Just(ReversalVariant::Starred)
    ]
}

fn catalog_field() -> impl Strategy<Value = CatalogName> {
    prop::sample::select(CatalogName::ALL.to_vec())
}

fn region() -> Region4D {
    Region4D::cube(
        [(0.0, 1.0), (-1.5, 1.5), (-1.5, 1.5), (-1.0, 2.0)],
        [2, 4, 4, 4],
        Rule::Midpoint,
    )
    .excluding([0.0; 3], 0.4)
}

proptest! {
    #[test]
    fn product_is_associative(a in biquaternion(), b in biquaternion(), c in biquaternion()) {
        prop_assert!(((a * b) * c).max_abs_diff(&(a * (b * c))) < 1e-12);
    }

    #[test]
    fn conjugation_reverses_products(a in biquaternion(), b in biquaternion()) {
        prop_assert!((a * b).conj().max_abs_diff(&(b.conj() * a.conj())) < 1e-12);
        prop_assert!((a * b).biconj().max_abs_diff(&(b.biconj() * a.biconj())) < 1e-12);
        prop_assert!((a * b).complex_star().max_abs_diff(&(a.complex_star() * b.complex_star())) < 1e-12);
    }

    #[test]
    fn reversal_reverses_products(a in biquaternion(), b in biquaternion(), v in variant()) {
        prop_assert!((a * b).reversal(v).max_abs_diff(&(b.reversal(v) * a.reversal(v))) < 1e-12);
    }

    #[test]
    fn involutions_are_self_inverse(a in biquaternion(), v in variant()) {
        for kind in [Involution::ComplexStar, Involution::QuatConj, Involution::Biconj, Involution::Reversal(v)] {
            prop_assert_eq!(a.involution(kind).involution(kind), a);
        }
    }

    #[test]
    fn transformers_preserve_the_interval(
        x in event(),
        n in unit_axis(),
        angle in -3.0f64..3.0,
        rapidity in -2.0f64..2.0,
    ) {
        let rot = make_transformer(TransformKind::Rotation, n, angle).unwrap();
        let boost = make_transformer(TransformKind::Boost, n, rapidity).unwrap();
        let s = minkowski_interval(&x);
        let scale = x.coords().iter().map(|c| c * c).sum::<f64>().max(1.0) * rapidity.cosh().powi(2);
        for l in [rot, boost, rot.compose(&boost)] {
            let y = l.transform(&x);
            prop_assert!((minkowski_interval(&y) - s).abs() < 1e-12 * scale);
            prop_assert!(l.inverse().transform(&y).coords().iter().zip(x.coords()).all(|(p, q)| (p - q).abs() < 1e-12 * scale));
        }
    }

    #[test]
    fn starred_density_is_real(e in prop::array::uniform3(-3.0f64..3.0), h in prop::array::uniform3(-3.0f64..3.0)) {
        let d = lagrangian_density(&pack_eh(e, h), ReversalVariant::Starred).unwrap();
        let e2: f64 = e.iter().map(|c| c * c).sum();
        let h2: f64 = h.iter().map(|c| c * c).sum();
        prop_assert_eq!(d.im, 0.0);
        prop_assert!((d.re - 2.0 * (e2 - h2)).abs() < 1e-12 * (e2 + h2).max(1.0));
        let t = lagrangian_density(&pack_eh(e, h), ReversalVariant::Transpose).unwrap();
        let eh: f64 = (0..3).map(|k| e[k] * h[k]).sum();
        prop_assert!((t.im - 4.0 * eh).abs() < 1e-12 * (e2 + h2).max(1.0));
    }

    #[test]
    fn mass_is_linear_in_charge_squared(e in 0.1f64..5.0, xi0 in 0.01f64..10.0, k in 0.1f64..4.0) {
        let m = mass_from_cutoff(e, xi0).unwrap();
        let scaled = mass_from_cutoff(e * k.sqrt(), xi0).unwrap();
        prop_assert!((scaled - k * m).abs() < 1e-12 * k * m);
        // classical radius e^2/m
        prop_assert!((e * e / m / 2.0 - xi0).abs() < 1e-12 * xi0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn decomposition_is_additive(
        n1 in catalog_field(),
        n2 in catalog_field(),
        a1 in -2.0f64..2.0,
        a2 in -2.0f64..2.0,
        v in variant(),
    ) {
        let f1 = potential_catalog(n1.as_str()).unwrap().field;
        let f2 = potential_catalog(n2.as_str()).unwrap().field;
        let b1 = FieldStrength::superpose(a1, &f1, 0.0, &f1);
        let b2 = FieldStrength::superpose(a2, &f2, 0.0, &f2);
        let terms = action_cross_decompose(&b1, &b2, &region(), v).unwrap();
        prop_assert!(terms.additivity_error() < 1e-10, "{:?}", terms);
        if v == ReversalVariant::Starred {
            let total = action_volume(&FieldStrength::superpose(1.0, &b1, 1.0, &b2), &region(), v).unwrap();
            prop_assert!(total.imaginary_residue <= 1e-10 * total.value.norm());
        }
    }
}

#[test]
fn cross_term_of_equal_fields_is_twice_self() {
    let f = potential_catalog("uniform-E").unwrap().field;
    let terms = action_cross_decompose(&f, &f, &region(), ReversalVariant::Starred).unwrap();
    assert!((terms.cross_term - terms.self_term * 2.0).norm() < 1e-12);
    let zero = FieldStrength::from_eh("zero", |_| ([0.0; 3], [0.0; 3]));
    let terms = action_cross_decompose(&f, &zero, &region(), ReversalVariant::Starred).unwrap();
    assert_eq!(terms.cross_term, Complex64::new(0.0, 0.0));
    assert_eq!(terms.external_term, Complex64::new(0.0, 0.0));
}

#[test]
fn coulomb_volume_requires_an_exclusion() {
    let f = potential_catalog("coulomb").unwrap().field;
    let bare = Region4D::cube([(0.0, 1.0); 4], [2; 4], Rule::Midpoint);
    let shifted = Region4D::cube(
        [(0.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)],
        [2; 4],
        Rule::Midpoint,
    );
    assert!(action_volume(&f, &bare, ReversalVariant::Starred).is_err());
    assert!(action_volume(&f, &shifted, ReversalVariant::Starred).is_err());
    assert!(action_volume(
        &f,
        &shifted.excluding([0.0; 3], 0.2),
        ReversalVariant::Starred
    )
    .is_ok());
}

#[test]
fn plane_wave_action_vanishes_over_whole_periods() {
    let f = potential_catalog("plane-wave").unwrap().field;
    let tau = 2.0 * std::f64::consts::PI;
    let region = Region4D::cube(
        [(0.0, tau), (0.0, 1.0), (0.0, 1.0), (0.0, tau)],
        [8, 2, 2, 8],
        Rule::Midpoint,
    );
    for v in [ReversalVariant::Starred, ReversalVariant::Transpose] {
        assert!(action_volume(&f, &region, v).unwrap().value.norm() < 1e-6);
    }
}

#[test]
fn midpoint_volume_rule_is_second_order() {
    // E = (x, 0, 0): density 2 x^2, integral over [0,1]^4 is 2/3
    let f = FieldStrength::from_eh("linear-E", |x| ([x.x[0], 0.0, 0.0], [0.0; 3]));
    let error = |n: usize| {
        let region = Region4D::cube([(0.0, 1.0); 4], [1, n, 1, 1], Rule::Midpoint);
        (action_volume(&f, &region, ReversalVariant::Starred)
            .unwrap()
            .value
            .re
            - 2.0 / 3.0)
            .abs()
    };
    let ratio = error(8) / error(16);
    assert!((ratio - 4.0).abs() < 1e-6, "ratio {ratio}");
}

#[test]
fn shell_volume_matches_tube_difference() {
    let w = Worldline::stationary([0.0; 3], 1.0);
    let (a, b, duration) = (0.3, 0.9, 1.0);
    let field = w.field_strength(1e-4);
    let region = Region4D::shell(
        (0.0, duration),
        [0.0; 3],
        (a, b),
        [2, 16, 8, 8],
        Rule::Gauss,
    );
    let volume = action_volume(&field, &region, ReversalVariant::Starred)
        .unwrap()
        .normalized
        .re;
    let quad = TubeQuadrature::default();
    let inner = tube_kinetic_action(&w, a, (0.0, duration), &quad)
        .unwrap()
        .quadrature;
    let outer = tube_kinetic_action(&w, b, (0.0, duration), &quad)
        .unwrap()
        .quadrature;
    let surface = inner - outer;
    assert!(
        (volume - surface).abs() < 0.05 * surface.abs(),
        "{volume} vs {surface}"
    );
    assert!(VOLUME_NORMALIZATION > 0.0);
}

#[test]
fn kinetic_term_agrees_with_mass_cutoff() {
    let w = Worldline::stationary([0.5, 0.0, 0.0], 1.3);
    for xi0 in [0.4, 0.2, 0.1] {
        let k = tube_kinetic_action(&w, xi0, (0.0, 2.0), &TubeQuadrature::default()).unwrap();
        let m = mass_from_cutoff(1.3, xi0).unwrap();
        assert!((k.closed_form - m * 2.0).abs() < 1e-12);
        assert!(k.relative_error() < 0.02);
    }
}
