use gaugelab::fields::Constants;
use gaugelab::semiclassical::{
    ab_phase_electric, ab_phase_magnetic, fringe_shift_electric, fringe_shift_magnetic, phase_pair, semi_phase,
    trajectory_oracle, SemiclassicalError, SlitSetup, Variant, MIN_STEPS,
};
use proptest::prelude::*;

fn unit() -> Constants {
    Constants::default().with_h(1.0).unwrap()
}

/// `lambda = 0.01`, `L = 10`.
fn base() -> SlitSetup {
    SlitSetup::new(unit(), 10.0, 0.2, 100.0, 1.0, 1.0).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn oracle_reproduces_magnetic_shift() {
    let s = base().with_magnetic(1.0, 0.1).unwrap();
    let o = trajectory_oracle(&s, Variant::Magnetic, MIN_STEPS).unwrap();
    assert!((o.x_c + 0.01).abs() < 1e-4, "{o:?}");
    // -B W q / (m c)
    assert!(rel(o.delta_v, -1e-3) < 1e-3, "{o:?}");
}

#[test]
fn oracle_reproduces_electric_shift() {
    let s = base().with_electric(1.0, 0.1).unwrap();
    let o = trajectory_oracle(&s, Variant::Electric, MIN_STEPS).unwrap();
    assert!((o.x_c - 0.01).abs() < 1e-4, "{o:?}");
    assert!(rel(o.delta_v, 1e-3) < 1e-3, "{o:?}");
}

#[test]
fn oracle_converges_under_refinement() {
    let s = base().with_magnetic(40.0, 0.4).unwrap();
    let coarse = trajectory_oracle(&s, Variant::Magnetic, MIN_STEPS).unwrap();
    let fine = trajectory_oracle(&s, Variant::Magnetic, 4 * MIN_STEPS).unwrap();
    assert!((coarse.x_c - fine.x_c).abs() < 1e-12 * fine.x_c.abs().max(1.0));
}

#[test]
fn oracle_without_fields_is_exactly_zero() {
    let s = base();
    for v in [Variant::Magnetic, Variant::Electric] {
        let o = trajectory_oracle(&s, v, MIN_STEPS).unwrap();
        assert_eq!(o.x_c, 0.0);
        assert_eq!(o.delta_v, 0.0);
    }
}

#[test]
fn oracle_rejects_coarse_stepping() {
    let s = base().with_magnetic(1.0, 0.1).unwrap();
    assert_eq!(
        trajectory_oracle(&s, Variant::Magnetic, 100),
        Err(SemiclassicalError::TooFewSteps { got: 100, min: MIN_STEPS })
    );
}

#[test]
fn oracle_tracks_closed_form_as_regime_tightens() {
    for (ratio, tol) in [(0.05, 1e-2), (0.005, 1e-3)] {
        let s = base().with_magnetic(2.0, ratio * 10.0).unwrap();
        let o = trajectory_oracle(&s, Variant::Magnetic, MIN_STEPS).unwrap();
        assert!(rel(o.x_c, fringe_shift_magnetic(&s).value) < tol, "ratio {ratio}");
        let e = base().with_electric(2.0, ratio * 10.0).unwrap();
        let o = trajectory_oracle(&e, Variant::Electric, MIN_STEPS).unwrap();
        assert!(rel(o.x_c, fringe_shift_electric(&e).value) < tol, "ratio {ratio}");
    }
}

#[test]
fn magnetic_and_electric_shifts_have_opposite_signs() {
    let s = base().with_magnetic(1.0, 0.1).unwrap().with_electric(1.0, 0.1).unwrap();
    assert!(fringe_shift_magnetic(&s).value < 0.0);
    assert!(fringe_shift_electric(&s).value > 0.0);
}

#[test]
fn doubling_l_doubles_shift() {
    let s = base().with_magnetic(1.0, 0.1).unwrap();
    let mut t = s;
    t.l *= 2.0;
    assert_eq!(fringe_shift_magnetic(&t).value, 2.0 * fringe_shift_magnetic(&s).value);
}

fn setup_strategy() -> impl Strategy<Value = (SlitSetup, f64, f64)> {
    (
        1.0..100.0f64,
        0.01..1.0f64,
        0.5..50.0f64,
        0.2..5.0f64,
        prop_oneof![-3.0..-0.1f64, 0.1..3.0f64],
        -5.0..5.0f64,
        0.0..0.049f64,
    )
        .prop_map(|(l, d, m, v, q, field, ratio)| {
            let s = SlitSetup::new(unit(), l, d, m, v, q).unwrap();
            (s, field, ratio)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn semiclassical_phase_is_minus_ab_phase((s, field, ratio) in setup_strategy()) {
        let s = s.with_magnetic(field, ratio * s.l).unwrap().with_electric(field, ratio * s.l / s.v).unwrap();
        for v in [Variant::Magnetic, Variant::Electric] {
            let (semi, ab) = phase_pair(&s, v);
            prop_assert!((semi.value + ab.value).abs() <= 1e-9 * ab.value.abs().max(1e-300));
        }
    }

    #[test]
    fn outputs_are_odd_in_charge_and_field((s, field, ratio) in setup_strategy()) {
        let s = s.with_magnetic(field, ratio * s.l).unwrap().with_electric(field, ratio * s.l / s.v).unwrap();
        let mut neg_q = s;
        neg_q.q = -s.q;
        let mut neg_f = s;
        neg_f.b = -s.b;
        neg_f.e_field = -s.e_field;
        for flipped in [neg_q, neg_f] {
            prop_assert_eq!(ab_phase_magnetic(&flipped).value, -ab_phase_magnetic(&s).value);
            prop_assert_eq!(ab_phase_electric(&flipped).value, -ab_phase_electric(&s).value);
            prop_assert_eq!(fringe_shift_magnetic(&flipped).value, -fringe_shift_magnetic(&s).value);
            prop_assert_eq!(fringe_shift_electric(&flipped).value, -fringe_shift_electric(&s).value);
        }
    }

    #[test]
    fn composed_phase_is_independent_of_l((s, field, ratio) in setup_strategy(), alpha in 0.1..10.0f64) {
        let s = s.with_magnetic(field, ratio).unwrap();
        let mut t = s;
        t.l *= alpha;
        let a = semi_phase(&s, fringe_shift_magnetic(&s).value).value;
        let b = semi_phase(&t, fringe_shift_magnetic(&t).value).value;
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
    }
}
