mod common;

use common::{panel, sweep_mpp};
use mippv::control::{assign_duties, DualLoop, PiConfig, PiState, PnoState};
use mippv::converter::{ConnectionStructure, Phasing};
use mippv::pv::AtmosphereSample;
use mippv::{select_mode, OperatingMode, Regime, Thresholds};
use proptest::prelude::*;

fn mode(regime: Regime, structure: ConnectionStructure, leader: usize) -> OperatingMode {
    let active = match structure {
        ConnectionStructure::Individual(k) => vec![k],
        _ => vec![0, 1],
    };
    OperatingMode {
        regime,
        structure,
        leader,
        active,
    }
}

#[test]
fn empty_measurement_set_is_an_error() {
    assert!(select_mode(&[], &Thresholds::default()).is_err());
}

#[test]
fn bright_matched_strings_cascade() {
    let a = AtmosphereSample::new(900.0, 30.0).unwrap();
    let m = select_mode(&[a, a], &Thresholds::default()).unwrap();
    assert_eq!(m.regime, Regime::Cascade);
    assert_eq!(m.leader, 0);
}

#[test]
fn pno_settles_around_the_mpp() {
    let params = panel();
    let curve = params.curve(AtmosphereSample::new(700.0, 25.0).unwrap()).unwrap();
    let (v_mp, _) = sweep_mpp(&params, 700.0, 25.0);
    let step = 1.0;
    let mut st = PnoState::new(0.8 * curve.voc(), step, curve.voc()).unwrap();
    let mut v = st.v_ref;
    for _ in 0..400 {
        v = st.update(v, curve.power(v));
    }
    for _ in 0..50 {
        v = st.update(v, curve.power(v));
        assert!((v - v_mp).abs() <= 2.0 * step, "v_ref {v} vs v_mp {v_mp}");
    }
}

#[test]
fn pno_rejects_non_positive_step() {
    assert!(PnoState::new(100.0, 0.0, 200.0).is_err());
}

#[test]
fn pi_leaves_the_rail_as_soon_as_the_error_turns() {
    let mut pi = PiState::from(PiConfig {
        kp: 0.1,
        ki: 50.0,
        out_min: 0.0,
        out_max: 1.0,
    });
    for _ in 0..10_000 {
        pi.step(10.0, 1e-4);
    }
    assert_eq!(pi.step(10.0, 1e-4), 1.0);
    assert!(pi.step(-0.5, 1e-4) < 1.0, "integrator wound up past the limit");
}

#[test]
fn dual_loop_lowers_duty_when_voltage_sags() {
    let mut dl = DualLoop::new(
        PiConfig {
            kp: 0.7,
            ki: 100.0,
            out_min: 0.0,
            out_max: 20.0,
        },
        PiConfig {
            kp: 0.002,
            ki: 250.0,
            out_min: 0.0,
            out_max: 1.0,
        },
    );
    dl.preset(0.5, 8.0);
    let high = dl.clone().step(200.0, 210.0, 8.0, 5e-5);
    let low = dl.step(200.0, 190.0, 8.0, 5e-5);
    assert!(high > low);
}

proptest! {
    #[test]
    fn full_mppt_duties_never_exceed_one(d1 in -0.5f64..1.5, d2 in -0.5f64..1.5, d_m in 0.0f64..0.95) {
        let m = mode(Regime::ParallelFullMppt, ConnectionStructure::Parallel, 0);
        let cmd = assign_duties(&m, d1, &[d1, d2], d_m);
        prop_assert!(cmd.d.iter().sum::<f64>() <= 1.0);
        prop_assert!(cmd.d.iter().all(|&x| (0.0..=1.0).contains(&x)));
        prop_assert_eq!(cmd.phasing, Phasing::Interleaved);
        prop_assert!(cmd.validate().is_ok());
    }

    #[test]
    fn followers_copy_the_leader(lead in 0.0f64..1.0, own in 0.0f64..1.0, leader in 0usize..2, cascade: bool) {
        let (regime, structure) = if cascade {
            (Regime::Cascade, ConnectionStructure::Cascade)
        } else {
            (Regime::ParallelMismatch, ConnectionStructure::Parallel)
        };
        let cmd = assign_duties(&mode(regime, structure, leader), lead, &[own, own], 0.5);
        prop_assert_eq!(cmd.d[0], cmd.d[1]);
        prop_assert_eq!(cmd.d[leader], lead);
    }

    #[test]
    fn individual_mode_idles_the_other_channel(lead in 0.0f64..1.0, k in 0usize..2) {
        let m = mode(Regime::Individual, ConnectionStructure::Individual(k), k);
        let cmd = assign_duties(&m, lead, &[0.3, 0.3], 0.5);
        prop_assert_eq!(cmd.d[k], lead);
        prop_assert_eq!(cmd.d[1 - k], 0.0);
    }

    #[test]
    fn pi_output_respects_limits(errors in prop::collection::vec(-100.0f64..100.0, 1..200)) {
        let mut pi = PiState::from(PiConfig { kp: 0.5, ki: 200.0, out_min: -2.0, out_max: 3.0 });
        for e in errors {
            let u = pi.step(e, 1e-3);
            prop_assert!((-2.0..=3.0).contains(&u));
        }
    }

    #[test]
    fn exactly_one_regime_and_valid_structure(
        ir1 in 0.0f64..1200.0, t1 in -40.0f64..90.0,
        ir2 in 0.0f64..1200.0, t2 in -40.0f64..90.0,
    ) {
        let a = [AtmosphereSample::new(ir1, t1).unwrap(), AtmosphereSample::new(ir2, t2).unwrap()];
        let m = select_mode(&a, &Thresholds::default()).unwrap();
        prop_assert!(m.structure.validate().is_ok());
        prop_assert!(m.active.contains(&m.leader));
        prop_assert!(!m.tracking().is_empty());
    }
}
