mod common;

use common::{random_model, rng, stable_realization, SMALL};
use nalgebra::DVector;
use rand::Rng;
use secidx::attack::{
    adversarial_realization, record_outputs, simulate, steady_state, synth_type1, synth_type2,
    synth_type3, unguarded_path, InputSchedule, Payload, DETECTION_THRESHOLD,
};
use secidx::model::{ComponentSet, StructuralModel};
use secidx::robust_index::{delta_r, is_separator};
use secidx::IndexValue;

fn random_payload(r: &mut impl Rng, len: usize) -> Payload {
    Payload::Samples((0..len).map(|_| r.gen_range(-10.0..10.0)).collect())
}

/// A model and actuator whose robust witness exists, padded with random
/// extra components.
fn separated_case(r: &mut impl Rng) -> (StructuralModel, usize, ComponentSet) {
    loop {
        let m = random_model(r, SMALL);
        let k = r.gen_range(0..m.n_u());
        if let Some(mut w) = delta_r(&m, k).witness {
            for j in 0..m.n_u() {
                if r.gen_bool(0.2) {
                    w.actuators.insert(j);
                }
            }
            for l in 0..m.n_y() {
                if r.gen_bool(0.2) {
                    w.sensors.insert(l);
                }
            }
            return (m, k, w);
        }
    }
}

#[test]
fn feedforward_on_a_separator_is_invisible() {
    let mut r = rng(41);
    for seed in 0..50 {
        let (m, k, set) = separated_case(&mut r);
        let real = stable_realization(&m, seed);
        let payload = random_payload(&mut r, 50);
        let p = synth_type1(&m, &real, &set, k, payload).unwrap();
        assert!(p.warnings.is_empty());
        let t = simulate(&m, &real, &p, &DVector::zeros(m.n_x()), &InputSchedule::zero(m.n_u()), 50, 0)
            .unwrap();
        assert!(t.is_undetected(), "{m} {}: {}", set.label(&m), t.max_abs_residual());
        assert!(t.y_received.iter().all(|y| y.amax() <= 1e-9));
    }
}

#[test]
fn feedforward_ignores_initial_state_and_inputs() {
    let mut r = rng(42);
    for seed in 0..50 {
        let (m, k, set) = separated_case(&mut r);
        let real = stable_realization(&m, seed);
        let x0 = DVector::from_fn(m.n_x(), |_, _| r.gen_range(-5.0..5.0));
        let mut inputs = InputSchedule::constant((0..m.n_u()).map(|_| r.gen_range(-1.0..1.0)).collect());
        inputs.changes.push(secidx::attack::InputChange {
            k: r.gen_range(0..20),
            actuator: r.gen_range(0..m.n_u()),
            delta: r.gen_range(-1.0..1.0),
        });
        let p = synth_type1(&m, &real, &set, k, random_payload(&mut r, 40)).unwrap();
        let t = simulate(&m, &real, &p, &x0, &inputs, 50, r.gen_range(0..5)).unwrap();
        assert!(t.is_undetected(), "{}", t.max_abs_residual());
    }
}

#[test]
fn local_feedback_works_for_any_realization() {
    let mut r = rng(43);
    for _ in 0..10 {
        let (m, k, set) = separated_case(&mut r);
        let u = DVector::from_fn(m.n_u(), |_, _| r.gen_range(-1.0..1.0));
        for seed in 0..20 {
            let real = stable_realization(&m, 1000 + seed);
            let x0 = steady_state(&real, &u).unwrap();
            let p = synth_type2(&m, &set, k, random_payload(&mut r, 50)).unwrap();
            let inputs = InputSchedule::constant(u.iter().copied().collect());
            let t = simulate(&m, &real, &p, &x0, &inputs, 50, 3).unwrap();
            assert!(t.is_undetected(), "{}", t.max_abs_residual());
        }
    }
}

#[test]
fn local_feedback_needs_a_steady_state() {
    let (m, _) = common::load("platoon.json");
    let set = ComponentSet::new([0], [0]);
    let mut detected = false;
    for seed in 0..20 {
        let real = stable_realization(&m, seed);
        let u = DVector::from_vec(vec![-1.0, 2.0]);
        let x0 = steady_state(&real, &u).unwrap();
        let mut inputs = InputSchedule::constant(vec![-1.0, 2.0]);
        inputs.changes.push(secidx::attack::InputChange {
            k: 2,
            actuator: 1,
            delta: 0.1,
        });
        let p = synth_type2(&m, &set, 0, Payload::Ramp(-1.0)).unwrap();
        let t = simulate(&m, &real, &p, &x0, &inputs, 50, 0).unwrap();
        detected |= t.max_abs_residual() > DETECTION_THRESHOLD;
    }
    assert!(detected);
}

#[test]
fn guaranteed_replay_needs_enough_sensors() {
    let mut r = rng(44);
    for _ in 0..20 {
        let m = random_model(&mut r, SMALL);
        for k in 0..m.n_u() {
            let bound = delta_r(&m, k).value;
            for mask in 0u32..1 << m.n_y() {
                let sensors: Vec<usize> = (0..m.n_y()).filter(|l| mask & (1 << l) != 0).collect();
                let set = ComponentSet::new([k], sensors.iter().copied());
                let always_hidden = (0..20).all(|seed| {
                    let real = stable_realization(&m, 7000 + seed);
                    let u = DVector::zeros(m.n_u());
                    let x0 = steady_state(&real, &u).unwrap();
                    let inputs = InputSchedule::zero(m.n_u());
                    let recorded = record_outputs(&real, &x0, &inputs, 20);
                    let p = synth_type3(&m, &set, k, Payload::Step(1.0), recorded).unwrap();
                    simulate(&m, &real, &p, &x0, &inputs, 30, 0).unwrap().is_undetected()
                });
                if always_hidden {
                    assert!(IndexValue::Finite(sensors.len() + 1) >= bound, "{m}");
                }
            }
        }
    }
}

#[test]
fn adversarial_realization_reveals_unseparated_attacks() {
    let mut r = rng(45);
    let mut cases = 0;
    while cases < 50 {
        let m = random_model(&mut r, SMALL);
        let k = r.gen_range(0..m.n_u());
        let extra: Vec<usize> = (0..m.n_u()).filter(|_| r.gen_bool(0.3)).collect();
        let sensors: Vec<usize> = (0..m.n_y()).filter(|_| r.gen_bool(0.3)).collect();
        let set = ComponentSet::new(std::iter::once(k).chain(extra), sensors);
        if is_separator(&m, &set, k) {
            continue;
        }
        let path = unguarded_path(&m, &set, k).unwrap();
        let real = adversarial_realization(&m, &path, cases).unwrap();
        let mut samples: Vec<f64> = (0..10).map(|_| r.gen_range(-10.0..10.0)).collect();
        samples[0] = if r.gen_bool(0.5) { 1.0 } else { -1.0 } * r.gen_range(1.0..10.0);
        let p = synth_type1(&m, &real, &set, k, Payload::Samples(samples)).unwrap();
        assert_eq!(p.warnings.len(), 1);
        let k0 = r.gen_range(0..4);
        let t = simulate(&m, &real, &p, &DVector::zeros(m.n_x()), &InputSchedule::zero(m.n_u()), 30, k0)
            .unwrap();
        let first = t.first_detection(DETECTION_THRESHOLD).expect("attack must be visible");
        assert!(first > k0 && first <= k0 + m.n_x() + 2, "{m}: {first}");
        cases += 1;
    }
}
