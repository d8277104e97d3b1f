mod common;

use std::collections::BTreeSet;

use common::{random_instance, random_model, rng, SMALL};
use rand::seq::SliceRandom;
use rand::Rng;
use secidx::placement::{
    apply_placement, brute_force_optimum, gain_protected, gain_unprotected, greedy_protected,
    greedy_unprotected, PlacementInstance, Problem,
};
use secidx::robust_index::delta_r_all;
use secidx::Error;

#[test]
fn unprotected_gain_has_diminishing_returns() {
    let mut r = rng(31);
    for _ in 0..500 {
        let inst = random_instance(&mut r);
        let mut order: Vec<usize> = (0..inst.candidates.len()).collect();
        order.shuffle(&mut r);
        let x = order.pop().unwrap();
        let b_len = r.gen_range(0..=order.len());
        let a_len = r.gen_range(0..=b_len);
        let (a, b) = (&order[..a_len], &order[..b_len]);
        let with = |s: &[usize]| {
            let mut v = s.to_vec();
            v.push(x);
            gain_unprotected(&inst, &v)
        };
        let da = with(a) - gain_unprotected(&inst, a);
        let db = with(b) - gain_unprotected(&inst, b);
        assert!(da >= db);
        assert!(gain_unprotected(&inst, a) <= gain_unprotected(&inst, b));
    }
}

#[test]
fn protected_gain_has_diminishing_returns() {
    let mut r = rng(32);
    for _ in 0..500 {
        let inst = random_instance(&mut r);
        let mut states: Vec<usize> = (0..inst.n_x).collect();
        states.shuffle(&mut r);
        let x = states.pop().unwrap();
        let b_len = r.gen_range(0..=states.len());
        let a_len = r.gen_range(0..=b_len);
        let a: BTreeSet<usize> = states[..a_len].iter().copied().collect();
        let b: BTreeSet<usize> = states[..b_len].iter().copied().collect();
        let with = |s: &BTreeSet<usize>| {
            let mut v = s.clone();
            v.insert(x);
            gain_protected(&inst, &v)
        };
        assert!(with(&a) - gain_protected(&inst, &a) >= with(&b) - gain_protected(&inst, &b));
        assert!(gain_protected(&inst, &a) <= gain_protected(&inst, &b));
    }
}

#[test]
fn greedy_stays_within_its_guarantees() {
    let mut r = rng(33);
    let mut feasible = 0;
    for _ in 0..200 {
        let inst = random_instance(&mut r);
        match (greedy_unprotected(&inst), brute_force_optimum(&inst, Problem::MinUnprotected)) {
            (Ok(g), Ok(opt)) => {
                feasible += 1;
                assert!(g.chosen.len() as f64 <= g.certificate * opt.value as f64 + 1e-12);
                assert!(g.chosen.len() >= opt.value);
            }
            (Err(Error::Infeasible(_)), Err(Error::Infeasible(_))) => {}
            other => panic!("greedy and exhaustive search disagree on feasibility: {other:?}"),
        }
        let p = greedy_protected(&inst);
        let opt = brute_force_optimum(&inst, Problem::MaxProtected).unwrap();
        assert!(p.states.len() <= inst.k_max);
        assert!(p.value as f64 >= (1.0 - (-1.0f64).exp()) * opt.value as f64);
        assert!(p.value <= opt.value);
    }
    assert!(feasible >= 30);
}

#[test]
fn placement_raises_each_robust_index() {
    let mut r = rng(34);
    let mut placed = 0;
    while placed < 50 {
        let m = random_model(&mut r, SMALL);
        let k: Vec<usize> = (0..m.n_u()).map(|_| r.gen_range(0..=2)).collect();
        let inst = PlacementInstance::from_model(&m, None, k.clone(), 0..m.n_u(), 0).unwrap();
        let Ok(p) = greedy_unprotected(&inst) else { continue };
        let before = delta_r_all(&m);
        let after = delta_r_all(&apply_placement(&m, p.states.iter().copied(), false).unwrap());
        for i in 0..m.n_u() {
            assert!(after[i].value >= before[i].value + k[i], "{m}");
        }
        placed += 1;
    }
}

#[test]
fn size_guard() {
    let inst = PlacementInstance::new(1, vec![BTreeSet::from([0])], vec![0; 17], vec![1], [0], 1)
        .unwrap();
    assert!(matches!(
        brute_force_optimum(&inst, Problem::MinUnprotected),
        Err(Error::SizeGuard { .. })
    ));
}
