mod common;

use common::{random_model, rng, stable_realization, SMALL};
use rand::Rng;
use secidx::exact_index::{delta_all, ExactSolver, ExactValue};
use secidx::model::ComponentSet;
use secidx::robust_index::delta_r;
use secidx::transfer::{column_indices, TransferSamples};
use secidx::IndexValue;

fn index(v: ExactValue) -> IndexValue {
    v.index().expect("exhaustive search is conclusive")
}

#[test]
fn witnesses_are_feasible_and_rank_deficient() {
    let mut r = rng(21);
    for seed in 0..60 {
        let m = random_model(&mut r, SMALL);
        let real = stable_realization(&m, seed);
        let solver = ExactSolver::new(&m, &real, seed);
        for k in 0..m.n_u() {
            let rep = solver.delta(k, None);
            if let ExactValue::Finite(v) = rep.value {
                let w = rep.witness.unwrap();
                assert_eq!(w.len(), v);
                assert!(w.actuators.contains(&k));
                assert!(solver.feasible(&w, k).0);
                let rank = solver.samples().normrank(&m, &w).rank;
                assert!(rank < w.len());
            }
        }
    }
}

#[test]
fn exact_index_never_exceeds_robust_index() {
    let mut r = rng(22);
    for seed in 0..100 {
        let m = random_model(&mut r, SMALL);
        let real = stable_realization(&m, seed);
        for rep in delta_all(&m, &real, None, seed) {
            assert!(index(rep.value) <= delta_r(&m, rep.actuator).value, "{m}");
        }
    }
}

#[test]
fn component_addition_monotonicity() {
    let mut r = rng(23);
    for seed in 0..50 {
        let m = random_model(&mut r, SMALL);
        let real = stable_realization(&m, seed);
        let base: Vec<IndexValue> = delta_all(&m, &real, None, seed)
            .into_iter()
            .map(|rep| index(rep.value))
            .collect();
        let x = r.gen_range(0..m.n_x());
        let gain = if r.gen_bool(0.5) { 1.0 } else { -1.0 } * r.gen_range(0.05..=1.0);

        let (m2, r2) = real.with_sensor(&m, x, false, gain).unwrap();
        for (k, rep) in delta_all(&m2, &r2, None, seed).into_iter().enumerate() {
            let v = index(rep.value);
            assert!(base[k] <= v && v <= base[k] + 1, "unprotected sensor on x{}: {m}", x + 1);
        }

        let (m3, r3) = real.with_sensor(&m, x, true, gain).unwrap();
        for (k, rep) in delta_all(&m3, &r3, None, seed).into_iter().enumerate() {
            assert!(index(rep.value) >= base[k], "protected sensor on x{}: {m}", x + 1);
        }

        if let Some(free) = (0..m.n_x()).find(|&s| m.actuator_on(s).is_none()) {
            let (m4, r4) = real.with_actuator(&m, free, gain).unwrap();
            for (k, rep) in delta_all(&m4, &r4, None, seed).into_iter().take(m.n_u()).enumerate() {
                assert!(index(rep.value) <= base[k], "actuator on x{}: {m}", free + 1);
            }
        }
    }
}

fn all_columns(m: &secidx::StructuralModel) -> ComponentSet {
    ComponentSet::new(0..m.n_u(), 0..m.n_y())
}

#[test]
fn sampled_ranks_agree_at_most_points() {
    let mut r = rng(24);
    for seed in 0..100 {
        let m = random_model(&mut r, SMALL);
        let real = secidx::model::random_realization(&m, seed);
        let samples = TransferSamples::new(&m, &real, seed);
        let cols = column_indices(&m, &all_columns(&m));
        let rank = samples.normrank_cols(&cols).rank;
        let agreeing = (0..samples.points().len())
            .filter(|&p| samples.rank_at(p, &cols).rank == rank)
            .count();
        assert!(agreeing >= 2);
    }
}

#[test]
fn normrank_is_monotone_and_bounded() {
    let mut r = rng(25);
    for seed in 0..100 {
        let m = random_model(&mut r, SMALL);
        let real = secidx::model::random_realization(&m, seed);
        let samples = TransferSamples::new(&m, &real, seed);
        let total = m.n_u() + m.n_y();
        let all: Vec<usize> = (0..total).collect();
        let small: Vec<usize> = all.iter().copied().filter(|_| r.gen_bool(0.5)).collect();
        let big: Vec<usize> = all
            .iter()
            .copied()
            .filter(|c| small.contains(c) || r.gen_bool(0.5))
            .collect();
        let rs = samples.normrank_cols(&small).rank;
        let rb = samples.normrank_cols(&big).rank;
        assert!(rs <= rb);
        assert!(rb <= big.len().min(m.sensor_count()));
    }
}
