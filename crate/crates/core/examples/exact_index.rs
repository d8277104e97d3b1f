//! Exact security index of a two-state system with one actuator.
//!
//! The nominal coupling `x1 -> x2` lets the sensor on `x2` see the actuator,
//! so no attack on `u1` stays hidden. Removing the coupling leaves `u1`
//! invisible on its own.
//!
//! ```text
//! cargo run --example exact_index
//! ```

use nalgebra::dmatrix;
use secidx::exact_index::{delta_all, ExactSolver};
use secidx::{ComponentSet, Realization, StructuralModel};

fn main() -> secidx::Result<()> {
    let m = StructuralModel::new(2, [(0, 0), (1, 0), (1, 1)], [0], [(1, true)])?;
    let nominal = Realization::new(
        &m,
        dmatrix![0.5, 0.0; 0.01, 0.5],
        dmatrix![1.0; 0.0],
        dmatrix![0.0, 1.0],
    )?;
    println!("{m}");
    for rep in delta_all(&m, &nominal, None, 0) {
        println!("nominal: {} = {}", m.actuator_label(rep.actuator), rep.value);
    }

    let decoupled_model = StructuralModel::new(2, [(0, 0), (1, 1)], [0], [(1, true)])?;
    let mut decoupled = nominal.clone();
    decoupled.a[(1, 0)] = 0.0;
    let solver = ExactSolver::new(&decoupled_model, &decoupled, 0);
    let rep = solver.delta(0, None);
    let witness = rep.witness.as_ref().map(|w| w.label(&decoupled_model));
    println!("without coupling: u1 = {} via {}", rep.value, witness.unwrap_or_default());

    // The feasibility test on its own: {u1} against the decoupled system.
    let (feasible, borderline) = solver.feasible(&ComponentSet::new([0], []), 0);
    println!("{{u1}} hides u1: {feasible} (borderline: {borderline})");
    Ok(())
}
