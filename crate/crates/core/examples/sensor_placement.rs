//! Greedy sensor placement on a model whose X-sets overlap.
//!
//! Unprotected sensors are placed until every actuator's robust index
//! rises by the requested amount; protected sensors cover as many
//! actuators as a fixed budget allows.
//!
//! ```text
//! cargo run --example sensor_placement
//! ```

use secidx::model::load_model;
use secidx::placement::{
    apply_placement, brute_force_optimum, greedy_protected, greedy_unprotected, x_sets,
    PlacementInstance, Problem,
};
use secidx::robust_index::delta_r_all;

fn main() -> secidx::Result<()> {
    let (m, _) = load_model(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/shared.json"))?;
    for s in x_sets(&m) {
        println!("X-set of {}: {}", m.actuator_label(s.actuator), s.label(&m));
    }

    let inst = PlacementInstance::from_model(&m, None, vec![1, 1], 0..m.n_u(), 0)?;
    let greedy = greedy_unprotected(&inst)?;
    let best = brute_force_optimum(&inst, Problem::MinUnprotected)?;
    println!(
        "unprotected: greedy {} sensors, optimum {}, certificate {:.3}",
        greedy.chosen.len(),
        best.value,
        greedy.certificate
    );

    let before = delta_r_all(&m);
    let placed = apply_placement(&m, greedy.states.iter().copied(), false)?;
    for (b, a) in before.iter().zip(delta_r_all(&placed)) {
        println!("  {}: {} -> {}", m.actuator_label(b.actuator), b.value, a.value);
    }

    let inst = PlacementInstance::from_model(&m, None, vec![0, 0], 0..m.n_u(), 1)?;
    let p = greedy_protected(&inst);
    let best = brute_force_optimum(&inst, Problem::MaxProtected)?;
    let names: Vec<_> = p.states.iter().map(|&x| m.state_label(x)).collect();
    println!(
        "protected, budget 1: {:?} covers {} (optimum {})",
        names, p.value, best.value
    );
    let guarded = apply_placement(&m, p.states.iter().copied(), true)?;
    for rep in delta_r_all(&guarded) {
        println!("  {}: {}", m.actuator_label(rep.actuator), rep.value);
    }
    Ok(())
}
