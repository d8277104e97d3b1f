//! Robust indices and X-sets for a structural model of the IEEE 14-bus
//! grid with five generators, four controllable loads and seven PMUs.
//!
//! ```text
//! cargo run --example ieee14
//! ```

use secidx::model::load_model;
use secidx::placement::{apply_placement, greedy_unprotected, x_set, PlacementInstance};
use secidx::robust_index::delta_r_all;

fn main() -> secidx::Result<()> {
    let (m, _) = load_model(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/ieee14.json"))?;
    println!("{} states, {} actuators, {} sensors", m.n_x(), m.n_u(), m.n_y());

    let before = delta_r_all(&m);
    for rep in &before {
        let k = rep.actuator;
        println!(
            "{:>3}: delta_r = {:<3} X-set {}",
            m.actuator_label(k),
            rep.value.to_string(),
            x_set(&m, k).label(&m)
        );
    }

    // One more PMU for each actuator.
    let inst = PlacementInstance::from_model(&m, None, vec![1; m.n_u()], 0..m.n_u(), 0)?;
    let p = greedy_unprotected(&inst)?;
    let names: Vec<_> = p.states.iter().map(|&x| m.state_label(x)).collect();
    println!("extra PMUs on {names:?}");
    let placed = apply_placement(&m, p.states.iter().copied(), false)?;
    for (b, a) in before.iter().zip(delta_r_all(&placed)) {
        println!("{:>3}: {} -> {}", m.actuator_label(b.actuator), b.value, a.value);
    }
    Ok(())
}
