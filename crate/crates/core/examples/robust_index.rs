//! Robust index from a minimum cut, checked against exhaustive enumeration.
//!
//! ```text
//! cargo run --example robust_index
//! ```

use secidx::model::load_model;
use secidx::robust_index::{build_extended_graph, build_flow_network, delta_r, delta_r_oracle, max_flow};

fn main() -> secidx::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/example3.json");
    let (m, _) = load_model(path)?;
    println!("{m}");

    let g = build_extended_graph(&m);
    println!("extended graph: {} edges", g.edge_count());
    for k in 0..m.n_u() {
        let net = build_flow_network(&g, k);
        let flow = max_flow(&net);
        println!("flow network for {}:", m.actuator_label(k));
        print!("{}", net.edge_list(&m));
        println!("max flow {}, cut arcs {:?}", flow.value, flow.cut);

        let rep = delta_r(&m, k);
        let oracle = delta_r_oracle(&m, k)?;
        print!("{}: delta_r = {} (enumeration: {oracle})", m.actuator_label(k), rep.value);
        if let (Some(w), Some(s)) = (&rep.witness, &rep.separator) {
            print!(", attack {} cut by {}", w.label(&m), s.label(&m));
        }
        println!();
    }
    Ok(())
}
