//! Building a structural model in code, sampling a realization and
//! writing it in the JSON model format.
//!
//! ```text
//! cargo run --example model_files
//! ```

use secidx::model::{add_sensor, load_model, model_to_string, random_realization, save_model};
use secidx::StructuralModel;

fn main() -> secidx::Result<()> {
    // x1 -> x2 -> x3, actuators on x1 and x3, one sensor on x3.
    let m = StructuralModel::new(3, [(1, 0), (2, 1), (2, 2)], [0, 2], [(2, false)])?
        .with_name("chain");
    let r = random_realization(&m, 7);
    print!("{}", model_to_string(&m, Some(&r)));

    let m2 = add_sensor(&m, 1, true)?;
    println!("after adding a protected sensor on x2:\n{m2}");

    let path = std::env::temp_dir().join("secidx_chain.json");
    save_model(&path, &m, Some(&r))?;
    let (back, r2) = load_model(&path)?;
    println!("round trip equal: {}", back == m && r2.as_ref() == Some(&r));
    Ok(())
}
