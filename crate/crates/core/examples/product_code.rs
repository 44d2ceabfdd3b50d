//! Hypergraph products of the (5,6) and (5,10) families: sizes, weights
//! and rate, plus exact distances of a small instance.
//!
//! ```text
//! cargo run --release --example product_code
//! ```

use qldpc::graph::generate_configuration_model;
use qldpc::hgp::{code_parameters, hypergraph_product, product_distances, DEFAULT_DISTANCE_BUDGET};

fn main() -> qldpc::error::Result<()> {
    for (n, m, dv, dc) in [(60, 50, 5, 6), (60, 30, 5, 10)] {
        let g = generate_configuration_model(n, m, dv, dc, 0)?;
        let code = hypergraph_product(&g, &g)?;
        let params = code_parameters(&code)?;
        let w = code.weight_profile();
        let split = code.block_split().expect("product codes record their blocks");
        println!("({dv},{dc}) squared, n = {n}, m = {m}");
        println!("  N = {} ({} + {}), k = {}, rate = {:.5}", params.n, split.v_block, split.c_block, params.k, params.rate);
        println!(
            "  qubit degrees {:?} / {:?}, generator weights {:?} / {:?}",
            w.v_block_qubit_degrees, w.c_block_qubit_degrees, w.x_generator_weights, w.z_generator_weights
        );
    }

    // Small enough for exhaustive search over the factor codes.
    let g = generate_configuration_model(12, 10, 5, 6, 4)?;
    let code = hypergraph_product(&g, &g)?;
    match product_distances(&g, &g, DEFAULT_DISTANCE_BUDGET)? {
        Some(d) => println!("n = 12: N = {}, k = {}, d_X = {}, d_Z = {}", code.n_qubits(), code.k(), d.d_x, d.d_z),
        None => println!("n = 12: no logical qubits"),
    }
    Ok(())
}
