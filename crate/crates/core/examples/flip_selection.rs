//! Classical flip decoding, and picking the best of several sampled graphs
//! by the flip decoder's block error rate.
//!
//! ```text
//! cargo run --release --example flip_selection
//! ```

use qldpc::classical::{code_from_graph, flip_benchmark, flip_decode, select_best_graph, Orientation};
use qldpc::gf2::BitVector;
use qldpc::graph::generate_configuration_model;

fn main() -> qldpc::error::Result<()> {
    let g = generate_configuration_model(60, 50, 5, 6, 1)?;
    let code = code_from_graph(&g, Orientation::Standard);
    println!("classical code: n = {}, checks = {}, dimension = {}", code.n_bits(), code.n_checks(), code.dimension());

    let y = BitVector::from_indices(60, [3, 41])?;
    let out = flip_decode(&code, &y)?;
    match &out.correction {
        Some(c) => println!("received {:?}, flipped {:?} in {} steps", y.support(), c.support(), out.iterations),
        None => println!("received {:?}, decoder stuck after {} steps", y.support(), out.iterations),
    }

    for p in [0.02, 0.04, 0.06] {
        let b = flip_benchmark(&code, p, 4000, 11)?;
        println!("p = {p:.2}: block error {:.4} +- {:.4}", b.failure_rate, b.ci99);
    }

    let candidates = (0..8)
        .map(|s| generate_configuration_model(60, 50, 5, 6, 100 + s))
        .collect::<qldpc::error::Result<Vec<_>>>()?;
    let sel = select_best_graph(&candidates, 0.05, 2000, 0)?;
    for (i, b) in sel.benchmarks.iter().enumerate() {
        let mark = if i == sel.best_index { " <- selected" } else { "" };
        println!("candidate {i}: {:.4}{mark}", b.failure_rate);
    }
    Ok(())
}
