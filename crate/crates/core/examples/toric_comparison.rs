//! A product code against k/2 toric codes of similar overhead, at a few
//! physical error rates.
//!
//! ```text
//! cargo run --release --example toric_comparison
//! ```

use qldpc::graph::generate_configuration_model;
use qldpc::hgp::hypergraph_product;
use qldpc::sim::{compare_with_toric, estimate, estimate_toric};
use qldpc::ssf::{CssCatalogs, DEFAULT_WEIGHT_CAP};
use qldpc::toric::build_toric;

fn main() -> qldpc::error::Result<()> {
    let g = generate_configuration_model(24, 20, 5, 6, 2)?;
    let code = hypergraph_product(&g, &g)?;
    let catalogs = CssCatalogs::build(&code, DEFAULT_WEIGHT_CAP)?;
    let k = code.k();
    // k/2 toric codes of side 5 use about as many qubits as the product.
    let t = build_toric(5)?;
    println!("product: N = {}, k = {k}; toric: {} copies of {} qubits", code.n_qubits(), k / 2, t.n_qubits());
    for p in [0.005, 0.01, 0.02] {
        let hgp = estimate(&code, &catalogs, p, 2000, 9)?;
        let toric = estimate_toric(&t, p, 2000, 9)?;
        let c = compare_with_toric(&hgp, &toric, k)?;
        println!(
            "p = {p:<5}: product {:.4} +- {:.4}, toric copies {:.4} +- {:.4}",
            c.hgp_block_fail, c.hgp_ci99, c.toric_block_fail, c.toric_ci99
        );
    }
    Ok(())
}
