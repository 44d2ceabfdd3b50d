//! Small-set-flip decoding of a few errors on a 244-qubit product code.
//!
//! ```text
//! cargo run --release --example ssf_decode
//! ```

use qldpc::gf2::BitVector;
use qldpc::graph::generate_configuration_model;
use qldpc::hgp::{hypergraph_product, Sector};
use qldpc::ssf::{decode_css, CssCatalogs, SsfDecoder, DEFAULT_WEIGHT_CAP};

fn main() -> qldpc::error::Result<()> {
    let g = generate_configuration_model(12, 10, 5, 6, 4)?;
    let code = hypergraph_product(&g, &g)?;
    let catalogs = CssCatalogs::build(&code, DEFAULT_WEIGHT_CAP)?;
    let cat = catalogs.get(Sector::Z);
    println!(
        "N = {}, {} generators of weight {}, {} subsets each",
        code.n_qubits(),
        cat.n_generators(),
        cat.generator_support(0).weight(),
        cat.subset_count(0)
    );

    // Two Z errors far apart, then decode with the per-step trace.
    let e = BitVector::from_indices(code.n_qubits(), [5, 200])?;
    let syndrome = code.hx().mat_vec_mul(&e)?;
    let out = SsfDecoder::new(cat).with_trace(true).decode(&syndrome)?;
    println!("Z error {:?}: syndrome weight {}", e.support(), syndrome.weight());
    println!("  {:?} after {} steps, estimate {:?}", out.status, out.iterations, out.deduced_error.support());
    println!("  syndrome weights {:?}", out.syndrome_trace.unwrap_or_default());
    let residual = e.xor(&out.deduced_error)?;
    println!("  residual is a stabilizer: {}", code.hz().in_row_space(&residual)?);

    // Both sectors at once. X errors are seen by H_Z.
    let x_err = BitVector::from_indices(code.n_qubits(), [17])?;
    let both = decode_css(&code, &catalogs, &syndrome, &code.hz().mat_vec_mul(&x_err)?)?;
    println!("{}", serde_json::to_string_pretty(&both)?);
    Ok(())
}
