//! The toric code with minimum-weight matching: one decode in detail, then
//! a logical error rate.
//!
//! ```text
//! cargo run --release --example toric_baseline -- 6 0.05
//! ```

use qldpc::gf2::BitVector;
use qldpc::hgp::Sector;
use qldpc::sim::estimate_toric;
use qldpc::toric::{build_toric, match_defects, mwpm_decode, toric_logical_failure};

fn main() -> qldpc::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let l: usize = args.next().map_or(6, |a| a.parse().expect("lattice side"));
    let p: f64 = args.next().map_or(0.05, |a| a.parse().expect("error rate"));
    let t = build_toric(l)?;
    println!("L = {l}: {} qubits, k = {}", t.n_qubits(), t.code().k());

    let e = BitVector::from_indices(t.n_qubits(), [0, 1, l + 3])?;
    let syndrome = t.code().detecting(Sector::Z).mat_vec_mul(&e)?;
    let m = match_defects(&t, Sector::Z, &syndrome)?;
    println!("Z error {:?} leaves defects {:?}", e.support(), syndrome.support());
    println!("  matched {:?} with total length {}", m.pairs, m.total_weight());
    let c = mwpm_decode(&t, Sector::Z, &syndrome)?;
    println!("  logical failure: {}", toric_logical_failure(&t, &e.xor(&c)?, Sector::Z)?);

    let q = estimate_toric(&t, p, 20_000, 1)?;
    println!("p = {p}: q_log = {:.4} +- {:.4} over {} trials", q.p_log, q.ci99, q.trials);
    Ok(())
}
