//! Sample a (5,6)-biregular graph, audit its small-set expansion and save it.
//!
//! ```text
//! cargo run --release --example graph_audit -- 24 20 7
//! ```

use qldpc::graph::{
    expansion_audit, generate_configuration_model, theorem1_bound, BiregularBipartiteGraph, Side,
    DEFAULT_AUDIT_BUDGET,
};

fn main() -> qldpc::error::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let (n, m, seed) = match args[..] {
        [n, m, seed] => (n, m, seed as u64),
        _ => (24, 20, 7),
    };
    let g = generate_configuration_model(n, m, 5, 6, seed)?;
    println!("graph: {} left x {} right, degrees {}/{}", g.n_left(), g.n_right(), g.deg_left(), g.deg_right());
    println!(
        "max shared neighbours: left {}, right {}",
        g.max_common_neighbors(Side::Left),
        g.max_common_neighbors(Side::Right)
    );

    let left = expansion_audit(&g, Side::Left, 3, DEFAULT_AUDIT_BUDGET)?;
    let right = expansion_audit(&g, Side::Right, 3, DEFAULT_AUDIT_BUDGET)?;
    for r in [&left, &right] {
        println!("{:?} side, subsets up to {}:", r.side, r.max_subset_size);
        for s in &r.per_size {
            println!("  |S| = {}: min |N(S)| = {} (ratio {:.3})", s.size, s.min_neighborhood, s.ratio);
        }
        println!("  delta_hat = {:.3}", r.delta_hat);
    }
    let bound = theorem1_bound(&g, &left, &right);
    println!(
        "guaranteed small-set-flip radius {} ({})",
        bound.weight,
        if bound.applicable { "expansion sufficient" } else { "audited expansion too weak" }
    );

    // The text format round-trips exactly.
    let text = g.to_text();
    assert_eq!(BiregularBipartiteGraph::from_text(&text)?, g);
    println!("first lines of the graph file:");
    for line in text.lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
