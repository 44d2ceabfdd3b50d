use qldpc::graph::*; use qldpc::hgp::*; use qldpc::ssf::*; use qldpc::sim::*; use qldpc::classical::*;
fn c4(g: &BiregularBipartiteGraph) -> usize { let mut cnt=0; for a in 0..g.n_left() { for b in a+1..g.n_left() { let s = g.left_neighbors(a).iter().filter(|x| g.left_neighbors(b).contains(x)).count(); if s>=2 {cnt+=s*(s-1)/2;} } } cnt }
fn main(){
  let a: Vec<String> = std::env::args().collect();
  let (n,m,k,p,trials): (usize,usize,u64,f64,u64) = (a[1].parse().unwrap(),a[2].parse().unwrap(),a[3].parse().unwrap(),a[4].parse().unwrap(),a[5].parse().unwrap());
  for s in 0..k {
    let g = generate_configuration_model(n,m,5,6,s).unwrap();
    let cc = code_from_graph(&g, Orientation::Standard);
    let f1 = flip_benchmark(&cc, 0.05, 4000, 0).unwrap().failure_rate;
    let f2 = flip_benchmark(&cc, 0.02, 10000, 0).unwrap().failure_rate;
    let c = hypergraph_product(&g,&g).unwrap();
    let cats = CssCatalogs::build(&c, 20).unwrap();
    let e = estimate(&c,&cats,p,trials,7).unwrap();
    println!("seed {s} c4={} mcn={}/{} flip05={:.3} flip02={:.4} p_log={:.3}", c4(&g), g.max_common_neighbors(Side::Left), g.max_common_neighbors(Side::Right), f1, f2, e.p_log);
  }
}
