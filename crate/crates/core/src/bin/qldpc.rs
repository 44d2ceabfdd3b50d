use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use qldpc::classical::{code_from_graph, flip_benchmark, Orientation};
use qldpc::error::{Error, Result};
use qldpc::gf2::{BitVector, SparseBitMatrix};
use qldpc::graph::{generate_configuration_model, BiregularBipartiteGraph, Side};
use qldpc::hgp::{code_parameters, hypergraph_product, CssCode, Sector};
use qldpc::sim::{
    compare_with_toric, estimate_toric, resolve_workers, run_config, threshold_estimate, with_workers, Config,
    GraphConfig, SelectionConfig, SweepConfig, SweepResult,
};
use qldpc::ssf::{build_catalog, SsfDecoder, DEFAULT_WEIGHT_CAP};
use qldpc::toric::build_toric;

#[derive(Parser)]
#[command(name = "qldpc", version, about = "Hypergraph product codes and small-set-flip decoding")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum SectorArg {
    /// Z errors, detected by H_X.
    Z,
    /// X errors, detected by H_Z.
    X,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a simple biregular bipartite graph.
    GenGraph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        dv: usize,
        #[arg(long)]
        dc: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Block error rate of the flip decoder on a graph's classical code.
    BenchFlip {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Hypergraph product of one graph with itself, or of two graphs.
    BuildCode {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        graph2: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Small-set-flip decoding of one syndrome.
    Decode {
        /// Directory written by build-code.
        #[arg(long)]
        code: PathBuf,
        /// One unsatisfied check index per line.
        #[arg(long)]
        syndrome: PathBuf,
        #[arg(long, value_enum, default_value = "z")]
        sector: SectorArg,
    },
    /// Logical error rate over a grid of physical error rates.
    Sweep(SweepArgs),
    /// Logical error rate of the toric code under matching decoding.
    ToricSim {
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// A sweep against k/2 toric codes at every grid point.
    Compare {
        /// JSON written by `sweep --json`.
        #[arg(long)]
        sweep: PathBuf,
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to the k of the swept code.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Sub-threshold ordering across sweeps of one family.
    Threshold {
        /// JSON files written by `sweep --json`, on a common grid.
        #[arg(required = true, num_args = 2..)]
        sweeps: Vec<PathBuf>,
    },
}

#[derive(clap::Args)]
struct SweepArgs {
    /// JSON config; any flag below overrides it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    dv: Option<usize>,
    #[arg(long)]
    dc: Option<usize>,
    #[arg(long)]
    candidates: Option<usize>,
    #[arg(long)]
    select_p: Option<f64>,
    #[arg(long)]
    select_trials: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    p_grid: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Where to save the selected graph.
    #[arg(long)]
    graph_out: Option<PathBuf>,
}

fn missing(flag: &str) -> Error {
    Error::InvalidParameters(format!("--{flag} is required without --config"))
}

impl SweepArgs {
    fn resolve(&self) -> Result<Config> {
        let base = self.config.as_deref().map(Config::load).transpose()?;
        let (g, s) = match &base {
            Some(c) => (Some(&c.graph), Some(&c.sweep)),
            None => (None, None),
        };
        let pick = |flag: Option<usize>, from: Option<usize>, name: &str| flag.or(from).ok_or_else(|| missing(name));
        let selection = g.map(|g| g.selection.clone()).unwrap_or_default();
        Ok(Config {
            graph: GraphConfig {
                n: pick(self.n, g.map(|g| g.n), "n")?,
                m: pick(self.m, g.map(|g| g.m), "m")?,
                dv: pick(self.dv, g.map(|g| g.dv), "dv")?,
                dc: pick(self.dc, g.map(|g| g.dc), "dc")?,
                candidates: self.candidates.or(g.map(|g| g.candidates)).unwrap_or(5),
                selection: SelectionConfig {
                    p: self.select_p.unwrap_or(selection.p),
                    trials: self.select_trials.unwrap_or(selection.trials),
                },
            },
            sweep: SweepConfig {
                p_grid: self
                    .p_grid
                    .clone()
                    .or_else(|| s.map(|s| s.p_grid.clone()))
                    .ok_or_else(|| missing("p-grid"))?,
                trials: self.trials.or(s.map(|s| s.trials)).ok_or_else(|| missing("trials"))?,
            },
            seed: self.seed.or(base.as_ref().map(|c| c.seed)).unwrap_or(0),
            workers: self.workers.or(base.as_ref().and_then(|c| c.workers)),
        })
    }
}

fn read_graph(path: &Path) -> Result<BiregularBipartiteGraph> {
    BiregularBipartiteGraph::from_text(&fs::read_to_string(path)?)
}

fn print_json(v: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn read_sweep(path: &Path) -> Result<SweepResult> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn read_syndrome(path: &Path, len: usize) -> Result<BitVector> {
    let mut idx = Vec::new();
    for (i, line) in fs::read_to_string(path)?.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        idx.push(t.parse::<usize>().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("not an index: {t:?}"),
        })?);
    }
    idx.sort_unstable();
    idx.dedup();
    BitVector::new(len, idx)
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::GenGraph { n, m, dv, dc, seed, out } => {
            let g = generate_configuration_model(n, m, dv, dc, seed)?;
            fs::write(&out, g.to_text())?;
            print_json(&json!({
                "n": n, "m": m, "dv": dv, "dc": dc, "seed": seed,
                "max_common_left": g.max_common_neighbors(Side::Left),
                "max_common_right": g.max_common_neighbors(Side::Right),
                "out": out,
            }))
        }
        Cmd::BenchFlip { graph, p, trials, seed } => {
            let code = code_from_graph(&read_graph(&graph)?, Orientation::Standard);
            print_json(&flip_benchmark(&code, p, trials, seed)?)
        }
        Cmd::BuildCode { graph, graph2, out } => {
            let g1 = read_graph(&graph)?;
            let g2 = graph2.as_deref().map(read_graph).transpose()?;
            let code = hypergraph_product(&g1, g2.as_ref().unwrap_or(&g1))?;
            let params = code_parameters(&code)?;
            let manifest = json!({
                "N": params.n,
                "k": params.k,
                "rate": params.rate,
                "block_split": code.block_split(),
                "weight_profile": code.weight_profile(),
            });
            fs::create_dir_all(&out)?;
            fs::write(out.join("hx.txt"), code.hx().to_text())?;
            fs::write(out.join("hz.txt"), code.hz().to_text())?;
            fs::write(out.join("params.json"), serde_json::to_string_pretty(&manifest)?)?;
            print_json(&manifest)
        }
        Cmd::Decode { code, syndrome, sector } => {
            let hx = SparseBitMatrix::from_text(&fs::read_to_string(code.join("hx.txt"))?)?;
            let hz = SparseBitMatrix::from_text(&fs::read_to_string(code.join("hz.txt"))?)?;
            let css = CssCode::new(hx, hz, None, None)?;
            let sector = match sector {
                SectorArg::Z => Sector::Z,
                SectorArg::X => Sector::X,
            };
            let catalog = build_catalog(&css, sector, DEFAULT_WEIGHT_CAP)?;
            let s = read_syndrome(&syndrome, css.detecting(sector).n_rows())?;
            print_json(&SsfDecoder::new(&catalog).decode(&s)?)
        }
        Cmd::Sweep(args) => {
            let cfg = args.resolve()?;
            let files = args.graph_out.iter().map(|p| p.display().to_string()).collect();
            let (res, g) = run_config(&cfg, files)?;
            if let Some(p) = &args.graph_out {
                fs::write(p, g.to_text())?;
            }
            if let Some(p) = &args.json {
                fs::write(p, serde_json::to_string_pretty(&res)?)?;
            }
            match &args.csv {
                Some(p) => fs::write(p, res.to_csv())?,
                None => print!("{}", res.to_csv()),
            }
            Ok(())
        }
        Cmd::ToricSim { l, p, trials, seed, workers } => {
            let t = build_toric(l)?;
            let e = with_workers(resolve_workers(workers)?, || estimate_toric(&t, p, trials, seed))??;
            print_json(&json!({
                "L": l, "p": p, "q_log": e.p_log, "ci99": e.ci99,
                "trials": e.trials, "failures": e.failures,
            }))
        }
        Cmd::Compare { sweep, l, trials, seed, k, workers } => {
            let res = read_sweep(&sweep)?;
            let k = k.unwrap_or(res.k);
            let t = build_toric(l)?;
            let rows = with_workers(resolve_workers(workers)?, || {
                res.points
                    .iter()
                    .map(|hgp| {
                        let toric = estimate_toric(&t, hgp.p, trials, seed)?;
                        let mut c = compare_with_toric(hgp, &toric, k)?;
                        c.toric_qubits = Some(k / 2 * t.n_qubits());
                        Ok(json!({ "p": hgp.p, "hgp_qubits": res.n, "toric_q_log": toric.p_log, "comparison": c }))
                    })
                    .collect::<Result<Vec<_>>>()
            })??;
            print_json(&json!({ "code_id": res.code_id, "k": k, "L": l, "points": rows }))
        }
        Cmd::Threshold { sweeps } => {
            let all = sweeps.iter().map(|p| read_sweep(p)).collect::<Result<Vec<_>>>()?;
            print_json(&threshold_estimate(&all)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
