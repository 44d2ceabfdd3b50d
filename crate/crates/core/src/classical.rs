//! Classical codes from factor graphs and the bit-flipping decoder.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{BitVector, SparseBitMatrix};
use crate::graph::BiregularBipartiteGraph;
use crate::rng::{trial_stream, StreamTag};
use crate::stats::wald_halfwidth99;

/// Which side of the factor graph carries the variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Left nodes are bits, right nodes are checks: the code `C`.
    Standard,
    /// Right nodes are bits, left nodes are checks: the code `C^T`.
    Transposed,
}

/// A linear code `ker H`, with `H` read off a factor graph
/// (rows = checks, columns = variables).
#[derive(Clone, Debug)]
pub struct ClassicalCode {
    h: SparseBitMatrix,
    graph: BiregularBipartiteGraph,
    orientation: Orientation,
}

impl ClassicalCode {
    pub fn parity_check(&self) -> &SparseBitMatrix {
        &self.h
    }

    pub fn graph(&self) -> &BiregularBipartiteGraph {
        &self.graph
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn n_bits(&self) -> usize {
        self.h.n_cols()
    }

    pub fn n_checks(&self) -> usize {
        self.h.n_rows()
    }

    /// `n - rank(H)`.
    pub fn dimension(&self) -> usize {
        self.h.n_cols() - self.h.rank()
    }
}

pub fn code_from_graph(g: &BiregularBipartiteGraph, orientation: Orientation) -> ClassicalCode {
    let rows = match orientation {
        Orientation::Standard => (0..g.n_right())
            .map(|r| g.right_neighbors(r).to_vec())
            .collect(),
        Orientation::Transposed => (0..g.n_left())
            .map(|l| g.left_neighbors(l).to_vec())
            .collect(),
    };
    let n_cols = match orientation {
        Orientation::Standard => g.n_left(),
        Orientation::Transposed => g.n_right(),
    };
    ClassicalCode {
        h: SparseBitMatrix::new(n_cols, rows).expect("graph adjacency is valid"),
        graph: g.clone(),
        orientation,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipOutcome {
    /// The flipped bits, or `None` on FAIL.
    pub correction: Option<BitVector>,
    pub iterations: usize,
    /// The iteration cap was hit (only possible with even variable degrees).
    pub stalled: bool,
}

/// Sipser–Spielman bit flipping on the received word `y`.
///
/// While some variable has at least `ceil(deg/2)` unsatisfied checks, the
/// lowest-indexed such variable is flipped and the scan restarts at 0.
/// Variables of degree zero are never flipped. The loop is capped at
/// `2m` flips.
pub fn flip_decode(code: &ClassicalCode, y: &BitVector) -> Result<FlipOutcome> {
    let h = &code.h;
    if y.len() != h.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: h.n_cols(),
            found: y.len(),
        });
    }
    let n = h.n_cols();
    let mut unsat_checks = h.mat_vec_mul(y)?.to_bools();
    let mut unsat = vec![0usize; n];
    let mut n_unsat = 0;
    for (c, &u) in unsat_checks.iter().enumerate() {
        if u {
            n_unsat += 1;
            for &v in h.row(c) {
                unsat[v] += 1;
            }
        }
    }
    let deg: Vec<usize> = h.column_weights();
    let mut flipped = vec![false; n];
    let cap = 2 * h.n_rows();
    let mut iterations = 0;
    let mut stalled = false;
    while let Some(i) = (0..n).find(|&i| deg[i] > 0 && 2 * unsat[i] >= deg[i]) {
        if iterations == cap {
            stalled = true;
            break;
        }
        flipped[i] ^= true;
        for &c in h.column(i) {
            let now = !unsat_checks[c];
            unsat_checks[c] = now;
            if now {
                n_unsat += 1;
            } else {
                n_unsat -= 1;
            }
            for &v in h.row(c) {
                if now {
                    unsat[v] += 1;
                } else {
                    unsat[v] -= 1;
                }
            }
        }
        iterations += 1;
    }
    let correction = (n_unsat == 0).then(|| BitVector::from_bools(&flipped));
    Ok(FlipOutcome {
        correction,
        iterations,
        stalled,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlipBenchmark {
    pub failure_rate: f64,
    pub failures: u64,
    pub trials: u64,
    pub ci99: f64,
}

fn sample_bsc(n: usize, p: f64, rng: &mut impl Rng) -> BitVector {
    let support = (0..n).filter(|_| rng.gen::<f64>() < p).collect();
    BitVector::from_sorted_unchecked(n, support)
}

/// Monte Carlo block error rate of [`flip_decode`] over a binary symmetric
/// channel, transmitting the zero codeword. A trial fails unless the
/// decoder returns exactly the channel error.
pub fn flip_benchmark(code: &ClassicalCode, p: f64, trials: u64, seed: u64) -> Result<FlipBenchmark> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameters(format!("p = {p} outside [0, 1]")));
    }
    let n = code.n_bits();
    let failures: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_stream(seed, t, StreamTag::Classical);
            let e = sample_bsc(n, p, &mut rng);
            let out = flip_decode(code, &e).expect("length matches");
            u64::from(out.correction.as_ref() != Some(&e))
        })
        .sum();
    Ok(FlipBenchmark {
        failure_rate: if trials == 0 { 0.0 } else { failures as f64 / trials as f64 },
        failures,
        trials,
        ci99: wald_halfwidth99(failures, trials),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphSelection {
    pub best_index: usize,
    pub benchmarks: Vec<FlipBenchmark>,
}

/// Benchmarks every candidate with the same seed (common random numbers)
/// and picks the lowest failure rate; ties go to the lowest index.
pub fn select_best_graph(
    candidates: &[BiregularBipartiteGraph],
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<GraphSelection> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameters("no candidate graphs".into()));
    }
    let benchmarks = candidates
        .iter()
        .map(|g| flip_benchmark(&code_from_graph(g, Orientation::Standard), p, trials, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut best_index = 0;
    for (i, b) in benchmarks.iter().enumerate() {
        if b.failures < benchmarks[best_index].failures {
            best_index = i;
        }
    }
    Ok(GraphSelection {
        best_index,
        benchmarks,
    })
}
