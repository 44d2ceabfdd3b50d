//! CSS codes and the hypergraph product construction.
//!
//! Qubits of a product code are laid out as the V1×V2 block (row-major,
//! index `v1 * n2 + v2`) followed by the C1×C2 block (index
//! `n1 n2 + c1 * m2 + c2`). X generators are indexed by V1×C2 and Z
//! generators by C1×V2, both row-major:
//!
//! ```text
//! H_X = [ I_{n1} ⊗ H2 | H1^T ⊗ I_{m2} ]
//! H_Z = [ H1 ⊗ I_{n2} | I_{m1} ⊗ H2^T ]
//! ```
//!
//! so `H_X H_Z^T = H1^T ⊗ H2 + H1^T ⊗ H2 = 0`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::classical::{code_from_graph, Orientation};
use crate::combinatorics::for_each_combination;
use crate::error::{Error, Result};
use crate::gf2::{BitVector, RowSpaceBuilder, SparseBitMatrix};
use crate::graph::BiregularBipartiteGraph;

/// Default cap on vectors enumerated by the distance oracles.
pub const DEFAULT_DISTANCE_BUDGET: u128 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSplit {
    /// `n1 * n2` qubits of the V×V block.
    pub v_block: usize,
    /// `m1 * m2` qubits of the C×C block.
    pub c_block: usize,
}

/// An error type together with the matrices that see it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    /// Z errors: detected by `H_X`, harmless modulo `rowspace(H_Z)`.
    Z,
    /// X errors: detected by `H_Z`, harmless modulo `rowspace(H_X)`.
    X,
}

impl Sector {
    pub const BOTH: [Sector; 2] = [Sector::Z, Sector::X];
}

/// A CSS code given by its two check matrices.
#[derive(Clone, Debug)]
pub struct CssCode {
    hx: SparseBitMatrix,
    hz: SparseBitMatrix,
    block_split: Option<BlockSplit>,
    k: usize,
    k_formula: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeParameters {
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub rate: f64,
}

/// Distinct degree and weight values, per block and per generator type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightProfile {
    pub v_block_qubit_degrees: BTreeSet<usize>,
    pub c_block_qubit_degrees: BTreeSet<usize>,
    pub x_generator_weights: BTreeSet<usize>,
    pub z_generator_weights: BTreeSet<usize>,
}

/// X and Z check sets share an even number of qubits, pair by pair.
fn check_orthogonal(hx: &SparseBitMatrix, hz: &SparseBitMatrix) -> Result<()> {
    let mut parity = vec![false; hz.n_rows()];
    let mut touched = Vec::new();
    for (xr, row) in hx.rows().enumerate() {
        for &q in row {
            for &zr in hz.column(q) {
                if !parity[zr] {
                    touched.push(zr);
                }
                parity[zr] ^= true;
            }
        }
        for &zr in &touched {
            if parity[zr] {
                return Err(Error::CssViolation { x_row: xr, z_row: zr });
            }
        }
        for zr in touched.drain(..) {
            parity[zr] = false;
        }
    }
    Ok(())
}

impl CssCode {
    /// Validates the CSS condition and computes `k` from ranks. When
    /// `k_formula` is given it must agree with the rank-based value.
    pub fn new(
        hx: SparseBitMatrix,
        hz: SparseBitMatrix,
        block_split: Option<BlockSplit>,
        k_formula: Option<usize>,
    ) -> Result<Self> {
        if hx.n_cols() != hz.n_cols() {
            return Err(Error::DimensionMismatch {
                expected: hx.n_cols(),
                found: hz.n_cols(),
            });
        }
        if let Some(b) = block_split {
            if b.v_block + b.c_block != hx.n_cols() {
                return Err(Error::InvalidParameters(format!(
                    "block split {} + {} does not cover {} qubits",
                    b.v_block,
                    b.c_block,
                    hx.n_cols()
                )));
            }
        }
        check_orthogonal(&hx, &hz)?;
        let k = hx.n_cols() - hx.rank() - hz.rank();
        if let Some(f) = k_formula {
            if f != k {
                return Err(Error::ParameterMismatch {
                    rank_k: k,
                    formula_k: f,
                });
            }
        }
        Ok(Self {
            hx,
            hz,
            block_split,
            k,
            k_formula,
        })
    }

    pub fn hx(&self) -> &SparseBitMatrix {
        &self.hx
    }

    pub fn hz(&self) -> &SparseBitMatrix {
        &self.hz
    }

    /// The checks that detect errors of this sector.
    pub fn detecting(&self, sector: Sector) -> &SparseBitMatrix {
        match sector {
            Sector::Z => &self.hx,
            Sector::X => &self.hz,
        }
    }

    /// The generators whose span holds the harmless errors of this sector.
    pub fn stabilizers(&self, sector: Sector) -> &SparseBitMatrix {
        match sector {
            Sector::Z => &self.hz,
            Sector::X => &self.hx,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.hx.n_cols()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `k1 k2 + k1^T k2^T` when the code came from a product.
    pub fn k_formula(&self) -> Option<usize> {
        self.k_formula
    }

    pub fn block_split(&self) -> Option<BlockSplit> {
        self.block_split
    }

    pub fn weight_profile(&self) -> WeightProfile {
        let (v, _c) = match self.block_split {
            Some(b) => (b.v_block, b.c_block),
            None => (self.n_qubits(), 0),
        };
        let xw = self.hx.column_weights();
        let zw = self.hz.column_weights();
        let deg: Vec<usize> = xw.iter().zip(&zw).map(|(a, b)| a + b).collect();
        WeightProfile {
            v_block_qubit_degrees: deg[..v].iter().copied().collect(),
            c_block_qubit_degrees: deg[v..].iter().copied().collect(),
            x_generator_weights: self.hx.row_weights().into_iter().collect(),
            z_generator_weights: self.hz.row_weights().into_iter().collect(),
        }
    }
}

/// The hypergraph product of two factor graphs.
pub fn hypergraph_product(g1: &BiregularBipartiteGraph, g2: &BiregularBipartiteGraph) -> Result<CssCode> {
    let c1 = code_from_graph(g1, Orientation::Standard);
    let c2 = code_from_graph(g2, Orientation::Standard);
    let (h1, h2) = (c1.parity_check(), c2.parity_check());
    let (m1, n1) = (h1.n_rows(), h1.n_cols());
    let (m2, n2) = (h2.n_rows(), h2.n_cols());

    let hx = SparseBitMatrix::identity(n1)
        .kron(h2)
        .hstack(&h1.transpose().kron(&SparseBitMatrix::identity(m2)))?;
    let hz = h1
        .kron(&SparseBitMatrix::identity(n2))
        .hstack(&SparseBitMatrix::identity(m1).kron(&h2.transpose()))?;

    let (r1, r2) = (h1.rank(), h2.rank());
    let (k1, k1t) = (n1 - r1, m1 - r1);
    let (k2, k2t) = (n2 - r2, m2 - r2);
    let split = BlockSplit {
        v_block: n1 * n2,
        c_block: m1 * m2,
    };
    CssCode::new(hx, hz, Some(split), Some(k1 * k2 + k1t * k2t))
}

/// `N`, `k` and the rate; re-checks `k` against the product formula.
pub fn code_parameters(c: &CssCode) -> Result<CodeParameters> {
    let n = c.n_qubits();
    let k = n - c.hx.rank() - c.hz.rank();
    if let Some(f) = c.k_formula {
        if f != k {
            return Err(Error::ParameterMismatch {
                rank_k: k,
                formula_k: f,
            });
        }
    }
    Ok(CodeParameters {
        n,
        k,
        rate: k as f64 / n as f64,
    })
}

/// Coset representatives for the logical operators.
#[derive(Clone, Debug)]
pub struct LogicalBasis {
    /// Representatives of `ker H_X / rowspace(H_Z)`.
    pub z_logicals: Vec<BitVector>,
    /// Representatives of `ker H_Z / rowspace(H_X)`.
    pub x_logicals: Vec<BitVector>,
}

fn quotient_basis(kernel_of: &SparseBitMatrix, modulo: &SparseBitMatrix) -> Vec<BitVector> {
    let mut span = RowSpaceBuilder::new(modulo.n_cols());
    for i in 0..modulo.n_rows() {
        span.insert(&modulo.row_vector(i));
    }
    kernel_of
        .kernel_basis()
        .into_iter()
        .filter(|v| span.insert(v))
        .collect()
}

/// Logical bases by kernel and quotient computation. Cubic in `N`.
pub fn logical_basis(c: &CssCode) -> LogicalBasis {
    LogicalBasis {
        z_logicals: quotient_basis(&c.hx, &c.hz),
        x_logicals: quotient_basis(&c.hz, &c.hx),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Distances {
    /// Minimum weight of `ker H_Z \ rowspace(H_X)`.
    pub d_x: usize,
    /// Minimum weight of `ker H_X \ rowspace(H_Z)`.
    pub d_z: usize,
    pub d: usize,
}

/// Smallest weight of a vector in `ker kernel_of` outside `rowspace(modulo)`,
/// by enumerating vectors in order of weight.
fn min_logical_weight(
    kernel_of: &SparseBitMatrix,
    modulo: &SparseBitMatrix,
    budget: u128,
) -> Result<Option<usize>> {
    let n = kernel_of.n_cols();
    let mut spent: u128 = 0;
    for w in 1..=n {
        let mut found = false;
        let mut over = false;
        for_each_combination(n, w, |s| {
            spent += 1;
            if spent > budget {
                over = true;
                return false;
            }
            if kernel_of.mul_support(s).is_zero() && !modulo.support_in_row_space(s) {
                found = true;
                return false;
            }
            true
        });
        if found {
            return Ok(Some(w));
        }
        if over {
            return Err(Error::BudgetExceeded {
                cost: spent,
                budget,
            });
        }
    }
    Ok(None)
}

/// Exact distances by exhaustive search. Refuses codes with `k = 0` and
/// searches larger than `budget` vectors.
pub fn brute_force_distance(c: &CssCode, budget: u128) -> Result<Distances> {
    if c.k == 0 {
        return Err(Error::InvalidParameters("code encodes no qubits".into()));
    }
    let d_z = min_logical_weight(&c.hx, &c.hz, budget)?.expect("k > 0");
    let d_x = min_logical_weight(&c.hz, &c.hx, budget)?.expect("k > 0");
    Ok(Distances {
        d_x,
        d_z,
        d: d_x.min(d_z),
    })
}

/// Minimum nonzero codeword weight of `ker h`, or `None` for the zero code.
pub fn classical_distance(h: &SparseBitMatrix, budget: u128) -> Result<Option<usize>> {
    min_logical_weight(h, &SparseBitMatrix::zeros(0, h.n_cols()), budget)
}

/// Distances predicted from the constituent classical codes.
///
/// Z logicals come in two families: `e ⊗ b` on the V block with `b ∈ C2`
/// (present when `k1 k2 > 0`) and `c ⊗ e` on the C block with `c ∈ C1^T`
/// (present when `k1^T k2^T > 0`). Hence `d_z = min(d2, d1^T)` and
/// symmetrically `d_x = min(d1, d2^T)`, each minimum taken over the
/// families that exist.
pub fn product_distances(
    g1: &BiregularBipartiteGraph,
    g2: &BiregularBipartiteGraph,
    budget: u128,
) -> Result<Option<Distances>> {
    let h1 = code_from_graph(g1, Orientation::Standard).parity_check().clone();
    let h2 = code_from_graph(g2, Orientation::Standard).parity_check().clone();
    let (h1t, h2t) = (h1.transpose(), h2.transpose());
    let (r1, r2) = (h1.rank(), h2.rank());
    let first = (h1.n_cols() - r1) * (h2.n_cols() - r2) > 0;
    let second = (h1.n_rows() - r1) * (h2.n_rows() - r2) > 0;
    if !first && !second {
        return Ok(None);
    }
    let d1 = classical_distance(&h1, budget)?;
    let d2 = classical_distance(&h2, budget)?;
    let d1t = classical_distance(&h1t, budget)?;
    let d2t = classical_distance(&h2t, budget)?;
    let pick = |a: Option<usize>, use_a: bool, b: Option<usize>, use_b: bool| {
        [(a, use_a), (b, use_b)]
            .into_iter()
            .filter_map(|(d, used)| if used { d } else { None })
            .min()
            .expect("at least one family exists")
    };
    let d_z = pick(d2, first, d1t, second);
    let d_x = pick(d1, first, d2t, second);
    Ok(Some(Distances {
        d_x,
        d_z,
        d: d_x.min(d_z),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_configuration_model;

    fn forced() -> BiregularBipartiteGraph {
        BiregularBipartiteGraph::new(2, 1, 1, 2, vec![(0, 0), (1, 0)]).unwrap()
    }

    fn triangle() -> BiregularBipartiteGraph {
        let edges = (0..3).flat_map(|i| [(i, i), (i, (i + 1) % 3)]).collect();
        BiregularBipartiteGraph::new(3, 3, 2, 2, edges).unwrap()
    }

    #[test]
    fn five_qubit_product_by_hand() {
        // H = (1 1): H_X = [I2 ⊗ H | H^T ⊗ I1], H_Z = [H ⊗ I2 | I1 ⊗ H^T].
        let c = hypergraph_product(&forced(), &forced()).unwrap();
        assert_eq!(c.n_qubits(), 5);
        assert_eq!(c.hx().to_dense(), vec![
            vec![true, true, false, false, true],
            vec![false, false, true, true, true],
        ]);
        assert_eq!(c.hz().to_dense(), vec![
            vec![true, false, true, false, true],
            vec![false, true, false, true, true],
        ]);
        let p = code_parameters(&c).unwrap();
        assert_eq!((p.n, p.k), (5, 1));
        assert_eq!(c.k_formula(), Some(1));
    }

    #[test]
    fn weight_profiles_56_and_510() {
        let g = generate_configuration_model(12, 10, 5, 6, 4).unwrap();
        let w = hypergraph_product(&g, &g).unwrap().weight_profile();
        assert_eq!(w.v_block_qubit_degrees, BTreeSet::from([10]));
        assert_eq!(w.c_block_qubit_degrees, BTreeSet::from([12]));
        assert_eq!(w.x_generator_weights, BTreeSet::from([11]));
        assert_eq!(w.z_generator_weights, BTreeSet::from([11]));

        let g = generate_configuration_model(20, 10, 5, 10, 4).unwrap();
        let w = hypergraph_product(&g, &g).unwrap().weight_profile();
        assert_eq!(w.v_block_qubit_degrees, BTreeSet::from([10]));
        assert_eq!(w.c_block_qubit_degrees, BTreeSet::from([20]));
        assert_eq!(w.x_generator_weights, BTreeSet::from([15]));
        assert_eq!(w.z_generator_weights, BTreeSet::from([15]));
    }

    #[test]
    fn rejects_non_css_pair() {
        let hx = SparseBitMatrix::new(3, vec![vec![0, 1]]).unwrap();
        let hz = SparseBitMatrix::new(3, vec![vec![1, 2]]).unwrap();
        assert!(matches!(
            CssCode::new(hx, hz, None, None),
            Err(Error::CssViolation { x_row: 0, z_row: 0 })
        ));
    }

    #[test]
    fn wrong_formula_is_reported() {
        let hx = SparseBitMatrix::new(2, vec![vec![0, 1]]).unwrap();
        let hz = SparseBitMatrix::new(2, vec![vec![0, 1]]).unwrap();
        assert!(matches!(
            CssCode::new(hx, hz, None, Some(3)),
            Err(Error::ParameterMismatch { rank_k: 0, formula_k: 3 })
        ));
    }

    /// All vectors of length n as supports.
    fn all_vectors(n: usize) -> impl Iterator<Item = BitVector> {
        (0u32..1 << n).map(move |m| {
            BitVector::new(n, (0..n).filter(|i| m >> i & 1 == 1).collect()).unwrap()
        })
    }

    #[test]
    fn five_qubit_logicals_by_exhaustion() {
        let c = hypergraph_product(&forced(), &forced()).unwrap();
        let b = logical_basis(&c);
        assert_eq!(b.z_logicals.len(), 1);
        assert_eq!(b.x_logicals.len(), 1);
        assert_eq!(b.z_logicals[0].overlap(&b.x_logicals[0]) % 2, 1);
        // Exhaustive: exactly 2^(N - rank H_X) kernel vectors, half of them
        // outside the stabilizer space.
        let nontrivial = all_vectors(5)
            .filter(|v| c.hx().mat_vec_mul(v).unwrap().is_zero())
            .filter(|v| !c.hz().in_row_space(v).unwrap())
            .count();
        assert_eq!(nontrivial, 4);
        assert!(!c.hz().in_row_space(&b.z_logicals[0]).unwrap());
        assert!(c.hx().mat_vec_mul(&b.z_logicals[0]).unwrap().is_zero());
    }

    #[test]
    fn distance_of_five_qubit_product_matches_classical_route() {
        let c = hypergraph_product(&forced(), &forced()).unwrap();
        let d = brute_force_distance(&c, DEFAULT_DISTANCE_BUDGET).unwrap();
        let pred = product_distances(&forced(), &forced(), DEFAULT_DISTANCE_BUDGET)
            .unwrap()
            .unwrap();
        assert_eq!(d, pred);
        assert_eq!(d.d, 2);
    }

    #[test]
    fn asymmetric_distances_match_classical_route() {
        // Triangle cycle code: d = d^T = 3, k = k^T = 1. Forced graph: d = 2, k^T = 0.
        for (a, b) in [(triangle(), forced()), (forced(), triangle()), (triangle(), triangle())] {
            let c = hypergraph_product(&a, &b).unwrap();
            let d = brute_force_distance(&c, DEFAULT_DISTANCE_BUDGET).unwrap();
            let pred = product_distances(&a, &b, DEFAULT_DISTANCE_BUDGET).unwrap().unwrap();
            assert_eq!(d, pred);
            assert!(d.d >= 1);
        }
        let c = hypergraph_product(&triangle(), &forced()).unwrap();
        let d = brute_force_distance(&c, DEFAULT_DISTANCE_BUDGET).unwrap();
        assert_eq!((d.d_x, d.d_z), (3, 2));
    }

    #[test]
    fn distance_budget_is_enforced() {
        let g = generate_configuration_model(12, 10, 5, 6, 4).unwrap();
        let c = hypergraph_product(&g, &g).unwrap();
        assert!(matches!(
            brute_force_distance(&c, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
