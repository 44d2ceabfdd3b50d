//! Toric code baseline with an exact minimum-weight matching decoder.
//!
//! Qubits are the edges of an `L × L` torus: horizontal edge `h(r, c) =
//! r L + c` joins vertices `(r, c)` and `(r, c + 1)`, vertical edge `v(r, c) =
//! L² + r L + c` joins `(r, c)` and `(r + 1, c)`. Vertex checks form `H_X`
//! and plaquette checks form `H_Z`; plaquette `(r, c)` is bounded by
//! `h(r, c)`, `h(r + 1, c)`, `v(r, c)` and `v(r, c + 1)`.
//!
//! Z errors light up vertices and X errors light up plaquettes. In both
//! cases defects live on an `L × L` torus of sites and are paired up by an
//! exact maximum-cardinality minimum-weight matching on toroidal Manhattan
//! distance.

use mwmatching::Matching;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{BitVector, SparseBitMatrix};
use crate::hgp::{CssCode, Sector};

#[derive(Clone, Debug)]
pub struct ToricCode {
    l: usize,
    code: CssCode,
}

impl ToricCode {
    pub fn side(&self) -> usize {
        self.l
    }

    pub fn code(&self) -> &CssCode {
        &self.code
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.l * self.l
    }

    fn h(&self, r: usize, c: usize) -> usize {
        (r % self.l) * self.l + c % self.l
    }

    fn v(&self, r: usize, c: usize) -> usize {
        self.l * self.l + (r % self.l) * self.l + c % self.l
    }

    /// Edge between site `(r, c)` and its neighbour one step right (`down =
    /// false`) or down, on the lattice where `sector` errors live.
    fn step_edge(&self, sector: Sector, r: usize, c: usize, down: bool) -> usize {
        match (sector, down) {
            (Sector::Z, false) => self.h(r, c),
            (Sector::Z, true) => self.v(r, c),
            (Sector::X, false) => self.v(r, c + 1),
            (Sector::X, true) => self.h(r + 1, c),
        }
    }

    /// A horizontal non-contractible loop of `sector` errors along row or
    /// column 0. Such a loop is a logical operator.
    pub fn horizontal_loop(&self, sector: Sector) -> BitVector {
        let edges = (0..self.l).map(|c| self.step_edge(sector, 0, c, false));
        BitVector::from_indices(self.n_qubits(), edges).expect("edges in range")
    }

    /// A vertical non-contractible loop of `sector` errors.
    pub fn vertical_loop(&self, sector: Sector) -> BitVector {
        let edges = (0..self.l).map(|r| self.step_edge(sector, r, 0, true));
        BitVector::from_indices(self.n_qubits(), edges).expect("edges in range")
    }
}

pub fn build_toric(l: usize) -> Result<ToricCode> {
    if l < 2 {
        return Err(Error::InvalidParameters(format!("toric side {l} must be at least 2")));
    }
    let h = |r: usize, c: usize| (r % l) * l + c % l;
    let v = |r: usize, c: usize| l * l + (r % l) * l + c % l;
    let mut vertices = Vec::with_capacity(l * l);
    let mut plaquettes = Vec::with_capacity(l * l);
    for r in 0..l {
        for c in 0..l {
            let mut star = vec![h(r, c), h(r, c + l - 1), v(r, c), v(r + l - 1, c)];
            star.sort_unstable();
            vertices.push(star);
            let mut plaq = vec![h(r, c), h(r + 1, c), v(r, c), v(r, c + 1)];
            plaq.sort_unstable();
            plaquettes.push(plaq);
        }
    }
    let n = 2 * l * l;
    let hx = SparseBitMatrix::new(n, vertices)?;
    let hz = SparseBitMatrix::new(n, plaquettes)?;
    let code = CssCode::new(hx, hz, None, Some(2))?;
    Ok(ToricCode { l, code })
}

/// Toroidal Manhattan distance between sites `a` and `b` (`r L + c`).
pub fn toric_distance(l: usize, a: usize, b: usize) -> usize {
    let d = |x: usize, y: usize| {
        let t = x.abs_diff(y);
        t.min(l - t)
    };
    d(a / l, b / l) + d(a % l, b % l)
}

/// Defect pairs, each lower site first, with the edges of the chosen path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefectMatching {
    pub pairs: Vec<(usize, usize)>,
    pub paths: Vec<Vec<usize>>,
}

impl DefectMatching {
    pub fn total_weight(&self) -> usize {
        self.paths.iter().map(Vec::len).sum()
    }
}

/// Steps and direction along one axis: the shorter way round, forward when
/// both ways are equally long.
fn axis_walk(l: usize, from: usize, to: usize) -> (usize, bool) {
    let fwd = (to + l - from) % l;
    if fwd <= l - fwd {
        (fwd, true)
    } else {
        (l - fwd, false)
    }
}

/// Geodesic between two sites: horizontal leg first, then vertical.
fn geodesic(t: &ToricCode, sector: Sector, a: usize, b: usize) -> Vec<usize> {
    let l = t.l;
    let (mut r, mut c) = (a / l, a % l);
    let mut path = Vec::with_capacity(toric_distance(l, a, b));
    let (steps, fwd) = axis_walk(l, c, b % l);
    for _ in 0..steps {
        if fwd {
            path.push(t.step_edge(sector, r, c, false));
            c = (c + 1) % l;
        } else {
            c = (c + l - 1) % l;
            path.push(t.step_edge(sector, r, c, false));
        }
    }
    let (steps, fwd) = axis_walk(l, r, b / l);
    for _ in 0..steps {
        if fwd {
            path.push(t.step_edge(sector, r, c, true));
            r = (r + 1) % l;
        } else {
            r = (r + l - 1) % l;
            path.push(t.step_edge(sector, r, c, true));
        }
    }
    path
}

/// Exact minimum-weight perfect matching of the defects in `syndrome`
/// (vertex defects for Z errors, plaquette defects for X errors).
pub fn match_defects(t: &ToricCode, sector: Sector, syndrome: &BitVector) -> Result<DefectMatching> {
    let l = t.l;
    if syndrome.len() != l * l {
        return Err(Error::DimensionMismatch {
            expected: l * l,
            found: syndrome.len(),
        });
    }
    let defects = syndrome.support();
    if defects.len() % 2 == 1 {
        return Err(Error::InvalidSyndrome(format!(
            "{} defects cannot be paired on a torus",
            defects.len()
        )));
    }
    if defects.is_empty() {
        return Ok(DefectMatching {
            pairs: Vec::new(),
            paths: Vec::new(),
        });
    }
    // Maximising sum(C - d) over perfect matchings minimises sum(d).
    let cap = l as i32 + 1;
    let mut edges = Vec::with_capacity(defects.len() * (defects.len() - 1) / 2);
    for i in 0..defects.len() {
        for j in i + 1..defects.len() {
            edges.push((i, j, cap - toric_distance(l, defects[i], defects[j]) as i32));
        }
    }
    let mate = Matching::new(edges).max_cardinality().solve();
    let mut pairs = Vec::with_capacity(defects.len() / 2);
    let mut paths = Vec::with_capacity(defects.len() / 2);
    for (i, &j) in mate.iter().enumerate() {
        if i < j {
            let (a, b) = (defects[i], defects[j]);
            pairs.push((a, b));
            paths.push(geodesic(t, sector, a, b));
        }
    }
    Ok(DefectMatching { pairs, paths })
}

/// Correction for `sector` errors: the XOR of the matched paths.
pub fn mwpm_decode(t: &ToricCode, sector: Sector, syndrome: &BitVector) -> Result<BitVector> {
    let m = match_defects(t, sector, syndrome)?;
    let mut bits = vec![false; t.n_qubits()];
    for &q in m.paths.iter().flatten() {
        bits[q] ^= true;
    }
    Ok(BitVector::from_bools(&bits))
}

/// Whether a syndrome-free residual of `sector` errors is a logical
/// operator, by its winding parity across two fixed cuts.
pub fn toric_logical_failure(t: &ToricCode, residual: &BitVector, sector: Sector) -> Result<bool> {
    if residual.len() != t.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: t.n_qubits(),
            found: residual.len(),
        });
    }
    if !t.code.detecting(sector).mat_vec_mul(residual)?.is_zero() {
        return Err(Error::InvalidSyndrome("residual has a nonzero syndrome".into()));
    }
    let l = t.l;
    // Each cut meets every stabilizer an even number of times and one
    // logical loop exactly once.
    let parity = |edges: &mut dyn Iterator<Item = usize>| edges.filter(|&q| residual.get(q)).count() % 2 == 1;
    Ok(match sector {
        Sector::Z => parity(&mut (0..l).map(|r| t.h(r, 0))) || parity(&mut (0..l).map(|c| t.v(0, c))),
        Sector::X => parity(&mut (0..l).map(|r| t.v(r, 0))) || parity(&mut (0..l).map(|c| t.h(0, c))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::seq::index::sample;
    use rand::Rng;

    fn brute_min_matching(l: usize, sites: &[usize]) -> usize {
        match sites {
            [] => 0,
            [a, rest @ ..] => (0..rest.len())
                .map(|i| {
                    let mut others = rest.to_vec();
                    let b = others.remove(i);
                    toric_distance(l, *a, b) + brute_min_matching(l, &others)
                })
                .min()
                .unwrap(),
        }
    }

    fn harmless(t: &ToricCode, sector: Sector, e: &BitVector) -> bool {
        let s = t.code.detecting(sector).mat_vec_mul(e).unwrap();
        let corr = mwpm_decode(t, sector, &s).unwrap();
        !toric_logical_failure(t, &e.xor(&corr).unwrap(), sector).unwrap()
    }

    #[test]
    fn lattice_structure() {
        let t = build_toric(8).unwrap();
        assert_eq!((t.n_qubits(), t.code.k()), (128, 2));
        let t2 = build_toric(2).unwrap();
        assert_eq!((t2.n_qubits(), t2.code.hx().rank(), t2.code.hz().rank()), (8, 3, 3));
        for l in 2..=10 {
            let t = build_toric(l).unwrap();
            let c = t.code();
            assert_eq!(c.k(), 2);
            for m in [c.hx(), c.hz()] {
                assert!(m.row_weights().iter().all(|&w| w == 4));
                assert!(m.column_weights().iter().all(|&w| w == 2));
                assert_eq!(m.rank(), l * l - 1);
            }
        }
        assert!(build_toric(1).is_err());
    }

    #[test]
    fn trivial_matchings() {
        let t = build_toric(8).unwrap();
        for sector in Sector::BOTH {
            assert!(mwpm_decode(&t, sector, &BitVector::zeros(64)).unwrap().is_zero());
            let e = BitVector::new(128, vec![t.h(3, 4)]).unwrap();
            let s = t.code.detecting(sector).mat_vec_mul(&e).unwrap();
            assert_eq!(s.weight(), 2);
            assert_eq!(mwpm_decode(&t, sector, &s).unwrap(), e);
            let odd = BitVector::new(64, vec![5]).unwrap();
            assert!(matches!(mwpm_decode(&t, sector, &odd), Err(Error::InvalidSyndrome(_))));
        }
    }

    #[test]
    fn geodesics_have_the_right_boundary() {
        let t = build_toric(6).unwrap();
        for sector in Sector::BOTH {
            for a in 0..36 {
                for b in 0..36 {
                    let path = geodesic(&t, sector, a, b);
                    assert_eq!(path.len(), toric_distance(6, a, b));
                    let mut bits = vec![false; 72];
                    for q in path {
                        bits[q] ^= true;
                    }
                    let s = t.code.detecting(sector).mat_vec_mul(&BitVector::from_bools(&bits)).unwrap();
                    let want = if a == b { vec![] } else { vec![a.min(b), a.max(b)] };
                    assert_eq!(s.support(), &want[..], "{sector:?} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn matching_weight_equals_brute_force_on_eight_defects() {
        let t = build_toric(8).unwrap();
        let mut rng = seeded(17);
        for _ in 0..200 {
            let sites = sample(&mut rng, 64, 8).into_vec();
            let s = BitVector::from_indices(64, sites).unwrap();
            let m = match_defects(&t, Sector::Z, &s).unwrap();
            assert_eq!(m.total_weight(), brute_min_matching(8, s.support()));
            let mut covered: Vec<usize> = m.pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
            covered.sort_unstable();
            assert_eq!(covered, s.support());
        }
    }

    #[test]
    fn winding_parity_examples() {
        let t = build_toric(5).unwrap();
        for sector in Sector::BOTH {
            let stab = t.code.stabilizers(sector).row_vector(7);
            assert!(!toric_logical_failure(&t, &stab, sector).unwrap());
            assert!(toric_logical_failure(&t, &t.horizontal_loop(sector), sector).unwrap());
            assert!(toric_logical_failure(&t, &t.vertical_loop(sector), sector).unwrap());
            let single = BitVector::new(50, vec![0]).unwrap();
            assert!(toric_logical_failure(&t, &single, sector).is_err());
        }
    }

    #[test]
    fn winding_parity_agrees_with_row_space() {
        let t = build_toric(4).unwrap();
        let mut rng = seeded(23);
        for sector in Sector::BOTH {
            let stabs = t.code.stabilizers(sector);
            for _ in 0..1000 {
                let mut e = BitVector::zeros(32);
                for g in 0..16 {
                    if rng.gen_bool(0.5) {
                        e = e.xor(&stabs.row_vector(g)).unwrap();
                    }
                }
                if rng.gen_bool(0.5) {
                    e = e.xor(&t.horizontal_loop(sector)).unwrap();
                }
                if rng.gen_bool(0.5) {
                    e = e.xor(&t.vertical_loop(sector)).unwrap();
                }
                let logical = !stabs.in_row_space(&e).unwrap();
                assert_eq!(toric_logical_failure(&t, &e, sector).unwrap(), logical);
            }
        }
    }

    #[test]
    fn corrects_errors_below_half_the_distance() {
        let t3 = build_toric(3).unwrap();
        let t5 = build_toric(5).unwrap();
        for sector in Sector::BOTH {
            for q in 0..18 {
                assert!(harmless(&t3, sector, &BitVector::new(18, vec![q]).unwrap()));
            }
            for a in 0..50 {
                assert!(harmless(&t5, sector, &BitVector::new(50, vec![a]).unwrap()));
                for b in a + 1..50 {
                    assert!(harmless(&t5, sector, &BitVector::new(50, vec![a, b]).unwrap()), "{a} {b}");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn correction_reproduces_the_syndrome(seed in any::<u64>(), l in 2usize..9, x in any::<bool>()) {
            let t = build_toric(l).unwrap();
            let sector = if x { Sector::X } else { Sector::Z };
            let mut rng = seeded(seed);
            let e = BitVector::from_bools(&(0..t.n_qubits()).map(|_| rng.gen_bool(0.1)).collect::<Vec<_>>());
            let det = t.code.detecting(sector);
            let s = det.mat_vec_mul(&e).unwrap();
            let corr = mwpm_decode(&t, sector, &s).unwrap();
            prop_assert_eq!(det.mat_vec_mul(&corr).unwrap(), s);
        }
    }
}
