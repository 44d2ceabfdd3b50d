//! Random biregular bipartite factor graphs and their expansion audit.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::combinatorics::{binomial, for_each_combination};
use crate::error::{Error, Result};
use crate::gf2::parse_usizes;
use crate::rng;

/// Attempts allowed when repairing multi-edges after the initial pairing.
pub const SIMPLE_GRAPH_RETRY_BUDGET: usize = 10_000;

/// Default cap on the number of subsets an expansion audit may enumerate.
pub const DEFAULT_AUDIT_BUDGET: u128 = 20_000_000;

/// A simple `(deg_left, deg_right)`-biregular bipartite graph. Left nodes are
/// variables, right nodes are checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiregularBipartiteGraph {
    n_left: usize,
    n_right: usize,
    deg_left: usize,
    deg_right: usize,
    /// Sorted `(left, right)` pairs.
    edges: Vec<(usize, usize)>,
    left_adj: Vec<Vec<usize>>,
    right_adj: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl BiregularBipartiteGraph {
    /// Validates and builds a graph from an edge list.
    pub fn new(
        n_left: usize,
        n_right: usize,
        deg_left: usize,
        deg_right: usize,
        mut edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        check_handshake(n_left, n_right, deg_left, deg_right)?;
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameters(format!(
                "duplicate edge {:?}",
                w[0]
            )));
        }
        let mut left_adj = vec![Vec::new(); n_left];
        let mut right_adj = vec![Vec::new(); n_right];
        for &(l, r) in &edges {
            if l >= n_left || r >= n_right {
                return Err(Error::InvalidParameters(format!(
                    "edge ({l}, {r}) outside {n_left}x{n_right}"
                )));
            }
            left_adj[l].push(r);
            right_adj[r].push(l);
        }
        if let Some(l) = left_adj.iter().position(|a| a.len() != deg_left) {
            return Err(Error::InvalidParameters(format!(
                "left node {l} has degree {} instead of {deg_left}",
                left_adj[l].len()
            )));
        }
        if let Some(r) = right_adj.iter().position(|a| a.len() != deg_right) {
            return Err(Error::InvalidParameters(format!(
                "right node {r} has degree {} instead of {deg_right}",
                right_adj[r].len()
            )));
        }
        for a in right_adj.iter_mut() {
            a.sort_unstable();
        }
        Ok(Self {
            n_left,
            n_right,
            deg_left,
            deg_right,
            edges,
            left_adj,
            right_adj,
        })
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn deg_left(&self) -> usize {
        self.deg_left
    }

    pub fn deg_right(&self) -> usize {
        self.deg_right
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Right neighbours of left node `l`, ascending.
    pub fn left_neighbors(&self, l: usize) -> &[usize] {
        &self.left_adj[l]
    }

    /// Left neighbours of right node `r`, ascending.
    pub fn right_neighbors(&self, r: usize) -> &[usize] {
        &self.right_adj[r]
    }

    pub fn side_size(&self, side: Side) -> usize {
        match side {
            Side::Left => self.n_left,
            Side::Right => self.n_right,
        }
    }

    pub fn side_degree(&self, side: Side) -> usize {
        match side {
            Side::Left => self.deg_left,
            Side::Right => self.deg_right,
        }
    }

    /// Largest number of neighbours shared by two distinct nodes of `side`.
    pub fn max_common_neighbors(&self, side: Side) -> usize {
        let other = match side {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        };
        let mut count = vec![0usize; self.side_size(side)];
        let mut best = 0;
        for a in 0..self.side_size(side) {
            for &u in self.neighbors(side, a) {
                for &b in self.neighbors(other, u) {
                    if b > a {
                        count[b] += 1;
                    }
                }
            }
            for c in count.iter_mut() {
                best = best.max(*c);
                *c = 0;
            }
        }
        best
    }

    fn neighbors(&self, side: Side, node: usize) -> &[usize] {
        match side {
            Side::Left => &self.left_adj[node],
            Side::Right => &self.right_adj[node],
        }
    }

    /// Text form: `n m deg_left deg_right`, then one `left right` per line.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} {} {} {}\n",
            self.n_left, self.n_right, self.deg_left, self.deg_right
        );
        for (l, r) in &self.edges {
            let _ = writeln!(s, "{l} {r}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let h = parse_usizes(header, 1)?;
        let [n, m, dl, dr] = h[..] else {
            return Err(Error::Parse {
                line: 1,
                msg: "expected `n m deg_left deg_right`".into(),
            });
        };
        let mut edges = Vec::new();
        for (ln, line) in lines {
            let p = parse_usizes(line, ln + 1)?;
            let [l, r] = p[..] else {
                return Err(Error::Parse {
                    line: ln + 1,
                    msg: "expected `left right`".into(),
                });
            };
            edges.push((l, r));
        }
        Self::new(n, m, dl, dr, edges)
    }
}

fn check_handshake(n: usize, m: usize, dl: usize, dr: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameters(
            "both sides need at least one node".into(),
        ));
    }
    if dl * n != dr * m {
        return Err(Error::InvalidParameters(format!(
            "handshake violated: {dl}*{n} != {dr}*{m}"
        )));
    }
    Ok(())
}

/// Samples a simple biregular graph from the configuration model.
///
/// Half-edges are paired by a uniform shuffle. Any multi-edges in the pairing
/// are then removed by degree-preserving switches: a repeated edge `(a, b)`
/// and a random edge `(c, d)` become `(a, d)` and `(c, b)` when neither new
/// edge exists yet. At most [`SIMPLE_GRAPH_RETRY_BUDGET`] switches are tried.
pub fn generate_configuration_model(
    n: usize,
    m: usize,
    deg_left: usize,
    deg_right: usize,
    seed: u64,
) -> Result<BiregularBipartiteGraph> {
    check_handshake(n, m, deg_left, deg_right)?;
    if deg_left > m || deg_right > n {
        return Err(Error::InvalidParameters(format!(
            "no simple ({deg_left},{deg_right})-biregular graph on {n}+{m} nodes"
        )));
    }
    let mut rng = rng::seeded(seed);
    let mut stubs: Vec<usize> = (0..m)
        .flat_map(|r| std::iter::repeat_n(r, deg_right))
        .collect();
    stubs.shuffle(&mut rng);
    let mut edges: Vec<(usize, usize)> = stubs
        .iter()
        .enumerate()
        .map(|(k, &r)| (k / deg_left, r))
        .collect();

    let mut count: HashMap<(usize, usize), u32> = HashMap::with_capacity(edges.len());
    for &e in &edges {
        *count.entry(e).or_default() += 1;
    }
    let mut attempts = 0;
    // Lowest-index repeated edge first, for determinism.
    while let Some(i) = edges.iter().position(|e| count[e] > 1) {
        let (a, b) = edges[i];
        let mut switched = false;
        while !switched {
            if attempts == SIMPLE_GRAPH_RETRY_BUDGET {
                return Err(Error::GenerationFailed {
                    attempts,
                    reason: "multi-edges remain".into(),
                });
            }
            attempts += 1;
            let j = rng.gen_range(0..edges.len());
            let (c, d) = edges[j];
            if c == a || d == b || count.contains_key(&(a, d)) || count.contains_key(&(c, b)) {
                continue;
            }
            for old in [(a, b), (c, d)] {
                let k = count.get_mut(&old).expect("edge present");
                *k -= 1;
                if *k == 0 {
                    count.remove(&old);
                }
            }
            edges[i] = (a, d);
            edges[j] = (c, b);
            *count.entry((a, d)).or_default() += 1;
            *count.entry((c, b)).or_default() += 1;
            switched = true;
        }
    }
    BiregularBipartiteGraph::new(n, m, deg_left, deg_right, edges)
}

/// Exhaustive neighbourhood sizes for all subsets of one side up to a size.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionReport {
    pub side: Side,
    pub side_size: usize,
    pub degree: usize,
    pub max_subset_size: usize,
    /// Entry `s - 1` covers subsets of size `s`.
    pub per_size: Vec<SizeExpansion>,
    /// `1 - min ratio` over all audited sizes.
    pub delta_hat: f64,
    /// `max_subset_size / side_size`.
    pub gamma_hat: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SizeExpansion {
    pub size: usize,
    /// Smallest `|Γ(S)|` over subsets `S` of this size.
    pub min_neighborhood: usize,
    /// `min_neighborhood / (degree * size)`.
    pub ratio: f64,
}

impl ExpansionReport {
    /// The worst ratio as an exact fraction `(|Γ(S)|, Δ·|S|)`.
    pub fn min_ratio(&self) -> (usize, usize) {
        self.per_size
            .iter()
            .map(|e| (e.min_neighborhood, self.degree * e.size))
            .min_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)))
            .unwrap_or((1, 1))
    }

    /// Exact test of `delta_hat < num / den`.
    pub fn delta_below(&self, num: usize, den: usize) -> bool {
        // 1 - g/t < num/den  <=>  den*g > (den - num)*t
        let (g, t) = self.min_ratio();
        den * g > (den - num) * t
    }

    /// `γ̂ · side_size`, i.e. the audited subset size.
    pub fn gamma_times_size(&self) -> usize {
        self.max_subset_size
    }
}

/// Enumerates every subset of `side` with at most `s_max` nodes and records
/// the smallest neighbourhood per size. Refuses when the number of subsets
/// exceeds `budget`.
pub fn expansion_audit(
    g: &BiregularBipartiteGraph,
    side: Side,
    s_max: usize,
    budget: u128,
) -> Result<ExpansionReport> {
    let n_side = g.side_size(side);
    let degree = g.side_degree(side);
    if s_max == 0 || s_max > n_side {
        return Err(Error::InvalidParameters(format!(
            "s_max must lie in 1..={n_side}"
        )));
    }
    let cost = (1..=s_max).fold(0u128, |acc, s| acc.saturating_add(binomial(n_side, s)));
    if cost > budget {
        return Err(Error::BudgetExceeded { cost, budget });
    }
    let other = match side {
        Side::Left => g.n_right(),
        Side::Right => g.n_left(),
    };
    let mut stamp = vec![0u64; other];
    let mut epoch = 0u64;
    let mut per_size = Vec::with_capacity(s_max);
    for s in 1..=s_max {
        let mut worst = usize::MAX;
        for_each_combination(n_side, s, |subset| {
            epoch += 1;
            let mut reach = 0;
            for &v in subset {
                for &u in g.neighbors(side, v) {
                    if stamp[u] != epoch {
                        stamp[u] = epoch;
                        reach += 1;
                    }
                }
            }
            worst = worst.min(reach);
            true
        });
        per_size.push(SizeExpansion {
            size: s,
            min_neighborhood: worst,
            ratio: worst as f64 / (degree * s) as f64,
        });
    }
    let min_ratio = per_size
        .iter()
        .map(|e| e.ratio)
        .fold(f64::INFINITY, f64::min);
    Ok(ExpansionReport {
        side,
        side_size: n_side,
        degree,
        max_subset_size: s_max,
        per_size,
        delta_hat: 1.0 - min_ratio,
        gamma_hat: s_max as f64 / n_side as f64,
    })
}

/// Weight below which small-set-flip is guaranteed to decode, from audited
/// expansion. Only meaningful when `applicable` holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdversarialBound {
    pub weight: usize,
    pub applicable: bool,
}

/// `floor(min(γ_V n, γ_C m) / (3 (1 + Δ_C)))`.
pub fn adversarial_weight(gamma_v_n: usize, gamma_c_m: usize, deg_right: usize) -> usize {
    gamma_v_n.min(gamma_c_m) / (3 * (1 + deg_right))
}

/// The small-set-flip correction radius implied by two audits of `g`.
/// Applicable only when both audited δ̂ are below 1/6.
pub fn theorem1_bound(
    g: &BiregularBipartiteGraph,
    report_left: &ExpansionReport,
    report_right: &ExpansionReport,
) -> AdversarialBound {
    debug_assert_eq!(report_left.side, Side::Left);
    debug_assert_eq!(report_right.side, Side::Right);
    AdversarialBound {
        weight: adversarial_weight(
            report_left.gamma_times_size(),
            report_right.gamma_times_size(),
            g.deg_right(),
        ),
        applicable: report_left.delta_below(1, 6) && report_right.delta_below(1, 6),
    }
}
